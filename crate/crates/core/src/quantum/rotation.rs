use rand::Rng;
use rand_distr::StandardNormal;

use super::RealDirection;

/// Rotation vector `ω = θ·n̂` of a Haar-random rotation (uniform unit
/// quaternion).
pub fn random_rotation_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let mut q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q.iter_mut().for_each(|x| *x /= n);
    if q[0] < 0.0 {
        q.iter_mut().for_each(|x| *x = -*x);
    }
    let half = q[0].clamp(-1.0, 1.0).acos();
    let s = half.sin();
    if s < 1e-15 {
        return [0.0; 3];
    }
    let theta = 2.0 * half;
    [theta * q[1] / s, theta * q[2] / s, theta * q[3] / s]
}

/// Active rotation matrix for `ω` (Rodrigues).
pub fn rotation_matrix(omega: [f64; 3]) -> [[f64; 3]; 3] {
    let theta = (omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2]).sqrt();
    let mut r = [[0.0; 3]; 3];
    if theta == 0.0 {
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        return r;
    }
    let [x, y, z] = omega.map(|w| w / theta);
    let (s, c) = theta.sin_cos();
    let t = 1.0 - c;
    r[0] = [c + x * x * t, x * y * t - z * s, x * z * t + y * s];
    r[1] = [y * x * t + z * s, c + y * y * t, y * z * t - x * s];
    r[2] = [z * x * t - y * s, z * y * t + x * s, c + z * z * t];
    r
}

/// The orthogonal triple `(R x̂, R ŷ, R ẑ)`.
///
/// With `U = exp(−i ω·S)` one has `U (n·S) U† = (R n)·S`, so conjugating an
/// operator built on `(x, y, z)` by `U` gives the same operator built on
/// this triple.
pub fn triple_from_rotation(omega: [f64; 3]) -> [RealDirection; 3] {
    let r = rotation_matrix(omega);
    std::array::from_fn(|c| {
        RealDirection::normalized([r[0][c], r[1][c], r[2][c]]).expect("rotation columns are unit")
    })
}
