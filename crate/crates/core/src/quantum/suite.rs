//! The full set of eigen-identities for the spin-1 singlet, run as one
//! reproducible batch.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    ks_state, mixed_triple_operator, product_state, random_rotation_vector, rotation_unitary, spin_operators,
    total_spin_squared, triple_from_rotation, triple_operator, verify_eigenrelation, Operator,
    Party, RealDirection, SpinKind,
};

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub rotations: usize,
    pub triples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            rotations: 1000,
            triples: 100,
        }
    }
}

/// Worst residual of one identity over all of its instances.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub instances: usize,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub checks: Vec<IdentityCheck>,
}

impl SuiteReport {
    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.checks.iter().all(|c| c.residual <= tol)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Acc {
    checks: Vec<IdentityCheck>,
}

impl Acc {
    fn push(&mut self, name: &'static str, residuals: impl IntoIterator<Item = f64>) {
        let (n, worst) = residuals
            .into_iter()
            .fold((0, 0.0f64), |(n, w), r| (n + 1, if r.is_nan() { f64::INFINITY } else { w.max(r) }));
        self.checks.push(IdentityCheck {
            name,
            instances: n,
            residual: worst,
        });
    }
}

const ALL_PARTIES: [[Party; 3]; 8] = {
    use Party::{First as A, Second as B};
    [
        [A, A, A],
        [A, A, B],
        [A, B, A],
        [A, B, B],
        [B, A, A],
        [B, A, B],
        [B, B, A],
        [B, B, B],
    ]
};

pub fn run_identity_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut acc = Acc { checks: Vec::new() };
    let one = SpinKind::One;
    let pair = [one, one];
    let psi = ks_state();
    let id3 = Operator::identity(3);

    let algebra = [SpinKind::Half, SpinKind::One].map(|k| {
        let (sx, sy, sz) = spin_operators(k);
        sx.commutator(&sy).max_abs_diff(&sz.scale_c(super::C64::new(0.0, 1.0)))
    });
    acc.push("commutator [Sx,Sy] = iSz", algebra);

    let casimir = [SpinKind::Half, SpinKind::One].map(|k| {
        let (sx, sy, sz) = spin_operators(k);
        let sum = &(&sx.square() + &sy.square()) + &sz.square();
        let s = k.s();
        sum.max_abs_diff(&Operator::identity(k.dim()).scale(s * (s + 1.0)))
    });
    acc.push("Sx^2 + Sy^2 + Sz^2 = s(s+1)", casimir);

    let (_, _, sz) = spin_operators(one);
    let sz2 = sz.square();
    let (sx, sy, _) = spin_operators(one);
    acc.push(
        "[Sx^2, Sy^2] = 0 (spin 1)",
        [sx.square().commutator(&sy.square()).max_abs()],
    );

    acc.push(
        "total spin squared, eigenvalue 0",
        [verify_eigenrelation(&total_spin_squared(&pair), &psi, 0.0).expect("dims")],
    );

    let axes = [RealDirection::x(), RealDirection::y(), RealDirection::z()];
    let xyz = [&axes[0], &axes[1], &axes[2]];
    let single_party = [Party::First, Party::Second].map(|p| {
        let op = triple_operator(xyz, [p; 3]).expect("axes are orthogonal");
        verify_eigenrelation(&op, &psi, 2.0).expect("dims")
    });
    acc.push("sum of squares on one particle, eigenvalue 2", single_party);

    let swapped = mixed_triple_operator(&axes[0], &axes[1], &axes[2], 1).expect("axes are orthogonal");
    acc.push(
        "x,y on particle 2 with z on particle 1, eigenvalue 2",
        [verify_eigenrelation(&swapped, &psi, 2.0).expect("dims")],
    );

    let rewritten = &(&Operator::identity(9).scale(2.0) - &id3.tensor(&sz2)) + &sz2.tensor(&id3);
    acc.push(
        "rewritten operator identity 2 - 1(x)Sz^2 + Sz^2(x)1",
        [swapped.max_abs_diff(&rewritten)],
    );

    let eigen_products = [
        (1.0, 0.0, 3.0),
        (-1.0, 0.0, 3.0),
        (0.0, 1.0, 1.0),
        (0.0, -1.0, 1.0),
        (1.0, -1.0, 2.0),
        (0.0, 0.0, 2.0),
        (-1.0, 1.0, 2.0),
        (1.0, 1.0, 2.0),
        (-1.0, -1.0, 2.0),
    ];
    acc.push(
        "product states of the rewritten operator (eigenvalues 3, 1, 2)",
        eigen_products
            .iter()
            .map(|&(m1, m2, v)| verify_eigenrelation(&swapped, &product_state(one, m1, m2), v).expect("dims")),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut invariance = Vec::with_capacity(cfg.rotations);
    let mut unitarity = Vec::with_capacity(cfg.rotations);
    for _ in 0..cfg.rotations {
        let w = random_rotation_vector(&mut rng);
        let u = rotation_unitary(w, &pair);
        unitarity.push((&u * &u.dagger()).max_abs_diff(&Operator::identity(9)));
        invariance.push(psi.evolve(&u).expect("dims").distance(&psi));
    }
    acc.push("U U^dagger = 1", unitarity);
    acc.push("rotational invariance |U psi - psi|", invariance);

    let mut direct = Vec::new();
    let mut conjugated = Vec::new();
    let mut route_gap = Vec::new();
    let mut operator_gap = Vec::new();
    for _ in 0..cfg.triples {
        let w = random_rotation_vector(&mut rng);
        let u = rotation_unitary(w, &pair);
        let ud = u.dagger();
        let tri = triple_from_rotation(w);
        let ijk = [&tri[0], &tri[1], &tri[2]];
        for parties in ALL_PARTIES {
            let rotated = triple_operator(ijk, parties).expect("rotation keeps orthogonality");
            let r_direct = verify_eigenrelation(&rotated, &psi, 2.0).expect("dims");

            let base = triple_operator(xyz, parties).expect("axes are orthogonal");
            let conj = &(&u * &base) * &ud;
            let r_conj = verify_eigenrelation(&conj, &psi, 2.0).expect("dims");

            direct.push(r_direct);
            conjugated.push(r_conj);
            route_gap.push((r_direct - r_conj).abs());
            operator_gap.push(conj.max_abs_diff(&rotated));
        }
    }
    acc.push("random orthogonal triple, all party labels, eigenvalue 2", direct);
    acc.push("same via U O(x,y,z) U^dagger, eigenvalue 2", conjugated);
    acc.push("direct and conjugation residuals agree", route_gap);
    acc.push("U O(x,y,z) U^dagger = O(i,j,k)", operator_gap);

    SuiteReport { checks: acc.checks }
}
