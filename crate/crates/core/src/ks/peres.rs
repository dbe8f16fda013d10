use std::collections::BTreeSet;

use super::quad::QuadRat;
use super::ray::Ray3;

/// The frozen 33-ray list, one canonical ray per line.
pub const PERES33_DATA: &str = include_str!("../../data/peres33.rays");

/// Peres's 33 directions: every permutation and sign choice of
/// `(0,0,1)`, `(0,1,1)`, `(0,1,√2)` and `(1,1,√2)`, taken up to
/// projective equivalence. Returned sorted.
pub fn peres33() -> Vec<Ray3> {
    let s = QuadRat::sqrt2();
    let one = QuadRat::one();
    let zero = QuadRat::zero();
    let patterns = [
        [zero.clone(), zero.clone(), one.clone()],
        [zero.clone(), one.clone(), one.clone()],
        [zero.clone(), one.clone(), s.clone()],
        [one.clone(), one.clone(), s.clone()],
    ];
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

    let mut set = BTreeSet::new();
    for pat in &patterns {
        for perm in PERMS {
            for signs in 0u8..8 {
                let coords: [QuadRat; 3] = std::array::from_fn(|i| {
                    let c = pat[perm[i]].clone();
                    if signs & (1 << i) != 0 {
                        -c
                    } else {
                        c
                    }
                });
                set.insert(Ray3::canonicalize(coords).expect("patterns are nonzero"));
            }
        }
    }
    assert_eq!(set.len(), 33, "Peres construction must yield 33 rays");
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ks::parse_rays;
    use num_traits::Zero;

    #[test]
    fn count_and_membership() {
        let rays = peres33();
        assert_eq!(rays.len(), 33);
        assert!(rays.contains(&Ray3::from_ints(0, 0, 1).unwrap()));
        assert!(rays.contains(&Ray3::from_ints(1, 1, 0).unwrap()));
    }

    #[test]
    fn class_sizes() {
        let rays = peres33();
        let mut zeros = [0usize; 3];
        let mut with_surd = 0;
        for r in &rays {
            zeros[r.coords().iter().filter(|c| c.is_zero()).count()] += 1;
            if r.coords().iter().any(|c| !c.surd().is_zero()) {
                with_surd += 1;
            }
        }
        // (√2,1,1) class, the two one-zero classes, the axes
        assert_eq!(zeros, [12, 18, 3]);
        assert_eq!(with_surd, 24);
    }

    #[test]
    fn frozen_file_matches_recipe() {
        let frozen: Vec<Ray3> = parse_rays(PERES33_DATA)
            .unwrap()
            .into_iter()
            .map(|r| r.ray)
            .collect();
        assert_eq!(frozen, peres33());
    }

}
