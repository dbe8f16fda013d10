use std::collections::BTreeSet;

use super::ray::Ray3;
use super::KsError;

/// Orthogonality structure of a ray set.
///
/// Rays are stored sorted lexicographically, so the graph (and every index
/// into it) does not depend on the order rays were supplied in.
#[derive(Clone, Debug)]
pub struct OrthoGraph {
    rays: Vec<Ray3>,
    edges: Vec<(usize, usize)>,
    triads: Vec<[usize; 3]>,
    neighbors: Vec<Vec<usize>>,
    triads_of: Vec<Vec<usize>>,
}

impl OrthoGraph {
    /// Builds the graph, rejecting duplicate rays with their input positions.
    pub fn build(rays: Vec<Ray3>) -> Result<OrthoGraph, KsError> {
        let mut indexed: Vec<(usize, Ray3)> = rays.into_iter().enumerate().collect();
        indexed.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        for w in indexed.windows(2) {
            if w[0].1 == w[1].1 {
                return Err(KsError::DuplicateRay(w[0].0, w[1].0));
            }
        }
        let rays: Vec<Ray3> = indexed.into_iter().map(|(_, r)| r).collect();
        let n = rays.len();

        let mut neighbors = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rays[i].is_orthogonal(&rays[j]) {
                    edges.push((i, j));
                    neighbors[i].push(j);
                    neighbors[j].push(i);
                }
            }
        }

        let mut triads = Vec::new();
        for &(i, j) in &edges {
            let ni: BTreeSet<usize> = neighbors[i].iter().copied().filter(|&k| k > j).collect();
            for &k in &neighbors[j] {
                if k > j && ni.contains(&k) {
                    triads.push([i, j, k]);
                }
            }
        }
        triads.sort();

        let mut triads_of = vec![Vec::new(); n];
        for (t, tri) in triads.iter().enumerate() {
            for &v in tri {
                triads_of[v].push(t);
            }
        }

        Ok(OrthoGraph {
            rays,
            edges,
            triads,
            neighbors,
            triads_of,
        })
    }

    pub fn rays(&self) -> &[Ray3] {
        &self.rays
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    /// Orthogonal pairs `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Mutually orthogonal triples, each sorted ascending, list sorted.
    pub fn triads(&self) -> &[[usize; 3]] {
        &self.triads
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    /// Indices into [`triads`](Self::triads) of the triads containing `v`.
    pub fn triads_of(&self, v: usize) -> &[usize] {
        &self.triads_of[v]
    }

    pub fn index_of(&self, ray: &Ray3) -> Option<usize> {
        self.rays.binary_search(ray).ok()
    }

    /// Graph on the rays at `keep` (indices into this graph).
    pub fn subgraph(&self, keep: &[usize]) -> OrthoGraph {
        let rays = keep.iter().map(|&i| self.rays[i].clone()).collect();
        OrthoGraph::build(rays).expect("subset of distinct rays")
    }

    /// Graph with ray `v` removed.
    pub fn without(&self, v: usize) -> OrthoGraph {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| i != v).collect();
        self.subgraph(&keep)
    }
}
