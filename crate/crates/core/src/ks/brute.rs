//! Exhaustive enumeration, kept independent of the propagating search.

use sha2::{Digest, Sha256};

use super::certificate::{input_digest, Certificate, Method, Verdict};
use super::graph::OrthoGraph;
use super::{KsError, ValueRule};

pub const BRUTE_FORCE_MAX_RAYS: usize = 24;

struct Masks {
    n: usize,
    edges: Vec<u32>,
    triads: Vec<u32>,
}

impl Masks {
    fn new(graph: &OrthoGraph, rule: ValueRule) -> Result<Masks, KsError> {
        rule.validate()?;
        let n = graph.len();
        if n > BRUTE_FORCE_MAX_RAYS {
            return Err(KsError::TooManyRays {
                got: n,
                max: BRUTE_FORCE_MAX_RAYS,
            });
        }
        // Ray 0 is the most significant bit so that counting up visits
        // valuations in lexicographic order.
        let bit = |i: usize| 1u32 << (n - 1 - i);
        Ok(Masks {
            n,
            edges: graph.edges().iter().map(|&(i, j)| bit(i) | bit(j)).collect(),
            triads: graph.triads().iter().map(|t| bit(t[0]) | bit(t[1]) | bit(t[2])).collect(),
        })
    }

    /// `marks` has a bit set for every ray holding the marked value.
    fn valid(&self, marks: u32) -> bool {
        self.edges.iter().all(|&e| (marks & e).count_ones() < 2)
            && self.triads.iter().all(|&t| (marks & t).count_ones() == 1)
    }

    fn values(&self, marks: u32, rule: ValueRule) -> Vec<u8> {
        let marked = rule.marked();
        (0..self.n)
            .map(|i| {
                let is_marked = marks & (1 << (self.n - 1 - i)) != 0;
                if is_marked {
                    marked
                } else {
                    1 - marked
                }
            })
            .collect()
    }

    /// Translate a value word (bit = value 1) into a marked-set word.
    fn marks_of(&self, word: u32, rule: ValueRule) -> u32 {
        let all = if self.n == 32 { u32::MAX } else { (1u32 << self.n) - 1 };
        match rule.marked() {
            1 => word,
            _ => !word & all,
        }
    }
}

/// Enumerates all `2^n` valuations in lexicographic order (0 before 1,
/// lowest ray first) and returns the first valid one, or an uncolorable
/// certificate after the full sweep.
pub fn brute_force_oracle(graph: &OrthoGraph, rule: ValueRule) -> Result<Certificate, KsError> {
    let masks = Masks::new(graph, rule)?;
    let total: u64 = 1 << masks.n;
    let digest = input_digest(graph);
    for word in 0..total {
        let marks = masks.marks_of(word as u32, rule);
        if masks.valid(marks) {
            return Ok(Certificate {
                verdict: Verdict::Colorable {
                    witness: masks.values(marks, rule),
                },
                rule,
                method: Method::Exhaustive,
                nodes_explored: word + 1,
                input_digest: digest,
                vacuous: graph.triads().is_empty(),
            });
        }
    }
    let mut h = Sha256::new();
    h.update(b"ctxkit-ks-exhaustive/v1");
    h.update(digest);
    h.update(rule.name().as_bytes());
    h.update(total.to_le_bytes());
    Ok(Certificate {
        verdict: Verdict::Uncolorable {
            trace_digest: h.finalize().into(),
        },
        rule,
        method: Method::Exhaustive,
        nodes_explored: total,
        input_digest: digest,
        vacuous: false,
    })
}

/// Number of valid valuations.
pub fn count_valid(graph: &OrthoGraph, rule: ValueRule) -> Result<u64, KsError> {
    let masks = Masks::new(graph, rule)?;
    Ok((0..1u64 << masks.n)
        .filter(|&w| masks.valid(masks.marks_of(w as u32, rule)))
        .count() as u64)
}
