//! Set algebra over Λ and the locality checks.

use num_rational::BigRational;
use num_traits::Zero;

use super::model::{HvModel, LambdaSet, Outcome};
use super::HvError;
use crate::quantum::Party;

/// One λ whose outcome for `setting` measured alone differs from its
/// outcome when measured together with `partner`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipWitness {
    pub lambda: usize,
    pub setting: usize,
    pub partner: usize,
    pub single: Outcome,
    /// `(outcome of setting, outcome of partner)` in the joint measurement.
    pub joint: (Outcome, Outcome),
}

impl FlipWitness {
    /// Re-reads the responses and confirms the flip.
    pub fn verify(&self, m: &HvModel) -> bool {
        let single = m.single(self.lambda, self.setting);
        let mine = m.joint_component(self.lambda, self.setting, self.partner);
        let theirs = m.joint_component(self.lambda, self.partner, self.setting);
        single == self.single && (mine, theirs) == self.joint && single != mine
    }
}

#[derive(Clone, Debug)]
pub struct FlipReport {
    pub sigma: LambdaSet,
    pub measure: f64,
    pub witnesses: Vec<FlipWitness>,
}

#[derive(Clone, Debug)]
pub struct LReport {
    pub flips: FlipReport,
    /// Measure of the flips seen on side 1 and on side 2 separately.
    pub per_side: [f64; 2],
}

impl LReport {
    pub fn holds(&self) -> bool {
        self.flips.sigma.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ProductCounterexample {
    pub a: usize,
    pub b: usize,
    pub outcome_a: Outcome,
    pub outcome_b: Outcome,
    pub joint_set: LambdaSet,
    pub intersection: LambdaSet,
}

#[derive(Clone, Debug)]
pub struct BellReport {
    /// `(λ, a, b)` where the joint indicator does not factorize.
    pub failures: Vec<(usize, usize, usize)>,
    pub set: LambdaSet,
    pub measure: f64,
}

impl BellReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiViolation {
    pub lambda: usize,
    pub a: usize,
    pub b: usize,
    /// The wing whose marginal moved.
    pub side: Party,
}

#[derive(Clone, Debug)]
pub struct PiReport {
    pub violations: Vec<PiViolation>,
    pub set: LambdaSet,
    pub measure: f64,
    pub per_side: [f64; 2],
}

impl PiReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct OiReport {
    pub violations: Vec<(usize, usize, usize)>,
}

impl OiReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    /// `(λ, a, b)` where factorization ⇔ (PI ∧ OI) fails.
    pub counterexample: Option<(usize, usize, usize)>,
    pub checked: usize,
}

fn ind(b: bool) -> u8 {
    u8::from(b)
}

impl HvModel {
    fn resolve_on(&self, side: Party, id: &str) -> Result<usize, HvError> {
        let s = self.setting_index(id)?;
        let actual = self.setting(s).side;
        if actual != side {
            return Err(HvError::WrongSide {
                setting: id.to_string(),
                expected: side.index(),
                actual: actual.index(),
            });
        }
        Ok(s)
    }

    /// Resolves two ids on opposite sides, returned as (side 1, side 2)
    /// plus whether they were given in reverse.
    fn resolve_pair(&self, x: &str, y: &str) -> Result<(usize, usize, bool), HvError> {
        let i = self.setting_index(x)?;
        let j = self.setting_index(y)?;
        match (self.setting(i).side, self.setting(j).side) {
            (Party::First, Party::Second) => Ok((i, j, false)),
            (Party::Second, Party::First) => Ok((j, i, true)),
            _ => Err(HvError::SameSide(x.to_string(), y.to_string())),
        }
    }

    /// `{λ : single response of setting = outcome}`.
    pub fn lambda_single(&self, side: Party, setting: &str, outcome: Outcome) -> Result<LambdaSet, HvError> {
        let s = self.resolve_on(side, setting)?;
        Ok(self.single_set(s, outcome))
    }

    pub(crate) fn single_set(&self, s: usize, outcome: Outcome) -> LambdaSet {
        LambdaSet::new(
            (0..self.num_lambdas()).filter(|&l| self.single(l, s) == outcome),
            format!("single({}={})", self.setting(s).id, outcome),
        )
    }

    /// `{λ : joint response of (x, y) = (out_x, out_y)}`; the settings may be
    /// given in either side order.
    pub fn lambda_joint(&self, x: &str, y: &str, out_x: Outcome, out_y: Outcome) -> Result<LambdaSet, HvError> {
        let (a, b, swapped) = self.resolve_pair(x, y)?;
        let (oa, ob) = if swapped { (out_y, out_x) } else { (out_x, out_y) };
        Ok(self.joint_set(a, b, oa, ob))
    }

    pub(crate) fn joint_set(&self, a: usize, b: usize, oa: Outcome, ob: Outcome) -> LambdaSet {
        LambdaSet::new(
            (0..self.num_lambdas()).filter(|&l| self.joint(l, a, b) == (oa, ob)),
            format!("joint({}={},{}={})", self.setting(a).id, oa, self.setting(b).id, ob),
        )
    }

    /// The alphabets' level sets partition Λ for every single setting and
    /// every joint context; returns the first context where they do not.
    pub fn check_partition(&self) -> Option<String> {
        let all = self.all_lambdas();
        for s in 0..self.settings().len() {
            let cells: Vec<LambdaSet> = self.setting(s).outcomes.iter().map(|&o| self.single_set(s, o)).collect();
            if !partitions(&cells, &all) {
                return Some(format!("single {}", self.setting(s).id));
            }
        }
        for (a, b) in self.pairs() {
            let mut cells = Vec::new();
            for &oa in &self.setting(a).outcomes {
                for &ob in &self.setting(b).outcomes {
                    cells.push(self.joint_set(a, b, oa, ob));
                }
            }
            if !partitions(&cells, &all) {
                return Some(format!("joint {}|{}", self.setting(a).id, self.setting(b).id));
            }
        }
        None
    }

    /// Every positive-weight λ at which some setting's outcome changes when
    /// the distant partner is also measured.
    pub fn check_assumption_l(&self) -> LReport {
        let mut witnesses = Vec::new();
        let mut sides: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for l in self.support().members().iter().copied() {
            for (a, b) in self.pairs() {
                let (ja, jb) = self.joint(l, a, b);
                for (s, partner, mine, theirs, side) in [(a, b, ja, jb, 0), (b, a, jb, ja, 1)] {
                    let single = self.single(l, s);
                    if single != mine {
                        witnesses.push(FlipWitness {
                            lambda: l,
                            setting: s,
                            partner,
                            single,
                            joint: (mine, theirs),
                        });
                        sides[side].push(l);
                    }
                }
            }
        }
        let sigma = LambdaSet::new(witnesses.iter().map(|w| w.lambda), "assumption-L flips");
        let per_side = sides.map(|v| self.measure(&LambdaSet::new(v, "")));
        LReport {
            flips: FlipReport {
                measure: self.measure(&sigma),
                sigma,
                witnesses,
            },
            per_side,
        }
    }

    /// `joint(a=i, b=j) = single(a=i) ∩ single(b=j)` on the support for all
    /// menu pairs and outcomes.
    pub fn check_product_identity(&self) -> Option<ProductCounterexample> {
        let support = self.support();
        for (a, b) in self.pairs() {
            for &oa in &self.setting(a).outcomes {
                for &ob in &self.setting(b).outcomes {
                    let joint_set = self.joint_set(a, b, oa, ob).intersection(&support);
                    let intersection = self
                        .single_set(a, oa)
                        .intersection(&self.single_set(b, ob))
                        .intersection(&support);
                    if !joint_set.same_members(&intersection) {
                        return Some(ProductCounterexample {
                            a,
                            b,
                            outcome_a: oa,
                            outcome_b: ob,
                            joint_set,
                            intersection,
                        });
                    }
                }
            }
        }
        None
    }

    fn factorizes(&self, l: usize, a: usize, b: usize) -> bool {
        let joint = self.joint(l, a, b);
        let (sa, sb) = (self.single(l, a), self.single(l, b));
        self.setting(a).outcomes.iter().all(|&i| {
            self.setting(b)
                .outcomes
                .iter()
                .all(|&j| ind(joint == (i, j)) == ind(sa == i) * ind(sb == j))
        })
    }

    /// Per positive-weight λ and menu pair, the joint indicator equals the
    /// product of the single indicators.
    pub fn check_bell_factorization(&self) -> BellReport {
        let mut failures = Vec::new();
        for l in self.support().members().iter().copied() {
            for (a, b) in self.pairs() {
                if !self.factorizes(l, a, b) {
                    failures.push((l, a, b));
                }
            }
        }
        let set = LambdaSet::new(failures.iter().map(|f| f.0), "factorization failures");
        BellReport {
            measure: self.measure(&set),
            set,
            failures,
        }
    }

    /// Probability (0 or 1) of `outcome` on `side` when `a` and `b` are both
    /// measured, summed over the other wing's outcomes.
    pub fn marginal_joint(
        &self,
        l: usize,
        a: &str,
        b: &str,
        side: Party,
        outcome: Outcome,
    ) -> Result<u8, HvError> {
        let (a, b, _) = self.resolve_pair(a, b)?;
        Ok(self.marginal(l, a, b, side, outcome))
    }

    fn marginal(&self, l: usize, a: usize, b: usize, side: Party, outcome: Outcome) -> u8 {
        let joint = self.joint(l, a, b);
        match side {
            Party::First => self.setting(b).outcomes.iter().map(|&j| ind(joint == (outcome, j))).sum(),
            Party::Second => self.setting(a).outcomes.iter().map(|&i| ind(joint == (i, outcome))).sum(),
        }
    }

    fn pi_holds_on(&self, l: usize, a: usize, b: usize, side: Party) -> bool {
        let s = match side {
            Party::First => a,
            Party::Second => b,
        };
        let single = self.single(l, s);
        self.setting(s)
            .outcomes
            .iter()
            .all(|&o| self.marginal(l, a, b, side, o) == ind(single == o))
    }

    /// Each wing's joint marginal equals its single-measurement indicator.
    pub fn check_parameter_independence(&self) -> PiReport {
        let mut violations = Vec::new();
        let mut sides: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for l in self.support().members().iter().copied() {
            for (a, b) in self.pairs() {
                for (k, side) in [Party::First, Party::Second].into_iter().enumerate() {
                    if !self.pi_holds_on(l, a, b, side) {
                        violations.push(PiViolation { lambda: l, a, b, side });
                        sides[k].push(l);
                    }
                }
            }
        }
        let set = LambdaSet::new(violations.iter().map(|v| v.lambda), "parameter-independence violations");
        PiReport {
            measure: self.measure(&set),
            per_side: sides.map(|v| self.measure(&LambdaSet::new(v, ""))),
            set,
            violations,
        }
    }

    fn oi_holds(&self, l: usize, a: usize, b: usize) -> bool {
        let joint = self.joint(l, a, b);
        self.setting(a).outcomes.iter().all(|&i| {
            self.setting(b).outcomes.iter().all(|&j| {
                ind(joint == (i, j)) == self.marginal(l, a, b, Party::First, i) * self.marginal(l, a, b, Party::Second, j)
            })
        })
    }

    /// The joint indicator factorizes into its own two marginals.
    pub fn check_outcome_independence(&self) -> OiReport {
        let mut violations = Vec::new();
        for l in self.support().members().iter().copied() {
            for (a, b) in self.pairs() {
                if !self.oi_holds(l, a, b) {
                    violations.push((l, a, b));
                }
            }
        }
        OiReport { violations }
    }

    /// Per λ and pair: factorization holds iff both PI and OI hold.
    pub fn check_decomposition(&self) -> DecompositionReport {
        let mut checked = 0;
        for l in 0..self.num_lambdas() {
            for (a, b) in self.pairs() {
                checked += 1;
                let pi = self.pi_holds_on(l, a, b, Party::First) && self.pi_holds_on(l, a, b, Party::Second);
                if self.factorizes(l, a, b) != (pi && self.oi_holds(l, a, b)) {
                    return DecompositionReport {
                        counterexample: Some((l, a, b)),
                        checked,
                    };
                }
            }
        }
        DecompositionReport {
            counterexample: None,
            checked,
        }
    }

    fn binary_pair(&self, x: &str, y: &str) -> Result<(usize, usize, bool), HvError> {
        let (a, b, swapped) = self.resolve_pair(x, y)?;
        for s in [a, b] {
            if !self.setting(s).is_binary() {
                return Err(HvError::NonBinary(self.setting(s).id.clone()));
            }
        }
        Ok((a, b, swapped))
    }

    /// `E(x, y) = Σ_λ ρ(λ)·(product of the joint outcomes)`.
    pub fn correlation(&self, x: &str, y: &str) -> Result<f64, HvError> {
        let (a, b, _) = self.binary_pair(x, y)?;
        Ok((0..self.num_lambdas())
            .fold(0.0, |acc, l| {
                let (i, j) = self.joint(l, a, b);
                acc + self.weight(l) * f64::from(i * j)
            }))
    }

    /// Exact correlation; `None` when the weights are not rational.
    pub fn correlation_exact(&self, x: &str, y: &str) -> Result<Option<BigRational>, HvError> {
        let (a, b, _) = self.binary_pair(x, y)?;
        if !self.has_exact_weights() {
            return Ok(None);
        }
        let mut e = BigRational::zero();
        for l in 0..self.num_lambdas() {
            let (i, j) = self.joint(l, a, b);
            let w = self.exact_weight(l).expect("exact weights").clone();
            e += w * BigRational::from_integer((i * j).into());
        }
        Ok(Some(e))
    }

    /// `E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′)`.
    pub fn chsh(&self, a: &str, a2: &str, b: &str, b2: &str) -> Result<f64, HvError> {
        Ok(self.correlation(a, b)? + self.correlation(a, b2)? + self.correlation(a2, b)? - self.correlation(a2, b2)?)
    }

    pub fn chsh_exact(&self, a: &str, a2: &str, b: &str, b2: &str) -> Result<Option<BigRational>, HvError> {
        let terms = [
            self.correlation_exact(a, b)?,
            self.correlation_exact(a, b2)?,
            self.correlation_exact(a2, b)?,
            self.correlation_exact(a2, b2)?,
        ];
        match terms {
            [Some(e1), Some(e2), Some(e3), Some(e4)] => Ok(Some(e1 + e2 + e3 - e4)),
            _ => Ok(None),
        }
    }

    /// Largest |CHSH| over every choice of two distinct binary settings per
    /// side; `None` if fewer than two are available on either side.
    pub fn max_abs_chsh(&self) -> Option<f64> {
        let binary = |p: Party| -> Vec<&str> {
            self.side_settings(p)
                .iter()
                .filter(|&&s| self.setting(s).is_binary())
                .map(|&s| self.setting(s).id.as_str())
                .collect()
        };
        let (sa, sb) = (binary(Party::First), binary(Party::Second));
        let mut best: Option<f64> = None;
        for a in &sa {
            for a2 in sa.iter().filter(|x| *x != a) {
                for b in &sb {
                    for b2 in sb.iter().filter(|x| *x != b) {
                        let v = self.chsh(a, a2, b, b2).expect("binary settings").abs();
                        best = Some(best.map_or(v, |m| m.max(v)));
                    }
                }
            }
        }
        best
    }
}

fn partitions(cells: &[LambdaSet], all: &LambdaSet) -> bool {
    let total: usize = cells.iter().map(|c| c.len()).sum();
    let union = cells.iter().fold(LambdaSet::empty(""), |acc, c| acc.union(c));
    total == all.len() && union.same_members(all)
}
