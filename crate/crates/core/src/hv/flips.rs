use super::audit::{FlipReport, FlipWitness};
use super::model::{HvModel, LambdaSet, Outcome};
use super::HvError;

/// The λ where the target shows `outcome` alone but `flipped` next to
/// `partner`, which itself shows `partner_outcome`.
#[derive(Clone, Debug)]
pub struct FlipCell {
    pub partner: usize,
    pub flipped: Outcome,
    pub partner_outcome: Outcome,
    pub set: LambdaSet,
    pub measure: f64,
}

#[derive(Clone, Debug)]
pub struct ContextFlips {
    pub target: usize,
    pub outcome: Outcome,
    /// Union of all cells.
    pub report: FlipReport,
    /// One cell per partner, changed outcome and partner outcome.
    pub cells: Vec<FlipCell>,
}

impl ContextFlips {
    pub fn cell(&self, partner: usize, flipped: Outcome, partner_outcome: Outcome) -> Option<&FlipCell> {
        self.cells
            .iter()
            .find(|c| c.partner == partner && c.flipped == flipped && c.partner_outcome == partner_outcome)
    }
}

/// `single(target = outcome) ∩ joint(target = o′, partner = ·)` for every
/// partner on the other side and every `o′ ≠ outcome`, restricted to the
/// positive-weight λ.
pub fn find_context_flips(m: &HvModel, target: &str, outcome: Outcome) -> Result<ContextFlips, HvError> {
    let k = m.setting_index(target)?;
    let ks = m.setting(k);
    if !ks.outcomes.contains(&outcome) {
        return Err(HvError::NotInAlphabet {
            setting: target.to_string(),
            outcome,
        });
    }
    let base = m.single_set(k, outcome).intersection(&m.support());
    let mut cells = Vec::new();
    let mut witnesses = Vec::new();
    for &l in m.side_settings(ks.side.other()) {
        for &flipped in ks.outcomes.iter().filter(|&&o| o != outcome) {
            for &po in &m.setting(l).outcomes {
                let members: Vec<usize> = base
                    .members()
                    .iter()
                    .copied()
                    .filter(|&x| m.joint_component(x, k, l) == flipped && m.joint_component(x, l, k) == po)
                    .collect();
                witnesses.extend(members.iter().map(|&x| FlipWitness {
                    lambda: x,
                    setting: k,
                    partner: l,
                    single: outcome,
                    joint: (flipped, po),
                }));
                let set = LambdaSet::new(
                    members,
                    format!(
                        "single({target}={outcome}) ∩ joint({target}={flipped},{}={po})",
                        m.setting(l).id
                    ),
                );
                cells.push(FlipCell {
                    partner: l,
                    flipped,
                    partner_outcome: po,
                    measure: m.measure(&set),
                    set,
                });
            }
        }
    }
    let sigma = LambdaSet::new(
        cells.iter().flat_map(|c| c.set.members().iter().copied()),
        format!("context flips of {target}={outcome}"),
    );
    Ok(ContextFlips {
        target: k,
        outcome,
        report: FlipReport {
            measure: m.measure(&sigma),
            sigma,
            witnesses,
        },
        cells,
    })
}
