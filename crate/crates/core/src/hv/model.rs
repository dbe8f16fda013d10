use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::HvError;
use crate::quantum::{
    component_along, pauli_along, squared_component, Operator, Party, RealDirection, SpinKind, EXACT_TOL,
};

pub type Outcome = i32;

/// Which spin observable a setting measures along its direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObservableForm {
    /// `σ·n` on a spin-½ particle, outcomes ±1.
    Pauli,
    /// `S·n` on a spin-1 particle, outcomes 1, 0, −1.
    Spin,
    /// `(S·n)²` on a spin-1 particle, outcomes 1, 0.
    Squared,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub form: ObservableForm,
    pub direction: [f64; 3],
}

impl Observable {
    pub fn new(form: ObservableForm, direction: &RealDirection) -> Self {
        Observable {
            form,
            direction: direction.components(),
        }
    }

    pub fn kind(&self) -> SpinKind {
        match self.form {
            ObservableForm::Pauli => SpinKind::Half,
            ObservableForm::Spin | ObservableForm::Squared => SpinKind::One,
        }
    }

    pub fn direction(&self) -> Result<RealDirection, HvError> {
        Ok(RealDirection::new(self.direction)?)
    }

    pub fn operator(&self) -> Result<Operator, HvError> {
        let n = self.direction()?;
        Ok(match self.form {
            ObservableForm::Pauli => pauli_along(&n),
            ObservableForm::Spin => component_along(SpinKind::One, &n),
            ObservableForm::Squared => squared_component(SpinKind::One, &n),
        })
    }

    /// Eigenvalues, descending.
    pub fn alphabet(&self) -> Vec<Outcome> {
        match self.form {
            ObservableForm::Pauli => vec![1, -1],
            ObservableForm::Spin => vec![1, 0, -1],
            ObservableForm::Squared => vec![1, 0],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Setting {
    pub id: String,
    pub side: Party,
    pub observable: Option<Observable>,
    pub outcomes: Vec<Outcome>,
}

impl Setting {
    pub fn with_observable(id: &str, side: Party, observable: Observable) -> Self {
        Setting {
            id: id.to_string(),
            side,
            outcomes: observable.alphabet(),
            observable: Some(observable),
        }
    }

    pub fn abstract_setting(id: &str, side: Party, outcomes: Vec<Outcome>) -> Self {
        Setting {
            id: id.to_string(),
            side,
            observable: None,
            outcomes,
        }
    }

    pub fn is_binary(&self) -> bool {
        let set: BTreeSet<Outcome> = self.outcomes.iter().copied().collect();
        set.iter().all(|o| *o == 1 || *o == -1)
    }
}

/// A subset of Λ, stored as sorted λ indices, tagged with the definition
/// that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaSet {
    members: Vec<usize>,
    pub provenance: String,
}

impl LambdaSet {
    pub fn new(members: impl IntoIterator<Item = usize>, provenance: impl Into<String>) -> Self {
        let set: BTreeSet<usize> = members.into_iter().collect();
        LambdaSet {
            members: set.into_iter().collect(),
            provenance: provenance.into(),
        }
    }

    pub fn empty(provenance: impl Into<String>) -> Self {
        LambdaSet::new([], provenance)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, l: usize) -> bool {
        self.members.binary_search(&l).is_ok()
    }

    pub fn union(&self, other: &LambdaSet) -> LambdaSet {
        LambdaSet::new(
            self.members.iter().chain(&other.members).copied(),
            format!("({}) ∪ ({})", self.provenance, other.provenance),
        )
    }

    pub fn intersection(&self, other: &LambdaSet) -> LambdaSet {
        LambdaSet::new(
            self.members.iter().copied().filter(|l| other.contains(*l)),
            format!("({}) ∩ ({})", self.provenance, other.provenance),
        )
    }

    pub fn difference(&self, other: &LambdaSet) -> LambdaSet {
        LambdaSet::new(
            self.members.iter().copied().filter(|l| !other.contains(*l)),
            format!("({}) \\ ({})", self.provenance, other.provenance),
        )
    }

    pub fn is_subset(&self, other: &LambdaSet) -> bool {
        self.members.iter().all(|l| other.contains(*l))
    }

    /// Same members, regardless of provenance.
    pub fn same_members(&self, other: &LambdaSet) -> bool {
        self.members == other.members
    }
}

/// A validated model. Responses are total over the menu and inside each
/// setting's alphabet; weights are normalized.
#[derive(Clone, Debug)]
pub struct HvModel {
    lambdas: Vec<String>,
    weights: Vec<f64>,
    exact: Option<Vec<BigRational>>,
    settings: Vec<Setting>,
    side_a: Vec<usize>,
    side_b: Vec<usize>,
    /// `single[λ][setting]`
    single: Vec<Vec<Outcome>>,
    /// `joint[λ][pair]`, pair index `pos_a * |B| + pos_b`.
    joint: Vec<Vec<(Outcome, Outcome)>>,
}

impl HvModel {
    /// Assembles a model from tables the caller guarantees to be total and
    /// inside the alphabets (re-validated in debug builds).
    pub(crate) fn from_parts(
        lambdas: Vec<String>,
        weights: Vec<f64>,
        exact: Option<Vec<BigRational>>,
        settings: Vec<Setting>,
        single: Vec<Vec<Outcome>>,
        joint: Vec<Vec<(Outcome, Outcome)>>,
    ) -> HvModel {
        let (side_a, side_b) = split_sides(&settings);
        let m = HvModel {
            lambdas,
            weights,
            exact,
            settings,
            side_a,
            side_b,
            single,
            joint,
        };
        if cfg!(debug_assertions) && m.num_lambdas() <= 10_000 {
            let defects = validate(&m.to_doc());
            assert!(defects.is_empty(), "internal model construction produced defects: {defects:?}");
        }
        m
    }

    pub fn from_doc(doc: &ModelFile) -> Result<HvModel, HvError> {
        let defects = validate(doc);
        if !defects.is_empty() {
            return Err(HvError::Invalid(defects));
        }
        let settings: Vec<Setting> = doc
            .settings
            .iter()
            .map(|s| s.resolve().expect("validated"))
            .collect();
        let (side_a, side_b) = split_sides(&settings);
        let parsed: Vec<ParsedWeight> = doc.weights.iter().map(|w| w.parse().expect("validated")).collect();
        let exact = parsed
            .iter()
            .map(|w| match w {
                ParsedWeight::Exact(r) => Some(r.clone()),
                ParsedWeight::Float(_) => None,
            })
            .collect::<Option<Vec<_>>>();
        let weights = parsed.iter().map(ParsedWeight::as_f64).collect();

        let single = doc
            .lambdas
            .iter()
            .map(|l| settings.iter().map(|s| doc.single[&single_key(l, &s.id)]).collect())
            .collect();
        let joint = doc
            .lambdas
            .iter()
            .map(|l| {
                let mut row = Vec::with_capacity(side_a.len() * side_b.len());
                for &a in &side_a {
                    for &b in &side_b {
                        let [x, y] = doc.joint[&joint_key(l, &settings[a].id, &settings[b].id)];
                        row.push((x, y));
                    }
                }
                row
            })
            .collect();
        Ok(HvModel {
            lambdas: doc.lambdas.clone(),
            weights,
            exact,
            settings,
            side_a,
            side_b,
            single,
            joint,
        })
    }

    pub fn from_json(text: &str) -> Result<HvModel, HvError> {
        let doc: ModelFile = serde_json::from_str(text).map_err(|e| HvError::Json(e.to_string()))?;
        HvModel::from_doc(&doc)
    }

    pub fn to_doc(&self) -> ModelFile {
        let weights = match &self.exact {
            Some(ex) => ex.iter().map(|r| WeightDoc::Text(r.to_string())).collect(),
            None => self.weights.iter().map(|w| WeightDoc::Number(*w)).collect(),
        };
        let mut single = BTreeMap::new();
        let mut joint = BTreeMap::new();
        for (l, label) in self.lambdas.iter().enumerate() {
            for (s, set) in self.settings.iter().enumerate() {
                single.insert(single_key(label, &set.id), self.single[l][s]);
            }
            for (a, b) in self.pairs() {
                let (x, y) = self.joint(l, a, b);
                joint.insert(joint_key(label, &self.settings[a].id, &self.settings[b].id), [x, y]);
            }
        }
        ModelFile {
            lambdas: self.lambdas.clone(),
            weights,
            settings: self.settings.iter().map(SettingDoc::from).collect(),
            single,
            joint,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_doc()).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn num_lambdas(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambda_label(&self, l: usize) -> &str {
        &self.lambdas[l]
    }

    pub fn labels(&self, set: &LambdaSet) -> Vec<String> {
        set.members().iter().map(|&l| self.lambdas[l].clone()).collect()
    }

    pub fn weight(&self, l: usize) -> f64 {
        self.weights[l]
    }

    pub fn exact_weight(&self, l: usize) -> Option<&BigRational> {
        self.exact.as_ref().map(|e| &e[l])
    }

    pub fn has_exact_weights(&self) -> bool {
        self.exact.is_some()
    }

    pub fn is_positive(&self, l: usize) -> bool {
        match &self.exact {
            Some(e) => e[l].is_positive(),
            None => self.weights[l] > 0.0,
        }
    }

    /// The positive-weight λ.
    pub fn support(&self) -> LambdaSet {
        LambdaSet::new((0..self.num_lambdas()).filter(|&l| self.is_positive(l)), "support")
    }

    pub fn all_lambdas(&self) -> LambdaSet {
        LambdaSet::new(0..self.num_lambdas(), "Λ")
    }

    pub fn measure(&self, set: &LambdaSet) -> f64 {
        set.members().iter().fold(0.0, |acc, &l| acc + self.weights[l])
    }

    /// Exact measure when every weight is rational.
    pub fn measure_exact(&self, set: &LambdaSet) -> Option<BigRational> {
        let e = self.exact.as_ref()?;
        Some(set.members().iter().fold(BigRational::zero(), |acc, &l| acc + &e[l]))
    }

    pub fn settings(&self) -> &[Setting] {
        &self.settings
    }

    pub fn setting(&self, s: usize) -> &Setting {
        &self.settings[s]
    }

    pub fn setting_index(&self, id: &str) -> Result<usize, HvError> {
        self.settings
            .iter()
            .position(|s| s.id == id)
            .ok_or_else(|| HvError::UnknownSetting(id.to_string()))
    }

    /// Setting indices on one side, in declaration order.
    pub fn side_settings(&self, side: Party) -> &[usize] {
        match side {
            Party::First => &self.side_a,
            Party::Second => &self.side_b,
        }
    }

    /// Every cross-side pair `(a, b)` with `a` on side 1, `b` on side 2.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.side_a
            .iter()
            .flat_map(move |&a| self.side_b.iter().map(move |&b| (a, b)))
    }

    fn pair_index(&self, a: usize, b: usize) -> usize {
        let pa = self.side_a.iter().position(|&x| x == a).expect("side-1 setting");
        let pb = self.side_b.iter().position(|&x| x == b).expect("side-2 setting");
        pa * self.side_b.len() + pb
    }

    pub fn single(&self, l: usize, s: usize) -> Outcome {
        self.single[l][s]
    }

    /// Outcome pair of `a` (side 1) and `b` (side 2) measured together.
    pub fn joint(&self, l: usize, a: usize, b: usize) -> (Outcome, Outcome) {
        self.joint[l][self.pair_index(a, b)]
    }

    /// Outcome of `s` when it is measured together with `partner`.
    pub fn joint_component(&self, l: usize, s: usize, partner: usize) -> Outcome {
        match self.settings[s].side {
            Party::First => self.joint(l, s, partner).0,
            Party::Second => self.joint(l, partner, s).1,
        }
    }
}

fn split_sides(settings: &[Setting]) -> (Vec<usize>, Vec<usize>) {
    let pick = |p: Party| {
        settings
            .iter()
            .enumerate()
            .filter(|(_, s)| s.side == p)
            .map(|(i, _)| i)
            .collect()
    };
    (pick(Party::First), pick(Party::Second))
}

fn single_key(lambda: &str, s: &str) -> String {
    format!("{lambda}|{s}")
}

fn joint_key(lambda: &str, a: &str, b: &str) -> String {
    format!("{lambda}|{a}|{b}")
}

/// The on-disk model document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub lambdas: Vec<String>,
    pub weights: Vec<WeightDoc>,
    pub settings: Vec<SettingDoc>,
    /// `"λ|setting" → outcome`
    pub single: BTreeMap<String, Outcome>,
    /// `"λ|setting1|setting2" → [outcome1, outcome2]`
    pub joint: BTreeMap<String, [Outcome; 2]>,
}

/// A weight is either a rational string such as `"1/3"` or a number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightDoc {
    Text(String),
    Number(f64),
}

enum ParsedWeight {
    Exact(BigRational),
    Float(f64),
}

impl ParsedWeight {
    fn as_f64(&self) -> f64 {
        match self {
            ParsedWeight::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            ParsedWeight::Float(x) => *x,
        }
    }
}

impl WeightDoc {
    fn parse(&self) -> Result<ParsedWeight, String> {
        match self {
            WeightDoc::Text(t) => BigRational::from_str(t.trim())
                .map(ParsedWeight::Exact)
                .map_err(|_| format!("`{t}` is not a rational p/q")),
            WeightDoc::Number(x) if x.is_finite() => Ok(ParsedWeight::Float(*x)),
            WeightDoc::Number(x) => Err(format!("{x} is not finite")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingDoc {
    pub id: String,
    pub side: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<Observable>,
    /// Defaults to the observable's eigenvalues.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<Outcome>>,
}

impl SettingDoc {
    fn resolve(&self) -> Result<Setting, String> {
        let side = Party::from_index(self.side).map_err(|e| e.to_string())?;
        let outcomes = match (&self.outcomes, &self.observable) {
            (Some(o), _) => o.clone(),
            (None, Some(obs)) => obs.alphabet(),
            (None, None) => return Err("needs `outcomes` or an `observable`".into()),
        };
        if outcomes.is_empty() {
            return Err("empty outcome alphabet".into());
        }
        if outcomes.iter().collect::<HashSet<_>>().len() != outcomes.len() {
            return Err("repeated outcome in alphabet".into());
        }
        if let Some(obs) = &self.observable {
            obs.direction().map_err(|e| e.to_string())?;
        }
        Ok(Setting {
            id: self.id.clone(),
            side,
            observable: self.observable.clone(),
            outcomes,
        })
    }
}

impl From<&Setting> for SettingDoc {
    fn from(s: &Setting) -> Self {
        let implied = s.observable.as_ref().map(|o| o.alphabet());
        SettingDoc {
            id: s.id.clone(),
            side: s.side.index(),
            observable: s.observable.clone(),
            outcomes: if implied.as_ref() == Some(&s.outcomes) {
                None
            } else {
                Some(s.outcomes.clone())
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DefectKind {
    Normalization,
    Totality,
    Alphabet,
    Weight,
    Label,
    Setting,
    Key,
}

impl DefectKind {
    pub fn name(self) -> &'static str {
        match self {
            DefectKind::Normalization => "normalization",
            DefectKind::Totality => "totality",
            DefectKind::Alphabet => "alphabet",
            DefectKind::Weight => "weight",
            DefectKind::Label => "label",
            DefectKind::Setting => "setting",
            DefectKind::Key => "key",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Defect {
    pub kind: DefectKind,
    pub message: String,
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.name(), self.message)
    }
}

/// Every structural problem of a model document; empty means valid.
pub fn validate(doc: &ModelFile) -> Vec<Defect> {
    let mut out = Vec::new();
    let mut defect = |kind, message: String| out.push(Defect { kind, message });

    if doc.lambdas.is_empty() {
        defect(DefectKind::Label, "no hidden states".into());
    }
    let mut seen = HashSet::new();
    for l in &doc.lambdas {
        if l.contains('|') {
            defect(DefectKind::Label, format!("label `{l}` contains `|`"));
        }
        if !seen.insert(l) {
            defect(DefectKind::Label, format!("duplicate label `{l}`"));
        }
    }

    let mut settings = Vec::new();
    let mut ids = HashSet::new();
    for s in &doc.settings {
        if s.id.contains('|') || s.id.is_empty() {
            defect(DefectKind::Setting, format!("bad setting id `{}`", s.id));
        }
        if !ids.insert(&s.id) {
            defect(DefectKind::Setting, format!("duplicate setting id `{}`", s.id));
        }
        match s.resolve() {
            Ok(r) => settings.push(r),
            Err(e) => defect(DefectKind::Setting, format!("`{}`: {e}", s.id)),
        }
    }

    if doc.weights.len() != doc.lambdas.len() {
        defect(
            DefectKind::Totality,
            format!("{} weights for {} hidden states", doc.weights.len(), doc.lambdas.len()),
        );
    }
    let mut exact_sum = Some(BigRational::zero());
    let mut float_sum = 0.0;
    for (i, w) in doc.weights.iter().enumerate() {
        match w.parse() {
            Ok(p) => {
                let x = p.as_f64();
                let negative = match &p {
                    ParsedWeight::Exact(r) => r.is_negative(),
                    ParsedWeight::Float(x) => *x < 0.0,
                };
                if negative {
                    defect(DefectKind::Weight, format!("weight {i} is negative"));
                }
                float_sum += x;
                exact_sum = match (exact_sum, p) {
                    (Some(acc), ParsedWeight::Exact(r)) => Some(acc + r),
                    _ => None,
                };
            }
            Err(e) => {
                defect(DefectKind::Weight, format!("weight {i}: {e}"));
                exact_sum = None;
            }
        }
    }
    let normalized = match &exact_sum {
        Some(s) => s.is_one(),
        None => (float_sum - 1.0).abs() <= EXACT_TOL,
    };
    if !normalized {
        defect(DefectKind::Normalization, format!("weights sum to {float_sum}"));
    }

    let mut single_expected = HashSet::new();
    let mut joint_expected = HashSet::new();
    for l in &doc.lambdas {
        for s in &settings {
            let key = single_key(l, &s.id);
            match doc.single.get(&key) {
                None => defect(DefectKind::Totality, format!("missing single response `{key}`")),
                Some(o) if !s.outcomes.contains(o) => {
                    defect(DefectKind::Alphabet, format!("`{key}` = {o} outside the alphabet"))
                }
                _ => {}
            }
            single_expected.insert(key);
        }
        for a in settings.iter().filter(|s| s.side == Party::First) {
            for b in settings.iter().filter(|s| s.side == Party::Second) {
                let key = joint_key(l, &a.id, &b.id);
                match doc.joint.get(&key) {
                    None => defect(DefectKind::Totality, format!("missing joint response `{key}`")),
                    Some([x, y]) if !a.outcomes.contains(x) || !b.outcomes.contains(y) => {
                        defect(DefectKind::Alphabet, format!("`{key}` = [{x}, {y}] outside the alphabets"))
                    }
                    _ => {}
                }
                joint_expected.insert(key);
            }
        }
    }
    for k in doc.single.keys().filter(|k| !single_expected.contains(*k)) {
        defect(DefectKind::Key, format!("unexpected single response `{k}`"));
    }
    for k in doc.joint.keys().filter(|k| !joint_expected.contains(*k)) {
        defect(DefectKind::Key, format!("unexpected joint response `{k}`"));
    }
    out
}
