//! Propositions about a world, written in prefix notation:
//!
//! ```text
//! (and (performs 1 k) (not (outcome 2 l 1)))
//! ```
//!
//! Atoms are `(performs SIDE SETTING)` and `(outcome SIDE SETTING VALUE)`;
//! connectives are `not`, `and`, `or`; `true` and `false` are constants.

use std::fmt;

use super::{CfError, World};
use crate::hv::{HvModel, Outcome};
use crate::quantum::Party;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Proposition {
    Const(bool),
    Performs { side: Party, setting: usize },
    Outcome { side: Party, setting: usize, value: Outcome },
    Not(Box<Proposition>),
    And(Vec<Proposition>),
    Or(Vec<Proposition>),
}

impl Proposition {
    pub fn performs(m: &HvModel, side: Party, id: &str) -> Result<Proposition, CfError> {
        Ok(Proposition::Performs {
            side,
            setting: on_side(m, side, id)?,
        })
    }

    pub fn outcome(m: &HvModel, side: Party, id: &str, value: Outcome) -> Result<Proposition, CfError> {
        Ok(Proposition::Outcome {
            side,
            setting: on_side(m, side, id)?,
            value,
        })
    }

    pub fn eval(&self, w: &World) -> bool {
        match self {
            Proposition::Const(b) => *b,
            Proposition::Performs { setting, .. } => w.performs(*setting),
            Proposition::Outcome { setting, value, .. } => w.record(*setting) == Some(*value),
            Proposition::Not(p) => !p.eval(w),
            Proposition::And(ps) => ps.iter().all(|p| p.eval(w)),
            Proposition::Or(ps) => ps.iter().any(|p| p.eval(w)),
        }
    }

    /// Prefix rendering with setting ids.
    pub fn render(&self, m: &HvModel) -> String {
        match self {
            Proposition::Const(b) => b.to_string(),
            Proposition::Performs { side, setting } => {
                format!("(performs {} {})", side.index(), m.setting(*setting).id)
            }
            Proposition::Outcome { side, setting, value } => {
                format!("(outcome {} {} {})", side.index(), m.setting(*setting).id, value)
            }
            Proposition::Not(p) => format!("(not {})", p.render(m)),
            Proposition::And(ps) | Proposition::Or(ps) => {
                let op = if matches!(self, Proposition::And(_)) { "and" } else { "or" };
                let parts: Vec<String> = ps.iter().map(|p| p.render(m)).collect();
                format!("({op} {})", parts.join(" "))
            }
        }
    }
}

fn on_side(m: &HvModel, side: Party, id: &str) -> Result<usize, CfError> {
    let s = m.setting_index(id)?;
    if m.setting(s).side != side {
        return Err(CfError::Proposition(format!(
            "setting `{id}` is on side {}, not {}",
            m.setting(s).side.index(),
            side.index()
        )));
    }
    Ok(s)
}

#[derive(Debug, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn tokenize(text: &str) -> Vec<String> {
    text.replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn read_sexp(tokens: &[String], pos: &mut usize) -> Result<Sexp, CfError> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| CfError::Proposition("unexpected end of input".into()))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(read_sexp(tokens, pos)?),
                    None => return Err(CfError::Proposition("missing `)`".into())),
                }
            }
        }
        ")" => Err(CfError::Proposition("unexpected `)`".into())),
        atom => Ok(Sexp::Atom(atom.to_string())),
    }
}

fn side_of(s: &Sexp) -> Result<Party, CfError> {
    match s {
        Sexp::Atom(a) if a == "1" => Ok(Party::First),
        Sexp::Atom(a) if a == "2" => Ok(Party::Second),
        other => Err(CfError::Proposition(format!("side must be 1 or 2, got `{other}`"))),
    }
}

fn atom(s: &Sexp) -> Result<&str, CfError> {
    match s {
        Sexp::Atom(a) => Ok(a),
        other => Err(CfError::Proposition(format!("expected a name, got `{other}`"))),
    }
}

fn build(s: &Sexp, m: &HvModel) -> Result<Proposition, CfError> {
    match s {
        Sexp::Atom(a) if a == "true" => Ok(Proposition::Const(true)),
        Sexp::Atom(a) if a == "false" => Ok(Proposition::Const(false)),
        Sexp::Atom(a) => Err(CfError::Proposition(format!("bare atom `{a}`"))),
        Sexp::List(items) => {
            let (head, args) = items
                .split_first()
                .ok_or_else(|| CfError::Proposition("empty list".into()))?;
            match (atom(head)?, args) {
                ("performs", [side, id]) => Proposition::performs(m, side_of(side)?, atom(id)?),
                ("outcome", [side, id, value]) => {
                    let v: Outcome = atom(value)?
                        .parse()
                        .map_err(|_| CfError::Proposition(format!("bad outcome `{value}`")))?;
                    Proposition::outcome(m, side_of(side)?, atom(id)?, v)
                }
                ("not", [p]) => Ok(Proposition::Not(Box::new(build(p, m)?))),
                ("and", ps) if !ps.is_empty() => Ok(Proposition::And(
                    ps.iter().map(|p| build(p, m)).collect::<Result<_, _>>()?,
                )),
                ("or", ps) if !ps.is_empty() => Ok(Proposition::Or(
                    ps.iter().map(|p| build(p, m)).collect::<Result<_, _>>()?,
                )),
                (op, _) => Err(CfError::Proposition(format!("bad form `{s}` (operator `{op}`)"))),
            }
        }
    }
}

/// Parses a prefix proposition, resolving setting ids against the model.
pub fn parse_proposition(text: &str, m: &HvModel) -> Result<Proposition, CfError> {
    let tokens = tokenize(text);
    let mut pos = 0;
    let sexp = read_sexp(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(CfError::Proposition(format!("trailing input after `{sexp}`")));
    }
    build(&sexp, m)
}
