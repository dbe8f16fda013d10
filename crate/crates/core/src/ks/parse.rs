//! Line-based ray files.
//!
//! One ray per line, three whitespace-separated coordinates. A coordinate is
//! an integer, a fraction, an `r2` term (`r2`, `-3r2`, `1/2r2`) or a rational
//! followed by a signed `r2` term (`1+r2`, `1/2-3r2`). `#` starts a comment.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::quad::QuadRat;
use super::ray::Ray3;
use super::KsError;

/// A parsed ray together with its 1-based source line.
#[derive(Clone, Debug)]
pub struct RayLine {
    pub line: usize,
    pub ray: Ray3,
}

pub fn parse_rays(text: &str) -> Result<Vec<RayLine>, KsError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(parse_err(
                line,
                format!("expected 3 coordinates, found {}", tokens.len()),
            ));
        }
        let mut coords = Vec::with_capacity(3);
        for tok in tokens {
            coords.push(parse_coord(tok).map_err(|msg| parse_err(line, msg))?);
        }
        let coords: [QuadRat; 3] = coords.try_into().expect("three coordinates");
        let ray = Ray3::canonicalize(coords).map_err(|_| parse_err(line, "zero vector".into()))?;
        out.push(RayLine { line, ray });
    }
    Ok(out)
}

fn parse_err(line: usize, message: String) -> KsError {
    KsError::Parse { line, message }
}

/// Parses a single coordinate token.
pub fn parse_coord(tok: &str) -> Result<QuadRat, String> {
    let Some(rpos) = tok.find('r') else {
        let a = parse_rational(tok).ok_or_else(|| format!("malformed coordinate `{tok}`"))?;
        return Ok(QuadRat::new(a, BigRational::zero()));
    };
    let radicand = &tok[rpos + 1..];
    if radicand != "2" {
        return Err(if !radicand.is_empty() && radicand.bytes().all(|b| b.is_ascii_digit()) {
            "unknown surd".to_string()
        } else {
            format!("malformed coordinate `{tok}`")
        });
    }
    let head = &tok[..rpos];
    let split = head
        .char_indices()
        .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
        .map(|(i, _)| i)
        .next_back();
    let (rat_part, coef_part) = match split {
        Some(i) => (&head[..i], &head[i..]),
        None => ("", head),
    };
    let a = if rat_part.is_empty() {
        BigRational::zero()
    } else {
        parse_rational(rat_part).ok_or_else(|| format!("malformed coordinate `{tok}`"))?
    };
    let b = match coef_part {
        "" | "+" => BigRational::one(),
        "-" => -BigRational::one(),
        s => parse_rational(s).ok_or_else(|| format!("malformed coordinate `{tok}`"))?,
    };
    Ok(QuadRat::new(a, b))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        None => parse_int(s).map(BigRational::from_integer),
        Some((n, d)) => {
            let n = parse_int(n)?;
            if d.starts_with(['+', '-']) {
                return None;
            }
            let d = parse_int(d)?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
    }
}

/// Serializes rays one per line in the same grammar.
pub fn write_rays(rays: &[Ray3]) -> String {
    let mut s = String::new();
    for r in rays {
        s.push_str(&r.to_string());
        s.push('\n');
    }
    s
}
