use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::brute::brute_force_oracle;
use super::graph::OrthoGraph;
use super::search::{is_valid_assignment, search, SearchMode};
use super::{KsError, ValueRule};

pub const TOOL_VERSION: &str = concat!("ctxkit ", env!("CARGO_PKG_VERSION"));
pub const DIGEST_ALGORITHM: &str = "sha256";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Colorable { witness: Vec<u8> },
    Uncolorable { trace_digest: [u8; 32] },
}

/// How the verdict was reached; verification replays the same procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Search,
    Exhaustive,
}

/// A colorability verdict bound to its input by digest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub rule: ValueRule,
    pub method: Method,
    /// Exact in sequential mode and for exhaustive enumeration.
    pub nodes_explored: u64,
    pub input_digest: [u8; 32],
    /// Set when the graph has no triads, so any all-unmarked valuation works.
    pub vacuous: bool,
}

impl Certificate {
    pub fn is_colorable(&self) -> bool {
        matches!(self.verdict, Verdict::Colorable { .. })
    }

    pub fn witness(&self) -> Option<&[u8]> {
        match &self.verdict {
            Verdict::Colorable { witness } => Some(witness),
            Verdict::Uncolorable { .. } => None,
        }
    }

    pub fn to_json(&self) -> String {
        let doc = CertificateDoc::from(self);
        serde_json::to_string_pretty(&doc).expect("certificate serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Certificate, KsError> {
        let doc: CertificateDoc =
            serde_json::from_str(text).map_err(|e| KsError::BadCertificate(e.to_string()))?;
        doc.try_into()
    }
}

/// SHA-256 over the canonical ray list, one ray per line in graph order.
pub fn input_digest(graph: &OrthoGraph) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"ctxkit-ks-input/v1\n");
    for r in graph.rays() {
        h.update(r.to_string().as_bytes());
        h.update(b"\n");
    }
    h.finalize().into()
}

/// Checks `cert` against `graph`.
///
/// Colorable certificates are checked directly against every triad and
/// orthogonal pair. Uncolorable ones are replayed: the recorded procedure is
/// re-run and its trace digest and node count must match.
pub fn verify_certificate(graph: &OrthoGraph, cert: &Certificate) -> Result<bool, KsError> {
    if input_digest(graph) != cert.input_digest {
        return Err(KsError::DigestMismatch);
    }
    match &cert.verdict {
        Verdict::Colorable { witness } => Ok(is_valid_assignment(graph, cert.rule, witness)),
        Verdict::Uncolorable { .. } => {
            let replay = match cert.method {
                Method::Search => search(graph, cert.rule, SearchMode::Sequential)?,
                Method::Exhaustive => brute_force_oracle(graph, cert.rule)?,
            };
            Ok(replay.verdict == cert.verdict && replay.nodes_explored == cert.nodes_explored)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CertificateDoc {
    verdict: String,
    rule: String,
    method: String,
    witness: Option<Vec<u8>>,
    nodes_explored: u64,
    input_digest: String,
    trace_digest: Option<String>,
    digest_algorithm: String,
    vacuous: bool,
    tool_version: String,
}

impl From<&Certificate> for CertificateDoc {
    fn from(c: &Certificate) -> Self {
        let (verdict, witness, trace) = match &c.verdict {
            Verdict::Colorable { witness } => ("colorable", Some(witness.clone()), None),
            Verdict::Uncolorable { trace_digest } => ("uncolorable", None, Some(hex::encode(trace_digest))),
        };
        CertificateDoc {
            verdict: verdict.into(),
            rule: c.rule.name().into(),
            method: match c.method {
                Method::Search => "search",
                Method::Exhaustive => "exhaustive",
            }
            .into(),
            witness,
            nodes_explored: c.nodes_explored,
            input_digest: hex::encode(c.input_digest),
            trace_digest: trace,
            digest_algorithm: DIGEST_ALGORITHM.into(),
            vacuous: c.vacuous,
            tool_version: TOOL_VERSION.into(),
        }
    }
}

fn decode_digest(s: &str) -> Result<[u8; 32], KsError> {
    let bytes = hex::decode(s).map_err(|e| KsError::BadCertificate(format!("digest: {e}")))?;
    bytes
        .try_into()
        .map_err(|_| KsError::BadCertificate("digest must be 32 bytes".into()))
}

impl TryFrom<CertificateDoc> for Certificate {
    type Error = KsError;

    fn try_from(d: CertificateDoc) -> Result<Self, KsError> {
        if d.digest_algorithm != DIGEST_ALGORITHM {
            return Err(KsError::BadCertificate(format!(
                "unsupported digest algorithm {}",
                d.digest_algorithm
            )));
        }
        let rule = ValueRule::from_name(&d.rule)
            .ok_or_else(|| KsError::BadCertificate(format!("unknown rule {}", d.rule)))?;
        let method = match d.method.as_str() {
            "search" => Method::Search,
            "exhaustive" => Method::Exhaustive,
            m => return Err(KsError::BadCertificate(format!("unknown method {m}"))),
        };
        let verdict = match d.verdict.as_str() {
            "colorable" => Verdict::Colorable {
                witness: d
                    .witness
                    .ok_or_else(|| KsError::BadCertificate("colorable without witness".into()))?,
            },
            "uncolorable" => Verdict::Uncolorable {
                trace_digest: decode_digest(
                    d.trace_digest
                        .as_deref()
                        .ok_or_else(|| KsError::BadCertificate("uncolorable without trace digest".into()))?,
                )?,
            },
            v => return Err(KsError::BadCertificate(format!("unknown verdict {v}"))),
        };
        Ok(Certificate {
            verdict,
            rule,
            method,
            nodes_explored: d.nodes_explored,
            input_digest: decode_digest(&d.input_digest)?,
            vacuous: d.vacuous,
        })
    }
}
