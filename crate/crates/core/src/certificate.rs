//! Verdict records for undistortion, with their evidence chain.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Undistorted,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mechanism {
    TwoMeasures,
    TwoRotationPoints,
    TwoFixedPoints,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Undistorted => "Undistorted",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mechanism::TwoMeasures => "TwoMeasures",
            Mechanism::TwoRotationPoints => "TwoRotationPoints",
            Mechanism::TwoFixedPoints => "TwoFixedPoints",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvidenceValue {
    Real(f64),
    Int(i64),
    Text(String),
}

impl fmt::Display for EvidenceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvidenceValue::Real(v) => write!(f, "{v:?}"),
            EvidenceValue::Int(v) => write!(f, "{v}"),
            EvidenceValue::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for EvidenceValue {
    fn from(v: f64) -> Self {
        EvidenceValue::Real(v)
    }
}

impl From<i64> for EvidenceValue {
    fn from(v: i64) -> Self {
        EvidenceValue::Int(v)
    }
}

impl From<usize> for EvidenceValue {
    fn from(v: usize) -> Self {
        EvidenceValue::Int(v as i64)
    }
}

impl From<&str> for EvidenceValue {
    fn from(v: &str) -> Self {
        EvidenceValue::Text(v.into())
    }
}

impl From<String> for EvidenceValue {
    fn from(v: String) -> Self {
        EvidenceValue::Text(v)
    }
}

/// Outcome of an undistortion test.
///
/// `tau_lower_bound` is a lower bound for the translation length in the word
/// metric when `seminorm_constant` holds the generator constant `C`;
/// without it the bound is `C·τ`, i.e. in seminorm units. It is zero for
/// inconclusive verdicts.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub mechanism: Mechanism,
    pub tau_lower_bound: f64,
    pub seminorm_constant: Option<f64>,
    pub evidence: Vec<(String, EvidenceValue)>,
}

impl Certificate {
    pub fn new(mechanism: Mechanism) -> Certificate {
        Certificate {
            verdict: Verdict::Inconclusive,
            mechanism,
            tau_lower_bound: 0.0,
            seminorm_constant: None,
            evidence: Vec::new(),
        }
    }

    pub fn push(&mut self, key: &str, value: impl Into<EvidenceValue>) {
        self.evidence.push((key.to_string(), value.into()));
    }

    pub fn is_undistorted(&self) -> bool {
        self.verdict == Verdict::Undistorted
    }

    pub fn evidence(&self, key: &str) -> Option<&EvidenceValue> {
        self.evidence.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Marks the certificate undistorted from a positive invariant `value`
    /// that is 1-Lipschitz for the seminorm.
    pub(crate) fn conclude(&mut self, value: f64, constant: Option<f64>) {
        self.verdict = Verdict::Undistorted;
        self.seminorm_constant = constant;
        self.tau_lower_bound = match constant {
            Some(c) if c > 0.0 => value / c,
            _ => value,
        };
    }

    /// `tau_lower_bound` expressed in seminorm units (`C·τ`).
    pub fn seminorm_units_bound(&self) -> f64 {
        match self.seminorm_constant {
            Some(c) if c > 0.0 => self.tau_lower_bound * c,
            _ => self.tau_lower_bound,
        }
    }

    /// Flat `prefix.key = value` lines.
    pub fn to_kv_lines(&self, prefix: &str) -> Vec<String> {
        let mut out = vec![
            format!("{prefix}.verdict = {}", self.verdict),
            format!("{prefix}.mechanism = {}", self.mechanism),
            format!("{prefix}.tau_lower_bound = {:?}", self.tau_lower_bound),
            format!(
                "{prefix}.seminorm_constant = {}",
                match self.seminorm_constant {
                    Some(c) => format!("{c:?}"),
                    None => "per-unit".into(),
                }
            ),
        ];
        for (k, v) in &self.evidence {
            out.push(format!("{prefix}.evidence.{k} = {v}"));
        }
        out
    }
}
