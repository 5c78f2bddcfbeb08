//! JSON documents emitted with `--json`.
//!
//! Every document carries `schema_version` and `command`. Field names are
//! stable within a schema version; see the README for the full listing.

use serde::{Deserialize, Serialize};
use specialsys::classify::{Decomposition, PencilDecomposition};
use specialsys::{CremonaTrace, DivisorClass, RankResult, SecantReport, Terminal};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VdimDoc {
    pub schema_version: u32,
    pub command: String,
    pub system: String,
    pub class: DivisorClass,
    pub vdim: i64,
    pub edim: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdimDoc {
    pub schema_version: u32,
    pub command: String,
    pub system: String,
    pub class: DivisorClass,
    pub vdim: i64,
    pub trials: u32,
    pub seed: u64,
    pub results: Vec<RankResult>,
    /// All primes gave the same `adim`.
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCheck {
    pub adim: i64,
    pub special: bool,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecialDoc {
    pub schema_version: u32,
    pub command: String,
    pub system: String,
    pub class: DivisorClass,
    pub vdim: i64,
    pub edim: i64,
    pub adim: i64,
    pub special: bool,
    pub witness: Option<DivisorClass>,
    pub decomposition: Option<Decomposition>,
    pub pencil: Option<PencilDecomposition>,
    pub verify: Option<OracleCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceDoc {
    pub schema_version: u32,
    pub command: String,
    pub input: DivisorClass,
    pub reduced: DivisorClass,
    pub terminal: Terminal,
    pub trace: CremonaTrace,
    pub peeled: Vec<(DivisorClass, i64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NegCurvesDoc {
    pub schema_version: u32,
    pub command: String,
    pub r: usize,
    pub bound: i64,
    pub count: usize,
    pub classes: Vec<DivisorClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecantDoc {
    pub schema_version: u32,
    pub command: String,
    pub mode: String,
    pub report: SecantReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanDoc {
    pub schema_version: u32,
    pub command: String,
    pub mode: String,
    pub dmax: i64,
    pub kmax: u32,
    pub defective: Vec<SecantReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyDoc {
    pub schema_version: u32,
    pub command: String,
    pub surface: String,
    pub chi: i64,
    pub multiple: i64,
    pub h_squared: i64,
    pub doubles: u32,
    pub vdim: i64,
    pub edim: i64,
    pub adim: i64,
    pub special: bool,
    /// `true` for rule-based verdicts with no independent check.
    pub unverified: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorDoc {
    pub schema_version: u32,
    pub error: String,
}
