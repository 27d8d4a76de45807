//! JSON shapes for `--json` output. Field order is declaration order and is
//! part of the output contract: serialization is byte-stable across runs.

use serde::Serialize;

#[derive(Serialize)]
pub struct Entry {
    pub vertex: String,
    pub value: String,
}

#[derive(Serialize)]
pub struct ResidueEntry {
    pub vertex: String,
    pub value: u64,
}

#[derive(Serialize)]
pub struct AnalyzeReport {
    pub name: String,
    pub curves: usize,
    pub edges: usize,
    pub boundary: u64,
    pub negative_definite: bool,
    pub minimal: bool,
    pub tree: bool,
    pub coefficients: Vec<Entry>,
    pub index: String,
    pub class: &'static str,
    pub fundamental_cycle: Vec<Entry>,
    pub z_squared: String,
    pub z_dot_k: String,
    pub p_a: String,
    pub rational: Option<bool>,
    pub multiplicity: Option<String>,
}

#[derive(Serialize)]
pub struct CaseEntry {
    pub vertex: String,
    pub case: &'static str,
    pub coefficient: Option<String>,
    pub lower_bound: Option<String>,
    pub multiplicity: Option<u64>,
}

#[derive(Serialize)]
pub struct CoverJson {
    pub name: String,
    pub characteristic: u64,
    pub index: String,
    pub residues: Option<Vec<ResidueEntry>>,
    pub cases: Vec<CaseEntry>,
    pub verdict: &'static str,
    pub provenance: &'static str,
    pub boundary_reduced: bool,
    pub index_after_step: Option<String>,
    pub failing: Vec<String>,
}
