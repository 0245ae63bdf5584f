use serde::Serialize;
use serde_json::Value;

/// Machine-readable summary of one invocation. Field order is fixed by the
/// struct layout and matches `schema/run_report.schema.json`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Inputs,
    pub outcomes: Outcomes,
    pub metrics: Metrics,
    pub artifacts_written: Vec<String>,
    /// Command-specific payload.
    pub details: Value,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Inputs {
    pub name: Option<String>,
    pub file: Option<String>,
    pub grid: Option<String>,
    pub seed: u64,
    pub tol: f64,
    pub restarts: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Outcomes {
    pub status: String,
    pub validated: bool,
    pub realized: Option<bool>,
    pub self_intersecting: Option<bool>,
    pub augmented: Option<bool>,
    pub feasible: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Metrics {
    pub vertices: Option<usize>,
    pub faces: Option<usize>,
    pub edges: Option<usize>,
    pub genus: Option<u32>,
    pub module_count: Option<usize>,
    pub energy: Option<f64>,
    pub max_edge_deviation: Option<f64>,
    pub max_dihedral: Option<f64>,
    pub restarts_used: Option<usize>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
