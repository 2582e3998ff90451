use serde::Serialize;

/// Fully resolved description of one CLI run. Every output artifact embeds
/// it (JSON documents as a field, CSV files as a leading comment line), and
/// the run's outcome is a pure function of it.
#[derive(Debug, Clone, Serialize, Default)]
pub struct RunManifest {
    pub command: String,
    pub input: Option<String>,
    pub n: Option<usize>,
    pub theta: Option<f64>,
    pub delta: Option<f64>,
    pub rho: Option<f64>,
    pub d: Option<f64>,
    pub outliers: Option<bool>,
    pub replications: Option<u32>,
    pub alpha: Option<f64>,
    pub tests: Vec<String>,
    pub variance: Option<String>,
    pub rho_source: Option<String>,
    pub block: Option<usize>,
    pub seed: Option<u64>,
    pub max_n: Option<usize>,
    pub table: Option<String>,
    pub format: String,
    pub out: Option<String>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }

    /// Leading comment line for CSV artifacts.
    pub fn csv_comment(&self) -> String {
        format!("# manifest: {}\n", self.to_json())
    }
}
