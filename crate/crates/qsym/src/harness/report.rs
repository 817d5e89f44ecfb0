use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of all trials of one identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub id: String,
    pub trials: u32,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    /// Parameters of the worst trial as full-precision decimal strings.
    pub worst_params: BTreeMap<String, String>,
    pub pass: bool,
    pub precision_digits: u32,
    pub seed: u64,
    pub regime: String,
    pub wall_time_ms: u64,
    /// Present only when a trial could not be evaluated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Top-level JSON document written by `qsym verify --format json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub precision: u32,
    pub seed: u64,
    pub regime: String,
    pub results: Vec<IdentityReport>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn get(&self, id: &str) -> Option<&IdentityReport> {
        self.results.iter().find(|r| r.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports contain only plain data");
        s.push('\n');
        s
    }

    /// One line per identity.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "precision {} digits, seed {}, regime {}\n",
            self.precision, self.seed, self.regime
        );
        for r in &self.results {
            out.push_str(&format!(
                "{:<4} {:<12} trials {:>3}  max rel {:>10.3e}  max abs {:>10.3e}  {} ms",
                if r.pass { "PASS" } else { "FAIL" },
                r.id,
                r.trials,
                r.max_rel_residual,
                r.max_abs_residual,
                r.wall_time_ms
            ));
            if let Some(e) = &r.error {
                out.push_str(&format!("  ({e})"));
            }
            out.push('\n');
        }
        let failed = self.results.iter().filter(|r| !r.pass).count();
        out.push_str(&format!("{} identities, {} failed\n", self.results.len(), failed));
        out
    }
}
