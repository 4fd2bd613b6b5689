//! One record per CLI invocation, rendered either as JSON or as a table.

use std::fmt::Write as _;

use fockmodes_core::entanglement::{rank_bound, schmidt_spectrum, Partition};
use fockmodes_core::fock::PureState;
use fockmodes_core::optimize::{OptConfig, OptResult};
use fockmodes_core::Result as CoreResult;
use serde::Serialize;

use crate::partition_arg::format_partition;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub input: String,
    pub partition: String,
    pub lambdas: Vec<f64>,
    pub entropy_bits: f64,
    pub rank: usize,
    pub rank_bound: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restart_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub wall_ms: f64,
}

impl Report {
    /// Spectrum, rank and rank bound of `state` as given.
    pub fn analyze(input: &str, state: &PureState, partition: &Partition) -> CoreResult<Self> {
        let spectrum = schmidt_spectrum(state, partition)?;
        Ok(Self {
            input: input.to_owned(),
            partition: format_partition(partition),
            lambdas: spectrum.lambdas,
            entropy_bits: spectrum.entropy_bits,
            rank: spectrum.numerical_rank,
            rank_bound: rank_bound(state, partition)?,
            direction: None,
            best: None,
            restart_values: None,
            seed: None,
            wall_ms: 0.0,
        })
    }

    pub fn with_optimization(mut self, cfg: &OptConfig, result: &OptResult) -> Self {
        self.direction = Some(result.direction.as_str().to_owned());
        self.best = Some(result.best_entropy_bits);
        self.restart_values = Some(result.per_restart_values.clone());
        self.seed = Some(cfg.seed);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields serialize")
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let mut row = |key: &str, value: String| {
            let _ = writeln!(out, "{key:<16}{value}");
        };
        row("input", self.input.clone());
        row("partition", self.partition.clone());
        row("lambdas", join(&self.lambdas));
        row("entropy_bits", format!("{:.6}", self.entropy_bits));
        row("rank", self.rank.to_string());
        row("rank_bound", self.rank_bound.to_string());
        if let Some(d) = &self.direction {
            row("direction", d.clone());
        }
        if let Some(b) = self.best {
            row("best", format!("{b:.6}"));
        }
        if let Some(v) = &self.restart_values {
            row("restart_values", join(v));
        }
        if let Some(s) = self.seed {
            row("seed", s.to_string());
        }
        row("wall_ms", format!("{:.1}", self.wall_ms));
        out
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.6}"))
        .collect::<Vec<_>>()
        .join(" ")
}
