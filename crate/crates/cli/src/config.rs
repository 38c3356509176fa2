use clap::{Args, ValueEnum};
use serde::Serialize;

use phigal_core::phigal::{TableConfig, DEFAULT_WEIL_WINDOW};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Human,
    Json,
}

/// Every numeric policy knob, shared by all subcommands.
#[derive(Clone, Debug, Args, Serialize)]
pub struct CliConfig {
    /// Working 3-adic precision (digits).
    #[arg(long, global = true, default_value_t = 40, value_parser = clap::value_parser!(u32).range(20..=200))]
    pub precision: u32,
    /// Weil-trace condition checked for |n| <= this.
    #[arg(long, global = true, default_value_t = DEFAULT_WEIL_WINDOW, value_parser = clap::value_parser!(i64).range(1..=40))]
    pub weil_window: i64,
    /// Parameters sampled per projective table row.
    #[arg(long = "samples", visible_alias = "sample-budget", global = true, default_value_t = 25,
          value_parser = parse_budget)]
    pub sample_budget: usize,
    #[arg(long = "format", global = true, value_enum, default_value_t = OutputFormat::Human)]
    pub output_format: OutputFormat,
    /// Sampled parameters are n/d with |n| <= this and 1 <= d <= 12.
    #[arg(long, global = true, default_value_t = 60, value_parser = clap::value_parser!(i64).range(1..))]
    pub height_bound: i64,
    /// Seed for parameter sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

fn parse_budget(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < 3 {
        return Err("must be at least 3".into());
    }
    Ok(n)
}

impl CliConfig {
    pub fn table(&self) -> TableConfig {
        TableConfig {
            sample_budget: self.sample_budget,
            weil_window: self.weil_window,
            seed: self.seed,
            height_bound: self.height_bound,
        }
    }

    pub fn json(&self) -> bool {
        self.output_format == OutputFormat::Json
    }
}
