use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "multiguard",
    version,
    about = "Certified robustness for smoothed multi-label classifiers",
    long_about = "Pipeline: `sample` draws noisy copies of each input and writes label \
                  frequencies, `certify` turns counts into certified intersection sizes per \
                  radius, `evaluate` aggregates certified top-k precision/recall/f1 curves, \
                  and `verify` cross-checks certificates against an exhaustive perturbation \
                  sweep on the synthetic classifier."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample noisy inputs and write a counts file.
    Sample(SampleArgs),
    /// Certify intersection sizes from a counts file over a radius grid.
    Certify(CertifyArgs),
    /// Aggregate certified results into metric curves.
    Evaluate(EvaluateArgs),
    /// Soundness check: certificates vs an exhaustive perturbation sweep.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Clone)]
pub struct SampleArgs {
    /// Classifier spec (JSON) with the evaluation inputs.
    #[arg(long, value_name = "PATH")]
    pub classifier: PathBuf,
    /// Output counts file.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Noise standard deviation.
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    /// Noisy samples per input.
    #[arg(long, default_value_t = 1000)]
    pub n: u64,
    /// Labels predicted by the base classifier; defaults to the spec's value
    /// and must match it when given.
    #[arg(long = "k-prime", value_name = "K_PRIME")]
    pub k_prime: Option<usize>,
    /// Root seed for the reproducible noise streams.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args, Clone)]
pub struct CertifyArgs {
    /// Input counts file.
    #[arg(long, value_name = "PATH")]
    pub counts: PathBuf,
    /// Output results file (CSV).
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Noise standard deviation used when sampling.
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    /// One minus the overall confidence of the certificates.
    #[arg(long, default_value_t = 0.001)]
    pub alpha: f64,
    /// Labels predicted by the smoothed classifier.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Cross-check: every instance in the counts file must use this k'.
    #[arg(long = "k-prime", value_name = "K_PRIME")]
    pub k_prime: Option<usize>,
    /// Radius grid as start:stop:step.
    #[arg(long = "r-grid", default_value = "0:2:0.05", value_name = "START:STOP:STEP")]
    pub r_grid: String,
    /// Certification rule.
    #[arg(long, default_value = "multiguard", value_parser = ["multiguard", "baseline"])]
    pub mode: String,
    /// Drop the joint (grouped-label) terms from the condition (ablation).
    #[arg(long = "no-joint-terms")]
    pub no_joint_terms: bool,
    /// Use the shifted-shape upper endpoint Beta(1-a/c; n_j, n-n_j+1)
    /// instead of the standard Clopper-Pearson upper endpoint.
    #[arg(long = "strict-paper-cp")]
    pub strict_paper_cp: bool,
}

#[derive(Debug, Args, Clone)]
pub struct EvaluateArgs {
    /// Input results file from `certify`.
    #[arg(long, value_name = "PATH")]
    pub results: PathBuf,
    /// Output metrics file; defaults to metrics_<config-hash>.csv.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct VerifyArgs {
    /// Classifier spec (JSON, 1-D) with the evaluation inputs.
    #[arg(long, value_name = "PATH")]
    pub classifier: PathBuf,
    /// Output report file (CSV).
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Noise standard deviation.
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    /// Labels predicted by the smoothed classifier.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Radius grid as start:stop:step.
    #[arg(long = "r-grid", default_value = "0:2:0.05", value_name = "START:STOP:STEP")]
    pub r_grid: String,
    /// Drop the joint terms when certifying (ablation).
    #[arg(long = "no-joint-terms")]
    pub no_joint_terms: bool,
    /// Perturbation grid step for the sweep; defaults to R/200 per radius.
    #[arg(long = "grid-step", value_name = "STEP")]
    pub grid_step: Option<f64>,
}

/// Parse a start:stop:step grid specification.
pub fn parse_r_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid spec {spec:?} is not start:stop:step"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    multiguard::evaluation::r_grid(nums[0], nums[1], nums[2]).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_parses() {
        let g = parse_r_grid("0:2:0.05").unwrap();
        assert_eq!(g.len(), 41);
        assert!(parse_r_grid("0:2").is_err());
        assert!(parse_r_grid("0:2:x").is_err());
        assert!(parse_r_grid("1:0:0.1").is_err());
    }

    #[test]
    fn cli_parses_the_documented_flags() {
        use clap::Parser;
        let cli = Cli::parse_from([
            "multiguard",
            "certify",
            "--counts",
            "c.txt",
            "--out",
            "r.csv",
            "--sigma",
            "0.25",
            "--alpha",
            "0.01",
            "--k",
            "2",
            "--r-grid",
            "0:1:0.1",
            "--mode",
            "baseline",
            "--no-joint-terms",
            "--strict-paper-cp",
        ]);
        match cli.command {
            Command::Certify(args) => {
                assert_eq!(args.sigma, 0.25);
                assert_eq!(args.mode, "baseline");
                assert!(args.no_joint_terms);
                assert!(args.strict_paper_cp);
            }
            _ => panic!("wrong subcommand"),
        }
    }
}
