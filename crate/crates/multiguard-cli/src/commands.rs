//! Subcommand implementations. Each stage reads its input file, does its
//! work, and writes one output file with an embedded provenance comment, so
//! any stage can be re-run from its input alone.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use multiguard::attack::exhaustive_attack;
use multiguard::bounds::ProbabilityBounds;
use multiguard::certifier::{certified_intersection_size, Mode};
use multiguard::evaluation::{aggregate, certify_all, write_metrics_csv};
use multiguard::model::ClassifierSpec;
use multiguard::sampler::{count_frequencies, read_counts_file, write_counts_file, SmoothingConfig};
use thiserror::Error;

use crate::args::{parse_r_grid, CertifyArgs, Cli, Command, EvaluateArgs, SampleArgs, VerifyArgs};
use crate::files::{config_hash, provenance, read_results, write_results};

/// Process exit codes: validation failures (bad config, bad records,
/// domain errors), soundness failures from `verify`, and I/O failures.
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SOUNDNESS: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("soundness failure: {0}")]
    Soundness(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Soundness(_) => EXIT_SOUNDNESS,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<multiguard::Error> for CliError {
    fn from(err: multiguard::Error) -> Self {
        match err {
            multiguard::Error::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sample(args) => run_sample(&args),
        Command::Certify(args) => run_certify(&args),
        Command::Evaluate(args) => run_evaluate(&args),
        Command::Verify(args) => run_verify(&args),
    }
}

pub fn run_sample(args: &SampleArgs) -> Result<(), CliError> {
    let spec = ClassifierSpec::load(&args.classifier)?;
    if spec.inputs.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: no inputs to sample",
            args.classifier.display()
        )));
    }
    if let Some(k_prime) = args.k_prime {
        if k_prime != spec.k_prime {
            return Err(CliError::Validation(format!(
                "--k-prime {} does not match the classifier spec's k_prime {}",
                k_prime, spec.k_prime
            )));
        }
    }
    let classifier = spec.classifier()?;
    let config = SmoothingConfig::<f64> {
        sigma: args.sigma,
        n: args.n,
        alpha: 0.001, // not used when sampling; certify carries its own
        k_prime: spec.k_prime,
        k: 1,
        seed: args.seed,
    };
    config.validate()?;
    let mut instances = Vec::with_capacity(spec.inputs.len());
    for input in &spec.inputs {
        instances.push(count_frequencies(
            &classifier,
            &input.point,
            &config,
            &input.id,
            &input.ground_truth,
        )?);
    }
    let prov = provenance(
        "sample",
        &[
            ("sigma", format!("{}", args.sigma)),
            ("n", format!("{}", args.n)),
            ("k_prime", format!("{}", spec.k_prime)),
            ("seed", format!("{}", args.seed)),
        ],
    );
    write_counts_file(&args.out, &instances, &[prov])?;
    Ok(())
}

pub fn run_certify(args: &CertifyArgs) -> Result<(), CliError> {
    let instances = read_counts_file(&args.counts)?;
    if instances.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: counts file has no records",
            args.counts.display()
        )));
    }
    if let Some(k_prime) = args.k_prime {
        for instance in &instances {
            if instance.k_prime != k_prime {
                return Err(CliError::Validation(format!(
                    "instance {:?} has k' = {}, --k-prime says {}",
                    instance.id, instance.k_prime, k_prime
                )));
            }
        }
    }
    let grid = parse_r_grid(&args.r_grid).map_err(CliError::Validation)?;
    let mode = match args.mode.as_str() {
        "baseline" => Mode::BaselinePerLabel,
        _ if args.no_joint_terms => Mode::MultiGuardNoJoint,
        _ => Mode::MultiGuard,
    };
    let config = SmoothingConfig::<f64> {
        sigma: args.sigma,
        n: instances[0].n,
        alpha: args.alpha,
        k_prime: instances[0].k_prime,
        k: args.k,
        seed: 0,
    };
    config.validate()?;
    let records = certify_all(&instances, &config, &grid, &[mode], args.strict_paper_cp)?;
    let prov = provenance(
        "certify",
        &[
            ("sigma", format!("{}", args.sigma)),
            ("alpha", format!("{}", args.alpha)),
            ("k", format!("{}", args.k)),
            ("r_grid", args.r_grid.clone()),
            ("mode", mode.to_string()),
            ("strict_cp", format!("{}", args.strict_paper_cp)),
        ],
    );
    write_results(&args.out, &records, &[prov])?;
    Ok(())
}

pub fn run_evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let records = read_results(&args.results)?;
    if records.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: results file has no data rows",
            args.results.display()
        )));
    }
    let rows = aggregate(&records)?;
    let prov = provenance("evaluate", &[("rows", format!("{}", records.len()))]);
    let out: PathBuf = match &args.out {
        Some(path) => path.clone(),
        None => PathBuf::from(format!("metrics_{}.csv", config_hash(&prov))),
    };
    write_metrics_csv(&out, &rows, &[prov])?;
    Ok(())
}

pub fn run_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let spec = ClassifierSpec::load(&args.classifier)?;
    if spec.dimension != 1 {
        return Err(CliError::Validation(
            "verify needs a 1-D classifier spec (exact probabilities)".into(),
        ));
    }
    if spec.inputs.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: no inputs to verify",
            args.classifier.display()
        )));
    }
    let classifier = spec.classifier()?;
    let grid = parse_r_grid(&args.r_grid).map_err(CliError::Validation)?;
    let config = SmoothingConfig::<f64> {
        sigma: args.sigma,
        n: 1,
        alpha: 0.5, // unused on the exact-probability path
        k_prime: spec.k_prime,
        k: args.k,
        seed: 0,
    };
    config.validate()?;
    let use_joint = !args.no_joint_terms;

    let prov = provenance(
        "verify",
        &[
            ("sigma", format!("{}", args.sigma)),
            ("k", format!("{}", args.k)),
            ("k_prime", format!("{}", spec.k_prime)),
            ("r_grid", args.r_grid.clone()),
            ("joint_terms", format!("{use_joint}")),
        ],
    );
    let mut out = BufWriter::new(File::create(&args.out)?);
    writeln!(out, "# multiguard-verify v1")?;
    writeln!(out, "# {prov}")?;
    writeln!(out, "id,R,certified_e,worst_intersection,pass")?;

    let mut failures = 0usize;
    for input in &spec.inputs {
        let probs = classifier.exact_label_probabilities(input.point[0], args.sigma)?;
        let bounds = ProbabilityBounds::from_label_probabilities(&probs, &input.ground_truth)?;
        for &radius in &grid {
            let certified =
                certified_intersection_size(&bounds, &input.id, radius, &config, use_joint)?;
            let step = match args.grid_step {
                Some(step) => step,
                None if radius > 0.0 => radius / 200.0,
                None => 0.01,
            };
            let sweep = exhaustive_attack(
                &classifier,
                input.point[0],
                &input.ground_truth,
                &config,
                radius,
                step,
            )?;
            let pass = sweep.worst_intersection >= certified.certified_size;
            if !pass {
                failures += 1;
            }
            writeln!(
                out,
                "{},{:.6},{},{},{}",
                input.id, radius, certified.certified_size, sweep.worst_intersection, pass
            )?;
        }
    }
    out.flush()?;
    if failures > 0 {
        return Err(CliError::Soundness(format!(
            "{failures} (input, radius) cells where the attack beat the certificate; see {}",
            args.out.display()
        )));
    }
    Ok(())
}
