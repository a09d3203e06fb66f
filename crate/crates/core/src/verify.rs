//! Seeded Monte Carlo verification suites.
//!
//! Instance `i` draws from its own stream `instance_rng(seed, i)`, so a
//! report is identical for any worker count and a failure can be replayed
//! from `(seed, i)` alone.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::ensemble::{instance_rng, random_density_any_rank, random_efficient_measurement};
use crate::error::{Error, Result};
use crate::majorize::check_theorem;
use crate::measure::{delta_in, delta_out, EfficientMeasurement};
use crate::qubit::{alpha_cap, delta_in_closed, delta_out_closed, QubitProblem};
use crate::states::{DensityOperator, Functional};

/// Slack shared by every suite.
pub const VERIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Averaged posterior spectra majorize the prior spectrum, by both the
    /// posterior and the `omega_b` routes, which must agree.
    Majorization,
    /// `delta_in >= 0` for `P`, `S` and `Q`, with and without feedback.
    Concavity,
    /// Qubit closed forms against the matrix computation.
    ClosedForm,
    /// `delta_out >= 0` for `P`, `S` and `Q` without feedback.
    NoFeedback,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Majorization,
        Suite::Concavity,
        Suite::ClosedForm,
        Suite::NoFeedback,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Majorization => "majorization",
            Suite::Concavity => "concavity",
            Suite::ClosedForm => "closedform",
            Suite::NoFeedback => "nofeedback",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

/// Parameters of one suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub samples: u64,
    pub seed: u64,
    /// Dimensions cycled through by instance index. Ignored by the
    /// closed-form suite, which is qubit-only.
    pub dims: Vec<usize>,
    /// Worker count; `None` uses the global pool.
    pub threads: Option<usize>,
}

/// Aggregate outcome of a suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub samples: u64,
    pub passed: u64,
    pub failed: u64,
    /// Largest violation seen, or 0 if every instance sat strictly inside.
    pub max_violation: f64,
    pub tolerance: f64,
    pub first_failure: Option<u64>,
    /// Error raised by the first instance that could not be evaluated.
    pub first_error: Option<String>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// Result of evaluating one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceOutcome {
    pub index: u64,
    pub violation: f64,
    pub passed: bool,
    pub error: Option<String>,
}

fn dim_for(dims: &[usize], index: u64) -> usize {
    dims[(index % dims.len() as u64) as usize]
}

fn check_majorization(seed: u64, index: u64, dims: &[usize]) -> Result<(f64, bool)> {
    let mut rng = instance_rng(seed, index);
    let d = dim_for(dims, index);
    let rho = random_density_any_rank(d, &mut rng)?;
    let m = random_efficient_measurement(d, index.is_multiple_of(2), &mut rng)?;
    let c = check_theorem(&rho, &m)?;
    let ok = c.direct_holds() && c.omega_holds() && c.routes_agree();
    Ok((c.direct_gap.max(c.omega_gap).max(0.0), ok))
}

fn worst_negative(
    rho: &DensityOperator,
    m: &EfficientMeasurement,
    f: fn(&DensityOperator, &EfficientMeasurement, Functional) -> Result<f64>,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for func in Functional::CONCAVE {
        worst = worst.max(-f(rho, m, func)?);
    }
    Ok(worst)
}

fn check_concavity(seed: u64, index: u64, dims: &[usize]) -> Result<(f64, bool)> {
    let mut rng = instance_rng(seed, index);
    let d = dim_for(dims, index);
    let rho = random_density_any_rank(d, &mut rng)?;
    let m = random_efficient_measurement(d, index.is_multiple_of(2), &mut rng)?;
    let v = worst_negative(&rho, &m, delta_in)?;
    Ok((v, v <= VERIFY_TOL))
}

fn check_no_feedback(seed: u64, index: u64, dims: &[usize]) -> Result<(f64, bool)> {
    let mut rng = instance_rng(seed, index);
    let d = dim_for(dims, index);
    let rho = random_density_any_rank(d, &mut rng)?;
    let m = random_efficient_measurement(d, false, &mut rng)?;
    let v = worst_negative(&rho, &m, delta_out)?;
    Ok((v, v <= VERIFY_TOL))
}

/// Random qubit problem with every parameter uniform over its range.
pub fn random_qubit_problem<R: Rng + ?Sized>(rng: &mut R) -> Result<QubitProblem> {
    let a = rng.random::<f64>();
    let b = rng.random::<f64>();
    let alpha = rng.random::<f64>() * alpha_cap(b);
    let z = rng.random_range(-1.0..=1.0);
    QubitProblem::new(a, b, alpha, z)
}

/// Largest deviation between the closed forms and the matrix computation.
pub fn closed_form_deviation(p: &QubitProblem) -> Result<f64> {
    let (rho, povm) = p.operators()?;
    let m = EfficientMeasurement::without_feedback(povm);
    let din = delta_in(&rho, &m, Functional::Impurity)?;
    let dout = delta_out(&rho, &m, Functional::Impurity)?;
    let e_in = (delta_in_closed(p)? - din).abs();
    let e_out = (delta_out_closed(p)? - dout).abs();
    Ok(e_in.max(e_out))
}

fn check_closed_form(seed: u64, index: u64) -> Result<(f64, bool)> {
    let mut rng = instance_rng(seed, index);
    let p = random_qubit_problem(&mut rng)?;
    let v = closed_form_deviation(&p)?;
    Ok((v, v <= VERIFY_TOL))
}

/// Evaluates a single instance of a suite.
pub fn run_instance(suite: Suite, seed: u64, index: u64, dims: &[usize]) -> InstanceOutcome {
    let result = match suite {
        Suite::Majorization => check_majorization(seed, index, dims),
        Suite::Concavity => check_concavity(seed, index, dims),
        Suite::ClosedForm => check_closed_form(seed, index),
        Suite::NoFeedback => check_no_feedback(seed, index, dims),
    };
    match result {
        Ok((violation, passed)) => InstanceOutcome {
            index,
            violation,
            passed,
            error: None,
        },
        Err(e) => InstanceOutcome {
            index,
            violation: f64::INFINITY,
            passed: false,
            error: Some(e.to_string()),
        },
    }
}

fn validate(config: &VerifyConfig) -> Result<()> {
    if config.samples == 0 {
        return Err(Error::ParamOutOfRange {
            name: "samples",
            value: 0.0,
            range: ">= 1".into(),
        });
    }
    if config.suite != Suite::ClosedForm {
        if config.dims.is_empty() {
            return Err(Error::DimOutOfRange(0));
        }
        if let Some(&d) = config
            .dims
            .iter()
            .find(|&&d| !(crate::matcore::MIN_DIM..=crate::matcore::MAX_DIM).contains(&d))
        {
            return Err(Error::DimOutOfRange(d));
        }
    }
    Ok(())
}

/// Runs every instance of a suite and aggregates in index order.
pub fn run_suite(config: &VerifyConfig) -> Result<SuiteReport> {
    validate(config)?;
    let go = || -> Vec<InstanceOutcome> {
        (0..config.samples)
            .into_par_iter()
            .map(|i| run_instance(config.suite, config.seed, i, &config.dims))
            .collect()
    };
    let outcomes = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|_| Error::ParamOutOfRange {
                name: "threads",
                value: n as f64,
                range: ">= 1".into(),
            })?
            .install(go),
        None => go(),
    };

    let mut report = SuiteReport {
        suite: config.suite,
        seed: config.seed,
        samples: config.samples,
        passed: 0,
        failed: 0,
        max_violation: 0.0,
        tolerance: VERIFY_TOL,
        first_failure: None,
        first_error: None,
    };
    for o in outcomes {
        report.max_violation = report.max_violation.max(o.violation);
        if o.passed {
            report.passed += 1;
        } else {
            report.failed += 1;
            report.first_failure.get_or_insert(o.index);
            if let Some(e) = o.error {
                report.first_error.get_or_insert(e);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(suite: Suite, samples: u64, threads: Option<usize>) -> VerifyConfig {
        VerifyConfig {
            suite,
            samples,
            seed: 7,
            dims: vec![2, 3, 4],
            threads,
        }
    }

    #[test]
    fn suites_pass_small_runs() {
        for suite in Suite::ALL {
            let r = run_suite(&config(suite, 200, None)).unwrap();
            assert!(r.ok(), "{r:?}");
            assert_eq!(r.passed, 200);
            assert!(r.max_violation <= VERIFY_TOL);
        }
    }

    #[test]
    fn reports_do_not_depend_on_thread_count() {
        let one = run_suite(&config(Suite::Majorization, 100, Some(1))).unwrap();
        let four = run_suite(&config(Suite::Majorization, 100, Some(4))).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn bad_configs_rejected() {
        assert!(run_suite(&config(Suite::Concavity, 0, None)).is_err());
        let mut c = config(Suite::Concavity, 10, None);
        c.dims = vec![9];
        assert_eq!(run_suite(&c), Err(Error::DimOutOfRange(9)));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }
}
