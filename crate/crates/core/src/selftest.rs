//! Seeded property suites shared by the `selftest` subcommand and the acceptance tests.
//!
//! Every check draws from its own ChaCha stream derived from the run seed and the
//! check name, so filtering suites never changes the numbers a check produces.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::{t_hessian, MvFunction, QuadraticForm, CIRC_TOL};
use crate::csdp::{SolveStatus, SolverOptions};
use crate::polyopt::{
    integer_quartic_oracle, integer_quartic_relaxation, min_spectral_norm, nuclear_norm_oracle,
    nuclear_norm_tsdp, spectral_norm_oracle,
};
use crate::spectral::{
    block_symmetric_tensor, is_t_psd, min_eigen_direction, t_eig, t_eigenvalues, t_root,
    t_schur_complement, PsdTolerance,
};
use crate::tcore::{
    bcirc, fourier_blocks, identity, inner, inverse_fourier_blocks, tprod, Tensor3,
};
use crate::tsdp::{solve_tsdp, synthetic_problem};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 20240607;
pub const DEFAULT_TRIALS: usize = 200;
/// Names accepted by `--filter`, in execution order.
pub const SUITES: &[&str] = &["tcore", "spectral", "calculus", "tsdp", "polyopt"];

#[derive(Debug, Clone, Copy)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Trials per algebraic property; solver-backed checks use their own fixed counts.
    pub trials: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            trials: DEFAULT_TRIALS,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Largest normalized error seen, where the check has one.
    pub worst: f64,
    /// Failures tolerated before the check itself fails.
    pub allowed_failures: usize,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures <= self.allowed_failures
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs every suite whose name contains `filter`.
pub fn run(filter: Option<&str>, cfg: SelftestConfig) -> Result<Vec<SuiteReport>> {
    let selected: Vec<&str> = SUITES
        .iter()
        .copied()
        .filter(|s| filter.is_none_or(|f| s.contains(f)))
        .collect();
    if selected.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no suite matches {:?}; available: {}",
            filter.unwrap_or_default(),
            SUITES.join(", ")
        )));
    }
    selected.into_iter().map(|s| run_suite(s, cfg)).collect()
}

pub fn run_suite(name: &str, cfg: SelftestConfig) -> Result<SuiteReport> {
    let checks = match name {
        "tcore" => tcore_suite(cfg)?,
        "spectral" => spectral_suite(cfg)?,
        "calculus" => calculus_suite(cfg)?,
        "tsdp" => tsdp_suite(cfg)?,
        "polyopt" => polyopt_suite(cfg)?,
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown suite {other:?}; available: {}",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        checks,
    })
}

fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    // FNV-1a keeps the per-check seed stable across platforms and releases.
    let mut h: u64 = 0xcbf29ce484222325;
    for byte in name.bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

/// Runs `trial` `trials` times; each call returns a normalized error, failing above 1.
fn property(
    name: &str,
    trials: usize,
    seed: u64,
    mut trial: impl FnMut(&mut ChaCha8Rng) -> Result<f64>,
) -> Result<CheckResult> {
    let mut rng = stream(seed, name);
    let mut failures = 0;
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let err = trial(&mut rng)?;
        if err.is_nan() || err > 1.0 {
            failures += 1;
        }
        worst = worst.max(if err.is_nan() { f64::INFINITY } else { err });
    }
    Ok(CheckResult {
        name: name.to_string(),
        trials,
        failures,
        worst,
        allowed_failures: 0,
    })
}

fn dim(rng: &mut ChaCha8Rng) -> usize {
    rng.random_range(1..=5)
}

fn rel(diff: f64, scale: f64, tol: f64) -> f64 {
    diff / (tol * (1.0 + scale))
}

/// Symmetric `n × n × p` tensor whose smallest T-eigenvalue is exactly `target`.
fn with_min_eigenvalue(n: usize, p: usize, target: f64, rng: &mut ChaCha8Rng) -> Result<Tensor3> {
    let a = Tensor3::random_symmetric(n, p, rng);
    let lo = *t_eigenvalues(&a)?.last().expect("non-empty spectrum");
    Ok(&a + &identity(n, p).scaled(target - lo))
}

fn signed_margin(rng: &mut ChaCha8Rng) -> f64 {
    let s = rng.random_range(0.1..1.0);
    if rng.random_bool(0.5) {
        s
    } else {
        -s
    }
}

fn tcore_suite(cfg: SelftestConfig) -> Result<Vec<CheckResult>> {
    let t = cfg.trials;
    Ok(vec![
        property("bcirc_homomorphism", t, cfg.seed, |rng| {
            let (m, n, q, p) = (dim(rng), dim(rng), dim(rng), dim(rng));
            let a = Tensor3::random(m, n, p, rng);
            let b = Tensor3::random(n, q, p, rng);
            let lhs = bcirc(&tprod(&a, &b)?);
            let rhs = bcirc(&a) * bcirc(&b);
            Ok(rel((lhs - rhs).norm(), a.norm() * b.norm(), 1e-10))
        })?,
        property("fourier_round_trip", t, cfg.seed, |rng| {
            let a = Tensor3::random(dim(rng), dim(rng), dim(rng), rng);
            let back = inverse_fourier_blocks(&fourier_blocks(&a))?;
            Ok(rel((&back - &a).norm(), a.norm(), 1e-12))
        })?,
        property("transpose_identity", t, cfg.seed, |rng| {
            let (m, n, q, p) = (dim(rng), dim(rng), dim(rng), dim(rng));
            let a = Tensor3::random(m, n, p, rng);
            let b = Tensor3::random(n, q, p, rng);
            let lhs = tprod(&a, &b)?.ttranspose();
            let rhs = tprod(&b.ttranspose(), &a.ttranspose())?;
            Ok(rel((&lhs - &rhs).norm(), a.norm() * b.norm(), 1e-12))
        })?,
        property("associativity", t, cfg.seed, |rng| {
            let (m, n, q, r, p) = (dim(rng), dim(rng), dim(rng), dim(rng), dim(rng));
            let a = Tensor3::random(m, n, p, rng);
            let b = Tensor3::random(n, q, p, rng);
            let c = Tensor3::random(q, r, p, rng);
            let lhs = tprod(&tprod(&a, &b)?, &c)?;
            let rhs = tprod(&a, &tprod(&b, &c)?)?;
            Ok(rel(
                (&lhs - &rhs).norm(),
                a.norm() * b.norm() * c.norm(),
                1e-12,
            ))
        })?,
        property("inner_product_fourier", t, cfg.seed, |rng| {
            let (m, n, p) = (dim(rng), dim(rng), dim(rng));
            let a = Tensor3::random(m, n, p, rng);
            let b = Tensor3::random(m, n, p, rng);
            let (fa, fb) = (fourier_blocks(&a), fourier_blocks(&b));
            let spectral: f64 = fa
                .blocks
                .iter()
                .zip(&fb.blocks)
                .map(|(x, y)| (x.adjoint() * y).trace().re)
                .sum::<f64>()
                / p as f64;
            Ok(rel(
                (inner(&a, &b)? - spectral).abs(),
                a.norm() * b.norm(),
                1e-12,
            ))
        })?,
    ])
}

fn spectral_suite(cfg: SelftestConfig) -> Result<Vec<CheckResult>> {
    let t = cfg.trials;
    let tol = PsdTolerance::default();
    Ok(vec![
        property("eig_reconstruction", t, cfg.seed, |rng| {
            let a = Tensor3::random_symmetric(dim(rng), dim(rng), rng);
            let d = t_eig(&a)?;
            let residual = (&d.reconstruct()? - &a).norm() / a.norm().max(f64::MIN_POSITIVE);
            Ok(residual / 1e-9)
        })?,
        property("t_root_residual", t, cfg.seed, |rng| {
            let (n, p) = (dim(rng), dim(rng));
            let g = Tensor3::random(n, n, p, rng);
            let a = tprod(&g.ttranspose(), &g)?.symmetrized();
            let k = rng.random_range(2..=3);
            let r = t_root(&a, k)?;
            let residual = (&r.tpow(k)? - &a).norm() / a.norm().max(f64::MIN_POSITIVE);
            Ok(residual / 1e-9)
        })?,
        property("schur_psd_equivalence", t, cfg.seed, |rng| {
            let (n1, n2, p) = (dim(rng), dim(rng), dim(rng));
            let a = with_min_eigenvalue(n1, p, rng.random_range(0.2..1.0), rng)?;
            let b = Tensor3::random(n1, n2, p, rng);
            let c0 = Tensor3::random_symmetric(n2, p, rng);
            let s0 = t_schur_complement(&a, &b, &c0)?;
            let lo = *t_eigenvalues(&s0)?.last().expect("non-empty spectrum");
            let margin = signed_margin(rng);
            let c = &c0 + &identity(n2, p).scaled(margin - lo);
            let whole = is_t_psd(&block_symmetric_tensor(&a, &b, &c)?, tol)?;
            let schur = is_t_psd(&t_schur_complement(&a, &b, &c)?, tol)?;
            Ok(if whole == schur && schur == (margin > 0.0) {
                0.0
            } else {
                f64::INFINITY
            })
        })?,
        property("congruence_invariance", t, cfg.seed, |rng| {
            let (n, p) = (dim(rng), dim(rng));
            let margin = signed_margin(rng);
            let a = with_min_eigenvalue(n, p, margin, rng)?;
            let q = &identity(n, p) + &Tensor3::random(n, n, p, rng).scaled(0.2 / (n * p) as f64);
            let congruent = tprod(&tprod(&q.ttranspose(), &a)?, &q)?.symmetrized();
            Ok(if is_t_psd(&congruent, tol)? == (margin > 0.0) {
                0.0
            } else {
                f64::INFINITY
            })
        })?,
        property("self_duality", t, cfg.seed, |rng| {
            let (n, p) = (dim(rng), dim(rng));
            let g1 = Tensor3::random(n, n, p, rng);
            let g2 = Tensor3::random(n, n, p, rng);
            let x = tprod(&g1.ttranspose(), &g1)?.symmetrized();
            let y = tprod(&g2.ttranspose(), &g2)?.symmetrized();
            let pairing = inner(&x, &y)?;
            // Outside the cone, the minimum eigen-direction gives a separating PSD tensor.
            let bad = with_min_eigenvalue(n, p, -rng.random_range(0.1..1.0), rng)?;
            let (_, v) = min_eigen_direction(&bad)?;
            let w = tprod(&v, &v.ttranspose())?.symmetrized();
            let separated = is_t_psd(&w, tol)? && inner(&bad, &w)? < 0.0;
            let inside = pairing >= -1e-12 * (1.0 + x.norm() * y.norm());
            Ok(if inside && separated {
                0.0
            } else {
                f64::INFINITY
            })
        })?,
    ])
}

/// Worked example whose T-Hessian has slices `[[2,0],[0,2]]` and `[[2,0],[0,0]]`.
pub fn hessian_example() -> MvFunction {
    MvFunction::new(2, 2, |x| {
        let (a, b) = (x.get(0, 0, 0), x.get(0, 0, 1));
        a * a + 2.0 * a * b + b * b + x.get(1, 0, 0).powi(2) + x.get(1, 0, 1).powi(2)
    })
}

/// `x₁₁₁ · x₂₁₁²`, whose Hessian is not block circulant.
pub fn non_circulant_witness() -> MvFunction {
    MvFunction::new(2, 2, |x| x.get(0, 0, 0) * x.get(1, 0, 0).powi(2))
}

fn calculus_suite(cfg: SelftestConfig) -> Result<Vec<CheckResult>> {
    let t = cfg.trials.min(50);
    let expected = [
        DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]),
        DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]),
    ];
    let point = |rng: &mut ChaCha8Rng, n: usize, p: usize| {
        Tensor3::from_fn(n, 1, p, |_, _, _| rng.random_range(-2.0..2.0))
    };
    Ok(vec![
        property("example_hessian", t, cfg.seed, |rng| {
            let h = t_hessian(&hessian_example(), &point(rng, 2, 2), None, CIRC_TOL)?;
            let err = (0..2)
                .map(|k| (h.slice(k) - &expected[k]).amax())
                .fold(0.0, f64::max);
            Ok(err / 1e-5)
        })?,
        property("non_circulant_rejected", t, cfg.seed, |rng| {
            let mut x = point(rng, 2, 2);
            // Keep x₂₁₁ away from zero so the off-circulant curvature is visible.
            x.set(1, 0, 0, 0.5 + rng.random_range(0.0..1.5));
            Ok(
                match t_hessian(&non_circulant_witness(), &x, None, CIRC_TOL) {
                    Err(Error::NotTwiceTDifferentiable { .. }) => 0.0,
                    _ => f64::INFINITY,
                },
            )
        })?,
        property("quadratic_hessian", t, cfg.seed, |rng| {
            let (n, p) = (rng.random_range(1..=3), rng.random_range(1..=3));
            let q = QuadraticForm::new(
                Tensor3::random(n, n, p, rng),
                Tensor3::random(n, 1, p, rng),
                rng.random_range(-1.0..1.0),
            )?;
            let h = t_hessian(&q.to_function(), &point(rng, n, p), None, CIRC_TOL)?;
            let exact = q.hessian();
            Ok(rel((&h - &exact).max_abs(), exact.max_abs(), 1e-5))
        })?,
    ])
}

/// Solver checks on seeded synthetic problems with known optimal values.
pub struct SyntheticSummary {
    pub instances: usize,
    pub solved: usize,
    pub certify: CheckResult,
    pub worst_value_error: f64,
}

pub fn synthetic_campaign(instances: usize, seed: u64) -> Result<SyntheticSummary> {
    let mut rng = stream(seed, "synthetic_value");
    let opts = SolverOptions::default();
    let mut solved = 0;
    let mut certify_failures = 0;
    let mut optimal = 0;
    let mut worst_cert = 0.0_f64;
    let mut worst_value_error = 0.0_f64;
    for _ in 0..instances {
        let n = rng.random_range(1..=4);
        let p = rng.random_range(1..=5);
        let m = rng.random_range(1..=n * (n + 1) / 2 * p);
        let (problem, optimum) = synthetic_problem(n, p, m, &mut rng)?;
        let sol = solve_tsdp(&problem, &opts)?;
        let err = (sol.primal_obj - optimum).abs() / (1.0 + optimum.abs());
        worst_value_error = worst_value_error.max(err);
        if err <= 1e-6 {
            solved += 1;
        }
        if sol.status == SolveStatus::Optimal {
            optimal += 1;
            let weak_gap = sol.gap / (1.0 + sol.primal_obj.abs() + sol.dual_obj.abs());
            let score = [
                sol.primal_residual / 1e-7,
                sol.dual_residual / 1e-7,
                -sol.min_eig_x / 1e-7,
                -sol.min_eig_s / 1e-7,
                -weak_gap / 1e-8,
            ]
            .into_iter()
            .fold(0.0, f64::max);
            worst_cert = worst_cert.max(score);
            if score > 1.0 {
                certify_failures += 1;
            }
        }
    }
    Ok(SyntheticSummary {
        instances,
        solved,
        certify: CheckResult {
            name: "optimal_exits_certify".into(),
            trials: optimal,
            failures: certify_failures,
            worst: worst_cert,
            allowed_failures: 0,
        },
        worst_value_error,
    })
}

fn tsdp_suite(cfg: SelftestConfig) -> Result<Vec<CheckResult>> {
    let instances = 100;
    let summary = synthetic_campaign(instances, cfg.seed)?;
    Ok(vec![
        CheckResult {
            name: "synthetic_value".into(),
            trials: instances,
            failures: instances - summary.solved,
            worst: summary.worst_value_error / 1e-6,
            allowed_failures: instances / 20,
        },
        summary.certify,
    ])
}

/// Relative errors of the norm routines against their Fourier-domain oracles.
pub struct OracleSummary {
    pub nuclear: CheckResult,
    pub spectral: CheckResult,
    pub iqp: CheckResult,
}

pub fn oracle_campaign(instances: usize, seed: u64) -> Result<OracleSummary> {
    let opts = SolverOptions::default();
    let shape = |rng: &mut ChaCha8Rng| {
        (
            rng.random_range(1..=4),
            rng.random_range(1..=4),
            rng.random_range(1..=4),
        )
    };
    let nuclear = property("nuclear_vs_oracle", instances, seed, |rng| {
        let (m, n, p) = shape(rng);
        let a = Tensor3::random(m, n, p, rng);
        let (value, _) = nuclear_norm_tsdp(&a, &opts)?;
        let oracle = nuclear_norm_oracle(&a);
        Ok((value - oracle).abs() / (1e-5 * oracle.max(1e-12)))
    })?;
    let spectral = property("spectral_vs_oracle", instances, seed, |rng| {
        let (m, n, p) = shape(rng);
        let a = Tensor3::random(m, n, p, rng);
        let value = min_spectral_norm(&a, &[], &opts)?.value;
        let oracle = spectral_norm_oracle(&a);
        Ok((value - oracle).abs() / (1e-6 * (1.0 + oracle)))
    })?;
    let iqp = property("iqp_upper_bounds_oracle", instances, seed, |rng| {
        let n = rng.random_range(1..=8);
        let a = Tensor3::random_symmetric(n, n, rng);
        let (bound, _) = integer_quartic_relaxation(&a, &opts)?;
        let oracle = integer_quartic_oracle(&a)?;
        Ok(if bound >= oracle - 1e-6 * (1.0 + oracle.abs()) {
            0.0
        } else {
            f64::INFINITY
        })
    })?;
    Ok(OracleSummary {
        nuclear,
        spectral,
        iqp,
    })
}

fn polyopt_suite(cfg: SelftestConfig) -> Result<Vec<CheckResult>> {
    let o = oracle_campaign(50, cfg.seed)?;
    Ok(vec![o.nuclear, o.spectral, o.iqp])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_filter_is_rejected() {
        assert!(run(Some("nope"), SelftestConfig::default()).is_err());
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = SelftestConfig {
            seed: 7,
            trials: 10,
        };
        let a = run_suite("tcore", cfg).unwrap();
        let b = run_suite("tcore", cfg).unwrap();
        for (x, y) in a.checks.iter().zip(&b.checks) {
            assert_eq!(x.worst, y.worst);
        }
        assert!(a.passed());
    }

    #[test]
    fn streams_depend_on_name() {
        let a: u64 = stream(1, "a").random();
        let b: u64 = stream(1, "b").random();
        assert_ne!(a, b);
    }
}
