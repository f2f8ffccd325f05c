//! Derivatives of functions `f: ℝ^{n×1×p} → ℝ` in the T-product sense.
//!
//! The T-gradient is the ordinary gradient with respect to `unfold(X)`, folded
//! back into an `n × 1 × p` tensor. The Jacobian `J` of `unfold(∇_T f)` is
//! `np × np`, and `f` has a T-Hessian at `X` exactly when `J` is
//! `p`-block-circulant, in which case `∇²_T f(X) = bcirc⁻¹(J)`. This module
//! estimates `J` by finite differences and turns the structural condition
//! into a tolerance test.

use crate::error::{Error, Result};
use crate::spectral::{min_eigen_direction, t_eigenvalues};
use crate::tcore::{fold, inner, tprod, unfold, Tensor3};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Default relative tolerance for the block-circulant test on `J`.
pub const CIRC_TOL: f64 = 1e-5;

type Evaluate = dyn Fn(&Tensor3) -> f64;
type Gradient = dyn Fn(&Tensor3) -> Tensor3;

/// A scalar function of an `n × 1 × p` tensor with an optional analytic gradient.
pub struct MvFunction {
    pub n: usize,
    pub p: usize,
    evaluate: Box<Evaluate>,
    gradient: Option<Box<Gradient>>,
}

impl MvFunction {
    pub fn new(n: usize, p: usize, f: impl Fn(&Tensor3) -> f64 + 'static) -> Self {
        Self {
            n,
            p,
            evaluate: Box::new(f),
            gradient: None,
        }
    }

    pub fn with_gradient(mut self, g: impl Fn(&Tensor3) -> Tensor3 + 'static) -> Self {
        self.gradient = Some(Box::new(g));
        self
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    fn check_shape(&self, x: &Tensor3) -> Result<()> {
        if x.shape() != (self.n, 1, self.p) {
            return Err(Error::Dimension(format!(
                "function expects {}×1×{}, found {:?}",
                self.n,
                self.p,
                x.shape()
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &Tensor3) -> Result<f64> {
        self.check_shape(x)?;
        let v = (self.evaluate)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite)
        }
    }

    fn evaluate_at(&self, base: &[f64], x: &Tensor3) -> Result<f64> {
        let t = fold(
            &DMatrix::from_column_slice(base.len(), 1, base),
            self.n,
            1,
            self.p,
        )?;
        debug_assert_eq!(t.shape(), x.shape());
        self.evaluate(&t)
    }
}

impl std::fmt::Debug for MvFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MvFunction")
            .field("n", &self.n)
            .field("p", &self.p)
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

/// `f(X) = ⟨X, A ∗ X⟩ + ⟨B, X⟩ + c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub a: Tensor3,
    pub b: Tensor3,
    pub c: f64,
}

impl QuadraticForm {
    pub fn new(a: Tensor3, b: Tensor3, c: f64) -> Result<Self> {
        let (n, n2, p) = a.shape();
        if n != n2 || b.shape() != (n, 1, p) {
            return Err(Error::Dimension(format!(
                "quadratic form needs A n×n×p and B n×1×p, found {:?} and {:?}",
                a.shape(),
                b.shape()
            )));
        }
        Ok(Self { a, b, c })
    }

    pub fn evaluate(&self, x: &Tensor3) -> Result<f64> {
        Ok(inner(x, &tprod(&self.a, x)?)? + inner(&self.b, x)? + self.c)
    }

    /// `(A + Aᵀ) ∗ X + B`.
    pub fn gradient(&self, x: &Tensor3) -> Result<Tensor3> {
        Ok(&tprod(&self.hessian(), x)? + &self.b)
    }

    /// `A + Aᵀ`, independent of `X`.
    pub fn hessian(&self) -> Tensor3 {
        &self.a + &self.a.ttranspose()
    }

    pub fn to_function(&self) -> MvFunction {
        let (n, _, p) = self.a.shape();
        let q = self.clone();
        let g = self.clone();
        MvFunction::new(n, p, move |x| q.evaluate(x).unwrap_or(f64::NAN))
            .with_gradient(move |x| g.gradient(x).expect("shape checked by MvFunction"))
    }
}

/// `ε^{1/3} (1 + ‖X‖)`, balancing truncation and rounding for central differences.
pub fn default_gradient_step(x: &Tensor3) -> f64 {
    f64::EPSILON.cbrt() * (1.0 + x.norm())
}

/// `ε^{1/4} (1 + ‖X‖)`, the analogous balance for second differences of `f`.
pub fn default_hessian_step(x: &Tensor3) -> f64 {
    f64::EPSILON.powf(0.25) * (1.0 + x.norm())
}

/// Central-difference T-gradient.
pub fn t_gradient_fd(f: &MvFunction, x: &Tensor3, h: f64) -> Result<Tensor3> {
    f.check_shape(x)?;
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::InvalidArgument(
            "finite-difference step must be positive".into(),
        ));
    }
    let base = unfold(x);
    let mut v: Vec<f64> = base.iter().copied().collect();
    let mut grad = vec![0.0; v.len()];
    for i in 0..v.len() {
        let orig = v[i];
        v[i] = orig + h;
        let fp = f.evaluate_at(&v, x)?;
        v[i] = orig - h;
        let fm = f.evaluate_at(&v, x)?;
        v[i] = orig;
        grad[i] = (fp - fm) / (2.0 * h);
    }
    fold(
        &DMatrix::from_column_slice(grad.len(), 1, &grad),
        f.n,
        1,
        f.p,
    )
}

/// Finite-difference Jacobian of `unfold(∇_T f)` with respect to `unfold(X)`.
///
/// Differentiates the analytic gradient when one is supplied and otherwise
/// takes second differences of `f` itself.
pub fn gradient_jacobian(f: &MvFunction, x: &Tensor3, h: f64) -> Result<DMatrix<f64>> {
    f.check_shape(x)?;
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::InvalidArgument(
            "finite-difference step must be positive".into(),
        ));
    }
    let dim = f.n * f.p;
    let mut v: Vec<f64> = unfold(x).iter().copied().collect();
    let mut jac = DMatrix::<f64>::zeros(dim, dim);
    if let Some(g) = &f.gradient {
        let at = |v: &[f64]| -> Result<DMatrix<f64>> {
            let t = fold(&DMatrix::from_column_slice(dim, 1, v), f.n, 1, f.p)?;
            let grad = g(&t);
            if grad.shape() != (f.n, 1, f.p) {
                return Err(Error::Dimension(
                    "gradient callback returned the wrong shape".into(),
                ));
            }
            let u = unfold(&grad);
            if u.iter().any(|z| !z.is_finite()) {
                return Err(Error::NonFinite);
            }
            Ok(u)
        };
        for j in 0..dim {
            let orig = v[j];
            v[j] = orig + h;
            let gp = at(&v)?;
            v[j] = orig - h;
            let gm = at(&v)?;
            v[j] = orig;
            jac.set_column(j, &((gp - gm) / (2.0 * h)).column(0));
        }
        return Ok(jac);
    }
    let f0 = f.evaluate_at(&v, x)?;
    for i in 0..dim {
        let oi = v[i];
        v[i] = oi + 2.0 * h;
        let fpp = f.evaluate_at(&v, x)?;
        v[i] = oi - 2.0 * h;
        let fmm = f.evaluate_at(&v, x)?;
        v[i] = oi;
        jac[(i, i)] = (fpp - 2.0 * f0 + fmm) / (4.0 * h * h);
        for j in (i + 1)..dim {
            let oj = v[j];
            let mut eval = |si: f64, sj: f64| -> Result<f64> {
                v[i] = oi + si * h;
                v[j] = oj + sj * h;
                let r = f.evaluate_at(&v, x);
                v[i] = oi;
                v[j] = oj;
                r
            };
            let val = (eval(1.0, 1.0)? - eval(1.0, -1.0)? - eval(-1.0, 1.0)? + eval(-1.0, -1.0)?)
                / (4.0 * h * h);
            jac[(i, j)] = val;
            jac[(j, i)] = val;
        }
    }
    Ok(jac)
}

/// Relative distance of an `np × np` matrix from block-circulant structure:
/// the largest Frobenius deviation of a block from the mean of its block
/// diagonal, divided by `‖J‖_F`.
pub fn circulant_deviation(j: &DMatrix<f64>, n: usize, p: usize) -> f64 {
    let means = block_diagonal_means(j, n, p);
    let norm = j.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0_f64;
    for r in 0..p {
        for c in 0..p {
            let d = (j.view((r * n, c * n), (n, n)) - &means[(r + p - c) % p]).norm();
            worst = worst.max(d);
        }
    }
    worst / norm
}

fn block_diagonal_means(j: &DMatrix<f64>, n: usize, p: usize) -> Vec<DMatrix<f64>> {
    let mut means = vec![DMatrix::<f64>::zeros(n, n); p];
    for r in 0..p {
        for c in 0..p {
            means[(r + p - c) % p] += j.view((r * n, c * n), (n, n));
        }
    }
    means.into_iter().map(|m| m / p as f64).collect()
}

/// Projects a (nearly) block-circulant Jacobian onto its tensor.
pub fn circulant_projection(j: &DMatrix<f64>, n: usize, p: usize) -> Result<Tensor3> {
    Tensor3::from_slices(block_diagonal_means(j, n, p))
}

/// T-Hessian by finite differences.
///
/// `h = None` selects [`default_gradient_step`] when an analytic gradient is
/// available and [`default_hessian_step`] otherwise.
pub fn t_hessian(f: &MvFunction, x: &Tensor3, h: Option<f64>, circ_tol: f64) -> Result<Tensor3> {
    let h = h.unwrap_or_else(|| {
        if f.has_gradient() {
            default_gradient_step(x)
        } else {
            default_hessian_step(x)
        }
    });
    let jac = gradient_jacobian(f, x, h)?;
    let sym = (&jac + jac.transpose()) * 0.5;
    let deviation = circulant_deviation(&sym, f.n, f.p);
    if deviation > circ_tol {
        return Err(Error::NotTwiceTDifferentiable { deviation });
    }
    circulant_projection(&sym, f.n, f.p)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ConvexityVerdict {
    /// The T-Hessian is T-PSD within `tol` at every sample.
    ConvexEvidence { min_eigenvalue: f64 },
    /// The T-Hessian is T-PD at every sample. Strict convexity is not claimed.
    PdEvidence { min_eigenvalue: f64 },
    /// A sample and a real direction with `⟨Y, ∇²_T f(X) ∗ Y⟩ < −tol`.
    NotConvex {
        sample: usize,
        direction: Tensor3,
        curvature: f64,
    },
}

impl ConvexityVerdict {
    pub fn is_convex_evidence(&self) -> bool {
        !matches!(self, ConvexityVerdict::NotConvex { .. })
    }
}

/// Checks T-positive semidefiniteness of the T-Hessian at each sample.
pub fn convexity_certificate(
    f: &MvFunction,
    samples: &[Tensor3],
    tol: f64,
) -> Result<ConvexityVerdict> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one sample is required".into(),
        ));
    }
    let mut min_eig = f64::INFINITY;
    for (idx, x) in samples.iter().enumerate() {
        let hess = t_hessian(f, x, None, CIRC_TOL)?;
        let lambda = *t_eigenvalues(&hess)?.last().expect("nonempty spectrum");
        if lambda < -tol {
            let (_, y) = min_eigen_direction(&hess)?;
            let y = y.scaled(1.0 / y.norm());
            let curvature = inner(&y, &tprod(&hess, &y)?)?;
            return Ok(ConvexityVerdict::NotConvex {
                sample: idx,
                direction: y,
                curvature,
            });
        }
        min_eig = min_eig.min(lambda);
    }
    Ok(if min_eig > tol {
        ConvexityVerdict::PdEvidence {
            min_eigenvalue: min_eig,
        }
    } else {
        ConvexityVerdict::ConvexEvidence {
            min_eigenvalue: min_eig,
        }
    })
}

/// `|f(X) − f(X₀) − ⟨∇f(X₀), Δ⟩ − ½⟨∇²_T f(X₀) ∗ Δ, Δ⟩|` with `Δ = X − X₀`.
pub fn taylor2_residual(f: &MvFunction, x0: &Tensor3, x: &Tensor3, h: Option<f64>) -> Result<f64> {
    f.check_shape(x)?;
    let grad = match &f.gradient {
        Some(g) => g(x0),
        None => t_gradient_fd(f, x0, default_gradient_step(x0))?,
    };
    let hess = t_hessian(f, x0, h, CIRC_TOL)?;
    let delta = x - x0;
    let quad = inner(&tprod(&hess, &delta)?, &delta)?;
    Ok((f.evaluate(x)? - f.evaluate(x0)? - inner(&grad, &delta)? - 0.5 * quad).abs())
}
