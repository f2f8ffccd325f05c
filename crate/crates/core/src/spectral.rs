//! T-eigenvalues, the T-PSD cone and the spectral constructions built on it.
//!
//! A symmetric tensor has Hermitian Fourier blocks, and its T-eigenvalues are
//! the eigenvalues of those blocks (equivalently the spectrum of `bcirc(A)`).
//! Every routine here works per block; the `np × np` block-circulant matrix is
//! never formed.

use crate::error::{Error, Result};
use crate::tcore::{
    fourier_blocks, inverse_fourier_blocks, tinv, tprod_chain, FourierBlocks, Tensor3, C64,
};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

/// Inputs within this relative distance of symmetric are symmetrized.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// PSD acceptance floor `λ_min ≥ −(atol + rtol·max|λ|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdTolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for PsdTolerance {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-12,
        }
    }
}

impl PsdTolerance {
    pub fn floor(&self, max_abs_eigenvalue: f64) -> f64 {
        self.atol + self.rtol * max_abs_eigenvalue
    }
}

/// Returns the symmetrized tensor, or an error when `a` is not close to symmetric.
pub fn require_symmetric(a: &Tensor3) -> Result<Tensor3> {
    if !a.is_square() {
        return Err(Error::NotSymmetric {
            deviation: f64::INFINITY,
        });
    }
    let deviation = a.symmetry_deviation();
    if deviation > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { deviation });
    }
    Ok(a.symmetrized())
}

/// Eigen-decomposition of one Hermitian Fourier block, eigenvalues descending.
#[derive(Debug, Clone)]
pub(crate) struct BlockEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<C64>,
}

fn is_self_conjugate(j: usize, p: usize) -> bool {
    j == 0 || 2 * j == p
}

pub(crate) fn hermitian_eigen(block: &DMatrix<C64>, real: bool) -> BlockEigen {
    let n = block.nrows();
    let (values, vectors) = if real {
        let re = block.map(|z| z.re);
        let re = (&re + re.transpose()) * 0.5;
        let eig = SymmetricEigen::new(re);
        (eig.eigenvalues, eig.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let h = (block + block.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(h);
        (eig.eigenvalues, eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    BlockEigen {
        values: DVector::from_fn(n, |i, _| values[order[i]]),
        vectors: DMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]),
    }
}

/// Eigen-decompositions of all `p` Fourier blocks of a symmetric tensor, with
/// the conjugate partner of every block derived from its leading twin.
pub(crate) fn block_eigens(sym: &Tensor3) -> Vec<BlockEigen> {
    let p = sym.p();
    let fb = fourier_blocks(sym);
    let mut out: Vec<Option<BlockEigen>> = vec![None; p];
    for j in 0..=p / 2 {
        let eig = hermitian_eigen(&fb.blocks[j], is_self_conjugate(j, p));
        let partner = (p - j) % p;
        if partner != j {
            out[partner] = Some(BlockEigen {
                values: eig.values.clone(),
                vectors: eig.vectors.map(|z| z.conj()),
            });
        }
        out[j] = Some(eig);
    }
    out.into_iter()
        .map(|e| e.expect("every block filled"))
        .collect()
}

/// All `np` T-eigenvalues of a symmetric tensor, sorted descending.
pub fn t_eigenvalues(a: &Tensor3) -> Result<Vec<f64>> {
    let sym = require_symmetric(a)?;
    let mut values: Vec<f64> = block_eigens(&sym)
        .iter()
        .flat_map(|e| e.values.iter().copied())
        .collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// `Tr(A) = p · tr(A^(1))`, which equals `Tr(bcirc(A))`.
pub fn t_trace(a: &Tensor3) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::Dimension("T-trace needs square slices".into()));
    }
    Ok(a.p() as f64 * a.slice(0).trace())
}

pub fn is_t_psd(a: &Tensor3, tol: PsdTolerance) -> Result<bool> {
    let values = t_eigenvalues(a)?;
    let (min, maxabs) = extremes(&values);
    Ok(min >= -tol.floor(maxabs))
}

pub fn is_t_pd(a: &Tensor3, tol: PsdTolerance) -> Result<bool> {
    let values = t_eigenvalues(a)?;
    let (min, maxabs) = extremes(&values);
    Ok(min > tol.floor(maxabs))
}

fn extremes(values: &[f64]) -> (f64, f64) {
    let min = values.last().copied().unwrap_or(0.0);
    let maxabs = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    (min, maxabs)
}

/// Spectral summary of a symmetric tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub trace: f64,
    pub is_psd: bool,
    pub is_pd: bool,
    pub tolerance: PsdTolerance,
}

pub fn spectral_report(a: &Tensor3, tol: PsdTolerance) -> Result<SpectralReport> {
    let eigenvalues = t_eigenvalues(a)?;
    let (min, maxabs) = extremes(&eigenvalues);
    let floor = tol.floor(maxabs);
    Ok(SpectralReport {
        lambda_max: eigenvalues[0],
        lambda_min: min,
        trace: t_trace(a)?,
        is_psd: min >= -floor,
        is_pd: min > floor,
        eigenvalues,
        tolerance: tol,
    })
}

/// `A = Uᵀ ∗ S ∗ U` with `U` orthogonal and `S` f-diagonal.
#[derive(Debug, Clone)]
pub struct TEigenDecomposition {
    pub u: Tensor3,
    pub s: Tensor3,
    /// All `np` eigenvalues, sorted descending.
    pub eigenvalues: Vec<f64>,
}

impl TEigenDecomposition {
    pub fn reconstruct(&self) -> Result<Tensor3> {
        tprod_chain(&[&self.u.ttranspose(), &self.s, &self.u])
    }
}

/// T-eigendecomposition; each Fourier block is ordered descending and
/// conjugate blocks share eigenvalues with conjugated eigenvectors.
pub fn t_eig(a: &Tensor3) -> Result<TEigenDecomposition> {
    let sym = require_symmetric(a)?;
    let (n, p) = (sym.n(), sym.p());
    let eigs = block_eigens(&sym);
    let u_blocks = FourierBlocks {
        m: n,
        n,
        blocks: eigs.iter().map(|e| e.vectors.adjoint()).collect(),
    };
    let s_blocks = FourierBlocks {
        m: n,
        n,
        blocks: eigs
            .iter()
            .map(|e| DMatrix::from_diagonal(&e.values.map(|v| C64::new(v, 0.0))))
            .collect(),
    };
    let mut eigenvalues: Vec<f64> = eigs.iter().flat_map(|e| e.values.iter().copied()).collect();
    eigenvalues.sort_by(|x, y| y.total_cmp(x));
    debug_assert_eq!(eigenvalues.len(), n * p);
    Ok(TEigenDecomposition {
        u: inverse_fourier_blocks(&u_blocks)?,
        s: inverse_fourier_blocks(&s_blocks)?,
        eigenvalues,
    })
}

/// Applies a real function to the spectrum of every Fourier block.
pub(crate) fn spectral_map(sym: &Tensor3, f: impl Fn(f64) -> f64) -> Result<Tensor3> {
    let n = sym.n();
    let blocks = block_eigens(sym)
        .iter()
        .map(|e| {
            let d = DMatrix::from_diagonal(&e.values.map(|v| C64::new(f(v), 0.0)));
            &e.vectors * d * e.vectors.adjoint()
        })
        .collect();
    inverse_fourier_blocks(&FourierBlocks { m: n, n, blocks })
}

/// Unique symmetric T-PSD `B` with `B^k = A`.
pub fn t_root(a: &Tensor3, k: u32) -> Result<Tensor3> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "root order must be at least 1".into(),
        ));
    }
    let sym = require_symmetric(a)?;
    let values = t_eigenvalues(&sym)?;
    let (min, maxabs) = extremes(&values);
    let tol = PsdTolerance::default();
    if min < -tol.floor(maxabs) {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    if k == 1 {
        return Ok(sym);
    }
    let exponent = 1.0 / k as f64;
    let root = spectral_map(&sym, |v| v.max(0.0).powf(exponent))?;
    Ok(root.symmetrized())
}

/// `C − Bᵀ ∗ A⁻¹ ∗ B` for T-PD `A`.
pub fn t_schur_complement(a: &Tensor3, b: &Tensor3, c: &Tensor3) -> Result<Tensor3> {
    let a_sym = require_symmetric(a)?;
    let c_sym = require_symmetric(c)?;
    if b.m() != a_sym.n() || b.n() != c_sym.n() || b.p() != a.p() || c.p() != a.p() {
        return Err(Error::Dimension(
            "Schur complement blocks do not conform".into(),
        ));
    }
    let values = t_eigenvalues(&a_sym)?;
    let (min, maxabs) = extremes(&values);
    if min <= PsdTolerance::default().floor(maxabs) {
        return Err(Error::NotPd {
            min_eigenvalue: min,
        });
    }
    let a_inv = tinv(&a_sym)?;
    let correction = tprod_chain(&[&b.ttranspose(), &a_inv, b])?;
    Ok((&c_sym - &correction).symmetrized())
}

/// Assembles `[[A, B], [Bᵀ, C]]`.
pub fn block_symmetric_tensor(a: &Tensor3, b: &Tensor3, c: &Tensor3) -> Result<Tensor3> {
    Tensor3::block2x2(a, b, &b.ttranspose(), c)
}

/// Block-diagonal assembly of symmetric tensors sharing the tube size.
pub fn block_diag_tensor(blocks: &[Tensor3]) -> Result<Tensor3> {
    let first = blocks
        .first()
        .ok_or_else(|| Error::Dimension("no blocks".into()))?;
    let p = first.p();
    if blocks.iter().any(|b| b.p() != p) {
        return Err(Error::Dimension("blocks must share the tube size".into()));
    }
    if blocks.iter().any(|b| !b.is_square()) {
        return Err(Error::Dimension("diagonal blocks must be square".into()));
    }
    let size: usize = blocks.iter().map(|b| b.n()).sum();
    let mut out = Tensor3::zeros(size, size, p);
    let mut offset = 0;
    for b in blocks {
        for k in 0..p {
            out.slice_mut(k)
                .view_mut((offset, offset), (b.n(), b.n()))
                .copy_from(b.slice(k));
        }
        offset += b.n();
    }
    Ok(out)
}

/// Minimum T-eigenvalue together with a real direction `Y` (`n × 1 × p`) that
/// attains `⟨Y, A ∗ Y⟩ = λ_min · ‖Y‖²`.
pub fn min_eigen_direction(a: &Tensor3) -> Result<(f64, Tensor3)> {
    let sym = require_symmetric(a)?;
    let (n, p) = (sym.n(), sym.p());
    let eigs = block_eigens(&sym);
    let (j, _) = eigs
        .iter()
        .enumerate()
        .map(|(j, e)| (j, e.values[n - 1]))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("at least one block");
    let lambda = eigs[j].values[n - 1];
    let v = eigs[j].vectors.column(n - 1).into_owned();
    let mut blocks = vec![DMatrix::<C64>::zeros(n, 1); p];
    let partner = (p - j) % p;
    blocks[j] = DMatrix::from_column_slice(n, 1, v.as_slice());
    if partner != j {
        blocks[partner] = blocks[j].map(|z| z.conj());
    }
    let y = inverse_fourier_blocks(&FourierBlocks { m: n, n: 1, blocks })?;
    Ok((lambda, y))
}
