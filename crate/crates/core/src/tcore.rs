//! Third-order tensors and the T-product algebra.
//!
//! A [`Tensor3`] of shape `m × n × p` is stored as its `p` frontal slices.
//! The T-product is `A ∗ B = fold(bcirc(A) · unfold(B))`; under the unitary
//! DFT `F_p` (with `ω = e^{2πi/p}`) the block-circulant matrix `bcirc(A)`
//! becomes block diagonal, and the diagonal blocks are what
//! [`fourier_blocks`] returns:
//!
//! ```text
//! (F_p ⊗ I_m) · bcirc(A) · (F_p^H ⊗ I_n) = Diag(Â_1, …, Â_p),   Â_j = Σ_s ω^{(j-1)(s-1)} A^(s)
//! ```
//!
//! All indices in this module are zero-based; block `j` pairs with block
//! `(p - j) mod p` under conjugation.

use crate::error::{Error, Result};
use nalgebra::{Complex, DMatrix};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

pub type C64 = Complex<f64>;

/// Default relative tolerance for algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-10;
/// Default tolerance for stripping imaginary residue after an inverse transform.
pub const IMAG_TOL: f64 = 1e-8;

/// Dense real third-order tensor stored as ordered frontal slices.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    m: usize,
    n: usize,
    p: usize,
    slices: Vec<DMatrix<f64>>,
}

impl Tensor3 {
    pub fn zeros(m: usize, n: usize, p: usize) -> Self {
        assert!(p >= 1, "tube size must be at least 1");
        Self {
            m,
            n,
            p,
            slices: vec![DMatrix::zeros(m, n); p],
        }
    }

    pub fn from_slices(slices: Vec<DMatrix<f64>>) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::Dimension("a tensor needs at least one slice".into()))?;
        let (m, n) = first.shape();
        if slices.iter().any(|s| s.shape() != (m, n)) {
            return Err(Error::Dimension(
                "frontal slices must share their dimensions".into(),
            ));
        }
        Ok(Self {
            m,
            n,
            p: slices.len(),
            slices,
        })
    }

    /// Builds a tensor from an entry function `f(i, j, k)`.
    pub fn from_fn(
        m: usize,
        n: usize,
        p: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let slices = (0..p)
            .map(|k| DMatrix::from_fn(m, n, |i, j| f(i, j, k)))
            .collect();
        Self { m, n, p, slices }
    }

    /// The matrix `M` viewed as an `m × n × 1` tensor.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        let (m, n) = matrix.shape();
        Self {
            m,
            n,
            p: 1,
            slices: vec![matrix],
        }
    }

    /// Entries drawn uniformly from `[-1, 1)`.
    pub fn random<R: Rng + ?Sized>(m: usize, n: usize, p: usize, rng: &mut R) -> Self {
        Self::from_fn(m, n, p, |_, _, _| rng.random_range(-1.0..1.0))
    }

    /// A random symmetric tensor, `(R + Rᵀ)/2`.
    pub fn random_symmetric<R: Rng + ?Sized>(n: usize, p: usize, rng: &mut R) -> Self {
        let r = Self::random(n, n, p, rng);
        (&r + &r.ttranspose()).scaled(0.5)
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.m, self.n, self.p)
    }
    pub fn slices(&self) -> &[DMatrix<f64>] {
        &self.slices
    }
    pub fn slice(&self, k: usize) -> &DMatrix<f64> {
        &self.slices[k]
    }
    pub fn slice_mut(&mut self, k: usize) -> &mut DMatrix<f64> {
        &mut self.slices[k]
    }
    pub fn into_slices(self) -> Vec<DMatrix<f64>> {
        self.slices
    }
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.slices[k][(i, j)]
    }
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        self.slices[k][(i, j)] = value;
    }

    pub fn is_square(&self) -> bool {
        self.m == self.n
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self {
            m: self.m,
            n: self.n,
            p: self.p,
            slices: self.slices.iter().map(|s| s.map(&mut f)).collect(),
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        self.map(|x| alpha * x)
    }

    /// Frobenius norm, `√⟨A, A⟩`.
    pub fn norm(&self) -> f64 {
        self.slices
            .iter()
            .map(|s| s.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.slices
            .iter()
            .flat_map(|s| s.iter())
            .fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.shape() == other.shape()
    }

    /// T-transpose: first slice transposed, slices `2..p` transposed and reversed.
    pub fn ttranspose(&self) -> Self {
        let p = self.p;
        let slices = (0..p)
            .map(|k| self.slices[(p - k) % p].transpose())
            .collect();
        Self {
            m: self.n,
            n: self.m,
            p,
            slices,
        }
    }

    /// Relative distance to the nearest symmetric tensor, `‖A − Aᵀ‖ / ‖A‖`.
    pub fn symmetry_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let diff = (self - &self.ttranspose()).norm();
        let scale = self.norm();
        if scale == 0.0 {
            0.0
        } else {
            diff / scale
        }
    }

    /// `(A + Aᵀ)/2`.
    pub fn symmetrized(&self) -> Self {
        (self + &self.ttranspose()).scaled(0.5)
    }

    /// `k`-fold T-product power; `A^0` is the identity.
    pub fn tpow(&self, k: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("tensor power needs square slices".into()));
        }
        let blocks = fourier_blocks(self);
        let powered = FourierBlocks {
            m: self.m,
            n: self.n,
            blocks: blocks
                .blocks
                .iter()
                .map(|b| complex_matrix_power(b, k))
                .collect(),
        };
        inverse_fourier_blocks(&powered)
    }

    /// Assembles the 2×2 block tensor `[[a, b], [c, d]]` slice by slice.
    pub fn block2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        let p = a.p;
        if [b.p, c.p, d.p].iter().any(|&q| q != p)
            || a.m != b.m
            || c.m != d.m
            || a.n != c.n
            || b.n != d.n
        {
            return Err(Error::Dimension("incompatible block shapes".into()));
        }
        let (m, n) = (a.m + c.m, a.n + b.n);
        let slices = (0..p)
            .map(|k| {
                let mut s = DMatrix::zeros(m, n);
                s.view_mut((0, 0), (a.m, a.n)).copy_from(&a.slices[k]);
                s.view_mut((0, a.n), (b.m, b.n)).copy_from(&b.slices[k]);
                s.view_mut((a.m, 0), (c.m, c.n)).copy_from(&c.slices[k]);
                s.view_mut((a.m, a.n), (d.m, d.n)).copy_from(&d.slices[k]);
                s
            })
            .collect();
        Ok(Self { m, n, p, slices })
    }

    /// Extracts the sub-tensor with rows `r0..r0+rows` and columns `c0..c0+cols`.
    pub fn sub_tensor(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self {
            m: rows,
            n: cols,
            p: self.p,
            slices: self
                .slices
                .iter()
                .map(|s| s.view((r0, c0), (rows, cols)).into_owned())
                .collect(),
        }
    }
}

impl Add for &Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        assert!(self.same_shape(rhs), "shape mismatch in tensor addition");
        Tensor3 {
            m: self.m,
            n: self.n,
            p: self.p,
            slices: self
                .slices
                .iter()
                .zip(&rhs.slices)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        assert!(self.same_shape(rhs), "shape mismatch in tensor subtraction");
        Tensor3 {
            m: self.m,
            n: self.n,
            p: self.p,
            slices: self
                .slices
                .iter()
                .zip(&rhs.slices)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &Tensor3 {
    type Output = Tensor3;
    fn neg(self) -> Tensor3 {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &Tensor3 {
    type Output = Tensor3;
    fn mul(self, rhs: f64) -> Tensor3 {
        self.scaled(rhs)
    }
}

#[derive(Serialize, Deserialize)]
struct TensorJson {
    m: usize,
    n: usize,
    p: usize,
    slices: Vec<Vec<Vec<f64>>>,
}

impl Serialize for Tensor3 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let slices = self
            .slices
            .iter()
            .map(|s| {
                (0..self.m)
                    .map(|i| (0..self.n).map(|j| s[(i, j)]).collect())
                    .collect()
            })
            .collect();
        TensorJson {
            m: self.m,
            n: self.n,
            p: self.p,
            slices,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Tensor3 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = TensorJson::deserialize(deserializer)?;
        if raw.p == 0 || raw.slices.len() != raw.p {
            return Err(D::Error::custom(format!(
                "expected {} slices, found {}",
                raw.p,
                raw.slices.len()
            )));
        }
        let mut slices = Vec::with_capacity(raw.p);
        for (k, rows) in raw.slices.iter().enumerate() {
            if rows.len() != raw.m || rows.iter().any(|r| r.len() != raw.n) {
                return Err(D::Error::custom(format!(
                    "slice {} is not {}×{}",
                    k + 1,
                    raw.m,
                    raw.n
                )));
            }
            slices.push(DMatrix::from_fn(raw.m, raw.n, |i, j| rows[i][j]));
        }
        Ok(Tensor3 {
            m: raw.m,
            n: raw.n,
            p: raw.p,
            slices,
        })
    }
}

/// Stacks the frontal slices vertically into an `mp × n` matrix.
pub fn unfold(t: &Tensor3) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(t.m * t.p, t.n);
    for (k, s) in t.slices.iter().enumerate() {
        out.view_mut((k * t.m, 0), (t.m, t.n)).copy_from(s);
    }
    out
}

/// Inverse of [`unfold`].
pub fn fold(matrix: &DMatrix<f64>, m: usize, n: usize, p: usize) -> Result<Tensor3> {
    if p == 0 || matrix.nrows() != m * p || matrix.ncols() != n {
        return Err(Error::Dimension(format!(
            "cannot fold a {}×{} matrix into {m}×{n}×{p}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let slices = (0..p)
        .map(|k| matrix.view((k * m, 0), (m, n)).into_owned())
        .collect();
    Ok(Tensor3 { m, n, p, slices })
}

/// Block-circulant `mp × np` matrix whose first block column is `unfold(t)`.
pub fn bcirc(t: &Tensor3) -> DMatrix<f64> {
    let (m, n, p) = t.shape();
    let mut out = DMatrix::zeros(m * p, n * p);
    for r in 0..p {
        for c in 0..p {
            let s = &t.slices[(r + p - c) % p];
            out.view_mut((r * m, c * n), (m, n)).copy_from(s);
        }
    }
    out
}

/// Maximum deviation of `matrix` from `p`-block-circulant structure, measured
/// entrywise against the first block column.
pub fn circulant_deviation_abs(matrix: &DMatrix<f64>, m: usize, n: usize, p: usize) -> f64 {
    let mut dev = 0.0_f64;
    for r in 0..p {
        for c in 0..p {
            let s = (r + p - c) % p;
            for i in 0..m {
                for j in 0..n {
                    let d = (matrix[(r * m + i, c * n + j)] - matrix[(s * m + i, j)]).abs();
                    dev = dev.max(d);
                }
            }
        }
    }
    dev
}

/// Reads the first block column of an `mp × np` matrix back into a tensor.
///
/// With `check_circulant` set, the matrix must be block circulant within
/// `ALGEBRA_TOL · (1 + max|M|)`.
pub fn bcirc_inv(
    matrix: &DMatrix<f64>,
    m: usize,
    n: usize,
    p: usize,
    check_circulant: bool,
) -> Result<Tensor3> {
    if p == 0 || matrix.shape() != (m * p, n * p) {
        return Err(Error::Dimension(format!(
            "expected a {}×{} matrix, found {}×{}",
            m * p,
            n * p,
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    if check_circulant {
        let deviation = circulant_deviation_abs(matrix, m, n, p);
        let scale = 1.0 + matrix.amax();
        if deviation > ALGEBRA_TOL * scale {
            return Err(Error::NotCirculant { p, deviation });
        }
    }
    let first_column = matrix.view((0, 0), (m * p, n)).into_owned();
    fold(&first_column, m, n, p)
}

/// The T-product `A ∗ B` computed through the Fourier blocks.
pub fn tprod(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    check_conformable(a, b)?;
    if a.p == 1 {
        return Ok(Tensor3::from_matrix(&a.slices[0] * &b.slices[0]));
    }
    let fa = fourier_blocks(a);
    let fb = fourier_blocks(b);
    let blocks = fa
        .blocks
        .iter()
        .zip(&fb.blocks)
        .map(|(x, y)| x * y)
        .collect();
    inverse_fourier_blocks(&FourierBlocks {
        m: a.m,
        n: b.n,
        blocks,
    })
}

/// The T-product computed literally as `fold(bcirc(A) · unfold(B))`.
pub fn tprod_via_bcirc(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    check_conformable(a, b)?;
    fold(&(bcirc(a) * unfold(b)), a.m, b.n, a.p)
}

fn check_conformable(a: &Tensor3, b: &Tensor3) -> Result<()> {
    if a.n != b.m || a.p != b.p {
        return Err(Error::Dimension(format!(
            "cannot multiply {}×{}×{} by {}×{}×{}",
            a.m, a.n, a.p, b.m, b.n, b.p
        )));
    }
    Ok(())
}

/// T-product of a chain of tensors, left to right.
pub fn tprod_chain(factors: &[&Tensor3]) -> Result<Tensor3> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::Dimension("empty product".into()))?;
    rest.iter()
        .try_fold((*first).clone(), |acc, f| tprod(&acc, f))
}

pub fn ttranspose(a: &Tensor3) -> Tensor3 {
    a.ttranspose()
}

/// Identity tensor `I_{nnp}`: first slice `I_n`, others zero.
pub fn identity(n: usize, p: usize) -> Tensor3 {
    let mut t = Tensor3::zeros(n, n, p);
    t.slices[0] = DMatrix::identity(n, n);
    t
}

/// `⟨A, B⟩ = Σ a_ijk b_ijk`.
pub fn inner(a: &Tensor3, b: &Tensor3) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(Error::Dimension(format!(
            "inner product of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.slices.iter().zip(&b.slices).map(|(x, y)| x.dot(y)).sum())
}

/// Unitary DFT matrix `F_p[j, k] = ω^{jk} / √p`, `ω = e^{2πi/p}`.
#[derive(Debug, Clone)]
pub struct DftMatrix {
    pub p: usize,
    pub entries: DMatrix<C64>,
}

impl DftMatrix {
    pub fn new(p: usize) -> Self {
        let scale = 1.0 / (p as f64).sqrt();
        let roots = roots_of_unity(p);
        let entries = DMatrix::from_fn(p, p, |j, k| roots[(j * k) % p] * scale);
        Self { p, entries }
    }

    /// `‖F^H F − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.entries.adjoint() * &self.entries;
        let eye = DMatrix::<C64>::identity(self.p, self.p);
        (prod - eye).iter().fold(0.0_f64, |a, z| a.max(z.norm()))
    }

    /// `F_p ⊗ I_m`.
    pub fn kron_identity(&self, m: usize) -> DMatrix<C64> {
        let eye = DMatrix::<C64>::identity(m, m);
        self.entries.kronecker(&eye)
    }
}

/// `ω^k = e^{2πik/p}` for `k = 0..p`.
pub fn roots_of_unity(p: usize) -> Vec<C64> {
    (0..p)
        .map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / p as f64))
        .collect()
}

/// The `p` diagonal blocks of `bcirc(A)` under the unitary DFT.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBlocks {
    pub m: usize,
    pub n: usize,
    pub blocks: Vec<DMatrix<C64>>,
}

impl FourierBlocks {
    pub fn p(&self) -> usize {
        self.blocks.len()
    }

    /// Largest violation of `Â_j = conj(Â_{p-j})` and of realness of the
    /// self-conjugate blocks.
    pub fn conjugate_symmetry_deviation(&self) -> f64 {
        let p = self.p();
        let mut dev = 0.0_f64;
        for j in 0..p {
            let partner = &self.blocks[(p - j) % p];
            for (x, y) in self.blocks[j].iter().zip(partner.iter()) {
                dev = dev.max((x - y.conj()).norm());
            }
        }
        dev
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .fold(0.0_f64, |a, z| a.max(z.norm()))
    }

    /// `Diag(Â_1, …, Â_p)` as a dense `mp × np` matrix.
    pub fn block_diagonal(&self) -> DMatrix<C64> {
        let p = self.p();
        let mut out = DMatrix::zeros(self.m * p, self.n * p);
        for (j, b) in self.blocks.iter().enumerate() {
            out.view_mut((j * self.m, j * self.n), (self.m, self.n))
                .copy_from(b);
        }
        out
    }

    /// Rebuilds the full block list from the leading `⌊p/2⌋ + 1` blocks.
    pub fn from_leading(m: usize, n: usize, p: usize, leading: Vec<DMatrix<C64>>) -> Result<Self> {
        let kept = p / 2 + 1;
        if leading.len() != kept {
            return Err(Error::Dimension(format!(
                "expected {kept} leading blocks for p = {p}, found {}",
                leading.len()
            )));
        }
        let mut blocks = leading;
        for j in kept..p {
            let partner = blocks[p - j].map(|z| z.conj());
            blocks.push(partner);
        }
        Ok(Self { m, n, blocks })
    }
}

/// `Â_j = Σ_s ω^{js} A^(s)` for `j = 0..p` (direct O(p²) transform per tube).
pub fn fourier_blocks(a: &Tensor3) -> FourierBlocks {
    let p = a.p;
    let roots = roots_of_unity(p);
    let blocks = (0..p)
        .map(|j| {
            let mut block = DMatrix::<C64>::zeros(a.m, a.n);
            for (s, slice) in a.slices.iter().enumerate() {
                let w = roots[(j * s) % p];
                for (dst, &src) in block.iter_mut().zip(slice.iter()) {
                    *dst += w * src;
                }
            }
            block
        })
        .collect();
    FourierBlocks {
        m: a.m,
        n: a.n,
        blocks,
    }
}

/// The unique real tensor whose Fourier blocks are `b`.
pub fn inverse_fourier_blocks(b: &FourierBlocks) -> Result<Tensor3> {
    inverse_fourier_blocks_with_tol(b, IMAG_TOL)
}

pub fn inverse_fourier_blocks_with_tol(b: &FourierBlocks, tol: f64) -> Result<Tensor3> {
    let p = b.p();
    if p == 0 {
        return Err(Error::Dimension("no Fourier blocks".into()));
    }
    let scale = 1.0 + b.max_abs();
    let deviation = b.conjugate_symmetry_deviation();
    if deviation > tol * scale {
        return Err(Error::ConjugateSymmetry { deviation });
    }
    let roots = roots_of_unity(p);
    let inv_p = 1.0 / p as f64;
    let mut residue = 0.0_f64;
    let slices = (0..p)
        .map(|s| {
            let mut acc = DMatrix::<C64>::zeros(b.m, b.n);
            for (j, block) in b.blocks.iter().enumerate() {
                let w = roots[(p - (j * s) % p) % p];
                for (dst, &src) in acc.iter_mut().zip(block.iter()) {
                    *dst += w * src;
                }
            }
            DMatrix::from_fn(b.m, b.n, |i, j| {
                let z = acc[(i, j)] * inv_p;
                residue = residue.max(z.im.abs());
                z.re
            })
        })
        .collect();
    if residue > tol * scale {
        return Err(Error::ImaginaryResidue { residue });
    }
    Ok(Tensor3 {
        m: b.m,
        n: b.n,
        p,
        slices,
    })
}

/// Condition number above which a Fourier block is treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// T-inverse computed blockwise in the Fourier domain.
pub fn tinv(a: &Tensor3) -> Result<Tensor3> {
    if !a.is_square() {
        return Err(Error::Dimension("T-inverse needs square slices".into()));
    }
    let fb = fourier_blocks(a);
    let mut blocks = Vec::with_capacity(a.p);
    for (j, block) in fb.blocks.iter().enumerate() {
        let sv = block.clone().singular_values();
        let smax = sv.max();
        let smin = sv.min();
        let condition = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        if condition.is_nan() || condition > SINGULAR_CONDITION {
            return Err(Error::Singular {
                block: j,
                condition,
            });
        }
        let inv = block.clone().try_inverse().ok_or(Error::Singular {
            block: j,
            condition,
        })?;
        blocks.push(inv);
    }
    inverse_fourier_blocks(&FourierBlocks {
        m: a.n,
        n: a.m,
        blocks,
    })
}

fn complex_matrix_power(b: &DMatrix<C64>, k: u32) -> DMatrix<C64> {
    let mut result = DMatrix::<C64>::identity(b.nrows(), b.ncols());
    for _ in 0..k {
        result = &result * b;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    fn rel(a: &Tensor3, b: &Tensor3) -> f64 {
        (a - b).norm() / (1.0 + b.norm())
    }

    #[test]
    fn unfold_p1_is_slice() {
        let t = Tensor3::random(3, 2, 1, &mut rng());
        assert_eq!(unfold(&t), t.slice(0).clone());
    }

    #[test]
    fn unfold_identity_stacks_zeros() {
        let u = unfold(&identity(2, 3));
        let mut expected = DMatrix::zeros(6, 2);
        expected[(0, 0)] = 1.0;
        expected[(1, 1)] = 1.0;
        assert_eq!(u, expected);
    }

    #[test]
    fn unfold_matches_index_oracle() {
        let t = Tensor3::random(2, 3, 2, &mut rng());
        let u = unfold(&t);
        assert_eq!(u.shape(), (4, 3));
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..3 {
                    assert_eq!(u[(k * 2 + i, j)], t.get(i, j, k));
                }
            }
        }
    }

    #[test]
    fn fold_round_trip_and_errors() {
        let t = Tensor3::random(2, 3, 4, &mut rng());
        assert_eq!(fold(&unfold(&t), 2, 3, 4).unwrap(), t);
        let v = DMatrix::from_fn(10, 1, |i, _| i as f64);
        let f = fold(&v, 2, 1, 5).unwrap();
        assert_eq!(f.shape(), (2, 1, 5));
        assert_eq!(f.get(1, 0, 3), 7.0);
        assert!(matches!(fold(&v, 3, 1, 5), Err(Error::Dimension(_))));
    }

    #[test]
    fn bcirc_small_circulant() {
        let t = Tensor3::from_fn(1, 1, 3, |_, _, k| (k + 1) as f64);
        let expected = DMatrix::from_row_slice(3, 3, &[1., 3., 2., 2., 1., 3., 3., 2., 1.]);
        assert_eq!(bcirc(&t), expected);
        let t1 = Tensor3::random(2, 3, 1, &mut rng());
        assert_eq!(bcirc(&t1), t1.slice(0).clone());
    }

    #[test]
    fn bcirc_inv_checks_structure() {
        let t = Tensor3::random(2, 3, 3, &mut rng());
        assert_eq!(bcirc_inv(&bcirc(&t), 2, 3, 3, true).unwrap(), t);
        let bad = DMatrix::from_fn(4, 4, |i, j| (i * 4 + j) as f64);
        assert!(matches!(
            bcirc_inv(&bad, 2, 2, 2, true),
            Err(Error::NotCirculant { .. })
        ));
    }

    #[test]
    fn bcirc_inv_hessian_matrix() {
        let j = DMatrix::from_row_slice(
            4,
            4,
            &[
                2., 0., 2., 0., 0., 2., 0., 0., 2., 0., 2., 0., 0., 0., 0., 2.,
            ],
        );
        let h = bcirc_inv(&j, 2, 2, 2, true).unwrap();
        assert_eq!(
            h.slice(0),
            &DMatrix::from_row_slice(2, 2, &[2., 0., 0., 2.])
        );
        assert_eq!(
            h.slice(1),
            &DMatrix::from_row_slice(2, 2, &[2., 0., 0., 0.])
        );
    }

    #[test]
    fn tprod_matches_bcirc_path() {
        let mut r = rng();
        let a = Tensor3::random(3, 2, 4, &mut r);
        let b = Tensor3::random(2, 2, 4, &mut r);
        let fast = tprod(&a, &b).unwrap();
        let slow = tprod_via_bcirc(&a, &b).unwrap();
        assert!(rel(&fast, &slow) < 1e-12);
        assert!(tprod(&b, &a).is_err());
    }

    #[test]
    fn tprod_identity_and_p1() {
        let mut r = rng();
        let a = Tensor3::random(3, 3, 4, &mut r);
        let i = identity(3, 4);
        assert!(rel(&tprod(&i, &a).unwrap(), &a) < 1e-14);
        assert!(rel(&tprod(&a, &i).unwrap(), &a) < 1e-14);
        let x = Tensor3::random(2, 3, 1, &mut r);
        let y = Tensor3::random(3, 2, 1, &mut r);
        assert_eq!(tprod(&x, &y).unwrap().slice(0), &(x.slice(0) * y.slice(0)));
    }

    #[test]
    fn transpose_identities() {
        let mut r = rng();
        let a = Tensor3::random(2, 3, 4, &mut r);
        assert_eq!(bcirc(&a.ttranspose()), bcirc(&a).transpose());
        let s = Tensor3::random_symmetric(3, 4, &mut r);
        assert!(s.symmetry_deviation() < 1e-15);
        assert_eq!(s.ttranspose(), s);
        let m = Tensor3::random(2, 3, 1, &mut r);
        assert_eq!(m.ttranspose().slice(0), &m.slice(0).transpose());
    }

    #[test]
    fn identity_properties() {
        assert_eq!(bcirc(&identity(2, 3)), DMatrix::identity(6, 6));
        assert_eq!(identity(2, 1).slice(0), &DMatrix::identity(2, 2));
    }

    #[test]
    fn fourier_blocks_small_cases() {
        let z = fourier_blocks(&Tensor3::zeros(2, 2, 3));
        assert!(z.max_abs() == 0.0);
        let t = Tensor3::from_fn(1, 1, 3, |_, _, k| (k + 1) as f64);
        let f = fourier_blocks(&t);
        assert!((f.blocks[0][(0, 0)] - C64::new(6.0, 0.0)).norm() < 1e-14);
        let s = Tensor3::random_symmetric(2, 3, &mut rng());
        for b in &fourier_blocks(&s).blocks {
            assert!((b - b.adjoint()).camax() < 1e-14);
        }
    }

    #[test]
    fn fourier_blocks_diagonalize_bcirc() {
        let a = Tensor3::random(2, 3, 5, &mut rng());
        let f = DftMatrix::new(5);
        assert!(f.unitarity_defect() < 1e-14);
        let bc = bcirc(&a).map(|x| C64::new(x, 0.0));
        let d = f.kron_identity(2) * bc * f.kron_identity(3).adjoint();
        let blocks = fourier_blocks(&a).block_diagonal();
        assert!((d - blocks).camax() < 1e-12);
    }

    #[test]
    fn inverse_fourier_rejects_asymmetric_blocks() {
        let mut f = fourier_blocks(&Tensor3::random(2, 2, 3, &mut rng()));
        f.blocks[1][(0, 0)] += C64::new(0.5, 0.5);
        assert!(matches!(
            inverse_fourier_blocks(&f),
            Err(Error::ConjugateSymmetry { .. })
        ));
    }

    #[test]
    fn inverse_fourier_hermitian_p2_blocks() {
        let b0 = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]).map(|x| C64::new(x, 0.0));
        let b1 = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 0.0]).map(|x| C64::new(x, 0.0));
        let t = inverse_fourier_blocks(&FourierBlocks {
            m: 2,
            n: 2,
            blocks: vec![b0, b1],
        })
        .unwrap();
        assert!(t.symmetry_deviation() < 1e-15);
        assert_eq!(
            t.slice(0),
            &DMatrix::from_row_slice(2, 2, &[1.5, 0.0, 0.0, 1.5])
        );
        assert_eq!(
            t.slice(1),
            &DMatrix::from_row_slice(2, 2, &[0.5, 1.0, 1.0, 1.5])
        );
    }

    #[test]
    fn tinv_cases() {
        assert!(rel(&tinv(&identity(3, 4)).unwrap(), &identity(3, 4)) < 1e-15);
        let m = Tensor3::from_matrix(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]));
        let inv = tinv(&m).unwrap();
        assert!(
            (inv.slice(0) - DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 2.0])).amax() < 1e-14
        );
        let mut r = rng();
        let a = &Tensor3::random(3, 3, 4, &mut r) + &identity(3, 4).scaled(3.0);
        let b = tinv(&a).unwrap();
        assert!((&tprod(&a, &b).unwrap() - &identity(3, 4)).norm() < 1e-10);
        assert!((&tprod(&b, &a).unwrap() - &identity(3, 4)).norm() < 1e-10);
        assert!(matches!(
            tinv(&Tensor3::zeros(2, 2, 3)),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn inner_products() {
        let mut r = rng();
        let a = Tensor3::random(2, 3, 4, &mut r);
        let b = Tensor3::random(2, 3, 4, &mut r);
        assert!(inner(&a, &a).unwrap() > 0.0);
        assert_eq!(
            inner(&Tensor3::zeros(2, 3, 4), &Tensor3::zeros(2, 3, 4)).unwrap(),
            0.0
        );
        let lhs = 4.0 * inner(&a, &b).unwrap();
        let rhs = bcirc(&a).dot(&bcirc(&b));
        assert!((lhs - rhs).abs() < 1e-12);
        assert_eq!(inner(&identity(2, 3), &identity(2, 3)).unwrap(), 2.0);
        assert!(inner(&a, &Tensor3::zeros(3, 2, 4)).is_err());
    }

    #[test]
    fn tpow_matches_bcirc_power() {
        let a = Tensor3::random(2, 2, 3, &mut rng());
        let a3 = a.tpow(3).unwrap();
        let b = bcirc(&a);
        assert!((bcirc(&a3) - &b * &b * &b).amax() < 1e-12);
        assert!(rel(&a.tpow(0).unwrap(), &identity(2, 3)) < 1e-15);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let t = Tensor3::random(2, 3, 2, &mut rng()).scaled(1.0 / 3.0);
        let text = serde_json::to_string(&t).unwrap();
        let back: Tensor3 = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
        let bad = r#"{"m":1,"n":1,"p":2,"slices":[[[1.0]]]}"#;
        assert!(serde_json::from_str::<Tensor3>(bad).is_err());
    }
}
