//! T-eigenvalues, T-positive semidefiniteness, roots and Schur complements.
//!
//! ```text
//! cargo run --example spectral_analysis
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tensor_sdp::spectral::{
    block_symmetric_tensor, is_t_psd, min_eigen_direction, spectral_report, t_eig, t_root,
    t_schur_complement, PsdTolerance,
};
use tensor_sdp::tcore::{identity, tprod, Tensor3};

fn main() -> tensor_sdp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = Tensor3::random(3, 3, 3, &mut rng);
    let a = tprod(&g.ttranspose(), &g)?.symmetrized();
    let report = spectral_report(&a, PsdTolerance::default())?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );

    let d = t_eig(&a)?;
    println!(
        "eigendecomposition residual {:.2e}",
        (&d.reconstruct()? - &a).norm() / a.norm()
    );
    let r = t_root(&a, 2)?;
    println!(
        "square root residual        {:.2e}",
        (&tprod(&r, &r)? - &a).norm() / a.norm()
    );

    let b = Tensor3::random(3, 2, 3, &mut rng);
    let c = &Tensor3::random_symmetric(2, 3, &mut rng) + &identity(2, 3).scaled(10.0);
    let a_pd = &a + &identity(3, 3);
    let whole = block_symmetric_tensor(&a_pd, &b, &c)?;
    let schur = t_schur_complement(&a_pd, &b, &c)?;
    println!(
        "[[A, B], [B^T, C]] T-PSD: {}, Schur complement T-PSD: {}",
        is_t_psd(&whole, PsdTolerance::default())?,
        is_t_psd(&schur, PsdTolerance::default())?
    );

    let indefinite = &a - &identity(3, 3).scaled(report.lambda_max);
    let (lambda, y) = min_eigen_direction(&indefinite)?;
    println!(
        "shifted tensor: min T-eigenvalue {lambda:.4}, witness direction of shape {:?}",
        y.shape()
    );
    Ok(())
}
