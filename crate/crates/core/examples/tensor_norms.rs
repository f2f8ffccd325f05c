//! Spectral and nuclear norms and the largest T-eigenvalue as tensor SDPs,
//! each compared with its Fourier-domain closed form.
//!
//! ```text
//! cargo run --release --example tensor_norms
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tensor_sdp::csdp::SolverOptions;
use tensor_sdp::polyopt::{
    max_teig_oracle, min_max_teigenvalue, min_spectral_norm, nuclear_dual_certificate,
    nuclear_norm_oracle, nuclear_norm_tsdp, spectral_norm_oracle,
};
use tensor_sdp::tcore::{inner, Tensor3};

fn main() -> tensor_sdp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let opts = SolverOptions::default();
    let a = Tensor3::random(3, 4, 3, &mut rng);

    let spectral = min_spectral_norm(&a, &[], &opts)?;
    println!(
        "spectral norm {:.10}  oracle {:.10}",
        spectral.value,
        spectral_norm_oracle(&a)
    );

    let (nuc, sol) = nuclear_norm_tsdp(&a, &opts)?;
    let y = nuclear_dual_certificate(a.shape(), &sol);
    println!(
        "nuclear norm  {:.10}  oracle {:.10}",
        nuc,
        nuclear_norm_oracle(&a)
    );
    println!(
        "dual certificate: <A, Y> = {:.10}, |Y|_2 = {:.10}",
        inner(&a, &y)?,
        spectral_norm_oracle(&y)
    );

    // Least spectral norm of P0 + z P1 over a one-parameter family.
    let p1 = Tensor3::random(3, 4, 3, &mut rng);
    let fam = min_spectral_norm(&a, std::slice::from_ref(&p1), &opts)?;
    let at_z = &a + &p1.scaled(fam.z[0]);
    println!(
        "min_z |A + z P1|_2 = {:.10} at z = {:.6} (oracle at z: {:.10})",
        fam.value,
        fam.z[0],
        spectral_norm_oracle(&at_z)
    );

    let m0 = Tensor3::random_symmetric(3, 3, &mut rng);
    let m1 = Tensor3::random_symmetric(3, 3, &mut rng);
    let teig = min_max_teigenvalue(&m0, std::slice::from_ref(&m1), &opts)?;
    let at_z = &m0 + &m1.scaled(teig.z[0]);
    println!(
        "min_z lambda_max(M0 + z M1) = {:.10} at z = {:.6} (oracle at z: {:.10})",
        teig.value,
        teig.z[0],
        max_teig_oracle(&at_z)?
    );
    Ok(())
}
