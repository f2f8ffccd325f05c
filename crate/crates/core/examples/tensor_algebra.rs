//! T-product basics: block-circulant unfolding, the Fourier-domain view and inverses.
//!
//! ```text
//! cargo run --example tensor_algebra
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tensor_sdp::tcore::{
    bcirc, fourier_blocks, identity, inner, inverse_fourier_blocks, tinv, tprod, Tensor3,
};

fn main() -> tensor_sdp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = Tensor3::random(3, 2, 4, &mut rng);
    let b = Tensor3::random(2, 3, 4, &mut rng);
    let ab = tprod(&a, &b)?;
    println!(
        "A is {:?}, B is {:?}, A * B is {:?}",
        a.shape(),
        b.shape(),
        ab.shape()
    );

    let lhs = bcirc(&ab);
    let rhs = bcirc(&a) * bcirc(&b);
    println!(
        "|bcirc(A*B) - bcirc(A) bcirc(B)| = {:.2e}",
        (lhs - rhs).norm()
    );

    let transposed = (&ab.ttranspose() - &tprod(&b.ttranspose(), &a.ttranspose())?).norm();
    println!("|(A*B)^T - B^T * A^T|          = {transposed:.2e}");

    let blocks = fourier_blocks(&a);
    println!(
        "Fourier blocks: {} of size {}x{}, conjugate-symmetry defect {:.2e}",
        blocks.p(),
        blocks.m,
        blocks.n,
        blocks.conjugate_symmetry_deviation()
    );
    let back = inverse_fourier_blocks(&blocks)?;
    println!(
        "round trip error                = {:.2e}",
        (&back - &a).norm()
    );

    let c = &Tensor3::random(3, 3, 4, &mut rng) + &identity(3, 4).scaled(3.0);
    let c_inv = tinv(&c)?;
    let defect = (&tprod(&c, &c_inv)? - &identity(3, 4)).norm();
    println!("|C * C^-1 - I|                  = {defect:.2e}");
    println!(
        "<A, A> = {:.6} = |A|^2 = {:.6}",
        inner(&a, &a)?,
        a.norm().powi(2)
    );
    Ok(())
}
