//! Finite-difference T-gradients and T-Hessians, and the block-circulant test
//! that decides whether a T-Hessian exists.
//!
//! ```text
//! cargo run --example t_calculus
//! ```

use tensor_sdp::calculus::{
    convexity_certificate, default_gradient_step, t_gradient_fd, t_hessian, MvFunction, CIRC_TOL,
};
use tensor_sdp::spectral::t_eigenvalues;
use tensor_sdp::tcore::Tensor3;

fn main() -> tensor_sdp::Result<()> {
    // f(X) = (x111 + x112)^2 + x211^2 + x212^2 on 2 x 1 x 2 tensors.
    let f = MvFunction::new(2, 2, |x| {
        let (a, b) = (x.get(0, 0, 0), x.get(0, 0, 1));
        (a + b).powi(2) + x.get(1, 0, 0).powi(2) + x.get(1, 0, 1).powi(2)
    });
    let x = Tensor3::from_fn(2, 1, 2, |i, _, k| 0.5 - i as f64 + 0.25 * k as f64);
    let g = t_gradient_fd(&f, &x, default_gradient_step(&x))?;
    println!(
        "T-gradient slices: {:?}",
        g.slices()
            .iter()
            .map(|s| s.as_slice().to_vec())
            .collect::<Vec<_>>()
    );
    let h = t_hessian(&f, &x, None, CIRC_TOL)?;
    for k in 0..2 {
        println!("T-Hessian slice {k}: {:.6?}", h.slice(k).as_slice());
    }
    println!("T-eigenvalues of the T-Hessian: {:.6?}", t_eigenvalues(&h)?);
    println!(
        "convexity: {:?}",
        convexity_certificate(&f, std::slice::from_ref(&x), 1e-6)?
    );

    let witness = MvFunction::new(2, 2, |x| x.get(0, 0, 0) * x.get(1, 0, 0).powi(2));
    match t_hessian(&witness, &x, None, CIRC_TOL) {
        Ok(_) => println!("unexpected: witness accepted"),
        Err(e) => println!("x111 * x211^2: {e}"),
    }
    Ok(())
}
