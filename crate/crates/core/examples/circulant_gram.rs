//! A polynomial whose classical Gram relaxation has a 5-block circulant optimal
//! solution, so the tensor relaxation with p = 5 loses nothing.
//!
//! ```text
//! cargo run --release --example circulant_gram
//! ```

use nalgebra::DMatrix;
use tensor_sdp::csdp::SolverOptions;
use tensor_sdp::polyopt::{check_gram_certificate, is_block_circulant, sos_report, Polynomial};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/example1.poly");
    let f = Polynomial::parse(&std::fs::read_to_string(path)?)?;

    // Nonzero only between the odd-position monomials x1, x1^2, x2^2, x1^2 x2, x2^3,
    // where it is the symmetric circulant with first row (3, 2, 1, 1, 2).
    let row = [3.0, 2.0, 1.0, 1.0, 2.0];
    let gram = DMatrix::from_fn(10, 10, |r, c| {
        if r % 2 == 1 && c % 2 == 1 {
            row[(c / 2 + 5 - r / 2) % 5]
        } else {
            0.0
        }
    });
    let cert = check_gram_certificate(&f, &gram)?;
    let circ = is_block_circulant(&gram, 5, 1e-12)?;
    println!("explicit Gram matrix: {cert:?}");
    println!(
        "  5-block circulant: {} (deviation {:.1e})",
        circ.is_circulant, circ.deviation
    );

    let opts = SolverOptions::default();
    let r1 = sos_report(&f, 1, &opts)?;
    let r5 = sos_report(&f, 5, &opts)?;
    println!(
        "p = 1 bound {:+.3e}, p = 5 bound {:+.3e}, difference {:.1e}",
        r1.bound,
        r5.bound,
        (r1.bound - r5.bound).abs()
    );

    let lifted = r5.gram_matrix();
    let lifted_cert = check_gram_certificate(&f, &lifted)?;
    let lifted_circ = is_block_circulant(&lifted, 5, 1e-9)?;
    println!(
        "bcirc of the p = 5 solution: residual {:.1e}, min eigenvalue {:.1e}, circulant deviation {:.1e}",
        lifted_cert.max_residual, lifted_cert.min_eigenvalue, lifted_circ.deviation
    );
    let ipm = is_block_circulant(&r1.gram_matrix(), 5, 1e-6)?;
    println!(
        "interior-point p = 1 solution: circulant deviation {:.3} (an analytic-center point of a larger optimal face)",
        ipm.deviation
    );
    Ok(())
}
