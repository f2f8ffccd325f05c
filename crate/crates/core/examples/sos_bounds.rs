//! Sum-of-squares lower bounds for the bundled polynomials.
//!
//! ```text
//! cargo run --release --example sos_bounds -- data/example1.poly 1 5
//! ```

use tensor_sdp::csdp::SolverOptions;
use tensor_sdp::polyopt::{is_block_circulant, sos_report, Polynomial};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/example1.poly").to_string());
    let ps: Vec<usize> = args.map(|a| a.parse()).collect::<Result<_, _>>()?;
    let ps = if ps.is_empty() { vec![1, 5] } else { ps };
    let f = Polynomial::parse(&std::fs::read_to_string(&path)?)?;
    println!(
        "{path}: {} variables, degree {}, {} terms",
        f.n,
        f.degree(),
        f.num_terms()
    );
    let opts = SolverOptions {
        verbose: std::env::var_os("TSDP_VERBOSE").is_some(),
        ..SolverOptions::default()
    };
    for p in ps {
        let r = sos_report(&f, p, &opts)?;
        println!(
            "p = {p:3}  (blk, N, m) = ({}, {}, {})  bound = {:+.10e}  status = {:?}  iters = {}  build {:.3}s  solve {:.3}s",
            r.blocks, r.block_size, r.constraints, r.bound, r.status, r.solution.iterations, r.time_build, r.time_solve
        );
        if p == 1 && r.basis_size % 5 == 0 {
            let check = is_block_circulant(&r.gram_matrix(), 5, 1e-6)?;
            println!(
                "        Gram matrix 5-block circulant: {} (deviation {:.3e})",
                check.is_circulant, check.deviation
            );
        }
    }
    Ok(())
}
