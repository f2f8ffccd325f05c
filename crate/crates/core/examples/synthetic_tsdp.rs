//! Solving random tensor SDPs with known optimal values through the
//! Fourier-block reduction, then certifying the returned point.
//!
//! ```text
//! cargo run --release --example synthetic_tsdp -- [instances]
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tensor_sdp::csdp::SolverOptions;
use tensor_sdp::tsdp::{check_complementarity, reduce_to_csdp, solve_tsdp, synthetic_problem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let instances: usize = std::env::args()
        .nth(1)
        .map(|a| a.parse())
        .transpose()?
        .unwrap_or(5);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = SolverOptions::default();
    for i in 0..instances {
        let (n, p, m) = (3, 2 + i % 4, 4 + i);
        let (problem, optimum) = synthetic_problem(n, p, m, &mut rng)?;
        let (reduced, map) = reduce_to_csdp(&problem)?;
        let sol = solve_tsdp(&problem, &opts)?;
        println!(
            "n={n} p={p} m={m}: blocks {:?} weights {:?} | value {:+.10} (known {:+.10}) {:?} in {} iterations, <X,S> = {:.1e}, certified {}",
            reduced.block_sizes,
            map.weights,
            sol.primal_obj,
            optimum,
            sol.status,
            sol.iterations,
            check_complementarity(&sol)?,
            sol.is_certified(1e-7)
        );
    }
    Ok(())
}
