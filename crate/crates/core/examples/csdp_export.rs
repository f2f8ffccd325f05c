//! Exports the reduced complex block SDP of a tensor SDP as JSON, solves it
//! directly and prints the independent certification report.
//!
//! ```text
//! cargo run --release --example csdp_export -- [out.json]
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tensor_sdp::csdp::{certify, solve, CsdpProblem, Embedding, SolverOptions};
use tensor_sdp::tsdp::{reduce_to_csdp, synthetic_problem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (problem, optimum) = synthetic_problem(3, 4, 6, &mut rng)?;
    let (reduced, map) = reduce_to_csdp(&problem)?;
    let json = serde_json::to_string(&reduced)?;
    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, &json)?;
            println!("wrote {} bytes to {path}", json.len());
        }
        None => println!("reduced problem: {} bytes of JSON", json.len()),
    }
    let reloaded: CsdpProblem = serde_json::from_str(&json)?;
    println!(
        "blocks {:?}, real {:?}, kept Fourier blocks {:?}",
        reloaded.block_sizes, reloaded.is_real, map.kept_block_indices
    );
    for embedding in [Embedding::Realified, Embedding::Native] {
        let opts = SolverOptions {
            embedding,
            ..SolverOptions::default()
        };
        let sol = solve(&reloaded, &opts)?;
        let report = certify(&reloaded, &sol);
        println!(
            "{embedding:?}: {:?} after {} iterations, value {:+.10} (known {optimum:+.10})",
            sol.status, sol.iterations, report.primal_obj
        );
        println!("  {}", serde_json::to_string(&report)?);
    }
    Ok(())
}
