//! Tensor SDP relaxation of max <X, A * X> over sign vectors, against exhaustive search.
//!
//! ```text
//! cargo run --release --example integer_quartic -- [n]
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tensor_sdp::csdp::SolverOptions;
use tensor_sdp::polyopt::{integer_quartic_oracle, integer_quartic_relaxation};
use tensor_sdp::tcore::Tensor3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let max_n: usize = std::env::args()
        .nth(1)
        .map(|a| a.parse())
        .transpose()?
        .unwrap_or(8);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..=max_n {
        let a = Tensor3::random_symmetric(n, n, &mut rng);
        let (bound, sol) = integer_quartic_relaxation(&a, &SolverOptions::default())?;
        let best = integer_quartic_oracle(&a)?;
        println!(
            "n = {n}: relaxation {bound:+.6}  exhaustive {best:+.6}  ratio {:.3}  ({:?})",
            bound / best,
            sol.status
        );
    }
    Ok(())
}
