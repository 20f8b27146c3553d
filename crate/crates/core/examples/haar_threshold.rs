//! Monte Carlo moments of `|<e_1|U|e_1>|^2` over Haar unitaries next to the
//! overlap threshold `e_d` they produce.
//!
//!     cargo run --release --example haar_threshold -- 20000

use cstomo::linalg::haar_unitary;
use cstomo::rng::rng_from_seed;
use cstomo::selection::haar_threshold;

fn main() -> cstomo::Result<()> {
    let samples: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let mut rng = rng_from_seed(1);
    println!("{:>4} {:>10} {:>10} {:>10} {:>10} {:>10}", "d", "E x", "1/d", "E x^2", "2/d(d+1)", "e_d");
    for d in [2usize, 4, 8, 16] {
        let (mut m1, mut m2) = (0.0, 0.0);
        for _ in 0..samples {
            let x = haar_unitary(d, &mut rng)?[(0, 0)].norm_sqr();
            m1 += x;
            m2 += x * x;
        }
        let n = samples as f64;
        println!(
            "{d:>4} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            m1 / n,
            1.0 / d as f64,
            m2 / n,
            2.0 / (d * (d + 1)) as f64,
            haar_threshold(d)
        );
    }
    for d in [32, 64, 128] {
        println!("e_{d} = {:.6}", haar_threshold(d));
    }
    Ok(())
}
