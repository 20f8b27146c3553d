//! Steane code states: stabilizer generators, logical basis states, and the
//! fidelity of a noisy copy of `|0bar>`.

use cstomo::codes::{code_projector, fidelity, logical_state, steane_generators, LogicalLabel};
use cstomo::linalg::HermitianMatrix;
use num_complex::Complex64;

fn main() -> cstomo::Result<()> {
    let gens = steane_generators();
    for g in &gens {
        println!("{}", g.label());
    }
    let p = code_projector(&gens);
    println!("code space dimension {:.1}", p.trace().re);

    let zero = logical_state(LogicalLabel::Zero)?;
    let nonzero = zero.vector.iter().filter(|z| z.norm() > 1e-12).count();
    println!("|0bar> has {nonzero} nonzero amplitudes of {:.4}", zero.vector[0].re);

    let plus = logical_state(LogicalLabel::Plus)?;
    println!("<0bar|plus><plus|0bar> = {:.4}", fidelity(&zero.vector, &plus.density_matrix())?);

    // depolarized copy: (1 - p) |0bar><0bar| + p I/128
    let pdep = 0.1;
    let noisy = HermitianMatrix::symmetrized(
        zero.density_matrix().as_matrix() * Complex64::new(1.0 - pdep, 0.0)
            + HermitianMatrix::maximally_mixed(128).as_matrix() * Complex64::new(pdep, 0.0),
    );
    println!("fidelity of the depolarized copy {:.5}", fidelity(&zero.vector, &noisy)?);
    Ok(())
}
