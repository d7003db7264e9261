//! Orthogonality and norm checks for several families up to degree 15.

use mvop::scalar_families::ScalarWeightSpec as S;
use mvop::weight::WeightSpec;
use mvop::MVOPSequence;

fn main() -> mvop::Result<()> {
    let specs = [
        ("Laguerre", WeightSpec::new(vec![2.0], vec![S::laguerre(0.0), S::laguerre(0.5)])?),
        ("Hermite", WeightSpec::new(vec![1.0], vec![S::hermite(1.0), S::hermite(0.0)])?),
        ("Gegenbauer", WeightSpec::new(vec![1.0], vec![S::jacobi(1.5, 1.5), S::jacobi(0.5, 0.5)])?),
        ("Hermite-Laguerre", WeightSpec::new(vec![1.0], vec![S::hermite(0.0), S::laguerre(0.5)])?),
        ("mixed 4x4", WeightSpec::new(vec![1.0, -0.5, 2.0], vec![S::jacobi(0.5, 0.0), S::jacobi(0.0, 0.25), S::jacobi(1.0, 1.0), S::jacobi(-0.5, -0.5)])?),
    ];
    for (name, spec) in specs {
        let seq = MVOPSequence::<f64>::new(&spec, 15)?;
        let orth = seq.verify_orthogonality(15, 1e-9)?;
        let norms = seq.norm_residuals(15)?;
        let worst_norm = norms.iter().cloned().fold(0.0, f64::max);
        println!("{name:<17} off-diagonal {:.2e}  norms {worst_norm:.2e}  pass {}", orth.worst_scaled(), orth.pass);
    }
    Ok(())
}
