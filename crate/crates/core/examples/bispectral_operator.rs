//! Second-order operators with Q_n as eigenfunctions, and their eigenvalues.

use mvop::diff_operators::{build_bispectral_operator, eigencheck};
use mvop::scalar_families::ScalarWeightSpec as S;
use mvop::weight::WeightSpec;
use mvop::MVOPSequence;

fn main() -> mvop::Result<()> {
    let specs = [
        ("Laguerre", WeightSpec::new(vec![2.0], vec![S::laguerre(0.0), S::laguerre(0.5)])?),
        ("Hermite", WeightSpec::new(vec![1.0], vec![S::hermite(1.0), S::hermite(0.0)])?),
        ("Jacobi 3x3", WeightSpec::new(vec![1.0, 1.0], vec![S::jacobi(0.5, 0.5), S::jacobi(0.5, -0.5), S::jacobi(0.5, 0.5)])?),
        ("Hermite-Laguerre", WeightSpec::new(vec![1.0], vec![S::hermite(0.0), S::laguerre(0.5)])?),
    ];
    for (name, spec) in specs {
        let (d, lambda) = build_bispectral_operator::<f64>(&spec)?;
        println!("{name}: D =");
        for j in (0..=d.order()).rev() {
            println!("  d^{j}: {}", d.coeff(j).to_json());
        }
        println!("  Lambda_3 = {}", lambda.at::<f64>(3).to_json());
        let seq = MVOPSequence::<f64>::new(&spec, 15)?;
        let r = eigencheck(&seq, &d, &lambda, 15, 1e-9)?;
        println!("  worst residual for n <= 15: {:.2e}", r.worst);
    }
    // Jacobi parameters off the constraint have no such operator
    let bad = WeightSpec::new(vec![1.0], vec![S::jacobi(0.5, 0.5), S::jacobi(0.5, 0.5)])?;
    println!("unconstrained Jacobi: {}", build_bispectral_operator::<f64>(&bad).unwrap_err());
    Ok(())
}
