//! Builds Q_n for the 2x2 Laguerre weight and prints a few of its pieces.

use mvop::scalar_families::ScalarWeightSpec as S;
use mvop::weight::WeightSpec;
use mvop::MVOPSequence;

fn main() -> mvop::Result<()> {
    let spec = WeightSpec::new(vec![2.0], vec![S::laguerre(0.0), S::laguerre(0.5)])?;
    println!("W(1.5) = {}", spec.eval(1.5)?.to_json());
    let seq = MVOPSequence::<f64>::new(&spec, 10)?;
    let q2 = seq.build_q(2)?;
    println!("Q_2 has degree {}", q2.degree());
    for (k, c) in q2.coeffs().iter().enumerate() {
        println!("  x^{k}: {}", c.to_json());
    }
    println!("leading coefficient K_5 = {}", seq.leading_coeff(5)?.to_json());
    println!("||Q_5||^2 = {}", seq.squared_norm_q(5)?.to_json());
    println!("Q_3 as CSV (one row per power):\n{}", seq.build_q(3)?.to_csv());
    Ok(())
}
