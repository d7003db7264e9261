//! The same construction over the rationals: every identity holds exactly.

use mvop::scalar_families::ScalarWeightSpec as S;
use mvop::weight::WeightSpec;
use mvop::MVOPSequence;
use num_rational::BigRational;

fn main() -> mvop::Result<()> {
    let spec = WeightSpec::new(vec![1.0], vec![S::hermite(0.0), S::hermite(0.0)])?;
    let seq = MVOPSequence::<BigRational>::new(&spec, 6)?;
    for n in 0..3 {
        let q = seq.build_q(n)?;
        println!("Q_{n}:");
        for (k, c) in q.coeffs().iter().enumerate() {
            println!("  x^{k}: {}", c.to_json());
        }
    }
    // norms come in units of the mass of w_1
    println!("||Q_2||^2 / mu_0 = {}", seq.squared_norm_q(2)?.to_json());
    println!("<Q_2, Q_4> = {}", seq.gram(2, 4)?.to_json());
    let t = seq.three_term_coefficients(1)?;
    println!("A_1 = {}  B_1 = {}  C_1 = {}", t.a.to_json(), t.b.to_json(), t.c.to_json());
    Ok(())
}
