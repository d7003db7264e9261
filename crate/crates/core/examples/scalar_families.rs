//! Recurrence coefficients, norms and Gauss rules of the scalar families.

use mvop::scalar_families::{gauss_rule, MonicScalarSequence, ScalarWeightSpec};

fn main() -> mvop::Result<()> {
    for w in [ScalarWeightSpec::hermite(0.5), ScalarWeightSpec::laguerre(1.5), ScalarWeightSpec::jacobi(0.5, -0.5)] {
        let seq = MonicScalarSequence::new(&w, 6)?;
        println!("{:?} on {:?}", w.family, w.support());
        println!("  b_n = {:.6?}", &seq.b_coeffs()[..5]);
        println!("  c_n = {:.6?}", &seq.c_coeffs()[1..5]);
        println!("  ||p_4||^2 = {:.6}", seq.squared_norm_log(4)?.exp());
        println!("  p_3 = {:.6?} (low to high)", seq.monic_polynomial(3)?.coeffs());
        let (x, wt) = gauss_rule(&w, 4)?;
        println!("  4-point Gauss nodes {x:.6?}\n  weights {wt:.6?}");
    }
    // a weight given only by moments: e^{-x} on (0, inf)
    let moments: Vec<f64> = (0..12).scan(1.0, |f, k| { let m = *f; *f *= (k + 1) as f64; Some(m) }).collect();
    let custom = ScalarWeightSpec::custom(moments, (0.0, f64::INFINITY));
    let seq = MonicScalarSequence::new(&custom, 4)?;
    println!("moment-defined Laguerre(0): b_n = {:.9?}", &seq.b_coeffs()[..4]);
    Ok(())
}
