//! Three-term recurrence coefficients, by projection and by elimination.

use mvop::scalar_families::ScalarWeightSpec as S;
use mvop::weight::WeightSpec;
use mvop::MVOPSequence;

fn main() -> mvop::Result<()> {
    let spec = WeightSpec::new(vec![1.0], vec![S::hermite(1.0), S::hermite(0.0)])?;
    let seq = MVOPSequence::<f64>::new(&spec, 8)?;
    for n in 1..=4 {
        let p = seq.three_term_coefficients(n)?;
        let e = seq.three_term_by_elimination(n)?;
        println!("n={n}  residual {:.1e}", p.residual);
        println!("  A = {}\n  B = {}\n  C = {}", p.a.to_json(), p.b.to_json(), p.c.to_json());
        let gap = (&p.c - &e.c).max_norm().max((&p.b - &e.b).max_norm());
        println!("  projection vs elimination {gap:.1e}");
    }
    Ok(())
}
