//! Equal Hermite weights: D = D1 D2 on the diagonal side, D2 D1 for W.

use mvop::darboux::hermite_a_factorization;
use mvop::scalar_families::ScalarWeightSpec as S;
use mvop::weight::WeightSpec;
use mvop::MVOPSequence;
use num_rational::BigRational;

fn main() -> mvop::Result<()> {
    let spec = WeightSpec::new(vec![1.0, 2.0], vec![S::hermite(0.0); 3])?;
    let f = hermite_a_factorization::<BigRational>(&spec)?;
    println!("D1 D2 == D: {}", f.d1.compose(&f.d2)? == f.d);
    println!("D2 D1 == D_swapped: {}", f.d2.compose(&f.d1)? == f.d_swapped);
    let seq = MVOPSequence::<BigRational>::new(&spec, 10)?;
    let all = (0..=10).all(|n| f.d1.apply(&seq.build_p(n).unwrap()).unwrap() == *seq.build_q(n).unwrap());
    println!("h_n D1 == Q_n for n <= 10: {all}");
    for j in 0..=2 {
        println!("D_swapped d^{j}: {}", f.d_swapped.coeff(j).to_json());
    }
    Ok(())
}
