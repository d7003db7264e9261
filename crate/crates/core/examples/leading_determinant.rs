//! det K_n through the continuant of the rho_i, against a direct determinant.

use mvop::mvop::{continuant, tridiagonal_from_rhos};
use mvop::scalar::rat;
use mvop::scalar_families::ScalarWeightSpec as S;
use mvop::weight::WeightSpec;
use mvop::MVOPSequence;

fn main() -> mvop::Result<()> {
    let ones = vec![rat(1, 1); 2];
    println!("N=3, rho=(1,1): continuant {}, determinant {}", continuant(&ones), tridiagonal_from_rhos(&ones).determinant());
    let spec = WeightSpec::new(vec![1.0, 2.0, 0.5, 1.0], (0..5).map(|k| S::laguerre(0.5 + (k / 2) as f64)).collect())?;
    let seq = MVOPSequence::<f64>::new(&spec, 8)?;
    for n in [1, 4, 8] {
        let d = seq.leading_coeff_det(n)?;
        println!("n={n}: rho = {:.4?}", seq.rhos(n)?);
        println!("  continuant {:.6e}  direct {:.6e}  det K_n {:.6e}", d.det_continuant, d.det_direct, d.det_k);
    }
    Ok(())
}
