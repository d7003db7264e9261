//! The five-slot Laguerre chain as a Darboux transformation of scalar weights.

use mvop::darboux::{builtin_n5_laguerre, darboux_eigenvalue, darboux_verify_seq};
use mvop::diff_operators::eigen_residual;
use mvop::MVOPSequence;

fn main() -> mvop::Result<()> {
    let five = builtin_n5_laguerre::<f64>(0.5, [1.0, 1.0, 1.0, 1.0])?;
    let seq = MVOPSequence::<f64>::new(&five.spec, 10)?;
    println!("D1~ has order {}, D1 o D2 order {}", five.d1_tilde.order(), five.d.order());
    for n in [0, 3, 10] {
        let lhs = five.d1_tilde.apply(&seq.build_p(n)?)?;
        let rhs = seq.build_qt(n)?;
        println!("n={n}: |P_n D1~ - Q_n T| = {:.1e}", lhs.distance(&rhs) / rhs.max_coeff_norm());
        let lambda = darboux_eigenvalue(&seq, n)?;
        println!("  Q_n (D2 D1) = Lambda_n Q_n, residual {:.1e}", eigen_residual(&*seq.build_q(n)?, &five.d_swapped, &lambda)?);
    }
    let report = darboux_verify_seq(&seq, &five.d1, 10, 1e-10)?;
    println!("P_n D1 = A_n Q_n for n <= 10: worst {:.1e}, singular A_n at {:?}", report.worst, report.singular);
    Ok(())
}
