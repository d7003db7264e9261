//! Laguerre ladder operators and shift operators composed from them.

use mvop::darboux::{ladder, synthesize_shift, LadderKind};
use mvop::Poly;
use num_rational::BigRational;

fn main() -> mvop::Result<()> {
    let alpha = 0.5;
    for kind in [LadderKind::AlphaUp, LadderKind::AlphaDown, LadderKind::NUp, LadderKind::NDown, LadderKind::Eigen] {
        let l = ladder::<BigRational>(kind, alpha)?;
        println!("{kind:?}: (dn, dalpha) = {:?}, factor at n=3: {}", l.delta(), l.factor(3));
    }
    let one = Poly::constant(BigRational::from_integer(1.into()));
    for (k, m) in [(1, 1), (2, -1), (-1, 2)] {
        let s = synthesize_shift::<BigRational>(alpha + 1.0, k, m, &one, &one)?;
        let factor: Vec<String> = s.total_factor.coeffs().iter().map(|c| c.to_string()).collect();
        println!("k={k}, m={m}: steps {:?}, factor in n {factor:?}, exact up to n=8: {}", s.steps, s.first_failure(8)?.is_none());
    }
    Ok(())
}
