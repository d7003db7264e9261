//! Order-zero symmetries and explicit reductions.

use mvop::irreducibility::{all_ratios_irrational, order_zero_symmetries, try_reduce_2x2, try_reduce_3x3_w1w3};
use mvop::scalar_families::ScalarWeightSpec as S;
use mvop::weight::WeightSpec;

fn main() -> mvop::Result<()> {
    let hermite = WeightSpec::new(vec![1.0], vec![S::hermite(1.0), S::hermite(0.0)])?;
    let sp = order_zero_symmetries(&hermite, 40)?;
    println!("Hermite b=1, c=0: dimension {} ({})", sp.dimension, sp.verdict);
    println!("  non-rational ratios: {:?}", all_ratios_irrational(&hermite));

    let a = 1.5;
    let jacobi = WeightSpec::new(vec![a], vec![S::jacobi(1.5, 0.75).scaled(a * a), S::jacobi(0.5, -0.25)])?;
    if let Some(r) = try_reduce_2x2(&jacobi)? {
        println!("Jacobi pair reduces: b = {:.6}, c = {:.6}, M = {}", r.b, r.c, r.m.to_json());
        println!("  {}; off-diagonal {:.1e}", r.diagonal, r.off_diagonal);
    }
    println!("  symmetry dimension {}", order_zero_symmetries(&jacobi, 40)?.dimension);

    let three = WeightSpec::new(vec![3.0, 4.0], vec![S::laguerre(0.5), S::laguerre(1.5), S::laguerre(0.5)])?;
    let r = try_reduce_3x3_w1w3(&three)?;
    println!("3x3 with w1 = w3: {} (residual {:.1e})", r.blocks, r.residual);

    let chain = WeightSpec::new(vec![1.0; 9], (0..10).map(|k| S::laguerre(0.5 + k as f64)).collect())?;
    let sp = order_zero_symmetries(&chain, 250)?;
    println!("10x10 Laguerre chain: dimension {}, validation {:.1e}", sp.dimension, sp.validation_residual);
    Ok(())
}
