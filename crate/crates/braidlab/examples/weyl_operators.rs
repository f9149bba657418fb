//! Translations, momentum functions, and the commutation phase between
//! them on the discretized circle.

use braidlab::grid::{self_dual_length, Grid, GridMode};
use braidlab::weyl::{i1, i2, translate_op, weyl_phase_residuals, BoundedFunction};

fn main() -> braidlab::Result<()> {
    let grid = Grid::new(64, self_dual_length(64), GridMode::Torus)?;

    let t_a = translate_op(&grid, 0.7);
    let t_b = translate_op(&grid, -1.9);
    let composed = t_a.mul(&t_b);
    println!(
        "T(0.7) T(-1.9) vs T(-1.2): {:.3e}",
        composed.distance(&translate_op(&grid, -1.2))
    );

    // position characters vs momentum characters: the exchange phase is
    // exp(i r kappa) and flipping its sign must be visibly wrong
    for (kappa, shift) in [(1i64, 1i64), (3, 2)] {
        let (derived, flipped) = weyl_phase_residuals(&grid, kappa, shift);
        println!(
            "phase check kappa={kappa} shift={shift}: derived {derived:.3e}, sign-flipped {flipped:.3e}"
        );
    }

    let f = BoundedFunction::character(2.0 * grid.dp());
    let g = BoundedFunction::gaussian(0.8);
    let lhs = i1(&grid, &f.mul(&g));
    let rhs = i1(&grid, &f).mul(&i1(&grid, &g));
    println!("i1 is multiplicative: {:.3e}", lhs.distance(&rhs));

    let m = i2(&grid, &f);
    let t = translate_op(&grid, 1.3);
    println!(
        "i2(f) commutes with translations: {:.3e}",
        t.mul(&m).sub(&m.mul(&t)).op_norm()
    );
    Ok(())
}
