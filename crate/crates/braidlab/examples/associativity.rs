//! The shear unitary that reassociates nested two-leg products, checked
//! first on Weyl generators and then on three matrix legs.

use braidlab::algebra::{sigma_x, sigma_y, AlgObject};
use braidlab::associator::{shear_coproduct_residuals, shear_weyl_residuals, Associator, ShearUnitary};
use braidlab::grid::{self_dual_length, Grid, GridMode};
use braidlab::linalg;
use braidlab::weyl::BoundedFunction;

fn main() -> braidlab::Result<()> {
    let grid = Grid::new(32, self_dual_length(32), GridMode::Torus)?;

    let w = ShearUnitary::new(&grid)?;
    let m = w.matrix();
    let unit = linalg::max_abs(&(linalg::matmul(&m, &m.adjoint()) - linalg::ident(m.nrows())));
    println!("shear unitary: ||W W* - I||_max = {unit:.3e}");

    let weyl = shear_weyl_residuals(&grid)?;
    println!("exponentiated relations: {:.3e} {:.3e} {:.3e}", weyl[0], weyl[1], weyl[2]);

    let f = BoundedFunction::character(grid.dp());
    let lines = shear_coproduct_residuals(&grid, &f)?;
    println!("coproduct exchange on the fundamental character: {:.3e} {:.3e} {:.3e}",
        lines[0], lines[1], lines[2]);

    // three two-level legs; nesting the product either way must agree
    let small = Grid::new(16, self_dual_length(16), GridMode::Torus)?;
    let dp = small.dp();
    let assoc = Associator::new(
        AlgObject::two_level(dp),
        AlgObject::two_level(dp),
        AlgObject::two_level(dp),
        small,
    )?;
    let probes = [sigma_x(), sigma_y()];
    let nested = assoc.associativity_residuals(&probes, &probes, &probes)?;
    println!(
        "nested products on three legs: {:.3e} {:.3e} {:.3e}",
        nested[0], nested[1], nested[2]
    );
    Ok(())
}
