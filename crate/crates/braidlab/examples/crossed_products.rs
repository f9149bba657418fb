//! Convolution algebras over three sampled group models and their fiber
//! representations on the grid.

use braidlab::algebra::{sigma_x, AlgObject};
use braidlab::crossed::{
    generator_isomorphism_residual, transform_bridge_residual, BridgeNormalization, ConvElement,
    CrossedProduct, GroupModel, GroupPoint,
};
use braidlab::grid::{self_dual_length, Grid, GridMode};
use braidlab::linalg::c64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_element(
    cp: &CrossedProduct,
    rng: &mut ChaCha8Rng,
    points: &[GroupPoint],
) -> ConvElement {
    let mut out = ConvElement::new();
    for p in points {
        out.insert_add(*p, cp.object().random_element(rng));
    }
    out
}

fn main() -> braidlab::Result<()> {
    let grid = Grid::new(64, self_dual_length(64), GridMode::Torus)?;
    let model = GroupModel::RealLine {
        step: grid.dx(),
        radius: 0.45 * grid.length(),
    };
    let cp = CrossedProduct::new(AlgObject::two_level(0.5 * grid.dp()), model.clone());

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pts = [GroupPoint::Int(-3), GroupPoint::Int(0), GroupPoint::Int(5)];
    let phi = random_element(&cp, &mut rng, &pts);
    let theta = random_element(&cp, &mut rng, &pts[..2]);

    let assoc_lhs = cp.multiply(&cp.multiply(&phi, &theta)?, &phi)?;
    let assoc_rhs = cp.multiply(&phi, &cp.multiply(&theta, &phi)?)?;
    println!("convolution associativity: {:.3e}", assoc_lhs.distance(&assoc_rhs));

    let star_lhs = cp.star(&cp.multiply(&phi, &theta)?)?;
    let star_rhs = cp.multiply(&cp.star(&theta)?, &cp.star(&phi)?)?;
    println!("(phi theta)* = theta* phi*: {:.3e}", star_lhs.distance(&star_rhs));

    let (mult, star) = cp.rep_defects(&grid, &phi, &theta)?;
    println!("fiber representation: multiplicative {mult:.3e}, star {star:.3e}");

    // group-side kernel vs momentum-side symbol, two routes to one operator
    let k = |x: f64| c64((-0.5 * x * x).exp(), 0.0);
    println!(
        "transform bridge (gaussian): {:.3e}",
        transform_bridge_residual(&grid, &model, k)?
    );
    let iso = generator_isomorphism_residual(
        &cp,
        &grid,
        &sigma_x(),
        k,
        |p| c64((-0.5 * p * p).exp(), 0.0),
        BridgeNormalization::HaarConsistent,
    )?;
    println!("generator dictionary with the closed-form transform: {iso:.3e}");
    Ok(())
}
