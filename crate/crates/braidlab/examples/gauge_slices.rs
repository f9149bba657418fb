//! Gauge twists act pointwise on the function leg. On lattice points of
//! the dual circle the twisted product matches an evaluation slice; off
//! the lattice it visibly tears.

use braidlab::algebra::AlgObject;
use braidlab::algebra::{sigma_x, sigma_z};
use braidlab::braided::{gauge_slice_residual, BraidedPair, LegFunction};
use braidlab::crossed::{gauge_twist_residual, ConvElement, CrossedProduct, GroupModel, GroupPoint};
use braidlab::grid::{self_dual_length, Grid, GridMode};
use braidlab::linalg::c64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn main() -> braidlab::Result<()> {
    let grid = Grid::new(64, self_dual_length(64), GridMode::Torus)?;
    let dp = grid.dp();

    let model = GroupModel::LatticeZ {
        spacing: 4.0 * grid.dx(),
        count: 4,
    };
    let cp = CrossedProduct::new(AlgObject::two_level(0.5 * dp), model);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut phi = ConvElement::new();
    for p in [GroupPoint::Int(-1), GroupPoint::Int(0), GroupPoint::Int(2)] {
        phi.insert_add(p, cp.object().random_element(&mut rng));
    }
    for t in [dp, 5.0 * dp, 0.37 * dp] {
        let r = gauge_twist_residual(&cp, &grid, &phi, t)?;
        println!("rep-level twist at t = {:.4}: {r:.3e}", t);
    }

    // braided side: a circle-algebra leg sliced at dual lattice points
    let period = grid.length() / 4.0;
    let pair = BraidedPair::new(
        AlgObject::two_level(0.5 * dp),
        AlgObject::circle(period, 10)?,
        grid,
    )?;
    let a = sigma_x() + sigma_z() * c64(0.0, 0.4);
    let w = 2.0 * PI / period;
    let f = move |x: f64| {
        c64(0.5, 0.0) + c64(0.0, w * x).exp() * c64(0.8, 0.0)
            + c64(0.0, -2.0 * w * x).exp() * c64(0.0, 0.3)
    };
    let leg = LegFunction::Circle(&f);
    for t in [0.0, 3.0 * dp, 0.37 * dp] {
        let r = gauge_slice_residual(&pair, &a, &leg, t)?;
        println!("braided slice at t = {:.4}: {r:.3e}", t);
    }
    Ok(())
}
