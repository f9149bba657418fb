//! Discretized line: position/momentum lattices, the Fourier unitary,
//! and the Hermite functions it fixes up to fourth roots of unity.

use braidlab::grid::{
    fourier_map, hermite_eigenvalue, hermite_state, self_dual_length, Grid, GridMode, State,
};
use braidlab::linalg::c64;
use std::f64::consts::PI;

fn main() -> braidlab::Result<()> {
    let n = 128;
    let grid = Grid::new(n, self_dual_length(n), GridMode::Torus)?;
    println!(
        "grid: {} points, window {:.4}, dx = {:.6}, dp = {:.6}",
        grid.n(),
        grid.length(),
        grid.dx(),
        grid.dp()
    );
    println!(
        "step product dx*dp*n - 2pi = {:.3e}",
        grid.dx() * grid.dp() * n as f64 - 2.0 * PI
    );

    let f = fourier_map(&grid);
    println!("fourier unitarity defect: {:.3e}", f.unitarity_defect());

    // The standard Gaussian is its own transform.
    let psi = State::from_position_fn(&grid, |x| c64((-x * x / 2.0).exp(), 0.0));
    let phi = f.apply(&psi);
    let mut worst = 0.0f64;
    for (k, v) in phi.momentum_values(&grid).iter().enumerate() {
        let p = grid.momentum(k);
        worst = worst.max((v - c64((-p * p / 2.0).exp(), 0.0)).norm());
    }
    println!("gaussian fixed point, worst pointwise gap: {worst:.3e}");

    // Hermite functions pick up powers of -i.
    for k in 0..4 {
        let h = hermite_state(&grid, k)?;
        let image = f.apply(&h);
        let gap = (image.amplitudes() - h.amplitudes() * hermite_eigenvalue(k)).norm();
        println!(
            "hermite k={k}: ||F h - (-i)^{k} h|| = {gap:.3e}"
        );
    }
    Ok(())
}
