//! Centered lattice discretization of the line.
//!
//! A [`Grid`] carries N position points x_j = -L/2 + j L/N and the matching
//! momentum lattice p_k = 2pi (k - N/2) / L in monotone order, so that
//! dx * dp * N = 2pi exactly. State amplitudes are stored as value samples
//! scaled by sqrt(dx); with that convention the plain Euclidean pairing
//! equals the Riemann approximation of the L^2 inner product, and the
//! Fourier matrix F[k,j] = exp(-i p_k x_j)/sqrt(N) is exactly unitary while
//! still mapping value samples to value samples (now scaled by sqrt(dp)).
//!
//! On the centered lattice F is symmetric and F^4 is exactly the identity;
//! both facts are pinned by tests rather than assumed.

use crate::linalg::{self, c64, CMat, CVec, C64, IM, ONE, ZERO};
use crate::{Error, Result};

/// How the finite window is interpreted: as a genuine N-point torus, or as
/// a truncation of the line whose edge effects must stay below tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    Torus,
    WindowedLine,
}

impl GridMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "torus" => Ok(GridMode::Torus),
            "windowed-line" | "windowed_line" | "windowedline" => Ok(GridMode::WindowedLine),
            other => Err(Error::parse(format!(
                "unknown grid mode '{other}' (expected torus | windowed-line)"
            ))),
        }
    }
}

impl std::fmt::Display for GridMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GridMode::Torus => write!(f, "torus"),
            GridMode::WindowedLine => write!(f, "windowed-line"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Grid {
    n: usize,
    length: f64,
    mode: GridMode,
    dx: f64,
    dp: f64,
    positions: Vec<f64>,
    momenta: Vec<f64>,
}

impl Grid {
    pub fn new(n: usize, length: f64, mode: GridMode) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::invalid(format!(
                "grid size must be even and at least 2, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid(format!(
                "grid length must be positive and finite, got {length}"
            )));
        }
        let dx = length / n as f64;
        let dp = 2.0 * std::f64::consts::PI / length;
        let positions = (0..n).map(|j| -length / 2.0 + j as f64 * dx).collect();
        let momenta = (0..n)
            .map(|k| (k as f64 - n as f64 / 2.0) * dp)
            .collect();
        Ok(Grid {
            n,
            length,
            mode,
            dx,
            dp,
            positions,
            momenta,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dp(&self) -> f64 {
        self.dp
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn position(&self, j: usize) -> f64 {
        self.positions[j]
    }

    pub fn momentum(&self, k: usize) -> f64 {
        self.momenta[k]
    }

    /// Index of monotone momentum slot k in FFT-natural frequency order
    /// (0, 1, ..., N/2-1, -N/2, ..., -1).
    pub fn fft_index(&self, k: usize) -> usize {
        (k + self.n / 2) % self.n
    }

    /// True when t is an integer multiple of the position step.
    pub fn on_position_lattice(&self, t: f64) -> bool {
        let q = t / self.dx;
        (q - q.round()).abs() <= 1e-9 * (1.0 + q.abs())
    }

    /// True when kappa is an integer multiple of the momentum step.
    pub fn on_momentum_lattice(&self, kappa: f64) -> bool {
        let q = kappa / self.dp;
        (q - q.round()).abs() <= 1e-9 * (1.0 + q.abs())
    }
}

/// Wave function on a grid; amplitudes are value samples times sqrt(dx).
#[derive(Debug, Clone)]
pub struct State {
    amp: CVec,
}

impl State {
    pub fn from_position_fn(grid: &Grid, f: impl Fn(f64) -> C64) -> Self {
        let w = grid.dx().sqrt();
        State {
            amp: CVec::from_fn(grid.n(), |j, _| f(grid.position(j)) * c64(w, 0.0)),
        }
    }

    pub fn from_amplitudes(grid: &Grid, amp: CVec) -> Result<Self> {
        if amp.len() != grid.n() {
            return Err(Error::invalid(format!(
                "amplitude length {} does not match grid size {}",
                amp.len(),
                grid.n()
            )));
        }
        Ok(State { amp })
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amp
    }

    /// Function values on the position lattice.
    pub fn position_values(&self, grid: &Grid) -> Vec<C64> {
        let w = grid.dx().sqrt();
        self.amp.iter().map(|a| a / c64(w, 0.0)).collect()
    }

    /// Function values on the momentum lattice; meaningful after the state
    /// has been mapped by [`fourier_map`].
    pub fn momentum_values(&self, grid: &Grid) -> Vec<C64> {
        let w = grid.dp().sqrt();
        self.amp.iter().map(|a| a / c64(w, 0.0)).collect()
    }

    pub fn inner(&self, other: &State) -> C64 {
        self.amp.dotc(&other.amp)
    }

    pub fn norm(&self) -> f64 {
        self.amp.norm()
    }

    pub fn normalized(&self) -> State {
        let n = self.norm();
        State {
            amp: &self.amp / c64(n.max(f64::MIN_POSITIVE), 0.0),
        }
    }

    /// Probability mass on the `count` outermost sites at each window edge.
    pub fn edge_mass(&self, count: usize) -> f64 {
        let n = self.amp.len();
        let count = count.min(n / 2);
        let mut m = 0.0;
        for j in 0..count {
            m += self.amp[j].norm_sqr() + self.amp[n - 1 - j].norm_sqr();
        }
        m
    }
}

/// Dense operator acting on grid states.
#[derive(Debug, Clone)]
pub struct GridOperator {
    mat: CMat,
}

impl GridOperator {
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::invalid(format!(
                "grid operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(GridOperator { mat })
    }

    pub fn identity(n: usize) -> Self {
        GridOperator {
            mat: linalg::ident(n),
        }
    }

    pub fn from_diagonal(values: &[C64]) -> Self {
        let n = values.len();
        GridOperator {
            mat: CMat::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO }),
        }
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn into_mat(self) -> CMat {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn apply(&self, state: &State) -> State {
        State {
            amp: linalg::matvec(&self.mat, &state.amp),
        }
    }

    pub fn mul(&self, other: &GridOperator) -> GridOperator {
        GridOperator {
            mat: linalg::matmul(&self.mat, &other.mat),
        }
    }

    pub fn add(&self, other: &GridOperator) -> GridOperator {
        GridOperator {
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &GridOperator) -> GridOperator {
        GridOperator {
            mat: &self.mat - &other.mat,
        }
    }

    pub fn scale(&self, z: C64) -> GridOperator {
        GridOperator {
            mat: self.mat.map(|w| w * z),
        }
    }

    pub fn adjoint(&self) -> GridOperator {
        GridOperator {
            mat: self.mat.adjoint(),
        }
    }

    pub fn op_norm(&self) -> f64 {
        linalg::spectral_norm(&self.mat)
    }

    /// Operator-norm distance of A*A from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let aa = linalg::matmul(&self.mat.adjoint(), &self.mat);
        linalg::spectral_norm(&(&aa - linalg::ident(n)))
    }

    /// ||self - other|| in operator norm.
    pub fn distance(&self, other: &GridOperator) -> f64 {
        linalg::spectral_norm(&(&self.mat - &other.mat))
    }

    /// Matrix element <phi, A psi> in the weighted pairing.
    pub fn matrix_element(&self, phi: &State, psi: &State) -> C64 {
        phi.amplitudes().dotc(&linalg::matvec(&self.mat, psi.amplitudes()))
    }
}

/// Unitary Fourier matrix F[k,j] = exp(-i p_k x_j) / sqrt(N), mapping
/// position amplitudes to momentum amplitudes on the monotone lattice.
pub fn fourier_map(grid: &Grid) -> GridOperator {
    let n = grid.n();
    let scale = 1.0 / (n as f64).sqrt();
    let mat = CMat::from_fn(n, n, |k, j| {
        let phase = -grid.momentum(k) * grid.position(j);
        c64(phase.cos(), phase.sin()) * c64(scale, 0.0)
    });
    GridOperator { mat }
}

/// Largest Hermite index the window and sampling rate can represent with a
/// comfortable margin (classical turning point at least 3 units inside both
/// the position window and the momentum window).
pub fn hermite_capacity(grid: &Grid) -> usize {
    let x_half = grid.length() / 2.0;
    let p_half = std::f64::consts::PI / grid.dx();
    let reach = x_half.min(p_half) - 3.0;
    if reach <= 1.0 {
        return 0;
    }
    ((reach * reach - 1.0) / 2.0).floor() as usize
}

/// Normalized Hermite function sampled on the grid.
pub fn hermite_state(grid: &Grid, k: usize) -> Result<State> {
    let cap = hermite_capacity(grid);
    if k > cap {
        return Err(Error::invalid(format!(
            "hermite index {k} exceeds grid capacity {cap} (n={}, length={})",
            grid.n(),
            grid.length()
        )));
    }
    let norm0 = std::f64::consts::PI.powf(-0.25);
    Ok(State::from_position_fn(grid, |x| {
        let mut hk = norm0 * (-x * x / 2.0).exp();
        if k == 0 {
            return c64(hk, 0.0);
        }
        let mut hk1 = std::f64::consts::SQRT_2 * x * hk;
        if k == 1 {
            return c64(hk1, 0.0);
        }
        for m in 2..=k {
            let next = (2.0 / m as f64).sqrt() * x * hk1 - ((m - 1) as f64 / m as f64).sqrt() * hk;
            hk = hk1;
            hk1 = next;
        }
        c64(hk1, 0.0)
    }))
}

/// Multiplication by the coordinate, diag(x_j).
pub fn position_operator(grid: &Grid) -> GridOperator {
    GridOperator::from_diagonal(
        &grid
            .positions()
            .iter()
            .map(|&x| c64(x, 0.0))
            .collect::<Vec<_>>(),
    )
}

/// Window length making the position and momentum lattices coincide
/// (dx = dp), which is when sampled Hermite functions are eigenvectors of
/// the Fourier map.
pub fn self_dual_length(n: usize) -> f64 {
    (2.0 * std::f64::consts::PI * n as f64).sqrt()
}

/// The parity permutation j -> (N - j) mod N; equals F^2 exactly.
pub fn parity_operator(grid: &Grid) -> GridOperator {
    let n = grid.n();
    GridOperator {
        mat: CMat::from_fn(n, n, |l, j| if l == (n - j) % n { ONE } else { ZERO }),
    }
}

/// i^(-k) eigenvalue of the Fourier map on the k-th Hermite function.
pub fn hermite_eigenvalue(k: usize) -> C64 {
    match k % 4 {
        0 => ONE,
        1 => -IM,
        2 => -ONE,
        _ => IM,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lattice_values_small_grid() {
        let g = Grid::new(4, 4.0, GridMode::Torus).unwrap();
        assert_eq!(g.positions(), &[-2.0, -1.0, 0.0, 1.0]);
        let pi = std::f64::consts::PI;
        let want = [-pi, -pi / 2.0, 0.0, pi / 2.0];
        for (have, want) in g.momenta().iter().zip(want) {
            assert_abs_diff_eq!(have, &want, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(g.dx() * g.dp() * g.n() as f64, 2.0 * pi, epsilon = 1e-14);
    }

    #[test]
    fn lattice_values_two_points() {
        let g = Grid::new(2, 2.0 * std::f64::consts::PI, GridMode::Torus).unwrap();
        assert_abs_diff_eq!(g.momentum(0), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.momentum(1), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.position(0), -std::f64::consts::PI, epsilon = 1e-15);
    }

    #[test]
    fn fft_index_round_trip() {
        let g = Grid::new(8, 5.0, GridMode::Torus).unwrap();
        // slot of p=0 is N/2 in monotone order, 0 in FFT order
        assert_eq!(g.fft_index(4), 0);
        assert_eq!(g.fft_index(0), 4);
        let mut seen = vec![false; 8];
        for k in 0..8 {
            seen[g.fft_index(k)] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn rejects_odd_or_empty() {
        assert!(Grid::new(5, 1.0, GridMode::Torus).is_err());
        assert!(Grid::new(0, 1.0, GridMode::Torus).is_err());
        assert!(Grid::new(8, -1.0, GridMode::Torus).is_err());
    }

    #[test]
    fn fourier_is_unitary_and_symmetric() {
        let g = Grid::new(16, 10.0, GridMode::Torus).unwrap();
        let f = fourier_map(&g);
        assert!(f.unitarity_defect() < 1e-13);
        let asym = max_abs(&(f.mat().transpose() - f.mat()));
        assert!(asym < 1e-13);
    }

    #[test]
    fn fourier_squares_to_parity() {
        let g = Grid::new(12, 7.5, GridMode::Torus).unwrap();
        let f = fourier_map(&g);
        let f2 = f.mul(&f);
        assert!(f2.distance(&parity_operator(&g)) < 1e-12);
        let f4 = f2.mul(&f2);
        assert!(f4.distance(&GridOperator::identity(12)) < 1e-12);
    }

    #[test]
    fn gaussian_is_a_fixed_point() {
        let g = Grid::new(256, 40.0, GridMode::WindowedLine).unwrap();
        let f = fourier_map(&g);
        let psi = State::from_position_fn(&g, |x| c64((-x * x / 2.0).exp(), 0.0));
        let phi = f.apply(&psi);
        let values = phi.momentum_values(&g);
        let mut worst = 0.0f64;
        for (k, v) in values.iter().enumerate() {
            let p = g.momentum(k);
            let want = (-p * p / 2.0).exp();
            worst = worst.max((v - c64(want, 0.0)).norm());
        }
        assert!(worst < 1e-8, "gaussian fixed point defect {worst}");
    }

    #[test]
    fn hermite_states_are_orthonormal_eigenvectors() {
        // eigenvector property needs the self-dual window, dx = dp
        let g = Grid::new(256, self_dual_length(256), GridMode::WindowedLine).unwrap();
        let f = fourier_map(&g);
        let states: Vec<State> = (0..=10).map(|k| hermite_state(&g, k).unwrap()).collect();
        for (i, si) in states.iter().enumerate() {
            for (j, sj) in states.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (si.inner(sj) - c64(want, 0.0)).norm() < 1e-10,
                    "hermite pairing ({i},{j})"
                );
            }
        }
        for (k, s) in states.iter().enumerate() {
            let mapped = f.apply(s);
            let expect = hermite_eigenvalue(k);
            let diff: f64 = (0..g.n())
                .map(|j| (mapped.amplitudes()[j] - expect * s.amplitudes()[j]).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-8, "hermite {k} eigenvalue defect {diff}");
        }
    }

    #[test]
    fn hermite_capacity_guards_window() {
        let g = Grid::new(16, 10.0, GridMode::Torus).unwrap();
        assert!(hermite_state(&g, 40).is_err());
        let big = Grid::new(256, 40.0, GridMode::WindowedLine).unwrap();
        assert!(hermite_capacity(&big) >= 100);
    }

    #[test]
    fn inner_product_matches_riemann_sum() {
        let g = Grid::new(128, 30.0, GridMode::WindowedLine).unwrap();
        let f1 = State::from_position_fn(&g, |x| c64((-x * x / 2.0).exp(), 0.0));
        let f2 = State::from_position_fn(&g, |x| c64(x * (-x * x / 2.0).exp(), 0.0));
        // odd integrand pairs to zero; gaussian pairs to sqrt(pi)
        assert!(f1.inner(&f2).norm() < 1e-12);
        assert_abs_diff_eq!(
            f1.inner(&f1).re,
            std::f64::consts::PI.sqrt(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn edge_mass_sees_tails() {
        let g = Grid::new(64, 12.0, GridMode::WindowedLine).unwrap();
        let tight = State::from_position_fn(&g, |x| c64((-x * x).exp(), 0.0));
        assert!(tight.edge_mass(4) < 1e-20);
        let wide = State::from_position_fn(&g, |_x| ONE);
        assert!(wide.edge_mass(4) > 0.1);
    }
}
