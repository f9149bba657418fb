//! Position and momentum embeddings of bounded functions.
//!
//! A bounded function f acts on grid states in two ways: `i1(f)` multiplies
//! pointwise in position (a diagonal matrix), and `i2(f)` multiplies
//! pointwise in momentum, which in position space is the circulant with
//! symbol f on the momentum lattice. Building i2 directly from its symbol
//! keeps every construction at O(N^2); a test pins it against honest
//! conjugation by the Fourier matrix.
//!
//! On the lattice the two embeddings satisfy the exact Weyl relation
//! i1(e_k) T_r = e^{-i k r} T_r i1(e_k) whenever k is a momentum-lattice
//! point and r a position-lattice point (both phases then wrap coherently
//! around the window).

use std::sync::Arc;

use crate::grid::{fourier_map, Grid, GridOperator};
use crate::linalg::{c64, CMat, C64, IM, ZERO};
use crate::{Error, Result};

type RealFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;
type ComplexFn = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

/// Bounded function on the line, with an optional entire extension used by
/// quadratures that shift arguments off the real axis.
#[derive(Clone)]
pub struct BoundedFunction {
    f: RealFn,
    fc: Option<ComplexFn>,
    sup: Option<f64>,
}

impl std::fmt::Debug for BoundedFunction {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("BoundedFunction")
            .field("sup", &self.sup)
            .field("entire", &self.fc.is_some())
            .finish()
    }
}

impl BoundedFunction {
    pub fn new(f: impl Fn(f64) -> C64 + Send + Sync + 'static, sup: Option<f64>) -> Self {
        BoundedFunction {
            f: Arc::new(f),
            fc: None,
            sup,
        }
    }

    /// Function with an entire extension: `fc` restricted to the real axis
    /// must agree with `f`.
    pub fn entire(fc: impl Fn(C64) -> C64 + Send + Sync + 'static, sup: Option<f64>) -> Self {
        let fc: ComplexFn = Arc::new(fc);
        let on_axis = fc.clone();
        BoundedFunction {
            f: Arc::new(move |x| on_axis(c64(x, 0.0))),
            fc: Some(fc),
            sup,
        }
    }

    pub fn constant(z: C64) -> Self {
        BoundedFunction::entire(move |_| z, Some(z.norm()))
    }

    /// x -> exp(i freq x)
    pub fn character(freq: f64) -> Self {
        BoundedFunction::entire(move |z| (IM * c64(freq, 0.0) * z).exp(), Some(1.0))
    }

    /// x -> exp(-alpha x^2), alpha > 0
    pub fn gaussian(alpha: f64) -> Self {
        BoundedFunction::entire(move |z| (-c64(alpha, 0.0) * z * z).exp(), Some(1.0))
    }

    pub fn eval(&self, x: f64) -> C64 {
        (self.f)(x)
    }

    pub fn eval_complex(&self, z: C64) -> Result<C64> {
        match &self.fc {
            Some(fc) => Ok(fc(z)),
            None if z.im == 0.0 => Ok((self.f)(z.re)),
            None => Err(Error::unsupported(
                "function has no entire extension; use a real-node quadrature",
            )),
        }
    }

    pub fn is_entire(&self) -> bool {
        self.fc.is_some()
    }

    pub fn sup_bound(&self) -> Option<f64> {
        self.sup
    }

    /// T_r f = f(. + r)
    pub fn translate(&self, r: f64) -> Self {
        let f = self.f.clone();
        let fc = self.fc.clone().map(|g| {
            let g: ComplexFn = Arc::new(move |z: C64| g(z + c64(r, 0.0)));
            g
        });
        BoundedFunction {
            f: Arc::new(move |x| f(x + r)),
            fc,
            sup: self.sup,
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        let f = self.f.clone();
        let fc = self.fc.clone().map(|g| {
            let g: ComplexFn = Arc::new(move |w: C64| g(w) * z);
            g
        });
        BoundedFunction {
            f: Arc::new(move |x| f(x) * z),
            fc,
            sup: self.sup.map(|s| s * z.norm()),
        }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &BoundedFunction) -> Self {
        let (f, g) = (self.f.clone(), other.f.clone());
        let fc = match (self.fc.clone(), other.fc.clone()) {
            (Some(a), Some(b)) => {
                let h: ComplexFn = Arc::new(move |z: C64| a(z) * b(z));
                Some(h)
            }
            _ => None,
        };
        BoundedFunction {
            f: Arc::new(move |x| f(x) * g(x)),
            fc,
            sup: match (self.sup, other.sup) {
                (Some(a), Some(b)) => Some(a * b),
                _ => None,
            },
        }
    }

    /// x -> sum_i w_i f(x + r_i); the form every kernel smoothing takes.
    pub fn weighted_translate_sum(&self, nodes: &[(f64, f64)]) -> Self {
        let f = self.f.clone();
        let nodes_owned: Vec<(f64, f64)> = nodes.to_vec();
        let fc = self.fc.clone().map(|g| {
            let nodes_c = nodes_owned.clone();
            let h: ComplexFn = Arc::new(move |z: C64| {
                nodes_c
                    .iter()
                    .map(|&(r, w)| g(z + c64(r, 0.0)) * c64(w, 0.0))
                    .sum()
            });
            h
        });
        let nodes_r = nodes_owned.clone();
        BoundedFunction {
            f: Arc::new(move |x| {
                nodes_r
                    .iter()
                    .map(|&(r, w)| f(x + r) * c64(w, 0.0))
                    .sum()
            }),
            fc,
            sup: self
                .sup
                .map(|s| s * nodes_owned.iter().map(|&(_, w)| w.abs()).sum::<f64>()),
        }
    }
}

/// Position embedding: multiplication by f on the position lattice.
pub fn i1(grid: &Grid, f: &BoundedFunction) -> GridOperator {
    let values: Vec<C64> = grid.positions().iter().map(|&x| f.eval(x)).collect();
    GridOperator::from_diagonal(&values)
}

/// Factory for momentum-symbol circulants on one grid. Precomputes the
/// phase table so each build is a plain O(N^2) accumulation; use it
/// whenever many circulants are needed on the same grid.
pub struct CirculantBuilder {
    n: usize,
    /// phases[d * n + m] = exp(i p_m d dx) / N
    phases: Vec<C64>,
}

impl CirculantBuilder {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.n();
        let inv_n = 1.0 / n as f64;
        let mut phases = Vec::with_capacity(n * n);
        for d in 0..n {
            for m in 0..n {
                let ph = grid.momentum(m) * d as f64 * grid.dx();
                phases.push(c64(ph.cos(), ph.sin()) * c64(inv_n, 0.0));
            }
        }
        CirculantBuilder { n, phases }
    }

    /// First column of the circulant: rho(d) = (1/N) sum_m s_m e^{i p_m d dx}.
    pub fn rho(&self, symbol: &[C64]) -> Vec<C64> {
        let n = self.n;
        assert_eq!(symbol.len(), n, "circulant symbol length mismatch");
        let mut rho = vec![ZERO; n];
        for (d, slot) in rho.iter_mut().enumerate() {
            let row = &self.phases[d * n..(d + 1) * n];
            let mut acc = ZERO;
            for (m, &s) in symbol.iter().enumerate() {
                acc += s * row[m];
            }
            *slot = acc;
        }
        rho
    }

    pub fn build_matrix(&self, symbol: &[C64]) -> CMat {
        let n = self.n;
        let rho = self.rho(symbol);
        CMat::from_fn(n, n, |j, jp| rho[(j + n - jp) % n])
    }

    pub fn build(&self, symbol: &[C64]) -> GridOperator {
        GridOperator::new(self.build_matrix(symbol)).expect("square by construction")
    }
}

/// Circulant with the given momentum-lattice symbol (monotone order).
pub fn i2_symbol(grid: &Grid, symbol: &[C64]) -> GridOperator {
    CirculantBuilder::new(grid).build(symbol)
}

/// Momentum embedding: multiplication by f on the momentum lattice,
/// expressed in position space.
pub fn i2(grid: &Grid, f: &BoundedFunction) -> GridOperator {
    let symbol: Vec<C64> = grid.momenta().iter().map(|&p| f.eval(p)).collect();
    i2_symbol(grid, &symbol)
}

/// Reference construction of i2 by explicit Fourier conjugation; used to
/// pin the circulant fast path in tests.
pub fn i2_by_conjugation(grid: &Grid, f: &BoundedFunction) -> GridOperator {
    let fm = fourier_map(grid);
    let diag =
        GridOperator::from_diagonal(&grid.momenta().iter().map(|&p| f.eval(p)).collect::<Vec<_>>());
    fm.adjoint().mul(&diag).mul(&fm)
}

/// Translation by r: (T_r psi)(x) = psi(x + r), periodized by the window.
pub fn translate_op(grid: &Grid, r: f64) -> GridOperator {
    translate_op_complex(grid, c64(r, 0.0))
}

/// Translation analytically continued to complex shift.
pub fn translate_op_complex(grid: &Grid, r: C64) -> GridOperator {
    let symbol: Vec<C64> = grid
        .momenta()
        .iter()
        .map(|&p| (IM * r * c64(p, 0.0)).exp())
        .collect();
    i2_symbol(grid, &symbol)
}

/// Exact cyclic shift by an integer number of lattice steps.
pub fn lattice_shift(grid: &Grid, steps: i64) -> GridOperator {
    let n = grid.n() as i64;
    let m = steps.rem_euclid(n) as usize;
    let n = grid.n();
    let mat = CMat::from_fn(n, n, |j, jp| {
        if jp == (j + m) % n {
            crate::linalg::ONE
        } else {
            ZERO
        }
    });
    GridOperator::new(mat).expect("square by construction")
}

/// Multiplication by the position character exp(i kappa x).
pub fn position_phase(grid: &Grid, kappa: f64) -> GridOperator {
    i1(grid, &BoundedFunction::character(kappa))
}

/// Residuals of D T = phase * T D for D = diag(e^{i kappa x}) and T the
/// translation, with kappa and the shift both on their lattices. Returns
/// the residual for the derived phase e^{-i kappa r} and for the flipped
/// sign; the first must vanish, the second is pinned away from zero by a
/// test so the sign convention cannot silently regress.
pub fn weyl_phase_residuals(grid: &Grid, kappa_steps: i64, shift_steps: i64) -> (f64, f64) {
    let kappa = kappa_steps as f64 * grid.dp();
    let r = shift_steps as f64 * grid.dx();
    let d = position_phase(grid, kappa);
    let t = translate_op(grid, r);
    let dt = d.mul(&t);
    let td = t.mul(&d);
    let phase = (-IM * c64(kappa * r, 0.0)).exp();
    let derived = dt.sub(&td.scale(phase)).op_norm();
    let flipped = dt.sub(&td.scale(phase.conj())).op_norm();
    (derived, flipped)
}
