//! Braided tensor product of two algebra objects over a shared grid.
//!
//! The carrier is the three-leg space A (x) B (x) K where K is the grid
//! leg, indexed row-major as `(i_a * dim_b + i_b) * n + k`. The left
//! factor embeds by `j1`, acting on (A, K) through the dynamics evaluated
//! at grid positions; the right factor embeds by `j2`, acting on (B, K)
//! as a matrix-valued circulant whose symbol is the dynamics evaluated at
//! grid momenta. Products j1(a) j2(b) span the braided product; the
//! exchange identity moves a j2 past a j1 at the cost of a Gaussian
//! kernel average.

use crate::algebra::AlgObject;
use crate::gauss::{group_by_t, BraidKernel, QuadratureSpec};
use crate::grid::{Grid, GridOperator};
use crate::linalg::{self, c64, CMat, CVec, C64};
use crate::weyl::{self, CirculantBuilder};
use crate::{Error, Result};

/// Two algebra objects tied to one grid. Construction checks that both
/// dynamics are representable on the grid (torus mode constrains Bohr
/// frequencies to the momentum lattice).
#[derive(Debug, Clone)]
pub struct BraidedPair {
    obj_a: AlgObject,
    obj_b: AlgObject,
    grid: Grid,
}

impl BraidedPair {
    pub fn new(obj_a: AlgObject, obj_b: AlgObject, grid: Grid) -> Result<Self> {
        obj_a.torus_compatibility(&grid)?;
        obj_b.torus_compatibility(&grid)?;
        Ok(Self { obj_a, obj_b, grid })
    }

    pub fn object_a(&self) -> &AlgObject {
        &self.obj_a
    }

    pub fn object_b(&self) -> &AlgObject {
        &self.obj_b
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// (dim A, dim B, grid points).
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.obj_a.dim(), self.obj_b.dim(), self.grid.n())
    }

    pub fn total_dim(&self) -> usize {
        let (da, db, n) = self.dims();
        da * db * n
    }

    fn check_element(&self, obj: &AlgObject, m: &CMat, leg: &str) -> Result<()> {
        if m.nrows() != obj.dim() || m.ncols() != obj.dim() {
            return Err(Error::invalid(format!(
                "{} element is {}x{}, object dimension is {}",
                leg,
                m.nrows(),
                m.ncols(),
                obj.dim()
            )));
        }
        Ok(())
    }

    /// Grid-indexed blocks of j1(a): block k is alpha_{x_k}(a) (x) I_B.
    pub fn j1_blocks(&self, a: &CMat) -> Result<Vec<CMat>> {
        self.check_element(&self.obj_a, a, "left")?;
        let (_, db, n) = self.dims();
        let eye_b = linalg::ident(db);
        let mut blocks = Vec::with_capacity(n);
        for k in 0..n {
            let ak = self.obj_a.act(self.grid.position(k), a);
            blocks.push(linalg::kron(&ak, &eye_b));
        }
        Ok(blocks)
    }

    /// Left embedding, dense. Diagonal in the grid leg.
    pub fn j1(&self, a: &CMat) -> Result<CMat> {
        Ok(self.expand_grid_blocks(&self.j1_blocks(a)?))
    }

    /// Right embedding, dense. A circulant in the grid leg with
    /// matrix-valued symbol m -> alpha_{p_m}(b), tensored with I_A.
    pub fn j2(&self, b: &CMat) -> Result<CMat> {
        self.check_element(&self.obj_b, b, "right")?;
        let db = self.obj_b.dim();
        let symbols: Vec<CMat> = self
            .grid
            .momenta()
            .iter()
            .map(|&p| self.obj_b.act(p, b))
            .collect();
        self.j2_from_symbols(db, &symbols)
    }

    fn j2_from_symbols(&self, db: usize, symbols: &[CMat]) -> Result<CMat> {
        let (da, _, n) = self.dims();
        let builder = CirculantBuilder::new(&self.grid);
        // rho[beta][beta'] is the length-n convolution profile of that entry.
        let mut profiles = vec![vec![Vec::new(); db]; db];
        let mut entry = vec![C64::ZERO; n];
        for beta in 0..db {
            for bp in 0..db {
                for (m, s) in symbols.iter().enumerate() {
                    entry[m] = s[(beta, bp)];
                }
                profiles[beta][bp] = builder.rho(&entry);
            }
        }
        let dim = self.total_dim();
        let mut out = CMat::zeros(dim, dim);
        for ia in 0..da {
            for beta in 0..db {
                for bp in 0..db {
                    let rho = &profiles[beta][bp];
                    for k in 0..n {
                        let row = (ia * db + beta) * n + k;
                        for kp in 0..n {
                            let col = (ia * db + bp) * n + kp;
                            out[(row, col)] = rho[(n + k - kp) % n];
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Sum of j1(a_k) j2(b_k) over the given simple tensors.
    pub fn j_map(&self, pairs: &[(CMat, CMat)]) -> Result<CMat> {
        let dim = self.total_dim();
        let mut acc = CMat::zeros(dim, dim);
        for (a, b) in pairs {
            let blocks = self.j1_blocks(a)?;
            let right = self.j2(b)?;
            acc += self.mul_blockdiag_left(&blocks, &right);
        }
        Ok(acc)
    }

    /// Expand grid-diagonal blocks into the dense three-leg matrix.
    pub fn expand_grid_blocks(&self, blocks: &[CMat]) -> CMat {
        let (da, db, n) = self.dims();
        let small = da * db;
        let dim = self.total_dim();
        let mut out = CMat::zeros(dim, dim);
        for (k, blk) in blocks.iter().enumerate() {
            for r in 0..small {
                for c in 0..small {
                    out[(r * n + k, c * n + k)] = blk[(r, c)];
                }
            }
        }
        out
    }

    /// blockdiag(blocks) * x without materializing the left factor.
    pub fn mul_blockdiag_left(&self, blocks: &[CMat], x: &CMat) -> CMat {
        let (da, db, n) = self.dims();
        let small = da * db;
        let dim = self.total_dim();
        let mut out = CMat::zeros(dim, dim);
        for col in 0..dim {
            for k in 0..n {
                let blk = &blocks[k];
                for r in 0..small {
                    let mut acc = C64::ZERO;
                    for c in 0..small {
                        acc += blk[(r, c)] * x[(c * n + k, col)];
                    }
                    out[(r * n + k, col)] = acc;
                }
            }
        }
        out
    }

    /// x * blockdiag(blocks) without materializing the right factor.
    pub fn mul_blockdiag_right(&self, x: &CMat, blocks: &[CMat]) -> CMat {
        let (da, db, n) = self.dims();
        let small = da * db;
        let dim = self.total_dim();
        let mut out = CMat::zeros(dim, dim);
        for row in 0..dim {
            for k in 0..n {
                let blk = &blocks[k];
                for c in 0..small {
                    let mut acc = C64::ZERO;
                    for r in 0..small {
                        acc += x[(row, r * n + k)] * blk[(r, c)];
                    }
                    out[(row, c * n + k)] = acc;
                }
            }
        }
        out
    }

    /// Implementing unitary of the diagonal flow: I_A (x) u_B(t) (x) T_t.
    pub fn product_unitary(&self, t: f64) -> Result<CMat> {
        let (da, _, _) = self.dims();
        let ub = self.obj_b.unitary(t);
        let tt = weyl::translate_op(&self.grid, t);
        Ok(linalg::kron(&linalg::ident(da), &linalg::kron(&ub, tt.mat())))
    }

    /// Conjugation by the product unitary.
    pub fn product_action(&self, t: f64, x: &CMat) -> Result<CMat> {
        let v = self.product_unitary(t)?;
        let vx = linalg::matmul(&v, x);
        Ok(linalg::matmul(&vx, &v.adjoint()))
    }

    /// Residuals of the covariance contract at time t:
    /// conjugating j1(a) gives j1 of the flowed element, and likewise for
    /// j2(b). Exact (up to roundoff) for matrix objects when t is a
    /// position-lattice point; the j2 half is exact for every t.
    pub fn covariance_residuals(&self, t: f64, a: &CMat, b: &CMat) -> Result<(f64, f64)> {
        let v = self.product_unitary(t)?;
        let vh = v.adjoint();
        let conj = |x: &CMat| linalg::matmul(&linalg::matmul(&v, x), &vh);
        let lhs1 = conj(&self.j1(a)?);
        let rhs1 = self.j1(&self.obj_a.act(t, a))?;
        let lhs2 = conj(&self.j2(b)?);
        let rhs2 = self.j2(&self.obj_b.act(t, b))?;
        Ok((
            linalg::spectral_norm(&(lhs1 - rhs1)),
            linalg::spectral_norm(&(lhs2 - rhs2)),
        ))
    }
}

/// Kernel-weighted sum of j1/j2 products: for quadrature nodes (r, t, w)
/// of the order-n braid kernel, accumulates j1(sum_r w fa(r)) * j2(fb(t))
/// over groups of nodes sharing t. fa and fb receive complex arguments on
/// Gauss-Hermite contours, real ones on trapezoid grids.
pub fn kernel_weighted_sum<FA, FB>(
    pair: &BraidedPair,
    n: f64,
    spec: &QuadratureSpec,
    mut fa: FA,
    mut fb: FB,
) -> Result<CMat>
where
    FA: FnMut(C64) -> Result<CMat>,
    FB: FnMut(C64) -> Result<CMat>,
{
    let kernel = BraidKernel::new(n)?;
    let nodes = kernel.nodes(spec)?;
    let groups = group_by_t(&nodes);
    let da = pair.obj_a.dim();
    let dim = pair.total_dim();
    let mut acc = CMat::zeros(dim, dim);
    for (t, rws) in groups {
        let mut a_bar = CMat::zeros(da, da);
        for (r, w) in rws {
            a_bar += fa(r)? * w;
        }
        let blocks = pair.j1_blocks(&a_bar)?;
        let right = pair.j2(&fb(t)?)?;
        acc += pair.mul_blockdiag_left(&blocks, &right);
    }
    Ok(acc)
}

/// Residuals of the element-level exchange identity: j2(b_n) j1(a_n)
/// equals the kernel average of j1(alpha_r a) j2(alpha_t b).
///
/// Discretization contract: the identity is lattice-exact (residual at
/// quadrature level) when the left object's Bohr frequencies lie on the
/// momentum lattice and the right object's on the position lattice. On a
/// self-dual torus (length sqrt(2 pi n)) the lattices coincide and one
/// condition covers both; on incommensurate windows the wrapped entries
/// of the j2 circulant leave an O(1) floor that no quadrature removes.
#[derive(Debug, Clone)]
pub struct ExchangeElementsCheck {
    pub lhs_norm: f64,
    pub residual_abs: f64,
    pub residual_rel: f64,
}

pub fn exchange_elements_check(
    pair: &BraidedPair,
    a: &CMat,
    b: &CMat,
    n: f64,
    spec: &QuadratureSpec,
) -> Result<ExchangeElementsCheck> {
    let a_n = crate::algebra::smooth_element(&pair.obj_a, a, n, spec)?;
    let b_n = crate::algebra::smooth_element(&pair.obj_b, b, n, spec)?;
    let left = pair.j2(&b_n)?;
    let lhs = pair.mul_blockdiag_right(&left, &pair.j1_blocks(&a_n)?);
    let rhs = kernel_weighted_sum(
        pair,
        n,
        spec,
        |r| Ok(pair.obj_a.act_complex(r, a)),
        |t| Ok(pair.obj_b.act_complex(t, b)),
    )?;
    let lhs_norm = linalg::spectral_norm(&lhs);
    let residual_abs = linalg::spectral_norm(&(lhs - rhs));
    let residual_rel = if lhs_norm > 0.0 {
        residual_abs / lhs_norm
    } else {
        residual_abs
    };
    Ok(ExchangeElementsCheck {
        lhs_norm,
        residual_abs,
        residual_rel,
    })
}

/// Residual of the product-of-generators identity: with X = j1(a) j2(b_n)
/// and Y = j1(c_n) j2(d), the product X Y equals the kernel average of
/// j1(a alpha_r(c)) j2(alpha_t(b) d).
pub fn product_form_residual(
    pair: &BraidedPair,
    a: &CMat,
    b: &CMat,
    c: &CMat,
    d: &CMat,
    n: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let b_n = crate::algebra::smooth_element(&pair.obj_b, b, n, spec)?;
    let c_n = crate::algebra::smooth_element(&pair.obj_a, c, n, spec)?;
    let x = pair.mul_blockdiag_left(&pair.j1_blocks(a)?, &pair.j2(&b_n)?);
    let y = pair.mul_blockdiag_left(&pair.j1_blocks(&c_n)?, &pair.j2(d)?);
    let lhs = linalg::matmul(&x, &y);
    let rhs = kernel_weighted_sum(
        pair,
        n,
        spec,
        |r| Ok(linalg::matmul(a, &pair.obj_a.act_complex(r, c))),
        |t| Ok(linalg::matmul(&pair.obj_b.act_complex(t, b), d)),
    )?;
    let lhs_norm = linalg::spectral_norm(&lhs);
    let abs = linalg::spectral_norm(&(lhs - rhs));
    let rel = if lhs_norm > 0.0 { abs / lhs_norm } else { abs };
    Ok((abs, rel))
}

fn same_grid(a: &Grid, b: &Grid) -> bool {
    a.n() == b.n() && (a.length() - b.length()).abs() < 1e-12 && a.mode() == b.mode()
}

/// Functoriality defect of the braided product on a pair of equivariant
/// maps phi: A -> A' and psi: B -> B'. The generator correspondence
/// j1(a) j2(b) -> j1'(phi a) j2'(psi b) is applied to products that stay
/// in generator form through the exchange kernel:
///
///   X = j1(a) j2(b_n),  Y = j1(c_n) j2(d)
///   image(X Y) = kernel average of j1'(phi(a alpha_r c)) j2'(psi(alpha_t(b) d))
///   image(X) image(Y) = product of the mapped generators
///
/// and the returned value is the worst spectral-norm gap over the probe
/// tuples (a, b, c, d). For equivariant *-homomorphisms the gap sits at
/// quadrature level; non-equivariant maps are rejected up front, since
/// smoothing only commutes with maps that intertwine the actions.
pub fn map_product<FA, FB>(
    phi: FA,
    psi: FB,
    pair: &BraidedPair,
    pair_p: &BraidedPair,
    probes: &[(CMat, CMat, CMat, CMat)],
    n: f64,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    FA: Fn(&CMat) -> CMat,
    FB: Fn(&CMat) -> CMat,
{
    if !same_grid(pair.grid(), pair_p.grid()) {
        return Err(Error::invalid(
            "the generator correspondence needs both pairs on the same grid",
        ));
    }
    let ts = [0.29, 1.13, pair.grid().dx()];
    let mut left_probes = Vec::new();
    let mut right_probes = Vec::new();
    for (a, b, c, d) in probes {
        left_probes.push(a.clone());
        left_probes.push(c.clone());
        right_probes.push(b.clone());
        right_probes.push(d.clone());
    }
    let eq_a =
        crate::algebra::equivariance_residual(&pair.obj_a, &pair_p.obj_a, &phi, &ts, &left_probes);
    if eq_a > 1e-8 {
        return Err(Error::invalid(format!(
            "left map is not equivariant: intertwining residual {eq_a:.3e}"
        )));
    }
    let eq_b = crate::algebra::equivariance_residual(
        &pair.obj_b,
        &pair_p.obj_b,
        &psi,
        &ts,
        &right_probes,
    );
    if eq_b > 1e-8 {
        return Err(Error::invalid(format!(
            "right map is not equivariant: intertwining residual {eq_b:.3e}"
        )));
    }

    let mut worst = 0.0f64;
    for (a, b, c, d) in probes {
        let b_n = crate::algebra::smooth_element(&pair.obj_b, b, n, spec)?;
        let c_n = crate::algebra::smooth_element(&pair.obj_a, c, n, spec)?;
        let ix = pair_p.mul_blockdiag_left(&pair_p.j1_blocks(&phi(a))?, &pair_p.j2(&psi(&b_n))?);
        let iy = pair_p.mul_blockdiag_left(&pair_p.j1_blocks(&phi(&c_n))?, &pair_p.j2(&psi(d))?);
        let direct = linalg::matmul(&ix, &iy);
        let mapped = kernel_weighted_sum(
            pair_p,
            n,
            spec,
            |r| Ok(phi(&linalg::matmul(a, &pair.obj_a.act_complex(r, c)))),
            |t| Ok(psi(&linalg::matmul(&pair.obj_b.act_complex(t, b), d))),
        )?;
        worst = worst.max(linalg::spectral_norm(&(mapped - direct)));
    }
    Ok(worst)
}

/// Scalar function handed to the slice operations: sampled on the B leg
/// for the braided side and evaluated at shifted grid momenta for the
/// symbol side. The variant must match the pair's right object.
pub enum LegFunction<'a> {
    /// One angle argument, periodic with the circle period.
    Circle(&'a dyn Fn(f64) -> C64),
    /// Two angle arguments, periodic in each torus period.
    Torus(&'a dyn Fn(f64, f64) -> C64),
}

impl LegFunction<'_> {
    /// Diagonal of samples on the B leg, after a spot periodicity check.
    fn sample_diag(&self, obj_b: &AlgObject) -> Result<CMat> {
        match (self, obj_b) {
            (LegFunction::Circle(f), AlgObject::Circle { period, samples }) => {
                for probe in [0.0, 0.37 * period] {
                    if (f(probe) - f(probe + period)).norm() > 1e-9 {
                        return Err(Error::invalid("leg function is not period-periodic"));
                    }
                }
                let m = *samples;
                let vals: Vec<C64> = (0..m).map(|s| f(s as f64 * period / m as f64)).collect();
                Ok(CMat::from_fn(m, m, |i, j| {
                    if i == j {
                        vals[i]
                    } else {
                        C64::ZERO
                    }
                }))
            }
            (LegFunction::Torus(f), AlgObject::TwoTorus { periods, samples }) => {
                for probe in [0.0, 0.29] {
                    if (f(probe, probe) - f(probe + periods[0], probe)).norm() > 1e-9
                        || (f(probe, probe) - f(probe, probe + periods[1])).norm() > 1e-9
                    {
                        return Err(Error::invalid("leg function is not periodic in both angles"));
                    }
                }
                let (m1, m2) = (samples[0], samples[1]);
                let d = m1 * m2;
                let vals: Vec<C64> = (0..d)
                    .map(|s| {
                        let s1 = s / m2;
                        let s2 = s % m2;
                        f(
                            s1 as f64 * periods[0] / m1 as f64,
                            s2 as f64 * periods[1] / m2 as f64,
                        )
                    })
                    .collect();
                Ok(CMat::from_fn(d, d, |i, j| {
                    if i == j {
                        vals[i]
                    } else {
                        C64::ZERO
                    }
                }))
            }
            _ => Err(Error::invalid(
                "leg function variant does not match the right object",
            )),
        }
    }

    /// Direct evaluation at a point of the line, wound onto the leg.
    fn eval_line(&self, obj_b: &AlgObject, x: f64) -> Result<C64> {
        match (self, obj_b) {
            (LegFunction::Circle(f), AlgObject::Circle { .. }) => Ok(f(x)),
            (LegFunction::Torus(f), AlgObject::TwoTorus { periods, .. }) => {
                Ok(f(x.rem_euclid(periods[0]), x.rem_euclid(periods[1])))
            }
            _ => Err(Error::invalid(
                "leg function variant does not match the right object",
            )),
        }
    }

    /// Interpolation weights for evaluating the B leg at the point t:
    /// Dirichlet weights on the sample lattice, a product of the two
    /// axis kernels for the torus. Exact on the sampled trig band.
    fn slice_weights(&self, obj_b: &AlgObject, t: f64) -> Result<Vec<C64>> {
        match (self, obj_b) {
            (LegFunction::Circle(_), AlgObject::Circle { period, samples }) => {
                Ok(dirichlet_weights(*period, *samples, t))
            }
            (LegFunction::Torus(_), AlgObject::TwoTorus { periods, samples }) => {
                let w1 = dirichlet_weights(periods[0], samples[0], t);
                let w2 = dirichlet_weights(periods[1], samples[1], t);
                let mut out = Vec::with_capacity(samples[0] * samples[1]);
                for a in &w1 {
                    for b in &w2 {
                        out.push(a * b);
                    }
                }
                Ok(out)
            }
            _ => Err(Error::invalid(
                "leg function variant does not match the right object",
            )),
        }
    }
}

/// w_s(t) = (1/m) sum_k e^{i freq_k (t - s P/m)} over the centered
/// frequency comb freq_k = 2 pi (k - m/2) / P. Reduces to a Kronecker
/// delta when t is a sample point.
fn dirichlet_weights(period: f64, m: usize, t: f64) -> Vec<C64> {
    use std::f64::consts::PI;
    let mut out = Vec::with_capacity(m);
    for s in 0..m {
        let delta = t - s as f64 * period / m as f64;
        let mut acc = C64::ZERO;
        for k in 0..m {
            let freq = 2.0 * PI * (k as f64 - m as f64 / 2.0) / period;
            let ph = freq * delta;
            acc += c64(ph.cos(), ph.sin());
        }
        out.push(acc / c64(m as f64, 0.0));
    }
    out
}

/// The braided product j1(a) j2(b) with its B leg evaluated at the point
/// t, an (A, K) operator. Both factors are block-diagonal over the B
/// samples, so the slice is the j1 block times the interpolated j2
/// block: alpha_{x_k}(a) diagonal in K, times the circulant whose symbol
/// interpolates m -> [alpha_{p_m}(b)] at the sample point t.
pub fn braided_slice(pair: &BraidedPair, a: &CMat, b: &LegFunction<'_>, t: f64) -> Result<CMat> {
    let grid = pair.grid();
    let n = grid.n();
    let da = pair.obj_a.dim();
    pair.check_element(&pair.obj_a, a, "left")?;
    let b_diag = b.sample_diag(&pair.obj_b)?;
    let weights = b.slice_weights(&pair.obj_b, t)?;
    let mut symbol = vec![C64::ZERO; n];
    for (m, slot) in symbol.iter_mut().enumerate() {
        let moved = pair.obj_b.act(grid.momentum(m), &b_diag);
        let mut acc = C64::ZERO;
        for (beta, w) in weights.iter().enumerate() {
            acc += w * moved[(beta, beta)];
        }
        *slot = acc;
    }
    let builder = CirculantBuilder::new(grid);
    let rho = builder.rho(&symbol);
    let mut out = CMat::zeros(da * n, da * n);
    for k in 0..n {
        let ak = pair.obj_a.act(grid.position(k), a);
        for kp in 0..n {
            let z = rho[(n + k - kp) % n];
            if z.norm_sqr() == 0.0 {
                continue;
            }
            for ia in 0..da {
                for iap in 0..da {
                    out[(ia * n + k, iap * n + kp)] = ak[(ia, iap)] * z;
                }
            }
        }
    }
    Ok(out)
}

/// Both sides of the gauge slice identity: the t slice of the braided
/// product, and its gauge normal form built independently as
/// (I (x) D_t) J (I (x) i2(b)) (I (x) D_t)* with D_t = diag(e^{-i t x_k})
/// and J = blockdiag_k alpha_{x_k}(a).
fn gauge_slice_sides(
    pair: &BraidedPair,
    a: &CMat,
    b: &LegFunction<'_>,
    t: f64,
) -> Result<(CMat, CMat)> {
    let grid = pair.grid();
    let n = grid.n();
    let da = pair.obj_a.dim();
    let lhs = braided_slice(pair, a, b, t)?;
    let symbol: Result<Vec<C64>> = (0..n)
        .map(|m| b.eval_line(&pair.obj_b, grid.momentum(m)))
        .collect();
    let builder = CirculantBuilder::new(grid);
    let rho = builder.rho(&symbol?);
    let mut rhs = CMat::zeros(da * n, da * n);
    for k in 0..n {
        let ak = pair.obj_a.act(grid.position(k), a);
        let phase_k = c64(0.0, -t * grid.position(k)).exp();
        for kp in 0..n {
            let z = rho[(n + k - kp) % n];
            if z.norm_sqr() == 0.0 {
                continue;
            }
            let conj = phase_k * c64(0.0, t * grid.position(kp)).exp();
            for ia in 0..da {
                for iap in 0..da {
                    rhs[(ia * n + k, iap * n + kp)] = ak[(ia, iap)] * z * conj;
                }
            }
        }
    }
    Ok((lhs, rhs))
}

/// Residual between the t slice of the braided product and its gauge
/// normal form, in operator norm. Exact for t on the momentum lattice of
/// a torus grid whose momentum span is a whole number of leg periods;
/// the circulant wrap tears otherwise.
pub fn gauge_slice_residual(pair: &BraidedPair, a: &CMat, b: &LegFunction<'_>, t: f64) -> Result<f64> {
    let (lhs, rhs) = gauge_slice_sides(pair, a, b, t)?;
    Ok(linalg::spectral_norm(&(lhs - rhs)))
}

/// Weak form of [`gauge_slice_residual`] for windowed grids: worst
/// ||(lhs - rhs)(e_i (x) psi)|| over the A basis and the given grid-leg
/// states. On a windowed line the two sides differ in the circulant wrap
/// rows whenever the momentum symbol is not window-periodic (a golden
/// torus leg never is); states concentrated inside the window do not
/// reach the wrap, so the defect measures the identity and not the edge.
pub fn gauge_slice_weak_residual(
    pair: &BraidedPair,
    a: &CMat,
    b: &LegFunction<'_>,
    t: f64,
    states: &[CVec],
) -> Result<f64> {
    let n = pair.grid().n();
    let da = pair.obj_a.dim();
    let (lhs, rhs) = gauge_slice_sides(pair, a, b, t)?;
    let diff = lhs - rhs;
    let mut worst = 0.0f64;
    for psi in states {
        if psi.len() != n {
            return Err(Error::invalid("state length does not match the grid"));
        }
        for ia in 0..da {
            let mut v = CVec::zeros(da * n);
            for k in 0..n {
                v[ia * n + k] = psi[k];
            }
            worst = worst.max(linalg::matvec(&diff, &v).norm());
        }
    }
    Ok(worst)
}

/// Lower-bound data for injectivity of the j map on simple tensor sums.
/// The left factors are orthonormalized; the coefficient norm is the
/// Frobenius norm of the resulting right-side stack, so it vanishes
/// exactly when the tensor sum is zero.
#[derive(Debug, Clone)]
pub struct InjectivityReport {
    pub coeff_norm: f64,
    pub image_norm: f64,
    /// image_norm / coeff_norm, or 0 when the tensor vanishes.
    pub ratio: f64,
}

pub fn injectivity_gap(pair: &BraidedPair, pairs: &[(CMat, CMat)]) -> Result<InjectivityReport> {
    let da = pair.obj_a.dim();
    for (a, b) in pairs {
        pair.check_element(&pair.obj_a, a, "left")?;
        pair.check_element(&pair.obj_b, b, "right")?;
    }
    let flat: Vec<CVec> = pairs
        .iter()
        .map(|(a, _)| CVec::from_iterator(da * da, a.iter().copied()))
        .collect();
    let gs = linalg::gram_schmidt(&flat, 1e-10);
    let mut coeff_sq = 0.0;
    for i in 0..gs.basis.len() {
        let db = pair.obj_b.dim();
        let mut tilde = CMat::zeros(db, db);
        for (k, (_, b)) in pairs.iter().enumerate() {
            tilde += b * gs.coeff[k][i];
        }
        coeff_sq += linalg::frobenius(&tilde).powi(2);
    }
    let image_norm = linalg::spectral_norm(&pair.j_map(pairs)?);
    let coeff_norm = coeff_sq.sqrt();
    let ratio = if coeff_norm > 0.0 {
        image_norm / coeff_norm
    } else {
        0.0
    };
    Ok(InjectivityReport {
        coeff_norm,
        image_norm,
        ratio,
    })
}

/// Smallest ratio seen over a randomized family of tensor sums with the
/// given number of terms. Each draw sup-normalizes its elements.
pub fn injectivity_sweep<R: rand::Rng>(
    pair: &BraidedPair,
    terms: usize,
    draws: usize,
    rng: &mut R,
) -> Result<InjectivityReport> {
    if terms == 0 || draws == 0 {
        return Err(Error::invalid("need at least one term and one draw"));
    }
    let mut worst: Option<InjectivityReport> = None;
    for _ in 0..draws {
        let pairs: Vec<(CMat, CMat)> = (0..terms)
            .map(|_| {
                (
                    pair.obj_a.random_element(rng),
                    pair.obj_b.random_element(rng),
                )
            })
            .collect();
        let rep = injectivity_gap(pair, &pairs)?;
        if worst.as_ref().is_none_or(|w| rep.ratio < w.ratio) {
            worst = Some(rep);
        }
    }
    Ok(worst.expect("draws > 0"))
}

/// Degenerate-dynamics cross-check: when both objects have trivial flow,
/// the j map reduces to the ordinary tensor product on (A, B) padded by
/// the identity on the grid leg. Returns the norm distance between the
/// j-map image and kron(sum a_k (x) b_k, I_n).
pub fn degeneration_residual(pair: &BraidedPair, pairs: &[(CMat, CMat)]) -> Result<f64> {
    let (da, db, n) = pair.dims();
    let image = pair.j_map(pairs)?;
    let mut plain = CMat::zeros(da * db, da * db);
    for (a, b) in pairs {
        plain += linalg::kron(a, b);
    }
    let expected = linalg::kron(&plain, &linalg::ident(n));
    Ok(linalg::spectral_norm(&(image - expected)))
}

/// Pointwise unitary implementing the braiding on the doubled grid leg is
/// not materialized here; the exchange checks above are the quantitative
/// face of the braiding. This helper exposes the grid translation used by
/// the implementing unitaries so suites can report its unitarity defect.
pub fn grid_translation(pair: &BraidedPair, t: f64) -> GridOperator {
    weyl::translate_op(pair.grid(), t)
}

pub fn pauli_probe_pairs() -> Vec<(CMat, CMat)> {
    use crate::algebra::{sigma_x, sigma_y, sigma_z};
    vec![(sigma_x(), sigma_y()), (sigma_z(), sigma_x())]
}

/// Probe with deliberate linear dependence on the left leg: both terms
/// share sigma_x, so the orthonormalized expansion has a single left
/// vector carrying sigma_y + sigma_z on the right.
pub fn dependent_probe_pairs() -> Vec<(CMat, CMat)> {
    use crate::algebra::{sigma_x, sigma_y, sigma_z};
    vec![(sigma_x(), sigma_y()), (sigma_x(), sigma_z())]
}
