//! Shear unitary on the doubled grid leg and the associativity of the
//! braided product.
//!
//! The shear W sends the basis vector at lattice pair (a, b) to the one
//! at (b, c) where x_c = x_a + x_b mod L; on the centered lattice that is
//! c = (a + b - N/2) mod N. W is a permutation, hence exactly unitary.
//! Conjugation by W exchanges position sums for single-leg positions and
//! translations for translation pairs; those relations are certified in
//! exponentiated (Weyl) form, where they are exactly true on the torus.
//! The five-leg associator composes a leg swap with W on the two grid
//! legs and carries one nesting of the braided product onto the other.
//!
//! Residual norms in this module are Frobenius norms: cheap, and an upper
//! bound on the operator norm, so stated tolerances are conservative.

use crate::algebra::AlgObject;
use crate::braided::BraidedPair;
use crate::grid::{Grid, GridMode, State};
use crate::linalg::{self, c64, CMat, CVec, C64};
use crate::weyl::{self, BoundedFunction, CirculantBuilder};
use crate::{Error, Result};

/// Permutation unitary on the doubled grid leg implementing the shear
/// (x, y) -> (y - x, x) of functions, i.e. basis (a, b) -> (b, a+b-N/2).
#[derive(Debug, Clone)]
pub struct ShearUnitary {
    n: usize,
    /// map[src] = dst for flattened pair indices a*n + b.
    map: Vec<usize>,
}

impl ShearUnitary {
    pub fn new(grid: &Grid) -> Result<Self> {
        if grid.mode() != GridMode::Torus {
            return Err(Error::unsupported(
                "the shear wraps around the torus; windowed-line grids leave the window",
            ));
        }
        let n = grid.n();
        let mut map = vec![0usize; n * n];
        for a in 0..n {
            for b in 0..n {
                let c = (a + b + n - n / 2) % n;
                map[a * n + b] = b * n + c;
            }
        }
        Ok(Self { n, map })
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    pub fn index_map(&self) -> &[usize] {
        &self.map
    }

    pub fn matrix(&self) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for (src, &dst) in self.map.iter().enumerate() {
            m[(dst, src)] = C64::ONE;
        }
        m
    }

    /// W Q W* without materializing W.
    pub fn conjugate(&self, q: &CMat) -> CMat {
        let d = self.dim();
        let mut out = CMat::zeros(d, d);
        for u in 0..d {
            let pu = self.map[u];
            for v in 0..d {
                out[(pu, self.map[v])] = q[(u, v)];
            }
        }
        out
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        let d = self.dim();
        let mut out = CVec::zeros(d);
        for (src, &dst) in self.map.iter().enumerate() {
            out[dst] = v[src];
        }
        out
    }
}

fn kron_apply_left_perm(map: &[usize], m: &CMat) -> CMat {
    // W * M: row u of M lands on row map[u].
    let d = map.len();
    let mut out = CMat::zeros(d, d);
    for u in 0..d {
        for v in 0..d {
            out[(map[u], v)] = m[(u, v)];
        }
    }
    out
}

fn kron_apply_right_perm(m: &CMat, map: &[usize]) -> CMat {
    // M * W: W has its one in row map[src] of column src, so the product
    // reads (M W)[r, src] = M[r, map[src]].
    let d = map.len();
    let mut out = CMat::zeros(d, d);
    for src in 0..d {
        for r in 0..d {
            out[(r, src)] = m[(r, map[src])];
        }
    }
    out
}

/// Exponentiated Weyl forms of the three shear relations: with
/// D = diag(e^{i dp x_j}) and T the one-step lattice translation,
///   1. W (D (x) D) = (I (x) D) W
///   2. W (T (x) D) = (D (x) T) W
///   3. W (I (x) T) = (T (x) T) W
/// All three are exact on a torus whose position and momentum steps
/// coincide (length sqrt(2 pi N)); returned residuals are Frobenius.
pub fn shear_weyl_residuals(grid: &Grid) -> Result<[f64; 3]> {
    let w = ShearUnitary::new(grid)?;
    let n = grid.n();
    let kappa = grid.dp();
    let dphase = CMat::from_fn(n, n, |j, jp| {
        if j == jp {
            (linalg::IM * c64(kappa * grid.position(j), 0.0)).exp()
        } else {
            C64::ZERO
        }
    });
    let tshift = weyl::lattice_shift(grid, 1).into_mat();
    let eye = linalg::ident(n);

    let pairs: [(CMat, CMat); 3] = [
        (
            linalg::kron(&dphase, &dphase),
            linalg::kron(&eye, &dphase),
        ),
        (
            linalg::kron(&tshift, &dphase),
            linalg::kron(&dphase, &tshift),
        ),
        (
            linalg::kron(&eye, &tshift),
            linalg::kron(&tshift, &tshift),
        ),
    ];
    let mut out = [0.0; 3];
    for (i, (src, dst)) in pairs.iter().enumerate() {
        let lhs = kron_apply_left_perm(w.index_map(), src);
        let rhs = kron_apply_right_perm(dst, w.index_map());
        out[i] = linalg::frobenius(&(lhs - rhs));
    }
    Ok(out)
}

/// Unexponentiated position-sum relation probed on a centered Gaussian
/// two-leg state: || W (q x I + I x q) phi - (I x q) W phi ||. The raw
/// generators disagree at the wrap boundary, so the residual is the tail
/// mass of the state there, about L e^{-2 (L/4)^2} for this width.
pub fn shear_position_state_residual(grid: &Grid) -> Result<f64> {
    let w = ShearUnitary::new(grid)?;
    let n = grid.n();
    let state = State::from_position_fn(grid, |x| c64((-x * x).exp(), 0.0)).normalized();
    let amp = state.amplitudes();
    let mut phi = CVec::zeros(n * n);
    for a in 0..n {
        for b in 0..n {
            phi[a * n + b] = amp[a] * amp[b];
        }
    }
    let mut qsum = CVec::zeros(n * n);
    let mut q2 = CVec::zeros(n * n);
    for a in 0..n {
        for b in 0..n {
            let idx = a * n + b;
            qsum[idx] = phi[idx] * c64(grid.position(a) + grid.position(b), 0.0);
        }
    }
    let wphi = w.apply(&phi);
    for a in 0..n {
        for b in 0..n {
            let idx = a * n + b;
            q2[idx] = wphi[idx] * c64(grid.position(b), 0.0);
        }
    }
    let lhs = w.apply(&qsum);
    Ok((lhs - q2).norm())
}

fn check_periodic(grid: &Grid, f: &BoundedFunction) -> Result<()> {
    let l = grid.length();
    for k in 0..5 {
        let x = -0.37 * l + 0.19 * l * k as f64;
        if (f.eval(x + l) - f.eval(x)).norm() > 1e-9 {
            return Err(Error::invalid(
                "coproduct relations on the torus need a grid-periodic function",
            ));
        }
    }
    Ok(())
}

/// Residuals of the three coproduct exchange relations for a periodic
/// function f, with psi(Q) = W Q W* and (coprod f)(x, y) = f(x + y):
///   1. psi(position (x) position of coprod f) = I (x) position of f
///   2. psi(momentum (x) position)             = position (x) momentum
///   3. psi(I (x) momentum of f)               = momentum (x) momentum
/// "position of" means the diagonal operator i1, "momentum of" the
/// Fourier-conjugated diagonal i2. Exact (to roundoff) for the full
/// character family on a self-dual torus.
pub fn shear_coproduct_residuals(grid: &Grid, f: &BoundedFunction) -> Result<[f64; 3]> {
    let w = ShearUnitary::new(grid)?;
    check_periodic(grid, f)?;
    let n = grid.n();
    let d = n * n;
    let builder = CirculantBuilder::new(grid);
    let mut symbol = vec![C64::ZERO; n];

    // Line 1: diag f(x_a + x_b) vs I (x) diag f(x_b).
    let mut lhs1 = CMat::zeros(d, d);
    for a in 0..n {
        for b in 0..n {
            let idx = a * n + b;
            lhs1[(idx, idx)] = f.eval(grid.position(a) + grid.position(b));
        }
    }
    let mut rhs1 = CMat::zeros(d, d);
    for a in 0..n {
        for b in 0..n {
            let idx = a * n + b;
            rhs1[(idx, idx)] = f.eval(grid.position(b));
        }
    }
    let r1 = linalg::frobenius(&(w.conjugate(&lhs1) - rhs1));

    // Line 2: first-leg circulant of f(p + x_b), block-diagonal in b,
    // maps to second-leg circulant of f(x_a + p), block-diagonal in a.
    let mut lhs2 = CMat::zeros(d, d);
    for b in 0..n {
        for (m, s) in symbol.iter_mut().enumerate() {
            *s = f.eval(grid.momentum(m) + grid.position(b));
        }
        let rho = builder.rho(&symbol);
        for a in 0..n {
            for ap in 0..n {
                lhs2[(a * n + b, ap * n + b)] = rho[(n + a - ap) % n];
            }
        }
    }
    let mut rhs2 = CMat::zeros(d, d);
    for a in 0..n {
        for (m, s) in symbol.iter_mut().enumerate() {
            *s = f.eval(grid.position(a) + grid.momentum(m));
        }
        let rho = builder.rho(&symbol);
        for b in 0..n {
            for bp in 0..n {
                rhs2[(a * n + b, a * n + bp)] = rho[(n + b - bp) % n];
            }
        }
    }
    let r2 = linalg::frobenius(&(w.conjugate(&lhs2) - rhs2));

    // Line 3: I (x) i2(f) maps to the two-leg circulant of f(p + p').
    let i2f = weyl::i2(grid, f).into_mat();
    let mut lhs3 = CMat::zeros(d, d);
    for a in 0..n {
        for b in 0..n {
            for bp in 0..n {
                lhs3[(a * n + b, a * n + bp)] = i2f[(b, bp)];
            }
        }
    }
    // Two-variable profile rho2(d1, d2) = (1/N^2) sum f(p_m + p_m')
    // e^{i p_m d1 dx} e^{i p_m' d2 dx}.
    let dx = grid.dx();
    let mut phases = vec![C64::ZERO; n * n];
    for dshift in 0..n {
        for m in 0..n {
            phases[dshift * n + m] =
                (linalg::IM * c64(grid.momentum(m) * dshift as f64 * dx, 0.0)).exp();
        }
    }
    let mut inner = vec![C64::ZERO; n * n];
    for m in 0..n {
        for d2 in 0..n {
            let mut acc = C64::ZERO;
            for mp in 0..n {
                acc += f.eval(grid.momentum(m) + grid.momentum(mp)) * phases[d2 * n + mp];
            }
            inner[m * n + d2] = acc;
        }
    }
    let scale = c64(1.0 / (n as f64 * n as f64), 0.0);
    let mut rho2 = vec![C64::ZERO; n * n];
    for d1 in 0..n {
        for d2 in 0..n {
            let mut acc = C64::ZERO;
            for m in 0..n {
                acc += phases[d1 * n + m] * inner[m * n + d2];
            }
            rho2[d1 * n + d2] = acc * scale;
        }
    }
    let mut rhs3 = CMat::zeros(d, d);
    for a in 0..n {
        for ap in 0..n {
            let d1 = (n + a - ap) % n;
            for b in 0..n {
                for bp in 0..n {
                    rhs3[(a * n + b, ap * n + bp)] = rho2[d1 * n + (n + b - bp) % n];
                }
            }
        }
    }
    let r3 = linalg::frobenius(&(w.conjugate(&lhs3) - rhs3));

    Ok([r1, r2, r3])
}

/// Three algebra objects over one grid, with the five-leg associator
/// between the two nestings of the braided product. Source legs are
/// (A, B, K_in, C, K_out); the canonical target order is
/// (A, B, C, K_in, K_out).
#[derive(Debug, Clone)]
pub struct Associator {
    obj_a: AlgObject,
    obj_b: AlgObject,
    obj_c: AlgObject,
    grid: Grid,
    shear: ShearUnitary,
    /// Flattened-index permutation: source (A,B,K1,C,K2) basis index to
    /// canonical (A,B,C,K,K') index, including the shear on the K pair.
    map: Vec<usize>,
}

impl Associator {
    pub fn new(obj_a: AlgObject, obj_b: AlgObject, obj_c: AlgObject, grid: Grid) -> Result<Self> {
        obj_a.torus_compatibility(&grid)?;
        obj_b.torus_compatibility(&grid)?;
        obj_c.torus_compatibility(&grid)?;
        let shear = ShearUnitary::new(&grid)?;
        let (da, db, dc, n) = (obj_a.dim(), obj_b.dim(), obj_c.dim(), grid.n());
        let dim = da * db * dc * n * n;
        let mut map = vec![0usize; dim];
        for ia in 0..da {
            for ib in 0..db {
                for k1 in 0..n {
                    for ic in 0..dc {
                        for k2 in 0..n {
                            let src = ((((ia * db + ib) * n + k1) * dc + ic) * n) + k2;
                            let c = (k1 + k2 + n - n / 2) % n;
                            let dst = ((((ia * db + ib) * dc + ic) * n + k2) * n) + c;
                            map[src] = dst;
                        }
                    }
                }
            }
        }
        Ok(Self {
            obj_a,
            obj_b,
            obj_c,
            grid,
            shear,
            map,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (
            self.obj_a.dim(),
            self.obj_b.dim(),
            self.obj_c.dim(),
            self.grid.n(),
        )
    }

    pub fn total_dim(&self) -> usize {
        self.map.len()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn shear(&self) -> &ShearUnitary {
        &self.shear
    }

    /// Conjugate a source-leg-ordered operator by the associator
    /// permutation, landing in the canonical leg order.
    pub fn carry(&self, x: &CMat) -> CMat {
        let d = self.total_dim();
        let mut out = CMat::zeros(d, d);
        for u in 0..d {
            let pu = self.map[u];
            for v in 0..d {
                out[(pu, self.map[v])] = x[(u, v)];
            }
        }
        out
    }

    fn pair_ab(&self) -> Result<BraidedPair> {
        BraidedPair::new(self.obj_a.clone(), self.obj_b.clone(), self.grid.clone())
    }

    fn pair_bc(&self) -> Result<BraidedPair> {
        BraidedPair::new(self.obj_b.clone(), self.obj_c.clone(), self.grid.clone())
    }

    /// Left nesting, first embedding: diagonal over the outer grid leg
    /// with block alpha^A_{x_k}(a) on the A leg.
    fn left_j1(&self, a: &CMat) -> CMat {
        let (da, db, dc, n) = self.dims();
        let rest = db * dc * n;
        let dim = self.total_dim();
        let mut out = CMat::zeros(dim, dim);
        for k2 in 0..n {
            let ak = self.obj_a.act(self.grid.position(k2), a);
            for ia in 0..da {
                for iap in 0..da {
                    let z = ak[(ia, iap)];
                    if z.norm_sqr() == 0.0 {
                        continue;
                    }
                    for r in 0..rest {
                        let row = (ia * rest + r) * n + k2;
                        let col = (iap * rest + r) * n + k2;
                        out[(row, col)] = z;
                    }
                }
            }
        }
        out
    }

    /// Left nesting, second embedding applied to an operator Y on the
    /// inner (B, C, K_in) space: identity on A, circulant over the outer
    /// grid leg with matrix symbol alpha^{BC}_{p_m}(Y).
    fn left_j2(&self, y: &CMat) -> Result<CMat> {
        let (da, _, _, n) = self.dims();
        let inner = self.pair_bc()?;
        let dy = inner.total_dim();
        if y.nrows() != dy || y.ncols() != dy {
            return Err(Error::invalid(format!(
                "inner operator is {}x{}, the (B,C,grid) space has dimension {}",
                y.nrows(),
                y.ncols(),
                dy
            )));
        }
        let symbols: Result<Vec<CMat>> = (0..n)
            .map(|m| inner.product_action(self.grid.momentum(m), y))
            .collect();
        let symbols = symbols?;
        let builder = CirculantBuilder::new(&self.grid);
        let mut entry = vec![C64::ZERO; n];
        let dim = self.total_dim();
        let mut out = CMat::zeros(dim, dim);
        for iy in 0..dy {
            for iyp in 0..dy {
                for (m, s) in symbols.iter().enumerate() {
                    entry[m] = s[(iy, iyp)];
                }
                let rho = builder.rho(&entry);
                let mut all_zero = true;
                for z in &rho {
                    if z.norm_sqr() > 0.0 {
                        all_zero = false;
                        break;
                    }
                }
                if all_zero {
                    continue;
                }
                for ia in 0..da {
                    for k2 in 0..n {
                        let row = (ia * dy + iy) * n + k2;
                        for k2p in 0..n {
                            out[(row, (ia * dy + iyp) * n + k2p)] = rho[(n + k2 - k2p) % n];
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Right nesting, first embedding applied to an operator X on the
    /// inner (A, B, K_in) space, in source leg order: diagonal over
    /// (C, K_out) with block alpha^{AB}_{x_m}(X).
    fn right_j1(&self, x: &CMat) -> Result<CMat> {
        let (_, _, dc, n) = self.dims();
        let inner = self.pair_ab()?;
        let dx = inner.total_dim();
        if x.nrows() != dx || x.ncols() != dx {
            return Err(Error::invalid(format!(
                "inner operator is {}x{}, the (A,B,grid) space has dimension {}",
                x.nrows(),
                x.ncols(),
                dx
            )));
        }
        let dim = self.total_dim();
        let mut out = CMat::zeros(dim, dim);
        for m in 0..n {
            let xm = inner.product_action(self.grid.position(m), x)?;
            for ix in 0..dx {
                for ixp in 0..dx {
                    let z = xm[(ix, ixp)];
                    if z.norm_sqr() == 0.0 {
                        continue;
                    }
                    for ic in 0..dc {
                        let row = (ix * dc + ic) * n + m;
                        let col = (ixp * dc + ic) * n + m;
                        out[(row, col)] = z;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Right nesting, second embedding of c in source leg order: identity
    /// on (A, B, K_in), circulant over K_out with symbol alpha^C_{p}(c).
    fn right_j2(&self, c: &CMat) -> Result<CMat> {
        let (da, db, dc, n) = self.dims();
        if c.nrows() != dc || c.ncols() != dc {
            return Err(Error::invalid(format!(
                "element is {}x{}, object dimension is {}",
                c.nrows(),
                c.ncols(),
                dc
            )));
        }
        let symbols: Vec<CMat> = (0..n)
            .map(|m| self.obj_c.act(self.grid.momentum(m), c))
            .collect();
        let builder = CirculantBuilder::new(&self.grid);
        let mut entry = vec![C64::ZERO; n];
        let front = da * db * n;
        let dim = self.total_dim();
        let mut out = CMat::zeros(dim, dim);
        for ic in 0..dc {
            for icp in 0..dc {
                for (m, s) in symbols.iter().enumerate() {
                    entry[m] = s[(ic, icp)];
                }
                let rho = builder.rho(&entry);
                for f in 0..front {
                    for k2 in 0..n {
                        let row = (f * dc + ic) * n + k2;
                        for k2p in 0..n {
                            out[(row, (f * dc + icp) * n + k2p)] = rho[(n + k2 - k2p) % n];
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Max residuals of the three nesting relations over the probe sets:
    ///   1. left_j1(a)            = carry(right_j1(j1_AB(a)))
    ///   2. left_j2(j1_BC(b))     = carry(right_j1(j2_AB(b)))
    ///   3. left_j2(j2_BC(c))     = carry(right_j2(c))
    pub fn associativity_residuals(
        &self,
        probes_a: &[CMat],
        probes_b: &[CMat],
        probes_c: &[CMat],
    ) -> Result<[f64; 3]> {
        let pair_ab = self.pair_ab()?;
        let pair_bc = self.pair_bc()?;
        let mut out = [0.0f64; 3];
        for a in probes_a {
            let lhs = self.left_j1(a);
            let rhs = self.carry(&self.right_j1(&pair_ab.j1(a)?)?);
            out[0] = out[0].max(linalg::frobenius(&(lhs - rhs)));
        }
        for b in probes_b {
            let lhs = self.left_j2(&pair_bc.j1(b)?)?;
            let rhs = self.carry(&self.right_j1(&pair_ab.j2(b)?)?);
            out[1] = out[1].max(linalg::frobenius(&(lhs - rhs)));
        }
        for c in probes_c {
            let lhs = self.left_j2(&pair_bc.j2(c)?)?;
            let rhs = self.carry(&self.right_j2(c)?);
            out[2] = out[2].max(linalg::frobenius(&(lhs - rhs)));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{sigma_x, sigma_y, AlgObject};
    use crate::grid::{self, GridMode};

    fn self_dual(n: usize) -> Grid {
        Grid::new(n, grid::self_dual_length(n), GridMode::Torus).unwrap()
    }

    #[test]
    fn shear_is_a_permutation_unitary() {
        let g = self_dual(8);
        let w = ShearUnitary::new(&g).unwrap();
        let m = w.matrix();
        let gap = linalg::matmul(&m, &m.adjoint()) - linalg::ident(64);
        assert!(linalg::max_abs(&gap) == 0.0);
        // Position faithfulness at N = 4: x_1 + x_2 = x_1 on the centered
        // lattice, so (1, 2) lands on (2, 1).
        let g4 = Grid::new(4, 4.0, GridMode::Torus).unwrap();
        let w4 = ShearUnitary::new(&g4).unwrap();
        assert_eq!(w4.index_map()[1 * 4 + 2], 2 * 4 + 1);
        let wl = Grid::new(8, 10.0, GridMode::WindowedLine).unwrap();
        assert!(ShearUnitary::new(&wl).is_err());
    }

    #[test]
    fn shear_turns_diagonal_sums_into_second_leg() {
        // Conjugating diag g(x_a + x_b) by W gives I (x) diag g(x_b) for
        // lattice characters.
        let g = self_dual(8);
        let n = 8;
        let w = ShearUnitary::new(&g).unwrap();
        let kappa = g.dp();
        let mut q = CMat::zeros(64, 64);
        for a in 0..n {
            for b in 0..n {
                let idx = a * n + b;
                q[(idx, idx)] =
                    (linalg::IM * c64(kappa * (g.position(a) + g.position(b)), 0.0)).exp();
            }
        }
        let img = w.conjugate(&q);
        for a in 0..n {
            for b in 0..n {
                let idx = a * n + b;
                let want = (linalg::IM * c64(kappa * g.position(b), 0.0)).exp();
                assert!((img[(idx, idx)] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn exponentiated_shear_relations_are_exact() {
        let g = self_dual(32);
        let res = shear_weyl_residuals(&g).unwrap();
        for (i, r) in res.iter().enumerate() {
            assert!(*r < 1e-12, "relation {} residual {r:.3e}", i + 1);
        }
    }

    #[test]
    fn raw_position_relation_fails_only_at_the_boundary() {
        let g = self_dual(32);
        let r = shear_position_state_residual(&g).unwrap();
        assert!(r < 1e-6, "centered-state residual {r:.3e}");
        // On a short window the wrapped tail is visible.
        let small = self_dual(8);
        let r_small = shear_position_state_residual(&small).unwrap();
        assert!(r_small > 1e-6, "expected visible wrap tail, got {r_small:.3e}");
    }

    #[test]
    fn coproduct_relations_hold_on_the_character_family() {
        let g = self_dual(16);
        let n = 16;
        let mut worst = 0.0f64;
        for k in 0..n {
            let freq = (k as f64 - n as f64 / 2.0) * g.dp();
            let f = BoundedFunction::character(freq);
            let res = shear_coproduct_residuals(&g, &f).unwrap();
            for r in res {
                worst = worst.max(r);
            }
        }
        assert!(worst < 1e-10, "worst character residual {worst:.3e}");
    }

    #[test]
    fn coproduct_relations_extend_linearly() {
        let g = self_dual(16);
        // Random-coefficient trig polynomial of degree <= N/4.
        let coeffs = [(1, 0.7, 0.1), (2, -0.3, 0.4), (4, 0.2, -0.9)];
        let dp = g.dp();
        let f = BoundedFunction::entire(
            move |z| {
                let mut acc = C64::ZERO;
                for &(k, re, im) in &coeffs {
                    acc += c64(re, im) * (linalg::IM * c64(k as f64 * dp, 0.0) * z).exp();
                }
                acc
            },
            Some(2.0),
        );
        let res = shear_coproduct_residuals(&g, &f).unwrap();
        for (i, r) in res.iter().enumerate() {
            assert!(*r < 1e-10, "line {} residual {r:.3e}", i + 1);
        }
        let gauss = BoundedFunction::gaussian(1.0);
        assert!(shear_coproduct_residuals(&g, &gauss).is_err());
    }

    #[test]
    fn associator_map_is_a_bijection() {
        let g = self_dual(8);
        let dp = g.dp();
        let assoc = Associator::new(
            AlgObject::two_level(dp),
            AlgObject::two_level(dp),
            AlgObject::two_level(dp),
            g,
        )
        .unwrap();
        let mut seen = vec![false; assoc.total_dim()];
        for u in 0..assoc.total_dim() {
            let dst = assoc.map[u];
            assert!(!seen[dst]);
            seen[dst] = true;
        }
    }

    #[test]
    fn trivial_actions_reduce_to_a_leg_permutation() {
        let g = self_dual(8);
        let assoc = Associator::new(
            AlgObject::trivial(2),
            AlgObject::trivial(2),
            AlgObject::trivial(2),
            g,
        )
        .unwrap();
        let res = assoc
            .associativity_residuals(&[sigma_x()], &[sigma_y()], &[sigma_x()])
            .unwrap();
        for (i, r) in res.iter().enumerate() {
            assert!(*r < 1e-12, "line {} residual {r:.3e}", i + 1);
        }
    }

    #[test]
    fn nesting_relations_hold_for_two_level_objects() {
        let g = self_dual(16);
        let dp = g.dp();
        let assoc = Associator::new(
            AlgObject::two_level(dp),
            AlgObject::two_level(dp),
            AlgObject::two_level(dp),
            g,
        )
        .unwrap();
        let res = assoc
            .associativity_residuals(&[sigma_x(), sigma_y()], &[sigma_x(), sigma_y()], &[sigma_x()])
            .unwrap();
        for (i, r) in res.iter().enumerate() {
            assert!(*r < 1e-8, "line {} residual {r:.3e}", i + 1);
        }
    }

    #[test]
    fn nesting_relations_hold_with_a_function_third_leg() {
        let g = self_dual(8);
        let dp = g.dp();
        let period = g.length() / 4.0;
        let circle = AlgObject::circle(period, 8).unwrap();
        let assoc = Associator::new(
            AlgObject::two_level(dp),
            AlgObject::two_level(dp),
            circle,
            g,
        )
        .unwrap();
        // First-harmonic sample diagonal: a genuine band-limited element.
        let c_probe = CMat::from_fn(8, 8, |i, j| {
            if i == j {
                let th = 2.0 * std::f64::consts::PI * i as f64 / 8.0;
                c64(th.cos(), 0.3 * th.sin())
            } else {
                C64::ZERO
            }
        });
        let res = assoc
            .associativity_residuals(&[sigma_x()], &[sigma_y()], &[c_probe])
            .unwrap();
        for (i, r) in res.iter().enumerate() {
            assert!(*r < 1e-6, "line {} residual {r:.3e}", i + 1);
        }
    }
}
