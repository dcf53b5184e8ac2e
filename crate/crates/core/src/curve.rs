//! The one-dimensional curve of points that keep every support point on the
//! cone boundary while staying in the affine hull of the support and the
//! entering point, together with the affine coefficients along it.
//!
//! With `M` the anchored difference matrix of the support's spatial parts,
//! `d = pbar* - pbar_j1`, `z = (I - M M^+) d` and
//!
//! ```text
//! (M^T M) u = b - M^T pbar_j1,   (M^T M) v = c,   w = -M^+ d,
//! ```
//!
//! the boundary-preserving points satisfy
//!
//! ```text
//! xbar = M(u + x0 v) + a* z + pbar_j1,
//! a*^2 ||z||^2 + ||M(u + x0 v)||^2 - (p_j1,0 - x0)^2 = 0,
//! ```
//!
//! and the affine coefficients of `xbar` over `support + {p*}` are
//! `alpha_{2:s} = u + x0 v + a* w`, `alpha_1 = 1 - sum(alpha_{2:s}) - a*`.
//! Internally everything is parameterized by `t = x0 - x0_ref`, the offset
//! from the current iterate, which keeps the quadratics well scaled.

use nalgebra::DVector;

use crate::cone::norm2;
use crate::error::{Error, Result};
use crate::model::{DualCertificate, DualEntry, Instance, Point, SupportState};
use crate::qr::QrFactors;

/// Discriminant values within `DISCRIMINANT_EPS * scale^2` of zero are
/// clamped to zero.
pub const DISCRIMINANT_EPS: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct CurveSystem {
    support: Vec<usize>,
    anchor: Point,
    entering: Point,
    b: DVector<f64>,
    c: DVector<f64>,
    u: DVector<f64>,
    v: DVector<f64>,
    w: DVector<f64>,
    z: DVector<f64>,
    z_norm: f64,
    /// `M u` and `M v`.
    mu: DVector<f64>,
    mv: DVector<f64>,
    /// `u + x0_ref v` and `M(u + x0_ref v)`.
    lin: DVector<f64>,
    lin_m: DVector<f64>,
    x0_cap: f64,
    x0_ref: f64,
    scale: f64,
    rank_tol: f64,
}

/// `alpha_i(t) = a + b t + g a*(t)` for one support position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CoefficientLine {
    pub a: f64,
    pub b: f64,
    pub g: f64,
}

impl CurveSystem {
    /// Sets up the curve for the current support of `state` and the entering
    /// point `p_star`, referenced at the current iterate `state.x`.
    ///
    /// `rank_tol` is the absolute threshold for both the diagonal of `R` and
    /// `||z||`; `scale` is the instance scale.
    pub fn build(
        inst: &Instance,
        state: &SupportState,
        p_star: &Point,
        rank_tol: f64,
    ) -> Result<Self> {
        let support = state.support.clone();
        if support.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if p_star.dim() != inst.n() {
            return Err(Error::dims(inst.n(), p_star.dim()));
        }
        let qr: &QrFactors = &state.qr;
        let k = inst.n() - 1;
        let s1 = support.len() - 1;
        if qr.ncols() != s1 {
            return Err(Error::NumericalBreakdown(format!(
                "factorization has {} columns for a support of {}",
                qr.ncols(),
                support.len()
            )));
        }
        let anchor = inst.point(support[0]).clone();
        let a0 = anchor.height;

        let mut b = DVector::zeros(s1);
        let mut c = DVector::zeros(s1);
        // right-hand side of the u system, b - M^T pbar_j1, in the
        // cancellation-free form 1/2 (||m_i||^2 - c_i (p_i0 + p_j1,0))
        let mut rhs_u = DVector::zeros(s1);
        let a_sq = anchor.spatial.norm_squared();
        for (col, &i) in support[1..].iter().enumerate() {
            let p = inst.point(i);
            c[col] = p.height - a0;
            b[col] = 0.5 * (p.spatial.norm_squared() - p.height * p.height - a_sq + a0 * a0);
            let diff = &p.spatial - &anchor.spatial;
            rhs_u[col] = 0.5 * (diff.norm_squared() - c[col] * (p.height + a0));
        }

        let d = &p_star.spatial - &anchor.spatial;
        let (u, v, w, z) = if s1 == 0 {
            (DVector::zeros(0), DVector::zeros(0), DVector::zeros(0), d.clone())
        } else {
            let u = qr.solve_normal(&rhs_u, rank_tol)?;
            let v = qr.solve_normal(&c, rank_tol)?;
            let (w, z) = qr.project_residual(&d, rank_tol)?;
            (u, v, w, z)
        };
        let (mu, mv) = if s1 == 0 {
            (DVector::zeros(k), DVector::zeros(k))
        } else {
            (qr.apply(&u), qr.apply(&v))
        };
        let x0_ref = state.x.height;
        let lin = &u + &v * x0_ref;
        let lin_m = &mu + &mv * x0_ref;
        let z_norm = norm2(z.as_slice());
        let x0_cap = support
            .iter()
            .map(|&i| inst.point(i).height)
            .fold(f64::INFINITY, f64::min);

        Ok(Self {
            support,
            anchor,
            entering: p_star.clone(),
            b,
            c,
            u,
            v,
            w,
            z,
            z_norm,
            mu,
            mv,
            lin,
            lin_m,
            x0_cap,
            x0_ref,
            scale: inst.scale(),
            rank_tol,
        })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn anchor(&self) -> &Point {
        &self.anchor
    }

    pub fn entering(&self) -> &Point {
        &self.entering
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn u(&self) -> &DVector<f64> {
        &self.u
    }

    pub fn v(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn w(&self) -> &DVector<f64> {
        &self.w
    }

    pub fn z(&self) -> &DVector<f64> {
        &self.z
    }

    pub fn z_norm(&self) -> f64 {
        self.z_norm
    }

    /// `M u`.
    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    /// `M v`.
    pub fn mv(&self) -> &DVector<f64> {
        &self.mv
    }

    /// Lowest support height; the curve only exists for `x0` at or below it.
    pub fn x0_cap(&self) -> f64 {
        self.x0_cap
    }

    /// Height of the iterate the system was built at.
    pub fn x0_ref(&self) -> f64 {
        self.x0_ref
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// True when the entering spatial point lies in the affine hull of the
    /// support (`||z||` below the rank tolerance).
    pub fn is_affinely_dependent(&self) -> bool {
        self.z_norm <= self.rank_tol
    }

    pub(crate) fn discriminant_eps(&self) -> f64 {
        DISCRIMINANT_EPS * self.scale * self.scale
    }

    /// `h0 = p_j1,0 - x0_ref`.
    pub(crate) fn h0(&self) -> f64 {
        self.anchor.height - self.x0_ref
    }

    /// `M(u + x0_ref v)`.
    pub(crate) fn lin_m(&self) -> &DVector<f64> {
        &self.lin_m
    }

    /// Coefficients of `D(t) = d2 t^2 + d1 t + d0`.
    pub(crate) fn discriminant_poly(&self) -> (f64, f64, f64) {
        let h0 = self.h0();
        let d2 = 1.0 - self.mv.norm_squared();
        let d1 = -2.0 * h0 - 2.0 * self.lin_m.dot(&self.mv);
        let d0 = h0 * h0 - self.lin_m.norm_squared();
        (d2, d1, d0)
    }

    /// `D(x0) = (p_j1,0 - x0)^2 - ||M(u + x0 v)||^2`, evaluated as a product
    /// of a difference and a sum to avoid cancellation near the apex.
    pub fn discriminant(&self, x0: f64) -> f64 {
        self.discriminant_at(x0 - self.x0_ref)
    }

    pub(crate) fn discriminant_at(&self, t: f64) -> f64 {
        let h = self.h0() - t;
        let g = norm2((&self.lin_m + &self.mv * t).as_slice());
        (h - g) * (h + g)
    }

    /// `a*(t) = sqrt(max(D, 0)) / ||z||` with the clamping band applied.
    /// Returns `None` when `D` is below the band.
    pub(crate) fn alpha_star_at(&self, t: f64) -> Option<f64> {
        let disc = self.discriminant_at(t);
        if disc < -self.discriminant_eps() {
            return None;
        }
        Some(disc.max(0.0).sqrt() / self.z_norm)
    }

    /// `alpha_i` along the curve as `a + b t + g a*(t)`; position 0 is the
    /// anchor.
    pub(crate) fn coefficient_line(&self, pos: usize) -> CoefficientLine {
        if pos == 0 {
            CoefficientLine {
                a: 1.0 - self.lin.sum(),
                b: -self.v.sum(),
                g: -(1.0 + self.w.sum()),
            }
        } else {
            CoefficientLine {
                a: self.lin[pos - 1],
                b: self.v[pos - 1],
                g: self.w[pos - 1],
            }
        }
    }

    fn check_curve(&self, x0: f64) -> Result<f64> {
        if self.is_affinely_dependent() {
            return Err(Error::AffinelyDependent);
        }
        if x0 > self.x0_cap + 1e-12 * self.scale || x0.is_nan() {
            return Err(Error::NoRealPoint { x0 });
        }
        Ok(x0 - self.x0_ref)
    }

    /// Spatial point `Gamma+(x0)` on the dual feasible branch of the curve.
    pub fn gamma_plus(&self, x0: f64) -> Result<DVector<f64>> {
        let t = self.check_curve(x0)?;
        let alpha_star = self.alpha_star_at(t).ok_or(Error::NoRealPoint { x0 })?;
        Ok(self.spatial_at(t, alpha_star))
    }

    /// `M(u + x0 v) + a* z + pbar_j1`.
    pub(crate) fn spatial_at(&self, t: f64, alpha_star: f64) -> DVector<f64> {
        &self.lin_m + &self.mv * t + &self.z * alpha_star + &self.anchor.spatial
    }

    /// Affine coefficients `(a*, alpha)` of `Gamma+(x0)` over the support
    /// (in support order) and the entering point.
    pub fn alphas_of_x0(&self, x0: f64) -> Result<(f64, DVector<f64>)> {
        let t = self.check_curve(x0)?;
        let alpha_star = self.alpha_star_at(t).ok_or(Error::NoRealPoint { x0 })?;
        Ok((alpha_star, self.alphas_with(t, alpha_star)))
    }

    fn alphas_with(&self, t: f64, alpha_star: f64) -> DVector<f64> {
        let s = self.len();
        let tail = &self.lin + &self.v * t + &self.w * alpha_star;
        let mut alpha = DVector::zeros(s);
        alpha[0] = 1.0 - tail.sum() - alpha_star;
        alpha.rows_mut(1, s - 1).copy_from(&tail);
        alpha
    }

    /// Coefficients at a fixed height as a function of `a*`, for the
    /// affinely dependent case where the curve collapses to the iterate.
    pub fn alphas_affdep(&self, x0j: f64, alpha_star: f64) -> DVector<f64> {
        self.alphas_with(x0j - self.x0_ref, alpha_star)
    }
}

/// Affine coefficients of `x.spatial` over the support's spatial parts,
/// `alpha_{2:s} = M^+ (xbar - pbar_j1)` and `alpha_1 = 1 - sum(alpha_{2:s})`.
pub fn support_coefficients(
    inst: &Instance,
    state: &SupportState,
    rank_tol: f64,
) -> Result<DVector<f64>> {
    let s = state.support.len();
    let mut alpha = DVector::zeros(s);
    if s == 1 {
        alpha[0] = 1.0;
        return Ok(alpha);
    }
    let rel = &state.x.spatial - &inst.point(state.support[0]).spatial;
    let tail = state.qr.pinv_apply(&rel, rank_tol)?;
    alpha[0] = 1.0 - tail.sum();
    alpha.rows_mut(1, s - 1).copy_from(&tail);
    Ok(alpha)
}

/// Dual certificate from affine coefficients of `x` over boundary-active
/// support points:
///
/// ```text
/// y_i0 = alpha_i (p_i0 - x0) / sum_j alpha_j (p_j0 - x0)
/// ybar_i = y_i0 (xbar - pbar_i) / (p_i0 - x0)
/// ```
///
/// When the weights degenerate (`x` coincides with a support point), the
/// certificate `y_k = e_1` for the nearest support point `k` is returned.
pub fn reconstruct_dual(
    inst: &Instance,
    support: &[usize],
    alpha: &DVector<f64>,
    x: &Point,
) -> DualCertificate {
    let n = inst.n();
    let m = inst.m();
    let gaps: Vec<f64> = support.iter().map(|&i| inst.point(i).height - x.height).collect();
    let denom: f64 = alpha.iter().zip(&gaps).map(|(a, g)| a * g).sum();
    let degenerate_tol = f64::EPSILON * inst.scale();
    if denom.is_nan() || denom <= degenerate_tol {
        let k = support
            .iter()
            .copied()
            .min_by(|&i, &j| {
                let di = lifted_distance(inst.point(i), x);
                let dj = lifted_distance(inst.point(j), x);
                di.total_cmp(&dj)
            })
            .expect("support is nonempty");
        return unit_certificate(m, n, k);
    }
    let entries = support
        .iter()
        .zip(alpha.iter().zip(&gaps))
        .map(|(&i, (&a, &gap))| {
            let y0 = a * gap / denom;
            let ybar = if gap > 0.0 {
                (&x.spatial - &inst.point(i).spatial) * (y0 / gap)
            } else {
                DVector::zeros(n - 1)
            };
            DualEntry { index: i, y0, ybar }
        })
        .collect();
    DualCertificate::new(m, n, entries)
}

/// `y_k = e_1`, all other blocks zero.
pub fn unit_certificate(m: usize, n: usize, k: usize) -> DualCertificate {
    DualCertificate::new(
        m,
        n,
        vec![DualEntry {
            index: k,
            y0: 1.0,
            ybar: DVector::zeros(n - 1),
        }],
    )
}

fn lifted_distance(p: &Point, x: &Point) -> f64 {
    let d = crate::cone::dist2(&p.spatial, &x.spatial);
    norm2(&[p.height - x.height, d])
}
