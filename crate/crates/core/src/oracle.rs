//! Independent checks of solver output: optimality certificates, exhaustive
//! enumeration for small point sets, and a subgradient lower bound.

use nalgebra::{DMatrix, DVector};

use crate::cone::{dist2, infeasibility_unchecked};
use crate::model::{DualCertificate, Instance, Point};

/// Largest residual of each optimality condition.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    /// `max(0, max_i ||pbar_i - xbar|| - (p_i0 - x0))`.
    pub primal: f64,
    /// `max(0, max_i ||ybar_i|| - y_i0)`.
    pub dual_cone: f64,
    /// `||sum_i y_i - e_1||`.
    pub dual_sum: f64,
    /// `max_i |<p_i - x, y_i>|`.
    pub complementarity: f64,
    /// Absolute threshold used, `eps * scale`.
    pub threshold: f64,
    pub passed: bool,
}

impl KktReport {
    pub fn worst(&self) -> f64 {
        self.primal
            .max(self.dual_cone)
            .max(self.dual_sum)
            .max(self.complementarity)
    }
}

/// Checks primal feasibility of `x`, feasibility of `dual` and complementary
/// slackness between them; passes iff every residual is at most
/// `eps * scale`.
pub fn kkt_check(inst: &Instance, x: &Point, dual: &DualCertificate, eps: f64) -> KktReport {
    let threshold = eps * inst.scale();
    let shapes_ok = x.dim() == inst.n() && dual.n() == inst.n() && dual.m() == inst.m();
    if !shapes_ok || !x.is_finite() {
        return KktReport {
            primal: f64::INFINITY,
            dual_cone: f64::INFINITY,
            dual_sum: f64::INFINITY,
            complementarity: f64::INFINITY,
            threshold,
            passed: false,
        };
    }
    let primal = inst
        .points()
        .iter()
        .map(|p| infeasibility_unchecked(x, p))
        .fold(0.0, f64::max);
    let mut dual_cone = 0.0_f64;
    let mut complementarity = 0.0_f64;
    for e in dual.entries() {
        if e.index >= inst.m() || e.ybar.len() != inst.n() - 1 {
            dual_cone = f64::INFINITY;
            continue;
        }
        dual_cone = dual_cone.max(e.ybar.norm() - e.y0);
        let p = inst.point(e.index);
        let inner = (p.height - x.height) * e.y0 + (&p.spatial - &x.spatial).dot(&e.ybar);
        complementarity = complementarity.max(inner.abs());
    }
    let (s0, sbar) = dual.sum();
    let dual_sum = ((s0 - 1.0).powi(2) + sbar.norm_squared()).sqrt();
    let mut report = KktReport {
        primal,
        dual_cone: dual_cone.max(0.0),
        dual_sum,
        complementarity,
        threshold,
        passed: false,
    };
    report.passed = report.worst() <= threshold;
    report
}

/// Minimum enclosing ball of a small point set by exhaustive search over
/// affinely independent subsets of size at most `d + 1`: each subset gives
/// the smallest sphere through it (center in its affine hull), and the
/// smallest such sphere containing every point wins.
///
/// Cost grows like `m^(d+1)`; meant for `m` up to about 15 and `d <= 4`.
pub fn brute_force_meb_points(points: &[DVector<f64>], d: usize) -> (DVector<f64>, f64) {
    assert!(!points.is_empty(), "need at least one point");
    assert!(points.iter().all(|p| p.len() == d), "points must have dimension d");
    let scale = points.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let slack = 1e-10 * scale;
    let mut best: Option<(DVector<f64>, f64)> = None;
    let mut subset = Vec::with_capacity(d + 1);
    let mut consider = |subset: &[usize]| {
        let Some((c, r)) = circumsphere(points, subset, scale) else {
            return;
        };
        if best.as_ref().is_some_and(|(_, br)| *br <= r) {
            return;
        }
        if points.iter().all(|p| dist2(p, &c) <= r + slack) {
            best = Some((c, r));
        }
    };
    for size in 1..=(d + 1).min(points.len()) {
        combinations(points.len(), size, &mut subset, 0, &mut consider);
    }
    best.expect("the full enumeration always finds an enclosing sphere")
}

fn combinations(m: usize, size: usize, cur: &mut Vec<usize>, start: usize, f: &mut impl FnMut(&[usize])) {
    if cur.len() == size {
        f(cur);
        return;
    }
    for i in start..m {
        if m - i < size - cur.len() {
            break;
        }
        cur.push(i);
        combinations(m, size, cur, i + 1, f);
        cur.pop();
    }
}

/// Smallest sphere through the given points, or `None` if they are affinely
/// dependent. With `A = [q_j - q_0]` the center is `q_0 + A l` where
/// `2 A^T A l = diag(A^T A)`.
fn circumsphere(points: &[DVector<f64>], subset: &[usize], scale: f64) -> Option<(DVector<f64>, f64)> {
    let q0 = &points[subset[0]];
    if subset.len() == 1 {
        return Some((q0.clone(), 0.0));
    }
    let k = subset.len() - 1;
    let mut a = DMatrix::zeros(q0.len(), k);
    for (j, &i) in subset[1..].iter().enumerate() {
        a.set_column(j, &(&points[i] - q0));
    }
    let sv = a.singular_values();
    if sv.min() <= 1e-10 * scale {
        return None;
    }
    let g = a.transpose() * &a;
    let rhs = g.diagonal() * 0.5;
    let l = g.lu().solve(&rhs)?;
    let c = q0 + &a * l;
    let r = subset
        .iter()
        .map(|&i| dist2(&points[i], &c))
        .fold(0.0, f64::max);
    Some((c, r))
}

/// `g(xbar) = min_i (p_i0 - ||pbar_i - xbar||)`, whose maximum is the optimal
/// height of the instance. Returns the value and the first minimizing index.
pub fn lower_envelope(inst: &Instance, xbar: &DVector<f64>) -> (f64, usize) {
    inst.points()
        .iter()
        .enumerate()
        .map(|(i, p)| (p.height - dist2(&p.spatial, xbar), i))
        .fold((f64::INFINITY, 0), |best, cur| if cur.0 < best.0 { cur } else { best })
}

/// Subgradient ascent on [`lower_envelope`] from the spatial centroid with
/// steps `scale / sqrt(t)`, using the supergradient of the first minimizing
/// index. Returns the best value seen, a lower bound on the optimal height,
/// and the point where it was attained.
///
/// The iteration has no random choices, so `_seed` does not affect the
/// result; it is accepted so that oracle runs share the calling convention of
/// the randomized tools.
pub fn subgradient_oracle(inst: &Instance, iters: usize, _seed: u64) -> (f64, Point) {
    let scale = inst.scale();
    let mut xbar = inst
        .points()
        .iter()
        .fold(DVector::zeros(inst.n() - 1), |acc, p| acc + &p.spatial)
        / inst.m() as f64;
    let (mut best, _) = lower_envelope(inst, &xbar);
    let mut best_x = xbar.clone();
    for t in 1..=iters.max(1) {
        let (g, i) = lower_envelope(inst, &xbar);
        if g > best {
            best = g;
            best_x = xbar.clone();
        }
        let dir = &inst.point(i).spatial - &xbar;
        let len = dir.norm();
        if len == 0.0 {
            // zero supergradient: xbar is a maximizer
            break;
        }
        xbar += dir * (scale / (t as f64).sqrt() / len);
    }
    let (g, _) = lower_envelope(inst, &xbar);
    if g > best {
        best = g;
        best_x = xbar;
    }
    (best, Point::new(best, best_x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{reconstruct_dual, unit_certificate};
    use crate::model::{DualEntry, Instance};

    fn v(c: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(c)
    }

    #[test]
    fn symmetric_certificate_passes() {
        let inst = Instance::from_rows(&[vec![0.0, -1.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let x = Point::from_slice(&[-1.0, 0.0, 0.0]);
        let dual = reconstruct_dual(&inst, &[0, 1], &v(&[0.5, 0.5]), &x);
        let rep = kkt_check(&inst, &x, &dual, 1e-12);
        assert!(rep.passed, "{rep:?}");
        assert_eq!(rep.worst(), 0.0);
    }

    #[test]
    fn raised_apex_fails_primal() {
        let inst = Instance::from_rows(&[vec![0.0, -1.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let x = Point::from_slice(&[-1.0, 0.0, 0.0]);
        let dual = reconstruct_dual(&inst, &[0, 1], &v(&[0.5, 0.5]), &x);
        let up = Point::from_slice(&[-1.0 + 1e-3, 0.0, 0.0]);
        let rep = kkt_check(&inst, &up, &dual, 1e-7);
        assert!((rep.primal - 1e-3).abs() < 1e-12);
        assert!(!rep.passed);
    }

    #[test]
    fn zero_certificate_fails_dual_sum() {
        let inst = Instance::from_rows(&[vec![0.0, 0.0, 0.0]]).unwrap();
        let rep = kkt_check(&inst, inst.point(0), &DualCertificate::zero(1, 3), 1e-7);
        assert_eq!(rep.dual_sum, 1.0);
        assert!(!rep.passed);
        let rep = kkt_check(&inst, inst.point(0), &unit_certificate(1, 3, 0), 1e-12);
        assert!(rep.passed);
    }

    #[test]
    fn cone_violation_detected() {
        let inst = Instance::from_rows(&[vec![0.0, 0.0, 0.0]]).unwrap();
        let bad = DualCertificate::new(
            1,
            3,
            vec![DualEntry { index: 0, y0: 1.0, ybar: v(&[0.0, 0.5]) }],
        );
        let rep = kkt_check(&inst, inst.point(0), &bad, 1e-7);
        assert!((rep.dual_cone + 0.5).abs() > 0.0);
        assert!(!rep.passed);
    }

    #[test]
    fn mismatched_shapes_fail() {
        let inst = Instance::from_rows(&[vec![0.0, 0.0, 0.0]]).unwrap();
        let rep = kkt_check(&inst, &Point::from_slice(&[0.0, 0.0]), &unit_certificate(1, 3, 0), 1.0);
        assert!(!rep.passed);
    }

    #[test]
    fn brute_force_examples() {
        let (c, r) = brute_force_meb_points(&[v(&[0.0, 0.0]), v(&[2.0, 0.0])], 2);
        assert!((r - 1.0).abs() < 1e-15);
        assert!((c - v(&[1.0, 0.0])).norm() < 1e-15);

        let h = 3f64.sqrt() / 2.0;
        let (_, r) = brute_force_meb_points(&[v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.5, h])], 2);
        assert!((r - 1.0 / 3f64.sqrt()).abs() < 1e-14);

        let sq = [v(&[1.0, 1.0]), v(&[-1.0, 1.0]), v(&[-1.0, -1.0]), v(&[1.0, -1.0])];
        let sq: Vec<_> = sq.iter().map(|p| p * 0.5).collect();
        let (c, r) = brute_force_meb_points(&sq, 2);
        assert!((r - 0.5f64.sqrt()).abs() < 1e-14);
        assert!(c.norm() < 1e-14);
    }

    #[test]
    fn brute_force_ignores_interior_points() {
        let pts = [v(&[-3.0, 0.0, 0.0]), v(&[3.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.5]), v(&[0.1, -0.2, 0.3])];
        let (c, r) = brute_force_meb_points(&pts, 3);
        assert!((r - 3.0).abs() < 1e-14);
        assert!(c.norm() < 1e-14);
    }

    #[test]
    fn subgradient_single_point() {
        let inst = Instance::from_rows(&[vec![0.7, 1.0, -2.0]]).unwrap();
        let (g, x) = subgradient_oracle(&inst, 10, 0);
        assert_eq!(g, 0.7);
        assert_eq!(x.spatial, v(&[1.0, -2.0]));
    }

    #[test]
    fn subgradient_two_point() {
        let inst = Instance::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 4.0, 0.0]]).unwrap();
        let (g, _) = subgradient_oracle(&inst, 100_000, 7);
        assert!(g <= -1.5 + 1e-12);
        assert!(g >= -1.5 - 1e-3, "{g}");
    }
}
