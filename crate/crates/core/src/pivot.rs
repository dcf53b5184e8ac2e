//! Step computations for one curve search: the partial step (first support
//! coefficient to reach zero), the full step (entering point becomes
//! active) and the ratio test used when the entering point is affinely
//! dependent on the support.

use nalgebra::DVector;

use crate::curve::CurveSystem;
use crate::error::{Error, Result};

/// Absolute and relative slacks used when filtering roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTolerances {
    /// Roots may exceed the current height by this much (absolute).
    pub x0_slack: f64,
    /// Lower bound accepted for the entering coefficient in the full step.
    pub dual: f64,
    /// Relative residual for accepting a root of a squared radical equation.
    pub root_residual: f64,
    /// Heights within this band count as ties (absolute).
    pub tie: f64,
}

impl StepTolerances {
    pub fn for_scale(scale: f64) -> Self {
        Self {
            x0_slack: 1e-9 * scale,
            dual: 1e-9,
            root_residual: 1e-8,
            tie: 1e-12 * scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialStep {
    pub x0: f64,
    /// Support position whose coefficient vanishes (0 is the anchor).
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffDepDrop {
    pub position: usize,
    /// Largest entering coefficient keeping every support coefficient
    /// nonnegative.
    pub alpha_star: f64,
    /// Support coefficients at that value; `alpha[position] == 0`.
    pub alpha: DVector<f64>,
}

/// Real roots of `a t^2 + b t + c`, larger-magnitude root first and the
/// other one from the product of roots. A slightly negative discriminant
/// (relative to the magnitude of its terms) is treated as a double root.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let mut disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if disc >= -1e-12 * (b * b + (4.0 * a * c).abs()) {
            disc = 0.0;
        } else {
            return Vec::new();
        }
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
    if q == 0.0 {
        return vec![0.0];
    }
    let mut roots = vec![q / a, c / q];
    roots.retain(|r| r.is_finite());
    roots
}

/// Largest height `x0 <= x0j` at which some support coefficient reaches zero
/// along `Gamma+`, with the position attaining it (ties go to the smallest
/// position). `None` means no coefficient ever vanishes, i.e. `-inf`.
///
/// Each equation `a + b t + g sqrt(D(t)) / ||z|| = 0` is squared into a
/// quadratic in `t`; roots that do not satisfy the unsquared equation are
/// discarded.
pub fn partial_step(cs: &CurveSystem, x0j: f64, tol: &StepTolerances) -> Option<PartialStep> {
    if cs.is_affinely_dependent() {
        return None;
    }
    let t_max = x0j - cs.x0_ref();
    let z2 = cs.z_norm() * cs.z_norm();
    let (d2, d1, d0) = cs.discriminant_poly();
    let mut best: Option<PartialStep> = None;
    for pos in 0..cs.len() {
        let line = cs.coefficient_line(pos);
        let candidates = if line.g == 0.0 {
            if line.b != 0.0 {
                vec![-line.a / line.b]
            } else {
                Vec::new()
            }
        } else {
            let g2 = line.g * line.g;
            quadratic_roots(
                z2 * line.b * line.b - g2 * d2,
                2.0 * z2 * line.a * line.b - g2 * d1,
                z2 * line.a * line.a - g2 * d0,
            )
        };
        for t in candidates {
            if t > t_max + tol.x0_slack {
                continue;
            }
            let t = t.min(t_max);
            let Some(alpha_star) = cs.alpha_star_at(t) else { continue };
            let lin = line.a + line.b * t;
            let rad = line.g * alpha_star;
            let residual = (lin + rad).abs();
            if residual > tol.root_residual * (1.0 + lin.abs() + rad.abs()) {
                continue;
            }
            let x0 = cs.x0_ref() + t;
            best = match best {
                Some(b) if x0 < b.x0 - tol.tie => Some(b),
                Some(b) if x0 <= b.x0 + tol.tie => Some(PartialStep {
                    x0: x0.max(b.x0),
                    position: b.position.min(pos),
                }),
                _ => Some(PartialStep { x0, position: pos }),
            };
        }
    }
    best
}

/// Largest height `x0 <= min(x0j, p*_0)` at which the entering point becomes
/// boundary-active on `Gamma+`, or `-inf` if no such point exists.
///
/// Substituting the entering boundary condition gives the entering
/// coefficient as an affine function of `x0`, which makes `xbar` linear in
/// `x0`; the anchor's boundary condition then is a single quadratic.
pub fn full_step(cs: &CurveSystem, x0j: f64, tol: &StepTolerances) -> f64 {
    if cs.is_affinely_dependent() {
        return f64::NEG_INFINITY;
    }
    let anchor = cs.anchor();
    let star = cs.entering();
    let z2 = cs.z_norm() * cs.z_norm();
    let d = &star.spatial - &anchor.spatial;
    let c_star = star.height - anchor.height;
    // b* - d^T pbar_j1 written without the large-magnitude terms
    let b_star_rel = 0.5 * (d.norm_squared() - c_star * (star.height + anchor.height));
    let x0_ref = cs.x0_ref();
    let lin_m = cs.lin_m();
    let mv = cs.mv();
    // a*(t) = (f0 + f1 t) / ||z||^2
    let f0 = b_star_rel + x0_ref * c_star - d.dot(lin_m);
    let f1 = c_star - d.dot(mv);
    let h0 = cs.h0();
    let a = mv.norm_squared() + f1 * f1 / z2 - 1.0;
    let b = 2.0 * lin_m.dot(mv) + 2.0 * f0 * f1 / z2 + 2.0 * h0;
    let c = lin_m.norm_squared() + f0 * f0 / z2 - h0 * h0;
    let cap = x0j.min(star.height);
    quadratic_roots(a, b, c)
        .into_iter()
        .filter_map(|t| {
            let x0 = x0_ref + t;
            let alpha_star = (f0 + f1 * t) / z2;
            (alpha_star >= -tol.dual && x0 <= cap + tol.x0_slack).then_some(x0.min(cap))
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Ratio test for the affinely dependent case: the support position whose
/// coefficient reaches zero first as the entering coefficient grows from 0.
pub fn affdep_drop(cs: &CurveSystem, x0j: f64) -> Result<AffDepDrop> {
    let s = cs.len();
    let rho = cs.alphas_affdep(x0j, 0.0);
    let mut sigma = DVector::zeros(s);
    sigma[0] = -1.0 - cs.w().sum();
    for i in 1..s {
        sigma[i] = cs.w()[i - 1];
    }
    const NEG_EPS: f64 = 1e-12;
    let mut best: Option<(usize, f64)> = None;
    for k in 0..s {
        if sigma[k] < -NEG_EPS {
            let ratio = -rho[k] / sigma[k];
            if best.is_none_or(|(_, r)| ratio < r) {
                best = Some((k, ratio));
            }
        }
    }
    let (position, alpha_star) = best.ok_or(Error::NoNegativeSigma)?;
    let mut alpha = &rho + &sigma * alpha_star;
    alpha[position] = 0.0;
    Ok(AffDepDrop {
        position,
        alpha_star,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{infeasibility, two_point_solve};
    use crate::model::{Instance, Point, SupportState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(c: &[f64]) -> Point {
        Point::from_slice(c)
    }

    fn system(rows: &[Vec<f64>], support: Vec<usize>, x: Point, star: usize) -> CurveSystem {
        let inst = Instance::from_rows(rows).unwrap();
        let state = SupportState::new(&inst, support, x).unwrap();
        CurveSystem::build(&inst, &state, inst.point(star), 1e-12).unwrap()
    }

    fn worked() -> CurveSystem {
        system(
            &[vec![0.0, -1.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 3.0]],
            vec![0, 1],
            pt(&[-1.0, 0.0, 0.0]),
            2,
        )
    }

    /// Bisection on a single coefficient along the curve, independent of the
    /// squared quadratic.
    fn bisect_zero(cs: &CurveSystem, pos: usize, mut hi: f64, mut lo: f64) -> f64 {
        let f = |x0: f64| cs.alphas_of_x0(x0).unwrap().1[pos];
        assert!(f(hi) * f(lo) <= 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (hi + lo);
            if f(mid) * f(hi) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (hi + lo)
    }

    #[test]
    fn quadratic_roots_cases() {
        let mut r = quadratic_roots(1.0, -3.0, 2.0);
        r.sort_by(f64::total_cmp);
        assert_eq!(r, vec![1.0, 2.0]);
        assert_eq!(quadratic_roots(0.0, 2.0, -4.0), vec![2.0]);
        assert!(quadratic_roots(1.0, 0.0, 1.0).is_empty());
        assert_eq!(quadratic_roots(1.0, 0.0, 0.0), vec![0.0]);
        // cancellation-prone pair: roots 1e8 and 1e-8
        let mut r = quadratic_roots(1.0, -(1e8 + 1e-8), 1.0);
        r.sort_by(f64::total_cmp);
        assert!((r[0] - 1e-8).abs() < 1e-22);
        assert!((r[1] - 1e8).abs() < 1e-6);
    }

    #[test]
    fn partial_step_worked_example() {
        let cs = worked();
        let tol = StepTolerances::for_scale(cs.scale());
        let step = partial_step(&cs, -1.0, &tol).unwrap();
        assert!((step.x0 + 10f64.sqrt()).abs() < 1e-12, "{}", step.x0);
        assert_eq!(step.position, 0);
        // independent bisection oracle on alpha_1
        let root = bisect_zero(&cs, 0, -1.0, -10.0);
        assert!((root - step.x0).abs() < 1e-9);
    }

    #[test]
    fn full_step_worked_example() {
        let cs = worked();
        let tol = StepTolerances::for_scale(cs.scale());
        let x0 = full_step(&cs, -1.0, &tol);
        assert!((x0 + 5.0 / 3.0).abs() < 1e-13);
        let xbar = cs.gamma_plus(x0).unwrap();
        assert!((xbar - DVector::from_vec(vec![0.0, 4.0 / 3.0])).amax() < 1e-12);
    }

    #[test]
    fn full_step_singleton_matches_two_point_formula() {
        let rows = [vec![1.0, 0.0, 0.0], vec![0.0, 4.0, 0.0]];
        let cs = system(&rows, vec![0], pt(&rows[0]), 1);
        let tol = StepTolerances::for_scale(cs.scale());
        let x0 = full_step(&cs, 1.0, &tol);
        assert!((x0 + 1.5).abs() < 1e-14);
        let expected = two_point_solve(&pt(&rows[0]), &pt(&rows[1])).unwrap();
        assert!((cs.gamma_plus(x0).unwrap() - expected.spatial).amax() < 1e-12);
    }

    #[test]
    fn singleton_partial_step_lands_on_entering_point() {
        // the |S| = 1 partial step gives x0 = p_j1,0 - ||pbar* - pbar_j1||
        let rows = [vec![1.0, 0.0, 0.0], vec![0.0, 4.0, 0.0]];
        let cs = system(&rows, vec![0], pt(&rows[0]), 1);
        let tol = StepTolerances::for_scale(cs.scale());
        let step = partial_step(&cs, 1.0, &tol).unwrap();
        assert!((step.x0 + 3.0).abs() < 1e-14);
        assert_eq!(step.position, 0);
        assert!(full_step(&cs, 1.0, &tol) > step.x0);
    }

    #[test]
    fn full_step_absent_when_entering_point_dominates() {
        // p* <=_Q p_j1: no cone apex has both on its boundary below the support
        let rows = [vec![0.0, 0.0, 0.0], vec![-5.0, 1.0, 0.0]];
        let cs = system(&rows, vec![0], pt(&rows[0]), 1);
        let tol = StepTolerances::for_scale(cs.scale());
        assert_eq!(full_step(&cs, 0.0, &tol), f64::NEG_INFINITY);
    }

    #[test]
    fn affdep_worked_example() {
        let cs = system(
            &[vec![0.0, -1.0, 0.0], vec![0.0, 1.0, 0.0], vec![-0.9, 0.5, 0.0]],
            vec![0, 1],
            pt(&[-1.0, 0.0, 0.0]),
            2,
        );
        assert!(cs.is_affinely_dependent());
        let drop = affdep_drop(&cs, -1.0).unwrap();
        assert_eq!(drop.position, 1);
        assert!((drop.alpha_star - 2.0 / 3.0).abs() < 1e-15);
        assert!((drop.alpha[0] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(drop.alpha[1], 0.0);
        assert!(partial_step(&cs, -1.0, &StepTolerances::for_scale(1.0)).is_none());
    }

    #[test]
    fn affdep_single_negative_sigma() {
        // entering point beyond the second support point on the same line:
        // only sigma_2 is negative
        let cs = system(
            &[vec![0.0, -1.0, 0.0], vec![0.0, 1.0, 0.0], vec![-0.5, 2.0, 0.0]],
            vec![0, 1],
            pt(&[-1.0, 0.0, 0.0]),
            2,
        );
        let drop = affdep_drop(&cs, -1.0).unwrap();
        assert_eq!(drop.position, 1);
        assert!(drop.alpha.iter().all(|&a| a >= -1e-12));
    }

    #[test]
    fn affdep_drop_restores_independence() {
        let inst = Instance::from_rows(&[
            vec![0.0, -1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 2.0, 0.0],
            vec![-1.5, 0.2, 0.4, 0.0],
        ])
        .unwrap();
        // circumcenter of the three support points in the plane x3 = 0
        let mut state = SupportState::new(&inst, vec![0, 1, 2], pt(&[-1.25, 0.0, 0.75, 0.0])).unwrap();
        for i in 0..3 {
            assert!(infeasibility(&state.x, inst.point(i)).unwrap().abs() < 1e-12);
        }
        let cs = CurveSystem::build(&inst, &state, inst.point(3), 1e-12).unwrap();
        assert!(cs.is_affinely_dependent());
        let drop = affdep_drop(&cs, state.x.height).unwrap();
        assert!(drop.alpha.iter().all(|&a| a >= -1e-10));
        state.remove(drop.position).unwrap();
        let cs = CurveSystem::build(&inst, &state, inst.point(3), 1e-12).unwrap();
        assert!(!cs.is_affinely_dependent());
        assert!(cs.z_norm() > 1e-6);
    }

    #[test]
    fn extraneous_roots_are_discarded() {
        // For random systems, every reported partial step is a genuine zero of
        // the unsquared coefficient and there is no larger genuine zero below
        // the current height (checked by dense sampling plus bisection).
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut checked = 0;
        let mut with_hits = 0;
        while checked < 200 {
            let k = rng.random_range(2..5);
            let s = rng.random_range(2..=k);
            // support on the boundary of a cone at x with xbar inside their hull
            let x = Point::new(0.0, DVector::zeros(k));
            let mut rows = Vec::new();
            for _ in 0..s {
                let dir = DVector::from_fn(k, |_, _| rng.random_range(-1.0..1.0));
                let sp = dir;
                let mut row = vec![sp.norm()];
                row.extend(sp.iter());
                rows.push(row);
            }
            let mut star = vec![rng.random_range(-3.0..-0.5)];
            star.extend((0..k).map(|_| rng.random_range(-3.0..3.0)));
            rows.push(star);
            let inst = Instance::from_rows(&rows).unwrap();
            let Ok(state) = SupportState::new(&inst, (0..s).collect(), x.clone()) else { continue };
            let Ok(cs) = CurveSystem::build(&inst, &state, inst.point(s), 1e-12) else { continue };
            if cs.z_norm() < 1e-3 {
                continue;
            }
            let Ok((_, alpha0)) = cs.alphas_of_x0(0.0) else { continue };
            if alpha0.iter().any(|&a| a < 1e-3) {
                continue;
            }
            checked += 1;
            let tol = StepTolerances::for_scale(inst.scale());
            let step = partial_step(&cs, 0.0, &tol);
            // dense scan for the first sign change below 0
            let mut prev = 0.0;
            let mut oracle: Option<(f64, usize)> = None;
            'scan: for j in 1..=4000 {
                let x0 = -(j as f64) * 0.005;
                let (_, a) = cs.alphas_of_x0(x0).unwrap();
                // several coefficients may cross inside one scan interval
                let crossed = (0..s)
                    .filter(|&pos| a[pos] < 0.0)
                    .map(|pos| (bisect_zero(&cs, pos, prev, x0), pos))
                    .max_by(|l, r| l.0.total_cmp(&r.0));
                if crossed.is_some() {
                    oracle = crossed;
                    break 'scan;
                }
                prev = x0;
            }
            match (step, oracle) {
                (Some(st), Some((root, _))) => {
                    with_hits += 1;
                    assert!((st.x0 - root).abs() < 1e-6, "step {} oracle {}", st.x0, root);
                    let (_, a) = cs.alphas_of_x0(st.x0).unwrap();
                    assert!(a[st.position].abs() < 1e-7);
                    assert!(a.iter().all(|&v| v >= -1e-9));
                }
                (Some(st), None) => assert!(st.x0 < -19.9, "spurious root {}", st.x0),
                (None, Some((root, _))) => panic!("missed root {root}"),
                (None, None) => {}
            }
        }
        assert!(with_hits > 20);
    }
}
