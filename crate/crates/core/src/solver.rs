//! The dual simplex-type main loop.
//!
//! Starting from a singleton support at the lowest point, each major
//! iteration picks a violated point `p*` and moves the iterate down the
//! boundary-preserving curve of the current support until either a support
//! coefficient vanishes (partial step: drop that point, search again) or
//! `p*` becomes active (full step: add it). The support is always a dual
//! feasible support pair between major iterations, and `x0` strictly
//! decreases from one major iteration to the next.

use std::time::Instant;

use crate::cone::{infeasibility_unchecked, is_point_solution, two_point_solve};
use crate::curve::{reconstruct_dual, support_coefficients, CurveSystem};
use crate::error::{Error, Result};
use crate::model::{Instance, Point, SolveResult, SolveStats, SupportState};
use crate::pivot::{affdep_drop, full_step, partial_step, StepTolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Enter the point with the largest constraint violation.
    #[default]
    MostInfeasible,
    /// Enter the first violated point in instance order.
    FirstViolated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Primal feasibility tolerance, relative to the instance scale.
    pub eps_feas: f64,
    /// Tolerance on the sign of dual coefficients.
    pub eps_dual: f64,
    /// Rank tolerance for `R` and `||z||`, relative to the instance scale.
    pub eps_rank: f64,
    /// Cap on support-pair updates; `None` means `100 m + 1000`.
    pub max_iterations: Option<usize>,
    pub pivot_rule: PivotRule,
    /// Solve two-point subproblems in closed form instead of by curve search.
    pub use_two_point_shortcut: bool,
    /// Rebuild the QR factors from scratch after this many updates.
    pub refactor_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps_feas: 1e-9,
            eps_dual: 1e-9,
            eps_rank: 1e-12,
            max_iterations: None,
            pivot_rule: PivotRule::MostInfeasible,
            use_two_point_shortcut: true,
            refactor_every: 64,
        }
    }
}

impl SolverConfig {
    pub fn iteration_limit(&self, m: usize) -> usize {
        self.max_iterations.unwrap_or(100 * m + 1000)
    }

    fn step_tolerances(&self, scale: f64) -> StepTolerances {
        StepTolerances {
            x0_slack: self.eps_feas * scale,
            dual: self.eps_dual,
            ..StepTolerances::for_scale(scale)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// The entering point alone solves the subproblem.
    PointSolution,
    /// Closed-form two-point update.
    TwoPoint,
    /// Ratio-test drop for an affinely dependent entering point.
    AffDepDrop,
    PartialStep,
    FullStep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub kind: StepKind,
    /// Instance index of the entering point.
    pub entering: usize,
    /// Height of the iterate after the step.
    pub x0: f64,
    /// Support size after the step.
    pub support_len: usize,
    /// Instance index removed from the support, for drops and partial steps.
    pub dropped: Option<usize>,
    /// Entering coefficient at the ratio-test drop.
    pub ratio: Option<f64>,
}

/// Step-by-step record of a solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
    /// Iterate height at the start and after every major iteration.
    pub major_x0: Vec<f64>,
    /// Support sets after every major iteration.
    pub supports: Vec<Vec<usize>>,
}

impl Trace {
    pub fn max_support_len(&self) -> usize {
        self.events.iter().map(|e| e.support_len).max().unwrap_or(1)
    }
}

/// Residuals of the dual feasible support pair conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct SpairReport {
    /// `max_i | ||pbar_i - xbar|| - (p_i0 - x0) |` over the support.
    pub boundary: f64,
    /// Smallest affine coefficient of `xbar` over the support.
    pub min_coefficient: f64,
    /// Distance of `xbar` from the affine hull of the support.
    pub hull_residual: f64,
    /// Smallest `|R_ii|`, relative to the instance scale.
    pub min_pivot: f64,
}

impl SpairReport {
    pub fn is_valid(&self, scale: f64, boundary_tol: f64, interior_tol: f64, rank_tol: f64) -> bool {
        self.boundary <= boundary_tol * scale
            && self.hull_residual <= boundary_tol * scale
            && self.min_coefficient >= interior_tol
            && self.min_pivot > rank_tol
    }
}

/// Measures how well `state` satisfies the support pair conditions: support
/// points on the cone boundary at `x`, `xbar` inside the convex hull of their
/// spatial parts, and those parts affinely independent.
pub fn check_spair(inst: &Instance, state: &SupportState) -> SpairReport {
    let scale = inst.scale();
    let boundary = state
        .support
        .iter()
        .map(|&i| infeasibility_unchecked(&state.x, inst.point(i)).abs())
        .fold(0.0, f64::max);
    let s1 = state.qr.ncols();
    let min_pivot = (0..s1)
        .map(|i| state.qr.r()[(i, i)].abs() / scale)
        .fold(f64::INFINITY, f64::min);
    let rel = &state.x.spatial - &inst.point(state.support[0]).spatial;
    let hull_residual = state.qr.residual(&rel).norm();
    let min_coefficient = support_coefficients(inst, state, 0.0)
        .map(|a| a.min())
        .unwrap_or(f64::NEG_INFINITY);
    SpairReport {
        boundary,
        min_coefficient,
        hull_residual,
        min_pivot,
    }
}

/// Singleton support at the lowest point (ties to the smallest index).
pub fn initial_spair(inst: &Instance) -> SupportState {
    let best = inst
        .points()
        .iter()
        .enumerate()
        .fold(0, |best, (i, p)| if p.height < inst.point(best).height { i } else { best });
    SupportState::singleton(inst, best)
}

/// A violated point at `x`, or `None` when `x` is primal feasible.
pub fn select_violated(inst: &Instance, x: &Point, cfg: &SolverConfig) -> Option<usize> {
    let tol = cfg.eps_feas * inst.scale();
    let mut scores = inst
        .points()
        .iter()
        .map(|p| infeasibility_unchecked(x, p))
        .enumerate();
    match cfg.pivot_rule {
        PivotRule::FirstViolated => scores.find(|&(_, r)| r > tol).map(|(i, _)| i),
        PivotRule::MostInfeasible => scores
            .fold(None, |best: Option<(usize, f64)>, (i, r)| match best {
                Some((_, b)) if r <= b => best,
                _ if r > tol => Some((i, r)),
                _ => best,
            })
            .map(|(i, _)| i),
    }
}

pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Result<SolveResult> {
    Solver::new(inst, cfg, initial_spair(inst), None).run()
}

/// Like [`solve`], also returning every step taken.
pub fn solve_traced(inst: &Instance, cfg: &SolverConfig) -> Result<(SolveResult, Trace)> {
    let mut trace = Trace::default();
    let res = Solver::new(inst, cfg, initial_spair(inst), Some(&mut trace)).run()?;
    Ok((res, trace))
}

/// Warm start from a caller-supplied support pair, which is validated first.
pub fn solve_from(inst: &Instance, support: Vec<usize>, x: Point, cfg: &SolverConfig) -> Result<SolveResult> {
    warm_start(inst, support, x, cfg, None)
}

pub fn solve_from_traced(
    inst: &Instance,
    support: Vec<usize>,
    x: Point,
    cfg: &SolverConfig,
) -> Result<(SolveResult, Trace)> {
    let mut trace = Trace::default();
    let res = warm_start(inst, support, x, cfg, Some(&mut trace))?;
    Ok((res, trace))
}

fn warm_start(
    inst: &Instance,
    support: Vec<usize>,
    x: Point,
    cfg: &SolverConfig,
    trace: Option<&mut Trace>,
) -> Result<SolveResult> {
    let mut seen = support.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != support.len() || support.len() > inst.n() {
        return Err(Error::NumericalBreakdown(
            "warm-start support must be distinct and hold at most n points".into(),
        ));
    }
    let state = SupportState::new(inst, support, x)?;
    let report = check_spair(inst, &state);
    if !report.is_valid(inst.scale(), 1e-8, -1e-10, cfg.eps_rank) {
        return Err(Error::NumericalBreakdown(format!(
            "warm-start pair is not dual feasible: {report:?}"
        )));
    }
    Solver::new(inst, cfg, state, trace).run()
}

struct Solver<'a> {
    inst: &'a Instance,
    cfg: &'a SolverConfig,
    state: SupportState,
    stats: SolveStats,
    trace: Option<&'a mut Trace>,
    scale: f64,
    rank_tol: f64,
    feas_tol: f64,
    tol: StepTolerances,
}

impl<'a> Solver<'a> {
    fn new(
        inst: &'a Instance,
        cfg: &'a SolverConfig,
        state: SupportState,
        trace: Option<&'a mut Trace>,
    ) -> Self {
        let scale = inst.scale();
        Self {
            inst,
            cfg,
            state,
            stats: SolveStats::default(),
            trace,
            scale,
            rank_tol: cfg.eps_rank * scale,
            feas_tol: cfg.eps_feas * scale,
            tol: cfg.step_tolerances(scale),
        }
    }

    fn run(mut self) -> Result<SolveResult> {
        let start = Instant::now();
        let limit = self.cfg.iteration_limit(self.inst.m());
        if let Some(t) = self.trace.as_deref_mut() {
            t.major_x0.push(self.state.x.height);
            t.supports.push(self.state.support.clone());
        }
        while let Some(entering) = select_violated(self.inst, &self.state.x, self.cfg) {
            if self.stats.spair_updates >= limit {
                self.stats.wall_time = start.elapsed();
                let best = self.result()?;
                return Err(Error::IterationLimit {
                    limit,
                    best: Box::new(best),
                });
            }
            let x0_before = self.state.x.height;
            let snapshot = (self.state.clone(), self.stats.clone());
            let mut outcome = self.major_iteration(entering);
            if outcome.is_ok() && !self.decreased(x0_before) {
                outcome = Err(Error::NumericalBreakdown(format!(
                    "objective increased from {x0_before} to {}",
                    self.state.x.height
                )));
            }
            if let Err(first) = outcome {
                self.recover(snapshot, entering, x0_before, first)?;
            }
            if self.state.qr.updates() >= self.cfg.refactor_every {
                self.state.refactor(self.inst);
            }
            if let Some(t) = self.trace.as_deref_mut() {
                t.major_x0.push(self.state.x.height);
                t.supports.push(self.state.support.clone());
            }
        }
        self.stats.wall_time = start.elapsed();
        self.result()
    }

    fn decreased(&self, x0_before: f64) -> bool {
        self.state.x.height.is_finite() && self.state.x.height <= x0_before + 1e-9 * self.scale
    }

    /// Restores the pre-iteration state, refactors, re-validates the support
    /// pair and retries the iteration once.
    fn recover(
        &mut self,
        snapshot: (SupportState, SolveStats),
        entering: usize,
        x0_before: f64,
        first: Error,
    ) -> Result<()> {
        if !is_recoverable(&first) {
            return Err(first);
        }
        (self.state, self.stats) = snapshot;
        self.state.refactor(self.inst);
        let report = check_spair(self.inst, &self.state);
        if !report.is_valid(self.scale, 1e-7, -1e-7, self.rank_tol / self.scale) {
            return Err(Error::NumericalBreakdown(format!(
                "{first}; support pair invalid after refactorization: {report:?}"
            )));
        }
        match self.major_iteration(entering) {
            Ok(()) if self.decreased(x0_before) => Ok(()),
            Ok(()) => Err(Error::NumericalBreakdown(format!(
                "{first}; objective increased after refactorization"
            ))),
            Err(second) => Err(Error::NumericalBreakdown(format!(
                "{first}; retry after refactorization failed: {second}"
            ))),
        }
    }

    fn record(&mut self, kind: StepKind, entering: usize) {
        self.record_drop(kind, entering, None, None);
    }

    fn record_drop(&mut self, kind: StepKind, entering: usize, dropped: Option<usize>, ratio: Option<f64>) {
        if let Some(t) = self.trace.as_deref_mut() {
            t.events.push(TraceEvent {
                kind,
                entering,
                x0: self.state.x.height,
                support_len: self.state.support.len(),
                dropped,
                ratio,
            });
        }
    }

    fn support_points(&self) -> impl Iterator<Item = &Point> {
        self.state.support.iter().map(|&i| self.inst.point(i))
    }

    fn major_iteration(&mut self, entering: usize) -> Result<()> {
        let inst = self.inst;
        let p_star = inst.point(entering);

        if is_point_solution(p_star, self.support_points(), self.feas_tol) {
            self.enter_as_point_solution(entering);
            return Ok(());
        }
        if self.state.support.len() == 1 && self.cfg.use_two_point_shortcut {
            return self.two_point_update(entering);
        }

        let mut cs = CurveSystem::build(inst, &self.state, p_star, self.rank_tol)?;
        if cs.is_affinely_dependent() {
            let drop = affdep_drop(&cs, self.state.x.height)?;
            let dropped = self.state.remove(drop.position)?;
            self.stats.affdep_drops += 1;
            self.stats.spair_updates += 1;
            self.record_drop(StepKind::AffDepDrop, entering, Some(dropped), Some(drop.alpha_star));
            cs = CurveSystem::build(inst, &self.state, p_star, self.rank_tol)?;
            if cs.is_affinely_dependent() && self.state.support.len() > 1 {
                return Err(Error::NumericalBreakdown(
                    "entering point still affinely dependent after ratio-test drop".into(),
                ));
            }
        }

        loop {
            if self.state.support.len() == 1 {
                if self.cfg.use_two_point_shortcut {
                    return self.two_point_update(entering);
                }
                if is_point_solution(p_star, self.support_points(), self.feas_tol) {
                    self.enter_as_point_solution(entering);
                    return Ok(());
                }
            }
            let x0j = self.state.x.height;
            let partial = partial_step(&cs, x0j, &self.tol);
            let full = full_step(&cs, x0j, &self.tol);
            self.stats.spair_updates += 1;
            match partial {
                Some(step) if step.x0 >= full => {
                    let xbar = cs.gamma_plus(step.x0)?;
                    self.state.x = Point::new(step.x0, xbar);
                    let dropped = self.state.remove(step.position)?;
                    self.stats.partial_steps += 1;
                    self.record_drop(StepKind::PartialStep, entering, Some(dropped), None);
                    cs = CurveSystem::build(inst, &self.state, p_star, self.rank_tol)?;
                    if cs.is_affinely_dependent() {
                        return Err(Error::NumericalBreakdown(
                            "support became affinely dependent after a partial step".into(),
                        ));
                    }
                }
                _ if full == f64::NEG_INFINITY => {
                    return Err(Error::NumericalBreakdown(format!(
                        "curve search for point {entering} found neither a partial nor a full step"
                    )));
                }
                _ => {
                    let xbar = cs.gamma_plus(full)?;
                    self.state.x = Point::new(full, xbar);
                    self.state.push(inst, entering)?;
                    self.stats.major_iterations += 1;
                    self.record(StepKind::FullStep, entering);
                    return Ok(());
                }
            }
        }
    }

    fn enter_as_point_solution(&mut self, entering: usize) {
        self.state = SupportState::singleton(self.inst, entering);
        self.stats.major_iterations += 1;
        self.stats.spair_updates += 1;
        self.record(StepKind::PointSolution, entering);
    }

    /// Replaces the singleton support `{a}` by the solution of the two-point
    /// problem on `a` and the entering point.
    fn two_point_update(&mut self, entering: usize) -> Result<()> {
        let inst = self.inst;
        let anchor = self.state.support[0];
        let x = two_point_solve(inst.point(anchor), inst.point(entering))?;
        let star = inst.point(entering);
        self.stats.major_iterations += 1;
        self.stats.spair_updates += 1;
        if x.height >= star.height {
            // the entering point dominates
            self.state = SupportState::singleton(inst, entering);
        } else if x.height >= inst.point(anchor).height {
            return Err(Error::NumericalBreakdown(format!(
                "point {entering} is not violated by its two-point subproblem"
            )));
        } else {
            self.state = SupportState::singleton(inst, anchor);
            self.state.x = x;
            self.state.push(inst, entering)?;
        }
        self.record(StepKind::TwoPoint, entering);
        Ok(())
    }

    fn result(&self) -> Result<SolveResult> {
        let alpha = support_coefficients(self.inst, &self.state, self.rank_tol)?;
        let dual = reconstruct_dual(self.inst, &self.state.support, &alpha, &self.state.x);
        Ok(SolveResult {
            x_star: self.state.x.clone(),
            support: self.state.support.clone(),
            dual,
            stats: self.stats.clone(),
        })
    }
}

fn is_recoverable(e: &Error) -> bool {
    matches!(
        e,
        Error::NumericalBreakdown(_)
            | Error::RankDeficient { .. }
            | Error::AffinelyDependent
            | Error::NoRealPoint { .. }
            | Error::NoNegativeSigma
            | Error::FullSupport(_)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::kkt_check;

    fn inst(rows: &[Vec<f64>]) -> Instance {
        Instance::from_rows(rows).unwrap()
    }

    #[test]
    fn initial_pair_is_lowest_point() {
        let p = inst(&[vec![3.0, 1.0, 1.0], vec![0.0, 0.0, 0.0]]);
        let s = initial_spair(&p);
        assert_eq!(s.support, vec![1]);
        assert_eq!(s.x, *p.point(1));

        let single = inst(&[vec![2.0, 1.0, 1.0]]);
        assert_eq!(initial_spair(&single).support, vec![0]);

        let tied = inst(&[vec![1.0, 0.0, 0.0], vec![0.0, 5.0, 0.0], vec![0.0, -5.0, 0.0]]);
        assert_eq!(initial_spair(&tied).support, vec![1]);
    }

    #[test]
    fn select_violated_rules() {
        let p = inst(&[vec![1.0, 0.0, 0.0], vec![5.0, 1.0, 1.0]]);
        let x = Point::from_slice(&[0.0, 0.0, 0.0]);
        assert_eq!(select_violated(&p, &x, &SolverConfig::default()), None);

        let p = inst(&[vec![0.0, 1.5, 0.0], vec![0.0, 3.0, 0.0], vec![5.0, 0.0, 0.0]]);
        assert_eq!(select_violated(&p, &x, &SolverConfig::default()), Some(1));
        let first = SolverConfig {
            pivot_rule: PivotRule::FirstViolated,
            ..Default::default()
        };
        assert_eq!(select_violated(&p, &x, &first), Some(0));

        let p = inst(&[vec![5.0, 0.0, 0.0], vec![0.0, 2.0, 0.0]]);
        assert_eq!(select_violated(&p, &x, &SolverConfig::default()), Some(1));
        assert_eq!(select_violated(&p, &x, &first), Some(1));
    }

    #[test]
    fn circumcenter_instance() {
        let p = inst(&[vec![0.0, -1.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 3.0]]);
        let res = solve(&p, &SolverConfig::default()).unwrap();
        assert!((res.x0() + 5.0 / 3.0).abs() < 1e-12);
        assert!(res.x_star.spatial[0].abs() < 1e-12);
        assert!((res.x_star.spatial[1] - 4.0 / 3.0).abs() < 1e-12);
        let mut s = res.support.clone();
        s.sort();
        assert_eq!(s, vec![0, 1, 2]);
        assert!(kkt_check(&p, &res.x_star, &res.dual, 1e-10).passed);
    }

    #[test]
    fn affdep_instance() {
        let p = inst(&[vec![0.0, -1.0, 0.0], vec![0.0, 1.0, 0.0], vec![-0.9, 0.5, 0.0]]);
        // the lowest point is the third one, so a cold start reaches the
        // optimum with a single two-point update
        let (cold, trace) = solve_traced(&p, &SolverConfig::default()).unwrap();
        assert_eq!(trace.events.len(), 1);
        assert_eq!(trace.events[0].kind, StepKind::TwoPoint);
        // from the pair {p1, p2} at (-1; 0, 0) the third point lies on the
        // segment of the support, forcing the ratio-test drop of p2
        let warm = solve_from(&p, vec![0, 1], Point::from_slice(&[-1.0, 0.0, 0.0]), &SolverConfig::default())
            .unwrap();
        assert_eq!(warm.stats.affdep_drops, 1);
        let (_, trace) =
            solve_from_traced(&p, vec![0, 1], Point::from_slice(&[-1.0, 0.0, 0.0]), &SolverConfig::default())
                .unwrap();
        let drop = &trace.events[0];
        assert_eq!(drop.kind, StepKind::AffDepDrop);
        assert_eq!(drop.dropped, Some(1));
        assert!((drop.ratio.unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert_eq!(trace.events[1].kind, StepKind::TwoPoint);
        for res in [&cold, &warm] {
            assert!((res.x0() + 1.2).abs() < 1e-12);
            assert!((res.x_star.spatial[0] - 0.2).abs() < 1e-12);
            assert!(res.x_star.spatial[1].abs() < 1e-12);
            let mut s = res.support.clone();
            s.sort();
            assert_eq!(s, vec![0, 2]);
            assert!(kkt_check(&p, &res.x_star, &res.dual, 1e-10).passed);
        }
    }

    #[test]
    fn dominated_point_is_solution() {
        let p = inst(&[vec![1.0, 0.0, 0.0], vec![-3.0, 0.5, 0.5], vec![2.0, 1.0, -1.0]]);
        let res = solve(&p, &SolverConfig::default()).unwrap();
        assert_eq!(res.support, vec![1]);
        assert_eq!(res.x_star, *p.point(1));
        assert_eq!(res.stats.major_iterations, 0);
        assert_eq!(res.dual.y(1).0, 1.0);
    }

    #[test]
    fn without_shortcut_matches() {
        let rows = vec![
            vec![0.3, -1.0, 0.2],
            vec![-0.1, 1.0, 0.4],
            vec![0.2, 0.0, 3.0],
            vec![-0.4, 0.4, -2.0],
            vec![1.0, 2.5, 2.5],
        ];
        let p = inst(&rows);
        let a = solve(&p, &SolverConfig::default()).unwrap();
        let cfg = SolverConfig {
            use_two_point_shortcut: false,
            ..Default::default()
        };
        let b = solve(&p, &cfg).unwrap();
        assert!((a.x0() - b.x0()).abs() < 1e-10);
        assert!((&a.x_star.spatial - &b.x_star.spatial).amax() < 1e-10);
        assert!(kkt_check(&p, &b.x_star, &b.dual, 1e-9).passed);
    }

    #[test]
    fn warm_start_from_valid_pair() {
        let p = inst(&[vec![0.0, -1.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 3.0]]);
        let res = solve_from(&p, vec![0, 1], Point::from_slice(&[-1.0, 0.0, 0.0]), &SolverConfig::default())
            .unwrap();
        assert!((res.x0() + 5.0 / 3.0).abs() < 1e-12);

        let bad = solve_from(&p, vec![0, 1], Point::from_slice(&[-2.0, 0.0, 0.0]), &SolverConfig::default());
        assert!(bad.is_err());
    }

    #[test]
    fn iteration_limit_reports_best_state() {
        let p = inst(&[vec![0.0, -1.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 3.0]]);
        let cfg = SolverConfig {
            max_iterations: Some(1),
            ..Default::default()
        };
        match solve(&p, &cfg) {
            Err(Error::IterationLimit { limit: 1, best }) => {
                assert!(best.x0() <= 0.0);
                assert_eq!(best.stats.spair_updates, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spair_check_flags_bad_pairs() {
        let p = inst(&[vec![0.0, -1.0, 0.0], vec![0.0, 1.0, 0.0]]);
        let good = SupportState::new(&p, vec![0, 1], Point::from_slice(&[-1.0, 0.0, 0.0])).unwrap();
        assert!(check_spair(&p, &good).is_valid(1.0, 1e-12, 1e-10, 1e-12));
        let off = SupportState::new(&p, vec![0, 1], Point::from_slice(&[-1.0, 0.0, 0.5])).unwrap();
        assert!(!check_spair(&p, &off).is_valid(1.0, 1e-12, 1e-10, 1e-12));
    }
}
