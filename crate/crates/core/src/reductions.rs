//! Ball problems that reduce to the cone infimum.
//!
//! A ball `B(c, r)` is lifted to `(-r; c)` when it must be enclosed and to
//! `(r; c)` when it must be met. With `x*` the optimum of the lifted instance,
//! the answer is `B(xbar*, -x0*)`, or `B(xbar*, x0*)` for the largest ball
//! inside an intersection when `x0* > 0`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::model::{Instance, Point, SolveResult};
use crate::solver::{solve, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: DVector<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: DVector<f64>, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn from_slice(center: &[f64], radius: f64) -> Self {
        Self::new(DVector::from_column_slice(center), radius)
    }

    /// Zero-radius ball at `center`.
    pub fn point(center: &[f64]) -> Self {
        Self::from_slice(center, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn validate(&self, index: usize, d: usize) -> Result<()> {
        if !self.radius.is_finite() || self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidBall { index, reason: "non-finite coordinate" });
        }
        if self.radius < 0.0 {
            return Err(Error::InvalidBall { index, reason: "negative radius" });
        }
        if self.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.dim(),
                index: Some(index),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallMode {
    Enclosing,
    Intersecting,
    Enclosed,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallResult {
    pub ball: Ball,
    /// Input balls that touch the answer. For the mixed problem these index
    /// the enclosed group followed by the intersected group.
    pub support_indices: Vec<usize>,
    pub mode: BallMode,
    /// Raw solver output on the lifted instance.
    pub solution: SolveResult,
}

fn lift(enclose: &[Ball], intersect: &[Ball]) -> Result<Instance> {
    let d = enclose
        .first()
        .or(intersect.first())
        .ok_or(Error::EmptyInstance)?
        .dim();
    if d == 0 {
        return Err(Error::InvalidDimension(1));
    }
    let signed = enclose
        .iter()
        .map(|b| (b, -1.0))
        .chain(intersect.iter().map(|b| (b, 1.0)));
    let mut points = Vec::with_capacity(enclose.len() + intersect.len());
    for (i, (b, sign)) in signed.enumerate() {
        b.validate(i, d)?;
        points.push(Point::new(sign * b.radius, b.center.clone()));
    }
    Instance::new(d + 1, points)
}

fn finish(solution: SolveResult, mode: BallMode) -> BallResult {
    let radius = match mode {
        BallMode::Enclosed => solution.x0(),
        _ => -solution.x0(),
    };
    let mut support_indices = solution.support.clone();
    support_indices.sort_unstable();
    BallResult {
        ball: Ball::new(solution.x_star.spatial.clone(), radius),
        support_indices,
        mode,
        solution,
    }
}

/// Smallest ball containing every input ball.
pub fn min_enclosing_ball(balls: &[Ball], cfg: &SolverConfig) -> Result<BallResult> {
    let inst = lift(balls, &[])?;
    Ok(finish(solve(&inst, cfg)?, BallMode::Enclosing))
}

/// Smallest ball meeting every input ball. When the balls share interior
/// points there is no such ball of positive radius; the lifted optimum is
/// then the largest ball inside their intersection, returned with mode
/// [`BallMode::Enclosed`].
pub fn min_intersecting_ball(balls: &[Ball], cfg: &SolverConfig) -> Result<BallResult> {
    let inst = lift(&[], balls)?;
    let sol = solve(&inst, cfg)?;
    let mode = if sol.x0() > 0.0 {
        BallMode::Enclosed
    } else {
        BallMode::Intersecting
    };
    Ok(finish(sol, mode))
}

/// Largest ball contained in every input ball.
pub fn largest_enclosed_ball(balls: &[Ball], cfg: &SolverConfig) -> Result<BallResult> {
    let inst = lift(&[], balls)?;
    let sol = solve(&inst, cfg)?;
    if sol.x0() <= 0.0 {
        return Err(Error::EmptyIntersection { x0: sol.x0() });
    }
    Ok(finish(sol, BallMode::Enclosed))
}

/// Smallest ball enclosing the first group and meeting the second.
pub fn min_enclosing_and_intersecting(
    enclose: &[Ball],
    intersect: &[Ball],
    cfg: &SolverConfig,
) -> Result<BallResult> {
    if enclose.is_empty() {
        return min_intersecting_ball(intersect, cfg);
    }
    let inst = lift(enclose, intersect)?;
    let mode = if intersect.is_empty() {
        BallMode::Enclosing
    } else {
        BallMode::Mixed
    };
    Ok(finish(solve(&inst, cfg)?, mode))
}
