//! Second-order cone predicates and the closed-form two-point solution.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::model::Point;

/// Two-norm with running rescaling, so that neither huge nor tiny
/// components overflow or underflow when squared.
pub fn norm2(v: &[f64]) -> f64 {
    let mut scale = 0.0_f64;
    let mut ssq = 1.0_f64;
    for &x in v {
        if x != 0.0 {
            let a = x.abs();
            if scale < a {
                ssq = 1.0 + ssq * (scale / a) * (scale / a);
                scale = a;
            } else {
                ssq += (a / scale) * (a / scale);
            }
        }
    }
    scale * ssq.sqrt()
}

/// `||a - b||` without allocating.
pub fn dist2(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let mut scale = 0.0_f64;
    let mut ssq = 1.0_f64;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = x - y;
        if d != 0.0 {
            let a = d.abs();
            if scale < a {
                ssq = 1.0 + ssq * (scale / a) * (scale / a);
                scale = a;
            } else {
                ssq += (a / scale) * (a / scale);
            }
        }
    }
    scale * ssq.sqrt()
}

fn check_dims(x: &Point, p: &Point) -> Result<()> {
    if x.spatial.len() != p.spatial.len() {
        return Err(Error::dims(x.dim(), p.dim()));
    }
    Ok(())
}

/// `||pbar - xbar|| - (p0 - x0)`; positive when `x` violates the constraint
/// `x <=_Q p`.
pub fn infeasibility(x: &Point, p: &Point) -> Result<f64> {
    check_dims(x, p)?;
    Ok(infeasibility_unchecked(x, p))
}

#[inline]
pub(crate) fn infeasibility_unchecked(x: &Point, p: &Point) -> f64 {
    dist2(&p.spatial, &x.spatial) - (p.height - x.height)
}

/// `x <=_Q p` up to an absolute tolerance `tol` (callers pass `eps * scale`).
pub fn cone_leq(x: &Point, p: &Point, tol: f64) -> Result<bool> {
    Ok(infeasibility(x, p)? <= tol)
}

/// Exact solution of the two-point problem.
///
/// `x0 = min(p10, p20, (p10 + p20 - ||pbar1 - pbar2||) / 2)` and `xbar` is
/// the weighted combination of the spatial parts that puts both points on the
/// cone boundary. If both weights vanish the points coincide in space and
/// height, and `pbar1` is returned.
pub fn two_point_solve(p1: &Point, p2: &Point) -> Result<Point> {
    check_dims(p1, p2)?;
    let d = dist2(&p1.spatial, &p2.spatial);
    let x0 = p1
        .height
        .min(p2.height)
        .min(0.5 * (p1.height + p2.height - d));
    let a = p1.height - x0;
    let b = p2.height - x0;
    let denom = a + b;
    let spatial = if denom > 0.0 {
        (&p2.spatial * a + &p1.spatial * b) / denom
    } else {
        p1.spatial.clone()
    };
    Ok(Point::new(x0, spatial))
}

/// True iff `p_star <=_Q p` for every `p` in `set`; then `p_star` solves the
/// problem over `set` plus itself.
pub fn is_point_solution<'a, I>(p_star: &Point, set: I, tol: f64) -> bool
where
    I: IntoIterator<Item = &'a Point>,
{
    set.into_iter()
        .all(|p| p.spatial.len() == p_star.spatial.len() && infeasibility_unchecked(p_star, p) <= tol)
}
