//! Problem data, solutions and dual certificates.
//!
//! A point `p = (p0; pbar)` lives in `R^n`; `p0` is its height and `pbar`
//! its spatial part in `R^(n-1)`. An [`Instance`] is an ordered list of such
//! points; the solver looks for the highest apex `x` such that every point
//! lies in the translated cone `x + Q`.

use std::time::Duration;

use nalgebra::DVector;

use crate::cone::norm2;
use crate::error::{Error, Result};
use crate::qr::QrFactors;

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub height: f64,
    pub spatial: DVector<f64>,
}

impl Point {
    pub fn new(height: f64, spatial: DVector<f64>) -> Self {
        Self { height, spatial }
    }

    /// Builds a point from `[p0, pbar_1, ..., pbar_{n-1}]`.
    pub fn from_slice(coords: &[f64]) -> Self {
        assert!(!coords.is_empty(), "a point needs at least its height");
        Self {
            height: coords[0],
            spatial: DVector::from_column_slice(&coords[1..]),
        }
    }

    /// Ambient dimension `n` (height plus spatial coordinates).
    pub fn dim(&self) -> usize {
        self.spatial.len() + 1
    }

    pub fn is_finite(&self) -> bool {
        self.height.is_finite() && self.spatial.iter().all(|c| c.is_finite())
    }

    /// Euclidean norm of the full lifted vector.
    pub fn norm(&self) -> f64 {
        let s = norm2(self.spatial.as_slice());
        norm2(&[self.height, s])
    }

    pub fn coords(&self) -> Vec<f64> {
        std::iter::once(self.height)
            .chain(self.spatial.iter().copied())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    n: usize,
    points: Vec<Point>,
}

impl Instance {
    pub fn new(n: usize, points: Vec<Point>) -> Result<Self> {
        let inst = Self { n, points };
        validate_instance(&inst)?;
        Ok(inst)
    }

    /// Infers `n` from the first point.
    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        let n = points.first().ok_or(Error::EmptyInstance)?.dim();
        Self::new(n, points)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let points = rows.iter().map(|r| Point::from_slice(r)).collect();
        Self::from_points(points)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    /// `max(1, max_i ||p_i||)`; every absolute tolerance is multiplied by this.
    pub fn scale(&self) -> f64 {
        self.points.iter().map(Point::norm).fold(1.0, f64::max)
    }
}

/// Checks the dimension and finiteness invariants of an instance.
pub fn validate_instance(inst: &Instance) -> Result<()> {
    if inst.n < 2 {
        return Err(Error::InvalidDimension(inst.n));
    }
    if inst.points.is_empty() {
        return Err(Error::EmptyInstance);
    }
    for (i, p) in inst.points.iter().enumerate() {
        if p.dim() != inst.n {
            return Err(Error::DimensionMismatch {
                expected: inst.n - 1,
                found: p.spatial.len(),
                index: Some(i),
            });
        }
        if !p.is_finite() {
            return Err(Error::NonFiniteCoordinate { index: i });
        }
    }
    Ok(())
}

/// Nonzero block `y_i = (y0; ybar)` of a dual certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct DualEntry {
    pub index: usize,
    pub y0: f64,
    pub ybar: DVector<f64>,
}

/// Dual solution `y_1, ..., y_m`, stored sparsely: indices without an entry
/// are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    m: usize,
    n: usize,
    entries: Vec<DualEntry>,
}

impl DualCertificate {
    pub fn new(m: usize, n: usize, mut entries: Vec<DualEntry>) -> Self {
        entries.sort_by_key(|e| e.index);
        debug_assert!(entries.windows(2).all(|w| w[0].index < w[1].index));
        Self { m, n, entries }
    }

    /// The all-zero certificate (infeasible for any instance).
    pub fn zero(m: usize, n: usize) -> Self {
        Self::new(m, n, Vec::new())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[DualEntry] {
        &self.entries
    }

    /// Dense `y_i` for any index, zero off the support.
    pub fn y(&self, i: usize) -> (f64, DVector<f64>) {
        match self.entries.binary_search_by_key(&i, |e| e.index) {
            Ok(k) => (self.entries[k].y0, self.entries[k].ybar.clone()),
            Err(_) => (0.0, DVector::zeros(self.n - 1)),
        }
    }

    /// `sum_i y_i`, which equals `e_1` for a feasible certificate.
    pub fn sum(&self) -> (f64, DVector<f64>) {
        let mut s0 = 0.0;
        let mut sbar = DVector::zeros(self.n - 1);
        for e in &self.entries {
            s0 += e.y0;
            sbar += &e.ybar;
        }
        (s0, sbar)
    }

    /// Dual objective `sum_i <p_i, y_i>`.
    pub fn objective(&self, inst: &Instance) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                let p = inst.point(e.index);
                p.height * e.y0 + p.spatial.dot(&e.ybar)
            })
            .sum()
    }
}

/// Working state of a solve: the support set (instance indices, anchor
/// first), the current iterate and the QR factors of the anchored difference
/// matrix of the support's spatial parts.
#[derive(Debug, Clone)]
pub struct SupportState {
    pub support: Vec<usize>,
    pub x: Point,
    pub qr: QrFactors,
}

impl SupportState {
    /// Builds the state with freshly computed factors.
    pub fn new(inst: &Instance, support: Vec<usize>, x: Point) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::EmptyInstance);
        }
        let m = inst.m();
        if let Some(&bad) = support.iter().find(|&&i| i >= m) {
            return Err(Error::IndexOutOfRange { index: bad, len: m });
        }
        if x.dim() != inst.n() {
            return Err(Error::dims(inst.n(), x.dim()));
        }
        let qr = Self::factor(inst, &support);
        Ok(Self { support, x, qr })
    }

    /// Singleton support at the point itself.
    pub fn singleton(inst: &Instance, index: usize) -> Self {
        Self {
            support: vec![index],
            x: inst.point(index).clone(),
            qr: QrFactors::empty(inst.n() - 1),
        }
    }

    fn factor(inst: &Instance, support: &[usize]) -> QrFactors {
        let anchor = &inst.point(support[0]).spatial;
        let cols: Vec<_> = support[1..]
            .iter()
            .map(|&i| &inst.point(i).spatial - anchor)
            .collect();
        QrFactors::from_columns(inst.n() - 1, &cols)
    }

    /// Recomputes the QR factors from scratch.
    pub fn refactor(&mut self, inst: &Instance) {
        self.qr = Self::factor(inst, &self.support);
    }

    /// Anchored difference matrix built directly from the instance.
    pub fn difference_matrix(&self, inst: &Instance) -> nalgebra::DMatrix<f64> {
        let anchor = &inst.point(self.support[0]).spatial;
        let k = inst.n() - 1;
        let mut m = nalgebra::DMatrix::zeros(k, self.support.len() - 1);
        for (c, &i) in self.support[1..].iter().enumerate() {
            m.set_column(c, &(&inst.point(i).spatial - anchor));
        }
        m
    }

    /// Appends an index, extending the factors with one column.
    pub fn push(&mut self, inst: &Instance, index: usize) -> Result<()> {
        let col = &inst.point(index).spatial - &inst.point(self.support[0]).spatial;
        self.qr.append_column(&col)?;
        self.support.push(index);
        Ok(())
    }

    /// Removes support position `pos` (0 is the anchor).
    pub fn remove(&mut self, pos: usize) -> Result<usize> {
        if pos >= self.support.len() {
            return Err(Error::IndexOutOfRange {
                index: pos,
                len: self.support.len(),
            });
        }
        if self.support.len() == 1 {
            return Err(Error::IndexOutOfRange { index: pos, len: 1 });
        }
        self.qr.remove_support_point(pos)?;
        Ok(self.support.remove(pos))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    /// Points added to the support set.
    pub major_iterations: usize,
    /// Support-pair updates (curve searches, shortcuts and drops).
    pub spair_updates: usize,
    pub partial_steps: usize,
    pub affdep_drops: usize,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x_star: Point,
    pub support: Vec<usize>,
    pub dual: DualCertificate,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn x0(&self) -> f64 {
        self.x_star.height
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_instance() {
        let inst = Instance::new(
            3,
            vec![
                Point::from_slice(&[0.0, 1.0, 2.0]),
                Point::from_slice(&[1.0, -1.0, 0.5]),
            ],
        );
        assert!(inst.is_ok());
    }

    #[test]
    fn short_spatial_part_is_rejected() {
        let err = Instance::new(3, vec![Point::from_slice(&[0.0, 1.0])]).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 1,
                index: Some(0)
            }
        ));
    }

    #[test]
    fn nan_is_rejected() {
        let err = Instance::new(
            3,
            vec![
                Point::from_slice(&[0.0, 1.0, 2.0]),
                Point::from_slice(&[0.0, f64::NAN, 2.0]),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFiniteCoordinate { index: 1 }));
    }

    #[test]
    fn empty_and_low_dimension() {
        assert!(matches!(
            Instance::new(3, vec![]).unwrap_err(),
            Error::EmptyInstance
        ));
        assert!(matches!(
            Instance::new(1, vec![Point::from_slice(&[1.0])]).unwrap_err(),
            Error::InvalidDimension(1)
        ));
    }

    #[test]
    fn scale_is_at_least_one() {
        let inst = Instance::from_rows(&[vec![0.1, 0.0], vec![0.0, 0.2]]).unwrap();
        assert_eq!(inst.scale(), 1.0);
        let inst = Instance::from_rows(&[vec![3.0, 4.0], vec![0.0, 0.2]]).unwrap();
        assert!((inst.scale() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn sparse_dual_reads_zero_off_support() {
        let cert = DualCertificate::new(
            3,
            3,
            vec![DualEntry {
                index: 1,
                y0: 1.0,
                ybar: DVector::zeros(2),
            }],
        );
        assert_eq!(cert.y(0).0, 0.0);
        assert_eq!(cert.y(1).0, 1.0);
        assert_eq!(cert.sum().0, 1.0);
    }
}
