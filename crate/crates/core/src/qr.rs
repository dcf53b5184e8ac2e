//! Dense QR factorization of the anchored difference matrix
//! `M = [pbar_j2 - pbar_j1, ..., pbar_js - pbar_j1]`, kept up to date with
//! Givens rotations as support points enter and leave.
//!
//! `Q` is stored explicitly as a `k x k` orthogonal matrix (`k = n - 1`) and
//! `R` as a `k x (s-1)` upper-triangular matrix whose entries below the
//! diagonal are exactly zero. The leading `s-1` columns of `Q` span
//! `range(M)`; the remaining ones span its orthogonal complement and give the
//! residual `z` directly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QrFactors {
    q: DMatrix<f64>,
    r: DMatrix<f64>,
    updates: usize,
}

#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: f64,
}

impl Givens {
    /// Rotation mapping `(a, b)` to `(r, 0)`.
    fn zeroing(a: f64, b: f64) -> (Self, f64) {
        if b == 0.0 {
            return (Givens { c: 1.0, s: 0.0 }, a);
        }
        let r = a.hypot(b);
        (Givens { c: a / r, s: b / r }, r)
    }

    fn rotate_rows(self, m: &mut DMatrix<f64>, i: usize, j: usize, cols: std::ops::Range<usize>) {
        for col in cols {
            let x = m[(i, col)];
            let y = m[(j, col)];
            m[(i, col)] = self.c * x + self.s * y;
            m[(j, col)] = -self.s * x + self.c * y;
        }
    }

    fn rotate_cols(self, m: &mut DMatrix<f64>, i: usize, j: usize) {
        for row in 0..m.nrows() {
            let x = m[(row, i)];
            let y = m[(row, j)];
            m[(row, i)] = self.c * x + self.s * y;
            m[(row, j)] = -self.s * x + self.c * y;
        }
    }
}

impl QrFactors {
    /// Factors of the `k x 0` matrix.
    pub fn empty(k: usize) -> Self {
        Self {
            q: DMatrix::identity(k, k),
            r: DMatrix::zeros(k, 0),
            updates: 0,
        }
    }

    /// Householder factorization from scratch. Column rank is not required.
    pub fn build(m: &DMatrix<f64>) -> Self {
        let k = m.nrows();
        let cols = m.ncols();
        let mut r = m.clone();
        let mut q = DMatrix::<f64>::identity(k, k);
        for j in 0..cols.min(k) {
            let x = r.view((j, j), (k - j, 1));
            let xnorm = x.norm();
            if xnorm == 0.0 {
                continue;
            }
            let alpha = if x[0] >= 0.0 { -xnorm } else { xnorm };
            let mut v: DVector<f64> = x.column(0).into_owned();
            v[0] -= alpha;
            let vnorm = v.norm();
            if vnorm == 0.0 {
                continue;
            }
            v /= vnorm;
            // R <- (I - 2vv^T) R on the trailing block
            for c in j..cols {
                let dot: f64 = (0..k - j).map(|t| v[t] * r[(j + t, c)]).sum();
                for t in 0..k - j {
                    r[(j + t, c)] -= 2.0 * v[t] * dot;
                }
            }
            // Q <- Q (I - 2vv^T)
            for row in 0..k {
                let dot: f64 = (0..k - j).map(|t| q[(row, j + t)] * v[t]).sum();
                for t in 0..k - j {
                    q[(row, j + t)] -= 2.0 * dot * v[t];
                }
            }
            r[(j, j)] = alpha;
            for t in j + 1..k {
                r[(t, j)] = 0.0;
            }
        }
        Self { q, r, updates: 0 }
    }

    pub fn from_columns(k: usize, columns: &[DVector<f64>]) -> Self {
        if columns.is_empty() {
            return Self::empty(k);
        }
        Self::build(&DMatrix::from_columns(columns))
    }

    /// Row dimension `k`.
    pub fn nrows(&self) -> usize {
        self.q.nrows()
    }

    /// Column count `s - 1`.
    pub fn ncols(&self) -> usize {
        self.r.ncols()
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// Updates applied since the last full build.
    pub fn updates(&self) -> usize {
        self.updates
    }

    /// `Q R`, i.e. the matrix currently factored.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.q * &self.r
    }

    /// `max |Q^T Q - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let k = self.nrows();
        let g = self.q.transpose() * &self.q - DMatrix::<f64>::identity(k, k);
        g.amax()
    }

    /// `max |Q R - m|`.
    pub fn reconstruction_error(&self, m: &DMatrix<f64>) -> f64 {
        (self.reconstruct() - m).amax()
    }

    /// Factors of `[M | col]`.
    pub fn append_column(&mut self, col: &DVector<f64>) -> Result<()> {
        let k = self.nrows();
        let s = self.ncols();
        if col.len() != k {
            return Err(Error::dims(k, col.len()));
        }
        if s >= k {
            return Err(Error::FullSupport(s));
        }
        let mut w = self.q.tr_mul(col);
        for i in (s + 1..k).rev() {
            let (g, rr) = Givens::zeroing(w[i - 1], w[i]);
            w[i - 1] = rr;
            w[i] = 0.0;
            g.rotate_cols(&mut self.q, i - 1, i);
        }
        let r = std::mem::replace(&mut self.r, DMatrix::zeros(0, 0));
        let mut r = r.insert_column(s, 0.0);
        for i in 0..=s {
            r[(i, s)] = w[i];
        }
        self.r = r;
        self.updates += 1;
        Ok(())
    }

    /// Factors of `M` with column `j` (0-based) deleted.
    pub fn remove_column(&mut self, j: usize) -> Result<()> {
        let cols = self.ncols();
        if j >= cols {
            return Err(Error::IndexOutOfRange { index: j, len: cols });
        }
        let r = std::mem::replace(&mut self.r, DMatrix::zeros(0, 0));
        self.r = r.remove_column(j);
        self.retriangularize_hessenberg(j);
        self.updates += 1;
        Ok(())
    }

    /// Removes support point `pos` (0-based; `0` is the anchor).
    ///
    /// For `pos > 0` this deletes column `pos - 1`. Removing the anchor
    /// re-anchors on the second support point: the new columns are
    /// `pbar_ji - pbar_j2 = M[:, i] - M[:, 0]`, i.e. the first column is
    /// deleted and the rank-one term `-M[:, 0] 1^T` is added.
    pub fn remove_support_point(&mut self, pos: usize) -> Result<()> {
        let cols = self.ncols();
        if pos > cols {
            return Err(Error::IndexOutOfRange {
                index: pos,
                len: cols + 1,
            });
        }
        if pos > 0 {
            return self.remove_column(pos - 1);
        }
        if cols == 0 {
            // single point support: nothing left to factor
            return Err(Error::IndexOutOfRange { index: 0, len: 1 });
        }
        let first = &self.q * self.r.column(0);
        self.remove_column(0)?;
        if self.ncols() > 0 {
            self.rank_one_update(&(-first));
        }
        Ok(())
    }

    /// Factors of `M + a 1^T`.
    fn rank_one_update(&mut self, a: &DVector<f64>) {
        let k = self.nrows();
        let cols = self.ncols();
        let mut w = self.q.tr_mul(a);
        // reduce w to a multiple of e_1; R becomes upper Hessenberg
        for i in (1..k).rev() {
            let (g, rr) = Givens::zeroing(w[i - 1], w[i]);
            w[i - 1] = rr;
            w[i] = 0.0;
            if i - 1 < cols {
                g.rotate_rows(&mut self.r, i - 1, i, (i - 1)..cols);
            }
            g.rotate_cols(&mut self.q, i - 1, i);
        }
        for c in 0..cols {
            self.r[(0, c)] += w[0];
        }
        self.retriangularize_hessenberg(0);
    }

    /// Zeroes the subdiagonal of `R` from column `start` on.
    fn retriangularize_hessenberg(&mut self, start: usize) {
        let k = self.nrows();
        let cols = self.ncols();
        for c in start..cols {
            if c + 1 >= k {
                break;
            }
            let (g, rr) = Givens::zeroing(self.r[(c, c)], self.r[(c + 1, c)]);
            self.r[(c, c)] = rr;
            self.r[(c + 1, c)] = 0.0;
            g.rotate_rows(&mut self.r, c, c + 1, (c + 1)..cols);
            g.rotate_cols(&mut self.q, c, c + 1);
        }
    }

    fn check_pivots(&self, tol: f64) -> Result<()> {
        for i in 0..self.ncols() {
            let d = self.r[(i, i)];
            if d.is_nan() || d.abs() <= tol {
                return Err(Error::RankDeficient { pivot: i, value: d });
            }
        }
        Ok(())
    }

    /// Solves `R_tri x = y` by back substitution.
    fn back_substitute(&self, mut y: DVector<f64>) -> DVector<f64> {
        let s = self.ncols();
        for i in (0..s).rev() {
            let mut acc = y[i];
            for j in i + 1..s {
                acc -= self.r[(i, j)] * y[j];
            }
            y[i] = acc / self.r[(i, i)];
        }
        y
    }

    /// Solves `R_tri^T x = y` by forward substitution.
    fn forward_substitute(&self, mut y: DVector<f64>) -> DVector<f64> {
        let s = self.ncols();
        for i in 0..s {
            let mut acc = y[i];
            for j in 0..i {
                acc -= self.r[(j, i)] * y[j];
            }
            y[i] = acc / self.r[(i, i)];
        }
        y
    }

    /// Solves `(M^T M) t = rhs` as `R^T R t = rhs`.
    ///
    /// `tol` is the absolute threshold below which a diagonal entry of `R`
    /// counts as zero.
    pub fn solve_normal(&self, rhs: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
        if rhs.len() != self.ncols() {
            return Err(Error::dims(self.ncols(), rhs.len()));
        }
        self.check_pivots(tol)?;
        Ok(self.back_substitute(self.forward_substitute(rhs.clone())))
    }

    /// `M^+ y = R_tri^{-1} Q_M^T y`, the least-squares coefficients of `y`.
    pub fn pinv_apply(&self, y: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
        if y.len() != self.nrows() {
            return Err(Error::dims(self.nrows(), y.len()));
        }
        self.check_pivots(tol)?;
        let s = self.ncols();
        let qty = self.q.columns(0, s).tr_mul(y);
        Ok(self.back_substitute(qty))
    }

    /// `M t = Q_M (R_tri t)`.
    pub fn apply(&self, t: &DVector<f64>) -> DVector<f64> {
        let s = self.ncols();
        let rt = self.r.rows(0, s) * t;
        self.q.columns(0, s) * rt
    }

    /// `M^T y = R^T Q^T y`.
    pub fn apply_transpose(&self, y: &DVector<f64>) -> DVector<f64> {
        let s = self.ncols();
        let qty = self.q.columns(0, s).tr_mul(y);
        self.r.rows(0, s).tr_mul(&qty)
    }

    /// `z = (I - M M^+) d`, computed as `Q_perp Q_perp^T d`.
    pub fn residual(&self, d: &DVector<f64>) -> DVector<f64> {
        let s = self.ncols();
        let k = self.nrows();
        let perp = self.q.columns(s, k - s);
        perp * perp.tr_mul(d)
    }

    /// Returns `(w, z)` with `R_tri w = -Q_M^T d` and `z = (I - M M^+) d`.
    pub fn project_residual(
        &self,
        d: &DVector<f64>,
        tol: f64,
    ) -> Result<(DVector<f64>, DVector<f64>)> {
        if d.len() != self.nrows() {
            return Err(Error::dims(self.nrows(), d.len()));
        }
        let z = self.residual(d);
        let w = -self.pinv_apply(d, tol)?;
        Ok((w, z))
    }
}

/// Convenience wrapper for [`QrFactors::build`].
pub fn qr_build(m: &DMatrix<f64>) -> QrFactors {
    QrFactors::build(m)
}
