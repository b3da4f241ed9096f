//! Dense complex-matrix kernel used by every other module.
//!
//! Matrices are immutable values; every operation returns a new matrix.
//! Shape mismatches in the arithmetic operators are programming errors and
//! panic; data-dependent failures (non-square determinant input,
//! non-Hermitian eigenvalue input) return [`LinalgError`].

use num_complex::Complex;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Complex64 = Complex<f64>;

/// Shared tolerance ledger. Tests and callers reference these constants
/// instead of scattering literals.
pub mod tol {
    /// Max-entry deviation for structural equality of matrices.
    pub const STRUCT_EQ: f64 = 1e-9;
    /// Relative tolerance for determinant/eigenvalue comparisons.
    pub const REL: f64 = 1e-9;
    /// Pivot magnitude threshold for rank computations (rows are
    /// normalized first, so this is effectively relative).
    pub const PIVOT: f64 = 1e-9;
    /// Max-entry deviation allowed when checking that a matrix is Hermitian.
    pub const HERMITIAN: f64 = 1e-9;
    /// Strict-positivity threshold for the product-distance factors.
    pub const PSI_POSITIVE: f64 = 1e-9;
    /// Tolerance for quantities tied to the 4-decimal lattice generator.
    pub const LATTICE: f64 = 1e-3;
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian within tolerance {tolerance} (max deviation {deviation})")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    ///
    /// Panics if `entries.len() != rows * cols` or any entry is non-finite.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        for (idx, e) in entries.iter().enumerate() {
            assert!(
                e.re.is_finite() && e.im.is_finite(),
                "non-finite entry at ({}, {})",
                idx / cols,
                idx % cols
            );
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    /// Fallible constructor for data read from files.
    pub fn try_new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(LinalgError::NotSquare { rows, cols });
        }
        for (idx, e) in entries.iter().enumerate() {
            if !(e.re.is_finite() && e.im.is_finite()) {
                return Err(LinalgError::NonFinite {
                    row: idx / cols,
                    col: idx % cols,
                });
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix from the given diagonal entries.
    pub fn diag(d: &[Complex64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            m.entries[i * n + i] = v;
        }
        m
    }

    /// Builds a matrix from nested rows (mostly for literals in tests and fixtures).
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        assert!(r > 0);
        let c = rows[0].len();
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend_from_slice(row);
        }
        Self::new(r, c, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); self.entries.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                entries[c * self.rows + r] = self.get(r, c).conj();
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); self.entries.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                entries[c * self.rows + r] = self.get(r, c);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * k).collect(),
        }
    }

    /// Matrix product. Panics if `self.cols != rhs.rows`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows * rhs.cols];
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[r * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let lhs_row = r * rhs.cols;
                let rhs_row = k * rhs.cols;
                for c in 0..rhs.cols {
                    out[lhs_row + c] += a * rhs.entries[rhs_row + c];
                }
            }
        }
        Self {
            rows: self.rows,
            cols: rhs.cols,
            entries: out,
        }
    }

    /// Kronecker product of shape (a.rows*b.rows) x (a.cols*b.cols).
    pub fn kron(&self, rhs: &Self) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut entries = vec![Complex64::new(0.0, 0.0); rows * cols];
        for ar in 0..self.rows {
            for ac in 0..self.cols {
                let a = self.get(ar, ac);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for br in 0..rhs.rows {
                    for bc in 0..rhs.cols {
                        entries[(ar * rhs.rows + br) * cols + (ac * rhs.cols + bc)] =
                            a * rhs.get(br, bc);
                    }
                }
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    /// Largest entry magnitude of `self - other`; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tolerance: f64) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols) && self.max_abs_diff(other) <= tolerance
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Determinant via LU decomposition with partial pivoting.
    pub fn det(&self) -> Result<Complex64, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut lu = self.entries.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_mag = lu[col * n + col].norm();
            for r in (col + 1)..n {
                let mag = lu[r * n + col].norm();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = r;
                }
            }
            if pivot_mag == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            if pivot_row != col {
                for c in 0..n {
                    lu.swap(col * n + c, pivot_row * n + c);
                }
                det = -det;
            }
            let pivot = lu[col * n + col];
            det *= pivot;
            for r in (col + 1)..n {
                let factor = lu[r * n + col] / pivot;
                if factor.re == 0.0 && factor.im == 0.0 {
                    continue;
                }
                for c in (col + 1)..n {
                    let sub = factor * lu[col * n + c];
                    lu[r * n + c] -= sub;
                }
            }
        }
        Ok(det)
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.get(r, c);
                write!(f, "{:+.4}{:+.4}j ", e.re, e.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Real eigenvalues of a Hermitian matrix, ascending.
///
/// The input is embedded as the real symmetric matrix [[Re, -Im], [Im, Re]]
/// whose spectrum doubles every eigenvalue, and reduced with cyclic Jacobi
/// rotations. Input must be Hermitian within [`tol::HERMITIAN`].
pub fn eigvals_hermitian(a: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let deviation = a.max_abs_diff(&a.hermitian());
    if deviation > tol::HERMITIAN {
        return Err(LinalgError::NotHermitian {
            deviation,
            tolerance: tol::HERMITIAN,
        });
    }
    let n = a.rows();
    let m = 2 * n;
    let mut s = vec![0.0f64; m * m];
    for r in 0..n {
        for c in 0..n {
            let e = a.get(r, c);
            s[r * m + c] = e.re;
            s[r * m + (c + n)] = -e.im;
            s[(r + n) * m + c] = e.im;
            s[(r + n) * m + (c + n)] = e.re;
        }
    }
    let mut eigs = jacobi_symmetric_eigvals(&mut s, m);
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // Each eigenvalue of the complex matrix appears twice in the embedding.
    Ok(eigs.into_iter().step_by(2).collect())
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric matrix stored
/// row-major in `s`. Destroys `s`, returns unsorted eigenvalues.
fn jacobi_symmetric_eigvals(s: &mut [f64], n: usize) -> Vec<f64> {
    let scale = s.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    let threshold = 1e-14 * scale;
    for _sweep in 0..64 {
        let off: f64 = {
            let mut acc = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    acc += s[p * n + q] * s[p * n + q];
                }
            }
            acc.sqrt()
        };
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = s[p * n + q];
                if apq.abs() <= threshold / (n as f64) {
                    continue;
                }
                let app = s[p * n + p];
                let aqq = s[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let skp = s[k * n + p];
                    let skq = s[k * n + q];
                    s[k * n + p] = c * skp - sn * skq;
                    s[k * n + q] = sn * skp + c * skq;
                }
                for k in 0..n {
                    let spk = s[p * n + k];
                    let sqk = s[q * n + k];
                    s[p * n + k] = c * spk - sn * sqk;
                    s[q * n + k] = sn * spk + c * sqk;
                }
            }
        }
    }
    (0..n).map(|i| s[i * n + i]).collect()
}

/// Rank over the reals of the K x 2n^2 matrix whose rows are the
/// real-then-imaginary vectorizations of the inputs. Rows are normalized
/// before elimination so the result is invariant under nonzero real scaling
/// of any input. Empty input has rank 0; panics on mixed shapes.
pub fn real_rank(mats: &[ComplexMatrix]) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let shape = (mats[0].rows(), mats[0].cols());
    let width = 2 * shape.0 * shape.1;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(mats.len());
    for m in mats {
        assert_eq!((m.rows(), m.cols()), shape, "mixed shapes in real_rank");
        let mut row = Vec::with_capacity(width);
        row.extend(m.entries().iter().map(|e| e.re));
        row.extend(m.entries().iter().map(|e| e.im));
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in &mut row {
                *x /= norm;
            }
        }
        rows.push(row);
    }
    gaussian_rank_real(&mut rows, width)
}

// elimination reads the pivot row while writing the others, so indexed
// access stays
#[allow(clippy::needless_range_loop)]
fn gaussian_rank_real(rows: &mut [Vec<f64>], width: usize) -> usize {
    let mut rank = 0;
    let mut col = 0;
    while rank < rows.len() && col < width {
        let (mut pivot_row, mut pivot_mag) = (rank, rows[rank][col].abs());
        for r in (rank + 1)..rows.len() {
            if rows[r][col].abs() > pivot_mag {
                pivot_mag = rows[r][col].abs();
                pivot_row = r;
            }
        }
        if pivot_mag <= tol::PIVOT {
            col += 1;
            continue;
        }
        rows.swap(rank, pivot_row);
        let pivot = rows[rank][col];
        for r in 0..rows.len() {
            if r == rank {
                continue;
            }
            let factor = rows[r][col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in col..width {
                let sub = factor * rows[rank][c];
                rows[r][c] -= sub;
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// Rank over the complex numbers of the K x n^2 vectorization matrix.
#[allow(clippy::needless_range_loop)]
pub fn complex_rank(mats: &[ComplexMatrix]) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let shape = (mats[0].rows(), mats[0].cols());
    let width = shape.0 * shape.1;
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(mats.len());
    for m in mats {
        assert_eq!((m.rows(), m.cols()), shape, "mixed shapes in complex_rank");
        let mut row = m.entries().to_vec();
        let norm = row.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for e in &mut row {
                *e /= norm;
            }
        }
        rows.push(row);
    }
    let mut rank = 0;
    let mut col = 0;
    while rank < rows.len() && col < width {
        let (mut pivot_row, mut pivot_mag) = (rank, rows[rank][col].norm());
        for r in (rank + 1)..rows.len() {
            if rows[r][col].norm() > pivot_mag {
                pivot_mag = rows[r][col].norm();
                pivot_row = r;
            }
        }
        if pivot_mag <= tol::PIVOT {
            col += 1;
            continue;
        }
        rows.swap(rank, pivot_row);
        let pivot = rows[rank][col];
        for r in 0..rows.len() {
            if r == rank {
                continue;
            }
            let factor = rows[r][col] / pivot;
            if factor.re == 0.0 && factor.im == 0.0 {
                continue;
            }
            for c in col..width {
                let sub = factor * rows[rank][c];
                rows[r][c] -= sub;
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}
