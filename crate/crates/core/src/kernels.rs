//! Permanents and determinants of complex matrices.
//!
//! Boson transition amplitudes are permanents of submatrices of the
//! single-particle unitary; fermion amplitudes are determinants of the same
//! submatrices.

use std::ops::{Index, IndexMut, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{FockError, FockResult};
use crate::fock::OccupationVector;

/// Largest matrix accepted by [`permanent`].
pub const MAX_PERMANENT_SIZE: usize = 20;

/// Up to this size [`permanent`] expands over permutations directly.
const DIRECT_EXPANSION_MAX: usize = 4;

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> FockResult<Self> {
        if rows * cols != entries.len() {
            return Err(FockError::InvalidArgument(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![C64::default(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let entries = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| f(i, j))
            .collect();
        Self { rows, cols, entries }
    }

    /// Builds from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> FockResult<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(FockError::DimensionMismatch { expected: cols, found: bad.len() });
        }
        Ok(Self { rows: rows.len(), cols, entries: rows.concat() })
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

    pub fn row(&self, i: usize) -> &[C64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale_row(&mut self, i: usize, factor: C64) {
        for j in 0..self.cols {
            self[(i, j)] *= factor;
        }
    }

    /// Largest elementwise `|a - b|`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

    pub fn from_dmatrix(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    fn require_square(&self) -> FockResult<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(FockError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on incompatible shapes.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "incompatible shapes for matrix product");
        ComplexMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * rhs[(k, j)]).sum()
        })
    }
}

/// `per(m) = sum_sigma prod_i m[i, sigma(i)]`.
///
/// Small matrices are expanded directly; larger ones use Ryser's formula.
/// The empty matrix has permanent 1.
pub fn permanent(m: &ComplexMatrix) -> FockResult<C64> {
    let n = m.require_square()?;
    if n > MAX_PERMANENT_SIZE {
        return Err(FockError::SizeOverflow(n));
    }
    if n <= DIRECT_EXPANSION_MAX {
        Ok(expand(m, 0, &mut vec![false; n]))
    } else {
        Ok(ryser(m))
    }
}

/// Direct expansion over all `n!` permutations.
pub fn permanent_by_expansion(m: &ComplexMatrix) -> FockResult<C64> {
    let n = m.require_square()?;
    if n > MAX_PERMANENT_SIZE {
        return Err(FockError::SizeOverflow(n));
    }
    Ok(expand(m, 0, &mut vec![false; n]))
}

/// Ryser's inclusion-exclusion formula, subsets visited in Gray-code order.
pub fn permanent_ryser(m: &ComplexMatrix) -> FockResult<C64> {
    let n = m.require_square()?;
    if n > MAX_PERMANENT_SIZE {
        return Err(FockError::SizeOverflow(n));
    }
    Ok(ryser(m))
}

fn expand(m: &ComplexMatrix, row: usize, used: &mut [bool]) -> C64 {
    if row == m.rows {
        return C64::new(1.0, 0.0);
    }
    let mut acc = C64::default();
    for col in 0..m.cols {
        if used[col] {
            continue;
        }
        let a = m[(row, col)];
        if a == C64::default() {
            continue;
        }
        used[col] = true;
        acc += a * expand(m, row + 1, used);
        used[col] = false;
    }
    acc
}

// per(A) = (-1)^n sum_{S nonempty} (-1)^{|S|} prod_i sum_{j in S} a_ij
fn ryser(m: &ComplexMatrix) -> C64 {
    let n = m.rows;
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut row_sums = vec![C64::default(); n];
    let mut total = C64::default();
    let mut gray: u32 = 0;
    for k in 1u32..(1u32 << n) {
        let col = k.trailing_zeros() as usize;
        let bit = 1u32 << col;
        gray ^= bit;
        if gray & bit != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += m[(i, col)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= m[(i, col)];
            }
        }
        let prod: C64 = row_sums.iter().product();
        if gray.count_ones().is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Determinant by LU elimination with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> FockResult<C64> {
    let n = m.require_square()?;
    let mut a = m.entries.clone();
    let mut det = C64::new(1.0, 0.0);
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&x, &y| a[x * n + k].norm().total_cmp(&a[y * n + k].norm()))
            .expect("non-empty range");
        if a[pivot * n + k] == C64::default() {
            return Ok(C64::default());
        }
        if pivot != k {
            for j in 0..n {
                a.swap(k * n + j, pivot * n + j);
            }
            det = -det;
        }
        let p = a[k * n + k];
        det *= p;
        for i in k + 1..n {
            let factor = a[i * n + k] / p;
            if factor == C64::default() {
                continue;
            }
            for j in k..n {
                let v = a[k * n + j];
                a[i * n + j] -= factor * v;
            }
        }
    }
    Ok(det)
}

/// The `M x M` matrix whose rows are rows of `u` repeated by `input_occ` and
/// whose columns are columns repeated by `output_occ`, both ascending in mode.
pub fn amplitude_submatrix(
    u: &ComplexMatrix,
    input_occ: &OccupationVector,
    output_occ: &OccupationVector,
) -> FockResult<ComplexMatrix> {
    for occ in [input_occ, output_occ] {
        if occ.num_modes() != u.rows() || occ.num_modes() != u.cols() {
            return Err(FockError::DimensionMismatch {
                expected: u.rows(),
                found: occ.num_modes(),
            });
        }
    }
    if input_occ.total() != output_occ.total() {
        return Err(FockError::TotalMismatch {
            input: input_occ.total(),
            output: output_occ.total(),
        });
    }
    let rows = input_occ.mode_list();
    let cols = output_occ.mode_list();
    Ok(ComplexMatrix::from_fn(rows.len(), cols.len(), |i, j| u[(rows[i], cols[j])]))
}
