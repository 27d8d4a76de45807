//! Exact dense linear algebra over the intersection lattice.
//!
//! Systems are solved fraction-free (Bareiss) over integers: first in `i128`
//! with every operation overflow-checked, falling back to unbounded integers
//! when any check trips. No result is ever produced by rounded or wrapped
//! arithmetic. Negative definiteness is decided by the signs of the leading
//! principal minors, which a fraction-free forward pass yields directly.

use crate::error::{Error, Result};
use crate::{Int, Rational};
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Num, One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Index, IndexMut};

/// Scalars the generic routines accept: exact ordered number types such as
/// `Rational`. The solver divides, so `T` must behave as a field.
pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug {}
impl<T: Num + Signed + Clone + PartialOrd + Debug> Scalar for T {}

/// Integer scalars usable in fraction-free elimination. All ring operations
/// go through the checked entry points so a fixed-width instantiation can
/// report overflow instead of wrapping.
pub trait ExactInt:
    Num + Signed + Clone + PartialOrd + Debug + CheckedAdd + CheckedSub + CheckedMul + CheckedDiv
{
}
impl<T> ExactInt for T where
    T: Num + Signed + Clone + PartialOrd + Debug + CheckedAdd + CheckedSub + CheckedMul + CheckedDiv
{
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Matrix<T> {
    pub fn new(rows: usize, cols: usize, mut fill: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(fill(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            data.extend(r);
        }
        Matrix { rows: n, cols: m, data }
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

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T: PartialEq> Matrix<T> {
    /// Index of the first asymmetric pair, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in i + 1..self.cols.min(self.rows) {
                if self[(i, j)] != self[(j, i)] {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.cols {
                    acc = acc + self[(i, j)].clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Fraction-free forward elimination on the leading `n` columns of `a`
/// (which may carry extra augmented columns). Row swaps are used for zero
/// pivots; the permutation parity is returned.
///
/// `None` signals arithmetic overflow in the scalar type; the caller retries
/// with unbounded integers. `Some(Err(Singular))` signals a vanishing pivot
/// column. On success the matrix is upper triangular on its leading block
/// and the diagonal entry at `k` equals the order-`k+1` leading principal
/// minor of the row-permuted input.
fn forward<T: ExactInt>(a: &mut Matrix<T>, n: usize) -> Option<Result<bool>> {
    let mut prev = T::one();
    let mut flipped = false;
    for k in 0..n {
        if a[(k, k)].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[(r, k)].is_zero()) else {
                return Some(Err(Error::Singular));
            };
            a.swap_rows(k, r);
            flipped = !flipped;
        }
        for i in k + 1..n {
            for j in k + 1..a.cols {
                let hi = a[(k, k)].checked_mul(&a[(i, j)])?;
                let lo = a[(i, k)].checked_mul(&a[(k, j)])?;
                let num = hi.checked_sub(&lo)?;
                a[(i, j)] = num.checked_div(&prev)?;
            }
            a[(i, k)] = T::zero();
        }
        prev = a[(k, k)].clone();
    }
    Some(Ok(flipped))
}

/// Solve `m x = b` fraction-free. Returns the scaled solution `y` and the
/// determinant `d` of the row-permuted matrix, with `x_i = y_i / d`.
fn bareiss_solve<T: ExactInt>(m: &Matrix<T>, b: &[T]) -> Option<Result<(Vec<T>, T)>> {
    let n = m.rows;
    if n == 0 {
        return Some(Ok((Vec::new(), T::one())));
    }
    let mut aug = Matrix::new(n, n + 1, |i, j| if j < n { m[(i, j)].clone() } else { b[i].clone() });
    match forward(&mut aug, n)? {
        Ok(_) => {}
        Err(e) => return Some(Err(e)),
    }
    let det = aug[(n - 1, n - 1)].clone();
    let mut y = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = det.checked_mul(&aug[(i, n)])?;
        for j in i + 1..n {
            let t = aug[(i, j)].checked_mul(&y[j])?;
            acc = acc.checked_sub(&t)?;
        }
        y[i] = acc.checked_div(&aug[(i, i)])?;
    }
    // The divisions above are exact (each quotient is a bordered minor), so
    // y is certified once m y = det b holds.
    for i in 0..n {
        let mut acc = T::zero();
        for j in 0..n {
            acc = acc.checked_add(&m[(i, j)].checked_mul(&y[j])?)?;
        }
        if acc != det.checked_mul(&b[i])? {
            panic!("back-substitution check failed; exact elimination is broken");
        }
    }
    Some(Ok((y, det)))
}

fn check_square(m: &Matrix<i64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows, cols: m.cols });
    }
    Ok(())
}

/// Solve `m x = rhs` exactly over the rationals.
///
/// The computed solution is verified by exact back-substitution before being
/// returned. Errors: `Singular` when the matrix has no inverse,
/// `NonSquare` / `DimensionMismatch` on malformed input.
pub fn solve_linear_system(m: &Matrix<i64>, rhs: &[Rational]) -> Result<Vec<Rational>> {
    check_square(m)?;
    if rhs.len() != m.rows {
        return Err(Error::DimensionMismatch { rows: m.rows, len: rhs.len() });
    }
    let scale: Int = rhs.iter().fold(Int::one(), |acc, r| acc.lcm(r.denom()));
    let b: Vec<Int> = rhs.iter().map(|r| (r * Rational::from(scale.clone())).to_integer()).collect();

    let narrow: Option<Vec<i128>> = b.iter().map(|v| v.to_i128()).collect();
    if let Some(b128) = narrow {
        let m128 = m.map(|&v| v as i128);
        if let Some(res) = bareiss_solve::<i128>(&m128, &b128) {
            let (y, det) = res?;
            return Ok(assemble(y.into_iter().map(Int::from), Int::from(det), &scale));
        }
    }
    let mb = m.map(|&v| Int::from(v));
    let (y, det) = bareiss_solve::<Int>(&mb, &b).expect("unbounded integers cannot overflow")?;
    Ok(assemble(y.into_iter(), det, &scale))
}

fn assemble(y: impl Iterator<Item = Int>, det: Int, scale: &Int) -> Vec<Rational> {
    let denom = det * scale;
    y.map(|yi| Rational::new(yi, denom.clone())).collect()
}

/// Solve `m x = rhs` exactly, returning integer numerators over one common
/// positive denominator: `x_i = y_i / denom`. The pair is not reduced.
///
/// This is the allocation-light form of [`solve_linear_system`] for integer
/// right-hand sides; bulk consumers compare and reduce the numerators
/// themselves.
/// [`bareiss_solve`] widened from an `i64` system, augmenting in place so no
/// intermediate matrix is built.
fn bareiss_solve_widened(m: &Matrix<i64>, b: &[i64]) -> Option<Result<(Vec<i128>, i128)>> {
    let n = m.rows;
    if n == 0 {
        return Some(Ok((Vec::new(), 1)));
    }
    let mut aug =
        Matrix::new(n, n + 1, |i, j| if j < n { m[(i, j)] as i128 } else { b[i] as i128 });
    match forward(&mut aug, n)? {
        Ok(_) => {}
        Err(e) => return Some(Err(e)),
    }
    let det = aug[(n - 1, n - 1)];
    let mut y = vec![0_i128; n];
    for i in (0..n).rev() {
        let mut acc = det.checked_mul(aug[(i, n)])?;
        for j in i + 1..n {
            acc = acc.checked_sub(aug[(i, j)].checked_mul(y[j])?)?;
        }
        y[i] = acc.checked_div(aug[(i, i)])?;
    }
    for i in 0..n {
        let mut acc = 0_i128;
        for j in 0..n {
            acc = acc.checked_add((m[(i, j)] as i128).checked_mul(y[j])?)?;
        }
        if acc != det.checked_mul(b[i] as i128)? {
            panic!("back-substitution check failed; exact elimination is broken");
        }
    }
    Some(Ok((y, det)))
}

/// Machine-width fast path of [`solve_scaled`]. Returns `Ok(None)` when an
/// intermediate value would overflow `i128` and the caller must take the
/// big-integer route; the denominator is always positive when present.
pub fn solve_scaled_i128(m: &Matrix<i64>, rhs: &[i64]) -> Result<Option<(Vec<i128>, i128)>> {
    check_square(m)?;
    if rhs.len() != m.rows {
        return Err(Error::DimensionMismatch { rows: m.rows, len: rhs.len() });
    }
    match bareiss_solve_widened(m, rhs) {
        None => Ok(None),
        Some(res) => {
            let (mut y, mut det) = res?;
            if det < 0 {
                for v in &mut y {
                    *v = -*v;
                }
                det = -det;
            }
            Ok(Some((y, det)))
        }
    }
}

pub fn solve_scaled(m: &Matrix<i64>, rhs: &[i64]) -> Result<(Vec<Int>, Int)> {
    if let Some((y, det)) = solve_scaled_i128(m, rhs)? {
        return Ok((y.into_iter().map(Int::from).collect(), Int::from(det)));
    }
    let mb = m.map(|&v| Int::from(v));
    let b: Vec<Int> = rhs.iter().map(|&v| Int::from(v)).collect();
    let (y, det) = bareiss_solve::<Int>(&mb, &b).expect("unbounded integers cannot overflow")?;
    if det.is_negative() {
        Ok((y.into_iter().map(|v| -v).collect(), -det))
    } else {
        Ok((y, det))
    }
}

/// Generic exact Gaussian elimination over a field scalar. The solution is
/// verified by multiplying back before being returned.
pub fn gaussian_solve<T: Scalar>(m: &Matrix<T>, rhs: &[T]) -> Result<Vec<T>> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    if rhs.len() != n {
        return Err(Error::DimensionMismatch { rows: n, len: rhs.len() });
    }
    let mut aug = Matrix::new(n, n + 1, |i, j| if j < n { m[(i, j)].clone() } else { rhs[i].clone() });
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !aug[(r, k)].is_zero()) else {
            return Err(Error::Singular);
        };
        aug.swap_rows(k, p);
        for i in k + 1..n {
            if aug[(i, k)].is_zero() {
                continue;
            }
            let f = aug[(i, k)].clone() / aug[(k, k)].clone();
            for j in k..=n {
                let t = f.clone() * aug[(k, j)].clone();
                aug[(i, j)] = aug[(i, j)].clone() - t;
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = aug[(i, n)].clone();
        for j in i + 1..n {
            acc = acc - aug[(i, j)].clone() * x[j].clone();
        }
        x[i] = acc / aug[(i, i)].clone();
    }
    assert!(m.mul_vec(&x) == rhs, "back-substitution check failed; exact elimination is broken");
    Ok(x)
}

fn definite_scan<T: ExactInt>(m: &Matrix<T>) -> Option<bool> {
    let n = m.rows;
    let mut a = m.clone();
    let mut prev = T::one();
    for k in 0..n {
        // Pivot k is the order-k+1 leading principal minor; a zero or
        // wrongly-signed minor refutes negative definiteness outright.
        let pivot_neg = a[(k, k)] < T::zero();
        let want_neg = k % 2 == 0;
        if a[(k, k)].is_zero() || pivot_neg != want_neg {
            return Some(false);
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let hi = a[(k, k)].checked_mul(&a[(i, j)])?;
                let lo = a[(i, k)].checked_mul(&a[(k, j)])?;
                let num = hi.checked_sub(&lo)?;
                a[(i, j)] = num.checked_div(&prev)?;
            }
            a[(i, k)] = T::zero();
        }
        prev = a[(k, k)].clone();
    }
    Some(true)
}

/// Decide negative definiteness of a symmetric integer matrix by Sylvester's
/// criterion: the order-k leading principal minor must carry sign (-1)^k for
/// every k. Exact throughout; errors on non-square or asymmetric input.
pub fn is_negative_definite(m: &Matrix<i64>) -> Result<bool> {
    check_square(m)?;
    if let Some((i, j)) = m.asymmetry() {
        return Err(Error::NonSymmetric { row: i, col: j });
    }
    let m128 = m.map(|&v| v as i128);
    if let Some(ans) = definite_scan(&m128) {
        return Ok(ans);
    }
    let mb = m.map(|&v| Int::from(v));
    Ok(definite_scan(&mb).expect("unbounded integers cannot overflow"))
}

/// Exact determinant of a square integer matrix.
pub fn determinant(m: &Matrix<i64>) -> Result<Int> {
    check_square(m)?;
    let n = m.rows;
    if n == 0 {
        return Ok(Int::one());
    }
    let run = |a: &mut Matrix<Int>| -> (bool, Int) {
        match forward(a, n).expect("unbounded integers cannot overflow") {
            Ok(flipped) => (flipped, a[(n - 1, n - 1)].clone()),
            Err(_) => (false, Int::zero()),
        }
    };
    let mut a = m.map(|&v| Int::from(v));
    let (flipped, d) = run(&mut a);
    Ok(if flipped { -d } else { d })
}

/// Leading principal minors of orders 1..=n, each computed independently.
pub fn leading_principal_minors(m: &Matrix<i64>) -> Result<Vec<Int>> {
    check_square(m)?;
    (1..=m.rows)
        .map(|k| determinant(&Matrix::new(k, k, |i, j| m[(i, j)])))
        .collect()
}
