use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::Polynomial;
use super::rational::{int, to_f64, ComplexRational, Rational};
use crate::error::{Error, Result};

/// Field operations needed by the exact routines. Implemented for
/// [`Rational`] and [`ComplexRational`].
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + Neg<Output = T>
{
}

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

pub type RationalMatrix = Matrix<Rational>;
pub type ComplexMatrix = Matrix<ComplexRational>;

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for row in self.entries.chunks(self.cols.max(1)) {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Matrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn scalar(n: usize, value: T) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { value.clone() } else { T::zero() })
    }

    pub fn diagonal(values: &[T]) -> Self {
        let n = values.len();
        Matrix::from_fn(
            n,
            n,
            |i, j| if i == j { values[i].clone() } else { T::zero() },
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<T> {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    fn require_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )))
        }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, factor: &T) -> Self {
        self.map(|x| x.clone() * factor.clone())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "add")?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "sub")?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    /// Exact product; zero entries of `self` are skipped, which keeps the
    /// signed-permutation families used throughout the crate cheap.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out: Matrix<T> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.entries[idx] = out.entries[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix applied to a vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_add(&other.try_mul(self)?)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Matrix::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            let a = self.get(i / other.rows, j / other.cols);
            if a.is_zero() {
                T::zero()
            } else {
                a.clone() * other.get(i % other.rows, j % other.cols).clone()
            }
        })
    }

    /// Assembles `[[a, b], [c, d]]` from equally-sized square blocks.
    pub fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if !(a.same_shape(b) && a.same_shape(c) && a.same_shape(d)) {
            return Err(Error::DimensionMismatch("block sizes differ".into()));
        }
        let (r, k) = (a.rows, a.cols);
        Ok(Matrix::from_fn(2 * r, 2 * k, |i, j| {
            let block = match (i < r, j < k) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => c,
                (false, false) => d,
            };
            block.get(i % r, j % k).clone()
        }))
    }

    /// Sub-block starting at `(row, col)` with the given shape.
    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |i, j| self.get(row + i, col + j).clone())
    }

    /// Block-diagonal `I_copies ⊗ self`.
    pub fn repeat_diagonal(&self, copies: usize) -> Self {
        Matrix::<T>::identity(copies).kron(self)
    }

    pub fn trace(&self) -> Result<T> {
        let n = self.require_square()?;
        Ok((0..n).fold(T::zero(), |acc, i| acc + self.get(i, i).clone()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_skew(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (i..self.cols).all(|j| self.get(i, j).clone() == -self.get(j, i).clone()))
    }

    /// Whether `self` equals `c·I` for some scalar `c`; returns that scalar.
    pub fn scalar_multiple_of_identity(&self) -> Option<T> {
        if !self.is_square() {
            return None;
        }
        let c = if self.rows == 0 {
            T::zero()
        } else {
            self.get(0, 0).clone()
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expected_zero = i != j;
                let x = self.get(i, j);
                if expected_zero && !x.is_zero() || !expected_zero && *x != c {
                    return None;
                }
            }
        }
        Some(c)
    }

    /// Exact determinant: Laplace expansion up to 4x4, fraction-free
    /// (Bareiss) elimination above.
    pub fn det(&self) -> Result<T> {
        let n = self.require_square()?;
        if n <= 4 {
            Ok(cofactor_det(self))
        } else {
            Ok(bareiss_det(self))
        }
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = T::one() / m.get(row, col).clone();
            for j in col..m.cols {
                let v = m.get(row, j).clone() * inv.clone();
                m.set(row, j, v);
            }
            for i in 0..m.rows {
                if i == row {
                    continue;
                }
                let factor = m.get(i, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let v = m.get(i, j).clone() - factor.clone() * m.get(row, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space `{x : self·x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Option<Self>> {
        let n = self.require_square()?;
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                T::one()
            } else {
                T::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Ok(None);
        }
        Ok(Some(r.block(0, n, n, n)))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    /// Panics on a dimension mismatch; use [`Matrix::try_mul`] to recover.
    fn mul(self, rhs: Self) -> Matrix<T> {
        self.try_mul(rhs).expect("matrix product dimensions")
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: Self) -> Matrix<T> {
        self.try_add(rhs).expect("matrix sum dimensions")
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: Self) -> Matrix<T> {
        self.try_sub(rhs).expect("matrix difference dimensions")
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;

    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

fn cofactor_det<T: Scalar>(m: &Matrix<T>) -> T {
    let n = m.rows;
    match n {
        0 => T::one(),
        1 => m.get(0, 0).clone(),
        2 => m.get(0, 0).clone() * m.get(1, 1).clone() - m.get(0, 1).clone() * m.get(1, 0).clone(),
        _ => {
            let mut acc = T::zero();
            for j in 0..n {
                let a = m.get(0, j);
                if a.is_zero() {
                    continue;
                }
                let minor = Matrix::from_fn(n - 1, n - 1, |r, c| {
                    m.get(r + 1, if c < j { c } else { c + 1 }).clone()
                });
                let term = a.clone() * cofactor_det(&minor);
                acc = if j % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

fn bareiss_det<T: Scalar>(m: &Matrix<T>) -> T {
    let n = m.rows;
    let mut a = m.clone();
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n.saturating_sub(1) {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(p) => {
                    a.swap_rows(k, p);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        let pivot = a.get(k, k).clone();
        for i in k + 1..n {
            let lead = a.get(i, k).clone();
            for j in k + 1..n {
                let v = (a.get(i, j).clone() * pivot.clone() - lead.clone() * a.get(k, j).clone())
                    / prev.clone();
                a.set(i, j, v);
            }
            a.set(i, k, T::zero());
        }
        prev = pivot;
    }
    let d = a.get(n - 1, n - 1).clone();
    if negate {
        -d
    } else {
        d
    }
}

impl RationalMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
        .expect("rectangular integer rows")
    }

    /// Characteristic polynomial `det(tI − A)` by the Faddeev–LeVerrier
    /// recursion, exact over the rationals.
    pub fn char_poly(&self) -> Result<Polynomial> {
        let n = self.require_square()?;
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut m = RationalMatrix::zeros(n, n);
        for k in 1..=n {
            // M_k = A·M_{k−1} + c_{n−k+1}·I
            let shifted = self.try_mul(&m)?;
            m = shifted.try_add(&RationalMatrix::scalar(n, coeffs[n - k + 1].clone()))?;
            let am = self.try_mul(&m)?;
            coeffs[n - k] = -am.trace()? / int(k as i64);
        }
        Ok(Polynomial::new(coeffs))
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(to_f64).collect())
            .collect()
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| to_f64(self.get(i, j)))
    }
}

impl ComplexMatrix {
    pub fn from_parts(re: &RationalMatrix, im: &RationalMatrix) -> Result<Self> {
        re.require_same_shape(im, "complex parts")?;
        Ok(Matrix::from_fn(re.rows(), re.cols(), |i, j| {
            ComplexRational::new(re.get(i, j).clone(), im.get(i, j).clone())
        }))
    }

    pub fn real_part(&self) -> RationalMatrix {
        self.map(|z| z.re.clone())
    }

    pub fn imag_part(&self) -> RationalMatrix {
        self.map(|z| z.im.clone())
    }

    /// `η(A + iB) = [[A, −B], [B, A]]`.
    pub fn realify(&self) -> RationalMatrix {
        let (a, b) = (self.real_part(), self.imag_part());
        RationalMatrix::block2(&a, &-&b, &b, &a).expect("parts share a shape")
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<nalgebra::Complex<f64>> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| {
            let z = self.get(i, j);
            nalgebra::Complex::new(to_f64(&z.re), to_f64(&z.im))
        })
    }
}

/// `a · b`, erroring on a dimension mismatch.
pub fn mat_mul<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    a.try_mul(b)
}

pub fn det<T: Scalar>(a: &Matrix<T>) -> Result<T> {
    a.det()
}

pub fn char_poly(a: &RationalMatrix) -> Result<Polynomial> {
    a.char_poly()
}

/// `Σ tᵢ Aᵢ` for an equally-sized family.
pub fn linear_combination<T: Scalar>(coeffs: &[T], family: &[Matrix<T>]) -> Result<Matrix<T>> {
    let first = family.first().ok_or(Error::EmptyFamily)?;
    if coeffs.len() != family.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} matrices",
            coeffs.len(),
            family.len()
        )));
    }
    let mut acc = Matrix::zeros(first.rows, first.cols);
    for (t, m) in coeffs.iter().zip(family) {
        acc.require_same_shape(m, "linear combination")?;
        if t.is_zero() {
            continue;
        }
        for (a, b) in acc.entries.iter_mut().zip(&m.entries) {
            if !b.is_zero() {
                *a = a.clone() + t.clone() * b.clone();
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::rational::frac;

    fn j2() -> RationalMatrix {
        RationalMatrix::from_i64(&[&[0, 1], &[-1, 0]])
    }

    #[test]
    fn identity_products() {
        let i2 = RationalMatrix::identity(2);
        assert_eq!(mat_mul(&i2, &i2).unwrap(), i2);
        assert_eq!(&j2() * &j2(), -&i2);
    }

    #[test]
    fn product_dimension_mismatch() {
        let a = RationalMatrix::zeros(2, 3);
        assert!(matches!(mat_mul(&a, &a), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn small_determinants() {
        assert_eq!(RationalMatrix::identity(3).det().unwrap(), int(1));
        let d = RationalMatrix::diagonal(&[int(1), int(1), int(-2)]);
        assert_eq!(d.det().unwrap(), int(-2));
        assert!(matches!(
            RationalMatrix::zeros(2, 3).det(),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
        assert_eq!(RationalMatrix::zeros(0, 0).det().unwrap(), int(1));
    }

    #[test]
    fn bareiss_handles_zero_pivots() {
        // leading zero forces a row swap; permutation matrix of a 5-cycle has det +1
        let p =
            RationalMatrix::from_fn(5, 5, |i, j| if j == (i + 1) % 5 { int(1) } else { int(0) });
        assert_eq!(p.det().unwrap(), int(1));
        let mut q = RationalMatrix::identity(6);
        q.set(0, 0, int(0));
        q.set(0, 1, int(1));
        q.set(1, 0, int(1));
        q.set(1, 1, int(0));
        assert_eq!(q.det().unwrap(), int(-1));
        let singular = RationalMatrix::from_fn(6, 6, |i, j| int((i * j) as i64));
        assert_eq!(singular.det().unwrap(), int(0));
    }

    #[test]
    fn char_poly_examples() {
        let zero = RationalMatrix::zeros(2, 2);
        assert_eq!(zero.char_poly().unwrap(), Polynomial::from_i64(&[0, 0, 1]));
        assert_eq!(j2().char_poly().unwrap(), Polynomial::from_i64(&[1, 0, 1]));
    }

    #[test]
    fn rank_kernel_inverse() {
        let a = RationalMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ker = a.kernel();
        assert_eq!(ker.len(), 1);
        assert!(a.mul_vec(&ker[0]).unwrap().iter().all(Zero::is_zero));
        assert!(a.inverse().unwrap().is_none());
        let b = RationalMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = b.inverse().unwrap().unwrap();
        assert_eq!(&b * &inv, RationalMatrix::identity(2));
    }

    #[test]
    fn kron_and_blocks() {
        let x = RationalMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let k = x.kron(&j2());
        assert_eq!(k.rows(), 4);
        assert_eq!(&k * &k, -&RationalMatrix::identity(4));
        let i = RationalMatrix::identity(2);
        let z = RationalMatrix::zeros(2, 2);
        let b = RationalMatrix::block2(&z, &i, &i, &z).unwrap();
        assert_eq!(b, x.kron(&i));
        assert_eq!(b.block(0, 2, 2, 2), i);
    }

    #[test]
    fn symmetry_predicates() {
        assert!(j2().is_skew());
        assert!(!j2().is_symmetric());
        let s = RationalMatrix::from_i64(&[&[1, 2], &[2, 3]]);
        assert!(s.is_symmetric());
        assert!(!s.is_skew());
        assert_eq!(
            RationalMatrix::scalar(3, frac(1, 2)).scalar_multiple_of_identity(),
            Some(frac(1, 2))
        );
        assert_eq!(s.scalar_multiple_of_identity(), None);
    }

    #[test]
    fn complex_determinant() {
        // det(i·I₂) = −1
        let re = RationalMatrix::zeros(2, 2);
        let im = RationalMatrix::identity(2);
        let c = ComplexMatrix::from_parts(&re, &im).unwrap();
        assert_eq!(c.det().unwrap(), ComplexRational::new(int(-1), int(0)));
    }
}
