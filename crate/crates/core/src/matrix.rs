//! Dense square matrices, vectors, and trace words.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Complex, RankOutcome, Rational, Scalar, TolerancePolicy, ZeroTest};

/// Square `n x n` matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = self.entries.chunks(self.n.max(1)).collect();
        f.debug_struct("Matrix")
            .field("n", &self.n)
            .field("rows", &rows)
            .finish()
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            entries: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Matrix { n, entries }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadShape {
                rows: n,
                detail: format!("{:?}", rows.iter().map(Vec::len).collect::<Vec<_>>()),
            });
        }
        Ok(Matrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn diag(d: &[T]) -> Self {
        Self::from_fn(
            d.len(),
            |i, j| if i == j { d[i].clone() } else { T::zero() },
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.n).map(<[T]>::to_vec).collect()
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| s.clone() * x.clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.n);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.entries
            .iter()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max)
    }

    pub fn is_zero_within(&self, tol: &TolerancePolicy, scale: f64) -> bool {
        self.entries.iter().all(|e| e.is_zero_within(tol, scale))
    }

    pub fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn to_complex(&self) -> Matrix<Complex> {
        self.map(Scalar::to_complex)
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        Matrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        Matrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        let n = self.n;
        Matrix::from_fn(n, |i, j| {
            (0..n).fold(T::zero(), |acc, k| {
                acc + self.get(i, k).clone() * rhs.get(k, j).clone()
            })
        })
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;

    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Column,
    Row,
}

/// Column vector `c` or row covector `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector<T> {
    pub entries: Vec<T>,
    pub orientation: Orientation,
}

impl<T: Scalar> Vector<T> {
    pub fn column(entries: Vec<T>) -> Self {
        Vector {
            entries,
            orientation: Orientation::Column,
        }
    }

    pub fn row(entries: Vec<T>) -> Self {
        Vector {
            entries,
            orientation: Orientation::Row,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `c * r` for a column `c` and row `r`.
pub fn outer<T: Scalar>(c: &Vector<T>, r: &Vector<T>) -> Result<Matrix<T>> {
    if c.len() != r.len() {
        return Err(Error::DimensionMismatch {
            left: c.len(),
            right: r.len(),
        });
    }
    Ok(Matrix::from_fn(c.len(), |i, j| {
        c.entries[i].clone() * r.entries[j].clone()
    }))
}

/// `r * M * c`.
pub fn sandwich<T: Scalar>(r: &Vector<T>, m: &Matrix<T>, c: &Vector<T>) -> Result<T> {
    for len in [r.len(), c.len()] {
        if len != m.n() {
            return Err(Error::DimensionMismatch {
                left: len,
                right: m.n(),
            });
        }
    }
    let n = m.n();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            acc = acc + r.entries[i].clone() * m.get(i, j).clone() * c.entries[j].clone();
        }
    }
    Ok(acc)
}

/// Letter of a trace word: the first or the second matrix of a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    First,
    Second,
}

impl Letter {
    /// Parses `"ABAB"`-style words (`A`/`X` = first, `B`/`Y` = second).
    pub fn parse_word(s: &str) -> Result<Vec<Letter>> {
        s.chars()
            .map(|c| match c {
                'A' | 'X' => Ok(Letter::First),
                'B' | 'Y' => Ok(Letter::Second),
                other => Err(Error::BadLetter(other)),
            })
            .collect()
    }
}

/// `tr(Z_1 ... Z_k)` where `Z_i` is picked from the pair by the word.
pub fn trace_word<T: Scalar>(word: &[Letter], pair: (&Matrix<T>, &Matrix<T>)) -> Result<T> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    pair.0.check_same_dim(pair.1)?;
    Ok(word_product(word, pair).trace())
}

pub(crate) fn word_product<T: Scalar>(
    word: &[Letter],
    pair: (&Matrix<T>, &Matrix<T>),
) -> Matrix<T> {
    let pick = |l: &Letter| match l {
        Letter::First => pair.0,
        Letter::Second => pair.1,
    };
    let mut it = word.iter();
    let mut acc = match it.next() {
        Some(l) => pick(l).clone(),
        None => return Matrix::identity(pair.0.n()),
    };
    for l in it {
        acc = &acc * pick(l);
    }
    acc
}

/// `XY - YX`.
pub fn commutator<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Result<Matrix<T>> {
    x.check_same_dim(y)?;
    Ok(&(x * y) - &(y * x))
}

pub fn rank<T: Scalar>(m: &Matrix<T>, tol: &TolerancePolicy) -> usize {
    T::rank_of(m, tol).rank
}

/// Rank together with a flag telling whether any pivot sat in the guard band.
pub fn rank_outcome<T: Scalar>(m: &Matrix<T>, tol: &TolerancePolicy) -> RankOutcome {
    T::rank_of(m, tol)
}

pub fn det<T: Scalar>(m: &Matrix<T>) -> T {
    T::det_of(m)
}

pub(crate) struct Echelon {
    pub rank: usize,
    pub det: Rational,
}

/// Fraction-free (Bareiss) elimination. Rows are first cleared of
/// denominators so every intermediate value is an integer minor.
pub(crate) fn fraction_free_echelon(m: &Matrix<Rational>) -> Echelon {
    let n = m.n();
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let l = (0..n).fold(BigInt::one(), |acc, j| acc.lcm(m.get(i, j).denom()));
            scale *= &l;
            (0..n)
                .map(|j| {
                    let e = m.get(i, j);
                    e.numer() * (&l / e.denom())
                })
                .collect()
        })
        .collect();

    let mut prev = BigInt::one();
    let mut negate = false;
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..n).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            negate = !negate;
        }
        for i in r + 1..n {
            for j in col + 1..n {
                let num = &a[r][col] * &a[i][j] - &a[i][col] * &a[r][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss step must divide exactly");
                a[i][j] = q;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[r][col].clone();
        r += 1;
    }

    let det = if r == n && n > 0 {
        let d = Rational::new(a[n - 1][n - 1].clone(), scale);
        if negate {
            -d
        } else {
            d
        }
    } else if n == 0 {
        Rational::one()
    } else {
        Rational::zero()
    };
    Echelon { rank: r, det }
}

pub(crate) fn pivoted_rank(m: &Matrix<Complex>, tol: &TolerancePolicy) -> RankOutcome {
    let n = m.n();
    let scale = m.max_magnitude();
    let mut a = m.rows();
    let mut r = 0;
    let mut ambiguous = false;
    for col in 0..n {
        if r == n {
            break;
        }
        let (p, mag) = (r..n)
            .map(|i| (i, a[i][col].norm()))
            .fold(
                (r, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        match tol.classify(mag, scale) {
            ZeroTest::Zero => continue,
            ZeroTest::Ambiguous => ambiguous = true,
            ZeroTest::NonZero => {}
        }
        a.swap(p, r);
        for i in r + 1..n {
            let f = a[i][col] / a[r][col];
            let pivot = a[r].clone();
            for (x, t) in a[i].iter_mut().zip(&pivot).skip(col) {
                *x -= f * t;
            }
        }
        r += 1;
    }
    RankOutcome { rank: r, ambiguous }
}

pub(crate) fn pivoted_det(m: &Matrix<Complex>) -> Complex {
    let n = m.n();
    let mut a = m.rows();
    let mut det = Complex::one();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap_or(col);
        if a[p][col].norm() == 0.0 {
            return Complex::zero();
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col];
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            let pivot = a[col].clone();
            for (x, t) in a[i].iter_mut().zip(&pivot).skip(col) {
                *x -= f * t;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64) -> Rational {
        Rational::from_i64(p)
    }

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| q(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    // Independent oracle: Leibniz expansion for 3x3.
    fn leibniz3(m: &Matrix<Rational>) -> Rational {
        let g = |i, j| m.get(i, j).clone();
        g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
            - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
    }

    #[test]
    fn trace_word_examples() {
        let i3 = Matrix::<Rational>::identity(3);
        let any = qm(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(trace_word(&[Letter::First], (&i3, &any)).unwrap(), q(3));
        let a = Matrix::diag(&[q(-1), q(0), q(1)]);
        assert_eq!(
            trace_word(&[Letter::First, Letter::First], (&a, &any)).unwrap(),
            q(2)
        );
        let hollow = qm(&[&[0, -1, 2], &[1, 0, -3], &[5, 7, 0]]);
        assert_eq!(
            trace_word(&Letter::parse_word("AB").unwrap(), (&a, &hollow)).unwrap(),
            q(0)
        );
        assert!(matches!(trace_word(&[], (&a, &a)), Err(Error::EmptyWord)));
        let two = Matrix::<Rational>::identity(2);
        assert!(matches!(
            trace_word(&[Letter::First], (&a, &two)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn commutator_examples() {
        let y = qm(&[&[1, 2, 3], &[0, 5, 6], &[7, 8, 1]]);
        assert_eq!(
            commutator(&Matrix::identity(3), &y).unwrap(),
            Matrix::zeros(3)
        );
        assert_eq!(commutator(&y, &y.pow(2)).unwrap(), Matrix::zeros(3));
        let x = Matrix::diag(&[q(0), q(1), q(2)]);
        let cal = Matrix::from_fn(3, |i, j| {
            if i == j {
                q(0)
            } else {
                Rational::one() / (q(i as i64) - q(j as i64))
            }
        });
        let j_minus_i = Matrix::from_fn(3, |i, j| if i == j { q(0) } else { q(1) });
        assert_eq!(commutator(&x, &cal).unwrap(), j_minus_i);
    }

    #[test]
    fn rank_and_det_examples() {
        let tol = TolerancePolicy::default();
        assert_eq!(rank(&Matrix::<Rational>::zeros(3), &tol), 0);
        assert_eq!(rank(&Matrix::<Rational>::identity(3), &tol), 3);
        let ones = qm(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]);
        assert_eq!(rank(&ones, &tol), 1);
        assert_eq!(det(&Matrix::<Rational>::identity(3)), q(1));
        assert_eq!(det(&Matrix::diag(&[q(2), q(3), q(4)])), q(24));
        assert_eq!(det(&ones), q(0));
        // Column skipping path.
        let skip = qm(&[&[0, 1, 2], &[0, 2, 4], &[0, 3, 7]]);
        assert_eq!(rank(&skip, &tol), 2);
        assert_eq!(det(&skip), q(0));
    }

    #[test]
    fn rational_det_with_denominators_matches_leibniz() {
        let m = Matrix::from_fn(3, |i, j| {
            Rational::new(
                ((i * 7 + j * 3) as i64 - 5).into(),
                ((i + 2 * j) as i64 + 1).into(),
            )
        });
        assert_eq!(det(&m), leibniz3(&m));
        let swapped = Matrix::from_rows(vec![
            m.rows()[1].clone(),
            m.rows()[0].clone(),
            m.rows()[2].clone(),
        ])
        .unwrap();
        assert_eq!(det(&swapped), -leibniz3(&m));
    }

    #[test]
    fn complex_rank_and_det() {
        let tol = TolerancePolicy::default();
        let ones = Matrix::<Complex>::from_fn(3, |_, _| Complex::new(1.0, 0.0));
        assert_eq!(rank(&ones, &tol), 1);
        let near = Matrix::<Complex>::from_fn(3, |i, j| {
            if i == 2 && j == 2 {
                Complex::new(1.0 + 1e-13, 0.0)
            } else {
                Complex::new(1.0, 0.0)
            }
        });
        assert_eq!(rank(&near, &tol), 1);
        let fuzzy = Matrix::<Complex>::from_fn(3, |i, j| {
            if i == 2 && j == 2 {
                Complex::new(1.0 + 5e-9, 0.0)
            } else {
                Complex::new(1.0, 0.0)
            }
        });
        assert!(rank_outcome(&fuzzy, &tol).ambiguous);
        let d = det(&Matrix::diag(&[
            Complex::new(2.0, 0.0),
            Complex::new(0.0, 3.0),
            Complex::new(4.0, 0.0),
        ]));
        assert!((d - Complex::new(0.0, 24.0)).norm() < 1e-12);
    }

    #[test]
    fn outer_and_sandwich() {
        let c = Vector::column(vec![q(1), q(2)]);
        let r = Vector::row(vec![q(3), q(4)]);
        let m = outer(&c, &r).unwrap();
        assert_eq!(m, qm(&[&[3, 4], &[6, 8]]));
        assert_eq!(sandwich(&r, &Matrix::identity(2), &c).unwrap(), q(11));
    }
}
