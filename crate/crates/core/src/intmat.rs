//! Dense integer and rational matrices: Bareiss determinants, Smith normal
//! form with unimodular transforms, and exact linear solving over Z and Q.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, x) in row.iter().enumerate() {
                m[(i, j)] = x.clone().into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += factor * row[src]
    fn add_row(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j] * factor;
            self.data[dst * self.cols + j] += s;
        }
    }

    /// col[dst] += factor * col[src]
    fn add_col(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src] * factor;
            self.data[i * self.cols + dst] += s;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = -x;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Fraction-free Gaussian elimination.
pub fn determinant(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows, m.cols, "determinant of non-square matrix");
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
        }
        prev = a[(k, k)].clone();
    }
    sign * &a[(n - 1, n - 1)]
}

/// Result of a Smith normal form computation: `u * a * v == d` with `u`, `v`
/// unimodular and `d` diagonal, `d[i] | d[i+1]`, all nonnegative.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub diag: Vec<BigInt>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let (rows, cols) = (a.rows, a.cols);
    let mut m = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let steps = rows.min(cols);

    for t in 0..steps {
        'pivot: loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = &m[(i, j)];
                    if !x.is_zero()
                        && best.map_or(true, |(bi, bj)| x.abs() < m[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break 'pivot;
            };
            m.swap_rows(t, pi);
            u.swap_rows(t, pi);
            m.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..rows {
                if m[(i, t)].is_zero() {
                    continue;
                }
                let q = m[(i, t)].div_floor(&m[(t, t)]);
                let neg = -q;
                m.add_row(i, t, &neg);
                u.add_row(i, t, &neg);
                if !m[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if m[(t, j)].is_zero() {
                    continue;
                }
                let q = m[(t, j)].div_floor(&m[(t, t)]);
                let neg = -q;
                m.add_col(j, t, &neg);
                v.add_col(j, t, &neg);
                if !m[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let p = m[(t, t)].clone();
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !m[(i, j)].is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    m.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break 'pivot,
            }
        }
        if m[(t, t)].is_negative() {
            m.negate_row(t);
            u.negate_row(t);
        }
    }
    let diag = (0..steps).map(|i| m[(i, i)].clone()).collect();
    Smith { u, v, diag }
}

/// Solves `a x = b` over the integers. Returns `None` when no integral
/// solution exists. When several exist, one particular solution is returned
/// (free coordinates set to zero).
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len());
    let snf = smith_normal_form(a);
    let ub = snf.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols];
    for (i, rhs) in ub.iter().enumerate() {
        let d = snf.diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            if !rhs.is_zero() {
                return None;
            }
        } else {
            let (q, r) = rhs.div_rem(&d);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Rank over Q of a list of rational row vectors.
pub fn rank_over_q(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for i in rank + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &pivot;
            for j in c..cols {
                let s = &f * &m[rank][j];
                m[i][j] -= s;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Inverse of a square integer matrix over Q; `None` if singular.
pub fn inverse_over_q(a: &IntMatrix) -> Option<Vec<Vec<BigRational>>> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> =
                a.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let pivot = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = &*x / &pivot;
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in 0..2 * n {
                let s = &f * &m[c][j];
                m[i][j] -= s;
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_smith(a: &IntMatrix) -> Smith {
        let s = smith_normal_form(a);
        let d = s.u.mul(a).mul(&s.v);
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if i == j {
                    assert_eq!(d[(i, i)], s.diag[i]);
                } else {
                    assert!(d[(i, j)].is_zero(), "off-diagonal {:?}", d);
                }
            }
        }
        for w in s.diag.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        assert_eq!(determinant(&s.u).abs(), BigInt::one());
        assert_eq!(determinant(&s.v).abs(), BigInt::one());
        s
    }

    #[test]
    fn smith_of_diagonal() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let s = check_smith(&a);
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn smith_of_rectangular_and_degenerate() {
        let a = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = check_smith(&a);
        assert_eq!(s.diag, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let b = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4], vec![3, 6]]);
        let s = check_smith(&b);
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn determinant_matches_cofactor() {
        let a = IntMatrix::from_rows(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        assert_eq!(determinant(&a), BigInt::from(4));
        let b = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(determinant(&b), BigInt::from(-1));
    }

    #[test]
    fn integer_solve() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let x = solve_integer(&a, &[BigInt::from(4), BigInt::from(9)]).unwrap();
        assert_eq!(x, vec![BigInt::from(2), BigInt::from(3)]);
        assert!(solve_integer(&a, &[BigInt::from(1), BigInt::from(0)]).is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let a = IntMatrix::from_rows(&[vec![2, 1], vec![1, 2]]);
        let inv = inverse_over_q(&a).unwrap();
        assert_eq!(inv[0][0], BigRational::new(2.into(), 3.into()));
        assert_eq!(inv[0][1], BigRational::new((-1).into(), 3.into()));
        assert!(inverse_over_q(&IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]])).is_none());
    }
}
