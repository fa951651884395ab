use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::FieldKind;
use crate::error::{Error, Result};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

/// Outcome of an exact linear solve `A x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    /// A solution exists. Free variables (if any) are set to zero.
    Solved { x: Vec<BigRational>, nullity: usize },
    /// `rank(A) < rank(A|b)`.
    Unsolvable { rank: usize, augmented_rank: usize },
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = num_traits::One::one();
        }
        m
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    actual: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(RatMatrix { rows: r, cols: c, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<BigRational>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            if col.len() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    actual: col.len(),
                });
            }
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
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

    pub fn mul(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn sub(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                actual: rhs.rows * rhs.cols,
            });
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Squared Frobenius norm, exact.
    pub fn frobenius_sq(&self) -> BigRational {
        self.data.iter().fold(BigRational::zero(), |acc, x| acc + x * x)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn select_columns(&self, idx: &[usize]) -> RatMatrix {
        let mut m = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m[(i, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> RatMatrix {
        let mut m = Self::zeros(idx.len(), self.cols);
        for (ii, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m[(ii, j)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// `[self | col]`.
    pub fn augment(&self, col: &[BigRational]) -> Result<RatMatrix> {
        if col.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: col.len(),
            });
        }
        let mut m = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            m[(i, self.cols)] = col[i].clone();
        }
        Ok(m)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form over `field`, restricted to the first
    /// `limit` columns for pivot search. Returns the pivot columns.
    fn rref_in_place(&mut self, field: &FieldKind, limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..limit.min(self.cols) {
            if r == self.rows {
                break;
            }
            let best = (r..self.rows)
                .filter(|&i| !self[(i, c)].is_zero())
                .max_by(|&a, &b| {
                    field
                        .pivot_weight(&self[(a, c)])
                        .cmp(&field.pivot_weight(&self[(b, c)]))
                        // prefer the upper row on ties
                        .then(b.cmp(&a))
                });
            let Some(piv) = best else { continue };
            self.swap_rows(r, piv);
            let inv = field.inv(&self[(r, c)]).expect("nonzero pivot");
            for j in c..self.cols {
                let v = field.mul(&self[(r, j)], &inv);
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let factor = self[(i, c)].clone();
                for j in c..self.cols {
                    if self[(r, j)].is_zero() {
                        continue;
                    }
                    let v = field.sub(&self[(i, j)], &field.mul(&factor, &self[(r, j)]));
                    self[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Echelon pivot columns over the rationals by fraction-free (Bareiss)
    /// elimination on the integer matrix obtained by clearing each row's
    /// denominators. Every intermediate division is exact.
    fn integer_pivots(&self) -> Vec<usize> {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect();
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, piv);
            let (top, rest) = m.split_at_mut(r + 1);
            let pivot_row = &top[r];
            for row in rest.iter_mut() {
                let lead = std::mem::take(&mut row[c]);
                for j in c + 1..self.cols {
                    let v = &pivot_row[c] * &row[j] - &lead * &pivot_row[j];
                    row[j] = v / &prev;
                }
            }
            prev = m[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, field: &FieldKind) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let piv = m.rref_in_place(field, self.cols);
        (m, piv)
    }

    pub fn rank(&self, field: &FieldKind) -> usize {
        match field {
            FieldKind::Rational => self.integer_pivots().len(),
            FieldKind::Prime(_) => self.rref(field).1.len(),
        }
    }

    /// Solves `self · x = b`, deciding solvability by the rank test.
    pub fn solve(&self, b: &[BigRational], field: &FieldKind) -> Result<Solution> {
        let mut aug = self.augment(b)?;
        if let FieldKind::Rational = field {
            // decide solvability cheaply before paying for the reduced form
            let pivots = aug.integer_pivots();
            if pivots.last() == Some(&self.cols) {
                return Ok(Solution::Unsolvable {
                    rank: pivots.len() - 1,
                    augmented_rank: pivots.len(),
                });
            }
        }
        let pivots = aug.rref_in_place(field, self.cols);
        let rank = pivots.len();
        let inconsistent = (rank..self.rows).any(|i| !aug[(i, self.cols)].is_zero());
        if inconsistent {
            return Ok(Solution::Unsolvable {
                rank,
                augmented_rank: rank + 1,
            });
        }
        let mut x = vec![BigRational::zero(); self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = aug[(i, self.cols)].clone();
        }
        Ok(Solution::Solved {
            x,
            nullity: self.cols - rank,
        })
    }

    /// Exact inverse, `None` when singular.
    pub fn inverse(&self, field: &FieldKind) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = num_traits::One::one();
        }
        let piv = aug.rref_in_place(field, n);
        if piv.len() < n {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = BigRational;

    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ri;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| ri(v)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn rank_of_singular_matrix() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(&FieldKind::Rational), 2);
    }

    #[test]
    fn rank_depends_on_field() {
        // det = 3, singular over GF(3)
        let a = m(&[&[1, 1], &[1, 4]]);
        assert_eq!(a.rank(&FieldKind::Rational), 2);
        assert_eq!(a.rank(&FieldKind::prime(3u32).unwrap()), 1);
    }

    #[test]
    fn solve_reports_rank_gap() {
        let a = m(&[&[1, 1], &[2, 2]]);
        let s = a.solve(&[ri(1), ri(3)], &FieldKind::Rational).unwrap();
        assert_eq!(
            s,
            Solution::Unsolvable {
                rank: 1,
                augmented_rank: 2
            }
        );
    }

    #[test]
    fn solve_exact_rational() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let Solution::Solved { x, nullity } = a.solve(&[ri(1), ri(2)], &FieldKind::Rational).unwrap()
        else {
            panic!("expected a solution");
        };
        assert_eq!(nullity, 0);
        assert_eq!(a.mul_vec(&x).unwrap(), vec![ri(1), ri(2)]);
        assert_eq!(x[0], BigRational::new(1.into(), 5.into()));
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[4, 7, 2], &[3, 6, 1], &[2, 5, 3]]);
        let inv = a.inverse(&FieldKind::Rational).unwrap();
        assert_eq!(a.mul(&inv).unwrap(), RatMatrix::identity(3));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse(&FieldKind::Rational).is_none());
    }

    #[test]
    fn dimension_checks() {
        let a = m(&[&[1, 2]]);
        assert!(a.mul(&a).is_err());
        assert!(a.mul_vec(&[ri(1)]).is_err());
        assert!(RatMatrix::from_rows(vec![vec![ri(1)], vec![ri(1), ri(2)]]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn fraction_free_rank_matches_reduced_form(
            rows in 1usize..7,
            cols in 1usize..7,
            entries in proptest::collection::vec((-4i64..5, 1i64..4), 49),
            dup in proptest::bool::ANY,
        ) {
            let mut data: Vec<Vec<BigRational>> = (0..rows)
                .map(|i| (0..cols).map(|j| {
                    let (n, d) = entries[i * 7 + j];
                    BigRational::new(n.into(), d.into())
                }).collect())
                .collect();
            if dup && rows > 1 {
                // force a dependency
                data[rows - 1] = data[0].iter().map(|x| x * ri(3)).collect();
            }
            let m = RatMatrix::from_rows(data).unwrap();
            let f = FieldKind::Rational;
            proptest::prop_assert_eq!(m.integer_pivots(), m.rref(&f).1);
        }
    }
}
