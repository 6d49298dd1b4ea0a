//! Exact rational linear algebra.
//!
//! Matrices hold arbitrary-precision rationals. Rank and echelon forms are
//! computed by fraction-free (Bareiss) elimination on integer-scaled rows, so
//! the expensive middle of the computation never touches a fraction; kernels
//! and inverses are recovered from the echelon form with exact rational
//! arithmetic at the end.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parse "num/den" (or a plain integer) into a rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad rational numerator {num:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad rational denominator {den:?}")))?;
    if d.is_zero() {
        return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

/// Render as "num/den" with the denominator always present, matching the
/// serialized form used across the JSON interfaces.
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Dense matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl std::fmt::Debug for RatMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "RatMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for RatMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl RatMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        RatMat::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == RatMat::identity(self.rows)
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> RatMat {
        let mut t = RatMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let mut out = RatMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RatMat) -> RatMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &RatMat) -> RatMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> RatMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    acc += &self[(i, j)] * &v[j];
                }
                acc
            })
            .collect()
    }

    /// Stack horizontally: [self | other].
    pub fn hstack(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.rows, other.rows);
        let mut out = RatMat::zero(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Stack vertically: [self; other].
    pub fn vstack(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        RatMat { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Clear denominators row by row; rank and kernel are unchanged.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let mut lcm = BigInt::one();
                for j in 0..self.cols {
                    let d = self[(i, j)].denom();
                    lcm = num_integer::lcm(lcm, d.clone());
                }
                (0..self.cols)
                    .map(|j| {
                        let x = &self[(i, j)];
                        x.numer() * (&lcm / x.denom())
                    })
                    .collect()
            })
            .collect()
    }

    /// Fraction-free row echelon form. Returns the integer echelon rows, the
    /// pivot columns in order, and nothing else; all divisions are exact.
    fn bareiss(&self) -> (Vec<Vec<BigInt>>, Vec<usize>) {
        let mut m = self.integer_rows();
        let (nr, nc) = (self.rows, self.cols);
        let mut pivots: Vec<usize> = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0usize;
        for c in 0..nc {
            if r == nr {
                break;
            }
            // first nonzero entry in column c at or below row r
            let Some(p) = (r..nr).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            for i in r + 1..nr {
                for j in c + 1..nc {
                    let num = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                    m[i][j] = num / &prev; // exact by the Bareiss identity
                }
                m[i][c] = BigInt::zero();
            }
            prev = m[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.bareiss().1.len()
    }

    /// Reduced row echelon form over the rationals, plus pivot columns.
    /// The forward pass is fraction-free; only the final normalization of the
    /// r nonzero rows divides.
    pub fn rref(&self) -> (RatMat, Vec<usize>) {
        let (ech, pivots) = self.bareiss();
        let r = pivots.len();
        let nc = self.cols;
        let mut rows: Vec<Vec<Rat>> = ech
            .into_iter()
            .take(r)
            .map(|row| row.into_iter().map(Rat::from_integer).collect())
            .collect();
        // back-substitute upward
        for i in (0..r).rev() {
            let pc = pivots[i];
            let inv = rows[i][pc].recip();
            for x in rows[i].iter_mut() {
                *x *= &inv;
            }
            for k in 0..i {
                let factor = rows[k][pc].clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..nc {
                    let sub = &factor * &rows[i][j];
                    rows[k][j] -= sub;
                }
            }
        }
        let mut full = RatMat::zero(self.rows, nc);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, x) in row.into_iter().enumerate() {
                full[(i, j)] = x;
            }
        }
        (full, pivots)
    }

    /// Basis of the right kernel {x : Ax = 0}, one column per basis vector,
    /// in the standard free-variable order.
    pub fn kernel_basis(&self) -> RatMat {
        let (rref, pivots) = self.rref();
        let nc = self.cols;
        let free: Vec<usize> = (0..nc).filter(|j| !pivots.contains(j)).collect();
        let mut basis = RatMat::zero(nc, free.len());
        for (k, &fj) in free.iter().enumerate() {
            basis[(fj, k)] = Rat::one();
            for (i, &pj) in pivots.iter().enumerate() {
                basis[(pj, k)] = -rref[(i, fj)].clone();
            }
        }
        basis
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Inverse of a square invertible matrix.
    pub fn inverse(&self) -> Result<RatMat> {
        if self.rows != self.cols {
            return Err(Error::Precondition("inverse of a non-square matrix".into()));
        }
        let aug = self.hstack(&RatMat::identity(self.rows));
        let (rref, pivots) = aug.rref();
        if pivots.len() != self.rows || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(Error::Precondition("matrix is singular".into()));
        }
        let mut inv = RatMat::zero(self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..self.rows {
                inv[(i, j)] = rref[(i, self.rows + j)].clone();
            }
        }
        Ok(inv)
    }

    /// Solve Ax = b; returns one solution (the one with free variables zero)
    /// or None when inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, b.len());
        let bm = RatMat::from_rows(b.iter().map(|x| vec![x.clone()]).collect());
        let aug = self.hstack(&bm);
        let (rref, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the constant column
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = rref[(i, self.cols)].clone();
        }
        Some(x)
    }

    /// Express every column of `cols` in the column span of `basis`.
    /// Returns the coefficient matrix C with basis * C = cols, or None if
    /// some column is outside the span.
    pub fn express_in_basis(basis: &RatMat, cols: &RatMat) -> Option<RatMat> {
        assert_eq!(basis.rows, cols.rows);
        let mut out = RatMat::zero(basis.cols, cols.cols);
        for j in 0..cols.cols {
            let target = cols.col(j);
            let sol = basis.solve(&target)?;
            for (i, v) in sol.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Some(out)
    }

    pub fn to_string_grid(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| format_rat(&self[(i, j)])).collect())
            .collect()
    }

    pub fn from_string_grid(grid: &[Vec<String>]) -> Result<RatMat> {
        let rows = grid
            .iter()
            .map(|row| row.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if let Some(c) = rows.first().map(|r| r.len()) {
            if rows.iter().any(|r| r.len() != c) {
                return Err(Error::InvalidInput("ragged matrix".into()));
            }
        }
        Ok(RatMat::from_rows(rows))
    }
}

/// Run `f` over `0..n` with at most `thread_cap()` worker threads, preserving
/// index order in the output.
pub fn par_map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let cap = crate::thread_cap().min(n.max(1));
    if cap <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let chunk = n.div_ceil(cap);
    std::thread::scope(|scope| {
        for (t, slot) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (k, s) in slot.iter_mut().enumerate() {
                    *s = Some(f(t * chunk + k));
                }
            });
        }
    });
    out.into_iter().map(|x| x.unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain textbook Gaussian elimination over the rationals; kept separate
    /// from the fraction-free path so the two can cross-check each other.
    fn naive_rank(m: &RatMat) -> usize {
        let mut rows: Vec<Vec<Rat>> =
            (0..m.nrows()).map(|i| m.row(i).to_vec()).collect();
        let nc = m.ncols();
        let mut rank = 0;
        for c in 0..nc {
            let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(rank, p);
            let inv = rows[rank][c].recip();
            for x in rows[rank].iter_mut() {
                *x *= &inv;
            }
            for i in 0..rows.len() {
                if i != rank && !rows[i][c].is_zero() {
                    let f = rows[i][c].clone();
                    for j in 0..nc {
                        let sub = &f * &rows[rank][j];
                        rows[i][j] -= sub;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn rank_matches_naive_elimination() {
        let cases = vec![
            RatMat::from_i64(&[&[1, 2], &[2, 4]]),
            RatMat::from_i64(&[&[1, 0, 2], &[0, 1, 3], &[1, 1, 5]]),
            RatMat::from_i64(&[&[0, 0], &[0, 0]]),
            RatMat::from_i64(&[&[2, 3, 5], &[7, 11, 13], &[17, 19, 23]]),
        ];
        for m in cases {
            assert_eq!(m.rank(), naive_rank(&m), "{m:?}");
        }
    }

    #[test]
    fn kernel_vectors_are_killed() {
        let m = RatMat::from_i64(&[&[1, 2, 3], &[4, 5, 6]]);
        let k = m.kernel_basis();
        assert_eq!(k.ncols(), 1);
        let v = k.col(0);
        assert!(m.mul_vec(&v).iter().all(|x| x.is_zero()));
        assert_eq!(m.rank() + k.ncols(), m.ncols());
    }

    #[test]
    fn inverse_round_trip() {
        let m = RatMat::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = RatMat::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(m.inverse().is_err());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = RatMat::from_i64(&[&[1, 1], &[0, 1]]);
        let x = m.solve(&[rat_int(3), rat_int(1)]).unwrap();
        assert_eq!(x, vec![rat_int(2), rat_int(1)]);
        let bad = RatMat::from_i64(&[&[1, 1], &[1, 1]]);
        assert!(bad.solve(&[rat_int(0), rat_int(1)]).is_none());
    }

    #[test]
    fn rational_entries_are_exact() {
        let m = RatMat::from_rows(vec![
            vec![rat(1, 3), rat(1, 6)],
            vec![rat(2, 3), rat(1, 3)],
        ]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.nullity(), 1);
    }

    #[test]
    fn parse_and_format_rat() {
        assert_eq!(parse_rat("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rat("-2").unwrap(), rat_int(-2));
        assert_eq!(format_rat(&rat(3, 4)), "3/4");
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn par_map_is_order_preserving() {
        std::env::set_var("GLUEFORGE_THREADS", "3");
        let v = par_map_indexed(10, |i| i * i);
        assert_eq!(v, (0..10).map(|i| i * i).collect::<Vec<_>>());
        std::env::remove_var("GLUEFORGE_THREADS");
    }

    proptest::proptest! {
        #[test]
        fn bareiss_rank_equals_naive(rows in proptest::collection::vec(
            proptest::collection::vec(-5i64..=5, 4), 1..5)) {
            let m = RatMat::from_rows(
                rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect());
            proptest::prop_assert_eq!(m.rank(), naive_rank(&m));
        }

        #[test]
        fn kernel_dimension_theorem(rows in proptest::collection::vec(
            proptest::collection::vec(-4i64..=4, 3), 1..5)) {
            let m = RatMat::from_rows(
                rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect());
            let k = m.kernel_basis();
            proptest::prop_assert_eq!(m.rank() + k.ncols(), m.ncols());
            for j in 0..k.ncols() {
                let v = k.col(j);
                proptest::prop_assert!(m.mul_vec(&v).iter().all(|x| x.is_zero()));
            }
        }
    }
}
