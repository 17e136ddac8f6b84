//! Dense exact matrices over Z and Q.
//!
//! These are the workhorses for the small cores that survive sparse
//! preprocessing: Smith/Hermite reductions, solves and basis extraction all
//! happen here with arbitrary-precision entries.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct MatZ {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<Int>,
}

impl MatZ {
    pub fn zero(rows: usize, cols: usize) -> Self {
        MatZ { rows, cols, a: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatZ::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = MatZ::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = Int::from(*v);
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &MatZ) -> MatZ {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = MatZ::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let v = &self[(i, k)];
                if v.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let w = &other[(k, j)];
                    if !w.is_zero() {
                        let prod = v * w;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &x[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> MatZ {
        let mut out = MatZ::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rational(&self) -> MatQ {
        let mut out = MatQ::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = Rat::from_integer(self[(i, j)].clone());
            }
        }
        out
    }

    /// Columns assembled from a list of vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<Int>]) -> MatZ {
        let mut m = MatZ::zero(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for i in 0..rows {
                m[(i, j)] = col[i].clone();
            }
        }
        m
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.a.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.a.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row i += c * row j
    pub fn add_row(&mut self, i: usize, j: usize, c: &Int) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.cols {
            let v = &self[(j, k)] * c;
            self[(i, k)] += v;
        }
    }

    /// col i += c * col j
    pub fn add_col(&mut self, i: usize, j: usize, c: &Int) {
        if c.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self[(r, j)] * c;
            self[(r, i)] += v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for k in 0..self.cols {
            let v = -self[(i, k)].clone();
            self[(i, k)] = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let v = -self[(r, j)].clone();
            self[(r, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for MatZ {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.a[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatZ {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.a[i * self.cols + j]
    }
}

impl std::fmt::Debug for MatZ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "MatZ {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct MatQ {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<Rat>,
}

impl MatQ {
    pub fn zero(rows: usize, cols: usize) -> Self {
        MatQ { rows, cols, a: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatQ::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows_i64(rows: Vec<Vec<(i64, i64)>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = MatQ::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, (p, q)) in row.iter().enumerate() {
                m[(i, j)] = rat(*p, *q);
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &MatQ) -> MatQ {
        assert_eq!(self.cols, other.rows);
        let mut out = MatQ::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let v = &self[(i, k)];
                if v.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let w = &other[(k, j)];
                    if !w.is_zero() {
                        let prod = v * w;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &x[j]).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn from_columns(rows: usize, cols: &[Vec<Rat>]) -> MatQ {
        let mut m = MatQ::zero(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for i in 0..rows {
                m[(i, j)] = col[i].clone();
            }
        }
        m
    }

    /// Rank over Q by fraction-managed Gaussian elimination (destructive copy).
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            // find pivot
            let mut piv = None;
            for r in rank..m.rows {
                if !m[(r, col)].is_zero() {
                    piv = Some(r);
                    break;
                }
            }
            let Some(p) = piv else { continue };
            m.swap_rows(rank, p);
            let inv = m[(rank, col)].recip();
            for k in col..m.cols {
                let v = &m[(rank, k)] * &inv;
                m[(rank, k)] = v;
            }
            for r in 0..m.rows {
                if r != rank && !m[(r, col)].is_zero() {
                    let c = m[(r, col)].clone();
                    for k in col..m.cols {
                        let v = &m[(rank, k)] * &c;
                        m[(r, k)] -= v;
                    }
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.a.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    /// Basis of the (right) kernel over Q.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        // reduced row echelon with column tracking
        let mut m = self.clone();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; m.cols];
        let mut rank = 0;
        for col in 0..m.cols {
            let mut piv = None;
            for r in rank..m.rows {
                if !m[(r, col)].is_zero() {
                    piv = Some(r);
                    break;
                }
            }
            let Some(p) = piv else { continue };
            m.swap_rows(rank, p);
            let inv = m[(rank, col)].recip();
            for k in col..m.cols {
                let v = &m[(rank, k)] * &inv;
                m[(rank, k)] = v;
            }
            for r in 0..m.rows {
                if r != rank && !m[(r, col)].is_zero() {
                    let c = m[(r, col)].clone();
                    for k in col..m.cols {
                        let v = &m[(rank, k)] * &c;
                        m[(r, k)] -= v;
                    }
                }
            }
            pivot_of_col[col] = Some(rank);
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        let mut basis = Vec::new();
        for free in 0..m.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![Rat::zero(); m.cols];
            v[free] = Rat::one();
            for (col, piv) in pivot_of_col.iter().enumerate() {
                if let Some(r) = piv {
                    v[col] = -m[(*r, free)].clone();
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Solve self * x = b over Q; returns None when inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, b.len());
        let mut m = self.clone();
        let mut rhs = b.to_vec();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; m.cols];
        let mut rank = 0;
        for col in 0..m.cols {
            let mut piv = None;
            for r in rank..m.rows {
                if !m[(r, col)].is_zero() {
                    piv = Some(r);
                    break;
                }
            }
            let Some(p) = piv else { continue };
            m.swap_rows(rank, p);
            rhs.swap(rank, p);
            let inv = m[(rank, col)].recip();
            for k in col..m.cols {
                let v = &m[(rank, k)] * &inv;
                m[(rank, k)] = v;
            }
            let v = &rhs[rank] * &inv;
            rhs[rank] = v;
            for r in 0..m.rows {
                if r != rank && !m[(r, col)].is_zero() {
                    let c = m[(r, col)].clone();
                    for k in col..m.cols {
                        let v = &m[(rank, k)] * &c;
                        m[(r, k)] -= v;
                    }
                    let v = &rhs[rank] * &c;
                    rhs[r] -= v;
                }
            }
            pivot_of_col[col] = Some(rank);
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        for r in rank..m.rows {
            if !rhs[r].is_zero() {
                return None;
            }
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (col, piv) in pivot_of_col.iter().enumerate() {
            if let Some(r) = piv {
                x[col] = rhs[*r].clone();
            }
        }
        Some(x)
    }
}

impl std::ops::Index<(usize, usize)> for MatQ {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.a[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatQ {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.a[i * self.cols + j]
    }
}

impl std::fmt::Debug for MatQ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "MatQ {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Least common multiple of the denominators in a slice.
pub fn common_denominator(xs: &[Rat]) -> Int {
    let mut d = Int::one();
    for x in xs {
        d = num_integer::lcm(d, x.denom().abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matz_mul_identity() {
        let a = MatZ::from_rows(vec![vec![1, 2], vec![3, 4], vec![5, 6]]);
        let i3 = MatZ::identity(3);
        assert_eq!(i3.mul(&a), a);
    }

    #[test]
    fn matq_rank_and_kernel() {
        let m = MatQ::from_rows_i64(vec![
            vec![(1, 1), (2, 1), (3, 1)],
            vec![(2, 1), (4, 1), (6, 1)],
        ]);
        assert_eq!(m.rank(), 1);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn matq_solve_consistent() {
        let m = MatQ::from_rows_i64(vec![vec![(2, 1), (0, 1)], vec![(1, 1), (1, 1)]]);
        let b = vec![rat(1, 1), rat(1, 1)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
        let inconsistent = MatQ::from_rows_i64(vec![vec![(1, 1)], vec![(1, 1)]]);
        assert!(inconsistent.solve(&[rat(0, 1), rat(1, 1)]).is_none());
    }
}
