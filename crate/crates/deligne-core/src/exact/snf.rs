//! Smith normal form over Z with invertible transforms, and the integer
//! linear algebra built on top of it: kernels, solves, divisibility
//! certificates.
//!
//! `u * a * v = s` with `u`, `v` unimodular and `s` diagonal with
//! `s_1 | s_2 | ... | s_r`, the elementary divisors.

use super::matrix::{Int, MatQ, MatZ, Rat};
use num_traits::{One, Signed, Zero};

/// Pivot scan order. The canonical output is independent of this; exposing it
/// lets tests confirm that.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum PivotOrder {
    #[default]
    RowMajor,
    ColMajor,
}

pub struct Smith {
    /// Diagonal matrix `u * a * v`.
    pub s: MatZ,
    pub u: MatZ,
    /// Inverse of `u`, maintained alongside it (columns of `u_inv` lift the
    /// diagonal back to the original codomain).
    pub u_inv: MatZ,
    pub v: MatZ,
    /// Nonzero diagonal entries, each dividing the next.
    pub divisors: Vec<Int>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }
}

/// Smith normal form. Transforms are always produced; matrices here are the
/// small residual cores, so the cubic bookkeeping is acceptable.
pub fn smith_normal_form(a: &MatZ, order: PivotOrder) -> Smith {
    let mut s = a.clone();
    let mut u = MatZ::identity(a.rows);
    let mut u_inv = MatZ::identity(a.rows);
    let mut v = MatZ::identity(a.cols);
    let n = a.rows.min(a.cols);

    let mut t = 0;
    while t < n {
        // choose a pivot: nonzero entry of minimal |value| in the trailing block
        let mut piv: Option<(usize, usize)> = None;
        let scan = |i: usize, j: usize, piv: &mut Option<(usize, usize)>, s: &MatZ| {
            if s[(i, j)].is_zero() {
                return;
            }
            match piv {
                None => *piv = Some((i, j)),
                Some((pi, pj)) => {
                    if s[(i, j)].abs() < s[(*pi, *pj)].abs() {
                        *piv = Some((i, j));
                    }
                }
            }
        };
        match order {
            PivotOrder::RowMajor => {
                for i in t..s.rows {
                    for j in t..s.cols {
                        scan(i, j, &mut piv, &s);
                    }
                }
            }
            PivotOrder::ColMajor => {
                for j in t..s.cols {
                    for i in t..s.rows {
                        scan(i, j, &mut piv, &s);
                    }
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        u_inv.swap_cols(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        // eliminate row and column t, restarting when a remainder shrinks the pivot
        loop {
            let mut clean = true;
            for i in (t + 1)..s.rows {
                if !s[(i, t)].is_zero() {
                    let q = div_round(&s[(i, t)], &s[(t, t)]);
                    let negq = -q.clone();
                    s.add_row(i, t, &negq);
                    u.add_row(i, t, &negq);
                    // (I + c E_it)^{-1} applied on the right: col t -= c * col i
                    u_inv.add_col(t, i, &q);
                    if !s[(i, t)].is_zero() {
                        s.swap_rows(t, i);
                        u.swap_rows(t, i);
                        u_inv.swap_cols(t, i);
                        clean = false;
                    }
                }
            }
            for j in (t + 1)..s.cols {
                if !s[(t, j)].is_zero() {
                    let q = div_round(&s[(t, j)], &s[(t, t)]);
                    let negq = -q;
                    s.add_col(j, t, &negq);
                    v.add_col(j, t, &negq);
                    if !s[(t, j)].is_zero() {
                        s.swap_cols(t, j);
                        v.swap_cols(t, j);
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }

        // the pivot must divide every entry of the trailing block
        let mut retry = false;
        'outer: for i in (t + 1)..s.rows {
            for j in (t + 1)..s.cols {
                if !(&s[(i, j)] % &s[(t, t)]).is_zero() {
                    let one = Int::one();
                    let neg_one = -Int::one();
                    s.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                    u_inv.add_col(i, t, &neg_one);
                    retry = true;
                    break 'outer;
                }
            }
        }
        if retry {
            continue;
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        t += 1;
    }

    let divisors: Vec<Int> = (0..t).map(|i| s[(i, i)].clone()).collect();
    debug_assert!(divisors
        .windows(2)
        .all(|w| (&w[1] % &w[0]).is_zero()));
    Smith { s, u, u_inv, v, divisors }
}

/// Round-to-nearest integer division, which keeps remainders small.
fn div_round(a: &Int, b: &Int) -> Int {
    let (q, r) = num_integer::Integer::div_rem(a, b);
    let two_r = r.abs() * Int::from(2);
    if two_r > b.abs() {
        if (a.is_negative()) ^ (b.is_negative()) {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

/// Basis of `{ x in Z^cols : a x = 0 }`; this is automatically saturated.
pub fn kernel_z(a: &MatZ) -> Vec<Vec<Int>> {
    let snf = smith_normal_form(a, PivotOrder::RowMajor);
    let r = snf.rank();
    (r..a.cols).map(|j| snf.v.column(j)).collect()
}

/// Solve `a x = b` over Z, or explain why there is no solution.
pub enum SolveZ {
    Solution(Vec<Int>),
    /// A rational functional with integral values on the image of `a` but a
    /// non-integral value on `b`.
    Obstruction(Vec<Rat>),
}

pub fn solve_z(a: &MatZ, b: &[Int]) -> SolveZ {
    assert_eq!(a.rows, b.len());
    let snf = smith_normal_form(a, PivotOrder::RowMajor);
    let ub = snf.u.mul_vec(b);
    let r = snf.rank();
    // rank obstruction: a zero row of s with nonzero rhs
    for i in r..a.rows {
        if !ub[i].is_zero() {
            let scale = Rat::new(Int::one(), ub[i].clone() * Int::from(2));
            let phi: Vec<Rat> = (0..a.rows)
                .map(|j| Rat::from_integer(snf.u[(i, j)].clone()) * &scale)
                .collect();
            return SolveZ::Obstruction(phi);
        }
    }
    // divisibility obstruction
    for i in 0..r {
        if !(&ub[i] % &snf.s[(i, i)]).is_zero() {
            let scale = Rat::new(Int::one(), snf.s[(i, i)].clone());
            let phi: Vec<Rat> = (0..a.rows)
                .map(|j| Rat::from_integer(snf.u[(i, j)].clone()) * &scale)
                .collect();
            return SolveZ::Obstruction(phi);
        }
    }
    let mut y = vec![Int::zero(); a.cols];
    for i in 0..r {
        y[i] = &ub[i] / &snf.s[(i, i)];
    }
    SolveZ::Solution(snf.v.mul_vec(&y))
}

/// Is `x` an integer combination of the columns of `a`?
pub fn in_lattice(a: &MatZ, x: &[Int]) -> bool {
    matches!(solve_z(a, x), SolveZ::Solution(_))
}

/// Brute-force elementary divisors via gcds of k x k minors. Exponential;
/// only for cross-checking `smith_normal_form` on small matrices.
pub fn elementary_divisors_by_minors(a: &MatZ) -> Vec<Int> {
    let n = a.rows.min(a.cols);
    let mut gcds = Vec::new(); // gcd of all k x k minors, k = 1..
    for k in 1..=n {
        let mut g = Int::zero();
        for rows in combinations(a.rows, k) {
            for cols in combinations(a.cols, k) {
                let m = minor(a, &rows, &cols);
                g = num_integer::gcd(g, m);
            }
        }
        if g.is_zero() {
            break;
        }
        gcds.push(g);
    }
    let mut divs = Vec::new();
    let mut prev = Int::one();
    for g in gcds {
        divs.push(&g / &prev);
        prev = g;
    }
    divs
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn minor(a: &MatZ, rows: &[usize], cols: &[usize]) -> Int {
    let k = rows.len();
    if k == 1 {
        return a[(rows[0], cols[0])].clone();
    }
    let mut det = Int::zero();
    for (idx, &r) in rows.iter().enumerate() {
        let sub_rows: Vec<usize> = rows.iter().copied().filter(|&x| x != r).collect();
        let m = minor(a, &sub_rows, &cols[1..]);
        let term = &a[(r, cols[0])] * m;
        if idx % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}

/// Saturate the column span of `b` inside Z^rows: returns a basis of
/// the group of integer vectors lying in the rational span of the columns.
/// Expects `b` small in both dimensions.
pub fn saturate_columns(b: &MatZ) -> Vec<Vec<Int>> {
    if b.cols == 0 {
        return Vec::new();
    }
    // x is in the saturation iff x is orthogonal to every rational functional
    // vanishing on the columns; said functionals form the kernel of b^T.
    let left = b.transpose().to_rational().kernel_basis();
    if left.is_empty() {
        // full column span
        return (0..b.rows)
            .map(|i| {
                let mut e = vec![Int::zero(); b.rows];
                e[i] = Int::one();
                e
            })
            .collect();
    }
    let mut rows = MatQ::zero(left.len(), b.rows);
    for (i, f) in left.iter().enumerate() {
        for j in 0..b.rows {
            rows[(i, j)] = f[j].clone();
        }
    }
    // clear denominators row by row, then take the integer kernel
    let mut zrows = MatZ::zero(left.len(), b.rows);
    for i in 0..left.len() {
        let d = super::matrix::common_denominator(&(0..b.rows).map(|j| rows[(i, j)].clone()).collect::<Vec<_>>());
        for j in 0..b.rows {
            let v = &rows[(i, j)] * Rat::from_integer(d.clone());
            assert!(v.is_integer());
            zrows[(i, j)] = v.to_integer();
        }
    }
    kernel_z(&zrows)
}
