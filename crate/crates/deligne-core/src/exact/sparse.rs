//! Sparse exact linear algebra for the large coboundary matrices.
//!
//! Most entries in an assembled differential are +-1, so integer kernels are
//! computed by unimodular column elimination that prefers unit pivots and
//! singleton rows (the latter cascade and remove most of a boundary-like
//! matrix at no fill-in cost). Rational systems use a column echelon
//! factorization with transcripts, so that solvability of many right-hand
//! sides against one matrix is cheap.

use super::matrix::{Int, MatQ, MatZ, Rat};
use num_traits::{One, Signed, Zero};
use std::collections::{BinaryHeap, VecDeque};

/// Sparse vector: (index, value), sorted by index, no zeros.
pub type SvZ = Vec<(u32, Int)>;
pub type SvQ = Vec<(u32, Rat)>;

pub fn sv_get<T: Clone>(v: &[(u32, T)], i: u32) -> Option<T> {
    v.binary_search_by_key(&i, |e| e.0).ok().map(|p| v[p].1.clone())
}

/// dst + c * src, merging sorted entries.
fn axpy<T>(dst: &[(u32, T)], src: &[(u32, T)], c: &T) -> Vec<(u32, T)>
where
    T: Clone + Zero + for<'a> std::ops::Mul<&'a T, Output = T> + std::ops::Add<T, Output = T>,
{
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        let take_dst = j >= src.len() || (i < dst.len() && dst[i].0 < src[j].0);
        let take_src = i >= dst.len() || (j < src.len() && src[j].0 < dst[i].0);
        if take_dst {
            out.push(dst[i].clone());
            i += 1;
        } else if take_src {
            let v = src[j].1.clone() * c;
            if !v.is_zero() {
                out.push((src[j].0, v));
            }
            j += 1;
        } else {
            let v = dst[i].1.clone() + src[j].1.clone() * c;
            if !v.is_zero() {
                out.push((dst[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn axpy_z(dst: &SvZ, src: &SvZ, c: &Int) -> SvZ {
    axpy(dst, src, c)
}

pub fn axpy_q(dst: &SvQ, src: &SvQ, c: &Rat) -> SvQ {
    axpy(dst, src, c)
}

/// Sparse integer matrix, stored by columns.
#[derive(Clone, Debug)]
pub struct SpZ {
    pub rows: usize,
    pub cols: Vec<SvZ>,
}

impl SpZ {
    pub fn new(rows: usize, ncols: usize) -> Self {
        SpZ { rows, cols: vec![Vec::new(); ncols] }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn push_entry(&mut self, row: u32, col: usize, v: Int) {
        if v.is_zero() {
            return;
        }
        match self.cols[col].binary_search_by_key(&row, |e| e.0) {
            Ok(p) => {
                let nv = &self.cols[col][p].1 + v;
                if nv.is_zero() {
                    self.cols[col].remove(p);
                } else {
                    self.cols[col][p].1 = nv;
                }
            }
            Err(p) => self.cols[col].insert(p, (row, v)),
        }
    }

    pub fn from_dense(m: &MatZ) -> Self {
        let mut s = SpZ::new(m.rows, m.cols);
        for j in 0..m.cols {
            for i in 0..m.rows {
                if !m[(i, j)].is_zero() {
                    s.cols[j].push((i as u32, m[(i, j)].clone()));
                }
            }
        }
        s
    }

    pub fn to_dense(&self) -> MatZ {
        let mut m = MatZ::zero(self.rows, self.cols.len());
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                m[(*i as usize, j)] = v.clone();
            }
        }
        m
    }

    pub fn mul_sv(&self, x: &SvZ) -> SvZ {
        let mut acc: std::collections::BTreeMap<u32, Int> = Default::default();
        for (j, c) in x {
            for (i, v) in &self.cols[*j as usize] {
                let e = acc.entry(*i).or_insert_with(Int::zero);
                *e += v * c;
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }
}

/// Sparse rational matrix, stored by columns.
#[derive(Clone, Debug)]
pub struct SpQ {
    pub rows: usize,
    pub cols: Vec<SvQ>,
}

impl SpQ {
    pub fn new(rows: usize, ncols: usize) -> Self {
        SpQ { rows, cols: vec![Vec::new(); ncols] }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn push_entry(&mut self, row: u32, col: usize, v: Rat) {
        if v.is_zero() {
            return;
        }
        match self.cols[col].binary_search_by_key(&row, |e| e.0) {
            Ok(p) => {
                let nv = &self.cols[col][p].1 + v;
                if nv.is_zero() {
                    self.cols[col].remove(p);
                } else {
                    self.cols[col][p].1 = nv;
                }
            }
            Err(p) => self.cols[col].insert(p, (row, v)),
        }
    }

    pub fn from_dense(m: &MatQ) -> Self {
        let mut s = SpQ::new(m.rows, m.cols);
        for j in 0..m.cols {
            for i in 0..m.rows {
                if !m[(i, j)].is_zero() {
                    s.cols[j].push((i as u32, m[(i, j)].clone()));
                }
            }
        }
        s
    }

    pub fn to_dense(&self) -> MatQ {
        let mut m = MatQ::zero(self.rows, self.cols.len());
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                m[(*i as usize, j)] = v.clone();
            }
        }
        m
    }

    pub fn mul_sv(&self, x: &SvQ) -> SvQ {
        let mut acc: std::collections::BTreeMap<u32, Rat> = Default::default();
        for (j, c) in x {
            for (i, v) in &self.cols[*j as usize] {
                let e = acc.entry(*i).or_insert_with(Rat::zero);
                *e += v * c;
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }
}

/// Basis of the integer kernel of a sparse integer matrix, saturated by
/// construction (the transform stays unimodular throughout).
pub fn kernel_z_sparse(a: &SpZ) -> Vec<SvZ> {
    eliminate_columns(a).0
}

/// Unimodular column reduction: the returned (nonzero) columns span the same
/// lattice as the columns of `a`, usually with far fewer of them. Transcripts
/// are not kept.
pub fn reduce_columns_z(a: &SpZ) -> Vec<SvZ> {
    eliminate_columns(a).1
}

fn eliminate_columns(a: &SpZ) -> (Vec<SvZ>, Vec<SvZ>) {
    let ncols = a.ncols();
    let mut w: Vec<SvZ> = a.cols.clone();
    let mut v: Vec<SvZ> = (0..ncols).map(|j| vec![(j as u32, Int::one())]).collect();
    let mut active: Vec<bool> = vec![true; ncols];
    let mut row_used: Vec<bool> = vec![false; a.rows];
    let mut row_cnt: Vec<u32> = vec![0; a.rows];
    let mut row_cols: Vec<Vec<u32>> = vec![Vec::new(); a.rows];
    for (j, col) in w.iter().enumerate() {
        for (r, _) in col {
            row_cnt[*r as usize] += 1;
            row_cols[*r as usize].push(j as u32);
        }
    }
    let mut kernel: Vec<SvZ> = Vec::new();

    // immediately retire zero columns
    for j in 0..ncols {
        if w[j].is_empty() {
            active[j] = false;
            kernel.push(std::mem::take(&mut v[j]));
        }
    }

    // replace column j by w_j + c * w_src (and mirror on v), updating row data
    macro_rules! col_op {
        ($j:expr, $src:expr, $c:expr, $w:ident, $v:ident, $row_cnt:ident, $row_cols:ident) => {{
            let newcol = axpy(&$w[$j], &$w[$src], $c);
            let mut oi = 0;
            let mut ni = 0;
            let old = &$w[$j];
            while oi < old.len() || ni < newcol.len() {
                if ni >= newcol.len() || (oi < old.len() && old[oi].0 < newcol[ni].0) {
                    $row_cnt[old[oi].0 as usize] -= 1;
                    oi += 1;
                } else if oi >= old.len() || newcol[ni].0 < old[oi].0 {
                    $row_cnt[newcol[ni].0 as usize] += 1;
                    $row_cols[newcol[ni].0 as usize].push($j as u32);
                    ni += 1;
                } else {
                    oi += 1;
                    ni += 1;
                }
            }
            $w[$j] = newcol;
            let nv = axpy(&$v[$j], &$v[$src], $c);
            $v[$j] = nv;
        }};
    }

    let mut singles: VecDeque<u32> = (0..a.rows as u32)
        .filter(|&r| row_cnt[r as usize] == 1 && !row_used[r as usize])
        .collect();
    // lazy max-heap of (negated score, col, stamp)
    let mut stamp: Vec<u64> = vec![0; ncols];
    let mut heap: BinaryHeap<(std::cmp::Reverse<u64>, usize, u64)> = BinaryHeap::new();
    let score = |col: &SvZ, row_cnt: &Vec<u32>, row_used: &Vec<bool>| -> Option<u64> {
        let mut best: Option<u64> = None;
        for (r, val) in col {
            if row_used[*r as usize] {
                continue;
            }
            let s = if val.abs().is_one() {
                (col.len() as u64 - 1) * (row_cnt[*r as usize] as u64 - 1)
            } else {
                // non-unit entries are a last resort
                1_000_000_000 + (col.len() as u64) * (row_cnt[*r as usize] as u64)
            };
            best = Some(best.map_or(s, |b: u64| b.min(s)));
        }
        best
    };
    for j in 0..ncols {
        if active[j] {
            if let Some(s) = score(&w[j], &row_cnt, &row_used) {
                heap.push((std::cmp::Reverse(s), j, stamp[j]));
            }
        }
    }

    // finish column j with pivot row r
    let finish = |j: usize,
                      r: u32,
                      active: &mut Vec<bool>,
                      row_used: &mut Vec<bool>,
                      row_cnt: &mut Vec<u32>,
                      w: &Vec<SvZ>,
                      singles: &mut VecDeque<u32>| {
        active[j] = false;
        row_used[r as usize] = true;
        for (rr, _) in &w[j] {
            row_cnt[*rr as usize] -= 1;
            if row_cnt[*rr as usize] == 1 && !row_used[*rr as usize] {
                singles.push_back(*rr);
            }
        }
    };

    loop {
        // singleton rows first: no other column shares the row, so finishing is free
        if let Some(r) = singles.pop_front() {
            if row_used[r as usize] || row_cnt[r as usize] != 1 {
                continue;
            }
            let j = {
                let mut found = None;
                row_cols[r as usize].retain(|&jj| {
                    active[jj as usize] && sv_get(&w[jj as usize], r).is_some()
                });
                for &jj in &row_cols[r as usize] {
                    found = Some(jj as usize);
                    break;
                }
                found
            };
            let Some(j) = j else { continue };
            finish(j, r, &mut active, &mut row_used, &mut row_cnt, &w, &mut singles);
            continue;
        }

        // otherwise take the best scored column from the heap
        let mut chosen: Option<usize> = None;
        while let Some((_, j, st)) = heap.pop() {
            if active[j] && stamp[j] == st && !w[j].is_empty() {
                chosen = Some(j);
                break;
            }
        }
        let Some(j) = chosen else { break };
        if !singles.is_empty() {
            // a cascade appeared meanwhile; requeue and drain it first
            stamp[j] += 1;
            if let Some(s) = score(&w[j], &row_cnt, &row_used) {
                heap.push((std::cmp::Reverse(s), j, stamp[j]));
            }
            continue;
        }

        // pick the pivot entry realizing the score
        let mut pick: Option<(u32, bool)> = None; // (row, unit)
        let mut best = u64::MAX;
        for (r, val) in &w[j] {
            if row_used[*r as usize] {
                continue;
            }
            let unit = val.abs().is_one();
            let s = if unit {
                (w[j].len() as u64 - 1) * (row_cnt[*r as usize] as u64 - 1)
            } else {
                1_000_000_000 + (w[j].len() as u64) * (row_cnt[*r as usize] as u64)
            };
            if s < best {
                best = s;
                pick = Some((*r, unit));
            }
        }
        let Some((r, unit)) = pick else {
            // only used rows left in this column; it can no longer change
            active[j] = false;
            for (rr, _) in &w[j] {
                row_cnt[*rr as usize] -= 1;
                if row_cnt[*rr as usize] == 1 && !row_used[*rr as usize] {
                    singles.push_back(*rr);
                }
            }
            continue;
        };

        if unit {
            // clear row r from every other active column
            let pv = sv_get(&w[j], r).unwrap();
            row_cols[r as usize]
                .retain(|&jj| active[jj as usize] && sv_get(&w[jj as usize], r).is_some());
            // repeated introductions of the same row leave duplicate listings
            row_cols[r as usize].sort_unstable();
            row_cols[r as usize].dedup();
            let others: Vec<u32> = row_cols[r as usize]
                .iter()
                .copied()
                .filter(|&jj| jj as usize != j)
                .collect();
            for jj in others {
                let k = jj as usize;
                let e = sv_get(&w[k], r).unwrap();
                let c = -(&e / &pv); // pv is +-1
                col_op!(k, j, &c, w, v, row_cnt, row_cols);
                stamp[k] += 1;
                if w[k].is_empty() {
                    active[k] = false;
                    kernel.push(std::mem::take(&mut v[k]));
                } else if let Some(s) = score(&w[k], &row_cnt, &row_used) {
                    heap.push((std::cmp::Reverse(s), k, stamp[k]));
                }
            }
            finish(j, r, &mut active, &mut row_used, &mut row_cnt, &w, &mut singles);
        } else {
            // no unit available: one euclidean sweep on row r shrinks entries
            row_cols[r as usize]
                .retain(|&jj| active[jj as usize] && sv_get(&w[jj as usize], r).is_some());
            row_cols[r as usize].sort_unstable();
            row_cols[r as usize].dedup();
            let live: Vec<u32> = row_cols[r as usize].clone();
            let (mut pj, mut pval) = (j, sv_get(&w[j], r).unwrap());
            for &jj in &live {
                let k = jj as usize;
                if k == pj {
                    continue;
                }
                if let Some(e) = sv_get(&w[k], r) {
                    if !e.is_zero() && e.abs() < pval.abs() {
                        pj = k;
                        pval = e;
                    }
                }
            }
            let mut progressed = false;
            for &jj in &live {
                let k = jj as usize;
                if k == pj {
                    continue;
                }
                if let Some(e) = sv_get(&w[k], r) {
                    let q = num_integer::Integer::div_floor(&e, &pval);
                    if !q.is_zero() {
                        let c = -q;
                        col_op!(k, pj, &c, w, v, row_cnt, row_cols);
                        stamp[k] += 1;
                        progressed = true;
                        if w[k].is_empty() {
                            active[k] = false;
                            kernel.push(std::mem::take(&mut v[k]));
                        } else if let Some(s) = score(&w[k], &row_cnt, &row_used) {
                            heap.push((std::cmp::Reverse(s), k, stamp[k]));
                        }
                    }
                }
            }
            row_cols[r as usize]
                .retain(|&jj| active[jj as usize] && sv_get(&w[jj as usize], r).is_some());
            row_cols[r as usize].sort_unstable();
            row_cols[r as usize].dedup();
            if !progressed && row_cols[r as usize].len() == 1 {
                // pivot alone in the row now; finish it even if non-unit
                finish(pj, r, &mut active, &mut row_used, &mut row_cnt, &w, &mut singles);
            } else {
                stamp[pj] += 1;
                if let Some(s) = score(&w[pj], &row_cnt, &row_used) {
                    heap.push((std::cmp::Reverse(s), pj, stamp[pj]));
                }
            }
        }
    }

    kernel.sort_by(|a, b| a.first().map(|e| e.0).cmp(&b.first().map(|e| e.0)));
    let reduced: Vec<SvZ> = w.into_iter().filter(|c| !c.is_empty()).collect();
    (kernel, reduced)
}

/// Column echelon factorization of a sparse rational matrix with transcripts:
/// supports rank, kernel basis, image basis selection and repeated solves.
pub struct QFactor {
    nrows: usize,
    /// established echelon columns with their pivot rows, in creation order
    ech: Vec<(u32, SvQ)>,
    /// transcript: each echelon column as a combination of original columns
    tr: Vec<SvQ>,
    /// original column indices at which the rank grew (an image basis)
    pub pivot_cols: Vec<usize>,
    /// kernel vectors over original column indices
    pub kernel: Vec<SvQ>,
}

impl QFactor {
    pub fn rank(&self) -> usize {
        self.ech.len()
    }

    pub fn new(a: &SpQ) -> QFactor {
        let mut f = QFactor {
            nrows: a.rows,
            ech: Vec::new(),
            tr: Vec::new(),
            pivot_cols: Vec::new(),
            kernel: Vec::new(),
        };
        // prefer pivot rows that occur rarely overall
        let mut row_freq = vec![0u32; a.rows];
        for col in &a.cols {
            for (r, _) in col {
                row_freq[*r as usize] += 1;
            }
        }
        for (j, col) in a.cols.iter().enumerate() {
            let (c, t) = f.reduce(col.clone(), vec![(j as u32, Rat::one())]);
            if c.is_empty() {
                f.kernel.push(t);
            } else {
                let (mut pr, mut pf) = (c[0].0, row_freq[c[0].0 as usize]);
                for (r, _) in &c {
                    if row_freq[*r as usize] < pf {
                        pr = *r;
                        pf = row_freq[*r as usize];
                    }
                }
                f.ech.push((pr, c));
                f.tr.push(t);
                f.pivot_cols.push(j);
            }
        }
        f
    }

    /// Forward-reduce a column against the established echelon columns.
    fn reduce(&self, mut c: SvQ, mut t: SvQ) -> (SvQ, SvQ) {
        for (idx, (pr, e)) in self.ech.iter().enumerate() {
            if let Some(val) = sv_get(&c, *pr) {
                let pivval = sv_get(e, *pr).unwrap();
                let coeff = -(val / pivval);
                c = axpy(&c, e, &coeff);
                t = axpy(&t, &self.tr[idx], &coeff);
            }
        }
        (c, t)
    }

    /// Solve `a x = rhs`; returns x over original column indices, or None.
    pub fn solve(&self, rhs: &SvQ) -> Option<SvQ> {
        let (c, t) = self.reduce(rhs.clone(), Vec::new());
        if c.is_empty() {
            // rhs - a (combination) = 0, combination is -t
            Some(t.into_iter().map(|(i, v)| (i, -v)).collect())
        } else {
            None
        }
    }

    /// The residual of `rhs` after reduction; empty iff solvable. The residual
    /// row indices certify unsolvability.
    pub fn residual(&self, rhs: &SvQ) -> SvQ {
        self.reduce(rhs.clone(), Vec::new()).0
    }

    /// Pivot rows of the established echelon columns. Residuals vanish on
    /// these rows, so the complementary positions parametrize the cokernel.
    pub fn pivot_rows(&self) -> Vec<u32> {
        self.ech.iter().map(|(r, _)| *r).collect()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }
}
