//! The mixed category: spaces Z^a ⊕ Q^b and the maps between them.
//!
//! Every cochain space in the model is a direct sum of a free abelian group
//! (the integrality slots) and a rational vector space (the form slots). A
//! morphism never maps a rational coordinate to an integer one, so it is a
//! block triangle
//!
//! ```text
//!   [ A  0 ]   A : Z^a -> Z^a'   (integer entries)
//!   [ C  D ]   C : Z^a -> Q^b',  D : Q^b -> Q^b'
//! ```
//!
//! `solve_mixed` decides membership of a target vector in the image and
//! returns either a preimage or a certificate functional: a rational
//! functional on the target that is integral on the image but not on the
//! given vector.

use super::matrix::{common_denominator, Int, MatQ, MatZ, Rat};
use super::snf::{solve_z, SolveZ};
use super::sparse::{SpQ, SpZ, SvQ, SvZ};
use num_traits::{One, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MixedSpace {
    pub n_z: usize,
    pub n_q: usize,
}

impl MixedSpace {
    pub fn new(n_z: usize, n_q: usize) -> Self {
        MixedSpace { n_z, n_q }
    }

    pub fn dim(&self) -> usize {
        self.n_z + self.n_q
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedVec {
    pub z: Vec<Int>,
    pub q: Vec<Rat>,
}

impl MixedVec {
    pub fn zero(s: MixedSpace) -> Self {
        MixedVec { z: vec![Int::zero(); s.n_z], q: vec![Rat::zero(); s.n_q] }
    }

    pub fn space(&self) -> MixedSpace {
        MixedSpace::new(self.z.len(), self.q.len())
    }

    pub fn is_zero(&self) -> bool {
        self.z.iter().all(|x| x.is_zero()) && self.q.iter().all(|x| x.is_zero())
    }

    /// Unit vector on the t-th generator, counting Z generators first.
    pub fn unit(s: MixedSpace, t: usize) -> Self {
        let mut v = MixedVec::zero(s);
        if t < s.n_z {
            v.z[t] = Int::one();
        } else {
            v.q[t - s.n_z] = Rat::one();
        }
        v
    }

    pub fn add_scaled_int(&mut self, other: &MixedVec, c: &Int) {
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a += b * c;
        }
        let cr = Rat::from(c.clone());
        for (a, b) in self.q.iter_mut().zip(&other.q) {
            *a += b * &cr;
        }
    }

    /// Rational scaling is only defined when the Z part is zero.
    pub fn add_scaled_rat(&mut self, other: &MixedVec, c: &Rat) {
        assert!(
            other.z.iter().all(|x| x.is_zero()) || c.denom().is_one(),
            "rational multiple of a vector with nonzero integer part"
        );
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a += b * c.numer();
        }
        for (a, b) in self.q.iter_mut().zip(&other.q) {
            *a += b * c;
        }
    }

    pub fn sub(&self, other: &MixedVec) -> MixedVec {
        let mut out = self.clone();
        out.add_scaled_int(other, &Int::from(-1));
        out
    }
}

/// A morphism of mixed spaces, stored sparsely by columns.
#[derive(Clone, Debug)]
pub struct MixedMap {
    pub src: MixedSpace,
    pub dst: MixedSpace,
    /// Z -> Z block, dst.n_z x src.n_z
    pub a: SpZ,
    /// Z -> Q block, dst.n_q x src.n_z
    pub c: SpQ,
    /// Q -> Q block, dst.n_q x src.n_q
    pub d: SpQ,
}

impl MixedMap {
    pub fn zero(src: MixedSpace, dst: MixedSpace) -> Self {
        MixedMap {
            src,
            dst,
            a: SpZ::new(dst.n_z, src.n_z),
            c: SpQ::new(dst.n_q, src.n_z),
            d: SpQ::new(dst.n_q, src.n_q),
        }
    }

    pub fn identity(s: MixedSpace) -> Self {
        let mut m = MixedMap::zero(s, s);
        for j in 0..s.n_z {
            m.a.push_entry(j as u32, j, Int::one());
        }
        for j in 0..s.n_q {
            m.d.push_entry(j as u32, j, Rat::one());
        }
        m
    }

    pub fn from_dense(a: &MatZ, c: &MatQ, d: &MatQ) -> Self {
        assert_eq!(c.rows, d.rows);
        MixedMap {
            src: MixedSpace::new(a.cols, d.cols),
            dst: MixedSpace::new(a.rows, c.rows),
            a: SpZ::from_dense(a),
            c: SpQ::from_dense(c),
            d: SpQ::from_dense(d),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.cols.iter().all(|c| c.is_empty())
            && self.c.cols.iter().all(|c| c.is_empty())
            && self.d.cols.iter().all(|c| c.is_empty())
    }

    pub fn apply(&self, v: &MixedVec) -> MixedVec {
        assert_eq!(v.space(), self.src, "dimension mismatch in mixed apply");
        let mut out = MixedVec::zero(self.dst);
        for (j, x) in v.z.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, e) in &self.a.cols[j] {
                out.z[*i as usize] += e * x;
            }
            let xr = Rat::from(x.clone());
            for (i, e) in &self.c.cols[j] {
                out.q[*i as usize] += e * &xr;
            }
        }
        for (j, x) in v.q.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, e) in &self.d.cols[j] {
                out.q[*i as usize] += e * x;
            }
        }
        out
    }

    /// self ∘ other (other applied first).
    pub fn compose(&self, other: &MixedMap) -> MixedMap {
        assert_eq!(other.dst, self.src, "composition dimension mismatch");
        let mut out = MixedMap::zero(other.src, self.dst);
        for j in 0..other.src.n_z {
            let az: SvZ = other.a.cols[j].clone();
            for (i, v) in self.a.mul_sv(&az) {
                out.a.push_entry(i, j, v);
            }
            let az_q: SvQ = az.iter().map(|(i, v)| (*i, Rat::from(v.clone()))).collect();
            for (i, v) in self.c.mul_sv(&az_q) {
                out.c.push_entry(i, j, v);
            }
            for (i, v) in self.d.mul_sv(&other.c.cols[j]) {
                out.c.push_entry(i, j, v);
            }
        }
        for j in 0..other.src.n_q {
            for (i, v) in self.d.mul_sv(&other.d.cols[j]) {
                out.d.push_entry(i, j, v);
            }
        }
        out
    }

    pub fn column(&self, t: usize) -> MixedVec {
        let mut v = MixedVec::zero(self.dst);
        if t < self.src.n_z {
            for (i, e) in &self.a.cols[t] {
                v.z[*i as usize] = e.clone();
            }
            for (i, e) in &self.c.cols[t] {
                v.q[*i as usize] = e.clone();
            }
        } else {
            for (i, e) in &self.d.cols[t - self.src.n_z] {
                v.q[*i as usize] = e.clone();
            }
        }
        v
    }
}

/// Certificate that a vector is not in the image of a mixed map: a rational
/// functional on the target, integral on the image, non-integral on the
/// vector.
#[derive(Clone, Debug)]
pub struct ImageCertificate {
    pub phi_z: Vec<Rat>,
    pub phi_q: Vec<Rat>,
    /// the (non-integral) value of the functional on the offending vector
    pub value: Rat,
}

impl ImageCertificate {
    pub fn eval(&self, v: &MixedVec) -> Rat {
        let mut s = Rat::zero();
        for (c, x) in self.phi_z.iter().zip(&v.z) {
            s += c * &Rat::from(x.clone());
        }
        for (c, x) in self.phi_q.iter().zip(&v.q) {
            s += c * x;
        }
        s
    }

    /// Check the defining properties against the map and vector.
    pub fn verify(&self, f: &MixedMap, y: &MixedVec) -> bool {
        for t in 0..f.src.n_z {
            if !self.eval(&f.column(t)).denom().is_one() {
                return false;
            }
        }
        for t in 0..f.src.n_q {
            if !self.eval(&f.column(f.src.n_z + t)).is_zero() {
                return false;
            }
        }
        let v = self.eval(y);
        !v.denom().is_one() && v == self.value
    }
}

#[derive(Clone, Debug)]
pub enum MixedSolve {
    Solution(MixedVec),
    NoSolution(ImageCertificate),
}

/// Decide whether `y` is in the image of `f` and produce a preimage or a
/// certificate. Dense elimination; intended for the small systems that
/// survive the sparse phases.
pub fn solve_mixed(f: &MixedMap, y: &MixedVec) -> MixedSolve {
    assert_eq!(y.space(), f.dst, "target dimension mismatch");
    let a = f.a.to_dense();
    let c = f.c.to_dense();
    let d = f.d.to_dense();

    // rational conditions: for every functional φ with φD = 0 we need
    // φ(C x_z) = φ(y_q); collect a basis of such functionals
    let left_null = d.transpose_kernel_basis();

    // stack integer rows: A x_z = y_z, plus each condition cleared to Z
    let rows = a.rows + left_null.len();
    let mut m = MatZ::zero(rows, f.src.n_z);
    let mut b = vec![Int::zero(); rows];
    for i in 0..a.rows {
        for j in 0..a.cols {
            m[(i, j)] = a[(i, j)].clone();
        }
        b[i] = y.z[i].clone();
    }
    // remember the scaled functional rows so certificates can be mapped back
    let mut cond_rows: Vec<(Vec<Rat>, Int)> = Vec::new(); // (φ, scale)
    for (r, phi) in left_null.iter().enumerate() {
        let mut vals = Vec::with_capacity(f.src.n_z + 1);
        let mut rhs = Rat::zero();
        for j in 0..f.src.n_z {
            let mut s = Rat::zero();
            for i in 0..c.rows {
                s += &phi[i] * &c[(i, j)];
            }
            vals.push(s);
        }
        for i in 0..c.rows {
            rhs += &phi[i] * &y.q[i];
        }
        vals.push(rhs.clone());
        let den = common_denominator(&vals);
        for (j, v) in vals.iter().take(f.src.n_z).enumerate() {
            let scaled = v * &Rat::from(den.clone());
            debug_assert!(scaled.denom().is_one());
            m[(a.rows + r, j)] = scaled.numer().clone();
        }
        let scaled_rhs = &rhs * &Rat::from(den.clone());
        b[a.rows + r] = scaled_rhs.numer().clone();
        cond_rows.push((phi.clone(), den));
    }

    match solve_z(&m, &b) {
        SolveZ::Solution(x_z) => {
            // rational part: D x_q = y_q - C x_z, solvable by construction
            let mut rhs = y.q.clone();
            for j in 0..f.src.n_z {
                if x_z[j].is_zero() {
                    continue;
                }
                let xr = Rat::from(x_z[j].clone());
                for i in 0..c.rows {
                    let t = &c[(i, j)] * &xr;
                    rhs[i] -= t;
                }
            }
            let x_q = d.solve(&rhs).expect("rational part must be solvable once conditions hold");
            MixedSolve::Solution(MixedVec { z: x_z, q: x_q })
        }
        SolveZ::Obstruction(lambda) => {
            // map the row functional back to the target space
            let mut phi_z = vec![Rat::zero(); f.dst.n_z];
            let mut phi_q = vec![Rat::zero(); f.dst.n_q];
            for (i, pz) in phi_z.iter_mut().enumerate() {
                *pz = lambda[i].clone();
            }
            for (r, (phi, den)) in cond_rows.iter().enumerate() {
                let coeff = &lambda[a.rows + r] * &Rat::from(den.clone());
                if coeff.is_zero() {
                    continue;
                }
                for (i, pq) in phi_q.iter_mut().enumerate() {
                    *pq += &coeff * &phi[i];
                }
            }
            let cert = ImageCertificate { phi_z, phi_q, value: Rat::zero() };
            let value = cert.eval(y);
            let cert = ImageCertificate { value, ..cert };
            debug_assert!(cert.verify(f, y), "certificate failed self-check");
            MixedSolve::NoSolution(cert)
        }
    }
}

impl MatQ {
    /// Basis of {φ : φ M = 0} as row vectors (kernel of the transpose).
    pub fn transpose_kernel_basis(&self) -> Vec<Vec<Rat>> {
        let mut t = MatQ::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t.kernel_basis()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::{int, rat};

    fn pure_z_map(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> MixedMap {
        let mut a = MatZ::zero(rows, cols);
        for (i, j, v) in entries {
            a[(*i, *j)] = int(*v);
        }
        MixedMap::from_dense(&a, &MatQ::zero(0, cols), &MatQ::zero(0, 0))
    }

    #[test]
    fn times_two_on_z() {
        let f = pure_z_map(1, 1, &[(0, 0, 2)]);
        let mut y = MixedVec::zero(f.dst);
        y.z[0] = int(4);
        match solve_mixed(&f, &y) {
            MixedSolve::Solution(x) => assert_eq!(x.z[0], int(2)),
            _ => panic!("4 is divisible by 2"),
        }
        y.z[0] = int(3);
        match solve_mixed(&f, &y) {
            MixedSolve::NoSolution(cert) => {
                assert!(cert.verify(&f, &y));
                assert!(!cert.value.denom().is_one());
            }
            _ => panic!("3 is not divisible by 2"),
        }
    }

    #[test]
    fn unit_inclusion_detects_non_integers() {
        // f: Z -> Q, the unit inclusion; image is exactly Z inside Q
        let c = MatQ::identity(1);
        let f = MixedMap::from_dense(&MatZ::zero(0, 1), &c, &MatQ::zero(1, 0));
        let mut y = MixedVec::zero(f.dst);
        y.q[0] = rat(1, 2);
        match solve_mixed(&f, &y) {
            MixedSolve::NoSolution(cert) => {
                assert!(cert.verify(&f, &y));
                // the certificate is (a shift of) the identity functional
                assert_eq!(cert.value, rat(1, 2));
            }
            _ => panic!("1/2 is not an integer"),
        }
        y.q[0] = rat(7, 1);
        match solve_mixed(&f, &y) {
            MixedSolve::Solution(x) => assert_eq!(x.z[0], int(7)),
            _ => panic!("7 is in the image"),
        }
    }

    #[test]
    fn rational_block_absorbs() {
        // f: Z ⊕ Q -> Q, (n, t) |-> n + 2t; surjective, any target solvable
        let c = MatQ::from_rows_i64(vec![vec![(1, 1)]]);
        let d = MatQ::from_rows_i64(vec![vec![(2, 1)]]);
        let f = MixedMap::from_dense(&MatZ::zero(0, 1), &c, &d);
        let mut y = MixedVec::zero(f.dst);
        y.q[0] = rat(1, 3);
        match solve_mixed(&f, &y) {
            MixedSolve::Solution(x) => {
                assert_eq!(f.apply(&x), y);
            }
            _ => panic!("map is onto"),
        }
    }

    #[test]
    fn diagonal_conditions() {
        // f: Z -> Q ⊕ Q, n |-> (n, n); (1/2, 1/2) needs a half-integer
        let c = MatQ::from_rows_i64(vec![vec![(1, 1)], vec![(1, 1)]]);
        let f = MixedMap::from_dense(&MatZ::zero(0, 1), &c, &MatQ::zero(2, 0));
        let mut y = MixedVec::zero(f.dst);
        y.q[0] = rat(1, 2);
        y.q[1] = rat(1, 2);
        match solve_mixed(&f, &y) {
            MixedSolve::NoSolution(cert) => assert!(cert.verify(&f, &y)),
            _ => panic!("not solvable over Z"),
        }
        // while (1/2, 1/3) is simply outside the image subgroup, also certified
        y.q[1] = rat(1, 3);
        match solve_mixed(&f, &y) {
            MixedSolve::NoSolution(cert) => assert!(cert.verify(&f, &y)),
            _ => panic!("not solvable"),
        }
    }

    #[test]
    fn compose_matches_apply() {
        let c = MatQ::from_rows_i64(vec![vec![(1, 1), (0, 1)]]);
        let d = MatQ::from_rows_i64(vec![vec![(3, 1)]]);
        let mut a = MatZ::zero(2, 2);
        a[(0, 0)] = int(1);
        a[(1, 0)] = int(2);
        a[(1, 1)] = int(-1);
        let f = MixedMap::from_dense(&a, &c, &d);
        let g = MixedMap::from_dense(
            &MatZ::zero(0, 2),
            &MatQ::from_rows_i64(vec![vec![(5, 1), (1, 2)]]),
            &MatQ::from_rows_i64(vec![vec![(1, 3)]]),
        );
        let gf = g.compose(&f);
        for t in 0..f.src.dim() {
            let e = MixedVec::unit(f.src, t);
            assert_eq!(gf.apply(&e), g.apply(&f.apply(&e)));
        }
    }
}
