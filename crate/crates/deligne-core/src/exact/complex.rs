//! Cochain complexes of mixed spaces and their cohomology.
//!
//! The single primitive is `mixed_subquotient`: given a condition map f and a
//! denominator map g with f∘g = 0, it computes ker(f)/im(g) in canonical form
//! together with enough transform data to decode arbitrary kernel elements
//! into class coordinates, produce representatives, and (optionally) produce
//! coboundary witnesses. Ordinary cohomology of a complex is the special case
//! f = d^n, g = d^{n-1}; spectral-sequence pages reuse the same primitive with
//! other condition/denominator maps.
//!
//! The kernel of f = (A, C, D) is parametrized exactly: the integer vectors u
//! with Au = 0 whose rational image Cu lies in im(D) form a saturated lattice
//! with basis X; solving Dv = -Cu extends each lattice generator to a kernel
//! element, and ker(D) supplies the purely rational directions. So
//! ker f ≅ Z^{r'} ⊕ Q^{b'}. The denominator generators are rewritten in these
//! coordinates; the rational-type generators span a divisible subgroup W which
//! is split off first, and the integer-type generators go through a Smith
//! normal form. What remains is Z^{r'}/im(Σ) plus a rational quotient
//! Q^{b''}/Λ ≅ (Q/Z)^{w₀} ⊕ Q^{b''-w₀}, where Λ is the lattice generated by
//! the relation tails with zero Smith part. Torsion representatives carry a
//! rational correction (tail divided by the Smith divisor) so that their
//! classes are genuinely finite, not shifted by a circle coordinate.

use super::matrix::{Int, MatQ, MatZ, Rat};
use super::mixed::{MixedMap, MixedSpace, MixedVec};
use super::module::MixedModule;
use super::snf::{smith_normal_form, PivotOrder};
use super::sparse::{axpy_q, kernel_z_sparse, reduce_columns_z, QFactor, SpQ, SpZ, SvQ, SvZ};
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug)]
pub struct MixedComplex {
    /// degree of spaces[0]
    pub base: isize,
    pub spaces: Vec<MixedSpace>,
    /// maps[n]: spaces[n] -> spaces[n+1]
    pub maps: Vec<MixedMap>,
}

impl MixedComplex {
    pub fn new(base: isize, spaces: Vec<MixedSpace>, maps: Vec<MixedMap>) -> Self {
        assert_eq!(maps.len() + 1, spaces.len().max(1), "one map between consecutive spaces");
        for (n, m) in maps.iter().enumerate() {
            assert_eq!(m.src, spaces[n], "map source mismatch at index {}", n);
            assert_eq!(m.dst, spaces[n + 1], "map target mismatch at index {}", n);
        }
        MixedComplex { base, spaces, maps }
    }

    pub fn space(&self, deg: isize) -> MixedSpace {
        let i = deg - self.base;
        if i < 0 || i as usize >= self.spaces.len() {
            MixedSpace::new(0, 0)
        } else {
            self.spaces[i as usize]
        }
    }

    /// The differential out of `deg` (a zero map outside the stored window).
    pub fn map_from(&self, deg: isize) -> MixedMap {
        let i = deg - self.base;
        if i >= 0 && (i as usize) < self.maps.len() {
            self.maps[i as usize].clone()
        } else {
            MixedMap::zero(self.space(deg), self.space(deg + 1))
        }
    }

    /// Verify d∘d = 0 by composing the stored maps.
    pub fn check_dsquared(&self) -> Result<(), String> {
        for n in 0..self.maps.len().saturating_sub(1) {
            let c = self.maps[n + 1].compose(&self.maps[n]);
            if !c.is_zero() {
                return Err(format!(
                    "d*d != 0 between degrees {} and {}",
                    self.base + n as isize,
                    self.base + n as isize + 2
                ));
            }
        }
        Ok(())
    }

    pub fn cohomology_at(&self, deg: isize, witnesses: Witnesses) -> Subquotient {
        let f = self.map_from(deg);
        let g = self.map_from(deg - 1);
        mixed_subquotient(&f, &g, witnesses)
    }

    /// Decide whether the cocycle `z` at degree `deg` is a coboundary;
    /// returns a preimage or the (nonzero) class coordinates.
    pub fn is_coboundary(&self, deg: isize, z: &MixedVec) -> Result<MixedVec, ClassCoords> {
        let sq = self.cohomology_at(deg, Witnesses::Keep);
        let coords = sq.decode(z);
        if coords.is_zero() {
            Ok(sq.witness(z))
        } else {
            Err(coords)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Witnesses {
    /// keep full transcripts; coboundary witnesses available (small systems)
    Keep,
    /// pre-reduce the denominator generators sparsely: faster and leaner,
    /// witnesses unavailable
    Drop,
}

/// Class coordinates in the canonical decomposition
/// Z^free ⊕ (⊕ Z/dᵢ) ⊕ (Q/Z)^circles ⊕ Q^rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassCoords {
    pub free: Vec<Int>,
    /// residues modulo the torsion orders, normalized to [0, dᵢ)
    pub torsion: Vec<Int>,
    /// circle coordinates normalized to [0, 1)
    pub circles: Vec<Rat>,
    pub rationals: Vec<Rat>,
}

impl ClassCoords {
    pub fn is_zero(&self) -> bool {
        self.free.iter().all(|x| x.is_zero())
            && self.torsion.iter().all(|x| x.is_zero())
            && self.circles.iter().all(|x| x.is_zero())
            && self.rationals.iter().all(|x| x.is_zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Summand {
    Free(usize),
    Torsion(usize),
    Circle(usize),
    Rational(usize),
}

/// A computed subquotient ker(f)/im(g) with its decode/representative data.
pub struct Subquotient {
    pub module: MixedModule,
    ambient: MixedSpace,
    conditions: MixedMap,
    // ker f ≅ Z^{r'} ⊕ Q^{b'}: lattice basis X with rational tails, and ker D
    x_cols: Vec<SvZ>,
    v_tails: Vec<SvQ>,
    kd_cols: Vec<SvQ>,
    x_factor: QFactor,
    kd_factor: QFactor,
    // rational span W of the Q-type denominator generators, echelonized;
    // complement positions in Q^{b'} index the reduced coordinates Q^{b''}
    w_factor: QFactor,
    compl_pos: Vec<usize>,
    compl_rank: Vec<Option<u32>>,
    // Smith data of the integer generator matrix M (r' x t)
    sigma: Vec<Int>,
    u: MatZ,
    u_inv: MatZ,
    /// correction tails s̄'ⱼ/σⱼ ∈ Q^{b''} for j < ρ
    corrections: Vec<Vec<Rat>>,
    /// Smith columns with zero divisor (free part) and with divisor ≥ 2
    free_pos: Vec<usize>,
    torsion_pos: Vec<usize>,
    /// basis of the relation-tail lattice Λ ⊆ Q^{b''}, and complementary unit
    /// vector positions; together they give a basis of Q^{b''}
    lambda_basis: Vec<Vec<Rat>>,
    kappa_pos: Vec<usize>,
    /// [Λ | κ] assembled for coordinate solves
    qbasis: MatQ,
    witness_data: Option<WitnessData>,
}

struct WitnessData {
    denominators: MixedMap,
    /// Smith right transform: generator combinations realizing the Smith columns
    smith_v: MatZ,
    /// each Λ basis vector as an integer combination of the post-Smith
    /// pure-rational tail columns (indices ρ..t)
    lambda_tr: Vec<Vec<Int>>,
    rho: usize,
    t_cols: usize,
}

/// The kernel of a mixed map, as generators of a subgroup of its source:
/// a saturated basis of the integer-type part, each vector carrying a
/// rational tail, together with a basis of the purely rational part.
pub struct KernelParts {
    pub x_cols: Vec<SvZ>,
    pub v_tails: Vec<SvQ>,
    pub kd_cols: Vec<SvQ>,
}

pub fn mixed_kernel_parts(f: &MixedMap) -> KernelParts {
    let ka = kernel_z_sparse(&f.a);
    let d_factor = QFactor::new(&f.d);

    // feasibility: C·(KA vector) must be reducible to zero modulo im D
    let resid: Vec<SvQ> = ka.iter().map(|u| d_factor.residual(&f.c.mul_sv(&to_q(u)))).collect();
    let kb = {
        let mut row_den: std::collections::BTreeMap<u32, Int> = Default::default();
        for col in &resid {
            for (i, v) in col {
                let e = row_den.entry(*i).or_insert_with(Int::one);
                *e = num_integer::Integer::lcm(e, v.denom());
            }
        }
        let mut cleared = SpZ::new(f.dst.n_q, ka.len());
        for (j, col) in resid.iter().enumerate() {
            for (i, v) in col {
                let s = v * &Rat::from(row_den[i].clone());
                debug_assert!(s.denom().is_one());
                cleared.push_entry(*i, j, s.numer().clone());
            }
        }
        kernel_z_sparse(&cleared)
    };
    // X = KA · KB: a basis of the feasible lattice (exact, hence saturated)
    let x_cols: Vec<SvZ> = kb
        .iter()
        .map(|y| {
            let mut acc: SvZ = Vec::new();
            for (t, c) in y {
                acc = super::sparse::axpy_z(&acc, &ka[*t as usize], c);
            }
            acc
        })
        .collect();

    // rational tails: D vᵢ = -C Xᵢ
    let v_tails: Vec<SvQ> = x_cols
        .iter()
        .map(|x| {
            let rhs: SvQ = f.c.mul_sv(&to_q(x)).into_iter().map(|(i, v)| (i, -v)).collect();
            d_factor.solve(&rhs).expect("feasible by construction of X")
        })
        .collect();
    let kd_cols: Vec<SvQ> = d_factor.kernel.clone();
    KernelParts { x_cols, v_tails, kd_cols }
}

/// Kernel generators of a mixed map as dense vectors in its source.
pub fn mixed_kernel_generators(f: &MixedMap) -> Vec<MixedVec> {
    let kp = mixed_kernel_parts(f);
    let mut out = Vec::with_capacity(kp.x_cols.len() + kp.kd_cols.len());
    for (x, tail) in kp.x_cols.iter().zip(&kp.v_tails) {
        let mut v = MixedVec::zero(f.src);
        for (i, e) in x {
            v.z[*i as usize] = e.clone();
        }
        for (i, e) in tail {
            v.q[*i as usize] = e.clone();
        }
        out.push(v);
    }
    for q in &kp.kd_cols {
        let mut v = MixedVec::zero(f.src);
        for (i, e) in q {
            v.q[*i as usize] = e.clone();
        }
        out.push(v);
    }
    out
}

/// Compute ker(conditions)/im(denominators); `denominators` must map into the
/// kernel of `conditions`.
pub fn mixed_subquotient(f: &MixedMap, g: &MixedMap, witnesses: Witnesses) -> Subquotient {
    assert_eq!(g.dst, f.src, "denominators must land in the condition source");
    let ambient = f.src;
    let nz = ambient.n_z;

    if cfg!(debug_assertions) && ambient.dim() <= 600 {
        debug_assert!(f.compose(g).is_zero(), "conditions compose denominators is nonzero");
    }

    // ---- Phase A: ker f ≅ Z^{r'} ⊕ Q^{b'} ----
    let KernelParts { x_cols, v_tails, kd_cols } = mixed_kernel_parts(f);
    let r1 = x_cols.len();
    let b1 = kd_cols.len();

    let x_factor = QFactor::new(&sp_from_svz_cols(nz, &x_cols));
    let kd_factor = QFactor::new(&sp_from_svq_cols(ambient.n_q, &kd_cols));

    // ---- Phase B: denominator generators in (Z^{r'} ⊕ Q^{b'})-coordinates ----
    let t_z = g.src.n_z;
    let t_q = g.src.n_q;
    let mut m_cols: Vec<Vec<Int>> = Vec::with_capacity(t_z);
    let mut s_cols: Vec<SvQ> = Vec::with_capacity(t_z);
    for t in 0..t_z {
        let (m, s) =
            kernel_coords_sparse(&g.a.cols[t], &g.c.cols[t], &x_factor, &v_tails, &kd_factor, r1);
        m_cols.push(m);
        s_cols.push(s);
    }
    // Q-type generators: purely rational kernel elements spanning W over Q
    let w_gens: Vec<SvQ> = (0..t_q)
        .map(|t| {
            kd_factor
                .solve(&g.d.cols[t])
                .expect("rational denominator generator must lie in ker D")
        })
        .collect();

    // ---- Phase C: quotient of Z^{r'} ⊕ Q^{b'} ----
    // 1. split off W = span_Q(w_gens): complement positions carry Q^{b''}
    let w_factor = QFactor::new(&sp_from_svq_cols(b1, &w_gens));
    let pivot_rows: std::collections::BTreeSet<usize> =
        w_factor.pivot_rows().into_iter().map(|r| r as usize).collect();
    let compl_pos: Vec<usize> = (0..b1).filter(|i| !pivot_rows.contains(i)).collect();
    let b2 = compl_pos.len();
    let mut compl_rank: Vec<Option<u32>> = vec![None; b1];
    for (r, &p) in compl_pos.iter().enumerate() {
        compl_rank[p] = Some(r as u32);
    }
    let s_bars: Vec<SvQ> = s_cols
        .iter()
        .map(|s| {
            w_factor
                .residual(s)
                .into_iter()
                .map(|(i, v)| (compl_rank[i as usize].expect("residual off the complement"), v))
                .collect()
        })
        .collect();

    // 2. optionally pre-reduce the generator columns (lossy for witnesses)
    let (m_red, s_red, keep_witness_map): (Vec<Vec<Int>>, Vec<Vec<Rat>>, bool) = match witnesses {
        Witnesses::Keep => {
            let dense: Vec<Vec<Rat>> = s_bars.iter().map(|s| sv_to_dense_q(s, b2)).collect();
            (m_cols.clone(), dense, true)
        }
        Witnesses::Drop => {
            let mut den = Int::one();
            for s in &s_bars {
                for (_, v) in s {
                    den = num_integer::Integer::lcm(&den, v.denom());
                }
            }
            let denr = Rat::from(den);
            let mut stacked = SpZ::new(r1 + b2, m_cols.len());
            for (j, (m, s)) in m_cols.iter().zip(&s_bars).enumerate() {
                for (i, v) in m.iter().enumerate() {
                    if !v.is_zero() {
                        stacked.push_entry(i as u32, j, v.clone());
                    }
                }
                for (i, v) in s {
                    let sc = v * &denr;
                    debug_assert!(sc.denom().is_one());
                    stacked.push_entry(r1 as u32 + i, j, sc.numer().clone());
                }
            }
            let reduced = reduce_columns_z(&stacked);
            let mut ms = Vec::new();
            let mut ss = Vec::new();
            for col in &reduced {
                let mut m = vec![Int::zero(); r1];
                let mut s = vec![Rat::zero(); b2];
                for (i, v) in col {
                    if (*i as usize) < r1 {
                        m[*i as usize] = v.clone();
                    } else {
                        s[*i as usize - r1] = Rat::from(v.clone()) / &denr;
                    }
                }
                ms.push(m);
                ss.push(s);
            }
            (ms, ss, false)
        }
    };
    let t_cols = m_red.len();

    // 3. Smith normal form of the integer part M
    let m_mat = MatZ::from_columns(r1, &m_red);
    let sm = smith_normal_form(&m_mat, PivotOrder::RowMajor);
    let rho = sm.rank();
    let sigma: Vec<Int> = sm.divisors.clone();
    // transformed tails: S̄' = S̄ · V
    let s_bar_mat = MatQ::from_columns(b2, &s_red);
    let s_prime = s_bar_mat.mul(&sm.v.to_rational());

    let corrections: Vec<Vec<Rat>> = (0..rho)
        .map(|j| {
            let sj = Rat::from(sigma[j].clone());
            (0..b2).map(|i| &s_prime[(i, j)] / &sj).collect()
        })
        .collect();
    let free_pos: Vec<usize> = (rho..r1).collect();
    let torsion_pos: Vec<usize> = (0..rho).filter(|&j| sigma[j] > Int::one()).collect();

    // 4. the relation-tail lattice Λ spanned over Z by the pure-rational tails
    let gamma_cols: Vec<Vec<Rat>> = (rho..t_cols)
        .map(|j| (0..b2).map(|i| s_prime[(i, j)].clone()).collect())
        .collect();
    let (lambda_basis, lambda_tr) = lattice_basis(b2, &gamma_cols);
    let w0 = lambda_basis.len();

    // complement: unit vectors at positions off the Λ echelon pivot rows
    let lam_factor = QFactor::new(&sp_from_dense_cols(b2, &lambda_basis));
    let lam_pivots: std::collections::BTreeSet<usize> =
        lam_factor.pivot_rows().into_iter().map(|r| r as usize).collect();
    assert_eq!(lam_pivots.len(), w0, "lattice basis must be independent");
    let kappa_pos: Vec<usize> = (0..b2).filter(|i| !lam_pivots.contains(i)).collect();
    let mut qbasis_cols: Vec<Vec<Rat>> = lambda_basis.clone();
    for &p in &kappa_pos {
        let mut e = vec![Rat::zero(); b2];
        e[p] = Rat::one();
        qbasis_cols.push(e);
    }
    let qbasis = MatQ::from_columns(b2, &qbasis_cols);

    let torsion: Vec<Int> = torsion_pos.iter().map(|&j| sigma[j].clone()).collect();
    let module = MixedModule::new(r1 - rho, b2 - w0, w0, torsion);

    let witness_data = keep_witness_map.then(|| WitnessData {
        denominators: g.clone(),
        smith_v: sm.v.clone(),
        lambda_tr,
        rho,
        t_cols,
    });

    Subquotient {
        module,
        ambient,
        conditions: f.clone(),
        x_cols,
        v_tails,
        kd_cols,
        x_factor,
        kd_factor,
        w_factor,
        compl_pos,
        compl_rank,
        sigma,
        u: sm.u,
        u_inv: sm.u_inv,
        corrections,
        free_pos,
        torsion_pos,
        lambda_basis,
        kappa_pos,
        qbasis,
        witness_data,
    }
}

impl Subquotient {
    pub fn ambient(&self) -> MixedSpace {
        self.ambient
    }

    fn r1(&self) -> usize {
        self.x_cols.len()
    }

    fn b1(&self) -> usize {
        self.kd_cols.len()
    }

    fn b2(&self) -> usize {
        self.compl_pos.len()
    }

    /// Kernel coordinates (y ∈ Z^{r'}, s ∈ Q^{b'}) of a cocycle.
    fn kernel_coords(&self, z: &MixedVec) -> (Vec<Int>, SvQ) {
        assert!(self.conditions.apply(z).is_zero(), "decode input is not a cocycle");
        let zz: SvZ = z
            .z
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i as u32, v.clone()))
            .collect();
        let zq: SvQ = z
            .q
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i as u32, v.clone()))
            .collect();
        kernel_coords_sparse(&zz, &zq, &self.x_factor, &self.v_tails, &self.kd_factor, self.r1())
    }

    /// Reduce kernel s-coordinates modulo W onto the complement Q^{b''}.
    fn reduce_mod_w(&self, s: &SvQ) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.b2()];
        for (i, v) in self.w_factor.residual(s) {
            let r = self.compl_rank[i as usize].expect("residual off the complement") as usize;
            out[r] = v;
        }
        out
    }

    /// Decode a cocycle into class coordinates.
    pub fn decode(&self, z: &MixedVec) -> ClassCoords {
        let (y, s) = self.kernel_coords(z);
        let y_prime = self.u.mul_vec(&y);
        // subtract the tilted tails of the Smith generators
        let mut q_bar = self.reduce_mod_w(&s);
        for (j, corr) in self.corrections.iter().enumerate() {
            if y_prime[j].is_zero() {
                continue;
            }
            let c = Rat::from(y_prime[j].clone());
            for (a, b) in q_bar.iter_mut().zip(corr) {
                *a -= b * &c;
            }
        }
        let free = self.free_pos.iter().map(|&j| y_prime[j].clone()).collect();
        let torsion = self
            .torsion_pos
            .iter()
            .map(|&j| num_integer::Integer::mod_floor(&y_prime[j], &self.sigma[j]))
            .collect();
        let (circles, rationals) = if self.b2() > 0 {
            let coords = self.qbasis.solve(&q_bar).expect("complement basis must solve");
            let w0 = self.lambda_basis.len();
            (coords[..w0].iter().map(frac_part).collect(), coords[w0..].to_vec())
        } else {
            (Vec::new(), Vec::new())
        };
        ClassCoords { free, torsion, circles, rationals }
    }

    /// Decode without reducing: torsion coordinates as plain integers and
    /// circle coordinates as plain rationals, so `decode` is recovered by
    /// mod dᵢ and mod 1 summand-wise.  A homomorphism out of a divisible
    /// summand is determined by these unreduced values — scaling by a
    /// non-integer does not commute with the reductions — so maps induced on
    /// classes by cochain-level constructions must be read off here.
    pub fn lift_coords(&self, z: &MixedVec) -> ClassCoords {
        let (y, s) = self.kernel_coords(z);
        let y_prime = self.u.mul_vec(&y);
        let mut q_bar = self.reduce_mod_w(&s);
        for (j, corr) in self.corrections.iter().enumerate() {
            if y_prime[j].is_zero() {
                continue;
            }
            let c = Rat::from(y_prime[j].clone());
            for (a, b) in q_bar.iter_mut().zip(corr) {
                *a -= b * &c;
            }
        }
        let free = self.free_pos.iter().map(|&j| y_prime[j].clone()).collect();
        let torsion = self.torsion_pos.iter().map(|&j| y_prime[j].clone()).collect();
        let (circles, rationals) = if self.b2() > 0 {
            let coords = self.qbasis.solve(&q_bar).expect("complement basis must solve");
            let w0 = self.lambda_basis.len();
            (coords[..w0].to_vec(), coords[w0..].to_vec())
        } else {
            (Vec::new(), Vec::new())
        };
        ClassCoords { free, torsion, circles, rationals }
    }

    /// A representative cocycle for a canonical summand generator. Scaling a
    /// Circle or Rational representative by λ gives the class with coordinate
    /// λ (mod 1 for circles).
    pub fn representative(&self, s: Summand) -> MixedVec {
        match s {
            Summand::Free(i) => {
                let j = self.free_pos[i];
                self.iota(&self.u_inv.column(j), &[])
            }
            Summand::Torsion(i) => {
                let j = self.torsion_pos[i];
                let corr = self.lift_compl(&self.corrections[j]);
                self.iota(&self.u_inv.column(j), &corr)
            }
            Summand::Circle(i) => {
                let lifted = self.lift_compl(&self.lambda_basis[i]);
                self.iota(&vec![Int::zero(); self.r1()], &lifted)
            }
            Summand::Rational(i) => {
                let mut e = vec![Rat::zero(); self.b2()];
                e[self.kappa_pos[i]] = Rat::one();
                let lifted = self.lift_compl(&e);
                self.iota(&vec![Int::zero(); self.r1()], &lifted)
            }
        }
    }

    /// All summands in canonical order (free, torsion, circles, rationals).
    pub fn summands(&self) -> Vec<Summand> {
        let m = &self.module;
        (0..m.rank_z)
            .map(Summand::Free)
            .chain((0..m.torsion.len()).map(Summand::Torsion))
            .chain((0..m.circles).map(Summand::Circle))
            .chain((0..m.rank_q).map(Summand::Rational))
            .collect()
    }

    /// Express a trivial class as a boundary: x with g(x) = z. Panics if the
    /// class is nonzero or the subquotient was computed without witnesses.
    pub fn witness(&self, z: &MixedVec) -> MixedVec {
        let wd = self
            .witness_data
            .as_ref()
            .expect("witnesses were dropped for this subquotient");
        let coords = self.decode(z);
        assert!(coords.is_zero(), "witness requested for a nonzero class");
        let (y, s) = self.kernel_coords(z);
        let y_prime = self.u.mul_vec(&y);
        // z = Σ_{j<ρ} aⱼ·(σⱼ eⱼ, s̄'ⱼ) + (0, λ) + (0, W-part)
        let mut a = vec![Int::zero(); wd.t_cols];
        let mut q_bar = self.reduce_mod_w(&s);
        for j in 0..wd.rho {
            debug_assert!((&y_prime[j] % &self.sigma[j]).is_zero());
            let aj = &y_prime[j] / &self.sigma[j];
            let scale = Rat::from(y_prime[j].clone());
            for (qb, corr) in q_bar.iter_mut().zip(&self.corrections[j]) {
                *qb -= corr * &scale;
            }
            a[j] = aj;
        }
        // the remaining tail lies in Λ: integral coordinates in the Λ basis
        if self.b2() > 0 {
            let coords = self.qbasis.solve(&q_bar).expect("complement basis must solve");
            for (i, c) in coords.iter().take(self.lambda_basis.len()).enumerate() {
                assert!(c.denom().is_one(), "lattice coordinate must be integral for a trivial class");
                for (t, mu) in wd.lambda_tr[i].iter().enumerate() {
                    a[wd.rho + t] += c.numer() * mu;
                }
            }
            for c in coords.iter().skip(self.lambda_basis.len()) {
                assert!(c.is_zero(), "free rational coordinate must vanish for a trivial class");
            }
        }
        // back through the Smith right transform to original generator indices
        let coeffs = wd.smith_v.mul_vec(&a);
        let g = &wd.denominators;
        assert_eq!(coeffs.len(), g.src.n_z, "witness mode keeps one column per generator");
        let mut x = MixedVec::zero(g.src);
        x.z.clone_from_slice(&coeffs);
        // whatever is left is the W-part; express it in the rational generators
        let rem = z.sub(&g.apply(&x));
        debug_assert!(rem.z.iter().all(|v| v.is_zero()));
        if g.src.n_q > 0 {
            let wf = QFactor::new(&g.d);
            let rq: SvQ = rem
                .q
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i as u32, v.clone()))
                .collect();
            let sol = wf.solve(&rq).expect("residue must lie in the rational generator span");
            for (i, v) in sol {
                x.q[i as usize] = v;
            }
        } else {
            assert!(rem.is_zero(), "nonzero residue with no rational generators");
        }
        debug_assert_eq!(&g.apply(&x), z, "witness failed verification");
        x
    }

    /// ι(y, s): back from kernel coordinates to the ambient space. `s` may be
    /// shorter than b'; missing coordinates count as zero.
    fn iota(&self, y: &[Int], s: &[Rat]) -> MixedVec {
        let mut v = MixedVec::zero(self.ambient);
        for (j, coef) in y.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            for (i, b) in &self.x_cols[j] {
                v.z[*i as usize] += b * coef;
            }
            let cr = Rat::from(coef.clone());
            for (i, b) in &self.v_tails[j] {
                v.q[*i as usize] += b * &cr;
            }
        }
        for (j, coef) in s.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            for (i, b) in &self.kd_cols[j] {
                v.q[*i as usize] += b * coef;
            }
        }
        v
    }

    /// Lift a vector over the complement coordinates Q^{b''} to kernel
    /// s-coordinates in Q^{b'} (zero on the W pivot rows).
    fn lift_compl(&self, v: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.b1()];
        for (&p, x) in self.compl_pos.iter().zip(v) {
            out[p] = x.clone();
        }
        out
    }
}

/// Kernel coordinates of a kernel element given sparsely as (z-part, q-part).
fn kernel_coords_sparse(
    wz: &SvZ,
    wq: &SvQ,
    x_factor: &QFactor,
    v_tails: &[SvQ],
    kd_factor: &QFactor,
    r1: usize,
) -> (Vec<Int>, SvQ) {
    let wz_q: SvQ = wz.iter().map(|(i, v)| (*i, Rat::from(v.clone()))).collect();
    let ysol = x_factor.solve(&wz_q).expect("kernel element must lie in the X span");
    let mut y = vec![Int::zero(); r1];
    for (i, v) in &ysol {
        assert!(v.denom().is_one(), "saturated lattice solve must be integral");
        y[*i as usize] = v.numer().clone();
    }
    // subtract the tails, then solve the rest in ker D
    let mut q = wq.clone();
    for (j, t) in v_tails.iter().enumerate() {
        if y[j].is_zero() {
            continue;
        }
        let c = -Rat::from(y[j].clone());
        q = axpy_q(&q, t, &c);
    }
    let s = kd_factor.solve(&q).expect("residual rational part must lie in ker D");
    (y, s)
}

/// Basis of the lattice generated by rational columns, with integer
/// transcripts (each basis vector as a combination of the input columns).
fn lattice_basis(dim: usize, cols: &[Vec<Rat>]) -> (Vec<Vec<Rat>>, Vec<Vec<Int>>) {
    if cols.is_empty() || dim == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut den = Int::one();
    for c in cols {
        for v in c {
            den = num_integer::Integer::lcm(&den, v.denom());
        }
    }
    let denr = Rat::from(den);
    let int_cols: Vec<Vec<Int>> = cols
        .iter()
        .map(|c| {
            c.iter()
                .map(|v| {
                    let s = v * &denr;
                    debug_assert!(s.denom().is_one());
                    s.numer().clone()
                })
                .collect()
        })
        .collect();
    let m = MatZ::from_columns(dim, &int_cols);
    let sm = smith_normal_form(&m, PivotOrder::RowMajor);
    let rank = sm.rank();
    // the first `rank` columns of m·V have the form σᵢ·U⁻¹eᵢ and span the
    // column lattice; the V columns are their transcripts
    let mv = m.mul(&sm.v);
    let mut basis = Vec::with_capacity(rank);
    let mut tr = Vec::with_capacity(rank);
    for i in 0..rank {
        basis.push((0..dim).map(|r| Rat::from(mv[(r, i)].clone()) / &denr).collect());
        tr.push(sm.v.column(i));
    }
    (basis, tr)
}

fn frac_part(x: &Rat) -> Rat {
    let f = x - x.floor();
    debug_assert!(!f.is_negative() && f < Rat::one());
    f
}

fn to_q(v: &SvZ) -> SvQ {
    v.iter().map(|(i, x)| (*i, Rat::from(x.clone()))).collect()
}

fn sv_to_dense_q(v: &SvQ, n: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); n];
    for (i, x) in v {
        out[*i as usize] = x.clone();
    }
    out
}

fn sp_from_svz_cols(rows: usize, cols: &[SvZ]) -> SpQ {
    let mut m = SpQ::new(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.cols[j] = c.iter().map(|(i, v)| (*i, Rat::from(v.clone()))).collect();
    }
    m
}

fn sp_from_svq_cols(rows: usize, cols: &[SvQ]) -> SpQ {
    let mut m = SpQ::new(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.cols[j] = c.clone();
    }
    m
}

fn sp_from_dense_cols(rows: usize, cols: &[Vec<Rat>]) -> SpQ {
    let mut m = SpQ::new(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, v) in c.iter().enumerate() {
            if !v.is_zero() {
                m.push_entry(i as u32, j, v.clone());
            }
        }
    }
    m
}
