//! The spectral sequence of the nerve filtration.
//!
//! Filtering the equivariant total complex by the nerve level -- F^p is
//! spanned by the slots whose copy tuple has length at least p -- gives a
//! first-quadrant-style spectral sequence whose first page in column p is
//! the Deligne cohomology of G^p x M along the fiber, and whose second page
//! is the group cohomology of G with coefficients in the Deligne cohomology
//! of M, acting by pullback.  It abuts to the equivariant groups of the
//! total complex.
//!
//! Indexing: q is the Deligne degree along the fiber, so the entry E_r^{p,q}
//! sits in machine total degree n = p + q + 1.  The computation runs on the
//! normalized model: the degenerate slots span a direct summand compatible
//! with the filtration, and the homotopy contracting them repeats an index
//! position without touching the nerve level, so their associated graded is
//! already acyclic and every page from E_1 on agrees with the full model.
//! The row q = -1 consists of the groups below fiber degree zero and
//! vanishes.
//!
//! Every entry is computed literally from the definition
//!
//! E_r^{p,q} = Z_r^{p,q} / (Z_{r-1}^{p+1,q-1} + D Z_{r-1}^{p-r+1,q+r-2}),
//!
//! Z_r^{p,q} = { z in F^p C^n : Dz in F^{p+r} },
//!
//! as a subquotient of exact mixed groups.  Because the slot enumeration
//! lists nerve levels in increasing order, F^p is a coordinate suffix in
//! both the integer and the rational sector, and the cycle groups Z_r are
//! kernels of the differential with the source restricted to that suffix
//! and the target truncated below the filtration-(p+r) suffix.  From
//! r = p + q + 3 on nothing changes any more, which serves as the stable
//! page.

use rustc_hash::FxHashMap;

use crate::action::SimplicialAction;
use crate::assembly::DeligneModel;
use crate::deligne::OrdinaryModel;
use crate::exact::complex::{
    mixed_kernel_parts, mixed_subquotient, ClassCoords, Subquotient, Witnesses,
};
use crate::exact::mixed::{MixedMap, MixedSpace, MixedVec};
use crate::exact::module::MixedModule;
use crate::exact::sparse::{SpQ, SpZ};
use crate::group_cohomology::{induced_gmodule, GModule};
use num_traits::Zero;

pub struct SpectralSequence<'a> {
    model: DeligneModel<'a>,
    diffs: FxHashMap<isize, MixedMap>,
    entries: FxHashMap<(usize, isize, isize), Subquotient>,
    totals: FxHashMap<isize, MixedModule>,
}

impl<'a> SpectralSequence<'a> {
    pub fn new(action: &'a SimplicialAction, coeff_len: usize) -> Self {
        SpectralSequence {
            model: DeligneModel::new(action, coeff_len, true),
            diffs: FxHashMap::default(),
            entries: FxHashMap::default(),
            totals: FxHashMap::default(),
        }
    }

    fn ensure(&mut self, n: isize) {
        if !self.diffs.contains_key(&n) {
            let d = self.model.differential(n);
            self.diffs.insert(n, d);
        }
    }

    /// First coordinate of the filtration-p suffix in each sector of C^n.
    fn starts(&mut self, n: isize, p: isize) -> (usize, usize) {
        if p <= 0 {
            return (0, 0);
        }
        let ds = self.model.degree_space(n);
        let (mut sz, mut sq) = (ds.n_z, ds.n_q);
        for slot in &ds.slots {
            if slot.copy.len() >= p as usize {
                if slot.k == 0 {
                    sz = sz.min(slot.offset);
                } else {
                    sq = sq.min(slot.offset);
                }
            }
        }
        (sz, sq)
    }

    /// The differential restricted to F^p C^n, with the target truncated to
    /// the coordinates outside F^pb: its kernel is the group of
    /// filtration-p elements whose boundary lies in F^pb.
    fn conditions(&mut self, n: isize, p: isize, pb: isize) -> MixedMap {
        self.ensure(n);
        let (sz, sq) = self.starts(n, p);
        let (tz, tq) = self.starts(n + 1, pb);
        let full = &self.diffs[&n];
        let src = MixedSpace::new(full.src.n_z - sz, full.src.n_q - sq);
        let dst = MixedSpace::new(tz, tq);
        let mut a = SpZ::new(tz, src.n_z);
        let mut c = SpQ::new(tq, src.n_z);
        let mut d = SpQ::new(tq, src.n_q);
        for t in sz..full.src.n_z {
            for (r, v) in &full.a.cols[t] {
                if (*r as usize) < tz {
                    a.push_entry(*r, t - sz, v.clone());
                }
            }
            for (r, v) in &full.c.cols[t] {
                if (*r as usize) < tq {
                    c.push_entry(*r, t - sz, v.clone());
                }
            }
        }
        for t in sq..full.src.n_q {
            for (r, v) in &full.d.cols[t] {
                if (*r as usize) < tq {
                    d.push_entry(*r, t - sq, v.clone());
                }
            }
        }
        MixedMap { src, dst, a, c, d }
    }

    /// The page entry E_r^{p,q}, presented over the ambient F^p suffix of
    /// machine degree p + q + 1.
    pub fn entry(&mut self, r: usize, p: isize, q: isize) -> &Subquotient {
        self.compute_entry(r, p, q);
        &self.entries[&(r, p, q)]
    }

    fn compute_entry(&mut self, r: usize, p: isize, q: isize) {
        assert!(r >= 1, "pages are indexed from 1");
        assert!(p >= 0 && p + q + 1 >= 0);
        if self.entries.contains_key(&(r, p, q)) {
            return;
        }
        let n = p + q + 1;
        let ri = r as isize;
        self.ensure(n - 1);
        self.ensure(n);
        let zc = self.conditions(n, p, p + ri);
        let kp1 = mixed_kernel_parts(&self.conditions(n, p + 1, p + ri));
        let p2 = (p - ri + 1).max(0);
        let kp2 = mixed_kernel_parts(&self.conditions(n - 1, p2, p));
        let (sz, sq) = self.starts(n, p);
        let (sz1, sq1) = self.starts(n, p + 1);
        let (sz2, sq2) = self.starts(n - 1, p2);

        let gsrc = MixedSpace::new(
            kp1.x_cols.len() + kp2.x_cols.len(),
            kp1.kd_cols.len() + kp2.kd_cols.len(),
        );
        let mut ga = SpZ::new(zc.src.n_z, gsrc.n_z);
        let mut gc = SpQ::new(zc.src.n_q, gsrc.n_z);
        let mut gd = SpQ::new(zc.src.n_q, gsrc.n_q);
        let dprev = &self.diffs[&(n - 1)];

        // cycles one step deeper in the filtration, reindexed into F^p
        let mut col = 0;
        for (x, v) in kp1.x_cols.iter().zip(&kp1.v_tails) {
            for (u, e) in x {
                ga.push_entry(u + (sz1 - sz) as u32, col, e.clone());
            }
            for (u, e) in v {
                gc.push_entry(u + (sq1 - sq) as u32, col, e.clone());
            }
            col += 1;
        }
        // boundaries of the lower-degree cycles that reach into F^p
        for (x, v) in kp2.x_cols.iter().zip(&kp2.v_tails) {
            let mut lift = MixedVec::zero(dprev.src);
            for (u, e) in x {
                lift.z[sz2 + *u as usize] = e.clone();
            }
            for (u, e) in v {
                lift.q[sq2 + *u as usize] = e.clone();
            }
            let w = dprev.apply(&lift);
            for (i, e) in w.z.iter().enumerate() {
                if !e.is_zero() {
                    assert!(i >= sz, "a boundary stays outside the filtration step");
                    ga.push_entry((i - sz) as u32, col, e.clone());
                }
            }
            for (i, e) in w.q.iter().enumerate() {
                if !e.is_zero() {
                    assert!(i >= sq, "a boundary stays outside the filtration step");
                    gc.push_entry((i - sq) as u32, col, e.clone());
                }
            }
            col += 1;
        }
        let mut qcol = 0;
        for kd in &kp1.kd_cols {
            for (u, e) in kd {
                gd.push_entry(u + (sq1 - sq) as u32, qcol, e.clone());
            }
            qcol += 1;
        }
        for kd in &kp2.kd_cols {
            let mut lift = MixedVec::zero(dprev.src);
            for (u, e) in kd {
                lift.q[sq2 + *u as usize] = e.clone();
            }
            let w = dprev.apply(&lift);
            for (i, e) in w.q.iter().enumerate() {
                if !e.is_zero() {
                    assert!(i >= sq, "a boundary stays outside the filtration step");
                    gd.push_entry((i - sq) as u32, qcol, e.clone());
                }
            }
            qcol += 1;
        }

        let den = MixedMap { src: gsrc, dst: zc.src, a: ga, c: gc, d: gd };
        let sq = mixed_subquotient(&zc, &den, Witnesses::Drop);
        self.entries.insert((r, p, q), sq);
    }

    /// The page differential d_r out of E_r^{p,q}, evaluated on the chosen
    /// representative of each summand and decoded in E_r^{p+r,q-r+1}.
    pub fn page_map(&mut self, r: usize, p: isize, q: isize) -> Vec<ClassCoords> {
        let n = p + q + 1;
        let ri = r as isize;
        self.compute_entry(r, p, q);
        self.compute_entry(r, p + ri, q - ri + 1);
        let (sz, sq) = self.starts(n, p);
        let (tz, tq) = self.starts(n + 1, p + ri);
        let src = &self.entries[&(r, p, q)];
        let tgt = &self.entries[&(r, p + ri, q - ri + 1)];
        let dn = &self.diffs[&n];
        let mut out = Vec::new();
        for s in src.summands() {
            let rep = src.representative(s);
            let mut lift = MixedVec::zero(dn.src);
            for (i, e) in rep.z.iter().enumerate() {
                lift.z[sz + i] = e.clone();
            }
            for (i, e) in rep.q.iter().enumerate() {
                lift.q[sq + i] = e.clone();
            }
            let w = dn.apply(&lift);
            let mut res = MixedVec::zero(tgt.ambient());
            for (i, e) in w.z.iter().enumerate() {
                if !e.is_zero() {
                    assert!(i >= tz, "the page differential escapes the filtration");
                    res.z[i - tz] = e.clone();
                }
            }
            for (i, e) in w.q.iter().enumerate() {
                if !e.is_zero() {
                    assert!(i >= tq, "the page differential escapes the filtration");
                    res.q[i - tq] = e.clone();
                }
            }
            out.push(tgt.decode(&res));
        }
        out
    }

    /// The stable page E_oo^{p,q} = E_{p+q+3}^{p,q}.
    pub fn infinity(&mut self, p: isize, q: isize) -> &Subquotient {
        self.entry((p + q + 3) as usize, p, q)
    }

    /// The abutment: cohomology of the total complex in Deligne degree m,
    /// for comparing with the stable page.
    pub fn total(&mut self, m: isize) -> MixedModule {
        if let Some(t) = self.totals.get(&m) {
            return t.clone();
        }
        let t = self
            .model
            .complex_window(m, m + 2)
            .cohomology_at(m + 1, Witnesses::Drop)
            .module;
        self.totals.insert(m, t.clone());
        t
    }
}

/// The fiber Deligne cohomology H^q(M, F(N)) as a module over the acting
/// group, with the action induced by pullback: the coefficients of the
/// second page, E_2^{p,q} = H^p(G, H^q(M)).
pub fn fiber_gmodule(
    action: &SimplicialAction,
    coeff_len: usize,
    q: isize,
) -> Result<GModule, String> {
    assert!(q >= 0);
    let mut ord = OrdinaryModel::new(&action.space, coeff_len);
    let den = ord.differential(q);
    let zc = ord.differential(q + 1);
    let sq = mixed_subquotient(&zc, &den, Witnesses::Drop);
    let maps: Vec<MixedMap> = (0..action.group.order() as u8)
        .map(|g| ord.action_map(action, g, q + 1))
        .collect();
    induced_gmodule(&action.group, &sq, &maps, &den)
}
