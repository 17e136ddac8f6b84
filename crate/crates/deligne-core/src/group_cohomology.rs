//! Group cohomology of finite groups with presented mixed coefficient
//! modules, via the bar complex.
//!
//! A coefficient module Z^a ⊕ Q^b ⊕ (Q/Z)^c ⊕ (⊕ Z/dᵢ) is presented as a
//! free mixed cover (carriers Z for the free and torsion parts, Q for the
//! circle and rational parts) modulo a relation map, and the group acts by
//! lifted maps on the cover.  A lift is unique modulo relations in the
//! integer sector but must be exact in the divisible sector: two rational
//! matrices induce the same map on Q/Z- or Q-summands only when they agree
//! there.  The bar complex of the two-term presentation is a double complex
//! of free mixed spaces, so H^p(G, A) is degree p+1 of its total complex.
//! Face convention: the group acts through the last face,
//! (df)(g_1..g_{p+1}) = f(g_2..) - ... +- f(..g_l g_{l+1}..) -+
//! A_{g_{p+1}}(f(g_1..g_p)), and the face operators compose contravariantly
//! (A_g A_h = A_{hg}), as pullbacks along a left action do.

use rustc_hash::FxHashMap;

use crate::exact::complex::{MixedComplex, Subquotient, Summand, Witnesses};
use crate::exact::matrix::{int, rat, Int, Rat};
use crate::exact::mixed::{solve_mixed, MixedMap, MixedSolve, MixedSpace};
use crate::exact::module::MixedModule;
use crate::exact::presented::presentation_of;
use crate::exact::sparse::{SpQ, SpZ};
use crate::group::{all_tuples, FiniteGroup};
use num_traits::{Signed, Zero};

/// A finite group acting on a presented mixed module.
pub struct GModule {
    pub group: FiniteGroup,
    /// the canonical shape of the module being presented
    pub shape: MixedModule,
    /// free cover: Z-part [free | torsion carriers], Q-part [circle
    /// carriers | rationals]
    pub cover: MixedSpace,
    /// relations [torsion | circle]: dᵢ on a torsion carrier, the integer
    /// lattice on a circle carrier
    pub rel: MixedMap,
    /// lifted action per group element, cover -> cover
    pub action: Vec<MixedMap>,
    /// induced action on the relation space
    rel_action: Vec<SpZ>,
}

/// The cover coordinate carrying a canonical summand: (integer side, index).
fn carrier(shape: &MixedModule, s: Summand) -> (bool, usize) {
    match s {
        Summand::Free(i) => (true, i),
        Summand::Torsion(i) => (true, shape.rank_z + i),
        Summand::Circle(i) => (false, i),
        Summand::Rational(i) => (false, shape.circles + i),
    }
}

impl GModule {
    pub fn new(
        group: FiniteGroup,
        shape: MixedModule,
        action: Vec<MixedMap>,
    ) -> Result<Self, String> {
        let (cover, rel) = presentation_of(&shape);
        if action.len() != group.order() {
            return Err("one action map per group element is required".into());
        }
        for (g, m) in action.iter().enumerate() {
            if m.src != cover || m.dst != cover {
                return Err(format!(
                    "action of element {} has the wrong shape",
                    group.name(g as u8)
                ));
            }
        }
        // the relations must be preserved; this also yields the relation
        // action needed by the bar complex
        let mut rel_action = Vec::new();
        for (g, m) in action.iter().enumerate() {
            let mut ra = SpZ::new(rel.src.n_z, rel.src.n_z);
            for j in 0..rel.src.n_z {
                let v = m.apply(&rel.column(j));
                match solve_mixed(&rel, &v) {
                    MixedSolve::Solution(x) => {
                        for (r, e) in x.z.iter().enumerate() {
                            ra.push_entry(r as u32, j, e.clone());
                        }
                    }
                    MixedSolve::NoSolution(_) => {
                        return Err(format!(
                            "the action of {} does not preserve the relations",
                            group.name(g as u8)
                        ));
                    }
                }
            }
            rel_action.push(ra);
        }
        // composition law: as the operator of the last bar face the action
        // composes contravariantly, A_g A_h = A_{hg}, as pullbacks do;
        // checked modulo relations on the integer sector and exactly on the
        // divisible sector
        for g in 0..group.order() as u8 {
            for h in 0..group.order() as u8 {
                let gh = group.mul(h, g);
                for j in 0..cover.n_z + cover.n_q {
                    let composite = action[g as usize].apply(&action[h as usize].column(j));
                    let diff = composite.sub(&action[gh as usize].column(j));
                    let ok = if j < cover.n_z {
                        matches!(solve_mixed(&rel, &diff), MixedSolve::Solution(_))
                    } else {
                        diff.is_zero()
                    };
                    if !ok {
                        return Err(format!(
                            "the lifted maps of {} and {} do not compose to {}",
                            group.name(g),
                            group.name(h),
                            group.name(gh)
                        ));
                    }
                }
            }
        }
        Ok(GModule { group, shape, cover, rel, action, rel_action })
    }

    /// Trivial action on a module of the given shape.
    pub fn trivial(group: FiniteGroup, shape: MixedModule) -> Self {
        let (cover, _) = presentation_of(&shape);
        let action = (0..group.order()).map(|_| MixedMap::identity(cover)).collect();
        GModule::new(group, shape, action).unwrap()
    }

    pub fn qz_trivial(group: FiniteGroup) -> Self {
        GModule::trivial(group, MixedModule::new(0, 0, 1, vec![]))
    }
}

/// Divisible summands only reveal their integer coefficients at a
/// fractional multiple of the representative, so induced actions are probed
/// at 1/DEPTH of each divisible generator.
const DEPTH: i64 = 840;

/// The action induced on a computed subquotient by compatible maps of its
/// ambient space.  `denominators` must be the map whose image was divided
/// out, and each `ambient_action[g]` must descend to the subquotient.
pub fn induced_gmodule(
    group: &FiniteGroup,
    sq: &Subquotient,
    ambient_action: &[MixedMap],
    denominators: &MixedMap,
) -> Result<GModule, String> {
    let shape = sq.module.clone();
    let summands = sq.summands();
    let nzs = shape.rank_z + shape.torsion.len();
    let nqs = shape.circles + shape.rank_q;

    // one solve system [representatives | denominators] serves every element
    let amb = sq.ambient();
    let src = MixedSpace::new(nzs + denominators.src.n_z, nqs + denominators.src.n_q);
    let mut a = SpZ::new(amb.n_z, src.n_z);
    let mut c = SpQ::new(amb.n_q, src.n_z);
    let mut d = SpQ::new(amb.n_q, src.n_q);
    let mut reps = Vec::new();
    for (t, s) in summands.iter().enumerate() {
        let v = sq.representative(*s);
        let (z_side, _) = carrier(&shape, *s);
        if z_side {
            for (r, e) in v.z.iter().enumerate() {
                a.push_entry(r as u32, t, e.clone());
            }
            for (r, e) in v.q.iter().enumerate() {
                c.push_entry(r as u32, t, e.clone());
            }
        } else {
            if v.z.iter().any(|e| !e.is_zero()) {
                return Err("divisible summand representative has integer support".into());
            }
            for (r, e) in v.q.iter().enumerate() {
                d.push_entry(r as u32, t - nzs, e.clone());
            }
        }
        reps.push(v);
    }
    for j in 0..denominators.src.n_z {
        let v = denominators.column(j);
        for (r, e) in v.z.iter().enumerate() {
            a.push_entry(r as u32, nzs + j, e.clone());
        }
        for (r, e) in v.q.iter().enumerate() {
            c.push_entry(r as u32, nzs + j, e.clone());
        }
    }
    for j in 0..denominators.src.n_q {
        let v = denominators.column(denominators.src.n_z + j);
        for (r, e) in v.q.iter().enumerate() {
            d.push_entry(r as u32, nqs + j, e.clone());
        }
    }
    let system = MixedMap { src, dst: amb, a, c, d };

    let (cover, _) = presentation_of(&shape);
    let mut action = Vec::new();
    for g in 0..group.order() {
        let mut ga = SpZ::new(cover.n_z, cover.n_z);
        let mut gc = SpQ::new(cover.n_q, cover.n_z);
        let mut gd = SpQ::new(cover.n_q, cover.n_q);
        for (t, s) in summands.iter().enumerate() {
            let (z_side, col) = carrier(&shape, *s);
            let mut w = ambient_action[g].apply(&reps[t]);
            if !z_side {
                for e in w.q.iter_mut() {
                    *e /= rat(DEPTH, 1);
                }
            }
            let coords = match solve_mixed(&system, &w) {
                MixedSolve::Solution(x) => x,
                MixedSolve::NoSolution(_) => {
                    return Err(format!(
                        "the map of {} does not descend to the subquotient",
                        group.name(g as u8)
                    ));
                }
            };
            for (tt, s2) in summands.iter().enumerate() {
                let (z2, col2) = carrier(&shape, *s2);
                if z_side {
                    if z2 {
                        ga.push_entry(col2 as u32, col, coords.z[tt].clone());
                    } else {
                        gc.push_entry(col2 as u32, col, coords.q[tt - nzs].clone());
                    }
                } else if z2 {
                    // a divisible summand cannot reach the integer sector
                    if !coords.z[tt].is_zero() {
                        return Err("divisible summand maps into the integer sector".into());
                    }
                } else {
                    let mut e = coords.q[tt - nzs].clone() * rat(DEPTH, 1);
                    if matches!(s2, Summand::Circle(_)) {
                        // the coefficient at the probe depth determines the
                        // true integer entry modulo DEPTH
                        if !e.is_integer() {
                            return Err("circle-block entry is not an integer".into());
                        }
                        let n = reduce_mod_signed(&e.to_integer(), &int(DEPTH));
                        if n.abs() > int(DEPTH / 4) {
                            return Err("cannot certify a circle-block entry".into());
                        }
                        e = Rat::from_integer(n);
                    }
                    gd.push_entry(col2 as u32, col, e);
                }
            }
        }
        action.push(MixedMap { src: cover, dst: cover, a: ga, c: gc, d: gd });
    }
    GModule::new(group.clone(), shape, action)
}

fn reduce_mod_signed(n: &Int, modulus: &Int) -> Int {
    let mut r = n % modulus;
    let half = modulus / int(2);
    if r > half {
        r -= modulus;
    }
    if r < -half {
        r += modulus;
    }
    r
}

#[derive(Clone, Debug, Default)]
pub struct BarDegree {
    /// copies of the relation space (level = total degree)
    pub r_copies: Vec<Vec<u8>>,
    /// copies of the cover (level = total degree - 1)
    pub f_copies: Vec<Vec<u8>>,
    pub n_z: usize,
    pub n_q: usize,
}

pub struct BarComplex<'m> {
    pub gm: &'m GModule,
    degrees: FxHashMap<isize, BarDegree>,
}

impl<'m> BarComplex<'m> {
    pub fn new(gm: &'m GModule) -> Self {
        BarComplex { gm, degrees: FxHashMap::default() }
    }

    pub fn degree_space(&mut self, t: isize) -> &BarDegree {
        if !self.degrees.contains_key(&t) {
            let mut ds = BarDegree::default();
            if t >= 0 {
                let ord = self.gm.group.order();
                ds.r_copies = all_tuples(ord, t as usize);
                if t >= 1 {
                    ds.f_copies = all_tuples(ord, t as usize - 1);
                }
                ds.n_z = ds.r_copies.len() * self.gm.rel.src.n_z
                    + ds.f_copies.len() * self.gm.cover.n_z;
                ds.n_q = ds.f_copies.len() * self.gm.cover.n_q;
            }
            self.degrees.insert(t, ds);
        }
        &self.degrees[&t]
    }

    /// Offsets of the cover copy labelled by `copy` inside total degree t.
    pub fn f_offsets(&mut self, t: isize, copy: &[u8]) -> Option<(usize, usize)> {
        let r_z = self.gm.rel.src.n_z;
        let (c_z, c_q) = (self.gm.cover.n_z, self.gm.cover.n_q);
        let ds = self.degree_space(t);
        let i = ds.f_copies.binary_search_by(|c| c.as_slice().cmp(copy)).ok()?;
        Some((ds.r_copies.len() * r_z + i * c_z, i * c_q))
    }

    pub fn differential(&mut self, t: isize) -> MixedMap {
        self.degree_space(t);
        self.degree_space(t + 1);
        let src = &self.degrees[&t];
        let tgt = &self.degrees[&(t + 1)];
        let gm = self.gm;
        let group = &gm.group;
        let r_z = gm.rel.src.n_z;
        let (c_z, c_q) = (gm.cover.n_z, gm.cover.n_q);
        let src_space = MixedSpace::new(src.n_z, src.n_q);
        let tgt_space = MixedSpace::new(tgt.n_z, tgt.n_q);
        let mut a = SpZ::new(tgt.n_z, src.n_z);
        let mut c = SpQ::new(tgt.n_q, src.n_z);
        let mut d = SpQ::new(tgt.n_q, src.n_q);
        let src_r_pos = |copy: &[u8]| -> usize {
            src.r_copies.binary_search_by(|x| x.as_slice().cmp(copy)).unwrap()
        };
        let src_f_pos = |copy: &[u8]| -> usize {
            src.f_copies.binary_search_by(|x| x.as_slice().cmp(copy)).unwrap()
        };

        // bar faces into the relation copies
        for (ci, copy) in tgt.r_copies.iter().enumerate() {
            let lvl = copy.len();
            if lvl == 0 {
                continue;
            }
            let tp = ci * r_z;
            for l in 0..=lvl {
                let fc = crate::assembly::face_copy(group, copy, l);
                let sp = src_r_pos(&fc) * r_z;
                let sign = if l % 2 == 0 { 1 } else { -1 };
                if l == lvl {
                    let ra = &gm.rel_action[copy[lvl - 1] as usize];
                    for (j, rcol) in ra.cols.iter().enumerate() {
                        for (row, e) in rcol {
                            a.push_entry(tp as u32 + row, sp + j, int(sign) * e);
                        }
                    }
                } else {
                    for j in 0..r_z {
                        a.push_entry((tp + j) as u32, sp + j, int(sign));
                    }
                }
            }
        }

        let f_z_base_t = tgt.r_copies.len() * r_z;
        let f_z_base_s = src.r_copies.len() * r_z;
        for (ci, copy) in tgt.f_copies.iter().enumerate() {
            let lvl = copy.len();
            let tzp = f_z_base_t + ci * c_z;
            let tqp = ci * c_q;

            // bar faces into the cover copies
            if lvl >= 1 {
                for l in 0..=lvl {
                    let fc = crate::assembly::face_copy(group, copy, l);
                    let sp = src_f_pos(&fc);
                    let (szp, sqp) = (f_z_base_s + sp * c_z, sp * c_q);
                    let sign = if l % 2 == 0 { 1 } else { -1 };
                    if l == lvl {
                        let m = &gm.action[copy[lvl - 1] as usize];
                        for j in 0..c_z {
                            for (row, e) in &m.a.cols[j] {
                                a.push_entry(tzp as u32 + row, szp + j, int(sign) * e);
                            }
                            for (row, e) in &m.c.cols[j] {
                                c.push_entry(tqp as u32 + row, szp + j, rat(sign, 1) * e);
                            }
                        }
                        for j in 0..c_q {
                            for (row, e) in &m.d.cols[j] {
                                d.push_entry(tqp as u32 + row, sqp + j, rat(sign, 1) * e);
                            }
                        }
                    } else {
                        for j in 0..c_z {
                            a.push_entry((tzp + j) as u32, szp + j, int(sign));
                        }
                        for j in 0..c_q {
                            d.push_entry((tqp + j) as u32, sqp + j, rat(sign, 1));
                        }
                    }
                }
            }

            // the presentation map from the matching relation copy, with the
            // level-dependent sign that makes the square anticommute
            let sp = src_r_pos(copy) * r_z;
            let sign = if lvl % 2 == 0 { 1 } else { -1 };
            for j in 0..r_z {
                for (row, e) in &gm.rel.a.cols[j] {
                    a.push_entry(tzp as u32 + row, sp + j, int(sign) * e);
                }
                for (row, e) in &gm.rel.c.cols[j] {
                    c.push_entry(tqp as u32 + row, sp + j, rat(sign, 1) * e);
                }
            }
        }

        MixedMap { src: src_space, dst: tgt_space, a, c, d }
    }

    pub fn complex_window(&mut self, lo: isize, hi: isize) -> MixedComplex {
        assert!(lo <= hi);
        let spaces = (lo..=hi)
            .map(|t| {
                let ds = self.degree_space(t);
                MixedSpace::new(ds.n_z, ds.n_q)
            })
            .collect();
        let maps = (lo..hi).map(|t| self.differential(t)).collect();
        MixedComplex::new(lo, spaces, maps)
    }
}

pub fn group_cohomology(gm: &GModule, p: isize) -> MixedModule {
    group_cohomology_classes(gm, p).1.module.clone()
}

/// The bar complex together with the class data at degree p, for callers
/// that need representative cocycles.
pub fn group_cohomology_classes(gm: &GModule, p: isize) -> (BarComplex<'_>, Subquotient) {
    assert!(p >= 0, "group cohomology lives in nonnegative degrees");
    let mut bar = BarComplex::new(gm);
    let cx = bar.complex_window(p, p + 2);
    let sq = cx.cohomology_at(p + 1, Witnesses::Keep);
    (bar, sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::{MatQ, MatZ};
    use crate::group;
    use num_traits::One;

    fn q_action(order: usize, dim: usize, rows: Vec<Vec<(i64, i64)>>) -> Vec<MixedMap> {
        let mut maps = vec![MixedMap::identity(MixedSpace::new(0, dim)); order];
        maps[1] = MixedMap::from_dense(
            &MatZ::zero(0, 0),
            &MatQ::zero(dim, 0),
            &MatQ::from_rows_i64(rows),
        );
        maps
    }

    fn swap_q2() -> GModule {
        GModule::new(
            group::cyclic(2).unwrap(),
            MixedModule::new(0, 2, 0, vec![]),
            q_action(2, 2, vec![vec![(0, 1), (1, 1)], vec![(1, 1), (0, 1)]]),
        )
        .unwrap()
    }

    #[test]
    fn fixed_points_in_degree_zero() {
        assert_eq!(group_cohomology(&swap_q2(), 0), MixedModule::new(0, 1, 0, vec![]));
        // negation on Q has no fixed points
        let gm = GModule::new(
            group::cyclic(2).unwrap(),
            MixedModule::new(0, 1, 0, vec![]),
            q_action(2, 1, vec![vec![(-1, 1)]]),
        )
        .unwrap();
        assert!(group_cohomology(&gm, 0).is_zero());
    }

    #[test]
    fn rational_coefficients_vanish_in_positive_degrees() {
        let gm = swap_q2();
        for p in 1..=3 {
            assert!(group_cohomology(&gm, p).is_zero(), "p = {}", p);
        }
    }

    #[test]
    fn circle_coefficients_give_the_character_groups() {
        for n in [2usize, 3, 4] {
            let gm = GModule::qz_trivial(group::cyclic(n).unwrap());
            assert_eq!(group_cohomology(&gm, 0), MixedModule::new(0, 0, 1, vec![]));
            assert_eq!(
                group_cohomology(&gm, 1),
                MixedModule::new(0, 0, 0, vec![int(n as i64)]),
                "n = {}",
                n
            );
            assert!(group_cohomology(&gm, 2).is_zero(), "n = {}", n);
        }
    }

    #[test]
    fn integer_coefficients_of_the_cyclic_group() {
        let gm = GModule::trivial(group::cyclic(2).unwrap(), MixedModule::new(1, 0, 0, vec![]));
        assert_eq!(group_cohomology(&gm, 0), MixedModule::new(1, 0, 0, vec![]));
        assert!(group_cohomology(&gm, 1).is_zero());
        assert_eq!(group_cohomology(&gm, 2), MixedModule::new(0, 0, 0, vec![int(2)]));
        assert!(group_cohomology(&gm, 3).is_zero());
    }

    #[test]
    fn discrete_torsion_of_the_klein_group() {
        let gm = GModule::qz_trivial(group::klein4().unwrap());
        assert_eq!(group_cohomology(&gm, 2), MixedModule::new(0, 0, 0, vec![int(2)]));
    }

    #[test]
    fn bad_lifts_are_rejected() {
        // halving is not defined on Q/Z
        let err = GModule::new(
            group::cyclic(2).unwrap(),
            MixedModule::new(0, 0, 1, vec![]),
            q_action(2, 1, vec![vec![(1, 2)]]),
        )
        .err()
        .unwrap();
        assert!(err.contains("relations"), "{}", err);

        // tripling preserves the integer lattice but is not an involution
        let err = GModule::new(
            group::cyclic(2).unwrap(),
            MixedModule::new(0, 0, 1, vec![]),
            q_action(2, 1, vec![vec![(3, 1)]]),
        )
        .err()
        .unwrap();
        assert!(err.contains("compose"), "{}", err);
    }

    #[test]
    fn negation_acts_on_the_circle() {
        let gm = GModule::new(
            group::cyclic(2).unwrap(),
            MixedModule::new(0, 0, 1, vec![]),
            q_action(2, 1, vec![vec![(-1, 1)]]),
        )
        .unwrap();
        // fixed points of x -> -x on Q/Z are the half-integers; odd degrees
        // vanish because doubling is surjective with kernel the fixed points
        assert_eq!(group_cohomology(&gm, 0), MixedModule::new(0, 0, 0, vec![int(2)]));
        assert!(group_cohomology(&gm, 1).is_zero());
        assert_eq!(group_cohomology(&gm, 2), MixedModule::new(0, 0, 0, vec![int(2)]));
    }

    #[test]
    fn bar_differentials_square_to_zero() {
        let gm = GModule::new(
            group::cyclic(2).unwrap(),
            MixedModule::new(1, 0, 1, vec![int(3)]),
            {
                let cover = MixedSpace::new(2, 1);
                let mut m = MixedMap::identity(cover);
                m.d = SpQ::new(1, 1);
                m.d.push_entry(0, 0, -Rat::one());
                vec![MixedMap::identity(cover), m]
            },
        )
        .unwrap();
        let mut bar = BarComplex::new(&gm);
        bar.complex_window(0, 4).check_dsquared().unwrap();
    }
}
