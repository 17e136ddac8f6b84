//! Drivers for equivariant and ordinary smooth Deligne cohomology.
//!
//! Both pipelines compute `H^m` as degree m+1 of a total complex built on
//! the integer-to-forms coefficient model Z -> A^0 -> ... -> A^N, with the
//! circle group modeled as Q/Z.  The equivariant driver wraps the triple
//! complex of [`crate::assembly`]; the ordinary driver assembles the
//! Cech double complex of the space alone over the vertex-star cover, as an
//! independently written baseline the trivial-group equivariant answer must
//! reproduce.

use rustc_hash::FxHashMap;

use crate::action::SimplicialAction;
use crate::assembly::DeligneModel;
use crate::exact::complex::{MixedComplex, Subquotient, Witnesses};
use crate::exact::matrix::{int, Rat};
use crate::exact::mixed::{MixedMap, MixedSpace};
use crate::exact::module::MixedModule;
use crate::exact::sparse::{SpQ, SpZ};
use crate::simplicial::{SimplicialComplex, StarSubcomplex};

/// Degree convention and coefficient model, echoed in every result.
pub const CONVENTIONS: &str = "H^m is degree m+1 of the total complex of the \
    model Z -> A^0 -> ... -> A^N; the circle group is modeled as Q/Z; all \
    arithmetic is exact";

#[derive(Clone, Copy, Debug)]
pub struct EngineOptions {
    /// drop degenerate slots (same cohomology, far smaller complexes)
    pub normalized: bool,
    pub witnesses: Witnesses,
    /// hard cap on coordinates per total degree before solving
    pub max_coordinates: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            normalized: true,
            witnesses: Witnesses::Drop,
            max_coordinates: 400_000,
        }
    }
}

pub struct CohomologyResult {
    pub m: isize,
    pub coeff_len: usize,
    pub group: MixedModule,
    pub classes: Subquotient,
    pub conventions: &'static str,
}

pub fn equivariant_deligne(
    action: &SimplicialAction,
    coeff_len: usize,
    m: isize,
    opts: &EngineOptions,
) -> Result<CohomologyResult, String> {
    Ok(equivariant_deligne_range(action, coeff_len, m, m, opts)?.pop().unwrap())
}

/// H^m for every m in m_lo ..= m_hi, from a single assembled window.
pub fn equivariant_deligne_range(
    action: &SimplicialAction,
    coeff_len: usize,
    m_lo: isize,
    m_hi: isize,
    opts: &EngineOptions,
) -> Result<Vec<CohomologyResult>, String> {
    if m_lo < 0 || m_lo > m_hi {
        return Err(format!("bad degree range {}..={}", m_lo, m_hi));
    }
    let mut model = DeligneModel::new(action, coeff_len, opts.normalized);
    for n in m_lo..=m_hi + 2 {
        let ds = model.degree_space(n);
        let total = ds.n_z + ds.n_q;
        if total > opts.max_coordinates {
            return Err(format!(
                "resource limit exceeded: total degree {} has {} coordinates (limit {})",
                n, total, opts.max_coordinates
            ));
        }
    }
    let cx = model.complex_window(m_lo, m_hi + 2);
    Ok((m_lo..=m_hi)
        .map(|m| {
            let classes = cx.cohomology_at(m + 1, opts.witnesses);
            CohomologyResult {
                m,
                coeff_len,
                group: classes.module.clone(),
                classes,
                conventions: CONVENTIONS,
            }
        })
        .collect())
}

/// One slot of the ordinary double complex: simplicial coefficients of level
/// k on the closed star of one simplex of the space.
#[derive(Clone, Debug)]
pub struct OrdSlot {
    /// the Cech index: dimension and per-dimension rank of a simplex
    pub dim: usize,
    pub idx: u32,
    pub k: usize,
    pub offset: usize,
    pub len: usize,
}

#[derive(Clone, Debug, Default)]
pub struct OrdDegree {
    pub slots: Vec<OrdSlot>,
    pub by_key: FxHashMap<(usize, u32, usize), usize>,
    pub n_z: usize,
    pub n_q: usize,
}

impl OrdDegree {
    pub fn space(&self) -> MixedSpace {
        MixedSpace::new(self.n_z, self.n_q)
    }
}

/// The Cech double complex of a space over its vertex-star cover: open
/// star intersections are open stars, so the nerve directions are exactly
/// the simplices of the space and patch data lives on closed stars.
pub struct OrdinaryModel<'a> {
    pub space: &'a SimplicialComplex,
    pub coeff_len: usize,
    stars: Vec<Vec<StarSubcomplex>>,
    degrees: FxHashMap<isize, OrdDegree>,
}

impl<'a> OrdinaryModel<'a> {
    pub fn new(space: &'a SimplicialComplex, coeff_len: usize) -> Self {
        let stars = (0..=space.dim())
            .map(|d| {
                (0..space.n_simplices(d))
                    .map(|i| space.closed_star(space.simplex(d, i)).unwrap())
                    .collect()
            })
            .collect();
        OrdinaryModel { space, coeff_len, stars, degrees: FxHashMap::default() }
    }

    pub fn star(&self, dim: usize, idx: u32) -> &StarSubcomplex {
        &self.stars[dim][idx as usize]
    }

    pub fn degree_space(&mut self, n: isize) -> &OrdDegree {
        if !self.degrees.contains_key(&n) {
            let mut ds = OrdDegree::default();
            if n >= 0 {
                let n = n as usize;
                for k in 0..=usize::min(self.coeff_len + 1, n) {
                    let j = n - k;
                    if j > self.space.dim() {
                        continue;
                    }
                    for idx in 0..self.space.n_simplices(j) {
                        let st = &self.stars[j][idx];
                        let len = if k == 0 { 1 } else { st.n_simplices(k - 1) };
                        if len == 0 {
                            continue;
                        }
                        let offset = if k == 0 {
                            ds.n_z += 1;
                            ds.n_z - 1
                        } else {
                            ds.n_q += len;
                            ds.n_q - len
                        };
                        ds.by_key.insert((j, idx as u32, k), ds.slots.len());
                        ds.slots.push(OrdSlot { dim: j, idx: idx as u32, k, offset, len });
                    }
                }
            }
            self.degrees.insert(n, ds);
        }
        &self.degrees[&n]
    }

    /// D = delta + (-1)^j dtilde on the double complex.
    pub fn differential(&mut self, n: isize) -> MixedMap {
        self.degree_space(n);
        self.degree_space(n + 1);
        let src = &self.degrees[&n];
        let tgt = &self.degrees[&(n + 1)];
        let mut a = SpZ::new(tgt.n_z, src.n_z);
        let mut c = SpQ::new(tgt.n_q, src.n_z);
        let mut d = SpQ::new(tgt.n_q, src.n_q);

        for slot in &tgt.slots {
            let j = slot.dim;
            let k = slot.k;
            let star_t = &self.stars[j][slot.idx as usize];
            let verts = self.space.simplex(j, slot.idx as usize);

            // Cech restrictions from the faces of the index simplex
            if j >= 1 {
                for m in 0..=j {
                    let mut face = verts.to_vec();
                    face.remove(m);
                    let fidx = self.space.simplex_index(&face).unwrap();
                    let si = src.by_key[&(j - 1, fidx, k)];
                    let sslot = &src.slots[si];
                    let sign = if m % 2 == 0 { 1 } else { -1 };
                    if k == 0 {
                        a.push_entry(slot.offset as u32, sslot.offset, int(sign));
                    } else {
                        let sstar = &self.stars[j - 1][fidx as usize];
                        for b in 0..slot.len {
                            let gid = star_t.members(k - 1)[b];
                            let pos = sstar
                                .position_of(k - 1, gid)
                                .expect("the face star contains the smaller star");
                            d.push_entry(
                                (slot.offset + b) as u32,
                                sslot.offset + pos,
                                Rat::from_integer(int(sign)),
                            );
                        }
                    }
                }
            }

            // coefficient differential, twisted by (-1)^j
            if k >= 1 {
                let si = src.by_key[&(j, slot.idx, k - 1)];
                let sslot = &src.slots[si];
                let sign = if j % 2 == 0 { 1 } else { -1 };
                if k == 1 {
                    for b in 0..slot.len {
                        c.push_entry(
                            (slot.offset + b) as u32,
                            sslot.offset,
                            Rat::from_integer(int(sign)),
                        );
                    }
                } else {
                    for b in 0..slot.len {
                        let gid = star_t.members(k - 1)[b];
                        let sigma = self.space.simplex(k - 1, gid as usize);
                        for l in 0..sigma.len() {
                            let mut face = sigma.to_vec();
                            face.remove(l);
                            let gidf = self.space.simplex_index(&face).unwrap();
                            let pos = star_t
                                .position_of(k - 2, gidf)
                                .expect("stars are closed under faces");
                            let s = if l % 2 == 0 { sign } else { -sign };
                            d.push_entry(
                                (slot.offset + b) as u32,
                                sslot.offset + pos,
                                Rat::from_integer(int(s)),
                            );
                        }
                    }
                }
            }
        }

        MixedMap { src: src.space(), dst: tgt.space(), a, c, d }
    }

    /// Pullback of a simplicial automorphism on degree-n cochains: the value
    /// on a slot reads the source at the image simplices, with the
    /// orientation signs of both the index simplex and the form simplex.
    /// Pullbacks compose contravariantly in the group element.
    pub fn action_map(&mut self, act: &SimplicialAction, g: u8, n: isize) -> MixedMap {
        self.degree_space(n);
        let ds = &self.degrees[&n];
        let mut a = SpZ::new(ds.n_z, ds.n_z);
        let c = SpQ::new(ds.n_q, ds.n_z);
        let mut d = SpQ::new(ds.n_q, ds.n_q);
        for slot in &ds.slots {
            let verts = self.space.simplex(slot.dim, slot.idx as usize);
            let (gverts, eps_idx) = act.act_simplex_signed(g, verts);
            let gidx = self.space.simplex_index(&gverts).unwrap();
            let sslot = &ds.slots[ds.by_key[&(slot.dim, gidx, slot.k)]];
            if slot.k == 0 {
                a.push_entry(slot.offset as u32, sslot.offset, int(eps_idx));
                continue;
            }
            let star_t = &self.stars[slot.dim][slot.idx as usize];
            let star_s = &self.stars[slot.dim][gidx as usize];
            for b in 0..slot.len {
                let gid = star_t.members(slot.k - 1)[b];
                let tau = self.space.simplex(slot.k - 1, gid as usize);
                let (gtau, eps_tau) = act.act_simplex_signed(g, tau);
                let gtid = self.space.simplex_index(&gtau).unwrap();
                let pos = star_s
                    .position_of(slot.k - 1, gtid)
                    .expect("an automorphism maps star simplices into the image star");
                d.push_entry(
                    (slot.offset + b) as u32,
                    sslot.offset + pos,
                    Rat::from_integer(int(eps_idx * eps_tau)),
                );
            }
        }
        MixedMap { src: ds.space(), dst: ds.space(), a, c, d }
    }

    pub fn complex_window(&mut self, lo: isize, hi: isize) -> MixedComplex {
        assert!(lo <= hi);
        let spaces = (lo..=hi).map(|n| self.degree_space(n).space()).collect();
        let maps = (lo..hi).map(|n| self.differential(n)).collect();
        MixedComplex::new(lo, spaces, maps)
    }
}

pub fn ordinary_deligne(
    space: &SimplicialComplex,
    coeff_len: usize,
    m: isize,
    opts: &EngineOptions,
) -> Result<CohomologyResult, String> {
    Ok(ordinary_deligne_range(space, coeff_len, m, m, opts)?.pop().unwrap())
}

pub fn ordinary_deligne_range(
    space: &SimplicialComplex,
    coeff_len: usize,
    m_lo: isize,
    m_hi: isize,
    opts: &EngineOptions,
) -> Result<Vec<CohomologyResult>, String> {
    if m_lo < 0 || m_lo > m_hi {
        return Err(format!("bad degree range {}..={}", m_lo, m_hi));
    }
    let mut model = OrdinaryModel::new(space, coeff_len);
    for n in m_lo..=m_hi + 2 {
        let ds = model.degree_space(n);
        let total = ds.n_z + ds.n_q;
        if total > opts.max_coordinates {
            return Err(format!(
                "resource limit exceeded: total degree {} has {} coordinates (limit {})",
                n, total, opts.max_coordinates
            ));
        }
    }
    let cx = model.complex_window(m_lo, m_hi + 2);
    Ok((m_lo..=m_hi)
        .map(|m| {
            let classes = cx.cohomology_at(m + 1, opts.witnesses);
            CohomologyResult {
                m,
                coeff_len,
                group: classes.module.clone(),
                classes,
                conventions: CONVENTIONS,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group;
    use crate::simplicial;

    fn qz() -> MixedModule {
        MixedModule::new(0, 0, 1, vec![])
    }

    fn compute_trivial(space: &SimplicialComplex, n: usize, m: isize, normalized: bool) -> MixedModule {
        let a = SimplicialAction::trivial(group::trivial().unwrap(), space.clone());
        let opts = EngineOptions { normalized, ..Default::default() };
        equivariant_deligne(&a, n, m, &opts).unwrap().group
    }

    #[test]
    fn characters_of_cyclic_groups_on_a_point() {
        for n in [2usize, 3] {
            let a = SimplicialAction::trivial(group::cyclic(n).unwrap(), simplicial::point().unwrap());
            let r = equivariant_deligne(&a, 1, 1, &EngineOptions::default()).unwrap();
            assert_eq!(r.group, MixedModule::new(0, 0, 0, vec![int(n as i64)]));
        }
    }

    #[test]
    fn holonomy_on_the_circle() {
        let r = ordinary_deligne(&simplicial::circle(3).unwrap(), 1, 1, &EngineOptions::default())
            .unwrap();
        assert_eq!(r.group, qz());
    }

    #[test]
    fn gerbes_on_the_sphere() {
        let r = ordinary_deligne(&simplicial::octahedron().unwrap(), 2, 2, &EngineOptions::default())
            .unwrap();
        assert_eq!(r.group, qz());
        // top degree vanishes: H^3 here is H^4 of the sphere with integer
        // coefficients
        let r = ordinary_deligne(&simplicial::octahedron().unwrap(), 2, 3, &EngineOptions::default())
            .unwrap();
        assert!(r.group.is_zero());
    }

    #[test]
    fn shortest_coefficient_model_on_the_circle() {
        // N = 0 models the sheaf of smooth circle-valued functions.  In
        // degree zero that is the functions themselves: constants Q/Z, a
        // winding number Z, and a divisible complement Q^2 on three
        // vertices; in degree one it is H^2(circle, Z) = 0.
        let space = simplicial::circle(3).unwrap();
        let rs = ordinary_deligne_range(&space, 0, 0, 1, &EngineOptions::default()).unwrap();
        assert_eq!(rs[0].group, MixedModule::new(1, 2, 1, vec![]));
        assert!(rs[1].group.is_zero());

        let r = ordinary_deligne(&simplicial::point().unwrap(), 0, 0, &EngineOptions::default())
            .unwrap();
        assert_eq!(r.group, qz());
    }

    #[test]
    fn trivial_group_reduces_to_the_ordinary_pipeline() {
        let space = simplicial::circle(3).unwrap();
        let ord: Vec<MixedModule> = ordinary_deligne_range(&space, 1, 0, 2, &EngineOptions::default())
            .unwrap()
            .into_iter()
            .map(|r| r.group)
            .collect();
        for normalized in [false, true] {
            for m in 0..=2 {
                assert_eq!(
                    compute_trivial(&space, 1, m, normalized),
                    ord[m as usize],
                    "m = {}, normalized = {}",
                    m,
                    normalized
                );
            }
        }
    }

    #[test]
    fn pullbacks_are_chain_maps() {
        let actions = [
            SimplicialAction::from_generators(
                group::cyclic(2).unwrap(),
                simplicial::circle(4).unwrap(),
                &[(1, vec![2, 3, 0, 1])],
            )
            .unwrap(),
            SimplicialAction::from_generators(
                group::cyclic(2).unwrap(),
                simplicial::octahedron().unwrap(),
                &[(1, vec![1, 0, 3, 2, 5, 4])],
            )
            .unwrap(),
        ];
        for act in &actions {
            let mut ord = OrdinaryModel::new(&act.space, 1);
            for n in 0..=3 {
                let dn = ord.differential(n);
                for g in 0..act.group.order() as u8 {
                    let ag = ord.action_map(act, g, n);
                    let ag1 = ord.action_map(act, g, n + 1);
                    let lhs = dn.compose(&ag);
                    let rhs = ag1.compose(&dn);
                    for t in 0..dn.src.n_z + dn.src.n_q {
                        assert!(lhs.column(t).sub(&rhs.column(t)).is_zero(), "g = {}, n = {}", g, n);
                    }
                }
                // the nonidentity element is an involution, so its pullback is too
                let ag = ord.action_map(act, 1, n);
                let sq = ag.compose(&ag);
                let id = MixedMap::identity(sq.src);
                for t in 0..sq.src.n_z + sq.src.n_q {
                    assert!(sq.column(t).sub(&id.column(t)).is_zero(), "n = {}", n);
                }
            }
        }
    }

    #[test]
    fn resource_limit_is_reported() {
        let a = SimplicialAction::trivial(group::klein4().unwrap(), simplicial::point().unwrap());
        let opts = EngineOptions { max_coordinates: 3, ..Default::default() };
        let err = equivariant_deligne(&a, 1, 2, &opts).err().unwrap();
        assert!(err.contains("resource limit"), "{}", err);
    }
}
