//! Equivariant integer cohomology H^m_G(M; Z) via the double complex of
//! integer simplicial cochains on the levels G^i x M, with the
//! group-direction face maps in one direction and the simplicial coboundary
//! in the other.  Unlike the Deligne drivers there is no degree shift:
//! H^m_G is degree m of the total complex.
//!
//! Coupling the integer model in degree t with a rational copy in degree
//! t - 1 through D(z, f) = (Dz, z - Df) gives the same complex with
//! constant circle coefficients, H^m_G(M; T) for T = Q/Z, in degree m + 1.
//!
//! For actions whose orbit space is again a simplicial complex the quotient
//! gives an independent oracle: a free action has H^m_G(M) = H^m(M/G).

use rustc_hash::FxHashMap;

use crate::action::SimplicialAction;
use crate::assembly::face_copy;
use crate::exact::complex::{MixedComplex, Witnesses};
use crate::exact::matrix::{int, Rat};
use num_traits::One;
use crate::exact::mixed::{MixedMap, MixedSpace};
use crate::exact::module::MixedModule;
use crate::exact::sparse::{SpQ, SpZ};
use crate::group::all_tuples;
use crate::simplicial::SimplicialComplex;

#[derive(Clone, Debug)]
pub struct IntSlot {
    pub copy: Vec<u8>,
    /// cochain degree on the space
    pub q: usize,
    pub offset: usize,
    pub len: usize,
}

#[derive(Clone, Debug, Default)]
pub struct IntDegree {
    pub slots: Vec<IntSlot>,
    pub by_key: FxHashMap<(Vec<u8>, usize), usize>,
    pub n_z: usize,
}

pub struct IntegralModel<'a> {
    pub action: &'a SimplicialAction,
    pub normalized: bool,
    degrees: FxHashMap<isize, IntDegree>,
}

impl<'a> IntegralModel<'a> {
    pub fn new(action: &'a SimplicialAction, normalized: bool) -> Self {
        IntegralModel { action, normalized, degrees: FxHashMap::default() }
    }

    pub fn degree_space(&mut self, n: isize) -> &IntDegree {
        if !self.degrees.contains_key(&n) {
            let mut ds = IntDegree::default();
            if n >= 0 {
                let n = n as usize;
                let ord = self.action.group.order();
                let e = self.action.group.identity();
                for i in 0..=n {
                    let q = n - i;
                    if q > self.action.space.dim() {
                        continue;
                    }
                    let len = self.action.space.n_simplices(q);
                    for g in all_tuples(ord, i) {
                        if self.normalized && g.contains(&e) {
                            continue;
                        }
                        ds.by_key.insert((g.clone(), q), ds.slots.len());
                        ds.slots.push(IntSlot { copy: g.clone(), q, offset: ds.n_z, len });
                        ds.n_z += len;
                    }
                }
            }
            self.degrees.insert(n, ds);
        }
        &self.degrees[&n]
    }

    pub fn differential(&mut self, n: isize) -> MixedMap {
        self.degree_space(n);
        self.degree_space(n + 1);
        let src = &self.degrees[&n];
        let tgt = &self.degrees[&(n + 1)];
        let action = self.action;
        let space = &action.space;
        let mut a = SpZ::new(tgt.n_z, src.n_z);

        for slot in &tgt.slots {
            let i = slot.copy.len();
            let q = slot.q;

            if i >= 1 {
                for l in 0..=i {
                    let fc = face_copy(&action.group, &slot.copy, l);
                    let Some(&si) = src.by_key.get(&(fc, q)) else {
                        assert!(self.normalized, "missing face slot in the full model");
                        continue;
                    };
                    let sslot = &src.slots[si];
                    let sign = if l % 2 == 0 { 1 } else { -1 };
                    if l == i {
                        for b in 0..slot.len {
                            let sigma = space.simplex(q, b);
                            let (image, eg) = action.act_simplex_signed(slot.copy[i - 1], sigma);
                            let pos = space.simplex_index(&image).unwrap() as usize;
                            a.push_entry(
                                (slot.offset + b) as u32,
                                sslot.offset + pos,
                                int(sign * eg),
                            );
                        }
                    } else {
                        for b in 0..slot.len {
                            a.push_entry((slot.offset + b) as u32, sslot.offset + b, int(sign));
                        }
                    }
                }
            }

            if q >= 1 {
                let si = src.by_key[&(slot.copy.clone(), q - 1)];
                let sslot = &src.slots[si];
                let sign = if i % 2 == 0 { 1 } else { -1 };
                for b in 0..slot.len {
                    let sigma = space.simplex(q, b);
                    for l in 0..sigma.len() {
                        let mut face = sigma.to_vec();
                        face.remove(l);
                        let pos = space.simplex_index(&face).unwrap() as usize;
                        let s = if l % 2 == 0 { sign } else { -sign };
                        a.push_entry((slot.offset + b) as u32, sslot.offset + pos, int(s));
                    }
                }
            }
        }

        MixedMap {
            src: MixedSpace::new(src.n_z, 0),
            dst: MixedSpace::new(tgt.n_z, 0),
            a,
            c: SpQ::new(0, src.n_z),
            d: SpQ::new(0, 0),
        }
    }

    pub fn complex_window(&mut self, lo: isize, hi: isize) -> MixedComplex {
        assert!(lo <= hi);
        let spaces = (lo..=hi).map(|n| MixedSpace::new(self.degree_space(n).n_z, 0)).collect();
        let maps = (lo..hi).map(|n| self.differential(n)).collect();
        MixedComplex::new(lo, spaces, maps)
    }
}

pub fn equivariant_integral_cohomology(action: &SimplicialAction, m: isize) -> MixedModule {
    if m < 0 {
        return MixedModule::new(0, 0, 0, vec![]);
    }
    let mut model = IntegralModel::new(action, true);
    let cx = model.complex_window((m - 1).max(0), m + 1);
    cx.cohomology_at(m, Witnesses::Drop).module
}

/// The coupled complex with constant circle coefficients over the window
/// lo..=hi of machine degrees.
pub fn circle_borel_window(model: &mut IntegralModel, lo: isize, hi: isize) -> MixedComplex {
    assert!((0..=hi).contains(&lo));
    let spaces: Vec<MixedSpace> = (lo..=hi)
        .map(|t| MixedSpace::new(model.degree_space(t).n_z, model.degree_space(t - 1).n_z))
        .collect();
    let mut maps = Vec::with_capacity((hi - lo) as usize);
    for t in lo..hi {
        let dz = model.differential(t);
        let prev = model.differential(t - 1);
        let src = spaces[(t - lo) as usize];
        let dst = spaces[(t - lo + 1) as usize];
        let mut c = SpQ::new(dst.n_q, src.n_z);
        for i in 0..src.n_z {
            c.push_entry(i as u32, i, Rat::one());
        }
        let mut d = SpQ::new(dst.n_q, src.n_q);
        for (col, cv) in prev.a.cols.iter().enumerate() {
            for (row, v) in cv {
                d.push_entry(*row, col, -Rat::from_integer(v.clone()));
            }
        }
        maps.push(MixedMap { src, dst, a: dz.a, c, d });
    }
    MixedComplex::new(lo, spaces, maps)
}

/// H^m_G(M; T) for the constant circle T = Q/Z.
pub fn equivariant_circle_cohomology(action: &SimplicialAction, m: isize) -> MixedModule {
    if m < 0 {
        return MixedModule::new(0, 0, 0, vec![]);
    }
    let mut model = IntegralModel::new(action, true);
    let cx = circle_borel_window(&mut model, m, m + 2);
    cx.cohomology_at(m + 1, Witnesses::Drop).module
}

/// The orbit complex of the action, when it is again a simplicial complex
/// presenting the orbit space: the action must not identify vertices within
/// a facet, and facets with the same image must lie in one orbit.  Free
/// actions that fail these conditions need a subdivision first.
pub fn quotient_complex(action: &SimplicialAction) -> Result<SimplicialComplex, String> {
    let space = &action.space;
    let group = &action.group;
    let nv = space.n_vertices();
    // orbit representative = least vertex in the orbit
    let mut rep: Vec<u32> = (0..nv as u32).collect();
    for v in 0..nv as u32 {
        for g in 0..group.order() as u8 {
            let w = action.act_vertex(g, v);
            if w < rep[v as usize] {
                rep[v as usize] = w;
            }
        }
    }
    for f in space.facets() {
        let mut image: Vec<u32> = f.iter().map(|&v| rep[v as usize]).collect();
        image.sort_unstable();
        image.dedup();
        if image.len() != f.len() {
            return Err(format!(
                "quotient is not simplicial: facet {} has identified vertices",
                space.simplex_label(f)
            ));
        }
    }
    for (fi, f) in space.facets().iter().enumerate() {
        for f2 in space.facets().iter().skip(fi + 1) {
            let mut i1: Vec<u32> = f.iter().map(|&v| rep[v as usize]).collect();
            let mut i2: Vec<u32> = f2.iter().map(|&v| rep[v as usize]).collect();
            i1.sort_unstable();
            i2.sort_unstable();
            if i1 != i2 {
                continue;
            }
            let in_orbit = (0..group.order() as u8).any(|g| {
                let mut img: Vec<u32> = f.iter().map(|&v| action.act_vertex(g, v)).collect();
                img.sort_unstable();
                img == *f2
            });
            if !in_orbit {
                return Err(format!(
                    "quotient is not simplicial: facets {} and {} collapse together",
                    space.simplex_label(f),
                    space.simplex_label(f2)
                ));
            }
        }
    }
    let mut reps: Vec<u32> = rep.iter().copied().collect();
    reps.sort_unstable();
    reps.dedup();
    let names: Vec<String> = reps.iter().map(|&v| space.label(v).to_string()).collect();
    let mut facets: Vec<Vec<String>> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for f in space.facets() {
        let mut image: Vec<u32> = f.iter().map(|&v| rep[v as usize]).collect();
        image.sort_unstable();
        if seen.insert(image.clone()) {
            facets.push(image.iter().map(|&v| space.label(v).to_string()).collect());
        }
    }
    SimplicialComplex::from_labeled(names, &facets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group;
    use crate::simplicial;

    fn z2_rotation() -> SimplicialAction {
        SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            simplicial::circle(4).unwrap(),
            &[(1, vec![2, 3, 0, 1])],
        )
        .unwrap()
    }

    fn antipodal() -> SimplicialAction {
        SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            simplicial::octahedron().unwrap(),
            &[(1, vec![1, 0, 3, 2, 5, 4])],
        )
        .unwrap()
    }

    #[test]
    fn classifying_space_of_z2() {
        let a = SimplicialAction::trivial(group::cyclic(2).unwrap(), simplicial::point().unwrap());
        let got: Vec<MixedModule> =
            (0..=4).map(|m| equivariant_integral_cohomology(&a, m)).collect();
        assert_eq!(got[0], MixedModule::new(1, 0, 0, vec![]));
        assert!(got[1].is_zero());
        assert_eq!(got[2], MixedModule::new(0, 0, 0, vec![int(2)]));
        assert!(got[3].is_zero());
        assert_eq!(got[4], MixedModule::new(0, 0, 0, vec![int(2)]));
    }

    #[test]
    fn trivial_action_recovers_the_space() {
        let space = simplicial::octahedron().unwrap();
        let a = SimplicialAction::trivial(group::trivial().unwrap(), space.clone());
        for m in 0..=3 {
            assert_eq!(
                equivariant_integral_cohomology(&a, m),
                simplicial::cohomology_z(&space, m as usize),
                "m = {}",
                m
            );
        }
    }

    #[test]
    fn free_rotation_looks_like_the_circle() {
        let a = z2_rotation();
        let expect = [
            MixedModule::new(1, 0, 0, vec![]),
            MixedModule::new(1, 0, 0, vec![]),
            MixedModule::new(0, 0, 0, vec![]),
            MixedModule::new(0, 0, 0, vec![]),
        ];
        for m in 0..=3isize {
            assert_eq!(equivariant_integral_cohomology(&a, m), expect[m as usize], "m = {}", m);
        }
    }

    #[test]
    fn antipodal_action_computes_projective_space() {
        let a = antipodal();
        let rp2 = simplicial::projective_plane().unwrap();
        for m in 0..=2 {
            assert_eq!(
                equivariant_integral_cohomology(&a, m),
                simplicial::cohomology_z(&rp2, m as usize),
                "m = {}",
                m
            );
        }
    }

    #[test]
    fn full_and_normalized_integral_models_agree() {
        let a = z2_rotation();
        for m in 0..=2isize {
            let mut full = IntegralModel::new(&a, false);
            let mut norm = IntegralModel::new(&a, true);
            let lo = (m - 1).max(0);
            assert_eq!(
                full.complex_window(lo, m + 1).cohomology_at(m, Witnesses::Drop).module,
                norm.complex_window(lo, m + 1).cohomology_at(m, Witnesses::Drop).module
            );
        }
    }

    #[test]
    fn circle_coefficients_on_a_point_compute_group_cohomology() {
        use crate::group_cohomology::{group_cohomology, GModule};
        for n in [2usize, 3] {
            let g = group::cyclic(n).unwrap();
            let a = SimplicialAction::trivial(g.clone(), simplicial::point().unwrap());
            let gm = GModule::qz_trivial(g);
            for m in 0..=3isize {
                assert_eq!(
                    equivariant_circle_cohomology(&a, m),
                    group_cohomology(&gm, m),
                    "n = {}, m = {}",
                    n,
                    m
                );
            }
        }
    }

    #[test]
    fn circle_coefficients_with_a_trivial_group_recover_the_space() {
        let space = simplicial::octahedron().unwrap();
        let a = SimplicialAction::trivial(group::trivial().unwrap(), space.clone());
        for m in 0..=2 {
            assert_eq!(
                equivariant_circle_cohomology(&a, m),
                simplicial::circle_cohomology(&space, m as usize),
                "m = {}",
                m
            );
        }
    }

    #[test]
    fn circle_coefficients_of_a_free_action_see_the_quotient() {
        let a = SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            simplicial::circle(8).unwrap(),
            &[(1, vec![4, 5, 6, 7, 0, 1, 2, 3])],
        )
        .unwrap();
        let q = quotient_complex(&a).unwrap();
        for m in 0..=2isize {
            assert_eq!(
                equivariant_circle_cohomology(&a, m),
                simplicial::circle_cohomology(&q, m as usize),
                "m = {}",
                m
            );
        }
    }

    #[test]
    fn quotients_of_free_rotations() {
        // rotation by a third of the 9-gon: quotient is the triangle
        let a = SimplicialAction::from_generators(
            group::cyclic(3).unwrap(),
            simplicial::circle(9).unwrap(),
            &[(1, vec![3, 4, 5, 6, 7, 8, 0, 1, 2])],
        )
        .unwrap();
        let q = quotient_complex(&a).unwrap();
        assert_eq!(q.n_vertices(), 3);
        assert_eq!(q.facets().len(), 3);

        // the quotient of the octagon by rotation-by-four is the square,
        // and its cohomology matches the Borel-style double complex of the
        // coarser square model of the same action
        let a = SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            simplicial::circle(8).unwrap(),
            &[(1, vec![4, 5, 6, 7, 0, 1, 2, 3])],
        )
        .unwrap();
        let q = quotient_complex(&a).unwrap();
        assert_eq!(q.n_vertices(), 4);
        assert_eq!(q.facets().len(), 4);
        for m in 0..=3isize {
            assert_eq!(
                simplicial::cohomology_z(&q, m as usize),
                equivariant_integral_cohomology(&z2_rotation(), m),
                "m = {}",
                m
            );
        }
    }

    #[test]
    fn degenerate_quotients_are_rejected() {
        // rotation by half of the square: the two edges at a vertex fall
        // into one image edge
        let err = quotient_complex(&z2_rotation()).err().unwrap();
        assert!(err.contains("collapse"), "{}", err);

        // antipodal sphere: distinct facets collapse in the quotient
        let err = quotient_complex(&antipodal()).err().unwrap();
        assert!(err.contains("not simplicial"), "{}", err);

        // reflection of a segment: vertices of a facet identified
        let seg = SimplicialComplex::from_facets(2, vec![vec![0, 1]]).unwrap();
        let a = SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            seg,
            &[(1, vec![1, 0])],
        )
        .unwrap();
        let err = quotient_complex(&a).err().unwrap();
        assert!(err.contains("identified"), "{}", err);
    }
}
