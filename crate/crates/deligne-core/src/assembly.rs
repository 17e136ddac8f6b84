//! Assembly of the Cech triple complex computing equivariant Deligne
//! cohomology.
//!
//! The coefficient complex of length N is Z -> A^0 -> ... -> A^N, indexed by
//! a slot level k = 0..=N+1 (k = 0 is the integer slot, k >= 1 carries
//! rational (k-1)-cochains).  A coordinate of total degree n = i + j + k
//! lives on a slot (i, ghat, T, k): nerve level i, copy ghat in G^i, Cech
//! multi-index T of degree j, patch St(core(T)).  The total differential is
//!
//! D = del + (-1)^i delta + (-1)^{i+j} dtilde
//!
//! where del is the alternating sum of face-map pullbacks of the simplicial
//! manifold (the l-th term re-sorts the faced multi-index with its
//! permutation sign and, for l = i, translates the M-coordinate by g_i),
//! delta is the alternating Cech restriction sum, and dtilde is the unit
//! inclusion Z -> A^0 for k = 1 and the simplicial coboundary for k >= 2.
//! All entries are +-1, integral on the k = 0 block.
//!
//! Degenerate slots (copy with g_{l+1} = e whose every index component
//! repeats position l) form an acyclic direct summand; the normalized model
//! drops them and has the same cohomology, far fewer coordinates.

use rustc_hash::FxHashMap;

use crate::action::SimplicialAction;
use crate::cover::Cover;
use crate::exact::complex::MixedComplex;
use crate::exact::matrix::{int, Rat};
use crate::exact::mixed::{MixedMap, MixedSpace, MixedVec};
use crate::exact::sparse::{SpQ, SpZ};
use crate::group::{all_tuples, FiniteGroup};

/// One slot of the triple complex and where its coordinates live.
#[derive(Clone, Debug)]
pub struct Slot {
    /// copy tuple ghat; the nerve level is its length
    pub copy: Vec<u8>,
    /// Cech multi-index as increasing universe ranks; degree is len - 1
    pub ids: Vec<u32>,
    /// coefficient level 0..=N+1
    pub k: usize,
    /// patch handle for [`Cover::star`]
    pub patch: usize,
    /// first coordinate within the Z (k = 0) or Q (k >= 1) part
    pub offset: usize,
    pub len: usize,
}

type SlotKey = (Vec<u8>, Vec<u32>, usize);

/// All slots of one total degree, in deterministic enumeration order
/// (level, then coefficient slot, then copy, then multi-index).
#[derive(Clone, Debug, Default)]
pub struct DegreeSpace {
    pub slots: Vec<Slot>,
    pub by_key: FxHashMap<SlotKey, usize>,
    pub n_z: usize,
    pub n_q: usize,
}

impl DegreeSpace {
    pub fn space(&self) -> MixedSpace {
        MixedSpace::new(self.n_z, self.n_q)
    }
}

pub struct DeligneModel<'a> {
    /// N: the coefficient complex is Z -> A^0 -> ... -> A^N
    pub coeff_len: usize,
    pub normalized: bool,
    /// testing aid: miswire one face sign so that validation layers can
    /// demonstrate they detect a broken differential
    pub negative_control: bool,
    cover: Cover<'a>,
    degrees: FxHashMap<isize, DegreeSpace>,
}

impl<'a> DeligneModel<'a> {
    pub fn new(action: &'a SimplicialAction, coeff_len: usize, normalized: bool) -> Self {
        DeligneModel {
            coeff_len,
            normalized,
            negative_control: false,
            cover: Cover::new(action),
            degrees: FxHashMap::default(),
        }
    }

    pub fn action(&self) -> &'a SimplicialAction {
        self.cover.action
    }

    pub fn cover(&self) -> &Cover<'a> {
        &self.cover
    }

    pub fn degree_space(&mut self, n: isize) -> &DegreeSpace {
        self.ensure_degree(n);
        &self.degrees[&n]
    }

    fn ensure_degree(&mut self, n: isize) {
        if self.degrees.contains_key(&n) {
            return;
        }
        let mut ds = DegreeSpace::default();
        if n >= 0 {
            let n = n as usize;
            let ord = self.cover.action.group.order();
            for i in 0..=n {
                for k in 0..=usize::min(self.coeff_len + 1, n - i) {
                    let j = n - i - k;
                    for g in all_tuples(ord, i) {
                        for mi in self.cover.multi_indices(&g, j, self.normalized) {
                            let len = if k == 0 {
                                1
                            } else {
                                self.cover.star(mi.patch).n_simplices(k - 1)
                            };
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
                            ds.by_key.insert((g.clone(), mi.ids.clone(), k), ds.slots.len());
                            ds.slots.push(Slot {
                                copy: g.clone(),
                                ids: mi.ids,
                                k,
                                patch: mi.patch,
                                offset,
                                len,
                            });
                        }
                    }
                }
            }
        }
        self.degrees.insert(n, ds);
    }

    /// The total differential D: C^n -> C^{n+1}.
    pub fn differential(&mut self, n: isize) -> MixedMap {
        self.ensure_degree(n);
        self.ensure_degree(n + 1);
        let src = &self.degrees[&n];
        let tgt = &self.degrees[&(n + 1)];
        let action = self.cover.action;
        let group = &action.group;
        let space = &action.space;

        let mut a = SpZ::new(tgt.n_z, src.n_z);
        let mut c = SpQ::new(tgt.n_q, src.n_z);
        let mut d = SpQ::new(tgt.n_q, src.n_q);

        let on_missing = |key: &SlotKey| {
            // only the normalized model may drop a source (a degenerate slot)
            assert!(self.normalized, "source slot missing in the full model: {:?}", key);
        };

        for slot in &tgt.slots {
            let i = slot.copy.len();
            let j = slot.ids.len() - 1;
            let k = slot.k;
            let star_t = self.cover.star(slot.patch);

            // face-map pullbacks, with index faces re-sorted
            for l in 0..=i {
                if i == 0 {
                    break;
                }
                let fc = face_copy(group, &slot.copy, l);
                let tu = self.cover.universe_ref(&slot.copy);
                let su = self.cover.universe_ref(&fc);
                let mut sids: Vec<u32> = Vec::with_capacity(j + 1);
                for &id in &slot.ids {
                    let mut bp = tu.tuples[id as usize].clone();
                    bp.remove(l);
                    let r = su
                        .tuples
                        .binary_search(&bp)
                        .expect("index face keeps a nonempty patch");
                    sids.push(r as u32);
                }
                let Some(eps_sort) = sort_with_sign(&mut sids) else {
                    continue; // repeated components vanish in the alternating model
                };
                let key = (fc, sids, k);
                let Some(&si) = src.by_key.get(&key) else {
                    on_missing(&key);
                    continue;
                };
                let sslot = &src.slots[si];
                let mut sign = if l % 2 == 0 { eps_sort } else { -eps_sort };
                if self.negative_control && l == 1 {
                    sign = -sign;
                }
                if k == 0 {
                    a.push_entry(slot.offset as u32, sslot.offset, int(sign));
                } else {
                    let sstar = self.cover.star(sslot.patch);
                    let translate = l == i;
                    for b in 0..slot.len {
                        let gid = star_t.members(k - 1)[b];
                        let sigma = space.simplex(k - 1, gid as usize);
                        let (image, eg) = if translate {
                            action.act_simplex_signed(slot.copy[i - 1], sigma)
                        } else {
                            (sigma.to_vec(), 1)
                        };
                        let gid2 = space.simplex_index(&image).unwrap();
                        let pos = sstar
                            .position_of(k - 1, gid2)
                            .expect("face patch contains the translated simplex");
                        d.push_entry(
                            (slot.offset + b) as u32,
                            sslot.offset + pos,
                            Rat::from_integer(int(sign * eg)),
                        );
                    }
                }
            }

            // Cech restrictions, twisted by (-1)^i
            for m in 0..=j {
                if j == 0 {
                    break;
                }
                let mut sids = slot.ids.clone();
                sids.remove(m);
                let key = (slot.copy.clone(), sids, k);
                let Some(&si) = src.by_key.get(&key) else {
                    on_missing(&key);
                    continue;
                };
                let sslot = &src.slots[si];
                let sign = if (i + m) % 2 == 0 { 1 } else { -1 };
                if k == 0 {
                    a.push_entry(slot.offset as u32, sslot.offset, int(sign));
                } else {
                    let sstar = self.cover.star(sslot.patch);
                    for b in 0..slot.len {
                        let gid = star_t.members(k - 1)[b];
                        let pos = sstar
                            .position_of(k - 1, gid)
                            .expect("larger patch contains the simplex");
                        d.push_entry(
                            (slot.offset + b) as u32,
                            sslot.offset + pos,
                            Rat::from_integer(int(sign)),
                        );
                    }
                }
            }

            // coefficient differential, twisted by (-1)^{i+j}
            if k >= 1 {
                let key = (slot.copy.clone(), slot.ids.clone(), k - 1);
                let Some(&si) = src.by_key.get(&key) else {
                    on_missing(&key);
                    continue;
                };
                let sslot = &src.slots[si];
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
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
                        let sigma = space.simplex(k - 1, gid as usize);
                        for l in 0..sigma.len() {
                            let mut face = sigma.to_vec();
                            face.remove(l);
                            let gidf = space.simplex_index(&face).unwrap();
                            let pos = star_t
                                .position_of(k - 2, gidf)
                                .expect("patch is closed under faces");
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

    /// The total complex over a degree window.  Cohomology read from the
    /// result is meaningful at degrees lo+1 ..= hi-1, where both the
    /// incoming and the outgoing differential are present.
    pub fn complex_window(&mut self, lo: isize, hi: isize) -> MixedComplex {
        assert!(lo <= hi);
        let spaces = (lo..=hi).map(|n| self.degree_space(n).space()).collect();
        let maps = (lo..hi).map(|n| self.differential(n)).collect();
        MixedComplex::new(lo, spaces, maps)
    }

    /// A random cochain with small entries, for differential self-checks.
    pub fn random_cochain(&mut self, n: isize, rng: &mut impl rand::Rng) -> MixedVec {
        let s = self.degree_space(n).space();
        let mut v = MixedVec::zero(s);
        for z in v.z.iter_mut() {
            *z = int(rng.gen_range(-3..=3));
        }
        for q in v.q.iter_mut() {
            *q = Rat::new(int(rng.gen_range(-6..=6)), int(rng.gen_range(1..=4)));
        }
        v
    }
}

/// The copy tuple of the l-th face: drop g_1, merge adjacent, or drop g_i.
pub(crate) fn face_copy(group: &FiniteGroup, g: &[u8], l: usize) -> Vec<u8> {
    let i = g.len();
    let mut out = g.to_vec();
    if l == 0 {
        out.remove(0);
    } else if l < i {
        out[l - 1] = group.mul(out[l - 1], out[l]);
        out.remove(l);
    } else {
        out.pop();
    }
    out
}

/// Sorts in place and returns the permutation sign, or None on duplicates.
fn sort_with_sign<T: Ord>(items: &mut [T]) -> Option<i64> {
    let mut sign = 1i64;
    for i in 1..items.len() {
        let mut p = i;
        while p > 0 && items[p] < items[p - 1] {
            items.swap(p, p - 1);
            sign = -sign;
            p -= 1;
        }
    }
    if items.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::complex::Witnesses;
    use crate::exact::module::MixedModule;
    use crate::group;
    use crate::simplicial;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn trivial_on(m: crate::simplicial::SimplicialComplex) -> SimplicialAction {
        SimplicialAction::trivial(group::trivial().unwrap(), m)
    }

    fn z2_point() -> SimplicialAction {
        SimplicialAction::trivial(group::cyclic(2).unwrap(), simplicial::point().unwrap())
    }

    fn square_rotation() -> SimplicialAction {
        SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            simplicial::circle(4).unwrap(),
            &[(1, vec![2, 3, 0, 1])],
        )
        .unwrap()
    }

    #[test]
    fn slot_dimensions_on_a_point() {
        // On a point every patch is the point, so the Cech degree is forced
        // to zero and the k >= 2 slots vanish (no positive-degree
        // simplices).  Degree n therefore carries the k = 0 slot of level n
        // (Z-dim |G|^n) and the k = 1 slot of level n-1 (Q-dim |G|^{n-1}).
        let a = z2_point();
        let mut model = DeligneModel::new(&a, 1, false);
        let dims: Vec<(usize, usize)> = (0..=3)
            .map(|n| {
                let ds = model.degree_space(n);
                (ds.n_z, ds.n_q)
            })
            .collect();
        assert_eq!(dims, vec![(1, 0), (2, 1), (4, 2), (8, 4)]);

        // normalized: only copies with no identity entries survive, and for
        // Z/2 that is one copy (g, ..., g) per level
        let mut model = DeligneModel::new(&a, 1, true);
        let dims: Vec<(usize, usize)> = (0..=3)
            .map(|n| {
                let ds = model.degree_space(n);
                (ds.n_z, ds.n_q)
            })
            .collect();
        assert_eq!(dims, vec![(1, 0), (1, 1), (1, 1), (1, 1)]);
    }

    #[test]
    fn form_slots_live_on_vertex_stars() {
        // trivial group on the hollow triangle: the level-0, Cech-degree-0,
        // k = 2 slots are 1-cochains on the three vertex stars, two edges
        // each
        let a = trivial_on(simplicial::circle(3).unwrap());
        let mut model = DeligneModel::new(&a, 1, false);
        let cover_lens: Vec<usize> = {
            let ds = model.degree_space(2);
            ds.slots
                .iter()
                .filter(|s| s.copy.is_empty() && s.ids.len() == 1 && s.k == 2)
                .map(|s| s.len)
                .collect()
        };
        assert_eq!(cover_lens, vec![2, 2, 2]);
    }

    #[test]
    fn differential_squares_to_zero_on_random_cochains() {
        let fixtures: Vec<(SimplicialAction, usize)> = vec![
            (trivial_on(simplicial::circle(3).unwrap()), 1),
            (square_rotation(), 1),
            (
                SimplicialAction::trivial(group::klein4().unwrap(), simplicial::point().unwrap()),
                1,
            ),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (a, n_len) in &fixtures {
            for normalized in [false, true] {
                let mut model = DeligneModel::new(a, *n_len, normalized);
                for n in 0..=2isize {
                    let d0 = model.differential(n);
                    let d1 = model.differential(n + 1);
                    for _ in 0..5 {
                        let x = model.random_cochain(n, &mut rng);
                        assert!(
                            d1.apply(&d0.apply(&x)).is_zero(),
                            "D^2 != 0 at degree {} (normalized = {})",
                            n,
                            normalized
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn antipodal_sphere_differential_squares_to_zero() {
        let a = SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            simplicial::octahedron().unwrap(),
            &[(1, vec![1, 0, 3, 2, 5, 4])],
        )
        .unwrap();
        let mut model = DeligneModel::new(&a, 2, true);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for n in 0..=2isize {
            let d0 = model.differential(n);
            let d1 = model.differential(n + 1);
            for _ in 0..3 {
                let x = model.random_cochain(n, &mut rng);
                assert!(d1.apply(&d0.apply(&x)).is_zero());
            }
        }
    }

    #[test]
    fn negative_control_breaks_the_differential() {
        let a = trivial_on(simplicial::point().unwrap());
        let mut model = DeligneModel::new(&a, 1, false);
        model.negative_control = true;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut caught = false;
        for n in 0..=2isize {
            let d0 = model.differential(n);
            let d1 = model.differential(n + 1);
            for _ in 0..5 {
                let x = model.random_cochain(n, &mut rng);
                if !d1.apply(&d0.apply(&x)).is_zero() {
                    caught = true;
                }
            }
        }
        assert!(caught, "the deliberately miswired sign must be detectable");
    }

    #[test]
    fn normalized_and_full_models_agree() {
        let qz = MixedModule::new(0, 0, 1, vec![]);
        // trivial group on the triangle circle, N = 1: degrees 1 and 2 of
        // the total complex both give Q/Z
        let a = trivial_on(simplicial::circle(3).unwrap());
        let mut results = Vec::new();
        for normalized in [false, true] {
            let mut model = DeligneModel::new(&a, 1, normalized);
            let cx = model.complex_window(0, 4);
            cx.check_dsquared().unwrap();
            results.push((
                cx.cohomology_at(1, Witnesses::Drop).module,
                cx.cohomology_at(2, Witnesses::Drop).module,
            ));
        }
        assert_eq!(results[0], results[1]);
        assert_eq!(results[0].0, qz);
        assert_eq!(results[0].1, qz);

        // Z/2 on a point, N = 1: compare the two models degreewise
        let a = z2_point();
        let mut got = Vec::new();
        for normalized in [false, true] {
            let mut model = DeligneModel::new(&a, 1, normalized);
            let cx = model.complex_window(0, 4);
            got.push((
                cx.cohomology_at(1, Witnesses::Drop).module,
                cx.cohomology_at(2, Witnesses::Drop).module,
                cx.cohomology_at(3, Witnesses::Drop).module,
            ));
        }
        assert_eq!(got[0], got[1]);
    }
}
