//! The inductive star cover of G^p x M and its resolution into patches.
//!
//! The cover of M is the star cover of its triangulation, indexed by
//! vertices; the cover of G^p x M is indexed by A^{p+1} (tuples of vertices)
//! and defined inductively as the intersection of face-map preimages of the
//! level p-1 cover.  Unwinding the recursion gives a closed formula for a
//! copy (g_1..g_p) and an index tuple B = (a_0..a_p):
//!
//! U_B = st(S),  S = { h_r^{-1} a_r : r = 0..p },  h_r = g_{r+1} g_{r+2} ... g_p
//!
//! (h_p = e), where st is the *open* star, the set of simplices containing S.
//! Open stars obey st(S) n st(T) = st(S u T), so a Cech multi-index — a
//! strictly increasing (j+1)-tuple of index tuples — resolves to the union
//! of the component cores; the intersection is nonempty exactly when that
//! union lies in a common facet.  Cochains on the open set are modeled on
//! its *closed* star, the subcomplex of all faces of its members, which is
//! contractible with functorial restrictions.  Enumeration runs over
//! products of translated facets, h_0 F x ... x h_p F, with set-level
//! deduplication.
//!
//! A slot is *degenerate* when its copy has g_{l+1} = e and every component
//! index repeats position l, i.e. it lies in the image of a degeneracy of
//! both the nerve and the index simplicial set; the normalized model skips
//! those.

use std::collections::{BTreeSet, HashMap};

use crate::action::SimplicialAction;
use crate::simplicial::StarSubcomplex;

/// Resolved core of one index tuple: S = { h_r^{-1} a_r }.
pub fn index_core(a: &SimplicialAction, beta: &[u32], g: &[u8]) -> Vec<u32> {
    assert_eq!(beta.len(), g.len() + 1, "index tuple must have level+1 entries");
    let mut h = a.group.identity();
    let mut core = Vec::with_capacity(beta.len());
    for r in (0..beta.len()).rev() {
        core.push(a.act_vertex(a.group.inv(h), beta[r]));
        if r > 0 {
            h = a.group.mul(g[r - 1], h);
        }
    }
    core.sort_unstable();
    core.dedup();
    core
}

/// All index tuples with nonempty patch in one copy, with their resolved
/// data.  Tuples are listed in lexicographic order and referred to by rank.
pub struct Universe {
    pub tuples: Vec<Vec<u32>>,
    pub cores: Vec<Vec<u32>>,
    /// patch handle per tuple, for [`Cover::star`]
    pub patch: Vec<usize>,
    /// per facet of M: increasing ranks of the tuples whose core it contains
    pub per_facet: Vec<Vec<u32>>,
    /// bit l set when the copy has g_{l+1} = e
    e_mask: u32,
    /// bit l set when the tuple repeats position l
    repeat_mask: Vec<u32>,
}

/// A Cech multi-index with its resolved patch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIndex {
    /// increasing ranks into the universe of the same (copy, level)
    pub ids: Vec<u32>,
    /// union of the component cores
    pub core: Vec<u32>,
    /// patch handle for [`Cover::star`]
    pub patch: usize,
}

/// Memoized patch resolution for one action.  Patches are shared by core,
/// so equal cores across copies and levels resolve to one subcomplex.
pub struct Cover<'a> {
    pub action: &'a SimplicialAction,
    universes: HashMap<Vec<u8>, Universe>,
    multi: HashMap<(Vec<u8>, usize, bool), Vec<MultiIndex>>,
    patches: Vec<StarSubcomplex>,
    patch_ids: HashMap<Vec<u32>, usize>,
}

impl<'a> Cover<'a> {
    pub fn new(action: &'a SimplicialAction) -> Self {
        Cover {
            action,
            universes: HashMap::new(),
            multi: HashMap::new(),
            patches: Vec::new(),
            patch_ids: HashMap::new(),
        }
    }

    pub fn star(&self, patch: usize) -> &StarSubcomplex {
        &self.patches[patch]
    }

    /// Patch handle of the closed star of a core, memoized.
    pub fn patch_of_core(&mut self, core: &[u32]) -> usize {
        if let Some(&i) = self.patch_ids.get(core) {
            return i;
        }
        let st = self
            .action
            .space
            .closed_star(core)
            .expect("cores consist of valid vertices");
        let i = self.patches.len();
        self.patches.push(st);
        self.patch_ids.insert(core.to_vec(), i);
        i
    }

    pub fn universe(&mut self, g: &[u8]) -> &Universe {
        self.prepare(g);
        &self.universes[g]
    }

    /// Immutable access to an already-built universe; see [`Cover::universe`].
    pub fn universe_ref(&self, g: &[u8]) -> &Universe {
        self.universes.get(g).expect("universe not prepared")
    }

    /// Rank of an index tuple in the universe of `g`, if its patch is
    /// nonempty there.
    pub fn rank_of(&mut self, g: &[u8], tuple: &[u32]) -> Option<u32> {
        self.prepare(g);
        let u = &self.universes[g];
        u.tuples.binary_search_by(|t| t.as_slice().cmp(tuple)).ok().map(|i| i as u32)
    }

    fn prepare(&mut self, g: &[u8]) {
        if self.universes.contains_key(g) {
            return;
        }
        let a = self.action;
        let p = g.len();
        let group = &a.group;
        let mut h = vec![group.identity(); p + 1];
        for r in (0..p).rev() {
            h[r] = group.mul(g[r], h[r + 1]);
        }

        // tuples per facet: the product of the translated facets h_r F
        let facets = a.space.facets();
        let mut set: BTreeSet<Vec<u32>> = BTreeSet::new();
        let mut raw_per_facet: Vec<Vec<Vec<u32>>> = Vec::with_capacity(facets.len());
        for f in facets {
            let translated: Vec<Vec<u32>> = (0..=p)
                .map(|r| f.iter().map(|&v| a.act_vertex(h[r], v)).collect())
                .collect();
            let mut tuples = vec![Vec::new()];
            for level in &translated {
                let mut next = Vec::with_capacity(tuples.len() * level.len());
                for t in &tuples {
                    for &v in level {
                        let mut u = t.clone();
                        u.push(v);
                        next.push(u);
                    }
                }
                tuples = next;
            }
            set.extend(tuples.iter().cloned());
            raw_per_facet.push(tuples);
        }
        let tuples: Vec<Vec<u32>> = set.into_iter().collect();
        let rank = |t: &[u32]| {
            tuples.binary_search_by(|u| u.as_slice().cmp(t)).expect("tuple came from the set") as u32
        };
        let per_facet: Vec<Vec<u32>> = raw_per_facet
            .into_iter()
            .map(|ts| {
                let mut ids: Vec<u32> = ts.iter().map(|t| rank(t)).collect();
                ids.sort_unstable();
                ids.dedup();
                ids
            })
            .collect();

        let cores: Vec<Vec<u32>> = tuples.iter().map(|t| index_core(a, t, g)).collect();
        let patch: Vec<usize> = cores.iter().map(|c| self.patch_of_core(c)).collect();
        let repeat_mask: Vec<u32> = tuples
            .iter()
            .map(|t| {
                let mut m = 0u32;
                for l in 0..p {
                    if t[l] == t[l + 1] {
                        m |= 1 << l;
                    }
                }
                m
            })
            .collect();
        let mut e_mask = 0u32;
        for (l, &gl) in g.iter().enumerate() {
            if gl == group.identity() {
                e_mask |= 1 << l;
            }
        }

        self.universes.insert(
            g.to_vec(),
            Universe { tuples, cores, patch, per_facet, e_mask, repeat_mask },
        );
    }

    /// All degree-j multi-indices with nonempty patch in copy `g`, in
    /// lexicographic order of their rank tuples.  With `normalized` the
    /// degenerate ones are skipped.
    pub fn multi_indices(&mut self, g: &[u8], j: usize, normalized: bool) -> Vec<MultiIndex> {
        let key = (g.to_vec(), j, normalized);
        if let Some(cached) = self.multi.get(&key) {
            return cached.clone();
        }
        self.prepare(g);
        let u = &self.universes[g];
        let mut keep: BTreeSet<Vec<u32>> = BTreeSet::new();
        let mut buf = Vec::with_capacity(j + 1);
        for ids in &u.per_facet {
            combinations(ids, j + 1, &mut buf, &mut |chosen| {
                if normalized {
                    let mut and = u32::MAX;
                    for &id in chosen {
                        and &= u.repeat_mask[id as usize];
                    }
                    if and & u.e_mask != 0 {
                        return;
                    }
                }
                if !keep.contains(chosen) {
                    keep.insert(chosen.to_vec());
                }
            });
        }
        let resolved: Vec<(Vec<u32>, Vec<u32>)> = keep
            .into_iter()
            .map(|ids| {
                let mut core: Vec<u32> = Vec::new();
                for &id in &ids {
                    core.extend_from_slice(&u.cores[id as usize]);
                }
                core.sort_unstable();
                core.dedup();
                (ids, core)
            })
            .collect();
        let out: Vec<MultiIndex> = resolved
            .into_iter()
            .map(|(ids, core)| {
                let patch = self.patch_of_core(&core);
                MultiIndex { ids, core, patch }
            })
            .collect();
        self.multi.insert(key, out.clone());
        out
    }
}

fn combinations(items: &[u32], k: usize, buf: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if buf.len() == k {
        f(buf);
        return;
    }
    let need = k - buf.len();
    if items.len() < need {
        return;
    }
    for i in 0..=items.len() - need {
        buf.push(items[i]);
        combinations(&items[i + 1..], k, buf, f);
        buf.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group;
    use crate::simplicial;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square_rotation() -> SimplicialAction {
        SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            simplicial::circle(4).unwrap(),
            &[(1, vec![2, 3, 0, 1])],
        )
        .unwrap()
    }

    fn antipodal_octahedron() -> SimplicialAction {
        SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            simplicial::octahedron().unwrap(),
            &[(1, vec![1, 0, 3, 2, 5, 4])],
        )
        .unwrap()
    }

    fn rotation_triangle() -> SimplicialAction {
        SimplicialAction::from_generators(
            group::cyclic(3).unwrap(),
            simplicial::circle(3).unwrap(),
            &[(1, vec![1, 2, 0])],
        )
        .unwrap()
    }

    /// The open star st(S) = { sigma in K : S is a subset of sigma }, the
    /// actual open set whose cochain model is the closed star.
    fn open_star(a: &SimplicialAction, s: &[u32]) -> BTreeSet<Vec<u32>> {
        let mut out = BTreeSet::new();
        for d in 0..=a.space.dim() {
            for sigma in a.space.simplices_of(d) {
                if s.iter().all(|v| sigma.binary_search(v).is_ok()) {
                    out.insert(sigma.clone());
                }
            }
        }
        out
    }

    /// Reference implementation of the inductive cover: intersect the
    /// face-map preimages of the level p-1 open sets.
    fn resolve_recursive(a: &SimplicialAction, beta: &[u32], g: &[u8]) -> BTreeSet<Vec<u32>> {
        let p = g.len();
        if p == 0 {
            return open_star(a, &beta[..1]);
        }
        let mut acc: Option<BTreeSet<Vec<u32>>> = None;
        for i in 0..=p {
            let mut b = beta.to_vec();
            b.remove(i);
            let mut gg = g.to_vec();
            let sub = if i == 0 {
                gg.remove(0);
                resolve_recursive(a, &b, &gg)
            } else if i < p {
                gg[i - 1] = a.group.mul(gg[i - 1], gg[i]);
                gg.remove(i);
                resolve_recursive(a, &b, &gg)
            } else {
                let last = gg.pop().unwrap();
                let inv = a.group.inv(last);
                resolve_recursive(a, &b, &gg)
                    .into_iter()
                    .map(|s| a.act_simplex(inv, &s))
                    .collect()
            };
            acc = Some(match acc {
                None => sub,
                Some(prev) => prev.intersection(&sub).cloned().collect(),
            });
        }
        acc.unwrap()
    }

    #[test]
    fn base_patches_are_vertex_stars() {
        let a = antipodal_octahedron();
        let mut cover = Cover::new(&a);
        let u = cover.universe(&[]);
        assert_eq!(u.tuples.len(), 6);
        assert_eq!(u.cores, (0..6).map(|v| vec![v as u32]).collect::<Vec<_>>());
        let patches: Vec<usize> = u.patch.clone();
        for (v, &pi) in patches.iter().enumerate() {
            let st = cover.star(pi);
            assert_eq!(st.core, vec![v as u32]);
            assert_eq!(
                (st.n_simplices(0), st.n_simplices(1), st.n_simplices(2)),
                (5, 8, 4)
            );
        }
    }

    #[test]
    fn one_step_core_formula() {
        // level 1, copy (g): S = { a_1, g^{-1} a_0 }
        let a = square_rotation();
        assert_eq!(index_core(&a, &[0, 1], &[1]), vec![1, 2]);
        assert_eq!(index_core(&a, &[0, 1], &[0]), vec![0, 1]);
        let r = rotation_triangle();
        assert_eq!(index_core(&r, &[0, 0], &[1]), vec![0, 2]); // g^{-1} 0 = 2
        assert_eq!(index_core(&r, &[2, 2, 2], &[1, 1]), vec![0, 1, 2]); // spans nothing
    }

    #[test]
    fn closed_formula_matches_inductive_cover() {
        let actions = [
            antipodal_octahedron(),
            square_rotation(),
            rotation_triangle(),
            SimplicialAction::trivial(group::trivial().unwrap(), simplicial::octahedron().unwrap()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for a in &actions {
            let nv = a.space.n_vertices() as u32;
            let ord = a.group.order();
            for p in 0..=3usize {
                for _ in 0..12 {
                    let g: Vec<u8> = (0..p).map(|_| rng.gen_range(0..ord) as u8).collect();
                    let beta: Vec<u32> = (0..=p).map(|_| rng.gen_range(0..nv)).collect();
                    let direct = open_star(a, &index_core(a, &beta, &g));
                    assert_eq!(
                        direct,
                        resolve_recursive(a, &beta, &g),
                        "mismatch at p={} beta={:?} g={:?}",
                        p,
                        beta,
                        g
                    );
                }
            }
        }
    }

    #[test]
    fn index_faces_only_grow_patches() {
        // deleting an index position deletes one core constraint, so the
        // resolved face patch contains the (translated) original patch
        let a = square_rotation();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in 1..=3usize {
            for _ in 0..20 {
                let g: Vec<u8> = (0..p).map(|_| rng.gen_range(0..2) as u8).collect();
                let beta: Vec<u32> = (0..=p).map(|_| rng.gen_range(0..4)).collect();
                let core = index_core(&a, &beta, &g);
                for i in 0..=p {
                    let mut b = beta.clone();
                    b.remove(i);
                    let mut gg = g.clone();
                    let mut translated = core.clone();
                    if i == 0 {
                        gg.remove(0);
                    } else if i < p {
                        gg[i - 1] = a.group.mul(gg[i - 1], gg[i]);
                        gg.remove(i);
                    } else {
                        let last = gg.pop().unwrap();
                        translated = a.act_simplex(last, &core);
                    }
                    let face_core = index_core(&a, &b, &gg);
                    assert!(
                        face_core.iter().all(|v| translated.contains(v)),
                        "face core must be a subset of the translated core"
                    );
                }
            }
        }
    }

    #[test]
    fn multi_index_enumeration_on_the_octahedron() {
        let g0 = group::trivial().unwrap();
        let m = simplicial::octahedron().unwrap();
        let a = SimplicialAction::trivial(g0, m);
        let mut cover = Cover::new(&a);
        // level 0: single vertices; pairs must span an edge; triples a facet
        assert_eq!(cover.multi_indices(&[], 0, false).len(), 6);
        assert_eq!(cover.multi_indices(&[], 1, false).len(), 12);
        assert_eq!(cover.multi_indices(&[], 2, false).len(), 8);
        assert_eq!(cover.multi_indices(&[], 3, false).len(), 0);
        for mi in cover.multi_indices(&[], 1, false) {
            assert_eq!(mi.core.len(), 2);
            assert!(a.space.contains(&mi.core));
        }
    }

    #[test]
    fn enumeration_agrees_with_brute_force() {
        let a = antipodal_octahedron();
        let mut cover = Cover::new(&a);
        for g in [vec![0u8], vec![1u8]] {
            let u = cover.universe(&g);
            let tuples = u.tuples.clone();
            let cores = u.cores.clone();
            for j in 0..=2usize {
                let got: BTreeSet<Vec<u32>> =
                    cover.multi_indices(&g, j, false).into_iter().map(|m| m.ids).collect();
                // brute force: all (j+1)-subsets whose united core spans
                let mut want = BTreeSet::new();
                let n = tuples.len() as u32;
                let mut stack = vec![Vec::<u32>::new()];
                while let Some(cur) = stack.pop() {
                    if cur.len() == j + 1 {
                        let mut core = Vec::new();
                        for &id in &cur {
                            core.extend_from_slice(&cores[id as usize]);
                        }
                        core.sort_unstable();
                        core.dedup();
                        if a.space.contains(&core) {
                            want.insert(cur);
                        }
                        continue;
                    }
                    let lo = cur.last().map_or(0, |&x| x + 1);
                    for id in lo..n {
                        let mut next = cur.clone();
                        next.push(id);
                        stack.push(next);
                    }
                }
                assert_eq!(got, want, "degree {} copy {:?}", j, g);
            }
        }
    }

    #[test]
    fn normalized_enumeration_drops_degenerate_slots() {
        // trivial group, triangle, level 1: tuples (a_0, a_1) with both
        // vertices on a common edge; the diagonal ones are degenerate
        let a = SimplicialAction::trivial(group::trivial().unwrap(), simplicial::circle(3).unwrap());
        let mut cover = Cover::new(&a);
        assert_eq!(cover.multi_indices(&[0], 0, false).len(), 9);
        assert_eq!(cover.multi_indices(&[0], 0, true).len(), 6);

        // with a nontrivial copy nothing is degenerate
        let b = rotation_triangle();
        let mut cover = Cover::new(&b);
        assert_eq!(
            cover.multi_indices(&[1], 0, false).len(),
            cover.multi_indices(&[1], 0, true).len()
        );
        // and pairs keep the diagonal-free count only over the identity copy
        let full = cover.multi_indices(&[0], 1, false).len();
        let norm = cover.multi_indices(&[0], 1, true).len();
        assert!(norm < full);
    }

    #[test]
    fn degree_zero_patches_cover_every_simplex() {
        let actions = [antipodal_octahedron(), square_rotation(), rotation_triangle()];
        for a in &actions {
            let mut cover = Cover::new(a);
            for p in 0..=3usize {
                for g in group::all_tuples(a.group.order(), p) {
                    let (cores, patch) = {
                        let u = cover.universe(&g);
                        (u.cores.clone(), u.patch.clone())
                    };
                    for d in 0..=a.space.dim() {
                        for (i, s) in a.space.simplices_of(d).iter().enumerate() {
                            let covered = cores.iter().zip(&patch).any(|(_, &pi)| {
                                cover
                                    .star(pi)
                                    .position_of(d, i as u32)
                                    .is_some()
                            });
                            assert!(covered, "{:?} uncovered in copy {:?}", s, g);
                        }
                    }
                }
            }
        }
    }
}
