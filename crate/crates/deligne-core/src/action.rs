//! Simplicial actions of finite groups and the simplicial manifold G^p x M.
//!
//! An action stores one vertex permutation per group element; loading checks
//! that it is a genuine left action by simplicial automorphisms.  Points of
//! the simplicial manifold at level p are pairs (g_1..g_p, x) with x a
//! simplex of M; the face and degeneracy maps are
//!
//! d_0(g_1..g_p, x) = (g_2..g_p, x)
//! d_i(g_1..g_p, x) = (g_1.., g_i g_{i+1}, ..g_p, x)      for 0 < i < p
//! d_p(g_1..g_p, x) = (g_1..g_{p-1}, g_p x)
//! s_i(g_1..g_p, x) = (g_1..g_i, e, g_{i+1}..g_p, x)      for 0 <= i <= p
//!
//! and satisfy the simplicial identities, which `validate_action` replays on
//! sampled points as a safety net.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::{all_tuples, FiniteGroup};
use crate::simplicial::SimplicialComplex;

#[derive(Clone, Debug)]
pub struct SimplicialAction {
    pub group: FiniteGroup,
    pub space: SimplicialComplex,
    perm: Vec<Vec<u32>>,
}

/// A point of G^p x M: a p-tuple of group elements and a simplex of M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NervePoint {
    pub g: Vec<u8>,
    pub x: Vec<u32>,
}

impl SimplicialAction {
    /// Checks that `perm` (one permutation per group element, indexed like
    /// the group) is a left action by simplicial automorphisms.
    pub fn new(
        group: FiniteGroup,
        space: SimplicialComplex,
        perm: Vec<Vec<u32>>,
    ) -> Result<Self, String> {
        let n = space.n_vertices();
        if perm.len() != group.order() {
            return Err(format!(
                "need {} permutations, got {}",
                group.order(),
                perm.len()
            ));
        }
        for (g, p) in perm.iter().enumerate() {
            if p.len() != n {
                return Err(format!("permutation for {} has wrong length", group.name(g as u8)));
            }
            let mut seen = vec![false; n];
            for &v in p {
                if v as usize >= n || seen[v as usize] {
                    return Err(format!(
                        "permutation for {} is not a bijection",
                        group.name(g as u8)
                    ));
                }
                seen[v as usize] = true;
            }
        }
        let e = group.identity() as usize;
        if perm[e].iter().enumerate().any(|(v, &w)| v as u32 != w) {
            return Err("identity element must act trivially".to_string());
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                let ab = group.mul(a as u8, b as u8) as usize;
                for v in 0..n {
                    if perm[ab][v] != perm[a][perm[b][v] as usize] {
                        return Err(format!(
                            "not an action: {}*{} disagrees with composing permutations",
                            group.name(a as u8),
                            group.name(b as u8)
                        ));
                    }
                }
            }
        }
        for g in 0..group.order() {
            for f in space.facets() {
                let mut image: Vec<u32> = f.iter().map(|&v| perm[g][v as usize]).collect();
                image.sort_unstable();
                if !space.contains(&image) {
                    return Err(format!(
                        "not simplicial: {} maps facet {} outside the complex",
                        group.name(g as u8),
                        space.simplex_label(f)
                    ));
                }
            }
        }
        Ok(SimplicialAction { group, space, perm })
    }

    /// Builds the action from permutations of a generating set, closing
    /// under multiplication and checking consistency.
    pub fn from_generators(
        group: FiniteGroup,
        space: SimplicialComplex,
        gens: &[(u8, Vec<u32>)],
    ) -> Result<Self, String> {
        let n = space.n_vertices();
        let ord = group.order();
        let mut perm: Vec<Option<Vec<u32>>> = vec![None; ord];
        perm[group.identity() as usize] = Some((0..n as u32).collect());
        for (g, p) in gens {
            let prev = perm[*g as usize].replace(p.clone());
            if prev.is_some_and(|q| q != *p) {
                return Err(format!("conflicting permutations given for {}", group.name(*g)));
            }
        }
        loop {
            let mut changed = false;
            for a in 0..ord as u8 {
                let Some(pa) = perm[a as usize].clone() else { continue };
                for (b, pb) in gens {
                    let ab = group.mul(a, *b) as usize;
                    let comp: Vec<u32> = (0..n).map(|v| pa[pb[v] as usize]).collect();
                    match &perm[ab] {
                        None => {
                            perm[ab] = Some(comp);
                            changed = true;
                        }
                        Some(existing) => {
                            if *existing != comp {
                                return Err(format!(
                                    "generator permutations are inconsistent at {}",
                                    group.name(ab as u8)
                                ));
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let perm: Option<Vec<Vec<u32>>> = perm.into_iter().collect();
        let perm = perm.ok_or("generators do not generate the group")?;
        Self::new(group, space, perm)
    }

    /// Every element acts as the identity.
    pub fn trivial(group: FiniteGroup, space: SimplicialComplex) -> Self {
        let id: Vec<u32> = (0..space.n_vertices() as u32).collect();
        let perm = vec![id; group.order()];
        SimplicialAction { group, space, perm }
    }

    pub fn act_vertex(&self, g: u8, v: u32) -> u32 {
        self.perm[g as usize][v as usize]
    }

    /// Image of a sorted simplex, re-sorted.
    pub fn act_simplex(&self, g: u8, verts: &[u32]) -> Vec<u32> {
        let mut image: Vec<u32> = verts.iter().map(|&v| self.act_vertex(g, v)).collect();
        image.sort_unstable();
        image
    }

    /// Image of a sorted simplex together with the orientation sign of the
    /// re-sorting permutation.
    pub fn act_simplex_signed(&self, g: u8, verts: &[u32]) -> (Vec<u32>, i64) {
        let image: Vec<u32> = verts.iter().map(|&v| self.act_vertex(g, v)).collect();
        let mut inversions = 0usize;
        for i in 0..image.len() {
            for j in i + 1..image.len() {
                if image[i] > image[j] {
                    inversions += 1;
                }
            }
        }
        let mut sorted = image;
        sorted.sort_unstable();
        (sorted, if inversions % 2 == 0 { 1 } else { -1 })
    }

    /// The face map d_i at level p = pt.g.len().
    pub fn face(&self, i: usize, pt: &NervePoint) -> NervePoint {
        let p = pt.g.len();
        assert!(p >= 1 && i <= p, "face index {} out of range at level {}", i, p);
        let mut g = pt.g.clone();
        if i == 0 {
            g.remove(0);
            NervePoint { g, x: pt.x.clone() }
        } else if i < p {
            g[i - 1] = self.group.mul(g[i - 1], g[i]);
            g.remove(i);
            NervePoint { g, x: pt.x.clone() }
        } else {
            let last = g.pop().unwrap();
            NervePoint { g, x: self.act_simplex(last, &pt.x) }
        }
    }

    /// The degeneracy map s_i at level p = pt.g.len().
    pub fn degeneracy(&self, i: usize, pt: &NervePoint) -> NervePoint {
        let p = pt.g.len();
        assert!(i <= p, "degeneracy index {} out of range at level {}", i, p);
        let mut g = pt.g.clone();
        g.insert(i, self.group.identity());
        NervePoint { g, x: pt.x.clone() }
    }

    /// Elements whose permutation fixes some simplex setwise but not
    /// pointwise.  Such actions are legal but the translated-star cover is
    /// better behaved after barycentric subdivision, so we report them.
    pub fn subdivision_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for g in 0..self.group.order() as u8 {
            if g == self.group.identity() {
                continue;
            }
            'search: for d in 1..=self.space.dim() {
                for s in self.space.simplices_of(d) {
                    if &self.act_simplex(g, s) == s && s.iter().any(|&v| self.act_vertex(g, v) != v)
                    {
                        out.push(format!(
                            "{} fixes {} without fixing it pointwise; consider barycentric subdivision",
                            self.group.name(g),
                            self.space.simplex_label(s)
                        ));
                        break 'search;
                    }
                }
            }
        }
        out
    }
}

/// Replays the simplicial identities
///
/// d_i d_j = d_{j-1} d_i            (i < j)
/// s_i s_j = s_{j+1} s_i            (i <= j)
/// d_i s_j = s_{j-1} d_i            (i < j)
///         = id                     (i = j, j+1)
///         = s_j d_{i-1}            (i > j+1)
///
/// on sampled points of G^p x M for p <= 4, and returns the subdivision
/// warnings on success.
pub fn validate_action(a: &SimplicialAction) -> Result<Vec<String>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut simplices = Vec::new();
    for d in 0..=a.space.dim() {
        for s in a.space.simplices_of(d) {
            simplices.push(s.clone());
        }
    }
    for p in 0..=4usize {
        let tuples = sample_tuples(a.group.order(), p, 60, &mut rng);
        for g in &tuples {
            let x = simplices[rng.gen_range(0..simplices.len())].clone();
            let pt = NervePoint { g: g.clone(), x };
            check_identities_at(a, &pt)?;
        }
    }
    Ok(a.subdivision_warnings())
}

fn sample_tuples(n: usize, p: usize, limit: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u8>> {
    if n.pow(p as u32) <= limit {
        return all_tuples(n, p);
    }
    (0..limit)
        .map(|_| (0..p).map(|_| rng.gen_range(0..n) as u8).collect())
        .collect()
}

fn check_identities_at(a: &SimplicialAction, pt: &NervePoint) -> Result<(), String> {
    let p = pt.g.len();
    for j in 0..=p {
        for i in 0..j {
            if p >= 2 {
                let lhs = a.face(i, &a.face(j, pt));
                let rhs = a.face(j - 1, &a.face(i, pt));
                if lhs != rhs {
                    return Err(format!("face relation d_{} d_{} failed at level {}", i, j, p));
                }
            }
        }
    }
    for j in 0..=p {
        for i in 0..=j {
            let lhs = a.degeneracy(i, &a.degeneracy(j, pt));
            let rhs = a.degeneracy(j + 1, &a.degeneracy(i, pt));
            if lhs != rhs {
                return Err(format!(
                    "degeneracy relation s_{} s_{} failed at level {}",
                    i, j, p
                ));
            }
        }
    }
    for j in 0..=p {
        let sj = a.degeneracy(j, pt);
        for i in 0..=p + 1 {
            let lhs = a.face(i, &sj);
            let rhs = if i < j {
                a.degeneracy(j - 1, &a.face(i, pt))
            } else if i == j || i == j + 1 {
                pt.clone()
            } else {
                a.degeneracy(j, &a.face(i - 1, pt))
            };
            if lhs != rhs {
                return Err(format!(
                    "mixed relation d_{} s_{} failed at level {}",
                    i, j, p
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group;
    use crate::simplicial;

    /// Z/2 rotating the square circle by a half turn (a free action).
    pub fn square_rotation() -> SimplicialAction {
        SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            simplicial::circle(4).unwrap(),
            &[(1, vec![2, 3, 0, 1])],
        )
        .unwrap()
    }

    /// Z/2 acting on the octahedron by the antipodal map.
    pub fn antipodal_octahedron() -> SimplicialAction {
        SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            simplicial::octahedron().unwrap(),
            &[(1, vec![1, 0, 3, 2, 5, 4])],
        )
        .unwrap()
    }

    #[test]
    fn accepts_good_actions_rejects_bad_ones() {
        assert!(validate_action(&square_rotation()).unwrap().is_empty());
        assert!(validate_action(&antipodal_octahedron()).unwrap().is_empty());

        // swapping only two adjacent vertices of the square breaks edges
        let bad = SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            simplicial::circle(4).unwrap(),
            &[(1, vec![1, 0, 2, 3])],
        );
        assert!(bad.unwrap_err().contains("not simplicial"));

        // a 4-cycle is not an action of Z/2
        let bad = SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            simplicial::circle(4).unwrap(),
            &[(1, vec![1, 2, 3, 0])],
        );
        assert!(bad.unwrap_err().contains("inconsistent"));

        let id = vec![0, 1, 2, 3];
        let bad = SimplicialAction::new(
            group::cyclic(2).unwrap(),
            simplicial::circle(4).unwrap(),
            vec![vec![1, 2, 3, 0], id],
        );
        assert!(bad.unwrap_err().contains("identity"));
    }

    #[test]
    fn face_and_degeneracy_formulas() {
        let a = square_rotation();
        let x = vec![0u32, 1];
        let pt = NervePoint { g: vec![1], x: x.clone() };
        assert_eq!(a.face(0, &pt), NervePoint { g: vec![], x: x.clone() });
        assert_eq!(a.face(1, &pt), NervePoint { g: vec![], x: vec![2, 3] });

        let c4 = SimplicialAction::trivial(group::cyclic(4).unwrap(), simplicial::point().unwrap());
        let pt = NervePoint { g: vec![3, 2], x: vec![0] };
        assert_eq!(a.group.order(), 2);
        assert_eq!(c4.face(1, &pt).g, vec![1]); // 3 * 2 = 1 mod 4

        let pt = NervePoint { g: vec![], x: vec![0, 1] };
        assert_eq!(a.degeneracy(0, &pt).g, vec![0]);
        let pt = NervePoint { g: vec![1], x: vec![0, 1] };
        assert_eq!(a.degeneracy(1, &pt).g, vec![1, 0]);
        assert_eq!(a.face(1, &a.degeneracy(1, &pt)), pt);
        assert_eq!(a.face(2, &a.degeneracy(1, &pt)), pt);
    }

    #[test]
    fn orientation_signs() {
        let rot3 = SimplicialAction::from_generators(
            group::cyclic(3).unwrap(),
            simplicial::circle(3).unwrap(),
            &[(1, vec![1, 2, 0])],
        )
        .unwrap();
        assert_eq!(rot3.act_simplex_signed(1, &[0, 1]), (vec![1, 2], 1));
        assert_eq!(rot3.act_simplex_signed(1, &[0, 2]), (vec![0, 1], -1));

        let a = square_rotation();
        assert_eq!(a.act_simplex_signed(1, &[0, 1]), (vec![2, 3], 1));
        assert_eq!(a.act_simplex_signed(1, &[0, 3]), (vec![1, 2], -1));
    }

    #[test]
    fn translated_stars_are_stars_of_translates() {
        let a = antipodal_octahedron();
        for d in 0..=a.space.dim() {
            for s in a.space.simplices_of(d) {
                for g in 0..a.group.order() as u8 {
                    let st = a.space.closed_star(s).unwrap();
                    let translated = a.space.closed_star(&a.act_simplex(g, s)).unwrap();
                    for dd in 0..=a.space.dim() {
                        let mut image: Vec<u32> = st
                            .members(dd)
                            .iter()
                            .map(|&m| {
                                let im = a.act_simplex(g, a.space.simplex(dd, m as usize));
                                a.space.simplex_index(&im).unwrap()
                            })
                            .collect();
                        image.sort_unstable();
                        assert_eq!(image, translated.members(dd));
                    }
                }
            }
        }
    }

    #[test]
    fn fixed_simplex_warning() {
        // reflection of the segment [0,1] fixes the edge but swaps its ends
        let seg = SimplicialComplex::from_facets(2, vec![vec![0, 1]]).unwrap();
        let a = SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            seg,
            &[(1, vec![1, 0])],
        )
        .unwrap();
        let warnings = validate_action(&a).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("barycentric"));
    }

    #[test]
    fn generators_must_generate() {
        let bad = SimplicialAction::from_generators(
            group::klein4().unwrap(),
            simplicial::point().unwrap(),
            &[(1, vec![0])],
        );
        assert!(bad.unwrap_err().contains("generate"));
    }
}
