//! Invariant differential forms and the curvature of Deligne classes.
//!
//! A q-form of the simplicial model is a rational simplicial q-cochain; the
//! group acts by signed pullback and (1/|G|)-averaging projects onto the
//! invariants A^q(M)^G.  The closed invariants, the exact ones dA^{q-1}(M)^G
//! and quotients such as A^N(M)^G / dA^{N-1}(M)^G are all cut out of the
//! finite cochain spaces by exact rational linear algebra.
//!
//! The curvature of a class of full degree N is read off any representing
//! cocycle of the total complex: the top coefficient components are
//! N-cochains on the vertex stars, the cocycle identities make their
//! patchwise coboundaries agree on overlaps, and the glued global
//! (N+1)-cochain is closed, invariant under the group and has integral
//! periods; all three are asserted here.  Different representatives change
//! the top components by patchwise exact terms, so the glued form is a class
//! invariant.  For a finite group the components of the equivariant de Rham
//! image on G^i x M with i >= 1 vanish, which makes the curvature the entire
//! image; del F = 0 is its invariance and dF = 0 its closedness.

use num_traits::{One, Zero};

use crate::action::SimplicialAction;
use crate::assembly::DeligneModel;
use crate::deligne::OrdinaryModel;
use crate::exact::complex::{mixed_kernel_parts, mixed_subquotient, Subquotient, Witnesses};
use crate::exact::matrix::Rat;
use crate::exact::mixed::{MixedMap, MixedSpace, MixedVec};
use crate::exact::sparse::{SpQ, SpZ};
use crate::simplicial::{
    coboundary, coboundary_matrix, is_integral_closed, Cochain, SimplicialComplex, StarSubcomplex,
};

/// Signed pullback (A_g w)(sigma) = eps * w(g sigma).  Pullbacks compose
/// contravariantly, A_g A_h = A_{hg}.
pub fn pullback(a: &SimplicialAction, g: u8, c: &Cochain) -> Cochain {
    let q = c.degree;
    assert_eq!(c.values.len(), a.space.n_simplices(q), "cochain length mismatch");
    let mut out = Cochain::zero(&a.space, q);
    for (i, v) in out.values.iter_mut().enumerate() {
        let sigma = a.space.simplex(q, i);
        let (image, eps) = a.act_simplex_signed(g, sigma);
        let gi = a.space.simplex_index(&image).unwrap() as usize;
        *v = Rat::from_integer(eps.into()) * &c.values[gi];
    }
    out
}

/// The averaging projector onto A^q(M)^G.
pub fn average(a: &SimplicialAction, c: &Cochain) -> Cochain {
    let ord = a.group.order();
    let mut out = Cochain::zero(&a.space, c.degree);
    for g in 0..ord as u8 {
        let pb = pullback(a, g, c);
        for (o, v) in out.values.iter_mut().zip(&pb.values) {
            *o += v;
        }
    }
    let scale = Rat::new(1.into(), (ord as i64).into());
    for v in out.values.iter_mut() {
        *v *= &scale;
    }
    out
}

/// Conditions cutting the invariant (optionally closed) q-forms out of the
/// rational cochain space: one block (A_g - 1) per nontrivial group element,
/// and the simplicial coboundary when closedness is requested.
fn form_conditions(a: &SimplicialAction, q: usize, closed: bool) -> MixedMap {
    let x = &a.space;
    let n = x.n_simplices(q);
    let n_next = if closed { x.n_simplices(q + 1) } else { 0 };
    let ord = a.group.order();
    let blocks = ord - 1;
    let rows = blocks * n + n_next;
    let mut d = SpQ::new(rows, n);
    let mut block = 0;
    for g in 0..ord as u8 {
        if g == a.group.identity() {
            continue;
        }
        for i in 0..n {
            let sigma = x.simplex(q, i);
            let (image, eps) = a.act_simplex_signed(g, sigma);
            let gi = x.simplex_index(&image).unwrap() as usize;
            d.push_entry((block * n + i) as u32, gi, Rat::from_integer(eps.into()));
            d.push_entry((block * n + i) as u32, i, -Rat::one());
        }
        block += 1;
    }
    if closed {
        let cb = coboundary_matrix(x, &x.full_star(), q);
        for (col, cv) in cb.cols.iter().enumerate() {
            for (row, v) in cv {
                d.push_entry((blocks * n) as u32 + *row, col, Rat::from_integer(v.clone()));
            }
        }
    }
    MixedMap {
        src: MixedSpace::new(0, n),
        dst: MixedSpace::new(0, rows),
        a: SpZ::new(0, 0),
        c: SpQ::new(rows, 0),
        d,
    }
}

/// A basis of A^q(M)^G.
pub fn invariant_forms(a: &SimplicialAction, q: usize) -> Vec<Cochain> {
    kernel_cochains(a, q, false)
}

/// A basis of the closed invariant forms A^q(M)^G_cl.
pub fn invariant_closed_forms(a: &SimplicialAction, q: usize) -> Vec<Cochain> {
    kernel_cochains(a, q, true)
}

fn kernel_cochains(a: &SimplicialAction, q: usize, closed: bool) -> Vec<Cochain> {
    if q > a.space.dim() {
        return Vec::new();
    }
    let parts = mixed_kernel_parts(&form_conditions(a, q, closed));
    parts
        .kd_cols
        .iter()
        .map(|col| {
            let mut c = Cochain::zero(&a.space, q);
            for (i, v) in col {
                c.values[*i as usize] = v.clone();
            }
            c
        })
        .collect()
}

/// The invariant (optionally closed) q-forms, optionally modulo the exact
/// ones dA^{q-1}(M)^G, as a computed subquotient of the cochain space; its
/// `decode` expresses a cochain's class in the chosen basis.
pub fn form_classes(
    a: &SimplicialAction,
    q: usize,
    closed: bool,
    modulo_exact: bool,
) -> Subquotient {
    let f = form_conditions(a, q, closed);
    let n = a.space.n_simplices(q);
    let mut g = MixedMap::zero(MixedSpace::new(0, 0), f.src);
    if modulo_exact && q >= 1 {
        let basis = invariant_forms(a, q - 1);
        let mut d = SpQ::new(n, basis.len());
        for (col, b) in basis.iter().enumerate() {
            let db = coboundary(&a.space, b);
            for (row, v) in db.values.iter().enumerate() {
                if !v.is_zero() {
                    d.push_entry(row as u32, col, v.clone());
                }
            }
        }
        g = MixedMap {
            src: MixedSpace::new(0, basis.len()),
            dst: f.src,
            a: SpZ::new(0, 0),
            c: SpQ::new(n, 0),
            d,
        };
    }
    mixed_subquotient(&f, &g, Witnesses::Drop)
}

/// Embed a global q-cochain as a vector of the form-class ambient space.
pub fn form_vector(a: &SimplicialAction, c: &Cochain) -> MixedVec {
    let mut v = MixedVec::zero(MixedSpace::new(0, a.space.n_simplices(c.degree)));
    v.q.clone_from_slice(&c.values);
    v
}

/// Glue patchwise coboundaries d(theta_v) into one global cochain of degree
/// `top`, asserting agreement on overlaps and full coverage.
fn glue_curvature(
    x: &SimplicialComplex,
    pieces: &[(&StarSubcomplex, &[Rat])],
    top: usize,
) -> Cochain {
    let mut out: Vec<Option<Rat>> = vec![None; x.n_simplices(top)];
    for (star, theta) in pieces {
        assert_eq!(theta.len(), star.n_simplices(top - 1), "patch data length mismatch");
        for &gid in star.members(top) {
            let sigma = x.simplex(top, gid as usize);
            let mut acc = Rat::zero();
            for l in 0..sigma.len() {
                let mut face = sigma.to_vec();
                face.remove(l);
                let fgid = x.simplex_index(&face).unwrap();
                let pos = star
                    .position_of(top - 1, fgid)
                    .expect("closed stars contain the faces of their members");
                if l % 2 == 0 {
                    acc += &theta[pos];
                } else {
                    acc -= &theta[pos];
                }
            }
            match &out[gid as usize] {
                None => out[gid as usize] = Some(acc),
                Some(prev) => {
                    assert_eq!(prev, &acc, "curvature patches must agree on overlaps")
                }
            }
        }
    }
    let values: Vec<Rat> = out
        .into_iter()
        .map(|v| v.expect("every top simplex lies in some vertex star"))
        .collect();
    Cochain { degree: top, values }
}

fn check_curvature(a: &SimplicialAction, f: &Cochain) {
    assert!(
        coboundary(&a.space, f).is_zero(),
        "a curvature form must be closed"
    );
    for g in 0..a.group.order() as u8 {
        assert_eq!(&pullback(a, g, f), f, "a curvature form must be invariant");
    }
    assert_eq!(
        is_integral_closed(&a.space, f),
        Ok(true),
        "a curvature form must have integral periods"
    );
}

/// The curvature of a class of full degree N, from any representing cocycle
/// at total degree N+1 of the equivariant model.
pub fn curvature(model: &mut DeligneModel, rep: &MixedVec) -> Cochain {
    let nn = model.coeff_len as isize + 1;
    let top = model.coeff_len + 1;
    assert_eq!(
        rep.space(),
        model.degree_space(nn).space(),
        "curvature expects a representative at the full class degree"
    );
    let a = model.action();
    if top > a.space.dim() {
        return Cochain { degree: top, values: Vec::new() };
    }
    let slots: Vec<(usize, usize, usize)> = model
        .degree_space(nn)
        .slots
        .iter()
        .filter(|s| s.copy.is_empty() && s.ids.len() == 1 && s.k == top)
        .map(|s| (s.patch, s.offset, s.len))
        .collect();
    let pieces: Vec<(&StarSubcomplex, &[Rat])> = slots
        .iter()
        .map(|&(patch, offset, len)| (model.cover().star(patch), &rep.q[offset..offset + len]))
        .collect();
    let f = glue_curvature(&a.space, &pieces, top);
    check_curvature(a, &f);
    f
}

/// The curvature of an ordinary class of full degree N; same contract as
/// [`curvature`] for the trivial-group double complex.
pub fn ordinary_curvature(
    model: &mut OrdinaryModel,
    a: &SimplicialAction,
    rep: &MixedVec,
) -> Cochain {
    let nn = model.coeff_len as isize + 1;
    let top = model.coeff_len + 1;
    assert_eq!(
        rep.space(),
        model.degree_space(nn).space(),
        "curvature expects a representative at the full class degree"
    );
    if top > model.space.dim() {
        return Cochain { degree: top, values: Vec::new() };
    }
    let slots: Vec<(u32, usize, usize)> = model
        .degree_space(nn)
        .slots
        .iter()
        .filter(|s| s.dim == 0 && s.k == top)
        .map(|s| (s.idx, s.offset, s.len))
        .collect();
    let pieces: Vec<(&StarSubcomplex, &[Rat])> = slots
        .iter()
        .map(|&(idx, offset, len)| (model.star(0, idx), &rep.q[offset..offset + len]))
        .collect();
    let f = glue_curvature(model.space, &pieces, top);
    check_curvature(a, &f);
    f
}

/// The image of a class in the equivariant de Rham complex: the curvature in
/// the level-0 component and zeros on every higher nerve level.
pub struct DeRhamImage {
    pub leading: Cochain,
    /// nerve levels 1..=N+1 whose components vanish identically
    pub vanishing_levels: usize,
}

pub fn de_rham_image(model: &mut DeligneModel, rep: &MixedVec) -> DeRhamImage {
    let vanishing_levels = model.coeff_len + 1;
    DeRhamImage { leading: curvature(model, rep), vanishing_levels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deligne::{ordinary_deligne, EngineOptions};
    use crate::exact::complex::Summand;
    use crate::exact::matrix::rat;
    use crate::exact::module::MixedModule;
    use crate::group;
    use crate::simplicial::{self, cycle_lattice, pairing};
    use num_traits::Signed;
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

    fn reflection_triangle() -> SimplicialAction {
        SimplicialAction::from_generators(
            group::cyclic(2).unwrap(),
            simplicial::circle(3).unwrap(),
            &[(1, vec![1, 0, 2])],
        )
        .unwrap()
    }

    fn random_cochain(x: &SimplicialComplex, q: usize, rng: &mut ChaCha8Rng) -> Cochain {
        let mut c = Cochain::zero(x, q);
        for v in c.values.iter_mut() {
            *v = rat(rng.gen_range(-6..=6), rng.gen_range(1..=4));
        }
        c
    }

    #[test]
    fn averaging_projects_onto_the_fixed_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for a in [square_rotation(), antipodal_octahedron(), reflection_triangle()] {
            for q in 0..=a.space.dim() {
                let c = random_cochain(&a.space, q, &mut rng);
                let avg = average(&a, &c);
                for g in 0..a.group.order() as u8 {
                    assert_eq!(pullback(&a, g, &avg), avg);
                }
                assert_eq!(average(&a, &avg), avg);
                // pullbacks compose contravariantly
                for g in 0..a.group.order() as u8 {
                    for h in 0..a.group.order() as u8 {
                        let hg = a.group.mul(h, g);
                        assert_eq!(
                            pullback(&a, g, &pullback(&a, h, &c)),
                            pullback(&a, hg, &c)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn invariant_dimensions_count_orientation_preserving_orbits() {
        // free rotation of the square circle: two vertex and two edge orbits
        let a = square_rotation();
        assert_eq!(invariant_forms(&a, 0).len(), 2);
        assert_eq!(invariant_forms(&a, 1).len(), 2);

        // free antipodal action: half of 6, 12, 8
        let a = antipodal_octahedron();
        assert_eq!(invariant_forms(&a, 0).len(), 3);
        assert_eq!(invariant_forms(&a, 1).len(), 6);
        assert_eq!(invariant_forms(&a, 2).len(), 4);

        // the reflection fixes the edge {0,1} reversing its orientation, so
        // that orbit contributes nothing
        let a = reflection_triangle();
        assert_eq!(invariant_forms(&a, 0).len(), 2);
        assert_eq!(invariant_forms(&a, 1).len(), 1);
    }

    #[test]
    fn invariant_form_classes_compute_invariant_de_rham_quotients() {
        // top forms on the rotated square: A^1 ^G is 2-dimensional, all
        // closed, and d of the invariant functions has rank 1
        let a = square_rotation();
        assert_eq!(invariant_closed_forms(&a, 1).len(), 2);
        let q1 = MixedModule::new(0, 1, 0, vec![]);
        assert_eq!(form_classes(&a, 1, false, true).module, q1);

        // the antipodal map reverses orientation, so the invariant part of
        // H^2(S^2, Q) dies: closed invariant 2-forms are all invariant-exact
        let a = antipodal_octahedron();
        assert_eq!(form_classes(&a, 2, true, true).module, MixedModule::new(0, 0, 0, vec![]));

        // the free triangle rotation preserves orientation and keeps it
        let a = SimplicialAction::from_generators(
            group::cyclic(3).unwrap(),
            simplicial::circle(3).unwrap(),
            &[(1, vec![1, 2, 0])],
        )
        .unwrap();
        assert_eq!(form_classes(&a, 1, true, true).module, q1);
    }

    #[test]
    fn curvature_separates_connection_classes_on_the_sphere() {
        // ordinary model on the octahedron sphere, N = 1: the class group is
        // Z (+) Q^7 and curvature detects the integral generator through its
        // period over the fundamental cycle
        let x = simplicial::octahedron().unwrap();
        let a = SimplicialAction::trivial(group::trivial().unwrap(), x.clone());
        let r = ordinary_deligne(&x, 1, 1, &EngineOptions::default()).unwrap();
        assert_eq!(r.group, MixedModule::new(1, 7, 0, vec![]));
        let mut model = OrdinaryModel::new(&x, 1);
        let cycle = &cycle_lattice(&x, 2)[0];

        let rep = r.classes.representative(Summand::Free(0));
        let f = ordinary_curvature(&mut model, &a, &rep);
        assert_eq!(pairing(&f, cycle).abs(), Rat::one());

        for i in 0..7 {
            let rep = r.classes.representative(Summand::Rational(i));
            let f = ordinary_curvature(&mut model, &a, &rep);
            assert!(pairing(&f, cycle).is_zero());
        }
    }

    #[test]
    fn equivariant_curvature_is_invariant_and_flat_on_a_circle() {
        // the square rotation at N = 1: no 2-simplices, so every class is
        // flat and the de Rham image is empty in its leading component
        let a = square_rotation();
        let mut model = DeligneModel::new(&a, 1, true);
        let cx = model.complex_window(1, 3);
        let classes = cx.cohomology_at(2, Witnesses::Drop);
        for s in classes.summands() {
            let rep = classes.representative(s);
            let im = de_rham_image(&mut model, &rep);
            assert!(im.leading.values.is_empty());
            assert_eq!(im.vanishing_levels, 2);
        }

        // antipodal sphere at N = 1: curvature of every generator passes the
        // closed / invariant / integral assertions
        let a = antipodal_octahedron();
        let mut model = DeligneModel::new(&a, 1, true);
        let cx = model.complex_window(1, 3);
        let classes = cx.cohomology_at(2, Witnesses::Drop);
        assert!(!classes.summands().is_empty());
        for s in classes.summands() {
            let rep = classes.representative(s);
            curvature(&mut model, &rep);
        }
    }

    #[test]
    fn period_one_class_on_the_three_sphere() {
        // boundary of the 4-simplex, N = 2: H^2 is Z (+) Q^4; the free
        // generator carries 3-curvature of period one, the rational
        // directions are curvatures of exact forms
        let x = simplicial::boundary_4_simplex().unwrap();
        let a = SimplicialAction::trivial(group::trivial().unwrap(), x.clone());
        let r = ordinary_deligne(&x, 2, 2, &EngineOptions::default()).unwrap();
        assert_eq!(r.group, MixedModule::new(1, 4, 0, vec![]));
        let mut model = OrdinaryModel::new(&x, 2);
        let cycles = cycle_lattice(&x, 3);
        assert_eq!(cycles.len(), 1);

        let rep = r.classes.representative(Summand::Free(0));
        let f = ordinary_curvature(&mut model, &a, &rep);
        assert_eq!(pairing(&f, &cycles[0]).abs(), Rat::one());

        for i in 0..4 {
            let rep = r.classes.representative(Summand::Rational(i));
            let f = ordinary_curvature(&mut model, &a, &rep);
            assert!(pairing(&f, &cycles[0]).is_zero());
        }
    }
}
