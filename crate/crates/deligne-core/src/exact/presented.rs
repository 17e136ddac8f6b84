//! Homomorphisms between canonical mixed modules and exactness of short
//! stretches A → B → C, with witnesses.
//!
//! A canonical module Z^a ⊕ Q^b ⊕ (Q/Z)^c ⊕ (⊕ Z/dᵢ) is presented by a free
//! mixed cover — Z-part [free | torsion carriers], Q-part [circle carriers |
//! rationals] — modulo the relations dᵢ on the torsion carriers and the
//! integer lattice on the circle carriers.  A homomorphism is stored as a
//! lifted map between covers.  Building one from generator images checks
//! that relations go to relations; on the divisible sector the lift entries
//! themselves matter, not just their classes, because scaling by a
//! non-integer does not commute with reduction mod 1.  `induced` therefore
//! reads images through `Subquotient::lift_coords`.
//!
//! `homology_at` decides exactness of A → B → C at B.  The kernel of the
//! class map to C is cut out of the augmented ambient cover_B ⊕ Z^{t+c} by
//! rational conditions: the free coordinates of the lifted image vanish,
//! each torsion coordinate equals dᵢ times a fresh integer multiplier, each
//! circle coordinate equals an integer multiplier, and the rational
//! coordinates vanish.  The multipliers are determined by the class, so this
//! kernel is the kernel in B.  The denominators are the lifted columns of
//! the incoming map and of the relations of B, each completed by the
//! multipliers of its own image; a column whose image class fails to vanish
//! is a nonzero composite and is reported as an error rather than patched
//! over.  For a divisible-type generator the composite must vanish exactly,
//! by the same scaling argument as above.  The homology module is then a
//! plain mixed subquotient, and with witnesses kept every trivial class
//! yields an explicit preimage through the incoming map and the relations.

use num_traits::{One, Zero};

use crate::exact::complex::{mixed_subquotient, ClassCoords, Subquotient, Witnesses};
use crate::exact::matrix::{Int, Rat};
use crate::exact::mixed::{MixedMap, MixedSpace, MixedVec};
use crate::exact::module::MixedModule;
use crate::exact::sparse::{SpQ, SpZ};

/// The free cover and relation map presenting a canonical module.
pub fn presentation_of(shape: &MixedModule) -> (MixedSpace, MixedMap) {
    let (a, b, c, t) = (
        shape.rank_z,
        shape.rank_q,
        shape.circles,
        shape.torsion.len(),
    );
    let cover = MixedSpace::new(a + t, c + b);
    let mut rel_a = SpZ::new(a + t, t + c);
    let mut rel_c = SpQ::new(c + b, t + c);
    for (i, d) in shape.torsion.iter().enumerate() {
        rel_a.push_entry((a + i) as u32, i, d.clone());
    }
    for j in 0..c {
        rel_c.push_entry(j as u32, t + j, Rat::one());
    }
    let rel = MixedMap {
        src: MixedSpace::new(t + c, 0),
        dst: cover,
        a: rel_a,
        c: rel_c,
        d: SpQ::new(c + b, 0),
    };
    (cover, rel)
}

/// Multipliers certifying that a cover vector of `shape` represents zero:
/// the quotient by dᵢ on each torsion carrier and the integer part on each
/// circle carrier.  Errors name the first coordinate whose class is nonzero.
pub fn vanishing_multipliers(
    shape: &MixedModule,
    v: &MixedVec,
) -> Result<(Vec<Int>, Vec<Int>), String> {
    for (i, x) in v.z.iter().take(shape.rank_z).enumerate() {
        if !x.is_zero() {
            return Err(format!("free coordinate {} is {}", i, x));
        }
    }
    let mut ms = Vec::with_capacity(shape.torsion.len());
    for (i, d) in shape.torsion.iter().enumerate() {
        let x = &v.z[shape.rank_z + i];
        if !(x % d).is_zero() {
            return Err(format!("torsion coordinate {} is {} mod {}", i, x, d));
        }
        ms.push(x / d);
    }
    let mut ns = Vec::with_capacity(shape.circles);
    for (i, x) in v.q.iter().take(shape.circles).enumerate() {
        if !x.is_integer() {
            return Err(format!("circle coordinate {} is {}", i, x));
        }
        ns.push(x.to_integer());
    }
    for (i, x) in v.q.iter().skip(shape.circles).enumerate() {
        if !x.is_zero() {
            return Err(format!("rational coordinate {} is {}", i, x));
        }
    }
    Ok((ms, ns))
}

/// A homomorphism between canonical modules, as a lift between their covers.
pub struct PresentedMap {
    pub src: MixedModule,
    pub dst: MixedModule,
    pub lift: MixedMap,
}

impl PresentedMap {
    /// Build from one image per cover generator, in canonical coordinates of
    /// the target.  Circle entries are lift values: `[(0,0,1,[])] → itself`
    /// with circle entry 2 is multiplication by two, not the zero map its
    /// normalized class would suggest.
    pub fn new(src: MixedModule, dst: MixedModule, images: &[ClassCoords]) -> Result<Self, String> {
        let (cover_s, rel_s) = presentation_of(&src);
        let (cover_d, _) = presentation_of(&dst);
        if images.len() != cover_s.dim() {
            return Err(format!(
                "expected {} generator images, got {}",
                cover_s.dim(),
                images.len()
            ));
        }
        let mut a = SpZ::new(cover_d.n_z, cover_s.n_z);
        let mut c = SpQ::new(cover_d.n_q, cover_s.n_z);
        let mut d = SpQ::new(cover_d.n_q, cover_s.n_q);
        for (j, im) in images.iter().enumerate() {
            if im.free.len() != dst.rank_z
                || im.torsion.len() != dst.torsion.len()
                || im.circles.len() != dst.circles
                || im.rationals.len() != dst.rank_q
            {
                return Err(format!("image {} does not match the target shape", j));
            }
            if j < cover_s.n_z {
                for (i, v) in im.free.iter().chain(&im.torsion).enumerate() {
                    if !v.is_zero() {
                        a.push_entry(i as u32, j, v.clone());
                    }
                }
                for (i, v) in im.circles.iter().chain(&im.rationals).enumerate() {
                    if !v.is_zero() {
                        c.push_entry(i as u32, j, v.clone());
                    }
                }
            } else {
                if im.free.iter().chain(&im.torsion).any(|v| !v.is_zero()) {
                    return Err(format!(
                        "image {} of a divisible generator meets the discrete part",
                        j
                    ));
                }
                for (i, v) in im.circles.iter().chain(&im.rationals).enumerate() {
                    if !v.is_zero() {
                        d.push_entry(i as u32, j - cover_s.n_z, v.clone());
                    }
                }
            }
        }
        let lift = MixedMap { src: cover_s, dst: cover_d, a, c, d };
        for r in 0..rel_s.src.n_z {
            vanishing_multipliers(&dst, &lift.apply(&rel_s.column(r)))
                .map_err(|e| format!("relation {} is not preserved: {}", r, e))?;
        }
        Ok(PresentedMap { src, dst, lift })
    }

    pub fn zero(src: MixedModule, dst: MixedModule) -> Self {
        let (cover_s, _) = presentation_of(&src);
        let (cover_d, _) = presentation_of(&dst);
        PresentedMap { src, dst, lift: MixedMap::zero(cover_s, cover_d) }
    }

    /// The map on classes induced by a cochain-level construction: each
    /// canonical generator's representative is pushed through `f` and read
    /// off in unreduced target coordinates.  Fails when `f` does not induce
    /// a map at all, e.g. when a torsion relation is not respected.
    pub fn induced(
        src: &Subquotient,
        dst: &Subquotient,
        mut f: impl FnMut(&MixedVec) -> MixedVec,
    ) -> Result<Self, String> {
        let images: Vec<ClassCoords> = src
            .summands()
            .into_iter()
            .map(|s| dst.lift_coords(&f(&src.representative(s))))
            .collect();
        PresentedMap::new(src.module.clone(), dst.module.clone(), &images)
    }
}

fn push_denominator(
    ga: &mut SpZ,
    gc: &mut SpQ,
    col: usize,
    x: &MixedVec,
    ms: &[Int],
    ns: &[Int],
    nz_b: usize,
    t_c: usize,
) {
    for (i, e) in x.z.iter().enumerate() {
        if !e.is_zero() {
            ga.push_entry(i as u32, col, e.clone());
        }
    }
    for (i, m) in ms.iter().enumerate() {
        if !m.is_zero() {
            ga.push_entry((nz_b + i) as u32, col, m.clone());
        }
    }
    for (i, n) in ns.iter().enumerate() {
        if !n.is_zero() {
            ga.push_entry((nz_b + t_c + i) as u32, col, n.clone());
        }
    }
    for (i, e) in x.q.iter().enumerate() {
        if !e.is_zero() {
            gc.push_entry(i as u32, col, e.clone());
        }
    }
}

/// Lift a cover vector of `psi`'s source into the multiplier-augmented
/// ambient of `homology_at(_, psi, _)`, certifying that its image class
/// vanishes.  Decoding and witnesses of the homology run through this.
pub fn augmented(psi: &PresentedMap, v: &MixedVec) -> Result<MixedVec, String> {
    let (ms, ns) = vanishing_multipliers(&psi.dst, &psi.lift.apply(v))?;
    let mut out = MixedVec::zero(MixedSpace::new(
        psi.lift.src.n_z + ms.len() + ns.len(),
        psi.lift.src.n_q,
    ));
    out.z[..v.z.len()].clone_from_slice(&v.z);
    out.z[v.z.len()..v.z.len() + ms.len()].clone_from_slice(&ms);
    out.z[v.z.len() + ms.len()..].clone_from_slice(&ns);
    out.q.clone_from_slice(&v.q);
    Ok(out)
}

/// Homology ker(psi)/im(phi) of A → B → C at B, as a subquotient whose
/// ambient is cover_B augmented by one integer multiplier per torsion or
/// circle summand of C.  A nonzero composite is an error carrying the first
/// offending generator.
pub fn homology_at(
    phi: &PresentedMap,
    psi: &PresentedMap,
    witnesses: Witnesses,
) -> Result<Subquotient, String> {
    assert_eq!(phi.dst, psi.src, "homology requires composable maps");
    let csh = &psi.dst;
    let (cover_b, rel_b) = presentation_of(&phi.dst);
    let (free_c, t_c) = (csh.rank_z, csh.torsion.len());
    let ambient = MixedSpace::new(cover_b.n_z + t_c + csh.circles, cover_b.n_q);

    let cond_dst = MixedSpace::new(free_c, t_c + csh.circles + csh.rank_q);
    let mut fa = SpZ::new(cond_dst.n_z, ambient.n_z);
    let mut fc = SpQ::new(cond_dst.n_q, ambient.n_z);
    let mut fd = SpQ::new(cond_dst.n_q, ambient.n_q);
    for (j, col) in psi.lift.a.cols.iter().enumerate() {
        for (i, v) in col {
            if (*i as usize) < free_c {
                fa.push_entry(*i, j, v.clone());
            } else {
                fc.push_entry(*i - free_c as u32, j, Rat::from(v.clone()));
            }
        }
    }
    for (j, col) in psi.lift.c.cols.iter().enumerate() {
        for (i, v) in col {
            fc.push_entry(t_c as u32 + *i, j, v.clone());
        }
    }
    for (j, col) in psi.lift.d.cols.iter().enumerate() {
        for (i, v) in col {
            fd.push_entry(t_c as u32 + *i, j, v.clone());
        }
    }
    for (i, d) in csh.torsion.iter().enumerate() {
        fc.push_entry(i as u32, cover_b.n_z + i, -Rat::from(d.clone()));
    }
    for i in 0..csh.circles {
        fc.push_entry((t_c + i) as u32, cover_b.n_z + t_c + i, -Rat::one());
    }
    let conditions = MixedMap { src: ambient, dst: cond_dst, a: fa, c: fc, d: fd };

    let nsrc = MixedSpace::new(phi.lift.src.n_z + rel_b.src.n_z, phi.lift.src.n_q);
    let mut ga = SpZ::new(ambient.n_z, nsrc.n_z);
    let mut gc = SpQ::new(ambient.n_q, nsrc.n_z);
    let mut gd = SpQ::new(ambient.n_q, nsrc.n_q);
    for t in 0..phi.lift.src.n_z {
        let x = phi.lift.column(t);
        let (ms, ns) = vanishing_multipliers(csh, &psi.lift.apply(&x))
            .map_err(|e| format!("nonzero composite on integer generator {}: {}", t, e))?;
        push_denominator(&mut ga, &mut gc, t, &x, &ms, &ns, cover_b.n_z, t_c);
    }
    for r in 0..rel_b.src.n_z {
        let x = rel_b.column(r);
        let (ms, ns) = vanishing_multipliers(csh, &psi.lift.apply(&x))
            .expect("a presented map preserves relations");
        push_denominator(&mut ga, &mut gc, phi.lift.src.n_z + r, &x, &ms, &ns, cover_b.n_z, t_c);
    }
    for t in 0..phi.lift.src.n_q {
        let x = phi.lift.column(phi.lift.src.n_z + t);
        if !psi.lift.apply(&x).is_zero() {
            return Err(format!("nonzero composite on divisible generator {}", t));
        }
        for (i, e) in x.q.iter().enumerate() {
            if !e.is_zero() {
                gd.push_entry(i as u32, t, e.clone());
            }
        }
    }
    let denominators = MixedMap { src: nsrc, dst: ambient, a: ga, c: gc, d: gd };
    Ok(mixed_subquotient(&conditions, &denominators, witnesses))
}

/// Trivial kernel and cokernel, each decided by `homology_at` against a zero
/// map, so a nonzero composite cannot arise.
pub fn is_isomorphism(f: &PresentedMap) -> Result<bool, String> {
    let triv = MixedModule::new(0, 0, 0, Vec::new());
    let ker = homology_at(&PresentedMap::zero(triv.clone(), f.src.clone()), f, Witnesses::Drop)?;
    if !ker.module.is_zero() {
        return Ok(false);
    }
    let coker = homology_at(f, &PresentedMap::zero(f.dst.clone(), triv), Witnesses::Drop)?;
    Ok(coker.module.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::{int, rat};

    fn cc(
        free: &[i64],
        torsion: &[i64],
        circles: &[(i64, i64)],
        rationals: &[(i64, i64)],
    ) -> ClassCoords {
        ClassCoords {
            free: free.iter().map(|&v| int(v)).collect(),
            torsion: torsion.iter().map(|&v| int(v)).collect(),
            circles: circles.iter().map(|&(p, q)| rat(p, q)).collect(),
            rationals: rationals.iter().map(|&(p, q)| rat(p, q)).collect(),
        }
    }

    fn triv() -> MixedModule {
        MixedModule::new(0, 0, 0, Vec::new())
    }

    #[test]
    fn multiplication_sequences_on_cyclic_quotients() {
        let z = MixedModule::new(1, 0, 0, Vec::new());
        let z2 = MixedModule::new(0, 0, 0, vec![int(2)]);
        let two = PresentedMap::new(z.clone(), z.clone(), &[cc(&[2], &[], &[], &[])]).unwrap();
        let onto = PresentedMap::new(z.clone(), z2.clone(), &[cc(&[], &[1], &[], &[])]).unwrap();
        let zero_in = PresentedMap::zero(triv(), z.clone());
        let zero_out = PresentedMap::zero(z2.clone(), triv());
        assert!(homology_at(&zero_in, &two, Witnesses::Drop).unwrap().module.is_zero());
        assert!(homology_at(&two, &onto, Witnesses::Drop).unwrap().module.is_zero());
        assert!(homology_at(&onto, &zero_out, Witnesses::Drop).unwrap().module.is_zero());

        // multiplication by four only reaches the even residues
        let four = PresentedMap::new(z.clone(), z.clone(), &[cc(&[4], &[], &[], &[])]).unwrap();
        assert_eq!(homology_at(&four, &onto, Witnesses::Drop).unwrap().module, z2);

        // the identity does not compose to zero with the projection
        let id = PresentedMap::new(z.clone(), z, &[cc(&[1], &[], &[], &[])]).unwrap();
        assert!(homology_at(&id, &onto, Witnesses::Drop).is_err());
    }

    #[test]
    fn torsion_maps_respect_orders() {
        let z2 = MixedModule::new(0, 0, 0, vec![int(2)]);
        let z4 = MixedModule::new(0, 0, 0, vec![int(4)]);
        // 1 ↦ 1 would need 2·1 ≡ 0 mod 4
        assert!(PresentedMap::new(z2.clone(), z4.clone(), &[cc(&[], &[1], &[], &[])]).is_err());
        let emb = PresentedMap::new(z2.clone(), z4.clone(), &[cc(&[], &[2], &[], &[])]).unwrap();
        let onto = PresentedMap::new(z4, z2, &[cc(&[], &[1], &[], &[])]).unwrap();
        assert!(homology_at(&emb, &onto, Witnesses::Drop).unwrap().module.is_zero());
        assert!(!is_isomorphism(&emb).unwrap());
    }

    #[test]
    fn the_rationals_cover_the_circle_exactly() {
        let z = MixedModule::new(1, 0, 0, Vec::new());
        let q = MixedModule::new(0, 1, 0, Vec::new());
        let t = MixedModule::new(0, 0, 1, Vec::new());
        let include = PresentedMap::new(z.clone(), q.clone(), &[cc(&[], &[], &[], &[(1, 1)])]).unwrap();
        let project = PresentedMap::new(q.clone(), t.clone(), &[cc(&[], &[], &[(1, 1)], &[])]).unwrap();
        let zero_in = PresentedMap::zero(triv(), z);
        let zero_out = PresentedMap::zero(t, triv());
        assert!(homology_at(&zero_in, &include, Witnesses::Drop).unwrap().module.is_zero());
        assert!(homology_at(&include, &project, Witnesses::Drop).unwrap().module.is_zero());
        assert!(homology_at(&project, &zero_out, Witnesses::Drop).unwrap().module.is_zero());
    }

    #[test]
    fn divisible_lift_entries_are_not_read_modulo_one() {
        let q = MixedModule::new(0, 1, 0, Vec::new());
        let t = MixedModule::new(0, 0, 1, Vec::new());
        // doubling the circle has kernel of order two but is onto
        let double = PresentedMap::new(t.clone(), t.clone(), &[cc(&[], &[], &[(2, 1)], &[])]).unwrap();
        let ker = homology_at(&PresentedMap::zero(triv(), t.clone()), &double, Witnesses::Drop)
            .unwrap();
        assert_eq!(ker.module, MixedModule::new(0, 0, 0, vec![int(2)]));
        let coker = homology_at(&double, &PresentedMap::zero(t.clone(), triv()), Witnesses::Drop)
            .unwrap();
        assert!(coker.module.is_zero());
        // doubling the line is invertible
        let scale = PresentedMap::new(q.clone(), q, &[cc(&[], &[], &[], &[(2, 1)])]).unwrap();
        assert!(is_isomorphism(&scale).unwrap());
        // halving is not a well-defined self-map of the circle
        assert!(PresentedMap::new(t.clone(), t, &[cc(&[], &[], &[(1, 2)], &[])]).is_err());
    }

    #[test]
    fn witnesses_factor_trivial_classes_through_the_incoming_map() {
        let z = MixedModule::new(1, 0, 0, Vec::new());
        let z2 = MixedModule::new(0, 0, 0, vec![int(2)]);
        let two = PresentedMap::new(z.clone(), z.clone(), &[cc(&[2], &[], &[], &[])]).unwrap();
        let onto = PresentedMap::new(z, z2, &[cc(&[], &[1], &[], &[])]).unwrap();
        let h = homology_at(&two, &onto, Witnesses::Keep).unwrap();
        assert!(h.module.is_zero());
        let mut x = MixedVec::zero(MixedSpace::new(1, 0));
        x.z[0] = int(6);
        let xa = augmented(&onto, &x).unwrap();
        assert_eq!(xa.z, vec![int(6), int(3)]);
        // 6 = 3·2 through the incoming doubling; B = Z has no relations
        let w = h.witness(&xa);
        assert_eq!(w.z, vec![int(3)]);
    }

    #[test]
    fn induced_maps_read_unreduced_circle_coordinates() {
        let s1 = crate::simplicial::circle(3).unwrap();
        let cx = crate::simplicial::circle_cochain_complex(&s1);
        let h1 = cx.cohomology_at(2, Witnesses::Drop);
        assert_eq!(h1.module, MixedModule::new(0, 0, 1, Vec::new()));
        let scale = |k: i64| {
            PresentedMap::induced(&h1, &h1, |v| {
                let mut w = MixedVec::zero(v.space());
                w.add_scaled_int(v, &int(k));
                w
            })
            .unwrap()
        };
        assert!(is_isomorphism(&scale(1)).unwrap());
        // tripling is onto with kernel of order three; a decode that reduced
        // mod one would instead report the zero map here
        let ker = homology_at(
            &PresentedMap::zero(triv(), h1.module.clone()),
            &scale(3),
            Witnesses::Drop,
        )
        .unwrap();
        assert_eq!(ker.module, MixedModule::new(0, 0, 0, vec![int(3)]));
    }
}
