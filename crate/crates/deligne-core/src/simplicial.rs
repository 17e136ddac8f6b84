//! Finite simplicial complexes, closed stars, cochains and their cohomology.
//!
//! A complex is built from facets by downward closure.  Every simplex is a
//! strictly increasing vertex list and all coboundary signs derive from that
//! ordering, so results are deterministic.
//!
//! Local data ("forms on an open set") lives on *closed stars*
//! St(S) = { tau in K : tau u S in K }.  When S spans a simplex St(S) is a
//! nonempty cone with apex any vertex of S, hence contractible; these stars
//! play the role of the contractible open sets of a good cover.
//!
//! Coefficients are Z or Q.  The circle group is modelled by the two-term
//! complex Z -> Q (so by the constant sheaf Q/Z): `circle_cohomology(x, n)`
//! computes H^n(X, Q/Z) as the (n+1)-st cohomology of the total complex
//! `T^t = C^t(X; Z) (+) C^{t-1}(X; Q)` with `D(z, q) = (dz, z - dq)`,
//! which is the mapping-cone description of Q/Z = coker(Z -> Q).
//! Integrality of a closed rational cochain is decided by pairing against the
//! lattice of integral cycles, not by looking at its entries.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};

use crate::exact::complex::{MixedComplex, Witnesses};
use crate::exact::matrix::{Int, Rat};
use crate::exact::mixed::{MixedMap, MixedSpace};
use crate::exact::module::MixedModule;
use crate::exact::sparse::{kernel_z_sparse, SpQ, SpZ, SvZ};

/// A finite simplicial complex with globally ordered vertices.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    labels: Vec<String>,
    facets: Vec<Vec<u32>>,
    /// `simplices[d]` lists the d-simplices as sorted vertex tuples, in
    /// lexicographic order.
    simplices: Vec<Vec<Vec<u32>>>,
    index: HashMap<Vec<u32>, u32>,
}

impl SimplicialComplex {
    /// Builds the downward closure of `facets` on vertices `0..n_vertices`.
    /// Vertices that appear in no facet become isolated points.
    pub fn from_facets(n_vertices: usize, facets: Vec<Vec<u32>>) -> Result<Self, String> {
        let labels = (0..n_vertices).map(|v| v.to_string()).collect();
        Self::build(labels, facets)
    }

    /// Builds a complex whose vertices carry the given names, with facets
    /// written in terms of those names.
    pub fn from_labeled(vertices: Vec<String>, facets: &[Vec<String>]) -> Result<Self, String> {
        let mut ids = HashMap::new();
        for (i, name) in vertices.iter().enumerate() {
            if ids.insert(name.clone(), i as u32).is_some() {
                return Err(format!("duplicate vertex name {:?}", name));
            }
        }
        let mut fs = Vec::with_capacity(facets.len());
        for f in facets {
            let mut g = Vec::with_capacity(f.len());
            for name in f {
                match ids.get(name) {
                    Some(&v) => g.push(v),
                    None => return Err(format!("unknown vertex {:?} in facet", name)),
                }
            }
            fs.push(g);
        }
        Self::build(vertices, fs)
    }

    fn build(labels: Vec<String>, mut facets: Vec<Vec<u32>>) -> Result<Self, String> {
        if labels.is_empty() {
            return Err("complex has no vertices".to_string());
        }
        let n = labels.len() as u32;
        let mut covered = vec![false; labels.len()];
        for f in facets.iter_mut() {
            if f.is_empty() {
                return Err("empty facet".to_string());
            }
            if f.len() > 16 {
                return Err(format!("facet with {} vertices is too large", f.len()));
            }
            f.sort_unstable();
            for w in f.windows(2) {
                if w[0] == w[1] {
                    return Err(format!("facet repeats vertex {}", w[0]));
                }
            }
            for &v in f.iter() {
                if v >= n {
                    return Err(format!("unknown vertex {} in facet", v));
                }
                covered[v as usize] = true;
            }
        }
        for (v, seen) in covered.iter().enumerate() {
            if !seen {
                facets.push(vec![v as u32]);
            }
        }

        let mut by_dim: Vec<BTreeSet<Vec<u32>>> = Vec::new();
        for f in &facets {
            for mask in 1u32..(1 << f.len()) {
                let s: Vec<u32> = (0..f.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| f[i])
                    .collect();
                let d = s.len() - 1;
                if by_dim.len() <= d {
                    by_dim.resize(d + 1, BTreeSet::new());
                }
                by_dim[d].insert(s);
            }
        }
        let simplices: Vec<Vec<Vec<u32>>> =
            by_dim.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut index = HashMap::new();
        for level in &simplices {
            for (i, s) in level.iter().enumerate() {
                index.insert(s.clone(), i as u32);
            }
        }
        Ok(SimplicialComplex { labels, facets, simplices, index })
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: u32) -> &str {
        &self.labels[v as usize]
    }

    pub fn facets(&self) -> &[Vec<u32>] {
        &self.facets
    }

    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn n_simplices(&self, d: usize) -> usize {
        self.simplices.get(d).map_or(0, |s| s.len())
    }

    pub fn simplices_of(&self, d: usize) -> &[Vec<u32>] {
        self.simplices.get(d).map_or(&[], |s| s.as_slice())
    }

    pub fn simplex(&self, d: usize, i: usize) -> &[u32] {
        &self.simplices[d][i]
    }

    /// Position of a sorted vertex tuple within its dimension, if present.
    pub fn simplex_index(&self, verts: &[u32]) -> Option<u32> {
        self.index.get(verts).copied()
    }

    pub fn contains(&self, verts: &[u32]) -> bool {
        self.index.contains_key(verts)
    }

    /// Human-readable name of a simplex, e.g. `[a,b,c]`.
    pub fn simplex_label(&self, verts: &[u32]) -> String {
        let names: Vec<&str> = verts.iter().map(|&v| self.label(v)).collect();
        format!("[{}]", names.join(","))
    }

    /// The closed star St(S): all faces of simplices containing S.  Empty
    /// exactly when S spans no simplex; the whole complex when S is empty.
    pub fn closed_star(&self, core: &[u32]) -> Result<StarSubcomplex, String> {
        let n = self.labels.len() as u32;
        for &v in core {
            if v >= n {
                return Err(format!("unknown vertex {}", v));
            }
        }
        let mut s: Vec<u32> = core.to_vec();
        s.sort_unstable();
        s.dedup();

        let mut by_dim: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); self.simplices.len()];
        for f in &self.facets {
            if !s.iter().all(|v| f.binary_search(v).is_ok()) {
                continue;
            }
            for mask in 1u32..(1 << f.len()) {
                let t: Vec<u32> = (0..f.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| f[i])
                    .collect();
                let d = t.len() - 1;
                by_dim[d].insert(self.index[&t]);
            }
        }
        let mut members: Vec<Vec<u32>> =
            by_dim.into_iter().map(|m| m.into_iter().collect()).collect();
        while members.last().is_some_and(|m| m.is_empty()) {
            members.pop();
        }
        Ok(StarSubcomplex { core: s, members })
    }

    /// The whole complex viewed as a subcomplex (the star of the empty set).
    pub fn full_star(&self) -> StarSubcomplex {
        let members = self
            .simplices
            .iter()
            .map(|level| (0..level.len() as u32).collect())
            .collect();
        StarSubcomplex { core: Vec::new(), members }
    }
}

/// A subcomplex closed under faces, recorded by global simplex positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarSubcomplex {
    pub core: Vec<u32>,
    /// `members[d]`: increasing positions into the base complex's d-simplices.
    members: Vec<Vec<u32>>,
}

impl StarSubcomplex {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn n_simplices(&self, d: usize) -> usize {
        self.members.get(d).map_or(0, |m| m.len())
    }

    pub fn members(&self, d: usize) -> &[u32] {
        self.members.get(d).map_or(&[], |m| m.as_slice())
    }

    /// Position within this subcomplex of the base d-simplex `global`.
    pub fn position_of(&self, d: usize, global: u32) -> Option<usize> {
        self.members.get(d)?.binary_search(&global).ok()
    }

    pub fn dim(&self) -> Option<usize> {
        self.members.len().checked_sub(1)
    }
}

/// The coboundary C^q(sub) -> C^{q+1}(sub): rows are (q+1)-simplices of the
/// subcomplex, columns its q-simplices, with alternating vertex-deletion signs.
pub fn coboundary_matrix(x: &SimplicialComplex, sub: &StarSubcomplex, q: usize) -> SpZ {
    let mut m = SpZ::new(sub.n_simplices(q + 1), sub.n_simplices(q));
    for (row, &g) in sub.members(q + 1).iter().enumerate() {
        let sigma = x.simplex(q + 1, g as usize);
        for l in 0..sigma.len() {
            let mut face = sigma.to_vec();
            face.remove(l);
            let fg = x.simplex_index(&face).expect("face of a simplex is a simplex");
            let col = sub
                .position_of(q, fg)
                .expect("subcomplex is closed under faces");
            let sign = if l % 2 == 0 { Int::one() } else { -Int::one() };
            m.push_entry(row as u32, col, sign);
        }
    }
    m
}

/// The boundary C_q -> C_{q-1} of the whole complex (adjoint of the
/// coboundary under the standard pairing).
pub fn boundary_matrix(x: &SimplicialComplex, q: usize) -> SpZ {
    if q == 0 {
        return SpZ::new(0, x.n_simplices(0));
    }
    let mut m = SpZ::new(x.n_simplices(q - 1), x.n_simplices(q));
    for (col, sigma) in x.simplices_of(q).iter().enumerate() {
        for l in 0..sigma.len() {
            let mut face = sigma.clone();
            face.remove(l);
            let row = x.simplex_index(&face).expect("face of a simplex is a simplex");
            let sign = if l % 2 == 0 { Int::one() } else { -Int::one() };
            m.push_entry(row, col, sign);
        }
    }
    m
}

/// A rational cochain on the whole complex; integer-valued cochains are the
/// ones with `is_integral()`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub degree: usize,
    /// One value per d-simplex, in the complex's simplex order.
    pub values: Vec<Rat>,
}

impl Cochain {
    pub fn zero(x: &SimplicialComplex, degree: usize) -> Self {
        Cochain { degree, values: vec![Rat::zero(); x.n_simplices(degree)] }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|v| v.is_integer())
    }
}

pub fn coboundary(x: &SimplicialComplex, c: &Cochain) -> Cochain {
    let q = c.degree;
    assert_eq!(c.values.len(), x.n_simplices(q), "cochain length mismatch");
    let mut out = Cochain::zero(x, q + 1);
    for (row, sigma) in x.simplices_of(q + 1).iter().enumerate() {
        let mut acc = Rat::zero();
        for l in 0..sigma.len() {
            let mut face = sigma.clone();
            face.remove(l);
            let i = x.simplex_index(&face).unwrap() as usize;
            if l % 2 == 0 {
                acc += &c.values[i];
            } else {
                acc -= &c.values[i];
            }
        }
        out.values[row] = acc;
    }
    out
}

fn z_block_map(a: SpZ) -> MixedMap {
    let src = MixedSpace::new(a.ncols(), 0);
    let dst = MixedSpace::new(a.rows, 0);
    let c = SpQ::new(0, src.n_z);
    let d = SpQ::new(0, 0);
    MixedMap { src, dst, a, c, d }
}

/// The integer cochain complex of a subcomplex, as a mixed complex in
/// degrees 0..=dim.
pub fn z_cochain_complex(x: &SimplicialComplex, sub: &StarSubcomplex) -> MixedComplex {
    let top = match sub.dim() {
        None => return MixedComplex::new(0, Vec::new(), Vec::new()),
        Some(t) => t,
    };
    let spaces = (0..=top).map(|d| MixedSpace::new(sub.n_simplices(d), 0)).collect();
    let maps = (0..top).map(|d| z_block_map(coboundary_matrix(x, sub, d))).collect();
    MixedComplex::new(0, spaces, maps)
}

pub fn star_cohomology_z(x: &SimplicialComplex, sub: &StarSubcomplex, n: usize) -> MixedModule {
    z_cochain_complex(x, sub).cohomology_at(n as isize, Witnesses::Drop).module
}

/// H^n(X, Z).
pub fn cohomology_z(x: &SimplicialComplex, n: usize) -> MixedModule {
    star_cohomology_z(x, &x.full_star(), n)
}

/// The total complex of Z -> Q over the cochain complex: degree t holds
/// C^t(Z) (+) C^{t-1}(Q) with D(z, q) = (dz, z - dq).
pub fn circle_cochain_complex(x: &SimplicialComplex) -> MixedComplex {
    let sub = x.full_star();
    let top = x.dim();
    let count = |d: usize| x.n_simplices(d);
    let spaces: Vec<MixedSpace> = (0..=top + 1)
        .map(|t| MixedSpace::new(count(t), if t == 0 { 0 } else { count(t - 1) }))
        .collect();
    let mut maps = Vec::with_capacity(top + 1);
    for t in 0..=top {
        let a = coboundary_matrix(x, &sub, t);
        let mut c = SpQ::new(count(t), count(t));
        for i in 0..count(t) {
            c.push_entry(i as u32, i, Rat::one());
        }
        let mut d = SpQ::new(count(t), if t == 0 { 0 } else { count(t - 1) });
        if t > 0 {
            let db = coboundary_matrix(x, &sub, t - 1);
            for (col, cv) in db.cols.iter().enumerate() {
                for (row, v) in cv {
                    d.push_entry(*row, col, -Rat::from_integer(v.clone()));
                }
            }
        }
        maps.push(MixedMap { src: spaces[t], dst: spaces[t + 1], a, c, d });
    }
    MixedComplex::new(0, spaces, maps)
}

/// H^n(X, Q/Z) — the model of cohomology with circle coefficients.
pub fn circle_cohomology(x: &SimplicialComplex, n: usize) -> MixedModule {
    circle_cochain_complex(x).cohomology_at(n as isize + 1, Witnesses::Drop).module
}

/// A basis of the lattice of integral q-cycles, ker(C_q -> C_{q-1}).
pub fn cycle_lattice(x: &SimplicialComplex, q: usize) -> Vec<SvZ> {
    kernel_z_sparse(&boundary_matrix(x, q))
}

/// Pairing of a q-cochain with an integral q-chain.
pub fn pairing(c: &Cochain, z: &SvZ) -> Rat {
    let mut acc = Rat::zero();
    for (i, v) in z {
        acc += &c.values[*i as usize] * Rat::from_integer(v.clone());
    }
    acc
}

/// Whether a closed rational cochain has integral periods, i.e. pairs
/// integrally with every integral cycle.  Errors if the cochain is not
/// closed.
pub fn is_integral_closed(x: &SimplicialComplex, c: &Cochain) -> Result<bool, String> {
    if !coboundary(x, c).is_zero() {
        return Err("cochain is not closed".to_string());
    }
    Ok(cycle_lattice(x, c.degree).iter().all(|z| pairing(c, z).is_integer()))
}

/// The augmented Cech column of a simplex tau: degree j holds one Z per
/// (j+1)-element vertex set S with tau u S a simplex (degree -1 is S empty),
/// with the alternating Cech differential.  Always exact: the column is the
/// augmented cochain complex of a cone with apex any vertex of tau.
pub fn cech_column(x: &SimplicialComplex, tau: &[u32]) -> MixedComplex {
    assert!(x.contains(tau), "cech_column expects a simplex of the complex");
    let mut by_size: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new()];
    by_size[0].insert(Vec::new());
    for f in x.facets() {
        if !tau.iter().all(|v| f.binary_search(v).is_ok()) {
            continue;
        }
        for mask in 1u32..(1 << f.len()) {
            let s: Vec<u32> = (0..f.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| f[i])
                .collect();
            if by_size.len() <= s.len() {
                by_size.resize(s.len() + 1, BTreeSet::new());
            }
            by_size[s.len()].insert(s);
        }
    }
    let levels: Vec<Vec<Vec<u32>>> = by_size.into_iter().map(|s| s.into_iter().collect()).collect();
    let spaces: Vec<MixedSpace> =
        levels.iter().map(|l| MixedSpace::new(l.len(), 0)).collect();
    let mut maps = Vec::new();
    for j in 0..levels.len() - 1 {
        let mut a = SpZ::new(levels[j + 1].len(), levels[j].len());
        for (row, t) in levels[j + 1].iter().enumerate() {
            for m in 0..t.len() {
                let mut s = t.clone();
                s.remove(m);
                let col = levels[j].binary_search(&s).expect("subset of a valid tuple");
                let sign = if m % 2 == 0 { Int::one() } else { -Int::one() };
                a.push_entry(row as u32, col, sign);
            }
        }
        maps.push(z_block_map(a));
    }
    MixedComplex::new(-1, spaces, maps)
}

/// Named example complexes: `point`, `circle:k` (a k-gon, k >= 3),
/// `sphere:octahedron`, `sphere:boundary4simplex`.
pub fn preset(name: &str) -> Result<SimplicialComplex, String> {
    if name == "point" {
        return point();
    }
    if let Some(k) = name.strip_prefix("circle:") {
        let k: usize = k.parse().map_err(|_| format!("bad circle size {:?}", k))?;
        return circle(k);
    }
    match name {
        "sphere:octahedron" => octahedron(),
        "sphere:boundary4simplex" => boundary_4_simplex(),
        _ => Err(format!("unknown complex preset {:?}", name)),
    }
}

pub fn point() -> Result<SimplicialComplex, String> {
    SimplicialComplex::from_facets(1, vec![vec![0]])
}

/// The boundary of a k-gon: vertices 0..k, edges {i, i+1 mod k}.
pub fn circle(k: usize) -> Result<SimplicialComplex, String> {
    if k < 3 {
        return Err("circle needs at least 3 vertices".to_string());
    }
    let facets = (0..k)
        .map(|i| vec![i as u32, ((i + 1) % k) as u32])
        .collect();
    SimplicialComplex::from_facets(k, facets)
}

/// The octahedron, a triangulated 2-sphere.  Antipodal vertex pairs are
/// (0,1), (2,3), (4,5); the 8 facets pick one vertex from each pair.
pub fn octahedron() -> Result<SimplicialComplex, String> {
    let mut facets = Vec::new();
    for i in 0..2u32 {
        for j in 2..4u32 {
            for k in 4..6u32 {
                facets.push(vec![i, j, k]);
            }
        }
    }
    SimplicialComplex::from_facets(6, facets)
}

/// The boundary of the 4-simplex, a triangulated 3-sphere.
pub fn boundary_4_simplex() -> Result<SimplicialComplex, String> {
    let facets = (0..5u32)
        .map(|skip| (0..5).filter(|&v| v != skip).collect())
        .collect();
    SimplicialComplex::from_facets(5, facets)
}

/// The 6-vertex triangulation of the real projective plane (antipodal
/// quotient of the icosahedron).  Useful as a torsion fixture:
/// H^2(RP^2, Z) = Z/2.
pub fn projective_plane() -> Result<SimplicialComplex, String> {
    let facets = [
        [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 1, 5],
        [1, 2, 4], [2, 4, 5], [2, 3, 5], [1, 3, 5], [1, 3, 4],
    ];
    SimplicialComplex::from_facets(6, facets.iter().map(|f| f.to_vec()).collect())
}
