//! Finite groups given by multiplication tables.
//!
//! Elements are indices `0..order`; every table is validated at load:
//! a two-sided identity must exist, multiplication must be associative and
//! every element must have an inverse.  Failures name the broken axiom.

/// A finite group with precomputed inverse table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    mul: Vec<Vec<u8>>,
    inv: Vec<u8>,
    identity: u8,
}

impl FiniteGroup {
    pub fn from_table(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, String> {
        let n = names.len();
        if n == 0 || n > 64 {
            return Err(format!("group order {} out of range 1..=64", n));
        }
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(format!("multiplication table is not {0}x{0}", n));
        }
        for row in &table {
            for &v in row {
                if v >= n {
                    return Err(format!("table entry {} out of range", v));
                }
            }
        }
        let mul: Vec<Vec<u8>> =
            table.iter().map(|r| r.iter().map(|&v| v as u8).collect()).collect();

        let mut identity = None;
        for e in 0..n {
            if (0..n).all(|g| mul[e][g] == g as u8 && mul[g][e] == g as u8) {
                identity = Some(e as u8);
                break;
            }
        }
        let identity = identity.ok_or("identity: no two-sided unit element")?;

        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let ab_c = mul[mul[a][b] as usize][c];
                    let a_bc = mul[a][mul[b][c] as usize];
                    if ab_c != a_bc {
                        return Err(format!(
                            "associativity: ({}*{})*{} != {}*({}*{})",
                            names[a], names[b], names[c], names[a], names[b], names[c]
                        ));
                    }
                }
            }
        }

        let mut inv = vec![0u8; n];
        for a in 0..n {
            match (0..n).find(|&b| mul[a][b] == identity && mul[b][a] == identity) {
                Some(b) => inv[a] = b as u8,
                None => return Err(format!("inverse: {} has no inverse", names[a])),
            }
        }

        Ok(FiniteGroup { names, mul, inv, identity })
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> u8 {
        self.identity
    }

    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize][b as usize]
    }

    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }

    pub fn name(&self, g: u8) -> &str {
        &self.names[g as usize]
    }

    pub fn element_named(&self, name: &str) -> Option<u8> {
        self.names.iter().position(|n| n == name).map(|i| i as u8)
    }

    /// Product g_1 * g_2 * ... * g_k (identity for the empty word).
    pub fn product(&self, word: &[u8]) -> u8 {
        word.iter().fold(self.identity, |acc, &g| self.mul(acc, g))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order() as u8;
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

/// Named groups: `trivial`, `cyclic:n`, `klein4`.
pub fn preset(name: &str) -> Result<FiniteGroup, String> {
    if name == "trivial" {
        return trivial();
    }
    if let Some(n) = name.strip_prefix("cyclic:") {
        let n: usize = n.parse().map_err(|_| format!("bad cyclic order {:?}", n))?;
        return cyclic(n);
    }
    if name == "klein4" {
        return klein4();
    }
    Err(format!("unknown group preset {:?}", name))
}

pub fn trivial() -> Result<FiniteGroup, String> {
    FiniteGroup::from_table(vec!["e".to_string()], vec![vec![0]])
}

pub fn cyclic(n: usize) -> Result<FiniteGroup, String> {
    if n == 0 {
        return Err("cyclic group needs positive order".to_string());
    }
    let names = (0..n)
        .map(|k| match k {
            0 => "e".to_string(),
            1 => "g".to_string(),
            _ => format!("g^{}", k),
        })
        .collect();
    let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    FiniteGroup::from_table(names, table)
}

pub fn klein4() -> Result<FiniteGroup, String> {
    let names = ["e", "a", "b", "ab"].iter().map(|s| s.to_string()).collect();
    // xor of 2-bit masks
    let table = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
    FiniteGroup::from_table(names, table)
}

/// All p-tuples over `0..n` in lexicographic order.
pub fn all_tuples(n: usize, p: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..p {
        let mut next = Vec::with_capacity(out.len() * n);
        for t in &out {
            for g in 0..n as u8 {
                let mut u = t.clone();
                u.push(g);
                next.push(u);
            }
        }
        out = next;
    }
    out
}
