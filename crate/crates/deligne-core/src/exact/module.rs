//! Canonical forms of the value groups: finite direct sums of Z, Q, Q/Z and
//! cyclic groups Z/d with the divisor chain d₁ | d₂ | ⋯.

use super::matrix::Int;
use num_traits::{One, Zero};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedModule {
    pub rank_z: usize,
    pub rank_q: usize,
    /// number of Q/Z summands
    pub circles: usize,
    /// finite cyclic orders, each ≥ 2, in a divisibility chain
    pub torsion: Vec<Int>,
}

impl MixedModule {
    pub fn zero() -> Self {
        MixedModule { rank_z: 0, rank_q: 0, circles: 0, torsion: Vec::new() }
    }

    pub fn new(rank_z: usize, rank_q: usize, circles: usize, torsion: Vec<Int>) -> Self {
        for w in torsion.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "torsion orders must form a divisor chain");
        }
        assert!(torsion.iter().all(|d| d > &Int::one()), "trivial torsion order");
        MixedModule { rank_z, rank_q, circles, torsion }
    }

    pub fn is_zero(&self) -> bool {
        self.rank_z == 0 && self.rank_q == 0 && self.circles == 0 && self.torsion.is_empty()
    }

    /// dim_Q (self ⊗ Q): torsion and Q/Z parts die, Z and Q count.
    pub fn q_rank(&self) -> usize {
        self.rank_z + self.rank_q
    }

    /// dim_{F_p} of the p-torsion subgroup.
    pub fn p_torsion_dim(&self, p: &Int) -> usize {
        self.circles + self.torsion.iter().filter(|d| (&(*d % p)).is_zero()).count()
    }

    /// dim_{F_p} of self ⊗ F_p (Q and Q/Z are divisible, torsion survives iff p | d).
    pub fn mod_p_dim(&self, p: &Int) -> usize {
        self.rank_z + self.torsion.iter().filter(|d| (&(*d % p)).is_zero()).count()
    }

    /// Total number of summands in the canonical decomposition.
    pub fn n_summands(&self) -> usize {
        self.rank_z + self.rank_q + self.circles + self.torsion.len()
    }

    /// Direct sum (used when a group splits over slot types).
    pub fn direct_sum(&self, other: &MixedModule) -> MixedModule {
        let mut torsion: Vec<Int> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        // restore the divisor chain: repeatedly replace (a, b) by (gcd, lcm)
        loop {
            let mut changed = false;
            for i in 0..torsion.len() {
                for j in i + 1..torsion.len() {
                    if !(&torsion[j] % &torsion[i]).is_zero() {
                        let g = num_integer::Integer::gcd(&torsion[i], &torsion[j]);
                        let l = num_integer::Integer::lcm(&torsion[i], &torsion[j]);
                        torsion[i] = g;
                        torsion[j] = l;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        torsion.retain(|d| d > &Int::one());
        torsion.sort();
        MixedModule {
            rank_z: self.rank_z + other.rank_z,
            rank_q: self.rank_q + other.rank_q,
            circles: self.circles + other.circles,
            torsion,
        }
    }
}

impl fmt::Display for MixedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.rank_z == 1 {
            parts.push("Z".into());
        } else if self.rank_z > 1 {
            parts.push(format!("Z^{}", self.rank_z));
        }
        if self.rank_q == 1 {
            parts.push("Q".into());
        } else if self.rank_q > 1 {
            parts.push(format!("Q^{}", self.rank_q));
        }
        if self.circles == 1 {
            parts.push("(Q/Z)".into());
        } else if self.circles > 1 {
            parts.push(format!("(Q/Z)^{}", self.circles));
        }
        for d in &self.torsion {
            parts.push(format!("Z/{}", d));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::int;

    #[test]
    fn display_forms() {
        assert_eq!(MixedModule::zero().to_string(), "0");
        assert_eq!(MixedModule::new(1, 2, 1, vec![int(2), int(4)]).to_string(), "Z + Q^2 + (Q/Z) + Z/2 + Z/4");
        assert_eq!(MixedModule::new(0, 0, 0, vec![int(3)]).to_string(), "Z/3");
        assert_eq!(MixedModule::new(0, 1, 0, vec![]).to_string(), "Q");
    }

    #[test]
    #[should_panic(expected = "divisor chain")]
    fn rejects_broken_chain() {
        MixedModule::new(0, 0, 0, vec![int(4), int(6)]);
    }

    #[test]
    fn direct_sum_restores_chain() {
        let a = MixedModule::new(0, 0, 0, vec![int(4)]);
        let b = MixedModule::new(0, 0, 0, vec![int(6)]);
        let s = a.direct_sum(&b);
        // Z/4 ⊕ Z/6 = Z/2 ⊕ Z/12
        assert_eq!(s.torsion, vec![int(2), int(12)]);
        let t = MixedModule::new(1, 0, 1, vec![]).direct_sum(&MixedModule::new(0, 2, 0, vec![int(3)]));
        assert_eq!(t.to_string(), "Z + Q^2 + (Q/Z) + Z/3");
    }

    #[test]
    fn numeric_invariants() {
        let m = MixedModule::new(2, 1, 3, vec![int(2), int(12)]);
        assert_eq!(m.q_rank(), 3);
        assert_eq!(m.p_torsion_dim(&int(2)), 3 + 2);
        assert_eq!(m.p_torsion_dim(&int(3)), 3 + 1);
        assert_eq!(m.mod_p_dim(&int(2)), 2 + 2);
        // circles - rank_z is independent of p
        assert_eq!(
            m.p_torsion_dim(&int(2)) as isize - m.mod_p_dim(&int(2)) as isize,
            m.circles as isize - m.rank_z as isize
        );
    }
}
