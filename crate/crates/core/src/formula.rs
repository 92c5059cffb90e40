//! Propositional formulas fed to the reductions.

use std::fmt::Write;

use sha2::{Digest, Sha256};

use crate::error::{FrogError, Result};

/// Signed variable index: `k` is `x_k`, `-k` is its negation. Never zero.
pub type Literal = i32;

/// Conjunction of 3-literal clauses over variables `1..=vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub vars: u32,
    pub clauses: Vec<[Literal; 3]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// Prenex QBF. `prefix[k]` quantifies the variable played at step `k + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qbf {
    pub prefix: Vec<(Quantifier, u32)>,
    pub matrix: Cnf,
}

impl Cnf {
    pub fn new(vars: u32, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        let cnf = Cnf { vars, clauses };
        cnf.check()?;
        Ok(cnf)
    }

    fn check(&self) -> Result<()> {
        for (j, c) in self.clauses.iter().enumerate() {
            for &l in c {
                if l == 0 || l.unsigned_abs() > self.vars {
                    return Err(FrogError::Gadget(format!("clause {} uses literal {l} outside 1..={}", j + 1, self.vars)));
                }
            }
        }
        Ok(())
    }

    /// Value under `assignment[k - 1]` for variable `k`.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| literal_value(l, assignment)))
    }

    /// DIMACS text with one clause per line; also the input of [`Cnf::hash`].
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for c in &self.clauses {
            let _ = writeln!(out, "{} {} {} 0", c[0], c[1], c[2]);
        }
        out
    }

    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.to_dimacs().as_bytes()))
    }
}

fn literal_value(l: Literal, assignment: &[bool]) -> bool {
    let v = assignment[l.unsigned_abs() as usize - 1];
    if l > 0 {
        v
    } else {
        !v
    }
}

impl Qbf {
    /// Checks that every variable of the matrix is quantified exactly once.
    pub fn new(prefix: Vec<(Quantifier, u32)>, matrix: Cnf) -> Result<Self> {
        matrix.check()?;
        let mut seen = vec![false; matrix.vars as usize + 1];
        for &(_, v) in &prefix {
            if v == 0 || v > matrix.vars {
                return Err(FrogError::Gadget(format!("quantified variable {v} is not declared")));
            }
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(FrogError::Gadget(format!("variable {v} quantified twice")));
            }
        }
        if let Some(v) = (1..=matrix.vars).find(|&v| !seen[v as usize]) {
            return Err(FrogError::Gadget(format!("variable {v} is not quantified")));
        }
        Ok(Qbf { prefix, matrix })
    }

    /// Existentially quantifies every variable in index order.
    pub fn existential(matrix: Cnf) -> Self {
        let prefix = (1..=matrix.vars).map(|v| (Quantifier::Exists, v)).collect();
        Qbf { prefix, matrix }
    }

    /// Same formula with variables renamed so that `prefix[k]` is `k + 1`.
    pub fn in_prefix_order(&self) -> Qbf {
        let mut rename = vec![0i32; self.matrix.vars as usize + 1];
        for (k, &(_, v)) in self.prefix.iter().enumerate() {
            rename[v as usize] = k as i32 + 1;
        }
        let clauses = self
            .matrix
            .clauses
            .iter()
            .map(|c| c.map(|l| rename[l.unsigned_abs() as usize] * l.signum()))
            .collect();
        Qbf {
            prefix: self.prefix.iter().enumerate().map(|(k, &(q, _))| (q, k as u32 + 1)).collect(),
            matrix: Cnf { vars: self.matrix.vars, clauses },
        }
    }

    pub fn to_qdimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.matrix.vars, self.matrix.clauses.len());
        for &(q, v) in &self.prefix {
            let tag = if q == Quantifier::Exists { 'e' } else { 'a' };
            let _ = writeln!(out, "{tag} {v} 0");
        }
        for c in &self.matrix.clauses {
            let _ = writeln!(out, "{} {} {} 0", c[0], c[1], c[2]);
        }
        out
    }

    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.to_qdimacs().as_bytes()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_rename() {
        let cnf = Cnf::new(2, vec![[1, 1, -2]]).unwrap();
        assert!(cnf.eval(&[true, true]));
        assert!(!cnf.eval(&[false, true]));
        let q = Qbf::new(vec![(Quantifier::Forall, 2), (Quantifier::Exists, 1)], cnf).unwrap();
        let r = q.in_prefix_order();
        assert_eq!(r.matrix.clauses, vec![[2, 2, -1]]);
        assert_eq!(r.prefix, vec![(Quantifier::Forall, 1), (Quantifier::Exists, 2)]);
    }

    #[test]
    fn quantifier_errors() {
        let cnf = Cnf::new(2, vec![[1, 2, 2]]).unwrap();
        assert!(Qbf::new(vec![(Quantifier::Exists, 1)], cnf.clone()).is_err());
        assert!(Qbf::new(vec![(Quantifier::Exists, 1), (Quantifier::Forall, 1)], cnf).is_err());
        assert!(Cnf::new(1, vec![[1, 0, 1]]).is_err());
    }

    #[test]
    fn hash_is_stable() {
        let cnf = Cnf::new(1, vec![[1, 1, 1]]).unwrap();
        assert_eq!(cnf.hash(), Cnf::new(1, vec![[1, 1, 1]]).unwrap().hash());
        assert_ne!(cnf.hash(), Cnf::new(1, vec![[-1, 1, 1]]).unwrap().hash());
    }
}
