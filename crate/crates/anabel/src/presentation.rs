//! Finite group presentations with elementary Tietze simplification.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

use crate::algebra::{cokernel_group, FgAbGroup, IntMatrix};

/// A word over generators: letter `k > 0` is generator `k - 1`, `-k` its inverse.
pub type Word = Vec<i32>;

pub fn letter(generator: usize, inverse: bool) -> i32 {
    let k = generator as i32 + 1;
    if inverse {
        -k
    } else {
        k
    }
}

pub fn invert(w: &[i32]) -> Word {
    w.iter().rev().map(|&x| -x).collect()
}

pub fn free_reduce(w: &[i32]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Free and cyclic reduction.
pub fn cyclic_reduce(w: &[i32]) -> Word {
    let mut v = free_reduce(w);
    while v.len() >= 2 && v[0] == -v[v.len() - 1] {
        v.pop();
        v.remove(0);
    }
    v
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl GroupPresentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Self {
        GroupPresentation {
            generators,
            relators,
        }
    }

    /// Exponent-sum matrix modulo its row space.
    pub fn abelianization(&self) -> FgAbGroup {
        let n = self.generators.len();
        let rows: Vec<Vec<BigInt>> = self
            .relators
            .iter()
            .map(|r| {
                let mut row = vec![0i64; n];
                for &x in r {
                    row[x.unsigned_abs() as usize - 1] += x.signum() as i64;
                }
                row.into_iter().map(BigInt::from).collect()
            })
            .collect();
        cokernel_group(&IntMatrix::from_big_rows(&rows, n))
    }

    /// Elementary Tietze moves: reduce relators, drop trivial and duplicate
    /// ones, and eliminate a generator occurring exactly once in a relator.
    /// At most `budget` eliminations are performed.
    pub fn simplify(&self, budget: usize) -> GroupPresentation {
        let mut gens: Vec<Option<String>> = self.generators.iter().cloned().map(Some).collect();
        let mut rels: Vec<Word> = self.relators.clone();
        let mut steps = 0;
        loop {
            rels = tidy(&rels);
            if steps >= budget {
                break;
            }
            // shortest relator first, then lowest generator
            let mut order: Vec<usize> = (0..rels.len()).collect();
            order.sort_by_key(|&i| (rels[i].len(), i));
            let mut pick = None;
            'search: for &ri in &order {
                let r = &rels[ri];
                let mut seen: BTreeSet<u32> = BTreeSet::new();
                for &x in r {
                    seen.insert(x.unsigned_abs());
                }
                for g in seen {
                    if r.iter().filter(|x| x.unsigned_abs() == g).count() == 1 {
                        pick = Some((ri, g));
                        break 'search;
                    }
                }
            }
            let Some((ri, g)) = pick else { break };
            let r = rels.remove(ri);
            let pos = r
                .iter()
                .position(|x| x.unsigned_abs() == g)
                .expect("letter present");
            // r = u x^e v = 1  =>  x^e = u^-1 v^-1 ; rotate so x is first: x^e w = 1 => x^e = w^-1
            let mut rotated: Word = r[pos..].to_vec();
            rotated.extend_from_slice(&r[..pos]);
            let e = rotated[0];
            let w = &rotated[1..];
            let replacement: Word = if e > 0 { invert(w) } else { w.to_vec() };
            let k = g as i32;
            rels = rels
                .iter()
                .map(|rel| {
                    let mut out = Vec::with_capacity(rel.len());
                    for &x in rel {
                        if x == k {
                            out.extend_from_slice(&replacement);
                        } else if x == -k {
                            out.extend(invert(&replacement));
                        } else {
                            out.push(x);
                        }
                    }
                    out
                })
                .collect();
            gens[g as usize - 1] = None;
            steps += 1;
        }
        // renumber surviving generators
        let mut remap = vec![0i32; gens.len()];
        let mut names = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            if let Some(name) = g {
                names.push(name.clone());
                remap[i] = names.len() as i32;
            }
        }
        let relators = rels
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| remap[x.unsigned_abs() as usize - 1] * x.signum())
                    .collect()
            })
            .collect();
        GroupPresentation {
            generators: names,
            relators,
        }
    }

    /// Free of the given rank after simplification (no relators left).
    pub fn is_free_presentation(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn format_word(&self, w: &[i32]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter()
            .map(|&x| {
                let name = &self.generators[x.unsigned_abs() as usize - 1];
                if x > 0 {
                    name.clone()
                } else {
                    format!("{name}^-1")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn tidy(rels: &[Word]) -> Vec<Word> {
    let mut seen: BTreeSet<Word> = BTreeSet::new();
    let mut out = Vec::new();
    for r in rels {
        let c = cyclic_reduce(r);
        if c.is_empty() {
            continue;
        }
        if seen.insert(c.clone()) {
            out.push(c);
        }
    }
    out
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "< {} | ", self.generators.join(", "))?;
        let rels: Vec<String> = self.relators.iter().map(|r| self.format_word(r)).collect();
        write!(f, "{} >", rels.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn reduction() {
        assert_eq!(free_reduce(&[1, 2, -2, -1, 3]), vec![3]);
        assert_eq!(cyclic_reduce(&[-1, 2, 1]), vec![2]);
    }

    #[test]
    fn eliminates_redundant_generator() {
        // <a, b | a b^-1> = Z
        let p = GroupPresentation::new(names(2), vec![vec![1, -2]]);
        let s = p.simplify(10);
        assert_eq!(s.generators.len(), 1);
        assert!(s.relators.is_empty());
    }

    #[test]
    fn keeps_torsion_relator() {
        let p = GroupPresentation::new(names(1), vec![vec![1, 1, 1]]);
        let s = p.simplify(10);
        assert_eq!(s.relators, vec![vec![1, 1, 1]]);
        assert_eq!(s.abelianization().to_string(), "Z/3");
    }

    #[test]
    fn abelianization_of_commutator() {
        let p = GroupPresentation::new(names(2), vec![vec![1, 2, -1, -2]]);
        assert_eq!(p.abelianization(), FgAbGroup::free(2));
    }
}
