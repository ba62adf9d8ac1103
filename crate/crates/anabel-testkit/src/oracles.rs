use std::collections::BTreeSet;

use anabel::algebra::{rank_q, rat, rat_int, FgAbGroup, Rational};
use anabel::gog::GraphOfFiniteGroups;
use anabel::graphs::{enumerate_covers, BranchGraph};
use anabel::polysimplicial::{LambdaMorphism, PolyIndex};
use anabel::splitting::radius_pushforward;
use num_traits::{ToPrimitive, Zero};

use crate::corpus::subsets;
use crate::groups::commutator_classes;

/// Fiber exponent by descending one p-th root at a time: the top level
/// splits once the valuation reaches `1 + 1/(p-1)`, and each root sits one
/// unit lower, which the pushforward must send back up.
pub fn count_by_recursion(p: u64, h: u32, v: &Rational) -> u32 {
    let one = rat_int(1);
    let split_at = &one + rat(1, p as i64 - 1);
    if h == 0 || *v < split_at {
        return 0;
    }
    let root = v - &one;
    assert_eq!(radius_pushforward(p, &root).unwrap(), *v);
    1 + count_by_recursion(p, h - 1, &root)
}

/// Edge subsets that form one simple cycle: connected, every touched vertex
/// of degree two (a loop counts twice).
pub fn simple_cycles_brute(g: &BranchGraph) -> Vec<Vec<usize>> {
    let true_edges = g.true_edges();
    let m = true_edges.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << m) {
        let es: Vec<usize> = (0..m)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| true_edges[i])
            .collect();
        let mut deg = vec![0; g.vertex_count()];
        for &e in &es {
            let ends = g.endpoints(e);
            deg[ends[0]] += 1;
            deg[ends[1]] += 1;
        }
        if deg.iter().any(|&d| d != 0 && d != 2) {
            continue;
        }
        let touched: Vec<usize> = (0..g.vertex_count()).filter(|&v| deg[v] > 0).collect();
        let mut seen = BTreeSet::from([touched[0]]);
        let mut grew = true;
        while grew {
            grew = false;
            for &e in &es {
                let ends = g.endpoints(e);
                if seen.contains(&ends[0]) != seen.contains(&ends[1]) {
                    seen.insert(ends[0]);
                    seen.insert(ends[1]);
                    grew = true;
                }
            }
        }
        if seen.len() == touched.len() {
            out.push(es);
        }
    }
    out
}

/// Rigidity kernel dimension recomputed from brute-force cycles of every
/// cover of degree at most `d`, with the rows used.
pub fn kernel_dimension_brute(g: &BranchGraph, d: usize) -> (usize, Vec<Vec<Rational>>) {
    let m = g.edge_count();
    let mut rows = Vec::new();
    for k in 1..=d {
        for c in enumerate_covers(g, k).unwrap() {
            for cyc in simple_cycles_brute(&c.total) {
                let mut row = vec![Rational::zero(); m];
                for e in cyc {
                    row[c.edge_map[e]] += rat_int(1);
                }
                rows.push(row);
            }
        }
    }
    (m - rank_q(&rows), rows)
}

/// All injective maps `[0..=a] -> [0..=b]`.
fn injections(a: usize, b: usize) -> Vec<Vec<usize>> {
    fn go(a: usize, b: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == a + 1 {
            out.push(cur.clone());
            return;
        }
        for x in 0..=b {
            if !cur.contains(&x) {
                cur.push(x);
                go(a, b, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(a, b, &mut Vec::new(), &mut out);
    out
}

/// Injective maps from a k-set into `0..n`, as value lists.
fn arrangements(k: usize, n: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in arrangements(k - 1, n) {
        for x in 0..n {
            if !rest.contains(&x) {
                let mut v = rest.clone();
                v.push(x);
                out.push(v);
            }
        }
    }
    out
}

/// Every triple `(J, f, alpha)`, deduplicated by the induced map of points.
pub fn hom_by_triples(m: &PolyIndex, n: &PolyIndex) -> BTreeSet<Vec<Vec<usize>>> {
    let (ms, ns) = (m.dims(), n.dims());
    let mut out = BTreeSet::new();
    for k in 0..=ms.len().min(ns.len()) {
        for j_set in subsets(ms.len(), k) {
            for f in arrangements(k, ns.len()) {
                let choices: Vec<Vec<Vec<usize>>> = ns
                    .iter()
                    .enumerate()
                    .map(|(l, &nl)| match f.iter().position(|&t| t == l) {
                        Some(i) => injections(ms[j_set[i]], nl),
                        None => (0..=nl).map(|x| vec![x]).collect(),
                    })
                    .collect();
                if choices.iter().any(Vec::is_empty) {
                    continue;
                }
                let mut pick = vec![0; choices.len()];
                loop {
                    let alpha: Vec<Vec<usize>> = pick
                        .iter()
                        .zip(&choices)
                        .map(|(&i, c)| c[i].clone())
                        .collect();
                    out.insert(
                        LambdaMorphism::from_triple(m, n, &j_set, &f, &alpha)
                            .unwrap()
                            .table(),
                    );
                    let mut i = 0;
                    while i < pick.len() {
                        pick[i] += 1;
                        if pick[i] < choices[i].len() {
                            break;
                        }
                        pick[i] = 0;
                        i += 1;
                    }
                    if i == pick.len() {
                        break;
                    }
                }
            }
        }
    }
    out
}

/// Isomorphism invariant of a finite abelian group: its order and, for each
/// `k` up to the order, the number of elements killed by `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionProfile(pub Vec<usize>);

impl TorsionProfile {
    pub fn of(g: &FgAbGroup) -> Self {
        let ds: Vec<usize> = g.torsion().iter().map(|d| d.to_usize().unwrap()).collect();
        let order: usize = ds.iter().product();
        TorsionProfile(
            (1..=order)
                .map(|k| ds.iter().map(|&d| num_gcd(k, d)).product())
                .collect(),
        )
    }
}

fn num_gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

/// Abelianized fundamental group computed by enumeration: the free rank is
/// the number of non-tree true edges, the torsion is the product of the
/// abelianized vertex groups modulo `b1(a) = b2(a)` over true edges.
pub fn gog_abelianization_brute(gog: &GraphOfFiniteGroups) -> (usize, TorsionProfile) {
    let g = gog.graph();
    let nv = g.vertex_count();
    // vertex group abelianizations as class labels
    let classes: Vec<Vec<usize>> = (0..nv)
        .map(|v| commutator_classes(gog.vertex_group(v)))
        .collect();
    let reps: Vec<Vec<usize>> = classes
        .iter()
        .map(|c| {
            c.iter()
                .copied()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect();
    let mul = |x: &[usize], y: &[usize]| -> Vec<usize> {
        (0..nv)
            .map(|v| classes[v][gog.vertex_group(v).mul(x[v], y[v])])
            .collect()
    };
    // all tuples of class representatives
    let mut elements: Vec<Vec<usize>> = vec![vec![]];
    for r in &reps {
        elements = elements
            .into_iter()
            .flat_map(|t| r.iter().map(move |&x| [t.clone(), vec![x]].concat()))
            .collect();
    }
    let identity: Vec<usize> = (0..nv)
        .map(|v| classes[v][gog.vertex_group(v).identity()])
        .collect();
    let mut gens = Vec::new();
    for e in g.true_edges() {
        let bs = g.edge_branches(e);
        let (v1, v2) = (g.branch(bs[0]).vertex, g.branch(bs[1]).vertex);
        for a in 0..gog.edge_group(e).order() {
            let mut x = identity.clone();
            x[v1] = classes[v1][gog.branch_map(bs[0])[a]];
            let mut y = identity.clone();
            let g2 = gog.vertex_group(v2);
            y[v2] = classes[v2][g2.inv(gog.branch_map(bs[1])[a])];
            gens.push(mul(&x, &y));
        }
    }
    let mut sub: BTreeSet<Vec<usize>> = BTreeSet::from([identity.clone()]);
    let mut frontier = vec![identity];
    while let Some(x) = frontier.pop() {
        for s in &gens {
            let y = mul(&x, s);
            if sub.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    let order = elements.len() / sub.len();
    let power = |x: &[usize], k: usize| -> Vec<usize> {
        let mut acc: Vec<usize> = x.to_vec();
        for _ in 1..k {
            acc = mul(&acc, x);
        }
        acc
    };
    let profile: Vec<usize> = (1..=order)
        .map(|k| {
            elements
                .iter()
                .filter(|x| sub.contains(&power(x, k)))
                .count()
                / sub.len()
        })
        .collect();
    (g.cycle_rank(), TorsionProfile(profile))
}
