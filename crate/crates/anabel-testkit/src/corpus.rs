use std::collections::BTreeSet;

use anabel::cospec::Poset;
use anabel::polysimplicial::{PolyMorphism, PolysimplicialSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random corpora are seeded from `ANABEL_SEED` (default 0).
pub fn rng(stream: u64) -> ChaCha8Rng {
    let seed = std::env::var("ANABEL_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or(0);
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Subsets of `0..n` of size `k`, lexicographic.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Random connected graph with at most `max_edges` edges: a random tree
/// plus random extra edges (loops and multi-edges allowed).
pub fn random_connected_graph(
    rng: &mut impl rand::Rng,
    max_edges: usize,
) -> (usize, Vec<Vec<usize>>) {
    let n = rng.gen_range(1..=max_edges.min(6));
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push(vec![rng.gen_range(0..v), v]);
    }
    let extra = rng.gen_range(0..=max_edges - edges.len());
    for _ in 0..extra {
        edges.push(vec![rng.gen_range(0..n), rng.gen_range(0..n)]);
    }
    (n, edges)
}

/// Random poset on `n` elements: the transitive closure of random relations
/// `i < j` for `i < j`.
pub fn random_poset(rng: &mut impl rand::Rng, n: usize) -> Poset {
    let mut le = vec![vec![false; n]; n];
    for i in 0..n {
        le[i][i] = true;
        for j in i + 1..n {
            le[i][j] = rng.gen_bool(0.4);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le[i][k] && le[k][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    Poset::new(le).unwrap()
}

/// Random monotone map `s1 -> s2` sending minima to minima, by rejection
/// with a constant map onto a minimum as the fallback.
pub fn random_monotone(rng: &mut impl rand::Rng, s1: &Poset, s2: &Poset) -> Vec<usize> {
    let min2 = s2.minimal();
    for _ in 0..2000 {
        let f: Vec<usize> = (0..s1.len()).map(|_| rng.gen_range(0..s2.len())).collect();
        let monotone =
            (0..s1.len()).all(|a| (0..s1.len()).all(|b| !s1.le(a, b) || s2.le(f[a], f[b])));
        if monotone && s1.minimal().iter().all(|x| min2.contains(&f[*x])) {
            return f;
        }
    }
    vec![min2[0]; s1.len()]
}

/// Incidence of a monotone map: `R(x2, x1)` iff `x2 <= f(x1)`.
pub fn incidence(s1: &Poset, s2: &Poset, f: &[usize]) -> BTreeSet<(usize, usize)> {
    let mut r = BTreeSet::new();
    for x1 in 0..s1.len() {
        for x2 in 0..s2.len() {
            if s2.le(x2, f[x1]) {
                r.insert((x2, x1));
            }
        }
    }
    r
}

/// Morphism from `c` to `normal = c.normalize()` sending each generator to
/// the translate of its stratum generator.
pub fn to_normal_form<'a>(
    c: &'a PolysimplicialSet,
    normal: &'a PolysimplicialSet,
) -> PolyMorphism<'a> {
    let reps: Vec<usize> = c.nondegenerate_cells().into_values().flatten().collect();
    let images = (0..c.generators().len())
        .map(|g| {
            let (z0, alpha) = c.orbit_translate(c.generator_cell(g));
            let i = reps.iter().position(|&r| r == z0).unwrap();
            normal.pullback(normal.generator_cell(i), &alpha).unwrap()
        })
        .collect();
    PolyMorphism::new(c, normal, images).unwrap()
}
