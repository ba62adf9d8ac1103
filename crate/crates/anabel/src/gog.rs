//! Graphs of finite groups, their fundamental groups at finite level, covers
//! given by equivariant sets, and Schreier extensions built from cocycle data.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use thiserror::Error;

use crate::algebra::{cokernel_group, FgAbGroup, IntMatrix};
use crate::graphs::{BranchGraph, GraphCover, GraphError};
use crate::monoids::{is_prime, prime_factors};
use crate::presentation::{letter, GroupPresentation, Word};

/// Largest vertex or edge group accepted.
pub const MAX_GROUP_ORDER: usize = 64;
/// Largest table built for an extension.
pub const MAX_EXTENSION_ORDER: usize = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group table is not square or refers to unknown elements")]
    BadTable,
    #[error("group has no elements")]
    Empty,
    #[error("no identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("associativity fails at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("group of order {order} exceeds the limit {limit}")]
    TooLarge { order: usize, limit: usize },
    #[error("permutation generators have inconsistent degree or are not permutations")]
    BadPermutation,
    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("branch map of branch {0} is not injective")]
    NotInjective(usize),
    #[error("expected {expected} {what}, got {got}")]
    Count {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("spanning tree is invalid")]
    BadTree,
    #[error("alpha({h}) is not an automorphism")]
    NotAutomorphism { h: usize },
    #[error("first cocycle condition fails at ({h}, {h2}) on element {x}")]
    CocycleAlpha { h: usize, h2: usize, x: usize },
    #[error("second cocycle condition fails at ({h}, {h2}, {h3})")]
    CocycleG { h: usize, h2: usize, h3: usize },
    #[error("2g - h must be non-negative (g = {g}, h = {h})")]
    NegativeCorank { g: u64, h: u64 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Finite group by multiplication table: `mul(a, b) = table[a][b]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Checks closure, identity, inverses and associativity exhaustively.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        if n > MAX_EXTENSION_ORDER {
            return Err(GroupError::TooLarge {
                order: n,
                limit: MAX_EXTENSION_ORDER,
            });
        }
        if table
            .iter()
            .any(|r| r.len() != n || r.iter().any(|&x| x >= n))
        {
            return Err(GroupError::BadTable);
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or(GroupError::NoInverse(a))?;
            inverses.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            table,
            identity,
            inverses,
        })
    }

    pub fn trivial() -> Self {
        FiniteGroup {
            table: vec![vec![0]],
            identity: 0,
            inverses: vec![0],
        }
    }

    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::Empty);
        }
        Self::from_table(
            (0..n)
                .map(|a| (0..n).map(|b| (a + b) % n).collect())
                .collect(),
        )
    }

    /// Closure of permutation generators; element 0 is the identity and the
    /// rest are in order of discovery by breadth-first search.
    pub fn from_permutations(generators: &[Vec<usize>]) -> Result<Self, GroupError> {
        let degree = generators.first().map_or(0, Vec::len);
        for g in generators {
            let set: BTreeSet<usize> = g.iter().copied().collect();
            if g.len() != degree || set.len() != degree || set.iter().any(|&x| x >= degree) {
                return Err(GroupError::BadPermutation);
            }
        }
        let compose =
            |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&x| a[x]).collect() };
        let mut elements: Vec<Vec<usize>> = vec![(0..degree).collect()];
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::from([(elements[0].clone(), 0)]);
        let mut queue = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for g in generators {
                let x = compose(&elements[i], g);
                if !index.contains_key(&x) {
                    if elements.len() >= MAX_EXTENSION_ORDER {
                        return Err(GroupError::TooLarge {
                            order: elements.len() + 1,
                            limit: MAX_EXTENSION_ORDER,
                        });
                    }
                    index.insert(x.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(x);
                }
            }
        }
        let table = elements
            .iter()
            .map(|a| elements.iter().map(|b| index[&compose(a, b)]).collect())
            .collect();
        Self::from_table(table)
    }

    pub fn symmetric(n: usize) -> Result<Self, GroupError> {
        if n < 2 {
            return Ok(Self::trivial());
        }
        let swap: Vec<usize> = (0..n).map(|i| if i < 2 { 1 - i } else { i }).collect();
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        Self::from_permutations(&[swap, cycle])
    }

    /// Pairs `(a, b)` indexed `a * |other| + b`.
    pub fn direct_product(&self, other: &FiniteGroup) -> Result<Self, GroupError> {
        let (n, m) = (self.order(), other.order());
        let table = (0..n * m)
            .map(|x| {
                (0..n * m)
                    .map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m))
                    .collect()
            })
            .collect();
        Self::from_table(table)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Subgroup generated by a set of elements.
    pub fn closure(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut out = BTreeSet::from([self.identity]);
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if out.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        out
    }

    pub fn commutator_subgroup(&self) -> BTreeSet<usize> {
        let n = self.order();
        let comms: Vec<usize> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b))))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        self.closure(&comms)
    }

    /// Greedy generating set: repeatedly add the smallest element outside.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut sub = self.closure(&gens);
        while sub.len() < self.order() {
            let x = (0..self.order())
                .find(|x| !sub.contains(x))
                .expect("proper subgroup");
            gens.push(x);
            sub = self.closure(&gens);
        }
        gens
    }

    pub fn is_homomorphism(&self, target: &FiniteGroup, map: &[usize]) -> Result<(), GroupError> {
        if map.len() != self.order() || map.iter().any(|&x| x >= target.order()) {
            return Err(GroupError::NotHomomorphism(
                "wrong domain or codomain".into(),
            ));
        }
        for a in 0..self.order() {
            for b in 0..self.order() {
                if map[self.mul(a, b)] != target.mul(map[a], map[b]) {
                    return Err(GroupError::NotHomomorphism(format!("fails on ({a}, {b})")));
                }
            }
        }
        Ok(())
    }

    /// An isomorphism `self -> other` if one exists.
    pub fn find_isomorphism(&self, other: &FiniteGroup) -> Option<Vec<usize>> {
        if self.order() != other.order() {
            return None;
        }
        let gens = self.generating_set();
        let orders: Vec<usize> = gens.iter().map(|&g| self.element_order(g)).collect();
        let candidates: Vec<Vec<usize>> = orders
            .iter()
            .map(|&o| {
                (0..other.order())
                    .filter(|&y| other.element_order(y) == o)
                    .collect()
            })
            .collect();
        let mut images = vec![0; gens.len()];
        self.search_iso(other, &gens, &candidates, &mut images, 0)
    }

    fn search_iso(
        &self,
        other: &FiniteGroup,
        gens: &[usize],
        candidates: &[Vec<usize>],
        images: &mut Vec<usize>,
        depth: usize,
    ) -> Option<Vec<usize>> {
        if depth == gens.len() {
            return self.extend_map(other, gens, images);
        }
        for &y in &candidates[depth] {
            images[depth] = y;
            if let Some(m) = self.search_iso(other, gens, candidates, images, depth + 1) {
                return Some(m);
            }
        }
        None
    }

    fn extend_map(
        &self,
        other: &FiniteGroup,
        gens: &[usize],
        images: &[usize],
    ) -> Option<Vec<usize>> {
        let mut map = vec![usize::MAX; self.order()];
        map[self.identity] = other.identity;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for (g, &y) in gens.iter().zip(images) {
                let xg = self.mul(x, *g);
                let img = other.mul(map[x], y);
                if map[xg] == usize::MAX {
                    map[xg] = img;
                    queue.push_back(xg);
                } else if map[xg] != img {
                    return None;
                }
            }
        }
        let bijective = map.iter().collect::<BTreeSet<_>>().len() == self.order();
        (bijective && self.is_homomorphism(other, &map).is_ok()).then_some(map)
    }
}

/// Graph of finite groups. `branch_maps[b]` embeds the group of the edge of
/// branch `b` into the group of its vertex.
#[derive(Clone, Debug)]
pub struct GraphOfFiniteGroups {
    graph: BranchGraph,
    vertex_groups: Vec<FiniteGroup>,
    edge_groups: Vec<FiniteGroup>,
    branch_maps: Vec<Vec<usize>>,
}

impl GraphOfFiniteGroups {
    pub fn new(
        graph: BranchGraph,
        vertex_groups: Vec<FiniteGroup>,
        edge_groups: Vec<FiniteGroup>,
        branch_maps: Vec<Vec<usize>>,
    ) -> Result<Self, GroupError> {
        let count = |what, expected, got| {
            if expected == got {
                Ok(())
            } else {
                Err(GroupError::Count {
                    what,
                    expected,
                    got,
                })
            }
        };
        count("vertex groups", graph.vertex_count(), vertex_groups.len())?;
        count("edge groups", graph.edge_count(), edge_groups.len())?;
        count("branch maps", graph.branch_count(), branch_maps.len())?;
        for g in vertex_groups.iter().chain(&edge_groups) {
            if g.order() > MAX_GROUP_ORDER {
                return Err(GroupError::TooLarge {
                    order: g.order(),
                    limit: MAX_GROUP_ORDER,
                });
            }
        }
        for (b, map) in branch_maps.iter().enumerate() {
            let br = graph.branch(b);
            edge_groups[br.edge].is_homomorphism(&vertex_groups[br.vertex], map)?;
            if map.iter().collect::<BTreeSet<_>>().len() != map.len() {
                return Err(GroupError::NotInjective(b));
            }
        }
        Ok(GraphOfFiniteGroups {
            graph,
            vertex_groups,
            edge_groups,
            branch_maps,
        })
    }

    /// All groups trivial.
    pub fn trivial(graph: BranchGraph) -> Self {
        GraphOfFiniteGroups {
            vertex_groups: vec![FiniteGroup::trivial(); graph.vertex_count()],
            edge_groups: vec![FiniteGroup::trivial(); graph.edge_count()],
            branch_maps: vec![vec![0]; graph.branch_count()],
            graph,
        }
    }

    pub fn graph(&self) -> &BranchGraph {
        &self.graph
    }

    pub fn vertex_group(&self, v: usize) -> &FiniteGroup {
        &self.vertex_groups[v]
    }

    pub fn edge_group(&self, e: usize) -> &FiniteGroup {
        &self.edge_groups[e]
    }

    pub fn branch_map(&self, b: usize) -> &[usize] {
        &self.branch_maps[b]
    }
}

/// Presentation with generators `e<id>` for each non-tree true edge, then
/// `v<v>_<x>` for each nontrivial element `x` of each vertex group. Cusp
/// edges contribute neither generators nor relators.
pub fn pi1_presentation(
    gog: &GraphOfFiniteGroups,
    tree: &BTreeSet<usize>,
) -> Result<GroupPresentation, GroupError> {
    let g = gog.graph();
    if !g.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    let true_edges = g.true_edges();
    if tree.len() + 1 != g.vertex_count().max(1) || tree.iter().any(|e| !true_edges.contains(e)) {
        return Err(GroupError::BadTree);
    }
    let sub = BranchGraph::new(
        g.vertex_count(),
        &tree.iter().map(|&e| g.endpoints(e)).collect::<Vec<_>>(),
    )?;
    if !sub.is_connected() {
        return Err(GroupError::BadTree);
    }
    let mut names = Vec::new();
    let mut edge_gen = BTreeMap::new();
    for &e in &true_edges {
        if !tree.contains(&e) {
            edge_gen.insert(e, names.len());
            names.push(format!("e{e}"));
        }
    }
    let mut elem_gen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for v in 0..g.vertex_count() {
        let gv = gog.vertex_group(v);
        for x in 0..gv.order() {
            if x != gv.identity() {
                elem_gen.insert((v, x), names.len());
                names.push(format!("v{v}_{x}"));
            }
        }
    }
    let word = |v: usize, x: usize| -> Word {
        elem_gen
            .get(&(v, x))
            .map(|&i| vec![letter(i, false)])
            .unwrap_or_default()
    };
    let inverse_word = |v: usize, x: usize| -> Word {
        elem_gen
            .get(&(v, x))
            .map(|&i| vec![letter(i, true)])
            .unwrap_or_default()
    };
    let mut relators: Vec<Word> = Vec::new();
    for v in 0..g.vertex_count() {
        let gv = gog.vertex_group(v);
        for x in 0..gv.order() {
            for y in 0..gv.order() {
                if x == gv.identity() || y == gv.identity() {
                    continue;
                }
                let mut w = word(v, x);
                w.extend(word(v, y));
                w.extend(inverse_word(v, gv.mul(x, y)));
                relators.push(w);
            }
        }
    }
    for &e in &true_edges {
        let bs = g.edge_branches(e);
        let (v1, v2) = (g.branch(bs[0]).vertex, g.branch(bs[1]).vertex);
        let ge = gog.edge_group(e);
        for a in ge.generating_set() {
            let a1 = gog.branch_map(bs[0])[a];
            let a2inv = gog.branch_map(bs[1])[ge.inv(a)];
            let mut w = word(v1, a1);
            match edge_gen.get(&e) {
                None => w.extend(word(v2, a2inv)),
                Some(&t) => {
                    w.push(letter(t, false));
                    w.extend(word(v2, a2inv));
                    w.push(letter(t, true));
                }
            }
            relators.push(w);
        }
    }
    Ok(GroupPresentation::new(names, relators))
}

/// Presentation over the breadth-first spanning tree of the graph.
pub fn pi1_presentation_default(
    gog: &GraphOfFiniteGroups,
) -> Result<GroupPresentation, GroupError> {
    let tree = gog.graph().spanning_tree()?;
    pi1_presentation(gog, &tree)
}

pub fn pi1_top_rank(gog: &GraphOfFiniteGroups) -> Result<usize, GroupError> {
    Ok(gog.graph().non_tree_edges()?.len())
}

pub fn abelianized_pi1(gog: &GraphOfFiniteGroups) -> Result<FgAbGroup, GroupError> {
    Ok(pi1_presentation_default(gog)?.abelianization())
}

/// The same group by the product formula: `Z^h x (prod_v G_v^ab) / H`,
/// where `H` is generated by the differences of the two branch images of
/// each edge group. The finite factor is built by explicit coset arithmetic
/// and its invariant factors read off from element counts.
pub fn abelianized_pi1_product_formula(gog: &GraphOfFiniteGroups) -> Result<FgAbGroup, GroupError> {
    let g = gog.graph();
    let h = pi1_top_rank(gog)?;
    // per vertex: coset id of each element modulo the commutator subgroup
    let mut coset_of: Vec<Vec<usize>> = Vec::new();
    let mut coset_tables: Vec<Vec<Vec<usize>>> = Vec::new();
    for v in 0..g.vertex_count() {
        let gv = gog.vertex_group(v);
        let k = gv.commutator_subgroup();
        let mut ids = vec![usize::MAX; gv.order()];
        let mut reps = Vec::new();
        for x in 0..gv.order() {
            if ids[x] != usize::MAX {
                continue;
            }
            for &c in &k {
                ids[gv.mul(x, c)] = reps.len();
            }
            reps.push(x);
        }
        let table = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| ids[gv.mul(a, b)]).collect())
            .collect();
        coset_of.push(ids);
        coset_tables.push(table);
    }
    let sizes: Vec<usize> = coset_tables.iter().map(Vec::len).collect();
    let add = |a: &[usize], b: &[usize]| -> Vec<usize> {
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(v, (&x, &y))| coset_tables[v][x][y])
            .collect()
    };
    let zero = || -> Vec<usize> {
        (0..sizes.len())
            .map(|v| coset_of[v][gog.vertex_group(v).identity()])
            .collect()
    };
    let mut h_gens: Vec<Vec<usize>> = Vec::new();
    for e in g.true_edges() {
        let bs = g.edge_branches(e);
        let (v1, v2) = (g.branch(bs[0]).vertex, g.branch(bs[1]).vertex);
        let ge = gog.edge_group(e);
        for a in 0..ge.order() {
            let mut x = zero();
            x[v1] = coset_of[v1][gog.branch_map(bs[0])[a]];
            let inv = gog.branch_map(bs[1])[ge.inv(a)];
            let mut y = zero();
            y[v2] = coset_of[v2][inv];
            h_gens.push(add(&x, &y));
        }
    }
    let mut subgroup = BTreeSet::from([zero()]);
    let mut queue = VecDeque::from([zero()]);
    while let Some(x) = queue.pop_front() {
        for s in &h_gens {
            let y = add(&x, s);
            if subgroup.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    // enumerate the quotient by canonical (minimal) coset representatives
    let total: usize = sizes.iter().product();
    let decode = |mut i: usize| -> Vec<usize> {
        sizes
            .iter()
            .map(|&s| {
                let d = i % s;
                i /= s;
                d
            })
            .collect()
    };
    let canonical =
        |x: &[usize]| -> Vec<usize> { subgroup.iter().map(|s| add(x, s)).min().expect("nonempty") };
    let quotient: BTreeSet<Vec<usize>> = (0..total).map(|i| canonical(&decode(i))).collect();
    let order = quotient.len();
    let z = canonical(&zero());
    let killed_by = |d: usize| -> usize {
        quotient
            .iter()
            .filter(|x| {
                let mut acc = zero();
                for _ in 0..d {
                    acc = add(&acc, x);
                }
                canonical(&acc) == z
            })
            .count()
    };
    let mut cyclic_factors: Vec<BigInt> = Vec::new();
    for p in prime_factors(&BigInt::from(order)) {
        let p = p as usize;
        let mut k = 0u32;
        let mut rest = order;
        while rest.is_multiple_of(p) {
            rest /= p;
            k += 1;
        }
        // a_j = log_p |Q[p^j]|; the number of cyclic factors of order >= p^j is a_j - a_{j-1}
        let mut prev = 0u32;
        let mut at_least: Vec<u32> = Vec::new();
        for j in 1..=k {
            let mut count = killed_by(p.pow(j));
            let mut a = 0u32;
            while count > 1 {
                count /= p;
                a += 1;
            }
            at_least.push(a - prev);
            prev = a;
        }
        for j in 0..at_least.len() {
            let next = at_least.get(j + 1).copied().unwrap_or(0);
            for _ in 0..at_least[j] - next {
                cyclic_factors.push(BigInt::from(p).pow(j as u32 + 1));
            }
        }
    }
    let n = cyclic_factors.len();
    let mut m = IntMatrix::zeros(n, n);
    for (i, d) in cyclic_factors.into_iter().enumerate() {
        m.set(i, i, d);
    }
    let finite = cokernel_group(&m);
    Ok(FgAbGroup::free(h).direct_sum(&finite))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TemperedProfile {
    pub free_rank: u64,
    pub pro_pprime_corank: u64,
}

pub fn tempered_ab_profile(g: u64, h: u64, p: u64) -> Result<TemperedProfile, GroupError> {
    if !is_prime(p) {
        return Err(GroupError::NotPrime(p));
    }
    if h > 2 * g {
        return Err(GroupError::NegativeCorank { g, h });
    }
    Ok(TemperedProfile {
        free_rank: h,
        pro_pprime_corank: 2 * g - h,
    })
}

/// Cover of a graph of groups: a finite `G_v`-set per vertex (as an action
/// table `actions[v][x][s]`) and, per true edge, a bijection from the set at
/// the first branch's vertex to the set at the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoGCover {
    pub actions: Vec<Vec<Vec<usize>>>,
    pub gluings: BTreeMap<usize, Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverCheck {
    Pass {
        topological: bool,
        degrees: Vec<usize>,
    },
    Violations(Vec<String>),
}

pub fn validate_gog_cover(gog: &GraphOfFiniteGroups, s: &GoGCover) -> CoverCheck {
    let g = gog.graph();
    let mut bad = Vec::new();
    if s.actions.len() != g.vertex_count() {
        return CoverCheck::Violations(vec![format!(
            "expected {} vertex sets, got {}",
            g.vertex_count(),
            s.actions.len()
        )]);
    }
    let mut sizes = Vec::new();
    for (v, act) in s.actions.iter().enumerate() {
        let gv = gog.vertex_group(v);
        let n = act.first().map_or(0, Vec::len);
        sizes.push(n);
        if act.len() != gv.order()
            || act
                .iter()
                .any(|r| r.len() != n || r.iter().any(|&t| t >= n))
        {
            bad.push(format!("vertex {v}: action table has the wrong shape"));
            continue;
        }
        if act[gv.identity()] != (0..n).collect::<Vec<_>>() {
            bad.push(format!("vertex {v}: identity acts nontrivially"));
        }
        'outer: for x in 0..gv.order() {
            for y in 0..gv.order() {
                for t in 0..n {
                    if act[gv.mul(x, y)][t] != act[x][act[y][t]] {
                        bad.push(format!("vertex {v}: not an action at ({x}, {y})"));
                        break 'outer;
                    }
                }
            }
        }
    }
    if !bad.is_empty() {
        return CoverCheck::Violations(bad);
    }
    for e in g.true_edges() {
        let bs = g.edge_branches(e);
        let (v1, v2) = (g.branch(bs[0]).vertex, g.branch(bs[1]).vertex);
        if sizes[v1] != sizes[v2] {
            bad.push(format!(
                "edge {e}: degrees {} and {} differ",
                sizes[v1], sizes[v2]
            ));
            continue;
        }
        let Some(phi) = s.gluings.get(&e) else {
            bad.push(format!("edge {e}: no gluing"));
            continue;
        };
        if phi.len() != sizes[v1]
            || phi.iter().collect::<BTreeSet<_>>().len() != phi.len()
            || phi.iter().any(|&t| t >= sizes[v2])
        {
            bad.push(format!("edge {e}: gluing is not a bijection"));
            continue;
        }
        let ge = gog.edge_group(e);
        'eq: for a in 0..ge.order() {
            let (a1, a2) = (gog.branch_map(bs[0])[a], gog.branch_map(bs[1])[a]);
            for t in 0..phi.len() {
                if phi[s.actions[v1][a1][t]] != s.actions[v2][a2][phi[t]] {
                    bad.push(format!(
                        "edge {e}: gluing is not equivariant for edge element {a}"
                    ));
                    break 'eq;
                }
            }
        }
    }
    if let Some(extra) = s
        .gluings
        .keys()
        .find(|&&e| e >= g.edge_count() || g.is_cusp(e))
    {
        bad.push(format!(
            "gluing given for {extra}, which is not a true edge"
        ));
    }
    if !bad.is_empty() {
        return CoverCheck::Violations(bad);
    }
    let topological = s.actions.iter().all(|act| {
        act.iter()
            .all(|row| row.iter().enumerate().all(|(t, &u)| t == u))
    });
    CoverCheck::Pass {
        topological,
        degrees: sizes,
    }
}

/// Cover of a trivial graph of groups induced by a graph cover.
pub fn gog_cover_from_graph_cover(cover: &GraphCover) -> GoGCover {
    let d = cover.degree;
    let base = &cover.base;
    let actions = vec![vec![(0..d).collect()]; base.vertex_count()];
    let mut gluings = BTreeMap::new();
    for e in base.true_edges() {
        let mut phi = vec![0; d];
        for (le, &img) in cover.edge_map.iter().enumerate() {
            if img != e {
                continue;
            }
            let ends = cover.total.endpoints(le);
            let bs = cover.total.edge_branches(le);
            // branch order follows the base edge
            let (first, second) = if cover.branch_map[bs[0]] == base.edge_branches(e)[0] {
                (ends[0], ends[1])
            } else {
                (ends[1], ends[0])
            };
            phi[first % d] = second % d;
        }
        gluings.insert(e, phi);
    }
    GoGCover { actions, gluings }
}

/// Extension data: `alpha[h]` is an automorphism of `pi` (as a table) and
/// `g[h][h']` an element of `pi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionData {
    pub pi: FiniteGroup,
    pub h: FiniteGroup,
    pub alpha: Vec<Vec<usize>>,
    pub g: Vec<Vec<usize>>,
}

impl ExtensionData {
    pub fn validate(&self) -> Result<(), GroupError> {
        let (pi, h) = (&self.pi, &self.h);
        if self.alpha.len() != h.order() {
            return Err(GroupError::Count {
                what: "automorphisms",
                expected: h.order(),
                got: self.alpha.len(),
            });
        }
        if self.g.len() != h.order()
            || self
                .g
                .iter()
                .any(|r| r.len() != h.order() || r.iter().any(|&x| x >= pi.order()))
        {
            return Err(GroupError::Count {
                what: "cocycle rows",
                expected: h.order(),
                got: self.g.len(),
            });
        }
        for (i, a) in self.alpha.iter().enumerate() {
            if pi.is_homomorphism(pi, a).is_err()
                || a.iter().collect::<BTreeSet<_>>().len() != pi.order()
            {
                return Err(GroupError::NotAutomorphism { h: i });
            }
        }
        for x in 0..h.order() {
            for y in 0..h.order() {
                let gxy = self.g[x][y];
                let xy = h.mul(x, y);
                for p in 0..pi.order() {
                    let lhs = self.alpha[x][self.alpha[y][p]];
                    let rhs = pi.mul(pi.mul(gxy, self.alpha[xy][p]), pi.inv(gxy));
                    if lhs != rhs {
                        return Err(GroupError::CocycleAlpha { h: x, h2: y, x: p });
                    }
                }
                for z in 0..h.order() {
                    let lhs = pi.mul(gxy, self.g[xy][z]);
                    let rhs = pi.mul(self.alpha[x][self.g[y][z]], self.g[x][h.mul(y, z)]);
                    if lhs != rhs {
                        return Err(GroupError::CocycleG { h: x, h2: y, h3: z });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Extension `1 -> pi -> E -> h -> 1`; element `(k, x)` has index
/// `k * |pi| + x`.
#[derive(Clone, Debug)]
pub struct SchreierExtension {
    pub group: FiniteGroup,
    pub embedding: Vec<usize>,
    pub projection: Vec<usize>,
}

pub fn schreier_extension(data: &ExtensionData) -> Result<SchreierExtension, GroupError> {
    data.validate()?;
    let (pi, h) = (&data.pi, &data.h);
    let (n, m) = (pi.order(), h.order());
    if n * m > MAX_EXTENSION_ORDER {
        return Err(GroupError::TooLarge {
            order: n * m,
            limit: MAX_EXTENSION_ORDER,
        });
    }
    let table: Vec<Vec<usize>> = (0..n * m)
        .map(|a| {
            let (k, x) = (a / n, a % n);
            (0..n * m)
                .map(|b| {
                    let (k2, x2) = (b / n, b % n);
                    let y = pi.mul(pi.mul(x, data.alpha[k][x2]), data.g[k][k2]);
                    h.mul(k, k2) * n + y
                })
                .collect()
        })
        .collect();
    let group = FiniteGroup::from_table(table)?;
    let g11inv = pi.inv(data.g[h.identity()][h.identity()]);
    let embedding: Vec<usize> = (0..n)
        .map(|x| h.identity() * n + pi.mul(x, g11inv))
        .collect();
    let projection: Vec<usize> = (0..n * m).map(|a| a / n).collect();
    Ok(SchreierExtension {
        group,
        embedding,
        projection,
    })
}

impl SchreierExtension {
    /// `(1, g11^-1)`.
    pub fn expected_identity(data: &ExtensionData) -> usize {
        let e = data.h.identity();
        e * data.pi.order() + data.pi.inv(data.g[e][e])
    }

    /// `(k^-1, g11^-1 g_{k^-1,k}^-1 alpha_{k^-1}(x)^-1)`.
    pub fn expected_inverse(data: &ExtensionData, element: usize) -> usize {
        let (pi, h) = (&data.pi, &data.h);
        let n = pi.order();
        let (k, x) = (element / n, element % n);
        let ki = h.inv(k);
        let e = h.identity();
        let y = pi.mul(
            pi.mul(pi.inv(data.g[e][e]), pi.inv(data.g[ki][k])),
            pi.inv(data.alpha[ki][x]),
        );
        ki * n + y
    }

    /// Embedding and projection are homomorphisms, the embedding is
    /// injective and its image is the kernel of the projection.
    pub fn is_exact(&self, data: &ExtensionData) -> bool {
        let e = &self.group;
        data.pi.is_homomorphism(e, &self.embedding).is_ok()
            && e.is_homomorphism(&data.h, &self.projection).is_ok()
            && self.embedding.iter().collect::<BTreeSet<_>>().len() == data.pi.order()
            && {
                let image: BTreeSet<usize> = self.embedding.iter().copied().collect();
                let kernel: BTreeSet<usize> = (0..e.order())
                    .filter(|&a| self.projection[a] == data.h.identity())
                    .collect();
                image == kernel
            }
    }
}

/// Data regauged by `gamma: h -> pi`, with the isomorphism from the old
/// extension to the new one, `(k, x) -> (k, x gamma_k^-1)`.
pub fn schreier_regauge(
    data: &ExtensionData,
    gamma: &[usize],
) -> Result<(ExtensionData, Vec<usize>), GroupError> {
    data.validate()?;
    let (pi, h) = (&data.pi, &data.h);
    if gamma.len() != h.order() || gamma.iter().any(|&x| x >= pi.order()) {
        return Err(GroupError::Count {
            what: "gauge values",
            expected: h.order(),
            got: gamma.len(),
        });
    }
    let alpha: Vec<Vec<usize>> = (0..h.order())
        .map(|k| {
            (0..pi.order())
                .map(|x| pi.mul(pi.mul(gamma[k], data.alpha[k][x]), pi.inv(gamma[k])))
                .collect()
        })
        .collect();
    let g: Vec<Vec<usize>> = (0..h.order())
        .map(|k| {
            (0..h.order())
                .map(|k2| {
                    let a = pi.mul(gamma[k], data.alpha[k][gamma[k2]]);
                    pi.mul(pi.mul(a, data.g[k][k2]), pi.inv(gamma[h.mul(k, k2)]))
                })
                .collect()
        })
        .collect();
    let new = ExtensionData {
        pi: pi.clone(),
        h: h.clone(),
        alpha,
        g,
    };
    new.validate()?;
    let n = pi.order();
    let iso = (0..n * h.order())
        .map(|a| (a / n) * n + pi.mul(a % n, pi.inv(gamma[a / n])))
        .collect();
    Ok((new, iso))
}
