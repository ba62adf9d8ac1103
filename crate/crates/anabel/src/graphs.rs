//! Graphs with explicit branches, rational edge metrics, finite covers via
//! permutation assignments, simple cycles, the rigidity kernel, and
//! generalized morphisms (maps allowed to collapse edges to vertices).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{nullspace_q, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {edge} has {count} branches; expected 1 or 2")]
    BranchCount { edge: usize, count: usize },
    #[error("edge {edge} refers to vertex {vertex}, but there are only {vertices} vertices")]
    UnknownVertex {
        edge: usize,
        vertex: usize,
        vertices: usize,
    },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("edge {edge} has non-positive length")]
    NonPositiveLength { edge: usize },
    #[error("expected {expected} edge lengths, got {got}")]
    LengthCount { expected: usize, got: usize },
    #[error("cover degree must be at least 1")]
    ZeroDegree,
    #[error("invalid generalized morphism: {0}")]
    BadMorphism(String),
    #[error("cannot compose: {0}")]
    NotComposable(String),
    #[error("invalid isomorphism: {0}")]
    BadIsomorphism(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Branch {
    pub vertex: usize,
    pub edge: usize,
}

/// Finite graph with branches. Each edge has one branch (a cusp, i.e. an
/// open end) or two branches exchanged by the involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchGraph {
    vertex_count: usize,
    branches: Vec<Branch>,
    edges: Vec<Vec<usize>>,
}

impl BranchGraph {
    /// `edges[e]` lists the endpoint vertex of each branch of `e`.
    pub fn new(vertex_count: usize, edges: &[Vec<usize>]) -> Result<Self, GraphError> {
        let mut branches = Vec::new();
        let mut edge_branches = Vec::with_capacity(edges.len());
        for (e, ends) in edges.iter().enumerate() {
            if ends.is_empty() || ends.len() > 2 {
                return Err(GraphError::BranchCount {
                    edge: e,
                    count: ends.len(),
                });
            }
            let mut bs = Vec::new();
            for &v in ends {
                if v >= vertex_count {
                    return Err(GraphError::UnknownVertex {
                        edge: e,
                        vertex: v,
                        vertices: vertex_count,
                    });
                }
                bs.push(branches.len());
                branches.push(Branch { vertex: v, edge: e });
            }
            edge_branches.push(bs);
        }
        Ok(BranchGraph {
            vertex_count,
            branches,
            edges: edge_branches,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn branch(&self, b: usize) -> Branch {
        self.branches[b]
    }

    /// Branch ids of an edge.
    pub fn edge_branches(&self, e: usize) -> &[usize] {
        &self.edges[e]
    }

    /// Endpoint vertices of an edge, in branch order.
    pub fn endpoints(&self, e: usize) -> Vec<usize> {
        self.edges[e]
            .iter()
            .map(|&b| self.branches[b].vertex)
            .collect()
    }

    pub fn is_cusp(&self, e: usize) -> bool {
        self.edges[e].len() == 1
    }

    /// The partner branch under the involution, if any.
    pub fn partner(&self, b: usize) -> Option<usize> {
        let e = self.branches[b].edge;
        self.edges[e].iter().copied().find(|&c| c != b)
    }

    /// Edges with two branches.
    pub fn true_edges(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| !self.is_cusp(e))
            .collect()
    }

    pub fn branches_at(&self, v: usize) -> Vec<usize> {
        (0..self.branches.len())
            .filter(|&b| self.branches[b].vertex == v)
            .collect()
    }

    /// Number of branches at a vertex (a loop counts twice).
    pub fn arity(&self, v: usize) -> usize {
        self.branches.iter().filter(|b| b.vertex == v).count()
    }

    pub fn min_arity(&self) -> usize {
        (0..self.vertex_count)
            .map(|v| self.arity(v))
            .min()
            .unwrap_or(0)
    }

    /// Connected components over true edges, each a sorted vertex list.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.vertex_count];
        let mut out = Vec::new();
        for s in 0..self.vertex_count {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for w in self.neighbours(v).into_iter().map(|(_, w)| w) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// (edge, other endpoint) over true edges at `v`, in edge order.
    fn neighbours(&self, v: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for e in self.true_edges() {
            let ends = self.endpoints(e);
            if ends[0] == v {
                out.push((e, ends[1]));
            }
            if ends[1] == v && ends[0] != v {
                out.push((e, ends[0]));
            }
        }
        out
    }

    /// `|E_2| - |V| + #components`, over true edges only.
    pub fn cycle_rank(&self) -> usize {
        self.true_edges().len() + self.components().len() - self.vertex_count
    }

    /// BFS spanning tree from vertex 0, edges scanned in id order.
    pub fn spanning_tree(&self) -> Result<BTreeSet<usize>, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let mut tree = BTreeSet::new();
        if self.vertex_count == 0 {
            return Ok(tree);
        }
        let mut seen = vec![false; self.vertex_count];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for (e, w) in self.neighbours(v) {
                if !seen[w] {
                    seen[w] = true;
                    tree.insert(e);
                    queue.push_back(w);
                }
            }
        }
        Ok(tree)
    }

    /// True edges outside the spanning tree, in id order.
    pub fn non_tree_edges(&self) -> Result<Vec<usize>, GraphError> {
        let tree = self.spanning_tree()?;
        Ok(self
            .true_edges()
            .into_iter()
            .filter(|e| !tree.contains(e))
            .collect())
    }

    /// Tree path between two vertices as an edge list.
    pub fn tree_path(&self, tree: &BTreeSet<usize>, from: usize, to: usize) -> Vec<usize> {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.vertex_count];
        let mut seen = vec![false; self.vertex_count];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for (e, w) in self.neighbours(v) {
                if tree.contains(&e) && !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((e, v));
                    queue.push_back(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut v = to;
        while let Some((e, p)) = parent[v] {
            path.push(e);
            v = p;
        }
        path.reverse();
        path
    }

    /// Edge sets of the fundamental cycles, one per non-tree edge.
    pub fn fundamental_cycles(&self) -> Result<Vec<Vec<usize>>, GraphError> {
        let tree = self.spanning_tree()?;
        Ok(self
            .non_tree_edges()?
            .into_iter()
            .map(|e| {
                let ends = self.endpoints(e);
                let mut c = self.tree_path(&tree, ends[0], ends[1]);
                c.push(e);
                c.sort_unstable();
                c
            })
            .collect())
    }

    /// Every simple cycle (no repeated vertex or edge) as a sorted edge set.
    /// Loops are 1-edge cycles and parallel edges give 2-edge cycles.
    pub fn simple_cycles(&self) -> Vec<Vec<usize>> {
        let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
        for e in self.true_edges() {
            let ends = self.endpoints(e);
            if ends[0] == ends[1] {
                out.insert(vec![e]);
            }
        }
        let adj: Vec<Vec<(usize, usize)>> = (0..self.vertex_count)
            .map(|v| {
                self.neighbours(v)
                    .into_iter()
                    .filter(|&(_, w)| w != v)
                    .collect()
            })
            .collect();
        for s in 0..self.vertex_count {
            // cycles whose smallest vertex is s
            let mut on_path = vec![false; self.vertex_count];
            on_path[s] = true;
            let mut edges: Vec<usize> = Vec::new();
            fn dfs(
                v: usize,
                s: usize,
                adj: &[Vec<(usize, usize)>],
                on_path: &mut [bool],
                edges: &mut Vec<usize>,
                out: &mut BTreeSet<Vec<usize>>,
            ) {
                for &(e, w) in &adj[v] {
                    if edges.contains(&e) {
                        continue;
                    }
                    if w == s && !edges.is_empty() {
                        let mut c = edges.clone();
                        c.push(e);
                        c.sort_unstable();
                        out.insert(c);
                        continue;
                    }
                    if w <= s || on_path[w] {
                        continue;
                    }
                    on_path[w] = true;
                    edges.push(e);
                    dfs(w, s, adj, on_path, edges, out);
                    edges.pop();
                    on_path[w] = false;
                }
            }
            dfs(s, s, &adj, &mut on_path, &mut edges, &mut out);
        }
        out.into_iter().collect()
    }
}

/// Graph with positive rational edge lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricGraph {
    pub graph: BranchGraph,
    pub lengths: Vec<Rational>,
}

impl MetricGraph {
    pub fn new(graph: BranchGraph, lengths: Vec<Rational>) -> Result<Self, GraphError> {
        if lengths.len() != graph.edge_count() {
            return Err(GraphError::LengthCount {
                expected: graph.edge_count(),
                got: lengths.len(),
            });
        }
        if let Some(edge) = lengths.iter().position(|l| !l.is_positive()) {
            return Err(GraphError::NonPositiveLength { edge });
        }
        Ok(MetricGraph { graph, lengths })
    }

    /// Shortest-path distances between vertices along true edges.
    pub fn distances(&self) -> Vec<Vec<Option<Rational>>> {
        let n = self.graph.vertex_count();
        let mut d: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
        for (v, row) in d.iter_mut().enumerate() {
            row[v] = Some(Rational::zero());
        }
        for e in self.graph.true_edges() {
            let ends = self.graph.endpoints(e);
            let (a, b) = (ends[0], ends[1]);
            let l = &self.lengths[e];
            if d[a][b].as_ref().is_none_or(|x| l < x) {
                d[a][b] = Some(l.clone());
                d[b][a] = Some(l.clone());
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(x), Some(y)) = (&d[i][k], &d[k][j]) {
                        let s = x + y;
                        if d[i][j].as_ref().is_none_or(|c| &s < c) {
                            d[i][j] = Some(s);
                        }
                    }
                }
            }
        }
        d
    }

    /// Sum of lengths over an edge set.
    pub fn length_of(&self, edges: &[usize]) -> Rational {
        edges.iter().map(|&e| self.lengths[e].clone()).sum()
    }
}

/// Cover of a graph; vertex `(v, i)` of the total graph is `v * degree + i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphCover {
    pub base: BranchGraph,
    pub total: BranchGraph,
    pub degree: usize,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
    pub branch_map: Vec<usize>,
    /// Permutation assigned to each non-tree edge.
    pub assignment: Vec<Vec<usize>>,
    pub connected: bool,
}

impl GraphCover {
    /// Every total-graph vertex over `v` sees exactly one lift of each branch at `v`.
    pub fn is_branch_local_bijection(&self) -> bool {
        for w in 0..self.total.vertex_count() {
            let v = self.vertex_map[w];
            let mut lifted: Vec<usize> = self
                .total
                .branches_at(w)
                .iter()
                .map(|&b| self.branch_map[b])
                .collect();
            lifted.sort_unstable();
            if lifted != self.base.branches_at(v) {
                return false;
            }
        }
        true
    }
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..d).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k.is_multiple_of(2) {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    heap(d, &mut cur, &mut out);
    out.sort();
    out
}

fn conjugate(tau: &[usize], sigma: &[usize]) -> Vec<usize> {
    // tau sigma tau^-1
    let mut out = vec![0; sigma.len()];
    for i in 0..sigma.len() {
        out[tau[i]] = tau[sigma[i]];
    }
    out
}

/// Covers of degree `d`, one per simultaneous-conjugacy class of
/// permutation assignments on non-tree edges (lexicographically minimal
/// representative). Cusp edges lift to `d` unramified copies.
pub fn enumerate_covers(g: &BranchGraph, d: usize) -> Result<Vec<GraphCover>, GraphError> {
    if d == 0 {
        return Err(GraphError::ZeroDegree);
    }
    let non_tree = g.non_tree_edges()?;
    let perms = permutations(d);
    let k = non_tree.len();
    let mut out = Vec::new();
    let mut counter = vec![0usize; k];
    loop {
        let assignment: Vec<Vec<usize>> = counter.iter().map(|&i| perms[i].clone()).collect();
        let canonical = perms.iter().all(|tau| {
            let conj: Vec<Vec<usize>> = assignment.iter().map(|s| conjugate(tau, s)).collect();
            conj >= assignment
        });
        if canonical {
            out.push(build_cover(g, d, &non_tree, assignment));
        }
        let mut i = 0;
        while i < k {
            counter[i] += 1;
            if counter[i] < perms.len() {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    out.sort_by(|a, b| a.assignment.cmp(&b.assignment));
    Ok(out)
}

fn build_cover(
    g: &BranchGraph,
    d: usize,
    non_tree: &[usize],
    assignment: Vec<Vec<usize>>,
) -> GraphCover {
    let mut edges_ends = Vec::new();
    let mut edge_map = Vec::new();
    let mut branch_map = Vec::new();
    for e in 0..g.edge_count() {
        let bs = g.edge_branches(e);
        let perm: Vec<usize> = match non_tree.iter().position(|&x| x == e) {
            Some(i) => assignment[i].clone(),
            None => (0..d).collect(),
        };
        for sheet in 0..d {
            if bs.len() == 1 {
                edges_ends.push(vec![g.branch(bs[0]).vertex * d + sheet]);
                branch_map.push(bs[0]);
            } else {
                let (v1, v2) = (g.branch(bs[0]).vertex, g.branch(bs[1]).vertex);
                edges_ends.push(vec![v1 * d + sheet, v2 * d + perm[sheet]]);
                branch_map.push(bs[0]);
                branch_map.push(bs[1]);
            }
            edge_map.push(e);
        }
    }
    let total =
        BranchGraph::new(g.vertex_count() * d, &edges_ends).expect("lifted edges are valid");
    let connected = total.is_connected();
    GraphCover {
        base: g.clone(),
        vertex_map: (0..total.vertex_count()).map(|w| w / d).collect(),
        total,
        degree: d,
        edge_map,
        branch_map,
        assignment,
        connected,
    }
}

/// Connected graphs without cusps on `1..=max_vertices` vertices with
/// `1..=max_edges` edges (loops and parallel edges allowed) and every arity
/// at least `min_arity`, one per isomorphism class, in canonical form.
pub fn enumerate_small_graphs(
    max_vertices: usize,
    max_edges: usize,
    min_arity: usize,
) -> Vec<BranchGraph> {
    let mut out: BTreeSet<(usize, Vec<(usize, usize)>)> = BTreeSet::new();
    for n in 1..=max_vertices {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
        let perms = permutations(n);
        for k in 1..=max_edges {
            let mut pick = vec![0usize; k];
            loop {
                let edges: Vec<(usize, usize)> = pick.iter().map(|&i| slots[i]).collect();
                let mut arity = vec![0usize; n];
                for &(a, b) in &edges {
                    arity[a] += 1;
                    arity[b] += 1;
                }
                if arity.iter().all(|&x| x >= min_arity) {
                    let lists: Vec<Vec<usize>> = edges.iter().map(|&(a, b)| vec![a, b]).collect();
                    let g = BranchGraph::new(n, &lists).expect("valid endpoints");
                    if g.is_connected() {
                        let canonical = perms
                            .iter()
                            .map(|pi| {
                                let mut es: Vec<(usize, usize)> = edges
                                    .iter()
                                    .map(|&(a, b)| (pi[a].min(pi[b]), pi[a].max(pi[b])))
                                    .collect();
                                es.sort_unstable();
                                es
                            })
                            .min()
                            .expect("at least one permutation");
                        out.insert((n, canonical));
                    }
                }
                // next non-decreasing index tuple
                let mut i = k;
                while i > 0 && pick[i - 1] == slots.len() - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                pick[i - 1] += 1;
                let v = pick[i - 1];
                for x in pick.iter_mut().skip(i) {
                    *x = v;
                }
            }
        }
    }
    out.into_iter()
        .map(|(n, es)| {
            let lists: Vec<Vec<usize>> = es.iter().map(|&(a, b)| vec![a, b]).collect();
            BranchGraph::new(n, &lists).expect("valid endpoints")
        })
        .collect()
}

pub fn lift_edge_function(cover: &GraphCover, f: &[Rational]) -> Vec<Rational> {
    cover.edge_map.iter().map(|&e| f[e].clone()).collect()
}

/// Unsigned sums of `f` over the fundamental cycles, one per non-tree edge.
pub fn cycle_sums(g: &BranchGraph, f: &[Rational]) -> Result<Vec<Rational>, GraphError> {
    Ok(g.fundamental_cycles()?
        .iter()
        .map(|c| c.iter().map(|&e| f[e].clone()).sum())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityReport {
    /// Basis of the space of edge functions vanishing on every simple cycle
    /// of every cover of degree `<= max_degree` (coordinates are all edges).
    pub basis: Vec<Vec<Rational>>,
    pub covers_checked: usize,
    pub cycles_checked: usize,
    pub warnings: Vec<String>,
}

impl RigidityReport {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

pub fn rigidity_kernel(g: &BranchGraph, max_degree: usize) -> Result<RigidityReport, GraphError> {
    if max_degree == 0 {
        return Err(GraphError::ZeroDegree);
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let mut warnings = Vec::new();
    let low: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.arity(v) < 3).collect();
    if !low.is_empty() {
        warnings.push(format!(
            "vertices of arity < 3: {low:?}; the rigidity statement does not apply"
        ));
    }
    let cusps: Vec<usize> = (0..g.edge_count()).filter(|&e| g.is_cusp(e)).collect();
    if !cusps.is_empty() {
        warnings.push(format!(
            "cusp edges {cusps:?} lie on no cycle and stay unconstrained"
        ));
    }
    let m = g.edge_count();
    let mut covers = Vec::new();
    for d in 1..=max_degree {
        covers.extend(enumerate_covers(g, d)?);
    }
    let per_cover: Vec<Vec<Vec<i64>>> = covers
        .par_iter()
        .map(|cover| {
            cover
                .total
                .simple_cycles()
                .into_iter()
                .map(|c| {
                    let mut row = vec![0i64; m];
                    for e in c {
                        row[cover.edge_map[e]] += 1;
                    }
                    row
                })
                .collect()
        })
        .collect();
    let covers_checked = covers.len();
    let cycles_checked = per_cover.iter().map(Vec::len).sum();
    let rows: BTreeSet<Vec<i64>> = per_cover.into_iter().flatten().collect();
    let q: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| Rational::from_integer(x.into()))
                .collect()
        })
        .collect();
    Ok(RigidityReport {
        basis: nullspace_q(&q, m),
        covers_checked,
        cycles_checked,
        warnings,
    })
}

/// Image of an edge under a generalized morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeImage {
    /// `branch_map[i]` is the target branch of the i-th branch of the edge.
    Edge {
        edge: usize,
        branch_map: Vec<usize>,
    },
    Vertex(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedMorphism {
    pub source: BranchGraph,
    pub target: BranchGraph,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<EdgeImage>,
}

impl GeneralizedMorphism {
    pub fn new(
        source: BranchGraph,
        target: BranchGraph,
        vertex_map: Vec<usize>,
        edge_map: Vec<EdgeImage>,
    ) -> Result<Self, GraphError> {
        let m = GeneralizedMorphism {
            source,
            target,
            vertex_map,
            edge_map,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(g: &BranchGraph) -> Self {
        GeneralizedMorphism {
            source: g.clone(),
            target: g.clone(),
            vertex_map: (0..g.vertex_count()).collect(),
            edge_map: (0..g.edge_count())
                .map(|e| EdgeImage::Edge {
                    edge: e,
                    branch_map: g.edge_branches(e).to_vec(),
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let bad = |s: String| Err(GraphError::BadMorphism(s));
        if self.vertex_map.len() != self.source.vertex_count() {
            return bad("vertex map has the wrong length".into());
        }
        if self
            .vertex_map
            .iter()
            .any(|&v| v >= self.target.vertex_count())
        {
            return bad("vertex map leaves the target".into());
        }
        if self.edge_map.len() != self.source.edge_count() {
            return bad("edge map has the wrong length".into());
        }
        for (e, img) in self.edge_map.iter().enumerate() {
            let bs = self.source.edge_branches(e);
            match img {
                EdgeImage::Vertex(w) => {
                    if *w >= self.target.vertex_count() {
                        return bad(format!("edge {e} collapses to unknown vertex {w}"));
                    }
                    for &b in bs {
                        if self.vertex_map[self.source.branch(b).vertex] != *w {
                            return bad(format!(
                                "edge {e} collapses to {w} but an endpoint maps elsewhere"
                            ));
                        }
                    }
                }
                EdgeImage::Edge { edge, branch_map } => {
                    if *edge >= self.target.edge_count() {
                        return bad(format!("edge {e} maps to unknown edge {edge}"));
                    }
                    let tbs = self.target.edge_branches(*edge);
                    let mut sorted = branch_map.clone();
                    sorted.sort_unstable();
                    let mut tsorted = tbs.to_vec();
                    tsorted.sort_unstable();
                    if branch_map.len() != bs.len() || sorted != tsorted {
                        return bad(format!(
                            "branch map of edge {e} is not a bijection onto edge {edge}"
                        ));
                    }
                    for (i, &b) in bs.iter().enumerate() {
                        let v = self.source.branch(b).vertex;
                        if self.target.branch(branch_map[i]).vertex != self.vertex_map[v] {
                            return bad(format!("branch square fails on edge {e}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// No edge collapses.
    pub fn is_true_morphism(&self) -> bool {
        self.edge_map
            .iter()
            .all(|i| matches!(i, EdgeImage::Edge { .. }))
    }

    pub fn collapsed_edges(&self) -> Vec<usize> {
        (0..self.edge_map.len())
            .filter(|&e| matches!(self.edge_map[e], EdgeImage::Vertex(_)))
            .collect()
    }
}

/// `second ∘ first`; an edge collapses as soon as either stage collapses it.
pub fn compose_generalized(
    second: &GeneralizedMorphism,
    first: &GeneralizedMorphism,
) -> Result<GeneralizedMorphism, GraphError> {
    if first.target != second.source {
        return Err(GraphError::NotComposable(
            "target of the first map is not the source of the second".into(),
        ));
    }
    let vertex_map: Vec<usize> = first
        .vertex_map
        .iter()
        .map(|&v| second.vertex_map[v])
        .collect();
    let edge_map = first
        .edge_map
        .iter()
        .map(|img| match img {
            EdgeImage::Vertex(v) => EdgeImage::Vertex(second.vertex_map[*v]),
            EdgeImage::Edge { edge, branch_map } => match &second.edge_map[*edge] {
                EdgeImage::Vertex(w) => EdgeImage::Vertex(*w),
                EdgeImage::Edge {
                    edge: e2,
                    branch_map: bm2,
                } => {
                    let mid = first.target.edge_branches(*edge);
                    let composed = branch_map
                        .iter()
                        .map(|b| bm2[mid.iter().position(|x| x == b).expect("branch of edge")])
                        .collect();
                    EdgeImage::Edge {
                        edge: *e2,
                        branch_map: composed,
                    }
                }
            },
        })
        .collect();
    GeneralizedMorphism::new(
        first.source.clone(),
        second.target.clone(),
        vertex_map,
        edge_map,
    )
}

/// Graph isomorphism given on vertices and edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphIsomorphism {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
}

impl GraphIsomorphism {
    pub fn identity(g: &BranchGraph) -> Self {
        GraphIsomorphism {
            vertex_map: (0..g.vertex_count()).collect(),
            edge_map: (0..g.edge_count()).collect(),
        }
    }

    pub fn validate(&self, a: &BranchGraph, b: &BranchGraph) -> Result<(), GraphError> {
        let bad = |s: &str| Err(GraphError::BadIsomorphism(s.to_string()));
        let is_perm = |m: &[usize], n: usize| {
            m.len() == n && m.iter().collect::<BTreeSet<_>>().len() == n && m.iter().all(|&x| x < n)
        };
        if a.vertex_count() != b.vertex_count() || !is_perm(&self.vertex_map, a.vertex_count()) {
            return bad("vertex map is not a bijection");
        }
        if a.edge_count() != b.edge_count() || !is_perm(&self.edge_map, a.edge_count()) {
            return bad("edge map is not a bijection");
        }
        for e in 0..a.edge_count() {
            let mut x: Vec<usize> = a.endpoints(e).iter().map(|&v| self.vertex_map[v]).collect();
            let mut y = b.endpoints(self.edge_map[e]);
            x.sort_unstable();
            y.sort_unstable();
            if x != y {
                return bad("incidence is not preserved");
            }
        }
        Ok(())
    }
}

/// Distinct endpoint-multiset signature, used to label small graphs.
pub fn degree_sequence(g: &BranchGraph) -> Vec<usize> {
    let mut d: Vec<usize> = (0..g.vertex_count()).map(|v| g.arity(v)).collect();
    d.sort_unstable();
    d
}

pub fn edge_list(g: &BranchGraph) -> BTreeMap<usize, Vec<usize>> {
    (0..g.edge_count()).map(|e| (e, g.endpoints(e))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat_int;

    pub(crate) fn theta() -> BranchGraph {
        BranchGraph::new(2, &[vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap()
    }

    fn circle() -> BranchGraph {
        BranchGraph::new(1, &[vec![0, 0]]).unwrap()
    }

    #[test]
    fn ranks() {
        assert_eq!(theta().cycle_rank(), 2);
        let tree = BranchGraph::new(3, &[vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(tree.cycle_rank(), 0);
        let cusp = BranchGraph::new(1, &[vec![0, 0], vec![0]]).unwrap();
        assert_eq!(cusp.cycle_rank(), 1);
    }

    #[test]
    fn trees_and_covers() {
        assert_eq!(theta().spanning_tree().unwrap().len(), 1);
        assert_eq!(enumerate_covers(&circle(), 2).unwrap().len(), 2);
        assert_eq!(enumerate_covers(&theta(), 2).unwrap().len(), 4);
        let tree = BranchGraph::new(3, &[vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(enumerate_covers(&tree, 3).unwrap().len(), 1);
        for c in enumerate_covers(&theta(), 3).unwrap() {
            assert!(c.is_branch_local_bijection());
        }
    }

    #[test]
    fn theta_rigid_at_degree_one() {
        let r = rigidity_kernel(&theta(), 1).unwrap();
        assert_eq!(r.dimension(), 0);
        assert!(r.warnings.is_empty());
        assert!(!rigidity_kernel(&circle(), 1).unwrap().warnings.is_empty());
    }

    #[test]
    fn circle_cycle_sum() {
        assert_eq!(
            cycle_sums(&circle(), &[rat_int(3)]).unwrap(),
            vec![rat_int(3)]
        );
    }

    #[test]
    fn small_graph_counts() {
        // one vertex: loops only; arity >= 3 needs at least two loops
        let one: Vec<_> = enumerate_small_graphs(1, 5, 3);
        assert_eq!(one.len(), 4);
        assert!(enumerate_small_graphs(2, 2, 0)
            .iter()
            .all(BranchGraph::is_connected));
    }

    #[test]
    fn simple_cycles_of_theta() {
        assert_eq!(theta().simple_cycles().len(), 3);
    }
}
