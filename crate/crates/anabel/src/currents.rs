//! Currents on branch graphs: branch functions that are antisymmetric across
//! each edge and sum to zero at each vertex. Cusp branches have no partner
//! but still enter the vertex sum.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::FgAbGroup;
use crate::graphs::{BranchGraph, GraphError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurrentError {
    #[error("expected {expected} branch values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("branches of edge {edge} are not opposite")]
    Antisymmetry { edge: usize },
    #[error("Kirchhoff sum fails at vertex {vertex}")]
    Kirchhoff { vertex: usize },
    #[error("modulus must be at least 1")]
    BadModulus,
    #[error("path is not simple: {0}")]
    NonSimplePath(String),
    #[error("subgraph refers to unknown vertex or edge")]
    BadSubgraph,
    #[error("invalid group action: {0}")]
    BadAction(String),
    #[error("subgroup element {index} does not stabilize the current")]
    NotStabilized { index: usize },
    #[error("currents live on different graphs or rings")]
    Mismatch,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ring {
    Integers,
    Mod(u64),
}

impl Ring {
    fn reduce(&self, x: BigInt) -> BigInt {
        match self {
            Ring::Integers => x,
            Ring::Mod(n) => x.mod_floor(&BigInt::from(*n)),
        }
    }

    fn validate(&self) -> Result<(), CurrentError> {
        match self {
            Ring::Mod(0) => Err(CurrentError::BadModulus),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Mod(n) => write!(f, "Z/{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Current {
    graph: BranchGraph,
    ring: Ring,
    values: Vec<BigInt>,
}

impl Current {
    pub fn new(graph: &BranchGraph, ring: Ring, values: Vec<BigInt>) -> Result<Self, CurrentError> {
        ring.validate()?;
        if values.len() != graph.branch_count() {
            return Err(CurrentError::Length {
                expected: graph.branch_count(),
                got: values.len(),
            });
        }
        let values: Vec<BigInt> = values.into_iter().map(|x| ring.reduce(x)).collect();
        for e in graph.true_edges() {
            let bs = graph.edge_branches(e);
            if !ring.reduce(&values[bs[0]] + &values[bs[1]]).is_zero() {
                return Err(CurrentError::Antisymmetry { edge: e });
            }
        }
        for (v, bs) in kirchhoff_groups(graph).into_iter().enumerate() {
            let s: BigInt = bs.iter().map(|&b| values[b].clone()).sum();
            if !ring.reduce(s).is_zero() {
                return Err(CurrentError::Kirchhoff { vertex: v });
            }
        }
        Ok(Current {
            graph: graph.clone(),
            ring,
            values,
        })
    }

    pub fn zero(graph: &BranchGraph, ring: Ring) -> Self {
        Current {
            graph: graph.clone(),
            values: vec![BigInt::zero(); graph.branch_count()],
            ring,
        }
    }

    pub fn graph(&self) -> &BranchGraph {
        &self.graph
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn value(&self, branch: usize) -> &BigInt {
        &self.values[branch]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Current) -> Result<Current, CurrentError> {
        if self.graph != other.graph || self.ring != other.ring {
            return Err(CurrentError::Mismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| self.ring.reduce(a + b))
            .collect();
        Ok(Current {
            graph: self.graph.clone(),
            ring: self.ring.clone(),
            values,
        })
    }

    pub fn reduce_mod(&self, n: u64) -> Result<Current, CurrentError> {
        Current::new(&self.graph, Ring::Mod(n), self.values.clone())
    }

    /// `(g·C)(g(b)) = C(b)`.
    pub fn act(&self, g: &GraphAutomorphism) -> Current {
        let mut values = vec![BigInt::zero(); self.values.len()];
        for (b, x) in self.values.iter().enumerate() {
            values[g.branch_map[b]] = x.clone();
        }
        Current {
            graph: self.graph.clone(),
            ring: self.ring.clone(),
            values,
        }
    }
}

fn kirchhoff_groups(g: &BranchGraph) -> Vec<Vec<usize>> {
    (0..g.vertex_count()).map(|v| g.branches_at(v)).collect()
}

/// Current group together with an explicit basis of currents.
#[derive(Clone, Debug)]
pub struct CurrentGroup {
    pub group: FgAbGroup,
    pub basis: Vec<Current>,
}

/// Basis: one current per fundamental cycle (oriented along its non-tree
/// edge from branch 0 to branch 1), then for each component with cusps one
/// current per cusp beyond the first, running from that cusp to the first.
pub fn current_group(g: &BranchGraph, ring: Ring) -> Result<CurrentGroup, CurrentError> {
    ring.validate()?;
    let mut basis = Vec::new();
    for comp in g.components() {
        let sub: BTreeSet<usize> = comp.iter().copied().collect();
        let tree = component_tree(g, &sub);
        for e in g.true_edges() {
            let ends = g.endpoints(e);
            if !sub.contains(&ends[0]) || tree.contains(&e) {
                continue;
            }
            let mut values = vec![BigInt::zero(); g.branch_count()];
            add_oriented_edge(g, e, ends[0], &mut values, 1);
            add_tree_path(g, &tree, ends[1], ends[0], &mut values);
            basis.push(values);
        }
        let cusps: Vec<usize> = (0..g.edge_count())
            .filter(|&e| g.is_cusp(e) && sub.contains(&g.endpoints(e)[0]))
            .collect();
        for &c in cusps.iter().skip(1) {
            let c0 = cusps[0];
            let mut values = vec![BigInt::zero(); g.branch_count()];
            // flow enters at cusp c and leaves at cusp c0
            values[g.edge_branches(c)[0]] += 1;
            values[g.edge_branches(c0)[0]] -= 1;
            add_tree_path(g, &tree, g.endpoints(c)[0], g.endpoints(c0)[0], &mut values);
            basis.push(values);
        }
    }
    let basis: Vec<Current> = basis
        .into_iter()
        .map(|v| Current::new(g, ring.clone(), v))
        .collect::<Result<_, _>>()?;
    let group = match ring {
        Ring::Integers => FgAbGroup::free(basis.len()),
        Ring::Mod(1) => FgAbGroup::trivial(),
        Ring::Mod(n) => FgAbGroup::new(0, vec![BigInt::from(n); basis.len()]).expect("n >= 2"),
    };
    Ok(CurrentGroup { group, basis })
}

fn component_tree(g: &BranchGraph, comp: &BTreeSet<usize>) -> BTreeSet<usize> {
    let start = *comp.iter().next().expect("nonempty component");
    let mut tree = BTreeSet::new();
    let mut seen = BTreeSet::from([start]);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for e in g.true_edges() {
            let ends = g.endpoints(e);
            let w = if ends[0] == v {
                ends[1]
            } else if ends[1] == v {
                ends[0]
            } else {
                continue;
            };
            if seen.insert(w) {
                tree.insert(e);
                queue.push_back(w);
            }
        }
    }
    tree
}

/// Add the flow of traversing `e` starting at vertex `from`: the branch at
/// the head gets `+sign`, the branch at the tail `-sign`.
fn add_oriented_edge(g: &BranchGraph, e: usize, from: usize, values: &mut [BigInt], sign: i64) {
    let bs = g.edge_branches(e);
    let (tail, head) = if g.branch(bs[0]).vertex == from {
        (bs[0], bs[1])
    } else {
        (bs[1], bs[0])
    };
    values[head] += sign;
    values[tail] -= sign;
}

fn add_tree_path(
    g: &BranchGraph,
    tree: &BTreeSet<usize>,
    from: usize,
    to: usize,
    values: &mut [BigInt],
) {
    let path = g.tree_path(tree, from, to);
    let mut at = from;
    for e in path {
        add_oriented_edge(g, e, at, values, 1);
        let ends = g.endpoints(e);
        at = if ends[0] == at { ends[1] } else { ends[0] };
    }
}

/// One step of an oriented path: traverse `edge` starting from `from`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub edge: usize,
    pub from: usize,
}

#[derive(Clone, Debug)]
pub enum PathCurrent {
    Closed(Current),
    /// Branch values plus the vertex defects (start: -1, end: +1).
    Open {
        values: Vec<BigInt>,
        boundary: Vec<(usize, BigInt)>,
    },
}

impl PathCurrent {
    pub fn values(&self) -> &[BigInt] {
        match self {
            PathCurrent::Closed(c) => c.values(),
            PathCurrent::Open { values, .. } => values,
        }
    }
}

pub fn path_current(g: &BranchGraph, path: &[Step]) -> Result<PathCurrent, CurrentError> {
    if path.is_empty() {
        return Err(CurrentError::NonSimplePath("empty path".into()));
    }
    let mut vertices = vec![path[0].from];
    let mut values = vec![BigInt::zero(); g.branch_count()];
    let mut used = BTreeSet::new();
    let mut at = path[0].from;
    for (i, s) in path.iter().enumerate() {
        if s.edge >= g.edge_count() || g.is_cusp(s.edge) {
            return Err(CurrentError::NonSimplePath(format!(
                "step {i} is not a true edge"
            )));
        }
        let ends = g.endpoints(s.edge);
        if s.from != at || !ends.contains(&at) {
            return Err(CurrentError::NonSimplePath(format!(
                "step {i} does not continue the path"
            )));
        }
        if !used.insert(s.edge) {
            return Err(CurrentError::NonSimplePath(format!(
                "edge {} repeats",
                s.edge
            )));
        }
        add_oriented_edge(g, s.edge, at, &mut values, 1);
        at = if ends[0] == at { ends[1] } else { ends[0] };
        vertices.push(at);
    }
    let closed = vertices.first() == vertices.last();
    let interior = if closed {
        &vertices[1..]
    } else {
        &vertices[..]
    };
    if interior.iter().collect::<BTreeSet<_>>().len() != interior.len() {
        return Err(CurrentError::NonSimplePath("vertex repeats".into()));
    }
    if closed {
        return Ok(PathCurrent::Closed(Current::new(
            g,
            Ring::Integers,
            values,
        )?));
    }
    let boundary = vec![(vertices[0], BigInt::from(-1)), (at, BigInt::one())];
    Ok(PathCurrent::Open { values, boundary })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<usize>,
}

impl Subgraph {
    pub fn from_vertices(vertices: impl IntoIterator<Item = usize>) -> Self {
        Subgraph {
            vertices: vertices.into_iter().collect(),
            edges: BTreeSet::new(),
        }
    }

    /// Edges with at least one endpoint in the subgraph, plus its own edges.
    pub fn star(&self, g: &BranchGraph) -> Result<BTreeSet<usize>, CurrentError> {
        if self.vertices.iter().any(|&v| v >= g.vertex_count())
            || self.edges.iter().any(|&e| e >= g.edge_count())
        {
            return Err(CurrentError::BadSubgraph);
        }
        let mut star = self.edges.clone();
        for e in 0..g.edge_count() {
            if g.endpoints(e).iter().any(|v| self.vertices.contains(v)) {
                star.insert(e);
            }
        }
        Ok(star)
    }
}

pub fn vanishes_on_star(
    c: &Current,
    k: &Subgraph,
    modulus: Option<u64>,
) -> Result<bool, CurrentError> {
    let star = k.star(c.graph())?;
    let m = match modulus {
        Some(0) => return Err(CurrentError::BadModulus),
        Some(n) => Some(BigInt::from(n)),
        None => None,
    };
    Ok(star.iter().all(|&e| {
        c.graph().edge_branches(e).iter().all(|&b| match &m {
            Some(n) => c.value(b).mod_floor(n).is_zero(),
            None => c.value(b).is_zero(),
        })
    }))
}

/// Automorphism of a branch graph given on vertices, edges and branches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphAutomorphism {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
    pub branch_map: Vec<usize>,
}

impl GraphAutomorphism {
    pub fn identity(g: &BranchGraph) -> Self {
        GraphAutomorphism {
            vertex_map: (0..g.vertex_count()).collect(),
            edge_map: (0..g.edge_count()).collect(),
            branch_map: (0..g.branch_count()).collect(),
        }
    }

    pub fn validate(&self, g: &BranchGraph) -> Result<(), CurrentError> {
        let perm = |m: &[usize], n: usize| {
            m.len() == n && m.iter().all(|&x| x < n) && m.iter().collect::<BTreeSet<_>>().len() == n
        };
        if !perm(&self.vertex_map, g.vertex_count())
            || !perm(&self.edge_map, g.edge_count())
            || !perm(&self.branch_map, g.branch_count())
        {
            return Err(CurrentError::BadAction("maps are not permutations".into()));
        }
        for b in 0..g.branch_count() {
            let br = g.branch(b);
            let img = g.branch(self.branch_map[b]);
            if img.vertex != self.vertex_map[br.vertex] || img.edge != self.edge_map[br.edge] {
                return Err(CurrentError::BadAction(format!(
                    "branch {b} is moved incompatibly"
                )));
            }
        }
        Ok(())
    }

    pub fn then(&self, next: &GraphAutomorphism) -> GraphAutomorphism {
        let c = |a: &[usize], b: &[usize]| a.iter().map(|&x| b[x]).collect();
        GraphAutomorphism {
            vertex_map: c(&self.vertex_map, &next.vertex_map),
            edge_map: c(&self.edge_map, &next.edge_map),
            branch_map: c(&self.branch_map, &next.branch_map),
        }
    }
}

/// Finite group acting on a graph, listed element by element.
#[derive(Clone, Debug)]
pub struct GraphAction {
    pub elements: Vec<GraphAutomorphism>,
}

impl GraphAction {
    pub fn validate(&self, g: &BranchGraph) -> Result<(), CurrentError> {
        if !self.elements.contains(&GraphAutomorphism::identity(g)) {
            return Err(CurrentError::BadAction("identity missing".into()));
        }
        for a in &self.elements {
            a.validate(g)?;
            for b in &self.elements {
                if !self.elements.contains(&a.then(b)) {
                    return Err(CurrentError::BadAction(
                        "not closed under composition".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Sum of `g·C0` over one representative `g` per left coset of the
/// subgroup (given by element indices).
pub fn equivariant_average(
    action: &GraphAction,
    c0: &Current,
    subgroup: &[usize],
) -> Result<Current, CurrentError> {
    action.validate(c0.graph())?;
    if subgroup.iter().any(|&i| i >= action.elements.len()) {
        return Err(CurrentError::BadAction(
            "subgroup index out of range".into(),
        ));
    }
    for &h in subgroup {
        if c0.act(&action.elements[h]) != *c0 {
            return Err(CurrentError::NotStabilized { index: h });
        }
    }
    let mut covered = vec![false; action.elements.len()];
    let mut total = Current::zero(c0.graph(), c0.ring().clone());
    for (i, g) in action.elements.iter().enumerate() {
        if covered[i] {
            continue;
        }
        for &h in subgroup {
            // g h
            let gh = action.elements[h].then(g);
            let j = action
                .elements
                .iter()
                .position(|x| *x == gh)
                .expect("closed");
            covered[j] = true;
        }
        covered[i] = true;
        total = total.add(&c0.act(g))?;
    }
    Ok(total)
}
