//! Berkovich's polysimplicial category and finite polysimplicial sets.
//!
//! A morphism `[m] -> [n]` is stored per target coordinate: either a
//! constant vertex, or an injective map out of a distinct source coordinate.
//! This form is canonical, so structural equality is equality of the
//! induced set maps.
//!
//! A finite polysimplicial set is kept as a quotient of a disjoint union of
//! representables by generating relations; every cell of index of dimension
//! at most the largest generator dimension is materialized as an equivalence
//! class of pairs (generator, morphism into it).

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::presentation::{letter, GroupPresentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("invalid poly-index {0:?}: entries must all be >= 1, or the tuple must be (0)")]
    BadIndex(Vec<usize>),
    #[error("invalid triple: {0}")]
    BadTriple(String),
    #[error(
        "cannot compose: target {left} of the first map differs from source {right} of the second"
    )]
    IndexMismatch { left: PolyIndex, right: PolyIndex },
    #[error("relation {index}: {reason}")]
    BadRelation { index: usize, reason: String },
    #[error("index {0} exceeds the materialized dimension")]
    TooLarge(PolyIndex),
    #[error("cell {0} is degenerate after gluing")]
    DegenerateCell(usize),
    #[error("cells {0} and {1} are identified after gluing")]
    CollapsedCells(usize, usize),
    #[error("morphism: {0}")]
    BadMorphism(String),
    #[error("complex is disconnected")]
    Disconnected,
    #[error("cell {0} is not a nondegenerate cell")]
    NotNondegenerate(usize),
    #[error("strata functor: {0}")]
    BadFunctor(String),
}

/// `(n_0, ..., n_p)`; the point `(0)` is stored as the empty tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyIndex(Vec<usize>);

impl PolyIndex {
    pub fn new(tuple: &[usize]) -> Result<Self, PolyError> {
        if tuple == [0] {
            return Ok(PolyIndex(Vec::new()));
        }
        if tuple.is_empty() || tuple.contains(&0) {
            return Err(PolyError::BadIndex(tuple.to_vec()));
        }
        Ok(PolyIndex(tuple.to_vec()))
    }

    pub fn point() -> Self {
        PolyIndex(Vec::new())
    }

    /// Coordinates (empty for the point).
    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn tuple(&self) -> Vec<usize> {
        if self.0.is_empty() {
            vec![0]
        } else {
            self.0.clone()
        }
    }

    pub fn width(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn dim(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_sorted(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn is_point(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &PolyIndex) -> PolyIndex {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        PolyIndex(v)
    }

    /// All points of `[n] = [n_0] x ... x [n_p]`.
    pub fn points(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &n in &self.0 {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..=n).map(move |i| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// Every index of dimension at most `d`, ordered by dimension then tuple.
    pub fn all_up_to_dim(d: usize) -> Vec<PolyIndex> {
        let mut out = vec![PolyIndex::point()];
        fn compositions(k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![Vec::new()];
            }
            let mut out = Vec::new();
            for first in 1..=k {
                for mut rest in compositions(k - first) {
                    rest.insert(0, first);
                    out.push(rest);
                }
            }
            out
        }
        for k in 1..=d {
            let mut c = compositions(k);
            c.sort();
            out.extend(c.into_iter().map(PolyIndex));
        }
        out
    }
}

impl fmt::Display for PolyIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.tuple().iter().map(|n| n.to_string()).collect();
        write!(f, "({})", t.join(","))
    }
}

/// Value of one target coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    Const(usize),
    /// `alpha` injective `[m_src] -> [n_l]`
    From {
        src: usize,
        alpha: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LambdaMorphism {
    src: PolyIndex,
    dst: PolyIndex,
    assign: Vec<Coord>,
}

impl LambdaMorphism {
    /// Build from a triple `(J, f, alpha)`: `j_set` lists `J`, `f[k]` is the
    /// target coordinate of `j_set[k]`, and `alpha[l]` is the map into `[n_l]`
    /// (a single value for coordinates outside the image of `f`).
    pub fn from_triple(
        src: &PolyIndex,
        dst: &PolyIndex,
        j_set: &[usize],
        f: &[usize],
        alpha: &[Vec<usize>],
    ) -> Result<Self, PolyError> {
        let bad = |s: &str| Err(PolyError::BadTriple(s.to_string()));
        if j_set.len() != f.len() {
            return bad("J and f differ in length");
        }
        if alpha.len() != dst.0.len() {
            return bad("one alpha per target coordinate required");
        }
        let f_set: BTreeSet<usize> = f.iter().copied().collect();
        if f_set.len() != f.len() || f.iter().any(|&l| l >= dst.0.len()) {
            return bad("f must be injective into the target coordinates");
        }
        if j_set.iter().any(|&j| j >= src.0.len())
            || j_set.iter().collect::<BTreeSet<_>>().len() != j_set.len()
        {
            return bad("J must be a subset of the source coordinates");
        }
        let mut assign = Vec::with_capacity(dst.0.len());
        for (l, &n) in dst.0.iter().enumerate() {
            let a = &alpha[l];
            if a.iter().any(|&x| x > n) {
                return bad("alpha value out of range");
            }
            match f.iter().position(|&t| t == l) {
                Some(k) => {
                    let j = j_set[k];
                    if a.len() != src.0[j] + 1 || a.iter().collect::<BTreeSet<_>>().len() != a.len()
                    {
                        return bad("alpha_l must be injective on [m_j]");
                    }
                    assign.push(Coord::From {
                        src: j,
                        alpha: a.clone(),
                    });
                }
                None => {
                    if a.len() != 1 {
                        return bad("alpha_l outside Im(f) must be a single vertex");
                    }
                    assign.push(Coord::Const(a[0]));
                }
            }
        }
        Ok(LambdaMorphism {
            src: src.clone(),
            dst: dst.clone(),
            assign,
        })
    }

    pub fn identity(n: &PolyIndex) -> Self {
        let assign =
            n.0.iter()
                .enumerate()
                .map(|(j, &k)| Coord::From {
                    src: j,
                    alpha: (0..=k).collect(),
                })
                .collect();
        LambdaMorphism {
            src: n.clone(),
            dst: n.clone(),
            assign,
        }
    }

    /// Constant map onto a vertex of `dst`.
    pub fn constant(src: &PolyIndex, dst: &PolyIndex, vertex: &[usize]) -> Self {
        assert_eq!(vertex.len(), dst.0.len());
        LambdaMorphism {
            src: src.clone(),
            dst: dst.clone(),
            assign: vertex.iter().map(|&v| Coord::Const(v)).collect(),
        }
    }

    pub fn src(&self) -> &PolyIndex {
        &self.src
    }

    pub fn dst(&self) -> &PolyIndex {
        &self.dst
    }

    pub fn coords(&self) -> &[Coord] {
        &self.assign
    }

    pub fn apply(&self, point: &[usize]) -> Vec<usize> {
        self.assign
            .iter()
            .map(|c| match c {
                Coord::Const(v) => *v,
                Coord::From { src, alpha } => alpha[point[*src]],
            })
            .collect()
    }

    /// Induced set map as a table over `src.points()`.
    pub fn table(&self) -> Vec<Vec<usize>> {
        self.src.points().iter().map(|p| self.apply(p)).collect()
    }

    pub fn is_injective(&self) -> bool {
        let used: BTreeSet<usize> = self
            .assign
            .iter()
            .filter_map(|c| match c {
                Coord::From { src, .. } => Some(*src),
                Coord::Const(_) => None,
            })
            .collect();
        used.len() == self.src.0.len()
    }

    pub fn is_surjective(&self) -> bool {
        self.assign.iter().enumerate().all(|(l, c)| match c {
            Coord::Const(_) => false,
            Coord::From { alpha, .. } => alpha.len() == self.dst.0[l] + 1,
        })
    }

    pub fn is_iso(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// `self ∘ first`
    pub fn after(&self, first: &LambdaMorphism) -> Result<LambdaMorphism, PolyError> {
        compose(self, first)
    }

    /// Factor as `iota ∘ sigma` with `sigma` surjective, `iota` injective.
    pub fn factor(&self) -> (LambdaMorphism, LambdaMorphism) {
        let mut mid = Vec::new();
        let mut sigma = Vec::new();
        let mut iota = Vec::new();
        for c in &self.assign {
            match c {
                Coord::Const(v) => iota.push(Coord::Const(*v)),
                Coord::From { src, alpha } => {
                    let k = mid.len();
                    let m = self.src.0[*src];
                    mid.push(m);
                    sigma.push(Coord::From {
                        src: *src,
                        alpha: (0..=m).collect(),
                    });
                    iota.push(Coord::From {
                        src: k,
                        alpha: alpha.clone(),
                    });
                }
            }
        }
        let mid = PolyIndex(mid);
        (
            LambdaMorphism {
                src: mid.clone(),
                dst: self.dst.clone(),
                assign: iota,
            },
            LambdaMorphism {
                src: self.src.clone(),
                dst: mid,
                assign: sigma,
            },
        )
    }

    /// `a ⊕ b : m ⊕ m' -> n ⊕ n'`
    pub fn direct_sum(a: &LambdaMorphism, b: &LambdaMorphism) -> LambdaMorphism {
        let shift = a.src.0.len();
        let mut assign = a.assign.clone();
        assign.extend(b.assign.iter().map(|c| match c {
            Coord::Const(v) => Coord::Const(*v),
            Coord::From { src, alpha } => Coord::From {
                src: src + shift,
                alpha: alpha.clone(),
            },
        }));
        LambdaMorphism {
            src: a.src.concat(&b.src),
            dst: a.dst.concat(&b.dst),
            assign,
        }
    }
}

impl fmt::Display for LambdaMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .assign
            .iter()
            .map(|c| match c {
                Coord::Const(v) => v.to_string(),
                Coord::From { src, alpha } => {
                    let a: Vec<String> = alpha.iter().map(|x| x.to_string()).collect();
                    format!("x{src}->[{}]", a.join(","))
                }
            })
            .collect();
        write!(f, "{}->{}:[{}]", self.src, self.dst, parts.join(";"))
    }
}

/// `g2 ∘ g1`
pub fn compose(g2: &LambdaMorphism, g1: &LambdaMorphism) -> Result<LambdaMorphism, PolyError> {
    if g1.dst != g2.src {
        return Err(PolyError::IndexMismatch {
            left: g1.dst.clone(),
            right: g2.src.clone(),
        });
    }
    let assign = g2
        .assign
        .iter()
        .map(|c| match c {
            Coord::Const(v) => Coord::Const(*v),
            Coord::From { src: j, alpha } => match &g1.assign[*j] {
                Coord::Const(v) => Coord::Const(alpha[*v]),
                Coord::From {
                    src: i,
                    alpha: beta,
                } => Coord::From {
                    src: *i,
                    alpha: beta.iter().map(|&x| alpha[x]).collect(),
                },
            },
        })
        .collect();
    Ok(LambdaMorphism {
        src: g1.src.clone(),
        dst: g2.dst.clone(),
        assign,
    })
}

fn injections(k: usize, n: usize) -> Vec<Vec<usize>> {
    // injective maps [k] -> [n], lexicographic
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k + 1 {
            out.push(cur.clone());
            return;
        }
        for v in 0..=n {
            if !cur.contains(&v) {
                cur.push(v);
                go(k, n, cur, out);
                cur.pop();
            }
        }
    }
    if k <= n {
        go(k, n, &mut cur, &mut out);
    }
    out
}

/// Every morphism `m -> n`, each listed once, in a fixed lexicographic order.
pub fn lambda_hom(m: &PolyIndex, n: &PolyIndex) -> Vec<LambdaMorphism> {
    let mut out = Vec::new();
    let mut cur: Vec<Coord> = Vec::new();
    fn go(
        m: &PolyIndex,
        n: &PolyIndex,
        used: &mut Vec<bool>,
        cur: &mut Vec<Coord>,
        out: &mut Vec<LambdaMorphism>,
    ) {
        let l = cur.len();
        if l == n.0.len() {
            out.push(LambdaMorphism {
                src: m.clone(),
                dst: n.clone(),
                assign: cur.clone(),
            });
            return;
        }
        let nl = n.0[l];
        for v in 0..=nl {
            cur.push(Coord::Const(v));
            go(m, n, used, cur, out);
            cur.pop();
        }
        for j in 0..m.0.len() {
            if used[j] {
                continue;
            }
            for alpha in injections(m.0[j], nl) {
                used[j] = true;
                cur.push(Coord::From { src: j, alpha });
                go(m, n, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut used = vec![false; m.0.len()];
    go(m, n, &mut used, &mut cur, &mut out);
    out
}

/// Coordinate permutation from the sorted rearrangement of `n` onto `n`.
fn sort_iso(n: &PolyIndex) -> LambdaMorphism {
    let mut order: Vec<usize> = (0..n.0.len()).collect();
    order.sort_by_key(|&l| n.0[l]);
    let sorted = PolyIndex(order.iter().map(|&l| n.0[l]).collect());
    let alpha: Vec<Vec<usize>> = n.0.iter().map(|&k| (0..=k).collect()).collect();
    let j_set: Vec<usize> = (0..order.len()).collect();
    LambdaMorphism::from_triple(&sorted, n, &j_set, &order, &alpha).expect("coordinate permutation")
}

pub fn automorphisms(n: &PolyIndex) -> Vec<LambdaMorphism> {
    lambda_hom(n, n)
        .into_iter()
        .filter(LambdaMorphism::is_iso)
        .collect()
}

/// A pair (generator, morphism into the generator's index).
pub type Member = (usize, LambdaMorphism);

pub type CellId = usize;

#[derive(Clone, Debug)]
struct CellInfo {
    level: PolyIndex,
    rep: usize,
    degenerate: bool,
    members: Vec<usize>,
}

/// Finite polysimplicial set presented by generators and relations.
#[derive(Clone, Debug)]
pub struct PolysimplicialSet {
    generators: Vec<PolyIndex>,
    relations: Vec<(Member, Member)>,
    max_dim: usize,
    members: Vec<Member>,
    member_ids: HashMap<Member, usize>,
    class_of: Vec<CellId>,
    cells: Vec<CellInfo>,
    by_level: BTreeMap<PolyIndex, Vec<CellId>>,
}

struct HomCache(HashMap<(PolyIndex, PolyIndex), Vec<LambdaMorphism>>);

impl HomCache {
    fn get(&mut self, m: &PolyIndex, n: &PolyIndex) -> &Vec<LambdaMorphism> {
        self.0
            .entry((m.clone(), n.clone()))
            .or_insert_with(|| lambda_hom(m, n))
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

impl PolysimplicialSet {
    /// Quotient of `∐ Λ[generators]` by the presheaf congruence generated by
    /// `relations` (pairs of members at a common index).
    pub fn from_relations(
        generators: Vec<PolyIndex>,
        relations: Vec<(Member, Member)>,
    ) -> Result<Self, PolyError> {
        Self::from_relations_up_to(generators, relations, 0)
    }

    /// As `from_relations`, materializing every level of dimension at most
    /// `max(dim, largest generator dimension)`.
    pub fn from_relations_up_to(
        generators: Vec<PolyIndex>,
        relations: Vec<(Member, Member)>,
        dim: usize,
    ) -> Result<Self, PolyError> {
        for (index, ((g, a), (h, b))) in relations.iter().enumerate() {
            let bad = |reason: &str| {
                Err(PolyError::BadRelation {
                    index,
                    reason: reason.to_string(),
                })
            };
            if *g >= generators.len() || *h >= generators.len() {
                return bad("unknown generator");
            }
            if a.dst != generators[*g] || b.dst != generators[*h] {
                return bad("morphism target differs from the generator's index");
            }
            if a.src != b.src {
                return bad("the two sides live at different indices");
            }
        }
        let max_dim = generators
            .iter()
            .map(PolyIndex::dim)
            .chain(relations.iter().map(|((_, a), _)| a.src.dim()))
            .max()
            .unwrap_or(0)
            .max(dim);
        let levels = PolyIndex::all_up_to_dim(max_dim);
        let mut homs = HomCache(HashMap::new());
        let mut members: Vec<Member> = Vec::new();
        let mut member_ids: HashMap<Member, usize> = HashMap::new();
        for m in &levels {
            for (g, n) in generators.iter().enumerate() {
                for phi in homs.get(m, n).clone() {
                    member_ids.insert((g, phi.clone()), members.len());
                    members.push((g, phi));
                }
            }
        }
        let mut uf = UnionFind((0..members.len()).collect());
        for ((g, a), (h, b)) in &relations {
            for m in &levels {
                for gamma in homs.get(m, &a.src).clone() {
                    let x = member_ids[&(*g, compose(a, &gamma).expect("composable"))];
                    let y = member_ids[&(*h, compose(b, &gamma).expect("composable"))];
                    uf.union(x, y);
                }
            }
        }
        let mut class_of = vec![usize::MAX; members.len()];
        let mut cells: Vec<CellInfo> = Vec::new();
        let mut root_cell: HashMap<usize, CellId> = HashMap::new();
        for i in 0..members.len() {
            let r = uf.find(i);
            let c = *root_cell.entry(r).or_insert_with(|| {
                cells.push(CellInfo {
                    level: members[i].1.src.clone(),
                    rep: i,
                    degenerate: false,
                    members: Vec::new(),
                });
                cells.len() - 1
            });
            class_of[i] = c;
            cells[c].members.push(i);
            if !members[i].1.is_injective() {
                cells[c].degenerate = true;
            }
        }
        let mut by_level: BTreeMap<PolyIndex, Vec<CellId>> = BTreeMap::new();
        for (c, info) in cells.iter().enumerate() {
            by_level.entry(info.level.clone()).or_default().push(c);
        }
        Ok(PolysimplicialSet {
            generators,
            relations,
            max_dim,
            members,
            member_ids,
            class_of,
            cells,
            by_level,
        })
    }

    /// The same set with levels materialized up to dimension `dim`.
    pub fn extended_to(&self, dim: usize) -> Self {
        Self::from_relations_up_to(self.generators.clone(), self.relations.clone(), dim)
            .expect("relations were already validated")
    }

    /// The representable `Λ[n]`.
    pub fn representable(n: &PolyIndex) -> Self {
        Self::from_relations(vec![n.clone()], Vec::new()).expect("no relations")
    }

    pub fn point() -> Self {
        Self::representable(&PolyIndex::point())
    }

    pub fn empty() -> Self {
        Self::from_relations(Vec::new(), Vec::new()).expect("no relations")
    }

    /// Disjoint union.
    pub fn disjoint_union(&self, other: &PolysimplicialSet) -> Self {
        let shift = self.generators.len();
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        let mut rels = self.relations.clone();
        rels.extend(
            other
                .relations
                .iter()
                .map(|((g, a), (h, b))| ((g + shift, a.clone()), (h + shift, b.clone()))),
        );
        Self::from_relations(gens, rels).expect("valid relations")
    }

    pub fn generators(&self) -> &[PolyIndex] {
        &self.generators
    }

    pub fn relations(&self) -> &[(Member, Member)] {
        &self.relations
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn level(&self, c: CellId) -> &PolyIndex {
        &self.cells[c].level
    }

    pub fn cells_at(&self, m: &PolyIndex) -> &[CellId] {
        self.by_level.get(m).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_degenerate(&self, c: CellId) -> bool {
        self.cells[c].degenerate
    }

    /// Representative pair (generator, morphism) of a cell.
    pub fn representative(&self, c: CellId) -> &Member {
        &self.members[self.cells[c].rep]
    }

    /// Cell of a member `(g, phi)`.
    pub fn cell_of(&self, g: usize, phi: &LambdaMorphism) -> Result<CellId, PolyError> {
        self.member_ids
            .get(&(g, phi.clone()))
            .map(|&i| self.class_of[i])
            .ok_or_else(|| PolyError::TooLarge(phi.src.clone()))
    }

    /// The generator's top cell.
    pub fn generator_cell(&self, g: usize) -> CellId {
        self.cell_of(g, &LambdaMorphism::identity(&self.generators[g]))
            .expect("identity member")
    }

    /// `gamma^* c`
    pub fn pullback(&self, c: CellId, gamma: &LambdaMorphism) -> Result<CellId, PolyError> {
        let (g, phi) = self.representative(c);
        let composite = compose(phi, gamma)?;
        self.cell_of(*g, &composite)
    }

    /// Eilenberg–Zilber normal form: `c = sigma^* x` with `x` nondegenerate
    /// and `sigma` surjective.
    pub fn normal_form(&self, c: CellId) -> (CellId, LambdaMorphism) {
        let info = &self.cells[c];
        if !info.degenerate {
            return (c, LambdaMorphism::identity(&info.level));
        }
        for &i in &info.members {
            let (g, phi) = &self.members[i];
            if phi.is_injective() {
                continue;
            }
            let (iota, sigma) = phi.factor();
            let y = self
                .cell_of(*g, &iota)
                .expect("smaller index is materialized");
            let (x, tau) = self.normal_form(y);
            return (x, compose(&tau, &sigma).expect("composable"));
        }
        unreachable!("degenerate cell has a non-injective member")
    }

    /// Nondegenerate cells at every index, including automorphism translates.
    pub fn nondegenerate_all(&self) -> BTreeMap<PolyIndex, Vec<CellId>> {
        let mut out: BTreeMap<PolyIndex, Vec<CellId>> = BTreeMap::new();
        for (m, cs) in &self.by_level {
            let nd: Vec<CellId> = cs
                .iter()
                .copied()
                .filter(|&c| !self.cells[c].degenerate)
                .collect();
            if !nd.is_empty() {
                out.insert(m.clone(), nd);
            }
        }
        out
    }

    /// Orbit of a nondegenerate cell under `Aut(level)`.
    pub fn orbit(&self, c: CellId) -> BTreeSet<CellId> {
        automorphisms(&self.cells[c].level)
            .iter()
            .map(|a| self.pullback(c, a).expect("same level"))
            .collect()
    }

    /// Nondegenerate cells up to isomorphism: one representative (the
    /// smallest id of its `Aut` orbit) per stratum, at nondecreasing levels.
    pub fn nondegenerate_cells(&self) -> BTreeMap<PolyIndex, Vec<CellId>> {
        let mut out: BTreeMap<PolyIndex, Vec<CellId>> = BTreeMap::new();
        for (m, cs) in self.nondegenerate_all() {
            if !m.is_sorted() {
                continue;
            }
            let mut reps = BTreeSet::new();
            for c in cs {
                reps.insert(*self.orbit(c).iter().next().expect("orbit contains c"));
            }
            out.insert(m, reps.into_iter().collect());
        }
        out
    }

    /// Stratum representative of a nondegenerate cell: moved to the sorted
    /// level by a coordinate permutation, then the smallest of its orbit.
    pub fn stratum_rep(&self, x: CellId) -> CellId {
        let sorted = self
            .pullback(x, &sort_iso(&self.cells[x].level))
            .expect("permuted cell is materialized");
        *self.orbit(sorted).iter().next().expect("nonempty orbit")
    }

    pub fn is_interiorly_free(&self) -> bool {
        self.nondegenerate_all().iter().all(|(m, cs)| {
            let auts = automorphisms(m);
            cs.iter().all(|&c| {
                let id = LambdaMorphism::identity(m);
                auts.iter()
                    .filter(|a| **a != id)
                    .all(|a| self.pullback(c, a).expect("same level") != c)
            })
        })
    }

    /// Stratum (orbit representative) of any cell: that of its nondegenerate part.
    pub fn stratum_of(&self, c: CellId) -> CellId {
        let (x, _) = self.normal_form(c);
        self.stratum_rep(x)
    }

    pub fn strata_poset(&self) -> StrataPoset {
        let reps: Vec<CellId> = self.nondegenerate_cells().into_values().flatten().collect();
        let index: HashMap<CellId, usize> = reps.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let n = reps.len();
        let mut le = vec![vec![false; n]; n];
        for (yi, &y) in reps.iter().enumerate() {
            let ly = self.cells[y].level.clone();
            for m in PolyIndex::all_up_to_dim(ly.dim()) {
                for iota in lambda_hom(&m, &ly)
                    .into_iter()
                    .filter(LambdaMorphism::is_injective)
                {
                    let x = self.pullback(y, &iota).expect("face is materialized");
                    if self.cells[x].degenerate {
                        continue;
                    }
                    let xs = self.stratum_rep(x);
                    le[index[&xs]][yi] = true;
                }
            }
        }
        StrataPoset {
            cells: reps.clone(),
            dims: reps.iter().map(|&c| self.cells[c].level.dim()).collect(),
            le,
        }
    }

    /// Alternating count of open cells of the realization. Each stratum
    /// contributes the compactly supported Euler characteristic of its open
    /// polysimplex modulo the stabilizer, computed by Burnside averaging.
    pub fn euler_characteristic(&self) -> BigRational {
        let mut total = BigRational::zero();
        for (m, cs) in self.nondegenerate_cells() {
            let auts = automorphisms(&m);
            for c in cs {
                let stab: Vec<&LambdaMorphism> = auts
                    .iter()
                    .filter(|a| self.pullback(c, a).expect("same level") == c)
                    .collect();
                let sum: i64 = stab.iter().map(|a| open_fixed_euler(a)).sum();
                total += BigRational::new(sum.into(), (stab.len() as i64).into());
            }
        }
        total
    }

    /// Connected components of nondegenerate cells, as sorted cell lists.
    pub fn components(&self) -> Vec<Vec<CellId>> {
        let nd: Vec<CellId> = self.nondegenerate_all().into_values().flatten().collect();
        let pos: HashMap<CellId, usize> = nd.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut uf = UnionFind((0..nd.len()).collect());
        for &y in &nd {
            let ly = self.cells[y].level.clone();
            for iota in lambda_hom(&PolyIndex::point(), &ly) {
                let x = self.pullback(y, &iota).expect("vertex");
                if let Some(&xi) = pos.get(&x) {
                    uf.union(pos[&y], xi);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<CellId>> = BTreeMap::new();
        for (i, &c) in nd.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().push(c);
        }
        groups.into_values().collect()
    }

    /// Rebuild with one generator per stratum and face relations between
    /// them (nondegenerate-cell normal form).
    pub fn normalize(&self) -> PolysimplicialSet {
        let reps: Vec<CellId> = self.nondegenerate_cells().into_values().flatten().collect();
        let gen_of: HashMap<CellId, usize> =
            reps.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let gens: Vec<PolyIndex> = reps.iter().map(|&c| self.cells[c].level.clone()).collect();
        let mut rels = Vec::new();
        for (yi, &y) in reps.iter().enumerate() {
            let ly = &gens[yi];
            for m in PolyIndex::all_up_to_dim(ly.dim()) {
                for iota in lambda_hom(&m, ly)
                    .into_iter()
                    .filter(LambdaMorphism::is_injective)
                {
                    if iota == LambdaMorphism::identity(ly) {
                        continue;
                    }
                    let x = self.pullback(y, &iota).expect("face is materialized");
                    let (z, sigma) = self.normal_form(x);
                    let (z0, alpha) = self.orbit_translate(z);
                    let rhs = compose(&alpha, &sigma).expect("composable");
                    rels.push(((yi, iota), (gen_of[&z0], rhs)));
                }
            }
        }
        PolysimplicialSet::from_relations(gens, rels).expect("normalized relations are well formed")
    }

    /// For a nondegenerate `z`, the stratum representative `z0` and an
    /// isomorphism `alpha` with `z = alpha^* z0`.
    pub fn orbit_translate(&self, z: CellId) -> (CellId, LambdaMorphism) {
        let z0 = self.stratum_rep(z);
        let isos = lambda_hom(&self.cells[z].level, &self.cells[z0].level);
        for a in isos.into_iter().filter(LambdaMorphism::is_iso) {
            if self.pullback(z0, &a).expect("same level") == z {
                return (z0, a);
            }
        }
        unreachable!("orbit membership is witnessed by an automorphism")
    }

    /// Fundamental group of the localization of the category of
    /// nondegenerate cells and injective morphisms, computed on a skeleton
    /// and simplified by Tietze
    /// moves. Generators are non-tree arrows, relators are composition
    /// triangles.
    pub fn category_pi1(&self, base: CellId) -> Result<GroupPresentation, PolyError> {
        if base >= self.cells.len() || self.cells[base].degenerate {
            return Err(PolyError::NotNondegenerate(base));
        }
        if self.components().len() > 1 {
            return Err(PolyError::Disconnected);
        }
        // full subcategory on one object per isomorphism class
        let base = self.stratum_rep(base);
        let objects: BTreeSet<CellId> =
            self.nondegenerate_cells().into_values().flatten().collect();
        let levels: BTreeSet<PolyIndex> = objects
            .iter()
            .map(|&c| self.cells[c].level.clone())
            .collect();
        // arrows: (source cell, target cell, morphism)
        let mut arrows: Vec<(CellId, CellId, LambdaMorphism)> = Vec::new();
        let mut arrow_id: HashMap<(CellId, LambdaMorphism), usize> = HashMap::new();
        for &y in &objects {
            let ly = self.cells[y].level.clone();
            for m in levels.iter().filter(|m| m.dim() <= ly.dim()) {
                for iota in lambda_hom(m, &ly)
                    .into_iter()
                    .filter(LambdaMorphism::is_injective)
                {
                    let x = self.pullback(y, &iota).expect("face is materialized");
                    if !objects.contains(&x) {
                        continue;
                    }
                    arrow_id.insert((y, iota.clone()), arrows.len());
                    arrows.push((x, y, iota));
                }
            }
        }
        // spanning tree by BFS from the base over arrows in either direction
        let mut adj: HashMap<CellId, Vec<usize>> = HashMap::new();
        for (i, (x, y, _)) in arrows.iter().enumerate() {
            adj.entry(*x).or_default().push(i);
            adj.entry(*y).or_default().push(i);
        }
        let mut tree = vec![false; arrows.len()];
        let mut seen: BTreeSet<CellId> = [base].into();
        let mut queue = VecDeque::from([base]);
        while let Some(o) = queue.pop_front() {
            for &i in adj.get(&o).map(Vec::as_slice).unwrap_or(&[]) {
                let (x, y, _) = &arrows[i];
                let other = if *x == o { *y } else { *x };
                if seen.insert(other) {
                    tree[i] = true;
                    queue.push_back(other);
                }
            }
        }
        let mut gen_of: Vec<Option<usize>> = vec![None; arrows.len()];
        let mut names = Vec::new();
        for (i, (x, y, _)) in arrows.iter().enumerate() {
            let identity = x == y && arrows[i].2 == LambdaMorphism::identity(&self.cells[*y].level);
            if !tree[i] && !identity {
                gen_of[i] = Some(names.len());
                names.push(format!("a{i}"));
            }
        }
        let word = |i: usize| -> Word {
            gen_of[i]
                .map(|g| vec![letter(g, false)])
                .unwrap_or_default()
        };
        let mut relators: Vec<Word> = Vec::new();
        for (i, (_x, y, a)) in arrows.iter().enumerate() {
            // compose with every arrow out of y
            for &j in adj.get(y).map(Vec::as_slice).unwrap_or(&[]) {
                let (src_j, z, b) = &arrows[j];
                if src_j != y {
                    continue;
                }
                let c = compose(b, a).expect("composable");
                let k = arrow_id[&(*z, c)];
                let mut w = word(i);
                w.extend(word(j));
                w.extend(word(k).iter().rev().map(|&l| -l));
                relators.push(w);
            }
        }
        let pres = GroupPresentation::new(names, relators);
        Ok(pres.simplify(PI1_TIETZE_BUDGET))
    }
}

const PI1_TIETZE_BUDGET: usize = 100_000;

/// Compactly supported Euler characteristic of the fixed locus of an
/// automorphism acting on the open polysimplex.
fn open_fixed_euler(a: &LambdaMorphism) -> i64 {
    let k = a.assign.len();
    let mut visited = vec![false; k];
    let mut sign = 1i64;
    for start in 0..k {
        if visited[start] {
            continue;
        }
        // follow target l <- source coordinate, composing the vertex permutations
        let mut l = start;
        let mut perm: Vec<usize> = (0..=a.dst.0[start]).collect();
        loop {
            visited[l] = true;
            let Coord::From { src, alpha } = &a.assign[l] else {
                unreachable!("automorphism")
            };
            perm = perm.iter().map(|&x| alpha[x]).collect();
            l = *src;
            if l == start {
                break;
            }
        }
        let mut seen = vec![false; perm.len()];
        let mut cycles = 0;
        for s in 0..perm.len() {
            if seen[s] {
                continue;
            }
            cycles += 1;
            let mut t = s;
            while !seen[t] {
                seen[t] = true;
                t = perm[t];
            }
        }
        if (cycles - 1) % 2 == 1 {
            sign = -sign;
        }
    }
    sign
}

/// Strata poset: orbit representatives with `le[i][j]` iff stratum i ≤ stratum j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrataPoset {
    pub cells: Vec<CellId>,
    pub dims: Vec<usize>,
    pub le: Vec<Vec<bool>>,
}

impl StrataPoset {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index_of(&self, cell: CellId) -> Option<usize> {
        self.cells.iter().position(|&c| c == cell)
    }

    pub fn minimal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.le[j][i]))
            .collect()
    }

    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.le[i][j]))
            .collect()
    }
}

/// Morphism of polysimplicial sets, given by the image of each generator.
#[derive(Clone, Debug)]
pub struct PolyMorphism<'a> {
    pub source: &'a PolysimplicialSet,
    pub target: &'a PolysimplicialSet,
    pub images: Vec<CellId>,
}

impl<'a> PolyMorphism<'a> {
    /// Checks indices and that every generating relation is respected.
    pub fn new(
        source: &'a PolysimplicialSet,
        target: &'a PolysimplicialSet,
        images: Vec<CellId>,
    ) -> Result<Self, PolyError> {
        if images.len() != source.generators.len() {
            return Err(PolyError::BadMorphism(
                "one image per source generator required".into(),
            ));
        }
        if target.max_dim < source.max_dim {
            return Err(PolyError::BadMorphism(
                "target is materialized below the source dimension".into(),
            ));
        }
        for (g, &c) in images.iter().enumerate() {
            if c >= target.cells.len() || target.cells[c].level != source.generators[g] {
                return Err(PolyError::BadMorphism(format!(
                    "image of generator {g} has the wrong index"
                )));
            }
        }
        let m = PolyMorphism {
            source,
            target,
            images,
        };
        for (index, ((g, a), (h, b))) in source.relations.iter().enumerate() {
            if m.target.pullback(m.images[*g], a)? != m.target.pullback(m.images[*h], b)? {
                return Err(PolyError::BadMorphism(format!(
                    "relation {index} is not respected"
                )));
            }
        }
        Ok(m)
    }

    pub fn identity(c: &'a PolysimplicialSet) -> Self {
        let images = (0..c.generators.len())
            .map(|g| c.generator_cell(g))
            .collect();
        PolyMorphism {
            source: c,
            target: c,
            images,
        }
    }

    pub fn map_cell(&self, c: CellId) -> CellId {
        let (g, phi) = self.source.representative(c);
        self.target
            .pullback(self.images[*g], phi)
            .expect("target materializes source levels")
    }

    /// `other ∘ self`
    pub fn then(&self, other: &PolyMorphism<'a>) -> PolyMorphism<'a> {
        let images = self.images.iter().map(|&c| other.map_cell(c)).collect();
        PolyMorphism {
            source: self.source,
            target: other.target,
            images,
        }
    }

    /// Same map on every cell of the source.
    pub fn agrees_with(&self, other: &PolyMorphism<'_>) -> bool {
        (0..self.source.cells.len()).all(|c| self.map_cell(c) == other.map_cell(c))
    }

    /// Induced map on strata, as indices into the two strata posets.
    pub fn strata_map(&self) -> Vec<usize> {
        let sp = self.source.strata_poset();
        let tp = self.target.strata_poset();
        sp.cells
            .iter()
            .map(|&c| {
                let s = self.target.stratum_of(self.map_cell(c));
                tp.index_of(s).expect("stratum representative")
            })
            .collect()
    }
}

/// Coequalizer of two morphisms `C'' ⇉ C'`, renormalized.
pub fn coequalizer(
    f: &PolyMorphism<'_>,
    g: &PolyMorphism<'_>,
) -> Result<PolysimplicialSet, PolyError> {
    if !std::ptr::eq(f.source, g.source) || !std::ptr::eq(f.target, g.target) {
        return Err(PolyError::BadMorphism(
            "coequalizer needs parallel morphisms".into(),
        ));
    }
    let t = f.target;
    let mut rels = t.relations.clone();
    for x in 0..f.images.len() {
        let a = t.representative(f.images[x]).clone();
        let b = t.representative(g.images[x]).clone();
        if a != b {
            rels.push((a, b));
        }
    }
    Ok(PolysimplicialSet::from_relations(t.generators.clone(), rels)?.normalize())
}

/// Box product: generators are pairs of generators at the concatenated
/// index; relations of each factor are transported along `phi ⊕ id`.
pub fn box_product(c: &PolysimplicialSet, d: &PolysimplicialSet) -> PolysimplicialSet {
    let nd = d.generators.len();
    let mut gens = Vec::new();
    for a in &c.generators {
        for b in &d.generators {
            gens.push(a.concat(b));
        }
    }
    let mut rels = Vec::new();
    for ((g, phi), (h, psi)) in &c.relations {
        for (k, b) in d.generators.iter().enumerate() {
            let id = LambdaMorphism::identity(b);
            rels.push((
                (g * nd + k, LambdaMorphism::direct_sum(phi, &id)),
                (h * nd + k, LambdaMorphism::direct_sum(psi, &id)),
            ));
        }
    }
    for ((g, phi), (h, psi)) in &d.relations {
        for (k, a) in c.generators.iter().enumerate() {
            let id = LambdaMorphism::identity(a);
            rels.push((
                (k * nd + g, LambdaMorphism::direct_sum(&id, phi)),
                (k * nd + h, LambdaMorphism::direct_sum(&id, psi)),
            ));
        }
    }
    PolysimplicialSet::from_relations(gens, rels).expect("transported relations are well formed")
}

/// Functor from the strata poset of `C` (opposite order) to finite sets:
/// `values[s]` elements over stratum `s`, and for every comparable pair
/// `s ≤ t` a restriction map `values[t] -> values[s]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrataFunctor {
    pub values: Vec<usize>,
    pub restrictions: BTreeMap<(usize, usize), Vec<usize>>,
}

impl StrataFunctor {
    /// Constant functor with `k` elements and identity restrictions.
    pub fn constant(poset: &StrataPoset, k: usize) -> Self {
        let mut restrictions = BTreeMap::new();
        for s in 0..poset.len() {
            for t in 0..poset.len() {
                if s != t && poset.le[s][t] {
                    restrictions.insert((s, t), (0..k).collect());
                }
            }
        }
        StrataFunctor {
            values: vec![k; poset.len()],
            restrictions,
        }
    }

    pub fn validate(&self, poset: &StrataPoset) -> Result<(), PolyError> {
        let err = |s: String| Err(PolyError::BadFunctor(s));
        if self.values.len() != poset.len() {
            return err(format!(
                "{} values for {} strata",
                self.values.len(),
                poset.len()
            ));
        }
        for s in 0..poset.len() {
            for t in 0..poset.len() {
                if s == t || !poset.le[s][t] {
                    if s != t && self.restrictions.contains_key(&(s, t)) {
                        return err(format!(
                            "restriction given for incomparable strata {s}, {t}"
                        ));
                    }
                    continue;
                }
                let Some(r) = self.restrictions.get(&(s, t)) else {
                    return err(format!("missing restriction for strata {s} <= {t}"));
                };
                if r.len() != self.values[t] || r.iter().any(|&x| x >= self.values[s]) {
                    return err(format!("restriction {s} <= {t} has the wrong shape"));
                }
            }
        }
        for s in 0..poset.len() {
            for t in 0..poset.len() {
                for u in 0..poset.len() {
                    if s == t || t == u || !poset.le[s][t] || !poset.le[t][u] {
                        continue;
                    }
                    let (rst, rtu, rsu) = (
                        &self.restrictions[&(s, t)],
                        &self.restrictions[&(t, u)],
                        &self.restrictions[&(s, u)],
                    );
                    if (0..self.values[u]).any(|x| rst[rtu[x]] != rsu[x]) {
                        return err(format!("composition mismatch along {s} <= {t} <= {u}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Restrict an element over stratum `t` to stratum `s ≤ t`.
    pub fn restrict(&self, s: usize, t: usize, x: usize) -> usize {
        if s == t {
            x
        } else {
            self.restrictions[&(s, t)][x]
        }
    }
}

/// Result of extending `C` by a strata functor `D`: the set and, for each
/// new generator, its (base generator, element) label. The base is `C`
/// normalized, one generator per stratum.
#[derive(Clone, Debug)]
pub struct BoxExtension {
    pub set: PolysimplicialSet,
    pub labels: Vec<(usize, usize)>,
    pub base: PolysimplicialSet,
}

/// `C □ D` for `D` a functor on the strata poset: cells over `x` are
/// `D(stratum(x))`, structure maps restrict along the face order.
pub fn box_extend(c: &PolysimplicialSet, d: &StrataFunctor) -> Result<BoxExtension, PolyError> {
    let base = c.normalize();
    let poset = base.strata_poset();
    d.validate(&poset)?;
    // in the normalized set each generator is the top cell of one stratum
    let stratum_of_gen: Vec<usize> = (0..base.generators.len())
        .map(|g| {
            poset
                .index_of(base.stratum_of(base.generator_cell(g)))
                .expect("stratum")
        })
        .collect();
    let mut gens = Vec::new();
    let mut labels = Vec::new();
    let mut first: Vec<usize> = Vec::new();
    for (g, m) in base.generators.iter().enumerate() {
        first.push(gens.len());
        for x in 0..d.values[stratum_of_gen[g]] {
            gens.push(m.clone());
            labels.push((g, x));
        }
    }
    let mut rels = Vec::new();
    for ((y, iota), (z, rhs)) in &base.relations {
        let (sy, sz) = (stratum_of_gen[*y], stratum_of_gen[*z]);
        for x in 0..d.values[sy] {
            let xr = d.restrict(sz, sy, x);
            rels.push(((first[*y] + x, iota.clone()), (first[*z] + xr, rhs.clone())));
        }
    }
    let set = PolysimplicialSet::from_relations(gens, rels)?;
    Ok(BoxExtension { set, labels, base })
}

/// Load from nondegenerate cells and face assignments
/// `(cell, injective iota) = (target cell, surjection tau)`, checking that
/// listed cells stay nondegenerate and pairwise distinct up to automorphism.
pub fn from_faces(
    cells: Vec<PolyIndex>,
    faces: Vec<((usize, LambdaMorphism), (usize, LambdaMorphism))>,
) -> Result<PolysimplicialSet, PolyError> {
    for (index, ((_, iota), (_, tau))) in faces.iter().enumerate() {
        if !iota.is_injective() {
            return Err(PolyError::BadRelation {
                index,
                reason: "face map must be injective".into(),
            });
        }
        if !tau.is_surjective() {
            return Err(PolyError::BadRelation {
                index,
                reason: "assigned map must be surjective".into(),
            });
        }
    }
    let set = PolysimplicialSet::from_relations(cells, faces)?;
    let tops: Vec<CellId> = (0..set.generators.len())
        .map(|g| set.generator_cell(g))
        .collect();
    for (g, &c) in tops.iter().enumerate() {
        if set.is_degenerate(c) {
            return Err(PolyError::DegenerateCell(g));
        }
    }
    for g in 0..tops.len() {
        for h in g + 1..tops.len() {
            if set.stratum_rep(tops[g]) == set.stratum_rep(tops[h]) {
                return Err(PolyError::CollapsedCells(g, h));
            }
        }
    }
    Ok(set)
}

/// One vertex and one edge whose two ends are glued to it.
pub fn circle() -> PolysimplicialSet {
    let e = PolysimplicialSet::representable(&PolyIndex(vec![1]));
    let pt = PolysimplicialSet::point();
    let ends = e.cells_at(&PolyIndex::point()).to_vec();
    let f = PolyMorphism::new(&pt, &e, vec![ends[0]]).expect("vertex");
    let g = PolyMorphism::new(&pt, &e, vec![ends[1]]).expect("vertex");
    coequalizer(&f, &g).expect("parallel morphisms")
}

/// An edge identified with its own reversal; not interiorly free.
pub fn folded_edge() -> PolysimplicialSet {
    let e = PolyIndex(vec![1]);
    let v = PolyIndex::point();
    let c0 = LambdaMorphism::constant(&v, &e, &[0]);
    let c1 = LambdaMorphism::constant(&v, &e, &[1]);
    let flip = LambdaMorphism::from_triple(&e, &e, &[0], &[0], &[vec![1, 0]]).expect("flip");
    let idv = LambdaMorphism::identity(&v);
    from_faces(
        vec![e.clone(), v],
        vec![
            ((0, c0), (1, idv.clone())),
            ((0, c1), (1, idv)),
            ((0, flip), (0, LambdaMorphism::identity(&e))),
        ],
    )
    .expect("folded edge")
}

/// Euler characteristic as an integer when it is one.
pub fn euler_integer(c: &PolysimplicialSet) -> Option<i64> {
    let chi = c.euler_characteristic();
    if chi.denom().is_one() {
        i64::try_from(chi.numer().clone()).ok()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(t: &[usize]) -> PolyIndex {
        PolyIndex::new(t).unwrap()
    }

    #[test]
    fn hom_counts() {
        assert_eq!(lambda_hom(&idx(&[1]), &idx(&[1])).len(), 4);
        assert_eq!(lambda_hom(&idx(&[0]), &idx(&[1])).len(), 2);
        assert_eq!(lambda_hom(&idx(&[0]), &idx(&[0])).len(), 1);
    }

    #[test]
    fn flip_squared() {
        let e = idx(&[1]);
        let flip = LambdaMorphism::from_triple(&e, &e, &[0], &[0], &[vec![1, 0]]).unwrap();
        assert_eq!(compose(&flip, &flip).unwrap(), LambdaMorphism::identity(&e));
    }

    #[test]
    fn representable_cells() {
        let c = PolysimplicialSet::representable(&idx(&[1, 1]));
        let nd = c.nondegenerate_cells();
        assert_eq!(nd[&idx(&[1, 1])].len(), 1);
        assert_eq!(nd[&idx(&[1])].len(), 4);
        assert_eq!(nd[&idx(&[0])].len(), 4);
        assert_eq!(c.strata_poset().len(), 9);
        assert!(c.is_interiorly_free());
    }

    #[test]
    fn edge_poset() {
        let c = PolysimplicialSet::representable(&idx(&[1]));
        let p = c.strata_poset();
        assert_eq!(p.len(), 3);
        assert_eq!(p.minimal().len(), 2);
        assert_eq!(p.maximal().len(), 1);
    }

    #[test]
    fn euler_of_triangle() {
        let c = PolysimplicialSet::representable(&idx(&[2]));
        assert_eq!(euler_integer(&c), Some(1));
    }

    #[test]
    fn circle_complex() {
        let c = circle();
        let nd = c.nondegenerate_cells();
        assert_eq!(nd[&PolyIndex::point()].len(), 1);
        assert_eq!(nd[&idx(&[1])].len(), 1);
        assert_eq!(euler_integer(&c), Some(0));
        let base = nd[&PolyIndex::point()][0];
        let p = c.category_pi1(base).unwrap();
        assert_eq!(p.generators.len(), 1);
        assert!(p.relators.is_empty());
    }

    #[test]
    fn representables_simply_connected() {
        for t in [&[0][..], &[1], &[2], &[1, 1]] {
            let c = PolysimplicialSet::representable(&idx(t));
            let base = c.generator_cell(0);
            let p = c.category_pi1(base).unwrap();
            assert!(p.generators.is_empty(), "{t:?}: {p}");
        }
    }

    #[test]
    fn folded_edge_not_free() {
        let f = folded_edge();
        assert!(!f.is_interiorly_free());
        assert_eq!(euler_integer(&f), Some(1));
    }

    #[test]
    fn box_of_edges_is_square() {
        let e = PolysimplicialSet::representable(&idx(&[1]));
        let sq = box_product(&e, &e);
        assert_eq!(sq.generators(), &[idx(&[1, 1])]);
        assert_eq!(sq.strata_poset().len(), 9);
        let torus = box_product(&circle(), &circle());
        assert_eq!(euler_integer(&torus), Some(0));
        assert_eq!(torus.strata_poset().len(), 4);
    }

    #[test]
    fn extension_two_gon() {
        let e = PolysimplicialSet::representable(&idx(&[1]));
        let base = e.normalize();
        let poset = base.strata_poset();
        let top = poset.maximal()[0];
        let mut values = vec![1; poset.len()];
        values[top] = 2;
        let mut restrictions = BTreeMap::new();
        for s in poset.minimal() {
            restrictions.insert((s, top), vec![0, 0]);
        }
        let d = StrataFunctor {
            values,
            restrictions,
        };
        let ext = box_extend(&e, &d).unwrap();
        let nd = ext.set.nondegenerate_cells();
        assert_eq!(nd[&idx(&[1])].len(), 2);
        assert_eq!(nd[&PolyIndex::point()].len(), 2);
        assert_eq!(euler_integer(&ext.set), Some(0));
    }
}
