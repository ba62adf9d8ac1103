//! Cospecialization maps between strata posets, the morphisms of box
//! extensions they induce, an isomorphism criterion for polysimplicial
//! morphisms, and generalized graph morphisms from edge fates.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graphs::{BranchGraph, EdgeImage, GeneralizedMorphism, GraphError};
use crate::polysimplicial::{
    automorphisms, compose, BoxExtension, CellId, LambdaMorphism, PolyError, PolyMorphism,
    PolysimplicialSet,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CospecError {
    #[error("invalid poset: {0}")]
    BadPoset(String),
    #[error("incidence refers to unknown elements")]
    BadIncidence,
    #[error("incidence is not closed: R({x2}, {x1}) holds but R({other}, {x1}) does not")]
    NotDownClosed { x2: usize, other: usize, x1: usize },
    #[error("incidence is not closed: R({x2}, {x1}) holds but R({x2}, {other}) does not")]
    NotUpClosed { x2: usize, x1: usize, other: usize },
    #[error("no stratum contains {x1} in its closure")]
    EmptyFiber { x1: usize },
    #[error("strata over {x1} have no unique maximum; maximal elements {antichain:?}")]
    NonUniqueMax { x1: usize, antichain: Vec<usize> },
    #[error("minimal element {x1} maps to non-minimal {x2}")]
    MinimaNotPreserved { x1: usize, x2: usize },
    #[error("maps are not composable")]
    NotComposable,
    #[error("strata map is not monotone at ({0}, {1})")]
    NotMonotone(usize, usize),
    #[error("compatibility square fails: {0}")]
    Compatibility(String),
    #[error("invalid edge fates: {0}")]
    BadFates(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Finite poset; `le[a][b]` means `a <= b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    le: Vec<Vec<bool>>,
}

impl Poset {
    pub fn new(le: Vec<Vec<bool>>) -> Result<Self, CospecError> {
        let n = le.len();
        if le.iter().any(|r| r.len() != n) {
            return Err(CospecError::BadPoset(
                "relation matrix is not square".into(),
            ));
        }
        for a in 0..n {
            if !le[a][a] {
                return Err(CospecError::BadPoset(format!("not reflexive at {a}")));
            }
            for b in 0..n {
                if a != b && le[a][b] && le[b][a] {
                    return Err(CospecError::BadPoset(format!(
                        "not antisymmetric at ({a}, {b})"
                    )));
                }
                for c in 0..n {
                    if le[a][b] && le[b][c] && !le[a][c] {
                        return Err(CospecError::BadPoset(format!(
                            "not transitive at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(Poset { le })
    }

    /// Reflexive-transitive closure of covering pairs `(a, b)`, `a < b`.
    pub fn from_covers(n: usize, covers: &[(usize, usize)]) -> Result<Self, CospecError> {
        let mut le = vec![vec![false; n]; n];
        for (a, row) in le.iter_mut().enumerate() {
            row[a] = true;
        }
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(CospecError::BadPoset(format!(
                    "cover ({a}, {b}) out of range"
                )));
            }
            le[a][b] = true;
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
        Self::new(le)
    }

    pub fn chain(n: usize) -> Self {
        Poset {
            le: (0..n).map(|a| (0..n).map(|b| a <= b).collect()).collect(),
        }
    }

    pub fn antichain(n: usize) -> Self {
        Poset {
            le: (0..n).map(|a| (0..n).map(|b| a == b).collect()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.le.len()
    }

    pub fn is_empty(&self) -> bool {
        self.le.is_empty()
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.le[a][b]
    }

    pub fn minimal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| (0..self.len()).all(|b| b == a || !self.le[b][a]))
            .collect()
    }

    pub fn is_monotone(&self, target: &Poset, f: &[usize]) -> Result<(), CospecError> {
        for a in 0..self.len() {
            for b in 0..self.len() {
                if self.le[a][b] && !target.le(f[a], f[b]) {
                    return Err(CospecError::NotMonotone(a, b));
                }
            }
        }
        Ok(())
    }
}

/// `R(x2, x1)`: the `S1`-stratum `x1` lies in the closure of the
/// `S2`-stratum `x2`. Strata are ordered by generization (`a <= b` when `b`
/// lies in the closure of `a`), so `R` is down-closed in `S2` and up-closed
/// in `S1`.
pub fn cospec_strata(
    s1: &Poset,
    s2: &Poset,
    r: &BTreeSet<(usize, usize)>,
) -> Result<Vec<usize>, CospecError> {
    if r.iter().any(|&(x2, x1)| x2 >= s2.len() || x1 >= s1.len()) {
        return Err(CospecError::BadIncidence);
    }
    for &(x2, x1) in r {
        for other in 0..s2.len() {
            if s2.le(other, x2) && !r.contains(&(other, x1)) {
                return Err(CospecError::NotDownClosed { x2, other, x1 });
            }
        }
        for other in 0..s1.len() {
            if s1.le(x1, other) && !r.contains(&(x2, other)) {
                return Err(CospecError::NotUpClosed { x2, x1, other });
            }
        }
    }
    let mut f = Vec::with_capacity(s1.len());
    for x1 in 0..s1.len() {
        let fiber: Vec<usize> = (0..s2.len()).filter(|&x2| r.contains(&(x2, x1))).collect();
        if fiber.is_empty() {
            return Err(CospecError::EmptyFiber { x1 });
        }
        let maximal: Vec<usize> = fiber
            .iter()
            .copied()
            .filter(|&a| fiber.iter().all(|&b| b == a || !s2.le(a, b)))
            .collect();
        if maximal.len() != 1 {
            return Err(CospecError::NonUniqueMax {
                x1,
                antichain: maximal,
            });
        }
        f.push(maximal[0]);
    }
    let minimal2: BTreeSet<usize> = s2.minimal().into_iter().collect();
    for x1 in s1.minimal() {
        if !minimal2.contains(&f[x1]) {
            return Err(CospecError::MinimaNotPreserved { x1, x2: f[x1] });
        }
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composition {
    pub map: Vec<usize>,
    /// Elements where a supplied direct map disagrees with the composite.
    pub violations: Vec<usize>,
}

/// `f23 ∘ f12`, checked against `f13` when given.
pub fn cospec_compose(
    f12: &[usize],
    f23: &[usize],
    f13: Option<&[usize]>,
) -> Result<Composition, CospecError> {
    if f12.iter().any(|&x| x >= f23.len()) || f13.is_some_and(|m| m.len() != f12.len()) {
        return Err(CospecError::NotComposable);
    }
    let map: Vec<usize> = f12.iter().map(|&x| f23[x]).collect();
    let violations = match f13 {
        Some(direct) => (0..map.len()).filter(|&i| direct[i] != map[i]).collect(),
        None => Vec::new(),
    };
    Ok(Composition { map, violations })
}

/// Generator `j` of `set` and automorphism `a` with `z = a^* top(j)`.
fn generator_translate(set: &PolysimplicialSet, z: CellId) -> Option<(usize, LambdaMorphism)> {
    let level = set.level(z).clone();
    (0..set.generators().len())
        .filter(|&j| set.generators()[j] == level)
        .find_map(|j| {
            let top = set.generator_cell(j);
            automorphisms(&level)
                .into_iter()
                .find(|a| set.pullback(top, a).ok() == Some(z))
                .map(|a| (j, a))
        })
}

/// Morphism `C □ D -> C' □ D'` over `base: C -> C'` whose strata map is `f`
/// (indices into the strata posets of the two extensions).
pub fn cospec_polysimplicial<'a>(
    e1: &'a BoxExtension,
    e2: &'a BoxExtension,
    base: &PolyMorphism<'_>,
    f: &[usize],
) -> Result<PolyMorphism<'a>, CospecError> {
    if !std::ptr::eq(base.source, &e1.base) || !std::ptr::eq(base.target, &e2.base) {
        return Err(CospecError::Compatibility(
            "base morphism must run between the two bases".into(),
        ));
    }
    let (p1, p2) = (e1.set.strata_poset(), e2.set.strata_poset());
    if f.len() != p1.len() || f.iter().any(|&t| t >= p2.len()) {
        return Err(CospecError::Compatibility(
            "strata map has the wrong shape".into(),
        ));
    }
    for a in 0..p1.len() {
        for b in 0..p1.len() {
            if p1.le[a][b] && !p2.le[f[a]][f[b]] {
                return Err(CospecError::NotMonotone(a, b));
            }
        }
    }
    let strata_gen = |e: &BoxExtension, p: &crate::polysimplicial::StrataPoset| -> Vec<usize> {
        (0..e.set.generators().len())
            .map(|k| {
                p.index_of(e.set.stratum_of(e.set.generator_cell(k)))
                    .expect("stratum")
            })
            .collect()
    };
    let (sg1, sg2) = (strata_gen(e1, &p1), strata_gen(e2, &p2));
    let mut images = Vec::with_capacity(sg1.len());
    for k1 in 0..sg1.len() {
        let (c_gen, _) = e1.labels[k1];
        let y = base.map_cell(e1.base.generator_cell(c_gen));
        let (z, sigma) = e2.base.normal_form(y);
        let (j, alpha) = generator_translate(&e2.base, z).ok_or_else(|| {
            CospecError::Compatibility("base image is not a generator translate".into())
        })?;
        let t = f[sg1[k1]];
        let k2 = (0..sg2.len())
            .find(|&k| sg2[k] == t)
            .expect("every stratum has a generator");
        let (c_gen2, _) = e2.labels[k2];
        if c_gen2 != j {
            return Err(CospecError::Compatibility(format!(
                "stratum {} maps to stratum {t}, which lies over a different base stratum",
                sg1[k1]
            )));
        }
        let phi = compose(&alpha, &sigma)?;
        images.push(e2.set.pullback(e2.set.generator_cell(k2), &phi)?);
    }
    let m = PolyMorphism::new(&e1.set, &e2.set, images)
        .map_err(|err| CospecError::Compatibility(err.to_string()))?;
    if m.strata_map() != f {
        return Err(CospecError::Compatibility(
            "induced strata map differs from the requested one".into(),
        ));
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoReport {
    pub nondegenerate_to_nondegenerate: bool,
    pub strata_bijective: bool,
    pub target_interiorly_free: bool,
    /// Images of the target generators under a verified two-sided inverse.
    pub inverse: Option<Vec<CellId>>,
    pub reason: String,
}

impl IsoReport {
    pub fn is_iso(&self) -> bool {
        self.inverse.is_some()
    }
}

pub fn is_cospec_iso(m: &PolyMorphism<'_>) -> IsoReport {
    let (src, tgt) = (m.source, m.target);
    let bad_cell = src
        .nondegenerate_all()
        .into_values()
        .flatten()
        .find(|&c| tgt.is_degenerate(m.map_cell(c)));
    let strata = m.strata_map();
    let strata_bijective = strata.len() == tgt.strata_poset().len()
        && strata.iter().collect::<BTreeSet<_>>().len() == strata.len();
    let free = tgt.is_interiorly_free();
    let mut report = IsoReport {
        nondegenerate_to_nondegenerate: bad_cell.is_none(),
        strata_bijective,
        target_interiorly_free: free,
        inverse: None,
        reason: String::new(),
    };
    if let Some(c) = bad_cell {
        report.reason = format!("nondegenerate cell {c} maps to a degenerate cell");
        return report;
    }
    if !strata_bijective {
        report.reason = "map on strata is not bijective".into();
        return report;
    }
    if !free {
        report.reason = "target is not interiorly free".into();
        return report;
    }
    let mut images = Vec::new();
    for g in 0..tgt.generators().len() {
        let top = tgt.generator_cell(g);
        match src
            .cells_at(tgt.level(top))
            .iter()
            .copied()
            .find(|&c| m.map_cell(c) == top)
        {
            Some(c) => images.push(c),
            None => {
                report.reason = format!("target generator {g} has no preimage");
                return report;
            }
        }
    }
    let Ok(inv) = PolyMorphism::new(tgt, src, images.clone()) else {
        report.reason = "preimages do not assemble to a morphism".into();
        return report;
    };
    if m.then(&inv).agrees_with(&PolyMorphism::identity(src))
        && inv.then(m).agrees_with(&PolyMorphism::identity(tgt))
    {
        report.inverse = Some(images);
        report.reason = "all three conditions hold; inverse verified".into();
    } else {
        report.reason = "candidate inverse fails to compose to identities".into();
    }
    report
}

/// What happens to an edge under cospecialization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fate {
    /// Maps onto `edge`; `swap` exchanges the branch order.
    Keep {
        edge: usize,
        swap: bool,
    },
    Collapse {
        vertex: usize,
    },
}

/// Generalized morphism determined by edge fates. Every vertex of `g1`
/// must meet an edge; kept edges must biject onto the edges of `g2`.
pub fn curve_cospec(
    g1: &BranchGraph,
    g2: &BranchGraph,
    fates: &[Fate],
) -> Result<GeneralizedMorphism, CospecError> {
    let bad = |s: String| Err(CospecError::BadFates(s));
    if fates.len() != g1.edge_count() {
        return bad(format!(
            "{} fates for {} edges",
            fates.len(),
            g1.edge_count()
        ));
    }
    let mut vertex_map: Vec<Option<usize>> = vec![None; g1.vertex_count()];
    let mut assign = |v: usize, w: usize| -> Result<(), CospecError> {
        match vertex_map[v] {
            Some(old) if old != w => Err(CospecError::BadFates(format!(
                "vertex {v} is sent to both {old} and {w}"
            ))),
            _ => {
                vertex_map[v] = Some(w);
                Ok(())
            }
        }
    };
    let mut hit = vec![0usize; g2.edge_count()];
    let mut edge_map = Vec::new();
    for (e, fate) in fates.iter().enumerate() {
        let bs = g1.edge_branches(e);
        match *fate {
            Fate::Collapse { vertex } => {
                if vertex >= g2.vertex_count() {
                    return bad(format!("edge {e} collapses to unknown vertex {vertex}"));
                }
                for &b in bs {
                    assign(g1.branch(b).vertex, vertex)?;
                }
                edge_map.push(EdgeImage::Vertex(vertex));
            }
            Fate::Keep { edge, swap } => {
                if edge >= g2.edge_count() {
                    return bad(format!("edge {e} kept onto unknown edge {edge}"));
                }
                let tb = g2.edge_branches(edge);
                if tb.len() != bs.len() || (swap && bs.len() != 2) {
                    return bad(format!(
                        "edge {e} and edge {edge} have different branch data"
                    ));
                }
                let branch_map: Vec<usize> = (0..bs.len())
                    .map(|i| if swap { tb[1 - i] } else { tb[i] })
                    .collect();
                for (i, &b) in bs.iter().enumerate() {
                    assign(g1.branch(b).vertex, g2.branch(branch_map[i]).vertex)?;
                }
                hit[edge] += 1;
                edge_map.push(EdgeImage::Edge { edge, branch_map });
            }
        }
    }
    if let Some(e) = hit.iter().position(|&k| k != 1) {
        return bad(format!("target edge {e} is hit {} times", hit[e]));
    }
    let vertex_map: Vec<usize> = vertex_map
        .into_iter()
        .enumerate()
        .map(|(v, w)| w.ok_or_else(|| CospecError::BadFates(format!("vertex {v} meets no edge"))))
        .collect::<Result<_, _>>()?;
    Ok(GeneralizedMorphism::new(
        g1.clone(),
        g2.clone(),
        vertex_map,
        edge_map,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polysimplicial::{box_extend, circle, folded_edge, PolyIndex, StrataFunctor};

    fn incidence(s1: &Poset, s2: &Poset, f: &[usize]) -> BTreeSet<(usize, usize)> {
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

    #[test]
    fn strata_examples() {
        let c = Poset::chain(3);
        assert_eq!(
            cospec_strata(&c, &c, &incidence(&c, &c, &[0, 1, 2])).unwrap(),
            vec![0, 1, 2]
        );
        let two = Poset::chain(2);
        let one = Poset::chain(1);
        let total: BTreeSet<_> = [(0, 0), (0, 1)].into();
        assert_eq!(cospec_strata(&two, &one, &total).unwrap(), vec![0, 0]);
        let anti = Poset::antichain(2);
        let r: BTreeSet<_> = [(0, 0), (1, 0)].into();
        assert!(matches!(
            cospec_strata(&Poset::chain(1), &anti, &r),
            Err(CospecError::NonUniqueMax { x1: 0, .. })
        ));
    }

    #[test]
    fn composition_report() {
        let c = cospec_compose(&[0, 1], &[1, 0], Some(&[1, 1])).unwrap();
        assert_eq!(c.map, vec![1, 0]);
        assert_eq!(c.violations, vec![1]);
    }

    #[test]
    fn iso_examples() {
        let c = circle();
        assert!(is_cospec_iso(&PolyMorphism::identity(&c)).is_iso());
        let edge = PolysimplicialSet::representable(&PolyIndex::new(&[1]).unwrap());
        let pt = PolysimplicialSet::point().extended_to(1);
        let e = PolyIndex::new(&[1]).unwrap();
        let collapse = LambdaMorphism::constant(&e, &PolyIndex::point(), &[]);
        let cell = pt.cell_of(0, &collapse).unwrap();
        let m = PolyMorphism::new(&edge, &pt, vec![cell]).unwrap();
        let r = is_cospec_iso(&m);
        assert!(!r.nondegenerate_to_nondegenerate && !r.is_iso());
        let fold = folded_edge();
        let images: Vec<CellId> = c
            .generators()
            .iter()
            .map(|g| {
                let j = fold.generators().iter().position(|h| h == g).unwrap();
                fold.generator_cell(j)
            })
            .collect();
        let m = PolyMorphism::new(&c, &fold, images).unwrap();
        let r = is_cospec_iso(&m);
        assert!(r.nondegenerate_to_nondegenerate && r.strata_bijective);
        assert!(!r.target_interiorly_free && !r.is_iso());
    }

    #[test]
    fn identity_over_singleton() {
        let c = circle();
        let d = StrataFunctor::constant(&c.normalize().strata_poset(), 1);
        let ext = box_extend(&c, &d).unwrap();
        let base = PolyMorphism::identity(&ext.base);
        let n = ext.set.strata_poset().len();
        let f: Vec<usize> = (0..n).collect();
        let m = cospec_polysimplicial(&ext, &ext, &base, &f).unwrap();
        assert!(m.agrees_with(&PolyMorphism::identity(&ext.set)));
    }

    #[test]
    fn theta_collapse() {
        let theta = BranchGraph::new(2, &[vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap();
        let rose = BranchGraph::new(1, &[vec![0, 0], vec![0, 0]]).unwrap();
        let fates = [
            Fate::Collapse { vertex: 0 },
            Fate::Keep {
                edge: 0,
                swap: false,
            },
            Fate::Keep {
                edge: 1,
                swap: false,
            },
        ];
        let m = curve_cospec(&theta, &rose, &fates).unwrap();
        assert!(!m.is_true_morphism());
        let two = BranchGraph::new(2, &[vec![0, 1], vec![0, 1]]).unwrap();
        let fates = [
            Fate::Collapse { vertex: 0 },
            Fate::Keep {
                edge: 0,
                swap: false,
            },
            Fate::Keep {
                edge: 1,
                swap: false,
            },
        ];
        assert!(curve_cospec(&theta, &two, &fates).is_err());
    }
}
