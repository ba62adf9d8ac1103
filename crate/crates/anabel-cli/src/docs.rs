//! Input documents. Every document is a TOML table with a `kind` key.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use anabel::algebra::{parse_rational, IntMatrix, Rational};
use anabel::cospec::Poset;
use anabel::currents::{Current, Ring};
use anabel::gog::{ExtensionData, FiniteGroup, GraphOfFiniteGroups};
use anabel::graphs::{BranchGraph, MetricGraph};
use anabel::monoids::{AffineMonoid, MonoidMorphism};
use anabel::polysimplicial::{box_product, circle, folded_edge, PolyIndex, PolysimplicialSet};
use num_bigint::BigInt;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {location}: {message}")]
    Invalid {
        path: PathBuf,
        location: String,
        message: String,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn invalid(path: &Path, location: impl Into<String>, message: impl Display) -> Self {
        CliError::Invalid {
            path: path.to_path_buf(),
            location: location.into(),
            message: message.to_string(),
        }
    }
}

pub struct Loaded<T> {
    pub path: PathBuf,
    pub doc: T,
}

impl<T> Loaded<T> {
    pub fn err(&self, location: impl Into<String>, message: impl Display) -> CliError {
        CliError::invalid(&self.path, location, message)
    }
}

/// Kind tag of a document without parsing the rest.
pub fn kind_of(path: &Path) -> Result<String, CliError> {
    #[derive(Deserialize)]
    struct Tag {
        kind: String,
    }
    let text = read(path)?;
    let tag: Tag = toml::from_str(&text).map_err(|e| CliError::Parse {
        path: path.into(),
        message: e.to_string(),
    })?;
    Ok(tag.kind)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

pub fn load<T: DeserializeOwned>(path: &Path, kinds: &[&str]) -> Result<Loaded<T>, CliError> {
    let kind = kind_of(path)?;
    if !kinds.contains(&kind.as_str()) {
        return Err(CliError::invalid(
            path,
            "kind",
            format!("expected one of {kinds:?}, found {kind:?}"),
        ));
    }
    let text = read(path)?;
    let doc = toml::from_str(&text).map_err(|e| CliError::Parse {
        path: path.into(),
        message: e.to_string(),
    })?;
    Ok(Loaded {
        path: path.into(),
        doc,
    })
}

/// `kind = "graph" | "metric-graph" | "current"`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    #[serde(rename = "kind")]
    _kind: String,
    pub vertices: usize,
    /// One or two endpoint vertices per edge.
    pub edges: Vec<Vec<usize>>,
    pub lengths: Option<Vec<String>>,
    pub ring: Option<String>,
    /// One value per branch, in edge order.
    pub values: Option<Vec<i64>>,
}

impl Loaded<GraphDoc> {
    pub fn graph(&self) -> Result<BranchGraph, CliError> {
        BranchGraph::new(self.doc.vertices, &self.doc.edges).map_err(|e| self.err("edges", e))
    }

    pub fn metric(&self) -> Result<MetricGraph, CliError> {
        let lengths = self
            .doc
            .lengths
            .as_ref()
            .ok_or_else(|| self.err("lengths", "missing"))?;
        let parsed: Vec<Rational> = lengths
            .iter()
            .enumerate()
            .map(|(i, s)| parse_rational(s).map_err(|e| self.err(format!("lengths[{i}]"), e)))
            .collect::<Result<_, _>>()?;
        MetricGraph::new(self.graph()?, parsed).map_err(|e| self.err("lengths", e))
    }

    pub fn current(&self) -> Result<Current, CliError> {
        let ring =
            parse_ring(self.doc.ring.as_deref().unwrap_or("Z")).map_err(|e| self.err("ring", e))?;
        let values = self
            .doc
            .values
            .as_ref()
            .ok_or_else(|| self.err("values", "missing"))?;
        Current::new(
            &self.graph()?,
            ring,
            values.iter().map(|&x| BigInt::from(x)).collect(),
        )
        .map_err(|e| self.err("values", e))
    }
}

pub fn parse_ring(s: &str) -> Result<Ring, String> {
    if s == "Z" {
        return Ok(Ring::Integers);
    }
    s.strip_prefix("Z/")
        .and_then(|n| n.parse::<u64>().ok())
        .filter(|&n| n >= 1)
        .map(Ring::Mod)
        .ok_or_else(|| format!("ring must be \"Z\" or \"Z/n\", found {s:?}"))
}

fn monoid(dim: Option<usize>, gens: &[Vec<i64>]) -> Result<AffineMonoid, String> {
    let dim = dim
        .or_else(|| gens.first().map(Vec::len))
        .ok_or("dimension needed for a monoid without generators")?;
    AffineMonoid::from_i64(dim, gens).map_err(|e| e.to_string())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonoidDoc {
    #[serde(rename = "kind")]
    _kind: String,
    pub dim: Option<usize>,
    pub generators: Vec<Vec<i64>>,
}

impl Loaded<MonoidDoc> {
    pub fn monoid(&self) -> Result<AffineMonoid, CliError> {
        monoid(self.doc.dim, &self.doc.generators).map_err(|e| self.err("generators", e))
    }
}

/// Morphism of affine monoids; `matrix` has one row per target coordinate.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    #[serde(rename = "kind")]
    _kind: String,
    pub source: Vec<Vec<i64>>,
    pub source_dim: Option<usize>,
    pub target: Vec<Vec<i64>>,
    pub target_dim: Option<usize>,
    pub matrix: Vec<Vec<i64>>,
}

impl Loaded<MorphismDoc> {
    pub fn morphism(&self) -> Result<MonoidMorphism, CliError> {
        let p = monoid(self.doc.source_dim, &self.doc.source).map_err(|e| self.err("source", e))?;
        let q = monoid(self.doc.target_dim, &self.doc.target).map_err(|e| self.err("target", e))?;
        if self.doc.matrix.iter().any(|r| r.len() != p.dim()) {
            return Err(self.err("matrix", format!("every row needs {} entries", p.dim())));
        }
        let m = IntMatrix::from_rows_with_width(&self.doc.matrix, p.dim());
        MonoidMorphism::new(p, q, m).map_err(|e| self.err("matrix", e))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyFactor {
    pub builtin: Option<String>,
    pub representable: Option<Vec<usize>>,
}

/// A box product of factors, each a builtin (`point`, `circle`,
/// `folded-edge`) or a representable given by its poly-index.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDoc {
    #[serde(rename = "kind")]
    _kind: String,
    pub factors: Vec<PolyFactor>,
}

impl Loaded<PolyDoc> {
    pub fn set(&self) -> Result<PolysimplicialSet, CliError> {
        let mut acc = PolysimplicialSet::point();
        for (i, f) in self.doc.factors.iter().enumerate() {
            let loc = format!("factors[{i}]");
            let x = match (&f.builtin, &f.representable) {
                (Some(b), None) => match b.as_str() {
                    "point" => PolysimplicialSet::point(),
                    "circle" => circle(),
                    "folded-edge" => folded_edge(),
                    other => return Err(self.err(loc, format!("unknown builtin {other:?}"))),
                },
                (None, Some(t)) => {
                    let n = PolyIndex::new(t).map_err(|e| self.err(&loc, e))?;
                    if n.dim() > 3 {
                        return Err(self.err(loc, "dimension above 3 is not supported"));
                    }
                    PolysimplicialSet::representable(&n)
                }
                _ => return Err(self.err(loc, "give exactly one of builtin, representable")),
            };
            acc = if i == 0 { x } else { box_product(&acc, &x) };
        }
        Ok(acc)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub cyclic: Option<usize>,
    pub symmetric: Option<usize>,
    pub permutations: Option<Vec<Vec<usize>>>,
    pub table: Option<Vec<Vec<usize>>>,
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup, String> {
        let given = [
            self.cyclic.is_some(),
            self.symmetric.is_some(),
            self.permutations.is_some(),
            self.table.is_some(),
        ];
        let r = match given.iter().filter(|&&b| b).count() {
            0 => Ok(FiniteGroup::trivial()),
            1 => {
                if let Some(n) = self.cyclic {
                    FiniteGroup::cyclic(n)
                } else if let Some(n) = self.symmetric {
                    FiniteGroup::symmetric(n)
                } else if let Some(p) = &self.permutations {
                    FiniteGroup::from_permutations(p)
                } else {
                    FiniteGroup::from_table(self.table.clone().expect("one field is set"))
                }
            }
            _ => return Err("give at most one of cyclic, symmetric, permutations, table".into()),
        };
        r.map_err(|e| e.to_string())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GogDoc {
    #[serde(rename = "kind")]
    _kind: String,
    pub vertices: usize,
    pub edges: Vec<Vec<usize>>,
    #[serde(default)]
    pub vertex_groups: Vec<GroupSpec>,
    #[serde(default)]
    pub edge_groups: Vec<GroupSpec>,
    /// One embedding per branch; omitted means all trivial.
    #[serde(default)]
    pub branch_maps: Vec<Vec<usize>>,
}

impl Loaded<GogDoc> {
    pub fn gog(&self) -> Result<GraphOfFiniteGroups, CliError> {
        let g = BranchGraph::new(self.doc.vertices, &self.doc.edges)
            .map_err(|e| self.err("edges", e))?;
        let groups =
            |specs: &[GroupSpec], n: usize, name: &str| -> Result<Vec<FiniteGroup>, CliError> {
                if specs.is_empty() {
                    return Ok(vec![FiniteGroup::trivial(); n]);
                }
                specs
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s.build().map_err(|e| self.err(format!("{name}[{i}]"), e)))
                    .collect()
            };
        let vg = groups(&self.doc.vertex_groups, g.vertex_count(), "vertex_groups")?;
        let eg = groups(&self.doc.edge_groups, g.edge_count(), "edge_groups")?;
        let maps = if self.doc.branch_maps.is_empty() {
            vec![vec![0]; g.branch_count()]
        } else {
            self.doc.branch_maps.clone()
        };
        GraphOfFiniteGroups::new(g, vg, eg, maps).map_err(|e| self.err("branch_maps", e))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetSpec {
    pub size: usize,
    #[serde(default)]
    pub covers: Vec<(usize, usize)>,
}

impl PosetSpec {
    pub fn build(&self) -> Result<Poset, String> {
        Poset::from_covers(self.size, &self.covers).map_err(|e| e.to_string())
    }
}

/// Strata posets (generization order) and closure incidences `[x2, x1]`.
/// The optional third poset enables the composition check.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CospecDoc {
    #[serde(rename = "kind")]
    _kind: String,
    pub s1: PosetSpec,
    pub s2: PosetSpec,
    pub incidence: Vec<(usize, usize)>,
    pub s3: Option<PosetSpec>,
    pub incidence_23: Option<Vec<(usize, usize)>>,
    pub incidence_13: Option<Vec<(usize, usize)>>,
}

pub fn pairs(v: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
    v.iter().copied().collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionDoc {
    #[serde(rename = "kind")]
    _kind: String,
    pub pi: GroupSpec,
    pub h: GroupSpec,
    pub alpha: Vec<Vec<usize>>,
    pub g: Vec<Vec<usize>>,
    pub gamma: Option<Vec<usize>>,
}

impl Loaded<ExtensionDoc> {
    pub fn data(&self) -> Result<ExtensionData, CliError> {
        let pi = self.doc.pi.build().map_err(|e| self.err("pi", e))?;
        let h = self.doc.h.build().map_err(|e| self.err("h", e))?;
        Ok(ExtensionData {
            pi,
            h,
            alpha: self.doc.alpha.clone(),
            g: self.doc.g.clone(),
        })
    }
}

pub type Json = serde_json::Value;
