//! Splitting arithmetic in valuation coordinates: a radius `r = p^-v` is
//! stored as the exact rational `v`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{format_rational, Rational};
use crate::currents::{vanishes_on_star, Current, CurrentError, Subgraph};
use crate::graphs::{GraphError, GraphIsomorphism, MetricGraph};
use crate::monoids::is_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplitError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("valuation must be positive here")]
    ZeroValuation,
    #[error("valuation must be non-negative")]
    NegativeValuation,
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("distance {d} exceeds lambda {lambda}; the bound is vacuous")]
    VacuousBound { d: String, lambda: String },
    #[error("lambda must be positive and the distance non-negative")]
    BadContraction,
    #[error("lambda = {lambda} does not exceed e + 1/(p-1) = {threshold}")]
    LambdaTooSmall { lambda: String, threshold: String },
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("v1 must be smaller than v2")]
    Ordering,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Current(#[from] CurrentError),
}

fn check_prime(p: u64) -> Result<(), SplitError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(SplitError::NotPrime(p))
    }
}

/// `1/(p-1)`.
pub fn breakpoint(p: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(p - 1))
}

/// Valuation of the image radius under `z -> z^p`: `min(p v, v + 1)`.
pub fn radius_pushforward(p: u64, v: &Rational) -> Result<Rational, SplitError> {
    check_prime(p)?;
    if !v.is_positive() {
        return Err(SplitError::ZeroValuation);
    }
    let a = v * Rational::from_integer(p.into());
    let b = v + Rational::one();
    Ok(if a < b { a } else { b })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberCount {
    /// The fiber has `p^exponent` points.
    pub exponent: u32,
    /// `v` sits exactly on a band boundary `i + 1/(p-1)` with `1 <= i <= h`.
    pub on_boundary: bool,
}

/// Fiber exponent of `z -> z^(p^h)` over a point at valuation `v`:
/// `clamp(floor(v - 1/(p-1)), 0, h)`, bands closed on the high side.
pub fn fiber_count(p: u64, h: u32, v: &Rational) -> Result<FiberCount, SplitError> {
    check_prime(p)?;
    if h == 0 {
        return Err(SplitError::ZeroExponent);
    }
    if v.is_negative() {
        return Err(SplitError::NegativeValuation);
    }
    let x = v - breakpoint(p);
    let f = x.floor().to_integer();
    let exponent = if f.is_negative() {
        0
    } else if f >= BigInt::from(h) {
        h
    } else {
        u32::try_from(f).expect("bounded by h")
    };
    let on_boundary =
        x.is_integer() && x >= Rational::one() && x <= Rational::from_integer(h.into());
    Ok(FiberCount {
        exponent,
        on_boundary,
    })
}

/// Lower bound `lambda - d` on the valuation of `f(z') - 1`.
pub fn contraction_bound(d: &Rational, lambda: &Rational) -> Result<Rational, SplitError> {
    if !lambda.is_positive() || d.is_negative() {
        return Err(SplitError::BadContraction);
    }
    if d > lambda {
        return Err(SplitError::VacuousBound {
            d: format_rational(d),
            lambda: format_rational(lambda),
        });
    }
    Ok(lambda - d)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitLocus {
    /// Whether the ball-containment and vanishing hypotheses held.
    pub certified: bool,
    pub split: BTreeSet<usize>,
    pub non_split: BTreeSet<usize>,
    /// Vertices on which neither criterion decides.
    pub undetermined: BTreeSet<usize>,
}

/// Split locus in `K` of the `Z/p^e` torsor attached to `c`.
///
/// If every closed `lambda`-ball around a vertex of `K` lies in `K'` and
/// `c` vanishes mod `p^e` on the star of `K'`, all of `K` splits. Otherwise
/// vertices whose star carries a current nonzero mod `p^e` are non-split and
/// the rest stay undetermined.
pub fn split_locus(
    g: &MetricGraph,
    c: &Current,
    p: u64,
    e: u32,
    lambda: &Rational,
    k: &Subgraph,
    k_prime: &Subgraph,
) -> Result<SplitLocus, SplitError> {
    check_prime(p)?;
    if e == 0 {
        return Err(SplitError::ZeroExponent);
    }
    let threshold = Rational::from_integer(e.into()) + breakpoint(p);
    if *lambda <= threshold {
        return Err(SplitError::LambdaTooSmall {
            lambda: format_rational(lambda),
            threshold: format_rational(&threshold),
        });
    }
    k.star(&g.graph)?;
    let modulus = p
        .checked_pow(e)
        .ok_or_else(|| SplitError::Constraint("p^e overflows".into()))?;
    let dist = g.distances();
    let balls_inside = k.vertices.iter().all(|&z| {
        (0..g.graph.vertex_count()).all(|w| {
            dist[z][w].as_ref().is_none_or(|d| d > lambda) || k_prime.vertices.contains(&w)
        })
    });
    let certified = balls_inside && vanishes_on_star(c, k_prime, Some(modulus))?;
    let mut out = SplitLocus {
        certified,
        split: BTreeSet::new(),
        non_split: BTreeSet::new(),
        undetermined: BTreeSet::new(),
    };
    for &z in &k.vertices {
        if certified {
            out.split.insert(z);
        } else if !vanishes_on_star(c, &Subgraph::from_vertices([z]), Some(modulus))? {
            out.non_split.insert(z);
        } else {
            out.undetermined.insert(z);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TateIntervals {
    /// `np / (v (p-1))`.
    pub offset: Rational,
    pub i1: (BigInt, BigInt),
    pub i2: (BigInt, BigInt),
    /// `mn - l - 2 offset`.
    pub lg1: Rational,
    /// `l - 2 offset`.
    pub lg2: Rational,
}

pub fn tate_intervals(
    p: u64,
    v: &Rational,
    n: u64,
    l: u64,
    m: u64,
) -> Result<TateIntervals, SplitError> {
    check_prime(p)?;
    if !v.is_positive() {
        return Err(SplitError::ZeroValuation);
    }
    if n == 0 {
        return Err(SplitError::Constraint("n >= 1".into()));
    }
    if n.gcd(&p) != 1 {
        return Err(SplitError::Constraint(format!(
            "gcd(n, p) = 1 fails: gcd({n}, {p}) = {}",
            n.gcd(&p)
        )));
    }
    let big = |x: u64| Rational::from_integer(BigInt::from(x));
    let c = big(n * p) / (v * big(p - 1));
    let (lq, mq, nq) = (big(l), big(m), big(n));
    let need_l = Rational::one() + &c * Rational::from_integer(2.into());
    if lq < need_l {
        return Err(SplitError::Constraint(format!(
            "l >= 1 + 2np/((p-1)v) fails: {l} < {}",
            format_rational(&need_l)
        )));
    }
    let need_m = big(2 * l) / &nq;
    if mq < need_m {
        return Err(SplitError::Constraint(format!(
            "m >= 2l/n fails: {m} < {}",
            format_rational(&need_m)
        )));
    }
    let mn = &mq * &nq;
    let i1 = (
        (&lq + &c).ceil().to_integer(),
        (&mn - &c).floor().to_integer(),
    );
    let i2 = (c.ceil().to_integer(), (&lq - &c).floor().to_integer());
    let two = Rational::from_integer(2.into());
    Ok(TateIntervals {
        lg1: &mn - &lq - &c * &two,
        lg2: &lq - &c * &two,
        offset: c,
        i1,
        i2,
    })
}

/// `2np/(v1(p-1)) - 2np/(v2(p-1))`.
pub fn interval_gap(p: u64, n: u64, v1: &Rational, v2: &Rational) -> Result<Rational, SplitError> {
    check_prime(p)?;
    if !v1.is_positive() {
        return Err(SplitError::ZeroValuation);
    }
    if v1 >= v2 {
        return Err(SplitError::Ordering);
    }
    let two_np = Rational::from_integer(BigInt::from(2 * n * p));
    let pm1 = Rational::from_integer(BigInt::from(p - 1));
    Ok(&two_np / (v1 * &pm1) - &two_np / (v2 * &pm1))
}

/// The gap `lg(I_{2,1}) - lg(I_{1,1})` after validating both parameter sets.
pub fn interval_gap_checked(
    p: u64,
    n: u64,
    v1: &Rational,
    v2: &Rational,
    l: u64,
    m: u64,
) -> Result<Rational, SplitError> {
    if v1 >= v2 {
        return Err(SplitError::Ordering);
    }
    let a = tate_intervals(p, v1, n, l, m)?;
    let b = tate_intervals(p, v2, n, l, m)?;
    Ok(b.lg1 - a.lg1)
}

/// Smallest `n` (as a rational) from which the gap is at least 2:
/// `v1 v2 (p-1) / ((v2 - v1) p)`.
pub fn gap_threshold(p: u64, v1: &Rational, v2: &Rational) -> Result<Rational, SplitError> {
    check_prime(p)?;
    if v1 >= v2 {
        return Err(SplitError::Ordering);
    }
    let big = |x: u64| Rational::from_integer(BigInt::from(x));
    Ok(v1 * v2 * big(p - 1) / ((v2 - v1) * big(p)))
}

/// `max(1, ceil(d - 1/(p-1)))`.
pub fn detection_function(p: u64, d: &Rational) -> Result<BigInt, SplitError> {
    check_prime(p)?;
    if d.is_negative() {
        return Err(SplitError::NegativeValuation);
    }
    let x = (d - breakpoint(p)).ceil().to_integer();
    Ok(if x < BigInt::one() { BigInt::one() } else { x })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MismatchWitness {
    /// Fundamental cycle, named by its non-tree edge (in the first graph).
    pub cycle_edge: usize,
    pub vertex: usize,
    pub multiple: u64,
    pub values: (BigInt, BigInt),
    pub cycle_lengths: (Rational, Rational),
}

/// For every fundamental cycle `C`, vertex `z` and `0 <= j <= J`, compares
/// `detection_function(p, d_i(z, C) + j lg_i(C))` on both metrics. `J` is
/// large enough that differing cycle lengths always produce a witness.
pub fn detect_metric_mismatch(
    g1: &MetricGraph,
    g2: &MetricGraph,
    iso: &GraphIsomorphism,
    p: u64,
) -> Result<Option<MismatchWitness>, SplitError> {
    check_prime(p)?;
    iso.validate(&g1.graph, &g2.graph)?;
    let g = &g1.graph;
    // second metric transported to the labels of the first graph
    let lengths2: Vec<Rational> = (0..g.edge_count())
        .map(|e| g2.lengths[iso.edge_map[e]].clone())
        .collect();
    let m2 = MetricGraph::new(g.clone(), lengths2)?;
    let cycles = g.fundamental_cycles()?;
    let non_tree = g.non_tree_edges()?;
    let (d1, d2) = (g1.distances(), m2.distances());
    let dist_to = |d: &Vec<Vec<Option<Rational>>>, z: usize, cycle: &[usize]| -> Rational {
        cycle
            .iter()
            .flat_map(|&e| g.endpoints(e))
            .filter_map(|w| d[z][w].clone())
            .min()
            .expect("connected graph")
    };
    let mut denominators = BigInt::one();
    for l in g1.lengths.iter().chain(&m2.lengths) {
        denominators = denominators.lcm(l.denom());
    }
    let mut reach = Rational::zero();
    for (ci, c) in cycles.iter().enumerate() {
        reach = reach.max(g1.length_of(c)).max(m2.length_of(c));
        for z in 0..g.vertex_count() {
            reach = reach
                .max(dist_to(&d1, z, &cycles[ci]))
                .max(dist_to(&d2, z, &cycles[ci]));
        }
    }
    let bound = denominators * (reach.ceil().to_integer() + BigInt::from(3));
    let bound = u64::try_from(bound)
        .map_err(|_| SplitError::Constraint("detector bound overflows".into()))?;
    for (ci, c) in cycles.iter().enumerate() {
        let (l1, l2) = (g1.length_of(c), m2.length_of(c));
        for z in 0..g.vertex_count() {
            let (r1, r2) = (dist_to(&d1, z, c), dist_to(&d2, z, c));
            for j in 0..=bound {
                let jq = Rational::from_integer(j.into());
                let a = detection_function(p, &(&r1 + &jq * &l1))?;
                let b = detection_function(p, &(&r2 + &jq * &l2))?;
                if a != b {
                    return Ok(Some(MismatchWitness {
                        cycle_edge: non_tree[ci],
                        vertex: z,
                        multiple: j,
                        values: (a, b),
                        cycle_lengths: (l1, l2),
                    }));
                }
            }
        }
    }
    Ok(None)
}
