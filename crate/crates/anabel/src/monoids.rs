//! Affine monoids (finitely generated submonoids of `Z^d`) and the morphism
//! criteria used for log structures: faces, saturation, sharp quotients,
//! Kummer tests, and bounded integrality / saturation checkers.
//!
//! The cone of a monoid is described by its facet normals, found by brute
//! force over hyperplanes spanned by generators. Everything is exact.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{
    dot, nullspace_q, primitive_integer, rank_q, smith_normal_form, solve_q, to_q, FgAbGroup,
    IntMatrix, Rational,
};

pub type Vector = Vec<BigInt>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoidError {
    #[error("generator {index} has length {len}, expected ambient dimension {dim}")]
    Dimension {
        index: usize,
        len: usize,
        dim: usize,
    },
    #[error("map matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    MapShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("image of source generator {index} is not in the target monoid")]
    NotInTarget { index: usize },
    #[error("monoid is not saturated (witness {witness:?})")]
    NotSaturated { witness: Vector },
    #[error("bound must be at least 1")]
    ZeroBound,
}

/// Submonoid of `Z^d` generated by finitely many vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMonoid {
    dim: usize,
    generators: Vec<Vector>,
}

/// Set of generator indices spanning a face.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face {
    pub generators: Vec<usize>,
}

impl AffineMonoid {
    pub fn new(dim: usize, generators: Vec<Vector>) -> Result<Self, MonoidError> {
        for (index, g) in generators.iter().enumerate() {
            if g.len() != dim {
                return Err(MonoidError::Dimension {
                    index,
                    len: g.len(),
                    dim,
                });
            }
        }
        Ok(AffineMonoid { dim, generators })
    }

    pub fn from_i64(dim: usize, gens: &[Vec<i64>]) -> Result<Self, MonoidError> {
        Self::new(
            dim,
            gens.iter()
                .map(|g| g.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// `N^d` with its standard basis.
    pub fn free(d: usize) -> Self {
        let gens = (0..d)
            .map(|i| (0..d).map(|j| BigInt::from(u8::from(i == j))).collect())
            .collect();
        AffineMonoid {
            dim: d,
            generators: gens,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    /// Rank of the group `P^gp`.
    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<Rational>> = self.generators.iter().map(|g| to_q(g)).collect();
        rank_q(&rows)
    }

    pub fn cone(&self) -> Cone {
        Cone::new(self.dim, &self.generators)
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        membership(self, x)
    }

    /// Submonoid generated by a subset of the generators.
    pub fn face_monoid(&self, face: &Face) -> AffineMonoid {
        AffineMonoid {
            dim: self.dim,
            generators: face
                .generators
                .iter()
                .map(|&i| self.generators[i].clone())
                .collect(),
        }
    }
}

/// Rational polyhedral cone spanned by a generator set, as facet normals
/// inside the linear span.
#[derive(Clone, Debug)]
pub struct Cone {
    dim: usize,
    generators: Vec<Vector>,
    /// basis of the orthogonal complement of the span
    complement: Vec<Vector>,
    facets: Vec<Vector>,
}

impl Cone {
    pub fn new(dim: usize, generators: &[Vector]) -> Self {
        let rows: Vec<Vec<Rational>> = generators.iter().map(|g| to_q(g)).collect();
        let r = rank_q(&rows);
        let complement: Vec<Vector> = nullspace_q(&rows, dim)
            .iter()
            .map(|v| primitive_integer(v))
            .collect();
        let mut facets: BTreeSet<Vector> = BTreeSet::new();
        if r > 0 {
            let nonzero: Vec<usize> = (0..generators.len())
                .filter(|&i| generators[i].iter().any(|x| !x.is_zero()))
                .collect();
            for subset in combinations(&nonzero, r - 1) {
                let sub: Vec<Vec<Rational>> =
                    subset.iter().map(|&i| to_q(&generators[i])).collect();
                if rank_q(&sub) != r - 1 {
                    continue;
                }
                let mut system = sub;
                system.extend(complement.iter().map(|c| to_q(c)));
                let ns = nullspace_q(&system, dim);
                debug_assert_eq!(ns.len(), 1);
                let l = primitive_integer(&ns[0]);
                let signs: Vec<BigInt> = generators.iter().map(|g| dot(&l, g)).collect();
                if signs.iter().all(|s| !s.is_negative()) {
                    facets.insert(l);
                } else if signs.iter().all(|s| !s.is_positive()) {
                    facets.insert(l.iter().map(|x| -x).collect());
                }
            }
        }
        Cone {
            dim,
            generators: generators.to_vec(),
            complement,
            facets: facets.into_iter().collect(),
        }
    }

    pub fn facets(&self) -> &[Vector] {
        &self.facets
    }

    pub fn in_span(&self, x: &[BigInt]) -> bool {
        self.complement.iter().all(|c| dot(c, x).is_zero())
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        x.len() == self.dim
            && self.in_span(x)
            && self.facets.iter().all(|l| !dot(l, x).is_negative())
    }

    /// Generators lying on every facet containing `x`: the smallest face whose cone contains `x`.
    pub fn carrier(&self, x: &[BigInt]) -> Vec<usize> {
        let tight: Vec<&Vector> = self.facets.iter().filter(|l| dot(l, x).is_zero()).collect();
        (0..self.generators.len())
            .filter(|&i| tight.iter().all(|l| dot(l, &self.generators[i]).is_zero()))
            .collect()
    }

    /// Generators on every facet, i.e. spanning the unit group.
    pub fn lineality_generators(&self) -> Vec<usize> {
        (0..self.generators.len())
            .filter(|&i| {
                self.facets
                    .iter()
                    .all(|l| dot(l, &self.generators[i]).is_zero())
            })
            .collect()
    }
}

pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    go(items, k, 0, &mut cur, &mut out);
    out
}

/// Integer lattice spanned by a set of vectors, with a precomputed Smith form
/// for membership and coordinates.
#[derive(Clone, Debug)]
pub struct Lattice {
    dim: usize,
    rows: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
    diag: Vec<BigInt>,
}

impl Lattice {
    pub fn new(dim: usize, gens: &[Vector]) -> Self {
        let rows = IntMatrix::from_big_rows(gens, dim);
        let snf = smith_normal_form(&rows);
        let diag = snf.diagonal();
        Lattice {
            dim,
            rows,
            u: snf.u,
            v: snf.v,
            diag,
        }
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Integer coefficients `x` with `sum x_i gens_i = b`, if `b` lies in the lattice.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let bv: Vec<BigInt> = (0..self.dim)
            .map(|j| (0..self.dim).map(|k| &b[k] * self.v.get(k, j)).sum())
            .collect();
        let mut y = vec![BigInt::zero(); self.rows.rows()];
        for (j, c) in bv.iter().enumerate() {
            if j < self.diag.len() {
                if !c.is_multiple_of(&self.diag[j]) {
                    return None;
                }
                y[j] = c / &self.diag[j];
            } else if !c.is_zero() {
                return None;
            }
        }
        let n = self.rows.rows();
        Some(
            (0..n)
                .map(|j| (0..n).map(|k| &y[k] * self.u.get(k, j)).sum())
                .collect(),
        )
    }

    pub fn contains(&self, b: &[BigInt]) -> bool {
        self.solve(b).is_some()
    }

    /// A basis: `d_i` times the first rows of `V^-1`.
    pub fn basis(&self) -> Vec<Vector> {
        let vinv = unimodular_inverse(&self.v);
        (0..self.rank())
            .map(|i| vinv.row(i).iter().map(|x| x * &self.diag[i]).collect())
            .collect()
    }
}

fn unimodular_inverse(m: &IntMatrix) -> IntMatrix {
    let n = m.rows();
    let mut aug: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut r = to_q(m.row(i));
            r.extend((0..n).map(|j| Rational::from_integer(BigInt::from(u8::from(i == j)))));
            r
        })
        .collect();
    crate::algebra::rref(&mut aug);
    let rows: Vec<Vec<BigInt>> = aug
        .iter()
        .map(|r| r[n..].iter().map(|q| q.to_integer()).collect())
        .collect();
    IntMatrix::from_big_rows(&rows, n)
}

/// Decide whether `x` is an N-combination of the generators.
///
/// Off-unit generators have positive weight under the sum of facet normals,
/// which bounds their coefficients; the remainder must lie in the unit lattice.
pub fn membership(p: &AffineMonoid, x: &[BigInt]) -> bool {
    if x.len() != p.dim {
        return false;
    }
    if x.iter().all(Zero::is_zero) {
        return true;
    }
    let cone = p.cone();
    if !cone.contains(x) {
        return false;
    }
    let units: Vec<usize> = cone.lineality_generators();
    let unit_gens: Vec<Vector> = units.iter().map(|&i| p.generators[i].clone()).collect();
    let unit_lattice = Lattice::new(p.dim, &unit_gens);
    let weight: Vector = (0..p.dim)
        .map(|j| cone.facets.iter().map(|l| &l[j]).sum())
        .collect();
    let positive: Vec<(Vector, BigInt)> = (0..p.generators.len())
        .filter(|i| !units.contains(i))
        .map(|i| (p.generators[i].clone(), dot(&weight, &p.generators[i])))
        .collect();
    let target = dot(&weight, x);
    let mut dead: HashSet<(usize, Vector)> = HashSet::new();
    fn search(
        k: usize,
        rest: Vector,
        budget: BigInt,
        positive: &[(Vector, BigInt)],
        units: &Lattice,
        dead: &mut HashSet<(usize, Vector)>,
    ) -> bool {
        if k == positive.len() {
            return budget.is_zero() && units.contains(&rest);
        }
        if dead.contains(&(k, rest.clone())) {
            return false;
        }
        let (g, w) = &positive[k];
        let mut cur = rest.clone();
        let mut left = budget;
        loop {
            if search(k + 1, cur.clone(), left.clone(), positive, units, dead) {
                return true;
            }
            if &left < w {
                break;
            }
            left -= w;
            cur = cur.iter().zip(g).map(|(a, b)| a - b).collect();
        }
        dead.insert((k, rest));
        false
    }
    search(0, x.to_vec(), target, &positive, &unit_lattice, &mut dead)
}

/// All faces, sorted by size then lexicographically; the first is the unit
/// face, the last is `P` itself.
pub fn faces(p: &AffineMonoid) -> Vec<Face> {
    let cone = p.cone();
    let all: Vec<usize> = (0..p.generators.len()).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue = vec![all];
    while let Some(f) = queue.pop() {
        if !seen.insert(f.clone()) {
            continue;
        }
        for l in &cone.facets {
            let g: Vec<usize> = f
                .iter()
                .copied()
                .filter(|&i| dot(l, &p.generators[i]).is_zero())
                .collect();
            if !seen.contains(&g) {
                queue.push(g);
            }
        }
    }
    let mut out: Vec<Face> = seen
        .into_iter()
        .map(|generators| Face { generators })
        .collect();
    out.sort_by(|a, b| {
        a.generators
            .len()
            .cmp(&b.generators.len())
            .then(a.generators.cmp(&b.generators))
    });
    out
}

/// Unit group `P^*` as the face on every facet.
pub fn unit_face(p: &AffineMonoid) -> Face {
    Face {
        generators: p.cone().lineality_generators(),
    }
}

/// Lattice points of `P^gp` in the half-open parallelepipeds of all maximal
/// linearly independent generator subsets. Together with the generators they
/// generate the saturation.
fn parallelepiped_points(p: &AffineMonoid) -> Vec<Vector> {
    let r = p.rank();
    if r == 0 {
        return Vec::new();
    }
    let group = Lattice::new(p.dim, &p.generators);
    let basis = group.basis();
    let nonzero: Vec<usize> = (0..p.generators.len())
        .filter(|&i| p.generators[i].iter().any(|x| !x.is_zero()))
        .collect();
    let basis_cols: Vec<Vec<Rational>> = (0..p.dim)
        .map(|j| {
            basis
                .iter()
                .map(|b| Rational::from_integer(b[j].clone()))
                .collect()
        })
        .collect();
    let mut out: BTreeSet<Vector> = BTreeSet::new();
    for subset in combinations(&nonzero, r) {
        let b: Vec<Vector> = subset.iter().map(|&i| p.generators[i].clone()).collect();
        let bq: Vec<Vec<Rational>> = b.iter().map(|v| to_q(v)).collect();
        if rank_q(&bq) != r {
            continue;
        }
        // coordinates of B in the lattice basis
        let coords: Vec<Vector> = b
            .iter()
            .map(|v| {
                let s = solve_q(&basis_cols, &to_q(v), r).expect("generator in its own span");
                s.iter().map(|q| q.to_integer()).collect()
            })
            .collect();
        let m = IntMatrix::from_big_rows(&coords, r);
        let snf = smith_normal_form(&m);
        let diag = snf.diagonal();
        let vinv = unimodular_inverse(&snf.v);
        let b_cols: Vec<Vec<Rational>> = (0..p.dim)
            .map(|j| {
                b.iter()
                    .map(|v| Rational::from_integer(v[j].clone()))
                    .collect()
            })
            .collect();
        let mut counter = vec![BigInt::zero(); r];
        'cosets: loop {
            // z = counter * V^-1 in basis coordinates, y = z * basis
            let z: Vector = (0..r)
                .map(|j| (0..r).map(|k| &counter[k] * vinv.get(k, j)).sum())
                .collect();
            let mut y: Vector = (0..p.dim)
                .map(|j| (0..r).map(|k| &z[k] * &basis[k][j]).sum())
                .collect();
            let t = solve_q(&b_cols, &to_q(&y), r).expect("lattice point in span");
            for (k, tk) in t.iter().enumerate() {
                let f = tk.floor().to_integer();
                for j in 0..p.dim {
                    y[j] -= &f * &b[k][j];
                }
            }
            if y.iter().any(|x| !x.is_zero()) {
                out.insert(y);
            }
            for k in 0..r {
                counter[k] += 1;
                if counter[k] < diag[k] {
                    continue 'cosets;
                }
                counter[k] = BigInt::zero();
            }
            break;
        }
    }
    out.into_iter().collect()
}

/// Decide `P = P^gp ∩ cone(P)`; on failure return the lexicographically
/// smallest element of the saturation found missing from `P`.
pub fn is_saturated(p: &AffineMonoid) -> (bool, Option<Vector>) {
    let witness = parallelepiped_points(p)
        .into_iter()
        .filter(|y| !membership(p, y))
        .min();
    (witness.is_none(), witness)
}

/// The saturation `P^gp ∩ cone(P)` as an affine monoid.
pub fn saturation(p: &AffineMonoid) -> AffineMonoid {
    let mut gens = p.generators.clone();
    for y in parallelepiped_points(p) {
        if !gens.contains(&y) {
            gens.push(y);
        }
    }
    AffineMonoid {
        dim: p.dim,
        generators: gens,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharpDecomposition {
    pub units: FgAbGroup,
    pub sharp: AffineMonoid,
    /// `Z^d -> Z^(d-s)` killing the unit lattice, as a `(d-s) x d` matrix.
    pub projection: IntMatrix,
}

/// Split a saturated monoid as `P^* x P/P^*`.
pub fn sharp_quotient(p: &AffineMonoid) -> Result<SharpDecomposition, MonoidError> {
    if let (false, Some(w)) = is_saturated(p) {
        return Err(MonoidError::NotSaturated { witness: w });
    }
    let unit_idx = unit_face(p).generators;
    let unit_gens: Vec<Vector> = unit_idx.iter().map(|&i| p.generators[i].clone()).collect();
    let f = IntMatrix::from_big_rows(&unit_gens, p.dim);
    let snf = smith_normal_form(&f);
    let s = snf.diagonal().len();
    let q = p.dim - s;
    let mut proj = IntMatrix::zeros(q, p.dim);
    for r in 0..q {
        for j in 0..p.dim {
            proj.set(r, j, snf.v.get(j, s + r).clone());
        }
    }
    let mut sharp_gens: Vec<Vector> = Vec::new();
    for (i, g) in p.generators.iter().enumerate() {
        if unit_idx.contains(&i) {
            continue;
        }
        let img: Vector = (0..q).map(|r| dot(proj.row(r), g)).collect();
        if img.iter().any(|x| !x.is_zero()) && !sharp_gens.contains(&img) {
            sharp_gens.push(img);
        }
    }
    Ok(SharpDecomposition {
        units: FgAbGroup::free(s),
        sharp: AffineMonoid {
            dim: q,
            generators: sharp_gens,
        },
        projection: proj,
    })
}

/// Monoid morphism given by an integer matrix on the ambient lattices
/// (`target_dim x source_dim`, acting on column vectors).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidMorphism {
    source: AffineMonoid,
    target: AffineMonoid,
    map: IntMatrix,
}

impl MonoidMorphism {
    pub fn new(
        source: AffineMonoid,
        target: AffineMonoid,
        map: IntMatrix,
    ) -> Result<Self, MonoidError> {
        if map.rows() != target.dim || map.cols() != source.dim {
            return Err(MonoidError::MapShape {
                rows: map.rows(),
                cols: map.cols(),
                expected_rows: target.dim,
                expected_cols: source.dim,
            });
        }
        let m = MonoidMorphism {
            source,
            target,
            map,
        };
        for (index, g) in m.source.generators.iter().enumerate() {
            if !membership(&m.target, &m.apply(g)) {
                return Err(MonoidError::NotInTarget { index });
            }
        }
        Ok(m)
    }

    pub fn identity(p: &AffineMonoid) -> Self {
        MonoidMorphism {
            source: p.clone(),
            target: p.clone(),
            map: IntMatrix::identity(p.dim),
        }
    }

    /// Multiplication by `n` on `N`.
    pub fn scalar(n: i64) -> Self {
        MonoidMorphism {
            source: AffineMonoid::free(1),
            target: AffineMonoid::free(1),
            map: IntMatrix::from_i64(&[vec![n]]),
        }
    }

    pub fn source(&self) -> &AffineMonoid {
        &self.source
    }

    pub fn target(&self) -> &AffineMonoid {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.map
    }

    pub fn apply(&self, x: &[BigInt]) -> Vector {
        (0..self.map.rows())
            .map(|r| dot(self.map.row(r), x))
            .collect()
    }

    /// Image monoid `phi(P)` inside the target lattice.
    pub fn image(&self) -> AffineMonoid {
        AffineMonoid {
            dim: self.target.dim,
            generators: self
                .source
                .generators
                .iter()
                .map(|g| self.apply(g))
                .collect(),
        }
    }

    /// Restriction `phi^-1(F') -> F'` to a face of the target.
    pub fn restrict_to_face(&self, face: &Face) -> MonoidMorphism {
        let target = self.target.face_monoid(face);
        let tcone = self.target.cone();
        let tight: Vec<&Vector> = tcone
            .facets
            .iter()
            .filter(|l| {
                face.generators
                    .iter()
                    .all(|&i| dot(l, &self.target.generators[i]).is_zero())
            })
            .collect();
        let source_gens: Vec<Vector> = self
            .source
            .generators
            .iter()
            .filter(|g| {
                let img = self.apply(g);
                tight.iter().all(|l| dot(l, &img).is_zero())
            })
            .cloned()
            .collect();
        MonoidMorphism {
            source: AffineMonoid {
                dim: self.source.dim,
                generators: source_gens,
            },
            target,
            map: self.map.clone(),
        }
    }
}

/// A set of primes, either finite or cofinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeSet {
    Only(BTreeSet<u64>),
    AllExcept(BTreeSet<u64>),
}

impl PrimeSet {
    pub fn contains(&self, p: u64) -> bool {
        match self {
            PrimeSet::Only(s) => s.contains(&p),
            PrimeSet::AllExcept(s) => !s.contains(&p),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, PrimeSet::Only(s) if s.is_empty())
    }

    /// All prime factors of `n` lie in the set.
    pub fn admits(&self, n: &BigInt) -> bool {
        prime_factors(n).iter().all(|&p| self.contains(p))
    }
}

pub fn prime_factors(n: &BigInt) -> Vec<u64> {
    let mut n: u64 = n.abs().try_into().expect("multiplier fits in u64");
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(&BigInt::from(n)) == vec![n]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KummerReport {
    pub is_kummer: bool,
    pub injective: bool,
    /// First target generator without an admissible multiple in the image.
    pub failing_generator: Option<usize>,
    /// Multiplier found for each target generator, up to the first failure.
    pub multipliers: Vec<BigInt>,
}

const MULTIPLIER_SEARCH_CAP: u64 = 100_000;

/// L-Kummer test: injective on groups and every target generator has an
/// L-integer multiple in the image.
pub fn is_kummer(phi: &MonoidMorphism, l: &PrimeSet) -> KummerReport {
    let src_rows: Vec<Vec<Rational>> = phi.source.generators.iter().map(|g| to_q(g)).collect();
    let img = phi.image();
    let img_rows: Vec<Vec<Rational>> = img.generators.iter().map(|g| to_q(g)).collect();
    let injective = rank_q(&src_rows) == rank_q(&img_rows);
    let mut report = KummerReport {
        is_kummer: false,
        injective,
        failing_generator: None,
        multipliers: Vec::new(),
    };
    if !injective {
        return report;
    }
    let cone = img.cone();
    for (qi, q) in phi.target.generators.iter().enumerate() {
        match kummer_multiplier(&img, &cone, q, l) {
            Some(n) => report.multipliers.push(n),
            None => {
                report.failing_generator = Some(qi);
                return report;
            }
        }
    }
    report.is_kummer = true;
    report
}

fn kummer_multiplier(
    img: &AffineMonoid,
    cone: &Cone,
    q: &[BigInt],
    l: &PrimeSet,
) -> Option<BigInt> {
    if q.iter().all(Zero::is_zero) {
        return Some(BigInt::one());
    }
    if !cone.contains(q) {
        return None;
    }
    // multiples of q in the image are eventually exactly the multiples of
    // the order of q modulo the lattice of its carrier face
    let carrier: Vec<Vector> = cone
        .carrier(q)
        .into_iter()
        .map(|i| img.generators[i].clone())
        .collect();
    let lat = Lattice::new(img.dim, &carrier);
    let basis = lat.basis();
    let cols: Vec<Vec<Rational>> = (0..img.dim)
        .map(|j| {
            basis
                .iter()
                .map(|b| Rational::from_integer(b[j].clone()))
                .collect()
        })
        .collect();
    let coords = solve_q(&cols, &to_q(q), basis.len())?;
    let order = coords
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    if !l.admits(&order) {
        return None;
    }
    let mut k: u64 = 1;
    while k <= MULTIPLIER_SEARCH_CAP {
        let n = &order * BigInt::from(k);
        if l.admits(&n) {
            let nq: Vector = q.iter().map(|x| x * &n).collect();
            if membership(img, &nq) {
                return Some(n);
            }
            if l.is_empty() {
                return None;
            }
        }
        k += 1;
    }
    None
}

/// Elements of `P` expressible with total generator count `<= bound`,
/// each listed once at its least degree, ordered by (degree, vector).
pub fn elements_up_to_degree(p: &AffineMonoid, bound: usize) -> Vec<(usize, Vector)> {
    let mut seen: HashSet<Vector> = HashSet::new();
    let zero: Vector = vec![BigInt::zero(); p.dim];
    seen.insert(zero.clone());
    let mut out = vec![(0, zero.clone())];
    let mut frontier = vec![zero];
    for deg in 1..=bound {
        let mut next: BTreeSet<Vector> = BTreeSet::new();
        for x in &frontier {
            for g in &p.generators {
                let y: Vector = x.iter().zip(g).map(|(a, b)| a + b).collect();
                if !seen.contains(&y) {
                    next.insert(y);
                }
            }
        }
        for y in &next {
            seen.insert(y.clone());
            out.push((deg, y.clone()));
        }
        frontier = next.into_iter().collect();
    }
    out
}

fn sub(a: &[BigInt], b: &[BigInt]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[BigInt], b: &[BigInt]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn scale(a: &[BigInt], k: u64) -> Vector {
    a.iter().map(|x| x * BigInt::from(k)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegralCheck {
    Pass,
    /// `f1' + phi(f1) = f2' + phi(f2)` with no factorization found.
    Counterexample {
        f1_prime: Vector,
        f2_prime: Vector,
        f1: Vector,
        f2: Vector,
    },
}

/// Bounded search for a violation of the integrality criterion: whenever
/// `f1' + phi(f1) = f2' + phi(f2)`, there should be `g'` in Q and `g1, g2` in P
/// with `f1' = g' + phi(g1)` and `f2' = g' + phi(g2)`.
///
/// Quadruples have total degree `<= bound`; factorizations are searched up to
/// degree `2 * bound`. `Pass` is only a semidecision.
pub fn check_integral_bounded(
    phi: &MonoidMorphism,
    bound: usize,
) -> Result<IntegralCheck, MonoidError> {
    if bound == 0 {
        return Err(MonoidError::ZeroBound);
    }
    let qs = elements_up_to_degree(&phi.target, bound);
    let ps = elements_up_to_degree(&phi.source, bound);
    let witnesses: Vec<Vector> = elements_up_to_degree(&phi.source, 2 * bound)
        .into_iter()
        .map(|(_, x)| x)
        .collect();
    let witness_images: Vec<Vector> = witnesses.iter().map(|g| phi.apply(g)).collect();
    for (d1p, f1p) in &qs {
        for (d2p, f2p) in &qs {
            for (d1, f1) in &ps {
                if d1p + d2p + d1 > bound {
                    continue;
                }
                let lhs = add(f1p, &phi.apply(f1));
                for (d2, f2) in &ps {
                    if d1p + d2p + d1 + d2 > bound {
                        continue;
                    }
                    if lhs != add(f2p, &phi.apply(f2)) {
                        continue;
                    }
                    let factored = witness_images.iter().any(|i1| {
                        let gp = sub(f1p, i1);
                        membership(&phi.target, &gp)
                            && witness_images.iter().any(|i2| add(&gp, i2) == *f2p)
                    });
                    if !factored {
                        return Ok(IntegralCheck::Counterexample {
                            f1_prime: f1p.clone(),
                            f2_prime: f2p.clone(),
                            f1: f1.clone(),
                            f2: f2.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(IntegralCheck::Pass)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SaturationCheck {
    Pass,
    /// `phi(a) | p*b` but no `c` with `a | p*c` and `phi(c) | b`.
    Counterexample {
        a: Vector,
        b: Vector,
        p: u64,
    },
}

/// Bounded search for a violation of the prime-wise saturation criterion
/// (divisibility is additive). Elements `a`, `b` range over degree `<= bound`,
/// candidates `c` over degree `<= 2 * bound`. Counterexamples are reported in
/// (a, b, p) order with elements ordered by (degree, vector).
pub fn check_saturated_bounded(
    phi: &MonoidMorphism,
    primes: &BTreeSet<u64>,
    bound: usize,
) -> Result<SaturationCheck, MonoidError> {
    if bound == 0 {
        return Err(MonoidError::ZeroBound);
    }
    let ps = elements_up_to_degree(&phi.source, bound);
    let qs = elements_up_to_degree(&phi.target, bound);
    let cs: Vec<(Vector, Vector)> = elements_up_to_degree(&phi.source, 2 * bound)
        .into_iter()
        .map(|(_, c)| {
            let img = phi.apply(&c);
            (c, img)
        })
        .collect();
    for (_, a) in &ps {
        let fa = phi.apply(a);
        for (_, b) in &qs {
            for &p in primes {
                if !membership(&phi.target, &sub(&scale(b, p), &fa)) {
                    continue;
                }
                let ok = cs.iter().any(|(c, fc)| {
                    membership(&phi.source, &sub(&scale(c, p), a))
                        && membership(&phi.target, &sub(b, fc))
                });
                if !ok {
                    return Ok(SaturationCheck::Counterexample {
                        a: a.clone(),
                        b: b.clone(),
                        p,
                    });
                }
            }
        }
    }
    Ok(SaturationCheck::Pass)
}
