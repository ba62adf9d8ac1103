//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line even when the others succeed.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use anabel::algebra::{rat, FgAbGroup};
use anabel::cospec::{cospec_compose, cospec_strata, is_cospec_iso, CospecError, Poset};
use anabel::currents::{current_group, Ring};
use anabel::gog::{
    abelianized_pi1, abelianized_pi1_product_formula, schreier_extension, ExtensionData,
    FiniteGroup, GraphOfFiniteGroups,
};
use anabel::graphs::{enumerate_small_graphs, rigidity_kernel, BranchGraph};
use anabel::monoids::{
    check_integral_bounded, check_saturated_bounded, faces, is_kummer, is_saturated, AffineMonoid,
    IntegralCheck, MonoidMorphism, PrimeSet, SaturationCheck,
};
use anabel::polysimplicial::{
    box_extend, box_product, circle, folded_edge, lambda_hom, LambdaMorphism, PolyIndex,
    PolyMorphism, PolysimplicialSet, StrataFunctor,
};
use anabel::splitting::fiber_count;
use anabel_testkit::corpus::{
    incidence, random_connected_graph, random_monotone, random_poset, rng, to_normal_form,
};
use anabel_testkit::groups::{catalogue, extension_corpus, random_gog, verify_extension, Coverage};
use anabel_testkit::oracles::{
    count_by_recursion, gog_abelianization_brute, hom_by_triples, kernel_dimension_brute,
    TorsionProfile,
};
use num_bigint::BigInt;
use num_rational::Ratio;
use rand::Rng;

use common::{golden_dir, run_case, CASES};

const LIMIT_BANDS: Duration = Duration::from_secs(1);
const LIMIT_INTERVALS: Duration = Duration::from_secs(1);
const LIMIT_RIGIDITY: Duration = Duration::from_secs(60);
const LIMIT_CURRENTS: Duration = Duration::from_secs(5);
const LIMIT_SCHREIER: Duration = Duration::from_secs(10);
const LIMIT_POLY: Duration = Duration::from_secs(10);
/// Tuples enumerated per (Pi, H) pair before falling back to split orbits.
const SCHREIER_CAP: u64 = 2_000_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {:.2?}, limit {:.0?}", t, limit))?;
    Ok(t)
}

fn idx(t: &[usize]) -> PolyIndex {
    PolyIndex::new(t).unwrap()
}

fn graph(n: usize, edges: &[&[usize]]) -> BranchGraph {
    BranchGraph::new(n, &edges.iter().map(|e| e.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn z(n: usize) -> FiniteGroup {
    FiniteGroup::cyclic(n).unwrap()
}

fn splitting_bands() -> Outcome {
    let mut grid = Vec::new();
    for p in [2u64, 3, 5] {
        for h in 1..=5u32 {
            for den in 1..=12i64 {
                for num in 0..=10 * den {
                    let v = rat(num, den);
                    grid.push((p, h, count_by_recursion(p, h, &v), v));
                }
            }
        }
    }
    let start = Instant::now();
    let mut bad = Vec::new();
    for (p, h, want, v) in &grid {
        let got = fiber_count(*p, *h, v).map_err(|e| e.to_string())?.exponent;
        if got != *want {
            bad.push(format!("p={p} h={h} v={v}: {got} vs {want}"));
        }
    }
    let t = within(start, LIMIT_BANDS)?;
    ensure(bad.is_empty(), || {
        format!("{} mismatches, first {}", bad.len(), bad[0])
    })?;
    Ok(format!(
        "{} grid points agree with the recursion in {t:.2?}",
        grid.len()
    ))
}

type Q = Ratio<i128>;

fn q(s: &str) -> Q {
    s.parse().unwrap_or_else(|_| panic!("not a rational: {s}"))
}

fn qi(n: u64) -> Q {
    Q::from_integer(n as i128)
}

fn fields(line: &str) -> BTreeMap<String, String> {
    line.replace(", ", ",")
        .split_whitespace()
        .filter_map(|t| t.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn interval(s: &str) -> (i128, i128) {
    let (a, b) = s
        .trim_matches(|c| c == '[' || c == ']')
        .split_once(',')
        .unwrap();
    (a.parse().unwrap(), b.parse().unwrap())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn tate_sweep() -> Outcome {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_anabel");
    let text = Command::new(bin)
        .arg("tate-sweep")
        .output()
        .map_err(|e| e.to_string())?;
    let machine = Command::new(bin)
        .args(["--machine", "tate-sweep"])
        .output()
        .map_err(|e| e.to_string())?;
    let json: serde_json::Value =
        serde_json::from_slice(&machine.stdout).map_err(|e| e.to_string())?;
    let rows = json["cases"].as_array().ok_or("no cases array")?;
    ensure(rows.iter().all(|r| r["ok"] == true), || {
        "a case reported not ok".into()
    })?;

    let (mut cases, mut gaps) = (0, 0);
    for line in String::from_utf8_lossy(&text.stdout).lines() {
        let f = fields(line);
        if line.starts_with("gap ") {
            let (p, n) = (
                f["p"].parse::<u64>().unwrap(),
                f["n"].parse::<u64>().unwrap(),
            );
            let (v1, v2) = (q(&f["v1"]), q(&f["v2"]));
            let two_np = qi(2 * n * p);
            let pm1 = qi(p - 1);
            let gap = two_np / (v1 * pm1) - two_np / (v2 * pm1);
            let threshold = v1 * v2 * pm1 / ((v2 - v1) * qi(p));
            ensure(gap == q(&f["gap"]), || {
                format!("{line}: gap should be {gap}")
            })?;
            ensure(qi(n) < threshold || gap >= qi(2), || {
                format!("{line}: gap below 2 past the threshold")
            })?;
            gaps += 1;
            continue;
        }
        if !line.starts_with("p=") {
            continue;
        }
        let [p, n, l, m] = ["p", "n", "l", "m"].map(|k| f[k].parse::<u64>().unwrap());
        let v = q(&f["v"]);
        let c = qi(n * p) / (v * qi(p - 1));
        ensure(v > Q::from_integer(0) && gcd(n, p) == 1, || {
            format!("{line}: invalid v or n")
        })?;
        ensure(qi(l) >= Q::from_integer(1) + c * 2, || {
            format!("{line}: l too small")
        })?;
        ensure(qi(m) >= qi(2 * l) / qi(n), || {
            format!("{line}: m too small")
        })?;
        let mn = qi(m * n);
        let i1 = (
            (qi(l) + c).ceil().to_integer(),
            (mn - c).floor().to_integer(),
        );
        let i2 = (c.ceil().to_integer(), (qi(l) - c).floor().to_integer());
        let (lg1, lg2) = (mn - qi(l) - c * 2, qi(l) - c * 2);
        ensure(interval(&f["I1"]) == i1 && interval(&f["I2"]) == i2, || {
            format!("{line}: intervals differ")
        })?;
        ensure(q(&f["lg1"]) == lg1 && q(&f["lg2"]) == lg2, || {
            format!("{line}: lengths differ")
        })?;
        ensure(lg1 >= qi(1) && lg2 >= qi(1), || {
            format!("{line}: length below 1")
        })?;
        let disjoint = i1.0 > i1.1 || i2.0 > i2.1 || i2.1 < i1.0 || i1.1 < i2.0;
        ensure(disjoint, || format!("{line}: intervals meet"))?;
        cases += 1;
    }
    ensure(cases == 20, || format!("expected 20 cases, saw {cases}"))?;
    ensure(gaps > 0 && rows.len() == cases + gaps, || {
        "machine and text output disagree".into()
    })?;
    let t = within(start, LIMIT_INTERVALS)?;
    Ok(format!(
        "{cases} interval cases and {gaps} gap cases recomputed in {t:.2?}"
    ))
}

fn rigidity() -> Outcome {
    let start = Instant::now();
    let graphs = enumerate_small_graphs(3, 5, 3);
    ensure(!graphs.is_empty(), || "no graphs enumerated".into())?;
    for g in &graphs {
        let k = rigidity_kernel(g, 2)
            .map_err(|e| e.to_string())?
            .dimension();
        ensure(k == 0, || format!("kernel of dimension {k} on {g:?}"))?;
    }
    let t = within(start, LIMIT_RIGIDITY)?;
    for g in &graphs {
        let (k, _) = kernel_dimension_brute(g, 2);
        ensure(k == 0, || {
            format!("brute-force kernel of dimension {k} on {g:?}")
        })?;
    }
    Ok(format!(
        "{} graphs, all kernels zero, in {t:.2?}; brute force agrees",
        graphs.len()
    ))
}

fn currents() -> Outcome {
    let mut r = rng(101);
    let inputs: Vec<(usize, Vec<Vec<usize>>)> =
        (0..50).map(|_| random_connected_graph(&mut r, 8)).collect();
    let start = Instant::now();
    for (n, edges) in &inputs {
        let g = BranchGraph::new(*n, edges).map_err(|e| e.to_string())?;
        let cg = current_group(&g, Ring::Integers).map_err(|e| e.to_string())?;
        let want = g.true_edges().len() + 1 - n;
        ensure(cg.group == FgAbGroup::free(want), || {
            format!("{n} vertices, {edges:?}: {:?}", cg.group)
        })?;
    }
    let t = within(start, LIMIT_CURRENTS)?;
    Ok(format!("50 graphs have rank E - V + 1 in {t:.2?}"))
}

fn graphs_of_groups() -> Outcome {
    let theta = GraphOfFiniteGroups::trivial(graph(2, &[&[0, 1], &[0, 1], &[0, 1]]));
    ensure(
        abelianized_pi1(&theta).map_err(|e| e.to_string())? == FgAbGroup::free(2),
        || "theta".into(),
    )?;
    let mut r = rng(102);
    for _ in 0..20 {
        let (n, edges) = random_connected_graph(&mut r, 6);
        let g = BranchGraph::new(n, &edges).unwrap();
        let h = g.cycle_rank();
        let got = abelianized_pi1(&GraphOfFiniteGroups::trivial(g)).map_err(|e| e.to_string())?;
        ensure(got == FgAbGroup::free(h), || {
            format!("trivial groups on {edges:?}: {got:?}")
        })?;
    }
    let z3_circle = GraphOfFiniteGroups::new(
        graph(1, &[&[0, 0]]),
        vec![z(3)],
        vec![z(1)],
        vec![vec![0], vec![0]],
    )
    .unwrap();
    let want = FgAbGroup::new(1, vec![BigInt::from(3)]).unwrap();
    ensure(
        abelianized_pi1(&z3_circle).map_err(|e| e.to_string())? == want,
        || "Z/3 circle".into(),
    )?;
    for i in 0..20 {
        let gog = random_gog(&mut r, 4);
        let a = abelianized_pi1(&gog).map_err(|e| e.to_string())?;
        let b = abelianized_pi1_product_formula(&gog).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("input {i}: routes give {a:?} and {b:?}"))?;
        let (free, torsion) = gog_abelianization_brute(&gog);
        ensure(
            free == a.free_rank() && torsion == TorsionProfile::of(&a),
            || format!("input {i}: enumeration differs"),
        )?;
    }
    Ok(
        "trivial groups give Z^h, Z/3 circle gives Z + Z/3, routes agree on 20 random inputs"
            .into(),
    )
}

fn schreier() -> Outcome {
    let start = Instant::now();
    let corpus = extension_corpus(24, SCHREIER_CAP);
    let mut r = rng(103);
    let (mut data, mut split_pairs) = (0, 0);
    for (pn, hn, coverage, ds) in &corpus {
        if *coverage == Coverage::SplitOrbits {
            split_pairs += 1;
        }
        for d in ds {
            let gamma: Vec<usize> = (0..d.h.order())
                .map(|_| r.gen_range(0..d.pi.order()))
                .collect();
            verify_extension(d, &gamma).map_err(|e| format!("{pn} by {hn}: {e}"))?;
            data += 1;
        }
    }
    let s3 = ExtensionData {
        pi: z(3),
        h: z(2),
        alpha: vec![vec![0, 1, 2], vec![0, 2, 1]],
        g: vec![vec![0, 0]; 2],
    };
    let e = schreier_extension(&s3).map_err(|e| e.to_string())?.group;
    ensure(e.order() == 6 && !e.is_abelian(), || {
        "Z/3 by Z/2 with inversion".into()
    })?;
    let sym = catalogue().into_iter().find(|(n, _)| n == "S3").unwrap().1;
    ensure(e.find_isomorphism(&sym).is_some(), || "not S3".into())?;
    let t = within(start, LIMIT_SCHREIER)?;
    Ok(format!(
        "{} pairs ({} enumerated, {} via split orbits), {data} data verified in {t:.2?}",
        corpus.len(),
        corpus.len() - split_pairs,
        split_pairs
    ))
}

fn monoids() -> Outcome {
    for d in 0..=4 {
        let n = faces(&AffineMonoid::free(d)).len();
        ensure(n == 1 << d, || format!("N^{d} has {n} faces"))?;
    }
    let one: Vec<BigInt> = vec![BigInt::from(1)];
    for p in [2u64, 3, 5] {
        let got =
            check_saturated_bounded(&MonoidMorphism::scalar(p as i64), &BTreeSet::from([p]), 3)
                .map_err(|e| e.to_string())?;
        let want = SaturationCheck::Counterexample {
            a: one.clone(),
            b: one.clone(),
            p,
        };
        ensure(got == want, || format!("times {p}: {got:?}"))?;
    }
    for d in 1..=3 {
        let free = AffineMonoid::free(d);
        let id = MonoidMorphism::identity(&free);
        let sat = check_saturated_bounded(&id, &BTreeSet::from([2, 3, 5]), 3)
            .map_err(|e| e.to_string())?;
        ensure(sat == SaturationCheck::Pass, || {
            format!("identity on N^{d}: {sat:?}")
        })?;
        let int = check_integral_bounded(&id, 3).map_err(|e| e.to_string())?;
        ensure(int == IntegralCheck::Pass, || {
            format!("identity on N^{d}: {int:?}")
        })?;
        ensure(
            is_kummer(&id, &PrimeSet::Only(BTreeSet::new())).is_kummer,
            || "identity not Kummer".into(),
        )?;
        ensure(is_saturated(&free).0, || "N^d not saturated".into())?;
    }
    Ok("faces of N^d number 2^d, times p gives witness (1, 1), identity passes every check".into())
}

fn level_counts(c: &PolysimplicialSet) -> BTreeMap<PolyIndex, usize> {
    c.nondegenerate_cells()
        .into_iter()
        .map(|(k, v)| (k, v.len()))
        .collect()
}

fn verified_iso(m: &PolyMorphism<'_>) -> Result<(), String> {
    let r = is_cospec_iso(m);
    ensure(r.is_iso(), || r.reason.clone())?;
    let inv =
        PolyMorphism::new(m.target, m.source, r.inverse.unwrap()).map_err(|e| e.to_string())?;
    ensure(
        m.then(&inv).agrees_with(&PolyMorphism::identity(m.source)),
        || "left inverse fails".into(),
    )?;
    ensure(
        inv.then(m).agrees_with(&PolyMorphism::identity(m.target)),
        || "right inverse fails".into(),
    )
}

fn polysimplicial() -> Outcome {
    let start = Instant::now();
    let e1 = idx(&[1]);
    let hom = lambda_hom(&e1, &e1);
    let tables: BTreeSet<Vec<Vec<usize>>> = hom.iter().map(LambdaMorphism::table).collect();
    ensure(hom.len() == 4 && tables == hom_by_triples(&e1, &e1), || {
        format!("|Hom| = {}", hom.len())
    })?;

    let edge = PolysimplicialSet::representable(&e1);
    let sq = PolysimplicialSet::representable(&idx(&[1, 1]));
    let prod = box_product(&edge, &edge);
    ensure(prod.generators() == [idx(&[1, 1])], || {
        "box product generators".into()
    })?;
    ensure(level_counts(&prod) == level_counts(&sq), || {
        "box product cells".into()
    })?;
    verified_iso(
        &PolyMorphism::new(&prod, &sq, vec![sq.generator_cell(0)]).map_err(|e| e.to_string())?,
    )?;

    let corpus = [
        PolysimplicialSet::point(),
        edge.clone(),
        PolysimplicialSet::representable(&idx(&[2])),
        circle(),
        folded_edge(),
    ];
    let mut pairs = 0;
    for (i, a) in corpus.iter().enumerate() {
        for b in &corpus[i..] {
            let chi = box_product(a, b).euler_characteristic();
            ensure(
                chi == a.euler_characteristic() * b.euler_characteristic(),
                || format!("chi on pair {pairs}"),
            )?;
            pairs += 1;
        }
    }

    for t in [&[0][..], &[1], &[2], &[1, 1], &[2, 1]] {
        let c = PolysimplicialSet::representable(&idx(t));
        let p = c
            .category_pi1(c.generator_cell(0))
            .map_err(|e| e.to_string())?;
        ensure(p.simplify(10_000).generators.is_empty(), || {
            format!("pi1 of {t:?} not trivial")
        })?;
    }
    let c = circle();
    let p = c
        .category_pi1(c.nondegenerate_cells()[&PolyIndex::point()][0])
        .map_err(|e| e.to_string())?;
    let s = p.simplify(10_000);
    ensure(s.generators.len() == 1 && s.relators.is_empty(), || {
        "circle pi1 not free of rank 1".into()
    })?;

    let flip = LambdaMorphism::from_triple(&e1, &e1, &[0], &[0], &[vec![1, 0]])
        .map_err(|e| e.to_string())?;
    verified_iso(&PolyMorphism::new(&edge, &edge, vec![edge.cell_of(0, &flip).unwrap()]).unwrap())?;
    let top = c.nondegenerate_cells()[&e1][0];
    let onto = is_cospec_iso(&PolyMorphism::new(&edge, &c, vec![top]).unwrap());
    ensure(!onto.strata_bijective && !onto.is_iso(), || {
        "edge onto circle accepted".into()
    })?;
    let fold = folded_edge();
    let n = fold.normalize();
    let r = is_cospec_iso(&to_normal_form(&fold, &n));
    ensure(!r.target_interiorly_free && !r.is_iso(), || {
        "folded edge accepted".into()
    })?;

    let t = within(start, LIMIT_POLY)?;
    Ok(format!(
        "Hom, box product, chi on {pairs} pairs, pi1 and the iso criterion checked in {t:.2?}"
    ))
}

fn cospecialization() -> Outcome {
    let c = Poset::chain(3);
    let id = cospec_strata(&c, &c, &incidence(&c, &c, &[0, 1, 2])).map_err(|e| e.to_string())?;
    ensure(id == [0, 1, 2], || format!("identity gave {id:?}"))?;
    let one = Poset::chain(1);
    let all: BTreeSet<_> = (0..3).map(|x1| (0, x1)).collect();
    ensure(
        cospec_strata(&c, &one, &all).map_err(|e| e.to_string())? == [0, 0, 0],
        || "constant".into(),
    )?;
    let r: BTreeSet<_> = [(0, 0), (1, 0)].into();
    let nonunique = cospec_strata(&one, &Poset::antichain(2), &r);
    ensure(
        matches!(nonunique, Err(CospecError::NonUniqueMax { .. })),
        || format!("{nonunique:?}"),
    )?;

    let mut r = rng(104);
    for i in 0..20 {
        let ns: Vec<usize> = (0..3).map(|_| r.gen_range(1..=5)).collect();
        let s: Vec<Poset> = ns.iter().map(|&n| random_poset(&mut r, n)).collect();
        let f12 = random_monotone(&mut r, &s[0], &s[1]);
        let f23 = random_monotone(&mut r, &s[1], &s[2]);
        let f13: Vec<usize> = f12.iter().map(|&x| f23[x]).collect();
        let g = |a: usize, b: usize, f: &[usize]| {
            cospec_strata(&s[a], &s[b], &incidence(&s[a], &s[b], f))
        };
        let (g12, g23, g13) = (g(0, 1, &f12), g(1, 2, &f23), g(0, 2, &f13));
        let (g12, g23, g13) = (
            g12.map_err(|e| e.to_string())?,
            g23.map_err(|e| e.to_string())?,
            g13.map_err(|e| e.to_string())?,
        );
        let comp = cospec_compose(&g12, &g23, Some(&g13)).map_err(|e| e.to_string())?;
        ensure(comp.map == g13 && comp.violations.is_empty(), || {
            format!("triple {i} incoherent")
        })?;
    }

    let e = PolysimplicialSet::representable(&idx(&[1]));
    let sets = [
        e.clone(),
        circle(),
        box_product(&e, &e),
        box_product(&circle(), &e),
    ];
    for c in &sets {
        let n = c.normalize();
        verified_iso(&to_normal_form(c, &n))?;
        let poset = n.strata_poset();
        let ext = box_extend(c, &StrataFunctor::constant(&poset, 1)).map_err(|e| e.to_string())?;
        let images: Vec<usize> = ext
            .labels
            .iter()
            .map(|&(g, _)| ext.base.generator_cell(g))
            .collect();
        verified_iso(&PolyMorphism::new(&ext.set, &ext.base, images).map_err(|e| e.to_string())?)?;
    }
    Ok("strata examples, 20 coherent triples, verified inverses and singleton extensions".into())
}

fn determinism() -> Outcome {
    for (name, args) in CASES {
        let want = fs::read_to_string(golden_dir().join(format!("{name}.txt")))
            .map_err(|e| format!("{name}: {e}"))?;
        for threads in [None, None, Some(1), Some(4)] {
            let got = run_case(args, threads);
            ensure(got == want, || {
                format!("{name} differs with threads {threads:?}")
            })?;
        }
    }
    Ok(format!(
        "{} golden files identical over two runs and 1 or 4 threads",
        CASES.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("splitting bands", splitting_bands),
        ("interval sweep", tate_sweep),
        ("rigidity", rigidity),
        ("current groups", currents),
        ("graph-of-groups abelianization", graphs_of_groups),
        ("Schreier extensions", schreier),
        ("monoids", monoids),
        ("polysimplicial", polysimplicial),
        ("cospecialization", cospecialization),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
