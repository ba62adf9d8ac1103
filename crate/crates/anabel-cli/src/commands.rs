//! One function per subcommand. Each returns a text report, a JSON report
//! and whether the checked property held.

use std::collections::BTreeSet;
use std::path::Path;

use anabel::algebra::{format_rational, parse_rational, Rational};
use anabel::cospec::{cospec_compose, cospec_strata};
use anabel::currents::{current_group, Ring};
use anabel::gog::{
    abelianized_pi1, abelianized_pi1_product_formula, pi1_presentation_default, pi1_top_rank,
    schreier_extension, schreier_regauge, SchreierExtension,
};
use anabel::graphs::{enumerate_covers, enumerate_small_graphs, rigidity_kernel};
use anabel::monoids::{
    check_integral_bounded, check_saturated_bounded, faces, is_kummer, is_saturated, IntegralCheck,
    PrimeSet, SaturationCheck, Vector,
};
use anabel::polysimplicial::PolyIndex;
use anabel::presentation::GroupPresentation;
use anabel::splitting::{fiber_count, gap_threshold, interval_gap, tate_intervals};
use num_bigint::BigInt;
use serde_json::json;

use crate::docs::{
    kind_of, load, pairs, parse_ring, CliError, CospecDoc, ExtensionDoc, GogDoc, GraphDoc, Json,
    MonoidDoc, MorphismDoc, PolyDoc,
};

pub struct Report {
    pub lines: Vec<String>,
    pub json: Json,
    pub holds: bool,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn rational_arg(name: &str, s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e| usage(format!("{name}: {e}")))
}

fn vec_str(v: &[BigInt]) -> String {
    format!(
        "({})",
        v.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    )
}

fn vec_json(v: &Vector) -> Json {
    Json::Array(v.iter().map(|x| json!(x.to_string())).collect())
}

fn rat_json(q: &Rational) -> Json {
    json!(format_rational(q))
}

pub fn split_radius(p: u64, h: u32, vs: &[String]) -> Result<Report, CliError> {
    if !anabel::monoids::is_prime(p) {
        return Err(usage(format!("p: {p} is not a prime")));
    }
    let mut lines = Vec::new();
    let mut rows = Vec::new();
    for s in vs {
        let v = rational_arg("v", s)?;
        let f = fiber_count(p, h, &v).map_err(|e| usage(format!("v={s}: {e}")))?;
        let size = BigInt::from(p).pow(f.exponent);
        let flag = if f.on_boundary { " boundary" } else { "" };
        lines.push(format!(
            "v={} i={} size={size}{flag}",
            format_rational(&v),
            f.exponent
        ));
        rows.push(json!({"v": rat_json(&v), "i": f.exponent, "size": size.to_string(), "boundary": f.on_boundary}));
    }
    Ok(Report {
        lines,
        json: json!({"p": p, "h": h, "fibers": rows}),
        holds: true,
    })
}

pub fn tate(p: u64, v: &str, n: u64, l: u64, m: u64) -> Result<Report, CliError> {
    let vq = rational_arg("v", v)?;
    let t = tate_intervals(p, &vq, n, l, m).map_err(|e| usage(e.to_string()))?;
    let lines = vec![
        format!("np/(v(p-1)) = {}", format_rational(&t.offset)),
        format!("I1 = [{}, {}]", t.i1.0, t.i1.1),
        format!("I2 = [{}, {}]", t.i2.0, t.i2.1),
        format!(
            "lg(I1) = mn - l - 2np/(v(p-1)) = {}",
            format_rational(&t.lg1)
        ),
        format!("lg(I2) = l - 2np/(v(p-1)) = {}", format_rational(&t.lg2)),
        format!("disjoint = {}", if t.i2.1 < t.i1.0 { "yes" } else { "no" }),
    ];
    let json = json!({
        "offset": rat_json(&t.offset),
        "i1": [t.i1.0.to_string(), t.i1.1.to_string()],
        "i2": [t.i2.0.to_string(), t.i2.1.to_string()],
        "lg1": rat_json(&t.lg1),
        "lg2": rat_json(&t.lg2),
    });
    Ok(Report {
        lines,
        json,
        holds: true,
    })
}

/// Fixed parameter sweep for the interval experiment.
pub fn tate_sweep() -> Result<Report, CliError> {
    let mut lines = Vec::new();
    let mut rows = Vec::new();
    let mut holds = true;
    for (p, v, n, l, m) in tate_cases() {
        let vq = rational_arg("v", v)?;
        let t = tate_intervals(p, &vq, n, l, m).map_err(|e| usage(e.to_string()))?;
        let ok = t.lg1 >= Rational::from_integer(1.into())
            && t.lg2 >= Rational::from_integer(1.into())
            && t.i2.1 < t.i1.0;
        holds &= ok;
        lines.push(format!(
            "p={p} v={v} n={n} l={l} m={m} I1=[{}, {}] I2=[{}, {}] lg1={} lg2={} {}",
            t.i1.0,
            t.i1.1,
            t.i2.0,
            t.i2.1,
            format_rational(&t.lg1),
            format_rational(&t.lg2),
            if ok { "ok" } else { "FAIL" }
        ));
        rows.push(json!({"p": p, "v": v, "n": n, "l": l, "m": m, "ok": ok}));
    }
    for (p, v1, v2, n) in [
        (2u64, 1i64, 2i64, 3u64),
        (3, 1, 3, 1),
        (5, 1, 2, 3),
        (3, 2, 5, 7),
    ] {
        let (a, b) = (
            Rational::from_integer(v1.into()),
            Rational::from_integer(v2.into()),
        );
        let gap = interval_gap(p, n, &a, &b).map_err(|e| usage(e.to_string()))?;
        let thr = gap_threshold(p, &a, &b).map_err(|e| usage(e.to_string()))?;
        let meets = Rational::from_integer(n.into()) >= thr;
        let ok = !meets || gap >= Rational::from_integer(2.into());
        holds &= ok;
        lines.push(format!(
            "gap p={p} v1={v1} v2={v2} n={n} gap={} threshold={} {}",
            format_rational(&gap),
            format_rational(&thr),
            if ok { "ok" } else { "FAIL" }
        ));
        rows.push(json!({"p": p, "v1": v1, "v2": v2, "n": n, "gap": rat_json(&gap), "ok": ok}));
    }
    Ok(Report {
        lines,
        json: json!({"cases": rows}),
        holds,
    })
}

/// Twenty valid parameter sets (p, v, n, l, m).
pub fn tate_cases() -> Vec<(u64, &'static str, u64, u64, u64)> {
    vec![
        (2, "1", 3, 13, 9),
        (2, "2", 3, 7, 5),
        (2, "3", 1, 3, 6),
        (2, "1/2", 1, 9, 18),
        (2, "3/2", 5, 15, 6),
        (3, "1", 1, 4, 8),
        (3, "1", 2, 7, 7),
        (3, "2", 4, 7, 4),
        (3, "1/3", 1, 10, 20),
        (3, "5/2", 5, 7, 3),
        (5, "1", 1, 4, 8),
        (5, "1", 3, 9, 6),
        (5, "2", 2, 4, 4),
        (5, "7/3", 4, 6, 3),
        (7, "1", 1, 4, 8),
        (7, "3", 2, 3, 3),
        (7, "1/2", 3, 15, 10),
        (11, "1", 1, 4, 8),
        (11, "2", 3, 5, 4),
        (13, "4", 5, 4, 2),
    ]
}

pub fn verify_rigidity(path: &Path, max_degree: usize) -> Result<Report, CliError> {
    let doc = load::<GraphDoc>(path, &["graph", "metric-graph"])?;
    let g = doc.graph()?;
    if doc.doc.lengths.is_some() {
        doc.metric()?;
    }
    let r = rigidity_kernel(&g, max_degree).map_err(|e| doc.err("graph", e))?;
    let mut lines: Vec<String> = r.warnings.iter().map(|w| format!("warning: {w}")).collect();
    lines.push(format!("covers checked: {}", r.covers_checked));
    lines.push(format!("cycles checked: {}", r.cycles_checked));
    lines.push(format!("kernel dimension: {}", r.dimension()));
    for b in &r.basis {
        lines.push(format!(
            "  [{}]",
            b.iter().map(format_rational).collect::<Vec<_>>().join(", ")
        ));
    }
    let json = json!({
        "warnings": r.warnings,
        "covers_checked": r.covers_checked,
        "cycles_checked": r.cycles_checked,
        "dimension": r.dimension(),
        "basis": r.basis.iter().map(|b| b.iter().map(rat_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    Ok(Report {
        lines,
        json,
        holds: r.dimension() == 0,
    })
}

/// Rigidity over every small connected graph of minimal arity 3.
pub fn rigidity_sweep(
    max_vertices: usize,
    max_edges: usize,
    max_degree: usize,
) -> Result<Report, CliError> {
    let mut lines = Vec::new();
    let mut rows = Vec::new();
    let mut holds = true;
    for g in enumerate_small_graphs(max_vertices, max_edges, 3) {
        let r = rigidity_kernel(&g, max_degree).map_err(|e| usage(e.to_string()))?;
        holds &= r.dimension() == 0;
        let edges: Vec<Vec<usize>> = (0..g.edge_count()).map(|e| g.endpoints(e)).collect();
        lines.push(format!(
            "V={} E={edges:?} kernel={}",
            g.vertex_count(),
            r.dimension()
        ));
        rows.push(json!({"vertices": g.vertex_count(), "edges": edges, "kernel": r.dimension()}));
    }
    lines.push(format!("graphs: {}", rows.len()));
    Ok(Report {
        lines,
        json: json!({"graphs": rows}),
        holds,
    })
}

fn presentation_lines(p: &GroupPresentation, label: &str) -> Vec<String> {
    let mut lines = vec![format!(
        "{label}: {} generators, {} relators",
        p.generators.len(),
        p.relators.len()
    )];
    lines.push(format!("  {p}"));
    lines
}

fn presentation_json(p: &GroupPresentation) -> Json {
    json!({
        "generators": p.generators,
        "relators": p.relators.iter().map(|r| p.format_word(r)).collect::<Vec<_>>(),
    })
}

pub fn pi1(path: &Path) -> Result<Report, CliError> {
    match kind_of(path)?.as_str() {
        "polysimplicial" => {
            let doc = load::<PolyDoc>(path, &["polysimplicial"])?;
            let c = doc.set()?;
            let base = c
                .nondegenerate_cells()
                .get(&PolyIndex::point())
                .and_then(|v| v.first().copied())
                .ok_or_else(|| doc.err("factors", "no vertex to use as base point"))?;
            let p = c.category_pi1(base).map_err(|e| doc.err("factors", e))?;
            let mut lines = presentation_lines(&p, "pi1");
            lines.push(format!("abelianization: {}", p.abelianization()));
            let json = json!({"presentation": presentation_json(&p), "abelianization": p.abelianization().to_string()});
            Ok(Report {
                lines,
                json,
                holds: true,
            })
        }
        _ => {
            let doc = load::<GogDoc>(path, &["graph-of-groups"])?;
            let gog = doc.gog()?;
            let p = pi1_presentation_default(&gog).map_err(|e| doc.err("edges", e))?;
            let s = p.simplify(100_000);
            let top = pi1_top_rank(&gog).map_err(|e| doc.err("edges", e))?;
            let mut lines = presentation_lines(&p, "presentation");
            lines.extend(presentation_lines(&s, "simplified"));
            lines.push(format!("topological rank: {top}"));
            let json = json!({
                "presentation": presentation_json(&p),
                "simplified": presentation_json(&s),
                "top_rank": top,
            });
            Ok(Report {
                lines,
                json,
                holds: true,
            })
        }
    }
}

pub fn abelianize(path: &Path) -> Result<Report, CliError> {
    let doc = load::<GogDoc>(path, &["graph-of-groups"])?;
    let gog = doc.gog()?;
    let a = abelianized_pi1(&gog).map_err(|e| doc.err("edges", e))?;
    let b = abelianized_pi1_product_formula(&gog).map_err(|e| doc.err("edges", e))?;
    let lines = vec![
        a.to_string(),
        format!("product formula: {b}"),
        format!("agree: {}", a == b),
    ];
    let json =
        json!({"presentation": a.to_string(), "product_formula": b.to_string(), "agree": a == b});
    Ok(Report {
        lines,
        json,
        holds: a == b,
    })
}

fn prime_list(primes: &[u64]) -> Result<BTreeSet<u64>, CliError> {
    primes
        .iter()
        .map(|&p| {
            if anabel::monoids::is_prime(p) {
                Ok(p)
            } else {
                Err(usage(format!("{p} is not a prime")))
            }
        })
        .collect()
}

pub fn saturation_check(path: &Path, primes: &[u64], bound: usize) -> Result<Report, CliError> {
    let doc = load::<MorphismDoc>(path, &["morphism"])?;
    let phi = doc.morphism()?;
    let primes = prime_list(primes)?;
    let integral = check_integral_bounded(&phi, bound).map_err(|e| usage(e.to_string()))?;
    let saturated =
        check_saturated_bounded(&phi, &primes, bound).map_err(|e| usage(e.to_string()))?;
    let mut lines = Vec::new();
    let mut json = serde_json::Map::new();
    match &integral {
        IntegralCheck::Pass => {
            lines.push(format!("integral: pass (bound {bound})"));
            json.insert("integral".into(), json!("pass"));
        }
        IntegralCheck::Counterexample {
            f1_prime,
            f2_prime,
            f1,
            f2,
        } => {
            lines.push(format!(
                "integral: counterexample f1'={} f2'={} f1={} f2={}",
                vec_str(f1_prime),
                vec_str(f2_prime),
                vec_str(f1),
                vec_str(f2)
            ));
            json.insert(
                "integral".into(),
                json!({"f1_prime": vec_json(f1_prime), "f2_prime": vec_json(f2_prime), "f1": vec_json(f1), "f2": vec_json(f2)}),
            );
        }
    }
    match &saturated {
        SaturationCheck::Pass => {
            lines.push(format!("saturated: pass (bound {bound})"));
            json.insert("saturated".into(), json!("pass"));
        }
        SaturationCheck::Counterexample { a, b, p } => {
            lines.push(format!(
                "saturated: counterexample a={} b={} p={p}",
                vec_str(a),
                vec_str(b)
            ));
            json.insert(
                "saturated".into(),
                json!({"a": vec_json(a), "b": vec_json(b), "p": p}),
            );
        }
    }
    let holds = integral == IntegralCheck::Pass && saturated == SaturationCheck::Pass;
    Ok(Report {
        lines,
        json: Json::Object(json),
        holds,
    })
}

pub fn kummer_check(path: &Path, primes: &[u64], all_except: &[u64]) -> Result<Report, CliError> {
    let doc = load::<MorphismDoc>(path, &["morphism"])?;
    let phi = doc.morphism()?;
    let l = match (primes.is_empty(), all_except.is_empty()) {
        (_, true) => PrimeSet::Only(prime_list(primes)?),
        (true, false) => PrimeSet::AllExcept(prime_list(all_except)?),
        (false, false) => return Err(usage("give --primes or --all-primes-except, not both")),
    };
    let r = is_kummer(&phi, &l);
    let mut lines = vec![format!("injective: {}", r.injective)];
    lines.push(format!(
        "multipliers: [{}]",
        r.multipliers
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    ));
    if let Some(g) = r.failing_generator {
        lines.push(format!("failing target generator: {g}"));
    }
    lines.push(format!("kummer: {}", r.is_kummer));
    let json = json!({
        "injective": r.injective,
        "multipliers": r.multipliers.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "failing_generator": r.failing_generator,
        "kummer": r.is_kummer,
    });
    Ok(Report {
        lines,
        json,
        holds: r.is_kummer,
    })
}

pub fn faces_cmd(path: &Path) -> Result<Report, CliError> {
    let doc = load::<MonoidDoc>(path, &["monoid"])?;
    let p = doc.monoid()?;
    let fs = faces(&p);
    let (sat, witness) = is_saturated(&p);
    let mut lines = vec![
        format!("rank: {}", p.rank()),
        format!("faces: {}", fs.len()),
    ];
    for f in &fs {
        lines.push(format!("  {:?}", f.generators));
    }
    lines.push(match &witness {
        None => "saturated: yes".to_string(),
        Some(w) => format!("saturated: no, witness {}", vec_str(w)),
    });
    let json = json!({
        "rank": p.rank(),
        "faces": fs.iter().map(|f| f.generators.clone()).collect::<Vec<_>>(),
        "saturated": sat,
        "witness": witness.as_ref().map(vec_json),
    });
    Ok(Report {
        lines,
        json,
        holds: true,
    })
}

pub fn cover_enum(path: &Path, max_degree: usize) -> Result<Report, CliError> {
    let doc = load::<GraphDoc>(path, &["graph", "metric-graph"])?;
    let g = doc.graph()?;
    let mut lines = Vec::new();
    let mut rows = Vec::new();
    for d in 1..=max_degree {
        let covers = enumerate_covers(&g, d).map_err(|e| doc.err("edges", e))?;
        let connected = covers.iter().filter(|c| c.connected).count();
        lines.push(format!(
            "degree {d}: {} covers, {connected} connected",
            covers.len()
        ));
        for c in &covers {
            lines.push(format!(
                "  {:?}{}",
                c.assignment,
                if c.connected { "" } else { " disconnected" }
            ));
        }
        rows.push(json!({
            "degree": d,
            "covers": covers.iter().map(|c| json!({"assignment": c.assignment, "connected": c.connected})).collect::<Vec<_>>(),
        }));
    }
    Ok(Report {
        lines,
        json: json!({"degrees": rows}),
        holds: true,
    })
}

pub fn current_group_cmd(path: &Path, ring: Option<&str>) -> Result<Report, CliError> {
    let doc = load::<GraphDoc>(path, &["graph", "metric-graph", "current"])?;
    let g = doc.graph()?;
    let ring = match ring {
        Some(s) => parse_ring(s).map_err(usage)?,
        None => Ring::Integers,
    };
    let cg = current_group(&g, ring.clone()).map_err(|e| doc.err("edges", e))?;
    let mut lines = vec![format!("C(G; {ring}) = {}", cg.group)];
    for (i, c) in cg.basis.iter().enumerate() {
        lines.push(format!("  basis {i}: {}", vec_str(c.values())));
    }
    let mut json = json!({
        "group": cg.group.to_string(),
        "basis": cg.basis.iter().map(|c| c.values().iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    if doc.doc.values.is_some() {
        let c = doc.current()?;
        lines.push(format!(
            "given values form a current over {}: {}",
            c.ring(),
            vec_str(c.values())
        ));
        json["current"] = json!(c
            .values()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>());
    }
    Ok(Report {
        lines,
        json,
        holds: true,
    })
}

pub fn cospec_cmd(path: &Path) -> Result<Report, CliError> {
    let doc = load::<CospecDoc>(path, &["cospec"])?;
    let s1 = doc.doc.s1.build().map_err(|e| doc.err("s1", e))?;
    let s2 = doc.doc.s2.build().map_err(|e| doc.err("s2", e))?;
    let f12 =
        cospec_strata(&s1, &s2, &pairs(&doc.doc.incidence)).map_err(|e| doc.err("incidence", e))?;
    let mut lines = vec![format!("f12 = {f12:?}")];
    let mut json = serde_json::Map::new();
    json.insert("f12".into(), json!(f12));
    let mut holds = true;
    if let Some(s3) = &doc.doc.s3 {
        let s3 = s3.build().map_err(|e| doc.err("s3", e))?;
        let r23 = doc
            .doc
            .incidence_23
            .as_ref()
            .ok_or_else(|| doc.err("incidence_23", "missing"))?;
        let f23 = cospec_strata(&s2, &s3, &pairs(r23)).map_err(|e| doc.err("incidence_23", e))?;
        let f13 = match &doc.doc.incidence_13 {
            Some(r13) => {
                Some(cospec_strata(&s1, &s3, &pairs(r13)).map_err(|e| doc.err("incidence_13", e))?)
            }
            None => None,
        };
        let c =
            cospec_compose(&f12, &f23, f13.as_deref()).map_err(|e| doc.err("incidence_23", e))?;
        lines.push(format!("f23 = {f23:?}"));
        lines.push(format!("f23 . f12 = {:?}", c.map));
        if let Some(f13) = &f13 {
            lines.push(format!("f13 = {f13:?}"));
            lines.push(if c.violations.is_empty() {
                "coherent: yes".to_string()
            } else {
                format!("coherent: no, differs at {:?}", c.violations)
            });
        }
        holds = c.violations.is_empty();
        json.insert("f23".into(), json!(f23));
        json.insert("composite".into(), json!(c.map));
        json.insert("f13".into(), json!(f13));
        json.insert("violations".into(), json!(c.violations));
    }
    Ok(Report {
        lines,
        json: Json::Object(json),
        holds,
    })
}

pub fn schreier(path: &Path) -> Result<Report, CliError> {
    let doc = load::<ExtensionDoc>(path, &["extension-data"])?;
    let data = doc.data()?;
    let ext = schreier_extension(&data).map_err(|e| doc.err("alpha/g", e))?;
    let e = &ext.group;
    let identity_ok = e.identity() == SchreierExtension::expected_identity(&data);
    let inverse_ok =
        (0..e.order()).all(|x| e.inv(x) == SchreierExtension::expected_inverse(&data, x));
    let exact = ext.is_exact(&data);
    let mut orders: Vec<usize> = (0..e.order()).map(|x| e.element_order(x)).collect();
    orders.sort_unstable();
    let mut lines = vec![
        format!("order: {}", e.order()),
        format!("abelian: {}", e.is_abelian()),
        format!("element orders: {orders:?}"),
        format!("identity formula: {identity_ok}"),
        format!("inverse formula: {inverse_ok}"),
        format!("exact: {exact}"),
    ];
    let mut json = json!({
        "order": e.order(),
        "abelian": e.is_abelian(),
        "element_orders": orders,
        "identity_formula": identity_ok,
        "inverse_formula": inverse_ok,
        "exact": exact,
    });
    let mut holds = identity_ok && inverse_ok && exact;
    if let Some(gamma) = &doc.doc.gamma {
        let (new, iso) = schreier_regauge(&data, gamma).map_err(|e| doc.err("gamma", e))?;
        let ext2 = schreier_extension(&new).map_err(|e| doc.err("gamma", e))?;
        let is_iso = e.is_homomorphism(&ext2.group, &iso).is_ok()
            && iso.iter().collect::<BTreeSet<_>>().len() == iso.len();
        lines.push(format!("regauged isomorphism: {is_iso}"));
        json["regauge_isomorphism"] = json!(is_iso);
        holds &= is_iso;
    }
    Ok(Report { lines, json, holds })
}
