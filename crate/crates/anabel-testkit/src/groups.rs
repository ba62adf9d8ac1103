use std::collections::{BTreeSet, VecDeque};

use anabel::gog::{ExtensionData, FiniteGroup, GraphOfFiniteGroups};
use anabel::graphs::BranchGraph;

/// Group from a multiplication on `0..n` given by a closure.
fn from_law(n: usize, law: impl Fn(usize, usize) -> usize) -> FiniteGroup {
    FiniteGroup::from_table(
        (0..n)
            .map(|a| (0..n).map(|b| law(a, b)).collect())
            .collect(),
    )
    .unwrap()
}

/// `Z/n ⋊ Z/m` where the generator of `Z/m` acts by multiplication by `r`.
fn metacyclic(n: usize, m: usize, r: usize) -> FiniteGroup {
    let pow = |k: usize| (0..k).fold(1, |acc, _| acc * r % n);
    from_law(n * m, |a, b| {
        let (x, i) = (a % n, a / n);
        let (y, j) = (b % n, b / n);
        ((x + pow(i) * y) % n) + n * ((i + j) % m)
    })
}

/// Dicyclic group of order `4k`: `a^(2k) = 1, b^2 = a^k, b a b^-1 = a^-1`,
/// elements `a^i b^j` with `j` in {0, 1}.
fn dicyclic(k: usize) -> FiniteGroup {
    let n = 2 * k;
    from_law(2 * n, |x, y| {
        let (i, j) = (x % n, x / n);
        let (i2, j2) = (y % n, y / n);
        // b^j a^i2 = a^(±i2) b^j
        let i2 = if j == 1 { (n - i2) % n } else { i2 };
        let mut i = (i + i2) % n;
        let mut j = j + j2;
        if j == 2 {
            i = (i + k) % n;
            j = 0;
        }
        i + n * j
    })
}

/// Every group of order at most 12 up to isomorphism, with a name.
pub fn catalogue() -> Vec<(String, FiniteGroup)> {
    let z = |n: usize| FiniteGroup::cyclic(n).unwrap();
    let mut out: Vec<(String, FiniteGroup)> = (1..=12).map(|n| (format!("Z{n}"), z(n))).collect();
    out.push(("Z2xZ2".into(), z(2).direct_product(&z(2)).unwrap()));
    out.push(("Z2xZ4".into(), z(2).direct_product(&z(4)).unwrap()));
    out.push((
        "Z2xZ2xZ2".into(),
        z(2).direct_product(&z(2))
            .unwrap()
            .direct_product(&z(2))
            .unwrap(),
    ));
    out.push(("Z3xZ3".into(), z(3).direct_product(&z(3)).unwrap()));
    out.push(("Z2xZ6".into(), z(2).direct_product(&z(6)).unwrap()));
    out.push(("S3".into(), metacyclic(3, 2, 2)));
    out.push(("D4".into(), metacyclic(4, 2, 3)));
    out.push(("Q8".into(), dicyclic(2)));
    out.push(("D5".into(), metacyclic(5, 2, 4)));
    out.push(("D6".into(), metacyclic(6, 2, 5)));
    out.push(("Dic3".into(), dicyclic(3)));
    out.push((
        "A4".into(),
        FiniteGroup::from_permutations(&[vec![1, 2, 0, 3], vec![1, 0, 3, 2]]).unwrap(),
    ));
    out
}

/// Group axioms checked directly on the table: closure, associativity for
/// every triple, a two-sided identity and two-sided inverses.
pub fn check_axioms(table: &[Vec<usize>]) -> Result<(), String> {
    let n = table.len();
    if table
        .iter()
        .any(|r| r.len() != n || r.iter().any(|&x| x >= n))
    {
        return Err("table is not closed".into());
    }
    for a in 0..n {
        for b in 0..n {
            let ab = table[a][b];
            for c in 0..n {
                if table[ab][c] != table[a][table[b][c]] {
                    return Err(format!("not associative at ({a}, {b}, {c})"));
                }
            }
        }
    }
    let e = (0..n)
        .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
        .ok_or("no identity")?;
    for a in 0..n {
        if !(0..n).any(|b| table[a][b] == e && table[b][a] == e) {
            return Err(format!("{a} has no inverse"));
        }
    }
    Ok(())
}

/// Automorphisms of `g` as tables, found by extending generator images.
pub fn automorphisms(g: &FiniteGroup) -> Vec<Vec<usize>> {
    let gens = g.generating_set();
    let n = g.order();
    let mut out = Vec::new();
    let mut images = vec![0; gens.len()];
    loop {
        if let Some(map) = extend(g, &gens, &images) {
            out.push(map);
        }
        let mut i = 0;
        while i < images.len() {
            images[i] += 1;
            if images[i] < n {
                break;
            }
            images[i] = 0;
            i += 1;
        }
        if i == images.len() {
            break;
        }
    }
    out
}

fn extend(g: &FiniteGroup, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let n = g.order();
    let mut map = vec![usize::MAX; n];
    map[g.identity()] = g.identity();
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for (s, &t) in gens.iter().zip(images) {
            let y = g.mul(x, *s);
            let fy = g.mul(map[x], t);
            if map[y] == usize::MAX {
                map[y] = fy;
                queue.push_back(y);
            } else if map[y] != fy {
                return None;
            }
        }
    }
    let bijective = map.iter().collect::<BTreeSet<_>>().len() == n;
    (bijective && g.is_homomorphism(g, &map).is_ok()).then_some(map)
}

/// Class label of each element modulo the commutator subgroup.
pub fn commutator_classes(g: &FiniteGroup) -> Vec<usize> {
    let n = g.order();
    let mut comm: BTreeSet<usize> = BTreeSet::from([g.identity()]);
    let mut gens = Vec::new();
    for a in 0..n {
        for b in 0..n {
            gens.push(g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b))));
        }
    }
    let mut frontier = vec![g.identity()];
    while let Some(x) = frontier.pop() {
        for &s in &gens {
            let y = g.mul(x, s);
            if comm.insert(y) {
                frontier.push(y);
            }
        }
    }
    (0..n)
        .map(|a| comm.iter().map(|&c| g.mul(a, c)).min().unwrap())
        .collect()
}

/// Every valid extension datum for `(pi, h)` normalized along a spanning
/// tree of the Cayley graph of `h`: `g(1,1) = 1` and `g(x, s) = 1` on tree
/// edges `x -> xs`. Every valid datum is a regauge of one of these. `None`
/// when the parameter space exceeds `cap`.
pub fn normalized_extension_data(
    pi: &FiniteGroup,
    h: &FiniteGroup,
    cap: u64,
) -> Option<Vec<ExtensionData>> {
    let auts = automorphisms(pi);
    let gens = h.generating_set();
    let (n, m) = (pi.order(), h.order());
    let (order, parent) = cayley_tree(h, &gens);
    let tree: BTreeSet<(usize, usize)> = parent.iter().flatten().copied().collect();
    let free: Vec<(usize, usize)> = (0..m)
        .flat_map(|x| (0..gens.len()).map(move |s| (x, s)))
        .filter(|e| !tree.contains(e))
        .collect();
    let count = (auts.len() as u64)
        .checked_pow(gens.len() as u32)?
        .checked_mul((n as u64).checked_pow(free.len() as u32)?)?;
    if count > cap {
        return None;
    }
    let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&x| a[x]).collect() };
    let inner =
        |c: usize| -> Vec<usize> { (0..n).map(|x| pi.mul(pi.mul(c, x), pi.inv(c))).collect() };
    let inners: Vec<Vec<usize>> = (0..n).map(inner).collect();
    let mut out = Vec::new();
    let mut aut_pick = vec![0; gens.len()];
    loop {
        // with g = 1 on tree edges, alpha_{xs} = alpha_x alpha_s along the tree
        let mut alpha: Vec<Vec<usize>> = vec![Vec::new(); m];
        alpha[h.identity()] = (0..n).collect();
        for &y in &order[1..] {
            let (x, s) = parent[y].unwrap();
            alpha[y] = compose(&alpha[x], &auts[aut_pick[s]]);
        }
        // on a free edge, iota(g(x,s)) must equal alpha_x alpha_s alpha_{xs}^-1
        let allowed: Vec<Vec<usize>> = free
            .iter()
            .map(|&(x, s)| {
                let lhs = compose(&alpha[x], &auts[aut_pick[s]]);
                let target = &alpha[h.mul(x, gens[s])];
                (0..n)
                    .filter(|&c| compose(&inners[c], target) == lhs)
                    .collect()
            })
            .collect();
        if allowed.iter().all(|a| !a.is_empty()) {
            let mut g_pick = vec![0; free.len()];
            loop {
                let mut gs = vec![vec![pi.identity(); gens.len()]; m];
                for (k, &(x, s)) in free.iter().enumerate() {
                    gs[x][s] = allowed[k][g_pick[k]];
                }
                // g(x, ys) = alpha_x(g(y, s))^-1 g(x, y) g(xy, s)
                let mut g = vec![vec![pi.identity(); m]; m];
                for x in 0..m {
                    for &y in &order[1..] {
                        let (z, s) = parent[y].unwrap();
                        let t = pi.mul(pi.inv(alpha[x][gs[z][s]]), g[x][z]);
                        g[x][y] = pi.mul(t, gs[h.mul(x, z)][s]);
                    }
                }
                let data = ExtensionData {
                    pi: pi.clone(),
                    h: h.clone(),
                    alpha: alpha.clone(),
                    g,
                };
                if data.validate().is_ok() {
                    out.push(data);
                }
                let mut k = 0;
                while k < g_pick.len() {
                    g_pick[k] += 1;
                    if g_pick[k] < allowed[k].len() {
                        break;
                    }
                    g_pick[k] = 0;
                    k += 1;
                }
                if k == g_pick.len() {
                    break;
                }
            }
        }
        let mut k = 0;
        while k < aut_pick.len() {
            aut_pick[k] += 1;
            if aut_pick[k] < auts.len() {
                break;
            }
            aut_pick[k] = 0;
            k += 1;
        }
        if k == aut_pick.len() {
            break;
        }
    }
    Some(out)
}

fn cayley_tree(h: &FiniteGroup, gens: &[usize]) -> (Vec<usize>, Vec<Option<(usize, usize)>>) {
    let m = h.order();
    let mut parent = vec![None; m];
    let mut order = vec![h.identity()];
    let mut seen = vec![false; m];
    seen[h.identity()] = true;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        for (si, &s) in gens.iter().enumerate() {
            let y = h.mul(x, s);
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some((x, si));
                order.push(y);
            }
        }
        i += 1;
    }
    (order, parent)
}

/// Tree-normalized data gauge-equivalent to split data: every action
/// homomorphism `h -> Aut(pi)` with `g = 1`, twisted by every gauge that
/// keeps `g = 1` on tree edges. When the orders are coprime every extension
/// splits, so this is all normalized data.
pub fn split_normalized_extension_data(pi: &FiniteGroup, h: &FiniteGroup) -> Vec<ExtensionData> {
    let auts = automorphisms(pi);
    let gens = h.generating_set();
    let (n, m) = (pi.order(), h.order());
    let (order, parent) = cayley_tree(h, &gens);
    let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&x| a[x]).collect() };
    let mut out = Vec::new();
    let mut aut_pick = vec![0; gens.len()];
    loop {
        let mut alpha: Vec<Vec<usize>> = vec![Vec::new(); m];
        alpha[h.identity()] = (0..n).collect();
        for &y in &order[1..] {
            let (x, s) = parent[y].unwrap();
            alpha[y] = compose(&alpha[x], &auts[aut_pick[s]]);
        }
        let is_hom =
            (0..m).all(|x| (0..m).all(|y| compose(&alpha[x], &alpha[y]) == alpha[h.mul(x, y)]));
        if is_hom {
            let mut gamma_gen = vec![0; gens.len()];
            loop {
                // gamma_{xs} = gamma_x alpha_x(gamma_s) keeps tree edges trivial
                let mut gamma = vec![pi.identity(); m];
                for &y in &order[1..] {
                    let (x, s) = parent[y].unwrap();
                    gamma[y] = pi.mul(gamma[x], alpha[x][gamma_gen[s]]);
                }
                let new_alpha: Vec<Vec<usize>> = (0..m)
                    .map(|k| {
                        (0..n)
                            .map(|x| pi.mul(pi.mul(gamma[k], alpha[k][x]), pi.inv(gamma[k])))
                            .collect()
                    })
                    .collect();
                let g: Vec<Vec<usize>> = (0..m)
                    .map(|k| {
                        (0..m)
                            .map(|k2| {
                                pi.mul(
                                    pi.mul(gamma[k], alpha[k][gamma[k2]]),
                                    pi.inv(gamma[h.mul(k, k2)]),
                                )
                            })
                            .collect()
                    })
                    .collect();
                out.push(ExtensionData {
                    pi: pi.clone(),
                    h: h.clone(),
                    alpha: new_alpha,
                    g,
                });
                let mut k = 0;
                while k < gamma_gen.len() {
                    gamma_gen[k] += 1;
                    if gamma_gen[k] < n {
                        break;
                    }
                    gamma_gen[k] = 0;
                    k += 1;
                }
                if k == gamma_gen.len() {
                    break;
                }
            }
        }
        let mut k = 0;
        while k < aut_pick.len() {
            aut_pick[k] += 1;
            if aut_pick[k] < auts.len() {
                break;
            }
            aut_pick[k] = 0;
            k += 1;
        }
        if k == aut_pick.len() {
            break;
        }
    }
    out
}

/// How a pair's data were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    Enumerated,
    SplitOrbits,
}

/// Extension data for every catalogue pair with `|pi||h| <= max_order`:
/// exhaustive tree-normalized enumeration under `cap` parameter choices,
/// otherwise split orbits (only used for coprime orders).
pub fn extension_corpus(
    max_order: usize,
    cap: u64,
) -> Vec<(String, String, Coverage, Vec<ExtensionData>)> {
    let cat = catalogue();
    let mut out = Vec::new();
    for (pn, pi) in &cat {
        for (hn, h) in &cat {
            if pi.order() * h.order() > max_order {
                continue;
            }
            match normalized_extension_data(pi, h, cap) {
                Some(data) => out.push((pn.clone(), hn.clone(), Coverage::Enumerated, data)),
                None => {
                    assert_eq!(
                        gcd(pi.order(), h.order()),
                        1,
                        "{pn} by {hn} is too large to enumerate"
                    );
                    out.push((
                        pn.clone(),
                        hn.clone(),
                        Coverage::SplitOrbits,
                        split_normalized_extension_data(pi, h),
                    ));
                }
            }
        }
    }
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Random graph of small groups on a random connected graph, sometimes with
/// a cusp. Edge groups are cyclic, embedded by sending the generator to a
/// random element of the same order at each end.
pub fn random_gog(rng: &mut impl rand::Rng, max_edges: usize) -> GraphOfFiniteGroups {
    let (n, mut edges) = crate::corpus::random_connected_graph(rng, max_edges);
    if rng.gen_bool(0.3) {
        edges.push(vec![rng.gen_range(0..n)]);
    }
    let z = |k: usize| FiniteGroup::cyclic(k).unwrap();
    let pool = [
        z(1),
        z(2),
        z(3),
        z(4),
        z(6),
        z(2).direct_product(&z(2)).unwrap(),
        metacyclic(3, 2, 2),
    ];
    let vertex_groups: Vec<FiniteGroup> = (0..n)
        .map(|_| pool[rng.gen_range(0..pool.len())].clone())
        .collect();
    let graph = BranchGraph::new(n, &edges).unwrap();
    let of_order = |g: &FiniteGroup, k: usize| -> Vec<usize> {
        (0..g.order())
            .filter(|&x| g.element_order(x) == k)
            .collect()
    };
    let mut edge_groups = Vec::new();
    let mut maps = vec![Vec::new(); graph.branch_count()];
    for e in 0..graph.edge_count() {
        let bs = graph.edge_branches(e).to_vec();
        let ks: Vec<usize> = [1, 2, 3, 4, 6]
            .into_iter()
            .filter(|&k| {
                bs.iter()
                    .all(|&b| !of_order(&vertex_groups[graph.branch(b).vertex], k).is_empty())
            })
            .collect();
        let k = ks[rng.gen_range(0..ks.len())];
        for &b in &bs {
            let gv = &vertex_groups[graph.branch(b).vertex];
            let cands = of_order(gv, k);
            let x = cands[rng.gen_range(0..cands.len())];
            let mut map = vec![gv.identity()];
            for _ in 1..k {
                map.push(gv.mul(*map.last().unwrap(), x));
            }
            maps[b] = map;
        }
        edge_groups.push(z(k));
    }
    GraphOfFiniteGroups::new(graph, vertex_groups, edge_groups, maps).unwrap()
}

fn is_hom(a: &FiniteGroup, b: &FiniteGroup, map: &[usize]) -> bool {
    map.len() == a.order()
        && (0..a.order()).all(|x| (0..a.order()).all(|y| map[a.mul(x, y)] == b.mul(map[x], map[y])))
}

/// Checks one datum end to end: the extension table satisfies the axioms,
/// has order `|pi||h|`, the identity and inverse formulas hold, the sequence
/// is exact, and regauging by `gamma` gives an isomorphic extension via the
/// stated map.
pub fn verify_extension(data: &ExtensionData, gamma: &[usize]) -> Result<(), String> {
    use anabel::gog::{schreier_extension, schreier_regauge, SchreierExtension};
    let ext = schreier_extension(data).map_err(|e| e.to_string())?;
    let e = &ext.group;
    let (n, m) = (data.pi.order(), data.h.order());
    check_axioms(e.table())?;
    if e.order() != n * m {
        return Err(format!("order {} for {n} x {m}", e.order()));
    }
    let id = SchreierExtension::expected_identity(data);
    if (0..e.order()).any(|a| e.mul(id, a) != a || e.mul(a, id) != a) {
        return Err("identity formula fails".into());
    }
    for a in 0..e.order() {
        let b = SchreierExtension::expected_inverse(data, a);
        if e.mul(a, b) != id || e.mul(b, a) != id {
            return Err(format!("inverse formula fails at {a}"));
        }
    }
    if !is_hom(&data.pi, e, &ext.embedding) || !is_hom(e, &data.h, &ext.projection) {
        return Err("maps are not homomorphisms".into());
    }
    let image: BTreeSet<usize> = ext.embedding.iter().copied().collect();
    let kernel: BTreeSet<usize> = (0..e.order())
        .filter(|&a| ext.projection[a] == data.h.identity())
        .collect();
    let onto: BTreeSet<usize> = ext.projection.iter().copied().collect();
    if image.len() != n || image != kernel || onto.len() != m {
        return Err("sequence is not exact".into());
    }
    let (new, iso) = schreier_regauge(data, gamma).map_err(|e| e.to_string())?;
    let ext2 = schreier_extension(&new).map_err(|e| e.to_string())?;
    check_axioms(ext2.group.table())?;
    if iso.iter().collect::<BTreeSet<_>>().len() != e.order() || !is_hom(e, &ext2.group, &iso) {
        return Err("regauge map is not an isomorphism".into());
    }
    Ok(())
}
