mod common;

use std::collections::{BTreeMap, BTreeSet};

use anabel::algebra::FgAbGroup;
use anabel::gog::{
    abelianized_pi1, abelianized_pi1_product_formula, gog_cover_from_graph_cover, pi1_presentation,
    pi1_presentation_default, schreier_extension, schreier_regauge, tempered_ab_profile,
    validate_gog_cover, CoverCheck, ExtensionData, FiniteGroup, GoGCover, GraphOfFiniteGroups,
    TemperedProfile,
};
use anabel::graphs::{enumerate_covers, BranchGraph};
use anabel_testkit::groups::{
    catalogue, check_axioms, extension_corpus, random_gog, verify_extension,
};
use num_bigint::BigInt;
use rand::Rng;

use common::{rng, TorsionProfile};

fn graph(n: usize, edges: &[&[usize]]) -> BranchGraph {
    BranchGraph::new(n, &edges.iter().map(|e| e.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn z(n: usize) -> FiniteGroup {
    FiniteGroup::cyclic(n).unwrap()
}

fn ab(free: usize, torsion: &[i64]) -> FgAbGroup {
    FgAbGroup::new(free, torsion.iter().map(|&d| BigInt::from(d)).collect()).unwrap()
}

fn z3_circle() -> GraphOfFiniteGroups {
    GraphOfFiniteGroups::new(
        graph(1, &[&[0, 0]]),
        vec![z(3)],
        vec![z(1)],
        vec![vec![0], vec![0]],
    )
    .unwrap()
}

#[test]
fn abelianization_examples() {
    let theta = GraphOfFiniteGroups::trivial(graph(2, &[&[0, 1], &[0, 1], &[0, 1]]));
    let p = pi1_presentation_default(&theta).unwrap();
    assert_eq!((p.generators.len(), p.relators.len()), (2, 0));
    assert_eq!(abelianized_pi1(&theta).unwrap(), FgAbGroup::free(2));

    let point = GraphOfFiniteGroups::new(graph(1, &[]), vec![z(3)], vec![], vec![]).unwrap();
    assert_eq!(abelianized_pi1(&point).unwrap(), ab(0, &[3]));
    assert_eq!(abelianized_pi1(&z3_circle()).unwrap(), ab(1, &[3]));
    assert_eq!(
        abelianized_pi1_product_formula(&z3_circle()).unwrap(),
        ab(1, &[3])
    );

    let two = GraphOfFiniteGroups::new(
        graph(2, &[&[0, 1]]),
        vec![z(2), z(2)],
        vec![z(1)],
        vec![vec![0], vec![0]],
    )
    .unwrap();
    assert_eq!(abelianized_pi1(&two).unwrap(), ab(0, &[2, 2]));

    // Z/4 *_{Z/2} Z/6
    let amalgam = GraphOfFiniteGroups::new(
        graph(2, &[&[0, 1]]),
        vec![z(4), z(6)],
        vec![z(2)],
        vec![vec![0, 2], vec![0, 3]],
    )
    .unwrap();
    assert_eq!(abelianized_pi1(&amalgam).unwrap(), ab(0, &[12]));

    // S3 vertex: abelianization Z/2
    let s3 = catalogue().into_iter().find(|(n, _)| n == "S3").unwrap().1;
    let v = GraphOfFiniteGroups::new(
        graph(1, &[&[0, 0]]),
        vec![s3],
        vec![z(1)],
        vec![vec![0], vec![0]],
    )
    .unwrap();
    assert_eq!(abelianized_pi1(&v).unwrap(), ab(1, &[2]));
}

#[test]
fn presentation_is_independent_of_the_tree() {
    let g = graph(3, &[&[0, 1], &[1, 2], &[2, 0], &[0, 1]]);
    let gog = GraphOfFiniteGroups::new(
        g.clone(),
        vec![z(2), z(4), z(3)],
        vec![z(1), z(1), z(1), z(2)],
        vec![
            vec![0],
            vec![0],
            vec![0],
            vec![0],
            vec![0],
            vec![0],
            vec![0, 1],
            vec![0, 2],
        ],
    )
    .unwrap();
    let mut results = BTreeSet::new();
    for tree in [[0usize, 1], [1, 2], [0, 2], [2, 3]] {
        let p = pi1_presentation(&gog, &tree.into_iter().collect()).unwrap();
        results.insert(format!("{:?}", p.abelianization()));
    }
    assert_eq!(results.len(), 1);
    // (Z/2 + Z/4) / (1, 2) is Z/4
    assert_eq!(abelianized_pi1(&gog).unwrap(), ab(2, &[12]));
}

#[test]
fn both_routes_match_enumeration_on_random_inputs() {
    let mut r = rng(5);
    for _ in 0..40 {
        let gog = random_gog(&mut r, 5);
        let a = abelianized_pi1(&gog).unwrap();
        let b = abelianized_pi1_product_formula(&gog).unwrap();
        assert_eq!(a, b, "{gog:?}");
        let (free, profile) = common::gog_abelianization_brute(&gog);
        assert_eq!(a.free_rank(), free);
        assert_eq!(free, gog.graph().cycle_rank());
        assert_eq!(TorsionProfile::of(&a), profile, "{gog:?}");
    }
}

#[test]
fn tempered_profiles() {
    let prof = |g, h| tempered_ab_profile(g, h, 3).unwrap();
    assert_eq!(
        prof(1, 1),
        TemperedProfile {
            free_rank: 1,
            pro_pprime_corank: 1
        }
    );
    assert_eq!(
        prof(2, 0),
        TemperedProfile {
            free_rank: 0,
            pro_pprime_corank: 4
        }
    );
    assert_eq!(
        prof(2, 2),
        TemperedProfile {
            free_rank: 2,
            pro_pprime_corank: 2
        }
    );
    assert!(tempered_ab_profile(1, 3, 3).is_err());
    assert!(tempered_ab_profile(1, 1, 4).is_err());
    for g in 0..5 {
        for h in 0..=2 * g {
            let p = prof(g, h);
            assert_eq!(p.free_rank + p.pro_pprime_corank, 2 * g);
        }
    }
}

#[test]
fn cover_validation() {
    // regular action of Z/3 on itself, glued to itself along the loop
    let regular: Vec<Vec<usize>> = (0..3)
        .map(|x| (0..3).map(|t| (x + t) % 3).collect())
        .collect();
    let circle = GraphOfFiniteGroups::new(
        graph(1, &[&[0, 0]]),
        vec![z(3)],
        vec![z(3)],
        vec![vec![0, 1, 2], vec![0, 1, 2]],
    )
    .unwrap();
    let s = GoGCover {
        actions: vec![regular.clone()],
        gluings: BTreeMap::from([(0, vec![1, 2, 0])]),
    };
    assert_eq!(
        validate_gog_cover(&circle, &s),
        CoverCheck::Pass {
            topological: false,
            degrees: vec![3]
        }
    );
    // a reflection does not commute with the action
    let bad = GoGCover {
        actions: vec![regular],
        gluings: BTreeMap::from([(0, vec![0, 2, 1])]),
    };
    assert!(matches!(
        validate_gog_cover(&circle, &bad),
        CoverCheck::Violations(_)
    ));

    let edge = GraphOfFiniteGroups::trivial(graph(2, &[&[0, 1]]));
    let uneven = GoGCover {
        actions: vec![vec![vec![0]], vec![vec![0, 1]]],
        gluings: BTreeMap::from([(0, vec![0])]),
    };
    assert!(matches!(
        validate_gog_cover(&edge, &uneven),
        CoverCheck::Violations(_)
    ));
    let trivial = GoGCover {
        actions: vec![vec![vec![0, 1]], vec![vec![0, 1]]],
        gluings: BTreeMap::from([(0, vec![1, 0])]),
    };
    assert_eq!(
        validate_gog_cover(&edge, &trivial),
        CoverCheck::Pass {
            topological: true,
            degrees: vec![2, 2]
        }
    );
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for i in 0..d {
            let mut q = p.clone();
            q.insert(i, d - 1);
            out.push(q);
        }
    }
    out
}

/// Isomorphism classes of topological covers of a trivial graph of groups:
/// gluing systems modulo relabeling the fiber over each vertex.
fn topological_cover_classes(g: &BranchGraph, d: usize) -> usize {
    let perms = permutations(d);
    let edges = g.true_edges();
    let nv = g.vertex_count();
    let mut classes = BTreeSet::new();
    let mut pick = vec![0; edges.len()];
    loop {
        let mut best: Option<Vec<Vec<usize>>> = None;
        let mut relabel = vec![0; nv];
        loop {
            let system: Vec<Vec<usize>> = edges
                .iter()
                .zip(&pick)
                .map(|(&e, &k)| {
                    let bs = g.edge_branches(e);
                    let (s1, s2) = (
                        &perms[relabel[g.branch(bs[0]).vertex]],
                        &perms[relabel[g.branch(bs[1]).vertex]],
                    );
                    // s2 . phi . s1^-1
                    let mut out = vec![0; d];
                    for t in 0..d {
                        out[s1[t]] = s2[perms[k][t]];
                    }
                    out
                })
                .collect();
            if best.as_ref().is_none_or(|b| system < *b) {
                best = Some(system);
            }
            let mut i = 0;
            while i < nv {
                relabel[i] += 1;
                if relabel[i] < perms.len() {
                    break;
                }
                relabel[i] = 0;
                i += 1;
            }
            if i == nv {
                break;
            }
        }
        classes.insert(best.unwrap());
        let mut i = 0;
        while i < pick.len() {
            pick[i] += 1;
            if pick[i] < perms.len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
        if i == pick.len() {
            break;
        }
    }
    classes.len()
}

#[test]
fn topological_covers_are_graph_covers() {
    let graphs = [
        graph(1, &[&[0, 0]]),
        graph(2, &[&[0, 1], &[0, 1], &[0, 1]]),
        graph(2, &[&[0, 1], &[1, 1], &[0]]),
        graph(3, &[&[0, 1], &[1, 2], &[2, 0]]),
    ];
    for g in &graphs {
        let gog = GraphOfFiniteGroups::trivial(g.clone());
        for d in 1..=3 {
            let covers = enumerate_covers(g, d).unwrap();
            for c in &covers {
                let s = gog_cover_from_graph_cover(c);
                assert_eq!(
                    validate_gog_cover(&gog, &s),
                    CoverCheck::Pass {
                        topological: true,
                        degrees: vec![d; g.vertex_count()]
                    }
                );
            }
            assert_eq!(
                covers.len(),
                topological_cover_classes(g, d),
                "{g:?} degree {d}"
            );
        }
    }
}

fn s3_data() -> ExtensionData {
    ExtensionData {
        pi: z(3),
        h: z(2),
        alpha: vec![vec![0, 1, 2], vec![0, 2, 1]],
        g: vec![vec![0, 0], vec![0, 0]],
    }
}

#[test]
fn schreier_examples() {
    let s3 = catalogue().into_iter().find(|(n, _)| n == "S3").unwrap().1;
    let ext = schreier_extension(&s3_data()).unwrap();
    assert_eq!(ext.group.order(), 6);
    assert!(!ext.group.is_abelian());
    assert!(ext.group.find_isomorphism(&s3).is_some());

    let z4 = ExtensionData {
        pi: z(2),
        h: z(2),
        alpha: vec![vec![0, 1]; 2],
        g: vec![vec![0, 0], vec![0, 1]],
    };
    let ext = schreier_extension(&z4).unwrap();
    let orders: BTreeSet<usize> = (0..4).map(|a| ext.group.element_order(a)).collect();
    assert!(orders.contains(&4));

    let direct = ExtensionData {
        pi: z(2),
        h: z(3),
        alpha: vec![vec![0, 1]; 3],
        g: vec![vec![0; 3]; 3],
    };
    let ext = schreier_extension(&direct).unwrap();
    assert!(ext
        .group
        .find_isomorphism(&z(2).direct_product(&z(3)).unwrap())
        .is_some());

    let mut broken = s3_data();
    broken.g[1][1] = 1;
    assert!(schreier_extension(&broken).is_err());
    let mut not_aut = s3_data();
    not_aut.alpha[1] = vec![0, 0, 0];
    assert!(schreier_extension(&not_aut).is_err());
}

#[test]
fn regauge_examples() {
    let data = s3_data();
    let (same, iso) = schreier_regauge(&data, &[0, 0]).unwrap();
    assert_eq!(same, data);
    assert_eq!(iso, (0..6).collect::<Vec<_>>());
    let ext = schreier_extension(&data).unwrap();
    for gamma in [[1, 2], [2, 0], [0, 1]] {
        let (new, _) = schreier_regauge(&data, &gamma).unwrap();
        let ext2 = schreier_extension(&new).unwrap();
        assert!(ext.group.find_isomorphism(&ext2.group).is_some());
        let inverse: Vec<usize> = gamma.iter().map(|&x| data.pi.inv(x)).collect();
        let (back, _) = schreier_regauge(&new, &inverse).unwrap();
        // gamma^-1 undoes gamma when pi is abelian
        assert_eq!(back, data);
    }
}

#[test]
fn every_small_extension_datum_checks_out() {
    let mut r = rng(6);
    let corpus = extension_corpus(12, 2_000_000);
    let mut count = 0;
    for (pn, hn, _, data) in &corpus {
        for d in data {
            let gamma: Vec<usize> = (0..d.h.order())
                .map(|_| r.gen_range(0..d.pi.order()))
                .collect();
            verify_extension(d, &gamma).unwrap_or_else(|e| panic!("{pn} by {hn}: {e}"));
            count += 1;
        }
    }
    assert!(count > 100);
}

#[test]
fn axiom_checker_rejects_non_groups() {
    assert!(check_axioms(z(5).table()).is_ok());
    assert!(check_axioms(&[vec![0, 1], vec![1, 1]]).is_err());
    // a Latin square that is not associative
    let quasi = vec![vec![0, 1, 2], vec![2, 0, 1], vec![1, 2, 0]];
    assert!(check_axioms(&quasi).is_err());
}
