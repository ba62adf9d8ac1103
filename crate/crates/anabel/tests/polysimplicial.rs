mod common;

use std::collections::{BTreeMap, BTreeSet};

use anabel::algebra::FgAbGroup;
use anabel::cospec::is_cospec_iso;
use anabel::graphs::BranchGraph;
use anabel::polysimplicial::{
    box_extend, box_product, circle, coequalizer, compose, folded_edge, from_faces, lambda_hom,
    LambdaMorphism, PolyIndex, PolyMorphism, PolysimplicialSet, StrataFunctor,
};
use num_rational::BigRational;

use common::hom_by_triples;

fn idx(t: &[usize]) -> PolyIndex {
    PolyIndex::new(t).unwrap()
}

fn small_indices() -> Vec<PolyIndex> {
    [&[0][..], &[1], &[2], &[1, 1], &[2, 1], &[1, 1, 1]]
        .iter()
        .map(|t| idx(t))
        .collect()
}

#[test]
fn hom_sets_match_triple_enumeration() {
    assert_eq!(lambda_hom(&idx(&[1]), &idx(&[1])).len(), 4);
    assert_eq!(lambda_hom(&idx(&[0]), &idx(&[1])).len(), 2);
    assert_eq!(lambda_hom(&idx(&[0]), &idx(&[0])).len(), 1);
    for m in small_indices() {
        for n in small_indices() {
            let got: BTreeSet<Vec<Vec<usize>>> = lambda_hom(&m, &n)
                .iter()
                .map(LambdaMorphism::table)
                .collect();
            assert_eq!(
                got.len(),
                lambda_hom(&m, &n).len(),
                "duplicates in Hom({m}, {n})"
            );
            assert_eq!(got, hom_by_triples(&m, &n), "Hom({m}, {n})");
        }
    }
}

#[test]
fn hom_sets_are_closed_under_composition() {
    let ids = [idx(&[0]), idx(&[1]), idx(&[2]), idx(&[1, 1])];
    for a in &ids {
        for b in &ids {
            for c in &ids {
                let ac: BTreeSet<Vec<Vec<usize>>> =
                    lambda_hom(a, c).iter().map(LambdaMorphism::table).collect();
                for g1 in lambda_hom(a, b) {
                    for g2 in lambda_hom(b, c) {
                        assert!(ac.contains(&compose(&g2, &g1).unwrap().table()));
                    }
                }
            }
        }
    }
}

#[test]
fn composition_examples() {
    let e = idx(&[1]);
    let flip = LambdaMorphism::from_triple(&e, &e, &[0], &[0], &[vec![1, 0]]).unwrap();
    let id = LambdaMorphism::identity(&e);
    assert_eq!(compose(&id, &flip).unwrap(), flip);
    assert_eq!(compose(&flip, &flip).unwrap(), id);
    let c0 = LambdaMorphism::constant(&e, &e, &[0]);
    for g in lambda_hom(&e, &e) {
        assert_eq!(compose(&c0, &g).unwrap().table(), c0.table());
    }
}

#[test]
fn nondegenerate_cells_and_strata() {
    let edge = PolysimplicialSet::representable(&idx(&[1]));
    let nd = edge.nondegenerate_cells();
    assert_eq!(nd[&idx(&[1])].len(), 1);
    assert_eq!(nd[&idx(&[0])].len(), 2);
    assert_eq!(
        PolysimplicialSet::representable(&idx(&[0])).nondegenerate_cells()[&idx(&[0])].len(),
        1
    );
    let p = edge.strata_poset();
    assert_eq!((p.len(), p.minimal().len(), p.maximal().len()), (3, 2, 1));

    let two = PolysimplicialSet::point().disjoint_union(&PolysimplicialSet::point());
    let p = two.strata_poset();
    assert_eq!(p.len(), 2);
    assert!(!p.le[0][1] && !p.le[1][0]);

    let sq = PolysimplicialSet::representable(&idx(&[1, 1]));
    assert_eq!(sq.strata_poset().len(), 9);
}

#[test]
fn interior_freeness() {
    for t in small_indices() {
        assert!(
            PolysimplicialSet::representable(&t).is_interiorly_free(),
            "{t}"
        );
    }
    assert!(!folded_edge().is_interiorly_free());
    assert!(PolysimplicialSet::point().is_interiorly_free());
}

fn level_counts(c: &PolysimplicialSet) -> BTreeMap<PolyIndex, usize> {
    c.nondegenerate_cells()
        .into_iter()
        .map(|(k, v)| (k, v.len()))
        .collect()
}

#[test]
fn box_products() {
    let e = PolysimplicialSet::representable(&idx(&[1]));
    let sq = box_product(&e, &e);
    assert_eq!(sq.generators(), &[idx(&[1, 1])]);
    assert_eq!(
        level_counts(&sq),
        level_counts(&PolysimplicialSet::representable(&idx(&[1, 1])))
    );
    for c in [circle(), folded_edge(), e.clone()] {
        let cp = box_product(&c, &PolysimplicialSet::point());
        assert_eq!(level_counts(&cp), level_counts(&c));
    }
}

fn chi_corpus() -> Vec<PolysimplicialSet> {
    vec![
        PolysimplicialSet::point(),
        PolysimplicialSet::representable(&idx(&[1])),
        PolysimplicialSet::representable(&idx(&[2])),
        circle(),
        folded_edge(),
        PolysimplicialSet::point().disjoint_union(&circle()),
    ]
}

#[test]
fn euler_characteristic_is_multiplicative() {
    let corpus = chi_corpus();
    let mut pairs = 0;
    for (i, a) in corpus.iter().enumerate() {
        for b in &corpus[i..] {
            let prod = box_product(a, b);
            let expect: BigRational = a.euler_characteristic() * b.euler_characteristic();
            assert_eq!(
                prod.euler_characteristic(),
                expect,
                "pair {i} {:?}",
                level_counts(b)
            );
            pairs += 1;
        }
    }
    assert!(pairs >= 10);
}

#[test]
fn box_extensions() {
    let c = circle();
    let poset = c.normalize().strata_poset();
    let one = box_extend(&c, &StrataFunctor::constant(&poset, 1)).unwrap();
    assert_eq!(level_counts(&one.set), level_counts(&c));

    let three = box_extend(&c, &StrataFunctor::constant(&poset, 3)).unwrap();
    assert_eq!(three.set.components().len(), 3);
    for (k, n) in level_counts(&three.set) {
        assert_eq!(n, 3 * level_counts(&c)[&k]);
    }
}

#[test]
fn extension_strata_biject_with_functor_values() {
    let e = PolysimplicialSet::representable(&idx(&[1, 1]));
    let base = e.normalize();
    let poset = base.strata_poset();
    // two elements on the open square, one on everything else
    let top = poset.maximal()[0];
    let mut values = vec![1; poset.len()];
    values[top] = 2;
    let mut restrictions = BTreeMap::new();
    for s in 0..poset.len() {
        if s != top && poset.le[s][top] {
            restrictions.insert((s, top), vec![0, 0]);
        }
        for t in 0..poset.len() {
            if s != t && t != top && poset.le[s][t] {
                restrictions.insert((s, t), vec![0]);
            }
        }
    }
    let d = StrataFunctor {
        values: values.clone(),
        restrictions,
    };
    let ext = box_extend(&e, &d).unwrap();
    assert_eq!(ext.set.strata_poset().len(), values.iter().sum::<usize>());
    // labels are exactly the pairs (stratum generator, element)
    let labels: BTreeSet<(usize, usize)> = ext.labels.iter().copied().collect();
    assert_eq!(labels.len(), ext.labels.len());
}

#[test]
fn coequalizers() {
    let e = PolysimplicialSet::representable(&idx(&[1]));
    let pt = PolysimplicialSet::point();
    let ends = e.cells_at(&PolyIndex::point()).to_vec();
    let f = PolyMorphism::new(&pt, &e, vec![ends[0]]).unwrap();
    let same = coequalizer(&f, &f).unwrap();
    assert_eq!(level_counts(&same), level_counts(&e));
    let g = PolyMorphism::new(&pt, &e, vec![ends[1]]).unwrap();
    let c = coequalizer(&f, &g).unwrap();
    assert_eq!(
        level_counts(&c),
        BTreeMap::from([(idx(&[0]), 1), (idx(&[1]), 1)])
    );
    let empty = PolysimplicialSet::empty();
    let z = PolyMorphism::new(&empty, &e, vec![]).unwrap();
    assert_eq!(
        level_counts(&coequalizer(&z, &z).unwrap()),
        level_counts(&e)
    );
}

fn pi1_ab(c: &PolysimplicialSet) -> FgAbGroup {
    let base = c.nondegenerate_cells()[&PolyIndex::point()][0];
    c.category_pi1(base).unwrap().abelianization()
}

/// Polysimplicial set of a graph: one (0)-cell per vertex, one (1)-cell per edge.
fn graph_complex(g: &BranchGraph) -> PolysimplicialSet {
    let e = idx(&[1]);
    let v = PolyIndex::point();
    let mut cells = vec![v.clone(); g.vertex_count()];
    let mut faces = Vec::new();
    for k in 0..g.edge_count() {
        cells.push(e.clone());
        let ends = g.endpoints(k);
        for (i, &w) in ends.iter().enumerate() {
            faces.push((
                (g.vertex_count() + k, LambdaMorphism::constant(&v, &e, &[i])),
                (w, LambdaMorphism::identity(&v)),
            ));
        }
    }
    from_faces(cells, faces).unwrap()
}

#[test]
fn fundamental_groups() {
    for t in small_indices() {
        let c = PolysimplicialSet::representable(&t);
        let p = c.category_pi1(c.generator_cell(0)).unwrap();
        assert!(p.abelianization().is_trivial(), "{t}");
        assert!(p.simplify(10_000).generators.is_empty(), "{t}");
    }
    let p = circle()
        .category_pi1(circle().nondegenerate_cells()[&PolyIndex::point()][0])
        .unwrap();
    let s = p.simplify(10_000);
    assert_eq!(s.generators.len(), 1);
    assert!(s.relators.is_empty());

    // wedge of two circles
    let two = circle().disjoint_union(&circle());
    let pt = PolysimplicialSet::point();
    let vs = two.nondegenerate_cells()[&PolyIndex::point()].clone();
    let f = PolyMorphism::new(&pt, &two, vec![vs[0]]).unwrap();
    let g = PolyMorphism::new(&pt, &two, vec![vs[1]]).unwrap();
    assert_eq!(pi1_ab(&coequalizer(&f, &g).unwrap()), FgAbGroup::free(2));
}

#[test]
fn graph_complexes_have_the_cycle_rank() {
    let graphs = [
        BranchGraph::new(2, &[vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap(),
        BranchGraph::new(3, &[vec![0, 1], vec![1, 2], vec![2, 0], vec![0, 0]]).unwrap(),
        BranchGraph::new(4, &[vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap(),
        BranchGraph::new(1, &[vec![0, 0], vec![0, 0], vec![0, 0]]).unwrap(),
    ];
    for g in &graphs {
        let c = graph_complex(g);
        assert_eq!(pi1_ab(&c), FgAbGroup::free(g.cycle_rank()));
    }
}

#[test]
fn iso_criterion_both_directions() {
    // flip of an edge: an isomorphism with verified inverse
    let e = PolysimplicialSet::representable(&idx(&[1]));
    let flip =
        LambdaMorphism::from_triple(&idx(&[1]), &idx(&[1]), &[0], &[0], &[vec![1, 0]]).unwrap();
    let m = PolyMorphism::new(&e, &e, vec![e.cell_of(0, &flip).unwrap()]).unwrap();
    let r = is_cospec_iso(&m);
    assert!(r.nondegenerate_to_nondegenerate && r.strata_bijective && r.target_interiorly_free);
    assert!(r.is_iso());
    let inv = PolyMorphism::new(&e, &e, r.inverse.unwrap()).unwrap();
    assert!(m.then(&inv).agrees_with(&PolyMorphism::identity(&e)));

    // the square is its own box product; identity is iso
    let sq = PolysimplicialSet::representable(&idx(&[1, 1]));
    assert!(is_cospec_iso(&PolyMorphism::identity(&sq)).is_iso());

    // edge onto the circle: nondegenerate to nondegenerate, not bijective on strata
    let c = circle();
    let top = c.nondegenerate_cells()[&idx(&[1])][0];
    let m = PolyMorphism::new(&e, &c, vec![top]).unwrap();
    let r = is_cospec_iso(&m);
    assert!(
        r.nondegenerate_to_nondegenerate && !r.strata_bijective && !r.is_iso(),
        "{r:?}"
    );
}
