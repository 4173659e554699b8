//! Independent oracles: classical facts and counts worked out by hand.

mod common;

use std::sync::Arc;

use common::*;
use dblinst::collage::{close_collage, collage_of_morphism, enumerate_functors, instance_to_copresheaf};
use dblinst::elements::elements;
use dblinst::instance::{count_instance_morphisms, find_instance_isomorphism, terminal_instance, validate_instance};
use dblinst::io::{cyclic_spherical_model, feedback_graph, SIGNED_BOUND};
use dblinst::migration::{comprehensive_factorize, Migration};
use dblinst::span_model::{category_model, enumerate_model_morphisms, terminal_model, truncated_signed_category, walking_signed_loop, MorphismFilter, SpanModel};
use dblinst::theory_core::Builtin;

fn cat(c: dblinst::collage::FinCategory) -> Arc<SpanModel> {
    Arc::new(category_model(&theory(Builtin::Terminal), &c).unwrap())
}

fn functors(a: &Arc<SpanModel>, b: &Arc<SpanModel>) -> usize {
    enumerate_model_morphisms(a, b, &MorphismFilter::default(), 10_000).unwrap().len()
}

#[test]
fn functor_counts_between_small_categories() {
    let (z2, z4, arrow, pair) = (cat(cyclic_group(2)), cat(cyclic_group(4)), cat(arrow_category()), cat(parallel_pair()));
    // Hom(Z/m, Z/n) has gcd(m, n) elements; monotone maps of the 2-chain;
    // the parallel pair collapses onto either end or onto the arrow.
    assert_eq!(functors(&z2, &z2), 2);
    assert_eq!(functors(&z4, &z2), 2);
    assert_eq!(functors(&z4, &z4), 4);
    assert_eq!(functors(&arrow, &z2), 2);
    assert_eq!(functors(&z2, &arrow), 2);
    assert_eq!(functors(&arrow, &arrow), 3);
    assert_eq!(functors(&pair, &arrow), 3);
    assert_eq!(functors(&arrow, &pair), 4);
}

#[test]
fn yoneda_counts() {
    // Hom(y(c), P) ≅ P(c) for every collage object c.
    for entry in corpus() {
        for x in &entry.models {
            let cc = close_collage(x, BOUND).unwrap();
            for p in instances(x) {
                let sets = instance_to_copresheaf(&p, &cc).unwrap().sets;
                for c in 0..cc.category.num_objects() {
                    let n = count_instance_morphisms(&representable(x, c), &p, 100_000).unwrap();
                    assert_eq!(n, sets[c].len(), "{:?} object {c}", entry.theory);
                }
            }
        }
    }
}

#[test]
fn profunctor_instance_by_hand() {
    let p = fixture_instance("profunctor_instance", 0);
    // x ↦ x is forced, y2 may go to y1 or stay, and w2 follows y2.
    assert_eq!(count_instance_morphisms(&p, &p, 100).unwrap(), 2);
    // Global sections: the collage a → b → z has a as initial object.
    assert_eq!(count_instance_morphisms(&Arc::new(terminal_instance(&p.model)), &p, 100).unwrap(), 1);
    assert_eq!(count_instance_morphisms(&p, &Arc::new(terminal_instance(&p.model)), 100).unwrap(), 1);
    let el = elements(&p).unwrap();
    let sizes: Vec<usize> = el.model.on_objects.iter().map(|s| s.len()).collect();
    assert_eq!(sizes, vec![3, 2]);
    assert!(validate_instance(&p).is_ok());
}

#[test]
fn weighted_graph_elements_by_hand() {
    let h = fixture_instance("weighted_graph", 1);
    let el = elements(&h).unwrap();
    let sizes: Vec<usize> = el.model.on_objects.iter().map(|s| s.len()).collect();
    assert_eq!(sizes, vec![4, 2]);
    // Elements of the identity span: e1, e2 with id, s, t and v1, v2 with id.
    assert_eq!(el.model.on_loose[0].len(), 8);
    assert_eq!(el.model.on_loose[1].len(), 2);
}

#[test]
fn left_extension_along_an_element_projection_recovers_the_instance() {
    // Σ_π 1 ≅ P for π: ∫P → B.
    let cfg = cfg();
    for name in ["profunctor_instance", "weighted_graph", "functor_instance"] {
        let i = if name == "weighted_graph" { 1 } else { 0 };
        let p = fixture_instance(name, i);
        let el = elements(&p).unwrap();
        let one = terminal_instance(&el.model);
        let sigma = Arc::new(Migration::new(&el.projection, &cfg).unwrap().lan(&one).unwrap());
        assert!(find_instance_isomorphism(&sigma, &p).is_some(), "{name}");
    }
}

#[test]
fn factorization_through_the_point_counts_components() {
    // Factoring C → 1 gives the set of connected components of C.
    let cfg = cfg();
    let t = theory(Builtin::Terminal);
    let one = Arc::new(terminal_model(&t));
    let discrete = dblinst::collage::FinCategory::from_table(vec!["a".into(), "b".into()], vec![("1a".into(), 0, 0), ("1b".into(), 1, 1)], vec![0, 1], |f, _| f);
    for (c, comps) in [(cat(cyclic_group(2)), 1), (cat(arrow_category()), 1), (cat(parallel_pair()), 1), (cat(discrete), 2), (Arc::new(terminal_model(&t)), 1)] {
        let f = enumerate_model_morphisms(&c, &one, &MorphismFilter::default(), 10).unwrap().remove(0);
        let fact = comprehensive_factorize(&f, &cfg).unwrap();
        assert_eq!(size(&fact.instance), comps);
    }
}

#[test]
fn feedback_loops_of_the_example_graph() {
    // a ⇄ b with g: b → a negative, and a positive 2-cycle b ⇄ c. The
    // graph is bipartite, so closed walks of length ≤ 3 have length 0 or 2:
    // negative aba, bab; positive identities at a, b, c and bcb, cbc. Each
    // vertex also has longer closed walks of both signs (abcba is negative).
    // Negative 2 + 3, positive 5 + 3.
    let g = feedback_graph();
    let x = Arc::new(truncated_signed_category(&g, SIGNED_BOUND).unwrap());
    let neg = Arc::new(walking_signed_loop(true, SIGNED_BOUND).unwrap());
    let pos = Arc::new(walking_signed_loop(false, SIGNED_BOUND).unwrap());
    assert_eq!(functors(&neg, &x), 5);
    assert_eq!(functors(&pos, &x), 8);
}

#[test]
fn collage_on_the_spherical_pair() {
    // Group maps must commute with α: h ↦ h + q. From (Z/2, 0) into
    // (Z/4, 2) that forces f(h) = f(h) + 2, so there are none; the other
    // way both maps Z/4 → Z/2 commute. Both collages are B(Z/2).
    let cfg = cfg();
    let z2 = Arc::new(cyclic_spherical_model(2, 0, &cfg).unwrap());
    let z4 = Arc::new(cyclic_spherical_model(4, 2, &cfg).unwrap());
    assert_eq!(functors(&z2, &z4), 0);
    let (c2, c4) = (close_collage(&z2, BOUND).unwrap(), close_collage(&z4, BOUND).unwrap());
    assert_eq!(enumerate_functors(&c2.category, &c4.category, 100).unwrap().len(), 2);

    let down = enumerate_model_morphisms(&z4, &z2, &MorphismFilter::default(), 100).unwrap();
    assert_eq!(down.len(), 2);
    let images: Vec<_> = down.iter().map(|f| collage_of_morphism(f, &c4, &c2).unwrap().on_morphisms).collect();
    assert_ne!(images[0], images[1]);
}
