//! Randomized invariants over the shared corpus.

mod common;

use std::sync::Arc;

use common::*;
use dblinst::collage::{close_collage, copresheaf_to_instance, enumerate_natural_transformations, instance_to_copresheaf, Copresheaf};
use dblinst::elements::{elements, is_discrete_opfibration, nabla};
use dblinst::instance::{count_instance_morphisms, Instance, InstanceMorphism};
use dblinst::io::{Document, Loader};
use dblinst::sketch::{flatten_theory, model_to_sketch_model, sketch_model_to_model};
use dblinst::span_model::{enumerate_model_morphisms, truncated_signed_category, walking_signed_loop, MorphismFilter, SignedGraph, SpanModel};
use dblinst::FiniteSet;
use proptest::prelude::*;

fn model(pick: usize) -> Arc<SpanModel> {
    let models: Vec<_> = corpus().into_iter().flat_map(|e| e.models).collect();
    models[pick % models.len()].clone()
}

/// The coproduct of representables at the given collage objects.
fn sum_of_representables(x: &Arc<SpanModel>, at: &[usize]) -> Arc<Instance> {
    let cc = close_collage(x, BOUND).unwrap();
    let c = &cc.category;
    let reps: Vec<Copresheaf> = at.iter().map(|&i| Copresheaf::representable(c, i % c.num_objects())).collect();
    let mut sets = Vec::new();
    let mut maps = vec![Vec::new(); c.num_morphisms()];
    for o in 0..c.num_objects() {
        let labels: Vec<String> = reps.iter().enumerate().flat_map(|(k, r)| r.sets[o].labels().iter().map(move |l| format!("{k}.{l}"))).collect();
        sets.push(FiniteSet::from_labels(labels));
    }
    for (f, m) in c.morphisms.iter().enumerate() {
        let mut offset = (0, 0);
        for r in &reps {
            maps[f].extend(r.maps[f].iter().map(|&v| v + offset.1));
            offset = (offset.0 + r.sets[m.src].len(), offset.1 + r.sets[m.dst].len());
        }
    }
    let p = Copresheaf { base: c.clone(), sets, maps };
    assert!(p.validate().is_ok());
    Arc::new(copresheaf_to_instance(&p, &cc).unwrap())
}

fn random_instance() -> impl Strategy<Value = Arc<Instance>> {
    (0usize..64, prop::collection::vec(0usize..8, 0..3)).prop_map(|(m, at)| sum_of_representables(&model(m), &at))
}

fn identity_components(h: &Instance) -> Vec<Vec<usize>> {
    h.carriers.iter().map(|c| (0..c.len()).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nabla_of_elements_is_the_instance(p in random_instance()) {
        let el = elements(&p).unwrap();
        let back = Arc::new(nabla(&el.projection, &el.witness).unwrap());
        let unit = InstanceMorphism { source: back, target: p.clone(), components: identity_components(&p) };
        prop_assert!(unit.validate().is_ok());
        prop_assert!(unit.is_isomorphism());
    }

    #[test]
    fn element_projections_are_dopfs(p in random_instance()) {
        let el = elements(&p).unwrap();
        prop_assert!(is_discrete_opfibration(&el.projection).is_ok());
    }

    #[test]
    fn copresheaf_round_trip_is_exact(p in random_instance()) {
        let cc = close_collage(&p.model, BOUND).unwrap();
        let q = instance_to_copresheaf(&p, &cc).unwrap();
        prop_assert_eq!(&copresheaf_to_instance(&q, &cc).unwrap(), &*p);
    }

    #[test]
    fn json_round_trip_is_stable(p in random_instance()) {
        let text = Document::Instance(p.clone()).to_json();
        let Document::Instance(back) = Loader::default().parse_str(&text, ".").unwrap() else { panic!("not an instance") };
        prop_assert_eq!(&*back, &*p);
        prop_assert_eq!(Document::Instance(back).to_json(), text);
    }

    #[test]
    fn hom_counts_agree_with_natural_transformations(m in 0usize..64, a in prop::collection::vec(0usize..8, 0..3), b in prop::collection::vec(0usize..8, 0..3)) {
        let x = model(m);
        let (h, k) = (sum_of_representables(&x, &a), sum_of_representables(&x, &b));
        prop_assume!(size(&h) + size(&k) <= 10);
        let cc = close_collage(&x, BOUND).unwrap();
        let (p, q) = (instance_to_copresheaf(&h, &cc).unwrap(), instance_to_copresheaf(&k, &cc).unwrap());
        let n = count_instance_morphisms(&h, &k, 100_000).unwrap();
        prop_assert_eq!(n, enumerate_natural_transformations(&p, &q, 100_000).unwrap().len());
    }

    #[test]
    fn elements_models_flatten_and_return(p in random_instance()) {
        let el = elements(&p).unwrap();
        let s = Arc::new(flatten_theory(&el.model.theory));
        let sm = model_to_sketch_model(&el.model, &s).unwrap();
        prop_assert_eq!(&sketch_model_to_model(&sm).unwrap(), &*el.model);
    }

    #[test]
    fn loop_counts_match_walks(edges in prop::collection::vec((0usize..3, 0usize..3, any::<bool>()), 0..5), l in 1usize..4) {
        let names: Vec<String> = (0..edges.len()).map(|i| format!("e{i}")).collect();
        let vs = ["a", "b", "c"];
        let es: Vec<(&str, &str, &str, bool)> = edges.iter().zip(&names).map(|(&(s, d, neg), n)| (n.as_str(), vs[s], vs[d], neg)).collect();
        let g = SignedGraph::new(&vs, &es);
        let x = Arc::new(truncated_signed_category(&g, l).unwrap());
        let count = |neg: bool| enumerate_model_morphisms(&Arc::new(walking_signed_loop(neg, l).unwrap()), &x, &MorphismFilter::default(), 100_000).unwrap().len();
        prop_assert_eq!((count(true), count(false)), signed_cycle_oracle(&g, l));
    }
}
