//! Shared corpus for the integration suites.
#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::Arc;

use dblinst::collage::{close_collage, copresheaf_to_instance, Copresheaf, FinCategory};
use dblinst::elements::elements;
use dblinst::instance::{empty_instance, terminal_instance, Instance};
use dblinst::io::{emit_fixture, feedback_graph, Document};
use dblinst::span_model::{category_model, terminal_model, truncated_signed_category, walking_signed_loop, SignedGraph, SpanModel};
use dblinst::theory_core::{builtin_theory, Builtin, DoubleTheory};
use dblinst::Config;

pub const BOUND: usize = 12;

pub fn cfg() -> Config {
    Config::default()
}

pub fn theory(b: Builtin) -> Arc<DoubleTheory> {
    Arc::new(builtin_theory(b))
}

pub fn fixture(name: &str, i: usize) -> Document {
    emit_fixture(name, &cfg()).unwrap().documents[i].1.clone()
}

pub fn fixture_model(name: &str, i: usize) -> Arc<SpanModel> {
    match fixture(name, i) {
        Document::Model(x) => x,
        Document::Instance(h) => h.model.clone(),
        d => panic!("{name} is a {}", d.kind()),
    }
}

pub fn fixture_instance(name: &str, i: usize) -> Arc<Instance> {
    match fixture(name, i) {
        Document::Instance(h) => h,
        d => panic!("{name} is a {}", d.kind()),
    }
}

/// `B(Z/n)` with morphisms named by residues.
pub fn cyclic_group(n: usize) -> FinCategory {
    let homs = (0..n).map(|a| (a.to_string(), 0, 0)).collect();
    FinCategory::from_table(vec!["*".into()], homs, vec![0], |a, b| (a + b) % n)
}

/// The walking arrow `a → b`.
pub fn arrow_category() -> FinCategory {
    let homs = vec![("1a".into(), 0, 0), ("u".into(), 0, 1), ("1b".into(), 1, 1)];
    FinCategory::from_table(vec!["a".into(), "b".into()], homs, vec![0, 2], |f, g| if f == 1 || g == 1 { 1 } else { f })
}

/// Two objects with a pair of parallel arrows.
pub fn parallel_pair() -> FinCategory {
    let homs = vec![("1a".into(), 0, 0), ("s".into(), 0, 1), ("t".into(), 0, 1), ("1b".into(), 1, 1)];
    FinCategory::from_table(vec!["a".into(), "b".into()], homs, vec![0, 3], |f, g| if f == 0 { g } else { f })
}

/// The instance corresponding to the representable copresheaf at the
/// `i`-th object of the collage.
pub fn representable(x: &Arc<SpanModel>, i: usize) -> Arc<Instance> {
    let cc = close_collage(x, BOUND).unwrap();
    let p = Copresheaf::representable(&cc.category, i % cc.category.num_objects());
    Arc::new(copresheaf_to_instance(&p, &cc).unwrap())
}

pub fn num_collage_objects(x: &Arc<SpanModel>) -> usize {
    close_collage(x, BOUND).unwrap().category.num_objects()
}

pub fn size(h: &Instance) -> usize {
    h.carriers.iter().map(|c| c.len()).sum()
}

pub struct Entry {
    pub theory: Builtin,
    pub models: Vec<Arc<SpanModel>>,
}

/// Five theories, three or more models each.
pub fn corpus() -> Vec<Entry> {
    let with_elements = |b: Builtin, mut models: Vec<Arc<SpanModel>>| {
        let one = Arc::new(terminal_model(&theory(b)));
        let n = num_collage_objects(&one);
        models.push(one.clone());
        models.push(elements(&representable(&one, 0)).unwrap().model);
        models.push(elements(&representable(&one, n - 1)).unwrap().model);
        Entry { theory: b, models }
    };
    let t = theory(Builtin::Terminal);
    vec![
        Entry {
            theory: Builtin::Terminal,
            models: vec![
                Arc::new(terminal_model(&t)),
                Arc::new(category_model(&t, &cyclic_group(2)).unwrap()),
                Arc::new(category_model(&t, &arrow_category()).unwrap()),
                Arc::new(category_model(&t, &parallel_pair()).unwrap()),
            ],
        },
        with_elements(Builtin::WalkingLoose, vec![fixture_model("profunctor_instance", 1), fixture_model("weighted_graph", 0)]),
        with_elements(Builtin::WalkingTight, vec![fixture_model("functor_instance", 1)]),
        with_elements(Builtin::WalkingSquare, vec![]),
        Entry {
            theory: Builtin::Signed,
            models: vec![
                Arc::new(walking_signed_loop(true, 2).unwrap()),
                Arc::new(walking_signed_loop(false, 2).unwrap()),
                Arc::new(truncated_signed_category(&feedback_graph(), 2).unwrap()),
            ],
        },
    ]
}

/// Two representables, the terminal and the empty instance.
pub fn instances(x: &Arc<SpanModel>) -> Vec<Arc<Instance>> {
    let n = num_collage_objects(x);
    let mut out = vec![representable(x, 0)];
    if n > 1 {
        out.push(representable(x, n - 1));
    }
    out.push(Arc::new(terminal_instance(x)));
    out.push(Arc::new(empty_instance(x)));
    out
}

/// `(negative, positive)` loop counts from walks in the graph: walks of
/// length `1..=L` (`0..=L` for positive, counting the identity), plus one
/// per vertex that also has a longer closed walk of that sign.
pub fn signed_cycle_oracle(g: &SignedGraph, l: usize) -> (usize, usize) {
    let n = g.vertices.len();
    let vix = |v: &str| g.vertices.iter().position(|w| w == v).unwrap();
    let edges: Vec<(usize, usize, bool)> = g.edges.iter().map(|e| (vix(&e.src), vix(&e.dst), e.negative)).collect();
    let mut neg = 0;
    let mut pos = n;
    for w in 0..n {
        // Depth-first enumeration of walks from w.
        let mut stack = vec![(w, 0usize, false)];
        while let Some((v, len, sign)) = stack.pop() {
            if len > 0 && v == w {
                if sign {
                    neg += 1;
                } else {
                    pos += 1;
                }
            }
            if len < l {
                for &(a, b, s) in &edges {
                    if a == v {
                        stack.push((b, len + 1, sign ^ s));
                    }
                }
            }
        }
        // States (vertex, sign) reachable at each exact length; a longer
        // walk of a sign exists iff one of length L+1..=L+2n does.
        let mut reach: HashSet<(usize, bool)> = [(w, false)].into();
        let (mut long_neg, mut long_pos) = (false, false);
        for len in 1..=l + 2 * n {
            reach = reach.iter().flat_map(|&(v, s)| edges.iter().filter(move |e| e.0 == v).map(move |e| (e.1, s ^ e.2))).collect();
            if len > l {
                long_neg |= reach.contains(&(w, true));
                long_pos |= reach.contains(&(w, false));
            }
        }
        neg += long_neg as usize;
        pos += long_pos as usize;
    }
    (neg, pos)
}
