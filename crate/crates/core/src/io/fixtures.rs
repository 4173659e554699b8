//! Named example documents.

use std::sync::Arc;

use serde_json::{json, Value};

use super::{Document, Loader, Map};
use crate::cartesian::{binary_multicategory, parity_multicategory, terminal_multicategory, Multicategory, Multifunctor};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::finset::FiniteSet;
use crate::span_model::{truncated_signed_category, walking_signed_loop, ModelMorphism, SignedGraph, SpanModel};
use crate::theory_core::{builtin_theory, close_presentation, Builtin, CellTerm, DoubleTheory, GenCell, TheoryPresentation};

/// Documents to be written as `<file>.json`; the first one is named after
/// the fixture.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub documents: Vec<(String, Document)>,
}

impl Fixture {
    pub fn primary(&self) -> &Document {
        &self.documents[0].1
    }
}

const NAMES: &[&str] = &[
    "terminal",
    "walking_loose",
    "walking_tight",
    "walking_square",
    "signed",
    "monad_trunc_2",
    "prom_trunc_2",
    "sq_finset_op_2",
    "weighted_graph",
    "profunctor_instance",
    "functor_instance",
    "monad_instance",
    "negloop1",
    "posloop1",
    "signed_model",
    "terminal_multicategory",
    "monoid_multicategory",
    "free_binary_multicategory",
    "parity_multicategory",
    "parity_multifunctor",
    "z4_spherical",
];

pub fn fixture_names() -> &'static [&'static str] {
    NAMES
}

/// Truncation used by the signed fixtures.
pub const SIGNED_BOUND: usize = 3;

fn file_name(s: &str) -> String {
    s.chars().map(|c| if c.is_alphanumeric() || c == '_' { c } else { '_' }).collect::<String>().trim_end_matches('_').to_string()
}

fn parse(v: Value) -> Result<Document> {
    Loader::default().parse(&v)
}

fn model(v: Value) -> Result<Arc<SpanModel>> {
    match parse(v)? {
        Document::Model(x) => Ok(x),
        _ => unreachable!("fixture is a model"),
    }
}

pub fn emit_fixture(name: &str, cfg: &Config) -> Result<Fixture> {
    let one = |d: Document| Ok(Fixture { name: name.to_string(), documents: vec![(name.to_string(), d)] });
    let builtin = Builtin::parse(name).or_else(|| {
        // `monad_trunc_2` for `monad_trunc(2)`.
        let (head, k) = name.rsplit_once('_')?;
        Builtin::parse(&format!("{head}({k})"))
    });
    if let Some(b) = builtin {
        let file = file_name(&b.name());
        return Ok(Fixture { name: file.clone(), documents: vec![(file, Document::Theory(Arc::new(builtin_theory(b))))] });
    }
    match name {
        "weighted_graph" => {
            let x = weighted_graph_model()?;
            let h = parse(weighted_graph_instance(&x))?;
            Ok(Fixture { name: name.into(), documents: vec![(name.into(), Document::Model(x)), ("weighted_graph_instance".into(), h)] })
        }
        "profunctor_instance" => with_model(name, parse(profunctor_instance())?),
        "functor_instance" => with_model(name, parse(functor_instance())?),
        "monad_instance" => with_model(name, parse(monad_instance())?),
        "negloop1" => one(Document::Model(Arc::new(walking_signed_loop(true, SIGNED_BOUND)?))),
        "posloop1" => one(Document::Model(Arc::new(walking_signed_loop(false, SIGNED_BOUND)?))),
        "signed_model" => {
            let g = feedback_graph();
            let x = truncated_signed_category(&g, SIGNED_BOUND)?;
            Ok(Fixture { name: name.into(), documents: vec![(name.into(), Document::Model(Arc::new(x))), ("signed_graph".into(), Document::SignedGraph(g))] })
        }
        "terminal_multicategory" => one(Document::Multicategory(Arc::new(terminal_multicategory(2, false)))),
        "monoid_multicategory" => one(Document::Multicategory(Arc::new(binary_multicategory(true)))),
        "free_binary_multicategory" => one(Document::Multicategory(Arc::new(binary_multicategory(false)))),
        "parity_multicategory" => one(Document::Multicategory(Arc::new(parity_multicategory(2, true)))),
        "parity_multifunctor" => one(Document::Multifunctor(parity_multifunctor(Arc::new(parity_multicategory(2, false))))),
        "z4_spherical" => {
            let z4 = Arc::new(cyclic_spherical_model(4, 2, cfg)?);
            let z2 = Arc::new(cyclic_spherical_model(2, 0, cfg)?);
            let f = ModelMorphism { source: z4.clone(), target: z2.clone(), on_objects: vec![vec![0]], on_loose: vec![(0..4).map(|a| a % 2).collect()] };
            Ok(Fixture {
                name: name.into(),
                documents: vec![(name.into(), Document::Model(z4)), ("z2_trivial".into(), Document::Model(z2)), ("z4_to_z2".into(), Document::ModelMorphism(f))],
            })
        }
        _ => Err(Error::UnknownFixture(name.to_string())),
    }
}

/// An instance fixture together with its base model as `<name>_model`.
fn with_model(name: &str, d: Document) -> Result<Fixture> {
    let Document::Instance(h) = &d else { unreachable!("fixture is an instance") };
    let x = Document::Model(h.model.clone());
    Ok(Fixture { name: name.into(), documents: vec![(name.into(), d), (format!("{name}_model"), x)] })
}

fn weighted_graph_model() -> Result<Arc<SpanModel>> {
    model(json!({
        "kind": "model",
        "theory": "builtin:walking_loose",
        "objects": {"⊢": ["E", "V"], "⊣": ["W"]},
        "loose": {
            "id:⊢": {
                "apex": ["id_E", "id_V", "s", "t"],
                "left": {"id_E": "E", "id_V": "V", "s": "E", "t": "E"},
                "right": {"id_E": "E", "id_V": "V", "s": "V", "t": "V"}
            },
            "ℓ": {"apex": ["w"], "left": {"w": "E"}, "right": {"w": "W"}}
        },
        "laxators": {
            "id:⊢,id:⊢": {
                "(id_E,id_E)": "id_E", "(id_E,s)": "s", "(id_E,t)": "t",
                "(id_V,id_V)": "id_V", "(s,id_V)": "s", "(t,id_V)": "t"
            },
            "id:⊢,ℓ": {"(id_E,w)": "w"}
        },
        "unitors": {"⊢": {"E": "id_E", "V": "id_V"}}
    }))
}

/// Two edges between two vertices, weighted 1 and 2.
fn weighted_graph_instance(x: &SpanModel) -> Value {
    json!({
        "kind": "instance",
        "model": super::model::model_ref(x),
        "carriers": {"⊢": {"e1": "E", "e2": "E", "v1": "V", "v2": "V"}, "⊣": {"1": "W", "2": "W"}},
        "actions": {
            "id:⊢": {
                "(e1,id_E)": "e1", "(e1,s)": "v1", "(e1,t)": "v2",
                "(e2,id_E)": "e2", "(e2,s)": "v2", "(e2,t)": "v1",
                "(v1,id_V)": "v1", "(v2,id_V)": "v2"
            },
            "ℓ": {"(e1,w)": "1", "(e2,w)": "2"}
        }
    })
}

/// The walking arrow `u: a → b` as the identity span of a model.
fn arrow_span(a: &str, b: &str, u: &str) -> (Value, Value, Map) {
    let (ia, ib) = (format!("id_{a}"), format!("id_{b}"));
    let span = json!({
        "apex": [ia, ib, u],
        "left": {ia.clone(): a, ib.clone(): b, u: a},
        "right": {ia.clone(): a, ib.clone(): b, u: b}
    });
    let lax = json!({
        format!("({ia},{ia})"): ia, format!("({ia},{u})"): u,
        format!("({u},{ib})"): u, format!("({ib},{ib})"): ib
    });
    let mut unit = Map::new();
    unit.insert(a.into(), ia.clone().into());
    unit.insert(b.into(), ib.clone().into());
    (span, lax, unit)
}

/// A profunctor from the walking arrow to the point, and two
/// copresheaves it intertwines.
fn profunctor_instance() -> Value {
    let (span, lax, unit) = arrow_span("a", "b", "u");
    let model = json!({
        "kind": "model",
        "theory": "builtin:walking_loose",
        "objects": {"⊢": ["a", "b"], "⊣": ["z"]},
        "loose": {
            "id:⊢": span,
            "ℓ": {"apex": ["k1", "k2"], "left": {"k1": "a", "k2": "b"}, "right": {"k1": "z", "k2": "z"}}
        },
        "laxators": {
            "id:⊢,id:⊢": lax,
            "id:⊢,ℓ": {"(id_a,k1)": "k1", "(u,k2)": "k1", "(id_b,k2)": "k2"}
        },
        "unitors": {"⊢": unit}
    });
    json!({
        "kind": "instance",
        "model": model,
        "carriers": {"⊢": {"x": "a", "y1": "b", "y2": "b"}, "⊣": {"w1": "z", "w2": "z"}},
        "actions": {
            "id:⊢": {"(x,id_a)": "x", "(x,u)": "y1", "(y1,id_b)": "y1", "(y2,id_b)": "y2"},
            "ℓ": {"(x,k1)": "w1", "(y1,k2)": "w1", "(y2,k2)": "w2"}
        }
    })
}

/// A functor between walking arrows, copresheaves on both ends and a
/// natural transformation from the first to the restriction of the second.
fn functor_instance() -> Value {
    let (s1, l1, u1) = arrow_span("a", "b", "u");
    let (s2, l2, u2) = arrow_span("z", "w", "v");
    let model = json!({
        "kind": "model",
        "theory": "builtin:walking_tight",
        "objects": {"⊢": ["a", "b"], "⊣": ["z", "w"]},
        "tight": {"f": {"a": "z", "b": "w"}},
        "loose": {"id:⊢": s1, "id:⊣": s2},
        "cells": {"id:f": {"id_a": "id_z", "id_b": "id_w", "u": "v"}},
        "laxators": {"id:⊢,id:⊢": l1, "id:⊣,id:⊣": l2},
        "unitors": {"⊢": u1, "⊣": u2}
    });
    json!({
        "kind": "instance",
        "model": model,
        "carriers": {"⊢": {"x": "a", "y": "b"}, "⊣": {"p": "z", "q1": "w", "q2": "w"}},
        "tight_cells": {"f": {"x": "p", "y": "q1"}},
        "actions": {
            "id:⊢": {"(x,id_a)": "x", "(x,u)": "y", "(y,id_b)": "y"},
            "id:⊣": {"(p,id_z)": "p", "(p,v)": "q1", "(q1,id_w)": "q1", "(q2,id_w)": "q2"}
        }
    })
}

/// The monad `T = const 1` on the poset `0 ≤ 1`, and an algebra-like
/// instance with one element over each point.
fn monad_instance() -> Value {
    let t = builtin_theory(Builtin::MonadTrunc(2));
    let power = |f: usize| -> usize {
        match t.tight[f].name.as_str() {
            "t" => 1,
            n => n.strip_prefix("t^").and_then(|k| k.parse().ok()).unwrap_or(0),
        }
    };
    let apply = |i: usize, a: usize| if i == 0 { a } else { 1 };
    let le = |a: usize, b: usize| format!("{a}≤{b}");
    let homs = [(0, 0), (0, 1), (1, 1)];
    let mut cells = Map::new();
    for c in &t.cells {
        let (i, j) = (power(c.left), power(c.right));
        let map: Map = homs.iter().map(|&(a, b)| (le(a, b), Value::from(le(apply(i, a), apply(j, b))))).collect();
        cells.insert(c.name.clone(), Value::Object(map));
    }
    let mut tight = Map::new();
    let mut tight_cells = Map::new();
    for (f, a) in t.tight.iter().enumerate() {
        if !t.is_tight_identity(f) {
            tight.insert(a.name.clone(), json!({"0": "1", "1": "1"}));
            tight_cells.insert(a.name.clone(), json!({"p": "q", "q": "q"}));
        }
    }
    let model = json!({
        "kind": "model",
        "theory": "builtin:monad_trunc(2)",
        "objects": {"x": ["0", "1"]},
        "tight": tight,
        "loose": {"id:x": {
            "apex": ["0≤0", "0≤1", "1≤1"],
            "left": {"0≤0": "0", "0≤1": "0", "1≤1": "1"},
            "right": {"0≤0": "0", "0≤1": "1", "1≤1": "1"}
        }},
        "cells": cells,
        "laxators": {"id:x,id:x": {"(0≤0,0≤0)": "0≤0", "(0≤0,0≤1)": "0≤1", "(0≤1,1≤1)": "0≤1", "(1≤1,1≤1)": "1≤1"}},
        "unitors": {"x": {"0": "0≤0", "1": "1≤1"}}
    });
    json!({
        "kind": "instance",
        "model": model,
        "carriers": {"x": {"p": "0", "q": "1"}},
        "tight_cells": tight_cells,
        "actions": {"id:x": {"(p,0≤0)": "p", "(p,0≤1)": "q", "(q,1≤1)": "q"}}
    })
}

/// A negative loop `a ⇄ b` sharing `b` with a positive loop `b ⇄ c`.
pub fn feedback_graph() -> SignedGraph {
    SignedGraph::new(&["a", "b", "c"], &[("f", "a", "b", false), ("g", "b", "a", true), ("h", "b", "c", false), ("k", "c", "b", false)])
}

/// `*` acting on `{0, 1}` by `Σ c_i x_i` mod 2.
fn parity_multifunctor(mc: Arc<Multicategory>) -> Multifunctor {
    let sets = vec![FiniteSet::range(2)];
    let actions = mc
        .morphisms
        .iter()
        .map(|f| {
            let c: Vec<usize> = f.name[1..].bytes().map(|b| (b - b'0') as usize).collect();
            crate::cartesian::tuples(&vec![2; c.len()]).iter().map(|xs| xs.iter().zip(&c).map(|(x, c)| x * c).sum::<usize>() % 2).collect()
        })
        .collect();
    Multifunctor { multicategory: mc, sets, actions }
}

/// One object and one spherical cell `α` with `α·α = 1`.
pub fn spherical_theory(cfg: &Config) -> Result<DoubleTheory> {
    let p = TheoryPresentation {
        name: "spherical_order_two".into(),
        objects: vec!["x".into()],
        cells: vec![GenCell { name: "α".into(), left: vec![], right: vec![], top: vec![], bottom: vec![], at: Some("x".into()) }],
        cell_relations: vec![(CellTerm::v(CellTerm::gen("α"), CellTerm::gen("α")), CellTerm::IdLoose { id_loose: vec![], at: Some("x".into()) })],
        ..Default::default()
    };
    close_presentation(&p, cfg.max_word_len)
}

/// The one-object category `BZ/n` with `α` acting by `+q`; a model when
/// `2q = 0`.
pub fn cyclic_spherical_model(n: usize, q: usize, cfg: &Config) -> Result<SpanModel> {
    let t = spherical_theory(cfg)?;
    let elems: Vec<String> = (0..n).map(|a| a.to_string()).collect();
    let ends: Map = elems.iter().map(|a| (a.clone(), Value::from("*"))).collect();
    let alpha: Map = (0..n).map(|a| (a.to_string(), Value::from(((a + q) % n).to_string()))).collect();
    let add: Map = (0..n).flat_map(|a| (0..n).map(move |b| (format!("({a},{b})"), Value::from(((a + b) % n).to_string())))).collect();
    model(json!({
        "kind": "model",
        "theory": super::envelope("theory", super::theory::theory_body(&t)),
        "objects": {"x": ["*"]},
        "loose": {"id:x": {"apex": elems, "left": ends, "right": ends}},
        "cells": {"α": alpha},
        "laxators": {"id:x,id:x": add},
        "unitors": {"x": {"*": "0"}}
    }))
    .map(|x| (*x).clone())
}
