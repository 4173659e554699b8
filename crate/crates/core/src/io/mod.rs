//! JSON documents. Every file is one object with a `kind` and a
//! `format_version`; references to other documents are either a path
//! relative to the referring file, `builtin:NAME` for shipped theories,
//! or the document inlined. Writers always inline.

mod category;
mod fixtures;
mod model;
mod multi;
mod theory;

pub use category::rebase_copresheaf;
pub use fixtures::{cyclic_spherical_model, emit_fixture, feedback_graph, fixture_names, spherical_theory, Fixture, SIGNED_BOUND};

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::Value;

use crate::cartesian::{Multicategory, Multifunctor};
use crate::collage::{Copresheaf, FinCategory, PresentedCategory};
use crate::config::Config;
use crate::elements::{DopfCounterexample, DopfWitness};
use crate::error::{Error, Result};
use crate::finset::{pair_label, FiniteSet, Func};
use crate::instance::{Instance, InstanceMorphism};
use crate::report::Report;
use crate::sketch::{LimitSketch, SketchModel};
use crate::span_model::{ModelMorphism, SignedGraph, SpanModel};
use crate::theory_core::DoubleTheory;

pub const FORMAT_VERSION: u64 = 1;

type Map = serde_json::Map<String, Value>;

#[derive(Debug, Clone)]
pub enum Document {
    Theory(Arc<DoubleTheory>),
    Model(Arc<SpanModel>),
    Instance(Arc<Instance>),
    ModelMorphism(ModelMorphism),
    InstanceMorphism(InstanceMorphism),
    PresentedCategory(PresentedCategory),
    FinCategory(Arc<FinCategory>),
    Copresheaf(Copresheaf),
    Multicategory(Arc<Multicategory>),
    Multifunctor(Multifunctor),
    Sketch(Arc<LimitSketch>),
    SketchModel(SketchModel),
    SignedGraph(SignedGraph),
    /// Per-loose-arrow lifting bijections of a discrete opfibration.
    DopfWitness(ModelMorphism, DopfWitness),
    DopfCounterexample(DopfCounterexample),
    Report(Report),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Theory(_) => "theory",
            Document::Model(_) => "model",
            Document::Instance(_) => "instance",
            Document::ModelMorphism(_) => "model_morphism",
            Document::InstanceMorphism(_) => "instance_morphism",
            Document::PresentedCategory(_) => "presented_category",
            Document::FinCategory(_) => "fin_category",
            Document::Copresheaf(_) => "copresheaf",
            Document::Multicategory(_) => "multicategory",
            Document::Multifunctor(_) => "multifunctor",
            Document::Sketch(_) => "sketch",
            Document::SketchModel(_) => "sketch_model",
            Document::SignedGraph(_) => "signed_graph",
            Document::DopfWitness(..) => "dopf_witness",
            Document::DopfCounterexample(_) => "dopf_counterexample",
            Document::Report(_) => "report",
        }
    }

    pub fn to_value(&self) -> Value {
        let body = match self {
            Document::Theory(t) => theory::theory_body(t),
            Document::Model(x) => model::model_body(x),
            Document::Instance(h) => model::instance_body(h),
            Document::ModelMorphism(f) => model::model_morphism_body(f),
            Document::InstanceMorphism(f) => model::instance_morphism_body(f),
            Document::PresentedCategory(p) => category::presented_body(p),
            Document::FinCategory(c) => category::fin_category_body(c),
            Document::Copresheaf(p) => category::copresheaf_body(p),
            Document::Multicategory(mc) => multi::multicategory_body(mc),
            Document::Multifunctor(f) => multi::multifunctor_body(f),
            Document::Sketch(s) => multi::sketch_body(s),
            Document::SketchModel(s) => multi::sketch_model_body(s),
            Document::SignedGraph(g) => to_map(g),
            Document::DopfWitness(p, w) => model::witness_body(p, w),
            Document::DopfCounterexample(c) => model::counterexample_body(c),
            Document::Report(r) => to_map(r),
        };
        envelope(self.kind(), body)
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("documents serialize");
        s.push('\n');
        s
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

fn to_map<T: serde::Serialize>(x: &T) -> Map {
    match serde_json::to_value(x).expect("serializable") {
        Value::Object(m) => m,
        _ => unreachable!("struct serializes to an object"),
    }
}

fn envelope(kind: &str, body: Map) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), kind.into());
    m.insert("format_version".into(), FORMAT_VERSION.into());
    m.extend(body);
    Value::Object(m)
}

/// Reads documents and resolves their references.
#[derive(Debug, Clone)]
pub struct Loader {
    cfg: Config,
    base: PathBuf,
}

impl Default for Loader {
    fn default() -> Self {
        Loader::new(Config::default())
    }
}

impl Loader {
    pub fn new(cfg: Config) -> Self {
        Loader { cfg, base: PathBuf::from(".") }
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    fn at(&self, base: PathBuf) -> Loader {
        Loader { cfg: self.cfg, base }
    }

    pub fn read(&self, path: impl AsRef<Path>) -> Result<Document> {
        let (v, cx) = self.read_value(path.as_ref())?;
        cx.parse(&v)
    }

    pub fn read_value(&self, path: &Path) -> Result<(Value, Loader)> {
        let full = if path.is_absolute() { path.to_path_buf() } else { self.base.join(path) };
        let text = std::fs::read_to_string(&full).map_err(|e| Error::Io(format!("{}: {e}", full.display())))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::parse(format!("{}:{}:{}", full.display(), e.line(), e.column()), e.to_string()))?;
        let dir = full.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        Ok((v, self.at(dir)))
    }

    /// Parse a document held in memory; relative references resolve
    /// against `base`.
    pub fn parse_str(&self, text: &str, base: impl AsRef<Path>) -> Result<Document> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::parse(format!("{}:{}", e.line(), e.column()), e.to_string()))?;
        self.at(base.as_ref().to_path_buf()).parse(&v)
    }

    pub fn parse(&self, v: &Value) -> Result<Document> {
        let m = as_obj(v, "document")?;
        let kind = as_str(get(m, "kind", "document")?, "document.kind")?;
        self.parse_kind(m, kind)
    }

    fn parse_kind(&self, m: &Map, kind: &str) -> Result<Document> {
        if let Some(v) = m.get("format_version") {
            if v.as_u64() != Some(FORMAT_VERSION) {
                return Err(Error::parse(format!("{kind}.format_version"), format!("unsupported version {v}")));
            }
        }
        let fields: &[&str] = match kind {
            "model" => &["theory", "objects", "tight", "loose", "cells", "laxators", "unitors"],
            "instance" => &["model", "carriers", "tight_cells", "actions"],
            "model_morphism" => &["source", "target", "objects", "loose"],
            _ => &[],
        };
        if !fields.is_empty() {
            let allowed: Vec<&str> = ["kind", "format_version", "name"].iter().chain(fields).copied().collect();
            known_keys(m, &allowed, "field", kind)?;
        }
        Ok(match kind {
            "theory" | "theory_presentation" => Document::Theory(Arc::new(theory::parse_theory(self, m, kind)?)),
            "model" => Document::Model(Arc::new(model::parse_model(self, m)?)),
            "instance" => Document::Instance(Arc::new(model::parse_instance(self, m, None)?)),
            "model_morphism" => Document::ModelMorphism(model::parse_model_morphism(self, m)?),
            "instance_morphism" => Document::InstanceMorphism(model::parse_instance_morphism(self, m)?),
            "presented_category" => Document::PresentedCategory(category::parse_presented(m, kind)?),
            "fin_category" => Document::FinCategory(Arc::new(category::parse_fin_category(m)?)),
            "copresheaf" => Document::Copresheaf(category::parse_copresheaf(self, m)?),
            "multicategory" => Document::Multicategory(Arc::new(multi::parse_multicategory(m)?)),
            "multifunctor" => Document::Multifunctor(multi::parse_multifunctor(self, m)?),
            "sketch" => Document::Sketch(Arc::new(multi::parse_sketch(self, m)?)),
            "sketch_model" => Document::SketchModel(multi::parse_sketch_model(self, m)?),
            "signed_graph" => Document::SignedGraph(from_map(m, kind)?),
            "dopf_witness" => {
                let (p, w) = model::parse_witness(self, m)?;
                Document::DopfWitness(p, w)
            }
            "dopf_counterexample" => Document::DopfCounterexample(model::parse_counterexample(m)?),
            "report" => Document::Report(from_map(m, kind)?),
            other => return Err(Error::parse("document.kind", format!("unknown kind {other:?}"))),
        })
    }

    /// Follow a reference of the given kind: a path, `builtin:NAME` for
    /// theories, or an inline document whose `kind` may be omitted.
    fn resolve(&self, v: &Value, kind: &str, at: &str) -> Result<Document> {
        match v {
            Value::String(s) if kind == "theory" && s.starts_with("builtin:") => Ok(Document::Theory(Arc::new(theory::builtin_ref(s, at)?))),
            Value::String(s) => {
                let (v, cx) = self.read_value(Path::new(s))?;
                cx.resolve(&v, kind, at)
            }
            Value::Object(m) => {
                let k = match m.get("kind") {
                    Some(k) => as_str(k, &format!("{at}.kind"))?,
                    None => kind,
                };
                let ok = k == kind || (kind == "theory" && k == "theory_presentation");
                if !ok {
                    return Err(Error::parse(at, format!("expected a {kind} document, found {k}")));
                }
                self.parse_kind(m, k)
            }
            _ => Err(Error::parse(at, format!("expected a path or an inline {kind} document"))),
        }
    }

    pub fn theory(&self, path: impl AsRef<Path>) -> Result<Arc<DoubleTheory>> {
        match self.read(path)? {
            Document::Theory(t) => Ok(t),
            d => Err(wrong_kind("theory", &d)),
        }
    }

    pub fn model(&self, path: impl AsRef<Path>) -> Result<Arc<SpanModel>> {
        match self.read(path)? {
            Document::Model(x) => Ok(x),
            d => Err(wrong_kind("model", &d)),
        }
    }

    pub fn instance(&self, path: impl AsRef<Path>) -> Result<Arc<Instance>> {
        match self.read(path)? {
            Document::Instance(h) => Ok(h),
            d => Err(wrong_kind("instance", &d)),
        }
    }

    /// An instance whose document may omit its `model`, supplied here
    /// instead. When both are present they must agree.
    pub fn instance_over(&self, path: impl AsRef<Path>, model: Option<Arc<SpanModel>>) -> Result<Arc<Instance>> {
        let (v, cx) = self.read_value(path.as_ref())?;
        let m = as_obj(&v, "document")?;
        let kind = m.get("kind").and_then(Value::as_str).unwrap_or("instance");
        if kind != "instance" {
            return Err(Error::parse("document.kind", format!("expected an instance document, found {kind}")));
        }
        Ok(Arc::new(model::parse_instance(&cx, m, model)?))
    }

    pub fn model_morphism(&self, path: impl AsRef<Path>) -> Result<ModelMorphism> {
        match self.read(path)? {
            Document::ModelMorphism(f) => Ok(f),
            d => Err(wrong_kind("model_morphism", &d)),
        }
    }
}

fn wrong_kind(expected: &str, d: &Document) -> Error {
    Error::parse("document.kind", format!("expected a {expected} document, found {}", d.kind()))
}

fn from_map<T: serde::de::DeserializeOwned>(m: &Map, at: &str) -> Result<T> {
    let mut m = m.clone();
    m.remove("kind");
    m.remove("format_version");
    serde_json::from_value(Value::Object(m)).map_err(|e| Error::parse(at, e.to_string()))
}

fn as_obj<'a>(v: &'a Value, at: &str) -> Result<&'a Map> {
    v.as_object().ok_or_else(|| Error::parse(at, "expected an object"))
}

fn as_arr<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::parse(at, "expected an array"))
}

fn as_str<'a>(v: &'a Value, at: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::parse(at, "expected a string"))
}

fn get<'a>(m: &'a Map, key: &str, at: &str) -> Result<&'a Value> {
    m.get(key).ok_or_else(|| Error::parse(format!("{at}.{key}"), "missing field"))
}

fn strings(v: &Value, at: &str) -> Result<Vec<String>> {
    as_arr(v, at)?.iter().enumerate().map(|(i, x)| as_str(x, &format!("{at}[{i}]")).map(str::to_string)).collect()
}

fn label_set(v: &Value, at: &str) -> Result<FiniteSet> {
    FiniteSet::new(strings(v, at)?).map_err(|e| Error::parse(at, e.to_string()))
}

fn find(set: &FiniteSet, label: &str, at: &str) -> Result<usize> {
    set.find(label).ok_or_else(|| Error::parse(at, format!("unknown element {label:?}")))
}

/// Position of `name` among `names`, as a parse error otherwise.
fn lookup(names: &[&str], name: &str, what: &str, at: &str) -> Result<usize> {
    names.iter().position(|n| *n == name).ok_or_else(|| Error::parse(at, format!("unknown {what} {name:?}")))
}

/// Reject keys that name no entity.
fn known_keys(m: &Map, names: &[&str], what: &str, at: &str) -> Result<()> {
    match m.keys().find(|k| !names.contains(&k.as_str())) {
        Some(k) => Err(Error::parse(format!("{at}.{k}"), format!("unknown {what}"))),
        None => Ok(()),
    }
}

/// A total function given as `{x: y}` by labels.
fn func(v: &Value, dom: &FiniteSet, cod: &FiniteSet, at: &str) -> Result<Func> {
    let m = as_obj(v, at)?;
    known_keys(m, &dom.labels().iter().map(String::as_str).collect::<Vec<_>>(), "element", at)?;
    dom.labels()
        .iter()
        .map(|x| {
            let here = format!("{at}.{x}");
            let y = m.get(x).ok_or_else(|| Error::parse(&here, "missing value"))?;
            find(cod, as_str(y, &here)?, &here)
        })
        .collect()
}

fn func_value(f: &[usize], dom: &FiniteSet, cod: &FiniteSet) -> Value {
    Value::Object(f.iter().enumerate().map(|(x, &y)| (dom.label(x).to_string(), Value::from(cod.label(y)))).collect())
}

/// A total function on pairs, keyed `"(a,b)"`.
fn pair_func(v: &Value, pairs: &[(usize, usize)], l: &FiniteSet, r: &FiniteSet, cod: &FiniteSet, at: &str) -> Result<Vec<usize>> {
    let m = as_obj(v, at)?;
    let keys: Vec<String> = pairs.iter().map(|&(a, b)| pair_label(l.label(a), r.label(b))).collect();
    known_keys(m, &keys.iter().map(String::as_str).collect::<Vec<_>>(), "pair", at)?;
    keys.iter()
        .map(|k| {
            let here = format!("{at}.{k}");
            let y = m.get(k).ok_or_else(|| Error::parse(&here, "missing value"))?;
            find(cod, as_str(y, &here)?, &here)
        })
        .collect()
}

fn pair_func_value(pairs: &[(usize, usize)], values: &[usize], l: &FiniteSet, r: &FiniteSet, cod: &FiniteSet) -> Value {
    Value::Object(pairs.iter().zip(values).map(|(&(a, b), &v)| (pair_label(l.label(a), r.label(b)), Value::from(cod.label(v)))).collect())
}
