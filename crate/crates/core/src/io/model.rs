use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde_json::{json, Value};

use super::theory::theory_ref;
use super::{as_arr, as_obj, as_str, find, func, func_value, get, known_keys, label_set, pair_func, pair_func_value, strings, Document, Loader, Map};
use crate::elements::{DopfCounterexample, DopfWitness};
use crate::error::{Error, Result};
use crate::finset::{identity, pullback_pairs, FiniteSet, Func};
use crate::instance::{Instance, InstanceMorphism, PairTable};
use crate::span_model::{Laxator, ModelMorphism, SpanModel, SpanOfSets};
use crate::theory_core::DoubleTheory;

fn names<T>(v: &[T], name: impl Fn(&T) -> &str) -> Vec<&str> {
    v.iter().map(name).collect()
}

fn opt_map<'a>(m: &'a Map, key: &str, at: &str) -> Result<Option<&'a Map>> {
    m.get(key).map(|v| as_obj(v, &format!("{at}.{key}"))).transpose()
}

/// `X(id_x)` is `Xx` itself, with both legs the identity.
fn diagonal(span: &SpanOfSets, set: &FiniteSet) -> bool {
    span.apex == *set && span.left == identity(set.len()) && span.right == identity(set.len())
}

fn laxator_key(t: &DoubleTheory, m: usize, n: usize) -> String {
    format!("{},{}", t.loose[m].name, t.loose[n].name)
}

pub(super) fn model_ref(x: &SpanModel) -> Value {
    super::envelope("model", model_body(x))
}

pub(super) fn model_body(x: &SpanModel) -> Map {
    let t = &*x.theory;
    let mut m = Map::new();
    m.insert("theory".into(), theory_ref(t));
    m.insert("objects".into(), t.objects.iter().zip(&x.on_objects).map(|(o, s)| (o.clone(), json!(s))).collect());
    m.insert("tight".into(), t.tight.iter().zip(&x.on_tight).map(|(a, f)| (a.name.clone(), func_value(f, &x.on_objects[a.src], &x.on_objects[a.dst]))).collect());
    m.insert(
        "loose".into(),
        t.loose
            .iter()
            .zip(&x.on_loose)
            .map(|(a, s)| {
                let v = json!({
                    "apex": s.apex,
                    "left": func_value(&s.left, &s.apex, &x.on_objects[a.src]),
                    "right": func_value(&s.right, &s.apex, &x.on_objects[a.dst]),
                });
                (a.name.clone(), v)
            })
            .collect(),
    );
    m.insert("cells".into(), t.cells.iter().zip(&x.on_cells).map(|(c, f)| (c.name.clone(), func_value(f, &x.on_loose[c.top].apex, &x.on_loose[c.bottom].apex))).collect());
    m.insert(
        "laxators".into(),
        x.laxators
            .iter()
            .map(|(&(a, b), lax)| {
                let ab = t.loose_compose(a, b).expect("laxator at a tabulated composite");
                let v = pair_func_value(&lax.pairs, &lax.values, &x.on_loose[a].apex, &x.on_loose[b].apex, &x.on_loose[ab].apex);
                (laxator_key(t, a, b), v)
            })
            .collect(),
    );
    m.insert(
        "unitors".into(),
        t.objects.iter().enumerate().map(|(o, name)| (name.clone(), func_value(&x.unitors[o], &x.on_objects[o], &x.on_loose[t.loose_id[o]].apex))).collect(),
    );
    m
}

fn theory_of(cx: &Loader, m: &Map, at: &str) -> Result<Arc<DoubleTheory>> {
    match cx.resolve(get(m, "theory", at)?, "theory", &format!("{at}.theory"))? {
        Document::Theory(t) => Ok(t),
        _ => unreachable!("resolve returns the requested kind"),
    }
}

fn model_of(cx: &Loader, v: &Value, at: &str) -> Result<Arc<SpanModel>> {
    match cx.resolve(v, "model", at)? {
        Document::Model(x) => Ok(x),
        _ => unreachable!("resolve returns the requested kind"),
    }
}

fn instance_of(cx: &Loader, v: &Value, at: &str) -> Result<Arc<Instance>> {
    match cx.resolve(v, "instance", at)? {
        Document::Instance(h) => Ok(h),
        _ => unreachable!("resolve returns the requested kind"),
    }
}

/// Identities may be omitted: tight identities, identity cells on loose
/// arrows, and loose identities sent to the diagonal span, with the
/// structure that then follows (unitors, identity cells on tight arrows
/// between diagonal spans, laxators against a loose identity).
pub(super) fn parse_model(cx: &Loader, m: &Map) -> Result<SpanModel> {
    let at = "model";
    let t = theory_of(cx, m, at)?;
    let objs = as_obj(get(m, "objects", at)?, "model.objects")?;
    known_keys(objs, &t.objects.iter().map(String::as_str).collect::<Vec<_>>(), "object", "model.objects")?;
    let on_objects: Vec<FiniteSet> = t
        .objects
        .iter()
        .map(|o| {
            let here = format!("model.objects.{o}");
            label_set(objs.get(o).ok_or_else(|| Error::parse(&here, "missing object"))?, &here)
        })
        .collect::<Result<_>>()?;

    let tight = opt_map(m, "tight", at)?;
    let empty = Map::new();
    let tight = tight.unwrap_or(&empty);
    known_keys(tight, &names(&t.tight, |a| &a.name), "tight arrow", "model.tight")?;
    let on_tight: Vec<Func> = t
        .tight
        .iter()
        .enumerate()
        .map(|(f, a)| {
            let here = format!("model.tight.{}", a.name);
            match tight.get(&a.name) {
                Some(v) => func(v, &on_objects[a.src], &on_objects[a.dst], &here),
                None if t.is_tight_identity(f) => Ok(identity(on_objects[a.src].len())),
                None => Err(Error::parse(here, "missing tight arrow")),
            }
        })
        .collect::<Result<_>>()?;

    let loose = opt_map(m, "loose", at)?.unwrap_or(&empty);
    known_keys(loose, &names(&t.loose, |a| &a.name), "loose arrow", "model.loose")?;
    let on_loose: Vec<SpanOfSets> = t
        .loose
        .iter()
        .enumerate()
        .map(|(l, a)| {
            let here = format!("model.loose.{}", a.name);
            match loose.get(&a.name) {
                Some(v) => {
                    let sm = as_obj(v, &here)?;
                    let apex = label_set(get(sm, "apex", &here)?, &format!("{here}.apex"))?;
                    let left = func(get(sm, "left", &here)?, &apex, &on_objects[a.src], &format!("{here}.left"))?;
                    let right = func(get(sm, "right", &here)?, &apex, &on_objects[a.dst], &format!("{here}.right"))?;
                    Ok(SpanOfSets { apex, left, right })
                }
                None if t.is_loose_identity(l) => {
                    let s = &on_objects[a.src];
                    Ok(SpanOfSets { apex: s.clone(), left: identity(s.len()), right: identity(s.len()) })
                }
                None => Err(Error::parse(here, "missing loose arrow")),
            }
        })
        .collect::<Result<_>>()?;
    let diag: Vec<bool> = (0..t.loose.len()).map(|l| t.is_loose_identity(l) && diagonal(&on_loose[l], &on_objects[t.loose[l].src])).collect();

    let cells = opt_map(m, "cells", at)?.unwrap_or(&empty);
    known_keys(cells, &names(&t.cells, |c| &c.name), "cell", "model.cells")?;
    let on_cells: Vec<Func> = t
        .cells
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let here = format!("model.cells.{}", cell.name);
            let (top, bottom) = (&on_loose[cell.top], &on_loose[cell.bottom]);
            match cells.get(&cell.name) {
                Some(v) => func(v, &top.apex, &bottom.apex, &here),
                None if t.cell_loose_id[cell.top] == c => Ok(identity(top.len())),
                None if diag[cell.top] && diag[cell.bottom] && cell.left == cell.right => Ok(on_tight[cell.left].clone()),
                None => Err(Error::parse(here, "missing cell")),
            }
        })
        .collect::<Result<_>>()?;

    let laxators = opt_map(m, "laxators", at)?.unwrap_or(&empty);
    let keys: Vec<((usize, usize), String)> = t.loose_comp.keys().map(|&(a, b)| ((a, b), laxator_key(&t, a, b))).collect();
    let mut by_key: HashMap<&str, (usize, usize)> = HashMap::new();
    for (pair, k) in &keys {
        if by_key.insert(k, *pair).is_some() {
            return Err(Error::parse("model.laxators", format!("ambiguous laxator key {k:?}")));
        }
    }
    known_keys(laxators, &keys.iter().map(|(_, k)| k.as_str()).collect::<Vec<_>>(), "composable pair", "model.laxators")?;
    let mut lax = BTreeMap::new();
    for ((a, b), k) in &keys {
        let (a, b) = (*a, *b);
        let here = format!("model.laxators.{k}");
        let ab = t.loose_compose(a, b).expect("tabulated");
        let pairs = pullback_pairs(&on_loose[a].right, &on_loose[b].left);
        let values = match laxators.get(k) {
            Some(v) => pair_func(v, &pairs, &on_loose[a].apex, &on_loose[b].apex, &on_loose[ab].apex, &here)?,
            None if diag[a] && ab == b => pairs.iter().map(|&(_, y)| y).collect(),
            None if diag[b] && ab == a => pairs.iter().map(|&(x, _)| x).collect(),
            None => return Err(Error::parse(here, "missing laxator")),
        };
        lax.insert((a, b), Laxator { pairs, values });
    }

    let unitors = opt_map(m, "unitors", at)?.unwrap_or(&empty);
    known_keys(unitors, &t.objects.iter().map(String::as_str).collect::<Vec<_>>(), "object", "model.unitors")?;
    let unitors: Vec<Func> = t
        .objects
        .iter()
        .enumerate()
        .map(|(o, name)| {
            let here = format!("model.unitors.{name}");
            let idm = t.loose_id[o];
            match unitors.get(name) {
                Some(v) => func(v, &on_objects[o], &on_loose[idm].apex, &here),
                None if diag[idm] => Ok(identity(on_objects[o].len())),
                None => Err(Error::parse(here, "missing unitor")),
            }
        })
        .collect::<Result<_>>()?;
    Ok(SpanModel { theory: t, on_objects, on_tight, on_loose, on_cells, laxators: lax, unitors })
}

pub(super) fn instance_body(h: &Instance) -> Map {
    let x = &*h.model;
    let t = &*x.theory;
    let mut m = Map::new();
    m.insert("model".into(), model_ref(x));
    m.insert("carriers".into(), t.objects.iter().enumerate().map(|(d, o)| (o.clone(), func_value(&h.labels[d], &h.carriers[d], &x.on_objects[d]))).collect());
    m.insert("tight_cells".into(), t.tight.iter().zip(&h.tight_cells).map(|(a, f)| (a.name.clone(), func_value(f, &h.carriers[a.src], &h.carriers[a.dst]))).collect());
    m.insert(
        "actions".into(),
        t.loose
            .iter()
            .zip(&h.actions)
            .enumerate()
            .map(|(l, (a, act))| (a.name.clone(), pair_func_value(&act.pairs, &act.values, &h.carriers[a.src], &x.on_loose[l].apex, &h.carriers[a.dst])))
            .collect(),
    );
    m
}

/// Tight identities may be omitted, and so may actions of loose
/// identities sent to the diagonal span.
pub(super) fn parse_instance(cx: &Loader, m: &Map, model: Option<Arc<SpanModel>>) -> Result<Instance> {
    let at = "instance";
    let x = match (m.get("model"), model) {
        (Some(v), Some(given)) => {
            let x = model_of(cx, v, "instance.model")?;
            if *x != *given {
                return Err(Error::Mismatch("the instance's model differs from the model supplied".into()));
            }
            given
        }
        (Some(v), None) => model_of(cx, v, "instance.model")?,
        (None, Some(given)) => given,
        (None, None) => return Err(Error::parse("instance.model", "missing field")),
    };
    let t = x.theory.clone();
    let carriers_v = as_obj(get(m, "carriers", at)?, "instance.carriers")?;
    known_keys(carriers_v, &t.objects.iter().map(String::as_str).collect::<Vec<_>>(), "object", "instance.carriers")?;
    let mut carriers = Vec::new();
    let mut labels = Vec::new();
    for (d, o) in t.objects.iter().enumerate() {
        let here = format!("instance.carriers.{o}");
        let cm = as_obj(carriers_v.get(o).ok_or_else(|| Error::parse(&here, "missing object"))?, &here)?;
        let set = FiniteSet::new(cm.keys().cloned()).map_err(|e| Error::parse(&here, e.to_string()))?;
        labels.push(func(&Value::Object(cm.clone()), &set, &x.on_objects[d], &here)?);
        carriers.push(set);
    }
    let empty = Map::new();
    let tight = opt_map(m, "tight_cells", at)?.unwrap_or(&empty);
    known_keys(tight, &names(&t.tight, |a| &a.name), "tight arrow", "instance.tight_cells")?;
    let tight_cells: Vec<Func> = t
        .tight
        .iter()
        .enumerate()
        .map(|(f, a)| {
            let here = format!("instance.tight_cells.{}", a.name);
            match tight.get(&a.name) {
                Some(v) => func(v, &carriers[a.src], &carriers[a.dst], &here),
                None if t.is_tight_identity(f) => Ok(identity(carriers[a.src].len())),
                None => Err(Error::parse(here, "missing tight arrow")),
            }
        })
        .collect::<Result<_>>()?;
    let actions_v = opt_map(m, "actions", at)?.unwrap_or(&empty);
    known_keys(actions_v, &names(&t.loose, |a| &a.name), "loose arrow", "instance.actions")?;
    let mut actions = Vec::new();
    for (l, a) in t.loose.iter().enumerate() {
        let here = format!("instance.actions.{}", a.name);
        let pairs = pullback_pairs(&labels[a.src], &x.on_loose[l].left);
        let values = match actions_v.get(&a.name) {
            Some(v) => pair_func(v, &pairs, &carriers[a.src], &x.on_loose[l].apex, &carriers[a.dst], &here)?,
            None if t.is_loose_identity(l) && diagonal(&x.on_loose[l], &x.on_objects[a.src]) => pairs.iter().map(|&(e, _)| e).collect(),
            None => return Err(Error::parse(here, "missing action")),
        };
        actions.push(PairTable { pairs, values });
    }
    Ok(Instance { model: x, carriers, labels, tight_cells, actions })
}

pub(super) fn model_morphism_body(f: &ModelMorphism) -> Map {
    let (x, y) = (&*f.source, &*f.target);
    let t = &*x.theory;
    let mut m = Map::new();
    m.insert("source".into(), model_ref(x));
    m.insert("target".into(), model_ref(y));
    m.insert("objects".into(), t.objects.iter().enumerate().map(|(o, n)| (n.clone(), func_value(&f.on_objects[o], &x.on_objects[o], &y.on_objects[o]))).collect());
    m.insert("loose".into(), t.loose.iter().enumerate().map(|(l, a)| (a.name.clone(), func_value(&f.on_loose[l], &x.on_loose[l].apex, &y.on_loose[l].apex))).collect());
    m
}

pub(super) fn model_morphism_ref(f: &ModelMorphism) -> Value {
    super::envelope("model_morphism", model_morphism_body(f))
}

pub(super) fn parse_model_morphism(cx: &Loader, m: &Map) -> Result<ModelMorphism> {
    let at = "model_morphism";
    let x = model_of(cx, get(m, "source", at)?, "model_morphism.source")?;
    let y = model_of(cx, get(m, "target", at)?, "model_morphism.target")?;
    if *x.theory != *y.theory {
        return Err(Error::Mismatch("source and target models have different theories".into()));
    }
    let t = x.theory.clone();
    let objs = as_obj(get(m, "objects", at)?, "model_morphism.objects")?;
    known_keys(objs, &t.objects.iter().map(String::as_str).collect::<Vec<_>>(), "object", "model_morphism.objects")?;
    let on_objects: Vec<Func> = t
        .objects
        .iter()
        .enumerate()
        .map(|(o, n)| {
            let here = format!("model_morphism.objects.{n}");
            func(objs.get(n).ok_or_else(|| Error::parse(&here, "missing object"))?, &x.on_objects[o], &y.on_objects[o], &here)
        })
        .collect::<Result<_>>()?;
    let empty = Map::new();
    let loose = opt_map(m, "loose", at)?.unwrap_or(&empty);
    known_keys(loose, &names(&t.loose, |a| &a.name), "loose arrow", "model_morphism.loose")?;
    let on_loose: Vec<Func> = t
        .loose
        .iter()
        .enumerate()
        .map(|(l, a)| {
            let here = format!("model_morphism.loose.{}", a.name);
            match loose.get(&a.name) {
                Some(v) => func(v, &x.on_loose[l].apex, &y.on_loose[l].apex, &here),
                None if t.is_loose_identity(l) && diagonal(&x.on_loose[l], &x.on_objects[a.src]) && diagonal(&y.on_loose[l], &y.on_objects[a.src]) => Ok(on_objects[a.src].clone()),
                None => Err(Error::parse(here, "missing loose component")),
            }
        })
        .collect::<Result<_>>()?;
    Ok(ModelMorphism { source: x, target: y, on_objects, on_loose })
}

pub(super) fn instance_morphism_body(f: &InstanceMorphism) -> Map {
    let (h, k) = (&*f.source, &*f.target);
    let t = &*h.model.theory;
    let mut m = Map::new();
    m.insert("source".into(), super::envelope("instance", instance_body(h)));
    m.insert("target".into(), super::envelope("instance", instance_body(k)));
    m.insert("components".into(), t.objects.iter().enumerate().map(|(d, n)| (n.clone(), func_value(&f.components[d], &h.carriers[d], &k.carriers[d]))).collect());
    m
}

pub(super) fn parse_instance_morphism(cx: &Loader, m: &Map) -> Result<InstanceMorphism> {
    let at = "instance_morphism";
    let h = instance_of(cx, get(m, "source", at)?, "instance_morphism.source")?;
    let k = instance_of(cx, get(m, "target", at)?, "instance_morphism.target")?;
    if *h.model != *k.model {
        return Err(Error::Mismatch("source and target are instances of different models".into()));
    }
    let t = &h.model.theory;
    let comps = as_obj(get(m, "components", at)?, "instance_morphism.components")?;
    known_keys(comps, &t.objects.iter().map(String::as_str).collect::<Vec<_>>(), "object", "instance_morphism.components")?;
    let components = t
        .objects
        .iter()
        .enumerate()
        .map(|(d, n)| {
            let here = format!("instance_morphism.components.{n}");
            func(comps.get(n).ok_or_else(|| Error::parse(&here, "missing component"))?, &h.carriers[d], &k.carriers[d], &here)
        })
        .collect::<Result<_>>()?;
    Ok(InstanceMorphism { source: h, target: k, components })
}

pub(super) fn witness_body(p: &ModelMorphism, w: &DopfWitness) -> Map {
    let (e, b) = (&*p.source, &*p.target);
    let t = &*e.theory;
    let mut m = Map::new();
    m.insert("morphism".into(), model_morphism_ref(p));
    let bij: Map = t
        .loose
        .iter()
        .enumerate()
        .map(|(l, a)| {
            let rows: Vec<Value> = w.forward[l]
                .iter()
                .enumerate()
                .map(|(h, &(x, bb))| json!({"het": e.on_loose[l].apex.label(h), "element": e.on_objects[a.src].label(x), "base": b.on_loose[l].apex.label(bb)}))
                .collect();
            (a.name.clone(), Value::Array(rows))
        })
        .collect();
    m.insert("bijections".into(), Value::Object(bij));
    m
}

pub(super) fn parse_witness(cx: &Loader, m: &Map) -> Result<(ModelMorphism, DopfWitness)> {
    let at = "dopf_witness";
    let p = match cx.resolve(get(m, "morphism", at)?, "model_morphism", "dopf_witness.morphism")? {
        Document::ModelMorphism(p) => p,
        _ => unreachable!("resolve returns the requested kind"),
    };
    let (e, b) = (&*p.source, &*p.target);
    let t = &*e.theory;
    let bij = as_obj(get(m, "bijections", at)?, "dopf_witness.bijections")?;
    known_keys(bij, &names(&t.loose, |a| &a.name), "loose arrow", "dopf_witness.bijections")?;
    let mut forward = Vec::new();
    let mut lift = Vec::new();
    for (l, a) in t.loose.iter().enumerate() {
        let here = format!("dopf_witness.bijections.{}", a.name);
        let rows = as_arr(bij.get(&a.name).ok_or_else(|| Error::parse(&here, "missing loose arrow"))?, &here)?;
        if rows.len() != e.on_loose[l].len() {
            return Err(Error::parse(&here, "expected one row per heteromorphism"));
        }
        let mut fw = vec![None; e.on_loose[l].len()];
        let mut lf = HashMap::new();
        for (i, r) in rows.iter().enumerate() {
            let rh = format!("{here}[{i}]");
            let rm = as_obj(r, &rh)?;
            let field = |k: &str| -> Result<&str> { as_str(get(rm, k, &rh)?, &format!("{rh}.{k}")) };
            let h = find(&e.on_loose[l].apex, field("het")?, &rh)?;
            let x = find(&e.on_objects[a.src], field("element")?, &rh)?;
            let bb = find(&b.on_loose[l].apex, field("base")?, &rh)?;
            fw[h] = Some((x, bb));
            lf.insert((x, bb), h);
        }
        forward.push(fw.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| Error::parse(&here, "some heteromorphism has no row"))?);
        lift.push(lf);
    }
    let w = DopfWitness { forward, lift };
    if !w.check(&p) {
        return Err(Error::parse(at, "bijections do not match the morphism"));
    }
    Ok((p, w))
}

pub(super) fn counterexample_body(c: &DopfCounterexample) -> Map {
    let mut m = Map::new();
    m.insert("loose".into(), c.loose.clone().into());
    m.insert("heteromorphism".into(), c.heteromorphism.clone().into());
    m.insert("element".into(), c.element.clone().into());
    m.insert("lifts".into(), json!(c.lifts));
    m
}

pub(super) fn parse_counterexample(m: &Map) -> Result<DopfCounterexample> {
    let at = "dopf_counterexample";
    let s = |k: &str| -> Result<String> { as_str(get(m, k, at)?, &format!("{at}.{k}")).map(str::to_string) };
    Ok(DopfCounterexample { loose: s("loose")?, heteromorphism: s("heteromorphism")?, element: s("element")?, lifts: strings(get(m, "lifts", at)?, "dopf_counterexample.lifts")? })
}
