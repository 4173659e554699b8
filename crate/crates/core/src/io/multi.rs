use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde_json::{json, Value};

use super::theory::theory_ref;
use super::{as_arr, as_obj, as_str, func, func_value, get, known_keys, label_set, lookup, strings, Document, Loader, Map};
use crate::cartesian::{tuples, Multicategory, Multifunctor, Multimorphism};
use crate::error::{Error, Result};
use crate::finset::{FiniteSet, Func};
use crate::sketch::{flatten_cartesian_theory, flatten_theory, LimitSketch, SketchModel};

pub(super) fn multicategory_body(mc: &Multicategory) -> Map {
    let name = |f: usize| mc.morphisms[f].name.clone();
    let mut m = Map::new();
    m.insert("objects".into(), json!(mc.objects));
    m.insert(
        "multimorphisms".into(),
        mc.morphisms.iter().map(|f| json!({"id": f.name, "dom": f.dom.iter().map(|&o| mc.objects[o].clone()).collect::<Vec<_>>(), "cod": mc.objects[f.cod]})).collect(),
    );
    m.insert("identities".into(), Value::Object(mc.identities.iter().enumerate().map(|(o, &i)| (mc.objects[o].clone(), Value::from(name(i)))).collect()));
    m.insert("comp".into(), mc.partial.iter().map(|(&(f, i, g), &r)| json!({"outer": name(f), "position": i, "inner": name(g), "result": name(r)})).collect());
    if !mc.sigma.is_empty() {
        m.insert("sigma_actions".into(), mc.sigma.iter().map(|((f, s), &r)| json!({"morphism": name(*f), "map": s, "result": name(r)})).collect());
    }
    m
}

pub(super) fn parse_multicategory(m: &Map) -> Result<Multicategory> {
    let at = "multicategory";
    let objects = strings(get(m, "objects", at)?, "multicategory.objects")?;
    let on: Vec<&str> = objects.iter().map(String::as_str).collect();
    let mut morphisms = Vec::new();
    for (i, f) in as_arr(get(m, "multimorphisms", at)?, "multicategory.multimorphisms")?.iter().enumerate() {
        let here = format!("multicategory.multimorphisms[{i}]");
        let fm = as_obj(f, &here)?;
        let name = as_str(get(fm, "id", &here)?, &here)?.to_string();
        let dom = strings(get(fm, "dom", &here)?, &here)?.iter().map(|o| lookup(&on, o, "object", &here)).collect::<Result<_>>()?;
        let cod = lookup(&on, as_str(get(fm, "cod", &here)?, &here)?, "object", &here)?;
        morphisms.push(Multimorphism { name, dom, cod });
    }
    let fnames: Vec<&str> = morphisms.iter().map(|f| f.name.as_str()).collect();
    if FiniteSet::new(fnames.iter().copied()).is_err() {
        return Err(Error::parse("multicategory.multimorphisms", "duplicate multimorphism name"));
    }
    let ids = as_obj(get(m, "identities", at)?, "multicategory.identities")?;
    known_keys(ids, &on, "object", "multicategory.identities")?;
    let identities = on
        .iter()
        .map(|o| {
            let here = format!("multicategory.identities.{o}");
            lookup(&fnames, as_str(ids.get(*o).ok_or_else(|| Error::parse(&here, "missing identity"))?, &here)?, "multimorphism", &here)
        })
        .collect::<Result<_>>()?;
    let mut partial = BTreeMap::new();
    for (i, e) in as_arr(get(m, "comp", at)?, "multicategory.comp")?.iter().enumerate() {
        let here = format!("multicategory.comp[{i}]");
        let em = as_obj(e, &here)?;
        let f = |k: &str| lookup(&fnames, as_str(get(em, k, &here)?, &here)?, "multimorphism", &here);
        let pos = get(em, "position", &here)?.as_u64().ok_or_else(|| Error::parse(&here, "position must be a natural number"))? as usize;
        partial.insert((f("outer")?, pos, f("inner")?), f("result")?);
    }
    let mut sigma = BTreeMap::new();
    if let Some(v) = m.get("sigma_actions") {
        for (i, e) in as_arr(v, "multicategory.sigma_actions")?.iter().enumerate() {
            let here = format!("multicategory.sigma_actions[{i}]");
            let em = as_obj(e, &here)?;
            let f = |k: &str| lookup(&fnames, as_str(get(em, k, &here)?, &here)?, "multimorphism", &here);
            let s: Vec<usize> = serde_json::from_value(get(em, "map", &here)?.clone()).map_err(|e| Error::parse(&here, e.to_string()))?;
            sigma.insert((f("morphism")?, s), f("result")?);
        }
    }
    Ok(Multicategory { objects, morphisms, identities, partial, sigma })
}

pub(super) fn multifunctor_body(f: &Multifunctor) -> Map {
    let mc = &*f.multicategory;
    let mut m = Map::new();
    m.insert("multicategory".into(), super::envelope("multicategory", multicategory_body(mc)));
    m.insert("sets".into(), mc.objects.iter().zip(&f.sets).map(|(o, s)| (o.clone(), json!(s))).collect());
    m.insert(
        "actions".into(),
        mc.morphisms
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let rows: Vec<Value> = tuples(&f.input_sizes(i))
                    .iter()
                    .zip(&f.actions[i])
                    .map(|(xs, &v)| {
                        let args: Vec<&str> = xs.iter().zip(&g.dom).map(|(&x, &o)| f.sets[o].label(x)).collect();
                        json!({"args": args, "value": f.sets[g.cod].label(v)})
                    })
                    .collect();
                (g.name.clone(), Value::Array(rows))
            })
            .collect(),
    );
    m
}

pub(super) fn parse_multifunctor(cx: &Loader, m: &Map) -> Result<Multifunctor> {
    let at = "multifunctor";
    let mc = match cx.resolve(get(m, "multicategory", at)?, "multicategory", "multifunctor.multicategory")? {
        Document::Multicategory(mc) => mc,
        _ => unreachable!("resolve returns the requested kind"),
    };
    let sets_v = as_obj(get(m, "sets", at)?, "multifunctor.sets")?;
    known_keys(sets_v, &mc.objects.iter().map(String::as_str).collect::<Vec<_>>(), "object", "multifunctor.sets")?;
    let sets: Vec<FiniteSet> = mc
        .objects
        .iter()
        .map(|o| {
            let here = format!("multifunctor.sets.{o}");
            label_set(sets_v.get(o).ok_or_else(|| Error::parse(&here, "missing object"))?, &here)
        })
        .collect::<Result<_>>()?;
    let acts = as_obj(get(m, "actions", at)?, "multifunctor.actions")?;
    known_keys(acts, &mc.morphisms.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(), "multimorphism", "multifunctor.actions")?;
    let mut actions = Vec::new();
    for g in &mc.morphisms {
        let here = format!("multifunctor.actions.{}", g.name);
        let mut table: HashMap<Vec<usize>, usize> = HashMap::new();
        for (i, row) in as_arr(acts.get(&g.name).ok_or_else(|| Error::parse(&here, "missing action"))?, &here)?.iter().enumerate() {
            let rh = format!("{here}[{i}]");
            let rm = as_obj(row, &rh)?;
            let args = strings(get(rm, "args", &rh)?, &rh)?;
            if args.len() != g.dom.len() {
                return Err(Error::parse(rh, "wrong number of arguments"));
            }
            let xs = args.iter().zip(&g.dom).map(|(a, &o)| super::find(&sets[o], a, &rh)).collect::<Result<Vec<_>>>()?;
            let v = super::find(&sets[g.cod], as_str(get(rm, "value", &rh)?, &rh)?, &rh)?;
            table.insert(xs, v);
        }
        let sizes: Vec<usize> = g.dom.iter().map(|&o| sets[o].len()).collect();
        let f: Func = tuples(&sizes).iter().map(|xs| table.get(xs).copied().ok_or_else(|| Error::parse(&here, format!("no value at {xs:?}")))).collect::<Result<_>>()?;
        actions.push(f);
    }
    Ok(Multifunctor { multicategory: mc, sets, actions })
}

fn is_cartesian_sketch(s: &LimitSketch) -> bool {
    !s.marked_products.is_empty()
}

pub(super) fn sketch_body(s: &LimitSketch) -> Map {
    let p = &s.presented;
    let mut m = Map::new();
    m.insert("theory".into(), theory_ref(&s.theory));
    m.insert("cartesian".into(), is_cartesian_sketch(s).into());
    m.extend(super::category::presented_body(p));
    m.insert("classes".into(), s.classes.iter().map(|c| Value::from(c.rule())).collect());
    let g = |i: usize| p.generators[i].name.as_str();
    m.insert(
        "marked_pullbacks".into(),
        s.marked_pullbacks.iter().map(|q| json!({"apex": p.objects[q.apex], "p1": g(q.p1), "p2": g(q.p2), "q1": g(q.q1), "q2": g(q.q2)})).collect(),
    );
    m.insert(
        "marked_products".into(),
        s.marked_products
            .iter()
            .map(|c| {
                let legs: Vec<Value> = c.legs.iter().map(|(o, w)| json!({"factor": p.objects[*o], "word": w.iter().map(|&i| g(i)).collect::<Vec<_>>()})).collect();
                json!({"apex": p.objects[c.apex], "legs": legs})
            })
            .collect(),
    );
    m
}

/// The sketch is rebuilt from its theory; a stored payload must agree
/// with the rebuilt one.
pub(super) fn parse_sketch(cx: &Loader, m: &Map) -> Result<LimitSketch> {
    let at = "sketch";
    let t = match cx.resolve(get(m, "theory", at)?, "theory", "sketch.theory")? {
        Document::Theory(t) => t,
        _ => unreachable!("resolve returns the requested kind"),
    };
    let cartesian = m.get("cartesian").and_then(Value::as_bool).unwrap_or(false);
    let s = if cartesian { flatten_cartesian_theory(&t)? } else { flatten_theory(&t) };
    let rebuilt = sketch_body(&s);
    for key in ["objects", "generators", "relations", "classes", "marked_pullbacks", "marked_products"] {
        if let Some(v) = m.get(key) {
            if Some(v) != rebuilt.get(key) {
                return Err(Error::parse(format!("sketch.{key}"), "does not match the flattening of the theory"));
            }
        }
    }
    Ok(s)
}

pub(super) fn sketch_model_body(s: &SketchModel) -> Map {
    let p = &s.sketch.presented;
    let mut m = Map::new();
    m.insert("sketch".into(), super::envelope("sketch", sketch_body(&s.sketch)));
    m.insert("sets".into(), p.objects.iter().zip(&s.sets).map(|(o, x)| (o.clone(), json!(x))).collect());
    m.insert("maps".into(), p.generators.iter().zip(&s.maps).map(|(g, f)| (g.name.clone(), func_value(f, &s.sets[g.src], &s.sets[g.dst]))).collect());
    m
}

pub(super) fn parse_sketch_model(cx: &Loader, m: &Map) -> Result<SketchModel> {
    let at = "sketch_model";
    let sketch: Arc<LimitSketch> = match cx.resolve(get(m, "sketch", at)?, "sketch", "sketch_model.sketch")? {
        Document::Sketch(s) => s,
        _ => unreachable!("resolve returns the requested kind"),
    };
    let p = &sketch.presented;
    let sets_v = as_obj(get(m, "sets", at)?, "sketch_model.sets")?;
    known_keys(sets_v, &p.objects.iter().map(String::as_str).collect::<Vec<_>>(), "object", "sketch_model.sets")?;
    let sets: Vec<FiniteSet> = p
        .objects
        .iter()
        .map(|o| {
            let here = format!("sketch_model.sets.{o}");
            label_set(sets_v.get(o).ok_or_else(|| Error::parse(&here, "missing object"))?, &here)
        })
        .collect::<Result<_>>()?;
    let maps_v = as_obj(get(m, "maps", at)?, "sketch_model.maps")?;
    known_keys(maps_v, &p.generators.iter().map(|g| g.name.as_str()).collect::<Vec<_>>(), "generator", "sketch_model.maps")?;
    let maps = p
        .generators
        .iter()
        .map(|g| {
            let here = format!("sketch_model.maps.{}", g.name);
            func(maps_v.get(&g.name).ok_or_else(|| Error::parse(&here, "missing map"))?, &sets[g.src], &sets[g.dst], &here)
        })
        .collect::<Result<_>>()?;
    Ok(SketchModel { sketch, sets, maps })
}
