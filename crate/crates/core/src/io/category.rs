use std::collections::HashMap;
use std::sync::Arc;

use serde_json::{json, Value};

use super::{as_arr, as_obj, as_str, func, func_value, get, known_keys, label_set, lookup, strings, Document, Loader, Map};
use crate::collage::{Copresheaf, FinCategory, GenKind, PresentedCategory};
use crate::error::{Error, Result};
use crate::finset::{identity, FiniteSet, Func};

pub(super) fn presented_body(p: &PresentedCategory) -> Map {
    let mut m = Map::new();
    m.insert("objects".into(), json!(p.objects));
    let gens: Vec<Value> = p
        .generators
        .iter()
        .map(|g| {
            let mut e = json!({"id": g.name, "src": p.objects[g.src], "dst": p.objects[g.dst]});
            if g.kind != GenKind::Plain {
                e["origin"] = serde_json::to_value(&g.kind).expect("serializable");
            }
            e
        })
        .collect();
    m.insert("generators".into(), Value::Array(gens));
    let word = |w: &[usize]| -> Vec<&str> { w.iter().map(|&g| p.generators[g].name.as_str()).collect() };
    let rels: Vec<Value> = p
        .relations
        .iter()
        .map(|r| if r.lhs.is_empty() && r.rhs.is_empty() { json!({"src": p.objects[r.src], "lhs": [], "rhs": []}) } else { json!([word(&r.lhs), word(&r.rhs)]) })
        .collect();
    m.insert("relations".into(), Value::Array(rels));
    m
}

pub(super) fn parse_presented(m: &Map, at: &str) -> Result<PresentedCategory> {
    let mut p = PresentedCategory::default();
    let objects = strings(get(m, "objects", at)?, &format!("{at}.objects"))?;
    if FiniteSet::new(objects.iter().cloned()).is_err() {
        return Err(Error::parse(format!("{at}.objects"), "duplicate object"));
    }
    for o in &objects {
        p.add_object(o.clone());
    }
    let on: Vec<&str> = objects.iter().map(String::as_str).collect();
    for (i, g) in as_arr(get(m, "generators", at)?, &format!("{at}.generators"))?.iter().enumerate() {
        let here = format!("{at}.generators[{i}]");
        let gm = as_obj(g, &here)?;
        let name = as_str(get(gm, "id", &here)?, &here)?;
        if p.generator_named(name).is_some() {
            return Err(Error::parse(here, format!("duplicate generator {name:?}")));
        }
        let src = lookup(&on, as_str(get(gm, "src", &here)?, &here)?, "object", &here)?;
        let dst = lookup(&on, as_str(get(gm, "dst", &here)?, &here)?, "object", &here)?;
        let kind = match gm.get("origin") {
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::parse(format!("{here}.origin"), e.to_string()))?,
            None => GenKind::Plain,
        };
        p.add_generator(name, src, dst, kind);
    }
    let rels = m.get("relations").map(|v| as_arr(v, &format!("{at}.relations"))).transpose()?;
    for (i, r) in rels.into_iter().flatten().enumerate() {
        let here = format!("{at}.relations[{i}]");
        let (lhs, rhs, src) = match r {
            Value::Array(pair) if pair.len() == 2 => (strings(&pair[0], &here)?, strings(&pair[1], &here)?, None),
            Value::Object(rm) => (strings(get(rm, "lhs", &here)?, &here)?, strings(get(rm, "rhs", &here)?, &here)?, rm.get("src").map(|s| as_str(s, &here)).transpose()?),
            _ => return Err(Error::parse(here, "expected [lhs, rhs] or {src, lhs, rhs}")),
        };
        let word = |w: &[String]| -> Result<Vec<usize>> { w.iter().map(|g| p.generator_named(g).ok_or_else(|| Error::parse(&here, format!("unknown generator {g:?}")))).collect() };
        let (l, r) = (word(&lhs)?, word(&rhs)?);
        let src = match src {
            Some(s) => lookup(&on, s, "object", &here)?,
            None => match l.first().or(r.first()) {
                Some(&g) => p.generators[g].src,
                None => return Err(Error::parse(here, "a relation between empty words needs src")),
            },
        };
        p.add_relation(src, l, r);
    }
    p.check_relations()?;
    Ok(p)
}

pub(super) fn fin_category_body(c: &FinCategory) -> Map {
    let mut m = Map::new();
    m.insert("objects".into(), json!(c.objects));
    m.insert("homs".into(), c.morphisms.iter().map(|f| json!({"id": f.name, "src": c.objects[f.src], "dst": c.objects[f.dst]})).collect());
    m.insert("identities".into(), Value::Object(c.identities.iter().enumerate().map(|(o, &i)| (c.objects[o].clone(), Value::from(c.morphisms[i].name.clone()))).collect()));
    let name = |f: usize| c.morphisms[f].name.as_str();
    m.insert(
        "comp".into(),
        c.composable_pairs().into_iter().filter(|&(f, g, _)| !c.is_identity(f) && !c.is_identity(g)).map(|(f, g, h)| json!([name(f), name(g), name(h)])).collect(),
    );
    m
}

/// Composites with an identity are implied and may be left out of `comp`.
pub(super) fn parse_fin_category(m: &Map) -> Result<FinCategory> {
    let at = "fin_category";
    let objects = strings(get(m, "objects", at)?, "fin_category.objects")?;
    let on: Vec<&str> = objects.iter().map(String::as_str).collect();
    let mut homs = Vec::new();
    for (i, h) in as_arr(get(m, "homs", at)?, "fin_category.homs")?.iter().enumerate() {
        let here = format!("fin_category.homs[{i}]");
        let hm = as_obj(h, &here)?;
        let name = as_str(get(hm, "id", &here)?, &here)?.to_string();
        let src = lookup(&on, as_str(get(hm, "src", &here)?, &here)?, "object", &here)?;
        let dst = lookup(&on, as_str(get(hm, "dst", &here)?, &here)?, "object", &here)?;
        homs.push((name, src, dst));
    }
    let hn: Vec<&str> = homs.iter().map(|h| h.0.as_str()).collect();
    if FiniteSet::new(hn.iter().copied()).is_err() {
        return Err(Error::parse("fin_category.homs", "duplicate morphism name"));
    }
    let ids = as_obj(get(m, "identities", at)?, "fin_category.identities")?;
    known_keys(ids, &on, "object", "fin_category.identities")?;
    let identities: Vec<usize> = on
        .iter()
        .enumerate()
        .map(|(o, name)| {
            let here = format!("fin_category.identities.{name}");
            let i = lookup(&hn, as_str(ids.get(*name).ok_or_else(|| Error::parse(&here, "missing identity"))?, &here)?, "morphism", &here)?;
            if homs[i].1 != o || homs[i].2 != o {
                return Err(Error::parse(here, "identity is not an endomorphism of its object"));
            }
            Ok(i)
        })
        .collect::<Result<_>>()?;
    let mut table: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, e) in as_arr(get(m, "comp", at)?, "fin_category.comp")?.iter().enumerate() {
        let here = format!("fin_category.comp[{i}]");
        let w = strings(e, &here)?;
        if w.len() != 3 {
            return Err(Error::parse(here, "expected a triple [f, g, f·g]"));
        }
        let ix = |s: &str| lookup(&hn, s, "morphism", &here);
        table.insert((ix(&w[0])?, ix(&w[1])?), ix(&w[2])?);
    }
    let is_id: Vec<bool> = (0..homs.len()).map(|f| identities.contains(&f)).collect();
    for f in 0..homs.len() {
        for g in 0..homs.len() {
            if homs[f].2 != homs[g].1 {
                continue;
            }
            let implied = if is_id[f] {
                Some(g)
            } else if is_id[g] {
                Some(f)
            } else {
                None
            };
            match (table.get(&(f, g)), implied) {
                (None, Some(h)) => {
                    table.insert((f, g), h);
                }
                (None, None) => return Err(Error::parse("fin_category.comp", format!("missing composite {}·{}", hn[f], hn[g]))),
                _ => {}
            }
        }
    }
    let c = FinCategory::from_table(objects.clone(), homs.clone(), identities, |f, g| table[&(f, g)]);
    let r = c.validate();
    if !r.is_ok() {
        return Err(Error::Invalid(format!("not a category:\n{r}")));
    }
    Ok(c)
}

pub(super) fn copresheaf_body(p: &Copresheaf) -> Map {
    let c = &*p.base;
    let mut m = Map::new();
    m.insert("category".into(), super::envelope("fin_category", fin_category_body(c)));
    m.insert("sets".into(), c.objects.iter().zip(&p.sets).map(|(o, s)| (o.clone(), json!(s))).collect());
    m.insert(
        "maps".into(),
        c.morphisms
            .iter()
            .zip(&p.maps)
            .enumerate()
            .filter(|&(i, _)| !c.is_identity(i))
            .map(|(_, (f, g))| (f.name.clone(), func_value(g, &p.sets[f.src], &p.sets[f.dst])))
            .collect(),
    );
    m
}

pub(super) fn parse_copresheaf(cx: &Loader, m: &Map) -> Result<Copresheaf> {
    let at = "copresheaf";
    let base = match cx.resolve(get(m, "category", at)?, "fin_category", "copresheaf.category")? {
        Document::FinCategory(c) => c,
        _ => unreachable!("resolve returns the requested kind"),
    };
    let sets_v = as_obj(get(m, "sets", at)?, "copresheaf.sets")?;
    known_keys(sets_v, &base.objects.iter().map(String::as_str).collect::<Vec<_>>(), "object", "copresheaf.sets")?;
    let sets: Vec<FiniteSet> = base
        .objects
        .iter()
        .map(|o| {
            let here = format!("copresheaf.sets.{o}");
            label_set(sets_v.get(o).ok_or_else(|| Error::parse(&here, "missing object"))?, &here)
        })
        .collect::<Result<_>>()?;
    let maps_v = as_obj(get(m, "maps", at)?, "copresheaf.maps")?;
    known_keys(maps_v, &base.morphisms.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(), "morphism", "copresheaf.maps")?;
    let maps: Vec<Func> = base
        .morphisms
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let here = format!("copresheaf.maps.{}", f.name);
            match maps_v.get(&f.name) {
                Some(v) => func(v, &sets[f.src], &sets[f.dst], &here),
                None if base.is_identity(i) => Ok(identity(sets[f.src].len())),
                None => Err(Error::parse(here, "missing map")),
            }
        })
        .collect::<Result<_>>()?;
    Ok(Copresheaf { base, sets, maps })
}

/// Move a copresheaf onto another presentation of the same category,
/// matching objects and morphisms by name.
pub fn rebase_copresheaf(p: &Copresheaf, base: &Arc<FinCategory>) -> Result<Copresheaf> {
    let c = &*p.base;
    if c.num_objects() != base.num_objects() || c.num_morphisms() != base.num_morphisms() {
        return Err(Error::Mismatch("the categories have different sizes".into()));
    }
    let mut sets = Vec::with_capacity(base.num_objects());
    for o in &base.objects {
        let i = c.object_named(o).ok_or_else(|| Error::Mismatch(format!("no object {o:?}")))?;
        sets.push(p.sets[i].clone());
    }
    let mut maps = Vec::with_capacity(base.num_morphisms());
    for (j, f) in base.morphisms.iter().enumerate() {
        let i = c.morphism_named(&f.name).ok_or_else(|| Error::Mismatch(format!("no morphism {:?}", f.name)))?;
        if c.objects[c.src(i)] != base.objects[f.src] || c.objects[c.dst(i)] != base.objects[f.dst] {
            return Err(Error::Mismatch(format!("morphism {:?} has different endpoints", f.name)));
        }
        for &g in base.out_of(f.dst) {
            let gi = c.morphism_named(&base.morphisms[g].name).ok_or_else(|| Error::Mismatch(format!("no morphism {:?}", base.morphisms[g].name)))?;
            let theirs = c.compose(i, gi);
            let ours = base.compose(j, g).map(|h| base.morphisms[h].name.as_str());
            if theirs.map(|h| c.morphisms[h].name.as_str()) != ours {
                return Err(Error::Mismatch(format!("composites with {:?} differ", f.name)));
            }
        }
        maps.push(p.maps[i].clone());
    }
    Ok(Copresheaf { base: base.clone(), sets, maps })
}
