use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::{as_arr, as_obj, as_str, get, lookup, strings, Loader, Map};
use crate::error::{Error, Result};
use crate::theory_core::{
    builtin_theory, close_presentation, Arrow, Builtin, CartesianStructure, Cell, DoubleTheory, LooseProductCone, ProductCone, TheoryPresentation, ID_PREFIX,
};

pub(super) fn builtin_ref(s: &str, at: &str) -> Result<DoubleTheory> {
    let name = s.strip_prefix("builtin:").unwrap_or(s);
    Builtin::parse(name).map(builtin_theory).ok_or_else(|| Error::parse(at, format!("unknown builtin theory {name:?}")))
}

/// `builtin:NAME` when the theory is exactly a shipped one, the full
/// document otherwise.
pub(super) fn theory_ref(t: &DoubleTheory) -> Value {
    if let Some(b) = Builtin::parse(&t.name) {
        if builtin_theory(b) == *t {
            return Value::from(format!("builtin:{}", b.name()));
        }
    }
    super::envelope("theory", theory_body(t))
}

fn triples<K: Copy>(table: &BTreeMap<(K, K), K>, name: impl Fn(K) -> String) -> Value {
    Value::Array(table.iter().map(|(&(a, b), &c)| json!([name(a), name(b), name(c)])).collect())
}

pub(super) fn theory_body(t: &DoubleTheory) -> Map {
    let arrows = |v: &[Arrow]| -> Value { v.iter().map(|a| json!({"id": a.name, "src": t.objects[a.src], "dst": t.objects[a.dst]})).collect() };
    let tn = |f: usize| t.tight[f].name.clone();
    let ln = |m: usize| t.loose[m].name.clone();
    let cn = |c: usize| t.cells[c].name.clone();
    let mut m = Map::new();
    m.insert("name".into(), t.name.clone().into());
    m.insert("objects".into(), json!(t.objects));
    m.insert("tight".into(), arrows(&t.tight));
    m.insert("loose".into(), arrows(&t.loose));
    m.insert("cells".into(), t.cells.iter().map(|c| json!({"id": c.name, "left": tn(c.left), "right": tn(c.right), "top": ln(c.top), "bottom": ln(c.bottom)})).collect());
    m.insert("tight_comp".into(), triples(&t.tight_comp, tn));
    m.insert("loose_comp".into(), triples(&t.loose_comp, ln));
    m.insert("cell_vcomp".into(), triples(&t.cell_vcomp, cn));
    m.insert("cell_hcomp".into(), triples(&t.cell_hcomp, cn));
    if t.partial {
        m.insert("partial".into(), true.into());
    }
    if let Some(cs) = &t.cartesian {
        let products: Vec<Value> =
            cs.products.iter().map(|(&(a, b), p)| json!({"factors": [t.objects[a], t.objects[b]], "apex": t.objects[p.apex], "proj": [tn(p.proj.0), tn(p.proj.1)]})).collect();
        let loose_products: Vec<Value> =
            cs.loose_products.iter().map(|(&(a, b), p)| json!({"factors": [ln(a), ln(b)], "apex": ln(p.apex), "proj": [cn(p.proj.0), cn(p.proj.1)]})).collect();
        m.insert(
            "cartesian".into(),
            json!({
                "terminal": t.objects[cs.terminal],
                "products": products,
                "loose_terminal": ln(cs.loose_terminal),
                "loose_products": loose_products,
            }),
        );
    }
    m
}

fn unique(names: &[&str], what: &str, at: &str) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    match names.iter().find(|n| !seen.insert(**n)) {
        Some(n) => Err(Error::parse(at, format!("duplicate {what} {n:?}"))),
        None => Ok(()),
    }
}

fn parse_arrows(v: &Value, objects: &[&str], at: &str) -> Result<Vec<Arrow>> {
    as_arr(v, at)?
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let here = format!("{at}[{i}]");
            let m = as_obj(a, &here)?;
            let name = as_str(get(m, "id", &here)?, &here)?.to_string();
            let src = lookup(objects, as_str(get(m, "src", &here)?, &here)?, "object", &format!("{here}.src"))?;
            let dst = lookup(objects, as_str(get(m, "dst", &here)?, &here)?, "object", &format!("{here}.dst"))?;
            Ok(Arrow { name, src, dst })
        })
        .collect()
}

fn parse_table(m: &Map, key: &str, names: &[&str], what: &str) -> Result<BTreeMap<(usize, usize), usize>> {
    let Some(v) = m.get(key) else { return Ok(BTreeMap::new()) };
    let mut out = BTreeMap::new();
    for (i, e) in as_arr(v, key)?.iter().enumerate() {
        let here = format!("{key}[{i}]");
        let w = strings(e, &here)?;
        if w.len() != 3 {
            return Err(Error::parse(here, "expected a triple [a, b, composite]"));
        }
        let ix = |s: &str| lookup(names, s, what, &here);
        if out.insert((ix(&w[0])?, ix(&w[1])?), ix(&w[2])?).is_some() {
            return Err(Error::parse(here, "composite listed twice"));
        }
    }
    Ok(out)
}

pub(super) fn parse_theory(cx: &Loader, m: &Map, kind: &str) -> Result<DoubleTheory> {
    if kind == "theory_presentation" {
        let p: TheoryPresentation = super::from_map(m, kind)?;
        return close_presentation(&p, cx.cfg.max_word_len);
    }
    if let Some(b) = m.get("builtin") {
        return builtin_ref(as_str(b, "theory.builtin")?, "theory.builtin");
    }
    let name = m.get("name").and_then(Value::as_str).unwrap_or("theory").to_string();
    let objects = strings(get(m, "objects", "theory")?, "theory.objects")?;
    let on: Vec<&str> = objects.iter().map(String::as_str).collect();
    unique(&on, "object", "theory.objects")?;
    let tight = parse_arrows(get(m, "tight", "theory")?, &on, "theory.tight")?;
    let loose = parse_arrows(get(m, "loose", "theory")?, &on, "theory.loose")?;
    let tn: Vec<&str> = tight.iter().map(|a| a.name.as_str()).collect();
    let ln: Vec<&str> = loose.iter().map(|a| a.name.as_str()).collect();
    unique(&tn, "tight arrow", "theory.tight")?;
    unique(&ln, "loose arrow", "theory.loose")?;
    let mut cells = Vec::new();
    for (i, c) in as_arr(get(m, "cells", "theory")?, "theory.cells")?.iter().enumerate() {
        let here = format!("theory.cells[{i}]");
        let cm = as_obj(c, &here)?;
        let field = |k: &str| -> Result<&str> { as_str(get(cm, k, &here)?, &format!("{here}.{k}")) };
        cells.push(Cell {
            name: field("id")?.to_string(),
            left: lookup(&tn, field("left")?, "tight arrow", &here)?,
            right: lookup(&tn, field("right")?, "tight arrow", &here)?,
            top: lookup(&ln, field("top")?, "loose arrow", &here)?,
            bottom: lookup(&ln, field("bottom")?, "loose arrow", &here)?,
        });
    }
    let cn: Vec<&str> = cells.iter().map(|c| c.name.as_str()).collect();
    unique(&cn, "cell", "theory.cells")?;

    let ident = |arrows: &[Arrow], what: &str| -> Result<Vec<usize>> {
        (0..objects.len())
            .map(|x| {
                let id = format!("{ID_PREFIX}{}", objects[x]);
                arrows.iter().position(|a| a.name == id && a.src == x && a.dst == x).ok_or_else(|| Error::parse(format!("theory.{what}"), format!("missing identity {id:?}")))
            })
            .collect()
    };
    let tight_id = ident(&tight, "tight")?;
    let loose_id = ident(&loose, "loose")?;
    let id_cell = |name: &str, l: usize, r: usize, tp: usize, bt: usize| -> Result<usize> {
        let id = format!("{ID_PREFIX}{name}");
        cells
            .iter()
            .position(|c| c.name == id && (c.left, c.right, c.top, c.bottom) == (l, r, tp, bt))
            .ok_or_else(|| Error::parse("theory.cells", format!("missing identity cell {id:?}")))
    };
    let cell_tight_id = tight.iter().enumerate().map(|(f, a)| id_cell(&a.name, f, f, loose_id[a.src], loose_id[a.dst])).collect::<Result<Vec<_>>>()?;
    let cell_loose_id = loose
        .iter()
        .enumerate()
        .map(|(i, a)| {
            // The identity loose arrow shares its cell with the identity tight arrow.
            match loose_id.iter().position(|&l| l == i) {
                Some(x) => Ok(cell_tight_id[tight_id[x]]),
                None => id_cell(&a.name, tight_id[a.src], tight_id[a.dst], i, i),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let cartesian = match m.get("cartesian") {
        None | Some(Value::Null) => None,
        Some(v) => Some(parse_cartesian(v, &on, &tn, &ln, &cn)?),
    };
    Ok(DoubleTheory {
        name,
        tight_comp: parse_table(m, "tight_comp", &tn, "tight arrow")?,
        loose_comp: parse_table(m, "loose_comp", &ln, "loose arrow")?,
        cell_vcomp: parse_table(m, "cell_vcomp", &cn, "cell")?,
        cell_hcomp: parse_table(m, "cell_hcomp", &cn, "cell")?,
        partial: m.get("partial").and_then(Value::as_bool).unwrap_or(false),
        objects: objects.clone(),
        tight,
        tight_id,
        loose,
        loose_id,
        cells,
        cell_loose_id,
        cell_tight_id,
        cartesian,
    })
}

fn parse_cartesian(v: &Value, on: &[&str], tn: &[&str], ln: &[&str], cn: &[&str]) -> Result<CartesianStructure> {
    let at = "theory.cartesian";
    let m = as_obj(v, at)?;
    let name = |k: &str, names: &[&str], what: &str| lookup(names, as_str(get(m, k, at)?, at)?, what, &format!("{at}.{k}"));
    let cones = |key: &str, factors: &[&str], fw: &str, projs: &[&str], pw: &str| -> Result<Vec<((usize, usize), usize, (usize, usize))>> {
        let Some(list) = m.get(key) else { return Ok(Vec::new()) };
        as_arr(list, key)?
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let here = format!("{at}.{key}[{i}]");
                let cm = as_obj(c, &here)?;
                let f = strings(get(cm, "factors", &here)?, &here)?;
                let p = strings(get(cm, "proj", &here)?, &here)?;
                if f.len() != 2 || p.len() != 2 {
                    return Err(Error::parse(here, "a binary cone needs two factors and two projections"));
                }
                let apex = lookup(factors, as_str(get(cm, "apex", &here)?, &here)?, fw, &here)?;
                Ok(((lookup(factors, &f[0], fw, &here)?, lookup(factors, &f[1], fw, &here)?), apex, (lookup(projs, &p[0], pw, &here)?, lookup(projs, &p[1], pw, &here)?)))
            })
            .collect()
    };
    Ok(CartesianStructure {
        terminal: name("terminal", on, "object")?,
        products: cones("products", on, "object", tn, "tight arrow")?.into_iter().map(|(k, apex, proj)| (k, ProductCone { apex, proj })).collect(),
        loose_terminal: name("loose_terminal", ln, "loose arrow")?,
        loose_products: cones("loose_products", ln, "loose arrow", cn, "cell")?.into_iter().map(|(k, apex, proj)| (k, LooseProductCone { apex, proj })).collect(),
    })
}
