//! Signed categories from signed graphs, as models of the signed theory.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{SpanModel, SpanOfSets};
use crate::error::{Error, Result};
use crate::finset::FiniteSet;
use crate::theory_core::{builtin_theory, Builtin};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedEdge {
    pub name: String,
    pub src: String,
    pub dst: String,
    #[serde(default)]
    pub negative: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<SignedEdge>,
}

impl SignedGraph {
    pub fn new(vertices: &[&str], edges: &[(&str, &str, &str, bool)]) -> Self {
        SignedGraph {
            vertices: vertices.iter().map(|v| v.to_string()).collect(),
            edges: edges.iter().map(|&(name, src, dst, negative)| SignedEdge { name: name.into(), src: src.into(), dst: dst.into(), negative }).collect(),
        }
    }

    /// Edges as `(src, dst, negative)` vertex indices.
    fn resolve(&self) -> Result<Vec<(usize, usize, bool)>> {
        let vs = FiniteSet::new(self.vertices.iter().cloned())?;
        let mut names = BTreeSet::new();
        self.edges
            .iter()
            .map(|e| {
                if !names.insert(e.name.as_str()) {
                    return Err(Error::Invalid(format!("duplicate edge {:?}", e.name)));
                }
                if e.name.contains('·') || e.name.starts_with("id@") || e.name.starts_with('⊥') {
                    return Err(Error::Invalid(format!("reserved edge name {:?}", e.name)));
                }
                let find = |v: &str| vs.find(v).ok_or_else(|| Error::Invalid(format!("edge {} has unknown endpoint {v:?}", e.name)));
                Ok((find(&e.src)?, find(&e.dst)?, e.negative))
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
enum Arr {
    Path { src: usize, dst: usize, edges: Vec<usize> },
    Overflow { src: usize, dst: usize },
}

struct SignedCat {
    arrows: Vec<(Arr, bool)>,
    paths: HashMap<(usize, Vec<usize>), usize>,
    overflow: HashMap<(usize, usize, bool), usize>,
}

fn build(g: &SignedGraph, max_len: usize) -> Result<(SignedCat, Vec<(usize, usize, bool)>)> {
    let es = g.resolve()?;
    let nv = g.vertices.len();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (i, &(s, _, _)) in es.iter().enumerate() {
        out[s].push(i);
    }
    let mut arrows = Vec::new();
    let mut layer: Vec<(usize, usize, Vec<usize>, bool)> = (0..nv).map(|v| (v, v, Vec::new(), false)).collect();
    for len in 0..=max_len {
        let name_key = |p: &(usize, usize, Vec<usize>, bool)| p.2.iter().map(|&e| g.edges[e].name.clone()).collect::<Vec<_>>();
        if len > 0 {
            layer.sort_by_key(name_key);
        }
        for (s, d, p, neg) in &layer {
            arrows.push((Arr::Path { src: *s, dst: *d, edges: p.clone() }, *neg));
        }
        let mut next = Vec::new();
        for (s, d, p, neg) in &layer {
            for &e in &out[*d] {
                let mut q = p.clone();
                q.push(e);
                next.push((*s, es[e].1, q, *neg ^ es[e].2));
            }
        }
        layer = next;
    }
    // Walks longer than `max_len` reach (v, sign) states; in the doubled
    // graph any such walk can be shortened to length at most max_len + 2|V|.
    for u in 0..nv {
        let mut reach: BTreeSet<(usize, bool)> = [(u, false)].into();
        let mut seen = BTreeSet::new();
        for len in 1..=max_len + 2 * nv {
            let mut next = BTreeSet::new();
            for &(v, s) in &reach {
                for &e in &out[v] {
                    next.insert((es[e].1, s ^ es[e].2));
                }
            }
            reach = next;
            if len > max_len {
                seen.extend(reach.iter().copied());
            }
        }
        for (v, s) in seen {
            arrows.push((Arr::Overflow { src: u, dst: v }, s));
        }
    }
    let mut paths = HashMap::new();
    let mut overflow = HashMap::new();
    for (i, (a, s)) in arrows.iter().enumerate() {
        match a {
            Arr::Path { src, edges, .. } => {
                paths.insert((*src, edges.clone()), i);
            }
            Arr::Overflow { src, dst } => {
                overflow.insert((*src, *dst, *s), i);
            }
        }
    }
    Ok((SignedCat { arrows, paths, overflow }, es))
}

impl SignedCat {
    fn ends(&self, i: usize) -> (usize, usize) {
        match &self.arrows[i].0 {
            Arr::Path { src, dst, .. } | Arr::Overflow { src, dst } => (*src, *dst),
        }
    }

    fn compose(&self, a: usize, b: usize, max_len: usize) -> Option<usize> {
        let ((s, m), (m2, d)) = (self.ends(a), self.ends(b));
        if m != m2 {
            return None;
        }
        let sign = self.arrows[a].1 ^ self.arrows[b].1;
        if let (Arr::Path { edges: p, .. }, Arr::Path { edges: q, .. }) = (&self.arrows[a].0, &self.arrows[b].0) {
            if p.len() + q.len() <= max_len {
                let mut r = p.clone();
                r.extend(q);
                return self.paths.get(&(s, r)).copied();
            }
        }
        self.overflow.get(&(s, d, sign)).copied()
    }

    fn label(&self, g: &SignedGraph, i: usize) -> String {
        match &self.arrows[i] {
            (Arr::Path { src, edges, .. }, _) if edges.is_empty() => format!("id@{}", g.vertices[*src]),
            (Arr::Path { edges, .. }, _) => edges.iter().map(|&e| g.edges[e].name.as_str()).collect::<Vec<_>>().join("·"),
            (Arr::Overflow { src, dst }, s) => {
                format!("⊥({},{},{})", g.vertices[*src], g.vertices[*dst], if *s { "-" } else { "+" })
            }
        }
    }
}

/// The free signed category on `g` truncated at path length `max_len`:
/// paths of length at most `max_len`, plus one overflow arrow `⊥(u,v,s)`
/// for each longer sign class of walks. Composites that would exceed the
/// bound land in the overflow arrow, which absorbs.
pub fn truncated_signed_category(g: &SignedGraph, max_len: usize) -> Result<SpanModel> {
    let (cat, _) = build(g, max_len)?;
    let t = Arc::new(builtin_theory(Builtin::Signed));
    let id = t.loose_id[0];
    let sigma = t.loose_named("σ").expect("signed theory has σ");
    // Position of each arrow inside its apex.
    let mut pos = vec![0; cat.arrows.len()];
    let mut fibers: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, (_, neg)) in cat.arrows.iter().enumerate() {
        let f = &mut fibers[*neg as usize];
        pos[i] = f.len();
        f.push(i);
    }
    let span = |f: &[usize]| -> Result<SpanOfSets> {
        Ok(SpanOfSets {
            apex: FiniteSet::new(f.iter().map(|&i| cat.label(g, i)))?,
            left: f.iter().map(|&i| cat.ends(i).0).collect(),
            right: f.iter().map(|&i| cat.ends(i).1).collect(),
        })
    };
    let mut on_loose = vec![SpanOfSets { apex: FiniteSet::default(), left: vec![], right: vec![] }; t.loose.len()];
    on_loose[id] = span(&fibers[0])?;
    on_loose[sigma] = span(&fibers[1])?;
    let on_cells = t.cells.iter().map(|c| (0..on_loose[c.top].len()).collect()).collect();
    let nv = g.vertices.len();
    let units = (0..nv).map(|v| pos[cat.paths[&(v, Vec::new())]]).collect();
    let fib = |m: usize| if m == id { &fibers[0] } else { &fibers[1] };
    SpanModel::from_parts(
        t.clone(),
        vec![FiniteSet::new(g.vertices.iter().cloned())?],
        vec![(0..nv).collect()],
        on_loose,
        on_cells,
        |m, n, a, b| cat.compose(fib(m)[a], fib(n)[b], max_len).map(|c| pos[c]),
        vec![units],
    )
}

/// The free signed category on `g`, which must have no path longer than
/// `max_len`.
pub fn free_signed_category(g: &SignedGraph, max_len: usize) -> Result<SpanModel> {
    let (cat, _) = build(g, max_len)?;
    if !cat.overflow.is_empty() {
        return Err(Error::FreeCategoryNotFinite(max_len));
    }
    truncated_signed_category(g, max_len)
}

/// One vertex with a single loop of the given sign, truncated at `max_len`.
pub fn walking_signed_loop(negative: bool, max_len: usize) -> Result<SpanModel> {
    let g = SignedGraph::new(&["v"], &[("e", "v", "v", negative)]);
    truncated_signed_category(&g, max_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span_model::validate_model;

    #[test]
    fn single_vertex_is_identity_only() {
        let g = SignedGraph::new(&["a"], &[]);
        let x = free_signed_category(&g, 1).unwrap();
        assert!(validate_model(&x).is_ok());
        assert_eq!(x.on_loose[0].apex.labels(), ["id@a"]);
        assert!(x.on_loose[1].is_empty());
    }

    #[test]
    fn cycle_is_not_finite() {
        let g = SignedGraph::new(&["a", "b"], &[("f", "a", "b", false), ("g", "b", "a", true)]);
        assert!(matches!(free_signed_category(&g, 2), Err(Error::FreeCategoryNotFinite(2))));
    }

    #[test]
    fn two_negatives_compose_positive() {
        let g = SignedGraph::new(&["a", "b", "c"], &[("f", "a", "b", true), ("g", "b", "c", true)]);
        let x = free_signed_category(&g, 4).unwrap();
        assert!(validate_model(&x).is_ok());
        let pos = x.on_loose[0].apex.find("f·g").expect("even composite");
        assert_eq!((x.on_loose[0].left[pos], x.on_loose[0].right[pos]), (0, 2));
        let sigma = x.theory.loose_named("σ").unwrap();
        let (f, g) = (x.on_loose[sigma].apex.find("f").unwrap(), x.on_loose[sigma].apex.find("g").unwrap());
        assert_eq!(x.lax(sigma, sigma, f, g), Some(pos));
    }

    #[test]
    fn truncated_loops_validate() {
        for neg in [false, true] {
            for l in 1..4 {
                let x = walking_signed_loop(neg, l).unwrap();
                let r = validate_model(&x);
                assert!(r.is_ok(), "{r}");
            }
        }
        let x = walking_signed_loop(true, 2).unwrap();
        assert_eq!(x.on_loose[0].apex.labels(), ["id@v", "e·e", "⊥(v,v,+)"]);
        assert_eq!(x.on_loose[1].apex.labels(), ["e", "⊥(v,v,-)"]);
    }

    #[test]
    fn rejects_bad_graphs() {
        let g = SignedGraph::new(&["a"], &[("f", "a", "z", false)]);
        assert!(truncated_signed_category(&g, 1).is_err());
        let g = SignedGraph::new(&["a"], &[("f", "a", "a", false), ("f", "a", "a", true)]);
        assert!(truncated_signed_category(&g, 1).is_err());
    }
}
