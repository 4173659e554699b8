//! Lax double functors into spans of finite sets.

mod morphism;
mod signed;

pub(crate) use morphism::solve_morphisms;
pub use morphism::{enumerate_model_morphisms, find_model_isomorphism, ModelMorphism, MorphismFilter};
pub use signed::{free_signed_category, truncated_signed_category, walking_signed_loop, SignedEdge, SignedGraph};

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::collage::FinCategory;
use crate::error::{Error, Result};
use crate::finset::{pullback_pairs, FiniteSet, Func};
use crate::report::Report;
use crate::theory_core::{DoubleTheory, Loose};

/// A span `src ← apex → dst` of finite sets; the end sets are implied by
/// the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanOfSets {
    pub apex: FiniteSet,
    pub left: Func,
    pub right: Func,
}

impl SpanOfSets {
    pub fn len(&self) -> usize {
        self.apex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.apex.is_empty()
    }

    /// Apex elements grouped by their pair of feet.
    pub fn by_ends(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut out: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for h in 0..self.apex.len() {
            out.entry((self.left[h], self.right[h])).or_default().push(h);
        }
        out
    }
}

/// The laxator at one composable pair, tabulated over the pullback
/// `X(m) ×_{Xy} X(n)` in lexicographic pair order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Laxator {
    pub pairs: Vec<(usize, usize)>,
    pub values: Vec<usize>,
}

impl Laxator {
    pub fn get(&self, a: usize, b: usize) -> Option<usize> {
        self.pairs.binary_search(&(a, b)).ok().map(|i| self.values[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanModel {
    pub theory: Arc<DoubleTheory>,
    pub on_objects: Vec<FiniteSet>,
    pub on_tight: Vec<Func>,
    pub on_loose: Vec<SpanOfSets>,
    /// Apex maps `X(top) → X(bottom)`.
    pub on_cells: Vec<Func>,
    pub laxators: BTreeMap<(Loose, Loose), Laxator>,
    /// `X_d: X d → X(id_d)`.
    pub unitors: Vec<Func>,
}

impl SpanModel {
    /// Assemble a model, tabulating laxators from a function on pullback
    /// pairs. `laxator(m, n, ξ, ζ)` returns an element of `X(m⊙n)`.
    pub fn from_parts(
        theory: Arc<DoubleTheory>,
        on_objects: Vec<FiniteSet>,
        on_tight: Vec<Func>,
        on_loose: Vec<SpanOfSets>,
        on_cells: Vec<Func>,
        laxator: impl Fn(Loose, Loose, usize, usize) -> Option<usize>,
        unitors: Vec<Func>,
    ) -> Result<SpanModel> {
        let mut laxators = BTreeMap::new();
        for &(m, n) in theory.loose_comp.keys() {
            let pairs = pullback_pairs(&on_loose[m].right, &on_loose[n].left);
            let mut values = Vec::with_capacity(pairs.len());
            for &(a, b) in &pairs {
                let v = laxator(m, n, a, b).ok_or_else(|| {
                    Error::Invalid(format!(
                        "no laxator value at {},{} for ({},{})",
                        theory.loose[m].name,
                        theory.loose[n].name,
                        on_loose[m].apex.label(a),
                        on_loose[n].apex.label(b)
                    ))
                })?;
                values.push(v);
            }
            laxators.insert((m, n), Laxator { pairs, values });
        }
        Ok(SpanModel { theory, on_objects, on_tight, on_loose, on_cells, laxators, unitors })
    }

    pub fn lax(&self, m: Loose, n: Loose, a: usize, b: usize) -> Option<usize> {
        self.laxators.get(&(m, n))?.get(a, b)
    }

    pub fn loose_src_set(&self, m: Loose) -> &FiniteSet {
        &self.on_objects[self.theory.loose[m].src]
    }

    pub fn loose_dst_set(&self, m: Loose) -> &FiniteSet {
        &self.on_objects[self.theory.loose[m].dst]
    }

    /// Total number of elements over objects and loose apices.
    pub fn size(&self) -> usize {
        self.on_objects.iter().map(|s| s.len()).sum::<usize>() + self.on_loose.iter().map(|s| s.len()).sum::<usize>()
    }
}

/// The model sending everything to a singleton.
pub fn terminal_model(t: &Arc<DoubleTheory>) -> SpanModel {
    let one = FiniteSet::singleton;
    SpanModel::from_parts(
        t.clone(),
        t.objects.iter().map(|_| one()).collect(),
        t.tight.iter().map(|_| vec![0]).collect(),
        t.loose.iter().map(|_| SpanOfSets { apex: one(), left: vec![0], right: vec![0] }).collect(),
        t.cells.iter().map(|_| vec![0]).collect(),
        |_, _, _, _| Some(0),
        t.objects.iter().map(|_| vec![0]).collect(),
    )
    .expect("singleton laxators are total")
}

/// A finite category as a model of the terminal theory: objects at the
/// object, morphisms at the loose identity, composition as laxator.
pub fn category_model(t: &Arc<DoubleTheory>, c: &FinCategory) -> Result<SpanModel> {
    if t.objects.len() != 1 || t.loose.len() != 1 || t.tight.len() != 1 {
        return Err(Error::Mismatch(format!("{} is not the terminal theory", t.name)));
    }
    let objects = FiniteSet::new(c.objects.iter().cloned())?;
    let arrows = FiniteSet::new(c.morphisms.iter().map(|m| m.name.clone()))?;
    let span = SpanOfSets { apex: arrows, left: c.morphisms.iter().map(|m| m.src).collect(), right: c.morphisms.iter().map(|m| m.dst).collect() };
    let n = span.len();
    SpanModel::from_parts(
        t.clone(),
        vec![objects],
        vec![(0..c.num_objects()).collect()],
        vec![span],
        vec![(0..n).collect()],
        |_, _, f, g| c.compose(f, g),
        vec![c.identities.clone()],
    )
}

/// Recover the category from a model of the terminal theory.
pub fn model_category(x: &SpanModel) -> Result<FinCategory> {
    let t = &x.theory;
    if t.objects.len() != 1 || t.loose.len() != 1 {
        return Err(Error::Mismatch("not a model of the terminal theory".into()));
    }
    let span = &x.on_loose[0];
    let morphisms: Vec<(String, usize, usize)> = (0..span.len()).map(|h| (span.apex.label(h).to_string(), span.left[h], span.right[h])).collect();
    let lax = &x.laxators[&(0, 0)];
    Ok(FinCategory::from_table(x.on_objects[0].labels().to_vec(), morphisms, x.unitors[0].clone(), |f, g| lax.get(f, g).expect("composable pair")))
}

fn typed(f: &[usize], dom: usize, cod: usize) -> bool {
    f.len() == dom && f.iter().all(|&v| v < cod)
}

/// Check every lax-functor axiom exhaustively.
pub fn validate_model(x: &SpanModel) -> Report {
    let t = &*x.theory;
    let mut r = Report::new();
    if x.on_objects.len() != t.objects.len()
        || x.on_tight.len() != t.tight.len()
        || x.on_loose.len() != t.loose.len()
        || x.on_cells.len() != t.cells.len()
        || x.unitors.len() != t.objects.len()
    {
        r.push("model.shape", t.name.clone(), "component tables do not match the theory");
        return r;
    }
    let card = |o: usize| x.on_objects[o].len();
    // Shapes first; later checks index freely.
    for (f, a) in t.tight.iter().enumerate() {
        r.check(typed(&x.on_tight[f], card(a.src), card(a.dst)), "tight.typed", || a.name.clone(), "function has the wrong domain or codomain");
    }
    for (m, a) in t.loose.iter().enumerate() {
        let s = &x.on_loose[m];
        r.check(typed(&s.left, s.len(), card(a.src)) && typed(&s.right, s.len(), card(a.dst)), "span.typed", || a.name.clone(), "span legs have the wrong domain or codomain");
    }
    for (c, cell) in t.cells.iter().enumerate() {
        r.check(typed(&x.on_cells[c], x.on_loose[cell.top].len(), x.on_loose[cell.bottom].len()), "cell.typed", || cell.name.clone(), "apex map has the wrong domain or codomain");
    }
    for o in 0..t.objects.len() {
        r.check(typed(&x.unitors[o], card(o), x.on_loose[t.loose_id[o]].len()), "unitor.typed", || t.objects[o].clone(), "unitor has the wrong domain or codomain");
    }
    for (&(m, n), lax) in &x.laxators {
        if m >= t.loose.len() || n >= t.loose.len() {
            r.push("laxator.typed", format!("{m},{n}"), "unknown loose arrow");
            continue;
        }
        let at = || format!("{},{}", t.loose[m].name, t.loose[n].name);
        let Some(mn) = t.loose_compose(m, n) else {
            r.push("laxator.typed", at(), "pair is not composable in the theory");
            continue;
        };
        let expect = pullback_pairs(&x.on_loose[m].right, &x.on_loose[n].left);
        r.check(lax.pairs == expect && lax.values.len() == expect.len(), "laxator.typed", at, "table is not indexed by the pullback");
        r.check(lax.values.iter().all(|&v| v < x.on_loose[mn].len()), "laxator.typed", at, "value outside the composite apex");
    }
    for &(m, n) in t.loose_comp.keys() {
        if !x.laxators.contains_key(&(m, n)) {
            r.push("laxator.missing", format!("{},{}", t.loose[m].name, t.loose[n].name), "no laxator for a composable pair");
        }
    }
    if !r.is_ok() {
        return r;
    }

    // Tight functoriality.
    for o in 0..t.objects.len() {
        let f = &x.on_tight[t.tight_id[o]];
        r.check(f.iter().enumerate().all(|(i, &v)| i == v), "tight.identity", || t.objects[o].clone(), "identity not sent to the identity");
    }
    for (&(f, g), &h) in &t.tight_comp {
        let (xf, xg, xh) = (&x.on_tight[f], &x.on_tight[g], &x.on_tight[h]);
        for a in 0..xf.len() {
            if xg[xf[a]] != xh[a] {
                r.push("tight.functor", format!("{},{}", t.tight[f].name, t.tight[g].name), format!("differs at {}", x.on_objects[t.tight[f].src].label(a)));
                break;
            }
        }
    }

    // Cells are span maps and are functorial.
    for (c, cell) in t.cells.iter().enumerate() {
        let (top, bot) = (&x.on_loose[cell.top], &x.on_loose[cell.bottom]);
        let xc = &x.on_cells[c];
        for h in 0..top.len() {
            let ok = bot.left[xc[h]] == x.on_tight[cell.left][top.left[h]] && bot.right[xc[h]] == x.on_tight[cell.right][top.right[h]];
            if !ok {
                r.push("cell.span_map", cell.name.clone(), format!("legs disagree at {}", top.apex.label(h)));
                break;
            }
        }
    }
    for (m, &c) in t.cell_loose_id.iter().enumerate() {
        r.check(x.on_cells[c].iter().enumerate().all(|(i, &v)| i == v), "cell.identity", || t.loose[m].name.clone(), "1_m not sent to the identity");
    }
    for (&(a, b), &c) in &t.cell_vcomp {
        let (xa, xb, xc) = (&x.on_cells[a], &x.on_cells[b], &x.on_cells[c]);
        if (0..xa.len()).any(|h| xb[xa[h]] != xc[h]) {
            r.push("cell.vfunctor", format!("{},{}", t.cells[a].name, t.cells[b].name), "vertical composite not preserved");
        }
    }

    // Laxators: span, naturality, associativity, unitality.
    for (&(m, n), lax) in &x.laxators {
        let mn = t.loose_compose(m, n).unwrap();
        let at = || format!("{},{}", t.loose[m].name, t.loose[n].name);
        let (sm, sn, smn) = (&x.on_loose[m], &x.on_loose[n], &x.on_loose[mn]);
        for (&(a, b), &v) in lax.pairs.iter().zip(&lax.values) {
            if smn.left[v] != sm.left[a] || smn.right[v] != sn.right[b] {
                r.push("laxator.span", at(), format!("({},{}) lands over the wrong feet", sm.apex.label(a), sn.apex.label(b)));
                break;
            }
        }
    }
    for (&(al, be), &ab) in &t.cell_hcomp {
        let (ca, cb) = (&t.cells[al], &t.cells[be]);
        let (Some(lt), Some(lb)) = (x.laxators.get(&(ca.top, cb.top)), x.laxators.get(&(ca.bottom, cb.bottom))) else {
            continue;
        };
        for (&(h, k), &v) in lt.pairs.iter().zip(&lt.values) {
            let lhs = x.on_cells[ab][v];
            let rhs = lb.get(x.on_cells[al][h], x.on_cells[be][k]);
            if rhs != Some(lhs) {
                r.push("laxator.natural", format!("{},{}", ca.name, cb.name), format!("fails at ({},{})", x.on_loose[ca.top].apex.label(h), x.on_loose[cb.top].apex.label(k)));
                break;
            }
        }
    }
    for (m, n, p) in t.composable_loose_triples() {
        let (mn, np) = (t.loose_compose(m, n).unwrap(), t.loose_compose(n, p).unwrap());
        let lmn = &x.laxators[&(m, n)];
        'pairs: for (&(a, b), &ab) in lmn.pairs.iter().zip(&lmn.values) {
            let sp = &x.on_loose[p];
            let want = x.on_loose[n].right[b];
            for c in 0..sp.len() {
                if sp.left[c] != want {
                    continue;
                }
                let lhs = x.lax(mn, p, ab, c);
                let rhs = x.lax(n, p, b, c).and_then(|bc| x.lax(m, np, a, bc));
                if lhs != rhs {
                    r.push(
                        "laxator.assoc",
                        format!("{},{},{}", t.loose[m].name, t.loose[n].name, t.loose[p].name),
                        format!("fails at ({},{},{})", x.on_loose[m].apex.label(a), x.on_loose[n].apex.label(b), sp.apex.label(c)),
                    );
                    break 'pairs;
                }
            }
        }
    }
    for (m, a) in t.loose.iter().enumerate() {
        let s = &x.on_loose[m];
        let (ids, idd) = (t.loose_id[a.src], t.loose_id[a.dst]);
        for h in 0..s.len() {
            let ul = x.unitors[a.src][s.left[h]];
            let ur = x.unitors[a.dst][s.right[h]];
            if x.lax(ids, m, ul, h) != Some(h) || x.lax(m, idd, h, ur) != Some(h) {
                r.push("laxator.unit", a.name.clone(), format!("unitors do not act trivially on {}", s.apex.label(h)));
                break;
            }
        }
    }

    // Unitors: span and naturality X(id_f)·u_x = u_y·Xf.
    for o in 0..t.objects.len() {
        let s = &x.on_loose[t.loose_id[o]];
        let u = &x.unitors[o];
        r.check((0..card(o)).all(|a| s.left[u[a]] == a && s.right[u[a]] == a), "unitor.span", || t.objects[o].clone(), "unitor does not land over the diagonal");
    }
    for (f, a) in t.tight.iter().enumerate() {
        let c = t.cell_tight_id[f];
        let ok = (0..card(a.src)).all(|e| x.on_cells[c][x.unitors[a.src][e]] == x.unitors[a.dst][x.on_tight[f][e]]);
        r.check(ok, "unitor.natural", || a.name.clone(), "X(id_f) does not commute with the unitors");
    }
    r
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::collage::{close_presented_category, GenKind, PresentedCategory};
    use crate::theory_core::{builtin_theory, Builtin};

    pub(crate) fn square_category() -> FinCategory {
        let mut p = PresentedCategory::default();
        for o in ["a", "b", "c", "d"] {
            p.add_object(o);
        }
        let f = p.add_generator("f", 0, 1, GenKind::Plain);
        let g = p.add_generator("g", 0, 2, GenKind::Plain);
        let h = p.add_generator("h", 1, 3, GenKind::Plain);
        let k = p.add_generator("k", 2, 3, GenKind::Plain);
        p.add_relation(0, vec![f, h], vec![g, k]);
        close_presented_category(&p, 3).unwrap()
    }

    #[test]
    fn terminal_models_validate() {
        for b in [Builtin::Terminal, Builtin::WalkingLoose, Builtin::WalkingSquare, Builtin::Signed, Builtin::MonadTrunc(2), Builtin::PromTrunc(2)] {
            let t = Arc::new(builtin_theory(b));
            let r = validate_model(&terminal_model(&t));
            assert!(r.is_ok(), "{}: {r}", b.name());
        }
    }

    #[test]
    fn category_as_model() {
        let t = Arc::new(builtin_theory(Builtin::Terminal));
        let c = square_category();
        let x = category_model(&t, &c).unwrap();
        assert!(validate_model(&x).is_ok());
        let back = model_category(&x).unwrap();
        assert_eq!(back.num_morphisms(), 9);
        assert!(back.validate().is_ok());
    }

    #[test]
    fn non_associative_composition_is_reported() {
        // Z/3 written additively, with one composite changed.
        let t = Arc::new(builtin_theory(Builtin::Terminal));
        let span = SpanOfSets { apex: FiniteSet::from_labels(["0", "1", "2"]), left: vec![0; 3], right: vec![0; 3] };
        let x = SpanModel::from_parts(
            t,
            vec![FiniteSet::singleton()],
            vec![vec![0]],
            vec![span],
            vec![vec![0, 1, 2]],
            |_, _, a, b| Some(if (a, b) == (1, 1) { 0 } else { (a + b) % 3 }),
            vec![vec![0]],
        )
        .unwrap();
        let r = validate_model(&x);
        assert!(r.has_rule("laxator.assoc"), "{r}");
    }

    #[test]
    fn broken_span_map_is_reported() {
        let t = Arc::new(builtin_theory(Builtin::WalkingSquare));
        let mut x = terminal_model(&t);
        let m = t.loose_named("m").unwrap();
        x.on_loose[m] = SpanOfSets { apex: FiniteSet::from_labels(["h0", "h1"]), left: vec![0, 0], right: vec![0, 0] };
        x.on_cells[t.cell_loose_id[m]] = vec![0, 1];
        x.on_cells[t.cell_named("α").unwrap()] = vec![0, 0];
        // rebuild laxators over the new apex
        let lax = |mm: usize, nn: usize, a: usize, b: usize| {
            if mm == m {
                Some(a)
            } else if nn == m {
                Some(b)
            } else {
                Some(0)
            }
        };
        let x = SpanModel::from_parts(t.clone(), x.on_objects, x.on_tight, x.on_loose, x.on_cells, lax, x.unitors).unwrap();
        assert!(validate_model(&x).is_ok(), "{}", validate_model(&x));
        let mut bad = x.clone();
        bad.unitors[0] = vec![0];
        bad.on_cells[t.cell_loose_id[m]] = vec![1, 1];
        assert!(validate_model(&bad).has_rule("cell.identity"));
    }
}
