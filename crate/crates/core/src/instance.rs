//! Instances of a model: fibered sets with tight maps and loose actions.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finset::{compose, identity, inverse, is_bijection, pair_label, pullback_pairs, FiniteSet, Func};
use crate::report::Report;
use crate::search::Csp;
use crate::span_model::{Laxator, ModelMorphism, SpanModel};

/// A total function on a materialized pullback, keyed by lexicographic
/// pairs. Instance actions and model laxators share this shape.
pub type PairTable = Laxator;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub model: Arc<SpanModel>,
    pub carriers: Vec<FiniteSet>,
    /// `Hd → Xd`.
    pub labels: Vec<Func>,
    pub tight_cells: Vec<Func>,
    /// `Hm: Hd ×_{Xd} X(m) → Hd'`, over pairs (element, heteromorphism).
    pub actions: Vec<PairTable>,
}

impl Instance {
    /// Assemble an instance, tabulating `action(m, e, h)` over every
    /// matching pair.
    pub fn from_parts(
        model: Arc<SpanModel>,
        carriers: Vec<FiniteSet>,
        labels: Vec<Func>,
        tight_cells: Vec<Func>,
        action: impl Fn(usize, usize, usize) -> Option<usize>,
    ) -> Result<Instance> {
        let t = model.theory.clone();
        if carriers.len() != t.objects.len() || labels.len() != t.objects.len() || tight_cells.len() != t.tight.len() {
            return Err(Error::Invalid("instance tables do not match the theory".into()));
        }
        let mut actions = Vec::with_capacity(t.loose.len());
        for (m, arr) in t.loose.iter().enumerate() {
            let pairs = pullback_pairs(&labels[arr.src], &model.on_loose[m].left);
            let mut values = Vec::with_capacity(pairs.len());
            for &(e, h) in &pairs {
                values.push(
                    action(m, e, h)
                        .ok_or_else(|| Error::Invalid(format!("no action value at {} for ({},{})", arr.name, carriers[arr.src].label(e), model.on_loose[m].apex.label(h))))?,
                );
            }
            actions.push(PairTable { pairs, values });
        }
        Ok(Instance { model, carriers, labels, tight_cells, actions })
    }

    pub fn act(&self, m: usize, e: usize, h: usize) -> Option<usize> {
        self.actions[m].get(e, h)
    }

    pub fn size(&self) -> usize {
        self.carriers.iter().map(|c| c.len()).sum()
    }

    /// Elements of `Hd` over `x ∈ Xd`.
    pub fn fiber(&self, d: usize, x: usize) -> Vec<usize> {
        (0..self.carriers[d].len()).filter(|&e| self.labels[d][e] == x).collect()
    }
}

/// The instance with every carrier empty.
pub fn empty_instance(x: &Arc<SpanModel>) -> Instance {
    let t = &x.theory;
    Instance::from_parts(
        x.clone(),
        t.objects.iter().map(|_| FiniteSet::default()).collect(),
        t.objects.iter().map(|_| Vec::new()).collect(),
        t.tight.iter().map(|_| Vec::new()).collect(),
        |_, _, _| None,
    )
    .expect("empty tables are total")
}

/// The terminal instance: `Hd = Xd` labelled by itself, acting by the
/// right leg.
pub fn terminal_instance(x: &Arc<SpanModel>) -> Instance {
    let t = &x.theory;
    Instance::from_parts(x.clone(), x.on_objects.clone(), x.on_objects.iter().map(|s| identity(s.len())).collect(), x.on_tight.clone(), |m, _, h| Some(x.on_loose[m].right[h]))
        .unwrap_or_else(|_| panic!("terminal instance of {} is total", t.name))
}

fn typed(f: &[usize], dom: usize, cod: usize) -> bool {
    f.len() == dom && f.iter().all(|&v| v < cod)
}

/// Check functoriality, naturality, associativity and unitality
/// exhaustively.
pub fn validate_instance(h: &Instance) -> Report {
    let x = &*h.model;
    let t = &*x.theory;
    let mut r = Report::new();
    if h.carriers.len() != t.objects.len() || h.labels.len() != t.objects.len() || h.tight_cells.len() != t.tight.len() || h.actions.len() != t.loose.len() {
        r.push("instance.shape", t.name.clone(), "component tables do not match the theory");
        return r;
    }
    let card = |d: usize| h.carriers[d].len();
    let elem = |d: usize, e: usize| h.carriers[d].label(e).to_string();
    for d in 0..t.objects.len() {
        r.check(typed(&h.labels[d], card(d), x.on_objects[d].len()), "instance.label", || t.objects[d].clone(), "labelling has the wrong domain or codomain");
    }
    for (f, a) in t.tight.iter().enumerate() {
        r.check(typed(&h.tight_cells[f], card(a.src), card(a.dst)), "instance.tight.typed", || a.name.clone(), "function has the wrong domain or codomain");
    }
    for (m, a) in t.loose.iter().enumerate() {
        let act = &h.actions[m];
        let ok = act.pairs == pullback_pairs(&h.labels.get(a.src).cloned().unwrap_or_default(), &x.on_loose[m].left)
            && act.values.len() == act.pairs.len()
            && act.values.iter().all(|&v| v < card(a.dst));
        r.check(ok, "instance.action.typed", || a.name.clone(), "action is not a total function on the pullback");
    }
    if !r.is_ok() {
        return r;
    }
    for (f, a) in t.tight.iter().enumerate() {
        let hf = &h.tight_cells[f];
        for e in 0..card(a.src) {
            r.check(
                h.labels[a.dst][hf[e]] == x.on_tight[f][h.labels[a.src][e]],
                "instance.tight.over",
                || format!("{} at {}", a.name, elem(a.src, e)),
                "does not lie over the model's function",
            );
        }
    }
    for d in 0..t.objects.len() {
        let ok = h.tight_cells[t.tight_id[d]].iter().enumerate().all(|(e, &v)| e == v);
        r.check(ok, "instance.tight.identity", || t.objects[d].clone(), "identity arrow does not act as the identity");
    }
    for (&(f, g), &fg) in &t.tight_comp {
        let ok = compose(&h.tight_cells[f], &h.tight_cells[g]) == h.tight_cells[fg];
        r.check(ok, "instance.tight.functor", || format!("{},{}", t.tight[f].name, t.tight[g].name), "composite arrow is not the composite function");
    }
    for (m, a) in t.loose.iter().enumerate() {
        let act = &h.actions[m];
        for (&(e, hh), &v) in act.pairs.iter().zip(&act.values) {
            r.check(
                h.labels[a.dst][v] == x.on_loose[m].right[hh],
                "instance.action.over",
                || format!("{} at ({},{})", a.name, elem(a.src, e), x.on_loose[m].apex.label(hh)),
                "result does not lie over the right leg",
            );
        }
    }
    for (c, cell) in t.cells.iter().enumerate() {
        let (f, g) = (cell.left, cell.right);
        let act = &h.actions[cell.top];
        for (&(e, hh), &v) in act.pairs.iter().zip(&act.values) {
            let lhs = h.tight_cells[g][v];
            let rhs = h.act(cell.bottom, h.tight_cells[f][e], x.on_cells[c][hh]);
            r.check(
                rhs == Some(lhs),
                "instance.natural",
                || format!("{} at ({},{})", cell.name, elem(t.loose[cell.top].src, e), x.on_loose[cell.top].apex.label(hh)),
                "action is not natural for this cell",
            );
        }
    }
    for (&(m, n), lax) in &x.laxators {
        let mn = t.loose_compose(m, n).unwrap();
        let d = t.loose[m].src;
        for (&(h1, h2), &v) in lax.pairs.iter().zip(&lax.values) {
            for e in h.fiber(d, x.on_loose[m].left[h1]) {
                let stepwise = h.act(m, e, h1).and_then(|e1| h.act(n, e1, h2));
                let at_once = h.act(mn, e, v);
                r.check(
                    stepwise == at_once,
                    "instance.assoc",
                    || format!("({},{},{}) at {},{}", elem(d, e), x.on_loose[m].apex.label(h1), x.on_loose[n].apex.label(h2), t.loose[m].name, t.loose[n].name),
                    "acting in two steps differs from acting by the laxator",
                );
            }
        }
    }
    for d in 0..t.objects.len() {
        let idm = t.loose_id[d];
        for e in 0..card(d) {
            let u = x.unitors[d][h.labels[d][e]];
            r.check(h.act(idm, e, u) == Some(e), "instance.unit", || format!("{} at {}", t.objects[d], elem(d, e)), "unit heteromorphism does not act trivially");
        }
    }
    r
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceMorphism {
    pub source: Arc<Instance>,
    pub target: Arc<Instance>,
    pub components: Vec<Func>,
}

impl InstanceMorphism {
    pub fn identity(h: &Arc<Instance>) -> InstanceMorphism {
        InstanceMorphism { source: h.clone(), target: h.clone(), components: h.carriers.iter().map(|c| identity(c.len())).collect() }
    }

    /// Diagrammatic composite: `self` then `other`.
    pub fn compose(&self, other: &InstanceMorphism) -> Result<InstanceMorphism> {
        if *self.target != *other.source {
            return Err(Error::Mismatch("target of the first morphism is not the source of the second".into()));
        }
        Ok(InstanceMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            components: self.components.iter().zip(&other.components).map(|(f, g)| compose(f, g)).collect(),
        })
    }

    pub fn is_isomorphism(&self) -> bool {
        self.components.iter().zip(&self.target.carriers).all(|(f, c)| is_bijection(f, c.len()))
    }

    pub fn inverse(&self) -> Option<InstanceMorphism> {
        Some(InstanceMorphism { source: self.target.clone(), target: self.source.clone(), components: self.components.iter().map(|f| inverse(f)).collect::<Option<_>>()? })
    }

    pub fn validate(&self) -> Report {
        let (h, k) = (&*self.source, &*self.target);
        let t = &*h.model.theory;
        let mut r = Report::new();
        if *h.model != *k.model {
            r.push("instance_morphism.model", t.name.clone(), "source and target are instances of different models");
            return r;
        }
        if self.components.len() != t.objects.len() {
            r.push("instance_morphism.shape", t.name.clone(), "one component per object is required");
            return r;
        }
        for d in 0..t.objects.len() {
            let mu = &self.components[d];
            r.check(typed(mu, h.carriers[d].len(), k.carriers[d].len()), "instance_morphism.typed", || t.objects[d].clone(), "component has the wrong domain or codomain");
        }
        if !r.is_ok() {
            return r;
        }
        for d in 0..t.objects.len() {
            let mu = &self.components[d];
            for e in 0..h.carriers[d].len() {
                r.check(
                    k.labels[d][mu[e]] == h.labels[d][e],
                    "instance_morphism.over",
                    || format!("{} at {}", t.objects[d], h.carriers[d].label(e)),
                    "component does not preserve labels",
                );
            }
        }
        for (f, a) in t.tight.iter().enumerate() {
            for e in 0..h.carriers[a.src].len() {
                let ok = self.components[a.dst][h.tight_cells[f][e]] == k.tight_cells[f][self.components[a.src][e]];
                r.check(ok, "instance_morphism.natural", || format!("{} at {}", a.name, h.carriers[a.src].label(e)), "not natural on this tight arrow");
            }
        }
        for (m, a) in t.loose.iter().enumerate() {
            let act = &h.actions[m];
            for (&(e, hh), &v) in act.pairs.iter().zip(&act.values) {
                let ok = k.act(m, self.components[a.src][e], hh) == Some(self.components[a.dst][v]);
                r.check(
                    ok,
                    "instance_morphism.equivariant",
                    || format!("{} at ({},{})", a.name, h.carriers[a.src].label(e), h.model.on_loose[m].apex.label(hh)),
                    "does not commute with the action",
                );
            }
        }
        r
    }
}

/// Restrictions on instance morphisms to enumerate.
#[derive(Debug, Clone, Default)]
pub struct InstanceFilter {
    pub injective: bool,
    /// Per object and source element, a required target element.
    pub fixed: Option<Vec<Vec<Option<usize>>>>,
}

/// Every instance morphism `h → k`, in lexicographic order of components.
pub fn enumerate_instance_morphisms(h: &Arc<Instance>, k: &Arc<Instance>, limit: usize) -> Result<Vec<InstanceMorphism>> {
    let mut out = Vec::new();
    solve_instance_morphisms(h, k, &InstanceFilter::default(), limit, |m| {
        out.push(m);
        true
    })?;
    Ok(out)
}

pub fn count_instance_morphisms(h: &Arc<Instance>, k: &Arc<Instance>, limit: usize) -> Result<usize> {
    solve_instance_morphisms(h, k, &InstanceFilter::default(), limit, |_| true)
}

pub fn find_instance_isomorphism(h: &Arc<Instance>, k: &Arc<Instance>) -> Option<InstanceMorphism> {
    if h.carriers.iter().zip(&k.carriers).any(|(a, b)| a.len() != b.len()) {
        return None;
    }
    let mut found = None;
    solve_instance_morphisms(h, k, &InstanceFilter { injective: true, fixed: None }, usize::MAX, |m| {
        found = Some(m);
        false
    })
    .ok()?;
    found
}

pub fn solve_instance_morphisms(h: &Arc<Instance>, k: &Arc<Instance>, filter: &InstanceFilter, limit: usize, mut visit: impl FnMut(InstanceMorphism) -> bool) -> Result<usize> {
    if *h.model != *k.model {
        return Err(Error::Mismatch("instances of different models".into()));
    }
    let t = &*h.model.theory;
    let mut csp = Csp::new();
    let mut vars: Vec<Vec<usize>> = Vec::new();
    for d in 0..t.objects.len() {
        let mut vs = Vec::new();
        for e in 0..h.carriers[d].len() {
            let mut dom = k.fiber(d, h.labels[d][e]);
            if let Some(Some(v)) = filter.fixed.as_ref().map(|f| f[d][e]) {
                dom.retain(|&w| w == v);
            }
            vs.push(csp.var(dom));
        }
        vars.push(vs);
    }
    for (f, a) in t.tight.iter().enumerate() {
        for e in 0..h.carriers[a.src].len() {
            let (ve, vf) = (vars[a.src][e], vars[a.dst][h.tight_cells[f][e]]);
            let kf = &k.tight_cells[f];
            csp.constrain(&[ve, vf], move |s| kf[s[ve]] == s[vf]);
        }
    }
    for (m, a) in t.loose.iter().enumerate() {
        let act = &h.actions[m];
        let kact = &k.actions[m];
        for (&(e, hh), &v) in act.pairs.iter().zip(&act.values) {
            let (ve, vv) = (vars[a.src][e], vars[a.dst][v]);
            csp.constrain(&[ve, vv], move |s| kact.get(s[ve], hh) == Some(s[vv]));
        }
    }
    if filter.injective {
        for vs in &vars {
            for i in 0..vs.len() {
                for j in 0..i {
                    let (vi, vj) = (vs[i], vs[j]);
                    csp.constrain(&[vi, vj], move |s| s[vi] != s[vj]);
                }
            }
        }
    }
    csp.solve(limit, |s| visit(InstanceMorphism { source: h.clone(), target: k.clone(), components: vars.iter().map(|vs| vs.iter().map(|&v| s[v]).collect()).collect() }))
}

/// Every instance sharing the carriers, labels and tight functions of
/// `template`, varying only the action tables.
pub fn enumerate_instance_actions(template: &Instance, limit: usize, mut visit: impl FnMut(Instance) -> bool) -> Result<usize> {
    let x = &*template.model;
    let t = &*x.theory;
    let r = validate_instance_carriers(template);
    if !r.is_ok() {
        return Err(Error::Invalid(format!("template carriers are not functorial:\n{r}")));
    }
    let pairs: Vec<Vec<(usize, usize)>> = t.loose.iter().enumerate().map(|(m, a)| pullback_pairs(&template.labels[a.src], &x.on_loose[m].left)).collect();
    let mut csp = Csp::new();
    let mut vars: Vec<Vec<usize>> = Vec::with_capacity(t.loose.len());
    for (m, a) in t.loose.iter().enumerate() {
        let unit = t.loose_id.iter().position(|&l| l == m);
        let vs = pairs[m]
            .iter()
            .map(|&(e, h)| match unit {
                Some(d) if x.unitors[d][template.labels[d][e]] == h => csp.var(vec![e]),
                _ => csp.var(template.fiber(a.dst, x.on_loose[m].right[h])),
            })
            .collect();
        vars.push(vs);
    }
    let var_at = |m: usize, e: usize, h: usize| pairs[m].binary_search(&(e, h)).ok().map(|i| vars[m][i]);
    for (c, cell) in t.cells.iter().enumerate() {
        let g = &template.tight_cells[cell.right];
        for (i, &(e, h)) in pairs[cell.top].iter().enumerate() {
            let v1 = vars[cell.top][i];
            let v2 = var_at(cell.bottom, template.tight_cells[cell.left][e], x.on_cells[c][h]).expect("cell lands in the pullback");
            csp.constrain(&[v1, v2], move |s| g[s[v1]] == s[v2]);
        }
    }
    for (&(m, n), lax) in &x.laxators {
        let Some(mn) = t.loose_compose(m, n) else { continue };
        let d = t.loose[m].src;
        let mid = t.loose[m].dst;
        for (&(h1, h2), &v) in lax.pairs.iter().zip(&lax.values) {
            let inner: Vec<(usize, usize)> = template.fiber(mid, x.on_loose[n].left[h2]).into_iter().map(|y| (y, var_at(n, y, h2).expect("pair in the pullback"))).collect();
            for e in template.fiber(d, x.on_loose[m].left[h1]) {
                let v1 = var_at(m, e, h1).expect("pair in the pullback");
                let v2 = var_at(mn, e, v).expect("pair in the pullback");
                let mut all: Vec<usize> = inner.iter().map(|&(_, w)| w).collect();
                all.extend([v1, v2]);
                let inner = inner.clone();
                csp.constrain(&all, move |s| inner.iter().find(|&&(y, _)| y == s[v1]).is_some_and(|&(_, w)| s[w] == s[v2]));
            }
        }
    }
    csp.solve(limit, |s| {
        let h = Instance {
            model: template.model.clone(),
            carriers: template.carriers.clone(),
            labels: template.labels.clone(),
            tight_cells: template.tight_cells.clone(),
            actions: pairs.iter().zip(&vars).map(|(ps, vs)| PairTable { pairs: ps.clone(), values: vs.iter().map(|&v| s[v]).collect() }).collect(),
        };
        visit(h)
    })
}

/// The carrier part of [`validate_instance`]: labels, tight functions
/// over the model, and their functoriality.
fn validate_instance_carriers(h: &Instance) -> Report {
    let x = &*h.model;
    let t = &*x.theory;
    let mut r = Report::new();
    if h.carriers.len() != t.objects.len() || h.labels.len() != t.objects.len() || h.tight_cells.len() != t.tight.len() {
        r.push("instance.shape", t.name.clone(), "component tables do not match the theory");
        return r;
    }
    for d in 0..t.objects.len() {
        r.check(typed(&h.labels[d], h.carriers[d].len(), x.on_objects[d].len()), "instance.label", || t.objects[d].clone(), "labelling has the wrong domain or codomain");
    }
    for (f, a) in t.tight.iter().enumerate() {
        let hf = &h.tight_cells[f];
        let ok = typed(hf, h.carriers[a.src].len(), h.carriers[a.dst].len()) && (0..hf.len()).all(|e| h.labels[a.dst][hf[e]] == x.on_tight[f][h.labels[a.src][e]]);
        r.check(ok, "instance.tight.over", || a.name.clone(), "function is mistyped or does not lie over the model");
    }
    if !r.is_ok() {
        return r;
    }
    for (&(f, g), &fg) in &t.tight_comp {
        r.check(
            compose(&h.tight_cells[f], &h.tight_cells[g]) == h.tight_cells[fg],
            "instance.tight.functor",
            || format!("{},{}", t.tight[f].name, t.tight[g].name),
            "composite arrow is not the composite function",
        );
    }
    r
}

/// Pull an instance over `Y` back along `α: X → Y`. Elements over `d` are
/// pairs `(e, x)` with `e ∈ Hd` over `α_d(x)`, in lexicographic order.
pub fn restrict_instance(alpha: &ModelMorphism, h: &Instance) -> Result<Instance> {
    if *alpha.target != *h.model {
        return Err(Error::Mismatch("instance is not over the morphism's target".into()));
    }
    let x = alpha.source.clone();
    let t = x.theory.clone();
    let mut pairs = Vec::with_capacity(t.objects.len());
    let mut carriers = Vec::with_capacity(t.objects.len());
    for d in 0..t.objects.len() {
        let ps = pullback_pairs(&h.labels[d], &alpha.on_objects[d]);
        carriers.push(FiniteSet::new(ps.iter().map(|&(e, xx)| pair_label(h.carriers[d].label(e), x.on_objects[d].label(xx))))?);
        pairs.push(ps);
    }
    let index = |d: usize, e: usize, xx: usize| pairs[d].binary_search(&(e, xx)).ok();
    let labels = pairs.iter().map(|ps| ps.iter().map(|&(_, xx)| xx).collect()).collect();
    let tight_cells = t
        .tight
        .iter()
        .enumerate()
        .map(|(f, a)| pairs[a.src].iter().map(|&(e, xx)| index(a.dst, h.tight_cells[f][e], x.on_tight[f][xx]).expect("restriction of a tight arrow")).collect())
        .collect();
    Instance::from_parts(x.clone(), carriers, labels, tight_cells, |m, p, hh| {
        let (src, dst) = (t.loose[m].src, t.loose[m].dst);
        let (e, _) = pairs[src][p];
        let e2 = h.act(m, e, alpha.on_loose[m][hh])?;
        index(dst, e2, x.on_loose[m].right[hh])
    })
}

/// Apply restriction to an instance morphism `h → k` over `Y`.
pub fn restrict_instance_morphism(alpha: &ModelMorphism, mu: &InstanceMorphism) -> Result<InstanceMorphism> {
    let h = Arc::new(restrict_instance(alpha, &mu.source)?);
    let k = Arc::new(restrict_instance(alpha, &mu.target)?);
    let t = &alpha.source.theory;
    let mut components = Vec::with_capacity(t.objects.len());
    for d in 0..t.objects.len() {
        let hp = pullback_pairs(&mu.source.labels[d], &alpha.on_objects[d]);
        let kp = pullback_pairs(&mu.target.labels[d], &alpha.on_objects[d]);
        components.push(hp.iter().map(|&(e, xx)| kp.binary_search(&(mu.components[d][e], xx)).expect("label preserved")).collect());
    }
    Ok(InstanceMorphism { source: h, target: k, components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collage::FinCategory;
    use crate::span_model::{category_model, enumerate_model_morphisms, terminal_model, validate_model, MorphismFilter};
    use crate::theory_core::{builtin_theory, Builtin};

    /// The walking arrow `a → b` as a model of the terminal theory.
    fn arrow_model() -> Arc<SpanModel> {
        let t = Arc::new(builtin_theory(Builtin::Terminal));
        let c = FinCategory::from_table(vec!["a".into(), "b".into()], vec![("id:a".into(), 0, 0), ("id:b".into(), 1, 1), ("u".into(), 0, 1)], vec![0, 1], |f, g| {
            if f == 2 || g == 2 {
                2
            } else {
                f
            }
        });
        Arc::new(category_model(&t, &c).unwrap())
    }

    /// A copresheaf on the arrow: `P a = {p, q}`, `P b = {r, s}`, `u` sends
    /// both to `r`.
    fn arrow_copresheaf(x: &Arc<SpanModel>, image_of_q: usize) -> Instance {
        let carrier = FiniteSet::from_labels(["p", "q", "r", "s"]);
        let labels = vec![0, 0, 1, 1];
        Instance::from_parts(x.clone(), vec![carrier], vec![labels], vec![vec![0, 1, 2, 3]], |_, e, h| match (e, h) {
            (e, 0) | (e, 1) => Some(e),
            (0, 2) => Some(2),
            (1, 2) => Some(image_of_q),
            _ => None,
        })
        .unwrap()
    }

    #[test]
    fn empty_and_terminal_instances_validate() {
        for b in [Builtin::Terminal, Builtin::WalkingSquare, Builtin::Signed, Builtin::WalkingLoose] {
            let x = Arc::new(terminal_model(&Arc::new(builtin_theory(b))));
            assert!(validate_instance(&empty_instance(&x)).is_ok());
            let r = validate_instance(&terminal_instance(&x));
            assert!(r.is_ok(), "{r}");
        }
    }

    #[test]
    fn copresheaf_validates() {
        let x = arrow_model();
        assert!(validate_model(&x).is_ok());
        let h = arrow_copresheaf(&x, 2);
        let r = validate_instance(&h);
        assert!(r.is_ok(), "{r}");
    }

    #[test]
    fn broken_unit_is_reported() {
        let x = arrow_model();
        let mut h = arrow_copresheaf(&x, 2);
        h.actions[0].values[0] = 1;
        assert!(validate_instance(&h).has_rule("instance.unit"));
    }

    #[test]
    fn broken_associativity_is_reported() {
        // Over the span category with two composable non-identity arrows,
        // acting in two steps must agree with acting by the composite.
        let t = Arc::new(builtin_theory(Builtin::Terminal));
        let c = FinCategory::from_table(
            vec!["a".into(), "b".into(), "c".into()],
            vec![("id:a".into(), 0, 0), ("id:b".into(), 1, 1), ("id:c".into(), 2, 2), ("u".into(), 0, 1), ("v".into(), 1, 2), ("u·v".into(), 0, 2)],
            vec![0, 1, 2],
            |f, g| match (f, g) {
                (f, 0..=2) => f,
                (0..=2, g) => g,
                (3, 4) => 5,
                _ => unreachable!(),
            },
        );
        let x = Arc::new(category_model(&t, &c).unwrap());
        let carrier = FiniteSet::from_labels(["pa", "pb", "pc", "pc2"]);
        let act = |good: bool| {
            move |_: usize, e: usize, h: usize| -> Option<usize> {
                Some(match (e, h) {
                    (e, 0..=2) => e,
                    (0, 3) => 1,
                    (1, 4) => 2,
                    (0, 5) => {
                        if good {
                            2
                        } else {
                            3
                        }
                    }
                    _ => return None,
                })
            }
        };
        let mk = |good| Instance::from_parts(x.clone(), vec![carrier.clone()], vec![vec![0, 1, 2, 2]], vec![vec![0, 1, 2, 3]], act(good)).unwrap();
        assert!(validate_instance(&mk(true)).is_ok());
        let r = validate_instance(&mk(false));
        assert!(r.has_rule("instance.assoc"), "{r}");
        assert!(r.entries[0].at.contains("(pa,u,v)"));
    }

    #[test]
    fn morphisms_and_equivariance() {
        let x = arrow_model();
        let h = Arc::new(arrow_copresheaf(&x, 2));
        let id = InstanceMorphism::identity(&h);
        assert!(id.validate().is_ok());
        assert_eq!(id.compose(&id).unwrap(), id);
        // Swapping p and q keeps the action since both go to r.
        let swap = InstanceMorphism { source: h.clone(), target: h.clone(), components: vec![vec![1, 0, 2, 3]] };
        assert!(swap.validate().is_ok());
        let k = Arc::new(arrow_copresheaf(&x, 3));
        let bad = InstanceMorphism { source: k.clone(), target: k.clone(), components: vec![vec![1, 0, 2, 3]] };
        assert!(bad.validate().has_rule("instance_morphism.equivariant"));
        // Endomorphisms of h: p,q ↦ any of p,q with u-images fixed by r ↦ r:
        // r, s each go to r or s, and p,q go anywhere over a.
        let all = enumerate_instance_morphisms(&h, &h, 1000).unwrap();
        assert!(all.iter().all(|m| m.validate().is_ok()));
        let brute = brute_force_count(&h, &h);
        assert_eq!(all.len(), brute);
    }

    fn brute_force_count(h: &Arc<Instance>, k: &Arc<Instance>) -> usize {
        let n = h.carriers[0].len();
        let m = k.carriers[0].len();
        let mut count = 0;
        let total = m.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let comp: Vec<usize> = (0..n)
                .map(|_| {
                    let v = c % m;
                    c /= m;
                    v
                })
                .collect();
            let mu = InstanceMorphism { source: h.clone(), target: k.clone(), components: vec![comp] };
            if mu.validate().is_ok() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn restriction_along_identity_and_points() {
        let x = arrow_model();
        let h = arrow_copresheaf(&x, 2);
        let id = ModelMorphism::identity(&x);
        let r = restrict_instance(&id, &h).unwrap();
        assert!(validate_instance(&r).is_ok());
        assert!(find_instance_isomorphism(&Arc::new(r), &Arc::new(h.clone())).is_some());
        // Restricting along the inclusion of the object b gives P b.
        let t = x.theory.clone();
        let one = Arc::new(terminal_model(&t));
        let pts = enumerate_model_morphisms(&one, &x, &MorphismFilter::default(), 10).unwrap();
        assert_eq!(pts.len(), 2);
        let at_b = pts.iter().find(|p| p.on_objects[0] == vec![1]).unwrap();
        let r = restrict_instance(at_b, &h).unwrap();
        assert!(validate_instance(&r).is_ok());
        assert_eq!(r.carriers[0].labels(), ["(r,*)", "(s,*)"]);
    }

    #[test]
    fn restriction_of_terminal_instance() {
        let x = arrow_model();
        let one = Arc::new(terminal_model(&x.theory));
        let bang = enumerate_model_morphisms(&x, &one, &MorphismFilter::default(), 10).unwrap();
        assert_eq!(bang.len(), 1);
        let r = restrict_instance(&bang[0], &terminal_instance(&one)).unwrap();
        assert!(validate_instance(&r).is_ok());
        assert!(find_instance_isomorphism(&Arc::new(r), &Arc::new(terminal_instance(&x))).is_some());
    }
}
