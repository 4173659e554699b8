use std::sync::Arc;

use super::{validate_model, SpanModel};
use crate::error::{Error, Result};
use crate::finset::{compose, identity, is_bijection, Func};
use crate::report::Report;
use crate::search::Csp;

/// A strict tight transformation between models of one theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelMorphism {
    pub source: Arc<SpanModel>,
    pub target: Arc<SpanModel>,
    pub on_objects: Vec<Func>,
    /// Apex components `X(m) → Y(m)`.
    pub on_loose: Vec<Func>,
}

impl ModelMorphism {
    pub fn identity(x: &Arc<SpanModel>) -> ModelMorphism {
        ModelMorphism {
            source: x.clone(),
            target: x.clone(),
            on_objects: x.on_objects.iter().map(|s| identity(s.len())).collect(),
            on_loose: x.on_loose.iter().map(|s| identity(s.len())).collect(),
        }
    }

    /// Diagrammatic composite: `self` then `other`.
    pub fn compose(&self, other: &ModelMorphism) -> Result<ModelMorphism> {
        if *self.target != *other.source {
            return Err(Error::Mismatch("target of the first morphism is not the source of the second".into()));
        }
        Ok(ModelMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            on_objects: self.on_objects.iter().zip(&other.on_objects).map(|(f, g)| compose(f, g)).collect(),
            on_loose: self.on_loose.iter().zip(&other.on_loose).map(|(f, g)| compose(f, g)).collect(),
        })
    }

    pub fn is_isomorphism(&self) -> bool {
        self.on_objects.iter().zip(&self.target.on_objects).all(|(f, s)| is_bijection(f, s.len()))
            && self.on_loose.iter().zip(&self.target.on_loose).all(|(f, s)| is_bijection(f, s.len()))
    }

    /// Componentwise inverse of an isomorphism.
    pub fn inverse(&self) -> Option<ModelMorphism> {
        let inv = |fs: &[Func]| fs.iter().map(|f| crate::finset::inverse(f)).collect::<Option<Vec<_>>>();
        Some(ModelMorphism { source: self.target.clone(), target: self.source.clone(), on_objects: inv(&self.on_objects)?, on_loose: inv(&self.on_loose)? })
    }

    /// Check naturality on tight arrows and cells and compatibility with
    /// laxators and unitors, elementwise.
    pub fn validate(&self) -> Report {
        let (x, y) = (&*self.source, &*self.target);
        let t = &*x.theory;
        let mut r = Report::new();
        if *x.theory != *y.theory {
            r.push("morphism.theory", t.name.clone(), "source and target models have different theories");
            return r;
        }
        if self.on_objects.len() != t.objects.len() || self.on_loose.len() != t.loose.len() {
            r.push("morphism.shape", t.name.clone(), "component tables do not match the theory");
            return r;
        }
        for o in 0..t.objects.len() {
            let f = &self.on_objects[o];
            r.check(
                f.len() == x.on_objects[o].len() && f.iter().all(|&v| v < y.on_objects[o].len()),
                "morphism.typed",
                || t.objects[o].clone(),
                "object component has the wrong domain or codomain",
            );
        }
        for m in 0..t.loose.len() {
            let f = &self.on_loose[m];
            r.check(
                f.len() == x.on_loose[m].len() && f.iter().all(|&v| v < y.on_loose[m].len()),
                "morphism.typed",
                || t.loose[m].name.clone(),
                "loose component has the wrong domain or codomain",
            );
        }
        if !r.is_ok() {
            return r;
        }
        let (ao, al) = (&self.on_objects, &self.on_loose);
        for (f, a) in t.tight.iter().enumerate() {
            let ok = (0..x.on_objects[a.src].len()).all(|e| ao[a.dst][x.on_tight[f][e]] == y.on_tight[f][ao[a.src][e]]);
            r.check(ok, "morphism.natural", || a.name.clone(), "not natural on this tight arrow");
        }
        for (m, a) in t.loose.iter().enumerate() {
            let (sx, sy) = (&x.on_loose[m], &y.on_loose[m]);
            let ok = (0..sx.len()).all(|h| sy.left[al[m][h]] == ao[a.src][sx.left[h]] && sy.right[al[m][h]] == ao[a.dst][sx.right[h]]);
            r.check(ok, "morphism.span", || a.name.clone(), "loose component is not a map of spans");
        }
        for (c, cell) in t.cells.iter().enumerate() {
            let ok = (0..x.on_loose[cell.top].len()).all(|h| al[cell.bottom][x.on_cells[c][h]] == y.on_cells[c][al[cell.top][h]]);
            r.check(ok, "morphism.cell", || cell.name.clone(), "not natural on this cell");
        }
        for (&(m, n), lax) in &x.laxators {
            let mn = t.loose_compose(m, n).unwrap();
            let ok = lax.pairs.iter().zip(&lax.values).all(|(&(a, b), &v)| y.lax(m, n, al[m][a], al[n][b]) == Some(al[mn][v]));
            r.check(ok, "morphism.laxator", || format!("{},{}", t.loose[m].name, t.loose[n].name), "does not commute with the laxator");
        }
        for o in 0..t.objects.len() {
            let idm = t.loose_id[o];
            let ok = (0..x.on_objects[o].len()).all(|e| al[idm][x.unitors[o][e]] == y.unitors[o][ao[o][e]]);
            r.check(ok, "morphism.unitor", || t.objects[o].clone(), "does not commute with the unitor");
        }
        r
    }
}

/// Restrictions on the morphisms to enumerate.
#[derive(Debug, Clone, Default)]
pub struct MorphismFilter {
    /// Per object and source element, the allowed target elements.
    pub allowed_objects: Option<Vec<Vec<Vec<usize>>>>,
    /// Per loose arrow and source element, the allowed target elements.
    pub allowed_loose: Option<Vec<Vec<Vec<usize>>>>,
    /// Only componentwise injective morphisms.
    pub injective: bool,
}

/// Every strict morphism `a → b`, in lexicographic order of component
/// tables (objects first, then loose arrows, in theory order).
pub fn enumerate_model_morphisms(a: &Arc<SpanModel>, b: &Arc<SpanModel>, filter: &MorphismFilter, limit: usize) -> Result<Vec<ModelMorphism>> {
    let mut out = Vec::new();
    solve_morphisms(a, b, filter, limit, |m| {
        out.push(m);
        true
    })?;
    Ok(out)
}

/// Visit solutions in order; `visit` returns `false` to stop.
pub(crate) fn solve_morphisms(a: &Arc<SpanModel>, b: &Arc<SpanModel>, filter: &MorphismFilter, limit: usize, mut visit: impl FnMut(ModelMorphism) -> bool) -> Result<usize> {
    if *a.theory != *b.theory {
        return Err(Error::Mismatch("models over different theories".into()));
    }
    let t = &*a.theory;
    let (x, y) = (&**a, &**b);
    let by_ends: Vec<_> = y.on_loose.iter().map(|s| s.by_ends()).collect();
    let mut csp = Csp::new();
    let mut ov: Vec<Vec<usize>> = Vec::new();
    for o in 0..t.objects.len() {
        let n = y.on_objects[o].len();
        let vars = (0..x.on_objects[o].len())
            .map(|e| match &filter.allowed_objects {
                Some(al) => csp.var(al[o][e].clone()),
                None => csp.var_range(n),
            })
            .collect();
        ov.push(vars);
    }
    for (f, arr) in t.tight.iter().enumerate() {
        for e in 0..x.on_objects[arr.src].len() {
            let (va, vb) = (ov[arr.src][e], ov[arr.dst][x.on_tight[f][e]]);
            let yf = &y.on_tight[f];
            csp.constrain(&[va, vb], move |s| yf[s[va]] == s[vb]);
        }
    }
    let mut lv: Vec<Vec<usize>> = Vec::new();
    for (m, arr) in t.loose.iter().enumerate() {
        let sx = &x.on_loose[m];
        let mut vars = Vec::with_capacity(sx.len());
        for h in 0..sx.len() {
            let (vl, vr) = (ov[arr.src][sx.left[h]], ov[arr.dst][sx.right[h]]);
            let ends = &by_ends[m];
            let allowed = filter.allowed_loose.as_ref().map(|al| al[m][h].clone());
            vars.push(csp.var_dynamic(move |s| {
                let c = ends.get(&(s[vl], s[vr])).cloned().unwrap_or_default();
                match &allowed {
                    Some(al) => c.into_iter().filter(|v| al.contains(v)).collect(),
                    None => c,
                }
            }));
        }
        lv.push(vars);
    }
    for (c, cell) in t.cells.iter().enumerate() {
        for h in 0..x.on_loose[cell.top].len() {
            let (va, vb) = (lv[cell.top][h], lv[cell.bottom][x.on_cells[c][h]]);
            let yc = &y.on_cells[c];
            csp.constrain(&[va, vb], move |s| yc[s[va]] == s[vb]);
        }
    }
    for (&(m, n), lax) in &x.laxators {
        let mn = t.loose_compose(m, n).unwrap();
        let ylax = &y.laxators[&(m, n)];
        for (&(p, q), &v) in lax.pairs.iter().zip(&lax.values) {
            let (vp, vq, vv) = (lv[m][p], lv[n][q], lv[mn][v]);
            csp.constrain(&[vp, vq, vv], move |s| ylax.get(s[vp], s[vq]) == Some(s[vv]));
        }
    }
    for o in 0..t.objects.len() {
        let idm = t.loose_id[o];
        for e in 0..x.on_objects[o].len() {
            let (ve, vu) = (ov[o][e], lv[idm][x.unitors[o][e]]);
            let yu = &y.unitors[o];
            csp.constrain(&[ve, vu], move |s| yu[s[ve]] == s[vu]);
        }
    }
    if filter.injective {
        for vars in ov.iter().chain(lv.iter()) {
            for i in 0..vars.len() {
                for j in 0..i {
                    let (vi, vj) = (vars[i], vars[j]);
                    csp.constrain(&[vi, vj], move |s| s[vi] != s[vj]);
                }
            }
        }
    }
    csp.solve(limit, |s| {
        visit(ModelMorphism {
            source: a.clone(),
            target: b.clone(),
            on_objects: ov.iter().map(|vs| vs.iter().map(|&v| s[v]).collect()).collect(),
            on_loose: lv.iter().map(|vs| vs.iter().map(|&v| s[v]).collect()).collect(),
        })
    })
}

/// Some isomorphism `a ≅ b`, if one exists.
pub fn find_model_isomorphism(a: &Arc<SpanModel>, b: &Arc<SpanModel>) -> Option<ModelMorphism> {
    if *a.theory != *b.theory {
        return None;
    }
    let same = a.on_objects.iter().zip(&b.on_objects).all(|(p, q)| p.len() == q.len()) && a.on_loose.iter().zip(&b.on_loose).all(|(p, q)| p.len() == q.len());
    if !same || !validate_model(a).is_ok() {
        return None;
    }
    let filter = MorphismFilter { injective: true, ..Default::default() };
    let mut found = None;
    solve_morphisms(a, b, &filter, usize::MAX, |m| {
        found = Some(m);
        false
    })
    .ok()?;
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span_model::{category_model, terminal_model};
    use crate::theory_core::{builtin_theory, Builtin};

    #[test]
    fn terminal_to_terminal_is_unique() {
        let t = Arc::new(builtin_theory(Builtin::WalkingSquare));
        let x = Arc::new(terminal_model(&t));
        let ms = enumerate_model_morphisms(&x, &x, &MorphismFilter::default(), 100).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0], ModelMorphism::identity(&x));
        assert!(ms[0].validate().is_ok());
    }

    #[test]
    fn points_of_a_category() {
        // Morphisms from the terminal model are objects with an idempotent
        // endomorphism that is the identity (unitor compatibility).
        let t = Arc::new(builtin_theory(Builtin::Terminal));
        let c = super::super::tests::square_category();
        let x = Arc::new(category_model(&t, &c).unwrap());
        let one = Arc::new(terminal_model(&t));
        let ms = enumerate_model_morphisms(&one, &x, &MorphismFilter::default(), 100).unwrap();
        assert_eq!(ms.len(), 4);
        // functors from the square category to itself
        let ends = enumerate_model_morphisms(&x, &x, &MorphismFilter::default(), 10_000).unwrap();
        let oracle = crate::collage::enumerate_functors(&Arc::new(c.clone()), &Arc::new(c), 10_000).unwrap();
        assert_eq!(ends.len(), oracle.len());
        for m in &ends {
            assert!(m.validate().is_ok());
        }
    }

    #[test]
    fn composition_laws() {
        let t = Arc::new(builtin_theory(Builtin::Terminal));
        let c = super::super::tests::square_category();
        let x = Arc::new(category_model(&t, &c).unwrap());
        let ends = enumerate_model_morphisms(&x, &x, &MorphismFilter::default(), 10_000).unwrap();
        let id = ModelMorphism::identity(&x);
        for f in ends.iter().take(6) {
            assert_eq!(&id.compose(f).unwrap(), f);
            assert_eq!(&f.compose(&id).unwrap(), f);
            for g in ends.iter().take(6) {
                for h in ends.iter().take(6) {
                    let l = f.compose(g).unwrap().compose(h).unwrap();
                    let r = f.compose(&g.compose(h).unwrap()).unwrap();
                    assert_eq!(l, r);
                }
            }
        }
        assert!(find_model_isomorphism(&x, &x).unwrap().is_isomorphism());
    }
}
