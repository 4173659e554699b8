//! Models of elements, discrete opfibrations of models, and the indexed
//! view of a discrete opfibration as an instance.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::collage::{close_collage, collage_of_morphism};
use crate::error::{Error, Result};
use crate::finset::{pair_label, pullback_pairs, FiniteSet};
use crate::instance::{Instance, InstanceMorphism};
use crate::span_model::{ModelMorphism, SpanModel, SpanOfSets};

/// Unique lifts for `p: E → B`: for each loose `m: x ⇸ y`, the bijection
/// between `E(m)` and `E x ×_{B x} B(m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DopfWitness {
    /// `h ↦ (left h, p_m h)`.
    pub forward: Vec<Vec<(usize, usize)>>,
    pub lift: Vec<HashMap<(usize, usize), usize>>,
}

impl DopfWitness {
    pub fn lift(&self, m: usize, e: usize, b: usize) -> Option<usize> {
        self.lift[m].get(&(e, b)).copied()
    }

    /// Re-check the bijections against `p`.
    pub fn check(&self, p: &ModelMorphism) -> bool {
        let (e, b) = (&*p.source, &*p.target);
        let t = &e.theory;
        if self.forward.len() != t.loose.len() || self.lift.len() != t.loose.len() {
            return false;
        }
        t.loose.iter().enumerate().all(|(m, a)| {
            let pb = pullback_pairs(&p.on_objects[a.src], &b.on_loose[m].left);
            let fw = &self.forward[m];
            fw.len() == e.on_loose[m].len()
                && pb.len() == fw.len()
                && fw.iter().enumerate().all(|(h, &(x, bb))| e.on_loose[m].left[h] == x && p.on_loose[m][h] == bb && self.lift[m].get(&(x, bb)) == Some(&h))
                && pb.iter().all(|k| self.lift[m].contains_key(k))
        })
    }
}

/// A heteromorphism of the base with the wrong number of lifts at some
/// element over its source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DopfCounterexample {
    pub loose: String,
    pub heteromorphism: String,
    pub element: String,
    pub lifts: Vec<String>,
}

impl fmt::Display for DopfCounterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {} has {} lifts from {}", self.loose, self.heteromorphism, self.lifts.len(), self.element)?;
        if !self.lifts.is_empty() {
            write!(f, ": {}", self.lifts.join(", "))?;
        }
        Ok(())
    }
}

pub fn is_discrete_opfibration(p: &ModelMorphism) -> std::result::Result<DopfWitness, DopfCounterexample> {
    let (e, b) = (&*p.source, &*p.target);
    let t = &e.theory;
    let mut forward = Vec::with_capacity(t.loose.len());
    let mut lift = Vec::with_capacity(t.loose.len());
    for (m, a) in t.loose.iter().enumerate() {
        let (em, bm) = (&e.on_loose[m], &b.on_loose[m]);
        let fw: Vec<(usize, usize)> = (0..em.len()).map(|h| (em.left[h], p.on_loose[m][h])).collect();
        let mut lifts: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (h, &k) in fw.iter().enumerate() {
            lifts.entry(k).or_default().push(h);
        }
        for (x, bb) in pullback_pairs(&p.on_objects[a.src], &bm.left) {
            let hs = lifts.get(&(x, bb)).cloned().unwrap_or_default();
            if hs.len() != 1 {
                return Err(DopfCounterexample {
                    loose: a.name.clone(),
                    heteromorphism: bm.apex.label(bb).to_string(),
                    element: e.on_objects[a.src].label(x).to_string(),
                    lifts: hs.iter().map(|&h| em.apex.label(h).to_string()).collect(),
                });
            }
        }
        // Lifts lying over pairs outside the pullback only occur for
        // morphisms that fail validation.
        if lifts.len() != em.len() {
            let (&(x, bb), hs) = lifts.iter().filter(|(_, hs)| hs.len() > 1).min().expect("some pair has two lifts");
            return Err(DopfCounterexample {
                loose: a.name.clone(),
                heteromorphism: bm.apex.label(bb).to_string(),
                element: e.on_objects[a.src].label(x).to_string(),
                lifts: hs.iter().map(|&h| em.apex.label(h).to_string()).collect(),
            });
        }
        lift.push(lifts.into_iter().map(|(k, hs)| (k, hs[0])).collect());
        forward.push(fw);
    }
    Ok(DopfWitness { forward, lift })
}

/// The model of elements of an instance, its projection, and the lifts.
#[derive(Debug, Clone)]
pub struct Elements {
    pub model: Arc<SpanModel>,
    pub projection: ModelMorphism,
    pub witness: DopfWitness,
}

/// `E x = H x`, `E(m) = H x ×_{B x} B(m)` as pairs `(e, b)`.
pub fn elements(p: &Instance) -> Result<Elements> {
    let b = p.model.clone();
    let t = b.theory.clone();
    let mut on_loose = Vec::with_capacity(t.loose.len());
    let mut pairs = Vec::with_capacity(t.loose.len());
    for (m, a) in t.loose.iter().enumerate() {
        let ps = pullback_pairs(&p.labels[a.src], &b.on_loose[m].left);
        let apex = FiniteSet::new(ps.iter().map(|&(e, h)| pair_label(p.carriers[a.src].label(e), b.on_loose[m].apex.label(h))))?;
        let left = ps.iter().map(|&(e, _)| e).collect();
        let right = ps.iter().map(|&(e, h)| p.act(m, e, h).expect("action is total")).collect();
        on_loose.push(SpanOfSets { apex, left, right });
        pairs.push(ps);
    }
    let index = |m: usize, e: usize, h: usize| pairs[m].binary_search(&(e, h)).ok();
    let on_cells = t
        .cells
        .iter()
        .enumerate()
        .map(|(c, cell)| pairs[cell.top].iter().map(|&(e, h)| index(cell.bottom, p.tight_cells[cell.left][e], b.on_cells[c][h]).expect("cell lands in the pullback")).collect())
        .collect();
    let unitors = (0..t.objects.len())
        .map(|d| (0..p.carriers[d].len()).map(|e| index(t.loose_id[d], e, b.unitors[d][p.labels[d][e]]).expect("unit lands in the pullback")).collect())
        .collect();
    let model = Arc::new(SpanModel::from_parts(
        t.clone(),
        p.carriers.clone(),
        p.tight_cells.clone(),
        on_loose,
        on_cells,
        |m, n, i, j| {
            let (e, h1) = pairs[m][i];
            let (_, h2) = pairs[n][j];
            index(t.loose_compose(m, n)?, e, b.lax(m, n, h1, h2)?)
        },
        unitors,
    )?);
    let projection =
        ModelMorphism { source: model.clone(), target: b.clone(), on_objects: p.labels.clone(), on_loose: pairs.iter().map(|ps| ps.iter().map(|&(_, h)| h).collect()).collect() };
    let witness = DopfWitness { forward: pairs.clone(), lift: pairs.iter().map(|ps| ps.iter().enumerate().map(|(i, &k)| (k, i)).collect()).collect() };
    Ok(Elements { model, projection, witness })
}

/// The instance of a discrete opfibration: carriers of `E` labelled by
/// `p`, acting through unique lifts.
pub fn nabla(p: &ModelMorphism, w: &DopfWitness) -> Result<Instance> {
    if !w.check(p) {
        return Err(Error::NotDiscreteOpfibration("witness does not certify unique lifts".into()));
    }
    let e = &*p.source;
    Instance::from_parts(p.target.clone(), e.on_objects.clone(), p.on_objects.clone(), e.on_tight.clone(), |m, x, b| w.lift(m, x, b).map(|h| e.on_loose[m].right[h]))
}

/// The unique morphism `dom p → dom q` over the base with the given object
/// components.
pub fn dopf_morphism_from_objects(p: &ModelMorphism, q: &ModelMorphism, wq: &DopfWitness, on_objects: Vec<Vec<usize>>) -> Result<ModelMorphism> {
    if *p.target != *q.target {
        return Err(Error::Mismatch("discrete opfibrations over different bases".into()));
    }
    let (e, f) = (&*p.source, &*q.source);
    let t = &e.theory;
    for d in 0..t.objects.len() {
        for x in 0..e.on_objects[d].len() {
            if on_objects[d].get(x).map(|&y| q.on_objects[d][y]) != Some(p.on_objects[d][x]) {
                return Err(Error::NoExtension(format!("component at {} does not commute with the projections", e.on_objects[d].label(x))));
            }
        }
    }
    let mut on_loose = Vec::with_capacity(t.loose.len());
    for (m, a) in t.loose.iter().enumerate() {
        let mut comp = Vec::with_capacity(e.on_loose[m].len());
        for h in 0..e.on_loose[m].len() {
            let x = on_objects[a.src][e.on_loose[m].left[h]];
            let l = wq.lift(m, x, p.on_loose[m][h]).ok_or_else(|| Error::NoExtension(format!("no lift at {}", e.on_loose[m].apex.label(h))))?;
            if f.on_loose[m].right[l] != on_objects[a.dst][e.on_loose[m].right[h]] {
                return Err(Error::NoExtension(format!("lift of {} ends at the wrong element", e.on_loose[m].apex.label(h))));
            }
            comp.push(l);
        }
        on_loose.push(comp);
    }
    let g = ModelMorphism { source: p.source.clone(), target: q.source.clone(), on_objects, on_loose };
    let r = g.validate();
    if !r.is_ok() {
        return Err(Error::NoExtension(format!("induced components are not a morphism:\n{r}")));
    }
    Ok(g)
}

/// `∫μ` for an instance morphism, over the common base.
pub fn elements_of_morphism(mu: &InstanceMorphism, src: &Elements, dst: &Elements) -> Result<ModelMorphism> {
    dopf_morphism_from_objects(&src.projection, &dst.projection, &dst.witness, mu.components.clone())
}

/// Whether `p` is a discrete opfibration of models, and whether `κp` is
/// one of categories. The two always agree.
pub fn kappa_creates_dopf_check(p: &ModelMorphism, bound: usize) -> Result<(bool, bool)> {
    let ce = close_collage(&p.source, bound)?;
    let cb = close_collage(&p.target, bound)?;
    let kp = collage_of_morphism(p, &ce, &cb)?;
    Ok((is_discrete_opfibration(p).is_ok(), kp.is_classical_dopf()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{terminal_instance, validate_instance};
    use crate::span_model::{terminal_model, validate_model};
    use crate::theory_core::{builtin_theory, Builtin};

    #[test]
    fn identity_is_dopf() {
        for b in [Builtin::WalkingSquare, Builtin::Signed, Builtin::PromTrunc(2)] {
            let x = Arc::new(terminal_model(&Arc::new(builtin_theory(b))));
            let id = ModelMorphism::identity(&x);
            let w = is_discrete_opfibration(&id).unwrap();
            assert!(w.check(&id));
            let h = nabla(&id, &w).unwrap();
            assert!(validate_instance(&h).is_ok());
            if b != Builtin::PromTrunc(2) {
                assert_eq!(kappa_creates_dopf_check(&id, 6).unwrap(), (true, true));
            }
        }
    }

    #[test]
    fn elements_of_terminal_instance() {
        let x = Arc::new(terminal_model(&Arc::new(builtin_theory(Builtin::WalkingSquare))));
        let h = terminal_instance(&x);
        let el = elements(&h).unwrap();
        assert!(validate_model(&el.model).is_ok());
        assert!(el.projection.validate().is_ok());
        assert!(el.witness.check(&el.projection));
        assert_eq!(is_discrete_opfibration(&el.projection).unwrap(), el.witness);
        let back = nabla(&el.projection, &el.witness).unwrap();
        assert_eq!(back.carriers, h.carriers);
        assert_eq!(back.actions, h.actions);
    }
}
