//! Cartesian models and instances over theories with designated products.

mod multicategory;
mod ordinals;

use std::collections::HashMap;
use std::sync::Arc;

use crate::elements::elements;
use crate::error::{Error, Result};
use crate::finset::{FiniteSet, Func};
use crate::instance::Instance;
use crate::report::Report;
use crate::span_model::SpanModel;
use crate::theory_core::{builtin_theory, Builtin, CartesianStructure, DoubleTheory};

pub(crate) use multicategory::tuples;
pub use multicategory::{
    binary_multicategory, instance_to_multifunctor, model_to_multicategory, multicategory_to_model, multifunctor_to_instance, parity_multicategory, product_carriers,
    terminal_multicategory, Multicategory, Multifunctor, Multimorphism,
};
pub use ordinals::{OrdinalKind, Ordinals, Shape};

fn structure(t: &DoubleTheory, r: &mut Report) -> Option<CartesianStructure> {
    let cs = t.cartesian.clone();
    if cs.is_none() {
        r.push("cartesian.structure", t.name.clone(), "theory has no designated products");
    }
    cs
}

/// Whether pairing `f, g: A → B, C` is a bijection `A ≅ B × C`.
fn pairing_bijective(f: &[usize], g: &[usize], nb: usize, nc: usize) -> bool {
    if f.len() != nb * nc {
        return false;
    }
    let mut seen = vec![false; nb * nc];
    f.iter().zip(g).all(|(&b, &c)| !std::mem::replace(&mut seen[b * nc + c], true))
}

/// Products of objects and loose arrows are sent to products of sets,
/// and the terminal ones to singletons.
pub fn validate_cartesian_model(x: &SpanModel) -> Report {
    let t = &*x.theory;
    let mut r = Report::new();
    let Some(cs) = structure(t, &mut r) else { return r };
    r.check(x.on_objects[cs.terminal].len() == 1, "cartesian_model.terminal", || t.objects[cs.terminal].clone(), "terminal object is not sent to a singleton");
    r.check(
        x.on_loose[cs.loose_terminal].len() == 1,
        "cartesian_model.loose_terminal",
        || t.loose[cs.loose_terminal].name.clone(),
        "terminal loose arrow is not sent to a singleton",
    );
    for (&(d1, d2), cone) in &cs.products {
        let ok = pairing_bijective(&x.on_tight[cone.proj.0], &x.on_tight[cone.proj.1], x.on_objects[d1].len(), x.on_objects[d2].len());
        r.check(ok, "cartesian_model.product", || format!("{} → {} × {}", t.objects[cone.apex], t.objects[d1], t.objects[d2]), "comparison map is not a bijection");
    }
    for (&(m1, m2), cone) in &cs.loose_products {
        let ok = pairing_bijective(&x.on_cells[cone.proj.0], &x.on_cells[cone.proj.1], x.on_loose[m1].len(), x.on_loose[m2].len());
        r.check(
            ok,
            "cartesian_model.loose_product",
            || format!("{} → {} × {}", t.loose[cone.apex].name, t.loose[m1].name, t.loose[m2].name),
            "apex comparison map is not a bijection",
        );
    }
    r
}

/// The carrier comparisons of an instance are bijections, and the
/// terminal carrier is a singleton.
pub fn validate_cartesian_instance(p: &Instance) -> Report {
    let t = &*p.model.theory;
    let mut r = Report::new();
    let Some(cs) = structure(t, &mut r) else { return r };
    r.check(p.carriers[cs.terminal].len() == 1, "cartesian_instance.terminal", || t.objects[cs.terminal].clone(), "terminal carrier is not a singleton");
    for (&(d1, d2), cone) in &cs.products {
        let ok = pairing_bijective(&p.tight_cells[cone.proj.0], &p.tight_cells[cone.proj.1], p.carriers[d1].len(), p.carriers[d2].len());
        r.check(ok, "cartesian_instance.product", || format!("{} → {} × {}", t.objects[cone.apex], t.objects[d1], t.objects[d2]), "comparison map is not a bijection");
    }
    r
}

/// Recompute the action at each product loose arrow from the actions at
/// its factors, through the projection cells, and compare.
pub fn check_product_actions_determined(p: &Instance) -> Report {
    let x = &*p.model;
    let t = &*x.theory;
    let mut r = Report::new();
    let Some(cs) = structure(t, &mut r) else { return r };
    for (&(m1, m2), cone) in &cs.loose_products {
        let m = cone.apex;
        let (c1, c2) = (&t.cells[cone.proj.0], &t.cells[cone.proj.1]);
        let (r1, r2) = (&p.tight_cells[c1.right], &p.tight_cells[c2.right]);
        let pairing: HashMap<(usize, usize), usize> = (0..p.carriers[t.loose[m].dst].len()).map(|y| ((r1[y], r2[y]), y)).collect();
        let act = &p.actions[m];
        for (&(e, h), &v) in act.pairs.iter().zip(&act.values) {
            let a1 = p.act(m1, p.tight_cells[c1.left][e], x.on_cells[cone.proj.0][h]);
            let a2 = p.act(m2, p.tight_cells[c2.left][e], x.on_cells[cone.proj.1][h]);
            let expected = a1.zip(a2).and_then(|k| pairing.get(&k).copied());
            r.check(
                expected == Some(v),
                "cartesian_instance.product_action",
                || format!("{} at ({},{})", t.loose[m].name, p.carriers[t.loose[m].src].label(e), x.on_loose[m].apex.label(h)),
                "stored action differs from the one forced by the factors",
            );
        }
    }
    r
}

/// `(p is cartesian, the model of elements of p is cartesian)`. The two
/// always agree over a cartesian base.
pub fn cartesian_elements_check(p: &Instance) -> Result<(bool, bool)> {
    let el = elements(p)?;
    Ok((validate_cartesian_instance(p).is_ok(), validate_cartesian_model(&el.model).is_ok()))
}

/// The instance with a point over the terminal object and nothing else,
/// when the model allows one.
pub fn cartesian_empty_instance(x: &Arc<SpanModel>) -> Result<Instance> {
    let t = &x.theory;
    let cs = t.cartesian.as_ref().ok_or_else(|| Error::Invalid(format!("{} has no designated products", t.name)))?;
    let mut carriers: Vec<FiniteSet> = vec![FiniteSet::default(); t.objects.len()];
    let mut labels: Vec<Func> = vec![Vec::new(); t.objects.len()];
    if x.on_objects[cs.terminal].len() != 1 {
        return Err(Error::Invalid("model is not cartesian at the terminal object".into()));
    }
    carriers[cs.terminal] = FiniteSet::from_labels(["*"]);
    labels[cs.terminal] = vec![0];
    let tight_cells = t.tight.iter().map(|a| if a.src == cs.terminal && a.dst == cs.terminal { vec![0] } else { Vec::new() }).collect();
    Instance::from_parts(x.clone(), carriers, labels, tight_cells, |m, _, _| (t.loose[m].dst == cs.terminal).then_some(0))
}

/// The cartesian model of a cocartesian multicategory over
/// `sq_finset_op(k)`, with its axioms checked on the way.
pub fn build_cocartesian_example(mc: &Multicategory, k: usize) -> Result<SpanModel> {
    let r = mc.validate(k);
    if !r.is_ok() {
        return Err(Error::Invalid(format!("not a cocartesian multicategory:\n{r}")));
    }
    let t = Arc::new(builtin_theory(Builtin::SqFinsetOp(k)));
    let x = multicategory_to_model(mc, &t)?;
    let r = crate::span_model::validate_model(&x);
    if !r.is_ok() {
        return Err(Error::Invalid(format!("σ-actions are not compatible with composition:\n{r}")));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{terminal_instance, validate_instance};
    use crate::span_model::terminal_model;

    fn prom(k: usize) -> Arc<DoubleTheory> {
        Arc::new(builtin_theory(Builtin::PromTrunc(k)))
    }

    #[test]
    fn terminal_model_is_cartesian() {
        for t in [prom(2), Arc::new(builtin_theory(Builtin::SqFinsetOp(2)))] {
            let x = Arc::new(terminal_model(&t));
            assert!(validate_cartesian_model(&x).is_ok());
            let h = terminal_instance(&x);
            assert!(validate_cartesian_instance(&h).is_ok());
            assert!(check_product_actions_determined(&h).is_ok());
            assert_eq!(cartesian_elements_check(&h).unwrap(), (true, true));
        }
    }

    #[test]
    fn doubled_square_is_reported() {
        let t = prom(2);
        let mut x = terminal_model(&t);
        let x2 = t.object("x2").unwrap();
        x.on_objects[x2] = FiniteSet::from_labels(["a", "b"]);
        for (f, a) in t.tight.iter().enumerate() {
            if a.src == x2 {
                x.on_tight[f] = vec![0, 0];
            } else if a.dst == x2 {
                x.on_tight[f] = vec![0; x.on_objects[a.src].len()];
            }
        }
        let r = validate_cartesian_model(&x);
        assert!(r.has_rule("cartesian_model.product"), "{r}");
    }

    #[test]
    fn empty_instance_without_constants() {
        let t = prom(2);
        let mut mc = terminal_multicategory(2, false);
        // Drop the nullary operation.
        mc.morphisms.remove(0);
        mc.identities = vec![0];
        mc.partial = [((0, 0, 0), 0), ((0, 0, 1), 1), ((1, 0, 0), 1), ((1, 1, 0), 1)].into_iter().collect();
        assert!(mc.validate(2).is_ok(), "{}", mc.validate(2));
        let x = Arc::new(multicategory_to_model(&mc, &t).unwrap());
        let h = cartesian_empty_instance(&x).unwrap();
        assert!(validate_instance(&h).is_ok());
        assert!(validate_cartesian_instance(&h).is_ok());
        assert_eq!(cartesian_elements_check(&h).unwrap(), (true, true));
        let one = Arc::new(terminal_model(&t));
        assert!(cartesian_empty_instance(&one).is_err());
    }

    #[test]
    fn parity_cocartesian_validates() {
        let mc = parity_multicategory(2, true);
        let x = build_cocartesian_example(&mc, 2).unwrap();
        assert!(validate_cartesian_model(&x).is_ok());
        let mut bad = mc.clone();
        let key = bad.sigma.keys().find(|(f, s)| s.len() == 2 && bad.morphisms[*f].dom.len() == 1).cloned().unwrap();
        let other = bad.morphisms.iter().position(|m| m.dom.len() == 2 && bad.sigma[&key] != bad.morphism_named(&m.name).unwrap()).unwrap();
        bad.sigma.insert(key, other);
        assert!(build_cocartesian_example(&bad, 2).is_err());
    }
}
