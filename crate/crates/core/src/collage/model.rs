//! The collage of a model and the equivalence between instances and
//! copresheaves on it.

use std::collections::HashMap;
use std::sync::Arc;

use super::{close_presented_category, Copresheaf, FinCategory, FinFunctor, GenKind, PresentedCategory};
use crate::error::{Error, Result};
use crate::finset::{pair_label, FiniteSet, Func};
use crate::instance::Instance;
use crate::span_model::{ModelMorphism, SpanModel};
use crate::theory_core::{Loose, Ob, Tight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollageGen {
    Tight { arrow: Tight, elem: usize },
    Het { loose: Loose, elem: usize },
}

#[derive(Debug, Clone)]
pub struct Collage {
    pub model: Arc<SpanModel>,
    pub presented: PresentedCategory,
    /// Collage object `[x]` for each theory object and element.
    pub objects: Vec<(Ob, usize)>,
    offsets: Vec<usize>,
    pub gens: Vec<CollageGen>,
    tight_gen: HashMap<(Tight, usize), usize>,
    het_gen: Vec<Vec<usize>>,
}

impl Collage {
    pub fn object_of(&self, d: Ob, x: usize) -> usize {
        self.offsets[d] + x
    }

    /// The word for `[f]_x`; empty for identity arrows.
    pub fn tight_word(&self, f: Tight, x: usize) -> Vec<usize> {
        self.tight_gen.get(&(f, x)).map(|&g| vec![g]).unwrap_or_default()
    }

    pub fn het_generator(&self, m: Loose, h: usize) -> usize {
        self.het_gen[m][h]
    }
}

/// Objects `[x]`, generators `[f]_x` and `[h]`, and the four relation
/// classes: tight composites, laxator triangles, cell squares and unit
/// collapse.
pub fn collage_of_model(x: &Arc<SpanModel>) -> Collage {
    let t = &*x.theory;
    let mut p = PresentedCategory::default();
    let mut objects = Vec::new();
    let mut offsets = Vec::with_capacity(t.objects.len());
    for (d, name) in t.objects.iter().enumerate() {
        offsets.push(objects.len());
        for e in 0..x.on_objects[d].len() {
            p.add_object(format!("[{name}:{}]", x.on_objects[d].label(e)));
            objects.push((d, e));
        }
    }
    let obj = |d: usize, e: usize| offsets[d] + e;
    let mut gens = Vec::new();
    let mut tight_gen = HashMap::new();
    for (f, a) in t.tight.iter().enumerate() {
        if t.is_tight_identity(f) {
            continue;
        }
        for e in 0..x.on_objects[a.src].len() {
            let label = x.on_objects[a.src].label(e).to_string();
            let g = p.add_generator(format!("[{}]_{label}", a.name), obj(a.src, e), obj(a.dst, x.on_tight[f][e]), GenKind::Tight { arrow: a.name.clone(), elem: label });
            tight_gen.insert((f, e), g);
            gens.push(CollageGen::Tight { arrow: f, elem: e });
        }
    }
    let mut het_gen = Vec::with_capacity(t.loose.len());
    for (m, a) in t.loose.iter().enumerate() {
        let span = &x.on_loose[m];
        let mut ids = Vec::with_capacity(span.len());
        for h in 0..span.len() {
            let label = span.apex.label(h).to_string();
            let g = p.add_generator(format!("[{}:{label}]", a.name), obj(a.src, span.left[h]), obj(a.dst, span.right[h]), GenKind::Het { loose: a.name.clone(), elem: label });
            ids.push(g);
            gens.push(CollageGen::Het { loose: m, elem: h });
        }
        het_gen.push(ids);
    }
    let tw = |f: Tight, e: usize| tight_gen.get(&(f, e)).map(|&g| vec![g]).unwrap_or_default();
    for (&(f, g), &fg) in &t.tight_comp {
        if t.is_tight_identity(f) || t.is_tight_identity(g) {
            continue;
        }
        for e in 0..x.on_objects[t.tight[f].src].len() {
            let mut lhs = tw(f, e);
            lhs.extend(tw(g, x.on_tight[f][e]));
            p.add_relation(obj(t.tight[f].src, e), lhs, tw(fg, e));
        }
    }
    for (&(m, n), lax) in &x.laxators {
        let mn = t.loose_compose(m, n).unwrap();
        for (&(h1, h2), &v) in lax.pairs.iter().zip(&lax.values) {
            let src = obj(t.loose[m].src, x.on_loose[m].left[h1]);
            p.add_relation(src, vec![het_gen[m][h1], het_gen[n][h2]], vec![het_gen[mn][v]]);
        }
    }
    for (c, cell) in t.cells.iter().enumerate() {
        let top = &x.on_loose[cell.top];
        for h in 0..top.len() {
            let mut lhs = vec![het_gen[cell.top][h]];
            lhs.extend(tw(cell.right, top.right[h]));
            let mut rhs = tw(cell.left, top.left[h]);
            rhs.push(het_gen[cell.bottom][x.on_cells[c][h]]);
            p.add_relation(obj(t.loose[cell.top].src, top.left[h]), lhs, rhs);
        }
    }
    for d in 0..t.objects.len() {
        for e in 0..x.on_objects[d].len() {
            p.add_relation(obj(d, e), vec![het_gen[t.loose_id[d]][x.unitors[d][e]]], vec![]);
        }
    }
    Collage { model: x.clone(), presented: p, objects, offsets, gens, tight_gen, het_gen }
}

/// A collage together with its closure.
#[derive(Debug, Clone)]
pub struct ClosedCollage {
    pub collage: Collage,
    pub category: Arc<FinCategory>,
}

pub fn close_collage(x: &Arc<SpanModel>, bound: usize) -> Result<ClosedCollage> {
    let collage = collage_of_model(x);
    let category = Arc::new(close_presented_category(&collage.presented, bound)?);
    Ok(ClosedCollage { collage, category })
}

impl ClosedCollage {
    pub fn tight_morphism(&self, f: Tight, d: Ob, e: usize) -> usize {
        let c = &self.collage;
        self.category.eval_word(c.object_of(d, e), &c.tight_word(f, e)).expect("tight generator is composable")
    }

    pub fn het_morphism(&self, m: Loose, h: usize) -> usize {
        self.category.generators[self.collage.het_generator(m, h)]
    }
}

/// Send `[x]` to the fiber of `H d` over `x`.
pub fn instance_to_copresheaf(h: &Instance, cc: &ClosedCollage) -> Result<Copresheaf> {
    if *h.model != *cc.collage.model {
        return Err(Error::Mismatch("instance is not over the collage's model".into()));
    }
    let t = &*h.model.theory;
    let mut fibers: Vec<Vec<usize>> = Vec::with_capacity(cc.collage.objects.len());
    let mut pos: Vec<Vec<usize>> = h.carriers.iter().map(|c| vec![0; c.len()]).collect();
    let mut sets = Vec::with_capacity(cc.collage.objects.len());
    for &(d, x) in &cc.collage.objects {
        let fib = h.fiber(d, x);
        for (i, &e) in fib.iter().enumerate() {
            pos[d][e] = i;
        }
        sets.push(FiniteSet::new(fib.iter().map(|&e| h.carriers[d].label(e).to_string()))?);
        fibers.push(fib);
    }
    let gen_maps: Vec<Func> = cc
        .collage
        .gens
        .iter()
        .map(|g| match *g {
            CollageGen::Tight { arrow, elem } => {
                let a = &t.tight[arrow];
                fibers[cc.collage.object_of(a.src, elem)].iter().map(|&e| pos[a.dst][h.tight_cells[arrow][e]]).collect()
            }
            CollageGen::Het { loose, elem } => {
                let a = &t.loose[loose];
                let x = h.model.on_loose[loose].left[elem];
                fibers[cc.collage.object_of(a.src, x)].iter().map(|&e| pos[a.dst][h.act(loose, e, elem).expect("fiber element acts")]).collect()
            }
        })
        .collect();
    Ok(Copresheaf::from_generators(cc.category.clone(), sets, &gen_maps))
}

/// Sum the values of a copresheaf over the fibers of each `X d`.
pub fn copresheaf_to_instance(p: &Copresheaf, cc: &ClosedCollage) -> Result<Instance> {
    if *p.base != *cc.category {
        return Err(Error::Mismatch("copresheaf is not over the closed collage".into()));
    }
    let x = cc.collage.model.clone();
    let t = x.theory.clone();
    // Element of H d ↔ (collage object, element of its value).
    let mut elems: Vec<Vec<(usize, usize)>> = vec![Vec::new(); t.objects.len()];
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    for (o, &(d, _)) in cc.collage.objects.iter().enumerate() {
        for e in 0..p.sets[o].len() {
            index.insert((o, e), elems[d].len());
            elems[d].push((o, e));
        }
    }
    let mut carriers = Vec::with_capacity(t.objects.len());
    for d in 0..t.objects.len() {
        let plain = FiniteSet::new(elems[d].iter().map(|&(o, e)| p.sets[o].label(e).to_string()));
        let set = match plain {
            Ok(s) => s,
            Err(_) => FiniteSet::new(elems[d].iter().map(|&(o, e)| pair_label(x.on_objects[d].label(cc.collage.objects[o].1), p.sets[o].label(e))))?,
        };
        carriers.push(set);
    }
    let labels = elems.iter().map(|es| es.iter().map(|&(o, _)| cc.collage.objects[o].1).collect()).collect();
    let tight_cells = t
        .tight
        .iter()
        .enumerate()
        .map(|(f, a)| {
            elems[a.src]
                .iter()
                .map(|&(o, e)| {
                    let xx = cc.collage.objects[o].1;
                    let u = cc.tight_morphism(f, a.src, xx);
                    index[&(cc.category.dst(u), p.maps[u][e])]
                })
                .collect()
        })
        .collect();
    Instance::from_parts(x.clone(), carriers, labels, tight_cells, |m, i, h| {
        let (o, e) = elems[t.loose[m].src][i];
        let u = cc.het_morphism(m, h);
        debug_assert_eq!(cc.category.src(u), o);
        Some(index[&(cc.category.dst(u), p.maps[u][e])])
    })
}

/// `κα`: `[x] ↦ [α x]`, `[f]_x ↦ [f]_{α x}`, `[h] ↦ [α h]`.
pub fn collage_of_morphism(alpha: &ModelMorphism, src: &ClosedCollage, dst: &ClosedCollage) -> Result<FinFunctor> {
    if *src.collage.model != *alpha.source || *dst.collage.model != *alpha.target {
        return Err(Error::Mismatch("collages are not of the morphism's endpoints".into()));
    }
    let on_objects = src.collage.objects.iter().map(|&(d, x)| dst.collage.object_of(d, alpha.on_objects[d][x])).collect();
    let on_gens: Vec<usize> = src
        .collage
        .gens
        .iter()
        .map(|g| match *g {
            CollageGen::Tight { arrow, elem } => {
                let d = alpha.source.theory.tight[arrow].src;
                dst.tight_morphism(arrow, d, alpha.on_objects[d][elem])
            }
            CollageGen::Het { loose, elem } => dst.het_morphism(loose, alpha.on_loose[loose][elem]),
        })
        .collect();
    let f = FinFunctor::from_generators(src.category.clone(), dst.category.clone(), on_objects, &on_gens)
        .ok_or_else(|| Error::Invalid("generator images are not composable".into()))?;
    let r = f.validate();
    if !r.is_ok() {
        return Err(Error::Invalid(format!("collage map is not a functor:\n{r}")));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collage::find_copresheaf_isomorphism;
    use crate::instance::{empty_instance, find_instance_isomorphism, terminal_instance, validate_instance};
    use crate::span_model::{category_model, model_category, terminal_model};
    use crate::theory_core::{builtin_theory, Builtin};

    #[test]
    fn terminal_square_collage_is_commutative_square() {
        let t = Arc::new(builtin_theory(Builtin::WalkingSquare));
        let x = Arc::new(terminal_model(&t));
        let cc = close_collage(&x, 4).unwrap();
        assert_eq!(cc.category.num_objects(), 4);
        assert_eq!(cc.category.num_morphisms(), 9);
        assert!(cc.category.validate().is_ok());
    }

    #[test]
    fn terminal_theory_collage_is_one_point() {
        let t = Arc::new(builtin_theory(Builtin::Terminal));
        let cc = close_collage(&Arc::new(terminal_model(&t)), 2).unwrap();
        assert_eq!((cc.category.num_objects(), cc.category.num_morphisms()), (1, 1));
    }

    #[test]
    fn collage_of_category_model_is_the_category() {
        let t = Arc::new(builtin_theory(Builtin::Terminal));
        let c = crate::span_model::tests::square_category();
        let x = Arc::new(category_model(&t, &c).unwrap());
        let cc = close_collage(&x, 4).unwrap();
        assert_eq!(cc.category.num_morphisms(), c.num_morphisms());
        let back = model_category(&x).unwrap();
        assert_eq!(back.num_morphisms(), cc.category.num_morphisms());
    }

    #[test]
    fn signed_terminal_collage_is_z2() {
        let t = Arc::new(builtin_theory(Builtin::Signed));
        let cc = close_collage(&Arc::new(terminal_model(&t)), 3).unwrap();
        assert_eq!(cc.category.num_morphisms(), 2);
    }

    #[test]
    fn instances_round_trip() {
        for b in [Builtin::WalkingSquare, Builtin::Signed, Builtin::WalkingLoose] {
            let x = Arc::new(terminal_model(&Arc::new(builtin_theory(b))));
            let cc = close_collage(&x, 4).unwrap();
            for h in [empty_instance(&x), terminal_instance(&x)] {
                let p = instance_to_copresheaf(&h, &cc).unwrap();
                assert!(p.validate().is_ok());
                let back = copresheaf_to_instance(&p, &cc).unwrap();
                assert!(validate_instance(&back).is_ok());
                assert!(find_instance_isomorphism(&Arc::new(back), &Arc::new(h.clone())).is_some());
                let again = instance_to_copresheaf(&copresheaf_to_instance(&p, &cc).unwrap(), &cc).unwrap();
                assert!(find_copresheaf_isomorphism(&again, &p).is_some());
            }
        }
    }

    #[test]
    fn identity_collage_functor() {
        let x = Arc::new(terminal_model(&Arc::new(builtin_theory(Builtin::WalkingSquare))));
        let cc = close_collage(&x, 4).unwrap();
        let f = collage_of_morphism(&ModelMorphism::identity(&x), &cc, &cc).unwrap();
        assert_eq!(f, FinFunctor::identity(&cc.category));
    }
}
