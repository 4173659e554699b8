//! Data migration along model morphisms, the reflection of models over a
//! base into discrete opfibrations, and the comprehensive factorization.

use std::sync::Arc;

use crate::cartesian::validate_cartesian_model;
use crate::collage::{close_collage, collage_of_morphism, copresheaf_to_instance, instance_to_copresheaf, ClosedCollage, FinFunctor, PresentedCopresheaf};
use crate::config::Config;
use crate::elements::{elements, is_discrete_opfibration, DopfWitness, Elements};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::report::Report;
use crate::span_model::{solve_morphisms, ModelMorphism, MorphismFilter, SpanModel};

/// A model morphism together with the closed collages of its endpoints
/// and the functor between them.
pub struct Migration {
    pub alpha: ModelMorphism,
    pub source: ClosedCollage,
    pub target: ClosedCollage,
    pub functor: FinFunctor,
    limit: usize,
}

impl Migration {
    pub fn new(alpha: &ModelMorphism, cfg: &Config) -> Result<Migration> {
        let source = close_collage(&alpha.source, cfg.max_word_len)?;
        let target = close_collage(&alpha.target, cfg.max_word_len)?;
        let functor = collage_of_morphism(alpha, &source, &target)?;
        Ok(Migration { alpha: alpha.clone(), source, target, functor, limit: cfg.max_hom_card })
    }

    /// `α*`: instances over the target to instances over the source.
    pub fn pullback(&self, h: &Instance) -> Result<Instance> {
        let p = instance_to_copresheaf(h, &self.target)?;
        copresheaf_to_instance(&p.pullback(&self.functor)?, &self.source)
    }

    /// `α_!`, pointwise over the comma categories of `κα`.
    pub fn lan(&self, h: &Instance) -> Result<Instance> {
        let p = instance_to_copresheaf(h, &self.source)?;
        copresheaf_to_instance(&p.lan(&self.functor)?, &self.target)
    }

    /// `α_*`, by compatible families.
    pub fn ran(&self, h: &Instance) -> Result<Instance> {
        let p = instance_to_copresheaf(h, &self.source)?;
        copresheaf_to_instance(&p.ran(&self.functor, self.limit)?, &self.target)
    }
}

pub fn migrate_pullback(alpha: &ModelMorphism, h: &Instance, cfg: &Config) -> Result<Instance> {
    Migration::new(alpha, cfg)?.pullback(h)
}

pub fn migrate_lan(alpha: &ModelMorphism, h: &Instance, cfg: &Config) -> Result<Instance> {
    Migration::new(alpha, cfg)?.lan(h)
}

pub fn migrate_ran(alpha: &ModelMorphism, h: &Instance, cfg: &Config) -> Result<Instance> {
    Migration::new(alpha, cfg)?.ran(h)
}

/// The instance over `B` freely generated by `f: X → B`, its model of
/// elements, and the unit `X → ∫`.
#[derive(Debug, Clone)]
pub struct Reflection {
    pub instance: Arc<Instance>,
    pub elements: Elements,
    pub unit: ModelMorphism,
}

/// One generator `g_x` at `[f x]` for each element `x` of `X`, related by
/// `[u]·g_x = g_{Xu(x)}` and `[f h]·g_{left h} = g_{right h}`.
pub fn reflect_into_dopf(f: &ModelMorphism, cfg: &Config) -> Result<Reflection> {
    let x = &*f.source;
    let t = &*x.theory;
    let cc = close_collage(&f.target, cfg.max_word_len)?;
    let col = &cc.collage;
    let mut gen_of: Vec<Vec<usize>> = Vec::with_capacity(t.objects.len());
    let mut generators = Vec::new();
    for d in 0..t.objects.len() {
        let mut gs = Vec::with_capacity(x.on_objects[d].len());
        for e in 0..x.on_objects[d].len() {
            gs.push(generators.len());
            generators.push((col.object_of(d, f.on_objects[d][e]), x.on_objects[d].label(e).to_string()));
        }
        gen_of.push(gs);
    }
    let id = |g: usize| cc.category.identities[generators[g].0];
    let mut relations = Vec::new();
    for (u, a) in t.tight.iter().enumerate() {
        for e in 0..x.on_objects[a.src].len() {
            let g = gen_of[a.src][e];
            let g2 = gen_of[a.dst][x.on_tight[u][e]];
            relations.push(((g, cc.tight_morphism(u, a.src, f.on_objects[a.src][e])), (g2, id(g2))));
        }
    }
    for (m, a) in t.loose.iter().enumerate() {
        let span = &x.on_loose[m];
        for h in 0..span.len() {
            let g = gen_of[a.src][span.left[h]];
            let g2 = gen_of[a.dst][span.right[h]];
            relations.push(((g, cc.het_morphism(m, f.on_loose[m][h])), (g2, id(g2))));
        }
    }
    let presented = PresentedCopresheaf { base: cc.category.clone(), generators, relations };
    let (p, classes) = presented.evaluate()?;
    let instance = Arc::new(copresheaf_to_instance(&p, &cc)?);
    // Elements of H d are listed by collage object, then by class.
    let mut start = vec![0; col.objects.len()];
    let mut running = vec![0; t.objects.len()];
    for (o, &(d, _)) in col.objects.iter().enumerate() {
        start[o] = running[d];
        running[d] += p.sets[o].len();
    }
    let on_objects: Vec<Vec<usize>> = (0..t.objects.len()).map(|d| gen_of[d].iter().map(|&g| start[presented.generators[g].0] + classes[g]).collect()).collect();
    let el = elements(&instance)?;
    let on_loose = t
        .loose
        .iter()
        .enumerate()
        .map(|(m, a)| {
            let span = &x.on_loose[m];
            (0..span.len())
                .map(|h| el.witness.lift(m, on_objects[a.src][span.left[h]], f.on_loose[m][h]).ok_or_else(|| Error::Invalid("unit has no lift".into())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let unit = ModelMorphism { source: f.source.clone(), target: el.model.clone(), on_objects, on_loose };
    let r = unit.validate();
    if !r.is_ok() {
        return Err(Error::Invalid(format!("unit is not a morphism:\n{r}")));
    }
    Ok(Reflection { instance, elements: el, unit })
}

/// `f = e·m` with `m` a discrete opfibration.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub input: ModelMorphism,
    pub middle: Arc<SpanModel>,
    pub e: ModelMorphism,
    pub m: ModelMorphism,
    pub witness: DopfWitness,
    pub instance: Arc<Instance>,
}

pub fn comprehensive_factorize(f: &ModelMorphism, cfg: &Config) -> Result<Factorization> {
    let r = reflect_into_dopf(f, cfg)?;
    let composite = r.unit.compose(&r.elements.projection)?;
    if composite.on_objects != f.on_objects || composite.on_loose != f.on_loose {
        return Err(Error::Invalid("factors do not compose to the input".into()));
    }
    Ok(Factorization { input: f.clone(), middle: r.elements.model.clone(), e: r.unit, m: r.elements.projection, witness: r.elements.witness, instance: r.instance })
}

/// The comprehensive factorization of a morphism of cartesian models,
/// with the cartesian check of its middle model. With `strict`, a
/// non-cartesian middle is an error.
pub fn cartesian_factorize(f: &ModelMorphism, cfg: &Config, strict: bool) -> Result<(Factorization, Report)> {
    let fact = comprehensive_factorize(f, cfg)?;
    let r = validate_cartesian_model(&fact.middle);
    if strict && !r.is_ok() {
        return Err(Error::MiddleNotCartesian(r.to_string()));
    }
    Ok((fact, r))
}

fn fixed_filter(objects: Vec<Vec<Vec<usize>>>, loose: Vec<Vec<Vec<usize>>>) -> MorphismFilter {
    MorphismFilter { allowed_objects: Some(objects), allowed_loose: Some(loose), injective: false }
}

/// Elements of `dom q` over each element of `cod q`.
fn fibers(q: &ModelMorphism) -> (Vec<Vec<Vec<usize>>>, Vec<Vec<Vec<usize>>>) {
    let over = |f: &Vec<usize>, n: usize| {
        let mut out = vec![Vec::new(); n];
        for (i, &v) in f.iter().enumerate() {
            out[v].push(i);
        }
        out
    };
    (q.on_objects.iter().zip(&q.target.on_objects).map(|(f, s)| over(f, s.len())).collect(), q.on_loose.iter().zip(&q.target.on_loose).map(|(f, s)| over(f, s.len())).collect())
}

/// Enumerate every commutative square from `e` to each discrete
/// opfibration in `corpus` and count diagonal fillers. Violations are
/// squares with no filler or with several. Passing only shows
/// orthogonality to this corpus.
pub fn check_initial(e: &ModelMorphism, corpus: &[ModelMorphism], cfg: &Config) -> Result<Report> {
    let mut r = Report::new();
    let (a, c) = (&e.source, &e.target);
    for (i, q) in corpus.iter().enumerate() {
        if let Err(ce) = is_discrete_opfibration(q) {
            r.push("initial.corpus", format!("dopf {i}"), format!("not a discrete opfibration: {ce}"));
            continue;
        }
        let (ob_fib, loose_fib) = fibers(q);
        let mut squares = Vec::new();
        solve_morphisms(c, &q.target, &MorphismFilter::default(), cfg.max_hom_card, |v| {
            squares.push(v);
            true
        })?;
        for (j, v) in squares.iter().enumerate() {
            let ev = e.compose(v)?;
            let objs = ev.on_objects.iter().enumerate().map(|(d, f)| f.iter().map(|&y| ob_fib[d][y].clone()).collect()).collect();
            let loose = ev.on_loose.iter().enumerate().map(|(m, f)| f.iter().map(|&y| loose_fib[m][y].clone()).collect()).collect();
            let mut tops = Vec::new();
            solve_morphisms(a, &q.source, &fixed_filter(objs, loose), cfg.max_hom_card, |u| {
                tops.push(u);
                true
            })?;
            for (k, u) in tops.iter().enumerate() {
                let mut objs: Vec<Vec<Vec<usize>>> = v.on_objects.iter().enumerate().map(|(d, f)| f.iter().map(|&y| ob_fib[d][y].clone()).collect()).collect();
                let mut loose: Vec<Vec<Vec<usize>>> = v.on_loose.iter().enumerate().map(|(m, f)| f.iter().map(|&y| loose_fib[m][y].clone()).collect()).collect();
                for (d, f) in e.on_objects.iter().enumerate() {
                    for (x, &y) in f.iter().enumerate() {
                        let want = u.on_objects[d][x];
                        objs[d][y].retain(|&z| z == want);
                    }
                }
                for (m, f) in e.on_loose.iter().enumerate() {
                    for (x, &y) in f.iter().enumerate() {
                        let want = u.on_loose[m][x];
                        loose[m][y].retain(|&z| z == want);
                    }
                }
                let mut fillers = 0;
                solve_morphisms(c, &q.source, &fixed_filter(objs, loose), cfg.max_hom_card, |_| {
                    fillers += 1;
                    fillers < 2
                })?;
                if fillers != 1 {
                    r.push(
                        "initial.filler",
                        format!("dopf {i}, square {j}.{k}"),
                        if fillers == 0 { "no diagonal filler".to_string() } else { "several diagonal fillers".to_string() },
                    );
                }
            }
        }
    }
    Ok(r)
}
