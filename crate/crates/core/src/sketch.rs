//! The flattening of a double theory into a finite-limit sketch, and the
//! correspondence between its set-valued models and models in spans.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::collage::{GenKind, PresentedCategory};
use crate::error::{Error, Result};
use crate::finset::{pullback_pairs, FiniteSet, Func};
use crate::report::Report;
use crate::search::Csp;
use crate::span_model::{SpanModel, SpanOfSets};
use crate::theory_core::{CellId, DoubleTheory, Loose, Ob, Tight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationClass {
    Functoriality,
    SpanMaps,
    Naturality,
    CandidatePullback,
    MapsIntoPullbacks,
    AssocUnit,
}

impl RelationClass {
    pub fn rule(self) -> &'static str {
        match self {
            RelationClass::Functoriality => "sketch.functoriality",
            RelationClass::SpanMaps => "sketch.span_maps",
            RelationClass::Naturality => "sketch.naturality",
            RelationClass::CandidatePullback => "sketch.candidate_pullback",
            RelationClass::MapsIntoPullbacks => "sketch.maps_into_pullbacks",
            RelationClass::AssocUnit => "sketch.assoc_unit",
        }
    }
}

impl fmt::Display for RelationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.rule())
    }
}

/// `apex` with legs `p1: apex → a`, `p2: apex → b` over `q1: a → c`,
/// `q2: b → c`, marked as a pullback. Legs are generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedSquare {
    pub apex: usize,
    pub p1: usize,
    pub p2: usize,
    pub q1: usize,
    pub q2: usize,
}

/// A cone marked as a product. Legs are words from the apex to each
/// factor; no legs marks a terminal object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedProduct {
    pub apex: usize,
    pub legs: Vec<(usize, Vec<usize>)>,
}

/// Object sorts of the flattening.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sort {
    Ob(Ob),
    Loose(Loose),
    Pair(Loose, Loose),
    Triple(Loose, Loose, Loose),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitSketch {
    pub theory: Arc<DoubleTheory>,
    pub presented: PresentedCategory,
    pub sorts: Vec<Sort>,
    /// Class of each relation, parallel to `presented.relations`.
    pub classes: Vec<RelationClass>,
    pub marked_pullbacks: Vec<MarkedSquare>,
    pub marked_products: Vec<MarkedProduct>,
    index: SketchIndex,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct SketchIndex {
    ob: Vec<usize>,
    loose: Vec<usize>,
    pair: BTreeMap<(Loose, Loose), usize>,
    triple: BTreeMap<(Loose, Loose, Loose), usize>,
    tight: Vec<Option<usize>>,
    cell: Vec<Option<usize>>,
    s: Vec<usize>,
    t: Vec<usize>,
    u: Vec<usize>,
    /// `(s, c, t)` per composable pair.
    pair_gens: BTreeMap<(Loose, Loose), (usize, usize, usize)>,
    cell_pair: BTreeMap<(CellId, CellId), usize>,
    ell: Vec<Option<usize>>,
    r: Vec<Option<usize>>,
    /// `(ℓ, r, s, t)` per composable triple.
    triple_gens: BTreeMap<(Loose, Loose, Loose), (usize, usize, usize, usize)>,
}

impl LimitSketch {
    pub fn object(&self, s: Sort) -> Option<usize> {
        match s {
            Sort::Ob(x) => self.index.ob.get(x).copied(),
            Sort::Loose(m) => self.index.loose.get(m).copied(),
            Sort::Pair(m, n) => self.index.pair.get(&(m, n)).copied(),
            Sort::Triple(m, n, p) => self.index.triple.get(&(m, n, p)).copied(),
        }
    }

    fn tight_word(&self, f: Tight) -> Vec<usize> {
        self.index.tight[f].into_iter().collect()
    }

    fn cell_word(&self, a: CellId) -> Vec<usize> {
        self.index.cell[a].into_iter().collect()
    }
}

struct Builder {
    p: PresentedCategory,
    classes: Vec<RelationClass>,
}

impl Builder {
    fn gen(&mut self, name: String, src: usize, dst: usize) -> usize {
        self.p.add_generator(name, src, dst, GenKind::Plain)
    }

    fn rel(&mut self, class: RelationClass, src: usize, lhs: Vec<usize>, rhs: Vec<usize>) {
        self.p.add_relation(src, lhs, rhs);
        self.classes.push(class);
    }
}

fn cat(parts: &[&[usize]]) -> Vec<usize> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// The flattening: objects `[x]`, `[m]`, `[m,n]`, `[m,n,p]`, the eight
/// generator classes and six relation classes, with the candidate
/// pullback squares marked. Identity tight arrows and identity cells are
/// sent to empty words.
///
/// The unit relations are `ℓ_m·c_{id,m} = 1` and `r_m·c_{m,id} = 1`, and
/// `ℓ_m·t_{id,m} = 1`, `r_m·s_{m,id} = 1`; these are what strict unitality
/// of the laxators requires.
pub fn flatten_theory(t: &Arc<DoubleTheory>) -> LimitSketch {
    use RelationClass::*;
    let mut b = Builder { p: PresentedCategory::default(), classes: Vec::new() };
    let mut ix = SketchIndex::default();
    let mut sorts = Vec::new();
    let clash = t.loose.iter().any(|l| t.objects.contains(&l.name));
    let lname = |m: Loose| t.loose[m].name.clone();
    for (x, name) in t.objects.iter().enumerate() {
        ix.ob.push(b.p.add_object(if clash { format!("[ob:{name}]") } else { format!("[{name}]") }));
        sorts.push(Sort::Ob(x));
    }
    for m in 0..t.loose.len() {
        ix.loose.push(b.p.add_object(format!("[{}]", lname(m))));
        sorts.push(Sort::Loose(m));
    }
    let pairs = t.composable_loose_pairs();
    for &(m, n) in &pairs {
        ix.pair.insert((m, n), b.p.add_object(format!("[{},{}]", lname(m), lname(n))));
        sorts.push(Sort::Pair(m, n));
    }
    let triples = t.composable_loose_triples();
    for &(m, n, p) in &triples {
        ix.triple.insert((m, n, p), b.p.add_object(format!("[{},{},{}]", lname(m), lname(n), lname(p))));
        sorts.push(Sort::Triple(m, n, p));
    }
    // (1) tight arrows.
    for (f, a) in t.tight.iter().enumerate() {
        ix.tight.push((!t.tight_id.contains(&f)).then(|| b.gen(format!("[{}]", a.name), ix.ob[a.src], ix.ob[a.dst])));
    }
    // (2) span legs.
    for (m, a) in t.loose.iter().enumerate() {
        ix.s.push(b.gen(format!("s[{}]", a.name), ix.loose[m], ix.ob[a.src]));
        ix.t.push(b.gen(format!("t[{}]", a.name), ix.loose[m], ix.ob[a.dst]));
    }
    // (3) pair projections and laxators.
    for &(m, n) in &pairs {
        let mn = t.loose_compose(m, n).expect("tabulated pair");
        let o = ix.pair[&(m, n)];
        let nm = format!("{},{}", lname(m), lname(n));
        let s = b.gen(format!("s[{nm}]"), o, ix.loose[m]);
        let c = b.gen(format!("c[{nm}]"), o, ix.loose[mn]);
        let tt = b.gen(format!("t[{nm}]"), o, ix.loose[n]);
        ix.pair_gens.insert((m, n), (s, c, tt));
    }
    // (4) cells.
    for (c, cell) in t.cells.iter().enumerate() {
        ix.cell.push((!t.cell_loose_id.contains(&c)).then(|| b.gen(format!("[{}]", cell.name), ix.loose[cell.top], ix.loose[cell.bottom])));
    }
    // (5) pairs of cells.
    for (a, bb) in t.hcomposable_cells() {
        let (ca, cb) = (&t.cells[a], &t.cells[bb]);
        let (Some(&src), Some(&dst)) = (ix.pair.get(&(ca.top, cb.top)), ix.pair.get(&(ca.bottom, cb.bottom))) else { continue };
        let g = b.gen(format!("[{},{}]", ca.name, cb.name), src, dst);
        ix.cell_pair.insert((a, bb), g);
    }
    // (6) unitors.
    for (x, name) in t.objects.iter().enumerate() {
        let u = b.gen(format!("u[{name}]"), ix.ob[x], ix.loose[t.loose_id[x]]);
        ix.u.push(u);
    }
    // (7) unit insertions.
    for (m, a) in t.loose.iter().enumerate() {
        let (idx, idy) = (t.loose_id[a.src], t.loose_id[a.dst]);
        ix.ell.push(ix.pair.get(&(idx, m)).map(|&o| b.gen(format!("ℓ[{}]", a.name), ix.loose[m], o)));
        ix.r.push(ix.pair.get(&(m, idy)).map(|&o| b.gen(format!("r[{}]", a.name), ix.loose[m], o)));
    }
    // (8) triple maps.
    for &(m, n, p) in &triples {
        let o = ix.triple[&(m, n, p)];
        let (mn, np) = (t.loose_compose(m, n).unwrap(), t.loose_compose(n, p).unwrap());
        let nm = format!("{},{},{}", lname(m), lname(n), lname(p));
        let l = b.gen(format!("ℓ[{nm}]"), o, ix.pair[&(mn, p)]);
        let r = b.gen(format!("r[{nm}]"), o, ix.pair[&(m, np)]);
        let s = b.gen(format!("s[{nm}]"), o, ix.pair[&(m, n)]);
        let tt = b.gen(format!("t[{nm}]"), o, ix.pair[&(n, p)]);
        ix.triple_gens.insert((m, n, p), (l, r, s, tt));
    }
    let tw = |f: Tight| -> Vec<usize> { ix.tight[f].into_iter().collect() };
    let cw = |c: CellId| -> Vec<usize> { ix.cell[c].into_iter().collect() };
    // Relations (1): functoriality.
    for (&(f, g), &fg) in &t.tight_comp {
        b.rel(Functoriality, ix.ob[t.tight[f].src], cat(&[&tw(f), &tw(g)]), tw(fg));
    }
    for (&(a, c), &ac) in &t.cell_vcomp {
        b.rel(Functoriality, ix.loose[t.cells[a].top], cat(&[&cw(a), &cw(c)]), cw(ac));
    }
    // (2): span maps from cells, laxators and unitors.
    for (c, cell) in t.cells.iter().enumerate() {
        let m = ix.loose[cell.top];
        b.rel(SpanMaps, m, cat(&[&cw(c), &[ix.s[cell.bottom]]]), cat(&[&[ix.s[cell.top]], &tw(cell.left)]));
        b.rel(SpanMaps, m, cat(&[&cw(c), &[ix.t[cell.bottom]]]), cat(&[&[ix.t[cell.top]], &tw(cell.right)]));
    }
    for &(m, n) in &pairs {
        let mn = t.loose_compose(m, n).unwrap();
        let (s, c, tt) = ix.pair_gens[&(m, n)];
        let o = ix.pair[&(m, n)];
        b.rel(SpanMaps, o, vec![c, ix.s[mn]], vec![s, ix.s[m]]);
        b.rel(SpanMaps, o, vec![c, ix.t[mn]], vec![tt, ix.t[n]]);
    }
    for x in 0..t.objects.len() {
        let id = t.loose_id[x];
        b.rel(SpanMaps, ix.ob[x], vec![ix.u[x], ix.s[id]], vec![]);
        b.rel(SpanMaps, ix.ob[x], vec![ix.u[x], ix.t[id]], vec![]);
    }
    // (3): naturality of laxators and unitors.
    for (&(a, c), &g) in &ix.cell_pair {
        let (ca, cc) = (&t.cells[a], &t.cells[c]);
        let ac = t.hcomp(a, c).unwrap();
        let (_, top_c, _) = ix.pair_gens[&(ca.top, cc.top)];
        let (_, bot_c, _) = ix.pair_gens[&(ca.bottom, cc.bottom)];
        b.rel(Naturality, ix.pair[&(ca.top, cc.top)], vec![g, bot_c], cat(&[&[top_c], &cw(ac)]));
    }
    for (f, a) in t.tight.iter().enumerate() {
        b.rel(Naturality, ix.ob[a.src], cat(&[&tw(f), &[ix.u[a.dst]]]), cat(&[&[ix.u[a.src]], &cw(t.cell_tight_id[f])]));
    }
    // (4): candidate pullback squares commute.
    let mut marked = Vec::new();
    for &(m, n) in &pairs {
        let (s, _, tt) = ix.pair_gens[&(m, n)];
        b.rel(CandidatePullback, ix.pair[&(m, n)], vec![s, ix.t[m]], vec![tt, ix.s[n]]);
        marked.push(MarkedSquare { apex: ix.pair[&(m, n)], p1: s, p2: tt, q1: ix.t[m], q2: ix.s[n] });
    }
    for &(m, n, p) in &triples {
        let (_, _, s, tt) = ix.triple_gens[&(m, n, p)];
        let (_, _, t_mn) = ix.pair_gens[&(m, n)];
        let (s_np, _, _) = ix.pair_gens[&(n, p)];
        b.rel(CandidatePullback, ix.triple[&(m, n, p)], vec![s, t_mn], vec![tt, s_np]);
        marked.push(MarkedSquare { apex: ix.triple[&(m, n, p)], p1: s, p2: tt, q1: t_mn, q2: s_np });
    }
    // (5): maps into candidate pullbacks.
    for (m, a) in t.loose.iter().enumerate() {
        let lm = ix.loose[m];
        if let Some(l) = ix.ell[m] {
            let (s, _, tt) = ix.pair_gens[&(t.loose_id[a.src], m)];
            b.rel(MapsIntoPullbacks, lm, vec![l, s], vec![ix.s[m], ix.u[a.src]]);
            b.rel(MapsIntoPullbacks, lm, vec![l, tt], vec![]);
        }
        if let Some(r) = ix.r[m] {
            let (s, _, tt) = ix.pair_gens[&(m, t.loose_id[a.dst])];
            b.rel(MapsIntoPullbacks, lm, vec![r, s], vec![]);
            b.rel(MapsIntoPullbacks, lm, vec![r, tt], vec![ix.t[m], ix.u[a.dst]]);
        }
    }
    for &(m, n, p) in &triples {
        let o = ix.triple[&(m, n, p)];
        let (mn, np) = (t.loose_compose(m, n).unwrap(), t.loose_compose(n, p).unwrap());
        let (l, r, s, tt) = ix.triple_gens[&(m, n, p)];
        let (s_mn_p, _, t_mn_p) = ix.pair_gens[&(mn, p)];
        let (s_m_np, _, t_m_np) = ix.pair_gens[&(m, np)];
        let (s_mn, c_mn, _) = ix.pair_gens[&(m, n)];
        let (_, c_np, t_np) = ix.pair_gens[&(n, p)];
        b.rel(MapsIntoPullbacks, o, vec![l, s_mn_p], vec![s, c_mn]);
        b.rel(MapsIntoPullbacks, o, vec![l, t_mn_p], vec![tt, t_np]);
        b.rel(MapsIntoPullbacks, o, vec![r, s_m_np], vec![s, s_mn]);
        b.rel(MapsIntoPullbacks, o, vec![r, t_m_np], vec![tt, c_np]);
    }
    for (&(a, c), &g) in &ix.cell_pair {
        let (ca, cc) = (&t.cells[a], &t.cells[c]);
        let o = ix.pair[&(ca.top, cc.top)];
        let (s1, _, t1) = ix.pair_gens[&(ca.top, cc.top)];
        let (s2, _, t2) = ix.pair_gens[&(ca.bottom, cc.bottom)];
        b.rel(MapsIntoPullbacks, o, vec![g, s2], cat(&[&[s1], &cw(a)]));
        b.rel(MapsIntoPullbacks, o, vec![g, t2], cat(&[&[t1], &cw(c)]));
    }
    // (6): associativity and unitality of laxators.
    for &(m, n, p) in &triples {
        let (mn, np) = (t.loose_compose(m, n).unwrap(), t.loose_compose(n, p).unwrap());
        let (l, r, _, _) = ix.triple_gens[&(m, n, p)];
        let (_, c1, _) = ix.pair_gens[&(mn, p)];
        let (_, c2, _) = ix.pair_gens[&(m, np)];
        b.rel(AssocUnit, ix.triple[&(m, n, p)], vec![l, c1], vec![r, c2]);
    }
    for (m, a) in t.loose.iter().enumerate() {
        if let Some(l) = ix.ell[m] {
            let (_, c, _) = ix.pair_gens[&(t.loose_id[a.src], m)];
            b.rel(AssocUnit, ix.loose[m], vec![l, c], vec![]);
        }
        if let Some(r) = ix.r[m] {
            let (_, c, _) = ix.pair_gens[&(m, t.loose_id[a.dst])];
            b.rel(AssocUnit, ix.loose[m], vec![r, c], vec![]);
        }
    }
    LimitSketch { theory: t.clone(), presented: b.p, sorts, classes: b.classes, marked_pullbacks: marked, marked_products: Vec::new(), index: ix }
}

/// The flattening with the designated products marked: binary cones on
/// objects and loose arrows, and the terminal object and terminal loose
/// arrow as empty cones.
pub fn flatten_cartesian_theory(t: &Arc<DoubleTheory>) -> Result<LimitSketch> {
    let cs = t.cartesian.as_ref().ok_or_else(|| Error::Invalid(format!("{} has no designated products", t.name)))?;
    let mut sk = flatten_theory(t);
    let mut cones = vec![MarkedProduct { apex: sk.index.ob[cs.terminal], legs: Vec::new() }, MarkedProduct { apex: sk.index.loose[cs.loose_terminal], legs: Vec::new() }];
    for (&(d1, d2), cone) in &cs.products {
        cones.push(MarkedProduct { apex: sk.index.ob[cone.apex], legs: vec![(sk.index.ob[d1], sk.tight_word(cone.proj.0)), (sk.index.ob[d2], sk.tight_word(cone.proj.1))] });
    }
    for (&(m1, m2), cone) in &cs.loose_products {
        cones.push(MarkedProduct { apex: sk.index.loose[cone.apex], legs: vec![(sk.index.loose[m1], sk.cell_word(cone.proj.0)), (sk.index.loose[m2], sk.cell_word(cone.proj.1))] });
    }
    sk.marked_products = cones;
    Ok(sk)
}

/// A set-valued functor on the sketch's presented category, given on
/// generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SketchModel {
    pub sketch: Arc<LimitSketch>,
    pub sets: Vec<FiniteSet>,
    pub maps: Vec<Func>,
}

impl SketchModel {
    pub fn eval(&self, word: &[usize], x: usize) -> usize {
        word.iter().fold(x, |acc, &g| self.maps[g][acc])
    }
}

fn pairing_bijective(f: &[usize], g: &[usize], allowed: &dyn Fn(usize, usize) -> bool, expected: usize) -> bool {
    let mut seen = std::collections::HashSet::new();
    f.len() == expected && f.iter().zip(g).all(|(&a, &b)| allowed(a, b) && seen.insert((a, b)))
}

/// Relation violations named by class, and markings that are not
/// pullbacks or products.
pub fn validate_sketch_model(s: &SketchModel) -> Report {
    let sk = &*s.sketch;
    let p = &sk.presented;
    let mut r = Report::new();
    if s.sets.len() != p.objects.len() || s.maps.len() != p.generators.len() {
        r.push("sketch.shape", sk.theory.name.clone(), "tables do not match the sketch");
        return r;
    }
    for (g, gen) in p.generators.iter().enumerate() {
        let ok = s.maps[g].len() == s.sets[gen.src].len() && s.maps[g].iter().all(|&v| v < s.sets[gen.dst].len());
        r.check(ok, "sketch.typed", || gen.name.clone(), "function has the wrong domain or codomain");
    }
    if !r.is_ok() {
        return r;
    }
    for (rel, &class) in p.relations.iter().zip(&sk.classes) {
        for x in 0..s.sets[rel.src].len() {
            if s.eval(&rel.lhs, x) != s.eval(&rel.rhs, x) {
                r.push(class.rule(), format!("{} = {} at {}", p.word_name(&rel.lhs), p.word_name(&rel.rhs), s.sets[rel.src].label(x)), "relation fails");
                break;
            }
        }
    }
    for sq in &sk.marked_pullbacks {
        let (f1, f2) = (&s.maps[sq.p1], &s.maps[sq.p2]);
        let (q1, q2) = (&s.maps[sq.q1], &s.maps[sq.q2]);
        let expected = pullback_pairs(q1, q2).len();
        let ok = pairing_bijective(f1, f2, &|a, b| q1[a] == q2[b], expected);
        r.check(ok, "sketch.marked_pullback", || p.objects[sq.apex].clone(), "marked square is not a pullback");
    }
    for cone in &sk.marked_products {
        let n = s.sets[cone.apex].len();
        let ok = match cone.legs.as_slice() {
            [] => n == 1,
            [(a, w1), (b, w2)] => {
                let f1: Func = (0..n).map(|x| s.eval(w1, x)).collect();
                let f2: Func = (0..n).map(|x| s.eval(w2, x)).collect();
                pairing_bijective(&f1, &f2, &|_, _| true, s.sets[*a].len() * s.sets[*b].len())
            }
            _ => false,
        };
        r.check(ok, "sketch.marked_product", || p.objects[cone.apex].clone(), "marked cone is not a product");
    }
    r
}

fn triple_label(a: &str, b: &str, c: &str) -> String {
    format!("({a},{b},{c})")
}

/// Materialize `[m,n]` and `[m,n,p]` as sets of composable paths.
pub fn model_to_sketch_model(x: &SpanModel, sketch: &Arc<LimitSketch>) -> Result<SketchModel> {
    let t = &*x.theory;
    if *sketch.theory != *t {
        return Err(Error::Mismatch("sketch is not the flattening of the model's theory".into()));
    }
    let ix = &sketch.index;
    let p = &sketch.presented;
    let pair_elems: HashMap<(Loose, Loose), Vec<(usize, usize)>> = ix.pair.keys().map(|&(m, n)| ((m, n), pullback_pairs(&x.on_loose[m].right, &x.on_loose[n].left))).collect();
    let triple_elems: HashMap<(Loose, Loose, Loose), Vec<(usize, usize, usize)>> = ix
        .triple
        .keys()
        .map(|&(m, n, q)| {
            let v = pair_elems[&(m, n)]
                .iter()
                .flat_map(|&(a, b)| (0..x.on_loose[q].len()).filter(move |&c| x.on_loose[q].left[c] == x.on_loose[n].right[b]).map(move |c| (a, b, c)))
                .collect();
            ((m, n, q), v)
        })
        .collect();
    let pair_index = |m: Loose, n: Loose, k: (usize, usize)| pair_elems[&(m, n)].binary_search(&k).expect("pair in the pullback");
    let apex = |m: Loose, h: usize| x.on_loose[m].apex.label(h);
    let mut sets = vec![FiniteSet::default(); p.objects.len()];
    for (o, sort) in sketch.sorts.iter().enumerate() {
        sets[o] = match *sort {
            Sort::Ob(d) => x.on_objects[d].clone(),
            Sort::Loose(m) => x.on_loose[m].apex.clone(),
            Sort::Pair(m, n) => FiniteSet::new(pair_elems[&(m, n)].iter().map(|&(a, b)| crate::finset::pair_label(apex(m, a), apex(n, b))))?,
            Sort::Triple(m, n, q) => FiniteSet::new(triple_elems[&(m, n, q)].iter().map(|&(a, b, c)| triple_label(apex(m, a), apex(n, b), apex(q, c))))?,
        };
    }
    let mut maps = vec![Vec::new(); p.generators.len()];
    for (f, g) in ix.tight.iter().enumerate() {
        if let Some(g) = *g {
            maps[g] = x.on_tight[f].clone();
        }
    }
    for m in 0..t.loose.len() {
        maps[ix.s[m]] = x.on_loose[m].left.clone();
        maps[ix.t[m]] = x.on_loose[m].right.clone();
    }
    for (&(m, n), &(s, c, tt)) in &ix.pair_gens {
        let es = &pair_elems[&(m, n)];
        maps[s] = es.iter().map(|&(a, _)| a).collect();
        maps[tt] = es.iter().map(|&(_, b)| b).collect();
        maps[c] = es.iter().map(|&(a, b)| x.lax(m, n, a, b).expect("laxator is total")).collect();
    }
    for (c, g) in ix.cell.iter().enumerate() {
        if let Some(g) = *g {
            maps[g] = x.on_cells[c].clone();
        }
    }
    for (&(a, c), &g) in &ix.cell_pair {
        let (ca, cc) = (&t.cells[a], &t.cells[c]);
        maps[g] = pair_elems[&(ca.top, cc.top)].iter().map(|&(h1, h2)| pair_index(ca.bottom, cc.bottom, (x.on_cells[a][h1], x.on_cells[c][h2]))).collect();
    }
    for d in 0..t.objects.len() {
        maps[ix.u[d]] = x.unitors[d].clone();
    }
    for (m, a) in t.loose.iter().enumerate() {
        let span = &x.on_loose[m];
        let (idx, idy) = (t.loose_id[a.src], t.loose_id[a.dst]);
        if let Some(l) = ix.ell[m] {
            maps[l] = (0..span.len()).map(|h| pair_index(idx, m, (x.unitors[a.src][span.left[h]], h))).collect();
        }
        if let Some(r) = ix.r[m] {
            maps[r] = (0..span.len()).map(|h| pair_index(m, idy, (h, x.unitors[a.dst][span.right[h]]))).collect();
        }
    }
    for (&(m, n, q), &(l, r, s, tt)) in &ix.triple_gens {
        let (mn, nq) = (t.loose_compose(m, n).unwrap(), t.loose_compose(n, q).unwrap());
        let es = &triple_elems[&(m, n, q)];
        maps[l] = es.iter().map(|&(a, b, c)| pair_index(mn, q, (x.lax(m, n, a, b).unwrap(), c))).collect();
        maps[r] = es.iter().map(|&(a, b, c)| pair_index(m, nq, (a, x.lax(n, q, b, c).unwrap()))).collect();
        maps[s] = es.iter().map(|&(a, b, _)| pair_index(m, n, (a, b))).collect();
        maps[tt] = es.iter().map(|&(_, b, c)| pair_index(n, q, (b, c))).collect();
    }
    Ok(SketchModel { sketch: sketch.clone(), sets, maps })
}

/// Read `X([m,n])` through its marked pullback square, `c_{m,n}` as the
/// laxator and `u_x` as the unitor.
pub fn sketch_model_to_model(s: &SketchModel) -> Result<SpanModel> {
    let sk = &*s.sketch;
    let t = sk.theory.clone();
    let ix = &sk.index;
    let r = validate_sketch_model(s);
    if r.has_rule("sketch.marked_pullback") {
        return Err(Error::MarkedSquareNotPullback(r.to_string()));
    }
    if !r.is_ok() {
        return Err(Error::Invalid(format!("sketch model violates relations:\n{r}")));
    }
    let on_objects = ix.ob.iter().map(|&o| s.sets[o].clone()).collect();
    let on_tight = t
        .tight
        .iter()
        .enumerate()
        .map(|(f, a)| match ix.tight[f] {
            Some(g) => s.maps[g].clone(),
            None => (0..s.sets[ix.ob[a.src]].len()).collect(),
        })
        .collect();
    let on_loose = (0..t.loose.len()).map(|m| SpanOfSets { apex: s.sets[ix.loose[m]].clone(), left: s.maps[ix.s[m]].clone(), right: s.maps[ix.t[m]].clone() }).collect();
    let on_cells = t
        .cells
        .iter()
        .enumerate()
        .map(|(c, cell)| match ix.cell[c] {
            Some(g) => s.maps[g].clone(),
            None => (0..s.sets[ix.loose[cell.top]].len()).collect(),
        })
        .collect();
    let paths: HashMap<(Loose, Loose), HashMap<(usize, usize), usize>> =
        ix.pair_gens.iter().map(|(&k, &(sg, _, tg))| (k, s.maps[sg].iter().zip(&s.maps[tg]).enumerate().map(|(e, (&a, &b))| ((a, b), e)).collect())).collect();
    let unitors = ix.u.iter().map(|&u| s.maps[u].clone()).collect();
    SpanModel::from_parts(
        t,
        on_objects,
        on_tight,
        on_loose,
        on_cells,
        |m, n, a, b| {
            let e = *paths.get(&(m, n))?.get(&(a, b))?;
            Some(s.maps[ix.pair_gens[&(m, n)].1][e])
        },
        unitors,
    )
}

/// Natural transformations between two sketch models, counted.
pub fn count_sketch_morphisms(a: &SketchModel, b: &SketchModel, limit: usize) -> Result<usize> {
    if a.sketch != b.sketch {
        return Err(Error::Mismatch("sketch models of different sketches".into()));
    }
    let p = &a.sketch.presented;
    // One node per element of `a`; each generator gives functional edges.
    let offset: Vec<usize> = a
        .sets
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s.len();
            Some(o)
        })
        .collect();
    let n = a.sets.iter().map(|s| s.len()).sum();
    let object_of: Vec<usize> = (0..a.sets.len()).flat_map(|o| std::iter::repeat_n(o, a.sets[o].len())).collect();
    let mut outs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut ins: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (g, gen) in p.generators.iter().enumerate() {
        for x in 0..a.sets[gen.src].len() {
            let (u, v) = (offset[gen.src] + x, offset[gen.dst] + a.maps[g][x]);
            outs[u].push((g, v));
            ins[v].push((g, u));
        }
    }
    let order = propagation_order(&outs, &ins);
    let mut var_of = vec![usize::MAX; n];
    for (i, &u) in order.iter().enumerate() {
        var_of[u] = i;
    }
    let mut csp = Csp::new();
    for (i, &u) in order.iter().enumerate() {
        let o = object_of[u];
        // Constraints against earlier variables: `b.maps[g][value(src)] == value(dst)`.
        let fwd: Vec<(&Func, usize)> = ins[u].iter().filter(|&&(_, w)| var_of[w] < i).map(|&(g, w)| (&b.maps[g], var_of[w])).collect();
        let back: Vec<(&Func, usize)> = outs[u].iter().filter(|&&(_, w)| var_of[w] < i).map(|&(g, w)| (&b.maps[g], var_of[w])).collect();
        let loops: Vec<&Func> = outs[u].iter().filter(|&&(_, w)| w == u).map(|&(g, _)| &b.maps[g]).collect();
        let size = b.sets[o].len();
        csp.var_dynamic(move |s| {
            let ok = |v: usize| fwd.iter().all(|(f, w)| f[s[*w]] == v) && back.iter().all(|(f, w)| f[v] == s[*w]) && loops.iter().all(|f| f[v] == v);
            match fwd.first() {
                Some((f, w)) => Some(f[s[*w]]).filter(|&v| ok(v)).into_iter().collect(),
                None => (0..size).filter(|&v| ok(v)).collect(),
            }
        });
    }
    csp.count(limit)
}

/// Greedy order on element nodes: first anything already forced by an
/// earlier node along an edge, then nodes all of whose images are placed
/// (pullback elements), then the node with most placed images.
fn propagation_order(outs: &[Vec<(usize, usize)>], ins: &[Vec<(usize, usize)>]) -> Vec<usize> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let n = outs.len();
    let mut placed = vec![false; n];
    let mut placed_outs = vec![0usize; n];
    let mut forced = vec![false; n];
    let score = |u: usize, placed_outs: &[usize], forced: &[bool]| {
        let class = if forced[u] {
            2
        } else if !outs[u].is_empty() && placed_outs[u] == outs[u].len() {
            1
        } else {
            0
        };
        (class, placed_outs[u], Reverse(u))
    };
    let mut heap: BinaryHeap<((u8, usize, Reverse<usize>), usize)> = (0..n).map(|u| (score(u, &placed_outs, &forced), u)).collect();
    let mut order = Vec::with_capacity(n);
    while let Some((sc, u)) = heap.pop() {
        if placed[u] || sc != score(u, &placed_outs, &forced) {
            continue;
        }
        placed[u] = true;
        order.push(u);
        for &(_, v) in &outs[u] {
            if !placed[v] {
                forced[v] = true;
                heap.push((score(v, &placed_outs, &forced), v));
            }
        }
        for &(_, w) in &ins[u] {
            if !placed[w] {
                placed_outs[w] += 1;
                heap.push((score(w, &placed_outs, &forced), w));
            }
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span_model::{enumerate_model_morphisms, terminal_model, validate_model, MorphismFilter};
    use crate::theory_core::{builtin_theory, Builtin};

    #[test]
    fn object_count_formula() {
        for b in [Builtin::Terminal, Builtin::WalkingLoose, Builtin::WalkingSquare, Builtin::Signed, Builtin::PromTrunc(2)] {
            let t = Arc::new(builtin_theory(b));
            let sk = flatten_theory(&t);
            let n = t.objects.len() + t.loose.len() + t.composable_loose_pairs().len() + t.composable_loose_triples().len();
            assert_eq!(sk.presented.objects.len(), n, "{}", t.name);
            assert!(sk.presented.check_relations().is_ok(), "{}", t.name);
        }
    }

    #[test]
    fn terminal_round_trip() {
        for b in [Builtin::Terminal, Builtin::WalkingSquare, Builtin::Signed, Builtin::PromTrunc(2)] {
            let t = Arc::new(builtin_theory(b));
            let sk = Arc::new(flatten_theory(&t));
            let x = terminal_model(&t);
            let s = model_to_sketch_model(&x, &sk).unwrap();
            assert!(s.sets.iter().all(|set| set.len() == 1));
            let r = validate_sketch_model(&s);
            assert!(r.is_ok(), "{r}");
            let back = sketch_model_to_model(&s).unwrap();
            assert!(validate_model(&back).is_ok());
            assert_eq!(back, x);
        }
    }

    #[test]
    fn corrupted_pair_is_not_a_pullback() {
        let t = Arc::new(builtin_theory(Builtin::Terminal));
        let sk = Arc::new(flatten_theory(&t));
        let mut s = model_to_sketch_model(&terminal_model(&t), &sk).unwrap();
        let o = sk.object(Sort::Pair(0, 0)).unwrap();
        s.sets[o] = FiniteSet::from_labels(["a", "b"]);
        for (g, gen) in sk.presented.generators.iter().enumerate() {
            if gen.src == o {
                s.maps[g] = vec![0, 0];
            }
            if gen.dst == o {
                s.maps[g] = vec![0; s.sets[gen.src].len()];
            }
        }
        assert!(matches!(sketch_model_to_model(&s), Err(Error::MarkedSquareNotPullback(_))));
    }

    #[test]
    fn morphisms_correspond() {
        let t = Arc::new(builtin_theory(Builtin::Terminal));
        let sk = Arc::new(flatten_theory(&t));
        let x = Arc::new(terminal_model(&t));
        let s = model_to_sketch_model(&x, &sk).unwrap();
        let n = enumerate_model_morphisms(&x, &x, &MorphismFilter::default(), 100).unwrap().len();
        assert_eq!(count_sketch_morphisms(&s, &s, 100).unwrap(), n);
    }

    #[test]
    fn cartesian_cones() {
        let t = Arc::new(builtin_theory(Builtin::PromTrunc(2)));
        let sk = flatten_cartesian_theory(&t).unwrap();
        let cs = t.cartesian.as_ref().unwrap();
        assert_eq!(sk.marked_products.len(), cs.products.len() + cs.loose_products.len() + 2);
        let sk = Arc::new(sk);
        let s = model_to_sketch_model(&terminal_model(&t), &sk).unwrap();
        assert!(validate_sketch_model(&s).is_ok());
    }
}
