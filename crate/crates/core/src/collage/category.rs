//! Finitely presented 1-categories and their explicit closures.
//!
//! Closure runs a coset-style enumeration per source object: nodes are
//! morphisms out of the source, edges are right multiplication by
//! generators, and every relation is imposed at every node. Nodes are
//! defined breadth first; relations are scanned to a fixpoint between
//! layers, merging coincident nodes with a union-find.

use std::collections::VecDeque;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::Report;
use crate::search::Csp;

/// What a collage generator stands for. Plain generators come from
/// hand-written presentations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenKind {
    Plain,
    /// `[f]_x` for a tight arrow and an element of its source set.
    Tight {
        arrow: String,
        elem: String,
    },
    /// `[h]` for a heteromorphism `h ∈ X(m)`.
    Het {
        loose: String,
        elem: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub src: usize,
    pub dst: usize,
    pub kind: GenKind,
}

/// `lhs = rhs` as words of generators starting at `src`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub src: usize,
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PresentedCategory {
    pub objects: Vec<String>,
    pub generators: Vec<Generator>,
    pub relations: Vec<Relation>,
}

impl PresentedCategory {
    pub fn add_object(&mut self, name: impl Into<String>) -> usize {
        self.objects.push(name.into());
        self.objects.len() - 1
    }

    pub fn add_generator(&mut self, name: impl Into<String>, src: usize, dst: usize, kind: GenKind) -> usize {
        self.generators.push(Generator { name: name.into(), src, dst, kind });
        self.generators.len() - 1
    }

    pub fn add_relation(&mut self, src: usize, lhs: Vec<usize>, rhs: Vec<usize>) {
        self.relations.push(Relation { src, lhs, rhs });
    }

    /// Target of a word, if it is composable from `src`.
    pub fn word_target(&self, src: usize, word: &[usize]) -> Option<usize> {
        let mut at = src;
        for &g in word {
            let gen = self.generators.get(g)?;
            if gen.src != at {
                return None;
            }
            at = gen.dst;
        }
        Some(at)
    }

    /// Relations must relate composable words with the same endpoints.
    pub fn check_relations(&self) -> Result<()> {
        for (i, r) in self.relations.iter().enumerate() {
            let (a, b) = (self.word_target(r.src, &r.lhs), self.word_target(r.src, &r.rhs));
            if a.is_none() || a != b {
                return Err(Error::IllFormedRelation(format!("relation {i}: {} = {}", self.word_name(&r.lhs), self.word_name(&r.rhs))));
            }
        }
        Ok(())
    }

    pub fn word_name(&self, w: &[usize]) -> String {
        if w.is_empty() {
            return "ε".into();
        }
        w.iter().map(|&g| self.generators[g].name.as_str()).collect::<Vec<_>>().join("·")
    }

    pub fn generator_named(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub src: usize,
    pub dst: usize,
    /// Shortlex-least representing word.
    pub word: Vec<usize>,
}

/// A finite category with every composite tabulated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<Morphism>,
    pub identities: Vec<usize>,
    pub generator_names: Vec<String>,
    /// Image of each generator.
    pub generators: Vec<usize>,
    out: Vec<Vec<usize>>,
    out_pos: Vec<usize>,
    comp: Vec<Vec<usize>>,
}

struct Enumeration {
    obj: Vec<usize>,
    depth: Vec<usize>,
    edges: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
}

impl Enumeration {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn add(&mut self, obj: usize, depth: usize, width: usize) -> usize {
        let id = self.obj.len();
        self.obj.push(obj);
        self.depth.push(depth);
        self.edges.push(vec![None; width]);
        self.parent.push(id);
        id
    }

    fn edge(&mut self, n: usize, pos: usize) -> Option<usize> {
        let t = self.edges[n][pos]?;
        let r = self.find(t);
        self.edges[n][pos] = Some(r);
        Some(r)
    }

    fn merge(&mut self, a: usize, b: usize) {
        let mut queue = vec![(a, b)];
        while let Some((a, b)) = queue.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            let (keep, gone) = if a < b { (a, b) } else { (b, a) };
            self.parent[gone] = keep;
            self.depth[keep] = self.depth[keep].min(self.depth[gone]);
            let gone_edges = std::mem::take(&mut self.edges[gone]);
            for (pos, e) in gone_edges.into_iter().enumerate() {
                if let Some(t) = e {
                    match self.edges[keep][pos] {
                        None => self.edges[keep][pos] = Some(t),
                        Some(u) => queue.push((t, u)),
                    }
                }
            }
        }
    }

    /// Follow `word` from `n` as far as edges are defined.
    fn trace(&mut self, n: usize, word: &[usize], gen_pos: &[usize]) -> (usize, usize) {
        let mut at = n;
        for (i, &g) in word.iter().enumerate() {
            match self.edge(at, gen_pos[g]) {
                Some(t) => at = t,
                None => return (i, at),
            }
        }
        (word.len(), at)
    }
}

/// Enumerate the morphisms out of `src`. Returns the words of the
/// morphisms in shortlex order together with the right action of
/// generators on them.
fn enumerate_from(
    p: &PresentedCategory,
    src: usize,
    bound: usize,
    out_gens: &[Vec<usize>],
    gen_pos: &[usize],
    rels_at: &[Vec<usize>],
) -> Result<(Vec<Vec<usize>>, Vec<usize>, Vec<Vec<usize>>)> {
    const NODE_CAP: usize = 2_000_000;
    let width = |o: usize| out_gens[o].len();
    let mut e = Enumeration { obj: Vec::new(), depth: Vec::new(), edges: Vec::new(), parent: Vec::new() };
    e.add(src, 0, width(src));
    let not_finite = || Error::HomSetNotFinite { object: p.objects[src].clone(), bound };
    loop {
        // Scan every relation at every live node until nothing changes.
        loop {
            let mut changed = false;
            for n in 0..e.obj.len() {
                if e.find(n) != n {
                    continue;
                }
                for &ri in &rels_at[e.obj[n]] {
                    if e.find(n) != n {
                        break;
                    }
                    let r = &p.relations[ri];
                    let (il, nl) = e.trace(n, &r.lhs, gen_pos);
                    let (ir, nr) = e.trace(n, &r.rhs, gen_pos);
                    let (cl, cr) = (il == r.lhs.len(), ir == r.rhs.len());
                    if cl && cr {
                        if nl != nr {
                            e.merge(nl, nr);
                            changed = true;
                        }
                    } else if cl && ir + 1 == r.rhs.len() {
                        e.edges[nr][gen_pos[r.rhs[ir]]] = Some(nl);
                        changed = true;
                    } else if cr && il + 1 == r.lhs.len() {
                        e.edges[nl][gen_pos[r.lhs[il]]] = Some(nr);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        // True depths in the current table.
        let live: Vec<usize> = (0..e.obj.len()).filter(|&n| e.parent[n] == n).collect();
        for &n in &live {
            e.depth[n] = usize::MAX;
        }
        e.depth[0] = 0;
        let mut q = VecDeque::from([0usize]);
        while let Some(n) = q.pop_front() {
            for pos in 0..e.edges[n].len() {
                if let Some(t) = e.edge(n, pos) {
                    if e.depth[t] == usize::MAX {
                        e.depth[t] = e.depth[n] + 1;
                        q.push_back(t);
                    }
                }
            }
        }
        let incomplete: Vec<usize> = live.iter().copied().filter(|&n| e.edges[n].iter().any(|x| x.is_none())).collect();
        let Some(d) = incomplete.iter().map(|&n| e.depth[n]).min() else {
            break;
        };
        if d + 1 > bound || live.len() > NODE_CAP {
            return Err(not_finite());
        }
        for n in incomplete {
            if e.depth[n] != d {
                continue;
            }
            for pos in 0..e.edges[n].len() {
                if e.edges[n][pos].is_none() {
                    let g = out_gens[e.obj[n]][pos];
                    let dst = p.generators[g].dst;
                    let t = e.add(dst, d + 1, width(dst));
                    e.edges[n][pos] = Some(t);
                }
            }
        }
    }
    // Shortlex words by breadth-first search in generator order.
    let mut index = vec![usize::MAX; e.obj.len()];
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    let mut order = vec![0usize];
    index[0] = 0;
    let mut head = 0;
    while head < order.len() {
        let n = order[head];
        head += 1;
        for pos in 0..e.edges[n].len() {
            let t = e.edge(n, pos).expect("complete table");
            if index[t] == usize::MAX {
                index[t] = order.len();
                let mut w = words[index[n]].clone();
                w.push(out_gens[e.obj[n]][pos]);
                words.push(w);
                order.push(t);
            }
        }
    }
    let dsts: Vec<usize> = order.iter().map(|&n| e.obj[n]).collect();
    let mut action = Vec::with_capacity(order.len());
    for &n in &order {
        let row: Vec<usize> = (0..e.edges[n].len()).map(|pos| index[e.edge(n, pos).unwrap()]).collect();
        action.push(row);
    }
    Ok((words, dsts, action))
}

/// Close a presentation to an explicit finite category. Fails with
/// `HomSetNotFinite` when some hom-set needs words longer than `bound`.
pub fn close_presented_category(p: &PresentedCategory, bound: usize) -> Result<FinCategory> {
    p.check_relations()?;
    let nobj = p.objects.len();
    let mut out_gens = vec![Vec::new(); nobj];
    let mut gen_pos = vec![0; p.generators.len()];
    for (g, gen) in p.generators.iter().enumerate() {
        gen_pos[g] = out_gens[gen.src].len();
        out_gens[gen.src].push(g);
    }
    let mut rels_at = vec![Vec::new(); nobj];
    for (i, r) in p.relations.iter().enumerate() {
        if r.lhs != r.rhs {
            rels_at[r.src].push(i);
        }
    }
    let tables: Vec<_> = (0..nobj).into_par_iter().map(|s| enumerate_from(p, s, bound, &out_gens, &gen_pos, &rels_at)).collect::<Result<_>>()?;

    let mut offset = vec![0; nobj];
    let mut morphisms = Vec::new();
    for (s, (words, dsts, _)) in tables.iter().enumerate() {
        offset[s] = morphisms.len();
        for (w, &d) in words.iter().zip(dsts) {
            let name = if w.is_empty() { format!("id:{}", p.objects[s]) } else { p.word_name(w) };
            morphisms.push(Morphism { name, src: s, dst: d, word: w.clone() });
        }
    }
    let identities: Vec<usize> = offset.clone();
    let mut out = vec![Vec::new(); nobj];
    let mut out_pos = vec![0; morphisms.len()];
    for (i, m) in morphisms.iter().enumerate() {
        out_pos[i] = out[m.src].len();
        out[m.src].push(i);
    }
    // f·g: follow the word of g from the node of f in the table of src(f).
    let comp: Vec<Vec<usize>> = morphisms
        .par_iter()
        .enumerate()
        .map(|(f, mf)| {
            let (_, _, action) = &tables[mf.src];
            let local_f = f - offset[mf.src];
            out[mf.dst]
                .iter()
                .map(|&g| {
                    let mut at = local_f;
                    for &x in &morphisms[g].word {
                        at = action[at][gen_pos[x]];
                    }
                    offset[mf.src] + at
                })
                .collect()
        })
        .collect();
    let generators: Vec<usize> = p.generators.iter().enumerate().map(|(g, gen)| offset[gen.src] + tables[gen.src].2[0][gen_pos[g]]).collect();
    Ok(FinCategory { objects: p.objects.clone(), morphisms, identities, generator_names: p.generators.iter().map(|g| g.name.clone()).collect(), generators, out, out_pos, comp })
}

impl FinCategory {
    /// Build a category from an explicit composition function. Every
    /// non-identity morphism becomes a generator.
    pub fn from_table(objects: Vec<String>, morphisms: Vec<(String, usize, usize)>, identities: Vec<usize>, compose: impl Fn(usize, usize) -> usize) -> FinCategory {
        let nobj = objects.len();
        let mut out = vec![Vec::new(); nobj];
        let mut out_pos = vec![0; morphisms.len()];
        for (i, m) in morphisms.iter().enumerate() {
            out_pos[i] = out[m.1].len();
            out[m.1].push(i);
        }
        let comp = (0..morphisms.len()).map(|f| out[morphisms[f].2].iter().map(|&g| compose(f, g)).collect()).collect();
        let gens: Vec<usize> = (0..morphisms.len()).filter(|f| !identities.contains(f)).collect();
        let morphisms: Vec<Morphism> = morphisms
            .into_iter()
            .enumerate()
            .map(|(i, (name, src, dst))| {
                let word = gens.iter().position(|&g| g == i).map(|k| vec![k]).unwrap_or_default();
                Morphism { name, src, dst, word }
            })
            .collect();
        FinCategory { objects, generator_names: gens.iter().map(|&g| morphisms[g].name.clone()).collect(), morphisms, identities, generators: gens, out, out_pos, comp }
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn src(&self, f: usize) -> usize {
        self.morphisms[f].src
    }

    pub fn dst(&self, f: usize) -> usize {
        self.morphisms[f].dst
    }

    /// Diagrammatic composite `f·g`.
    pub fn compose(&self, f: usize, g: usize) -> Option<usize> {
        if self.dst(f) != self.src(g) {
            return None;
        }
        Some(self.comp[f][self.out_pos[g]])
    }

    /// Every triple `(f, g, f·g)`.
    pub fn composable_pairs(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for f in 0..self.num_morphisms() {
            for &g in &self.out[self.dst(f)] {
                out.push((f, g, self.comp[f][self.out_pos[g]]));
            }
        }
        out
    }

    pub fn out_of(&self, a: usize) -> &[usize] {
        &self.out[a]
    }

    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        self.out[a].iter().copied().filter(|&f| self.dst(f) == b).collect()
    }

    pub fn object_named(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphism_named(&self, name: &str) -> Option<usize> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identities[self.src(f)] == f
    }

    /// Evaluate a word of generators starting at `src`.
    pub fn eval_word(&self, src: usize, word: &[usize]) -> Option<usize> {
        let mut at = self.identities[src];
        for &g in word {
            at = self.compose(at, *self.generators.get(g)?)?;
        }
        Some(at)
    }

    /// Exhaustive check of the category axioms.
    pub fn validate(&self) -> Report {
        let mut r = Report::new();
        for f in 0..self.num_morphisms() {
            let (s, d) = (self.src(f), self.dst(f));
            r.check(self.compose(self.identities[s], f) == Some(f), "category.unit", || self.morphisms[f].name.clone(), "id·f ≠ f");
            r.check(self.compose(f, self.identities[d]) == Some(f), "category.unit", || self.morphisms[f].name.clone(), "f·id ≠ f");
            for &g in &self.out[d] {
                let fg = self.compose(f, g).unwrap();
                if self.src(fg) != s || self.dst(fg) != self.dst(g) {
                    r.push("category.typed", format!("{}·{}", self.morphisms[f].name, self.morphisms[g].name), "composite has wrong endpoints");
                    continue;
                }
                for &h in &self.out[self.dst(g)] {
                    let a = self.compose(fg, h);
                    let b = self.compose(g, h).and_then(|gh| self.compose(f, gh));
                    r.check(a == b, "category.assoc", || format!("{},{},{}", self.morphisms[f].name, self.morphisms[g].name, self.morphisms[h].name), "(f·g)·h ≠ f·(g·h)");
                }
            }
        }
        r
    }
}

/// A functor between finite categories, given on objects and morphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinFunctor {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub on_objects: Vec<usize>,
    pub on_morphisms: Vec<usize>,
}

impl FinFunctor {
    pub fn identity(c: &Arc<FinCategory>) -> FinFunctor {
        FinFunctor { source: c.clone(), target: c.clone(), on_objects: (0..c.num_objects()).collect(), on_morphisms: (0..c.num_morphisms()).collect() }
    }

    /// Extend an assignment on generators to all morphisms through their
    /// representing words. Functoriality still has to be validated.
    pub fn from_generators(source: Arc<FinCategory>, target: Arc<FinCategory>, on_objects: Vec<usize>, on_gens: &[usize]) -> Option<FinFunctor> {
        let mut on_morphisms = Vec::with_capacity(source.num_morphisms());
        for m in &source.morphisms {
            let mut at = target.identities[on_objects[m.src]];
            for &g in &m.word {
                at = target.compose(at, on_gens[g])?;
            }
            on_morphisms.push(at);
        }
        Some(FinFunctor { source, target, on_objects, on_morphisms })
    }

    pub fn validate(&self) -> Report {
        let (c, d) = (&self.source, &self.target);
        let mut r = Report::new();
        for f in 0..c.num_morphisms() {
            let ff = self.on_morphisms[f];
            if d.src(ff) != self.on_objects[c.src(f)] || d.dst(ff) != self.on_objects[c.dst(f)] {
                r.push("functor.typed", c.morphisms[f].name.clone(), "image has wrong endpoints");
            }
        }
        if !r.is_ok() {
            return r;
        }
        for x in 0..c.num_objects() {
            r.check(self.on_morphisms[c.identities[x]] == d.identities[self.on_objects[x]], "functor.unit", || c.objects[x].clone(), "identity not preserved");
        }
        for f in 0..c.num_morphisms() {
            for &g in c.out_of(c.dst(f)) {
                let fg = c.compose(f, g).unwrap();
                r.check(
                    d.compose(self.on_morphisms[f], self.on_morphisms[g]) == Some(self.on_morphisms[fg]),
                    "functor.comp",
                    || format!("{},{}", c.morphisms[f].name, c.morphisms[g].name),
                    "composite not preserved",
                );
            }
        }
        r
    }

    pub fn compose(&self, other: &FinFunctor) -> FinFunctor {
        FinFunctor {
            source: self.source.clone(),
            target: other.target.clone(),
            on_objects: self.on_objects.iter().map(|&x| other.on_objects[x]).collect(),
            on_morphisms: self.on_morphisms.iter().map(|&f| other.on_morphisms[f]).collect(),
        }
    }

    /// Unique lifting of every morphism out of an image object.
    pub fn is_classical_dopf(&self) -> bool {
        let (c, d) = (&self.source, &self.target);
        (0..c.num_objects()).all(|e| d.out_of(self.on_objects[e]).iter().all(|&b| c.out_of(e).iter().filter(|&&g| self.on_morphisms[g] == b).count() == 1))
    }

    pub fn is_isomorphism(&self) -> bool {
        crate::finset::is_bijection(&self.on_objects, self.target.num_objects()) && crate::finset::is_bijection(&self.on_morphisms, self.target.num_morphisms())
    }
}

/// All functors `c → d`, determined by their values on generators.
pub fn enumerate_functors(c: &Arc<FinCategory>, d: &Arc<FinCategory>, limit: usize) -> Result<Vec<FinFunctor>> {
    let mut csp = Csp::new();
    let obj_vars: Vec<usize> = (0..c.num_objects()).map(|_| csp.var_range(d.num_objects())).collect();
    let ngen = c.generators.len();
    let mut gen_vars = Vec::with_capacity(ngen);
    for g in 0..ngen {
        let f = c.generators[g];
        let (vs, vt) = (obj_vars[c.src(f)], obj_vars[c.dst(f)]);
        let dd = d.clone();
        gen_vars.push(csp.var_dynamic(move |a: &[usize]| dd.hom(a[vs], a[vt])));
    }
    let sols = csp.all(limit)?;
    let mut out = Vec::new();
    for s in sols {
        let on_objects: Vec<usize> = obj_vars.iter().map(|&v| s[v]).collect();
        let on_gens: Vec<usize> = gen_vars.iter().map(|&v| s[v]).collect();
        if let Some(f) = FinFunctor::from_generators(c.clone(), d.clone(), on_objects, &on_gens) {
            // Generators naming the same morphism must agree, or the functor repeats.
            let consistent = c.generators.iter().zip(&on_gens).all(|(&g, &v)| f.on_morphisms[g] == v);
            if consistent && f.validate().is_ok() {
                out.push(f);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PresentedCategory {
        // a → b, a → c, b → d, c → d with the square commuting
        let mut p = PresentedCategory::default();
        for o in ["a", "b", "c", "d"] {
            p.add_object(o);
        }
        let f = p.add_generator("f", 0, 1, GenKind::Plain);
        let g = p.add_generator("g", 0, 2, GenKind::Plain);
        let h = p.add_generator("h", 1, 3, GenKind::Plain);
        let k = p.add_generator("k", 2, 3, GenKind::Plain);
        p.add_relation(0, vec![f, h], vec![g, k]);
        p
    }

    #[test]
    fn commutative_square_closes_to_poset() {
        let c = close_presented_category(&square(), 3).unwrap();
        assert_eq!(c.num_objects(), 4);
        assert_eq!(c.num_morphisms(), 9);
        assert!(c.validate().is_ok());
        assert_eq!(c.hom(0, 3).len(), 1);
        // shortlex representative: f·h precedes g·k
        assert_eq!(c.morphisms[c.hom(0, 3)[0]].name, "f·h");
    }

    #[test]
    fn cyclic_group_closes() {
        let mut p = PresentedCategory::default();
        p.add_object("*");
        let g = p.add_generator("g", 0, 0, GenKind::Plain);
        p.add_relation(0, vec![g; 5], vec![]);
        let c = close_presented_category(&p, 6).unwrap();
        assert_eq!(c.num_morphisms(), 5);
        assert!(c.validate().is_ok());
        let g1 = c.generators[0];
        let mut at = c.identities[0];
        for _ in 0..5 {
            at = c.compose(at, g1).unwrap();
        }
        assert_eq!(at, c.identities[0]);
    }

    #[test]
    fn free_loop_is_not_finite() {
        let mut p = PresentedCategory::default();
        p.add_object("*");
        p.add_generator("g", 0, 0, GenKind::Plain);
        assert!(matches!(close_presented_category(&p, 8), Err(Error::HomSetNotFinite { .. })));
    }

    #[test]
    fn idempotent_needs_deduction() {
        // e·e = e on one object: {id, e}
        let mut p = PresentedCategory::default();
        p.add_object("*");
        let e = p.add_generator("e", 0, 0, GenKind::Plain);
        p.add_relation(0, vec![e, e], vec![e]);
        let c = close_presented_category(&p, 2).unwrap();
        assert_eq!(c.num_morphisms(), 2);
    }

    #[test]
    fn ill_formed_relation_rejected() {
        let mut p = square();
        p.add_relation(0, vec![0], vec![1]);
        assert!(matches!(close_presented_category(&p, 3), Err(Error::IllFormedRelation(_))));
    }

    #[test]
    fn functors_from_arrow_category() {
        let c = Arc::new(close_presented_category(&square(), 3).unwrap());
        let mut p = PresentedCategory::default();
        p.add_object("0");
        p.add_object("1");
        p.add_generator("u", 0, 1, GenKind::Plain);
        let two = Arc::new(close_presented_category(&p, 2).unwrap());
        // functors from the walking arrow into the square = morphisms of the square
        let fs = enumerate_functors(&two, &c, 1000).unwrap();
        assert_eq!(fs.len(), 9);
        assert!(FinFunctor::identity(&c).is_classical_dopf());
    }
}
