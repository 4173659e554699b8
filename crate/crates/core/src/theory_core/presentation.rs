//! Theories from generators and relations.
//!
//! The tight and loose categories are closed with the finite-category
//! engine. Cells are saturated: composites of existing cell classes are
//! added in order of size (number of generator leaves), and the double
//! category axioms plus the user relations are imposed by congruence
//! closure between rounds.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{DoubleTheory, TheoryBuilder, ID_PREFIX};
use crate::collage::{close_presented_category, FinCategory, GenKind, PresentedCategory};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenArrow {
    pub name: String,
    pub src: String,
    pub dst: String,
}

/// A generating cell. Boundaries are words of generators; an empty word
/// is an identity, and `at` names the object when every side is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenCell {
    pub name: String,
    #[serde(default)]
    pub left: Vec<String>,
    #[serde(default)]
    pub right: Vec<String>,
    #[serde(default)]
    pub top: Vec<String>,
    #[serde(default)]
    pub bottom: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<String>,
}

/// Cell expressions used in relations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellTerm {
    Gen(String),
    V {
        v: (Box<CellTerm>, Box<CellTerm>),
    },
    H {
        h: (Box<CellTerm>, Box<CellTerm>),
    },
    /// `1_m` for a loose word.
    IdLoose {
        id_loose: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        at: Option<String>,
    },
    /// `id_f` for a tight word.
    IdTight {
        id_tight: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        at: Option<String>,
    },
}

impl CellTerm {
    pub fn gen(name: &str) -> CellTerm {
        CellTerm::Gen(name.to_string())
    }

    pub fn v(a: CellTerm, b: CellTerm) -> CellTerm {
        CellTerm::V { v: (Box::new(a), Box::new(b)) }
    }

    pub fn h(a: CellTerm, b: CellTerm) -> CellTerm {
        CellTerm::H { h: (Box::new(a), Box::new(b)) }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoryPresentation {
    #[serde(default)]
    pub name: String,
    pub objects: Vec<String>,
    #[serde(default)]
    pub tight: Vec<GenArrow>,
    #[serde(default)]
    pub loose: Vec<GenArrow>,
    #[serde(default)]
    pub cells: Vec<GenCell>,
    #[serde(default)]
    pub tight_relations: Vec<(Vec<String>, Vec<String>)>,
    #[serde(default)]
    pub loose_relations: Vec<(Vec<String>, Vec<String>)>,
    #[serde(default)]
    pub cell_relations: Vec<(CellTerm, CellTerm)>,
}

fn arrow_category(objects: &[String], gens: &[GenArrow], rels: &[(Vec<String>, Vec<String>)], what: &str) -> Result<PresentedCategory> {
    let mut p = PresentedCategory::default();
    for o in objects {
        p.add_object(o.clone());
    }
    let obj = |n: &str| objects.iter().position(|o| o == n).ok_or_else(|| Error::Invalid(format!("unknown object {n}")));
    for g in gens {
        p.add_generator(g.name.clone(), obj(&g.src)?, obj(&g.dst)?, GenKind::Plain);
    }
    for (lhs, rhs) in rels {
        let word = |w: &[String]| -> Result<Vec<usize>> { w.iter().map(|n| p.generator_named(n).ok_or_else(|| Error::Invalid(format!("unknown {what} generator {n}")))).collect() };
        let (l, r) = (word(lhs)?, word(rhs)?);
        let src = match (l.first(), r.first()) {
            (Some(&g), _) | (None, Some(&g)) => p.generators[g].src,
            (None, None) => continue,
        };
        let ends = (p.word_target(src, &l), p.word_target(src, &r));
        if ends.0.is_none() || ends.0 != ends.1 {
            return Err(Error::IllFormedRelation(format!("{what}: {} = {}", lhs.join("·"), rhs.join("·"))));
        }
        p.add_relation(src, l, r);
    }
    Ok(p)
}

fn closure_error(e: Error, bound: usize) -> Error {
    match e {
        Error::HomSetNotFinite { .. } => Error::ClosureNotFinite { bound },
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Boundary {
    left: usize,
    right: usize,
    top: usize,
    bottom: usize,
}

struct Saturation<'a> {
    tc: &'a FinCategory,
    lc: &'a FinCategory,
    bnd: Vec<Boundary>,
    size: Vec<usize>,
    name: Vec<String>,
    parent: Vec<usize>,
    vtab: HashMap<(usize, usize), usize>,
    htab: HashMap<(usize, usize), usize>,
    tight_id: Vec<usize>,
    loose_id: Vec<usize>,
    events: usize,
}

impl Saturation<'_> {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (keep, gone) = if a < b { (a, b) } else { (b, a) };
        self.parent[gone] = keep;
        self.events += 1;
        true
    }

    fn node(&mut self, b: Boundary, size: usize, name: String) -> usize {
        self.bnd.push(b);
        self.size.push(size);
        self.name.push(name);
        self.parent.push(self.parent.len());
        self.events += 1;
        self.parent.len() - 1
    }

    fn vbound(&self, a: usize, b: usize) -> Option<Boundary> {
        let (x, y) = (self.bnd[a], self.bnd[b]);
        (x.bottom == y.top).then(|| Boundary { left: self.tc.compose(x.left, y.left).unwrap(), right: self.tc.compose(x.right, y.right).unwrap(), top: x.top, bottom: y.bottom })
    }

    fn hbound(&self, a: usize, b: usize) -> Option<Boundary> {
        let (x, y) = (self.bnd[a], self.bnd[b]);
        (x.right == y.left).then(|| Boundary { left: x.left, right: y.right, top: self.lc.compose(x.top, y.top).unwrap(), bottom: self.lc.compose(x.bottom, y.bottom).unwrap() })
    }

    fn vcomp(&mut self, a: usize, b: usize) -> Option<usize> {
        let (a, b) = (self.find(a), self.find(b));
        if let Some(&c) = self.vtab.get(&(a, b)) {
            return Some(self.find(c));
        }
        let bd = self.vbound(a, b)?;
        let name = format!("({}·{})", self.name[a], self.name[b]);
        let c = self.node(bd, self.size[a] + self.size[b], name);
        self.vtab.insert((a, b), c);
        Some(c)
    }

    fn hcomp(&mut self, a: usize, b: usize) -> Option<usize> {
        let (a, b) = (self.find(a), self.find(b));
        if let Some(&c) = self.htab.get(&(a, b)) {
            return Some(self.find(c));
        }
        let bd = self.hbound(a, b)?;
        let name = format!("({}⊙{})", self.name[a], self.name[b]);
        let c = self.node(bd, self.size[a] + self.size[b], name);
        self.htab.insert((a, b), c);
        Some(c)
    }

    /// Record `key ↦ val` in a table, merging on conflict.
    fn set(&mut self, vertical: bool, key: (usize, usize), val: usize) -> bool {
        let key = (self.find(key.0), self.find(key.1));
        let tab = if vertical { &self.vtab } else { &self.htab };
        match tab.get(&key).copied() {
            Some(old) => self.union(old, val),
            None => {
                if vertical {
                    self.vtab.insert(key, val);
                } else {
                    self.htab.insert(key, val);
                }
                self.events += 1;
                true
            }
        }
    }

    fn canonicalize(&mut self, vertical: bool) {
        let old = std::mem::take(if vertical { &mut self.vtab } else { &mut self.htab });
        for ((a, b), c) in old {
            let key = (self.find(a), self.find(b));
            let c = self.find(c);
            let tab = if vertical { &mut self.vtab } else { &mut self.htab };
            match tab.get(&key).copied() {
                Some(x) => {
                    self.union(x, c);
                }
                None => {
                    tab.insert(key, c);
                }
            }
        }
    }

    fn live(&self) -> Vec<usize> {
        (0..self.parent.len()).filter(|&n| self.parent[n] == n).collect()
    }

    /// Impose the axioms once over the current tables. Returns whether
    /// anything was merged or added.
    fn axioms_pass(&mut self, relations: &[(CellTermIx, CellTermIx)]) -> Result<bool> {
        let before = self.events;
        self.canonicalize(true);
        self.canonicalize(false);
        for a in self.live() {
            let b = self.bnd[a];
            let (lt, lb) = (self.loose_id[b.top], self.loose_id[b.bottom]);
            let (tl, tr) = (self.tight_id[b.left], self.tight_id[b.right]);
            self.set(true, (lt, a), a);
            self.set(true, (a, lb), a);
            self.set(false, (tl, a), a);
            self.set(false, (a, tr), a);
        }
        for f in 0..self.tc.num_morphisms() {
            for &g in self.tc.out_of(self.tc.dst(f)) {
                let fg = self.tc.compose(f, g).unwrap();
                let (a, b, c) = (self.tight_id[f], self.tight_id[g], self.tight_id[fg]);
                self.set(true, (a, b), c);
            }
        }
        for m in 0..self.lc.num_morphisms() {
            for &n in self.lc.out_of(self.lc.dst(m)) {
                let mn = self.lc.compose(m, n).unwrap();
                let (a, b, c) = (self.loose_id[m], self.loose_id[n], self.loose_id[mn]);
                self.set(false, (a, b), c);
            }
        }
        for vertical in [true, false] {
            let entries: Vec<((usize, usize), usize)> = (if vertical { &self.vtab } else { &self.htab }).iter().map(|(&k, &v)| (k, v)).collect();
            let mut by_first: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
            for &((a, b), c) in &entries {
                by_first.entry(self.find(a)).or_default().push((b, c));
            }
            for &((a, b), ab) in &entries {
                let Some(next) = by_first.get(&self.find(b)) else { continue };
                for &(c, bc) in next.clone().iter() {
                    let key1 = (self.find(ab), self.find(c));
                    let key2 = (self.find(a), self.find(bc));
                    let tab = if vertical { &self.vtab } else { &self.htab };
                    match (tab.get(&key1).copied(), tab.get(&key2).copied()) {
                        (Some(x), Some(y)) => {
                            self.union(x, y);
                        }
                        (Some(x), None) => {
                            self.set(vertical, key2, x);
                        }
                        (None, Some(y)) => {
                            self.set(vertical, key1, y);
                        }
                        (None, None) => {}
                    }
                }
            }
        }
        // Interchange: (a·c)⊙(b·d) = (a⊙b)·(c⊙d).
        let hs: Vec<((usize, usize), usize)> = self.htab.iter().map(|(&k, &v)| (k, v)).collect();
        let mut below: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        for (&(a, c), &ac) in &self.vtab {
            below.entry(a).or_default().push((c, ac));
        }
        for ((a, b), ab) in hs {
            let (Some(ba), Some(bb)) = (below.get(&a).cloned(), below.get(&b).cloned()) else { continue };
            for &(c, ac) in &ba {
                for &(d, bd) in &bb {
                    let (c, d) = (self.find(c), self.find(d));
                    let Some(cd) = self.htab.get(&(c, d)).copied() else { continue };
                    let k1 = (self.find(ac), self.find(bd));
                    let k2 = (self.find(ab), self.find(cd));
                    match (self.htab.get(&k1).copied(), self.vtab.get(&k2).copied()) {
                        (Some(x), Some(y)) => {
                            self.union(x, y);
                        }
                        (Some(x), None) => {
                            self.set(true, k2, x);
                        }
                        (None, Some(y)) => {
                            self.set(false, k1, y);
                        }
                        (None, None) => {}
                    }
                }
            }
        }
        for (l, r) in relations {
            let x = self.eval(l)?;
            let y = self.eval(r)?;
            self.union(x, y);
        }
        Ok(self.events != before)
    }

    fn eval(&mut self, t: &CellTermIx) -> Result<usize> {
        Ok(match t {
            CellTermIx::Node(n) => self.find(*n),
            CellTermIx::V(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                self.vcomp(x, y).ok_or_else(|| Error::IllFormedRelation("vertically non-composable cells".into()))?
            }
            CellTermIx::H(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                self.hcomp(x, y).ok_or_else(|| Error::IllFormedRelation("horizontally non-composable cells".into()))?
            }
        })
    }
}

enum CellTermIx {
    Node(usize),
    V(Box<CellTermIx>, Box<CellTermIx>),
    H(Box<CellTermIx>, Box<CellTermIx>),
}

fn resolve_word(c: &FinCategory, objects: &[String], src: usize, w: &[String]) -> Result<usize> {
    let mut at = c.identities[src];
    for n in w {
        let g = c.generator_names.iter().position(|x| x == n).ok_or_else(|| Error::Invalid(format!("unknown generator {n}")))?;
        at = c.compose(at, c.generators[g]).ok_or_else(|| Error::Invalid(format!("word {} is not composable from {}", w.join(","), objects[src])))?;
    }
    Ok(at)
}

fn word_src(c: &FinCategory, w: &[String]) -> Option<usize> {
    let g = c.generator_names.iter().position(|x| Some(x) == w.first())?;
    Some(c.src(c.generators[g]))
}

/// Resolve the four corners of a boundary given by words, then the sides.
fn resolve_boundary(
    tc: &FinCategory,
    lc: &FinCategory,
    objects: &[String],
    left: &[String],
    right: &[String],
    top: &[String],
    bottom: &[String],
    at: Option<&str>,
    what: &str,
) -> Result<Boundary> {
    // corners: 0 top-left, 1 top-right, 2 bottom-left, 3 bottom-right
    let sides: [(&[String], bool, usize, usize); 4] = [(top, false, 0, 1), (left, true, 0, 2), (right, true, 1, 3), (bottom, false, 2, 3)];
    let mut corner: [Option<usize>; 4] = [None; 4];
    for &(w, tight, s, d) in &sides {
        if w.is_empty() {
            continue;
        }
        let c = if tight { tc } else { lc };
        let src = word_src(c, w).ok_or_else(|| Error::Invalid(format!("{what}: unknown generator {}", w[0])))?;
        let f = resolve_word(c, objects, src, w)?;
        for (k, o) in [(s, src), (d, c.dst(f))] {
            if corner[k].is_some_and(|x| x != o) {
                return Err(Error::Invalid(format!("{what}: boundary corners disagree")));
            }
            corner[k] = Some(o);
        }
    }
    for _ in 0..4 {
        for &(w, _, s, d) in &sides {
            if w.is_empty() {
                match (corner[s], corner[d]) {
                    (Some(x), None) => corner[d] = Some(x),
                    (None, Some(y)) => corner[s] = Some(y),
                    (Some(x), Some(y)) if x != y => return Err(Error::Invalid(format!("{what}: identity side joins distinct objects"))),
                    _ => {}
                }
            }
        }
    }
    let at = match at {
        Some(a) => Some(objects.iter().position(|o| o == a).ok_or_else(|| Error::Invalid(format!("unknown object {a}")))?),
        None => None,
    };
    let mut ob = [0; 4];
    for k in 0..4 {
        ob[k] = corner[k].or(at).ok_or_else(|| Error::Invalid(format!("{what}: cannot place an all-identity boundary; give `at`")))?;
    }
    Ok(Boundary {
        top: resolve_word(lc, objects, ob[0], top)?,
        left: resolve_word(tc, objects, ob[0], left)?,
        right: resolve_word(tc, objects, ob[1], right)?,
        bottom: resolve_word(lc, objects, ob[2], bottom)?,
    })
}

/// Close a presentation to a finite strict double theory. Arrow words and
/// cell composites longer than `bound` are not explored.
pub fn close_presentation(p: &TheoryPresentation, bound: usize) -> Result<DoubleTheory> {
    if bound == 0 {
        return Err(Error::Invalid("bound must be positive".into()));
    }
    let tp = arrow_category(&p.objects, &p.tight, &p.tight_relations, "tight")?;
    let lp = arrow_category(&p.objects, &p.loose, &p.loose_relations, "loose")?;
    let tc = close_presented_category(&tp, bound).map_err(|e| closure_error(e, bound))?;
    let lc = close_presented_category(&lp, bound).map_err(|e| closure_error(e, bound))?;

    let mut s = Saturation {
        tc: &tc,
        lc: &lc,
        bnd: Vec::new(),
        size: Vec::new(),
        name: Vec::new(),
        parent: Vec::new(),
        vtab: HashMap::new(),
        htab: HashMap::new(),
        tight_id: Vec::new(),
        loose_id: Vec::new(),
        events: 0,
    };
    let loose_name = |m: usize| lc.morphisms[m].name.replace('·', "⊙");
    let mut shared = HashMap::new();
    for f in 0..tc.num_morphisms() {
        let (a, b) = (tc.src(f), tc.dst(f));
        let bd = Boundary { left: f, right: f, top: lc.identities[a], bottom: lc.identities[b] };
        let n = s.node(bd, 0, format!("{ID_PREFIX}{}", tc.morphisms[f].name));
        if tc.is_identity(f) {
            shared.insert(a, n);
        }
        s.tight_id.push(n);
    }
    for m in 0..lc.num_morphisms() {
        let n = if lc.is_identity(m) {
            shared[&lc.src(m)]
        } else {
            let (a, b) = (lc.src(m), lc.dst(m));
            let bd = Boundary { left: tc.identities[a], right: tc.identities[b], top: m, bottom: m };
            s.node(bd, 0, format!("{ID_PREFIX}{}", loose_name(m)))
        };
        s.loose_id.push(n);
    }
    let mut gen_node = HashMap::new();
    for c in &p.cells {
        let bd = resolve_boundary(&tc, &lc, &p.objects, &c.left, &c.right, &c.top, &c.bottom, c.at.as_deref(), &c.name)?;
        let n = s.node(bd, 1, c.name.clone());
        gen_node.insert(c.name.clone(), n);
    }

    fn ix(t: &CellTerm, gen_node: &HashMap<String, usize>, s: &Saturation, objects: &[String]) -> Result<CellTermIx> {
        Ok(match t {
            CellTerm::Gen(n) => CellTermIx::Node(*gen_node.get(n).ok_or_else(|| Error::Invalid(format!("unknown cell {n}")))?),
            CellTerm::V { v: (a, b) } => CellTermIx::V(Box::new(ix(a, gen_node, s, objects)?), Box::new(ix(b, gen_node, s, objects)?)),
            CellTerm::H { h: (a, b) } => CellTermIx::H(Box::new(ix(a, gen_node, s, objects)?), Box::new(ix(b, gen_node, s, objects)?)),
            CellTerm::IdLoose { id_loose, at } => {
                let src = match word_src(s.lc, id_loose) {
                    Some(x) => x,
                    None => place(at.as_deref(), objects)?,
                };
                CellTermIx::Node(s.loose_id[resolve_word(s.lc, objects, src, id_loose)?])
            }
            CellTerm::IdTight { id_tight, at } => {
                let src = match word_src(s.tc, id_tight) {
                    Some(x) => x,
                    None => place(at.as_deref(), objects)?,
                };
                CellTermIx::Node(s.tight_id[resolve_word(s.tc, objects, src, id_tight)?])
            }
        })
    }
    fn place(at: Option<&str>, objects: &[String]) -> Result<usize> {
        let a = at.ok_or_else(|| Error::Invalid("identity on an empty word needs `at`".into()))?;
        objects.iter().position(|o| o == a).ok_or_else(|| Error::Invalid(format!("unknown object {a}")))
    }
    let mut rels = Vec::new();
    for (l, r) in &p.cell_relations {
        rels.push((ix(l, &gen_node, &s, &p.objects)?, ix(r, &gen_node, &s, &p.objects)?));
    }
    // Relations must be parallel before anything is merged.
    for (l, r) in &rels {
        let (x, y) = (s.eval(l)?, s.eval(r)?);
        if s.bnd[x] != s.bnd[y] {
            return Err(Error::IllFormedRelation(format!("{} = {} have different boundaries", s.name[x], s.name[y])));
        }
    }

    loop {
        while s.axioms_pass(&rels)? {}
        let live = s.live();
        let mut missing: Vec<(bool, usize, usize, usize)> = Vec::new();
        for &a in &live {
            for &b in &live {
                let sz = s.size[a] + s.size[b];
                if s.bnd[a].bottom == s.bnd[b].top && !s.vtab.contains_key(&(a, b)) {
                    missing.push((true, a, b, sz));
                }
                if s.bnd[a].right == s.bnd[b].left && !s.htab.contains_key(&(a, b)) {
                    missing.push((false, a, b, sz));
                }
            }
        }
        let Some(least) = missing.iter().map(|m| m.3).min() else { break };
        if least > bound {
            return Err(Error::ClosureNotFinite { bound });
        }
        for (vertical, a, b, sz) in missing {
            if sz == least {
                if vertical {
                    s.vcomp(a, b);
                } else {
                    s.hcomp(a, b);
                }
            }
        }
    }

    // Assemble the theory.
    let mut tb = TheoryBuilder::new(&p.name);
    for o in &p.objects {
        tb.add_object(o);
    }
    let mut tmap = vec![0; tc.num_morphisms()];
    for f in 0..tc.num_morphisms() {
        tmap[f] = if tc.is_identity(f) { tb.theory().tight_id[tc.src(f)] } else { tb.add_tight(&tc.morphisms[f].name, tc.src(f), tc.dst(f)) };
    }
    let mut lmap = vec![0; lc.num_morphisms()];
    for m in 0..lc.num_morphisms() {
        lmap[m] = if lc.is_identity(m) { tb.theory().loose_id[lc.src(m)] } else { tb.add_loose(&loose_name(m), lc.src(m), lc.dst(m)) };
    }
    for (f, g, h) in tc.composable_pairs() {
        tb.set_tight_comp(tmap[f], tmap[g], tmap[h]);
    }
    for (m, n, k) in lc.composable_pairs() {
        tb.set_loose_comp(lmap[m], lmap[n], lmap[k]);
    }
    // Class → theory cell. Identity classes keep their identity cell;
    // others are named by a generator if they contain one, otherwise by
    // their smallest composite.
    let mut class_cell: BTreeMap<usize, usize> = BTreeMap::new();
    for f in 0..tc.num_morphisms() {
        let c = s.find(s.tight_id[f]);
        class_cell.entry(c).or_insert(tb.theory().cell_tight_id[tmap[f]]);
    }
    for m in 0..lc.num_morphisms() {
        let c = s.find(s.loose_id[m]);
        class_cell.entry(c).or_insert(tb.theory().cell_loose_id[lmap[m]]);
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for n in 0..s.parent.len() {
        let c = s.find(n);
        members.entry(c).or_default().push(n);
    }
    for (&c, nodes) in &members {
        if class_cell.contains_key(&c) {
            continue;
        }
        let gen = p.cells.iter().find(|g| nodes.contains(&gen_node[&g.name])).map(|g| g.name.clone());
        let name = gen.unwrap_or_else(|| {
            let best = nodes.iter().min_by_key(|&&n| (s.size[n], n)).unwrap();
            s.name[*best].clone()
        });
        let b = s.bnd[c];
        let id = tb.add_cell(&name, tmap[b.left], tmap[b.right], lmap[b.top], lmap[b.bottom]);
        class_cell.insert(c, id);
    }
    let vt: Vec<_> = s.vtab.iter().map(|(&k, &v)| (k, v)).collect();
    for ((a, b), c) in vt {
        let (a, b, c) = (s.find(a), s.find(b), s.find(c));
        tb.set_vcomp(class_cell[&a], class_cell[&b], class_cell[&c]);
    }
    let ht: Vec<_> = s.htab.iter().map(|(&k, &v)| (k, v)).collect();
    for ((a, b), c) in ht {
        let (a, b, c) = (s.find(a), s.find(b), s.find(c));
        tb.set_hcomp(class_cell[&a], class_cell[&b], class_cell[&c]);
    }
    Ok(tb.build())
}

/// Read a closed theory back as a presentation: every non-identity arrow
/// and cell is a generator and every tabulated composite a relation.
pub fn presentation_of_theory(t: &DoubleTheory) -> TheoryPresentation {
    let arrow = |a: &super::Arrow| GenArrow { name: a.name.clone(), src: t.objects[a.src].clone(), dst: t.objects[a.dst].clone() };
    let tword = |f: usize| if t.is_tight_identity(f) { vec![] } else { vec![t.tight[f].name.clone()] };
    let lword = |m: usize| if t.is_loose_identity(m) { vec![] } else { vec![t.loose[m].name.clone()] };
    let mut identity_cell = HashMap::new();
    for (f, &c) in t.cell_tight_id.iter().enumerate() {
        identity_cell.insert(c, CellTerm::IdTight { id_tight: tword(f), at: Some(t.objects[t.tight[f].src].clone()) });
    }
    for (m, &c) in t.cell_loose_id.iter().enumerate() {
        identity_cell.insert(c, CellTerm::IdLoose { id_loose: lword(m), at: Some(t.objects[t.loose[m].src].clone()) });
    }
    let term = |c: usize| identity_cell.get(&c).cloned().unwrap_or_else(|| CellTerm::Gen(t.cells[c].name.clone()));
    let mut p = TheoryPresentation {
        name: t.name.clone(),
        objects: t.objects.clone(),
        tight: (0..t.tight.len()).filter(|&f| !t.is_tight_identity(f)).map(|f| arrow(&t.tight[f])).collect(),
        loose: (0..t.loose.len()).filter(|&m| !t.is_loose_identity(m)).map(|m| arrow(&t.loose[m])).collect(),
        ..Default::default()
    };
    for c in 0..t.cells.len() {
        if identity_cell.contains_key(&c) {
            continue;
        }
        let cell = &t.cells[c];
        p.cells.push(GenCell {
            name: cell.name.clone(),
            left: tword(cell.left),
            right: tword(cell.right),
            top: lword(cell.top),
            bottom: lword(cell.bottom),
            at: Some(t.objects[t.loose[cell.top].src].clone()),
        });
    }
    for (&(f, g), &h) in &t.tight_comp {
        if !t.is_tight_identity(f) && !t.is_tight_identity(g) {
            p.tight_relations.push((vec![t.tight[f].name.clone(), t.tight[g].name.clone()], tword(h)));
        }
    }
    for (&(m, n), &k) in &t.loose_comp {
        if !t.is_loose_identity(m) && !t.is_loose_identity(n) {
            p.loose_relations.push((vec![t.loose[m].name.clone(), t.loose[n].name.clone()], lword(k)));
        }
    }
    let is_id = |c: usize| identity_cell.contains_key(&c);
    for (&(a, b), &c) in &t.cell_vcomp {
        if !(is_id(a) && is_id(b)) && !(t.cell_loose_id[t.cells[a].top] == a || t.cell_loose_id[t.cells[b].bottom] == b) {
            p.cell_relations.push((CellTerm::v(term(a), term(b)), term(c)));
        }
    }
    for (&(a, b), &c) in &t.cell_hcomp {
        if !(is_id(a) && is_id(b)) && !(t.cell_tight_id[t.cells[a].left] == a || t.cell_tight_id[t.cells[b].right] == b) {
            p.cell_relations.push((CellTerm::h(term(a), term(b)), term(c)));
        }
    }
    p
}
