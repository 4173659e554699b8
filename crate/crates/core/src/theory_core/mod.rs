//! Finite strict double theories with fully tabulated composition.
//!
//! Tight composition is written in diagrammatic order: `f·g` means `f`
//! then `g`. For cells, `vcomp(α, β)` stacks `β` below `α` (tight
//! direction) and `hcomp(α, β)` places `β` to the right of `α` (loose
//! direction).

mod builtin;
mod presentation;
mod validate;

pub(crate) use builtin::{all_functions, monotone_functions, prom_loose_name, prom_obj, prom_tight_name, sq_loose_name, sq_tight_name};
pub use builtin::{builtin_theory, Builtin};
pub use presentation::{close_presentation, presentation_of_theory, CellTerm, GenArrow, GenCell, TheoryPresentation};
pub use validate::validate_theory;

use std::collections::{BTreeMap, HashMap};

pub type Ob = usize;
pub type Tight = usize;
pub type Loose = usize;
pub type CellId = usize;

/// Prefix reserved for identity arrows and identity cells.
pub const ID_PREFIX: &str = "id:";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub src: Ob,
    pub dst: Ob,
}

/// A cell with tight sides `left: top.src → bottom.src`,
/// `right: top.dst → bottom.dst`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub name: String,
    pub left: Tight,
    pub right: Tight,
    pub top: Loose,
    pub bottom: Loose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductCone {
    pub apex: Ob,
    pub proj: (Tight, Tight),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LooseProductCone {
    pub apex: Loose,
    pub proj: (CellId, CellId),
}

/// Designated finite products. Pairings are not stored; they are recovered
/// from the composition tables and checked to be unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartesianStructure {
    pub terminal: Ob,
    pub products: BTreeMap<(Ob, Ob), ProductCone>,
    pub loose_terminal: Loose,
    pub loose_products: BTreeMap<(Loose, Loose), LooseProductCone>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleTheory {
    pub name: String,
    pub objects: Vec<String>,
    pub tight: Vec<Arrow>,
    pub tight_id: Vec<Tight>,
    pub tight_comp: BTreeMap<(Tight, Tight), Tight>,
    pub loose: Vec<Arrow>,
    pub loose_id: Vec<Loose>,
    pub loose_comp: BTreeMap<(Loose, Loose), Loose>,
    pub cells: Vec<Cell>,
    /// `1_m`, the vertical identity on each loose arrow.
    pub cell_loose_id: Vec<CellId>,
    /// `id_f`, the horizontal identity on each tight arrow.
    pub cell_tight_id: Vec<CellId>,
    pub cell_vcomp: BTreeMap<(CellId, CellId), CellId>,
    pub cell_hcomp: BTreeMap<(CellId, CellId), CellId>,
    /// Set by truncated theories whose tables omit some composites.
    pub partial: bool,
    pub cartesian: Option<CartesianStructure>,
}

impl DoubleTheory {
    pub fn tight_compose(&self, f: Tight, g: Tight) -> Option<Tight> {
        self.tight_comp.get(&(f, g)).copied()
    }

    pub fn loose_compose(&self, m: Loose, n: Loose) -> Option<Loose> {
        self.loose_comp.get(&(m, n)).copied()
    }

    pub fn vcomp(&self, a: CellId, b: CellId) -> Option<CellId> {
        self.cell_vcomp.get(&(a, b)).copied()
    }

    pub fn hcomp(&self, a: CellId, b: CellId) -> Option<CellId> {
        self.cell_hcomp.get(&(a, b)).copied()
    }

    pub fn object(&self, name: &str) -> Option<Ob> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn tight_named(&self, name: &str) -> Option<Tight> {
        self.tight.iter().position(|a| a.name == name)
    }

    pub fn loose_named(&self, name: &str) -> Option<Loose> {
        self.loose.iter().position(|a| a.name == name)
    }

    pub fn cell_named(&self, name: &str) -> Option<CellId> {
        self.cells.iter().position(|c| c.name == name)
    }

    pub fn is_tight_identity(&self, f: Tight) -> bool {
        self.tight_id[self.tight[f].src] == f
    }

    pub fn is_loose_identity(&self, m: Loose) -> bool {
        self.loose_id[self.loose[m].src] == m
    }

    /// Loose pairs with a tabulated composite, in table order.
    pub fn composable_loose_pairs(&self) -> Vec<(Loose, Loose)> {
        self.loose_comp.keys().copied().collect()
    }

    /// Loose triples `(m, n, p)` for which `m⊙n`, `n⊙p` and both bracketings
    /// are tabulated.
    pub fn composable_loose_triples(&self) -> Vec<(Loose, Loose, Loose)> {
        let mut out = Vec::new();
        for (&(m, n), &mn) in &self.loose_comp {
            for p in 0..self.loose.len() {
                if let (Some(np), Some(_)) = (self.loose_compose(n, p), self.loose_compose(mn, p)) {
                    if self.loose_compose(m, np).is_some() {
                        out.push((m, n, p));
                    }
                }
            }
        }
        out
    }

    /// Horizontally composable cell pairs with a tabulated composite.
    pub fn hcomposable_cells(&self) -> Vec<(CellId, CellId)> {
        self.cell_hcomp.keys().copied().collect()
    }

    pub fn tight_hom(&self, a: Ob, b: Ob) -> Vec<Tight> {
        (0..self.tight.len()).filter(|&f| self.tight[f].src == a && self.tight[f].dst == b).collect()
    }

    /// The unique tight arrow with the given composites against the
    /// projections of a designated product, if there is exactly one.
    pub fn pair_tight(&self, cone: &ProductCone, f: Tight, g: Tight) -> Option<Tight> {
        let z = self.tight[f].src;
        let mut found = None;
        for h in self.tight_hom(z, cone.apex) {
            if self.tight_compose(h, cone.proj.0) == Some(f) && self.tight_compose(h, cone.proj.1) == Some(g) {
                if found.is_some() {
                    return None;
                }
                found = Some(h);
            }
        }
        found
    }

    /// Cells with the given top loose arrow.
    pub fn cells_from(&self, top: Loose) -> Vec<CellId> {
        (0..self.cells.len()).filter(|&c| self.cells[c].top == top).collect()
    }

    pub fn pair_cells(&self, cone: &LooseProductCone, a: CellId, b: CellId) -> Option<CellId> {
        let mut found = None;
        for c in self.cells_from(self.cells[a].top) {
            if self.cells[c].bottom != cone.apex {
                continue;
            }
            if self.vcomp(c, cone.proj.0) == Some(a) && self.vcomp(c, cone.proj.1) == Some(b) {
                if found.is_some() {
                    return None;
                }
                found = Some(c);
            }
        }
        found
    }
}

/// Incremental construction of a [`DoubleTheory`]. Adding an object adds its
/// tight and loose identities and their shared identity cell; adding an
/// arrow adds its identity cell.
#[derive(Debug, Clone)]
pub struct TheoryBuilder {
    t: DoubleTheory,
    cell_by_boundary: HashMap<(Tight, Tight, Loose, Loose), Vec<CellId>>,
}

impl TheoryBuilder {
    pub fn new(name: &str) -> Self {
        TheoryBuilder {
            t: DoubleTheory {
                name: name.to_string(),
                objects: Vec::new(),
                tight: Vec::new(),
                tight_id: Vec::new(),
                tight_comp: BTreeMap::new(),
                loose: Vec::new(),
                loose_id: Vec::new(),
                loose_comp: BTreeMap::new(),
                cells: Vec::new(),
                cell_loose_id: Vec::new(),
                cell_tight_id: Vec::new(),
                cell_vcomp: BTreeMap::new(),
                cell_hcomp: BTreeMap::new(),
                partial: false,
                cartesian: None,
            },
            cell_by_boundary: HashMap::new(),
        }
    }

    pub fn theory(&self) -> &DoubleTheory {
        &self.t
    }

    fn push_cell(&mut self, name: String, left: Tight, right: Tight, top: Loose, bottom: Loose) -> CellId {
        let id = self.t.cells.len();
        self.t.cells.push(Cell { name, left, right, top, bottom });
        self.cell_by_boundary.entry((left, right, top, bottom)).or_default().push(id);
        id
    }

    pub fn add_object(&mut self, name: &str) -> Ob {
        let x = self.t.objects.len();
        self.t.objects.push(name.to_string());
        let idname = format!("{ID_PREFIX}{name}");
        let f = self.t.tight.len();
        self.t.tight.push(Arrow { name: idname.clone(), src: x, dst: x });
        self.t.tight_id.push(f);
        let m = self.t.loose.len();
        self.t.loose.push(Arrow { name: idname.clone(), src: x, dst: x });
        self.t.loose_id.push(m);
        let c = self.push_cell(format!("{ID_PREFIX}{idname}"), f, f, m, m);
        self.t.cell_tight_id.push(c);
        self.t.cell_loose_id.push(c);
        x
    }

    pub fn add_tight(&mut self, name: &str, src: Ob, dst: Ob) -> Tight {
        let f = self.t.tight.len();
        self.t.tight.push(Arrow { name: name.to_string(), src, dst });
        let (ms, md) = (self.t.loose_id[src], self.t.loose_id[dst]);
        let c = self.push_cell(format!("{ID_PREFIX}{name}"), f, f, ms, md);
        self.t.cell_tight_id.push(c);
        f
    }

    pub fn add_loose(&mut self, name: &str, src: Ob, dst: Ob) -> Loose {
        let m = self.t.loose.len();
        self.t.loose.push(Arrow { name: name.to_string(), src, dst });
        let (fs, fd) = (self.t.tight_id[src], self.t.tight_id[dst]);
        let c = self.push_cell(format!("{ID_PREFIX}{name}"), fs, fd, m, m);
        self.t.cell_loose_id.push(c);
        m
    }

    pub fn add_cell(&mut self, name: &str, left: Tight, right: Tight, top: Loose, bottom: Loose) -> CellId {
        self.push_cell(name.to_string(), left, right, top, bottom)
    }

    pub fn cell_with_boundary(&self, left: Tight, right: Tight, top: Loose, bottom: Loose) -> Option<CellId> {
        self.cell_by_boundary.get(&(left, right, top, bottom)).and_then(|v| v.first().copied())
    }

    pub fn set_tight_comp(&mut self, f: Tight, g: Tight, h: Tight) {
        self.t.tight_comp.insert((f, g), h);
    }

    pub fn set_loose_comp(&mut self, m: Loose, n: Loose, p: Loose) {
        self.t.loose_comp.insert((m, n), p);
    }

    pub fn set_vcomp(&mut self, a: CellId, b: CellId, c: CellId) {
        self.t.cell_vcomp.insert((a, b), c);
    }

    pub fn set_hcomp(&mut self, a: CellId, b: CellId, c: CellId) {
        self.t.cell_hcomp.insert((a, b), c);
    }

    pub fn set_partial(&mut self, partial: bool) {
        self.t.partial = partial;
    }

    pub fn set_cartesian(&mut self, c: CartesianStructure) {
        self.t.cartesian = Some(c);
    }

    /// Fill in every composite forced by the unit laws and by functoriality
    /// of the identity cells, wherever the needed arrow composites exist.
    pub fn fill_identity_composites(&mut self) {
        let t = &mut self.t;
        for f in 0..t.tight.len() {
            let Arrow { src, dst, .. } = t.tight[f];
            t.tight_comp.insert((t.tight_id[src], f), f);
            t.tight_comp.insert((f, t.tight_id[dst]), f);
        }
        for m in 0..t.loose.len() {
            let Arrow { src, dst, .. } = t.loose[m];
            t.loose_comp.insert((t.loose_id[src], m), m);
            t.loose_comp.insert((m, t.loose_id[dst]), m);
        }
        for a in 0..t.cells.len() {
            let Cell { left, right, top, bottom, .. } = t.cells[a];
            t.cell_vcomp.insert((t.cell_loose_id[top], a), a);
            t.cell_vcomp.insert((a, t.cell_loose_id[bottom]), a);
            t.cell_hcomp.insert((t.cell_tight_id[left], a), a);
            t.cell_hcomp.insert((a, t.cell_tight_id[right]), a);
        }
        let tight_pairs: Vec<_> = t.tight_comp.iter().map(|(&k, &v)| (k, v)).collect();
        for ((f, g), h) in tight_pairs {
            t.cell_vcomp.insert((t.cell_tight_id[f], t.cell_tight_id[g]), t.cell_tight_id[h]);
        }
        let loose_pairs: Vec<_> = t.loose_comp.iter().map(|(&k, &v)| (k, v)).collect();
        for ((m, n), p) in loose_pairs {
            t.cell_hcomp.insert((t.cell_loose_id[m], t.cell_loose_id[n]), t.cell_loose_id[p]);
        }
    }

    /// For theories in which a cell is determined by its boundary, tabulate
    /// both cell compositions by looking up the composite boundary.
    /// Composites whose boundary has no cell are left out, for the
    /// validator to report.
    pub fn fill_thin_cell_composites(&mut self) {
        let n = self.t.cells.len();
        let mut below: HashMap<Loose, Vec<CellId>> = HashMap::new();
        let mut right_of: HashMap<Tight, Vec<CellId>> = HashMap::new();
        for c in 0..n {
            below.entry(self.t.cells[c].top).or_default().push(c);
            right_of.entry(self.t.cells[c].left).or_default().push(c);
        }
        for a in 0..n {
            let ca = self.t.cells[a].clone();
            for &b in below.get(&ca.bottom).map(|v| v.as_slice()).unwrap_or(&[]) {
                let cb = &self.t.cells[b];
                let (Some(l), Some(r)) = (self.t.tight_compose(ca.left, cb.left), self.t.tight_compose(ca.right, cb.right)) else {
                    continue;
                };
                if let Some(c) = self.cell_with_boundary(l, r, ca.top, cb.bottom) {
                    self.t.cell_vcomp.insert((a, b), c);
                }
            }
            for &b in right_of.get(&ca.right).map(|v| v.as_slice()).unwrap_or(&[]) {
                let cb = &self.t.cells[b];
                let (Some(tp), Some(bt)) = (self.t.loose_compose(ca.top, cb.top), self.t.loose_compose(ca.bottom, cb.bottom)) else {
                    continue;
                };
                if let Some(c) = self.cell_with_boundary(ca.left, cb.right, tp, bt) {
                    self.t.cell_hcomp.insert((a, b), c);
                }
            }
        }
    }

    pub fn build(self) -> DoubleTheory {
        self.t
    }
}
