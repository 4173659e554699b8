//! Index tables for the truncated theories whose objects are finite
//! ordinals `0..=k`: `prom_trunc(k)` (monotone loose arrows) and
//! `sq_finset_op(k)` (all functions).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::theory_core::{all_functions, monotone_functions, prom_loose_name, prom_obj, prom_tight_name, sq_loose_name, sq_tight_name, CellId, DoubleTheory, Loose, Ob, Tight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrdinalKind {
    Prom,
    Finset,
}

/// `(a, b, f)` for an arrow between ordinals. Tight shapes store the
/// function `[b] → [a]`; loose shapes store `[a] → [b]`.
pub type Shape = (usize, usize, Vec<usize>);

#[derive(Debug, Clone)]
pub struct Ordinals {
    pub kind: OrdinalKind,
    pub k: usize,
    pub obs: Vec<Ob>,
    pub arity: Vec<usize>,
    pub tight: HashMap<Shape, Tight>,
    pub tight_shape: Vec<Shape>,
    pub loose: HashMap<Shape, Loose>,
    pub loose_shape: Vec<Shape>,
    cells: HashMap<(Tight, Tight, Loose, Loose), CellId>,
}

impl Ordinals {
    pub fn of(t: &DoubleTheory) -> Result<Ordinals> {
        let kind = if t.name.starts_with("prom_trunc(") {
            OrdinalKind::Prom
        } else if t.name.starts_with("sq_finset_op(") {
            OrdinalKind::Finset
        } else {
            return Err(Error::Mismatch(format!("{} is not a truncated ordinal theory", t.name)));
        };
        let k = t.objects.len() - 1;
        let ob_name = |n: usize| if kind == OrdinalKind::Prom { prom_obj(n) } else { n.to_string() };
        let obs: Vec<Ob> = (0..=k).map(|n| t.object(&ob_name(n)).ok_or_else(|| Error::Invalid(format!("missing object {}", ob_name(n))))).collect::<Result<_>>()?;
        let mut arity = vec![0; t.objects.len()];
        for (n, &o) in obs.iter().enumerate() {
            arity[o] = n;
        }
        let is_id = |v: &[usize]| v.iter().enumerate().all(|(i, &x)| i == x);
        let mut tight = HashMap::new();
        let mut tight_shape = vec![(0, 0, Vec::new()); t.tight.len()];
        let mut loose = HashMap::new();
        let mut loose_shape = vec![(0, 0, Vec::new()); t.loose.len()];
        for a in 0..=k {
            for b in 0..=k {
                for psi in all_functions(b, a) {
                    let f = if a == b && is_id(&psi) {
                        t.tight_id[obs[a]]
                    } else {
                        let name = if kind == OrdinalKind::Prom { prom_tight_name(a, b, &psi) } else { sq_tight_name(a, b, &psi) };
                        t.tight_named(&name).ok_or_else(|| Error::Invalid(format!("missing tight arrow {name}")))?
                    };
                    tight_shape[f] = (a, b, psi.clone());
                    tight.insert((a, b, psi), f);
                }
                let maps = if kind == OrdinalKind::Prom { monotone_functions(a, b) } else { all_functions(a, b) };
                for mu in maps {
                    let m = if a == b && is_id(&mu) {
                        t.loose_id[obs[a]]
                    } else {
                        let name = if kind == OrdinalKind::Prom { prom_loose_name(a, b, &mu) } else { sq_loose_name(a, b, &mu) };
                        t.loose_named(&name).ok_or_else(|| Error::Invalid(format!("missing loose arrow {name}")))?
                    };
                    loose_shape[m] = (a, b, mu.clone());
                    loose.insert((a, b, mu), m);
                }
            }
        }
        let cells = t.cells.iter().enumerate().map(|(i, c)| ((c.left, c.right, c.top, c.bottom), i)).collect();
        Ok(Ordinals { kind, k, obs, arity, tight, tight_shape, loose, loose_shape, cells })
    }

    pub fn cell(&self, left: Tight, right: Tight, top: Loose, bottom: Loose) -> Option<CellId> {
        self.cells.get(&(left, right, top, bottom)).copied()
    }

    /// The loose arrow `p_n: x^n ⇸ x`.
    pub fn p(&self, n: usize) -> Loose {
        self.loose[&(n, 1, vec![0; n])]
    }

    /// The projection `x^n → x` onto coordinate `i`.
    pub fn proj(&self, n: usize, i: usize) -> Tight {
        self.tight[&(n, 1, vec![i])]
    }

    /// Positions of `[a]` in the fiber of `u` over `j`, ascending.
    pub fn fiber(u: &[usize], j: usize) -> Vec<usize> {
        (0..u.len()).filter(|&i| u[i] == j).collect()
    }

    /// The cell projecting `u: [a] → [b]` onto its `j`-th component
    /// `p_{n_j}`.
    pub fn component_cell(&self, m: Loose, j: usize) -> CellId {
        let (a, b, u) = &self.loose_shape[m];
        let fib = Self::fiber(u, j);
        let left = self.tight[&(*a, fib.len(), fib.clone())];
        let right = self.tight[&(*b, 1, vec![j])];
        self.cell(left, right, m, self.p(fib.len())).expect("component cell exists")
    }
}
