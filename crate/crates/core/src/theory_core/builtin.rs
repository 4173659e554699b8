use std::collections::{BTreeMap, HashMap};

use super::{CartesianStructure, DoubleTheory, LooseProductCone, ProductCone, TheoryBuilder};

/// The named theories shipped with the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Terminal,
    WalkingLoose,
    WalkingTight,
    WalkingSquare,
    Signed,
    /// Monads with tight powers `t^0..t^k`; longer composites are omitted.
    MonadTrunc(usize),
    /// Promonoids (planar multicategories) on powers `x^0..x^k`.
    PromTrunc(usize),
    /// Tight-opposite commutative squares of skeletal sets of size `≤ k`.
    SqFinsetOp(usize),
}

impl Builtin {
    pub fn name(&self) -> String {
        match self {
            Builtin::Terminal => "terminal".into(),
            Builtin::WalkingLoose => "walking_loose".into(),
            Builtin::WalkingTight => "walking_tight".into(),
            Builtin::WalkingSquare => "walking_square".into(),
            Builtin::Signed => "signed".into(),
            Builtin::MonadTrunc(k) => format!("monad_trunc({k})"),
            Builtin::PromTrunc(k) => format!("prom_trunc({k})"),
            Builtin::SqFinsetOp(k) => format!("sq_finset_op({k})"),
        }
    }

    /// Parse `terminal`, `monad_trunc(2)`, `prom_trunc:2` and the like.
    pub fn parse(s: &str) -> Option<Builtin> {
        let s = s.trim();
        let (head, arg) = match s.find(['(', ':']) {
            Some(i) => {
                let arg = s[i + 1..].trim_end_matches(')').trim();
                (&s[..i], Some(arg.parse::<usize>().ok()?))
            }
            None => (s, None),
        };
        Some(match (head, arg) {
            ("terminal", None) => Builtin::Terminal,
            ("walking_loose", None) => Builtin::WalkingLoose,
            ("walking_tight", None) => Builtin::WalkingTight,
            ("walking_square", None) => Builtin::WalkingSquare,
            ("signed", None) => Builtin::Signed,
            ("monad_trunc", Some(k)) => Builtin::MonadTrunc(k),
            ("prom_trunc", Some(k)) => Builtin::PromTrunc(k),
            ("sq_finset_op", Some(k)) => Builtin::SqFinsetOp(k),
            _ => return None,
        })
    }
}

pub fn builtin_theory(b: Builtin) -> DoubleTheory {
    match b {
        Builtin::Terminal => {
            let mut tb = TheoryBuilder::new(&b.name());
            tb.add_object("x");
            tb.fill_identity_composites();
            tb.build()
        }
        Builtin::WalkingLoose => {
            let mut tb = TheoryBuilder::new(&b.name());
            let s = tb.add_object("⊢");
            let t = tb.add_object("⊣");
            tb.add_loose("ℓ", s, t);
            tb.fill_identity_composites();
            tb.build()
        }
        Builtin::WalkingTight => {
            let mut tb = TheoryBuilder::new(&b.name());
            let s = tb.add_object("⊢");
            let t = tb.add_object("⊣");
            tb.add_tight("f", s, t);
            tb.fill_identity_composites();
            tb.build()
        }
        Builtin::WalkingSquare => {
            let mut tb = TheoryBuilder::new(&b.name());
            let a = tb.add_object("a");
            let bb = tb.add_object("b");
            let c = tb.add_object("c");
            let d = tb.add_object("d");
            let f = tb.add_tight("f", a, c);
            let g = tb.add_tight("g", bb, d);
            let m = tb.add_loose("m", a, bb);
            let n = tb.add_loose("n", c, d);
            tb.add_cell("α", f, g, m, n);
            tb.fill_identity_composites();
            tb.build()
        }
        Builtin::Signed => {
            let mut tb = TheoryBuilder::new(&b.name());
            let x = tb.add_object("x");
            let s = tb.add_loose("σ", x, x);
            let id = tb.theory().loose_id[x];
            tb.set_loose_comp(s, s, id);
            tb.fill_identity_composites();
            tb.build()
        }
        Builtin::MonadTrunc(k) => monad_trunc(k),
        Builtin::PromTrunc(k) => prom_trunc(k),
        Builtin::SqFinsetOp(k) => sq_finset_op(k),
    }
}

/// All functions `[n] → [m]` as value tables, in lexicographic order.
pub(crate) fn all_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for f in &out {
            for v in 0..m {
                let mut g = f.clone();
                g.push(v);
                next.push(g);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn monotone_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    all_functions(n, m).into_iter().filter(|f| f.windows(2).all(|w| w[0] <= w[1])).collect()
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn monad_trunc(k: usize) -> DoubleTheory {
    let mut tb = TheoryBuilder::new(&format!("monad_trunc({k})"));
    let x = tb.add_object("x");
    let mut pow = vec![tb.theory().tight_id[x]];
    for i in 1..=k {
        let name = if i == 1 { "t".to_string() } else { format!("t^{i}") };
        pow.push(tb.add_tight(&name, x, x));
    }
    for i in 0..=k {
        for j in 0..=k - i {
            tb.set_tight_comp(pow[i], pow[j], pow[i + j]);
        }
    }
    tb.set_partial(k >= 1);

    // Globular cells t^i ⇒ t^j are the monotone maps [i] → [j].
    let idm = tb.theory().loose_id[x];
    let mut cell_of: BTreeMap<(usize, usize, Vec<usize>), usize> = BTreeMap::new();
    for i in 0..=k {
        for j in 0..=k {
            for phi in monotone_functions(i, j) {
                let id = if i == j && phi.iter().enumerate().all(|(a, &b)| a == b) {
                    tb.theory().cell_tight_id[pow[i]]
                } else {
                    let name = match (i, j) {
                        (2, 1) => "μ".to_string(),
                        (0, 1) => "η".to_string(),
                        _ => format!("φ{i}{j}[{}]", join(&phi)),
                    };
                    tb.add_cell(&name, pow[i], pow[j], idm, idm)
                };
                cell_of.insert((i, j, phi), id);
            }
        }
    }
    let entries: Vec<_> = cell_of.iter().map(|(k, &v)| (k.clone(), v)).collect();
    for ((i1, j1, p1), a) in &entries {
        for ((i2, j2, p2), b) in &entries {
            // Horizontal: composite of monotone maps.
            if j1 == i2 {
                let comp: Vec<usize> = p1.iter().map(|&v| p2[v]).collect();
                tb.set_hcomp(*a, *b, cell_of[&(*i1, *j2, comp)]);
            }
            // Vertical: ordinal sum, when it stays within the truncation.
            if i1 + i2 <= k && j1 + j2 <= k {
                let mut sum = p1.clone();
                sum.extend(p2.iter().map(|&v| v + j1));
                tb.set_vcomp(*a, *b, cell_of[&(i1 + i2, j1 + j2, sum)]);
            }
        }
    }
    tb.fill_identity_composites();
    tb.build()
}

pub(crate) fn prom_tight_name(a: usize, b: usize, psi: &[usize]) -> String {
    format!("{}→{}⟨{}⟩", prom_obj(a), prom_obj(b), join(psi))
}

pub(crate) fn prom_loose_name(a: usize, b: usize, mu: &[usize]) -> String {
    if b == 1 {
        format!("p{a}")
    } else {
        format!("p[{}]", join(&fiber_sizes(mu, b)))
    }
}

pub(crate) fn sq_tight_name(a: usize, b: usize, s: &[usize]) -> String {
    format!("op({b}→{a}:{})", join(s))
}

pub(crate) fn sq_loose_name(a: usize, b: usize, u: &[usize]) -> String {
    format!("{a}⇸{b}:{}", join(u))
}

pub(crate) fn prom_obj(n: usize) -> String {
    match n {
        0 => "1".into(),
        1 => "x".into(),
        _ => format!("x{n}"),
    }
}

/// Fiber sizes of a monotone map `[a] → [b]`.
fn fiber_sizes(mu: &[usize], b: usize) -> Vec<usize> {
    let mut s = vec![0; b];
    for &v in mu {
        s[v] += 1;
    }
    s
}

fn prom_trunc(k: usize) -> DoubleTheory {
    let mut tb = TheoryBuilder::new(&format!("prom_trunc({k})"));
    let obs: Vec<usize> = (0..=k).map(|n| tb.add_object(&prom_obj(n))).collect();

    // Tight x^a → x^b is a function [b] → [a] picking projections.
    let mut tight: HashMap<(usize, usize, Vec<usize>), usize> = HashMap::new();
    let mut tight_list = Vec::new();
    for a in 0..=k {
        for b in 0..=k {
            for psi in all_functions(b, a) {
                let id =
                    if a == b && psi.iter().enumerate().all(|(i, &v)| i == v) { tb.theory().tight_id[obs[a]] } else { tb.add_tight(&prom_tight_name(a, b, &psi), obs[a], obs[b]) };
                tight.insert((a, b, psi.clone()), id);
                tight_list.push((a, b, psi, id));
            }
        }
    }
    for (a, b, p1, f) in &tight_list {
        for (b2, c, p2, g) in &tight_list {
            if b == b2 {
                let comp: Vec<usize> = p2.iter().map(|&v| p1[v]).collect();
                tb.set_tight_comp(*f, *g, tight[&(*a, *c, comp)]);
            }
        }
    }

    // Loose x^a ⇸ x^b is a monotone map [a] → [b].
    let mut loose: HashMap<(usize, usize, Vec<usize>), usize> = HashMap::new();
    let mut loose_list = Vec::new();
    for a in 0..=k {
        for b in 0..=k {
            for mu in monotone_functions(a, b) {
                let id =
                    if a == b && mu.iter().enumerate().all(|(i, &v)| i == v) { tb.theory().loose_id[obs[a]] } else { tb.add_loose(&prom_loose_name(a, b, &mu), obs[a], obs[b]) };
                loose.insert((a, b, mu.clone()), id);
                loose_list.push((a, b, mu, id));
            }
        }
    }
    for (a, b, m1, m) in &loose_list {
        for (b2, c, m2, n) in &loose_list {
            if b == b2 {
                let comp: Vec<usize> = m1.iter().map(|&v| m2[v]).collect();
                tb.set_loose_comp(*m, *n, loose[&(*a, *c, comp)]);
            }
        }
    }

    // A cell (f, g; m, n) exists, uniquely, when f restricts to an
    // order-preserving bijection from each fiber of n onto the fiber of m
    // over the corresponding point picked by g. Given m, n, g this forces f.
    for (a, b, mu, m) in &loose_list {
        for (a2, b2, nu, n) in &loose_list {
            for psi in all_functions(*b2, *b) {
                let mut phi = vec![usize::MAX; *a2];
                let mut ok = true;
                for j in 0..*b2 {
                    let src: Vec<usize> = (0..*a2).filter(|&i| nu[i] == j).collect();
                    let dst: Vec<usize> = (0..*a).filter(|&i| mu[i] == psi[j]).collect();
                    if src.len() != dst.len() {
                        ok = false;
                        break;
                    }
                    for (s, d) in src.into_iter().zip(dst) {
                        phi[s] = d;
                    }
                }
                if !ok {
                    continue;
                }
                let f = tight[&(*a, *a2, phi)];
                let g = tight[&(*b, *b2, psi.clone())];
                if tb.cell_with_boundary(f, g, *m, *n).is_none() {
                    let name = {
                        let t = tb.theory();
                        format!("⟦{}⇒{}|{}⟧", t.loose[*m].name, t.loose[*n].name, t.tight[g].name)
                    };
                    tb.add_cell(&name, f, g, *m, *n);
                }
            }
        }
    }
    tb.fill_thin_cell_composites();
    tb.fill_identity_composites();

    let proj = |a: usize, b: usize| -> (usize, usize) {
        let p1: Vec<usize> = (0..a).collect();
        let p2: Vec<usize> = (0..b).map(|j| a + j).collect();
        (tight[&(a + b, a, p1)], tight[&(a + b, b, p2)])
    };
    let mut products = BTreeMap::new();
    for a in 0..=k {
        for b in 0..=k - a {
            products.insert((obs[a], obs[b]), ProductCone { apex: obs[a + b], proj: proj(a, b) });
        }
    }
    let mut loose_products = BTreeMap::new();
    for (a1, b1, mu1, m1) in &loose_list {
        for (a2, b2, mu2, m2) in &loose_list {
            if a1 + a2 > k || b1 + b2 > k {
                continue;
            }
            let mut sum = mu1.clone();
            sum.extend(mu2.iter().map(|&v| v + b1));
            let apex = loose[&(a1 + a2, b1 + b2, sum)];
            let (l1, l2) = proj(*a1, *a2);
            let (r1, r2) = proj(*b1, *b2);
            let c1 = tb.cell_with_boundary(l1, r1, apex, *m1).expect("projection cell");
            let c2 = tb.cell_with_boundary(l2, r2, apex, *m2).expect("projection cell");
            loose_products.insert((*m1, *m2), LooseProductCone { apex, proj: (c1, c2) });
        }
    }
    let loose_terminal = tb.theory().loose_id[obs[0]];
    tb.set_cartesian(CartesianStructure { terminal: obs[0], products, loose_terminal, loose_products });
    tb.build()
}

fn sq_finset_op(k: usize) -> DoubleTheory {
    let mut tb = TheoryBuilder::new(&format!("sq_finset_op({k})"));
    let obs: Vec<usize> = (0..=k).map(|n| tb.add_object(&n.to_string())).collect();

    // Tight A → B is a function B → A (tight direction reversed).
    let mut tight: HashMap<(usize, usize, Vec<usize>), usize> = HashMap::new();
    let mut tight_list = Vec::new();
    for a in 0..=k {
        for b in 0..=k {
            for s in all_functions(b, a) {
                let id = if a == b && s.iter().enumerate().all(|(i, &v)| i == v) { tb.theory().tight_id[obs[a]] } else { tb.add_tight(&sq_tight_name(a, b, &s), obs[a], obs[b]) };
                tight.insert((a, b, s.clone()), id);
                tight_list.push((a, b, s, id));
            }
        }
    }
    for (a, b, s1, f) in &tight_list {
        for (b2, c, s2, g) in &tight_list {
            if b == b2 {
                let comp: Vec<usize> = s2.iter().map(|&v| s1[v]).collect();
                tb.set_tight_comp(*f, *g, tight[&(*a, *c, comp)]);
            }
        }
    }

    // Loose A ⇸ B is a function A → B.
    let mut loose: HashMap<(usize, usize, Vec<usize>), usize> = HashMap::new();
    let mut loose_list = Vec::new();
    for a in 0..=k {
        for b in 0..=k {
            for u in all_functions(a, b) {
                let id = if a == b && u.iter().enumerate().all(|(i, &v)| i == v) { tb.theory().loose_id[obs[a]] } else { tb.add_loose(&sq_loose_name(a, b, &u), obs[a], obs[b]) };
                loose.insert((a, b, u.clone()), id);
                loose_list.push((a, b, u, id));
            }
        }
    }
    for (a, b, u1, m) in &loose_list {
        for (b2, c, u2, n) in &loose_list {
            if b == b2 {
                let comp: Vec<usize> = u1.iter().map(|&v| u2[v]).collect();
                tb.set_loose_comp(*m, *n, loose[&(*a, *c, comp)]);
            }
        }
    }

    // Cells: top τ: C ⇸ D, bottom υ: A ⇸ B, left given by φ: A → C,
    // right by ψ: B → D, with τ∘φ = ψ∘υ.
    for (c, d, tau, top) in &loose_list {
        for (a, b, ups, bottom) in &loose_list {
            for phi in all_functions(*a, *c) {
                for psi in all_functions(*b, *d) {
                    if (0..*a).any(|i| tau[phi[i]] != psi[ups[i]]) {
                        continue;
                    }
                    let left = tight[&(*c, *a, phi.clone())];
                    let right = tight[&(*d, *b, psi.clone())];
                    if tb.cell_with_boundary(left, right, *top, *bottom).is_none() {
                        let name = {
                            let t = tb.theory();
                            format!("⟦{}|{}|{}|{}⟧", t.tight[left].name, t.loose[*top].name, t.loose[*bottom].name, t.tight[right].name)
                        };
                        tb.add_cell(&name, left, right, *top, *bottom);
                    }
                }
            }
        }
    }
    tb.fill_thin_cell_composites();
    tb.fill_identity_composites();

    // Products are coproducts of sets; projections are the injections.
    let proj = |a: usize, b: usize| -> (usize, usize) {
        let i1: Vec<usize> = (0..a).collect();
        let i2: Vec<usize> = (0..b).map(|j| a + j).collect();
        (tight[&(a + b, a, i1)], tight[&(a + b, b, i2)])
    };
    let mut products = BTreeMap::new();
    for a in 0..=k {
        for b in 0..=k - a {
            products.insert((obs[a], obs[b]), ProductCone { apex: obs[a + b], proj: proj(a, b) });
        }
    }
    let mut loose_products = BTreeMap::new();
    for (a1, b1, u1, m1) in &loose_list {
        for (a2, b2, u2, m2) in &loose_list {
            if a1 + a2 > k || b1 + b2 > k {
                continue;
            }
            let mut sum = u1.clone();
            sum.extend(u2.iter().map(|&v| v + b1));
            let apex = loose[&(a1 + a2, b1 + b2, sum)];
            let (l1, l2) = proj(*a1, *a2);
            let (r1, r2) = proj(*b1, *b2);
            let c1 = tb.cell_with_boundary(l1, r1, apex, *m1).expect("projection cell");
            let c2 = tb.cell_with_boundary(l2, r2, apex, *m2).expect("projection cell");
            loose_products.insert((*m1, *m2), LooseProductCone { apex, proj: (c1, c2) });
        }
    }
    let loose_terminal = tb.theory().loose_id[obs[0]];
    tb.set_cartesian(CartesianStructure { terminal: obs[0], products, loose_terminal, loose_products });
    tb.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory_core::validate_theory;

    fn count_monotone(n: usize, m: usize) -> usize {
        // C(n + m - 1, n), with the empty map counted once
        if n == 0 {
            return 1;
        }
        if m == 0 {
            return 0;
        }
        let (top, k) = (n + m - 1, n);
        (0..k).fold(1usize, |acc, i| acc * (top - i) / (i + 1))
    }

    #[test]
    fn small_builtins_validate() {
        for b in [Builtin::Terminal, Builtin::WalkingLoose, Builtin::WalkingTight, Builtin::WalkingSquare, Builtin::Signed] {
            let t = builtin_theory(b);
            let r = validate_theory(&t);
            assert!(r.is_ok(), "{}: {r}", b.name());
        }
    }

    #[test]
    fn terminal_counts() {
        let t = builtin_theory(Builtin::Terminal);
        assert_eq!((t.objects.len(), t.tight.len(), t.loose.len(), t.cells.len()), (1, 1, 1, 1));
    }

    #[test]
    fn walking_loose_shape() {
        let t = builtin_theory(Builtin::WalkingLoose);
        assert_eq!(t.objects, vec!["⊢", "⊣"]);
        let nonid: Vec<_> = (0..t.loose.len()).filter(|&m| !t.is_loose_identity(m)).collect();
        assert_eq!(nonid.len(), 1);
        assert_eq!(t.loose[nonid[0]].name, "ℓ");
    }

    #[test]
    fn monad_trunc_cells_are_monotone_maps() {
        for k in 0..=3 {
            let t = builtin_theory(Builtin::MonadTrunc(k));
            let expected: usize = (0..=k).flat_map(|i| (0..=k).map(move |j| count_monotone(i, j))).sum();
            assert_eq!(t.cells.len(), expected, "k = {k}");
            assert_eq!(t.tight.len(), k + 1);
            let r = validate_theory(&t);
            assert!(r.is_ok(), "k = {k}: {r}");
        }
        let t = builtin_theory(Builtin::MonadTrunc(2));
        assert!(t.partial);
        assert!(t.cell_named("μ").is_some() && t.cell_named("η").is_some());
    }

    #[test]
    fn prom_trunc_2_shape() {
        let t = builtin_theory(Builtin::PromTrunc(2));
        assert_eq!(t.objects, vec!["1", "x", "x2"]);
        for p in ["p0", "p2"] {
            assert!(t.loose_named(p).is_some(), "{p}");
        }
        // p1 is the loose identity on x.
        let x = t.object("x").unwrap();
        assert_eq!(t.loose[t.loose_id[x]].name, "id:x");
        // monotone maps [a] → [b], a, b ≤ 2
        assert_eq!(t.loose.len(), 10);
        // functions [b] → [a]: a^b summed
        assert_eq!(t.tight.len(), 11);
        let r = validate_theory(&t);
        assert!(r.is_ok(), "{r}");
        let cs = t.cartesian.as_ref().unwrap();
        assert_eq!(cs.products.len(), 6);
    }

    #[test]
    fn sq_finset_op_validates() {
        let t = builtin_theory(Builtin::SqFinsetOp(2));
        assert_eq!(t.tight.len(), 11);
        assert_eq!(t.loose.len(), 11);
        let r = validate_theory(&t);
        assert!(r.is_ok(), "{r}");
    }

    #[test]
    fn builtin_names_parse() {
        for b in [Builtin::Terminal, Builtin::Signed, Builtin::MonadTrunc(3), Builtin::PromTrunc(2), Builtin::SqFinsetOp(1)] {
            assert_eq!(Builtin::parse(&b.name()), Some(b));
        }
        assert_eq!(Builtin::parse("prom_trunc:2"), Some(Builtin::PromTrunc(2)));
        assert_eq!(Builtin::parse("nope"), None);
    }
}
