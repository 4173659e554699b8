use std::collections::HashSet;

use super::{CellId, DoubleTheory};
use crate::report::Report;

/// Check the strict double-category axioms exhaustively.
///
/// For partial theories, totality is only required where the composite
/// boundary is itself tabulated.
pub fn validate_theory(t: &DoubleTheory) -> Report {
    let mut r = Report::new();
    check_names(t, &mut r);
    check_identities(t, &mut r);
    check_tight(t, &mut r);
    check_loose(t, &mut r);
    check_cells(t, &mut r);
    if r.is_ok() {
        check_cartesian(t, &mut r);
    }
    r
}

fn check_names(t: &DoubleTheory, r: &mut Report) {
    let mut dup = |kind: &str, names: Vec<&String>| {
        let mut seen = HashSet::new();
        for n in names {
            if !seen.insert(n) {
                r.push("names.unique", format!("{kind} {n}"), "duplicate name");
            }
        }
    };
    dup("object", t.objects.iter().collect());
    dup("tight", t.tight.iter().map(|a| &a.name).collect());
    dup("loose", t.loose.iter().map(|a| &a.name).collect());
    dup("cell", t.cells.iter().map(|c| &c.name).collect());
}

fn check_identities(t: &DoubleTheory, r: &mut Report) {
    let ok_len = t.tight_id.len() == t.objects.len() && t.loose_id.len() == t.objects.len() && t.cell_loose_id.len() == t.loose.len() && t.cell_tight_id.len() == t.tight.len();
    if !ok_len {
        r.push("identity.missing", "theory", "identity tables have the wrong length");
        return;
    }
    for x in 0..t.objects.len() {
        let f = &t.tight[t.tight_id[x]];
        r.check(f.src == x && f.dst == x, "identity.tight", || t.objects[x].clone(), "identity endpoints differ from the object");
        let m = &t.loose[t.loose_id[x]];
        r.check(m.src == x && m.dst == x, "identity.loose", || t.objects[x].clone(), "loose identity endpoints differ from the object");
        r.check(t.cell_loose_id[t.loose_id[x]] == t.cell_tight_id[t.tight_id[x]], "identity.cell", || t.objects[x].clone(), "1_{id} and id_{1} are different cells");
    }
    for m in 0..t.loose.len() {
        let c = &t.cells[t.cell_loose_id[m]];
        let a = &t.loose[m];
        let ok = c.top == m && c.bottom == m && c.left == t.tight_id[a.src] && c.right == t.tight_id[a.dst];
        r.check(ok, "identity.cell", || a.name.clone(), "vertical identity cell has the wrong boundary");
    }
    for f in 0..t.tight.len() {
        let c = &t.cells[t.cell_tight_id[f]];
        let a = &t.tight[f];
        let ok = c.left == f && c.right == f && c.top == t.loose_id[a.src] && c.bottom == t.loose_id[a.dst];
        r.check(ok, "identity.cell", || a.name.clone(), "horizontal identity cell has the wrong boundary");
    }
}

fn check_tight(t: &DoubleTheory, r: &mut Report) {
    let n = t.tight.len();
    let name = |f: usize| t.tight[f].name.clone();
    for (&(f, g), &h) in &t.tight_comp {
        let ok = t.tight[f].dst == t.tight[g].src && t.tight[h].src == t.tight[f].src && t.tight[h].dst == t.tight[g].dst;
        r.check(ok, "tight.typed", || format!("{}·{}", name(f), name(g)), "composite has the wrong endpoints");
    }
    for f in 0..n {
        let a = &t.tight[f];
        r.check(t.tight_compose(t.tight_id[a.src], f) == Some(f), "tight.unit", || name(f), "left unit law fails");
        r.check(t.tight_compose(f, t.tight_id[a.dst]) == Some(f), "tight.unit", || name(f), "right unit law fails");
        for g in 0..n {
            if t.tight[g].src != a.dst {
                continue;
            }
            let Some(fg) = t.tight_compose(f, g) else {
                r.check(t.partial, "tight.total", || format!("{}·{}", name(f), name(g)), "composite missing");
                continue;
            };
            for h in 0..n {
                if t.tight[h].src != t.tight[g].dst {
                    continue;
                }
                if let (Some(gh), Some(l)) = (t.tight_compose(g, h), t.tight_compose(fg, h)) {
                    r.check(t.tight_compose(f, gh) == Some(l), "tight.assoc", || format!("{}·{}·{}", name(f), name(g), name(h)), "associativity fails");
                }
            }
        }
    }
}

fn check_loose(t: &DoubleTheory, r: &mut Report) {
    let n = t.loose.len();
    let name = |m: usize| t.loose[m].name.clone();
    for (&(m, p), &q) in &t.loose_comp {
        let ok = t.loose[m].dst == t.loose[p].src && t.loose[q].src == t.loose[m].src && t.loose[q].dst == t.loose[p].dst;
        r.check(ok, "loose.typed", || format!("{}⊙{}", name(m), name(p)), "composite has the wrong endpoints");
    }
    for m in 0..n {
        let a = &t.loose[m];
        r.check(t.loose_compose(t.loose_id[a.src], m) == Some(m), "loose.unit", || name(m), "left unit law fails");
        r.check(t.loose_compose(m, t.loose_id[a.dst]) == Some(m), "loose.unit", || name(m), "right unit law fails");
        for p in 0..n {
            if t.loose[p].src != a.dst {
                continue;
            }
            let Some(mp) = t.loose_compose(m, p) else {
                r.check(t.partial, "loose.total", || format!("{}⊙{}", name(m), name(p)), "composite missing");
                continue;
            };
            for q in 0..n {
                if t.loose[q].src != t.loose[p].dst {
                    continue;
                }
                if let (Some(pq), Some(l)) = (t.loose_compose(p, q), t.loose_compose(mp, q)) {
                    r.check(t.loose_compose(m, pq) == Some(l), "loose.assoc", || format!("{}⊙{}⊙{}", name(m), name(p), name(q)), "associativity fails");
                }
            }
        }
    }
}

fn check_cells(t: &DoubleTheory, r: &mut Report) {
    let n = t.cells.len();
    let name = |c: CellId| t.cells[c].name.clone();
    let mut vsucc: Vec<Vec<CellId>> = vec![Vec::new(); t.loose.len()];
    let mut hsucc: Vec<Vec<CellId>> = vec![Vec::new(); t.tight.len()];
    for c in 0..n {
        vsucc[t.cells[c].top].push(c);
        hsucc[t.cells[c].left].push(c);
    }

    // Typing and totality of the two compositions.
    for a in 0..n {
        let ca = &t.cells[a];
        for &b in &vsucc[ca.bottom] {
            let cb = &t.cells[b];
            let at = || format!("{}·{}", name(a), name(b));
            let bl = (t.tight_compose(ca.left, cb.left), t.tight_compose(ca.right, cb.right));
            match (t.vcomp(a, b), bl) {
                (Some(c), (Some(l), Some(rr))) => {
                    let cc = &t.cells[c];
                    let ok = cc.left == l && cc.right == rr && cc.top == ca.top && cc.bottom == cb.bottom;
                    r.check(ok, "cell.vcomp.typed", at, "composite has the wrong boundary");
                }
                (Some(_), _) => r.push("cell.vcomp.typed", at(), "composite tabulated over an untabulated boundary"),
                (None, (Some(_), Some(_))) => r.check(false, "cell.vcomp.total", at, "composite missing"),
                (None, _) => r.check(t.partial, "cell.vcomp.total", at, "composite missing"),
            }
        }
        for &b in &hsucc[ca.right] {
            let cb = &t.cells[b];
            let at = || format!("{}⊙{}", name(a), name(b));
            let bl = (t.loose_compose(ca.top, cb.top), t.loose_compose(ca.bottom, cb.bottom));
            match (t.hcomp(a, b), bl) {
                (Some(c), (Some(tp), Some(bt))) => {
                    let cc = &t.cells[c];
                    let ok = cc.left == ca.left && cc.right == cb.right && cc.top == tp && cc.bottom == bt;
                    r.check(ok, "cell.hcomp.typed", at, "composite has the wrong boundary");
                }
                (Some(_), _) => r.push("cell.hcomp.typed", at(), "composite tabulated over an untabulated boundary"),
                (None, (Some(_), Some(_))) => r.check(false, "cell.hcomp.total", at, "composite missing"),
                (None, _) => r.check(t.partial, "cell.hcomp.total", at, "composite missing"),
            }
        }
    }
    for &(a, b) in t.cell_vcomp.keys() {
        r.check(t.cells[a].bottom == t.cells[b].top, "cell.vcomp.typed", || format!("{}·{}", name(a), name(b)), "cells are not vertically composable");
    }
    for &(a, b) in t.cell_hcomp.keys() {
        r.check(t.cells[a].right == t.cells[b].left, "cell.hcomp.typed", || format!("{}⊙{}", name(a), name(b)), "cells are not horizontally composable");
    }
    if !r.is_ok() {
        return;
    }

    // Unit laws and functoriality of identity cells.
    for a in 0..n {
        let ca = &t.cells[a];
        let ok = t.vcomp(t.cell_loose_id[ca.top], a) == Some(a) && t.vcomp(a, t.cell_loose_id[ca.bottom]) == Some(a);
        r.check(ok, "cell.vunit", || name(a), "vertical unit law fails");
        let ok = t.hcomp(t.cell_tight_id[ca.left], a) == Some(a) && t.hcomp(a, t.cell_tight_id[ca.right]) == Some(a);
        r.check(ok, "cell.hunit", || name(a), "horizontal unit law fails");
    }
    for (&(f, g), &h) in &t.tight_comp {
        let ok = t.vcomp(t.cell_tight_id[f], t.cell_tight_id[g]) == Some(t.cell_tight_id[h]);
        r.check(ok, "cell.identity", || format!("id_{}·id_{}", t.tight[f].name, t.tight[g].name), "identity cells do not compose to the identity of the composite");
    }
    for (&(m, p), &q) in &t.loose_comp {
        let ok = t.hcomp(t.cell_loose_id[m], t.cell_loose_id[p]) == Some(t.cell_loose_id[q]);
        r.check(ok, "cell.identity", || format!("1_{}⊙1_{}", t.loose[m].name, t.loose[p].name), "identity cells do not compose to the identity of the composite");
    }

    // Associativity.
    for (&(a, b), &ab) in &t.cell_vcomp {
        for &c in &vsucc[t.cells[b].bottom] {
            if let (Some(bc), Some(l)) = (t.vcomp(b, c), t.vcomp(ab, c)) {
                r.check(t.vcomp(a, bc) == Some(l), "cell.vassoc", || format!("{}·{}·{}", name(a), name(b), name(c)), "vertical associativity fails");
            }
        }
    }
    for (&(a, b), &ab) in &t.cell_hcomp {
        for &c in &hsucc[t.cells[b].right] {
            if let (Some(bc), Some(l)) = (t.hcomp(b, c), t.hcomp(ab, c)) {
                r.check(t.hcomp(a, bc) == Some(l), "cell.hassoc", || format!("{}⊙{}⊙{}", name(a), name(b), name(c)), "horizontal associativity fails");
            }
        }
    }

    // Interchange: (a·c)⊙(b·d) = (a⊙b)·(c⊙d).
    for (&(a, b), &ab) in &t.cell_hcomp {
        for &c in &vsucc[t.cells[a].bottom] {
            for &d in &vsucc[t.cells[b].bottom] {
                if t.cells[c].right != t.cells[d].left {
                    continue;
                }
                let lhs = t.vcomp(a, c).zip(t.vcomp(b, d)).and_then(|(ac, bd)| t.hcomp(ac, bd));
                let rhs = t.hcomp(c, d).and_then(|cd| t.vcomp(ab, cd));
                if let (Some(l), Some(rr)) = (lhs, rhs) {
                    r.check(l == rr, "cell.interchange", || format!("({} {}; {} {})", name(a), name(b), name(c), name(d)), "interchange law fails");
                }
            }
        }
    }
}

fn check_cartesian(t: &DoubleTheory, r: &mut Report) {
    let Some(cs) = &t.cartesian else { return };
    let nob = t.objects.len();
    for z in 0..nob {
        let k = t.tight_hom(z, cs.terminal).len();
        r.check(k == 1, "cartesian.terminal", || t.objects[z].clone(), "not exactly one tight arrow into the terminal object");
    }
    for (&(d1, d2), cone) in &cs.products {
        let at = || format!("{}×{}", t.objects[d1], t.objects[d2]);
        let (p1, p2) = cone.proj;
        let typed = t.tight[p1].src == cone.apex && t.tight[p2].src == cone.apex && t.tight[p1].dst == d1 && t.tight[p2].dst == d2;
        if !typed {
            r.push("cartesian.product.typed", at(), "projections have the wrong endpoints");
            continue;
        }
        for z in 0..nob {
            let mut seen = HashSet::new();
            let mut ok = true;
            for h in t.tight_hom(z, cone.apex) {
                match (t.tight_compose(h, p1), t.tight_compose(h, p2)) {
                    (Some(a), Some(b)) => ok &= seen.insert((a, b)),
                    _ => ok = false,
                }
            }
            ok &= seen.len() == t.tight_hom(z, d1).len() * t.tight_hom(z, d2).len();
            r.check(ok, "cartesian.product.universal", || format!("{} from {}", at(), t.objects[z]), "pairing is not a bijection");
        }
    }
    let lt = &t.loose[cs.loose_terminal];
    r.check(lt.src == cs.terminal && lt.dst == cs.terminal, "cartesian.loose_terminal.typed", || lt.name.clone(), "terminal loose arrow must be a loop on the terminal object");
    for m in 0..t.loose.len() {
        let k = t.cells_from(m).into_iter().filter(|&c| t.cells[c].bottom == cs.loose_terminal).count();
        r.check(k == 1, "cartesian.loose_terminal", || t.loose[m].name.clone(), "not exactly one cell into the terminal loose arrow");
    }
    for (&(m1, m2), cone) in &cs.loose_products {
        let at = || format!("{}×{}", t.loose[m1].name, t.loose[m2].name);
        let (c1, c2) = cone.proj;
        let typed = t.cells[c1].top == cone.apex && t.cells[c2].top == cone.apex && t.cells[c1].bottom == m1 && t.cells[c2].bottom == m2;
        if !typed {
            r.push("cartesian.loose_product.typed", at(), "projection cells have the wrong boundary");
            continue;
        }
        let src_cone = cs.products.get(&(t.loose[m1].src, t.loose[m2].src));
        let dst_cone = cs.products.get(&(t.loose[m1].dst, t.loose[m2].dst));
        let sides_ok = match (src_cone, dst_cone) {
            (Some(s), Some(d)) => {
                t.loose[cone.apex].src == s.apex
                    && t.loose[cone.apex].dst == d.apex
                    && (t.cells[c1].left, t.cells[c2].left) == s.proj
                    && (t.cells[c1].right, t.cells[c2].right) == d.proj
            }
            _ => false,
        };
        r.check(sides_ok, "cartesian.loose_product.typed", at, "projection cells do not lie over the object projections");
        for m in 0..t.loose.len() {
            let mut seen = HashSet::new();
            let mut ok = true;
            for c in t.cells_from(m).into_iter().filter(|&c| t.cells[c].bottom == cone.apex) {
                match (t.vcomp(c, c1), t.vcomp(c, c2)) {
                    (Some(a), Some(b)) => ok &= seen.insert((a, b)),
                    _ => ok = false,
                }
            }
            let n1 = t.cells_from(m).into_iter().filter(|&c| t.cells[c].bottom == m1).count();
            let n2 = t.cells_from(m).into_iter().filter(|&c| t.cells[c].bottom == m2).count();
            ok &= seen.len() == n1 * n2;
            r.check(ok, "cartesian.loose_product.universal", || format!("{} from {}", at(), t.loose[m].name), "cell pairing is not a bijection");
        }
    }
}
