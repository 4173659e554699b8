//! Set-valued functors on finite categories, their natural
//! transformations, and the pullback and Kan extensions along functors.

use std::collections::HashMap;
use std::sync::Arc;

use super::{FinCategory, FinFunctor};
use crate::error::{Error, Result};
use crate::finset::{compose, identity, pair_label, FiniteSet, Func};
use crate::report::Report;
use crate::search::Csp;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Copresheaf {
    pub base: Arc<FinCategory>,
    pub sets: Vec<FiniteSet>,
    /// One function per morphism of the base.
    pub maps: Vec<Func>,
}

impl Copresheaf {
    /// Extend generator actions along the representing word of every
    /// morphism. Functoriality still has to be validated.
    pub fn from_generators(base: Arc<FinCategory>, sets: Vec<FiniteSet>, gen_maps: &[Func]) -> Copresheaf {
        let maps = base.morphisms.iter().map(|m| m.word.iter().fold(identity(sets[m.src].len()), |acc, &g| compose(&acc, &gen_maps[g]))).collect();
        Copresheaf { base, sets, maps }
    }

    pub fn empty(base: &Arc<FinCategory>) -> Copresheaf {
        Copresheaf { base: base.clone(), sets: vec![FiniteSet::default(); base.num_objects()], maps: vec![Vec::new(); base.num_morphisms()] }
    }

    /// `Hom(a, -)`, labelled by morphism names.
    pub fn representable(base: &Arc<FinCategory>, a: usize) -> Copresheaf {
        let sets: Vec<FiniteSet> = (0..base.num_objects()).map(|b| FiniteSet::from_labels(base.hom(a, b).iter().map(|&f| base.morphisms[f].name.clone()))).collect();
        let homs: Vec<Vec<usize>> = (0..base.num_objects()).map(|b| base.hom(a, b)).collect();
        let maps = (0..base.num_morphisms())
            .map(|v| {
                let (s, d) = (base.src(v), base.dst(v));
                homs[s].iter().map(|&u| homs[d].iter().position(|&w| Some(w) == base.compose(u, v)).unwrap()).collect()
            })
            .collect();
        Copresheaf { base: base.clone(), sets, maps }
    }

    pub fn size(&self) -> usize {
        self.sets.iter().map(|s| s.len()).sum()
    }

    pub fn validate(&self) -> Report {
        let c = &*self.base;
        let mut r = Report::new();
        if self.sets.len() != c.num_objects() || self.maps.len() != c.num_morphisms() {
            r.push("copresheaf.shape", "", "tables do not match the base category");
            return r;
        }
        for f in 0..c.num_morphisms() {
            let ok = self.maps[f].len() == self.sets[c.src(f)].len() && self.maps[f].iter().all(|&v| v < self.sets[c.dst(f)].len());
            r.check(ok, "copresheaf.typed", || c.morphisms[f].name.clone(), "function has the wrong domain or codomain");
        }
        if !r.is_ok() {
            return r;
        }
        for a in 0..c.num_objects() {
            let ok = self.maps[c.identities[a]] == identity(self.sets[a].len());
            r.check(ok, "copresheaf.identity", || c.objects[a].clone(), "identity does not act trivially");
        }
        for (f, g, fg) in c.composable_pairs() {
            r.check(
                compose(&self.maps[f], &self.maps[g]) == self.maps[fg],
                "copresheaf.functor",
                || format!("{},{}", c.morphisms[f].name, c.morphisms[g].name),
                "composite does not act as the composite function",
            );
        }
        r
    }

    /// `P∘F` for `F: C → D`.
    pub fn pullback(&self, f: &FinFunctor) -> Result<Copresheaf> {
        if *f.target != *self.base {
            return Err(Error::Mismatch("copresheaf is not over the functor's target".into()));
        }
        Ok(Copresheaf {
            base: f.source.clone(),
            sets: f.on_objects.iter().map(|&d| self.sets[d].clone()).collect(),
            maps: f.on_morphisms.iter().map(|&g| self.maps[g].clone()).collect(),
        })
    }

    /// Pointwise left Kan extension along `F: C → D`: at `d`, pairs
    /// `(p ∈ P c, u: F c → d)` modulo the zig-zags of the comma category.
    pub fn lan(&self, f: &FinFunctor) -> Result<Copresheaf> {
        if *f.source != *self.base {
            return Err(Error::Mismatch("copresheaf is not over the functor's source".into()));
        }
        let (c, d) = (&*f.source, &*f.target);
        let mut sets = Vec::with_capacity(d.num_objects());
        let mut classes: Vec<HashMap<(usize, usize, usize), usize>> = Vec::with_capacity(d.num_objects());
        for b in 0..d.num_objects() {
            // Elements (c, p, u) with u: F c → b.
            let mut elems = Vec::new();
            for a in 0..c.num_objects() {
                for u in d.hom(f.on_objects[a], b) {
                    for p in 0..self.sets[a].len() {
                        elems.push((a, p, u));
                    }
                }
            }
            let index: HashMap<(usize, usize, usize), usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
            let mut uf = UnionFind::new(elems.len());
            for a in 0..c.num_objects() {
                for &g in c.out_of(a) {
                    // (a, p, F g · u) ~ (a', P g p, u) for u: F a' → b.
                    let a2 = c.dst(g);
                    for u in d.hom(f.on_objects[a2], b) {
                        let w = d.compose(f.on_morphisms[g], u).unwrap();
                        for p in 0..self.sets[a].len() {
                            uf.union(index[&(a, p, w)], index[&(a2, self.maps[g][p], u)]);
                        }
                    }
                }
            }
            let (labels, class_of) = quotient_labels(&mut uf, elems.len(), |i| {
                let (a, p, u) = elems[i];
                pair_label(self.sets[a].label(p), &d.morphisms[u].name)
            });
            let set = FiniteSet::new(labels).or_else(|_| {
                let reps = quotient_labels(&mut uf, elems.len(), |i| {
                    let (a, p, u) = elems[i];
                    pair_label(&format!("{}:{}", c.objects[a], self.sets[a].label(p)), &d.morphisms[u].name)
                });
                FiniteSet::new(reps.0)
            })?;
            sets.push(set);
            classes.push(elems.iter().enumerate().map(|(i, &e)| (e, class_of[i])).collect());
        }
        let maps = (0..d.num_morphisms())
            .map(|v| {
                let (s, t) = (d.src(v), d.dst(v));
                let mut out = vec![usize::MAX; sets[s].len()];
                for (&(a, p, u), &k) in &classes[s] {
                    out[k] = classes[t][&(a, p, d.compose(u, v).unwrap())];
                }
                out
            })
            .collect();
        Ok(Copresheaf { base: f.target.clone(), sets, maps })
    }

    /// Pointwise right Kan extension along `F: C → D`: at `d`, families
    /// `x_{(c, u: d → F c)} ∈ P c` compatible along the comma category.
    pub fn ran(&self, f: &FinFunctor, limit: usize) -> Result<Copresheaf> {
        if *f.source != *self.base {
            return Err(Error::Mismatch("copresheaf is not over the functor's source".into()));
        }
        let (c, d) = (&*f.source, &*f.target);
        let mut indices: Vec<Vec<(usize, usize)>> = Vec::with_capacity(d.num_objects());
        let mut families: Vec<Vec<Vec<usize>>> = Vec::with_capacity(d.num_objects());
        let mut sets = Vec::with_capacity(d.num_objects());
        for b in 0..d.num_objects() {
            let idx: Vec<(usize, usize)> = (0..c.num_objects()).flat_map(|a| d.hom(b, f.on_objects[a]).into_iter().map(move |u| (a, u))).collect();
            let pos: HashMap<(usize, usize), usize> = idx.iter().enumerate().map(|(i, &k)| (k, i)).collect();
            let mut csp = Csp::new();
            for &(a, _) in &idx {
                csp.var_range(self.sets[a].len());
            }
            for (i, &(a, u)) in idx.iter().enumerate() {
                for &g in c.out_of(a) {
                    let j = pos[&(c.dst(g), d.compose(u, f.on_morphisms[g]).unwrap())];
                    let pg = &self.maps[g];
                    csp.constrain(&[i, j], move |s| pg[s[i]] == s[j]);
                }
            }
            let fams = if idx.is_empty() { vec![Vec::new()] } else { csp.all(limit)? };
            let labels = fams.iter().map(|x| {
                let parts: Vec<&str> = x.iter().zip(&idx).map(|(&v, &(a, _))| self.sets[a].label(v)).collect();
                format!("{{{}}}", parts.join(","))
            });
            let set = FiniteSet::new(labels).unwrap_or_else(|_| FiniteSet::range(fams.len()));
            sets.push(set);
            indices.push(idx);
            families.push(fams);
        }
        let lookup: Vec<HashMap<Vec<usize>, usize>> = families.iter().map(|fs| fs.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect()).collect();
        let maps = (0..d.num_morphisms())
            .map(|v| {
                let (s, t) = (d.src(v), d.dst(v));
                let pos_s: HashMap<(usize, usize), usize> = indices[s].iter().enumerate().map(|(i, &k)| (k, i)).collect();
                families[s]
                    .iter()
                    .map(|x| {
                        let y: Vec<usize> = indices[t].iter().map(|&(a, u)| x[pos_s[&(a, d.compose(v, u).unwrap())]]).collect();
                        lookup[t][&y]
                    })
                    .collect()
            })
            .collect();
        Ok(Copresheaf { base: f.target.clone(), sets, maps })
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merge, keeping the smaller root. Returns whether anything changed.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi] = lo;
        true
    }
}

/// Number the classes by least member and label each by that member.
fn quotient_labels(uf: &mut UnionFind, n: usize, label: impl Fn(usize) -> String) -> (Vec<String>, Vec<usize>) {
    let mut class_of = vec![usize::MAX; n];
    let mut root_class = HashMap::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let r = uf.find(i);
        let k = *root_class.entry(r).or_insert_with(|| {
            labels.push(label(r));
            labels.len() - 1
        });
        class_of[i] = k;
    }
    (labels, class_of)
}

/// Natural transformations `p ⇒ q`, as per-object component tables.
pub fn enumerate_natural_transformations(p: &Copresheaf, q: &Copresheaf, limit: usize) -> Result<Vec<Vec<Func>>> {
    let mut out = Vec::new();
    solve_natural_transformations(p, q, false, limit, |x| {
        out.push(x);
        true
    })?;
    Ok(out)
}

pub fn find_copresheaf_isomorphism(p: &Copresheaf, q: &Copresheaf) -> Option<Vec<Func>> {
    if p.sets.iter().zip(&q.sets).any(|(a, b)| a.len() != b.len()) {
        return None;
    }
    let mut found = None;
    solve_natural_transformations(p, q, true, usize::MAX, |x| {
        found = Some(x);
        false
    })
    .ok()?;
    found
}

fn solve_natural_transformations(p: &Copresheaf, q: &Copresheaf, injective: bool, limit: usize, mut visit: impl FnMut(Vec<Func>) -> bool) -> Result<usize> {
    if *p.base != *q.base {
        return Err(Error::Mismatch("copresheaves over different categories".into()));
    }
    let c = &*p.base;
    let mut csp = Csp::new();
    let vars: Vec<Vec<usize>> = (0..c.num_objects()).map(|a| (0..p.sets[a].len()).map(|_| csp.var_range(q.sets[a].len())).collect()).collect();
    for f in 0..c.num_morphisms() {
        if c.is_identity(f) {
            continue;
        }
        let (s, t) = (c.src(f), c.dst(f));
        for e in 0..p.sets[s].len() {
            let (ve, vf) = (vars[s][e], vars[t][p.maps[f][e]]);
            let qf = &q.maps[f];
            csp.constrain(&[ve, vf], move |a| qf[a[ve]] == a[vf]);
        }
    }
    if injective {
        for vs in &vars {
            for i in 0..vs.len() {
                for j in 0..i {
                    let (vi, vj) = (vs[i], vs[j]);
                    csp.constrain(&[vi, vj], move |a| a[vi] != a[vj]);
                }
            }
        }
    }
    csp.solve(limit, |a| visit(vars.iter().map(|vs| vs.iter().map(|&v| a[v]).collect()).collect()))
}

/// A copresheaf given by generators `g ∈ P(a_g)` and relations
/// `g·u = g'·u'` between their images under morphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentedCopresheaf {
    pub base: Arc<FinCategory>,
    pub generators: Vec<(usize, String)>,
    /// `((g, u), (g', u'))` with `u` out of `a_g` and `u'` out of `a_g'`
    /// sharing a target.
    pub relations: Vec<((usize, usize), (usize, usize))>,
}

impl PresentedCopresheaf {
    /// Quotient the coproduct of representables by the congruence
    /// generated by the relations. Also returns the class of each
    /// generator.
    pub fn evaluate(&self) -> Result<(Copresheaf, Vec<usize>)> {
        let c = &*self.base;
        // Elements (g, u) grouped by target object.
        let mut elems: Vec<Vec<(usize, usize)>> = vec![Vec::new(); c.num_objects()];
        let mut index: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (g, &(a, _)) in self.generators.iter().enumerate() {
            for &u in c.out_of(a) {
                let b = c.dst(u);
                index.insert((g, u), (b, elems[b].len()));
                elems[b].push((g, u));
            }
        }
        let flat: Vec<(usize, usize)> = elems.iter().flatten().copied().collect();
        let offset: Vec<usize> = elems
            .iter()
            .scan(0, |acc, v| {
                let o = *acc;
                *acc += v.len();
                Some(o)
            })
            .collect();
        let id_of = |k: (usize, usize)| -> usize {
            let (b, i) = index[&k];
            offset[b] + i
        };
        let mut uf = UnionFind::new(flat.len());
        let mut queue: Vec<(usize, usize)> = Vec::new();
        for &((g, u), (h, v)) in &self.relations {
            let (Some(&(b1, _)), Some(&(b2, _))) = (index.get(&(g, u)), index.get(&(h, v))) else {
                return Err(Error::Invalid("relation mentions a morphism out of the wrong object".into()));
            };
            if b1 != b2 {
                return Err(Error::Invalid("relation sides have different targets".into()));
            }
            queue.push((id_of((g, u)), id_of((h, v))));
        }
        while let Some((x, y)) = queue.pop() {
            if !uf.union(x, y) {
                continue;
            }
            let ((g, u), (h, v)) = (flat[x], flat[y]);
            for &w in c.out_of(c.dst(u)) {
                queue.push((id_of((g, c.compose(u, w).unwrap())), id_of((h, c.compose(v, w).unwrap()))));
            }
        }
        let mut sets = Vec::with_capacity(c.num_objects());
        let mut class_of = vec![0; flat.len()];
        for b in 0..c.num_objects() {
            let mut labels = Vec::new();
            let mut seen: HashMap<usize, usize> = HashMap::new();
            for i in offset[b]..offset[b] + elems[b].len() {
                let r = uf.find(i);
                let k = *seen.entry(r).or_insert_with(|| {
                    let (g, u) = flat[r];
                    let name = &self.generators[g].1;
                    labels.push(if c.is_identity(u) { name.clone() } else { format!("{name}·{}", c.morphisms[u].name) });
                    labels.len() - 1
                });
                class_of[i] = k;
            }
            sets.push(FiniteSet::new(labels)?);
        }
        let maps = (0..c.num_morphisms())
            .map(|w| {
                let (s, _) = (c.src(w), c.dst(w));
                let mut out = vec![0; sets[s].len()];
                for i in offset[s]..offset[s] + elems[s].len() {
                    let (g, u) = flat[i];
                    out[class_of[i]] = class_of[id_of((g, c.compose(u, w).unwrap()))];
                }
                out
            })
            .collect();
        let gens = self.generators.iter().enumerate().map(|(g, &(a, _))| class_of[id_of((g, c.identities[a]))]).collect();
        Ok((Copresheaf { base: self.base.clone(), sets, maps }, gens))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collage::enumerate_functors;

    /// `a → b`.
    fn arrow() -> Arc<FinCategory> {
        Arc::new(FinCategory::from_table(vec!["a".into(), "b".into()], vec![("id:a".into(), 0, 0), ("id:b".into(), 1, 1), ("u".into(), 0, 1)], vec![0, 1], |f, g| {
            if f == 2 || g == 2 {
                2
            } else {
                f
            }
        }))
    }

    fn point() -> Arc<FinCategory> {
        Arc::new(FinCategory::from_table(vec!["*".into()], vec![("id:*".into(), 0, 0)], vec![0], |_, _| 0))
    }

    fn arrow_set(pa: &[&str], pb: &[&str], pu: Func) -> Copresheaf {
        let c = arrow();
        Copresheaf {
            base: c,
            sets: vec![FiniteSet::from_labels(pa.iter().copied()), FiniteSet::from_labels(pb.iter().copied())],
            maps: vec![identity(pa.len()), identity(pb.len()), pu],
        }
    }

    #[test]
    fn representables_validate() {
        let c = arrow();
        for a in 0..2 {
            assert!(Copresheaf::representable(&c, a).validate().is_ok());
        }
        assert_eq!(Copresheaf::representable(&c, 0).sets[1].labels(), ["u"]);
    }

    #[test]
    fn kan_extensions_to_a_point() {
        // Along C → 1, Lan is the colimit (connected components of the
        // category of elements) and Ran is the limit (global sections).
        let p = arrow_set(&["x", "y", "z"], &["r", "s"], vec![0, 0, 1]);
        assert!(p.validate().is_ok());
        let fs = enumerate_functors(&p.base, &point(), 10).unwrap();
        let bang = &fs[0];
        let lan = p.lan(bang).unwrap();
        assert!(lan.validate().is_ok());
        assert_eq!(lan.sets[0].len(), 2);
        let ran = p.ran(bang, 100).unwrap();
        assert!(ran.validate().is_ok());
        // Sections pick x_a and its image; one for each element of P a.
        assert_eq!(ran.sets[0].len(), 3);
    }

    #[test]
    fn pullback_then_lan_along_identity() {
        let p = arrow_set(&["x"], &["r", "s"], vec![1]);
        let id = FinFunctor::identity(&p.base);
        assert_eq!(p.pullback(&id).unwrap(), p);
        let lan = p.lan(&id).unwrap();
        assert!(find_copresheaf_isomorphism(&lan, &p).is_some());
        let ran = p.ran(&id, 100).unwrap();
        assert!(find_copresheaf_isomorphism(&ran, &p).is_some());
    }

    #[test]
    fn natural_transformation_counts() {
        let p = arrow_set(&["x", "y"], &["r"], vec![0, 0]);
        let q = arrow_set(&["x", "y"], &["r", "s"], vec![0, 1]);
        let n = enumerate_natural_transformations(&p, &q, 100).unwrap();
        let brute = (0..2usize.pow(2) * 2)
            .filter(|code| {
                let (x, y, r) = (code & 1, (code >> 1) & 1, (code >> 2) & 1);
                q.maps[2][x] == r && q.maps[2][y] == r
            })
            .count();
        assert_eq!(n.len(), brute);
    }

    #[test]
    fn presented_copresheaf_is_representable_quotient() {
        let c = arrow();
        // One generator at a, free: the representable Hom(a, -).
        let free = PresentedCopresheaf { base: c.clone(), generators: vec![(0, "g".into())], relations: vec![] };
        let (p, gens) = free.evaluate().unwrap();
        assert!(p.validate().is_ok());
        assert!(find_copresheaf_isomorphism(&p, &Copresheaf::representable(&c, 0)).is_some());
        assert_eq!(gens, vec![0]);
        // Two generators at a identified after u.
        let glued = PresentedCopresheaf { base: c.clone(), generators: vec![(0, "g".into()), (0, "h".into())], relations: vec![((0, 2), (1, 2))] };
        let (p, _) = glued.evaluate().unwrap();
        assert!(p.validate().is_ok());
        assert_eq!(p.sets[0].len(), 2);
        assert_eq!(p.sets[1].labels(), ["g·u"]);
    }
}
