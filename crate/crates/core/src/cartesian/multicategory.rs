//! Multicategories (planar, optionally with σ-actions for the cocartesian
//! case) as cartesian models of the truncated ordinal theories, and their
//! set-valued multifunctors as instances.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::ordinals::{OrdinalKind, Ordinals};
use crate::error::{Error, Result};
use crate::finset::{pair_label, FiniteSet, Func};
use crate::instance::Instance;
use crate::report::Report;
use crate::span_model::{SpanModel, SpanOfSets};
use crate::theory_core::{all_functions, DoubleTheory};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multimorphism {
    pub name: String,
    pub dom: Vec<usize>,
    pub cod: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Multicategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<Multimorphism>,
    pub identities: Vec<usize>,
    /// `f ∘_i g`: `g` substituted into input `i` of `f`.
    pub partial: BTreeMap<(usize, usize, usize), usize>,
    /// `f·s` for `s: [m] → [arity f]`, with inputs `dom f ∘ s`. Empty for
    /// plain multicategories.
    pub sigma: BTreeMap<(usize, Vec<usize>), usize>,
}

fn is_identity_map(s: &[usize], n: usize) -> bool {
    s.len() == n && s.iter().enumerate().all(|(i, &v)| i == v)
}

impl Multicategory {
    pub fn arity(&self, f: usize) -> usize {
        self.morphisms[f].dom.len()
    }

    pub fn max_arity(&self) -> usize {
        self.morphisms.iter().map(|m| m.dom.len()).max().unwrap_or(0)
    }

    pub fn morphism_named(&self, name: &str) -> Option<usize> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    fn is_identity(&self, g: usize) -> bool {
        self.identities.contains(&g)
    }

    /// `f(g_0, ..., g_{n-1})`. Nullary arguments go in first so that no
    /// intermediate composite is wider than the inputs or the result.
    pub fn compose_full(&self, f: usize, gs: &[usize]) -> Option<usize> {
        if gs.len() != self.arity(f) {
            return None;
        }
        let mut cur = f;
        let nullary: Vec<usize> = (0..gs.len()).filter(|&i| self.arity(gs[i]) == 0).collect();
        for &i in nullary.iter().rev() {
            cur = *self.partial.get(&(cur, i, gs[i]))?;
        }
        for i in (0..gs.len()).rev() {
            if self.arity(gs[i]) == 0 || self.is_identity(gs[i]) {
                continue;
            }
            let shift = nullary.iter().filter(|&&j| j < i).count();
            cur = *self.partial.get(&(cur, i - shift, gs[i]))?;
        }
        Some(cur)
    }

    /// `f·s`, with `f·id = f`.
    pub fn act(&self, f: usize, s: &[usize]) -> Option<usize> {
        if is_identity_map(s, self.arity(f)) {
            return Some(f);
        }
        self.sigma.get(&(f, s.to_vec())).copied()
    }

    /// Typing, totality within arity `k`, unit and associativity laws,
    /// and functoriality of σ-actions when present.
    pub fn validate(&self, k: usize) -> Report {
        let mut r = Report::new();
        let no = self.objects.len();
        let name = |f: usize| self.morphisms[f].name.clone();
        for (f, m) in self.morphisms.iter().enumerate() {
            r.check(m.cod < no && m.dom.iter().all(|&o| o < no), "multicategory.typed", || name(f), "unknown object");
            if m.dom.len() > k {
                r.push("multicategory.arity", name(f), format!("arity {} exceeds {k}", m.dom.len()));
            }
        }
        if self.identities.len() != no {
            r.push("multicategory.identity", "", "one identity per object is required");
        }
        if !r.is_ok() {
            return r;
        }
        for (o, &i) in self.identities.iter().enumerate() {
            let ok = i < self.morphisms.len() && self.morphisms[i].dom == vec![o] && self.morphisms[i].cod == o;
            r.check(ok, "multicategory.identity", || self.objects[o].clone(), "identity is not unary on its object");
        }
        if !r.is_ok() {
            return r;
        }
        let nm = self.morphisms.len();
        for f in 0..nm {
            for i in 0..self.arity(f) {
                for g in 0..nm {
                    if self.morphisms[g].cod != self.morphisms[f].dom[i] {
                        continue;
                    }
                    let width = self.arity(f) + self.arity(g) - 1;
                    match self.partial.get(&(f, i, g)) {
                        None if width <= k => r.push("multicategory.total", format!("{}∘{i}{}", name(f), name(g)), "composite missing"),
                        None => {}
                        Some(&h) => {
                            let mut dom = self.morphisms[f].dom.clone();
                            dom.splice(i..=i, self.morphisms[g].dom.iter().copied());
                            let ok = h < nm && self.morphisms[h].dom == dom && self.morphisms[h].cod == self.morphisms[f].cod;
                            r.check(ok, "multicategory.typed", || format!("{}∘{i}{}", name(f), name(g)), "composite has the wrong type");
                        }
                    }
                }
            }
        }
        if !r.is_ok() {
            return r;
        }
        for f in 0..nm {
            let cod = self.morphisms[f].cod;
            r.check(self.partial.get(&(self.identities[cod], 0, f)) == Some(&f), "multicategory.unit", || name(f), "id∘f ≠ f");
            for (i, &o) in self.morphisms[f].dom.iter().enumerate() {
                r.check(self.partial.get(&(f, i, self.identities[o])) == Some(&f), "multicategory.unit", || name(f), "f∘id ≠ f");
            }
        }
        let comp = |f: usize, i: usize, g: usize| self.partial.get(&(f, i, g)).copied();
        for (&(f, i, g), &fg) in &self.partial {
            // Sequential: (f∘_i g)∘_{i+j} h = f∘_i (g∘_j h).
            for j in 0..self.arity(g) {
                for h in 0..nm {
                    if let (Some(a), Some(gh)) = (comp(fg, i + j, h), comp(g, j, h)) {
                        r.check(comp(f, i, gh) == Some(a), "multicategory.assoc", || format!("{},{},{}", name(f), name(g), name(h)), "sequential associativity fails");
                    }
                }
            }
            // Parallel: (f∘_i g)∘_{j'} h = (f∘_j h)∘_i g for i < j.
            for j in i + 1..self.arity(f) {
                for h in 0..nm {
                    let shifted = j + self.arity(g) - 1;
                    if let (Some(a), Some(fh)) = (comp(fg, shifted, h), comp(f, j, h)) {
                        if let Some(b) = comp(fh, i, g) {
                            r.check(a == b, "multicategory.assoc", || format!("{},{},{}", name(f), name(g), name(h)), "parallel associativity fails");
                        }
                    }
                }
            }
        }
        if !self.sigma.is_empty() {
            for f in 0..nm {
                let n = self.arity(f);
                for m in 0..=k {
                    for s in all_functions(m, n) {
                        match self.act(f, &s) {
                            None => r.push("multicategory.sigma.total", format!("{}·[{}]", name(f), join(&s)), "σ-action missing"),
                            Some(g) => {
                                let dom: Vec<usize> = s.iter().map(|&i| self.morphisms[f].dom[i]).collect();
                                let ok = self.morphisms[g].dom == dom && self.morphisms[g].cod == self.morphisms[f].cod;
                                r.check(ok, "multicategory.sigma.typed", || format!("{}·[{}]", name(f), join(&s)), "σ-action has the wrong type");
                            }
                        }
                    }
                }
            }
            if !r.is_ok() {
                return r;
            }
            for (&(f, ref s), &fs) in &self.sigma {
                for l in 0..=k {
                    for t in all_functions(l, s.len()) {
                        let st: Vec<usize> = t.iter().map(|&i| s[i]).collect();
                        r.check(self.act(fs, &t) == self.act(f, &st), "multicategory.sigma.functor", || format!("{}·[{}]·[{}]", name(f), join(s), join(&t)), "(f·s)·t ≠ f·(s∘t)");
                    }
                }
            }
        }
        r
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// One object and one operation of each arity `0..=k`, with every
/// composite and σ-action forced.
pub fn terminal_multicategory(k: usize, cocartesian: bool) -> Multicategory {
    let mut mc = Multicategory { objects: vec!["*".into()], ..Default::default() };
    for n in 0..=k {
        mc.morphisms.push(Multimorphism { name: format!("μ{n}"), dom: vec![0; n], cod: 0 });
    }
    mc.identities = vec![1.min(k)];
    for n in 0..=k {
        for i in 0..n {
            for m in 0..=k {
                if n + m - 1 <= k {
                    mc.partial.insert((n, i, m), n + m - 1);
                }
            }
        }
        if cocartesian {
            for m in 0..=k {
                for s in all_functions(m, n) {
                    if !is_identity_map(&s, n) {
                        mc.sigma.insert((n, s), m);
                    }
                }
            }
        }
    }
    mc
}

/// One object; the `n`-ary operations are the sums `Σ c_i x_i` over Z/2,
/// named by their coefficient strings. With `cocartesian`, `c·s` has
/// coefficients `c ∘ s`.
pub fn parity_multicategory(k: usize, cocartesian: bool) -> Multicategory {
    let mut mc = Multicategory { objects: vec!["*".into()], ..Default::default() };
    let mut index = HashMap::new();
    for n in 0..=k {
        for c in tuples(&vec![2; n]) {
            index.insert(c.clone(), mc.morphisms.len());
            mc.morphisms.push(Multimorphism { name: format!("c{}", c.iter().map(|b| b.to_string()).collect::<String>()), dom: vec![0; n], cod: 0 });
        }
    }
    mc.identities = vec![index[&vec![1]]];
    let ops: Vec<(Vec<usize>, usize)> = index.iter().map(|(c, &f)| (c.clone(), f)).collect();
    for (c, f) in &ops {
        for (d, g) in &ops {
            if c.len() + d.len() > k + 1 {
                continue;
            }
            for i in 0..c.len() {
                let mut e = c[..i].to_vec();
                e.extend(d.iter().map(|&b| b * c[i]));
                e.extend_from_slice(&c[i + 1..]);
                mc.partial.insert((*f, i, *g), index[&e]);
            }
        }
        if cocartesian {
            for m in 0..=k {
                for s in all_functions(m, c.len()) {
                    if !is_identity_map(&s, c.len()) {
                        mc.sigma.insert((*f, s.clone()), index[&s.iter().map(|&i| c[i]).collect::<Vec<_>>()]);
                    }
                }
            }
        }
    }
    mc
}

/// One object, the identity and a binary operation `m`; with `unit`, also
/// a constant `e` with `m ∘_0 e = m ∘_1 e = id`. Composites of arity above
/// two are left out.
pub fn binary_multicategory(unit: bool) -> Multicategory {
    let mut mc = Multicategory { objects: vec!["*".into()], ..Default::default() };
    let ops: &[(&str, usize)] = if unit { &[("e", 0), ("id", 1), ("m", 2)] } else { &[("id", 1), ("m", 2)] };
    for &(name, n) in ops {
        mc.morphisms.push(Multimorphism { name: name.into(), dom: vec![0; n], cod: 0 });
    }
    let id = mc.morphism_named("id").expect("listed");
    mc.identities = vec![id];
    for f in 0..mc.morphisms.len() {
        mc.partial.insert((id, 0, f), f);
        for i in 0..mc.arity(f) {
            mc.partial.insert((f, i, id), f);
        }
    }
    if unit {
        let (e, m) = (mc.morphism_named("e").expect("listed"), mc.morphism_named("m").expect("listed"));
        mc.partial.insert((m, 0, e), id);
        mc.partial.insert((m, 1, e), id);
    }
    mc
}

/// Lexicographic product of `0..sizes[i]`.
pub(crate) fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        let mut next = Vec::with_capacity(out.len() * n);
        for t in &out {
            for v in 0..n {
                let mut u = t.clone();
                u.push(v);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

fn tuple_label(parts: &[&str]) -> String {
    if parts.len() == 1 {
        parts[0].to_string()
    } else {
        format!("⟨{}⟩", parts.join(","))
    }
}

/// The cartesian model of a truncated ordinal theory presented by `mc`:
/// `X(x^n) = O^n`, and `X(u)` for `u: [a] → [b]` the `b`-tuples of
/// multimorphisms whose inputs follow the fibers of `u`.
pub fn multicategory_to_model(mc: &Multicategory, t: &Arc<DoubleTheory>) -> Result<SpanModel> {
    let ords = Ordinals::of(t)?;
    let k = ords.k;
    if mc.max_arity() > k {
        return Err(Error::ArityOverflow { arity: mc.max_arity(), bound: k });
    }
    let r = mc.validate(k);
    if !r.is_ok() {
        return Err(Error::Invalid(format!("not a multicategory:\n{r}")));
    }
    if ords.kind == OrdinalKind::Finset && mc.sigma.is_empty() && !mc.morphisms.is_empty() {
        return Err(Error::Invalid("sq_finset_op models need σ-actions".into()));
    }
    let no = mc.objects.len();
    let ob_index = |x: &[usize]| x.iter().fold(0, |acc, &o| acc * no + o);
    let mut on_objects = vec![FiniteSet::default(); t.objects.len()];
    for n in 0..=k {
        let labels = tuples(&vec![no; n]).into_iter().map(|x| tuple_label(&x.iter().map(|&o| mc.objects[o].as_str()).collect::<Vec<_>>()));
        on_objects[ords.obs[n]] = FiniteSet::new(labels)?;
    }
    let on_tight = ords.tight_shape.iter().map(|(a, _, psi)| tuples(&vec![no; *a]).iter().map(|x| ob_index(&psi.iter().map(|&i| x[i]).collect::<Vec<_>>())).collect()).collect();
    let by_arity: Vec<Vec<usize>> = (0..=k).map(|n| (0..mc.morphisms.len()).filter(|&f| mc.arity(f) == n).collect()).collect();
    let mut elems: Vec<Vec<Vec<usize>>> = Vec::with_capacity(t.loose.len());
    let mut lookup: Vec<HashMap<Vec<usize>, usize>> = Vec::with_capacity(t.loose.len());
    let mut on_loose = Vec::with_capacity(t.loose.len());
    for (_, b, u) in &ords.loose_shape {
        let lists: Vec<&Vec<usize>> = (0..*b).map(|j| &by_arity[Ordinals::fiber(u, j).len()]).collect();
        let es: Vec<Vec<usize>> =
            tuples(&lists.iter().map(|l| l.len()).collect::<Vec<_>>()).into_iter().map(|ix| ix.iter().enumerate().map(|(j, &i)| lists[j][i]).collect()).collect();
        let left = es
            .iter()
            .map(|fs: &Vec<usize>| {
                let x: Vec<usize> = (0..u.len())
                    .map(|i| {
                        let pos = Ordinals::fiber(u, u[i]).iter().position(|&a| a == i).unwrap();
                        mc.morphisms[fs[u[i]]].dom[pos]
                    })
                    .collect();
                ob_index(&x)
            })
            .collect();
        let right = es.iter().map(|fs| ob_index(&fs.iter().map(|&f| mc.morphisms[f].cod).collect::<Vec<_>>())).collect();
        let apex = FiniteSet::new(es.iter().map(|fs| tuple_label(&fs.iter().map(|&f| mc.morphisms[f].name.as_str()).collect::<Vec<_>>())))?;
        on_loose.push(SpanOfSets { apex, left, right });
        lookup.push(es.iter().enumerate().map(|(i, fs)| (fs.clone(), i)).collect());
        elems.push(es);
    }
    let mut on_cells = Vec::with_capacity(t.cells.len());
    for cell in &t.cells {
        let (_, _, phi) = &ords.tight_shape[cell.left];
        let (_, _, psi) = &ords.tight_shape[cell.right];
        let (_, _, tau) = &ords.loose_shape[cell.top];
        let (_, _, ups) = &ords.loose_shape[cell.bottom];
        let mut table = Vec::with_capacity(elems[cell.top].len());
        for fs in &elems[cell.top] {
            let gs: Vec<usize> = (0..psi.len())
                .map(|bb| {
                    let fb = Ordinals::fiber(ups, bb);
                    let ft = Ordinals::fiber(tau, psi[bb]);
                    let s: Vec<usize> = fb.iter().map(|&i| ft.iter().position(|&c| c == phi[i]).expect("cell maps fibers")).collect();
                    mc.act(fs[psi[bb]], &s).ok_or_else(|| Error::Invalid(format!("σ-action of {} along [{}] missing", mc.morphisms[fs[psi[bb]]].name, join(&s))))
                })
                .collect::<Result<_>>()?;
            table.push(lookup[cell.bottom][&gs]);
        }
        on_cells.push(table);
    }
    let unitors = (0..t.objects.len())
        .map(|o| {
            let n = ords.arity[o];
            let idl = t.loose_id[o];
            tuples(&vec![no; n]).iter().map(|x| lookup[idl][&x.iter().map(|&oo| mc.identities[oo]).collect::<Vec<_>>()]).collect()
        })
        .collect();
    SpanModel::from_parts(
        t.clone(),
        on_objects,
        on_tight,
        on_loose,
        on_cells,
        |m, n, h1, h2| {
            let (_, _, u) = &ords.loose_shape[m];
            let (_, c, v) = &ords.loose_shape[n];
            let (fs, gs) = (&elems[m][h1], &elems[n][h2]);
            let mn = t.loose_compose(m, n)?;
            let vu: Vec<usize> = u.iter().map(|&i| v[i]).collect();
            let mut hs = Vec::with_capacity(*c);
            for j in 0..*c {
                let bj = Ordinals::fiber(v, j);
                let comp = mc.compose_full(gs[j], &bj.iter().map(|&i| fs[i]).collect::<Vec<_>>())?;
                let grouped: Vec<usize> = bj.iter().flat_map(|&i| Ordinals::fiber(u, i)).collect();
                let s: Vec<usize> = Ordinals::fiber(&vu, j).iter().map(|a| grouped.iter().position(|g| g == a).unwrap()).collect();
                hs.push(mc.act(comp, &s)?);
            }
            lookup[mn].get(&hs).copied()
        },
        unitors,
    )
}

/// How a model of an ordinal theory looks from its product structure:
/// object tuples of carriers and component multimorphisms of apices.
pub(crate) struct Decoded {
    pub ords: Ordinals,
    pub mc: Multicategory,
    /// Per loose arrow and element, the multimorphism components.
    pub comps: Vec<Vec<Vec<usize>>>,
    /// Per object and element, the tuple of objects.
    pub tuples: Vec<Vec<Vec<usize>>>,
    pub lookup: Vec<HashMap<Vec<usize>, usize>>,
}

pub(crate) fn decode(x: &SpanModel) -> Result<Decoded> {
    let t = &*x.theory;
    let ords = Ordinals::of(t)?;
    let k = ords.k;
    let xo = ords.obs[1];
    let objects = x.on_objects[xo].labels().to_vec();
    let mut gid: Vec<Vec<usize>> = Vec::with_capacity(k + 1);
    let mut morphisms = Vec::new();
    for n in 0..=k {
        let p = ords.p(n);
        let span = &x.on_loose[p];
        let mut ids = Vec::with_capacity(span.len());
        for h in 0..span.len() {
            let dom = (0..n).map(|i| x.on_tight[ords.proj(n, i)][span.left[h]]).collect();
            ids.push(morphisms.len());
            morphisms.push(Multimorphism { name: span.apex.label(h).to_string(), dom, cod: span.right[h] });
        }
        gid.push(ids);
    }
    let mut seen = HashMap::new();
    if morphisms.iter().any(|m| seen.insert(m.name.clone(), ()).is_some()) {
        for m in &mut morphisms {
            m.name = format!("{}:{}", m.dom.len(), m.name);
        }
    }
    let identities = (0..objects.len()).map(|o| gid[1][x.unitors[xo][o]]).collect();
    let tuples: Vec<Vec<Vec<usize>>> = (0..t.objects.len())
        .map(|o| {
            let n = ords.arity[o];
            (0..x.on_objects[o].len()).map(|e| (0..n).map(|i| x.on_tight[ords.proj(n, i)][e]).collect()).collect()
        })
        .collect();
    let comps: Vec<Vec<Vec<usize>>> = (0..t.loose.len())
        .map(|m| {
            let (_, b, u) = &ords.loose_shape[m];
            let cells: Vec<usize> = (0..*b).map(|j| ords.component_cell(m, j)).collect();
            (0..x.on_loose[m].len()).map(|h| (0..*b).map(|j| gid[Ordinals::fiber(u, j).len()][x.on_cells[cells[j]][h]]).collect()).collect()
        })
        .collect();
    let lookup: Vec<HashMap<Vec<usize>, usize>> = comps.iter().map(|cs| cs.iter().enumerate().map(|(h, c)| (c.clone(), h)).collect()).collect();
    let local = |f: usize| gid[morphisms[f].dom.len()].iter().position(|&g| g == f).unwrap();
    let mut partial = BTreeMap::new();
    let nm = morphisms.len();
    for f in 0..nm {
        let n = morphisms[f].dom.len();
        for i in 0..n {
            for g in 0..nm {
                let mm = morphisms[g].dom.len();
                if morphisms[g].cod != morphisms[f].dom[i] || n + mm - 1 > k {
                    continue;
                }
                let mu: Vec<usize> = (0..n).flat_map(|j| std::iter::repeat_n(j, if j == i { mm } else { 1 })).collect();
                let m = ords.loose[&(n + mm - 1, n, mu)];
                let cs: Vec<usize> = (0..n).map(|j| if j == i { g } else { identities_of(&x.unitors[xo], &gid, morphisms[f].dom[j]) }).collect();
                let Some(&h) = lookup[m].get(&cs) else {
                    return Err(Error::Invalid(format!("no element of {} with components {:?}", t.loose[m].name, cs)));
                };
                let v = x.lax(m, ords.p(n), h, local(f)).ok_or_else(|| Error::Invalid("laxator missing".into()))?;
                partial.insert((f, i, g), gid[n + mm - 1][v]);
            }
        }
    }
    let mut sigma = BTreeMap::new();
    if ords.kind == OrdinalKind::Finset {
        for f in 0..nm {
            let n = morphisms[f].dom.len();
            for m in 0..=k {
                for s in all_functions(m, n) {
                    if is_identity_map(&s, n) {
                        continue;
                    }
                    let left = ords.tight[&(n, m, s.clone())];
                    let c = ords.cell(left, t.tight_id[xo], ords.p(n), ords.p(m)).expect("σ cell exists");
                    sigma.insert((f, s), gid[m][x.on_cells[c][local(f)]]);
                }
            }
        }
    }
    let mc = Multicategory { objects, morphisms, identities, partial, sigma };
    Ok(Decoded { ords, mc, comps, tuples, lookup })
}

fn identities_of(unitor: &[usize], gid: &[Vec<usize>], o: usize) -> usize {
    gid[1][unitor[o]]
}

/// Read a multicategory back off a cartesian model.
pub fn model_to_multicategory(x: &SpanModel) -> Result<Multicategory> {
    Ok(decode(x)?.mc)
}

/// A multifunctor into finite sets: one set per object and one function
/// per multimorphism, tabulated over input tuples in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multifunctor {
    pub multicategory: Arc<Multicategory>,
    pub sets: Vec<FiniteSet>,
    pub actions: Vec<Func>,
}

impl Multifunctor {
    pub fn input_sizes(&self, f: usize) -> Vec<usize> {
        self.multicategory.morphisms[f].dom.iter().map(|&o| self.sets[o].len()).collect()
    }

    pub fn apply(&self, f: usize, xs: &[usize]) -> usize {
        let sizes = self.input_sizes(f);
        let idx = xs.iter().zip(&sizes).fold(0, |acc, (&x, &n)| acc * n + x);
        self.actions[f][idx]
    }

    pub fn validate(&self) -> Report {
        let mc = &*self.multicategory;
        let mut r = Report::new();
        if self.sets.len() != mc.objects.len() || self.actions.len() != mc.morphisms.len() {
            r.push("multifunctor.shape", "", "tables do not match the multicategory");
            return r;
        }
        for (f, m) in mc.morphisms.iter().enumerate() {
            let n: usize = self.input_sizes(f).iter().product();
            let ok = self.actions[f].len() == n && self.actions[f].iter().all(|&v| v < self.sets[m.cod].len());
            r.check(ok, "multifunctor.typed", || m.name.clone(), "action has the wrong domain or codomain");
        }
        if !r.is_ok() {
            return r;
        }
        for (o, &i) in mc.identities.iter().enumerate() {
            let ok = (0..self.sets[o].len()).all(|x| self.apply(i, &[x]) == x);
            r.check(ok, "multifunctor.identity", || mc.objects[o].clone(), "identity does not act trivially");
        }
        for (&(f, i, g), &fg) in &mc.partial {
            let ok = tuples(&self.input_sizes(fg)).iter().all(|xs| {
                let m = mc.arity(g);
                let inner = self.apply(g, &xs[i..i + m]);
                let mut outer = xs[..i].to_vec();
                outer.push(inner);
                outer.extend_from_slice(&xs[i + m..]);
                self.apply(fg, xs) == self.apply(f, &outer)
            });
            r.check(ok, "multifunctor.comp", || format!("{}∘{i}{}", mc.morphisms[f].name, mc.morphisms[g].name), "composite not preserved");
        }
        r
    }
}

/// The product-shaped carriers of a multifunctor with the given sets:
/// `H(x^n)` is the set of `n`-tuples of elements of `Σ_o S_o`, with tight
/// arrows reindexing.
pub fn product_carriers(x: &Arc<SpanModel>, sets: &[FiniteSet]) -> Result<(Vec<FiniteSet>, Vec<Func>, Vec<Func>)> {
    let dec = decode(x)?;
    let t = &*x.theory;
    let ords = &dec.ords;
    if sets.len() != dec.mc.objects.len() {
        return Err(Error::Mismatch("one set per object is required".into()));
    }
    let all: Vec<(usize, usize)> = sets.iter().enumerate().flat_map(|(o, s)| (0..s.len()).map(move |e| (o, e))).collect();
    let plain: Vec<String> = all.iter().map(|&(o, e)| sets[o].label(e).to_string()).collect();
    let names = if FiniteSet::new(plain.clone()).is_ok() { plain } else { all.iter().map(|&(o, e)| pair_label(&dec.mc.objects[o], sets[o].label(e))).collect() };
    let ns = all.len();
    let mut carriers = vec![FiniteSet::default(); t.objects.len()];
    let mut labels = vec![Vec::new(); t.objects.len()];
    for n in 0..=ords.k {
        let o = ords.obs[n];
        let index: HashMap<&Vec<usize>, usize> = dec.tuples[o].iter().enumerate().map(|(i, tu)| (tu, i)).collect();
        let ts = tuples(&vec![ns; n]);
        carriers[o] = FiniteSet::new(ts.iter().map(|tu| tuple_label(&tu.iter().map(|&i| names[i].as_str()).collect::<Vec<_>>())))?;
        labels[o] = ts
            .iter()
            .map(|tu| {
                let obs: Vec<usize> = tu.iter().map(|&i| all[i].0).collect();
                index.get(&obs).copied().ok_or_else(|| Error::Invalid("model is not cartesian on objects".into()))
            })
            .collect::<Result<_>>()?;
    }
    let tight_cells = ords.tight_shape.iter().map(|(a, _, psi)| tuples(&vec![ns; *a]).iter().map(|tu| psi.iter().fold(0, |acc, &i| acc * ns + tu[i])).collect()).collect();
    Ok((carriers, labels, tight_cells))
}

/// The instance of a multifunctor over the model of its multicategory.
pub fn multifunctor_to_instance(f: &Multifunctor, x: &Arc<SpanModel>) -> Result<Instance> {
    let dec = decode(x)?;
    let mc = &dec.mc;
    if mc.objects.len() != f.sets.len() || mc.morphisms.len() != f.actions.len() {
        return Err(Error::Mismatch("multifunctor does not match the model".into()));
    }
    let names_match = mc.morphisms.iter().zip(&f.multicategory.morphisms).all(|(a, b)| a.dom == b.dom && a.cod == b.cod);
    if !names_match {
        return Err(Error::Mismatch("multifunctor is over a different multicategory".into()));
    }
    let (carriers, labels, tight_cells) = product_carriers(x, &f.sets)?;
    let all: Vec<(usize, usize)> = f.sets.iter().enumerate().flat_map(|(o, s)| (0..s.len()).map(move |e| (o, e))).collect();
    let offset: Vec<usize> = f
        .sets
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s.len();
            Some(o)
        })
        .collect();
    let ns = all.len();
    let ords = &dec.ords;
    Instance::from_parts(x.clone(), carriers, labels, tight_cells, |m, e, h| {
        let (a, b, u) = &ords.loose_shape[m];
        let tu = tuples(&vec![ns; *a]).swap_remove(e);
        let out: Vec<usize> = (0..*b)
            .map(|j| {
                let g = dec.comps[m][h][j];
                let xs: Vec<usize> = Ordinals::fiber(u, j).iter().map(|&i| all[tu[i]].1).collect();
                let cod = mc.morphisms[g].cod;
                offset[cod] + f.apply(g, &xs)
            })
            .collect();
        Some(out.iter().fold(0, |acc, &i| acc * ns + i))
    })
}

/// Read the multifunctor off a cartesian instance: `S_o` is the fiber of
/// `H x` over `o`, and `f` acts through `H_{p_n}` on the tuple element.
pub fn instance_to_multifunctor(p: &Instance) -> Result<Multifunctor> {
    let x = &*p.model;
    let dec = decode(x)?;
    let ords = &dec.ords;
    let mc = dec.mc.clone();
    let xo = ords.obs[1];
    let mut pos = vec![0; p.carriers[xo].len()];
    let mut sets = Vec::with_capacity(mc.objects.len());
    for o in 0..mc.objects.len() {
        let fib = p.fiber(xo, o);
        for (i, &e) in fib.iter().enumerate() {
            pos[e] = i;
        }
        sets.push(FiniteSet::new(fib.iter().map(|&e| p.carriers[xo].label(e).to_string()))?);
    }
    let mut actions = Vec::with_capacity(mc.morphisms.len());
    for (g, mm) in mc.morphisms.iter().enumerate() {
        let n = mm.dom.len();
        let o = ords.obs[n];
        let by_proj: HashMap<Vec<usize>, usize> = (0..p.carriers[o].len()).map(|e| ((0..n).map(|i| p.tight_cells[ords.proj(n, i)][e]).collect(), e)).collect();
        let fibs: Vec<Vec<usize>> = mm.dom.iter().map(|&d| p.fiber(xo, d)).collect();
        let h = dec.lookup[ords.p(n)][&vec![g]];
        let mut table = Vec::new();
        for ix in tuples(&fibs.iter().map(|f| f.len()).collect::<Vec<_>>()) {
            let elems: Vec<usize> = ix.iter().enumerate().map(|(i, &j)| fibs[i][j]).collect();
            let e = *by_proj.get(&elems).ok_or_else(|| Error::Invalid(format!("instance is not cartesian at {}", x.theory.objects[o])))?;
            let v = p.act(ords.p(n), e, h).ok_or_else(|| Error::Invalid("action missing".into()))?;
            table.push(pos[v]);
        }
        actions.push(table);
    }
    Ok(Multifunctor { multicategory: Arc::new(mc), sets, actions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span_model::{terminal_model, validate_model};
    use crate::theory_core::{builtin_theory, Builtin};

    pub(crate) fn monoid(k: usize) -> Multicategory {
        assert!(k >= 2);
        binary_multicategory(true)
    }

    #[test]
    fn terminal_multicategory_is_terminal_model() {
        let t = Arc::new(builtin_theory(Builtin::PromTrunc(2)));
        let mc = terminal_multicategory(2, false);
        assert!(mc.validate(2).is_ok());
        let x = multicategory_to_model(&mc, &t).unwrap();
        assert!(validate_model(&x).is_ok());
        let one = terminal_model(&t);
        assert!(x.on_loose.iter().zip(&one.on_loose).all(|(a, b)| a.len() == b.len()));
    }

    #[test]
    fn monoid_model_has_one_binary_operation() {
        let t = Arc::new(builtin_theory(Builtin::PromTrunc(2)));
        let mc = monoid(2);
        let r = mc.validate(2);
        assert!(r.is_ok(), "{r}");
        let x = multicategory_to_model(&mc, &t).unwrap();
        let r = validate_model(&x);
        assert!(r.is_ok(), "{r}");
        let ords = Ordinals::of(&t).unwrap();
        assert_eq!(x.on_loose[ords.p(2)].apex.labels(), ["m"]);
        let back = model_to_multicategory(&x).unwrap();
        assert_eq!(back, mc);
    }

    #[test]
    fn arity_overflow() {
        let t = Arc::new(builtin_theory(Builtin::PromTrunc(1)));
        assert!(matches!(multicategory_to_model(&monoid(2), &t), Err(Error::ArityOverflow { arity: 2, bound: 1 })));
    }

    #[test]
    fn cocartesian_terminal_validates() {
        let t = Arc::new(builtin_theory(Builtin::SqFinsetOp(2)));
        let mc = terminal_multicategory(2, true);
        assert!(mc.validate(2).is_ok());
        let x = multicategory_to_model(&mc, &t).unwrap();
        let r = validate_model(&x);
        assert!(r.is_ok(), "{r}");
        assert_eq!(model_to_multicategory(&x).unwrap(), mc);
    }

    #[test]
    fn multifunctor_round_trip() {
        let t = Arc::new(builtin_theory(Builtin::PromTrunc(2)));
        let mc = Arc::new(monoid(2));
        let x = Arc::new(multicategory_to_model(&mc, &t).unwrap());
        // Z/2 under addition.
        let f = Multifunctor { multicategory: mc.clone(), sets: vec![FiniteSet::from_labels(["0", "1"])], actions: vec![vec![0], vec![0, 1], vec![0, 1, 1, 0]] };
        assert!(f.validate().is_ok());
        let h = multifunctor_to_instance(&f, &x).unwrap();
        let r = crate::instance::validate_instance(&h);
        assert!(r.is_ok(), "{r}");
        let back = instance_to_multifunctor(&h).unwrap();
        assert_eq!(back.actions, f.actions);
        assert_eq!(back.sets, f.sets);
    }
}
