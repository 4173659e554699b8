//! Finite sets with string labels, functions as index tables, and
//! materialized pullbacks.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashMap;

use crate::error::{Error, Result};

/// A finite set whose elements are `0..len`, each carrying a distinct label.
///
/// Element order is the order in which labels were given; constructed sets
/// (pullbacks, quotients) list their elements in lexicographic order of the
/// underlying index tuples.
#[derive(Debug, Clone, Default)]
pub struct FiniteSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

/// A function between finite sets, stored as its table of values.
pub type Func = Vec<usize>;

impl FiniteSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = FiniteSet::default();
        for l in labels {
            let l = l.into();
            if set.index.contains_key(&l) {
                return Err(Error::Invalid(format!("duplicate label {l:?}")));
            }
            set.index.insert(l.clone(), set.labels.len());
            set.labels.push(l);
        }
        Ok(set)
    }

    /// Like [`FiniteSet::new`] but for labels known to be distinct.
    pub fn from_labels<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(labels).expect("labels must be distinct")
    }

    /// `{0, 1, ..., n-1}` labelled by their decimal names.
    pub fn range(n: usize) -> Self {
        Self::from_labels((0..n).map(|i| i.to_string()))
    }

    pub fn singleton() -> Self {
        Self::from_labels(["*"])
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn iter(&self) -> std::ops::Range<usize> {
        0..self.labels.len()
    }
}

impl PartialEq for FiniteSet {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Eq for FiniteSet {}

impl Serialize for FiniteSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.labels.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<String>::deserialize(d)?;
        FiniteSet::new(labels).map_err(serde::de::Error::custom)
    }
}

/// Pairs `(i, j)` with `left[i] == right[j]`, in lexicographic order.
pub fn pullback_pairs(left: &[usize], right: &[usize]) -> Vec<(usize, usize)> {
    let mut by_value: HashMap<usize, Vec<usize>> = HashMap::new();
    for (j, &v) in right.iter().enumerate() {
        by_value.entry(v).or_default().push(j);
    }
    let mut out = Vec::new();
    for (i, v) in left.iter().enumerate() {
        if let Some(js) = by_value.get(v) {
            out.extend(js.iter().map(|&j| (i, j)));
        }
    }
    out
}

pub fn compose(f: &[usize], g: &[usize]) -> Func {
    f.iter().map(|&x| g[x]).collect()
}

pub fn identity(n: usize) -> Func {
    (0..n).collect()
}

pub fn is_bijection(f: &[usize], codomain: usize) -> bool {
    if f.len() != codomain {
        return false;
    }
    let mut seen = vec![false; codomain];
    for &y in f {
        if y >= codomain || seen[y] {
            return false;
        }
        seen[y] = true;
    }
    true
}

pub fn inverse(f: &[usize]) -> Option<Func> {
    if !is_bijection(f, f.len()) {
        return None;
    }
    let mut inv = vec![0; f.len()];
    for (x, &y) in f.iter().enumerate() {
        inv[y] = x;
    }
    Some(inv)
}

/// Render a pair of labels the way laxator and action tables are keyed.
pub fn pair_label(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

/// Split a `(a,b)` key whose halves are drawn from the given sets.
///
/// Labels may themselves contain commas, so every split point is tried and
/// the split must be unique.
pub fn split_pair_label(key: &str, left: &FiniteSet, right: &FiniteSet) -> Option<(usize, usize)> {
    let inner = key.trim().strip_prefix('(')?.strip_suffix(')')?;
    let mut found = None;
    for (pos, ch) in inner.char_indices() {
        if ch != ',' {
            continue;
        }
        let (a, b) = (inner[..pos].trim(), inner[pos + 1..].trim());
        if let (Some(i), Some(j)) = (left.find(a), right.find(b)) {
            if found.is_some() {
                return None;
            }
            found = Some((i, j));
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pullback_is_lexicographic() {
        let pairs = pullback_pairs(&[1, 0, 1], &[1, 1, 0]);
        assert_eq!(pairs, vec![(0, 0), (0, 1), (1, 2), (2, 0), (2, 1)]);
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(FiniteSet::new(["a", "a"]).is_err());
    }

    #[test]
    fn split_handles_nested_commas() {
        let l = FiniteSet::from_labels(["(a,b)", "c"]);
        let r = FiniteSet::from_labels(["d", "e,f"]);
        assert_eq!(split_pair_label("((a,b),e,f)", &l, &r), Some((0, 1)));
        assert_eq!(split_pair_label("(c,d)", &l, &r), Some((1, 0)));
        assert_eq!(split_pair_label("(c,x)", &l, &r), None);
    }
}
