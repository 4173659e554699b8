//! A small backtracking constraint solver used by every exhaustive
//! enumeration in the crate (morphisms, fillers, families, instances).
//!
//! Variables are assigned in index order. A constraint is checked as soon
//! as the largest variable it mentions has been assigned, so each closure
//! may read any variable in its list from the assignment slice.

use crate::error::{Error, Result};

type Check<'a> = Box<dyn Fn(&[usize]) -> bool + Sync + 'a>;
type Candidates<'a> = Box<dyn Fn(&[usize]) -> Vec<usize> + Sync + 'a>;

pub enum Domain<'a> {
    Fixed(Vec<usize>),
    /// Candidates computed from earlier variables only.
    Dynamic(Candidates<'a>),
}

#[derive(Default)]
pub struct Csp<'a> {
    domains: Vec<Domain<'a>>,
    checks: Vec<Vec<Check<'a>>>,
}

impl<'a> Csp<'a> {
    pub fn new() -> Self {
        Csp { domains: Vec::new(), checks: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn var(&mut self, domain: Vec<usize>) -> usize {
        self.domains.push(Domain::Fixed(domain));
        self.checks.push(Vec::new());
        self.domains.len() - 1
    }

    pub fn var_range(&mut self, n: usize) -> usize {
        self.var((0..n).collect())
    }

    pub fn var_dynamic(&mut self, f: impl Fn(&[usize]) -> Vec<usize> + Sync + 'a) -> usize {
        self.domains.push(Domain::Dynamic(Box::new(f)));
        self.checks.push(Vec::new());
        self.domains.len() - 1
    }

    /// Add a constraint over `vars`; it fires once all of them are assigned.
    pub fn constrain(&mut self, vars: &[usize], f: impl Fn(&[usize]) -> bool + Sync + 'a) {
        let trigger = *vars.iter().max().expect("a constraint needs at least one variable");
        self.checks[trigger].push(Box::new(f));
    }

    fn candidates(&self, level: usize, assign: &[usize]) -> Vec<usize> {
        match &self.domains[level] {
            Domain::Fixed(v) => v.clone(),
            Domain::Dynamic(f) => f(&assign[..level]),
        }
    }

    /// Visit every solution in lexicographic order. `visit` returns `false`
    /// to stop early. Fails with `HomSetTooLarge` once more than `limit`
    /// solutions have been found.
    pub fn solve(&self, limit: usize, mut visit: impl FnMut(&[usize]) -> bool) -> Result<usize> {
        let n = self.domains.len();
        if n == 0 {
            visit(&[]);
            return Ok(1);
        }
        let mut assign = vec![0usize; n];
        let mut cands: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut pos = vec![0usize; n];
        let mut count = 0usize;
        let mut level = 0;
        cands[0] = self.candidates(0, &assign);
        loop {
            if pos[level] < cands[level].len() {
                assign[level] = cands[level][pos[level]];
                pos[level] += 1;
                if !self.checks[level].iter().all(|c| c(&assign)) {
                    continue;
                }
                if level + 1 == n {
                    count += 1;
                    if count > limit {
                        return Err(Error::HomSetTooLarge(limit));
                    }
                    if !visit(&assign) {
                        return Ok(count);
                    }
                    continue;
                }
                level += 1;
                cands[level] = self.candidates(level, &assign);
                pos[level] = 0;
            } else {
                if level == 0 {
                    break;
                }
                level -= 1;
            }
        }
        Ok(count)
    }

    pub fn count(&self, limit: usize) -> Result<usize> {
        self.solve(limit, |_| true)
    }

    pub fn all(&self, limit: usize) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        self.solve(limit, |a| {
            out.push(a.to_vec());
            true
        })?;
        Ok(out)
    }

    pub fn first(&self) -> Option<Vec<usize>> {
        let mut out = None;
        let _ = self.solve(usize::MAX, |a| {
            out = Some(a.to_vec());
            false
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_injections() {
        // injective maps 3 -> 4
        let mut csp = Csp::new();
        let v: Vec<_> = (0..3).map(|_| csp.var_range(4)).collect();
        for i in 0..3 {
            for j in 0..i {
                let (a, b) = (v[i], v[j]);
                csp.constrain(&[a, b], move |s| s[a] != s[b]);
            }
        }
        assert_eq!(csp.count(1000).unwrap(), 24);
    }

    #[test]
    fn dynamic_domains_and_order() {
        let mut csp = Csp::new();
        let a = csp.var_range(3);
        csp.var_dynamic(move |s| (s[a]..3).collect());
        let all = csp.all(100).unwrap();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[5], vec![2, 2]);
    }

    #[test]
    fn cap_is_enforced() {
        let mut csp = Csp::new();
        csp.var_range(5);
        csp.var_range(5);
        assert_eq!(csp.count(10), Err(Error::HomSetTooLarge(10)));
    }

    #[test]
    fn empty_problem_has_one_solution() {
        assert_eq!(Csp::new().count(1).unwrap(), 1);
    }
}
