//! Deterministic formula pools for the verification checks.

use crate::syntax::Formula;
use crate::update::translate_pal;

/// Pool generation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolParams {
    /// Modal depth of the one-atom layer (over `p`).
    pub one_atom_depth: usize,
    /// Modal depth of the two-atom layer (over `p`, `q`).
    pub two_atom_depth: usize,
    pub max_premises: usize,
}

impl Default for PoolParams {
    fn default() -> PoolParams {
        PoolParams {
            one_atom_depth: 2,
            two_atom_depth: 1,
            max_premises: 2,
        }
    }
}

fn p() -> Formula {
    Formula::atom("p")
}

fn q() -> Formula {
    Formula::atom("q")
}

fn push_new(out: &mut Vec<Formula>, f: Formula) {
    if !out.contains(&f) {
        out.push(f);
    }
}

/// `base` closed `depth` times under `[]` and `<>`, in generation order.
fn modal_layers(base: Vec<Formula>, depth: usize) -> Vec<Formula> {
    let mut all = base.clone();
    let mut frontier = base;
    for _ in 0..depth {
        let mut next = Vec::new();
        for f in &frontier {
            for g in [Formula::nec(f.clone()), Formula::poss(f.clone())] {
                if !all.contains(&g) {
                    all.push(g.clone());
                    next.push(g);
                }
            }
        }
        frontier = next;
    }
    all
}

/// Literals over `p` closed under the modalities, then `false` and `true`.
pub fn one_atom_pool(depth: usize) -> Vec<Formula> {
    let mut out = modal_layers(vec![p(), Formula::not(p())], depth);
    push_new(&mut out, Formula::bottom());
    push_new(&mut out, Formula::top());
    out
}

/// Literals and binary combinations of `p`, `q` closed under the modalities.
pub fn two_atom_pool(depth: usize) -> Vec<Formula> {
    let base = vec![
        p(),
        Formula::not(p()),
        q(),
        Formula::not(q()),
        Formula::and(p(), q()),
        Formula::or(p(), q()),
        Formula::implies(p(), q()),
    ];
    modal_layers(base, depth)
}

/// The default pool: the one-atom layer followed by the new two-atom formulas.
pub fn formula_pool(params: &PoolParams) -> Vec<Formula> {
    let mut out = one_atom_pool(params.one_atom_depth);
    for f in two_atom_pool(params.two_atom_depth) {
        push_new(&mut out, f);
    }
    out
}

/// Every subset of `0..n` with at most `k` members, smaller sets first.
pub fn index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &layer {
            let start = s.last().map_or(0, |&l| l + 1);
            for i in start..n {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Premise sets drawn from `pool`, as formula vectors.
pub fn premise_sets(pool: &[Formula], max: usize) -> Vec<Vec<Formula>> {
    index_subsets(pool.len(), max)
        .into_iter()
        .map(|s| s.into_iter().map(|i| pool[i].clone()).collect())
        .collect()
}

/// Modal depth at most one over `p`: the sub-pool for nested meta-level checks.
pub fn small_pool() -> Vec<Formula> {
    let mut out = modal_layers(vec![p(), Formula::not(p())], 1);
    push_new(&mut out, Formula::bottom());
    push_new(&mut out, Formula::top());
    out
}

/// Eight formulas used as sequence steps: literals and simple modal formulas over `p`, `q`.
pub fn step_pool() -> Vec<Formula> {
    vec![
        p(),
        Formula::not(p()),
        q(),
        Formula::not(q()),
        Formula::poss(p()),
        Formula::poss(Formula::not(p())),
        Formula::nec(p()),
        Formula::poss(q()),
    ]
}

/// Sequences over `steps` of length `1..=max_len`, shorter first.
pub fn sequences(steps: &[Formula], max_len: usize) -> Vec<Vec<Formula>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Formula>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for f in steps {
                let mut t = s.clone();
                t.push(f.clone());
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// The pool plus dynamic formulas: `a;b`, `[](a;b)`, `a;b;c` and `a=>b` over the step formulas.
pub fn dynamic_pool(params: &PoolParams) -> Vec<Formula> {
    let mut out = formula_pool(params);
    let steps = step_pool();
    for a in &steps {
        for b in &steps {
            push_new(&mut out, Formula::seq(a.clone(), b.clone()));
        }
    }
    for a in &steps[..4] {
        for b in &steps[4..] {
            push_new(&mut out, Formula::nec(Formula::seq(a.clone(), b.clone())));
        }
    }
    for a in &steps[4..6] {
        for b in &steps[..2] {
            for c in &steps[4..6] {
                push_new(&mut out, Formula::seq_all(&[a.clone(), b.clone(), c.clone()]).expect("nonempty"));
            }
        }
    }
    for a in &steps {
        for b in &steps[..4] {
            push_new(&mut out, Formula::arrow(a.clone(), b.clone()));
        }
    }
    out
}

/// Announcement formulas nested at most twice, over the step formulas and their translations.
pub fn pal_pool(params: &PoolParams) -> Vec<Formula> {
    let steps = step_pool();
    let mut out: Vec<Formula> = Vec::new();
    for f in dynamic_pool(params) {
        push_new(&mut out, translate_pal(&f));
    }
    for a in &steps {
        for b in &steps {
            let inner = Formula::announce(a.clone(), b.clone());
            push_new(&mut out, Formula::nec(inner.clone()));
            push_new(&mut out, Formula::not(inner.clone()));
            for c in &steps[..4] {
                push_new(&mut out, Formula::announce(c.clone(), inner.clone()));
                push_new(&mut out, Formula::announce(inner.clone(), c.clone()));
            }
        }
    }
    out.retain(|f| f.announcement_depth() <= 2);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Fragment;

    #[test]
    fn default_sizes() {
        assert_eq!(one_atom_pool(2).len(), 16);
        assert_eq!(two_atom_pool(1).len(), 21);
        let pool = formula_pool(&PoolParams::default());
        assert_eq!(pool.len(), 31);
        assert_eq!(premise_sets(&pool, 2).len(), 1 + 31 + 31 * 30 / 2);
        assert_eq!(small_pool().len(), 8);
        assert_eq!(sequences(&step_pool(), 3).len(), 8 + 64 + 512);
    }

    #[test]
    fn pools_are_duplicate_free_and_bounded() {
        let pool = formula_pool(&PoolParams::default());
        for (i, f) in pool.iter().enumerate() {
            assert!(!pool[..i].contains(f));
            assert!(f.modal_depth() <= 2);
            assert!(f.fragment() <= Fragment::Basic);
        }
        let dynamic = dynamic_pool(&PoolParams::default());
        assert!(dynamic.iter().all(|f| f.fragment() <= Fragment::Dynamic));
        assert!(dynamic.len() <= crate::consequence::MAX_TABLE_FORMULAS);
        let pal = pal_pool(&PoolParams::default());
        assert!(pal.iter().any(|f| f.announcement_depth() == 2));
        assert!(pal.iter().all(|f| !format!("{f}").contains(';')));
    }

    #[test]
    fn subsets_are_ordered() {
        assert_eq!(index_subsets(3, 2), vec![vec![], vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]]);
    }
}
