//! Consequences built by plugging identities into every one-hole context,
//! straight from the definition of the T-ideal.

use std::collections::HashMap;

use operad_core::{Identity, Monomial};

#[derive(Clone, Debug)]
pub enum Tree {
    Leaf(u8),
    Node(Box<Tree>, Box<Tree>),
}

impl Tree {
    fn key(&self) -> String {
        match self {
            Tree::Leaf(v) => v.to_string(),
            Tree::Node(l, r) => format!("({} {})", l.key(), r.key()),
        }
    }

    fn substitute(&self, subs: &[Tree]) -> Tree {
        match self {
            Tree::Leaf(v) => subs[*v as usize - 1].clone(),
            Tree::Node(l, r) => {
                Tree::Node(Box::new(l.substitute(subs)), Box::new(r.substitute(subs)))
            }
        }
    }

    /// Replaces leaf `hole` by `t`.
    fn plug(&self, hole: u8, t: &Tree) -> Tree {
        match self {
            Tree::Leaf(v) if *v == hole => t.clone(),
            Tree::Leaf(_) => self.clone(),
            Tree::Node(l, r) => Tree::Node(Box::new(l.plug(hole, t)), Box::new(r.plug(hole, t))),
        }
    }
}

/// Every monomial using each of `vars` exactly once.
pub fn all_trees(vars: &[u8]) -> Vec<Tree> {
    if vars.len() == 1 {
        return vec![Tree::Leaf(vars[0])];
    }
    let mut out = Vec::new();
    let n = vars.len();
    for mask in 1..(1u32 << n) - 1 {
        let left: Vec<u8> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| vars[i])
            .collect();
        let right: Vec<u8> = (0..n)
            .filter(|i| mask >> i & 1 == 0)
            .map(|i| vars[i])
            .collect();
        for l in all_trees(&left) {
            for r in all_trees(&right) {
                out.push(Tree::Node(Box::new(l.clone()), Box::new(r)));
            }
        }
    }
    out
}

/// Ordered splittings of `vars` into `k` nonempty blocks.
fn ordered_partitions(vars: &[u8], k: usize) -> Vec<Vec<Vec<u8>>> {
    if k == 0 {
        return if vars.is_empty() {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let n = vars.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let first: Vec<u8> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| vars[i])
            .collect();
        let rest: Vec<u8> = (0..n)
            .filter(|i| mask >> i & 1 == 0)
            .map(|i| vars[i])
            .collect();
        for mut tail in ordered_partitions(&rest, k - 1) {
            tail.insert(0, first.clone());
            out.push(tail);
        }
    }
    out
}

fn to_tree(m: &Monomial) -> Tree {
    match m.factors() {
        None => Tree::Leaf(m.labels()[0]),
        Some((l, r)) => Tree::Node(Box::new(to_tree(&l)), Box::new(to_tree(&r))),
    }
}

/// All `C[f(u_1, ..., u_k)]` with `C` a one-hole context and `u_i`
/// monomials, on disjoint variables covering `1..=n`.
pub fn brute_force_rows(ids: &[Identity], n: usize) -> (usize, Vec<Vec<i64>>) {
    let all: Vec<u8> = (1..=n as u8).collect();
    let columns: HashMap<String, usize> = all_trees(&all)
        .iter()
        .enumerate()
        .map(|(i, t)| (t.key(), i))
        .collect();
    const HOLE: u8 = 0;
    let mut rows = Vec::new();
    for id in ids {
        let k = id.variable_count();
        let terms: Vec<(i64, Tree)> = id
            .terms()
            .iter()
            .map(|t| (t.coeff, to_tree(&t.monomial)))
            .collect();
        for inner_mask in 0u32..(1 << n) {
            let inner: Vec<u8> = (0..n)
                .filter(|i| inner_mask >> i & 1 == 1)
                .map(|i| all[i])
                .collect();
            let outer: Vec<u8> = (0..n)
                .filter(|i| inner_mask >> i & 1 == 0)
                .map(|i| all[i])
                .collect();
            if inner.len() < k {
                continue;
            }
            let mut context_vars = outer.clone();
            context_vars.push(HOLE);
            for context in all_trees(&context_vars) {
                for blocks in ordered_partitions(&inner, k) {
                    let choices: Vec<Vec<Tree>> = blocks.iter().map(|b| all_trees(b)).collect();
                    let mut pick = vec![0usize; k];
                    loop {
                        let subs: Vec<Tree> = (0..k).map(|i| choices[i][pick[i]].clone()).collect();
                        let mut row = vec![0i64; columns.len()];
                        for (c, t) in &terms {
                            let full = context.plug(HOLE, &t.substitute(&subs));
                            row[columns[&full.key()]] += c;
                        }
                        rows.push(row);
                        let mut i = 0;
                        while i < k {
                            pick[i] += 1;
                            if pick[i] < choices[i].len() {
                                break;
                            }
                            pick[i] = 0;
                            i += 1;
                        }
                        if i == k {
                            break;
                        }
                    }
                }
            }
        }
    }
    (columns.len(), rows)
}
