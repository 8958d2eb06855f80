//! Graph generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use mpda_core::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// Erdős–Rényi `G(n, p)`.
pub fn gnp(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let edges: Vec<_> = all_pairs(n).into_iter().filter(|_| rng.gen_bool(p)).collect();
    Graph::from_edges(n, edges).unwrap()
}

/// Uniform random labelled tree from a random attachment order.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> Graph {
    let edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    Graph::from_edges(n, edges).unwrap()
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, all_pairs(n)).unwrap()
}

pub fn from_mask(n: usize, mask: u32) -> Graph {
    let edges: Vec<_> = all_pairs(n)
        .into_iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| e)
        .collect();
    Graph::from_edges(n, edges).unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative (the smallest edge mask) of every isomorphism class
/// of simple graphs on `n` vertices.
pub fn nonisomorphic_graphs(n: usize) -> Vec<Graph> {
    let pairs = all_pairs(n);
    let mut index = vec![vec![0usize; n]; n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        index[u][v] = i;
        index[v][u] = i;
    }
    // for each permutation, where pair bit i moves to
    let moves: Vec<Vec<usize>> = permutations(n)
        .iter()
        .map(|p| pairs.iter().map(|&(u, v)| index[p[u]][p[v]]).collect())
        .collect();
    let total = 1u32 << pairs.len();
    let mut seen = vec![false; total as usize];
    let mut out = Vec::new();
    for mask in 0..total {
        if seen[mask as usize] {
            continue;
        }
        out.push(from_mask(n, mask));
        for mv in &moves {
            let mut image = 0u32;
            for (i, &to) in mv.iter().enumerate() {
                image |= (mask >> i & 1) << to;
            }
            seen[image as usize] = true;
        }
    }
    out
}

/// Every distinct per-vertex `(additions, deletions)` profile reachable by
/// an edit set of `g`, with the fewest edits achieving it.
pub fn edit_profiles(g: &Graph) -> Vec<(Vec<i64>, Vec<i64>, u32)> {
    use std::collections::HashMap;
    let n = g.n();
    let pairs = all_pairs(n);
    let mut best: HashMap<(Vec<i64>, Vec<i64>), u32> = HashMap::new();
    for mask in 0u32..(1 << pairs.len()) {
        let mut adds = vec![0i64; n];
        let mut dels = vec![0i64; n];
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                let side = if g.has_edge(u, v) { &mut dels } else { &mut adds };
                side[u] += 1;
                side[v] += 1;
            }
        }
        let e = best.entry((adds, dels)).or_insert(u32::MAX);
        *e = (*e).min(mask.count_ones());
    }
    let mut out: Vec<_> = best.into_iter().map(|((a, d), e)| (a, d, e)).collect();
    out.sort();
    out
}

/// Minimum of edits + lambda * residual over all edit sets within caps;
/// strict (residual must be zero) when `lambda` is `None`.
pub fn brute_force_min(
    profiles: &[(Vec<i64>, Vec<i64>, u32)],
    theta: &[i64],
    add_caps: &[usize],
    del_caps: &[usize],
    lambda: Option<f64>,
) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (adds, dels, edits) in profiles {
        let fits = (0..theta.len()).all(|v| adds[v] <= add_caps[v] as i64 && dels[v] <= del_caps[v] as i64);
        if !fits {
            continue;
        }
        let residual: i64 = (0..theta.len()).map(|v| (adds[v] - dels[v] - theta[v]).abs()).sum();
        let cost = match lambda {
            None if residual != 0 => continue,
            None => *edits as f64,
            Some(l) => *edits as f64 + l * residual as f64,
        };
        if best.is_none_or(|b| cost < b) {
            best = Some(cost);
        }
    }
    best
}
