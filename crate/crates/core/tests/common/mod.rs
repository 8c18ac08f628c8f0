//! Definition-level oracles shared by the integration tests.
#![allow(dead_code)]

use cayley_chid::cayley::Graph;
use cayley_chid::coloring::Coloring;
use cayley_chid::sampler::{sample_connection_set, RandomStream};
use cayley_chid::{CayleyGraph, ConnectionSet, GroupSpec, Permutation};

/// Every abelian group of order at most 8, one presentation each.
pub const SMALL_GROUPS: &[&str] = &["2", "3", "4", "2,2", "5", "6", "7", "8", "2,4", "2,2,2"];

pub fn spec(s: &str) -> GroupSpec {
    s.parse().unwrap()
}

/// 20 pinned connection sets per group, spread over `p ∈ {0.2, …, 0.8}`.
pub fn small_corpus() -> Vec<CayleyGraph> {
    let mut out = Vec::new();
    for (gi, g) in SMALL_GROUPS.iter().enumerate() {
        let spec = spec(g);
        for k in 0..20u64 {
            let p = [0.2, 0.35, 0.5, 0.65, 0.8][k as usize % 5];
            let s = sample_connection_set(&spec, p, RandomStream::new(9000 + gi as u64, k)).unwrap();
            out.push(CayleyGraph::build(&spec, &s).unwrap());
        }
    }
    out
}

pub fn cayley(group: &str, set: &[usize]) -> CayleyGraph {
    let spec = spec(group);
    CayleyGraph::build(&spec, &ConnectionSet::from_indices(&spec, set.iter().copied()).unwrap()).unwrap()
}

/// All `n!` permutations, by Heap's algorithm.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    let mut out = vec![a.clone()];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

pub fn preserves_edges(graph: &Graph, images: &[usize]) -> bool {
    let n = graph.order();
    (0..n).all(|u| (u + 1..n).all(|v| graph.adjacent(u, v) == graph.adjacent(images[u], images[v])))
}

/// Sorted images of every edge-preserving permutation.
pub fn brute_force_automorphisms(graph: &Graph) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = all_permutations(graph.order())
        .into_iter()
        .filter(|p| preserves_edges(graph, p))
        .collect();
    out.sort();
    out
}

/// Restricted growth strings of length `n`: every set partition exactly once.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for c in 0..=max + 1 {
            prefix.push(c);
            go(prefix, max.max(c), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
    } else {
        let mut prefix = vec![0];
        go(&mut prefix, 0, n, &mut out);
    }
    out
}

pub fn is_proper_labels(graph: &Graph, labels: &[usize]) -> bool {
    graph.edges().all(|(u, v)| labels[u] != labels[v])
}

/// No nontrivial permutation in `auts` keeps every vertex's color.
pub fn is_distinguishing_labels(auts: &[Vec<usize>], labels: &[usize]) -> bool {
    auts.iter()
        .filter(|p| p.iter().enumerate().any(|(i, &x)| i != x))
        .all(|p| (0..labels.len()).any(|v| labels[p[v]] != labels[v]))
}

fn blocks(labels: &[usize]) -> usize {
    labels.iter().max().map_or(0, |m| m + 1)
}

pub fn brute_force_chi(graph: &Graph) -> usize {
    set_partitions(graph.order())
        .iter()
        .filter(|l| is_proper_labels(graph, l))
        .map(|l| blocks(l))
        .min()
        .unwrap()
}

pub fn brute_force_chi_d(graph: &Graph, auts: &[Vec<usize>]) -> usize {
    set_partitions(graph.order())
        .iter()
        .filter(|l| is_proper_labels(graph, l) && is_distinguishing_labels(auts, l))
        .map(|l| blocks(l))
        .min()
        .unwrap()
}

/// Zero-sum 3-subsets of nonzero elements, by checking every 3-subset.
pub fn brute_force_triples(spec: &GroupSpec) -> Vec<[usize; 3]> {
    let n = spec.order();
    let mut out = Vec::new();
    for x in 1..n {
        for y in x + 1..n {
            for z in y + 1..n {
                if spec.add_index(spec.add_index(x, y), z) == 0 {
                    out.push([x, y, z]);
                }
            }
        }
    }
    out
}

/// `D(T)` straight from the definition.
pub fn difference_set(spec: &GroupSpec, t: [usize; 3]) -> Vec<usize> {
    let mut d = Vec::new();
    for &a in &t {
        for &b in &t {
            if a != b {
                d.push(spec.sub_index(a, b));
            }
        }
    }
    d.sort_unstable();
    d.dedup();
    d
}

pub fn perm_images(p: &Permutation) -> Vec<usize> {
    p.to_vec()
}

pub fn coloring_labels(c: &Coloring) -> Vec<usize> {
    c.to_vec()
}
