//! Proper vertex colorings: verification, greedy bounds, exact chromatic number.

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::cayley::Graph;
use crate::error::{Error, Result};

/// A vertex coloring with labels `0..k`, every label in use.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Coloring {
    colors: Vec<u32>,
    k: usize,
}

impl Coloring {
    /// Labels must cover `0..k` exactly for some `k`.
    pub fn new(colors: Vec<usize>) -> Result<Self> {
        let k = colors.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut used = vec![false; k];
        for &c in &colors {
            used[c] = true;
        }
        if let Some(gap) = used.iter().position(|&u| !u) {
            return Err(Error::Malformed(format!("color {gap} unused below maximum {}", k - 1)));
        }
        Ok(Coloring {
            colors: colors.into_iter().map(|c| c as u32).collect(),
            k,
        })
    }

    /// Relabels arbitrary labels by order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let colors: Vec<u32> = labels
            .iter()
            .map(|l| {
                let next = map.len() as u32;
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Coloring { k: map.len(), colors }
    }

    /// Maps the used labels, in ascending order, onto `0..k`.
    pub fn compacted(labels: &[usize]) -> Self {
        let mut used: Vec<usize> = labels.to_vec();
        used.sort_unstable();
        used.dedup();
        let colors = labels
            .iter()
            .map(|l| used.binary_search(l).unwrap() as u32)
            .collect();
        Coloring { colors, k: used.len() }
    }

    pub fn constant(n: usize) -> Self {
        Coloring {
            colors: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    pub fn all_distinct(n: usize) -> Self {
        Coloring {
            colors: (0..n as u32).collect(),
            k: n,
        }
    }

    #[inline]
    pub fn color(&self, v: usize) -> usize {
        self.colors[v] as usize
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn num_colors(&self) -> usize {
        self.k
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.colors.iter().map(|&c| c as usize).collect()
    }

    pub fn class(&self, c: usize) -> BitSet {
        BitSet::from_indices(self.len(), (0..self.len()).filter(|&v| self.color(v) == c))
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &c) in self.colors.iter().enumerate() {
            out[c as usize].push(v);
        }
        out
    }

    /// Color of a largest class, lowest color on ties.
    pub fn largest_class(&self) -> usize {
        let sizes: Vec<usize> = self.classes().iter().map(Vec::len).collect();
        let best = sizes.iter().copied().max().unwrap_or(0);
        sizes.iter().position(|&s| s == best).unwrap_or(0)
    }
}

impl TryFrom<Vec<usize>> for Coloring {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Coloring::new(v)
    }
}

impl From<Coloring> for Vec<usize> {
    fn from(c: Coloring) -> Self {
        c.to_vec()
    }
}

pub fn is_proper(graph: &Graph, coloring: &Coloring) -> bool {
    coloring.len() == graph.order() && graph.edges().all(|(u, v)| coloring.color(u) != coloring.color(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GreedyStrategy {
    IndexOrder,
    /// DSATUR: most distinct neighbor colors first, then highest degree, then lowest index.
    Saturation,
}

fn smallest_free_color(graph: &Graph, colors: &[Option<usize>], v: usize) -> usize {
    let mut taken = vec![false; graph.order() + 1];
    for u in graph.neighbors(v).iter() {
        if let Some(c) = colors[u] {
            taken[c] = true;
        }
    }
    taken.iter().position(|&t| !t).unwrap()
}

fn saturation(graph: &Graph, colors: &[Option<usize>], v: usize) -> usize {
    let mut seen = BitSet::new(graph.order() + 1);
    for u in graph.neighbors(v).iter() {
        if let Some(c) = colors[u] {
            seen.insert(c);
        }
    }
    seen.count()
}

/// A proper coloring with at most `Δ + 1` colors.
pub fn greedy_coloring(graph: &Graph, strategy: GreedyStrategy) -> Coloring {
    let n = graph.order();
    let mut colors: Vec<Option<usize>> = vec![None; n];
    match strategy {
        GreedyStrategy::IndexOrder => {
            for v in 0..n {
                colors[v] = Some(smallest_free_color(graph, &colors, v));
            }
        }
        GreedyStrategy::Saturation => {
            for _ in 0..n {
                let v = (0..n)
                    .filter(|&v| colors[v].is_none())
                    .max_by_key(|&v| (saturation(graph, &colors, v), graph.degree(v), std::cmp::Reverse(v)))
                    .unwrap();
                colors[v] = Some(smallest_free_color(graph, &colors, v));
            }
        }
    }
    Coloring::new(colors.into_iter().map(Option::unwrap).collect()).expect("greedy labels are contiguous")
}

/// A clique found greedily from each start vertex; the largest is returned.
pub fn greedy_clique(graph: &Graph) -> Vec<usize> {
    let n = graph.order();
    let mut best = Vec::new();
    for start in 0..n {
        let mut clique = vec![start];
        let mut candidates = graph.neighbors(start).clone();
        while let Some(v) = candidates
            .iter()
            .max_by_key(|&v| (graph.neighbors(v).intersection_count(&candidates), std::cmp::Reverse(v)))
        {
            clique.push(v);
            candidates.intersect_with(graph.neighbors(v));
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

/// Caps for the exact solvers.
pub const DEFAULT_CHI_EXACT_CAP: usize = 40;

struct ExactSearch<'a> {
    graph: &'a Graph,
    colors: Vec<Option<usize>>,
    /// Per vertex, per color: number of colored neighbors with that color.
    neighbor_counts: Vec<Vec<u16>>,
    saturation: Vec<usize>,
    best: usize,
    best_coloring: Vec<usize>,
    lower: usize,
}

impl ExactSearch<'_> {
    fn assign(&mut self, v: usize, c: usize) {
        self.colors[v] = Some(c);
        for u in self.graph.neighbors(v).iter() {
            let cnt = &mut self.neighbor_counts[u][c];
            if *cnt == 0 {
                self.saturation[u] += 1;
            }
            *cnt += 1;
        }
    }

    fn unassign(&mut self, v: usize, c: usize) {
        self.colors[v] = None;
        for u in self.graph.neighbors(v).iter() {
            let cnt = &mut self.neighbor_counts[u][c];
            *cnt -= 1;
            if *cnt == 0 {
                self.saturation[u] -= 1;
            }
        }
    }

    /// Returns true once an optimal coloring (matching the lower bound) is known.
    fn run(&mut self, colored: usize, used: usize) -> bool {
        if used >= self.best {
            return false;
        }
        let n = self.graph.order();
        if colored == n {
            self.best = used;
            self.best_coloring = self.colors.iter().map(|c| c.unwrap()).collect();
            return self.best <= self.lower;
        }
        // highest saturation, ties by lowest index
        let mut v = usize::MAX;
        for u in 0..n {
            if self.colors[u].is_none() && (v == usize::MAX || self.saturation[u] > self.saturation[v]) {
                v = u;
            }
        }
        let limit = (used + 1).min(self.best - 1);
        for c in 0..limit {
            if self.neighbor_counts[v][c] != 0 {
                continue;
            }
            self.assign(v, c);
            let done = self.run(colored + 1, used.max(c + 1));
            self.unassign(v, c);
            if done {
                return true;
            }
        }
        false
    }
}

/// Exact `χ(G)` with a witness, by DSATUR branch and bound seeded with the greedy
/// upper bound and a greedy clique lower bound.
pub fn chromatic_number_exact(graph: &Graph, cap: usize) -> Result<(usize, Coloring)> {
    let n = graph.order();
    if n > cap {
        return Err(Error::ScaleCap {
            what: "exact chromatic number vertex count",
            cap,
            actual: n,
        });
    }
    if n == 0 {
        return Ok((0, Coloring::new(Vec::new())?));
    }
    let greedy = greedy_coloring(graph, GreedyStrategy::Saturation);
    let lower = greedy_clique(graph).len();
    if greedy.num_colors() == lower {
        return Ok((lower, greedy));
    }
    let mut search = ExactSearch {
        graph,
        colors: vec![None; n],
        neighbor_counts: vec![vec![0; n + 1]; n],
        saturation: vec![0; n],
        best: greedy.num_colors(),
        best_coloring: greedy.to_vec(),
        lower,
    };
    search.run(0, 0);
    let coloring = Coloring::new(search.best_coloring).expect("search labels are contiguous");
    debug_assert!(is_proper(graph, &coloring));
    Ok((search.best, coloring))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coloring_validation() {
        assert!(Coloring::new(vec![0, 2]).is_err());
        let c = Coloring::new(vec![1, 0, 1]).unwrap();
        assert_eq!(c.num_colors(), 2);
        assert_eq!(c.classes(), vec![vec![1], vec![0, 2]]);
        assert_eq!(c.largest_class(), 1);
        assert_eq!(Coloring::from_labels(&[7, 3, 7]).to_vec(), vec![0, 1, 0]);
        assert_eq!(serde_json::to_string(&c).unwrap(), "[1,0,1]");
    }

    #[test]
    fn properness() {
        assert!(is_proper(&Graph::empty(4), &Coloring::constant(4)));
        assert!(!is_proper(&Graph::complete(3), &Coloring::new(vec![0, 1, 0]).unwrap()));
        assert!(is_proper(&Graph::cycle(7), &Coloring::new(vec![0, 1, 0, 1, 0, 1, 2]).unwrap()));
    }

    #[test]
    fn greedy_examples() {
        for strategy in [GreedyStrategy::IndexOrder, GreedyStrategy::Saturation] {
            assert_eq!(greedy_coloring(&Graph::complete(5), strategy).num_colors(), 5);
            assert_eq!(greedy_coloring(&Graph::empty(5), strategy).num_colors(), 1);
        }
        let c7 = greedy_coloring(&Graph::cycle(7), GreedyStrategy::Saturation);
        assert!(is_proper(&Graph::cycle(7), &c7));
        assert_eq!(c7.num_colors(), 3);
    }

    #[test]
    fn exact_examples() {
        assert_eq!(chromatic_number_exact(&Graph::cycle(7), 40).unwrap().0, 3);
        assert_eq!(chromatic_number_exact(&Graph::cycle(8), 40).unwrap().0, 2);
        assert_eq!(chromatic_number_exact(&Graph::complete(6), 40).unwrap().0, 6);
        assert_eq!(chromatic_number_exact(&Graph::empty(3), 40).unwrap().0, 1);
        assert!(chromatic_number_exact(&Graph::empty(41), 40).unwrap_err().is_scale_cap());
        assert_eq!(chromatic_number_exact(&Graph::empty(0), 40).unwrap().0, 0);
    }

    #[test]
    fn clique_bound() {
        assert_eq!(greedy_clique(&Graph::complete(5)).len(), 5);
        assert_eq!(greedy_clique(&Graph::cycle(5)).len(), 2);
        assert_eq!(greedy_clique(&Graph::empty(3)).len(), 1);
    }
}
