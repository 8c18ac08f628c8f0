//! Cayley graphs `Γ(A, S)` on packed bitrow adjacency.

use std::fmt::Write as _;

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::perm::Permutation;
use crate::sampler::ConnectionSet;

/// A simple undirected graph on `0..n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    rows: Vec<BitSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            rows: vec![BitSet::new(n); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n);
        }
        g
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Ignores self-loops.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.rows[u].insert(v);
            self.rows[v].insert(u);
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &BitSet {
        &self.rows[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.order()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(BitSet::count).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.order()).flat_map(move |u| self.rows[u].iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| u == v || !self.adjacent(u, v)))
    }

    /// Checks edge preservation; `σ` is bijective so this decides membership in `Aut`.
    pub fn is_automorphism(&self, sigma: &Permutation) -> bool {
        sigma.len() == self.order()
            && (0..self.order()).all(|u| {
                let su = sigma.apply(u);
                self.rows[u].count() == self.rows[su].count()
                    && self.rows[u].iter().all(|v| self.rows[su].contains(sigma.apply(v)))
            })
    }

    /// DIMACS edge format: `p edge n m` then one 1-based `e u v` line per edge.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p edge {} {}", self.order(), self.edge_count()).unwrap();
        for (u, v) in self.edges() {
            writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
        }
        out
    }
}

/// `Γ(A, S)`: `g ~ h` iff `h - g ∈ S`.
#[derive(Clone, Debug)]
pub struct CayleyGraph {
    spec: GroupSpec,
    connection: ConnectionSet,
    graph: Graph,
}

impl CayleyGraph {
    pub fn build(spec: &GroupSpec, connection: &ConnectionSet) -> Result<Self> {
        if connection.spec() != spec {
            return Err(Error::SpecMismatch);
        }
        let n = spec.order();
        let members = connection.to_vec();
        let mut rows = Vec::with_capacity(n);
        for g in 0..n {
            rows.push(BitSet::from_indices(n, members.iter().map(|&s| spec.add_index(g, s))));
        }
        Ok(CayleyGraph {
            spec: spec.clone(),
            connection: connection.clone(),
            graph: Graph { rows },
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn connection(&self) -> &ConnectionSet {
        &self.connection
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn order(&self) -> usize {
        self.graph.order()
    }

    /// `|S|`; the graph is regular.
    pub fn degree(&self) -> usize {
        self.connection.size()
    }

    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        self.graph.is_independent(vertices)
    }

    /// `x ↦ x + g`.
    pub fn translation(&self, g: usize) -> Permutation {
        translation(&self.spec, g)
    }

    /// `x ↦ -x`.
    pub fn inversion(&self) -> Permutation {
        inversion(&self.spec)
    }
}

pub fn translation(spec: &GroupSpec, g: usize) -> Permutation {
    Permutation::from_images_unchecked((0..spec.order()).map(|x| spec.add_index(x, g) as u32).collect())
}

pub fn inversion(spec: &GroupSpec) -> Permutation {
    Permutation::from_images_unchecked((0..spec.order()).map(|x| spec.neg_index(x) as u32).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cayley(group: &str, set: &[usize]) -> CayleyGraph {
        let spec: GroupSpec = group.parse().unwrap();
        let s = ConnectionSet::from_indices(&spec, set.iter().copied()).unwrap();
        CayleyGraph::build(&spec, &s).unwrap()
    }

    #[test]
    fn seven_cycle() {
        let c7 = cayley("7", &[1, 6]);
        assert_eq!(c7.graph(), &Graph::cycle(7));
        assert!((0..7).all(|v| c7.graph().degree(v) == 2));
        assert!(c7.is_independent(&[0, 2, 4]));
        assert!(!c7.is_independent(&[0, 1]));
    }

    #[test]
    fn edgeless_and_complete() {
        let e = cayley("5", &[]);
        assert_eq!(e.graph().edge_count(), 0);
        assert!(e.is_independent(&[0, 1, 2, 3, 4]));
        let k4 = cayley("2,2", &[1, 2, 3]);
        assert_eq!(k4.graph(), &Graph::complete(4));
        assert!(!k4.is_independent(&[1, 3]));
    }

    #[test]
    fn translations_and_inversion() {
        let c7 = cayley("7", &[1, 6]);
        assert!(c7.translation(0).is_identity());
        let inv = c7.inversion();
        assert_eq!(inv.fixed_points(), vec![0]);
        assert_eq!(inv.to_vec(), vec![0, 6, 5, 4, 3, 2, 1]);
        assert!(c7.graph().is_automorphism(&inv));
        for g in 0..7 {
            assert!(c7.graph().is_automorphism(&c7.translation(g)));
        }
        let v8 = cayley("2,2,2", &[1, 2]);
        assert!(v8.inversion().is_identity());
    }

    #[test]
    fn dimacs_export() {
        let c = cayley("4", &[1, 3]);
        assert_eq!(c.graph().to_dimacs(), "p edge 4 4\ne 1 2\ne 1 4\ne 2 3\ne 3 4\n");
    }

    #[test]
    fn build_rejects_other_spec() {
        let z7: GroupSpec = "7".parse().unwrap();
        let z5: GroupSpec = "5".parse().unwrap();
        let s = ConnectionSet::empty(&z5);
        assert_eq!(CayleyGraph::build(&z7, &s).unwrap_err(), Error::SpecMismatch);
    }
}
