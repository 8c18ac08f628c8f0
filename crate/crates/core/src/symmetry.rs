//! Exact automorphism groups by colour refinement and individualization.
//!
//! The search pairs a fixed "left" branch (always individualizing the first
//! vertex of the first non-singleton cell) with every compatible "right"
//! branch. Refinement is one-dimensional: cells are split by the number of
//! neighbours each vertex has in a splitter cell, subcells ordered by that
//! count. Every discrete leaf gives a candidate map which is kept iff it
//! preserves edges, so each automorphism is produced exactly once, in a
//! deterministic order.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::cayley::{inversion, translation, CayleyGraph, Graph};
use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::group::GroupSpec;
pub use crate::perm::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryCaps {
    /// Largest vertex count for exact automorphism computation.
    pub max_vertices: usize,
    /// Largest automorphism group that is enumerated element by element.
    pub max_group_order: usize,
}

impl Default for SymmetryCaps {
    fn default() -> Self {
        SymmetryCaps {
            max_vertices: 64,
            max_group_order: 200_000,
        }
    }
}

/// A permutation group given by its complete element list (sorted, identity first).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismGroup {
    elements: Vec<Permutation>,
    generators: Vec<Permutation>,
}

impl AutomorphismGroup {
    /// Sorts and deduplicates. The caller asserts the list is a group.
    pub fn from_elements(mut elements: Vec<Permutation>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        let generators = generating_set(&elements);
        AutomorphismGroup { elements, generators }
    }

    pub fn trivial(n: usize) -> Self {
        AutomorphismGroup::from_elements(vec![Permutation::identity(n)])
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.elements.first().map_or(0, Permutation::len)
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn contains(&self, sigma: &Permutation) -> bool {
        self.elements.binary_search(sigma).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &AutomorphismGroup) -> bool {
        self.elements.iter().all(|s| other.contains(s))
    }

    /// Identity, inverses and closure, checked exhaustively.
    pub fn satisfies_group_axioms(&self) -> bool {
        let Some(first) = self.elements.first() else {
            return false;
        };
        first.is_identity()
            && self.elements.iter().all(|a| self.contains(&a.inverse()))
            && self
                .elements
                .iter()
                .all(|a| self.elements.iter().all(|b| self.contains(&a.compose(b))))
    }

    fn filter(&self, keep: impl Fn(&Permutation) -> bool) -> AutomorphismGroup {
        AutomorphismGroup::from_elements(self.elements.iter().filter(|s| keep(s)).cloned().collect())
    }
}

/// Greedy generating set: each element not in the span of the previous generators is added.
fn generating_set(elements: &[Permutation]) -> Vec<Permutation> {
    let Some(first) = elements.first() else {
        return Vec::new();
    };
    let identity = Permutation::identity(first.len());
    let mut span: HashSet<Permutation> = HashSet::from([identity.clone()]);
    let mut gens: Vec<Permutation> = Vec::new();
    for e in elements {
        if span.contains(e) {
            continue;
        }
        gens.push(e.clone());
        let mut frontier: Vec<Permutation> = span.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = g.compose(&x);
                if span.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

/// Maps `x ↦ ±x + g`, of order `2n`, or `n` when every element is an involution.
pub fn semidirect_elements(spec: &GroupSpec) -> AutomorphismGroup {
    let inv = inversion(spec);
    let mut elements = Vec::with_capacity(2 * spec.order());
    for g in 0..spec.order() {
        let t = translation(spec, g);
        elements.push(t.compose(&inv));
        elements.push(t);
    }
    AutomorphismGroup::from_elements(elements)
}

#[derive(Clone)]
struct Partition {
    cells: Vec<Vec<usize>>,
    trace: u64,
}

impl Partition {
    fn unit(n: usize) -> Self {
        Partition {
            cells: if n == 0 { Vec::new() } else { vec![(0..n).collect()] },
            trace: 0,
        }
    }

    fn is_discrete(&self) -> bool {
        self.cells.iter().all(|c| c.len() == 1)
    }

    fn sizes_match(&self, other: &Partition) -> bool {
        self.trace == other.trace
            && self.cells.len() == other.cells.len()
            && self.cells.iter().zip(&other.cells).all(|(a, b)| a.len() == b.len())
    }

    fn individualize(&self, cell: usize, v: usize) -> Partition {
        let mut cells = Vec::with_capacity(self.cells.len() + 1);
        cells.extend_from_slice(&self.cells[..cell]);
        cells.push(vec![v]);
        cells.push(self.cells[cell].iter().copied().filter(|&x| x != v).collect());
        cells.extend_from_slice(&self.cells[cell + 1..]);
        Partition {
            cells,
            trace: fold(self.trace, cell as u64 + 1),
        }
    }
}

#[inline]
fn fold(h: u64, x: u64) -> u64 {
    (h ^ x).wrapping_mul(0x0000_0100_0000_01b3).rotate_left(13)
}

/// Splits cells by neighbour counts until equitable. The trace records every split.
fn refine(graph: &Graph, mut p: Partition) -> Partition {
    let n = graph.order();
    loop {
        let mut changed = false;
        let mut s = 0;
        while s < p.cells.len() {
            let splitter = BitSet::from_indices(n, p.cells[s].iter().copied());
            let mut next = Vec::with_capacity(p.cells.len());
            for (ci, cell) in p.cells.iter().enumerate() {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<(usize, usize)> = cell
                    .iter()
                    .map(|&v| (graph.neighbors(v).intersection_count(&splitter), v))
                    .collect();
                if keyed.iter().all(|&(k, _)| k == keyed[0].0) {
                    next.push(cell.clone());
                    continue;
                }
                keyed.sort_unstable();
                changed = true;
                p.trace = fold(p.trace, ((s as u64) << 40) ^ ((ci as u64) << 20));
                let mut start = 0;
                while start < keyed.len() {
                    let key = keyed[start].0;
                    let end = start + keyed[start..].iter().take_while(|&&(k, _)| k == key).count();
                    p.trace = fold(p.trace, ((key as u64) << 20) ^ (end - start) as u64);
                    next.push(keyed[start..end].iter().map(|&(_, v)| v).collect());
                    start = end;
                }
            }
            p.cells = next;
            s += 1;
        }
        if !changed {
            return p;
        }
    }
}

struct Search<'a> {
    graph: &'a Graph,
    limit: usize,
    found: Vec<Permutation>,
    overflow: bool,
}

impl Search<'_> {
    fn descend(&mut self, left: &Partition, right: &Partition) {
        if self.overflow || !left.sizes_match(right) {
            return;
        }
        if left.is_discrete() {
            let mut images = vec![0u32; self.graph.order()];
            for (l, r) in left.cells.iter().zip(&right.cells) {
                images[l[0]] = r[0] as u32;
            }
            let sigma = Permutation::from_images_unchecked(images);
            if self.graph.is_automorphism(&sigma) {
                if self.found.len() == self.limit {
                    self.overflow = true;
                    return;
                }
                self.found.push(sigma);
            }
            return;
        }
        let cell = left.cells.iter().position(|c| c.len() > 1).unwrap();
        let v = left.cells[cell][0];
        let left_child = refine(self.graph, left.individualize(cell, v));
        for &w in &right.cells[cell] {
            let right_child = refine(self.graph, right.individualize(cell, w));
            self.descend(&left_child, &right_child);
            if self.overflow {
                return;
            }
        }
    }
}

/// Automorphisms fixing each of `fixed` pointwise; `None` if there are more than `limit`.
fn search_automorphisms(graph: &Graph, fixed: &[usize], limit: usize) -> Option<Vec<Permutation>> {
    let mut root = refine(graph, Partition::unit(graph.order()));
    for &v in fixed {
        let cell = root.cells.iter().position(|c| c.contains(&v)).unwrap();
        root = refine(graph, root.individualize(cell, v));
    }
    let mut search = Search {
        graph,
        limit,
        found: Vec::new(),
        overflow: false,
    };
    search.descend(&root, &root);
    (!search.overflow).then_some(search.found)
}

fn check_vertices(graph: &Graph, caps: &SymmetryCaps) -> Result<()> {
    if graph.order() > caps.max_vertices {
        return Err(Error::ScaleCap {
            what: "automorphism search vertex count",
            cap: caps.max_vertices,
            actual: graph.order(),
        });
    }
    Ok(())
}

/// The full automorphism group of an arbitrary graph.
pub fn automorphism_group(graph: &Graph, caps: &SymmetryCaps) -> Result<AutomorphismGroup> {
    check_vertices(graph, caps)?;
    let elements =
        search_automorphisms(graph, &[], caps.max_group_order).ok_or(Error::ScaleCap {
            what: "automorphism group order",
            cap: caps.max_group_order,
            actual: caps.max_group_order + 1,
        })?;
    Ok(AutomorphismGroup::from_elements(elements))
}

/// The full automorphism group of a Cayley graph; always contains `A ⋊ <i>`.
pub fn compute_automorphism_group(graph: &CayleyGraph, caps: &SymmetryCaps) -> Result<AutomorphismGroup> {
    let aut = automorphism_group(graph.graph(), caps)?;
    assert!(
        semidirect_elements(graph.spec()).is_subgroup_of(&aut),
        "automorphism search missed a translation or the inversion"
    );
    Ok(aut)
}

/// Order of the stabilizer of `v`, or `None` if it exceeds `limit`.
pub fn stabilizer_order(graph: &Graph, v: usize, limit: usize) -> Option<usize> {
    search_automorphisms(graph, &[v], limit).map(|s| s.len())
}

/// `|Aut(Γ)| = n · |Stab(0)|` by vertex transitivity; `None` if the stabilizer exceeds `limit`.
pub fn cayley_automorphism_order(graph: &CayleyGraph, caps: &SymmetryCaps, limit: usize) -> Result<Option<usize>> {
    check_vertices(graph.graph(), caps)?;
    Ok(stabilizer_order(graph.graph(), 0, limit).map(|s| s * graph.order()))
}

/// True iff `Aut(Γ) = A ⋊ <i>`. Decided through the stabilizer of vertex 0,
/// which must be exactly `{1, i}` (or `{1}` for elementary abelian 2-groups).
pub fn is_small(graph: &CayleyGraph, caps: &SymmetryCaps) -> Result<bool> {
    check_vertices(graph.graph(), caps)?;
    let expected = if graph.spec().is_elementary_abelian_2() { 1 } else { 2 };
    Ok(stabilizer_order(graph.graph(), 0, expected).is_some())
}

/// Elements mapping every color class onto itself.
pub fn stabilizer_of_partition(aut: &AutomorphismGroup, coloring: &Coloring) -> AutomorphismGroup {
    aut.filter(|s| (0..coloring.len()).all(|v| coloring.color(s.apply(v)) == coloring.color(v)))
}

/// Elements mapping `class` onto itself.
pub fn stabilizer_of_class(aut: &AutomorphismGroup, class: &BitSet) -> AutomorphismGroup {
    aut.filter(|s| s.maps_onto_itself(class))
}

pub fn fixed_points(sigma: &Permutation) -> Vec<usize> {
    sigma.fixed_points()
}

pub fn orbit_count_on_class(sigma: &Permutation, class: &BitSet) -> Result<usize> {
    sigma.orbit_count_on_class(class)
}
