//! Decidable structural events of a connection set: coset unions, normalizing
//! group automorphisms, and good pairs.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{enumerate_subgroups, for_each_group_automorphism, EnumerationCaps, Family, GroupSpec, Subgroup};
use crate::perm::Permutation;
use crate::sampler::ConnectionSet;

/// Witness `(H, K)` for the coset-union event, with the derived counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetEventCensus {
    pub h: usize,
    pub k: usize,
    /// `|K ∩ O₂|`.
    pub j: usize,
    /// `|{a ∈ A∖K : 2a ∈ H}|`.
    pub i: usize,
    /// Elements of order exactly two in `H`.
    pub l: usize,
    pub subgroup_h: Vec<usize>,
    pub subgroup_k: Vec<usize>,
}

/// The admissible pairs `1 < H ≤ K < A` in scan order, computed once per group.
#[derive(Debug, Clone)]
pub struct CosetPairs {
    spec: GroupSpec,
    pairs: Vec<(Subgroup, Subgroup)>,
}

impl CosetPairs {
    pub fn new(spec: &GroupSpec, caps: &EnumerationCaps) -> Result<Self> {
        let n = spec.order();
        let proper: Vec<Subgroup> = enumerate_subgroups(spec, caps)?
            .into_iter()
            .filter(|s| s.order() > 1 && s.order() < n)
            .collect();
        let mut pairs = Vec::new();
        for h in &proper {
            for k in &proper {
                if h.is_subgroup_of(k) {
                    pairs.push((h.clone(), k.clone()));
                }
            }
        }
        pairs.sort_by(|(h1, k1), (h2, k2)| {
            (h1.order(), k1.order(), h1.elements(), k1.elements()).cmp(&(h2.order(), k2.order(), h2.elements(), k2.elements()))
        });
        Ok(CosetPairs {
            spec: spec.clone(),
            pairs,
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// First pair in scan order for which `S∖K` is a union of `H`-cosets.
    pub fn first_witness(&self, connection: &ConnectionSet) -> Result<Option<CosetEventCensus>> {
        if connection.spec() != &self.spec {
            return Err(Error::SpecMismatch);
        }
        let spec = &self.spec;
        let s = connection.to_vec();
        for (h, k) in &self.pairs {
            let closed = s
                .iter()
                .filter(|&&x| !k.contains(x))
                .all(|&x| h.elements().iter().all(|&y| connection.contains(spec.add_index(x, y))));
            if closed {
                return Ok(Some(census(spec, h, k)));
            }
        }
        Ok(None)
    }
}

fn census(spec: &GroupSpec, h: &Subgroup, k: &Subgroup) -> CosetEventCensus {
    let n = spec.order();
    let j = k.elements().iter().filter(|&&a| spec.order_of_index(a) <= 2).count();
    let i = (0..n)
        .filter(|&a| !k.contains(a) && h.contains(spec.add_index(a, a)))
        .count();
    let l = h.elements().iter().filter(|&&a| spec.order_of_index(a) == 2).count();
    CosetEventCensus {
        h: h.order(),
        k: k.order(),
        j,
        i,
        l,
        subgroup_h: h.elements().to_vec(),
        subgroup_k: k.elements().to_vec(),
    }
}

pub fn coset_union_event(
    spec: &GroupSpec,
    connection: &ConnectionSet,
    caps: &EnumerationCaps,
) -> Result<Option<CosetEventCensus>> {
    CosetPairs::new(spec, caps)?.first_witness(connection)
}

fn normalizes(phi: &Permutation, connection: &ConnectionSet) -> bool {
    connection.members().iter().all(|x| connection.contains(phi.apply(x)))
}

fn is_identity_or_inversion(spec: &GroupSpec, phi: &Permutation) -> bool {
    phi.is_identity() || (0..spec.order()).all(|x| phi.apply(x) == spec.neg_index(x))
}

/// First group automorphism other than `1` and `i` with `φ(S) = S`.
pub fn normalizer_event(
    spec: &GroupSpec,
    connection: &ConnectionSet,
    caps: &EnumerationCaps,
) -> Result<Option<Permutation>> {
    if connection.spec() != spec {
        return Err(Error::SpecMismatch);
    }
    let mut witness = None;
    for_each_group_automorphism(spec, caps, |phi| {
        if !is_identity_or_inversion(spec, phi) && normalizes(phi, connection) {
            witness = Some(phi.clone());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(witness)
}

/// The same scan over a precomputed automorphism list.
pub fn normalizer_event_in(
    spec: &GroupSpec,
    automorphisms: &[Permutation],
    connection: &ConnectionSet,
) -> Option<Permutation> {
    automorphisms
        .iter()
        .find(|phi| !is_identity_or_inversion(spec, phi) && normalizes(phi, connection))
        .cloned()
}

/// Type II groups never have a good pair; a Type I group has one iff it is
/// cyclic and `S` is empty or everything but `0`.
pub fn good_pair_event(spec: &GroupSpec, connection: &ConnectionSet) -> Result<bool> {
    if connection.spec() != spec {
        return Err(Error::SpecMismatch);
    }
    match spec.family() {
        Family::TypeII => Ok(false),
        Family::TypeI => Ok(spec.is_cyclic() && (connection.is_empty() || connection.size() == spec.order() - 1)),
        Family::Other => Err(Error::UnsupportedFamily(format!("good pairs are defined for Type I and Type II groups, not {spec}"))),
    }
}
