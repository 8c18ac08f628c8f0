//! Finite abelian groups presented as direct products of cyclic factors.
//!
//! Elements are identified by a canonical mixed-radix index: the element with
//! coordinates `(c_0, .., c_{k-1})` has index `c_0 + d_0 * (c_1 + d_1 * (...))`,
//! so the first factor varies fastest. Every set type in the crate stores these
//! indices.

use std::collections::HashSet;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// The two group families covered by the constructive results, plus everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `gcd(n, 6) = 1`.
    TypeI,
    /// `Z_2^r x N` with `N` of odd order, non-cyclic.
    TypeII,
    Other,
}

/// Caps on the exhaustive structural enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationCaps {
    /// Largest group order for subgroup and automorphism enumeration.
    pub max_order: usize,
    /// Largest number of group automorphisms visited or listed.
    pub max_automorphisms: usize,
    pub max_subgroups: usize,
}

impl Default for EnumerationCaps {
    fn default() -> Self {
        EnumerationCaps {
            max_order: 200,
            max_automorphisms: 100_000,
            max_subgroups: 100_000,
        }
    }
}

/// A finite abelian group `Z_{d_0} x ... x Z_{d_{k-1}}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Vec<usize>,
    order: usize,
    family: Family,
    tag: u64,
}

/// A group element: canonical index plus a fingerprint of its group.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Element {
    index: usize,
    tag: u64,
}

impl Element {
    #[inline]
    pub fn index(self) -> usize {
        self.index
    }
}

fn fingerprint(factors: &[usize]) -> u64 {
    // FNV-1a over the factor list
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &d in factors {
        for b in (d as u64).to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Largest group order accepted by the parser; beyond this nothing in the crate is tractable.
const MAX_GROUP_ORDER: usize = 1 << 24;

impl GroupSpec {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("empty factor list".into()));
        }
        let mut order: usize = 1;
        for &d in &factors {
            if d < 2 {
                return Err(Error::InvalidGroup(format!("factor {d} is smaller than 2")));
            }
            order = order
                .checked_mul(d)
                .filter(|&n| n <= MAX_GROUP_ORDER)
                .ok_or_else(|| Error::InvalidGroup("group order too large".into()))?;
        }
        let family = classify_factors(&factors);
        let tag = fingerprint(&factors);
        Ok(GroupSpec {
            factors,
            order,
            family,
            tag,
        })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        GroupSpec::new(vec![n])
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// True iff the group is cyclic (factors pairwise coprime).
    pub fn is_cyclic(&self) -> bool {
        prime_divisors(self.order)
            .into_iter()
            .all(|p| self.factors.iter().filter(|&&d| d % p == 0).count() <= 1)
    }

    /// True iff every nonzero element has order 2.
    pub fn is_elementary_abelian_2(&self) -> bool {
        self.factors.iter().all(|&d| d == 2)
    }

    pub fn zero(&self) -> Element {
        self.wrap(0)
    }

    pub fn element(&self, index: usize) -> Result<Element> {
        if index >= self.order {
            return Err(Error::IndexOutOfRange {
                index,
                order: self.order,
            });
        }
        Ok(self.wrap(index))
    }

    pub fn from_coords(&self, coords: &[usize]) -> Result<Element> {
        if coords.len() != self.factors.len() || coords.iter().zip(&self.factors).any(|(c, d)| c >= d)
        {
            return Err(Error::Parameter(format!(
                "coordinates {coords:?} invalid for factors {:?}",
                self.factors
            )));
        }
        Ok(self.wrap(self.encode(coords)))
    }

    pub fn coords(&self, a: Element) -> Result<Vec<usize>> {
        self.check(a)?;
        Ok(self.decode(a.index))
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order).map(|i| self.wrap(i))
    }

    pub fn add(&self, a: Element, b: Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.wrap(self.add_index(a.index, b.index)))
    }

    pub fn neg(&self, a: Element) -> Result<Element> {
        self.check(a)?;
        Ok(self.wrap(self.neg_index(a.index)))
    }

    /// Least `m >= 1` with `m * a = 0`.
    pub fn order_of(&self, a: Element) -> Result<usize> {
        self.check(a)?;
        Ok(self.order_of_index(a.index))
    }

    #[inline]
    fn wrap(&self, index: usize) -> Element {
        Element {
            index,
            tag: self.tag,
        }
    }

    fn check(&self, a: Element) -> Result<()> {
        if a.tag != self.tag || a.index >= self.order {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    pub(crate) fn encode(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.factors)
            .rev()
            .fold(0, |acc, (&c, &d)| acc * d + c)
    }

    pub(crate) fn decode(&self, mut index: usize) -> Vec<usize> {
        self.factors
            .iter()
            .map(|&d| {
                let c = index % d;
                index /= d;
                c
            })
            .collect()
    }

    // Index-level arithmetic for the hot paths. Inputs must be in range.

    #[inline]
    pub fn add_index(&self, mut a: usize, mut b: usize) -> usize {
        let mut out = 0;
        let mut stride = 1;
        for &d in &self.factors {
            let c = (a % d + b % d) % d;
            out += c * stride;
            stride *= d;
            a /= d;
            b /= d;
        }
        out
    }

    #[inline]
    pub fn neg_index(&self, mut a: usize) -> usize {
        let mut out = 0;
        let mut stride = 1;
        for &d in &self.factors {
            let c = (d - a % d) % d;
            out += c * stride;
            stride *= d;
            a /= d;
        }
        out
    }

    #[inline]
    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        self.add_index(a, self.neg_index(b))
    }

    /// `k * a`.
    #[inline]
    pub fn scale_index(&self, k: usize, mut a: usize) -> usize {
        let mut out = 0;
        let mut stride = 1;
        for &d in &self.factors {
            let c = ((a % d) * (k % d)) % d;
            out += c * stride;
            stride *= d;
            a /= d;
        }
        out
    }

    pub fn order_of_index(&self, a: usize) -> usize {
        // lcm over coordinates of d / gcd(c, d)
        self.decode(a)
            .into_iter()
            .zip(&self.factors)
            .fold(1, |acc, (c, &d)| {
                let o = d / gcd(c, d);
                acc / gcd(acc, o) * o
            })
    }

    /// `O_2 = {a : 2a = 0}`, including zero, ascending.
    pub fn involution_set(&self) -> Vec<usize> {
        (0..self.order)
            .filter(|&a| self.add_index(a, a) == 0)
            .collect()
    }

    /// `m = |O_2|`.
    pub fn involution_count(&self) -> usize {
        self.involution_set().len()
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({self})")
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Parses a comma-separated factor list such as `"2,2,9"`; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::InvalidGroup("empty group string".into()));
        }
        let factors = cleaned
            .split(',')
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| Error::InvalidGroup(format!("bad factor {tok:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        GroupSpec::new(factors)
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn classify_factors(factors: &[usize]) -> Family {
    let n: usize = factors.iter().product();
    if gcd(n, 6) == 1 {
        return Family::TypeI;
    }
    // 2-part must be elementary abelian
    if factors.iter().any(|&d| d % 4 == 0) {
        return Family::Other;
    }
    let odd_parts: Vec<usize> = factors
        .iter()
        .map(|&d| if d % 2 == 0 { d / 2 } else { d })
        .collect();
    let odd_order: usize = odd_parts.iter().product();
    if odd_order == 1 {
        return Family::Other;
    }
    let odd_cyclic = prime_divisors(odd_order)
        .into_iter()
        .all(|p| odd_parts.iter().filter(|&&d| d % p == 0).count() <= 1);
    if odd_cyclic {
        Family::Other
    } else {
        Family::TypeII
    }
}

pub fn classify(spec: &GroupSpec) -> Family {
    spec.family
}

/// Visits every automorphism of the group as a permutation of element indices.
///
/// Images of the canonical generators `e_i` are chosen among elements of order
/// exactly `d_i`; the partial map on `<e_0..e_j>` is kept injective, so every
/// completed map is a bijective homomorphism. Returns `Ok(true)` if the visitor
/// stopped early.
pub fn for_each_group_automorphism<F>(spec: &GroupSpec, caps: &EnumerationCaps, mut visit: F) -> Result<bool>
where
    F: FnMut(&Permutation) -> ControlFlow<()>,
{
    let n = spec.order();
    if n > caps.max_order {
        return Err(Error::ScaleCap {
            what: "automorphism enumeration group order",
            cap: caps.max_order,
            actual: n,
        });
    }
    let candidates: Vec<Vec<usize>> = spec
        .factors()
        .iter()
        .map(|&d| (0..n).filter(|&a| spec.order_of_index(a) == d).collect())
        .collect();
    let mut visited = 0usize;
    let mut partial = vec![0usize];
    let stopped = extend_automorphism(spec, caps, &candidates, 0, &mut partial, &mut visited, &mut visit)?;
    Ok(stopped)
}

fn extend_automorphism<F>(
    spec: &GroupSpec,
    caps: &EnumerationCaps,
    candidates: &[Vec<usize>],
    depth: usize,
    partial: &mut Vec<usize>,
    visited: &mut usize,
    visit: &mut F,
) -> Result<bool>
where
    F: FnMut(&Permutation) -> ControlFlow<()>,
{
    if depth == candidates.len() {
        *visited += 1;
        if *visited > caps.max_automorphisms {
            return Err(Error::ScaleCap {
                what: "group automorphism count",
                cap: caps.max_automorphisms,
                actual: *visited,
            });
        }
        let perm = Permutation::from_images_unchecked(partial.iter().map(|&x| x as u32).collect());
        return Ok(visit(&perm).is_break());
    }
    let d = spec.factors()[depth];
    let len = partial.len();
    let image = BitSet::from_indices(spec.order(), partial.iter().copied());
    for &a in &candidates[depth] {
        // c * a must avoid the image subgroup for 0 < c < d
        let mut multiple = a;
        let mut ok = true;
        for _ in 1..d {
            if image.contains(multiple) {
                ok = false;
                break;
            }
            multiple = spec.add_index(multiple, a);
        }
        if !ok {
            continue;
        }
        let mut shift = a;
        for _ in 1..d {
            for r in 0..len {
                let v = spec.add_index(partial[r], shift);
                partial.push(v);
            }
            shift = spec.add_index(shift, a);
        }
        let stopped = extend_automorphism(spec, caps, candidates, depth + 1, partial, visited, visit)?;
        partial.truncate(len);
        if stopped {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Complete list of group automorphisms, in enumeration order (identity first).
pub fn enumerate_group_automorphisms(spec: &GroupSpec, caps: &EnumerationCaps) -> Result<Vec<Permutation>> {
    let mut out = Vec::new();
    for_each_group_automorphism(spec, caps, |p| {
        out.push(p.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// A subgroup, stored as its sorted element indices plus a membership bitset.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(from = "SubgroupRepr", into = "SubgroupRepr")]
pub struct Subgroup {
    elements: Vec<usize>,
    members: BitSet,
}

#[derive(Serialize, Deserialize)]
struct SubgroupRepr {
    group_order: usize,
    elements: Vec<usize>,
}

impl From<SubgroupRepr> for Subgroup {
    fn from(r: SubgroupRepr) -> Self {
        Subgroup::from_members(BitSet::from_indices(r.group_order, r.elements))
    }
}

impl From<Subgroup> for SubgroupRepr {
    fn from(s: Subgroup) -> Self {
        SubgroupRepr {
            group_order: s.members.len(),
            elements: s.elements,
        }
    }
}

impl Subgroup {
    fn from_members(members: BitSet) -> Self {
        Subgroup {
            elements: members.to_vec(),
            members,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn members(&self) -> &BitSet {
        &self.members
    }

    pub fn contains(&self, a: usize) -> bool {
        self.members.contains(a)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.is_subset(&other.members)
    }

    /// The coset `a + H`, ascending.
    pub fn coset(&self, spec: &GroupSpec, a: usize) -> Vec<usize> {
        let mut c: Vec<usize> = self.elements.iter().map(|&h| spec.add_index(a, h)).collect();
        c.sort_unstable();
        c
    }

    /// Partition of the group into cosets, ordered by smallest representative.
    pub fn cosets(&self, spec: &GroupSpec) -> Vec<Vec<usize>> {
        let mut assigned = BitSet::new(spec.order());
        let mut out = Vec::new();
        for a in 0..spec.order() {
            if assigned.contains(a) {
                continue;
            }
            let c = self.coset(spec, a);
            for &x in &c {
                assigned.insert(x);
            }
            out.push(c);
        }
        out
    }
}

/// `<H, g>` as a membership set.
fn join(spec: &GroupSpec, h: &BitSet, g: usize) -> BitSet {
    let mut out = h.clone();
    let mut shift = g;
    while shift != 0 {
        for x in h.iter() {
            out.insert(spec.add_index(x, shift));
        }
        shift = spec.add_index(shift, g);
    }
    out
}

/// All subgroups, sorted by order and then lexicographically by element list.
pub fn enumerate_subgroups(spec: &GroupSpec, caps: &EnumerationCaps) -> Result<Vec<Subgroup>> {
    let n = spec.order();
    if n > caps.max_order {
        return Err(Error::ScaleCap {
            what: "subgroup enumeration group order",
            cap: caps.max_order,
            actual: n,
        });
    }
    let trivial = BitSet::from_indices(n, [0]);
    let mut seen: HashSet<BitSet> = HashSet::new();
    seen.insert(trivial.clone());
    let mut stack = vec![trivial];
    while let Some(h) = stack.pop() {
        let mut covered = h.clone();
        for g in 0..n {
            if covered.contains(g) {
                continue;
            }
            // <H, g> depends only on the coset g + H
            for x in h.iter() {
                covered.insert(spec.add_index(x, g));
            }
            let k = join(spec, &h, g);
            if !seen.contains(&k) {
                if seen.len() >= caps.max_subgroups {
                    return Err(Error::ScaleCap {
                        what: "subgroup count",
                        cap: caps.max_subgroups,
                        actual: seen.len() + 1,
                    });
                }
                seen.insert(k.clone());
                stack.push(k);
            }
        }
    }
    let mut out: Vec<Subgroup> = seen.into_iter().map(Subgroup::from_members).collect();
    out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    #[test]
    fn parse_ignores_whitespace() {
        let g = spec(" 2, 2 ,9 ");
        assert_eq!(g.factors(), &[2, 2, 9]);
        assert_eq!(g.order(), 36);
        assert_eq!(g.to_string(), "2,2,9");
        assert!("".parse::<GroupSpec>().is_err());
        assert!("2,1".parse::<GroupSpec>().is_err());
        assert!("2,x".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn add_examples() {
        let z6 = spec("6");
        let s = z6.add(z6.element(4).unwrap(), z6.element(5).unwrap()).unwrap();
        assert_eq!(s.index(), 3);

        let v4 = spec("2,2");
        let a = v4.from_coords(&[1, 0]).unwrap();
        let b = v4.from_coords(&[1, 1]).unwrap();
        assert_eq!(v4.coords(v4.add(a, b).unwrap()).unwrap(), vec![0, 1]);

        for a in z6.elements() {
            assert_eq!(z6.add(a, z6.zero()).unwrap(), a);
        }
    }

    #[test]
    fn mismatched_specs_are_rejected() {
        let z6 = spec("6");
        let z7 = spec("7");
        let a = z6.element(1).unwrap();
        let b = z7.element(1).unwrap();
        assert_eq!(z6.add(a, b), Err(Error::SpecMismatch));
        assert_eq!(z7.neg(a), Err(Error::SpecMismatch));
        // same order, different presentation
        let z2z3 = spec("2,3");
        assert_eq!(z2z3.order_of(a), Err(Error::SpecMismatch));
    }

    #[test]
    fn neg_and_order() {
        let z6 = spec("6");
        assert_eq!(z6.order_of(z6.element(2).unwrap()).unwrap(), 3);
        assert_eq!(z6.order_of(z6.zero()).unwrap(), 1);
        let v4 = spec("2,2");
        for a in v4.elements().skip(1) {
            assert_eq!(v4.order_of(a).unwrap(), 2);
        }
        let g = spec("4,6");
        for a in g.elements() {
            assert_eq!(g.neg(g.neg(a).unwrap()).unwrap(), a);
            assert_eq!(g.add(a, g.neg(a).unwrap()).unwrap(), g.zero());
        }
    }

    #[test]
    fn involution_counts() {
        assert_eq!(spec("35").involution_count(), 1);
        assert_eq!(spec("2,2,2,7").involution_count(), 8);
        assert_eq!(spec("4").involution_set(), vec![0, 2]);
    }

    #[test]
    fn classification() {
        assert_eq!(spec("35").family(), Family::TypeI);
        assert_eq!(spec("5,5").family(), Family::TypeI);
        assert_eq!(spec("2,2,3,3").family(), Family::TypeII);
        assert_eq!(spec("6,6").family(), Family::TypeII);
        assert_eq!(spec("3,3").family(), Family::TypeII);
        assert_eq!(spec("6").family(), Family::Other);
        assert_eq!(spec("9").family(), Family::Other);
        assert_eq!(spec("4,3,3").family(), Family::Other);
        assert_eq!(spec("2,2").family(), Family::Other);
        assert!(spec("2,3").is_cyclic());
        assert!(!spec("3,3").is_cyclic());
    }

    #[test]
    fn automorphism_counts() {
        let caps = EnumerationCaps::default();
        assert_eq!(enumerate_group_automorphisms(&spec("5"), &caps).unwrap().len(), 4);
        assert_eq!(enumerate_group_automorphisms(&spec("2,2"), &caps).unwrap().len(), 6);
        assert_eq!(enumerate_group_automorphisms(&spec("35"), &caps).unwrap().len(), 24);
        // GL(2,2) x GL(2,3)
        assert_eq!(enumerate_group_automorphisms(&spec("2,2,3,3"), &caps).unwrap().len(), 6 * 48);
        let auts = enumerate_group_automorphisms(&spec("7"), &caps).unwrap();
        assert!(auts[0].is_identity());
    }

    #[test]
    fn automorphism_caps() {
        let small = EnumerationCaps {
            max_order: 10,
            ..Default::default()
        };
        assert!(enumerate_group_automorphisms(&spec("11"), &small).unwrap_err().is_scale_cap());
        let few = EnumerationCaps {
            max_automorphisms: 100,
            ..Default::default()
        };
        // |GL(4,2)| = 20160
        assert!(enumerate_group_automorphisms(&spec("2,2,2,2"), &few).unwrap_err().is_scale_cap());
    }

    #[test]
    fn subgroup_counts_and_cosets() {
        let caps = EnumerationCaps::default();
        assert_eq!(enumerate_subgroups(&spec("7"), &caps).unwrap().len(), 2);
        assert_eq!(enumerate_subgroups(&spec("2,2"), &caps).unwrap().len(), 5);
        // divisors of 12
        assert_eq!(enumerate_subgroups(&spec("12"), &caps).unwrap().len(), 6);
        let z6 = spec("6");
        let h = enumerate_subgroups(&z6, &caps)
            .unwrap()
            .into_iter()
            .find(|h| h.elements() == [0, 3])
            .unwrap();
        let cosets = h.cosets(&z6);
        assert_eq!(cosets, vec![vec![0, 3], vec![1, 4], vec![2, 5]]);
    }
}
