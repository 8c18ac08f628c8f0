//! Distinguishing colorings: verdicts, exact `χ_D`, and the two constructive
//! certificates (an independent zero-sum triple on a fresh color; random
//! refinement of one color class).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::cayley::{CayleyGraph, Graph};
use crate::coloring::{chromatic_number_exact, is_proper, Coloring};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::perm::Permutation;
use crate::symmetry::AutomorphismGroup;

pub const DEFAULT_CHI_D_EXACT_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinguishingVerdict {
    pub is_distinguishing: bool,
    /// A nontrivial automorphism fixing every color class, when not distinguishing.
    pub witness: Option<Permutation>,
}

fn preserves(sigma: &Permutation, coloring: &Coloring) -> bool {
    (0..coloring.len()).all(|v| coloring.color(sigma.apply(v)) == coloring.color(v))
}

pub fn is_distinguishing(coloring: &Coloring, aut: &AutomorphismGroup) -> DistinguishingVerdict {
    let witness = aut
        .elements()
        .iter()
        .find(|s| !s.is_identity() && preserves(s, coloring))
        .cloned();
    DistinguishingVerdict {
        is_distinguishing: witness.is_none(),
        witness,
    }
}

struct ChiDSearch<'a> {
    graph: &'a Graph,
    nontrivial: Vec<&'a Permutation>,
    colors: Vec<usize>,
    limit: usize,
}

impl ChiDSearch<'_> {
    fn leaf_ok(&self) -> bool {
        !self.nontrivial.iter().any(|s| {
            (0..self.colors.len()).all(|v| self.colors[s.apply(v)] == self.colors[v])
        })
    }

    /// Vertices in index order; a new color only as `max_used + 1`.
    fn run(&mut self, v: usize, used: usize) -> bool {
        if v == self.colors.len() {
            return self.leaf_ok();
        }
        for c in 0..(used + 1).min(self.limit) {
            if self.graph.neighbors(v).iter().any(|u| u < v && self.colors[u] == c) {
                continue;
            }
            self.colors[v] = c;
            if self.run(v + 1, used.max(c + 1)) {
                return true;
            }
        }
        false
    }
}

/// Least `r` admitting a proper distinguishing `r`-coloring, with a witness.
/// `aut` must be the full automorphism group of `graph`.
pub fn distinguishing_chromatic_number_exact(
    graph: &Graph,
    aut: &AutomorphismGroup,
    cap: usize,
) -> Result<(usize, Coloring)> {
    let n = graph.order();
    if n > cap {
        return Err(Error::ScaleCap {
            what: "exact distinguishing chromatic number vertex count",
            cap,
            actual: n,
        });
    }
    if n == 0 {
        return Ok((0, Coloring::new(Vec::new())?));
    }
    let (chi, _) = chromatic_number_exact(graph, n)?;
    let mut search = ChiDSearch {
        graph,
        nontrivial: aut.elements().iter().filter(|s| !s.is_identity()).collect(),
        colors: vec![0; n],
        limit: chi,
    };
    for r in chi..=n {
        search.limit = r;
        if search.run(0, 0) {
            let coloring = Coloring::new(search.colors.clone())?;
            return Ok((coloring.num_colors(), coloring));
        }
    }
    unreachable!("the all-distinct coloring is proper and distinguishing")
}

/// `{x, y, z}` with `x + y + z = 0`, all nonzero and distinct; stored ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZeroSumTriple {
    pub elements: [usize; 3],
    /// `D(T) = {±(x−y), ±(y−z), ±(x−z)}`, ascending.
    pub differences: Vec<usize>,
}

impl ZeroSumTriple {
    fn new(spec: &GroupSpec, elements: [usize; 3]) -> Self {
        let [x, y, z] = elements;
        let mut differences = Vec::with_capacity(6);
        for (a, b) in [(x, y), (y, z), (x, z)] {
            differences.push(spec.sub_index(a, b));
            differences.push(spec.sub_index(b, a));
        }
        differences.sort_unstable();
        differences.dedup();
        ZeroSumTriple { elements, differences }
    }

    pub fn difference_mask(&self, n: usize) -> BitSet {
        BitSet::from_indices(n, self.differences.iter().copied())
    }

    /// `-T`.
    pub fn negated(&self, spec: &GroupSpec) -> ZeroSumTriple {
        let mut e = self.elements.map(|x| spec.neg_index(x));
        e.sort_unstable();
        ZeroSumTriple::new(spec, e)
    }
}

/// All zero-sum triples, in lexicographic order of their sorted elements.
pub fn enumerate_zero_sum_triples(spec: &GroupSpec) -> Vec<ZeroSumTriple> {
    let n = spec.order();
    let mut out = Vec::new();
    for x in 1..n {
        for y in x + 1..n {
            let z = spec.neg_index(spec.add_index(x, y));
            if z > y {
                out.push(ZeroSumTriple::new(spec, [x, y, z]));
            }
        }
    }
    out
}

/// The triple family with precomputed difference masks, shared across trials.
#[derive(Debug, Clone)]
pub struct TripleFamily {
    triples: Vec<ZeroSumTriple>,
    masks: Vec<BitSet>,
}

impl TripleFamily {
    pub fn new(spec: &GroupSpec) -> Self {
        let triples = enumerate_zero_sum_triples(spec);
        let masks = triples.iter().map(|t| t.difference_mask(spec.order())).collect();
        TripleFamily { triples, masks }
    }

    pub fn triples(&self) -> &[ZeroSumTriple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// `N = #{T : D(T) ∩ S = ∅}`.
    pub fn count_independent(&self, connection: &BitSet) -> usize {
        self.masks.iter().filter(|m| !m.intersects(connection)).count()
    }

    pub fn first_independent(&self, connection: &BitSet) -> Option<&ZeroSumTriple> {
        self.masks
            .iter()
            .position(|m| !m.intersects(connection))
            .map(|i| &self.triples[i])
    }
}

/// First triple in scan order whose difference set avoids `S`.
pub fn find_independent_triple(graph: &CayleyGraph) -> Option<ZeroSumTriple> {
    let spec = graph.spec();
    let s = graph.connection();
    enumerate_zero_sum_triples(spec)
        .into_iter()
        .find(|t| t.differences.iter().all(|&d| !s.contains(d)))
}

/// True iff no nontrivial map `x ↦ ±x + g` fixes `T` setwise.
pub fn verify_triple_rigidity(spec: &GroupSpec, triple: &ZeroSumTriple) -> bool {
    let set = triple.elements;
    for g in 0..spec.order() {
        for negate in [false, true] {
            let apply = |x: usize| {
                let y = if negate { spec.neg_index(x) } else { x };
                spec.add_index(y, g)
            };
            let trivial = (0..spec.order()).all(|x| apply(x) == x);
            if trivial {
                continue;
            }
            let mut image = set.map(apply);
            image.sort_unstable();
            if image == set {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleCertificate {
    pub triple: ZeroSumTriple,
    pub chi: usize,
    pub coloring: Coloring,
    pub proper: bool,
    pub verdict: DistinguishingVerdict,
}

/// Recolors an independent zero-sum triple of a proper `χ`-coloring with a fresh color.
///
/// If the triple was an entire class of `base`, the lowest vertex of another
/// class of size at least two is moved to the fresh color instead, so that
/// exactly `χ + 1` colors remain in use whenever possible.
pub fn type1_from_base(graph: &CayleyGraph, base: &Coloring, aut: &AutomorphismGroup) -> Result<TripleCertificate> {
    let triple = find_independent_triple(graph).ok_or(Error::NoTripleFound)?;
    let chi = base.num_colors();
    let mut labels = base.to_vec();
    for &x in &triple.elements {
        labels[x] = chi;
    }
    let mut coloring = Coloring::compacted(&labels);
    if coloring.num_colors() == chi {
        let in_triple = |v: usize| triple.elements.contains(&v);
        let donor = base
            .classes()
            .into_iter()
            .filter(|c| c.len() >= 2 && !c.iter().any(|&v| in_triple(v)))
            .map(|c| c[0])
            .min();
        if let Some(v) = donor {
            labels[v] = chi + 1;
            coloring = Coloring::compacted(&labels);
        }
    }
    let proper = is_proper(graph.graph(), &coloring);
    let verdict = is_distinguishing(&coloring, aut);
    Ok(TripleCertificate {
        triple,
        chi,
        coloring,
        proper,
        verdict,
    })
}

/// Exact-colors the graph, then applies [`type1_from_base`].
pub fn type1_distinguishing_coloring(
    graph: &CayleyGraph,
    aut: &AutomorphismGroup,
    chi_cap: usize,
) -> Result<TripleCertificate> {
    let (_, base) = chromatic_number_exact(graph.graph(), chi_cap)?;
    type1_from_base(graph, &base, aut)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionBound {
    /// `f(𝒢) = Σ t^(θ − |C₁|)` over all of `𝒢`, identity included.
    pub f: f64,
    /// Most fixed points of a nontrivial element inside `C₁` (0 for trivial `𝒢`).
    pub max_fixed: usize,
    pub group_order: usize,
    /// Least prime dividing `|𝒢|`; `None` (infinite) for the trivial group.
    pub least_prime: Option<usize>,
    /// `f < r`.
    pub criterion_holds: bool,
    /// `F(C₁) < |C₁| − 2 log_t |𝒢|`.
    pub fixed_point_criterion_holds: bool,
}

fn least_prime_factor(n: usize) -> Option<usize> {
    if n < 2 {
        return None;
    }
    (2..).take_while(|p| p * p <= n).find(|p| n.is_multiple_of(*p)).or(Some(n))
}

/// Motion-lemma quantities for `𝒢`, every element of which must fix `C₁` setwise.
pub fn motion_bound(group: &AutomorphismGroup, class: &BitSet, t: usize) -> Result<MotionBound> {
    if t < 2 {
        return Err(Error::Parameter(format!("motion bound needs t >= 2, got {t}")));
    }
    let size = class.count() as i64;
    let mut f = 0.0;
    let mut max_fixed = 0;
    for sigma in group.elements() {
        let theta = sigma.orbit_count_on_class(class)? as i64;
        f += (t as f64).powi((theta - size) as i32);
        if !sigma.is_identity() {
            let fixed = class.iter().filter(|&v| sigma.apply(v) == v).count();
            max_fixed = max_fixed.max(fixed);
        }
    }
    let order = group.order();
    let least_prime = least_prime_factor(order);
    let criterion_holds = least_prime.is_none_or(|r| f < r as f64);
    let fixed_point_criterion_holds = (max_fixed as f64) < size as f64 - 2.0 * (order as f64).log(t as f64);
    Ok(MotionBound {
        f,
        max_fixed,
        group_order: order,
        least_prime,
        criterion_holds,
        fixed_point_criterion_holds,
    })
}

/// Splits class `class_color` of `base` uniformly at random into `t` sub-classes
/// (the original color plus `t − 1` fresh ones) until the coloring is
/// distinguishing against `aut`. Returns the coloring and the attempt count.
pub fn motion_recolor<R: Rng + ?Sized>(
    base: &Coloring,
    class_color: usize,
    t: usize,
    aut: &AutomorphismGroup,
    rng: &mut R,
    max_attempts: usize,
) -> Option<(Coloring, usize)> {
    if t <= 1 {
        return is_distinguishing(base, aut).is_distinguishing.then(|| (base.clone(), 0));
    }
    let k = base.num_colors();
    let class: Vec<usize> = (0..base.len()).filter(|&v| base.color(v) == class_color).collect();
    let mut labels = base.to_vec();
    for attempt in 1..=max_attempts {
        for &v in &class {
            let r = rng.gen_range(0..t);
            labels[v] = if r == 0 { class_color } else { k + r - 1 };
        }
        let coloring = Coloring::compacted(&labels);
        if is_distinguishing(&coloring, aut).is_distinguishing {
            return Some((coloring, attempt));
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Type2Threshold {
    /// `χ < n / (m + 2 log₂(2n))`.
    pub applies: bool,
    /// `⌈(2n)^(2χ / (n − mχ))⌉`.
    pub t: usize,
}

fn ceil_tolerant(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

pub fn type2_threshold_check(n: usize, m: usize, chi: usize) -> Result<Type2Threshold> {
    if n <= m * chi {
        return Err(Error::FormulaDomain(format!("need n > m·χ, got n = {n}, m·χ = {}", m * chi)));
    }
    let nf = n as f64;
    let applies = (chi as f64) < nf / (m as f64 + 2.0 * (2.0 * nf).log2());
    let exponent = 2.0 * chi as f64 / (n - m * chi) as f64;
    Ok(Type2Threshold {
        applies,
        t: ceil_tolerant((2.0 * nf).powf(exponent)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::ConnectionSet;
    use crate::symmetry::{automorphism_group, compute_automorphism_group, semidirect_elements, SymmetryCaps};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    fn cayley(group: &str, set: &[usize]) -> CayleyGraph {
        let g = spec(group);
        let s = ConnectionSet::from_indices(&g, set.iter().copied()).unwrap();
        CayleyGraph::build(&g, &s).unwrap()
    }

    fn aut_of(g: &Graph) -> AutomorphismGroup {
        automorphism_group(g, &SymmetryCaps::default()).unwrap()
    }

    #[test]
    fn verdict_examples() {
        let k4 = Graph::complete(4);
        assert!(is_distinguishing(&Coloring::all_distinct(4), &aut_of(&k4)).is_distinguishing);

        let c4 = Graph::cycle(4);
        let aut = aut_of(&c4);
        assert_eq!(aut.order(), 8);
        let v = is_distinguishing(&Coloring::new(vec![0, 1, 0, 1]).unwrap(), &aut);
        assert!(!v.is_distinguishing);
        let w = v.witness.unwrap();
        assert!(!w.is_identity());
        // every witness fixes both classes; rotation by two is one of them
        let rot2 = Permutation::from_images(vec![2, 3, 0, 1]).unwrap();
        assert!(aut.contains(&rot2));
        assert!(preserves(&rot2, &Coloring::new(vec![0, 1, 0, 1]).unwrap()));

        let v = is_distinguishing(&Coloring::constant(4), &aut);
        assert!(!v.is_distinguishing);
    }

    #[test]
    fn exact_chi_d_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(distinguishing_chromatic_number_exact(&k4, &aut_of(&k4), 12).unwrap().0, 4);
        let e3 = Graph::empty(3);
        assert_eq!(distinguishing_chromatic_number_exact(&e3, &aut_of(&e3), 12).unwrap().0, 3);
        // cycles need 3 colors, except C4 and C6 which need 4
        for (n, expected) in [(4, 4), (5, 3), (6, 4), (7, 3), (8, 3)] {
            let c = Graph::cycle(n);
            let (r, w) = distinguishing_chromatic_number_exact(&c, &aut_of(&c), 12).unwrap();
            assert_eq!(r, expected, "C{n}");
            assert!(is_proper(&c, &w));
            assert!(is_distinguishing(&w, &aut_of(&c)).is_distinguishing);
        }
        assert!(distinguishing_chromatic_number_exact(&Graph::empty(13), &AutomorphismGroup::trivial(13), 12)
            .unwrap_err()
            .is_scale_cap());
    }

    #[test]
    fn triples_of_z7() {
        let t = enumerate_zero_sum_triples(&spec("7"));
        let sets: Vec<[usize; 3]> = t.iter().map(|t| t.elements).collect();
        assert_eq!(sets, vec![[1, 2, 4], [3, 5, 6]]);
        for tr in &t {
            assert_eq!(tr.differences.len(), 6);
            assert!(!tr.differences.contains(&0));
        }
        assert_eq!(t[0].negated(&spec("7")).elements, [3, 5, 6]);
    }

    #[test]
    fn independent_triple_scan() {
        let e7 = cayley("7", &[]);
        assert_eq!(find_independent_triple(&e7).unwrap().elements, [1, 2, 4]);
        let k7 = cayley("7", &[1, 2, 3, 4, 5, 6]);
        assert!(find_independent_triple(&k7).is_none());
        // every D(T) in Z7 is all of Z7 minus 0
        assert!(find_independent_triple(&cayley("7", &[1, 6])).is_none());
        let c13 = cayley("13", &[1, 12]);
        let t = find_independent_triple(&c13).unwrap();
        assert!(c13.is_independent(&t.elements));
        assert!(t.differences.iter().all(|&d| d != 1 && d != 12));
    }

    #[test]
    fn rigidity_fails_for_fixed_triples() {
        // 3 | n: {1, 3, 5} in Z_9 is fixed by x ↦ 6 − x
        let g = spec("9");
        let t = enumerate_zero_sum_triples(&g).into_iter().find(|t| t.elements == [1, 3, 5]).unwrap();
        assert!(!verify_triple_rigidity(&g, &t));
        let g = spec("7");
        assert!(enumerate_zero_sum_triples(&g).iter().all(|t| verify_triple_rigidity(&g, t)));
    }

    #[test]
    fn type1_on_complete_and_edgeless() {
        let k7 = cayley("7", &[1, 2, 3, 4, 5, 6]);
        let aut = semidirect_elements(k7.spec());
        assert_eq!(type1_distinguishing_coloring(&k7, &aut, 40).unwrap_err(), Error::NoTripleFound);

        let e7 = cayley("7", &[]);
        let aut = compute_automorphism_group(&e7, &SymmetryCaps::default()).unwrap();
        assert_eq!(aut.order(), 5040);
        let cert = type1_distinguishing_coloring(&e7, &aut, 40).unwrap();
        assert!(cert.proper);
        assert_eq!(cert.coloring.num_colors(), 2);
        assert!(!cert.verdict.is_distinguishing);
    }

    #[test]
    fn type1_on_small_circulant() {
        // Z_13 with S = {±1, ±5}: Aut is the 26-element semidirect group
        let g = cayley("13", &[1, 12, 5, 8]);
        let aut = compute_automorphism_group(&g, &SymmetryCaps::default()).unwrap();
        let cert = type1_distinguishing_coloring(&g, &aut, 40).unwrap();
        assert!(cert.proper);
        assert_eq!(cert.coloring.num_colors(), cert.chi + 1);
        if aut == semidirect_elements(g.spec()) {
            assert!(cert.verdict.is_distinguishing);
        }
    }

    #[test]
    fn motion_bound_examples() {
        let class = BitSet::from_indices(6, 0..6);
        let b = motion_bound(&AutomorphismGroup::trivial(6), &class, 2).unwrap();
        assert_eq!(b.f, 1.0);
        assert!(b.criterion_holds);
        assert_eq!(b.max_fixed, 0);

        let inv = Permutation::from_images(vec![1, 0, 3, 2, 5, 4]).unwrap();
        let g = AutomorphismGroup::from_elements(vec![Permutation::identity(6), inv]);
        let b = motion_bound(&g, &class, 2).unwrap();
        assert!((b.f - 1.125).abs() < 1e-12);
        assert_eq!(b.least_prime, Some(2));
        assert!(b.criterion_holds);

        let partial = BitSet::from_indices(6, [0, 2]);
        assert!(motion_bound(&g, &partial, 2).is_err());
        assert!(motion_bound(&g, &class, 1).is_err());
    }

    #[test]
    fn motion_recolor_trivial_cases() {
        let c7 = Graph::cycle(7);
        let aut = aut_of(&c7);
        let base = Coloring::new(vec![0, 1, 0, 1, 0, 1, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let already = is_distinguishing(&base, &aut).is_distinguishing;
        assert_eq!(motion_recolor(&base, 0, 1, &aut, &mut rng, 10).is_some(), already);

        let trivial = AutomorphismGroup::trivial(7);
        let (c, attempts) = motion_recolor(&base, 0, 2, &trivial, &mut rng, 10).unwrap();
        assert_eq!(attempts, 1);
        assert!(is_proper(&c7, &c));
    }

    #[test]
    fn type2_threshold_examples() {
        let r = type2_threshold_check(36, 4, 3).unwrap();
        assert_eq!(r.t, 3);
        assert!(!r.applies);
        let r = type2_threshold_check(36, 4, 1).unwrap();
        assert!(r.applies);
        assert_eq!(r.t, ceil_tolerant(72f64.powf(2.0 / 32.0)));
        assert!(matches!(type2_threshold_check(12, 4, 3), Err(Error::FormulaDomain(_))));
    }
}
