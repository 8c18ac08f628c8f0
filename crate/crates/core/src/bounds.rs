//! Closed-form bounds, evaluated numerically (log-space where they overflow),
//! and the exhaustive overlap census behind the Janson `Δ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{gcd, GroupSpec};
use crate::distinguishing::enumerate_zero_sum_triples;

/// Relative tolerance for comparing evaluated bounds.
pub const RELATIVE_TOLERANCE: f64 = 1e-9;

/// A named value with its parameters echoed for provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
    pub value: f64,
    /// `log₂ value`, kept when the value itself may underflow.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub log2_value: Option<f64>,
}

impl BoundReport {
    fn new(name: &str, parameters: &[(&str, f64)], value: f64) -> Self {
        BoundReport {
            name: name.to_string(),
            parameters: parameters.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            value,
            log2_value: None,
        }
    }
}

fn check_open_unit(name: &str, p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Parameter(format!("{name} = {p} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_unit(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("{name} = {p} must lie in [0, 1]")));
    }
    Ok(())
}

fn check_exponents(c1: f64, c2: f64) -> Result<()> {
    if !(c1 >= 1.5 && c2 >= 1.5 && c1.is_finite() && c2.is_finite()) {
        return Err(Error::Parameter(format!("need c1, c2 >= 3/2, got c1 = {c1}, c2 = {c2}")));
    }
    Ok(())
}

/// `(p^c₁ + (1−p)^c₁)^c₂`.
pub fn lemma21_core(p: f64, c1: f64, c2: f64) -> Result<f64> {
    check_open_unit("p", p)?;
    check_exponents(c1, c2)?;
    Ok((p.powf(c1) + (1.0 - p).powf(c1)).powf(c2))
}

/// `n^(log₂ n) · (p^c₁ + (1−p)^c₁)^c₂`, evaluated as `2^((log₂ n)² + c₂ log₂(...))`.
pub fn lemma21_value(n: f64, p: f64, c1: f64, c2: f64) -> Result<BoundReport> {
    check_open_unit("p", p)?;
    check_exponents(c1, c2)?;
    if !(n >= 2.0) {
        return Err(Error::Parameter(format!("n = {n} must be at least 2")));
    }
    let log_n = n.log2();
    let log2_value = log_n * log_n + c2 * (p.powf(c1) + (1.0 - p).powf(c1)).log2();
    let mut r = BoundReport::new(
        "lemma21_value",
        &[("n", n), ("p", p), ("c1", c1), ("c2", c2)],
        log2_value.exp2(),
    );
    r.log2_value = Some(log2_value);
    Ok(r)
}

/// `(n−1)(n−5)/6`, the number of zero-sum triples when `gcd(n, 6) = 1`.
pub fn triple_count_formula(n: usize) -> Result<usize> {
    if gcd(n, 6) != 1 || n < 5 {
        return Err(Error::FormulaDomain(format!("triple count formula needs gcd(n, 6) = 1, n >= 5; got {n}")));
    }
    Ok((n - 1) * (n - 5) / 6)
}

/// `μ = |𝒯| q³`.
pub fn janson_mu(n: usize, q: f64) -> Result<f64> {
    check_unit("q", q)?;
    Ok(triple_count_formula(n)? as f64 * q.powi(3))
}

/// `3n|𝒯|q⁵ + |𝒯|q⁴ + |𝒯|q³`.
pub fn janson_delta_bound(n: usize, q: f64) -> Result<f64> {
    check_unit("q", q)?;
    let t = triple_count_formula(n)? as f64;
    Ok(3.0 * n as f64 * t * q.powi(5) + t * q.powi(4) + t * q.powi(3))
}

/// Outcome of the Janson inequality: a bound, or a signal that `μ ≤ Δ` fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JansonTail {
    Bound(f64),
    Inapplicable { mu: f64, delta: f64 },
}

impl JansonTail {
    pub fn bound(self) -> Option<f64> {
        match self {
            JansonTail::Bound(b) => Some(b),
            JansonTail::Inapplicable { .. } => None,
        }
    }
}

/// `exp(−μ² / 2Δ)` when `0 < Δ` and `μ ≤ Δ`.
pub fn janson_tail(mu: f64, delta: f64) -> JansonTail {
    if delta > 0.0 && mu <= delta {
        JansonTail::Bound((-(mu * mu) / (2.0 * delta)).exp())
    } else {
        JansonTail::Inapplicable { mu, delta }
    }
}

/// `exp(−t²/(2((m−1)p + t/3))) + exp(−t²/(2((n−m)/2·p + t/3)))`.
pub fn chernoff_size_tail(n: usize, m: usize, p: f64, t: f64) -> Result<f64> {
    check_unit("p", p)?;
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("tail offset t = {t} must be positive")));
    }
    if m == 0 || m > n {
        return Err(Error::Parameter(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    let lambda1 = (m - 1) as f64 * p;
    let lambda2 = (n - m) as f64 / 2.0 * p;
    let term = |lambda: f64| (-(t * t) / (2.0 * (lambda + t / 3.0))).exp();
    Ok(term(lambda1) + term(lambda2))
}

/// The tail offset `t = 2n / (13(m + 2 log₂(2n)))`.
pub fn size_tail_offset(n: usize, m: usize) -> f64 {
    let nf = n as f64;
    2.0 * nf / (13.0 * (m as f64 + 2.0 * (2.0 * nf).log2()))
}

/// Per-triple overlap counts against every other member of the family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapCounts {
    pub triple: [usize; 3],
    pub count2: usize,
    pub count4: usize,
    pub count6: usize,
    /// The unique overlap-6 partner, when there is exactly one.
    pub overlap6_partner: Option<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapCensus {
    pub group: GroupSpec,
    pub triples: usize,
    pub per_triple: Vec<OverlapCounts>,
    /// Ordered pairs `(T, U)`, `T ≠ U`, `D(T) ∩ D(U) ≠ ∅`, keyed by the number of
    /// inverse pairs in `D(T) ∪ D(U)`.
    pub union_pairs_histogram: BTreeMap<usize, u64>,
}

/// Brute force over all ordered pairs of zero-sum triples.
pub fn overlap_census(spec: &GroupSpec, max_order: usize) -> Result<OverlapCensus> {
    let n = spec.order();
    if gcd(n, 6) != 1 {
        return Err(Error::FormulaDomain(format!("overlap census needs gcd(n, 6) = 1, got n = {n}")));
    }
    if n > max_order {
        return Err(Error::ScaleCap {
            what: "overlap census group order",
            cap: max_order,
            actual: n,
        });
    }
    let triples = enumerate_zero_sum_triples(spec);
    let masks: Vec<_> = triples.iter().map(|t| t.difference_mask(n)).collect();
    let mut per_triple = Vec::with_capacity(triples.len());
    let mut union_pairs_histogram = BTreeMap::new();
    for (i, t) in triples.iter().enumerate() {
        let mut counts = OverlapCounts {
            triple: t.elements,
            count2: 0,
            count4: 0,
            count6: 0,
            overlap6_partner: None,
        };
        let mut partners6 = Vec::new();
        for (j, u) in triples.iter().enumerate() {
            if i == j {
                continue;
            }
            let common = masks[i].intersection_count(&masks[j]);
            if common == 0 {
                continue;
            }
            match common {
                2 => counts.count2 += 1,
                4 => counts.count4 += 1,
                6 => {
                    counts.count6 += 1;
                    partners6.push(u.elements);
                }
                other => unreachable!("difference sets are unions of inverse pairs, got overlap {other}"),
            }
            // odd order: every difference set element has a distinct inverse
            let union = t.differences.len() + u.differences.len() - common;
            *union_pairs_histogram.entry(union / 2).or_insert(0) += 1;
        }
        if partners6.len() == 1 {
            counts.overlap6_partner = Some(partners6[0]);
        }
        per_triple.push(counts);
    }
    Ok(OverlapCensus {
        group: spec.clone(),
        triples: triples.len(),
        per_triple,
        union_pairs_histogram,
    })
}

impl OverlapCensus {
    /// `Δ = Σ_{T∼U} q^{#pairs(D(T) ∪ D(U))}`.
    pub fn delta_exact(&self, q: f64) -> f64 {
        self.union_pairs_histogram
            .iter()
            .map(|(&pairs, &count)| count as f64 * q.powi(pairs as i32))
            .sum()
    }
}

pub fn delta_exact(spec: &GroupSpec, q: f64, max_order: usize) -> Result<f64> {
    check_unit("q", q)?;
    Ok(overlap_census(spec, max_order)?.delta_exact(q))
}
