//! The random connection-set model and its seeded random streams.
//!
//! Every nonzero involution `g` (with `2g = 0`) enters `S` independently with
//! probability `p`, and every unordered pair `{x, -x}` with `x != -x` enters
//! as a pair with probability `p`.
//!
//! Randomness: each `(seed, stream)` pair seeds a ChaCha8 generator with
//! `mix(seed, stream)`, where `mix` is two rounds of the SplitMix64 finalizer.
//! A Bernoulli(p) draw is `u < p` for one uniform `u` in `[0, 1)` (rand's
//! standard `f64` sampling), taken for each representative in ascending index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::group::GroupSpec;

/// SplitMix64 output function.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Substream seed for `(master, index)`.
#[inline]
pub fn mix(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// A reproducible random source identified by a master seed and a stream index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomStream {
    pub seed: u64,
    pub stream: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RandomStream { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(mix(self.seed, self.stream))
    }
}

/// An inverse-closed subset of `A \ {0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionSet {
    spec: GroupSpec,
    members: BitSet,
    p: Option<f64>,
}

/// `|S| = x_prime + 2 * x_double_prime`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeDecomposition {
    /// Chosen elements of order 2.
    pub x_prime: usize,
    /// Chosen pairs `{x, -x}` with `x != -x`.
    pub x_double_prime: usize,
}

impl ConnectionSet {
    /// Validates `0 ∉ S` and `S = -S`.
    pub fn from_indices(spec: &GroupSpec, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let n = spec.order();
        let mut members = BitSet::new(n);
        for i in indices {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, order: n });
            }
            members.insert(i);
        }
        if members.contains(0) {
            return Err(Error::Parameter("connection set contains the identity".into()));
        }
        if let Some(x) = members.iter().find(|&x| !members.contains(spec.neg_index(x))) {
            return Err(Error::Parameter(format!(
                "connection set is not inverse-closed: {x} present, {} missing",
                spec.neg_index(x)
            )));
        }
        Ok(ConnectionSet {
            spec: spec.clone(),
            members,
            p: None,
        })
    }

    pub fn empty(spec: &GroupSpec) -> Self {
        ConnectionSet {
            spec: spec.clone(),
            members: BitSet::new(spec.order()),
            p: None,
        }
    }

    /// `A \ {0}`.
    pub fn full(spec: &GroupSpec) -> Self {
        let mut members = BitSet::full(spec.order());
        members.remove(0);
        ConnectionSet {
            spec: spec.clone(),
            members,
            p: None,
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn members(&self) -> &BitSet {
        &self.members
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.members.to_vec()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub fn size(&self) -> usize {
        self.members.count()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn p(&self) -> Option<f64> {
        self.p
    }

    #[cfg(test)]
    pub(crate) fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn decomposition(&self) -> SizeDecomposition {
        let mut x_prime = 0;
        let mut x_double_prime = 0;
        for x in self.members.iter() {
            let y = self.spec.neg_index(x);
            if x == y {
                x_prime += 1;
            } else if x < y {
                x_double_prime += 1;
            }
        }
        SizeDecomposition {
            x_prime,
            x_double_prime,
        }
    }

    /// Sorted indices as a JSON array.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_vec()).expect("vec of integers serializes")
    }

    pub fn from_json(spec: &GroupSpec, json: &str) -> Result<Self> {
        let v: Vec<usize> =
            serde_json::from_str(json).map_err(|e| Error::Malformed(format!("connection set: {e}")))?;
        ConnectionSet::from_indices(spec, v)
    }
}

/// Ascending representatives `x` with `x <= -x`, `x != 0`: one per Bernoulli draw.
pub fn draw_representatives(spec: &GroupSpec) -> Vec<usize> {
    (1..spec.order())
        .filter(|&x| x <= spec.neg_index(x))
        .collect()
}

/// Number of independent Bernoulli draws: `(m - 1) + (n - m) / 2`.
pub fn trial_count(spec: &GroupSpec) -> usize {
    let m = spec.involution_count();
    (m - 1) + (spec.order() - m) / 2
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Samples `S` from the given generator, consuming exactly `trial_count(spec)` uniforms.
pub fn sample_with_rng<R: Rng + ?Sized>(spec: &GroupSpec, p: f64, rng: &mut R) -> Result<ConnectionSet> {
    check_probability(p)?;
    let mut members = BitSet::new(spec.order());
    for x in draw_representatives(spec) {
        let u: f64 = rng.gen();
        if u < p {
            members.insert(x);
            members.insert(spec.neg_index(x));
        }
    }
    Ok(ConnectionSet {
        spec: spec.clone(),
        members,
        p: Some(p),
    })
}

pub fn sample_connection_set(spec: &GroupSpec, p: f64, stream: RandomStream) -> Result<ConnectionSet> {
    sample_with_rng(spec, p, &mut stream.rng())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    #[test]
    fn extremes() {
        let g = spec("35");
        let s0 = sample_connection_set(&g, 0.0, RandomStream::new(1, 0)).unwrap();
        assert!(s0.is_empty());
        let s1 = sample_connection_set(&g, 1.0, RandomStream::new(1, 0)).unwrap();
        assert_eq!(s1.size(), 34);
        assert_eq!(s1, ConnectionSet::full(&g).with_p(1.0));
    }

    #[test]
    fn rejects_bad_probability() {
        let g = spec("7");
        for p in [-0.1, 1.5, f64::NAN] {
            assert!(matches!(
                sample_connection_set(&g, p, RandomStream::new(0, 0)),
                Err(Error::Parameter(_))
            ));
        }
    }

    #[test]
    fn trial_counts() {
        assert_eq!(trial_count(&spec("35")), 17);
        assert_eq!(trial_count(&spec("2,2,3,3")), 19);
        assert_eq!(trial_count(&spec("2,2,2")), 7);
        for g in ["35", "2,2,3,3", "2,2,2", "4,6"] {
            let g = spec(g);
            assert_eq!(draw_representatives(&g).len(), trial_count(&g));
        }
    }

    #[test]
    fn validation() {
        let g = spec("7");
        assert!(ConnectionSet::from_indices(&g, [1, 6]).is_ok());
        assert!(ConnectionSet::from_indices(&g, [1]).is_err());
        assert!(ConnectionSet::from_indices(&g, [0]).is_err());
        assert!(ConnectionSet::from_indices(&g, [9]).is_err());
        let s = ConnectionSet::from_json(&g, "[6, 1]").unwrap();
        assert_eq!(s.to_json(), "[1,6]");
    }

    #[test]
    fn decomposition_counts_pairs_once() {
        let g = spec("2,2,3,3");
        let s = ConnectionSet::full(&g);
        let d = s.decomposition();
        assert_eq!(d.x_prime, 3);
        assert_eq!(d.x_double_prime, 16);
        assert_eq!(s.size(), d.x_prime + 2 * d.x_double_prime);
    }

    #[test]
    fn mix_is_stream_sensitive() {
        assert_ne!(mix(1, 0), mix(1, 1));
        assert_ne!(mix(0, 1), mix(1, 0));
        assert_eq!(mix(42, 7), mix(42, 7));
    }
}
