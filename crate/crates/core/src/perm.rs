//! Permutations of `0..n`, stored as image arrays.

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};

/// A bijection on `0..n`. `compose` follows function notation: `(a.compose(b))(x) = a(b(x))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Malformed(format!(
                    "image array is not a permutation of 0..{n}"
                )));
            }
        }
        Ok(Permutation {
            images: images.into_iter().map(|x| x as u32).collect(),
        })
    }

    /// Caller guarantees bijectivity.
    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Self::from_images(images.iter().map(|&x| x as usize).collect()).is_ok());
        Permutation { images }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().map(|&x| x as usize)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.images().collect()
    }

    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "composing permutations of different degree");
        Permutation {
            images: other.images.iter().map(|&x| self.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.apply(i) == i).collect()
    }

    /// Cycle decomposition, each cycle starting at its smallest point, cycles ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    pub fn maps_onto_itself(&self, set: &BitSet) -> bool {
        set.iter().all(|v| set.contains(self.apply(v)))
    }

    /// Number of cycles of the restriction to `class`, which must be setwise invariant.
    pub fn orbit_count_on_class(&self, class: &BitSet) -> Result<usize> {
        if !self.maps_onto_itself(class) {
            return Err(Error::Precondition(
                "permutation does not map the class onto itself".into(),
            ));
        }
        let mut seen = BitSet::new(self.len());
        let mut orbits = 0;
        for v in class.iter() {
            if seen.contains(v) {
                continue;
            }
            orbits += 1;
            let mut x = v;
            while !seen.contains(x) {
                seen.insert(x);
                x = self.apply(x);
            }
        }
        Ok(orbits)
    }

    /// Image of a set of points.
    pub fn image_of(&self, set: &BitSet) -> BitSet {
        BitSet::from_indices(set.len(), set.iter().map(|v| self.apply(v)))
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::from_images(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.to_vec()
    }
}
