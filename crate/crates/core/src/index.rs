use std::fmt;
use std::ops::{Add, Neg, Sub};

/// A degree in the character lattice `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    pub fn new(entries: Vec<i64>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(rank: usize) -> Self {
        MultiIndex(vec![0; rank])
    }

    /// The `i`-th standard basis vector of `Z^rank`.
    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Sup-norm radius `max_i |χ_i|`.
    pub fn radius(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn dot(&self, t: &[f64]) -> f64 {
        self.0.iter().zip(t).map(|(&c, &x)| c as f64 * x).sum()
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        MultiIndex(v)
    }
}

impl<const N: usize> From<[i64; N]> for MultiIndex {
    fn from(v: [i64; N]) -> Self {
        MultiIndex(v.to_vec())
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.rank(), rhs.rank());
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MultiIndex {
    type Output = MultiIndex;
    fn sub(self, rhs: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.rank(), rhs.rank());
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &MultiIndex {
    type Output = MultiIndex;
    fn neg(self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}
