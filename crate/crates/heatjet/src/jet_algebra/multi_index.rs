//! Derivative/monomial multi-indices.

use std::fmt;
use std::ops::Index;

use num::bigint::BigInt;
use num::One;

use super::Rat;

/// An exponent vector `(a_1, ..., a_n)` indexing the monomial `x^a` or the
/// derivative `d^a`. Ordered graded-lexicographically so that map iteration
/// enumerates monomials by total degree.
#[derive(Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The i-th unit index (the variable `x_i`, zero-based).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] += 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Total degree |a|.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// a! = prod a_i!
    pub fn factorial(&self) -> Rat {
        let mut acc = BigInt::one();
        for &e in &self.0 {
            for i in 2..=e {
                acc *= BigInt::from(i);
            }
        }
        Rat::from_big(acc, BigInt::one())
    }

    /// Componentwise a <= b.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference; `None` unless `other` divides `self`.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if other.divides(self) {
            Some(MultiIndex(
                self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
            ))
        } else {
            None
        }
    }

    /// prod binom(a_i, b_i), the coefficient in the Leibniz rule.
    pub fn binomial(&self, other: &MultiIndex) -> Rat {
        debug_assert!(other.divides(self));
        let mut acc = BigInt::one();
        for (&a, &b) in self.0.iter().zip(&other.0) {
            let mut num = BigInt::one();
            let mut den = BigInt::one();
            for i in 0..b {
                num *= BigInt::from(a - i);
                den *= BigInt::from(i + 1);
            }
            acc = acc * num / den;
        }
        Rat::from_big(acc, BigInt::one())
    }

    /// All subindices b <= a, in graded-lex order.
    pub fn subindices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(self.len())];
        for (i, &e) in self.0.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for base in &out {
                for k in 0..=e {
                    let mut v = base.0.clone();
                    v[i] = k;
                    next.push(MultiIndex(v));
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// All multi-indices of length `n` with total degree exactly `d`,
    /// in graded-lex order.
    pub fn of_degree(n: usize, d: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = vec![0u32; n];
        fn rec(n: usize, pos: usize, left: usize, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if pos + 1 == n {
                current[pos] = left as u32;
                out.push(MultiIndex(current.clone()));
                return;
            }
            for k in 0..=left {
                current[pos] = k as u32;
                rec(n, pos + 1, left - k, current, out);
            }
        }
        if n == 0 {
            if d == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        rec(n, 0, d, &mut current, &mut out);
        out
    }

    /// All multi-indices of length `n` with total degree at most `d`.
    pub fn up_to_degree(n: usize, d: usize) -> Vec<MultiIndex> {
        (0..=d).flat_map(|k| Self::of_degree(n, k)).collect()
    }
}

impl Index<usize> for MultiIndex {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Formats `x^a` as e.g. `x1^2*x3`; the empty product is `1`.
impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "x{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}
