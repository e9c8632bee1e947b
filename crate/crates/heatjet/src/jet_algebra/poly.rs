//! Truncated multivariate polynomials ("jets") with exactness accounting.
//!
//! A [`JetPoly`] stores finitely many monomial coefficients together with a
//! [`Degree`] recording through which total degree those coefficients are the
//! true derivatives of the represented germ. `Degree::Full` marks a genuine
//! polynomial, exact at every degree. Arithmetic propagates the bound; nothing
//! is ever silently truncated below what an operation can guarantee.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

use super::{Coeff, MultiIndex, Rat, Role};

/// Exactness bound of a jet: exact through total degree `d`, or a genuine
/// polynomial (`Full`). `UpTo` with a negative degree means no exact content.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Degree {
    UpTo(i64),
    Full,
}

impl Degree {
    pub fn at(d: u32) -> Degree {
        Degree::UpTo(d as i64)
    }

    pub fn min(self, other: Degree) -> Degree {
        std::cmp::min(self, other)
    }

    /// Degree lost to `k` differentiations.
    pub fn minus(self, k: usize) -> Degree {
        match self {
            Degree::UpTo(d) => Degree::UpTo(d - k as i64),
            Degree::Full => Degree::Full,
        }
    }

    /// Degree gained by multiplication with something of valuation `k`.
    pub fn plus(self, k: usize) -> Degree {
        match self {
            Degree::UpTo(d) => Degree::UpTo(d + k as i64),
            Degree::Full => Degree::Full,
        }
    }

    /// Is the coefficient at total degree `d` covered by this bound?
    pub fn admits(self, d: usize) -> bool {
        match self {
            Degree::UpTo(t) => d as i64 <= t,
            Degree::Full => true,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::UpTo(d) => write!(f, "degree {d}"),
            Degree::Full => write!(f, "full polynomial"),
        }
    }
}

/// A jet: a truncated polynomial in `n` variables with coefficients of a
/// common [`Role`]. Absent monomials are zero; stored monomials never exceed
/// the exactness bound, and zero coefficients are pruned, so equal jets have
/// equal representations.
#[derive(Clone, PartialEq, Eq)]
pub struct JetPoly {
    n: usize,
    role: Role,
    deg: Degree,
    terms: BTreeMap<MultiIndex, Coeff>,
}

impl JetPoly {
    pub fn zero(n: usize, role: Role, deg: Degree) -> Self {
        JetPoly {
            n,
            role,
            deg,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, value: Coeff, deg: Degree) -> Self {
        let mut p = JetPoly::zero(n, value.role(), deg);
        p.insert(MultiIndex::zero(n), value);
        p
    }

    /// The scalar constant 1.
    pub fn one(n: usize, deg: Degree) -> Self {
        JetPoly::constant(n, Coeff::scalar(Rat::one()), deg)
    }

    /// The identity endomorphism as a constant jet.
    pub fn identity(n: usize, rank: usize, deg: Degree) -> Self {
        JetPoly::constant(n, Coeff::identity(rank), deg)
    }

    /// The scalar variable `x_i` (zero-based).
    pub fn variable(n: usize, i: usize, deg: Degree) -> Self {
        let mut p = JetPoly::zero(n, Role::Scalar, deg);
        p.insert(MultiIndex::unit(n, i), Coeff::scalar(Rat::one()));
        p
    }

    /// A single term `value * x^alpha`.
    pub fn monomial(n: usize, alpha: MultiIndex, value: Coeff, deg: Degree) -> Self {
        assert_eq!(alpha.len(), n, "multi-index length must equal dimension");
        let mut p = JetPoly::zero(n, value.role(), deg);
        p.insert(alpha, value);
        p
    }

    pub fn from_terms(
        n: usize,
        role: Role,
        deg: Degree,
        terms: impl IntoIterator<Item = (MultiIndex, Coeff)>,
    ) -> Result<Self> {
        let mut p = JetPoly::zero(n, role, deg);
        for (alpha, c) in terms {
            if alpha.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: alpha.len(),
                });
            }
            if c.role() != role {
                return Err(Error::RoleMismatch {
                    expected: role,
                    found: c.role(),
                });
            }
            let entry = p.coeff(&alpha).add(&c)?;
            p.set(alpha, entry);
        }
        Ok(p)
    }

    fn insert(&mut self, alpha: MultiIndex, value: Coeff) {
        if value.is_zero() || !self.deg.admits(alpha.degree()) {
            return;
        }
        self.terms.insert(alpha, value);
    }

    fn set(&mut self, alpha: MultiIndex, value: Coeff) {
        if value.is_zero() {
            self.terms.remove(&alpha);
        } else {
            self.insert(alpha, value);
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn degree(&self) -> Degree {
        self.deg
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `x^alpha` (zero when absent).
    pub fn coeff(&self, alpha: &MultiIndex) -> Coeff {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| Coeff::zero(self.role))
    }

    pub fn value_at_origin(&self) -> Coeff {
        self.coeff(&MultiIndex::zero(self.n))
    }

    /// Largest total degree among stored terms; `None` when zero.
    pub fn max_term_degree(&self) -> Option<usize> {
        self.terms.keys().last().map(MultiIndex::degree)
    }

    /// Smallest total degree among stored terms (the valuation).
    pub fn valuation(&self) -> Option<usize> {
        self.terms.keys().next().map(MultiIndex::degree)
    }

    /// Re-bounds the jet to `target`, discarding terms beyond it. The target
    /// may not exceed what is exactly known.
    pub fn truncated(&self, target: Degree) -> Result<JetPoly> {
        if target > self.deg {
            return Err(Error::InsufficientDegree {
                what: "jet truncation",
                requested: target,
                required: target,
                available: self.deg,
            });
        }
        let mut out = JetPoly::zero(self.n, self.role, target);
        for (alpha, c) in &self.terms {
            out.insert(alpha.clone(), c.clone());
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &JetPoly) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &JetPoly) -> Result<JetPoly> {
        self.check_compatible(other)?;
        if self.role != other.role {
            return Err(Error::RoleMismatch {
                expected: self.role,
                found: other.role,
            });
        }
        let deg = self.deg.min(other.deg);
        let mut out = JetPoly::zero(self.n, self.role, deg);
        for (alpha, c) in &self.terms {
            out.insert(alpha.clone(), c.clone());
        }
        for (alpha, c) in &other.terms {
            let sum = out.coeff(alpha).add(c)?;
            out.set(alpha.clone(), sum);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &JetPoly) -> Result<JetPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> JetPoly {
        let mut out = JetPoly::zero(self.n, self.role, self.deg);
        for (alpha, c) in &self.terms {
            out.insert(alpha.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> JetPoly {
        let mut out = JetPoly::zero(self.n, self.role, self.deg);
        if s.is_zero() {
            return out;
        }
        for (alpha, c) in &self.terms {
            out.insert(alpha.clone(), c.scale(s));
        }
        out
    }

    /// Exact product. The result is exact through
    /// `min(deg(p) + val(q), deg(q) + val(p))`: an unknown tail of one factor
    /// can only pollute degrees above the other factor's valuation.
    pub fn mul(&self, other: &JetPoly) -> Result<JetPoly> {
        self.mul_bounded(other, Degree::Full)
    }

    /// Product truncated to `target`; errors if `target` exceeds what the
    /// factors can deliver exactly.
    pub fn mul_truncated(&self, other: &JetPoly, target: Degree) -> Result<JetPoly> {
        let p = self.mul_bounded(other, target)?;
        if p.deg < target {
            return Err(Error::InsufficientDegree {
                what: "polynomial product",
                requested: target,
                required: target,
                available: p.deg,
            });
        }
        Ok(p)
    }

    fn mul_bounded(&self, other: &JetPoly, cap: Degree) -> Result<JetPoly> {
        self.check_compatible(other)?;
        let role = Role::product(self.role, other.role)?;
        let deg = match (self.valuation(), other.valuation()) {
            (Some(vs), Some(vo)) => self.deg.plus(vo).min(other.deg.plus(vs)),
            // A factor with no stored terms contributes no products; only its
            // unknown tail limits the result.
            (Some(vs), None) => other.deg.plus(vs),
            (None, Some(vo)) => self.deg.plus(vo),
            (None, None) => match (self.deg, other.deg) {
                (Degree::Full, _) | (_, Degree::Full) => Degree::Full,
                (Degree::UpTo(a), Degree::UpTo(b)) => Degree::UpTo(a + b + 1),
            },
        };
        let deg = deg.min(cap);
        let mut out = JetPoly::zero(self.n, role, deg);
        let bound = match deg {
            Degree::UpTo(d) if d < 0 => return Ok(out),
            Degree::UpTo(d) => Some(d as usize),
            Degree::Full => None,
        };
        for (alpha, ca) in &self.terms {
            let da = alpha.degree();
            if let Some(b) = bound {
                if da > b {
                    break;
                }
            }
            for (beta, cb) in &other.terms {
                if let Some(b) = bound {
                    // graded iteration order: all later beta are no smaller
                    if da + beta.degree() > b {
                        break;
                    }
                }
                let key = alpha.add(beta);
                let prod = ca.mul(cb)?;
                let sum = out.coeff(&key).add(&prod)?;
                out.set(key, sum);
            }
        }
        Ok(out)
    }

    /// Tensors a scalar-valued jet with a fixed coefficient, e.g. promoting
    /// `p` to `p * id_E`.
    pub fn tensor(&self, value: &Coeff) -> Result<JetPoly> {
        let mut out = JetPoly::zero(self.n, value.role(), self.deg);
        for (alpha, c) in &self.terms {
            let s = c.as_scalar()?;
            out.insert(alpha.clone(), value.scale(s));
        }
        Ok(out)
    }

    /// Partial derivative in direction `i`.
    pub fn derivative(&self, i: usize) -> JetPoly {
        let mut out = JetPoly::zero(self.n, self.role, self.deg.minus(1));
        for (alpha, c) in &self.terms {
            if alpha[i] == 0 {
                continue;
            }
            let factor = Rat::from_int(alpha[i] as i64);
            let key = alpha
                .checked_sub(&MultiIndex::unit(self.n, i))
                .expect("exponent checked nonzero");
            out.insert(key, c.scale(&factor));
        }
        out
    }

    /// Iterated partial derivative `d^gamma`.
    pub fn derivative_multi(&self, gamma: &MultiIndex) -> JetPoly {
        let mut out = JetPoly::zero(self.n, self.role, self.deg.minus(gamma.degree()));
        for (alpha, c) in &self.terms {
            if let Some(key) = alpha.checked_sub(gamma) {
                // prod alpha_i! / (alpha_i - gamma_i)!
                let mut factor = Rat::one();
                for i in 0..self.n {
                    for k in 0..gamma[i] {
                        factor *= &Rat::from_int((alpha[i] - k) as i64);
                    }
                }
                out.insert(key, c.scale(&factor));
            }
        }
        out
    }

    /// The homogeneous piece of total degree `s`. A piece within the
    /// exactness bound is a completely known polynomial.
    pub fn homogeneous_piece(&self, s: usize) -> Result<JetPoly> {
        if !self.deg.admits(s) {
            return Err(Error::InsufficientDegree {
                what: "homogeneous piece",
                requested: Degree::UpTo(s as i64),
                required: Degree::UpTo(s as i64),
                available: self.deg,
            });
        }
        let mut out = JetPoly::zero(self.n, self.role, Degree::Full);
        for (alpha, c) in &self.terms {
            if alpha.degree() == s {
                out.insert(alpha.clone(), c.clone());
            }
        }
        Ok(out)
    }
}

impl fmt::Display for JetPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (alpha, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if alpha.is_zero() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*{alpha}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for JetPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JetPoly[{} @ {}]({})", self.role, self.deg, self)
    }
}

/// The polynomial `|x|^(2l)` in `n` variables, truncated to `deg`.
pub fn radial_power(n: usize, l: usize, deg: Degree) -> JetPoly {
    let mut out = JetPoly::zero(n, Role::Scalar, deg);
    if !deg.admits(2 * l) {
        return out;
    }
    // multinomial expansion of (x_1^2 + ... + x_n^2)^l
    let l_fact = Rat::factorial(l);
    for mu in MultiIndex::of_degree(n, l) {
        let coeff = &l_fact / &mu.factorial();
        let alpha = mu.add(&mu);
        out.insert(alpha, Coeff::scalar(coeff));
    }
    out
}

/// The inner product on jets with `<x^a, x^b> = a! delta_{ab}`:
/// the sum of `a! * p_a * q_b` over the common support. Pairings follow the
/// coefficient product rules, so endo-valued jets pair with vector-valued
/// sections.
pub fn sym_inner(p: &JetPoly, q: &JetPoly) -> Result<Coeff> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    let role = Role::product(p.role(), q.role())?;
    let mut acc = Coeff::zero(role);
    for (alpha, ca) in p.terms() {
        let cb = q.coeff(alpha);
        if cb.is_zero() {
            continue;
        }
        let term = ca.mul(&cb)?.scale(&alpha.factorial());
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Scales each homogeneous piece of degree `s` by `s` (the grading operator
/// on polynomials).
pub fn number_scale(p: &JetPoly) -> JetPoly {
    let mut out = JetPoly::zero(p.dim(), p.role(), p.degree());
    for (alpha, c) in p.terms() {
        out.insert(alpha.clone(), c.scale(&Rat::from_int(alpha.degree() as i64)));
    }
    out
}
