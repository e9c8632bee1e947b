//! Differential operators with jet coefficients.
//!
//! A [`DiffOp`] is a finite sum `sum_a c_a(x) d^a` whose coefficients `c_a`
//! are endomorphism-valued jets. Application and composition track exactness:
//! every request names the output degree it needs, and the operation fails
//! loudly when the coefficient jets cannot guarantee it. This is what keeps
//! the downstream heat-coefficient jets exact rather than silently drifting.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::jet_algebra::{Coeff, Degree, JetPoly, MultiIndex, Rat, Role, ZSeries};

/// Sign of the exponent in an operator exponential series.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn pow(self, r: usize) -> Rat {
        match self {
            Sign::Plus => Rat::one(),
            Sign::Minus => Rat::neg_one_pow(r),
        }
    }
}

/// A differential operator `psi |-> sum_a c_a(x) (d^a psi)(x)` acting on
/// sections with values in a rank-m fiber.
///
/// Besides the stored coefficient jets, the operator records `absent`: the
/// degree through which every *unstored* coefficient is known to vanish. A
/// coefficient that came out zero up to some truncation is not the same as a
/// coefficient that is identically zero, and conflating them would let
/// truncation errors masquerade as exact results.
#[derive(Clone, PartialEq, Eq)]
pub struct DiffOp {
    n: usize,
    rank: usize,
    absent: Degree,
    terms: BTreeMap<MultiIndex, JetPoly>,
}

impl DiffOp {
    pub fn zero(n: usize, rank: usize) -> Self {
        DiffOp {
            n,
            rank,
            absent: Degree::Full,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize, rank: usize) -> Self {
        DiffOp::constant(n, JetPoly::identity(n, rank, Degree::Full))
            .expect("identity coefficient is endo-valued")
    }

    /// Multiplication by a fixed endomorphism-valued jet (derivative order 0).
    pub fn constant(n: usize, coefficient: JetPoly) -> Result<Self> {
        let mut op = DiffOp::zero(n, coefficient_rank(&coefficient)?);
        op.add_term(MultiIndex::zero(n), coefficient)?;
        Ok(op)
    }

    /// Lowers the vanishing bound for unstored coefficients.
    pub fn with_absent_degree(mut self, bound: Degree) -> Self {
        self.absent = self.absent.min(bound);
        self
    }

    /// Multiplication by a scalar jet, promoted to `p * id`.
    pub fn multiplication(p: &JetPoly, rank: usize) -> Result<Self> {
        let coefficient = p.tensor(&Coeff::identity(rank))?;
        DiffOp::constant(p.dim(), coefficient)
    }

    /// The flat Laplacian `-sum_i d_i^2` tensored with the identity.
    pub fn flat_laplacian(n: usize, rank: usize) -> Self {
        let mut op = DiffOp::zero(n, rank);
        for i in 0..n {
            let mut alpha = MultiIndex::zero(n);
            alpha = alpha.add(&MultiIndex::unit(n, i)).add(&MultiIndex::unit(n, i));
            let c = JetPoly::identity(n, rank, Degree::Full).neg();
            op.add_term(alpha, c).expect("constant coefficient");
        }
        op
    }

    /// The grading operator `sum_i x_i d_i` (scales degree-s pieces by s).
    pub fn number_operator(n: usize, rank: usize) -> Self {
        let mut op = DiffOp::zero(n, rank);
        for i in 0..n {
            let c = JetPoly::variable(n, i, Degree::Full)
                .tensor(&Coeff::identity(rank))
                .expect("scalar jet");
            op.add_term(MultiIndex::unit(n, i), c).expect("polynomial coefficient");
        }
        op
    }

    pub fn from_terms(
        n: usize,
        rank: usize,
        terms: impl IntoIterator<Item = (MultiIndex, JetPoly)>,
    ) -> Result<Self> {
        let mut op = DiffOp::zero(n, rank);
        for (alpha, c) in terms {
            op.add_term(alpha, c)?;
        }
        Ok(op)
    }

    fn add_term(&mut self, alpha: MultiIndex, c: JetPoly) -> Result<()> {
        if alpha.len() != self.n || c.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: if alpha.len() != self.n { alpha.len() } else { c.dim() },
            });
        }
        let rank = coefficient_rank(&c)?;
        if rank != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: rank,
            });
        }
        if c.degree() < Degree::at(0) {
            return Err(Error::InsufficientDegree {
                what: "operator coefficient",
                requested: Degree::at(0),
                required: Degree::at(0),
                available: c.degree(),
            });
        }
        let sum = match self.terms.remove(&alpha) {
            None => c,
            Some(prev) => prev.add(&c)?,
        };
        if sum.is_zero() {
            // A coefficient that vanishes only up to its bound still limits
            // what the operator may claim about unstored entries.
            self.absent = self.absent.min(sum.degree());
        } else {
            self.terms.insert(alpha, sum);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Derivative order: the largest |a| with a nonzero coefficient.
    pub fn order(&self) -> usize {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// Exactness degree of the coefficient jets (the worst one), including
    /// the vanishing bound for unstored coefficients.
    pub fn coeff_degree(&self) -> Degree {
        self.terms
            .values()
            .map(JetPoly::degree)
            .min()
            .unwrap_or(Degree::Full)
            .min(self.absent)
    }

    /// Degree through which unstored coefficients are known to vanish.
    pub fn absent_degree(&self) -> Degree {
        self.absent
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &JetPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> JetPoly {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| JetPoly::zero(self.n, Role::Endo { rank: self.rank }, self.absent))
    }

    pub fn add(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check_shape(other)?;
        let mut out = DiffOp::zero(self.n, self.rank);
        out.absent = self.absent.min(other.absent);
        let keys: std::collections::BTreeSet<_> =
            self.terms.keys().chain(other.terms.keys()).cloned().collect();
        for alpha in keys {
            // a key stored on one side only still gets capped by the other
            // side's vanishing bound
            let sum = self.coefficient(&alpha).add(&other.coefficient(&alpha))?;
            out.add_term(alpha, sum)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiffOp) -> Result<DiffOp> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffOp {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, s: &Rat) -> DiffOp {
        let mut out = DiffOp::zero(self.n, self.rank);
        if s.is_zero() {
            return out;
        }
        out.absent = self.absent;
        for (alpha, c) in &self.terms {
            out.terms.insert(alpha.clone(), c.scale(s));
        }
        out
    }

    /// Truncates every coefficient jet to `target`.
    pub fn truncated(&self, target: Degree) -> Result<DiffOp> {
        if target > self.absent {
            return Err(Error::InsufficientDegree {
                what: "operator truncation",
                requested: target,
                required: target,
                available: self.absent,
            });
        }
        let mut out = DiffOp::zero(self.n, self.rank);
        out.absent = target;
        for (alpha, c) in &self.terms {
            if target > c.degree() {
                return Err(Error::InsufficientDegree {
                    what: "operator truncation",
                    requested: target,
                    required: target,
                    available: c.degree(),
                });
            }
            let t = c.truncated(target)?;
            out.add_term(alpha.clone(), t)?;
        }
        Ok(out)
    }

    fn check_shape(&self, other: &DiffOp) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        Ok(())
    }

    /// Applies the operator to a section jet, exact through `dout`.
    ///
    /// The section must be vector- or endomorphism-valued with the operator's
    /// rank. Errors when the coefficient jets or the section jet are too
    /// short to make the output exact at `dout`.
    pub fn apply(&self, psi: &JetPoly, dout: Degree) -> Result<JetPoly> {
        if psi.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: psi.dim(),
            });
        }
        let out_role = match psi.role() {
            Role::Vector { rank } | Role::Endo { rank } if rank == self.rank => {
                Role::product(Role::Endo { rank: self.rank }, psi.role())?
            }
            other => {
                return Err(Error::RoleMismatch {
                    expected: Role::Vector { rank: self.rank },
                    found: other,
                })
            }
        };
        if dout > self.absent {
            return Err(Error::InsufficientDegree {
                what: "operator application",
                requested: dout,
                required: dout,
                available: self.absent,
            });
        }
        let mut acc = JetPoly::zero(self.n, out_role, dout);
        for (alpha, c) in &self.terms {
            let d_psi = psi.derivative_multi(alpha);
            let term = c.mul_truncated(&d_psi, dout).map_err(|e| match e {
                Error::InsufficientDegree { available, .. } => Error::InsufficientDegree {
                    what: "operator application",
                    requested: dout,
                    required: dout,
                    available,
                },
                other => other,
            })?;
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// The composition `self . other`, with output coefficients exact through
    /// `target`. By the Leibniz rule the derivatives of `self` fall on the
    /// coefficients of `other`, so `other` needs `target + order(self)` of
    /// coefficient exactness while `self` needs only `target`.
    pub fn compose(&self, other: &DiffOp, target: Degree) -> Result<DiffOp> {
        self.check_shape(other)?;
        if target < Degree::at(0) {
            return Err(Error::InvalidArgument(
                "composition target degree must be at least 0".into(),
            ));
        }
        let available = self
            .coeff_degree()
            .min(other.coeff_degree().minus(self.order()));
        if target > available {
            return Err(Error::InsufficientDegree {
                what: "operator composition",
                requested: target,
                required: target,
                available,
            });
        }
        let mut out = DiffOp::zero(self.n, self.rank);
        for (alpha, a) in &self.terms {
            for gamma in alpha.subindices() {
                let delta = alpha
                    .checked_sub(&gamma)
                    .expect("subindices divide alpha");
                let binom = alpha.binomial(&gamma);
                for (beta, b) in &other.terms {
                    // A stored-zero derivative still carries its exactness
                    // bound: a truncated coefficient may hide a nonzero tail,
                    // so the product check below must still run.
                    let db = b.derivative_multi(&delta);
                    let contrib = a
                        .mul_truncated(&db, target)
                        .map_err(|e| match e {
                            Error::InsufficientDegree { .. } => Error::InsufficientDegree {
                                what: "operator composition",
                                requested: target,
                                required: target,
                                available,
                            },
                            other => other,
                        })?
                        .scale(&binom);
                    out.add_term(gamma.add(beta), contrib)?;
                }
            }
        }
        out.absent = out.absent.min(target);
        Ok(out)
    }

    /// `self^k` by repeated composition, exact through `target`. Earlier
    /// factors are kept at higher degree so the final power is exact:
    /// the j-th intermediate needs `target + order * (k - j)`.
    pub fn pow(&self, k: usize, target: Degree) -> Result<DiffOp> {
        let ord = self.order();
        let mut acc = DiffOp::identity(self.n, self.rank);
        for j in 1..=k {
            let t = target.plus(ord * (k - j));
            acc = self.compose(&acc, t)?;
        }
        Ok(acc)
    }

    /// The value of the operator at the origin, transported to a polynomial:
    /// `sum_a c_a(0) x^a`. Pairing against a section jet with the symmetric
    /// inner product recovers `[D psi](0)`.
    pub fn ev_sharp(&self) -> JetPoly {
        let mut out = JetPoly::zero(self.n, Role::Endo { rank: self.rank }, Degree::Full);
        for (alpha, c) in &self.terms {
            let v = c.value_at_origin();
            if v.is_zero() {
                continue;
            }
            let mono = JetPoly::monomial(self.n, alpha.clone(), v, Degree::Full);
            out = out.add(&mono).expect("endo role throughout");
        }
        out
    }

    /// The series `e^{+-zD}` of operators: entry r is `(+-1)^r D^r / r!`,
    /// with coefficients exact through `coeff_target`.
    pub fn exponential_series(
        &self,
        sign: Sign,
        order: usize,
        coeff_target: Degree,
    ) -> Result<ZSeries<DiffOp>> {
        let ord = self.order();
        let mut entries = Vec::with_capacity(order + 1);
        entries.push(DiffOp::identity(self.n, self.rank));
        let mut power = DiffOp::identity(self.n, self.rank);
        for r in 1..=order {
            let t = coeff_target.plus(ord * (order - r));
            power = self.compose(&power, t)?;
            let factor = sign.pow(r) / Rat::factorial(r);
            entries.push(power.scale(&factor));
        }
        Ok(ZSeries::new(entries))
    }
}

fn coefficient_rank(c: &JetPoly) -> Result<usize> {
    match c.role() {
        Role::Endo { rank } => Ok(rank),
        other => Err(Error::RoleMismatch {
            expected: Role::Endo { rank: 0 },
            found: other,
        }),
    }
}

impl fmt::Display for DiffOp {
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
            write!(f, "[{c}]")?;
            if !alpha.is_zero() {
                let names: Vec<String> = alpha
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            format!("d{}", i + 1)
                        } else {
                            format!("d{}^{}", i + 1, e)
                        }
                    })
                    .collect();
                write!(f, " {}", names.join(" "))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOp[n={}, m={}]({})", self.n, self.rank, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet_algebra::{radial_power, sym_inner};

    fn endo1(p: JetPoly) -> JetPoly {
        p.tensor(&Coeff::identity(1)).unwrap()
    }

    fn scalar_value(c: &Coeff) -> Rat {
        c.endo_entries().unwrap()[0].clone()
    }

    #[test]
    fn flat_laplacian_values() {
        // n=1 on x^2 at the origin: -2
        let lap = DiffOp::flat_laplacian(1, 1);
        let x2 = endo1(JetPoly::monomial(
            1,
            MultiIndex::new(vec![2]),
            Coeff::scalar(Rat::one()),
            Degree::Full,
        ));
        let v = lap.apply(&x2, Degree::at(0)).unwrap().value_at_origin();
        assert_eq!(scalar_value(&v), Rat::from_int(-2));

        // n=3 on |x|^2: -6
        let lap = DiffOp::flat_laplacian(3, 1);
        let r2 = endo1(radial_power(3, 1, Degree::Full));
        let v = lap.apply(&r2, Degree::at(0)).unwrap().value_at_origin();
        assert_eq!(scalar_value(&v), Rat::from_int(-6));

        // n=2 on the harmonic monomial x1 x2: 0
        let lap = DiffOp::flat_laplacian(2, 1);
        let xy = endo1(JetPoly::monomial(
            2,
            MultiIndex::new(vec![1, 1]),
            Coeff::scalar(Rat::one()),
            Degree::Full,
        ));
        assert!(lap.apply(&xy, Degree::at(2)).unwrap().is_zero());
    }

    #[test]
    fn identity_and_euler() {
        let id = DiffOp::identity(2, 1);
        let psi = endo1(radial_power(2, 1, Degree::Full));
        assert_eq!(id.apply(&psi, Degree::Full).unwrap(), psi);

        // (x1 d1) x1^2 = 2 x1^2
        let euler = DiffOp::from_terms(
            1,
            1,
            [(
                MultiIndex::new(vec![1]),
                endo1(JetPoly::variable(1, 0, Degree::Full)),
            )],
        )
        .unwrap();
        let x2 = endo1(JetPoly::monomial(
            1,
            MultiIndex::new(vec![2]),
            Coeff::scalar(Rat::one()),
            Degree::Full,
        ));
        let out = euler.apply(&x2, Degree::at(2)).unwrap();
        assert_eq!(out, x2.scale(&Rat::from_int(2)).truncated(Degree::at(2)).unwrap());
    }

    #[test]
    fn compose_squares_the_flat_laplacian() {
        // (-d^2)(-d^2) = d^4 in n=1
        let lap = DiffOp::flat_laplacian(1, 1);
        let sq = lap.compose(&lap, Degree::Full).unwrap();
        let expected = DiffOp::from_terms(
            1,
            1,
            [(
                MultiIndex::new(vec![4]),
                JetPoly::identity(1, 1, Degree::Full),
            )],
        )
        .unwrap();
        assert_eq!(sq, expected);
        assert_eq!(lap.pow(2, Degree::Full).unwrap(), expected);

        let id = DiffOp::identity(1, 1);
        assert_eq!(id.compose(&lap, Degree::Full).unwrap(), lap);
    }

    #[test]
    fn commutator_with_radial_square_is_grading() {
        // [Delta, |x|^2 .] = -4 (N + n/2) as operators, n=2
        let n = 2;
        let lap = DiffOp::flat_laplacian(n, 1);
        let mult = DiffOp::multiplication(&radial_power(n, 1, Degree::Full), 1).unwrap();
        let comm = lap
            .compose(&mult, Degree::Full)
            .unwrap()
            .sub(&mult.compose(&lap, Degree::Full).unwrap())
            .unwrap();
        let expected = DiffOp::number_operator(n, 1)
            .add(&DiffOp::constant(n, JetPoly::identity(n, 1, Degree::Full)).unwrap())
            .unwrap()
            .scale(&Rat::from_int(-4));
        assert_eq!(comm, expected);
    }

    #[test]
    fn ev_sharp_examples() {
        // d1^2 + x1 d2: the x1 d2 coefficient vanishes at the origin
        let op = DiffOp::from_terms(
            2,
            1,
            [
                (
                    MultiIndex::new(vec![2, 0]),
                    JetPoly::identity(2, 1, Degree::Full),
                ),
                (
                    MultiIndex::new(vec![0, 1]),
                    endo1(JetPoly::variable(2, 0, Degree::Full)),
                ),
            ],
        )
        .unwrap();
        let sharp = op.ev_sharp();
        let expected = endo1(JetPoly::monomial(
            2,
            MultiIndex::new(vec![2, 0]),
            Coeff::scalar(Rat::one()),
            Degree::Full,
        ));
        assert_eq!(sharp, expected);

        // flat Laplacian in n=2: -(x1^2 + x2^2)
        let lap = DiffOp::flat_laplacian(2, 1);
        assert_eq!(lap.ev_sharp(), endo1(radial_power(2, 1, Degree::Full)).neg());

        // identity: 1
        assert_eq!(
            DiffOp::identity(2, 1).ev_sharp(),
            JetPoly::identity(2, 1, Degree::Full)
        );
    }

    #[test]
    fn exponential_series_cases() {
        // D = 0: (id, 0, 0, ...)
        let zero = DiffOp::zero(2, 1);
        let s = zero.exponential_series(Sign::Minus, 3, Degree::Full).unwrap();
        assert_eq!(s.get(0), &DiffOp::identity(2, 1));
        assert!(s.get(1).is_zero() && s.get(2).is_zero() && s.get(3).is_zero());

        // D = flat Laplacian, R = 2: entry 2 is Delta^2 / 2
        let lap = DiffOp::flat_laplacian(1, 1);
        let s = lap.exponential_series(Sign::Minus, 2, Degree::Full).unwrap();
        assert_eq!(
            s.get(2),
            &lap.pow(2, Degree::Full).unwrap().scale(&Rat::new(1, 2))
        );
        assert_eq!(s.get(1), &lap.neg());

        // D = Delta + c: entry r = (-1)^r (Delta + c)^r / r!
        let c = Rat::new(5, 3);
        let shifted = lap
            .add(&DiffOp::constant(1, JetPoly::identity(1, 1, Degree::Full).scale(&c)).unwrap())
            .unwrap();
        let s = shifted.exponential_series(Sign::Minus, 3, Degree::Full).unwrap();
        for r in 0..=3 {
            let direct = shifted
                .pow(r, Degree::Full)
                .unwrap()
                .scale(&(Rat::neg_one_pow(r) / Rat::factorial(r)));
            assert_eq!(s.get(r), &direct);
        }
    }

    #[test]
    fn apply_reports_insufficient_truncation() {
        let lap = DiffOp::flat_laplacian(1, 1);
        // psi known only to degree 3 cannot give a degree-2 exact image
        let psi = endo1(JetPoly::variable(1, 0, Degree::Full))
            .truncated(Degree::at(3))
            .unwrap();
        assert!(lap.apply(&psi, Degree::at(2)).is_err());
        assert!(lap.apply(&psi, Degree::at(1)).is_ok());
    }

    #[test]
    fn compose_degree_accounting() {
        // multiplication by a degree-2 jet composed after the Laplacian:
        // coefficients of the right factor get differentiated twice.
        let g = JetPoly::one(1, Degree::at(4));
        let mult = DiffOp::multiplication(&g, 1).unwrap();
        let lap = DiffOp::flat_laplacian(1, 1);
        // left factor order 2 needs right coefficients at target + 2
        assert!(lap.compose(&mult, Degree::at(3)).is_err());
        assert!(lap.compose(&mult, Degree::at(2)).is_ok());
        // the other order is harmless: constant coefficients differentiate freely
        assert!(mult.compose(&lap, Degree::at(4)).is_ok());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_rat() -> impl Strategy<Value = Rat> {
            (-6i64..=6, 1i64..=4).prop_map(|(p, q)| Rat::new(p, q))
        }

        /// Random scalar polynomial of degree <= max_deg in n variables.
        fn arb_scalar_poly(n: usize, max_deg: usize) -> impl Strategy<Value = JetPoly> {
            let monos = MultiIndex::up_to_degree(n, max_deg);
            proptest::collection::vec(arb_rat(), monos.len()).prop_map(move |cs| {
                JetPoly::from_terms(
                    n,
                    Role::Scalar,
                    Degree::Full,
                    monos
                        .iter()
                        .cloned()
                        .zip(cs.into_iter().map(Coeff::scalar)),
                )
                .unwrap()
            })
        }

        /// Random operator with polynomial coefficients. Order and coefficient
        /// degree stay small so that repeated full-degree compositions in the
        /// properties below remain fast.
        fn arb_diffop_sized(n: usize, order: usize, cdeg: usize) -> impl Strategy<Value = DiffOp> {
            let alphas = MultiIndex::up_to_degree(n, order);
            let len = alphas.len();
            proptest::collection::vec(arb_scalar_poly(n, cdeg), len).prop_map(move |cs| {
                DiffOp::from_terms(
                    n,
                    1,
                    alphas
                        .iter()
                        .cloned()
                        .zip(cs.into_iter().map(|p| p.tensor(&Coeff::identity(1)).unwrap())),
                )
                .unwrap()
            })
        }

        fn arb_diffop(n: usize) -> impl Strategy<Value = DiffOp> {
            arb_diffop_sized(n, 4, 4)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            /// <ev_sharp(D), psi> = [D psi](0) exactly.
            #[test]
            fn ev_sharp_defining_identity(
                op in arb_diffop(2),
                psi in arb_scalar_poly(2, 6),
            ) {
                let psi = psi.tensor(&Coeff::identity(1)).unwrap();
                let lhs = sym_inner(&op.ev_sharp(), &psi).unwrap();
                let rhs = op.apply(&psi, Degree::at(0)).unwrap().value_at_origin();
                prop_assert_eq!(lhs, rhs);
            }

            /// Green's identity for the flat Laplacian:
            /// Delta(pq) = (Delta p) q - 2 sum_i (d_i p)(d_i q) + p (Delta q).
            #[test]
            fn greens_identity(
                p in arb_scalar_poly(2, 5),
                q in arb_scalar_poly(2, 5),
            ) {
                let n = 2;
                let lap = DiffOp::flat_laplacian(n, 1);
                let e = |s: &JetPoly| s.tensor(&Coeff::identity(1)).unwrap();
                let lhs = lap.apply(&e(&p.mul(&q).unwrap()), Degree::Full).unwrap();
                let mut rhs = lap
                    .apply(&e(&p), Degree::Full)
                    .unwrap()
                    .mul(&e(&q))
                    .unwrap();
                for i in 0..n {
                    let cross = p.derivative(i).mul(&q.derivative(i)).unwrap();
                    rhs = rhs.sub(&e(&cross).scale(&Rat::from_int(2))).unwrap();
                }
                rhs = rhs
                    .add(&e(&p).mul(&lap.apply(&e(&q), Degree::Full).unwrap()).unwrap())
                    .unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            /// Composition is associative at full polynomial exactness.
            #[test]
            fn compose_associative(
                a in arb_diffop_sized(2, 2, 2),
                b in arb_diffop_sized(2, 2, 2),
                c in arb_diffop_sized(2, 2, 2),
            ) {
                let ab_c = a
                    .compose(&b, Degree::Full)
                    .unwrap()
                    .compose(&c, Degree::Full)
                    .unwrap();
                let a_bc = a
                    .compose(&b.compose(&c, Degree::Full).unwrap(), Degree::Full)
                    .unwrap();
                prop_assert_eq!(ab_c, a_bc);
            }

            /// apply(compose(A,B), psi) = apply(A, apply(B, psi)).
            #[test]
            fn compose_matches_iterated_apply(
                a in arb_diffop_sized(2, 2, 3),
                b in arb_diffop_sized(2, 2, 3),
                psi in arb_scalar_poly(2, 6),
            ) {
                let psi = psi.tensor(&Coeff::identity(1)).unwrap();
                let lhs = a
                    .compose(&b, Degree::Full)
                    .unwrap()
                    .apply(&psi, Degree::Full)
                    .unwrap();
                let rhs = a
                    .apply(&b.apply(&psi, Degree::Full).unwrap(), Degree::Full)
                    .unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            /// [Delta, |x|^2] psi = -4 (N + n/2) psi on polynomials, n <= 3.
            #[test]
            fn radial_commutator_grades(
                n in 1usize..=3,
                psi in arb_scalar_poly(3, 6),
            ) {
                // build psi in the right dimension by restriction
                let psi = {
                    let terms: Vec<_> = psi
                        .terms()
                        .filter(|(a, _)| a.exponents()[n..].iter().all(|&e| e == 0))
                        .map(|(a, c)| {
                            (MultiIndex::new(a.exponents()[..n].to_vec()), c.clone())
                        })
                        .collect();
                    JetPoly::from_terms(n, Role::Scalar, Degree::Full, terms).unwrap()
                };
                let e = psi.tensor(&Coeff::identity(1)).unwrap();
                let lap = DiffOp::flat_laplacian(n, 1);
                let r2 = radial_power(n, 1, Degree::Full);
                let lhs = lap
                    .apply(&e.mul(&r2.tensor(&Coeff::identity(1)).unwrap()).unwrap(), Degree::Full)
                    .unwrap()
                    .sub(&lap.apply(&e, Degree::Full).unwrap().mul(&r2.tensor(&Coeff::identity(1)).unwrap()).unwrap())
                    .unwrap();
                let graded = crate::jet_algebra::number_scale(&e);
                let rhs = graded
                    .add(&e.scale(&Rat::new(n as i64, 2)))
                    .unwrap()
                    .scale(&Rat::from_int(-4));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
