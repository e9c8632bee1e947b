//! The heat-coefficient pipeline.
//!
//! For a generalized Laplacian `L` on sections over `R^n` and the flat
//! Laplacian `D`, the formal series `e^{-zL} e^{zD} = 1 + z D_1 + z^2 D_2 + ...`
//! measures how `L` deviates from the flat model. Its value at the origin,
//! split into powers of `z` and homogeneous pieces, determines every jet of
//! the heat expansion coefficients `a_k`: the degree-l piece of `a_k` is
//!
//! ```text
//!   sum_{t=0..k}  1/(2^(l+2t) t!) * Delta^t (piece of z^(k+l+t), degree l+2t)
//! ```
//!
//! The module builds the series by its recursion, reads off the value table,
//! assembles the jets, and cross-checks them three independent ways: the
//! Polterovich inversion formula for the diagonal values, a closed formula
//! for the table in terms of powers of `L` alone, and the intertwining
//! property that characterizes the coefficients in the first place.

use std::fmt;

use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::jet_algebra::{
    radial_power, rational_binomial, Coeff, Degree, JetPoly, Rat, Role, ZSeries,
};

/// How a difference series or value table was produced.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Provenance {
    Recursion,
    FromPowers,
}

/// The truncated series `e^{-zL} e^{zD}` of differential operators.
#[derive(Clone, Debug)]
pub struct DifferenceOp {
    entries: ZSeries<DiffOp>,
    provenance: Provenance,
    coeff_degree: Degree,
}

impl DifferenceOp {
    pub fn order(&self) -> usize {
        self.entries.order()
    }

    pub fn entry(&self, r: usize) -> &DiffOp {
        self.entries.get(r)
    }

    pub fn entries(&self) -> &ZSeries<DiffOp> {
        &self.entries
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn coeff_degree(&self) -> Degree {
        self.coeff_degree
    }
}

/// Builds the difference series of `l` to the given order in `z` by the
/// recursion `r D_r = D_{r-1} Delta - L D_{r-1}`, with every entry's
/// coefficients exact through `target`.
///
/// Entry r needs `target + order(L) * (R - r)` digits of coefficient
/// exactness while it is still being recursed on, so the input operator
/// must be exact through `target + order(L) * (R - 1)`.
pub fn difference_operator(l: &DiffOp, order: usize, target: Degree) -> Result<DifferenceOp> {
    if target < Degree::at(0) {
        return Err(Error::InvalidArgument(
            "difference series needs a target degree of at least 0".into(),
        ));
    }
    let ord = l.order();
    if order >= 1 {
        let required = target.plus(ord * (order - 1));
        if l.coeff_degree() < required {
            return Err(Error::InsufficientDegree {
                what: "generalized Laplacian coefficients",
                requested: target,
                required,
                available: l.coeff_degree(),
            });
        }
    }
    let flat = DiffOp::flat_laplacian(l.dim(), l.rank());
    let mut entries = Vec::with_capacity(order + 1);
    entries.push(DiffOp::identity(l.dim(), l.rank()));
    for r in 1..=order {
        let t = target.plus(ord * (order - r));
        let prev = entries.last().expect("series is nonempty");
        let lhs = prev.compose(&flat, t)?;
        let rhs = l.compose(prev, t)?;
        let inv_r = Rat::from_int(r as i64).recip().expect("r >= 1");
        entries.push(lhs.sub(&rhs)?.scale(&inv_r));
    }
    Ok(DifferenceOp {
        entries: ZSeries::new(entries),
        provenance: Provenance::Recursion,
        coeff_degree: target,
    })
}

/// The value of a difference series at the origin, split into powers of `z`
/// and homogeneous pieces: `pieces[r][s]` is the degree-s part of the
/// polynomial attached to `z^r`. The triangular shape `s <= r` is a theorem
/// about generalized Laplacians, and its violation is always reported rather
/// than repaired: it signals a corrupted series upstream.
#[derive(Clone, Debug)]
pub struct EvSharpTable {
    n: usize,
    rank: usize,
    pieces: Vec<Vec<JetPoly>>,
    provenance: Provenance,
}

impl EvSharpTable {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> usize {
        self.pieces.len() - 1
    }

    /// The degree-s piece at z^r (zero when s > r by the order bound).
    pub fn piece(&self, r: usize, s: usize) -> JetPoly {
        self.pieces[r]
            .get(s)
            .cloned()
            .unwrap_or_else(|| JetPoly::zero(self.n, Role::Endo { rank: self.rank }, Degree::Full))
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    fn from_sharps(
        n: usize,
        rank: usize,
        sharps: Vec<(usize, JetPoly)>,
        provenance: Provenance,
    ) -> Result<Self> {
        let mut pieces = Vec::with_capacity(sharps.len());
        for (r, sharp) in sharps {
            let top = sharp.max_term_degree().unwrap_or(0);
            for s in (r + 1)..=top {
                if !sharp.homogeneous_piece(s)?.is_zero() {
                    return Err(Error::OrderBound { order: r, degree: s });
                }
            }
            let row = (0..=r)
                .map(|s| sharp.homogeneous_piece(s))
                .collect::<Result<Vec<_>>>()?;
            pieces.push(row);
        }
        Ok(EvSharpTable {
            n,
            rank,
            pieces,
            provenance,
        })
    }
}

/// Reads the value table off a difference series.
pub fn ev_sharp_table(d: &DifferenceOp) -> Result<EvSharpTable> {
    let n = d.entry(0).dim();
    let rank = d.entry(0).rank();
    let sharps = (0..=d.order())
        .map(|r| (r, d.entry(r).ev_sharp()))
        .collect();
    EvSharpTable::from_sharps(n, rank, sharps, Provenance::Recursion)
}

/// Computes the same value table from powers of `l` alone:
///
/// ```text
///   piece(r, s) = sum_{mu=0..r} (-1)^r / (mu! (r-mu)!)
///                 * |x|^(2 mu) * [value of l^(r-mu)]_(s - 2 mu)
/// ```
///
/// This is an independent route to the same data; agreement with
/// [`ev_sharp_table`] is the strongest internal consistency check the
/// pipeline has.
pub fn ev_sharp_from_powers(l: &DiffOp, order: usize) -> Result<EvSharpTable> {
    let n = l.dim();
    let rank = l.rank();
    let ord = l.order();
    let mut sharp_of_power = Vec::with_capacity(order + 1);
    sharp_of_power.push(DiffOp::identity(n, rank).ev_sharp());
    let mut power = DiffOp::identity(n, rank);
    for j in 1..=order {
        let t = Degree::at(0).plus(ord * (order - j));
        power = l.compose(&power, t)?;
        sharp_of_power.push(power.ev_sharp());
    }

    let mut sharps = Vec::with_capacity(order + 1);
    for r in 0..=order {
        let mut acc = JetPoly::zero(n, Role::Endo { rank }, Degree::Full);
        let sign = Rat::neg_one_pow(r);
        for mu in 0..=r {
            let weight = radial_power(n, mu, Degree::Full);
            let factor = &sign / &(Rat::factorial(mu) * Rat::factorial(r - mu));
            let sharp = &sharp_of_power[r - mu];
            let term = weight.mul(sharp)?.scale(&factor);
            acc = acc.add(&term)?;
        }
        sharps.push((r, acc));
    }
    EvSharpTable::from_sharps(n, rank, sharps, Provenance::FromPowers)
}

/// Jets at the origin of the heat coefficients `a_0 ..= a_K`, every entry
/// exact through a common truncation degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HeatJets {
    n: usize,
    rank: usize,
    degree: u32,
    coeffs: Vec<JetPoly>,
}

impl HeatJets {
    pub fn new(n: usize, rank: usize, degree: u32, coeffs: Vec<JetPoly>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "heat jets need at least the k = 0 coefficient".into(),
            ));
        }
        let endo = Role::Endo { rank };
        let mut canonical = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            if c.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.dim(),
                });
            }
            if c.role() != endo {
                return Err(Error::RoleMismatch {
                    expected: endo,
                    found: c.role(),
                });
            }
            if c.degree() < Degree::at(degree) {
                return Err(Error::InsufficientDegree {
                    what: "heat coefficient jet",
                    requested: Degree::at(degree),
                    required: Degree::at(degree),
                    available: c.degree(),
                });
            }
            canonical.push(c.truncated(Degree::at(degree))?);
        }
        Ok(HeatJets {
            n,
            rank,
            degree,
            coeffs: canonical,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn max_k(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn get(&self, k: usize) -> &JetPoly {
        &self.coeffs[k]
    }

    pub fn coefficients(&self) -> &[JetPoly] {
        &self.coeffs
    }

    /// Replaces one coefficient jet (used to build counterexample fixtures).
    pub fn with_coefficient(&self, k: usize, jet: JetPoly) -> Result<HeatJets> {
        let mut coeffs = self.coeffs.clone();
        if k >= coeffs.len() {
            return Err(Error::InvalidArgument(format!(
                "index {k} exceeds max k = {}",
                self.max_k()
            )));
        }
        coeffs[k] = jet;
        HeatJets::new(self.n, self.rank, self.degree, coeffs)
    }
}

/// Assembles heat coefficient jets from a value table.
pub fn heat_jets_from_table(table: &EvSharpTable, max_k: usize, dmax: u32) -> Result<HeatJets> {
    let needed = 2 * max_k + dmax as usize;
    if table.order() < needed {
        return Err(Error::InsufficientDegree {
            what: "difference value table",
            requested: Degree::at(dmax),
            required: Degree::UpTo(needed as i64),
            available: Degree::UpTo(table.order() as i64),
        });
    }
    let n = table.dim();
    let rank = table.rank();
    let flat = DiffOp::flat_laplacian(n, rank);
    let mut coeffs = Vec::with_capacity(max_k + 1);
    for k in 0..=max_k {
        let mut acc = JetPoly::zero(n, Role::Endo { rank }, Degree::at(dmax));
        for l in 0..=dmax as usize {
            for t in 0..=k {
                let mut piece = table.piece(k + l + t, l + 2 * t);
                if piece.is_zero() {
                    continue;
                }
                for _ in 0..t {
                    piece = flat.apply(&piece, Degree::Full)?;
                }
                let factor = Rat::from_int(2).pow((l + 2 * t) as u32) * Rat::factorial(t);
                let factor = factor.recip().expect("positive factor");
                acc = acc.add(&piece.scale(&factor).truncated(Degree::at(dmax))?)?;
            }
        }
        coeffs.push(acc);
    }
    HeatJets::new(n, rank, dmax, coeffs)
}

/// Computes the heat coefficient jets of `l` for `k <= max_k`, exact through
/// degree `dmax`, via the difference-series recursion.
pub fn heat_jets(l: &DiffOp, max_k: usize, dmax: u32) -> Result<HeatJets> {
    let order = 2 * max_k + dmax as usize;
    let d = difference_operator(l, order, Degree::at(0))?;
    let table = ev_sharp_table(&d)?;
    heat_jets_from_table(&table, max_k, dmax)
}

/// Applies `l` to `psi` `count` times and evaluates at the origin. The i-th
/// intermediate image is kept exact through `order(l) * (count - i)`, which
/// is precisely what the remaining applications consume.
fn iterated_value(l: &DiffOp, psi: &JetPoly, count: usize) -> Result<Coeff> {
    let ord = l.order();
    let mut cur = psi.clone();
    for i in 1..=count {
        cur = l.apply(&cur, Degree::at((ord * (count - i)) as u32))?;
    }
    Ok(cur.value_at_origin())
}

/// Polterovich's inversion formula for the diagonal action of `a_k`:
///
/// ```text
///   [a_k psi](0) = sum_{l=0..r} (-1/4)^l binom(r + n/2, r - l)
///                  * (-1)^(k+l)/(k+l)! * [L^(k+l) (|x|^(2l)/l! psi)](0)
/// ```
///
/// valid for every `r >= k`; the result does not depend on `r`, which the
/// verification suites exercise as a stability check.
pub fn polterovich_value(l: &DiffOp, k: usize, r: usize, psi: &JetPoly) -> Result<Coeff> {
    if r < k {
        return Err(Error::InvalidArgument(format!(
            "inversion formula needs r >= k, got r = {r}, k = {k}"
        )));
    }
    let n = l.dim();
    let out_role = Role::product(Role::Endo { rank: l.rank() }, psi.role())?;
    let half_n = Rat::new(n as i64, 2);
    let upper = &Rat::from_int(r as i64) + &half_n;
    let mut acc = Coeff::zero(out_role);
    for lp in 0..=r {
        let mu = k + lp;
        let weight = radial_power(n, lp, Degree::Full).scale(
            &Rat::factorial(lp).recip().expect("factorial positive"),
        );
        let section = weight.mul(psi)?;
        let value = iterated_value(l, &section, mu)?;
        let factor = Rat::new(-1, 4).pow(lp as u32)
            * rational_binomial(&upper, (r - lp) as u32)
            * (Rat::neg_one_pow(mu) / Rat::factorial(mu));
        acc = acc.add(&value.scale(&factor))?;
    }
    Ok(acc)
}

/// Closed form for flat-Laplacian moments of radially weighted sections:
/// the value `(-4)^k binom(-n/2 - l, k) [(-1)^l / l! Delta^l psi](0)`, which
/// equals `[(-1)^(k+l)/(k+l)! Delta^(k+l) (|x|^(2k)/k! psi)](0)`.
pub fn radial_moment_rhs(n: usize, k: usize, l: usize, psi: &JetPoly) -> Result<Coeff> {
    let rank = match psi.role() {
        Role::Vector { rank } | Role::Endo { rank } => rank,
        Role::Scalar => {
            return Err(Error::RoleMismatch {
                expected: Role::Vector { rank: 1 },
                found: Role::Scalar,
            })
        }
    };
    let flat = DiffOp::flat_laplacian(n, rank);
    let value = iterated_value(&flat, psi, l)?;
    let half_n = Rat::new(n as i64, 2);
    let upper = -(&half_n + &Rat::from_int(l as i64));
    let factor = Rat::from_int(-4).pow(k as u32)
        * rational_binomial(&upper, k as u32)
        * (Rat::neg_one_pow(l) / Rat::factorial(l));
    Ok(value.scale(&factor))
}

/// One failed comparison in an intertwining check.
#[derive(Clone, Debug)]
pub struct IntertwineWitness {
    pub mu: usize,
    pub section: String,
    pub lhs: Coeff,
    pub rhs: Coeff,
}

impl fmt::Display for IntertwineWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mu = {}, psi = {}: lhs {} != rhs {}",
            self.mu, self.section, self.lhs, self.rhs
        )
    }
}

/// Result of checking the intertwining identity for one section.
#[derive(Clone, Debug, Default)]
pub struct IntertwineReport {
    pub checked: usize,
    pub failures: Vec<IntertwineWitness>,
}

impl IntertwineReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: IntertwineReport) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
    }
}

/// Checks, for `mu = 0 ..= mu_max`, the exact identity
///
/// ```text
///   (-1)^mu / mu! [L^mu psi](0)
///     = sum_{nu=0..mu} (-1)^nu / nu! [Delta^nu (a_{mu-nu} psi)](0)
/// ```
///
/// The heat coefficients are the unique jets satisfying it, so any corrupted
/// coefficient eventually produces a witness here.
pub fn intertwine_check(
    l: &DiffOp,
    a: &HeatJets,
    mu_max: usize,
    psi: &JetPoly,
) -> Result<IntertwineReport> {
    if a.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: a.dim(),
        });
    }
    if a.rank() != l.rank() {
        return Err(Error::RankMismatch {
            expected: l.rank(),
            found: a.rank(),
        });
    }
    if mu_max > a.max_k() {
        return Err(Error::InvalidArgument(format!(
            "checking mu <= {mu_max} needs coefficients up to k = {mu_max}, have {}",
            a.max_k()
        )));
    }
    let flat = DiffOp::flat_laplacian(l.dim(), l.rank());
    let mut report = IntertwineReport::default();
    for mu in 0..=mu_max {
        let lhs = iterated_value(l, psi, mu)?
            .scale(&(Rat::neg_one_pow(mu) / Rat::factorial(mu)));
        let mut rhs = Coeff::zero(lhs.role());
        for nu in 0..=mu {
            let section = a.get(mu - nu).mul(psi)?;
            let value = iterated_value(&flat, &section, nu)?;
            rhs = rhs.add(&value.scale(&(Rat::neg_one_pow(nu) / Rat::factorial(nu))))?;
        }
        report.checked += 1;
        if lhs != rhs {
            report.failures.push(IntertwineWitness {
                mu,
                section: psi.to_string(),
                lhs,
                rhs,
            });
        }
    }
    Ok(report)
}

/// Runs [`intertwine_check`] over the monomial basis of sections up to
/// `basis_degree`, on every fiber basis vector.
pub fn intertwine_check_basis(
    l: &DiffOp,
    a: &HeatJets,
    mu_max: usize,
    basis_degree: usize,
) -> Result<IntertwineReport> {
    let n = l.dim();
    let mut report = IntertwineReport::default();
    for alpha in crate::jet_algebra::MultiIndex::up_to_degree(n, basis_degree) {
        for b in 0..l.rank() {
            let psi = JetPoly::monomial(
                n,
                alpha.clone(),
                Coeff::basis_vector(l.rank(), b),
                Degree::Full,
            );
            report.merge(intertwine_check(l, a, mu_max, &psi)?);
        }
    }
    Ok(report)
}

/// Per-order outcome of the generating-series check.
#[derive(Clone, Debug)]
pub struct SeriesCheckEntry {
    pub order: usize,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Result of [`generating_series_check`].
#[derive(Clone, Debug, Default)]
pub struct SeriesLinkReport {
    pub entries: Vec<SeriesCheckEntry>,
}

impl SeriesLinkReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }
}

/// Verifies, order by order in `z`, the generating identity relating the
/// value of `e^{-zL}` at the origin to the heat coefficient series: the
/// polynomial attached to `z^r` on the left,
///
/// ```text
///   (-1)^r / r! * (value of L^r)#
/// ```
///
/// must equal the `z^r` entry of `e^{z|x|^2} (2z)^N (e^{-zD} a(z))`, where
/// `N` scales a degree-s piece by `s` and shifts it to `z^(r+s)` with a
/// factor `2^s`. Checking to order R needs `a` known for `k <= R` and exact
/// through degree `2R`.
pub fn generating_series_check(
    l: &DiffOp,
    a: &HeatJets,
    order: usize,
) -> Result<SeriesLinkReport> {
    if order > a.max_k() {
        return Err(Error::InvalidArgument(format!(
            "series check to order {order} needs coefficients up to k = {order}, have {}",
            a.max_k()
        )));
    }
    if (a.degree() as usize) < 2 * order {
        return Err(Error::InsufficientDegree {
            what: "heat coefficient jets",
            requested: Degree::UpTo(2 * order as i64),
            required: Degree::UpTo(2 * order as i64),
            available: Degree::at(a.degree()),
        });
    }
    let n = l.dim();
    let rank = l.rank();
    let ord = l.order();
    let flat = DiffOp::flat_laplacian(n, rank);

    // left side: (-1)^r / r! (value of L^r)#
    let mut lhs = Vec::with_capacity(order + 1);
    lhs.push(DiffOp::identity(n, rank).ev_sharp());
    let mut power = DiffOp::identity(n, rank);
    for r in 1..=order {
        power = l.compose(&power, Degree::at((ord * (order - r)) as u32))?;
        lhs.push(
            power
                .ev_sharp()
                .scale(&(Rat::neg_one_pow(r) / Rat::factorial(r))),
        );
    }

    // e^{-zD} a(z): entry q = sum_nu (-1)^nu/nu! Delta^nu a_{q-nu}
    let mut damped = Vec::with_capacity(order + 1);
    for q in 0..=order {
        let mut acc = JetPoly::zero(n, Role::Endo { rank }, Degree::at(a.degree()));
        for nu in 0..=q {
            let mut jet = a.get(q - nu).clone();
            for i in 1..=nu {
                jet = flat.apply(&jet, Degree::at(a.degree() - 2 * i as u32))?;
            }
            acc = acc.add(&jet.scale(&(Rat::neg_one_pow(nu) / Rat::factorial(nu))))?;
        }
        damped.push(acc);
    }

    // (2z)^N: the degree-d piece of entry q lands at z^(q+d) scaled by 2^d
    let mut shifted = Vec::with_capacity(order + 1);
    for r in 0..=order {
        let mut acc = JetPoly::zero(n, Role::Endo { rank }, Degree::Full);
        for d in 0..=r {
            let piece = damped[r - d].homogeneous_piece(d)?;
            acc = acc.add(&piece.scale(&Rat::from_int(2).pow(d as u32)))?;
        }
        shifted.push(acc);
    }

    // e^{z|x|^2}: entry r picks up |x|^(2 mu)/mu! from z^mu
    let mut report = SeriesLinkReport::default();
    for r in 0..=order {
        let mut rhs = JetPoly::zero(n, Role::Endo { rank }, Degree::Full);
        for mu in 0..=r {
            let weight = radial_power(n, mu, Degree::Full)
                .scale(&Rat::factorial(mu).recip().expect("factorial positive"));
            rhs = rhs.add(&weight.mul(&shifted[r - mu])?)?;
        }
        let passed = lhs[r] == rhs;
        let witness = if passed {
            None
        } else {
            Some(format!("z^{r}: lhs {} != rhs {}", lhs[r], rhs))
        };
        report.entries.push(SeriesCheckEntry {
            order: r,
            passed,
            witness,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet_algebra::MultiIndex;

    fn endo1(p: JetPoly) -> JetPoly {
        p.tensor(&Coeff::identity(1)).unwrap()
    }

    fn scalar_of(c: &Coeff) -> Rat {
        c.endo_entries().unwrap()[0].clone()
    }

    fn shifted_laplacian(n: usize, c: Rat) -> DiffOp {
        DiffOp::flat_laplacian(n, 1)
            .add(
                &DiffOp::constant(n, JetPoly::identity(n, 1, Degree::Full).scale(&c)).unwrap(),
            )
            .unwrap()
    }

    fn oscillator() -> DiffOp {
        DiffOp::flat_laplacian(1, 1)
            .add(&DiffOp::multiplication(&radial_power(1, 1, Degree::Full), 1).unwrap())
            .unwrap()
    }

    #[test]
    fn difference_series_flat_vanishes() {
        let flat = DiffOp::flat_laplacian(2, 1);
        let d = difference_operator(&flat, 4, Degree::Full).unwrap();
        assert_eq!(d.entry(0), &DiffOp::identity(2, 1));
        for r in 1..=4 {
            assert!(d.entry(r).is_zero(), "entry {r} should vanish");
        }
    }

    #[test]
    fn difference_series_constant_shift() {
        // L = Delta + c: the series is e^{-zc}, entry r = (-c)^r/r! id
        let c = Rat::new(5, 2);
        let l = shifted_laplacian(1, c.clone());
        let d = difference_operator(&l, 4, Degree::Full).unwrap();
        for r in 0..=4 {
            let expected = DiffOp::constant(
                1,
                JetPoly::identity(1, 1, Degree::Full)
                    .scale(&((-&c).pow(r as u32) / Rat::factorial(r))),
            )
            .unwrap();
            assert_eq!(d.entry(r), &expected, "entry {r}");
        }
    }

    #[test]
    fn difference_series_first_step() {
        // L = Delta + x1 d1 + F: D_1 = Delta - L = -x1 d1 - F
        let f = endo1(JetPoly::variable(1, 0, Degree::Full)).scale(&Rat::from_int(7));
        let b = endo1(JetPoly::variable(1, 0, Degree::Full));
        let l = DiffOp::flat_laplacian(1, 1)
            .add(
                &DiffOp::from_terms(1, 1, [(MultiIndex::new(vec![1]), b.clone())]).unwrap(),
            )
            .unwrap()
            .add(&DiffOp::constant(1, f.clone()).unwrap())
            .unwrap();
        let d = difference_operator(&l, 1, Degree::Full).unwrap();
        let expected = DiffOp::from_terms(1, 1, [(MultiIndex::new(vec![1]), b.neg())])
            .unwrap()
            .add(&DiffOp::constant(1, f.neg()).unwrap())
            .unwrap();
        assert_eq!(d.entry(1), &expected);
    }

    #[test]
    fn table_flat_is_delta() {
        let flat = DiffOp::flat_laplacian(2, 1);
        let d = difference_operator(&flat, 4, Degree::Full).unwrap();
        let table = ev_sharp_table(&d).unwrap();
        assert_eq!(table.piece(0, 0), JetPoly::identity(2, 1, Degree::Full));
        for r in 1..=4 {
            for s in 0..=r {
                assert!(table.piece(r, s).is_zero());
            }
        }
    }

    #[test]
    fn table_constant_shift() {
        let c = Rat::new(-3, 2);
        let l = shifted_laplacian(2, c.clone());
        let d = difference_operator(&l, 4, Degree::Full).unwrap();
        let table = ev_sharp_table(&d).unwrap();
        for r in 0..=4 {
            let expected = JetPoly::identity(2, 1, Degree::Full)
                .scale(&((-&c).pow(r as u32) / Rat::factorial(r)));
            assert_eq!(table.piece(r, 0), expected);
            for s in 1..=r {
                assert!(table.piece(r, s).is_zero());
            }
        }
    }

    #[test]
    fn table_first_order_term_pieces() {
        // L = Delta + x1 d1 + F: the z^1 value is ev(-x1 d1 - F)# = -F(0),
        // so piece (1,1) vanishes and piece (1,0) is -F(0).
        let f = JetPoly::identity(1, 1, Degree::Full).scale(&Rat::from_int(7));
        let b = endo1(JetPoly::variable(1, 0, Degree::Full));
        let l = DiffOp::flat_laplacian(1, 1)
            .add(&DiffOp::from_terms(1, 1, [(MultiIndex::new(vec![1]), b)]).unwrap())
            .unwrap()
            .add(&DiffOp::constant(1, f.clone()).unwrap())
            .unwrap();
        let d = difference_operator(&l, 1, Degree::Full).unwrap();
        let table = ev_sharp_table(&d).unwrap();
        assert!(table.piece(1, 1).is_zero());
        assert_eq!(table.piece(1, 0), f.neg());
    }

    #[test]
    fn powers_table_matches_recursion() {
        // flat: the alternating sum telescopes to the delta table
        let flat = DiffOp::flat_laplacian(2, 1);
        let t = ev_sharp_from_powers(&flat, 4).unwrap();
        assert_eq!(t.piece(0, 0), JetPoly::identity(2, 1, Degree::Full));
        for r in 1..=4 {
            for s in 0..=r {
                assert!(t.piece(r, s).is_zero(), "piece ({r},{s})");
            }
        }

        // Delta + c reproduces (-c)^r/r! at s = 0
        let c = Rat::new(2, 3);
        let l = shifted_laplacian(1, c.clone());
        let t = ev_sharp_from_powers(&l, 4).unwrap();
        for r in 0..=4 {
            assert_eq!(
                t.piece(r, 0),
                JetPoly::identity(1, 1, Degree::Full)
                    .scale(&((-&c).pow(r as u32) / Rat::factorial(r)))
            );
        }

        // a genuinely nonflat operator: both routes agree entrywise
        let l = oscillator();
        let d = difference_operator(&l, 6, Degree::at(0)).unwrap();
        let rec = ev_sharp_table(&d).unwrap();
        let pow = ev_sharp_from_powers(&l, 6).unwrap();
        for r in 0..=6 {
            for s in 0..=r {
                assert_eq!(rec.piece(r, s), pow.piece(r, s), "piece ({r},{s})");
            }
        }
    }

    #[test]
    fn heat_jets_flat_and_shift() {
        let flat = DiffOp::flat_laplacian(2, 1);
        let a = heat_jets(&flat, 3, 4).unwrap();
        assert_eq!(a.get(0), &JetPoly::identity(2, 1, Degree::at(4)));
        for k in 1..=3 {
            assert!(a.get(k).is_zero());
        }

        let c = Rat::from_int(1);
        let l = shifted_laplacian(2, c.clone());
        let a = heat_jets(&l, 4, 2).unwrap();
        for k in 0..=4 {
            let expected = JetPoly::identity(2, 1, Degree::at(2))
                .scale(&((-&c).pow(k as u32) / Rat::factorial(k)));
            assert_eq!(a.get(k), &expected, "a_{k}");
        }
    }

    #[test]
    fn heat_jets_oscillator_diagonal() {
        // L = Delta + x^2 in n=1: the constant terms follow the series
        // (2t / sinh 2t)^(1/2) = 1 - t^2/3 + t^4/10 - ...
        let a = heat_jets(&oscillator(), 4, 0).unwrap();
        let got: Vec<Rat> = (0..=4)
            .map(|k| scalar_of(&a.get(k).value_at_origin()))
            .collect();
        assert_eq!(
            got,
            vec![
                Rat::one(),
                Rat::zero(),
                Rat::new(-1, 3),
                Rat::zero(),
                Rat::new(1, 10)
            ]
        );
    }

    #[test]
    fn polterovich_examples() {
        // k = 0, r = 0: the value of psi at the origin
        let l = shifted_laplacian(2, Rat::from_int(4));
        let psi = endo1(JetPoly::one(2, Degree::Full))
            .add(&endo1(JetPoly::variable(2, 1, Degree::Full)))
            .unwrap();
        let v = polterovich_value(&l, 0, 0, &psi).unwrap();
        assert_eq!(scalar_of(&v), Rat::one());

        // L = Delta + c, k = 2, psi = 1: c^2/2
        let c = Rat::new(7, 3);
        let l = shifted_laplacian(1, c.clone());
        let one = endo1(JetPoly::one(1, Degree::Full));
        for r in 2..=4 {
            let v = polterovich_value(&l, 2, r, &one).unwrap();
            assert_eq!(scalar_of(&v), &(&c * &c) / &Rat::from_int(2), "r = {r}");
        }
        assert!(polterovich_value(&l, 2, 1, &one).is_err());
    }

    #[test]
    fn intertwining_basic_cases() {
        // flat: both sides are (-1)^mu/mu! [Delta^mu psi](0)
        let flat = DiffOp::flat_laplacian(2, 1);
        let a = heat_jets(&flat, 3, 6).unwrap();
        let psi = endo1(radial_power(2, 2, Degree::Full));
        let report = intertwine_check(&flat, &a, 3, &psi).unwrap();
        assert!(report.passed(), "{:?}", report.failures);

        // Delta + c with psi = 1 at mu = 2: both sides c^2/2
        let c = Rat::from_int(2);
        let l = shifted_laplacian(1, c);
        let a = heat_jets(&l, 2, 4).unwrap();
        let one = endo1(JetPoly::one(1, Degree::Full));
        let report = intertwine_check(&l, &a, 2, &one).unwrap();
        assert!(report.passed(), "{:?}", report.failures);

        // and over a small monomial basis
        let report = intertwine_check_basis(&l, &a, 2, 4).unwrap();
        assert!(report.passed());
        assert!(report.checked > 0);
    }

    #[test]
    fn radial_moment_cases() {
        // k=1, l=0: the factor is (-4)(-n/2) = 2n
        for n in 1..=3 {
            let psi = JetPoly::identity(n, 1, Degree::Full).scale(&Rat::from_int(5));
            let v = radial_moment_rhs(n, 1, 0, &psi).unwrap();
            assert_eq!(scalar_of(&v), Rat::from_int(2 * n as i64 * 5));
        }

        // k=0: reduces to (-1)^l/l! [Delta^l psi](0)
        let psi = endo1(radial_power(2, 1, Degree::Full));
        let v = radial_moment_rhs(2, 0, 1, &psi).unwrap();
        let flat = DiffOp::flat_laplacian(2, 1);
        let direct = iterated_value(&flat, &psi, 1).unwrap().scale(&-Rat::one());
        assert_eq!(v, direct);

        // both sides of the identity for psi = |x|^(2l)
        for (n, k, l) in [(1, 1, 1), (2, 2, 1), (3, 1, 2)] {
            let psi = endo1(radial_power(n, l, Degree::Full));
            let rhs = radial_moment_rhs(n, k, l, &psi).unwrap();
            let weighted = radial_power(n, k, Degree::Full)
                .scale(&Rat::factorial(k).recip().unwrap())
                .mul(&psi)
                .unwrap();
            let flat = DiffOp::flat_laplacian(n, 1);
            let lhs = iterated_value(&flat, &weighted, k + l)
                .unwrap()
                .scale(&(Rat::neg_one_pow(k + l) / Rat::factorial(k + l)));
            assert_eq!(lhs, rhs, "n={n} k={k} l={l}");
        }
    }

    #[test]
    fn generating_series_simple_cases() {
        // flat: z^0 entry is 1 = 1, higher orders telescope
        let flat = DiffOp::flat_laplacian(2, 1);
        let a = heat_jets(&flat, 2, 4).unwrap();
        let report = generating_series_check(&flat, &a, 2).unwrap();
        assert!(report.passed(), "{:?}", report.entries);

        // Delta + c carries the common factor e^{-zc}
        let l = shifted_laplacian(1, Rat::new(-1, 2));
        let a = heat_jets(&l, 2, 4).unwrap();
        let report = generating_series_check(&l, &a, 2).unwrap();
        assert!(report.passed(), "{:?}", report.entries);

        // degree bookkeeping: order 2 needs jets of degree 4
        let a = heat_jets(&l, 2, 3).unwrap();
        assert!(generating_series_check(&l, &a, 2).is_err());
    }

    #[test]
    fn corrupted_coefficient_breaks_intertwining() {
        let l = oscillator();
        let a = heat_jets(&l, 3, 6).unwrap();
        assert!(intertwine_check_basis(&l, &a, 3, 6).unwrap().passed());

        // poke a_2 at the monomial x1^2
        let bad = a.get(2).add(&endo1(JetPoly::monomial(
            1,
            MultiIndex::new(vec![2]),
            Coeff::scalar(Rat::new(1, 9)),
            Degree::at(6),
        )))
        .unwrap();
        let corrupted = a.with_coefficient(2, bad).unwrap();
        let report = intertwine_check_basis(&l, &corrupted, 3, 6).unwrap();
        assert!(!report.passed());
        assert!(!report.failures.is_empty());
    }
}
