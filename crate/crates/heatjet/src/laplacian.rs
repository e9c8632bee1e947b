//! Geometric input: metric jets in normal coordinates, gauge validation,
//! the square-root-determinant jet, and assembly of generalized Laplacians.

use std::fmt;

use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::heatcoeff::HeatJets;
use crate::jet_algebra::{Coeff, Degree, JetPoly, MultiIndex, Rat, Role};

/// Jets of a symmetric metric `g_ij` at the origin, exact through degree
/// `jdeg`. Construction checks shape only; the normal-coordinate conditions
/// are diagnosed by [`validate_normal_gauge`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MetricJets {
    n: usize,
    jdeg: u32,
    entries: Vec<JetPoly>,
}

impl MetricJets {
    pub fn new(n: usize, jdeg: u32, entries: Vec<JetPoly>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "metric needs {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        for e in &entries {
            if e.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: e.dim(),
                });
            }
            if e.role() != Role::Scalar {
                return Err(Error::RoleMismatch {
                    expected: Role::Scalar,
                    found: e.role(),
                });
            }
            if e.degree() < Degree::at(jdeg) {
                return Err(Error::InsufficientDegree {
                    what: "metric entry",
                    requested: Degree::at(jdeg),
                    required: Degree::at(jdeg),
                    available: e.degree(),
                });
            }
        }
        Ok(MetricJets { n, jdeg, entries })
    }

    /// The flat metric `g_ij = delta_ij`.
    pub fn flat(n: usize, jdeg: u32) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    entries.push(JetPoly::one(n, Degree::Full));
                } else {
                    entries.push(JetPoly::zero(n, Role::Scalar, Degree::Full));
                }
            }
        }
        MetricJets::new(n, jdeg, entries).expect("flat metric is well formed")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.jdeg
    }

    pub fn entry(&self, i: usize, j: usize) -> &JetPoly {
        &self.entries[i * self.n + j]
    }

    fn is_identity_at_origin(&self) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.entry(i, j).value_at_origin();
                let expected = if i == j { Rat::one() } else { Rat::zero() };
                match v.as_scalar() {
                    Ok(s) if *s == expected => {}
                    _ => return false,
                }
            }
        }
        true
    }
}

/// Outcome of the normal-coordinate checks, listing every violating monomial.
#[derive(Clone, Debug, Default)]
pub struct GaugeReport {
    /// (i, j, monomial) where `g_ij - g_ji` has a nonzero coefficient.
    pub symmetry: Vec<(usize, usize, MultiIndex)>,
    /// (i, j) where `g_ij(0) != delta_ij`.
    pub origin: Vec<(usize, usize)>,
    /// (i, monomial) where `sum_j g_ij x_j - x_i` has a nonzero coefficient.
    pub radial: Vec<(usize, MultiIndex)>,
}

impl GaugeReport {
    pub fn is_valid(&self) -> bool {
        self.symmetry.is_empty() && self.origin.is_empty() && self.radial.is_empty()
    }
}

impl fmt::Display for GaugeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "metric jets satisfy the normal-coordinate gauge");
        }
        for (i, j, m) in &self.symmetry {
            writeln!(f, "symmetry: g_{}{} - g_{}{} nonzero at {}", i + 1, j + 1, j + 1, i + 1, m)?;
        }
        for (i, j) in &self.origin {
            writeln!(f, "origin: g_{}{}(0) != delta", i + 1, j + 1)?;
        }
        for (i, m) in &self.radial {
            writeln!(f, "radial gauge: sum_j g_{}j x_j - x_{} nonzero at {}", i + 1, i + 1, m)?;
        }
        Ok(())
    }
}

/// Checks the three normal-coordinate conditions: symmetry, identity value at
/// the origin, and the radial contraction `sum_j g_ij(x) x_j = x_i` through
/// degree `jdeg + 1`.
pub fn validate_normal_gauge(g: &MetricJets) -> GaugeReport {
    let n = g.dim();
    let mut report = GaugeReport::default();
    for i in 0..n {
        for j in (i + 1)..n {
            if let Ok(diff) = g.entry(i, j).sub(g.entry(j, i)) {
                for (alpha, _) in diff.terms() {
                    report.symmetry.push((i, j, alpha.clone()));
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { Rat::one() } else { Rat::zero() };
            match g.entry(i, j).value_at_origin().as_scalar() {
                Ok(s) if *s == expected => {}
                _ => report.origin.push((i, j)),
            }
        }
    }
    let check_deg = Degree::at(g.degree() + 1);
    for i in 0..n {
        let mut contracted = JetPoly::zero(n, Role::Scalar, check_deg);
        for j in 0..n {
            let xj = JetPoly::variable(n, j, Degree::Full);
            // multiplying by x_j raises exactness by one, so the contraction
            // is exact through jdeg + 1
            let term = g.entry(i, j).mul(&xj).expect("scalar product");
            contracted = contracted.add(&term).expect("scalar sum");
        }
        let diff = contracted
            .sub(&JetPoly::variable(n, i, Degree::Full))
            .expect("scalar difference");
        for (alpha, _) in diff.terms() {
            report.radial.push((i, alpha.clone()));
        }
    }
    report
}

fn require_identity_at_origin(g: &MetricJets) -> Result<()> {
    if g.is_identity_at_origin() {
        Ok(())
    } else {
        Err(Error::MetricNotIdentityAtOrigin)
    }
}

fn mat_mul(n: usize, a: &[JetPoly], b: &[JetPoly], target: Degree) -> Result<Vec<JetPoly>> {
    let role = a[0].role();
    let dim = a[0].dim();
    let mut out = vec![JetPoly::zero(dim, role, target); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = JetPoly::zero(dim, role, target);
            for k in 0..n {
                let p = a[i * n + k].mul_truncated(&b[k * n + j], target)?;
                acc = acc.add(&p)?;
            }
            out[i * n + j] = acc;
        }
    }
    Ok(out)
}

/// Jets of the inverse metric `g^ij` through degree `jdeg`, by the geometric
/// series in `h = g - I` (which has no constant term).
pub fn inverse_metric_jets(g: &MetricJets) -> Result<Vec<JetPoly>> {
    require_identity_at_origin(g)?;
    let n = g.dim();
    let target = Degree::at(g.degree());
    let one = JetPoly::one(n, Degree::Full);
    // h = g - I, truncated to the working degree
    let mut h = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut e = g.entry(i, j).clone();
            if i == j {
                e = e.sub(&one)?;
            }
            h.push(e.truncated(target.min(e.degree()))?);
        }
    }
    let mut acc: Vec<JetPoly> = (0..n * n)
        .map(|idx| {
            if idx % (n + 1) == 0 {
                JetPoly::one(n, target)
            } else {
                JetPoly::zero(n, Role::Scalar, target)
            }
        })
        .collect();
    let mut power: Vec<JetPoly> = acc.clone();
    for _ in 1..=g.degree() {
        power = mat_mul(n, &power, &h, target)?;
        let mut done = true;
        for idx in 0..n * n {
            power[idx] = power[idx].neg();
            if !power[idx].is_zero() {
                done = false;
            }
            acc[idx] = acc[idx].add(&power[idx])?;
        }
        if done {
            break;
        }
    }
    Ok(acc)
}

/// Determinant of the metric jets through degree `target`, by Laplace
/// expansion along the first row.
fn det_jets(n: usize, entries: &[JetPoly], target: Degree) -> Result<JetPoly> {
    let dim = entries[0].dim();
    if n == 1 {
        return entries[0].truncated(target.min(entries[0].degree()));
    }
    let mut acc = JetPoly::zero(dim, Role::Scalar, target);
    for col in 0..n {
        // minor obtained by deleting row 0 and column `col`
        let mut minor = Vec::with_capacity((n - 1) * (n - 1));
        for i in 1..n {
            for j in 0..n {
                if j != col {
                    minor.push(entries[i * n + j].clone());
                }
            }
        }
        let sub = det_jets(n - 1, &minor, target)?;
        let term = entries[col].mul_truncated(&sub, target)?;
        if col % 2 == 0 {
            acc = acc.add(&term)?;
        } else {
            acc = acc.sub(&term)?;
        }
    }
    Ok(acc)
}

/// `1 / p` as a jet through `target`, for `p` with `p(0) = 1`.
pub(crate) fn reciprocal_jet(p: &JetPoly, target: Degree) -> Result<JetPoly> {
    let n = p.dim();
    let one = JetPoly::one(n, Degree::Full);
    let v = p.sub(&one)?;
    let v = v.truncated(target.min(v.degree()))?;
    if !matches!(v.value_at_origin().as_scalar(), Ok(s) if s.is_zero()) {
        return Err(Error::InvalidArgument(
            "reciprocal jet needs constant term 1".into(),
        ));
    }
    let steps = match target {
        Degree::UpTo(d) if d >= 0 => d as usize,
        _ => {
            return Err(Error::InvalidArgument(
                "reciprocal jet needs a finite nonnegative target degree".into(),
            ))
        }
    };
    let mut acc = JetPoly::one(n, target);
    let mut power = JetPoly::one(n, target);
    for _ in 1..=steps {
        power = power.mul_truncated(&v, target)?.neg();
        if power.is_zero() {
            break;
        }
        acc = acc.add(&power)?;
    }
    Ok(acc)
}

/// Jets of `sqrt(det g)` through degree `jdeg`: the determinant by cofactor
/// expansion, then the binomial series for `sqrt(1 + u)`.
pub fn sqrt_det_jets(g: &MetricJets) -> Result<JetPoly> {
    require_identity_at_origin(g)?;
    let n = g.dim();
    let target = Degree::at(g.degree());
    let det = det_jets(n, &g.entries, target)?;
    let u = det.sub(&JetPoly::one(n, Degree::Full))?;
    let mut acc = JetPoly::one(n, target);
    let mut power = JetPoly::one(n, target);
    let half = Rat::new(1, 2);
    for k in 1..=g.degree() as usize {
        power = power.mul_truncated(&u, target)?;
        if power.is_zero() {
            break;
        }
        let c = crate::jet_algebra::rational_binomial(&half, k as u32);
        acc = acc.add(&power.scale(&c))?;
    }
    Ok(acc)
}

/// The metric Laplacian `psi |-> -(1/sqrt(det g)) sum_ij d_i (sqrt(det g)
/// g^ij d_j psi)`, tensored with the identity of a rank-m fiber. Coefficients
/// come out exact through `jdeg - 1`.
pub fn laplace_beltrami(g: &MetricJets, rank: usize) -> Result<DiffOp> {
    let report = validate_normal_gauge(g);
    if !report.is_valid() {
        return Err(Error::GaugeInvalid(report.to_string()));
    }
    if g.degree() < 1 {
        return Err(Error::InsufficientDegree {
            what: "metric jets",
            requested: Degree::at(1),
            required: Degree::at(1),
            available: Degree::at(g.degree()),
        });
    }
    let n = g.dim();
    let target = Degree::at(g.degree());
    let first_target = Degree::at(g.degree() - 1);
    let ginv = inverse_metric_jets(g)?;
    let sq = sqrt_det_jets(g)?;
    let sq_inv = reciprocal_jet(&sq, target)?;
    let id = Coeff::identity(rank);

    let mut op = DiffOp::zero(n, rank);
    // second order: -g^ij d_i d_j; mixed indices collect both orderings
    for i in 0..n {
        for j in i..n {
            let mut c = ginv[i * n + j].neg();
            if i != j {
                c = c.scale(&Rat::from_int(2));
            }
            let alpha = MultiIndex::unit(n, i).add(&MultiIndex::unit(n, j));
            op = op.add(&DiffOp::from_terms(n, rank, [(alpha, c.tensor(&id)?)])?)?;
        }
    }
    // first order: -(1/sqrt(det g)) sum_i d_i(sqrt(det g) g^ij) for each d_j
    for j in 0..n {
        let mut c = JetPoly::zero(n, Role::Scalar, first_target);
        for i in 0..n {
            let prod = sq.mul_truncated(&ginv[i * n + j], target)?;
            c = c.add(&prod.derivative(i))?;
        }
        let c = sq_inv.mul_truncated(&c, first_target)?.neg();
        // zero-valued coefficients still lower the operator's vanishing bound
        let term = DiffOp::from_terms(n, rank, [(MultiIndex::unit(n, j), c.tensor(&id)?)])?;
        op = op.add(&term)?;
    }
    Ok(op)
}

/// The data of a generalized Laplacian: metric jets, an optional first-order
/// term `sum_i b^i d_i`, and an optional potential `F`.
#[derive(Clone, Debug)]
pub struct LaplacianSpec {
    metric: MetricJets,
    rank: usize,
    first_order: Vec<JetPoly>,
    potential: JetPoly,
}

impl LaplacianSpec {
    pub fn new(
        metric: MetricJets,
        rank: usize,
        first_order: Option<Vec<JetPoly>>,
        potential: Option<JetPoly>,
    ) -> Result<Self> {
        let n = metric.dim();
        if rank == 0 {
            return Err(Error::InvalidArgument("rank must be at least 1".into()));
        }
        let endo = Role::Endo { rank };
        let first_order = first_order.unwrap_or_else(|| {
            vec![JetPoly::zero(n, endo, Degree::Full); n]
        });
        if first_order.len() != n {
            return Err(Error::InvalidArgument(format!(
                "first-order term needs {} components, got {}",
                n,
                first_order.len()
            )));
        }
        let potential =
            potential.unwrap_or_else(|| JetPoly::zero(n, endo, Degree::Full));
        for p in first_order.iter().chain([&potential]) {
            if p.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.dim(),
                });
            }
            if p.role() != endo {
                return Err(Error::RoleMismatch {
                    expected: endo,
                    found: p.role(),
                });
            }
        }
        Ok(LaplacianSpec {
            metric,
            rank,
            first_order,
            potential,
        })
    }

    pub fn metric(&self) -> &MetricJets {
        &self.metric
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// Assembles the generalized Laplacian `laplace_beltrami(g) + sum_i b^i d_i + F`.
/// The second-order part is a scalar multiple of the identity by construction.
pub fn generalized_laplacian(spec: &LaplacianSpec) -> Result<DiffOp> {
    let n = spec.metric.dim();
    let mut op = laplace_beltrami(&spec.metric, spec.rank)?;
    for (i, b) in spec.first_order.iter().enumerate() {
        let term = DiffOp::from_terms(n, spec.rank, [(MultiIndex::unit(n, i), b.clone())])?;
        op = op.add(&term)?;
    }
    let f = DiffOp::from_terms(n, spec.rank, [(MultiIndex::zero(n), spec.potential.clone())])?;
    op.add(&f)
}

/// Divides each heat coefficient jet by the Jacobian jet `sqrt(det g)`,
/// producing the unnormalized coefficients.
pub fn hat_coefficients(a: &HeatJets, g: &MetricJets) -> Result<HeatJets> {
    if a.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: g.dim(),
        });
    }
    let target = Degree::at(a.degree());
    if Degree::at(g.degree()) < target {
        return Err(Error::InsufficientDegree {
            what: "Jacobian jet",
            requested: target,
            required: target,
            available: Degree::at(g.degree()),
        });
    }
    let sq = sqrt_det_jets(g)?;
    let sq_inv = reciprocal_jet(&sq, target)?;
    let coeffs = a
        .coefficients()
        .iter()
        .map(|c| c.mul_truncated(&sq_inv, target))
        .collect::<Result<Vec<_>>>()?;
    HeatJets::new(a.dim(), a.rank(), a.degree(), coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(n: usize, terms: &[(&[u32], Rat)]) -> JetPoly {
        JetPoly::from_terms(
            n,
            Role::Scalar,
            Degree::Full,
            terms
                .iter()
                .map(|(e, c)| (MultiIndex::new(e.to_vec()), Coeff::scalar(c.clone()))),
        )
        .unwrap()
    }

    /// The polynomial metric `I + (x2^2, -x1 x2; -x1 x2, x1^2)`, which
    /// satisfies the radial gauge exactly.
    fn curved_metric(jdeg: u32) -> MetricJets {
        let g11 = poly(2, &[(&[0, 0], Rat::one()), (&[0, 2], Rat::one())]);
        let g12 = poly(2, &[(&[1, 1], -Rat::one())]);
        let g22 = poly(2, &[(&[0, 0], Rat::one()), (&[2, 0], Rat::one())]);
        MetricJets::new(2, jdeg, vec![g11, g12.clone(), g12, g22]).unwrap()
    }

    #[test]
    fn gauge_validation_cases() {
        assert!(validate_normal_gauge(&MetricJets::flat(2, 4)).is_valid());
        assert!(validate_normal_gauge(&curved_metric(6)).is_valid());

        // n=1: g11 = 1 + x1 fails the radial contraction
        let g = MetricJets::new(1, 3, vec![poly(1, &[(&[0], Rat::one()), (&[1], Rat::one())])])
            .unwrap();
        let report = validate_normal_gauge(&g);
        assert!(!report.is_valid());
        assert!(!report.radial.is_empty());
        assert!(report.symmetry.is_empty());
    }

    #[test]
    fn inverse_metric_cases() {
        // flat stays flat
        let flat = MetricJets::flat(2, 4);
        let inv = inverse_metric_jets(&flat).unwrap();
        assert_eq!(inv[0], JetPoly::one(2, Degree::at(4)));
        assert!(inv[1].is_zero());

        // n=1, g11 = 1 + x1^2 at degree 4: inverse is 1 - x1^2 + x1^4
        let g = MetricJets::new(1, 4, vec![poly(1, &[(&[0], Rat::one()), (&[2], Rat::one())])])
            .unwrap();
        let inv = inverse_metric_jets(&g).unwrap();
        let expected = poly(
            1,
            &[
                (&[0], Rat::one()),
                (&[2], -Rat::one()),
                (&[4], Rat::one()),
            ],
        )
        .truncated(Degree::at(4))
        .unwrap();
        assert_eq!(inv[0], expected);

        // inverse really inverts: g * g^{-1} = I through the working degree
        let g = curved_metric(6);
        let inv = inverse_metric_jets(&g).unwrap();
        let entries: Vec<JetPoly> = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| g.entry(i, j).truncated(Degree::at(6)).unwrap())
            .collect();
        let prod = mat_mul(2, &entries, &inv, Degree::at(6)).unwrap();
        assert_eq!(prod[0], JetPoly::one(2, Degree::at(6)));
        assert!(prod[1].is_zero() && prod[2].is_zero());
        assert_eq!(prod[3], JetPoly::one(2, Degree::at(6)));
    }

    #[test]
    fn sqrt_det_cases() {
        // flat: 1
        assert_eq!(
            sqrt_det_jets(&MetricJets::flat(3, 5)).unwrap(),
            JetPoly::one(3, Degree::at(5))
        );

        // n=1, g11 = 1 + x1^2 at degree 4: 1 + x1^2/2 - x1^4/8
        let g = MetricJets::new(1, 4, vec![poly(1, &[(&[0], Rat::one()), (&[2], Rat::one())])])
            .unwrap();
        let expected = poly(
            1,
            &[
                (&[0], Rat::one()),
                (&[2], Rat::new(1, 2)),
                (&[4], Rat::new(-1, 8)),
            ],
        )
        .truncated(Degree::at(4))
        .unwrap();
        assert_eq!(sqrt_det_jets(&g).unwrap(), expected);

        // square of the square root recovers the determinant
        let g = curved_metric(6);
        let sq = sqrt_det_jets(&g).unwrap();
        let det = det_jets(2, &g.entries, Degree::at(6)).unwrap();
        assert_eq!(sq.mul_truncated(&sq, Degree::at(6)).unwrap(), det);

        // diagonal metric: determinant is the product of the diagonal
        let g = MetricJets::new(
            2,
            4,
            vec![
                poly(2, &[(&[0, 0], Rat::one()), (&[2, 0], Rat::new(1, 3))]),
                JetPoly::zero(2, Role::Scalar, Degree::Full),
                JetPoly::zero(2, Role::Scalar, Degree::Full),
                poly(2, &[(&[0, 0], Rat::one()), (&[0, 2], Rat::new(-1, 5))]),
            ],
        )
        .unwrap();
        let det = det_jets(2, &g.entries, Degree::at(4)).unwrap();
        let prod = g
            .entry(0, 0)
            .mul_truncated(g.entry(1, 1), Degree::at(4))
            .unwrap();
        assert_eq!(det, prod);
    }

    #[test]
    fn laplace_beltrami_flat_is_flat() {
        let lb = laplace_beltrami(&MetricJets::flat(2, 5), 1).unwrap();
        let flat = DiffOp::flat_laplacian(2, 1);
        // same coefficients, exactness capped by the metric truncation
        assert_eq!(lb.order(), 2);
        for (alpha, c) in flat.terms() {
            let got = lb.coefficient(alpha);
            assert_eq!(got.truncated(Degree::at(4)).unwrap(), c.truncated(Degree::at(4)).unwrap());
        }
        assert_eq!(lb.coefficient(&MultiIndex::new(vec![1, 0])).value_at_origin(), Coeff::zero(Role::Endo { rank: 1 }));

        // n=1 in normal coordinates is necessarily flat
        let lb1 = laplace_beltrami(&MetricJets::flat(1, 3), 1).unwrap();
        assert_eq!(
            lb1.coefficient(&MultiIndex::new(vec![2]))
                .value_at_origin(),
            Coeff::scalar_endo(1, &-Rat::one())
        );
    }

    #[test]
    fn laplace_beltrami_principal_symbol() {
        let g = curved_metric(8);
        let lb = laplace_beltrami(&g, 2).unwrap();
        let ginv = inverse_metric_jets(&g).unwrap();
        // coefficient at e_i + e_j is -g^ij (doubled off-diagonal) times id
        let c11 = lb.coefficient(&MultiIndex::new(vec![2, 0]));
        assert_eq!(
            c11,
            ginv[0].neg().tensor(&Coeff::identity(2)).unwrap()
        );
        let c12 = lb.coefficient(&MultiIndex::new(vec![1, 1]));
        assert_eq!(
            c12,
            ginv[1]
                .neg()
                .scale(&Rat::from_int(2))
                .tensor(&Coeff::identity(2))
                .unwrap()
        );
        assert!(laplace_beltrami(
            &MetricJets::new(1, 3, vec![poly(1, &[(&[0], Rat::one()), (&[1], Rat::one())])])
                .unwrap(),
            1
        )
        .is_err());
    }

    #[test]
    fn generalized_laplacian_assembly() {
        // flat metric, F = c id: Delta + c
        let spec = LaplacianSpec::new(
            MetricJets::flat(2, 4),
            1,
            None,
            Some(JetPoly::identity(2, 1, Degree::Full).scale(&Rat::from_int(3))),
        )
        .unwrap();
        let op = generalized_laplacian(&spec).unwrap();
        assert_eq!(
            op.coefficient(&MultiIndex::zero(2)).value_at_origin(),
            Coeff::scalar_endo(1, &Rat::from_int(3))
        );
        assert_eq!(op.order(), 2);

        // flat metric, b^1 = x1 id in n=1: -d^2 + x1 d1
        let b = JetPoly::variable(1, 0, Degree::Full)
            .tensor(&Coeff::identity(1))
            .unwrap();
        let spec = LaplacianSpec::new(MetricJets::flat(1, 4), 1, Some(vec![b.clone()]), None)
            .unwrap();
        let op = generalized_laplacian(&spec).unwrap();
        // exactness is capped at jdeg - 1 by the metric part of the operator
        assert_eq!(
            op.coefficient(&MultiIndex::new(vec![1])),
            b.truncated(Degree::at(3)).unwrap()
        );

        // second-order coefficients are scalar multiples of the identity
        let g = curved_metric(6);
        let spec = LaplacianSpec::new(g, 2, None, None).unwrap();
        let op = generalized_laplacian(&spec).unwrap();
        for (alpha, c) in op.terms() {
            if alpha.degree() == 2 {
                for (_, v) in c.terms() {
                    let entries = v.endo_entries().unwrap();
                    assert_eq!(entries[1], Rat::zero());
                    assert_eq!(entries[2], Rat::zero());
                    assert_eq!(entries[0], entries[3]);
                }
            }
        }
    }

    #[test]
    fn reciprocal_jets_invert() {
        let p = poly(
            1,
            &[
                (&[0], Rat::one()),
                (&[1], Rat::new(2, 3)),
                (&[3], Rat::new(-1, 7)),
            ],
        );
        let r = reciprocal_jet(&p, Degree::at(6)).unwrap();
        assert_eq!(
            p.mul_truncated(&r, Degree::at(6)).unwrap(),
            JetPoly::one(1, Degree::at(6))
        );
    }
}
