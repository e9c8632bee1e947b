//! Problem and result documents.
//!
//! Everything on disk is structured JSON with rationals as decimal-free
//! strings (`"p/q"` or `"p"`); there is no floating point anywhere in I/O.
//! Polynomials are lists of `{exponents, value}` terms; endomorphism values
//! are row-major arrays of rational strings. Output documents round-trip
//! losslessly and identical inputs produce byte-identical outputs.

use serde::{Deserialize, Serialize};

use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::heatcoeff::HeatJets;
use crate::jet_algebra::{Coeff, Degree, JetPoly, MultiIndex, Rat, Role};
use crate::laplacian::{generalized_laplacian, validate_normal_gauge, LaplacianSpec, MetricJets};

/// One term of a scalar polynomial: `value * x^exponents`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarTerm {
    pub exponents: Vec<u32>,
    pub value: Rat,
}

/// One term of an endomorphism-valued polynomial; `value` is the m-by-m
/// matrix row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndoTerm {
    pub exponents: Vec<u32>,
    pub value: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemOptions {
    #[serde(default)]
    pub reinstate_4pi: bool,
    #[serde(default)]
    pub verify_level: VerifyLevel,
    #[serde(default)]
    pub hat_coefficients: bool,
}

impl Default for ProblemOptions {
    fn default() -> Self {
        ProblemOptions {
            reinstate_4pi: false,
            verify_level: VerifyLevel::None,
            hat_coefficients: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    #[default]
    None,
    Fast,
    Full,
}

/// Expected heat jets shipped with a problem, to be verified instead of
/// trusted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureDoc {
    pub degree: u32,
    pub coefficients: Vec<Vec<EndoTerm>>,
}

/// A problem file: the geometry of one generalized Laplacian plus truncation
/// targets. `input_degree` declares through which total degree the given
/// jets are exact; omitting it declares them to be exact polynomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    pub dimension: usize,
    pub rank: usize,
    pub max_k: usize,
    pub max_degree: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_degree: Option<u32>,
    /// n x n matrix of scalar polynomials; omitted means the flat metric.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<Vec<ScalarTerm>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_order: Option<Vec<Vec<EndoTerm>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<EndoTerm>>,
    #[serde(default)]
    pub options: ProblemOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<FixtureDoc>,
}

/// Conservative degree requirements for one problem size. Computing `a_k`
/// exact through degree D for k <= K takes the difference series to order
/// `R = 2K + D`, operator coefficients through `D + 2R`, and input jets
/// through `D + 2R + 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeBounds {
    pub difference_order: usize,
    pub operator_coefficient_degree: u32,
    pub required_input_degree: u32,
    /// `None` means the inputs were declared exact polynomials.
    pub declared_input_degree: Option<u32>,
}

impl DegreeBounds {
    pub fn for_targets(max_k: usize, max_degree: u32, declared: Option<u32>) -> Self {
        let r = 2 * max_k + max_degree as usize;
        DegreeBounds {
            difference_order: r,
            operator_coefficient_degree: max_degree + 2 * r as u32,
            required_input_degree: max_degree + 2 * r as u32 + 2,
            declared_input_degree: declared,
        }
    }
}

/// A fully validated problem: parsed jets, assembled operator, and the
/// degree bookkeeping that justifies the targets.
#[derive(Clone, Debug)]
pub struct Problem {
    pub dimension: usize,
    pub rank: usize,
    pub max_k: usize,
    pub max_degree: u32,
    pub options: ProblemOptions,
    pub bounds: DegreeBounds,
    pub metric: MetricJets,
    pub operator: DiffOp,
    pub fixture: Option<HeatJets>,
}

fn scalar_poly_from_terms(n: usize, deg: Degree, terms: &[ScalarTerm]) -> Result<JetPoly> {
    for t in terms {
        if t.exponents.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: t.exponents.len(),
            });
        }
        let d: usize = t.exponents.iter().map(|&e| e as usize).sum();
        if !deg.admits(d) {
            return Err(Error::InvalidArgument(format!(
                "term of degree {d} exceeds the declared input degree"
            )));
        }
    }
    JetPoly::from_terms(
        n,
        Role::Scalar,
        deg,
        terms
            .iter()
            .map(|t| (MultiIndex::new(t.exponents.clone()), Coeff::scalar(t.value.clone()))),
    )
}

fn endo_poly_from_terms(n: usize, rank: usize, deg: Degree, terms: &[EndoTerm]) -> Result<JetPoly> {
    for t in terms {
        if t.exponents.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: t.exponents.len(),
            });
        }
        if t.value.len() != rank * rank {
            return Err(Error::InvalidArgument(format!(
                "endomorphism value needs {} entries (rank {rank}, row-major), got {}",
                rank * rank,
                t.value.len()
            )));
        }
        let d: usize = t.exponents.iter().map(|&e| e as usize).sum();
        if !deg.admits(d) {
            return Err(Error::InvalidArgument(format!(
                "term of degree {d} exceeds the declared input degree"
            )));
        }
    }
    JetPoly::from_terms(
        n,
        Role::Endo { rank },
        deg,
        terms.iter().map(|t| {
            (
                MultiIndex::new(t.exponents.clone()),
                Coeff::Endo {
                    rank,
                    entries: t.value.clone(),
                },
            )
        }),
    )
}

fn endo_poly_to_terms(p: &JetPoly) -> Vec<EndoTerm> {
    p.terms()
        .map(|(alpha, c)| EndoTerm {
            exponents: alpha.exponents().to_vec(),
            value: c.endo_entries().expect("endo-valued jet").to_vec(),
        })
        .collect()
}

impl ProblemDoc {
    pub fn parse(json: &str) -> std::result::Result<ProblemDoc, serde_json::Error> {
        serde_json::from_str(json)
    }

    /// Validates shapes, gauge, and degree sufficiency, and assembles the
    /// generalized Laplacian.
    pub fn load(&self) -> Result<Problem> {
        let n = self.dimension;
        let rank = self.rank;
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if rank == 0 {
            return Err(Error::InvalidArgument("rank must be at least 1".into()));
        }
        let bounds = DegreeBounds::for_targets(self.max_k, self.max_degree, self.input_degree);

        // degree gate: declared truncations must meet the conservative bound
        if let Some(j) = self.input_degree {
            if j < bounds.required_input_degree {
                return Err(Error::InsufficientDegree {
                    what: "input jets",
                    requested: Degree::at(self.max_degree),
                    required: Degree::at(bounds.required_input_degree),
                    available: Degree::at(j),
                });
            }
        }
        let input_deg = match self.input_degree {
            Some(j) => Degree::at(j),
            None => Degree::Full,
        };
        // working degree for the metric series
        let jdeg = self.input_degree.unwrap_or(bounds.required_input_degree);

        let metric = match &self.metric {
            None => MetricJets::flat(n, jdeg),
            Some(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidArgument(format!(
                        "metric must be an {n} x {n} matrix of polynomials"
                    )));
                }
                let mut entries = Vec::with_capacity(n * n);
                for row in rows {
                    for cell in row {
                        entries.push(scalar_poly_from_terms(n, input_deg, cell)?);
                    }
                }
                MetricJets::new(n, jdeg, entries)?
            }
        };
        let report = validate_normal_gauge(&metric);
        if !report.is_valid() {
            return Err(Error::GaugeInvalid(report.to_string()));
        }

        let first_order = match &self.first_order {
            None => None,
            Some(bs) => {
                if bs.len() != n {
                    return Err(Error::InvalidArgument(format!(
                        "first_order needs {n} components, got {}",
                        bs.len()
                    )));
                }
                Some(
                    bs.iter()
                        .map(|b| endo_poly_from_terms(n, rank, input_deg, b))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
        };
        let potential = match &self.potential {
            None => None,
            Some(f) => Some(endo_poly_from_terms(n, rank, input_deg, f)?),
        };

        let spec = LaplacianSpec::new(metric.clone(), rank, first_order, potential)?;
        let operator = generalized_laplacian(&spec)?;

        let fixture = match &self.fixture {
            None => None,
            Some(f) => {
                let coeffs = f
                    .coefficients
                    .iter()
                    .map(|c| endo_poly_from_terms(n, rank, Degree::at(f.degree), c))
                    .collect::<Result<Vec<_>>>()?;
                Some(HeatJets::new(n, rank, f.degree, coeffs)?)
            }
        };

        Ok(Problem {
            dimension: n,
            rank,
            max_k: self.max_k,
            max_degree: self.max_degree,
            options: self.options.clone(),
            bounds,
            metric,
            operator,
            fixture,
        })
    }
}

/// One heat coefficient in a result document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientDoc {
    pub k: usize,
    pub jet: Vec<EndoTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckDoc {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationDoc {
    pub level: VerifyLevel,
    pub passed: bool,
    pub checks: Vec<CheckDoc>,
}

/// The output document: heat coefficient jets as exact rationals per
/// monomial, optional Jacobian-divided coefficients, the verification
/// report, and provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDoc {
    pub version: String,
    pub input_sha256: String,
    pub dimension: usize,
    pub rank: usize,
    pub max_k: usize,
    pub max_degree: u32,
    pub bounds: DegreeBounds,
    /// When true, every reported coefficient carries the symbolic prefactor
    /// `(4 pi)^(-n/2)`; it is never folded into the rationals.
    pub four_pi_prefactor: bool,
    pub coefficients: Vec<CoefficientDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hat_coefficients: Option<Vec<CoefficientDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationDoc>,
}

impl ResultDoc {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result document serializes");
        s.push('\n');
        s
    }

    pub fn parse(json: &str) -> std::result::Result<ResultDoc, serde_json::Error> {
        serde_json::from_str(json)
    }
}

pub fn heat_jets_to_docs(a: &HeatJets) -> Vec<CoefficientDoc> {
    a.coefficients()
        .iter()
        .enumerate()
        .map(|(k, jet)| CoefficientDoc {
            k,
            jet: endo_poly_to_terms(jet),
        })
        .collect()
}

pub fn heat_jets_from_docs(
    n: usize,
    rank: usize,
    degree: u32,
    docs: &[CoefficientDoc],
) -> Result<HeatJets> {
    let coeffs = docs
        .iter()
        .map(|d| endo_poly_from_terms(n, rank, Degree::at(degree), &d.jet))
        .collect::<Result<Vec<_>>>()?;
    HeatJets::new(n, rank, degree, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_doc() -> ProblemDoc {
        ProblemDoc {
            dimension: 2,
            rank: 1,
            max_k: 2,
            max_degree: 2,
            input_degree: None,
            metric: None,
            first_order: None,
            potential: None,
            options: ProblemOptions::default(),
            fixture: None,
        }
    }

    #[test]
    fn parse_minimal_problem() {
        let json = r#"{"dimension": 1, "rank": 1, "max_k": 2, "max_degree": 0,
                       "potential": [{"exponents": [0], "value": ["1"]}]}"#;
        let doc = ProblemDoc::parse(json).unwrap();
        let problem = doc.load().unwrap();
        assert_eq!(problem.operator.order(), 2);
        assert_eq!(problem.bounds.difference_order, 4);
    }

    #[test]
    fn unknown_fields_rejected() {
        let json = r#"{"dimension": 1, "rank": 1, "max_k": 1, "max_degree": 0, "tpyo": 3}"#;
        assert!(ProblemDoc::parse(json).is_err());
    }

    #[test]
    fn degree_gate_enforced() {
        let mut doc = flat_doc();
        doc.input_degree = Some(4);
        let err = doc.load().unwrap_err();
        assert!(matches!(err, Error::InsufficientDegree { .. }));
        // required: max_degree + 2R + 2 with R = 2*2 + 2 = 6 -> 16
        doc.input_degree = Some(16);
        assert!(doc.load().is_ok());
    }

    #[test]
    fn gauge_failure_is_reported() {
        let mut doc = flat_doc();
        doc.dimension = 1;
        doc.input_degree = Some(16);
        doc.metric = Some(vec![vec![vec![
            ScalarTerm {
                exponents: vec![0],
                value: Rat::one(),
            },
            ScalarTerm {
                exponents: vec![1],
                value: Rat::one(),
            },
        ]]]);
        let err = doc.load().unwrap_err();
        assert!(matches!(err, Error::GaugeInvalid(_)), "{err:?}");
    }

    #[test]
    fn result_round_trip_is_identity() {
        let flat = crate::diffop::DiffOp::flat_laplacian(2, 1);
        let a = crate::heatcoeff::heat_jets(&flat, 2, 2).unwrap();
        let doc = ResultDoc {
            version: "test".into(),
            input_sha256: "abc".into(),
            dimension: 2,
            rank: 1,
            max_k: 2,
            max_degree: 2,
            bounds: DegreeBounds::for_targets(2, 2, None),
            four_pi_prefactor: false,
            coefficients: heat_jets_to_docs(&a),
            hat_coefficients: None,
            verification: Some(VerificationDoc {
                level: VerifyLevel::Fast,
                passed: true,
                checks: vec![CheckDoc {
                    name: "intertwining".into(),
                    passed: true,
                    detail: None,
                }],
            }),
        };
        let json = doc.to_json();
        let back = ResultDoc::parse(&json).unwrap();
        assert_eq!(doc, back);
        assert_eq!(back.to_json(), json);

        // and the jets themselves survive
        let restored = heat_jets_from_docs(2, 1, 2, &back.coefficients).unwrap();
        assert_eq!(restored, a);
    }
}
