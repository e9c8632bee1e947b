//! Coefficient values carried by jets: scalars, fiber vectors, and fiber
//! endomorphisms. Roles are tagged at runtime so that a vector value can
//! never silently stand in for an endomorphism.

use std::fmt;

use crate::error::{Error, Result};

use super::Rat;

/// What a coefficient is: a scalar, a vector in the rank-m fiber, or an
/// m-by-m endomorphism of the fiber.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Role {
    Scalar,
    Vector { rank: usize },
    Endo { rank: usize },
}

impl Role {
    pub fn rank(&self) -> Option<usize> {
        match self {
            Role::Scalar => None,
            Role::Vector { rank } | Role::Endo { rank } => Some(*rank),
        }
    }

    /// The role of a product `left * right`, if the pairing is defined.
    /// Scalars pair with everything; endomorphisms act on vectors and
    /// compose with endomorphisms.
    pub fn product(left: Role, right: Role) -> Result<Role> {
        use Role::*;
        match (left, right) {
            (Scalar, r) | (r, Scalar) => Ok(r),
            (Endo { rank: a }, Vector { rank: b }) if a == b => Ok(Vector { rank: b }),
            (Endo { rank: a }, Endo { rank: b }) if a == b => Ok(Endo { rank: a }),
            (l, r) => Err(Error::RolePairing { left: l, right: r }),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Scalar => write!(f, "scalar"),
            Role::Vector { rank } => write!(f, "vector(m={rank})"),
            Role::Endo { rank } => write!(f, "endo(m={rank})"),
        }
    }
}

/// A single coefficient value. Endomorphism entries are stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub enum Coeff {
    Scalar(Rat),
    Vector(Vec<Rat>),
    Endo { rank: usize, entries: Vec<Rat> },
}

impl Coeff {
    pub fn zero(role: Role) -> Coeff {
        match role {
            Role::Scalar => Coeff::Scalar(Rat::zero()),
            Role::Vector { rank } => Coeff::Vector(vec![Rat::zero(); rank]),
            Role::Endo { rank } => Coeff::Endo {
                rank,
                entries: vec![Rat::zero(); rank * rank],
            },
        }
    }

    pub fn scalar(v: Rat) -> Coeff {
        Coeff::Scalar(v)
    }

    pub fn identity(rank: usize) -> Coeff {
        let mut entries = vec![Rat::zero(); rank * rank];
        for i in 0..rank {
            entries[i * rank + i] = Rat::one();
        }
        Coeff::Endo { rank, entries }
    }

    /// `v * id` as an endomorphism.
    pub fn scalar_endo(rank: usize, v: &Rat) -> Coeff {
        let mut entries = vec![Rat::zero(); rank * rank];
        for i in 0..rank {
            entries[i * rank + i] = v.clone();
        }
        Coeff::Endo { rank, entries }
    }

    pub fn basis_vector(rank: usize, i: usize) -> Coeff {
        let mut v = vec![Rat::zero(); rank];
        v[i] = Rat::one();
        Coeff::Vector(v)
    }

    pub fn role(&self) -> Role {
        match self {
            Coeff::Scalar(_) => Role::Scalar,
            Coeff::Vector(v) => Role::Vector { rank: v.len() },
            Coeff::Endo { rank, .. } => Role::Endo { rank: *rank },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Scalar(v) => v.is_zero(),
            Coeff::Vector(v) => v.iter().all(Rat::is_zero),
            Coeff::Endo { entries, .. } => entries.iter().all(Rat::is_zero),
        }
    }

    pub fn add(&self, other: &Coeff) -> Result<Coeff> {
        match (self, other) {
            (Coeff::Scalar(a), Coeff::Scalar(b)) => Ok(Coeff::Scalar(a + b)),
            (Coeff::Vector(a), Coeff::Vector(b)) if a.len() == b.len() => {
                Ok(Coeff::Vector(a.iter().zip(b).map(|(x, y)| x + y).collect()))
            }
            (
                Coeff::Endo { rank: ra, entries: a },
                Coeff::Endo { rank: rb, entries: b },
            ) if ra == rb => Ok(Coeff::Endo {
                rank: *ra,
                entries: a.iter().zip(b).map(|(x, y)| x + y).collect(),
            }),
            _ => Err(Error::RoleMismatch {
                expected: self.role(),
                found: other.role(),
            }),
        }
    }

    pub fn neg(&self) -> Coeff {
        self.map(|v| -v)
    }

    pub fn scale(&self, s: &Rat) -> Coeff {
        self.map(|v| v * s)
    }

    fn map(&self, f: impl Fn(&Rat) -> Rat) -> Coeff {
        match self {
            Coeff::Scalar(v) => Coeff::Scalar(f(v)),
            Coeff::Vector(v) => Coeff::Vector(v.iter().map(f).collect()),
            Coeff::Endo { rank, entries } => Coeff::Endo {
                rank: *rank,
                entries: entries.iter().map(f).collect(),
            },
        }
    }

    /// Product in the pairings allowed by [`Role::product`]. Endomorphism
    /// products do not commute; the order is `self * other`.
    pub fn mul(&self, other: &Coeff) -> Result<Coeff> {
        Role::product(self.role(), other.role())?;
        Ok(match (self, other) {
            (Coeff::Scalar(a), b) => b.scale(a),
            (a, Coeff::Scalar(b)) => a.scale(b),
            (Coeff::Endo { rank, entries }, Coeff::Vector(v)) => {
                let m = *rank;
                let mut out = vec![Rat::zero(); m];
                for i in 0..m {
                    for j in 0..m {
                        if !entries[i * m + j].is_zero() && !v[j].is_zero() {
                            out[i] += &entries[i * m + j] * &v[j];
                        }
                    }
                }
                Coeff::Vector(out)
            }
            (
                Coeff::Endo { rank, entries: a },
                Coeff::Endo { entries: b, .. },
            ) => {
                let m = *rank;
                let mut out = vec![Rat::zero(); m * m];
                for i in 0..m {
                    for k in 0..m {
                        if a[i * m + k].is_zero() {
                            continue;
                        }
                        for j in 0..m {
                            if !b[k * m + j].is_zero() {
                                out[i * m + j] += &a[i * m + k] * &b[k * m + j];
                            }
                        }
                    }
                }
                Coeff::Endo { rank: m, entries: out }
            }
            _ => unreachable!("pairing already validated"),
        })
    }

    /// The underlying scalar; errors for vector/endo values.
    pub fn as_scalar(&self) -> Result<&Rat> {
        match self {
            Coeff::Scalar(v) => Ok(v),
            other => Err(Error::RoleMismatch {
                expected: Role::Scalar,
                found: other.role(),
            }),
        }
    }

    pub fn endo_entries(&self) -> Result<&[Rat]> {
        match self {
            Coeff::Endo { entries, .. } => Ok(entries),
            other => Err(Error::RoleMismatch {
                expected: Role::Endo { rank: 0 },
                found: other.role(),
            }),
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Scalar(v) => write!(f, "{v}"),
            Coeff::Vector(v) => {
                write!(f, "[")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
            Coeff::Endo { rank, entries } => {
                write!(f, "[")?;
                for i in 0..*rank {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    for j in 0..*rank {
                        if j > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{}", entries[i * rank + j])?;
                    }
                }
                write!(f, "]")
            }
        }
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endo_products_do_not_commute() {
        let a = Coeff::Endo {
            rank: 2,
            entries: vec![
                Rat::zero(),
                Rat::one(),
                Rat::zero(),
                Rat::zero(),
            ],
        };
        let b = Coeff::Endo {
            rank: 2,
            entries: vec![
                Rat::zero(),
                Rat::zero(),
                Rat::one(),
                Rat::zero(),
            ],
        };
        let ab = a.mul(&b).unwrap();
        let ba = b.mul(&a).unwrap();
        assert_ne!(ab, ba);
    }

    #[test]
    fn undefined_pairings_error() {
        let v = Coeff::basis_vector(2, 0);
        assert!(v.mul(&v).is_err());
        let e = Coeff::identity(2);
        assert!(v.mul(&e).is_err());
        assert!(e.mul(&v).is_ok());
    }

    #[test]
    fn scalar_acts_on_everything() {
        let s = Coeff::Scalar(Rat::from_int(3));
        let v = Coeff::basis_vector(2, 1);
        assert_eq!(
            s.mul(&v).unwrap(),
            Coeff::Vector(vec![Rat::zero(), Rat::from_int(3)])
        );
        let e = Coeff::identity(2);
        assert_eq!(s.mul(&e).unwrap(), Coeff::scalar_endo(2, &Rat::from_int(3)));
    }
}
