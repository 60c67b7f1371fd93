//! Classification of countable successor-ordinal spaces up to homeomorphism.
//!
//! An ordinal `a` written in Cantor normal form determines the compact
//! scattered space of ordinals below `a` (order topology). Two such spaces
//! are homeomorphic exactly when they share a [`ScatteredType`], a tuple of
//! Cantor-Bendixson data. Every nonzero type also has a canonical class
//! decomposition into a compact part `V(mu).n` and a non-compact tail
//! `U(rho)`, and a least representative ordinal, [`canonical_g`].
//!
//! Types form a commutative monoid under topological sum, implemented by
//! [`ScatteredType::add`].

use std::collections::BTreeMap;
use std::fmt;

use crate::ordinal::Ordinal;
use crate::posys::{ExtendedPoSystem, PoSystem};

/// Homeomorphism type of a scattered space of ordinals.
///
/// `Full { mu, rho, n }` denotes the type whose derived series stabilises at
/// the successor step `mu + 1`; it is displayed `(mu+1, rho, n)`. `Limit(mu)`
/// is the type `(mu, mu)` of `w^mu`, and `Empty` the type `(0, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ScatteredType {
    Empty,
    Limit(Ordinal),
    Full { mu: Ordinal, rho: Ordinal, n: u64 },
}

/// Class decomposition `V(mu).n (+) U(rho)`: `compact` carries the compact
/// summand with its multiplicity, `open` the non-compact tail. Either part
/// may be absent; both absent means the empty space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceClass {
    pub compact: Option<(Ordinal, u64)>,
    pub open: Option<Ordinal>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceTypeError {
    #[error("a limit type needs a positive level")]
    ZeroLimitLevel,
    #[error("a full type needs rho <= mu")]
    RhoAboveMu,
    #[error("a full type needs a positive multiplicity")]
    ZeroMultiplicity,
    #[error("the empty space has no partial-order presentation")]
    EmptySpace,
}

impl ScatteredType {
    pub fn limit(mu: Ordinal) -> Result<ScatteredType, SpaceTypeError> {
        if mu.is_zero() {
            Err(SpaceTypeError::ZeroLimitLevel)
        } else {
            Ok(ScatteredType::Limit(mu))
        }
    }

    pub fn full(mu: Ordinal, rho: Ordinal, n: u64) -> Result<ScatteredType, SpaceTypeError> {
        if rho > mu {
            Err(SpaceTypeError::RhoAboveMu)
        } else if n == 0 {
            Err(SpaceTypeError::ZeroMultiplicity)
        } else {
            Ok(ScatteredType::Full { mu, rho, n })
        }
    }

    /// Number of derivative steps after which the space is empty.
    pub fn nu(&self) -> Ordinal {
        match self {
            ScatteredType::Empty => Ordinal::zero(),
            ScatteredType::Limit(mu) => mu.clone(),
            ScatteredType::Full { mu, .. } => mu.succ(),
        }
    }

    /// Least level whose derivative layer has compact closure.
    pub fn rho(&self) -> Ordinal {
        match self {
            ScatteredType::Empty => Ordinal::zero(),
            ScatteredType::Limit(mu) => mu.clone(),
            ScatteredType::Full { rho, .. } => rho.clone(),
        }
    }

    /// Size of the final nonempty derivative, when finite.
    pub fn n(&self) -> Option<u64> {
        match self {
            ScatteredType::Full { n, .. } => Some(*n),
            _ => None,
        }
    }

    /// Monoid addition: the type of a disjoint union of two spaces of the
    /// given types. Commutative and associative; `Empty` is the identity.
    pub fn add(&self, other: &ScatteredType) -> ScatteredType {
        use ScatteredType::*;
        match (self, other) {
            (Empty, t) | (t, Empty) => t.clone(),
            (Limit(a), Limit(b)) => Limit(a.max(b).clone()),
            (
                Full { mu: m1, rho: r1, n: n1 },
                Full { mu: m2, rho: r2, n: n2 },
            ) => {
                let rho = r1.max(r2).clone();
                match m1.cmp(m2) {
                    std::cmp::Ordering::Equal => Full { mu: m1.clone(), rho, n: n1 + n2 },
                    std::cmp::Ordering::Less => Full { mu: m2.clone(), rho, n: *n2 },
                    std::cmp::Ordering::Greater => Full { mu: m1.clone(), rho, n: *n1 },
                }
            }
            (Full { mu, rho, n }, Limit(l)) | (Limit(l), Full { mu, rho, n }) => {
                if mu >= l {
                    Full {
                        mu: mu.clone(),
                        rho: rho.max(l).clone(),
                        n: *n,
                    }
                } else {
                    Limit(l.clone())
                }
            }
        }
    }
}

impl fmt::Display for ScatteredType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScatteredType::Empty => write!(f, "(0,0)"),
            ScatteredType::Limit(mu) => write!(f, "({mu},{mu})"),
            ScatteredType::Full { mu, rho, n } => write!(f, "({},{rho},{n})", mu.succ()),
        }
    }
}

impl fmt::Display for SpaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.compact, &self.open) {
            (None, None) => write!(f, "empty"),
            (Some((mu, n)), None) => write!(f, "V({mu}).{n}"),
            (None, Some(rho)) => write!(f, "U({rho})"),
            (Some((mu, n)), Some(rho)) => write!(f, "V({mu}).{n} (+) U({rho})"),
        }
    }
}

/// Class decomposition of the space of ordinals below `a`.
///
/// A single-term `w^mu` contributes only the tail `U(mu)`: splitting off a
/// compact summand of multiplicity 0 is suppressed.
pub fn classify(a: &Ordinal) -> SpaceClass {
    let terms = a.terms();
    let Some((mu1, n1)) = terms.first() else {
        return SpaceClass { compact: None, open: None };
    };
    let (muk, _) = terms.last().unwrap();
    if terms.len() == 1 {
        if mu1.is_zero() {
            return SpaceClass { compact: Some((Ordinal::zero(), *n1)), open: None };
        }
        // w^mu * n: one copy forms the tail, the rest the compact part.
        let compact = (*n1 > 1).then(|| (mu1.clone(), n1 - 1));
        return SpaceClass { compact, open: Some(mu1.clone()) };
    }
    let open = (!muk.is_zero()).then(|| muk.clone());
    SpaceClass { compact: Some((mu1.clone(), *n1)), open }
}

/// Least ordinal whose space is homeomorphic to the space below `a`.
pub fn canonical_g(a: &Ordinal) -> Ordinal {
    let terms = a.terms();
    let Some((mu1, n1)) = terms.first() else {
        return Ordinal::zero();
    };
    if terms.len() == 1 {
        return a.clone();
    }
    let (muk, _) = terms.last().unwrap();
    let head = Ordinal::omega_pow_times(mu1.clone(), *n1);
    if muk.is_zero() {
        head.add(&Ordinal::one())
    } else {
        head.add(&Ordinal::omega_pow(muk.clone()))
    }
}

/// Homeomorphism type of the space of ordinals below `a`.
pub fn type_of(a: &Ordinal) -> ScatteredType {
    let terms = a.terms();
    let Some((mu1, n1)) = terms.first() else {
        return ScatteredType::Empty;
    };
    let (muk, nk) = terms.last().unwrap();
    if terms.len() == 1 {
        if mu1.is_zero() {
            return ScatteredType::Full { mu: Ordinal::zero(), rho: Ordinal::zero(), n: *n1 };
        }
        if *nk == 1 {
            return ScatteredType::Limit(mu1.clone());
        }
        return ScatteredType::Full { mu: mu1.clone(), rho: mu1.clone(), n: n1 - 1 };
    }
    ScatteredType::Full { mu: mu1.clone(), rho: muk.clone(), n: *n1 }
}

/// Whether the spaces below `a` and `b` are homeomorphic.
pub fn homeomorphic_ord(a: &Ordinal, b: &Ordinal) -> bool {
    type_of(a) == type_of(b)
}

/// Least ordinal of the given type; `canonical_g` of any representative.
pub fn ordinal_of_type(t: &ScatteredType) -> Ordinal {
    match t {
        ScatteredType::Empty => Ordinal::zero(),
        ScatteredType::Limit(mu) => Ordinal::omega_pow(mu.clone()),
        ScatteredType::Full { mu, rho, n } => {
            if mu.is_zero() {
                Ordinal::from_nat(*n)
            } else if rho == mu {
                Ordinal::omega_pow_times(mu.clone(), n + 1)
            } else {
                let head = Ordinal::omega_pow_times(mu.clone(), *n);
                if rho.is_zero() {
                    head.add(&Ordinal::one())
                } else {
                    head.add(&Ordinal::omega_pow(rho.clone()))
                }
            }
        }
    }
}

/// Normal form of the `xi`-th derivative of the space below `a`, as an
/// ordinal: terms `w^(mu-xi)*n` for every term `w^mu*n` of `a` with
/// `mu >= xi`.
///
/// This is the closed left-quotient form; iterating the one-step case
/// composes exactly. At the boundary `a = w^mu`, `xi = mu` it reports the
/// one-point compactified count 1 rather than 0.
pub fn derivative_type(a: &Ordinal, xi: &Ordinal) -> Ordinal {
    Ordinal::from_terms(a.terms().iter().filter_map(|(e, c)| {
        e.left_subtract(xi).ok().map(|e2| (e2, *c))
    }))
}

/// Presentation of a nonempty scattered type as a linearly ordered system:
/// levels `nu-1 > ... > 1 > 0` under reversed ordinal order, a lower subset
/// `L` of levels with compact layers, and the top-layer multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScatteredPartition {
    pub nu: Ordinal,
    /// `L` is the interval of levels `>= rho` (empty when `rho = nu`).
    pub rho: Ordinal,
    /// Multiplicity assignment `f(mu) = n` on the single minimal level.
    pub f: Option<(Ordinal, u64)>,
    /// Materialised system when `nu` is finite.
    pub finite: Option<ExtendedPoSystem>,
}

/// Chain-of-levels presentation of a nonempty scattered type.
pub fn scattered_type_to_extended_po(
    t: &ScatteredType,
) -> Result<ScatteredPartition, SpaceTypeError> {
    if *t == ScatteredType::Empty {
        return Err(SpaceTypeError::EmptySpace);
    }
    let nu = t.nu();
    let rho = t.rho();
    let f = t.n().map(|n| {
        let mu = nu.pred().expect("a type with finite multiplicity has successor nu");
        (mu, n)
    });
    let finite = nu.as_nat().map(|v| {
        let v = v as usize;
        let names: Vec<String> = (0..v).map(|i| i.to_string()).collect();
        let mut lt = Vec::new();
        for i in 0..v {
            for j in 0..i {
                // level i lies below level j when i > j as ordinals
                lt.push((names[i].clone(), names[j].clone()));
            }
        }
        let base = PoSystem::new(names.clone(), lt).expect("level chain is a valid order");
        let lower: std::collections::BTreeSet<String> = (0..v)
            .filter(|i| Ordinal::from_nat(*i as u64) >= rho)
            .map(|i| i.to_string())
            .collect();
        let f_map: BTreeMap<String, u64> = f
            .iter()
            .map(|(mu, n)| (mu.to_string(), *n))
            .collect();
        ExtendedPoSystem::new(base, lower, f_map)
            .expect("level-chain extension is valid by construction")
    });
    Ok(ScatteredPartition { nu, rho, f, finite })
}
