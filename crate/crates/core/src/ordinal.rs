//! Cantor normal form arithmetic for countable ordinals below ε₀.
//!
//! An [`Ordinal`] is a finite sum `w^e1*c1 + ... + w^ek*ck` with strictly
//! decreasing exponents (themselves ordinals) and coefficients >= 1; the
//! empty sum is 0. This representation is closed under comparison, addition
//! and left subtraction, which is all the rest of the crate needs: there is
//! deliberately no general multiplication, only the `w^e * c` constructor.
//!
//! Textual grammar (whitespace-insensitive):
//!
//! ```text
//! ord  := "0" | term ("+" term)*
//! term := nat | "w" ["^" "(" ord ")" | "^" nat] ["*" nat]
//! ```
//!
//! Formatting is deterministic: coefficient 1 and exponent 1 are omitted
//! (`w`, `w^2*3`), and an exponent is parenthesised exactly when it is
//! compound or exceeds 9 (`w^(w)*2`, `w^(12)`).

use std::fmt;
use std::str::FromStr;

use crate::parse::{ParseError, Scanner};

/// An ordinal below ε₀ in Cantor normal form.
///
/// Values are immutable; all operations return fresh ordinals. The derived
/// `Ord` implementation coincides with the ordinal order because the term
/// list is kept canonical.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordinal {
    /// `(exponent, coefficient)` pairs, exponents strictly decreasing,
    /// coefficients >= 1.
    terms: Vec<(Ordinal, u64)>,
}

/// Successor/limit classification. 0 is classified separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrdinalKind {
    Zero,
    Successor,
    Limit,
}

/// Domain errors for ordinal arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrdinalError {
    /// The derived-series rank of 0 is undefined.
    #[error("the zero ordinal has no Cantor-Bendixson rank")]
    ZeroOrdinal,
    /// `a.left_subtract(b)` requires `b <= a`.
    #[error("left subtraction underflow: subtrahend exceeds the ordinal")]
    Underflow,
}

impl Ordinal {
    pub fn zero() -> Ordinal {
        Ordinal { terms: Vec::new() }
    }

    pub fn from_nat(n: u64) -> Ordinal {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![(Ordinal::zero(), n)],
            }
        }
    }

    pub fn one() -> Ordinal {
        Ordinal::from_nat(1)
    }

    pub fn omega() -> Ordinal {
        Ordinal::omega_pow(Ordinal::one())
    }

    /// `w^exp`.
    pub fn omega_pow(exp: Ordinal) -> Ordinal {
        Ordinal::omega_pow_times(exp, 1)
    }

    /// `w^exp * coeff`; returns 0 when `coeff == 0`.
    pub fn omega_pow_times(exp: Ordinal, coeff: u64) -> Ordinal {
        if coeff == 0 {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![(exp, coeff)],
            }
        }
    }

    /// Ordinal sum of `w^e*c` pieces given in any order.
    pub fn from_terms(terms: impl IntoIterator<Item = (Ordinal, u64)>) -> Ordinal {
        let mut acc = Ordinal::zero();
        for (e, c) in terms {
            acc = acc.add(&Ordinal::omega_pow_times(e, c));
        }
        acc
    }

    pub fn terms(&self) -> &[(Ordinal, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a natural number, if the ordinal is finite.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    pub fn kind(&self) -> OrdinalKind {
        match self.terms.last() {
            None => OrdinalKind::Zero,
            Some((e, _)) if e.is_zero() => OrdinalKind::Successor,
            Some(_) => OrdinalKind::Limit,
        }
    }

    pub fn is_successor(&self) -> bool {
        self.kind() == OrdinalKind::Successor
    }

    pub fn is_limit(&self) -> bool {
        self.kind() == OrdinalKind::Limit
    }

    /// Exponent of the final normal-form term: the largest `e` such that the
    /// ordinal is a multiple of `w^e`. Undefined for 0.
    pub fn cb_rank(&self) -> Result<&Ordinal, OrdinalError> {
        self.terms
            .last()
            .map(|(e, _)| e)
            .ok_or(OrdinalError::ZeroOrdinal)
    }

    /// Ordinal addition. Terms of `self` below the leading exponent of
    /// `other` are absorbed.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some((lead, _)) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(Ordinal, u64)> = self
            .terms
            .iter()
            .take_while(|(e, _)| e > lead)
            .cloned()
            .collect();
        let mut rest = other.terms.clone();
        if let Some((e, c)) = self.terms.get(terms.len()) {
            if e == lead {
                rest[0].1 += c;
            }
        }
        terms.extend(rest);
        Ordinal { terms }
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    /// Predecessor of a successor ordinal; `None` for 0 and limits.
    pub fn pred(&self) -> Option<Ordinal> {
        match self.kind() {
            OrdinalKind::Successor => {
                let mut terms = self.terms.clone();
                let last = terms.last_mut().unwrap();
                if last.1 > 1 {
                    last.1 -= 1;
                } else {
                    terms.pop();
                }
                Some(Ordinal { terms })
            }
            _ => None,
        }
    }

    /// The unique `c` with `b + c = self`, where `b <= self`.
    pub fn left_subtract(&self, b: &Ordinal) -> Result<Ordinal, OrdinalError> {
        for i in 0..b.terms.len() {
            let Some((ea, ca)) = self.terms.get(i) else {
                // b extends an equal prefix of self, so b > self.
                return Err(OrdinalError::Underflow);
            };
            let (eb, cb) = &b.terms[i];
            if ea == eb && ca == cb {
                continue;
            }
            // First differing term decides the order.
            if eb > ea || (eb == ea && cb > ca) {
                return Err(OrdinalError::Underflow);
            }
            if eb < ea {
                return Ok(Ordinal {
                    terms: self.terms[i..].to_vec(),
                });
            }
            // Same exponent, cb < ca: split the coefficient.
            let mut terms = vec![(ea.clone(), ca - cb)];
            terms.extend_from_slice(&self.terms[i + 1..]);
            return Ok(Ordinal { terms });
        }
        Ok(Ordinal {
            terms: self.terms[b.terms.len()..].to_vec(),
        })
    }

    pub fn max<'a>(&'a self, other: &'a Ordinal) -> &'a Ordinal {
        if self >= other {
            self
        } else {
            other
        }
    }

    fn fmt_term(f: &mut fmt::Formatter<'_>, exp: &Ordinal, coeff: u64) -> fmt::Result {
        if exp.is_zero() {
            return write!(f, "{coeff}");
        }
        write!(f, "w")?;
        match exp.as_nat() {
            Some(1) => {}
            Some(n) if n <= 9 => write!(f, "^{n}")?,
            _ => write!(f, "^({exp})")?,
        }
        if coeff > 1 {
            write!(f, "*{coeff}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            Ordinal::fmt_term(f, e, *c)?;
        }
        Ok(())
    }
}

// Debug shows the grammar form; nested term lists are unreadable in test
// failure output.
impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub(crate) fn parse_ordinal(sc: &mut Scanner) -> Result<Ordinal, ParseError> {
    let mut acc = parse_term(sc)?;
    while sc.eat(b'+') {
        let t = parse_term(sc)?;
        acc = acc.add(&t);
    }
    Ok(acc)
}

fn parse_term(sc: &mut Scanner) -> Result<Ordinal, ParseError> {
    match sc.peek() {
        Some(b'w') => {
            sc.bump();
            let exp = if sc.eat(b'^') {
                if sc.eat(b'(') {
                    let e = parse_ordinal(sc)?;
                    sc.expect(b')')?;
                    e
                } else {
                    Ordinal::from_nat(sc.parse_nat()?)
                }
            } else {
                Ordinal::one()
            };
            let coeff = if sc.eat(b'*') { sc.parse_nat()? } else { 1 };
            Ok(Ordinal::omega_pow_times(exp, coeff))
        }
        Some(d) if d.is_ascii_digit() => Ok(Ordinal::from_nat(sc.parse_nat()?)),
        _ => Err(sc.error("expected an ordinal term")),
    }
}

impl FromStr for Ordinal {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut sc = Scanner::new(s);
        let o = parse_ordinal(&mut sc)?;
        sc.finish()?;
        Ok(o)
    }
}

/// Random ordinal with exponent nesting bounded by `depth` (nesting 0 means
/// a natural number). Intended for seeded test generators.
pub fn random_ordinal<R: rand::Rng + ?Sized>(rng: &mut R, depth: usize) -> Ordinal {
    if rng.gen_bool(0.12) {
        return Ordinal::zero();
    }
    let nterms = rng.gen_range(1..=3);
    let mut exps: Vec<Ordinal> = (0..nterms)
        .map(|_| {
            if depth == 0 || rng.gen_bool(0.6) {
                Ordinal::from_nat(rng.gen_range(0..=4))
            } else {
                random_ordinal(rng, depth - 1)
            }
        })
        .collect();
    exps.sort();
    exps.dedup();
    Ordinal {
        terms: exps
            .into_iter()
            .rev()
            .map(|e| (e, rng.gen_range(1..=9)))
            .collect(),
    }
}
