//! Expressions denoting locally compact, metrisable Boolean spaces, and the
//! finite invariant tuple that decides homeomorphism between them.
//!
//! The language has four constructors: `ord(α)` is the interval `[0,α)` of
//! countable ordinals in the order topology, `cantor(a)` is a Cantor set
//! whose kernel rank function is constant at `a`, `+` is binary disjoint
//! union, and `omega*(e)` is the disjoint union of countably many copies of
//! `e`. Within this class the rank function of the perfect kernel is a step
//! function with finitely many values, so the kernel data collapses to a
//! [`RankProfile`]: the set of ranks attained on compactly many pieces and
//! the set attained non-compactly.
//!
//! [`SpaceExpr::invariants`] computes the full tuple (profile, height `nu`,
//! kernel rank bound `lambda`, compact rank `rho`, uniform compact rank
//! `rho_u`, top-layer multiplicity `n`); equality of tuples is a complete
//! homeomorphism test for the class. Candidate tuples can be checked for
//! realizability ([`InvariantTuple::validate`]) and realized back into
//! expressions ([`realize`]), and any expression splits into a strongly
//! uniform part plus a scattered part ([`SpaceExpr::decompose`]).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ordinal::{parse_ordinal, Ordinal};
use crate::ordspace::{ordinal_of_type, type_of, ScatteredType};
use crate::parse::{ParseError, Scanner};

/// Which space the kernel of an expression is homeomorphic to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// Scattered space: no perfect kernel at all.
    Empty,
    /// Compact kernel (a Cantor set).
    Compact,
    /// Non-compact kernel (Cantor set minus a point).
    NonCompact,
}

/// The kernel rank data of an expression: which rank values occur, split by
/// whether the level set of the value is compact (`fin`) or not (`inf`).
///
/// Normalization keeps the two sets disjoint - a value attained both ways is
/// recorded only in `inf`, since finitely many extra compact pieces do not
/// change the homeomorphism type of the union.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RankProfile {
    fin: BTreeSet<Ordinal>,
    inf: BTreeSet<Ordinal>,
}

impl RankProfile {
    pub fn new(
        fin: impl IntoIterator<Item = Ordinal>,
        inf: impl IntoIterator<Item = Ordinal>,
    ) -> RankProfile {
        let inf: BTreeSet<Ordinal> = inf.into_iter().collect();
        let fin = fin.into_iter().filter(|a| !inf.contains(a)).collect();
        RankProfile { fin, inf }
    }

    pub fn empty() -> RankProfile {
        RankProfile::default()
    }

    /// Rank values attained on only compactly many kernel pieces.
    pub fn fin(&self) -> &BTreeSet<Ordinal> {
        &self.fin
    }

    /// Rank values attained on non-compactly many kernel pieces.
    pub fn inf(&self) -> &BTreeSet<Ordinal> {
        &self.inf
    }

    pub fn is_empty(&self) -> bool {
        self.fin.is_empty() && self.inf.is_empty()
    }

    pub fn kernel_kind(&self) -> KernelKind {
        if !self.inf.is_empty() {
            KernelKind::NonCompact
        } else if !self.fin.is_empty() {
            KernelKind::Compact
        } else {
            KernelKind::Empty
        }
    }

    /// Largest rank value anywhere in the profile (`0` when empty).
    pub fn lambda(&self) -> Ordinal {
        let fin_max = self.fin.iter().next_back();
        let inf_max = self.inf.iter().next_back();
        fin_max.into_iter().chain(inf_max).max().cloned().unwrap_or_else(Ordinal::zero)
    }

    /// Least bound above which only compactly many pieces remain: the
    /// largest non-compactly attained value (`0` when none).
    pub fn rho_u(&self) -> Ordinal {
        self.inf.iter().next_back().cloned().unwrap_or_else(Ordinal::zero)
    }

    /// Profile of a disjoint union.
    pub fn union(&self, other: &RankProfile) -> RankProfile {
        RankProfile::new(
            self.fin.union(&other.fin).cloned().collect::<Vec<_>>(),
            self.inf.union(&other.inf).cloned().collect::<Vec<_>>(),
        )
    }

    /// Profile after repeating the space countably often: every value is
    /// now attained non-compactly.
    pub fn all_infinite(&self) -> RankProfile {
        RankProfile::new([], self.fin.union(&self.inf).cloned().collect::<Vec<_>>())
    }
}

#[derive(Serialize, Deserialize)]
struct ProfileWire {
    #[serde(default)]
    fin: Vec<String>,
    #[serde(default)]
    inf: Vec<String>,
}

impl Serialize for RankProfile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ProfileWire {
            fin: self.fin.iter().map(Ordinal::to_string).collect(),
            inf: self.inf.iter().map(Ordinal::to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RankProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = ProfileWire::deserialize(d)?;
        let parse = |v: Vec<String>| -> Result<Vec<Ordinal>, D::Error> {
            v.iter().map(|t| t.parse::<Ordinal>().map_err(D::Error::custom)).collect()
        };
        Ok(RankProfile::new(parse(wire.fin)?, parse(wire.inf)?))
    }
}

/// The complete homeomorphism invariant of an expression.
///
/// `lambda` and `rho_u` are determined by the profile; they are stored for
/// direct access and revalidated by [`InvariantTuple::validate`]. `n` is the
/// number of components of the top derivative layer when that is finite and
/// the kernel sits strictly below the top; `None` encodes "-inf".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantTuple {
    pub profile: RankProfile,
    pub nu: Ordinal,
    pub lambda: Ordinal,
    pub rho: Ordinal,
    pub rho_u: Ordinal,
    pub n: Option<u64>,
}

/// Why a candidate tuple cannot come from any space in the class.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TupleViolation {
    #[error("lambda is {found} but the profile maximum is {derived}")]
    LambdaMismatch { found: Ordinal, derived: Ordinal },
    #[error("rho_u is {found} but the profile's non-compact maximum is {derived}")]
    RhoUMismatch { found: Ordinal, derived: Ordinal },
    #[error("uniform compact rank {rho_u} exceeds compact rank {rho}")]
    UniformAboveCompact { rho_u: Ordinal, rho: Ordinal },
    #[error("max(rho, lambda) = {max} exceeds the height {nu}")]
    RankAboveHeight { max: Ordinal, nu: Ordinal },
    #[error("height {nu} must be a successor ordinal when max(rho, lambda) = {max} lies below it")]
    HeightNotSuccessor { nu: Ordinal, max: Ordinal },
    #[error("n must be -inf exactly when max(rho, lambda) = {max} equals the height {nu}")]
    MultiplicityMismatch { max: Ordinal, nu: Ordinal },
}

impl TupleViolation {
    /// Short clause tag used in CLI output.
    pub fn clause(&self) -> &'static str {
        match self {
            TupleViolation::LambdaMismatch { .. } => "lambda",
            TupleViolation::RhoUMismatch { .. } => "rho_u",
            TupleViolation::UniformAboveCompact { .. } => "i",
            TupleViolation::RankAboveHeight { .. } => "ii",
            TupleViolation::HeightNotSuccessor { .. } => "iii",
            TupleViolation::MultiplicityMismatch { .. } => "iv",
        }
    }
}

impl InvariantTuple {
    /// Tuple of the empty space.
    pub fn empty() -> InvariantTuple {
        InvariantTuple {
            profile: RankProfile::empty(),
            nu: Ordinal::zero(),
            lambda: Ordinal::zero(),
            rho: Ordinal::zero(),
            rho_u: Ordinal::zero(),
            n: None,
        }
    }

    /// Assemble a tuple from the free components; `lambda` and `rho_u` are
    /// derived from the profile.
    pub fn from_parts(
        profile: RankProfile,
        nu: Ordinal,
        rho: Ordinal,
        n: Option<u64>,
    ) -> InvariantTuple {
        let lambda = profile.lambda();
        let rho_u = profile.rho_u();
        InvariantTuple { profile, nu, lambda, rho, rho_u, n }
    }

    fn scattered(t: &ScatteredType) -> InvariantTuple {
        InvariantTuple::from_parts(RankProfile::empty(), t.nu(), t.rho(), t.n())
    }

    /// Check that the tuple is realized by some space in the class:
    /// (i) `rho_u <= rho`; (ii) `max(rho, lambda) <= nu`; (iii) `nu` is a
    /// successor whenever `max(rho, lambda) < nu`; (iv) `n` is `-inf`
    /// exactly when `max(rho, lambda) = nu`. The stored `lambda` and
    /// `rho_u` must also match the profile they are derived from.
    pub fn validate(&self) -> Result<(), TupleViolation> {
        let derived_lambda = self.profile.lambda();
        if self.lambda != derived_lambda {
            return Err(TupleViolation::LambdaMismatch {
                found: self.lambda.clone(),
                derived: derived_lambda,
            });
        }
        let derived_rho_u = self.profile.rho_u();
        if self.rho_u != derived_rho_u {
            return Err(TupleViolation::RhoUMismatch {
                found: self.rho_u.clone(),
                derived: derived_rho_u,
            });
        }
        if self.rho_u > self.rho {
            return Err(TupleViolation::UniformAboveCompact {
                rho_u: self.rho_u.clone(),
                rho: self.rho.clone(),
            });
        }
        let max = std::cmp::max(&self.rho, &self.lambda).clone();
        if max > self.nu {
            return Err(TupleViolation::RankAboveHeight { max, nu: self.nu.clone() });
        }
        if max < self.nu && !self.nu.is_successor() {
            return Err(TupleViolation::HeightNotSuccessor { nu: self.nu.clone(), max });
        }
        if (self.n.is_none()) != (max == self.nu) {
            return Err(TupleViolation::MultiplicityMismatch { max, nu: self.nu.clone() });
        }
        Ok(())
    }

    /// Strongly uniform means the kernel reaches the full height and the
    /// compact rank is already uniform: `nu = lambda` and `rho = rho_u`.
    pub fn is_strongly_uniform(&self) -> bool {
        self.nu == self.lambda && self.rho == self.rho_u
    }
}

impl fmt::Display for InvariantTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "nu={} lambda={} rho={} rho_u={} n=",
            self.nu, self.lambda, self.rho, self.rho_u
        )?;
        match self.n {
            Some(k) => write!(f, "{k}")?,
            None => write!(f, "-inf")?,
        }
        let list = |s: &BTreeSet<Ordinal>| {
            s.iter().map(Ordinal::to_string).collect::<Vec<_>>().join(",")
        };
        write!(f, " fin={{{}}} inf={{{}}}", list(&self.profile.fin), list(&self.profile.inf))
    }
}

impl Serialize for InvariantTuple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("InvariantTuple", 6)?;
        st.serialize_field("nu", &self.nu.to_string())?;
        st.serialize_field("lambda", &self.lambda.to_string())?;
        st.serialize_field("rho", &self.rho.to_string())?;
        st.serialize_field("rho_u", &self.rho_u.to_string())?;
        match self.n {
            Some(k) => st.serialize_field("n", &k)?,
            None => st.serialize_field("n", "-inf")?,
        }
        st.serialize_field("profile", &self.profile)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct TupleWire {
    nu: String,
    #[serde(default)]
    lambda: Option<String>,
    rho: String,
    #[serde(default)]
    rho_u: Option<String>,
    n: NWire,
    profile: RankProfile,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NWire {
    Finite(u64),
    Word(String),
}

impl<'de> Deserialize<'de> for InvariantTuple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = TupleWire::deserialize(d)?;
        let ord =
            |t: &str| -> Result<Ordinal, D::Error> { t.parse().map_err(D::Error::custom) };
        let nu = ord(&wire.nu)?;
        let rho = ord(&wire.rho)?;
        let lambda = match &wire.lambda {
            Some(t) => ord(t)?,
            None => wire.profile.lambda(),
        };
        let rho_u = match &wire.rho_u {
            Some(t) => ord(t)?,
            None => wire.profile.rho_u(),
        };
        let n = match wire.n {
            NWire::Finite(0) => {
                return Err(D::Error::custom("n must be a positive integer or \"-inf\""))
            }
            NWire::Finite(k) => Some(k),
            NWire::Word(w) if w == "-inf" => None,
            NWire::Word(w) => {
                return Err(D::Error::custom(format!(
                    "unrecognized n value {w:?}; expected a positive integer or \"-inf\""
                )))
            }
        };
        Ok(InvariantTuple { profile: wire.profile, nu, lambda, rho, rho_u, n })
    }
}

/// A space built from ordinal intervals, constant-rank Cantor sets, binary
/// disjoint sums and countable repetition. `Ord(0)` is the empty space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceExpr {
    Ord(Ordinal),
    Cantor(Ordinal),
    Sum(Box<SpaceExpr>, Box<SpaceExpr>),
    OmegaSum(Box<SpaceExpr>),
}

impl SpaceExpr {
    pub fn empty() -> SpaceExpr {
        SpaceExpr::Ord(Ordinal::zero())
    }

    pub fn sum(left: SpaceExpr, right: SpaceExpr) -> SpaceExpr {
        SpaceExpr::Sum(Box::new(left), Box::new(right))
    }

    pub fn omega_sum(body: SpaceExpr) -> SpaceExpr {
        SpaceExpr::OmegaSum(Box::new(body))
    }

    /// True when the expression denotes the empty space.
    pub fn is_empty(&self) -> bool {
        matches!(self.normalize(), SpaceExpr::Ord(a) if a.is_zero())
    }

    /// Drop empty summands and collapse `omega*(empty)` to the empty space.
    /// Invariants are unaffected; only the tree shape changes.
    pub fn normalize(&self) -> SpaceExpr {
        match self {
            SpaceExpr::Ord(_) | SpaceExpr::Cantor(_) => self.clone(),
            SpaceExpr::Sum(l, r) => {
                let l = l.normalize();
                let r = r.normalize();
                match (is_empty_leaf(&l), is_empty_leaf(&r)) {
                    (true, _) => r,
                    (_, true) => l,
                    _ => SpaceExpr::sum(l, r),
                }
            }
            SpaceExpr::OmegaSum(b) => {
                let b = b.normalize();
                if is_empty_leaf(&b) {
                    SpaceExpr::empty()
                } else {
                    SpaceExpr::omega_sum(b)
                }
            }
        }
    }

    /// Compute the invariant tuple by structural recursion.
    pub fn invariants(&self) -> InvariantTuple {
        match self {
            SpaceExpr::Ord(a) => InvariantTuple::scattered(&type_of(a)),
            SpaceExpr::Cantor(a) => InvariantTuple::from_parts(
                RankProfile::new([a.clone()], []),
                a.clone(),
                Ordinal::zero(),
                None,
            ),
            SpaceExpr::Sum(l, r) => sum_tuple(&l.invariants(), &r.invariants()),
            SpaceExpr::OmegaSum(b) => omega_tuple(&b.invariants()),
        }
    }

    pub fn is_strongly_uniform(&self) -> bool {
        self.invariants().is_strongly_uniform()
    }

    /// Split into a strongly uniform part carrying the whole profile and a
    /// scattered part carrying the height surplus: the disjoint sum of the
    /// parts is homeomorphic to the original space.
    ///
    /// The scattered part is empty exactly when `rho = rho_u` and
    /// `nu = lambda`; otherwise its height is `rho` when the kernel already
    /// reaches the top (`lambda = nu`) and `nu` otherwise, and its own
    /// compact rank drops to `0` when `rho = rho_u`.
    pub fn decompose(&self) -> (SpaceExpr, SpaceExpr) {
        let t = self.invariants();
        let x = uniform_part(&t.profile);
        let y = if t.rho == t.rho_u && t.nu == t.lambda {
            SpaceExpr::empty()
        } else {
            let nu_y = if t.lambda == t.nu { t.rho.clone() } else { t.nu.clone() };
            let rho_y =
                if t.rho_u == t.rho { Ordinal::zero() } else { t.rho.clone() };
            let ty = match t.n {
                Some(n) => {
                    let mu = nu_y
                        .pred()
                        .expect("a finite multiplicity forces a successor height");
                    ScatteredType::full(mu, rho_y, n)
                }
                None => ScatteredType::limit(nu_y),
            }
            .expect("an expression tuple always yields a well-formed scattered part");
            SpaceExpr::Ord(ordinal_of_type(&ty))
        };
        (x, y)
    }
}

fn is_empty_leaf(e: &SpaceExpr) -> bool {
    matches!(e, SpaceExpr::Ord(a) if a.is_zero())
}

fn sum_tuple(a: &InvariantTuple, b: &InvariantTuple) -> InvariantTuple {
    let profile = a.profile.union(&b.profile);
    let nu = std::cmp::max(&a.nu, &b.nu).clone();
    let rho = std::cmp::max(&a.rho, &b.rho).clone();
    let mut n = match a.nu.cmp(&b.nu) {
        std::cmp::Ordering::Less => b.n,
        std::cmp::Ordering::Greater => a.n,
        std::cmp::Ordering::Equal => match (a.n, b.n) {
            (Some(x), Some(y)) => Some(x.saturating_add(y)),
            _ => None,
        },
    };
    let lambda = profile.lambda();
    if lambda == nu || rho == nu {
        n = None;
    }
    InvariantTuple::from_parts(profile, nu, rho, n)
}

fn omega_tuple(body: &InvariantTuple) -> InvariantTuple {
    // Repetition makes every kernel value non-compact and pushes the compact
    // rank up to the full height of the body; nothing else moves.
    InvariantTuple::from_parts(
        body.profile.all_infinite(),
        body.nu.clone(),
        body.nu.clone(),
        None,
    )
}

/// Canonical strongly uniform space with the given profile: one Cantor set
/// per compact value plus a countable repetition of the non-compact ones.
fn uniform_part(profile: &RankProfile) -> SpaceExpr {
    let cantor_sum = |values: &BTreeSet<Ordinal>| -> Option<SpaceExpr> {
        values
            .iter()
            .map(|a| SpaceExpr::Cantor(a.clone()))
            .reduce(SpaceExpr::sum)
    };
    let fin_part = cantor_sum(profile.fin());
    let inf_part = cantor_sum(profile.inf()).map(SpaceExpr::omega_sum);
    match (fin_part, inf_part) {
        (None, None) => SpaceExpr::empty(),
        (Some(x), None) => x,
        (None, Some(y)) => y,
        (Some(x), Some(y)) => SpaceExpr::sum(x, y),
    }
}

/// Two expressions denote homeomorphic spaces iff their tuples are equal.
pub fn homeo_decide(a: &SpaceExpr, b: &SpaceExpr) -> bool {
    a.invariants() == b.invariants()
}

/// Build an expression whose invariants are exactly `t`.
///
/// The uniform part realizes the profile; the scattered part is chosen by
/// cases on how `lambda`, `rho` and `nu` relate: empty when `rho` is already
/// uniform and the kernel reaches the top, a limit-type ordinal space when
/// only the compact rank overshoots, and a successor-type ordinal space
/// carrying the multiplicity otherwise.
pub fn realize(t: &InvariantTuple) -> Result<SpaceExpr, TupleViolation> {
    t.validate()?;
    let x = uniform_part(&t.profile);
    let y = if t.lambda == t.nu {
        if t.rho == t.rho_u {
            SpaceExpr::empty()
        } else {
            let ty = ScatteredType::limit(t.rho.clone())
                .expect("rho exceeds rho_u here, so it is nonzero");
            SpaceExpr::Ord(ordinal_of_type(&ty))
        }
    } else {
        let ty = if t.rho == t.nu {
            ScatteredType::limit(t.nu.clone())
                .expect("nu exceeds lambda here, so it is nonzero")
        } else {
            let mu = t
                .nu
                .pred()
                .expect("validation guarantees a successor height here");
            let rho_y = if t.rho_u == t.rho { Ordinal::zero() } else { t.rho.clone() };
            let n = t.n.expect("validation guarantees a finite multiplicity here");
            ScatteredType::full(mu, rho_y, n)
                .expect("rho lies strictly below nu here")
        };
        SpaceExpr::Ord(ordinal_of_type(&ty))
    };
    Ok(SpaceExpr::sum(x, y).normalize())
}

fn parse_atom(sc: &mut Scanner) -> Result<SpaceExpr, ParseError> {
    if sc.eat_word("ord") {
        sc.expect(b'(')?;
        let a = parse_ordinal(sc)?;
        sc.expect(b')')?;
        Ok(SpaceExpr::Ord(a))
    } else if sc.eat_word("cantor") {
        sc.expect(b'(')?;
        let a = parse_ordinal(sc)?;
        sc.expect(b')')?;
        Ok(SpaceExpr::Cantor(a))
    } else if sc.eat_word("omega") {
        sc.expect(b'*')?;
        sc.expect(b'(')?;
        let body = parse_expr(sc)?;
        sc.expect(b')')?;
        Ok(SpaceExpr::omega_sum(body))
    } else {
        Err(sc.error("expected 'ord(', 'cantor(' or 'omega*('"))
    }
}

pub(crate) fn parse_expr(sc: &mut Scanner) -> Result<SpaceExpr, ParseError> {
    let mut acc = parse_atom(sc)?;
    while sc.eat(b'+') {
        let rhs = parse_atom(sc)?;
        acc = SpaceExpr::sum(acc, rhs);
    }
    Ok(acc)
}

impl FromStr for SpaceExpr {
    type Err = ParseError;

    /// Sums associate to the left: `"a+b+c"` parses as `(a+b)+c`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut sc = Scanner::new(s);
        let e = parse_expr(&mut sc)?;
        sc.finish()?;
        Ok(e)
    }
}

impl fmt::Display for SpaceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceExpr::Ord(a) => write!(f, "ord({a})"),
            SpaceExpr::Cantor(a) => write!(f, "cantor({a})"),
            SpaceExpr::Sum(l, r) => write!(f, "{l}+{r}"),
            SpaceExpr::OmegaSum(b) => write!(f, "omega*({b})"),
        }
    }
}

/// Random expression of nesting depth at most `depth`, for property tests.
pub fn random_space_expr<R: rand::Rng + ?Sized>(rng: &mut R, depth: u32) -> SpaceExpr {
    let leaf = |rng: &mut R| {
        if rng.gen_bool(0.5) {
            SpaceExpr::Ord(crate::ordinal::random_ordinal(rng, 2))
        } else {
            SpaceExpr::Cantor(small_rank(rng))
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..4u32) {
        0 => leaf(rng),
        1 => SpaceExpr::omega_sum(random_space_expr(rng, depth - 1)),
        _ => SpaceExpr::sum(
            random_space_expr(rng, depth - 1),
            random_space_expr(rng, depth - 1),
        ),
    }
}

/// Random kernel rank value of the form `w*k + m` with small `k`, `m`.
pub fn small_rank<R: rand::Rng + ?Sized>(rng: &mut R) -> Ordinal {
    let k = rng.gen_range(0..=2u64);
    let m = rng.gen_range(0..=2u64);
    Ordinal::omega_pow_times(Ordinal::one(), k).add(&Ordinal::from_nat(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn expr(s: &str) -> SpaceExpr {
        s.parse().unwrap()
    }

    fn tuple(
        fin: &[&str],
        inf: &[&str],
        nu: &str,
        rho: &str,
        n: Option<u64>,
    ) -> InvariantTuple {
        let profile = RankProfile::new(
            fin.iter().map(|s| ord(s)),
            inf.iter().map(|s| ord(s)),
        );
        InvariantTuple::from_parts(profile, ord(nu), ord(rho), n)
    }

    #[test]
    fn parsing_and_formatting_round_trip() {
        for text in [
            "ord(0)",
            "ord(w^2*3+1)",
            "cantor(w+1)",
            "ord(1)+cantor(0)+ord(w)",
            "omega*(cantor(1)+ord(w^(w)))",
        ] {
            let e = expr(text);
            assert_eq!(e.to_string(), text);
            assert_eq!(expr(&e.to_string()), e);
        }
        // left association
        assert_eq!(
            expr("ord(1)+ord(2)+ord(3)"),
            SpaceExpr::sum(
                SpaceExpr::sum(expr("ord(1)"), expr("ord(2)")),
                expr("ord(3)")
            )
        );
    }

    #[test]
    fn parse_rejects_malformed_expressions() {
        for text in ["", "ord(", "ord(1))", "cantor", "omega(1)", "ord(1)+", "x"] {
            assert!(text.parse::<SpaceExpr>().is_err(), "{text:?} should fail");
        }
    }

    #[test]
    fn invariants_of_basic_expressions() {
        assert_eq!(expr("ord(0)").invariants(), InvariantTuple::empty());
        assert_eq!(
            expr("ord(w^2*3+1)").invariants(),
            tuple(&[], &[], "3", "0", Some(3))
        );
        assert_eq!(expr("cantor(0)").invariants(), tuple(&["0"], &[], "0", "0", None));
        assert_eq!(
            expr("cantor(1)+ord(w^2)").invariants(),
            tuple(&["1"], &[], "2", "2", None)
        );
        assert_eq!(
            expr("omega*(cantor(1))").invariants(),
            tuple(&[], &["1"], "1", "1", None)
        );
    }

    #[test]
    fn sum_with_cantor_keeps_lambda_and_rho_u_profile_derived() {
        let t = expr("cantor(1)+ord(w^2)").invariants();
        assert_eq!(t.lambda, ord("1"));
        assert_eq!(t.rho_u, ord("0"));
        let t = expr("omega*(cantor(2)+cantor(1))").invariants();
        assert_eq!(t.lambda, ord("2"));
        assert_eq!(t.rho_u, ord("2"));
        assert_eq!(t.rho, ord("2"));
    }

    #[test]
    fn profile_absorbs_compact_values_into_non_compact_ones() {
        let t = expr("cantor(1)+omega*(cantor(1))").invariants();
        assert_eq!(t.profile, RankProfile::new([], [ord("1")]));
        assert!(homeo_decide(
            &expr("cantor(1)+omega*(cantor(1))"),
            &expr("omega*(cantor(1))")
        ));
    }

    #[test]
    fn homeomorphism_examples() {
        assert!(homeo_decide(&expr("cantor(1)+cantor(1)"), &expr("cantor(1)")));
        assert!(homeo_decide(&expr("ord(w^2+4)"), &expr("ord(w^2+9)")));
        assert!(!homeo_decide(&expr("cantor(1)"), &expr("omega*(cantor(1))")));
        assert!(homeo_decide(&expr("omega*(ord(1))"), &expr("ord(w)")));
    }

    #[test]
    fn normalization_drops_empty_parts_and_preserves_invariants() {
        let e = expr("ord(0)+cantor(1)+omega*(ord(0))");
        assert_eq!(e.normalize(), expr("cantor(1)"));
        assert_eq!(e.invariants(), expr("cantor(1)").invariants());
        assert!(expr("omega*(ord(0))").is_empty());
        assert!(!expr("cantor(0)").is_empty());
    }

    #[test]
    fn validation_clauses_fire_in_order() {
        assert_eq!(tuple(&[], &[], "3", "0", Some(2)).validate(), Ok(()));
        assert_eq!(
            tuple(&[], &[], "w", "0", Some(1)).validate().unwrap_err().clause(),
            "iii"
        );
        assert_eq!(
            tuple(&["2"], &[], "2", "0", Some(5)).validate().unwrap_err().clause(),
            "iv"
        );
        assert_eq!(
            tuple(&[], &["1"], "2", "0", Some(1)).validate().unwrap_err().clause(),
            "i"
        );
        assert_eq!(
            tuple(&["3"], &[], "2", "0", None).validate().unwrap_err().clause(),
            "ii"
        );
        // a limit height is fine when the kernel reaches it
        assert_eq!(tuple(&["w"], &[], "w", "0", None).validate(), Ok(()));
        let mut bad = tuple(&["1"], &[], "1", "0", None);
        bad.lambda = ord("2");
        assert_eq!(bad.validate().unwrap_err().clause(), "lambda");
    }

    #[test]
    fn realize_examples() {
        let w = realize(&tuple(&[], &[], "3", "0", Some(2))).unwrap();
        assert_eq!(w, expr("ord(w^2*2+1)"));
        let w = realize(&tuple(&[], &["1"], "1", "1", None)).unwrap();
        assert_eq!(w, expr("omega*(cantor(1))"));
        let w = realize(&tuple(&["1"], &[], "2", "2", None)).unwrap();
        assert_eq!(w, expr("cantor(1)+ord(w^2)"));
        assert!(realize(&tuple(&[], &[], "w", "0", Some(1))).is_err());
    }

    #[test]
    fn realize_round_trips_on_spot_tuples() {
        for t in [
            tuple(&[], &[], "0", "0", None),
            tuple(&["0"], &[], "0", "0", None),
            tuple(&["1", "w"], &["0"], "w+1", "w", Some(4)),
            tuple(&[], &["w*2"], "w*2", "w*2", None),
            tuple(&["2"], &["1"], "4", "3", Some(1)),
        ] {
            assert_eq!(t.validate(), Ok(()));
            assert_eq!(realize(&t).unwrap().invariants(), t);
        }
    }

    #[test]
    fn decompose_examples() {
        let (x, y) = expr("cantor(2)").decompose();
        assert_eq!(x, expr("cantor(2)"));
        assert!(y.is_empty());

        let (x, y) = expr("cantor(1)+ord(w^2)").decompose();
        assert_eq!(x, expr("cantor(1)"));
        assert_eq!(y, expr("ord(w^2)"));

        let (x, y) = expr("ord(w^2*3+1)").decompose();
        assert!(x.is_empty());
        assert!(homeo_decide(&y, &expr("ord(w^2*3+1)")));
    }

    #[test]
    fn decompose_reassembles_the_space() {
        for text in [
            "ord(0)",
            "cantor(1)+ord(w^2)",
            "omega*(cantor(1))+ord(w^3+w)",
            "omega*(ord(w))+cantor(2)",
            "cantor(0)+cantor(1)+ord(w^2*2+w+3)",
        ] {
            let e = expr(text);
            let (x, y) = e.decompose();
            assert!(x.is_empty() || x.is_strongly_uniform(), "{text}");
            assert!(y.is_empty() || y.invariants().profile.is_empty(), "{text}");
            assert!(homeo_decide(&e, &SpaceExpr::sum(x, y)), "{text}");
        }
    }

    #[test]
    fn strongly_uniform_examples() {
        assert!(expr("omega*(cantor(1))").is_strongly_uniform());
        assert!(!expr("omega*(cantor(0))+ord(w)").is_strongly_uniform());
        assert!(expr("cantor(w+3)").is_strongly_uniform());
    }

    #[test]
    fn omega_sum_distributes_over_sums_and_is_idempotent() {
        let a = expr("cantor(1)");
        let b = expr("ord(w^2)");
        assert!(homeo_decide(
            &SpaceExpr::omega_sum(SpaceExpr::sum(a.clone(), b.clone())),
            &SpaceExpr::sum(SpaceExpr::omega_sum(a.clone()), SpaceExpr::omega_sum(b.clone()))
        ));
        let e = expr("cantor(2)+ord(w)");
        assert!(homeo_decide(
            &SpaceExpr::omega_sum(e.clone()),
            &SpaceExpr::omega_sum(SpaceExpr::sum(e.clone(), e))
        ));
    }

    #[test]
    fn tuple_json_round_trip() {
        let t = tuple(&["1"], &["w"], "w+1", "w", Some(2));
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("\"nu\":\"w+1\""));
        let back: InvariantTuple = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);

        let t = tuple(&[], &[], "1", "1", None);
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("\"n\":\"-inf\""));
        assert_eq!(serde_json::from_str::<InvariantTuple>(&json).unwrap(), t);
    }

    #[test]
    fn tuple_json_accepts_minimal_candidates_and_rejects_bad_n() {
        let t: InvariantTuple = serde_json::from_str(
            r#"{"nu":"3","rho":"0","n":2,"profile":{"fin":[],"inf":[]}}"#,
        )
        .unwrap();
        assert_eq!(t, tuple(&[], &[], "3", "0", Some(2)));
        assert!(serde_json::from_str::<InvariantTuple>(
            r#"{"nu":"1","rho":"0","n":0,"profile":{}}"#
        )
        .is_err());
        assert!(serde_json::from_str::<InvariantTuple>(
            r#"{"nu":"1","rho":"0","n":"infinity","profile":{}}"#
        )
        .is_err());
    }

    #[test]
    fn random_expressions_satisfy_the_tuple_identities() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let e = random_space_expr(&mut rng, 3);
            let t = e.invariants();
            assert!(t.rho_u <= t.rho && t.rho <= t.nu);
            assert!(t.rho_u <= t.lambda && t.lambda <= t.nu);
            assert_eq!(t.n.is_none(), t.lambda == t.nu || t.rho == t.nu);
            assert_eq!(t.validate(), Ok(()));
            assert_eq!(e.normalize().invariants(), t);
        }
    }
}
