//! Finite closure algebras over PO systems and the ladder family `Q_k`.
//!
//! The powerset of a PO system becomes a closure algebra when the closure of
//! a subset is taken to be its downward closure. On such algebras the stage
//! sequence `h_1, h_2, ...` of a closed set is an isomorphism invariant, and
//! on the ladder systems `Q_k` it separates the members of the family from
//! one another. That separation is the engine of [`nonprimitivity_report`]:
//! a measure completed from characteristic functions of pairwise separated
//! closed sets admits no neighbourhood base of pseudo-indecomposable sets at
//! its adjoined point, so the completed measure is not sigma-primitive.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::measure::MeasureValue;
use crate::ordinal::Ordinal;
use crate::posys::PoSystem;

/// Errors from closure-algebra operations on explicit subsets.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClosureError {
    #[error("element {0:?} does not belong to the base system")]
    UnknownElement(String),
    #[error("set is not closed: {below:?} lies below its member {member:?}")]
    NotClosed { member: String, below: String },
    #[error("set is not a lower set: {below:?} lies below its member {member:?}")]
    NotLower { member: String, below: String },
}

/// Errors from the completion-measure constructions.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompletionError {
    #[error("cannot compare a ladder system with itself (index {0})")]
    EqualIndices(u64),
    #[error("components {first} and {second} admit no separating stage")]
    WitnessMissing { first: usize, second: usize },
    #[error("a completion needs at least two components")]
    TooFewComponents,
    #[error("malformed set descriptor: {0}")]
    MalformedDescriptor(String),
}

/// The powerset of a PO system viewed as a closure algebra: the closure of a
/// subset is its downward closure under the base order.
#[derive(Debug, Clone)]
pub struct ClosureAlgebra {
    base: PoSystem,
}

impl ClosureAlgebra {
    pub fn new(base: PoSystem) -> ClosureAlgebra {
        ClosureAlgebra { base }
    }

    pub fn base(&self) -> &PoSystem {
        &self.base
    }

    /// The top element of the algebra: the whole carrier.
    pub fn universe(&self) -> BTreeSet<String> {
        self.base.elements().cloned().collect()
    }

    fn check_members(&self, s: &BTreeSet<String>) -> Result<(), ClosureError> {
        match s.iter().find(|p| !self.base.contains(p)) {
            Some(p) => Err(ClosureError::UnknownElement(p.clone())),
            None => Ok(()),
        }
    }

    /// First `(member, below)` pair witnessing that `s` is not a lower set.
    fn lower_violation(&self, s: &BTreeSet<String>) -> Option<(String, String)> {
        for p in s {
            for q in self.base.elements() {
                if self.base.lt(q, p) && !s.contains(q) {
                    return Some((p.clone(), q.clone()));
                }
            }
        }
        None
    }

    /// Downward closure of `s`.
    pub fn closure(&self, s: &BTreeSet<String>) -> BTreeSet<String> {
        let mut out = s.clone();
        for q in self.base.elements() {
            if !out.contains(q) && s.iter().any(|p| self.base.lt(q, p)) {
                out.insert(q.clone());
            }
        }
        out
    }

    pub fn is_closed(&self, s: &BTreeSet<String>) -> bool {
        self.lower_violation(s).is_none()
    }

    pub fn is_upper(&self, s: &BTreeSet<String>) -> bool {
        s.iter()
            .all(|p| self.base.elements().all(|q| !self.base.lt(p, q) || s.contains(q)))
    }

    /// Clopen = simultaneously lower and upper.
    pub fn is_clopen(&self, s: &BTreeSet<String>) -> bool {
        self.is_closed(s) && self.is_upper(s)
    }

    /// All clopen subsets, by exhaustive enumeration; meant for small bases.
    pub fn clopens(&self) -> Vec<BTreeSet<String>> {
        let names: Vec<&String> = self.base.elements().collect();
        assert!(names.len() <= 20, "clopen enumeration is exponential");
        (0u32..1 << names.len())
            .map(|mask| {
                names
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, p)| (*p).clone())
                    .collect::<BTreeSet<String>>()
            })
            .filter(|s| self.is_clopen(s))
            .collect()
    }

    /// Complement within the carrier.
    pub fn complement(&self, s: &BTreeSet<String>) -> BTreeSet<String> {
        self.universe().difference(s).cloned().collect()
    }

    /// The subalgebra carried by a clopen piece of the base.
    pub fn restrict(&self, a: &BTreeSet<String>) -> ClosureAlgebra {
        ClosureAlgebra::new(self.base.restrict(a))
    }

    /// The stage sequence `[h_1, ..., h_upto]` of a closed set `c`:
    /// `h_1 = c` and `h_{n+1} = h_n ∩ cl(h_{n-1} − h_n)`, where `h_0` is read
    /// as the whole carrier (so `h_2 = c ∩ cl(1 − c)`).
    ///
    /// Every stage is again closed and the sequence is decreasing.
    pub fn h_sequence(
        &self,
        c: &BTreeSet<String>,
        upto: usize,
    ) -> Result<Vec<BTreeSet<String>>, ClosureError> {
        self.check_members(c)?;
        if let Some((member, below)) = self.lower_violation(c) {
            return Err(ClosureError::NotClosed { member, below });
        }
        let mut out = Vec::with_capacity(upto);
        let mut prev = self.universe();
        let mut cur = c.clone();
        for _ in 0..upto {
            out.push(cur.clone());
            let shed: BTreeSet<String> = prev.difference(&cur).cloned().collect();
            let next = cur
                .intersection(&self.closure(&shed))
                .cloned()
                .collect::<BTreeSet<String>>();
            prev = cur;
            cur = next;
        }
        Ok(out)
    }

    /// Elements of a lower set `s` that are loop-free and maximal within `s`.
    ///
    /// In the space carved along the base system these atoms are exactly the
    /// isolated points of the piece carried by `s`.
    pub fn isolated_atoms(&self, s: &BTreeSet<String>) -> Result<BTreeSet<String>, ClosureError> {
        self.check_members(s)?;
        if let Some((member, below)) = self.lower_violation(s) {
            return Err(ClosureError::NotLower { member, below });
        }
        let d = self.base.d_part();
        Ok(s.iter()
            .filter(|p| d.contains(*p) && s.iter().all(|q| !self.base.lt(p, q)))
            .cloned()
            .collect())
    }
}

/// The two readings of the ladder order, differing in the single pair
/// `(k+2, k)`: `Literal` keeps it, `Prop` drops it. The choice moves the
/// tail of the stage sequence of [`qk_closed_set`] by one stage; see
/// [`h_sequence`](ClosureAlgebra::h_sequence) tests for the exact tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QkVariant {
    Literal,
    Prop,
}

impl QkVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            QkVariant::Literal => "literal",
            QkVariant::Prop => "prop",
        }
    }
}

impl fmt::Display for QkVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QkVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<QkVariant, String> {
        match s {
            "literal" => Ok(QkVariant::Literal),
            "prop" => Ok(QkVariant::Prop),
            other => Err(format!("unknown variant {other:?}; expected literal or prop")),
        }
    }
}

/// The `k`-th ladder system: carrier `{0, ..., k, k+2}` with `i < j` iff
/// `i >= j+2` or `i = j <= k` (so every element except `k+2` has a
/// self-loop, and `k+2` is the unique loop-free element).
pub fn qk_system(k: u64, variant: QkVariant) -> PoSystem {
    let elems: Vec<u64> = (0..=k).chain([k + 2]).collect();
    let mut pairs = Vec::new();
    for &i in &elems {
        for &j in &elems {
            let related = i >= j + 2 || (i == j && i <= k);
            let dropped = variant == QkVariant::Prop && i == k + 2 && j == k;
            if related && !dropped {
                pairs.push((i.to_string(), j.to_string()));
            }
        }
    }
    PoSystem::new(elems.iter().map(u64::to_string), pairs)
        .expect("the ladder relation is transitive and antisymmetric")
}

/// The closure algebra over [`qk_system`].
pub fn qk_algebra(k: u64, variant: QkVariant) -> ClosureAlgebra {
    ClosureAlgebra::new(qk_system(k, variant))
}

/// The lower set `{n, ..., k} ∪ {k+2}` of the `k`-th ladder system.
pub fn p_nk(n: u64, k: u64) -> BTreeSet<String> {
    (n..=k).chain([k + 2]).map(|i| i.to_string()).collect()
}

/// The canonical closed starting set of the `k`-th ladder: everything but 0.
pub fn qk_closed_set(k: u64) -> BTreeSet<String> {
    p_nk(1, k)
}

/// Coarse shape of one stage of the sequence, classified at the atom level:
/// a loop-free atom carries a single point, any other atom carries a perfect
/// (Cantor-like) piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageKind {
    Empty,
    Singleton,
    HasPerfectPart,
}

/// Stage classification plus the number of isolated atoms it contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct StageProfile {
    pub kind: StageKind,
    pub isolated: usize,
}

fn profile_of(alg: &ClosureAlgebra, s: &BTreeSet<String>) -> StageProfile {
    let d = alg.base().d_part();
    let kind = if s.is_empty() {
        StageKind::Empty
    } else if s.iter().all(|p| d.contains(p)) {
        StageKind::Singleton
    } else {
        StageKind::HasPerfectPart
    };
    let isolated = alg
        .isolated_atoms(s)
        .expect("stages of the h sequence are closed")
        .len();
    StageProfile { kind, isolated }
}

/// The profile of stage `n >= 1` of the canonical closed set of the `k`-th
/// ladder system.
pub fn stage_profile(k: u64, n: usize, variant: QkVariant) -> StageProfile {
    assert!(n >= 1, "stages are numbered from 1");
    let alg = qk_algebra(k, variant);
    let seq = alg
        .h_sequence(&qk_closed_set(k), n)
        .expect("the canonical starting set is closed");
    profile_of(&alg, &seq[n - 1])
}

/// A stage separating two ladder systems, with the profiles on both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncompatibilityWitness {
    pub k: u64,
    pub m: u64,
    pub stage: usize,
    pub left: StageProfile,
    pub right: StageProfile,
}

/// Searches for the least stage at which the `k`-th ladder's profile cannot
/// be matched by any clopen restriction of the `m`-th ladder's profile: the
/// left profile must be nonempty and of a different kind (a nonempty stage
/// cannot match an empty one, a perfect part cannot fit inside a finite set,
/// and a singleton stage is treated as unmatchable by a stage with a perfect
/// part; the comparison is deliberately coarse, at the kind level only).
pub fn incompatibility_witness(
    k: u64,
    m: u64,
    variant: QkVariant,
) -> Result<Option<IncompatibilityWitness>, CompletionError> {
    if k == m {
        return Err(CompletionError::EqualIndices(k));
    }
    let bound = (k.max(m) + 3) as usize;
    for stage in 1..=bound {
        let left = stage_profile(k, stage, variant);
        let right = stage_profile(m, stage, variant);
        if left.kind != StageKind::Empty && left.kind != right.kind {
            return Ok(Some(IncompatibilityWitness { k, m, stage, left, right }));
        }
    }
    Ok(None)
}

/// A symbolic description of a measurable set in a completed measure: the
/// ambient space is a disjoint union of component spaces `X_1, ..., X_r`
/// (the `i`-th carrying the characteristic-function measure of a closed set
/// of ladder type) together with one adjoined point `c`, whose neighbourhoods
/// are the tail sets `A_n = {c} ∪ X_n ∪ X_{n+1} ∪ ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetDescriptor {
    /// The empty set.
    Empty,
    /// A nonempty compact open subset of component `index` (1-based),
    /// recording whether it meets the component's closed set.
    Component { index: usize, meets_closed_set: bool },
    /// The tail neighbourhood `A_from` of the adjoined point.
    Tail { from: usize },
    /// A finite union.
    Union(Vec<SetDescriptor>),
}

/// A completion specification: the list of ladder indices whose
/// characteristic-function measures are the components, plus the variant of
/// the ladder order to use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionSpec {
    components: Vec<u64>,
    variant: QkVariant,
}

/// One pairwise separation cited by a [`NonprimitivityReport`]; `first` and
/// `second` are 1-based component positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub first: usize,
    pub second: usize,
    pub witness: IncompatibilityWitness,
}

/// Certificate that a completed measure is not sigma-primitive: no compact
/// open neighbourhood of the adjoined point is pseudo-indecomposable in the
/// measure-preserving sense.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonprimitivityReport {
    /// Ladder indices of the components, in order.
    pub components: Vec<u64>,
    /// The adjoined point at which every neighbourhood fails.
    pub bad_point: String,
    /// One separation per unordered pair of components.
    pub witnesses: Vec<PairWitness>,
    /// Why no neighbourhood of the bad point is self-similar elsewhere.
    pub case_away_from_bad_point: String,
    /// Why no neighbourhood of the bad point is self-similar at the point.
    pub case_at_bad_point: String,
    pub conclusion: String,
}

impl CompletionSpec {
    pub fn new(components: Vec<u64>, variant: QkVariant) -> CompletionSpec {
        CompletionSpec { components, variant }
    }

    pub fn components(&self) -> &[u64] {
        &self.components
    }

    pub fn variant(&self) -> QkVariant {
        self.variant
    }

    /// Evaluates the completed measure on a described set. A nonempty piece
    /// of a component has measure 1 or 0 according as it meets the
    /// component's closed set; every tail neighbourhood has measure 1 (each
    /// component meets its own closed set); unions take the larger value.
    pub fn sigma_eval(&self, d: &SetDescriptor) -> Result<MeasureValue, CompletionError> {
        let check = |index: usize, what: &str| {
            if index == 0 || index > self.components.len() {
                Err(CompletionError::MalformedDescriptor(format!(
                    "{what} {index} out of range 1..={}",
                    self.components.len()
                )))
            } else {
                Ok(())
            }
        };
        match d {
            SetDescriptor::Empty => Ok(MeasureValue::O),
            SetDescriptor::Component { index, meets_closed_set } => {
                check(*index, "component index")?;
                let value = if *meets_closed_set { Ordinal::one() } else { Ordinal::zero() };
                Ok(MeasureValue::Rank(value))
            }
            SetDescriptor::Tail { from } => {
                check(*from, "tail start")?;
                Ok(MeasureValue::Rank(Ordinal::one()))
            }
            SetDescriptor::Union(parts) => {
                let mut acc = MeasureValue::O;
                for part in parts {
                    acc = acc.join(&self.sigma_eval(part)?);
                }
                Ok(acc)
            }
        }
    }

    /// Assembles the non-primitivity certificate: a separating stage for
    /// every pair of components, the bad point, and the two-case argument.
    pub fn nonprimitivity_report(&self) -> Result<NonprimitivityReport, CompletionError> {
        if self.components.len() < 2 {
            return Err(CompletionError::TooFewComponents);
        }
        let mut witnesses = Vec::new();
        for i in 0..self.components.len() {
            for j in i + 1..self.components.len() {
                let missing = CompletionError::WitnessMissing { first: i + 1, second: j + 1 };
                if self.components[i] == self.components[j] {
                    return Err(missing);
                }
                let witness =
                    incompatibility_witness(self.components[i], self.components[j], self.variant)?
                        .ok_or(missing)?;
                witnesses.push(PairWitness { first: i + 1, second: j + 1, witness });
            }
        }
        Ok(NonprimitivityReport {
            components: self.components.clone(),
            bad_point: "c".to_owned(),
            witnesses,
            case_away_from_bad_point: CASE_AWAY.to_owned(),
            case_at_bad_point: CASE_AT.to_owned(),
            conclusion: CONCLUSION.to_owned(),
        })
    }
}

const CASE_AWAY: &str = "If D, a compact open neighbourhood of c, were self-similar at a point \
x other than c, then a small compact open piece E at x would avoid c while being \
measure-isomorphic to D. E avoids some tail set A_n, yet D contains one, so the isomorphism \
carries a component inside D into pieces of other components; compactness then refines it to a \
measure isomorphism between a full-measure compact open subset of one component and a compact \
open subset of a single component of different index, which the stage witnesses rule out.";

const CASE_AT: &str = "If D were self-similar at c itself, D would be measure-isomorphic to its \
sub-neighbourhood A_{n+1} whenever A_n lies inside D. Such an isomorphism carries the n-th \
component into components of strictly larger index; compactness again refines it to a measure \
isomorphism between a full-measure compact open subset of the n-th component and a compact open \
subset of a single component of different index, contradicting the stage witnesses.";

const CONCLUSION: &str = "No compact open neighbourhood of c is self-similar at any of its \
points, so none is pseudo-indecomposable in the measure-preserving sense; the completed measure \
is not sigma-primitive, and a space carrying it is not primitive.";
