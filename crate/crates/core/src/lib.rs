//! Symbolic invariants for locally compact, metrisable Boolean spaces.
//!
//! The crate decides homeomorphism questions for several symbolic classes of
//! totally disconnected spaces without ever materializing point sets:
//!
//! - [`ordinal`]: ordinal arithmetic in Cantor normal form below the first
//!   fixed point of exponentiation, with the derivative-height helpers the
//!   other modules build on.
//! - [`ordspace`]: classification of the intervals `[0,α)` of countable
//!   ordinals up to homeomorphism - canonical forms, complete type triples
//!   and their addition monoid, and symbolic derivatives.
//! - [`posys`]: finite partially ordered systems with marked self-loops,
//!   their derivative calculus (height, kernel, rank, layers), morphisms,
//!   reduction to canonical form, and invariant prediction for systems
//!   extended by a lower set and a multiplicity function.
//! - [`spacecalc`]: compositional space expressions (ordinal intervals,
//!   constant-rank Cantor sets, sums, countable repetition), the complete
//!   invariant tuple, realizability checking, realization and
//!   uniform-plus-scattered decomposition.
//! - [`measure`]: max-valued measures on finite binary trees - evaluation,
//!   the rank/measure correspondence, measure-preserving isomorphism,
//!   self-similarity, pseudo-indecomposability and primitive decomposition.
//! - [`closurealg`]: finite closure algebras over PO systems (closure =
//!   downward closure), the `Q_k` family with its stage sequence `h_n`, and
//!   the incompatibility certificates that witness non-primitive behaviour
//!   of glued measures.
//!
//! Textual grammars (ordinals, space expressions, tree literals) live with
//! their types; [`parse::ParseError`] is the shared error currency.

pub mod closurealg;
pub mod measure;
pub mod ordinal;
pub mod ordspace;
pub mod parse;
pub mod posys;
pub mod spacecalc;

pub use ordinal::{Ordinal, OrdinalKind};
pub use ordspace::{classify, type_of, ScatteredType, SpaceClass};
pub use posys::{ExtendedPoSystem, PoSystem};
pub use spacecalc::{homeo_decide, realize, InvariantTuple, RankProfile, SpaceExpr};
