//! Quantitative logical relations for the simply typed λ-calculus over the reals.
//!
//! The crate is organized around seven pieces:
//!
//! * [`quantale`]: commutative quantales (Q, 0, +, ≥) with their residual and
//!   Heyting operations, diagonals, and a law checker.
//! * [`finite`]: finite carriers with quantale-valued distance matrices,
//!   derivatives of maps between them, product and exponential constructions,
//!   currying, and metric-axiom checks with witnesses.
//! * [`lambda`]: the simply typed λ-calculus over `Real` with a registry of
//!   real-valued primitives (parser, typechecker, normalizer, contexts).
//! * [`semantics`]: the quantitative model over general quantales: denotations
//!   ⟦t⟧ together with derivative maps ∥t∥, sampled function distances, the
//!   contextual-distance bound, and the stock counterexamples.
//! * [`valuation`]: join-valuations on interval lattices, the partial metrics
//!   they induce, and the valuation-based lifting of distances to functions.
//! * [`ll`]: the local-Lipschitz model, where differences at arrow types are
//!   functions of the argument only and validity is gated by a radius.
//! * [`report`]: shared pass/fail report types used by the checkers and CLI.

pub mod ext;
pub mod finite;
pub mod lambda;
pub mod ll;
pub mod quantale;
pub mod report;
pub mod semantics;
pub mod valuation;

pub use finite::{FiniteQlr, FiniteQlrMap};
pub use lambda::{Registry, SimpleType, Term};
pub use ll::{denote_ll, deriv_ll, ll_dist, FinFilter, LLDiff, LLDiffEnv, LLEnv, LLValue};
pub use quantale::{IntervalElem, QuantaleDesc, QuantaleElem, QuantaleKind};
pub use report::{AxiomReport, LawEntry, LawReport};
pub use semantics::{denote, deriv_q, deriv_qr, Diff, DiffEnv, Env, GridConfig, Value};
pub use valuation::{DualJoinValuation, IntervalUnion, JoinLattice, JoinValuation};
