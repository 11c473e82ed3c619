use alloc::string::String;
use core::fmt;

/// Errors surfaced by kernel operations.
///
/// Construction errors (`NotComposable`, `PairSourceMismatch`, ...) are raised
/// while elaborating raw syntax into the interned normal-form arena; search
/// errors (`DepthExceeded`) are raised by the bounded proof-search routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A name was referenced before being declared.
    UnknownName(String),
    /// A declaration reused an existing name.
    DuplicateName(String),
    /// An expression violates a well-formedness side condition.
    MalformedExpr(String),
    /// `compose(a, b)` with `source(a)` not below `target(b)`.
    NotComposable { left_source: String, right_target: String },
    /// Pairing `⟨a, b⟩` requires identical sources.
    PairSourceMismatch { left: String, right: String },
    /// `()*` requires the (normalized) source to be a wedge node.
    StarSourceNotWedge(String),
    /// The declared order pairs identify distinct normal forms.
    OrderCycle(String, String),
    /// Bounded search gave up before exhausting the space.
    DepthExceeded,
    /// `kappa` was applied to a polynomial whose boundaries mention an
    /// indeterminate.
    NotAPath(String),
    UnknownIndeterminate(String),
    /// `epsilon_x` requires a polynomial sourced at the terminal element.
    NotClosedSource(String),
    /// Substitution target boundary does not match the indeterminate.
    TargetMismatch { expected: String, found: String },
    /// Term-level substitution with a type mismatch.
    TypeMismatch { expected: String, found: String },
    /// A term violates the typing conditions; carries the offending part.
    IllTyped(String),
    /// `unname` needs a body with exactly one free variable.
    NotABulletin(String),
    /// Internal invariant violation (normalizer fuel, arena overflow, ...).
    Internal(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownName(n) => write!(f, "unknown name `{n}`"),
            Error::DuplicateName(n) => write!(f, "duplicate declaration of `{n}`"),
            Error::MalformedExpr(m) => write!(f, "malformed expression: {m}"),
            Error::NotComposable { left_source, right_target } => write!(
                f,
                "not composable: source {left_source} is not below target {right_target}"
            ),
            Error::PairSourceMismatch { left, right } => {
                write!(f, "pairing requires equal sources, got {left} and {right}")
            }
            Error::StarSourceNotWedge(s) => {
                write!(f, "()* requires a wedge source, got {s}")
            }
            Error::OrderCycle(a, b) => {
                write!(f, "order closure identifies distinct elements {a} and {b}")
            }
            Error::DepthExceeded => write!(f, "search depth exceeded"),
            Error::NotAPath(s) => write!(f, "boundaries are not in the base system: {s}"),
            Error::UnknownIndeterminate(n) => write!(f, "unknown indeterminate `{n}`"),
            Error::NotClosedSource(s) => {
                write!(f, "polynomial must be sourced at top, got source {s}")
            }
            Error::TargetMismatch { expected, found } => {
                write!(f, "target mismatch: expected {expected}, found {found}")
            }
            Error::TypeMismatch { expected, found } => {
                write!(f, "type mismatch: expected {expected}, found {found}")
            }
            Error::IllTyped(m) => write!(f, "ill-typed term: {m}"),
            Error::NotABulletin(m) => write!(f, "not a bulletin: {m}"),
            Error::Internal(m) => write!(f, "internal invariant violation: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
