//! Exact computations with the restricted quantum group of sl2 at
//! `q = e^{i pi / p}`, its action on tensor powers of the fundamental module,
//! and the Temperley-Lieb diagram calculus extended by the root-of-unity
//! generators.

pub mod cyclotomic;
pub mod diagram;
pub mod error;
pub mod expr;
pub mod field;
pub mod generators;
pub mod identities;
pub mod laurent;
pub mod linalg;
pub mod module;
pub mod morphisms;
pub mod operator;
pub mod poly;
pub mod projections;
pub mod scalar;
pub mod tensor;

pub use cyclotomic::{CycNumber, CyclotomicRing};
pub use error::{Error, PoleError, Result};
pub use field::{Field, Rational};
pub use laurent::LaurentRational;
pub use scalar::{GenericField, Mode, QField, RootField, Scalar};

pub use expr::{DiagramExpr, Evaluator};

/// Operators with coefficients in `Q(zeta_2p)`.
pub type RootOperator = operator::GradedOperator<CycNumber>;
/// Operators with coefficients in `Q(v)`.
pub type GenericOperator = operator::GradedOperator<LaurentRational>;
