//! Bigraded graded-commutative monomial algebras over F_p.

mod carrier;
mod derivation;
mod element;
mod hilbert;
mod morphism;
mod spec;

pub use carrier::{map_matrix, BasisIndex, GradedAlgebra, Relation};
pub use derivation::Derivation;
pub use element::{Element, Monomial};
pub use hilbert::{hilbert, hilbert_bigraded, BigradedDims, GradedDims};
pub use morphism::{
    check_morphism, morphism_report, AlgebraMap, DegreeRank, MorphismReport, RelationFailure,
};
pub use spec::{AlgebraSpec, CoefficientFactor, CoefficientMode, GeneratorSpec, Kind};

#[cfg(test)]
mod tests;
