//! Geometric decompositions of finite element spaces over finite posets.
//!
//! A [`FunctionSpace`] puts a vector space on every element of a [`Poset`]
//! and a trace matrix on every comparable pair. An [`ExtensionFamily`] of
//! compatible extension operators splits the global space into one block per
//! element ([`decomp::geometric_decomposition`]) and the dual space into
//! per-element degrees of freedom ([`decomp::dual_decomposition`]). The
//! [`simplicial`] module instantiates Lagrange and polynomial form spaces on
//! simplicial complexes.
//!
//! Arithmetic is exact over arbitrary-precision rationals; every check either
//! certifies or returns a witness.
//!
//! ```
//! use geodecomp::simplicial::{instantiate, SimplicialComplex, SimplicialSpace};
//!
//! let square = SimplicialComplex::build(4, &[vec![0, 1, 2], vec![0, 2, 3]]).unwrap();
//! let space = instantiate(SimplicialSpace::Whitney { k: 1 }, &square);
//! assert_eq!(space.assemble_global().dim(), 5);
//! ```

pub mod decomp;
pub mod error;
pub mod extension;
pub mod funcspace;
pub mod linalg;
pub mod poset;
pub mod simplicial;

pub use error::{Error, Result};
pub use extension::ExtensionFamily;
pub use funcspace::FunctionSpace;
pub use linalg::{RatMatrix, Rational};
pub use poset::{Elem, Poset};

/// Outcome of a verification routine: either everything holds or a list of
/// violations naming the witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<V> {
    Valid,
    Violations(Vec<V>),
}

impl<V> Verdict<V> {
    pub fn from_violations(violations: Vec<V>) -> Self {
        if violations.is_empty() {
            Verdict::Valid
        } else {
            Verdict::Violations(violations)
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn violations(&self) -> &[V] {
        match self {
            Verdict::Valid => &[],
            Verdict::Violations(v) => v,
        }
    }
}
