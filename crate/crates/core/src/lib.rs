//! Moduli spaces of weighted stable tropical curves as computable cell
//! complexes.
//!
//! The crate enumerates isomorphism classes of `w`-stable weighted marked
//! multigraphs, assembles the rational cellular chain complex of the moduli
//! space they index, computes its Betti numbers and Euler characteristic with
//! exact arithmetic, and evaluates closed-form Euler characteristics built from
//! counts of weight-admissible set partitions.

pub mod combinatorics;
pub mod complex;
pub mod enumeration;
pub mod error;
pub mod formulas;
pub mod graphs;
pub mod homology;

pub use combinatorics::Rational;
pub use complex::{build_chain_complex, euler_from_cells, ChainComplex, SparseMatrix, SubcomplexFilter};
pub use enumeration::{enumerate_all, enumerate_stratum, CanonicalCell, EnumerationOptions, Strata, StratumIndex};
pub use error::{Error, Result};
pub use graphs::{canonicalize, CanonicalForm, GraphRecord, StableGraph, WeightVector};
pub use homology::{betti_numbers, rank_exact, BettiProfile};
