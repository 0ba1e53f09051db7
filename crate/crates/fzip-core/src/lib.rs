//! Classification of F-zips with classical-group structure over finite fields.
//!
//! The crate has two halves that check each other:
//!
//! * a combinatorial half (`weyl`, `zipdatum`, `strata`) that enumerates the
//!   isomorphism strata of a classical-group zip datum from Weyl group data:
//!   the specialization order, codimensions and automorphism invariants;
//! * a concrete half (`field`, `linalg`, `fzip`, `classical`, `bt1`) that
//!   builds honest semilinear-algebra objects over small finite fields and
//!   classifies them by brute force.
//!
//! Agreement between the two halves on overlapping small cases is the main
//! correctness argument, exercised by the test suites and the `acceptance`
//! integration test of the CLI crate.

pub mod bt1;
pub mod classical;
pub mod error;
pub mod field;
pub mod fzip;
pub mod linalg;
pub mod strata;
pub mod weyl;
pub mod zipdatum;

pub use error::ZipError;
