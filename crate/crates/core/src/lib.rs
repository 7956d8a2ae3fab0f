//! Hierarchical compressive sensing by column replacement.
//!
//! Large measurement matrices are assembled from small *ingredient* matrices
//! by substituting ingredient columns for the symbols of a *pattern* matrix
//! (a hash family). Recovery is equally hierarchical: each ingredient solves
//! its own small problem and the pattern's separation properties combine the
//! per-row answers into the support of the full signal.
//!
//! - [`field`]: GF(p^e) arithmetic, polynomial evaluation and interpolation.
//! - [`hash_family`]: pattern matrices, separation checkers, linear families.
//! - [`linalg`]: rank, least squares, null spaces, a small dense simplex.
//! - [`ingredient`]: ingredient matrices, recovery schemes, null-space checks.
//! - [`compose`]: column replacement, sampling and projections.
//! - [`recover`]: positive, general, strengthened, sublinear and noisy recovery.
//! - [`sweep`]: the naive-versus-sublinear timing workload.

pub mod compose;
pub mod field;
pub mod hash_family;
pub mod ingredient;
pub mod linalg;
pub mod par;
pub mod recover;
pub mod sweep;

pub use compose::{column_replace, project, ComposedMatrix};
pub use field::{lagrange_interpolate, poly_eval, Field, FieldElement, Poly};
pub use hash_family::{HashFamily, PartitionShape, RowLabel, Verdict};
pub use ingredient::{Ingredient, SchemeKind};
pub use linalg::{DenseMatrix, Tolerance};
pub use par::Execution;
pub use recover::{RecoveryOptions, RecoveryResult};
