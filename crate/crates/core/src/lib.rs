//! Decision engine for diagonal multiplier projections `Q = ⊕_j p_{I_j}` over
//! `C(∏ S², K)`.
//!
//! Subequivalence by trivial projections, fullness and stable finiteness of
//! such projections are all governed by the surplus `n|F| - |⋃_{j∈F} I_j|` of
//! the index-set family. This crate computes those quantities exactly:
//!
//! - [`family`]: index-set families, symbolic tails, windows.
//! - [`hall`]: maximum matching, surplus with witnesses, `m·g ≼ n·Q`.
//! - [`cohom`]: Euler classes in `Z[x_i]/(x_i²)` and SDR counts, an
//!   independent algebraic oracle.
//! - [`classify`]: `N(m)`, the full / non-full dichotomy, tight sets.
//! - [`endo`]: the index-set dynamics `Γ_m` and their transversals.
//! - [`oracle`]: brute-force cross-checks.

pub mod classify;
pub mod cohom;
pub mod endo;
pub mod error;
pub mod family;
pub mod hall;
pub mod oracle;

pub use classify::{classify, compute_n, find_tight_set, max_trivial_multiplicity, Bound, Classification, Label};
pub use cohom::{euler_class, sdr_count, tensor_line_bundles, ChernVector, MultilinearPoly};
pub use error::{Error, Result};
pub use family::{FiniteFamily, Ground, IndexSet, ProjectionFamily, TailRule};
pub use hall::{decide_trivial_minorization, max_matching, max_surplus, sdr_exists, SurplusReport};
