//! Linear systems of plane curves through general multiple points.
//!
//! - [`lattice`]: divisor classes on blow-ups of the plane, the intersection
//!   pairing, canonical class, genus and Riemann–Roch counts.
//! - [`cremona`]: quadratic Cremona transformations, reduction to standard
//!   form, and (−1)-curve classes.
//! - [`classify`]: speciality verdicts for plane systems through double
//!   points, rules for K3/Abelian/Enriques surfaces, and secant defectivity.
//! - [`oracle`]: actual dimensions by interpolation over a prime field.

pub mod classify;
pub mod cremona;
pub mod error;
pub mod lattice;
pub mod oracle;

pub use classify::{
    classify_kodaira_zero, pencil_invariants, pencil_multiplicity_allowed, scan_defective,
    secant_report, speciality_plane, very_ample_check, SecantMode, SecantReport, Verdict,
};
pub use cremona::{
    apply_cremona, enumerate_minus_one_classes, is_minus_one_class, to_standard_form,
    CremonaTrace, ReducedForm, Terminal,
};
pub use error::{Error, Result};
pub use lattice::{
    arithmetic_genus, canonical_class, expected_dim, intersect, virtual_dim, DivisorClass,
    SurfaceKind, SurfaceProfile, SystemSpec,
};
pub use oracle::{actual_dim, dimension_pair, InterpolationProblem, OracleConfig, RankResult};
