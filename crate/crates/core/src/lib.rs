//! Discrete asymptotic nets in P³, their lattice Lie quadrics, envelopes and
//! the classification of discrete projective minimal surfaces.
//!
//! The crate is organised around a small projective kernel ([`proj`]) that is
//! generic over the arithmetic backend ([`scalar::Scalar`]): `f64` for
//! production runs and exact rationals ([`scalar::Rat`]) for theorem-style
//! tests where residuals must vanish identically.
//!
//! The geometric layers build on top of each other:
//!
//! * [`net`] — asymptotic nets, frame coefficients, compatibility residuals
//!   and gauge transformations,
//! * [`quadric`] — the one-parameter family of quadrics through the edges of
//!   a quadrilateral, C¹ propagation, shared generators and discriminants,
//! * [`tangency`] — the tangency condition, its induced Möbius maps and the
//!   projective-minimality residuals,
//! * [`envelope`] — propagation of discrete envelopes and their diagnostics,
//! * [`cauchy`] — the geometric Cauchy problem (two-strip initial data) and
//!   generators for random test nets,
//! * [`classify`] — Godeaux-Rozet / Demoulin / Tzitzéica and the semi-Q
//!   degeneration hierarchy, plus construction of special instances,
//! * [`doc`] — serialization of nets and OBJ export for visual inspection.

pub mod cauchy;
pub mod classify;
pub mod construct;
pub mod doc;
pub mod envelope;
pub mod error;
pub mod linalg;
pub mod net;
pub mod optim;
pub mod poly;
pub mod proj;
pub mod quadric;
pub mod scalar;
pub mod tangency;

pub use error::{Error, Result};
pub use scalar::{Rat, Scalar};

/// Default tolerance used when constructing geometry (roots, evolution).
pub const CONSTRUCTION_TOL: f64 = 1e-10;
/// Default tolerance used when verifying constructed geometry; one order
/// looser than construction so validation is not self-fulfilling.
pub const VERIFICATION_TOL: f64 = 1e-8;
/// Default relative threshold separating "not asymptotic" from round-off in
/// frame extraction.
pub const STRUCTURAL_ZERO_TOL: f64 = 1e-9;
/// Default relative threshold for discriminant zero detection.
pub const DISCRIMINANT_TOL: f64 = 1e-9;
