//! Numerical tolerances used across the toolkit.
//!
//! Preconditions (inputs we accept) are looser than postconditions (outputs
//! we promise) so that round-trips through file formats and long operation
//! chains do not reject their own products.

/// Unit-norm tolerance required of quaternion / dual-quaternion inputs.
pub const UNIT_TOL_PRE: f64 = 1e-6;

/// Unit-norm tolerance guaranteed on freshly constructed outputs.
pub const UNIT_TOL_POST: f64 = 1e-9;

/// Screw angle below which a motion is treated as a pure translation.
pub const PURE_TRANSLATION_ANGLE: f64 = 1e-8;

/// Timestamps closer than this are considered the same grid point.
pub const TIME_EPS: f64 = 1e-9;

/// Screw axes of two motions closer than this angle (radians) are treated
/// as exactly parallel when checking solvability.
pub const PARALLEL_AXIS_TOL: f64 = 1e-8;
