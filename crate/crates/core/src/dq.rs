//! Dual quaternions for rigid motion.
//!
//! A dual quaternion `q = q_r + eps q_d` carries rotation in the real part
//! and translation in the dual part (`q_d = 1/2 t q_r` with `t` pure). Unit
//! dual quaternions form the double cover of SE(3): `q` and `-q` encode the
//! same motion, so every constructor canonicalizes the sign (first nonzero
//! real-part component positive) to make equality and interpolation
//! well defined.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::tol::{PURE_TRANSLATION_ANGLE, UNIT_TOL_PRE};

/// Rigid motion as a real + dual quaternion pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualQuaternion {
    pub real: Quaternion,
    pub dual: Quaternion,
}

/// Screw decomposition of a unit dual quaternion: rotation by `angle` about
/// the line `(direction, moment)` plus `pitch` meters of translation along it.
#[derive(Debug, Clone, Copy)]
pub struct ScrewParams {
    /// Rotation angle in `[0, pi]` (radians).
    pub angle: f64,
    /// Translation along the axis over the full motion (meters).
    pub pitch: f64,
    /// Unit direction of the screw axis.
    pub direction: Vector3<f64>,
    /// Moment of the axis line (`point_on_axis x direction`).
    pub moment: Vector3<f64>,
    /// Set when `angle` fell below the pure-translation threshold and the
    /// axis direction was taken from the translation instead.
    pub pure_translation: bool,
}

impl DualQuaternion {
    pub const IDENTITY: DualQuaternion = DualQuaternion {
        real: Quaternion::IDENTITY,
        dual: Quaternion::ZERO,
    };

    pub fn new(real: Quaternion, dual: Quaternion) -> Self {
        Self { real, dual }
    }

    /// Unit DQ from a unit rotation quaternion and a translation vector.
    pub fn from_rotation_translation(rotation: &Quaternion, translation: &Vector3<f64>) -> Self {
        let dual = Quaternion::from_vector(translation)
            .mul(rotation)
            .scaled(0.5);
        Self {
            real: *rotation,
            dual,
        }
        .canonicalized()
    }

    /// Pure translation motion.
    pub fn from_translation(translation: &Vector3<f64>) -> Self {
        Self::from_rotation_translation(&Quaternion::IDENTITY, translation)
    }

    /// Translation encoded by a unit DQ: vector part of `2 q_d q_r*`.
    pub fn translation(&self) -> Vector3<f64> {
        self.dual.mul(&self.real.conjugate()).scaled(2.0).vector()
    }

    /// Dual-quaternion product (dual part drops the eps^2 term).
    pub fn mul(&self, rhs: &DualQuaternion) -> DualQuaternion {
        DualQuaternion {
            real: self.real.mul(&rhs.real),
            dual: self.real.mul(&rhs.dual).add(&self.dual.mul(&rhs.real)),
        }
    }

    /// Component-wise quaternion conjugate.
    pub fn conjugate(&self) -> DualQuaternion {
        DualQuaternion {
            real: self.real.conjugate(),
            dual: self.dual.conjugate(),
        }
    }

    /// Squared norm as a dual scalar `(real, dual)`; `(1, 0)` iff unit.
    pub fn norm_sq(&self) -> (f64, f64) {
        (self.real.norm_sq(), 2.0 * self.real.dot(&self.dual))
    }

    /// Inverse of a unit DQ, which is its conjugate.
    pub fn inverse(&self) -> Result<DualQuaternion> {
        self.check_unit(UNIT_TOL_PRE)?;
        Ok(self.conjugate())
    }

    pub fn add(&self, rhs: &DualQuaternion) -> DualQuaternion {
        DualQuaternion {
            real: self.real.add(&rhs.real),
            dual: self.dual.add(&rhs.dual),
        }
    }

    pub fn scaled(&self, s: f64) -> DualQuaternion {
        DualQuaternion {
            real: self.real.scaled(s),
            dual: self.dual.scaled(s),
        }
    }

    pub fn neg(&self) -> DualQuaternion {
        self.scaled(-1.0)
    }

    /// True when the real part is unit and real/dual parts are orthogonal,
    /// both within `tol`.
    pub fn is_unit(&self, tol: f64) -> bool {
        let (n, o) = self.norm_sq();
        (n - 1.0).abs() <= tol && o.abs() <= 2.0 * tol
    }

    pub(crate) fn check_unit(&self, tol: f64) -> Result<()> {
        if self.is_unit(tol) {
            Ok(())
        } else {
            let (n, o) = self.norm_sq();
            Err(Error::NonUnitDq {
                real_norm: n.sqrt(),
                orthogonality: o / 2.0,
            })
        }
    }

    /// Rescale so the real part is unit and the dual part orthogonal to it
    /// (dual-number division by the norm).
    pub fn normalized(&self) -> DualQuaternion {
        let n = self.real.norm();
        let real = self.real.scaled(1.0 / n);
        let d = self.dual.scaled(1.0 / n);
        let dual = d.add(&real.scaled(-real.dot(&d)));
        DualQuaternion { real, dual }.canonicalized()
    }

    /// Flip sign so the first nonzero real-part component is positive.
    pub fn canonicalized(&self) -> DualQuaternion {
        for c in [self.real.w, self.real.x, self.real.y, self.real.z] {
            if c > 0.0 {
                return *self;
            }
            if c < 0.0 {
                return self.neg();
            }
        }
        *self
    }

    /// Componentwise view `(w_r, x_r, y_r, z_r, w_d, x_d, y_d, z_d)`.
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.real.w, self.real.x, self.real.y, self.real.z, self.dual.w, self.dual.x,
            self.dual.y, self.dual.z,
        ]
    }

    pub fn from_array(v: &[f64; 8]) -> DualQuaternion {
        DualQuaternion {
            real: Quaternion::new(v[0], v[1], v[2], v[3]),
            dual: Quaternion::new(v[4], v[5], v[6], v[7]),
        }
    }

    /// Screw decomposition of a unit DQ.
    pub fn screw_params(&self) -> Result<ScrewParams> {
        self.check_unit(UNIT_TOL_PRE)?;
        let q = self.canonicalized();
        let sin_half = q.real.vector().norm();
        let cos_half = q.real.w;
        let angle = 2.0 * sin_half.atan2(cos_half);

        if angle < PURE_TRANSLATION_ANGLE {
            let t = q.translation();
            let len = t.norm();
            let direction = if len > 0.0 { t / len } else { Vector3::z() };
            return Ok(ScrewParams {
                angle: 0.0,
                pitch: len,
                direction,
                moment: Vector3::zeros(),
                pure_translation: true,
            });
        }

        let direction = q.real.vector() / sin_half;
        let pitch = -2.0 * q.dual.w / sin_half;
        let moment = (q.dual.vector() - direction.scale(0.5 * pitch * cos_half)) / sin_half;
        Ok(ScrewParams {
            angle,
            pitch,
            direction,
            moment,
            pure_translation: false,
        })
    }

    /// Rebuild the unit DQ from screw parameters.
    pub fn from_screw(s: &ScrewParams) -> DualQuaternion {
        if s.angle.abs() < PURE_TRANSLATION_ANGLE {
            return Self::from_translation(&s.direction.scale(s.pitch));
        }
        let (sin_half, cos_half) = (0.5 * s.angle).sin_cos();
        let real = Quaternion::new(
            cos_half,
            sin_half * s.direction.x,
            sin_half * s.direction.y,
            sin_half * s.direction.z,
        );
        let dv = s.direction.scale(0.5 * s.pitch * cos_half) + s.moment.scale(sin_half);
        let dual = Quaternion::new(-0.5 * s.pitch * sin_half, dv.x, dv.y, dv.z);
        DualQuaternion { real, dual }.canonicalized()
    }

    /// Screw power `q^n`: scales the screw angle and pitch linearly.
    pub fn pow(&self, n: f64) -> Result<DualQuaternion> {
        let mut s = self.screw_params()?;
        s.angle *= n;
        s.pitch *= n;
        Ok(Self::from_screw(&s))
    }
}
