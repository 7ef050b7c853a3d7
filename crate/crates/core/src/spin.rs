//! Spin-1 operator algebra and selective rotations between adjacent levels.
//!
//! Rotation sequences returned from this module are in time order: the first
//! element acts first, so the composed operator is the reversed product.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{c64, op3_identity, op3_mul, Op3};

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::InvalidRotation(format!("unknown axis `{other}`"))),
        }
    }
}

/// Adjacent-level pair driven by a selective pulse.
///
/// Levels are numbered 1, 2, 3 for projections m = 1, 0, -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Transition {
    /// 1 ↔ 2 (m = 1 ↔ m = 0)
    Upper,
    /// 2 ↔ 3 (m = 0 ↔ m = -1)
    Lower,
}

impl Transition {
    pub const BOTH: [Transition; 2] = [Transition::Upper, Transition::Lower];

    /// Level indices (0-based) coupled by this transition.
    pub fn levels(self) -> (usize, usize) {
        match self {
            Transition::Upper => (0, 1),
            Transition::Lower => (1, 2),
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transition::Upper => "12",
            Transition::Lower => "23",
        })
    }
}

impl FromStr for Transition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "12" => Ok(Transition::Upper),
            "23" => Ok(Transition::Lower),
            other => Err(Error::InvalidRotation(format!(
                "transition `{other}` is not an adjacent level pair"
            ))),
        }
    }
}

/// `{angle}_{axis, site}^{transition}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectiveRotation {
    pub axis: Axis,
    pub angle: f64,
    /// 1-based active spin index.
    pub site: usize,
    pub transition: Transition,
}

impl SelectiveRotation {
    pub fn new(axis: Axis, angle: f64, site: usize, transition: Transition) -> Self {
        Self {
            axis,
            angle,
            site,
            transition,
        }
    }

    pub fn x(angle: f64, site: usize, transition: Transition) -> Self {
        Self::new(Axis::X, angle, site, transition)
    }

    pub fn y(angle: f64, site: usize, transition: Transition) -> Self {
        Self::new(Axis::Y, angle, site, transition)
    }

    pub fn z(angle: f64, site: usize, transition: Transition) -> Self {
        Self::new(Axis::Z, angle, site, transition)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.angle.is_finite() {
            return Err(Error::InvalidRotation(format!(
                "non-finite angle {} on site {}",
                self.angle, self.site
            )));
        }
        if self.site == 0 {
            return Err(Error::InvalidRotation("site indices start at 1".into()));
        }
        Ok(())
    }

    pub fn inverse(&self) -> Self {
        Self {
            angle: -self.angle,
            ..*self
        }
    }
}

/// `(S^x, S^y, S^z)` for spin 1 in the (1, 0, -1) basis.
pub fn spin1_matrices() -> (Op3, Op3, Op3) {
    let r = c64::new(FRAC_1_SQRT_2, 0.0);
    let i = c64::new(0.0, FRAC_1_SQRT_2);
    let sx = [[ZERO, r, ZERO], [r, ZERO, r], [ZERO, r, ZERO]];
    let sy = [[ZERO, -i, ZERO], [i, ZERO, -i], [ZERO, i, ZERO]];
    let mut sz = [[ZERO; 3]; 3];
    sz[0][0] = c64::new(1.0, 0.0);
    sz[2][2] = c64::new(-1.0, 0.0);
    (sx, sy, sz)
}

/// The 3x3 matrix of a selective rotation.
///
/// Within the driven pair (a, b) the y-rotation is `[[c, -s], [s, c]]`, the
/// x-rotation carries `-i` on both sines, and the z-rotation is
/// `diag(e^{-iΩ/2}, e^{iΩ/2})`; the spectator level is untouched.
pub fn rotation_matrix(r: &SelectiveRotation) -> Result<Op3> {
    r.validate()?;
    let (a, b) = r.transition.levels();
    let half = r.angle / 2.0;
    let (s, c) = half.sin_cos();
    let mut m = op3_identity();
    match r.axis {
        Axis::Y => {
            m[a][a] = c64::new(c, 0.0);
            m[a][b] = c64::new(-s, 0.0);
            m[b][a] = c64::new(s, 0.0);
            m[b][b] = c64::new(c, 0.0);
        }
        Axis::X => {
            m[a][a] = c64::new(c, 0.0);
            m[a][b] = c64::new(0.0, -s);
            m[b][a] = c64::new(0.0, -s);
            m[b][b] = c64::new(c, 0.0);
        }
        Axis::Z => {
            m[a][a] = c64::cis(-half);
            m[b][b] = c64::cis(half);
        }
    }
    Ok(m)
}

/// Product of a time-ordered single-site sequence (last element leftmost).
pub fn sequence_matrix(seq: &[SelectiveRotation]) -> Result<Op3> {
    seq.iter().try_fold(op3_identity(), |acc, r| {
        Ok(op3_mul(&rotation_matrix(r)?, &acc))
    })
}

/// Z rotation built from physical x/y pulses.
///
/// The operator is `{-π/2}_y · {θ}_x · {π/2}_y`; in time order the `{π/2}_y`
/// pulse comes first.
pub fn composite_z(theta: f64, site: usize, transition: Transition) -> [SelectiveRotation; 3] {
    [
        SelectiveRotation::y(FRAC_PI_2, site, transition),
        SelectiveRotation::x(theta, site, transition),
        SelectiveRotation::y(-FRAC_PI_2, site, transition),
    ]
}

/// Spin inversion `P_k` and its inverse, both in time order.
///
/// `P_k = {π}^{12} {π}^{23} {π}^{12}` (y axis) satisfies `P_k⁻¹ S^z P_k = -S^z`.
pub fn inversion_pair(site: usize) -> ([SelectiveRotation; 3], [SelectiveRotation; 3]) {
    let p = |angle: f64| {
        [
            SelectiveRotation::y(angle, site, Transition::Upper),
            SelectiveRotation::y(angle, site, Transition::Lower),
            SelectiveRotation::y(angle, site, Transition::Upper),
        ]
    };
    (p(PI), p(-PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{op3_adjoint, op3_distance, op3_distance_up_to_phase, op3_scale};

    fn commutator(a: &Op3, b: &Op3) -> Op3 {
        let ab = op3_mul(a, b);
        let ba = op3_mul(b, a);
        let mut out = ab;
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = ab[i][j] - ba[i][j];
            }
        }
        out
    }

    #[test]
    fn su2_algebra() {
        let (sx, sy, sz) = spin1_matrices();
        let lhs = commutator(&sx, &sy);
        let rhs = op3_scale(&sz, c64::new(0.0, 1.0));
        assert!(op3_distance(&lhs, &rhs) < 1e-15);
    }

    #[test]
    fn sx_top_eigenvector() {
        let (sx, _, _) = spin1_matrices();
        let v = [0.5, FRAC_1_SQRT_2, 0.5];
        for (i, row) in sx.iter().enumerate() {
            let out: f64 = row.iter().zip(v).map(|(m, x)| m.re * x).sum();
            assert!((out - v[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn z_rotation_matches_table() {
        let omega = 0.83;
        let m = rotation_matrix(&SelectiveRotation::z(omega, 1, Transition::Upper)).unwrap();
        assert!((m[0][0] - c64::cis(-omega / 2.0)).norm() < 1e-15);
        assert!((m[1][1] - c64::cis(omega / 2.0)).norm() < 1e-15);
        assert_eq!(m[2][2], c64::new(1.0, 0.0));

        let full = rotation_matrix(&SelectiveRotation::z(2.0 * PI, 1, Transition::Upper)).unwrap();
        let mut expected = op3_identity();
        expected[0][0] = c64::new(-1.0, 0.0);
        expected[1][1] = c64::new(-1.0, 0.0);
        assert!(op3_distance(&full, &expected) < 1e-15);
    }

    #[test]
    fn y_pi_moves_middle_level_down() {
        let m = rotation_matrix(&SelectiveRotation::y(PI, 2, Transition::Lower)).unwrap();
        // column 1 is the image of (0, 1, 0)
        assert!(m[0][1].norm() < 1e-15);
        assert!(m[1][1].norm() < 1e-15);
        assert!((m[2][1] - c64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_finite_angle() {
        assert!(rotation_matrix(&SelectiveRotation::x(f64::NAN, 1, Transition::Upper)).is_err());
        assert!("13".parse::<Transition>().is_err());
    }

    #[test]
    fn composite_z_reproduces_direct_z() {
        for theta in [0.0, PI, -1.3, 5.7] {
            for t in Transition::BOTH {
                let composed = sequence_matrix(&composite_z(theta, 1, t)).unwrap();
                let direct = rotation_matrix(&SelectiveRotation::z(theta, 1, t)).unwrap();
                assert!(op3_distance_up_to_phase(&composed, &direct) < 1e-12);
            }
        }
        let zero = sequence_matrix(&composite_z(0.0, 1, Transition::Upper)).unwrap();
        assert!(op3_distance(&zero, &op3_identity()) < 1e-15);
    }

    #[test]
    fn composite_z_inverse() {
        let theta = 0.77;
        let mut seq = composite_z(theta, 1, Transition::Lower).to_vec();
        seq.extend(composite_z(-theta, 1, Transition::Lower));
        let m = sequence_matrix(&seq).unwrap();
        assert!(op3_distance_up_to_phase(&m, &op3_identity()) < 1e-14);
    }

    #[test]
    fn inversion_flips_sz() {
        let (_, _, sz) = spin1_matrices();
        let (p, p_inv) = inversion_pair(3);
        let p = sequence_matrix(&p).unwrap();
        let p_inv = sequence_matrix(&p_inv).unwrap();
        assert!(op3_distance(&op3_mul(&p_inv, &p), &op3_identity()) < 1e-15);
        assert!(op3_distance(&p_inv, &op3_adjoint(&p)) < 1e-15);

        let flipped = op3_mul(&p_inv, &op3_mul(&sz, &p));
        assert!(op3_distance(&flipped, &op3_scale(&sz, c64::new(-1.0, 0.0))) < 1e-15);

        let sz2 = op3_mul(&sz, &sz);
        let conj2 = op3_mul(&p_inv, &op3_mul(&sz2, &p));
        assert!(op3_distance(&conj2, &sz2) < 1e-15);
    }
}
