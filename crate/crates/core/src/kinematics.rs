//! Planar finger kinematics: forward kinematics, Jacobians, joint limits.
//!
//! Each finger is a 2-link planar chain mounted on the hand. Joint angle
//! conventions: `theta1` is measured from the hand's inward-facing axis
//! (the axis pointing across the palm gap toward the opposing finger),
//! positive rotation closing the finger; `theta2` is the bend of the distal
//! link relative to the proximal one, positive curling inward. One finger is
//! built mirrored so that equal joint angles produce a mirror-symmetric
//! grasp about the palm center line.

use crate::{Mat2, Vec2};

/// Rotate a vector by 90 degrees counterclockwise.
#[inline]
pub fn perp(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// Geometry and mounting of one finger in the hand frame.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FingerGeometry {
    /// Proximal link length, m.
    pub l1: f64,
    /// Distal link length, m.
    pub l2: f64,
    /// Finger base (joint 1 axis) in the hand frame, m.
    pub base: Vec2,
    /// Extra rotation of the finger frame within the hand frame, rad.
    pub mount_angle: f64,
    /// Mirrored fingers curl the opposite way so the two-finger grasp is
    /// symmetric under equal joint angles.
    pub mirrored: bool,
    /// Joint 1 travel, rad.
    pub theta1_limits: (f64, f64),
    /// Joint 2 travel, rad.
    pub theta2_limits: (f64, f64),
}

impl FingerGeometry {
    /// Default geometry: total finger length 105.31 mm split 55.31/50.00,
    /// joint 1 in [-90 deg, 90 deg] and joint 2 in [0 deg, 135 deg].
    pub fn with_base(base: Vec2, mirrored: bool) -> Self {
        Self {
            l1: 0.05531,
            l2: 0.05,
            base,
            mount_angle: 0.0,
            mirrored,
            theta1_limits: (-core::f64::consts::FRAC_PI_2, core::f64::consts::FRAC_PI_2),
            theta2_limits: (0.0, 135.0 * core::f64::consts::PI / 180.0),
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.l1 > 0.0 && self.l2 > 0.0) {
            return Err(GeometryError::NonPositiveLink { l1: self.l1, l2: self.l2 });
        }
        if self.theta1_limits.0 >= self.theta1_limits.1
            || self.theta2_limits.0 >= self.theta2_limits.1
        {
            return Err(GeometryError::EmptyJointRange);
        }
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.l1 + self.l2
    }

    #[inline]
    fn chirality(&self) -> f64 {
        if self.mirrored {
            -1.0
        } else {
            1.0
        }
    }

    /// Map a point from the finger's local (unmirrored) frame to the hand
    /// frame.
    #[inline]
    fn to_hand(&self, p_local: Vec2) -> Vec2 {
        let p = if self.mirrored { Vec2::new(-p_local.x, p_local.y) } else { p_local };
        let (s, c) = libm::sincos(self.mount_angle);
        self.base + Vec2::new(c * p.x - s * p.y, s * p.x + c * p.y)
    }

    /// Rotate a local-frame direction/Jacobian column into the hand frame.
    #[inline]
    fn dir_to_hand(&self, d_local: Vec2) -> Vec2 {
        let d = if self.mirrored { Vec2::new(-d_local.x, d_local.y) } else { d_local };
        let (s, c) = libm::sincos(self.mount_angle);
        Vec2::new(c * d.x - s * d.y, s * d.x + c * d.y)
    }

    /// Fingertip position in the hand frame.
    pub fn fingertip(&self, theta: Vec2) -> Vec2 {
        let (s1, c1) = libm::sincos(theta.x);
        let (s12, c12) = libm::sincos(theta.x + theta.y);
        self.to_hand(Vec2::new(
            self.l1 * c1 + self.l2 * c12,
            self.l1 * s1 + self.l2 * s12,
        ))
    }

    /// Positions of joint 1, joint 2, and the fingertip in the hand frame.
    /// The two finger links are the segments between consecutive points.
    pub fn joint_points(&self, theta: Vec2) -> [Vec2; 3] {
        let (s1, c1) = libm::sincos(theta.x);
        let (s12, c12) = libm::sincos(theta.x + theta.y);
        let knuckle = Vec2::new(self.l1 * c1, self.l1 * s1);
        let tip = knuckle + Vec2::new(self.l2 * c12, self.l2 * s12);
        [self.to_hand(Vec2::zeros()), self.to_hand(knuckle), self.to_hand(tip)]
    }

    /// Analytic fingertip Jacobian in the hand frame, `x_dot = J theta_dot`.
    ///
    /// Singular exactly when `theta2` is 0 or pi; the map itself stays
    /// well-defined there (callers that only use `J^T` never invert it, but
    /// force transmission degenerates along the lost direction).
    pub fn jacobian(&self, theta: Vec2) -> Mat2 {
        let (s1, c1) = libm::sincos(theta.x);
        let (s12, c12) = libm::sincos(theta.x + theta.y);
        let j11 = -(self.l1 * s1 + self.l2 * s12);
        let j12 = -self.l2 * s12;
        let j21 = self.l1 * c1 + self.l2 * c12;
        let j22 = self.l2 * c12;
        let c0 = self.dir_to_hand(Vec2::new(j11, j21));
        let c1 = self.dir_to_hand(Vec2::new(j12, j22));
        Mat2::new(c0.x, c1.x, c0.y, c1.y)
    }

    /// Jacobian of an arbitrary material point `p` (hand frame) attached to
    /// `link` (0 = proximal, 1 = distal), given the joint positions for the
    /// same `theta`. Columns are the classic `z x r` geometric terms with the
    /// chirality sign folded in.
    pub fn point_jacobian(&self, joints: &[Vec2; 3], link: usize, p: Vec2) -> Mat2 {
        let s = self.chirality();
        let c0 = perp(p - joints[0]) * s;
        let c1 = if link == 1 { perp(p - joints[1]) * s } else { Vec2::zeros() };
        Mat2::new(c0.x, c1.x, c0.y, c1.y)
    }

    /// Inverse kinematics for a hand-frame fingertip target. Returns the
    /// inward-elbow solution clamped to the joint limits, or `None` when the
    /// target is outside the annular reachable set. Intended for scenario
    /// initialization, not control.
    pub fn ik(&self, target: Vec2) -> Option<Vec2> {
        // Undo mounting and mirroring to work in the local frame.
        let rel = target - self.base;
        let (s, c) = libm::sincos(-self.mount_angle);
        let mut p = Vec2::new(c * rel.x - s * rel.y, s * rel.x + c * rel.y);
        if self.mirrored {
            p.x = -p.x;
        }
        let d2 = p.norm_squared();
        let reach = self.l1 + self.l2;
        let inner = libm::fabs(self.l1 - self.l2);
        if d2 > reach * reach || d2 < inner * inner {
            return None;
        }
        let cos_t2 = (d2 - self.l1 * self.l1 - self.l2 * self.l2) / (2.0 * self.l1 * self.l2);
        let t2 = libm::acos(cos_t2.clamp(-1.0, 1.0));
        let k1 = self.l1 + self.l2 * libm::cos(t2);
        let k2 = self.l2 * libm::sin(t2);
        let t1 = libm::atan2(p.y, p.x) - libm::atan2(k2, k1);
        Some(Vec2::new(
            t1.clamp(self.theta1_limits.0, self.theta1_limits.1),
            t2.clamp(self.theta2_limits.0, self.theta2_limits.1),
        ))
    }

    /// True if both joints are inside their configured travel.
    pub fn within_limits(&self, theta: Vec2) -> bool {
        theta.x >= self.theta1_limits.0
            && theta.x <= self.theta1_limits.1
            && theta.y >= self.theta2_limits.0
            && theta.y <= self.theta2_limits.1
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeometryError {
    NonPositiveLink { l1: f64, l2: f64 },
    EmptyJointRange,
}

impl core::fmt::Display for GeometryError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::NonPositiveLink { l1, l2 } => {
                write!(f, "link lengths must be > 0, got l1={l1}, l2={l2}")
            }
            Self::EmptyJointRange => write!(f, "joint limit range is empty"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn finger() -> FingerGeometry {
        FingerGeometry::with_base(Vec2::new(-0.06, 0.0), false)
    }

    // Central-difference Jacobian of the forward kinematics, the
    // independent oracle for the analytic expression.
    fn fd_jacobian(g: &FingerGeometry, theta: Vec2, h: f64) -> Mat2 {
        let mut m = Mat2::zeros();
        for col in 0..2 {
            let mut tp = theta;
            let mut tm = theta;
            tp[col] += h;
            tm[col] -= h;
            let d = (g.fingertip(tp) - g.fingertip(tm)) / (2.0 * h);
            m[(0, col)] = d.x;
            m[(1, col)] = d.y;
        }
        m
    }

    #[test]
    fn straight_finger_reaches_full_length() {
        let g = finger();
        let tip = g.fingertip(Vec2::zeros());
        assert_abs_diff_eq!((tip - g.base).norm(), 0.10531, epsilon = 1e-12);
        // theta1 = 0 points along the inward axis (+x for the unmirrored finger).
        assert_abs_diff_eq!(tip.x, -0.06 + 0.10531, epsilon = 1e-12);
        assert_abs_diff_eq!(tip.y, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn right_angle_bend_gives_pythagorean_reach() {
        let g = finger();
        let tip = g.fingertip(Vec2::new(0.0, core::f64::consts::FRAC_PI_2));
        let expected = libm::sqrt(g.l1 * g.l1 + g.l2 * g.l2);
        assert_abs_diff_eq!((tip - g.base).norm(), expected, epsilon = 1e-12);
    }

    #[test]
    fn mirrored_finger_is_exact_reflection() {
        let left = FingerGeometry::with_base(Vec2::new(-0.06, 0.0), false);
        let right = FingerGeometry::with_base(Vec2::new(0.06, 0.0), true);
        let theta = Vec2::new(-0.7, 1.1);
        let tl = left.fingertip(theta);
        let tr = right.fingertip(theta);
        assert_eq!(tl.x, -tr.x);
        assert_eq!(tl.y, tr.y);
    }

    #[test]
    fn straight_arm_is_singular() {
        let g = finger();
        let j = g.jacobian(Vec2::new(0.3, 0.0));
        assert_abs_diff_eq!(j.determinant(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn jacobian_matches_finite_differences_on_100_random_configs() {
        // Fixed multiplicative-congruential stream so the 100 samples are
        // stable; max abs entry error must stay under 1e-6 with step 1e-7.
        let g = finger();
        let mut x = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let t1 = -1.5 + 3.0 * next();
            let t2 = 0.05 + 2.2 * next();
            let theta = Vec2::new(t1, t2);
            let ja = g.jacobian(theta);
            let jn = fd_jacobian(&g, theta, 1e-7);
            for r in 0..2 {
                for c in 0..2 {
                    assert!(
                        (ja[(r, c)] - jn[(r, c)]).abs() < 1e-6,
                        "J mismatch at theta={theta:?}: analytic {} vs fd {}",
                        ja[(r, c)],
                        jn[(r, c)]
                    );
                }
            }
        }
    }

    #[test]
    fn velocity_map_matches_small_displacement() {
        let g = finger();
        let theta = Vec2::new(-0.6, 0.9);
        let theta_dot = Vec2::new(0.8, -0.5);
        let dt = 1e-8;
        let fd = (g.fingertip(theta + theta_dot * dt) - g.fingertip(theta)) / dt;
        let analytic = g.jacobian(theta) * theta_dot;
        assert!((fd - analytic).norm() < 1e-6);
    }

    #[test]
    fn point_jacobian_tip_matches_full_jacobian() {
        let g = finger();
        let theta = Vec2::new(-0.4, 1.0);
        let joints = g.joint_points(theta);
        let jp = g.point_jacobian(&joints, 1, joints[2]);
        let j = g.jacobian(theta);
        for r in 0..2 {
            for c in 0..2 {
                assert_abs_diff_eq!(jp[(r, c)], j[(r, c)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ik_round_trips_through_fk() {
        let g = finger();
        for &(t1, t2) in &[(-0.8, 0.9), (-0.2, 0.4), (0.5, 1.6), (-1.2, 2.0)] {
            let theta = Vec2::new(t1, t2);
            let tip = g.fingertip(theta);
            let sol = g.ik(tip).expect("reachable");
            assert!((g.fingertip(sol) - tip).norm() < 1e-9);
        }
        assert!(g.ik(Vec2::new(1.0, 1.0)).is_none());
    }

    proptest! {
        #[test]
        fn reachable_set_is_an_annulus(t1 in -1.5f64..1.5, t2 in 0.0f64..2.35) {
            let g = finger();
            let r = (g.fingertip(Vec2::new(t1, t2)) - g.base).norm();
            prop_assert!(r <= g.l1 + g.l2 + 1e-12);
            prop_assert!(r >= (g.l1 - g.l2).abs() - 1e-12);
        }
    }
}
