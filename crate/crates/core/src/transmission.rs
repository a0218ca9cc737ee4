//! Differential drive train: maps between motor space and joint space.
//!
//! Each 2-DOF finger is driven by two motors through a belt reduction `n1`
//! into a differential bevel stage `n2`. Joint 1 is driven by the
//! *difference* of the two motor displacements and joint 2 by their *sum*:
//!
//! ```text
//! theta = [ 1/(2 n1)      -1/(2 n1)    ] q
//!         [ 1/(2 n1 n2)    1/(2 n1 n2) ]
//! ```
//!
//! Torques map through the transpose of that matrix (motor torques from
//! joint torques), so mechanical power is conserved exactly:
//! `tau_q . q_dot == tau_theta . theta_dot`.

use crate::{Mat2, Vec2};

/// Reduction ratios of the belt stage (`n1`) and bevel stage (`n2`).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TransmissionParams {
    /// Belt reduction, motor to differential input.
    pub n1: f64,
    /// Bevel gear reduction of the second joint.
    pub n2: f64,
}

impl Default for TransmissionParams {
    fn default() -> Self {
        Self { n1: 2.57, n2: 1.0 }
    }
}

impl TransmissionParams {
    /// Ratios must be strictly positive for the maps to be invertible.
    pub fn validate(&self) -> Result<(), TransmissionError> {
        if !(self.n1 > 0.0) || !self.n1.is_finite() {
            return Err(TransmissionError::NonPositiveRatio { which: "n1", value: self.n1 });
        }
        if !(self.n2 > 0.0) || !self.n2.is_finite() {
            return Err(TransmissionError::NonPositiveRatio { which: "n2", value: self.n2 });
        }
        Ok(())
    }

    /// Matrix taking motor angles (or velocities) to joint angles.
    pub fn motor_to_joint_matrix(&self) -> Mat2 {
        let a = 1.0 / (2.0 * self.n1);
        let b = 1.0 / (2.0 * self.n1 * self.n2);
        Mat2::new(a, -a, b, b)
    }

    /// Matrix taking joint angles to motor angles (exact closed-form inverse).
    pub fn joint_to_motor_matrix(&self) -> Mat2 {
        let n1 = self.n1;
        let n12 = self.n1 * self.n2;
        Mat2::new(n1, n12, -n1, n12)
    }

    /// Matrix taking joint torques to the motor torques required to produce
    /// them. This is the transpose of [`Self::motor_to_joint_matrix`].
    pub fn joint_torque_to_motor_matrix(&self) -> Mat2 {
        let a = 1.0 / (2.0 * self.n1);
        let b = 1.0 / (2.0 * self.n1 * self.n2);
        Mat2::new(a, b, -a, b)
    }

    /// Matrix taking motor shaft torques to the joint torques they produce
    /// (exact closed-form inverse of [`Self::joint_torque_to_motor_matrix`]).
    pub fn motor_torque_to_joint_matrix(&self) -> Mat2 {
        let n1 = self.n1;
        let n12 = self.n1 * self.n2;
        Mat2::new(n1, -n1, n12, n12)
    }

    /// Map motor encoder state to joint state.
    pub fn motor_to_joint(&self, q: &MotorAngles) -> JointState {
        let m = self.motor_to_joint_matrix();
        JointState { pos: m * q.pos, vel: m * q.vel }
    }

    /// Map a joint state to the motor state realizing it. Used to initialize
    /// simulations at a desired finger pose.
    pub fn joint_to_motor(&self, j: &JointState) -> MotorAngles {
        let m = self.joint_to_motor_matrix();
        MotorAngles { pos: m * j.pos, vel: m * j.vel }
    }

    /// Convert commanded joint torques into the actuator torques that
    /// realize them. Saturation is applied downstream at the motors.
    pub fn joint_torque_to_motor_torque(&self, t: &JointTorques) -> MotorTorques {
        MotorTorques(self.joint_torque_to_motor_matrix() * t.0)
    }

    /// Joint torques produced by given motor shaft torques.
    pub fn motor_torque_to_joint_torque(&self, t: &MotorTorques) -> JointTorques {
        JointTorques(self.motor_torque_to_joint_matrix() * t.0)
    }
}

/// Angles and velocities of one finger's motor pair, radians at the shafts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MotorAngles {
    /// `(q1, q2)` in rad.
    pub pos: Vec2,
    /// `(q1_dot, q2_dot)` in rad/s.
    pub vel: Vec2,
}

/// Finger joint angles and velocities.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct JointState {
    /// `(theta1, theta2)` in rad.
    pub pos: Vec2,
    /// `(theta1_dot, theta2_dot)` in rad/s.
    pub vel: Vec2,
}

/// Torques at the finger joints, N·m.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct JointTorques(pub Vec2);

/// Torques at the motor shafts, N·m.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MotorTorques(pub Vec2);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransmissionError {
    NonPositiveRatio { which: &'static str, value: f64 },
}

impl core::fmt::Display for TransmissionError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::NonPositiveRatio { which, value } => {
                write!(f, "transmission ratio {which} must be > 0, got {value}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params() -> TransmissionParams {
        TransmissionParams::default()
    }

    // Independent straight-line evaluation of the published maps, kept
    // separate from the Matrix2 implementation path.
    fn oracle_motor_to_joint(q1: f64, q2: f64, n1: f64, n2: f64) -> (f64, f64) {
        ((q1 - q2) / (2.0 * n1), (q1 + q2) / (2.0 * n1 * n2))
    }

    fn oracle_joint_torque_to_motor(t1: f64, t2: f64, n1: f64, n2: f64) -> (f64, f64) {
        (
            t1 / (2.0 * n1) + t2 / (2.0 * n1 * n2),
            -t1 / (2.0 * n1) + t2 / (2.0 * n1 * n2),
        )
    }

    #[test]
    fn zero_motor_angles_give_zero_joints() {
        let j = params().motor_to_joint(&MotorAngles::default());
        assert_eq!(j.pos, Vec2::zeros());
        assert_eq!(j.vel, Vec2::zeros());
    }

    #[test]
    fn motor_to_joint_matches_direct_evaluation() {
        // Frozen from the oracle: (5.14 - (-5.14)) / (2 * 2.57) = 2.0 exactly
        // in the first joint, zero in the second.
        let p = params();
        let q = MotorAngles { pos: Vec2::new(5.14, -5.14), vel: Vec2::zeros() };
        let j = p.motor_to_joint(&q);
        let (o1, o2) = oracle_motor_to_joint(5.14, -5.14, 2.57, 1.0);
        assert_abs_diff_eq!(o1, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(o2, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(j.pos.x, o1, epsilon = 1e-15);
        assert_abs_diff_eq!(j.pos.y, o2, epsilon = 1e-15);

        // Common-mode drive moves only the second joint: q = (5.14, 5.14)
        // yields theta = (0, 2) for n1 = 2.57, n2 = 1.
        let q = MotorAngles { pos: Vec2::new(5.14, 5.14), vel: Vec2::zeros() };
        let j = p.motor_to_joint(&q);
        assert_abs_diff_eq!(j.pos.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.pos.y, 2.0, epsilon = 1e-12);

        // Unit-joint motor angles: theta = (1, 0) needs q = (2.57, -2.57).
        let q = MotorAngles { pos: Vec2::new(2.57, -2.57), vel: Vec2::zeros() };
        let j = p.motor_to_joint(&q);
        assert_abs_diff_eq!(j.pos.x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(j.pos.y, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn joint_to_motor_is_exact_inverse() {
        let p = params();
        let j = JointState { pos: Vec2::new(1.0, 0.0), vel: Vec2::zeros() };
        let q = p.joint_to_motor(&j);
        assert_abs_diff_eq!(q.pos.x, 2.57, epsilon = 1e-12);
        assert_abs_diff_eq!(q.pos.y, -2.57, epsilon = 1e-12);
    }

    #[test]
    fn joint_torque_map_matches_direct_evaluation() {
        // tau_theta = (1, 0) N·m with n1 = 2.57:
        // tau_q = (1/5.14, -1/5.14) = (0.19455..., -0.19455...) N·m.
        let p = params();
        let t = p.joint_torque_to_motor_torque(&JointTorques(Vec2::new(1.0, 0.0)));
        let (o1, o2) = oracle_joint_torque_to_motor(1.0, 0.0, 2.57, 1.0);
        assert_abs_diff_eq!(o1, 0.194_552_529_182_879_4, epsilon = 1e-15);
        assert_abs_diff_eq!(t.0.x, o1, epsilon = 1e-15);
        assert_abs_diff_eq!(t.0.y, o2, epsilon = 1e-15);
    }

    #[test]
    fn motor_torque_map_is_exact_inverse() {
        let p = params();
        let tq = MotorTorques(Vec2::new(0.194_552_529_182_879_4, -0.194_552_529_182_879_4));
        let tt = p.motor_torque_to_joint_torque(&tq);
        assert_abs_diff_eq!(tt.0.x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tt.0.y, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn angle_and_torque_matrices_are_exact_transposes() {
        // Entrywise bit-exact: both matrices are built from the same two
        // quotients.
        let p = params();
        let m1 = p.motor_to_joint_matrix();
        let m5 = p.joint_torque_to_motor_matrix();
        let m1t = m1.transpose();
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(m1t[(r, c)], m5[(r, c)]);
            }
        }
    }

    #[test]
    fn validate_rejects_bad_ratios() {
        assert!(TransmissionParams { n1: 0.0, n2: 1.0 }.validate().is_err());
        assert!(TransmissionParams { n1: 2.57, n2: -1.0 }.validate().is_err());
        assert!(TransmissionParams { n1: f64::NAN, n2: 1.0 }.validate().is_err());
        assert!(params().validate().is_ok());
    }

    proptest! {
        #[test]
        fn round_trip_recovers_joint_state(
            t1 in -3.0f64..3.0, t2 in -3.0f64..3.0,
            w1 in -50.0f64..50.0, w2 in -50.0f64..50.0,
            n1 in 0.5f64..10.0, n2 in 0.5f64..4.0,
        ) {
            let p = TransmissionParams { n1, n2 };
            let j = JointState { pos: Vec2::new(t1, t2), vel: Vec2::new(w1, w2) };
            let back = p.motor_to_joint(&p.joint_to_motor(&j));
            prop_assert!((back.pos - j.pos).norm() < 1e-12);
            prop_assert!((back.vel - j.vel).norm() < 1e-12);
        }

        #[test]
        fn power_is_conserved_across_the_transmission(
            t1 in -5.0f64..5.0, t2 in -5.0f64..5.0,
            q1 in -100.0f64..100.0, q2 in -100.0f64..100.0,
            n1 in 0.5f64..10.0, n2 in 0.5f64..4.0,
        ) {
            let p = TransmissionParams { n1, n2 };
            let tau_theta = Vec2::new(t1, t2);
            let qdot = Vec2::new(q1, q2);
            let tau_q = p.joint_torque_to_motor_torque(&JointTorques(tau_theta)).0;
            let theta_dot = p.motor_to_joint_matrix() * qdot;
            let motor_power = tau_q.dot(&qdot);
            let joint_power = tau_theta.dot(&theta_dot);
            prop_assert!((motor_power - joint_power).abs() < 1e-12);
        }
    }
}
