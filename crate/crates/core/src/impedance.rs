//! Outer-loop impedance control in joint space or Cartesian space.
//!
//! Both laws are pure spring-damper maps about a desired pose with no
//! inertia or gravity feedforward; the finger links are light enough that
//! those terms are neglected. The Cartesian law projects the virtual tip
//! force through the transposed Jacobian:
//!
//! ```text
//! tau_theta = J^T(theta) (K_C (x_d - x) - B_C x_dot)      (Cartesian)
//! tau_theta = K_theta (theta_d - theta) - B_theta theta_dot  (joint)
//! ```
//!
//! Gain changes are queued and drained at tick boundaries, so a controller
//! never evaluates a mixed old/new gain matrix.

use alloc::collections::VecDeque;

use crate::kinematics::FingerGeometry;
use crate::transmission::{JointState, JointTorques};
use crate::Vec2;

/// Virtual spring-damper about a desired fingertip position, hand frame.
/// Stiffness in N/m, damping in N·s/m. Zero entries are valid; a fully zero
/// gain set commands exactly zero torque.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CartesianGains {
    pub stiffness: Vec2,
    pub damping: Vec2,
    pub target: Vec2,
}

impl CartesianGains {
    pub fn new(k: Vec2, b: Vec2, target: Vec2) -> Self {
        Self { stiffness: k, damping: b, target }
    }

    /// Isotropic stiffness with near-critical damping for a nominal tip
    /// effective mass of 50 g.
    pub fn isotropic(k: f64, target: Vec2) -> Self {
        let b = 2.0 * libm::sqrt(k * 0.05);
        Self { stiffness: Vec2::new(k, k), damping: Vec2::new(b, b), target }
    }
}

/// Virtual spring-damper about desired joint angles. Stiffness in N·m/rad,
/// damping in N·m·s/rad.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointGains {
    pub stiffness: Vec2,
    pub damping: Vec2,
    pub target: Vec2,
}

impl JointGains {
    pub fn new(k: Vec2, b: Vec2, target: Vec2) -> Self {
        Self { stiffness: k, damping: b, target }
    }
}

/// One gain set, in whichever space is active.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ImpedanceCommand {
    Cartesian(CartesianGains),
    Joint(JointGains),
}

impl ImpedanceCommand {
    /// Gains must be non-negative and everything finite.
    pub fn validate(&self) -> Result<(), GainError> {
        let (k, b, t) = match self {
            Self::Cartesian(g) => (g.stiffness, g.damping, g.target),
            Self::Joint(g) => (g.stiffness, g.damping, g.target),
        };
        for (name, v) in [("stiffness", k), ("damping", b)] {
            if !(v.x >= 0.0 && v.y >= 0.0) || !v.x.is_finite() || !v.y.is_finite() {
                return Err(GainError::NegativeGain { which: name, x: v.x, y: v.y });
            }
        }
        if !t.x.is_finite() || !t.y.is_finite() {
            return Err(GainError::NonFiniteTarget { x: t.x, y: t.y });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GainError {
    NegativeGain { which: &'static str, x: f64, y: f64 },
    NonFiniteTarget { x: f64, y: f64 },
}

impl core::fmt::Display for GainError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::NegativeGain { which, x, y } => {
                write!(f, "impedance {which} must be >= 0 and finite, got ({x}, {y})")
            }
            Self::NonFiniteTarget { x, y } => write!(f, "impedance target not finite: ({x}, {y})"),
        }
    }
}

/// Cartesian-space impedance law. Well-defined at Jacobian singularities
/// (only `J^T` is used), though force transmission degenerates there.
pub fn cartesian_impedance(
    joint: &JointState,
    gains: &CartesianGains,
    geom: &FingerGeometry,
) -> JointTorques {
    let x = geom.fingertip(joint.pos);
    let j = geom.jacobian(joint.pos);
    let x_dot = j * joint.vel;
    let err = gains.target - x;
    let force = Vec2::new(
        gains.stiffness.x * err.x - gains.damping.x * x_dot.x,
        gains.stiffness.y * err.y - gains.damping.y * x_dot.y,
    );
    JointTorques(j.transpose() * force)
}

/// Joint-space impedance law.
pub fn joint_impedance(joint: &JointState, gains: &JointGains) -> JointTorques {
    let err = gains.target - joint.pos;
    JointTorques(Vec2::new(
        gains.stiffness.x * err.x - gains.damping.x * joint.vel.x,
        gains.stiffness.y * err.y - gains.damping.y * joint.vel.y,
    ))
}

/// Acknowledgement returned by [`ImpedanceController::set_gains`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainAck {
    /// Outer tick at which the new gains take effect.
    pub applies_at_tick: u64,
}

/// Per-finger outer-loop controller: holds the active gain set and a queue
/// of pending updates drained atomically at each tick boundary.
#[derive(Clone, Debug)]
pub struct ImpedanceController {
    active: ImpedanceCommand,
    pending: VecDeque<ImpedanceCommand>,
    ticks: u64,
}

impl ImpedanceController {
    pub fn new(initial: ImpedanceCommand) -> Result<Self, GainError> {
        initial.validate()?;
        Ok(Self { active: initial, pending: VecDeque::new(), ticks: 0 })
    }

    /// Queue a gain change; it takes effect at the start of the next tick.
    pub fn set_gains(&mut self, cmd: ImpedanceCommand) -> Result<GainAck, GainError> {
        cmd.validate()?;
        self.pending.push_back(cmd);
        Ok(GainAck { applies_at_tick: self.ticks + 1 })
    }

    /// Gain set the controller is currently evaluating.
    pub fn active(&self) -> &ImpedanceCommand {
        &self.active
    }

    /// Outer ticks executed so far.
    pub fn ticks(&self) -> u64 {
        self.ticks
    }

    /// Convenience view of the active Cartesian target, if in Cartesian mode.
    pub fn cartesian_target(&self) -> Option<Vec2> {
        match &self.active {
            ImpedanceCommand::Cartesian(g) => Some(g.target),
            ImpedanceCommand::Joint(_) => None,
        }
    }

    /// Run one outer tick: drain pending gain updates, then evaluate the
    /// active law on the measured joint state.
    pub fn tick(&mut self, joint: &JointState, geom: &FingerGeometry) -> JointTorques {
        while let Some(cmd) = self.pending.pop_front() {
            self.active = cmd;
        }
        self.ticks += 1;
        match &self.active {
            ImpedanceCommand::Cartesian(g) => cartesian_impedance(joint, g, geom),
            ImpedanceCommand::Joint(g) => joint_impedance(joint, g),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn geom() -> FingerGeometry {
        FingerGeometry::with_base(Vec2::new(-0.06, 0.0), false)
    }

    fn state(t1: f64, t2: f64) -> JointState {
        JointState { pos: Vec2::new(t1, t2), vel: Vec2::zeros() }
    }

    #[test]
    fn cartesian_equilibrium_commands_zero_torque() {
        let g = geom();
        let joint = state(-0.5, 0.8);
        let gains = CartesianGains::isotropic(100.0, g.fingertip(joint.pos));
        let tau = cartesian_impedance(&joint, &gains, &g);
        assert!(tau.0.norm() < 1e-14);
    }

    #[test]
    fn one_newton_per_cm_displacement_gives_one_newton() {
        // k = 100 N/m (1 N/cm) with a 1 cm error commands a 1 N virtual tip
        // force before the J^T projection.
        let g = geom();
        let joint = state(-0.5, 0.8);
        let x = g.fingertip(joint.pos);
        let gains = CartesianGains::new(
            Vec2::new(100.0, 100.0),
            Vec2::zeros(),
            x + Vec2::new(0.0, 0.01),
        );
        let err = gains.target - x;
        let force = Vec2::new(gains.stiffness.x * err.x, gains.stiffness.y * err.y);
        assert_abs_diff_eq!(force.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(force.y, 1.0, epsilon = 1e-12);
        // And the produced joint torques are exactly J^T * force.
        let tau = cartesian_impedance(&joint, &gains, &g);
        let expected = g.jacobian(joint.pos).transpose() * force;
        assert!((tau.0 - expected).norm() < 1e-14);
    }

    #[test]
    fn cartesian_law_matches_independent_evaluation() {
        // Straight-line re-evaluation of J^T K (x_d - x) without the
        // controller code path.
        let g = geom();
        let mut x = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let joint = state(-1.4 + 2.8 * next(), 0.05 + 2.2 * next());
            let target = Vec2::new(-0.1 + 0.2 * next(), -0.12 + 0.1 * next());
            let k = Vec2::new(50.0 + 300.0 * next(), 50.0 + 300.0 * next());
            let gains = CartesianGains::new(k, Vec2::zeros(), target);
            let tau = cartesian_impedance(&joint, &gains, &g);

            let tip = g.fingertip(joint.pos);
            let f = Vec2::new(k.x * (target.x - tip.x), k.y * (target.y - tip.y));
            let j = g.jacobian(joint.pos);
            let expected = Vec2::new(
                j[(0, 0)] * f.x + j[(1, 0)] * f.y,
                j[(0, 1)] * f.x + j[(1, 1)] * f.y,
            );
            assert!((tau.0 - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn torque_is_linear_in_displacement() {
        let g = geom();
        let joint = state(-0.6, 1.0);
        let x = g.fingertip(joint.pos);
        let g1 = CartesianGains::new(Vec2::new(120.0, 80.0), Vec2::zeros(), x + Vec2::new(0.004, -0.007));
        let g2 = CartesianGains::new(Vec2::new(120.0, 80.0), Vec2::zeros(), x + Vec2::new(0.008, -0.014));
        let t1 = cartesian_impedance(&joint, &g1, &g);
        let t2 = cartesian_impedance(&joint, &g2, &g);
        assert!((t2.0 - t1.0 * 2.0).norm() < 1e-12);
    }

    #[test]
    fn joint_impedance_frozen_example() {
        // K = diag(0.5, 0.5) N·m/rad, error (0.2, -0.1) rad: tau = (0.1, -0.05).
        let gains = JointGains::new(
            Vec2::new(0.5, 0.5),
            Vec2::zeros(),
            Vec2::new(0.2, -0.1),
        );
        let tau = joint_impedance(&state(0.0, 0.0), &gains);
        assert_abs_diff_eq!(tau.0.x, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(tau.0.y, -0.05, epsilon = 1e-15);
        // At the target with zero velocity the torque vanishes.
        let at_target = JointState { pos: gains.target, vel: Vec2::zeros() };
        assert_eq!(joint_impedance(&at_target, &gains).0, Vec2::zeros());
    }

    #[test]
    fn pure_damping_opposes_velocity_componentwise() {
        let gains = JointGains::new(Vec2::zeros(), Vec2::new(0.02, 0.03), Vec2::zeros());
        let joint = JointState { pos: Vec2::new(0.3, 0.4), vel: Vec2::new(1.5, -2.0) };
        let tau = joint_impedance(&joint, &gains);
        assert!(tau.0.x < 0.0 && tau.0.y > 0.0);
        assert_abs_diff_eq!(tau.0.x, -0.03, epsilon = 1e-15);
        assert_abs_diff_eq!(tau.0.y, 0.06, epsilon = 1e-15);
    }

    #[test]
    fn zero_gain_set_commands_exactly_zero_torque() {
        let g = geom();
        let gains = CartesianGains::new(Vec2::zeros(), Vec2::zeros(), Vec2::new(0.5, 0.5));
        let joint = JointState { pos: Vec2::new(-0.9, 1.3), vel: Vec2::new(4.0, -6.0) };
        let tau = cartesian_impedance(&joint, &gains, &g);
        assert_eq!(tau.0, Vec2::zeros());
    }

    #[test]
    fn set_gains_rejects_negative_stiffness() {
        let mut c = ImpedanceController::new(ImpedanceCommand::Joint(JointGains::new(
            Vec2::zeros(),
            Vec2::zeros(),
            Vec2::zeros(),
        )))
        .unwrap();
        let bad = ImpedanceCommand::Cartesian(CartesianGains::new(
            Vec2::new(-1.0, 100.0),
            Vec2::zeros(),
            Vec2::zeros(),
        ));
        assert!(matches!(c.set_gains(bad), Err(GainError::NegativeGain { .. })));
    }

    #[test]
    fn gain_switch_takes_effect_only_at_next_tick() {
        let g = geom();
        let joint = state(-0.5, 0.8);
        let x = g.fingertip(joint.pos);
        let zero = ImpedanceCommand::Cartesian(CartesianGains::new(
            Vec2::zeros(),
            Vec2::zeros(),
            x + Vec2::new(0.0, 0.02),
        ));
        let stiff = ImpedanceCommand::Cartesian(CartesianGains::new(
            Vec2::new(200.0, 200.0),
            Vec2::zeros(),
            x + Vec2::new(0.0, 0.02),
        ));
        let mut c = ImpedanceController::new(zero).unwrap();
        assert_eq!(c.tick(&joint, &g).0, Vec2::zeros());
        let ack = c.set_gains(stiff).unwrap();
        assert_eq!(ack.applies_at_tick, 2);
        // Active gains are still the old ones until the next tick runs.
        assert!(matches!(c.active(), ImpedanceCommand::Cartesian(g) if g.stiffness == Vec2::zeros()));
        let tau = c.tick(&joint, &g);
        assert!(tau.0.norm() > 1e-6);
    }

    #[test]
    fn halving_normal_stiffness_halves_normal_force() {
        let g = geom();
        let joint = state(-0.5, 0.9);
        let x = g.fingertip(joint.pos);
        let target = x + Vec2::new(0.015, 0.0);
        let full = CartesianGains::new(Vec2::new(300.0, 300.0), Vec2::zeros(), target);
        let half = CartesianGains::new(Vec2::new(150.0, 300.0), Vec2::zeros(), target);
        let tf = cartesian_impedance(&joint, &full, &g);
        let th = cartesian_impedance(&joint, &half, &g);
        // Same displacement, x-direction force halves, so torques halve.
        assert!((th.0 - tf.0 * 0.5).norm() < 1e-12);
    }
}
