//! Force calibration: solve the motor current limit at which the static
//! fingertip force at the reference pose equals the rated value.
//!
//! Statics: a fingertip force `F d` needs joint torques `tau_theta = J^T F d`
//! and motor torques `tau_q` through the torque transmission; the first
//! motor to hit its limit caps the force. Inverting that cap for the rated
//! force gives the current limit.

use alloc::format;
use alloc::string::String;
use alloc::vec;

use crate::config::SimConfig;
use crate::telemetry::Telemetry;
use crate::transmission::JointTorques;
use crate::Vec2;

use super::{Criterion, Metric, ScenarioError, ScenarioOutcome};

/// Result of the statics solve.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CalibrationReport {
    /// Solved phase current limit, A.
    pub i_max: f64,
    /// Corresponding per-motor torque limit, N·m.
    pub torque_limit: f64,
    /// Which motor saturates first (0 or 1).
    pub binding_motor: usize,
    /// Motor torques needed for the target force, N·m.
    pub motor_torques: [f64; 2],
    /// Joint torques needed for the target force, N·m.
    pub joint_torques: [f64; 2],
    /// Force the calibrated limit supports at the reference pose, N.
    pub predicted_force: f64,
    /// Steady-state q-axis voltage at the calibrated current, V.
    pub voltage_needed: f64,
    /// Inverter voltage budget, V.
    pub voltage_limit: f64,
    /// False when the calibrated current cannot be driven within the
    /// voltage budget; `voltage_needed` then names the binding constraint.
    pub feasible: bool,
}

/// Solve the current limit for the configured target force.
pub fn calibrate(config: &SimConfig) -> Result<CalibrationReport, ScenarioError> {
    config.validate().map_err(|e| {
        ScenarioError::Sim(crate::sim::SimError::Config(e))
    })?;
    let cal = config.scenario.calibration;
    let d2r = core::f64::consts::PI / 180.0;
    let theta = Vec2::new(cal.reference_pose_deg[0] * d2r, cal.reference_pose_deg[1] * d2r);
    let dir = Vec2::new(cal.direction[0], cal.direction[1]);
    let dir = dir / dir.norm();
    let geom = config.hand.finger_geometry(0);

    let tau_theta = geom.jacobian(theta).transpose() * (dir * cal.target_force);
    let tau_q = config
        .transmission
        .joint_torque_to_motor_torque(&JointTorques(tau_theta));
    let (binding_motor, torque_limit) = if libm::fabs(tau_q.0.x) >= libm::fabs(tau_q.0.y) {
        (0, libm::fabs(tau_q.0.x))
    } else {
        (1, libm::fabs(tau_q.0.y))
    };
    let kt = config.motor.torque_constant();
    let i_max = torque_limit / kt;
    // Static feasibility: at stall the q voltage is purely resistive.
    let voltage_needed = config.motor.resistance * i_max;
    let voltage_limit = config.motor.voltage_limit();

    Ok(CalibrationReport {
        i_max,
        torque_limit,
        binding_motor,
        motor_torques: [tau_q.0.x, tau_q.0.y],
        joint_torques: [tau_theta.x, tau_theta.y],
        predicted_force: cal.target_force,
        voltage_needed,
        voltage_limit,
        feasible: voltage_needed <= voltage_limit,
    })
}

/// Scenario wrapper: runs the solve and re-derives the force from the
/// calibrated limit as an independent check.
pub fn run(config: &SimConfig, seed: u64) -> Result<ScenarioOutcome, ScenarioError> {
    let report = calibrate(config)?;
    let cal = config.scenario.calibration;

    // Independent re-derivation: with every motor clamped to the calibrated
    // limit, the supportable force along the direction is limited by the
    // binding motor. It must reproduce the target.
    let d2r = core::f64::consts::PI / 180.0;
    let theta = Vec2::new(cal.reference_pose_deg[0] * d2r, cal.reference_pose_deg[1] * d2r);
    let dir = Vec2::new(cal.direction[0], cal.direction[1]);
    let dir = dir / dir.norm();
    let geom = config.hand.finger_geometry(0);
    let tau_theta_unit = geom.jacobian(theta).transpose() * dir;
    let tau_q_unit = config
        .transmission
        .joint_torque_to_motor_torque(&JointTorques(tau_theta_unit));
    let per_newton = libm::fabs(tau_q_unit.0.x).max(libm::fabs(tau_q_unit.0.y));
    let supported_force = report.torque_limit / per_newton;

    // Statics residual: joint torques recovered from the saturated motor
    // torques must match the J^T-projected load.
    let tau_q_at_force = config
        .transmission
        .joint_torque_to_motor_torque(&JointTorques(Vec2::new(
            report.joint_torques[0],
            report.joint_torques[1],
        )));
    let back = config
        .transmission
        .motor_torque_to_joint_torque(&tau_q_at_force);
    let residual = (back.0 - Vec2::new(report.joint_torques[0], report.joint_torques[1])).norm();

    let metrics = vec![
        Metric::new(
            "calibrated_i_max_a",
            report.i_max,
            Criterion::Within(0.0, 1e3),
        )
        .with_note(format!(
            "torque limit {:.6} N·m, binding motor {}",
            report.torque_limit, report.binding_motor
        )),
        Metric::new(
            "supported_force_n",
            supported_force,
            Criterion::Within(cal.target_force - 0.1, cal.target_force + 0.1),
        ),
        Metric::new("statics_residual", residual, Criterion::AtMost(1e-6)),
        Metric::boolean("voltage_feasible", report.feasible).with_note(format!(
            "needs {:.3} V of {:.3} V",
            report.voltage_needed, report.voltage_limit
        )),
    ];

    Ok(ScenarioOutcome {
        scenario: String::from("calibration"),
        seed,
        metrics,
        telemetry: Telemetry::default(),
    })
}
