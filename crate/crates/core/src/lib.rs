//! Deterministic 2-D simulation of a quasi-direct-drive two-fingered robotic
//! hand.
//!
//! The crate models the full control pipeline of the hand — differential
//! belt/bevel transmission, joint- and Cartesian-space impedance control,
//! FOC-based torque control of the four BLDC motors — closed around a
//! fixed-step planar rigid-body world with penalty contact and regularized
//! Coulomb friction. A set of scripted manipulation scenarios (fingertip
//! stiffness sweep, disturbance grasp, form closure, smack-and-snatch,
//! in-hand rolling, palm regrasp, coin pick) run on top of the simulator and
//! evaluate quantitative pass/fail metrics.
//!
//! The crate is `no_std` (with `alloc`); all float math goes through `libm`
//! so results are bit-identical across platforms. Everything is advanced by
//! explicit ticks from a fixed seed: a run is a pure function of its
//! configuration.
//!
//! File I/O, the CLI, and plot generation live in the companion
//! `qddhand-cli` crate.

#![no_std]

extern crate alloc;

pub mod config;
pub mod foc;
pub mod impedance;
pub mod kinematics;
pub mod plant;
pub mod rng;
pub mod scenario;
pub mod sim;
pub mod telemetry;
pub mod transmission;




/// Vector in the plane (hand or world frame, meters or derived units).
pub type Vec2 = nalgebra::Vector2<f64>;
/// 2x2 matrix (transmission maps, Jacobians, gain matrices).
pub type Mat2 = nalgebra::Matrix2<f64>;
