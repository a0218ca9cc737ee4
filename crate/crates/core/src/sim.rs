//! The assembled simulator: two impedance controllers, four FOC motor
//! drives, the differential transmissions, and the rigid-body world, all
//! advanced on the two-rate tick structure.
//!
//! One outer tick runs the impedance law once, then `inner_per_outer` FOC
//! ticks, each of which integrates `phys_per_inner` coupled
//! electrical/mechanical steps. Tick counters are kept so the rate contract
//! is checkable from outside.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::config::SimConfig;
use crate::foc::{Dq, EncoderReading, EncoderState, MotorSim, TorqueController};
use crate::impedance::{GainAck, GainError, ImpedanceCommand, ImpedanceController};
use crate::plant::shape::Pose2;
use crate::plant::{FingerBody, Hand, World, WorldError};
use crate::rng::NoiseStream;
use crate::telemetry::{ContactRow, FingerFrame, MotorFrame, ObjectFrame, TelemetryFrame};
use crate::transmission::{JointState, JointTorques, MotorAngles, MotorTorques};
use crate::Vec2;

/// Everything attached to one physical motor.
#[derive(Clone, Debug)]
struct MotorDrive {
    motor: MotorSim,
    controller: TorqueController,
    encoder: EncoderState,
    reading: EncoderReading,
    latched: Dq,
}

/// Piecewise hand-base motion. Profiles compose additively.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MotionProfile {
    /// Trapezoidal out-and-back along a direction: accelerate to `speed`,
    /// cruise, decelerate to stop at `depth`, and come straight back. There
    /// is no dwell at the turnaround.
    OutAndBack { direction: Vec2, speed: f64, accel: f64, depth: f64, t_start: f64 },
    /// Smoothstep translation by `offset` over `[t_start, t_start+duration]`.
    Translate { offset: Vec2, t_start: f64, duration: f64 },
}

impl MotionProfile {
    /// Offset from the profile's origin at time `t`.
    pub fn offset(&self, t: f64) -> Vec2 {
        match *self {
            MotionProfile::OutAndBack { direction, speed, accel, depth, t_start } => {
                direction * out_and_back_distance(t - t_start, speed, accel, depth)
            }
            MotionProfile::Translate { offset, t_start, duration } => {
                let u = ((t - t_start) / duration).clamp(0.0, 1.0);
                offset * (u * u * (3.0 - 2.0 * u))
            }
        }
    }

    /// Total time the profile spends in motion.
    pub fn duration(&self) -> f64 {
        match *self {
            MotionProfile::OutAndBack { speed, accel, depth, .. } => {
                2.0 * out_and_back_half_time(speed, accel, depth)
            }
            MotionProfile::Translate { duration, .. } => duration,
        }
    }
}

fn out_and_back_half_time(speed: f64, accel: f64, depth: f64) -> f64 {
    let v = speed.min(libm::sqrt(accel * depth));
    let t_ramp = v / accel;
    let d_ramp = 0.5 * v * v / accel;
    let d_cruise = (depth - 2.0 * d_ramp).max(0.0);
    2.0 * t_ramp + d_cruise / v
}

/// Distance along the out direction at local time `t` (0 at start and at
/// the end of the return leg, `depth` at the turnaround).
fn out_and_back_distance(t: f64, speed: f64, accel: f64, depth: f64) -> f64 {
    let half = out_and_back_half_time(speed, accel, depth);
    if t <= 0.0 || t >= 2.0 * half {
        return 0.0;
    }
    // Mirror the return leg onto the outbound one.
    let tt = if t <= half { t } else { 2.0 * half - t };
    let v = speed.min(libm::sqrt(accel * depth));
    let t_ramp = v / accel;
    let d_ramp = 0.5 * v * v / accel;
    if tt < t_ramp {
        0.5 * accel * tt * tt
    } else if tt < half - t_ramp {
        d_ramp + v * (tt - t_ramp)
    } else {
        depth - 0.5 * accel * (half - tt) * (half - tt)
    }
}

/// Tick counters for the two-rate architecture contract.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TickCounters {
    pub outer: u64,
    pub inner: u64,
    pub phys: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SimError {
    Config(String),
    Gain(GainError),
    World(WorldError),
}

impl From<GainError> for SimError {
    fn from(e: GainError) -> Self {
        SimError::Gain(e)
    }
}

impl From<WorldError> for SimError {
    fn from(e: WorldError) -> Self {
        SimError::World(e)
    }
}

impl core::fmt::Display for SimError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SimError::Config(s) => write!(f, "configuration error: {s}"),
            SimError::Gain(e) => write!(f, "gain command rejected: {e}"),
            SimError::World(e) => write!(f, "{e}"),
        }
    }
}

/// The full closed-loop simulator.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub world: World,
    impedance: [ImpedanceController; 2],
    drives: [[MotorDrive; 2]; 2],
    motion: Vec<MotionProfile>,
    base_origin: Vec2,
    counters: TickCounters,
    tau_theta_cmd: [Vec2; 2],
    tau_q_cmd: [Vec2; 2],
    schedule: Vec<crate::config::ScheduleEntry>,
    pub config: SimConfig,
}

impl Simulation {
    /// Build a simulator with the fingers parked at `initial_theta` and the
    /// given initial gain sets. The hand pose fixes the scenario's frame.
    pub fn new(
        config: &SimConfig,
        seed: u64,
        hand_pose: Pose2,
        initial_theta: [Vec2; 2],
        initial_command: [ImpedanceCommand; 2],
    ) -> Result<Self, SimError> {
        config.validate().map_err(SimError::Config)?;
        let fingers = [0, 1].map(|i| {
            let mut f =
                FingerBody::new(config.hand.finger_geometry(i), config.hand.links);
            f.theta = initial_theta[i];
            f.set_reflected_rotor(
                &config.transmission.joint_to_motor_matrix(),
                config.motor.rotor_inertia,
                config.motor.rotor_friction,
            );
            f
        });
        let hand = Hand {
            pose: hand_pose,
            vel: Vec2::zeros(),
            accel: Vec2::zeros(),
            fingers,
            palm: config.hand.palm_enabled.then_some(config.hand.palm),
        };
        let world = World::new(config.world, hand);

        let inner_dt = config.control.inner_dt();
        let drives = [0usize, 1].map(|fi| {
            [0usize, 1].map(|mi| {
                let mut motor = MotorSim::new(config.motor);
                let q = config.transmission.joint_to_motor(&JointState {
                    pos: initial_theta[fi],
                    vel: Vec2::zeros(),
                });
                motor.state.angle = q.pos[mi];
                let noise = NoiseStream::new(seed, (fi * 2 + mi) as u64);
                let controller = TorqueController::new(&config.motor, &config.foc, noise);
                let mut encoder = EncoderState::default();
                let reading = encoder.read(&config.encoder, motor.state.angle, inner_dt);
                MotorDrive { motor, controller, encoder, reading, latched: Dq::default() }
            })
        });

        let impedance = [
            ImpedanceController::new(initial_command[0])?,
            ImpedanceController::new(initial_command[1])?,
        ];

        let mut schedule = config.schedule.clone();
        schedule.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap_or(core::cmp::Ordering::Equal));

        Ok(Self {
            base_origin: hand_pose.pos,
            world,
            impedance,
            drives,
            motion: Vec::new(),
            counters: TickCounters::default(),
            tau_theta_cmd: [Vec2::zeros(); 2],
            tau_q_cmd: [Vec2::zeros(); 2],
            schedule,
            config: config.clone(),
        })
    }

    pub fn time(&self) -> f64 {
        self.world.t
    }

    pub fn counters(&self) -> TickCounters {
        self.counters
    }

    pub fn hand(&self) -> &Hand {
        &self.world.hand
    }

    /// Add a base-motion profile (profiles compose additively).
    pub fn push_motion(&mut self, m: MotionProfile) {
        self.motion.push(m);
    }

    /// Queue a gain change on one finger; applies at the next outer tick.
    pub fn set_gains(&mut self, finger: usize, cmd: ImpedanceCommand) -> Result<GainAck, GainError> {
        self.impedance[finger].set_gains(cmd)
    }

    pub fn active_command(&self, finger: usize) -> &ImpedanceCommand {
        self.impedance[finger].active()
    }

    /// Joint state as the controller sees it: encoder angles and filtered
    /// velocities mapped through the transmission.
    pub fn measured_joint_state(&self, finger: usize) -> JointState {
        let q = MotorAngles {
            pos: Vec2::new(
                self.drives[finger][0].reading.angle,
                self.drives[finger][1].reading.angle,
            ),
            vel: Vec2::new(
                self.drives[finger][0].reading.velocity,
                self.drives[finger][1].reading.velocity,
            ),
        };
        self.config.transmission.motor_to_joint(&q)
    }

    /// Commanded joint torques from the most recent outer tick.
    pub fn commanded_joint_torque(&self, finger: usize) -> Vec2 {
        self.tau_theta_cmd[finger]
    }

    /// Commanded motor torques from the most recent outer tick.
    pub fn commanded_motor_torque(&self, finger: usize) -> Vec2 {
        self.tau_q_cmd[finger]
    }

    /// Electromagnetic torques currently produced at the four shafts.
    pub fn motor_torques(&self, finger: usize) -> Vec2 {
        Vec2::new(
            self.drives[finger][0].motor.torque(),
            self.drives[finger][1].motor.torque(),
        )
    }

    /// Phase currents drawn from the DC bus, summed over all motors
    /// (regenerated power does not flow back).
    pub fn bus_current(&self) -> f64 {
        let mut total = 0.0;
        for fd in &self.drives {
            for d in fd {
                let p = 1.5 * (d.latched.d * d.motor.state.i_d + d.latched.q * d.motor.state.i_q);
                total += p.max(0.0) / d.motor.params.bus_voltage;
            }
        }
        total
    }

    fn base_offset(&self, t: f64) -> Vec2 {
        self.motion.iter().map(|m| m.offset(t)).sum()
    }

    /// Run one full outer tick (impedance update, `inner_per_outer` FOC
    /// ticks, each with `phys_per_inner` physics steps).
    pub fn outer_tick(&mut self) -> Result<(), SimError> {
        let timing = self.config.control;
        let inner_dt = timing.inner_dt();
        let phys_dt = timing.phys_dt();

        // Timed schedule entries fire at the tick boundary they reach.
        while let Some(entry) = self.schedule.first() {
            if entry.t <= self.world.t {
                let entry = self.schedule.remove(0);
                match entry.finger {
                    Some(f) => {
                        self.impedance[f as usize].set_gains(entry.command)?;
                    }
                    None => {
                        self.impedance[0].set_gains(entry.command.clone())?;
                        self.impedance[1].set_gains(entry.command)?;
                    }
                }
            } else {
                break;
            }
        }

        // Outer loop: impedance on measured joint state, mapped to motor
        // torque commands.
        for f in 0..2 {
            let joint = self.measured_joint_state(f);
            let geom = self.world.hand.fingers[f].geometry;
            let tau_theta = self.impedance[f].tick(&joint, &geom);
            let tau_q = self.config.transmission.joint_torque_to_motor_torque(&tau_theta);
            self.tau_theta_cmd[f] = tau_theta.0;
            self.tau_q_cmd[f] = tau_q.0;
            for m in 0..2 {
                let params = self.drives[f][m].motor.params;
                self.drives[f][m].controller.command_torque(tau_q.0[m], &params);
            }
        }

        for _ in 0..timing.inner_per_outer {
            // Inner loop: sample encoders, run the current regulators, latch
            // voltages.
            for f in 0..2 {
                for m in 0..2 {
                    let d = &mut self.drives[f][m];
                    d.reading = d.encoder.read(&self.config.encoder, d.motor.state.angle, inner_dt);
                    let enc_angle = d.reading.angle;
                    d.latched = d.controller.inner_tick(&d.motor, enc_angle, inner_dt);
                }
            }

            for _ in 0..timing.phys_per_inner {
                // Exact position tracking of the prescribed base motion:
                // velocity is the mean over the step.
                let t = self.world.t;
                let off_now = self.base_offset(t);
                let off_next = self.base_offset(t + phys_dt);
                let vel = (off_next - off_now) / phys_dt;
                let accel = (vel - self.world.hand.vel) / phys_dt;
                self.world.hand.pose.pos = self.base_origin + off_now;
                self.world.hand.vel = vel;
                self.world.hand.accel = accel;

                // Electrical substep with the latched voltages.
                for fd in self.drives.iter_mut() {
                    for d in fd.iter_mut() {
                        d.motor.step_electrical(d.latched, phys_dt);
                    }
                }

                // Produced shaft torques drive the joints.
                let tau_joint = [0usize, 1].map(|f| {
                    let tq = MotorTorques(Vec2::new(
                        self.drives[f][0].motor.torque(),
                        self.drives[f][1].motor.torque(),
                    ));
                    self.config.transmission.motor_torque_to_joint_torque(&tq)
                });
                self.world.step(tau_joint, phys_dt)?;

                // The rigid transmission slaves the rotors to the joints.
                for f in 0..2 {
                    let q = self.config.transmission.joint_to_motor(&JointState {
                        pos: self.world.hand.fingers[f].theta,
                        vel: self.world.hand.fingers[f].omega,
                    });
                    for m in 0..2 {
                        self.drives[f][m].motor.state.angle = q.pos[m];
                        self.drives[f][m].motor.state.velocity = q.vel[m];
                    }
                }
                self.counters.phys += 1;
            }
            self.counters.inner += 1;
        }
        self.counters.outer += 1;
        Ok(())
    }

    /// Snapshot the current state as a telemetry frame.
    pub fn telemetry_frame(&self) -> TelemetryFrame {
        let fingers = [0usize, 1].map(|f| {
            let fb = &self.world.hand.fingers[f];
            FingerFrame {
                theta: fb.theta,
                omega: fb.omega,
                tip: self.world.hand.fingertip(f),
                tau_cmd: self.tau_theta_cmd[f],
                tau_q_cmd: self.tau_q_cmd[f],
            }
        });
        let mut motors = [MotorFrame::default(); 4];
        for f in 0..2 {
            for m in 0..2 {
                let d = &self.drives[f][m];
                motors[f * 2 + m] = MotorFrame {
                    angle: d.motor.state.angle,
                    velocity: d.motor.state.velocity,
                    i_d: d.motor.state.i_d,
                    i_q: d.motor.state.i_q,
                    v_d: d.latched.d,
                    v_q: d.latched.q,
                    tau_em: d.motor.torque(),
                };
            }
        }
        TelemetryFrame {
            t: self.world.t,
            fingers,
            motors,
            bus_current: self.bus_current(),
            objects: self
                .world
                .objects
                .iter()
                .map(|o| ObjectFrame { pos: o.pose.pos, angle: o.pose.angle })
                .collect(),
            contact_count: self.world.contacts().len() as u32,
        }
    }

    /// Contact rows for the current state.
    pub fn contact_rows(&self) -> Vec<ContactRow> {
        self.world
            .contacts()
            .iter()
            .map(|c| ContactRow {
                t: self.world.t,
                body_a: self.label_of(c.a),
                body_b: self.label_of(c.b),
                point: c.point,
                normal: c.normal,
                depth: c.depth,
                normal_force: c.normal_force,
                tangential_force: c.tangential_force,
                regime: match c.regime {
                    crate::plant::contact::FrictionRegime::Stick => "stick",
                    crate::plant::contact::FrictionRegime::Slip => "slip",
                },
            })
            .collect()
    }

    fn label_of(&self, id: crate::plant::ColliderId) -> String {
        match id {
            crate::plant::ColliderId::Object(i) => {
                self.world.objects.get(i as usize).map(|o| o.name.clone()).unwrap_or_else(|| id.label())
            }
            crate::plant::ColliderId::Static(i) => {
                self.world.statics.get(i as usize).map(|s| s.name.clone()).unwrap_or_else(|| id.label())
            }
            other => other.label(),
        }
    }

    /// Peak |commanded motor torque| seen so far is tracked by scenarios;
    /// this helper exposes the per-motor torque limit they compare against.
    pub fn torque_limit(&self) -> f64 {
        self.config.motor.torque_limit()
    }

    pub fn format_time(&self) -> String {
        format!("{:.6}", self.world.t)
    }
}
