//! Run configuration: one tree of plain values covering the hand, motors,
//! control rates, world constants, and per-scenario parameters.
//!
//! The tree is (de)serializable behind the `serde` feature; the CLI loads it
//! from JSON, applies dotted-key overrides, and hands it here. Defaults
//! reproduce the reference hand. Stiffness fields whose name carries
//! `_n_per_cm` are entered in N/cm and converted where consumed; everything
//! else is SI.

use crate::foc::{EncoderModel, FocConfig, MotorParams};
use crate::plant::{JointLimitParams, LinkParams, PalmGeometry, WorldParams};
use crate::transmission::TransmissionParams;
use crate::Vec2;
use alloc::string::String;
use alloc::vec::Vec;

/// Hand layout: two mirrored fingers on a palm.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct HandConfig {
    /// Proximal link length, m.
    pub l1: f64,
    /// Distal link length, m.
    pub l2: f64,
    /// Distance between the two finger bases, m.
    pub finger_separation: f64,
    /// Joint 1 travel, degrees.
    pub theta1_limits_deg: [f64; 2],
    /// Joint 2 travel, degrees.
    pub theta2_limits_deg: [f64; 2],
    pub links: LinkParams,
    pub palm: PalmGeometry,
    /// Include the palm collider.
    pub palm_enabled: bool,
}

impl Default for HandConfig {
    fn default() -> Self {
        Self {
            l1: 0.05531,
            l2: 0.05,
            finger_separation: 0.12,
            theta1_limits_deg: [-90.0, 90.0],
            theta2_limits_deg: [0.0, 135.0],
            links: LinkParams::default(),
            palm: PalmGeometry::default(),
            palm_enabled: true,
        }
    }
}

impl HandConfig {
    pub fn finger_geometry(&self, finger: usize) -> crate::kinematics::FingerGeometry {
        let half = 0.5 * self.finger_separation;
        let (base_x, mirrored) = if finger == 0 { (-half, false) } else { (half, true) };
        let d2r = core::f64::consts::PI / 180.0;
        crate::kinematics::FingerGeometry {
            l1: self.l1,
            l2: self.l2,
            base: Vec2::new(base_x, 0.0),
            mount_angle: 0.0,
            mirrored,
            theta1_limits: (self.theta1_limits_deg[0] * d2r, self.theta1_limits_deg[1] * d2r),
            theta2_limits: (self.theta2_limits_deg[0] * d2r, self.theta2_limits_deg[1] * d2r),
        }
    }
}

/// Loop-rate structure: outer impedance rate times the inner multiple times
/// the physics substepping.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ControlTiming {
    /// Outer (impedance) loop rate, Hz.
    pub outer_rate_hz: f64,
    /// Inner FOC ticks per outer tick.
    pub inner_per_outer: u32,
    /// Physics/electrical substeps per inner tick.
    pub phys_per_inner: u32,
}

impl Default for ControlTiming {
    fn default() -> Self {
        Self { outer_rate_hz: 1000.0, inner_per_outer: 5, phys_per_inner: 4 }
    }
}

impl ControlTiming {
    pub fn outer_dt(&self) -> f64 {
        1.0 / self.outer_rate_hz
    }

    pub fn inner_dt(&self) -> f64 {
        self.outer_dt() / self.inner_per_outer as f64
    }

    pub fn phys_dt(&self) -> f64 {
        self.inner_dt() / self.phys_per_inner as f64
    }
}

/// Telemetry recording knobs.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TelemetryConfig {
    /// Rows per second in the telemetry CSV (decimated from the outer rate).
    pub rate_hz: f64,
}

impl Default for TelemetryConfig {
    fn default() -> Self {
        Self { rate_hz: 1000.0 }
    }
}

/// Fingertip stiffness sweep against a rigid surface.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ForceDisplacementConfig {
    /// Commanded stiffness toward the surface, N/cm (the scale test unit).
    pub stiffness_n_per_cm: f64,
    /// Number of displacement setpoints.
    pub sweep_steps: u32,
    /// Deepest commanded displacement past the surface, m.
    pub max_displacement: f64,
    /// Settling time per setpoint, s.
    pub settle_time: f64,
    /// Averaging window per setpoint after settling, s.
    pub measure_time: f64,
    /// Residual tip speed above which a sample is discarded, m/s.
    pub settled_speed: f64,
}

impl Default for ForceDisplacementConfig {
    fn default() -> Self {
        Self {
            stiffness_n_per_cm: 1.0,
            sweep_steps: 10,
            max_displacement: 0.04,
            settle_time: 0.35,
            measure_time: 0.1,
            settled_speed: 1e-3,
        }
    }
}

/// Force-closure grasp of a bar under a disturbance pulse train.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct DisturbanceGraspConfig {
    /// Bar half-length, m.
    pub bar_half_length: f64,
    /// Bar radius, m.
    pub bar_radius: f64,
    /// Bar mass, kg.
    pub bar_mass: f64,
    /// Center-of-mass offset along the bar axis, m.
    pub com_offset: f64,
    /// Grip stiffness, N/m.
    pub grip_stiffness: f64,
    /// Commanded overlap past the bar surface, m.
    pub grip_overlap: f64,
    /// Magnitudes of the disturbance pulses, N.
    pub pulse_magnitudes: [f64; 2],
    /// Duration of each pulse, s.
    pub pulse_duration: f64,
    /// Gap between pulses, s.
    pub pulse_gap: f64,
    /// Longest tolerated loss of two-sided contact, s.
    pub max_contact_loss: f64,
}

impl Default for DisturbanceGraspConfig {
    fn default() -> Self {
        Self {
            bar_half_length: 0.04,
            bar_radius: 0.008,
            bar_mass: 0.1,
            com_offset: -0.015,
            grip_stiffness: 300.0,
            grip_overlap: 0.012,
            pulse_magnitudes: [1.0, 2.0],
            pulse_duration: 0.25,
            pulse_gap: 0.35,
            max_contact_loss: 0.05,
        }
    }
}

/// Joint-space form-closure wrap of a large object.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct FormClosureConfig {
    /// Disc radius, m.
    pub object_radius: f64,
    /// Disc mass, kg.
    pub object_mass: f64,
    /// Present at all (the no-object control run flips this).
    pub object_present: bool,
    /// Desired joint angles past the object surface, deg.
    pub theta_d_deg: [f64; 2],
    /// Joint stiffness, N·m/rad.
    pub joint_stiffness: f64,
    /// Probe wrench magnitude, N.
    pub probe_force: f64,
    /// Displacement beyond which the object counts as escaped, m.
    pub escape_distance: f64,
}

impl Default for FormClosureConfig {
    fn default() -> Self {
        Self {
            object_radius: 0.03,
            object_mass: 0.08,
            object_present: true,
            theta_d_deg: [-35.0, 110.0],
            joint_stiffness: 0.6,
            probe_force: 2.0,
            escape_distance: 0.025,
        }
    }
}

/// Smack-and-snatch: zero-stiffness descent, deflection-triggered grasp.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SmackSnatchConfig {
    /// Table height offset from nominal, m.
    pub table_height: f64,
    /// Table present (the free-descent control run flips this).
    pub table_present: bool,
    /// Ball radius, m.
    pub ball_radius: f64,
    /// Ball mass, kg.
    pub ball_mass: f64,
    /// Peak descent speed, m/s.
    pub descent_speed: f64,
    /// Base acceleration for the trapezoidal profile, m/s^2.
    pub base_accel: f64,
    /// Descent depth of the hand base below its start, m.
    pub descent_depth: f64,
    /// Vertical fingertip deflection that fires the trigger, m.
    pub trigger_displacement: f64,
    /// Post-trigger Cartesian stiffness, N/m.
    pub grasp_stiffness: f64,
    /// Post-trigger grasp point in the hand frame.
    pub grasp_target: [f64; 2],
    /// Dwell required to call the grasp held, s.
    pub hold_time: f64,
}

impl Default for SmackSnatchConfig {
    fn default() -> Self {
        Self {
            table_height: 0.0,
            table_present: true,
            ball_radius: 0.0285,
            ball_mass: 0.057,
            descent_speed: 0.5,
            base_accel: 10.0,
            descent_depth: 0.06,
            trigger_displacement: 0.005,
            grasp_stiffness: 160.0,
            grasp_target: [0.0, -0.08],
            hold_time: 0.05,
        }
    }
}

/// In-hand rolling of a disc between the fingertips.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct InhandRollConfig {
    /// Disc radius, m.
    pub disc_radius: f64,
    /// Disc mass, kg.
    pub disc_mass: f64,
    /// Grip stiffness, N/m.
    pub grip_stiffness: f64,
    /// Commanded overlap into the disc per finger, m.
    pub grip_overlap: f64,
    /// Stroke amplitude of each fingertip, m.
    pub stroke_amplitude: f64,
    /// Stroke cycles (one cycle = up and back).
    pub stroke_cycles: u32,
    /// Stroke period, s.
    pub stroke_period: f64,
}

impl Default for InhandRollConfig {
    fn default() -> Self {
        Self {
            disc_radius: 0.0285,
            disc_mass: 0.057,
            grip_stiffness: 300.0,
            grip_overlap: 0.008,
            stroke_amplitude: 0.012,
            stroke_cycles: 2,
            stroke_period: 1.6,
        }
    }
}

/// Palm-push regrasp with stiffness halving on palm contact.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct RegraspPushConfig {
    /// Disc radius, m.
    pub object_radius: f64,
    /// Disc mass, kg.
    pub object_mass: f64,
    /// Grip stiffness, N/m.
    pub grip_stiffness: f64,
    /// Commanded overlap per finger, m.
    pub grip_overlap: f64,
    /// Factor applied to the normal stiffness on palm contact (the ablation
    /// run sets this to 1.0).
    pub palm_contact_stiffness_scale: f64,
    /// Push distance toward the palm, m.
    pub push_distance: f64,
    /// Push duration, s.
    pub push_time: f64,
    /// Number of push/reset cycles.
    pub cycles: u32,
    /// Minimum finger-relative slide to pass, m.
    pub min_slide: f64,
}

impl Default for RegraspPushConfig {
    fn default() -> Self {
        Self {
            object_radius: 0.02,
            object_mass: 0.03,
            grip_stiffness: 300.0,
            grip_overlap: 0.01,
            palm_contact_stiffness_scale: 0.5,
            push_distance: 0.045,
            push_time: 1.2,
            cycles: 2,
            min_slide: 0.005,
        }
    }
}

/// Coin pick at a table edge.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct CoinPickConfig {
    /// Offset of the table edge from its nominal position, m. The
    /// controller never sees this.
    pub edge_offset: f64,
    /// Coin half-width (it is a thin slab seen edge-on), m.
    pub coin_half_width: f64,
    /// Coin half-thickness, m.
    pub coin_half_thickness: f64,
    /// Coin mass, kg.
    pub coin_mass: f64,
    /// Starting distance of the coin center behind the nominal edge, m.
    pub coin_start_back: f64,
    /// Pressing displacement behind the coin surface, m.
    pub press_overlap: f64,
    /// Press stiffness, N/m.
    pub press_stiffness: f64,
    /// Slide distance commanded along the table, m.
    pub slide_distance: f64,
    /// Slide duration, s.
    pub slide_time: f64,
}

impl Default for CoinPickConfig {
    fn default() -> Self {
        Self {
            edge_offset: 0.0,
            coin_half_width: 0.012,
            coin_half_thickness: 0.001,
            coin_mass: 0.005,
            coin_start_back: 0.032,
            press_overlap: 0.012,
            press_stiffness: 250.0,
            slide_distance: 0.055,
            slide_time: 1.4,
            }
    }
}

/// Fingertip force calibration targets.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct CalibrationConfig {
    /// Target static fingertip force, N.
    pub target_force: f64,
    /// Reference pose used for the statics, deg.
    pub reference_pose_deg: [f64; 2],
    /// Force direction in the hand frame at the reference pose.
    pub direction: [f64; 2],
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            target_force: 8.2,
            reference_pose_deg: [-60.0, 90.0],
            direction: [0.0, -1.0],
        }
    }
}

/// Per-scenario parameter blocks.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ScenarioConfigs {
    pub force_displacement: ForceDisplacementConfig,
    pub disturbance_grasp: DisturbanceGraspConfig,
    pub form_closure: FormClosureConfig,
    pub smack_snatch: SmackSnatchConfig,
    pub inhand_roll: InhandRollConfig,
    pub regrasp_push: RegraspPushConfig,
    pub coin_pick: CoinPickConfig,
    pub calibration: CalibrationConfig,
}

/// A timed gain-schedule entry applied to one finger (or both).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScheduleEntry {
    /// Simulation time at which to apply, s.
    pub t: f64,
    /// 0, 1, or "both" via `None`.
    pub finger: Option<u8>,
    pub command: crate::impedance::ImpedanceCommand,
}

/// The complete run configuration.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SimConfig {
    pub version: u32,
    pub transmission: TransmissionParams,
    pub hand: HandConfig,
    pub motor: MotorParams,
    pub foc: FocConfig,
    pub encoder: EncoderModel,
    pub control: ControlTiming,
    pub world: WorldParams,
    pub telemetry: TelemetryConfig,
    pub scenario: ScenarioConfigs,
    /// Extra timed gain-schedule entries applied on top of the scenario's
    /// own script.
    pub schedule: Vec<ScheduleEntry>,
}

impl SimConfig {
    /// Validate the cross-cutting invariants that individual types cannot
    /// see on their own.
    pub fn validate(&self) -> Result<(), String> {
        use alloc::format;
        self.transmission.validate().map_err(|e| format!("{e}"))?;
        self.motor.validate().map_err(|e| format!("{e}"))?;
        if self.control.inner_per_outer == 0 || self.control.phys_per_inner == 0 {
            return Err(String::from("control rate multipliers must be >= 1"));
        }
        if !(self.control.outer_rate_hz > 0.0) {
            return Err(String::from("outer_rate_hz must be > 0"));
        }
        for f in 0..2 {
            self.hand.finger_geometry(f).validate().map_err(|e| format!("{e}"))?;
        }
        if !(self.world.contact.normal_stiffness > 0.0) {
            return Err(String::from("contact normal_stiffness must be > 0"));
        }
        Ok(())
    }
}
