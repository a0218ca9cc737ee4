//! In-memory telemetry: fixed-schema frames sampled at a decimated rate,
//! plus one row per contact per sampled tick. Serialization to CSV lives in
//! the CLI crate; everything here is plain data so the core stays free of
//! I/O.

use alloc::string::String;
use alloc::vec::Vec;

use crate::Vec2;

/// Per-motor electrical sample.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MotorFrame {
    pub angle: f64,
    pub velocity: f64,
    pub i_d: f64,
    pub i_q: f64,
    pub v_d: f64,
    pub v_q: f64,
    pub tau_em: f64,
}

/// Per-finger mechanical/control sample.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FingerFrame {
    pub theta: Vec2,
    pub omega: Vec2,
    /// Fingertip in the hand frame.
    pub tip: Vec2,
    /// Commanded joint torques out of the impedance stage.
    pub tau_cmd: Vec2,
    /// Commanded motor torques after the transmission map.
    pub tau_q_cmd: Vec2,
}

/// Object pose sample.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ObjectFrame {
    pub pos: Vec2,
    pub angle: f64,
}

/// One telemetry row.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TelemetryFrame {
    pub t: f64,
    pub fingers: [FingerFrame; 2],
    /// Motor order: left finger (0, 1) then right finger (0, 1).
    pub motors: [MotorFrame; 4],
    pub bus_current: f64,
    pub objects: Vec<ObjectFrame>,
    pub contact_count: u32,
}

/// One contact row (variable count per tick, so they live in their own
/// table).
#[derive(Clone, Debug, PartialEq)]
pub struct ContactRow {
    pub t: f64,
    pub body_a: String,
    pub body_b: String,
    pub point: Vec2,
    pub normal: Vec2,
    pub depth: f64,
    pub normal_force: f64,
    pub tangential_force: f64,
    /// "stick" or "slip".
    pub regime: &'static str,
}

/// Telemetry accumulated over a run.
#[derive(Clone, Debug, Default)]
pub struct Telemetry {
    /// Names of the objects, fixing the frame schema for the run.
    pub object_names: Vec<String>,
    pub frames: Vec<TelemetryFrame>,
    pub contacts: Vec<ContactRow>,
    skip: u32,
    countdown: u32,
}

impl Telemetry {
    /// Record every `decimation`-th offered frame (1 = keep all).
    pub fn with_decimation(object_names: Vec<String>, decimation: u32) -> Self {
        Self {
            object_names,
            frames: Vec::new(),
            contacts: Vec::new(),
            skip: decimation.max(1),
            countdown: 0,
        }
    }

    /// Offer a frame; it is kept only on the decimation grid. Contact rows
    /// are recorded on the same grid.
    pub fn offer(&mut self, frame: TelemetryFrame, contacts: impl FnOnce() -> Vec<ContactRow>) {
        if self.countdown == 0 {
            self.frames.push(frame);
            self.contacts.extend(contacts());
            self.countdown = self.skip - 1;
        } else {
            self.countdown -= 1;
        }
    }

    pub fn last(&self) -> Option<&TelemetryFrame> {
        self.frames.last()
    }
}
