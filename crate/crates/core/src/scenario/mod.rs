//! Scripted manipulation scenarios with quantitative pass/fail metrics.
//!
//! Each scenario builds its world, runs the full two-rate simulator with its
//! own event logic (gain schedules, contact-triggered switching), and
//! evaluates a fixed set of metrics. Everything is deterministic in
//! (config, seed).

pub mod calibration;
pub mod coin_pick;
pub mod disturbance_grasp;
pub mod events;
pub mod force_displacement;
pub mod form_closure;
pub mod inhand_roll;
pub mod regrasp_push;
pub mod smack_snatch;

use alloc::string::String;
use alloc::vec::Vec;

use crate::config::SimConfig;
use crate::sim::SimError;
use crate::telemetry::Telemetry;

/// How a metric value is judged.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", content = "bound"))]
pub enum Criterion {
    /// value >= bound
    AtLeast(f64),
    /// value <= bound
    AtMost(f64),
    /// bound.0 <= value <= bound.1
    Within(f64, f64),
    /// value != 0 counts as true
    IsTrue,
    /// recorded for information only, never fails
    Info,
}

impl Criterion {
    pub fn judge(&self, value: f64) -> bool {
        match *self {
            Criterion::AtLeast(b) => value >= b,
            Criterion::AtMost(b) => value <= b,
            Criterion::Within(lo, hi) => value >= lo && value <= hi,
            Criterion::IsTrue => value != 0.0,
            Criterion::Info => true,
        }
    }
}

/// One evaluated metric.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub criterion: Criterion,
    pub pass: bool,
    /// Free-form diagnostic (trigger times, failure detail).
    pub note: Option<String>,
}

impl Metric {
    pub fn new(name: &str, value: f64, criterion: Criterion) -> Self {
        Self {
            name: String::from(name),
            value,
            criterion,
            pass: criterion.judge(value),
            note: None,
        }
    }

    pub fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }

    pub fn boolean(name: &str, pass: bool) -> Self {
        Self {
            name: String::from(name),
            value: if pass { 1.0 } else { 0.0 },
            criterion: Criterion::IsTrue,
            pass,
            note: None,
        }
    }

    pub fn info(name: &str, value: f64) -> Self {
        Self::new(name, value, Criterion::Info)
    }
}

/// Result of one scenario run: metrics plus the telemetry handle.
#[derive(Clone, Debug)]
pub struct ScenarioOutcome {
    pub scenario: String,
    pub seed: u64,
    pub metrics: Vec<Metric>,
    pub telemetry: Telemetry,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        self.metrics.iter().all(|m| m.pass)
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }

    /// Value of a named metric; panics in tests if absent.
    pub fn value(&self, name: &str) -> f64 {
        self.metric(name)
            .unwrap_or_else(|| panic!("metric '{name}' missing"))
            .value
    }
}

/// Errors that stop a scenario from producing a result at all (metric
/// failures are results, not errors).
#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioError {
    UnknownScenario { name: String, suggestion: Option<&'static str> },
    Sim(SimError),
    /// The run produced too little valid data to evaluate (e.g. fewer than
    /// the required settled samples).
    InsufficientData { detail: String },
}

impl From<SimError> for ScenarioError {
    fn from(e: SimError) -> Self {
        ScenarioError::Sim(e)
    }
}

impl From<crate::impedance::GainError> for ScenarioError {
    fn from(e: crate::impedance::GainError) -> Self {
        ScenarioError::Sim(SimError::Gain(e))
    }
}

impl From<crate::plant::WorldError> for ScenarioError {
    fn from(e: crate::plant::WorldError) -> Self {
        ScenarioError::Sim(SimError::World(e))
    }
}

impl core::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ScenarioError::UnknownScenario { name, suggestion } => {
                write!(f, "unknown scenario '{name}'")?;
                if let Some(s) = suggestion {
                    write!(f, " (did you mean '{s}'?)")?;
                }
                Ok(())
            }
            ScenarioError::Sim(e) => write!(f, "{e}"),
            ScenarioError::InsufficientData { detail } => {
                write!(f, "insufficient data: {detail}")
            }
        }
    }
}

/// Registry entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub summary: &'static str,
}

/// All registered scenarios, in stable order.
pub const SCENARIOS: [ScenarioInfo; 8] = [
    ScenarioInfo {
        name: "force_displacement",
        summary: "fingertip presses a rigid surface; regresses force vs displacement slope",
    },
    ScenarioInfo {
        name: "disturbance_grasp",
        summary: "fingertip grasp of a bar held through an external disturbance pulse train",
    },
    ScenarioInfo {
        name: "form_closure",
        summary: "joint-space wrap of a large disc against the palm, probed by wrenches",
    },
    ScenarioInfo {
        name: "smack_snatch",
        summary: "zero-stiffness descent onto a table; deflection-triggered ball grasp on the fly",
    },
    ScenarioInfo {
        name: "inhand_roll",
        summary: "rolls a disc between the fingertips with antiphase vertical strokes",
    },
    ScenarioInfo {
        name: "regrasp_push",
        summary: "pushes a grasped disc against the palm to slide it along the fingertips",
    },
    ScenarioInfo {
        name: "coin_pick",
        summary: "slides a coin to the table edge and pinches it without knowing the edge position",
    },
    ScenarioInfo {
        name: "calibration",
        summary: "solves the motor current limit that yields the rated fingertip force",
    },
];

/// Closest registry name for typo suggestions.
pub fn suggest(name: &str) -> Option<&'static str> {
    let lower = name.to_lowercase();
    SCENARIOS
        .iter()
        .map(|s| s.name)
        .find(|n| n.contains(lower.as_str()) || lower.contains(*n))
        .or_else(|| {
            SCENARIOS
                .iter()
                .map(|s| s.name)
                .filter(|n| {
                    n.chars().zip(lower.chars()).take_while(|(a, b)| a == b).count() >= 3
                })
                .max_by_key(|n| {
                    n.chars().zip(lower.chars()).take_while(|(a, b)| a == b).count()
                })
        })
}

/// Dispatch a scenario by registry name.
pub fn run_scenario(
    name: &str,
    config: &SimConfig,
    seed: u64,
) -> Result<ScenarioOutcome, ScenarioError> {
    match name {
        "force_displacement" => force_displacement::run(config, seed),
        "disturbance_grasp" => disturbance_grasp::run(config, seed),
        "form_closure" => form_closure::run(config, seed),
        "smack_snatch" => smack_snatch::run(config, seed),
        "inhand_roll" => inhand_roll::run(config, seed),
        "regrasp_push" => regrasp_push::run(config, seed),
        "coin_pick" => coin_pick::run(config, seed),
        "calibration" => calibration::run(config, seed),
        _ => Err(ScenarioError::UnknownScenario {
            name: String::from(name),
            suggestion: suggest(name),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_seven_experiments_plus_calibration() {
        assert_eq!(SCENARIOS.len(), 8);
        assert!(SCENARIOS.iter().any(|s| s.name == "calibration"));
        let names: Vec<&str> = SCENARIOS.iter().map(|s| s.name).collect();
        assert_eq!(names[0], "force_displacement");
        assert_eq!(names[7], "calibration");
    }

    #[test]
    fn suggestion_finds_near_miss() {
        assert_eq!(suggest("smack"), Some("smack_snatch"));
        assert_eq!(suggest("coin_pic"), Some("coin_pick"));
        assert_eq!(suggest("zzz"), None);
    }

    #[test]
    fn unknown_scenario_reports_suggestion() {
        let cfg = SimConfig::default();
        match run_scenario("smack", &cfg, 0) {
            Err(ScenarioError::UnknownScenario { suggestion, .. }) => {
                assert_eq!(suggestion, Some("smack_snatch"));
            }
            other => panic!("expected UnknownScenario, got {other:?}"),
        }
    }

    #[test]
    fn criteria_judge_correctly() {
        assert!(Criterion::AtLeast(1.0).judge(1.0));
        assert!(!Criterion::AtLeast(1.0).judge(0.99));
        assert!(Criterion::Within(0.95, 1.05).judge(1.0));
        assert!(!Criterion::Within(0.95, 1.05).judge(1.06));
        assert!(Criterion::AtMost(0.1).judge(0.05));
        assert!(Criterion::IsTrue.judge(1.0));
        assert!(!Criterion::IsTrue.judge(0.0));
        assert!(Criterion::Info.judge(-123.0));
    }
}
