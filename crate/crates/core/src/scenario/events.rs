//! Event logic shared by scenarios: contact- and deflection-triggered
//! state machines.

/// Phases of the smack-and-snatch grasp.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SnatchPhase {
    /// Limp fingers riding the descending hand.
    DescendZeroStiffness,
    /// Deflection threshold crossed this tick; gains are being switched.
    Triggered,
    /// Stiff fingers traveling to the grasp pose.
    Grasping,
    /// Two-sided object contact sustained long enough.
    Holding,
}

/// Deflection-triggered grasp sequencer. The phase only ever advances, and
/// the trigger fires at most once per run.
#[derive(Clone, Debug)]
pub struct SnatchStateMachine {
    phase: SnatchPhase,
    /// Vertical fingertip deflection (hand frame) that fires the trigger, m.
    pub trigger_displacement: f64,
    /// Dwell of two-sided contact required to call the grasp held, s.
    pub hold_time: f64,
    trigger_time: Option<f64>,
    contact_since: Option<f64>,
}

impl SnatchStateMachine {
    pub fn new(trigger_displacement: f64, hold_time: f64) -> Self {
        Self {
            phase: SnatchPhase::DescendZeroStiffness,
            trigger_displacement,
            hold_time,
            trigger_time: None,
            contact_since: None,
        }
    }

    pub fn phase(&self) -> SnatchPhase {
        self.phase
    }

    pub fn trigger_time(&self) -> Option<f64> {
        self.trigger_time
    }

    /// Advance with this tick's observations. Returns `true` exactly once,
    /// on the tick the trigger fires.
    pub fn on_tick(&mut self, t: f64, deflections: [f64; 2], two_sided_contact: bool) -> bool {
        match self.phase {
            SnatchPhase::DescendZeroStiffness => {
                if deflections.iter().any(|d| *d > self.trigger_displacement) {
                    self.phase = SnatchPhase::Triggered;
                    self.trigger_time = Some(t);
                    return true;
                }
            }
            SnatchPhase::Triggered => {
                self.phase = SnatchPhase::Grasping;
            }
            SnatchPhase::Grasping => {
                if two_sided_contact {
                    let since = *self.contact_since.get_or_insert(t);
                    if t - since >= self.hold_time {
                        self.phase = SnatchPhase::Holding;
                    }
                } else {
                    self.contact_since = None;
                }
            }
            SnatchPhase::Holding => {}
        }
        false
    }
}

/// Latching edge detector for one-shot events like first palm contact.
#[derive(Clone, Copy, Debug, Default)]
pub struct LatchedEvent {
    time: Option<f64>,
}

impl LatchedEvent {
    /// Feed the current condition; returns `true` only on the first tick the
    /// condition holds.
    pub fn update(&mut self, t: f64, condition: bool) -> bool {
        if condition && self.time.is_none() {
            self.time = Some(t);
            true
        } else {
            false
        }
    }

    pub fn fired(&self) -> bool {
        self.time.is_some()
    }

    pub fn time(&self) -> Option<f64> {
        self.time
    }
}

/// Tracks the longest continuous interval during which a condition was
/// false (e.g. loss of a contact).
#[derive(Clone, Copy, Debug, Default)]
pub struct GapTracker {
    gap_start: Option<f64>,
    longest: f64,
}

impl GapTracker {
    pub fn update(&mut self, t: f64, condition_holds: bool) {
        match (condition_holds, self.gap_start) {
            (false, None) => self.gap_start = Some(t),
            (true, Some(start)) => {
                self.longest = self.longest.max(t - start);
                self.gap_start = None;
            }
            _ => {}
        }
    }

    /// Longest gap seen, including one still open at time `t`.
    pub fn longest(&self, t: f64) -> f64 {
        match self.gap_start {
            Some(start) => self.longest.max(t - start),
            None => self.longest,
        }
    }
}
