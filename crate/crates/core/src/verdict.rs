//! Three-state resolution-tagged verdicts.
//!
//! Quantifiers over a continuum ("for any eps > 0 there exist ...") are
//! semi-decided on a finite geometric schedule. A verdict therefore carries
//! the schedule that was actually run, the witnesses found, and the margins
//! by which each emptiness/nonemptiness call was decided.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    /// Every scheduled eps admitted a witness; property certified down to
    /// the smallest scheduled eps.
    HoldsAtResolution,
    /// At some scheduled eps the (sampled) search was exhausted with no
    /// witness, or a counterexample tuple was certified.
    FailsWithWitness,
    /// Some decision fell inside the margin band; neither outcome is
    /// certified.
    Inconclusive,
}

/// One row of the eps schedule: what was searched and what was found.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub eps: f64,
    /// Radius at which the witness (or counterexample) was found, when the
    /// property quantifies over rho.
    pub rho: Option<f64>,
    /// Human-readable identifiers of the perturbations involved.
    pub perturbations: Vec<String>,
    /// Points involved in the witness tuple (flattened per set).
    pub points: Vec<Vec<f64>>,
    /// Value of the min-max-distance (or other decisive quantity).
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub schedule: Vec<ScheduleEntry>,
    /// Margin by which the decisive comparison cleared its threshold,
    /// per schedule entry.
    pub margins: Vec<f64>,
    /// For FailsWithWitness: the eps at which the search found no witness
    /// (or found a certified counterexample).
    pub failing_eps: Option<f64>,
    /// Smallest eps certified when the property holds.
    pub smallest_eps: Option<f64>,
    pub note: Option<String>,
}

impl Verdict {
    pub fn holds(schedule: Vec<ScheduleEntry>, margins: Vec<f64>) -> Self {
        let smallest = schedule.iter().map(|e| e.eps).fold(f64::INFINITY, f64::min);
        Verdict {
            status: Status::HoldsAtResolution,
            schedule,
            margins,
            failing_eps: None,
            smallest_eps: if smallest.is_finite() { Some(smallest) } else { None },
            note: None,
        }
    }

    pub fn fails(eps: f64, schedule: Vec<ScheduleEntry>, margins: Vec<f64>) -> Self {
        Verdict {
            status: Status::FailsWithWitness,
            schedule,
            margins,
            failing_eps: Some(eps),
            smallest_eps: None,
            note: None,
        }
    }

    pub fn inconclusive(note: impl Into<String>) -> Self {
        Verdict {
            status: Status::Inconclusive,
            schedule: Vec::new(),
            margins: Vec::new(),
            failing_eps: None,
            smallest_eps: None,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn holds_at_resolution(&self) -> bool {
        self.status == Status::HoldsAtResolution
    }
}

/// Outcome of a single set-intersection emptiness query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Emptiness {
    Empty,
    Nonempty,
    Inconclusive,
}
