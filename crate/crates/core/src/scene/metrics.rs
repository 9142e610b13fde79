use serde::{Deserialize, Serialize};

use super::files::Frame;

/// Kinetic energy below which a plant counts as at rest, J.
pub const QUIESCENT_ENERGY: f64 = 1e-6;

/// Everything reported for one run. The sag fields depend only on the
/// recorded frames and the particle masses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tip_node: usize,
    /// Vertical drop of the tip node from its compiled position, m.
    pub tip_sag: Option<f64>,
    /// Time at which the sag was taken, s.
    pub sag_time: Option<f64>,
    /// Whether the sag was taken at rest rather than at the horizon.
    pub quiescent: bool,
    pub detach_time: Option<f64>,
    pub fracture_count: usize,
    pub node_count: usize,
    pub rod_count: usize,
    pub particle_count: usize,
    pub steps: u64,
    pub frames: usize,
    pub simulated_time: f64,
    pub wall_time: f64,
    pub wall_time_per_simulated_second: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SagMeasurement {
    pub sag: f64,
    pub time: f64,
    pub quiescent: bool,
}

/// Kinetic energy between consecutive frames, from finite-difference
/// velocities. Entry `k` belongs to frame `k + 1`.
pub fn frame_energies(frames: &[Frame], masses: &[f64], frame_dt: f64) -> Vec<f64> {
    frames
        .windows(2)
        .map(|w| {
            w[1].positions
                .iter()
                .zip(&w[0].positions)
                .zip(masses)
                .map(|((a, b), m)| 0.5 * m * ((a - b) / frame_dt).norm_squared())
                .sum()
        })
        .collect()
}

/// How long the energy must stay below [`QUIESCENT_ENERGY`] to count as
/// rest, s. A single quiet frame is not enough: an oscillating plant passes
/// through zero velocity at every turning point.
pub const QUIESCENT_WINDOW: f64 = 0.25;

/// Tip drop at the first frame from which the plant stays at rest (energy
/// below [`QUIESCENT_ENERGY`] for [`QUIESCENT_WINDOW`]) after having moved,
/// or at the last frame within the horizon.
pub fn tip_sag(frames: &[Frame], masses: &[f64], frame_dt: f64, tip: usize, horizon: f64) -> Option<SagMeasurement> {
    let z0 = frames.first()?.positions.get(tip)?.z;
    let sag_at = |k: usize| z0 - frames[k].positions[tip].z;
    let energies = frame_energies(frames, masses, frame_dt);
    let eps = 1e-9 * frame_dt;
    let mut moved = false;
    let mut quiet_since: Option<usize> = None;
    let mut last_in_horizon = 0;
    for (j, e) in energies.iter().enumerate() {
        let k = j + 1;
        let t = k as f64 * frame_dt;
        if *e >= QUIESCENT_ENERGY {
            moved = true;
            quiet_since = None;
        } else if moved {
            let start = *quiet_since.get_or_insert(k);
            if (k - start) as f64 * frame_dt >= QUIESCENT_WINDOW - eps {
                return Some(SagMeasurement { sag: sag_at(start), time: start as f64 * frame_dt, quiescent: true });
            }
        }
        if t <= horizon + eps {
            last_in_horizon = k;
        } else if quiet_since.is_none() {
            break;
        }
    }
    let k = last_in_horizon;
    Some(SagMeasurement { sag: sag_at(k), time: k as f64 * frame_dt, quiescent: false })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    StrictlyIncreasing,
    StrictlyDecreasing,
    Constant,
    NonMonotone,
    /// Some values missing, or fewer than two.
    Undefined,
}

impl std::fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Monotonicity::StrictlyIncreasing => "strictly increasing",
            Monotonicity::StrictlyDecreasing => "strictly decreasing",
            Monotonicity::Constant => "constant",
            Monotonicity::NonMonotone => "non-monotone",
            Monotonicity::Undefined => "undefined",
        };
        f.write_str(s)
    }
}

pub fn monotonicity(values: &[Option<f64>]) -> Monotonicity {
    let Some(v) = values.iter().copied().collect::<Option<Vec<f64>>>() else {
        return Monotonicity::Undefined;
    };
    if v.len() < 2 {
        return Monotonicity::Undefined;
    }
    let pairs = || v.windows(2);
    if pairs().all(|w| w[1] > w[0]) {
        Monotonicity::StrictlyIncreasing
    } else if pairs().all(|w| w[1] < w[0]) {
        Monotonicity::StrictlyDecreasing
    } else if pairs().all(|w| w[1] == w[0]) {
        Monotonicity::Constant
    } else {
        Monotonicity::NonMonotone
    }
}
