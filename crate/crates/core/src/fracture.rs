//! Strain-threshold fracture of rod elements.
//!
//! After the projection loop every live segment's stretch/shear magnitude and
//! every live bend pair's bend/twist magnitude is compared to its threshold.
//! An over-strained segment is removed together with every bend pair that
//! references it; whatever hangs off it becomes a free body.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::Vec3;
use crate::rod::SegmentKind;
use crate::solver::SimState;

/// Calibrated stretch threshold for organ (pedicel) segments.
pub const DEFAULT_ORGAN_C_S_MAX: f64 = 0.1;
/// Bending threshold for organ (pedicel) segments.
pub const DEFAULT_ORGAN_C_B_MAX: f64 = 0.31;
/// Structural segments break only at this multiple of the organ defaults.
pub const STRUCTURAL_FACTOR: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FractureThresholds {
    pub c_s_max: f64,
    pub c_b_max: f64,
}

impl FractureThresholds {
    pub fn validate(&self) -> Result<()> {
        if self.c_s_max > 0.0 && self.c_b_max > 0.0 {
            Ok(())
        } else {
            Err(Error::Config(format!("fracture thresholds must be > 0, got {self:?}")))
        }
    }
}

/// Which part of the four-component bend/twist constraint is compared to
/// `c_b_max`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BendMeasure {
    #[default]
    Full,
    VectorPart,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FracturePolicy {
    pub enabled: bool,
    /// Applies to pedicels.
    pub organ: FractureThresholds,
    /// Applies to branch and leaf segments.
    pub structural: FractureThresholds,
    /// Per-segment thresholds taking precedence over the kind defaults.
    pub overrides: BTreeMap<usize, FractureThresholds>,
    pub bend_measure: BendMeasure,
}

impl Default for FracturePolicy {
    fn default() -> Self {
        FracturePolicy {
            enabled: true,
            organ: FractureThresholds { c_s_max: DEFAULT_ORGAN_C_S_MAX, c_b_max: DEFAULT_ORGAN_C_B_MAX },
            structural: FractureThresholds {
                c_s_max: STRUCTURAL_FACTOR * DEFAULT_ORGAN_C_S_MAX,
                c_b_max: STRUCTURAL_FACTOR * DEFAULT_ORGAN_C_B_MAX,
            },
            overrides: BTreeMap::new(),
            bend_measure: BendMeasure::Full,
        }
    }
}

impl FracturePolicy {
    pub fn disabled() -> Self {
        FracturePolicy { enabled: false, ..Default::default() }
    }

    pub fn thresholds_for(&self, segment: usize, kind: SegmentKind) -> FractureThresholds {
        if let Some(t) = self.overrides.get(&segment) {
            return *t;
        }
        match kind {
            SegmentKind::Pedicel => self.organ,
            SegmentKind::Branch | SegmentKind::Leaf => self.structural,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FractureTrigger {
    Stretch,
    Bend,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractureEvent {
    pub time: f64,
    pub segment: usize,
    pub trigger: FractureTrigger,
    pub magnitude: f64,
}

/// Marks a segment dead along with every bend pair that references it.
/// Returns the number of bend pairs removed.
pub fn remove_segment(state: &mut SimState, segment: usize) -> usize {
    let seg = &mut state.segments[segment];
    if !seg.alive {
        return 0;
    }
    seg.alive = false;
    let o = &mut state.orientations[seg.orientation];
    o.inverse_inertia = Vec3::zeros();
    o.angular_velocity = Vec3::zeros();
    let mut removed = 0;
    for pair in state.bend_pairs.iter_mut().filter(|p| p.alive) {
        if pair.segment_a == segment || pair.segment_b == segment {
            pair.alive = false;
            removed += 1;
        }
    }
    removed
}

/// Compares the current constraint values with their thresholds and removes
/// over-strained segments. Bend-triggered fracture removes the pair's distal
/// segment.
pub fn check_fracture(state: &mut SimState, policy: &FracturePolicy, t: f64) -> Vec<FractureEvent> {
    if !policy.enabled {
        return Vec::new();
    }
    let mut events = Vec::new();
    for (i, seg) in state.segments.iter().enumerate() {
        if !seg.alive {
            continue;
        }
        let c = state.stretch_shear(i).norm();
        if c > policy.thresholds_for(i, seg.kind).c_s_max {
            events.push(FractureEvent { time: t, segment: i, trigger: FractureTrigger::Stretch, magnitude: c });
        }
    }
    for (i, pair) in state.bend_pairs.iter().enumerate() {
        if !pair.alive {
            continue;
        }
        let child = pair.segment_b;
        if events.iter().any(|e| e.segment == child) {
            continue;
        }
        let cb = state.bend_twist(i);
        let c = match policy.bend_measure {
            BendMeasure::Full => cb.norm(),
            BendMeasure::VectorPart => cb.vector().norm(),
        };
        if c > policy.thresholds_for(child, state.segments[child].kind).c_b_max {
            events.push(FractureEvent { time: t, segment: child, trigger: FractureTrigger::Bend, magnitude: c });
        }
    }
    for e in &events {
        remove_segment(state, e.segment);
    }
    events
}

/// Time from `trajectory_start` to the first fracture, if any.
pub fn detach_time(events: &[FractureEvent], trajectory_start: f64) -> Option<f64> {
    events
        .iter()
        .map(|e| e.time)
        .min_by(|a, b| a.total_cmp(b))
        .map(|t| t - trajectory_start)
}
