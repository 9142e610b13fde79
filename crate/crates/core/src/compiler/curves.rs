use serde::{Deserialize, Serialize};

use crate::collision::geometry::closest_segment_params;
use crate::error::{Error, Result};
use crate::math::Vec3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveEnd {
    #[default]
    Start,
    End,
}

/// Drawn branch centreline with a radius per point (or one radius for the
/// whole curve).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Curve {
    pub points: Vec<Vec3>,
    pub radii: Vec<f64>,
}

impl Curve {
    pub fn new(points: Vec<Vec3>, radii: Vec<f64>) -> Self {
        Curve { points, radii }
    }

    pub fn constant(points: Vec<Vec3>, radius: f64) -> Self {
        Curve { points, radii: vec![radius] }
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    fn validate(&self, index: usize) -> Result<()> {
        let bad = |reason: &str| Err(Error::InvalidCurve { curve: index, reason: reason.to_string() });
        if self.points.len() < 2 {
            return bad("needs at least two points");
        }
        if self.radii.len() != 1 && self.radii.len() != self.points.len() {
            return bad("radii must have one entry or one per point");
        }
        if self.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return bad("radii must be > 0");
        }
        if self.points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return bad("points must be finite");
        }
        if !(self.length() > 0.0) {
            return bad("curve has zero length");
        }
        Ok(())
    }

    fn radius_at_vertex(&self, i: usize) -> f64 {
        if self.radii.len() == 1 {
            self.radii[0]
        } else {
            self.radii[i]
        }
    }

    /// Position and interpolated radius at arc length `s`.
    fn at_arc_length(&self, cumulative: &[f64], s: f64) -> (Vec3, f64) {
        let last = self.points.len() - 1;
        let mut i = cumulative.partition_point(|&c| c <= s).saturating_sub(1).min(last - 1);
        while i < last - 1 && cumulative[i + 1] - cumulative[i] == 0.0 {
            i += 1;
        }
        let span = cumulative[i + 1] - cumulative[i];
        let t = if span > 0.0 { ((s - cumulative[i]) / span).clamp(0.0, 1.0) } else { 0.0 };
        let p = self.points[i].lerp(&self.points[i + 1], t);
        let r = self.radius_at_vertex(i) * (1.0 - t) + self.radius_at_vertex(i + 1) * t;
        (p, r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSet {
    pub curves: Vec<Curve>,
    pub root_curve: usize,
    #[serde(default)]
    pub root_end: CurveEnd,
}

impl CurveSet {
    pub fn validate(&self) -> Result<()> {
        if self.curves.is_empty() {
            return Err(Error::EmptyCurveSet);
        }
        for (i, c) in self.curves.iter().enumerate() {
            c.validate(i)?;
        }
        if self.root_curve >= self.curves.len() {
            return Err(Error::InvalidCurve { curve: self.root_curve, reason: "root curve does not exist".into() });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub position: Vec3,
    pub radius: f64,
    pub curve: usize,
    /// Arc length from the start of the curve.
    pub arc_length: f64,
}

/// Dense resampling of a curve set. Samples are stored curve by curve, each
/// curve in drawing order.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCurves {
    pub samples: Vec<Sample>,
    /// Half-open sample index range of each curve.
    pub ranges: Vec<(usize, usize)>,
    pub root_sample: usize,
    /// Smallest distance between two different curves.
    pub min_clearance: f64,
    pub warnings: Vec<String>,
}

impl SampledCurves {
    pub fn curve_count(&self) -> usize {
        self.ranges.len()
    }

    pub fn endpoints(&self, curve: usize) -> [usize; 2] {
        let (a, b) = self.ranges[curve];
        [a, b - 1]
    }
}

/// Resamples every curve at uniform arc-length spacing no larger than `step`,
/// keeping both endpoints.
pub fn sample_curves(cs: &CurveSet, step: f64) -> Result<SampledCurves> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("sampling step must be > 0, got {step}")));
    }
    cs.validate()?;
    let mut samples = Vec::new();
    let mut ranges = Vec::with_capacity(cs.curves.len());
    for (ci, curve) in cs.curves.iter().enumerate() {
        let mut cumulative = Vec::with_capacity(curve.points.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in curve.points.windows(2) {
            acc += (w[1] - w[0]).norm();
            cumulative.push(acc);
        }
        let total = acc;
        let intervals = ((total / step).ceil() as usize).max(1);
        let start = samples.len();
        for k in 0..=intervals {
            let (position, radius) = if k == intervals {
                (*curve.points.last().unwrap(), curve.radius_at_vertex(curve.points.len() - 1))
            } else {
                curve.at_arc_length(&cumulative, total * k as f64 / intervals as f64)
            };
            samples.push(Sample { position, radius, curve: ci, arc_length: total * k as f64 / intervals as f64 });
        }
        ranges.push((start, samples.len()));
    }

    let min_clearance = min_inter_curve_distance(&cs.curves);
    let mut warnings = Vec::new();
    if step >= min_clearance {
        let msg = format!(
            "sampling step {step} is not smaller than the closest distance between two curves ({min_clearance:.6})"
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let (a, b) = ranges[cs.root_curve];
    let root_sample = match cs.root_end {
        CurveEnd::Start => a,
        CurveEnd::End => b - 1,
    };
    Ok(SampledCurves { samples, ranges, root_sample, min_clearance, warnings })
}

/// Smallest polyline-to-polyline distance over all pairs of curves
/// (infinite for a single curve).
pub fn min_inter_curve_distance(curves: &[Curve]) -> f64 {
    let boxes: Vec<(Vec3, Vec3)> = curves
        .iter()
        .map(|c| {
            let mut lo = c.points[0];
            let mut hi = c.points[0];
            for p in &c.points {
                lo = lo.inf(p);
                hi = hi.sup(p);
            }
            (lo, hi)
        })
        .collect();
    let mut best = f64::INFINITY;
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let gap = (boxes[j].0 - boxes[i].1).sup(&(boxes[i].0 - boxes[j].1)).sup(&Vec3::zeros()).norm();
            if gap >= best {
                continue;
            }
            for a in curves[i].points.windows(2) {
                for b in curves[j].points.windows(2) {
                    let (s, t) = closest_segment_params(&a[0], &a[1], &b[0], &b[1]);
                    let d = (a[0].lerp(&a[1], s) - b[0].lerp(&b[1], t)).norm();
                    best = best.min(d);
                }
            }
        }
    }
    best
}
