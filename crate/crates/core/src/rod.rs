//! Geometric building blocks of the discrete Cosserat rod and its two
//! constraint functions.
//!
//! A rod element is two particles plus one quaternion frame. The frame's
//! third director `d3` is the rest tangent; stretch/shear measures how far the
//! normalized edge is from `d3`, bend/twist measures how far the discrete
//! Darboux vector between two neighbouring frames is from its rest value.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{conj_mul, rotation_matrix, vector_part, Quat, Vec3};

pub const DEFAULT_POISSON_RATIO: f64 = 0.3;

#[derive(Clone, Debug, PartialEq)]
pub struct Particle {
    pub position: Vec3,
    pub velocity: Vec3,
    /// 0 pins the particle.
    pub inverse_mass: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrientationElement {
    pub rotation: Quat,
    /// Body frame, rad/s.
    pub angular_velocity: Vec3,
    /// Diagonal body-frame inverse inertia; all zero pins the frame.
    pub inverse_inertia: Vec3,
}

impl OrientationElement {
    pub fn is_pinned(&self) -> bool {
        self.inverse_inertia == Vec3::zeros()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    /// Young's modulus, Pa.
    pub young_modulus: f64,
    #[serde(default = "default_poisson")]
    pub poisson_ratio: f64,
    /// kg/m³.
    pub density: f64,
}

fn default_poisson() -> f64 {
    DEFAULT_POISSON_RATIO
}

impl Material {
    pub fn new(young_modulus: f64, poisson_ratio: f64, density: f64) -> Result<Self> {
        let m = Material { young_modulus, poisson_ratio, density };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.young_modulus > 0.0 && self.young_modulus.is_finite()) {
            return Err(Error::Config(format!("young_modulus must be > 0, got {}", self.young_modulus)));
        }
        if !(0.0..0.5).contains(&self.poisson_ratio) {
            return Err(Error::Config(format!("poisson_ratio must be in [0, 0.5), got {}", self.poisson_ratio)));
        }
        if !(self.density > 0.0 && self.density.is_finite()) {
            return Err(Error::Config(format!("density must be > 0, got {}", self.density)));
        }
        Ok(())
    }

    pub fn shear_modulus(&self) -> f64 {
        self.young_modulus / (2.0 * (1.0 + self.poisson_ratio))
    }
}

/// What a rod segment represents in the plant; decides default fracture
/// thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Branch,
    Pedicel,
    Leaf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RodSegment {
    /// Root-side particle.
    pub particle_a: usize,
    /// Distal particle.
    pub particle_b: usize,
    pub orientation: usize,
    pub rest_length: f64,
    pub radius: f64,
    pub material: Material,
    pub kind: SegmentKind,
    pub alive: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BendTwistPair {
    /// Parent (root-side) segment.
    pub segment_a: usize,
    /// Child (distal) segment.
    pub segment_b: usize,
    pub mean_length: f64,
    pub rest_darboux: DarbouxVector,
    pub alive: bool,
}

/// Augmented discrete Darboux vector: all four components of
/// `(2/l) q̄ᵢ qᵢ₊₁`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DarbouxVector(pub Quat);

impl DarbouxVector {
    pub fn scalar(&self) -> f64 {
        self.0.w
    }

    pub fn vector(&self) -> Vec3 {
        vector_part(&self.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }
}

/// Director `d_k = q e_k q̄` for `axis` in 1..=3.
///
/// Panics when `axis` is outside 1..=3.
pub fn director(q: &Quat, axis: usize) -> Vec3 {
    assert!((1..=3).contains(&axis), "director axis must be 1, 2 or 3");
    rotation_matrix(q).column(axis - 1).into_owned()
}

pub fn compute_darboux(q_i: &Quat, q_next: &Quat, l: f64) -> Result<DarbouxVector> {
    if !(l > 0.0) {
        return Err(Error::DegenerateLength(l));
    }
    Ok(DarbouxVector(conj_mul(q_i, q_next) * (2.0 / l)))
}

/// `C_s = (p2 − p1)/l0 − d3(q)`.
pub fn stretch_shear_constraint(p1: &Vec3, p2: &Vec3, q: &Quat, l0: f64) -> Result<Vec3> {
    if !(l0 > 0.0) {
        return Err(Error::DegenerateLength(l0));
    }
    Ok((p2 - p1) / l0 - director(q, 3))
}

/// Sign choosing the nearer of `±Ω₀`; ties resolve to +1.
pub fn rest_sign(omega: &DarbouxVector, rest: &DarbouxVector) -> f64 {
    let minus = (omega.0 - rest.0).norm_squared();
    let plus = (omega.0 + rest.0).norm_squared();
    if minus > plus {
        -1.0
    } else {
        1.0
    }
}

/// `C_b = Ω − sΩ₀` with the nearest-rest-pose sign rule.
pub fn bend_twist_constraint(pair: &BendTwistPair, q1: &Quat, q2: &Quat) -> DarbouxVector {
    // mean_length > 0 is a construction invariant of BendTwistPair.
    let omega = DarbouxVector(conj_mul(q1, q2) * (2.0 / pair.mean_length));
    let s = rest_sign(&omega, &pair.rest_darboux);
    DarbouxVector(omega.0 - pair.rest_darboux.0 * s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stiffness {
    /// (G·A, G·A, E·A), N.
    pub stretch: Vec3,
    /// (E·I, E·I, G·J), N·m².
    pub bend: Vec3,
}

pub fn material_to_stiffness(m: &Material, radius: f64) -> Stiffness {
    let e = m.young_modulus;
    let g = m.shear_modulus();
    let r2 = radius * radius;
    let area = PI * r2;
    let second_moment = PI * r2 * r2 / 4.0;
    let polar_moment = PI * r2 * r2 / 2.0;
    Stiffness {
        stretch: Vec3::new(g * area, g * area, e * area),
        bend: Vec3::new(e * second_moment, e * second_moment, g * polar_moment),
    }
}
