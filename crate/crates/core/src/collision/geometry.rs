use crate::math::Vec3;

/// A plant collision primitive: a capsule around a core segment, or a sphere
/// (a capsule whose core has zero length).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Primitive {
    Sphere { center: Vec3, radius: f64 },
    Capsule { a: Vec3, b: Vec3, radius: f64 },
}

impl Primitive {
    pub fn radius(&self) -> f64 {
        match *self {
            Primitive::Sphere { radius, .. } | Primitive::Capsule { radius, .. } => radius,
        }
    }

    fn core(&self) -> (Vec3, Vec3) {
        match *self {
            Primitive::Sphere { center, .. } => (center, center),
            Primitive::Capsule { a, b, .. } => (a, b),
        }
    }

    pub fn aabb(&self, margin: f64) -> Aabb {
        let (a, b) = self.core();
        let r = self.radius() + margin;
        Aabb { min: a.inf(&b).add_scalar(-r), max: a.sup(&b).add_scalar(r) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] <= other.max[k] && other.min[k] <= self.max[k])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosestPoints {
    pub point_a: Vec3,
    pub point_b: Vec3,
    /// Core parameter in [0, 1] along each primitive (0 for spheres).
    pub param_a: f64,
    pub param_b: f64,
    pub distance: f64,
}

/// Closest points between the cores of two primitives.
pub fn closest_point_pair(a: &Primitive, b: &Primitive) -> ClosestPoints {
    let (p1, q1) = a.core();
    let (p2, q2) = b.core();
    let (s, t) = closest_segment_params(&p1, &q1, &p2, &q2);
    let point_a = p1 + (q1 - p1) * s;
    let point_b = p2 + (q2 - p2) * t;
    ClosestPoints { point_a, point_b, param_a: s, param_b: t, distance: (point_a - point_b).norm() }
}

/// Penetration depth and unit normal (pointing from `b` toward `a`) when the
/// primitives overlap. Coincident cores fall back to +z.
pub fn penetration(a: &Primitive, b: &Primitive) -> Option<(ClosestPoints, Vec3, f64)> {
    let cp = closest_point_pair(a, b);
    let depth = a.radius() + b.radius() - cp.distance;
    if depth <= 0.0 {
        return None;
    }
    let normal = if cp.distance > 1e-12 { (cp.point_a - cp.point_b) / cp.distance } else { Vec3::z() };
    Some((cp, normal, depth))
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Parameters (s, t) of the closest points on segments p1q1 and p2q2.
pub fn closest_segment_params(p1: &Vec3, q1: &Vec3, p2: &Vec3, q2: &Vec3) -> (f64, f64) {
    const EPS: f64 = 1e-18;
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    if a <= EPS && e <= EPS {
        return (0.0, 0.0);
    }
    if a <= EPS {
        return (0.0, clamp01(f / e));
    }
    let c = d1.dot(&r);
    if e <= EPS {
        return (clamp01(-c / a), 0.0);
    }
    let b = d1.dot(&d2);
    let denom = a * e - b * b;
    let mut s = if denom > EPS * a * e { clamp01((b * f - c * e) / denom) } else { 0.0 };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = clamp01(-c / a);
    } else if t > 1.0 {
        t = 1.0;
        s = clamp01((b - c) / a);
    }
    (s, t)
}
