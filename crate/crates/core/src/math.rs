//! Small vector/quaternion helpers on top of nalgebra.
//!
//! Quaternions are kept as raw `Quaternion<f64>` so that all four components
//! stay visible to the constraint code; callers normalize explicitly after
//! every integration or projection step.

use nalgebra::{Matrix3, Quaternion, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Quat = Quaternion<f64>;

pub const IDENTITY: Quat = Quaternion::new(1.0, 0.0, 0.0, 0.0);

#[inline]
pub fn vec3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z)
}

/// Pure quaternion `(0, v)`.
#[inline]
pub fn pure(v: &Vec3) -> Quat {
    Quaternion::new(0.0, v.x, v.y, v.z)
}

#[inline]
pub fn vector_part(q: &Quat) -> Vec3 {
    Vec3::new(q.i, q.j, q.k)
}

/// `ā·b`, grouped so that equal arguments give an exactly zero vector part.
#[inline]
pub fn conj_mul(a: &Quat, b: &Quat) -> Quat {
    Quaternion::new(
        a.w * b.w + (a.i * b.i + a.j * b.j + a.k * b.k),
        (a.w * b.i - b.w * a.i) - (a.j * b.k - a.k * b.j),
        (a.w * b.j - b.w * a.j) - (a.k * b.i - a.i * b.k),
        (a.w * b.k - b.w * a.k) - (a.i * b.j - a.j * b.i),
    )
}

#[inline]
pub fn normalized(q: Quat) -> Quat {
    let n = q.norm();
    if n > 0.0 {
        q * (1.0 / n)
    } else {
        IDENTITY
    }
}

/// Rotation matrix whose columns are the directors d1, d2, d3 of `q`.
#[inline]
pub fn rotation_matrix(q: &Quat) -> Matrix3<f64> {
    let (w, x, y, z) = (q.w, q.i, q.j, q.k);
    let (xx, yy, zz) = (x * x, y * y, z * z);
    let (xy, xz, yz) = (x * y, x * z, y * z);
    let (wx, wy, wz) = (w * x, w * y, w * z);
    Matrix3::new(
        1.0 - 2.0 * (yy + zz),
        2.0 * (xy - wz),
        2.0 * (xz + wy),
        2.0 * (xy + wz),
        1.0 - 2.0 * (xx + zz),
        2.0 * (yz - wx),
        2.0 * (xz - wy),
        2.0 * (yz + wx),
        1.0 - 2.0 * (xx + yy),
    )
}

/// `q v q̄` for a unit quaternion.
#[inline]
pub fn rotate(q: &Quat, v: &Vec3) -> Vec3 {
    rotation_matrix(q) * v
}

/// `q̄ v q` for a unit quaternion.
#[inline]
pub fn rotate_inverse(q: &Quat, v: &Vec3) -> Vec3 {
    rotation_matrix(q).transpose() * v
}

/// Applies a small world-frame rotation vector: `q + ½ (0, θ) q`, normalized.
#[inline]
pub fn apply_world_rotation(q: &Quat, theta: &Vec3) -> Quat {
    normalized(q + pure(theta) * q * 0.5)
}

/// Quaternion rotating unit vector `from` onto unit vector `to` along the
/// shortest arc. Antiparallel inputs rotate by π about `fallback_axis`, which
/// must be perpendicular to `from`.
pub fn shortest_arc(from: &Vec3, to: &Vec3, fallback_axis: &Vec3) -> Quat {
    let d = from.dot(to);
    if d < -1.0 + 1e-12 {
        let a = fallback_axis.normalize();
        return Quaternion::new(0.0, a.x, a.y, a.z);
    }
    let c = from.cross(to);
    normalized(Quaternion::new(1.0 + d, c.x, c.y, c.z))
}

/// Spherical linear interpolation taking the short path.
pub fn slerp(a: &Quat, b: &Quat, t: f64) -> Quat {
    let mut cos = a.coords.dot(&b.coords);
    let mut b = *b;
    if cos < 0.0 {
        cos = -cos;
        b = -b;
    }
    if cos > 1.0 - 1e-10 {
        return normalized(a * (1.0 - t) + b * t);
    }
    let angle = cos.acos();
    let s = angle.sin();
    let wa = ((1.0 - t) * angle).sin() / s;
    let wb = (t * angle).sin() / s;
    normalized(a * wa + b * wb)
}

/// Unit quaternion for a rotation of `angle` radians about `axis`.
pub fn axis_angle(axis: &Vec3, angle: f64) -> Quat {
    let a = axis.normalize();
    let (s, c) = (0.5 * angle).sin_cos();
    Quaternion::new(c, a.x * s, a.y * s, a.z * s)
}

pub fn is_finite3(v: &Vec3) -> bool {
    v.x.is_finite() && v.y.is_finite() && v.z.is_finite()
}
