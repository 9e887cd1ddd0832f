//! Small fixed-size vector/transform types shared by all modules.
//!
//! Coordinates are meters in an east-north-up style frame; `z` is height.

#[allow(unused_imports)]
use num_traits::Float;

/// 2D point / vector in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

/// 3D point / vector in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const fn p2(x: f64, y: f64) -> Point2 {
    Point2 { x, y }
}

pub const fn p3(x: f64, y: f64, z: f64) -> Point3 {
    Point3 { x, y, z }
}

impl Point2 {
    pub const ZERO: Point2 = p2(0.0, 0.0);

    pub fn add(self, o: Point2) -> Point2 {
        p2(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Point2) -> Point2 {
        p2(self.x - o.x, self.y - o.y)
    }

    pub fn scale(self, s: f64) -> Point2 {
        p2(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(self, o: Point2) -> f64 {
        self.sub(o).norm()
    }

    pub fn dist2(self, o: Point2) -> f64 {
        let d = self.sub(o);
        d.dot(d)
    }

    /// Rotates counterclockwise by `angle` radians.
    pub fn rotate(self, angle: f64) -> Point2 {
        let (s, c) = (angle.sin(), angle.cos());
        p2(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Point3 {
    pub const ZERO: Point3 = p3(0.0, 0.0, 0.0);

    pub fn add(self, o: Point3) -> Point3 {
        p3(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(self, o: Point3) -> Point3 {
        p3(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn scale(self, s: f64) -> Point3 {
        p3(self.x * s, self.y * s, self.z * s)
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Point3) -> Point3 {
        p3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(self, o: Point3) -> f64 {
        self.sub(o).norm()
    }

    pub fn normalized(self) -> Point3 {
        let n = self.norm();
        self.scale(1.0 / n)
    }

    pub fn xy(self) -> Point2 {
        p2(self.x, self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Row-major 3x3 rotation matrix.
pub type Mat3 = [[f64; 3]; 3];

pub const MAT3_IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn mat3_mul_vec(m: &Mat3, v: Point3) -> Point3 {
    p3(
        m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
        m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
        m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
    )
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn mat3_transpose(m: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = m[j][i];
        }
    }
    out
}

/// Rodrigues rotation about a unit axis.
pub fn mat3_from_axis_angle(axis: Point3, angle: f64) -> Mat3 {
    let (s, c) = (angle.sin(), angle.cos());
    let t = 1.0 - c;
    let (x, y, z) = (axis.x, axis.y, axis.z);
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

/// Shortest rotation mapping unit vector `from` onto unit vector `to`.
pub fn rotation_between(from: Point3, to: Point3) -> Mat3 {
    let c = from.dot(to).clamp(-1.0, 1.0);
    let axis = from.cross(to);
    let s = axis.norm();
    if s < 1e-15 {
        if c > 0.0 {
            return MAT3_IDENTITY;
        }
        // Opposite vectors: rotate pi about any axis orthogonal to `from`.
        let ortho = if from.x.abs() < 0.9 {
            p3(1.0, 0.0, 0.0)
        } else {
            p3(0.0, 1.0, 0.0)
        };
        let axis = from.cross(ortho).normalized();
        return mat3_from_axis_angle(axis, core::f64::consts::PI);
    }
    mat3_from_axis_angle(axis.scale(1.0 / s), s.atan2(c))
}

/// Rigid transform `p -> R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RigidTransform {
    pub rotation: Mat3,
    pub translation: Point3,
}

impl RigidTransform {
    pub const IDENTITY: RigidTransform = RigidTransform {
        rotation: MAT3_IDENTITY,
        translation: Point3::ZERO,
    };

    pub fn new(rotation: Mat3, translation: Point3) -> Self {
        RigidTransform {
            rotation,
            translation,
        }
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        mat3_mul_vec(&self.rotation, p).add(self.translation)
    }

    pub fn inverse(&self) -> RigidTransform {
        let rt = mat3_transpose(&self.rotation);
        let t = mat3_mul_vec(&rt, self.translation).scale(-1.0);
        RigidTransform {
            rotation: rt,
            translation: t,
        }
    }

    /// `self` after `other`, i.e. `(self ∘ other)(p) = self(other(p))`.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: mat3_mul(&self.rotation, &other.rotation),
            translation: mat3_mul_vec(&self.rotation, other.translation).add(self.translation),
        }
    }

    /// Largest absolute deviation from the identity transform.
    pub fn deviation_from_identity(&self) -> f64 {
        let mut d: f64 = self.translation.x.abs().max(self.translation.y.abs());
        d = d.max(self.translation.z.abs());
        for (i, row) in self.rotation.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let id = if i == j { 1.0 } else { 0.0 };
                d = d.max((v - id).abs());
            }
        }
        d
    }
}

/// Normalizes an angle to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut r = a % two_pi;
    if r <= -core::f64::consts::PI {
        r += two_pi;
    } else if r > core::f64::consts::PI {
        r -= two_pi;
    }
    r
}

/// Smallest eigenvector of a symmetric 3x3 matrix (cyclic Jacobi).
///
/// Used for least-squares plane fitting; deterministic for identical input.
pub fn sym3_smallest_eigenvector(m: &Mat3) -> Point3 {
    let mut a = *m;
    let mut v = MAT3_IDENTITY;
    for _ in 0..32 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if off < 1e-30 {
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q].abs() < 1e-300 {
                continue;
            }
            let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut rot = MAT3_IDENTITY;
            rot[p][p] = c;
            rot[q][q] = c;
            rot[p][q] = s;
            rot[q][p] = -s;
            a = mat3_mul(&mat3_transpose(&rot), &mat3_mul(&a, &rot));
            v = mat3_mul(&v, &rot);
        }
    }
    let eigs = [a[0][0], a[1][1], a[2][2]];
    let mut k = 0;
    for i in 1..3 {
        if eigs[i] < eigs[k] {
            k = i;
        }
    }
    p3(v[0][k], v[1][k], v[2][k]).normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_between_maps_vector() {
        let from = p3(0.3, -0.2, 0.9).normalized();
        let to = p3(0.0, 0.0, 1.0);
        let r = rotation_between(from, to);
        let got = mat3_mul_vec(&r, from);
        assert!(got.dist(to) < 1e-12);
    }

    #[test]
    fn rigid_inverse_roundtrip() {
        let r = mat3_from_axis_angle(p3(0.0, 1.0, 0.0), 0.3);
        let t = RigidTransform::new(r, p3(1.0, 2.0, 3.0));
        let p = p3(-0.5, 4.0, 0.25);
        let q = t.inverse().apply(t.apply(p));
        assert!(q.dist(p) < 1e-12);
    }

    #[test]
    fn wrap_angle_range() {
        for k in -20..20 {
            let a = 0.37 * k as f64;
            let w = wrap_angle(a);
            assert!(w > -core::f64::consts::PI - 1e-12 && w <= core::f64::consts::PI + 1e-12);
            assert!(((a - w) / (2.0 * core::f64::consts::PI)).fract().abs() < 1e-9);
        }
    }

    #[test]
    fn smallest_eigenvector_of_plane_covariance() {
        // Covariance of points spread in x/y but tight in z: smallest axis is z.
        let m = [[4.0, 0.2, 0.0], [0.2, 3.0, 0.1], [0.0, 0.1, 0.01]];
        let v = sym3_smallest_eigenvector(&m);
        assert!(v.z.abs() > 0.99, "{v:?}");
    }
}
