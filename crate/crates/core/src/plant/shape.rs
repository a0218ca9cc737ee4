//! Collision primitives and contact-point generation.
//!
//! Three primitives cover every body in the scenarios: circles (balls),
//! capsules (finger links, palm, bars, coins seen edge-on, tables with a
//! rounded edge), and half-planes (unbounded ground). Capsule contacts are
//! generated from the end-cap circles plus the interior closest pair, so a
//! capsule resting on a flat surface gets the two support points it needs
//! to lie stably.

use alloc::vec::Vec;

use crate::kinematics::perp;
use crate::Vec2;

/// Rigid planar pose.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pose2 {
    pub pos: Vec2,
    pub angle: f64,
}

impl Pose2 {
    pub fn new(pos: Vec2, angle: f64) -> Self {
        Self { pos, angle }
    }

    #[inline]
    pub fn rotate(&self, v: Vec2) -> Vec2 {
        let (s, c) = libm::sincos(self.angle);
        Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
    }

    #[inline]
    pub fn transform(&self, p: Vec2) -> Vec2 {
        self.pos + self.rotate(p)
    }

    #[inline]
    pub fn inv_rotate(&self, v: Vec2) -> Vec2 {
        let (s, c) = libm::sincos(self.angle);
        Vec2::new(c * v.x + s * v.y, -s * v.x + c * v.y)
    }

    #[inline]
    pub fn inv_transform(&self, p: Vec2) -> Vec2 {
        self.inv_rotate(p - self.pos)
    }
}

/// Collision shape in its local frame.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Shape {
    /// Disc of the given radius about the local origin.
    Circle { radius: f64 },
    /// Capsule along the local x axis: segment of `2 * half_length` swept by
    /// `radius`.
    Capsule { half_length: f64, radius: f64 },
    /// Solid half-plane `normal . x <= offset`; `normal` is the unit outward
    /// normal (into free space). Only meaningful as a static, world-frame
    /// body.
    HalfPlane { normal: Vec2, offset: f64 },
}

impl Shape {
    pub fn circle(radius: f64) -> Self {
        Shape::Circle { radius }
    }

    pub fn capsule(half_length: f64, radius: f64) -> Self {
        Shape::Capsule { half_length, radius }
    }

    /// Half-plane whose surface passes through `point` with outward `normal`
    /// (normalized here).
    pub fn half_plane(normal: Vec2, point: Vec2) -> Self {
        let n = normal / normal.norm();
        Shape::HalfPlane { normal: n, offset: n.dot(&point) }
    }
}

/// One generated contact between a shape pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactGeom {
    /// Contact point, world frame (midpoint of the overlap).
    pub point: Vec2,
    /// Unit normal pointing from body A into body B.
    pub normal: Vec2,
    /// Penetration depth, >= 0.
    pub depth: f64,
    /// Stable feature index for friction-anchor bookkeeping.
    pub feature: u8,
}

fn closest_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return a;
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

/// Closest points between two segments (standard clamped parametric search).
fn closest_between_segments(p1: Vec2, q1: Vec2, p2: Vec2, q2: Vec2) -> (Vec2, Vec2) {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (mut s, mut t);
    if a == 0.0 && e == 0.0 {
        return (p1, p2);
    }
    if a == 0.0 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e == 0.0 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            s = if denom != 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
        }
    }
    (p1 + d1 * s, p2 + d2 * t)
}

/// Circle-vs-circle core: contact between two world-frame discs.
fn circle_circle(ca: Vec2, ra: f64, cb: Vec2, rb: f64, feature: u8) -> Option<ContactGeom> {
    let d = cb - ca;
    let dist = d.norm();
    let depth = ra + rb - dist;
    if depth <= 0.0 {
        return None;
    }
    // Coincident centers: pick a fixed axis to stay deterministic.
    let normal = if dist > 1e-12 { d / dist } else { Vec2::new(1.0, 0.0) };
    let point = ca + normal * (ra - 0.5 * depth);
    Some(ContactGeom { point, normal, depth, feature })
}

fn circle_half_plane(c: Vec2, r: f64, normal: Vec2, offset: f64, feature: u8) -> Option<ContactGeom> {
    // Signed height of the center above the surface.
    let h = normal.dot(&c) - offset;
    let depth = r - h;
    if depth <= 0.0 {
        return None;
    }
    // Midpoint of the overlap, between the circle's deepest point and the
    // surface. Normal from the plane (A) into the circle (B).
    Some(ContactGeom { point: c - normal * (0.5 * (h + r)), normal, depth, feature })
}

fn capsule_endpoints(pose: &Pose2, half_length: f64) -> (Vec2, Vec2) {
    let axis = pose.rotate(Vec2::new(half_length, 0.0));
    (pose.pos - axis, pose.pos + axis)
}

/// Generate every contact between two posed shapes. Normals point from A
/// into B. Multiple contacts are emitted for capsules lying on surfaces.
pub fn contacts_between(
    a: &Shape,
    pose_a: &Pose2,
    b: &Shape,
    pose_b: &Pose2,
    out: &mut Vec<ContactGeom>,
) {
    match (a, b) {
        (Shape::Circle { radius: ra }, Shape::Circle { radius: rb }) => {
            if let Some(c) = circle_circle(pose_a.pos, *ra, pose_b.pos, *rb, 0) {
                out.push(c);
            }
        }
        (Shape::Circle { radius: ra }, Shape::Capsule { half_length, radius: rb }) => {
            let (p0, p1) = capsule_endpoints(pose_b, *half_length);
            let q = closest_on_segment(pose_a.pos, p0, p1);
            if let Some(c) = circle_circle(pose_a.pos, *ra, q, *rb, 0) {
                out.push(c);
            }
        }
        (Shape::Capsule { .. }, Shape::Circle { .. }) => {
            let mut tmp = Vec::new();
            contacts_between(b, pose_b, a, pose_a, &mut tmp);
            out.extend(tmp.into_iter().map(flip));
        }
        (Shape::Circle { radius }, Shape::HalfPlane { normal, offset }) => {
            // Plane as B: contact normal must point from circle into plane.
            if let Some(c) = circle_half_plane(pose_a.pos, *radius, *normal, *offset, 0) {
                out.push(flip(c));
            }
        }
        (Shape::HalfPlane { normal, offset }, Shape::Circle { radius }) => {
            if let Some(c) = circle_half_plane(pose_b.pos, *radius, *normal, *offset, 0) {
                out.push(c);
            }
        }
        (Shape::Capsule { half_length, radius }, Shape::HalfPlane { normal, offset }) => {
            let (p0, p1) = capsule_endpoints(pose_a, *half_length);
            for (i, e) in [p0, p1].into_iter().enumerate() {
                if let Some(c) = circle_half_plane(e, *radius, *normal, *offset, i as u8) {
                    out.push(flip(c));
                }
            }
        }
        (Shape::HalfPlane { normal, offset }, Shape::Capsule { half_length, radius }) => {
            let (p0, p1) = capsule_endpoints(pose_b, *half_length);
            for (i, e) in [p0, p1].into_iter().enumerate() {
                if let Some(c) = circle_half_plane(e, *radius, *normal, *offset, i as u8) {
                    out.push(c);
                }
            }
        }
        (
            Shape::Capsule { half_length: la, radius: ra },
            Shape::Capsule { half_length: lb, radius: rb },
        ) => {
            let (a0, a1) = capsule_endpoints(pose_a, *la);
            let (b0, b1) = capsule_endpoints(pose_b, *lb);
            let min_sep = 0.25 * (ra.min(*rb));
            let start = out.len();
            // End caps of A against B's core segment.
            for (i, e) in [a0, a1].into_iter().enumerate() {
                let q = closest_on_segment(e, b0, b1);
                if let Some(c) = circle_circle(e, *ra, q, *rb, i as u8) {
                    out.push(c);
                }
            }
            // End caps of B against A's core segment.
            for (i, e) in [b0, b1].into_iter().enumerate() {
                let q = closest_on_segment(e, a0, a1);
                if let Some(c) = circle_circle(q, *ra, e, *rb, 2 + i as u8) {
                    if !near_existing(&out[start..], c.point, min_sep) {
                        out.push(c);
                    }
                }
            }
            // Interior crossing (X configurations).
            let (pa, pb) = closest_between_segments(a0, a1, b0, b1);
            if let Some(c) = circle_circle(pa, *ra, pb, *rb, 4) {
                if !near_existing(&out[start..], c.point, min_sep) {
                    out.push(c);
                }
            }
        }
        (Shape::HalfPlane { .. }, Shape::HalfPlane { .. }) => {}
    }
}

fn near_existing(existing: &[ContactGeom], p: Vec2, tol: f64) -> bool {
    existing.iter().any(|c| (c.point - p).norm() < tol)
}

fn flip(c: ContactGeom) -> ContactGeom {
    ContactGeom { point: c.point, normal: -c.normal, depth: c.depth, feature: c.feature }
}

/// Tangent direction for a contact normal (counterclockwise perpendicular).
#[inline]
pub fn tangent_of(normal: Vec2) -> Vec2 {
    perp(normal)
}
