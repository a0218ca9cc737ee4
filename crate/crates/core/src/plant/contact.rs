//! Penalty contact forces with regularized Coulomb friction.
//!
//! Normal force is a one-sided spring-damper on the penetration, clamped so
//! contact never pulls. Friction is an anchored tangential spring: while the
//! required force stays under `mu * F_n` the contact sticks to material
//! anchor points remembered on both bodies; beyond that it slips at exactly
//! `mu * F_n` and the anchors are dragged along, which dissipates energy.

use crate::plant::shape::{tangent_of, ContactGeom, Pose2};
use crate::Vec2;

/// Penalty and friction-regularization constants.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContactParams {
    /// Normal penetration stiffness, N/m.
    pub normal_stiffness: f64,
    /// Normal penetration damping, N·s/m.
    pub normal_damping: f64,
    /// Tangential (stick) stiffness, N/m.
    pub tangential_stiffness: f64,
    /// Tangential damping, N·s/m.
    pub tangential_damping: f64,
}

impl Default for ContactParams {
    fn default() -> Self {
        Self {
            normal_stiffness: 2e4,
            normal_damping: 50.0,
            tangential_stiffness: 2e4,
            tangential_damping: 20.0,
        }
    }
}

/// Stick or slip state of a resolved contact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FrictionRegime {
    Stick,
    Slip,
}

/// Material anchor points of a sticking contact, in each body's local frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrictionAnchor {
    pub local_a: Vec2,
    pub local_b: Vec2,
}

impl FrictionAnchor {
    pub fn at_point(point: Vec2, pose_a: &Pose2, pose_b: &Pose2) -> Self {
        Self { local_a: pose_a.inv_transform(point), local_b: pose_b.inv_transform(point) }
    }
}

/// Fully resolved contact force.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolvedContact {
    /// Scalar normal force, >= 0.
    pub normal_force: f64,
    /// Scalar tangential force along `tangent_of(normal)`, applied to B.
    pub tangential_force: f64,
    /// Tangential spring stretch after this step (for energy accounting).
    pub stretch: f64,
    pub regime: FrictionRegime,
    /// Total force applied to body B at the contact point (A gets the
    /// negative).
    pub force_on_b: Vec2,
}

/// Resolve one contact given the geometric contact, the world poses of both
/// bodies, the relative velocity `v_b - v_a` at the contact point, and the
/// (possibly fresh) friction anchor, which is updated in place.
pub fn resolve_contact(
    geom: &ContactGeom,
    pose_a: &Pose2,
    pose_b: &Pose2,
    rel_vel: Vec2,
    mu: f64,
    params: &ContactParams,
    anchor: &mut FrictionAnchor,
) -> ResolvedContact {
    let n = geom.normal;
    let t = tangent_of(n);

    // Positive when the bodies keep approaching.
    let pen_rate = -rel_vel.dot(&n);
    let normal_force =
        (params.normal_stiffness * geom.depth + params.normal_damping * pen_rate).max(0.0);

    let wa = pose_a.transform(anchor.local_a);
    let wb = pose_b.transform(anchor.local_b);
    let stretch = (wb - wa).dot(&t);
    let v_t = rel_vel.dot(&t);
    let stick_force = -(params.tangential_stiffness * stretch + params.tangential_damping * v_t);
    let cap = mu * normal_force;

    let (tangential_force, regime, new_stretch) = if libm::fabs(stick_force) <= cap {
        (stick_force, FrictionRegime::Stick, stretch)
    } else {
        let f = if stick_force > 0.0 { cap } else { -cap };
        // Drag the anchors so the spring carries exactly the slip force.
        let target_stretch = -f / params.tangential_stiffness;
        *anchor = FrictionAnchor {
            local_a: pose_a.inv_transform(geom.point),
            local_b: pose_b.inv_transform(geom.point + t * target_stretch),
        };
        (f, FrictionRegime::Slip, target_stretch)
    };

    ResolvedContact {
        normal_force,
        tangential_force,
        stretch: new_stretch,
        regime,
        force_on_b: n * normal_force + t * tangential_force,
    }
}
