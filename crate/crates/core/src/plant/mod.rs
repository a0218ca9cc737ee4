//! Fixed-step planar rigid-body world for the two-fingered hand.
//!
//! The hand base is kinematic (its trajectory is prescribed per scenario);
//! each finger is a 2-link chain integrated in joint space with the motor
//! rotor inertia and viscous friction reflected through the transmission.
//! Objects are free rigid bodies. All interaction goes through the penalty
//! contact model in [`contact`]; everything advances by semi-implicit Euler
//! at a fixed step, so a run is bit-reproducible.

pub mod contact;
pub mod shape;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::kinematics::{perp, FingerGeometry};
use crate::transmission::JointTorques;
use crate::{Mat2, Vec2};
use contact::{FrictionAnchor, FrictionRegime, ResolvedContact};
use shape::{ContactGeom, Pose2, Shape};

pub use contact::ContactParams;

/// Identity of a colliding body.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ColliderId {
    /// `link` 0 is proximal, 1 is distal.
    Link { finger: u8, link: u8 },
    Palm,
    Object(u16),
    Static(u16),
}

impl ColliderId {
    pub fn label(&self) -> String {
        match self {
            ColliderId::Link { finger, link } => {
                let f = if *finger == 0 { "l" } else { "r" };
                format!("finger_{f}_link{}", link + 1)
            }
            ColliderId::Palm => String::from("palm"),
            ColliderId::Object(i) => format!("object{i}"),
            ColliderId::Static(i) => format!("static{i}"),
        }
    }
}

/// Friction class of a body, used to look up the pair coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BodyClass {
    Hand,
    Object,
    Ground,
}

/// Friction coefficients per body-class pair.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrictionTable {
    /// Rubber fingertip on manipulated objects.
    pub hand_object: f64,
    /// Fingertip on table/ground.
    pub hand_ground: f64,
    /// Object on table/ground.
    pub object_ground: f64,
    pub object_object: f64,
}

impl Default for FrictionTable {
    fn default() -> Self {
        Self { hand_object: 0.8, hand_ground: 0.6, object_ground: 0.3, object_object: 0.5 }
    }
}

impl FrictionTable {
    pub fn lookup(&self, a: BodyClass, b: BodyClass) -> f64 {
        use BodyClass::*;
        match (a, b) {
            (Hand, Object) | (Object, Hand) => self.hand_object,
            (Hand, Ground) | (Ground, Hand) => self.hand_ground,
            (Object, Ground) | (Ground, Object) => self.object_ground,
            (Object, Object) => self.object_object,
            // Hand-hand and ground-ground pairs are never generated.
            _ => 0.5,
        }
    }
}

/// One-sided spring-damper joint stops.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointLimitParams {
    /// N·m/rad.
    pub stiffness: f64,
    /// N·m·s/rad.
    pub damping: f64,
}

impl Default for JointLimitParams {
    fn default() -> Self {
        Self { stiffness: 20.0, damping: 0.05 }
    }
}

/// Global world constants.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WorldParams {
    pub gravity: Vec2,
    pub contact: ContactParams,
    pub friction: FrictionTable,
    pub joint_limits: JointLimitParams,
}

impl Default for WorldParams {
    fn default() -> Self {
        Self {
            gravity: Vec2::new(0.0, -9.81),
            contact: ContactParams::default(),
            friction: FrictionTable::default(),
            joint_limits: JointLimitParams::default(),
        }
    }
}

/// A free rigid body (ball, coin, bar).
#[derive(Clone, Debug)]
pub struct ObjectBody {
    pub name: String,
    pub shape: Shape,
    /// Shape frame relative to the center of mass (body frame); lets a bar
    /// carry an offset center of mass.
    pub shape_offset: Vec2,
    /// Center-of-mass pose.
    pub pose: Pose2,
    pub vel: Vec2,
    pub omega: f64,
    pub mass: f64,
    pub inertia: f64,
    force: Vec2,
    torque: f64,
}

impl ObjectBody {
    pub fn new(name: &str, shape: Shape, mass: f64, inertia: f64, pose: Pose2) -> Self {
        Self {
            name: String::from(name),
            shape,
            shape_offset: Vec2::zeros(),
            pose,
            vel: Vec2::zeros(),
            omega: 0.0,
            mass,
            inertia,
            force: Vec2::zeros(),
            torque: 0.0,
        }
    }

    /// World pose of the collision shape.
    pub fn shape_pose(&self) -> Pose2 {
        Pose2 { pos: self.pose.transform(self.shape_offset), angle: self.pose.angle }
    }

    fn point_velocity(&self, p: Vec2) -> Vec2 {
        self.vel + perp(p - self.pose.pos) * self.omega
    }

    fn apply_force_at(&mut self, f: Vec2, p: Vec2) {
        self.force += f;
        self.torque += (p - self.pose.pos).perp(&f);
    }
}

/// An immovable body (table, ground plane).
#[derive(Clone, Debug)]
pub struct StaticBody {
    pub name: String,
    pub shape: Shape,
    pub pose: Pose2,
}

/// Per-link mass properties of a finger.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinkParams {
    /// Masses of the proximal and distal links, kg.
    pub masses: [f64; 2],
    /// Collision radius of the link capsules, m.
    pub radius: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self { masses: [0.012, 0.008], radius: 0.007 }
    }
}

/// One finger in the world: geometry plus joint-space dynamic state.
#[derive(Clone, Debug)]
pub struct FingerBody {
    pub geometry: FingerGeometry,
    pub links: LinkParams,
    /// Joint angles, rad.
    pub theta: Vec2,
    /// Joint velocities, rad/s.
    pub omega: Vec2,
    /// Rotor inertia reflected through the transmission, added to the
    /// link-side mass matrix.
    pub reflected_inertia: Mat2,
    /// Rotor viscous friction reflected the same way.
    pub reflected_damping: Mat2,
    tau_contact: Vec2,
}

impl FingerBody {
    pub fn new(geometry: FingerGeometry, links: LinkParams) -> Self {
        Self {
            geometry,
            links,
            theta: Vec2::zeros(),
            omega: Vec2::zeros(),
            reflected_inertia: Mat2::zeros(),
            reflected_damping: Mat2::zeros(),
            tau_contact: Vec2::zeros(),
        }
    }

    /// Set the reflected rotor terms from the transmission map `q = A theta`
    /// (`A` the joint-to-motor matrix): `M_ref = A^T J_r A`, `B_ref = A^T b A`.
    pub fn set_reflected_rotor(
        &mut self,
        joint_to_motor: &Mat2,
        rotor_inertia: f64,
        rotor_friction: f64,
    ) {
        let a = joint_to_motor;
        self.reflected_inertia = a.transpose() * *a * rotor_inertia;
        self.reflected_damping = a.transpose() * *a * rotor_friction;
    }

    /// Link-side mass matrix of the 2R chain (lumped rod links), plus the
    /// reflected rotor inertia.
    pub fn mass_matrix(&self) -> Mat2 {
        let g = &self.geometry;
        let [m1, m2] = self.links.masses;
        let lc1 = 0.5 * g.l1;
        let lc2 = 0.5 * g.l2;
        let i1 = m1 * g.l1 * g.l1 / 12.0;
        let i2 = m2 * g.l2 * g.l2 / 12.0;
        let c2 = libm::cos(self.theta.y);
        let m11 =
            m1 * lc1 * lc1 + i1 + m2 * (g.l1 * g.l1 + lc2 * lc2 + 2.0 * g.l1 * lc2 * c2) + i2;
        let m12 = m2 * (lc2 * lc2 + g.l1 * lc2 * c2) + i2;
        let m22 = m2 * lc2 * lc2 + i2;
        Mat2::new(m11, m12, m12, m22) + self.reflected_inertia
    }

    /// Coriolis/centrifugal torque `C(theta, omega) * omega`.
    fn coriolis(&self) -> Vec2 {
        let g = &self.geometry;
        let m2 = self.links.masses[1];
        let h = -m2 * g.l1 * (0.5 * g.l2) * libm::sin(self.theta.y);
        let (w1, w2) = (self.omega.x, self.omega.y);
        Vec2::new(h * w2 * w1 + h * (w1 + w2) * w2, -h * w1 * w1)
    }

    /// Generalized gravity torque for a hand-frame gravity vector.
    fn gravity_torque(&self, joints: &[Vec2; 3], g_hand: Vec2) -> Vec2 {
        let [m1, m2] = self.links.masses;
        let com1 = (joints[0] + joints[1]) * 0.5;
        let com2 = (joints[1] + joints[2]) * 0.5;
        let j1 = self.geometry.point_jacobian(joints, 0, com1);
        let j2 = self.geometry.point_jacobian(joints, 1, com2);
        j1.transpose() * (g_hand * m1) + j2.transpose() * (g_hand * m2)
    }

    /// One-sided joint stop torques.
    fn limit_torque(&self, limits: &JointLimitParams) -> Vec2 {
        let g = &self.geometry;
        let mut tau = Vec2::zeros();
        for (i, (lo, hi)) in [g.theta1_limits, g.theta2_limits].iter().enumerate() {
            let th = self.theta[i];
            let w = self.omega[i];
            if th < *lo {
                tau[i] += (limits.stiffness * (lo - th) - limits.damping * w).max(0.0);
            } else if th > *hi {
                tau[i] += (-limits.stiffness * (th - hi) - limits.damping * w).min(0.0);
            }
        }
        tau
    }
}

/// Palm collider: a capsule fixed in the hand frame between the fingers.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PalmGeometry {
    pub half_length: f64,
    pub radius: f64,
    /// Center in the hand frame.
    pub center: Vec2,
}

impl Default for PalmGeometry {
    fn default() -> Self {
        Self { half_length: 0.045, radius: 0.01, center: Vec2::new(0.0, 0.002) }
    }
}

/// The kinematic hand: prescribed base motion carrying two fingers + palm.
#[derive(Clone, Debug)]
pub struct Hand {
    /// Hand frame in the world. The orientation is fixed per scenario.
    pub pose: Pose2,
    /// Prescribed base velocity (world frame).
    pub vel: Vec2,
    /// Prescribed base acceleration (world frame), used for the inertial
    /// term on the finger links.
    pub accel: Vec2,
    pub fingers: [FingerBody; 2],
    pub palm: Option<PalmGeometry>,
}

impl Hand {
    /// Fingertip position of `finger` in the hand frame.
    pub fn fingertip(&self, finger: usize) -> Vec2 {
        let f = &self.fingers[finger];
        f.geometry.fingertip(f.theta)
    }

    /// Fingertip position in the world frame.
    pub fn fingertip_world(&self, finger: usize) -> Vec2 {
        self.pose.transform(self.fingertip(finger))
    }
}

/// A contact resolved during the last step, for telemetry and metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactRecord {
    pub a: ColliderId,
    pub b: ColliderId,
    pub point: Vec2,
    pub normal: Vec2,
    pub depth: f64,
    pub normal_force: f64,
    pub tangential_force: f64,
    pub stretch: f64,
    pub regime: FrictionRegime,
}

impl ContactRecord {
    /// Force this contact applies to the given collider, world frame.
    pub fn force_on(&self, id: ColliderId) -> Vec2 {
        let f = self.normal * self.normal_force
            + shape::tangent_of(self.normal) * self.tangential_force;
        if id == self.b {
            f
        } else if id == self.a {
            -f
        } else {
            Vec2::zeros()
        }
    }

    pub fn involves(&self, id: ColliderId) -> bool {
        self.a == id || self.b == id
    }
}

/// An external wrench scheduled onto an object for a time window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduledWrench {
    pub object: usize,
    pub force: Vec2,
    pub torque: f64,
    pub t_start: f64,
    pub t_end: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WorldError {
    UnknownObject { name: String },
    Divergence { t: f64, detail: String },
}

impl core::fmt::Display for WorldError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::UnknownObject { name } => write!(f, "no object named '{name}'"),
            Self::Divergence { t, detail } => {
                write!(f, "simulation diverged at t={t:.6}s: {detail}")
            }
        }
    }
}

type AnchorKey = (ColliderId, ColliderId, u8);

/// The complete world state.
#[derive(Clone, Debug)]
pub struct World {
    pub params: WorldParams,
    pub hand: Hand,
    pub objects: Vec<ObjectBody>,
    pub statics: Vec<StaticBody>,
    pub t: f64,
    pub steps: u64,
    anchors: BTreeMap<AnchorKey, FrictionAnchor>,
    wrenches: Vec<ScheduledWrench>,
    contacts: Vec<ContactRecord>,
}

impl World {
    pub fn new(params: WorldParams, hand: Hand) -> Self {
        Self {
            params,
            hand,
            objects: Vec::new(),
            statics: Vec::new(),
            t: 0.0,
            steps: 0,
            anchors: BTreeMap::new(),
            wrenches: Vec::new(),
            contacts: Vec::new(),
        }
    }

    pub fn add_object(&mut self, body: ObjectBody) -> usize {
        self.objects.push(body);
        self.objects.len() - 1
    }

    pub fn add_static(&mut self, body: StaticBody) -> usize {
        self.statics.push(body);
        self.statics.len() - 1
    }

    pub fn object_by_name(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.name == name)
    }

    /// Schedule an external wrench on a named object over `[t_start,
    /// t_start + duration)`.
    pub fn apply_external_wrench(
        &mut self,
        name: &str,
        force: Vec2,
        torque: f64,
        t_start: f64,
        duration: f64,
    ) -> Result<(), WorldError> {
        let object = self
            .object_by_name(name)
            .ok_or_else(|| WorldError::UnknownObject { name: String::from(name) })?;
        self.wrenches.push(ScheduledWrench {
            object,
            force,
            torque,
            t_start,
            t_end: t_start + duration,
        });
        Ok(())
    }

    /// Contacts resolved during the most recent step.
    pub fn contacts(&self) -> &[ContactRecord] {
        &self.contacts
    }

    /// Net contact force on the distal tip region of a finger, hand frame.
    pub fn fingertip_wrench(&self, finger: usize) -> Vec2 {
        let tip = self.hand.fingertip_world(finger);
        let id = ColliderId::Link { finger: finger as u8, link: 1 };
        let reach = 2.5 * self.hand.fingers[finger].links.radius;
        let mut total = Vec2::zeros();
        for c in &self.contacts {
            if c.involves(id) && (c.point - tip).norm() <= reach {
                total += c.force_on(id);
            }
        }
        self.hand.pose.inv_rotate(total)
    }

    /// World collider of a finger link, built from its joint endpoints.
    fn link_collider(&self, finger: usize, link: usize) -> (Shape, Pose2) {
        let f = &self.hand.fingers[finger];
        let joints = f.geometry.joint_points(f.theta);
        let a = self.hand.pose.transform(joints[link]);
        let b = self.hand.pose.transform(joints[link + 1]);
        let mid = (a + b) * 0.5;
        let d = b - a;
        let len = d.norm();
        let angle = libm::atan2(d.y, d.x);
        (Shape::capsule(0.5 * len, f.links.radius), Pose2 { pos: mid, angle })
    }

    fn palm_collider(&self) -> Option<(Shape, Pose2)> {
        let palm = self.hand.palm?;
        Some((
            Shape::capsule(palm.half_length, palm.radius),
            Pose2 { pos: self.hand.pose.transform(palm.center), angle: self.hand.pose.angle },
        ))
    }

    fn collider(&self, id: ColliderId) -> (Shape, Pose2, BodyClass) {
        match id {
            ColliderId::Link { finger, link } => {
                let (s, p) = self.link_collider(finger as usize, link as usize);
                (s, p, BodyClass::Hand)
            }
            ColliderId::Palm => {
                let (s, p) = self.palm_collider().expect("palm enabled");
                (s, p, BodyClass::Hand)
            }
            ColliderId::Object(i) => {
                let o = &self.objects[i as usize];
                (o.shape, o.shape_pose(), BodyClass::Object)
            }
            ColliderId::Static(i) => {
                let s = &self.statics[i as usize];
                (s.shape, s.pose, BodyClass::Ground)
            }
        }
    }

    /// Velocity of the material point `p` (world) on the collider.
    fn point_velocity(&self, id: ColliderId, p: Vec2) -> Vec2 {
        match id {
            ColliderId::Link { finger, link } => {
                let f = &self.hand.fingers[finger as usize];
                let joints_hand = f.geometry.joint_points(f.theta);
                let p_hand = self.hand.pose.inv_transform(p);
                let j = f.geometry.point_jacobian(&joints_hand, link as usize, p_hand);
                self.hand.vel + self.hand.pose.rotate(j * f.omega)
            }
            ColliderId::Palm => self.hand.vel,
            ColliderId::Object(i) => self.objects[i as usize].point_velocity(p),
            ColliderId::Static(_) => Vec2::zeros(),
        }
    }

    fn apply_contact_force(&mut self, id: ColliderId, f_world: Vec2, p: Vec2) {
        match id {
            ColliderId::Link { finger, link } => {
                let hand_pose = self.hand.pose;
                let fb = &mut self.hand.fingers[finger as usize];
                let joints_hand = fb.geometry.joint_points(fb.theta);
                let p_hand = hand_pose.inv_transform(p);
                let f_hand = hand_pose.inv_rotate(f_world);
                let j = fb.geometry.point_jacobian(&joints_hand, link as usize, p_hand);
                fb.tau_contact += j.transpose() * f_hand;
            }
            ColliderId::Object(i) => self.objects[i as usize].apply_force_at(f_world, p),
            // Forces on the palm and statics sink into the kinematic base.
            ColliderId::Palm | ColliderId::Static(_) => {}
        }
    }

    fn collider_ids(&self) -> Vec<ColliderId> {
        let mut ids = Vec::new();
        for f in 0..2u8 {
            ids.push(ColliderId::Link { finger: f, link: 0 });
            ids.push(ColliderId::Link { finger: f, link: 1 });
        }
        if self.hand.palm.is_some() {
            ids.push(ColliderId::Palm);
        }
        for i in 0..self.objects.len() {
            ids.push(ColliderId::Object(i as u16));
        }
        for i in 0..self.statics.len() {
            ids.push(ColliderId::Static(i as u16));
        }
        ids
    }

    fn pair_active(a: ColliderId, b: ColliderId) -> bool {
        use ColliderId::*;
        match (a, b) {
            // Fingers never collide with each other or the palm.
            (Link { .. } | Palm, Link { .. } | Palm) => false,
            (Static(_), Static(_)) => false,
            _ => true,
        }
    }

    /// Geometric contact sweep over all active pairs at the current state.
    fn detect_geoms(&self) -> Vec<(ColliderId, ColliderId, ContactGeom)> {
        let ids = self.collider_ids();
        let mut found = Vec::new();
        let mut tmp: Vec<ContactGeom> = Vec::with_capacity(8);
        for i in 0..ids.len() {
            for j in (i + 1)..ids.len() {
                let (a, b) = (ids[i], ids[j]);
                if !Self::pair_active(a, b) {
                    continue;
                }
                let (sa, pa, _) = self.collider(a);
                let (sb, pb, _) = self.collider(b);
                tmp.clear();
                shape::contacts_between(&sa, &pa, &sb, &pb, &mut tmp);
                found.extend(tmp.iter().map(|g| (a, b, *g)));
            }
        }
        found
    }

    /// Advance the world one fixed step under the given commanded joint
    /// torques (already produced by the motor stage).
    pub fn step(&mut self, joint_torques: [JointTorques; 2], dt: f64) -> Result<(), WorldError> {
        self.contacts.clear();
        for f in self.hand.fingers.iter_mut() {
            f.tau_contact = Vec2::zeros();
        }
        for o in self.objects.iter_mut() {
            o.force = Vec2::zeros();
            o.torque = 0.0;
        }

        // Scheduled external wrenches.
        for wi in 0..self.wrenches.len() {
            let w = self.wrenches[wi];
            if self.t >= w.t_start && self.t < w.t_end {
                let o = &mut self.objects[w.object];
                o.force += w.force;
                o.torque += w.torque;
            }
        }

        // Contact detection and resolution.
        let geoms = self.detect_geoms();
        let mut touched: Vec<AnchorKey> = Vec::new();
        for (a, b, geom) in geoms {
            let (_, pa, ca) = self.collider(a);
            let (_, pb, cb) = self.collider(b);
            let mu = self.params.friction.lookup(ca, cb);
            let key = (a, b, geom.feature);
            let mut anchor = self
                .anchors
                .get(&key)
                .copied()
                .unwrap_or_else(|| FrictionAnchor::at_point(geom.point, &pa, &pb));
            let rel_vel = self.point_velocity(b, geom.point) - self.point_velocity(a, geom.point);
            let resolved: ResolvedContact = contact::resolve_contact(
                &geom,
                &pa,
                &pb,
                rel_vel,
                mu,
                &self.params.contact,
                &mut anchor,
            );
            self.anchors.insert(key, anchor);
            touched.push(key);
            self.apply_contact_force(b, resolved.force_on_b, geom.point);
            self.apply_contact_force(a, -resolved.force_on_b, geom.point);
            self.contacts.push(ContactRecord {
                a,
                b,
                point: geom.point,
                normal: geom.normal,
                depth: geom.depth,
                normal_force: resolved.normal_force,
                tangential_force: resolved.tangential_force,
                stretch: resolved.stretch,
                regime: resolved.regime,
            });
        }
        // Drop anchors of pairs that separated.
        self.anchors.retain(|k, _| touched.contains(k));

        // Finger joint-space integration.
        let g_world = self.params.gravity;
        let g_hand = self.hand.pose.inv_rotate(g_world - self.hand.accel);
        for (fi, f) in self.hand.fingers.iter_mut().enumerate() {
            let joints = f.geometry.joint_points(f.theta);
            let tau = joint_torques[fi].0
                + f.tau_contact
                + f.limit_torque(&self.params.joint_limits)
                + f.gravity_torque(&joints, g_hand)
                - f.coriolis()
                - f.reflected_damping * f.omega;
            let m = f.mass_matrix();
            let acc = m.try_inverse().map(|mi| mi * tau).unwrap_or_else(Vec2::zeros);
            f.omega += acc * dt;
            f.theta += f.omega * dt;
        }

        // Object integration.
        for o in self.objects.iter_mut() {
            let acc = o.force / o.mass + g_world;
            o.vel += acc * dt;
            o.omega += o.torque / o.inertia * dt;
            o.pose.pos += o.vel * dt;
            o.pose.angle += o.omega * dt;
        }

        // Kinematic hand base.
        self.hand.pose.pos += self.hand.vel * dt;

        self.t += dt;
        self.steps += 1;
        self.check_divergence()
    }

    fn check_divergence(&self) -> Result<(), WorldError> {
        for (fi, f) in self.hand.fingers.iter().enumerate() {
            if !f.theta.x.is_finite()
                || !f.theta.y.is_finite()
                || f.omega.norm() > 2e4
                || f.theta.norm() > 1e3
            {
                return Err(WorldError::Divergence {
                    t: self.t,
                    detail: format!("finger {fi} state theta={:?} omega={:?}", f.theta, f.omega),
                });
            }
        }
        for o in &self.objects {
            if !o.pose.pos.x.is_finite()
                || !o.pose.pos.y.is_finite()
                || o.vel.norm() > 1e3
                || libm::fabs(o.omega) > 1e5
            {
                return Err(WorldError::Divergence {
                    t: self.t,
                    detail: format!("object '{}' pos={:?} vel={:?}", o.name, o.pose.pos, o.vel),
                });
            }
        }
        Ok(())
    }

    /// Total mechanical energy: kinetic + gravitational + energy stored in
    /// the contact and joint-limit springs. Used by the passivity tests.
    pub fn mechanical_energy(&self) -> f64 {
        let mut e = 0.0;
        let g = self.params.gravity;
        for o in &self.objects {
            e += 0.5 * o.mass * o.vel.norm_squared() + 0.5 * o.inertia * o.omega * o.omega;
            e -= o.mass * g.dot(&o.pose.pos);
        }
        for f in &self.hand.fingers {
            let m = f.mass_matrix();
            e += 0.5 * f.omega.dot(&(m * f.omega));
            let joints = f.geometry.joint_points(f.theta);
            let com1 = self.hand.pose.transform((joints[0] + joints[1]) * 0.5);
            let com2 = self.hand.pose.transform((joints[1] + joints[2]) * 0.5);
            e -= f.links.masses[0] * g.dot(&com1) + f.links.masses[1] * g.dot(&com2);
            let lim = &self.params.joint_limits;
            for (i, (lo, hi)) in
                [f.geometry.theta1_limits, f.geometry.theta2_limits].iter().enumerate()
            {
                let th = f.theta[i];
                if th < *lo {
                    e += 0.5 * lim.stiffness * (lo - th) * (lo - th);
                } else if th > *hi {
                    e += 0.5 * lim.stiffness * (th - hi) * (th - hi);
                }
            }
        }
        // Spring energy from a fresh geometric sweep so the depths are
        // consistent with the state being measured.
        for (a, b, geom) in self.detect_geoms() {
            e += 0.5 * self.params.contact.normal_stiffness * geom.depth * geom.depth;
            if let Some(anchor) = self.anchors.get(&(a, b, geom.feature)) {
                let (_, pa, _) = self.collider(a);
                let (_, pb, _) = self.collider(b);
                let t = shape::tangent_of(geom.normal);
                let stretch = (pb.transform(anchor.local_b) - pa.transform(anchor.local_a)).dot(&t);
                e += 0.5 * self.params.contact.tangential_stiffness * stretch * stretch;
            }
        }
        e
    }
}
