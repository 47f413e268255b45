//! Poincaré disk primitives: points, geodesics and isometries.
//!
//! Isometries are stored as `[[a, b], [conj(b), conj(a)]]` with
//! `|a|² - |b|² = 1` plus an orientation flag. An orientation-reversing
//! isometry acts as `z ↦ (a·z̄ + b) / (b̄·z̄ + ā)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for algebraic identities (determinants, involutions).
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for constructed geometry (feet, intersections).
pub const GEOMETRIC_TOL: f64 = 1e-9;

/// Above this size the determinant can no longer be evaluated to better
/// than ~1e-13 relative error, so renormalizing would only inject noise.
const RENORMALIZE_LIMIT: f64 = 1e3;

/// Sign ties in canonicalization are decided by the next entry once the
/// deciding component is this small.
const CANONICAL_TIE: f64 = 1e-12;

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub re: f64,
    pub im: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        let p = DiskPoint { re, im };
        if !(re.is_finite() && im.is_finite()) || p.norm_sqr() >= 1.0 {
            return Err(Error::OutsideDisk { re, im });
        }
        Ok(p)
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    /// Point at hyperbolic distance `d` from the origin in direction `theta`.
    pub fn at_distance(d: f64, theta: f64) -> Self {
        let r = (0.5 * d).tanh();
        Self::clamp(Complex64::from_polar(r, theta))
    }

    pub(crate) fn clamp(z: Complex64) -> Self {
        let n = z.norm();
        if n < 1.0 {
            DiskPoint { re: z.re, im: z.im }
        } else {
            // only reachable through rounding at the rim
            let s = (1.0 - f64::EPSILON) / n;
            DiskPoint { re: z.re * s, im: z.im * s }
        }
    }

    pub fn z(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn norm(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn neg(self) -> Self {
        DiskPoint { re: -self.re, im: -self.im }
    }

    /// Euclidean distance in the disk chart; used for tolerance checks.
    pub fn chart_distance(self, other: DiskPoint) -> f64 {
        (self.z() - other.z()).norm()
    }

    pub(crate) fn to_klein(self) -> [f64; 2] {
        let s = 2.0 / (1.0 + self.norm_sqr());
        [self.re * s, self.im * s]
    }

    pub(crate) fn from_klein(k: [f64; 2]) -> Option<Self> {
        let r2 = k[0] * k[0] + k[1] * k[1];
        if r2 >= 1.0 {
            return None;
        }
        let s = 1.0 / (1.0 + (1.0 - r2).sqrt());
        Some(DiskPoint { re: k[0] * s, im: k[1] * s })
    }
}

/// Hyperbolic distance between two disk points.
pub fn dist(p: DiskPoint, q: DiskPoint) -> f64 {
    let num = (p.z() - q.z()).norm();
    let den = (Complex64::new(1.0, 0.0) - p.z().conj() * q.z()).norm();
    2.0 * (num / den).min(1.0).atanh()
}

/// Angle at `vertex` between the geodesic rays towards `a` and `b`, in `[0, π]`.
pub fn angle_at(vertex: DiskPoint, a: DiskPoint, b: DiskPoint) -> f64 {
    let t = Isometry::to_origin(vertex);
    let ua = t.apply_complex(a.z());
    let ub = t.apply_complex(b.z());
    wrap_pi(ub.arg() - ua.arg()).abs()
}

/// Point at fraction `t` of the geodesic segment from `p` to `q`.
pub fn point_along(p: DiskPoint, q: DiskPoint, t: f64) -> DiskPoint {
    let to = Isometry::to_origin(p);
    let qq = to.apply_complex(q.z());
    if qq.norm() == 0.0 {
        return p;
    }
    let d = 2.0 * qq.norm().atanh();
    let r = (0.5 * t * d).tanh();
    let moved = qq.unscale(qq.norm()).scale(r);
    to.inverse().apply(DiskPoint::clamp(moved))
}

pub fn midpoint(p: DiskPoint, q: DiskPoint) -> DiskPoint {
    point_along(p, q, 0.5)
}

/// Reduce an angle to `(-π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Reduce an angle to `[0, 2π)`, snapping values within 1e-12 of 2π to 0.
pub fn wrap_tau(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if TAU - y < ALGEBRAIC_TOL {
        0.0
    } else {
        y
    }
}

/// A complete geodesic, given by its two ideal endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    theta1: f64,
    theta2: f64,
}

impl Geodesic {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        let (t1, t2) = (wrap_tau(theta1), wrap_tau(theta2));
        if wrap_pi(t2 - t1).abs() < ALGEBRAIC_TOL {
            return Err(Error::DegenerateGeodesic);
        }
        Ok(Geodesic { theta1: t1, theta2: t2 })
    }

    /// The geodesic perpendicular to the ray at angle `phi` from the origin,
    /// at hyperbolic distance `a` from the origin.
    pub fn perpendicular_to_ray(phi: f64, a: f64) -> Result<Self> {
        // half-width of the ideal arc: cos β = tanh a
        let beta = a.tanh().acos();
        Self::new(phi - beta, phi + beta)
    }

    /// The geodesic through two distinct points.
    pub fn through(p: DiskPoint, q: DiskPoint) -> Result<Self> {
        let to = Isometry::to_origin(p);
        let qq = to.apply_complex(q.z());
        if qq.norm() < ALGEBRAIC_TOL {
            return Err(Error::DegenerateGeodesic);
        }
        let back = to.inverse();
        let dir = qq.arg();
        Self::new(back.apply_boundary(dir + PI), back.apply_boundary(dir))
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn endpoints(&self) -> (Complex64, Complex64) {
        (
            Complex64::from_polar(1.0, self.theta1),
            Complex64::from_polar(1.0, self.theta2),
        )
    }

    /// Direction of the closest point to the origin and the half-width of the
    /// ideal arc on that side, `β ∈ (0, π/2]`.
    fn arc_center(&self) -> (f64, f64) {
        let delta = (self.theta2 - self.theta1).rem_euclid(TAU);
        if delta <= PI {
            (self.theta1 + 0.5 * delta, 0.5 * delta)
        } else {
            (self.theta2 + 0.5 * (TAU - delta), 0.5 * (TAU - delta))
        }
    }

    /// Point of the geodesic closest to the origin.
    pub fn closest_to_origin(&self) -> DiskPoint {
        let (psi, beta) = self.arc_center();
        DiskPoint::clamp(Complex64::from_polar((FRAC_PI_4 - 0.5 * beta).tan(), psi))
    }

    /// Hyperbolic distance from the origin, and the direction of the foot.
    pub fn distance_from_origin(&self) -> (f64, f64) {
        let (psi, beta) = self.arc_center();
        (beta.cos().atanh(), wrap_tau(psi))
    }

    /// Klein-model chord as `(unit normal, offset)` with `x·normal = offset`.
    pub(crate) fn klein_line(&self) -> ([f64; 2], f64) {
        let (psi, beta) = self.arc_center();
        ([psi.cos(), psi.sin()], beta.cos())
    }

    /// Hyperbolic distance from `p` to this geodesic.
    pub fn distance_to(&self, p: DiskPoint) -> f64 {
        dist(p, foot_of_perpendicular(self, p))
    }

    pub fn contains(&self, p: DiskPoint, tol: f64) -> bool {
        self.distance_to(p) <= tol
    }

    /// True when both geodesics have the same unordered pair of endpoints.
    pub fn same_as(&self, other: &Geodesic, tol: f64) -> bool {
        let d = |a: f64, b: f64| wrap_pi(a - b).abs();
        (d(self.theta1, other.theta1) < tol && d(self.theta2, other.theta2) < tol)
            || (d(self.theta1, other.theta2) < tol && d(self.theta2, other.theta1) < tol)
    }

    fn image(&self, f: &Isometry) -> Result<Geodesic> {
        Geodesic::new(f.apply_boundary(self.theta1), f.apply_boundary(self.theta2))
    }
}

/// Foot of the perpendicular dropped from `p` onto `g`.
pub fn foot_of_perpendicular(g: &Geodesic, p: DiskPoint) -> DiskPoint {
    let to = Isometry::to_origin(p);
    match g.image(&to) {
        Ok(moved) => to.inverse().apply(moved.closest_to_origin()),
        Err(_) => p,
    }
}

/// Crossing point of two geodesics and the angle there between the rays
/// heading to each geodesic's first endpoint. `None` when they do not meet
/// inside the disk.
pub fn intersect_angle(g1: &Geodesic, g2: &Geodesic) -> Option<(DiskPoint, f64)> {
    // Endpoints must interleave on the circle.
    let inside = |t: f64, from: f64, to: f64| {
        let span = (to - from).rem_euclid(TAU);
        let off = (t - from).rem_euclid(TAU);
        off > 0.0 && off < span
    };
    let a = inside(g2.theta1, g1.theta1, g1.theta2);
    let b = inside(g2.theta2, g1.theta1, g1.theta2);
    if a == b {
        return None;
    }
    let p = klein_intersection(g1, g2)?;
    let to = Isometry::to_origin(p);
    let r1 = to.apply_boundary(g1.theta1);
    let r2 = to.apply_boundary(g2.theta1);
    let angle = wrap_pi(r2 - r1).abs();
    Some((p, angle))
}

/// Intersection of the lines carrying two geodesics, if inside the disk.
pub(crate) fn klein_intersection(g1: &Geodesic, g2: &Geodesic) -> Option<DiskPoint> {
    let (n1, c1) = g1.klein_line();
    let (n2, c2) = g2.klein_line();
    let det = n1[0] * n2[1] - n1[1] * n2[0];
    if det.abs() < 1e-15 {
        return None;
    }
    let x = (c1 * n2[1] - c2 * n1[1]) / det;
    let y = (n1[0] * c2 - n2[0] * c1) / det;
    DiskPoint::from_klein([x, y])
}

/// Which isometry to construct.
#[derive(Debug, Clone, Copy)]
pub enum IsometryKind {
    /// Half-turn about a point.
    RotationPi(DiskPoint),
    /// Reflection in a geodesic.
    Reflection(Geodesic),
    /// Translation along an axis by `length`, towards the axis' second endpoint.
    Translation(Geodesic, f64),
}

pub fn make_isometry(kind: IsometryKind) -> Result<Isometry> {
    match kind {
        IsometryKind::RotationPi(c) => Ok(Isometry::rotation_pi(c)),
        IsometryKind::Reflection(g) => Ok(Isometry::reflection(&g)),
        IsometryKind::Translation(g, len) => Isometry::translation(&g, len),
    }
}

/// An isometry of the Poincaré disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    a: Complex64,
    b: Complex64,
    reverses: bool,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
        reverses: false,
    };

    /// Builds an isometry from raw entries, rescaling to unit determinant.
    pub fn new(a: Complex64, b: Complex64, reverses: bool) -> Result<Self> {
        let det = a.norm_sqr() - b.norm_sqr();
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::DegenerateIsometry);
        }
        let s = det.sqrt();
        Ok(Isometry { a: a / s, b: b / s, reverses }.canonical())
    }

    /// Raw constructor for entries already known to lie on the group.
    pub(crate) fn from_entries(a: Complex64, b: Complex64, reverses: bool) -> Self {
        Isometry { a, b, reverses }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn reverses(&self) -> bool {
        self.reverses
    }

    pub fn determinant(&self) -> f64 {
        self.a.norm_sqr() - self.b.norm_sqr()
    }

    /// Rotation by `angle` about the origin.
    pub fn rotation(angle: f64) -> Self {
        Isometry::from_entries(
            Complex64::from_polar(1.0, 0.5 * angle),
            Complex64::new(0.0, 0.0),
            false,
        )
        .canonical()
    }

    /// Translation along the real axis by `length` (towards +1).
    pub fn real_translation(length: f64) -> Self {
        Isometry::from_entries(
            Complex64::new((0.5 * length).cosh(), 0.0),
            Complex64::new((0.5 * length).sinh(), 0.0),
            false,
        )
    }

    /// Complex conjugation, i.e. the reflection in the real axis.
    pub fn conjugation() -> Self {
        Isometry::from_entries(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), true)
    }

    /// `z ↦ (z - p) / (1 - p̄ z)`, moving `p` to the origin.
    pub fn to_origin(p: DiskPoint) -> Self {
        let s = (1.0 - p.norm_sqr()).sqrt();
        Isometry::from_entries(Complex64::new(1.0 / s, 0.0), -p.z() / s, false)
    }

    /// Inverse of [`Isometry::to_origin`], moving the origin to `p`.
    pub fn from_origin(p: DiskPoint) -> Self {
        let s = (1.0 - p.norm_sqr()).sqrt();
        Isometry::from_entries(Complex64::new(1.0 / s, 0.0), p.z() / s, false)
    }

    pub fn rotation_pi(center: DiskPoint) -> Self {
        Self::rotation_about(center, PI)
    }

    pub fn rotation_about(center: DiskPoint, angle: f64) -> Self {
        Self::from_origin(center)
            .compose(&Self::rotation(angle))
            .compose(&Self::to_origin(center))
    }

    /// Reflection in `g`, built by conjugating `z ↦ -z̄` (reflection in the
    /// imaginary axis) to a frame where `g` is that axis.
    pub fn reflection(g: &Geodesic) -> Self {
        let frame = Self::geodesic_frame(g);
        let mirror = Isometry::from_entries(
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
            true,
        );
        frame.compose(&mirror).compose(&frame.inverse())
    }

    /// Isometry sending the imaginary axis onto `g`.
    fn geodesic_frame(g: &Geodesic) -> Self {
        let (a, psi) = g.distance_from_origin();
        Self::rotation(psi).compose(&Self::real_translation(a))
    }

    /// Translation of the given length along `axis`, moving points towards
    /// the axis' second endpoint.
    pub fn translation(axis: &Geodesic, length: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "translation length must be positive, got {length}"
            )));
        }
        let frame = Self::geodesic_frame(axis);
        let up = frame.compose(&Self::rotation(FRAC_PI_2));
        let target = axis.theta2;
        let forward = wrap_pi(up.apply_boundary(0.0) - target).abs()
            < wrap_pi(up.apply_boundary(PI) - target).abs();
        let turn = if forward { FRAC_PI_2 } else { -FRAC_PI_2 };
        let frame = frame.compose(&Self::rotation(turn));
        Ok(frame
            .compose(&Self::real_translation(length))
            .compose(&frame.inverse()))
    }

    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        let w = if self.reverses { z.conj() } else { z };
        (self.a * w + self.b) / (self.b.conj() * w + self.a.conj())
    }

    pub fn apply(&self, p: DiskPoint) -> DiskPoint {
        DiskPoint::clamp(self.apply_complex(p.z()))
    }

    /// Action on the ideal boundary, in angle coordinates.
    pub fn apply_boundary(&self, theta: f64) -> f64 {
        self.apply_complex(Complex64::from_polar(1.0, theta)).arg()
    }

    /// `self ∘ other` without renormalization.
    pub(crate) fn compose_raw(&self, other: &Isometry) -> Isometry {
        let (ga, gb) = if self.reverses {
            (other.a.conj(), other.b.conj())
        } else {
            (other.a, other.b)
        };
        Isometry {
            a: self.a * ga + self.b * gb.conj(),
            b: self.a * gb + self.b * ga.conj(),
            reverses: self.reverses ^ other.reverses,
        }
    }

    /// `self ∘ other`, renormalized and canonicalized.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        self.compose_raw(other).renormalized().canonical()
    }

    pub fn inverse(&self) -> Isometry {
        if self.reverses {
            Isometry { a: self.a, b: -self.b.conj(), reverses: true }
        } else {
            Isometry { a: self.a.conj(), b: -self.b, reverses: false }
        }
        .canonical()
    }

    pub fn power(&self, k: u32) -> Isometry {
        let mut acc = Isometry::IDENTITY;
        for _ in 0..k {
            acc = acc.compose(self);
        }
        acc
    }

    /// Divides by the square root of the determinant while that quantity can
    /// still be computed accurately.
    pub fn renormalized(self) -> Isometry {
        let size = self.a.norm_sqr() + self.b.norm_sqr();
        if size > RENORMALIZE_LIMIT {
            return self;
        }
        let det = self.a.norm_sqr() - self.b.norm_sqr();
        if det > 0.0 {
            let s = det.sqrt();
            Isometry { a: self.a / s, b: self.b / s, reverses: self.reverses }
        } else {
            self
        }
    }

    /// Picks the representative of `±(a, b)` with `Re a > 0`, breaking ties
    /// by `Im a > 0`, then `Re b > 0`, then `Im b ≥ 0`.
    pub fn canonical(self) -> Isometry {
        let scale = self.a.norm().max(self.b.norm()).max(1.0);
        let tie = CANONICAL_TIE * scale;
        let keys = [self.a.re, self.a.im, self.b.re, self.b.im];
        let flip = keys
            .iter()
            .find(|v| v.abs() > tie)
            .map(|v| *v < 0.0)
            .unwrap_or(false);
        if flip {
            Isometry { a: -self.a, b: -self.b, reverses: self.reverses }
        } else {
            self
        }
    }

    /// Translation length `2·arccosh|Re a|`, zero for elliptic and parabolic
    /// elements.
    pub fn translation_length(&self) -> Result<f64> {
        if self.reverses {
            return Err(Error::OrientationReversing);
        }
        let t = self.renormalized().a.re.abs();
        Ok(if t > 1.0 { 2.0 * t.acosh() } else { 0.0 })
    }

    /// `d(o, f(o)) = 2·arccosh|a|`, accurate also for far-away images.
    pub fn origin_displacement(&self) -> f64 {
        2.0 * self.a.norm().max(1.0).acosh()
    }

    /// Largest entrywise deviation from `other`, after canonicalization.
    pub fn deviation(&self, other: &Isometry) -> f64 {
        if self.reverses != other.reverses {
            return f64::INFINITY;
        }
        let (x, y) = (self.canonical(), other.canonical());
        (x.a - y.a).norm().max((x.b - y.b).norm())
    }

    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        self.deviation(other) <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Isometry::IDENTITY, tol)
    }

    /// Hashable key identifying the group element up to `resolution`.
    pub fn key(&self, resolution: f64) -> IsometryKey {
        let c = self.canonical();
        let q = |v: f64| {
            let r = (v / resolution).round();
            // `-0` and `0` collapse
            if r == 0.0 {
                0
            } else {
                r as i64
            }
        };
        IsometryKey {
            entries: [q(c.a.re), q(c.a.im), q(c.b.re), q(c.b.im)],
            reverses: c.reverses,
        }
    }
}

/// Rounded matrix entries used to identify group elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsometryKey {
    pub entries: [i64; 4],
    pub reverses: bool,
}

pub fn compose(f: &Isometry, g: &Isometry) -> Isometry {
    f.compose(g)
}

pub fn apply(f: &Isometry, p: DiskPoint) -> DiskPoint {
    f.apply(p)
}

pub fn translation_length(f: &Isometry) -> Result<f64> {
    f.translation_length()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, rmax: f64) -> DiskPoint {
        let r = rmax * rng.gen::<f64>().sqrt();
        DiskPoint::from_polar(r, rng.gen_range(0.0..TAU)).unwrap()
    }

    fn random_isometry(rng: &mut ChaCha8Rng) -> Isometry {
        let p = random_point(rng, 0.9);
        let f = Isometry::from_origin(p).compose(&Isometry::rotation(rng.gen_range(0.0..TAU)));
        if rng.gen_bool(0.5) {
            f.compose(&Isometry::conjugation())
        } else {
            f
        }
    }

    #[test]
    fn distance_examples() {
        assert_eq!(dist(DiskPoint::ORIGIN, DiskPoint::ORIGIN), 0.0);
        let half = DiskPoint::new(0.5, 0.0).unwrap();
        assert_abs_diff_eq!(dist(DiskPoint::ORIGIN, half), 3f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(dist(DiskPoint::ORIGIN, half), 1.0986123, epsilon = 1e-7);
    }

    #[test]
    fn distance_symmetry_and_triangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (p, q) = (random_point(&mut rng, 0.95), random_point(&mut rng, 0.95));
            assert_abs_diff_eq!(dist(p, q), dist(q, p), epsilon = 1e-12);
        }
        for _ in 0..1000 {
            let (p, q, r) = (
                random_point(&mut rng, 0.95),
                random_point(&mut rng, 0.95),
                random_point(&mut rng, 0.95),
            );
            assert!(dist(p, q) + dist(q, r) - dist(p, r) >= -1e-10);
        }
    }

    #[test]
    fn outside_disk_rejected() {
        assert!(matches!(DiskPoint::new(1.0, 0.0), Err(Error::OutsideDisk { .. })));
        assert!(DiskPoint::new(0.6, 0.79).is_ok());
    }

    #[test]
    fn apply_examples() {
        let p = DiskPoint::new(0.3, 0.2).unwrap();
        assert_eq!(Isometry::IDENTITY.apply(p), p);
        let s = Isometry::rotation_pi(DiskPoint::ORIGIN);
        let q = s.apply(p);
        assert_abs_diff_eq!(q.re, -0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(q.im, -0.2, epsilon = 1e-15);
    }

    #[test]
    fn isometries_preserve_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let f = random_isometry(&mut rng);
            let (p, q) = (random_point(&mut rng, 0.9), random_point(&mut rng, 0.9));
            let fp = f.apply(p);
            assert!(fp.norm() < 1.0);
            assert_abs_diff_eq!(dist(fp, f.apply(q)), dist(p, q), epsilon = 1e-10);
        }
    }

    #[test]
    fn compose_inverse_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let f = random_isometry(&mut rng);
            assert!(f.compose(&f.inverse()).is_identity(1e-12));
            assert!(f.inverse().compose(&f).is_identity(1e-12));
        }
    }

    #[test]
    fn compose_matches_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let (f, g) = (random_isometry(&mut rng), random_isometry(&mut rng));
            let p = random_point(&mut rng, 0.9);
            let a = f.compose(&g).apply(p);
            let b = f.apply(g.apply(p));
            assert!(a.chart_distance(b) < 1e-12);
        }
    }

    #[test]
    fn composition_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let (f, g, h) = (
                random_isometry(&mut rng),
                random_isometry(&mut rng),
                random_isometry(&mut rng),
            );
            let left = f.compose(&g).compose(&h);
            let right = f.compose(&g.compose(&h));
            assert!(left.deviation(&right) < 1e-10);
        }
    }

    #[test]
    fn two_reflections_preserve_orientation() {
        let r1 = Isometry::reflection(&Geodesic::new(0.0, PI).unwrap());
        let r2 = Isometry::reflection(&Geodesic::new(0.3, 2.0).unwrap());
        assert!(r1.reverses() && r2.reverses());
        assert!(!r1.compose(&r2).reverses());
    }

    #[test]
    fn rotation_pi_examples() {
        let s = make_isometry(IsometryKind::RotationPi(DiskPoint::ORIGIN)).unwrap();
        assert_abs_diff_eq!(s.a().re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.a().im, 1.0, epsilon = 1e-15);
        assert_eq!(s.b(), Complex64::new(0.0, 0.0));
        assert!(s.compose(&s).is_identity(1e-12));

        let c = DiskPoint::new(0.4, -0.3).unwrap();
        let s = Isometry::rotation_pi(c);
        assert!(s.apply(c).chart_distance(c) < 1e-14);
        assert!(s.compose(&s).is_identity(1e-12));
    }

    #[test]
    fn translation_example() {
        let axis = Geodesic::new(PI, 0.0).unwrap();
        let t = make_isometry(IsometryKind::Translation(axis, 2.0)).unwrap();
        assert_abs_diff_eq!(t.a().re, 1.0f64.cosh(), epsilon = 1e-12);
        assert_abs_diff_eq!(t.a().im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.b().re, 1.0f64.sinh(), epsilon = 1e-12);
        assert_abs_diff_eq!(t.b().im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.a().re, 1.5430806, epsilon = 1e-7);
        assert_abs_diff_eq!(t.translation_length().unwrap(), 2.0, epsilon = 1e-12);
        assert!(matches!(
            Isometry::translation(&axis, 0.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn translation_along_random_axes() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let g = Geodesic::new(rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)).unwrap();
            let len = rng.gen_range(0.1..4.0);
            let t = Isometry::translation(&g, len).unwrap();
            assert_abs_diff_eq!(t.translation_length().unwrap(), len, epsilon = 1e-9);
            // the axis is invariant and points move towards theta2
            let foot = g.closest_to_origin();
            let moved = t.apply(foot);
            assert!(g.contains(moved, 1e-9));
            let end = Complex64::from_polar(1.0, g.theta2());
            assert!((moved.z() - end).norm() < (foot.z() - end).norm());
        }
    }

    #[test]
    fn reflection_examples() {
        let real_axis = Geodesic::new(0.0, PI).unwrap();
        let r = make_isometry(IsometryKind::Reflection(real_axis)).unwrap();
        let q = r.apply(DiskPoint::new(0.0, 0.4).unwrap());
        assert_abs_diff_eq!(q.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.im, -0.4, epsilon = 1e-15);
    }

    #[test]
    fn reflections_fix_their_geodesic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let g = Geodesic::new(rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)).unwrap();
            let r = Isometry::reflection(&g);
            assert!(r.reverses());
            assert!(r.compose(&r).is_identity(1e-12));
            let foot = g.closest_to_origin();
            assert!(r.apply(foot).chart_distance(foot) < 1e-12);
            let e = r.apply_boundary(g.theta1());
            assert!(wrap_pi(e - g.theta1()).abs() < 1e-9);
        }
    }

    #[test]
    fn translation_length_examples() {
        assert_eq!(Isometry::IDENTITY.translation_length().unwrap(), 0.0);
        assert_eq!(Isometry::rotation(1.0).translation_length().unwrap(), 0.0);
        let cot = 1.0 + 2f64.sqrt();
        let g = Isometry::real_translation(2.0 * cot.acosh());
        assert_abs_diff_eq!(g.translation_length().unwrap(), 3.0571418, epsilon = 1e-7);
        assert!(matches!(
            Isometry::conjugation().translation_length(),
            Err(Error::OrientationReversing)
        ));
    }

    #[test]
    fn half_turn_products_translate_by_twice_the_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let so = Isometry::rotation_pi(DiskPoint::ORIGIN);
        for _ in 0..500 {
            let q = random_point(&mut rng, 0.97);
            let g = Isometry::rotation_pi(q).compose(&so);
            let len = g.translation_length().unwrap();
            assert_abs_diff_eq!(len, 2.0 * dist(DiskPoint::ORIGIN, q), epsilon = 1e-9);
        }
    }

    #[test]
    fn canonical_form_is_bit_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let f = random_isometry(&mut rng);
            let c = f.canonical();
            let cc = c.canonical();
            assert_eq!(c.a().re.to_bits(), cc.a().re.to_bits());
            assert_eq!(c.a().im.to_bits(), cc.a().im.to_bits());
            assert_eq!(c.b().re.to_bits(), cc.b().re.to_bits());
            assert_eq!(c.b().im.to_bits(), cc.b().im.to_bits());
            assert!(c.a().re > -1e-12);
        }
    }

    #[test]
    fn determinant_stays_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let f = random_isometry(&mut rng).compose(&random_isometry(&mut rng));
            if f.a().norm_sqr() < 100.0 {
                assert_abs_diff_eq!(f.determinant(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn foot_examples() {
        let real_axis = Geodesic::new(0.0, PI).unwrap();
        let p = DiskPoint::new(0.3, 0.0).unwrap();
        assert!(foot_of_perpendicular(&real_axis, p).chart_distance(p) < 1e-15);
        let f = foot_of_perpendicular(&real_axis, DiskPoint::new(0.0, 0.5).unwrap());
        assert!(f.norm() < 1e-15);
    }

    #[test]
    fn foot_minimizes_distance_and_is_perpendicular() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let g = Geodesic::new(rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)).unwrap();
            let p = random_point(&mut rng, 0.9);
            let f = foot_of_perpendicular(&g, p);
            assert!(g.contains(f, 1e-9));
            let d = dist(p, f);
            if d > 1e-6 {
                let along = point_along(f, g.closest_to_origin(), 0.5);
                let other = if along.chart_distance(f) > 1e-9 {
                    along
                } else {
                    foot_of_perpendicular(&g, DiskPoint::ORIGIN.neg())
                };
                if other.chart_distance(f) > 1e-9 {
                    assert_abs_diff_eq!(angle_at(f, p, other), FRAC_PI_2, epsilon = 1e-9);
                }
            }
            let (e1, e2) = g.endpoints();
            for k in 1..50 {
                // sample points on g via the Klein chord
                let t = k as f64 / 50.0;
                let kx = e1 * (1.0 - t) + e2 * t;
                let x = DiskPoint::from_klein([kx.re, kx.im]).unwrap();
                assert!(d <= dist(p, x) + 1e-12);
            }
        }
    }

    #[test]
    fn diameters_cross_at_origin() {
        let g1 = Geodesic::new(0.0, PI).unwrap();
        let g2 = Geodesic::new(PI / 3.0, 4.0 * PI / 3.0).unwrap();
        let (p, ang) = intersect_angle(&g1, &g2).unwrap();
        assert!(p.norm() < 1e-15);
        assert_abs_diff_eq!(ang, PI / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn ultraparallel_geodesics_do_not_meet() {
        let g1 = Geodesic::new(0.1, 0.5).unwrap();
        let g2 = Geodesic::new(2.0, 3.0).unwrap();
        assert!(intersect_angle(&g1, &g2).is_none());
    }

    #[test]
    fn crossing_angle_is_continuous() {
        let g1 = Geodesic::new(0.0, PI).unwrap();
        let mut prev: Option<f64> = None;
        for k in 0..=200 {
            let t = 0.5 + 2.0 * k as f64 / 200.0;
            let g2 = Geodesic::new(-t, t + 0.3).unwrap();
            let (p, ang) = intersect_angle(&g1, &g2).unwrap();
            assert!(g1.contains(p, 1e-9) && g2.contains(p, 1e-9));
            if let Some(prev) = prev {
                assert!((ang - prev).abs() < 0.05);
            }
            prev = Some(ang);
        }
    }

    #[test]
    fn geodesic_through_two_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let (p, q) = (random_point(&mut rng, 0.9), random_point(&mut rng, 0.9));
            let g = Geodesic::through(p, q).unwrap();
            assert!(g.contains(p, 1e-9) && g.contains(q, 1e-9));
            let m = midpoint(p, q);
            assert!(g.contains(m, 1e-9));
            assert_abs_diff_eq!(dist(p, m), dist(m, q), epsilon = 1e-10);
        }
        let p = DiskPoint::new(0.2, 0.1).unwrap();
        assert!(matches!(Geodesic::through(p, p), Err(Error::DegenerateGeodesic)));
    }

    #[test]
    fn perpendicular_to_ray_has_requested_distance() {
        let g = Geodesic::perpendicular_to_ray(0.7, 1.3).unwrap();
        let (a, psi) = g.distance_from_origin();
        assert_abs_diff_eq!(a, 1.3, epsilon = 1e-12);
        assert_abs_diff_eq!(psi, 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(
            dist(DiskPoint::ORIGIN, g.closest_to_origin()),
            1.3,
            epsilon = 1e-12
        );
    }

    #[test]
    fn degenerate_geodesic_rejected() {
        assert!(matches!(Geodesic::new(1.0, 1.0), Err(Error::DegenerateGeodesic)));
    }
}
