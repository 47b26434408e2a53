//! Points of ℂ² in symmetrized coordinates and their position relative to
//! the symmetrized bidisc.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point (s, p); serialized as `[[re, im], [re, im]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[Complex64; 2]", into = "[Complex64; 2]")]
pub struct Point2 {
    pub s: Complex64,
    pub p: Complex64,
}

impl From<[Complex64; 2]> for Point2 {
    fn from([s, p]: [Complex64; 2]) -> Self {
        Point2 { s, p }
    }
}

impl From<Point2> for [Complex64; 2] {
    fn from(pt: Point2) -> Self {
        [pt.s, pt.p]
    }
}

impl Point2 {
    pub fn new(s: Complex64, p: Complex64) -> Self {
        Point2 { s, p }
    }

    pub fn is_finite(&self) -> bool {
        self.s.is_finite() && self.p.is_finite()
    }
}

/// π(z₁, z₂) = (z₁ + z₂, z₁z₂).
pub fn symmetrize(z1: Complex64, z2: Complex64) -> Point2 {
    Point2 {
        s: z1 + z2,
        p: z1 * z2,
    }
}

fn fiber_order(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.norm()
        .total_cmp(&b.norm())
        .then_with(|| a.arg().total_cmp(&b.arg()))
}

/// Both roots of λ² − sλ + p, ordered by modulus and then argument.
pub fn fiber(pt: Point2) -> (Complex64, Complex64) {
    let Point2 { s, p } = pt;
    let disc = (s * s - 4.0 * p).sqrt();
    let plus = s + disc;
    let minus = s - disc;
    let big = if plus.norm() >= minus.norm() { plus } else { minus };
    let (r1, r2) = if big.norm() == 0.0 {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        let r1 = big * 0.5;
        (r1, p / r1)
    };
    if fiber_order(&r1, &r2).is_le() {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointTag {
    /// Both fiber points in the open disc.
    InteriorG2,
    /// Both fiber points on the circle: bΓ = π(𝕋²).
    DistinguishedBoundary,
    /// One fiber point on the circle, the other strictly inside.
    OtherBoundary,
    /// One fiber point on the circle, the other strictly outside.
    ExteriorGamma,
    /// Both fiber points outside the closed disc: π(𝔼²).
    ExteriorSymmetrizedE2,
    /// One fiber point strictly inside, the other strictly outside.
    ExteriorOther,
}

impl PointTag {
    pub fn is_exterior(self) -> bool {
        matches!(
            self,
            PointTag::ExteriorGamma | PointTag::ExteriorSymmetrizedE2 | PointTag::ExteriorOther
        )
    }

    /// Is the point in ∂Γ ∖ bΓ?
    pub fn is_non_distinguished_boundary(self) -> bool {
        self == PointTag::OtherBoundary
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointClass {
    pub tag: PointTag,
    pub fiber: (Complex64, Complex64),
    /// min |‖λᵢ‖ − 1| over the fiber.
    pub margin: f64,
}

/// Membership in bΓ through |p| = 1, s = s̄p, |s| ≤ 2. Unlike the fiber
/// moduli, these quantities stay well conditioned at double roots.
fn near_distinguished_boundary(pt: Point2, tol: f64) -> bool {
    (pt.p.norm() - 1.0).abs() <= tol
        && (pt.s - pt.s.conj() * pt.p).norm() <= tol
        && pt.s.norm() <= 2.0 + tol
}

/// Classifies a point by the moduli of its fiber. Points inside a tolerance
/// band are assigned to the boundary tag.
pub fn classify_point(pt: Point2, tol: f64) -> PointClass {
    let fib = fiber(pt);
    let m1 = fib.0.norm().min(fib.1.norm());
    let m2 = fib.0.norm().max(fib.1.norm());
    let margin = (m1 - 1.0).abs().min((m2 - 1.0).abs());
    let on = |m: f64| (m - 1.0).abs() <= tol;
    let tag = if near_distinguished_boundary(pt, tol) || (on(m1) && on(m2)) {
        PointTag::DistinguishedBoundary
    } else if m2 < 1.0 - tol {
        PointTag::InteriorG2
    } else if on(m2) {
        PointTag::OtherBoundary
    } else if m1 > 1.0 + tol {
        PointTag::ExteriorSymmetrizedE2
    } else if on(m1) {
        PointTag::ExteriorGamma
    } else {
        PointTag::ExteriorOther
    };
    PointClass {
        tag,
        fiber: fib,
        margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cr};
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn symmetrize_examples() {
        assert_eq!(symmetrize(cr(0.0), cr(0.0)), Point2::new(cr(0.0), cr(0.0)));
        assert_eq!(symmetrize(cr(1.0), cr(1.0)), Point2::new(cr(2.0), cr(1.0)));
        let a = 2.0 * 0.5 / (1.0 + 0.25);
        let pt = symmetrize(cr(a), cr(a));
        assert!(close(pt.s, cr(1.6), 1e-15) && close(pt.p, cr(0.64), 1e-15));
    }

    #[test]
    fn fiber_examples() {
        let (a, b) = fiber(Point2::new(cr(2.0), cr(1.0)));
        assert!(close(a, cr(1.0), 1e-15) && close(b, cr(1.0), 1e-15));
        let (a, b) = fiber(Point2::new(cr(0.0), cr(-1.0)));
        assert!(close(a * b, cr(-1.0), 1e-15) && close(a + b, cr(0.0), 1e-15));
        let (a, b) = fiber(Point2::new(cr(2.5), cr(1.0)));
        assert!(close(a, cr(0.5), 1e-15) && close(b, cr(2.0), 1e-15));
        assert_eq!(fiber(Point2::new(cr(0.0), cr(0.0))), (cr(0.0), cr(0.0)));
    }

    #[test]
    fn classify_examples() {
        let tol = 1e-9;
        let tag = |s: f64, p: f64| classify_point(Point2::new(cr(s), cr(p)), tol).tag;
        assert_eq!(tag(0.0, 0.0), PointTag::InteriorG2);
        assert_eq!(tag(1.0, 0.0), PointTag::OtherBoundary);
        assert_eq!(tag(2.0, 1.0), PointTag::DistinguishedBoundary);
        assert_eq!(tag(2.5, 1.0), PointTag::ExteriorOther);
        assert_eq!(tag(6.0, 9.0), PointTag::ExteriorSymmetrizedE2);
        // π(1, 3)
        assert_eq!(tag(4.0, 3.0), PointTag::ExteriorGamma);
        assert_eq!(classify_point(Point2::new(cr(0.0), cr(0.0)), tol).margin, 1.0);
    }

    #[test]
    fn double_root_on_circle_is_distinguished() {
        let l = Complex64::from_polar(1.0, 0.7);
        let pt = Point2::new(l * 2.0 + c(1e-12, 0.0), l * l);
        assert_eq!(classify_point(pt, 1e-9).tag, PointTag::DistinguishedBoundary);
    }

    #[test]
    fn serializes_as_pairs() {
        let pt = Point2::new(c(1.0, 2.0), c(-0.5, 0.0));
        let text = serde_json::to_string(&pt).unwrap();
        assert_eq!(text, "[[1.0,2.0],[-0.5,0.0]]");
        assert_eq!(serde_json::from_str::<Point2>(&text).unwrap(), pt);
    }

    fn disc_point() -> impl Strategy<Value = Complex64> {
        (0.0f64..=1.0, -std::f64::consts::PI..std::f64::consts::PI)
            .prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    fn plane_point() -> impl Strategy<Value = Complex64> {
        (0.0f64..=10.0, -std::f64::consts::PI..std::f64::consts::PI)
            .prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn closed_bidisc_never_exterior(z1 in disc_point(), z2 in disc_point()) {
            let tag = classify_point(symmetrize(z1, z2), 1e-9).tag;
            prop_assert!(!tag.is_exterior(), "{z1} {z2} -> {tag:?}");
        }

        #[test]
        fn fiber_inverts_symmetrize(z1 in plane_point(), z2 in plane_point()) {
            let (a, b) = fiber(symmetrize(z1, z2));
            let scale = 1.0 + z1.norm().max(z2.norm());
            // Compare in symmetric coordinates; the fiber itself is
            // ill-conditioned near double roots.
            let back = symmetrize(a, b);
            let pt = symmetrize(z1, z2);
            prop_assert!((back.s - pt.s).norm() <= 1e-12 * scale);
            prop_assert!((back.p - pt.p).norm() <= 1e-12 * scale * scale);
        }

        #[test]
        fn classification_symmetric(z1 in plane_point(), z2 in plane_point()) {
            let a = classify_point(symmetrize(z1, z2), 1e-9).tag;
            let b = classify_point(symmetrize(z2, z1), 1e-9).tag;
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn fiber_recovers_separated_roots() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let z1 = c(rng.random_range(-7.0..7.0), rng.random_range(-7.0..7.0));
            let z2 = c(rng.random_range(-7.0..7.0), rng.random_range(-7.0..7.0));
            if (z1 - z2).norm() < 1e-3 {
                continue;
            }
            let (a, b) = fiber(symmetrize(z1, z2));
            let scale = z1.norm().max(z2.norm()).max(1.0);
            let straight = (a - z1).norm().max((b - z2).norm());
            let crossed = (a - z2).norm().max((b - z1).norm());
            // Root condition number is |z|/|z1 − z2|.
            let bound = 1e-12 * scale * scale / (z1 - z2).norm().min(1.0);
            assert!(straight.min(crossed) <= bound, "{z1} {z2}");
        }
    }
}
