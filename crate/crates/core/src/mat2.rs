//! Complex 2x2 matrices and the line-matrix model of oriented geodesics.
//!
//! An oriented line in hyperbolic 3-space is a traceless `SL(2,C)` matrix.
//! Traceless matrices of any determinant form a 3-dimensional complex
//! vector space carrying the symmetric bilinear form `<l, m> = -tr(lm)/2`,
//! and for two normalized lines `<l, m>` is the hyperbolic cosine of their
//! complex distance. `PSL(2,C)` acts on lines by conjugation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// The scalar field.
pub type C = Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[inline]
pub(crate) fn i() -> C {
    C::new(0.0, 1.0)
}

/// Principal square root.
#[inline]
pub(crate) fn csqrt(z: C) -> C {
    z.sqrt()
}

/// Row-major 2x2 complex matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: C,
    pub b: C,
    pub c: C,
    pub d: C,
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl Mat2 {
    pub const fn new(a: C, b: C, c: C, d: C) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::diag(C::new(1.0, 0.0), C::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        Mat2::diag(C::new(0.0, 0.0), C::new(0.0, 0.0))
    }

    pub fn diag(a: C, d: C) -> Self {
        let z = C::new(0.0, 0.0);
        Mat2::new(a, z, z, d)
    }

    pub fn entries(&self) -> [C; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn from_entries(e: [C; 4]) -> Self {
        Mat2::new(e[0], e[1], e[2], e[3])
    }

    pub fn tr(&self) -> C {
        self.a + self.d
    }

    pub fn det(&self) -> C {
        self.a * self.d - self.b * self.c
    }

    /// Classical adjugate; equals the inverse when `det = 1`.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn scale(&self, s: C) -> Self {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        let n = self.norm_max();
        if !det.is_finite() || det.norm() <= 1e-14 * n * n || n == 0.0 {
            return Err(Error::SingularMatrix);
        }
        Ok(self.adjugate().scale(det.inv()))
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise distance to `other`.
    pub fn dist(&self, other: &Mat2) -> f64 {
        (*self - *other).norm_max()
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.is_finite())
    }

    pub fn commutator(&self, other: &Mat2) -> Mat2 {
        *self * *other - *other * *self
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Mul<C> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: C) -> Mat2 {
        self.scale(s)
    }
}

/// A unimodular matrix, i.e. one of the two lifts of an element of `PSL(2,C)`.
#[derive(Clone, Copy, PartialEq)]
pub struct SL2 {
    m: Mat2,
}

impl fmt::Debug for SL2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SL2{:?}", self.m)
    }
}

impl SL2 {
    /// Accepts `m` when `|det m - 1| <= tol`.
    pub fn new_with_tol(m: Mat2, tol: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite("SL2"));
        }
        let dev = (m.det() - 1.0).norm();
        if dev > tol {
            return Err(Error::NotUnimodular {
                det: format!("{}", m.det()),
                dev,
            });
        }
        Ok(SL2 { m })
    }

    pub fn new(m: Mat2) -> Result<Self> {
        SL2::new_with_tol(m, Tolerances::default().det)
    }

    /// Rescales `m` by the principal square root of `1/det m`.
    pub fn normalized(m: Mat2) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite("SL2"));
        }
        let det = m.det();
        let n = m.norm_max();
        if det.norm() <= 1e-14 * n * n || n == 0.0 {
            return Err(Error::SingularMatrix);
        }
        Ok(SL2 {
            m: m.scale(csqrt(det).inv()),
        })
    }

    pub fn identity() -> Self {
        SL2 { m: Mat2::identity() }
    }

    /// `diag(e^{x/2}, e^{-x/2})`, translation length `x` along the line `0 -> oo`.
    pub fn loxodromic(x: C) -> Self {
        let e = (x * 0.5).exp();
        SL2 {
            m: Mat2::diag(e, e.inv()),
        }
    }

    pub fn mat(&self) -> Mat2 {
        self.m
    }

    pub fn tr(&self) -> C {
        self.m.tr()
    }

    pub fn inv(&self) -> SL2 {
        SL2 {
            m: self.m.adjugate(),
        }
    }

    pub fn renormalize(&self) -> SL2 {
        SL2::normalized(self.m).unwrap_or(*self)
    }

    /// Distance in `PSL(2,C)`: the smaller of the distances to `other` and `-other`.
    pub fn dist_projective(&self, other: &SL2) -> f64 {
        self.m.dist(&other.m).min(self.m.dist(&(-other.m)))
    }
}

impl Neg for SL2 {
    type Output = SL2;
    fn neg(self) -> SL2 {
        SL2 { m: -self.m }
    }
}

impl Mul for SL2 {
    type Output = SL2;
    fn mul(self, o: SL2) -> SL2 {
        SL2 { m: self.m * o.m }
    }
}

/// A traceless matrix. Normalized ones (`det = 1`) are oriented lines.
#[derive(Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LineMatrix {
    m: Mat2,
}

impl fmt::Debug for LineMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Line{:?}", self.m)
    }
}

impl LineMatrix {
    pub fn new_with_tol(m: Mat2, tol: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite("LineMatrix"));
        }
        let t = m.tr().norm();
        if t > tol * m.norm_max().max(1.0) {
            return Err(Error::NotTraceless(t));
        }
        Ok(LineMatrix::from_mat_unchecked(m))
    }

    pub fn new(m: Mat2) -> Result<Self> {
        LineMatrix::new_with_tol(m, Tolerances::default().geom)
    }

    /// Builds a normalized line, rejecting `|det - 1| > tol`.
    pub fn oriented(m: Mat2, tol: f64) -> Result<Self> {
        let l = LineMatrix::new_with_tol(m, tol)?;
        l.check_normalized(tol)?;
        Ok(l)
    }

    /// Drops the trace of `m` so that `d = -a` holds exactly.
    pub(crate) fn from_mat_unchecked(m: Mat2) -> Self {
        let a = (m.a - m.d) * 0.5;
        LineMatrix {
            m: Mat2::new(a, m.b, m.c, -a),
        }
    }

    /// `[[i, 0], [0, -i]]`, the line from 0 to infinity.
    pub fn e1() -> Self {
        LineMatrix {
            m: Mat2::diag(i(), -i()),
        }
    }

    /// `[[0, i], [i, 0]]`.
    pub fn e2() -> Self {
        let z = c(0.0, 0.0);
        LineMatrix {
            m: Mat2::new(z, i(), i(), z),
        }
    }

    /// `[[0, 1], [-1, 0]]`.
    pub fn e3() -> Self {
        let z = c(0.0, 0.0);
        LineMatrix {
            m: Mat2::new(z, c(1.0, 0.0), c(-1.0, 0.0), z),
        }
    }

    pub fn basis() -> [LineMatrix; 3] {
        [LineMatrix::e1(), LineMatrix::e2(), LineMatrix::e3()]
    }

    /// `x E1 + y E2 + z E3`.
    pub fn from_coords(v: [C; 3]) -> Self {
        let [e1, e2, e3] = LineMatrix::basis();
        LineMatrix::from_mat_unchecked(e1.m * v[0] + e2.m * v[1] + e3.m * v[2])
    }

    /// Coordinates in the orthonormal basis `(E1, E2, E3)`.
    pub fn coords(&self) -> [C; 3] {
        let [e1, e2, e3] = LineMatrix::basis();
        [form(self, &e1), form(self, &e2), form(self, &e3)]
    }

    pub fn mat(&self) -> Mat2 {
        self.m
    }

    pub fn det(&self) -> C {
        self.m.det()
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let dev = (self.det() - 1.0).norm();
        if dev > tol {
            Err(Error::NotNormalized(dev))
        } else {
            Ok(())
        }
    }

    /// Rescales to unit determinant (principal root).
    pub fn normalized(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() < 1e-14 * self.m.norm_max().powi(2).max(1e-300) {
            return Err(Error::SingularMatrix);
        }
        Ok(LineMatrix {
            m: self.m.scale(csqrt(d).inv()),
        })
    }

    pub fn scale(&self, s: C) -> Self {
        LineMatrix { m: self.m.scale(s) }
    }

    pub fn dist(&self, other: &LineMatrix) -> f64 {
        self.m.dist(&other.m)
    }
}

impl Neg for LineMatrix {
    type Output = LineMatrix;
    fn neg(self) -> LineMatrix {
        LineMatrix { m: -self.m }
    }
}

impl Add for LineMatrix {
    type Output = LineMatrix;
    fn add(self, o: LineMatrix) -> LineMatrix {
        LineMatrix { m: self.m + o.m }
    }
}

impl Sub for LineMatrix {
    type Output = LineMatrix;
    fn sub(self, o: LineMatrix) -> LineMatrix {
        LineMatrix { m: self.m - o.m }
    }
}

/// `<l, m> = -tr(lm)/2`.
pub fn form(l: &LineMatrix, m: &LineMatrix) -> C {
    let (x, y) = (l.m, m.m);
    // tr(xy) without forming the full product
    -(x.a * y.a + x.b * y.c + x.c * y.b + x.d * y.d) * 0.5
}

/// Hyperbolic cosine of the complex distance between two oriented lines.
pub fn cosh_dist(l: &LineMatrix, m: &LineMatrix, tol: f64) -> Result<C> {
    l.check_normalized(tol)?;
    m.check_normalized(tol)?;
    Ok(form(l, m))
}

/// The action `g . l = g l g^-1`.
pub fn conj_by(g: &SL2, l: &LineMatrix) -> LineMatrix {
    LineMatrix::from_mat_unchecked(g.m * l.m * g.m.adjugate())
}

/// The oriented axis of a non-parabolic, non-identity element.
///
/// `(h - tr(h)/2) / s` with `s` the principal root of `1 - tr(h)^2/4`.
pub fn axis(h: &SL2, tol: &Tolerances) -> Result<LineMatrix> {
    let t = h.tr();
    let t2 = t * t;
    let dev = (t2 - 4.0).norm();
    if dev < tol.parabolic {
        return Err(Error::ParabolicOrIdentity(dev));
    }
    let s = csqrt(C::new(1.0, 0.0) - t2 * 0.25);
    let half = t * 0.5;
    let m = h.m;
    Ok(LineMatrix::from_mat_unchecked(
        Mat2::new(m.a - half, m.b, m.c, m.d - half).scale(s.inv()),
    ))
}

impl<'de> Deserialize<'de> for LineMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = Mat2::deserialize(d)?;
        LineMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

impl Serialize for SL2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SL2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = Mat2::deserialize(d)?;
        SL2::new_with_tol(m, 1e-10).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let e: Vec<[f64; 2]> = self.entries().iter().map(|z| [z.re, z.im]).collect();
        e.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let e: [[f64; 2]; 4] = Deserialize::deserialize(d)?;
        Ok(Mat2::new(
            c(e[0][0], e[0][1]),
            c(e[1][0], e[1][1]),
            c(e[2][0], e[2][1]),
            c(e[3][0], e[3][1]),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rc(rng: &mut ChaCha8Rng) -> C {
        c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))
    }

    fn random_sl2(rng: &mut ChaCha8Rng) -> SL2 {
        loop {
            let m = Mat2::new(rc(rng), rc(rng), rc(rng), rc(rng));
            if m.det().norm() > 0.1 {
                return SL2::normalized(m).unwrap();
            }
        }
    }

    fn random_line(rng: &mut ChaCha8Rng) -> LineMatrix {
        LineMatrix::from_coords([rc(rng), rc(rng), rc(rng)])
    }

    #[test]
    fn trace_of_identity() {
        assert_eq!(Mat2::identity().tr(), c(2.0, 0.0));
    }

    #[test]
    fn triangular_inverse() {
        let s = c(1.3, -0.4);
        let one = c(1.0, 0.0);
        let z = c(0.0, 0.0);
        let g = SL2::new(Mat2::new(s, one, z, s.inv())).unwrap();
        let want = Mat2::new(s.inv(), -one, z, s);
        assert!(g.inv().mat().dist(&want) < 1e-15);
    }

    #[test]
    fn random_inverse_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let g = random_sl2(&mut rng);
            assert!((g * g.inv()).mat().dist(&Mat2::identity()) < 1e-12);
        }
    }

    #[test]
    fn singular_inverse_rejected() {
        let one = c(1.0, 0.0);
        let m = Mat2::new(one, one, one, one);
        assert!(matches!(m.inverse(), Err(Error::SingularMatrix)));
        assert!(matches!(SL2::new(m), Err(Error::NotUnimodular { .. })));
    }

    #[test]
    fn nonfinite_rejected() {
        let m = Mat2::diag(c(f64::NAN, 0.0), c(1.0, 0.0));
        assert!(matches!(SL2::new(m), Err(Error::NonFinite(_))));
        assert!(matches!(LineMatrix::new(m), Err(Error::NonFinite(_))));
    }

    #[test]
    fn basis_is_orthonormal() {
        let b = LineMatrix::basis();
        for (j, x) in b.iter().enumerate() {
            for (k, y) in b.iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((form(x, y) - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn form_invariant_under_axis_translation() {
        let g = SL2::loxodromic(c(1.0, 0.0));
        let e1 = LineMatrix::e1();
        assert!((form(&e1, &conj_by(&g, &e1)) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn cosh_dist_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let l = random_line(&mut rng).normalized().unwrap();
        assert!((cosh_dist(&l, &l, 1e-12).unwrap() - 1.0).norm() < 1e-12);
        assert!((cosh_dist(&l, &(-l), 1e-12).unwrap() + 1.0).norm() < 1e-12);

        let g = random_sl2(&mut rng);
        let m = conj_by(&g, &LineMatrix::e2());
        let direct = -(LineMatrix::e1().mat() * g.mat() * LineMatrix::e2().mat() * g.inv().mat()).tr()
            * 0.5;
        let got = cosh_dist(&LineMatrix::e1(), &m, 1e-9).unwrap();
        assert!((got - direct).norm() < 1e-12);

        let unnormalized = LineMatrix::e1().scale(c(2.0, 0.0));
        assert!(matches!(
            cosh_dist(&unnormalized, &l, 1e-9),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn conj_examples() {
        let e1 = LineMatrix::e1();
        assert_eq!(conj_by(&SL2::identity(), &e1), e1);
        let one = c(1.0, 0.0);
        let z = c(0.0, 0.0);
        let g = SL2::new(Mat2::new(z, one, -one, z)).unwrap();
        assert!(conj_by(&g, &e1).dist(&(-e1)) < 1e-15);
    }

    #[test]
    fn axis_of_diagonal() {
        let h = SL2::loxodromic(c(1.0, 0.0));
        let l = axis(&h, &Tolerances::default()).unwrap();
        // principal root of -sinh^2(1/2) is +i sinh(1/2), giving -E1
        assert!(l.dist(&(-LineMatrix::e1())) < 1e-14);
    }

    #[test]
    fn axis_rejects_parabolic_and_identity() {
        let tol = Tolerances::default();
        assert!(matches!(
            axis(&SL2::identity(), &tol),
            Err(Error::ParabolicOrIdentity(_))
        ));
        let one = c(1.0, 0.0);
        let p = SL2::new(Mat2::new(one, c(3.0, 1.0), c(0.0, 0.0), one)).unwrap();
        assert!(matches!(axis(&p, &tol), Err(Error::ParabolicOrIdentity(_))));
        assert!(matches!(axis(&-p, &tol), Err(Error::ParabolicOrIdentity(_))));
    }

    #[test]
    fn axis_properties() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let h = random_sl2(&mut rng);
            let g = random_sl2(&mut rng);
            let l = axis(&h, &tol).unwrap();
            l.check_normalized(1e-10).unwrap();
            assert!(h.mat().commutator(&l.mat()).norm_max() < 1e-10);
            assert!(conj_by(&h, &l).dist(&l) < 1e-10);

            let moved = axis(&(g * h * g.inv()), &tol).unwrap();
            let expect = conj_by(&g, &l);
            assert!(moved.dist(&expect).min(moved.dist(&(-expect))) < 1e-9);

            let back = axis(&h.inv(), &tol).unwrap();
            assert!(back.dist(&l).min(back.dist(&(-l))) < 1e-10);
        }
    }

    #[test]
    fn form_algebraic_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let (l, m, n) = (
                random_line(&mut rng),
                random_line(&mut rng),
                random_line(&mut rng),
            );
            let alpha = rc(&mut rng);
            let lhs = form(&(l + n.scale(alpha)), &m);
            let rhs = form(&l, &m) + alpha * form(&n, &m);
            assert!((lhs - rhs).norm() < 1e-12);
            assert!((form(&l, &m) - form(&m, &l)).norm() < 1e-14);
            assert!((form(&l, &l) - l.det()).norm() < 1e-12);
            assert!((form(&(-l), &m) + form(&l, &m)).norm() < 1e-15);

            let g = random_sl2(&mut rng);
            let moved = form(&conj_by(&g, &l), &conj_by(&g, &m));
            assert!((moved - form(&l, &m)).norm() < 1e-12 * (1.0 + form(&l, &m).norm()) * 10.0);
        }
    }

    #[test]
    fn conj_preserves_trace_and_det() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let g = random_sl2(&mut rng);
            let l = random_line(&mut rng);
            let m = conj_by(&g, &l);
            assert!(m.mat().tr().norm() < 1e-12);
            assert!((m.det() - l.det()).norm() < 1e-11);
        }
    }

    #[test]
    fn serde_shape() {
        let m = Mat2::new(c(1.0, 2.0), c(3.0, 4.0), c(5.0, 6.0), c(7.0, 8.0));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[1.0,2.0],[3.0,4.0],[5.0,6.0],[7.0,8.0]]");
        let back: Mat2 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
