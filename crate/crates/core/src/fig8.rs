//! The figure-8 knot complement as a worked example.
//!
//! Coordinates: `X = tr t1 = tr t2`, `Y = tr(t1 t2)`, `U = X^2`, `V = X^2 - Y`,
//! where `t1`, `t2` are the two meridian generators.

use nalgebra::Matrix4;
use serde::Serialize;

use crate::develop::orth_roundtrip;
use crate::error::{Error, Result};
use crate::mat2::{c, csqrt, Mat2, C, SL2};
use crate::orthinv::EdgeHolonomyData;
use crate::tolerance::Tolerances;
use crate::triangulation::{in_t, OrthParams, Triangulation};

/// Determinant of the hextet matrix of either tetrahedron.
pub fn hextet_poly(p0: C, p1: C) -> C {
    let one = c(1.0, 0.0);
    Matrix4::new(
        one, p0, p1, p1, //
        p0, one, p1, p0, //
        p1, p1, one, p0, //
        p1, p0, p0, one,
    )
    .determinant()
}

/// The same determinant, expanded as a quartic.
pub fn quartic(p0: C, p1: C) -> C {
    let (a2, b2) = (p0 * p0, p1 * p1);
    c(1.0, 0.0) - a2 * 3.0 - b2 * 3.0 + p0 * b2 * 4.0 + a2 * p1 * 4.0 + a2 * a2
        - a2 * p0 * p1 * 2.0
        - a2 * b2
        - p0 * b2 * p1 * 2.0
        + b2 * b2
}

/// The conic factor `p0^2 + p1^2 + p0 p1 - p0 - p1 - 1`.
pub fn conic(p0: C, p1: C) -> C {
    p0 * p0 + p1 * p1 + p0 * p1 - p0 - p1 - 1.0
}

/// The line factors `2 p1 - 3 p0 + 1 + s sqrt5 (p0 - 1)`, `s = +1, -1`.
pub fn line_factor(p0: C, p1: C, sign: f64) -> C {
    p1 * 2.0 - p0 * 3.0 + 1.0 + (p0 - 1.0) * (sign * 5f64.sqrt())
}

pub fn factored_form(p0: C, p1: C) -> C {
    conic(p0, p1) * line_factor(p0, p1, 1.0) * line_factor(p0, p1, -1.0) * 0.25
}

/// A point of the `(U, V)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharPoint {
    #[serde(rename = "U")]
    pub u: C,
    #[serde(rename = "V")]
    pub v: C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    /// `V = 2`: characters of reducible representations.
    ReducibleLine,
    /// `V^2 - UV + V + U - 1 = 0`.
    IrreducibleCurve,
    Off,
}

pub fn on_curve(pt: &CharPoint, tol: f64) -> Component {
    let (u, v) = (pt.u, pt.v);
    if (v - 2.0).norm() < tol {
        Component::ReducibleLine
    } else if (v * v - u * v + v + u - 1.0).norm() < tol {
        Component::IrreducibleCurve
    } else {
        Component::Off
    }
}

/// `U = (V^2 + V - 1) / (V - 1)` on the irreducible curve.
pub fn u_of_v(v: C, tol: f64) -> Result<C> {
    if (v - 1.0).norm() < tol {
        return Err(Error::PoleV1);
    }
    Ok((v * v + v - 1.0) / (v - 1.0))
}

/// The two values `V = 1 - zeta`, `zeta` a primitive cube root of unity,
/// where the structure is complete and the map below has a pole.
pub fn complete_structure_v() -> [C; 2] {
    let h = 3f64.sqrt() / 2.0;
    [c(1.5, -h), c(1.5, h)]
}

/// The ortholength coordinates of the representation with coordinate `V`.
pub fn orth_map(v: C, tol: f64) -> Result<(C, C)> {
    let den = v * v - v * 3.0 + 3.0;
    if den.norm() < tol {
        return Err(Error::DenominatorVanishes);
    }
    Ok(((-v * v + v * 3.0 - 1.0) / den, (v * v - v - 1.0) / den))
}

/// Inverse of [`orth_map`] on the conic.
pub fn orth_inverse(p0: C, p1: C, tol: f64) -> Result<CharPoint> {
    if (p0 + 1.0).norm() < tol {
        return Err(Error::PoleP0);
    }
    let v = (p0 * 2.0 + p1 + 1.0) / (p0 + 1.0);
    Ok(CharPoint { u: u_of_v(v, tol)?, v })
}

/// Generators with `tr t1 = tr t2 = X` and `tr(t1 t2) = Y`:
/// `t1 = [[s, 1], [0, 1/s]]`, `t2 = [[s, 0], [w, 1/s]]`, `s + 1/s = X`.
pub fn rep_from_traces(x: C, y: C, tol: f64) -> Result<(SL2, SL2)> {
    if (x * x - 4.0).norm() < tol {
        return Err(Error::ParabolicNormalForm);
    }
    let s = (x + csqrt(x * x - 4.0)) * 0.5;
    let w = y - x * x + 2.0;
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let t1 = SL2::normalized(Mat2::new(s, one, zero, s.inv()))?;
    let t2 = SL2::normalized(Mat2::new(s, zero, w, s.inv()))?;
    Ok((t1, t2))
}

/// `|| [t2^-1, t1] t2^-1 - t1^-1 [t2^-1, t1] ||` with `[a, b] = a b a^-1 b^-1`.
pub fn relation_residual(t1: &SL2, t2: &SL2) -> f64 {
    let k = t2.inv() * *t1 * *t2 * t1.inv();
    (k * t2.inv()).mat().dist(&(t1.inv() * k).mat())
}

/// `(X, Y)` for a point of the `(U, V)` plane, taking the principal root of `U`.
pub fn traces_of(pt: &CharPoint) -> (C, C) {
    (csqrt(pt.u), pt.u - pt.v)
}

/// Peripheral element `t2` and edge elements `t1 t2 t1^-1`, `t1` for the
/// irreducible representation with coordinate `V`.
pub fn edge_holonomy(v: C, tol: f64) -> Result<EdgeHolonomyData> {
    let pt = CharPoint { u: u_of_v(v, tol)?, v };
    let (x, y) = traces_of(&pt);
    let (t1, t2) = rep_from_traces(x, y, tol)?;
    EdgeHolonomyData::new(t2, vec![t1 * t2 * t1.inv(), t1], None)
}

/// Summary of one `V` value.
#[derive(Debug, Clone, Serialize)]
pub struct Fig8Point {
    #[serde(rename = "U")]
    pub u: Option<C>,
    #[serde(rename = "V")]
    pub v: C,
    pub p0: C,
    pub p1: C,
    #[serde(rename = "in_PK")]
    pub in_pk: bool,
    #[serde(rename = "in_S")]
    pub in_s: bool,
    #[serde(rename = "in_T")]
    pub in_t: bool,
    /// `None` when the point is excluded from reconstruction.
    pub roundtrip_residual: Option<f64>,
}

pub fn evaluate(v: C, tol: &Tolerances) -> Result<Fig8Point> {
    let (p0, p1) = orth_map(v, tol.geom)?;
    let t = Triangulation::fig8();
    let p = OrthParams::new(vec![p0, p1]);
    let in_s = t.in_s(&p, tol.geom)?;
    let in_t = in_t(&p, tol.geom);
    let roundtrip_residual = if in_s || in_t {
        None
    } else {
        let rep = orth_roundtrip(&t, &p, tol)?;
        Some(rep.max_residual.max(rep.closure_residual))
    };
    Ok(Fig8Point {
        u: u_of_v(v, tol.geom).ok(),
        v,
        p0,
        p1,
        in_pk: t.in_pk(&p, tol.geom)?,
        in_s,
        in_t,
        roundtrip_residual,
    })
}

/// One line of the built-in regression suite.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, value: f64, bound: f64) -> Check {
    Check {
        name,
        pass: value < bound,
        detail: format!("{value:.3e} < {bound:.0e}"),
    }
}

/// Regression checks for the closed forms of this example.
pub fn selftest(tol: &Tolerances) -> Vec<Check> {
    let mut out = Vec::new();
    let grid: Vec<(C, C)> = (0..20)
        .flat_map(|i| (0..20).map(move |j| (i, j)))
        .map(|(i, j)| (c(-2.0 + 0.2 * i as f64, 0.05 * j as f64), c(1.5 - 0.15 * j as f64, -0.1 * i as f64)))
        .collect();
    let poly = grid
        .iter()
        .map(|&(a, b)| {
            let d = hextet_poly(a, b);
            (d - quartic(a, b)).norm().max((d - factored_form(a, b)).norm())
        })
        .fold(0.0, f64::max);
    out.push(check("hextet determinant = quartic = factored form", poly, 1e-10));

    let (p0, p1) = orth_map(c(3.0, 0.0), tol.geom).unwrap_or((c(f64::NAN, 0.0), c(f64::NAN, 0.0)));
    let d = (p0 - c(-1.0 / 3.0, 0.0)).norm().max((p1 - c(5.0 / 3.0, 0.0)).norm());
    out.push(check("V = 3 maps to (-1/3, 5/3)", d, 1e-12));

    let d = orth_map(c(2.0, 0.0), tol.geom)
        .map(|(a, b)| (a - 1.0).norm().max((b - 1.0).norm()))
        .unwrap_or(f64::INFINITY);
    out.push(check("V = 2 maps to (1, 1)", d, 1e-12));

    let samples: Vec<C> = (0..100)
        .map(|k| {
            let th = k as f64 * 0.0628;
            c(3.0 * th.cos() + 1.5, 2.0 * th.sin() + 0.3)
        })
        .collect();
    let (mut on_conic, mut inverse) = (0.0f64, 0.0f64);
    for &v in &samples {
        match orth_map(v, 1e-3) {
            Ok((a, b)) => {
                on_conic = on_conic.max(conic(a, b).norm()).max(hextet_poly(a, b).norm());
                inverse = inverse.max(orth_inverse(a, b, tol.geom).map_or(f64::INFINITY, |pt| (pt.v - v).norm()));
            }
            Err(_) => continue,
        }
    }
    out.push(check("image lies on the conic", on_conic, 1e-10));
    out.push(check("inverse recovers V", inverse, 1e-9));

    let t = Triangulation::fig8();
    let s5 = 5f64.sqrt();
    let s_ok = [(-1.0 + s5) / 2.0, (-1.0 - s5) / 2.0].iter().all(|&v| {
        orth_map(c(v, 0.0), tol.geom)
            .and_then(|(a, b)| t.in_s(&OrthParams::new(vec![a, b]), 1e-9))
            .unwrap_or(false)
    });
    out.push(Check {
        name: "V = (-1 +- sqrt5)/2 lies in S",
        pass: s_ok,
        detail: String::new(),
    });

    let poles = complete_structure_v()
        .iter()
        .all(|&v| matches!(orth_map(v, tol.geom), Err(Error::DenominatorVanishes)));
    out.push(Check {
        name: "complete structure is a pole",
        pass: poles,
        detail: String::new(),
    });

    let mut rel = 0.0f64;
    let mut trace = 0.0f64;
    for v in [c(3.0, 0.0), c(2.5, 0.0), c(4.0, 0.0), c(1.0, 2.0)] {
        let data = match edge_holonomy(v, tol.geom) {
            Ok(d) => d,
            Err(_) => {
                rel = f64::INFINITY;
                continue;
            }
        };
        rel = rel.max(relation_residual(&data.edges[1], &data.h));
        let inv = crate::orthinv::orth_invariant(&data, tol);
        let want = orth_map(v, tol.geom);
        trace = trace.max(match (inv, want) {
            (Ok(i), Ok((a, b))) => i.max_dist(&[a, b]),
            _ => f64::INFINITY,
        });
    }
    out.push(check("generators satisfy the group relation", rel, 1e-8));
    out.push(check("trace formula on the generators reproduces the map", trace, 1e-9));

    let mut rt = 0.0f64;
    for v in [c(2.5, 0.0), c(3.0, 0.0), c(4.0, 0.0), c(1.0, 2.0)] {
        rt = rt.max(
            evaluate(v, tol)
                .ok()
                .and_then(|pt| pt.roundtrip_residual)
                .unwrap_or(f64::INFINITY),
        );
    }
    out.push(check("reconstruction round trip", rt, 1e-8));
    out
}
