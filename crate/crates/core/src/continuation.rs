//! Predictor-corrector continuation along curves in the ortholength space.

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::C;
use crate::triangulation::{OrthParams, Triangulation};

fn default_step() -> f64 {
    0.05
}

fn default_max_steps() -> usize {
    100
}

fn default_tol() -> f64 {
    1e-9
}

fn default_corrector_tol() -> f64 {
    1e-10
}

fn default_halvings() -> usize {
    10
}

/// Parameters of one continuation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRun {
    pub start: OrthParams,
    /// Preferred direction; the tangent is rotated to have positive real
    /// inner product with it.
    pub direction: Vec<C>,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    /// Residual bound every returned point must meet.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_corrector_tol")]
    pub corrector_tol: f64,
    #[serde(default = "default_halvings")]
    pub max_halvings: usize,
}

impl TraceRun {
    pub fn new(start: OrthParams, direction: Vec<C>) -> Self {
        TraceRun {
            start,
            direction,
            step: default_step(),
            max_steps: default_max_steps(),
            tol: default_tol(),
            corrector_tol: default_corrector_tol(),
            max_halvings: default_halvings(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxSteps,
    /// The next point would come within one step of a coordinate equal to `+-1`.
    NearT,
    /// Newton failed even after the allowed step halvings.
    CorrectorDiverged,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceResult {
    /// Accepted points, starting with the start point.
    pub points: Vec<OrthParams>,
    /// Largest hextet residual at each point.
    pub residuals: Vec<f64>,
    pub stop: StopReason,
}

/// Cofactor matrix transpose, valid for singular matrices too.
fn adjugate4(x: &Matrix4<C>) -> Matrix4<C> {
    let mut adj = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let minor = Matrix3::from_fn(|r, s| {
                let r = if r < i { r } else { r + 1 };
                let s = if s < j { s } else { s + 1 };
                x[(r, s)]
            });
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            adj[(j, i)] = minor.determinant() * sign;
        }
    }
    adj
}

fn hextet4(t: &Triangulation, tet: usize, p: &[C]) -> Matrix4<C> {
    Matrix4::from_fn(|i, j| {
        if i == j {
            C::new(1.0, 0.0)
        } else {
            p[t.edge_class(tet, i, j)]
        }
    })
}

fn residuals(t: &Triangulation, p: &[C]) -> DVector<C> {
    DVector::from_fn(t.n(), |k, _| hextet4(t, k, p).determinant())
}

/// `d det X_t / d p_k`: the sum of `adj(X)_{ji}` over entries `(i, j)` of class `k`.
pub fn jacobian(t: &Triangulation, p: &[C]) -> DMatrix<C> {
    let n = t.n();
    let mut jac = DMatrix::zeros(n, n);
    for tet in 0..n {
        let adj = adjugate4(&hextet4(t, tet, p));
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    jac[(tet, t.edge_class(tet, i, j))] += adj[(j, i)];
                }
            }
        }
    }
    jac
}

fn max_norm(v: &DVector<C>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Unit tangent to the curve at `p`.
fn tangent(t: &Triangulation, p: &[C]) -> Result<DVector<C>> {
    let jac = jacobian(t, p);
    let n = jac.ncols();
    let svd = jac.svd(false, true);
    let vt = svd.v_t.ok_or(Error::SingularJacobian)?;
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    let s = &svd.singular_values;
    idx.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let smax = s[idx[idx.len() - 1]];
    // The kernel must be exactly one-dimensional.
    if n > 1 && (smax == 0.0 || s[idx[1]] < 1e-8 * smax) {
        return Err(Error::SingularJacobian);
    }
    let v = vt.row(idx[0]).adjoint();
    Ok(&v / C::new(v.norm(), 0.0))
}

/// Rotates `tau` so that `tau^H d` is real and positive.
fn align(tau: DVector<C>, d: &DVector<C>) -> Option<DVector<C>> {
    let ip = tau.dotc(d);
    if ip.norm() < 1e-12 {
        return None;
    }
    Some(tau * (ip / ip.norm()))
}

/// Newton on the hextet residuals together with `tau^H (p - pred) = 0`.
fn correct(t: &Triangulation, pred: &DVector<C>, tau: &DVector<C>, tol: f64) -> Option<DVector<C>> {
    let n = pred.len();
    let mut p = pred.clone();
    for _ in 0..25 {
        let f = residuals(t, p.as_slice());
        let plane = tau.dotc(&(&p - pred));
        if max_norm(&f) < tol && plane.norm() < tol {
            return Some(p);
        }
        let jac = jacobian(t, p.as_slice());
        let mut a = DMatrix::zeros(n + 1, n);
        let mut b = DVector::zeros(n + 1);
        a.rows_mut(0, n).copy_from(&jac);
        for k in 0..n {
            a[(n, k)] = tau[k].conj();
        }
        b.rows_mut(0, n).copy_from(&(-f));
        b[n] = -plane;
        let dx = a.svd(true, true).solve(&b, 1e-14).ok()?;
        if !dx.iter().all(|z| z.is_finite()) {
            return None;
        }
        p += &dx;
        if max_norm(&dx) > 10.0 {
            return None;
        }
    }
    let f = residuals(t, p.as_slice());
    (max_norm(&f) < tol).then_some(p)
}

fn near_t(p: &DVector<C>, dist: f64) -> bool {
    p.iter()
        .any(|z| (z - 1.0).norm() < dist || (z + 1.0).norm() < dist)
}

/// Follows the curve through `run.start` for up to `run.max_steps` steps.
pub fn trace_curve(t: &Triangulation, run: &TraceRun) -> Result<TraceResult> {
    let n = t.n();
    if run.start.len() != n {
        return Err(Error::ParamCount {
            expected: n,
            got: run.start.len(),
        });
    }
    if run.direction.len() != n {
        return Err(Error::InvalidRun(format!(
            "direction has {} entries, expected {n}",
            run.direction.len()
        )));
    }
    if !(run.step > 0.0 && run.step.is_finite()) {
        return Err(Error::InvalidRun(format!("step must be positive, got {}", run.step)));
    }
    let mut p = DVector::from_vec(run.start.p.clone());
    let r0 = max_norm(&residuals(t, p.as_slice()));
    if r0 >= run.tol {
        return Err(Error::StartOffVariety(r0));
    }
    let mut dir = DVector::from_vec(run.direction.clone());
    let dn = dir.norm();
    if dn == 0.0 {
        return Err(Error::InvalidRun("direction is zero".into()));
    }
    dir /= C::new(dn, 0.0);
    let tau0 = tangent(t, p.as_slice())?;
    let mut tau = align(tau0, &dir)
        .ok_or_else(|| Error::InvalidRun("direction is orthogonal to the curve".into()))?;

    let mut points = vec![run.start.clone()];
    let mut res = vec![r0];
    let ctol = run.corrector_tol.min(run.tol);
    for _ in 0..run.max_steps {
        if near_t(&p, run.step) {
            return Ok(TraceResult {
                points,
                residuals: res,
                stop: StopReason::NearT,
            });
        }
        let mut h = run.step;
        let mut next = None;
        for _ in 0..=run.max_halvings {
            let pred = &p + &tau * C::new(h, 0.0);
            if let Some(q) = correct(t, &pred, &tau, ctol) {
                next = Some(q);
                break;
            }
            h *= 0.5;
        }
        let Some(q) = next else {
            return Ok(TraceResult {
                points,
                residuals: res,
                stop: StopReason::CorrectorDiverged,
            });
        };
        let new_tau = match tangent(t, q.as_slice()) {
            Ok(v) => v,
            Err(_) => {
                return Ok(TraceResult {
                    points,
                    residuals: res,
                    stop: StopReason::CorrectorDiverged,
                })
            }
        };
        tau = align(new_tau, &tau).unwrap_or(tau);
        let r = max_norm(&residuals(t, q.as_slice()));
        p = q;
        points.push(OrthParams::new(p.iter().copied().collect()));
        res.push(r);
    }
    Ok(TraceResult {
        points,
        residuals: res,
        stop: StopReason::MaxSteps,
    })
}
