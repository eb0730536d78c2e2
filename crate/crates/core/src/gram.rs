//! Gram matrices of line configurations: realization, degeneracy and rigidity.
//!
//! A symmetric unit-diagonal complex matrix `X` is the matrix of pairwise
//! forms `<l_i, l_j>` of some oriented lines exactly when `rank X <= 3`.
//! [`realize`] builds such lines by a symmetric congruence reduction
//! `X = sum u_k u_k^T` (at most three terms) and reads the `u_k` as
//! coordinates in the orthonormal basis `E1, E2, E3`. Realizations are
//! unique up to `PSL(2,C)` and a simultaneous orientation flip, which
//! [`congruence`] recovers.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::{c, conj_by, csqrt, form, LineMatrix, Mat2, C, SL2};

/// Bunch-Kaufman growth bound for choosing a 1x1 over a 2x2 pivot.
const PIVOT_ALPHA: f64 = 0.640_388_203_202_208; // (1 + sqrt(17)) / 8

/// Symmetric complex matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGram", into = "RawGram")]
pub struct GramMatrix {
    x: DMatrix<C>,
}

#[derive(Serialize, Deserialize)]
struct RawGram {
    n: usize,
    entries: Vec<Vec<C>>,
}

impl TryFrom<RawGram> for GramMatrix {
    type Error = Error;

    fn try_from(raw: RawGram) -> Result<Self> {
        if raw.entries.len() != raw.n {
            return Err(Error::InvalidGram(format!(
                "n = {} but {} rows given",
                raw.n,
                raw.entries.len()
            )));
        }
        GramMatrix::from_rows(&raw.entries, 1e-12)
    }
}

impl From<GramMatrix> for RawGram {
    fn from(g: GramMatrix) -> Self {
        RawGram {
            n: g.n(),
            entries: g.rows(),
        }
    }
}

impl GramMatrix {
    /// Validates symmetry and the unit diagonal to within `tol`.
    pub fn new(x: DMatrix<C>, tol: f64) -> Result<Self> {
        if x.nrows() != x.ncols() {
            return Err(Error::InvalidGram(format!(
                "not square ({}x{})",
                x.nrows(),
                x.ncols()
            )));
        }
        if x.nrows() == 0 {
            return Err(Error::InvalidGram("empty".into()));
        }
        if x.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("GramMatrix"));
        }
        let n = x.nrows();
        for i in 0..n {
            if (x[(i, i)] - 1.0).norm() > tol {
                return Err(Error::InvalidGram(format!("diagonal entry {i} is {}", x[(i, i)])));
            }
            for j in 0..i {
                if (x[(i, j)] - x[(j, i)]).norm() > tol {
                    return Err(Error::InvalidGram(format!("entry ({i},{j}) is not symmetric")));
                }
            }
        }
        Ok(GramMatrix { x })
    }

    pub fn from_rows(rows: &[Vec<C>], tol: f64) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGram("ragged rows".into()));
        }
        GramMatrix::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]), tol)
    }

    /// Matrix of pairwise forms. Diagonal is `det l_i`.
    pub fn of_lines(lines: &[LineMatrix]) -> Self {
        let n = lines.len();
        GramMatrix {
            x: DMatrix::from_fn(n, n, |i, j| form(&lines[i], &lines[j])),
        }
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.x[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<C> {
        &self.x
    }

    pub fn rows(&self) -> Vec<Vec<C>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.x[(i, j)]).collect())
            .collect()
    }

    pub fn det(&self) -> C {
        self.x.clone().determinant()
    }

    /// `P X P^T` with `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n();
        GramMatrix {
            x: DMatrix::from_fn(n, n, |i, j| self.x[(perm[i], perm[j])]),
        }
    }

    /// Largest entrywise distance.
    pub fn dist(&self, other: &GramMatrix) -> f64 {
        (&self.x - &other.x).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when every off-diagonal entry is within `tol` of `+1` or `-1`.
    pub fn all_unit_entries(&self, tol: f64) -> bool {
        let n = self.n();
        (0..n).all(|i| {
            (0..n).all(|j| {
                i == j || (self.x[(i, j)] - 1.0).norm() < tol || (self.x[(i, j)] + 1.0).norm() < tol
            })
        })
    }
}

/// An ordered list of oriented lines.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LineConfig {
    lines: Vec<LineMatrix>,
}

impl LineConfig {
    pub fn new(lines: Vec<LineMatrix>, tol: f64) -> Result<Self> {
        for l in &lines {
            l.check_normalized(tol)?;
        }
        Ok(LineConfig { lines })
    }

    pub(crate) fn new_unchecked(lines: Vec<LineMatrix>) -> Self {
        LineConfig { lines }
    }

    pub fn lines(&self) -> &[LineMatrix] {
        &self.lines
    }

    pub fn into_lines(self) -> Vec<LineMatrix> {
        self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn gram(&self) -> GramMatrix {
        GramMatrix::of_lines(&self.lines)
    }

    pub fn conj_by(&self, g: &SL2) -> LineConfig {
        LineConfig {
            lines: self.lines.iter().map(|l| conj_by(g, l)).collect(),
        }
    }

    pub fn negated(&self) -> LineConfig {
        LineConfig {
            lines: self.lines.iter().map(|l| -*l).collect(),
        }
    }

    pub fn dist(&self, other: &LineConfig) -> f64 {
        self.lines
            .iter()
            .zip(&other.lines)
            .map(|(a, b)| a.dist(b))
            .fold(0.0, f64::max)
    }
}

fn singular_values(x: &DMatrix<C>) -> Vec<f64> {
    x.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Numerical rank: singular values above `tol * sigma_max`.
pub fn rank(x: &GramMatrix, tol: f64) -> usize {
    numerical_rank(x.matrix(), tol)
}

pub(crate) fn numerical_rank(x: &DMatrix<C>, tol: f64) -> usize {
    let s = singular_values(x);
    let smax = s.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > tol * smax).count()
}

/// How [`realize_with`] chooses 1x1 pivots.
#[derive(Debug, Clone)]
pub enum Pivoting {
    /// Largest remaining diagonal entry.
    Largest,
    /// First index in the given order whose diagonal entry is acceptable.
    Ordered(Vec<usize>),
}

/// Realizes `X` by oriented lines, expressed in the basis `E1, E2, E3`.
pub fn realize(x: &GramMatrix, rank_tol: f64) -> Result<LineConfig> {
    realize_with(x, &Pivoting::Largest, rank_tol)
}

pub fn realize_with(x: &GramMatrix, pivoting: &Pivoting, rank_tol: f64) -> Result<LineConfig> {
    let n = x.n();
    let r = rank(x, rank_tol);
    if r > 3 {
        return Err(Error::RankTooHigh(r));
    }
    let scale = x.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut a = x.matrix().clone();
    let mut cols: Vec<DVector<C>> = Vec::with_capacity(3);

    while cols.len() < r {
        let (mut dk, mut dmax) = (0, 0.0);
        for k in 0..n {
            if a[(k, k)].norm() > dmax {
                dk = k;
                dmax = a[(k, k)].norm();
            }
        }
        let (mut oj, mut ok, mut omax) = (0, 0, 0.0);
        for k in 0..n {
            for j in 0..k {
                if a[(j, k)].norm() > omax {
                    oj = j;
                    ok = k;
                    omax = a[(j, k)].norm();
                }
            }
        }
        if dmax.max(omax) <= 1e-14 * scale {
            return Err(Error::FactorizationFailed(format!(
                "remaining block vanished after {} of {r} terms",
                cols.len()
            )));
        }
        if dmax >= PIVOT_ALPHA * omax {
            let k = match pivoting {
                Pivoting::Largest => dk,
                Pivoting::Ordered(order) => order
                    .iter()
                    .copied()
                    .find(|&k| k < n && a[(k, k)].norm() >= 0.25 * dmax)
                    .unwrap_or(dk),
            };
            let u = a.column(k) * csqrt(a[(k, k)]).inv();
            a -= &u * u.transpose();
            cols.push(u);
        } else {
            if let Pivoting::Ordered(order) = pivoting {
                let pair = order
                    .iter()
                    .enumerate()
                    .flat_map(|(s, &j)| order[s + 1..].iter().map(move |&k| (j, k)))
                    .find(|&(j, k)| j < n && k < n && a[(j, k)].norm() >= 0.25 * omax);
                if let Some((j, k)) = pair {
                    let det = a[(j, j)] * a[(k, k)] - a[(j, k)] * a[(k, j)];
                    if det.norm() >= 0.25 * omax * omax {
                        oj = j;
                        ok = k;
                    }
                }
            }
            // 2x2 block pivot on an isotropic pair: X_pp^{-1} = Q Q^T
            let p = [[a[(oj, oj)], a[(oj, ok)]], [a[(ok, oj)], a[(ok, ok)]]];
            let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
            let pinv = [
                [p[1][1] / det, -p[0][1] / det],
                [-p[1][0] / det, p[0][0] / det],
            ];
            let q = symmetric_root_2x2(pinv);
            let cj = a.column(oj).clone_owned();
            let ck = a.column(ok).clone_owned();
            let u1 = &cj * q[0][0] + &ck * q[1][0];
            let u2 = &cj * q[0][1] + &ck * q[1][1];
            a -= &u1 * u1.transpose() + &u2 * u2.transpose();
            cols.push(u1);
            cols.push(u2);
        }
        if cols.len() > 3 {
            return Err(Error::FactorizationFailed(
                "block pivot overshot three dimensions".into(),
            ));
        }
    }

    let zero = c(0.0, 0.0);
    let lines: Vec<LineMatrix> = (0..n)
        .map(|i| {
            let mut v = [zero; 3];
            for (k, u) in cols.iter().enumerate() {
                v[k] = u[i];
            }
            LineMatrix::from_coords(v)
        })
        .collect();
    let cfg = LineConfig::new_unchecked(lines);
    let resid = cfg.gram().dist(x);
    if resid > 1e-8 * scale.max(1.0) {
        return Err(Error::FactorizationFailed(format!(
            "reconstruction residual {resid:.3e}"
        )));
    }
    Ok(cfg)
}

/// `Q` with `Q Q^T = m` for an invertible symmetric 2x2 matrix.
fn symmetric_root_2x2(m: [[C; 2]; 2]) -> [[C; 2]; 2] {
    let (al, be, ga) = (m[0][0], m[0][1], m[1][1]);
    let zero = c(0.0, 0.0);
    let big = al.norm().max(be.norm()).max(ga.norm());
    if al.norm() >= ga.norm() && al.norm() > 1e-8 * big {
        let r = csqrt(al);
        let s = csqrt(ga - be * be / al);
        [[r, zero], [be / r, s]]
    } else if ga.norm() > 1e-8 * big {
        let r = csqrt(ga);
        let s = csqrt(al - be * be / ga);
        [[s, be / r], [zero, r]]
    } else {
        // [[0, b], [b, 0]] = (b/2)[(1,1)(1,1)^T - (1,-1)(1,-1)^T]
        let h = csqrt(be * 0.5);
        let ih = h * c(0.0, 1.0);
        [[h, ih], [h, -ih]]
    }
}

fn coords_matrix(lines: &[LineMatrix]) -> DMatrix<C> {
    let rows = lines.len().max(3);
    DMatrix::from_fn(rows, 3, |i, k| {
        if i < lines.len() {
            lines[i].coords()[k]
        } else {
            c(0.0, 0.0)
        }
    })
}

/// True when the lines fail to span the space of line matrices.
pub fn is_degenerate(cfg: &LineConfig, tol: f64) -> bool {
    numerical_rank(&coords_matrix(cfg.lines()), tol) < 3
}

/// Degeneracy decided from the Gram matrix alone: `rank X = 2`.
pub fn degenerate_gram(x: &GramMatrix, tol: f64) -> Result<bool> {
    if x.all_unit_entries(tol.sqrt().max(tol)) {
        return Err(Error::Undecidable);
    }
    Ok(rank(x, tol) <= 2)
}

/// A line orthogonal to every line of `cfg`, if one exists and is normalizable.
pub fn common_perpendicular(cfg: &LineConfig, tol: f64) -> Option<LineMatrix> {
    let m = coords_matrix(cfg.lines());
    let svd = m.svd(false, true);
    let vt = svd.v_t?;
    let s = &svd.singular_values;
    let smax = s.iter().copied().fold(0.0, f64::max);
    let (k, smin) = s
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    if smin > tol * smax.max(1e-300) {
        return None;
    }
    let v = vt.row(k).adjoint();
    let n = LineMatrix::from_coords([v[0], v[1], v[2]]);
    n.normalized().ok()
}

/// Whether `dst` matches `src` or its orientation reversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Same,
    Reversed,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Same => 1.0,
            Orientation::Reversed => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Same => Orientation::Reversed,
            Orientation::Reversed => Orientation::Same,
        }
    }
}

/// Solution of `g src_i = dst_i g` in the four entries of `g`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Conjugator {
    pub g: Option<SL2>,
    /// Max entrywise `|g src_i g^-1 - dst_i|`.
    pub residual: f64,
}

pub(crate) fn solve_conjugator(src: &[Mat2], dst: &[Mat2]) -> Conjugator {
    let m = src.len();
    let zero = c(0.0, 0.0);
    let mut a = DMatrix::from_element(4 * m, 4, zero);
    for (i, (l, t)) in src.iter().zip(dst).enumerate() {
        let r = 4 * i;
        let rows = [
            [l.a - t.a, l.c, -t.b, zero],
            [l.b, l.d - t.a, zero, -t.b],
            [-t.c, zero, l.a - t.d, l.c],
            [zero, -t.c, l.b, l.d - t.d],
        ];
        for (k, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                a[(r + k, j)] = *v;
            }
        }
    }
    let svd = a.svd(false, true);
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    let vt = svd.v_t.expect("v_t requested");
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&x, &y| s[x].total_cmp(&s[y]));
    let v = vt.row(idx[0]).adjoint();
    let g = SL2::normalized(Mat2::new(v[0], v[1], v[2], v[3])).ok();
    let residual = match g {
        Some(g) => src
            .iter()
            .zip(dst)
            .map(|(l, t)| (g.mat() * *l * g.inv().mat()).dist(t))
            .fold(0.0, f64::max),
        None => f64::INFINITY,
    };
    Conjugator { g, residual }
}

/// The isometry `g` with `g . src_i = s * dst_i` for the requested sign `s`.
pub fn congruence_with_sign(
    src: &LineConfig,
    dst: &LineConfig,
    orientation: Orientation,
    tol: f64,
) -> Result<SL2> {
    if src.len() != dst.len() {
        return Err(Error::SizeMismatch(src.len(), dst.len()));
    }
    if is_degenerate(src, 1e-9) {
        return Err(Error::DegenerateSource);
    }
    let s = c(orientation.sign(), 0.0);
    let from: Vec<Mat2> = src.lines().iter().map(|l| l.mat()).collect();
    let to: Vec<Mat2> = dst.lines().iter().map(|l| l.mat() * s).collect();
    let sol = solve_conjugator(&from, &to);
    match sol.g {
        Some(g) if sol.residual <= tol => Ok(g),
        _ => Err(Error::NoCongruence(sol.residual)),
    }
}

/// The isometry relating two configurations with equal Gram matrices,
/// together with the global orientation sign it needs.
pub fn congruence(src: &LineConfig, dst: &LineConfig, tol: f64) -> Result<(SL2, Orientation)> {
    let mut best = f64::INFINITY;
    for o in [Orientation::Same, Orientation::Reversed] {
        match congruence_with_sign(src, dst, o, tol) {
            Ok(g) => return Ok((g, o)),
            Err(Error::NoCongruence(r)) => best = best.min(r),
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoCongruence(best))
}
