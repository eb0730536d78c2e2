//! The ortholength invariant of a representation restricted to edge data.

mod method;
mod registry;

pub use method::{AxisMethod, OrthMethod, TraceFormula};
pub use registry::MethodRegistry;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::{Mat2, C, SL2};
use crate::tolerance::Tolerances;

/// Lifts of a peripheral element and of one element per edge of the triangulation.
///
/// `l` is an optional second peripheral generator commuting with `h`; when it
/// is present the pair is checked for admissibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEdgeData", into = "RawEdgeData")]
pub struct EdgeHolonomyData {
    pub h: SL2,
    pub edges: Vec<SL2>,
    pub l: Option<SL2>,
}

#[derive(Serialize, Deserialize)]
struct RawEdgeData {
    h: Mat2,
    edges: Vec<Mat2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    l: Option<Mat2>,
}

impl TryFrom<RawEdgeData> for EdgeHolonomyData {
    type Error = Error;

    fn try_from(raw: RawEdgeData) -> Result<Self> {
        let tol = Tolerances::default().det;
        // Decimal input loses a few ulps; accept anything that rounds to det 1.
        let lift = |m: Mat2| SL2::new_with_tol(m, tol.max(1e-10));
        let edges = raw.edges.into_iter().map(lift).collect::<Result<Vec<_>>>()?;
        EdgeHolonomyData::new(lift(raw.h)?, edges, raw.l.map(lift).transpose()?)
    }
}

impl From<EdgeHolonomyData> for RawEdgeData {
    fn from(d: EdgeHolonomyData) -> Self {
        RawEdgeData {
            h: d.h.mat(),
            edges: d.edges.iter().map(SL2::mat).collect(),
            l: d.l.map(|l| l.mat()),
        }
    }
}

impl EdgeHolonomyData {
    pub fn new(h: SL2, edges: Vec<SL2>, l: Option<SL2>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::ParamCount {
                expected: 1,
                got: 0,
            });
        }
        Ok(EdgeHolonomyData { h, edges, l })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Conjugates every element by `g`.
    pub fn conj_by(&self, g: &SL2) -> Self {
        let f = |x: &SL2| *g * *x * g.inv();
        EdgeHolonomyData {
            h: f(&self.h),
            edges: self.edges.iter().map(f).collect(),
            l: self.l.as_ref().map(f),
        }
    }
}

/// `(cosh d_1, ..., cosh d_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthInvariant {
    #[serde(rename = "cosh_d")]
    pub coshd: Vec<C>,
}

impl OrthInvariant {
    pub fn max_dist(&self, other: &[C]) -> f64 {
        if self.coshd.len() != other.len() {
            return f64::INFINITY;
        }
        self.coshd
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// False exactly on the two excluded trace loci: both generators with
/// `tr^2 = 4`, or all of `m`, `l`, `ml` with `tr^2 = 0`.
pub fn admissible(m: &SL2, l: &SL2, tol: &Tolerances) -> bool {
    let eps = tol.parabolic;
    let t2 = |g: &SL2| g.tr() * g.tr();
    let (tm, tl, tml) = (t2(m), t2(l), t2(&(*m * *l)));
    let both_parabolic = (tm - 4.0).norm() < eps && (tl - 4.0).norm() < eps;
    let klein_four = tm.norm() < eps && tl.norm() < eps && tml.norm() < eps;
    !(both_parabolic || klein_four)
}

pub fn cosh_d_trace(h: &SL2, g: &SL2, tol: &Tolerances) -> Result<C> {
    TraceFormula.cosh_d(h, g, tol)
}

pub fn cosh_d_axis(h: &SL2, g: &SL2, tol: &Tolerances) -> Result<C> {
    AxisMethod.cosh_d(h, g, tol)
}

pub fn orth_invariant(data: &EdgeHolonomyData, tol: &Tolerances) -> Result<OrthInvariant> {
    orth_invariant_with(&TraceFormula, data, tol)
}

pub fn orth_invariant_with(
    method: &dyn OrthMethod,
    data: &EdgeHolonomyData,
    tol: &Tolerances,
) -> Result<OrthInvariant> {
    if let Some(l) = &data.l {
        if !admissible(&data.h, l, tol) {
            return Err(Error::Inadmissible);
        }
    }
    let coshd = data
        .edges
        .iter()
        .map(|g| method.cosh_d(&data.h, g, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(OrthInvariant { coshd })
}
