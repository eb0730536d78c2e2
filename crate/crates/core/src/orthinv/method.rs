use crate::error::{Error, Result};
use crate::mat2::{axis, conj_by, form, C, SL2};
use crate::tolerance::Tolerances;

/// A way of computing `cosh d` for one edge: the complex distance between
/// the axis of the peripheral element `h` and its translate by `g`.
pub trait OrthMethod: Send + Sync {
    fn name(&self) -> &'static str;

    fn cosh_d(&self, h: &SL2, g: &SL2, tol: &Tolerances) -> Result<C>;
}

fn check_peripheral(h: &SL2, tol: &Tolerances) -> Result<C> {
    let t2 = h.tr() * h.tr();
    let dev = (t2 - 4.0).norm();
    if dev < tol.parabolic {
        return Err(Error::ParabolicPeripheral(dev));
    }
    Ok(t2)
}

/// Closed form in traces of the lifts:
/// `2 (tr(hg) tr(h^-1 g) - tr(g)^2) / (tr(h)^2 - 4) - 1`.
#[derive(Debug, Default, Clone, Copy)]
pub struct TraceFormula;

impl OrthMethod for TraceFormula {
    fn name(&self) -> &'static str {
        "trace"
    }

    fn cosh_d(&self, h: &SL2, g: &SL2, tol: &Tolerances) -> Result<C> {
        let t2h = check_peripheral(h, tol)?;
        let hg = (*h * *g).tr();
        let hig = (h.inv() * *g).tr();
        let tg = g.tr();
        Ok((hg * hig - tg * tg) * 2.0 / (t2h - 4.0) - 1.0)
    }
}

/// Direct geometry: form of the axis of `h` with its image under `g`.
#[derive(Debug, Default, Clone, Copy)]
pub struct AxisMethod;

impl OrthMethod for AxisMethod {
    fn name(&self) -> &'static str {
        "axis"
    }

    fn cosh_d(&self, h: &SL2, g: &SL2, tol: &Tolerances) -> Result<C> {
        check_peripheral(h, tol)?;
        let sigma = axis(h, tol)?;
        Ok(form(&sigma, &conj_by(g, &sigma)))
    }
}
