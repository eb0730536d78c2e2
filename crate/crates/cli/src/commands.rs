use orthocalc_core::coherence::{find_coherent_with_stats, HextetRealization};
use orthocalc_core::continuation::{trace_curve, TraceRun};
use orthocalc_core::develop::orth_roundtrip;
use orthocalc_core::fig8;
use orthocalc_core::gram::{is_degenerate, realize_with, GramMatrix, Pivoting};
use orthocalc_core::mat2::C;
use orthocalc_core::orthinv::{orth_invariant_with, EdgeHolonomyData, MethodRegistry};
use orthocalc_core::triangulation::{t_coordinate, OrthParams, Triangulation};
use orthocalc_core::{Error, Result, Tolerances};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::input::{json_arg, parse_complex, read};
use crate::Pivot;

pub const FORMATS_HELP: &str = "\
File formats (all JSON):
  complex         [re, im]
  matrix          [a, b, c, d] row-major, each entry complex
  parameters      [complex, ...], one per edge class
  gram matrix     {\"n\": 3, \"entries\": [[complex, ...], ...]}
  representation  {\"h\": matrix, \"edges\": [matrix, ...], \"l\": matrix (optional)}
  triangulation   {\"tets\": [[cusp label x4], ...],
                   \"gluings\": [{\"a\": {\"tet\", \"face\", \"verts\": [3]}, \"b\": {...}}, ...],
                   \"edge_classes\": [[class of edge 01,02,03,12,13,23], ...]}
  trace run       {\"start\": parameters, \"direction\": [complex, ...],
                   \"step\": 0.05, \"max_steps\": 100, \"tol\": 1e-9}

Exit codes: 0 success, 1 negative verdict, 2 input error, 3 numerical failure.";

pub struct Outcome {
    pub value: Value,
    pub code: u8,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome { value, code: 0 }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("values serialize")
}

fn load_tri(path: &str) -> Result<Triangulation> {
    Triangulation::from_json(&read(path)?)
}

fn load_params(arg: &str) -> Result<OrthParams> {
    json_arg(arg)
}

pub fn check(tri: &str, params: &str, tol: &Tolerances) -> Result<Outcome> {
    let t = load_tri(tri)?;
    let p = load_params(params)?;
    let residuals = t.hextet_residuals(&p)?;
    let hexagons = (0..t.num_faces())
        .map(|f| t.hexagon_residual(f, &p))
        .collect::<Result<Vec<C>>>()?;
    let mut warnings: Vec<String> = t.warnings().to_vec();
    if let Some(k) = t_coordinate(&p, tol.geom) {
        let w = format!("coordinate {k} is +-1; coherence and reconstruction are undefined there");
        log::warn!("{w}");
        warnings.push(w);
    }
    Ok(Outcome::ok(json!({
        "residuals": residuals,
        "in_PK": t.in_pk(&p, tol.geom)?,
        "hexagon_residuals": hexagons,
        "degenerate_faces": t.degenerate_faces(&p, tol.geom)?,
        "in_S": t.in_s(&p, tol.geom)?,
        "in_T": t_coordinate(&p, tol.geom).is_some(),
        "warnings": warnings,
    })))
}

pub fn orth(rep: &str, method: &str, tol: &Tolerances) -> Result<Outcome> {
    let data: EdgeHolonomyData = json_arg(rep)?;
    let m = MethodRegistry::default().get(method)?;
    let inv = orth_invariant_with(m.as_ref(), &data, tol)?;
    Ok(Outcome::ok(to_value(&inv)))
}

pub fn realize(gram: &str, pivot: Pivot, order: &[usize], seed: u64, tol: &Tolerances) -> Result<Outcome> {
    let x: GramMatrix = json_arg(gram)?;
    let n = x.n();
    let pivoting = match pivot {
        Pivot::Largest => Pivoting::Largest,
        Pivot::Ordered => {
            let mut sorted = order.to_vec();
            sorted.sort_unstable();
            if sorted != (0..n).collect::<Vec<_>>() {
                return Err(Error::Parse(format!("--order must be a permutation of 0..{n}")));
            }
            Pivoting::Ordered(order.to_vec())
        }
        Pivot::Shuffled => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            Pivoting::Ordered(perm)
        }
    };
    let cfg = realize_with(&x, &pivoting, tol.rank)?;
    let got = cfg.gram();
    Ok(Outcome::ok(json!({
        "lines": cfg,
        "gram_residual": got.dist(&x),
        "degenerate": is_degenerate(&cfg, tol.rank),
    })))
}

pub fn coherent(tri: &str, params: &str, tol: &Tolerances) -> Result<Outcome> {
    let t = load_tri(tri)?;
    let p = load_params(params)?;
    match find_coherent_with_stats(&t, &p, tol) {
        Ok((r, stats)) => Ok(Outcome::ok(json!({
            "coherent": true,
            "realization": to_value::<HextetRealization>(&r),
            "param_residual": r.param_residual(&t, &p)?,
            "branches_explored": stats.branches_explored,
            "in_S": t.in_s(&p, tol.geom)?,
        }))),
        Err(Error::NotCoherent) => Ok(Outcome {
            value: json!({"coherent": false}),
            code: 1,
        }),
        Err(e) => Err(e),
    }
}

pub fn reconstruct(tri: &str, params: &str, tol: &Tolerances) -> Result<Outcome> {
    let t = load_tri(tri)?;
    let p = load_params(params)?;
    let rep = orth_roundtrip(&t, &p, tol)?;
    Ok(Outcome::ok(to_value(&rep)))
}

pub fn trace(
    tri: &str,
    run: Option<String>,
    start: Option<String>,
    direction: Option<String>,
    step: Option<f64>,
    max_steps: Option<usize>,
) -> Result<Outcome> {
    let t = load_tri(tri)?;
    let mut run: TraceRun = match run {
        Some(r) => json_arg(&r)?,
        None => {
            let start = load_params(start.as_deref().unwrap_or_default())?;
            let direction: Vec<C> = json_arg(direction.as_deref().unwrap_or_default())?;
            TraceRun::new(start, direction)
        }
    };
    if let Some(s) = step {
        run.step = s;
    }
    if let Some(m) = max_steps {
        run.max_steps = m;
    }
    let out = trace_curve(&t, &run)?;
    Ok(Outcome::ok(to_value(&out)))
}

pub fn fig8(v: Option<&str>, selftest: bool, triangulation: bool, tol: &Tolerances) -> Result<Outcome> {
    if triangulation {
        return Ok(Outcome::ok(to_value(&Triangulation::fig8())));
    }
    if selftest {
        let checks = fig8::selftest(tol);
        let pass = checks.iter().all(|c| c.pass);
        return Ok(Outcome {
            value: json!({"pass": pass, "checks": checks}),
            code: if pass { 0 } else { 1 },
        });
    }
    let v = parse_complex(v.unwrap_or_default())?;
    Ok(Outcome::ok(to_value(&fig8::evaluate(v, tol)?)))
}
