//! Developing a coherent realization along paths in the dual 1-skeleton,
//! and reading off the holonomy representation.

use std::collections::VecDeque;

use serde::Serialize;

use crate::coherence::{find_coherent_with_stats, flip_branch, HextetRealization};
use crate::error::{Error, Result};
use crate::gram::{congruence_with_sign, is_degenerate, solve_conjugator, LineConfig, Orientation};
use crate::mat2::{conj_by, form, LineMatrix, Mat2, C, SL2};
use crate::orthinv::{orth_invariant, EdgeHolonomyData};
use crate::tolerance::Tolerances;
use crate::triangulation::{face_vertices, OrthParams, Triangulation, TET_EDGES};

/// A walk through the dual 1-skeleton: start in `start`, then leave the
/// current tetrahedron through face `steps[k]` at step `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualPath {
    pub start: usize,
    pub steps: Vec<usize>,
}

impl DualPath {
    pub fn new(start: usize, steps: Vec<usize>) -> Self {
        DualPath { start, steps }
    }

    pub fn empty(start: usize) -> Self {
        DualPath::new(start, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Tetrahedra visited, including the start: `len() + 1` entries.
    pub fn tets(&self, t: &Triangulation) -> Result<Vec<usize>> {
        if self.start >= t.n() {
            return Err(Error::InvalidPath {
                step: 0,
                reason: format!("start tetrahedron {} does not exist", self.start),
            });
        }
        let mut out = vec![self.start];
        let mut cur = self.start;
        for (k, &f) in self.steps.iter().enumerate() {
            if f > 3 {
                return Err(Error::InvalidPath {
                    step: k,
                    reason: format!("face {f} is not in 0..4"),
                });
            }
            cur = t.link(cur, f).tet;
            out.push(cur);
        }
        Ok(out)
    }

    pub fn end(&self, t: &Triangulation) -> Result<usize> {
        Ok(*self.tets(t)?.last().expect("at least the start"))
    }

    /// The same walk traversed backwards.
    pub fn reversed(&self, t: &Triangulation) -> Result<DualPath> {
        let tets = self.tets(t)?;
        let steps = self
            .steps
            .iter()
            .zip(&tets)
            .rev()
            .map(|(&f, &u)| t.link(u, f).face)
            .collect();
        Ok(DualPath::new(*tets.last().expect("nonempty"), steps))
    }

    /// `self` followed by `other`, which must start where `self` ends.
    pub fn then(&self, t: &Triangulation, other: &DualPath) -> Result<DualPath> {
        let end = self.end(t)?;
        if other.start != end {
            return Err(Error::InvalidPath {
                step: self.len(),
                reason: format!("path ends in tetrahedron {end} but the next starts in {}", other.start),
            });
        }
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        Ok(DualPath::new(self.start, steps))
    }
}

/// Hextets along a developed path. `maps[k]` carries the realization's
/// hextet of `tets[k]` onto `hextets[k]`.
#[derive(Debug, Clone)]
pub struct DevelopedHextets {
    pub tets: Vec<usize>,
    pub hextets: Vec<[LineMatrix; 4]>,
    pub maps: Vec<SL2>,
}

impl DevelopedHextets {
    pub fn last(&self) -> &[LineMatrix; 4] {
        self.hextets.last().expect("at least the seed")
    }

    pub fn last_map(&self) -> SL2 {
        *self.maps.last().expect("at least the seed")
    }
}

fn max_dist(a: &[LineMatrix], b: &[LineMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dist(y)).fold(0.0, f64::max)
}

fn scale_of(lines: &[LineMatrix]) -> f64 {
    lines.iter().map(|l| l.mat().norm_max()).fold(1.0, f64::max)
}

/// Developing map machinery over a fixed coherent realization.
#[derive(Debug, Clone, Copy)]
pub struct Developer<'a> {
    t: &'a Triangulation,
    r: &'a HextetRealization,
    tol: Tolerances,
}

impl<'a> Developer<'a> {
    pub fn new(t: &'a Triangulation, r: &'a HextetRealization, tol: &Tolerances) -> Result<Self> {
        if r.tets.len() != t.n() {
            return Err(Error::SizeMismatch(r.tets.len(), t.n()));
        }
        Ok(Developer { t, r, tol: *tol })
    }

    /// Maps that carry the realization of `v` onto the developed copy sharing
    /// face `f` of the current hextet `cur` of `u`.
    fn step(&self, u: usize, cur: &[LineMatrix; 4], f: usize) -> Result<(usize, SL2)> {
        let link = *self.t.link(u, f);
        let v = link.tet;
        let fv = face_vertices(f);
        let dst: Vec<LineMatrix> = fv.iter().map(|&w| cur[w]).collect();
        let src: Vec<LineMatrix> = fv.iter().map(|&w| self.r.tets[v][link.perm[w]]).collect();
        // Anchor on the pair of corners farthest from sharing an end-point.
        let away = |j: usize, k: usize| {
            let x = form(&dst[j], &dst[k]);
            (x - 1.0).norm().min((x + 1.0).norm())
        };
        let (j, k) = [(0, 1), (0, 2), (1, 2)]
            .into_iter()
            .max_by(|a, b| away(a.0, a.1).total_cmp(&away(b.0, b.1)))
            .expect("three pairs");
        let mut s: Vec<Mat2> = src.iter().map(LineMatrix::mat).collect();
        let mut d: Vec<Mat2> = dst.iter().map(LineMatrix::mat).collect();
        s.push(s[j].commutator(&s[k]));
        d.push(d[j].commutator(&d[k]));
        let sol = solve_conjugator(&s, &d);
        let thr = self.tol.geom.sqrt() * scale_of(&dst).powi(2);
        match sol.g {
            Some(g) if sol.residual <= thr => Ok((v, g)),
            _ => Err(Error::IncoherentFace(link.gluing)),
        }
    }

    /// Develops `path` from the realization's own hextet of its start.
    pub fn propagate(&self, path: &DualPath) -> Result<DevelopedHextets> {
        self.propagate_from(path, &SL2::identity())
    }

    /// Develops `path` from `seed` applied to the realization's hextet.
    pub fn propagate_from(&self, path: &DualPath, seed: &SL2) -> Result<DevelopedHextets> {
        path.tets(self.t)?;
        let start = path.start;
        let first = self.r.tets[start].map(|l| conj_by(seed, &l));
        let mut out = DevelopedHextets {
            tets: vec![start],
            hextets: vec![first],
            maps: vec![*seed],
        };
        let mut u = start;
        for &f in &path.steps {
            let cur = *out.last();
            let (v, g) = self.step(u, &cur, f)?;
            out.tets.push(v);
            out.hextets.push(self.r.tets[v].map(|l| conj_by(&g, &l)));
            out.maps.push(g);
            u = v;
        }
        Ok(out)
    }

    /// The isometry taking the seed hextet to the end of each loop.
    pub fn holonomy(&self, loops: &[DualPath]) -> Result<Vec<SL2>> {
        self.holonomy_from(loops, &SL2::identity())
    }

    pub fn holonomy_from(&self, loops: &[DualPath], seed: &SL2) -> Result<Vec<SL2>> {
        loops
            .iter()
            .map(|lp| {
                let tets = lp.tets(self.t)?;
                if lp.start != 0 || *tets.last().expect("nonempty") != 0 {
                    return Err(Error::InvalidPath {
                        step: lp.len(),
                        reason: "holonomy loops must start and end at tetrahedron 0".into(),
                    });
                }
                let dev = self.propagate_from(lp, seed)?;
                let src = LineConfig::new_unchecked(dev.hextets[0].to_vec());
                if is_degenerate(&src, self.tol.rank) {
                    return Err(Error::DegenerateSeed);
                }
                let dst = LineConfig::new_unchecked(dev.last().to_vec());
                let tol = self.tol.geom.sqrt() * scale_of(dev.last()).powi(2);
                congruence_with_sign(&src, &dst, Orientation::Same, tol).map_err(|e| match e {
                    Error::NoCongruence(_) => Error::IncoherentFace(usize::MAX),
                    other => other,
                })
            })
            .collect()
    }
}

/// Paths from tetrahedron 0 to every tetrahedron along a breadth-first
/// spanning tree of the dual graph, and the gluings the tree uses.
pub fn spanning_tree(t: &Triangulation) -> (Vec<DualPath>, Vec<bool>) {
    let n = t.n();
    let mut paths: Vec<Option<DualPath>> = vec![None; n];
    let mut in_tree = vec![false; t.num_faces()];
    paths[0] = Some(DualPath::empty(0));
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for f in 0..4 {
            let link = t.link(u, f);
            if paths[link.tet].is_none() {
                let mut p = paths[u].clone().expect("visited");
                p.steps.push(f);
                paths[link.tet] = Some(p);
                in_tree[link.gluing] = true;
                queue.push_back(link.tet);
            }
        }
    }
    let paths = paths
        .into_iter()
        .enumerate()
        .map(|(k, p)| p.unwrap_or_else(|| panic!("tetrahedron {k} is not reachable from 0")))
        .collect();
    (paths, in_tree)
}

/// One loop at tetrahedron 0 per gluing outside the spanning tree.
pub fn generating_loops(t: &Triangulation) -> Result<Vec<DualPath>> {
    let (paths, in_tree) = spanning_tree(t);
    let mut out = Vec::new();
    for (gi, used) in in_tree.iter().enumerate() {
        if *used {
            continue;
        }
        let g = t.gluing(gi);
        let cross = DualPath::new(g.a.tet, vec![g.a.face]);
        let lp = paths[g.a.tet]
            .then(t, &cross)?
            .then(t, &paths[g.b.tet].reversed(t)?)?;
        out.push(lp);
    }
    Ok(out)
}

/// A walk around one edge of the triangulation.
#[derive(Debug, Clone)]
pub struct EdgeLoop {
    pub class: usize,
    pub path: DualPath,
    /// The edge's endpoints in each visited tetrahedron.
    pub ends: Vec<(usize, usize)>,
}

/// The dual 2-cell boundary around each edge class, starting at its first
/// occurrence in storage order.
pub fn edge_loops(t: &Triangulation) -> Vec<EdgeLoop> {
    let mut out = Vec::new();
    let mut done = vec![false; t.n()];
    for tet in 0..t.n() {
        for (i, j) in TET_EDGES {
            let class = t.edge_class(tet, i, j);
            if done[class] {
                continue;
            }
            done[class] = true;
            let exit = (0..4).find(|v| *v != i && *v != j).expect("two other vertices");
            let (mut u, mut a, mut b, mut f) = (tet, i, j, exit);
            let mut steps = Vec::new();
            let mut ends = vec![(i, j)];
            loop {
                let link = t.link(u, f);
                steps.push(f);
                let (a1, b1) = (link.perm[a], link.perm[b]);
                let next = (0..4)
                    .find(|&v| v != a1 && v != b1 && v != link.face)
                    .expect("one vertex left");
                u = link.tet;
                a = a1;
                b = b1;
                f = next;
                ends.push((a, b));
                if u == tet && a.min(b) == i && a.max(b) == j {
                    break;
                }
            }
            out.push(EdgeLoop {
                class,
                path: DualPath::new(tet, steps),
                ends,
            });
        }
    }
    out
}

/// Largest deviation from closing up around each edge: the developed
/// hextets must keep the edge's two lines and return to the start.
pub fn edge_closure_residual(dev: &Developer, loops: &[EdgeLoop]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for lp in loops {
        let d = dev.propagate(&lp.path)?;
        let (i, j) = lp.ends[0];
        let (li, lj) = (d.hextets[0][i], d.hextets[0][j]);
        for (h, &(a, b)) in d.hextets.iter().zip(&lp.ends) {
            worst = worst.max(h[a].dist(&li)).max(h[b].dist(&lj));
        }
        worst = worst.max(max_dist(d.last(), &d.hextets[0]));
    }
    Ok(worst)
}

/// Paths inside the link of the cusp: from `(tet 0, corner 0)` to every
/// `(tet, corner)` in the same vertex class, moving only through faces that
/// contain the tracked corner, and the loops closing the remaining moves.
fn link_paths(t: &Triangulation) -> (Vec<Option<DualPath>>, Vec<DualPath>) {
    let n = t.n();
    let mut paths: Vec<Option<DualPath>> = vec![None; 4 * n];
    paths[0] = Some(DualPath::empty(0));
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    let mut extra = Vec::new();
    while let Some((u, c)) = queue.pop_front() {
        for f in (0..4).filter(|&f| f != c) {
            let link = t.link(u, f);
            let (v, cv) = (link.tet, link.perm[c]);
            let mut p = paths[4 * u + c].clone().expect("visited");
            p.steps.push(f);
            match &paths[4 * v + cv] {
                None => {
                    paths[4 * v + cv] = Some(p);
                    queue.push_back((v, cv));
                }
                Some(q) => extra.push((p, q.clone())),
            }
        }
    }
    let loops = extra
        .into_iter()
        .filter_map(|(p, q)| q.reversed(t).and_then(|r| p.then(t, &r)).ok())
        .collect();
    (paths, loops)
}

/// Everything recovered from `p` on the way back to `p`.
#[derive(Debug, Clone, Serialize)]
pub struct Reconstruction {
    /// Holonomy of each generating loop.
    pub generators: Vec<SL2>,
    pub loops: Vec<DualPath>,
    /// Per edge class, the form of the two corner lines of a developed hextet.
    pub cosh_d_lines: Vec<C>,
    /// Per edge class, the trace formula applied to the reconstructed holonomy.
    pub cosh_d_trace: Vec<C>,
    /// Peripheral element and one element per edge, in the representation format.
    pub edge_data: EdgeHolonomyData,
    pub max_residual: f64,
    pub closure_residual: f64,
    /// Distance between the holonomies of the two global orientations.
    pub branch_flip_residual: f64,
    /// True when `p` lies in the set where reconstruction may not be unique.
    pub non_unique: bool,
}

fn projective_close(a: &SL2, b: &SL2) -> f64 {
    let s = a.mat().norm_max().max(b.mat().norm_max()).max(1.0);
    a.dist_projective(b) / s
}

/// Reconstructs the holonomy of a coherent `p` and recomputes `p` from it.
pub fn orth_roundtrip(t: &Triangulation, p: &OrthParams, tol: &Tolerances) -> Result<Reconstruction> {
    let (r, _) = find_coherent_with_stats(t, p, tol)?;
    let non_unique = t.in_s(p, tol.geom)?;
    if non_unique {
        log::warn!("parameters lie in the multiply degenerate set; the reconstruction may not be unique");
    }
    let dev = Developer::new(t, &r, tol)?;
    let loops = generating_loops(t)?;
    let generators = dev.holonomy(&loops)?;
    let closure_residual = edge_closure_residual(&dev, &edge_loops(t))?;

    // The other global orientation is conjugate to the first.
    let mut flipped = r.clone();
    for k in 0..t.n() {
        flipped = flip_branch(&flipped, k, tol.geom)?;
    }
    let dev2 = Developer::new(t, &flipped, tol)?;
    let gens2 = dev2.holonomy(&loops)?;
    let src = LineConfig::new_unchecked(r.tets[0].to_vec());
    let dst = LineConfig::new_unchecked(flipped.tets[0].to_vec());
    let k = congruence_with_sign(&src, &dst, Orientation::Reversed, 1e-6)?;
    let branch_flip_residual = generators
        .iter()
        .zip(&gens2)
        .map(|(a, b)| projective_close(&(k * *a * k.inv()), b))
        .fold(0.0, f64::max);

    // Peripheral subgroup of the corner line of tetrahedron 0, vertex 0.
    let (lpaths, lloops) = link_paths(t);
    let mut periph: Vec<SL2> = dev.holonomy(&lloops)?;
    let disc = |h: &SL2| (h.tr() * h.tr() - 4.0).norm();
    periph.sort_by(|a, b| disc(b).total_cmp(&disc(a)));
    let h = *periph.first().ok_or(Error::ParabolicPeripheral(0.0))?;
    let l = periph
        .iter()
        .find(|g| projective_close(g, &h) > 1e-6 && projective_close(g, &h.inv()) > 1e-6)
        .copied();

    let n = t.n();
    let mut reps: Vec<Option<(usize, usize, usize)>> = vec![None; n];
    for tet in 0..n {
        for (i, j) in TET_EDGES {
            let e = t.edge_class(tet, i, j);
            if reps[e].is_none() {
                reps[e] = Some((tet, i, j));
            }
        }
    }
    let mut cosh_d_lines = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(n);
    for rep in reps {
        let (tet, i, j) = rep.expect("every edge class occurs");
        let map_to = |c: usize| -> Result<SL2> {
            let path = lpaths[4 * tet + c]
                .as_ref()
                .ok_or_else(|| Error::InvalidTriangulation("more than one cusp".into()))?;
            Ok(dev.propagate(path)?.last_map())
        };
        let (gi, gj) = (map_to(i)?, map_to(j)?);
        // Both carry their corner onto the base line; gi gj^-1 relates the two ends.
        edges.push(gi * gj.inv());
        cosh_d_lines.push(form(&r.tets[tet][i], &r.tets[tet][j]));
    }
    let edge_data = EdgeHolonomyData::new(h, edges, l)?;
    let cosh_d_trace = orth_invariant(&edge_data, tol)?.coshd;
    let max_residual = p
        .p
        .iter()
        .zip(cosh_d_lines.iter().zip(&cosh_d_trace))
        .map(|(x, (a, b))| (x - a).norm().max((x - b).norm()))
        .fold(0.0, f64::max);
    Ok(Reconstruction {
        generators,
        loops,
        cosh_d_lines,
        cosh_d_trace,
        edge_data,
        max_residual,
        closure_residual,
        branch_flip_residual,
        non_unique,
    })
}
