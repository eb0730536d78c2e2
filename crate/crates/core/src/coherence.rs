//! Reduced hextets and hexagons, the covering involution, and the search
//! for a realization whose face hexagons match across every gluing.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{realize, solve_conjugator, GramMatrix, LineConfig};
use crate::mat2::{conj_by, form, i, LineMatrix, Mat2, C, SL2};
use crate::tolerance::Tolerances;
use crate::triangulation::{t_coordinate, OrthParams, Triangulation};

/// Lines in standard position: `l1 = E1`, `l2 = [[a, i - a], [i + a, -a]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduced<const N: usize> {
    pub a: C,
    pub lines: [LineMatrix; N],
}

pub type ReducedHextet = Reduced<4>;
pub type ReducedHexagon = Reduced<3>;

/// The second standard line for parameter `a`.
pub fn standard_l2(a: C) -> LineMatrix {
    LineMatrix::from_mat_unchecked(Mat2::new(a, i() - a, i() + a, -a))
}

impl<const N: usize> Reduced<N> {
    pub fn gram(&self) -> GramMatrix {
        GramMatrix::of_lines(&self.lines)
    }

    /// Largest entrywise distance between corresponding lines.
    pub fn dist(&self, other: &Reduced<N>) -> f64 {
        self.lines
            .iter()
            .zip(&other.lines)
            .map(|(x, y)| x.dist(y))
            .fold(0.0, f64::max)
    }

    /// Distance of `l1`, `l2` from their standard forms.
    pub fn position_residual(&self) -> f64 {
        self.lines[0]
            .dist(&LineMatrix::e1())
            .max(self.lines[1].dist(&standard_l2(self.a)))
    }
}

/// Moves `lines` into standard position, returning the isometry used.
pub fn reduce<const N: usize>(lines: &[LineMatrix; N], tol: f64) -> Result<(Reduced<N>, SL2)> {
    assert!(N >= 2, "reduction needs at least two lines");
    let x = form(&lines[0], &lines[1]);
    if (x - 1.0).norm() < tol || (x + 1.0).norm() < tol {
        return Err(Error::SharedEndpoint);
    }
    let a = i() * x;
    let (e1, l2) = (LineMatrix::e1().mat(), standard_l2(a).mat());
    let (s1, s2) = (lines[0].mat(), lines[1].mat());
    let sol = solve_conjugator(&[s1, s2, s1.commutator(&s2)], &[e1, l2, e1.commutator(&l2)]);
    let g = sol.g.ok_or(Error::SharedEndpoint)?;
    let scale = 1.0 + x.norm();
    if sol.residual > 1e-6 * scale {
        return Err(Error::NoCongruence(sol.residual));
    }
    let mut out = lines.map(|l| conj_by(&g, &l));
    // Pin the anchor lines exactly.
    out[0] = LineMatrix::e1();
    out[1] = standard_l2(a);
    Ok((Reduced { a, lines: out }, g))
}

fn flip_line(a: C, l: &LineMatrix) -> LineMatrix {
    let m = l.mat();
    let r = (i() - a) / (i() + a);
    LineMatrix::from_mat_unchecked(Mat2::new(m.a, r * m.c, m.b / r, m.d))
}

/// The deck transformation of the two-sheeted cover: fixes `l1`, `l2` and
/// applies `f_a` to the remaining lines.
pub fn involution<const N: usize>(h: &Reduced<N>) -> Reduced<N> {
    let mut lines = h.lines;
    for l in lines.iter_mut().skip(2) {
        *l = flip_line(h.a, l);
    }
    Reduced { a: h.a, lines }
}

/// Four corner lines for every tetrahedron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HextetRealization {
    pub tets: Vec<[LineMatrix; 4]>,
}

impl HextetRealization {
    /// Largest `|<l_i, l_j> - p_e|` over all tetrahedra and edges.
    pub fn param_residual(&self, t: &Triangulation, p: &OrthParams) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (k, lines) in self.tets.iter().enumerate() {
            let x = t.hextet_matrix(k, p)?;
            worst = worst.max(GramMatrix::of_lines(lines).dist(&x));
        }
        Ok(worst)
    }
}

/// The two corner-line triples of a face, matched vertex by vertex.
fn face_triples(
    t: &Triangulation,
    tets: &[[LineMatrix; 4]],
    face: usize,
) -> ([LineMatrix; 3], [LineMatrix; 3]) {
    let g = t.gluing(face);
    let ta = g.a.verts.map(|v| tets[g.a.tet][v]);
    let tb = g.b.verts.map(|v| tets[g.b.tet][v]);
    (ta, tb)
}

/// Entrywise mismatch between the standard forms of two triples with equal
/// Gram matrices, or `None` when their hexagon is degenerate.
fn hexagon_mismatch(ta: &[LineMatrix; 3], tb: &[LineMatrix; 3], tol: &Tolerances) -> Result<Option<f64>> {
    let ga = GramMatrix::of_lines(ta);
    let scale = ga.matrix().iter().map(|z| z.norm()).fold(1.0, f64::max);
    if ga.det().norm() < tol.geom * scale.powi(3) {
        return Ok(None);
    }
    // Anchor on the pair farthest from sharing an end-point.
    let pairs = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];
    let away = |(j, k, _): (usize, usize, usize)| {
        let x = ga.get(j, k);
        (x - 1.0).norm().min((x + 1.0).norm())
    };
    let (j, k, l) = pairs
        .into_iter()
        .max_by(|&p, &q| away(p).total_cmp(&away(q)))
        .expect("three pairs");
    let (ra, _) = reduce(&[ta[j], ta[k], ta[l]], tol.geom)?;
    let (rb, _) = reduce(&[tb[j], tb[k], tb[l]], tol.geom)?;
    Ok(Some(ra.dist(&rb)))
}

fn match_tol(tol: &Tolerances, lines: &[LineMatrix]) -> f64 {
    let scale = lines.iter().map(|l| l.mat().norm_max()).fold(1.0, f64::max);
    tol.geom.sqrt() * scale
}

/// Whether the two hexagons of `face` are isometric.
pub fn faces_coherent(
    t: &Triangulation,
    r: &HextetRealization,
    face: usize,
    tol: &Tolerances,
) -> Result<bool> {
    if face >= t.num_faces() {
        return Err(Error::OutOfRange {
            index: face,
            len: t.num_faces(),
        });
    }
    let (ta, tb) = face_triples(t, &r.tets, face);
    let same_gram = GramMatrix::of_lines(&ta).dist(&GramMatrix::of_lines(&tb)) < match_tol(tol, &ta);
    if !same_gram {
        return Ok(false);
    }
    Ok(match hexagon_mismatch(&ta, &tb, tol)? {
        None => true,
        Some(d) => d < match_tol(tol, &ta),
    })
}

/// Diagnostics from [`find_coherent`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Branch assignments tried, counting the initial one.
    pub branches_explored: usize,
    /// Faces at which both branches of the neighbour fit.
    pub ambiguous_faces: usize,
}

/// The two candidate realizations of each tetrahedron: a reduced hextet
/// and its image under the involution.
fn candidates(t: &Triangulation, p: &OrthParams, tol: &Tolerances) -> Result<Vec<[[LineMatrix; 4]; 2]>> {
    (0..t.n())
        .map(|k| {
            let x = t.hextet_matrix(k, p)?;
            let cfg: LineConfig = realize(&x, tol.rank)?;
            let lines: [LineMatrix; 4] = cfg
                .into_lines()
                .try_into()
                .expect("hextet realizes four lines");
            let (red, _) = reduce(&lines, tol.geom)?;
            Ok([red.lines, involution(&red).lines])
        })
        .collect()
}

struct Search<'a> {
    t: &'a Triangulation,
    cands: Vec<[[LineMatrix; 4]; 2]>,
    tol: Tolerances,
    /// `(face, branch of a, branch of b)` -> fits.
    memo: HashMap<(usize, u8, u8), bool>,
    stats: SearchStats,
}

impl Search<'_> {
    fn fits(&mut self, face: usize, ba: u8, bb: u8) -> Result<bool> {
        if let Some(&v) = self.memo.get(&(face, ba, bb)) {
            return Ok(v);
        }
        let g = self.t.gluing(face);
        let ta = g.a.verts.map(|v| self.cands[g.a.tet][ba as usize][v]);
        let tb = g.b.verts.map(|v| self.cands[g.b.tet][bb as usize][v]);
        let thr = match_tol(&self.tol, &ta);
        let v = match hexagon_mismatch(&ta, &tb, &self.tol)? {
            None => true,
            Some(d) => d < thr,
        };
        self.memo.insert((face, ba, bb), v);
        Ok(v)
    }

    /// Completes `assign` by forced moves, branching where both choices fit.
    fn run(&mut self, mut assign: Vec<Option<u8>>) -> Result<Option<Vec<u8>>> {
        let n = self.t.n();
        loop {
            let mut queue: VecDeque<usize> = (0..n).filter(|&k| assign[k].is_some()).collect();
            let mut branch_at = None;
            while let Some(u) = queue.pop_front() {
                let bu = assign[u].expect("queued tetrahedra are assigned");
                for f in 0..4 {
                    let link = *self.t.link(u, f);
                    let is_a = {
                        let g = self.t.gluing(link.gluing);
                        g.a.tet == u && g.a.face == f
                    };
                    let v = link.tet;
                    let fit = |s: &mut Self, bv: u8| {
                        if is_a {
                            s.fits(link.gluing, bu, bv)
                        } else {
                            s.fits(link.gluing, bv, bu)
                        }
                    };
                    match assign[v] {
                        Some(bv) => {
                            if !fit(self, bv)? {
                                return Ok(None);
                            }
                        }
                        None => {
                            let ok: Vec<u8> = [0u8, 1]
                                .into_iter()
                                .filter_map(|b| match fit(self, b) {
                                    Ok(true) => Some(Ok(b)),
                                    Ok(false) => None,
                                    Err(e) => Some(Err(e)),
                                })
                                .collect::<Result<_>>()?;
                            match ok.as_slice() {
                                [] => return Ok(None),
                                [b] => {
                                    assign[v] = Some(*b);
                                    queue.push_back(v);
                                }
                                _ => {
                                    if branch_at.is_none() {
                                        branch_at = Some(v);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            let target = match branch_at {
                Some(v) if assign[v].is_none() => v,
                _ => match assign.iter().position(Option::is_none) {
                    // Disconnected from everything assigned so far.
                    Some(v) => v,
                    None => return Ok(Some(assign.into_iter().map(Option::unwrap).collect())),
                },
            };
            if branch_at.is_some() {
                self.stats.ambiguous_faces += 1;
            }
            let mut first = assign.clone();
            first[target] = Some(0);
            if let Some(done) = self.run(first)? {
                return Ok(Some(done));
            }
            self.stats.branches_explored += 1;
            assign[target] = Some(1);
        }
    }
}

/// A coherent realization of `p`, searched over the involution branches.
pub fn find_coherent(t: &Triangulation, p: &OrthParams, tol: &Tolerances) -> Result<HextetRealization> {
    find_coherent_with_stats(t, p, tol).map(|(r, _)| r)
}

pub fn find_coherent_with_stats(
    t: &Triangulation,
    p: &OrthParams,
    tol: &Tolerances,
) -> Result<(HextetRealization, SearchStats)> {
    let residuals = t.hextet_residuals(p)?;
    let worst = residuals.iter().map(|d| d.norm()).fold(0.0, f64::max);
    if worst >= tol.geom {
        return Err(Error::NotInPK(worst));
    }
    if let Some(k) = t_coordinate(p, tol.geom) {
        return Err(Error::InTExcluded(k));
    }
    let mut search = Search {
        t,
        cands: candidates(t, p, tol)?,
        tol: *tol,
        memo: HashMap::new(),
        stats: SearchStats {
            branches_explored: 1,
            ambiguous_faces: 0,
        },
    };
    let mut start = vec![None; t.n()];
    start[0] = Some(0);
    let assign = search.run(start)?.ok_or(Error::NotCoherent)?;
    let r = HextetRealization {
        tets: assign
            .iter()
            .enumerate()
            .map(|(k, &b)| search.cands[k][b as usize])
            .collect(),
    };
    for f in 0..t.num_faces() {
        if !faces_coherent(t, &r, f, tol)? {
            return Err(Error::IncoherentFace(f));
        }
    }
    Ok((r, search.stats))
}

/// Replaces the lines of one tetrahedron by their other branch.
pub fn flip_branch(r: &HextetRealization, tet: usize, tol: f64) -> Result<HextetRealization> {
    let (red, g) = reduce(&r.tets[tet], tol)?;
    let back = g.inv();
    let mut out = r.clone();
    out.tets[tet] = involution(&red).lines.map(|l| conj_by(&back, &l));
    Ok(out)
}
