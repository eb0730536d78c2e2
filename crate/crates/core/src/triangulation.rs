//! Ideal triangulations, their JSON format and the hextet equations.

use std::collections::BTreeSet;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::GramMatrix;
use crate::mat2::C;

/// Tetrahedron edges in storage order.
pub const TET_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Position of edge `{i, j}` in [`TET_EDGES`].
pub fn edge_index(i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    match (i, j) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("no edge between vertices {i} and {j}"),
    }
}

/// The three vertices of face `f` (the face opposite vertex `f`), ascending.
pub fn face_vertices(f: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut k = 0;
    for v in 0..4 {
        if v != f {
            out[k] = v;
            k += 1;
        }
    }
    out
}

/// One side of a face gluing. `verts[k]` is matched with the other side's `verts[k]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceRef {
    pub tet: usize,
    pub face: usize,
    pub verts: [usize; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gluing {
    pub a: FaceRef,
    pub b: FaceRef,
}

/// The on-disk form of a triangulation, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangulationFile {
    /// Cusp label of each ideal vertex.
    pub tets: Vec<[usize; 4]>,
    pub gluings: Vec<Gluing>,
    /// Edge class of each tetrahedron edge, in [`TET_EDGES`] order.
    pub edge_classes: Vec<[usize; 6]>,
}

/// Where a face of a tetrahedron is glued.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceLink {
    /// Index of the gluing (face class).
    pub gluing: usize,
    pub tet: usize,
    pub face: usize,
    /// `perm[v]` is the vertex of the neighbour matched with local vertex `v`.
    pub perm: [usize; 4],
}

/// A validated ideal triangulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TriangulationFile", into = "TriangulationFile")]
pub struct Triangulation {
    file: TriangulationFile,
    links: Vec<[FaceLink; 4]>,
    warnings: Vec<String>,
}

/// Ortholength parameters, one complex number per edge class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrthParams {
    pub p: Vec<C>,
}

impl OrthParams {
    pub fn new(p: Vec<C>) -> Self {
        OrthParams { p }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn max_dist(&self, other: &[C]) -> f64 {
        if other.len() != self.p.len() {
            return f64::INFINITY;
        }
        self.p
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl From<Vec<C>> for OrthParams {
    fn from(p: Vec<C>) -> Self {
        OrthParams { p }
    }
}

struct UnionFind {
    parent: Vec<usize>,
    /// Parity relative to the parent, used for oriented identifications.
    flip: Vec<bool>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            flip: vec![false; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        let p = self.parent[x];
        if p == x {
            return (x, false);
        }
        let (r, f) = self.find(p);
        self.parent[x] = r;
        self.flip[x] ^= f;
        (r, self.flip[x])
    }

    /// Joins `x` and `y` with relative parity `f`; false on a parity clash.
    fn union(&mut self, x: usize, y: usize, f: bool) -> bool {
        let (rx, fx) = self.find(x);
        let (ry, fy) = self.find(y);
        if rx == ry {
            return fx ^ fy == f;
        }
        self.parent[rx] = ry;
        self.flip[rx] = fx ^ fy ^ f;
        true
    }
}

fn is_odd(perm: &[usize; 4]) -> bool {
    let mut inv = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

fn check_face_ref(f: &FaceRef, ntets: usize, which: &str, g: usize) -> Option<Error> {
    if f.tet >= ntets {
        return Some(Error::InvalidGluing(format!(
            "gluing {g} side {which}: tetrahedron {} does not exist",
            f.tet
        )));
    }
    if f.face > 3 {
        return Some(Error::InvalidGluing(format!(
            "gluing {g} side {which}: face {} is not in 0..4",
            f.face
        )));
    }
    let set: BTreeSet<usize> = f.verts.iter().copied().collect();
    if set.len() != 3 || set.contains(&f.face) || f.verts.iter().any(|&v| v > 3) {
        return Some(Error::InvalidGluing(format!(
            "gluing {g} side {which}: vertices {:?} are not the corners of face {}",
            f.verts, f.face
        )));
    }
    None
}

fn full_perm(a: &FaceRef, b: &FaceRef) -> [usize; 4] {
    let mut perm = [0; 4];
    perm[a.face] = b.face;
    for k in 0..3 {
        perm[a.verts[k]] = b.verts[k];
    }
    perm
}

fn invert(perm: &[usize; 4]) -> [usize; 4] {
    let mut inv = [0; 4];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Every violation found in `file`; empty when the triangulation is usable.
pub fn validate(file: &TriangulationFile) -> Vec<Error> {
    let mut errs = Vec::new();
    let n = file.tets.len();
    if n == 0 {
        errs.push(Error::InvalidTriangulation("no tetrahedra".into()));
        return errs;
    }
    if file.edge_classes.len() != n {
        errs.push(Error::InvalidTriangulation(format!(
            "{} tetrahedra but {} rows of edge classes",
            n,
            file.edge_classes.len()
        )));
        return errs;
    }

    let mut seen = vec![[usize::MAX; 4]; n];
    let mut structural = false;
    for (gi, g) in file.gluings.iter().enumerate() {
        let mut bad = false;
        for (which, f) in [("a", &g.a), ("b", &g.b)] {
            if let Some(e) = check_face_ref(f, n, which, gi) {
                errs.push(e);
                bad = true;
            }
        }
        if bad {
            structural = true;
            continue;
        }
        if g.a.tet == g.b.tet && g.a.face == g.b.face {
            errs.push(Error::InvalidGluing(format!(
                "gluing {gi} glues face {} of tetrahedron {} to itself",
                g.a.face, g.a.tet
            )));
            structural = true;
            continue;
        }
        for f in [&g.a, &g.b] {
            let slot = &mut seen[f.tet][f.face];
            if *slot != usize::MAX {
                errs.push(Error::InvalidGluing(format!(
                    "face {} of tetrahedron {} is glued by both gluing {} and gluing {gi}",
                    f.face, f.tet, *slot
                )));
                structural = true;
            }
            *slot = gi;
        }
        if !is_odd(&full_perm(&g.a, &g.b)) {
            errs.push(Error::InvalidGluing(format!(
                "gluing {gi} preserves orientation; oriented tetrahedra must be glued by odd permutations"
            )));
        }
    }
    for (t, faces) in seen.iter().enumerate() {
        for (f, &s) in faces.iter().enumerate() {
            if s == usize::MAX {
                errs.push(Error::InvalidGluing(format!(
                    "face {f} of tetrahedron {t} is not glued"
                )));
                structural = true;
            }
        }
    }
    if structural {
        return errs;
    }

    // Edge classes: identified edges share a label, distinct classes distinct labels.
    let mut uf = UnionFind::new(6 * n);
    let mut vf = UnionFind::new(4 * n);
    for (gi, g) in file.gluings.iter().enumerate() {
        let perm = full_perm(&g.a, &g.b);
        for &v in &g.a.verts {
            vf.union(4 * g.a.tet + v, 4 * g.b.tet + perm[v], false);
        }
        let fv = face_vertices(g.a.face);
        for x in 0..3 {
            for y in x + 1..3 {
                let (i, j) = (fv[x], fv[y]);
                let (pi, pj) = (perm[i], perm[j]);
                let ea = 6 * g.a.tet + edge_index(i, j);
                let eb = 6 * g.b.tet + edge_index(pi, pj);
                if !uf.union(ea, eb, pi > pj) {
                    errs.push(Error::InvalidGluing(format!(
                        "gluing {gi} identifies an edge with itself reversed"
                    )));
                }
            }
        }
    }
    let mut label_of_root = std::collections::BTreeMap::new();
    for t in 0..n {
        for e in 0..6 {
            let (r, _) = uf.find(6 * t + e);
            let label = file.edge_classes[t][e];
            match label_of_root.insert(r, label) {
                Some(prev) if prev != label => errs.push(Error::EdgeClassMismatch(format!(
                    "edge {:?} of tetrahedron {t} is labelled {label} but is identified with an edge labelled {prev}",
                    TET_EDGES[e]
                ))),
                _ => {}
            }
        }
    }
    let roots = label_of_root.len();
    let labels: BTreeSet<usize> = label_of_root.values().copied().collect();
    if labels.len() != roots {
        errs.push(Error::EdgeClassMismatch(format!(
            "{roots} edges after gluing but only {} distinct labels",
            labels.len()
        )));
    }
    if roots != n {
        errs.push(Error::InvalidTriangulation(format!(
            "{roots} edge classes for {n} tetrahedra; an ideal triangulation has as many of each"
        )));
    }
    if labels.iter().copied().ne(0..labels.len()) {
        errs.push(Error::EdgeClassMismatch(format!(
            "edge class labels must be 0..{}, got {:?}",
            labels.len(),
            labels
        )));
    }

    let mut cusp_of_root = std::collections::BTreeMap::new();
    for t in 0..n {
        for v in 0..4 {
            let (r, _) = vf.find(4 * t + v);
            let label = file.tets[t][v];
            if let Some(prev) = cusp_of_root.insert(r, label) {
                if prev != label {
                    errs.push(Error::InvalidTriangulation(format!(
                        "vertex {v} of tetrahedron {t} has cusp label {label} but is identified with cusp {prev}"
                    )));
                }
            }
        }
    }
    errs
}

impl TryFrom<TriangulationFile> for Triangulation {
    type Error = Error;

    fn try_from(file: TriangulationFile) -> Result<Self> {
        Triangulation::new(file)
    }
}

impl From<Triangulation> for TriangulationFile {
    fn from(t: Triangulation) -> Self {
        t.file
    }
}

const FIG8: &str = include_str!("../assets/fig8.json");

impl Triangulation {
    /// Validates `file`, failing with its first violation.
    pub fn new(file: TriangulationFile) -> Result<Self> {
        if let Some(e) = validate(&file).into_iter().next() {
            return Err(e);
        }
        let n = file.tets.len();
        let dummy = FaceLink {
            gluing: 0,
            tet: 0,
            face: 0,
            perm: [0; 4],
        };
        let mut links = vec![[dummy; 4]; n];
        for (gi, g) in file.gluings.iter().enumerate() {
            let perm = full_perm(&g.a, &g.b);
            links[g.a.tet][g.a.face] = FaceLink {
                gluing: gi,
                tet: g.b.tet,
                face: g.b.face,
                perm,
            };
            links[g.b.tet][g.b.face] = FaceLink {
                gluing: gi,
                tet: g.a.tet,
                face: g.a.face,
                perm: invert(&perm),
            };
        }
        let mut warnings = Vec::new();
        let mut valence = vec![0usize; n];
        for row in &file.edge_classes {
            for &e in row {
                valence[e] += 1;
            }
        }
        for (e, &v) in valence.iter().enumerate() {
            if v == 1 {
                warnings.push(format!(
                    "edge class {e} has valence 1 and may be homotopically trivial"
                ));
            }
        }
        let cusps: BTreeSet<usize> = file.tets.iter().flatten().copied().collect();
        if cusps.len() != 1 {
            warnings.push(format!("triangulation has {} cusps", cusps.len()));
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(Triangulation {
            file,
            links,
            warnings,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: TriangulationFile = serde_json::from_str(s)?;
        Triangulation::new(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Triangulation::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.file).expect("triangulation serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// The built-in figure-8 knot complement.
    pub fn fig8() -> Self {
        Triangulation::from_json(FIG8).expect("built-in figure-8 triangulation is valid")
    }

    pub fn file(&self) -> &TriangulationFile {
        &self.file
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Number of tetrahedra, which is also the number of edge classes.
    pub fn n(&self) -> usize {
        self.file.tets.len()
    }

    pub fn num_faces(&self) -> usize {
        self.file.gluings.len()
    }

    pub fn gluing(&self, face: usize) -> &Gluing {
        &self.file.gluings[face]
    }

    pub fn link(&self, tet: usize, face: usize) -> &FaceLink {
        &self.links[tet][face]
    }

    pub fn edge_class(&self, tet: usize, i: usize, j: usize) -> usize {
        self.file.edge_classes[tet][edge_index(i, j)]
    }

    /// Renumbers the vertices of one tetrahedron so that old vertex `v`
    /// becomes `perm[v]`. Only even permutations keep the gluings valid.
    pub fn renumbered(&self, tet: usize, perm: [usize; 4]) -> Result<Self> {
        if tet >= self.n() {
            return Err(Error::OutOfRange {
                index: tet,
                len: self.n(),
            });
        }
        let mut file = self.file.clone();
        let old = self.file.tets[tet];
        for v in 0..4 {
            file.tets[tet][perm[v]] = old[v];
        }
        for (i, j) in TET_EDGES {
            file.edge_classes[tet][edge_index(perm[i], perm[j])] =
                self.file.edge_classes[tet][edge_index(i, j)];
        }
        for g in &mut file.gluings {
            for f in [&mut g.a, &mut g.b] {
                if f.tet == tet {
                    f.face = perm[f.face];
                    f.verts = f.verts.map(|v| perm[v]);
                }
            }
        }
        Triangulation::new(file)
    }

    fn check_params(&self, p: &OrthParams) -> Result<()> {
        if p.len() != self.n() {
            return Err(Error::ParamCount {
                expected: self.n(),
                got: p.len(),
            });
        }
        Ok(())
    }

    /// The 4x4 matrix whose `(i, j)` entry is the parameter of edge `ij`.
    pub fn hextet_matrix(&self, tet: usize, p: &OrthParams) -> Result<GramMatrix> {
        self.check_params(p)?;
        if tet >= self.n() {
            return Err(Error::OutOfRange {
                index: tet,
                len: self.n(),
            });
        }
        let x = DMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                C::new(1.0, 0.0)
            } else {
                p.p[self.edge_class(tet, i, j)]
            }
        });
        GramMatrix::new(x, 0.0)
    }

    /// Hextet determinant of every tetrahedron.
    pub fn hextet_residuals(&self, p: &OrthParams) -> Result<Vec<C>> {
        (0..self.n())
            .map(|t| Ok(self.hextet_matrix(t, p)?.det()))
            .collect()
    }

    pub fn in_pk(&self, p: &OrthParams, tol: f64) -> Result<bool> {
        Ok(self
            .hextet_residuals(p)?
            .iter()
            .all(|d| d.norm() < tol))
    }

    /// Edge classes of the three edges of a face, as seen from side `a`,
    /// ordered `(v0 v1, v0 v2, v1 v2)` for the face's vertices `v0 < v1 < v2`.
    pub fn face_edge_classes(&self, face: usize) -> [usize; 3] {
        let g = &self.file.gluings[face];
        let [v0, v1, v2] = face_vertices(g.a.face);
        [
            self.edge_class(g.a.tet, v0, v1),
            self.edge_class(g.a.tet, v0, v2),
            self.edge_class(g.a.tet, v1, v2),
        ]
    }

    /// Determinant of the 3x3 Gram matrix of a face's corner lines.
    pub fn hexagon_residual(&self, face: usize, p: &OrthParams) -> Result<C> {
        self.check_params(p)?;
        if face >= self.num_faces() {
            return Err(Error::OutOfRange {
                index: face,
                len: self.num_faces(),
            });
        }
        let [a, b, c] = self.face_edge_classes(face).map(|e| p.p[e]);
        // det [[1, a, b], [a, 1, c], [b, c, 1]]
        Ok(C::new(1.0, 0.0) + a * b * c * 2.0 - a * a - b * b - c * c)
    }

    /// Faces whose hexagon is degenerate at `p`.
    pub fn degenerate_faces(&self, p: &OrthParams, tol: f64) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for f in 0..self.num_faces() {
            if self.hexagon_residual(f, p)?.norm() < tol {
                out.push(f);
            }
        }
        Ok(out)
    }

    /// At least two degenerate face hexagons.
    pub fn in_s(&self, p: &OrthParams, tol: f64) -> Result<bool> {
        Ok(self.degenerate_faces(p, tol)?.len() >= 2)
    }
}

/// Some coordinate within `tol` of `+1` or `-1`.
pub fn in_t(p: &OrthParams, tol: f64) -> bool {
    t_coordinate(p, tol).is_some()
}

/// First coordinate within `tol` of `+1` or `-1`.
pub fn t_coordinate(p: &OrthParams, tol: f64) -> Option<usize> {
    p.p
        .iter()
        .position(|z| (z - 1.0).norm() < tol || (z + 1.0).norm() < tol)
}
