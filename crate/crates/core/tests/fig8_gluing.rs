//! Independent enumeration of two-tetrahedron gluings, used to pin the
//! shipped figure-8 asset.

use orthocalc_core::mat2::c;
use orthocalc_core::triangulation::{
    face_vertices, FaceRef, Gluing, OrthParams, Triangulation, TriangulationFile, TET_EDGES,
};

const PATTERN: [usize; 6] = [0, 1, 1, 1, 0, 0];

fn perms() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut s = p;
                    s.sort();
                    if s == [0, 1, 2, 3] {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn odd(p: &[usize; 4]) -> bool {
    let mut inv = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            inv += (p[i] > p[j]) as usize;
        }
    }
    inv % 2 == 1
}

fn inverse(p: &[usize; 4]) -> [usize; 4] {
    let mut q = [0; 4];
    for i in 0..4 {
        q[p[i]] = i;
    }
    q
}

struct Uf(Vec<usize>);

impl Uf {
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

fn edge_slot(i: usize, j: usize) -> usize {
    TET_EDGES.iter().position(|&e| e == (i.min(j), i.max(j))).unwrap()
}

/// Tet-0 face f goes to tet-1 face p[f] by vertex map p.
struct Candidate {
    perms: [[usize; 4]; 4],
}

impl Candidate {
    fn edge_classes(&self) -> Option<[[usize; 6]; 2]> {
        let mut uf = Uf((0..12).collect());
        let mut vf = Uf((0..8).collect());
        for (f, p) in self.perms.iter().enumerate() {
            let fv = face_vertices(f);
            for &v in &fv {
                vf.union(v, 4 + p[v]);
            }
            for (x, y) in [(0, 1), (0, 2), (1, 2)] {
                let (i, j) = (fv[x], fv[y]);
                uf.union(edge_slot(i, j), 6 + edge_slot(p[i], p[j]));
            }
        }
        let vroot = vf.find(0);
        if (0..8).any(|v| vf.find(v) != vroot) {
            return None;
        }
        let zero = uf.find(0);
        let mut out = [[0; 6]; 2];
        let mut roots = std::collections::BTreeSet::new();
        for t in 0..2 {
            for e in 0..6 {
                let r = uf.find(6 * t + e);
                roots.insert(r);
                out[t][e] = (r != zero) as usize;
            }
        }
        (roots.len() == 2).then_some(out)
    }

    /// Crossing record: (other tet, other face, vertex map, gluing, sign).
    fn cross(&self, tet: usize, face: usize) -> (usize, usize, [usize; 4], usize, i64) {
        if tet == 0 {
            let p = self.perms[face];
            (1, p[face], p, face, 1)
        } else {
            let g = (0..4).find(|&f| self.perms[f][f] == face).unwrap();
            let q = inverse(&self.perms[g]);
            (0, g, q, g, -1)
        }
    }

    /// Edge relations in the abelianized dual-graph group, with gluing 0
    /// taken as the spanning tree.
    fn relations(&self) -> Vec<[i64; 3]> {
        let mut seen = std::collections::BTreeSet::new();
        let mut rows = Vec::new();
        for t in 0..2 {
            for &(i, j) in &TET_EDGES {
                if seen.contains(&(t, i, j)) {
                    continue;
                }
                let k = (0..4).find(|&v| v != i && v != j).unwrap();
                let start = (t, i, j, k);
                let mut cur = start;
                let mut row = [0i64; 4];
                loop {
                    let (tt, a, b, exit) = cur;
                    seen.insert((tt, a.min(b), a.max(b)));
                    let (t1, f1, p, g, s) = self.cross(tt, exit);
                    row[g] += s;
                    let (a1, b1) = (p[a], p[b]);
                    let next = (0..4).find(|&v| v != a1 && v != b1 && v != f1).unwrap();
                    cur = (t1, a1, b1, next);
                    let same_edge = t1 == t && (a1.min(b1), a1.max(b1)) == (i, j);
                    if same_edge && next == k {
                        break;
                    }
                }
                rows.push([row[1], row[2], row[3]]);
            }
        }
        rows
    }

    fn first_homology_is_z(&self) -> bool {
        let rows = self.relations();
        let mut g = 0i64;
        for r in 0..rows.len() {
            for s in r + 1..rows.len() {
                for (x, y) in [(0, 1), (0, 2), (1, 2)] {
                    let m = rows[r][x] * rows[s][y] - rows[r][y] * rows[s][x];
                    g = gcd(g, m.abs());
                }
            }
        }
        g == 1
    }

    fn file(&self, classes: [[usize; 6]; 2]) -> TriangulationFile {
        let gluings = (0..4)
            .map(|f| {
                let p = self.perms[f];
                let fv = face_vertices(f);
                Gluing {
                    a: FaceRef { tet: 0, face: f, verts: fv },
                    b: FaceRef { tet: 1, face: p[f], verts: fv.map(|v| p[v]) },
                }
            })
            .collect();
        TriangulationFile {
            tets: vec![[0; 4]; 2],
            gluings,
            edge_classes: classes.to_vec(),
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn enumerate() -> Vec<(Candidate, [[usize; 6]; 2], bool)> {
    let all = perms();
    let mut out = Vec::new();
    for fmap in &all {
        let choices: Vec<Vec<[usize; 4]>> = (0..4)
            .map(|f| all.iter().copied().filter(|p| p[f] == fmap[f] && odd(p)).collect())
            .collect();
        for a in &choices[0] {
            for b in &choices[1] {
                for c in &choices[2] {
                    for d in &choices[3] {
                        let cand = Candidate { perms: [*a, *b, *c, *d] };
                        if let Some(cl) = cand.edge_classes() {
                            if cl == [PATTERN, PATTERN] {
                                let z = cand.first_homology_is_z();
                                out.push((cand, cl, z));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn param_matrix(p0: f64, p1: f64) -> [[f64; 4]; 4] {
    [[1.0, p0, p1, p1], [p0, 1.0, p1, p0], [p1, p1, 1.0, p0], [p1, p0, p0, 1.0]]
}

#[test]
fn the_edge_pattern_admits_both_knot_and_sister_gluings() {
    let found = enumerate();
    let knots = found.iter().filter(|x| x.2).count();
    assert!(knots > 0);
    assert!(knots < found.len(), "expected some torsion solutions to be rejected");
}

#[test]
fn accepted_gluings_give_the_expected_hextet_matrices() {
    for (cand, cl, z) in enumerate() {
        if !z {
            continue;
        }
        let t = Triangulation::new(cand.file(cl)).expect("oracle solution validates");
        for (p0, p1) in [(0.3, -0.7), (-1.0 / 3.0, 5.0 / 3.0)] {
            let p = OrthParams::new(vec![c(p0, 0.0), c(p1, 0.0)]);
            let want = param_matrix(p0, p1);
            for tet in 0..2 {
                let m = t.hextet_matrix(tet, &p).unwrap();
                for i in 0..4 {
                    for j in 0..4 {
                        assert!((m.get(i, j) - c(want[i][j], 0.0)).norm() < 1e-15);
                    }
                }
            }
        }
    }
}

#[test]
fn shipped_asset_is_an_accepted_gluing() {
    let shipped = serde_json::to_value(Triangulation::fig8().file()).unwrap();
    let hit = enumerate()
        .into_iter()
        .filter(|x| serde_json::to_value(x.0.file(x.1)).unwrap() == shipped)
        .collect::<Vec<_>>();
    assert_eq!(hit.len(), 1);
    assert!(hit[0].2, "shipped gluing has torsion in first homology");
}
