//! Floating-point check of the great rhombicosidodecahedron as a
//! U-polyhedron for six icosahedral symmetry axes.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

type V3 = [f64; 3];

const PHI: f64 = 1.618_033_988_749_895;

fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &V3) -> f64 {
    dot(a, a).sqrt()
}

fn unit(a: V3) -> V3 {
    let r = norm(&a);
    [a[0] / r, a[1] / r, a[2] / r]
}

fn det3(a: &V3, b: &V3, c: &V3) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn cyclic(t: V3) -> [V3; 3] {
    [t, [t[1], t[2], t[0]], [t[2], t[0], t[1]]]
}

fn all_signs(t: V3) -> Vec<V3> {
    let mut out = Vec::new();
    for s in 0..8u8 {
        let f = |k: u8, x: f64| if s >> k & 1 == 1 { -x } else { x };
        let v = [f(0, t[0]), f(1, t[1]), f(2, t[2])];
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Even permutations and all sign changes of five golden-ratio triples,
/// scaled onto the unit sphere.
pub fn great_rhombicosidodecahedron() -> Vec<V3> {
    let ip = 1.0 / PHI;
    let base = [
        [ip, ip, 3.0 + PHI],
        [2.0 * ip, PHI, 1.0 + 2.0 * PHI],
        [ip, PHI * PHI, -1.0 + 3.0 * PHI],
        [2.0 * PHI - 1.0, 2.0, 2.0 + PHI],
        [PHI, 3.0, 2.0 * PHI],
    ];
    let mut out: Vec<V3> = Vec::new();
    for t in base {
        for p in cyclic(t) {
            for v in all_signs(p) {
                let v = unit(v);
                if !out.iter().any(|w| dist(w, &v) < 1e-12) {
                    out.push(v);
                }
            }
        }
    }
    out
}

fn dist(a: &V3, b: &V3) -> f64 {
    norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

/// Axes up to sign, one representative each. The vertex coordinates above
/// use the icosahedron with vertices at the cyclic permutations of `(0, ±φ, ±1)`.
fn axes_from(points: Vec<V3>) -> Vec<V3> {
    let mut out: Vec<V3> = Vec::new();
    for p in points {
        let p = unit(p);
        let neg = [-p[0], -p[1], -p[2]];
        if !out.iter().any(|q| dist(q, &p) < 1e-12 || dist(q, &neg) < 1e-12) {
            out.push(p);
        }
    }
    out
}

fn five_fold_axes() -> Vec<V3> {
    axes_from(
        cyclic([0.0, PHI, 1.0])
            .into_iter()
            .flat_map(all_signs)
            .collect(),
    )
}

fn three_fold_axes() -> Vec<V3> {
    let mut pts = all_signs([1.0, 1.0, 1.0]);
    pts.extend(cyclic([0.0, PHI, 1.0 / PHI]).into_iter().flat_map(all_signs));
    axes_from(pts)
}

fn two_fold_axes() -> Vec<V3> {
    let mut pts = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    pts.extend(cyclic([1.0, PHI, 1.0 / PHI]).into_iter().flat_map(all_signs));
    axes_from(pts)
}

/// Lines parallel to `u` through the vertices, each sorted along `u`.
fn lines(verts: &[V3], u: &V3, tol: f64) -> Vec<Vec<usize>> {
    let proj: Vec<V3> = verts
        .iter()
        .map(|v| {
            let s = dot(v, u);
            [v[0] - s * u[0], v[1] - s * u[1], v[2] - s * u[2]]
        })
        .collect();
    let mut assigned = vec![false; verts.len()];
    let mut out = Vec::new();
    for i in 0..verts.len() {
        if assigned[i] {
            continue;
        }
        let mut line: Vec<usize> = (i..verts.len())
            .filter(|&j| !assigned[j] && dist(&proj[i], &proj[j]) < tol)
            .collect();
        for &j in &line {
            assigned[j] = true;
        }
        line.sort_by(|&a, &b| dot(&verts[a], u).total_cmp(&dot(&verts[b], u)));
        out.push(line);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineFailure {
    pub direction: usize,
    pub vertex: V3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub family: String,
    pub directions: Vec<V3>,
    pub general_position: bool,
    pub u_polyhedron: bool,
    /// First vertex whose line meets no other vertex.
    pub failure: Option<LineFailure>,
    pub coloured: bool,
    pub xrays_equal: bool,
    pub white: usize,
    pub grey: usize,
}

impl CandidateReport {
    pub fn passed(&self) -> bool {
        self.general_position && self.u_polyhedron && self.coloured && self.xrays_equal
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Demo3dReport {
    pub vertex_count: usize,
    pub tolerance: f64,
    pub identified: bool,
    pub status: String,
    pub family: Option<String>,
    pub directions: Option<Vec<V3>>,
    pub candidates: Vec<CandidateReport>,
}

fn general_position(dirs: &[V3], tol: f64) -> bool {
    let k = dirs.len();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                if det3(&dirs[a], &dirs[b], &dirs[c]).abs() <= tol {
                    return false;
                }
            }
        }
    }
    true
}

fn u_failure(verts: &[V3], dirs: &[V3], tol: f64) -> Option<LineFailure> {
    for (d, u) in dirs.iter().enumerate() {
        if let Some(l) = lines(verts, u, tol).into_iter().find(|l| l.len() < 2) {
            return Some(LineFailure {
                direction: d,
                vertex: verts[l[0]],
            });
        }
    }
    None
}

/// Pair consecutive vertices on every line and two-colour the resulting
/// graph. `None` if some line is odd or the graph is not bipartite.
fn colouring(verts: &[V3], dirs: &[V3], tol: f64) -> Option<Vec<bool>> {
    let mut adj = vec![Vec::new(); verts.len()];
    for u in dirs {
        for l in lines(verts, u, tol) {
            if l.len() % 2 != 0 {
                return None;
            }
            for p in l.chunks(2) {
                adj[p[0]].push(p[1]);
                adj[p[1]].push(p[0]);
            }
        }
    }
    let mut colour: Vec<Option<bool>> = vec![None; verts.len()];
    for s in 0..verts.len() {
        if colour[s].is_some() {
            continue;
        }
        colour[s] = Some(true);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            let c = colour[x]?;
            for &y in &adj[x] {
                match colour[y] {
                    None => {
                        colour[y] = Some(!c);
                        queue.push_back(y);
                    }
                    Some(cy) if cy == c => return None,
                    Some(_) => {}
                }
            }
        }
    }
    colour.into_iter().collect()
}

fn xrays_balanced(verts: &[V3], dirs: &[V3], colour: &[bool], tol: f64) -> bool {
    dirs.iter().all(|u| {
        lines(verts, u, tol).iter().all(|l| {
            let w = l.iter().filter(|&&i| colour[i]).count();
            2 * w == l.len()
        })
    })
}

fn evaluate(verts: &[V3], family: &str, dirs: Vec<V3>, tol: f64) -> CandidateReport {
    let general_position = general_position(&dirs, tol);
    let failure = u_failure(verts, &dirs, tol);
    let colour = if failure.is_none() {
        colouring(verts, &dirs, tol)
    } else {
        None
    };
    let xrays_equal = colour
        .as_ref()
        .is_some_and(|c| xrays_balanced(verts, &dirs, c, tol));
    let white = colour.as_ref().map_or(0, |c| c.iter().filter(|&&x| x).count());
    CandidateReport {
        family: family.to_string(),
        general_position,
        u_polyhedron: failure.is_none(),
        failure,
        coloured: colour.is_some(),
        xrays_equal,
        white,
        grey: colour.as_ref().map_or(0, |c| c.len() - white),
        directions: dirs,
    }
}

/// First six-subset (lexicographic) of `axes` with no three coplanar.
fn first_general_six(axes: &[V3], tol: f64) -> Option<Vec<V3>> {
    fn go(axes: &[V3], start: usize, cur: &mut Vec<V3>, tol: f64) -> bool {
        if cur.len() == 6 {
            return true;
        }
        for i in start..axes.len() {
            let ok = (0..cur.len()).all(|a| {
                (a + 1..cur.len()).all(|b| det3(&cur[a], &cur[b], &axes[i]).abs() > tol)
            });
            if ok {
                cur.push(axes[i]);
                if go(axes, i + 1, cur, tol) {
                    return true;
                }
                cur.pop();
            }
        }
        false
    }
    let mut cur = Vec::new();
    go(axes, 0, &mut cur, tol).then_some(cur)
}

/// Try the six 5-fold axes, then six 3-fold axes, then six 2-fold axes.
/// Within a family, axes that individually pass the line test are
/// preferred. Stops at the first candidate that passes every check.
pub fn demo_3d_upolyhedron(tolerance: f64) -> Demo3dReport {
    let verts = great_rhombicosidodecahedron();
    let mut candidates = Vec::new();
    let families = [
        ("5-fold", five_fold_axes()),
        ("3-fold", three_fold_axes()),
        ("2-fold", two_fold_axes()),
    ];
    for (name, axes) in families {
        let passing: Vec<V3> = axes
            .iter()
            .filter(|u| u_failure(&verts, &[**u], tolerance).is_none())
            .copied()
            .collect();
        let dirs = first_general_six(&passing, tolerance)
            .or_else(|| first_general_six(&axes, tolerance))
            .unwrap_or_else(|| axes.iter().take(6).copied().collect());
        let report = evaluate(&verts, name, dirs, tolerance);
        let done = report.passed();
        candidates.push(report);
        if done {
            break;
        }
    }
    let winner = candidates.iter().find(|c| c.passed());
    Demo3dReport {
        vertex_count: verts.len(),
        tolerance,
        identified: winner.is_some(),
        status: if winner.is_some() {
            "verified".into()
        } else {
            "direction set not identified".into()
        },
        family: winner.map(|c| c.family.clone()),
        directions: winner.map(|c| c.directions.clone()),
        candidates,
    }
}
