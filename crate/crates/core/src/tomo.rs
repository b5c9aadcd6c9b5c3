//! Discrete parallel X-rays, U-polygon checks and a brute-force uniqueness
//! oracle over the convex subsets of a small patch.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::CycNum;
use crate::geometry::{
    convex_hull, is_convex_subset, line_key, orientation, Direction, ElementJson,
    PointSet, PointSetJson,
};

/// Largest patch the oracle accepts.
pub const PATCH_GUARD: usize = 40;

/// Line counts of a set in one direction, keyed by [`line_key`], in
/// increasing key order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XRayTable {
    pub direction: Direction,
    pub rows: Vec<(CycNum, u32)>,
}

impl XRayTable {
    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| u64::from(r.1)).sum()
    }
}

pub fn xray(f: &PointSet, d: &Direction) -> XRayTable {
    let mut counts: HashMap<CycNum, u32> = HashMap::new();
    for p in &f.points {
        *counts.entry(line_key(p, d)).or_default() += 1;
    }
    let mut rows: Vec<(CycNum, u32)> = counts.into_iter().collect();
    rows.sort_by(|a, b| (&a.0 - &b.0).real_sign());
    XRayTable {
        direction: d.clone(),
        rows,
    }
}

pub fn xrays_equal(f: &PointSet, g: &PointSet, dirs: &[Direction]) -> bool {
    dirs.iter().all(|d| xray(f, d).rows == xray(g, d).rows)
}

/// Every line through a vertex in each direction meets another vertex.
/// The vertices must be the vertices of a nondegenerate convex polygon.
pub fn verify_u_polygon(vertices: &PointSet, dirs: &[Direction]) -> Result<bool> {
    if vertices.len() < 3 || convex_hull(vertices).len() != vertices.len() {
        return Err(Error::DegeneratePolygon);
    }
    for d in dirs {
        let keys: Vec<CycNum> = vertices.points.iter().map(|p| line_key(p, d)).collect();
        for (i, k) in keys.iter().enumerate() {
            if !keys.iter().enumerate().any(|(j, l)| j != i && l == k) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone)]
pub struct CollisionReport {
    pub found: bool,
    pub pair: Option<(PointSet, PointSet)>,
    pub directions: Vec<Direction>,
    pub subsets_examined: u64,
    pub exhaustive: bool,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionReportJson {
    pub found: bool,
    pub pair: Option<[PointSetJson; 2]>,
    pub directions: Vec<ElementJson>,
    pub subsets_examined: u64,
    pub exhaustive: bool,
    pub elapsed_s: f64,
}

impl CollisionReport {
    pub fn to_json(&self, tag: crate::FieldTag) -> CollisionReportJson {
        CollisionReportJson {
            found: self.found,
            pair: self.pair.as_ref().map(|(f, g)| [f.to_json(), g.to_json()]),
            directions: self
                .directions
                .iter()
                .map(|d| ElementJson::encode(tag, &d.w))
                .collect(),
            subsets_examined: self.subsets_examined,
            exhaustive: self.exhaustive,
            elapsed_s: self.elapsed.as_secs_f64(),
        }
    }
}

/// Precomputed combinatorics of a sorted patch.
struct Oracle {
    n: usize,
    orient: Vec<i8>,
    line_ids: Vec<Vec<u16>>,
    lines_per_dir: Vec<usize>,
}

impl Oracle {
    fn new(patch: &PointSet, dirs: &[Direction]) -> Self {
        let n = patch.len();
        let pts = &patch.points;
        let mut orient = vec![0i8; n * n * n];
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let o = match orientation(&pts[a], &pts[b], &pts[c]) {
                        Ordering::Greater => 1,
                        Ordering::Less => -1,
                        Ordering::Equal => 0,
                    };
                    // an odd permutation flips the sign
                    for (x, y, z, s) in [
                        (a, b, c, o),
                        (b, c, a, o),
                        (c, a, b, o),
                        (b, a, c, -o),
                        (a, c, b, -o),
                        (c, b, a, -o),
                    ] {
                        orient[(x * n + y) * n + z] = s;
                    }
                }
            }
        }
        let mut line_ids = Vec::with_capacity(dirs.len());
        let mut lines_per_dir = Vec::with_capacity(dirs.len());
        for d in dirs {
            let mut ids: HashMap<CycNum, u16> = HashMap::new();
            let row: Vec<u16> = pts
                .iter()
                .map(|p| {
                    let k = line_key(p, d);
                    let next = ids.len() as u16;
                    *ids.entry(k).or_insert(next)
                })
                .collect();
            lines_per_dir.push(ids.len());
            line_ids.push(row);
        }
        Oracle {
            n,
            orient,
            line_ids,
            lines_per_dir,
        }
    }

    fn o(&self, a: usize, b: usize, c: usize) -> i8 {
        self.orient[(a * self.n + b) * self.n + c]
    }

    /// Hull of increasing indices (the patch is sorted by `(Re, Im)`).
    fn hull(&self, s: &[usize]) -> Vec<usize> {
        super::geometry::hull_indices(s.len(), |a, b, c| self.o(s[a], s[b], s[c]).cmp(&0))
            .into_iter()
            .map(|i| s[i])
            .collect()
    }

    /// `p` in the closed hull; `hull` as returned by [`Oracle::hull`].
    fn inside(&self, hull: &[usize], p: usize) -> bool {
        match hull.len() {
            0 => false,
            1 => hull[0] == p,
            // sorted indices: on the segment iff collinear and between
            2 => self.o(hull[0], hull[1], p) == 0 && hull[0] <= p && p <= hull[1],
            k => (0..k).all(|i| self.o(hull[i], hull[(i + 1) % k], p) >= 0),
        }
    }

    fn fingerprint(&self, s: &[usize]) -> Vec<u8> {
        let total: usize = self.lines_per_dir.iter().sum();
        let mut fp = vec![0u8; total];
        let mut base = 0;
        for (d, ids) in self.line_ids.iter().enumerate() {
            for &p in s {
                fp[base + ids[p] as usize] += 1;
            }
            base += self.lines_per_dir[d];
        }
        fp
    }
}

struct Enumeration<'a> {
    oracle: &'a Oracle,
    max_size: usize,
    deadline: Instant,
    seen: HashMap<Vec<u8>, Vec<usize>>,
    examined: u64,
    timed_out: bool,
    collision: Option<(Vec<usize>, Vec<usize>)>,
}

impl Enumeration<'_> {
    /// Decide points `next..n`; `included` is convex relative to all decided
    /// points, `excluded` lists the decided points left out.
    fn dfs(&mut self, next: usize, included: &mut Vec<usize>, excluded: &mut Vec<usize>) {
        if self.collision.is_some() || self.timed_out {
            return;
        }
        if next == self.oracle.n {
            self.examined += 1;
            if self.examined.is_multiple_of(4096) && Instant::now() > self.deadline {
                self.timed_out = true;
                return;
            }
            let fp = self.oracle.fingerprint(included);
            if let Some(other) = self.seen.get(&fp) {
                self.collision = Some((other.clone(), included.clone()));
            } else {
                self.seen.insert(fp, included.clone());
            }
            return;
        }
        // include `next` if the enlarged hull swallows no excluded point
        if included.len() < self.max_size {
            included.push(next);
            let hull = self.oracle.hull(included);
            if !excluded.iter().any(|&q| self.oracle.inside(&hull, q)) {
                self.dfs(next + 1, included, excluded);
            }
            included.pop();
        }
        // exclude `next` unless it already lies in the hull
        let hull = self.oracle.hull(included);
        if !self.oracle.inside(&hull, next) {
            excluded.push(next);
            self.dfs(next + 1, included, excluded);
            excluded.pop();
        }
    }
}

/// Enumerate convex subsets `S = conv(S) ∩ patch` with `|S| ≤ max_size` and
/// report the first pair of distinct ones with equal X-rays in `dirs`.
///
/// Single-threaded so that "first" is well defined: points are decided in
/// `(Re, Im)` order, inclusion before exclusion. A collision is re-verified
/// exactly before it is reported.
pub fn uniqueness_oracle(
    patch: &PointSet,
    dirs: &[Direction],
    max_size: usize,
    budget: Duration,
) -> Result<CollisionReport> {
    if patch.len() > PATCH_GUARD {
        return Err(Error::PatchTooLarge {
            size: patch.len(),
            limit: PATCH_GUARD,
        });
    }
    let start = Instant::now();
    let patch = patch.sorted();
    let oracle = Oracle::new(&patch, dirs);
    let mut e = Enumeration {
        oracle: &oracle,
        max_size,
        deadline: start + budget,
        seen: HashMap::new(),
        examined: 0,
        timed_out: false,
        collision: None,
    };
    e.dfs(0, &mut Vec::new(), &mut Vec::new());

    let to_set = |ix: &[usize]| {
        PointSet::from_points(patch.tag, ix.iter().map(|&i| patch.points[i].clone()))
    };
    let pair = match &e.collision {
        Some((a, b)) => {
            let (f, g) = (to_set(a)?, to_set(b)?);
            let ok = f != g
                && is_convex_subset(&f, &patch)?
                && is_convex_subset(&g, &patch)?
                && xrays_equal(&f, &g, dirs);
            if !ok {
                return Err(Error::Invalid(
                    "fingerprint collision failed exact re-verification".into(),
                ));
            }
            Some((f, g))
        }
        None => None,
    };
    Ok(CollisionReport {
        found: pair.is_some(),
        pair,
        directions: dirs.to_vec(),
        subsets_examined: e.examined,
        exhaustive: !e.timed_out,
        elapsed: start.elapsed(),
    })
}
