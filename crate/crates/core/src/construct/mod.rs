//! The regular U-polygon built from a regular N-gon and N edge-attached
//! copies, its two-colouring, and homothetic embedding into a patch.

mod demo3d;

pub use demo3d::{demo_3d_upolyhedron, CandidateReport, Demo3dReport};

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{lcm, CycNum, FieldTag};
use crate::geometry::{convex_hull, in_hull, line_key, Direction, ElementJson, Point, PointSet};
use crate::tomo::{verify_u_polygon, xrays_equal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColouringStrategy {
    /// Even hull positions white, odd grey.
    Alternation,
    /// Two-colouring of the graph joining the two vertices on each line.
    Pairing,
}

#[derive(Debug, Clone)]
pub struct UPolygonInstance {
    pub tag: FieldTag,
    /// Counterclockwise hull vertices.
    pub hull: Vec<Point>,
    pub directions: Vec<Direction>,
    pub white: PointSet,
    pub grey: PointSet,
    pub strategy: ColouringStrategy,
    /// Lattice or patch points strictly inside the hull, after embedding.
    pub interior: Option<PointSet>,
    pub homothety: Option<Homothety>,
}

impl UPolygonInstance {
    pub fn vertices(&self) -> Result<PointSet> {
        PointSet::from_points(self.tag, self.hull.iter().cloned())
    }

    /// Hull vertices together with the interior points, if any.
    pub fn points(&self) -> Result<PointSet> {
        let v = self.vertices()?;
        match &self.interior {
            Some(i) => v.union(i),
            None => Ok(v),
        }
    }

    pub fn to_json(&self) -> Result<UPolygonJson> {
        let enc = |s: &PointSet| -> Vec<ElementJson> {
            s.points
                .iter()
                .map(|p| ElementJson::encode(self.tag, &p.z))
                .collect()
        };
        let vertices = self.vertices()?;
        let u_polygon = verify_u_polygon(&vertices, &self.directions)?;
        Ok(UPolygonJson {
            n: self.tag.n,
            big_n: self.tag.big_n,
            points: enc(&self.points()?),
            vertices: enc(&vertices),
            directions: self
                .directions
                .iter()
                .map(|d| ElementJson::encode(self.tag, &d.w))
                .collect(),
            white: enc(&self.white),
            grey: enc(&self.grey),
            interior: self.interior.as_ref().map(enc),
            colouring: self.strategy,
            homothety: self.homothety.as_ref().map(|h| HomothetyJson {
                lambda: h.lambda.clone(),
                t: h.t.clone(),
            }),
            u_polygon,
            xrays_equal: xrays_equal(&self.white, &self.grey, &self.directions),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomothetyJson {
    pub lambda: CycNum,
    pub t: CycNum,
}

/// Instance document. `points` and `directions` make it directly usable as
/// input for the uniqueness check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UPolygonJson {
    pub n: u32,
    #[serde(rename = "N")]
    pub big_n: u32,
    pub points: Vec<ElementJson>,
    pub vertices: Vec<ElementJson>,
    pub directions: Vec<ElementJson>,
    pub white: Vec<ElementJson>,
    pub grey: Vec<ElementJson>,
    pub interior: Option<Vec<ElementJson>>,
    pub colouring: ColouringStrategy,
    pub homothety: Option<HomothetyJson>,
    pub u_polygon: bool,
    pub xrays_equal: bool,
}

/// Directions `e^{hπi/N}`, `h = 0..N−1`, as sums of two `N`-th roots of unity.
pub fn regular_directions(tag: FieldTag) -> Vec<Direction> {
    let big_n = tag.big_n;
    let m = tag.point_conductor();
    (0..big_n)
        .map(|h| {
            let a = h / 2;
            let b = h - a;
            let w = &CycNum::zeta_pow(big_n, i64::from(a)) + &CycNum::zeta_pow(big_n, i64::from(b));
            Direction::new(w.lift(m).expect("N divides m")).expect("nonzero")
        })
        .collect()
}

/// Regular `N`-gon `R` with vertices `ζ_N^k` plus its `N` translates across
/// the edges, by `v_k + v_{k+1}`; the hull of the union with directions
/// `e^{hπi/N}` and a two-colouring with equal X-rays.
pub fn build_regular_upolygon(tag: FieldTag) -> Result<UPolygonInstance> {
    let big_n = tag.big_n;
    let m = tag.point_conductor();
    let v: Vec<CycNum> = (0..big_n)
        .map(|k| CycNum::zeta_pow(big_n, i64::from(k)).lift(m).expect("N divides m"))
        .collect();
    let mut pts: Vec<Point> = v.iter().cloned().map(Point::new).collect();
    for k in 0..big_n as usize {
        let t = &v[k] + &v[(k + 1) % big_n as usize];
        pts.extend(v.iter().map(|x| Point::new(x + &t)));
    }
    let union = PointSet::from_points(tag, pts)?;
    let hull = convex_hull(&union);
    let directions = regular_directions(tag);
    let (white, grey, strategy) = color_vertices(tag, &hull, &directions)?;
    Ok(UPolygonInstance {
        tag,
        hull,
        directions,
        white,
        grey,
        strategy,
        interior: None,
        homothety: None,
    })
}

/// Split the hull vertices into two classes with equal X-rays: alternation
/// around the hull first, otherwise two-colour the graph that joins the two
/// vertices on every line through a vertex.
pub fn color_vertices(
    tag: FieldTag,
    hull: &[Point],
    dirs: &[Direction],
) -> Result<(PointSet, PointSet, ColouringStrategy)> {
    let vertices = PointSet::from_points(tag, hull.iter().cloned())?;
    if !verify_u_polygon(&vertices, dirs)? || !hull.len().is_multiple_of(2) {
        return Err(Error::NoColouring);
    }
    let split = |colour: &[bool]| -> Result<(PointSet, PointSet)> {
        let pick = |c: bool| {
            PointSet::from_points(
                tag,
                hull.iter()
                    .zip(colour)
                    .filter(|(_, &x)| x == c)
                    .map(|(p, _)| p.clone()),
            )
        };
        Ok((pick(true)?, pick(false)?))
    };

    let alternating: Vec<bool> = (0..hull.len()).map(|i| i % 2 == 0).collect();
    let (w, g) = split(&alternating)?;
    if xrays_equal(&w, &g, dirs) {
        return Ok((w, g, ColouringStrategy::Alternation));
    }

    let k = hull.len();
    let mut adj = vec![Vec::new(); k];
    for d in dirs {
        let mut lines: HashMap<CycNum, Vec<usize>> = HashMap::new();
        for (i, p) in hull.iter().enumerate() {
            lines.entry(line_key(p, d)).or_default().push(i);
        }
        for members in lines.values() {
            if members.len() != 2 {
                return Err(Error::NoColouring);
            }
            adj[members[0]].push(members[1]);
            adj[members[1]].push(members[0]);
        }
    }
    let mut colour: Vec<Option<bool>> = vec![None; k];
    for s in 0..k {
        if colour[s].is_some() {
            continue;
        }
        colour[s] = Some(true);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let c = colour[u].expect("visited");
            for &x in &adj[u] {
                match colour[x] {
                    None => {
                        colour[x] = Some(!c);
                        queue.push_back(x);
                    }
                    Some(cx) if cx == c => return Err(Error::NoColouring),
                    Some(_) => {}
                }
            }
        }
    }
    let colour: Vec<bool> = colour.into_iter().map(|c| c.expect("all visited")).collect();
    let (w, g) = split(&colour)?;
    if w.len() != g.len() || !xrays_equal(&w, &g, dirs) {
        return Err(Error::NoColouring);
    }
    Ok((w, g, ColouringStrategy::Pairing))
}

/// `z ↦ λz + t` with real `λ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Homothety {
    pub lambda: CycNum,
    pub t: CycNum,
}

impl Homothety {
    pub fn new(lambda: CycNum, t: CycNum) -> Result<Self> {
        if !lambda.is_real() || lambda.real_sign() != std::cmp::Ordering::Greater {
            return Err(Error::Invalid("homothety factor must be a positive real".into()));
        }
        Ok(Homothety { lambda, t })
    }

    pub fn apply(&self, p: &Point) -> Point {
        let m = lcm(lcm(p.z.conductor(), self.lambda.conductor()), self.t.conductor());
        let z = &(&p.z.lift(m).expect("lcm") * &self.lambda.lift(m).expect("lcm"))
            + &self.t.lift(m).expect("lcm");
        Point::new(z)
    }
}

/// Fundamental real unit used to scale toward the window, if the field has
/// one that is useful here.
pub fn scaling_unit(tag: FieldTag) -> Option<CycNum> {
    let m = tag.point_conductor();
    let r = |z: CycNum| z.lift(m).expect("divides");
    match tag.big_n {
        // 1 + √2
        8 => Some(r(&CycNum::one(8) + &(&CycNum::zeta(8) + &CycNum::zeta_pow(8, 7)))),
        // 2 + √3
        12 => Some(r(&CycNum::from_integer(12, 2) + &(&CycNum::zeta(12) + &CycNum::zeta_pow(12, 11)))),
        // golden ratio 1 + ζ_5 + ζ_5^4
        10 => Some(r(&(&CycNum::one(5) + &CycNum::zeta(5)) + &CycNum::zeta_pow(5, 4))),
        _ => None,
    }
}

/// Scalars `j·u^k` (`j ≥ 1`, `k ≥ 0`) in increasing order.
pub fn scalar_ladder(tag: FieldTag, max_value: f64) -> Vec<CycNum> {
    let m = tag.point_conductor();
    let mut powers = vec![CycNum::one(m)];
    if let Some(u) = scaling_unit(tag) {
        while powers.last().expect("nonempty").to_f64() * u.to_f64() <= max_value {
            let next = powers.last().expect("nonempty") * &u;
            powers.push(next);
        }
    }
    let mut out: Vec<(f64, CycNum)> = Vec::new();
    for p in &powers {
        let pv = p.to_f64();
        let mut j = 1i64;
        while j as f64 * pv <= max_value {
            out.push((j as f64 * pv, p * &CycNum::from_integer(m, j)));
            j += 1;
        }
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    out.dedup_by(|a, b| a.1 == b.1);
    out.into_iter().map(|x| x.1).collect()
}

/// Search `λ` along [`scalar_ladder`] and `t` among translations sending the
/// first point of `f` to a patch point, until `h(f) ⊆ patch`. `None` after
/// `attempts` tries.
pub fn embed_homothety(f: &PointSet, patch: &PointSet, attempts: usize) -> Option<Homothety> {
    let first = f.sorted().points.into_iter().next()?;
    let m = patch.tag.point_conductor();
    let lifted: Vec<Point> = patch.points.iter().filter_map(|p| p.lift(m).ok()).collect();
    let members: HashSet<&Point> = lifted.iter().collect();
    let radius = |pts: &[Point]| {
        pts.iter()
            .map(|p| {
                let (x, y) = p.to_f64();
                x.hypot(y)
            })
            .fold(0.0f64, f64::max)
    };
    let span = |pts: &[Point]| {
        let mut d = 0.0f64;
        for a in pts {
            for b in pts {
                let (ax, ay) = a.to_f64();
                let (bx, by) = b.to_f64();
                d = d.max((ax - bx).hypot(ay - by));
            }
        }
        d
    };
    let f_span = span(&f.points);
    let patch_span = 2.0 * radius(&lifted);
    if f_span == 0.0 {
        return lifted
            .first()
            .map(|p| Homothety::new(CycNum::one(m), &p.z - &first.z.lift(m).ok()?).ok())?;
    }
    let mut tried = 0usize;
    for lambda in scalar_ladder(patch.tag, patch_span / f_span + 1e-9) {
        let lambda = match lambda.lift(lcm(m, lambda.conductor())) {
            Ok(l) => l,
            Err(_) => continue,
        };
        let base = Homothety::new(lambda.clone(), CycNum::zero(m)).ok()?;
        let scaled_first = base.apply(&first);
        for p in &lifted {
            if tried >= attempts {
                return None;
            }
            tried += 1;
            let t = &p.z - &scaled_first.z;
            let h = Homothety {
                lambda: lambda.clone(),
                t,
            };
            if f
                .points
                .iter()
                .all(|q| h.apply(q).lift(m).is_ok_and(|x| members.contains(&x)))
            {
                return Some(h);
            }
        }
    }
    None
}

/// Apply `h` to the instance and collect the patch points strictly inside
/// the new hull as the interior.
pub fn embed_instance(
    inst: &UPolygonInstance,
    patch: &PointSet,
    attempts: usize,
) -> Result<Option<UPolygonInstance>> {
    let Some(h) = embed_homothety(&inst.vertices()?, patch, attempts) else {
        return Ok(None);
    };
    let tag = inst.tag;
    let hull: Vec<Point> = inst.hull.iter().map(|p| h.apply(p)).collect();
    let map = |s: &PointSet| PointSet::from_points(tag, s.points.iter().map(|p| h.apply(p)));
    let (white, grey) = (map(&inst.white)?, map(&inst.grey)?);
    let vertex_set = PointSet::from_points(tag, hull.iter().cloned())?;
    let interior = PointSet::from_points(
        tag,
        patch
            .points
            .iter()
            .filter(|p| !vertex_set.contains(p) && in_hull(&hull, p))
            .cloned(),
    )?;
    Ok(Some(UPolygonInstance {
        tag,
        hull,
        directions: inst.directions.clone(),
        white,
        grey,
        strategy: inst.strategy,
        interior: Some(interior),
        homothety: Some(h),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_colouring() {
        let tag = FieldTag::new(4).unwrap();
        let hull: Vec<Point> = [(0, 0), (1, 0), (1, 1), (0, 1)]
            .iter()
            .map(|&(x, y)| Point::from_int_xy(x, y))
            .collect();
        let dirs = [
            Direction::from_int_xy(1, 0).unwrap(),
            Direction::from_int_xy(0, 1).unwrap(),
        ];
        let (w, g, s) = color_vertices(tag, &hull, &dirs).unwrap();
        assert_eq!(s, ColouringStrategy::Alternation);
        assert_eq!(w.len(), 2);
        assert!(w.contains(&Point::from_int_xy(0, 0)) && w.contains(&Point::from_int_xy(1, 1)));
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn plus_shape_octagon() {
        let inst = build_regular_upolygon(FieldTag::new(4).unwrap()).unwrap();
        assert_eq!(inst.hull.len(), 8);
        for (x, y) in [(2, 1), (1, 2), (-1, 2), (-2, 1), (-2, -1), (-1, -2), (1, -2), (2, -1)] {
            assert!(inst.hull.contains(&Point::from_int_xy(x, y)));
        }
        assert_eq!(inst.directions.len(), 4);
    }

    #[test]
    fn homothety_needs_positive_scale() {
        assert!(Homothety::new(CycNum::from_integer(4, -1), CycNum::zero(4)).is_err());
        assert!(Homothety::new(CycNum::zeta(4), CycNum::zero(4)).is_err());
        let h = Homothety::new(CycNum::from_integer(4, 2), CycNum::one(4)).unwrap();
        assert_eq!(h.apply(&Point::from_int_xy(1, 1)), Point::from_int_xy(3, 2));
    }

    #[test]
    fn ladders() {
        let l = scalar_ladder(FieldTag::new(8).unwrap(), 5.0);
        let v: Vec<f64> = l.iter().map(CycNum::to_f64).collect();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert!((v[0] - 1.0).abs() < 1e-12);
        assert!(v.iter().any(|x| (x - (1.0 + 2f64.sqrt())).abs() < 1e-12));
        let l = scalar_ladder(FieldTag::new(4).unwrap(), 3.5);
        assert_eq!(l.len(), 3);
    }
}
