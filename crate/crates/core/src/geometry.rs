//! Exact planar geometry over cyclotomic fields: points, directions, slopes,
//! lines, convex hulls.
//!
//! The plane is `C`; a point is a `CycNum` whose conductor is divisible by 4
//! so that `i` and hence real and imaginary parts are available.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::crossratio::ExtReal;
use crate::error::{Error, Result};
use crate::exactnum::{lcm, CycNum, FieldTag, JsonInt, Rational};

fn i_unit(m: u32) -> CycNum {
    CycNum::zeta_pow(m, (m / 4) as i64)
}

fn with_i(z: &CycNum) -> CycNum {
    let m = lcm(z.conductor(), 4);
    z.lift(m).expect("conductor divides its multiple")
}

/// Imaginary part `(z − z̄)/(2i)`.
fn im_part(z: &CycNum) -> CycNum {
    let z = with_i(z);
    let m = z.conductor();
    let d = &z - &z.conj();
    &(&d * &i_unit(m)) * &CycNum::from_ratio(m, -1, 2)
}

/// Real part `(z + z̄)/2`.
fn re_part(z: &CycNum) -> CycNum {
    let m = z.conductor();
    &(z + &z.conj()) * &CycNum::from_ratio(m, 1, 2)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub z: CycNum,
}

impl Point {
    /// Lifts `z` to a conductor divisible by 4.
    pub fn new(z: CycNum) -> Self {
        Point { z: with_i(&z) }
    }

    /// `x + iy` in `Q(ζ_m)`, `m` rounded up to a multiple of 4.
    pub fn from_xy(m: u32, x: &Rational, y: &Rational) -> Self {
        let m = lcm(m, 4);
        let z = &CycNum::from_rational(m, x) + &(&CycNum::from_rational(m, y) * &i_unit(m));
        Point { z }
    }

    pub fn from_int_xy(x: i64, y: i64) -> Self {
        Self::from_xy(4, &Rational::from_integer(x.into()), &Rational::from_integer(y.into()))
    }

    pub fn lift(&self, m: u32) -> Result<Self> {
        Ok(Point { z: self.z.lift(m)? })
    }

    pub fn re(&self) -> CycNum {
        re_part(&self.z)
    }

    pub fn im(&self) -> CycNum {
        im_part(&self.z)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        self.z.to_complex_f64()
    }

    pub fn translate(&self, t: &CycNum) -> Result<Self> {
        let m = lcm(self.z.conductor(), t.conductor());
        Ok(Point::new(&self.z.lift(m)? + &t.lift(m)?))
    }
}

/// A nonzero `w` up to rational scaling: divided by its first nonzero
/// power-basis coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Direction {
    pub w: CycNum,
}

impl Direction {
    pub fn new(w: CycNum) -> Result<Self> {
        let w = with_i(&w);
        let lead = w
            .coeffs()
            .into_iter()
            .find(|c| *c != Rational::from_integer(0.into()))
            .ok_or(Error::ZeroDirection)?;
        let m = w.conductor();
        let w = &w * &CycNum::from_rational(m, &lead.recip());
        Ok(Direction { w })
    }

    pub fn from_int_xy(x: i64, y: i64) -> Result<Self> {
        Self::new(Point::from_int_xy(x, y).z)
    }

    pub fn lift(&self, m: u32) -> Result<Self> {
        Direction::new(self.w.lift(m)?)
    }

    pub fn is_parallel(&self, other: &Direction) -> bool {
        slope_of(self).same_value(&slope_of(other))
    }
}

/// `Im(w)/Re(w)`, or `∞` for vertical directions.
pub fn slope_of(d: &Direction) -> ExtReal {
    let re2 = &d.w + &d.w.conj();
    if re2.is_zero() {
        return ExtReal::Infinity;
    }
    let m = d.w.conductor();
    let im2 = &(&d.w - &d.w.conj()) * &(-&i_unit(m));
    ExtReal::Finite(&im2 / &re2)
}

/// `Im(z·w̄)`: constant exactly along lines parallel to `d`.
pub fn line_key(p: &Point, d: &Direction) -> CycNum {
    let m = lcm(p.z.conductor(), d.w.conductor());
    let z = p.z.lift(m).expect("lcm");
    let w = d.w.lift(m).expect("lcm");
    im_part(&(&z * &w.conj()))
}

/// Sign of the turn `a → b → c`: `Greater` for counterclockwise.
pub fn orientation(a: &Point, b: &Point, c: &Point) -> Ordering {
    let u = &b.z - &a.z;
    let v = &c.z - &a.z;
    im_part(&(&u.conj() * &v)).real_sign()
}

/// Lexicographic order by `(Re, Im)`.
pub fn xy_cmp(a: &Point, b: &Point) -> Ordering {
    (&a.re() - &b.re())
        .real_sign()
        .then_with(|| (&a.im() - &b.im()).real_sign())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    pub tag: FieldTag,
    pub points: Vec<Point>,
}

impl PointSet {
    pub fn new(tag: FieldTag) -> Self {
        PointSet {
            tag,
            points: Vec::new(),
        }
    }

    /// Points are lifted to the tag's point conductor; duplicates dropped,
    /// first occurrence kept.
    pub fn from_points(tag: FieldTag, pts: impl IntoIterator<Item = Point>) -> Result<Self> {
        let m = tag.point_conductor();
        let mut seen = HashSet::new();
        let mut points = Vec::new();
        for p in pts {
            let p = p.lift(m)?;
            if seen.insert(p.clone()) {
                points.push(p);
            }
        }
        Ok(PointSet { tag, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        let m = self.tag.point_conductor();
        match p.lift(m) {
            Ok(p) => self.points.contains(&p),
            Err(_) => self.points.iter().any(|q| q.z.same_value(&p.z)),
        }
    }

    /// Copy sorted by `(Re, Im)`.
    pub fn sorted(&self) -> PointSet {
        let mut points = self.points.clone();
        points.sort_by(xy_cmp);
        PointSet {
            tag: self.tag,
            points,
        }
    }

    pub fn translate(&self, t: &CycNum) -> Result<PointSet> {
        let pts = self
            .points
            .iter()
            .map(|p| p.translate(t))
            .collect::<Result<Vec<_>>>()?;
        PointSet::from_points(self.tag, pts)
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        PointSet::from_points(self.tag, self.points.iter().chain(&other.points).cloned())
    }

    pub fn to_json(&self) -> PointSetJson {
        PointSetJson {
            n: self.tag.n,
            points: self
                .points
                .iter()
                .map(|p| ElementJson::encode(self.tag, &p.z))
                .collect(),
        }
    }

    pub fn from_json(doc: &PointSetJson) -> Result<Self> {
        let tag = FieldTag::new(doc.n)?;
        let pts = doc
            .points
            .iter()
            .map(|e| e.decode(tag).map(Point::new))
            .collect::<Result<Vec<_>>>()?;
        PointSet::from_points(tag, pts)
    }
}

/// A field element in a JSON document: integer coefficients over the power
/// basis of `Q(ζ_n)` when possible, else the general `{"m", "coeffs"}` form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementJson {
    Integral(Vec<JsonInt>),
    Exact(CycNum),
}

impl ElementJson {
    pub fn encode(tag: FieldTag, z: &CycNum) -> Self {
        let down = if z.conductor().is_multiple_of(tag.n) {
            z.descend(tag.n).ok().flatten()
        } else {
            None
        };
        match down.as_ref().and_then(|d| d.int_coeffs()) {
            Some(c) => ElementJson::Integral(c.iter().map(JsonInt::from).collect()),
            None => ElementJson::Exact(z.clone()),
        }
    }

    pub fn decode(&self, tag: FieldTag) -> Result<CycNum> {
        match self {
            ElementJson::Exact(z) => Ok(z.clone()),
            ElementJson::Integral(c) => {
                let c = c
                    .iter()
                    .map(|x| {
                        x.to_bigint()
                            .map(Rational::from_integer)
                            .ok_or_else(|| Error::Invalid("bad integer".into()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                CycNum::from_coeffs(tag.n, &c)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSetJson {
    pub n: u32,
    pub points: Vec<ElementJson>,
}

/// Counterclockwise extreme points, starting from the lowest `(Re, Im)`.
/// Collinear boundary points are not vertices.
pub fn convex_hull(s: &PointSet) -> Vec<Point> {
    hull_of(&s.sorted().points)
}

/// Monotone chain on points already sorted by `(Re, Im)` without duplicates.
fn hull_of(pts: &[Point]) -> Vec<Point> {
    hull_indices(pts.len(), |a, b, c| orientation(&pts[a], &pts[b], &pts[c]))
        .into_iter()
        .map(|i| pts[i].clone())
        .collect()
}

/// Monotone chain over indices `0..n` assumed sorted, with a caller-supplied
/// orientation predicate.
pub(crate) fn hull_indices(n: usize, orient: impl Fn(usize, usize, usize) -> Ordering) -> Vec<usize> {
    if n <= 2 {
        return (0..n).collect();
    }
    let mut lower: Vec<usize> = Vec::new();
    for i in 0..n {
        while lower.len() >= 2
            && orient(lower[lower.len() - 2], lower[lower.len() - 1], i) != Ordering::Greater
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for i in (0..n).rev() {
        while upper.len() >= 2
            && orient(upper[upper.len() - 2], upper[upper.len() - 1], i) != Ordering::Greater
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    lower
}

/// Whether `p` lies in the closed convex hull given by `hull` (as returned by
/// [`convex_hull`]).
pub fn in_hull(hull: &[Point], p: &Point) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0].z.same_value(&p.z),
        2 => {
            orientation(&hull[0], &hull[1], p) == Ordering::Equal
                && xy_cmp(&hull[0], p) != Ordering::Greater
                && xy_cmp(p, &hull[1]) != Ordering::Greater
        }
        k => (0..k).all(|i| orientation(&hull[i], &hull[(i + 1) % k], p) != Ordering::Less),
    }
}

/// `s = conv(s) ∩ patch`. The empty set and singletons are convex.
pub fn is_convex_subset(s: &PointSet, patch: &PointSet) -> Result<bool> {
    if !s.points.iter().all(|p| patch.contains(p)) {
        return Err(Error::NotSubset);
    }
    let hull = convex_hull(s);
    Ok(patch
        .points
        .iter()
        .all(|p| s.contains(p) || !in_hull(&hull, p)))
}
