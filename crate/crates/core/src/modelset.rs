//! Finite patches of cyclotomic model sets by cut and project.
//!
//! Points are `x ∈ Z[ζ_n]` with `|x| ≤ R` whose Galois conjugates `x*`
//! (internal space) fall in a window. For `φ(n) = 2` (`n = 3, 4, 6`) there is
//! no internal space and the patch is the lattice ball.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{euler_phi, lcm, units, CycNum, FieldTag, Rational};
use crate::geometry::{orientation, Point, PointSet, PointSetJson};

/// Coefficient boxes above this size are refused.
pub const BOX_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum WindowShape {
    Disc { radius: Rational },
    /// Regular polygon with vertices `r·e^{2πi(j + rotation)/sides}`.
    Polygon {
        sides: u32,
        circumradius: CycNum,
        rotation: Rational,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSpec {
    pub shape: WindowShape,
    /// Centre of the window in internal space.
    pub shift: (Rational, Rational),
}

fn zero() -> Rational {
    Rational::zero()
}

impl WindowSpec {
    pub fn disc(radius: Rational) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::Invalid("window radius must be positive".into()));
        }
        Ok(WindowSpec {
            shape: WindowShape::Disc { radius },
            shift: (zero(), zero()),
        })
    }

    pub fn polygon(sides: u32, circumradius: CycNum, rotation: Rational) -> Result<Self> {
        if sides < 3 {
            return Err(Error::Invalid("window polygon needs at least 3 sides".into()));
        }
        if !circumradius.is_real() || circumradius.real_sign() != Ordering::Greater {
            return Err(Error::Invalid("circumradius must be a positive real".into()));
        }
        Ok(WindowSpec {
            shape: WindowShape::Polygon {
                sides,
                circumradius,
                rotation,
            },
            shift: (zero(), zero()),
        })
    }

    pub fn with_shift(mut self, x: Rational, y: Rational) -> Self {
        self.shift = (x, y);
        self
    }

    /// Radius of a disc about the origin containing the window.
    fn outer_radius(&self) -> f64 {
        let r = match &self.shape {
            WindowShape::Disc { radius } => radius.to_f64().unwrap_or(f64::INFINITY),
            WindowShape::Polygon { circumradius, .. } => circumradius.to_f64(),
        };
        let (sx, sy) = (
            self.shift.0.to_f64().unwrap_or(0.0),
            self.shift.1.to_f64().unwrap_or(0.0),
        );
        r + sx.hypot(sy)
    }

    fn polygon_vertices(&self) -> Option<Vec<Point>> {
        let WindowShape::Polygon {
            sides,
            circumradius,
            rotation,
        } = &self.shape
        else {
            return None;
        };
        let d = rotation.denom().to_u32().unwrap_or(1);
        let a = rotation.numer().to_i64().unwrap_or(0);
        let m = lcm(lcm(sides * d, 4), circumradius.conductor());
        let r = circumradius.lift(m).expect("lcm");
        let centre = Point::from_xy(m, &self.shift.0, &self.shift.1);
        Some(
            (0..*sides)
                .map(|j| {
                    let v = &r * &CycNum::zeta_pow(sides * d, i64::from(j * d) + a).lift(m).expect("lcm");
                    Point::new(&v + &centre.z)
                })
                .collect(),
        )
    }

    /// Serialisable form; the circumradius is kept exact.
    pub fn to_json(&self) -> WindowJson {
        let shift = [self.shift.0.to_string(), self.shift.1.to_string()];
        match &self.shape {
            WindowShape::Disc { radius } => WindowJson::Disc {
                radius: radius.to_string(),
                shift,
            },
            WindowShape::Polygon {
                sides,
                circumradius,
                rotation,
            } => WindowJson::Ngon {
                sides: *sides,
                circumradius: circumradius.clone(),
                rotation: rotation.to_string(),
                shift,
            },
        }
    }

    pub fn from_json(w: &WindowJson) -> Result<Self> {
        let rat = |s: &str| parse_rational(s);
        match w {
            WindowJson::Disc { radius, shift } => {
                Ok(WindowSpec::disc(rat(radius)?)?.with_shift(rat(&shift[0])?, rat(&shift[1])?))
            }
            WindowJson::Ngon {
                sides,
                circumradius,
                rotation,
                shift,
            } => Ok(
                WindowSpec::polygon(*sides, circumradius.clone(), rat(rotation)?)?
                    .with_shift(rat(&shift[0])?, rat(&shift[1])?),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum WindowJson {
    Disc {
        radius: String,
        shift: [String; 2],
    },
    Ngon {
        sides: u32,
        circumradius: CycNum,
        rotation: String,
        shift: [String; 2],
    },
}

/// Parse `p`, `p/q` or a finite decimal such as `2.5`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Invalid(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: num_bigint::BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: num_bigint::BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: num_bigint::BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = num_bigint::BigInt::from(10).pow(frac.len() as u32);
        return Ok(Rational::new(digits, scale));
    }
    Ok(Rational::from_integer(s.parse().map_err(|_| bad())?))
}

/// Window test on an internal point, closed boundary.
pub fn window_contains(w: &WindowSpec, p: &Point) -> bool {
    window_side(w, p) != Ordering::Less
}

/// `Greater` inside, `Equal` on the boundary, `Less` outside.
fn window_side(w: &WindowSpec, p: &Point) -> Ordering {
    match &w.shape {
        WindowShape::Disc { radius } => {
            let m = p.z.conductor();
            let c = Point::from_xy(m, &w.shift.0, &w.shift.1);
            let d = &p.z - &c.z.lift(m).expect("same conductor");
            let norm = &d * &d.conj();
            let r2 = CycNum::from_rational(m, &(radius * radius));
            (&r2 - &norm).real_sign()
        }
        WindowShape::Polygon { .. } => {
            let v = w.polygon_vertices().expect("polygon");
            let k = v.len();
            let mut side = Ordering::Greater;
            for i in 0..k {
                match orientation(&v[i], &v[(i + 1) % k], p) {
                    Ordering::Less => return Ordering::Less,
                    Ordering::Equal => side = Ordering::Equal,
                    Ordering::Greater => {}
                }
            }
            side
        }
    }
}

/// Conjugation `ζ_n ↦ ζ_n^e` on `Z[ζ_n]`, returned as a planar point.
pub fn star_map(x: &CycNum, n: u32, e: u32) -> Result<Point> {
    if e.gcd(&n) != 1 {
        return Err(Error::NotCoprime {
            j: i64::from(e),
            m: n,
        });
    }
    let x = if x.conductor() == n {
        x.clone()
    } else {
        x.descend(n)?
            .ok_or_else(|| Error::Invalid(format!("{x} is not in Q(zeta_{n})")))?
    };
    Ok(Point::new(x.galois(i64::from(e))?))
}

/// Star exponent used when none is given.
pub fn default_star_exponent(n: u32) -> u32 {
    match n {
        5 => 2,
        8 => 3,
        12 => 5,
        _ => (2..n)
            .find(|&e| e.gcd(&n) == 1 && e % n != 1 && e % n != n - 1)
            .unwrap_or(1),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchSpec {
    pub tag: FieldTag,
    pub radius: Rational,
    /// `None` for the lattice cases; required otherwise.
    pub window: Option<WindowSpec>,
    pub star_exponent: u32,
}

impl PatchSpec {
    pub fn new(
        tag: FieldTag,
        radius: Rational,
        window: Option<WindowSpec>,
        star_exponent: Option<u32>,
    ) -> Result<Self> {
        let n = tag.n;
        if !radius.is_positive() {
            return Err(Error::Invalid("radius must be positive".into()));
        }
        let e = star_exponent.unwrap_or_else(|| default_star_exponent(n));
        if e.gcd(&n) != 1 {
            return Err(Error::NotCoprime {
                j: i64::from(e),
                m: n,
            });
        }
        let lattice = euler_phi(n) == 2;
        if !lattice && (e % n == 1 || e % n == n - 1) {
            return Err(Error::Invalid(format!(
                "star exponent {e} must not be ±1 mod {n}"
            )));
        }
        let window = match window {
            Some(w) => Some(w),
            None if lattice => None,
            None => Some(WindowSpec::polygon(
                n.max(lcm(n, 2)),
                CycNum::one(4),
                zero(),
            )?),
        };
        Ok(PatchSpec {
            tag,
            radius,
            window,
            star_exponent: e,
        })
    }

    pub fn is_lattice(&self) -> bool {
        euler_phi(self.tag.n) == 2
    }
}

#[derive(Debug, Clone)]
pub struct Patch {
    pub spec: PatchSpec,
    pub points: PointSet,
    /// Points whose internal image lies on the window boundary.
    pub boundary_hits: usize,
    pub candidates: u128,
}

/// Conjugation exponents for the internal spaces: the star exponent first,
/// then one representative of every other pair `{j, −j}` with `j ≢ ±1`.
fn internal_exponents(n: u32, e: u32) -> Vec<u32> {
    let mut out = vec![e];
    for j in units(n) {
        if j == 1 || j == n - 1 {
            continue;
        }
        if out.iter().any(|&k| k == j || k == n - j) {
            continue;
        }
        out.push(j);
    }
    out
}

fn embedding_row(n: u32, j: u32, phi: usize) -> (Vec<f64>, Vec<f64>) {
    (0..phi)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * f64::from(j) * k as f64 / f64::from(n);
            (a.cos(), a.sin())
        })
        .unzip()
}

/// Per-coefficient bounds `|a_k| ≤ B_k` from the inverse of the real
/// embedding matrix.
fn coefficient_box(n: u32, exps: &[u32], bounds: &[f64]) -> Result<Vec<i64>> {
    let phi = euler_phi(n) as usize;
    let mut m = DMatrix::<f64>::zeros(phi, phi);
    for (c, &j) in exps.iter().enumerate() {
        let (re, im) = embedding_row(n, j, phi);
        for k in 0..phi {
            m[(2 * c, k)] = re[k];
            m[(2 * c + 1, k)] = im[k];
        }
    }
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::Invalid("singular embedding matrix".into()))?;
    Ok((0..phi)
        .map(|k| {
            let b: f64 = (0..phi).map(|r| inv[(k, r)].abs() * bounds[r / 2]).sum();
            (b + 1e-9).floor() as i64
        })
        .collect())
}

fn box_size(b: &[i64]) -> u128 {
    b.iter().map(|&x| (2 * x + 1) as u128).product()
}

const MARGIN: f64 = 1e-9;

/// All `x ∈ Z[ζ_n]` with `|x| ≤ R` and every internal image in the window.
pub fn generate_patch(spec: &PatchSpec) -> Result<Patch> {
    let n = spec.tag.n;
    let phi = euler_phi(n) as usize;
    let r = spec.radius.to_f64().unwrap_or(f64::INFINITY);
    let exps: Vec<u32> = if spec.is_lattice() {
        vec![1]
    } else {
        let mut v = vec![1];
        v.extend(internal_exponents(n, spec.star_exponent));
        v
    };
    let wr = spec.window.as_ref().map_or(0.0, WindowSpec::outer_radius);
    let mut bounds = vec![r];
    bounds.extend(std::iter::repeat_n(wr, exps.len() - 1));
    let b = coefficient_box(n, &exps, &bounds)?;
    let candidates = box_size(&b);
    if candidates > BOX_LIMIT {
        let shrink = (BOX_LIMIT as f64 / candidates as f64).powf(1.0 / phi as f64);
        let suggested = (r * shrink * 0.9).floor().max(1.0);
        return Err(Error::CandidateExplosion {
            candidates,
            suggested: format!("{suggested}"),
        });
    }

    let tables: Vec<(Vec<f64>, Vec<f64>)> = exps.iter().map(|&j| embedding_row(n, j, phi)).collect();
    let conj_points = |a: &[i64]| -> Vec<(f64, f64)> {
        tables
            .iter()
            .map(|(c, s)| {
                let re: f64 = a.iter().zip(c).map(|(x, y)| *x as f64 * y).sum();
                let im: f64 = a.iter().zip(s).map(|(x, y)| *x as f64 * y).sum();
                (re, im)
            })
            .collect()
    };
    let window = spec.window.as_ref();
    let float_polygon: Option<Vec<(f64, f64)>> = window
        .and_then(WindowSpec::polygon_vertices)
        .map(|v| v.iter().map(Point::to_f64).collect());

    // float classification with margin; `None` means undecided
    let float_window = |p: (f64, f64)| -> Option<Ordering> {
        let w = window?;
        match &w.shape {
            WindowShape::Disc { radius } => {
                let rr = radius.to_f64()?;
                let dx = p.0 - w.shift.0.to_f64()?;
                let dy = p.1 - w.shift.1.to_f64()?;
                let s = rr * rr - (dx * dx + dy * dy);
                (s.abs() > MARGIN * (1.0 + rr * rr)).then(|| s.partial_cmp(&0.0).unwrap())
            }
            WindowShape::Polygon { .. } => {
                let v = float_polygon.as_ref()?;
                let k = v.len();
                let mut undecided = false;
                for i in 0..k {
                    let (a, c) = (v[i], v[(i + 1) % k]);
                    let cr = (c.0 - a.0) * (p.1 - a.1) - (c.1 - a.1) * (p.0 - a.0);
                    if cr < -MARGIN {
                        return Some(Ordering::Less);
                    }
                    if cr <= MARGIN {
                        undecided = true;
                    }
                }
                (!undecided).then_some(Ordering::Greater)
            }
        }
    };

    let exact_x = |a: &[i64]| CycNum::from_int_coeffs(n, a).expect("length φ(n)");
    let r2 = &spec.radius * &spec.radius;
    // 1 inside, 0 on the boundary, None outside
    let classify = |a: &[i64]| -> Option<bool> {
        let pts = conj_points(a);
        let (px, py) = pts[0];
        let s = r * r - (px * px + py * py);
        if s < -MARGIN * (1.0 + r * r) {
            return None;
        }
        if s <= MARGIN * (1.0 + r * r) {
            let x = exact_x(a);
            let norm = &x * &x.conj();
            if (&CycNum::from_rational(n, &r2) - &norm).real_sign() == Ordering::Less {
                return None;
            }
        }
        let Some(w) = window else {
            return Some(false);
        };
        let mut on_boundary = false;
        for (idx, &j) in exps.iter().enumerate().skip(1) {
            let side = match float_window(pts[idx]) {
                Some(o) => o,
                None => {
                    let p = star_map(&exact_x(a), n, j).expect("coprime");
                    window_side(w, &p)
                }
            };
            match side {
                Ordering::Less => return None,
                Ordering::Equal => on_boundary = true,
                Ordering::Greater => {}
            }
        }
        Some(on_boundary)
    };

    let first: Vec<i64> = (-b[0]..=b[0]).collect();
    let mut found: Vec<(Vec<i64>, bool)> = first
        .par_iter()
        .flat_map_iter(|&a0| {
            let mut out = Vec::new();
            let mut a = vec![0i64; phi];
            a[0] = a0;
            for (k, bk) in b.iter().enumerate().skip(1) {
                a[k] = -bk;
            }
            loop {
                if let Some(boundary) = classify(&a) {
                    out.push((a.clone(), boundary));
                }
                // odometer over coefficients 1..φ
                let mut k = phi;
                loop {
                    if k == 1 {
                        return out;
                    }
                    k -= 1;
                    if a[k] < b[k] {
                        a[k] += 1;
                        break;
                    }
                    a[k] = -b[k];
                }
                if phi == 1 {
                    return out;
                }
            }
        })
        .collect();
    found.sort();
    let boundary_hits = found.iter().filter(|f| f.1).count();
    let pts = found
        .iter()
        .map(|(a, _)| Point::new(exact_x(a)))
        .collect::<Vec<_>>();
    Ok(Patch {
        spec: spec.clone(),
        points: PointSet::from_points(spec.tag, pts)?,
        boundary_hits,
        candidates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchJson {
    #[serde(flatten)]
    pub points: PointSetJson,
    pub radius: String,
    pub star: u32,
    pub window: Option<WindowJson>,
    pub boundary_hits: usize,
}

impl Patch {
    pub fn to_json(&self) -> PatchJson {
        PatchJson {
            points: self.points.to_json(),
            radius: self.spec.radius.to_string(),
            star: self.spec.star_exponent,
            window: self.spec.window.as_ref().map(WindowSpec::to_json),
            boundary_hits: self.boundary_hits,
        }
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            WindowShape::Disc { radius } => write!(f, "disc:{radius}"),
            WindowShape::Polygon {
                sides,
                circumradius,
                rotation,
            } => write!(f, "ngon:{sides}:{circumradius}:{rotation}"),
        }
    }
}

/// `disc:<r>` or `ngon:<k>:<r>[:<rot>]`, with rational `r` and `rot`.
impl FromStr for WindowSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["disc", r] => WindowSpec::disc(parse_rational(r)?),
            ["ngon", k, r] | ["ngon", k, r, _] => {
                let sides: u32 = k
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad side count {k:?}")))?;
                let rot = match parts.get(3) {
                    Some(x) => parse_rational(x)?,
                    None => zero(),
                };
                let r = CycNum::from_rational(4, &parse_rational(r)?);
                WindowSpec::polygon(sides, r, rot)
            }
            _ => Err(Error::Invalid(format!("bad window {s:?}"))),
        }
    }
}
