//! Cross ratios on the extended real line and the finite set of cross ratios
//! that the slopes of a U-polygon's directions can realise.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{units, CycNum, FieldTag, JsonInt, Rational};

/// A point of the real projective line: a real field element or `∞`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtReal {
    Finite(CycNum),
    Infinity,
}

impl ExtReal {
    pub fn finite(x: CycNum) -> Result<Self> {
        if !x.is_real() {
            return Err(Error::NotReal);
        }
        Ok(ExtReal::Finite(x))
    }

    pub fn rational(m: u32, num: i64, den: i64) -> Self {
        ExtReal::Finite(CycNum::from_ratio(m, num, den))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    pub fn as_finite(&self) -> Option<&CycNum> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::Infinity => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::Finite(x) => x.to_f64(),
            ExtReal::Infinity => f64::INFINITY,
        }
    }

    /// Exact equality across conductors.
    pub fn same_value(&self, other: &Self) -> bool {
        match (self, other) {
            (ExtReal::Infinity, ExtReal::Infinity) => true,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.same_value(b),
            _ => false,
        }
    }

    pub fn lift(&self, m: u32) -> Result<Self> {
        Ok(match self {
            ExtReal::Finite(x) => ExtReal::Finite(x.lift(m)?),
            ExtReal::Infinity => ExtReal::Infinity,
        })
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::Infinity => write!(f, "∞"),
        }
    }
}

/// Slope encoding used in JSON documents: either `"inf"` or a field element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExtRealJson {
    Infinity(String),
    Finite(CycNum),
}

impl From<&ExtReal> for ExtRealJson {
    fn from(v: &ExtReal) -> Self {
        match v {
            ExtReal::Finite(x) => ExtRealJson::Finite(x.clone()),
            ExtReal::Infinity => ExtRealJson::Infinity("inf".to_string()),
        }
    }
}

impl TryFrom<ExtRealJson> for ExtReal {
    type Error = Error;
    fn try_from(v: ExtRealJson) -> Result<Self> {
        match v {
            ExtRealJson::Infinity(s) if s == "inf" => Ok(ExtReal::Infinity),
            ExtRealJson::Infinity(s) => Err(Error::Invalid(format!("unknown slope token {s:?}"))),
            ExtRealJson::Finite(x) => ExtReal::finite(x),
        }
    }
}

/// `⟨t1,t2,t3,t4⟩ = (t3−t1)(t4−t2) / ((t3−t2)(t4−t1))`.
///
/// If one argument is `∞`, the two factors containing it cancel.
pub fn cross_ratio(t1: &ExtReal, t2: &ExtReal, t3: &ExtReal, t4: &ExtReal) -> Result<CycNum> {
    let t = [t1, t2, t3, t4];
    let infinite = t.iter().filter(|x| x.is_infinite()).count();
    if infinite > 1 {
        return Err(Error::TooManyInfinities);
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if t[i].same_value(t[j]) {
                return Err(Error::RepeatedValue);
            }
        }
    }
    // (a, b) stands for (t_a - t_b); numerator and denominator factor pairs
    let diff = |a: usize, b: usize| -> Option<CycNum> {
        match (t[a], t[b]) {
            (ExtReal::Finite(x), ExtReal::Finite(y)) => Some(x - y),
            _ => None,
        }
    };
    let num = [diff(2, 0), diff(3, 1)];
    let den = [diff(2, 1), diff(3, 0)];
    let prod = |fs: [Option<CycNum>; 2]| -> Option<CycNum> {
        fs.into_iter().flatten().reduce(|a, b| &a * &b)
    };
    let n = prod(num).expect("at least one finite factor");
    let d = prod(den).expect("at least one finite factor");
    n.checked_div(&d)
}

/// Index tuple `(k1, k2, k3, k4)` with `k3 < k1 ≤ k2 < k4 ≤ m−1` and
/// `k1 + k2 = k3 + k4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadrupleIndex {
    pub m: u32,
    pub k: [u32; 4],
}

impl QuadrupleIndex {
    pub fn new(m: u32, k1: u32, k2: u32, k3: u32, k4: u32) -> Result<Self> {
        let ok = k3 >= 1 && k3 < k1 && k1 <= k2 && k2 < k4 && k4 < m && k1 + k2 == k3 + k4;
        if !ok {
            return Err(Error::InvalidQuadruple([k1, k2, k3, k4]));
        }
        Ok(QuadrupleIndex {
            m,
            k: [k1, k2, k3, k4],
        })
    }

    /// `sin(k1π/m)·sin(k2π/m) / (sin(k3π/m)·sin(k4π/m))`.
    pub fn sine_quotient(&self) -> f64 {
        let s = |k: u32| (std::f64::consts::PI * k as f64 / self.m as f64).sin();
        s(self.k[0]) * s(self.k[1]) / (s(self.k[2]) * s(self.k[3]))
    }

    /// All index tuples for modulus `m`, ordered by `s = k1 + k2`, then `k3`,
    /// then `k1`.
    pub fn enumerate(m: u32) -> impl Iterator<Item = QuadrupleIndex> {
        (2..=2 * (m.max(2) - 1)).flat_map(move |s| Self::with_sum(m, s))
    }

    fn with_sum(m: u32, s: u32) -> impl Iterator<Item = QuadrupleIndex> {
        (1..s.div_ceil(2)).flat_map(move |k3| {
            (k3 + 1..=s / 2).filter_map(move |k1| {
                let (k2, k4) = (s - k1, s - k3);
                (k1 <= k2 && k2 < k4 && k4 < m).then_some(QuadrupleIndex {
                    m,
                    k: [k1, k2, k3, k4],
                })
            })
        })
    }
}

/// `(1−ζ^{k1})(1−ζ^{k2}) / ((1−ζ^{k3})(1−ζ^{k4}))` in `Q(ζ_m)`.
pub fn quadruple_value(q: &QuadrupleIndex) -> Result<CycNum> {
    let [k1, k2, k3, k4] = q.k;
    QuadrupleIndex::new(q.m, k1, k2, k3, k4)?;
    let table = OneMinusZeta::new(q.m);
    Ok(table.value(q))
}

/// Cached `1 − ζ^k` and its inverse for every `k` in `1..m`.
struct OneMinusZeta {
    plain: Vec<CycNum>,
    inverse: Vec<CycNum>,
}

impl OneMinusZeta {
    fn new(m: u32) -> Self {
        let one = CycNum::one(m);
        let plain: Vec<CycNum> = (0..m)
            .map(|k| &one - &CycNum::zeta_pow(m, k as i64))
            .collect();
        // 1 − ζ^k = σ_J(1 − ζ^g) with g = gcd(k, m), so one inversion per divisor.
        let mut per_divisor: HashMap<u32, CycNum> = HashMap::new();
        let mut inverse = vec![CycNum::zero(m)];
        for k in 1..m {
            let g = k.gcd(&m);
            let base = per_divisor
                .entry(g)
                .or_insert_with(|| plain[g as usize].inv().expect("1 - ζ^g is nonzero"))
                .clone();
            let step = m / g;
            let mut j = k / g;
            while j.gcd(&m) != 1 {
                j += step;
            }
            inverse.push(base.galois(j as i64).expect("unit"));
        }
        OneMinusZeta { plain, inverse }
    }

    fn value(&self, q: &QuadrupleIndex) -> CycNum {
        let [k1, k2, k3, k4] = q.k.map(|k| k as usize);
        let num = &self.plain[k1] * &self.plain[k2];
        let den = &self.inverse[k3] * &self.inverse[k4];
        &num * &den
    }
}

/// The deduplicated set of admissible cross ratios for a field tag.
#[derive(Debug, Clone)]
pub struct CrossRatioSet {
    pub tag: FieldTag,
    /// Sorted increasingly; conductor `tag.m`.
    pub values: Vec<CycNum>,
    /// Lexicographically smallest index tuple realising each value.
    pub witnesses: Vec<QuadrupleIndex>,
    index: HashMap<CycNum, usize>,
}

impl CrossRatioSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Exact membership; `x` may have any conductor dividing or divisible
    /// by `tag.m`.
    pub fn contains(&self, x: &CycNum) -> bool {
        let m = self.tag.m;
        if x.conductor() == m {
            return self.index.contains_key(x);
        }
        if m.is_multiple_of(x.conductor()) {
            return x.lift(m).is_ok_and(|y| self.index.contains_key(&y));
        }
        match x.descend(m) {
            Ok(Some(y)) => self.index.contains_key(&y),
            _ => {
                // different fields: lift both to a common conductor
                self.values.iter().any(|v| v.same_value(x))
            }
        }
    }

    pub fn approx(&self) -> Vec<f64> {
        self.values.iter().map(CycNum::to_f64).collect()
    }

    pub fn to_json(&self) -> CrossRatioSetJson {
        CrossRatioSetJson {
            n: self.tag.n,
            big_n: self.tag.big_n,
            m: self.tag.m,
            count: self.values.len(),
            values: self
                .values
                .iter()
                .zip(&self.witnesses)
                .map(|(v, w)| CrossRatioEntryJson {
                    coeffs: v
                        .coeffs()
                        .iter()
                        .map(|c| (JsonInt::from(c.numer()), JsonInt::from(c.denom())))
                        .collect(),
                    approx: v.to_f64(),
                    pretty: pretty(v),
                    witness: w.k,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossRatioSetJson {
    pub n: u32,
    #[serde(rename = "N")]
    pub big_n: u32,
    pub m: u32,
    pub count: usize,
    pub values: Vec<CrossRatioEntryJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossRatioEntryJson {
    pub coeffs: Vec<(JsonInt, JsonInt)>,
    pub approx: f64,
    pub pretty: String,
    pub witness: [u32; 4],
}

/// Enumerate every constrained index tuple for `tag.m` and keep the values
/// that lie in the real subfield of `Q(ζ_N)`.
///
/// A floating-point screen on the Galois conjugates discards tuples whose
/// value is visibly moved by `Gal(Q(ζ_m)/Q(ζ_N))`; each survivor is then
/// computed and tested exactly.
pub fn enumerate_cross_ratio_set(tag: FieldTag) -> CrossRatioSet {
    let m = tag.m;
    let big_n = tag.big_n;
    let fixing: Vec<u32> = units(m).filter(|&j| j % big_n == 1 && j != 1).collect();
    let sines: Vec<f64> = (0..m)
        .map(|k| (std::f64::consts::PI * k as f64 / m as f64).sin())
        .collect();

    let survivors: Vec<QuadrupleIndex> = (2..=2 * (m - 1))
        .into_par_iter()
        .flat_map_iter(|s| {
            let fixing = &fixing;
            let sines = &sines;
            QuadrupleIndex::with_sum(m, s)
                .filter(move |q| numerically_fixed(q, fixing, sines))
                .collect::<Vec<_>>()
        })
        .collect();

    let table = OneMinusZeta::new(m);
    let exact: Vec<(CycNum, QuadrupleIndex)> = survivors
        .par_iter()
        .filter_map(|q| {
            let v = table.value(q);
            debug_assert!(v.is_real());
            v.in_subfield(big_n).unwrap().then_some((v, *q))
        })
        .collect();

    let mut best: HashMap<CycNum, QuadrupleIndex> = HashMap::new();
    for (v, q) in exact {
        best.entry(v)
            .and_modify(|w| {
                if q.k < w.k {
                    *w = q
                }
            })
            .or_insert(q);
    }
    let mut entries: Vec<(CycNum, QuadrupleIndex, f64)> = best
        .into_iter()
        .map(|(v, q)| {
            let a = v.to_f64();
            (v, q, a)
        })
        .collect();
    entries.sort_by(|a, b| compare_real(&a.0, a.2, &b.0, b.2));

    let index = entries
        .iter()
        .enumerate()
        .map(|(i, (v, _, _))| (v.clone(), i))
        .collect();
    CrossRatioSet {
        tag,
        values: entries.iter().map(|e| e.0.clone()).collect(),
        witnesses: entries.iter().map(|e| e.1).collect(),
        index,
    }
}

fn compare_real(a: &CycNum, fa: f64, b: &CycNum, fb: f64) -> Ordering {
    if (fa - fb).abs() > 1e-9 * (1.0 + fa.abs().max(fb.abs())) {
        return fa.partial_cmp(&fb).unwrap();
    }
    a.real_cmp(b).expect("real values")
}

fn numerically_fixed(q: &QuadrupleIndex, fixing: &[u32], sines: &[f64]) -> bool {
    let m = q.m as u64;
    let v = {
        let [a, b, c, d] = q.k.map(|k| sines[k as usize]);
        a * b / (c * d)
    };
    fixing.iter().all(|&j| {
        let e = q.k.map(|k| (k as u64 * j as u64 % m) as usize);
        // phases cancel up to the sign (−1)^{(e1+e2−e3−e4)/m}
        let wrap = (e[0] + e[1]) as i64 - (e[2] + e[3]) as i64;
        let sign = if (wrap / m as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let w = sign * sines[e[0]] * sines[e[1]] / (sines[e[2]] * sines[e[3]]);
        (w - v).abs() <= 1e-9 * v.abs()
    })
}

/// The orbit `{λ, 1/λ, 1−λ, 1/(1−λ), (λ−1)/λ, λ/(λ−1)}` of a cross ratio under
/// reordering of its arguments.
pub fn cross_ratio_orbit(c: &CycNum) -> Result<Vec<CycNum>> {
    let m = c.conductor();
    let one = CycNum::one(m);
    if c.is_zero() || c == &one {
        return Err(Error::DegenerateCrossRatio);
    }
    let inv = c.inv()?;
    let one_minus = &one - c;
    let candidates = [
        c.clone(),
        inv.clone(),
        one_minus.clone(),
        one_minus.inv()?,
        &one - &inv,
        c * &(c - &one).inv()?,
    ];
    let mut out: Vec<CycNum> = Vec::with_capacity(6);
    for x in candidates {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Closed form `(A + B√d)/D` for rational and real quadratic elements,
/// otherwise a decimal approximation.
pub fn pretty(x: &CycNum) -> String {
    match quadratic_form(x) {
        Some((a, b, d)) => format_quadratic(&a, &b, d),
        None => format!("≈{:.12}", x.to_f64()),
    }
}

/// `x = a + b√d` with `d` squarefree (`b = 0, d = 1` for rationals).
pub fn quadratic_form(x: &CycNum) -> Option<(Rational, Rational, u64)> {
    if let Some(q) = x.as_rational() {
        return Some((q, Rational::zero(), 1));
    }
    let mut other: Option<CycNum> = None;
    for g in x.galois_images() {
        if &g == x {
            continue;
        }
        match &other {
            None => other = Some(g),
            Some(o) if *o == g => {}
            Some(_) => return None,
        }
    }
    let y = other?;
    let half = CycNum::from_ratio(x.conductor(), 1, 2);
    let a = (&(x + &y) * &half).as_rational()?;
    let delta = &(x - &y) * &half;
    let r = (&delta * &delta).as_rational()?;
    if !r.is_positive() {
        return None;
    }
    // r = P/Q = (P·Q)/Q², split P·Q = s²·d
    let pq = r.numer() * r.denom();
    let (s, d) = split_square(&pq)?;
    let b_abs = Rational::new(s, r.denom().clone());
    let b = if delta.real_sign() == Ordering::Less {
        -b_abs
    } else {
        b_abs
    };
    Some((a, b, d))
}

fn split_square(v: &BigInt) -> Option<(BigInt, u64)> {
    let mut rest: u64 = v.try_into().ok()?;
    let mut square = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        while rest.is_multiple_of(p * p) {
            rest /= p * p;
            square *= p;
        }
        p += 1;
    }
    debug_assert_eq!(rest.sqrt() * rest.sqrt() == rest, rest == 1);
    Some((BigInt::from(square), rest))
}

fn format_quadratic(a: &Rational, b: &Rational, d: u64) -> String {
    if b.is_zero() || d == 1 {
        let v = a + b;
        return if v.is_integer() {
            v.numer().to_string()
        } else {
            format!("{}/{}", v.numer(), v.denom())
        };
    }
    let den = a.denom().lcm(b.denom());
    let big_a = (a * Rational::from_integer(den.clone())).to_integer();
    let big_b = (b * Rational::from_integer(den.clone())).to_integer();
    let root = |coef: &BigInt, leading: bool| -> String {
        let sign = if coef.is_negative() {
            "-"
        } else if leading {
            ""
        } else {
            "+"
        };
        let mag = coef.abs();
        if mag.is_one() {
            format!("{sign}√{d}")
        } else {
            format!("{sign}{mag}√{d}")
        }
    };
    let body = if big_a.is_zero() {
        root(&big_b, true)
    } else {
        format!("{big_a}{}", root(&big_b, false))
    };
    if den.is_one() {
        body
    } else if big_a.is_zero() {
        format!("{body}/{den}")
    } else {
        format!("({body})/{den}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> ExtReal {
        ExtReal::rational(4, n, d)
    }

    #[test]
    fn small_cross_ratios() {
        let inf = ExtReal::Infinity;
        assert_eq!(
            cross_ratio(&r(0, 1), &r(1, 1), &r(2, 1), &r(3, 1)).unwrap(),
            CycNum::from_ratio(4, 4, 3)
        );
        assert_eq!(
            cross_ratio(&r(1, 1), &r(2, 1), &r(3, 1), &inf).unwrap(),
            CycNum::from_integer(4, 2)
        );
        assert_eq!(
            cross_ratio(&r(0, 1), &r(1, 1), &r(3, 1), &inf).unwrap(),
            CycNum::from_ratio(4, 3, 2)
        );
    }

    #[test]
    fn cross_ratio_errors() {
        let inf = ExtReal::Infinity;
        assert_eq!(
            cross_ratio(&r(0, 1), &r(0, 1), &r(2, 1), &r(3, 1)),
            Err(Error::RepeatedValue)
        );
        assert_eq!(
            cross_ratio(&r(0, 1), &inf, &r(2, 1), &inf),
            Err(Error::TooManyInfinities)
        );
        assert_eq!(
            ExtReal::finite(CycNum::zeta(4)).unwrap_err(),
            Error::NotReal
        );
    }

    #[test]
    fn quadruple_index_validation() {
        assert!(QuadrupleIndex::new(24, 4, 4, 2, 6).is_ok());
        assert!(QuadrupleIndex::new(24, 4, 4, 4, 4).is_err());
        assert!(QuadrupleIndex::new(24, 6, 6, 2, 11).is_err());
        assert!(QuadrupleIndex::new(24, 13, 13, 2, 24).is_err());
    }

    #[test]
    fn enumeration_hits_each_tuple_once() {
        // brute force over all 4-tuples
        for m in [5u32, 12, 13, 24] {
            let mut brute = Vec::new();
            for k1 in 1..m {
                for k2 in k1..m {
                    for k3 in 1..k1 {
                        for k4 in k2 + 1..m {
                            if k1 + k2 == k3 + k4 {
                                brute.push([k1, k2, k3, k4]);
                            }
                        }
                    }
                }
            }
            let mut fast: Vec<[u32; 4]> = QuadrupleIndex::enumerate(m).map(|q| q.k).collect();
            assert_eq!(fast.len(), brute.len());
            fast.sort();
            brute.sort();
            assert_eq!(fast, brute);
        }
    }

    #[test]
    fn orbit_examples() {
        let two = CycNum::from_integer(4, 2);
        let orbit = cross_ratio_orbit(&two).unwrap();
        assert_eq!(orbit.len(), 3);
        for v in [(2, 1), (1, 2), (-1, 1)] {
            assert!(orbit.contains(&CycNum::from_ratio(4, v.0, v.1)));
        }
        let o = cross_ratio_orbit(&CycNum::from_ratio(4, 4, 3)).unwrap();
        assert_eq!(o.len(), 6);
        for v in [(4, 3), (3, 4), (-1, 3), (-3, 1), (1, 4), (4, 1)] {
            assert!(o.contains(&CycNum::from_ratio(4, v.0, v.1)));
        }
        assert_eq!(cross_ratio_orbit(&CycNum::from_integer(4, -1)).unwrap().len(), 3);
        assert_eq!(
            cross_ratio_orbit(&CycNum::one(4)),
            Err(Error::DegenerateCrossRatio)
        );
        assert_eq!(
            cross_ratio_orbit(&CycNum::zero(4)),
            Err(Error::DegenerateCrossRatio)
        );
    }

    #[test]
    fn pretty_forms() {
        let sqrt3 = &CycNum::zeta(12) + &CycNum::zeta_pow(12, 11);
        let one = CycNum::one(12);
        assert_eq!(pretty(&sqrt3), "√3");
        assert_eq!(pretty(&(&one + &sqrt3)), "1+√3");
        let half = CycNum::from_ratio(12, 1, 2);
        assert_eq!(pretty(&(&(&one + &sqrt3) * &half)), "(1+√3)/2");
        let two = CycNum::from_integer(12, 2);
        assert_eq!(pretty(&(&two / &sqrt3)), "2√3/3");
        let eight = CycNum::from_integer(12, 8);
        let four = CycNum::from_integer(12, 4);
        assert_eq!(pretty(&(&eight - &(&four * &sqrt3))), "8-4√3");
        assert_eq!(pretty(&CycNum::from_ratio(12, 4, 3)), "4/3");
        assert!(pretty(&(&CycNum::zeta(7) + &CycNum::zeta_pow(7, 6))).starts_with('≈'));
    }
}
