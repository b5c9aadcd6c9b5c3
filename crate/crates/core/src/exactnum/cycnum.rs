use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{field, lcm, units, CycField};
use super::interval::sign_of_real_part;
use crate::error::{Error, Result};

pub type Rational = BigRational;

/// An element of the cyclotomic field `Q(ζ_m)` in canonical form.
///
/// Stored as integer numerators over the power basis `1, ζ, …, ζ^{φ(m)-1}`
/// (reduced modulo `Φ_m`) and one positive common denominator, with the gcd
/// of all numerators and the denominator equal to one. Canonical form makes
/// structural equality coincide with field equality for a fixed conductor.
#[derive(Clone)]
pub struct CycNum {
    field: Arc<CycField>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycNum {
    fn from_parts(field: Arc<CycField>, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        debug_assert_eq!(num.len(), field.phi);
        debug_assert!(!den.is_zero());
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -&*c;
            }
        }
        if !den.is_one() {
            let mut g = den.clone();
            for c in &num {
                if g.is_one() {
                    break;
                }
                if !c.is_zero() {
                    g = g.gcd(c);
                }
            }
            if !g.is_one() {
                for c in num.iter_mut() {
                    *c = &*c / &g;
                }
                den /= g;
            }
        }
        CycNum { field, num, den }
    }

    pub fn zero(m: u32) -> Self {
        let f = field(m);
        let num = vec![BigInt::zero(); f.phi];
        CycNum {
            field: f,
            num,
            den: BigInt::one(),
        }
    }

    pub fn one(m: u32) -> Self {
        Self::from_integer(m, 1)
    }

    pub fn from_integer(m: u32, v: i64) -> Self {
        let mut z = Self::zero(m);
        z.num[0] = BigInt::from(v);
        z
    }

    pub fn from_rational(m: u32, q: &Rational) -> Self {
        let f = field(m);
        let mut num = vec![BigInt::zero(); f.phi];
        num[0] = q.numer().clone();
        Self::from_parts(f, num, q.denom().clone())
    }

    pub fn from_ratio(m: u32, num: i64, den: i64) -> Self {
        Self::from_rational(m, &Rational::new(num.into(), den.into()))
    }

    /// `ζ_m^k` for any integer `k`.
    pub fn zeta_pow(m: u32, k: i64) -> Self {
        let f = field(m);
        let e = k.rem_euclid(m as i64) as usize;
        let num = f.powers[e].iter().map(|&c| BigInt::from(c)).collect();
        CycNum {
            field: f,
            num,
            den: BigInt::one(),
        }
    }

    /// `ζ_m`.
    pub fn zeta(m: u32) -> Self {
        Self::zeta_pow(m, 1)
    }

    /// Element `Σ c_k ζ_m^k` for arbitrary exponents (reduced on the fly).
    pub fn from_exponents(m: u32, terms: &[(i64, Rational)]) -> Self {
        let mut acc = Self::zero(m);
        for (k, c) in terms {
            acc = &acc + &(&Self::zeta_pow(m, *k) * &Self::from_rational(m, c));
        }
        acc
    }

    /// Element with the given rational coefficients over the power basis.
    pub fn from_coeffs(m: u32, coeffs: &[Rational]) -> Result<Self> {
        let f = field(m);
        if coeffs.len() != f.phi {
            return Err(Error::Invalid(format!(
                "Q(zeta_{m}) needs {} coefficients, got {}",
                f.phi,
                coeffs.len()
            )));
        }
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Ok(Self::from_parts(f, num, den))
    }

    /// Element with integer coefficients over the power basis.
    pub fn from_int_coeffs(m: u32, coeffs: &[i64]) -> Result<Self> {
        let q: Vec<Rational> = coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect();
        Self::from_coeffs(m, &q)
    }

    pub fn conductor(&self) -> u32 {
        self.field.m
    }

    pub fn degree(&self) -> usize {
        self.field.phi
    }

    pub fn coeffs(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|c| Rational::new(c.clone(), self.den.clone()))
            .collect()
    }

    /// Power-basis coefficients, if they are all integers.
    pub fn int_coeffs(&self) -> Option<&[BigInt]> {
        self.den.is_one().then_some(&self.num[..])
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(Rational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Re-express in `Q(ζ_target)`; `m` must divide `target`.
    pub fn lift(&self, target: u32) -> Result<Self> {
        let m = self.field.m;
        if target == m {
            return Ok(self.clone());
        }
        if !target.is_multiple_of(m) {
            return Err(Error::NotDivisor { d: m, m: target });
        }
        let step = (target / m) as usize;
        let f = field(target);
        let mut num = vec![BigInt::zero(); f.phi];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (acc, &p) in num.iter_mut().zip(&f.powers[i * step]) {
                if p != 0 {
                    *acc += c * p;
                }
            }
        }
        Ok(Self::from_parts(f, num, self.den.clone()))
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.field.m == b.field.m {
            return (a.clone(), b.clone());
        }
        let m = lcm(a.field.m, b.field.m);
        (a.lift(m).unwrap(), b.lift(m).unwrap())
    }

    /// Lift to a common conductor and compare as field elements.
    pub fn same_value(&self, other: &Self) -> bool {
        if self.field.m == other.field.m {
            return self == other;
        }
        let (a, b) = Self::common(self, other);
        a == b
    }

    fn add_same(&self, other: &Self, negate: bool) -> Self {
        let den = &self.den * &other.den;
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(x, y)| {
                let l = x * &other.den;
                let r = y * &self.den;
                if negate {
                    l - r
                } else {
                    l + r
                }
            })
            .collect();
        Self::from_parts(self.field.clone(), num, den)
    }

    fn mul_same(&self, other: &Self) -> Self {
        let f = &self.field;
        let phi = f.phi;
        if self.is_zero() || other.is_zero() {
            return Self::zero(f.m);
        }
        let mut prod = vec![BigInt::zero(); 2 * phi - 1];
        for (i, x) in self.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.num.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        reduce(f, &mut prod);
        prod.truncate(phi);
        Self::from_parts(f.clone(), prod, &self.den * &other.den)
    }

    /// Multiplicative inverse by the extended Euclidean algorithm against `Φ_m`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero(self.field.m));
        }
        let f = &self.field;
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(f.m, &q.recip()));
        }
        // s * a ≡ 1 (mod Φ_m) over Q[x]
        let a: Vec<Rational> = self.num.iter().map(|c| Rational::from_integer(c.clone())).collect();
        let phi_poly: Vec<Rational> = f
            .cyclo
            .iter()
            .map(|&c| Rational::from_integer(c.into()))
            .collect();
        let s = poly_inverse_mod(&a, &phi_poly);
        // (num/den)^-1 = den * num^-1
        let mut coeffs = vec![Rational::zero(); f.phi];
        for (i, c) in s.into_iter().enumerate() {
            coeffs[i] = c * Rational::from_integer(self.den.clone());
        }
        Self::from_coeffs(f.m, &coeffs)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.field.m);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Image under the automorphism `ζ_m ↦ ζ_m^j`.
    pub fn galois(&self, j: i64) -> Result<Self> {
        let m = self.field.m;
        let jm = j.rem_euclid(m as i64) as u64;
        if (jm as u32).gcd(&m) != 1 && m > 1 {
            return Err(Error::NotCoprime { j, m });
        }
        Ok(self.galois_unchecked(jm as u32))
    }

    pub(crate) fn galois_unchecked(&self, j: u32) -> Self {
        let f = &self.field;
        let m = f.m as u64;
        let mut num = vec![BigInt::zero(); f.phi];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = ((i as u64 * j as u64) % m) as usize;
            for (acc, &p) in num.iter_mut().zip(&f.powers[e]) {
                if p != 0 {
                    *acc += c * p;
                }
            }
        }
        CycNum {
            field: f.clone(),
            num,
            den: self.den.clone(),
        }
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        let m = self.field.m;
        if m <= 2 {
            return self.clone();
        }
        self.galois_unchecked(m - 1)
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// Whether the element lies in `Q(ζ_d)`, i.e. is fixed by every
    /// automorphism `ζ_m ↦ ζ_m^j` with `j ≡ 1 (mod d)`.
    pub fn in_subfield(&self, d: u32) -> Result<bool> {
        let m = self.field.m;
        if d == 0 || !m.is_multiple_of(d) {
            return Err(Error::NotDivisor { d, m });
        }
        Ok(units(m)
            .filter(|&j| j % d == 1 % d && j != 1)
            .all(|j| self.galois_unchecked(j) == *self))
    }

    /// Rewrite an element of `Q(ζ_d) ⊆ Q(ζ_m)` with conductor `d`.
    pub fn descend(&self, d: u32) -> Result<Option<Self>> {
        let m = self.field.m;
        if d == 0 || !m.is_multiple_of(d) {
            return Err(Error::NotDivisor { d, m });
        }
        if d == m {
            return Ok(Some(self.clone()));
        }
        if !self.in_subfield(d)? {
            return Ok(None);
        }
        let sub = field(d);
        let step = (m / d) as usize;
        // columns: images of ζ_d^i, i < φ(d); solve B c = num over Q
        let rows = self.field.phi;
        let cols = sub.phi;
        let mut mat: Vec<Vec<Rational>> = (0..rows)
            .map(|r| {
                let mut row: Vec<Rational> = (0..cols)
                    .map(|c| Rational::from_integer(self.field.powers[c * step][r].into()))
                    .collect();
                row.push(Rational::from_integer(self.num[r].clone()));
                row
            })
            .collect();
        let sol = solve_consistent(&mut mat, cols).ok_or_else(|| {
            Error::Invalid("descent system inconsistent".to_string())
        })?;
        let den = Rational::from_integer(self.den.clone());
        let coeffs: Vec<Rational> = sol.into_iter().map(|c| c / &den).collect();
        Ok(Some(Self::from_coeffs(d, &coeffs)?))
    }

    /// Floating-point value of the complex embedding `ζ_m ↦ e^{2πi/m}`.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let m = self.field.m as f64;
        let den = self.den.to_f64().unwrap_or(f64::INFINITY);
        let (mut re, mut im) = (0.0, 0.0);
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cf = c.to_f64().unwrap_or(f64::NAN);
            let a = 2.0 * std::f64::consts::PI * k as f64 / m;
            re += cf * a.cos();
            im += cf * a.sin();
        }
        (re / den, im / den)
    }

    /// Real part in floating point (the value itself for real elements).
    pub fn to_f64(&self) -> f64 {
        self.to_complex_f64().0
    }

    /// Sign of the real part, decided exactly.
    pub fn real_sign(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        if self.field.m <= 2 {
            // Q itself; basis {1}
            return self.num[0].sign().cmp_zero();
        }
        let re = self.real_part_numerators();
        if re.iter().all(Zero::is_zero) {
            return Ordering::Equal;
        }
        sign_of_real_part(self.field.m, &re)
    }

    /// Numerators of `(z + z̄)/2` scaled by `2·den`, i.e. of `z + z̄`.
    fn real_part_numerators(&self) -> Vec<BigInt> {
        let c = self.conj();
        self.num.iter().zip(&c.num).map(|(a, b)| a + b).collect()
    }

    pub fn real_signum(&self) -> Result<Ordering> {
        if !self.is_real() {
            return Err(Error::NotReal);
        }
        Ok(self.real_sign())
    }

    /// Order of two real elements under the embedding `ζ_m ↦ e^{2πi/m}`.
    pub fn real_cmp(&self, other: &Self) -> Result<Ordering> {
        if !self.is_real() || !other.is_real() {
            return Err(Error::NotReal);
        }
        Ok((self - other).real_sign())
    }

    /// Galois orbit size of the element (the degree of its minimal polynomial).
    pub fn orbit_size(&self) -> usize {
        let mut seen: Vec<CycNum> = Vec::new();
        for j in units(self.field.m) {
            let g = self.galois_unchecked(j);
            if !seen.contains(&g) {
                seen.push(g);
            }
        }
        seen.len()
    }

    pub(crate) fn galois_images(&self) -> impl Iterator<Item = CycNum> + '_ {
        units(self.field.m).map(move |j| self.galois_unchecked(j))
    }
}

trait SignExt {
    fn cmp_zero(self) -> Ordering;
}

impl SignExt for num_bigint::Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            num_bigint::Sign::Minus => Ordering::Less,
            num_bigint::Sign::NoSign => Ordering::Equal,
            num_bigint::Sign::Plus => Ordering::Greater,
        }
    }
}

fn reduce(f: &CycField, v: &mut [BigInt]) {
    let phi = f.phi;
    for e in (phi..v.len()).rev() {
        if v[e].is_zero() {
            continue;
        }
        let top = std::mem::take(&mut v[e]);
        for &(i, c) in &f.tail {
            v[e - phi + i] -= &top * c;
        }
    }
}

fn trim(p: &mut Vec<Rational>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_sub_mul(a: &[Rational], b: &[Rational], q: &[Rational]) -> Vec<Rational> {
    // a - q*b
    let len = a.len().max(b.len() + q.len() - 1);
    let mut out = vec![Rational::zero(); len];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, x) in q.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] -= x * y;
        }
    }
    trim(&mut out);
    out
}

fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r: Vec<Rational> = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (vec![Rational::zero()], r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / &lead;
        if !c.is_zero() {
            for (j, y) in b.iter().enumerate() {
                r[i + j] -= &c * y;
            }
        }
        q[i] = c;
    }
    r.truncate(db.max(1));
    trim(&mut r);
    (q, r)
}

/// `s` with `s·a ≡ 1 (mod modulus)`; `a` must be coprime to the modulus.
fn poly_inverse_mod(a: &[Rational], modulus: &[Rational]) -> Vec<Rational> {
    let mut r0: Vec<Rational> = modulus.to_vec();
    let mut r1: Vec<Rational> = a.to_vec();
    trim(&mut r1);
    let mut s0 = vec![Rational::zero()];
    let mut s1 = vec![Rational::one()];
    while !(r1.len() == 1) {
        let (q, r) = poly_divmod(&r0, &r1);
        let s = poly_sub_mul(&s0, &s1, &q);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    // r1 is a nonzero constant
    let c = r1[0].clone();
    assert!(!c.is_zero(), "element not invertible modulo the cyclotomic polynomial");
    let (_, mut s) = poly_divmod(&s1, modulus);
    for x in s.iter_mut() {
        *x = &*x / &c;
    }
    s
}

/// Solve a consistent, possibly overdetermined system given as an augmented
/// matrix with `cols` unknowns.
fn solve_consistent(mat: &mut [Vec<Rational>], cols: usize) -> Option<Vec<Rational>> {
    let rows = mat.len();
    let mut pivots = Vec::with_capacity(cols);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        let inv = mat[r][c].recip();
        for x in mat[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = mat[r].clone();
        for (i, row) in mat.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if mat[r..].iter().any(|row| !row[cols].is_zero()) || pivots.len() != cols {
        return None;
    }
    let mut sol = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = mat[i][cols].clone();
    }
    Some(sol)
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        self.field.m == other.field.m && self.den == other.den && self.num == other.num
    }
}

impl Eq for CycNum {}

impl Hash for CycNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.m.hash(state);
        self.den.hash(state);
        self.num.hash(state);
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum({self})")
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.field.m;
        let mut first = true;
        let paren = !self.den.is_one();
        if paren {
            write!(f, "(")?;
        }
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => write!(f, "z{m}^{k}")?,
                _ => write!(f, "{mag}*z{m}^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if paren {
            write!(f, ")/{}", self.den)?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn add(self, rhs: &'a CycNum) -> CycNum {
        if self.field.m == rhs.field.m {
            self.add_same(rhs, false)
        } else {
            let (a, b) = CycNum::common(self, rhs);
            a.add_same(&b, false)
        }
    }
}

impl<'a> Sub<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &'a CycNum) -> CycNum {
        if self.field.m == rhs.field.m {
            self.add_same(rhs, true)
        } else {
            let (a, b) = CycNum::common(self, rhs);
            a.add_same(&b, true)
        }
    }
}

impl<'a> Mul<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &'a CycNum) -> CycNum {
        if self.field.m == rhs.field.m {
            self.mul_same(rhs)
        } else {
            let (a, b) = CycNum::common(self, rhs);
            a.mul_same(&b)
        }
    }
}

/// Panics on division by zero; use [`CycNum::checked_div`] otherwise.
impl<'a> Div<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn div(self, rhs: &'a CycNum) -> CycNum {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            field: self.field.clone(),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<CycNum> for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: CycNum) -> CycNum {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a CycNum> for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &'a CycNum) -> CycNum {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<CycNum> for &'a CycNum {
            type Output = CycNum;
            fn $method(self, rhs: CycNum) -> CycNum {
                self.$method(&rhs)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}
