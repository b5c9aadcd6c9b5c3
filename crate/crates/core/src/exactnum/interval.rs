//! Certified sign of `Σ c_k cos(2πk/m)` for integer `c_k`.
//!
//! A float pass with a generous error bound settles almost every query. The
//! fallback evaluates the sum in binary fixed point with an explicit error
//! bound (in units of the last place), starting at 64 bits and doubling the
//! precision until the error interval excludes zero. Callers must rule out an
//! exact zero first, otherwise the loop would not terminate.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

pub(crate) fn sign_of_real_part(m: u32, num: &[BigInt]) -> Ordering {
    if let Some(s) = float_sign(m, num) {
        return s;
    }
    let mut bits = 64u32;
    loop {
        if let Some(s) = fixed_point_sign(m, num, bits) {
            return s;
        }
        bits *= 2;
    }
}

fn float_sign(m: u32, num: &[BigInt]) -> Option<Ordering> {
    let mut sum = 0.0f64;
    let mut mag = 0.0f64;
    for (k, c) in num.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let cf = c.to_f64()?;
        if !cf.is_finite() || cf.abs() > 1e290 {
            return None;
        }
        let t = cf * (2.0 * std::f64::consts::PI * k as f64 / m as f64).cos();
        sum += t;
        mag += cf.abs();
    }
    let tol = (num.len() as f64 + 8.0) * 1e-14 * mag;
    if sum > tol {
        Some(Ordering::Greater)
    } else if sum < -tol {
        Some(Ordering::Less)
    } else {
        None
    }
}

/// Fixed-point value `v · 2^-bits` with absolute error at most `err` ulps.
#[derive(Clone)]
struct Fixed {
    v: BigInt,
    err: f64,
}

fn div_trunc(a: &BigInt, d: u64) -> BigInt {
    a / BigInt::from(d)
}

/// `atan(1/x)` by its alternating series.
fn atan_inv(x: u64, bits: u32) -> Fixed {
    let one = BigInt::from(1) << bits;
    let x2 = x * x;
    let mut term = div_trunc(&one, x);
    let mut sum = term.clone();
    let mut terms = 1.0;
    let mut k = 1u64;
    loop {
        term = div_trunc(&term, x2);
        if term.is_zero() {
            break;
        }
        let t = div_trunc(&term, 2 * k + 1);
        if k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        terms += 2.0;
        k += 1;
    }
    // each term carries at most two truncations; the tail is below one ulp
    Fixed {
        v: sum,
        err: terms + 2.0,
    }
}

fn pi(bits: u32) -> Fixed {
    // π = 16 atan(1/5) - 4 atan(1/239)
    let a = atan_inv(5, bits);
    let b = atan_inv(239, bits);
    Fixed {
        v: a.v * 16 - b.v * 4,
        err: 16.0 * a.err + 4.0 * b.err,
    }
}

fn mul_fixed(a: &BigInt, b: &BigInt, bits: u32) -> BigInt {
    (a * b) >> bits
}

/// `(cos θ, sin θ)` for `θ = 2π/m`, `m >= 3` (so `0 < θ <= 2.1`).
fn cos_sin(m: u32, bits: u32) -> (Fixed, Fixed) {
    let p = pi(bits);
    let theta = Fixed {
        v: (&p.v * 2) / BigInt::from(m),
        err: 2.0 * p.err / m as f64 + 1.0,
    };
    let one = BigInt::from(1) << bits;
    // term_j ≈ θ^j / j!, error tracked conservatively.
    let mut term = one.clone();
    let mut term_err = 0.0f64;
    let mut term_mag = 1.0f64;
    let theta_mag = 2.0 * std::f64::consts::PI / m as f64 + 1e-9;
    let mut cos = Fixed {
        v: one.clone(),
        err: 0.0,
    };
    let mut sin = Fixed {
        v: BigInt::zero(),
        err: 0.0,
    };
    let mut log2_mag = 0.0f64;
    let mut j = 1u64;
    loop {
        let prod = mul_fixed(&term, &theta.v, bits);
        term = div_trunc(&prod, j);
        term_err = (term_err * theta_mag * 1.001 + term_mag * 1.001 * theta.err + 1.0) / j as f64 + 1.0;
        term_mag = term_mag * theta_mag / j as f64;
        log2_mag += (theta_mag / j as f64).log2();
        let target = if j.is_multiple_of(2) { &mut cos } else { &mut sin };
        if (j / 2).is_multiple_of(2) {
            target.v += &term;
        } else {
            target.v -= &term;
        }
        target.err += term_err;
        if j >= 3 && log2_mag < -(bits as f64) - 2.0 {
            break;
        }
        j += 1;
    }
    // remainder of both alternating series is below the next term, i.e. < 2 ulps
    cos.err += 2.0;
    sin.err += 2.0;
    (cos, sin)
}

fn fixed_point_sign(m: u32, num: &[BigInt], prec: u32) -> Option<Ordering> {
    let bits = prec + 32;
    let n = num.len();
    // powers z^k = (re_k, im_k) with complex error e_k ulps
    let mut re: Vec<BigInt> = Vec::with_capacity(n);
    let mut errs: Vec<f64> = Vec::with_capacity(n);
    let one = BigInt::from(1) << bits;
    match m {
        1 => {
            re.push(one);
            errs.push(0.0);
        }
        2 => {
            re.push(one.clone());
            errs.push(0.0);
            if n > 1 {
                re.push(-one);
                errs.push(0.0);
            }
        }
        _ => {
            let (c, s) = cos_sin(m, bits);
            let e1 = c.err + s.err;
            let eps = 2f64.powi(-(bits as i32));
            let mut zr = one.clone();
            let mut zi = BigInt::zero();
            let mut e = 0.0f64;
            for _ in 0..n {
                re.push(zr.clone());
                errs.push(e);
                let nr = mul_fixed(&zr, &c.v, bits) - mul_fixed(&zi, &s.v, bits);
                let ni = mul_fixed(&zr, &s.v, bits) + mul_fixed(&zi, &c.v, bits);
                zr = nr;
                zi = ni;
                e = e * (1.0 + e1 * eps) * 1.0001 + e1 + 4.0;
            }
        }
    }
    let mut sum = BigInt::zero();
    let mut bound = BigInt::zero();
    for (k, c) in num.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        sum += c * &re[k];
        bound += c.abs() * BigInt::from(errs[k].ceil() as u64 + 1);
    }
    if sum.abs() > bound {
        Some(match sum.sign() {
            Sign::Plus => Ordering::Greater,
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
        })
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn pi_digits() {
        let p = pi(128);
        let approx = p.v.to_f64().unwrap() / 2f64.powi(128);
        assert!((approx - std::f64::consts::PI).abs() < 1e-15);
        assert!(p.err < 1000.0);
    }

    #[test]
    fn fixed_point_agrees_with_float() {
        for m in 3..40u32 {
            for k in 0..m.min(12) {
                let mut v = vec![0i64; (k + 1) as usize];
                v[k as usize] = 1;
                let expect = (2.0 * std::f64::consts::PI * k as f64 / m as f64).cos();
                if expect.abs() < 1e-6 {
                    continue;
                }
                let got = fixed_point_sign(m, &ints(&v), 64).unwrap();
                assert_eq!(got, expect.partial_cmp(&0.0).unwrap(), "m={m} k={k}");
            }
        }
    }

    #[test]
    fn tiny_difference_needs_more_bits() {
        // (1-√2)^30 ≈ 3e-12 written as x - y√2 with √2 = ζ_8 - ζ_8^3.
        let mut a = [BigInt::from(1), BigInt::zero()];
        for _ in 1..30 {
            // (x + y√2)(1 + √2) = (x + 2y) + (x + y)√2
            let x = a[0].clone() + &a[1] * 2;
            let y = a[0].clone() + &a[1];
            a = [x, y];
        }
        let (x, y) = (a[0].clone() + &a[1] * 2, a[0].clone() + &a[1]);
        // (1-√2)^30 = x - y√2 > 0 (even power); x - y√2 is the tiny number.
        let num = vec![x, -y.clone(), BigInt::zero(), y];
        assert_eq!(float_sign(8, &num), None);
        assert_eq!(sign_of_real_part(8, &num), Ordering::Greater);
        let neg: Vec<BigInt> = num.iter().map(|c| -c).collect();
        assert_eq!(sign_of_real_part(8, &neg), Ordering::Less);
    }
}
