use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;

/// Integer coefficients (lowest degree first) of the `m`-th cyclotomic
/// polynomial.
///
/// Uses the product formula `Φ_m(x) = ∏_{d | m} (1 - x^d)^{μ(m/d)}` (valid for
/// `m > 1`), evaluated as a power series truncated at degree `φ(m)`.
pub fn cyclotomic_polynomial(m: u32) -> Vec<i64> {
    assert!(m >= 1, "cyclotomic polynomial needs m >= 1");
    if m == 1 {
        return vec![-1, 1];
    }
    let deg = euler_phi(m) as usize;
    let mut series = vec![0i128; deg + 1];
    series[0] = 1;
    let divisors: Vec<u32> = (1..=m).filter(|d| m.is_multiple_of(*d)).collect();
    for &d in &divisors {
        let d = d as usize;
        match mobius(m / d as u32) {
            1 => {
                // multiply by (1 - x^d)
                for i in (d..=deg).rev() {
                    series[i] -= series[i - d];
                }
            }
            -1 => {
                // multiply by 1 / (1 - x^d) = 1 + x^d + x^2d + ...
                for i in d..=deg {
                    series[i] += series[i - d];
                }
            }
            _ => {}
        }
    }
    series
        .into_iter()
        .map(|c| i64::try_from(c).expect("cyclotomic coefficient overflow"))
        .collect()
}

pub fn euler_phi(m: u32) -> u32 {
    factorize(m)
        .into_iter()
        .fold(1, |acc, (p, e)| acc * (p - 1) * p.pow(e - 1))
}

pub(crate) fn factorize(mut m: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn mobius(m: u32) -> i32 {
    let f = factorize(m);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

pub(crate) fn units(m: u32) -> impl Iterator<Item = u32> {
    (1..=m.max(1)).filter(move |&j| j.gcd(&m) == 1 && (j < m || m == 1))
}

/// Precomputed data for `Q(ζ_m)`.
#[derive(Debug)]
pub(crate) struct CycField {
    pub m: u32,
    pub phi: usize,
    /// `Φ_m`, monic, lowest degree first.
    pub cyclo: Vec<i64>,
    /// Nonzero `(i, c_i)` of `Φ_m` below the leading term.
    pub tail: Vec<(usize, i64)>,
    /// `x^e mod Φ_m` for `e` in `0..m`.
    pub powers: Vec<Vec<i64>>,
}

impl CycField {
    fn new(m: u32) -> Self {
        let cyclo = cyclotomic_polynomial(m);
        let phi = cyclo.len() - 1;
        let tail: Vec<(usize, i64)> = cyclo[..phi]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        let mut powers = Vec::with_capacity(m as usize);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        if phi == 0 {
            unreachable!("phi(m) >= 1");
        }
        for _ in 0..m {
            powers.push(cur.clone());
            // cur <- x * cur mod Φ_m
            let top = cur[phi - 1];
            for i in (1..phi).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for &(i, c) in &tail {
                    cur[i] = cur[i]
                        .checked_sub(top.checked_mul(c).expect("power table overflow"))
                        .expect("power table overflow");
                }
            }
        }
        CycField {
            m,
            phi,
            cyclo,
            tail,
            powers,
        }
    }
}

static FIELDS: OnceLock<RwLock<HashMap<u32, Arc<CycField>>>> = OnceLock::new();

/// Shared, immutable field data for conductor `m`.
pub(crate) fn field(m: u32) -> Arc<CycField> {
    assert!(m >= 1, "conductor must be positive");
    let cache = FIELDS.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(f) = cache.read().unwrap().get(&m) {
        return f.clone();
    }
    let built = Arc::new(CycField::new(m));
    cache
        .write()
        .unwrap()
        .entry(m)
        .or_insert(built)
        .clone()
}
