//! Wigner 3j and 6j symbols, evaluated with Racah's single-sum formulas in
//! exact rational arithmetic and rounded to `f64` once at the end.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// Integer or half-integer quantum number, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// Multiplicity 2j+1.
    pub fn multiplicity(self) -> usize {
        (self.0 + 1).max(0) as usize
    }

    /// Projections -j, -j+1, ..., j.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> + Clone {
        let j = self.0;
        (-j..=j).step_by(2).map(HalfInt)
    }

    /// Values |a-b|, |a-b|+1, ..., a+b.
    pub fn couplings(a: HalfInt, b: HalfInt) -> impl Iterator<Item = HalfInt> + Clone {
        ((a.0 - b.0).abs()..=a.0 + b.0).step_by(2).map(HalfInt)
    }

    /// `true` when `m` is a valid projection of `self`.
    pub fn admits(self, m: HalfInt) -> bool {
        m.0.abs() <= self.0 && (self.0 - m.0) % 2 == 0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not an integer or half-integer: {s:?}"));
        match s.split_once('/') {
            Some((num, "2")) => {
                let n: i32 = num.trim().parse().map_err(|_| bad())?;
                if n % 2 == 0 {
                    Err(bad())
                } else {
                    Ok(HalfInt(n))
                }
            }
            Some(_) => Err(bad()),
            None => s.parse::<i32>().map(HalfInt::int).map_err(|_| bad()),
        }
    }
}

/// (-1)^(twice/2); `twice` must be even.
pub(crate) fn phase(twice: i32) -> f64 {
    debug_assert!(twice % 2 == 0, "half-integer phase exponent {twice}/2");
    if (twice / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

const FACT_MAX: usize = 256;

static FACTORIALS: Lazy<Vec<BigInt>> = Lazy::new(|| {
    let mut v = Vec::with_capacity(FACT_MAX);
    v.push(BigInt::one());
    for n in 1..FACT_MAX {
        let next = &v[n - 1] * BigInt::from(n);
        v.push(next);
    }
    v
});

fn fact(n: i32) -> &'static BigInt {
    assert!(
        n >= 0 && (n as usize) < FACT_MAX,
        "factorial argument {n} out of range"
    );
    &FACTORIALS[n as usize]
}

/// Triangle coefficient Δ(abc) from twice-values; `None` when the triad fails.
fn triangle(a: i32, b: i32, c: i32) -> Option<BigRational> {
    if c < (a - b).abs() || c > a + b || (a + b + c) % 2 != 0 {
        return None;
    }
    let num = fact((a + b - c) / 2) * fact((a - b + c) / 2) * fact((-a + b + c) / 2);
    let den = fact((a + b + c) / 2 + 1).clone();
    Some(BigRational::new(num, den))
}

/// sign(S) * sqrt(S^2 * P) rounded once.
fn finish(sum: BigRational, radicand: BigRational, sign: f64) -> f64 {
    if sum.is_zero() {
        return 0.0;
    }
    let sq = (&sum * &sum * radicand).to_f64().unwrap_or(f64::NAN);
    let s = if sum.is_negative() { -sign } else { sign };
    s * sq.sqrt()
}

type Cache = RwLock<HashMap<[i32; 6], f64>>;

static CACHE_3J: Lazy<Cache> = Lazy::new(|| RwLock::new(HashMap::new()));
static CACHE_6J: Lazy<Cache> = Lazy::new(|| RwLock::new(HashMap::new()));

fn cached(cache: &Cache, key: [i32; 6], eval: impl FnOnce() -> f64) -> f64 {
    if let Some(v) = cache.read().unwrap().get(&key) {
        return *v;
    }
    let v = eval();
    cache.write().unwrap().insert(key, v);
    v
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
pub fn wigner3j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<f64> {
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        if j.0 < 0 {
            return Err(Error::InvalidArgument(format!(
                "negative angular momentum {j}"
            )));
        }
        if (j.0 - m.0) % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "projection {m} has the wrong parity for j = {j}"
            )));
        }
    }
    // |m| > j is a selection failure like the two below, not malformed input.
    if m1.0.abs() > j1.0 || m2.0.abs() > j2.0 || m3.0.abs() > j3.0 || m1.0 + m2.0 + m3.0 != 0 {
        return Ok(0.0);
    }
    if triangle(j1.0, j2.0, j3.0).is_none() {
        return Ok(0.0);
    }
    let key = [j1.0, j2.0, j3.0, m1.0, m2.0, m3.0];
    Ok(cached(&CACHE_3J, key, || racah_3j(key)))
}

fn racah_3j([j1, j2, j3, m1, m2, m3]: [i32; 6]) -> f64 {
    // All factorial arguments below are (twice-value combinations)/2.
    let h = |x: i32| x / 2;
    let tri = triangle(j1, j2, j3).expect("checked by caller");
    let mut radicand = tri;
    radicand *= BigRational::from_integer(
        fact(h(j1 + m1))
            * fact(h(j1 - m1))
            * fact(h(j2 + m2))
            * fact(h(j2 - m2))
            * fact(h(j3 + m3))
            * fact(h(j3 - m3)),
    );
    let kmin = 0.max(h(j2 - j3 - m1)).max(h(j1 - j3 + m2));
    let kmax = h(j1 + j2 - j3).min(h(j1 - m1)).min(h(j2 + m2));
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = fact(k)
            * fact(h(j3 - j2 + m1) + k)
            * fact(h(j3 - j1 - m2) + k)
            * fact(h(j1 + j2 - j3) - k)
            * fact(h(j1 - m1) - k)
            * fact(h(j2 + m2) - k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    finish(sum, radicand, phase(j1 - j2 - m3))
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}.
pub fn wigner6j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
) -> Result<f64> {
    let js = [j1.0, j2.0, j3.0, j4.0, j5.0, j6.0];
    if let Some(j) = js.iter().find(|j| **j < 0) {
        return Err(Error::InvalidArgument(format!(
            "negative angular momentum {}",
            HalfInt(*j)
        )));
    }
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    for (a, b, c) in triads {
        if (a.0 + b.0 + c.0) % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "triad ({a}, {b}, {c}) has a half-integer sum"
            )));
        }
    }
    if triads
        .iter()
        .any(|(a, b, c)| triangle(a.0, b.0, c.0).is_none())
    {
        return Ok(0.0);
    }
    Ok(cached(&CACHE_6J, js, || racah_6j(js)))
}

fn racah_6j([j1, j2, j3, j4, j5, j6]: [i32; 6]) -> f64 {
    let h = |x: i32| x / 2;
    let mut radicand = BigRational::one();
    for (a, b, c) in [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)] {
        radicand *= triangle(a, b, c).expect("checked by caller");
    }
    let a = [
        h(j1 + j2 + j3),
        h(j1 + j5 + j6),
        h(j4 + j2 + j6),
        h(j4 + j5 + j3),
    ];
    let b = [
        h(j1 + j2 + j4 + j5),
        h(j2 + j3 + j5 + j6),
        h(j3 + j1 + j6 + j4),
    ];
    let tmin = *a.iter().max().unwrap();
    let tmax = *b.iter().min().unwrap();
    let mut sum = BigRational::zero();
    for t in tmin..=tmax {
        let den = a.iter().map(|ai| fact(t - ai)).product::<BigInt>()
            * b.iter().map(|bi| fact(bi - t)).product::<BigInt>();
        let term = BigRational::new(fact(t + 1).clone(), den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    finish(sum, radicand, 1.0)
}

/// Clebsch–Gordan coefficient ⟨j1 m1; j2 m2 | J M⟩ (Condon–Shortley).
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<f64> {
    let w = wigner3j(j1, j2, j, m1, m2, -m)?;
    Ok(phase(j1.0 - j2.0 + m.0) * ((j.0 + 1) as f64).sqrt() * w)
}
