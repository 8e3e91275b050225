//! Exact scalars and closed rational intervals.
//!
//! Every certified quantity in the crate is carried as a [`RationalInterval`]
//! with exact rational endpoints. The elementary operations are exact; the
//! evaluators in [`crate::genfun`] additionally round endpoints *outward* to
//! dyadic rationals (see [`Precision`]) so that denominators stay bounded while
//! the enclosure property is preserved.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact nonnegative count.
pub type BigCount = BigUint;

/// Exact rational in lowest terms with positive denominator.
pub type ExactRational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("interval lower endpoint {lo} exceeds upper endpoint {hi}")]
    Inverted { lo: String, hi: String },
    #[error("division by an interval containing zero")]
    DivisionByZero,
    #[error("interval too wide to determine {digits} fraction digits")]
    TooWide { digits: u32 },
    #[error("cannot parse decimal {0:?}")]
    BadDecimal(String),
    #[error("square root of a negative quantity")]
    NegativeSqrt,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `2^-bits` as an exact rational.
pub fn pow2_neg(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits as usize)
}

/// `10^-digits` as an exact rational.
pub fn pow10_neg(digits: u32) -> BigRational {
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), digits as usize))
}

/// Parses a plain decimal literal such as `-1.794` or `36.6` exactly.
pub fn parse_decimal(s: &str) -> Result<BigRational, NumericsError> {
    let bad = || NumericsError::BadDecimal(s.to_string());
    let trimmed = s.trim();
    let (neg, body) = match trimmed.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, trimmed.strip_prefix('+').unwrap_or(trimmed)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let value = BigRational::new(numer, denom);
    Ok(if neg { -value } else { value })
}

/// Parses either `p/q` or a decimal literal.
pub fn parse_rational(s: &str) -> Result<BigRational, NumericsError> {
    match s.split_once('/') {
        Some((p, q)) => {
            let bad = || NumericsError::BadDecimal(s.to_string());
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => parse_decimal(s),
    }
}

/// `p/q` (or `p` for integers).
pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Upper bound for `sqrt(x)` with resolution `2^-bits`.
pub fn sqrt_upper(x: &BigRational, bits: u32) -> Result<BigRational, NumericsError> {
    if x.is_negative() {
        return Err(NumericsError::NegativeSqrt);
    }
    let scaled = (x * int(BigInt::one() << (2 * bits as usize))).ceil().to_integer();
    let mut s = scaled.sqrt();
    if &s * &s < scaled {
        s += 1;
    }
    Ok(BigRational::new(s, BigInt::one() << bits as usize))
}

/// Lower bound for `sqrt(x)` with resolution `2^-bits`.
pub fn sqrt_lower(x: &BigRational, bits: u32) -> Result<BigRational, NumericsError> {
    if x.is_negative() {
        return Err(NumericsError::NegativeSqrt);
    }
    let scaled = (x * int(BigInt::one() << (2 * bits as usize))).floor().to_integer();
    Ok(BigRational::new(scaled.sqrt(), BigInt::one() << bits as usize))
}

/// Working precision of an interval evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Keep every endpoint exact.
    Exact,
    /// Round endpoints outward to multiples of `2^-bits` after each step.
    Bits(u32),
}

impl Precision {
    /// Number of binary digits needed to resolve `10^-digits`, plus `guard` bits.
    pub fn for_digits(digits: u32, guard: u32) -> Self {
        // log2(10) < 3.33
        Precision::Bits((digits as u64 * 333 / 100 + 1) as u32 + guard)
    }

    pub fn fix(self, x: RationalInterval) -> RationalInterval {
        match self {
            Precision::Exact => x,
            Precision::Bits(bits) => x.round_outward(bits),
        }
    }
}

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

impl fmt::Debug for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self, NumericsError> {
        if lo > hi {
            return Err(NumericsError::Inverted { lo: format_rational(&lo), hi: format_rational(&hi) });
        }
        Ok(Self { lo, hi })
    }

    /// Builds an interval from two endpoints in either order.
    pub fn hull_of(a: BigRational, b: BigRational) -> Self {
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn from_int(n: i64) -> Self {
        Self::point(int(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `[c - r, c + r]`.
    pub fn ball(center: &BigRational, radius: &BigRational) -> Self {
        let r = radius.abs();
        Self { lo: center - &r, hi: center + &r }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn into_bounds(self) -> (BigRational, BigRational) {
        (self.lo, self.hi)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Certified sign: `Some` only when every point shares it.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// `(lo + hi) / 2` and `hi - lo`.
    pub fn midpoint_width(&self) -> (BigRational, BigRational) {
        ((&self.lo + &self.hi) / int(2), &self.hi - &self.lo)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        self.midpoint_width().0
    }

    /// Largest absolute value attained on the interval.
    pub fn mag(&self) -> BigRational {
        std::cmp::max(self.lo.abs(), self.hi.abs())
    }

    /// Smallest absolute value attained on the interval.
    pub fn mig(&self) -> BigRational {
        if self.contains_zero() {
            BigRational::zero()
        } else {
            std::cmp::min(self.lo.abs(), self.hi.abs())
        }
    }

    pub fn abs(&self) -> Self {
        Self { lo: self.mig(), hi: self.mag() }
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: std::cmp::min(&self.lo, &other.lo).clone(),
            hi: std::cmp::max(&self.hi, &other.hi).clone(),
        }
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = std::cmp::max(&self.lo, &other.lo).clone();
        let hi = std::cmp::min(&self.hi, &other.hi).clone();
        (lo <= hi).then_some(Self { lo, hi })
    }

    /// Widens by `r` on both sides.
    pub fn widen(&self, r: &BigRational) -> Self {
        let r = r.abs();
        Self { lo: &self.lo - &r, hi: &self.hi + &r }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::hull_of(&self.lo * c, &self.hi * c)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if !self.lo.is_negative() && !other.lo.is_negative() {
            return Self { lo: &self.lo * &other.lo, hi: &self.hi * &other.hi };
        }
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        Self { lo, hi }
    }

    pub fn recip(&self) -> Result<Self, NumericsError> {
        if self.contains_zero() {
            return Err(NumericsError::DivisionByZero);
        }
        Ok(Self { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, other: &Self) -> Result<Self, NumericsError> {
        Ok(self.mul(&other.recip()?))
    }

    /// Exact `x^n`, tight for every sign configuration.
    pub fn pow(&self, n: u64) -> Self {
        self.pow_with(n, Precision::Exact)
    }

    /// `x^n` by square-and-multiply on the magnitude, rounding each step.
    pub fn pow_with(&self, n: u64, prec: Precision) -> Self {
        if n == 0 {
            return Self::one();
        }
        let m = self.abs();
        let mut base = m;
        let mut acc = Self::one();
        let mut e = n;
        loop {
            if e & 1 == 1 {
                acc = prec.fix(acc.mul(&base));
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = prec.fix(base.mul(&base));
        }
        // acc encloses |x|^n over the interval; restore signs.
        if n.is_multiple_of(2) || !self.lo.is_negative() {
            acc
        } else if !self.hi.is_positive() {
            acc.neg()
        } else {
            // odd power of a sign-straddling interval: [-|lo|^n, hi^n]
            let neg = prec.fix(Self::point(self.lo.abs()).pow_with(n, prec).neg());
            let pos = prec.fix(Self::point(self.hi.clone()).pow_with(n, prec));
            Self { lo: neg.lo, hi: pos.hi }
        }
    }

    pub fn neg(&self) -> Self {
        Self { lo: -&self.hi, hi: -&self.lo }
    }

    /// Rounds `lo` down and `hi` up to multiples of `2^-bits`.
    pub fn round_outward(&self, bits: u32) -> Self {
        let scale = int(BigInt::one() << bits as usize);
        let denom = BigInt::one() << bits as usize;
        let round = |x: &BigRational, up: bool| -> BigRational {
            // already a multiple of 2^-bits
            if is_pow2(x.denom()) && x.denom().bits() <= bits as u64 + 1 {
                return x.clone();
            }
            let s = x * &scale;
            let n = if up { s.ceil() } else { s.floor() };
            BigRational::new(n.to_integer(), denom.clone())
        };
        Self { lo: round(&self.lo, false), hi: round(&self.hi, true) }
    }

    /// Decimal string with `digits` fraction digits (round half away from
    /// zero), valid for every point of the interval.
    pub fn decimal_render(&self, digits: u32) -> Result<String, NumericsError> {
        let scale = int(num_traits::pow(BigInt::from(10), digits as usize));
        let round = |x: &BigRational| {
            let m = (x.abs() * &scale + rat(1, 2)).floor().to_integer();
            if x.is_negative() { -m } else { m }
        };
        let a = round(&self.lo);
        let b = round(&self.hi);
        if a != b {
            return Err(NumericsError::TooWide { digits });
        }
        Ok(render_scaled(&a, digits))
    }
}

fn is_pow2(n: &BigInt) -> bool {
    n.is_positive() && (n & (n - BigInt::one())).is_zero()
}

/// Renders `n / 10^digits` as a decimal literal.
fn render_scaled(n: &BigInt, digits: u32) -> String {
    let sign = if n.sign() == Sign::Minus { "-" } else { "" };
    let mut s = n.abs().to_string();
    let digits = digits as usize;
    if digits == 0 {
        return format!("{sign}{s}");
    }
    if s.len() <= digits {
        s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
    }
    let (whole, frac) = s.split_at(s.len() - digits);
    format!("{sign}{whole}.{frac}")
}

impl Add for &RationalInterval {
    type Output = RationalInterval;
    fn add(self, rhs: Self) -> RationalInterval {
        RationalInterval::add(self, rhs)
    }
}

impl Sub for &RationalInterval {
    type Output = RationalInterval;
    fn sub(self, rhs: Self) -> RationalInterval {
        RationalInterval::sub(self, rhs)
    }
}

impl Mul for &RationalInterval {
    type Output = RationalInterval;
    fn mul(self, rhs: Self) -> RationalInterval {
        RationalInterval::mul(self, rhs)
    }
}

impl Neg for &RationalInterval {
    type Output = RationalInterval;
    fn neg(self) -> RationalInterval {
        RationalInterval::neg(self)
    }
}

impl From<BigRational> for RationalInterval {
    fn from(x: BigRational) -> Self {
        Self::point(x)
    }
}

/// Rectangle `re + i·im` in the complex plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: RationalInterval,
    pub im: RationalInterval,
}

impl ComplexInterval {
    pub fn new(re: RationalInterval, im: RationalInterval) -> Self {
        Self { re, im }
    }

    pub fn point(re: BigRational, im: BigRational) -> Self {
        Self { re: RationalInterval::point(re), im: RationalInterval::point(im) }
    }

    pub fn real(x: RationalInterval) -> Self {
        Self { re: x, im: RationalInterval::zero() }
    }

    pub fn one() -> Self {
        Self::real(RationalInterval::one())
    }

    pub fn fix(&self, prec: Precision) -> Self {
        Self { re: prec.fix(self.re.clone()), im: prec.fix(self.im.clone()) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { re: self.re.add(&other.re), im: self.im.add(&other.im) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { re: self.re.sub(&other.re), im: self.im.sub(&other.im) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            re: self.re.mul(&other.re).sub(&self.im.mul(&other.im)),
            im: self.re.mul(&other.im).add(&self.im.mul(&other.re)),
        }
    }

    /// Squared modulus; tighter than `mul` with the conjugate.
    pub fn norm_sqr(&self) -> RationalInterval {
        self.re.pow(2).add(&self.im.pow(2))
    }

    pub fn div(&self, other: &Self) -> Result<Self, NumericsError> {
        let den = other.norm_sqr();
        let num = Self {
            re: self.re.mul(&other.re).add(&self.im.mul(&other.im)),
            im: self.im.mul(&other.re).sub(&self.re.mul(&other.im)),
        };
        Ok(Self { re: num.re.div(&den)?, im: num.im.div(&den)? })
    }

    pub fn pow_with(&self, n: u64, prec: Precision) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).fix(prec);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).fix(prec);
            }
        }
        acc
    }

    /// Certified `[min |z|, max |z|]` with resolution `2^-bits`.
    pub fn modulus(&self, bits: u32) -> Result<RationalInterval, NumericsError> {
        let lo2 = self.re.mig().pow(2) + self.im.mig().pow(2);
        let hi2 = self.re.mag().pow(2) + self.im.mag().pow(2);
        RationalInterval::new(sqrt_lower(&lo2, bits)?, sqrt_upper(&hi2, bits)?)
    }
}

/// Enclosure of `ln 2` of width at most `10^-digits`, from
/// `ln 2 = 2 atanh(1/3) = 2 Σ 3^-(2k+1) / (2k+1)`.
pub fn ln2_enclosure(digits: u32) -> RationalInterval {
    let target = pow10_neg(digits);
    let ninth = rat(1, 9);
    let mut power = rat(1, 3); // 3^-(2k+1)
    let mut sum = BigRational::zero();
    let mut k: i64 = 0;
    loop {
        sum += int(2) * &power / int(2 * k + 1);
        power *= &ninth;
        k += 1;
        // tail ≤ 2·3^-(2k+1)/(2k+1) · 1/(1 - 1/9)
        let tail = rat(9, 4) * &power / int(2 * k + 1);
        if tail <= target {
            let bits = Precision::for_digits(digits, 8);
            let enclosure = RationalInterval { lo: sum.clone(), hi: sum + tail };
            return bits.fix(enclosure);
        }
    }
}

/// `floor(log2(x))` for positive `x`, used to size precisions.
pub fn floor_log2(x: &BigRational) -> i64 {
    debug_assert!(x.is_positive());
    let n = x.numer().bits() as i64;
    let d = x.denom().bits() as i64;
    let mut e = n - d;
    // adjust: 2^e ≤ x < 2^(e+1)
    let two = int(2);
    let pow = |e: i64| if e >= 0 { num_traits::pow(two.clone(), e as usize) } else { num_traits::pow(two.clone(), (-e) as usize).recip() };
    while pow(e) > *x {
        e -= 1;
    }
    while pow(e + 1) <= *x {
        e += 1;
    }
    e
}

/// Smallest `d ≥ 0` with `10^-d ≤ x` (for positive `x`).
pub fn digits_resolving(x: &BigRational) -> u32 {
    let mut d = 0u32;
    let mut p = BigRational::one();
    let ten = int(10);
    while &p > x {
        p /= &ten;
        d += 1;
    }
    d
}

/// Lossy view of a rational, for logging and heuristics only.
pub fn approx_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Floor of a nonnegative rational as an unsigned integer.
pub fn floor_biguint(x: &BigRational) -> Option<BigUint> {
    x.floor().to_integer().to_biguint()
}

/// Exact `gcd`-normalised check used by invariants.
pub fn is_normalised(x: &BigRational) -> bool {
    x.denom().is_positive() && x.numer().gcd(x.denom()).is_one()
}
