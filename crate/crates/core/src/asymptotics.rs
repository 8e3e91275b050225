//! Poles, residues and the two-term asymptotic expansion
//! `c(n) = R ρ^(n+1) + R₂ ρ₂^(n+1) + ε R₃ r₃^n` with `|ε| ≤ 1`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::counting::{big_json, count_trees_upto, CountingError};
use crate::genfun::{bracket_u64, certified_sums, choose_terms, eval_d_certified, GenfunError};
use crate::numerics::{
    format_rational, int, ln2_enclosure, parse_decimal, pow10_neg, pow2_neg, rat, BigCount, ComplexInterval,
    ExactRational, NumericsError, Precision, RationalInterval,
};

/// Alphabet sizes with certified pole isolation.
pub const T_MIN: u32 = 2;
pub const T_MAX: u32 = 40;

const GRID_POINTS: usize = 512;
const GRID_REFINEMENTS: u32 = 2;
const SIGN_DIGITS_START: u32 = 6;
const SIGN_DIGITS_CAP: u32 = 1200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsymptoticsError {
    #[error("t = {0} is outside the supported range {T_MIN}..={T_MAX}")]
    UnsupportedT(u32),
    #[error("closed-form predictions need t >= 16, got {0}")]
    PredictionRange(u32),
    #[error("digits must be at least 1")]
    NoDigits,
    #[error("sign-change count {found} != 2 for t = {t}")]
    SignChanges { t: u32, found: usize },
    #[error("cannot certify the sign of D at q = {at}")]
    CannotCertifySign { at: String },
    #[error("enclosure of D' contains 0")]
    DerivativeContainsZero,
    #[error("residue enclosure too wide for {digits} digits")]
    ResidueTooWide { digits: u32 },
    #[error("ordering rho > rho2 > r3 > 1 not certified for t = {0}")]
    Ordering(u32),
    #[error(transparent)]
    Genfun(#[from] GenfunError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Counting(#[from] CountingError),
}

fn check_range(t: u32) -> Result<(), AsymptoticsError> {
    if (T_MIN..=T_MAX).contains(&t) {
        Ok(())
    } else {
        Err(AsymptoticsError::UnsupportedT(t))
    }
}

/// `(t, r₃, R₃)` as printed for small alphabets.
const ENVELOPE_TABLE: [(u32, &str, &str); 14] = [
    (2, "1.123", "36.6"),
    (3, "1.098", "39.0"),
    (4, "1.083", "58.4"),
    (5, "1.074", "70.7"),
    (6, "1.068", "50.0"),
    (7, "1.063", "59.6"),
    (8, "1.059", "48.1"),
    (9, "1.056", "24.0"),
    (10, "1.053", "19.7"),
    (11, "1.050", "20.1"),
    (12, "1.047", "26.6"),
    (13, "1.044", "80.6"),
    (14, "1.042", "43.3"),
    (15, "1.040", "39.0"),
];

/// Upper bound for `1 + L/t - (L - L²)/(2t²)` with `L = ln 2`; the expression
/// increases with `L`, so the upper end of an enclosure of `L` suffices.
fn r3_formula(t: u32) -> ExactRational {
    let l = ln2_enclosure(30).hi().clone();
    let t = int(t);
    let value = BigRational::one() + &l / &t - (&l - &l * &l) / (int(2) * &t * &t);
    RationalInterval::point(value).round_outward(64).hi().clone()
}

/// `(r₃, R₃)` for the error envelope.
pub fn envelope(t: u32) -> Result<(ExactRational, ExactRational), AsymptoticsError> {
    check_range(t)?;
    if let Some(&(_, r3, big_r3)) = ENVELOPE_TABLE.iter().find(|row| row.0 == t) {
        return Ok((parse_decimal(r3)?, parse_decimal(big_r3)?));
    }
    Ok((r3_formula(t), int(5u64 * (t as u64).pow(4))))
}

/// Certified sign of `D(q)`, raising the working precision until the
/// enclosure excludes zero. Returns the sign and the digits used.
fn certified_sign(t: u32, q: &ExactRational, start: u32) -> Result<(Ordering, u32), AsymptoticsError> {
    let point = RationalInterval::point(q.clone());
    let mut digits = start.max(SIGN_DIGITS_START);
    loop {
        let d = eval_d_certified(t, &point, digits)?;
        if let Some(sign) = d.sign() {
            if sign != Ordering::Equal {
                return Ok((sign, digits));
            }
        }
        if digits >= SIGN_DIGITS_CAP {
            return Err(AsymptoticsError::CannotCertifySign { at: format_rational(q) });
        }
        digits = (digits * 2).min(SIGN_DIGITS_CAP);
    }
}

fn scan_grid(lo: &ExactRational, hi: &ExactRational, points: usize) -> Vec<ExactRational> {
    // dyadic step, at most (hi - lo)/points
    let step_bits = 24 + points.ilog2() as usize;
    let scale = int(BigInt::one() << step_bits);
    let step = ((hi - lo) * &scale / int(points as u64)).floor() / &scale;
    let mut grid: Vec<ExactRational> = (0..points).map(|i| lo + &step * int(i as u64)).collect();
    grid.push(hi.clone());
    grid
}

fn bisect(
    t: u32,
    mut a: ExactRational,
    mut b: ExactRational,
    sign_a: Ordering,
    digits: u32,
) -> Result<RationalInterval, AsymptoticsError> {
    let target = pow10_neg(digits);
    let mut level = SIGN_DIGITS_START;
    while &b - &a > target {
        let mid = (&a + &b) / int(2);
        let (sign, used) = certified_sign(t, &mid, level)?;
        level = used;
        if sign == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(RationalInterval::new(a, b)?)
}

/// Enclosures `q1 ∋ 1/ρ` and `q2 ∋ 1/ρ₂`, each of width at most `10^-digits`.
///
/// Scans the certified sign of `D` on a grid over `[1/2, 1/r₃]`, demands
/// exactly two sign changes, then bisects each bracket.
pub fn isolate_poles(t: u32, digits: u32) -> Result<(RationalInterval, RationalInterval), AsymptoticsError> {
    check_range(t)?;
    if digits == 0 {
        return Err(AsymptoticsError::NoDigits);
    }
    let (r3, _) = envelope(t)?;
    let lo = rat(1, 2);
    let hi = r3.recip();
    let mut points = GRID_POINTS;
    let mut found = 0;
    for _ in 0..=GRID_REFINEMENTS {
        let grid = scan_grid(&lo, &hi, points);
        let signs: Vec<Ordering> = grid
            .par_iter()
            .map(|q| certified_sign(t, q, SIGN_DIGITS_START).map(|s| s.0))
            .collect::<Result<_, _>>()?;
        let changes: Vec<usize> = (1..grid.len()).filter(|&i| signs[i] != signs[i - 1]).collect();
        found = changes.len();
        if found == 2 {
            let brackets: Vec<(ExactRational, ExactRational, Ordering)> = changes
                .iter()
                .map(|&i| (grid[i - 1].clone(), grid[i].clone(), signs[i - 1]))
                .collect();
            let mut roots = brackets
                .into_par_iter()
                .map(|(a, b, s)| bisect(t, a, b, s, digits))
                .collect::<Result<Vec<_>, _>>()?;
            let q2 = roots.pop().unwrap();
            let q1 = roots.pop().unwrap();
            return Ok((q1, q2));
        }
        points *= 4;
    }
    Err(AsymptoticsError::SignChanges { t, found })
}

/// Enclosure of `R = -N(q₀)/D'(q₀)` over a pole enclosure `q`.
pub fn residue_constants(t: u32, q: &RationalInterval, digits: u32) -> Result<RationalInterval, AsymptoticsError> {
    check_range(t)?;
    let sums = certified_sums(t, q, digits + 4)?;
    if sums.derivative.contains_zero() {
        return Err(AsymptoticsError::DerivativeContainsZero);
    }
    let prec = Precision::for_digits(digits + 4, 16);
    let residue = prec.fix(sums.numerator.div(&sums.derivative)?.neg());
    if residue.width() > pow10_neg(digits) {
        return Err(AsymptoticsError::ResidueTooWide { digits });
    }
    Ok(residue)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymptoticConstants {
    pub t: u32,
    pub digits: u32,
    pub rho: RationalInterval,
    pub rho2: RationalInterval,
    pub big_r: RationalInterval,
    pub big_r2: RationalInterval,
    pub r3: ExactRational,
    pub big_r3: ExactRational,
}

/// Extra digits used when isolating poles, absorbed by the residue step.
const POLE_GUARD_DIGITS: u32 = 8;

/// All constants of the two-term expansion, certified to `digits` digits.
pub fn constants(t: u32, digits: u32) -> Result<AsymptoticConstants, AsymptoticsError> {
    check_range(t)?;
    let (q1, q2) = isolate_poles(t, digits + POLE_GUARD_DIGITS)?;
    let prec = Precision::for_digits(digits + POLE_GUARD_DIGITS, 16);
    let rho = prec.fix(q1.recip()?);
    let rho2 = prec.fix(q2.recip()?);
    let big_r = residue_constants(t, &q1, digits)?;
    let big_r2 = residue_constants(t, &q2, digits)?;
    let (r3, big_r3) = envelope(t)?;
    let ordered = rho.lo() > rho2.hi() && rho2.lo() > &r3 && r3 > BigRational::one();
    let positive = big_r.lo().is_positive() && big_r2.lo().is_positive() && big_r3.is_positive();
    if !ordered || !positive {
        return Err(AsymptoticsError::Ordering(t));
    }
    Ok(AsymptoticConstants { t, digits, rho, rho2, big_r, big_r2, r3, big_r3 })
}

/// Decimal rendering with as many of `digits` as the enclosure resolves.
fn render(x: &RationalInterval, digits: u32) -> String {
    (0..=digits)
        .rev()
        .find_map(|d| x.decimal_render(d).ok())
        .unwrap_or_else(|| x.to_string())
}

fn interval_json(x: &RationalInterval, digits: u32) -> Value {
    json!({
        "decimal": render(x, digits),
        "lo": format_rational(x.lo()),
        "hi": format_rational(x.hi()),
    })
}

/// Shortest decimal for a point, exact when it terminates within `digits`.
fn render_exact(x: &ExactRational, digits: u32) -> String {
    let point = RationalInterval::point(x.clone());
    let exact_at = (0..=digits).find(|&d| (x * int(BigInt::from(10).pow(d))).is_integer());
    render(&point, exact_at.unwrap_or(digits))
}

fn exact_json(x: &ExactRational, digits: u32) -> Value {
    json!({
        "decimal": render_exact(x, digits),
        "exact": format_rational(x),
    })
}

impl AsymptoticConstants {
    pub fn to_json(&self) -> Value {
        let d = self.digits;
        json!({
            "t": self.t,
            "digits": d,
            "rho": interval_json(&self.rho, d),
            "rho2": interval_json(&self.rho2, d),
            "R": interval_json(&self.big_r, d),
            "R2": interval_json(&self.big_r2, d),
            "r3": exact_json(&self.r3, d),
            "R3": exact_json(&self.big_r3, d),
        })
    }

    pub fn to_text(&self) -> String {
        let d = self.digits;
        format!(
            "t = {}\nrho = {}\nrho2 = {}\nR = {}\nR2 = {}\nr3 = {}\nR3 = {}\n",
            self.t,
            render(&self.rho, d),
            render(&self.rho2, d),
            render(&self.big_r, d),
            render(&self.big_r2, d),
            format_rational(&self.r3),
            format_rational(&self.big_r3),
        )
    }

    fn work_precision(&self, n: usize) -> Precision {
        let n_bits = usize::BITS - n.leading_zeros();
        Precision::for_digits(self.digits + POLE_GUARD_DIGITS, 32 + 2 * n_bits)
    }
}

/// Enclosure of `R ρ^(n+1) + R₂ ρ₂^(n+1)`.
pub fn approx_count(c: &AsymptoticConstants, n: usize) -> RationalInterval {
    let prec = c.work_precision(n);
    let e = n as u64 + 1;
    let main = c.big_r.mul(&c.rho.pow_with(e, prec));
    let second = c.big_r2.mul(&c.rho2.pow_with(e, prec));
    prec.fix(main.add(&second))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckRow {
    pub n: usize,
    pub count: BigCount,
    pub approx: RationalInterval,
    /// `R₃ r₃^n`.
    pub envelope: ExactRational,
    /// Upper bound for `|c(n) - approx| / envelope`.
    pub ratio: ExactRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymptoticCheckReport {
    pub t: u32,
    pub n_max: usize,
    pub rows: Vec<CheckRow>,
    pub worst_ratio: ExactRational,
    pub worst_n: usize,
    pub violations: Vec<usize>,
}

impl AsymptoticCheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                json!({
                    "n": row.n,
                    "count": big_json(&row.count),
                    "approx": { "lo": format_rational(row.approx.lo()), "hi": format_rational(row.approx.hi()) },
                    "envelope": format_rational(&row.envelope),
                    "ratio": format_rational(&row.ratio),
                })
            })
            .collect();
        json!({
            "t": self.t,
            "n_max": self.n_max,
            "worst_ratio": format_rational(&self.worst_ratio),
            "worst_n": self.worst_n,
            "violations": self.violations,
            "rows": rows,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("n\tc(n)\tapprox\tenvelope\tratio\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                row.n,
                row.count,
                render(&row.approx, 3),
                render(&RationalInterval::point(row.envelope.clone()), 3),
                render(&RationalInterval::point(row.ratio.clone()), 6),
            ));
        }
        out.push_str(&format!(
            "worst ratio {} at n = {}\n",
            render(&RationalInterval::point(self.worst_ratio.clone()), 6),
            self.worst_n
        ));
        for n in &self.violations {
            out.push_str(&format!("violation at n = {n}\n"));
        }
        out
    }
}

/// Compares exact counts with the two-term approximation for `n ≤ n_max`
/// and bounds each error relative to `R₃ r₃^n`.
///
/// `digits` is a floor: the constants are certified to at least enough digits
/// that the enclosure of `R ρ^(n+1)` stays far below the envelope at `n_max`.
pub fn verify_error_bound(t: u32, n_max: usize, digits: u32) -> Result<AsymptoticCheckReport, AsymptoticsError> {
    let c = constants(t, digits.max(check_digits(n_max)))?;
    Ok(check_against(&c, n_max)?)
}

/// ρ < 2 and r₃ > 1, so the relative error (n+1)·10^-d of ρ^(n+1) costs about
/// n·log10(2) + log10(n) digits against the envelope.
fn check_digits(n_max: usize) -> u32 {
    let n = n_max as f64 + 1.0;
    (n * 2f64.log10() + n.log10()).ceil() as u32 + 8
}

/// Same as [`verify_error_bound`] with precomputed constants.
pub fn check_against(c: &AsymptoticConstants, n_max: usize) -> Result<AsymptoticCheckReport, CountingError> {
    let counts = count_trees_upto(c.t, n_max)?;
    let mut envelope = c.big_r3.clone();
    let mut rows = Vec::with_capacity(n_max + 1);
    for (n, count) in counts.into_iter().enumerate() {
        let approx = approx_count(c, n);
        let exact = BigRational::from_integer(BigInt::from(count.clone()));
        let err = (&exact - approx.lo()).abs().max((&exact - approx.hi()).abs());
        let ratio = RationalInterval::point(err / &envelope).round_outward(64).hi().clone();
        rows.push(CheckRow { n, count, approx, envelope: envelope.clone(), ratio });
        envelope *= &c.r3;
    }
    let (worst_n, worst_ratio) = rows
        .iter()
        .map(|row| (row.n, row.ratio.clone()))
        .max_by(|a, b| a.1.cmp(&b.1))
        .unwrap_or((0, BigRational::zero()));
    let violations = rows.iter().filter(|row| row.ratio > BigRational::one()).map(|row| row.n).collect();
    Ok(AsymptoticCheckReport { t: c.t, n_max, rows, worst_ratio, worst_n, violations })
}

/// `center ± half_width`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub center: ExactRational,
    pub half_width: ExactRational,
}

impl Prediction {
    fn from_interval(x: &RationalInterval, eps: ExactRational) -> Self {
        let (center, radius) = x.midpoint_width();
        Self { center, half_width: eps + radius / int(2) }
    }

    pub fn interval(&self) -> RationalInterval {
        RationalInterval::ball(&self.center, &self.half_width)
    }

    pub fn contains(&self, x: &RationalInterval) -> bool {
        x.is_subset_of(&self.interval())
    }
}

/// Closed-form values for large alphabets, with their error terms as half-widths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormPrediction {
    pub t: u32,
    pub rho: Prediction,
    pub rho2: Prediction,
    pub r3: Prediction,
    pub big_r: Prediction,
    pub big_r2: Prediction,
    pub big_r3: Prediction,
}

fn poly(coeffs: &[i64], x: &RationalInterval) -> RationalInterval {
    coeffs.iter().rev().fold(RationalInterval::zero(), |acc, &c| acc.mul(x).add(&RationalInterval::from_int(c)))
}

pub fn closed_form_predictions(t: u32) -> Result<ClosedFormPrediction, AsymptoticsError> {
    if t < 16 {
        return Err(AsymptoticsError::PredictionRange(t));
    }
    let ti = RationalInterval::from_int(t as i64);
    let tr = int(t);
    let pow2 = |e: u32| pow2_neg(e);
    let l = ln2_enclosure(60);
    let one = RationalInterval::one();

    let rho = RationalInterval::from_int(2)
        .sub(&one.scale(&pow2(t + 1)))
        .sub(&poly(&[3, 1], &ti).scale(&pow2(2 * t + 3)))
        .sub(&poly(&[24, 19, 3], &ti).scale(&pow2(3 * t + 6)));
    let rho_eps = rat(28, 100) * tr.pow(3) * pow2(4 * t);

    let inv_t = tr.recip();
    let l_over = |k: i32| inv_t.pow(k);
    let rho2 = one
        .add(&l.scale(&l_over(1)))
        .sub(&poly(&[0, 1, -1], &l).scale(&(l_over(2) / int(2))))
        .add(&poly(&[0, 6, 3, 4], &l).scale(&(l_over(3) / int(24))))
        .add(&poly(&[0, -6, -27, 54, 2], &l).scale(&(l_over(4) / int(48))));
    let rho2_eps = rat(26, 100) * l_over(5);

    let r3 = RationalInterval::point(r3_formula(t));

    let big_r = RationalInterval::point(rat(1, 8))
        .add(&poly(&[-2, 1], &ti).scale(&pow2(t + 5)))
        .add(&poly(&[-5, 3, 2], &ti).scale(&pow2(2 * t + 7)))
        .add(&poly(&[-68, 20, 45, 9], &ti).scale(&pow2(3 * t + 10)));
    let big_r_eps = tr.pow(4) / int(50) * pow2(4 * t);

    let big_r2 = RationalInterval::point(inv_t.clone() / int(4)).sub(&poly(&[1, 4], &l).scale(&(l_over(2) / int(8))));
    let big_r2_eps = rat(77, 100) * l_over(3);

    let big_r3 = RationalInterval::point(int(5u64 * (t as u64).pow(4)));

    Ok(ClosedFormPrediction {
        t,
        rho: Prediction::from_interval(&rho, rho_eps),
        rho2: Prediction::from_interval(&rho2, rho2_eps),
        r3: Prediction::from_interval(&r3, BigRational::zero()),
        big_r: Prediction::from_interval(&big_r, big_r_eps),
        big_r2: Prediction::from_interval(&big_r2, big_r2_eps),
        big_r3: Prediction::from_interval(&big_r3, BigRational::zero()),
    })
}

impl ClosedFormPrediction {
    /// Whether certified constants fall inside every prediction interval.
    pub fn contains(&self, c: &AsymptoticConstants) -> bool {
        self.rho.contains(&c.rho)
            && self.rho2.contains(&c.rho2)
            && self.big_r.contains(&c.big_r)
            && self.big_r2.contains(&c.big_r2)
            && self.r3.contains(&RationalInterval::point(c.r3.clone()))
            && self.big_r3.contains(&RationalInterval::point(c.big_r3.clone()))
    }

    pub fn to_json(&self, digits: u32) -> Value {
        let entry = |p: &Prediction| {
            json!({
                "center": render_exact(&p.center, digits),
                "half_width": format!("{:e}", crate::numerics::approx_f64(&p.half_width)),
                "center_exact": format_rational(&p.center),
                "half_width_exact": format_rational(&p.half_width),
            })
        };
        json!({
            "t": self.t,
            "rho": entry(&self.rho),
            "rho2": entry(&self.rho2),
            "R": entry(&self.big_r),
            "R2": entry(&self.big_r2),
            "r3": entry(&self.r3),
            "R3": entry(&self.big_r3),
        })
    }
}

/// Result of sampling `|F|` on the circle `|q| = 1/r₃`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleSample {
    pub t: u32,
    pub points: usize,
    /// Largest certified upper bound of `|F(q)|` over the samples.
    pub max_upper: ExactRational,
    pub bound: ExactRational,
}

impl CircleSample {
    pub fn within_bound(&self) -> bool {
        self.max_upper <= self.bound
    }
}

/// Rational points on the circle of radius `radius`, from rational
/// approximations of `tan(θ/2)` via `((1-s²), 2s)/(1+s²)`.
fn circle_points(radius: &ExactRational, count: usize) -> Vec<(ExactRational, ExactRational)> {
    (0..count)
        .map(|k| {
            if 2 * k == count {
                return (-radius.clone(), BigRational::zero());
            }
            let theta = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
            let s = BigRational::new(BigInt::from(((theta / 2.0).tan() * 1048576.0).round() as i64), BigInt::from(1048576));
            let den = BigRational::one() + &s * &s;
            let re = (BigRational::one() - &s * &s) / &den;
            let im = int(2) * &s / &den;
            (re * radius, im * radius)
        })
        .collect()
}

/// Samples `|F(q)| ≤ R₃` at `count` points of `|q| = 1/r₃`. Not a proof for
/// the whole circle.
pub fn sample_circle_bound(t: u32, count: usize) -> Result<CircleSample, AsymptoticsError> {
    let (r3, big_r3) = envelope(t)?;
    let radius = r3.recip();
    let digits = 20;
    let (k, tail) = choose_terms(t, &radius, digits, false)?;
    let extra = bracket_u64(t, k).map_or(64, |b| 64 - b.leading_zeros());
    let prec = Precision::for_digits(digits + 4, 32 + extra);
    let bits = 96;
    let uppers = circle_points(&radius, count)
        .into_par_iter()
        .map(|(re, im)| {
            let q = ComplexInterval::point(re, im);
            let (num, den) = complex_partial_sums(t, &q, k, prec)?;
            let num_hi = num.modulus(bits)?.hi() + &tail.bound_n;
            let den_lo = den.modulus(bits)?.lo() - &tail.bound_d;
            if !den_lo.is_positive() {
                return Err(AsymptoticsError::CannotCertifySign { at: "circle sample".into() });
            }
            Ok(RationalInterval::point(num_hi / den_lo).round_outward(64).hi().clone())
        })
        .collect::<Result<Vec<_>, AsymptoticsError>>()?;
    let max_upper = uppers.into_iter().max().unwrap_or_default();
    Ok(CircleSample { t, points: count, max_upper, bound: big_r3 })
}

fn complex_partial_sums(
    t: u32,
    q: &ComplexInterval,
    k_terms: usize,
    prec: Precision,
) -> Result<(ComplexInterval, ComplexInterval), AsymptoticsError> {
    let zero = ComplexInterval::real(RationalInterval::zero());
    let (mut num, mut den) = (zero.clone(), zero);
    let mut prod = ComplexInterval::one();
    let mut power = ComplexInterval::one();
    for k in 0..k_terms {
        if k > 0 {
            power = power.pow_with(t as u64, prec).mul(q).fix(prec);
            let f = power.div(&ComplexInterval::one().sub(&power))?.fix(prec);
            prod = prod.mul(&f).fix(prec);
        }
        let term = power.mul(&prod).fix(prec);
        if k % 2 == 0 {
            num = num.add(&term);
            den = den.add(&prod);
        } else {
            num = num.sub(&term);
            den = den.sub(&prod);
        }
    }
    Ok((num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contains_decimal(x: &RationalInterval, s: &str) -> bool {
        x.widen(&pow10_neg(15)).contains(&parse_decimal(s).unwrap())
    }

    #[test]
    fn envelope_values() {
        assert_eq!(envelope(2).unwrap(), (rat(1123, 1000), rat(366, 10)));
        assert_eq!(envelope(20).unwrap().1, int(800000));
        assert!(envelope(1).is_err());
        assert!(envelope(41).is_err());
        let r3 = envelope(16).unwrap().0;
        assert!(r3 > rat(10429, 10000) && r3 < rat(10430, 10000));
    }

    #[test]
    fn poles_t2() {
        let (q1, q2) = isolate_poles(2, 20).unwrap();
        assert!(q1.width() <= pow10_neg(20));
        assert!(contains_decimal(&q1.recip().unwrap(), "1.794147187541686"));
        assert!(contains_decimal(&q2.recip().unwrap(), "1.279549134726681"));
    }

    #[test]
    fn residues_t2() {
        let c = constants(2, 16).unwrap();
        assert!(contains_decimal(&c.big_r, "0.1418532020854094"));
        assert!(c.big_r2.widen(&pow10_neg(13)).contains(&parse_decimal("0.0612410410312").unwrap()));
    }

    #[test]
    fn approx_f2_50() {
        let c = constants(2, 20).unwrap();
        let a = approx_count(&c, 49);
        // high-precision evaluation of the same expression from the rounded constants
        let reference = parse_decimal("699427308154.5972268980762984").unwrap();
        assert!(a.widen(&rat(1, 1000)).contains(&reference));
        assert!(a.width() < rat(1, 1000));
        assert_eq!(a.decimal_render(0).unwrap(), "699427308155");
    }

    #[test]
    fn prediction_shape() {
        assert!(closed_form_predictions(15).is_err());
        let p = closed_form_predictions(20).unwrap();
        assert_eq!(p.rho.half_width, rat(28, 100) * int(8000) * pow2_neg(80));
        let far = closed_form_predictions(200).unwrap();
        assert!((far.rho.center.clone() - int(2)).abs() < pow10_neg(50));
    }
}
