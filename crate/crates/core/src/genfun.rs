//! The generating function `F(q) = Σ c(n) q^n` in closed form.
//!
//! With `[k] = 1 + t + … + t^(k-1)` and `f_j(q) = q^[j] / (1 - q^[j])`,
//!
//! ```text
//! N(q) = Σ_k (-1)^k q^[k] Π_{j≤k} f_j(q),   D(q) = Σ_k (-1)^k Π_{j≤k} f_j(q),
//! ```
//!
//! and `F = N / D`. `N_K`, `D_K` denote the sums over `k < K`. This module
//! extracts exact coefficients, builds the height-refined bivariate series
//! `G_k(q, u)` (inner vertices, deepest leaves), and evaluates `N_K`, `D_K`,
//! `D'_K` over rational intervals with explicit tail bounds.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::numerics::{int, pow10_neg, BigCount, ExactRational, NumericsError, Precision, RationalInterval};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenfunError {
    #[error("alphabet size t = {0} is below 2")]
    AlphabetTooSmall(u32),
    #[error("f_{j} has a pole at the evaluation point")]
    Pole { j: usize },
    #[error("radius^[K+1] must be below 1/2 (t = {t}, K = {k})")]
    RadiusTooLarge { t: u32, k: usize },
    #[error("cannot reach 10^-{digits} with the tail bound at this radius")]
    TargetUnreachable { digits: u32 },
    #[error("evaluation point must satisfy |q| < 1")]
    OutsideDisc,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

fn check_t(t: u32) -> Result<(), GenfunError> {
    if t < 2 {
        Err(GenfunError::AlphabetTooSmall(t))
    } else {
        Ok(())
    }
}

/// `[k] = (t^k - 1)/(t - 1)`.
pub fn bracket(t: u32, k: u32) -> BigUint {
    let t = BigUint::from(t);
    (num_traits::pow(t.clone(), k as usize) - 1u32) / (t - 1u32)
}

/// `[k]` when it fits a `u64`.
pub fn bracket_u64(t: u32, k: usize) -> Option<u64> {
    let mut acc: u64 = 0;
    for _ in 0..k {
        acc = acc.checked_mul(t as u64)?.checked_add(1)?;
    }
    Some(acc)
}

/// Exact coefficients `c(0), …, c(N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesTruncation {
    pub t: u32,
    pub coeffs: Vec<BigCount>,
}

impl SeriesTruncation {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.coeffs.iter().map(crate::counting::big_json).collect())
    }

    /// One coefficient per line.
    pub fn to_text(&self) -> String {
        self.coeffs.iter().map(|c| format!("{c}\n")).collect()
    }
}

/// Coefficients of `F` up to `q^order`, by exact series division `N_K / D_K`.
///
/// `K` is the least value with `Σ_{j≤K} [j] > order`; every omitted product
/// has valuation beyond `order`, so the truncations agree with `N` and `D`.
pub fn series_f(t: u32, order: usize) -> Result<SeriesTruncation, GenfunError> {
    check_t(t)?;
    let len = order + 1;
    let mut k_terms = 0usize;
    let mut valuation = 0u64;
    while valuation <= order as u64 {
        k_terms += 1;
        valuation += bracket_u64(t, k_terms).unwrap_or(u64::MAX);
    }
    // P_k = Π_{j≤k} f_j satisfies P_k = q^[k] (P_{k-1} + P_k)
    let mut prod = vec![BigInt::zero(); len];
    prod[0] = BigInt::one();
    let mut num = prod.clone();
    let mut den = prod.clone();
    for k in 1..=k_terms {
        let step = bracket_u64(t, k).unwrap_or(u64::MAX);
        let mut next = vec![BigInt::zero(); len];
        if step < len as u64 {
            let step = step as usize;
            for n in step..len {
                next[n] = &prod[n - step] + &next[n - step];
            }
        }
        prod = next;
        let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        for n in 0..len {
            if !prod[n].is_zero() {
                den[n] += &sign * &prod[n];
            }
        }
        if step < len as u64 {
            let step = step as usize;
            for n in step..len {
                if !prod[n - step].is_zero() {
                    num[n] += &sign * &prod[n - step];
                }
            }
        }
    }
    // den[0] = 1, so c = num / den is integral
    let mut coeffs: Vec<BigInt> = Vec::with_capacity(len);
    for n in 0..len {
        let mut c = num[n].clone();
        for i in 1..=n {
            if !den[i].is_zero() {
                c -= &den[i] * &coeffs[n - i];
            }
        }
        coeffs.push(c);
    }
    let coeffs = coeffs
        .into_iter()
        .map(|c| c.to_biguint().expect("coefficients of F are nonnegative"))
        .collect();
    Ok(SeriesTruncation { t, coeffs })
}

/// Dense bivariate polynomial, `coeffs[q_power][u_power]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bivariate {
    pub coeffs: Vec<Vec<BigInt>>,
}

impl Bivariate {
    fn zeros(q_len: usize, u_len: usize) -> Self {
        Self { coeffs: vec![vec![BigInt::zero(); u_len]; q_len] }
    }

    pub fn coeff(&self, q_pow: usize, u_pow: usize) -> BigInt {
        self.coeffs.get(q_pow).and_then(|row| row.get(u_pow)).cloned().unwrap_or_default()
    }

    /// Coefficients of `G(q, 1)`.
    pub fn at_u_one(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|row| row.iter().sum()).collect()
    }

    /// Smallest `q` exponent with a nonzero coefficient.
    pub fn q_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|row| row.iter().any(|c| !c.is_zero()))
    }

    pub fn max_abs(&self) -> BigUint {
        self.coeffs.iter().flatten().map(|c| c.abs().to_biguint().unwrap()).max().unwrap_or_default()
    }
}

/// `G_0, …, G_N`, where `G_k` counts canonical trees of height `k` by inner
/// vertices (`q`) and deepest leaves (`u`), truncated after `q^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariateTruncation {
    pub t: u32,
    pub order: usize,
    pub layers: Vec<Bivariate>,
}

impl BivariateTruncation {
    pub fn u_len(t: u32, order: usize) -> usize {
        (t as usize - 1) * order + 2
    }

    /// `Σ_k G_k`.
    pub fn total(&self) -> Bivariate {
        let mut sum = Bivariate::zeros(self.order + 1, Self::u_len(self.t, self.order));
        for layer in &self.layers {
            for (row, src) in sum.coeffs.iter_mut().zip(&layer.coeffs) {
                for (c, s) in row.iter_mut().zip(src) {
                    *c += s;
                }
            }
        }
        sum
    }

    /// Coefficients of `Σ_k G_k(q, 1)`.
    pub fn series_at_u_one(&self) -> Vec<BigInt> {
        self.total().at_u_one()
    }
}

/// Builds `G_{k+1}` from `G_k` by expanding `j ∈ 1..=m` of the `m` deepest
/// leaves: `q^n u^m ↦ Σ_j q^(n+j) u^(jt)`.
pub fn bivariate_g(t: u32, order: usize) -> Result<BivariateTruncation, GenfunError> {
    check_t(t)?;
    let q_len = order + 1;
    let u_len = BivariateTruncation::u_len(t, order);
    let mut g0 = Bivariate::zeros(q_len, u_len);
    g0.coeffs[0][1] = BigInt::one();
    let mut layers = vec![g0];
    for _ in 0..order {
        let prev = layers.last().unwrap();
        let mut next = Bivariate::zeros(q_len, u_len);
        for (n, row) in prev.coeffs.iter().enumerate() {
            for (m, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for j in 1..=m {
                    if n + j > order {
                        break;
                    }
                    next.coeffs[n + j][j * t as usize] += c;
                }
            }
        }
        layers.push(next);
    }
    Ok(BivariateTruncation { t, order, layers })
}

/// Largest coefficient of
/// `(1 - q u^t)(G(q,u) - u) - q u^t (G(q,1) - G(q, q u^t))` modulo `q^(N+1)`.
pub fn check_functional_equation(t: u32, order: usize) -> Result<BigUint, GenfunError> {
    let g = bivariate_g(t, order)?.total();
    let t = t as usize;
    let q_len = order + 1;
    let u_len = t * BivariateTruncation::u_len(t as u32, order) + t + 1;
    let mut res = Bivariate::zeros(q_len, u_len);
    let mut g_minus_u = g.clone();
    g_minus_u.coeffs[0][1] -= 1;
    let at_one = g.at_u_one();
    #[allow(clippy::needless_range_loop)]
    for n in 0..q_len {
        for (m, c) in g_minus_u.coeffs[n].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            res.coeffs[n][m] += c;
            if n + 1 < q_len {
                res.coeffs[n + 1][m + t] -= c;
            }
        }
        // - q u^t G(q,1)
        if n + 1 < q_len {
            res.coeffs[n + 1][t] -= &at_one[n];
        }
        // + q u^t G(q, q u^t): q^n u^m ↦ q^(n+m+1) u^(tm+t)
        for (m, c) in g.coeffs[n].iter().enumerate() {
            if c.is_zero() || n + m + 1 >= q_len {
                continue;
            }
            res.coeffs[n + m + 1][t * m + t] += c;
        }
    }
    Ok(res.max_abs())
}

/// Enclosures of `N_K(q)`, `D_K(q)` and `D'_K(q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSums {
    pub k_terms: usize,
    pub numerator: RationalInterval,
    pub denominator: RationalInterval,
    pub derivative: RationalInterval,
}

/// Interval evaluation of the `K`-term partial sums over `q`.
///
/// Uses `P_k = P_{k-1} f_k`, `P'_k = P'_{k-1} f_k + P_{k-1} f'_k` and
/// `f'_j = [j] q^([j]-1) / (1 - q^[j])^2`.
pub fn partial_sums(
    t: u32,
    q: &RationalInterval,
    k_terms: usize,
    prec: Precision,
) -> Result<PartialSums, GenfunError> {
    check_t(t)?;
    let mut numerator = RationalInterval::zero();
    let mut denominator = RationalInterval::zero();
    let mut derivative = RationalInterval::zero();
    let mut prod = RationalInterval::one();
    let mut prod_d = RationalInterval::zero();
    // q^[j] for the current j; starts at q^[0] = 1
    let mut power = RationalInterval::one();
    for k in 0..k_terms {
        if k > 0 {
            let step = bracket_u64(t, k).ok_or(GenfunError::TargetUnreachable { digits: 0 })?;
            let below = power.pow_with(t as u64, prec); // q^([k]-1) = (q^[k-1])^t
            power = prec.fix(below.mul(q));
            let gap = RationalInterval::one().sub(&power);
            let gap_inv = gap.recip().map_err(|_| GenfunError::Pole { j: k })?;
            let f = prec.fix(power.mul(&gap_inv));
            let fd = prec.fix(below.scale(&int(step)).mul(&gap_inv.pow_with(2, prec)));
            prod_d = prec.fix(prod_d.mul(&f).add(&prod.mul(&fd)));
            prod = prec.fix(prod.mul(&f));
        }
        let term_n = prec.fix(power.mul(&prod));
        if k % 2 == 0 {
            denominator = denominator.add(&prod);
            derivative = derivative.add(&prod_d);
            numerator = numerator.add(&term_n);
        } else {
            denominator = denominator.sub(&prod);
            derivative = derivative.sub(&prod_d);
            numerator = numerator.sub(&term_n);
        }
    }
    Ok(PartialSums { k_terms, numerator, denominator, derivative })
}

/// Exact `(N_K(q), D_K(q), D'_K(q))` at a rational point.
pub fn eval_nd(t: u32, q: &ExactRational, k_terms: usize) -> Result<(ExactRational, ExactRational, ExactRational), GenfunError> {
    let s = partial_sums(t, &RationalInterval::point(q.clone()), k_terms, Precision::Exact)?;
    Ok((s.numerator.lo().clone(), s.denominator.lo().clone(), s.derivative.lo().clone()))
}

/// Upper bounds on `|N - N_K|`, `|D - D_K|` and `|D' - D'_K|` for `|q| ≤ radius`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailBound {
    pub t: u32,
    pub k: usize,
    pub radius: ExactRational,
    pub bound_n: ExactRational,
    pub bound_d: ExactRational,
    /// `None` when `t · f_{K+1}(radius) ≥ 1`.
    pub bound_dprime: Option<ExactRational>,
}

/// Exact tail bounds.
///
/// `bound_d = (1-ρ)/(1-2ρ) · Π_{j≤K} (1 - r^[j])^-1 · r^(Σ_{j≤K} [j])` with
/// `ρ = r^[K+1]`, and `bound_n = bound_d · r^[K]`. For the derivative,
/// `|P'_k| ≤ P_k(r) Σ_{j≤k} [j] / (r (1 - r^[j]))`, `Σ_{j≤k} [j] ≤ [k+1]`
/// and `[K+1+m] ≤ t^m ([K+1] + 1)` give
/// `bound_dprime = P_K(r) ([K+1] + 1) / (r (1 - r) (1 - t f_{K+1}(r)))`.
pub fn tail_bounds(t: u32, radius: &ExactRational, k: usize) -> Result<TailBound, GenfunError> {
    tail_bounds_with(t, radius, k, Precision::Exact)
}

/// Tail bounds computed with outward rounding; the results are upper bounds.
pub fn tail_bounds_with(t: u32, radius: &ExactRational, k: usize, prec: Precision) -> Result<TailBound, GenfunError> {
    check_t(t)?;
    if radius.is_negative() || radius >= &BigRational::one() {
        return Err(GenfunError::OutsideDisc);
    }
    let r = RationalInterval::point(radius.clone());
    let too_large = || GenfunError::RadiusTooLarge { t, k };
    let next_bracket = bracket_u64(t, k + 1).ok_or_else(too_large)?;
    let rho = r.pow_with(next_bracket, prec);
    let half = RationalInterval::point(BigRational::new(1.into(), 2.into()));
    if rho.hi() >= half.lo() {
        return Err(too_large());
    }
    let one = RationalInterval::one();
    let lead = prec.fix(one.sub(&rho).div(&one.sub(&rho.scale(&int(2))))?);
    // P_K(r) = Π r^[j] / (1 - r^[j])
    let mut prod = RationalInterval::one();
    let mut power = RationalInterval::one();
    for _ in 1..=k {
        power = prec.fix(power.pow_with(t as u64, prec).mul(&r));
        let f = one.sub(&power).recip().map_err(|_| too_large())?.mul(&power);
        prod = prec.fix(prod.mul(&f));
    }
    let bound_d = prec.fix(lead.mul(&prod));
    let bound_n = prec.fix(bound_d.mul(&power)); // power = r^[K]
    let f_next = rho.div(&one.sub(&rho))?;
    let contraction = one.sub(&f_next.scale(&int(t)));
    let bound_dprime = if radius.is_zero() {
        (k >= 2).then(BigRational::zero)
    } else if k >= 1 && contraction.lo().is_positive() {
        let scale = int(next_bracket + 1);
        let denom = r.mul(&one.sub(&r)).mul(&contraction);
        Some(prec.fix(prod.scale(&scale).div(&denom)?).hi().clone())
    } else {
        None
    };
    Ok(TailBound {
        t,
        k,
        radius: radius.clone(),
        bound_n: bound_n.hi().clone(),
        bound_d: bound_d.hi().clone(),
        bound_dprime,
    })
}

/// Certified enclosures of `N(q)`, `D(q)` and `D'(q)` over an interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedSums {
    pub k_terms: usize,
    pub numerator: RationalInterval,
    pub denominator: RationalInterval,
    pub derivative: RationalInterval,
}

/// Guard digits between the requested target and the tail bound.
const TAIL_GUARD_DIGITS: u32 = 4;
const MAX_TERMS: usize = 64;

fn radius_of(q: &RationalInterval) -> Result<ExactRational, GenfunError> {
    let radius = q.mag();
    if radius >= BigRational::one() {
        return Err(GenfunError::OutsideDisc);
    }
    Ok(radius)
}

/// Smallest `K` whose tail bounds are all below `10^-(digits+4)`.
pub fn choose_terms(t: u32, radius: &ExactRational, digits: u32, need_derivative: bool) -> Result<(usize, TailBound), GenfunError> {
    let target = pow10_neg(digits + TAIL_GUARD_DIGITS);
    for k in 1..=MAX_TERMS {
        // the derivative bound scales the rounding floor by [K+1]
        let prec = Precision::for_digits(digits + TAIL_GUARD_DIGITS, 16 + bits_for_exponent(t, k + 1));
        let tail = match tail_bounds_with(t, radius, k, prec) {
            Ok(tail) => tail,
            Err(GenfunError::RadiusTooLarge { .. }) => continue,
            Err(e) => return Err(e),
        };
        let dprime_ok = !need_derivative || tail.bound_dprime.as_ref().is_some_and(|b| b <= &target);
        if tail.bound_d <= target && tail.bound_n <= target && dprime_ok {
            return Ok((k, tail));
        }
        if bracket_u64(t, k + 2).is_none() {
            break;
        }
    }
    Err(GenfunError::TargetUnreachable { digits })
}

/// `N`, `D`, `D'` over `q`, each widened by its tail bound.
pub fn certified_sums(t: u32, q: &RationalInterval, digits: u32) -> Result<CertifiedSums, GenfunError> {
    check_t(t)?;
    let radius = radius_of(q)?;
    let (k, tail) = choose_terms(t, &radius, digits, true)?;
    let prec = Precision::for_digits(digits + TAIL_GUARD_DIGITS, 32 + bits_for_exponent(t, k));
    let sums = partial_sums(t, q, k, prec)?;
    let dprime = tail.bound_dprime.clone().unwrap_or_default();
    Ok(CertifiedSums {
        k_terms: k,
        numerator: sums.numerator.widen(&tail.bound_n),
        denominator: sums.denominator.widen(&tail.bound_d),
        derivative: sums.derivative.widen(&dprime),
    })
}

/// Certified enclosure of `D(q)` for every `q` in the interval, with `K`
/// chosen so the tail is below `10^-(digits+4)`.
pub fn eval_d_certified(t: u32, q: &RationalInterval, digits: u32) -> Result<RationalInterval, GenfunError> {
    check_t(t)?;
    let radius = radius_of(q)?;
    let (k, tail) = choose_terms(t, &radius, digits, false)?;
    let prec = Precision::for_digits(digits + TAIL_GUARD_DIGITS, 32 + bits_for_exponent(t, k));
    let sums = partial_sums(t, q, k, prec)?;
    Ok(sums.denominator.widen(&tail.bound_d))
}

/// Extra bits absorbing the error growth of `q^[K]` by repeated squaring.
fn bits_for_exponent(t: u32, k: usize) -> u32 {
    bracket_u64(t, k).map_or(64, |b| 64 - b.leading_zeros()) + 8
}

/// Lossy diagnostic view of `D(q)` at a rational point.
pub fn approx_d(t: u32, q: f64, k_terms: usize) -> f64 {
    let mut d = 0.0;
    let mut prod = 1.0;
    for k in 0..k_terms {
        if k > 0 {
            let e = bracket_u64(t, k).and_then(|b| b.to_i32()).unwrap_or(i32::MAX);
            let p = q.powi(e);
            prod *= p / (1.0 - p);
        }
        d += if k % 2 == 0 { prod } else { -prod };
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn brackets() {
        assert_eq!(bracket(5, 0), BigUint::zero());
        assert_eq!(bracket(2, 3), BigUint::from(7u32));
        assert_eq!(bracket(3, 2), BigUint::from(4u32));
        assert_eq!(bracket_u64(40, 3), Some(1641));
        assert_eq!(bracket_u64(40, 20), None);
    }

    #[test]
    fn series_examples() {
        assert_eq!(series_f(2, 6).unwrap().coeffs, big(&[1, 1, 1, 2, 3, 5, 9]));
        assert_eq!(series_f(3, 5).unwrap().coeffs, big(&[1, 1, 1, 2, 4, 7]));
        for t in 2..6 {
            assert_eq!(series_f(t, 0).unwrap().coeffs, big(&[1]));
        }
        assert_eq!(series_f(2, 6).unwrap().to_text(), "1\n1\n1\n2\n3\n5\n9\n");
    }

    #[test]
    fn eval_at_zero() {
        let (n, d, dp) = eval_nd(3, &rat(0, 1), 4).unwrap();
        assert_eq!((n, d, dp), (rat(1, 1), rat(1, 1), rat(-1, 1)));
    }

    #[test]
    fn eval_at_half() {
        let (_, d, _) = eval_nd(2, &rat(1, 2), 3).unwrap();
        assert_eq!(d, rat(1, 7));
    }

    #[test]
    fn pole_detected() {
        // q^[2] = q^3 = 1 at q = 1
        let err = eval_nd(2, &rat(1, 1), 3).unwrap_err();
        assert_eq!(err, GenfunError::Pole { j: 1 });
    }

    #[test]
    fn tail_example() {
        let tb = tail_bounds(2, &rat(1, 2), 3).unwrap();
        let expected = rat(1, 1) - pow2(15);
        let expected = expected / (rat(1, 1) - pow2(14)) * int(2) * rat(8, 7) * rat(128, 127) * pow2(11);
        assert_eq!(tb.bound_d, expected);
        assert_eq!(tb.bound_n, &expected * rat(1, 128));
        let approx = crate::numerics::approx_f64(&tb.bound_d);
        assert!((approx - 1.1249e-3).abs() < 1e-6, "{approx}");
        let t3 = tail_bounds(3, &rat(1, 2), 3).unwrap();
        assert!(t3.bound_d < tb.bound_d);
        assert!(matches!(tail_bounds(2, &rat(9, 10), 1), Err(GenfunError::RadiusTooLarge { .. })));
    }

    fn pow2(e: usize) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::one() << e)
    }

    #[test]
    fn certified_at_zero() {
        let d = eval_d_certified(2, &RationalInterval::zero(), 10).unwrap();
        assert_eq!(d, RationalInterval::one());
    }

    #[test]
    fn certified_at_half_is_tight() {
        let d = eval_d_certified(2, &RationalInterval::point(rat(1, 2)), 30).unwrap();
        assert!(d.width() <= pow10_neg(30));
        for k in 8..10 {
            let (_, dk, _) = eval_nd(2, &rat(1, 2), k).unwrap();
            assert!(d.widen(&pow10_neg(40)).contains(&dk));
        }
    }

    #[test]
    fn bivariate_examples() {
        let g = bivariate_g(2, 6).unwrap();
        assert_eq!(g.layers[0].coeff(0, 1), BigInt::one());
        assert_eq!(g.layers[1].coeff(1, 2), BigInt::one());
        assert_eq!(g.layers[2].coeff(2, 2), BigInt::one());
        assert_eq!(g.layers[2].coeff(3, 4), BigInt::one());
        assert_eq!(g.layers[2].coeff(2, 4), BigInt::zero());
        assert_eq!(g.series_at_u_one()[4], BigInt::from(3));
        for (k, layer) in g.layers.iter().enumerate() {
            if let Some(v) = layer.q_valuation() {
                assert!(v >= k);
            }
        }
    }

    #[test]
    fn functional_equation_holds() {
        assert_eq!(check_functional_equation(2, 10).unwrap(), BigUint::zero());
        assert_eq!(check_functional_equation(3, 8).unwrap(), BigUint::zero());
        assert_eq!(check_functional_equation(5, 5).unwrap(), BigUint::zero());
    }
}
