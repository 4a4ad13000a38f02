//! Mittag-Leffler function `E_α(z) = Σ_k z^k / Γ(αk + 1)` on the negative
//! real axis, and the closed-form solution of the constant-coefficient
//! homogeneous problem for a single sine mode:
//!
//! ```text
//! W(x, t) = E_α(−κ (jπ)² t^α) · sin(jπx)
//! ```
//!
//! Three evaluation routes are provided:
//! - [`ml_series`]: the power series with compensated summation; accurate
//!   only while its terms stay moderate (severe cancellation otherwise),
//! - [`ml_asymptotic`]: `−Σ_{k=1}^{K} z^{−k}/Γ(1 − αk)` for large `|z|`,
//! - [`ml_integral`]: the Laplace-type representation
//!   `E_α(−x) = sin(απ)/(απ) ∫₀^∞ exp(−(ux)^{1/α}) / (u² + 2u cos(απ) + 1) du`,
//!   a positive integrand valid for every `x ≥ 0` and `0 < α < 1`.
//!
//! [`mittag_leffler`] picks the cheapest route that meets the accuracy target.
use crate::solver::CoefficientLaw;
use crate::{Error, Result, Scalar};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Number of terms kept in the asymptotic expansion.
pub const ASYMPTOTIC_TERMS: usize = 10;

/// Arguments with `|z|` at or above this use the large-argument routes.
pub const BRANCH_SWITCH: f64 = 10.0;

/// Largest series term tolerated before cancellation is deemed too severe.
/// Each term carries a relative error of a few hundred ulps (from `ln Γ` and
/// the exponential), so the series loses roughly `max_term · 1e-14`.
fn series_term_limit<T: Scalar>() -> T {
    T::lit(10.0)
}

/// Accuracy requested from the asymptotic and integral routes.
fn target_accuracy<T: Scalar>() -> T {
    (T::lit(1e-14)).max(T::lit(16.0) * T::epsilon())
}

fn lanczos_sum<T: Scalar>(x: T) -> T {
    let mut a = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += T::lit(c) / (x + T::from_count(i));
    }
    a
}

/// `ln Γ(x)` for `x ≥ 1/2` (Lanczos, g = 7).
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    debug_assert!(x >= T::lit(0.5));
    let xm = x - T::one();
    let t = xm + T::lit(LANCZOS_G + 0.5);
    let half_ln_two_pi = T::lit(0.918_938_533_204_672_8);
    half_ln_two_pi + (xm + T::lit(0.5)) * t.ln() - t + lanczos_sum(xm).ln()
}

/// Γ(x) for real `x`, via reflection below 1/2. Poles return ±∞.
pub fn gamma<T: Scalar>(x: T) -> T {
    if x < T::lit(0.5) {
        if x == x.floor() {
            return T::infinity();
        }
        T::PI() / ((T::PI() * x).sin() * gamma(T::one() - x))
    } else {
        ln_gamma(x).exp()
    }
}

/// `1/Γ(x)`, exactly zero at the poles `x = 0, −1, −2, …`.
pub fn recip_gamma<T: Scalar>(x: T) -> T {
    if x <= T::zero() && x == x.floor() {
        return T::zero();
    }
    if x < T::lit(0.5) {
        (T::PI() * x).sin() * gamma(T::one() - x) / T::PI()
    } else {
        (-ln_gamma(x)).exp()
    }
}

fn check_args<T: Scalar>(alpha: T, z: T) -> Result<()> {
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(Error::invalid(format!(
            "alpha must lie in (0,1], got {alpha}"
        )));
    }
    if !(z <= T::zero()) {
        return Err(Error::invalid(format!(
            "Mittag-Leffler oracle only covers real z ≤ 0, got {z}"
        )));
    }
    Ok(())
}

/// Value of the power series together with its largest term magnitude, the
/// latter bounding the cancellation error at about `max_term · ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue<T> {
    pub value: T,
    pub max_term: T,
    pub terms: usize,
}

/// Power series `Σ z^k / Γ(αk + 1)` with Kahan summation.
pub fn ml_series<T: Scalar>(alpha: T, z: T) -> SeriesValue<T> {
    const MAX_TERMS: usize = 4000;
    if z == T::zero() {
        return SeriesValue {
            value: T::one(),
            max_term: T::one(),
            terms: 1,
        };
    }
    let ln_abs_z = z.abs().ln();
    let negative = z < T::zero();
    let mut sum = T::one();
    let mut carry = T::zero();
    let mut max_term = T::one();
    let mut previous = T::one();
    let mut terms = 1;
    for k in 1..MAX_TERMS {
        let fk = T::from_count(k);
        let magnitude = (fk * ln_abs_z - ln_gamma(alpha * fk + T::one())).exp();
        let term = if negative && k % 2 == 1 {
            -magnitude
        } else {
            magnitude
        };
        let y = term - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        terms += 1;
        max_term = max_term.max(magnitude);
        if magnitude <= previous && magnitude <= T::epsilon() * T::epsilon().max(sum.abs()) {
            break;
        }
        previous = magnitude;
    }
    SeriesValue {
        value: sum,
        max_term,
        terms,
    }
}

/// Asymptotic expansion `E_α(z) ≈ −Σ_{k=1}^{terms} z^{−k}/Γ(1 − αk)` for
/// `z < 0`, skipping the vanishing terms where `1 − αk` is a nonpositive
/// integer. Not meaningful for `α = 1`, where every term vanishes.
pub fn ml_asymptotic<T: Scalar>(alpha: T, z: T, terms: usize) -> T {
    let mut sum = T::zero();
    let inv = z.recip();
    let mut power = T::one();
    for k in 1..=terms {
        power *= inv;
        sum += power * recip_gamma(T::one() - alpha * T::from_count(k));
    }
    -sum
}

/// Magnitude of the first neglected asymptotic term, used as error estimate.
fn asymptotic_tail<T: Scalar>(alpha: T, z: T, terms: usize) -> T {
    let mut k = terms + 1;
    // Skip vanishing terms so the estimate is not spuriously zero.
    loop {
        let r = recip_gamma(T::one() - alpha * T::from_count(k));
        if r != T::zero() || k > terms + 4 {
            return z.abs().powi(-(k as i32)) * r.abs();
        }
        k += 1;
    }
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss8<T: Scalar>(f: &impl Fn(T) -> T, a: T, b: T) -> T {
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let mut acc = T::zero();
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
        let dx = half * T::lit(*x);
        acc += T::lit(*w) * (f(mid - dx) + f(mid + dx));
    }
    acc * half
}

fn adaptive_gauss<T: Scalar>(f: &impl Fn(T) -> T, a: T, b: T, whole: T, tol: T, depth: u32) -> T {
    let mid = (a + b) / T::lit(2.0);
    let left = gauss8(f, a, mid);
    let right = gauss8(f, mid, b);
    let refined = left + right;
    // Never ask for more than the rounding level of the panel itself.
    let floor = T::lit(4.0) * T::epsilon() * (left.abs() + right.abs());
    if depth == 0 || (refined - whole).abs() <= tol.max(floor) {
        return refined;
    }
    let half_tol = tol / T::lit(2.0);
    adaptive_gauss(f, a, mid, left, half_tol, depth - 1)
        + adaptive_gauss(f, mid, b, right, half_tol, depth - 1)
}

fn integrate<T: Scalar>(f: impl Fn(T) -> T, a: T, b: T, tol: T) -> T {
    let whole = gauss8(&f, a, b);
    adaptive_gauss(&f, a, b, whole, tol, 40)
}

/// `E_α(z)` for `z ≤ 0`, `0 < α < 1`, from the positive integral
/// representation; `u ∈ [1, ∞)` is folded onto `(0, 1]` by `u = 1/v`.
pub fn ml_integral<T: Scalar>(alpha: T, z: T) -> T {
    if z == T::zero() {
        return T::one();
    }
    let x = -z;
    let inv_alpha = alpha.recip();
    let c = (T::PI() * alpha).cos();
    let two = T::lit(2.0);
    let near = |u: T| (-(u * x).powf(inv_alpha)).exp() / (u * u + two * u * c + T::one());
    let far = |v: T| {
        if v <= T::zero() {
            return T::zero();
        }
        (-(x / v).powf(inv_alpha)).exp() / (T::one() + two * v * c + v * v)
    };
    let tol = target_accuracy::<T>() * T::lit(0.1);
    let integral =
        integrate(near, T::zero(), T::one(), tol) + integrate(far, T::zero(), T::one(), tol);
    (T::PI() * alpha).sin() / (alpha * T::PI()) * integral
}

/// Branch used for `|z| < 10`: the series when its cancellation is mild,
/// otherwise the integral representation.
pub fn ml_small_argument<T: Scalar>(alpha: T, z: T) -> T {
    if alpha == T::one() {
        return z.exp();
    }
    let series = ml_series(alpha, z);
    if series.max_term <= series_term_limit::<T>() {
        series.value
    } else {
        ml_integral(alpha, z)
    }
}

/// `E_α(z)` for real `z ≤ 0` and `0 < α ≤ 1`.
///
/// `α = 1` is `exp(z)`. Below `|z| = 10` the series is used unless its terms
/// grow large enough to cancel catastrophically; at and beyond `|z| = 10` the
/// asymptotic expansion is used when its first neglected term is negligible.
/// Everything else goes through the integral representation.
pub fn mittag_leffler<T: Scalar>(alpha: T, z: T) -> Result<T> {
    check_args(alpha, z)?;
    if z == T::zero() {
        return Ok(T::one());
    }
    if alpha == T::one() {
        return Ok(z.exp());
    }
    if z.abs() < T::lit(BRANCH_SWITCH) {
        return Ok(ml_small_argument(alpha, z));
    }
    if asymptotic_tail(alpha, z, ASYMPTOTIC_TERMS) <= target_accuracy::<T>() {
        Ok(ml_asymptotic(alpha, z, ASYMPTOTIC_TERMS))
    } else {
        Ok(ml_integral(alpha, z))
    }
}

/// Dirichlet Laplacian eigenpair on (0, 1): `λ_j = (jπ)²`,
/// `φ_j(x) = √2 sin(jπx)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectralMode {
    j: u32,
}

impl SpectralMode {
    pub fn new(j: u32) -> Result<Self> {
        if j == 0 {
            return Err(Error::invalid("mode index must be at least 1"));
        }
        Ok(SpectralMode { j })
    }

    pub fn index(&self) -> u32 {
        self.j
    }

    pub fn eigenvalue<T: Scalar>(&self) -> T {
        let k = T::from_count(self.j as usize) * T::PI();
        k * k
    }

    /// Normalized eigenfunction `√2 sin(jπx)`.
    pub fn eigenfunction<T: Scalar>(&self, x: T) -> T {
        T::SQRT_2() * (T::from_count(self.j as usize) * T::PI() * x).sin()
    }
}

/// Decay factor `E_α(−κ λ_j t^α)` of a single mode.
pub fn mode_decay<T: Scalar>(alpha: T, kappa: T, mode: SpectralMode, t: T) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(Error::invalid(format!("time must be nonnegative, got {t}")));
    }
    if !(kappa >= T::zero()) {
        return Err(Error::invalid(format!(
            "diffusivity must be nonnegative, got {kappa}"
        )));
    }
    mittag_leffler(alpha, -kappa * mode.eigenvalue::<T>() * t.powf(alpha))
}

/// Exact solution for `W₀ = sin(jπx)`, `f = 0` and constant diffusivity:
/// `E_α(−κ (jπ)² t^α) sin(jπx)`.
pub fn exact_solution<T: Scalar>(
    alpha: T,
    law: &CoefficientLaw<T>,
    mode: SpectralMode,
    x: T,
    t: T,
) -> Result<T> {
    let kappa = match law {
        CoefficientLaw::Constant(k) => *k,
        CoefficientLaw::Power { .. } => {
            return Err(Error::invalid(
                "closed-form solution needs a constant diffusivity",
            ))
        }
    };
    let decay = mode_decay(alpha, kappa, mode, t)?;
    Ok(decay * (T::from_count(mode.index() as usize) * T::PI() * x).sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((gamma(5.0_f64) - 24.0).abs() < 1e-12);
        assert!((gamma(0.5_f64) - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((gamma(-0.5_f64) + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert_eq!(recip_gamma(-3.0_f64), 0.0);
        assert_eq!(recip_gamma(0.0_f64), 0.0);
        assert!((recip_gamma(-2.5_f64) - 1.0 / gamma(-2.5_f64)).abs() < 1e-14);
    }

    #[test]
    fn value_at_zero() {
        for alpha in [0.1, 0.5, 0.9, 1.0] {
            assert_eq!(mittag_leffler(alpha, 0.0_f64).unwrap(), 1.0);
        }
    }

    #[test]
    fn exponential_case() {
        assert!((mittag_leffler(1.0_f64, -1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let mut z = 0.0;
        while z >= -30.0 {
            let got = mittag_leffler(1.0_f64, z).unwrap();
            assert!((got - z.exp()).abs() <= 1e-12);
            z -= 0.25;
        }
    }

    #[test]
    fn half_order_erfc_identity() {
        // E_{1/2}(−1) = e·erfc(1)
        let got = mittag_leffler(0.5_f64, -1.0).unwrap();
        assert!((got - 0.427_583_576_155_807).abs() < 1e-13);
        let series = ml_series(0.5_f64, -1.0).value;
        assert!((series - got).abs() < 1e-14);
        let integral = ml_integral(0.5_f64, -1.0);
        assert!((integral - got).abs() < 1e-13);
    }

    #[test]
    fn rejects_out_of_scope_arguments() {
        assert!(mittag_leffler(0.5_f64, 0.1).is_err());
        assert!(mittag_leffler(0.0_f64, -1.0).is_err());
        assert!(mittag_leffler(1.2_f64, -1.0).is_err());
        assert!(mittag_leffler(0.5_f64, f64::NAN).is_err());
    }

    #[test]
    fn exact_solution_basics() {
        let law = CoefficientLaw::constant(1.0_f64);
        let mode = SpectralMode::new(1).unwrap();
        let x = 0.3;
        let at_zero = exact_solution(0.5, &law, mode, x, 0.0).unwrap();
        assert!((at_zero - (std::f64::consts::PI * x).sin()).abs() < 1e-15);
        let heat = exact_solution(1.0, &law, mode, x, 1.0).unwrap();
        let expected = (-std::f64::consts::PI.powi(2)).exp() * (std::f64::consts::PI * x).sin();
        assert!((heat - expected).abs() < 1e-15);
        let power = CoefficientLaw::power(1.0, 1.0);
        assert!(exact_solution(0.5, &power, mode, x, 1.0).is_err());
        assert!(SpectralMode::new(0).is_err());
    }

    #[test]
    fn modes() {
        let m = SpectralMode::new(2).unwrap();
        assert!((m.eigenvalue::<f64>() - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
        assert!((m.eigenfunction(0.25_f64) - 2f64.sqrt()).abs() < 1e-15);
        let eig: Vec<f64> = (1..6)
            .map(|j| SpectralMode::new(j).unwrap().eigenvalue())
            .collect();
        assert!(eig.windows(2).all(|w| 0.0 < w[0] && w[0] < w[1]));
    }

    #[test]
    fn single_precision() {
        let got = mittag_leffler(0.5_f32, -1.0).unwrap();
        assert!((got - 0.427_583_6).abs() < 1e-5);
        let far = mittag_leffler(0.5_f32, -20.0).unwrap();
        let reference = mittag_leffler(0.5_f64, -20.0).unwrap();
        assert!((far as f64 - reference).abs() < 1e-5);
    }
}
