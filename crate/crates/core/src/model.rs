//! Model primitives, derived return coefficients and case classification.

use std::fmt;
use std::ops::Deref;

use crate::error::{ParamViolation, ValidationErrors};
use crate::scalar::{sign_with_tol, Scalar};

/// Absolute tolerance used to detect `alpha1 + alpha2 == 0`.
pub const CASE_TOLERANCE: f64 = 1e-12;

/// Unvalidated parameter record.
///
/// Field names follow roles; the configuration keys are listed on each field.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RawParams<T> {
    /// `beta`: discount factor.
    pub beta: T,
    /// `R`: dividend of the safe asset per unit and period.
    pub dividend: T,
    /// `y_L`: low return of the risky security.
    pub y_low: T,
    /// `y_H`: high return of the risky security.
    pub y_high: T,
    /// `lambda`: probability of accessing the financial market.
    pub lambda: T,
    /// `theta`: seller bargaining power.
    pub theta: T,
    /// `mu`: money growth rate.
    pub mu: T,
    /// `A`: fixed supply of the real asset.
    pub asset_supply: T,
    /// `M`: nominal money stock (scale only).
    pub money_stock: T,
}

/// A parameter record that satisfies every model invariant.
///
/// Only obtainable through [`validate_params`]; read fields through `Deref`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    raw: RawParams<T>,
}

impl<T> Deref for ModelParams<T> {
    type Target = RawParams<T>;

    fn deref(&self) -> &RawParams<T> {
        &self.raw
    }
}

impl<T: Scalar> ModelParams<T> {
    pub fn raw(&self) -> RawParams<T> {
        self.raw
    }

    /// Revalidates with the money growth rate replaced.
    pub fn with_mu(&self, mu: T) -> Result<Self, ValidationErrors> {
        RawParams { mu, ..self.raw }.validate().map(|v| v.params)
    }

    /// Same parameters at another money growth rate, without revalidation.
    /// Used to evaluate closed forms along `mu`; never handed out.
    pub(crate) fn with_mu_unchecked(mut self, mu: T) -> Self {
        self.raw.mu = mu;
        self
    }

    /// Revalidates with the market-access probability replaced.
    pub fn with_lambda(&self, lambda: T) -> Result<Self, ValidationErrors> {
        RawParams { lambda, ..self.raw }.validate().map(|v| v.params)
    }

    /// `(1/2)[(1+lambda) y_H + (1-lambda) y_L]`, the expected return of a
    /// security when L-types can sell to H-types with probability lambda.
    pub fn liquid_return(&self) -> T {
        let one = T::one();
        T::half() * ((one + self.lambda) * self.y_high + (one - self.lambda) * self.y_low)
    }

    /// Lowest feasible money growth rate, `beta - 1`.
    pub fn friedman_rule(&self) -> T {
        self.beta - T::one()
    }
}

/// A non-fatal observation about a valid parameter set.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamWarning {
    /// The risky security beats the safe asset even without resale.
    PositiveExcessReturn { alpha1: f64 },
}

impl fmt::Display for ParamWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamWarning::PositiveExcessReturn { alpha1 } => write!(f, "alpha1 = {alpha1} > 0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validated<T> {
    pub params: ModelParams<T>,
    pub warnings: Vec<ParamWarning>,
}

impl<T: Scalar> RawParams<T> {
    pub fn validate(self) -> Result<Validated<T>, ValidationErrors> {
        validate_params(self)
    }
}

/// Checks every invariant and collects all violations.
pub fn validate_params<T: Scalar>(raw: RawParams<T>) -> Result<Validated<T>, ValidationErrors> {
    let mut errs = Vec::new();
    let mut push = |field: &'static str, message: String| errs.push(ParamViolation { field, message });
    let zero = T::zero();
    let one = T::one();

    let named = [
        ("beta", raw.beta),
        ("R", raw.dividend),
        ("y_L", raw.y_low),
        ("y_H", raw.y_high),
        ("lambda", raw.lambda),
        ("theta", raw.theta),
        ("mu", raw.mu),
        ("A", raw.asset_supply),
        ("M", raw.money_stock),
    ];
    let mut finite = true;
    for (field, v) in named {
        if !v.is_finite() {
            push(field, format!("{field} must be finite"));
            finite = false;
        }
    }
    if !finite {
        return Err(ValidationErrors(errs));
    }

    if !(raw.beta > zero && raw.beta < one) {
        push("beta", "beta out of (0,1)".into());
    }
    if raw.dividend <= zero {
        push("R", "R > 0 violated".into());
    }
    if raw.y_low < zero {
        push("y_L", "y_L >= 0 violated".into());
    }
    if raw.y_low >= raw.y_high {
        push("y_L", "y_L < y_H violated".into());
    }
    if raw.y_high <= raw.dividend {
        push("y_H", "y_H > R violated".into());
    }
    if !(raw.lambda >= zero && raw.lambda <= one) {
        push("lambda", "lambda out of [0,1]".into());
    }
    if !(raw.theta > zero && raw.theta < one) {
        push("theta", "theta out of (0,1)".into());
    }
    if raw.asset_supply <= zero {
        push("A", "A > 0 violated".into());
    }
    if raw.money_stock <= zero {
        push("M", "M > 0 violated".into());
    }
    // beta - 1 is not exactly representable for most beta; allow rounding slack.
    if raw.beta > zero && raw.beta < one && raw.mu < raw.beta - one - T::tol(1e-12) {
        push("mu", "mu >= beta - 1 violated (below the Friedman rule)".into());
    }

    if !errs.is_empty() {
        return Err(ValidationErrors(errs));
    }

    let params = ModelParams { raw };
    let mut warnings = Vec::new();
    let alpha1 = derive_coefficients(&params).alpha1;
    if alpha1 > T::tol(CASE_TOLERANCE) {
        warnings.push(ParamWarning::PositiveExcessReturn { alpha1: alpha1.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(Validated { params, warnings })
}

/// Return coefficients of the securitization objective `alpha1 s + alpha2 min{s, alpha3}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCoefficients<T> {
    /// Expected excess return of a security over the safe dividend.
    pub alpha1: T,
    /// Expected gain per security from resale in the financial market.
    pub alpha2: T,
    pub alpha_sum: T,
}

pub fn derive_coefficients<T: Scalar>(p: &ModelParams<T>) -> DerivedCoefficients<T> {
    let alpha1 = T::half() * (p.y_low + p.y_high) - p.dividend;
    let alpha2 = T::half() * p.lambda * (p.y_high - p.y_low);
    DerivedCoefficients { alpha1, alpha2, alpha_sum: alpha1 + alpha2 }
}

/// Discounted dividend stream `beta R / (1 - beta)`.
pub fn fundamental_price<T: Scalar>(p: &ModelParams<T>) -> T {
    p.beta * p.dividend / (T::one() - p.beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    /// `alpha1 + alpha2 < 0`: nothing is securitized.
    NoTradeCase,
    /// `alpha1 + alpha2 == 0`.
    KnifeEdgeCase,
    /// `alpha1 + alpha2 > 0`: securities are issued and traded.
    ActiveCase,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::NoTradeCase => "NoTradeCase",
            CaseLabel::KnifeEdgeCase => "KnifeEdgeCase",
            CaseLabel::ActiveCase => "ActiveCase",
        }
    }

    pub fn is_active(self) -> bool {
        self == CaseLabel::ActiveCase
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_case<T: Scalar>(c: &DerivedCoefficients<T>) -> CaseLabel {
    match sign_with_tol(c.alpha_sum, T::tol(CASE_TOLERANCE)) {
        std::cmp::Ordering::Less => CaseLabel::NoTradeCase,
        std::cmp::Ordering::Equal => CaseLabel::KnifeEdgeCase,
        std::cmp::Ordering::Greater => CaseLabel::ActiveCase,
    }
}

/// Shorthand for `classify_case(&derive_coefficients(p))`.
pub fn case_of<T: Scalar>(p: &ModelParams<T>) -> CaseLabel {
    classify_case(&derive_coefficients(p))
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn canonical_is_valid_with_alpha1_warning() {
        let v = canonical_raw().validate().unwrap();
        assert_eq!(v.warnings.len(), 1);
        assert_eq!(v.warnings[0].to_string(), "alpha1 = 0.5 > 0");
    }

    #[test]
    fn rejects_beta_above_one() {
        let err = RawParams { beta: 1.1, ..canonical_raw() }.validate().unwrap_err();
        assert!(err.contains("beta"));
        assert!(err.to_string().contains("beta out of (0,1)"));
    }

    #[test]
    fn rejects_inverted_returns() {
        let err = RawParams { y_low: 2.0, y_high: 1.0, ..canonical_raw() }.validate().unwrap_err();
        assert!(err.to_string().contains("y_L < y_H violated"));
        // y_H = 1 also fails y_H > R
        assert!(err.contains("y_H"));
    }

    #[test]
    fn reports_every_violation() {
        let raw =
            RawParams { beta: 0.0, lambda: 1.5, theta: 1.0, asset_supply: 0.0, money_stock: -1.0, ..canonical_raw() };
        let err = raw.validate().unwrap_err();
        let fields: Vec<_> = err.fields().collect();
        assert_eq!(fields, ["beta", "lambda", "theta", "A", "M"]);
    }

    #[test]
    fn friedman_rule_boundary_accepted_below_rejected() {
        assert!(RawParams { mu: -0.1, ..canonical_raw() }.validate().is_ok());
        let err = RawParams { mu: -0.11, ..canonical_raw() }.validate().unwrap_err();
        assert!(err.contains("mu"));
    }

    #[test]
    fn non_finite_rejected() {
        let err = RawParams { y_high: f64::NAN, ..canonical_raw() }.validate().unwrap_err();
        assert!(err.contains("y_H"));
    }

    #[test]
    fn coefficient_examples() {
        let c = derive_coefficients(&params(|r| {
            r.y_high = 2.0;
            r.lambda = 0.5;
        }));
        assert_eq!((c.alpha1, c.alpha2, c.alpha_sum), (0.0, 0.5, 0.5));

        let c = derive_coefficients(&params(|r| r.lambda = 0.0));
        assert_eq!(c.alpha2, 0.0);
        assert_eq!(c.alpha_sum, c.alpha1);

        let c = derive_coefficients(&params(|r| {
            r.y_low = 0.5;
            r.y_high = 2.0;
            r.dividend = 1.25;
        }));
        assert_eq!(c.alpha1, 0.0);
        assert_eq!(c.alpha2, 0.75);
    }

    #[test]
    fn fundamental_price_examples() {
        assert_relative_eq!(fundamental_price(&canonical()), 9.0, max_relative = 1e-15);
        assert_eq!(fundamental_price(&params(|r| r.beta = 0.5)), 1.0);
        assert_relative_eq!(
            fundamental_price(&params(|r| {
                r.beta = 0.96;
                r.dividend = 2.0;
                r.y_high = 3.0;
            })),
            48.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn classify_examples() {
        let mk = |s: f64| DerivedCoefficients { alpha1: s, alpha2: 0.0, alpha_sum: s };
        assert_eq!(classify_case(&mk(-0.1)), CaseLabel::NoTradeCase);
        assert_eq!(classify_case(&mk(0.5)), CaseLabel::ActiveCase);
        assert_eq!(classify_case(&mk(0.0)), CaseLabel::KnifeEdgeCase);
        assert_eq!(classify_case(&mk(5e-13)), CaseLabel::KnifeEdgeCase);
    }

    #[test]
    fn works_in_single_precision() {
        let raw = RawParams::<f32> {
            beta: 0.9,
            dividend: 1.0,
            y_low: 0.0,
            y_high: 3.0,
            lambda: 1.0,
            theta: 0.5,
            mu: -0.1,
            asset_supply: 1.0,
            money_stock: 1.0,
        };
        let p = raw.validate().unwrap().params;
        assert!((fundamental_price(&p) - 9.0).abs() < 1e-5);
        assert_eq!(case_of(&p), CaseLabel::ActiveCase);
    }

    prop_compose! {
        fn valid_raw()(beta in 0.05..0.99f64, dividend in 0.1..3.0f64, y_low in 0.0..3.0f64,
                       spread in 0.01..4.0f64, lambda in 0.0..=1.0f64, theta in 0.01..0.99f64,
                       mu_gap in 0.0..0.5f64, a in 0.1..10.0f64, m in 0.1..100.0f64)
                      -> RawParams<f64> {
            let y_high = (y_low + spread).max(dividend + spread);
            RawParams { beta, dividend, y_low, y_high, lambda, theta,
                        mu: beta - 1.0 + mu_gap, asset_supply: a, money_stock: m }
        }
    }

    proptest! {
        #[test]
        fn alpha_sum_two_routes_agree(raw in valid_raw()) {
            let p = raw.validate().unwrap().params;
            let c = derive_coefficients(&p);
            let direct = p.liquid_return() - p.dividend;
            prop_assert!((c.alpha_sum - direct).abs() <= 1e-14 * c.alpha_sum.abs().max(p.y_high));
            prop_assert!(c.alpha2 >= 0.0);
            prop_assert_eq!(c.alpha2 == 0.0, p.lambda == 0.0);
        }

        #[test]
        fn fundamental_price_increasing(raw in valid_raw(), h in 1e-4..1e-2f64) {
            let p = raw.validate().unwrap().params;
            let base = fundamental_price(&p);
            if let Ok(v) = (RawParams { beta: raw.beta + h, ..raw }).validate() {
                prop_assert!(fundamental_price(&v.params) > base);
            }
            if let Ok(v) = (RawParams { dividend: raw.dividend + h, ..raw }).validate() {
                prop_assert!(fundamental_price(&v.params) > base);
            }
        }

        #[test]
        fn case_ignores_money_scale(raw in valid_raw(), k in 0.01..1e4f64) {
            let p = raw.validate().unwrap().params;
            let q = RawParams { money_stock: raw.money_stock * k, ..raw }.validate().unwrap().params;
            prop_assert_eq!(case_of(&p), case_of(&q));
        }
    }
}
