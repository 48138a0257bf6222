//! Lyapunov certificate constants, the admissible `λ` interval, and the `V_s` scaling device.

use crate::error::{Error, Result};
use crate::plants::{ControlAffinePlant, Dims};
use crate::scalar::{dot, norm, norm_pow, Scalar};

/// The pair `(V_s, V_c)` certifying ISS of the sampled loop and the continuous-time gain.
pub trait LyapunovPair<T: Scalar>: Send + Sync {
    fn v_s(&self, xi: &[T]) -> T;
    fn v_c(&self, xi: &[T]) -> T;
    fn grad_v_c(&self, xi: &[T], out: &mut [T]);
}

/// Raw scalar inputs of a certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateParams<T> {
    pub c1: T,
    pub c2: T,
    pub c3: T,
    pub cbar1: T,
    pub cbar2: T,
    pub cbar3: T,
    /// Continuous-time gain level `μ`.
    pub mu: T,
    /// Targeted event-based gain level `μ_d`.
    pub mu_d: T,
    pub p: T,
    pub sigma: T,
    pub lambda: T,
}

/// Certificate constants. `q` and `ν` are always recomputed from the stored values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateConstants<T> {
    pub c1: T,
    pub c2: T,
    pub c3: T,
    pub cbar1: T,
    pub cbar2: T,
    pub cbar3: T,
    pub mu: T,
    pub mu_d: T,
    pub p: T,
    pub sigma: T,
    pub lambda: T,
    checked: bool,
}

/// Open interval `(lower, upper)` of admissible `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaRange<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> LambdaRange<T> {
    pub fn is_empty(&self) -> bool {
        !(self.lower < self.upper)
    }

    pub fn contains(&self, lambda: T) -> bool {
        lambda > self.lower && lambda < self.upper
    }
}

impl<T: Scalar> CertificateConstants<T> {
    /// Validated construction: positivity, `σ ∈ (0,1)`, `p > 1`, `μ_d > μ`, `λ` admissible.
    pub fn new(params: CertificateParams<T>) -> Result<Self> {
        Self::unchecked(params).validated()
    }

    /// Skips validation. Downstream reports carry [`Self::is_checked`] so such runs stay flagged.
    pub fn unchecked(params: CertificateParams<T>) -> Self {
        let CertificateParams { c1, c2, c3, cbar1, cbar2, cbar3, mu, mu_d, p, sigma, lambda } = params;
        Self { c1, c2, c3, cbar1, cbar2, cbar3, mu, mu_d, p, sigma, lambda, checked: false }
    }

    pub fn validated(self) -> Result<Self> {
        let named = [
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("cbar1", self.cbar1),
            ("cbar2", self.cbar2),
            ("cbar3", self.cbar3),
            ("mu", self.mu),
            ("mu_d", self.mu_d),
            ("sigma", self.sigma),
            ("lambda", self.lambda),
        ];
        for (name, value) in named {
            if !(value > T::zero() && value.is_finite()) {
                return Err(Error::InfeasibleCertificate { name, value: value.as_f64() });
            }
        }
        if !(self.sigma < T::one()) {
            return Err(Error::Domain(format!("sigma must lie in (0,1), got {}", self.sigma)));
        }
        if !(self.p > T::one()) || !self.p.is_finite() {
            return Err(Error::UnsupportedExponent(self.p.as_f64()));
        }
        let range = self.lambda_range()?;
        if range.is_empty() {
            return Err(Error::EmptyLambdaRange {
                lower: range.lower.as_f64(),
                upper: range.upper.as_f64(),
            });
        }
        if !range.contains(self.lambda) {
            return Err(Error::LambdaOutOfRange {
                lambda: self.lambda.as_f64(),
                lower: range.lower.as_f64(),
                upper: range.upper.as_f64(),
            });
        }
        Ok(Self { checked: true, ..self })
    }

    pub fn is_checked(&self) -> bool {
        self.checked
    }

    pub fn params(&self) -> CertificateParams<T> {
        CertificateParams {
            c1: self.c1,
            c2: self.c2,
            c3: self.c3,
            cbar1: self.cbar1,
            cbar2: self.cbar2,
            cbar3: self.cbar3,
            mu: self.mu,
            mu_d: self.mu_d,
            p: self.p,
            sigma: self.sigma,
            lambda: self.lambda,
        }
    }

    /// Hölder conjugate `q = p/(p−1)`; infinite for `p = 1`.
    pub fn q(&self) -> T {
        self.p / (self.p - T::one())
    }

    /// `ν = c₁(1−σ)/(c̄₁+c̄₂)`, the minimal slope of `α₁`.
    pub fn nu(&self) -> T {
        self.c1 * (T::one() - self.sigma) / (self.cbar1 + self.cbar2)
    }

    pub fn mu_pow_p(&self) -> T {
        self.mu.powf(self.p)
    }

    pub fn mu_d_pow_p(&self) -> T {
        self.mu_d.powf(self.p)
    }

    /// Admissible `λ` interval `(c₃/(μ_d^p − μ^p), (c₁σq)^{1/q}/c̄₃)`.
    pub fn lambda_range(&self) -> Result<LambdaRange<T>> {
        if !(self.mu_d > self.mu) {
            return Err(Error::InfeasibleTarget { mu: self.mu.as_f64(), mu_d: self.mu_d.as_f64() });
        }
        if !(self.p > T::one()) {
            return Err(Error::UnsupportedExponent(self.p.as_f64()));
        }
        let q = self.q();
        let lower = self.c3 / (self.mu_d_pow_p() - self.mu_pow_p());
        let upper = (self.c1 * self.sigma * q).powf(T::one() / q) / self.cbar3;
        Ok(LambdaRange { lower, upper })
    }

    /// Scales `V_s` by `υ`: `c₁, c₂, c₃, c̄₁` are multiplied by `υ`, everything else is kept.
    /// Validated constants are re-validated after scaling.
    pub fn scale_vs(&self, upsilon: T) -> Result<Self> {
        if !(upsilon > T::zero()) || !upsilon.is_finite() {
            return Err(Error::Domain(format!("scaling factor must be positive, got {upsilon}")));
        }
        let scaled = Self {
            c1: self.c1 * upsilon,
            c2: self.c2 * upsilon,
            c3: self.c3 * upsilon,
            cbar1: self.cbar1 * upsilon,
            checked: false,
            ..*self
        };
        if self.checked {
            scaled.validated()
        } else {
            Ok(scaled)
        }
    }
}

/// One sampled point `(ξ, ε, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe<T> {
    pub xi: Vec<T>,
    pub eps: Vec<T>,
    pub d: Vec<T>,
}

/// Worst-case residuals of the certificate inequalities over a probe set.
/// Each entry is `max(lhs − rhs)`; `≤ 0` means the inequality held at every probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionResiduals<T> {
    /// `∇V_s·f_s ≤ −c₁‖ξ‖^p + c₂‖ε‖^p + c₃‖d‖^p`
    pub iss: T,
    /// `∇V_c·f_c ≤ μ^p‖d‖^p − ‖z‖^p`
    pub gain: T,
    /// `V_s ≤ c̄₁‖ξ‖^p`
    pub vs_upper: T,
    /// `V_c ≤ c̄₂‖ξ‖^p`
    pub vc_upper: T,
    /// `‖∇V_c‖ ≤ c̄₃‖ξ‖^{p−1}`
    pub grad_upper: T,
    /// `−min(V_s, V_c)`
    pub negativity: T,
    /// Index of the probe attaining `iss`.
    pub worst_iss_probe: Option<usize>,
}

impl<T: Scalar> AssumptionResiduals<T> {
    pub fn max(&self) -> T {
        [self.iss, self.gain, self.vs_upper, self.vc_upper, self.grad_upper, self.negativity]
            .into_iter()
            .fold(T::neg_infinity(), T::max)
    }
}

/// Spot-checks the certificate inequalities at `probes`. `∇V_s` is not part of
/// [`LyapunovPair`]; it is approximated by central differences with step `1e-6·(1+‖ξ‖)`.
pub fn verify_assumptions_sampled<T, P, L>(
    plant: &P,
    consts: &CertificateConstants<T>,
    lyap: &L,
    probes: &[Probe<T>],
) -> Result<AssumptionResiduals<T>>
where
    T: Scalar,
    P: ControlAffinePlant<T> + ?Sized,
    L: LyapunovPair<T> + ?Sized,
{
    let Dims { n, q, s, .. } = plant.dims();
    let p = consts.p;
    let mut res = AssumptionResiduals {
        iss: T::neg_infinity(),
        gain: T::neg_infinity(),
        vs_upper: T::neg_infinity(),
        vc_upper: T::neg_infinity(),
        grad_upper: T::neg_infinity(),
        negativity: T::neg_infinity(),
        worst_iss_probe: None,
    };
    let mut fs = vec![T::zero(); n];
    let mut fc = vec![T::zero(); n];
    let mut grad_s = vec![T::zero(); n];
    let mut grad_c = vec![T::zero(); n];
    let mut z = vec![T::zero(); s];
    let zero_eps = vec![T::zero(); n];
    let step_floor = T::lit(1e-6).max(T::epsilon().cbrt());

    for (idx, probe) in probes.iter().enumerate() {
        if probe.xi.len() != n || probe.eps.len() != n || probe.d.len() != q {
            return Err(Error::Domain(format!("probe {idx} has inconsistent dimensions")));
        }
        let xi = &probe.xi;
        let nx = norm(xi);
        let nx_p = norm_pow(xi, p);

        let hstep = step_floor * (T::one() + nx);
        let mut shifted = xi.clone();
        for i in 0..n {
            shifted[i] = xi[i] + hstep;
            let fwd = lyap.v_s(&shifted);
            shifted[i] = xi[i] - hstep;
            let bwd = lyap.v_s(&shifted);
            shifted[i] = xi[i];
            grad_s[i] = (fwd - bwd) / (T::lit(2.0) * hstep);
        }

        plant.sampled_field(xi, &probe.eps, &probe.d, &mut fs);
        let iss = dot(&grad_s, &fs)
            - (-consts.c1 * nx_p + consts.c2 * norm_pow(&probe.eps, p) + consts.c3 * norm_pow(&probe.d, p));
        if iss > res.iss {
            res.iss = iss;
            res.worst_iss_probe = Some(idx);
        }

        plant.sampled_field(xi, &zero_eps, &probe.d, &mut fc);
        plant.output(xi, &probe.d, &mut z);
        lyap.grad_v_c(xi, &mut grad_c);
        let gain = dot(&grad_c, &fc) - (consts.mu_pow_p() * norm_pow(&probe.d, p) - norm_pow(&z, p));
        res.gain = res.gain.max(gain);

        let vs = lyap.v_s(xi);
        let vc = lyap.v_c(xi);
        res.vs_upper = res.vs_upper.max(vs - consts.cbar1 * nx_p);
        res.vc_upper = res.vc_upper.max(vc - consts.cbar2 * nx_p);
        res.grad_upper = res.grad_upper.max(norm(&grad_c) - consts.cbar3 * nx.powf(p - T::one()));
        res.negativity = res.negativity.max(-vs.min(vc));
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plants::{lure_raw_params, LureDesign};

    fn benchmark() -> CertificateConstants<f64> {
        crate::plants::lure_certificate(&LureDesign::benchmark()).unwrap().0
    }

    #[test]
    fn lambda_range_benchmark() {
        let r = benchmark().lambda_range().unwrap();
        // c₃/(μ_d² − μ²) and √(2c₁σ)/c̄₃ evaluated by hand
        let mu2 = (1.0 / 0.53) * (0.25 + 1.0 / 0.47);
        let lower = 1.8e-2 / (25.0 - mu2);
        let cbar3 = ((3.0 + 5f64.sqrt()) / 2.0 + 4.0) / 0.53;
        let upper = (2.0 * 1.8e-3 * 0.99_f64).sqrt() / cbar3;
        assert!((r.lower - lower).abs() < 1e-15);
        assert!((r.upper - upper).abs() < 1e-15);
        assert!(r.contains(4.7e-3));
        assert!((r.lower - 8.8e-4).abs() < 1e-5 && (r.upper - 4.8e-3).abs() < 5e-5);
    }

    #[test]
    fn lambda_range_rejects_equal_levels() {
        let mut p = benchmark().params();
        p.mu_d = p.mu;
        let c = CertificateConstants::unchecked(p);
        assert!(matches!(c.lambda_range(), Err(Error::InfeasibleTarget { .. })));
    }

    #[test]
    fn doubling_c3_doubles_lower_endpoint() {
        let base = benchmark();
        let mut p = base.params();
        p.c3 = 2.0 * p.c3;
        let r0 = base.lambda_range().unwrap();
        let r1 = CertificateConstants::unchecked(p).lambda_range().unwrap();
        assert!((r1.lower - 2.0 * r0.lower).abs() < 1e-18);
        assert_eq!(r1.upper, r0.upper);
    }

    #[test]
    fn scaling_identity_and_benchmark() {
        let c = benchmark();
        assert_eq!(c.scale_vs(1.0).unwrap(), c);
        let raw = CertificateConstants::unchecked(lure_raw_params(&LureDesign::benchmark()).unwrap());
        let s = raw.scale_vs(3.6e-3).unwrap();
        assert!((s.c1 - 1.8e-3).abs() < 1e-16);
        assert!((s.c2 - 1.8e-2).abs() < 1e-16 && (s.c3 - 1.8e-2).abs() < 1e-16);
        assert_eq!(s.cbar2, raw.cbar2);
        assert_eq!(s.cbar3, raw.cbar3);
        assert_eq!(s.mu, raw.mu);
        assert!(!s.is_checked());
    }

    #[test]
    fn scaling_inverse() {
        let raw = CertificateConstants::unchecked(lure_raw_params(&LureDesign::benchmark()).unwrap());
        let back = raw.scale_vs(7.3).unwrap().scale_vs(1.0 / 7.3).unwrap();
        for (a, b) in [(back.c1, raw.c1), (back.c2, raw.c2), (back.c3, raw.c3), (back.cbar1, raw.cbar1)] {
            assert!((a - b).abs() <= 1e-14 * b.abs());
        }
        assert!((back.nu() - raw.nu()).abs() <= 1e-14 * raw.nu());
    }

    #[test]
    fn nu_recomputed() {
        let c = benchmark();
        assert_eq!(c.nu(), c.c1 * (1.0 - c.sigma) / (c.cbar1 + c.cbar2));
        let s = c.scale_vs(0.5);
        // scaling by 1/2 moves λ out of range for validated constants
        assert!(s.is_err());
    }

    #[test]
    fn construction_rejects_bad_values() {
        let good = benchmark().params();
        let mut p = good;
        p.sigma = 1.0;
        assert!(CertificateConstants::new(p).is_err());
        let mut p = good;
        p.p = 1.0;
        assert!(matches!(CertificateConstants::new(p), Err(Error::UnsupportedExponent(_))));
        let mut p = good;
        p.lambda = 1e-2;
        assert!(matches!(CertificateConstants::new(p), Err(Error::LambdaOutOfRange { .. })));
        let mut p = good;
        p.c2 = -1.0;
        assert!(matches!(CertificateConstants::new(p), Err(Error::InfeasibleCertificate { name: "c2", .. })));
        assert!(CertificateConstants::new(good).unwrap().is_checked());
    }
}
