//! Plant models and disturbance signals.
//!
//! A plant is the control-affine system `ξ̇ = f(ξ,d) + g(ξ)u`, `z = h(ξ,d)` together with the
//! state feedback `u = γ(ξ)` it is operated under. The Lur'e benchmark and a generic linear
//! plant are provided; other plants implement [`ControlAffinePlant`] directly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bounds::LipschitzCoefficients;
use crate::certificate::{CertificateConstants, CertificateParams, LyapunovPair};
use crate::error::{Error, Result};
use crate::scalar::{norm, Scalar};

/// State, input, disturbance and output dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub s: usize,
}

pub trait ControlAffinePlant<T: Scalar>: Send + Sync {
    fn dims(&self) -> Dims;

    /// `f(ξ, d)`.
    fn drift(&self, xi: &[T], d: &[T], out: &mut [T]);

    /// `g(ξ)` as an `n × m` row-major matrix.
    fn input_gain(&self, xi: &[T], out: &mut [T]);

    /// `z = h(ξ, d)`.
    fn output(&self, xi: &[T], d: &[T], out: &mut [T]);

    /// Controller `u = γ(ξ)`.
    fn feedback(&self, xi: &[T], out: &mut [T]);

    fn declared_lipschitz(&self) -> Option<LipschitzCoefficients<T>> {
        None
    }

    /// `g(ξ)·v`, written into `out`.
    fn input_effect(&self, xi: &[T], v: &[T], out: &mut [T]) {
        let Dims { n, m, .. } = self.dims();
        let mut g = vec![T::zero(); n * m];
        self.input_gain(xi, &mut g);
        for (i, o) in out.iter_mut().enumerate().take(n) {
            *o = (0..m).fold(T::zero(), |acc, j| acc + g[i * m + j] * v[j]);
        }
    }

    /// `f(ξ, d) + g(ξ)·u`, written into `out`.
    fn vector_field(&self, xi: &[T], u: &[T], d: &[T], out: &mut [T]) {
        let n = self.dims().n;
        let mut gu = vec![T::zero(); n];
        self.drift(xi, d, out);
        self.input_effect(xi, u, &mut gu);
        for (o, v) in out.iter_mut().zip(gu) {
            *o = *o + v;
        }
    }

    /// Closed loop under sampled feedback: `f_s(ξ, ε, d) = f(ξ,d) + g(ξ)γ(ξ+ε)`.
    fn sampled_field(&self, xi: &[T], eps: &[T], d: &[T], out: &mut [T]) {
        let Dims { m, .. } = self.dims();
        let held: Vec<T> = xi.iter().zip(eps).map(|(&a, &b)| a + b).collect();
        let mut u = vec![T::zero(); m];
        self.feedback(&held, &mut u);
        self.vector_field(xi, &u, d, out);
    }

    /// Checks `f(0,0) = 0` and `h(0,0) = 0`.
    fn check_equilibrium(&self) -> Result<()> {
        let Dims { n, q, s, .. } = self.dims();
        let zx = vec![T::zero(); n];
        let zd = vec![T::zero(); q];
        let mut f = vec![T::zero(); n];
        let mut h = vec![T::zero(); s];
        self.drift(&zx, &zd, &mut f);
        self.output(&zx, &zd, &mut h);
        if norm(&f) != T::zero() || norm(&h) != T::zero() {
            return Err(Error::Domain("plant requires f(0,0) = 0 and h(0,0) = 0".into()));
        }
        Ok(())
    }
}

/// Sector nonlinearity `H(r) = 2r` for `|r| ≤ h*`, `±h* + r` outside.
pub fn lure_h<T: Scalar>(r: T, h_star: T) -> T {
    if r > h_star {
        h_star + r
    } else if r < -h_star {
        -h_star + r
    } else {
        T::lit(2.0) * r
    }
}

/// `∫₀^x H(r) dr`.
pub fn lure_h_integral<T: Scalar>(x: T, h_star: T) -> T {
    let a = x.abs();
    if a <= h_star {
        a * a
    } else {
        h_star * a + a * a / T::lit(2.0) - h_star * h_star / T::lit(2.0)
    }
}

/// Second-order Lur'e system `ξ̇ = (ξ₂, −H(ξ₁) + d + u)`, `z = ξ₁`, `γ(ξ) = −ξ₂`.
#[derive(Debug, Clone, Copy)]
pub struct LurePlant<T> {
    pub h_star: T,
}

pub fn lure_plant<T: Scalar>(h_star: T) -> Result<LurePlant<T>> {
    if !(h_star >= T::zero()) {
        return Err(Error::Domain(format!("h_star must be nonnegative, got {h_star}")));
    }
    Ok(LurePlant { h_star })
}

impl<T: Scalar> LurePlant<T> {
    pub fn nonlinearity(&self, r: T) -> T {
        lure_h(r, self.h_star)
    }
}

impl<T: Scalar> ControlAffinePlant<T> for LurePlant<T> {
    fn dims(&self) -> Dims {
        Dims { n: 2, m: 1, q: 1, s: 1 }
    }

    fn drift(&self, xi: &[T], d: &[T], out: &mut [T]) {
        out[0] = xi[1];
        out[1] = -self.nonlinearity(xi[0]) + d[0];
    }

    fn input_gain(&self, _xi: &[T], out: &mut [T]) {
        out[0] = T::zero();
        out[1] = T::one();
    }

    fn output(&self, xi: &[T], _d: &[T], out: &mut [T]) {
        out[0] = xi[0];
    }

    fn feedback(&self, xi: &[T], out: &mut [T]) {
        out[0] = -xi[1];
    }

    fn declared_lipschitz(&self) -> Option<LipschitzCoefficients<T>> {
        LipschitzCoefficients::new(T::lit(3.0), T::one(), T::one()).ok()
    }

    fn input_effect(&self, _xi: &[T], v: &[T], out: &mut [T]) {
        out[0] = T::zero();
        out[1] = v[0];
    }

    fn vector_field(&self, xi: &[T], u: &[T], d: &[T], out: &mut [T]) {
        out[0] = xi[1];
        out[1] = -self.nonlinearity(xi[0]) + d[0] + u[0];
    }

    fn sampled_field(&self, xi: &[T], eps: &[T], d: &[T], out: &mut [T]) {
        out[0] = xi[1];
        out[1] = -self.nonlinearity(xi[0]) + d[0] - (xi[1] + eps[1]);
    }
}

/// Eigenvalues `(min, max)` of the symmetric matrix `[a b; b c]`.
pub fn sym2_eigenvalues<T: Scalar>(a: T, b: T, c: T) -> (T, T) {
    let mean = (a + c) / T::lit(2.0);
    let rad = (((a - c) / T::lit(2.0)).powi(2) + b * b).sqrt();
    (mean - rad, mean + rad)
}

/// Lyapunov pair of the Lur'e benchmark:
/// `V_s = (υ₁/2)ξᵀPξ + 2υ₁∫₀^{ξ₁}H`, `P = [1 1; 1 2]`, `V_c = V_s / (υ₁(1 − n₂))`.
#[derive(Debug, Clone, Copy)]
pub struct LureLyapunov<T> {
    pub upsilon1: T,
    pub n2: T,
    pub h_star: T,
}

impl<T: Scalar> LureLyapunov<T> {
    fn quad(xi: &[T]) -> T {
        xi[0] * xi[0] + T::lit(2.0) * xi[0] * xi[1] + T::lit(2.0) * xi[1] * xi[1]
    }

    /// Class-K lower bound `r ↦ κ r²` on `V_s + λV_c` using `λ_min(P)`.
    pub fn combined_lower_bound(&self, lambda: T) -> impl Fn(T) -> T + Copy {
        let (pmin, _) = sym2_eigenvalues(T::one(), T::one(), T::lit(2.0));
        let k = (T::one() + lambda / (self.upsilon1 * (T::one() - self.n2)))
            * self.upsilon1
            / T::lit(2.0)
            * pmin;
        move |r: T| k * r * r
    }
}

impl<T: Scalar> LyapunovPair<T> for LureLyapunov<T> {
    fn v_s(&self, xi: &[T]) -> T {
        self.upsilon1 / T::lit(2.0) * Self::quad(xi)
            + T::lit(2.0) * self.upsilon1 * lure_h_integral(xi[0], self.h_star)
    }

    fn v_c(&self, xi: &[T]) -> T {
        self.v_s(xi) / (self.upsilon1 * (T::one() - self.n2))
    }

    fn grad_v_c(&self, xi: &[T], out: &mut [T]) {
        // ∇V_s / υ₁ = Pξ + (2H(ξ₁), 0)
        let k = T::one() / (T::one() - self.n2);
        out[0] = k * (xi[0] + xi[1] + T::lit(2.0) * lure_h(xi[0], self.h_star));
        out[1] = k * (xi[0] + T::lit(2.0) * xi[1]);
    }
}

/// Design knobs of the Lur'e certificate.
#[derive(Debug, Clone, Copy)]
pub struct LureDesign<T> {
    pub upsilon1: T,
    pub n1: T,
    pub n2: T,
    pub sigma: T,
    pub mu_d: T,
    pub lambda: T,
    pub h_star: T,
}

impl LureDesign<f64> {
    /// Benchmark values: υ₁ = 3.6e-3, n₁ = 1, n₂ = 0.47, σ = 0.99, μ_d = 5, λ = 4.7e-3, h* = 0.3.
    pub fn benchmark() -> Self {
        Self {
            upsilon1: 3.6e-3,
            n1: 1.0,
            n2: 0.47,
            sigma: 0.99,
            mu_d: 5.0,
            lambda: 4.7e-3,
            h_star: 0.3,
        }
    }
}

/// Continuous-time gain level squared: `μ² = (1/(1−n₂))(1/(4n₁) + 1/n₂)`.
pub fn lure_mu_squared<T: Scalar>(n1: T, n2: T) -> T {
    (T::one() / (T::one() - n2)) * (T::one() / (T::lit(4.0) * n1) + T::one() / n2)
}

/// Raw (`υ₁ = 1`) certificate parameters of the Lur'e plant, before scaling and validation.
pub fn lure_raw_params<T: Scalar>(design: &LureDesign<T>) -> Result<CertificateParams<T>> {
    let LureDesign { n1, n2, sigma, mu_d, lambda, .. } = *design;
    if !(n1 > T::zero()) || !(n2 > T::zero() && n2 < T::one()) {
        return Err(Error::Domain(format!("need n1 > 0 and 0 < n2 < 1, got n1={n1}, n2={n2}")));
    }
    let (_, emax) = sym2_eigenvalues(T::lit(5.0), T::one(), T::lit(2.0));
    let (_, pnorm) = sym2_eigenvalues(T::one(), T::one(), T::lit(2.0));
    let cbar1 = emax / T::lit(2.0);
    Ok(CertificateParams {
        c1: T::lit(0.5),
        c2: T::lit(5.0),
        c3: T::lit(5.0),
        cbar1,
        // c̄₂ = c̄₁ / (υ₁(1−n₂)) is invariant under the υ₁ scaling.
        cbar2: cbar1 / (T::one() - n2),
        cbar3: (pnorm + T::lit(4.0)) / (T::one() - n2),
        mu: lure_mu_squared(n1, n2).sqrt(),
        mu_d,
        p: T::lit(2.0),
        sigma,
        lambda,
    })
}

/// Validated certificate constants and Lyapunov pair of the Lur'e benchmark.
pub fn lure_certificate<T: Scalar>(
    design: &LureDesign<T>,
) -> Result<(CertificateConstants<T>, LureLyapunov<T>)> {
    if !(design.upsilon1 > T::zero()) {
        return Err(Error::Domain("upsilon1 must be positive".into()));
    }
    let raw = CertificateConstants::unchecked(lure_raw_params(design)?);
    let consts = raw.scale_vs(design.upsilon1)?.validated()?;
    let lyap = LureLyapunov { upsilon1: design.upsilon1, n2: design.n2, h_star: design.h_star };
    Ok((consts, lyap))
}

/// Linear plant `ξ̇ = Aξ + Bu + Ed`, `z = Cξ + Dd`, `u = Kξ` (all row-major).
#[derive(Debug, Clone)]
pub struct LinearPlant<T> {
    pub dims: Dims,
    pub a: Vec<T>,
    pub b: Vec<T>,
    pub e: Vec<T>,
    pub c: Vec<T>,
    pub d: Vec<T>,
    pub k: Vec<T>,
}

fn matvec<T: Scalar>(mat: &[T], cols: usize, v: &[T], out: &mut [T]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..cols).fold(T::zero(), |acc, j| acc + mat[i * cols + j] * v[j]);
    }
}

impl<T: Scalar> LinearPlant<T> {
    pub fn new(
        dims: Dims,
        a: Vec<T>,
        b: Vec<T>,
        e: Vec<T>,
        c: Vec<T>,
        d: Vec<T>,
        k: Vec<T>,
    ) -> Result<Self> {
        let Dims { n, m, q, s } = dims;
        let ok = a.len() == n * n
            && b.len() == n * m
            && e.len() == n * q
            && c.len() == s * n
            && d.len() == s * q
            && k.len() == m * n;
        if !ok {
            return Err(Error::Domain("linear plant matrix dimensions inconsistent".into()));
        }
        Ok(Self { dims, a, b, e, c, d, k })
    }
}

impl<T: Scalar> ControlAffinePlant<T> for LinearPlant<T> {
    fn dims(&self) -> Dims {
        self.dims
    }

    fn drift(&self, xi: &[T], d: &[T], out: &mut [T]) {
        let Dims { n, q, .. } = self.dims;
        let mut ed = vec![T::zero(); n];
        matvec(&self.a, n, xi, out);
        matvec(&self.e, q, d, &mut ed);
        for (o, v) in out.iter_mut().zip(ed) {
            *o = *o + v;
        }
    }

    fn input_gain(&self, _xi: &[T], out: &mut [T]) {
        out.copy_from_slice(&self.b);
    }

    fn output(&self, xi: &[T], d: &[T], out: &mut [T]) {
        let Dims { n, q, s, .. } = self.dims;
        let mut dd = vec![T::zero(); s];
        matvec(&self.c, n, xi, out);
        matvec(&self.d, q, d, &mut dd);
        for (o, v) in out.iter_mut().zip(dd) {
            *o = *o + v;
        }
    }

    fn feedback(&self, xi: &[T], out: &mut [T]) {
        matvec(&self.k, self.dims.n, xi, out);
    }
}

/// Disturbance signal description.
#[derive(Debug, Clone, PartialEq)]
pub enum DisturbanceSpec {
    Zero,
    /// Zero-mean Gaussian samples held over `hold` seconds on `[0, window)`, zero afterwards.
    /// `hold = None` means the integrator step.
    Gaussian { variance: f64, window: f64, hold: Option<f64>, seed: u64 },
    Constant { value: Vec<f64> },
    /// Piecewise-constant table: value `values[i]` from `times[i]` on.
    Table { times: Vec<f64>, values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone)]
enum Realized<T> {
    Zero,
    Constant(Vec<T>),
    Held { period: T, samples: Vec<T> },
    Table { times: Vec<T>, values: Vec<T> },
}

/// A realized, piecewise-constant disturbance `d(t)`.
#[derive(Debug, Clone)]
pub struct Disturbance<T> {
    dim: usize,
    kind: Realized<T>,
    sup_norm: T,
}

impl<T: Scalar> Disturbance<T> {
    pub fn zero(dim: usize) -> Self {
        Self { dim, kind: Realized::Zero, sup_norm: T::zero() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `‖d‖_∞` of this realization.
    pub fn sup_norm(&self) -> T {
        self.sup_norm
    }

    pub fn value(&self, t: T, out: &mut [T]) {
        match &self.kind {
            Realized::Zero => out.iter_mut().for_each(|o| *o = T::zero()),
            Realized::Constant(v) => out.copy_from_slice(v),
            Realized::Held { period, samples } => {
                let count = samples.len() / self.dim;
                let idx = (t / *period).floor();
                if t < T::zero() || idx.as_f64() >= count as f64 {
                    out.iter_mut().for_each(|o| *o = T::zero());
                } else {
                    let i = idx.as_f64() as usize;
                    out.copy_from_slice(&samples[i * self.dim..(i + 1) * self.dim]);
                }
            }
            Realized::Table { times, values } => {
                let i = times.partition_point(|&s| s <= t);
                if i == 0 {
                    out.iter_mut().for_each(|o| *o = T::zero());
                } else {
                    out.copy_from_slice(&values[(i - 1) * self.dim..i * self.dim]);
                }
            }
        }
    }

    /// First instant strictly after `t` at which the signal may jump.
    pub fn next_breakpoint(&self, t: T) -> Option<T> {
        match &self.kind {
            Realized::Zero | Realized::Constant(_) => None,
            Realized::Held { period, samples } => {
                let count = (samples.len() / self.dim) as f64;
                let next = (t / *period).floor() + T::one();
                (next.as_f64() <= count).then(|| next * *period)
            }
            Realized::Table { times, .. } => times.iter().copied().find(|&s| s > t),
        }
    }

    /// Sample variance of the held draws, for statistics checks.
    pub fn sample_moments(&self) -> Option<(T, T)> {
        let Realized::Held { samples, .. } = &self.kind else { return None };
        let n = T::from_usize(samples.len())?;
        let mean = samples.iter().fold(T::zero(), |a, &x| a + x) / n;
        let var = samples.iter().fold(T::zero(), |a, &x| a + (x - mean) * (x - mean)) / (n - T::one());
        Some((mean, var))
    }
}

/// Realizes `spec` for a run of `duration` seconds integrated with step `h`.
pub fn realize_disturbance<T: Scalar>(
    spec: &DisturbanceSpec,
    dim: usize,
    duration: T,
    h: T,
) -> Result<Disturbance<T>> {
    match spec {
        DisturbanceSpec::Zero => Ok(Disturbance::zero(dim)),
        DisturbanceSpec::Constant { value } => {
            if value.len() != dim {
                return Err(Error::Domain("constant disturbance has wrong dimension".into()));
            }
            let v: Vec<T> = value.iter().map(|&x| T::lit(x)).collect();
            let sup = norm(&v);
            Ok(Disturbance { dim, kind: Realized::Constant(v), sup_norm: sup })
        }
        DisturbanceSpec::Gaussian { variance, window, hold, seed } => {
            if !(*variance >= 0.0) || !(*window >= 0.0) {
                return Err(Error::Domain("gaussian disturbance needs variance, window >= 0".into()));
            }
            let period = hold.map(T::lit).unwrap_or(h);
            if !(period > T::zero()) {
                return Err(Error::Domain("hold period must be positive".into()));
            }
            let span = T::lit(*window).min(duration).max(T::zero());
            let count = (span / period).ceil().as_f64() as usize;
            let std = variance.sqrt();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let samples: Vec<T> = (0..count * dim)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    T::lit(std * z)
                })
                .collect();
            let sup = samples
                .chunks(dim.max(1))
                .map(norm)
                .fold(T::zero(), |a, b| a.max(b));
            Ok(Disturbance { dim, kind: Realized::Held { period, samples }, sup_norm: sup })
        }
        DisturbanceSpec::Table { times, values } => {
            if times.len() != values.len() || values.iter().any(|v| v.len() != dim) {
                return Err(Error::Domain("disturbance table is ragged".into()));
            }
            if times.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::Domain("disturbance table times must increase".into()));
            }
            let vals: Vec<T> = values.iter().flatten().map(|&x| T::lit(x)).collect();
            let sup = vals.chunks(dim.max(1)).map(norm).fold(T::zero(), |a, b| a.max(b));
            Ok(Disturbance {
                dim,
                kind: Realized::Table { times: times.iter().map(|&x| T::lit(x)).collect(), values: vals },
                sup_norm: sup,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn h_branches() {
        assert!((lure_h(0.2, 0.3) - 0.4_f64).abs() < 1e-15);
        assert!((lure_h(1.0, 0.3) - 1.3_f64).abs() < 1e-15);
        assert!((lure_h(-1.0, 0.3) + 1.3_f64).abs() < 1e-15);
    }

    #[test]
    fn h_sector_and_continuity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let r: f64 = rng.gen_range(-5.0..5.0);
            let v = r * lure_h(r, 0.3);
            assert!(v >= r * r - 1e-12 && v <= 2.0 * r * r + 1e-12);
        }
        let e = 1e-12;
        assert!((lure_h(0.3 + e, 0.3) - lure_h(0.3 - e, 0.3_f64)).abs() < 1e-11);
        assert!((lure_h(-0.3 + e, 0.3) - lure_h(-0.3 - e, 0.3_f64)).abs() < 1e-11);
    }

    #[test]
    fn h_integral_matches_quadrature() {
        for &x in &[-2.0_f64, -0.3, -0.1, 0.0, 0.25, 0.3, 0.7, 3.0] {
            let n = 20_000;
            let dx = x / n as f64;
            let quad: f64 = (0..n).map(|i| lure_h((i as f64 + 0.5) * dx, 0.3) * dx).sum();
            assert!((quad - lure_h_integral(x, 0.3)).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn lure_equilibrium() {
        let p = lure_plant(0.3_f64).unwrap();
        p.check_equilibrium().unwrap();
        assert!(lure_plant(-1.0_f64).is_err());
    }

    #[test]
    fn mu_squared_value() {
        let mu2 = lure_mu_squared(1.0_f64, 0.47);
        assert!((mu2 - 4.486_150_140_505_821).abs() < 1e-12);
    }

    #[test]
    fn cbar1_matches_eigenvalue() {
        let (c, _) = lure_certificate(&LureDesign::benchmark()).unwrap();
        // λ_max([5 1; 1 2]) = (7 + √13)/2
        let expect = 1.8e-3 * (7.0 + 13f64.sqrt()) / 2.0;
        assert!((c.cbar1 - expect).abs() < 1e-15);
        assert!((c.c1 - 1.8e-3).abs() < 1e-15);
        assert!((c.c2 - 1.8e-2).abs() < 1e-15 && (c.c3 - 1.8e-2).abs() < 1e-15);
    }

    #[test]
    fn vs_positive_definite() {
        let lyap = LureLyapunov { upsilon1: 3.6e-3, n2: 0.47, h_star: 0.3 };
        assert_eq!(lyap.v_s(&[0.0, 0.0]), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            if x[0] == 0.0 && x[1] == 0.0 {
                continue;
            }
            assert!(lyap.v_s(&x) > 0.0);
        }
    }

    #[test]
    fn grad_vc_matches_finite_difference() {
        let lyap = LureLyapunov { upsilon1: 3.6e-3, n2: 0.47, h_star: 0.3 };
        let mut g = [0.0f64; 2];
        for x in [[0.1, -0.2], [0.9, 0.4], [-1.5, 2.0]] {
            lyap.grad_v_c(&x, &mut g);
            for i in 0..2 {
                let mut a = x;
                let mut b = x;
                a[i] += 1e-6;
                b[i] -= 1e-6;
                let fd = (lyap.v_c(&a) - lyap.v_c(&b)) / 2e-6;
                assert!((fd - g[i]).abs() < 1e-6, "{fd} vs {}", g[i]);
            }
        }
    }

    #[test]
    fn disturbance_zero_and_determinism() {
        let z: Disturbance<f64> = realize_disturbance(&DisturbanceSpec::Zero, 1, 10.0, 1e-3).unwrap();
        let mut d = [1.0];
        z.value(3.0, &mut d);
        assert_eq!(d[0], 0.0);

        let spec = DisturbanceSpec::Gaussian { variance: 1.0, window: 10.0, hold: None, seed: 11 };
        let a: Disturbance<f64> = realize_disturbance(&spec, 1, 20.0, 1e-3).unwrap();
        let b: Disturbance<f64> = realize_disturbance(&spec, 1, 20.0, 1e-3).unwrap();
        let (mut x, mut y) = ([0.0], [0.0]);
        for i in 0..20_000 {
            let t = i as f64 * 1e-3 + 5e-4;
            a.value(t, &mut x);
            b.value(t, &mut y);
            assert_eq!(x[0].to_bits(), y[0].to_bits());
            if t >= 10.0 {
                assert_eq!(x[0], 0.0);
            }
        }
        assert_eq!(a.sup_norm(), b.sup_norm());
    }

    #[test]
    fn gaussian_sample_variance() {
        let spec = DisturbanceSpec::Gaussian { variance: 1.0, window: 100.0, hold: None, seed: 5 };
        let d: Disturbance<f64> = realize_disturbance(&spec, 1, 100.0, 1e-4).unwrap();
        let (mean, var) = d.sample_moments().unwrap();
        assert!(mean.abs() < 0.01);
        assert!((var - 1.0).abs() < 0.05, "var={var}");
    }

    #[test]
    fn table_disturbance() {
        let spec = DisturbanceSpec::Table { times: vec![1.0, 2.0], values: vec![vec![3.0], vec![-4.0]] };
        let d: Disturbance<f64> = realize_disturbance(&spec, 1, 5.0, 1e-3).unwrap();
        let mut v = [0.0];
        d.value(0.5, &mut v);
        assert_eq!(v[0], 0.0);
        d.value(1.5, &mut v);
        assert_eq!(v[0], 3.0);
        d.value(2.0, &mut v);
        assert_eq!(v[0], -4.0);
        assert_eq!(d.sup_norm(), 4.0);
        assert_eq!(d.next_breakpoint(1.0), Some(2.0));
    }
}
