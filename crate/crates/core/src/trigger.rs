//! Dynamic triggering condition `Φ = k̄φ − k₁φ₁ − k₂φ₂` and its auxiliary variables.

use crate::bounds::Bound;
use crate::certificate::{CertificateConstants, LyapunovPair};
use crate::error::{Error, Result};
use crate::plants::ControlAffinePlant;
use crate::scalar::{norm, norm_pow, Scalar};

/// Class-K function used as `α₁` or `α₂`.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassK<T> {
    Linear(T),
    Power { coeff: T, exponent: T },
    /// `α(r) = 0`; allowed only where a preset asks for it.
    Zero,
    /// Piecewise-linear through the origin and the listed `(r, α(r))` knots,
    /// continued with the last slope.
    Table { knots: Vec<(T, T)> },
}

impl<T: Scalar> ClassK<T> {
    pub fn identity() -> Self {
        ClassK::Linear(T::one())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ClassK::Linear(a) if !(*a > T::zero()) => Err(Error::Config(format!("linear slope must be positive, got {a}"))),
            ClassK::Power { coeff, exponent } if !(*coeff > T::zero() && *exponent > T::zero()) => {
                Err(Error::Config("power class-K function needs positive coefficient and exponent".into()))
            }
            ClassK::Table { knots } => {
                let mut prev = (T::zero(), T::zero());
                if knots.is_empty() {
                    return Err(Error::Config("class-K table needs at least one knot".into()));
                }
                for &(r, v) in knots {
                    if !(r > prev.0 && v > prev.1) {
                        return Err(Error::Config("class-K table must be strictly increasing from the origin".into()));
                    }
                    prev = (r, v);
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn eval(&self, r: T) -> T {
        match self {
            ClassK::Linear(a) => *a * r,
            ClassK::Power { coeff, exponent } => {
                if r > T::zero() {
                    *coeff * r.powf(*exponent)
                } else {
                    -*coeff * (-r).powf(*exponent)
                }
            }
            ClassK::Zero => T::zero(),
            ClassK::Table { knots } => {
                let mut prev = (T::zero(), T::zero());
                for &(x, y) in knots {
                    if r <= x {
                        return prev.1 + (y - prev.1) * (r - prev.0) / (x - prev.0);
                    }
                    prev = (x, y);
                }
                let n = knots.len();
                let before = if n >= 2 { knots[n - 2] } else { (T::zero(), T::zero()) };
                let (x, y) = knots[n - 1];
                y + (y - before.1) / (x - before.0) * (r - x)
            }
        }
    }

    /// `α(r) ≥ ν r`: exact for the linear variant, checked on a grid otherwise.
    pub fn dominates_linear(&self, nu: T) -> bool {
        match self {
            ClassK::Linear(a) => *a >= nu,
            ClassK::Zero => nu <= T::zero(),
            _ => (0..=400).all(|i| {
                let r = T::lit(10f64.powf(-6.0 + 12.0 * i as f64 / 400.0));
                self.eval(r) >= nu * r
            }),
        }
    }
}

/// Time-varying threshold `δ_k(t)` used on `[t̂_k, t_{k+1})`. Time is global.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaSchedule<T> {
    Constant(T),
    /// `D e^{−ϱt}`.
    Exponential { scale: T, rate: T },
    /// `D ϱⁿ/n!` with `n = ⌈t/n̄⌉`.
    FactorialStaircase { scale: T, base: T, period: T },
    /// `δ*` on `[0, T°)`, `fallback` afterwards.
    Enlargement { delta_star: T, horizon: T, fallback: T },
    /// Piecewise constant, `values[i]` on `[times[i], times[i+1])`; `times[0]` must be 0.
    Table { times: Vec<T>, values: Vec<T> },
}

fn staircase_value<T: Scalar>(scale: T, base: T, n: u32) -> T {
    (1..=n).fold(scale, |acc, j| acc * base / T::lit(j as f64))
}

impl<T: Scalar> DeltaSchedule<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("delta schedule: {what}")));
        match self {
            DeltaSchedule::Constant(v) if !(*v >= T::zero()) => bad("constant must be nonnegative"),
            DeltaSchedule::Exponential { scale, rate } if !(*scale > T::zero() && *rate >= T::zero()) => {
                bad("exponential needs scale > 0, rate >= 0")
            }
            DeltaSchedule::FactorialStaircase { scale, base, period }
                if !(*scale > T::zero() && *base > T::zero() && *period > T::zero()) =>
            {
                bad("staircase needs positive scale, base and period")
            }
            DeltaSchedule::Enlargement { delta_star, horizon, fallback }
                if !(*delta_star > T::zero() && *horizon > T::zero() && *fallback >= T::zero()) =>
            {
                bad("enlargement needs delta_star > 0, horizon > 0, fallback >= 0")
            }
            DeltaSchedule::Table { times, values } => {
                if times.is_empty() || times.len() != values.len() || times[0] != T::zero() {
                    return bad("table needs matching nonempty times/values starting at 0");
                }
                if times.windows(2).any(|w| !(w[0] < w[1])) || values.iter().any(|v| !(*v >= T::zero())) {
                    return bad("table times must increase and values be nonnegative");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `δ(t)` exactly as written, left-continuous at staircase jumps.
    pub fn value(&self, t: T) -> T {
        match self {
            DeltaSchedule::Constant(v) => *v,
            DeltaSchedule::Exponential { scale, rate } => *scale * (-*rate * t).exp(),
            DeltaSchedule::FactorialStaircase { scale, base, period } => {
                let n = (t / *period).ceil().max(T::zero());
                staircase_value(*scale, *base, n.as_f64() as u32)
            }
            DeltaSchedule::Enlargement { delta_star, horizon, fallback } => {
                if t < *horizon {
                    *delta_star
                } else {
                    *fallback
                }
            }
            DeltaSchedule::Table { times, values } => {
                let i = times.partition_point(|&s| s <= t).max(1);
                values[i - 1]
            }
        }
    }

    /// Value at `t` for a `t` inside the open piece containing `inside`.
    /// Continuous schedules ignore `inside`; piecewise-constant ones are evaluated there.
    #[inline]
    pub fn value_on_piece(&self, t: T, inside: T) -> T {
        match self {
            DeltaSchedule::Exponential { .. } => self.value(t),
            DeltaSchedule::Constant(v) => *v,
            _ => self.value(inside),
        }
    }

    /// First instant strictly after `t` where the schedule may jump.
    pub fn next_breakpoint(&self, t: T) -> Option<T> {
        match self {
            DeltaSchedule::Constant(_) | DeltaSchedule::Exponential { .. } => None,
            DeltaSchedule::FactorialStaircase { period, .. } => {
                let k = (t / *period).floor() + T::one();
                let mut b = k * *period;
                if b <= t {
                    b = b + *period;
                }
                Some(b)
            }
            DeltaSchedule::Enlargement { horizon, .. } => (t < *horizon).then_some(*horizon),
            DeltaSchedule::Table { times, .. } => times.iter().copied().find(|&s| s > t),
        }
    }

    /// `∫_a^b δ(s) ds`.
    pub fn integral(&self, a: T, b: T) -> T {
        if !(b > a) {
            return T::zero();
        }
        match self {
            DeltaSchedule::Constant(v) => *v * (b - a),
            DeltaSchedule::Exponential { scale, rate } => {
                if *rate == T::zero() {
                    *scale * (b - a)
                } else {
                    *scale * ((-*rate * a).exp() - (-*rate * b).exp()) / *rate
                }
            }
            _ => {
                let mut acc = T::zero();
                let mut s = a;
                while s < b {
                    let e = self.next_breakpoint(s).map_or(b, |x| x.min(b));
                    acc = acc + self.value_on_piece(s, s + (e - s) / T::lit(2.0)) * (e - s);
                    s = e;
                }
                acc
            }
        }
    }

    /// `sup_t δ(t)` on `[0, ∞)`.
    pub fn sup(&self) -> T {
        match self {
            DeltaSchedule::Constant(v) => *v,
            DeltaSchedule::Exponential { scale, .. } => *scale,
            DeltaSchedule::FactorialStaircase { scale, base, .. } => {
                // ϱⁿ/n! peaks at n = ⌊ϱ⌋.
                let peak = base.floor().max(T::zero()).as_f64() as u32;
                staircase_value(*scale, *base, peak).max(*scale)
            }
            DeltaSchedule::Enlargement { delta_star, fallback, .. } => delta_star.max(*fallback),
            DeltaSchedule::Table { values, .. } => values.iter().copied().fold(T::zero(), T::max),
        }
    }
}

/// How `φ₃` enters `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phi3Mode {
    /// `∇V_{c,λ}(ξ)·g(ξ)(γ(ξ+ε) − γ(ξ))`.
    Affine,
    /// `λ₂‖∇V_{c,λ}(ξ)‖‖ε‖`.
    NonAffine,
    Off,
}

/// Dynamics of `φ₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phi2Mode {
    /// Decay toward `δ̄` before `t̂_k`, pinned to `δ_k(t)` afterwards.
    Standard,
    /// `φ̇₂ = −α₂(φ₂)` throughout, no phase switch.
    FreeDecay,
}

/// `r_k`, the value `φ₁` is reset to at a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResetR<T> {
    Zero,
    Constant(T),
    /// `r_k = first · ratioᵏ`.
    Geometric { first: T, ratio: T },
}

/// `r̂_k`, the value of `φ₁` after `t̂_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResetRHat {
    /// `r̂_k = φ₁(t̂_k⁻)`.
    Carryover,
    Zero,
}

/// `s_k`, the value `φ₂` is reset to at a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResetS<T> {
    Constant(T),
    /// The current pre-switch level (`δ̄`, or `δ*` before `T°`).
    Level,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budgets<T> {
    pub theta1: T,
    pub theta2: T,
    pub theta3: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriggerConfig<T> {
    pub k_bar: T,
    pub k1: T,
    pub k2: T,
    pub alpha1: ClassK<T>,
    pub alpha2: ClassK<T>,
    pub delta_bar: T,
    pub schedule: DeltaSchedule<T>,
    /// Offset of the phase switch `t̂_k = t_k + τ̂`.
    pub tau_hat: Bound<T>,
    pub reset_r: ResetR<T>,
    pub reset_r_hat: ResetRHat,
    pub reset_s: ResetS<T>,
    pub budgets: Budgets<T>,
    pub phi3: Phi3Mode,
    pub phi2_mode: Phi2Mode,
    /// Time-regularization: `Φ` is not monitored on `(t_k, t_k + dwell)`.
    pub dwell: Option<T>,
}

impl<T: Scalar> TriggerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.k_bar != T::zero() && self.k_bar != T::one() {
            return Err(Error::Config(format!("k_bar must be 0 or 1, got {}", self.k_bar)));
        }
        if !(self.k1 >= T::zero() && self.k2 >= T::zero()) {
            return Err(Error::Config("k1 and k2 must be nonnegative".into()));
        }
        if !(self.delta_bar >= T::zero()) {
            return Err(Error::Config("delta_bar must be nonnegative".into()));
        }
        self.alpha1.validate()?;
        self.alpha2.validate()?;
        self.schedule.validate()?;
        if let ResetS::Constant(s) = self.reset_s {
            if self.phi2_mode == Phi2Mode::Standard && !(s >= self.delta_bar) {
                return Err(Error::Config(format!("s_k = {s} is below delta_bar = {}", self.delta_bar)));
            }
            if !(s >= T::zero()) {
                return Err(Error::Config("s_k must be nonnegative".into()));
            }
        }
        match self.reset_r {
            ResetR::Constant(r) if !(r >= T::zero()) => return Err(Error::Config("r_k must be nonnegative".into())),
            ResetR::Geometric { first, ratio } if !(first >= T::zero() && ratio >= T::zero() && ratio < T::one()) => {
                return Err(Error::Config("geometric r_k needs first >= 0 and 0 <= ratio < 1".into()))
            }
            _ => {}
        }
        if let Bound::Finite(t) = self.tau_hat {
            if !(t > T::zero()) {
                return Err(Error::Config("tau_hat must be positive".into()));
            }
        }
        if let Some(d) = self.dwell {
            if !(d > T::zero()) {
                return Err(Error::Config("dwell must be positive".into()));
            }
        }
        let b = self.budgets;
        if !(b.theta1 > T::zero() && b.theta2 > T::zero() && b.theta3 > T::zero()) {
            return Err(Error::Config("budgets theta1..theta3 must be positive".into()));
        }
        Ok(())
    }

    /// `α₁(r) ≥ νr`.
    pub fn alpha1_admissible(&self, nu: T) -> bool {
        self.alpha1.dominates_linear(nu)
    }

    /// Level `φ₂` relaxes to before the phase switch.
    #[inline]
    pub fn pre_switch_level(&self, t: T, inside: T) -> T {
        match self.schedule {
            DeltaSchedule::Enlargement { .. } => self.schedule.value_on_piece(t, inside).max(self.delta_bar),
            _ => self.delta_bar,
        }
    }

    /// `Φ = k̄φ − k₁φ₁ − k₂φ₂`.
    #[inline]
    pub fn trigger_value(&self, varphi: T, phi1: T, phi2: T) -> T {
        let s = if self.k_bar == T::zero() { T::zero() } else { varphi };
        s - self.k1 * phi1 - self.k2 * phi2
    }

    /// `φ̇₁ = −α₁(φ₁) + k₂φ₂ − φ`.
    #[inline]
    pub fn phi1_rate(&self, varphi: T, phi1: T, phi2: T) -> T {
        -self.alpha1.eval(phi1) + self.k2 * phi2 - varphi
    }

    /// `φ̇₂` in the given phase; zero where `φ₂` is pinned to the schedule.
    #[inline]
    pub fn phi2_rate(&self, phase: Phase, phi2: T, t: T, inside: T) -> T {
        match (self.phi2_mode, phase) {
            (Phi2Mode::FreeDecay, _) => -self.alpha2.eval(phi2),
            (Phi2Mode::Standard, Phase::PreSwitch) => {
                self.alpha2.eval(self.pre_switch_level(t, inside)) - self.alpha2.eval(phi2)
            }
            (Phi2Mode::Standard, Phase::PostSwitch) => T::zero(),
        }
    }

    /// `φ₂` where it is pinned, otherwise `None`.
    #[inline]
    pub fn pinned_phi2(&self, phase: Phase, t: T, inside: T) -> Option<T> {
        (self.phi2_mode == Phi2Mode::Standard && phase == Phase::PostSwitch)
            .then(|| self.schedule.value_on_piece(t, inside))
    }

    fn r_k(&self, k: usize) -> T {
        match self.reset_r {
            ResetR::Zero => T::zero(),
            ResetR::Constant(r) => r,
            ResetR::Geometric { first, ratio } => first * ratio.powi(k.min(i32::MAX as usize) as i32),
        }
    }

    fn s_k(&self, t: T) -> T {
        match self.reset_s {
            ResetS::Constant(s) => s,
            ResetS::Level => self.pre_switch_level(t, t),
        }
    }

    pub fn initial_state(&self, t0: T) -> TriggerState<T> {
        let mut st = TriggerState {
            phi1: T::zero(),
            phi2: T::zero(),
            t_k: t0,
            t_switch: None,
            phase: Phase::PreSwitch,
            k: 0,
            sum_r: T::zero(),
            sum_r_hat: T::zero(),
            int_delta: T::zero(),
        };
        self.on_sample(&mut st, t0, true);
        st
    }

    /// Resets at a sampling instant. The caller resets `ε`.
    pub fn on_sample(&self, st: &mut TriggerState<T>, t: T, first: bool) {
        if !first {
            st.k += 1;
        }
        let r = self.r_k(st.k);
        st.t_k = t;
        st.t_switch = match (self.phi2_mode, self.tau_hat) {
            (Phi2Mode::Standard, Bound::Finite(th)) => Some(t + th),
            _ => None,
        };
        st.phase = Phase::PreSwitch;
        st.phi1 = r;
        st.phi2 = self.s_k(t);
        st.sum_r = st.sum_r + r;
    }

    /// Phase switch at `t̂_k`.
    pub fn on_switch(&self, st: &mut TriggerState<T>, t: T, inside: T) {
        st.phase = Phase::PostSwitch;
        let r_hat = match self.reset_r_hat {
            ResetRHat::Carryover => st.phi1,
            ResetRHat::Zero => T::zero(),
        };
        st.phi1 = r_hat;
        st.sum_r_hat = st.sum_r_hat + r_hat;
        st.phi2 = self.schedule.value_on_piece(t, inside);
    }

    /// Adds `∫δ` over a post-switch segment to the budget.
    pub fn account_post_switch(&self, st: &mut TriggerState<T>, from: T, to: T) {
        st.int_delta = st.int_delta + self.schedule.integral(from, to);
    }

    pub fn budget_flags(&self, st: &TriggerState<T>) -> BudgetFlags {
        BudgetFlags {
            theta1: st.int_delta > self.budgets.theta1,
            theta2: st.sum_r > self.budgets.theta2,
            theta3: st.sum_r_hat > self.budgets.theta3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BudgetFlags {
    pub theta1: bool,
    pub theta2: bool,
    pub theta3: bool,
}

impl BudgetFlags {
    pub fn any(&self) -> bool {
        self.theta1 || self.theta2 || self.theta3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// `[t_k, t̂_k)`
    PreSwitch,
    /// `[t̂_k, t_{k+1})`
    PostSwitch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriggerState<T> {
    pub phi1: T,
    pub phi2: T,
    pub t_k: T,
    pub t_switch: Option<T>,
    pub phase: Phase,
    /// Index of the current sample, 0 for the initial one.
    pub k: usize,
    pub sum_r: T,
    pub sum_r_hat: T,
    pub int_delta: T,
}

/// The three terms of `φ(ξ, ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarphiTerms<T> {
    pub state: T,
    pub error: T,
    pub coupling: T,
}

impl<T: Scalar> VarphiTerms<T> {
    #[inline]
    pub fn total(&self) -> T {
        self.state + self.error + self.coupling
    }
}

/// Evaluates `φ` without allocating. `scratch` must hold at least `2n + 2m` entries.
/// `u_held = γ(ξ + ε)` is passed in because it is constant between samples.
#[allow(clippy::too_many_arguments)]
#[inline]
pub fn varphi_terms<T, P, L>(
    plant: &P,
    consts: &CertificateConstants<T>,
    lyap: &L,
    mode: Phi3Mode,
    lambda2: T,
    xi: &[T],
    eps: &[T],
    u_held: &[T],
    scratch: &mut [T],
) -> VarphiTerms<T>
where
    T: Scalar,
    P: ControlAffinePlant<T> + ?Sized,
    L: LyapunovPair<T> + ?Sized,
{
    let p = consts.p;
    let state = -consts.c1 * consts.sigma * norm_pow(xi, p);
    let error = consts.c2 * norm_pow(eps, p);
    let coupling = match mode {
        Phi3Mode::Off => T::zero(),
        Phi3Mode::Affine => {
            let n = xi.len();
            let m = u_held.len();
            let (grad, rest) = scratch.split_at_mut(n);
            let (eff, rest) = rest.split_at_mut(n);
            let (gam, _) = rest.split_at_mut(m);
            plant.feedback(xi, gam);
            for (g, &u) in gam.iter_mut().zip(u_held) {
                *g = u - *g;
            }
            plant.input_effect(xi, gam, eff);
            lyap.grad_v_c(xi, grad);
            consts.lambda * grad.iter().zip(eff.iter()).fold(T::zero(), |a, (&x, &y)| a + x * y)
        }
        Phi3Mode::NonAffine => {
            let grad = &mut scratch[..xi.len()];
            lyap.grad_v_c(xi, grad);
            lambda2 * consts.lambda * norm(grad) * norm(eps)
        }
    };
    VarphiTerms { state, error, coupling }
}

/// Convenience wrapper around [`varphi_terms`] that allocates.
pub fn varphi<T, P, L>(
    plant: &P,
    consts: &CertificateConstants<T>,
    lyap: &L,
    mode: Phi3Mode,
    lambda2: T,
    xi: &[T],
    eps: &[T],
) -> T
where
    T: Scalar,
    P: ControlAffinePlant<T> + ?Sized,
    L: LyapunovPair<T> + ?Sized,
{
    let dims = plant.dims();
    let held: Vec<T> = xi.iter().zip(eps).map(|(&a, &b)| a + b).collect();
    let mut u = vec![T::zero(); dims.m];
    plant.feedback(&held, &mut u);
    let mut scratch = vec![T::zero(); 2 * dims.n + 2 * dims.m];
    varphi_terms(plant, consts, lyap, mode, lambda2, xi, eps, &u, &mut scratch).total()
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 8] =
    ["me_submitted", "mixed", "girard", "integral", "static", "dolk", "mahmoud", "postoyan"];

/// Quantities a preset needs from the analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetContext<T> {
    pub delta_bar: T,
    /// Reset value `s_k` where a preset does not fix it.
    pub s: T,
    pub tau_hat: Bound<T>,
    /// Dwell of the time-regularized presets.
    pub tau_m: T,
    pub budgets: Budgets<T>,
}

impl PresetContext<f64> {
    /// Values of the Lur'e benchmark: `δ̄ = 10`, `s_k = 12.5`.
    pub fn benchmark(tau_hat: Bound<f64>, tau_m: f64) -> Self {
        Self {
            delta_bar: 10.0,
            s: 12.5,
            tau_hat,
            tau_m,
            budgets: Budgets { theta1: 400.0, theta2: 1.0, theta3: 100.0 },
        }
    }
}

fn base_config<T: Scalar>(ctx: &PresetContext<T>) -> TriggerConfig<T> {
    TriggerConfig {
        k_bar: T::one(),
        k1: T::zero(),
        k2: T::zero(),
        alpha1: ClassK::identity(),
        alpha2: ClassK::identity(),
        delta_bar: ctx.delta_bar,
        schedule: DeltaSchedule::Constant(ctx.delta_bar),
        tau_hat: ctx.tau_hat,
        reset_r: ResetR::Zero,
        reset_r_hat: ResetRHat::Carryover,
        reset_s: ResetS::Constant(ctx.s.max(ctx.delta_bar)),
        budgets: ctx.budgets,
        phi3: Phi3Mode::Off,
        phi2_mode: Phi2Mode::Standard,
        dwell: None,
    }
}

/// Triggering rules from the literature expressed as parameterizations of `Φ`.
/// All but `me_submitted` drop `φ₃`.
pub fn preset<T: Scalar>(name: &str, ctx: &PresetContext<T>) -> Result<TriggerConfig<T>> {
    let base = base_config(ctx);
    let cfg = match name {
        "me_submitted" => TriggerConfig {
            k2: T::one(),
            schedule: DeltaSchedule::Exponential { scale: T::lit(10.0), rate: T::lit(0.05) },
            reset_s: ResetS::Constant(ctx.delta_bar),
            phi3: Phi3Mode::Affine,
            ..base
        },
        "mixed" => TriggerConfig {
            k2: T::one(),
            schedule: DeltaSchedule::Constant(ctx.delta_bar),
            reset_s: ResetS::Constant(ctx.delta_bar),
            ..base
        },
        "girard" => TriggerConfig { k1: T::one(), ..base },
        "integral" => TriggerConfig { k_bar: T::zero(), k1: T::one(), alpha1: ClassK::Zero, ..base },
        "static" => base,
        "dolk" => TriggerConfig {
            k_bar: T::zero(),
            k1: T::one(),
            alpha1: ClassK::Zero,
            dwell: Some(ctx.tau_m),
            ..base
        },
        "mahmoud" => TriggerConfig { dwell: Some(ctx.tau_m), ..base },
        "postoyan" => TriggerConfig {
            k2: T::one(),
            delta_bar: T::zero(),
            reset_s: ResetS::Constant(ctx.s),
            phi2_mode: Phi2Mode::FreeDecay,
            ..base
        },
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// The six `(k₁, k₂, δ_k)` combinations of the Lur'e comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl Case {
    pub const ALL: [Case; 6] = [Case::I, Case::II, Case::III, Case::IV, Case::V, Case::VI];

    pub fn label(self) -> &'static str {
        match self {
            Case::I => "i",
            Case::II => "ii",
            Case::III => "iii",
            Case::IV => "iv",
            Case::V => "v",
            Case::VI => "vi",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Case::ALL
            .into_iter()
            .find(|c| c.label() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown case '{s}'")))
    }

    pub fn gains(self) -> (f64, f64) {
        match self {
            Case::I | Case::II => (1.0, 1.0),
            Case::III => (1.0, 0.0),
            Case::IV | Case::V => (0.0, 1.0),
            Case::VI => (0.0, 0.0),
        }
    }

    /// `δ¹ = 10e^{−0.05t}` for (i), (iv); `δ² = 2·3ⁿ/n!`, `n = ⌈t/10⌉` for (ii), (v).
    pub fn schedule<T: Scalar>(self, delta_bar: T) -> DeltaSchedule<T> {
        match self {
            Case::I | Case::IV => DeltaSchedule::Exponential { scale: T::lit(10.0), rate: T::lit(0.05) },
            Case::II | Case::V => {
                DeltaSchedule::FactorialStaircase { scale: T::lit(2.0), base: T::lit(3.0), period: T::lit(10.0) }
            }
            Case::III | Case::VI => DeltaSchedule::Constant(delta_bar),
        }
    }

    pub fn config<T: Scalar>(self, ctx: &PresetContext<T>) -> TriggerConfig<T> {
        let (k1, k2) = self.gains();
        TriggerConfig {
            k1: T::lit(k1),
            k2: T::lit(k2),
            schedule: self.schedule(ctx.delta_bar),
            phi3: Phi3Mode::Affine,
            ..base_config(ctx)
        }
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})", self.label())
    }
}
