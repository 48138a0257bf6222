//! Hybrid simulation of the sampled closed loop under a triggering condition.
//!
//! The plant state and `φ₁`, `φ₂` are advanced together by classical fixed-step RK4 on a
//! global grid `i·h`. Steps are additionally cut at every instant where something jumps
//! (phase switch, dwell gate, schedule and disturbance breakpoints), so the right-hand side
//! is smooth inside every step. Events are localized by bisection over the step length,
//! re-integrating from the step start.

use crate::bounds::ErrorGains;
use crate::certificate::{CertificateConstants, LyapunovPair};
use crate::error::{Error, Result};
use crate::plants::{ControlAffinePlant, Disturbance};
use crate::scalar::{norm, norm_pow, Scalar};
use crate::trigger::{varphi_terms, BudgetFlags, Phase, TriggerConfig, TriggerState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    pub step: T,
    /// Bisection stops once the bracket is this short (seconds).
    pub event_tol: T,
    /// Gaps below this abort the run as Zeno-like.
    pub min_gap: T,
    pub max_events: usize,
}

impl IntegratorConfig<f64> {
    pub fn standard() -> Self {
        Self { step: 1e-4, event_tol: 1e-9, min_gap: 1e-7, max_events: 100_000 }
    }
}

impl<T: Scalar> IntegratorConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > T::zero() && self.step.is_finite()) {
            return Err(Error::Config("integrator step must be positive".into()));
        }
        if !(self.event_tol > T::zero() && self.event_tol < self.step) {
            return Err(Error::Config("event tolerance must be positive and below the step".into()));
        }
        if !(self.min_gap > T::zero()) || self.max_events == 0 {
            return Err(Error::Config("zeno guard thresholds must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventCause {
    /// The sample taken at `t = 0`.
    Initial,
    Threshold,
    /// `Φ > 0` already when the dwell gate opened.
    DwellForced,
}

impl EventCause {
    pub fn as_str(self) -> &'static str {
        match self {
            EventCause::Initial => "initial",
            EventCause::Threshold => "threshold",
            EventCause::DwellForced => "dwell-forced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event<T> {
    pub t: T,
    pub state_norm: T,
    pub cause: EventCause,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventLog<T> {
    pub events: Vec<Event<T>>,
}

impl<T: Scalar> EventLog<T> {
    /// Number of samples, the initial one included.
    pub fn count(&self) -> usize {
        self.events.len()
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        self.events.iter().map(|e| e.t)
    }

    pub fn gaps(&self) -> impl Iterator<Item = T> + '_ {
        self.events.windows(2).map(|w| w[1].t - w[0].t)
    }

    /// Smallest inter-event gap, `None` with fewer than two samples.
    pub fn min_gap(&self) -> Option<T> {
        self.gaps().fold(None, |m, g| Some(m.map_or(g, |x: T| x.min(g))))
    }

    pub fn mean_gap(&self) -> Option<T> {
        let n = self.events.len();
        (n >= 2).then(|| (self.events[n - 1].t - self.events[0].t) / T::lit((n - 1) as f64))
    }
}

/// Why a run stopped early.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZenoAbort<T> {
    GapBelowGuard { t: T, gap: T },
    TooManyEvents { t: T },
}

/// Runtime checks of the analytic invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monitors<T> {
    pub min_phi1: T,
    pub phi1_violations: usize,
    /// `min (φ₂ − δ̄)` over pre-switch phases.
    pub min_pre_switch_margin: T,
    pub phi2_pre_violations: usize,
    /// `max |φ₂ − δ_k(t)|` over post-switch phases.
    pub max_pin_deviation: T,
    pub max_state_norm: T,
    pub ball_violations: usize,
    /// Number of `[t_k, min(t̂_k, t_{k+1})]` windows checked against the sampling-error bound.
    pub error_bound_checks: usize,
    pub error_bound_violations: usize,
    /// `min (a∫‖ξ‖^p + b∫‖d‖^p + 1e-9 − ∫‖ε‖^p)` over checked windows.
    pub min_error_bound_slack: T,
    /// `max |Φ(t_{k+1}⁻)| / (|k̄φ| + k₁φ₁ + k₂φ₂ + 1)` over threshold events.
    pub max_event_residual: T,
    /// `max V(ξ(t))` with `V = V_s + λV_c`.
    pub max_lyapunov: T,
    pub int_z_p: T,
    pub int_d_p: T,
}

impl<T: Scalar> Monitors<T> {
    fn new() -> Self {
        Self {
            min_phi1: T::infinity(),
            phi1_violations: 0,
            min_pre_switch_margin: T::infinity(),
            phi2_pre_violations: 0,
            max_pin_deviation: T::zero(),
            max_state_norm: T::zero(),
            ball_violations: 0,
            error_bound_checks: 0,
            error_bound_violations: 0,
            min_error_bound_slack: T::infinity(),
            max_event_residual: T::zero(),
            max_lyapunov: T::zero(),
            int_z_p: T::zero(),
            int_d_p: T::zero(),
        }
    }

    pub fn invariant_violations(&self) -> usize {
        self.phi1_violations + self.phi2_pre_violations + self.ball_violations + self.error_bound_violations
    }
}

pub const INVARIANT_SLACK: f64 = 1e-9;

/// One recorded trajectory sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow<T> {
    pub t: T,
    pub xi: Vec<T>,
    pub u: Vec<T>,
    pub eps_norm: T,
    pub phi1: T,
    pub phi2: T,
    pub trigger: T,
    pub d: Vec<T>,
    pub z: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory<T> {
    pub rows: Vec<TrajectoryRow<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput<T> {
    pub events: EventLog<T>,
    pub monitors: Monitors<T>,
    pub trajectory: Option<Trajectory<T>>,
    pub final_time: T,
    pub final_state: Vec<T>,
    pub trigger_state: TriggerState<T>,
    pub budget_flags: BudgetFlags,
    pub zeno: Option<ZenoAbort<T>>,
    /// `V_s(ξ₀) + λV_c(ξ₀)`.
    pub v0: T,
    pub d_sup: T,
}

/// Everything a run needs besides the initial state and the disturbance.
pub struct Simulation<'a, T, P: ?Sized, L: ?Sized> {
    pub plant: &'a P,
    pub consts: &'a CertificateConstants<T>,
    pub lyap: &'a L,
    pub trigger: &'a TriggerConfig<T>,
    pub integrator: IntegratorConfig<T>,
    /// `λ₂`, only used by the non-affine coupling term.
    pub lambda2: T,
    /// Enables the sampling-error bound monitor.
    pub error_gains: Option<ErrorGains<T>>,
    /// Enables the ball-containment monitor.
    pub rho_bar: Option<T>,
    /// Record every `stride`-th grid step.
    pub record_stride: Option<usize>,
}

struct Hold<'b, T> {
    xi_held: &'b [T],
    u: &'b [T],
    d: &'b [T],
    phase: Phase,
    inside: T,
}

struct Work<T> {
    k: [Vec<T>; 4],
    tmp: Vec<T>,
    eps: Vec<T>,
    scratch: Vec<T>,
    z: Vec<T>,
}

impl<T: Scalar> Work<T> {
    fn new(n: usize, m: usize, s: usize) -> Self {
        let len = n + 2;
        Self {
            k: [vec![T::zero(); len], vec![T::zero(); len], vec![T::zero(); len], vec![T::zero(); len]],
            tmp: vec![T::zero(); len],
            eps: vec![T::zero(); n],
            scratch: vec![T::zero(); 2 * n + 2 * m],
            z: vec![T::zero(); s],
        }
    }
}

impl<'a, T, P, L> Simulation<'a, T, P, L>
where
    T: Scalar,
    P: ControlAffinePlant<T> + ?Sized,
    L: LyapunovPair<T> + ?Sized,
{
    fn n(&self) -> usize {
        self.plant.dims().n
    }

    #[inline]
    fn phi2_effective(&self, t: T, y: &[T], hold: &Hold<'_, T>) -> T {
        self.trigger.pinned_phi2(hold.phase, t, hold.inside).unwrap_or(y[self.n() + 1])
    }

    #[inline]
    fn varphi(&self, y: &[T], hold: &Hold<'_, T>, w_eps: &mut [T], scratch: &mut [T]) -> T {
        let n = self.n();
        let xi = &y[..n];
        for i in 0..n {
            w_eps[i] = hold.xi_held[i] - xi[i];
        }
        varphi_terms(
            self.plant,
            self.consts,
            self.lyap,
            self.trigger.phi3,
            self.lambda2,
            xi,
            w_eps,
            hold.u,
            scratch,
        )
        .total()
    }

    #[inline]
    fn rhs(&self, t: T, y: &[T], dy: &mut [T], hold: &Hold<'_, T>, eps: &mut [T], scratch: &mut [T]) {
        let n = self.n();
        self.plant.vector_field(&y[..n], hold.u, hold.d, &mut dy[..n]);
        let phi = self.varphi(y, hold, eps, scratch);
        let phi2 = self.phi2_effective(t, y, hold);
        dy[n] = self.trigger.phi1_rate(phi, y[n], phi2);
        dy[n + 1] = self.trigger.phi2_rate(hold.phase, y[n + 1], t, hold.inside);
    }

    fn rk4(&self, t: T, dt: T, y: &[T], out: &mut [T], hold: &Hold<'_, T>, w: &mut Work<T>) {
        let half = dt / T::lit(2.0);
        let len = y.len();
        let Work { k, tmp, eps, scratch, .. } = w;
        let [k1, k2, k3, k4] = k;
        self.rhs(t, y, k1, hold, eps, scratch);
        for i in 0..len {
            tmp[i] = y[i] + half * k1[i];
        }
        self.rhs(t + half, tmp, k2, hold, eps, scratch);
        for i in 0..len {
            tmp[i] = y[i] + half * k2[i];
        }
        self.rhs(t + half, tmp, k3, hold, eps, scratch);
        for i in 0..len {
            tmp[i] = y[i] + dt * k3[i];
        }
        self.rhs(t + dt, tmp, k4, hold, eps, scratch);
        let sixth = dt / T::lit(6.0);
        for i in 0..len {
            out[i] = y[i] + sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]);
        }
        if let Some(p) = self.trigger.pinned_phi2(hold.phase, t + dt, hold.inside) {
            out[len - 1] = p;
        }
    }

    /// `Φ` and the scale used to normalize its residual.
    fn trigger_value(&self, t: T, y: &[T], hold: &Hold<'_, T>, w: &mut Work<T>) -> (T, T) {
        let n = self.n();
        let phi = self.varphi(y, hold, &mut w.eps, &mut w.scratch);
        let phi2 = self.phi2_effective(t, y, hold);
        let cfg = self.trigger;
        let value = cfg.trigger_value(phi, y[n], phi2);
        let scale = (cfg.k_bar * phi).abs() + cfg.k1 * y[n].abs() + cfg.k2 * phi2.abs() + T::one();
        (value, scale)
    }

    fn lyapunov(&self, xi: &[T]) -> T {
        self.lyap.v_s(xi) + self.consts.lambda * self.lyap.v_c(xi)
    }

    /// Runs the closed loop from `xi0` over `[0, duration]`.
    pub fn run(&self, xi0: &[T], disturbance: &Disturbance<T>, duration: T) -> Result<RunOutput<T>> {
        let dims = self.plant.dims();
        let (n, m) = (dims.n, dims.m);
        if xi0.len() != n || disturbance.dim() != dims.q {
            return Err(Error::Domain("initial state or disturbance has wrong dimension".into()));
        }
        if !(duration >= T::zero()) {
            return Err(Error::Domain("duration must be nonnegative".into()));
        }
        self.integrator.validate()?;
        self.trigger.validate()?;

        let cfg = self.trigger;
        let h = self.integrator.step;
        let mut w = Work::new(n, m, dims.s);
        let mut mon = Monitors::new();
        let mut log = EventLog { events: Vec::new() };
        let mut traj = self.record_stride.map(|_| Trajectory::default());
        let v0 = self.lyapunov(xi0);

        let mut trig = cfg.initial_state(T::zero());
        let mut y = vec![T::zero(); n + 2];
        y[..n].copy_from_slice(xi0);
        y[n] = trig.phi1;
        y[n + 1] = trig.phi2;

        if duration == T::zero() {
            return Ok(RunOutput {
                events: log,
                monitors: mon,
                trajectory: traj,
                final_time: T::zero(),
                final_state: xi0.to_vec(),
                trigger_state: trig,
                budget_flags: BudgetFlags::default(),
                zeno: None,
                v0,
                d_sup: disturbance.sup_norm(),
            });
        }

        let mut xi_held = xi0.to_vec();
        let mut u = vec![T::zero(); m];
        self.plant.feedback(&xi_held, &mut u);
        log.events.push(Event { t: T::zero(), state_norm: norm(xi0), cause: EventCause::Initial });

        let mut d = vec![T::zero(); dims.q];
        let mut y1 = vec![T::zero(); n + 2];
        let mut t = T::zero();
        let mut grid_i: u64 = 0;
        // Sampling-error window accumulators: ∫‖ε‖^p, ∫‖ξ‖^p, ∫‖d‖^p.
        let mut window_open = true;
        let mut win = [T::zero(); 3];
        let mut switch_time = T::zero();
        let mut zeno = None;
        let mut steps: usize = 0;

        self.observe(T::zero(), &y, &trig, &mut mon);

        while t < duration {
            // phase switch, taken before Φ is evaluated at t
            if trig.phase == Phase::PreSwitch {
                if let Some(ts) = trig.t_switch {
                    if t >= ts {
                        self.close_window(&mut window_open, &win, &mut mon);
                        trig.phi1 = y[n];
                        let nb = self.next_break(t, duration, &trig, disturbance, &mut grid_i, h);
                        cfg.on_switch(&mut trig, t, (t + nb) / T::lit(2.0));
                        y[n] = trig.phi1;
                        y[n + 1] = trig.phi2;
                        switch_time = t;
                    }
                }
            }

            let t_end = self.next_break(t, duration, &trig, disturbance, &mut grid_i, h);
            let inside = (t + t_end) / T::lit(2.0);
            disturbance.value(inside, &mut d);
            let hold_phase = trig.phase;
            if let Some(pv) = cfg.pinned_phi2(hold_phase, t, inside) {
                y[n + 1] = pv;
            }
            let hold = Hold { xi_held: &xi_held, u: &u, d: &d, phase: hold_phase, inside };
            let gate = cfg.dwell.map(|dw| trig.t_k + dw);
            let monitoring = gate.map_or(true, |g| t >= g);

            let (phi_start, _) = self.trigger_value(t, &y, &hold, &mut w);
            let mut fire: Option<(T, EventCause)> = None;
            if monitoring && phi_start > T::zero() && t > trig.t_k {
                let cause = if gate == Some(t) { EventCause::DwellForced } else { EventCause::Threshold };
                fire = Some((t, cause));
            }

            if fire.is_none() {
                let dt = t_end - t;
                self.rk4(t, dt, &y, &mut y1, &hold, &mut w);
                let (phi_end, _) = self.trigger_value(t_end, &y1, &hold, &mut w);
                let crossed = phi_end > T::zero() || (phi_end == T::zero() && phi_start < T::zero());
                let mut t_new = t_end;
                if monitoring && crossed {
                    if phi_end > T::zero() {
                        let mut lo = T::zero();
                        let mut hi = dt;
                        while hi - lo > self.integrator.event_tol {
                            let mid = lo + (hi - lo) / T::lit(2.0);
                            self.rk4(t, mid, &y, &mut y1, &hold, &mut w);
                            let (v, _) = self.trigger_value(t + mid, &y1, &hold, &mut w);
                            if v >= T::zero() {
                                hi = mid;
                            } else {
                                lo = mid;
                            }
                        }
                        self.rk4(t, hi, &y, &mut y1, &hold, &mut w);
                        t_new = t + hi;
                    }
                    let (res, scale) = self.trigger_value(t_new, &y1, &hold, &mut w);
                    mon.max_event_residual = mon.max_event_residual.max(res.abs() / scale);
                    fire = Some((t_new, EventCause::Threshold));
                }
                if y1.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Divergence {
                        t: t_new.as_f64(),
                        detail: format!("non-finite state {:?}", y1.iter().map(|v| v.as_f64()).collect::<Vec<_>>()),
                    });
                }
                self.accumulate(t, t_new, &y, &y1, &hold, &mut win, window_open, &mut mon, &mut w);
                std::mem::swap(&mut y, &mut y1);
                t = t_new;
                self.observe(t, &y, &trig, &mut mon);
                if hold_phase == Phase::PostSwitch {
                    let pinned = cfg.pinned_phi2(hold_phase, t, inside).unwrap_or(y[n + 1]);
                    mon.max_pin_deviation = mon.max_pin_deviation.max((y[n + 1] - pinned).abs());
                }
                steps += 1;
                if let (Some(stride), Some(tr)) = (self.record_stride, traj.as_mut()) {
                    if steps % stride.max(1) == 0 || fire.is_some() {
                        tr.rows.push(self.row(t, &y, &hold, &mut w));
                    }
                }
            }

            if let Some((te, cause)) = fire {
                if trig.phase == Phase::PostSwitch {
                    cfg.account_post_switch(&mut trig, switch_time, te);
                }
                self.close_window(&mut window_open, &win, &mut mon);
                let last = log.events.last().map_or(T::zero(), |e| e.t);
                let gap = te - last;
                log.events.push(Event { t: te, state_norm: norm(&y[..n]), cause });
                if gap < self.integrator.min_gap {
                    zeno = Some(ZenoAbort::GapBelowGuard { t: te, gap });
                    break;
                }
                if log.events.len() >= self.integrator.max_events {
                    zeno = Some(ZenoAbort::TooManyEvents { t: te });
                    break;
                }
                xi_held.copy_from_slice(&y[..n]);
                self.plant.feedback(&xi_held, &mut u);
                trig.phi1 = y[n];
                trig.phi2 = y[n + 1];
                cfg.on_sample(&mut trig, te, false);
                y[n] = trig.phi1;
                y[n + 1] = trig.phi2;
                window_open = true;
                win = [T::zero(); 3];
                self.observe(te, &y, &trig, &mut mon);
            }
        }

        if zeno.is_none() {
            if trig.phase == Phase::PostSwitch {
                cfg.account_post_switch(&mut trig, switch_time, t);
            }
            self.close_window(&mut window_open, &win, &mut mon);
        }
        trig.phi1 = y[n];
        trig.phi2 = y[n + 1];
        Ok(RunOutput {
            events: log,
            monitors: mon,
            trajectory: traj,
            final_time: t,
            final_state: y[..n].to_vec(),
            budget_flags: cfg.budget_flags(&trig),
            trigger_state: trig,
            zeno,
            v0,
            d_sup: disturbance.sup_norm(),
        })
    }

    fn next_break(
        &self,
        t: T,
        duration: T,
        trig: &TriggerState<T>,
        dist: &Disturbance<T>,
        grid_i: &mut u64,
        h: T,
    ) -> T {
        // advance the grid index past t
        let guard = h * T::lit(1e-9);
        while T::lit(*grid_i as f64) * h <= t + guard {
            *grid_i += 1;
        }
        let mut e = (T::lit(*grid_i as f64) * h).min(duration);
        if trig.phase == Phase::PreSwitch {
            if let Some(ts) = trig.t_switch {
                if ts > t {
                    e = e.min(ts);
                }
            }
        }
        if let Some(dw) = self.trigger.dwell {
            let g = trig.t_k + dw;
            if g > t {
                e = e.min(g);
            }
        }
        if let Some(b) = self.trigger.schedule.next_breakpoint(t) {
            e = e.min(b);
        }
        if let Some(b) = dist.next_breakpoint(t) {
            if b > t + guard {
                e = e.min(b);
            }
        }
        e
    }

    fn observe(&self, t: T, y: &[T], trig: &TriggerState<T>, mon: &mut Monitors<T>) {
        let n = self.n();
        let slack = T::lit(INVARIANT_SLACK);
        let phi1 = y[n];
        mon.min_phi1 = mon.min_phi1.min(phi1);
        if phi1 < -slack {
            mon.phi1_violations += 1;
        }
        if trig.phase == Phase::PreSwitch && self.trigger.phi2_mode == crate::trigger::Phi2Mode::Standard {
            let margin = y[n + 1] - self.trigger.delta_bar;
            mon.min_pre_switch_margin = mon.min_pre_switch_margin.min(margin);
            if margin < -slack {
                mon.phi2_pre_violations += 1;
            }
        }
        let r = norm(&y[..n]);
        mon.max_state_norm = mon.max_state_norm.max(r);
        if let Some(rho) = self.rho_bar {
            if r > rho {
                mon.ball_violations += 1;
            }
        }
        mon.max_lyapunov = mon.max_lyapunov.max(self.lyapunov(&y[..n]));
        let _ = t;
    }

    #[allow(clippy::too_many_arguments)]
    fn accumulate(
        &self,
        t0: T,
        t1: T,
        y0: &[T],
        y1: &[T],
        hold: &Hold<'_, T>,
        win: &mut [T; 3],
        window_open: bool,
        mon: &mut Monitors<T>,
        w: &mut Work<T>,
    ) {
        let n = self.n();
        let p = self.consts.p;
        let dt = t1 - t0;
        let half = dt / T::lit(2.0);
        let d_p = norm_pow(hold.d, p);
        self.plant.output(&y0[..n], hold.d, &mut w.z);
        let z0 = norm_pow(&w.z, p);
        self.plant.output(&y1[..n], hold.d, &mut w.z);
        let z1 = norm_pow(&w.z, p);
        mon.int_z_p = mon.int_z_p + half * (z0 + z1);
        mon.int_d_p = mon.int_d_p + d_p * dt;
        if window_open {
            let e = |y: &[T]| {
                (0..n).fold(T::zero(), |a, i| {
                    let v = hold.xi_held[i] - y[i];
                    a + v * v
                })
            };
            let ep = |y: &[T]| if p == T::lit(2.0) { e(y) } else { e(y).sqrt().powf(p) };
            win[0] = win[0] + half * (ep(y0) + ep(y1));
            win[1] = win[1] + half * (norm_pow(&y0[..n], p) + norm_pow(&y1[..n], p));
            win[2] = win[2] + d_p * dt;
        }
    }

    fn close_window(&self, window_open: &mut bool, win: &[T; 3], mon: &mut Monitors<T>) {
        if !*window_open {
            return;
        }
        *window_open = false;
        if let Some(g) = self.error_gains {
            let slack = g.a * win[1] + g.b * win[2] + T::lit(INVARIANT_SLACK) - win[0];
            mon.error_bound_checks += 1;
            mon.min_error_bound_slack = mon.min_error_bound_slack.min(slack);
            if slack < T::zero() {
                mon.error_bound_violations += 1;
            }
        }
    }

    fn row(&self, t: T, y: &[T], hold: &Hold<'_, T>, w: &mut Work<T>) -> TrajectoryRow<T> {
        let n = self.n();
        let (trigger, _) = self.trigger_value(t, y, hold, w);
        self.plant.output(&y[..n], hold.d, &mut w.z);
        let eps: Vec<T> = (0..n).map(|i| hold.xi_held[i] - y[i]).collect();
        TrajectoryRow {
            t,
            xi: y[..n].to_vec(),
            u: hold.u.to_vec(),
            eps_norm: norm(&eps),
            phi1: y[n],
            phi2: self.phi2_effective(t, y, hold),
            trigger,
            d: hold.d.to_vec(),
            z: w.z.clone(),
        }
    }
}

/// One classical RK4 step of `ẏ = f(t, y)`.
pub fn rk4_step<T: Scalar>(f: impl Fn(T, &[T], &mut [T]), t: T, y: &[T], dt: T) -> Vec<T> {
    let n = y.len();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]);
    let half = dt / T::lit(2.0);
    f(t, y, &mut k1);
    let tmp: Vec<T> = (0..n).map(|i| y[i] + half * k1[i]).collect();
    f(t + half, &tmp, &mut k2);
    let tmp: Vec<T> = (0..n).map(|i| y[i] + half * k2[i]).collect();
    f(t + half, &tmp, &mut k3);
    let tmp: Vec<T> = (0..n).map(|i| y[i] + dt * k3[i]).collect();
    f(t + dt, &tmp, &mut k4);
    (0..n)
        .map(|i| y[i] + dt / T::lit(6.0) * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]))
        .collect()
}

/// Smallest `s ∈ (0, span]` with `g(s) ≥ 0`, to within `tol`, given `g(span) ≥ 0`.
/// A root exactly at `span` is returned without bisecting.
pub fn locate_crossing<T: Scalar>(mut g: impl FnMut(T) -> T, span: T, tol: T) -> Result<T> {
    let end = g(span);
    if end == T::zero() {
        return Ok(span);
    }
    if !(end > T::zero()) {
        return Err(Error::NoSignChange { t0: 0.0, t1: span.as_f64() });
    }
    let (mut lo, mut hi) = (T::zero(), span);
    while hi - lo > tol {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if g(mid) >= T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
