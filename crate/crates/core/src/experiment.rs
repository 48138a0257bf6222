//! Monte-Carlo experiments on the Lur'e benchmark: single cases, the six-case comparison,
//! the inter-event enlargement study, `L_p` residuals and CSV output.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{
    enlargement_design, miet, rho_bar, sampling_error_gains, tau_hat, BallInputs, Bound, BoundsReport,
    EnlargementDesign, ErrorGains, LipschitzCoefficients, Separation,
};
use crate::certificate::{CertificateConstants, LyapunovPair};
use crate::config::{ExperimentConfig, InitialKind};
use crate::error::{Error, Result};
use crate::plants::{lure_certificate, lure_plant, realize_disturbance, Disturbance, LureLyapunov, LurePlant};
use crate::sim::{EventCause, IntegratorConfig, RunOutput, Simulation, Trajectory, ZenoAbort};
use crate::trigger::{Budgets, Case, DeltaSchedule, Phi3Mode, ResetS, TriggerConfig};

/// Reference mean sample counts of cases (i)–(vi).
pub const REFERENCE_MEAN_N: [f64; 6] = [3.24, 3.25, 12.9, 4.34, 4.72, 18.7];
/// Reference minimum inter-event times of cases (i)–(vi), in units of 10⁻² s.
pub const REFERENCE_TAU_M_E2: [f64; 6] = [22.3, 14.2, 3.3, 22.6, 14.8, 1.8];

/// `∫‖z‖^p ≤ μ_d^p∫‖d‖^p + (k₂θ₁ + θ₃ + V(ξ₀))/λ`, evaluated on one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpReport {
    pub int_z_p: f64,
    pub int_d_p: f64,
    pub offset: f64,
    /// `rhs − lhs`; nonnegative when the bound holds.
    pub residual: f64,
    /// `∫‖z‖^p / ∫‖d‖^p`, `None` without disturbance energy.
    pub ratio: Option<f64>,
}

pub fn lp_report(
    consts: &CertificateConstants<f64>,
    int_z_p: f64,
    int_d_p: f64,
    v0: f64,
    k2: f64,
    budgets: &Budgets<f64>,
) -> LpReport {
    let offset = (k2 * budgets.theta1 + budgets.theta3 + v0) / consts.lambda;
    let rhs = consts.mu_d_pow_p() * int_d_p + offset;
    LpReport {
        int_z_p,
        int_d_p,
        offset,
        residual: rhs - int_z_p,
        ratio: (int_d_p > 0.0).then(|| int_z_p / int_d_p),
    }
}

/// Plant, certificate and analysis shared by every run of an experiment.
#[derive(Debug, Clone)]
pub struct Setup {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub plant: LurePlant<f64>,
    pub consts: CertificateConstants<f64>,
    pub lyap: LureLyapunov<f64>,
    pub lip: LipschitzCoefficients<f64>,
    pub integrator: IntegratorConfig<f64>,
    pub tau_hat: Bound<f64>,
    pub gains: ErrorGains<f64>,
}

/// One simulated run with its analysis.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub index: usize,
    pub seed: u64,
    pub xi0: Vec<f64>,
    pub output: RunOutput<f64>,
    /// Guaranteed inter-event floor for this realization, if any.
    pub tau_m_bound: Option<f64>,
    pub rho_bar: f64,
    pub lp: LpReport,
}

impl RunRecord {
    pub fn samples(&self) -> usize {
        self.output.events.count()
    }

    pub fn min_gap(&self) -> Option<f64> {
        self.output.events.min_gap()
    }

    /// Gaps below `tau_m_bound − tol`.
    pub fn separation_violations(&self, tol: f64) -> usize {
        match self.tau_m_bound {
            Some(b) => self.output.events.gaps().filter(|&g| g < b - tol).count(),
            None => 0,
        }
    }
}

/// Aggregate over the Monte-Carlo runs of one trigger configuration.
#[derive(Debug, Clone)]
pub struct CaseSummary {
    pub label: String,
    pub k2: f64,
    pub runs: Vec<RunRecord>,
    pub mean_n: f64,
    /// Minimum inter-event time over all runs.
    pub tau_m: Option<f64>,
    pub mean_gap: Option<f64>,
    pub zeno_runs: usize,
    pub invariant_violations: usize,
    pub separation_violations: usize,
    pub budget_flag_runs: usize,
    pub min_lp_residual: f64,
    pub mean_lp_ratio: Option<f64>,
    /// Smallest per-run guaranteed floor.
    pub tau_m_bound: Option<f64>,
    /// Bounds report at the largest realized disturbance.
    pub bounds: BoundsReport<f64>,
    pub max_event_residual: f64,
    pub config_hash: String,
}

impl Setup {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.check()?;
        let design = config.certificate.design(config.plant.h_star);
        let (consts, lyap) = lure_certificate(&design)?;
        let range = consts.lambda_range()?;
        if !range.contains(consts.lambda) {
            return Err(Error::LambdaOutOfRange { lambda: consts.lambda, lower: range.lower, upper: range.upper });
        }
        let [l1, l2, l3] = config.certificate.lipschitz;
        let lip = LipschitzCoefficients::new(l1, l2, l3)?;
        let th = tau_hat(&consts, &lip)?;
        let gains = sampling_error_gains(&consts, &lip, th)?;
        Ok(Self {
            config_hash: config.hash(),
            plant: lure_plant(config.plant.h_star)?,
            integrator: config.integrator.integrator()?,
            consts,
            lyap,
            lip,
            tau_hat: th,
            gains,
            config,
        })
    }

    pub fn benchmark() -> Result<Self> {
        Self::new(ExperimentConfig::default())
    }

    /// Bounds report for the threshold `k₂δ̄` under disturbance bound `eps`.
    pub fn bounds(&self, k2: f64, eps: f64) -> Result<BoundsReport<f64>> {
        miet(&self.consts, &self.lip, k2, self.config.trigger.delta_bar, eps)
    }

    /// `τ_m` without disturbance, used as the dwell of the time-regularized presets.
    pub fn nominal_tau_m(&self) -> Result<f64> {
        let r = self.bounds(1.0, 0.0)?;
        r.tau_m().and_then(Bound::finite).ok_or_else(|| Error::InconsistentBounds("no finite nominal tau_m".into()))
    }

    pub fn case_config(&self, case: Case) -> Result<TriggerConfig<f64>> {
        self.config.trigger.case_config(case, self.tau_hat, self.nominal_tau_m()?)
    }

    pub fn preset_config(&self, name: &str) -> Result<TriggerConfig<f64>> {
        crate::trigger::preset(name, &self.config.trigger.preset_context(self.tau_hat, self.nominal_tau_m()?))
    }

    /// Trigger configured in the `[trigger]` section.
    pub fn configured_trigger(&self) -> Result<TriggerConfig<f64>> {
        self.config.trigger.trigger_config(self.tau_hat, self.nominal_tau_m()?)
    }

    pub fn run_seed(&self, index: usize) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.experiment.seed);
        rng.set_stream(index as u64);
        rng.gen()
    }

    pub fn initial_state(&self, index: usize) -> Vec<f64> {
        let e = &self.config.experiment;
        let mut rng = ChaCha8Rng::seed_from_u64(self.run_seed(index) ^ 0x5eed_0f_1c);
        let angle = rng.gen::<f64>() * std::f64::consts::TAU;
        let r = match e.initial {
            InitialKind::Circle => e.radius,
            InitialKind::Disk => e.radius * rng.gen::<f64>().sqrt(),
            InitialKind::Fixed => return e.fixed_state.clone(),
        };
        vec![r * angle.cos(), r * angle.sin()]
    }

    pub fn disturbance(&self, index: usize) -> Result<Disturbance<f64>> {
        let e = &self.config.experiment;
        realize_disturbance(&e.disturbance.spec(self.run_seed(index)), 1, e.duration, self.integrator.step)
    }

    fn disturbance_bound(&self, realized: f64) -> f64 {
        self.config.experiment.disturbance_bound.unwrap_or(realized)
    }

    /// Runs `trigger` from the `index`-th initial state and disturbance.
    pub fn simulate(&self, trigger: &TriggerConfig<f64>, index: usize, record_stride: Option<usize>) -> Result<RunRecord> {
        let xi0 = self.initial_state(index);
        let dist = self.disturbance(index)?;
        self.simulate_with(trigger, index, xi0, &dist, self.config.experiment.duration, record_stride)
    }

    pub fn simulate_with(
        &self,
        trigger: &TriggerConfig<f64>,
        index: usize,
        xi0: Vec<f64>,
        dist: &Disturbance<f64>,
        duration: f64,
        record_stride: Option<usize>,
    ) -> Result<RunRecord> {
        let eps = self.disturbance_bound(dist.sup_norm());
        let report = self.bounds(trigger.k2, eps)?;
        let phi2_sup = match trigger.reset_s {
            ResetS::Constant(s) => s.max(trigger.schedule.sup()),
            ResetS::Level => trigger.schedule.sup().max(trigger.delta_bar),
        };
        let b = trigger.budgets;
        let inputs = BallInputs { d_inf: dist.sup_norm(), phi2_sup, k2: trigger.k2, theta2: b.theta2, theta3: b.theta3 };
        let rho = rho_bar(&self.consts, &self.lyap, &xi0, &inputs, self.lyap.combined_lower_bound(self.consts.lambda))?;
        let sim = Simulation {
            plant: &self.plant,
            consts: &self.consts,
            lyap: &self.lyap,
            trigger,
            integrator: self.integrator,
            lambda2: self.lip.lambda2,
            error_gains: Some(self.gains),
            rho_bar: Some(rho),
            record_stride,
        };
        let output = sim.run(&xi0, dist, duration)?;
        let lp = lp_report(&self.consts, output.monitors.int_z_p, output.monitors.int_d_p, output.v0, trigger.k2, &b);
        let tau_m_bound = report.tau_m().map(Bound::to_f64);
        Ok(RunRecord { index, seed: self.run_seed(index), xi0, output, tau_m_bound, rho_bar: rho, lp })
    }

    /// Monte-Carlo over `mc_count` runs with shared per-index seeds; results ordered by index.
    pub fn run_trigger(&self, label: &str, trigger: &TriggerConfig<f64>, record_stride: Option<usize>) -> Result<CaseSummary> {
        let mc = self.config.experiment.mc_count;
        let runs: Vec<RunRecord> = (0..mc)
            .into_par_iter()
            .map(|j| self.simulate(trigger, j, record_stride))
            .collect::<Result<_>>()?;
        self.summarize(label, trigger.k2, runs)
    }

    pub fn run_case(&self, case: Case) -> Result<CaseSummary> {
        self.run_trigger(case.label(), &self.case_config(case)?, None)
    }

    fn summarize(&self, label: &str, k2: f64, runs: Vec<RunRecord>) -> Result<CaseSummary> {
        let count = runs.len().max(1) as f64;
        let mean_n = runs.iter().map(|r| r.samples() as f64).sum::<f64>() / count;
        let tau_m = runs.iter().filter_map(RunRecord::min_gap).reduce(f64::min);
        let gaps: Vec<f64> = runs.iter().flat_map(|r| r.output.events.gaps().collect::<Vec<_>>()).collect();
        let mean_gap = (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64);
        let ratios: Vec<f64> = runs.iter().filter_map(|r| r.lp.ratio).collect();
        let d_max = runs.iter().map(|r| r.output.d_sup).fold(0.0, f64::max);
        Ok(CaseSummary {
            label: label.to_string(),
            k2,
            mean_n,
            tau_m,
            mean_gap,
            zeno_runs: runs.iter().filter(|r| r.output.zeno.is_some()).count(),
            invariant_violations: runs.iter().map(|r| r.output.monitors.invariant_violations()).sum(),
            separation_violations: runs.iter().map(|r| r.separation_violations(1e-9)).sum(),
            budget_flag_runs: runs.iter().filter(|r| r.output.budget_flags.any()).count(),
            min_lp_residual: runs.iter().map(|r| r.lp.residual).fold(f64::INFINITY, f64::min),
            mean_lp_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
            tau_m_bound: runs.iter().filter_map(|r| r.tau_m_bound).reduce(f64::min),
            bounds: self.bounds(k2, self.disturbance_bound(d_max))?,
            max_event_residual: runs.iter().map(|r| r.output.monitors.max_event_residual).fold(0.0, f64::max),
            config_hash: self.config_hash.clone(),
            runs,
        })
    }

    /// All configured cases, in configuration order.
    pub fn run_table2(&self) -> Result<Table2> {
        let cases = self.config.cases()?;
        let rows = cases
            .iter()
            .map(|&c| self.run_case(c).map(|s| (c, s)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Table2 { rows, tau_hat: self.tau_hat.to_f64() })
    }

    /// Inter-event enlargement: designs `δ*` for `τ° = tau_factor · τ*(1)` on `[0, horizon]`,
    /// simulates every run up to `horizon`, and checks the gaps that end before it.
    pub fn run_enlargement(&self, tau_factor: f64, horizon: f64) -> Result<EnlargementOutcome> {
        let mc = self.config.experiment.mc_count;
        let trig = &self.config.trigger;
        let realized: Vec<(Vec<f64>, Disturbance<f64>)> = (0..mc)
            .map(|j| Ok((self.initial_state(j), self.disturbance(j)?)))
            .collect::<Result<_>>()?;
        let eps = self.disturbance_bound(realized.iter().map(|(_, d)| d.sup_norm()).fold(0.0, f64::max));
        let report = self.bounds(1.0, eps)?;
        let Separation::Guaranteed { tau_star_1, .. } = report.separation else {
            return Err(Error::Domain("enlargement needs a separation guarantee".into()));
        };
        let t1 = tau_star_1
            .finite()
            .ok_or_else(|| Error::Domain("unbounded tau*(1), nothing to enlarge".into()))?;
        let tau_circ = tau_factor * t1;
        // The ball radius uses sup φ₂ ≤ max(s_k, δ̄) of the unenlarged rule; the enlarged
        // threshold depends on the radius, so it cannot enter it.
        let phi2_sup = trig.s.max(trig.delta_bar);
        let lb = self.lyap.combined_lower_bound(self.consts.lambda);
        let mut rho = 0.0f64;
        for (xi0, d) in &realized {
            let inputs = BallInputs {
                d_inf: d.sup_norm(),
                phi2_sup,
                k2: 1.0,
                theta2: trig.theta2,
                theta3: trig.theta3,
            };
            rho = rho.max(rho_bar(&self.consts, &self.lyap, xi0, &inputs, lb)?);
        }
        let design = enlargement_design(&report, tau_circ, horizon, trig.delta_bar, rho)?;
        let cfg = self.enlargement_trigger(&design)?;
        // nothing is checked past the horizon
        let duration = self.config.experiment.duration.min(horizon);
        let runs: Vec<RunRecord> = realized
            .into_par_iter()
            .enumerate()
            .map(|(j, (xi0, d))| self.simulate_with(&cfg, j, xi0, &d, duration, None))
            .collect::<Result<_>>()?;
        let tol = self.integrator.event_tol;
        let mut violations = 0;
        let mut min_gap_before: Option<f64> = None;
        for r in &runs {
            for w in r.output.events.events.windows(2) {
                if w[1].t <= horizon {
                    let g = w[1].t - w[0].t;
                    min_gap_before = Some(min_gap_before.map_or(g, |m| m.min(g)));
                    if g < tau_circ - tol {
                        violations += 1;
                    }
                }
            }
        }
        Ok(EnlargementOutcome {
            design,
            tau_circ,
            eps,
            rho_bar: rho,
            summary: self.summarize("enlargement", 1.0, runs)?,
            violations,
            min_gap_before_horizon: min_gap_before,
        })
    }

    /// `k₁ = 0`, `k₂ = 1`, `φ₂ ≡ δ*` before `T°` and the `δ̄` rule afterwards.
    pub fn enlargement_trigger(&self, design: &EnlargementDesign<f64>) -> Result<TriggerConfig<f64>> {
        let mut cfg = self.case_config(Case::IV)?;
        cfg.schedule = DeltaSchedule::Enlargement {
            delta_star: design.delta_star,
            horizon: design.horizon,
            fallback: self.config.trigger.delta_bar,
        };
        cfg.reset_s = ResetS::Level;
        cfg.phi3 = Phi3Mode::Affine;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct EnlargementOutcome {
    pub design: EnlargementDesign<f64>,
    pub tau_circ: f64,
    pub eps: f64,
    pub rho_bar: f64,
    pub summary: CaseSummary,
    /// Gaps ending before the horizon that fall short of `τ°`.
    pub violations: usize,
    pub min_gap_before_horizon: Option<f64>,
}

impl EnlargementOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone)]
pub struct Table2 {
    pub rows: Vec<(Case, CaseSummary)>,
    pub tau_hat: f64,
}

/// Rank-order and magnitude checks against the reference comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingCheck {
    pub n_order: bool,
    pub tau_order: bool,
    /// Every mean N within ±50% of the reference.
    pub n_within_band: bool,
    /// `τ_m / τ̂ ≥ 3` for every case with `k₂ ≠ 0`.
    pub tau_ratio: bool,
}

impl OrderingCheck {
    pub fn all(&self) -> bool {
        self.n_order && self.tau_order && self.n_within_band && self.tau_ratio
    }
}

impl Table2 {
    pub fn get(&self, case: Case) -> Option<&CaseSummary> {
        self.rows.iter().find(|(c, _)| *c == case).map(|(_, s)| s)
    }

    /// `None` unless all six cases are present.
    pub fn check(&self) -> Option<OrderingCheck> {
        let s = |c: Case| self.get(c);
        let n = |c: Case| s(c).map(|x| x.mean_n);
        let tm = |c: Case| s(c).map(|x| x.tau_m.unwrap_or(f64::INFINITY));
        let [ni, nii, niii, niv, nv, nvi] = [n(Case::I)?, n(Case::II)?, n(Case::III)?, n(Case::IV)?, n(Case::V)?, n(Case::VI)?];
        let [ti, tii, tiii, tiv, tv, tvi] =
            [tm(Case::I)?, tm(Case::II)?, tm(Case::III)?, tm(Case::IV)?, tm(Case::V)?, tm(Case::VI)?];
        let n_order = ni.max(nii) < niv.min(nv) && niv.max(nv) < niii && niii < nvi;
        let tau_order = ti.min(tiv) > tii.max(tv) && tii.min(tv) > tiii && tiii > tvi;
        let n_within_band = Case::ALL
            .iter()
            .zip(REFERENCE_MEAN_N)
            .all(|(&c, r)| n(c).is_some_and(|v| (v - r).abs() <= 0.5 * r));
        let tau_ratio = self
            .rows
            .iter()
            .filter(|(_, x)| x.k2 != 0.0)
            .all(|(_, x)| x.tau_m.is_some_and(|t| t >= 3.0 * self.tau_hat));
        Some(OrderingCheck { n_order, tau_order, n_within_band, tau_ratio })
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.9e}"))
}

/// Per-case summary CSV.
pub fn write_summary_csv(mut w: impl Write, cases: &[&CaseSummary]) -> std::io::Result<()> {
    writeln!(
        w,
        "case,mean_n,tau_m,mean_gap,tau_m_bound,tau_hat,zeno_runs,invariant_violations,separation_violations,budget_flag_runs,min_lp_residual,mean_lp_ratio,max_event_residual,config_hash"
    )?;
    for c in cases {
        writeln!(
            w,
            "{},{:.4},{},{},{},{:.9e},{},{},{},{},{:.9e},{},{:.3e},{}",
            c.label,
            c.mean_n,
            opt(c.tau_m),
            opt(c.mean_gap),
            opt(c.tau_m_bound),
            c.bounds.tau_hat.to_f64(),
            c.zeno_runs,
            c.invariant_violations,
            c.separation_violations,
            c.budget_flag_runs,
            c.min_lp_residual,
            opt(c.mean_lp_ratio),
            c.max_event_residual,
            c.config_hash
        )?;
    }
    Ok(())
}

/// Event CSV over all runs: `run,k,t_k,gap,cause`.
pub fn write_events_csv(mut w: impl Write, runs: &[RunRecord]) -> std::io::Result<()> {
    writeln!(w, "run,k,t_k,gap,cause")?;
    for r in runs {
        let mut prev: Option<f64> = None;
        for (k, e) in r.output.events.events.iter().enumerate() {
            let gap = prev.map(|p| format!("{:.12e}", e.t - p)).unwrap_or_default();
            writeln!(w, "{},{},{:.12e},{},{}", r.index, k, e.t, gap, e.cause.as_str())?;
            prev = Some(e.t);
        }
    }
    Ok(())
}

/// Trajectory CSV: `t, xi[*], u[*], eps_norm, phi1, phi2, Phi, d[*], z[*]`.
pub fn write_trajectory_csv(mut w: impl Write, traj: &Trajectory<f64>) -> std::io::Result<()> {
    let Some(first) = traj.rows.first() else {
        return writeln!(w, "t");
    };
    let mut header = vec!["t".to_string()];
    header.extend((0..first.xi.len()).map(|i| format!("xi{}", i + 1)));
    header.extend((0..first.u.len()).map(|i| format!("u{}", i + 1)));
    header.extend(["eps_norm", "phi1", "phi2", "Phi"].map(String::from));
    header.extend((0..first.d.len()).map(|i| format!("d{}", i + 1)));
    header.extend((0..first.z.len()).map(|i| format!("z{}", i + 1)));
    writeln!(w, "{}", header.join(","))?;
    for r in &traj.rows {
        let mut cells = vec![r.t];
        cells.extend(&r.xi);
        cells.extend(&r.u);
        cells.extend([r.eps_norm, r.phi1, r.phi2, r.trigger]);
        cells.extend(&r.d);
        cells.extend(&r.z);
        let line: Vec<String> = cells.iter().map(|x| format!("{x:.9e}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// Bounds report as `key = value` lines.
pub fn format_bounds(report: &BoundsReport<f64>, consts: &CertificateConstants<f64>) -> String {
    let mut s = String::new();
    let range = consts.lambda_range().ok();
    let mut line = |k: &str, v: String| {
        s.push_str(&format!("{k} = {v}\n"));
    };
    if let Some(r) = range {
        line("lambda_range", format!("[{:.6e}, {:.6e}]", r.lower, r.upper));
    }
    line("lambda", format!("{:.6e}", consts.lambda));
    line("nu", format!("{:.6e}", consts.nu()));
    line("B1", format!("{:.6e}", report.b1));
    line("B3", format!("{:.6e}", report.b3));
    line("c", format!("{:.6e}", report.c));
    line("tau1", format!("{:.6e}", report.tau1.to_f64()));
    line("tau3", format!("{:.6e}", report.tau3.to_f64()));
    line("tau_hat", format!("{:.6e}", report.tau_hat.to_f64()));
    line("m1", format!("{:.6e}", report.m1));
    line("a", format!("{:.6e}", report.a));
    line("b", format!("{:.6e}", report.b));
    line("disturbance_bound", format!("{:.6e}", report.disturbance_bound));
    match report.separation {
        Separation::Guaranteed { m2, kappa, tau_star_1, tau_m } => {
            line("m2", format!("{m2:.6e}"));
            line("kappa", format!("{kappa:.6e}"));
            line("tau_star_1", format!("{:.6e}", tau_star_1.to_f64()));
            line("tau_m", format!("{:.6e}", tau_m.to_f64()));
        }
        Separation::NoGuarantee => line("tau_m", "none (k2*delta_bar = 0 under disturbance)".into()),
    }
    if let Some(r) = report.rho_bar {
        line("rho_bar", format!("{r:.6e}"));
    }
    line("certificate_checked", report.certificate_checked.to_string());
    s
}

/// Single CSV row mirroring [`format_bounds`].
pub fn bounds_csv(report: &BoundsReport<f64>) -> String {
    let (m2, kappa, ts1, tm) = match report.separation {
        Separation::Guaranteed { m2, kappa, tau_star_1, tau_m } => {
            (m2.to_string(), kappa.to_string(), tau_star_1.to_f64().to_string(), tau_m.to_f64().to_string())
        }
        Separation::NoGuarantee => Default::default(),
    };
    format!(
        "B1,B3,c,tau1,tau3,tau_hat,m1,m2,kappa,tau_star_1,tau_m,a,b,eps\n{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        report.b1,
        report.b3,
        report.c,
        report.tau1.to_f64(),
        report.tau3.to_f64(),
        report.tau_hat.to_f64(),
        report.m1,
        m2,
        kappa,
        ts1,
        tm,
        report.a,
        report.b,
        report.disturbance_bound
    )
}

/// Counts of events per cause over a set of runs.
pub fn cause_counts(runs: &[RunRecord]) -> [usize; 3] {
    let mut out = [0; 3];
    for r in runs {
        for e in &r.output.events.events {
            out[match e.cause {
                EventCause::Initial => 0,
                EventCause::Threshold => 1,
                EventCause::DwellForced => 2,
            }] += 1;
        }
    }
    out
}

pub fn describe_zeno(z: &ZenoAbort<f64>) -> String {
    match z {
        ZenoAbort::GapBelowGuard { t, gap } => format!("gap {gap:.3e} s below guard at t = {t:.6}"),
        ZenoAbort::TooManyEvents { t } => format!("event cap reached at t = {t:.6}"),
    }
}

/// `V_s + λV_c` at `xi`.
pub fn lyapunov_value(setup: &Setup, xi: &[f64]) -> f64 {
    setup.lyap.v_s(xi) + setup.consts.lambda * setup.lyap.v_c(xi)
}
