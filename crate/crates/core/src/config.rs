//! Experiment configuration file.
//!
//! Every field has a default equal to the Lur'e benchmark, so an empty document describes
//! the reference setup. Unknown keys are rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::Bound;
use crate::error::{Error, Result};
use crate::plants::{DisturbanceSpec, LureDesign};
use crate::sim::IntegratorConfig;
use crate::trigger::{
    preset, Budgets, Case, ClassK, DeltaSchedule, Phi2Mode, Phi3Mode, PresetContext, ResetR, ResetRHat, ResetS,
    TriggerConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub plant: PlantSection,
    #[serde(default)]
    pub certificate: CertificateSection,
    #[serde(default)]
    pub trigger: TriggerSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PlantKind {
    #[default]
    Lure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlantSection {
    pub kind: PlantKind,
    pub h_star: f64,
}

impl Default for PlantSection {
    fn default() -> Self {
        Self { kind: PlantKind::Lure, h_star: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertificateSection {
    pub upsilon1: f64,
    pub n1: f64,
    pub n2: f64,
    pub sigma: f64,
    pub mu_d: f64,
    pub lambda: f64,
    /// `[λ₁, λ₂, λ₃]`.
    pub lipschitz: [f64; 3],
}

impl Default for CertificateSection {
    fn default() -> Self {
        let b = LureDesign::benchmark();
        Self {
            upsilon1: b.upsilon1,
            n1: b.n1,
            n2: b.n2,
            sigma: b.sigma,
            mu_d: b.mu_d,
            lambda: b.lambda,
            lipschitz: [3.0, 1.0, 1.0],
        }
    }
}

impl CertificateSection {
    pub fn design(&self, h_star: f64) -> LureDesign<f64> {
        LureDesign {
            upsilon1: self.upsilon1,
            n1: self.n1,
            n2: self.n2,
            sigma: self.sigma,
            mu_d: self.mu_d,
            lambda: self.lambda,
            h_star,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Constant,
    Exponential,
    Staircase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleSection {
    pub kind: ScheduleKind,
    /// `D₁` or `D₂`; the constant value for `constant`.
    pub scale: f64,
    /// `ϱ₁`
    pub rate: f64,
    /// `ϱ₂`
    pub base: f64,
    /// `n̄`
    pub period: f64,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        Self { kind: ScheduleKind::Exponential, scale: 10.0, rate: 0.05, base: 3.0, period: 10.0 }
    }
}

impl ScheduleSection {
    pub fn schedule(&self) -> DeltaSchedule<f64> {
        match self.kind {
            ScheduleKind::Constant => DeltaSchedule::Constant(self.scale),
            ScheduleKind::Exponential => DeltaSchedule::Exponential { scale: self.scale, rate: self.rate },
            ScheduleKind::Staircase => {
                DeltaSchedule::FactorialStaircase { scale: self.scale, base: self.base, period: self.period }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phi3Choice {
    Affine,
    NonAffine,
    Off,
}

impl From<Phi3Choice> for Phi3Mode {
    fn from(c: Phi3Choice) -> Self {
        match c {
            Phi3Choice::Affine => Phi3Mode::Affine,
            Phi3Choice::NonAffine => Phi3Mode::NonAffine,
            Phi3Choice::Off => Phi3Mode::Off,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RHatChoice {
    Carryover,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TriggerSection {
    /// Named preset used by `run` when no case is given; empty means the explicit gains below.
    pub preset: String,
    pub k_bar: f64,
    pub k1: f64,
    pub k2: f64,
    /// Slopes of the linear `α₁`, `α₂`.
    pub alpha1: f64,
    pub alpha2: f64,
    pub delta_bar: f64,
    /// `s_k`
    pub s: f64,
    /// Constant `r_k`.
    pub r: f64,
    pub r_hat: RHatChoice,
    pub schedule: ScheduleSection,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub phi3: Phi3Choice,
    pub dwell: Option<f64>,
}

impl Default for TriggerSection {
    fn default() -> Self {
        Self {
            preset: String::new(),
            k_bar: 1.0,
            k1: 1.0,
            k2: 1.0,
            alpha1: 1.0,
            alpha2: 1.0,
            delta_bar: 10.0,
            s: 12.5,
            r: 0.0,
            r_hat: RHatChoice::Carryover,
            schedule: ScheduleSection::default(),
            theta1: 400.0,
            theta2: 1.0,
            theta3: 100.0,
            phi3: Phi3Choice::Affine,
            dwell: None,
        }
    }
}

impl TriggerSection {
    pub fn budgets(&self) -> Budgets<f64> {
        Budgets { theta1: self.theta1, theta2: self.theta2, theta3: self.theta3 }
    }

    pub fn preset_context(&self, tau_hat: Bound<f64>, tau_m: f64) -> PresetContext<f64> {
        PresetContext { delta_bar: self.delta_bar, s: self.s, tau_hat, tau_m, budgets: self.budgets() }
    }

    /// Configuration for one of the six comparison cases, with this section's thresholds.
    pub fn case_config(&self, case: Case, tau_hat: Bound<f64>, tau_m: f64) -> Result<TriggerConfig<f64>> {
        let mut cfg = case.config(&self.preset_context(tau_hat, tau_m));
        cfg.alpha1 = ClassK::Linear(self.alpha1);
        cfg.alpha2 = ClassK::Linear(self.alpha2);
        cfg.reset_r = ResetR::Constant(self.r);
        cfg.reset_r_hat = self.r_hat_rule();
        cfg.phi3 = self.phi3.into();
        cfg.validate()?;
        Ok(cfg)
    }

    fn r_hat_rule(&self) -> ResetRHat {
        match self.r_hat {
            RHatChoice::Carryover => ResetRHat::Carryover,
            RHatChoice::Zero => ResetRHat::Zero,
        }
    }

    /// The configured preset, or the explicit gains when no preset is named.
    pub fn trigger_config(&self, tau_hat: Bound<f64>, tau_m: f64) -> Result<TriggerConfig<f64>> {
        if !self.preset.is_empty() {
            return preset(&self.preset, &self.preset_context(tau_hat, tau_m));
        }
        let alpha = |slope: f64| if slope == 0.0 { ClassK::Zero } else { ClassK::Linear(slope) };
        let cfg = TriggerConfig {
            k_bar: self.k_bar,
            k1: self.k1,
            k2: self.k2,
            alpha1: alpha(self.alpha1),
            alpha2: alpha(self.alpha2),
            delta_bar: self.delta_bar,
            schedule: self.schedule.schedule(),
            tau_hat,
            reset_r: ResetR::Constant(self.r),
            reset_r_hat: self.r_hat_rule(),
            reset_s: ResetS::Constant(self.s),
            budgets: self.budgets(),
            phi3: self.phi3.into(),
            phi2_mode: Phi2Mode::Standard,
            dwell: self.dwell,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub step: f64,
    pub event_tol: f64,
    pub min_gap: f64,
    pub max_events: usize,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let s = IntegratorConfig::standard();
        Self { step: s.step, event_tol: s.event_tol, min_gap: s.min_gap, max_events: s.max_events }
    }
}

impl IntegratorSection {
    pub fn integrator(&self) -> Result<IntegratorConfig<f64>> {
        let c = IntegratorConfig {
            step: self.step,
            event_tol: self.event_tol,
            min_gap: self.min_gap,
            max_events: self.max_events,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisturbanceKind {
    Zero,
    Gaussian,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DisturbanceSection {
    pub kind: DisturbanceKind,
    pub variance: f64,
    /// Disturbance is zero from this time on.
    pub window: f64,
    /// Sample-hold period; the integrator step when absent.
    pub hold: Option<f64>,
    /// Value of the constant variant.
    pub value: f64,
}

impl Default for DisturbanceSection {
    fn default() -> Self {
        Self { kind: DisturbanceKind::Gaussian, variance: 1.0, window: 100.0, hold: None, value: 0.0 }
    }
}

impl DisturbanceSection {
    pub fn spec(&self, seed: u64) -> DisturbanceSpec {
        match self.kind {
            DisturbanceKind::Zero => DisturbanceSpec::Zero,
            DisturbanceKind::Gaussian => {
                DisturbanceSpec::Gaussian { variance: self.variance, window: self.window, hold: self.hold, seed }
            }
            DisturbanceKind::Constant => DisturbanceSpec::Constant { value: vec![self.value] },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    /// Uniform on the circle of the given radius.
    Circle,
    /// Uniform on the disk of the given radius.
    Disk,
    /// Always `fixed_state`.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnlargementSection {
    /// `τ° = tau_factor · τ*(1)`.
    pub tau_factor: f64,
    pub horizon: f64,
}

impl Default for EnlargementSection {
    fn default() -> Self {
        Self { tau_factor: 2.0, horizon: 50.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub seed: u64,
    pub mc_count: usize,
    pub duration: f64,
    pub disturbance: DisturbanceSection,
    pub initial: InitialKind,
    pub radius: f64,
    pub fixed_state: Vec<f64>,
    pub cases: Vec<String>,
    /// `ε` for the separation guarantee; each realization's `‖d‖_∞` when absent.
    pub disturbance_bound: Option<f64>,
    pub enlargement: EnlargementSection,
    pub out_dir: String,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            seed: 20_190_101,
            mc_count: 100,
            duration: 100.0,
            disturbance: DisturbanceSection::default(),
            initial: InitialKind::Circle,
            radius: 1.0,
            fixed_state: vec![(std::f64::consts::PI / 3.0).sin(), (std::f64::consts::PI / 3.0).cos()],
            cases: Case::ALL.iter().map(|c| c.label().to_string()).collect(),
            disturbance_bound: None,
            enlargement: EnlargementSection::default(),
            out_dir: "out".into(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml_string().as_bytes()))
    }

    pub fn cases(&self) -> Result<Vec<Case>> {
        let mut out: Vec<Case> = Vec::new();
        for label in &self.experiment.cases {
            let c = Case::parse(label)?;
            if out.contains(&c) {
                return Err(Error::Config(format!("case '{label}' listed twice")));
            }
            out.push(c);
        }
        Ok(out)
    }

    pub fn check(&self) -> Result<()> {
        let e = &self.experiment;
        if !(e.duration >= 0.0) || e.mc_count == 0 || !(e.radius >= 0.0) {
            return Err(Error::Config("experiment needs duration >= 0, mc_count >= 1, radius >= 0".into()));
        }
        if e.initial == InitialKind::Fixed && e.fixed_state.len() != 2 {
            return Err(Error::Config("fixed_state must have two entries".into()));
        }
        if let Some(b) = e.disturbance_bound {
            if !(b >= 0.0) {
                return Err(Error::Config("disturbance_bound must be nonnegative".into()));
            }
        }
        self.integrator.integrator()?;
        self.cases()?;
        Ok(())
    }
}
