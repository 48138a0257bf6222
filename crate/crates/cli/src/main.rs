use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use etc_core::config::ExperimentConfig;
use etc_core::experiment::{
    bounds_csv, cause_counts, describe_zeno, format_bounds, write_events_csv, write_summary_csv,
    write_trajectory_csv, CaseSummary, Setup, REFERENCE_MEAN_N, REFERENCE_TAU_M_E2,
};
use etc_core::trigger::{Case, PRESET_NAMES};

#[derive(Parser)]
#[command(name = "etc-lab", version, about = "Event-triggered control experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the analytic bounds for the configured trigger.
    Bounds(Common),
    /// Monte-Carlo run of one case, or of the configured trigger.
    Run(Common),
    /// Run the case matrix and check the orderings.
    Table2(Common),
    /// Inter-event enlargement study.
    Enlarge {
        #[command(flatten)]
        common: Common,
        /// τ° as a multiple of τ*(1).
        #[arg(long)]
        tau_factor: Option<f64>,
        /// Horizon T° in seconds.
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// List presets; with --run, simulate each one.
    Presets {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        run: bool,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Case label (i..vi); repeatable for table2.
    #[arg(long)]
    case: Vec<String>,
    #[arg(long)]
    mc_count: Option<usize>,
    /// Write one trajectory CSV per run, keeping every n-th step.
    #[arg(long, value_name = "STRIDE", num_args = 0..=1, default_missing_value = "100")]
    dump_trajectories: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<(Setup, PathBuf)> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => ExperimentConfig::default(),
        };
        let e = &mut cfg.experiment;
        if let Some(s) = self.seed {
            e.seed = s;
        }
        if let Some(d) = self.duration {
            e.duration = d;
        }
        if let Some(n) = self.mc_count {
            e.mc_count = n;
        }
        if !self.case.is_empty() {
            e.cases = self.case.clone();
        }
        if let Some(h) = self.step {
            cfg.integrator.step = h;
        }
        let out = self.out_dir.clone().unwrap_or_else(|| PathBuf::from(&cfg.experiment.out_dir));
        cfg.check()?;
        Ok((Setup::new(cfg)?, out))
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    let p = dir.join(name);
    Ok(BufWriter::new(File::create(&p).with_context(|| format!("creating {}", p.display()))?))
}

fn summary_text(s: &CaseSummary) -> String {
    let causes = cause_counts(&s.runs);
    let mut t = format!("[{}]\n", s.label);
    t += &format!("runs = {}\n", s.runs.len());
    t += &format!("mean_n = {:.4}\n", s.mean_n);
    t += &format!("tau_m = {}\n", s.tau_m.map_or("none".into(), |x| format!("{x:.6e}")));
    t += &format!("mean_gap = {}\n", s.mean_gap.map_or("none".into(), |x| format!("{x:.6e}")));
    t += &format!("tau_m_bound = {}\n", s.tau_m_bound.map_or("none".into(), |x| format!("{x:.6e}")));
    t += &format!("events_threshold = {}\nevents_dwell = {}\n", causes[1], causes[2]);
    t += &format!("zeno_runs = {}\n", s.zeno_runs);
    for r in s.runs.iter().filter_map(|r| r.output.zeno.as_ref().map(|z| (r.index, z))).take(3) {
        t += &format!("# run {}: {}\n", r.0, describe_zeno(r.1));
    }
    t += &format!("invariant_violations = {}\n", s.invariant_violations);
    t += &format!("separation_violations = {}\n", s.separation_violations);
    t += &format!("budget_flag_runs = {}\n", s.budget_flag_runs);
    t += &format!("min_lp_residual = {:.6e}\n", s.min_lp_residual);
    t += &format!("mean_lp_ratio = {}\n", s.mean_lp_ratio.map_or("none".into(), |x| format!("{x:.6e}")));
    t += &format!("max_event_residual = {:.3e}\n", s.max_event_residual);
    t += &format!("config_hash = {}\n", s.config_hash);
    t
}

fn write_case(dir: &Path, s: &CaseSummary, stride: Option<usize>) -> Result<()> {
    write_events_csv(create(dir, &format!("events_{}.csv", s.label))?, &s.runs)?;
    if stride.is_some() {
        for r in &s.runs {
            if let Some(tr) = &r.output.trajectory {
                write_trajectory_csv(create(dir, &format!("trajectory_{}_{:03}.csv", s.label, r.index))?, tr)?;
            }
        }
    }
    Ok(())
}

fn write_summaries(dir: &Path, cases: &[&CaseSummary], extra: &str) -> Result<()> {
    write_summary_csv(create(dir, "summary.csv")?, cases)?;
    let mut f = create(dir, "summary.txt")?;
    for s in cases {
        writeln!(f, "{}", summary_text(s))?;
    }
    f.write_all(extra.as_bytes())?;
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Bounds(c) => {
            let (setup, _) = c.load()?;
            let trig = setup.configured_trigger()?;
            let mc = setup.config.experiment.mc_count;
            let eps = match setup.config.experiment.disturbance_bound {
                Some(b) => b,
                None => (0..mc).map(|j| setup.disturbance(j).map(|d| d.sup_norm())).try_fold(0.0f64, |m, x| x.map(|x| m.max(x)))?,
            };
            let report = setup.bounds(trig.k2, eps)?;
            print!("{}", format_bounds(&report, &setup.consts));
            println!("config_hash = {}\n", setup.config_hash);
            print!("{}", bounds_csv(&report));
        }
        Command::Run(c) => {
            let (setup, out) = c.load()?;
            let summary = if c.case.len() == 1 {
                let case = Case::parse(&c.case[0])?;
                setup.run_trigger(case.label(), &setup.case_config(case)?, c.dump_trajectories)?
            } else {
                let trig = setup.configured_trigger()?;
                let label = match setup.config.trigger.preset.as_str() {
                    "" => "configured",
                    name => name,
                };
                setup.run_trigger(label, &trig, c.dump_trajectories)?
            };
            write_case(&out, &summary, c.dump_trajectories)?;
            write_summaries(&out, &[&summary], "")?;
            print!("{}", summary_text(&summary));
        }
        Command::Table2(c) => {
            let (setup, out) = c.load()?;
            let mut rows = Vec::new();
            for case in setup.config.cases()? {
                let cfg = setup.case_config(case)?;
                let s = setup.run_trigger(case.label(), &cfg, c.dump_trajectories)?;
                eprintln!("case {case}: mean N = {:.3}, tau_m = {:?}", s.mean_n, s.tau_m);
                write_case(&out, &s, c.dump_trajectories)?;
                rows.push((case, s));
            }
            let table = etc_core::experiment::Table2 { rows, tau_hat: setup.tau_hat.to_f64() };
            let mut extra = String::from("[reference]\ncase,mean_n,tau_m_e2\n");
            for (i, c) in Case::ALL.iter().enumerate() {
                extra += &format!("{},{},{}\n", c.label(), REFERENCE_MEAN_N[i], REFERENCE_TAU_M_E2[i]);
            }
            match table.check() {
                Some(k) => {
                    extra += &format!(
                        "\n[ordering]\nn_order = {}\ntau_order = {}\nn_within_band = {}\ntau_ratio = {}\n",
                        k.n_order, k.tau_order, k.n_within_band, k.tau_ratio
                    );
                }
                None => extra += "\n[ordering]\n# needs all six cases\n",
            }
            let refs: Vec<&CaseSummary> = table.rows.iter().map(|(_, s)| s).collect();
            write_summaries(&out, &refs, &extra)?;
            for s in &refs {
                println!("{:>4}  N = {:8.3}  tau_m = {}", s.label, s.mean_n, s.tau_m.map_or("none".into(), |x| format!("{x:.4e}")));
            }
            print!("\n{extra}");
        }
        Command::Enlarge { common, tau_factor, horizon } => {
            let (setup, out) = common.load()?;
            let e = &setup.config.experiment.enlargement;
            let res = setup.run_enlargement(tau_factor.unwrap_or(e.tau_factor), horizon.unwrap_or(e.horizon))?;
            let d = &res.design;
            let extra = format!(
                "[enlargement]\ntau_circ = {:.6e}\nhorizon = {}\nchi_circ = {:.6e}\nchi_star = {:.6e}\ndelta_star = {:.6e}\ntau_star_max = {:.6e}\neps = {:.6e}\nrho_bar = {:.6e}\nmin_gap_before_horizon = {}\nviolations = {}\npassed = {}\n",
                res.tau_circ,
                d.horizon,
                d.chi_circ,
                d.chi_star,
                d.delta_star,
                d.tau_star_max,
                res.eps,
                res.rho_bar,
                res.min_gap_before_horizon.map_or("none".into(), |x| format!("{x:.6e}")),
                res.violations,
                res.passed()
            );
            write_case(&out, &res.summary, None)?;
            write_summaries(&out, &[&res.summary], &extra)?;
            print!("{}\n{extra}", summary_text(&res.summary));
        }
        Command::Presets { common, run } => {
            let (setup, out) = common.load()?;
            let mut sums = Vec::new();
            for name in PRESET_NAMES {
                let cfg = setup.preset_config(name)?;
                println!(
                    "{name:>13}: k_bar = {}, k1 = {}, k2 = {}, delta_bar = {}, dwell = {}",
                    cfg.k_bar,
                    cfg.k1,
                    cfg.k2,
                    cfg.delta_bar,
                    cfg.dwell.map_or("none".into(), |d| format!("{d:.4e}"))
                );
                if run {
                    let s = setup.run_trigger(name, &cfg, None)?;
                    write_case(&out, &s, None)?;
                    sums.push(s);
                }
            }
            if run {
                let refs: Vec<&CaseSummary> = sums.iter().collect();
                write_summaries(&out, &refs, "")?;
                for s in &sums {
                    println!("{:>13}  N = {:8.3}  tau_m = {}", s.label, s.mean_n, s.tau_m.map_or("none".into(), |x| format!("{x:.4e}")));
                }
            }
        }
    }
    Ok(())
}
