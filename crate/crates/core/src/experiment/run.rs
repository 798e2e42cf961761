use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, TimeSpec};
use crate::dds::build_damped_with;
use crate::diagnostics::{
    self, csv_header, csv_row, error_metrics, format_number, key_value_text, measurement_report, query_cost,
    MeasurementReport, QueryCost, QueryCostModel, DEFAULT_LOG_CAP,
};
use crate::error::{Error, Result};
use crate::helmholtz::{build_preconditioned, build_system, HelmholtzProblem, PreconditionMode};
use crate::linalg::{real, CVector};
use crate::schrod::{build_schrod, evolve_at, recover, EvolveOptions, SchrodOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub t: f64,
    /// `‖v(t) - x‖_∞`.
    pub err_inf: f64,
    /// `‖v(t) - x‖ / ‖x‖`.
    pub err_rel: f64,
}

/// Everything a run produces; files are written only when `config.out` is set.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub nodes: Vec<f64>,
    pub u_exact: CVector,
    /// Direct solution of the discrete system.
    pub discrete: CVector,
    /// Recovered `v(T)`.
    pub v: CVector,
    pub metrics: Vec<(&'static str, f64)>,
    pub measurement: MeasurementReport,
    pub cost: QueryCost,
    pub checkpoints: Vec<Checkpoint>,
    pub warnings: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl ExperimentReport {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }

    pub fn solution_csv(&self) -> String {
        let mut s = String::from("x,re_u_exact,im_u_exact,re_v,im_v\n");
        for (i, x) in self.nodes.iter().enumerate() {
            let (u, v) = (self.u_exact[i], self.v[i]);
            let row = [*x, u.re, u.im, v.re, v.im].map(format_number);
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }

    pub fn metrics_csv(&self) -> String {
        format!("{}\n{}\n", csv_header(&self.metrics), csv_row(&self.metrics))
    }

    pub fn checkpoints_csv(&self) -> String {
        let mut s = String::from("t,err_inf,err_rel\n");
        for c in &self.checkpoints {
            let _ = writeln!(s, "{},{},{}", format_number(c.t), format_number(c.err_inf), format_number(c.err_rel));
        }
        s
    }

    pub fn summary_text(&self) -> String {
        let mut s = String::from("[config]\n");
        s.push_str(&self.config.to_key_value_text());
        s.push_str("\n[metrics]\n");
        s.push_str(&key_value_text(&self.metrics));
        if !self.warnings.is_empty() {
            s.push_str("\n[warnings]\n");
            for w in &self.warnings {
                let _ = writeln!(s, "{w}");
            }
        }
        s
    }
}

/// `count` log-spaced times from `T/1000` to `T`; just `[T]` when `count <= 1`.
pub fn checkpoint_times(t_final: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![t_final];
    }
    let mut times: Vec<f64> =
        (0..count).map(|i| t_final * 10f64.powf(-3.0 + 3.0 * i as f64 / (count - 1) as f64)).collect();
    times[count - 1] = t_final;
    times
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

/// `prefix` with `suffix` appended to its file name.
pub fn output_path(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(suffix);
    prefix.with_file_name(name)
}

/// Runs build → damped flow → lift → evolve → recover → diagnostics.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let problem = HelmholtzProblem::with_cells(cfg.k, cfg.cell_count()?)?;
    let sys = build_system(&problem)?;
    let pre = build_preconditioned(&sys, cfg.precondition)?;
    let eps = cfg.stage_epsilon();
    let t_fixed = match cfg.t {
        TimeSpec::Auto => None,
        TimeSpec::Fixed(t) => Some(t),
    };
    let damped = build_damped_with(&pre.operator, &pre.rhs, pre.singular_values, eps, t_fixed)?;
    let schrod = build_schrod(
        &damped,
        &SchrodOptions { profile: cfg.psi, domain: cfg.lr, m: cfg.m, epsilon: eps, strict: cfg.strict },
    )?;
    let t_final = schrod.t_final;
    let opts = EvolveOptions { propagator: cfg.propagator, threads: cfg.threads, ..Default::default() };
    let times = checkpoint_times(t_final, cfg.checkpoints);
    let states = evolve_at(&schrod, &schrod.initial_state(), &times, opts)?;
    let last = states.last().expect("at least one time");
    let rec = recover(last, &schrod.grid, schrod.p_diamond, cfg.recovery)?;

    let x = sys.solve()?;
    let u = sys.exact_at_nodes();
    let err_x = error_metrics(&rec.v, &x)?;
    let err_u = error_metrics(&rec.v, &u)?;
    let disc = error_metrics(&x, &u)?;
    let tf = &damped.forcing * real(t_final);
    let r_err = (&rec.r - &tf).norm() / tf.norm();
    let norm_dev = states.iter().map(|s| (s.norm_ratio() - 1.0).abs()).fold(0.0, f64::max);

    let mut checkpoints = Vec::with_capacity(states.len());
    if cfg.checkpoints > 0 {
        let x_inf = x.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        for state in &states {
            let v = recover(state, &schrod.grid, schrod.p_diamond, cfg.recovery)?.v;
            let m = error_metrics(&v, &x)?;
            checkpoints.push(Checkpoint { t: state.time, err_inf: m.linf_rel * x_inf, err_rel: m.l2_rel });
        }
    }

    let measurement = measurement_report(
        last,
        &schrod.grid,
        schrod.profile,
        schrod.p_diamond,
        DEFAULT_LOG_CAP,
        &rec.v,
        &pre.rhs,
        t_final,
    )?;
    let model = QueryCostModel::from_run(
        &schrod.h1,
        &schrod.h2,
        &schrod.grid,
        t_final,
        pre.kappa_estimate(),
        cfg.epsilon,
        last.norm0,
        rec.v.norm(),
        measurement.g_repeats,
    )?;
    let cost = query_cost(&model);

    let grid = &schrod.grid;
    let mut metrics: Vec<(&'static str, f64)> = vec![
        ("k", cfg.k),
        ("cells", problem.cells() as f64),
        ("h", problem.h()),
        ("kh", problem.kh()),
        ("k_hat", sys.k_hat),
        ("unknowns", sys.dim() as f64),
        ("sigma_min_a", sys.singular_values.min),
        ("sigma_max_a", sys.singular_values.max),
        ("kappa_a", sys.condition_number()),
        ("sigma_min_op", pre.singular_values.min),
        ("sigma_max_op", pre.singular_values.max),
        ("kappa_op", pre.kappa_estimate()),
        ("gamma", damped.gamma),
        ("t_final", t_final),
        ("epsilon", cfg.epsilon),
        ("stage_epsilon", eps),
        ("p_left", grid.left),
        ("p_right", grid.right),
        ("p_points", grid.points as f64),
        ("dp", grid.dp()),
        ("nu_max", grid.nu_max()),
        ("p_diamond", schrod.p_diamond),
        ("lambda_min_h1", schrod.h1_extremes.0),
        ("lambda_max_h1", schrod.h1_extremes.1),
        ("recovery_p", rec.p),
        ("norm_deviation", norm_dev),
        ("err_x_l2", err_x.l2_rel),
        ("err_x_linf", err_x.linf_rel),
        ("err_u_l2", err_u.l2_rel),
        ("err_u_linf", err_u.linf_rel),
        ("disc_l2", disc.l2_rel),
        ("disc_linf", disc.linf_rel),
        ("r_block_rel", r_err),
    ];
    metrics.extend(measurement.fields());
    metrics.push(("alpha_h", model.alpha_h));
    metrics.push(("delta", model.delta));
    metrics.extend(cost.fields());

    let mut report = ExperimentReport {
        config: cfg.clone(),
        nodes: sys.nodes.clone(),
        u_exact: u,
        discrete: x,
        v: rec.v,
        metrics,
        measurement,
        cost,
        checkpoints,
        warnings: schrod.warnings.clone(),
        files: Vec::new(),
    };

    if let Some(prefix) = &cfg.out {
        let mut outputs = vec![
            (output_path(prefix, "_solution.csv"), report.solution_csv()),
            (output_path(prefix, "_metrics.csv"), report.metrics_csv()),
        ];
        if cfg.checkpoints > 0 {
            outputs.push((output_path(prefix, "_checkpoints.csv"), report.checkpoints_csv()));
        }
        outputs.push((output_path(prefix, "_summary.txt"), report.summary_text()));
        for (path, text) in outputs {
            write_file(&path, &text)?;
            report.files.push(path);
        }
    }
    Ok(report)
}

/// Parameter swept by [`run_convergence_study`].
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// Mesh exponents.
    N(Vec<u32>),
    /// p-grid exponents.
    M(Vec<u32>),
    /// Wavenumbers at the base configuration's `kh`.
    K(Vec<f64>),
}

impl Sweep {
    /// `n=4,5,6`, `m=6,7,8` or `k=10,20,30`.
    pub fn parse(text: &str) -> Result<Self> {
        let (key, list) = text
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("invalid sweep '{text}' (expected n=.., m=.. or k=..)")))?;
        let items: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        if items.is_empty() {
            return Err(Error::Config("sweep list is empty".into()));
        }
        let bad = |s: &str| Error::Config(format!("invalid sweep value '{s}'"));
        match key.trim() {
            "n" => items.iter().map(|s| s.parse().map_err(|_| bad(s))).collect::<Result<_>>().map(Sweep::N),
            "m" => items.iter().map(|s| s.parse().map_err(|_| bad(s))).collect::<Result<_>>().map(Sweep::M),
            "k" => items.iter().map(|s| s.parse().map_err(|_| bad(s))).collect::<Result<_>>().map(Sweep::K),
            other => Err(Error::Config(format!("cannot sweep over '{other}'"))),
        }
    }

    fn len(&self) -> usize {
        match self {
            Sweep::N(v) => v.len(),
            Sweep::M(v) => v.len(),
            Sweep::K(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StudyReport {
    pub rows: Vec<Vec<(&'static str, f64)>>,
    pub fits: Vec<(String, f64)>,
    pub files: Vec<PathBuf>,
}

impl StudyReport {
    pub fn csv(&self) -> String {
        let mut s = String::new();
        if let Some(first) = self.rows.first() {
            let _ = writeln!(s, "{}", csv_header(first));
        }
        for row in &self.rows {
            let _ = writeln!(s, "{}", csv_row(row));
        }
        s
    }

    pub fn fits_text(&self) -> String {
        self.fits.iter().map(|(k, v)| format!("{k} = {}\n", format_number(*v))).collect()
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().find(|(k, _)| *k == name).map(|(_, v)| *v).unwrap_or(f64::NAN)).collect()
    }
}

/// One run per sweep point, plus fitted rates.
pub fn run_convergence_study(base: &ExperimentConfig, sweep: &Sweep) -> Result<StudyReport> {
    if sweep.len() == 0 {
        return Err(Error::Config("sweep list is empty".into()));
    }
    base.validate()?;
    let base_cells = base.cell_count()?;
    let mut rows = Vec::new();
    let mut solutions: Vec<CVector> = Vec::new();
    for i in 0..sweep.len() {
        let mut cfg = ExperimentConfig { out: None, checkpoints: 0, ..base.clone() };
        let param = match sweep {
            Sweep::N(v) => {
                cfg.n = v[i];
                cfg.cells = None;
                v[i] as f64
            }
            Sweep::M(v) => {
                cfg.m = v[i];
                v[i] as f64
            }
            Sweep::K(v) => {
                cfg.k = v[i];
                cfg.cells = Some((base_cells as f64 * v[i] / base.k).round() as usize);
                v[i]
            }
        };
        let report = run_experiment(&cfg)?;
        let kappa_pa = if cfg.precondition == PreconditionMode::None {
            let sys = build_system(&HelmholtzProblem::with_cells(cfg.k, cfg.cell_count()?)?)?;
            build_preconditioned(&sys, PreconditionMode::RealShift)?.kappa_estimate()
        } else {
            report.metric("kappa_op").unwrap_or(f64::NAN)
        };
        let diff_prev = match (sweep, solutions.last()) {
            (Sweep::M(_), Some(prev)) => (&report.v - prev).norm() / report.v.norm(),
            _ => f64::NAN,
        };
        let m = |name: &str| report.metric(name).unwrap_or(f64::NAN);
        rows.push(vec![
            ("param", param),
            ("k", cfg.k),
            ("cells", m("cells")),
            ("m", cfg.m as f64),
            ("dp", m("dp")),
            ("t_final", m("t_final")),
            ("err_x_l2", m("err_x_l2")),
            ("err_u_l2", m("err_u_l2")),
            ("disc_l2", m("disc_l2")),
            ("kappa_a", m("kappa_a")),
            ("kappa_pa", kappa_pa),
            ("g_repeats", m("g_repeats")),
            ("be_queries", m("be_queries")),
            ("diff_prev", diff_prev),
        ]);
        solutions.push(report.v);
    }

    let mut study = StudyReport { rows, fits: Vec::new(), files: Vec::new() };
    let col = |name: &str| study.column(name);
    let mut fits: Vec<(String, f64)> = Vec::new();
    match sweep {
        Sweep::N(_) => {
            let h: Vec<f64> = col("cells").iter().map(|c| 1.0 / c).collect();
            if h.len() >= 2 {
                fits.push(("disc_l2_order_in_h".into(), diagnostics::fit_loglog_slope(&h, &col("disc_l2"))));
                fits.push(("err_u_l2_order_in_h".into(), diagnostics::fit_loglog_slope(&h, &col("err_u_l2"))));
            }
        }
        Sweep::M(_) => {
            let diffs: Vec<f64> = col("diff_prev").into_iter().skip(1).collect();
            let dp = col("dp");
            let ratio = if dp.len() >= 2 { dp[0] / dp[1] } else { 2.0 };
            for (i, order) in diagnostics::observed_orders(&diffs, ratio).into_iter().enumerate() {
                fits.push((format!("order_dp_{}", i + 1), order));
            }
        }
        Sweep::K(_) => {
            let k = col("k");
            if k.len() >= 2 {
                fits.push(("kappa_a_slope_in_k".into(), diagnostics::fit_loglog_slope(&k, &col("kappa_a"))));
                fits.push(("kappa_pa_slope_in_k".into(), diagnostics::fit_loglog_slope(&k, &col("kappa_pa"))));
                fits.push(("g_slope_in_k".into(), diagnostics::fit_loglog_slope(&k, &col("g_repeats"))));
            }
        }
    }
    study.fits = fits;

    if let Some(prefix) = &base.out {
        for (suffix, text) in [("_study.csv", study.csv()), ("_study_fits.txt", study.fits_text())] {
            let path = output_path(prefix, suffix);
            write_file(&path, &text)?;
            study.files.push(path);
        }
    }
    Ok(study)
}
