//! The `tev` command line: flag parsing, config merging and dispatch.
//!
//! Exit codes: 0 success, 1 solver error, 2 configuration or parse error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use tev_core::assembly::assemble;
use tev_core::disk::{self, DetCurve};
use tev_core::eig::dirichlet_eigs;
use tev_core::mesh::generate;
use tev_core::tev_fem::FemSolver;
use tev_core::{DomainSpec, TevResult};

use crate::config::{normalize_key, parse_text, Command, RunConfig};
use crate::error::{TevError, TevResultOf};
use crate::experiments::{run_eta_limit_study, run_monotonicity_sweep, BackendChoice, LimitMode, SweepRow, SweepTable};
use crate::io;

/// Environment variable overriding `threads`.
pub const THREADS_ENV: &str = "TEV_THREADS";

#[derive(Parser, Debug)]
#[command(name = "tev", version, about = "Real transmission eigenvalues with a conductive boundary")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Roots of the disk determinant d_m(k)
    Disk(Knobs),
    /// First transmission eigenvalue by finite elements
    Fem(Knobs),
    /// Dirichlet eigenvalues of -Laplace or -n^{-1} div A grad
    Dirichlet(Knobs),
    /// k_1 along a one-parameter sweep with a monotonicity verdict
    Sweep(Knobs),
    /// Conductivity limit study with EOC and limit identification
    Eoc(Knobs),
    /// Generate, inspect or save a mesh
    Mesh(Knobs),
}

/// Flags shared by every subcommand; each maps to the config key of the
/// same name with dashes turned into underscores.
#[derive(Args, Debug, Default)]
struct Knobs {
    /// Config file of key = value lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra key=value setting (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Print the resolved configuration and exit
    #[arg(long)]
    print_config: bool,

    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    refine: Option<String>,
    #[arg(long)]
    scan_refine: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a11: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a12: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a22: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long)]
    allow_zero_eta: bool,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    m_max: Option<String>,
    #[arg(long)]
    k_min: Option<String>,
    #[arg(long)]
    k_max: Option<String>,
    #[arg(long)]
    grid_step: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    scan_step: Option<String>,
    #[arg(long)]
    bisect_tol: Option<String>,
    #[arg(long)]
    eig_tol: Option<String>,
    #[arg(long)]
    eig_max_iter: Option<String>,
    /// mass or h1
    #[arg(long)]
    weight: Option<String>,
    /// Report every root in range
    #[arg(long)]
    all: bool,
    #[arg(long)]
    count: Option<String>,
    /// Weighted Dirichlet operator -n^{-1} div A grad
    #[arg(long)]
    weighted: bool,
    /// disk or fem
    #[arg(long)]
    backend: Option<String>,
    /// Swept parameter: a, n or eta
    #[arg(long)]
    sweep: Option<String>,
    /// Comma-separated swept values
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
    /// to_zero or to_inf
    #[arg(long)]
    mode: Option<String>,
    /// + or -
    #[arg(long, allow_hyphen_values = true)]
    sign: Option<String>,
    #[arg(long)]
    p_max: Option<String>,
    #[arg(long)]
    reference: Option<String>,
    #[arg(long)]
    candidates: Option<String>,
    #[arg(long)]
    eoc_digits: Option<String>,
    /// Mesh file to inspect
    #[arg(long)]
    input: Option<String>,
    /// File for the numerical output
    #[arg(long)]
    output: Option<String>,
    /// File for the sampled d_m or f curve
    #[arg(long)]
    curve: Option<String>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Record per-row wall-clock times
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    threads: Option<String>,
}

impl Knobs {
    fn flag_pairs(&self) -> Vec<(&'static str, String)> {
        let mut v: Vec<(&'static str, String)> = Vec::new();
        let strings: [(&'static str, &Option<String>); 36] = [
            ("domain", &self.domain),
            ("refine", &self.refine),
            ("scan_refine", &self.scan_refine),
            ("a", &self.a),
            ("a11", &self.a11),
            ("a12", &self.a12),
            ("a22", &self.a22),
            ("n", &self.n),
            ("eta", &self.eta),
            ("m", &self.m),
            ("m_max", &self.m_max),
            ("k_min", &self.k_min),
            ("k_max", &self.k_max),
            ("grid_step", &self.grid_step),
            ("tol", &self.tol),
            ("scan_step", &self.scan_step),
            ("bisect_tol", &self.bisect_tol),
            ("eig_tol", &self.eig_tol),
            ("eig_max_iter", &self.eig_max_iter),
            ("weight", &self.weight),
            ("count", &self.count),
            ("backend", &self.backend),
            ("sweep", &self.sweep),
            ("values", &self.values),
            ("mode", &self.mode),
            ("sign", &self.sign),
            ("p_max", &self.p_max),
            ("reference", &self.reference),
            ("candidates", &self.candidates),
            ("eoc_digits", &self.eoc_digits),
            ("input", &self.input),
            ("output", &self.output),
            ("curve", &self.curve),
            ("format", &self.format),
            ("threads", &self.threads),
            ("command", &None),
        ];
        for (k, val) in strings {
            if let Some(x) = val {
                v.push((k, x.clone()));
            }
        }
        for (k, on) in [
            ("allow_zero_eta", self.allow_zero_eta),
            ("all", self.all),
            ("weighted", self.weighted),
            ("timing", self.timing),
        ] {
            if on {
                v.push((k, "true".into()));
            }
        }
        v
    }
}

/// Merge config file, `--set` pairs, flags and the environment (in
/// increasing precedence) into a resolved config.
fn resolve(command: Command, knobs: &Knobs) -> TevResultOf<RunConfig> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    if let Some(path) = &knobs.config {
        let text = std::fs::read_to_string(path).map_err(|e| TevError::Config(format!("{}: {e}", path.display())))?;
        map.extend(parse_text(&text)?);
    }
    for kv in &knobs.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| TevError::Config(format!("--set expects key=value, got {kv:?}")))?;
        map.insert(normalize_key(k), v.trim().to_string());
    }
    for (k, v) in knobs.flag_pairs() {
        map.insert(k.to_string(), v);
    }
    map.insert("command".into(), command.name().into());
    if let Ok(t) = std::env::var(THREADS_ENV) {
        map.insert("threads".into(), t);
    }
    RunConfig::from_map(&map)
}

/// Parse `argv` (including the program name), run, and return the exit
/// code. Summaries go to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let (command, knobs) = match &cli.cmd {
        Cmd::Disk(k) => (Command::Disk, k),
        Cmd::Fem(k) => (Command::Fem, k),
        Cmd::Dirichlet(k) => (Command::Dirichlet, k),
        Cmd::Sweep(k) => (Command::Sweep, k),
        Cmd::Eoc(k) => (Command::Eoc, k),
        Cmd::Mesh(k) => (Command::Mesh, k),
    };
    let result = resolve(command, knobs).and_then(|cfg| {
        if knobs.print_config {
            write!(out, "{}", cfg.to_text()).map_err(|e| TevError::io("<stdout>", e))?;
            Ok(true)
        } else {
            dispatch(&cfg, out)
        }
    });
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "tev {}: {e}", command.name());
            e.exit_code()
        }
    }
}

/// [`run`] on the process arguments and standard streams.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn say(out: &mut dyn Write, line: impl AsRef<str>) -> TevResultOf<()> {
    writeln!(out, "{}", line.as_ref()).map_err(|e| TevError::io("<stdout>", e))
}

/// Run the configured command; `Ok(false)` when some rows failed.
pub fn dispatch(cfg: &RunConfig, out: &mut dyn Write) -> TevResultOf<bool> {
    match cfg.command {
        Command::Disk => cmd_disk(cfg, out),
        Command::Fem => cmd_fem(cfg, out),
        Command::Dirichlet => cmd_dirichlet(cfg, out),
        Command::Sweep => cmd_sweep(cfg, out),
        Command::Eoc => cmd_eoc(cfg, out),
        Command::Mesh => cmd_mesh(cfg, out),
    }
}

fn emit_table(cfg: &RunConfig, table: &SweepTable) -> TevResultOf<()> {
    if let Some(path) = &cfg.output {
        table.emit(cfg.format, io::create(path)?)?;
    }
    Ok(())
}

fn result_row(cfg: &RunConfig, r: &TevResult, backend: String, refinement: u32) -> TevResultOf<SweepRow> {
    Ok(SweepRow {
        a: cfg.a_matrix.as_scalar().unwrap_or(f64::NAN),
        n: cfg.n,
        eta: cfg.eta,
        domain: cfg.domain.to_string(),
        refinement,
        k1: Some(r.k),
        eoc: None,
        backend,
        residual: Some(r.residual),
        runtime_ms: None,
        error: None,
    })
}

fn cmd_disk(cfg: &RunConfig, out: &mut dyn Write) -> TevResultOf<bool> {
    let params = cfg.material()?;
    let search = cfg.disk_search();
    let roots = if cfg.all {
        disk::tev_spectrum(&params, cfg.m_max, &search)?
    } else {
        vec![disk::first_root(cfg.m, &params, &search)?]
    };
    let mut table = SweepTable::new();
    if cfg.all {
        say(
            out,
            format!(
                "{} roots of d_0..d_{} in [{:.4}, {}]",
                roots.len(),
                cfg.m_max,
                search.floor(&params)?,
                cfg.k_max
            ),
        )?;
        for r in &roots {
            let m = match r.backend {
                tev_core::Backend::Analytic { m } => m,
                tev_core::Backend::Fem => 0,
            };
            say(out, format!("  m = {m:2}  k = {:.6}  |d_m| = {:.2e}", r.k, r.residual))?;
        }
    } else {
        let r = &roots[0];
        say(
            out,
            format!("first root of d_{}: k = {:.4} ({:.12}, |d| = {:.2e})", cfg.m, r.k, r.k, r.residual),
        )?;
        table.insert(result_row(cfg, r, format!("analytic(m={})", cfg.m), 0)?);
    }
    emit_table(cfg, &table)?;
    if let Some(path) = &cfg.curve {
        let curve = DetCurve::sample(cfg.m, &params, search.floor(&params)?, cfg.k_max, cfg.grid_step)?;
        io::write_det_curve(io::create(path)?, &curve)?;
    }
    Ok(true)
}

fn cmd_fem(cfg: &RunConfig, out: &mut dyn Write) -> TevResultOf<bool> {
    let params = cfg.material()?;
    let settings = cfg.fem_settings();
    let mut table = SweepTable::new();
    if cfg.all {
        let mesh = settings.fine_mesh()?;
        let solver = FemSolver::from_mesh(&mesh, &params, cfg.allow_zero_eta, settings.opts)?;
        let roots = solver.find_tevs_in_range(cfg.k_min, cfg.k_max, cfg.count)?;
        say(
            out,
            format!(
                "{} roots of f on {} (level {}, {} interior nodes):",
                roots.len(),
                cfg.domain,
                cfg.refine,
                mesh.interior_nodes().len()
            ),
        )?;
        for r in &roots {
            say(out, format!("  k = {:.6}  {:?}  |f| = {:.2e}", r.k, r.kind, r.residual))?;
        }
    } else {
        let (coarse, extra) = settings.coarse_mesh()?;
        let ladder =
            tev_core::tev_fem::multilevel_first_tev(&coarse, &params, cfg.allow_zero_eta, extra, cfg.k_min, cfg.k_max, settings.opts)?;
        for r in &ladder {
            let level = match r.meta {
                tev_core::TevMeta::Refinement(l) => l,
                tev_core::TevMeta::GridStep(_) => 0,
            };
            say(out, format!("  level {level}: k = {:.6}", r.k))?;
        }
        let last = ladder.last().expect("ladder has the coarse level");
        say(
            out,
            format!(
                "first TEV on {} (level {}): k1 = {:.4} ({:.8})",
                cfg.domain, cfg.refine, last.k, last.k
            ),
        )?;
        table.insert(result_row(cfg, last, "fem".into(), cfg.refine)?);
    }
    emit_table(cfg, &table)?;
    if let Some(path) = &cfg.curve {
        let (coarse, _) = settings.coarse_mesh()?;
        let solver = FemSolver::from_mesh(&coarse, &params, cfg.allow_zero_eta, settings.opts)?;
        let scan = solver.scan(&solver.scan_grid(cfg.k_min, cfg.k_max)?)?;
        io::write_scan(io::create(path)?, &scan)?;
    }
    Ok(true)
}

fn cmd_dirichlet(cfg: &RunConfig, out: &mut dyn Write) -> TevResultOf<bool> {
    let mesh = match &cfg.input {
        Some(p) => io::load_mesh(p)?,
        None => generate(&DomainSpec::new(cfg.domain.clone(), cfg.refine))?,
    };
    let forms = assemble(&mesh, &cfg.material()?);
    let vals = dirichlet_eigs(&forms, cfg.weighted, cfg.count)?;
    let what = if cfg.weighted { "-n^{-1} div A grad" } else { "-Laplace" };
    say(
        out,
        format!(
            "Dirichlet eigenvalues of {what} on {} (level {}, {} interior nodes):",
            cfg.domain,
            cfg.refine,
            forms.num_interior()
        ),
    )?;
    for (j, l) in vals.iter().enumerate() {
        say(out, format!("  lambda_{} = {:.4} (sqrt = {:.4})", j + 1, l, l.sqrt()))?;
    }
    if let Some(path) = &cfg.output {
        let idx: Vec<f64> = (1..=vals.len()).map(|j| j as f64).collect();
        io::write_pairs_csv(io::create(path)?, ["j", "lambda"], &idx, &vals)?;
    }
    Ok(true)
}

fn cmd_sweep(cfg: &RunConfig, out: &mut dyn Write) -> TevResultOf<bool> {
    let outcome = run_monotonicity_sweep(&cfg.sweep_config()?)?;
    say(out, format!("sweep over {:?} ({}):", cfg.sweep, outcome.regime))?;
    let mut ok = true;
    for r in outcome.table.rows() {
        match (r.k1, &r.error) {
            (Some(k), _) => say(out, format!("  a = {:<6} n = {:<6} eta = {:<8} k1 = {:.4}", r.a, r.n, r.eta, k))?,
            (None, e) => {
                ok = false;
                say(
                    out,
                    format!(
                        "  a = {:<6} n = {:<6} eta = {:<8} failed: {}",
                        r.a,
                        r.n,
                        r.eta,
                        e.as_deref().unwrap_or("")
                    ),
                )?
            }
        }
    }
    let show = |m: Option<tev_core::limits::Monotonicity>| m.map_or("undetermined", |m| m.as_str());
    say(
        out,
        format!("verdict: {} (expected {})", show(outcome.verdict), show(outcome.expected)),
    )?;
    emit_table(cfg, &outcome.table)?;
    Ok(ok)
}

fn cmd_eoc(cfg: &RunConfig, out: &mut dyn Write) -> TevResultOf<bool> {
    let study = run_eta_limit_study(&cfg.eta_study_config()?)?;
    let mode = if cfg.mode == LimitMode::ToZero { "eta -> 0" } else { "eta -> inf" };
    say(
        out,
        format!(
            "{mode}, a = {}, n = {}, sign {}",
            study.config.a,
            study.config.n,
            if cfg.sign < 0.0 { '-' } else { '+' }
        ),
    )?;
    let mut ok = true;
    for r in &study.rows {
        let eoc = r.eoc.map_or("N/A".to_string(), |e| format!("{e:.4}"));
        match r.k {
            Some(k) => say(
                out,
                format!("  eta = {:<12} k = {:.4}  EOC = {eoc}  (branch {})", r.eta, k, r.branch),
            )?,
            None => {
                ok = false;
                say(out, format!("  eta = {:<12} failed: {}", r.eta, r.error.as_deref().unwrap_or("")))?
            }
        }
    }
    for (i, b) in study.branches.iter().enumerate() {
        say(
            out,
            format!(
                "  branch {i}: rows {}..{}, limit {}",
                b.start,
                b.end,
                b.reference.map_or("unknown".into(), |r| format!("{r:.4}"))
            ),
        )?;
    }
    if let Some(id) = &study.identification {
        let fam = match id.nearest.family {
            tev_core::limits::Family::Laplacian => "sqrt(lambda_j)",
            tev_core::limits::Family::Weighted => "sqrt(lambda_j a/n)",
        };
        say(
            out,
            format!(
                "nearest limit: {} = {:.4} with j = {}, distance {:.2e}{}",
                fam,
                id.nearest.value,
                id.nearest.j,
                id.distance,
                if id.ambiguous { " (ambiguous)" } else { "" }
            ),
        )?;
    }
    if let (Some(l1), BackendChoice::Fem(_)) = (study.dirichlet.first(), &study.config.backend) {
        say(out, format!("discrete lambda_1 = {l1:.4} (sqrt = {:.4})", l1.sqrt()))?;
    }
    emit_table(cfg, &study.to_table())?;
    Ok(ok)
}

fn cmd_mesh(cfg: &RunConfig, out: &mut dyn Write) -> TevResultOf<bool> {
    let mesh = match &cfg.input {
        Some(p) => io::load_mesh(p)?,
        None => generate(&DomainSpec::new(cfg.domain.clone(), cfg.refine))?,
    };
    say(
        out,
        format!(
            "vertices {}  triangles {}  boundary edges {}  interior nodes {}",
            mesh.num_vertices(),
            mesh.triangles().len(),
            mesh.boundary_edges().len(),
            mesh.interior_nodes().len()
        ),
    )?;
    say(
        out,
        format!(
            "area {:.12}  perimeter {:.12}  h {:.6}",
            mesh.area(),
            mesh.perimeter(),
            mesh.max_edge_length()
        ),
    )?;
    if let Some(path) = &cfg.output {
        io::save_mesh(&mesh, path)?;
    }
    Ok(true)
}
