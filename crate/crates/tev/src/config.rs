//! Run configuration: a flat `key = value` map shared by config files and
//! command line flags, resolved into typed knobs with documented defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use tev_core::disk::DiskSearch;
use tev_core::eig::EigOptions;
use tev_core::limits::EocRule;
use tev_core::tev_fem::{FemOptions, Weight};
use tev_core::{DomainKind, MaterialParams, SymMat2};

use crate::error::{TevError, TevResultOf};
use crate::experiments::{BackendChoice, EtaStudyConfig, FemSettings, Format, LimitMode, SweepConfig, SweptParam};

/// Subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Disk,
    Fem,
    Dirichlet,
    Sweep,
    Eoc,
    Mesh,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Disk => "disk",
            Command::Fem => "fem",
            Command::Dirichlet => "dirichlet",
            Command::Sweep => "sweep",
            Command::Eoc => "eoc",
            Command::Mesh => "mesh",
        }
    }

    fn parse(s: &str) -> TevResultOf<Self> {
        [
            Command::Disk,
            Command::Fem,
            Command::Dirichlet,
            Command::Sweep,
            Command::Eoc,
            Command::Mesh,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| TevError::Config(format!("unknown command {s:?}")))
    }
}

/// Solver backend for `sweep` and `eoc`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Disk,
    Fem,
}

/// Every knob of every subcommand, fully resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub domain: DomainKind,
    /// Finest mesh level.
    pub refine: u32,
    /// Level of the full FEM sign scan.
    pub scan_refine: u32,
    pub a_matrix: SymMat2,
    pub n: f64,
    pub eta: f64,
    pub allow_zero_eta: bool,
    /// Bessel mode for `disk`.
    pub m: u32,
    /// Largest mode for the `disk` spectrum (`all = true`).
    pub m_max: u32,
    pub k_min: Option<f64>,
    pub k_max: f64,
    pub grid_step: f64,
    pub tol: f64,
    pub scan_step: f64,
    pub bisect_tol: f64,
    pub eig_tol: f64,
    pub eig_max_iter: usize,
    pub weight: Weight,
    /// Report every root in range rather than the first.
    pub all: bool,
    /// Number of eigenvalues or roots to report.
    pub count: usize,
    pub weighted: bool,
    pub backend: BackendKind,
    pub sweep: SweptParam,
    pub values: Vec<f64>,
    pub mode: LimitMode,
    pub sign: f64,
    pub p_max: u32,
    pub reference: Option<f64>,
    pub candidates: usize,
    pub eoc_digits: Option<u32>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub curve: Option<PathBuf>,
    pub format: Format,
    pub timing: bool,
    pub threads: usize,
}

/// Recognized keys in canonical order.
pub const KEYS: &[&str] = &[
    "command",
    "domain",
    "refine",
    "scan_refine",
    "a",
    "a11",
    "a12",
    "a22",
    "n",
    "eta",
    "allow_zero_eta",
    "m",
    "m_max",
    "k_min",
    "k_max",
    "grid_step",
    "tol",
    "scan_step",
    "bisect_tol",
    "eig_tol",
    "eig_max_iter",
    "weight",
    "all",
    "count",
    "weighted",
    "backend",
    "sweep",
    "values",
    "mode",
    "sign",
    "p_max",
    "reference",
    "candidates",
    "eoc_digits",
    "input",
    "output",
    "curve",
    "format",
    "timing",
    "threads",
];

/// Parse `key = value` lines; `#` starts a comment line, blank lines are
/// skipped, later keys win.
pub fn parse_text(text: &str) -> TevResultOf<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| TevError::Config(format!("line {}: expected key = value, got {line:?}", i + 1)))?;
        map.insert(normalize_key(k), v.trim().to_string());
    }
    Ok(map)
}

/// Flags use dashes, files use underscores.
pub fn normalize_key(k: &str) -> String {
    k.trim().to_ascii_lowercase().replace('-', "_")
}

struct Reader<'a> {
    map: &'a BTreeMap<String, String>,
}

impl Reader<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str).filter(|v| !v.is_empty() && *v != "none")
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> TevResultOf<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| TevError::Config(format!("{key} = {v:?} is not a valid value"))),
        }
    }

    fn float(&self, key: &str) -> TevResultOf<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => parse_float(v)
                .map(Some)
                .ok_or_else(|| TevError::Config(format!("{key} = {v:?} is not a number"))),
        }
    }

    fn flag(&self, key: &str) -> TevResultOf<Option<bool>> {
        match self.raw(key) {
            None => Ok(None),
            Some("true" | "yes" | "1" | "on") => Ok(Some(true)),
            Some("false" | "no" | "0" | "off") => Ok(Some(false)),
            Some(v) => Err(TevError::Config(format!("{key} = {v:?} is not a boolean"))),
        }
    }
}

/// Decimal or `p/q` fraction, optionally signed.
pub fn parse_float(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let (p, q): (f64, f64) = (p.trim().parse().ok()?, q.trim().parse().ok()?);
        return Some(p / q);
    }
    s.parse().ok()
}

fn default_k_max(domain: &DomainKind) -> f64 {
    match domain {
        DomainKind::UnitDisk => 10.0,
        DomainKind::UnitSquare => 25.0,
        DomainKind::LShape => 16.0,
        DomainKind::ExternalMesh(_) => 25.0,
    }
}

impl RunConfig {
    /// Resolve a key map; unknown keys and ill-typed values are errors.
    pub fn from_map(map: &BTreeMap<String, String>) -> TevResultOf<RunConfig> {
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(TevError::Config(format!("unknown key {k:?}")));
        }
        let r = Reader { map };
        let command = Command::parse(r.raw("command").ok_or_else(|| TevError::Config("missing command".into()))?)?;
        let domain: DomainKind = match r.raw("domain") {
            Some(d) => d.parse()?,
            None if matches!(command, Command::Disk | Command::Eoc) => DomainKind::UnitDisk,
            None => DomainKind::UnitSquare,
        };
        let refine = r.parse("refine")?.unwrap_or(match command {
            Command::Dirichlet | Command::Mesh => 4,
            _ => 5,
        });
        let scan_refine = r.parse("scan_refine")?.unwrap_or(3);
        let a_matrix = match (r.float("a")?, r.float("a11")?, r.float("a12")?, r.float("a22")?) {
            (Some(_), Some(_), _, _) | (Some(_), _, Some(_), _) | (Some(_), _, _, Some(_)) => {
                return Err(TevError::Config("give either a or a11/a12/a22, not both".into()))
            }
            (Some(a), None, None, None) => SymMat2::scalar(a),
            (None, None, None, None) => SymMat2::scalar(0.4),
            (None, xx, xy, yy) => SymMat2::new(xx.unwrap_or(1.0), xy.unwrap_or(0.0), yy.unwrap_or(1.0)),
        };
        let backend = match r.raw("backend") {
            Some("disk" | "analytic") => BackendKind::Disk,
            Some("fem") => BackendKind::Fem,
            Some(v) => return Err(TevError::Config(format!("backend = {v:?} is not disk or fem"))),
            None if domain == DomainKind::UnitDisk => BackendKind::Disk,
            None => BackendKind::Fem,
        };
        let weight = match r.raw("weight") {
            None | Some("mass") => Weight::Mass,
            Some("h1") => Weight::H1,
            Some(v) => return Err(TevError::Config(format!("weight = {v:?} is not mass or h1"))),
        };
        let values = match r.raw("values") {
            None => Vec::new(),
            Some(v) => v
                .split(',')
                .map(|x| parse_float(x).ok_or_else(|| TevError::Config(format!("values: {x:?} is not a number"))))
                .collect::<TevResultOf<_>>()?,
        };
        let sign = match r.raw("sign") {
            None | Some("+" | "+1" | "1" | "pos" | "positive") => 1.0,
            Some("-" | "-1" | "neg" | "negative") => -1.0,
            Some(v) => return Err(TevError::Config(format!("sign = {v:?} is not + or -"))),
        };
        let eoc_digits = match r.raw("eoc_digits") {
            None => Some(4),
            Some("exact") => None,
            Some(v) => Some(
                v.parse()
                    .map_err(|_| TevError::Config(format!("eoc_digits = {v:?} is not an integer or exact")))?,
            ),
        };
        let cfg = RunConfig {
            command,
            k_max: r.float("k_max")?.unwrap_or_else(|| default_k_max(&domain)),
            domain,
            refine,
            scan_refine,
            a_matrix,
            n: r.float("n")?.unwrap_or(3.0),
            eta: r.float("eta")?.unwrap_or(1.0),
            allow_zero_eta: r.flag("allow_zero_eta")?.unwrap_or(false),
            m: r.parse("m")?.unwrap_or(0),
            m_max: r.parse("m_max")?.unwrap_or(10),
            k_min: r.float("k_min")?,
            grid_step: r.float("grid_step")?.unwrap_or(0.01),
            tol: r.float("tol")?.unwrap_or(1e-12),
            scan_step: r.float("scan_step")?.unwrap_or(0.05),
            bisect_tol: r.float("bisect_tol")?.unwrap_or(1e-6),
            eig_tol: r.float("eig_tol")?.unwrap_or(EigOptions::default().tol),
            eig_max_iter: r.parse("eig_max_iter")?.unwrap_or(EigOptions::default().max_iter),
            weight,
            all: r.flag("all")?.unwrap_or(false),
            count: r.parse("count")?.unwrap_or(1),
            weighted: r.flag("weighted")?.unwrap_or(false),
            backend,
            sweep: r.parse::<String>("sweep")?.map_or(Ok(SweptParam::A), |s| s.parse())?,
            values,
            mode: r.parse::<String>("mode")?.map_or(Ok(LimitMode::ToZero), |s| s.parse())?,
            sign,
            p_max: r.parse("p_max")?.unwrap_or(9),
            reference: r.float("reference")?,
            candidates: r.parse("candidates")?.unwrap_or(6),
            eoc_digits,
            input: r.raw("input").map(PathBuf::from),
            output: r.raw("output").map(PathBuf::from),
            curve: r.raw("curve").map(PathBuf::from),
            format: r.parse::<String>("format")?.map_or(Ok(Format::Csv), |s| s.parse())?,
            timing: r.flag("timing")?.unwrap_or(false),
            threads: r.parse("threads")?.unwrap_or(1),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> TevResultOf<()> {
        let positive = [
            ("k_max", self.k_max),
            ("grid_step", self.grid_step),
            ("tol", self.tol),
            ("scan_step", self.scan_step),
            ("bisect_tol", self.bisect_tol),
            ("eig_tol", self.eig_tol),
        ];
        if let Some((k, v)) = positive.iter().find(|(_, v)| !(*v > 0.0) || !v.is_finite()) {
            return Err(TevError::Config(format!("{k} = {v} must be positive")));
        }
        if self.count == 0 || self.threads == 0 {
            return Err(TevError::Config("count and threads must be at least 1".into()));
        }
        self.material()?;
        Ok(())
    }

    /// `(A, n, eta)` as configured.
    pub fn material(&self) -> TevResultOf<MaterialParams> {
        Ok(MaterialParams::new(self.a_matrix, self.n, self.eta)?)
    }

    /// Scalar `a` for backends and sweeps that need `A = aI`.
    pub fn scalar_a(&self) -> TevResultOf<f64> {
        self.a_matrix
            .as_scalar()
            .ok_or_else(|| TevError::Config("this command needs A = aI; use key a".into()))
    }

    pub fn disk_search(&self) -> DiskSearch {
        DiskSearch {
            k_floor: self.k_min,
            k_max: self.k_max,
            grid_step: self.grid_step,
            tol: self.tol,
            allow_zero_eta: self.allow_zero_eta,
        }
    }

    pub fn fem_options(&self) -> FemOptions {
        FemOptions {
            weight: self.weight,
            eig: EigOptions {
                tol: self.eig_tol,
                max_iter: self.eig_max_iter,
                ..EigOptions::default()
            },
            scan_step: self.scan_step,
            bisect_tol: self.bisect_tol,
            ..FemOptions::default()
        }
    }

    pub fn fem_settings(&self) -> FemSettings {
        FemSettings {
            domain: self.domain.clone(),
            refine: self.refine,
            scan_refine: self.scan_refine,
            k_lo: self.k_min,
            k_max: self.k_max,
            opts: self.fem_options(),
        }
    }

    pub fn backend_choice(&self) -> TevResultOf<BackendChoice> {
        match self.backend {
            BackendKind::Disk => {
                if self.domain != DomainKind::UnitDisk {
                    return Err(TevError::Config(format!("backend = disk needs domain = disk, got {}", self.domain)));
                }
                Ok(BackendChoice::Disk {
                    m: self.m,
                    search: self.disk_search(),
                })
            }
            BackendKind::Fem => Ok(BackendChoice::Fem(self.fem_settings())),
        }
    }

    pub fn sweep_config(&self) -> TevResultOf<SweepConfig> {
        if self.values.is_empty() {
            return Err(TevError::Config("sweep needs values = v1,v2,...".into()));
        }
        Ok(SweepConfig {
            a: self.scalar_a()?,
            n: self.n,
            eta: self.eta,
            swept: self.sweep,
            values: self.values.clone(),
            backend: self.backend_choice()?,
            threads: self.threads,
            timing: self.timing,
        })
    }

    pub fn eta_study_config(&self) -> TevResultOf<EtaStudyConfig> {
        let mut c = EtaStudyConfig::new(self.scalar_a()?, self.n, self.sign, self.mode, self.backend_choice()?);
        c.p_max = self.p_max;
        c.reference = self.reference;
        c.candidates = self.candidates;
        c.eoc = EocRule {
            digits: self.eoc_digits,
            floor: 5.0 * self.tol.max(self.bisect_tol_if_fem()),
        };
        c.threads = self.threads;
        c.timing = self.timing;
        Ok(c)
    }

    fn bisect_tol_if_fem(&self) -> f64 {
        if self.backend == BackendKind::Fem {
            self.bisect_tol
        } else {
            0.0
        }
    }

    /// Canonical `key = value` text; parsing it yields an equal config.
    pub fn to_text(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("none".to_string(), fmt_f);
        let path = |p: &Option<PathBuf>| p.as_ref().map_or("none".to_string(), |p| p.display().to_string());
        let b = |v: bool| v.to_string();
        let mut pairs: Vec<(&str, String)> = vec![
            ("command", self.command.name().into()),
            ("domain", self.domain.to_string()),
            ("refine", self.refine.to_string()),
            ("scan_refine", self.scan_refine.to_string()),
        ];
        match self.a_matrix.as_scalar() {
            Some(a) => pairs.push(("a", fmt_f(a))),
            None => {
                pairs.push(("a11", fmt_f(self.a_matrix.xx)));
                pairs.push(("a12", fmt_f(self.a_matrix.xy)));
                pairs.push(("a22", fmt_f(self.a_matrix.yy)));
            }
        }
        pairs.extend([
            ("n", fmt_f(self.n)),
            ("eta", fmt_f(self.eta)),
            ("allow_zero_eta", b(self.allow_zero_eta)),
            ("m", self.m.to_string()),
            ("m_max", self.m_max.to_string()),
            ("k_min", opt(self.k_min)),
            ("k_max", fmt_f(self.k_max)),
            ("grid_step", fmt_f(self.grid_step)),
            ("tol", fmt_f(self.tol)),
            ("scan_step", fmt_f(self.scan_step)),
            ("bisect_tol", fmt_f(self.bisect_tol)),
            ("eig_tol", fmt_f(self.eig_tol)),
            ("eig_max_iter", self.eig_max_iter.to_string()),
            ("weight", if self.weight == Weight::Mass { "mass" } else { "h1" }.into()),
            ("all", b(self.all)),
            ("count", self.count.to_string()),
            ("weighted", b(self.weighted)),
            ("backend", if self.backend == BackendKind::Disk { "disk" } else { "fem" }.into()),
            (
                "sweep",
                match self.sweep {
                    SweptParam::A => "a",
                    SweptParam::N => "n",
                    SweptParam::Eta => "eta",
                }
                .into(),
            ),
            ("values", self.values.iter().map(|v| fmt_f(*v)).collect::<Vec<_>>().join(",")),
            ("mode", if self.mode == LimitMode::ToZero { "to_zero" } else { "to_inf" }.into()),
            ("sign", if self.sign < 0.0 { "-" } else { "+" }.into()),
            ("p_max", self.p_max.to_string()),
            ("reference", opt(self.reference)),
            ("candidates", self.candidates.to_string()),
            ("eoc_digits", self.eoc_digits.map_or("exact".to_string(), |d| d.to_string())),
            ("input", path(&self.input)),
            ("output", path(&self.output)),
            ("curve", path(&self.curve)),
            ("format", if self.format == Format::Csv { "csv" } else { "json" }.into()),
            ("timing", b(self.timing)),
            ("threads", self.threads.to_string()),
        ]);
        let mut s = String::new();
        for (k, v) in pairs {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:?}")
}
