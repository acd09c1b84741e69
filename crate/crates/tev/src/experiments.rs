//! Parameter sweeps and conductivity-limit studies over either backend,
//! collected into keyed tables that serialize to CSV or JSON.

use std::cmp::Ordering;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use tev_core::assembly::assemble;
use tev_core::disk::{self, DiskSearch};
use tev_core::eig::dirichlet_eigs;
use tev_core::limits::{self, Candidate, EocRule, Identification, Monotonicity};
use tev_core::mesh::{generate, Mesh};
use tev_core::params::{classify, classify_with_override};
use tev_core::tev_fem::{multilevel_first_tev, FemOptions};
use tev_core::{DomainKind, DomainSpec, MaterialParams, Regime, SymMat2, TevResult};

use crate::error::{TevError, TevResultOf};
use crate::io::load_mesh;

/// Settings for the finite element backend.
#[derive(Debug, Clone, PartialEq)]
pub struct FemSettings {
    pub domain: DomainKind,
    /// Finest refinement level.
    pub refine: u32,
    /// Level of the full sign scan; finer levels track the root.
    pub scan_refine: u32,
    /// Scan start; `None` uses the Faber-Krahn floor.
    pub k_lo: Option<f64>,
    pub k_max: f64,
    pub opts: FemOptions,
}

impl FemSettings {
    /// Coarse mesh and the number of refinements above it.
    pub fn coarse_mesh(&self) -> TevResultOf<(Mesh, u32)> {
        match &self.domain {
            DomainKind::ExternalMesh(path) => Ok((load_mesh(path.as_ref())?, self.refine)),
            kind => {
                let coarse = self.scan_refine.min(self.refine);
                Ok((generate(&DomainSpec::new(kind.clone(), coarse))?, self.refine - coarse))
            }
        }
    }

    /// Finest mesh of the ladder.
    pub fn fine_mesh(&self) -> TevResultOf<Mesh> {
        let (mut mesh, extra) = self.coarse_mesh()?;
        for _ in 0..extra {
            mesh = mesh.refine();
        }
        Ok(mesh)
    }

    /// First eigenvalue on the finest level.
    pub fn first_tev(&self, params: &MaterialParams, allow_zero_eta: bool) -> TevResultOf<TevResult> {
        let (coarse, extra) = self.coarse_mesh()?;
        let ladder = multilevel_first_tev(&coarse, params, allow_zero_eta, extra, self.k_lo, self.k_max, self.opts)?;
        Ok(ladder.into_iter().last().expect("ladder has the coarse level"))
    }
}

/// Which solver computes `k_1`.
#[derive(Debug, Clone, PartialEq)]
pub enum BackendChoice {
    /// First root of `d_m` on the unit disk.
    Disk {
        m: u32,
        search: DiskSearch,
    },
    Fem(FemSettings),
}

impl BackendChoice {
    pub fn first_tev(&self, params: &MaterialParams, allow_zero_eta: bool) -> TevResultOf<TevResult> {
        match self {
            BackendChoice::Disk { m, search } => {
                let search = DiskSearch { allow_zero_eta, ..*search };
                Ok(disk::first_root(*m, params, &search)?)
            }
            BackendChoice::Fem(s) => s.first_tev(params, allow_zero_eta),
        }
    }

    fn domain_name(&self) -> String {
        match self {
            BackendChoice::Disk { .. } => "disk".to_string(),
            BackendChoice::Fem(s) => s.domain.to_string(),
        }
    }

    fn refinement(&self) -> u32 {
        match self {
            BackendChoice::Disk { .. } => 0,
            BackendChoice::Fem(s) => s.refine,
        }
    }

    fn label(&self) -> String {
        match self {
            BackendChoice::Disk { m, .. } => format!("analytic(m={m})"),
            BackendChoice::Fem(_) => "fem".to_string(),
        }
    }

    /// First Dirichlet eigenvalues of `-Δ` on the backend's domain: exact
    /// Bessel zeros on the disk, the finest mesh otherwise.
    pub fn dirichlet_eigenvalues(&self, count: usize) -> TevResultOf<Vec<f64>> {
        match self {
            BackendChoice::Disk { .. } => Ok(disk::dirichlet_eigenvalues(count)?),
            BackendChoice::Fem(s) => {
                let params = MaterialParams::isotropic(1.0, 1.0, 0.0)?;
                let forms = assemble(&s.fine_mesh()?, &params);
                Ok(dirichlet_eigs(&forms, false, count)?)
            }
        }
    }
}

/// One table row. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a: f64,
    pub n: f64,
    pub eta: f64,
    pub domain: String,
    pub refinement: u32,
    pub k1: Option<f64>,
    pub eoc: Option<f64>,
    pub backend: String,
    pub residual: Option<f64>,
    pub runtime_ms: Option<u64>,
    pub error: Option<String>,
}

impl SweepRow {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.a
            .total_cmp(&other.a)
            .then(self.n.total_cmp(&other.n))
            .then(self.eta.total_cmp(&other.eta))
            .then_with(|| self.domain.cmp(&other.domain))
            .then(self.refinement.cmp(&other.refinement))
    }

    fn same_key(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

/// Rows keyed by `(a, n, eta, domain, refinement)`, kept sorted and
/// unique.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepTable {
    rows: Vec<SweepRow>,
}

/// CSV column names.
pub const CSV_HEADER: [&str; 11] = [
    "a",
    "n",
    "eta",
    "domain",
    "refinement",
    "k1",
    "eoc",
    "backend",
    "residual",
    "runtime_ms",
    "error",
];

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = TevError;

    fn from_str(s: &str) -> TevResultOf<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(TevError::Config(format!("unknown output format {other:?}"))),
        }
    }
}

impl SweepTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert or replace the row with the same key.
    pub fn insert(&mut self, row: SweepRow) {
        match self.rows.binary_search_by(|r| r.key_cmp(&row)) {
            Ok(i) => self.rows[i] = row,
            Err(i) => self.rows.insert(i, row),
        }
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Serialize in `format`.
    pub fn emit<W: Write>(&self, format: Format, out: W) -> TevResultOf<()> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
                w.write_record(CSV_HEADER)?;
                for r in &self.rows {
                    w.serialize(r)?;
                }
                w.flush().map_err(|e| TevError::io("<csv>", e))?;
            }
            Format::Json => {
                let mut out = out;
                serde_json::to_writer_pretty(&mut out, &self.rows)?;
                writeln!(out).map_err(|e| TevError::io("<json>", e))?;
            }
        }
        Ok(())
    }

    /// Parse a table written by [`SweepTable::emit`].
    pub fn parse(format: Format, text: &str) -> TevResultOf<Self> {
        let rows: Vec<SweepRow> = match format {
            Format::Csv => {
                let mut r = csv::Reader::from_reader(text.as_bytes());
                r.deserialize().collect::<Result<_, _>>()?
            }
            Format::Json => serde_json::from_str(text)?,
        };
        let mut t = SweepTable::new();
        for row in rows {
            t.insert(row);
        }
        Ok(t)
    }

    fn has_duplicates(&self) -> bool {
        self.rows.windows(2).any(|w| w[0].same_key(&w[1]))
    }
}

/// Material coefficient varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParam {
    A,
    N,
    Eta,
}

impl std::str::FromStr for SweptParam {
    type Err = TevError;

    fn from_str(s: &str) -> TevResultOf<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(SweptParam::A),
            "n" => Ok(SweptParam::N),
            "eta" => Ok(SweptParam::Eta),
            other => Err(TevError::Config(format!("unknown swept parameter {other:?}"))),
        }
    }
}

/// Direction in which `k_1` moves as the swept coefficient grows, per the
/// monotonicity theorems.
pub fn expected_trend(regime: Regime, swept: SweptParam) -> Option<Monotonicity> {
    use Monotonicity::{Ascending, Descending};
    match (regime, swept) {
        (Regime::CaseI, SweptParam::A) => Some(Descending),
        (Regime::CaseI, _) => Some(Ascending),
        (Regime::CaseII, SweptParam::A) => Some(Ascending),
        (Regime::CaseII, _) => Some(Descending),
        (Regime::Neither, _) => None,
    }
}

/// A one-parameter sweep with `A = aI`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub a: f64,
    pub n: f64,
    pub eta: f64,
    pub swept: SweptParam,
    pub values: Vec<f64>,
    pub backend: BackendChoice,
    pub threads: usize,
    /// Record wall-clock time per row (makes output nondeterministic).
    pub timing: bool,
}

/// Result of a sweep: the table and the ordering verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub table: SweepTable,
    pub regime: Regime,
    /// Ordering of `k_1` along increasing swept values; `None` when a row
    /// failed.
    pub verdict: Option<Monotonicity>,
    pub expected: Option<Monotonicity>,
}

impl SweepOutcome {
    /// Verdict present and equal to the theorem's prediction.
    pub fn agrees(&self) -> bool {
        self.verdict.is_some() && self.verdict == self.expected
    }
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

fn timed<T>(timing: bool, f: impl FnOnce() -> T) -> (T, Option<u64>) {
    let t = Instant::now();
    let v = f();
    (v, timing.then(|| t.elapsed().as_millis() as u64))
}

fn make_row(params: (f64, f64, f64), backend: &BackendChoice, res: TevResultOf<TevResult>, runtime_ms: Option<u64>) -> SweepRow {
    let (a, n, eta) = params;
    let (k1, residual, error) = match res {
        Ok(r) => (Some(r.k), Some(r.residual), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    SweepRow {
        a,
        n,
        eta,
        domain: backend.domain_name(),
        refinement: backend.refinement(),
        k1,
        eoc: None,
        backend: backend.label(),
        residual,
        runtime_ms,
        error,
    }
}

/// `k_1` for every swept value; rows are computed concurrently and
/// failures are recorded per row.
pub fn run_monotonicity_sweep(cfg: &SweepConfig) -> TevResultOf<SweepOutcome> {
    if cfg.values.is_empty() {
        return Err(TevError::Config("sweep: no values to sweep".into()));
    }
    let tuples: Vec<(f64, f64, f64)> = cfg
        .values
        .iter()
        .map(|&v| match cfg.swept {
            SweptParam::A => (v, cfg.n, cfg.eta),
            SweptParam::N => (cfg.a, v, cfg.eta),
            SweptParam::Eta => (cfg.a, cfg.n, v),
        })
        .collect();
    let params: Vec<MaterialParams> = tuples
        .iter()
        .map(|&(a, n, eta)| MaterialParams::isotropic(a, n, eta))
        .collect::<Result<_, _>>()?;
    let regime = classify(&params[0]);
    if let Some(p) = params.iter().find(|p| classify(p) != regime) {
        return Err(TevError::Config(format!(
            "sweep: mixed regimes, {} for the first row but {} for {p:?}",
            regime,
            classify(p)
        )));
    }
    let rows: Vec<SweepRow> = with_threads(cfg.threads, || {
        tuples
            .par_iter()
            .zip(params.par_iter())
            .map(|(&t, p)| {
                let (res, ms) = timed(cfg.timing, || cfg.backend.first_tev(p, false));
                make_row(t, &cfg.backend, res, ms)
            })
            .collect()
    });
    let mut table = SweepTable::new();
    for r in rows {
        table.insert(r);
    }
    if table.has_duplicates() || table.len() != cfg.values.len() {
        return Err(TevError::Config("sweep: repeated swept values".into()));
    }
    let k: Option<Vec<f64>> = table.rows().iter().map(|r| r.k1).collect();
    Ok(SweepOutcome {
        verdict: k.map(|k| limits::monotonicity(&k)),
        expected: expected_trend(regime, cfg.swept),
        regime,
        table,
    })
}

/// Direction of the conductivity limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitMode {
    /// `η_p = ±2^{-p}`.
    ToZero,
    /// `η_p = ±2^p`.
    ToInf,
}

impl std::str::FromStr for LimitMode {
    type Err = TevError;

    fn from_str(s: &str) -> TevResultOf<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "to_zero" | "zero" => Ok(LimitMode::ToZero),
            "to_inf" | "inf" => Ok(LimitMode::ToInf),
            other => Err(TevError::Config(format!("unknown limit mode {other:?}"))),
        }
    }
}

/// A conductivity-limit study with `A = aI`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaStudyConfig {
    pub a: f64,
    pub n: f64,
    /// Sign of every `η_p`.
    pub sign: f64,
    pub mode: LimitMode,
    /// Rows `p = 0..=p_max`.
    pub p_max: u32,
    pub backend: BackendChoice,
    /// Limit `k_ref`; `None` computes it (the `η = 0` problem, or the
    /// nearest Dirichlet candidate).
    pub reference: Option<f64>,
    /// Number of Dirichlet eigenvalues used for candidates.
    pub candidates: usize,
    pub eoc: EocRule,
    /// Branch split: a step exceeding this multiple of the previous step
    /// and `split_rel` times the value.
    pub split_factor: f64,
    pub split_rel: f64,
    pub threads: usize,
    pub timing: bool,
}

impl EtaStudyConfig {
    /// Defaults for everything except the physics.
    pub fn new(a: f64, n: f64, sign: f64, mode: LimitMode, backend: BackendChoice) -> Self {
        EtaStudyConfig {
            a,
            n,
            sign,
            mode,
            p_max: 9,
            backend,
            reference: None,
            candidates: 6,
            eoc: EocRule::default(),
            split_factor: 10.0,
            split_rel: 0.05,
            threads: 1,
            timing: false,
        }
    }

    /// The sequence `η_p`.
    pub fn etas(&self) -> Vec<f64> {
        (0..=self.p_max)
            .map(|p| {
                let mag = 2f64.powi(p as i32);
                self.sign * if self.mode == LimitMode::ToZero { 1.0 / mag } else { mag }
            })
            .collect()
    }
}

/// One `η_p` of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaRow {
    pub eta: f64,
    pub k: Option<f64>,
    pub eoc: Option<f64>,
    pub residual: Option<f64>,
    pub runtime_ms: Option<u64>,
    pub error: Option<String>,
    /// Index into [`EtaStudy::branches`].
    pub branch: usize,
}

/// A run of consecutive rows converging to one limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub start: usize,
    pub end: usize,
    /// Limit used for this branch's EOC.
    pub reference: Option<f64>,
}

/// Output of [`run_eta_limit_study`].
#[derive(Debug, Clone, PartialEq)]
pub struct EtaStudy {
    pub config: EtaStudyConfig,
    pub rows: Vec<EtaRow>,
    pub branches: Vec<Branch>,
    /// Limit of the final branch.
    pub reference: Option<f64>,
    /// Dirichlet eigenvalues of `-Δ` behind the candidates (to_inf only).
    pub dirichlet: Vec<f64>,
    pub candidates: Vec<Candidate>,
    /// Nearest candidate to the last computed `k` (to_inf only).
    pub identification: Option<Identification>,
}

impl EtaStudy {
    /// The study as a table with the EOC column filled.
    pub fn to_table(&self) -> SweepTable {
        let mut t = SweepTable::new();
        for r in &self.rows {
            t.insert(SweepRow {
                a: self.config.a,
                n: self.config.n,
                eta: r.eta,
                domain: self.config.backend.domain_name(),
                refinement: self.config.backend.refinement(),
                k1: r.k,
                eoc: r.eoc,
                backend: self.config.backend.label(),
                residual: r.residual,
                runtime_ms: r.runtime_ms,
                error: r.error.clone(),
            });
        }
        t
    }

    /// `k` values in row order (`NaN` for failed rows).
    pub fn k_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.k.unwrap_or(f64::NAN)).collect()
    }
}

/// `k_1` along `η_p`, EOC against the limit, branch splits, and (for
/// `η -> ±∞`) the nearest Dirichlet candidate.
pub fn run_eta_limit_study(cfg: &EtaStudyConfig) -> TevResultOf<EtaStudy> {
    if !(cfg.sign == 1.0 || cfg.sign == -1.0) {
        return Err(TevError::Config(format!("eoc: sign must be +1 or -1, got {}", cfg.sign)));
    }
    let etas = cfg.etas();
    let results: Vec<(TevResultOf<TevResult>, Option<u64>)> = with_threads(cfg.threads, || {
        etas.par_iter()
            .map(|&eta| {
                timed(cfg.timing, || {
                    let p = MaterialParams::isotropic(cfg.a, cfg.n, eta)?;
                    cfg.backend.first_tev(&p, false)
                })
            })
            .collect()
    });
    let mut rows: Vec<EtaRow> = etas
        .iter()
        .zip(results)
        .map(|(&eta, (res, ms))| {
            let (k, residual, error) = match res {
                Ok(r) => (Some(r.k), Some(r.residual), None),
                Err(e) => (None, None, Some(e.to_string())),
            };
            EtaRow {
                eta,
                k,
                eoc: None,
                residual,
                runtime_ms: ms,
                error,
                branch: 0,
            }
        })
        .collect();

    // branches are split on the rows that succeeded
    let ok: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].k.is_some()).collect();
    let ks: Vec<f64> = ok.iter().map(|&i| rows[i].k.unwrap()).collect();
    let starts: Vec<usize> = limits::branch_starts(&ks, cfg.split_factor, cfg.split_rel);

    let (dirichlet, candidates) = match cfg.mode {
        LimitMode::ToInf => {
            let d = cfg.backend.dirichlet_eigenvalues(cfg.candidates)?;
            let c = limits::candidates(&d, cfg.a / cfg.n);
            (d, c)
        }
        LimitMode::ToZero => (Vec::new(), Vec::new()),
    };
    let zero_reference = || -> TevResultOf<f64> {
        let p = MaterialParams::new(SymMat2::scalar(cfg.a), cfg.n, 0.0)?;
        if classify_with_override(&p, true) == Regime::Neither {
            return Err(TevError::Config(format!(
                "eoc: a = {}, n = {} has no regime at eta = 0",
                cfg.a, cfg.n
            )));
        }
        Ok(cfg.backend.first_tev(&p, true)?.k)
    };

    let mut branches = Vec::new();
    let identification = ks.last().and_then(|&k| limits::identify(k, &candidates));
    for (b, &s) in starts.iter().enumerate() {
        let e = starts.get(b + 1).copied().unwrap_or(ks.len());
        let last = b + 1 == starts.len();
        let reference = match cfg.mode {
            LimitMode::ToZero => Some(match cfg.reference {
                Some(r) => r,
                None if b == 0 => zero_reference()?,
                None => branches.first().and_then(|x: &Branch| x.reference).unwrap_or(f64::NAN),
            }),
            LimitMode::ToInf => match (last, cfg.reference) {
                (true, Some(r)) => Some(r),
                _ if e > s => limits::identify(ks[e - 1], &candidates).map(|i| i.nearest.value),
                _ => None,
            },
        };
        if let Some(r) = reference {
            let col = cfg.eoc.column(&ks[s..e], r);
            for (j, v) in col.into_iter().enumerate() {
                rows[ok[s + j]].eoc = v;
            }
        }
        for j in s..e {
            rows[ok[j]].branch = b;
        }
        branches.push(Branch {
            start: ok.get(s).copied().unwrap_or(0),
            end: if e > 0 { ok[e - 1] + 1 } else { 0 },
            reference,
        });
    }
    Ok(EtaStudy {
        config: cfg.clone(),
        rows,
        reference: branches.last().and_then(|b| b.reference),
        branches,
        dirichlet,
        candidates,
        identification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(a: f64, eta: f64, k1: Option<f64>) -> SweepRow {
        SweepRow {
            a,
            n: 3.0,
            eta,
            domain: "disk".into(),
            refinement: 0,
            k1,
            eoc: None,
            backend: "analytic(m=0)".into(),
            residual: k1.map(|_| 1e-13),
            runtime_ms: None,
            error: k1.is_none().then(|| "disk: no root".to_string()),
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let mut buf = Vec::new();
        SweepTable::new().emit(Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn rows_are_sorted_and_unique() {
        let mut t = SweepTable::new();
        t.insert(row(0.5, 1.0, Some(2.0)));
        t.insert(row(0.4, 2.0, Some(1.5)));
        t.insert(row(0.4, -1.0, None));
        t.insert(row(0.5, 1.0, Some(2.5)));
        assert_eq!(t.len(), 3);
        assert_eq!(t.rows()[0].eta, -1.0);
        assert_eq!(t.rows()[2].k1, Some(2.5));
    }

    #[test]
    fn both_formats_round_trip() {
        let mut t = SweepTable::new();
        t.insert(row(0.4, 0.1 + 0.2, Some(1.600_987_654_321)));
        t.insert(row(0.4, 2.0, None));
        for f in [Format::Csv, Format::Json] {
            let mut buf = Vec::new();
            t.emit(f, &mut buf).unwrap();
            assert_eq!(SweepTable::parse(f, std::str::from_utf8(&buf).unwrap()).unwrap(), t);
        }
    }

    #[test]
    fn trends_follow_regime() {
        assert_eq!(expected_trend(Regime::CaseI, SweptParam::A), Some(Monotonicity::Descending));
        assert_eq!(expected_trend(Regime::CaseII, SweptParam::A), Some(Monotonicity::Ascending));
        assert_eq!(expected_trend(Regime::CaseII, SweptParam::N), Some(Monotonicity::Descending));
        assert_eq!(expected_trend(Regime::CaseI, SweptParam::Eta), Some(Monotonicity::Ascending));
    }

    #[test]
    fn single_row_sweep_is_ascending() {
        let cfg = SweepConfig {
            a: 0.4,
            n: 3.0,
            eta: 1.0,
            swept: SweptParam::Eta,
            values: vec![1.0],
            backend: BackendChoice::Disk {
                m: 0,
                search: DiskSearch::default(),
            },
            threads: 1,
            timing: false,
        };
        let out = run_monotonicity_sweep(&cfg).unwrap();
        assert_eq!(out.verdict, Some(Monotonicity::Ascending));
        assert!((out.table.rows()[0].k1.unwrap() - 1.6010).abs() < 5e-4);
    }

    #[test]
    fn mixed_regimes_are_rejected() {
        let cfg = SweepConfig {
            a: 0.4,
            n: 3.0,
            eta: 1.0,
            swept: SweptParam::Eta,
            values: vec![1.0, -1.0],
            backend: BackendChoice::Disk {
                m: 0,
                search: DiskSearch::default(),
            },
            threads: 1,
            timing: false,
        };
        assert!(matches!(run_monotonicity_sweep(&cfg), Err(TevError::Config(_))));
    }

    #[test]
    fn failed_rows_are_recorded() {
        let cfg = SweepConfig {
            a: 0.4,
            n: 3.0,
            eta: 1.0,
            swept: SweptParam::Eta,
            values: vec![1.0, 2.0],
            backend: BackendChoice::Disk {
                m: 0,
                search: DiskSearch {
                    k_max: 1.3,
                    ..DiskSearch::default()
                },
            },
            threads: 1,
            timing: false,
        };
        let out = run_monotonicity_sweep(&cfg).unwrap();
        assert!(out.table.rows()[0].error.is_some());
        assert!(out.table.rows()[1].k1.is_some());
        assert_eq!(out.verdict, None);
    }
}
