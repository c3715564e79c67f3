//! Command-line front end.
//!
//! Exit codes: 0 when every verdict is positive, 1 when something is
//! inconclusive, 2 on usage or input errors.
//!
//! The default modulus is 101. The `SOSIDENT_MODULUS` environment variable
//! replaces that default; an explicit `--modulus` wins over both. The modulus
//! actually used is the `p` field of every report.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::binary::{distinct_orbits, gram_invariant, linear_factor, orbit_decompositions, OrbitComparison};
use crate::catalect::catalecticant_report;
use crate::contact::{
    generic_identifiability, generic_identifiability_unchecked, HessianMode, IdentifiabilityCertificate,
};
use crate::error::{Error, Result};
use crate::gf::{Modulus, DEFAULT_MODULUS};
use crate::poly::parse_poly_json;
use crate::secant::{generic_rank, secant_dim_sample, DimensionReport, SecantParams, DEFAULT_TRIALS};
use crate::seed::row_seed;

pub const MODULUS_ENV: &str = "SOSIDENT_MODULUS";

pub const CSV_COLUMNS: [&str; 11] = [
    "n",
    "d",
    "r",
    "p",
    "seed",
    "expected_dim",
    "ambient_dim",
    "terracini_rank",
    "hessian_rank",
    "target_rank",
    "verdict",
];

#[derive(Debug, Parser)]
#[command(name = "sosident", version, about = "Modular certificates for secant varieties of squares")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Prime modulus (default 101, or $SOSIDENT_MODULUS).
    #[arg(long, global = true)]
    pub modulus: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, global = true, value_enum, default_value_t = HessianArg::Combo)]
    pub hessian: HessianArg,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Also write CSV rows here.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HessianArg {
    Combo,
    Full,
}

impl From<HessianArg> for HessianMode {
    fn from(h: HessianArg) -> Self {
        match h {
            HessianArg::Combo => HessianMode::RandomCombination,
            HessianArg::Full => HessianMode::FullStack,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Identifiable,
    Dimension,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify generic O(r)-identifiability of sigma_r(Sq_{d,n}).
    Identifiable {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: usize,
        /// Allow r above the expected generic rank.
        #[arg(long)]
        force: bool,
    },
    /// Certify that sigma_r(Sq_{d,n}) has the expected dimension.
    Dimension {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: usize,
    },
    /// Run one check over a grid of (n, d, r).
    Sweep {
        #[arg(long, value_enum, default_value_t = SweepKind::Identifiable)]
        kind: SweepKind,
        /// e.g. `2..6`, `3`, `2,4,7`.
        #[arg(long)]
        n_range: String,
        /// Ranges skip odd degrees, e.g. `4..10` is 4,6,8,10.
        #[arg(long)]
        d_range: String,
        /// Defaults to every subgeneric r (identifiable) or r up to the generic rank (dimension).
        #[arg(long)]
        r_range: Option<String>,
    },
    /// List the O(2)-orbits of two-square decompositions of a product of linear binary forms.
    BinaryOrbits {
        /// JSON list of [a, b], each meaning a*x + b*y.
        #[arg(long)]
        factors: PathBuf,
    },
    /// Catalecticant rank of a form read from a JSON polynomial file.
    Catalecticant {
        #[arg(long)]
        poly: PathBuf,
        /// Source degree; defaults to d/2.
        #[arg(long)]
        i: Option<usize>,
        /// Write the matrix as `rows cols p` followed by rows of residues.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

/// Resolves the modulus: flag, then environment, then 101.
pub fn resolve_modulus(flag: Option<u32>, env: Option<&str>) -> Result<(Modulus, &'static str)> {
    if let Some(p) = flag {
        return Ok((Modulus::new(p)?, "--modulus"));
    }
    if let Some(v) = env {
        let p: u32 = v.trim().parse().map_err(|_| Error::Parse(format!("{MODULUS_ENV}={v:?} is not an integer")))?;
        return Ok((Modulus::new(p)?, MODULUS_ENV));
    }
    Ok((Modulus::new(DEFAULT_MODULUS)?, "default"))
}

/// Parses `a..b` / `a..=b` / `a-b` (inclusive), `a,b,c`, or `a`.
pub fn parse_range(s: &str) -> Result<(Vec<usize>, bool)> {
    let s = s.trim();
    if s.is_empty() {
        return Ok((Vec::new(), true));
    }
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad range bound {t:?}")));
    let span = if let Some((a, b)) = s.split_once("..=") {
        Some((a, b))
    } else if let Some((a, b)) = s.split_once("..") {
        Some((a, b))
    } else {
        s.split_once('-')
    };
    if let Some((a, b)) = span {
        let (a, b) = (num(a)?, num(b)?);
        return Ok(((a..=b).collect(), true));
    }
    Ok((s.split(',').map(num).collect::<Result<_>>()?, false))
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SweepRow {
    pub n: usize,
    pub d: usize,
    pub r: usize,
    pub p: u32,
    pub seed: u64,
    pub expected_dim: Option<usize>,
    pub ambient_dim: Option<usize>,
    pub terracini_rank: Option<usize>,
    pub hessian_rank: Option<usize>,
    pub target_rank: Option<usize>,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hessian_mode: Option<HessianMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_positive(&self) -> bool {
        self.verdict == "Certified" || self.verdict == "NonDefectiveCertified"
    }

    fn csv_record(&self) -> Vec<String> {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.n.to_string(),
            self.d.to_string(),
            self.r.to_string(),
            self.p.to_string(),
            self.seed.to_string(),
            opt(self.expected_dim),
            opt(self.ambient_dim),
            opt(self.terracini_rank),
            opt(self.hessian_rank),
            opt(self.target_rank),
            self.verdict.clone(),
        ]
    }

    fn error(n: usize, d: usize, r: usize, p: u32, seed: u64, e: &Error) -> Self {
        SweepRow {
            n,
            d,
            r,
            p,
            seed,
            expected_dim: None,
            ambient_dim: None,
            terracini_rank: None,
            hessian_rank: None,
            target_rank: None,
            verdict: "Error".into(),
            hessian_mode: None,
            trials: None,
            error: Some(e.to_string()),
        }
    }
}

impl From<&IdentifiabilityCertificate> for SweepRow {
    fn from(c: &IdentifiabilityCertificate) -> Self {
        SweepRow {
            n: c.n,
            d: c.d,
            r: c.r,
            p: c.p,
            seed: c.seed,
            expected_dim: Some(c.expected_dim),
            ambient_dim: Some(c.params().ambient_dim()),
            terracini_rank: Some(c.terracini_rank),
            hessian_rank: Some(c.hessian_rank),
            target_rank: Some(c.target_rank),
            verdict: c.verdict.to_string(),
            hessian_mode: Some(c.hessian_mode),
            trials: Some(c.trials),
            error: None,
        }
    }
}

impl From<&DimensionReport> for SweepRow {
    fn from(r: &DimensionReport) -> Self {
        SweepRow {
            n: r.n,
            d: r.d,
            r: r.r,
            p: r.p,
            seed: r.seed,
            expected_dim: Some(r.expected_dim),
            ambient_dim: Some(r.ambient_dim),
            terracini_rank: Some(r.observed_rank),
            hessian_rank: None,
            target_rank: None,
            verdict: r.verdict.to_string(),
            hessian_mode: None,
            trials: Some(r.trials),
            error: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub kind: &'static str,
    pub master_seed: u64,
    pub p: u32,
    pub rows: Vec<SweepRow>,
}

/// The `(n, d, r)` triples of a sweep, ordered.
pub fn sweep_cases(kind: SweepKind, ns: &[usize], ds: &[usize], rs: Option<&[usize]>) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    let mut ns = ns.to_vec();
    let mut ds = ds.to_vec();
    ns.sort_unstable();
    ns.dedup();
    ds.sort_unstable();
    ds.dedup();
    for &n in &ns {
        for &d in &ds {
            let rs: Vec<usize> = match rs {
                Some(rs) => {
                    let mut v = rs.to_vec();
                    v.sort_unstable();
                    v.dedup();
                    v
                }
                None => match generic_rank(d, n) {
                    Ok(g) => match kind {
                        SweepKind::Identifiable => {
                            (1..=g).filter(|&r| SecantParams::new(n, d, r).is_ok_and(|p| p.is_subgeneric())).collect()
                        }
                        SweepKind::Dimension => (1..=g).collect(),
                    },
                    // keep the row so the error is reported
                    Err(_) => vec![1],
                },
            };
            out.extend(rs.into_iter().map(|r| (n, d, r)));
        }
    }
    out
}

pub fn run_case(
    kind: SweepKind,
    (n, d, r): (usize, usize, usize),
    modulus: Modulus,
    seed: u64,
    trials: usize,
    mode: HessianMode,
) -> SweepRow {
    let outcome = SecantParams::new(n, d, r).and_then(|params| match kind {
        SweepKind::Identifiable => {
            generic_identifiability(&params, modulus, seed, trials, mode).map(|c| SweepRow::from(&c))
        }
        SweepKind::Dimension => secant_dim_sample(&params, modulus, seed, trials).map(|c| SweepRow::from(&c)),
    });
    outcome.unwrap_or_else(|e| SweepRow::error(n, d, r, modulus.p(), seed, &e))
}

/// Settings shared by every row of a sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub modulus: Modulus,
    pub master_seed: u64,
    pub trials: usize,
    pub mode: HessianMode,
}

/// Rows are computed in parallel and yielded in case order, one block per
/// round of workers.
pub fn run_sweep(
    plan: &SweepSpec,
    cases: &[(usize, usize, usize)],
    pool: &rayon::ThreadPool,
    mut sink: impl FnMut(&[SweepRow]) -> io::Result<()>,
) -> io::Result<Vec<SweepRow>> {
    let mut all = Vec::with_capacity(cases.len());
    for block in cases.chunks(pool.current_num_threads().max(1)) {
        let rows: Vec<SweepRow> = pool.install(|| {
            block
                .par_iter()
                .map(|&c| {
                    let seed = row_seed(plan.master_seed, c.0, c.1, c.2);
                    run_case(plan.kind, c, plan.modulus, seed, plan.trials, plan.mode)
                })
                .collect()
        });
        sink(&rows)?;
        all.extend(rows);
    }
    Ok(all)
}

fn open_out(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::InvalidParams(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidParams(format!("output failed: {e}"))
}

fn emit_json<T: Serialize>(value: &T, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(io_err)?;
    match path {
        Some(p) => {
            let mut f = open_out(p)?;
            writeln!(f, "{text}").map_err(io_err)?;
            f.flush().map_err(io_err)
        }
        None => writeln!(out, "{text}").map_err(io_err),
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record(CSV_COLUMNS).map_err(io_err)?;
    Ok(w)
}

fn write_single_csv(path: Option<&Path>, row: &SweepRow) -> Result<()> {
    if let Some(p) = path {
        let mut w = csv_writer(p)?;
        w.write_record(row.csv_record()).map_err(io_err)?;
        w.flush().map_err(io_err)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct OrbitRow {
    index: usize,
    subset: Vec<usize>,
    summands: Vec<String>,
    coefficients: Vec<Vec<u32>>,
    verified: bool,
    gram_hash: String,
}

#[derive(Debug, Serialize)]
struct OrbitListing {
    p: u32,
    d: usize,
    factors_general: bool,
    count: usize,
    orbits: Vec<OrbitRow>,
    possibly_same_pairs: Vec<(usize, usize)>,
    all_distinct: bool,
}

/// Parses a factor file: `[[a, b], ...]`.
pub fn parse_factors(text: &str) -> Result<Vec<(i64, i64)>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn cmd_binary_orbits(path: &Path, modulus: Modulus, g: &GlobalOpts, out: &mut dyn Write) -> Result<i32> {
    let pairs = parse_factors(&read_file(path)?)?;
    let factors: Vec<_> = pairs.iter().map(|&(a, b)| linear_factor(a, b, modulus)).collect();
    let listing = orbit_decompositions(&factors)?;
    let product = factors.iter().skip(1).try_fold(factors[0].clone(), |acc, l| acc.mul(l))?;
    let grams: Vec<_> = listing.decompositions().map(gram_invariant).collect();
    let mut orbits = Vec::with_capacity(listing.len());
    for (k, (entry, gram)) in listing.entries.iter().zip(&grams).enumerate() {
        let dec = &entry.decomposition;
        orbits.push(OrbitRow {
            index: k,
            subset: entry.subset.clone(),
            summands: dec.summands.iter().map(|s| s.to_string()).collect(),
            coefficients: dec.summands.iter().map(|s| s.coeffs().iter().map(|c| c.value()).collect()).collect(),
            verified: crate::binary::verify_decomposition(&product, dec)?,
            gram_hash: format!("{:016x}", gram.hash()),
        });
    }
    let decs: Vec<_> = listing.decompositions().collect();
    let mut possibly_same = Vec::new();
    for a in 0..decs.len() {
        for b in a + 1..decs.len() {
            if distinct_orbits(decs[a], decs[b])? == OrbitComparison::PossiblySame {
                possibly_same.push((a, b));
            }
        }
    }
    let all_distinct = possibly_same.is_empty();
    let report = OrbitListing {
        p: modulus.p(),
        d: factors.len(),
        factors_general: listing.factors_general,
        count: listing.len(),
        orbits,
        possibly_same_pairs: possibly_same,
        all_distinct,
    };
    emit_json(&report, g.json.as_deref(), out)?;
    Ok(if all_distinct && report.orbits.iter().all(|o| o.verified) { 0 } else { 1 })
}

fn cmd_catalecticant(
    path: &Path,
    i: Option<usize>,
    dump: Option<&Path>,
    g: &GlobalOpts,
    out: &mut dyn Write,
) -> Result<i32> {
    let f = parse_poly_json(&read_file(path)?)?;
    let i = match i {
        Some(i) => i,
        None if f.degree() % 2 == 0 => f.degree() / 2,
        None => return Err(Error::OddDegree(f.degree())),
    };
    let (report, cat) = catalecticant_report(&f, i)?;
    if let Some(p) = dump {
        let mut w = open_out(p)?;
        w.write_all(cat.matrix.to_dump().as_bytes()).map_err(io_err)?;
        w.flush().map_err(io_err)?;
    }
    emit_json(&report, g.json.as_deref(), out)?;
    Ok(0)
}

fn dispatch(cli: Cli, env_modulus: Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let g = cli.global;
    let (modulus, source) = resolve_modulus(g.modulus, env_modulus.as_deref())?;
    if source == MODULUS_ENV {
        let _ = writeln!(err, "note: modulus {} taken from {MODULUS_ENV}", modulus.p());
    }
    let mode: HessianMode = g.hessian.into();
    match cli.command {
        Command::Identifiable { n, d, r, force } => {
            let params = SecantParams::new(n, d, r)?;
            let g_rank = generic_rank(d, n)?;
            if r > g_rank && !force {
                return Err(Error::InvalidParams(format!(
                    "r = {r} exceeds the expected generic 2-rank {g_rank} for n = {n}, d = {d}; pass --force to run anyway"
                )));
            }
            let cert = if params.is_subgeneric() {
                generic_identifiability(&params, modulus, g.seed, g.trials, mode)?
            } else {
                let _ = writeln!(
                    err,
                    "note: r = {r} fills the ambient space for n = {n}, d = {d}; no hyperplanes, so no certificate"
                );
                generic_identifiability_unchecked(&params, modulus, g.seed, g.trials, mode)?
            };
            emit_json(&cert, g.json.as_deref(), out)?;
            write_single_csv(g.csv.as_deref(), &SweepRow::from(&cert))?;
            Ok(if cert.is_certified() { 0 } else { 1 })
        }
        Command::Dimension { n, d, r } => {
            let params = SecantParams::new(n, d, r)?;
            let g_rank = generic_rank(d, n)?;
            if r > g_rank {
                let _ = writeln!(
                    err,
                    "note: r = {r} exceeds the expected generic 2-rank {g_rank} for n = {n}, d = {d}; checking that the ambient space is filled"
                );
            }
            let report = secant_dim_sample(&params, modulus, g.seed, g.trials)?;
            emit_json(&report, g.json.as_deref(), out)?;
            write_single_csv(g.csv.as_deref(), &SweepRow::from(&report))?;
            Ok(if report.verdict == crate::secant::DimensionVerdict::NonDefectiveCertified { 0 } else { 1 })
        }
        Command::Sweep { kind, n_range, d_range, r_range } => {
            let (ns, _) = parse_range(&n_range)?;
            let (mut ds, is_span) = parse_range(&d_range)?;
            if is_span {
                ds.retain(|d| d % 2 == 0);
            }
            let rs = r_range.as_deref().map(parse_range).transpose()?.map(|(v, _)| v);
            let cases = sweep_cases(kind, &ns, &ds, rs.as_deref());
            let workers = g.workers.unwrap_or_else(rayon::current_num_threads).max(1);
            let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(io_err)?;
            let mut csv_out = g.csv.as_deref().map(csv_writer).transpose()?;
            let stream_stdout = g.json.is_some();
            let plan = SweepSpec { kind, modulus, master_seed: g.seed, trials: g.trials, mode };
            let rows = run_sweep(&plan, &cases, &pool, |rows| {
                if let Some(w) = csv_out.as_mut() {
                    for row in rows {
                        w.write_record(row.csv_record())?;
                    }
                    w.flush()?;
                }
                if stream_stdout {
                    for row in rows {
                        let _ = writeln!(err, "{} n={} d={} r={}", row.verdict, row.n, row.d, row.r);
                    }
                }
                Ok(())
            })
            .map_err(io_err)?;
            let all_positive = rows.iter().all(SweepRow::is_positive);
            let result = SweepResult {
                kind: match kind {
                    SweepKind::Identifiable => "identifiable",
                    SweepKind::Dimension => "dimension",
                },
                master_seed: g.seed,
                p: modulus.p(),
                rows,
            };
            emit_json(&result, g.json.as_deref(), out)?;
            Ok(if all_positive { 0 } else { 1 })
        }
        Command::BinaryOrbits { factors } => cmd_binary_orbits(&factors, modulus, &g, out),
        Command::Catalecticant { poly, i, dump } => cmd_catalecticant(&poly, i, dump.as_deref(), &g, out),
    }
}

/// Parses `args` (including the program name) and runs the command;
/// returns the process exit code.
pub fn run<I, T>(args: I, env_modulus: Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli, env_modulus, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..4").unwrap(), (vec![2, 3, 4], true));
        assert_eq!(parse_range("2..=3").unwrap(), (vec![2, 3], true));
        assert_eq!(parse_range("3-5").unwrap(), (vec![3, 4, 5], true));
        assert_eq!(parse_range("4,6,10").unwrap(), (vec![4, 6, 10], false));
        assert_eq!(parse_range("7").unwrap(), (vec![7], false));
        assert_eq!(parse_range("").unwrap(), (vec![], true));
        assert_eq!(parse_range("5..2").unwrap().0, Vec::<usize>::new());
        assert!(parse_range("a..b").is_err());
    }

    #[test]
    fn modulus_resolution() {
        assert_eq!(resolve_modulus(None, None).unwrap().0.p(), 101);
        assert_eq!(resolve_modulus(None, Some("103")).unwrap(), (Modulus::new(103).unwrap(), MODULUS_ENV));
        assert_eq!(resolve_modulus(Some(107), Some("103")).unwrap().0.p(), 107);
        assert!(resolve_modulus(None, Some("100")).is_err());
        assert!(resolve_modulus(None, Some("x")).is_err());
    }

    #[test]
    fn default_sweep_cases() {
        let c = sweep_cases(SweepKind::Identifiable, &[2], &[4, 6], None);
        assert_eq!(c, vec![(2, 4, 1), (2, 4, 2), (2, 6, 1), (2, 6, 2), (2, 6, 3)]);
        let c = sweep_cases(SweepKind::Dimension, &[3], &[4], None);
        assert_eq!(c.len(), 5);
        assert!(sweep_cases(SweepKind::Dimension, &[], &[4], None).is_empty());
    }
}
