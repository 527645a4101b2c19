//! Command-line front end.
//!
//! Wavenumbers on the command line are in units of the lattice wavenumber,
//! `k/K`. Sweeps write one CSV row per wavenumber in ascending order.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::born::{born1_general, born2_general, born2_resonance, PerturbativeInputs, TermSet};
use crate::classify::{classify_amplitudes, classify_transforms, Classification};
use crate::config::Config;
use crate::direct::solve_direct;
use crate::error::{Error, Result};
use crate::format_float;
use crate::model::{resonant_wavenumbers, Amplitudes};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const CSV_HEADER: &str = "k_over_K,Re_Rr,Im_Rr,Re_Rl,Im_Rl,Re_Tr,Im_Tr,Re_Tl,Im_Tl,abs_Rr,abs_Rl,abs_Tr_minus_1,abs_Tl_minus_1,abs_Tr_minus_Tl";

#[derive(Debug, Parser)]
#[command(name = "nlscatter", version, about = "Scattering amplitudes of a slab with a complex potential and a confined nonlinearity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the four amplitudes at one wavenumber.
    Amplitudes(PointArgs),
    /// Tabulate the amplitudes over a range of wavenumbers.
    Sweep(SweepArgs),
    /// Report reflectionlessness, transparency and invisibility as JSON.
    Classify(ClassifyArgs),
    /// List the resonant wavenumbers k = sK/2.
    Resonances(ResonanceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Direct,
    Born1,
    Born2,
    #[value(name = "born2-resonance")]
    Born2Resonance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum TermsArg {
    /// Second order without the γ̂² term.
    #[default]
    NoSelf,
    /// Complete second order.
    Full,
}

impl From<TermsArg> for TermSet {
    fn from(t: TermsArg) -> Self {
        match t {
            TermsArg::NoSelf => TermSet::NoSelfCoupling,
            TermsArg::Full => TermSet::Full,
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_enum, default_value = "direct")]
    pub method: MethodArg,
    /// Second-order terms used by born2 and born2-resonance.
    #[arg(long, value_enum, default_value = "no-self")]
    pub terms: TermsArg,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub common: Common,
    /// Wavenumber in units of K.
    #[arg(long)]
    pub k: f64,
    /// Solver tolerance (overrides the config).
    #[arg(long)]
    pub tol: Option<f64>,
    /// With the direct method, write the fields to `<prefix>_xi.csv` and `<prefix>_zeta.csv`.
    #[arg(long)]
    pub dump_fields: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// `lo:hi:n` in units of K.
    #[arg(long)]
    pub k_range: String,
    /// Comma-separated numbers of periods; one output file per entry.
    #[arg(long, value_delimiter = ',')]
    pub m_list: Vec<u32>,
    /// Output CSV; `-` or absent for standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub k: f64,
    /// Classifier threshold (overrides the config).
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ResonanceArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub s_max: u32,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Precondition(_) => EXIT_CONFIG,
        Error::Domain(_) | Error::IntegrationFailure { .. } | Error::SpectralSingularity { .. } => EXIT_SOLVER,
        Error::Io(_) => EXIT_IO,
    }
}

/// Amplitudes of one configuration at wavenumber `k`.
pub fn compute(cfg: &Config, k: f64, method: MethodArg, terms: TermSet) -> Result<Amplitudes> {
    let pot = cfg.potential(k);
    let nl = cfg.nonlinearity(k);
    let (nm, np) = (cfg.n_minus, cfg.n_plus);
    match method {
        MethodArg::Direct => Ok(solve_direct(&pot, &nl, k, nm, np, cfg.solver_settings())?.amplitudes),
        MethodArg::Born1 => born1_general(&pot, &nl, k, nm, np, cfg.grid_size()),
        MethodArg::Born2 => born2_general(&pot, &nl, k, nm, np, cfg.grid_size(), terms),
        MethodArg::Born2Resonance => born2_resonance(&PerturbativeInputs::new(&pot, &nl, k, nm, np)?, terms),
    }
}

/// `lo:hi:n` with `0 < lo <= hi` and `n >= 2`.
pub fn parse_range(text: &str) -> Result<(f64, f64, usize)> {
    let bad = || Error::Config(format!("--k-range expects lo:hi:n, got {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0 && lo.is_finite() && hi.is_finite() && hi >= lo) {
        return Err(Error::Config(format!("--k-range needs 0 < lo <= hi, got {lo}:{hi}")));
    }
    if n < 2 {
        return Err(Error::Config(format!("--k-range needs at least 2 points, got {n}")));
    }
    Ok((lo, hi, n))
}

/// Sweep points in units of K. The resonance method keeps only `s/2` in range.
pub fn sweep_points(lo: f64, hi: f64, n: usize, method: MethodArg) -> Vec<f64> {
    match method {
        MethodArg::Born2Resonance => {
            let first = (2.0 * lo - 1e-9).ceil().max(1.0) as u32;
            let last = (2.0 * hi + 1e-9).floor() as u32;
            (first..=last).map(|s| s as f64 / 2.0).collect()
        }
        _ => (0..n)
            .map(|j| if j == n - 1 { hi } else { lo + (hi - lo) * j as f64 / (n - 1) as f64 })
            .collect(),
    }
}

pub fn csv_row(k_over_lattice: f64, a: &Amplitudes) -> String {
    let fields = [
        k_over_lattice,
        a.rr.re,
        a.rr.im,
        a.rl.re,
        a.rl.im,
        a.tr.re,
        a.tr.im,
        a.tl.re,
        a.tl.im,
        a.rr.norm(),
        a.rl.norm(),
        (a.tr - 1.0).norm(),
        (a.tl - 1.0).norm(),
        (a.tr - a.tl).norm(),
    ];
    fields.iter().map(|v| format_float(*v)).collect::<Vec<_>>().join(",")
}

/// Rows of one sweep, in the order of `points`.
pub fn sweep_rows(cfg: &Config, points: &[f64], method: MethodArg, terms: TermSet) -> Result<Vec<String>> {
    let kk = cfg.shape.lattice_k();
    points
        .par_iter()
        .map(|&q| {
            let a = compute(cfg, q * kk, method, terms).map_err(|e| annotate(e, q))?;
            Ok(csv_row(q, &a))
        })
        .collect()
}

fn annotate(e: Error, q: f64) -> Error {
    match e {
        Error::Domain(m) => Error::Domain(format!("at k/K = {q}: {m}")),
        Error::Precondition(m) => Error::Precondition(format!("at k/K = {q}: {m}")),
        Error::IntegrationFailure { x, reason } => Error::IntegrationFailure { x, reason: format!("at k/K = {q}: {reason}") },
        other => other,
    }
}

fn per_m_path(out: &Path, m: u32) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_m{m}.{}", ext.to_string_lossy()),
        None => format!("{stem}_m{m}"),
    };
    out.with_file_name(name)
}

fn load(common: &Common, tol: Option<f64>) -> Result<Config> {
    let mut cfg = Config::load(&common.config)?;
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Config(format!("--tol must be positive, got {t}")));
        }
        cfg.tol = t;
    }
    Ok(cfg)
}

fn wavenumber(cfg: &Config, k_over_lattice: f64) -> Result<f64> {
    if !(k_over_lattice > 0.0 && k_over_lattice.is_finite()) {
        return Err(Error::Config(format!("--k must be positive, got {k_over_lattice}")));
    }
    Ok(k_over_lattice * cfg.shape.lattice_k())
}

fn complex_line(out: &mut dyn Write, name: &str, z: Complex64) -> std::io::Result<()> {
    writeln!(out, "{name:<6} {} {} {}", format_float(z.re), format_float(z.im), format_float(z.norm()))
}

fn cmd_amplitudes(args: &PointArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = load(&args.common, args.tol)?;
    let k = wavenumber(&cfg, args.k)?;
    let method = args.common.method;
    let a = if let (MethodArg::Direct, Some(prefix)) = (method, &args.dump_fields) {
        let sol = solve_direct(&cfg.potential(k), &cfg.nonlinearity(k), k, cfg.n_minus, cfg.n_plus, cfg.solver_settings())?;
        for (field, tag) in [(&sol.xi, "xi"), (&sol.zeta, "zeta")] {
            let path = PathBuf::from(format!("{}_{tag}.csv", prefix.display()));
            field.write_csv(BufWriter::new(File::create(&path)?))?;
        }
        sol.amplitudes
    } else {
        compute(&cfg, k, method, args.common.terms.into())?
    };
    writeln!(out, "method {}", a.method)?;
    writeln!(out, "k_over_K {}", format_float(args.k))?;
    writeln!(out, "#      Re Im abs")?;
    complex_line(out, "Rr", a.rr)?;
    complex_line(out, "Rl", a.rl)?;
    complex_line(out, "Tr", a.tr)?;
    complex_line(out, "Tl", a.tl)?;
    if let Some(t) = a.aux {
        complex_line(out, "X(0)", t.x0)?;
        complex_line(out, "X(2k)", t.x2k)?;
        complex_line(out, "Y(0)", t.y0)?;
        complex_line(out, "Y(-2k)", t.ym2k)?;
    }
    Ok(())
}

fn write_rows(path: Option<&Path>, rows: &[String], stdout: &mut dyn Write) -> Result<()> {
    let mut body = String::with_capacity(rows.len() * 320);
    body.push_str(CSV_HEADER);
    body.push('\n');
    for r in rows {
        body.push_str(r);
        body.push('\n');
    }
    match path {
        None => stdout.write_all(body.as_bytes())?,
        Some(p) => std::fs::write(p, body)?,
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = load(&args.common, args.tol)?;
    let (lo, hi, n) = parse_range(&args.k_range)?;
    let method = args.common.method;
    let terms: TermSet = args.common.terms.into();
    let points = sweep_points(lo, hi, n, method);
    if points.is_empty() {
        return Err(Error::Config(format!("no resonant k/K = s/2 in [{lo}, {hi}]")));
    }
    let out_path = args.out.as_deref().filter(|p| *p != Path::new("-"));
    if args.m_list.len() > 1 && out_path.is_none() {
        return Err(Error::Config("several --m-list entries need --out".into()));
    }
    if args.workers == Some(0) {
        return Err(Error::Config("--workers must be at least 1".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = args.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let runs: Vec<(Option<u32>, Config)> = if args.m_list.is_empty() {
        vec![(None, cfg)]
    } else {
        args.m_list.iter().map(|&m| Ok((Some(m), cfg.with_periods(m)?))).collect::<Result<_>>()?
    };
    for (m, cfg) in &runs {
        log::info!("sweeping {} points with {method:?}{}", points.len(), m.map(|m| format!(" at m = {m}")).unwrap_or_default());
        let rows = pool.install(|| sweep_rows(cfg, &points, method, terms))?;
        let path = match (out_path, m) {
            (Some(p), Some(m)) if runs.len() > 1 => Some(per_m_path(p, *m)),
            (Some(p), _) => Some(p.to_path_buf()),
            (None, _) => None,
        };
        write_rows(path.as_deref(), &rows, out)?;
    }
    Ok(())
}

pub fn classify_point(cfg: &Config, k: f64, method: MethodArg, terms: TermSet, tol: f64) -> Result<Classification> {
    let a = compute(cfg, k, method, terms)?;
    match a.aux {
        Some(t) => classify_transforms(&t, k, tol),
        None => classify_amplitudes(&a, tol),
    }
}

fn cmd_classify(args: &ClassifyArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = load(&args.common, None)?;
    let k = wavenumber(&cfg, args.k)?;
    let tol = args.tol.unwrap_or(cfg.classify_tol);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Config(format!("--tol must be positive, got {tol}")));
    }
    let cl = classify_point(&cfg, k, args.common.method, args.common.terms.into(), tol)?;
    let json = serde_json::to_string_pretty(&cl).map_err(|e| Error::Io(e.into()))?;
    writeln!(out, "{json}")?;
    Ok(())
}

fn cmd_resonances(args: &ResonanceArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = Config::load(&args.config)?;
    let kk = cfg.shape.lattice_k();
    writeln!(out, "s,m,k_over_K,k")?;
    for r in resonant_wavenumbers(&cfg.shape, args.s_max)? {
        writeln!(out, "{},{},{},{}", r.s, r.m, format_float(r.k / kk), format_float(r.k))?;
    }
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Amplitudes(a) => cmd_amplitudes(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Classify(a) => cmd_classify(a, out),
        Command::Resonances(a) => cmd_resonances(a, out),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("0.5:4.5:801").unwrap(), (0.5, 4.5, 801));
        for bad in ["0.5:4.5", "0:1:3", "1:0.5:3", "1:2:1", "a:b:c"] {
            assert!(matches!(parse_range(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn sweep_grid_is_ascending_and_hits_ends() {
        let p = sweep_points(0.5, 4.5, 801, MethodArg::Born2);
        assert_eq!(p.len(), 801);
        assert_eq!(p[0], 0.5);
        assert_eq!(p[800], 4.5);
        assert!((p[400] - 2.5).abs() < 1e-15);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(sweep_points(0.5, 4.5, 801, MethodArg::Born2Resonance).len(), 9);
        assert_eq!(sweep_points(0.6, 1.2, 5, MethodArg::Born2Resonance), vec![1.0]);
    }

    #[test]
    fn per_m_file_names() {
        assert_eq!(per_m_path(Path::new("out/sweep.csv"), 5), PathBuf::from("out/sweep_m5.csv"));
        assert_eq!(per_m_path(Path::new("sweep"), 10), PathBuf::from("sweep_m10"));
    }

    #[test]
    fn header_matches_row_width() {
        let a = Amplitudes::new(crate::model::Rt::identity(), crate::model::Method::Born1).unwrap();
        assert_eq!(csv_row(1.0, &a).split(',').count(), CSV_HEADER.split(',').count());
    }
}
