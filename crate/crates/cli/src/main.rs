//! `resosc`: exact perturbation series, resummation, spectra and
//! coherent-state data for the quartic oscillator.
//!
//! Exit codes: 0 success, 1 verification or numerical failure, 2 usage
//! error, 3 cache or environment error.

mod cache;
mod format;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;

use resosc::borel::{
    borel_transform, fit_large_order, resum, singularity_consensus, singularity_estimate, BorelError,
    SingularityMethod, DEFAULT_FIT_KMIN, MIN_SINGULARITY_COEFFS,
};
use resosc::coherent::{
    husimi_grid, sb_transform, toeplitz_element, transseries_energy, CoherentError, HoloPoly, InstantonParams,
    Measure, Symbol, ToeplitzSpec, TransSeriesParams, SB_MAX_INDEX,
};
use resosc::report::{fit_records, fmt_f64, records_to_json, EstimateRecord};
use resosc::series::{format_rational, rs_recursion_capped, verify_table};
use resosc::spectral::{build_matrix, convergence_study, eigenvalues, SpectralError};

use crate::cache::{Cache, CacheError};
use crate::format::{complex_json, json_f64, parse_complex, series_csv, series_json, series_latex};

#[derive(Parser, Debug)]
#[command(name = "resosc", version, about = "Quartic oscillator: exact series, resummation and coherent-state tools")]
struct Cli {
    /// Directory for cached exact coefficients (RESOSC_CACHE_DIR takes precedence)
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SeriesFormat {
    Text,
    Csv,
    Json,
    Latex,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SpectrumFormat {
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact energy coefficients E^(0..K) of one level
    Series {
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long, default_value_t = 6)]
        order: usize,
        #[arg(long, value_enum, default_value_t = SeriesFormat::Text)]
        format: SeriesFormat,
    },
    /// Recompute levels 0..6 through order 6 and compare with the published table
    VerifyTable {
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Borel–Padé–Laplace value of E_n(g)
    Borel {
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long, default_value_t = 60)]
        order: usize,
        /// Padé degrees; defaults to the diagonal [K/2, K/2]
        #[arg(long, num_args = 2, value_names = ["L", "M"])]
        pade: Option<Vec<usize>>,
        #[arg(long, allow_negative_numbers = true)]
        g: f64,
        /// Emit the JSON estimate record instead of a text line
        #[arg(long)]
        report: bool,
    },
    /// Lowest eigenvalues of the truncated Hamiltonian matrix
    Spectrum {
        #[arg(long, allow_negative_numbers = true)]
        g: f64,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long, default_value_t = 256)]
        dim: usize,
        /// Convergence table over a ladder of dimensions instead of one solve
        #[arg(long)]
        study: bool,
        #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
        dims: Vec<usize>,
        /// Relative tolerance for the convergence flag
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = SpectrumFormat::Csv)]
        format: SpectrumFormat,
    },
    /// Large-order fit and Borel-plane singularity estimates (JSON records)
    Asymptotics {
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long, default_value_t = 120)]
        order: usize,
        /// Fit window KMIN:KMAX; defaults to 20:ORDER
        #[arg(long)]
        window: Option<String>,
        /// Coefficients used for the singularity estimates; defaults to min(ORDER, 60)
        #[arg(long)]
        singularity_order: Option<usize>,
    },
    /// Husimi function of a state on a square grid (CSV)
    Husimi {
        /// coherent:<complex> or basis:<n>
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long, default_value_t = 6.0)]
        extent: f64,
    },
    /// Trans-series energy with instanton corrections (JSON)
    Transseries {
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long, default_value_t = 1)]
        lmax: usize,
        #[arg(long, allow_negative_numbers = true)]
        g: f64,
        /// Stokes constant, e.g. 1 or 0.5-0.2i; 0 keeps only the perturbative part
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        sigma: String,
        /// Instanton action; defaults to the measured |ξ_c| of the level
        #[arg(long)]
        action: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        /// Use the Borel–Padé–Laplace value (order 60) as the perturbative part
        #[arg(long)]
        resummed: bool,
    },
    /// Segal–Bargmann transform of a Hermite function at sample points (CSV)
    Sbtransform {
        #[arg(long)]
        index: usize,
        /// Sample point; repeatable
        #[arg(long = "z", default_values = ["0", "1", "0.5+0.5i", "-1-0.25i"], allow_hyphen_values = true)]
        points: Vec<String>,
    },
    /// Toeplitz matrix elements of a symbol (JSON)
    Toeplitz {
        /// z, conj-z, abs-z-squared or coherent:<re>[,<im>]
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = 6)]
        size: usize,
        #[arg(long, default_value = "normalized")]
        measure: String,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
    #[error("cache error: {0}")]
    Cache(#[from] CacheError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Failure(_) => 1,
            Self::Usage(_) => 2,
            Self::Cache(_) | Self::Io(_) => 3,
        }
    }
}

impl From<BorelError> for CliError {
    fn from(e: BorelError) -> Self {
        match e {
            BorelError::InsufficientOrder { .. } | BorelError::InvalidCoupling(_) | BorelError::InvalidWindow { .. } => {
                Self::Usage(e.to_string())
            }
            _ => Self::Failure(e.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::ConvergenceFailure { .. } => Self::Failure(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<CoherentError> for CliError {
    fn from(e: CoherentError) -> Self {
        match e {
            CoherentError::InvalidParameter(_)
            | CoherentError::UnknownSymbol(_)
            | CoherentError::UnknownMeasure(_)
            | CoherentError::NotNormalized { .. } => Self::Usage(e.to_string()),
            _ => Self::Failure(e.to_string()),
        }
    }
}

type Out = Result<String, CliError>;

fn require_positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {v}")))
    }
}

fn cmd_series(cache: Option<&Cache>, level: usize, order: usize, fmt: SeriesFormat) -> Out {
    let s = cache::energies(cache, level, order)?;
    Ok(match fmt {
        SeriesFormat::Text => s.coeffs.iter().map(|c| format_rational(c) + "\n").collect(),
        SeriesFormat::Csv => series_csv(&s),
        SeriesFormat::Json => series_json(&s),
        SeriesFormat::Latex => series_latex(&s),
    })
}

/// Always recomputes; the cache is never consulted so a damaged cache
/// cannot affect the verdict.
fn cmd_verify_table(inject_fault: bool) -> Out {
    let mut series: Vec<_> = (0..=6).map(|n| rs_recursion_capped(n, 6, 0).0).collect();
    if inject_fault {
        series[0].coeffs[2] += BigRational::one();
    }
    let report = verify_table(&series).map_err(|e| CliError::Failure(e.to_string()))?;
    let mut out = String::new();
    for c in &report.cells {
        let verdict = if c.matches { "PASS" } else { "FAIL" };
        out.push_str(&format!("n={} k={} {verdict} {}", c.level, c.order, format_rational(&c.got)));
        if !c.matches {
            out.push_str(&format!(" expected {}", format_rational(&c.expected)));
        }
        out.push('\n');
    }
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    out.push_str(&format!("{}/{} {verdict}\n", report.matched(), report.cells.len()));
    if report.passed() {
        Ok(out)
    } else {
        // the table is still printed before the failing exit
        print!("{out}");
        let first = report.mismatches().next().expect("failed report has a mismatch");
        Err(CliError::Failure(format!(
            "{} of {} cells differ; first at n={} k={}",
            report.cells.len() - report.matched(),
            report.cells.len(),
            first.level,
            first.order
        )))
    }
}

fn cmd_borel(cache: Option<&Cache>, level: usize, order: usize, pade: Option<Vec<usize>>, g: f64, report: bool) -> Out {
    require_positive("g", g)?;
    let (l, m) = match pade.as_deref() {
        Some([l, m]) => (*l, *m),
        _ => (order - order / 2, order / 2),
    };
    if l + m > order {
        return Err(CliError::Usage(format!("[{l}/{m}] needs order {} but --order is {order}", l + m)));
    }
    let s = cache::energies(cache, level, order)?;
    let r = resum(&s, g, l, m)?;
    Ok(if report {
        records_to_json(&[EstimateRecord::from(&r)])
    } else {
        format!(
            "level={} g={} value={} error={} pade=[{}/{}]\n",
            level,
            fmt_f64(g),
            fmt_f64(r.value),
            fmt_f64(r.error_estimate),
            r.l,
            r.m
        )
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_spectrum(g: f64, levels: usize, dim: usize, study: bool, dims: &[usize], tol: f64, fmt: SpectrumFormat) -> Out {
    if study {
        let t = convergence_study(g, levels, dims, tol)?;
        let mut out = String::from("g,level,N,eigenvalue,delta,converged\n");
        for row in &t.levels {
            for (i, (n, e)) in row.values.iter().enumerate() {
                let delta = if i == 0 { String::new() } else { fmt_f64(row.deltas[i - 1]) };
                let conv = if i + 1 == row.values.len() { row.converged.to_string() } else { String::new() };
                out.push_str(&format!("{},{},{n},{},{delta},{conv}\n", fmt_f64(g), row.level, fmt_f64(*e)));
            }
        }
        return Ok(out);
    }
    let res = eigenvalues(&build_matrix(g, dim)?, levels)?;
    Ok(match fmt {
        SpectrumFormat::Csv => res.to_csv(),
        SpectrumFormat::Text => {
            let v: Vec<String> = res.eigenvalues.iter().map(|e| e.to_string()).collect();
            v.join(" ") + "\n"
        }
    })
}

fn parse_window(w: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("--window expects KMIN:KMAX, got {w:?}"));
    let (a, b) = w.split_once(':').ok_or_else(bad)?;
    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

fn cmd_asymptotics(
    cache: Option<&Cache>,
    level: usize,
    order: usize,
    window: Option<&str>,
    singularity_order: Option<usize>,
) -> Out {
    if order + 1 < MIN_SINGULARITY_COEFFS {
        return Err(BorelError::InsufficientOrder { needed: MIN_SINGULARITY_COEFFS, available: order + 1 }.into());
    }
    let (k_min, k_max) = match window {
        Some(w) => parse_window(w)?,
        None => (DEFAULT_FIT_KMIN, order),
    };
    if k_max > order {
        return Err(BorelError::InsufficientOrder { needed: k_max + 1, available: order + 1 }.into());
    }
    let sing_order = singularity_order.unwrap_or(order.min(60));
    if sing_order > order {
        return Err(CliError::Usage(format!("--singularity-order {sing_order} exceeds --order {order}")));
    }
    let fit_window_ok = k_max >= k_min + 8;
    if !fit_window_ok {
        return Err(BorelError::InvalidWindow { k_min, k_max }.into());
    }
    let s = cache::energies(cache, level, order)?;
    let b = borel_transform(&s.truncated(sing_order));
    let pade = singularity_estimate(&b, SingularityMethod::PadePole)?;
    let ratio = singularity_estimate(&b, SingularityMethod::RatioTest)?;
    let consensus = singularity_consensus(&b)?;
    let fit = fit_large_order(&s, k_min, k_max)?;
    let mut records = vec![EstimateRecord::from(&pade), EstimateRecord::from(&ratio), EstimateRecord::from(&consensus)];
    records.extend(fit_records(&fit));
    eprintln!(
        "note: measured xi_c = {:.6}; the published -4/3 corresponds to the coupling rescaled by 4 and is not used",
        consensus.location
    );
    if fit.degenerate {
        eprintln!("warning: coefficients show no factorial growth in the window; fit parameters are meaningless");
    }
    Ok(records_to_json(&records))
}

fn parse_state(s: &str) -> Result<HoloPoly, CliError> {
    if let Some(rest) = s.strip_prefix("coherent:") {
        let a = parse_complex(rest).map_err(CliError::Usage)?;
        return Ok(HoloPoly::coherent(a)?);
    }
    if let Some(rest) = s.strip_prefix("basis:") {
        let n: usize = rest.parse().map_err(|_| CliError::Usage(format!("bad basis index {rest:?}")))?;
        return Ok(HoloPoly::basis(n));
    }
    Err(CliError::Usage(format!("--state expects coherent:<complex> or basis:<n>, got {s:?}")))
}

fn cmd_husimi(state: &str, grid: usize, extent: f64) -> Out {
    require_positive("extent", extent)?;
    if grid == 0 {
        return Err(CliError::Usage("--grid must be at least 1".into()));
    }
    let f = parse_state(state)?;
    let g = husimi_grid(&f, (-extent, extent), (-extent, extent), grid, grid)?;
    Ok(g.to_csv())
}

#[allow(clippy::too_many_arguments)]
fn cmd_transseries(
    cache: Option<&Cache>,
    level: usize,
    lmax: usize,
    g: f64,
    sigma: &str,
    action: Option<f64>,
    theta: f64,
    resummed: bool,
) -> Out {
    require_positive("g", g)?;
    let sigma = parse_complex(sigma).map_err(CliError::Usage)?;
    if let Some(a) = action {
        require_positive("action", a)?;
    }
    let needs_series = resummed || (lmax > 0 && action.is_none());
    let series = if needs_series { Some(cache::energies(cache, level, 60)?) } else { None };
    let action = match (action, &series) {
        (Some(a), _) => Some(a),
        (None, Some(s)) if lmax > 0 => Some(singularity_consensus(&borel_transform(s))?.location.abs()),
        _ => None,
    };
    let phi0 = match (&series, resummed) {
        (Some(s), true) => Some(resum(s, g, 30, 30)?.value),
        _ => None,
    };
    // the action does not enter at lmax = 0
    let p = InstantonParams::new(action.unwrap_or(1.0), g, theta)?;
    let tp = TransSeriesParams { sigma, lmax, level };
    let r = transseries_energy(&tp, &p, phi0)?;
    let list = |v: &[Complex64]| v.iter().map(|z| complex_json(*z)).collect::<Vec<_>>().join(",");
    Ok(format!(
        "{{\"level\":{level},\"g\":{},\"lmax\":{lmax},\"sigma\":{},\"action\":{},\"theta\":{},\"perturbative\":{},\"value\":{},\"ratios\":[{}],\"corrections\":[{}]}}\n",
        json_f64(g),
        complex_json(sigma),
        action.map_or("null".to_string(), json_f64),
        json_f64(theta),
        if resummed { "\"borel-pade-laplace\"" } else { "\"rayleigh-quotient\"" },
        complex_json(r.value),
        list(&r.ratios),
        list(&r.corrections)
    ))
}

fn cmd_sbtransform(index: usize, points: &[String]) -> Out {
    if index > SB_MAX_INDEX {
        return Err(CliError::Usage(format!("--index must be at most {SB_MAX_INDEX}")));
    }
    let phi = HoloPoly::basis(index);
    let mut out = String::from("re_z,im_z,re,im,abs_error\n");
    for p in points {
        let z = parse_complex(p).map_err(CliError::Usage)?;
        let v = sb_transform(index, z)?;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(z.re),
            fmt_f64(z.im),
            fmt_f64(v.re),
            fmt_f64(v.im),
            fmt_f64((v - phi.eval(z)).norm())
        ));
    }
    Ok(out)
}

fn cmd_toeplitz(symbol: &str, size: usize, measure: &str) -> Out {
    let spec = ToeplitzSpec { symbol: symbol.parse::<Symbol>()?, measure: measure.parse::<Measure>()? };
    if size == 0 {
        return Err(CliError::Usage("--size must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(size * size);
    for m in 0..size {
        for n in 0..size {
            rows.push(format!("  {}", toeplitz_element(&spec, m, n)?.to_json()));
        }
    }
    Ok(format!("[\n{}\n]\n", rows.join(",\n")))
}

fn run(cli: Cli) -> Out {
    let cache = cache::resolve_dir(cli.cache.as_deref()).map(Cache::new);
    let cache = cache.as_ref();
    match cli.command {
        Command::Series { level, order, format } => cmd_series(cache, level, order, format),
        Command::VerifyTable { inject_fault } => cmd_verify_table(inject_fault),
        Command::Borel { level, order, pade, g, report } => cmd_borel(cache, level, order, pade, g, report),
        Command::Spectrum { g, levels, dim, study, dims, tol, format } => {
            cmd_spectrum(g, levels, dim, study, &dims, tol, format)
        }
        Command::Asymptotics { level, order, window, singularity_order } => {
            cmd_asymptotics(cache, level, order, window.as_deref(), singularity_order)
        }
        Command::Husimi { state, grid, extent } => cmd_husimi(&state, grid, extent),
        Command::Transseries { level, lmax, g, sigma, action, theta, resummed } => {
            cmd_transseries(cache, level, lmax, g, &sigma, action, theta, resummed)
        }
        Command::Sbtransform { index, points } => cmd_sbtransform(index, &points),
        Command::Toeplitz { symbol, size, measure } => cmd_toeplitz(&symbol, size, &measure),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if let Err(e) = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()) {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("resosc: i/o error: {e}");
                    return ExitCode::from(3);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("resosc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
