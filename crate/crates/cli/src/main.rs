//! `plastic`: command-line front end for the plastic-tiling diffraction library.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;
use serde_json::json;

use plastic_core::algebra::{constants, wave_number, Miller};
use plastic_core::cocycle::{self, PeakQuery, Weights, DEFAULT_KSTAR_MAX, DEFAULT_TOL};
use plastic_core::error::{AlgebraError, CocycleError, Error};
use plastic_core::finite;
use plastic_core::inflation::{densities, pf_data, Letter, Patch};
use plastic_core::windows::{self, Duplicates, GridBox};

const EXIT_USAGE: u8 = 1;
const EXIT_NONCONVERGENCE: u8 = 2;
const EXIT_RESOURCES: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "plastic", version, about = "Diffraction of the plastic-number inflation tiling")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the constants of the tiling.
    Info {
        /// Also write the report as JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List Bragg peaks with their amplitudes and intensities.
    Peaks {
        #[arg(long, default_value_t = 2.5)]
        kmax: f64,
        #[arg(long, default_value_t = DEFAULT_KSTAR_MAX)]
        kstar_max: f64,
        #[arg(long, default_value_t = 1e-6)]
        imin: f64,
        /// Three reals or three re,im pairs.
        #[arg(long, default_value = "1,1,1", allow_hyphen_values = true)]
        weights: Weights,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Finite-patch intensity I_m(k) on an evenly spaced k grid.
    FiniteScan {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value = "a")]
        seed: Letter,
        #[arg(long, allow_hyphen_values = true)]
        k_from: f64,
        #[arg(long, allow_hyphen_values = true)]
        k_to: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value = "1,1,1", allow_hyphen_values = true)]
        weights: Weights,
        #[arg(long)]
        out: PathBuf,
    },
    /// Distance between finite-patch amplitudes and the exact amplitude.
    PeakCompare {
        /// Miller indices, e.g. 1,2,2.
        #[arg(long, allow_hyphen_values = true)]
        miller: Miller,
        /// Comma-separated inflation depths.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        m_list: Vec<u32>,
        #[arg(long, default_value = "a")]
        seed: Letter,
        #[arg(long, default_value = "1,1,1", allow_hyphen_values = true)]
        weights: Weights,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Point clouds approximating the windows.
    Window {
        #[arg(long)]
        depth: u32,
        #[arg(long, value_enum, default_value_t = LetterChoice::All)]
        letter: LetterChoice,
        /// Cell size for the logged box-count volumes.
        #[arg(long, default_value_t = 0.01)]
        cell: f64,
        /// Drop coinciding points reached by different IFS branches.
        #[arg(long)]
        dedup: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Window Fourier transform on a grid: CSV plus magnitude and argument graymaps.
    FtGrid {
        #[arg(long, default_value = "b")]
        letter: Letter,
        /// xmin,xmax,ymin,ymax
        #[arg(long = "box", default_value = "-4,4,-4,4", allow_hyphen_values = true)]
        region: BoxArg,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out_prefix: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum LetterChoice {
    A,
    B,
    C,
    All,
}

#[derive(Clone, Copy, Debug, Serialize)]
struct BoxArg([f64; 4]);

impl std::str::FromStr for BoxArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
            .collect::<Result<_, _>>()?;
        let [x0, x1, y0, y1] = v[..] else {
            return Err(format!("expected xmin,xmax,ymin,ymax, got {s:?}"));
        };
        if !(x0 < x1 && y0 < y1) {
            return Err(format!("box needs min < max on both axes, got {s:?}"));
        }
        Ok(BoxArg([x0, x1, y0, y1]))
    }
}

/// A failed run: exit code plus message.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidArgument(_) | Error::Algebra(AlgebraError::Parse(_)) => EXIT_USAGE,
            Error::Cocycle(CocycleError::NotConverged { .. }) => EXIT_NONCONVERGENCE,
            Error::Cocycle(_) => EXIT_USAGE,
            Error::ResourceExhausted(_) | Error::Algebra(AlgebraError::Overflow) => EXIT_RESOURCES,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => EXIT_USAGE,
        };
        Failure(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::from(Error::from(e))
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| usage(format!("cannot create {}: {e}", path.display())))
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn write_meta(out: &Path, command: &str, parameters: serde_json::Value, extra: serde_json::Value) -> Result<(), Failure> {
    let meta = json!({
        "command": command,
        "version": plastic_core::VERSION,
        "parameters": parameters,
        "constants": constants(),
        "results": extra,
    });
    let mut w = create(&sidecar_path(out))?;
    serde_json::to_writer_pretty(&mut w, &meta).map_err(Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn positive(name: &str, x: f64) -> Result<(), Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be positive, got {x}")))
    }
}

fn info_report() -> serde_json::Value {
    let pf = pf_data();
    json!({
        "constants": constants(),
        "v": pf.v,
        "u": pf.u,
        "densities": densities(),
        "exact_volumes": windows::exact_volumes(),
        "module_generator": "(5 - 6β + 4β²)/23",
    })
}

fn run_info(out: Option<PathBuf>) -> Result<(), Failure> {
    let c = constants();
    let pf = pf_data();
    let vol = windows::exact_volumes();
    let mut s = String::new();
    s += &format!("beta             = {:.17}  (real root of x^3 = x + 1)\n", c.beta);
    s += &format!("alpha            = {:.17} {:+.17}i\n", c.alpha_re, c.alpha_im);
    s += &format!("alpha^2          = {:.17} {:+.17}i\n", c.alpha2_re, c.alpha2_im);
    s += &format!("mean spacing     = {:.17}\n", c.mean_spacing);
    s += &format!("dens(Lambda)     = {:.17}  (3 + β + 7β²)/23\n", c.point_density);
    s += &format!("dens(L) = 2/√23  = {:.17}\n", c.lattice_density);
    s += &format!("v                = ({:.17}, {:.17}, {:.17})\n", pf.v[0], pf.v[1], pf.v[2]);
    s += &format!("u                = ({:.17}, {:.17}, {:.17})\n", pf.u[0], pf.u[1], pf.u[2]);
    s += &format!("vol(W_a,W_b,W_c) = ({:.17}, {:.17}, {:.17})\n", vol[0], vol[1], vol[2]);
    s += &format!("module generator = {:.17}  (5 − 6β + 4β²)/23\n", c.module_generator);
    print!("{s}");
    if let Some(path) = out {
        let mut w = create(&path)?;
        serde_json::to_writer_pretty(&mut w, &info_report()).map_err(Error::from)?;
        writeln!(w)?;
        w.flush()?;
        write_meta(&path, "info", json!({}), json!(null))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Info { out } => run_info(out),
        Command::Peaks { kmax, kstar_max, imin, weights, tol, out, format } => {
            if !(kmax >= 0.0) {
                return Err(usage(format!("--kmax must be ≥ 0, got {kmax}")));
            }
            positive("kstar-max", kstar_max)?;
            positive("tol", tol)?;
            if !(imin >= 0.0) {
                return Err(usage(format!("--imin must be ≥ 0, got {imin}")));
            }
            let query = PeakQuery { kmax, kstar_max, imin, weights, tol };
            let peaks = cocycle::peak_list(&query)?;
            info!("{} peaks written to {}", peaks.len(), out.display());
            let mut w = create(&out)?;
            match format {
                Format::Csv => cocycle::write_peaks_csv(&peaks, &mut w)?,
                Format::Json => cocycle::write_peaks_json(&peaks, &mut w)?,
            }
            w.flush()?;
            write_meta(&out, "peaks", json!({ "query": query, "format": format }), json!({ "peaks": peaks.len() }))
        }
        Command::FiniteScan { m, seed, k_from, k_to, samples, weights, out } => {
            if !(k_from < k_to) {
                return Err(usage(format!("--k-from must be below --k-to, got {k_from} and {k_to}")));
            }
            if samples < 2 {
                return Err(usage(format!("--samples must be at least 2, got {samples}")));
            }
            let patch = Patch::generate(m, seed)?;
            info!("patch rho^{m}({seed}) has {} points, length {}", patch.len(), patch.length);
            let scan = finite::intensity_scan_patch(&patch, k_from, k_to, samples, &weights)?;
            let mut w = create(&out)?;
            finite::write_scan_csv(&scan, &mut w)?;
            w.flush()?;
            write_meta(
                &out,
                "finite-scan",
                json!({ "m": m, "seed": seed, "k_from": k_from, "k_to": k_to, "samples": samples, "weights": weights }),
                json!({ "points": patch.len(), "length": patch.length }),
            )
        }
        Command::PeakCompare { miller, m_list, seed, weights, tol, out } => {
            if m_list.is_empty() {
                return Err(usage("--m-list needs at least one depth"));
            }
            positive("tol", tol)?;
            let rows = finite::peak_compare(miller, seed, &m_list, &weights, tol)?;
            for r in &rows {
                info!("m = {:3}  points = {:10}  distance = {:.6e}", r.m, r.points, r.distance);
            }
            let mut w = create(&out)?;
            finite::write_convergence_csv(&rows, &mut w)?;
            w.flush()?;
            write_meta(
                &out,
                "peak-compare",
                json!({ "miller": miller, "m_list": m_list, "seed": seed, "weights": weights, "tol": tol }),
                json!({ "k": wave_number(miller).k }),
            )
        }
        Command::Window { depth, letter, cell, dedup, out } => {
            positive("cell", cell)?;
            let duplicates = if dedup { Duplicates::Remove } else { Duplicates::Keep };
            let clouds = windows::iterate_ifs_with(depth, duplicates)?;
            let est = windows::estimate_volumes(&clouds, cell)?;
            let exact = windows::exact_volumes();
            for l in Letter::ALL {
                let i = l.index();
                info!(
                    "W_{l}: {} points, box-count volume {:.6} (exact {:.6}, {:+.2}%)",
                    clouds[i].len(),
                    est.volumes[i],
                    exact[i],
                    100.0 * (est.volumes[i] / exact[i] - 1.0)
                );
            }
            let selected: Vec<_> = match letter {
                LetterChoice::All => clouds.to_vec(),
                LetterChoice::A => vec![clouds[0].clone()],
                LetterChoice::B => vec![clouds[1].clone()],
                LetterChoice::C => vec![clouds[2].clone()],
            };
            let mut w = create(&out)?;
            windows::write_cloud_csv(&selected, &mut w)?;
            w.flush()?;
            write_meta(
                &out,
                "window",
                json!({ "depth": depth, "letter": letter, "cell": cell, "duplicates": duplicates }),
                json!({ "box_count": est }),
            )
        }
        Command::FtGrid { letter, region, samples, tol, out_prefix } => {
            if samples < 2 {
                return Err(usage(format!("--samples must be at least 2, got {samples}")));
            }
            positive("tol", tol)?;
            let [x0, x1, y0, y1] = region.0;
            let grid = windows::ft_grid(GridBox::new([x0, y0], [x1, y1])?, samples, letter, tol)?;
            if !grid.failed.is_empty() {
                warn!("{} grid nodes did not converge", grid.failed.len());
            }
            let prefix = out_prefix.as_os_str().to_owned();
            let with = |suffix: &str| {
                let mut p = prefix.clone();
                p.push(suffix);
                PathBuf::from(p)
            };
            let csv_path = with(".csv");
            let mut w = create(&csv_path)?;
            windows::write_grid_csv(&grid, &mut w)?;
            w.flush()?;
            let mut w = create(&with("_abs.pgm"))?;
            windows::write_magnitude_pgm(&grid, &mut w)?;
            w.flush()?;
            let mut w = create(&with("_arg.pgm"))?;
            windows::write_argument_pgm(&grid, &mut w)?;
            w.flush()?;
            write_meta(
                &csv_path,
                "ft-grid",
                json!({ "letter": letter, "box": region, "samples": samples, "tol": tol }),
                json!({ "max_abs": grid.max_abs(), "failed_nodes": grid.failed }),
            )
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set up thread pool: {e}");
            return ExitCode::from(EXIT_RESOURCES);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
