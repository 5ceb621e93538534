use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tpump::config::{RunConfig, SchedulePreset};
use tpump::design::{build_layout, calibrate, GridSpec, IndexProfile};
use tpump::io;
use tpump::numeric::parse_range;
use tpump::propagate::{run_pump, InjectionSite, RunOptions};
use tpump::registry::{first_chern_methods, pump_models, second_chern_methods};
use tpump::spectral::{find_gaps, phase_path, scan_bands, PathPreset, ScanOptions};
use tpump::topology::{chain_bloch, GapChoice, GridAxis, ParamGrid};
use tpump::{Axis, Error, Result};

#[derive(Parser)]
#[command(name = "tpump", version, about = "Two-dimensional topological pumps in waveguide lattices")]
struct Cli {
    /// Worker threads (default: all cores). TPUMP_THREADS takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the coupling law t(s) = A·exp(−γs) from two-waveguide supermodes.
    Calibrate(CalibrateArgs),
    /// Waveguide positions along z realising the configured pump.
    Design(DesignArgs),
    /// Spectrum of the finite lattice along a pump-phase path.
    Bands(BandsArgs),
    /// First Chern number of a band of one pump axis.
    Chern1(Chern1Args),
    /// Second Chern number of a gap of the two-dimensional pump.
    Chern2(Chern2Args),
    /// Propagate light injected at one waveguide through the pump.
    Pump(PumpArgs),
}

#[derive(Args)]
struct ConfigArg {
    /// Run configuration (JSON); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ConfigArg {
    fn load(&self) -> Result<RunConfig> {
        match &self.config {
            Some(p) => RunConfig::load(p),
            None => {
                let cfg = RunConfig::default();
                cfg.validate()?;
                Ok(cfg)
            }
        }
    }
}

/// `start:stop:step`, both ends included.
#[derive(Debug, Clone)]
struct Range(Vec<f64>);

impl FromStr for Range {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_range(s).map(Range)
    }
}

#[derive(Args)]
struct CalibrateArgs {
    /// Index profile (JSON); the reference profile when omitted.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Separations in µm, `start:stop:step`.
    #[arg(long, default_value = "10:24:2")]
    seps: Range,
    /// Wavelengths in nm, `start:stop:step`.
    #[arg(long, default_value = "1510:1590:5")]
    wavelengths: Range,
    /// Finite-difference cell size, µm.
    #[arg(long, default_value_t = GridSpec::default().spacing)]
    grid_spacing: f64,
    /// Side of the square simulation window, µm.
    #[arg(long, default_value_t = GridSpec::default().extent)]
    extent: f64,
    /// Skip the half-spacing cross-check.
    #[arg(long)]
    no_refine: bool,
    /// Per-wavelength fit quality and raw samples (JSON).
    #[arg(long)]
    diagnostics: Option<PathBuf>,
    #[arg(long, default_value = "law.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct DesignArgs {
    #[command(flatten)]
    config: ConfigArg,
    /// Coupling law CSV; overrides the config.
    #[arg(long)]
    law: Option<PathBuf>,
    /// Number of z samples.
    #[arg(long, default_value_t = 151)]
    z_samples: usize,
    /// Layout CSV; defaults to the config's `layout`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BandsArgs {
    #[command(flatten)]
    config: ConfigArg,
    /// diag (φx = φy), x-only or y-only, over [0, 2π).
    #[arg(long, default_value = "diag")]
    path: PathPreset,
    #[arg(long, default_value_t = 201)]
    samples: usize,
    /// Phase of the axis held fixed by x-only / y-only.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    fixed_phase: f64,
    /// Wavelength for dispersive models, nm; the design wavelength by default.
    #[arg(long)]
    wavelength: Option<f64>,
    /// Bulk gaps along the path (JSON).
    #[arg(long)]
    gaps: Option<PathBuf>,
    /// Smallest bulk gap reported, cm⁻¹.
    #[arg(long, default_value_t = 1e-3)]
    gap_resolution: f64,
    #[arg(long, default_value = "bands.csv")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    X,
    Y,
}

#[derive(Args)]
struct Chern1Args {
    #[command(flatten)]
    config: ConfigArg,
    /// Band index, or a comma-separated band set.
    #[arg(long, default_value = "0", value_delimiter = ',')]
    band: Vec<usize>,
    #[arg(long, value_enum, default_value = "x")]
    axis: AxisArg,
    /// Points per direction of the (φ, k) torus.
    #[arg(long, default_value_t = 48)]
    grid: usize,
    /// fhs or curvature.
    #[arg(long, default_value = "fhs")]
    method: String,
    #[arg(long, default_value = "chern1.json")]
    out: PathBuf,
}

#[derive(Args)]
struct Chern2Args {
    #[command(flatten)]
    config: ConfigArg,
    #[arg(long, default_value = "lower")]
    gap: GapChoice,
    /// Points per direction of the 4-torus.
    #[arg(long, default_value_t = 12)]
    grid: usize,
    /// direct or product.
    #[arg(long, default_value = "direct")]
    method: String,
    #[arg(long, default_value = "chern2.json")]
    out: PathBuf,
}

#[derive(Args)]
struct PumpArgs {
    #[command(flatten)]
    config: ConfigArg,
    /// left-center, bottom-center, bottom-left or (x,y).
    #[arg(long, default_value = "left-center")]
    inject: InjectionSite,
    /// Replace the configured schedule: both, x-only, y-only or frozen.
    #[arg(long)]
    schedule: Option<SchedulePreset>,
    /// Device length override, cm.
    #[arg(long)]
    z_total: Option<f64>,
    /// Output facet image (PGM).
    #[arg(long, default_value = "facet.pgm")]
    out: PathBuf,
    /// Occupation metrics (JSON).
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Averaged output intensities (CSV).
    #[arg(long)]
    intensity: Option<PathBuf>,
}

fn thread_count(flag: Option<usize>) -> std::result::Result<Option<usize>, String> {
    match std::env::var("TPUMP_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("TPUMP_THREADS must be a positive integer, got {v:?}")),
        },
        Err(_) => match flag {
            Some(0) => Err("--threads must be positive".into()),
            other => Ok(other),
        },
    }
}

fn calibrate_cmd(a: &CalibrateArgs) -> Result<()> {
    let profile = match &a.profile {
        Some(p) => io::read_json_file::<IndexProfile>(p)?,
        None => IndexProfile::default(),
    };
    let grid = GridSpec {
        extent: a.extent,
        spacing: a.grid_spacing,
    };
    let cal = calibrate(&profile, &a.seps.0, &a.wavelengths.0, grid, !a.no_refine)?;
    io::write_law_file(&a.out, &cal.law)?;
    if let Some(d) = &a.diagnostics {
        io::write_json_file(d, &cal)?;
    }
    let worst = cal.diagnostics.iter().map(|d| d.r_squared).fold(1.0, f64::min);
    println!(
        "wrote {} ({} wavelengths, min R² {worst:.6})",
        a.out.display(),
        cal.law.rows().len()
    );
    Ok(())
}

fn design_cmd(a: &DesignArgs) -> Result<()> {
    let cfg = a.config.load()?;
    let law = match &a.law {
        Some(p) => io::read_law_file(p)?,
        None => cfg
            .read_law()?
            .ok_or_else(|| Error::Config("design needs a coupling law (--law or config `law`)".into()))?,
    };
    let out = a
        .out
        .clone()
        .or_else(|| cfg.layout.clone())
        .unwrap_or_else(|| cfg.output_path("layout.csv"));
    let layout = build_layout(
        &cfg.lattice,
        &law,
        cfg.design_wavelength_nm,
        &cfg.schedule(),
        a.z_samples,
        cfg.min_spacing_um,
    )?;
    io::write_layout_file(&out, &layout)?;
    println!(
        "wrote {} ({} waveguides × {} z samples, min spacing {:.3} um)",
        out.display(),
        layout.num_waveguides(),
        layout.z_samples().len(),
        (0..layout.z_samples().len()).map(|z| layout.min_distance_at(z)).fold(f64::INFINITY, f64::min)
    );
    Ok(())
}

fn bands_cmd(a: &BandsArgs) -> Result<()> {
    let cfg = a.config.load()?;
    if a.samples == 0 {
        return Err(Error::InvalidSpec("bands needs at least one sample".into()));
    }
    let model = pump_models().create(&cfg.model, &cfg.model_context()?)?;
    let wavelength = a.wavelength.unwrap_or(cfg.design_wavelength_nm);
    let path = phase_path(a.path, a.samples, a.fixed_phase);
    let options = ScanOptions {
        keep_vectors: false,
        classify: Some((cfg.lattice.clone(), cfg.region)),
    };
    let scan = scan_bands(|p| model.hamiltonian(p, wavelength), &path, &options)?;
    io::write_bands_file(&a.out, &scan)?;
    let gaps = find_gaps(&scan, a.gap_resolution);
    if let Some(g) = &a.gaps {
        io::write_json_file(g, &gaps)?;
    }
    let global = gaps.iter().filter(|g| g.global).count();
    println!(
        "wrote {} ({} samples × {} states, {global} bulk gaps open along the path)",
        a.out.display(),
        scan.num_samples(),
        scan.num_states()
    );
    Ok(())
}

fn chern1_cmd(a: &Chern1Args) -> Result<()> {
    let cfg = a.config.load()?;
    let method = first_chern_methods().create(&a.method, &())?;
    let (axis, grid) = match a.axis {
        AxisArg::X => (Axis::X, ParamGrid::square(GridAxis::PhiX, GridAxis::Kx, a.grid)?),
        AxisArg::Y => (Axis::Y, ParamGrid::square(GridAxis::PhiY, GridAxis::Ky, a.grid)?),
    };
    let (_, q) = cfg.lattice.frequency(axis).as_fraction()?;
    if let Some(&b) = a.band.iter().find(|&&b| b >= q as usize) {
        return Err(Error::OutOfRange(format!("band {b} of a {q}-band chain")));
    }
    let bloch = chain_bloch(&cfg.lattice, axis);
    let report = method.compute(&bloch, &a.band, &grid)?;
    io::write_json_file(&a.out, &report)?;
    println!("{} band {}: {} (raw {:.6})", report.quantity, report.band_or_gap, report.value, report.raw);
    Ok(())
}

fn chern2_cmd(a: &Chern2Args) -> Result<()> {
    let cfg = a.config.load()?;
    let method = second_chern_methods().create(&a.method, &())?;
    let report = method.compute(&cfg.lattice, a.gap, a.grid)?;
    io::write_json_file(&a.out, &report)?;
    println!("{} {} gap: {} (raw {:.6})", report.quantity, report.band_or_gap, report.value, report.raw);
    Ok(())
}

fn pump_cmd(a: &PumpArgs) -> Result<()> {
    let cfg = a.config.load()?;
    let mut schedule = match a.schedule {
        Some(p) => p.schedule(cfg.schedule().z_total),
        None => cfg.schedule(),
    };
    if let Some(z) = a.z_total {
        schedule = schedule.with_length(z);
    }
    let model = pump_models().create(&cfg.model, &cfg.model_context()?)?;
    let options = RunOptions {
        steps: cfg.steps,
        snapshot_every: None,
        region: cfg.region,
    };
    let result = run_pump(model.as_ref(), &schedule, a.inject, &cfg.wavelengths, options)?;
    let (nx, ny) = (result.size_x, result.size_y);
    io::write_pgm_file(&a.out, &result.intensity, nx, ny)?;
    if let Some(p) = &a.intensity {
        io::write_intensity_file(p, &result.intensity, nx, ny)?;
    }
    if let Some(p) = &a.metrics {
        let report = json!({
            "model": model.name(),
            "injection": a.inject.to_string(),
            "schedule": schedule,
            "wavelengths_nm": cfg.wavelengths,
            "steps": result.runs.iter().map(|r| r.evolution.steps).max(),
            "max_norm_drift": result.max_norm_drift(),
            "dominant_corner": result.metrics.dominant_corner(),
            "metrics": result.metrics,
        });
        io::write_json_file(p, &report)?;
    }
    let w = &result.metrics.weights;
    println!(
        "wrote {}: left {:.3} right {:.3} bottom {:.3} top {:.3} | BL {:.3} BR {:.3} TL {:.3} TR {:.3}",
        a.out.display(),
        w.left,
        w.right,
        w.bottom,
        w.top,
        w.bl,
        w.br,
        w.tl,
        w.tr
    );
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Calibrate(a) => calibrate_cmd(a),
        Command::Design(a) => design_cmd(a),
        Command::Bands(a) => bands_cmd(a),
        Command::Chern1(a) => chern1_cmd(a),
        Command::Chern2(a) => chern2_cmd(a),
        Command::Pump(a) => pump_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match thread_count(cli.threads) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
        Ok(None) => {}
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn ranges_parse() {
        let cli = Cli::try_parse_from(["tpump", "calibrate", "--seps", "10:24:2"]).unwrap();
        match cli.command {
            Command::Calibrate(a) => assert_eq!(a.seps.0.len(), 8),
            _ => unreachable!(),
        }
        assert!(Cli::try_parse_from(["tpump", "calibrate", "--seps", "10:24:3"]).is_err());
    }
}
