use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use trt_core::geometry::{CoordAxis, SymTensorField3, VoxelGrid3};
use trt_core::io::{self, FieldData, SliceFormat};
use trt_core::metrics::{compare_components, compare_fields, compare_vector_fields, FieldComparison};
use trt_core::phantoms::{
    default_null1_generator, default_null2_generator, one_axis_null_field, sharp_phantom, smooth_phantom,
    two_axis_null_field, GaussianDisplacement,
};
use trt_core::projector::{simulate_acquisition, AcquisitionConfig};
use trt_core::reconstruct::{
    alternative_diagonals, consistency_residual, recover_diagonals_fbp, reconstruct_three_axis,
    reconstruct_two_axis_potential, ReconstructionOptions,
};

/// Transverse ray transform tomography of symmetric tensor fields.
#[derive(Parser, Debug)]
#[command(name = "trt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a phantom field.
    Phantom {
        #[arg(long, value_enum)]
        kind: PhantomKind,
        /// Voxels per edge.
        #[arg(long)]
        n: usize,
        /// Half-width of the cubic domain.
        #[arg(long, default_value_t = 1.0)]
        extent: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate TRT data of a tensor field.
    Simulate {
        #[arg(long)]
        field: PathBuf,
        /// Rotation axes, e.g. `e1,e2,e3`.
        #[arg(long, value_delimiter = ',', default_value = "e1,e2,e3")]
        axes: Vec<AxisArg>,
        #[arg(long)]
        angles: usize,
        /// Noise standard deviation in percent of the largest measurement.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Detector binning factor.
        #[arg(long, default_value_t = 1)]
        bin: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct a tensor field from TRT data.
    Reconstruct {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::ThreeAxis)]
        mode: Mode,
        /// Half-width of the object domain; the detector pitch is
        /// `2 extent / rows`.
        #[arg(long, default_value_t = 1.0)]
        extent: f64,
        #[arg(long)]
        out: PathBuf,
        /// Displacement output of `two-axis-potential`.
        #[arg(long)]
        u_out: Option<PathBuf>,
    },
    /// Compare two fields of the same kind.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// JSON report destination.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Export one plane of one component as PGM or CSV.
    ExportSlice {
        #[arg(long)]
        field: PathBuf,
        /// Component index (tensor order 11, 12, 13, 22, 23, 33).
        #[arg(long, default_value_t = 0)]
        component: usize,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long)]
        index: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Pgm)]
        format: FormatArg,
        /// Grey-level window; defaults to the slice's value range.
        #[arg(long, requires = "window_max", allow_hyphen_values = true)]
        window_min: Option<f64>,
        #[arg(long, requires = "window_min", allow_hyphen_values = true)]
        window_max: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PhantomKind {
    Smooth,
    Sharp,
    Potential,
    Null1,
    Null2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    ThreeAxis,
    TwoAxisPotential,
    DiagonalsAlt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    E1,
    E2,
    E3,
}

impl From<AxisArg> for CoordAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::E1 => CoordAxis::E1,
            AxisArg::E2 => CoordAxis::E2,
            AxisArg::E3 => CoordAxis::E3,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Pgm,
    Csv,
}

type CliResult<T = ()> = Result<T, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.replace('\n', " "));
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> CliResult {
    let Ok(v) = std::env::var("TRT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("TRT_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Phantom { kind, n, extent, out } => phantom(kind, n, extent, &out),
        Command::Simulate {
            field,
            axes,
            angles,
            noise,
            bin,
            seed,
            out,
        } => simulate(&field, &axes, angles, noise, bin, seed, &out),
        Command::Reconstruct {
            data,
            mode,
            extent,
            out,
            u_out,
        } => reconstruct(&data, mode, extent, &out, u_out.as_deref()),
        Command::Compare { a, b, report } => compare(&a, &b, report.as_deref()),
        Command::ExportSlice {
            field,
            component,
            axis,
            index,
            format,
            window_min,
            window_max,
            out,
        } => {
            let f = io::read_field(&field).map_err(err)?.component(component).map_err(err)?;
            let format = match format {
                FormatArg::Pgm => SliceFormat::Pgm,
                FormatArg::Csv => SliceFormat::Csv,
            };
            let window = window_min.zip(window_max);
            io::export_slice(&f, axis.into(), index, format, window, &out).map_err(err)
        }
    }
}

fn phantom(kind: PhantomKind, n: usize, extent: f64, out: &Path) -> CliResult {
    let grid = VoxelGrid3::new(n, extent).map_err(err)?;
    let f = match kind {
        PhantomKind::Smooth => smooth_phantom(grid),
        PhantomKind::Sharp => sharp_phantom(grid),
        PhantomKind::Potential => GaussianDisplacement::standard().field(grid),
        PhantomKind::Null1 => one_axis_null_field(grid, &default_null1_generator()).map_err(err)?,
        PhantomKind::Null2 => two_axis_null_field(grid, &default_null2_generator()).map_err(err)?,
    };
    io::write_field(out, &FieldData::Tensor(f)).map_err(err)
}

fn simulate(
    field: &Path,
    axes: &[AxisArg],
    angles: usize,
    noise: f64,
    bin: usize,
    seed: u64,
    out: &Path,
) -> CliResult {
    let f = io::read_tensor_field(field).map_err(err)?;
    let n = f.grid.n();
    if bin == 0 || n % bin != 0 {
        return Err(format!("bin factor {bin} must divide the grid size {n}"));
    }
    let cfg = AcquisitionConfig {
        axes: axes.iter().map(|&a| a.into()).collect(),
        noise_pct: noise / 100.0,
        seed,
        ..AcquisitionConfig::for_grid(n, angles).with_binning(n, bin)
    };
    let data = simulate_acquisition(&f, &cfg).map_err(err)?;
    io::write_data(out, &data).map_err(err)
}

fn reconstruct(data: &Path, mode: Mode, extent: f64, out: &Path, u_out: Option<&Path>) -> CliResult {
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(format!("extent must be > 0, got {extent}"));
    }
    let rows = read_rows(data)?;
    let data = io::read_data(data, 2.0 * extent / rows as f64).map_err(err)?;
    let opts = ReconstructionOptions::default();
    let f = match mode {
        Mode::ThreeAxis => {
            let (f, report) = reconstruct_three_axis(&data, &opts).map_err(err)?;
            report.warnings.iter().for_each(|w| eprintln!("warning: {w}"));
            f
        }
        Mode::TwoAxisPotential => {
            let r = reconstruct_two_axis_potential(&data, &opts).map_err(err)?;
            r.report.warnings.iter().for_each(|w| eprintln!("warning: {w}"));
            if let Some(p) = u_out {
                io::write_field(p, &FieldData::Vector(r.u)).map_err(err)?;
            }
            r.f
        }
        Mode::DiagonalsAlt => {
            let (mut f, _) = reconstruct_three_axis(&data, &opts).map_err(err)?;
            let alt = alternative_diagonals(&data, &opts).map_err(err)?;
            let fbp = recover_diagonals_fbp(&data).map_err(err)?;
            let residual = consistency_residual(&fbp, &alt).map_err(err)?;
            eprintln!("consistency residual against FBP diagonals: {:.4}", residual.aggregate);
            replace_diagonals(&mut f, &alt);
            f
        }
    };
    if u_out.is_some() && !matches!(mode, Mode::TwoAxisPotential) {
        eprintln!("warning: --u-out is only written by two-axis-potential");
    }
    io::write_field(out, &FieldData::Tensor(f)).map_err(err)
}

fn replace_diagonals(f: &mut SymTensorField3, diag: &[trt_core::geometry::ScalarField3; 3]) {
    for (i, d) in diag.iter().enumerate() {
        f.set_component(trt_core::geometry::component_index(i, i), d);
    }
}

/// Detector rows from a data file header, needed to derive the pitch.
fn read_rows(path: &Path) -> CliResult<usize> {
    use std::io::Read;
    let mut head = [0u8; 24];
    std::fs::File::open(path)
        .and_then(|mut f| f.read_exact(&mut head))
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let rows = u32::from_le_bytes(head[16..20].try_into().expect("4 bytes")) as usize;
    if rows == 0 {
        return Err(format!("{}: data file has zero detector rows", path.display()));
    }
    Ok(rows)
}

fn compare(a: &Path, b: &Path, report: Option<&Path>) -> CliResult {
    let fa = io::read_field(a).map_err(err)?;
    let fb = io::read_field(b).map_err(err)?;
    let cmp: FieldComparison = match (&fa, &fb) {
        (FieldData::Tensor(x), FieldData::Tensor(y)) => compare_fields(x, y),
        (FieldData::Vector(x), FieldData::Vector(y)) => compare_vector_fields(x, y),
        (FieldData::Scalar(x), FieldData::Scalar(y)) => compare_components(&[x.clone()], &[y.clone()], &["f"]),
        _ => {
            return Err(format!(
                "fields have {} and {} components",
                fa.components(),
                fb.components()
            ))
        }
    }
    .map_err(err)?;
    for c in &cmp.components {
        println!(
            "component {}: relative L2 {:.6e}, band-limited {:.6e}",
            c.component, c.relative_l2, c.band_limited_relative_l2
        );
    }
    println!("aggregate relative L2 {:.6e}", cmp.aggregate_relative_l2);
    if let Some(p) = report {
        let json = serde_json::to_vec_pretty(&cmp).map_err(err)?;
        io::write_atomic(p, &json).map_err(err)?;
    }
    Ok(())
}
