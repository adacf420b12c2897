//! Command line interface: compute PCF profiles from occupancy files,
//! generate synthetic patterns and graphs, average profiles, run the
//! oracle validation sweep, and ingest PGM/PPM images.
//!
//! Exit codes: 0 success, 1 validation/usage error, 2 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lattice_pcf::error::Error;
use lattice_pcf::graph::graph_pcf;
use lattice_pcf::io;
use lattice_pcf::lattice::{BoundaryKind, Dims, TessellationKind};
use lattice_pcf::metric::{Bandwidth, MetricKind};
use lattice_pcf::oracle::{validity_table, verify_normalization, SweepSpec, DEFAULT_SITE_CAP};
use lattice_pcf::pattern::{
    self, gen_proliferation, gen_uniform_random, gen_voronoi_lattice, Pattern,
};
use lattice_pcf::profile::{
    annular_profile, average_profiles, pcf_profile, rectilinear_profile, PcfProfile,
};

#[derive(Parser)]
#[command(
    name = "lattice-pcf",
    about = "Pair correlation functions for on-lattice exclusion processes",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a PCF profile from an occupancy file.
    Compute(ComputeArgs),
    /// Generate a synthetic occupancy pattern or graph.
    Generate(GenerateArgs),
    /// Compute the General PCF of a site graph.
    Graph(GraphArgs),
    /// Average several profile files sharing one domain.
    Average(AverageArgs),
    /// Run the brute-force oracle sweep against every analytic formula.
    Validate(ValidateArgs),
    /// Threshold a PGM/PPM image into an occupancy file.
    Ingest(IngestArgs),
}

#[derive(Args)]
struct ComputeArgs {
    /// Occupancy CSV (header names kind and bc).
    #[arg(long)]
    input: PathBuf,
    /// taxicab, uniform, annular, rectilinear, rectilinear-x or rectilinear-y.
    #[arg(long)]
    metric: String,
    /// Annular bandwidth δ (decimal), used with --metric annular.
    #[arg(long, default_value = "1")]
    delta: String,
    /// Cross-check: expected tessellation of the input file.
    #[arg(long)]
    tessellation: Option<String>,
    /// Cross-check: expected boundary condition of the input file.
    #[arg(long)]
    bc: Option<String>,
    /// Output profile CSV.
    #[arg(long)]
    out: PathBuf,
    /// Write two-column m,f plot data instead of the full profile.
    #[arg(long)]
    plot_data: bool,
}

#[derive(Args)]
struct GenerateArgs {
    /// uniform, chessboard, diagonal-stripes, concentric-circles,
    /// proliferation, voronoi, aggregated or segregated.
    #[arg(long)]
    pattern: String,
    /// Lattice extents, e.g. 100x100 (or point-grid extents for voronoi).
    #[arg(long, default_value = "100x100")]
    dims: String,
    /// Tessellation for uniform random occupancy.
    #[arg(long, default_value = "square")]
    tessellation: String,
    /// Boundary condition of the generated grid.
    #[arg(long, default_value = "nonperiodic")]
    bc: String,
    /// Occupancy density (decimal) for uniform/aggregated/segregated.
    #[arg(long)]
    density: Option<String>,
    /// Stripe width (diagonal-stripes).
    #[arg(long)]
    width: Option<u32>,
    /// Ring spacing (concentric-circles).
    #[arg(long)]
    spacing: Option<f64>,
    /// Time steps (proliferation).
    #[arg(long)]
    steps: Option<u32>,
    /// Point perturbation Δ (voronoi).
    #[arg(long)]
    delta: Option<f64>,
    /// Edge-list input for aggregated/segregated.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// RNG seed; required by every stochastic generator.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file: occupancy CSV, edge list (voronoi) or occupied list
    /// (aggregated/segregated).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GraphArgs {
    /// Edge-list CSV with a `# format=1 z=<Z>` header.
    #[arg(long)]
    edges: PathBuf,
    /// Occupied-vertex list, one 1-based id per line.
    #[arg(long)]
    occupied: PathBuf,
    /// Output profile CSV.
    #[arg(long)]
    out: PathBuf,
    /// Write two-column m,f plot data instead of the full profile.
    #[arg(long)]
    plot_data: bool,
}

#[derive(Args)]
struct AverageArgs {
    /// Output profile CSV.
    #[arg(long)]
    out: PathBuf,
    /// Input profile files (at least one).
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Largest planar extent to sweep (from 4).
    #[arg(long, default_value_t = 12)]
    max_extent: u32,
    /// Largest cubic extent to sweep (from 4).
    #[arg(long, default_value_t = 8)]
    cube_max_extent: u32,
    /// Write the full comparison report CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the machine-readable validity table here.
    #[arg(long)]
    validity_table: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    /// PGM (P2/P5) or PPM (P3/P6) image.
    #[arg(long)]
    input: PathBuf,
    /// Channel threshold: a pixel is occupied iff all channels exceed it.
    #[arg(long, default_value_t = 80)]
    threshold: u8,
    /// Output occupancy CSV.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Compute(args) => compute(args),
        Command::Generate(args) => generate(args),
        Command::Graph(args) => graph(args),
        Command::Average(args) => average(args),
        Command::Validate(args) => validate(args),
        Command::Ingest(args) => ingest(args),
    }
}

fn write_out(profile: &PcfProfile, out: &PathBuf, plot_data: bool) -> Result<(), Error> {
    if plot_data {
        io::write_profile_plot_data(profile, out)
    } else {
        io::write_profile(profile, out)
    }
}

fn compute(args: ComputeArgs) -> Result<(), Error> {
    let grid = io::read_occupancy(&args.input)?;
    if let Some(t) = &args.tessellation {
        let want = TessellationKind::parse(t)?;
        if want != grid.kind() {
            return Err(Error::InvalidParameter(format!(
                "--tessellation {want} does not match input file kind {}",
                grid.kind()
            )));
        }
    }
    if let Some(b) = &args.bc {
        let want = BoundaryKind::parse(b)?;
        if want != grid.bc() {
            return Err(Error::InvalidParameter(format!(
                "--bc {want} does not match input file bc {}",
                grid.bc()
            )));
        }
    }
    let metric = MetricKind::parse(&args.metric)?;
    let profile = match metric {
        MetricKind::Taxicab | MetricKind::Uniform => pcf_profile(&grid, &metric)?,
        MetricKind::Annular(_) => {
            let delta = Bandwidth::parse(&args.delta)?;
            annular_profile(&grid, delta)?
        }
        MetricKind::Rectilinear => rectilinear_profile(&grid)?.averaged,
        MetricKind::RectilinearX => rectilinear_profile(&grid)?.x,
        MetricKind::RectilinearY => rectilinear_profile(&grid)?.y,
        MetricKind::Graph => {
            return Err(Error::InvalidParameter(
                "use the `graph` subcommand for graph-metric profiles".into(),
            ))
        }
    };
    write_out(&profile, &args.out, args.plot_data)
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64, Error> {
    seed.ok_or_else(|| {
        Error::InvalidParameter(format!("--seed is required for {what} (no silent entropy)"))
    })
}

fn generate(args: GenerateArgs) -> Result<(), Error> {
    let dims: Dims = io::parse_dims(&args.dims)?;
    let bc = BoundaryKind::parse(&args.bc)?;
    match args.pattern.to_ascii_lowercase().as_str() {
        "uniform" | "uniform-random" => {
            let kind = TessellationKind::parse(&args.tessellation)?;
            let density = pattern::parse_density(args.density.as_deref().ok_or_else(|| {
                Error::InvalidParameter("--density is required for uniform".into())
            })?)?;
            let seed = require_seed(args.seed, "uniform")?;
            let grid = gen_uniform_random(kind, dims, bc, density, seed)?;
            io::write_occupancy(&grid, &args.out)
        }
        "chessboard" => {
            let grid = pattern::gen_deterministic_pattern(Pattern::Chessboard, dims, bc)?;
            io::write_occupancy(&grid, &args.out)
        }
        "diagonal-stripes" | "stripes" => {
            let width = args.width.ok_or_else(|| {
                Error::InvalidParameter("--width is required for diagonal-stripes".into())
            })?;
            let grid =
                pattern::gen_deterministic_pattern(Pattern::DiagonalStripes { width }, dims, bc)?;
            io::write_occupancy(&grid, &args.out)
        }
        "concentric-circles" | "circles" => {
            let spacing = args.spacing.ok_or_else(|| {
                Error::InvalidParameter("--spacing is required for concentric-circles".into())
            })?;
            let grid = pattern::gen_deterministic_pattern(
                Pattern::ConcentricCircles { spacing },
                dims,
                bc,
            )?;
            io::write_occupancy(&grid, &args.out)
        }
        "proliferation" => {
            let steps = args.steps.ok_or_else(|| {
                Error::InvalidParameter("--steps is required for proliferation".into())
            })?;
            let seed = require_seed(args.seed, "proliferation")?;
            let grid = gen_proliferation(dims, steps, seed)?;
            io::write_occupancy(&grid, &args.out)
        }
        "voronoi" => {
            let delta = args
                .delta
                .ok_or_else(|| Error::InvalidParameter("--delta is required for voronoi".into()))?;
            let seed = require_seed(args.seed, "voronoi")?;
            let v = gen_voronoi_lattice(dims, delta, seed)?;
            if v.effective_seed != seed {
                eprintln!(
                    "note: degenerate point set; effective seed {}",
                    v.effective_seed
                );
            }
            let mut edges = format!(
                "# format=1 z={} generator=voronoi dims={} delta={} seed={}\n",
                v.lattice.vertex_count(),
                dims,
                delta,
                v.effective_seed
            );
            for (i, j) in v.lattice.edges() {
                edges.push_str(&format!("{i},{j}\n"));
            }
            std::fs::write(&args.out, edges)?;
            Ok(())
        }
        "aggregated" | "segregated" => {
            let edges_path = args.edges.as_ref().ok_or_else(|| {
                Error::InvalidParameter("--edges is required for graph processes".into())
            })?;
            let density = pattern::parse_density(args.density.as_deref().ok_or_else(|| {
                Error::InvalidParameter("--density is required for graph processes".into())
            })?)?;
            let seed = require_seed(args.seed, "graph processes")?;
            let edges_text = std::fs::read_to_string(edges_path)?;
            let lattice = io::parse_graph(&edges_text, "")?;
            let outcome = if args.pattern.eq_ignore_ascii_case("aggregated") {
                pattern::gen_aggregated(&lattice, density, seed)?
            } else {
                pattern::gen_segregated(&lattice, density, seed)?
            };
            println!("achieved density {:.6}", outcome.achieved_density);
            let mut occ = String::from("# format=1\n");
            for v in outcome.lattice.occupied_vertices() {
                occ.push_str(&format!("{v}\n"));
            }
            std::fs::write(&args.out, occ)?;
            Ok(())
        }
        other => Err(Error::InvalidParameter(format!("unknown pattern `{other}`"))),
    }
}

fn graph(args: GraphArgs) -> Result<(), Error> {
    let lattice = io::read_graph(&args.edges, &args.occupied)?;
    let profile = graph_pcf(&lattice)?;
    write_out(&profile, &args.out, args.plot_data)
}

fn average(args: AverageArgs) -> Result<(), Error> {
    let profiles: Vec<PcfProfile> = args
        .inputs
        .iter()
        .map(io::read_profile)
        .collect::<Result<_, _>>()?;
    let avg = average_profiles(&profiles)?;
    io::write_profile(&avg, &args.out)
}

fn validate(args: ValidateArgs) -> Result<(), Error> {
    if args.max_extent < 4 || args.cube_max_extent < 4 {
        return Err(Error::InvalidParameter("sweep extents start at 4".into()));
    }
    let spec = SweepSpec {
        planar_extents: (4, args.max_extent),
        cube_extents: (4, args.cube_max_extent),
        site_cap: DEFAULT_SITE_CAP,
    };
    let report = verify_normalization(&spec)?;
    if let Some(path) = &args.out {
        std::fs::write(path, report.to_csv())?;
    }
    if let Some(path) = &args.validity_table {
        std::fs::write(path, validity_table())?;
    }
    let mismatches = report.mismatches();
    println!(
        "checked {} (combination, m) points; {} mismatch(es)",
        report.rows.len(),
        mismatches
    );
    if mismatches > 0 {
        for r in report.rows.iter().filter(|r| !r.matches).take(10) {
            eprintln!(
                "mismatch: {} {} {} {} m={} analytic={} brute={}",
                r.kind,
                r.metric.label(),
                r.bc,
                r.dims,
                r.m,
                r.analytic,
                r.brute
            );
        }
        return Err(Error::InvalidParameter(format!(
            "{mismatches} normalisation mismatch(es)"
        )));
    }
    Ok(())
}

fn ingest(args: IngestArgs) -> Result<(), Error> {
    let grid = io::read_image(&args.input, args.threshold)?;
    io::write_occupancy(&grid, &args.out)
}
