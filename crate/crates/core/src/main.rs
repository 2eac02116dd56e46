use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use thermofrac::benchmarks;
use thermofrac::io::{self, RunFailure};
use thermofrac::mesh::{load_gmsh, Mesh};

#[derive(Parser)]
#[command(name = "thermofrac", version, about = "Phase-field thermo-mechanical fracture in 2D")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON configuration.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override a config value, e.g. `--set load.delt=0.005`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run a built-in benchmark.
    Example {
        name: String,
        /// Resolution factor in (0, 1]; smaller is coarser.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        scale: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Only write the generated configuration to stdout.
        #[arg(long)]
        print_config: bool,
    },
    /// Print summary information about a mesh file.
    MeshInfo { path: PathBuf },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_SOLVER: u8 = 2;

fn failure_code(e: &RunFailure) -> u8 {
    match e {
        RunFailure::Config(_) => EXIT_CONFIG,
        RunFailure::Solver(_) | RunFailure::Output(_) => EXIT_SOLVER,
    }
}

fn report(cfg: &io::RunConfig, out: &Path, output: &thermofrac::solver::RunOutput) {
    println!("{} steps written to {}", output.stats.len(), out.display());
    let peak = cfg.reaction_tag.as_ref().and_then(|_| benchmarks::peak_load(&output.records));
    if let Some((u, f)) = peak {
        println!("peak Fy = {f:.6e} N/m at u_app = {u:.6e}");
    }
}

fn run(cfg: &io::RunConfig, base: &Path, out: &Path) -> ExitCode {
    match io::run_to_dir(cfg, base, out) {
        Ok(output) => {
            report(cfg, out, &output);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(failure_code(&e))
        }
    }
}

fn mesh_info(path: &Path) -> Result<Mesh, String> {
    let file = std::fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    load_gmsh(std::io::BufReader::new(file)).map_err(|e| format!("{}: {e}", path.display()))
}

fn configure_threads() {
    let threads = std::env::var("THERMOFRAC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(0);
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("could not size thread pool: {e}");
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    configure_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors share the configuration exit code; help and version succeed
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Run { config, out, overrides } => {
            let cfg = match io::load_config(&config, &overrides) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let base = config.parent().unwrap_or(Path::new("."));
            run(&cfg, base, &out)
        }
        Command::Example { name, scale, out, overrides, print_config } => {
            let cfg = match benchmarks::example(&name, scale) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let cfg = if overrides.is_empty() {
                cfg
            } else {
                let value = serde_json::to_value(&cfg).expect("config serializes");
                let mut value = value;
                match io::apply_overrides(&mut value, &overrides).and_then(|_| io::from_value(value)) {
                    Ok(c) => c,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(EXIT_CONFIG);
                    }
                }
            };
            if print_config {
                println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
                return ExitCode::SUCCESS;
            }
            let out = out.unwrap_or_else(|| PathBuf::from(format!("out-{name}")));
            run(&cfg, Path::new("."), &out)
        }
        Command::MeshInfo { path } => match mesh_info(&path) {
            Ok(mesh) => {
                let (lo, hi) = mesh.bounding_box();
                println!("nodes: {}", mesh.num_nodes());
                println!("elements: {}", mesh.num_elements());
                println!("boundary edges: {}", mesh.boundary_edges().len());
                println!("area: {:.6e}", mesh.total_area());
                println!("bounding box: [{:.6e}, {:.6e}] - [{:.6e}, {:.6e}]", lo[0], lo[1], hi[0], hi[1]);
                for name in mesh.names() {
                    let count = match name.dim {
                        1 => mesh.edges_with_tag(&name.name).map_or(0, |v| v.len()),
                        _ => mesh.elements().iter().filter(|t| t.region == name.id).count(),
                    };
                    println!("  {}D {:>4} {:<16} {count}", name.dim, name.id, name.name);
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
    }
}
