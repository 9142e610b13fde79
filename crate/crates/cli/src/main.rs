use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use plantsim::compiler::{build_sim_state, compile_plant, LeafLibrary};
use plantsim::scene::{self, PlantFile, SceneConfig, SweepParameter, OUTPUT_ROOT_ENV};
use plantsim::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_SIMULATION: u8 = 3;
const EXIT_DISCONNECTED: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "plantsim", version, about = "Compile, run, sweep and benchmark plant scenes")]
struct Cli {
    /// Output root; each command writes into a subdirectory named after its input.
    #[arg(long, global = true, env = OUTPUT_ROOT_ENV, default_value = "plantsim-out")]
    out: PathBuf,

    /// Record every n-th step as a frame (overrides the scene's output.stride).
    #[arg(long, global = true)]
    stride: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a plant file and write its node and edge tables.
    Compile {
        plant: PathBuf,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        sigma_connect: Option<f64>,
        #[arg(long)]
        sigma_distance: Option<f64>,
    },
    /// Run a scene and write frames, events and metrics.
    Run { scene: PathBuf },
    /// Run a scene once per parameter value.
    Sweep {
        scene: PathBuf,
        /// sigma_distance, stiffness, density, c_s_max or c_b_max.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Measure the real-time ratio of a scene.
    Bench {
        scene: PathBuf,
        /// Simulated seconds (at least 10).
        #[arg(long, default_value_t = 10.0)]
        window: f64,
    },
    /// Load a scene and compile its plant without simulating.
    Validate { scene: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DisconnectedPlant { .. } => EXIT_DISCONNECTED,
        Error::NonFinite { .. } => EXIT_SIMULATION,
        _ => EXIT_CONFIG,
    }
}

/// Output directory name for an input file: its stem, prefixed with the
/// parent directory's name for the generic stems `scene` and `plant`.
fn stem(p: &Path) -> String {
    let name = p.file_stem().map_or_else(|| "scene".to_string(), |s| s.to_string_lossy().into_owned());
    let parent = p.parent().and_then(|d| d.file_name()).map(|d| d.to_string_lossy().into_owned());
    match parent {
        Some(dir) if name == "scene" || name == "plant" => dir,
        Some(dir) if name.starts_with("scene_") => format!("{dir}-{}", &name["scene_".len()..]),
        _ => name,
    }
}

fn load(path: &Path, stride: Option<u32>) -> plantsim::Result<SceneConfig> {
    let cfg = scene::load_scene(path)?;
    match stride {
        Some(s) => {
            let mut file = cfg.file.clone();
            file.output.stride = s;
            SceneConfig::from_file(file, &cfg.base_dir)
        }
        None => Ok(cfg),
    }
}

fn write_text(path: &Path, text: &str) -> plantsim::Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

fn create_dir(dir: &Path) -> plantsim::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })
}

fn execute(cli: Cli) -> plantsim::Result<()> {
    match cli.command {
        Command::Compile { plant, step, sigma_connect, sigma_distance } => {
            let file = PlantFile::load(&plant)?;
            let mut params = file.compiler_params();
            params.step = step.unwrap_or(params.step);
            params.sigma_connect = sigma_connect.unwrap_or(params.sigma_connect);
            params.sigma_distance = sigma_distance.unwrap_or(params.sigma_distance);
            let compiled = compile_plant(&file.curve_set(), &params, &file.organs)?;
            for w in &compiled.warnings {
                log::warn!("{w}");
            }
            let material = plantsim::rod::Material::new(2e7, 0.3, 300.0)?;
            let state = build_sim_state(&compiled.graph, &material, &[], &LeafLibrary::builtin())?;
            let dir = cli.out.join(stem(&plant));
            create_dir(&dir)?;
            scene::write_graph_csv(&dir, &compiled.graph)?;
            println!(
                "{}: {} sampled nodes -> {} nodes, {} branch rods, {} rods with organs",
                plant.display(),
                compiled.dense_nodes,
                compiled.graph.nodes.len(),
                compiled.graph.edges.len(),
                state.segments.len()
            );
            println!("wrote {}", dir.display());
        }
        Command::Run { scene: path } => {
            let cfg = load(&path, cli.stride)?;
            let dir = cli.out.join(stem(&path));
            let out = scene::run(&cfg, Some(&dir))?;
            let m = &out.metrics;
            println!(
                "{} steps, {} frames, {} rods, {} fracture(s)",
                m.steps, m.frames, m.rod_count, m.fracture_count
            );
            if let Some(s) = m.tip_sag {
                println!("tip sag {s:.6} m at node {} ({})", m.tip_node, if m.quiescent { "at rest" } else { "at horizon" });
            }
            if let Some(t) = m.detach_time {
                println!("detach time {t:.4} s");
            }
            println!("wrote {}", dir.display());
        }
        Command::Sweep { scene: path, param, values } => {
            let parameter: SweepParameter = param.parse()?;
            let cfg = load(&path, cli.stride)?;
            let dir = cli.out.join(format!("{}-{}", stem(&path), parameter));
            let result = scene::sweep(&cfg, parameter, &values, Some(&dir))?;
            print!("{}", result.summary());
            println!("wrote {}", dir.display());
        }
        Command::Bench { scene: path, window } => {
            let cfg = load(&path, cli.stride)?;
            let b = scene::bench(&cfg, window)?;
            let dir = cli.out.join(format!("{}-bench", stem(&path)));
            create_dir(&dir)?;
            let text = toml::to_string(&b).map_err(|e| Error::Config(e.to_string()))?;
            write_text(&dir.join("bench.toml"), &text)?;
            println!(
                "{} rods, {:.2} simulated s in {:.2} wall s: ratio {:.3}",
                b.rods, b.simulated_seconds, b.wall_seconds, b.ratio
            );
            println!("hardware: {}", b.hardware);
        }
        Command::Validate { scene: path } => {
            let cfg = load(&path, cli.stride)?;
            let sim = scene::Simulation::new(&cfg)?;
            println!(
                "{}: ok ({} nodes, {} rods, {} obstacle(s), {:.3} s)",
                path.display(),
                sim.graph.nodes.len(),
                sim.rod_count(),
                sim.obstacles.len(),
                cfg.duration()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
