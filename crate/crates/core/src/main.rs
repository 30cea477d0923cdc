use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use symflat::classification::{self, Coefficient};
use symflat::error::Error;
use symflat::flows::{self, FlowConfig};
use symflat::functionals::{self, FunctionalKind, FunctionalValue};
use symflat::presets::{Instance, Preset};
use symflat::scene::Scene;
use symflat::verify::{self, Suite, VerifyOptions};

#[derive(Parser)]
#[command(name = "symflat", version, about = "Symplectically flat connections: checks, flows and classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and print one row per check.
    Verify {
        #[arg(long, default_value = "all", value_parser = Suite::NAMES)]
        suite: String,
        /// Grid resolution of the T4 example.
        #[arg(long, default_value_t = 32)]
        resolution: usize,
        /// Random starts per cone search.
        #[arg(long, default_value_t = 10)]
        cone_starts: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run a gradient flow and write its trace as CSV.
    Flow {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "pym")]
        kind: FunctionalKind,
        #[arg(long, default_value_t = 500)]
        steps: usize,
        /// Initial time step; estimated from the linearisation when omitted.
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Residual threshold; defaults to the scene's flow tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Classify zeta-flat U(1) bundles over T4 for zeta = c1 dx1^dx2 + c2 dx3^dx4.
    Classify {
        c1: String,
        c2: Option<String>,
        /// Declare c1/c2 irrational instead of giving c2.
        #[arg(long)]
        irrational_ratio: bool,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate functionals and their Euler-Lagrange residuals.
    Eval {
        #[command(flatten)]
        source: Source,
        #[arg(long, visible_alias = "functional", default_value = "all")]
        kind: String,
        #[arg(long)]
        resolution: Option<usize>,
        /// Residual threshold; defaults to the scene's residual tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// JSON scene file.
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Preset name, e.g. `constant_flux(0.5)`.
    #[arg(long)]
    preset: Option<Preset>,
}

impl Source {
    fn scene(&self, resolution: Option<usize>) -> Result<Scene, Error> {
        let mut scene = match (&self.scene, &self.preset) {
            (Some(path), _) => Scene::load(path)?,
            (None, Some(p)) => Scene::from_preset(p.clone()),
            (None, None) => unreachable!("clap requires a source"),
        };
        if resolution.is_some() {
            scene.resolution = resolution;
        }
        scene.validate()?;
        Ok(scene)
    }
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn cmd_verify(suite: &str, resolution: usize, cone_starts: usize, json: bool) -> Result<bool, Failure> {
    let suite: Suite = suite.parse()?;
    let opts = VerifyOptions {
        resolution,
        cone_starts,
        ..Default::default()
    };
    let checks = verify::run_suite(suite, &opts)?;
    if json {
        print_json(&checks);
    } else {
        print!("{}", verify::render_table(&checks));
    }
    Ok(checks.iter().all(|c| c.pass))
}

#[allow(clippy::too_many_arguments)]
fn cmd_flow(
    source: &Source,
    kind: FunctionalKind,
    steps: usize,
    step: Option<f64>,
    out: &PathBuf,
    tolerance: Option<f64>,
    resolution: Option<usize>,
) -> Result<bool, Failure> {
    let scene = source.scene(resolution)?;
    let inst = scene.instance()?;
    let b = match kind {
        FunctionalKind::Cone => Some(scene.b_field(&inst)?),
        _ => None,
    };
    let cfg = FlowConfig {
        kind,
        step,
        max_steps: steps,
        tolerance: tolerance.unwrap_or(scene.tolerances.flow),
        ..Default::default()
    };
    let file = File::create(out).map_err(|e| Failure::Config(format!("{}: {e}", out.display())))?;
    let (_, trace) = match flows::flow_run(&inst.connection, b.as_ref(), &cfg, &inst.metric) {
        Ok(r) => r,
        Err(e @ (Error::StepUnderflow { .. } | Error::NotFinite(_))) => {
            return Err(Failure::Run(format!("flow aborted: {e}")))
        }
        Err(e) => return Err(e.into()),
    };
    trace.write_csv(BufWriter::new(file))?;
    let last = trace.records.last().expect("trace has an initial record");
    println!("kind:      {kind}");
    println!("steps:     {}", trace.steps);
    println!("halvings:  {}", trace.halvings);
    println!("time:      {}", last.time);
    println!("value:     {:e}", last.value);
    println!("residual:  {:e}", last.residual);
    println!("converged: {}", trace.converged);
    Ok(true)
}

fn cmd_classify(c1: &str, c2: Option<&str>, irrational: bool, json: bool) -> Result<bool, Failure> {
    let c1 = Coefficient::Rational(classification::parse_rational(c1)?);
    let c2 = match (c2, irrational) {
        (Some(_), true) => {
            return Err(Failure::Config("give either c2 or --irrational-ratio, not both".into()))
        }
        (Some(s), false) => Coefficient::Rational(classification::parse_rational(s)?),
        (None, true) => Coefficient::IrrationalRatio,
        (None, false) => return Err(Failure::Config("c2 is required without --irrational-ratio".into())),
    };
    let report = classification::classify_u1_t4(&c1, &c2)?;
    if json {
        print_json(&report);
    } else {
        print!("{report}");
    }
    Ok(true)
}

fn evaluate_all(inst: &Instance, scene: &Scene, kinds: &[FunctionalKind], tol: f64) -> Result<Vec<FunctionalValue>, Error> {
    kinds
        .iter()
        .map(|&kind| {
            let b = match kind {
                FunctionalKind::Cone => Some(scene.b_field(inst)?),
                _ => None,
            };
            functionals::evaluate(kind, &inst.connection, b.as_ref(), &inst.metric, tol)
        })
        .collect()
}

fn cmd_eval(
    source: &Source,
    kind: &str,
    resolution: Option<usize>,
    tolerance: Option<f64>,
    json: bool,
) -> Result<bool, Failure> {
    let kinds: Vec<FunctionalKind> = match kind {
        "all" => FunctionalKind::ALL.to_vec(),
        k => vec![k.parse()?],
    };
    let scene = source.scene(resolution)?;
    let inst = scene.instance()?;
    let tol = tolerance.unwrap_or(scene.tolerances.residual);
    let values = evaluate_all(&inst, &scene, &kinds, tol)?;
    if json {
        print_json(&values);
        return Ok(true);
    }
    println!("preset: {}", inst.preset);
    for v in &values {
        println!("{:<5} value {:.12e}", v.kind.name(), v.value);
        for ((name, r), pass) in v.kind.residual_names().iter().zip(&v.residual_norms).zip(&v.passes) {
            println!(
                "      |{name}|_inf = {r:.6e} {} {tol:.1e}",
                if *pass { "<=" } else { ">" }
            );
        }
        println!("      critical: {}", v.critical);
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify {
            suite,
            resolution,
            cone_starts,
            json,
        } => cmd_verify(suite, *resolution, *cone_starts, *json),
        Command::Flow {
            source,
            kind,
            steps,
            step,
            out,
            tolerance,
            resolution,
        } => cmd_flow(source, *kind, *steps, *step, out, *tolerance, *resolution),
        Command::Classify {
            c1,
            c2,
            irrational_ratio,
            json,
        } => cmd_classify(c1, c2.as_deref(), *irrational_ratio, *json),
        Command::Eval {
            source,
            kind,
            resolution,
            tolerance,
            json,
        } => cmd_eval(source, kind, *resolution, *tolerance, *json),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
