use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use monokinetic::harness::{
    builtin, builtin_names, run_acceptance, run_scenario, AcceptanceConfig, HarnessError, RunOptions, Scenario,
};

/// Hamiltonian transport of monokinetic measures: scenarios and acceptance suite.
#[derive(Parser)]
#[command(name = "monokinetic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Truncation depth for Cantor-type profiles.
    #[arg(long, global = true)]
    depth: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a built-in scenario by name.
    Run { scenario: String },
    /// Run the acceptance suite and print one line per criterion.
    Accept {
        /// Restrict to these criterion numbers.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
        /// Jacobian-zero threshold for every fold map in the suite.
        #[arg(long)]
        jacobian_threshold: Option<f64>,
    },
    /// List the built-in scenarios.
    ListScenarios,
    /// Print the JSON of a built-in scenario.
    Describe { name: String },
}

fn load(arg: &str) -> Result<Scenario, HarnessError> {
    let path = PathBuf::from(arg);
    if path.exists() {
        let text = fs::read_to_string(&path).map_err(|e| HarnessError::Invalid {
            field: "scenario".into(),
            message: format!("{}: {e}", path.display()),
        })?;
        Scenario::from_json(&text)
    } else {
        builtin(arg).ok_or_else(|| HarnessError::UnknownScenario(arg.into()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result: Result<u8, HarnessError> = match cli.command {
        Command::Run { scenario } => load(&scenario).and_then(|sc| {
            let opts = RunOptions {
                out: cli.out.clone(),
                depth: cli.depth,
                seed: cli.seed,
            };
            let m = run_scenario(&sc, &opts)?;
            for w in &m.warnings {
                eprintln!("warning: {w}");
            }
            for f in &m.files {
                println!("{}  {}", f.sha256, f.path);
            }
            Ok(0)
        }),
        Command::Accept {
            only,
            jacobian_threshold,
        } => {
            let mut config = AcceptanceConfig::default();
            if let Some(th) = jacobian_threshold {
                config.jacobian_threshold = th;
            }
            if let Some(d) = cli.depth {
                config.cantor_depth = d;
            }
            if let Some(s) = cli.seed {
                config.seed = s;
            }
            let report = run_acceptance(&config, &only, |r| println!("{}", r.line()));
            let written = match &cli.out {
                Some(dir) => fs::create_dir_all(dir)
                    .and_then(|_| fs::write(dir.join("acceptance.json"), report.to_json() + "\n"))
                    .map_err(|e| HarnessError::Output {
                        path: dir.display().to_string(),
                        message: e.to_string(),
                    }),
                None => Ok(()),
            };
            written.map(|_| if report.all_passed() { 0 } else { 2 })
        }
        Command::ListScenarios => {
            for name in builtin_names() {
                let sc = builtin(name).expect("listed scenario exists");
                println!("{name:<24} {}", sc.description);
            }
            Ok(0)
        }
        Command::Describe { name } => builtin(&name).ok_or(HarnessError::UnknownScenario(name)).map(|sc| {
            println!("{}", sc.to_json());
            0
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
