use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use resip_cli::schema::{
    BraidCoverTask, BsTask, ExtensionCheck, ExtensionTask, FiberedTask, Int, Monodromy, PowerCheck, PrimesTask,
    Sl2PowerTask, TorusTask, WitnessTask, SCHEMA_JSON,
};
use resip_cli::{
    emit_report, parse_task_file, run_tasks, verify_certificates, CapOverrides, Format, RunOptions, TaskFile, TaskKind,
};
use resip_core::extension::Cocycle2;

const EXIT_SCHEMA: u8 = 2;

#[derive(Parser)]
#[command(name = "resip", version, about = "Residual properties of mapping-torus groups")]
struct Cli {
    /// Task file to run.
    #[arg(long, global = true)]
    tasks: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    parallel: usize,
    /// Cap overrides `KEY=VAL[,KEY=VAL...]`, repeatable; also read from RESIP_CAPS.
    #[arg(long, global = true, value_name = "KEY=VAL", action = clap::ArgAction::Append)]
    caps: Vec<String>,
    /// Record per-task wall time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Clone)]
struct MonodromyArgs {
    /// Generator images, comma separated, e.g. "x1 x2 X1, x1, x3".
    #[arg(long)]
    images: Option<String>,
    /// Images of the inverse, comma separated.
    #[arg(long)]
    inverse: Option<String>,
    /// Artin braid word, e.g. "s1 S2".
    #[arg(long)]
    braid: Option<String>,
    #[arg(long)]
    strands: Option<usize>,
}

impl MonodromyArgs {
    fn build(&self) -> Monodromy {
        let split = |s: &String| s.split(',').map(|w| w.trim().to_string()).collect();
        Monodromy {
            images: self.images.as_ref().map(split),
            inverse: self.inverse.as_ref().map(split),
            braid: self.braid.clone(),
            strands: self.strands,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Torus bundle with monodromy A in GL_n(Z).
    Torus {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        primes_up_to: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
    },
    /// Set of primes p for which the torus bundle group is residually p.
    Primes {
        #[arg(long)]
        matrix: String,
    },
    /// Free-by-cyclic group with the given monodromy.
    Fibered {
        #[command(flatten)]
        monodromy: MonodromyArgs,
        #[arg(long)]
        primes_up_to: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        #[arg(long)]
        layers: Option<usize>,
    },
    /// Baumslag-Solitar group BS(1, q).
    Bs {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Action of a braid on the homology of a finite cyclic cover.
    BraidCover {
        #[arg(long)]
        strands: usize,
        #[arg(long)]
        braid: String,
        #[arg(long)]
        modulus: u64,
        #[arg(long, value_delimiter = ',')]
        assignments: Vec<u64>,
        /// Polynomial to test for division, ascending coefficients "1,-3,1".
        #[arg(long = "factor", allow_hyphen_values = true)]
        factors: Vec<String>,
        /// Also compare against the braid power, "K" or "K:c0,c1,...".
        #[arg(long = "power", allow_hyphen_values = true)]
        powers: Vec<String>,
    },
    /// Finite p-group quotient in which the given elements survive.
    Witness {
        #[command(flatten)]
        monodromy: MonodromyArgs,
        /// Element such as "t^2 x1 X2"; repeat to combine.
        #[arg(long = "element", required = true)]
        elements: Vec<String>,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        exploratory: bool,
    },
    /// Central extension checks.
    Extension {
        #[arg(long, value_enum)]
        check: CheckArg,
        #[arg(long)]
        genus: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        euler: Option<i64>,
        /// Cocycle as JSON, or @FILE.
        #[arg(long)]
        cocycle: Option<String>,
    },
    /// Least k with p | det(A^k - I) for A in SL_2(Z).
    Sl2Power {
        #[arg(long)]
        matrix: String,
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u64>,
    },
    /// Re-check stored witness certificates (a report or a bare certificate).
    VerifyWitness {
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Print the task-file JSON schema.
    Schema,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CheckArg {
    Heisenberg,
    CircleBundle,
    Cocycle,
}

fn parse_matrix(s: &str) -> Result<Vec<Vec<Int>>, String> {
    s.split(';')
        .map(|row| {
            row.split_whitespace()
                .map(|x| x.parse().map(Int).map_err(|_| format!("bad matrix entry `{x}`")))
                .collect()
        })
        .collect()
}

fn parse_coeffs(s: &str) -> Result<Vec<Int>, String> {
    s.split(',')
        .map(|x| x.trim().parse().map(Int).map_err(|_| format!("bad coefficient `{x}`")))
        .collect()
}

fn parse_power(s: &str) -> Result<PowerCheck, String> {
    let (k, coeffs) = match s.split_once(':') {
        Some((k, c)) => (k, vec![parse_coeffs(c)?]),
        None => (s, Vec::new()),
    };
    let k = k.trim().parse().map_err(|_| format!("bad power `{k}`"))?;
    Ok(PowerCheck { k, factors: coeffs })
}

fn read_arg(s: &str) -> Result<String, String> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}")),
        None => Ok(s.to_string()),
    }
}

fn one_shot(cmd: Command) -> Result<TaskKind, String> {
    Ok(match cmd {
        Command::Torus { matrix, primes_up_to, primes } => TaskKind::Torus(TorusTask {
            matrix: parse_matrix(&matrix)?,
            primes,
            primes_up_to,
        }),
        Command::Primes { matrix } => TaskKind::Primes(PrimesTask {
            matrix: parse_matrix(&matrix)?,
        }),
        Command::Fibered { monodromy, primes_up_to, primes, layers } => TaskKind::Fibered(FiberedTask {
            monodromy: monodromy.build(),
            primes,
            primes_up_to,
            layers,
        }),
        Command::Bs { q } => TaskKind::Bs(BsTask {
            q: Int(q.trim().parse().map_err(|_| format!("bad q `{q}`"))?),
        }),
        Command::BraidCover { strands, braid, modulus, assignments, factors, powers } => TaskKind::BraidCover(BraidCoverTask {
            strands,
            braid,
            modulus,
            assignments,
            factors: factors.iter().map(|f| parse_coeffs(f)).collect::<Result<_, _>>()?,
            powers: powers.iter().map(|p| parse_power(p)).collect::<Result<_, _>>()?,
        }),
        Command::Witness { monodromy, elements, p, exploratory } => TaskKind::Witness(WitnessTask {
            monodromy: monodromy.build(),
            elements,
            p,
            exploratory,
        }),
        Command::Extension { check, genus, euler, cocycle } => TaskKind::Extension(ExtensionTask {
            check: match check {
                CheckArg::Heisenberg => ExtensionCheck::Heisenberg,
                CheckArg::CircleBundle => ExtensionCheck::CircleBundle,
                CheckArg::Cocycle => ExtensionCheck::Cocycle,
            },
            genus,
            euler,
            cocycle: cocycle
                .map(|c| {
                    let text = read_arg(&c)?;
                    serde_json::from_str::<Cocycle2>(&text).map_err(|e| format!("cocycle: {e}"))
                })
                .transpose()?,
        }),
        Command::Sl2Power { matrix, p } => TaskKind::Sl2Power(Sl2PowerTask {
            matrix: parse_matrix(&matrix)?,
            primes: p,
        }),
        Command::VerifyWitness { .. } | Command::Schema => unreachable!("handled before"),
    })
}

fn schema_failure(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("resip: {msg}");
    ExitCode::from(EXIT_SCHEMA)
}

fn verify(path: &PathBuf, format: Format) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return schema_failure(format!("{}: {e}", path.display())),
    };
    let value: serde_json::Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return schema_failure(format!("{}: {e}", path.display())),
    };
    let checks = match verify_certificates(&value) {
        Ok(c) if !c.is_empty() => c,
        Ok(_) => return schema_failure("no witness certificate found"),
        Err(e) => return schema_failure(e),
    };
    let valid = checks.iter().all(|c| c.valid);
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&checks).expect("checks serialize")),
        Format::Text => {
            for (i, c) in checks.iter().enumerate() {
                println!(
                    "certificate {i}: {} (survival {}, p-power order {}, kernel invariant on {} samples {})",
                    if c.valid { "valid" } else { "REJECTED" },
                    c.survivors_ok,
                    c.orders_ok,
                    c.kernel_samples,
                    c.kernel_invariant
                );
            }
        }
    }
    if valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_caps = match CapOverrides::from_env() {
        Ok(c) => c,
        Err(e) => return schema_failure(e),
    };
    let flag_caps = match CapOverrides::parse_pairs(&cli.caps) {
        Ok(c) => c,
        Err(e) => return schema_failure(e),
    };
    let file = match (cli.tasks, cli.command) {
        (_, Some(Command::Schema)) => {
            print!("{SCHEMA_JSON}");
            return ExitCode::SUCCESS;
        }
        (_, Some(Command::VerifyWitness { certificate })) => return verify(&certificate, cli.format),
        (Some(_), Some(_)) => return schema_failure("give either --tasks or a subcommand, not both"),
        (Some(path), None) => {
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => return schema_failure(format!("{}: {e}", path.display())),
            };
            match parse_task_file(&text) {
                Ok(f) => f,
                Err(e) => return schema_failure(e),
            }
        }
        (None, Some(cmd)) => match one_shot(cmd) {
            Ok(kind) => TaskFile::single(kind),
            Err(e) => return schema_failure(e),
        },
        (None, None) => return schema_failure("nothing to do: pass --tasks FILE or a subcommand (see --help)"),
    };
    let opts = RunOptions {
        parallelism: cli.parallel,
        env_caps,
        flag_caps,
        timing: cli.timing,
    };
    let report = run_tasks(&file, &opts);
    print!("{}", emit_report(&report, cli.format));
    ExitCode::from(report.exit_code() as u8)
}
