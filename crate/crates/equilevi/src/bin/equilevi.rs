//! Command-line front end. Instances are JSON, on a path or stdin ("-");
//! reports are canonical JSON on stdout. Exit codes: 0 ok, 1 verified
//! negative, 2 invalid input, 3 internal invariant breach.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use equilevi::instance::Instance;
use equilevi::report::{
    self, canonical_string, run_aut, run_compare, run_quotient, run_reduce, run_split,
    run_verify, RunOutcome,
};
use equilevi::Error;

#[derive(Parser)]
#[command(name = "equilevi", version, about = "Equivariant Levi reductions of bundles on the line, with exact certificates")]
struct Cli {
    /// Seed for the randomized candidate schedules
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest cyclotomic conductor used by spectrum splitting
    #[arg(long, global = true)]
    conductor_max: Option<u32>,
    /// Coefficient bound for random algebra elements
    #[arg(long, global = true)]
    coeff_bound: Option<i64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor the transition matrix into split form with witnesses
    Split { instance: String },
    /// Validate the group action and report the fixed subalgebra
    Aut { instance: String },
    /// Compute the canonical equivariant Levi reduction
    Reduce { instance: String },
    /// Intertwine two reduction reports over the same instance
    Compare {
        instance: String,
        report_a: PathBuf,
        report_b: PathBuf,
    },
    /// Unipotent radical, Levi quotient, and action classification
    Quotient { instance: String },
    /// Replay the certificates of a report against its instance
    Verify {
        instance: String,
        report: PathBuf,
    },
    /// Batch operations over a directory of instances
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Run the reduction pipeline over every instance in a directory
    Run {
        #[arg(default_value = "corpus")]
        dir: PathBuf,
    },
}

fn read_instance(spec: &str, cli: &Cli) -> Result<Instance, Error> {
    let text = if spec == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(spec).map_err(|e| Error::Parse(format!("{spec}: {e}")))?
    };
    let mut inst = Instance::parse(&text)?;
    if let Some(s) = cli.seed {
        inst.options.seed = s;
    }
    if let Some(c) = cli.conductor_max {
        inst.options.conductor_max = c;
    }
    if let Some(b) = cli.coeff_bound {
        inst.options.coeff_bound = b;
    }
    Ok(inst)
}

fn read_report(path: &PathBuf) -> Result<Value, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad report JSON: {e}")))
}

fn run(cli: &Cli) -> Result<RunOutcome, Error> {
    match &cli.command {
        Command::Split { instance } => run_split(&read_instance(instance, cli)?),
        Command::Aut { instance } => run_aut(&read_instance(instance, cli)?),
        Command::Reduce { instance } => run_reduce(&read_instance(instance, cli)?),
        Command::Compare {
            instance,
            report_a,
            report_b,
        } => run_compare(
            &read_instance(instance, cli)?,
            &read_report(report_a)?,
            &read_report(report_b)?,
        ),
        Command::Quotient { instance } => run_quotient(&read_instance(instance, cli)?),
        Command::Verify { instance, report } => {
            run_verify(&read_instance(instance, cli)?, &read_report(report)?)
        }
        Command::Corpus {
            command: CorpusCommand::Run { dir },
        } => corpus_run(dir, cli),
    }
}

fn corpus_run(dir: &PathBuf, cli: &Cli) -> Result<RunOutcome, Error> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map_or(false, |x| x == "json"))
        .collect();
    entries.sort();
    if entries.is_empty() {
        return Err(Error::Parse(format!(
            "no instance files in {}",
            dir.display()
        )));
    }
    let mut results = vec![];
    let mut worst = 0i32;
    for path in &entries {
        let inst = read_instance(path.to_str().unwrap(), cli)?;
        let split = report::run_split(&inst)?;
        let reduce = report::run_reduce(&inst)?;
        let quotient = if inst.gamma.is_some() {
            Some(report::run_quotient(&inst)?)
        } else {
            None
        };
        worst = worst.max(if reduce.exit_code == 1 { 0 } else { reduce.exit_code });
        results.push(serde_json::json!({
            "instance": inst.name,
            "file": path.file_name().unwrap().to_str(),
            "type": split.report["type"],
            "partition": reduce.report["partition"],
            "reduce_exit": reduce.exit_code,
            "verdict": quotient.map(|q| q.report["verdict"].clone()),
        }));
    }
    Ok(RunOutcome {
        report: serde_json::json!({
            "command": "corpus run",
            "count": results.len(),
            "results": results,
        }),
        exit_code: worst,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", canonical_string(&out.report));
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
