use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use handover::{batch, scenario_file, trace_io};
use handover_core::sim::{audit, run, Mode};

const EXIT_PARSE: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

#[derive(Parser)]
#[command(version, about = "Reactive handover simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print its metrics as JSON.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
        /// Write the per-tick trace (JSONL) here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run every scenario in a directory for each seed and write a CSV summary.
    Batch {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Re-check the safety and velocity invariants of a trace.
    Verify {
        #[arg(long)]
        trace: PathBuf,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Mode::ALL.iter().map(|m| m.as_str()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, seed, mode, trace } => cmd_run(scenario, seed, mode, trace),
        Command::Batch { dir, seeds, out, mode, threads } => cmd_batch(dir, seeds, out, mode, threads),
        Command::Verify { trace } => cmd_verify(trace),
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn cmd_run(path: PathBuf, seed: Option<u64>, mode: Option<Mode>, trace: Option<PathBuf>) -> ExitCode {
    let mut s = match scenario_file::load(&path) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_PARSE, e),
    };
    if let Some(seed) = seed {
        s.seed = seed;
    }
    if let Some(m) = mode {
        s.mode = m;
    }
    let out = match run(&s) {
        Ok(o) => o,
        Err(e) => return fail(EXIT_PARSE, e),
    };
    if let Some(p) = trace {
        let written = File::create(&p).and_then(|f| trace_io::write_trace(BufWriter::new(f), &out.header, &out.records));
        if let Err(e) = written {
            return fail(1, format!("{}: {e}", p.display()));
        }
    }
    let m = &out.metrics;
    let summary = serde_json::json!({
        "scenario": s.name,
        "mode": s.mode,
        "seed": s.seed,
        "success": m.success,
        "time_to_success": m.time_to_success,
        "attempts": m.attempts,
        "ticks": out.records.len(),
        "digest": trace_io::digest(&out),
    });
    println!("{summary}");
    match audit(&out.header, &out.records) {
        Ok(()) => ExitCode::SUCCESS,
        Err(v) => fail(EXIT_INVARIANT, v),
    }
}

fn cmd_batch(dir: PathBuf, seeds: Vec<u64>, out: PathBuf, mode: Option<Mode>, threads: usize) -> ExitCode {
    let (scenarios, failures) = match batch::load_dir(&dir, mode) {
        Ok(x) => x,
        Err(e) => return fail(EXIT_PARSE, format!("{e:#}")),
    };
    for f in &failures {
        eprintln!("skipped: {f}");
    }
    let results = match batch::run_all(&scenarios, &seeds, threads) {
        Ok(r) => r,
        Err(e) => return fail(1, e),
    };
    for r in results.iter().filter(|r| r.error.is_some()) {
        eprintln!("{} seed {}: {}", r.scenario, r.seed, r.error.as_deref().unwrap_or_default());
    }
    let rows = batch::summarize(&results);
    let written = File::create(&out)
        .map_err(anyhow::Error::from)
        .and_then(|f| batch::write_summary(BufWriter::new(f), &rows));
    if let Err(e) = written {
        return fail(1, format!("{}: {e}", out.display()));
    }
    ExitCode::SUCCESS
}

fn cmd_verify(path: PathBuf) -> ExitCode {
    let read = File::open(&path)
        .map_err(trace_io::TraceError::from)
        .and_then(|f| trace_io::read_trace(BufReader::new(f)));
    let (header, records) = match read {
        Ok(x) => x,
        Err(e) => return fail(EXIT_PARSE, format!("{}: {e}", path.display())),
    };
    match audit(&header, &records) {
        Ok(()) => {
            println!("ok: {} ticks", records.len());
            ExitCode::SUCCESS
        }
        Err(v) => fail(EXIT_INVARIANT, v),
    }
}
