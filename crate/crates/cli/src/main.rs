use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use multivis::events::io::read_events;
use multivis::geometry::{fixtures, Geometry};
use multivis::kernel::VisManager;
use multivis::shell::Shell;

/// Visualisation kernel with a `/vis/` command shell.
#[derive(Parser, Debug)]
#[command(name = "multivis", version)]
struct Cli {
    /// Geometry description (JSON). The built-in four-volume example is used otherwise.
    #[arg(long)]
    geometry: Option<PathBuf>,
    /// Event file (JSON); its events are consumed by /run/beamOn before toy events.
    #[arg(long)]
    events: Option<PathBuf>,
    /// Macro executed before the prompt (or instead of it with --batch).
    #[arg(long = "macro")]
    macro_file: Option<PathBuf>,
    /// Exit after the macro instead of starting the prompt.
    #[arg(long)]
    batch: bool,
    /// Directory for driver output files (default: the working directory).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads for the ray tracer.
    #[arg(long)]
    threads: Option<usize>,
}

fn flush(shell: &mut Shell) {
    for line in shell.take_printout() {
        println!("{line}");
    }
}

fn build_shell(cli: &Cli) -> anyhow::Result<Shell> {
    let geometry = match &cli.geometry {
        Some(p) => Geometry::from_json_file(p).with_context(|| format!("loading geometry {}", p.display()))?,
        None => fixtures::b1(),
    };
    let mut vis = VisManager::new(geometry);
    if let Some(p) = &cli.events {
        let events = read_events(p).with_context(|| format!("loading events {}", p.display()))?;
        vis.queue_events(events);
    }
    let dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    vis.out_dir = Some(dir);
    vis.threads = cli.threads;
    Ok(Shell::new(vis))
}

fn repl(shell: &mut Shell) -> io::Result<()> {
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        print!("vis> ");
        io::stdout().flush()?;
        let Some(line) = lines.next().transpose()? else { break };
        let line = line.trim();
        if line == "exit" {
            break;
        }
        if let Err(e) = shell.execute(line) {
            flush(shell);
            eprintln!("ERROR: {e}");
        }
        flush(shell);
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let mut shell = match build_shell(&cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("ERROR: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    if let Some(m) = &cli.macro_file {
        if let Err(e) = shell.execute_macro(m) {
            flush(&mut shell);
            eprintln!("ERROR: {e}");
        }
        flush(&mut shell);
    }
    let macro_errors = shell.errors;
    if !cli.batch {
        if let Err(e) = repl(&mut shell) {
            eprintln!("ERROR: {e}");
            return ExitCode::FAILURE;
        }
    }
    if macro_errors == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
