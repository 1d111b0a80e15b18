//! Pipeline commands behind the `evdeblur` binary.
//!
//! Each command is a function of a [`PipelineConfig`] that reads its inputs
//! and writes its artifacts under `config.out`. Settings come from a flat
//! `key = value` file given with `--config`; `--set key=value` and the
//! dedicated flags override it in that order.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{
    cmd_blur, cmd_deblur, cmd_eval, cmd_flow, cmd_reblur, cmd_simulate, cmd_timesurface, estimate_flows,
    load_events, names, DeblurOutcome, FlowSource,
};
pub use config::{FlowMethod, PatternKind, PipelineConfig};

use crate::error::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "evdeblur", version, about = "Event-based motion deblurring pipeline")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Flat key = value config file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Only log warnings and errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Override any config key; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, global = true, value_name = "PATH")]
    events: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH")]
    blurry: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH")]
    frames: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH")]
    truth: Option<PathBuf>,
    /// Per-interval flow directory; deblur skips estimation when given.
    #[arg(long, global = true, value_name = "DIR")]
    flows: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Render a moving scene; write events, blurry frame and ground truth.
    Simulate,
    /// Average a sharp sequence into a blurry frame.
    Blur,
    /// Estimate per-interval flows from events.
    Flow,
    /// Recover sharp keyframes from a blurry frame and its events.
    Deblur,
    /// Reblur keyframes under per-interval flows.
    Reblur,
    /// Render the time surface of an event file.
    Timesurface,
    /// Score frames against ground truth.
    Eval,
    /// Print every config key with its default value.
    Keys,
}

impl Args {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::from_file(p)?,
            None => PipelineConfig::default(),
        };
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::arg(format!("--set expects KEY=VALUE, got '{kv}'")))?;
            cfg.set(k.trim(), v).map_err(Error::Argument)?;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        let paths = [
            (&self.events, &mut cfg.events),
            (&self.blurry, &mut cfg.blurry),
            (&self.frames, &mut cfg.frames),
            (&self.truth, &mut cfg.truth),
            (&self.flows, &mut cfg.flows),
        ];
        for (flag, slot) in paths {
            if flag.is_some() {
                slot.clone_from(flag);
            }
        }
        Ok(cfg)
    }
}

fn dispatch(command: Command, cfg: &PipelineConfig) -> Result<()> {
    match command {
        Command::Simulate => cmd_simulate(cfg).map(drop),
        Command::Blur => cmd_blur(cfg).map(drop),
        Command::Flow => cmd_flow(cfg).map(drop),
        Command::Deblur => cmd_deblur(cfg).map(drop),
        Command::Reblur => cmd_reblur(cfg).map(drop),
        Command::Timesurface => cmd_timesurface(cfg).map(drop),
        Command::Eval => cmd_eval(cfg).map(drop),
        Command::Keys => {
            print!("{}", cfg.to_text());
            Ok(())
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code: 0 success, 2 argument, 3 I/O or parse,
/// 4 numerical.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = if args.quiet { log::LevelFilter::Warn } else { log::LevelFilter::Info };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .parse_default_env()
        .try_init();
    match args.config().and_then(|cfg| dispatch(args.command, &cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
