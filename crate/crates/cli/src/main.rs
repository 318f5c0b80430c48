mod args;
mod commands;
mod io;

use args::{Cli, Command};
use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches};
use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let mut cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };

    if let Some(config) = cli.config.clone() {
        if let Err(e) = apply_config(&mut cli.command, &config, &matches) {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }

    log_run(&cli.command);

    let result = match &cli.command {
        Command::Esd(a) => commands::cmd_esd(a),
        Command::Transform(a) => commands::cmd_transform(a),
        Command::Convolve(a) => commands::cmd_convolve(a),
        Command::Simulate(a) => commands::cmd_simulate(a),
        Command::Signature(a) => commands::cmd_signature(a),
        Command::Decompose(a) => commands::cmd_decompose(a),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    use freespec::Error;
    if let Some(e) = err.downcast_ref::<Error>() {
        return match e {
            Error::ConvolutionFailure { .. } => 4,
            Error::TooManyCombos { .. } => 5,
            Error::InvalidDimension(_)
            | Error::InvalidRatio { .. }
            | Error::InvalidContour(_)
            | Error::InvalidLaw(_)
            | Error::InvalidConfig(_)
            | Error::DegenerateRow { .. }
            | Error::NotSymmetric { .. }
            | Error::EmptyLibrary
            | Error::UnsupportedAnalytic => 3,
            _ => 1,
        };
    }
    if err.downcast_ref::<io::UnreadableInput>().is_some()
        || err.downcast_ref::<std::io::Error>().is_some()
        || err.downcast_ref::<csv::Error>().is_some()
    {
        return 2;
    }
    1
}

/// Every run logs its seed, a digest of the resolved configuration, and the
/// artifact version; re-running with the logged seed reproduces the outputs.
fn log_run(command: &Command) {
    let (name, seed) = match command {
        Command::Esd(a) => ("esd", a.seed),
        Command::Transform(a) => ("transform", a.seed),
        Command::Convolve(a) => ("convolve", a.seed),
        Command::Simulate(a) => ("simulate", a.seed),
        Command::Signature(_) => ("signature", None),
        Command::Decompose(_) => ("decompose", None),
    };
    let digest = fnv1a64(format!("{command:?}").as_bytes());
    eprintln!(
        "run: command={name} seed={} config_digest={digest:016x} version={}",
        seed.map(|s| s.to_string()).unwrap_or_else(|| "0 (default)".into()),
        env!("CARGO_PKG_VERSION"),
    );
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Key=value config file: supplies defaults for seed and contour parameters
/// when the matching flag was not given explicitly.
fn parse_config(path: &Path) -> anyhow::Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(anyhow::anyhow!(
                "config {}:{}: expected key = value",
                path.display(),
                lineno + 1
            ));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn is_default(matches: &ArgMatches, id: &str) -> bool {
    !matches!(matches.value_source(id), Some(ValueSource::CommandLine))
}

fn apply_config(command: &mut Command, path: &Path, matches: &ArgMatches) -> anyhow::Result<()> {
    let cfg = parse_config(path)?;
    let Some((_, sub)) = matches.subcommand() else {
        return Ok(());
    };
    let parse = |key: &str| -> anyhow::Result<Option<f64>> {
        match cfg.get(key) {
            Some(v) => Ok(Some(v.parse::<f64>().map_err(|e| {
                anyhow::anyhow!("config key {key}: {e}")
            })?)),
            None => Ok(None),
        }
    };
    let seed_cfg: Option<u64> = match cfg.get("seed") {
        Some(v) => Some(
            v.parse::<u64>()
                .map_err(|e| anyhow::anyhow!("config key seed: {e}"))?,
        ),
        None => None,
    };

    let apply_contour = |contour: &mut args::ContourArgs| -> anyhow::Result<()> {
        if is_default(sub, "xmin") {
            if let Some(v) = parse("xmin")? {
                contour.xmin = v;
            }
        }
        if is_default(sub, "xmax") {
            if let Some(v) = parse("xmax")? {
                contour.xmax = v;
            }
        }
        if is_default(sub, "nodes") {
            if let Some(v) = parse("nodes")? {
                contour.nodes = v as usize;
            }
        }
        if is_default(sub, "eps") {
            if let Some(v) = parse("eps")? {
                contour.eps = v;
            }
        }
        Ok(())
    };

    match command {
        Command::Esd(a) => {
            if a.seed.is_none() {
                a.seed = seed_cfg;
            }
        }
        Command::Transform(a) => {
            if a.seed.is_none() {
                a.seed = seed_cfg;
            }
            apply_contour(&mut a.contour)?;
        }
        Command::Convolve(a) => {
            if a.seed.is_none() {
                a.seed = seed_cfg;
            }
            apply_contour(&mut a.contour)?;
        }
        Command::Simulate(a) => {
            if a.seed.is_none() {
                a.seed = seed_cfg;
            }
        }
        Command::Signature(a) => apply_contour(&mut a.contour)?,
        Command::Decompose(a) => apply_contour(&mut a.contour)?,
    }
    Ok(())
}
