// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};
use serde_json::Value;

mod args;
mod commands;
mod error;
mod io;

use args::{Cli, Command};
use error::CliError;

fn main() -> ExitCode {
    let code = match run(std::env::args_os().collect()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn run(argv: Vec<OsString>) -> Result<(), CliError> {
    configure_threads()?;
    let argv = merge_config(argv)?;
    let cmd = Cli::command().mut_subcommands(|s| {
        s.args_override_self(true).mut_args(|a| {
            if a.get_action().takes_values() {
                a.allow_negative_numbers(true)
            } else {
                a
            }
        })
    });
    let matches = match cmd.try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            // Help and version go to stdout with status 0; everything else is a usage error.
            let code = e.exit_code();
            let _ = e.print();
            if code == 0 {
                return Ok(());
            }
            return Err(CliError::Usage("invalid command line".into()));
        }
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::Usage(e.to_string()))?;
    commands::dispatch(&cli.command)
}

/// `SL2H_THREADS` caps the worker pool.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SL2H_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("SL2H_THREADS must be a positive integer, got '{raw}'")))?;
    // A second initialization (e.g. in tests) is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Insert the keys of `--config file.json` as flags directly after the
/// subcommand name, so that flags given on the command line (parsed later,
/// with later occurrences overriding earlier ones) win.
fn merge_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let path = argv.iter().enumerate().find_map(|(i, a)| {
        let s = a.to_str()?;
        if s == "--config" {
            argv.get(i + 1).cloned()
        } else {
            s.strip_prefix("--config=").map(OsString::from)
        }
    });
    let Some(path) = path else {
        return Ok(argv);
    };
    let value = io::read_json(std::path::Path::new(&path))?;
    let Value::Object(map) = value else {
        return Err(CliError::Usage("config file must hold a JSON object".into()));
    };
    let mut flags = Vec::new();
    for (key, v) in map {
        if key == "command" || key == "config" {
            continue;
        }
        let flag = OsString::from(format!("--{}", key.replace('_', "-")));
        match v {
            Value::Bool(true) => flags.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => flags.extend([flag, s.into()]),
            Value::Number(n) => flags.extend([flag, n.to_string().into()]),
            Value::Array(items) => {
                let joined: Vec<String> = items
                    .iter()
                    .map(|x| match x {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                flags.extend([flag, joined.join(",").into()]);
            }
            Value::Object(_) => {
                return Err(CliError::Usage(format!("config key '{key}' holds an object")));
            }
        }
    }
    let at = argv
        .iter()
        .position(|a| a.to_str().is_some_and(|s| Command::NAMES.contains(&s)))
        .ok_or_else(|| CliError::Usage("no subcommand given".into()))?;
    let mut out = argv[..=at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&argv[at + 1..]);
    Ok(out)
}
