//! Config-driven experiment runner: builds warped-product geometry, runs the
//! verification suite for one named experiment, and writes machine-readable
//! reports (JSON, CSV, SVG plots) into a per-experiment output directory.

mod config;
mod experiments;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use config::Config;

const USAGE: &str = "\
usage: warpiso <experiment> --config <file> [--out <dir>] [--resolution N] [--seed S]
       warpiso list
       warpiso --help

Runs one named experiment from a flat `key = value` config file and writes
report.json, report.csv, run.log, and SVG plots into the output directory.
Exit status: 0 when every verdict holds, 1 when some verdict fails,
2 on usage or config errors.

options:
  --config <file>    experiment parameters; may be omitted for experiments
                     whose keys all have defaults
  --out <dir>        output directory (default: $WARPISO_OUT or ./runs,
                     plus the experiment name)
  --resolution <N>   grid override: N nodes on circle fibers, N x 2N on
                     sphere fibers
  --seed <S>         seed for the random shape families (default 0)
";

fn main() -> ExitCode {
    match cli_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn flag_value(args: &[String], i: &mut usize) -> Result<String, String> {
    let flag = &args[*i];
    let value = args
        .get(*i + 1)
        .ok_or_else(|| format!("{flag} needs a value"))?;
    *i += 2;
    Ok(value.clone())
}

fn cli_main() -> Result<bool, String> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        return Err(format!("missing experiment name\n{USAGE}"));
    }
    match args[0].as_str() {
        "--help" | "-h" | "help" => {
            print!("{USAGE}");
            println!("experiments:");
            for e in experiments::EXPERIMENTS {
                println!("  {e}");
            }
            return Ok(true);
        }
        "list" => {
            for e in experiments::EXPERIMENTS {
                println!("{e}");
            }
            return Ok(true);
        }
        _ => {}
    }

    let experiment = args[0].clone();
    let mut config_path: Option<PathBuf> = None;
    let mut out_dir: Option<PathBuf> = None;
    let mut resolution: Option<usize> = None;
    let mut seed: u64 = 0;
    let mut i = 1;
    while i < args.len() {
        match args[i].as_str() {
            "--config" => config_path = Some(PathBuf::from(flag_value(&args, &mut i)?)),
            "--out" => out_dir = Some(PathBuf::from(flag_value(&args, &mut i)?)),
            "--resolution" => {
                let v = flag_value(&args, &mut i)?;
                resolution = Some(
                    v.parse()
                        .map_err(|_| format!("--resolution: bad count `{v}`"))?,
                );
            }
            "--seed" => {
                let v = flag_value(&args, &mut i)?;
                seed = v.parse().map_err(|_| format!("--seed: bad seed `{v}`"))?;
            }
            other => return Err(format!("unknown flag `{other}`\n{USAGE}")),
        }
    }

    let cfg = match &config_path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            Config::parse(&text)?
        }
        None => Config::parse("")?,
    };

    let started = Instant::now();
    let run = experiments::run(&experiment, &cfg, resolution, seed)?;
    cfg.reject_unknown_keys()?;
    let wall_ms = started.elapsed().as_millis();

    let out_root = out_dir.unwrap_or_else(|| {
        std::env::var_os("WARPISO_OUT")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("runs"))
            .join(&experiment)
    });
    std::fs::create_dir_all(&out_root)
        .map_err(|e| format!("create {}: {e}", out_root.display()))?;

    // report.json: everything needed to reproduce the run, no timestamps.
    let report = serde_json::json!({
        "experiment": experiment,
        "config": cfg.echo_json(),
        "resolution": resolution,
        "seed": seed,
        "all_verdicts_hold": run.all_hold,
        "records": serde_json::to_value(&run.records).map_err(|e| e.to_string())?,
        "payload": run.payload,
    });
    let mut json_text =
        serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    json_text.push('\n');
    write_out(&out_root, "report.json", &json_text)?;

    write_out(
        &out_root,
        "report.csv",
        &warpiso_core::report::render_csv(run.records.iter()),
    )?;

    // Wall time lives only here, so the reports stay byte-reproducible.
    let log = format!(
        "experiment: {experiment}\nconfig: {}\nresolution: {}\nseed: {seed}\n\
         records: {}\nplots: {}\nall_verdicts_hold: {}\nwall_ms: {wall_ms}\n",
        config_path
            .as_deref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "(none)".into()),
        resolution.map(|n| n.to_string()).unwrap_or_else(|| "default".into()),
        run.records.len(),
        run.plots.len(),
        run.all_hold,
    );
    write_out(&out_root, "run.log", &log)?;

    for plot in &run.plots {
        write_out(&out_root, &format!("{}.svg", plot.name), &svg::render(plot))?;
    }

    let failing: Vec<_> = run.records.iter().filter(|r| !r.verdict).collect();
    println!("experiment: {experiment}");
    println!(
        "records:    {} ({} failing)",
        run.records.len(),
        failing.len()
    );
    for row in &failing {
        println!(
            "  FAIL {} | {} | {} | {} | margin {}",
            row.experiment, row.model, row.shape, row.weight, row.margin
        );
    }
    println!("output:     {}", out_root.display());
    println!("verdicts:   {}", if run.all_hold { "all hold" } else { "FAILED" });
    Ok(run.all_hold)
}

fn write_out(dir: &Path, file: &str, text: &str) -> Result<(), String> {
    let path = dir.join(file);
    std::fs::write(&path, text).map_err(|e| format!("write {}: {e}", path.display()))
}
