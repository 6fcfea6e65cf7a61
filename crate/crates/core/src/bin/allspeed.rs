use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use allspeed::cli::{build_config, run, to_config_text, ConfigDocument};
use allspeed::Error;

/// Run a configured all-speed flux-scheme case and write its data files.
#[derive(Parser, Debug)]
#[command(name = "allspeed", version)]
struct Args {
    /// Run configuration file.
    config: PathBuf,
    /// Directory for the emitted files (overrides [output] dir).
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Scheme preset or dissipation name, e.g. roe, p-roe, a-roe-p.
    #[arg(long)]
    scheme: Option<String>,
    /// Reference Mach number of the case.
    #[arg(long)]
    mach: Option<f64>,
    /// Print the fully resolved configuration and exit.
    #[arg(long)]
    dump_config: bool,
    /// Suppress progress output.
    #[arg(long, short)]
    quiet: bool,
}

fn config_error(e: &Error) -> bool {
    matches!(e, Error::Parse { .. } | Error::Config(_) | Error::InvalidGrid(_))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let cfg = ConfigDocument::parse(&text).and_then(|mut doc| {
        if let Some(s) = &args.scheme {
            // a bare preset replaces any finer selectors in the file
            doc.entries.retain(|e| !(e.section == "scheme" && (e.key == "dissipation" || e.key == "central")));
            doc.set("scheme", "scheme", s);
        }
        if let Some(m) = args.mach {
            doc.set("case", "mach", &format!("{m:?}"));
        }
        let mut cfg = build_config(&doc)?;
        if let Some(d) = &args.output_dir {
            cfg.output_dir = d.clone();
        }
        Ok(cfg)
    });
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    if args.dump_config {
        print!("{}", to_config_text(&cfg));
        return ExitCode::SUCCESS;
    }
    let quiet = args.quiet;
    match run(&cfg, &mut |line| {
        if !quiet {
            println!("{line}");
        }
    }) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if config_error(&e) { 2 } else { 1 })
        }
    }
}
