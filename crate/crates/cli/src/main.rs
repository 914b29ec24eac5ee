use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use varbico::cli::{run_text, Format, Options};
use varbico::lagcmp::Bounds;

/// Run a varbico session file.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on
/// malformed input, 3 when a comparison is undecided within the bounds.
#[derive(Parser, Debug)]
#[command(name = "varbico", version)]
struct Args {
    /// Session file, or `-` for standard input.
    file: PathBuf,
    /// Output format: text, latex or json.
    #[arg(long, default_value = "text")]
    format: Format,
    /// Search bounds for dh-exactness, as ORDER,DEGREE.
    #[arg(long, value_parser = parse_bounds, default_value = "2,2")]
    bounds: Bounds,
    /// Prolongation depth for integrability and compatibility checks.
    #[arg(long, default_value_t = varbico::descent::DEFAULT_DEPTH)]
    depth: usize,
}

fn parse_bounds(s: &str) -> Result<Bounds, String> {
    let (o, d) = s.split_once(',').ok_or("expected ORDER,DEGREE")?;
    Ok(Bounds {
        order: o.trim().parse().map_err(|e| format!("order: {e}"))?,
        degree: d.trim().parse().map_err(|e| format!("degree: {e}"))?,
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = if args.file.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(&args.file)
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", args.file.display());
            return ExitCode::from(2);
        }
    };
    let opts = Options {
        format: args.format,
        bounds: args.bounds,
        depth: args.depth,
    };
    let out = run_text(&text, &opts);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}
