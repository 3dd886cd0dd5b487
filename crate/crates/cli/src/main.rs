use std::process::ExitCode;

use clap::Parser;
use ftkit_cli::{configure_threads, execute, Cli, CliError, Status, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK};

fn write_outputs(cli: &Cli, out: &ftkit_cli::Outcome) -> Result<(), CliError> {
    let Some(dir) = &cli.global.out else {
        return Ok(());
    };
    let io = |e: std::io::Error| CliError::Input(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    for (name, bytes) in &out.files {
        std::fs::write(dir.join(name), bytes).map_err(io)?;
    }
    std::fs::write(dir.join("report.json"), to_json(&out.bundle)).map_err(io)?;
    Ok(())
}

fn to_json(b: &ftkit_cli::ReportBundle) -> String {
    let mut s = serde_json::to_string_pretty(b).expect("report serializes");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    configure_threads()?;
    let out = execute(cli)?;
    write_outputs(cli, &out)?;
    if cli.global.json {
        print!("{}", to_json(&out.bundle));
    } else {
        print!("{}", out.bundle.render());
    }
    Ok(match out.status {
        Status::Ok => EXIT_OK,
        Status::Miss => EXIT_INFEASIBLE,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    debug_assert!([EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT].contains(&code));
    ExitCode::from(code as u8)
}
