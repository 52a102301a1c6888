use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let stderr = io::stderr();
    let mut err = stderr.lock();
    // The fit summary table goes to stdout after the JSON unless the JSON
    // itself was sent to stdout; then it goes to stderr so stdout stays valid JSON.
    let args: Vec<String> = std::env::args().collect();
    let json_to_stdout = !args.iter().any(|a| a == "--output" || a.starts_with("--output="));
    let result = if json_to_stdout {
        bimodal_cli::run(args, &mut out, &mut err)
    } else {
        let mut info = Vec::new();
        let r = bimodal_cli::run(args, &mut out, &mut info);
        let _ = out.write_all(&info);
        r
    };
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(err, "{}", e.line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
