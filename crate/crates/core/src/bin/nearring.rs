use std::io::Write;

fn main() {
    let outcome = nearring_core::cli::run(std::env::args_os());
    if let Some(msg) = &outcome.message {
        if outcome.code == 0 {
            print!("{msg}");
        } else {
            eprintln!("{}", msg.trim_end());
        }
    }
    if let Some(report) = &outcome.report {
        let has_out = std::env::args().any(|a| a == "--out" || a.starts_with("--out="));
        if !has_out {
            let text = serde_json::to_string_pretty(report).expect("serializable report");
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{text}");
        }
    }
    std::process::exit(outcome.code);
}
