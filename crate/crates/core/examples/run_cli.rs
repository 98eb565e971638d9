//! Drives the command-line entry point in-process: `verify` on the
//! reference problem, writing into a temporary directory.

fn main() {
    let out = std::env::temp_dir().join("dgs-example-verify");
    let code = dgs::cli::main_with_args(["dgs", "verify", "--grid-n", "2048", "--output", out.to_str().unwrap()]);
    println!("exit code {code}");
    if let Ok(text) = std::fs::read_to_string(out.join("verify_report.txt")) {
        for line in text.lines().take_while(|l| l.ends_with("=pass") || l.ends_with("=fail")) {
            println!("{line}");
        }
    }
}
