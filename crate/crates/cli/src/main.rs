use std::io::Write;

fn main() {
    let (out, code) = hedgehog_cli::run(std::env::args_os(), &mut std::io::stdin().lock());
    let mut stdout = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    std::process::exit(code);
}
