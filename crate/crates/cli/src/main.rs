use std::io::Write;

fn main() {
    let (stdout, stderr, code) = bshq_cli::run(std::env::args_os());
    print!("{stdout}");
    eprint!("{stderr}");
    let _ = std::io::stdout().flush();
    std::process::exit(code);
}
