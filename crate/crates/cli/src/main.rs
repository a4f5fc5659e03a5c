use std::io;

fn main() {
    let env = std::env::var(cuspdet_cli::config::PRECISION_ENV).ok();
    let code = cuspdet_cli::run(std::env::args_os(), env.as_deref(), &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code);
}
