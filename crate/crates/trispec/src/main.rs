use clap::Parser;

fn main() {
    let cli = match trispec::cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own help/version output is not an error
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    if let Err(e) = trispec::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(trispec::cli::exit_code(&e));
    }
}
