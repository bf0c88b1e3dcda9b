use clap::error::ErrorKind;
use clap::Parser;

use multifrac::cli::{self, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful outputs; everything else is
            // an input error (exit code 2 is reserved for geometry).
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            e.print().expect("cannot write diagnostics");
            std::process::exit(code);
        }
    };

    // Pin the pool size explicitly so worker count depends only on the
    // flag (and the machine), never on environment variables.
    let threads = if cli.threads == 0 {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    } else {
        cli.threads
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .expect("thread pool is initialized once");

    if let Err(e) = cli::run(cli) {
        eprintln!("error: {}", cli::error_chain(&e));
        std::process::exit(e.exit_code() as i32);
    }
}
