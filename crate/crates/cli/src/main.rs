use clap::Parser;
use tracing_subscriber::EnvFilter;
use verbsense_cli::cli::{self, Cli, Command};

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Run(args) => {
            let report = tokio::task::spawn_blocking(move || cli::run(&args)).await??;
            cli::print_summary(&report);
        }
        Command::Gen(args) => cli::gen(&args)?,
        Command::Score(args) => println!("{}", cli::score(&args)?),
        Command::Serve(args) => cli::serve(&args).await?,
    }
    Ok(())
}
