use crate::cli::{Cli, CliError, Command};

mod analyze;
mod common;
mod evaluate;
mod lexicon_stats;
mod score;
mod split;
mod train;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Score(args) => score::run(args),
        Command::Evaluate(args) => evaluate::run(args),
        Command::Split(args) => split::run(args),
        Command::Train(args) => train::run(args),
        Command::Analyze(args) => analyze::run(args),
        Command::LexiconStats(args) => lexicon_stats::run(args),
    }
}
