//! `reclab`: exit 0 on success, 1 when a checked property fails, 2 on bad
//! input, 3 when a capacity cap is hit.

mod args;
mod commands;
mod config;
mod output;
mod recheck;

use std::io::Write as _;
use std::process::ExitCode;

use clap::Parser;

use args::*;
use config::{merge, Outcome};
use output::{provenance, render, Loader, Report};

fn run(cli: Cli) -> Outcome<(String, bool)> {
    let Cli { mut global, command } = cli;
    let mut loader = Loader::default();
    macro_rules! go {
        ($name:expr, $args:expr, |$a:ident| $body:expr) => {{
            let mut $a = $args;
            let config = merge(&mut global, &mut $a)?;
            let report: Report = $body;
            (String::from($name), config, report)
        }};
    }
    let recheck = |g: &Global| g.recheck;
    let (name, config, report) = match command {
        Command::Space(SpaceCmd::Validate(a)) => go!("space validate", a, |a| commands::space_validate(&a, &mut loader)?),
        Command::System(SystemCmd::Build(a)) => go!("system build", a, |a| commands::system_build(&a, &mut loader)?),
        Command::Chain(ChainCmd::Mincycle(a)) => go!("chain mincycle", a, |a| commands::chain_mincycle(&a, &mut loader)?),
        Command::Recur(RecurCmd::Compute(a)) => {
            go!("recur compute", a, |a| commands::recur_compute(&a, recheck(&global), &mut loader)?)
        }
        Command::Recur(RecurCmd::VerifyProduct(a)) => {
            go!("recur verify-product", a, |a| commands::verify_product(&a, &mut loader)?)
        }
        Command::Recur(RecurCmd::Recheck(a)) => go!("recur recheck", a, |a| commands::recur_recheck(&a, &mut loader)?),
        Command::Nw(NwCmd::ReturnTimes(a)) => go!("nw return-times", a, |a| commands::nw_return_times(&a, &mut loader)?),
        Command::Nw(NwCmd::Check(a)) => go!("nw check", a, |a| commands::nw_check(&a, &mut loader)?),
        Command::Nw(NwCmd::Witness(a)) => go!("nw witness", a, |a| commands::nw_witness(&a, &mut loader)?),
        Command::Numtheory(NumtheoryCmd::Approx(a)) => {
            go!("numtheory approx", a, |a| commands::numtheory_approx(&a, recheck(&global))?)
        }
        Command::VerifyAll(a) => go!("verify-all", a, |a| commands::verify_all(&a)?),
    };
    let text = render(&report, global.format.unwrap_or_default(), provenance(&name, &config, &loader))?;
    match &global.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| config::input(format!("{}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok((text, report.ok))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((_, true)) => ExitCode::SUCCESS,
        Ok((_, false)) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code() as u8)
        }
    }
}
