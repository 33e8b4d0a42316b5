use std::process::exit;

use beamba::harness::{emit_csv, parse_cli, run_sweep, CliOutcome};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let invocation = match parse_cli(&args) {
        Ok(CliOutcome::Print(text)) => {
            println!("{text}");
            return;
        }
        Ok(CliOutcome::Run(invocation)) => *invocation,
        Err(e) => {
            eprintln!("{e}");
            exit(2);
        }
    };

    let config = &invocation.config;
    eprintln!(
        "sweep: N={} M={} trials={} seed={} mode={:?} schemes={:?} b_bar={:?}",
        config.n_antennas,
        config.n_users,
        config.trials,
        config.seed,
        config.quantizer_mode,
        config.schemes,
        config.b_bar_list,
    );

    match run_sweep(config) {
        Ok(table) => {
            if let Err(e) = emit_csv(&table, &invocation.out_path) {
                eprintln!("cannot write {}: {e}", invocation.out_path.display());
                exit(1);
            }
            eprintln!("wrote {} rows to {}", table.rows.len(), invocation.out_path.display());
        }
        Err(e) => {
            eprintln!("sweep failed: {e}");
            exit(1);
        }
    }
}
