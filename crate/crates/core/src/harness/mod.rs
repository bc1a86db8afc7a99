//! Experiment runner: configuration, Monte Carlo BER runs, result files and
//! figure data.

mod config;
mod figures;
mod results;
mod run;

pub use config::{
    parse_key_spec, Experiment, ExperimentConfig, Receiver, ReceiverSpec, SenderSpec, SnrMode,
    SweepSpec, DEFAULT_SYMBOLS_PER_POINT, MIN_SYMBOLS_PER_POINT,
};
pub use figures::{
    eavesdropper_summary, emit_figure_data, fig5_table, summarize, FigureId, FigureTable, Summary,
    EAVESDROPPER_PREFIX, ROSTER,
};
pub use results::{
    read_results, write_results, write_results_with_metadata, BerRecord, CSV_HEADER,
    TIMESTAMP_PREFIX,
};
pub use run::{
    run_experiment, run_experiment_with_threads, simulate_link, symbol_correct_count, Tally,
};

use std::time::{SystemTime, UNIX_EPOCH};

/// Metadata lines recorded at the top of every result file.
pub fn result_metadata(exp: &Experiment) -> Vec<(String, String)> {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let pl = &exp.path_loss;
    let mut meta = vec![
        ("generated_unix".to_string(), now.to_string()),
        ("tool".to_string(), format!("cdiv {}", env!("CARGO_PKG_VERSION"))),
        ("seed".to_string(), exp.seed.to_string()),
        ("symbols_per_point".to_string(), exp.symbols_per_point.to_string()),
        (
            "snr_mode".to_string(),
            match exp.snr_mode {
                SnrMode::Receive => "receive".to_string(),
                SnrMode::Reference => "reference".to_string(),
            },
        ),
        (
            "sweep_db".to_string(),
            exp.sweep_db.iter().map(f64::to_string).collect::<Vec<_>>().join(" "),
        ),
        (
            "path_loss".to_string(),
            format!("alpha={} d_ref={} m", pl.alpha, pl.d_ref),
        ),
        (
            "sender".to_string(),
            format!("{} key={}", exp.sender.label(), exp.sender.key()),
        ),
    ];
    for r in &exp.receivers {
        let loss = pl.loss_db(r.distance_m).unwrap_or(f64::NAN);
        meta.push((
            format!("receiver {}", r.label),
            format!(
                "scheme={} key={} distance_m={} path_loss_db={loss}",
                r.scheme.label(),
                r.scheme.key(),
                r.distance_m
            ),
        ));
    }
    meta
}

/// Resolves, runs and persists an experiment.
pub fn run_to_file(
    cfg: &ExperimentConfig,
    base_dir: Option<&std::path::Path>,
    out: impl AsRef<std::path::Path>,
) -> crate::error::Result<Vec<BerRecord>> {
    let exp = cfg.resolve(base_dir)?;
    let records = run_experiment(&exp)?;
    write_results_with_metadata(&records, &result_metadata(&exp), out)?;
    Ok(records)
}
