//! Monte Carlo BER runs over an experiment grid.

use rand::RngCore;
use rayon::prelude::*;

use super::config::Experiment;
use super::results::BerRecord;
use crate::channel::AwgnChannel;
use crate::constellation::ConstellationScheme;
use crate::error::{Error, Result};
use crate::modem::{prefix_bit_errors, Detector};
use crate::rng;

// Substream tags; payload bits are shared by every receiver at a sweep point,
// noise is drawn per receiver.
const BITS_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

/// FNV-1a, so a receiver's noise stream depends on its label rather than its
/// position in the roster.
fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Error tallies for one (receiver, SNR) cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub symbols: u64,
    pub bit_errors: u64,
    pub symbol_errors: u64,
}

/// Transmits `symbols` uniformly random values drawn from `bits_rng` with
/// `tx`, adds noise from `noise_rng` and detects with `rx`.
///
/// `allowed`, when given, restricts the transmitted values to that list
/// (drawn uniformly from it); its length must be a power of two.
pub fn simulate_link(
    tx: &ConstellationScheme,
    rx: &ConstellationScheme,
    snr_db: f64,
    symbols: u64,
    bits_rng: &mut impl RngCore,
    noise_rng: &mut impl RngCore,
    allowed: Option<&[usize]>,
) -> Tally {
    let (m_tx, m_rx) = (tx.bits_per_symbol(), rx.bits_per_symbol());
    debug_assert!(m_rx <= m_tx);
    let table = tx.bit_map();
    let det = Detector::new(rx);
    let channel = AwgnChannel::from_snr_db(snr_db);
    let (pool, mask): (Vec<usize>, usize) = match allowed {
        Some(vals) => {
            debug_assert!(vals.len().is_power_of_two());
            (vals.to_vec(), vals.len() - 1)
        }
        None => ((0..tx.order()).collect(), tx.order() - 1),
    };
    let mut t = Tally {
        symbols,
        ..Tally::default()
    };
    for _ in 0..symbols {
        let v = pool[bits_rng.next_u32() as usize & mask];
        let y = table[v] + channel.sample(noise_rng);
        let errs = prefix_bit_errors(v, m_tx, det.decide(y), m_rx) as u64;
        t.bit_errors += errs;
        t.symbol_errors += (errs > 0) as u64;
    }
    t
}

fn run_cell(exp: &Experiment, sweep_idx: usize, rx_idx: usize) -> Result<BerRecord> {
    let rx = &exp.receivers[rx_idx];
    let snr_db = exp.effective_snr_db(exp.sweep_db[sweep_idx], rx.distance_m)?;
    let mut bits_rng = rng::stream(exp.seed, &[BITS_STREAM, sweep_idx as u64]);
    let mut noise_rng = rng::stream(
        exp.seed,
        &[NOISE_STREAM, sweep_idx as u64, label_hash(&rx.label)],
    );
    let t = simulate_link(
        &exp.sender,
        &rx.scheme,
        snr_db,
        exp.symbols_per_point,
        &mut bits_rng,
        &mut noise_rng,
        None,
    );
    Ok(BerRecord::from_counts(
        rx.label.clone(),
        snr_db,
        t.symbols * exp.sender.bits_per_symbol() as u64,
        t.symbols * rx.scheme.bits_per_symbol() as u64,
        t.bit_errors,
        t.symbol_errors,
        t.symbols,
    ))
}

/// Runs every (sweep point, receiver) cell on the global rayon pool.
///
/// Output is ordered by receiver (roster order) then SNR and does not depend
/// on the number of worker threads.
pub fn run_experiment(exp: &Experiment) -> Result<Vec<BerRecord>> {
    let cells: Vec<(usize, usize)> = (0..exp.receivers.len())
        .flat_map(|r| (0..exp.sweep_db.len()).map(move |s| (r, s)))
        .collect();
    cells
        .into_par_iter()
        .map(|(r, s)| run_cell(exp, s, r))
        .collect()
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(exp: &Experiment, threads: usize) -> Result<Vec<BerRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(exp))
}

/// Monte Carlo estimate of the rate at which `rx` returns exactly the value
/// sent by `tx`, optionally restricted to a subset of transmitted values.
/// Returns `(correct, trials)`.
pub fn symbol_correct_count(
    tx: &ConstellationScheme,
    rx: &ConstellationScheme,
    snr_db: f64,
    symbols: u64,
    seed: u64,
    allowed: Option<&[usize]>,
) -> Result<(u64, u64)> {
    if rx.bits_per_symbol() != tx.bits_per_symbol() {
        return Err(Error::InvalidArgument(
            "symbol-correct rate needs equal bits per symbol".into(),
        ));
    }
    if let Some(vals) = allowed {
        if !vals.len().is_power_of_two() || vals.iter().any(|&v| v >= tx.order()) {
            return Err(Error::InvalidArgument(
                "allowed values must be a power-of-two sized subset of the scheme".into(),
            ));
        }
    }
    // Split into fixed blocks so the result is independent of thread count.
    const BLOCK: u64 = 1 << 20;
    let blocks = symbols.div_ceil(BLOCK);
    let wrong: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let n = BLOCK.min(symbols - b * BLOCK);
            let mut bits_rng = rng::stream(seed, &[BITS_STREAM, b]);
            let mut noise_rng = rng::stream(seed, &[NOISE_STREAM, b]);
            simulate_link(tx, rx, snr_db, n, &mut bits_rng, &mut noise_rng, allowed).symbol_errors
        })
        .sum();
    Ok((symbols - wrong, symbols))
}
