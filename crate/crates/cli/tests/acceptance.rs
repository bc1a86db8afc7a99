//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Run with `cargo test -p cdiv-cli --test acceptance`.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cdiv_core::analytic::{
    p_correct_expanded, p_correct_numeric, p_correct_symbol, p_correct_total, rect_symbol_correct_rate,
    sweep_points, Interval, ProbeSymbol, Region, SnrPoint,
};
use cdiv_core::constellation::{ConstellationScheme, StandardScheme};
use cdiv_core::harness::{
    emit_figure_data, run_experiment, summarize, symbol_correct_count, ExperimentConfig, FigureId,
    TIMESTAMP_PREFIX,
};
use cdiv_core::rng::derive_seed;
use cdiv_core::secrecy::{
    keyspace_report, parse_prior, permanent, uniform_prior, unicity, verify_perfect_secrecy,
    BinaryMatrix, UnicityDistance,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn grid() -> Vec<f64> {
    sweep_points(0.0, 25.0, 0.5).unwrap()
}

// Composite Simpson over one axis of N(mean, n0/2), truncated to ±40σ.
fn axis_mass_simpson(iv: Interval, mean: f64, n0: f64) -> f64 {
    let sigma = (n0 / 2.0).sqrt();
    let lo = iv.lo.max(mean - 40.0 * sigma);
    let hi = iv.hi.min(mean + 40.0 * sigma);
    if hi <= lo {
        return 0.0;
    }
    let pdf = |x: f64| (-(x - mean).powi(2) / n0).exp() / (std::f64::consts::PI * n0).sqrt();
    let n = 4000;
    let h = (hi - lo) / n as f64;
    let mut s = pdf(lo) + pdf(hi);
    for i in 1..n {
        s += pdf(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn quadrature(tx: cdiv_core::constellation::ComplexPoint, region: &Region, n0: f64) -> f64 {
    axis_mass_simpson(region.re, tx.re, n0) * axis_mass_simpson(region.im, tx.im, n0)
}

fn c1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_quad = 0.0f64;
    for db in grid() {
        let snr = SnrPoint::from_db(db).unwrap();
        let mut total_oracle = 0.0;
        let mut total_quad = 0.0;
        for s in ProbeSymbol::ALL {
            let closed = p_correct_symbol(s, snr).unwrap().prob_correct;
            let oracle = p_correct_numeric(s.circular_point(), &s.rect_cell(), snr.n0()).unwrap();
            let quad = quadrature(s.circular_point(), &s.rect_cell(), snr.n0());
            worst = worst.max((closed - oracle).abs());
            worst_quad = worst_quad.max((closed - quad).abs());
            total_oracle += oracle / 4.0;
            total_quad += quad / 4.0;
        }
        let total = p_correct_total(snr).unwrap();
        worst = worst.max((total - total_oracle).abs());
        worst = worst.max((total - p_correct_expanded(snr)).abs());
        worst_quad = worst_quad.max((total - total_quad).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && worst_quad <= 1e-9 && elapsed < Duration::from_secs(1),
        format!(
            "51 points x (4 symbols + P(C)): max |closed - oracle| = {worst:.2e}, \
             max |closed - Simpson quadrature| = {worst_quad:.2e}, {:.3} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn c2_headline() -> Outcome {
    let pc = |db: f64| p_correct_total(SnrPoint::from_db(db).unwrap()).unwrap();
    let (p0, p10) = (pc(0.0), pc(10.0));
    let ok0 = (p0 - 0.015).abs() <= 0.005;
    let ok10 = (5e-4..=2e-3).contains(&p10);
    let values: Vec<f64> = grid().into_iter().map(pc).collect();
    let mono = values.windows(2).all(|w| w[1] < w[0]);
    outcome(
        ok0 && ok10 && mono,
        format!(
            "P(C) at 0 dB = {p0:.6} (target 0.015 +/- 0.005: {}), at 10 dB = {p10:.4e} \
             (target within x2 of 1e-3: {}), strictly decreasing 0-25 dB: {}",
            verdict(ok0),
            verdict(ok10),
            verdict(mono)
        ),
    )
}

fn sigmas(correct: u64, trials: u64, p: f64) -> f64 {
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    (correct as f64 / trials as f64 - p) / sigma
}

fn c3_monte_carlo() -> (Outcome, Outcome, Outcome) {
    let circ = ConstellationScheme::standard(StandardScheme::Qam16Circ);
    let rect = ConstellationScheme::standard(StandardScheme::Qam16Rect);
    let probes: Vec<usize> = ProbeSymbol::ALL.iter().map(|s| s.bit_value()).collect();
    let start = Instant::now();
    let (mut main, mut probe, mut exact) = (Vec::new(), Vec::new(), Vec::new());
    let (mut ok_main, mut ok_probe, mut ok_exact) = (true, true, true);
    for (i, db) in [0.0, 5.0, 10.0].into_iter().enumerate() {
        let snr = SnrPoint::from_db(db).unwrap();
        let pc = p_correct_total(snr).unwrap();
        let (c, n) = symbol_correct_count(&circ, &rect, db, 10_000_000, 7000 + i as u64, None).unwrap();
        let z = sigmas(c, n, pc);
        ok_main &= z.abs() <= 4.0;
        main.push(format!("{db} dB: {:.5} vs P(C) {pc:.5} ({z:+.1} sigma)", c as f64 / n as f64));

        let exact_rate = rect_symbol_correct_rate(&circ, snr).unwrap();
        let z = sigmas(c, n, exact_rate);
        ok_exact &= z.abs() <= 4.0;
        exact.push(format!("{db} dB: {:.5} vs {exact_rate:.5} ({z:+.1} sigma)", c as f64 / n as f64));

        let (c, n) =
            symbol_correct_count(&circ, &rect, db, 10_000_000, 8000 + i as u64, Some(&probes)).unwrap();
        let z = sigmas(c, n, pc);
        ok_probe &= z.abs() <= 4.0;
        probe.push(format!("{db} dB: {:.5} vs P(C) {pc:.5} ({z:+.1} sigma)", c as f64 / n as f64));
    }
    let elapsed = start.elapsed();
    (
        outcome(
            ok_main && elapsed < Duration::from_secs(60),
            format!(
                "1e7 uniform symbols per point, circular -> rectangular: {}; {:.1} s (with supplementary runs)",
                main.join("; "),
                elapsed.as_secs_f64()
            ),
        ),
        outcome(ok_probe, format!("1e7 symbols restricted to the four analysed symbols: {}", probe.join("; "))),
        outcome(
            ok_exact,
            format!("1e7 uniform symbols vs exact all-16-symbol region integral: {}", exact.join("; ")),
        ),
    )
}

fn c4_eavesdropper_band() -> Outcome {
    let start = Instant::now();
    let mut eve = Vec::new();
    let mut problems = Vec::new();
    let mut all = Vec::new();
    for n in 7..=12 {
        let path = configs_dir().join(format!("fig{n:02}.toml"));
        let cfg = ExperimentConfig::load(&path).unwrap();
        let exp = cfg.resolve(path.parent()).unwrap();
        let fig = FigureId::BerVsSnr(n);
        let (alpha, d) = fig.scenario().unwrap();
        let scenario_ok = exp.path_loss.alpha == alpha
            && exp.receivers.iter().all(|r| r.distance_m == d)
            && exp.sweep_db == sweep_points(0.0, 25.0, 1.0).unwrap()
            && exp.symbols_per_point == 1_000_000;
        if !scenario_ok {
            problems.push(format!("fig{n}: config does not match alpha={alpha}, d={d}, 0-25 dB, 1e6 symbols"));
        }
        let recs = run_experiment(&exp).unwrap();
        if let Err(e) = emit_figure_data(&recs, fig) {
            problems.push(format!("fig{n}: {e}"));
        }
        for r in recs.iter().filter(|r| r.receiver_label.starts_with("eve")) {
            if !(0.35..=0.65).contains(&r.ber) {
                problems.push(format!("fig{n} {} at {} dB: BER {}", r.receiver_label, r.snr_db, r.ber));
            }
            eve.push(r.ber);
        }
        let intended: Vec<f64> = recs.iter().filter(|r| r.receiver_label == "intended").map(|r| r.ber).collect();
        if !intended.windows(2).all(|w| w[1] <= w[0]) {
            problems.push(format!("fig{n}: intended BER not monotone"));
        }
        let last = *intended.last().unwrap();
        if last >= 1e-4 {
            problems.push(format!("fig{n}: intended BER at 25 dB = {last}"));
        }
        all.extend(recs);
    }
    if let Err(e) = emit_figure_data(&all, FigureId::Fig13) {
        problems.push(format!("fig13: {e}"));
    }
    let s = summarize(&eve).unwrap();
    if !(0.45..=0.55).contains(&s.median) {
        problems.push(format!("pooled median {}", s.median));
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(600) {
        problems.push("runtime over 10 min".into());
    }
    outcome(
        problems.is_empty(),
        format!(
            "6 scenarios x 26 points x 4 receivers x 1e6 symbols: {} eavesdropper BERs in [{:.4}, {:.4}], \
             median {:.4}; {:.1} s{}",
            s.count,
            s.min,
            s.max,
            s.median,
            elapsed.as_secs_f64(),
            if problems.is_empty() { String::new() } else { format!("; problems: {}", problems.join("; ")) }
        ),
    )
}

fn random_prior(order: usize, i: u64) -> String {
    let w: Vec<u64> = (0..order as u64).map(|j| 1 + derive_seed(0x5ec, &[order as u64, i, j]) % 997).collect();
    let total: u64 = w.iter().sum();
    w.iter().map(|x| format!("{x}/{total}")).collect::<Vec<_>>().join(",")
}

fn c5_perfect_secrecy() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut failed = Vec::new();
    for order in [2usize, 4] {
        let mut priors = vec![uniform_prior(order)];
        priors.extend((0..20).map(|i| parse_prior(&random_prior(order, i)).unwrap()));
        for prior in priors {
            let rep = verify_perfect_secrecy(order, &prior).unwrap();
            let exact = rep
                .conditional
                .iter()
                .all(|row| row.iter().zip(&prior).all(|(c, p)| c.as_ref() == Some(p)));
            if !(rep.perfect && exact) {
                failed.push(format!("M={order} prior {prior:?}"));
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failed.is_empty() && elapsed < Duration::from_secs(1),
        format!(
            "{checked} (M, prior) cases, exact rational equality prob(P|C) = prob(P): {} failures; {:.3} s",
            failed.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn c6_keyspace() -> Outcome {
    let r = keyspace_report(16).unwrap();
    let u = unicity(r.key_entropy_bits, 0.0).unwrap();
    let ok = r.keyspace_size.to_string() == "20922789888000"
        && (r.key_entropy_bits - 44.25).abs() <= 0.01
        && r.shannon_bound_max_symbols == 11
        && u.distance == UnicityDistance::Infinite;
    outcome(
        ok,
        format!(
            "M=16: {} keys, {:.4} bits, Shannon bound {} symbols, unicity {}",
            r.keyspace_size, r.key_entropy_bits, r.shannon_bound_max_symbols, u.distance
        ),
    )
}

fn naive_permanent(rows: &[Vec<u8>]) -> u128 {
    fn go(rows: &[Vec<u8>], row: usize, used: &mut Vec<bool>) -> u128 {
        if row == rows.len() {
            return 1;
        }
        let mut total = 0;
        for c in 0..rows.len() {
            if !used[c] && rows[row][c] == 1 {
                used[c] = true;
                total += go(rows, row + 1, used);
                used[c] = false;
            }
        }
        total
    }
    go(rows, 0, &mut vec![false; rows.len()])
}

fn c7_permanent() -> Outcome {
    let start = Instant::now();
    let mut mismatches = 0;
    for i in 0..200u64 {
        let n = 1 + (derive_seed(0xbeef, &[i]) % 5) as usize;
        let rows: Vec<Vec<u8>> = (0..n)
            .map(|r| (0..n).map(|c| (derive_seed(0xbeef, &[i, r as u64, c as u64]) & 1) as u8).collect())
            .collect();
        if permanent(&BinaryMatrix::from_rows(&rows).unwrap()).unwrap() != naive_permanent(&rows) {
            mismatches += 1;
        }
    }
    let mut factorial_ok = true;
    let mut f = 1u128;
    for n in 1..=8usize {
        f *= n as u128;
        factorial_ok &= permanent(&BinaryMatrix::ones(n)).unwrap() == f;
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && factorial_ok && elapsed < Duration::from_secs(5),
        format!(
            "200 random 0/1 matrices n<=5: {mismatches} mismatches vs permutation sum; perm(J_n) = n! for n<=8: {}; {:.3} s",
            verdict(factorial_ok),
            elapsed.as_secs_f64()
        ),
    )
}

fn strip_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with(TIMESTAMP_PREFIX)).collect::<Vec<_>>().join("\n")
}

fn c8_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("cdiv-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = configs_dir().join("fig07.toml");
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "2"].into_iter().enumerate() {
        let out = dir.join(format!("run{i}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_cdiv"))
            .args(["sim", "run", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--threads", threads])
            .status()
            .unwrap();
        if !status.success() {
            return outcome(false, format!("cdiv sim run exited with {status}"));
        }
        outputs.push(std::fs::read_to_string(&out).unwrap());
    }
    let (a, b) = (strip_timestamp(&outputs[0]), strip_timestamp(&outputs[1]));
    let stamped = outputs.iter().all(|o| o.lines().filter(|l| l.starts_with(TIMESTAMP_PREFIX)).count() == 1);
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        a == b && stamped && a.lines().count() > 100,
        format!(
            "two `cdiv sim run` invocations of fig07.toml (1 and 2 worker threads): {} bytes each, identical outside the timestamp line: {}",
            a.len(),
            verdict(a == b)
        ),
    )
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut report = |name: &'static str, o: Outcome| {
        println!("{} [{name}] {}", verdict(o.pass), o.detail);
        results.push((name, o));
    };
    report("1 analytic/oracle equivalence", c1_oracle_equivalence());
    report("2 headline probabilities", c2_headline());
    let (c3, c3_probe, c3_exact) = c3_monte_carlo();
    report("3 Monte Carlo vs analytic", c3);
    report("3 supplementary: analysed symbols only", c3_probe);
    report("3 supplementary: full constellation vs region integral", c3_exact);
    report("4 eavesdropper BER band", c4_eavesdropper_band());
    report("5 perfect secrecy", c5_perfect_secrecy());
    report("6 keyspace/unicity", c6_keyspace());
    report("7 permanent oracle", c7_permanent());
    report("8 determinism", c8_determinism());
    let failed = results.iter().filter(|(_, o)| !o.pass).count();
    println!("{} of {} checks passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
