//! Closed-form probability that a 16QAM-rectangular receiver correctly
//! decodes a 16QAM-circular transmission, and the Gaussian rectangle
//! integral used to check it.
//!
//! Four circular symbols (`0000`, `0100`, `0101`, `0001`) stand in for the
//! whole constellation. Each closed form is a product of two per-axis
//! interval probabilities for the noisy decision variable `Y = X + n`, where
//! `X` sits at the circular point and the interval is the rectangular
//! decision cell with the same bit label. With `u = sqrt(Es / (10 N0))`,
//! every erfc argument is `u` times the distance from the circular
//! coordinate to a cell boundary (0 or ±2, in units of `a = sqrt(Es/10)`).

use crate::constellation::{qam16_amplitude, ComplexPoint, ConstellationScheme, QAM16_CIRCULAR_TABLE, QAM16_RECTANGULAR_TABLE};
use crate::error::{Error, Result};

/// Complementary error function.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

// Circular coordinates in units of `a`.
const OUTER_MAJOR: f64 = 3.69;
const OUTER_MINOR: f64 = 1.53;
const INNER_MAJOR: f64 = 1.84;
const INNER_MINOR: f64 = 0.76;
// Outer rectangular decision boundary; the inner one is the axis itself.
const CELL_EDGE: f64 = 2.0;

/// 1.53 + 2
pub const K_3_53: f64 = OUTER_MINOR + CELL_EDGE;
/// 3.69 + 2
pub const K_5_69: f64 = OUTER_MAJOR + CELL_EDGE;
/// 1.84 + 2
pub const K_3_84: f64 = INNER_MAJOR + CELL_EDGE;
/// 0.76 + 2
pub const K_2_76: f64 = INNER_MINOR + CELL_EDGE;
pub const K_1_53: f64 = OUTER_MINOR;
pub const K_1_84: f64 = INNER_MAJOR;
pub const K_0_76: f64 = INNER_MINOR;

const RANGE_SLACK: f64 = 1e-12;
const CROSS_CHECK_TOLERANCE: f64 = 1e-9;

/// Linear Es/N0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SnrPoint {
    es_over_n0: f64,
}

impl SnrPoint {
    pub fn new(es_over_n0: f64) -> Result<Self> {
        if !(es_over_n0 >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Es/N0 must be non-negative, got {es_over_n0}"
            )));
        }
        Ok(SnrPoint { es_over_n0 })
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Self::new(10f64.powf(db / 10.0))
    }

    pub fn linear(self) -> f64 {
        self.es_over_n0
    }

    /// Noise density for unit symbol energy.
    pub fn n0(self) -> f64 {
        self.es_over_n0.recip()
    }

    /// `sqrt(Es / (10 N0))`, the common erfc scale.
    pub fn u(self) -> f64 {
        (self.es_over_n0 / 10.0).sqrt()
    }
}

/// The four representative circular symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbeSymbol {
    S0000,
    S0100,
    S0101,
    S0001,
}

impl ProbeSymbol {
    pub const ALL: [ProbeSymbol; 4] = [
        ProbeSymbol::S0000,
        ProbeSymbol::S0100,
        ProbeSymbol::S0101,
        ProbeSymbol::S0001,
    ];

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL
            .get(i)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("probe symbol index {i} not in 0..4")))
    }

    pub fn bit_value(self) -> usize {
        match self {
            ProbeSymbol::S0000 => 0b0000,
            ProbeSymbol::S0100 => 0b0100,
            ProbeSymbol::S0101 => 0b0101,
            ProbeSymbol::S0001 => 0b0001,
        }
    }

    /// Unscaled circular table point (`Es = 1`, no energy correction).
    pub fn circular_point(self) -> ComplexPoint {
        table_point(&QAM16_CIRCULAR_TABLE, self.bit_value())
    }

    /// Rectangular decision cell carrying the same label.
    pub fn rect_cell(self) -> Region {
        rect_cell(self.bit_value())
    }
}

/// Probability that a probe symbol is decoded to its own label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolCondProb {
    pub symbol: usize,
    pub prob_correct: f64,
}

/// `½·erfc(k·u)`: tail beyond a boundary `k·a` away from the mean.
#[inline]
fn tail(k: f64, u: f64) -> f64 {
    0.5 * erfc(k * u)
}

/// Closed-form correct-decoding probability for one probe symbol.
///
/// Factors of the form `1 − ½erfc(p·u) − ½erfc(−q·u)` are evaluated through
/// `erfc(−x) = 2 − erfc(x)` as `½erfc(q·u) − ½erfc(p·u)` so that the result
/// keeps relative precision deep in the tails.
pub fn p_correct_symbol(symbol: ProbeSymbol, snr: SnrPoint) -> Result<SymbolCondProb> {
    let u = snr.u();
    let p = match symbol {
        // Y_R < −2a, Y_I > 2a around (1.53a, −3.69a)
        ProbeSymbol::S0000 => tail(K_3_53, u) * tail(K_5_69, u),
        // Y_R < −2a, 0 < Y_I < 2a around (3.69a, −1.53a)
        ProbeSymbol::S0100 => tail(K_5_69, u) * (tail(K_1_53, u) - tail(K_3_53, u)),
        // −2a < Y_R < 0, 0 < Y_I < 2a around (1.84a, −0.76a)
        ProbeSymbol::S0101 => {
            (tail(K_1_84, u) - tail(K_3_84, u)) * (tail(K_0_76, u) - tail(K_2_76, u))
        }
        // −2a < Y_R < 0, Y_I > 2a around (0.76a, −1.84a)
        ProbeSymbol::S0001 => tail(K_3_84, u) * (tail(K_0_76, u) - tail(K_2_76, u)),
    };
    check_probability(p, "symbol probability")?;
    Ok(SymbolCondProb {
        symbol: symbol.bit_value(),
        prob_correct: p.clamp(0.0, 1.0),
    })
}

/// Aggregate `P(C) = ¼ Σ P(Y = S_i^r | S_i^c)` over the four probes,
/// cross-checked against the fully expanded erfc polynomial.
pub fn p_correct_total(snr: SnrPoint) -> Result<f64> {
    let mut sum = 0.0;
    for s in ProbeSymbol::ALL {
        sum += p_correct_symbol(s, snr)?.prob_correct;
    }
    let total = sum / 4.0;
    let expanded = p_correct_expanded(snr);
    if (total - expanded).abs() > CROSS_CHECK_TOLERANCE {
        return Err(Error::Consistency(format!(
            "P(C) symbol sum {total:e} disagrees with expanded form {expanded:e} at Es/N0 = {}",
            snr.linear()
        )));
    }
    check_probability(total, "P(C)")?;
    Ok(total.clamp(0.0, 1.0))
}

/// The expanded form of `P(C)`, term by term, with negative arguments
/// passed to erfc as written. Loses precision once `P(C)` drops below
/// ~1e-15, so it is only used as a cross-check.
pub fn p_correct_expanded(snr: SnrPoint) -> f64 {
    let u = snr.u();
    let e = |k: f64| erfc(k * u);
    0.25 * (-0.25 * e(K_5_69) * e(-K_1_53)
        + 0.25 * e(-K_1_84) * e(K_2_76)
        + 0.25 * e(-K_1_84) * e(-K_0_76)
        - 0.5 * e(-K_0_76)
        - 0.5 * e(K_2_76)
        + 0.5 * e(K_5_69)
        - 0.5 * e(-K_1_84)
        + 1.0)
}

fn check_probability(p: f64, what: &str) -> Result<()> {
    if !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&p) {
        return Err(Error::Consistency(format!("{what} {p} outside [0, 1]")));
    }
    Ok(())
}

/// One closed-form evaluation per sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticRow {
    pub snr_db: f64,
    pub p_correct: f64,
    pub p_error: f64,
}

/// `P(C)` and its complement over `start..=stop` (dB) in `step` increments.
pub fn analytic_sweep(start_db: f64, stop_db: f64, step_db: f64) -> Result<Vec<AnalyticRow>> {
    sweep_points(start_db, stop_db, step_db)?
        .into_iter()
        .map(|snr_db| {
            let p = p_correct_total(SnrPoint::from_db(snr_db)?)?;
            Ok(AnalyticRow {
                snr_db,
                p_correct: p,
                p_error: 1.0 - p,
            })
        })
        .collect()
}

/// Evenly spaced points from `start` to `stop` inclusive.
pub fn sweep_points(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::InvalidArgument(format!(
            "bad sweep {start}:{stop}:{step}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

/// A possibly unbounded open interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ALL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidArgument(format!("unordered interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    /// `P(lo < Y < hi)` for `Y ~ N(mean, n0 / 2)`.
    ///
    /// Evaluated as a difference of two tails on the same side of the mean,
    /// so tiny probabilities keep their relative precision.
    pub fn gaussian_mass(&self, mean: f64, n0: f64) -> f64 {
        if self.lo >= self.hi {
            return 0.0;
        }
        let s = n0.sqrt();
        let upper = |t: f64| 0.5 * erfc((t - mean) / s); // P(Y > t)
        let lower = |t: f64| 0.5 * erfc((mean - t) / s); // P(Y < t)
        if self.lo >= mean {
            upper(self.lo) - upper(self.hi)
        } else if self.hi <= mean {
            lower(self.hi) - lower(self.lo)
        } else {
            1.0 - lower(self.lo) - upper(self.hi)
        }
    }
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub re: Interval,
    pub im: Interval,
}

impl Region {
    pub const PLANE: Region = Region {
        re: Interval::ALL,
        im: Interval::ALL,
    };
}

/// Mass of a complex Gaussian centred at `tx` with per-axis variance `n0/2`
/// inside `region`. Zero-measure regions give 0.
pub fn p_correct_numeric(tx: ComplexPoint, region: &Region, n0: f64) -> Result<f64> {
    if !(n0 > 0.0) {
        return Err(Error::InvalidArgument(format!("noise density must be positive, got {n0}")));
    }
    Ok(region.re.gaussian_mass(tx.re, n0) * region.im.gaussian_mass(tx.im, n0))
}

/// Decision cell of the unit-energy 16QAM rectangular detector for `bit_value`.
pub fn rect_cell(bit_value: usize) -> Region {
    let a = qam16_amplitude();
    let axis = |level: f64| -> Interval {
        let (lo, hi) = match level as i32 {
            -3 => (f64::NEG_INFINITY, -CELL_EDGE),
            -1 => (-CELL_EDGE, 0.0),
            1 => (0.0, CELL_EDGE),
            _ => (CELL_EDGE, f64::INFINITY),
        };
        Interval { lo: lo * a, hi: hi * a }
    };
    let (re, im) = QAM16_RECTANGULAR_TABLE[bit_value];
    Region {
        re: axis(re),
        im: axis(im),
    }
}

fn table_point(table: &[(f64, f64); 16], bit_value: usize) -> ComplexPoint {
    let a = qam16_amplitude();
    let (re, im) = table[bit_value];
    ComplexPoint::new(re * a, im * a)
}

/// `P(C)` rebuilt from [`p_correct_numeric`] over the four probe cells.
pub fn p_correct_total_numeric(snr: SnrPoint) -> Result<f64> {
    let mut sum = 0.0;
    for s in ProbeSymbol::ALL {
        sum += p_correct_numeric(s.circular_point(), &s.rect_cell(), snr.n0())?;
    }
    Ok(sum / 4.0)
}

/// Exact probability, averaged over all bit values, that the unit-energy
/// 16QAM rectangular detector returns the transmitted value for symbols sent
/// with `tx`. Unlike `P(C)` this does not assume the four probes represent
/// the other twelve symbols.
pub fn rect_symbol_correct_rate(tx: &ConstellationScheme, snr: SnrPoint) -> Result<f64> {
    if tx.order() != 16 {
        return Err(Error::InvalidArgument(format!(
            "sender must have 16 points, has {}",
            tx.order()
        )));
    }
    let mut sum = 0.0;
    for b in 0..16 {
        sum += p_correct_numeric(tx.point_for(b), &rect_cell(b), snr.n0())?;
    }
    Ok(sum / 16.0)
}
