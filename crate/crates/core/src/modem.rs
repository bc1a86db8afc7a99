//! Bit ↔ symbol mapping and minimum-distance detection.

use std::fmt;
use std::str::FromStr;

use crate::constellation::{ComplexPoint, ConstellationScheme};
use crate::error::{Error, Result};

/// A plain sequence of bits, one per byte (0 or 1).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitStream {
    bits: Vec<u8>,
}

impl BitStream {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidBit(char::from_digit(b as u32 % 36, 36).unwrap_or('?')));
        }
        Ok(BitStream { bits })
    }

    /// Expands each value into `width` bits, MSB first.
    pub fn from_values(values: &[usize], width: usize) -> Self {
        let bits = values
            .iter()
            .flat_map(|&v| (0..width).rev().map(move |i| ((v >> i) & 1) as u8))
            .collect();
        BitStream { bits }
    }

    /// Packs the stream into `width`-bit values, MSB first.
    pub fn to_values(&self, width: usize) -> Result<Vec<usize>> {
        if width == 0 || self.bits.len() % width != 0 {
            return Err(Error::BitLength {
                len: self.bits.len(),
                bits_per_symbol: width,
            });
        }
        Ok(self
            .bits
            .chunks_exact(width)
            .map(|group| group.iter().fold(0, |acc, &b| (acc << 1) | b as usize))
            .collect())
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl FromStr for BitStream {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidBit(other)),
            })
            .collect::<Result<Vec<u8>>>()
            .map(|bits| BitStream { bits })
    }
}

impl fmt::Display for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Maps each `m`-bit group (MSB first) to the point keyed to its value.
pub fn modulate(bits: &BitStream, scheme: &ConstellationScheme) -> Result<Vec<ComplexPoint>> {
    let values = bits.to_values(scheme.bits_per_symbol())?;
    Ok(modulate_values(&values, scheme))
}

/// Symbol values straight to points; values must be below the scheme order.
pub fn modulate_values(values: &[usize], scheme: &ConstellationScheme) -> Vec<ComplexPoint> {
    values.iter().map(|&v| scheme.point_for(v)).collect()
}

/// Nearest-point detector for one scheme.
///
/// Candidates are scanned in increasing bit value and only a strictly
/// smaller distance replaces the incumbent, so ties go to the lowest value.
#[derive(Debug, Clone)]
pub struct Detector {
    table: Vec<ComplexPoint>,
    bits_per_symbol: usize,
}

impl Detector {
    pub fn new(scheme: &ConstellationScheme) -> Self {
        Detector {
            table: scheme.bit_map(),
            bits_per_symbol: scheme.bits_per_symbol(),
        }
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    #[inline]
    pub fn decide(&self, y: ComplexPoint) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (v, p) in self.table.iter().enumerate() {
            let d = (y - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = v;
            }
        }
        best
    }
}

/// Hard-decision demodulation to bit values.
pub fn demodulate_values(symbols: &[ComplexPoint], scheme: &ConstellationScheme) -> Vec<usize> {
    let det = Detector::new(scheme);
    symbols.iter().map(|&y| det.decide(y)).collect()
}

/// Hard-decision demodulation to bits.
pub fn demodulate(symbols: &[ComplexPoint], scheme: &ConstellationScheme) -> BitStream {
    BitStream::from_values(&demodulate_values(symbols, scheme), scheme.bits_per_symbol())
}

/// Outcome of decoding a transmission with a possibly different scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossDecode {
    pub rx_bits: BitStream,
    pub compared: usize,
    pub errors: usize,
}

/// Bit errors when a received `rx_width`-bit value is compared against the
/// leading `rx_width` bits of the transmitted `tx_width`-bit value.
#[inline]
pub fn prefix_bit_errors(tx_value: usize, tx_width: usize, rx_value: usize, rx_width: usize) -> u32 {
    debug_assert!(rx_width <= tx_width);
    ((tx_value >> (tx_width - rx_width)) ^ rx_value).count_ones()
}

/// Modulates with `tx`, detects with `rx` and counts bit mismatches.
///
/// A receiver with fewer bits per symbol than the sender recovers one short
/// group per symbol; that group is compared with the leading bits of the
/// transmitted group.
pub fn cross_decode_bits(
    tx_bits: &BitStream,
    tx: &ConstellationScheme,
    rx: &ConstellationScheme,
) -> Result<CrossDecode> {
    let (m, m_rx) = (tx.bits_per_symbol(), rx.bits_per_symbol());
    if m_rx > m {
        return Err(Error::BitAlignment { tx: m, rx: m_rx });
    }
    let tx_values = tx_bits.to_values(m)?;
    let symbols = modulate_values(&tx_values, tx);
    let rx_values = demodulate_values(&symbols, rx);
    let errors = tx_values
        .iter()
        .zip(&rx_values)
        .map(|(&t, &r)| prefix_bit_errors(t, m, r, m_rx) as usize)
        .sum();
    Ok(CrossDecode {
        rx_bits: BitStream::from_values(&rx_values, m_rx),
        compared: rx_values.len() * m_rx,
        errors,
    })
}
