//! Keyspace size, unicity distance, exact perfect-secrecy verification and
//! the matrix permanent.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::constellation::MappingKey;
use crate::error::{Error, Result};

/// Largest order for which [`keyspace_report`] is offered.
pub const MAX_KEYSPACE_ORDER: usize = 64;
/// Largest order for exhaustive key enumeration (6! = 720 keys).
pub const MAX_ENUMERATION_ORDER: usize = 6;
/// Largest matrix accepted by [`permanent`].
pub const MAX_PERMANENT_DIM: usize = 20;

/// Size and entropy of the space of `M`-point mapping keys.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyspaceReport {
    pub order: usize,
    /// `M!`, exact.
    pub keyspace_size: BigUint,
    /// `log2(M!)` in bits.
    pub key_entropy_bits: f64,
    /// Largest message length `n` (symbols) with `M^n <= M!`.
    pub shannon_bound_max_symbols: usize,
}

pub fn keyspace_report(order: usize) -> Result<KeyspaceReport> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!("order must be at least 2, got {order}")));
    }
    if order > MAX_KEYSPACE_ORDER {
        return Err(Error::TooLarge {
            what: format!("order {order}"),
            limit: MAX_KEYSPACE_ORDER,
        });
    }
    let size: BigUint = (2..=order as u64).map(BigUint::from).product();
    let entropy = (2..=order).map(|k| (k as f64).log2()).sum();
    let base = BigUint::from(order);
    let mut n = 0;
    let mut power = BigUint::one();
    loop {
        let next = &power * &base;
        if next > size {
            break;
        }
        power = next;
        n += 1;
    }
    Ok(KeyspaceReport {
        order,
        keyspace_size: size,
        key_entropy_bits: entropy,
        shannon_bound_max_symbols: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnicityDistance {
    Finite(f64),
    Infinite,
}

impl fmt::Display for UnicityDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnicityDistance::Finite(d) => write!(f, "{d}"),
            UnicityDistance::Infinite => f.write_str("INFINITE"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnicityResult {
    pub entropy_bits: f64,
    pub redundancy: f64,
    pub distance: UnicityDistance,
}

/// `U = H(K) / D`; infinite when the source has no redundancy.
pub fn unicity(entropy_bits: f64, redundancy: f64) -> Result<UnicityResult> {
    if !(entropy_bits >= 0.0 && entropy_bits.is_finite()) || !(redundancy >= 0.0 && redundancy.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "entropy and redundancy must be finite and non-negative, got {entropy_bits} and {redundancy}"
        )));
    }
    let distance = if entropy_bits == 0.0 {
        UnicityDistance::Finite(0.0)
    } else if redundancy == 0.0 {
        UnicityDistance::Infinite
    } else {
        UnicityDistance::Finite(entropy_bits / redundancy)
    };
    Ok(UnicityResult {
        entropy_bits,
        redundancy,
        distance,
    })
}

/// Square 0/1 matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    n: usize,
    entries: Vec<u8>,
}

impl BinaryMatrix {
    pub fn new(n: usize, entries: Vec<u8>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "{} entries do not form a {n}x{n} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|&e| e > 1) {
            return Err(Error::InvalidArgument("matrix entries must be 0 or 1".into()));
        }
        Ok(BinaryMatrix { n, entries })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not square: row of length {} in a {n}-row matrix",
                r.len()
            )));
        }
        Self::new(n, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        BinaryMatrix { n, entries }
    }

    pub fn ones(n: usize) -> Self {
        BinaryMatrix {
            n,
            entries: vec![1; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.entries[row * self.n + col]
    }
}

/// Whitespace- or comma-separated rows of 0/1, one row per line; blank lines
/// and `#` comments are skipped.
impl FromStr for BinaryMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(|t| match t {
                        "0" => Ok(0),
                        "1" => Ok(1),
                        other => Err(Error::InvalidArgument(format!("bad matrix entry `{other}`"))),
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        BinaryMatrix::from_rows(&rows)
    }
}

/// Exact permanent by Ryser's inclusion–exclusion, walking column subsets in
/// Gray-code order so each step updates the row sums in O(n).
///
/// For a bi-adjacency matrix this is the number of perfect matchings.
pub fn permanent(mat: &BinaryMatrix) -> Result<u128> {
    let n = mat.dim();
    if n > MAX_PERMANENT_DIM {
        return Err(Error::TooLarge {
            what: format!("{n}x{n} permanent"),
            limit: MAX_PERMANENT_DIM,
        });
    }
    if n == 0 {
        return Ok(1);
    }
    let mut row_sums = vec![0i64; n];
    let mut total: i128 = 0;
    let mut gray: u32 = 0;
    for k in 1u32..(1 << n) {
        let next = k ^ (k >> 1);
        let col = (gray ^ next).trailing_zeros() as usize;
        let sign = if next & (1 << col) != 0 { 1 } else { -1 };
        for (i, s) in row_sums.iter_mut().enumerate() {
            *s += sign * mat.get(i, col) as i64;
        }
        gray = next;
        let prod = row_sums.iter().try_fold(1i128, |acc, &s| {
            if s == 0 {
                None
            } else {
                Some(acc * s as i128)
            }
        });
        if let Some(prod) = prod {
            // (−1)^(n − |S|)
            if (n as u32 - next.count_ones()) % 2 == 0 {
                total += prod;
            } else {
                total -= prod;
            }
        }
    }
    debug_assert!(total >= 0);
    Ok(total as u128)
}

/// Outcome of an exhaustive perfect-secrecy check.
#[derive(Debug, Clone, PartialEq)]
pub struct SecrecyReport {
    pub order: usize,
    pub keys_enumerated: usize,
    pub prior: Vec<BigRational>,
    /// `conditional[c][p] = prob(P = p | C = c)`; `None` where `prob(C = c) = 0`.
    pub conditional: Vec<Vec<Option<BigRational>>>,
    /// Whether `prob(P = p | C = c) = prob(P = p)` for every `(p, c)`.
    pub perfect: bool,
}

/// Uniform prior `1/M` on every plaintext symbol.
pub fn uniform_prior(order: usize) -> Vec<BigRational> {
    vec![BigRational::new(BigInt::one(), BigInt::from(order)); order]
}

/// Parses a comma-separated prior such as `1/2,1/4,1/8,1/8`.
pub fn parse_prior(text: &str) -> Result<Vec<BigRational>> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<BigRational>()
                .map_err(|_| Error::InvalidArgument(format!("`{t}` is not a rational number")))
        })
        .collect()
}

/// Enumerates every mapping key of order `M` with equal probability and
/// checks, in exact rational arithmetic, that the transmitted point index
/// reveals nothing about the plaintext symbol.
pub fn verify_perfect_secrecy(order: usize, prior: &[BigRational]) -> Result<SecrecyReport> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!("order must be at least 2, got {order}")));
    }
    if order > MAX_ENUMERATION_ORDER {
        return Err(Error::TooLarge {
            what: format!("exhaustive enumeration of {order}! keys"),
            limit: MAX_ENUMERATION_ORDER,
        });
    }
    let keys: Vec<MappingKey> = permutations(order)
        .into_iter()
        .map(|p| MappingKey::new(p).expect("enumerated permutation is valid"))
        .collect();
    let weight = BigRational::new(BigInt::one(), BigInt::from(keys.len()));
    let weighted: Vec<_> = keys.into_iter().map(|k| (k, weight.clone())).collect();
    verify_secrecy_over_keys(order, prior, &weighted)
}

/// Same check against an arbitrary key distribution; weights must sum to 1.
pub fn verify_secrecy_over_keys(
    order: usize,
    prior: &[BigRational],
    keys: &[(MappingKey, BigRational)],
) -> Result<SecrecyReport> {
    validate_distribution(prior, order, "prior")?;
    let weights: Vec<BigRational> = keys.iter().map(|(_, w)| w.clone()).collect();
    validate_distribution(&weights, weights.len(), "key distribution")?;
    if let Some((k, _)) = keys.iter().find(|(k, _)| k.order() != order) {
        return Err(Error::KeyLength {
            expected: order,
            found: k.order(),
        });
    }

    // joint[p][c] = prob(P = p, C = c)
    let mut joint = vec![vec![BigRational::zero(); order]; order];
    for (key, w) in keys {
        for (p, row) in joint.iter_mut().enumerate() {
            row[key.point_index(p)] += &prior[p] * w;
        }
    }
    let mut conditional = vec![vec![None; order]; order];
    let mut perfect = true;
    for c in 0..order {
        let pc: BigRational = joint.iter().map(|row| row[c].clone()).sum();
        if pc.is_zero() {
            continue;
        }
        for p in 0..order {
            let cond = &joint[p][c] / &pc;
            perfect &= cond == prior[p];
            conditional[c][p] = Some(cond);
        }
    }
    Ok(SecrecyReport {
        order,
        keys_enumerated: keys.len(),
        prior: prior.to_vec(),
        conditional,
        perfect,
    })
}

fn validate_distribution(dist: &[BigRational], len: usize, what: &str) -> Result<()> {
    if dist.len() != len {
        return Err(Error::InvalidArgument(format!(
            "{what} has {} entries, expected {len}",
            dist.len()
        )));
    }
    if dist.iter().any(|p| p.is_negative()) {
        return Err(Error::InvalidArgument(format!("{what} has a negative entry")));
    }
    let total: BigRational = dist.iter().cloned().sum();
    if !total.is_one() {
        return Err(Error::InvalidArgument(format!("{what} sums to {total}, not 1")));
    }
    Ok(())
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}
