//! Constellation geometry and keyed bit-to-point assignment.
//!
//! A [`ConstellationScheme`] is an ordered set of `M` unit-energy points plus
//! a [`MappingKey`] that decides which point each `log2(M)`-bit value is sent
//! on. Bit values are read MSB-first: the group `0100` is value 4.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the complex baseband plane.
pub type ComplexPoint = Complex64;

/// 16QAM two-ring coordinates indexed by bit value, in units of the grid
/// amplitude `a`. The raw mean energy is 9.9601 a², so schemes built from
/// these are rescaled to exactly unit energy.
pub const QAM16_CIRCULAR_TABLE: [(f64, f64); 16] = [
    (1.53, -3.69),
    (0.76, -1.84),
    (-1.53, 3.69),
    (-0.76, 1.84),
    (3.69, -1.53),
    (1.84, -0.76),
    (-3.69, 1.53),
    (-1.84, 0.76),
    (1.53, 3.69),
    (0.76, 1.84),
    (-1.53, -3.69),
    (-0.76, -1.84),
    (3.69, 1.53),
    (1.84, 0.76),
    (-3.69, -1.53),
    (-1.84, -0.76),
];

/// 16QAM ±1/±3 grid indexed by bit value, in units of `a`.
pub const QAM16_RECTANGULAR_TABLE: [(f64, f64); 16] = [
    (-3.0, 3.0),
    (-1.0, 3.0),
    (3.0, 3.0),
    (1.0, 3.0),
    (-3.0, 1.0),
    (-1.0, 1.0),
    (3.0, 1.0),
    (1.0, 1.0),
    (-3.0, -3.0),
    (-1.0, -3.0),
    (3.0, -3.0),
    (1.0, -3.0),
    (-3.0, -1.0),
    (-1.0, -1.0),
    (3.0, -1.0),
    (1.0, -1.0),
];

/// Grid amplitude of 16QAM at unit symbol energy, `a = sqrt(Es / 10)`.
pub fn qam16_amplitude() -> f64 {
    (1.0_f64 / 10.0).sqrt()
}

const ENERGY_TOLERANCE: f64 = 1e-9;

/// The built-in schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardScheme {
    Bpsk,
    Qpsk,
    #[serde(rename = "qam16_rect")]
    Qam16Rect,
    #[serde(rename = "qam16_circ")]
    Qam16Circ,
}

impl StandardScheme {
    pub const ALL: [StandardScheme; 4] = [
        StandardScheme::Bpsk,
        StandardScheme::Qpsk,
        StandardScheme::Qam16Rect,
        StandardScheme::Qam16Circ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StandardScheme::Bpsk => "bpsk",
            StandardScheme::Qpsk => "qpsk",
            StandardScheme::Qam16Rect => "qam16_rect",
            StandardScheme::Qam16Circ => "qam16_circ",
        }
    }

    /// Raw (unnormalized) points, indexed by bit value.
    fn raw_points(self) -> Vec<ComplexPoint> {
        let a = qam16_amplitude();
        match self {
            StandardScheme::Bpsk => vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            // Gray: first bit picks the in-phase sign, second the quadrature sign.
            StandardScheme::Qpsk => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                vec![
                    Complex64::new(s, s),
                    Complex64::new(s, -s),
                    Complex64::new(-s, s),
                    Complex64::new(-s, -s),
                ]
            }
            StandardScheme::Qam16Rect => QAM16_RECTANGULAR_TABLE
                .iter()
                .map(|&(re, im)| Complex64::new(re * a, im * a))
                .collect(),
            StandardScheme::Qam16Circ => QAM16_CIRCULAR_TABLE
                .iter()
                .map(|&(re, im)| Complex64::new(re * a, im * a))
                .collect(),
        }
    }
}

impl fmt::Display for StandardScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StandardScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StandardScheme::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::UnknownScheme(s.to_string()))
    }
}

/// The secret bit-value → point-index permutation.
///
/// `perm[b]` is the index of the point that carries bit value `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MappingKey {
    perm: Vec<usize>,
}

impl MappingKey {
    /// Validates that `perm` is a bijection on `0..perm.len()`.
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        if perm.is_empty() {
            return Err(Error::InvalidKey("empty permutation".into()));
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() {
                return Err(Error::InvalidKey(format!(
                    "index {p} out of range for order {}",
                    perm.len()
                )));
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidKey(format!("duplicate index {p}")));
            }
        }
        Ok(MappingKey { perm })
    }

    pub fn identity(order: usize) -> Self {
        MappingKey {
            perm: (0..order).collect(),
        }
    }

    /// Uniformly random permutation of `0..order` (Fisher–Yates over a
    /// ChaCha8 stream seeded with `seed`).
    pub fn random(order: usize, seed: u64) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidArgument(format!(
                "key order must be at least 2, got {order}"
            )));
        }
        let mut perm: Vec<usize> = (0..order).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Ok(MappingKey { perm })
    }

    /// Parses the comma-separated form and checks it against `order`.
    pub fn parse_for_order(text: &str, order: usize) -> Result<Self> {
        let key: MappingKey = text.parse()?;
        if key.order() != order {
            return Err(Error::KeyLength {
                expected: order,
                found: key.order(),
            });
        }
        Ok(key)
    }

    pub fn order(&self) -> usize {
        self.perm.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Point index carrying `bit_value`.
    #[inline]
    pub fn point_index(&self, bit_value: usize) -> usize {
        self.perm[bit_value]
    }

    /// `self.compose(inner)[b] = self[inner[b]]`: apply `inner` first.
    ///
    /// Re-keying a scheme that was rebased on `self` with `inner` yields the
    /// same bit→point map as keying the original geometry with the composite.
    pub fn compose(&self, inner: &MappingKey) -> Result<MappingKey> {
        if self.order() != inner.order() {
            return Err(Error::KeyLength {
                expected: self.order(),
                found: inner.order(),
            });
        }
        Ok(MappingKey {
            perm: inner.perm.iter().map(|&i| self.perm[i]).collect(),
        })
    }

    pub fn inverse(&self) -> MappingKey {
        let mut inv = vec![0; self.perm.len()];
        for (b, &p) in self.perm.iter().enumerate() {
            inv[p] = b;
        }
        MappingKey { perm: inv }
    }
}

impl fmt::Display for MappingKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.perm.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for MappingKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let perm = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<usize>()
                    .map_err(|_| Error::InvalidKey(format!("`{tok}` is not an index")))
            })
            .collect::<Result<Vec<_>>>()?;
        MappingKey::new(perm)
    }
}

/// Uniformly random key; see [`MappingKey::random`].
pub fn random_key(order: usize, seed: u64) -> Result<MappingKey> {
    MappingKey::random(order, seed)
}

/// A constellation with its keyed bit assignment. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationScheme {
    label: String,
    bits_per_symbol: usize,
    points: Vec<ComplexPoint>,
    key: MappingKey,
}

impl ConstellationScheme {
    /// Builds a scheme, rescaling `points` to unit mean energy.
    pub fn new(label: impl Into<String>, points: Vec<ComplexPoint>, key: MappingKey) -> Result<Self> {
        let order = points.len();
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::InvalidScheme(format!(
                "order must be a power of two >= 2, got {order}"
            )));
        }
        if key.order() != order {
            return Err(Error::KeyLength {
                expected: order,
                found: key.order(),
            });
        }
        if let Some(p) = points.iter().find(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::InvalidScheme(format!("non-finite point {p}")));
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(Error::InvalidScheme(format!("duplicate point {p}")));
            }
        }
        let energy = mean_energy(&points);
        if energy <= 0.0 {
            return Err(Error::InvalidScheme("zero-energy constellation".into()));
        }
        // Already-normalized input is kept bit-exact so that files round-trip.
        let points = if (energy - 1.0).abs() > 1e-12 {
            let scale = energy.sqrt().recip();
            points.into_iter().map(|p| p * scale).collect()
        } else {
            points
        };
        Ok(ConstellationScheme {
            label: label.into(),
            bits_per_symbol: order.trailing_zeros() as usize,
            points,
            key,
        })
    }

    /// One of the built-in schemes with the identity key.
    pub fn standard(which: StandardScheme) -> Self {
        let points = which.raw_points();
        let key = MappingKey::identity(points.len());
        ConstellationScheme::new(which.name(), points, key).expect("built-in scheme is valid")
    }

    /// Looks a built-in scheme up by name.
    pub fn standard_by_name(name: &str) -> Result<Self> {
        Ok(Self::standard(name.parse()?))
    }

    /// Same geometry, different bit assignment. The key replaces the current
    /// one; it does not compose with it.
    pub fn with_key(&self, key: MappingKey) -> Result<Self> {
        if key.order() != self.order() {
            return Err(Error::KeyLength {
                expected: self.order(),
                found: key.order(),
            });
        }
        Ok(ConstellationScheme {
            key,
            ..self.clone()
        })
    }

    /// Reorders the points so that the identity key reproduces the current
    /// bit→point map.
    pub fn rebased(&self) -> Self {
        ConstellationScheme {
            label: self.label.clone(),
            bits_per_symbol: self.bits_per_symbol,
            points: (0..self.order()).map(|b| self.point_for(b)).collect(),
            key: MappingKey::identity(self.order()),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[ComplexPoint] {
        &self.points
    }

    pub fn key(&self) -> &MappingKey {
        &self.key
    }

    /// Point transmitted for `bit_value`.
    #[inline]
    pub fn point_for(&self, bit_value: usize) -> ComplexPoint {
        self.points[self.key.point_index(bit_value)]
    }

    /// The full bit-value → point table.
    pub fn bit_map(&self) -> Vec<ComplexPoint> {
        (0..self.order()).map(|b| self.point_for(b)).collect()
    }

    pub fn mean_energy(&self) -> f64 {
        mean_energy(&self.points)
    }

    pub fn to_toml(&self) -> String {
        let file = SchemeFile {
            label: self.label.clone(),
            order: self.order(),
            points: self.points.iter().map(|p| [p.re, p.im]).collect(),
            key: self.key.to_string(),
        };
        toml::to_string(&file).expect("scheme serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, SchemeParseError> {
        let file: SchemeFile = toml::from_str(text).map_err(SchemeParseError::Syntax)?;
        file.into_scheme().map_err(SchemeParseError::Invalid)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            SchemeParseError::Syntax(source) => Error::Toml {
                path: path.to_path_buf(),
                source,
            },
            SchemeParseError::Invalid(e) => e,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml()).map_err(|e| Error::io(path, e))
    }
}

/// Either the text was not a scheme file or it described an invalid scheme.
#[derive(Debug)]
pub enum SchemeParseError {
    Syntax(toml::de::Error),
    Invalid(Error),
}

impl fmt::Display for SchemeParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeParseError::Syntax(e) => e.fmt(f),
            SchemeParseError::Invalid(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for SchemeParseError {}

/// On-disk scheme layout.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeFile {
    label: String,
    order: usize,
    points: Vec<[f64; 2]>,
    key: String,
}

impl SchemeFile {
    fn into_scheme(self) -> Result<ConstellationScheme> {
        if self.points.len() != self.order {
            return Err(Error::InvalidScheme(format!(
                "order {} but {} points listed",
                self.order,
                self.points.len()
            )));
        }
        let key = MappingKey::parse_for_order(&self.key, self.order)?;
        let points = self
            .points
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        let scheme = ConstellationScheme::new(self.label, points, key)?;
        if (scheme.mean_energy() - 1.0).abs() > ENERGY_TOLERANCE {
            return Err(Error::Consistency("normalization failed".into()));
        }
        Ok(scheme)
    }
}

fn mean_energy(points: &[ComplexPoint]) -> f64 {
    points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: ComplexPoint, b: ComplexPoint) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn circular_table_rows() {
        let s = ConstellationScheme::standard(StandardScheme::Qam16Circ);
        // Table coordinates are rescaled by the raw-energy correction.
        let a = qam16_amplitude() * (10.0_f64 / 9.9601).sqrt();
        assert!(close(s.point_for(0b0000), Complex64::new(1.53 * a, -3.69 * a)));
        assert!(close(s.point_for(0b0100), Complex64::new(3.69 * a, -1.53 * a)));
        assert!(close(s.point_for(0b1111), Complex64::new(-1.84 * a, -0.76 * a)));
    }

    #[test]
    fn rectangular_table_rows() {
        let s = ConstellationScheme::standard(StandardScheme::Qam16Rect);
        let a = qam16_amplitude();
        assert!(close(s.point_for(0b0111), Complex64::new(a, a)));
        assert!(close(s.point_for(0b0000), Complex64::new(-3.0 * a, 3.0 * a)));
        assert!(close(s.point_for(0b1010), Complex64::new(3.0 * a, -3.0 * a)));
    }

    #[test]
    fn standard_schemes_have_unit_energy() {
        for which in StandardScheme::ALL {
            let s = ConstellationScheme::standard(which);
            assert!((s.mean_energy() - 1.0).abs() < 1e-9, "{which}");
            assert!(s.key().is_identity());
        }
    }

    #[test]
    fn unknown_scheme_name() {
        assert!(matches!(
            ConstellationScheme::standard_by_name("qam64"),
            Err(Error::UnknownScheme(_))
        ));
        assert_eq!(
            ConstellationScheme::standard_by_name("qpsk").unwrap().bits_per_symbol(),
            2
        );
    }

    #[test]
    fn reverse_key_swaps_table_rows() {
        let base = ConstellationScheme::standard(StandardScheme::Qam16Rect);
        let reverse = MappingKey::new((0..16).rev().collect()).unwrap();
        let keyed = base.with_key(reverse).unwrap();
        assert_eq!(keyed.point_for(0b0000), base.point_for(0b1111));
        assert_eq!(keyed.points(), base.points());
    }

    #[test]
    fn identity_key_is_a_no_op() {
        let base = ConstellationScheme::standard(StandardScheme::Qam16Circ);
        assert_eq!(base.with_key(MappingKey::identity(16)).unwrap(), base);
    }

    #[test]
    fn keyed_scheme_rejects_wrong_length() {
        let base = ConstellationScheme::standard(StandardScheme::Qpsk);
        assert!(matches!(
            base.with_key(MappingKey::identity(16)),
            Err(Error::KeyLength { expected: 4, found: 16 })
        ));
    }

    #[test]
    fn random_key_is_deterministic() {
        assert_eq!(random_key(4, 99).unwrap(), random_key(4, 99).unwrap());
        let base = ConstellationScheme::standard(StandardScheme::Qam16Circ);
        let k = random_key(16, 7).unwrap();
        assert_eq!(base.with_key(k.clone()).unwrap(), base.with_key(k).unwrap());
    }

    #[test]
    fn random_key_rejects_tiny_orders() {
        assert!(random_key(0, 1).is_err());
        assert!(random_key(1, 1).is_err());
    }

    #[test]
    fn key_text_round_trip() {
        let k: MappingKey = "2,0,3,1".parse().unwrap();
        assert_eq!(k.to_string(), "2,0,3,1");
        assert_eq!(k.as_slice(), &[2, 0, 3, 1]);
    }

    #[test]
    fn key_parse_errors() {
        assert!("0,0,1,2".parse::<MappingKey>().is_err());
        assert!("0,1,4,2".parse::<MappingKey>().is_err());
        assert!("0,a,1".parse::<MappingKey>().is_err());
        assert!("".parse::<MappingKey>().is_err());
        assert!(matches!(
            MappingKey::parse_for_order("0,1,2", 4),
            Err(Error::KeyLength { expected: 4, found: 3 })
        ));
    }

    #[test]
    fn invalid_geometry() {
        let pts = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(ConstellationScheme::new("dup", pts, MappingKey::identity(2)).is_err());
        let pts = vec![Complex64::new(1.0, 0.0); 3];
        assert!(ConstellationScheme::new("odd", pts, MappingKey::identity(3)).is_err());
        let pts = vec![Complex64::new(f64::NAN, 0.0), Complex64::new(1.0, 0.0)];
        assert!(ConstellationScheme::new("nan", pts, MappingKey::identity(2)).is_err());
    }

    #[test]
    fn scheme_file_round_trip() {
        let s = ConstellationScheme::standard(StandardScheme::Qam16Circ)
            .with_key(random_key(16, 3).unwrap())
            .unwrap();
        let back = ConstellationScheme::from_toml(&s.to_toml()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn scheme_file_key_length_mismatch() {
        let text = "label = \"x\"\norder = 4\nkey = \"0,1,2\"\n\
                    points = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]\n";
        assert!(matches!(
            ConstellationScheme::from_toml(text),
            Err(SchemeParseError::Invalid(Error::KeyLength { .. }))
        ));
    }
}
