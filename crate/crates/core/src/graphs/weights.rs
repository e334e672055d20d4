use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::combinatorics::Rational;
use crate::error::{Error, Result};

/// Marking weights `w_1, ..., w_n`, each a rational in `(0, 1]`.
///
/// Alongside the exact entries the vector keeps a common denominator and the
/// scaled integer numerators, so stability tests run in machine integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector {
    entries: Vec<Rational>,
    denominator: i64,
    scaled: Vec<i64>,
}

impl WeightVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidWeights("at least one marking is required".into()));
        }
        let mut den = BigInt::one();
        for (i, w) in entries.iter().enumerate() {
            if !w.is_positive() || *w > Rational::one() {
                return Err(Error::InvalidWeights(format!("w_{} = {} is not in (0, 1]", i + 1, w)));
            }
            den = den.lcm(w.denom());
        }
        let denominator = den
            .to_i64()
            .filter(|d| *d < (1 << 40))
            .ok_or_else(|| Error::InvalidWeights("common denominator too large".into()))?;
        let scaled = entries
            .iter()
            .map(|w| (w.numer() * (&den / w.denom())).to_i64().expect("numerator bounded by denominator"))
            .collect();
        Ok(WeightVector { entries, denominator, scaled })
    }

    /// `(1, ..., 1)` with `n` entries.
    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![Rational::one(); n])
    }

    /// `(1^(heavy), eps^(light))` with `eps = 1 / (light + 1)`.
    pub fn heavy_light(heavy: usize, light: usize) -> Result<Self> {
        let eps = Rational::new(BigInt::one(), BigInt::from(light as u64 + 1));
        let mut entries = vec![Rational::one(); heavy];
        entries.extend(std::iter::repeat_n(eps, light));
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn total(&self) -> Rational {
        self.entries.iter().fold(Rational::zero(), |acc, w| acc + w)
    }

    /// Common denominator `D` such that every `D * w_i` is an integer.
    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    /// `D * w_i`.
    pub fn scaled(&self, i: usize) -> i64 {
        self.scaled[i]
    }

    /// True iff `2g - 2 + sum(w) > 0`.
    pub fn admits_genus(&self, genus: u32) -> bool {
        let total: i64 = self.scaled.iter().sum();
        self.denominator * (2 * genus as i64 - 2) + total > 0
    }

    pub fn check_genus(&self, genus: u32) -> Result<()> {
        if self.admits_genus(genus) {
            Ok(())
        } else {
            Err(Error::UnstableGenus { genus, weight_sum: self.total().to_string() })
        }
    }

    /// Entrywise `self <= other`.
    pub fn dominated_by(&self, other: &WeightVector) -> bool {
        self.len() == other.len() && self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}
