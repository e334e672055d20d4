//! Betti numbers and Euler characteristics of the chain complexes built in
//! [`crate::complex`].

mod rank;

pub use rank::rank_exact;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{build_chain_complex, ChainComplex, SubcomplexFilter};
use crate::enumeration::EnumerationOptions;
use crate::error::{Error, Result};
use crate::graphs::WeightVector;

/// Rational homology of one (sub)complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiProfile {
    pub genus: u32,
    pub weights: Vec<String>,
    pub filter: SubcomplexFilter,
    /// `rank C_p` for `p = 0, 1, ...`.
    pub chain_ranks: Vec<usize>,
    /// Unreduced Betti numbers by degree.
    pub betti: Vec<usize>,
    /// Reduced Betti numbers by degree, from the augmented complex.
    pub reduced_betti: Vec<usize>,
    /// Reduced Betti number in degree `-1`: 1 exactly when the complex is
    /// empty.
    pub reduced_betti_minus_one: usize,
    pub euler: i64,
    pub reduced_euler: i64,
}

impl BettiProfile {
    /// All reduced Betti numbers vanish.
    pub fn is_acyclic(&self) -> bool {
        self.reduced_betti_minus_one == 0 && self.reduced_betti.iter().all(|&b| b == 0)
    }

    pub fn reduced(&self, p: usize) -> usize {
        self.reduced_betti.get(p).copied().unwrap_or(0)
    }

    pub fn unreduced(&self, p: usize) -> usize {
        self.betti.get(p).copied().unwrap_or(0)
    }
}

/// `b~_p = rank C_p - rank d_p - rank d_{p+1}` on the augmented complex.
pub fn betti_numbers(cc: &ChainComplex) -> BettiProfile {
    let top = cc.top_degree();
    // ranks of d_p for p = 0..=top
    let boundary_ranks: Vec<usize> = (0..=top.max(-1))
        .collect::<Vec<isize>>()
        .par_iter()
        .map(|&p| cc.boundary(p).map_or(0, rank_exact))
        .collect();
    let d = |p: isize| -> usize {
        if p < 0 {
            0
        } else {
            boundary_ranks.get(p as usize).copied().unwrap_or(0)
        }
    };
    let reduced_at = |p: isize| cc.rank(p) - d(p) - d(p + 1);
    let reduced_betti_minus_one = reduced_at(-1);
    let reduced_betti: Vec<usize> = (0..=top).map(reduced_at).collect();
    let empty = top < 0 || (0..=top).all(|p| cc.rank(p) == 0) && reduced_betti_minus_one == 1;
    let mut betti = reduced_betti.clone();
    if !empty {
        if let Some(b0) = betti.first_mut() {
            *b0 += 1;
        }
    }
    let euler: i64 = betti
        .iter()
        .enumerate()
        .map(|(p, &b)| if p % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum();
    BettiProfile {
        genus: cc.genus,
        weights: cc.weights.entries().iter().map(|w| w.to_string()).collect(),
        filter: cc.filter,
        chain_ranks: (0..=top).map(|p| cc.rank(p)).collect(),
        betti,
        reduced_betti,
        reduced_betti_minus_one,
        euler,
        reduced_euler: euler - 1,
    }
}

/// Outcome of checking `b_0 = 1` and `b_1 = 0`, which simple connectivity
/// implies but does not follow from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityShadow {
    pub genus: u32,
    pub weights: Vec<String>,
    pub b0: usize,
    pub b1: usize,
    pub passed: bool,
    pub note: String,
}

pub const SHADOW_NOTE: &str =
    "necessary condition only: b0 = 1 and b1 = 0 over Q; the fundamental group itself is not computed";

pub fn connectivity_shadow(profile: &BettiProfile) -> ConnectivityShadow {
    let (b0, b1) = (profile.unreduced(0), profile.unreduced(1));
    ConnectivityShadow {
        genus: profile.genus,
        weights: profile.weights.clone(),
        b0,
        b1,
        passed: b0 == 1 && b1 == 0,
        note: SHADOW_NOTE.into(),
    }
}

/// Compute the full complex of `(g, w)` and check `b_0 = 1`, `b_1 = 0`.
pub fn verify_simple_connectivity_shadow(genus: u32, weights: &WeightVector, opts: &EnumerationOptions) -> Result<ConnectivityShadow> {
    if genus == 0 {
        return Err(Error::Hypothesis("the connectivity check applies to genus >= 1".into()));
    }
    let cc = build_chain_complex(genus, weights, SubcomplexFilter::All, opts)?;
    Ok(connectivity_shadow(&betti_numbers(&cc)))
}
