//! Closed forms for the Euler characteristic of the tropical moduli space.
//!
//! A set partition of the markings is admissible when every block has weight
//! sum at most 1. Writing `N_{r,w}` for the number of admissible partitions
//! with `r` blocks, the Euler characteristic is
//!
//! ```text
//! chi(D_{g,w}) = 1 - sum_r N_{r,w} * chiW(g, r)
//! ```
//!
//! where `chiW(g, r)` is the top-weight Euler characteristic of the moduli
//! space of `r`-pointed genus `g` curves. It equals `1 - chi(D_{g,(1^r)})`,
//! and for `r > g + 1` also `(-1)^(r+1) (g+r-2)!/g! B_g`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{bernoulli, factorial, stirling2, Rational};
use crate::complex::{chain_ranks, euler_from_ranks, SubcomplexFilter};
use crate::enumeration::{enumerate_all, EnumerationOptions};
use crate::error::{Error, Result};
use crate::graphs::WeightVector;

/// Number of admissible partitions of the markings into exactly `r` blocks.
pub fn admissible_partitions(w: &WeightVector, r: usize) -> u64 {
    admissible_partition_counts(w).get(r).copied().unwrap_or(0)
}

/// `counts[r]` is the number of admissible partitions with `r` blocks, for
/// `r = 0..=n`.
pub fn admissible_partition_counts(w: &WeightVector) -> Vec<u64> {
    let n = w.len();
    let mut counts = vec![0u64; n + 1];
    let mut blocks: Vec<i64> = Vec::with_capacity(n);
    partition_walk(w, 0, &mut blocks, &mut counts);
    counts
}

fn partition_walk(w: &WeightVector, i: usize, blocks: &mut Vec<i64>, counts: &mut [u64]) {
    if i == w.len() {
        counts[blocks.len()] += 1;
        return;
    }
    let (x, cap) = (w.scaled(i), w.denominator());
    for b in 0..blocks.len() {
        if blocks[b] + x <= cap {
            blocks[b] += x;
            partition_walk(w, i + 1, blocks, counts);
            blocks[b] -= x;
        }
    }
    blocks.push(x);
    partition_walk(w, i + 1, blocks, counts);
    blocks.pop();
}

/// Nonzero pairs `(r, N_{r,w})`, in increasing `r`.
pub fn grothendieck_decomposition(genus: u32, w: &WeightVector) -> Result<Vec<(usize, u64)>> {
    w.check_genus(genus)?;
    Ok(admissible_partition_counts(w)
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .collect())
}

/// How a top-weight value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// `1 - chi(D_{g,(1^r)})` from an explicit cell count.
    FromDelta,
    /// The Bernoulli closed form, valid for `r > g + 1`.
    ClosedForm,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::FromDelta => "from-delta",
            Provenance::ClosedForm => "closed-form",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "from-delta" => Ok(Provenance::FromDelta),
            "closed-form" => Ok(Provenance::ClosedForm),
            _ => Err(Error::Parse { what: "top-weight mode".into(), detail: format!("unknown mode {s:?}") }),
        }
    }
}

/// Unreduced Euler characteristic of `D_{g,w}` from cell counts alone.
pub fn euler_direct(genus: u32, w: &WeightVector, opts: &EnumerationOptions) -> Result<i64> {
    let strata = enumerate_all(genus, w, opts)?;
    Ok(euler_from_ranks(&chain_ranks(&strata, SubcomplexFilter::All)?))
}

fn closed_form_top_weight(genus: u32, r: usize) -> Result<BigInt> {
    if r <= genus as usize + 1 {
        return Err(Error::ClosedFormOutOfRange { g: genus, r });
    }
    let g = genus as u64;
    let ratio = Rational::new(
        BigInt::from(factorial(g + r as u64 - 2)),
        BigInt::from(factorial(g)),
    );
    let mut value = ratio * bernoulli(g);
    if r.is_multiple_of(2) {
        value = -value;
    }
    integral(value, "top-weight closed form")
}

fn integral(value: Rational, what: &str) -> Result<BigInt> {
    if value.is_integer() {
        Ok(value.to_integer())
    } else {
        Err(Error::Hypothesis(format!("{what} evaluated to the non-integer {value}")))
    }
}

/// Top-weight Euler characteristic of the moduli space of `r`-pointed genus
/// `g` curves.
pub fn top_weight_euler(genus: u32, r: usize, mode: Provenance, opts: &EnumerationOptions) -> Result<BigInt> {
    let w = WeightVector::ones(r)?;
    w.check_genus(genus)?;
    match mode {
        Provenance::ClosedForm => closed_form_top_weight(genus, r),
        Provenance::FromDelta => Ok(BigInt::from(1 - euler_direct(genus, &w, opts)?)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopWeightEntry {
    #[serde(with = "decimal")]
    pub value: BigInt,
    pub provenance: Provenance,
}

/// Big integers as decimal strings in JSON.
mod decimal {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

/// Top-weight values for one genus, keyed by `r`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopWeightTable {
    pub genus: u32,
    pub entries: BTreeMap<usize, TopWeightEntry>,
    /// Requested `r` for which neither source applied.
    pub unavailable: Vec<usize>,
}

/// Which sources a table may draw on. `delta_budget` caps the number of
/// cells enumerated for one explicit computation.
#[derive(Clone, Debug)]
pub struct TopWeightPolicy {
    pub delta_budget: Option<usize>,
    pub allow_from_delta: bool,
    pub allow_closed_form: bool,
    pub workers: usize,
}

impl Default for TopWeightPolicy {
    fn default() -> Self {
        TopWeightPolicy { delta_budget: Some(50_000), allow_from_delta: true, allow_closed_form: true, workers: 0 }
    }
}

impl TopWeightTable {
    pub fn new(genus: u32) -> Self {
        TopWeightTable { genus, ..Default::default() }
    }

    pub fn insert(&mut self, r: usize, value: BigInt, provenance: Provenance) {
        self.entries.insert(r, TopWeightEntry { value, provenance });
        self.unavailable.retain(|&x| x != r);
    }

    pub fn get(&self, r: usize) -> Option<&BigInt> {
        self.entries.get(&r).map(|e| &e.value)
    }

    /// Fill in every `r` in `rs`, preferring an explicit cell count when it
    /// fits the budget and falling back to the closed form.
    pub fn build(genus: u32, rs: impl IntoIterator<Item = usize>, policy: &TopWeightPolicy) -> Result<Self> {
        let mut table = TopWeightTable::new(genus);
        let opts = EnumerationOptions { workers: policy.workers, budget: policy.delta_budget };
        for r in rs {
            if table.entries.contains_key(&r) {
                continue;
            }
            if policy.allow_from_delta {
                match top_weight_euler(genus, r, Provenance::FromDelta, &opts) {
                    Ok(v) => {
                        table.insert(r, v, Provenance::FromDelta);
                        continue;
                    }
                    Err(Error::BudgetExceeded { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            if policy.allow_closed_form && r > genus as usize + 1 {
                table.insert(r, top_weight_euler(genus, r, Provenance::ClosedForm, &opts)?, Provenance::ClosedForm);
            } else if !table.unavailable.contains(&r) {
                table.unavailable.push(r);
            }
        }
        Ok(table)
    }

    /// Table covering every `r` with `N_{r,w} > 0`.
    pub fn for_weights(genus: u32, w: &WeightVector, policy: &TopWeightPolicy) -> Result<Self> {
        let rs: Vec<usize> = grothendieck_decomposition(genus, w)?.into_iter().map(|(r, _)| r).collect();
        Self::build(genus, rs, policy)
    }
}

/// `1 - sum_r N_{r,w} chiW(g, r)` with top-weight values from `table`.
pub fn euler_from_top_weight(genus: u32, w: &WeightVector, table: &TopWeightTable) -> Result<BigInt> {
    if table.genus != genus {
        return Err(Error::Hypothesis(format!("top-weight table is for genus {}, not {genus}", table.genus)));
    }
    let mut chi = BigInt::one();
    for (r, count) in grothendieck_decomposition(genus, w)? {
        let value = table.get(r).ok_or(Error::MissingTopWeight { r })?;
        chi -= BigInt::from(count) * value;
    }
    Ok(chi)
}

/// `1 + sum_r N_{r,w} (-1)^r (g+r-2)!/g! B_g`, valid when no admissible
/// partition has `r <= g + 1` blocks.
pub fn euler_bernoulli(genus: u32, w: &WeightVector) -> Result<BigInt> {
    let decomposition = grothendieck_decomposition(genus, w)?;
    if let Some(&(r, _)) = decomposition.iter().find(|(r, _)| *r <= genus as usize + 1) {
        return Err(Error::Hypothesis(format!("an admissible partition has r = {r} <= g + 1 blocks")));
    }
    let mut chi = BigInt::one();
    for (r, count) in decomposition {
        chi -= BigInt::from(count) * closed_form_top_weight(genus, r)?;
    }
    Ok(chi)
}

/// Euler characteristic for `w = (1^(n), eps^(m))` as a double sum over
/// Stirling numbers, with `B_g` expanded through its Stirling identity.
pub fn euler_heavy_light(genus: u32, n: usize, m: usize) -> Result<BigInt> {
    if n <= genus as usize || m == 0 {
        return Err(Error::HeavyLightOutOfRange { g: genus, n, m });
    }
    WeightVector::heavy_light(n, m)?.check_genus(genus)?;
    let g = genus as u64;
    let mut sum = Rational::zero();
    for r in 1..=m as u64 {
        let outer = BigInt::from(factorial(g + n as u64 + r - 2) * stirling2(m as u64, r));
        for l in 0..=g {
            let inner = BigInt::from(factorial(l) * stirling2(g, l));
            let mut term = Rational::new(outer.clone() * inner, BigInt::from(factorial(g) * (l + 1)));
            if (n as u64 + r + l) % 2 == 1 {
                term = -term;
            }
            sum += term;
        }
    }
    integral(sum + Rational::one(), "heavy/light formula")
}

/// One row of the reference heavy/light table: `chi` for `m = 1..=4`.
/// `None` marks the cell left blank because the space is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeavyLightRow {
    pub genus: u32,
    pub n: usize,
    pub values: [Option<i64>; 4],
}

/// Reference values of `chi(D_{g,(1^(n), eps^(m))})` for `g <= 3`.
/// `None` marks an empty space.
pub const HEAVY_LIGHT_TABLE: [HeavyLightRow; 16] = [
    HeavyLightRow { genus: 0, n: 2, values: [None, Some(2), Some(0), Some(2)] },
    HeavyLightRow { genus: 0, n: 3, values: [Some(3), Some(-3), Some(9), Some(-15)] },
    HeavyLightRow { genus: 0, n: 4, values: [Some(-5), Some(19), Some(-53), Some(163)] },
    HeavyLightRow { genus: 0, n: 5, values: [Some(25), Some(-95), Some(385), Some(-1535)] },
    HeavyLightRow { genus: 1, n: 2, values: [Some(2), Some(-1), Some(5), Some(-7)] },
    HeavyLightRow { genus: 1, n: 3, values: [Some(-2), Some(10), Some(-26), Some(82)] },
    HeavyLightRow { genus: 1, n: 4, values: [Some(13), Some(-47), Some(193), Some(-767)] },
    HeavyLightRow { genus: 1, n: 5, values: [Some(-59), Some(301), Some(-1499), Some(7501)] },
    HeavyLightRow { genus: 2, n: 3, values: [Some(3), Some(-7), Some(33), Some(-127)] },
    HeavyLightRow { genus: 2, n: 4, values: [Some(-9), Some(51), Some(-249), Some(1251)] },
    HeavyLightRow { genus: 2, n: 5, values: [Some(61), Some(-359), Some(2161), Some(-12959)] },
    HeavyLightRow { genus: 2, n: 6, values: [Some(-419), Some(2941), Some(-20579), Some(144061)] },
    HeavyLightRow { genus: 3, n: 4, values: [Some(1), Some(1), Some(1), Some(1)] },
    HeavyLightRow { genus: 3, n: 5, values: [Some(1), Some(1), Some(1), Some(1)] },
    HeavyLightRow { genus: 3, n: 6, values: [Some(1), Some(1), Some(1), Some(1)] },
    HeavyLightRow { genus: 3, n: 7, values: [Some(1), Some(1), Some(1), Some(1)] },
];

/// Reference value for `(g, n, m)`; `Some(None)` for a blank cell and `None`
/// outside the table.
pub fn heavy_light_reference(genus: u32, n: usize, m: usize) -> Option<Option<i64>> {
    if !(1..=4).contains(&m) {
        return None;
    }
    HEAVY_LIGHT_TABLE.iter().find(|row| row.genus == genus && row.n == n).map(|row| row.values[m - 1])
}

/// A parsed weight specification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSpec {
    pub weights: WeightVector,
    /// The value given to the symbolic `eps`, if it occurred.
    pub epsilon: Option<Rational>,
    /// `(n, m)` when the vector is `n` ones and `m` copies of `eps`.
    pub heavy_light: Option<(usize, usize)>,
}

impl WeightSpec {
    pub fn heavy_light(n: usize, m: usize) -> Result<Self> {
        let weights = WeightVector::heavy_light(n, m)?;
        let epsilon = (m > 0).then(|| Rational::new(BigInt::one(), BigInt::from(m as u64 + 1)));
        Ok(WeightSpec { weights, epsilon, heavy_light: Some((n, m)) })
    }
}

/// Parse `1^3,eps^2` or `1,1,1/2,1/3`.
///
/// Items are separated by commas; each is an integer, a fraction `p/q` or
/// `eps`, optionally followed by `^k` for `k` repetitions. With `D` the lcm
/// of the explicit denominators and `m` the number of `eps` entries, `eps` is
/// set to `1 / (D (m + 1))`. Then all `m` copies together weigh less than
/// `1 / D`, so a set of markings is admissible exactly when its explicit
/// part sums to at most 1, with `eps` entries present only if that sum is
/// below 1. For `1^n,eps^m` this gives `eps = 1 / (m + 1)`.
pub fn parse_weight_spec(spec: &str) -> Result<WeightSpec> {
    let err = |detail: String| Error::Parse { what: "weight specification".into(), detail };
    let mut items: Vec<Option<Rational>> = Vec::new();
    for raw in spec.split(',') {
        let item = raw.trim();
        if item.is_empty() {
            return Err(err(format!("empty item in {spec:?}")));
        }
        let (base, reps) = match item.split_once('^') {
            Some((b, k)) => {
                let k: usize = k.trim().parse().map_err(|_| err(format!("bad repetition count in {item:?}")))?;
                (b.trim(), k)
            }
            None => (item, 1),
        };
        let value = if base.eq_ignore_ascii_case("eps") {
            None
        } else {
            Some(parse_rational(base).ok_or_else(|| err(format!("bad weight {base:?}")))?)
        };
        items.extend(std::iter::repeat_n(value, reps));
    }
    let m = items.iter().filter(|x| x.is_none()).count();
    let den = items.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let epsilon = (m > 0).then(|| Rational::new(BigInt::one(), den * BigInt::from(m as u64 + 1)));
    let heavy = items.iter().flatten().count();
    let all_ones = items.iter().flatten().all(|x| x.is_one());
    let entries: Vec<Rational> = items
        .into_iter()
        .map(|x| x.unwrap_or_else(|| epsilon.clone().expect("eps present")))
        .collect();
    let weights = WeightVector::new(entries)?;
    let heavy_light = all_ones.then_some((heavy, m));
    Ok(WeightSpec { weights, epsilon, heavy_light })
}

fn parse_rational(s: &str) -> Option<Rational> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse::<BigInt>().ok()?, q.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if q.is_zero() {
        return None;
    }
    Some(Rational::new(p, q))
}

/// Which pipelines an Euler report runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EulerMethod {
    Direct,
    Formula,
    Both,
}

impl std::str::FromStr for EulerMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(EulerMethod::Direct),
            "formula" => Ok(EulerMethod::Formula),
            "both" => Ok(EulerMethod::Both),
            _ => Err(Error::Parse { what: "method".into(), detail: format!("unknown method {s:?}") }),
        }
    }
}

/// One top-weight term used by the formula pipeline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaTerm {
    pub r: usize,
    pub count: u64,
    pub top_weight: Option<String>,
    pub provenance: Option<Provenance>,
}

/// Direct and formula Euler characteristics of one `(g, w)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerReport {
    pub genus: u32,
    pub weights: Vec<String>,
    pub epsilon: Option<String>,
    pub method: EulerMethod,
    pub direct: Option<i64>,
    pub formula: Option<String>,
    /// `heavy-light` or `top-weight`.
    pub formula_source: Option<String>,
    pub terms: Vec<FormulaTerm>,
    pub unavailable: Vec<usize>,
    pub agree: Option<bool>,
}

/// Run the requested pipelines. Heavy/light vectors in range use the double
/// Stirling sum; everything else goes through the top-weight decomposition.
pub fn euler_report(genus: u32, spec: &WeightSpec, method: EulerMethod, opts: &EnumerationOptions, policy: &TopWeightPolicy) -> Result<EulerReport> {
    let w = &spec.weights;
    w.check_genus(genus)?;
    let mut report = EulerReport {
        genus,
        weights: w.entries().iter().map(|x| x.to_string()).collect(),
        epsilon: spec.epsilon.as_ref().map(|e| e.to_string()),
        method,
        direct: None,
        formula: None,
        formula_source: None,
        terms: Vec::new(),
        unavailable: Vec::new(),
        agree: None,
    };
    if matches!(method, EulerMethod::Direct | EulerMethod::Both) {
        report.direct = Some(euler_direct(genus, w, opts)?);
    }
    if matches!(method, EulerMethod::Formula | EulerMethod::Both) {
        let decomposition = grothendieck_decomposition(genus, w)?;
        match spec.heavy_light {
            Some((n, m)) if n > genus as usize && m > 0 => {
                report.formula = Some(euler_heavy_light(genus, n, m)?.to_string());
                report.formula_source = Some("heavy-light".into());
                report.terms = decomposition
                    .iter()
                    .map(|&(r, count)| FormulaTerm { r, count, top_weight: None, provenance: None })
                    .collect();
            }
            _ => {
                let table = TopWeightTable::build(genus, decomposition.iter().map(|&(r, _)| r), policy)?;
                report.terms = decomposition
                    .iter()
                    .map(|&(r, count)| {
                        let entry = table.entries.get(&r);
                        FormulaTerm {
                            r,
                            count,
                            top_weight: entry.map(|e| e.value.to_string()),
                            provenance: entry.map(|e| e.provenance),
                        }
                    })
                    .collect();
                report.unavailable = table.unavailable.clone();
                if table.unavailable.is_empty() {
                    report.formula = Some(euler_from_top_weight(genus, w, &table)?.to_string());
                    report.formula_source = Some("top-weight".into());
                }
            }
        }
    }
    if let (Some(d), Some(f)) = (report.direct, report.formula.as_ref()) {
        report.agree = Some(d.to_string() == *f);
    }
    Ok(report)
}

/// Exact integer value of a report's formula field.
pub fn formula_value(report: &EulerReport) -> Option<i64> {
    report.formula.as_ref()?.parse::<BigInt>().ok()?.to_i64()
}
