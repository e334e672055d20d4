//! Invariant suite run by `hassett verify`.

use hassett_core::complex::{euler_from_cells, ChainComplex, SubcomplexFilter};
use hassett_core::enumeration::{enumerate_all, max_edge_count, EnumerationOptions, Strata};
use hassett_core::formulas::{euler_from_top_weight, parse_weight_spec, TopWeightPolicy, TopWeightTable};
use hassett_core::graphs::canonicalize;
use hassett_core::homology::{betti_numbers, connectivity_shadow, SHADOW_NOTE};
use hassett_core::{Error, Rational, WeightVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Cell budget applied per space when the caller sets none.
pub const DEFAULT_BUDGET: usize = 20_000;

/// Cells per space whose canonical form is checked under random relabeling.
const RELABEL_SAMPLES: usize = 16;

pub struct Config {
    pub max_genus: u32,
    pub max_edges: usize,
    pub max_markings: usize,
    pub inject_sign_flip: bool,
    pub seed: u64,
    pub options: EnumerationOptions,
    pub policy: TopWeightPolicy,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub genus: u32,
    pub weights: String,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Skipped {
    pub genus: u32,
    pub weights: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub max_genus: u32,
    pub max_edges: usize,
    pub max_markings: usize,
    pub sign_flip_injected: bool,
    pub checks: Vec<CheckResult>,
    pub skipped: Vec<Skipped>,
    pub failed: usize,
    pub passed: bool,
}

impl VerifyReport {
    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Weight vectors tried with `n` markings: all ones, each heavy/light split,
/// all halves and all light.
fn families(n: usize) -> Vec<String> {
    let mut out = vec![format!("1^{n}")];
    for heavy in (1..n).rev() {
        out.push(format!("1^{heavy},eps^{}", n - heavy));
    }
    if n >= 2 {
        out.push(format!("1/2^{n}"));
    }
    out.push(format!("eps^{n}"));
    out
}

/// The `(g, w)` pairs covered: every family member satisfying the weight
/// condition whose top cells have at most `max_edges` edges.
pub fn matrix(config: &Config) -> Vec<(u32, WeightVector)> {
    let mut out: Vec<(u32, WeightVector)> = Vec::new();
    for g in 0..=config.max_genus {
        for n in 1..=config.max_markings {
            if max_edge_count(g, n) > config.max_edges {
                continue;
            }
            for spec in families(n) {
                let w = parse_weight_spec(&spec).expect("family specs parse").weights;
                if w.admits_genus(g) && !out.iter().any(|(h, v)| *h == g && *v == w) {
                    out.push((g, w));
                }
            }
        }
    }
    out
}

struct Recorder<'a> {
    genus: u32,
    weights: String,
    checks: &'a mut Vec<CheckResult>,
}

impl Recorder<'_> {
    fn record(&mut self, check: &str, outcome: std::result::Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(CheckResult { genus: self.genus, weights: self.weights.clone(), check: check.into(), passed, detail });
    }
}

fn acyclic(cc: &ChainComplex) -> std::result::Result<String, String> {
    let p = betti_numbers(cc);
    if p.is_acyclic() {
        Ok(format!("{} cells, reduced homology of a point", p.chain_ranks.iter().sum::<usize>()))
    } else {
        Err(format!("reduced betti {:?}, degree -1: {}", p.reduced_betti, p.reduced_betti_minus_one))
    }
}

fn relabel_check(strata: &Strata, rng: &mut ChaCha8Rng) -> std::result::Result<String, String> {
    let cells: Vec<_> = strata.levels().iter().skip(1).flatten().collect();
    let sample: Vec<_> = cells.choose_multiple(rng, RELABEL_SAMPLES.min(cells.len())).collect();
    for cell in &sample {
        let mut vmap: Vec<usize> = (0..cell.graph.num_vertices()).collect();
        let mut emap: Vec<usize> = (0..cell.graph.num_edges()).collect();
        vmap.shuffle(rng);
        emap.shuffle(rng);
        let relabeled = cell.graph.relabeled(&vmap, &emap);
        if canonicalize(&relabeled).encoding != cell.encoding {
            return Err(format!("canonical form changed under relabeling of {:?}", cell.graph));
        }
    }
    Ok(format!("{} sampled cells", sample.len()))
}

fn verify_space(g: u32, w: &WeightVector, config: &Config, rng: &mut ChaCha8Rng, checks: &mut Vec<CheckResult>) -> Result<Option<String>, Error> {
    let mut opts = config.options.clone();
    opts.budget = opts.budget.or(Some(DEFAULT_BUDGET));
    let strata = match enumerate_all(g, w, &opts) {
        Ok(s) => s,
        Err(Error::BudgetExceeded { budget, reached }) => {
            return Ok(Some(format!("more than {budget} cells (reached {reached})")));
        }
        Err(e) => return Err(e),
    };
    let mut rec = Recorder { genus: g, weights: w.to_string(), checks };

    rec.record("closure", strata.check_closure().map(|_| format!("{} cells", strata.cell_count())));
    let stable = strata
        .levels()
        .iter()
        .flatten()
        .find(|c| !c.graph.is_stable(w) || c.graph.genus() != g)
        .map_or(Ok("all cells stable of the right genus".to_string()), |c| Err(format!("{:?}", c.graph)));
    rec.record("stability-genus", stable);
    rec.record("canonical-relabel", relabel_check(&strata, rng));

    let serial = enumerate_all(g, w, &EnumerationOptions { workers: 1, budget: opts.budget })?;
    let same = serial.levels().iter().zip(strata.levels()).all(|(a, b)| {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.encoding == y.encoding)
    }) && serial.levels().len() == strata.levels().len();
    rec.record(
        "determinism",
        if same { Ok("one worker matches the pool".into()) } else { Err("stratum listings differ between worker counts".into()) },
    );

    let mut full = ChainComplex::build(&strata, SubcomplexFilter::All)?;
    if config.inject_sign_flip {
        full = full.with_flipped_entry();
    }
    rec.record("boundary-squared", full.check_boundary_squared().map(|_| "d^2 = 0".into()));

    let profile = betti_numbers(&full);
    let direct = euler_from_cells(&full);
    rec.record(
        "euler-consistency",
        if profile.euler == direct {
            Ok(format!("chi = {direct}"))
        } else {
            Err(format!("betti numbers give {} but cells give {direct}", profile.euler))
        },
    );

    let table = TopWeightTable::for_weights(g, w, &config.policy)?;
    if table.unavailable.is_empty() {
        let formula = euler_from_top_weight(g, w, &table)?;
        rec.record(
            "formula-vs-direct",
            if formula == direct.into() { Ok(format!("chi = {direct}")) } else { Err(format!("formula {formula}, direct {direct}")) },
        );
    }

    if g >= 1 {
        let shadow = connectivity_shadow(&profile);
        rec.record(
            "b0-b1",
            if shadow.passed { Ok(SHADOW_NOTE.into()) } else { Err(format!("b0 = {}, b1 = {}", shadow.b0, shadow.b1)) },
        );
        rec.record("lw-acyclic", acyclic(&ChainComplex::build(&strata, SubcomplexFilter::LoopWeight)?));
        rec.record("mlw-acyclic", acyclic(&ChainComplex::build(&strata, SubcomplexFilter::MultiLoopWeight)?));
        if g >= 2 || w.total() > Rational::from_integer(1.into()) {
            let lw = ChainComplex::build(&strata, SubcomplexFilter::LoopWeight)?;
            let q = ChainComplex::build(&strata, SubcomplexFilter::BridgeQ)?;
            let same = (0..=lw.top_degree().max(q.top_degree())).all(|p| lw.basis(p) == q.basis(p));
            rec.record("q-equals-lw", if same { Ok("same cells".into()) } else { Err("cell sets differ".into()) });
            rec.record("q0-acyclic", acyclic(&ChainComplex::build(&strata, SubcomplexFilter::BridgeQ0)?));
        }
    }
    Ok(None)
}

pub fn run(config: &Config) -> Result<VerifyReport, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    for (g, w) in matrix(config) {
        if let Some(reason) = verify_space(g, &w, config, &mut rng, &mut checks)? {
            skipped.push(Skipped { genus: g, weights: w.to_string(), reason });
        }
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    Ok(VerifyReport {
        seed: config.seed,
        max_genus: config.max_genus,
        max_edges: config.max_edges,
        max_markings: config.max_markings,
        sign_flip_injected: config.inject_sign_flip,
        checks,
        skipped,
        failed,
        passed: failed == 0,
    })
}
