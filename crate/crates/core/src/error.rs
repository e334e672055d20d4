use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error("weight condition 2g - 2 + sum(w) > 0 fails for g = {genus}, sum(w) = {weight_sum}")]
    UnstableGenus { genus: u32, weight_sum: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("edge {edge} out of range for a graph with {edges} edges")]
    NoSuchEdge { edge: usize, edges: usize },

    #[error("stratum with {edge_count} edges is outside 1..={max}")]
    InvalidStratum { edge_count: usize, max: usize },

    #[error("cell budget of {budget} exceeded (reached {reached} cells)")]
    BudgetExceeded { budget: usize, reached: usize },

    #[error("filter {filter} is not closed under contraction: {detail}")]
    FilterNotClosed { filter: String, detail: String },

    #[error("no top-weight Euler characteristic available for r = {r}")]
    MissingTopWeight { r: usize },

    #[error("closed form for the top-weight Euler characteristic needs r > g + 1 (g = {g}, r = {r})")]
    ClosedFormOutOfRange { g: u32, r: usize },

    #[error("heavy/light formula needs n >= g + 1 and m > 0 (g = {g}, n = {n}, m = {m})")]
    HeavyLightOutOfRange { g: u32, n: usize, m: usize },

    #[error("formula hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("could not parse {what}: {detail}")]
    Parse { what: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
