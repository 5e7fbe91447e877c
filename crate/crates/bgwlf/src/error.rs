use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("plain composition needs an inner series with zero constant term (got {0})")]
    NonzeroConstantTerm(f64),
    #[error("series has zero constant term and cannot be inverted")]
    ZeroDenominator,
    #[error("homography has zero determinant")]
    SingularHomography,
    #[error("tau radical degenerates at pi = pi0")]
    DegenerateTau,
    #[error("affine mechanism: tau is rejected at infinity")]
    AffineMechanism,
    #[error("mechanism is not supercritical (mu = {0})")]
    NotSupercritical(f64),
    #[error("mechanism is already critical")]
    AlreadyCritical,
    #[error("operation undefined in the critical regime")]
    CriticalRegime,
    #[error("no root on bracket [{lo}, {hi}] (f(lo) = {flo}, f(hi) = {fhi})")]
    NoRoot { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("critical boundary pi0 = pib")]
    CriticalBoundary,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("conditioning event has zero probability")]
    ZeroProbabilityCondition,
    #[error("fixed-point iteration did not converge after {0} steps")]
    NonConvergence(usize),
    #[error("path did not return to 0")]
    UnfinishedPath,
    #[error("excursion reconstruction only supports r = 0")]
    UnsupportedHoldings,
    #[error("discriminant {0} is negative")]
    NegativeDiscriminant(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
