//! Limit laws and triangular-array limit theorems on the circle, the p-adic
//! integers and the p-adic solenoid.
//!
//! [`group`] holds the three groups with their characters and local inner
//! products, [`measure`] the factors of a limit law and their Fourier
//! transforms, [`array`] triangular arrays and their exact row statistics,
//! [`verify`] the finite-grid theorem checks and [`sampler`] the seeded
//! Monte Carlo cross-checks.

pub mod array;
pub mod error;
pub mod group;
pub mod measure;
pub mod sampler;
pub mod schedule;
pub mod verify;

pub use array::{char_moment, ArrayKind, ElementRule, RowBlock, RowDistribution, TriangularArray};
pub use error::{Error, Result};
pub use group::{
    char_eval, h_trunc, identity, local_inner, Character, CompactSubgroup, GroupElement, GroupId,
    Neighborhood, DEFAULT_DEPTH,
};
pub use measure::{
    convolve, cpoisson_ft, cylinder_mass, gauss_ft, genpoisson_ft, local_mean, tail_mass,
    validate_levy, DiscreteMeasure, LevyMeasure, LimitLaw, QuadraticForm,
};
pub use sampler::{
    derive_seed, empirical_ft, empirical_ft_direct, empirical_ft_law, sample_limit_law, sample_row_sum,
    sample_row_sum_direct, sample_row_sums, EmpiricalFt, SeededStream, DEFAULT_BUDGET,
};
pub use schedule::Schedule;
pub use verify::{
    check_theorem, compound_growth, condition_sequences, crosscheck_gensym2, ft_sup_distance,
    generated_subgroup, predict_limit, trend_classify, ConditionResult, ConvergenceReport, FtRow,
    GenSymReport, OverallVerdict, Prediction, Target, TheoremTag, Trend, TrendRule, TrendVerdict,
    VerifyConfig,
};
