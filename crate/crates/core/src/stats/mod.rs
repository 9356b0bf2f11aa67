//! Power-law, normal and stable fits, p-values and Q-Q comparisons.

pub mod descriptive;
pub mod normal;
pub mod powerlaw;
pub mod stable;
pub mod testing;

pub use descriptive::{box_summary, histogram, BoxSummary, Histogram};
pub use normal::{fit_normal, NormalParams};
pub use powerlaw::{
    fit_power_law, fit_power_law_counts, gamma_from_vertex_exponent, pdf_exponent, theoretical_exponent,
    PowerLawFit,
};
pub use stable::{
    fit_stable_location_scale, sample_stable, sample_stable_n, stable_alpha, stable_cdf, stable_pdf,
    StableDistribution, StableParams,
};
pub use testing::{p_value, qq_data, qq_summary, NullDistribution, NullParams, PValue, QqPoint, QqSummary};

/// Default `x_min` for simulated networks.
pub const X_MIN_SIMULATION: u64 = 30;
/// Default `x_min` for collaboration datasets.
pub const X_MIN_DATASET: u64 = 10;
