//! Dissipation wavenumber, Kolmogorov-scale statistics and the battery of
//! low-mode regularity criteria.
//!
//! The continuum quantifiers are replaced by computable surrogates: a
//! finite exponent set for `∀r`, a tail supremum over the resolved shells
//! `q ≥ q₀` for `limsup_{q→∞}`, and the last tenth of the window for
//! `lim_{ε→0}` and `limsup_{t→T}`. In two dimensions the exponent `3/r`
//! becomes `d/r`.

mod criteria;
mod kolmogorov;
mod record;
mod wavenumber;

pub use criteria::{
    criteria_battery, tail_distances, CriteriaReport, CriterionRow, Integrand, TailSample, Verdict,
    TAIL_FRACTION,
};
pub use kolmogorov::{
    kappa_d, kappa_d_intermittent, kolmogorov_from_series, kolmogorov_stats, window_integral,
    KolmogorovStats,
};
pub use record::{DiagnosticsRecord, Sampler, SeriesLayout};
pub use wavenumber::{
    r_label, wavenumber, wavenumber_from_norms, wavenumbers_from_norms, ShellNorms, SmallnessTest,
    TestRow, Wavenumber, WavenumberConfig, WavenumberReport, Wavenumbers, DEFAULT_C, DEFAULT_DELTA,
};
