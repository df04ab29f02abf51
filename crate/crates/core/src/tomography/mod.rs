//! Process tomography of the heralded inverse channel.
//!
//! Six probe states, three two-outcome bases, binomial count simulation and
//! a maximum-likelihood reconstruction of the trace-one Choi matrix χ, scored
//! with the trace-overlap process fidelity.

mod channel;
mod chi;
mod counts;
mod mle;
mod settings;

pub use channel::HeraldedInverse;
pub use chi::{
    apply_channel, apply_channel_raw, choi_of_channel, choi_of_unitary, process_fidelity, ChiEntries, ChiMatrix,
    CHI_HERMITIAN_TOL, CHI_PSD_TOL, CHI_TP_TOL, CHI_TRACE_TOL,
};
pub use counts::{born_probabilities, simulate_counts, CountTable, SettingCounts};
pub use mle::{
    mle_reconstruct, mle_reconstruct_with, negative_log_likelihood, MleOptions, MleReport,
};
pub use settings::{Basis, MeasurementSetting, Probe};
