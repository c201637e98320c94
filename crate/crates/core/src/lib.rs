//! Spreading speeds of a two-species Lotka-Volterra competition-diffusion
//! system: closed-form predictions, a reaction-diffusion simulator that
//! measures them, and a Hamilton-Jacobi solver for the thin-front limit.

pub mod error;
pub mod harness;
pub mod hj;
pub mod rd_sim;
pub mod speeds;

pub use error::{Error, Result};
pub use speeds::{
    assemble_speeds, coexistence_equilibrium, hat_c_nlp, lemma_b2_speed_cap,
    lemma_b2_speed_cap_tilde, llw_bounds, mu_hat, sigma_set, tilde_lambda_nlp, CompetitionRegime,
    DecayRates, LlwBounds, LlwInput, LlwProvenance, ModelParams, NlpCase, SigmaSet, SpeedReport,
    SpreadingRegime,
};
