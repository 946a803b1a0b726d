#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod datagen;
pub mod densities;
pub mod distributions;
pub mod error;
pub mod ess;
pub mod glt;
pub mod hill;
pub mod horseshoe;
pub mod model;
pub mod quadrature;
pub mod specfun;

pub use analysis::{summarize, PosteriorSummary};
pub use error::{Error, Result};
pub use glt::{run_chain, GltSampler, GltState};
pub use horseshoe::{run_hs_chain, HsSampler, HsState};
pub use model::{ChainConfig, ChainOutput, Design, Diagnostics, RegressionData, SigmaPrior, XiCenter};
