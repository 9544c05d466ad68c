//! Estimation of three-class ROC surfaces and the volume under the surface
//! (VUS) under a semiparametric trinormal model.
//!
//! Measurements are assumed to become normal after an unknown strictly
//! increasing transform. Inference uses only the ranks and labels of the
//! data: a Gibbs sampler imputes latent normal scores consistent with the
//! observed ordering, and, when some subjects lack a gold-standard label,
//! augments the missing disease statuses under a missing-at-random
//! verification model.
//!
//! Modules:
//! - [`dist`]: normal, truncated normal, inverse gamma, Dirichlet and
//!   categorical primitives.
//! - [`trinormal`]: surface geometry, VUS quadrature, TCFs and Youden index.
//! - [`rank`]: ranks, order statistics and latent-score bounds.
//! - [`gibbs`]: the samplers, chain management and posterior summaries.
//! - [`baseline`]: nonparametric empirical VUS and TCFs.
//! - [`simulate`]: data generation, verification mechanisms and studies.
//! - [`io`]: CSV and TOML readers/writers used by the CLI.

pub mod baseline;
pub mod dist;
mod error;
pub mod gibbs;
pub mod io;
pub mod rank;
pub mod simulate;
pub mod trinormal;

pub use error::{Error, Result};
pub use gibbs::{ChainConfig, PosteriorDraws, PosteriorSummary};
pub use rank::{Dataset, Label, RankedData};
pub use trinormal::{SurfaceParams, TrinormalParams};
