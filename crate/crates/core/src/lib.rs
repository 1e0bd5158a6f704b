//! Reduced-order rational surrogates from sampled frequency-response data.
//!
//! The crate builds LTI surrogate models `H(s) = C (sE - A)^{-1} B` from samples
//! `H(s_i)` of an unknown transfer function. Methods provided:
//!
//! * Loewner pencils and their unprocessed / SVD-truncated realizations ([`loewner`]),
//! * the barycentric one-sided realization with three evaluation paths ([`barycentric`]),
//! * greedy AAA fitting in the classic and strictly proper variants ([`aaa`]),
//! * CUR/DEIM interpolation-point selection and least-squares Loewner fits ([`cur`]),
//! * pole placement through a Cauchy solve, automatic dominant-pole selection and a
//!   projection-based reference construction ([`pole_place`]),
//! * error metrics and fit reports ([`metrics`]).

pub mod aaa;
pub mod barycentric;
pub mod cur;
pub mod dataset;
mod error;
pub mod linalg;
pub mod loewner;
pub mod metrics;
pub mod pole_place;
mod serde_complex;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};

pub use aaa::{aaa_fit, aaa_fit_strictly_proper, AaaConfig, AaaFit, AaaVariant, ErrorKind};
pub use barycentric::{
    eval_barycentric, eval_state_space, eval_woodbury, realify, realize, BarycentricModel,
    BarycentricForm, StateSpaceModel, TransferFunction,
};
pub use cur::{cur_decompose, ls_loewner_fit, mimo_ls_weights, select_points, CurResult, LsLoewnerFit, PointPostprocess};
pub use dataset::{FrequencyDataset, NoiseSpec};
pub use loewner::{build_pencil, partition, LoewnerPencil, Partition, PartitionScheme, Truncation};
pub use metrics::{linf_error, pointwise_errors, pole_report, FitReport};
pub use pole_place::{dominance, lfapp_fit, lfpp_fit, place_poles, DominanceTable, LfappMode, LfappOptions, PolePlacementFit};
