//! Second-order boundary value problems with nonlocal conditions and
//! operator coefficients on `ℂ^d`.

pub mod characteristic;
pub mod coercive;
pub mod condition;
pub mod degenerate;
pub mod discretize;
pub mod embedding;
pub mod problem;
pub mod spectral;

pub use characteristic::{characteristic_data, characteristic_from, CharacteristicData};
pub use coercive::{coercive_estimate_report, CoerciveReport, CoerciveSample};
pub use condition::{condition1_check, sector_samples, Condition1Params, Condition1Report};
pub use degenerate::{
    chain_rule_check, degenerate_transform, ChainRuleReport, DegenerateTransform, WeightConvention,
};
pub use discretize::{discretize, discretize_with, DiscretizedOperator};
pub use embedding::{
    balanced_diag_scale, embedding_snumbers, EmbeddingParams, EmbeddingReport,
};
pub use problem::{
    BoundaryFunctional, BvpProblem, InteriorTerm, MatrixFunction, ScalarFunction, WeightSpec,
};
pub use spectral::{bvp_spectral_report, resolvent_snumbers, BvpSpectralReport, SpectralParams, SpectrumPoint};
