//! Cosine-based social bias metrics for word embeddings.
//!
//! The crate covers embedding and word-set I/O, the cosine primitives shared
//! by every metric, four bias metrics (WEAT, MAC, Direct Bias, SAME), checks
//! that exercise their documented limits on small constructed embeddings,
//! and a synthetic-data harness that plants a known bias and measures how
//! well each metric recovers it.

pub mod direct_bias;
pub mod embedding_io;
pub mod error;
pub mod mac;
pub mod oracles;
pub mod same;
pub mod similarity;
pub mod stats;
pub mod synth;
pub mod vector;
pub mod weat;

pub use direct_bias::{
    bias_direction_mean, bias_direction_pca, direct_bias, direct_bias_per_word, direct_bias_subspace_norm,
    BiasSubspace, DirectionMethod, SubspaceWarning,
};
pub use embedding_io::{
    load_embeddings, resolve, save_embeddings, EmbeddingSet, Format, ResolveMode, ResolvedSet, ResolvedSets,
    WordSetConfig,
};
pub use error::{Error, Result};
pub use mac::{mac_score, MacResult};
pub use same::{
    same_set_binary, same_set_multi, same_skew, same_skew_stereo_multi, same_stereotype, Contrast, SameResult,
    SkewStereoResult, StereotypeVariant,
};
pub use similarity::{attribute_mean, cosine, set_similarity};
pub use vector::Vector;
pub use weat::{weat, weat_effect_size, weat_p_value, weat_test_statistic, WeatResult};
