//! Joint embeddings for knowledge-base beliefs.
//!
//! A belief is a record `<head, relation, tail>` optionally extended with a
//! free-text relation mention and a machine-assigned confidence score. This
//! crate learns low-dimensional vectors for entities, relations and mention
//! words from a belief repository, and uses them for knowledge completion:
//!
//! - **entity inference**: rank candidate entities for `<h, r, ?>` / `<?, r, t>`;
//! - **relation prediction**: rank candidate relations for `<h, ?, t, m>`;
//! - **triplet classification**: decide plausibility of `<h, r, t>` against a
//!   per-relation threshold.
//!
//! The crate is organized around the lifecycle of a run: [`data`] ingests
//! dump files and generates positionally-constrained negatives, [`model`]
//! holds parameters and computes scores and probabilities, [`train`] runs
//! negative-sampled SGD, and [`eval`] implements the ranking and
//! classification protocols with raw/filtered metrics.

pub mod data;
pub mod error;
pub mod eval;
pub mod model;
pub mod train;

pub use data::{
    build_classification_set, generate_negative, generate_negative_relation, load_beliefs,
    load_triplets, load_weighted_beliefs, tokenize_mention, write_beliefs, Belief, BeliefSet,
    CorruptPosition, EntityId, FileFormat, Mention, RelationId, TripletSet, Vocabulary, WordId,
};
pub use error::{Error, Result};
pub use eval::{
    classify_score, entity_inference_eval, rank_entity, rank_relations, relation_prediction_eval,
    relation_scores, search_thresholds, triplet_classification_eval, EntityInferenceReport,
    EvalReport, RankResult, RelationPredictionReport, ThresholdTable,
    TripletClassificationReport,
};
pub use model::{
    load_model, save_model, CandidateSets, EmbeddingModel, ModelConfig, Norm,
};
pub use train::{
    belief_objective, ns_log_prob, train, GradientSink, LossTrace, NsComponent, Objective,
    TrainConfig,
};
