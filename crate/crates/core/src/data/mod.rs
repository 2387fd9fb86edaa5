//! Belief ingestion: vocabularies, dump-file loaders, mention tokenization
//! and positionally-constrained negative sampling.

mod belief;
mod ids;
mod load;
mod negative;
mod vocab;

pub use belief::{Belief, BeliefSet, Mention, TripletSet};
pub use ids::{EntityId, RelationId, WordId};
pub use load::{
    load_beliefs, load_triplets, load_weighted_beliefs, tokenize_mention, write_beliefs,
    FileFormat,
};
pub use negative::{
    build_classification_set, generate_negative, generate_negative_relation, CorruptPosition,
};
pub use vocab::Vocabulary;
