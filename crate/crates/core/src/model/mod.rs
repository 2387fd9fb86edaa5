//! Learned parameters and the scores and probabilities computed from them.
//!
//! The model embeds entities, relations and mention words in one
//! `d`-dimensional space. A triplet is scored by how well the relation
//! translates the head onto the tail, `-(norm of h + r - t) + bias`, and a
//! mention is scored against a relation by an inner product of the summed
//! word vectors with the relation vector. Conditional probabilities are
//! softmaxes of these scores over candidate pools drawn from the training
//! vocabulary.

mod io;
pub(crate) mod math;

pub use io::{load_model, save_model};

use rand::Rng;

use crate::data::{Belief, EntityId, Mention, RelationId, Vocabulary, WordId};
use crate::error::{Error, Result};
use math::{log_sum_exp, sigmoid, softmax_inplace};

/// Which norm the triplet residual is measured with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    #[default]
    L1,
    L2,
}

impl Norm {
    fn residual_norm(self, h: &[f64], r: &[f64], t: &[f64]) -> f64 {
        match self {
            Norm::L1 => h
                .iter()
                .zip(r)
                .zip(t)
                .map(|((h, r), t)| (h + r - t).abs())
                .sum(),
            Norm::L2 => h
                .iter()
                .zip(r)
                .zip(t)
                .map(|((h, r), t)| {
                    let e = h + r - t;
                    e * e
                })
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// Model shape and initialization parameters.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub dim: usize,
    pub init_scale: f64,
    pub norm: Norm,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            dim: 50,
            init_scale: 6.0,
            norm: Norm::L1,
        }
    }
}

/// Dense row-major parameter matrix.
#[derive(Debug, Clone, PartialEq)]
struct Matrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    fn uniform(rows: usize, dim: usize, bound: f64, rng: &mut impl Rng) -> Self {
        let data = (0..rows * dim)
            .map(|_| rng.gen_range(-bound..=bound))
            .collect();
        Matrix { rows, dim, data }
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// Probability-offset added to the logistic discriminators; it only guards
/// the logs in the negative-sampling objective from -inf.
const PROB_OFFSET: f64 = 1e-9;

/// Entity, relation and word embeddings plus the scalar score biases and
/// logistic offsets.
///
/// Reads are safe from any number of threads. Writes happen only inside the
/// trainer; evaluation takes the model by shared reference and never
/// mutates it.
#[derive(Debug, Clone)]
pub struct EmbeddingModel {
    entities: Matrix,
    relations: Matrix,
    words: Matrix,
    norm: Norm,
    triplet_bias: f64,
    mention_bias: f64,
    triplet_offset: f64,
    mention_offset: f64,
}

impl EmbeddingModel {
    /// Fresh model with entries drawn uniformly from
    /// `[-init_scale/sqrt(d), init_scale/sqrt(d)]`. Biases start at 0 and
    /// stay fixed: they cancel inside every softmax.
    pub fn init(
        n_entities: usize,
        n_relations: usize,
        n_words: usize,
        config: &ModelConfig,
        rng: &mut impl Rng,
    ) -> Self {
        assert!(config.dim >= 1, "embedding dimension must be positive");
        assert!(config.init_scale > 0.0, "init_scale must be positive");
        let bound = config.init_scale / (config.dim as f64).sqrt();
        EmbeddingModel {
            entities: Matrix::uniform(n_entities, config.dim, bound, rng),
            relations: Matrix::uniform(n_relations, config.dim, bound, rng),
            words: Matrix::uniform(n_words, config.dim, bound, rng),
            norm: config.norm,
            triplet_bias: 0.0,
            mention_bias: 0.0,
            triplet_offset: PROB_OFFSET,
            mention_offset: PROB_OFFSET,
        }
    }

    /// Model sized for `vocab`, one row per symbol.
    pub fn init_for_vocab(vocab: &Vocabulary, config: &ModelConfig, rng: &mut impl Rng) -> Self {
        Self::init(
            vocab.entity_count(),
            vocab.relation_count(),
            vocab.word_count(),
            config,
            rng,
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        dim: usize,
        norm: Norm,
        entity_data: Vec<f64>,
        relation_data: Vec<f64>,
        word_data: Vec<f64>,
        triplet_bias: f64,
        mention_bias: f64,
        triplet_offset: f64,
        mention_offset: f64,
    ) -> Self {
        let rows = |data: &Vec<f64>| data.len() / dim.max(1);
        EmbeddingModel {
            entities: Matrix {
                rows: rows(&entity_data),
                dim,
                data: entity_data,
            },
            relations: Matrix {
                rows: rows(&relation_data),
                dim,
                data: relation_data,
            },
            words: Matrix {
                rows: rows(&word_data),
                dim,
                data: word_data,
            },
            norm,
            triplet_bias,
            mention_bias,
            triplet_offset,
            mention_offset,
        }
    }

    pub(crate) fn placeholder() -> Self {
        Self::from_parts(1, Norm::L1, vec![], vec![], vec![], 0.0, 0.0, 0.0, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.entities.dim
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn entity_count(&self) -> usize {
        self.entities.rows
    }

    pub fn relation_count(&self) -> usize {
        self.relations.rows
    }

    pub fn word_count(&self) -> usize {
        self.words.rows
    }

    pub fn triplet_bias(&self) -> f64 {
        self.triplet_bias
    }

    pub fn mention_bias(&self) -> f64 {
        self.mention_bias
    }

    pub fn triplet_offset(&self) -> f64 {
        self.triplet_offset
    }

    pub fn mention_offset(&self) -> f64 {
        self.mention_offset
    }

    pub fn set_triplet_bias(&mut self, bias: f64) {
        self.triplet_bias = bias;
    }

    pub fn set_mention_bias(&mut self, bias: f64) {
        self.mention_bias = bias;
    }

    pub fn entity_row(&self, id: EntityId) -> &[f64] {
        assert!(id.index() < self.entities.rows, "entity id out of range");
        self.entities.row(id.index())
    }

    pub fn relation_row(&self, id: RelationId) -> &[f64] {
        assert!(
            id.index() < self.relations.rows,
            "relation id out of range"
        );
        self.relations.row(id.index())
    }

    pub fn word_row(&self, id: WordId) -> &[f64] {
        assert!(id.index() < self.words.rows, "word id out of range");
        self.words.row(id.index())
    }

    pub fn entity_row_mut(&mut self, id: EntityId) -> &mut [f64] {
        assert!(id.index() < self.entities.rows, "entity id out of range");
        self.entities.row_mut(id.index())
    }

    pub fn relation_row_mut(&mut self, id: RelationId) -> &mut [f64] {
        assert!(
            id.index() < self.relations.rows,
            "relation id out of range"
        );
        self.relations.row_mut(id.index())
    }

    pub fn word_row_mut(&mut self, id: WordId) -> &mut [f64] {
        assert!(id.index() < self.words.rows, "word id out of range");
        self.words.row_mut(id.index())
    }

    /// Translation score of a triplet: `-(norm of h + r - t) + bias`. The
    /// maximum attainable value is the bias, reached exactly when the
    /// residual is zero.
    pub fn score_triplet(&self, h: EntityId, r: RelationId, t: EntityId) -> f64 {
        let hv = self.entity_row(h);
        let rv = self.relation_row(r);
        let tv = self.entity_row(t);
        -self.norm.residual_norm(hv, rv, tv) + self.triplet_bias
    }

    /// Mention-relation affinity: count-weighted sum of the mention's word
    /// vectors dotted with the relation vector, plus bias. An empty mention
    /// scores exactly the bias.
    pub fn score_mention(&self, r: RelationId, mention: &Mention) -> f64 {
        let rv = self.relation_row(r);
        let mut score = 0.0;
        for (word, count) in mention.iter() {
            let wv = self.word_row(word);
            let dot: f64 = wv.iter().zip(rv).map(|(w, r)| w * r).sum();
            score += count as f64 * dot;
        }
        score + self.mention_bias
    }

    /// Softmax over tail candidates of the triplet score with the tail
    /// varying; probabilities are parallel to `candidates`.
    pub fn prob_tail(
        &self,
        h: EntityId,
        r: RelationId,
        candidates: &[EntityId],
    ) -> Result<Vec<f64>> {
        if candidates.is_empty() {
            return Err(Error::EmptyCandidates("tail entities"));
        }
        let mut scores: Vec<f64> = candidates
            .iter()
            .map(|t| self.score_triplet(h, r, *t))
            .collect();
        softmax_inplace(&mut scores);
        Ok(scores)
    }

    /// Softmax over head candidates with the head varying.
    pub fn prob_head(
        &self,
        r: RelationId,
        t: EntityId,
        candidates: &[EntityId],
    ) -> Result<Vec<f64>> {
        if candidates.is_empty() {
            return Err(Error::EmptyCandidates("head entities"));
        }
        let mut scores: Vec<f64> = candidates
            .iter()
            .map(|h| self.score_triplet(*h, r, t))
            .collect();
        softmax_inplace(&mut scores);
        Ok(scores)
    }

    /// Softmax over relation candidates of the triplet score with the
    /// relation varying.
    pub fn prob_rel_struct(
        &self,
        h: EntityId,
        t: EntityId,
        relations: &[RelationId],
    ) -> Result<Vec<f64>> {
        if relations.is_empty() {
            return Err(Error::EmptyCandidates("relations"));
        }
        let mut scores: Vec<f64> = relations
            .iter()
            .map(|r| self.score_triplet(h, *r, t))
            .collect();
        softmax_inplace(&mut scores);
        Ok(scores)
    }

    /// Softmax over relation candidates of the mention score. An empty
    /// mention gives the uniform distribution.
    pub fn prob_rel_mention(
        &self,
        mention: &Mention,
        relations: &[RelationId],
    ) -> Result<Vec<f64>> {
        if relations.is_empty() {
            return Err(Error::EmptyCandidates("relations"));
        }
        let mut scores: Vec<f64> = relations
            .iter()
            .map(|r| self.score_mention(*r, mention))
            .collect();
        softmax_inplace(&mut scores);
        Ok(scores)
    }

    /// Log-probability of `t` under the tail softmax. The true tail is
    /// folded into the normalizer even when it is missing from `candidates`,
    /// so the result is always `<= 0`.
    pub fn log_prob_tail(
        &self,
        h: EntityId,
        r: RelationId,
        t: EntityId,
        candidates: &[EntityId],
    ) -> f64 {
        let target = self.score_triplet(h, r, t);
        self.log_prob_over(
            target,
            candidates.contains(&t),
            candidates.iter().map(|c| self.score_triplet(h, r, *c)),
        )
    }

    pub fn log_prob_head(
        &self,
        h: EntityId,
        r: RelationId,
        t: EntityId,
        candidates: &[EntityId],
    ) -> f64 {
        let target = self.score_triplet(h, r, t);
        self.log_prob_over(
            target,
            candidates.contains(&h),
            candidates.iter().map(|c| self.score_triplet(*c, r, t)),
        )
    }

    pub fn log_prob_rel_struct(
        &self,
        h: EntityId,
        r: RelationId,
        t: EntityId,
        relations: &[RelationId],
    ) -> f64 {
        let target = self.score_triplet(h, r, t);
        self.log_prob_over(
            target,
            relations.contains(&r),
            relations.iter().map(|c| self.score_triplet(h, *c, t)),
        )
    }

    pub fn log_prob_rel_mention(
        &self,
        r: RelationId,
        mention: &Mention,
        relations: &[RelationId],
    ) -> f64 {
        let target = self.score_mention(r, mention);
        self.log_prob_over(
            target,
            relations.contains(&r),
            relations.iter().map(|c| self.score_mention(*c, mention)),
        )
    }

    fn log_prob_over(
        &self,
        target: f64,
        target_in_candidates: bool,
        candidate_scores: impl Iterator<Item = f64>,
    ) -> f64 {
        let mut scores: Vec<f64> = candidate_scores.collect();
        if !target_in_candidates {
            scores.push(target);
        }
        target - log_sum_exp(&scores)
    }

    /// Joint log-probability of a belief: one third of the sum of the
    /// head, structural-relation and tail conditional log-probabilities,
    /// plus the mention conditional when the belief carries a mention.
    /// `exp` of the result is the geometric mean of the three conditionals.
    pub fn belief_log_probability(&self, belief: &Belief, sets: &CandidateSets) -> f64 {
        let (h, r, t) = (belief.head, belief.relation, belief.tail);
        let mut sum = self.log_prob_head(h, r, t, sets.heads())
            + self.log_prob_rel_struct(h, r, t, sets.relations())
            + self.log_prob_tail(h, r, t, sets.tails());
        if let Some(mention) = &belief.mention {
            sum += self.log_prob_rel_mention(r, mention, sets.relations());
        }
        sum / 3.0
    }

    /// Logistic discriminator probability that the triplet is a true
    /// belief, shifted by the triplet offset. Lies in
    /// `(offset, 1 + offset)`.
    pub fn sigmoid_triplet(&self, h: EntityId, r: RelationId, t: EntityId) -> f64 {
        sigmoid(self.score_triplet(h, r, t)) + self.triplet_offset
    }

    /// Logistic discriminator probability that the relation and mention
    /// co-occur, shifted by the mention offset.
    pub fn sigmoid_mention(&self, r: RelationId, mention: &Mention) -> f64 {
        sigmoid(self.score_mention(r, mention)) + self.mention_offset
    }

    /// Rescales every entity and word row with L2 norm above 1 back onto
    /// the unit ball. Run at the end of each training epoch.
    pub fn project_to_unit_ball(&mut self) {
        for m in [&mut self.entities, &mut self.words] {
            for i in 0..m.rows {
                let row = m.row_mut(i);
                let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1.0 {
                    for x in row {
                        *x /= norm;
                    }
                }
            }
        }
    }

    /// FNV-1a digest over all parameter bits; used to assert that
    /// evaluation leaves the model untouched.
    pub fn parameter_checksum(&self) -> u64 {
        let mut hash: u64 = 0xcbf29ce484222325;
        let mut feed = |x: f64| {
            for b in x.to_bits().to_le_bytes() {
                hash ^= b as u64;
                hash = hash.wrapping_mul(0x100000001b3);
            }
        };
        for m in [&self.entities, &self.relations, &self.words] {
            for &x in &m.data {
                feed(x);
            }
        }
        for x in [
            self.triplet_bias,
            self.mention_bias,
            self.triplet_offset,
            self.mention_offset,
        ] {
            feed(x);
        }
        hash
    }

    pub(crate) fn entity_data(&self) -> &[f64] {
        &self.entities.data
    }

    pub(crate) fn relation_data(&self) -> &[f64] {
        &self.relations.data
    }

    pub(crate) fn word_data(&self) -> &[f64] {
        &self.words.data
    }
}

/// Candidate pools for the conditional probabilities: entities seen in head
/// position, entities seen in tail position, and the relation universe.
#[derive(Debug, Clone)]
pub struct CandidateSets {
    heads: Vec<EntityId>,
    tails: Vec<EntityId>,
    relations: Vec<RelationId>,
}

impl CandidateSets {
    pub fn new(heads: Vec<EntityId>, tails: Vec<EntityId>, relations: Vec<RelationId>) -> Self {
        CandidateSets {
            heads,
            tails,
            relations,
        }
    }

    /// Pools from the training vocabulary's positional occurrence sets.
    pub fn from_vocab(vocab: &Vocabulary) -> Self {
        CandidateSets {
            heads: vocab.head_entities().to_vec(),
            tails: vocab.tail_entities().to_vec(),
            relations: vocab.relation_universe().to_vec(),
        }
    }

    pub fn heads(&self) -> &[EntityId] {
        &self.heads
    }

    pub fn tails(&self) -> &[EntityId] {
        &self.tails
    }

    pub fn relations(&self) -> &[RelationId] {
        &self.relations
    }
}
