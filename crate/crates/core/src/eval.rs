//! Knowledge-completion evaluation protocols.
//!
//! Entity inference replaces the head (then the tail) of each test belief
//! with every entity from the training vocabulary, ranks the candidates by
//! triplet score and reports mean rank and hit@10, both raw and filtered.
//! The filtered variant deletes corruptions that are themselves known true
//! triplets before taking the rank. Relation prediction ranks relations by
//! the product of the structural and mention conditionals. Triplet
//! classification thresholds a product of exact softmax conditionals with a
//! per-relation cutoff fitted on validation data.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::data::{Belief, BeliefSet, CorruptPosition, EntityId, Mention, RelationId, TripletSet, Vocabulary};
use crate::error::{Error, Result};
use crate::model::{CandidateSets, EmbeddingModel};

/// Rank of one ground-truth entity among its corruptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankResult {
    /// 1-based rank among all candidates.
    pub raw_rank: usize,
    /// 1-based rank after deleting candidates whose corrupted triplet is a
    /// known true triplet. Never exceeds `raw_rank`.
    pub filtered_rank: usize,
    pub candidate_count: usize,
}

/// Ranks the belief's entity at `position` against every candidate, scoring
/// each corrupted triplet by the translation score (rank-equivalent to the
/// softmax probability, whose denominator is shared). Ties break toward the
/// smaller entity id.
pub fn rank_entity(
    model: &EmbeddingModel,
    belief: &Belief,
    position: CorruptPosition,
    candidates: &[EntityId],
    known: &TripletSet,
) -> Result<RankResult> {
    let truth = match position {
        CorruptPosition::Head => belief.head,
        CorruptPosition::Tail => belief.tail,
    };
    if !candidates.contains(&truth) {
        return Err(Error::Protocol(format!(
            "ground-truth entity id {} missing from the candidate pool",
            truth.0
        )));
    }
    let truth_score = model.score_triplet(belief.head, belief.relation, belief.tail);

    let mut raw_beats = 0;
    let mut filtered_beats = 0;
    for &candidate in candidates {
        if candidate == truth {
            continue;
        }
        let (h, t) = match position {
            CorruptPosition::Head => (candidate, belief.tail),
            CorruptPosition::Tail => (belief.head, candidate),
        };
        let score = model.score_triplet(h, belief.relation, t);
        if score > truth_score || (score == truth_score && candidate < truth) {
            raw_beats += 1;
            if !known.contains(h, belief.relation, t) {
                filtered_beats += 1;
            }
        }
    }
    Ok(RankResult {
        raw_rank: raw_beats + 1,
        filtered_rank: filtered_beats + 1,
        candidate_count: candidates.len(),
    })
}

/// Entity-inference metrics over a test split: means over the 2N trials
/// (head replaced, tail replaced) of rank and of the rank-in-top-10
/// indicator, raw and filtered.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityInferenceReport {
    pub mean_rank_raw: f64,
    pub mean_rank_filtered: f64,
    pub hit_at_10_raw: f64,
    pub hit_at_10_filtered: f64,
    pub trials: usize,
    pub candidate_total: usize,
}

/// Runs the entity-inference protocol over the test set with the candidate
/// pool of all entities in the training vocabulary. `known` is the triplet
/// set the filtered metrics delete from (train, or train + valid + test).
pub fn entity_inference_eval(
    model: &EmbeddingModel,
    test: &BeliefSet,
    vocab: &Vocabulary,
    known: &TripletSet,
) -> Result<EntityInferenceReport> {
    if test.is_empty() {
        return Err(Error::Protocol("empty test set".into()));
    }
    let candidates: Vec<EntityId> = vocab.entity_ids().collect();

    let per_belief: Vec<(RankResult, RankResult)> = test
        .beliefs()
        .par_iter()
        .map(|belief| {
            let head = rank_entity(model, belief, CorruptPosition::Head, &candidates, known)?;
            let tail = rank_entity(model, belief, CorruptPosition::Tail, &candidates, known)?;
            Ok((head, tail))
        })
        .collect::<Result<_>>()?;

    let mut rank_raw = 0.0;
    let mut rank_filtered = 0.0;
    let mut hits_raw = 0usize;
    let mut hits_filtered = 0usize;
    let trials = per_belief.len() * 2;
    for result in per_belief.iter().flat_map(|(h, t)| [h, t]) {
        debug_assert!(result.filtered_rank <= result.raw_rank);
        rank_raw += result.raw_rank as f64;
        rank_filtered += result.filtered_rank as f64;
        hits_raw += (result.raw_rank <= 10) as usize;
        hits_filtered += (result.filtered_rank <= 10) as usize;
    }
    Ok(EntityInferenceReport {
        mean_rank_raw: rank_raw / trials as f64,
        mean_rank_filtered: rank_filtered / trials as f64,
        hit_at_10_raw: hits_raw as f64 / trials as f64,
        hit_at_10_filtered: hits_filtered as f64 / trials as f64,
        trials,
        candidate_total: candidates.len(),
    })
}

/// Scores every candidate relation by the sum of the structural and mention
/// conditional log-probabilities, exact softmaxes over `relations`. Without
/// a mention only the structural term is used. Returns `(relation, score)`
/// sorted by descending score, ties toward the smaller id.
pub fn relation_scores(
    model: &EmbeddingModel,
    head: EntityId,
    tail: EntityId,
    mention: Option<&Mention>,
    relations: &[RelationId],
) -> Result<Vec<(RelationId, f64)>> {
    if relations.is_empty() {
        return Err(Error::EmptyCandidates("relations"));
    }
    let struct_probs = model.prob_rel_struct(head, tail, relations)?;
    let mention_probs = match mention {
        Some(m) => Some(model.prob_rel_mention(m, relations)?),
        None => None,
    };
    let mut scored: Vec<(RelationId, f64)> = relations
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut lp = struct_probs[i].ln();
            if let Some(mp) = &mention_probs {
                lp += mp[i].ln();
            }
            (*r, lp)
        })
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    Ok(scored)
}

/// Candidate relations in descending order of plausibility for `<h, ?, t>`
/// with an optional mention.
pub fn rank_relations(
    model: &EmbeddingModel,
    head: EntityId,
    tail: EntityId,
    mention: Option<&Mention>,
    relations: &[RelationId],
) -> Result<Vec<RelationId>> {
    Ok(relation_scores(model, head, tail, mention, relations)?
        .into_iter()
        .map(|(r, _)| r)
        .collect())
}

/// Relation-prediction metrics: mean rank of the true relation plus the
/// fractions ranked in the top 10 and ranked first.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationPredictionReport {
    pub avg_rank: f64,
    pub hit_at_10: f64,
    pub hit_at_1: f64,
    pub beliefs: usize,
    pub relation_total: usize,
}

/// Runs relation prediction over the test set against the full relation
/// universe. With `use_mentions` off, mentions are ignored even when
/// present.
pub fn relation_prediction_eval(
    model: &EmbeddingModel,
    test: &BeliefSet,
    vocab: &Vocabulary,
    use_mentions: bool,
) -> Result<RelationPredictionReport> {
    if test.is_empty() {
        return Err(Error::Protocol("empty test set".into()));
    }
    let relations = vocab.relation_universe().to_vec();

    let ranks: Vec<usize> = test
        .beliefs()
        .par_iter()
        .map(|belief| {
            let mention = if use_mentions {
                belief.mention.as_ref()
            } else {
                None
            };
            let ranked = rank_relations(model, belief.head, belief.tail, mention, &relations)?;
            ranked
                .iter()
                .position(|r| *r == belief.relation)
                .map(|p| p + 1)
                .ok_or_else(|| {
                    Error::Protocol(format!(
                        "ground-truth relation id {} missing from the relation universe",
                        belief.relation.0
                    ))
                })
        })
        .collect::<Result<_>>()?;

    let n = ranks.len() as f64;
    Ok(RelationPredictionReport {
        avg_rank: ranks.iter().sum::<usize>() as f64 / n,
        hit_at_10: ranks.iter().filter(|r| **r <= 10).count() as f64 / n,
        hit_at_1: ranks.iter().filter(|r| **r == 1).count() as f64 / n,
        beliefs: ranks.len(),
        relation_total: relations.len(),
    })
}

/// Classification score of a triplet: the sum of the head, relation and
/// tail conditional log-probabilities under exact softmaxes. No mention
/// term and no 1/3 exponent. Always `<= 0`.
pub fn classify_score(
    model: &EmbeddingModel,
    head: EntityId,
    relation: RelationId,
    tail: EntityId,
    sets: &CandidateSets,
) -> f64 {
    model.log_prob_head(head, relation, tail, sets.heads())
        + model.log_prob_rel_struct(head, relation, tail, sets.relations())
        + model.log_prob_tail(head, relation, tail, sets.tails())
}

/// Per-relation decision thresholds, with a fallback for relations never
/// seen in validation.
#[derive(Debug, Clone)]
pub struct ThresholdTable {
    thresholds: HashMap<RelationId, f64>,
    fallback: f64,
}

impl ThresholdTable {
    /// The threshold for a relation, or the global fallback.
    pub fn get(&self, relation: RelationId) -> f64 {
        self.thresholds
            .get(&relation)
            .copied()
            .unwrap_or(self.fallback)
    }

    pub fn fallback(&self) -> f64 {
        self.fallback
    }

    pub fn relation_count(&self) -> usize {
        self.thresholds.len()
    }
}

/// Fits one threshold per relation present in the labeled validation set by
/// maximizing classification accuracy for that relation, with the decision
/// rule `score >= threshold => positive`. Candidate cutoffs are the
/// midpoints between consecutive sorted scores plus one sentinel below the
/// minimum and one above the maximum; ties prefer the smallest threshold.
/// The fallback threshold is fitted the same way on all validation examples
/// pooled.
pub fn search_thresholds(
    model: &EmbeddingModel,
    validation: &BeliefSet,
    sets: &CandidateSets,
) -> Result<ThresholdTable> {
    if validation.is_empty() {
        return Err(Error::Protocol("empty validation set".into()));
    }
    let scored: Vec<(RelationId, f64, bool)> = validation
        .beliefs()
        .par_iter()
        .map(|belief| {
            let label = belief
                .label
                .ok_or_else(|| Error::Protocol("validation belief without a label".into()))?;
            let score = classify_score(model, belief.head, belief.relation, belief.tail, sets);
            Ok((belief.relation, score, label))
        })
        .collect::<Result<_>>()?;

    let mut by_relation: HashMap<RelationId, Vec<(f64, bool)>> = HashMap::new();
    for (relation, score, label) in &scored {
        by_relation
            .entry(*relation)
            .or_default()
            .push((*score, *label));
    }

    let thresholds = by_relation
        .into_iter()
        .map(|(relation, examples)| (relation, best_threshold(examples).0))
        .collect();
    let fallback =
        best_threshold(scored.into_iter().map(|(_, s, l)| (s, l)).collect()).0;
    Ok(ThresholdTable {
        thresholds,
        fallback,
    })
}

/// Best `(threshold, accuracy)` for `score >= threshold => positive` over
/// labeled scores. Accuracy is piecewise constant between consecutive
/// sorted scores, so midpoints plus the two sentinels cover every
/// achievable value.
fn best_threshold(mut examples: Vec<(f64, bool)>) -> (f64, f64) {
    debug_assert!(!examples.is_empty());
    examples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let n = examples.len();

    // negatives_below[i]: negatives among the first i examples;
    // positives_from[i]: positives among examples[i..]
    let mut negatives_below = vec![0usize; n + 1];
    for (i, (_, label)) in examples.iter().enumerate() {
        negatives_below[i + 1] = negatives_below[i] + !*label as usize;
    }
    let total_positives = n - negatives_below[n];

    let mut best_threshold = examples[0].0 - 1.0;
    let mut best_correct = total_positives; // split point 0: everything positive
    for i in 1..=n {
        let threshold = if i == n {
            examples[n - 1].0 + 1.0
        } else {
            if examples[i - 1].0 == examples[i].0 {
                continue; // equal scores cannot be separated
            }
            (examples[i - 1].0 + examples[i].0) / 2.0
        };
        let positives_from = total_positives - (i - negatives_below[i]);
        let correct = negatives_below[i] + positives_from;
        if correct > best_correct {
            best_correct = correct;
            best_threshold = threshold;
        }
    }
    (best_threshold, best_correct as f64 / n as f64)
}

/// Accuracy of thresholded classification on a labeled test split.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletClassificationReport {
    pub accuracy: f64,
    pub examples: usize,
}

/// Classifies each labeled test triplet with `score >= threshold` for its
/// relation's threshold and reports the fraction of correct decisions.
pub fn triplet_classification_eval(
    model: &EmbeddingModel,
    thresholds: &ThresholdTable,
    test: &BeliefSet,
    sets: &CandidateSets,
) -> Result<TripletClassificationReport> {
    if test.is_empty() {
        return Err(Error::Protocol("empty test set".into()));
    }
    let correct: usize = test
        .beliefs()
        .par_iter()
        .map(|belief| {
            let label = belief
                .label
                .ok_or_else(|| Error::Protocol("test belief without a label".into()))?;
            let score = classify_score(model, belief.head, belief.relation, belief.tail, sets);
            let predicted = score >= thresholds.get(belief.relation);
            Ok((predicted == label) as usize)
        })
        .collect::<Result<Vec<usize>>>()?
        .iter()
        .sum();
    Ok(TripletClassificationReport {
        accuracy: correct as f64 / test.len() as f64,
        examples: test.len(),
    })
}

/// One evaluation result, renderable as an aligned table or as
/// machine-readable key-value lines.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalReport {
    Entity(EntityInferenceReport),
    Relation(RelationPredictionReport),
    Classification(TripletClassificationReport),
}

impl EvalReport {
    pub fn render_table(&self) -> String {
        match self {
            EvalReport::Entity(r) => {
                let rank = |v: f64| format!("{v:.1} / {}", r.candidate_total);
                format!(
                    "ENTITY INFERENCE  ({} trials)\n\
                     {:<14}{:<20}{:<20}\n\
                     {:<14}{:<20}{:<20}\n\
                     {:<14}{:<20}{:<20}\n",
                    r.trials,
                    "METRIC",
                    "RAW",
                    "FILTER",
                    "MEAN RANK",
                    rank(r.mean_rank_raw),
                    rank(r.mean_rank_filtered),
                    "MEAN HIT@10",
                    percent(r.hit_at_10_raw),
                    percent(r.hit_at_10_filtered),
                )
            }
            EvalReport::Relation(r) => format!(
                "RELATION PREDICTION  ({} beliefs, {} relations)\n\
                 {:<12}{:<12}{:<12}\n\
                 {:<12}{:<12}{:<12}\n",
                r.beliefs,
                r.relation_total,
                "AVG. R.",
                "HIT@10",
                "HIT@1",
                format!("{:.1}", r.avg_rank),
                percent(r.hit_at_10),
                percent(r.hit_at_1),
            ),
            EvalReport::Classification(r) => format!(
                "TRIPLET CLASSIFICATION  ({} examples)\nACC.\n{}\n",
                r.examples,
                percent(r.accuracy),
            ),
        }
    }

    pub fn key_values(&self) -> Vec<(&'static str, String)> {
        match self {
            EvalReport::Entity(r) => vec![
                ("task", "entity_inference".into()),
                ("trials", r.trials.to_string()),
                ("candidate_total", r.candidate_total.to_string()),
                ("mean_rank_raw", r.mean_rank_raw.to_string()),
                ("mean_rank_filtered", r.mean_rank_filtered.to_string()),
                ("hit_at_10_raw", r.hit_at_10_raw.to_string()),
                ("hit_at_10_filtered", r.hit_at_10_filtered.to_string()),
            ],
            EvalReport::Relation(r) => vec![
                ("task", "relation_prediction".into()),
                ("beliefs", r.beliefs.to_string()),
                ("relation_total", r.relation_total.to_string()),
                ("avg_rank", r.avg_rank.to_string()),
                ("hit_at_10", r.hit_at_10.to_string()),
                ("hit_at_1", r.hit_at_1.to_string()),
            ],
            EvalReport::Classification(r) => vec![
                ("task", "triplet_classification".into()),
                ("examples", r.examples.to_string()),
                ("accuracy", r.accuracy.to_string()),
            ],
        }
    }

    pub fn render_key_values(&self) -> String {
        self.key_values()
            .into_iter()
            .map(|(k, v)| format!("{k} {v}\n"))
            .collect()
    }
}

fn percent(v: f64) -> String {
    format!("{:.1}%", v * 100.0)
}
