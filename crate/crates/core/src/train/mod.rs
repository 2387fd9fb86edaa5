//! Negative-sampled SGD over belief objectives.
//!
//! Exact conditional probabilities are softmaxes over tens of thousands of
//! candidates, too expensive to normalize per step. Each conditional is
//! therefore approximated by a binary discrimination problem: the positive
//! belief against `k` corrupted negatives, scored through the logistic
//! discriminators. SGD then updates only the vectors the step touched.

mod hogwild;
mod sink;

pub use sink::GradientSink;

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{
    generate_negative, generate_negative_relation, Belief, BeliefSet, CorruptPosition, Mention,
    TripletSet, Vocabulary,
};
use crate::error::{Error, Result};
use crate::model::math::sigmoid;
use crate::model::{EmbeddingModel, Norm};
use hogwild::Hogwild;

/// Which loss the trainer minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Maximize the joint log-likelihood of the training beliefs.
    MaxLikelihood,
    /// Regress the belief log-probability onto the log of its
    /// machine-assigned confidence.
    ConfidenceRegression,
}

/// Trainer settings. One root seed drives both the shuffle order and the
/// negative draws, split into independent streams.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub objective: Objective,
    /// Negatives per positive (`k`).
    pub negative_samples: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub shuffle: bool,
    /// 0 = single-threaded and deterministic; >0 = lock-free concurrent
    /// updates, nondeterministic.
    pub parallel_workers: usize,
    /// Write one `epoch <i> loss <mean> secs <t>` line per epoch to stderr.
    pub progress: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            objective: Objective::MaxLikelihood,
            negative_samples: 5,
            learning_rate: 0.01,
            epochs: 500,
            seed: 42,
            shuffle: true,
            parallel_workers: 0,
            progress: false,
        }
    }
}

/// Per-epoch mean objective values and wall times.
#[derive(Debug, Clone, Default)]
pub struct LossTrace {
    losses: Vec<f64>,
    secs: Vec<f64>,
}

impl LossTrace {
    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    pub fn epoch_secs(&self) -> &[f64] {
        &self.secs
    }

    pub fn len(&self) -> usize {
        self.losses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.losses.is_empty()
    }

    /// Two-column `epoch<TAB>loss` dump.
    pub fn write_tsv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let mut out = String::new();
        for (i, loss) in self.losses.iter().enumerate() {
            out.push_str(&format!("{i}\t{loss}\n"));
        }
        std::fs::write(path.as_ref(), out).map_err(|e| Error::io(path.as_ref(), e))
    }
}

/// The four negative-sampled conditionals of the belief objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsComponent {
    /// Head conditional; negatives corrupt the head within its positional set.
    Head,
    /// Tail conditional; negatives corrupt the tail within its positional set.
    Tail,
    /// Structural relation conditional; negatives corrupt the relation.
    RelationStruct,
    /// Mention relation conditional; negatives corrupt the relation, the
    /// mention stays fixed.
    RelationMention,
}

/// Negative-sampled estimate of one conditional log-probability:
/// `log Pr(1 | positive) + sum over k draws of log Pr(0 | negative)`.
///
/// Analytic gradients for every touched vector are accumulated into `sink`,
/// multiplied by `scale`; the returned value is unscaled. The estimate is
/// finite for any finite scores and bounded above by `(k+1) * ln(1+offset)`.
#[allow(clippy::too_many_arguments)]
pub fn ns_log_prob(
    model: &EmbeddingModel,
    belief: &Belief,
    component: NsComponent,
    k: usize,
    vocab: &Vocabulary,
    known: &TripletSet,
    rng: &mut impl Rng,
    sink: &mut GradientSink,
    scale: f64,
) -> Result<f64> {
    let mut direction = vec![0.0; model.dim()];
    match component {
        NsComponent::Head | NsComponent::Tail | NsComponent::RelationStruct => {
            let mut value = triplet_term(model, belief, true, scale, sink, &mut direction);
            for _ in 0..k {
                let negative = match component {
                    NsComponent::Head => {
                        generate_negative(belief, CorruptPosition::Head, vocab, known, rng)?
                    }
                    NsComponent::Tail => {
                        generate_negative(belief, CorruptPosition::Tail, vocab, known, rng)?
                    }
                    _ => generate_negative_relation(belief, vocab, rng)?,
                };
                value += triplet_term(model, &negative, false, scale, sink, &mut direction);
            }
            Ok(value)
        }
        NsComponent::RelationMention => {
            let mention = belief.mention.as_ref().ok_or_else(|| {
                Error::Protocol("mention component evaluated on a mention-less belief".into())
            })?;
            fill_word_sum(model, mention, &mut direction);
            let mut value = mention_term(model, belief.relation, mention, true, scale, sink, &direction);
            for _ in 0..k {
                let negative = generate_negative_relation(belief, vocab, rng)?;
                value +=
                    mention_term(model, negative.relation, mention, false, scale, sink, &direction);
            }
            Ok(value)
        }
    }
}

/// `ln(p)` and `d ln(p) / d score` for the logistic discriminators, where
/// `p = sigmoid(score) + offset` on positives and `1 - sigmoid(score) - offset`
/// on negatives. A negative probability driven below the smallest positive
/// normal is floored there with a zero gradient.
fn log_discriminator(score: f64, offset: f64, positive: bool) -> (f64, f64) {
    let s = sigmoid(score);
    let ds = s * (1.0 - s);
    if positive {
        let p = s + offset;
        (p.ln(), ds / p)
    } else {
        let p = 1.0 - s - offset;
        if p <= f64::MIN_POSITIVE {
            (f64::MIN_POSITIVE.ln(), 0.0)
        } else {
            (p.ln(), -ds / p)
        }
    }
}

fn triplet_term(
    model: &EmbeddingModel,
    belief: &Belief,
    positive: bool,
    scale: f64,
    sink: &mut GradientSink,
    direction: &mut [f64],
) -> f64 {
    let (h, r, t) = (belief.head, belief.relation, belief.tail);
    let score = model.score_triplet(h, r, t);
    let (value, dv) = log_discriminator(score, model.triplet_offset(), positive);
    let coeff = scale * dv;
    if coeff != 0.0 {
        fill_residual_direction(model, h, r, t, direction);
        // d score / d h = -dir, d score / d r = -dir, d score / d t = +dir
        sink.add_entity(h, -coeff, direction);
        sink.add_relation(r, -coeff, direction);
        sink.add_entity(t, coeff, direction);
    }
    value
}

/// Gradient of the residual norm with respect to the residual
/// `e = h + r - t`: the sign vector under L1, `e / |e|` under L2.
fn fill_residual_direction(
    model: &EmbeddingModel,
    h: crate::data::EntityId,
    r: crate::data::RelationId,
    t: crate::data::EntityId,
    direction: &mut [f64],
) {
    let hv = model.entity_row(h);
    let rv = model.relation_row(r);
    let tv = model.entity_row(t);
    match model.norm() {
        Norm::L1 => {
            for i in 0..direction.len() {
                let e = hv[i] + rv[i] - tv[i];
                direction[i] = if e > 0.0 {
                    1.0
                } else if e < 0.0 {
                    -1.0
                } else {
                    0.0
                };
            }
        }
        Norm::L2 => {
            let mut norm = 0.0;
            for i in 0..direction.len() {
                let e = hv[i] + rv[i] - tv[i];
                direction[i] = e;
                norm += e * e;
            }
            norm = norm.sqrt();
            if norm > 0.0 {
                for d in direction.iter_mut() {
                    *d /= norm;
                }
            } else {
                direction.fill(0.0);
            }
        }
    }
}

/// Count-weighted sum of the mention's word vectors; the gradient of the
/// mention score with respect to the relation vector.
fn fill_word_sum(model: &EmbeddingModel, mention: &Mention, sum: &mut [f64]) {
    sum.fill(0.0);
    for (word, count) in mention.iter() {
        let wv = model.word_row(word);
        for i in 0..sum.len() {
            sum[i] += count as f64 * wv[i];
        }
    }
}

fn mention_term(
    model: &EmbeddingModel,
    relation: crate::data::RelationId,
    mention: &Mention,
    positive: bool,
    scale: f64,
    sink: &mut GradientSink,
    word_sum: &[f64],
) -> f64 {
    let score = model.score_mention(relation, mention);
    let (value, dv) = log_discriminator(score, model.mention_offset(), positive);
    let coeff = scale * dv;
    if coeff != 0.0 {
        sink.add_relation(relation, coeff, word_sum);
        let rv = model.relation_row(relation);
        for (word, count) in mention.iter() {
            sink.add_word(word, coeff * count as f64, rv);
        }
    }
    value
}

/// Loss and gradients of one belief under the configured objective.
///
/// Maximum likelihood: `-(1/3) * sum` of the component estimates, the
/// mention component present only when the belief carries a mention.
/// Confidence regression: `0.5 * (yhat - ln c)^2` where `yhat` is the same
/// `(1/3)`-sum, gradients chained through the residual. The sink is cleared
/// first and holds the loss gradient on return.
pub fn belief_objective(
    model: &EmbeddingModel,
    belief: &Belief,
    config: &TrainConfig,
    vocab: &Vocabulary,
    known: &TripletSet,
    rng: &mut impl Rng,
    sink: &mut GradientSink,
) -> Result<f64> {
    sink.clear();
    let k = config.negative_samples;
    let components: &[NsComponent] = if belief.mention.is_some() {
        &[
            NsComponent::Head,
            NsComponent::RelationStruct,
            NsComponent::RelationMention,
            NsComponent::Tail,
        ]
    } else {
        &[
            NsComponent::Head,
            NsComponent::RelationStruct,
            NsComponent::Tail,
        ]
    };

    match config.objective {
        Objective::MaxLikelihood => {
            let mut sum = 0.0;
            for component in components {
                sum += ns_log_prob(
                    model, belief, *component, k, vocab, known, rng, sink, -1.0 / 3.0,
                )?;
            }
            Ok(-sum / 3.0)
        }
        Objective::ConfidenceRegression => {
            let confidence = belief.confidence.ok_or(Error::MissingConfidence)?;
            let mut estimate = 0.0;
            for component in components {
                estimate += ns_log_prob(
                    model, belief, *component, k, vocab, known, rng, sink, 1.0 / 3.0,
                )?;
            }
            estimate /= 3.0;
            let residual = estimate - confidence.clamp(1e-6, 1.0).ln();
            sink.scale_all(residual);
            Ok(0.5 * residual * residual)
        }
    }
}

// Seed-stream tags keeping the shuffle order and the negative draws
// independent of each other.
const SHUFFLE_STREAM: u64 = 1;
const SAMPLE_STREAM: u64 = 2;
const WORKER_STREAM_BASE: u64 = 16;

/// Runs SGD for `config.epochs` epochs: per belief, one gradient step on
/// every touched vector; per epoch, entity and word rows are projected back
/// onto the unit ball and the mean loss is recorded. Deterministic when
/// `parallel_workers == 0`.
pub fn train(
    model: &mut EmbeddingModel,
    train_set: &BeliefSet,
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<LossTrace> {
    check_model_vocab(model, vocab)?;
    assert!(config.negative_samples >= 1, "negative_samples must be >= 1");
    assert!(config.learning_rate > 0.0, "learning_rate must be positive");

    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut shuffle_rng = stream_rng(config.seed, SHUFFLE_STREAM);
    let mut sample_rng = stream_rng(config.seed, SAMPLE_STREAM);
    let mut trace = LossTrace::default();

    for epoch in 0..config.epochs {
        let start = Instant::now();
        if config.shuffle {
            order.shuffle(&mut shuffle_rng);
        }
        let mean = if config.parallel_workers == 0 {
            epoch_sequential(model, train_set, vocab, config, &order, epoch, &mut sample_rng)?
        } else {
            epoch_parallel(model, train_set, vocab, config, &order, epoch)?
        };
        model.project_to_unit_ball();
        let secs = start.elapsed().as_secs_f64();
        if config.progress {
            eprintln!("epoch {epoch} loss {mean} secs {secs}");
        }
        trace.losses.push(mean);
        trace.secs.push(secs);
    }
    Ok(trace)
}

fn check_model_vocab(model: &EmbeddingModel, vocab: &Vocabulary) -> Result<()> {
    let pairs = [
        ("entities", model.entity_count(), vocab.entity_count()),
        ("relations", model.relation_count(), vocab.relation_count()),
        ("words", model.word_count(), vocab.word_count()),
    ];
    for (what, m, v) in pairs {
        if m != v {
            return Err(Error::VocabMismatch {
                what,
                model: m,
                vocab: v,
            });
        }
    }
    Ok(())
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn epoch_sequential(
    model: &mut EmbeddingModel,
    train_set: &BeliefSet,
    vocab: &Vocabulary,
    config: &TrainConfig,
    order: &[usize],
    epoch: usize,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let known = train_set.known_triplets();
    let mut sink = GradientSink::new(model.dim());
    let mut total = 0.0;
    for &index in order {
        let belief = &train_set.beliefs()[index];
        let loss = belief_objective(model, belief, config, vocab, known, rng, &mut sink)?;
        if loss.is_nan() {
            return Err(Error::NumericalAbort {
                epoch,
                belief_index: index,
            });
        }
        total += loss;
        sink.apply(model, config.learning_rate);
    }
    Ok(mean(total, order.len()))
}

fn epoch_parallel(
    model: &mut EmbeddingModel,
    train_set: &BeliefSet,
    vocab: &Vocabulary,
    config: &TrainConfig,
    order: &[usize],
    epoch: usize,
) -> Result<f64> {
    let workers = config.parallel_workers;
    let chunk_len = order.len().div_ceil(workers).max(1);
    let shared = Hogwild::new(std::mem::replace(model, EmbeddingModel::placeholder()));
    let known = train_set.known_triplets();

    let totals: Vec<Result<f64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = order
            .chunks(chunk_len)
            .enumerate()
            .map(|(worker, chunk)| {
                let mut shared = shared.clone();
                scope.spawn(move || -> Result<f64> {
                    let stream =
                        WORKER_STREAM_BASE + (epoch as u64) * (workers as u64) + worker as u64;
                    let mut rng = stream_rng(config.seed, stream);
                    let mut sink = GradientSink::new(shared.dim());
                    let mut total = 0.0;
                    for &index in chunk {
                        let belief = &train_set.beliefs()[index];
                        let loss = belief_objective(
                            &shared, belief, config, vocab, known, &mut rng, &mut sink,
                        )?;
                        if loss.is_nan() {
                            return Err(Error::NumericalAbort {
                                epoch,
                                belief_index: index,
                            });
                        }
                        total += loss;
                        sink.apply(&mut shared, config.learning_rate);
                    }
                    Ok(total)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training worker panicked"))
            .collect()
    });

    *model = shared.into_inner();
    let mut sum = 0.0;
    for total in totals {
        sum += total?;
    }
    Ok(mean(sum, order.len()))
}

fn mean(total: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        total / n as f64
    }
}
