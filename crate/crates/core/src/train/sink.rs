//! Sparse gradient accumulator for one SGD step.

use std::collections::HashMap;

use crate::data::{EntityId, RelationId, WordId};
use crate::model::EmbeddingModel;

/// Gradients keyed by the rows one belief's objective touches: the positive
/// belief's own vectors plus those of its sampled negatives. Everything else
/// stays untouched, which is what keeps the SGD step sparse.
#[derive(Debug, Clone)]
pub struct GradientSink {
    dim: usize,
    entities: HashMap<EntityId, Vec<f64>>,
    relations: HashMap<RelationId, Vec<f64>>,
    words: HashMap<WordId, Vec<f64>>,
}

impl GradientSink {
    pub fn new(dim: usize) -> Self {
        GradientSink {
            dim,
            entities: HashMap::new(),
            relations: HashMap::new(),
            words: HashMap::new(),
        }
    }

    pub fn clear(&mut self) {
        self.entities.clear();
        self.relations.clear();
        self.words.clear();
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty() && self.relations.is_empty() && self.words.is_empty()
    }

    /// Adds `coeff * direction` to the entity's gradient.
    pub fn add_entity(&mut self, id: EntityId, coeff: f64, direction: &[f64]) {
        axpy(
            self.entities.entry(id).or_insert_with(|| vec![0.0; self.dim]),
            coeff,
            direction,
        );
    }

    pub fn add_relation(&mut self, id: RelationId, coeff: f64, direction: &[f64]) {
        axpy(
            self.relations
                .entry(id)
                .or_insert_with(|| vec![0.0; self.dim]),
            coeff,
            direction,
        );
    }

    pub fn add_word(&mut self, id: WordId, coeff: f64, direction: &[f64]) {
        axpy(
            self.words.entry(id).or_insert_with(|| vec![0.0; self.dim]),
            coeff,
            direction,
        );
    }

    /// Multiplies every accumulated gradient by `factor`; used to chain the
    /// regression residual through an already-accumulated inner gradient.
    pub fn scale_all(&mut self, factor: f64) {
        for grad in self
            .entities
            .values_mut()
            .chain(self.relations.values_mut())
            .chain(self.words.values_mut())
        {
            for g in grad {
                *g *= factor;
            }
        }
    }

    /// One SGD step: `row -= learning_rate * gradient` on every touched row.
    pub fn apply(&self, model: &mut EmbeddingModel, learning_rate: f64) {
        for (id, grad) in &self.entities {
            axpy(model.entity_row_mut(*id), -learning_rate, grad);
        }
        for (id, grad) in &self.relations {
            axpy(model.relation_row_mut(*id), -learning_rate, grad);
        }
        for (id, grad) in &self.words {
            axpy(model.word_row_mut(*id), -learning_rate, grad);
        }
    }

    pub fn entity_grad(&self, id: EntityId) -> Option<&[f64]> {
        self.entities.get(&id).map(Vec::as_slice)
    }

    pub fn relation_grad(&self, id: RelationId) -> Option<&[f64]> {
        self.relations.get(&id).map(Vec::as_slice)
    }

    pub fn word_grad(&self, id: WordId) -> Option<&[f64]> {
        self.words.get(&id).map(Vec::as_slice)
    }

    pub fn touched_entities(&self) -> impl Iterator<Item = (EntityId, &[f64])> {
        self.entities.iter().map(|(id, g)| (*id, g.as_slice()))
    }

    pub fn touched_relations(&self) -> impl Iterator<Item = (RelationId, &[f64])> {
        self.relations.iter().map(|(id, g)| (*id, g.as_slice()))
    }

    pub fn touched_words(&self) -> impl Iterator<Item = (WordId, &[f64])> {
        self.words.iter().map(|(id, g)| (*id, g.as_slice()))
    }
}

fn axpy(acc: &mut [f64], coeff: f64, direction: &[f64]) {
    for (a, d) in acc.iter_mut().zip(direction) {
        *a += coeff * d;
    }
}
