//! Beliefs, mention multisets and belief collections.

use std::collections::HashSet;

use super::ids::{EntityId, RelationId, WordId};

/// Bag of mention words as `(word, count)` pairs, sorted by word id.
///
/// Mention scores sum word vectors weighted by count, so repeated tokens
/// contribute with multiplicity. The sorted canonical form makes equal
/// multisets compare equal and keeps file round-trips id-stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention {
    counts: Vec<(WordId, u32)>,
}

impl Mention {
    /// Builds the canonical multiset from a token id sequence.
    pub fn from_word_ids(ids: impl IntoIterator<Item = WordId>) -> Self {
        let mut ids: Vec<WordId> = ids.into_iter().collect();
        ids.sort_unstable();
        let mut counts: Vec<(WordId, u32)> = Vec::new();
        for id in ids {
            match counts.last_mut() {
                Some((last, n)) if *last == id => *n += 1,
                _ => counts.push((id, 1)),
            }
        }
        Mention { counts }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Distinct words in the multiset.
    pub fn distinct_words(&self) -> usize {
        self.counts.len()
    }

    /// Total token count, multiplicities included.
    pub fn token_count(&self) -> usize {
        self.counts.iter().map(|(_, n)| *n as usize).sum()
    }

    pub fn count(&self, word: WordId) -> u32 {
        self.counts
            .binary_search_by_key(&word, |(w, _)| *w)
            .map(|i| self.counts[i].1)
            .unwrap_or(0)
    }

    /// `(word, count)` pairs in ascending word-id order.
    pub fn iter(&self) -> impl Iterator<Item = (WordId, u32)> + '_ {
        self.counts.iter().copied()
    }
}

/// One training or evaluation example.
///
/// `mention`, when present, is non-empty; `confidence`, when present, lies in
/// `(0, 1]`; `label` carries the positive/negative tag of classification
/// splits.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    pub head: EntityId,
    pub relation: RelationId,
    pub tail: EntityId,
    pub mention: Option<Mention>,
    pub confidence: Option<f64>,
    pub label: Option<bool>,
}

impl Belief {
    /// A bare triplet with no mention, confidence or label.
    pub fn triplet(head: EntityId, relation: RelationId, tail: EntityId) -> Self {
        Belief {
            head,
            relation,
            tail,
            mention: None,
            confidence: None,
            label: None,
        }
    }

    pub fn key(&self) -> (EntityId, RelationId, EntityId) {
        (self.head, self.relation, self.tail)
    }
}

/// Set of `(h, r, t)` keys, used for false-negative avoidance during
/// sampling and for the filtered evaluation protocol.
#[derive(Debug, Clone, Default)]
pub struct TripletSet {
    keys: HashSet<(EntityId, RelationId, EntityId)>,
}

impl TripletSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, head: EntityId, relation: RelationId, tail: EntityId) -> bool {
        self.keys.insert((head, relation, tail))
    }

    pub fn contains(&self, head: EntityId, relation: RelationId, tail: EntityId) -> bool {
        self.keys.contains(&(head, relation, tail))
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Union with another set, e.g. to widen the filter pool from the
    /// training split to train+valid+test.
    pub fn extend_from(&mut self, other: &TripletSet) {
        self.keys.extend(other.keys.iter().copied());
    }
}

impl FromIterator<(EntityId, RelationId, EntityId)> for TripletSet {
    fn from_iter<I: IntoIterator<Item = (EntityId, RelationId, EntityId)>>(iter: I) -> Self {
        TripletSet {
            keys: iter.into_iter().collect(),
        }
    }
}

/// An ordered collection of beliefs together with the set of distinct
/// `(h, r, t)` keys they contain.
#[derive(Debug, Clone, Default)]
pub struct BeliefSet {
    beliefs: Vec<Belief>,
    known: TripletSet,
}

impl BeliefSet {
    pub fn from_beliefs(beliefs: Vec<Belief>) -> Self {
        let known = beliefs.iter().map(Belief::key).collect();
        BeliefSet { beliefs, known }
    }

    pub fn beliefs(&self) -> &[Belief] {
        &self.beliefs
    }

    pub fn len(&self) -> usize {
        self.beliefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beliefs.is_empty()
    }

    /// The distinct `(h, r, t)` keys of this set.
    pub fn known_triplets(&self) -> &TripletSet {
        &self.known
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mention_merges_repeats() {
        let m = Mention::from_word_ids([WordId(3), WordId(1), WordId(3)]);
        assert_eq!(m.count(WordId(3)), 2);
        assert_eq!(m.count(WordId(1)), 1);
        assert_eq!(m.count(WordId(0)), 0);
        assert_eq!(m.distinct_words(), 2);
        assert_eq!(m.token_count(), 3);
    }

    #[test]
    fn mention_canonical_order_ignores_input_order() {
        let a = Mention::from_word_ids([WordId(2), WordId(0), WordId(2)]);
        let b = Mention::from_word_ids([WordId(0), WordId(2), WordId(2)]);
        assert_eq!(a, b);
    }

    #[test]
    fn known_triplets_match_beliefs_exactly() {
        let b1 = Belief::triplet(EntityId(0), RelationId(0), EntityId(1));
        let b2 = Belief::triplet(EntityId(1), RelationId(0), EntityId(0));
        let set = BeliefSet::from_beliefs(vec![b1.clone(), b2.clone(), b1.clone()]);
        assert_eq!(set.len(), 3);
        assert_eq!(set.known_triplets().len(), 2);
        for b in set.beliefs() {
            assert!(set.known_triplets().contains(b.head, b.relation, b.tail));
        }
        assert!(!set
            .known_triplets()
            .contains(EntityId(0), RelationId(0), EntityId(0)));
    }
}
