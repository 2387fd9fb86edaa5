//! Positionally-constrained negative example generation.
//!
//! Corrupting an entity draws a replacement uniformly from the entities that
//! were ever observed in the same position, so negatives stay hard: given
//! `(PabloPicaso, nationality, Spain)`, a tail corruption may produce
//! `(PabloPicaso, nationality, U.S.)` but never a person that no belief ever
//! put in tail position.

use rand::Rng;

use super::belief::{Belief, BeliefSet, TripletSet};
use super::ids::EntityId;
use super::vocab::Vocabulary;
use crate::error::{Error, Result};

/// Which entity slot of a positive belief to corrupt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptPosition {
    Head,
    Tail,
}

/// Attempts to dodge known triplets before accepting a corrupted draw that
/// collides with one. Unbounded retries could livelock on dense relations.
const KNOWN_TRIPLET_RETRIES: usize = 100;

/// Returns a copy of `positive` with the entity at `position` replaced by a
/// uniform draw from the matching positional occurrence set, excluding the
/// original entity. Draws that reproduce a key in `known` are retried a
/// bounded number of times, then accepted.
pub fn generate_negative(
    positive: &Belief,
    position: CorruptPosition,
    vocab: &Vocabulary,
    known: &TripletSet,
    rng: &mut impl Rng,
) -> Result<Belief> {
    let (pool, original) = match position {
        CorruptPosition::Head => (vocab.head_entities(), positive.head),
        CorruptPosition::Tail => (vocab.tail_entities(), positive.tail),
    };
    ensure_alternative(pool, original, position)?;

    let mut corrupted = positive.clone();
    for _ in 0..KNOWN_TRIPLET_RETRIES {
        let draw = draw_excluding(pool, original, rng);
        match position {
            CorruptPosition::Head => corrupted.head = draw,
            CorruptPosition::Tail => corrupted.tail = draw,
        }
        if !known.contains(corrupted.head, corrupted.relation, corrupted.tail) {
            return Ok(corrupted);
        }
    }
    Ok(corrupted)
}

/// Returns a copy of `positive` with the relation replaced by a uniform draw
/// from the relation universe, excluding the original relation. Head, tail,
/// mention and confidence are preserved.
pub fn generate_negative_relation(
    positive: &Belief,
    vocab: &Vocabulary,
    rng: &mut impl Rng,
) -> Result<Belief> {
    let pool = vocab.relation_universe();
    if pool.iter().all(|r| *r == positive.relation) {
        return Err(Error::DegenerateCorpus(
            "no alternative relation to sample".into(),
        ));
    }
    let mut corrupted = positive.clone();
    loop {
        let draw = pool[rng.gen_range(0..pool.len())];
        if draw != positive.relation {
            corrupted.relation = draw;
            return Ok(corrupted);
        }
    }
}

/// Builds a labeled classification split from positives: each belief is kept
/// with label 1 and paired with one corrupted copy labeled 0, corrupting head
/// or tail with equal probability. Negatives are generated once here so the
/// split is fixed rather than resampled per run.
pub fn build_classification_set(
    positives: &BeliefSet,
    vocab: &Vocabulary,
    rng: &mut impl Rng,
) -> Result<BeliefSet> {
    let mut out = Vec::with_capacity(positives.len() * 2);
    for belief in positives.beliefs() {
        let mut positive = belief.clone();
        positive.label = Some(true);
        out.push(positive);

        let position = if rng.gen_bool(0.5) {
            CorruptPosition::Head
        } else {
            CorruptPosition::Tail
        };
        let mut negative =
            generate_negative(belief, position, vocab, positives.known_triplets(), rng)?;
        negative.label = Some(false);
        out.push(negative);
    }
    Ok(BeliefSet::from_beliefs(out))
}

fn ensure_alternative(
    pool: &[EntityId],
    original: EntityId,
    position: CorruptPosition,
) -> Result<()> {
    if pool.iter().any(|e| *e != original) {
        Ok(())
    } else {
        Err(Error::DegenerateCorpus(format!(
            "no alternative {} entity to sample",
            match position {
                CorruptPosition::Head => "head",
                CorruptPosition::Tail => "tail",
            }
        )))
    }
}

fn draw_excluding(pool: &[EntityId], original: EntityId, rng: &mut impl Rng) -> EntityId {
    loop {
        let draw = pool[rng.gen_range(0..pool.len())];
        if draw != original {
            return draw;
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::data::ids::RelationId;
    use crate::data::load::tokenize_mention;

    /// Vocabulary and belief set from symbolic triplets.
    fn toy_corpus(triplets: &[(&str, &str, &str)]) -> (Vocabulary, BeliefSet) {
        let mut vocab = Vocabulary::new();
        let beliefs = triplets
            .iter()
            .map(|(h, r, t)| {
                let h = vocab.intern_entity(h).unwrap();
                let r = vocab.intern_relation(r).unwrap();
                let t = vocab.intern_entity(t).unwrap();
                vocab.note_belief(h, r, t);
                Belief::triplet(h, r, t)
            })
            .collect();
        (vocab, BeliefSet::from_beliefs(beliefs))
    }

    #[test]
    fn tail_corruption_stays_in_tail_position() {
        let (vocab, set) = toy_corpus(&[
            ("pablo_picasso", "nationality", "spain"),
            ("erdos", "nationality", "us"),
            ("van_gogh", "painted", "sunflowers"),
        ]);
        let positive = &set.beliefs()[0];
        let van_gogh = vocab.entity_id("van_gogh").unwrap();
        let spain = vocab.entity_id("spain").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let neg = generate_negative(
                positive,
                CorruptPosition::Tail,
                &vocab,
                set.known_triplets(),
                &mut rng,
            )
            .unwrap();
            assert_eq!(neg.head, positive.head);
            assert_eq!(neg.relation, positive.relation);
            assert_ne!(neg.tail, spain);
            assert_ne!(neg.tail, van_gogh, "head-only entity drawn as tail");
            assert!(vocab.is_tail_entity(neg.tail));
        }
    }

    #[test]
    fn forced_choice_with_single_alternative() {
        let (vocab, set) = toy_corpus(&[("a", "r", "t1"), ("b", "r", "t2")]);
        let positive = &set.beliefs()[0];
        let t2 = vocab.entity_id("t2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let neg = generate_negative(
                positive,
                CorruptPosition::Tail,
                &vocab,
                set.known_triplets(),
                &mut rng,
            )
            .unwrap();
            assert_eq!(neg.tail, t2);
        }
    }

    #[test]
    fn known_triplet_exclusion_relaxes_when_unavoidable() {
        // the only alternative tail forms a known triplet; after bounded
        // retries the draw is accepted anyway
        let (vocab, set) = toy_corpus(&[("a", "r", "t1"), ("a", "r", "t2")]);
        let positive = &set.beliefs()[0];
        let t2 = vocab.entity_id("t2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let neg = generate_negative(
            positive,
            CorruptPosition::Tail,
            &vocab,
            set.known_triplets(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(neg.tail, t2);
    }

    #[test]
    fn known_triplets_are_avoided_when_possible() {
        let (vocab, set) = toy_corpus(&[
            ("a", "r", "t1"),
            ("a", "r", "t2"),
            ("b", "r", "t3"),
        ]);
        let positive = &set.beliefs()[0];
        let t3 = vocab.entity_id("t3").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let neg = generate_negative(
                positive,
                CorruptPosition::Tail,
                &vocab,
                set.known_triplets(),
                &mut rng,
            )
            .unwrap();
            assert_eq!(neg.tail, t3, "draw landed on a known triplet");
        }
    }

    #[test]
    fn degenerate_positional_set_is_an_error() {
        let (vocab, set) = toy_corpus(&[("a", "r", "t1"), ("b", "r", "t1")]);
        let positive = &set.beliefs()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let err = generate_negative(
            positive,
            CorruptPosition::Tail,
            &vocab,
            set.known_triplets(),
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateCorpus(_)));
    }

    #[test]
    fn entity_draws_are_uniform_over_alternatives() {
        // 11 tail entities, 10 alternatives: 10,000 draws, each alternative
        // expected 1,000 times with sigma = sqrt(10000 * 0.1 * 0.9) = 30;
        // require counts within 4 sigma.
        let mut triplets = vec![("h0", "r", "t0")];
        let tails: Vec<String> = (1..=10).map(|i| format!("t{i}")).collect();
        for t in &tails {
            triplets.push(("h0", "r", t.as_str()));
        }
        let (vocab, _) = toy_corpus(&triplets);
        let positive = Belief::triplet(
            vocab.entity_id("h0").unwrap(),
            RelationId(0),
            vocab.entity_id("t0").unwrap(),
        );
        let empty = TripletSet::new();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut counts = vec![0u32; vocab.entity_count()];
        for _ in 0..10_000 {
            let neg = generate_negative(
                &positive,
                CorruptPosition::Tail,
                &vocab,
                &empty,
                &mut rng,
            )
            .unwrap();
            counts[neg.tail.index()] += 1;
        }
        for t in &tails {
            let c = counts[vocab.entity_id(t).unwrap().index()];
            assert!((880..=1120).contains(&c), "count {c} outside 4 sigma");
        }
    }

    #[test]
    fn relation_corruption_is_forced_with_two_relations() {
        let (vocab, set) = toy_corpus(&[("a", "r0", "b"), ("a", "r1", "b")]);
        let positive = &set.beliefs()[0];
        let r1 = vocab.relation_id("r1").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let neg = generate_negative_relation(positive, &vocab, &mut rng).unwrap();
            assert_eq!(neg.relation, r1);
        }
    }

    #[test]
    fn relation_draws_are_uniform_over_alternatives() {
        // 6 relations, 5 alternatives: expected 2,000 each over 10,000 draws,
        // sigma = sqrt(10000 * 0.2 * 0.8) = 40; require within 4 sigma.
        let triplets: Vec<(String, String, String)> = (0..6)
            .map(|i| ("a".to_string(), format!("r{i}"), "b".to_string()))
            .collect();
        let refs: Vec<(&str, &str, &str)> = triplets
            .iter()
            .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
            .collect();
        let (vocab, set) = toy_corpus(&refs);
        let positive = &set.beliefs()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut counts = vec![0u32; vocab.relation_count()];
        for _ in 0..10_000 {
            let neg = generate_negative_relation(positive, &vocab, &mut rng).unwrap();
            counts[neg.relation.index()] += 1;
        }
        assert_eq!(counts[0], 0);
        for &c in &counts[1..] {
            assert!((1840..=2160).contains(&c), "count {c} outside 4 sigma");
        }
    }

    #[test]
    fn single_relation_universe_is_degenerate() {
        let (vocab, set) = toy_corpus(&[("a", "r", "b")]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let err = generate_negative_relation(&set.beliefs()[0], &vocab, &mut rng).unwrap_err();
        assert!(matches!(err, Error::DegenerateCorpus(_)));
    }

    #[test]
    fn relation_corruption_preserves_other_fields() {
        let (mut vocab, _) = toy_corpus(&[("a", "r0", "b"), ("a", "r1", "b")]);
        let mention = tokenize_mention("county and state of", &mut vocab);
        let mut positive = Belief::triplet(
            vocab.entity_id("a").unwrap(),
            vocab.relation_id("r0").unwrap(),
            vocab.entity_id("b").unwrap(),
        );
        positive.mention = Some(mention.clone());
        positive.confidence = Some(0.9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let neg = generate_negative_relation(&positive, &vocab, &mut rng).unwrap();
        assert_eq!(neg.head, positive.head);
        assert_eq!(neg.tail, positive.tail);
        assert_eq!(neg.mention, Some(mention));
        assert_eq!(neg.confidence, Some(0.9));
        assert_ne!(neg.relation, positive.relation);
    }

    #[test]
    fn classification_set_pairs_each_positive_with_one_negative() {
        let (vocab, set) = toy_corpus(&[
            ("a", "r", "b"),
            ("b", "r", "c"),
            ("c", "r", "a"),
            ("a", "r", "c"),
        ]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let labeled = build_classification_set(&set, &vocab, &mut rng).unwrap();
        assert_eq!(labeled.len(), 8);
        for pair in labeled.beliefs().chunks(2) {
            assert_eq!(pair[0].label, Some(true));
            assert_eq!(pair[1].label, Some(false));
            let differs = (pair[0].head != pair[1].head) as u32
                + (pair[0].relation != pair[1].relation) as u32
                + (pair[0].tail != pair[1].tail) as u32;
            assert_eq!(differs, 1, "negative must differ in exactly one slot");
        }
    }
}
