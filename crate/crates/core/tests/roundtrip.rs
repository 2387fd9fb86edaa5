//! File round-trip properties: writing a loaded belief set back to its
//! format and re-loading reproduces the same id assignments and the same
//! belief sequence.

use proptest::prelude::*;
use tempfile::tempdir;

use kbembed::{load_beliefs, write_beliefs, FileFormat, Vocabulary};

fn entity(i: u8) -> String {
    format!("e{}", i % 12)
}

fn relation(i: u8) -> String {
    format!("r{}", i % 5)
}

fn word(i: u8) -> String {
    format!("w{}", i % 9)
}

fn vocab_tables(vocab: &Vocabulary) -> (Vec<String>, Vec<String>, Vec<String>) {
    let entities = (0..vocab.entity_count() as u32)
        .map(|i| vocab.entity_symbol(kbembed::EntityId(i)).to_owned())
        .collect();
    let relations = (0..vocab.relation_count() as u32)
        .map(|i| vocab.relation_symbol(kbembed::RelationId(i)).to_owned())
        .collect();
    let words = (0..vocab.word_count() as u32)
        .map(|i| vocab.word_symbol(kbembed::WordId(i)).to_owned())
        .collect();
    (entities, relations, words)
}

proptest! {
    #[test]
    fn triplet_files_round_trip(lines in prop::collection::vec((0u8..30, 0u8..10, 0u8..30), 1..40)) {
        let dir = tempdir().unwrap();
        let original = dir.path().join("original.tsv");
        let contents: String = lines
            .iter()
            .map(|(h, r, t)| format!("{}\t{}\t{}\n", entity(*h), relation(*r), entity(*t)))
            .collect();
        std::fs::write(&original, contents).unwrap();

        let mut vocab1 = Vocabulary::new();
        let set1 = load_beliefs(&original, &mut vocab1, FileFormat::Triplet).unwrap();

        let rewritten = dir.path().join("rewritten.tsv");
        write_beliefs(&set1, &vocab1, FileFormat::Triplet, &rewritten).unwrap();
        let mut vocab2 = Vocabulary::new();
        let set2 = load_beliefs(&rewritten, &mut vocab2, FileFormat::Triplet).unwrap();

        prop_assert_eq!(vocab_tables(&vocab1), vocab_tables(&vocab2));
        prop_assert_eq!(set1.beliefs(), set2.beliefs());
        prop_assert_eq!(set1.known_triplets().len(), set2.known_triplets().len());
    }

    #[test]
    fn weighted_files_round_trip(
        lines in prop::collection::vec(
            ((0u8..30, 0u8..10, 0u8..30), prop::collection::vec(0u8..40, 0..5), 1u8..=100),
            1..30,
        )
    ) {
        let dir = tempdir().unwrap();
        let original = dir.path().join("original.tsv");
        let contents: String = lines
            .iter()
            .map(|((h, r, t), mention, c)| {
                let mention_text: Vec<String> = mention.iter().map(|w| word(*w)).collect();
                format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    entity(*h),
                    relation(*r),
                    entity(*t),
                    mention_text.join(" "),
                    *c as f64 / 100.0,
                )
            })
            .collect();
        std::fs::write(&original, contents).unwrap();

        let mut vocab1 = Vocabulary::new();
        let set1 = load_beliefs(&original, &mut vocab1, FileFormat::Weighted).unwrap();

        let rewritten = dir.path().join("rewritten.tsv");
        write_beliefs(&set1, &vocab1, FileFormat::Weighted, &rewritten).unwrap();
        let mut vocab2 = Vocabulary::new();
        let set2 = load_beliefs(&rewritten, &mut vocab2, FileFormat::Weighted).unwrap();

        prop_assert_eq!(vocab_tables(&vocab1), vocab_tables(&vocab2));
        prop_assert_eq!(set1.beliefs(), set2.beliefs());

        // a second rewrite is a fixed point, byte for byte
        let rewritten_again = dir.path().join("rewritten2.tsv");
        write_beliefs(&set2, &vocab2, FileFormat::Weighted, &rewritten_again).unwrap();
        prop_assert_eq!(
            std::fs::read(&rewritten).unwrap(),
            std::fs::read(&rewritten_again).unwrap()
        );
    }
}
