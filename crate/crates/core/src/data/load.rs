//! Tab-separated dump-file loaders and the matching writer.
//!
//! One belief per line, UTF-8:
//!
//! - triplet files: `head<TAB>relation<TAB>tail`
//! - weighted files: `head<TAB>relation<TAB>tail<TAB>mention text<TAB>confidence`
//!   with the mention field possibly empty and the confidence in `(0, 1]`
//! - classification splits carry a trailing `1`/`0` label field.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::belief::{Belief, BeliefSet, Mention};
use super::vocab::Vocabulary;
use crate::error::{Error, Result};

/// On-disk layout of one belief line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Triplet,
    TripletLabeled,
    Weighted,
    WeightedLabeled,
}

impl FileFormat {
    fn field_count(self) -> usize {
        match self {
            FileFormat::Triplet => 3,
            FileFormat::TripletLabeled => 4,
            FileFormat::Weighted => 5,
            FileFormat::WeightedLabeled => 6,
        }
    }

    fn weighted(self) -> bool {
        matches!(self, FileFormat::Weighted | FileFormat::WeightedLabeled)
    }

    fn labeled(self) -> bool {
        matches!(
            self,
            FileFormat::TripletLabeled | FileFormat::WeightedLabeled
        )
    }

    /// The labeled counterpart of this format.
    pub fn with_label(self) -> FileFormat {
        match self {
            FileFormat::Triplet | FileFormat::TripletLabeled => FileFormat::TripletLabeled,
            FileFormat::Weighted | FileFormat::WeightedLabeled => FileFormat::WeightedLabeled,
        }
    }
}

/// Lowercases, whitespace-splits and maps tokens to word ids, keeping
/// repeated tokens with their multiplicity. Unknown tokens are interned when
/// the vocabulary is growable and dropped when it is frozen. Total: any
/// input yields a (possibly empty) multiset.
pub fn tokenize_mention(text: &str, vocab: &mut Vocabulary) -> Mention {
    let ids = text
        .split_whitespace()
        .filter_map(|token| vocab.intern_word(&token.to_lowercase()));
    Mention::from_word_ids(ids)
}

/// Loads `head<TAB>relation<TAB>tail` lines. Mentions and confidences are
/// absent in the result. A growable `vocab` is extended in first-seen order;
/// a frozen one makes unknown symbols an error.
pub fn load_triplets(path: impl AsRef<Path>, vocab: &mut Vocabulary) -> Result<BeliefSet> {
    load_beliefs(path, vocab, FileFormat::Triplet)
}

/// Loads `head<TAB>relation<TAB>tail<TAB>mention<TAB>confidence` lines with
/// tokenized mentions and confidences in `(0, 1]`.
pub fn load_weighted_beliefs(path: impl AsRef<Path>, vocab: &mut Vocabulary) -> Result<BeliefSet> {
    load_beliefs(path, vocab, FileFormat::Weighted)
}

/// Loads a belief file in any supported line format.
pub fn load_beliefs(
    path: impl AsRef<Path>,
    vocab: &mut Vocabulary,
    format: FileFormat,
) -> Result<BeliefSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut beliefs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line_no = idx + 1;
        beliefs.push(parse_line(&line, line_no, path, vocab, format)?);
    }
    Ok(BeliefSet::from_beliefs(beliefs))
}

fn parse_line(
    line: &str,
    line_no: usize,
    path: &Path,
    vocab: &mut Vocabulary,
    format: FileFormat,
) -> Result<Belief> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != format.field_count() {
        return Err(Error::Parse {
            path: path.to_owned(),
            line: line_no,
            msg: format!(
                "expected {} tab-separated fields, found {}",
                format.field_count(),
                fields.len()
            ),
        });
    }

    let oov = |namespace: &'static str, symbol: &str| Error::OutOfVocabulary {
        path: path.to_owned(),
        line: line_no,
        namespace,
        symbol: symbol.to_owned(),
    };
    let head = vocab
        .intern_entity(fields[0])
        .ok_or_else(|| oov("entity", fields[0]))?;
    let relation = vocab
        .intern_relation(fields[1])
        .ok_or_else(|| oov("relation", fields[1]))?;
    let tail = vocab
        .intern_entity(fields[2])
        .ok_or_else(|| oov("entity", fields[2]))?;
    vocab.note_belief(head, relation, tail);

    let mut belief = Belief::triplet(head, relation, tail);
    if format.weighted() {
        let mention = tokenize_mention(fields[3], vocab);
        if !mention.is_empty() {
            belief.mention = Some(mention);
        }
        let raw = fields[4];
        let value: f64 = raw.parse().map_err(|_| Error::Parse {
            path: path.to_owned(),
            line: line_no,
            msg: format!("confidence '{raw}' is not a number"),
        })?;
        if !(value > 0.0 && value <= 1.0) {
            return Err(Error::ConfidenceRange {
                path: path.to_owned(),
                line: line_no,
                value,
            });
        }
        belief.confidence = Some(value);
    }
    if format.labeled() {
        let raw = *fields.last().unwrap();
        belief.label = Some(match raw {
            "1" => true,
            "0" => false,
            _ => {
                return Err(Error::Parse {
                    path: path.to_owned(),
                    line: line_no,
                    msg: format!("label '{raw}' is not 1 or 0"),
                })
            }
        });
    }
    Ok(belief)
}

/// Writes a belief set back to a dump file. Mention tokens are emitted in
/// canonical word-id order, which re-loading maps to the same multiset and
/// the same first-seen id assignment.
pub fn write_beliefs(
    set: &BeliefSet,
    vocab: &Vocabulary,
    format: FileFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for belief in set.beliefs() {
        write_line(&mut out, belief, vocab, format).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

fn write_line(
    out: &mut impl Write,
    belief: &Belief,
    vocab: &Vocabulary,
    format: FileFormat,
) -> std::io::Result<()> {
    write!(
        out,
        "{}\t{}\t{}",
        vocab.entity_symbol(belief.head),
        vocab.relation_symbol(belief.relation),
        vocab.entity_symbol(belief.tail)
    )?;
    if format.weighted() {
        out.write_all(b"\t")?;
        if let Some(mention) = &belief.mention {
            let mut first = true;
            for (word, count) in mention.iter() {
                for _ in 0..count {
                    if !first {
                        out.write_all(b" ")?;
                    }
                    out.write_all(vocab.word_symbol(word).as_bytes())?;
                    first = false;
                }
            }
        }
        write!(out, "\t{}", belief.confidence.unwrap_or(1.0))?;
    }
    if format.labeled() {
        write!(out, "\t{}", if belief.label == Some(true) { 1 } else { 0 })?;
    }
    out.write_all(b"\n")
}
