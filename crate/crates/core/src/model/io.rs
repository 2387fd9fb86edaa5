//! Binary model persistence.
//!
//! Single little-endian file, fixed field order:
//!
//! ```text
//! u32  format version (currently 1)
//! u32  embedding dimension d
//! u64  entity count, u64 relation count, u64 word count
//! u8   norm kind (0 = L1, 1 = L2)
//! f64  triplet bias, f64 mention bias, f64 triplet offset, f64 mention offset
//! f64  entity matrix, row-major        (entity count x d)
//! f64  relation matrix, row-major      (relation count x d)
//! f64  word matrix, row-major          (word count x d)
//! entity, relation, word symbol tables (u32 byte length + UTF-8, per symbol)
//! head-occurrence, tail-occurrence, relation-universe id lists
//!                                      (u64 count + u32 ids, per list)
//! ```
//!
//! The trailing id lists carry the vocabulary's positional indexes so a
//! loaded model can rebuild its candidate pools without the training file.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{EmbeddingModel, Norm};
use crate::data::Vocabulary;
use crate::error::{Error, Result};

const FORMAT_VERSION: u32 = 1;

/// Serializes the model and its governing vocabulary. Counts must agree.
pub fn save_model(
    model: &EmbeddingModel,
    vocab: &Vocabulary,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    check_counts(model, vocab)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_model(&mut out, model, vocab).map_err(|e| Error::io(path, e))
}

fn write_model(
    out: &mut impl Write,
    model: &EmbeddingModel,
    vocab: &Vocabulary,
) -> std::io::Result<()> {
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&(model.dim() as u32).to_le_bytes())?;
    out.write_all(&(model.entity_count() as u64).to_le_bytes())?;
    out.write_all(&(model.relation_count() as u64).to_le_bytes())?;
    out.write_all(&(model.word_count() as u64).to_le_bytes())?;
    out.write_all(&[match model.norm() {
        Norm::L1 => 0u8,
        Norm::L2 => 1u8,
    }])?;
    for x in [
        model.triplet_bias(),
        model.mention_bias(),
        model.triplet_offset(),
        model.mention_offset(),
    ] {
        out.write_all(&x.to_le_bytes())?;
    }
    for data in [model.entity_data(), model.relation_data(), model.word_data()] {
        for x in data {
            out.write_all(&x.to_le_bytes())?;
        }
    }
    for table in [
        vocab.entity_symbols(),
        vocab.relation_symbols(),
        vocab.word_symbols(),
    ] {
        for symbol in table {
            out.write_all(&(symbol.len() as u32).to_le_bytes())?;
            out.write_all(symbol.as_bytes())?;
        }
    }
    for ids in [
        vocab.head_entities().iter().map(|e| e.0).collect::<Vec<_>>(),
        vocab.tail_entities().iter().map(|e| e.0).collect::<Vec<_>>(),
        vocab.relation_universe().iter().map(|r| r.0).collect::<Vec<_>>(),
    ] {
        out.write_all(&(ids.len() as u64).to_le_bytes())?;
        for id in ids {
            out.write_all(&id.to_le_bytes())?;
        }
    }
    out.flush()
}

/// Loads a model file, validating version, counts and offset ranges. The
/// returned vocabulary is frozen.
pub fn load_model(path: impl AsRef<Path>) -> Result<(EmbeddingModel, Vocabulary)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = Reader {
        inner: BufReader::new(file),
        path,
    };
    read_model(&mut reader)
}

struct Reader<'a> {
    inner: BufReader<File>,
    path: &'a Path,
}

impl Reader<'_> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner
            .read_exact(&mut buf)
            .map_err(|_| self.bad("truncated file"))?;
        Ok(buf)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    fn matrix(&mut self, rows: usize, dim: usize) -> Result<Vec<f64>> {
        let mut data = Vec::with_capacity(rows * dim);
        for _ in 0..rows * dim {
            data.push(self.f64()?);
        }
        Ok(data)
    }

    fn symbols(&mut self, count: usize) -> Result<Vec<String>> {
        let mut table = Vec::with_capacity(count);
        for _ in 0..count {
            let len = self.u32()? as usize;
            let mut buf = vec![0u8; len];
            self.inner
                .read_exact(&mut buf)
                .map_err(|_| self.bad("truncated symbol table"))?;
            let symbol =
                String::from_utf8(buf).map_err(|_| self.bad("symbol is not valid UTF-8"))?;
            table.push(symbol);
        }
        Ok(table)
    }

    fn id_list(&mut self, bound: usize, what: &str) -> Result<Vec<u32>> {
        let count = self.u64()? as usize;
        let mut ids = Vec::with_capacity(count);
        for _ in 0..count {
            let id = self.u32()?;
            if id as usize >= bound {
                return Err(self.bad(&format!("{what} id {id} outside symbol table")));
            }
            ids.push(id);
        }
        Ok(ids)
    }

    fn bad(&self, msg: &str) -> Error {
        Error::ModelFormat {
            path: self.path.to_owned(),
            msg: msg.to_owned(),
        }
    }
}

fn read_model(r: &mut Reader) -> Result<(EmbeddingModel, Vocabulary)> {
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(r.bad(&format!(
            "unsupported format version {version} (expected {FORMAT_VERSION})"
        )));
    }
    let dim = r.u32()? as usize;
    if dim == 0 {
        return Err(r.bad("dimension must be positive"));
    }
    let n_entities = r.u64()? as usize;
    let n_relations = r.u64()? as usize;
    let n_words = r.u64()? as usize;
    let norm = match r.bytes::<1>()?[0] {
        0 => Norm::L1,
        1 => Norm::L2,
        other => return Err(r.bad(&format!("unknown norm kind {other}"))),
    };
    let triplet_bias = r.f64()?;
    let mention_bias = r.f64()?;
    let triplet_offset = r.f64()?;
    let mention_offset = r.f64()?;
    for (name, offset) in [
        ("triplet offset", triplet_offset),
        ("mention offset", mention_offset),
    ] {
        if !(0.0..=1e-6).contains(&offset) {
            return Err(r.bad(&format!("{name} {offset} outside [0, 1e-6]")));
        }
    }

    let entity_data = r.matrix(n_entities, dim)?;
    let relation_data = r.matrix(n_relations, dim)?;
    let word_data = r.matrix(n_words, dim)?;

    let entities = r.symbols(n_entities)?;
    let relations = r.symbols(n_relations)?;
    let words = r.symbols(n_words)?;
    let head_occurrence = r.id_list(n_entities, "head-occurrence")?;
    let tail_occurrence = r.id_list(n_entities, "tail-occurrence")?;
    let relation_universe = r.id_list(n_relations, "relation-universe")?;

    let model = EmbeddingModel::from_parts(
        dim,
        norm,
        entity_data,
        relation_data,
        word_data,
        triplet_bias,
        mention_bias,
        triplet_offset,
        mention_offset,
    );
    let vocab = Vocabulary::from_parts(
        entities,
        relations,
        words,
        head_occurrence,
        tail_occurrence,
        relation_universe,
    );
    check_counts(&model, &vocab)?;
    Ok((model, vocab))
}

fn check_counts(model: &EmbeddingModel, vocab: &Vocabulary) -> Result<()> {
    let pairs = [
        ("entities", model.entity_count(), vocab.entity_count()),
        ("relations", model.relation_count(), vocab.relation_count()),
        ("words", model.word_count(), vocab.word_count()),
    ];
    for (what, model_count, vocab_count) in pairs {
        if model_count != vocab_count {
            return Err(Error::VocabMismatch {
                what,
                model: model_count,
                vocab: vocab_count,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use tempfile::tempdir;

    use super::*;
    use crate::data::{load_weighted_beliefs, Vocabulary};
    use crate::model::ModelConfig;

    fn toy() -> (EmbeddingModel, Vocabulary) {
        let dir = tempdir().unwrap();
        let path = dir.path().join("beliefs.tsv");
        std::fs::write(
            &path,
            "a\tr0\tb\tsome mention words\t0.8\nb\tr1\tc\tother words\t0.5\n",
        )
        .unwrap();
        let mut vocab = Vocabulary::new();
        load_weighted_beliefs(&path, &mut vocab).unwrap();
        vocab.freeze();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let config = ModelConfig {
            dim: 6,
            ..ModelConfig::default()
        };
        let model = EmbeddingModel::init_for_vocab(&vocab, &config, &mut rng);
        (model, vocab)
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let (model, vocab) = toy();
        let dir = tempdir().unwrap();
        let path = dir.path().join("model.bin");
        save_model(&model, &vocab, &path).unwrap();
        let (loaded, loaded_vocab) = load_model(&path).unwrap();

        assert_eq!(loaded.parameter_checksum(), model.parameter_checksum());
        assert_eq!(loaded.dim(), model.dim());
        assert_eq!(loaded.norm(), model.norm());
        assert!(loaded_vocab.is_frozen());
        assert_eq!(loaded_vocab.entity_count(), vocab.entity_count());
        assert_eq!(loaded_vocab.word_count(), vocab.word_count());
        assert_eq!(loaded_vocab.head_entities(), vocab.head_entities());
        assert_eq!(loaded_vocab.tail_entities(), vocab.tail_entities());
        assert_eq!(loaded_vocab.relation_universe(), vocab.relation_universe());
        assert_eq!(
            loaded_vocab.entity_id("a"),
            vocab.entity_id("a"),
        );

        // saving again reproduces the same bytes
        let path2 = dir.path().join("model2.bin");
        save_model(&loaded, &loaded_vocab, &path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn bad_version_is_rejected() {
        let (model, vocab) = toy();
        let dir = tempdir().unwrap();
        let path = dir.path().join("model.bin");
        save_model(&model, &vocab, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = 99;
        std::fs::write(&path, bytes).unwrap();
        assert!(matches!(
            load_model(&path),
            Err(Error::ModelFormat { .. })
        ));
    }

    #[test]
    fn truncated_file_is_rejected() {
        let (model, vocab) = toy();
        let dir = tempdir().unwrap();
        let path = dir.path().join("model.bin");
        save_model(&model, &vocab, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        assert!(matches!(
            load_model(&path),
            Err(Error::ModelFormat { .. })
        ));
    }

    #[test]
    fn count_mismatch_is_rejected_on_save() {
        let (model, _) = toy();
        let other = Vocabulary::new();
        let dir = tempdir().unwrap();
        let err = save_model(&model, &other, dir.path().join("m.bin")).unwrap_err();
        assert!(matches!(err, Error::VocabMismatch { .. }));
    }
}
