//! Command-line surface for belief-embedding training, evaluation and
//! ad-hoc knowledge-completion queries.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical abort.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kbembed::{
    entity_inference_eval, load_beliefs, load_model, relation_prediction_eval, relation_scores,
    save_model, search_thresholds, tokenize_mention, train, triplet_classification_eval,
    CandidateSets, EmbeddingModel, EvalReport, FileFormat, Mention, ModelConfig, Norm, Objective,
    TrainConfig, TripletSet, Vocabulary,
};

#[derive(Parser)]
#[command(
    name = "kbembed",
    about = "Joint entity/relation/mention-word embeddings for knowledge completion",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a vocabulary from a belief dump, train embeddings, save the model
    Train(TrainArgs),
    /// Rank candidate entities for each test belief and report mean rank / hit@10
    EvalEntity(EvalEntityArgs),
    /// Rank candidate relations for each test belief and report avg rank / hit@10 / hit@1
    EvalRelation(EvalRelationArgs),
    /// Fit per-relation thresholds on validation and report test accuracy
    EvalClassify(EvalClassifyArgs),
    /// Complete a partial belief: `h r ?`, `? r t`, or `h ? t [mention words]`
    Complete(CompleteArgs),
    /// Print the header and vocabulary statistics of a model file
    Info(InfoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliFormat {
    Triplet,
    Weighted,
}

impl CliFormat {
    fn file_format(self) -> FileFormat {
        match self {
            CliFormat::Triplet => FileFormat::Triplet,
            CliFormat::Weighted => FileFormat::Weighted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliObjective {
    Maxlik,
    Confidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliNorm {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FilterSplits {
    Train,
    #[value(name = "train+valid+test")]
    TrainValidTest,
}

#[derive(Args)]
struct TrainArgs {
    /// Training belief file
    #[arg(long = "train", value_name = "PATH")]
    train_path: PathBuf,
    /// Output model file
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Optional key-value config file; flags win over file entries
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<CliFormat>,
    /// Embedding dimension
    #[arg(long)]
    dim: Option<usize>,
    /// Negatives sampled per positive
    #[arg(short = 'k', long = "k")]
    negatives: Option<usize>,
    /// Learning rate
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long, value_enum)]
    objective: Option<CliObjective>,
    #[arg(long, value_enum)]
    norm: Option<CliNorm>,
    /// Root seed; initialization, shuffling and sampling all derive from it
    #[arg(long)]
    seed: Option<u64>,
    /// Training workers; 0 is sequential and deterministic
    #[arg(long)]
    workers: Option<usize>,
    /// Write a two-column epoch/loss trace here
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct EvalEntityArgs {
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Test split to rank
    #[arg(long = "test", value_name = "PATH")]
    test_path: PathBuf,
    /// Training split; always part of the filter pool
    #[arg(long = "train", value_name = "PATH")]
    train_path: PathBuf,
    /// Validation split; needed when the filter pool is widened
    #[arg(long = "valid", value_name = "PATH")]
    valid_path: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<CliFormat>,
    /// Which known-triplet sets the filtered metrics delete
    #[arg(long = "filter-splits", value_enum)]
    filter_splits: Option<FilterSplits>,
    #[arg(long)]
    workers: Option<usize>,
    /// Write the machine-readable key-value report here
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EvalRelationArgs {
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    #[arg(long = "test", value_name = "PATH")]
    test_path: PathBuf,
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<CliFormat>,
    /// Ignore mentions even when the test split has them
    #[arg(long)]
    suppress_mentions: bool,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EvalClassifyArgs {
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Labeled validation split the thresholds are fitted on
    #[arg(long = "valid", value_name = "PATH")]
    valid_path: PathBuf,
    /// Labeled test split
    #[arg(long = "test", value_name = "PATH")]
    test_path: PathBuf,
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Base line format; a trailing 1/0 label field is expected on top
    #[arg(long, value_enum)]
    format: Option<CliFormat>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CompleteArgs {
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Candidates to print
    #[arg(long)]
    topn: Option<usize>,
    /// Query: head, relation, tail with exactly one `?`, then optional
    /// mention words (only for relation queries)
    #[arg(value_name = "QUERY", num_args = 3.., required = true)]
    query: Vec<String>,
}

#[derive(Args)]
struct InfoArgs {
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
}

enum CliError {
    Usage(String),
    Lib(kbembed::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Lib(kbembed::Error::NumericalAbort { .. }) => 3,
            CliError::Lib(_) => 2,
        }
    }
}

impl From<kbembed::Error> for CliError {
    fn from(e: kbembed::Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let benign = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return if benign {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::EvalEntity(args) => cmd_eval_entity(args),
        Command::EvalRelation(args) => cmd_eval_relation(args),
        Command::EvalClassify(args) => cmd_eval_classify(args),
        Command::Complete(args) => cmd_complete(args),
        Command::Info(args) => cmd_info(args),
    }
}

/// Key-value config file: one `key value` or `key=value` per line, `#`
/// comments. Flags win over file entries.
struct FileConfig(HashMap<String, String>);

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {path:?}: {e}")))?;
            for (idx, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .or_else(|| line.split_once(char::is_whitespace))
                    .ok_or_else(|| {
                        CliError::Usage(format!(
                            "config {path:?} line {}: expected `key value`",
                            idx + 1
                        ))
                    })?;
                map.insert(key.trim().to_owned(), value.trim().to_owned());
            }
        }
        Ok(FileConfig(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|e| {
                CliError::Usage(format!("config key '{key}': bad value '{raw}': {e}"))
            }),
        }
    }

    fn get_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => T::from_str(raw, true).map(Some).map_err(|e| {
                CliError::Usage(format!("config key '{key}': bad value '{raw}': {e}"))
            }),
        }
    }
}

fn echo_config(entries: &[(&str, String)]) {
    for (key, value) in entries {
        eprintln!("config {key} {value}");
    }
}

fn configure_rayon(workers: usize) {
    let threads = if workers == 0 { 1 } else { workers };
    // fails harmlessly if a pool was already built
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let format = args
        .format
        .or(file.get_enum("format")?)
        .unwrap_or(CliFormat::Triplet);
    let dim = args.dim.or(file.get("dim")?).unwrap_or(50);
    let negatives = args.negatives.or(file.get("k")?).unwrap_or(5);
    let lr = args.lr.or(file.get("lr")?).unwrap_or(0.01);
    let epochs = args.epochs.or(file.get("epochs")?).unwrap_or(500);
    let objective = args
        .objective
        .or(file.get_enum("objective")?)
        .unwrap_or(CliObjective::Maxlik);
    let norm = args.norm.or(file.get_enum("norm")?).unwrap_or(CliNorm::L1);
    let seed = args.seed.or(file.get("seed")?).unwrap_or(42);
    let workers = args.workers.or(file.get("workers")?).unwrap_or(0);

    echo_config(&[
        ("command", "train".into()),
        ("train", display_path(&args.train_path)),
        ("model", display_path(&args.model)),
        ("format", format!("{format:?}").to_lowercase()),
        ("dim", dim.to_string()),
        ("k", negatives.to_string()),
        ("lr", lr.to_string()),
        ("epochs", epochs.to_string()),
        ("objective", format!("{objective:?}").to_lowercase()),
        ("norm", format!("{norm:?}").to_lowercase()),
        ("seed", seed.to_string()),
        ("workers", workers.to_string()),
    ]);

    let mut vocab = Vocabulary::new();
    let train_set = load_beliefs(&args.train_path, &mut vocab, format.file_format())?;
    vocab.freeze();

    let model_config = ModelConfig {
        dim,
        init_scale: 6.0,
        norm: match norm {
            CliNorm::L1 => Norm::L1,
            CliNorm::L2 => Norm::L2,
        },
    };
    let mut init_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = EmbeddingModel::init_for_vocab(&vocab, &model_config, &mut init_rng);

    let train_config = TrainConfig {
        objective: match objective {
            CliObjective::Maxlik => Objective::MaxLikelihood,
            CliObjective::Confidence => Objective::ConfidenceRegression,
        },
        negative_samples: negatives,
        learning_rate: lr,
        epochs,
        seed,
        shuffle: true,
        parallel_workers: workers,
        progress: true,
    };
    let trace = train(&mut model, &train_set, &vocab, &train_config)?;
    save_model(&model, &vocab, &args.model)?;

    if let Some(trace_path) = &args.trace {
        trace.write_tsv(trace_path)?;
    }
    match trace.losses().last() {
        Some(loss) => println!("final epoch loss {loss}"),
        None => println!("no epochs trained"),
    }
    Ok(())
}

/// Loads an evaluation split against the model's frozen vocabulary.
fn load_split(
    path: &Path,
    vocab: &Vocabulary,
    format: FileFormat,
) -> Result<kbembed::BeliefSet, CliError> {
    let mut frozen = vocab.clone();
    Ok(load_beliefs(path, &mut frozen, format)?)
}

fn write_report(report: &EvalReport, path: Option<&Path>) -> Result<(), CliError> {
    print!("{}", report.render_table());
    if let Some(path) = path {
        std::fs::write(path, report.render_key_values())
            .map_err(|e| CliError::Lib(kbembed::Error::Io {
                path: path.to_owned(),
                source: e,
            }))?;
    }
    Ok(())
}

fn cmd_eval_entity(args: EvalEntityArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let format = args
        .format
        .or(file.get_enum("format")?)
        .unwrap_or(CliFormat::Triplet);
    let filter_splits = args
        .filter_splits
        .or(file.get_enum("filter-splits")?)
        .unwrap_or(FilterSplits::Train);
    let workers = args.workers.or(file.get("workers")?).unwrap_or(0);
    if filter_splits == FilterSplits::TrainValidTest && args.valid_path.is_none() {
        return Err(CliError::Usage(
            "--filter-splits train+valid+test needs --valid".into(),
        ));
    }

    echo_config(&[
        ("command", "eval-entity".into()),
        ("model", display_path(&args.model)),
        ("test", display_path(&args.test_path)),
        ("train", display_path(&args.train_path)),
        (
            "valid",
            args.valid_path
                .as_deref()
                .map(display_path)
                .unwrap_or_else(|| "-".into()),
        ),
        ("format", format!("{format:?}").to_lowercase()),
        (
            "filter-splits",
            match filter_splits {
                FilterSplits::Train => "train".into(),
                FilterSplits::TrainValidTest => "train+valid+test".into(),
            },
        ),
        ("workers", workers.to_string()),
    ]);
    configure_rayon(workers);

    let (model, vocab) = load_model(&args.model)?;
    let train_set = load_split(&args.train_path, &vocab, format.file_format())?;
    let test_set = load_split(&args.test_path, &vocab, format.file_format())?;

    let mut known: TripletSet = train_set.known_triplets().clone();
    if filter_splits == FilterSplits::TrainValidTest {
        let valid_set = load_split(
            args.valid_path.as_ref().unwrap(),
            &vocab,
            format.file_format(),
        )?;
        known.extend_from(valid_set.known_triplets());
        known.extend_from(test_set.known_triplets());
    }

    let report = entity_inference_eval(&model, &test_set, &vocab, &known)?;
    write_report(&EvalReport::Entity(report), args.report.as_deref())
}

fn cmd_eval_relation(args: EvalRelationArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let format = args
        .format
        .or(file.get_enum("format")?)
        .unwrap_or(CliFormat::Triplet);
    let workers = args.workers.or(file.get("workers")?).unwrap_or(0);

    echo_config(&[
        ("command", "eval-relation".into()),
        ("model", display_path(&args.model)),
        ("test", display_path(&args.test_path)),
        ("format", format!("{format:?}").to_lowercase()),
        ("suppress-mentions", args.suppress_mentions.to_string()),
        ("workers", workers.to_string()),
    ]);
    configure_rayon(workers);

    let (model, vocab) = load_model(&args.model)?;
    let test_set = load_split(&args.test_path, &vocab, format.file_format())?;
    let report = relation_prediction_eval(&model, &test_set, &vocab, !args.suppress_mentions)?;
    write_report(&EvalReport::Relation(report), args.report.as_deref())
}

fn cmd_eval_classify(args: EvalClassifyArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let format = args
        .format
        .or(file.get_enum("format")?)
        .unwrap_or(CliFormat::Triplet);
    let workers = args.workers.or(file.get("workers")?).unwrap_or(0);

    echo_config(&[
        ("command", "eval-classify".into()),
        ("model", display_path(&args.model)),
        ("valid", display_path(&args.valid_path)),
        ("test", display_path(&args.test_path)),
        ("format", format!("{format:?}").to_lowercase()),
        ("workers", workers.to_string()),
    ]);
    configure_rayon(workers);

    let (model, vocab) = load_model(&args.model)?;
    let labeled = format.file_format().with_label();
    let valid_set = load_split(&args.valid_path, &vocab, labeled)?;
    let test_set = load_split(&args.test_path, &vocab, labeled)?;

    let sets = CandidateSets::from_vocab(&vocab);
    let thresholds = search_thresholds(&model, &valid_set, &sets)?;
    let report = triplet_classification_eval(&model, &thresholds, &test_set, &sets)?;
    write_report(&EvalReport::Classification(report), args.report.as_deref())
}

/// Which slot of the query is the unknown.
enum Query {
    Tail,
    Head,
    Relation { mention_words: Vec<String> },
}

fn parse_query(terms: &[String]) -> Result<(Query, &str, &str), CliError> {
    let (head, relation, tail) = (&terms[0], &terms[1], &terms[2]);
    let mention_words = terms[3..].to_vec();
    let unknowns = [head, relation, tail]
        .iter()
        .filter(|t| t.as_str() == "?")
        .count();
    if unknowns != 1 {
        return Err(CliError::Usage(
            "query must contain exactly one `?` among head, relation, tail".into(),
        ));
    }
    if !mention_words.is_empty() && relation != "?" {
        return Err(CliError::Usage(
            "mention words are only meaningful when the relation is `?`".into(),
        ));
    }
    if tail == "?" {
        Ok((Query::Tail, head, relation))
    } else if head == "?" {
        Ok((Query::Head, relation, tail))
    } else {
        Ok((Query::Relation { mention_words }, head, tail))
    }
}

fn resolve_entity(vocab: &Vocabulary, symbol: &str) -> Result<kbembed::EntityId, CliError> {
    vocab.entity_id(symbol).ok_or_else(|| {
        CliError::Lib(unknown_symbol_error(
            "entity",
            symbol,
            vocab.entities_with_prefix(symbol),
        ))
    })
}

fn resolve_relation(vocab: &Vocabulary, symbol: &str) -> Result<kbembed::RelationId, CliError> {
    vocab.relation_id(symbol).ok_or_else(|| {
        CliError::Lib(unknown_symbol_error(
            "relation",
            symbol,
            vocab.relations_with_prefix(symbol),
        ))
    })
}

fn unknown_symbol_error<'a>(
    namespace: &str,
    symbol: &str,
    prefix_matches: impl Iterator<Item = &'a str>,
) -> kbembed::Error {
    let nearest: Vec<&str> = prefix_matches.take(10).collect();
    let hint = if nearest.is_empty() {
        "no known symbols share this prefix".to_owned()
    } else {
        format!("nearest by prefix: {}", nearest.join(", "))
    };
    kbembed::Error::Protocol(format!("unknown {namespace} symbol '{symbol}'; {hint}"))
}

fn cmd_complete(args: CompleteArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let topn = args.topn.or(file.get("topn")?).unwrap_or(10);
    let (model, vocab) = load_model(&args.model)?;
    let (query, first, second) = parse_query(&args.query)?;

    echo_config(&[
        ("command", "complete".into()),
        ("model", display_path(&args.model)),
        ("query", args.query.join(" ")),
        ("topn", topn.to_string()),
    ]);

    // (symbol, log-probability) rows, already sorted best first
    let rows: Vec<(String, f64)> = match query {
        Query::Tail => {
            let head = resolve_entity(&vocab, first)?;
            let relation = resolve_relation(&vocab, second)?;
            let candidates = vocab.tail_entities();
            let probs = model.prob_tail(head, relation, candidates)?;
            sorted_entity_rows(&vocab, candidates, probs)
        }
        Query::Head => {
            let relation = resolve_relation(&vocab, first)?;
            let tail = resolve_entity(&vocab, second)?;
            let candidates = vocab.head_entities();
            let probs = model.prob_head(relation, tail, candidates)?;
            sorted_entity_rows(&vocab, candidates, probs)
        }
        Query::Relation { mention_words } => {
            let head = resolve_entity(&vocab, first)?;
            let tail = resolve_entity(&vocab, second)?;
            let mention = parse_mention(&vocab, &mention_words);
            let scored = relation_scores(
                &model,
                head,
                tail,
                mention.as_ref(),
                vocab.relation_universe(),
            )?;
            scored
                .into_iter()
                .map(|(r, lp)| (vocab.relation_symbol(r).to_owned(), lp))
                .collect()
        }
    };

    for (symbol, log_prob) in rows.iter().take(topn) {
        println!("{symbol}\t{log_prob}");
    }
    Ok(())
}

fn parse_mention(vocab: &Vocabulary, words: &[String]) -> Option<Mention> {
    if words.is_empty() {
        return None;
    }
    // the model vocabulary is frozen; unseen words drop out
    let mut frozen = vocab.clone();
    let mention = tokenize_mention(&words.join(" "), &mut frozen);
    (!mention.is_empty()).then_some(mention)
}

fn sorted_entity_rows(
    vocab: &Vocabulary,
    candidates: &[kbembed::EntityId],
    probs: Vec<f64>,
) -> Vec<(String, f64)> {
    let mut rows: Vec<(kbembed::EntityId, f64)> =
        candidates.iter().copied().zip(probs).collect();
    rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    rows.into_iter()
        .map(|(id, p)| (vocab.entity_symbol(id).to_owned(), p.ln()))
        .collect()
}

fn cmd_info(args: InfoArgs) -> Result<(), CliError> {
    let (model, vocab) = load_model(&args.model)?;
    println!("model {}", display_path(&args.model));
    println!("dim {}", model.dim());
    println!(
        "norm {}",
        match model.norm() {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
        }
    );
    println!("entities {}", vocab.entity_count());
    println!("relations {}", vocab.relation_count());
    println!("words {}", vocab.word_count());
    println!("head_entities {}", vocab.head_entity_count());
    println!("tail_entities {}", vocab.tail_entity_count());
    println!("relation_universe {}", vocab.relation_universe().len());
    println!("triplet_bias {}", model.triplet_bias());
    println!("mention_bias {}", model.mention_bias());
    println!("triplet_offset {}", model.triplet_offset());
    println!("mention_offset {}", model.mention_offset());
    Ok(())
}

fn display_path(path: &Path) -> String {
    path.display().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(CliError::Usage("bad".into()).exit_code(), 1);
        assert_eq!(
            CliError::Lib(kbembed::Error::Protocol("oops".into())).exit_code(),
            2
        );
        assert_eq!(
            CliError::Lib(kbembed::Error::NumericalAbort {
                epoch: 3,
                belief_index: 7
            })
            .exit_code(),
            3
        );
    }

    #[test]
    fn query_shapes_parse() {
        let terms = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert!(matches!(
            parse_query(&terms(&["h", "r", "?"])),
            Ok((Query::Tail, _, _))
        ));
        assert!(matches!(
            parse_query(&terms(&["?", "r", "t"])),
            Ok((Query::Head, _, _))
        ));
        match parse_query(&terms(&["h", "?", "t", "some", "words"])) {
            Ok((Query::Relation { mention_words }, h, t)) => {
                assert_eq!(mention_words, vec!["some", "words"]);
                assert_eq!((h, t), ("h", "t"));
            }
            _ => panic!("relation query did not parse"),
        }
        assert!(parse_query(&terms(&["?", "r", "?"])).is_err());
        assert!(parse_query(&terms(&["h", "r", "t"])).is_err());
        assert!(parse_query(&terms(&["h", "r", "?", "word"])).is_err());
    }
}
