//! Symbol interning and positional occurrence indexes.

use std::collections::{HashMap, HashSet};

use super::ids::{EntityId, RelationId, WordId};

/// Bidirectional symbol <-> dense-id map for one namespace.
#[derive(Debug, Clone, Default)]
struct SymbolTable {
    symbols: Vec<String>,
    index: HashMap<String, u32>,
}

impl SymbolTable {
    fn lookup(&self, symbol: &str) -> Option<u32> {
        self.index.get(symbol).copied()
    }

    fn intern(&mut self, symbol: &str) -> u32 {
        if let Some(id) = self.index.get(symbol) {
            return *id;
        }
        let id = self.symbols.len() as u32;
        self.symbols.push(symbol.to_owned());
        self.index.insert(symbol.to_owned(), id);
        id
    }

    fn len(&self) -> usize {
        self.symbols.len()
    }

    fn symbol(&self, id: u32) -> &str {
        &self.symbols[id as usize]
    }
}

/// Set of ids kept in first-seen order, with O(1) membership.
#[derive(Debug, Clone, Default)]
struct IdSet {
    members: Vec<u32>,
    present: HashSet<u32>,
}

impl IdSet {
    fn insert(&mut self, id: u32) {
        if self.present.insert(id) {
            self.members.push(id);
        }
    }

    fn contains(&self, id: u32) -> bool {
        self.present.contains(&id)
    }

    fn as_slice(&self) -> &[u32] {
        &self.members
    }

    fn len(&self) -> usize {
        self.members.len()
    }
}

/// Symbol tables for entities, relations and mention words, plus the
/// positional occurrence indexes used to constrain negative sampling and to
/// form softmax candidate pools.
///
/// Ids are dense, contiguous from 0, assigned in first-seen order, and the
/// three namespaces are disjoint. A vocabulary starts growable; [`freeze`]
/// makes every later lookup of an unknown symbol an error, and a frozen
/// vocabulary is immutable and safe to share across threads.
///
/// [`freeze`]: Vocabulary::freeze
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    entities: SymbolTable,
    relations: SymbolTable,
    words: SymbolTable,
    head_occurrence: IdSet,
    tail_occurrence: IdSet,
    relation_universe: IdSet,
    frozen: bool,
}

impl Vocabulary {
    /// A fresh, growable vocabulary.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn entity_id(&self, symbol: &str) -> Option<EntityId> {
        self.entities.lookup(symbol).map(EntityId)
    }

    pub fn relation_id(&self, symbol: &str) -> Option<RelationId> {
        self.relations.lookup(symbol).map(RelationId)
    }

    pub fn word_id(&self, symbol: &str) -> Option<WordId> {
        self.words.lookup(symbol).map(WordId)
    }

    pub fn entity_symbol(&self, id: EntityId) -> &str {
        self.entities.symbol(id.0)
    }

    pub fn relation_symbol(&self, id: RelationId) -> &str {
        self.relations.symbol(id.0)
    }

    pub fn word_symbol(&self, id: WordId) -> &str {
        self.words.symbol(id.0)
    }

    /// Interns an entity symbol; `None` if the vocabulary is frozen and the
    /// symbol is unknown.
    pub fn intern_entity(&mut self, symbol: &str) -> Option<EntityId> {
        if self.frozen {
            self.entity_id(symbol)
        } else {
            Some(EntityId(self.entities.intern(symbol)))
        }
    }

    pub fn intern_relation(&mut self, symbol: &str) -> Option<RelationId> {
        if self.frozen {
            self.relation_id(symbol)
        } else {
            Some(RelationId(self.relations.intern(symbol)))
        }
    }

    pub fn intern_word(&mut self, symbol: &str) -> Option<WordId> {
        if self.frozen {
            self.word_id(symbol)
        } else {
            Some(WordId(self.words.intern(symbol)))
        }
    }

    /// Records the positional occurrences of one belief: `head` into the
    /// head-occurrence set, `tail` into the tail-occurrence set, `relation`
    /// into the relation universe. No-op on a frozen vocabulary, so loading
    /// evaluation splits never widens the training-time candidate pools.
    pub fn note_belief(&mut self, head: EntityId, relation: RelationId, tail: EntityId) {
        if self.frozen {
            return;
        }
        self.head_occurrence.insert(head.0);
        self.tail_occurrence.insert(tail.0);
        self.relation_universe.insert(relation.0);
    }

    /// Entities ever observed in head position, first-seen order.
    pub fn head_entities(&self) -> &[EntityId] {
        cast_entity_slice(self.head_occurrence.as_slice())
    }

    /// Entities ever observed in tail position, first-seen order.
    pub fn tail_entities(&self) -> &[EntityId] {
        cast_entity_slice(self.tail_occurrence.as_slice())
    }

    /// Relations observed in beliefs, first-seen order.
    pub fn relation_universe(&self) -> &[RelationId] {
        cast_relation_slice(self.relation_universe.as_slice())
    }

    pub fn is_head_entity(&self, id: EntityId) -> bool {
        self.head_occurrence.contains(id.0)
    }

    pub fn is_tail_entity(&self, id: EntityId) -> bool {
        self.tail_occurrence.contains(id.0)
    }

    pub fn head_entity_count(&self) -> usize {
        self.head_occurrence.len()
    }

    pub fn tail_entity_count(&self) -> usize {
        self.tail_occurrence.len()
    }

    /// All entity ids, id order.
    pub fn entity_ids(&self) -> impl Iterator<Item = EntityId> + '_ {
        (0..self.entities.len() as u32).map(EntityId)
    }

    /// Entity symbols starting with `prefix`, id order. Used for
    /// near-miss suggestions on unknown query symbols.
    pub fn entities_with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a str> {
        self.entities
            .symbols
            .iter()
            .map(String::as_str)
            .filter(move |s| s.starts_with(prefix))
    }

    pub fn relations_with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a str> {
        self.relations
            .symbols
            .iter()
            .map(String::as_str)
            .filter(move |s| s.starts_with(prefix))
    }

    pub(crate) fn entity_symbols(&self) -> &[String] {
        &self.entities.symbols
    }

    pub(crate) fn relation_symbols(&self) -> &[String] {
        &self.relations.symbols
    }

    pub(crate) fn word_symbols(&self) -> &[String] {
        &self.words.symbols
    }

    /// Rebuilds a vocabulary from serialized parts. Occurrence ids must fall
    /// inside the symbol tables; the result is frozen.
    pub(crate) fn from_parts(
        entities: Vec<String>,
        relations: Vec<String>,
        words: Vec<String>,
        head_occurrence: Vec<u32>,
        tail_occurrence: Vec<u32>,
        relation_universe: Vec<u32>,
    ) -> Self {
        fn table(symbols: Vec<String>) -> SymbolTable {
            let index = symbols
                .iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), i as u32))
                .collect();
            SymbolTable { symbols, index }
        }
        fn id_set(members: Vec<u32>) -> IdSet {
            let present = members.iter().copied().collect();
            IdSet { members, present }
        }
        Vocabulary {
            entities: table(entities),
            relations: table(relations),
            words: table(words),
            head_occurrence: id_set(head_occurrence),
            tail_occurrence: id_set(tail_occurrence),
            relation_universe: id_set(relation_universe),
            frozen: true,
        }
    }
}

fn cast_entity_slice(raw: &[u32]) -> &[EntityId] {
    // EntityId is repr-compatible with u32 (single-field tuple struct).
    unsafe { std::slice::from_raw_parts(raw.as_ptr() as *const EntityId, raw.len()) }
}

fn cast_relation_slice(raw: &[u32]) -> &[RelationId] {
    unsafe { std::slice::from_raw_parts(raw.as_ptr() as *const RelationId, raw.len()) }
}
