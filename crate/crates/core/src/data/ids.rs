//! Dense ids for the three symbol namespaces.
//!
//! Entities, relations and mention words live in disjoint id spaces, each
//! dense and starting at 0 in first-seen order over the training file. The
//! newtypes keep the spaces from being mixed up at compile time.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct EntityId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct RelationId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct WordId(pub u32);

impl EntityId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl RelationId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl WordId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}
