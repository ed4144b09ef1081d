//! Block graphs: a compressed, queryable representation of repetitive
//! strings. Blocks whose content already occurred earlier are replaced by
//! pointers into marked blocks, giving space proportional to the LZ77 phrase
//! count with access, extract, rank, select and (for parentheses) excess
//! range-minimum and LCA queries.

pub mod bench;
pub mod builder;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod excess;
pub mod format;
pub mod graph;
pub mod kr;
pub mod lz;
pub mod query;

pub use builder::{build, mark_level, resolve_back_pointer, verify, LevelMarks, Span};
pub use error::{Error, Result};
pub use excess::{BpString, NodeHandle};
pub use format::{deserialize, serialize, stats, SpaceStats};
pub use graph::{
    BackPointer, Block, BlockGraph, BlockKind, BuildConfig, ExcessAugment, GraphParams, MinAt, SplitExcess,
};
pub use kr::KarpRabinHasher;
pub use lz::{Lz77Parse, Lz77Phrase};
pub use query::QueryCursor;
