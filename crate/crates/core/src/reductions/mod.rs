//! Constructive reductions between the problems handled by this crate, each
//! checked against the brute-force oracles in `graph` and `machines`.

mod book;
mod spl;
mod tree;
mod uoptl;

pub use book::{
    edge_order, normalize_st, three_page_embed, three_page_reach_instance, validate_book_embedding,
    BookEmbedding, BookViolation, EdgeOrder, NormalizedInstance, ThreePageResult,
};
pub use spl::{transducer_to_shortest_path, LayeredVertex, SplInstance, TransducerParams};
pub use tree::{bfs_tree_weights, shortest_path_length};
pub use uoptl::{logfew_to_uoptl, logfew_to_uoptl_literal, UoptlInstance};
