//! GF(2) relations on nets of even order.

pub mod classify;
pub mod error;
pub mod gf2;
pub mod netcore;
pub mod perm;
pub mod pointset;
pub mod search;
pub mod templates;
pub mod typecounts;

pub use error::{Error, Result};
pub use pointset::PointSet;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/point-types.md")]
    struct PointTypes;
    #[doc = include_str!("../../../book/src/relations.md")]
    struct Relations;
    #[doc = include_str!("../../../book/src/templates.md")]
    struct Templates;
    #[doc = include_str!("../../../book/src/search.md")]
    struct Search;
    #[doc = include_str!("../../../book/src/classify.md")]
    struct Classify;
}
