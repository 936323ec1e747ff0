//! Computations in GGS groups acting on the `p`-regular rooted tree.

pub mod certificate;
pub mod error;
pub mod group;
pub mod harness;
pub mod perm;
pub mod quotient;
pub mod reduction;
pub mod subgroup;
pub mod tree;
pub mod word;
pub mod word_problem;

pub use error::{Error, Result};
pub use group::GgsGroup;
pub use tree::{is_transversal, Transversal, Vertex};
pub use word::{Generator, Syllable, Word};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/words-and-trees.md")]
    mod words_and_trees {}
    #[doc = include_str!("../../../book/src/ggs-groups.md")]
    mod ggs_groups {}
    #[doc = include_str!("../../../book/src/word-problem.md")]
    mod word_problem {}
    #[doc = include_str!("../../../book/src/quotients.md")]
    mod quotients {}
    #[doc = include_str!("../../../book/src/subgroups.md")]
    mod subgroups {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    mod reduction {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
