//! Triviality, equality and element orders.
//!
//! A word with nonzero root permutation is nontrivial; otherwise it is
//! trivial iff all its first-level sections are. The total length of a
//! section is at most `(total_length + 1) / 2`, so the recursion bottoms out
//! at words of total length at most one.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::group::GgsGroup;
use crate::word::Word;

/// Default recursion cap for [`order`].
pub const DEFAULT_DEPTH_CAP: usize = 64;

/// Word-problem solver with a memo table confined to one task.
#[derive(Debug)]
pub struct WordProblem<'g> {
    group: &'g GgsGroup,
    trivial: HashMap<Word, bool>,
}

impl<'g> WordProblem<'g> {
    pub fn new(group: &'g GgsGroup) -> Self {
        WordProblem {
            group,
            trivial: HashMap::new(),
        }
    }

    pub fn group(&self) -> &GgsGroup {
        self.group
    }

    pub fn is_trivial(&mut self, g: &Word) -> bool {
        if g.is_identity() {
            return true;
        }
        if self.group.root_permutation(g) != 0 || g.total_length() <= 1 {
            return false;
        }
        if let Some(&known) = self.trivial.get(g) {
            return known;
        }
        let verdict =
            (1..=self.group.p()).all(|u| self.is_trivial(&self.group.first_level_section(g, u)));
        self.trivial.insert(g.clone(), verdict);
        verdict
    }

    pub fn equal(&mut self, g: &Word, h: &Word) -> bool {
        g == h || self.is_trivial(&(g * &h.inverse()))
    }
}

pub fn is_trivial(group: &GgsGroup, g: &Word) -> bool {
    WordProblem::new(group).is_trivial(g)
}

pub fn equal(group: &GgsGroup, g: &Word, h: &Word) -> bool {
    WordProblem::new(group).equal(g, h)
}

/// Order of `g` as a power of `p`, with the default depth cap.
pub fn order(group: &GgsGroup, g: &Word) -> Result<BigUint> {
    order_with_cap(group, g, DEFAULT_DEPTH_CAP)
}

pub fn order_with_cap(group: &GgsGroup, g: &Word, cap: usize) -> Result<BigUint> {
    let k = order_exponent(group, g, cap)?;
    Ok(BigUint::from(group.p()).pow(k))
}

/// `k` with `|g| = p^k`.
///
/// Scheme: trivial words have order 1; a stabilizing word of b-length at most
/// one is a conjugate of some `b^j` and has order `p`; other stabilizing words
/// have the largest order among their sections; a non-stabilizing `g`
/// satisfies `|g| = p |g^p|` with `g^p` stabilizing. A word revisited on the
/// current recursion path proves infinite order.
pub fn order_exponent(group: &GgsGroup, g: &Word, cap: usize) -> Result<u32> {
    let mut search = OrderSearch {
        solver: WordProblem::new(group),
        memo: HashMap::new(),
        path: HashSet::new(),
        cap,
    };
    search.exponent(g, 0)
}

struct OrderSearch<'g> {
    solver: WordProblem<'g>,
    memo: HashMap<Word, u32>,
    path: HashSet<Word>,
    cap: usize,
}

impl OrderSearch<'_> {
    fn exponent(&mut self, g: &Word, depth: usize) -> Result<u32> {
        if let Some(&k) = self.memo.get(g) {
            return Ok(k);
        }
        if self.solver.is_trivial(g) {
            return Ok(0);
        }
        if depth >= self.cap {
            return Err(Error::DepthCapExceeded { cap: self.cap });
        }
        if !self.path.insert(g.clone()) {
            return Err(Error::InfiniteOrder {
                witness: g.to_string(),
            });
        }
        let group = self.solver.group().clone();
        let result = if group.root_permutation(g) != 0 {
            let power = g.pow(group.p() as i64);
            self.exponent(&power, depth + 1).map(|k| k + 1)
        } else if g.b_length() <= 1 {
            Ok(1)
        } else {
            let mut best = 0;
            for section in group.first_level_sections(g) {
                best = best.max(self.exponent(&section, depth + 1)?);
            }
            Ok(best)
        };
        self.path.remove(g);
        let k = result?;
        self.memo.insert(g.clone(), k);
        Ok(k)
    }
}
