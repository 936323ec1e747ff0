//! Congruence quotients `G / Stab_G(L_n)` as permutation groups.
//!
//! The generator permutations are built straight from the wreath recursion
//! `a = (1 2 .. p)`, `b = (a^{e_0}, .., a^{e_{p-2}}, b)`, without going
//! through [`GgsGroup::section`]; this is what makes the quotients usable as an
//! oracle for the word problem.
//!
//! Leaves of level `n` are indexed in base `p`, first letter most significant:
//! the vertex `v_1 .. v_n` has index `sum (v_i - 1) p^(n-i)`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::GgsGroup;
use crate::perm::{PermGroup, Permutation};
use crate::tree::Vertex;
use crate::word::{Generator, Word};

/// Default bound on the number of points of a quotient (`5^5`).
pub const DEFAULT_MAX_POINTS: u64 = 3125;

/// The action of one element on the leaves of level `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LevelPermutation {
    pub level: usize,
    pub perm: Permutation,
}

impl LevelPermutation {
    pub fn is_identity(&self) -> bool {
        self.perm.is_identity()
    }
}

fn points(p: u32, level: usize) -> u64 {
    (p as u64).saturating_pow(level as u32)
}

fn check_size(p: u32, level: usize, bound: u64) -> Result<()> {
    let n = points(p, level);
    if n > bound {
        return Err(Error::QuotientTooLarge {
            level,
            points: n,
            bound,
        });
    }
    Ok(())
}

/// Index of a vertex among the leaves of its level.
pub fn vertex_index(v: &Vertex) -> usize {
    let p = v.degree() as usize;
    v.letters()
        .iter()
        .fold(0, |acc, &l| acc * p + (l as usize - 1))
}

pub fn vertex_at(p: u32, level: usize, mut index: usize) -> Vertex {
    let mut letters = vec![0; level];
    for slot in letters.iter_mut().rev() {
        *slot = (index % p as usize) as u32 + 1;
        index /= p as usize;
    }
    Vertex::new(p, letters).expect("letters in range")
}

/// Permutations of `a^k` and `b^k` on a fixed level, from the definition.
#[derive(Clone, Debug)]
pub struct LevelGenerators {
    p: u32,
    level: usize,
    a_powers: Vec<Permutation>,
    b_powers: Vec<Permutation>,
}

impl LevelGenerators {
    pub fn new(group: &GgsGroup, level: usize) -> Self {
        let p = group.p();
        let b = b_on_level(group, level);
        let a = a_on_level(p, level);
        let powers = |g: &Permutation| {
            let mut out = vec![Permutation::identity(g.degree())];
            for k in 1..p as usize {
                out.push(g.compose(&out[k - 1]));
            }
            out
        };
        LevelGenerators {
            p,
            level,
            a_powers: powers(&a),
            b_powers: powers(&b),
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn evaluate(&self, g: &Word) -> LevelPermutation {
        assert_eq!(g.modulus(), self.p);
        let mut perm = Permutation::identity(self.a_powers[0].degree());
        for s in g.syllables() {
            let factor = match s.gen {
                Generator::A => &self.a_powers[s.exp as usize],
                Generator::B => &self.b_powers[s.exp as usize],
            };
            perm = perm.compose(factor);
        }
        LevelPermutation {
            level: self.level,
            perm,
        }
    }
}

fn a_on_level(p: u32, level: usize) -> Permutation {
    let size = points(p, level) as usize;
    if level == 0 {
        return Permutation::identity(1);
    }
    let block = size / p as usize;
    let images = (0..size).map(|x| ((x + block) % size) as u32).collect();
    Permutation::from_images(images)
}

// b on level n: block u < p carries a^{e_{u-1}} on level n-1, block p carries b.
fn b_on_level(group: &GgsGroup, level: usize) -> Permutation {
    let p = group.p();
    if level == 0 {
        return Permutation::identity(1);
    }
    let inner_b = b_on_level(group, level - 1);
    let inner_a = a_on_level(p, level - 1);
    let block = points(p, level - 1) as usize;
    let mut images = Vec::with_capacity(block * p as usize);
    for u in 1..=p {
        let offset = (u as usize - 1) * block;
        for x in 0..block {
            let y = if u == p {
                inner_b.image(x as u32)
            } else {
                let mut y = x as u32;
                for _ in 0..group.defining_vector()[u as usize - 1] {
                    y = inner_a.image(y);
                }
                y
            };
            images.push(offset as u32 + y);
        }
    }
    Permutation::from_images(images)
}

/// The permutation of level `n` induced by `g`, subject to `max_points`.
pub fn level_permutation(
    group: &GgsGroup,
    g: &Word,
    level: usize,
    max_points: u64,
) -> Result<LevelPermutation> {
    if level == 0 {
        return Err(Error::Precondition("level must be at least 1".into()));
    }
    check_size(group.p(), level, max_points)?;
    Ok(LevelGenerators::new(group, level).evaluate(g))
}

/// Image of a leaf under a word, computed letter by letter from the
/// definition without materializing any permutation.
pub fn portrait_act(group: &GgsGroup, g: &Word, leaf: &[u32]) -> Vec<u32> {
    let p = group.p();
    let mut v = leaf.to_vec();
    for s in g.syllables().iter().rev() {
        match s.gen {
            Generator::A => shift_first(&mut v, s.exp, p),
            Generator::B => {
                for _ in 0..s.exp {
                    apply_b(group, &mut v);
                }
            }
        }
    }
    v
}

fn shift_first(v: &mut [u32], by: u32, p: u32) {
    if let Some(first) = v.first_mut() {
        *first = (*first - 1 + by) % p + 1;
    }
}

fn apply_b(group: &GgsGroup, v: &mut [u32]) {
    let p = group.p();
    let mut i = 0;
    // b descends along the rightmost letter p until it turns into a power of a.
    while i < v.len() {
        let u = v[i];
        if u == p {
            i += 1;
            continue;
        }
        let e = group.defining_vector()[u as usize - 1];
        shift_first(&mut v[i + 1..], e, p);
        return;
    }
}

/// Whether `g` fixes every vertex of level `n`; no size bound, early exit on
/// the first moved leaf.
pub fn acts_trivially_on_level(group: &GgsGroup, g: &Word, level: usize) -> bool {
    let p = group.p();
    let total = points(p, level);
    (0..total).all(|i| {
        let leaf = vertex_at(p, level, i as usize);
        portrait_act(group, g, leaf.letters()) == leaf.letters()
    })
}

/// The image of `<gens>` in the quotient at level `n`, acting on leaves.
pub fn quotient_group(
    group: &GgsGroup,
    gens: &[Word],
    level: usize,
    max_points: u64,
) -> Result<PermGroup> {
    if level == 0 {
        return Err(Error::Precondition("level must be at least 1".into()));
    }
    check_size(group.p(), level, max_points)?;
    let table = LevelGenerators::new(group, level);
    let perms = gens.iter().map(|g| table.evaluate(g).perm).collect();
    Ok(PermGroup::new(points(group.p(), level) as usize, perms))
}

/// Actions on every vertex of levels `1..=n` at once.
///
/// Stabilizers of whole levels become pointwise stabilizers in this domain,
/// which a stabilizer chain computes directly.
#[derive(Clone, Debug)]
pub struct TreeDomain {
    p: u32,
    depth: usize,
    offsets: Vec<usize>,
    generators: LevelGenerators,
}

impl TreeDomain {
    pub fn new(group: &GgsGroup, depth: usize, max_points: u64) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Precondition("depth must be at least 1".into()));
        }
        check_size(group.p(), depth, max_points)?;
        let mut offsets = vec![0];
        for k in 1..depth {
            offsets.push(offsets[k - 1] + points(group.p(), k) as usize);
        }
        Ok(TreeDomain {
            p: group.p(),
            depth,
            offsets,
            generators: LevelGenerators::new(group, depth),
        })
    }

    pub fn degree(&self) -> usize {
        self.offsets[self.depth - 1] + points(self.p, self.depth) as usize
    }

    /// Points of the domain standing for the vertices of level `k`.
    pub fn level_points(&self, k: usize) -> Vec<u32> {
        assert!((1..=self.depth).contains(&k));
        let start = self.offsets[k - 1];
        (start..start + points(self.p, k) as usize)
            .map(|x| x as u32)
            .collect()
    }

    pub fn permutation(&self, g: &Word) -> Permutation {
        let leaves = self.generators.evaluate(g).perm;
        let mut images = vec![0u32; self.degree()];
        for k in 1..=self.depth {
            let shrink = points(self.p, self.depth - k) as usize;
            for x in 0..points(self.p, k) as usize {
                // A vertex moves like any of its leaf descendants, truncated.
                let leaf = x * shrink;
                let image = leaves.image(leaf as u32) as usize / shrink;
                images[self.offsets[k - 1] + x] = (self.offsets[k - 1] + image) as u32;
            }
        }
        Permutation::from_images(images)
    }

    pub fn group(&self, gens: &[Word], base_prefix: &[u32]) -> PermGroup {
        let perms = gens.iter().map(|g| self.permutation(g)).collect();
        PermGroup::with_base_prefix(self.degree(), perms, base_prefix)
    }
}

/// Cache of level generator tables keyed by level.
#[derive(Debug, Default)]
pub struct QuotientCache {
    tables: HashMap<usize, LevelGenerators>,
}

impl QuotientCache {
    pub fn table(&mut self, group: &GgsGroup, level: usize) -> &LevelGenerators {
        self.tables
            .entry(level)
            .or_insert_with(|| LevelGenerators::new(group, level))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn gs3() -> GgsGroup {
        GgsGroup::gupta_sidki(3).unwrap()
    }

    #[test]
    fn level_one_images() {
        let g = gs3();
        let a = level_permutation(&g, &g.a(), 1, DEFAULT_MAX_POINTS).unwrap();
        assert_eq!(a.perm.images(), &[1, 2, 0]);
        assert!(level_permutation(&g, &g.b(), 1, DEFAULT_MAX_POINTS)
            .unwrap()
            .is_identity());
        for n in 1..4 {
            let id = level_permutation(&g, &Word::identity(3), n, DEFAULT_MAX_POINTS).unwrap();
            assert!(id.is_identity());
        }
    }

    #[test]
    fn size_bound_enforced() {
        let g = GgsGroup::gupta_sidki(5).unwrap();
        assert!(level_permutation(&g, &g.a(), 5, DEFAULT_MAX_POINTS).is_ok());
        assert!(matches!(
            level_permutation(&g, &g.a(), 6, DEFAULT_MAX_POINTS),
            Err(Error::QuotientTooLarge { .. })
        ));
    }

    #[test]
    fn quotient_orders_match_enumeration() {
        // Frozen from brute-force closure of the level permutations.
        let g = gs3();
        let gens = [g.a(), g.b()];
        let order = |n| {
            quotient_group(&g, &gens, n, DEFAULT_MAX_POINTS)
                .unwrap()
                .order()
        };
        assert_eq!(order(1), BigUint::from(3u32));
        assert_eq!(order(2), BigUint::from(27u32));
        assert_eq!(order(3), BigUint::from(2187u32));
        let b_only = quotient_group(&g, &[g.b()], 1, DEFAULT_MAX_POINTS).unwrap();
        assert_eq!(b_only.order(), BigUint::from(1u32));
    }

    #[test]
    fn portrait_agrees_with_tables() {
        let g = GgsGroup::new(5, &[1, 2, 0, 2]).unwrap();
        let w = g.parse_word("a b^2 a^3 b a b^4").unwrap();
        let table = LevelGenerators::new(&g, 3);
        let perm = table.evaluate(&w).perm;
        for x in 0..125 {
            let leaf = vertex_at(5, 3, x);
            let image = portrait_act(&g, &w, leaf.letters());
            assert_eq!(
                vertex_index(&Vertex::new(5, image).unwrap()),
                perm.image(x as u32) as usize
            );
        }
    }

    #[test]
    fn tree_domain_level_stabilizer() {
        let g = gs3();
        let domain = TreeDomain::new(&g, 2, DEFAULT_MAX_POINTS).unwrap();
        assert_eq!(domain.degree(), 12);
        let level1 = domain.level_points(1);
        let full = domain.group(&[g.a(), g.b()], &level1);
        assert_eq!(full.order(), BigUint::from(27u32));
        assert_eq!(
            full.pointwise_stabilizer(&level1).order(),
            BigUint::from(9u32)
        );
    }
}
