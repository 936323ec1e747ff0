//! Seeded random words and presentations.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::group::GgsGroup;
use crate::subgroup::SubgroupPresentation;
use crate::word::{Generator, Word};

/// The generator for sample `index` of a run seeded with `seed`: every sample
/// reads its own ChaCha stream, so samples can run in any order.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alpha {
    Zero,
    NonZero,
    Any,
}

/// A normal-form word with exactly `b_len` b-syllables; the a-exponent sum is
/// forced into the requested stratum.
pub fn word_with_b_length<R: Rng>(rng: &mut R, p: u32, b_len: usize, alpha: Alpha) -> Word {
    let mut powers = Vec::with_capacity(2 * b_len + 1);
    for _ in 0..b_len {
        powers.push((Generator::A, rng.gen_range(0..p) as i64));
        powers.push((Generator::B, rng.gen_range(1..p) as i64));
    }
    let sum: i64 = powers
        .iter()
        .filter(|(g, _)| *g == Generator::A)
        .map(|(_, e)| e)
        .sum();
    let last = match alpha {
        Alpha::Zero => -sum,
        Alpha::NonZero => rng.gen_range(1..p) as i64 - sum,
        Alpha::Any => rng.gen_range(0..p) as i64,
    };
    powers.push((Generator::A, last));
    Word::from_powers(p, powers)
}

/// A word of b-length at most `max_b`, stratified evenly by `alpha = 0`.
pub fn stratified_word<R: Rng>(rng: &mut R, p: u32, max_b: usize) -> Word {
    let b_len = rng.gen_range(0..=max_b);
    let alpha = if rng.gen_bool(0.5) {
        Alpha::Zero
    } else {
        Alpha::NonZero
    };
    word_with_b_length(rng, p, b_len, alpha)
}

/// A word of total length at most `max_total`.
pub fn bounded_word<R: Rng>(rng: &mut R, p: u32, max_total: usize) -> Word {
    let max_b = max_total.saturating_sub(1) / 2;
    loop {
        let w = stratified_word(rng, p, max_b);
        if w.total_length() <= max_total {
            return w;
        }
    }
}

fn image(w: &Word, p: u32) -> (u32, u32) {
    let (x, y) = w.exponent_sums();
    (x % p, y % p)
}

/// Appends `a^i b^j` so that the image of `w` in the abelianization becomes
/// `target`.
fn force_image(w: Word, p: u32, target: (u32, u32)) -> Word {
    let (x, y) = image(&w, p);
    let fix = Word::from_powers(
        p,
        [
            (Generator::A, target.0 as i64 - x as i64),
            (Generator::B, target.1 as i64 - y as i64),
        ],
    );
    &w * &fix
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Abelianization image of rank two.
    Full,
    /// Image inside the `b` axis, at least one generator off the kernel.
    TypeII,
    /// Image a line not contained in the `b` axis.
    TypeIII,
}

/// A presentation with one to `max_gens` generators of b-length at most
/// `max_b` (at least 1) and the requested image shape.
pub fn presentation<R: Rng>(
    rng: &mut R,
    group: &GgsGroup,
    max_gens: usize,
    max_b: usize,
    shape: Shape,
) -> SubgroupPresentation {
    let p = group.p();
    let count = match shape {
        Shape::Full => rng.gen_range(2..=max_gens.max(2)),
        _ => rng.gen_range(1..=max_gens.max(1)),
    };
    let base = match shape {
        Shape::TypeIII => (rng.gen_range(1..p), rng.gen_range(0..p)),
        _ => (0, rng.gen_range(1..p)),
    };
    let other = (rng.gen_range(1..p), rng.gen_range(0..p));
    loop {
        let mut gens = Vec::with_capacity(count);
        for i in 0..count {
            let raw = stratified_word(rng, p, max_b.saturating_sub(1));
            let target = match (shape, i) {
                (_, 0) => base,
                (Shape::Full, 1) => other,
                (Shape::Full, _) => (rng.gen_range(0..p), rng.gen_range(0..p)),
                _ => {
                    let c = rng.gen_range(0..p);
                    (base.0 * c % p, base.1 * c % p)
                }
            };
            gens.push(force_image(raw, p, target));
        }
        let h = SubgroupPresentation::new(group.clone(), gens);
        if !h.is_empty() {
            return h;
        }
    }
}

/// A presentation of any of the three shapes, chosen uniformly.
pub fn any_presentation<R: Rng>(
    rng: &mut R,
    group: &GgsGroup,
    max_gens: usize,
    max_b: usize,
) -> SubgroupPresentation {
    let shape = [Shape::Full, Shape::TypeII, Shape::TypeIII][rng.gen_range(0..3)];
    presentation(rng, group, max_gens, max_b, shape)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgroup::{classify, SubgroupType};

    #[test]
    fn strata_are_respected() {
        let g = GgsGroup::gupta_sidki(5).unwrap();
        let mut rng = sample_rng(11, 0);
        for _ in 0..200 {
            let w = word_with_b_length(&mut rng, 5, 3, Alpha::Zero);
            assert_eq!(w.exponent_sums().0, 0);
            assert!(w.b_length() <= 3);
            let w = word_with_b_length(&mut rng, 5, 2, Alpha::NonZero);
            assert_ne!(w.exponent_sums().0, 0);
            let h = presentation(&mut rng, &g, 3, 4, Shape::TypeIII);
            assert!(matches!(classify(&h), SubgroupType::TypeIII(_)));
            assert!(h.max_b_length() <= 4);
            let h = presentation(&mut rng, &g, 3, 4, Shape::TypeII);
            assert!(matches!(classify(&h), SubgroupType::TypeII(_)));
            let h = presentation(&mut rng, &g, 3, 4, Shape::Full);
            assert_eq!(classify(&h), SubgroupType::FullGroup);
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<u32> = (0..8).map(|_| sample_rng(5, 3).gen()).collect();
        let b: Vec<u32> = (0..8).map(|_| sample_rng(5, 3).gen()).collect();
        assert_eq!(a, b);
        assert_ne!(sample_rng(5, 3).gen::<u64>(), sample_rng(5, 4).gen::<u64>());
    }
}
