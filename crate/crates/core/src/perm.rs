//! Permutation groups with a deterministic Schreier-Sims stabilizer chain.
//!
//! Permutations act on `0..degree` on the left: `(g * h)(x) = g(h(x))`.

use std::collections::VecDeque;

use num_bigint::BigUint;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    /// Panics unless `images` is a bijection of `0..len`.
    pub fn from_images(images: Vec<u32>) -> Self {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            let slot = seen.get_mut(x as usize).expect("image out of range");
            assert!(!*slot, "not a bijection");
            *slot = true;
        }
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn image(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other
                .images
                .iter()
                .map(|&x| self.images[x as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y as usize] = x as u32;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    pub fn first_moved_point(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|(x, &y)| *x as u32 != y)
            .map(|(x, _)| x as u32)
    }

    pub fn commutator(&self, other: &Permutation) -> Permutation {
        self.inverse()
            .compose(&other.inverse())
            .compose(self)
            .compose(other)
    }

    /// Least common multiple of the cycle lengths.
    pub fn order(&self) -> BigUint {
        let mut seen = vec![false; self.images.len()];
        let mut order = BigUint::from(1u32);
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x] as usize;
                len += 1;
            }
            let len = BigUint::from(len);
            let g = gcd(order.clone(), len.clone());
            order = order * len / g;
        }
        order
    }
}

fn gcd(mut a: BigUint, mut b: BigUint) -> BigUint {
    while b != BigUint::from(0u32) {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

#[derive(Clone, Debug)]
struct Level {
    base: u32,
    // Generators of the stabilizer of the earlier base points.
    gens: Vec<Permutation>,
    orbit: Vec<u32>,
    // reps[x] = (u, u^-1) with u(base) = x.
    reps: Vec<Option<(Permutation, Permutation)>>,
}

impl Level {
    fn new(base: u32, degree: usize) -> Self {
        let mut reps = vec![None; degree];
        let id = Permutation::identity(degree);
        reps[base as usize] = Some((id.clone(), id));
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            reps,
        }
    }
}

/// A permutation group given by generators, with a base and strong
/// generating set computed at construction.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Permutation>,
    levels: Vec<Level>,
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Permutation>) -> Self {
        PermGroup::with_base_prefix(degree, gens, &[])
    }

    /// Builds the chain with the given points first in the base, so that
    /// their pointwise stabilizer can be read off the chain.
    pub fn with_base_prefix(degree: usize, gens: Vec<Permutation>, prefix: &[u32]) -> Self {
        let mut group = PermGroup {
            degree,
            gens: Vec::new(),
            levels: prefix.iter().map(|&b| Level::new(b, degree)).collect(),
        };
        for g in gens {
            assert_eq!(g.degree(), degree, "generator degree mismatch");
            group.insert(g);
        }
        group
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::new(degree, Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The generators the group was built from (identities dropped).
    pub fn generators(&self) -> &[Permutation] {
        &self.gens
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .map(|l| BigUint::from(l.orbit.len()))
            .product()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && {
            let (_, residue) = self.sift(g, 0);
            residue.is_identity()
        }
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.gens.iter().all(|g| other.contains(g))
    }

    /// `[other : self]` when `self <= other`.
    pub fn index_in(&self, other: &PermGroup) -> Option<BigUint> {
        self.is_subgroup_of(other)
            .then(|| other.order() / self.order())
    }

    pub fn orbit(&self, point: u32) -> Vec<u32> {
        let mut seen = vec![false; self.degree];
        seen[point as usize] = true;
        let mut orbit = vec![point];
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            for g in &self.gens {
                let y = g.image(x);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbit
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    /// Adds a generator; returns false if it was already a member.
    pub fn insert(&mut self, g: Permutation) -> bool {
        let (depth, residue) = self.sift(&g, 0);
        if residue.is_identity() {
            return false;
        }
        self.gens.push(g);
        self.extend(0, depth, residue);
        true
    }

    /// Pointwise stabilizer of `points`, which must be a prefix of the base.
    pub fn pointwise_stabilizer(&self, points: &[u32]) -> PermGroup {
        assert!(
            self.base().starts_with(points),
            "points must be a base prefix; build with with_base_prefix"
        );
        let gens = self
            .levels
            .get(points.len())
            .map(|l| l.gens.clone())
            .unwrap_or_default();
        PermGroup::new(self.degree, gens)
    }

    /// Smallest subgroup of `self` containing `gens` and normalized by `self`.
    pub fn normal_closure(&self, gens: &[Permutation]) -> PermGroup {
        let mut closure = PermGroup::trivial(self.degree);
        let mut queue: VecDeque<Permutation> = gens.iter().cloned().collect();
        while let Some(n) = queue.pop_front() {
            if closure.insert(n.clone()) {
                for g in &self.gens {
                    queue.push_back(g.compose(&n).compose(&g.inverse()));
                }
            }
        }
        closure
    }

    pub fn derived_subgroup(&self) -> PermGroup {
        let mut commutators = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            for h in &self.gens[i + 1..] {
                commutators.push(g.commutator(h));
            }
        }
        self.normal_closure(&commutators)
    }

    fn sift(&self, g: &Permutation, start: usize) -> (usize, Permutation) {
        let mut h = g.clone();
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            let x = h.image(level.base);
            match &level.reps[x as usize] {
                Some((_, u_inv)) => h = u_inv.compose(&h),
                None => return (i, h),
            }
        }
        (self.levels.len(), h)
    }

    // `h` fixes the base points of levels `< to`; add it to levels `from..=to`.
    fn extend(&mut self, from: usize, to: usize, h: Permutation) {
        if to == self.levels.len() {
            let base = h.first_moved_point().expect("non-identity residue");
            self.levels.push(Level::new(base, self.degree));
        }
        for level in (from..=to).rev() {
            self.add_level_generator(level, h.clone());
        }
    }

    fn add_level_generator(&mut self, level: usize, g: Permutation) {
        self.levels[level].gens.push(g);
        let new_gen = self.levels[level].gens.len() - 1;
        let mut queue: VecDeque<(u32, usize)> = self.levels[level]
            .orbit
            .iter()
            .map(|&x| (x, new_gen))
            .collect();
        while let Some((x, s)) = queue.pop_front() {
            let lvl = &self.levels[level];
            let gen = lvl.gens[s].clone();
            let y = gen.image(x);
            let u_x = lvl.reps[x as usize]
                .as_ref()
                .expect("orbit point has rep")
                .0
                .clone();
            let u_y_inv = lvl.reps[y as usize].as_ref().map(|r| r.1.clone());
            match u_y_inv {
                None => {
                    let u_y = gen.compose(&u_x);
                    let u_y_inv = u_y.inverse();
                    let lvl = &mut self.levels[level];
                    lvl.reps[y as usize] = Some((u_y, u_y_inv));
                    lvl.orbit.push(y);
                    queue.extend((0..lvl.gens.len()).map(|t| (y, t)));
                }
                Some(u_y_inv) => {
                    let schreier = u_y_inv.compose(&gen).compose(&u_x);
                    if schreier.is_identity() {
                        continue;
                    }
                    let (depth, residue) = self.sift(&schreier, level + 1);
                    if !residue.is_identity() {
                        self.extend(level + 1, depth, residue);
                    }
                }
            }
        }
    }
}
