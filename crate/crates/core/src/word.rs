//! Normal forms in the free product `C_p * C_p = <a> * <b>`.
//!
//! Every element of a GGS group is represented by a [`Word`]: an alternating
//! sequence of syllables `a^i` and `b^j` with exponents in `1..p`. Words are
//! always kept in free-product normal form, so two words are equal as values
//! exactly when they are equal in the free product. Equality in the GGS group
//! itself is the business of [`crate::word_problem`].

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// One of the two defining generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    A,
    B,
}

impl Generator {
    pub fn symbol(self) -> char {
        match self {
            Generator::A => 'a',
            Generator::B => 'b',
        }
    }
}

/// A nontrivial power of a generator; `exp` is always in `1..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub gen: Generator,
    pub exp: u32,
}

/// A free-product normal form over `{a, b}` with exponents mod `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    p: u32,
    syllables: Vec<Syllable>,
}

fn residue(value: i64, p: u32) -> u32 {
    value.rem_euclid(p as i64) as u32
}

impl Word {
    pub fn identity(p: u32) -> Self {
        Word {
            p,
            syllables: Vec::new(),
        }
    }

    pub fn a(p: u32, exp: i64) -> Self {
        let mut w = Word::identity(p);
        w.push(Generator::A, exp);
        w
    }

    pub fn b(p: u32, exp: i64) -> Self {
        let mut w = Word::identity(p);
        w.push(Generator::B, exp);
        w
    }

    /// Builds a word from arbitrary `(generator, exponent)` pairs, reducing
    /// exponents mod `p` and merging neighbours.
    pub fn from_powers<I>(p: u32, powers: I) -> Self
    where
        I: IntoIterator<Item = (Generator, i64)>,
    {
        let mut w = Word::identity(p);
        for (gen, exp) in powers {
            w.push(gen, exp);
        }
        w
    }

    /// Appends `gen^exp` on the right, keeping the normal form.
    pub fn push(&mut self, gen: Generator, exp: i64) {
        let exp = residue(exp, self.p);
        if exp == 0 {
            return;
        }
        match self.syllables.last_mut() {
            Some(last) if last.gen == gen => {
                let merged = (last.exp + exp) % self.p;
                if merged == 0 {
                    self.syllables.pop();
                } else {
                    last.exp = merged;
                }
            }
            _ => self.syllables.push(Syllable { gen, exp }),
        }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Product `self * other`, failing if the moduli differ.
    pub fn multiply(&self, other: &Word) -> Result<Word> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch {
                left: self.p,
                right: other.p,
            });
        }
        let mut out = self.clone();
        out.append(other);
        Ok(out)
    }

    fn append(&mut self, other: &Word) {
        for s in &other.syllables {
            self.push(s.gen, s.exp as i64);
        }
    }

    pub fn inverse(&self) -> Word {
        let syllables = self
            .syllables
            .iter()
            .rev()
            .map(|s| Syllable {
                gen: s.gen,
                exp: self.p - s.exp,
            })
            .collect();
        Word {
            p: self.p,
            syllables,
        }
    }

    /// `self^n` for any integer `n`.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.p);
        for _ in 0..n.unsigned_abs() {
            out.append(&base);
        }
        out
    }

    /// Number of syllables.
    pub fn total_length(&self) -> usize {
        self.syllables.len()
    }

    /// Number of `b`-syllables.
    pub fn b_length(&self) -> usize {
        self.syllables
            .iter()
            .filter(|s| s.gen == Generator::B)
            .count()
    }

    /// Exponent sums of `a` and of `b`, mod `p`: the image in `G/G'`.
    pub fn exponent_sums(&self) -> (u32, u32) {
        let mut alpha = 0;
        let mut beta = 0;
        for s in &self.syllables {
            match s.gen {
                Generator::A => alpha = (alpha + s.exp) % self.p,
                Generator::B => beta = (beta + s.exp) % self.p,
            }
        }
        (alpha, beta)
    }

    /// Parses the whitespace-separated grammar `a b^2 a^-1`. Exponents are
    /// reduced mod `p`; the empty string is the identity.
    pub fn parse(p: u32, text: &str) -> Result<Word> {
        let mut w = Word::identity(p);
        let mut offset = 0;
        for token in text.split_whitespace() {
            let position = text[offset..].find(token).map_or(offset, |i| offset + i);
            offset = position + token.len();
            let (head, exp) = match token.split_once('^') {
                Some((head, exp)) => {
                    let exp: i64 = exp.parse().map_err(|_| Error::WordParse {
                        position,
                        message: format!("bad exponent in {token:?}"),
                    })?;
                    (head, exp)
                }
                None => (token, 1),
            };
            let gen = match head {
                "a" => Generator::A,
                "b" => Generator::B,
                _ => {
                    return Err(Error::WordParse {
                        position,
                        message: format!("unknown generator in {token:?}"),
                    })
                }
            };
            w.push(gen, exp);
        }
        Ok(w)
    }

    /// Canonical generating list: drops identities and repeated words,
    /// keeping first occurrences in order.
    pub fn prune(words: impl IntoIterator<Item = Word>) -> Vec<Word> {
        let mut seen = std::collections::HashSet::new();
        words
            .into_iter()
            .filter(|w| !w.is_identity() && seen.insert(w.clone()))
            .collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if s.exp == 1 {
                write!(f, "{}", s.gen.symbol())?;
            } else {
                write!(f, "{}^{}", s.gen.symbol(), s.exp)?;
            }
        }
        Ok(())
    }
}

/// Panics on a modulus mismatch; use [`Word::multiply`] for a checked product.
impl Mul for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        self.multiply(rhs).expect("words over different moduli")
    }
}
