//! GGS groups: definition, tree action and sections.
//!
//! Conventions, fixed once and used everywhere:
//!
//! * `a` acts on the first letter as the cycle `1 -> 2 -> .. -> p -> 1` and
//!   has trivial sections.
//! * `b` fixes the first level and has sections `phi_u(b) = a^{e_{u-1}}`
//!   for `u` in `1..p` and `phi_p(b) = b`.
//! * Products act on the left: `(gh).v = g.(h.v)`, so the rightmost syllable
//!   of a word acts first and `phi_v(gh) = phi_{h.v}(g) phi_v(h)`.
//!
//! Sections are computed with one left-to-right scan. Writing
//! `g = a^{i_1} b^{j_1} a^{i_2} .. b^{j_n} a^{i_{n+1}}` and
//! `c_k = i_1 + .. + i_k`, we have
//! `g = (a^{c_1} b^{j_1} a^{-c_1}) .. (a^{c_n} b^{j_n} a^{-c_n}) a^{alpha}`,
//! and the section of `a^c b^j a^{-c}` at `u` is the section of `b^j` at
//! `u - c`. Hence `phi_u(g)` is the product over `k` of `phi_{u+alpha-c_k}(b^{j_k})`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tree::Vertex;
use crate::word::{Generator, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GgsGroup {
    p: u32,
    e: Vec<u32>,
}

fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl GgsGroup {
    /// Validates `p` (an odd prime) and the defining vector `e` (length
    /// `p - 1`, not identically zero mod `p`). Entries are reduced mod `p`.
    pub fn new(p: i64, e: &[i64]) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let expected = (p - 1) as usize;
        if e.len() != expected {
            return Err(Error::WrongVectorLength {
                expected,
                found: e.len(),
            });
        }
        let e: Vec<u32> = e.iter().map(|x| x.rem_euclid(p) as u32).collect();
        if e.iter().all(|&x| x == 0) {
            return Err(Error::ZeroVector);
        }
        Ok(GgsGroup { p: p as u32, e })
    }

    /// The Gupta-Sidki `p`-group, defining vector `(1, -1, 0, .., 0)`.
    pub fn gupta_sidki(p: u32) -> Result<Self> {
        let mut e = vec![0i64; (p as usize).saturating_sub(1)];
        if e.len() >= 2 {
            e[0] = 1;
            e[1] = -1;
        }
        GgsGroup::new(p as i64, &e)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn defining_vector(&self) -> &[u32] {
        &self.e
    }

    /// `sum e_i == 0 mod p`.
    pub fn is_torsion(&self) -> bool {
        self.e.iter().sum::<u32>() % self.p == 0
    }

    /// Non-constant defining vector; equivalent to being branch, and to the
    /// congruence subgroup property.
    pub fn is_branch_indicator(&self) -> bool {
        self.e.windows(2).any(|w| w[0] != w[1])
    }

    pub fn a(&self) -> Word {
        Word::a(self.p, 1)
    }

    pub fn b(&self) -> Word {
        Word::b(self.p, 1)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        Word::parse(self.p, text)
    }

    pub fn parse_vertex(&self, text: &str) -> Result<Vertex> {
        Vertex::parse(self.p, text)
    }

    /// The exponent `alpha` such that `g` acts on the first level as `a^alpha`.
    pub fn root_permutation(&self, g: &Word) -> u32 {
        g.exponent_sums().0
    }

    fn letter(&self, value: i64) -> u32 {
        (value - 1).rem_euclid(self.p as i64) as u32 + 1
    }

    /// Section of `b^j` at the level-one vertex `u`.
    fn b_power_section(&self, u: u32, j: u32) -> (Generator, i64) {
        if u == self.p {
            (Generator::B, j as i64)
        } else {
            (Generator::A, (j * self.e[(u - 1) as usize]) as i64)
        }
    }

    /// Section at the level-one vertex `u` in `1..=p`.
    pub fn first_level_section(&self, g: &Word, u: u32) -> Word {
        assert!(
            (1..=self.p).contains(&u),
            "vertex letter {u} outside 1..={}",
            self.p
        );
        let alpha = self.root_permutation(g) as i64;
        let mut offset = 0i64;
        let mut out = Word::identity(self.p);
        for s in g.syllables() {
            match s.gen {
                Generator::A => offset += s.exp as i64,
                Generator::B => {
                    let m = self.letter(u as i64 + alpha - offset);
                    let (gen, exp) = self.b_power_section(m, s.exp);
                    out.push(gen, exp);
                }
            }
        }
        out
    }

    /// Sections at the vertices `1..=p`, in order.
    pub fn first_level_sections(&self, g: &Word) -> Vec<Word> {
        (1..=self.p)
            .map(|u| self.first_level_section(g, u))
            .collect()
    }

    /// Section at an arbitrary vertex, iterating down the path.
    pub fn section(&self, g: &Word, v: &Vertex) -> Word {
        v.letters()
            .iter()
            .fold(g.clone(), |h, &u| self.first_level_section(&h, u))
    }

    /// Image of a vertex: `g.(u w) = (g.u)(phi_u(g).w)`.
    pub fn act(&self, g: &Word, v: &Vertex) -> Vertex {
        let mut h = g.clone();
        let mut image = Vec::with_capacity(v.level());
        for &u in v.letters() {
            image.push(self.letter(u as i64 + self.root_permutation(&h) as i64));
            h = self.first_level_section(&h, u);
        }
        Vertex::new(self.p, image).expect("letters stay in range")
    }

    /// Spec string `p=<int>; e=<c0>,<c1>,...`.
    pub fn spec_string(&self) -> String {
        let e: Vec<String> = self.e.iter().map(|x| x.to_string()).collect();
        format!("p={}; e={}", self.p, e.join(","))
    }
}

impl fmt::Display for GgsGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

impl FromStr for GgsGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = None;
        let mut e = None;
        for part in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::SpecParse(format!("expected key=value, got {part:?}")))?;
            match key.trim() {
                "p" => {
                    p =
                        Some(value.trim().parse::<i64>().map_err(|_| {
                            Error::SpecParse(format!("bad prime {:?}", value.trim()))
                        })?)
                }
                "e" => {
                    e = Some(
                        value
                            .split(',')
                            .map(|c| {
                                c.trim().parse::<i64>().map_err(|_| {
                                    Error::SpecParse(format!("bad coefficient {:?}", c.trim()))
                                })
                            })
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                other => return Err(Error::SpecParse(format!("unknown key {other:?}"))),
            }
        }
        let p = p.ok_or_else(|| Error::SpecParse("missing p".into()))?;
        let e = e.ok_or_else(|| Error::SpecParse("missing e".into()))?;
        GgsGroup::new(p, &e)
    }
}
