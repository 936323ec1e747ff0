//! Vertices of the `p`-regular rooted tree and transversals.
//!
//! Vertices are strings over `{1, .., p}` read from the root downwards; the
//! empty string is the root.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    p: u32,
    path: Vec<u32>,
}

impl Vertex {
    pub fn root(p: u32) -> Self {
        Vertex {
            p,
            path: Vec::new(),
        }
    }

    pub fn new(p: u32, path: Vec<u32>) -> Result<Self> {
        if let Some(bad) = path.iter().find(|&&l| l == 0 || l > p) {
            return Err(Error::InvalidVertex {
                text: format!("{path:?}"),
                p,
                message: format!("letter {bad} outside 1..={p}"),
            });
        }
        Ok(Vertex { p, path })
    }

    /// The level-one vertex `letter`.
    pub fn child_of_root(p: u32, letter: u32) -> Self {
        assert!((1..=p).contains(&letter), "letter {letter} outside 1..={p}");
        Vertex {
            p,
            path: vec![letter],
        }
    }

    /// Parses a digit string; for `p > 9` letters are separated by dots.
    pub fn parse(p: u32, text: &str) -> Result<Self> {
        let invalid = |message: String| Error::InvalidVertex {
            text: text.to_string(),
            p,
            message,
        };
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vertex::root(p));
        }
        let letters: Vec<u32> = if text.contains('.') || p > 9 {
            text.split('.')
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|_| invalid(format!("bad letter {t:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| invalid(format!("bad letter {c:?}")))
                })
                .collect::<Result<_>>()?
        };
        Vertex::new(p, letters).map_err(|e| match e {
            Error::InvalidVertex { message, .. } => invalid(message),
            other => other,
        })
    }

    pub fn degree(&self) -> u32 {
        self.p
    }

    pub fn letters(&self) -> &[u32] {
        &self.path
    }

    pub fn level(&self) -> usize {
        self.path.len()
    }

    pub fn is_root(&self) -> bool {
        self.path.is_empty()
    }

    pub fn child(&self, letter: u32) -> Vertex {
        assert!((1..=self.p).contains(&letter));
        let mut path = self.path.clone();
        path.push(letter);
        Vertex { p: self.p, path }
    }

    pub fn concat(&self, other: &Vertex) -> Vertex {
        let mut path = self.path.clone();
        path.extend_from_slice(&other.path);
        Vertex { p: self.p, path }
    }

    pub fn is_prefix_of(&self, other: &Vertex) -> bool {
        other.path.starts_with(&self.path)
    }

    /// All vertices of level `n`, in lexicographic order.
    pub fn level_vertices(p: u32, n: usize) -> Vec<Vertex> {
        let mut out = vec![Vertex::root(p)];
        for _ in 0..n {
            out = out
                .iter()
                .flat_map(|v| (1..=p).map(move |l| v.child(l)))
                .collect();
        }
        out
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.p > 9 { "." } else { "" };
        let parts: Vec<String> = self.path.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(sep))
    }
}

/// True iff no vertex is a prefix of another and every ray meets the set.
///
/// For an antichain `X` with maximal depth `D`, completeness is the Kraft
/// equality `sum_{v in X} p^(D - |v|) = p^D`.
pub fn is_transversal(p: u32, vertices: &[Vertex]) -> bool {
    if vertices.is_empty() || vertices.iter().any(|v| v.p != p) {
        return false;
    }
    for (i, v) in vertices.iter().enumerate() {
        for (j, w) in vertices.iter().enumerate() {
            if i != j && v.is_prefix_of(w) {
                return false;
            }
        }
    }
    let depth = vertices.iter().map(Vertex::level).max().unwrap_or(0) as u32;
    let total: u128 = vertices
        .iter()
        .map(|v| (p as u128).pow(depth - v.level() as u32))
        .sum();
    total == (p as u128).pow(depth)
}

/// A finite set of vertices cutting every ray exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transversal {
    p: u32,
    vertices: Vec<Vertex>,
}

impl Transversal {
    pub fn new(p: u32, mut vertices: Vec<Vertex>) -> Result<Self> {
        vertices.sort();
        if !is_transversal(p, &vertices) {
            return Err(Error::Precondition(
                "vertex set is not a transversal".to_string(),
            ));
        }
        Ok(Transversal { p, vertices })
    }

    pub fn level(p: u32, n: usize) -> Self {
        Transversal {
            p,
            vertices: Vertex::level_vertices(p, n),
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn degree(&self) -> u32 {
        self.p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(p: u32, items: &[&str]) -> Vec<Vertex> {
        items.iter().map(|s| Vertex::parse(p, s).unwrap()).collect()
    }

    #[test]
    fn transversal_examples() {
        assert!(is_transversal(3, &set(3, &["1", "2", "3"])));
        assert!(!is_transversal(3, &set(3, &["1", "2"])));
        assert!(is_transversal(3, &set(3, &["1", "2", "31", "32", "33"])));
    }

    #[test]
    fn transversal_rejects_prefix_pairs_and_empty() {
        assert!(!is_transversal(3, &set(3, &["1", "12", "2", "3"])));
        assert!(!is_transversal(3, &[]));
        assert!(is_transversal(3, &set(3, &[""])));
    }

    #[test]
    fn parse_and_display() {
        let v = Vertex::parse(3, "312").unwrap();
        assert_eq!(v.letters(), &[3, 1, 2]);
        assert_eq!(v.to_string(), "312");
        assert!(Vertex::parse(3, "").unwrap().is_root());
        assert!(Vertex::parse(3, "4").is_err());
        assert!(Vertex::parse(3, "0").is_err());
        let big = Vertex::parse(11, "10.3").unwrap();
        assert_eq!(big.to_string(), "10.3");
    }

    #[test]
    fn level_vertices_count() {
        assert_eq!(Vertex::level_vertices(3, 2).len(), 9);
        assert!(is_transversal(5, Transversal::level(5, 2).vertices()));
    }
}
