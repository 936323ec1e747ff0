//! Derivation certificates for membership of a subgroup in every weakly
//! inductive class of subgroups.
//!
//! A certificate is a tree. Leaves claim the subgroup is trivial, the whole
//! group, or finite with an explicit element table. Inner nodes are either a
//! finite-index step (the subgroup contains the child's subgroup with the
//! stated index) or a section step (the subgroup fixes the first level and
//! its sections at the `p` first-level vertices are the children).
//!
//! [`certify`] builds certificates from the reduction driver; [`check`]
//! verifies them without using the builder's code.

mod check;
mod mutate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GgsGroup;
use crate::reduction::{
    descend, Descent, LeafKind, Outcome, ReductionNode, Target, DEFAULT_MAX_DEPTH,
};
use crate::subgroup::{Factorization, SubgroupPresentation};
use crate::word::Word;
use crate::word_problem::WordProblem;

pub use check::{check, Verdict};
pub use mutate::{apply_mutation, mutation_sites, Mutation, MutationKind};

pub const FORMAT_VERSION: u32 = 1;

/// Largest element table a finite leaf may carry.
pub const DEFAULT_FINITE_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub p: i64,
    pub e: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub format_version: u32,
    pub group: GroupSpec,
    /// The certified subgroup's generators; must equal the root's.
    pub subject: Vec<String>,
    pub root: Node,
}

/// `[[generator index, exponent], ...]`.
pub type Factors = Vec<(usize, i64)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactoredWord {
    pub word: String,
    pub factors: Factors,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionChild {
    /// Absolute vertex of the child.
    pub vertex: String,
    /// Words of the parent subgroup; their sections generate the child.
    pub witnesses: Vec<FactoredWord>,
    /// Each parent generator as a product of witnesses.
    pub cover: Vec<Factors>,
    pub node: Node,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Node {
    Trivial {
        gens: Vec<String>,
    },
    Full {
        gens: Vec<String>,
    },
    Finite {
        gens: Vec<String>,
        order: u64,
        elements: Vec<String>,
    },
    FiniteIndex {
        gens: Vec<String>,
        index: u64,
        /// Right coset representatives; the first is the empty word.
        cosets: Vec<FactoredWord>,
        /// Each generator of the child over `gens`.
        child_factors: Vec<Factors>,
        child: Box<Node>,
    },
    Section {
        gens: Vec<String>,
        children: Vec<SectionChild>,
    },
}

impl Node {
    pub fn gens(&self) -> &[String] {
        match self {
            Node::Trivial { gens }
            | Node::Full { gens }
            | Node::Finite { gens, .. }
            | Node::FiniteIndex { gens, .. }
            | Node::Section { gens, .. } => gens,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Node::Trivial { .. } => "trivial",
            Node::Full { .. } => "full",
            Node::Finite { .. } => "finite",
            Node::FiniteIndex { .. } => "finite_index",
            Node::Section { .. } => "section",
        }
    }

    /// Number of nodes of each kind, in the order of [`Node::kind_name`]'s
    /// variants.
    pub fn census(&self) -> [usize; 5] {
        let mut out = [0; 5];
        self.count(&mut out);
        out
    }

    fn count(&self, out: &mut [usize; 5]) {
        match self {
            Node::Trivial { .. } => out[0] += 1,
            Node::Full { .. } => out[1] += 1,
            Node::Finite { .. } => out[2] += 1,
            Node::FiniteIndex { child, .. } => {
                out[3] += 1;
                child.count(out);
            }
            Node::Section { children, .. } => {
                out[4] += 1;
                children.iter().for_each(|c| c.node.count(out));
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::FiniteIndex { child, .. } => child.depth(),
            Node::Section { children, .. } => {
                1 + children.iter().map(|c| c.node.depth()).max().unwrap_or(0)
            }
            _ => 0,
        }
    }
}

fn spell(words: &[Word]) -> Vec<String> {
    words.iter().map(Word::to_string).collect()
}

fn factors(f: &Factorization) -> Factors {
    f.factors().to_vec()
}

/// Elements of the subgroup generated by `gens`, in breadth-first order from
/// the identity, or `None` past `cap` elements.
fn closure(group: &GgsGroup, gens: &[Word], cap: usize) -> Option<Vec<Word>> {
    let mut solver = WordProblem::new(group);
    let mut elements = vec![Word::identity(group.p())];
    let mut next = 0;
    while next < elements.len() {
        for s in gens {
            let candidate = &elements[next] * s;
            if !elements.iter().any(|e| solver.equal(e, &candidate)) {
                if elements.len() == cap {
                    return None;
                }
                elements.push(candidate);
            }
        }
        next += 1;
    }
    Some(elements)
}

struct Builder<'g> {
    group: &'g GgsGroup,
    finite_cap: usize,
}

impl Builder<'_> {
    fn node(&self, n: &ReductionNode) -> Result<Node> {
        let gens = spell(n.subgroup.gens());
        match &n.outcome {
            Outcome::Leaf(LeafKind::Trivial) => Ok(Node::Trivial { gens }),
            Outcome::Leaf(LeafKind::Full) => Ok(Node::Full { gens }),
            Outcome::Leaf(LeafKind::Finite) | Outcome::Leaf(LeafKind::Short) => {
                let elements =
                    closure(self.group, n.subgroup.gens(), self.finite_cap).ok_or_else(|| {
                        Error::Precondition(format!(
                            "{} has more than {} elements",
                            n.subgroup, self.finite_cap
                        ))
                    })?;
                Ok(Node::Finite {
                    gens,
                    order: elements.len() as u64,
                    elements: spell(&elements),
                })
            }
            Outcome::Descend(d) => self.descent(n, d, gens),
        }
    }

    fn descent(&self, n: &ReductionNode, d: &Descent, gens: Vec<String>) -> Result<Node> {
        let mut children = Vec::with_capacity(d.branches.len());
        for b in &d.branches {
            children.push(SectionChild {
                vertex: b.node.vertex.to_string(),
                witnesses: b
                    .witnesses
                    .iter()
                    .zip(&b.witness_factors)
                    .map(|(w, f)| FactoredWord {
                        word: w.to_string(),
                        factors: factors(f),
                    })
                    .collect(),
                cover: b.cover.iter().map(factors).collect(),
                node: self.node(&b.node)?,
            });
        }
        let p = self.group.p();
        Ok(match &d.stabilizer {
            None => Node::Section { gens, children },
            Some(stab) => {
                let section = Node::Section {
                    gens: spell(&stab.gens),
                    children,
                };
                let cosets = stab
                    .transversal
                    .iter()
                    .map(|f| FactoredWord {
                        word: f
                            .evaluate(n.subgroup.gens(), p)
                            .expect("transversal over parent generators")
                            .to_string(),
                        factors: factors(f),
                    })
                    .collect::<Vec<_>>();
                Node::FiniteIndex {
                    gens,
                    index: cosets.len() as u64,
                    cosets,
                    child_factors: stab.factorizations.iter().map(factors).collect(),
                    child: Box::new(section),
                }
            }
        })
    }
}

/// Builds a certificate for a finitely generated subgroup of a torsion
/// group.
pub fn certify(h: &SubgroupPresentation) -> Result<Certificate> {
    certify_with(h, DEFAULT_MAX_DEPTH, DEFAULT_FINITE_CAP)
}

pub fn certify_with(
    h: &SubgroupPresentation,
    max_depth: usize,
    finite_cap: usize,
) -> Result<Certificate> {
    let (tree, _) = descend(h, Target::TotalLength1, max_depth)?;
    let group = h.group();
    let builder = Builder { group, finite_cap };
    Ok(Certificate {
        format_version: FORMAT_VERSION,
        group: GroupSpec {
            p: group.p() as i64,
            e: group.defining_vector().iter().map(|&x| x as i64).collect(),
        },
        subject: spell(h.gens()),
        root: builder.node(&tree)?,
    })
}

/// Canonical JSON: sorted keys, two-space indentation, trailing newline.
pub fn serialize(c: &Certificate) -> String {
    let value = serde_json::to_value(c).expect("certificates serialize");
    let mut text = serde_json::to_string_pretty(&value).expect("values serialize");
    text.push('\n');
    text
}

fn byte_offset(text: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (i, l) in text.split(|&b| b == b'\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(text.len());
        }
        offset += l.len() + 1;
    }
    text.len()
}

pub fn deserialize(bytes: &[u8]) -> Result<Certificate> {
    serde_json::from_slice(bytes).map_err(|e| Error::CertificateParse {
        offset: byte_offset(bytes, e.line(), e.column()),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gs3() -> GgsGroup {
        GgsGroup::gupta_sidki(3).unwrap()
    }

    fn sub(words: &[&str]) -> SubgroupPresentation {
        SubgroupPresentation::parse(gs3(), words.iter().copied()).unwrap()
    }

    #[test]
    fn leaf_examples() {
        let c = certify(&sub(&["a"])).unwrap();
        match &c.root {
            Node::Finite {
                order, elements, ..
            } => {
                assert_eq!(*order, 3);
                assert_eq!(elements, &["", "a", "a^2"]);
            }
            other => panic!("expected a finite leaf, got {other:?}"),
        }
        assert!(matches!(
            certify(&sub(&["a", "b"])).unwrap().root,
            Node::Full { .. }
        ));
        assert!(matches!(
            certify(&sub(&[])).unwrap().root,
            Node::Trivial { .. }
        ));
    }

    #[test]
    fn descends_through_sections() {
        let c = certify(&sub(&["a b^2 a b"])).unwrap();
        assert!(c.root.census()[4] >= 1);
        assert_eq!(check(&c), Verdict::Accept);
    }

    #[test]
    fn pivot_with_empty_power() {
        // The section at vertex 1 has pivot a, whose p-th power is empty.
        let c = certify(&sub(&["b^2", "a^2 b a b", "a b^2 a^2 b^2 a b a^2 b^2"])).unwrap();
        assert_eq!(check(&c), Verdict::Accept);
    }

    #[test]
    fn round_trip_is_identical() {
        let c = certify(&sub(&["a b", "b a^2 b"])).unwrap();
        let text = serialize(&c);
        let back = deserialize(text.as_bytes()).unwrap();
        assert_eq!(back, c);
        assert_eq!(serialize(&back), text);
    }

    #[test]
    fn truncated_input_reports_offset() {
        let text = serialize(&certify(&sub(&["a b"])).unwrap());
        let cut = &text.as_bytes()[..text.len() / 2];
        match deserialize(cut) {
            Err(Error::CertificateParse { offset, .. }) => assert!(offset <= cut.len()),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn hand_written_trivial_leaf() {
        let text = r#"{"format_version": 1, "group": {"p": 3, "e": [1, 2]},
                       "subject": [], "root": {"kind": "trivial", "gens": []}}"#;
        assert_eq!(
            check(&deserialize(text.as_bytes()).unwrap()),
            Verdict::Accept
        );
    }
}
