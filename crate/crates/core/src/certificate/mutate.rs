//! Single-field corruptions of certificates, for soundness testing.

use serde_json::Value;

use super::Certificate;
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MutationKind {
    /// Changes the last letter of a vertex.
    VertexFlip,
    /// Changes the exponent of one syllable of one word.
    WordExponent,
    IndexChange,
    OrderChange,
    /// Swaps two neighbouring children of a section step.
    ChildSwap,
}

/// A mutation site: a JSON pointer into the serialized certificate, plus a
/// syllable or child position where relevant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mutation {
    pub kind: MutationKind,
    pub pointer: String,
    pub position: usize,
}

const WORD_LISTS: [&str; 3] = ["gens", "elements", "subject"];

fn word_sites(pointer: String, text: &str, p: u32, out: &mut Vec<Mutation>) {
    if let Ok(w) = Word::parse(p, text) {
        for position in 0..w.syllables().len() {
            out.push(Mutation {
                kind: MutationKind::WordExponent,
                pointer: pointer.clone(),
                position,
            });
        }
    }
}

fn walk(value: &Value, pointer: &str, p: u32, out: &mut Vec<Mutation>) {
    match value {
        Value::Object(map) => {
            for (key, child) in map {
                let here = format!("{pointer}/{key}");
                match (key.as_str(), child) {
                    ("vertex", Value::String(s)) if !s.is_empty() => out.push(Mutation {
                        kind: MutationKind::VertexFlip,
                        pointer: here,
                        position: 0,
                    }),
                    ("word", Value::String(s)) => word_sites(here, s, p, out),
                    ("index", Value::Number(_)) => out.push(Mutation {
                        kind: MutationKind::IndexChange,
                        pointer: here,
                        position: 0,
                    }),
                    ("order", Value::Number(_)) => out.push(Mutation {
                        kind: MutationKind::OrderChange,
                        pointer: here,
                        position: 0,
                    }),
                    (k, Value::Array(items)) if WORD_LISTS.contains(&k) => {
                        for (i, item) in items.iter().enumerate() {
                            if let Value::String(s) = item {
                                word_sites(format!("{here}/{i}"), s, p, out);
                            }
                        }
                    }
                    ("children", Value::Array(items)) => {
                        for i in 0..items.len().saturating_sub(1) {
                            out.push(Mutation {
                                kind: MutationKind::ChildSwap,
                                pointer: here.clone(),
                                position: i,
                            });
                        }
                        walk(child, &here, p, out);
                    }
                    _ => walk(child, &here, p, out),
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                walk(item, &format!("{pointer}/{i}"), p, out);
            }
        }
        _ => {}
    }
}

/// Every single-field mutation applicable to `c`, in document order.
pub fn mutation_sites(c: &Certificate) -> Vec<Mutation> {
    let value = serde_json::to_value(c).expect("certificates serialize");
    let mut out = Vec::new();
    walk(&value, "", c.group.p.max(2) as u32, &mut out);
    out
}

fn bump(exp: u32, p: u32) -> u32 {
    if exp + 1 < p {
        exp + 1
    } else {
        1
    }
}

/// Applies one mutation; `None` if the site does not exist in `c`.
pub fn apply_mutation(c: &Certificate, m: &Mutation) -> Option<Certificate> {
    let p = c.group.p.max(2) as u32;
    let mut value = serde_json::to_value(c).ok()?;
    let target = value.pointer_mut(&m.pointer)?;
    match m.kind {
        MutationKind::VertexFlip => {
            let text = target.as_str()?;
            let sep = if p > 9 { "." } else { "" };
            let mut letters: Vec<u32> = if p > 9 {
                text.split('.')
                    .map(|t| t.parse().ok())
                    .collect::<Option<_>>()?
            } else {
                text.chars()
                    .map(|ch| ch.to_digit(10))
                    .collect::<Option<_>>()?
            };
            let last = letters.last_mut()?;
            *last = *last % p + 1;
            let parts: Vec<String> = letters.iter().map(u32::to_string).collect();
            *target = Value::String(parts.join(sep));
        }
        MutationKind::WordExponent => {
            let w = Word::parse(p, target.as_str()?).ok()?;
            let syllables = w.syllables();
            syllables.get(m.position)?;
            let changed = Word::from_powers(
                p,
                syllables.iter().enumerate().map(|(i, s)| {
                    let exp = if i == m.position {
                        bump(s.exp, p)
                    } else {
                        s.exp
                    };
                    (s.gen, exp as i64)
                }),
            );
            *target = Value::String(changed.to_string());
        }
        MutationKind::IndexChange => {
            *target = Value::from(target.as_u64()? + 1);
        }
        MutationKind::OrderChange => {
            let order = target.as_u64()?;
            *target = Value::from(if order == 0 { 1 } else { order * p as u64 });
        }
        MutationKind::ChildSwap => {
            let items = target.as_array_mut()?;
            if m.position + 1 >= items.len() {
                return None;
            }
            items.swap(m.position, m.position + 1);
        }
    }
    serde_json::from_value(value).ok()
}
