//! Certificate verification.
//!
//! Only the word kernel is shared with the rest of the crate. Sections,
//! triviality and the abelianization rank are recomputed here by separate
//! routines: sections follow the cocycle rule syllable by syllable from the
//! right, where the builder scans from the left.

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{Certificate, FactoredWord, Factors, Node, SectionChild, FORMAT_VERSION};
use crate::word::{Generator, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject { path: String, reason: String },
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        *self == Verdict::Accept
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accept => f.write_str("accept"),
            Verdict::Reject { path, reason } => write!(f, "reject at {path}: {reason}"),
        }
    }
}

type Check<T> = std::result::Result<T, String>;

struct Ambient {
    p: u32,
    e: Vec<u32>,
    memo: HashMap<Word, bool>,
}

fn is_prime(n: i64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

impl Ambient {
    fn new(p: i64, e: &[i64]) -> Check<Self> {
        if p < 3 || !is_prime(p) {
            return Err(format!("degree {p} is not an odd prime"));
        }
        if e.len() as i64 != p - 1 {
            return Err(format!(
                "defining vector has {} entries, expected {}",
                e.len(),
                p - 1
            ));
        }
        let e: Vec<u32> = e.iter().map(|x| x.rem_euclid(p) as u32).collect();
        if e.iter().all(|&x| x == 0) {
            return Err("defining vector is zero".to_string());
        }
        if e.iter().map(|&x| x as u64).sum::<u64>() % p as u64 != 0 {
            return Err("group is not torsion".to_string());
        }
        Ok(Ambient {
            p: p as u32,
            e,
            memo: HashMap::new(),
        })
    }

    fn parse(&self, text: &str) -> Check<Word> {
        Word::parse(self.p, text).map_err(|e| format!("bad word {text:?}: {e}"))
    }

    fn parse_all(&self, texts: &[String]) -> Check<Vec<Word>> {
        texts.iter().map(|t| self.parse(t)).collect()
    }

    fn alpha(&self, w: &Word) -> u32 {
        w.exponent_sums().0
    }

    /// `phi_u(w)` via `phi_u(gh) = phi_{h.u}(g) phi_u(h)`, reading `w` from
    /// the right.
    fn section(&self, w: &Word, u: u32) -> Word {
        let p = self.p;
        let mut point = u - 1;
        let mut parts: Vec<(Generator, i64)> = Vec::new();
        for s in w.syllables().iter().rev() {
            match s.gen {
                Generator::A => point = (point + s.exp) % p,
                Generator::B => {
                    if point == p - 1 {
                        parts.push((Generator::B, s.exp as i64));
                    } else {
                        let e = self.e[point as usize] as i64;
                        parts.push((Generator::A, e * s.exp as i64));
                    }
                }
            }
        }
        let mut out = Word::identity(p);
        for (g, e) in parts.into_iter().rev() {
            out.push(g, e);
        }
        out
    }

    fn trivial(&mut self, w: &Word) -> bool {
        if w.is_identity() {
            return true;
        }
        if self.alpha(w) != 0 || w.syllables().len() == 1 {
            return false;
        }
        if let Some(&t) = self.memo.get(w) {
            return t;
        }
        let t = (1..=self.p).all(|u| {
            let s = self.section(w, u);
            self.trivial(&s)
        });
        self.memo.insert(w.clone(), t);
        t
    }

    fn same(&mut self, g: &Word, h: &Word) -> bool {
        g == h || self.trivial(&(g * &h.inverse()))
    }

    fn product(&self, gens: &[Word], factors: &Factors) -> Check<Word> {
        let mut out = Word::identity(self.p);
        for &(i, e) in factors {
            let g = gens.get(i).ok_or_else(|| {
                format!("factor index {i} out of range ({} generators)", gens.len())
            })?;
            out = &out * &g.pow(e);
        }
        Ok(out)
    }

    fn factored(&self, gens: &[Word], item: &FactoredWord, what: &str) -> Check<Word> {
        let w = self.parse(&item.word)?;
        let product = self.product(gens, &item.factors)?;
        if product != w {
            return Err(format!(
                "{what} {} is not the product of its factors ({product})",
                item.word
            ));
        }
        Ok(w)
    }

    /// Whether the exponent-sum images span `F_p^2`.
    fn spans_abelianization(&self, gens: &[Word]) -> bool {
        let p = self.p as i64;
        let images: Vec<(i64, i64)> = gens
            .iter()
            .map(|g| {
                let (mut x, mut y) = (0i64, 0i64);
                for s in g.syllables() {
                    match s.gen {
                        Generator::A => x += s.exp as i64,
                        Generator::B => y += s.exp as i64,
                    }
                }
                (x.rem_euclid(p), y.rem_euclid(p))
            })
            .collect();
        images.iter().enumerate().any(|(i, &(a, b))| {
            images[i + 1..]
                .iter()
                .any(|&(c, d)| (a * d - b * c).rem_euclid(p) != 0)
        })
    }
}

fn pruned(words: Vec<Word>) -> Vec<Word> {
    let mut seen = HashSet::new();
    words
        .into_iter()
        .filter(|w| !w.is_identity() && seen.insert(w.clone()))
        .collect()
}

struct Checker {
    ambient: Ambient,
}

impl Checker {
    fn node(
        &mut self,
        node: &Node,
        vertex: &str,
        expected: &[Word],
        path: &str,
    ) -> Result<(), (String, String)> {
        let at = |reason: String| (path.to_string(), reason);
        let gens = self.ambient.parse_all(node.gens()).map_err(at)?;
        if gens != expected {
            return Err(at(format!(
                "generators {:?} differ from those derived above",
                node.gens()
            )));
        }
        match node {
            Node::Trivial { .. } => {
                if let Some(g) = gens.iter().find(|g| !self.ambient.trivial(g)) {
                    return Err(at(format!("generator {g} is not trivial")));
                }
            }
            Node::Full { .. } => {
                if !self.ambient.spans_abelianization(&gens) {
                    return Err(at("generators do not span the abelianization".to_string()));
                }
            }
            Node::Finite {
                order, elements, ..
            } => self.finite(&gens, *order, elements).map_err(at)?,
            Node::FiniteIndex {
                index,
                cosets,
                child_factors,
                child,
                ..
            } => {
                let k = self
                    .finite_index(&gens, *index, cosets, child_factors, child.gens())
                    .map_err(at)?;
                self.node(child, vertex, &k, &format!("{path}/child"))?;
            }
            Node::Section { children, .. } => {
                let derived = self.section(&gens, vertex, children).map_err(at)?;
                for (i, (c, expected)) in children.iter().zip(derived).enumerate() {
                    self.node(
                        &c.node,
                        &c.vertex,
                        &expected,
                        &format!("{path}/children[{i}]"),
                    )?;
                }
            }
        }
        Ok(())
    }

    fn finite(&mut self, gens: &[Word], order: u64, elements: &[String]) -> Check<()> {
        let table = self.ambient.parse_all(elements)?;
        if table.len() as u64 != order {
            return Err(format!("order {order} but {} elements listed", table.len()));
        }
        if table.first().is_none_or(|e| !e.is_identity()) {
            return Err("element table must start with the identity".to_string());
        }
        let find = |amb: &mut Ambient, w: &Word| table.iter().position(|t| amb.same(t, w));
        for i in 0..table.len() {
            for j in 0..i {
                if self.ambient.same(&table[i], &table[j]) {
                    return Err(format!("elements {} and {} are equal", table[j], table[i]));
                }
            }
        }
        for g in gens {
            if find(&mut self.ambient, g).is_none() {
                return Err(format!("generator {g} missing from the table"));
            }
        }
        let mut reached = vec![false; table.len()];
        reached[0] = true;
        let mut queue = vec![0usize];
        let mut closed = true;
        while let Some(i) = queue.pop() {
            for g in gens {
                match find(&mut self.ambient, &(&table[i] * g)) {
                    Some(j) if !reached[j] => {
                        reached[j] = true;
                        queue.push(j);
                    }
                    Some(_) => {}
                    None => closed = false,
                }
            }
        }
        if !closed {
            return Err("table is not closed under the generators".to_string());
        }
        if let Some(i) = reached.iter().position(|&r| !r) {
            return Err(format!("element {} is not generated", table[i]));
        }
        Ok(())
    }

    /// Verifies `[H : K] = index` and returns `K`'s generators.
    fn finite_index(
        &mut self,
        gens: &[Word],
        index: u64,
        cosets: &[FactoredWord],
        child_factors: &[Factors],
        child_gens: &[String],
    ) -> Check<Vec<Word>> {
        let amb = &self.ambient;
        if index == 0 || index != cosets.len() as u64 {
            return Err(format!(
                "index {index} but {} coset representatives",
                cosets.len()
            ));
        }
        let reps = cosets
            .iter()
            .map(|c| amb.factored(gens, c, "coset representative"))
            .collect::<Check<Vec<_>>>()?;
        if !reps[0].is_identity() {
            return Err("first coset representative must be the empty word".to_string());
        }
        let k = amb.parse_all(child_gens)?;
        if child_factors.len() != k.len() {
            return Err(format!(
                "{} child factorizations for {} child generators",
                child_factors.len(),
                k.len()
            ));
        }
        for (w, f) in k.iter().zip(child_factors) {
            if amb.product(gens, f)? != *w {
                return Err(format!(
                    "child generator {w} is not the product of its factors"
                ));
            }
            if amb.alpha(w) != 0 {
                return Err(format!("child generator {w} moves the first level"));
            }
        }
        let mut by_alpha = HashMap::new();
        for (i, t) in reps.iter().enumerate() {
            if by_alpha.insert(amb.alpha(t), i).is_some() {
                return Err(format!(
                    "coset representative {t} repeats a first-level action"
                ));
            }
        }
        let k_set: HashSet<&Word> = k.iter().collect();
        for t in &reps {
            for s in gens {
                let ts = t * s;
                let j = *by_alpha
                    .get(&amb.alpha(&ts))
                    .ok_or_else(|| format!("no coset representative for {ts}"))?;
                let r = &ts * &reps[j].inverse();
                if !r.is_identity() && !k_set.contains(&r) {
                    return Err(format!("Schreier generator {r} is not a child generator"));
                }
            }
        }
        Ok(k)
    }

    /// Verifies a section step and returns each child's derived generators.
    fn section(
        &mut self,
        gens: &[Word],
        vertex: &str,
        children: &[SectionChild],
    ) -> Check<Vec<Vec<Word>>> {
        let amb = &self.ambient;
        let p = amb.p;
        if let Some(g) = gens.iter().find(|g| amb.alpha(g) != 0) {
            return Err(format!("generator {g} moves the first level"));
        }
        if children.len() != p as usize {
            return Err(format!("{} children, expected {p}", children.len()));
        }
        let sep = if p > 9 && !vertex.is_empty() { "." } else { "" };
        let mut out = Vec::with_capacity(children.len());
        for (i, c) in children.iter().enumerate() {
            let u = i as u32 + 1;
            let want = format!("{vertex}{sep}{u}");
            if c.vertex != want {
                return Err(format!(
                    "child {i} is at vertex {:?}, expected {want:?}",
                    c.vertex
                ));
            }
            let witnesses = c
                .witnesses
                .iter()
                .map(|w| amb.factored(gens, w, "witness"))
                .collect::<Check<Vec<_>>>()?;
            if c.cover.len() != gens.len() {
                return Err(format!(
                    "child {want}: cover has {} entries for {} generators",
                    c.cover.len(),
                    gens.len()
                ));
            }
            for (g, f) in gens.iter().zip(&c.cover) {
                if amb.product(&witnesses, f)? != *g {
                    return Err(format!(
                        "child {want}: generator {g} is not covered by the witnesses"
                    ));
                }
            }
            out.push(pruned(
                witnesses.iter().map(|w| amb.section(w, u)).collect(),
            ));
        }
        Ok(out)
    }
}

/// Re-verifies every obligation of the certificate.
pub fn check(c: &Certificate) -> Verdict {
    let reject = |path: &str, reason: String| Verdict::Reject {
        path: path.to_string(),
        reason,
    };
    if c.format_version != FORMAT_VERSION {
        return reject(
            "format_version",
            format!("unsupported version {}", c.format_version),
        );
    }
    let ambient = match Ambient::new(c.group.p, &c.group.e) {
        Ok(a) => a,
        Err(reason) => return reject("group", reason),
    };
    let subject = match ambient.parse_all(&c.subject) {
        Ok(s) => s,
        Err(reason) => return reject("subject", reason),
    };
    let mut checker = Checker { ambient };
    match checker.node(&c.root, "", &subject, "root") {
        Ok(()) => Verdict::Accept,
        Err((path, reason)) => Verdict::Reject { path, reason },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{certify, GroupSpec};
    use crate::group::GgsGroup;
    use crate::subgroup::SubgroupPresentation;

    fn gs3() -> GgsGroup {
        GgsGroup::gupta_sidki(3).unwrap()
    }

    fn cert(words: &[&str]) -> Certificate {
        certify(&SubgroupPresentation::parse(gs3(), words.iter().copied()).unwrap()).unwrap()
    }

    #[test]
    fn sections_agree_with_the_scan() {
        let g = gs3();
        let amb = Ambient::new(3, &[1, 2]).unwrap();
        for text in ["a b^2 a b", "b a b a^2", "a^2 b a b^2 a b", "b"] {
            let w = g.parse_word(text).unwrap();
            for u in 1..=3 {
                assert_eq!(
                    amb.section(&w, u),
                    g.first_level_section(&w, u),
                    "{text} at {u}"
                );
            }
        }
    }

    #[test]
    fn corrupted_order_rejected() {
        let mut c = cert(&["a"]);
        if let Node::Finite { order, .. } = &mut c.root {
            *order = 9;
        }
        assert!(matches!(check(&c), Verdict::Reject { path, .. } if path == "root"));
    }

    #[test]
    fn replaced_section_generator_rejected() {
        let mut c = cert(&["a b a^2"]);
        let Node::Section { children, .. } = &mut c.root else {
            panic!("expected a section step at the root");
        };
        let gens = match &mut children[0].node {
            Node::Trivial { gens } | Node::Full { gens } | Node::Finite { gens, .. } => gens,
            Node::FiniteIndex { gens, .. } | Node::Section { gens, .. } => gens,
        };
        gens[0] = "a^2 b".to_string();
        match check(&c) {
            Verdict::Reject { path, reason } => {
                assert_eq!(path, "root/children[0]");
                assert!(reason.contains("differ"), "{reason}");
            }
            Verdict::Accept => panic!("accepted a wrong section"),
        }
    }

    #[test]
    fn subject_must_match_root() {
        let mut c = cert(&["a b"]);
        c.subject = vec!["a".to_string()];
        assert!(!check(&c).is_accept());
    }

    #[test]
    fn non_torsion_group_rejected() {
        let c = Certificate {
            format_version: 1,
            group: GroupSpec {
                p: 3,
                e: vec![1, 1],
            },
            subject: vec![],
            root: Node::Trivial { gens: vec![] },
        };
        assert!(matches!(check(&c), Verdict::Reject { path, .. } if path == "group"));
    }

    #[test]
    fn out_of_range_factor_rejected() {
        let mut c = cert(&["a b"]);
        let Node::FiniteIndex { child_factors, .. } = &mut c.root else {
            panic!("expected a finite-index step at the root");
        };
        child_factors[0] = vec![(17, 1)];
        assert!(!check(&c).is_accept());
    }
}
