//! Piece alphabets and their concurrency relations.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt;

/// Index of a piece in its structure's alphabet. Ordering of `Piece` values is
/// the alphabet order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Piece(pub(crate) usize);

impl Piece {
    pub const fn new(index: usize) -> Self {
        Piece(index)
    }

    pub const fn index(self) -> usize {
        self.0
    }
}

/// A finite alphabet with a symmetric, reflexive concurrency relation.
///
/// Only pairs of distinct concurrent pieces are stored; reflexivity is
/// implicit. The order in which pieces are declared is the alphabet order
/// used by every canonical form.
#[derive(Clone, PartialEq, Eq)]
pub struct ConcurrencyStructure {
    names: Vec<String>,
    index: HashMap<String, usize>,
    // n*n, diagonal set
    concurrent: Vec<bool>,
}

impl ConcurrencyStructure {
    /// Builds a structure from piece names and pairs of concurrent pieces.
    ///
    /// Duplicate pairs are merged. A pair `{a, a}` is redundant and dropped
    /// with a warning.
    pub fn new<S, P>(pieces: &[S], pairs: &[(P, P)]) -> Result<Self>
    where
        S: AsRef<str>,
        P: AsRef<str>,
    {
        let mut names = Vec::with_capacity(pieces.len());
        let mut index = HashMap::with_capacity(pieces.len());
        for p in pieces {
            let name = p.as_ref().to_string();
            if index.insert(name.clone(), names.len()).is_some() {
                return Err(Error::DuplicatePiece(name));
            }
            names.push(name);
        }
        let n = names.len();
        let mut concurrent = vec![false; n * n];
        for i in 0..n {
            concurrent[i * n + i] = true;
        }
        let mut s = ConcurrencyStructure {
            names,
            index,
            concurrent,
        };
        for (a, b) in pairs {
            let (a, b) = (a.as_ref(), b.as_ref());
            let pa = s.lookup_pair_member(a)?;
            let pb = s.lookup_pair_member(b)?;
            if pa == pb {
                log::warn!("dropping reflexive concurrency pair ({a}, {a})");
                continue;
            }
            s.set_concurrent(pa, pb);
        }
        Ok(s)
    }

    /// Structure on pieces `1..=n` built from 0-based index pairs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let pairs: Vec<(String, String)> = edges
            .iter()
            .map(|&(a, b)| (names[a].clone(), names[b].clone()))
            .collect();
        Self::new(&names, &pairs).expect("indices in range")
    }

    fn lookup_pair_member(&self, name: &str) -> Result<Piece> {
        self.piece(name).ok_or_else(|| Error::UnknownPieceInPair {
            name: name.to_string(),
        })
    }

    fn set_concurrent(&mut self, a: Piece, b: Piece) {
        let n = self.names.len();
        self.concurrent[a.0 * n + b.0] = true;
        self.concurrent[b.0 * n + a.0] = true;
    }

    /// Parses the line-oriented structure format:
    ///
    /// ```text
    /// # comment
    /// piece a
    /// piece b
    /// conc a b
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut pieces: Vec<String> = Vec::new();
        let mut pairs: Vec<(String, String)> = Vec::new();
        let mut seen = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<(usize, &str)> = tokenize(content);
            let Some(&(col, keyword)) = tokens.first() else {
                continue;
            };
            let err = |column: usize, token: &str, message: &str| Error::Parse {
                line,
                column,
                token: token.to_string(),
                message: message.to_string(),
            };
            match keyword {
                "piece" => {
                    if tokens.len() != 2 {
                        let (c, t) = tokens.get(2).copied().unwrap_or((col, keyword));
                        return Err(err(c, t, "expected `piece <name>`"));
                    }
                    let (c, name) = tokens[1];
                    if seen.insert(name.to_string(), ()).is_some() {
                        return Err(err(c, name, "duplicate piece"));
                    }
                    pieces.push(name.to_string());
                }
                "conc" => {
                    if tokens.len() != 3 {
                        let (c, t) = tokens.get(3).copied().unwrap_or((col, keyword));
                        return Err(err(c, t, "expected `conc <name> <name>`"));
                    }
                    for &(c, name) in &tokens[1..] {
                        if !seen.contains_key(name) {
                            return Err(err(c, name, "unknown piece"));
                        }
                    }
                    pairs.push((tokens[1].1.to_string(), tokens[2].1.to_string()));
                }
                other => return Err(err(col, other, "unknown directive")),
            }
        }
        Self::new(&pieces, &pairs)
    }

    /// Serializes back to the text format accepted by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for name in &self.names {
            out.push_str("piece ");
            out.push_str(name);
            out.push('\n');
        }
        for (a, b) in self.concurrent_pairs() {
            out.push_str(&format!("conc {} {}\n", self.name(a), self.name(b)));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn pieces(&self) -> impl Iterator<Item = Piece> {
        (0..self.names.len()).map(Piece)
    }

    pub fn piece(&self, name: &str) -> Option<Piece> {
        self.index.get(name).copied().map(Piece)
    }

    pub fn name(&self, p: Piece) -> &str {
        &self.names[p.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The concurrency relation (reflexive).
    #[inline]
    pub fn concurrent(&self, a: Piece, b: Piece) -> bool {
        self.concurrent[a.0 * self.names.len() + b.0]
    }

    /// Edge of the concurrency graph: distinct and concurrent.
    #[inline]
    pub fn adjacent(&self, a: Piece, b: Piece) -> bool {
        a != b && self.concurrent(a, b)
    }

    /// Distinct pieces that commute in the associated commutation monoid.
    #[inline]
    pub fn commute(&self, a: Piece, b: Piece) -> bool {
        !self.concurrent(a, b)
    }

    pub fn neighbours(&self, p: Piece) -> impl Iterator<Item = Piece> + '_ {
        self.pieces().filter(move |&q| self.adjacent(p, q))
    }

    pub fn valency(&self, p: Piece) -> usize {
        self.neighbours(p).count()
    }

    /// Edges of the concurrency graph as ordered pairs `(a, b)` with `a < b`.
    pub fn concurrent_pairs(&self) -> Vec<(Piece, Piece)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if self.concurrent[a * n + b] {
                    out.push((Piece(a), Piece(b)));
                }
            }
        }
        out
    }

    /// Parses a whitespace-separated word of piece names.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Piece>> {
        text.split_whitespace()
            .enumerate()
            .map(|(i, tok)| {
                self.piece(tok).ok_or_else(|| Error::UnknownLetter {
                    name: tok.to_string(),
                    position: i + 1,
                })
            })
            .collect()
    }

    pub fn format_word(&self, word: &[Piece]) -> String {
        word.iter()
            .map(|&p| self.name(p))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// The full substructure on `subset`, keeping the relative alphabet order.
    pub fn induced(&self, subset: &[Piece]) -> ConcurrencyStructure {
        let mut subset = subset.to_vec();
        subset.sort();
        subset.dedup();
        let names: Vec<&str> = subset.iter().map(|&p| self.name(p)).collect();
        let mut pairs = Vec::new();
        for (i, &a) in subset.iter().enumerate() {
            for &b in &subset[i + 1..] {
                if self.adjacent(a, b) {
                    pairs.push((self.name(a), self.name(b)));
                }
            }
        }
        ConcurrencyStructure::new(&names, &pairs).expect("induced from a valid structure")
    }

    /// Graphviz rendering of the concurrency graph.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph concurrency {\n");
        for name in &self.names {
            out.push_str(&format!("  \"{}\";\n", escape(name)));
        }
        for (a, b) in self.concurrent_pairs() {
            out.push_str(&format!(
                "  \"{}\" -- \"{}\";\n",
                escape(self.name(a)),
                escape(self.name(b))
            ));
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

// (1-based column, token)
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

impl fmt::Debug for ConcurrencyStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .concurrent_pairs()
            .into_iter()
            .map(|(a, b)| format!("{}-{}", self.name(a), self.name(b)))
            .collect();
        f.debug_struct("ConcurrencyStructure")
            .field("pieces", &self.names)
            .field("edges", &edges)
            .finish()
    }
}
