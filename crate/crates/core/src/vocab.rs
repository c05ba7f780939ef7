//! Token vocabulary: structural node indices, special tokens, the twelve
//! digit tokens, and dataset-specific semantic attribute tokens.
//!
//! Ids are assigned by class (structural, special, digit, semantic) and
//! lexicographically within the semantic class, so the same corpus always
//! produces the same file.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::AttributedGraph;

pub type TokenId = u32;

pub const DIGIT_TOKENS: [&str; 12] = [
    "<->", "<.>", "<0>", "<1>", "<2>", "<3>", "<4>", "<5>", "<6>", "<7>", "<8>", "<9>",
];

/// Value field used by the header token of a digit-encoded attribute; the
/// actual value follows as digit tokens.
pub const DIGIT_HEADER_VALUE: i64 = 1;

#[derive(Error, Debug)]
pub enum VocabError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("vocab line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenClass {
    Structural,
    Special,
    Digit,
    Semantic,
}

impl fmt::Display for TokenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenClass::Structural => "structural",
            TokenClass::Special => "special",
            TokenClass::Digit => "digit",
            TokenClass::Semantic => "semantic",
        })
    }
}

impl FromStr for TokenClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "structural" => Ok(Self::Structural),
            "special" => Ok(Self::Special),
            "digit" => Ok(Self::Digit),
            "semantic" => Ok(Self::Semantic),
            other => Err(format!("unknown token class {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Special {
    Pad,
    EdgeJump,
    Gsum,
    Eos,
    Mask,
    Forward,
    Backward,
}

impl Special {
    pub const ALL: [Special; 7] = [
        Special::Pad,
        Special::EdgeJump,
        Special::Gsum,
        Special::Eos,
        Special::Mask,
        Special::Forward,
        Special::Backward,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Special::Pad => "[p]",
            Special::EdgeJump => "[EDGE_JUMP]",
            Special::Gsum => "[GSUM]",
            Special::Eos => "<eos>",
            Special::Mask => "<mask>",
            Special::Forward => "[→]",
            Special::Backward => "[←]",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrKind {
    Node,
    Edge,
}

impl AttrKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttrKind::Node => "node",
            AttrKind::Edge => "edge",
        }
    }
}

/// How one attribute dimension is spelled in tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrEncoding {
    /// Header token `TAG#kind#dim#1` followed by the value's digit tokens.
    #[default]
    Digits,
    /// A single token `TAG#kind#dim#value`.
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttrDim {
    pub default: i64,
    #[serde(default)]
    pub encoding: AttrEncoding,
}

/// Attribute layout shared by every graph of a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AttrSchema {
    #[serde(default)]
    pub directed: bool,
    #[serde(default)]
    pub node: Vec<AttrDim>,
    #[serde(default)]
    pub edge: Vec<AttrDim>,
}

impl AttrSchema {
    /// Schema mirroring `g`'s widths and defaults with one encoding everywhere.
    pub fn for_graph(g: &AttributedGraph, encoding: AttrEncoding) -> Self {
        let dims = |defaults: &[i64]| {
            defaults
                .iter()
                .map(|&default| AttrDim { default, encoding })
                .collect()
        };
        Self {
            directed: g.is_directed(),
            node: dims(g.node_defaults()),
            edge: dims(g.edge_defaults()),
        }
    }

    pub fn dims(&self, kind: AttrKind) -> &[AttrDim] {
        match kind {
            AttrKind::Node => &self.node,
            AttrKind::Edge => &self.edge,
        }
    }

    pub fn defaults(&self, kind: AttrKind) -> Vec<i64> {
        self.dims(kind).iter().map(|d| d.default).collect()
    }

    pub fn matches(&self, g: &AttributedGraph) -> bool {
        self.directed == g.is_directed()
            && self.defaults(AttrKind::Node) == g.node_defaults()
            && self.defaults(AttrKind::Edge) == g.edge_defaults()
    }
}

pub fn semantic_token(tag: &str, kind: AttrKind, dim: usize, value: i64) -> String {
    format!("{tag}#{}#{dim}#{value}", kind.as_str())
}

/// Parsed form of a `TAG#kind#dim#value` token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemanticToken {
    pub kind: AttrKind,
    pub dim: usize,
    pub value: i64,
}

impl SemanticToken {
    pub fn parse(token: &str) -> Option<Self> {
        let mut parts = token.rsplitn(4, '#');
        let value = parts.next()?.parse().ok()?;
        let dim = parts.next()?.parse().ok()?;
        let kind = match parts.next()? {
            "node" => AttrKind::Node,
            "edge" => AttrKind::Edge,
            _ => return None,
        };
        parts.next()?;
        Some(Self { kind, dim, value })
    }
}

/// Digit tokens for an integer: optional `<->` then decimal digits.
pub fn digit_tokens(value: i64) -> Vec<&'static str> {
    let mut out = Vec::new();
    if value < 0 {
        out.push(DIGIT_TOKENS[0]);
    }
    for b in value.unsigned_abs().to_string().bytes() {
        out.push(DIGIT_TOKENS[(b - b'0') as usize + 2]);
    }
    out
}

/// Digit tokens for a decimal literal such as `"3.14"` or `"-0.5"`.
pub fn decimal_tokens(literal: &str) -> Option<Vec<&'static str>> {
    let body = literal.strip_prefix('-');
    let (neg, body) = match body {
        Some(rest) => (true, rest),
        None => (false, literal),
    };
    let mut parts = body.splitn(2, '.');
    let int = parts.next()?;
    let frac = parts.next();
    let valid = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !valid(int) || frac.is_some_and(|f| !valid(f)) {
        return None;
    }
    let mut out = Vec::new();
    if neg {
        out.push(DIGIT_TOKENS[0]);
    }
    for b in int.bytes() {
        out.push(DIGIT_TOKENS[(b - b'0') as usize + 2]);
    }
    if let Some(f) = frac {
        out.push(DIGIT_TOKENS[1]);
        for b in f.bytes() {
            out.push(DIGIT_TOKENS[(b - b'0') as usize + 2]);
        }
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    classes: Vec<TokenClass>,
    index: HashMap<String, TokenId>,
    semantic: HashMap<TokenId, SemanticToken>,
    modulus: u32,
}

impl Vocabulary {
    /// Vocabulary with structural, special and digit tokens only.
    pub fn base(modulus: u32) -> Self {
        VocabBuilder::new(modulus).build()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Number of structural (node index) tokens.
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn id(&self, token: &str) -> Option<TokenId> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: TokenId) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn class(&self, id: TokenId) -> Option<TokenClass> {
        self.classes.get(id as usize).copied()
    }

    pub fn special(&self, s: Special) -> TokenId {
        self.index[s.as_str()]
    }

    pub fn special_kind(&self, id: TokenId) -> Option<Special> {
        (self.class(id)? == TokenClass::Special)
            .then(|| Special::ALL.into_iter().find(|s| self.special(*s) == id))
            .flatten()
    }

    /// Structural token for node index `i` (ids coincide with indices).
    pub fn structural(&self, index: u32) -> Option<TokenId> {
        (index < self.modulus).then_some(index)
    }

    /// Digit value 0..=9 for a digit token, `None` for sign/point and others.
    pub fn digit_value(&self, id: TokenId) -> Option<u8> {
        let tok = self.token(id)?;
        let pos = DIGIT_TOKENS.iter().position(|d| *d == tok)?;
        (pos >= 2).then(|| (pos - 2) as u8)
    }

    pub fn digit(&self, token: &str) -> TokenId {
        self.index[token]
    }

    pub fn semantic(&self, id: TokenId) -> Option<SemanticToken> {
        self.semantic.get(&id).copied()
    }

    pub fn tokens(&self) -> impl Iterator<Item = (TokenId, &str, TokenClass)> {
        self.tokens
            .iter()
            .zip(&self.classes)
            .enumerate()
            .map(|(i, (t, c))| (i as TokenId, t.as_str(), *c))
    }

    /// "token<TAB>id<TAB>class" lines sorted by id.
    pub fn write_tsv(&self, mut w: impl Write) -> std::io::Result<()> {
        for (id, tok, class) in self.tokens() {
            writeln!(w, "{tok}\t{id}\t{class}")?;
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("tokens are UTF-8")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), VocabError> {
        fs::write(path, self.to_tsv())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, VocabError> {
        Self::from_tsv(&fs::read_to_string(path)?)
    }

    pub fn from_tsv(text: &str) -> Result<Self, VocabError> {
        let mut tokens = Vec::new();
        let mut classes = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let err = |msg: String| VocabError::Parse { line: i + 1, msg };
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(err(format!("expected 3 fields, got {}", fields.len())));
            }
            let id: usize = fields[1].parse().map_err(|e| err(format!("bad id: {e}")))?;
            if id != tokens.len() {
                return Err(err(format!("ids must be dense and sorted, expected {}", tokens.len())));
            }
            tokens.push(fields[0].to_string());
            classes.push(fields[2].parse().map_err(err)?);
        }
        let modulus = classes
            .iter()
            .take_while(|c| **c == TokenClass::Structural)
            .count() as u32;
        let vocab = Self::assemble(tokens, classes, modulus);
        for s in Special::ALL {
            if vocab.id(s.as_str()).is_none() {
                return Err(VocabError::Parse {
                    line: 0,
                    msg: format!("missing special token {}", s.as_str()),
                });
            }
        }
        for d in DIGIT_TOKENS {
            if vocab.id(d).is_none() {
                return Err(VocabError::Parse {
                    line: 0,
                    msg: format!("missing digit token {d}"),
                });
            }
        }
        Ok(vocab)
    }

    fn assemble(tokens: Vec<String>, classes: Vec<TokenClass>, modulus: u32) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as TokenId))
            .collect();
        let semantic = tokens
            .iter()
            .zip(&classes)
            .enumerate()
            .filter(|(_, (_, c))| **c == TokenClass::Semantic)
            .filter_map(|(i, (t, _))| SemanticToken::parse(t).map(|s| (i as TokenId, s)))
            .collect();
        Self {
            tokens,
            classes,
            index,
            semantic,
            modulus,
        }
    }
}

/// Collects semantic tokens observed in a corpus.
#[derive(Debug, Clone)]
pub struct VocabBuilder {
    modulus: u32,
    semantic: BTreeSet<String>,
}

impl VocabBuilder {
    pub fn new(modulus: u32) -> Self {
        Self {
            modulus,
            semantic: BTreeSet::new(),
        }
    }

    /// Adds one token per non-default attribute value in `g`.
    pub fn observe(&mut self, g: &AttributedGraph, tag: &str, schema: &AttrSchema) -> &mut Self {
        let mut visit = |kind: AttrKind, row: &[i64]| {
            for (dim, (&value, spec)) in row.iter().zip(schema.dims(kind)).enumerate() {
                if value == spec.default {
                    continue;
                }
                let v = match spec.encoding {
                    AttrEncoding::Digits => DIGIT_HEADER_VALUE,
                    AttrEncoding::Discrete => value,
                };
                self.semantic.insert(semantic_token(tag, kind, dim, v));
            }
        };
        for v in 0..g.num_nodes() {
            visit(AttrKind::Node, g.node_attrs(v as u32));
        }
        for e in 0..g.num_edges() {
            visit(AttrKind::Edge, g.edge_attrs(e));
        }
        self
    }

    pub fn add_token(&mut self, token: impl Into<String>) -> &mut Self {
        self.semantic.insert(token.into());
        self
    }

    pub fn build(&self) -> Vocabulary {
        let mut tokens: Vec<String> = (0..self.modulus).map(|i| i.to_string()).collect();
        let mut classes = vec![TokenClass::Structural; tokens.len()];
        for s in Special::ALL {
            tokens.push(s.as_str().to_string());
            classes.push(TokenClass::Special);
        }
        for d in DIGIT_TOKENS {
            tokens.push(d.to_string());
            classes.push(TokenClass::Digit);
        }
        for s in &self.semantic {
            tokens.push(s.clone());
            classes.push(TokenClass::Semantic);
        }
        Vocabulary::assemble(tokens, classes, self.modulus)
    }
}

/// Builds a vocabulary over every graph in `corpus`.
pub fn build_vocab<'a>(
    corpus: impl IntoIterator<Item = &'a AttributedGraph>,
    tag: &str,
    modulus: u32,
    schema: &AttrSchema,
) -> Vocabulary {
    let mut b = VocabBuilder::new(modulus);
    for g in corpus {
        b.observe(g, tag, schema);
    }
    b.build()
}
