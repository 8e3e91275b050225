//! Equivalent encodings of one compact-code class.
//!
//! A class of compact `t`-ary prefix codes (codes meeting the Kraft equality
//! with equality) can be described by
//!
//! * the sorted code-word lengths ([`UnitFractionExponents`]),
//! * the number of leaves per level ([`HuffmanSequence`], the pivot encoding),
//! * the number of inner vertices per level ([`BoundedDegreeSequence`]),
//! * a binary word of zero-runs ([`ProperWord`]),
//! * the level profile of the canonical tree ([`CanonicalTree`]),
//! * or the canonical code itself ([`PrefixCode`]).
//!
//! The single-leaf class (`r = 1`) is `a = (1)`, the empty degree sequence,
//! and has no proper word.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::numerics::format_rational;

/// The invariant a representation failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("alphabet size t = {0} is below 2")]
    AlphabetTooSmall(u32),
    #[error("empty representation")]
    Empty,
    #[error("exponents are not nondecreasing at position {0}")]
    NotNondecreasing(usize),
    #[error("Kraft sum = {0} ≠ 1")]
    KraftSum(String),
    #[error("deepest level has no leaves")]
    TrailingZero,
    #[error("deepest leaf count {count} is not divisible by t = {t}")]
    DeepestNotDivisible { count: u64, t: u32 },
    #[error("leaf total {r} is not 1 mod {modulus}")]
    LeafResidue { r: u64, modulus: u32 },
    #[error("first inner-vertex count must be 1, found {0}")]
    FirstDegree(u64),
    #[error("b[{index}] = {value} outside [1, {max}]")]
    DegreeOutOfRange { index: usize, value: u64, max: u64 },
    #[error("symbol {0} is not a binary digit")]
    NotBinary(u8),
    #[error("proper word must start with 1 (c0 = {0})")]
    LeadingZeros(u64),
    #[error("zero run c[{index}] = {run} exceeds {max}")]
    RunTooLong { index: usize, run: u64, max: u64 },
    #[error("root level must hold exactly one vertex")]
    RootLevel,
    #[error("level {height} holds {found} vertices, expected {expected}")]
    LevelSize { height: usize, found: u64, expected: u64 },
    #[error("level {0} has no inner vertices but is not the deepest")]
    DeadLevel(usize),
    #[error("deepest level must consist of leaves only")]
    DeepestHasInner,
    #[error("digit {digit} out of range for t = {t}")]
    DigitOutOfRange { digit: u32, t: u32 },
    #[error("code word {prefix:?} is a prefix of {word:?}")]
    NotPrefixFree { prefix: String, word: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReprError {
    #[error("invalid input: {0}")]
    Invalid(#[from] Violation),
    #[error("the single-leaf class has no proper word")]
    TrivialHasNoWord,
    #[error("unknown representation kind {0:?}")]
    UnknownKind(String),
    #[error("malformed JSON representation: {0}")]
    Json(String),
}

pub trait Validate {
    fn validate(&self) -> Result<(), Violation>;
}

fn check_t(t: u32) -> Result<(), Violation> {
    if t < 2 {
        Err(Violation::AlphabetTooSmall(t))
    } else {
        Ok(())
    }
}

/// Exponents `x1 ≤ … ≤ xr` with `Σ t^-xi = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitFractionExponents {
    pub t: u32,
    pub xs: Vec<u32>,
}

/// Leaves per level `(a0, …, al)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HuffmanSequence {
    pub t: u32,
    pub a: Vec<u64>,
}

/// Inner vertices per level `(b1, …, bl)`; empty for the single-leaf class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundedDegreeSequence {
    pub t: u32,
    pub b: Vec<u64>,
}

/// Binary word `0^c0 1 0^c1 1 … 1 0^c(l-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProperWord {
    pub t: u32,
    pub bits: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Level {
    pub inner: u64,
    pub leaves: u64,
}

/// Level profile of the canonical tree, root at height 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalTree {
    pub t: u32,
    pub levels: Vec<Level>,
}

/// A code word as a digit vector over `{0, …, t-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodeWord(pub Vec<u32>);

/// A complete prefix code, words in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrefixCode {
    pub t: u32,
    pub words: Vec<CodeWord>,
}

impl CodeWord {
    /// Digits as characters `0-9a-z` when `t ≤ 36`, dot-separated otherwise.
    pub fn render(&self, t: u32) -> String {
        if t <= 36 {
            self.0.iter().map(|&d| char::from_digit(d, 36).unwrap()).collect()
        } else {
            self.0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(".")
        }
    }

    pub fn parse(s: &str, t: u32) -> Result<Self, Violation> {
        let digits: Option<Vec<u32>> = if t > 36 {
            if s.is_empty() {
                Some(Vec::new())
            } else {
                s.split('.').map(|p| p.parse().ok()).collect()
            }
        } else {
            s.chars().map(|c| c.to_digit(36)).collect()
        };
        let digits = digits.ok_or(Violation::DigitOutOfRange { digit: u32::MAX, t })?;
        if let Some(&d) = digits.iter().find(|&&d| d >= t) {
            return Err(Violation::DigitOutOfRange { digit: d, t });
        }
        Ok(CodeWord(digits))
    }
}

fn kraft_sum(t: u32, a: &[u64]) -> BigRational {
    let tb = BigUint::from(t);
    let mut acc = BigRational::zero();
    let mut denom = BigUint::one();
    for &ai in a {
        acc += BigRational::new(BigUint::from(ai).into(), denom.clone().into());
        denom *= &tb;
    }
    acc
}

/// Exact Kraft test: `Σ ai t^(l-i) = t^l`.
fn kraft_holds(t: u32, a: &[u64]) -> bool {
    let tb = BigUint::from(t);
    let mut acc = BigUint::zero();
    for &ai in a {
        acc = acc * &tb + BigUint::from(ai);
    }
    acc == num_traits::pow(tb, a.len() - 1)
}

impl Validate for HuffmanSequence {
    fn validate(&self) -> Result<(), Violation> {
        check_t(self.t)?;
        let last = *self.a.last().ok_or(Violation::Empty)?;
        if last == 0 {
            return Err(Violation::TrailingZero);
        }
        if !kraft_holds(self.t, &self.a) {
            return Err(Violation::KraftSum(format_rational(&kraft_sum(self.t, &self.a))));
        }
        let l = self.a.len() - 1;
        if l >= 1 && last % self.t as u64 != 0 {
            return Err(Violation::DeepestNotDivisible { count: last, t: self.t });
        }
        let r: u64 = self.a.iter().sum();
        if !(r - 1).is_multiple_of(self.t as u64 - 1) {
            return Err(Violation::LeafResidue { r, modulus: self.t - 1 });
        }
        Ok(())
    }
}

impl Validate for UnitFractionExponents {
    fn validate(&self) -> Result<(), Violation> {
        check_t(self.t)?;
        if self.xs.is_empty() {
            return Err(Violation::Empty);
        }
        if let Some(i) = self.xs.windows(2).position(|w| w[0] > w[1]) {
            return Err(Violation::NotNondecreasing(i + 1));
        }
        let a = multiplicities(&self.xs);
        if !kraft_holds(self.t, &a) {
            return Err(Violation::KraftSum(format_rational(&kraft_sum(self.t, &a))));
        }
        Ok(())
    }
}

impl Validate for BoundedDegreeSequence {
    fn validate(&self) -> Result<(), Violation> {
        check_t(self.t)?;
        let Some(&first) = self.b.first() else {
            return Ok(());
        };
        if first != 1 {
            return Err(Violation::FirstDegree(first));
        }
        for (i, w) in self.b.windows(2).enumerate() {
            let max = self.t as u64 * w[0];
            if w[1] == 0 || w[1] > max {
                return Err(Violation::DegreeOutOfRange { index: i + 2, value: w[1], max });
            }
        }
        Ok(())
    }
}

impl ProperWord {
    /// Zero-run lengths `c0, …, c(l-1)`.
    pub fn runs(&self) -> Vec<u64> {
        let mut runs = vec![0u64];
        for &bit in &self.bits {
            if bit == 1 {
                runs.push(0);
            } else {
                *runs.last_mut().unwrap() += 1;
            }
        }
        runs
    }

    pub fn render(&self) -> String {
        self.bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
    }

    pub fn parse(t: u32, s: &str) -> Result<Self, Violation> {
        let bits = s
            .bytes()
            .map(|c| match c {
                b'0' => Ok(0),
                b'1' => Ok(1),
                other => Err(Violation::NotBinary(other)),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        Ok(Self { t, bits })
    }
}

impl Validate for ProperWord {
    fn validate(&self) -> Result<(), Violation> {
        check_t(self.t)?;
        if let Some(&b) = self.bits.iter().find(|&&b| b > 1) {
            return Err(Violation::NotBinary(b));
        }
        let runs = self.runs();
        if runs[0] != 0 {
            return Err(Violation::LeadingZeros(runs[0]));
        }
        let t = self.t as u64;
        for (i, w) in runs.windows(2).enumerate() {
            let max = t * w[0] + t - 1;
            if w[1] > max {
                return Err(Violation::RunTooLong { index: i + 1, run: w[1], max });
            }
        }
        Ok(())
    }
}

impl CanonicalTree {
    /// Number of inner vertices `n(T)`.
    pub fn inner_vertices(&self) -> u64 {
        self.levels.iter().map(|l| l.inner).sum()
    }

    /// Number of leaves of maximum height `m(T)`.
    pub fn deepest_leaves(&self) -> u64 {
        self.levels.last().map_or(0, |l| l.leaves)
    }

    pub fn height(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }
}

impl Validate for CanonicalTree {
    fn validate(&self) -> Result<(), Violation> {
        check_t(self.t)?;
        let root = self.levels.first().ok_or(Violation::Empty)?;
        if root.inner + root.leaves != 1 {
            return Err(Violation::RootLevel);
        }
        let t = self.t as u64;
        for (h, w) in self.levels.windows(2).enumerate() {
            if w[0].inner == 0 {
                return Err(Violation::DeadLevel(h));
            }
            let expected = t * w[0].inner;
            let found = w[1].inner + w[1].leaves;
            if found != expected {
                return Err(Violation::LevelSize { height: h + 1, found, expected });
            }
        }
        let deepest = self.levels.last().unwrap();
        if deepest.inner != 0 {
            return Err(Violation::DeepestHasInner);
        }
        if deepest.leaves == 0 {
            return Err(Violation::TrailingZero);
        }
        Ok(())
    }
}

impl Validate for PrefixCode {
    fn validate(&self) -> Result<(), Violation> {
        check_t(self.t)?;
        if self.words.is_empty() {
            return Err(Violation::Empty);
        }
        for w in &self.words {
            if let Some(&d) = w.0.iter().find(|&&d| d >= self.t) {
                return Err(Violation::DigitOutOfRange { digit: d, t: self.t });
            }
        }
        let mut sorted = self.words.clone();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[1].0.starts_with(&w[0].0) {
                return Err(Violation::NotPrefixFree { prefix: w[0].render(self.t), word: w[1].render(self.t) });
            }
        }
        let lengths: Vec<u32> = self.words.iter().map(|w| w.0.len() as u32).collect();
        let a = multiplicities(&lengths);
        if !kraft_holds(self.t, &a) {
            return Err(Violation::KraftSum(format_rational(&kraft_sum(self.t, &a))));
        }
        Ok(())
    }
}

fn multiplicities(xs: &[u32]) -> Vec<u64> {
    let top = xs.iter().copied().max().unwrap_or(0) as usize;
    let mut a = vec![0u64; top + 1];
    for &x in xs {
        a[x as usize] += 1;
    }
    a
}

/// `b1 = 1`, `bi = t·b(i-1) - a(i-1)`.
pub fn huffman_to_degrees(h: &HuffmanSequence) -> Result<BoundedDegreeSequence, ReprError> {
    h.validate()?;
    let t = h.t as u64;
    let l = h.a.len() - 1;
    let mut b = Vec::with_capacity(l);
    if l >= 1 {
        b.push(1u64);
        for i in 2..=l {
            let prev = b[i - 2];
            b.push(t * prev - h.a[i - 1]);
        }
        debug_assert_eq!(h.a[l], t * b[l - 1]);
    }
    Ok(BoundedDegreeSequence { t: h.t, b })
}

/// `a0 = 0`, `ai = t·bi - b(i+1)`, `al = t·bl`.
pub fn degrees_to_huffman(d: &BoundedDegreeSequence) -> Result<HuffmanSequence, ReprError> {
    d.validate()?;
    if d.b.is_empty() {
        return Ok(HuffmanSequence { t: d.t, a: vec![1] });
    }
    let t = d.t as u64;
    let l = d.b.len();
    let mut a = Vec::with_capacity(l + 1);
    a.push(0);
    for i in 0..l - 1 {
        a.push(t * d.b[i] - d.b[i + 1]);
    }
    a.push(t * d.b[l - 1]);
    Ok(HuffmanSequence { t: d.t, a })
}

/// `ci = b(i+1) - 1`; the word has length `Σ bi - 1`.
pub fn degrees_to_word(d: &BoundedDegreeSequence) -> Result<ProperWord, ReprError> {
    d.validate()?;
    if d.b.is_empty() {
        return Err(ReprError::TrivialHasNoWord);
    }
    let mut bits = Vec::new();
    for (i, &bi) in d.b.iter().enumerate() {
        if i > 0 {
            bits.push(1);
        }
        bits.extend(std::iter::repeat_n(0, (bi - 1) as usize));
    }
    Ok(ProperWord { t: d.t, bits })
}

pub fn word_to_degrees(w: &ProperWord) -> Result<BoundedDegreeSequence, ReprError> {
    w.validate()?;
    let b = w.runs().into_iter().map(|c| c + 1).collect();
    Ok(BoundedDegreeSequence { t: w.t, b })
}

pub fn huffman_to_exponents(h: &HuffmanSequence) -> Result<UnitFractionExponents, ReprError> {
    h.validate()?;
    let xs = h
        .a
        .iter()
        .enumerate()
        .flat_map(|(i, &ai)| std::iter::repeat_n(i as u32, ai as usize))
        .collect();
    Ok(UnitFractionExponents { t: h.t, xs })
}

pub fn exponents_to_huffman(x: &UnitFractionExponents) -> Result<HuffmanSequence, ReprError> {
    x.validate()?;
    Ok(HuffmanSequence { t: x.t, a: multiplicities(&x.xs) })
}

pub fn huffman_to_tree(h: &HuffmanSequence) -> Result<CanonicalTree, ReprError> {
    let d = huffman_to_degrees(h)?;
    let levels = h
        .a
        .iter()
        .enumerate()
        .map(|(height, &leaves)| Level { inner: d.b.get(height).copied().unwrap_or(0), leaves })
        .collect();
    Ok(CanonicalTree { t: h.t, levels })
}

pub fn tree_to_huffman(tree: &CanonicalTree) -> Result<HuffmanSequence, ReprError> {
    tree.validate()?;
    Ok(HuffmanSequence { t: tree.t, a: tree.levels.iter().map(|l| l.leaves).collect() })
}

/// The canonical code: on every level the leftmost vertices are leaves.
pub fn tree_to_codewords(tree: &CanonicalTree) -> Result<PrefixCode, ReprError> {
    tree.validate()?;
    let mut words = Vec::new();
    let mut frontier: Vec<CodeWord> = vec![CodeWord(Vec::new())];
    for level in &tree.levels {
        let (leaves, inner) = frontier.split_at(level.leaves as usize);
        words.extend_from_slice(leaves);
        frontier = inner
            .iter()
            .flat_map(|p| {
                (0..tree.t).map(move |d| {
                    let mut w = p.0.clone();
                    w.push(d);
                    CodeWord(w)
                })
            })
            .collect();
    }
    Ok(PrefixCode { t: tree.t, words })
}

/// Class of a code: the multiset of its word lengths.
pub fn codewords_to_huffman(code: &PrefixCode) -> Result<HuffmanSequence, ReprError> {
    code.validate()?;
    let lengths: Vec<u32> = code.words.iter().map(|w| w.0.len() as u32).collect();
    Ok(HuffmanSequence { t: code.t, a: multiplicities(&lengths) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReprKind {
    Exponents,
    Huffman,
    Degrees,
    Word,
    Tree,
    Code,
}

impl ReprKind {
    pub const ALL: [ReprKind; 6] =
        [ReprKind::Exponents, ReprKind::Huffman, ReprKind::Degrees, ReprKind::Word, ReprKind::Tree, ReprKind::Code];

    pub fn name(self) -> &'static str {
        match self {
            ReprKind::Exponents => "exponents",
            ReprKind::Huffman => "huffman",
            ReprKind::Degrees => "degrees",
            ReprKind::Word => "word",
            ReprKind::Tree => "tree",
            ReprKind::Code => "code",
        }
    }
}

impl fmt::Display for ReprKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReprKind {
    type Err = ReprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ReprKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ReprError::UnknownKind(s.to_string()))
    }
}

/// Any one of the encodings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Representation {
    Exponents(UnitFractionExponents),
    Huffman(HuffmanSequence),
    Degrees(BoundedDegreeSequence),
    Word(ProperWord),
    Tree(CanonicalTree),
    Code(PrefixCode),
}

impl Representation {
    pub fn kind(&self) -> ReprKind {
        match self {
            Representation::Exponents(_) => ReprKind::Exponents,
            Representation::Huffman(_) => ReprKind::Huffman,
            Representation::Degrees(_) => ReprKind::Degrees,
            Representation::Word(_) => ReprKind::Word,
            Representation::Tree(_) => ReprKind::Tree,
            Representation::Code(_) => ReprKind::Code,
        }
    }

    pub fn t(&self) -> u32 {
        match self {
            Representation::Exponents(x) => x.t,
            Representation::Huffman(x) => x.t,
            Representation::Degrees(x) => x.t,
            Representation::Word(x) => x.t,
            Representation::Tree(x) => x.t,
            Representation::Code(x) => x.t,
        }
    }

    pub fn validate(&self) -> Result<(), Violation> {
        match self {
            Representation::Exponents(x) => x.validate(),
            Representation::Huffman(x) => x.validate(),
            Representation::Degrees(x) => x.validate(),
            Representation::Word(x) => x.validate(),
            Representation::Tree(x) => x.validate(),
            Representation::Code(x) => x.validate(),
        }
    }

    /// The class as a Huffman sequence.
    pub fn to_huffman(&self) -> Result<HuffmanSequence, ReprError> {
        match self {
            Representation::Exponents(x) => exponents_to_huffman(x),
            Representation::Huffman(x) => {
                x.validate()?;
                Ok(x.clone())
            }
            Representation::Degrees(x) => degrees_to_huffman(x),
            Representation::Word(x) => degrees_to_huffman(&word_to_degrees(x)?),
            Representation::Tree(x) => tree_to_huffman(x),
            Representation::Code(x) => codewords_to_huffman(x),
        }
    }

    pub fn from_huffman(h: &HuffmanSequence, kind: ReprKind) -> Result<Self, ReprError> {
        Ok(match kind {
            ReprKind::Exponents => Representation::Exponents(huffman_to_exponents(h)?),
            ReprKind::Huffman => {
                h.validate()?;
                Representation::Huffman(h.clone())
            }
            ReprKind::Degrees => Representation::Degrees(huffman_to_degrees(h)?),
            ReprKind::Word => Representation::Word(degrees_to_word(&huffman_to_degrees(h)?)?),
            ReprKind::Tree => Representation::Tree(huffman_to_tree(h)?),
            ReprKind::Code => Representation::Code(tree_to_codewords(&huffman_to_tree(h)?)?),
        })
    }

    /// Builds `kind` directly from a degree sequence.
    pub fn from_degrees(d: &BoundedDegreeSequence, kind: ReprKind) -> Result<Self, ReprError> {
        match kind {
            ReprKind::Degrees => {
                d.validate()?;
                Ok(Representation::Degrees(d.clone()))
            }
            ReprKind::Word => Ok(Representation::Word(degrees_to_word(d)?)),
            other => Self::from_huffman(&degrees_to_huffman(d)?, other),
        }
    }

    pub fn convert(&self, to: ReprKind) -> Result<Self, ReprError> {
        if to == self.kind() {
            self.validate()?;
            return Ok(self.clone());
        }
        match (self, to) {
            (Representation::Word(w), ReprKind::Degrees) => Ok(Representation::Degrees(word_to_degrees(w)?)),
            (Representation::Degrees(d), other) => Self::from_degrees(d, other),
            _ => Self::from_huffman(&self.to_huffman()?, to),
        }
    }

    /// JSON array payload for this encoding.
    pub fn data(&self) -> Value {
        match self {
            Representation::Exponents(x) => json!(x.xs),
            Representation::Huffman(x) => json!(x.a),
            Representation::Degrees(x) => json!(x.b),
            Representation::Word(x) => json!(x.bits),
            Representation::Tree(x) => {
                Value::Array(x.levels.iter().map(|l| json!([l.inner, l.leaves])).collect())
            }
            Representation::Code(x) => Value::Array(x.words.iter().map(|w| Value::String(w.render(x.t))).collect()),
        }
    }

    /// `{"t": …, "kind": …, "data": […]}`.
    pub fn to_json(&self) -> Value {
        json!({ "t": self.t(), "kind": self.kind().name(), "data": self.data() })
    }

    /// Compact human-readable form: `(0,1,1,1,2)`, `110`, `{0,10,11}`, ….
    pub fn to_text(&self) -> String {
        let tuple = |v: &mut dyn Iterator<Item = String>| format!("({})", v.collect::<Vec<_>>().join(","));
        match self {
            Representation::Exponents(x) => tuple(&mut x.xs.iter().map(|v| v.to_string())),
            Representation::Huffman(x) => tuple(&mut x.a.iter().map(|v| v.to_string())),
            Representation::Degrees(x) => tuple(&mut x.b.iter().map(|v| v.to_string())),
            Representation::Word(x) => x.render(),
            Representation::Tree(x) => x
                .levels
                .iter()
                .map(|l| format!("({},{})", l.inner, l.leaves))
                .collect::<Vec<_>>()
                .join(","),
            Representation::Code(x) => {
                format!("{{{}}}", x.words.iter().map(|w| w.render(x.t)).collect::<Vec<_>>().join(","))
            }
        }
    }

    pub fn from_data(t: u32, kind: ReprKind, data: &Value) -> Result<Self, ReprError> {
        let bad = |what: &str| ReprError::Json(format!("{kind} data must be {what}"));
        let arr = data.as_array().ok_or_else(|| bad("an array"))?;
        let ints = || -> Result<Vec<u64>, ReprError> {
            arr.iter().map(|v| v.as_u64().ok_or_else(|| bad("an array of nonnegative integers"))).collect()
        };
        Ok(match kind {
            ReprKind::Exponents => Representation::Exponents(UnitFractionExponents {
                t,
                xs: ints()?.into_iter().map(|v| v as u32).collect(),
            }),
            ReprKind::Huffman => Representation::Huffman(HuffmanSequence { t, a: ints()? }),
            ReprKind::Degrees => Representation::Degrees(BoundedDegreeSequence { t, b: ints()? }),
            ReprKind::Word => Representation::Word(ProperWord {
                t,
                bits: ints()?.into_iter().map(|v| v.min(u8::MAX as u64) as u8).collect(),
            }),
            ReprKind::Tree => {
                let levels = arr
                    .iter()
                    .map(|pair| {
                        let p = pair.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("an array of [inner, leaves] pairs"))?;
                        let inner = p[0].as_u64().ok_or_else(|| bad("an array of [inner, leaves] pairs"))?;
                        let leaves = p[1].as_u64().ok_or_else(|| bad("an array of [inner, leaves] pairs"))?;
                        Ok(Level { inner, leaves })
                    })
                    .collect::<Result<Vec<_>, ReprError>>()?;
                Representation::Tree(CanonicalTree { t, levels })
            }
            ReprKind::Code => {
                let words = arr
                    .iter()
                    .map(|w| {
                        let s = w.as_str().ok_or_else(|| bad("an array of digit strings"))?;
                        Ok(CodeWord::parse(s, t)?)
                    })
                    .collect::<Result<Vec<_>, ReprError>>()?;
                Representation::Code(PrefixCode { t, words })
            }
        })
    }

    /// Inverse of [`Representation::to_text`].
    pub fn from_text(t: u32, kind: ReprKind, s: &str) -> Result<Self, ReprError> {
        let s = s.trim();
        let bad = || ReprError::Json(format!("cannot read {kind} from {s:?}"));
        let numbers = |body: &str| -> Result<Vec<u64>, ReprError> {
            body.split([',', '(', ')'])
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(|p| p.parse().map_err(|_| bad()))
                .collect()
        };
        let data = match kind {
            ReprKind::Word => {
                let bits = s.chars().map(|c| c.to_digit(10).map(u64::from).ok_or_else(bad)).collect::<Result<Vec<_>, _>>()?;
                json!(bits)
            }
            ReprKind::Tree => {
                let flat = numbers(s)?;
                if flat.len() % 2 != 0 {
                    return Err(bad());
                }
                Value::Array(flat.chunks(2).map(|p| json!([p[0], p[1]])).collect())
            }
            ReprKind::Code => {
                let body = s.strip_prefix('{').and_then(|b| b.strip_suffix('}')).ok_or_else(bad)?;
                json!(body.split(',').map(str::trim).filter(|w| !w.is_empty()).collect::<Vec<_>>())
            }
            _ => json!(numbers(s)?),
        };
        Self::from_data(t, kind, &data)
    }

    pub fn from_json(value: &Value) -> Result<Self, ReprError> {
        let t = value
            .get("t")
            .and_then(Value::as_u64)
            .ok_or_else(|| ReprError::Json("missing integer field \"t\"".into()))?;
        let kind: ReprKind = value
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| ReprError::Json("missing string field \"kind\"".into()))?
            .parse()?;
        let data = value.get("data").ok_or_else(|| ReprError::Json("missing field \"data\"".into()))?;
        Self::from_data(t as u32, kind, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(t: u32, a: &[u64]) -> HuffmanSequence {
        HuffmanSequence { t, a: a.to_vec() }
    }

    fn ds(t: u32, b: &[u64]) -> BoundedDegreeSequence {
        BoundedDegreeSequence { t, b: b.to_vec() }
    }

    #[test]
    fn text_round_trip() {
        for kind in ReprKind::ALL {
            let h = HuffmanSequence { t: 3, a: vec![0, 1, 5, 3] };
            let r = Representation::from_huffman(&h, kind).unwrap();
            assert_eq!(Representation::from_text(3, kind, &r.to_text()).unwrap(), r);
        }
    }

    #[test]
    fn validate_examples() {
        assert_eq!(hs(2, &[0, 1, 1, 1, 2]).validate(), Ok(()));
        assert_eq!(hs(2, &[0, 1, 1]).validate(), Err(Violation::KraftSum("3/4".into())));
        assert!(matches!(ds(2, &[1, 3]).validate(), Err(Violation::DegreeOutOfRange { index: 2, value: 3, max: 2 })));
        assert_eq!(hs(3, &[0, 1, 6, 0, 0]).validate(), Err(Violation::TrailingZero));
        assert_eq!(hs(2, &[1]).validate(), Ok(()));
        assert_eq!(hs(1, &[1]).validate(), Err(Violation::AlphabetTooSmall(1)));
        assert_eq!(hs(2, &[]).validate(), Err(Violation::Empty));
        assert_eq!(ds(2, &[2]).validate(), Err(Violation::FirstDegree(2)));
        assert!(matches!(ds(2, &[1, 0]).validate(), Err(Violation::DegreeOutOfRange { .. })));
    }

    #[test]
    fn huffman_degree_conversions() {
        assert_eq!(huffman_to_degrees(&hs(2, &[0, 1, 0, 4])).unwrap(), ds(2, &[1, 1, 2]));
        assert_eq!(huffman_to_degrees(&hs(2, &[0, 0, 3, 2])).unwrap(), ds(2, &[1, 2, 1]));
        assert!(matches!(huffman_to_degrees(&hs(3, &[0, 1, 6, 0, 0])), Err(ReprError::Invalid(_))));
        assert_eq!(degrees_to_huffman(&ds(2, &[1, 1, 1, 1])).unwrap(), hs(2, &[0, 1, 1, 1, 2]));
        assert_eq!(degrees_to_huffman(&ds(2, &[1, 2, 1])).unwrap(), hs(2, &[0, 0, 3, 2]));
        assert_eq!(degrees_to_huffman(&ds(3, &[1])).unwrap(), hs(3, &[0, 3]));
        assert_eq!(degrees_to_huffman(&ds(3, &[])).unwrap(), hs(3, &[1]));
        assert_eq!(huffman_to_degrees(&hs(3, &[1])).unwrap(), ds(3, &[]));
    }

    #[test]
    fn words() {
        assert_eq!(degrees_to_word(&ds(2, &[1, 1, 2])).unwrap().render(), "110");
        assert_eq!(degrees_to_word(&ds(2, &[1, 2, 1])).unwrap().render(), "101");
        assert_eq!(degrees_to_word(&ds(2, &[1, 1, 1, 1])).unwrap().render(), "111");
        assert_eq!(degrees_to_word(&ds(2, &[1])).unwrap().render(), "");
        assert_eq!(degrees_to_word(&ds(2, &[])), Err(ReprError::TrivialHasNoWord));
        let w = ProperWord::parse(2, "101").unwrap();
        assert_eq!(word_to_degrees(&w).unwrap(), ds(2, &[1, 2, 1]));
        assert_eq!(ProperWord::parse(2, "011").unwrap().validate(), Err(Violation::LeadingZeros(1)));
        // t = 2: after a run of 0 at most 1 zero may follow
        assert!(matches!(ProperWord::parse(2, "100").unwrap().validate(), Err(Violation::RunTooLong { .. })));
        assert_eq!(ProperWord::parse(3, "100").unwrap().validate(), Ok(()));
    }

    #[test]
    fn exponent_conversions() {
        let x = huffman_to_exponents(&hs(2, &[0, 1, 1, 1, 2])).unwrap();
        assert_eq!(x.xs, vec![1, 2, 3, 4, 4]);
        let h = exponents_to_huffman(&UnitFractionExponents { t: 2, xs: vec![2, 2, 2, 3, 3] }).unwrap();
        assert_eq!(h, hs(2, &[0, 0, 3, 2]));
        let h = exponents_to_huffman(&UnitFractionExponents { t: 5, xs: vec![0] }).unwrap();
        assert_eq!(h, hs(5, &[1]));
        let bad = UnitFractionExponents { t: 2, xs: vec![2, 1, 1] };
        assert_eq!(bad.validate(), Err(Violation::NotNondecreasing(1)));
    }

    #[test]
    fn trees() {
        let lv = |v: &[(u64, u64)]| v.iter().map(|&(inner, leaves)| Level { inner, leaves }).collect::<Vec<_>>();
        let t = huffman_to_tree(&hs(3, &[0, 1, 5, 3])).unwrap();
        assert_eq!(t.levels, lv(&[(1, 0), (2, 1), (1, 5), (0, 3)]));
        assert_eq!(huffman_to_tree(&hs(2, &[1])).unwrap().levels, lv(&[(0, 1)]));
        let t = huffman_to_tree(&hs(2, &[0, 1, 1, 1, 2])).unwrap();
        assert_eq!(t.levels, lv(&[(1, 0), (1, 1), (1, 1), (1, 1), (0, 2)]));
        assert_eq!(t.inner_vertices(), 4);
        assert_eq!(t.deepest_leaves(), 2);
        assert_eq!(t.height(), 4);
        assert_eq!(tree_to_huffman(&t).unwrap(), hs(2, &[0, 1, 1, 1, 2]));
        let broken = CanonicalTree { t: 3, levels: lv(&[(1, 0), (1, 1), (1, 5), (0, 3)]) };
        assert!(matches!(broken.validate(), Err(Violation::LevelSize { height: 1, found: 2, expected: 3 })));
    }

    #[test]
    fn canonical_codes() {
        let render = |h: HuffmanSequence| {
            let c = tree_to_codewords(&huffman_to_tree(&h).unwrap()).unwrap();
            c.words.iter().map(|w| w.render(c.t)).collect::<Vec<_>>()
        };
        assert_eq!(render(hs(2, &[0, 1, 1, 1, 2])), ["0", "10", "110", "1110", "1111"]);
        assert_eq!(render(hs(2, &[0, 1, 0, 4])), ["0", "100", "101", "110", "111"]);
        assert_eq!(render(hs(2, &[0, 0, 3, 2])), ["00", "01", "10", "110", "111"]);
        assert_eq!(render(hs(3, &[0, 3])), ["0", "1", "2"]);
        assert_eq!(render(hs(3, &[1])), [""]);
        // the ternary example code with 11 words
        assert_eq!(
            render(hs(3, &[0, 1, 4, 6])),
            ["0", "10", "11", "12", "20", "210", "211", "212", "220", "221", "222"]
        );
    }

    #[test]
    fn code_validation() {
        let code = |t: u32, ws: &[&str]| PrefixCode { t, words: ws.iter().map(|w| CodeWord::parse(w, t).unwrap()).collect() };
        assert_eq!(code(2, &["0", "10", "11"]).validate(), Ok(()));
        assert!(matches!(code(2, &["0", "01", "1"]).validate(), Err(Violation::NotPrefixFree { .. })));
        assert!(matches!(code(2, &["0", "10"]).validate(), Err(Violation::KraftSum(_))));
        assert!(CodeWord::parse("2", 2).is_err());
        let wide = CodeWord(vec![39, 0]);
        assert_eq!(wide.render(40), "39.0");
        assert_eq!(CodeWord::parse("39.0", 40).unwrap(), wide);
    }

    #[test]
    fn json_round_trip() {
        let h = Representation::Huffman(hs(2, &[0, 1, 0, 4]));
        let j = h.to_json();
        assert_eq!(j.to_string(), r#"{"data":[0,1,0,4],"kind":"huffman","t":2}"#);
        assert_eq!(Representation::from_json(&j).unwrap(), h);
        for kind in ReprKind::ALL {
            let r = h.convert(kind).unwrap();
            assert_eq!(Representation::from_json(&r.to_json()).unwrap(), r);
            assert_eq!(r.to_huffman().unwrap(), hs(2, &[0, 1, 0, 4]));
        }
        assert!(matches!("nope".parse::<ReprKind>(), Err(ReprError::UnknownKind(_))));
    }

    #[test]
    fn text_forms() {
        let h = Representation::Huffman(hs(2, &[0, 1, 0, 4]));
        assert_eq!(h.to_text(), "(0,1,0,4)");
        assert_eq!(h.convert(ReprKind::Word).unwrap().to_text(), "110");
        assert_eq!(h.convert(ReprKind::Code).unwrap().to_text(), "{0,100,101,110,111}");
        assert_eq!(h.convert(ReprKind::Tree).unwrap().to_text(), "(1,0),(1,1),(2,0),(0,4)");
    }
}
