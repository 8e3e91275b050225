//! Exact counts and exhaustive listings of compact-code classes.
//!
//! Counts are indexed by `n`, the number of inner vertices of the tree:
//! `c(n) = g_t(n) = f_t(1 + n(t-1))`, with `c(0) = 1` for the single leaf.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::numerics::BigCount;
use crate::representations::{BoundedDegreeSequence, HuffmanSequence, ReprError, ReprKind, Representation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountingError {
    #[error("alphabet size t = {0} is below 2")]
    AlphabetTooSmall(u32),
    #[error("invalid table range t = {t_min}..={t_max}")]
    BadRange { t_min: u32, t_max: u32 },
    #[error(transparent)]
    Repr(#[from] ReprError),
    #[error("malformed count table: {0}")]
    Table(String),
}

fn check_t(t: u32) -> Result<(), CountingError> {
    if t < 2 {
        Err(CountingError::AlphabetTooSmall(t))
    } else {
        Ok(())
    }
}

/// `c(0), …, c(n_max)` in one pass.
///
/// `ways[s][b]` counts degree sequences with sum `s` ending in `b`; a new
/// entry `b'` may follow `b` iff `b' ≤ t·b`, i.e. `b ≥ ceil(b'/t)`, so each
/// cell is one suffix sum of the row `s - b'`. Inner counts never exceed the
/// running sum, which caps `b ≤ s`.
pub fn count_trees_upto(t: u32, n_max: usize) -> Result<Vec<BigCount>, CountingError> {
    check_t(t)?;
    let mut counts = vec![BigUint::one()];
    if n_max == 0 {
        return Ok(counts);
    }
    let t = t as usize;
    // suffix[s][b] = Σ_{b'' ≥ b} ways[s][b''], for 1 ≤ b ≤ s (index 0 unused)
    let mut suffix: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
    suffix.push(vec![BigUint::zero()]);
    suffix.push(vec![BigUint::zero(), BigUint::one()]);
    counts.push(BigUint::one());
    for s in 2..=n_max {
        let mut ways = vec![BigUint::zero(); s + 1];
        ways[s] = BigUint::zero(); // a single entry must be b1 = 1
        for (b, cell) in ways.iter_mut().enumerate().take(s).skip(1) {
            let prev = s - b;
            let lower = b.div_ceil(t);
            if lower <= prev {
                *cell = suffix[prev][lower].clone();
            }
        }
        let mut row = vec![BigUint::zero(); s + 1];
        let mut acc = BigUint::zero();
        for b in (1..=s).rev() {
            acc += &ways[b];
            row[b] = acc.clone();
        }
        counts.push(row[1].clone());
        suffix.push(row);
    }
    Ok(counts)
}

/// Number of canonical `t`-ary trees with `n` inner vertices.
pub fn count_trees(t: u32, n: usize) -> Result<BigCount, CountingError> {
    Ok(count_trees_upto(t, n)?.pop().unwrap())
}

/// Number of compact `t`-ary code classes with `r` words.
pub fn count_codes(t: u32, r: u64) -> Result<BigCount, CountingError> {
    check_t(t)?;
    match inner_vertices_for(t, r) {
        Some(n) => count_trees(t, n as usize),
        None => Ok(BigUint::zero()),
    }
}

/// `n = (r-1)/(t-1)` when it is an integer.
pub fn inner_vertices_for(t: u32, r: u64) -> Option<u64> {
    let step = t as u64 - 1;
    (r >= 1 && (r - 1).is_multiple_of(step)).then(|| (r - 1) / step)
}

/// Lexicographic stream of bounded-degree sequences summing to `n`.
#[derive(Debug, Clone)]
pub struct DegreeSequences {
    t: u64,
    n: u64,
    current: Vec<u64>,
    started: bool,
    done: bool,
}

impl DegreeSequences {
    pub fn new(t: u32, n: u64) -> Self {
        Self { t: t as u64, n, current: Vec::new(), started: false, done: false }
    }

    /// Advances `current` to its lexicographic successor: bump the rightmost
    /// entry that can grow, then complete with ones.
    fn advance(&mut self) -> bool {
        let mut sum: u64 = self.current.iter().sum();
        // position 0 is pinned to 1
        while self.current.len() > 1 {
            let last = self.current.pop().unwrap();
            sum -= last;
            let cap = self.t * self.current.last().unwrap();
            if last < cap && sum + last < self.n {
                self.current.push(last + 1);
                sum += last + 1;
                self.current.extend(std::iter::repeat_n(1, (self.n - sum) as usize));
                return true;
            }
        }
        false
    }
}

impl Iterator for DegreeSequences {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            // smallest sequence is all ones; the empty sequence for n = 0
            self.current = vec![1; self.n as usize];
            if self.n <= 1 {
                self.done = true;
            }
            return Some(self.current.clone());
        }
        if self.advance() {
            Some(self.current.clone())
        } else {
            self.done = true;
            None
        }
    }
}

/// Every class with `r` words, once each, as `kind`, in lexicographic order of
/// the degree sequence. Infeasible `r` gives an empty stream.
pub fn enumerate_classes(
    t: u32,
    r: u64,
    kind: ReprKind,
) -> Result<impl Iterator<Item = Representation>, CountingError> {
    check_t(t)?;
    let n = inner_vertices_for(t, r);
    if n == Some(0) && kind == ReprKind::Word {
        return Err(ReprError::TrivialHasNoWord.into());
    }
    let seqs = match n {
        Some(n) => DegreeSequences::new(t, n),
        None => {
            let mut empty = DegreeSequences::new(t, 0);
            empty.done = true;
            empty
        }
    };
    Ok(seqs.map(move |b| {
        Representation::from_degrees(&BoundedDegreeSequence { t, b }, kind)
            .expect("generated degree sequences are valid")
    }))
}

/// Result of one branching round, with the number of raw emissions kept so
/// that duplicates can be measured.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchOutcome {
    pub sequences: BTreeSet<HuffmanSequence>,
    pub emitted: usize,
}

/// Splits each sequence at its last two positions only.
///
/// A split at position `i` replaces one leaf of level `i` by `t` leaves at
/// level `i + 1`; splitting at the deepest level opens a new level. Given the
/// complete set for `r - t + 1` words, the union is the complete set for `r`.
pub fn branch_step_counted(t: u32, set: &BTreeSet<HuffmanSequence>) -> BranchOutcome {
    let mut sequences = BTreeSet::new();
    let mut emitted = 0;
    let t64 = t as u64;
    for h in set {
        let l = h.a.len() - 1;
        let mut deeper = h.a.clone();
        deeper[l] -= 1;
        deeper.push(t64);
        sequences.insert(HuffmanSequence { t, a: deeper });
        emitted += 1;
        if l >= 1 && h.a[l - 1] > 0 {
            let mut split = h.a.clone();
            split[l - 1] -= 1;
            split[l] += t64;
            sequences.insert(HuffmanSequence { t, a: split });
            emitted += 1;
        }
    }
    BranchOutcome { sequences, emitted }
}

pub fn branch_step(t: u32, set: &BTreeSet<HuffmanSequence>) -> BTreeSet<HuffmanSequence> {
    branch_step_counted(t, set).sequences
}

/// Counts `c(n)` for every `t` in a range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub t_min: u32,
    pub t_max: u32,
    pub n_max: usize,
    /// `rows[t - t_min][n] = c(n)`.
    pub rows: Vec<Vec<BigCount>>,
}

pub fn build_table(t_min: u32, t_max: u32, n_max: usize) -> Result<CountTable, CountingError> {
    if t_min < 2 || t_min > t_max {
        return Err(CountingError::BadRange { t_min, t_max });
    }
    let rows = (t_min..=t_max)
        .into_par_iter()
        .map(|t| count_trees_upto(t, n_max))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CountTable { t_min, t_max, n_max, rows })
}

impl CountTable {
    pub fn entry(&self, t: u32, n: usize) -> Option<&BigCount> {
        self.rows.get(t.checked_sub(self.t_min)? as usize)?.get(n)
    }

    /// Header `t,1,2,…,n_max+1`; column `j` holds `c(j-1)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for j in 1..=self.n_max + 1 {
            write!(out, ",{j}").unwrap();
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            write!(out, "{}", self.t_min + i as u32).unwrap();
            for c in row {
                write!(out, ",{c}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, CountingError> {
        let bad = |m: &str| CountingError::Table(m.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty input"))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.first() != Some(&"t") || cols.len() < 2 {
            return Err(bad("header must start with \"t\""));
        }
        let n_max = cols.len() - 2;
        let mut ts = Vec::new();
        let mut rows = Vec::new();
        for line in lines {
            let mut cells = line.split(',');
            let t: u32 = cells.next().unwrap().trim().parse().map_err(|_| bad("bad t"))?;
            let row = cells
                .map(|c| c.trim().parse::<BigUint>().map_err(|_| bad("bad count")))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != n_max + 1 {
                return Err(bad("ragged row"));
            }
            ts.push(t);
            rows.push(row);
        }
        let t_min = *ts.first().ok_or_else(|| bad("no rows"))?;
        if ts.iter().enumerate().any(|(i, &t)| t != t_min + i as u32) {
            return Err(bad("rows must be consecutive in t"));
        }
        Ok(CountTable { t_min, t_max: t_min + ts.len() as u32 - 1, n_max, rows })
    }

    /// Whitespace-aligned rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(out, "t={:<3} {}", self.t_min + i as u32, cells.join(" ")).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| json!({ "t": self.t_min + i as u32, "counts": row.iter().map(big_json).collect::<Vec<_>>() }))
            .collect();
        json!({ "t_min": self.t_min, "t_max": self.t_max, "n_max": self.n_max, "rows": rows })
    }
}

/// Exact JSON number for a big count.
pub fn big_json(n: &BigUint) -> Value {
    serde_json::from_str(&n.to_string()).expect("decimal integers are valid JSON")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_trees(2, 6).unwrap(), u(9));
        assert_eq!(count_trees(2, 4).unwrap(), u(3));
        assert_eq!(count_trees(3, 4).unwrap(), u(4));
        for t in 2..8 {
            assert_eq!(count_trees(t, 0).unwrap(), u(1));
            assert_eq!(count_trees(t, 1).unwrap(), u(1));
        }
        assert_eq!(count_trees(1, 3), Err(CountingError::AlphabetTooSmall(1)));
    }

    #[test]
    fn codes_examples() {
        assert_eq!(count_codes(2, 5).unwrap(), u(3));
        assert_eq!(count_codes(3, 4).unwrap(), u(0));
        assert_eq!(count_codes(2, 50).unwrap(), u(699427308155));
        assert_eq!(count_codes(4, 1).unwrap(), u(1));
        assert_eq!(count_codes(4, 0).unwrap(), u(0));
    }

    #[test]
    fn degree_stream_order() {
        let all: Vec<_> = DegreeSequences::new(2, 4).collect();
        assert_eq!(all, vec![vec![1, 1, 1, 1], vec![1, 1, 2], vec![1, 2, 1]]);
        assert_eq!(DegreeSequences::new(2, 0).collect::<Vec<_>>(), vec![Vec::<u64>::new()]);
        assert_eq!(DegreeSequences::new(5, 1).collect::<Vec<_>>(), vec![vec![1]]);
        let t3: Vec<_> = DegreeSequences::new(3, 5).collect();
        assert_eq!(t3.len(), 7);
        assert!(t3.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn enumerate_examples() {
        let text = |kind| enumerate_classes(2, 5, kind).unwrap().map(|r| r.to_text()).collect::<Vec<_>>();
        assert_eq!(text(ReprKind::Huffman), ["(0,1,1,1,2)", "(0,1,0,4)", "(0,0,3,2)"]);
        assert_eq!(text(ReprKind::Degrees), ["(1,1,1,1)", "(1,1,2)", "(1,2,1)"]);
        assert_eq!(text(ReprKind::Word), ["111", "110", "101"]);
        let one: Vec<_> = enumerate_classes(2, 1, ReprKind::Huffman).unwrap().map(|r| r.to_text()).collect();
        assert_eq!(one, ["(1)"]);
        assert_eq!(enumerate_classes(3, 4, ReprKind::Huffman).unwrap().count(), 0);
        assert!(enumerate_classes(2, 1, ReprKind::Word).is_err());
    }

    #[test]
    fn branch_examples() {
        let set = |t: u32, v: &[&[u64]]| v.iter().map(|a| HuffmanSequence { t, a: a.to_vec() }).collect::<BTreeSet<_>>();
        let s5 = set(2, &[&[0, 1, 1, 1, 2], &[0, 1, 0, 4], &[0, 0, 3, 2]]);
        let s6 = set(2, &[&[0, 1, 1, 1, 1, 2], &[0, 1, 1, 0, 4], &[0, 1, 0, 3, 2], &[0, 0, 3, 1, 2], &[0, 0, 2, 4]]);
        assert_eq!(branch_step(2, &s5), s6);
        assert_eq!(branch_step(2, &set(2, &[&[1]])), set(2, &[&[0, 2]]));
        assert_eq!(branch_step(3, &set(3, &[&[1]])), set(3, &[&[0, 3]]));
    }

    #[test]
    fn table_examples() {
        let row = build_table(2, 2, 19).unwrap();
        let expected: Vec<BigUint> = [1u64, 1, 1, 2, 3, 5, 9, 16, 28, 50, 89, 159, 285, 510, 914, 1639, 2938, 5269, 9451, 16952]
            .iter()
            .map(|&v| u(v))
            .collect();
        assert_eq!(row.rows[0], expected);
        assert_eq!(build_table(10, 10, 19).unwrap().entry(10, 19), Some(&u(130688)));
        assert_eq!(build_table(4, 4, 9).unwrap().entry(4, 9), Some(&u(112)));
        assert!(build_table(3, 2, 4).is_err());
        assert!(build_table(1, 2, 4).is_err());
    }

    #[test]
    fn csv_layout_round_trip() {
        let table = build_table(2, 3, 4).unwrap();
        let csv = table.to_csv();
        assert_eq!(csv, "t,1,2,3,4,5\n2,1,1,1,2,3\n3,1,1,1,2,4\n");
        assert_eq!(CountTable::from_csv(&csv).unwrap(), table);
        assert!(CountTable::from_csv("x,1\n").is_err());
    }

    #[test]
    fn json_counts_are_exact_numbers() {
        let table = build_table(2, 2, 100).unwrap();
        let j = table.to_json().to_string();
        let last = table.entry(2, 100).unwrap().to_string();
        assert!(j.contains(&last), "{last} missing");
    }
}
