//! Counting canonical `t`-ary trees (equivalently, Huffman codes up to
//! equivalence) and certified asymptotics for their number.

pub mod asymptotics;
pub mod counting;
pub mod genfun;
pub mod numerics;
pub mod representations;

pub use counting::{build_table, count_codes, count_trees, count_trees_upto, enumerate_classes, CountTable};
pub use genfun::{bivariate_g, series_f, tail_bounds, SeriesTruncation, TailBound};
pub use numerics::{BigCount, ExactRational, Precision, RationalInterval};
pub use representations::{ReprKind, Representation};
