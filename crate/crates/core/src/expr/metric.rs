//! Complexity metrics used to rank equivalent expressions.

use std::fmt;
use std::str::FromStr;

use super::{print, Expr, Width};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    /// Edges joining an arithmetic operator to a bitwise operator.
    MbaAlternation,
    NodeCount,
    /// Operands of a top-level sum, 1 otherwise.
    TermCount,
    StringLength,
}

impl Metric {
    pub const ALL: [Metric; 4] =
        [Metric::NodeCount, Metric::MbaAlternation, Metric::TermCount, Metric::StringLength];

    pub fn name(self) -> &'static str {
        match self {
            Metric::MbaAlternation => "alternation",
            Metric::NodeCount => "nodes",
            Metric::TermCount => "terms",
            Metric::StringLength => "length",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown metric `{0}` (expected nodes, alternation, terms or length)")]
pub struct UnknownMetric(pub String);

impl FromStr for Metric {
    type Err = UnknownMetric;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "alternation" | "mbaalternation" => Ok(Metric::MbaAlternation),
            "nodes" | "nodecount" => Ok(Metric::NodeCount),
            "terms" | "termcount" => Ok(Metric::TermCount),
            "length" | "stringlength" => Ok(Metric::StringLength),
            _ => Err(UnknownMetric(s.to_string())),
        }
    }
}

pub fn metric_value(e: &Expr, m: Metric, w: Width) -> usize {
    match m {
        Metric::NodeCount => e.node_count(),
        Metric::TermCount => match e {
            Expr::Sum(ts) => ts.len(),
            _ => 1,
        },
        Metric::MbaAlternation => alternation(e),
        Metric::StringLength => print(e, w).len(),
    }
}

fn alternation(e: &Expr) -> usize {
    let k = e.kind();
    e.children()
        .iter()
        .map(|c| {
            let ck = c.kind();
            let crossing = (k.is_arithmetic_op() && ck.is_bitwise_op())
                || (k.is_bitwise_op() && ck.is_arithmetic_op());
            usize::from(crossing) + alternation(c)
        })
        .sum()
}

/// Primary metric followed by tie-breakers, compared lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricOrder(Vec<Metric>);

/// Comparable score of one expression under a [`MetricOrder`].
pub type MetricKey = Vec<usize>;

impl Default for MetricOrder {
    fn default() -> Self {
        MetricOrder(Metric::ALL.to_vec())
    }
}

impl MetricOrder {
    /// `primary` first, then the remaining metrics in default order.
    pub fn with_primary(primary: Metric) -> Self {
        let mut v = vec![primary];
        v.extend(Metric::ALL.iter().copied().filter(|m| *m != primary));
        MetricOrder(v)
    }

    pub fn new(order: Vec<Metric>) -> Self {
        assert!(!order.is_empty(), "metric order must not be empty");
        MetricOrder(order)
    }

    pub fn primary(&self) -> Metric {
        self.0[0]
    }

    pub fn metrics(&self) -> &[Metric] {
        &self.0
    }

    pub fn key(&self, e: &Expr, w: Width) -> MetricKey {
        self.0.iter().map(|m| metric_value(e, *m, w)).collect()
    }
}
