//! Edge-list and METIS readers/writers.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// One whitespace-separated `u v` pair per line; `%` and `#` start comments.
    EdgeList,
    /// Header `n m`, then one 1-indexed neighbor line per vertex.
    Metis,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "edgelist" => Ok(Format::EdgeList),
            "metis" => Ok(Format::Metis),
            other => Err(format!("unknown graph format '{other}'")),
        }
    }
}

pub fn load_graph(text: &str, format: Format) -> Result<Graph> {
    match format {
        Format::EdgeList => parse_edge_list(text),
        Format::Metis => parse_metis(text),
    }
}

fn parse_id(tok: &str, line: usize) -> Result<u64> {
    tok.parse::<u64>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a non-negative integer vertex id, found '{tok}'"),
    })
}

fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |label: u64| -> usize {
        *ids.entry(label).or_insert_with(|| {
            labels.push(label);
            labels.len() - 1
        })
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let (Some(a), Some(b)) = (toks.next(), toks.next()) else {
            return Err(Error::Parse {
                line: i + 1,
                message: "expected a pair of vertex ids".into(),
            });
        };
        let (a, b) = (parse_id(a, i + 1)?, parse_id(b, i + 1)?);
        edges.push((intern(a), intern(b)));
    }
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    Graph::with_labels(labels, edges)
}

fn parse_metis(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim_start().starts_with('%'));
    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or(Error::EmptyInput)?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() < 2 {
        return Err(Error::Parse {
            line: hline + 1,
            message: "METIS header must be 'n m [fmt]'".into(),
        });
    }
    let n = parse_id(head[0], hline + 1)? as usize;
    let m = parse_id(head[1], hline + 1)? as usize;
    if let Some(fmt) = head.get(2) {
        if fmt.chars().any(|c| c != '0') {
            return Err(Error::Parse {
                line: hline + 1,
                message: format!("weighted METIS format '{fmt}' is not supported"),
            });
        }
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut edges = Vec::new();
    let mut seen = 0;
    for (i, line) in lines.take(n) {
        for tok in line.split_whitespace() {
            let w = parse_id(tok, i + 1)? as usize;
            if w == 0 || w > n {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("neighbor {w} outside 1..={n}"),
                });
            }
            edges.push((seen, w - 1));
        }
        seen += 1;
    }
    if seen < n {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: format!("expected {n} adjacency lines, found {seen}"),
        });
    }
    let g = Graph::with_labels((1..=n as u64).collect(), edges)?;
    if g.m() != m {
        return Err(Error::Parse {
            line: hline + 1,
            message: format!("header declares {m} edges but adjacency lists hold {}", g.m()),
        });
    }
    Ok(g)
}

/// Writes `g` as an edge list using its original labels.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", g.label(u), g.label(v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_examples() {
        let p3 = load_graph("0 1\n1 2", Format::EdgeList).unwrap();
        assert_eq!((p3.n(), p3.m()), (3, 2));

        let p2 = load_graph("0 1\n0 1\n1 0\n1 1", Format::EdgeList).unwrap();
        assert_eq!((p2.n(), p2.m()), (2, 1));

        let err = load_graph("0 1\n2 3", Format::EdgeList).unwrap_err();
        assert!(matches!(err, Error::Disconnected(0, 2)), "{err}");
    }

    #[test]
    fn edge_list_remaps_in_first_appearance_order() {
        let g = load_graph("# comment\n% other\n10 7\n\n7 3 extra\n", Format::EdgeList).unwrap();
        assert_eq!(g.labels(), &[10, 7, 3]);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2));
    }

    #[test]
    fn edge_list_errors() {
        assert!(matches!(load_graph("", Format::EdgeList), Err(Error::EmptyInput)));
        assert!(matches!(
            load_graph("% only comments\n", Format::EdgeList),
            Err(Error::EmptyInput)
        ));
        assert!(matches!(
            load_graph("0 1\n2\n", Format::EdgeList),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load_graph("0 x\n", Format::EdgeList),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn metis_path() {
        let g = load_graph("% P4\n4 3\n2\n1 3\n2 4\n3\n", Format::Metis).unwrap();
        assert_eq!((g.n(), g.m()), (4, 3));
        assert_eq!(g.labels(), &[1, 2, 3, 4]);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn metis_errors() {
        assert!(matches!(load_graph("3 2\n2\n1 3\n", Format::Metis), Err(Error::Parse { .. })));
        assert!(matches!(load_graph("2 1 1\n2 5\n1 5\n", Format::Metis), Err(Error::Parse { .. })));
        assert!(matches!(load_graph("2 2\n2\n1\n", Format::Metis), Err(Error::Parse { .. })));
        assert!(matches!(load_graph("3 1\n2\n1\n\n", Format::Metis), Err(Error::Disconnected(1, 3))));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = load_graph("5 9\n9 2\n2 5\n2 8\n", Format::EdgeList).unwrap();
        let again = load_graph(&write_edge_list(&g), Format::EdgeList).unwrap();
        assert_eq!(again.n(), g.n());
        let mut a: Vec<_> = g.edges().map(|(u, v)| (g.label(u), g.label(v))).collect();
        let mut b: Vec<_> = again.edges().map(|(u, v)| (again.label(u), again.label(v))).collect();
        for e in a.iter_mut().chain(b.iter_mut()) {
            *e = (e.0.min(e.1), e.0.max(e.1));
        }
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
