//! Plain-text graph files: a header line `n m`, then `m` lines `u v` with
//! `u < v` (0-based). Text after `#` is a comment; blank lines are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Graph, GraphError};

pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut header_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = fields[..] else {
            return Err(GraphError::Parse { line: line_no, msg: format!("expected two integers, got {line:?}") });
        };
        let parse =
            |s: &str| s.parse::<usize>().map_err(|e| GraphError::Parse { line: line_no, msg: format!("{s:?}: {e}") });
        let (a, b) = (parse(a)?, parse(b)?);
        match header {
            None => {
                header = Some((a, b));
                header_line = line_no;
            }
            Some((n, _)) => {
                if a >= b || b >= n {
                    return Err(GraphError::Parse {
                        line: line_no,
                        msg: format!("edge ({a}, {b}) must satisfy u < v < {n}"),
                    });
                }
                edges.push((a, b));
            }
        }
    }
    let (n, m) = header.ok_or(GraphError::Parse { line: 0, msg: "missing `n m` header".into() })?;
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: header_line,
            msg: format!("header declares {m} edges, file lists {}", edges.len()),
        });
    }
    let g = Graph::from_edges(n, edges)?;
    if g.edge_count() != m {
        return Err(GraphError::Parse { line: header_line, msg: "duplicate edges".into() });
    }
    Ok(g)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    parse_graph(&fs::read_to_string(path)?)
}

/// Canonical text form (edges sorted), the inverse of [`parse_graph`].
pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}
