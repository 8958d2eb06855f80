//! Whitespace edge-list reading and writing.
//!
//! One edge per line as `u v` (extra columns such as weights are ignored).
//! Lines starting with `%` or `#` are comments, except:
//!
//! * `# n=<count>` declares the vertex count. When every label is below
//!   `count` the labels are used as ids directly, so unlisted ids become
//!   isolated vertices.
//! * `# isolated: <label> ...` declares vertices that have no edges.
//!
//! Without a header, labels are densified in ascending order.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Reject self-loops with an error instead of dropping them.
    pub strict: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { strict: true }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub duplicate_edges: usize,
    pub dropped_self_loops: usize,
}

pub fn load_graph(path: impl AsRef<Path>, opts: LoadOptions) -> Result<LoadedGraph> {
    let file = File::open(path.as_ref())?;
    read_edge_list(BufReader::new(file), opts)
}

pub fn read_edge_list<R: BufRead>(reader: R, opts: LoadOptions) -> Result<LoadedGraph> {
    let mut declared_n: Option<usize> = None;
    let mut raw_edges: Vec<(u64, u64)> = Vec::new();
    let mut labels: BTreeSet<u64> = BTreeSet::new();
    let mut dropped_self_loops = 0;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(count) = rest.strip_prefix("n=") {
                let n = count.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("bad vertex-count header {line:?}"),
                })?;
                declared_n = Some(n);
            } else if let Some(list) = rest.strip_prefix("isolated:") {
                for tok in list.split_whitespace() {
                    labels.insert(parse_label(tok, lineno)?);
                }
            }
            continue;
        }
        if line.starts_with('%') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected two vertex ids, got {line:?}"),
            });
        };
        let u = parse_label(a, lineno)?;
        let v = parse_label(b, lineno)?;
        if u == v {
            if opts.strict {
                return Err(Error::Validation(format!("self-loop at vertex {u} on line {lineno}")));
            }
            dropped_self_loops += 1;
            continue;
        }
        labels.insert(u);
        labels.insert(v);
        raw_edges.push((u, v));
    }

    let label_list: Vec<u64> = match declared_n {
        Some(n) if labels.iter().all(|&l| l < n as u64) => (0..n as u64).collect(),
        Some(n) => {
            if labels.len() != n {
                return Err(Error::Validation(format!(
                    "header declares {n} vertices but the file names {} distinct labels",
                    labels.len()
                )));
            }
            labels.into_iter().collect()
        }
        None => labels.into_iter().collect(),
    };
    let index: BTreeMap<u64, usize> = label_list.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let n = label_list.len();
    let (graph, duplicate_edges) = Graph::from_edges_counting(n, raw_edges.iter().map(|(u, v)| (index[u], index[v])))?;
    if duplicate_edges > 0 {
        warn!("dropped {duplicate_edges} duplicate edge(s)");
    }
    if dropped_self_loops > 0 {
        warn!("dropped {dropped_self_loops} self-loop(s)");
    }
    Ok(LoadedGraph {
        graph: graph.with_labels(label_list)?,
        duplicate_edges,
        dropped_self_loops,
    })
}

fn parse_label(tok: &str, line: usize) -> Result<u64> {
    tok.parse::<u64>().map_err(|_| Error::Parse {
        line,
        message: format!("non-integer vertex id {tok:?}"),
    })
}

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# n={}", g.n())?;
    if !g.has_identity_labels() {
        let isolated: Vec<String> = (0..g.n())
            .filter(|&v| g.degree(v) == 0)
            .map(|v| g.label(v).to_string())
            .collect();
        if !isolated.is_empty() {
            writeln!(out, "# isolated: {}", isolated.join(" "))?;
        }
    }
    for (u, v) in g.edges() {
        writeln!(out, "{} {}", g.label(u), g.label(v))?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    write_edge_list(g, BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<LoadedGraph> {
        read_edge_list(s.as_bytes(), LoadOptions::default())
    }

    #[test]
    fn path_of_three() {
        let g = read("0 1\n1 2\n").unwrap().graph;
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn duplicates_counted() {
        let loaded = read("0 1\n0 1\n").unwrap();
        assert_eq!(loaded.graph.edge_count(), 1);
        assert_eq!(loaded.duplicate_edges, 1);
        // reversed orientation is the same edge
        assert_eq!(read("0 1\r\n1 0\r\n").unwrap().duplicate_edges, 1);
    }

    #[test]
    fn comments_skipped() {
        let g = read("% comment\n0 1\n").unwrap().graph;
        assert_eq!(g.n(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn bad_token_reports_line() {
        match read("0 1\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(read("7\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn self_loops() {
        assert!(matches!(read("0 0\n"), Err(Error::Validation(_))));
        let loose = read_edge_list("0 0\n0 1\n".as_bytes(), LoadOptions { strict: false }).unwrap();
        assert_eq!(loose.dropped_self_loops, 1);
        assert_eq!(loose.graph.edge_count(), 1);
    }

    #[test]
    fn header_declares_isolated_vertices() {
        let g = read("# n=5\n0 1\n3 1\n").unwrap().graph;
        assert_eq!(g.n(), 5);
        assert_eq!(g.degrees(), vec![1, 2, 0, 1, 0]);
    }

    #[test]
    fn labels_densified_and_written_back() {
        let g = read("10 20\n20 35\n# isolated: 40\n").unwrap().graph;
        assert_eq!(g.n(), 4);
        assert_eq!(g.labels(), &[10, 20, 35, 40]);
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "# n=4\n# isolated: 40\n10 20\n20 35\n");
        let again = read(&text).unwrap().graph;
        assert_eq!(again, g);
    }

    #[test]
    fn konect_weight_columns_ignored() {
        let g = read("1 2 1 943\n2 3 1 944\n").unwrap().graph;
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.labels(), &[1, 2, 3]);
    }
}
