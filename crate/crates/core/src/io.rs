//! Edge-list readers and writers for the DIMACS shortest-path, SNAP and
//! plain edge-list formats.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Lines, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Edge, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphFormat {
    /// `c` comments, one `p sp N M` problem line, `a U V W` arcs.
    Dimacs,
    /// `#` comments, `U<TAB>V` per line.
    Snap,
    /// `#` comments, `U V` per line.
    EdgeList,
}

impl GraphFormat {
    pub const ALL: [GraphFormat; 3] = [GraphFormat::Dimacs, GraphFormat::Snap, GraphFormat::EdgeList];

    pub fn as_str(&self) -> &'static str {
        match self {
            GraphFormat::Dimacs => "dimacs",
            GraphFormat::Snap => "snap",
            GraphFormat::EdgeList => "edgelist",
        }
    }

    /// Guesses a format from a file extension (`.gr`/`.dimacs` and `.snap`),
    /// falling back to a plain edge list.
    pub fn from_extension(path: &Path) -> GraphFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("gr") | Some("dimacs") => GraphFormat::Dimacs,
            Some("snap") => GraphFormat::Snap,
            _ => GraphFormat::EdgeList,
        }
    }
}

impl fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dimacs" => Ok(GraphFormat::Dimacs),
            "snap" => Ok(GraphFormat::Snap),
            "edgelist" => Ok(GraphFormat::EdgeList),
            other => Err(Error::Config(format!("unknown graph format {other:?}"))),
        }
    }
}

/// Lazy line-by-line edge reader. Yields raw edges in file order; no dedup.
pub struct EdgeReader<R> {
    lines: Lines<R>,
    line_no: usize,
    format: GraphFormat,
    path: Option<PathBuf>,
}

impl<R: BufRead> EdgeReader<R> {
    pub fn new(reader: R, format: GraphFormat) -> Self {
        EdgeReader {
            lines: reader.lines(),
            line_no: 0,
            format,
            path: None,
        }
    }

    fn parse_line(&self, line: &str) -> Result<Option<Edge>> {
        let mut tokens = line.split_whitespace();
        let Some(head) = tokens.next() else {
            return Ok(None);
        };
        let malformed = || Error::MalformedLine {
            line: self.line_no,
            content: line.to_owned(),
        };
        let node = |tok: Option<&str>| -> Result<NodeId> {
            tok.ok_or_else(malformed)?.parse().map_err(|_| malformed())
        };
        match self.format {
            GraphFormat::Dimacs => match head {
                "c" => Ok(None),
                "p" => Ok(None),
                "a" => {
                    let u = node(tokens.next())?;
                    let v = node(tokens.next())?;
                    // Weight is optional and ignored, but must be numeric.
                    if let Some(w) = tokens.next() {
                        w.parse::<f64>().map_err(|_| malformed())?;
                    }
                    if tokens.next().is_some() {
                        return Err(malformed());
                    }
                    Ok(Some(Edge { first: u, second: v }))
                }
                _ => Err(malformed()),
            },
            GraphFormat::Snap | GraphFormat::EdgeList => {
                if head.starts_with('#') {
                    return Ok(None);
                }
                let u = node(Some(head))?;
                let v = node(tokens.next())?;
                if tokens.next().is_some() {
                    return Err(malformed());
                }
                Ok(Some(Edge { first: u, second: v }))
            }
        }
    }
}

impl<R: BufRead> Iterator for EdgeReader<R> {
    type Item = Result<Edge>;

    fn next(&mut self) -> Option<Result<Edge>> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => {
                    return Some(Err(match &self.path {
                        Some(p) => Error::file(p.clone(), e),
                        None => Error::Io(e),
                    }))
                }
            };
            self.line_no += 1;
            match self.parse_line(&line) {
                Ok(Some(e)) => return Some(Ok(e)),
                Ok(None) => continue,
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

/// Opens `path` and returns a lazy reader over its raw edges.
pub fn parse(path: impl AsRef<Path>, format: GraphFormat) -> Result<EdgeReader<BufReader<File>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    let mut reader = EdgeReader::new(BufReader::with_capacity(1 << 16, file), format);
    reader.path = Some(path.to_owned());
    Ok(reader)
}

/// Parses edges from an in-memory string.
pub fn parse_str(text: &str, format: GraphFormat) -> Result<Vec<Edge>> {
    EdgeReader::new(text.as_bytes(), format).collect()
}

/// Writes a simple-graph edge list. DIMACS output lists every edge in both
/// directions with weight 1; the other formats write one line per edge.
pub fn write_to<W: Write>(edges: &[Edge], mut out: W, format: GraphFormat) -> Result<()> {
    match format {
        GraphFormat::Dimacs => {
            let max_id = edges
                .iter()
                .map(|e| e.first.max(e.second).get())
                .max()
                .unwrap_or(0);
            writeln!(out, "p sp {} {}", max_id, 2 * edges.len())?;
            for e in edges {
                writeln!(out, "a {} {} 1", e.first, e.second)?;
                writeln!(out, "a {} {} 1", e.second, e.first)?;
            }
        }
        GraphFormat::Snap => {
            for e in edges {
                writeln!(out, "{}\t{}", e.first, e.second)?;
            }
        }
        GraphFormat::EdgeList => {
            for e in edges {
                writeln!(out, "{} {}", e.first, e.second)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write(edges: &[Edge], path: impl AsRef<Path>, format: GraphFormat) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::file(path, e))?;
    write_to(edges, BufWriter::new(file), format).map_err(|e| match e {
        Error::Io(io) => Error::file(path, io),
        other => other,
    })
}
