//! Round boundary files: one triple per line, `A MID B`, `-` for an empty
//! middle.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::triple::PathTriple;
use crate::error::{Error, Result};
use crate::graph::{Edge, NodeId};

pub fn parse_triple(line: &str, line_no: usize) -> Result<PathTriple> {
    let malformed = || Error::MalformedLine {
        line: line_no,
        content: line.to_owned(),
    };
    let mut it = line.split_whitespace();
    let (Some(a), Some(mid), Some(b), None) = (it.next(), it.next(), it.next(), it.next()) else {
        return Err(malformed());
    };
    let a: NodeId = a.parse().map_err(|_| malformed())?;
    let b: NodeId = b.parse().map_err(|_| malformed())?;
    if a == b {
        return Err(malformed());
    }
    if mid == "-" {
        return Ok(PathTriple::edge(Edge { first: a, second: b }));
    }
    let mid: NodeId = mid.parse().map_err(|_| malformed())?;
    if mid == a || mid == b {
        return Err(malformed());
    }
    Ok(PathTriple::path(a, mid, b))
}

pub struct SpillWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl SpillWriter {
    pub fn create(path: PathBuf) -> Result<Self> {
        let file = File::create(&path).map_err(|e| Error::file(&path, e))?;
        Ok(SpillWriter {
            out: BufWriter::with_capacity(1 << 16, file),
            path,
        })
    }

    pub fn write(&mut self, t: &PathTriple) -> Result<()> {
        writeln!(self.out, "{t}").map_err(|e| Error::file(&self.path, e))
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.out.flush().map_err(|e| Error::file(&self.path, e))?;
        Ok(self.path)
    }
}

/// Streams a spill file back, calling `f` for each triple.
pub fn read_spill(path: &Path, mut f: impl FnMut(PathTriple) -> Result<()>) -> Result<()> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    for (i, line) in BufReader::with_capacity(1 << 16, file).lines().enumerate() {
        let line = line.map_err(|e| Error::file(path, e))?;
        f(parse_triple(&line, i + 1)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_form() {
        let p = PathTriple::path(NodeId(3), NodeId(1), NodeId(2));
        assert_eq!(p.to_string(), "2 1 3");
        assert_eq!(parse_triple("2 1 3", 1).unwrap(), p);
        let e = PathTriple::edge(Edge::new(5, 4));
        assert_eq!(e.to_string(), "4 - 5");
        assert_eq!(parse_triple("4 - 5", 1).unwrap(), e);
    }

    #[test]
    fn rejects_bad_lines() {
        for bad in ["", "1 2", "1 2 3 4", "1 x 3", "1 1 3", "2 - 2", "a - b"] {
            assert!(matches!(parse_triple(bad, 9), Err(Error::MalformedLine { line: 9, .. })), "{bad:?}");
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let triples = vec![
            PathTriple::path(NodeId(1), NodeId(2), NodeId(3)),
            PathTriple::edge(Edge::new(9, 8)),
        ];
        let mut w = SpillWriter::create(dir.path().join("r.txt")).unwrap();
        for t in &triples {
            w.write(t).unwrap();
        }
        let path = w.finish().unwrap();
        let mut back = Vec::new();
        read_spill(&path, |t| {
            back.push(t);
            Ok(())
        })
        .unwrap();
        assert_eq!(back, triples);
    }
}
