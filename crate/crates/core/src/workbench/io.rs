//! Plain-text instance files.
//!
//! ```text
//! kpartite 3            hypergraph 3 4
//! part 4                part 2
//! part 4                ...
//! part 4                edges 1
//! edges 2               0 2 4
//! 0 4
//! 4 9
//! ```
//!
//! `#` starts a comment; blank lines are ignored. Writers emit edges in
//! ascending order, so `write(parse(f))` is equal to `f` up to edge order and
//! comments.

use super::gen::Instance;
use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, KPartiteGraph};
use crate::hypergraph::UniformHypergraph;
use std::fmt::Write as _;
use std::path::Path;

fn err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        message: message.into(),
    })
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-empty line as (1-based number, tokens).
    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if !tokens.is_empty() {
                self.last = i + 1;
                return Some((i + 1, tokens));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        match self.next() {
            Some(x) => Ok(x),
            None => err(
                self.last + 1,
                format!("unexpected end of input, expected {what}"),
            ),
        }
    }
}

fn number(line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .or_else(|_| err(line, format!("`{tok}` is not a non-negative integer")))
}

fn keyword(line: usize, tokens: &[&str], word: &str, args: usize) -> Result<Vec<usize>> {
    if tokens[0] != word || tokens.len() != args + 1 {
        return err(
            line,
            format!("expected `{word}` followed by {args} number(s)"),
        );
    }
    tokens[1..].iter().map(|t| number(line, t)).collect()
}

fn read_parts(lines: &mut Lines, k: usize) -> Result<Vec<usize>> {
    let mut sizes = Vec::with_capacity(k);
    for _ in 0..k {
        let (line, toks) = lines.expect("a `part` line")?;
        sizes.push(keyword(line, &toks, "part", 1)?[0]);
    }
    Ok(sizes)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = Lines::new(text);
    let (line, header) = lines.expect("a header")?;
    match header[0] {
        "kpartite" => {
            let k = keyword(line, &header, "kpartite", 1)?[0];
            let sizes = read_parts(&mut lines, k)?;
            let (line, toks) = lines.expect("an `edges` line")?;
            let m = keyword(line, &toks, "edges", 1)?[0];
            let mut b = GraphBuilder::new(sizes);
            for _ in 0..m {
                let (line, toks) = lines.expect("an edge")?;
                if toks.len() != 2 {
                    return err(line, "an edge is two vertex ids");
                }
                let (u, v) = (number(line, toks[0])?, number(line, toks[1])?);
                match b.add_edge(u, v) {
                    Ok(true) => {}
                    Ok(false) => return err(line, format!("duplicate edge ({u}, {v})")),
                    Err(Error::InvalidParameter(msg)) => return err(line, msg),
                    Err(e) => return Err(e),
                }
            }
            trailing(&mut lines)?;
            Ok(Instance::Graph(b.build()))
        }
        "hypergraph" => {
            let rk = keyword(line, &header, "hypergraph", 2)?;
            let (r, k) = (rk[0], rk[1]);
            let sizes = read_parts(&mut lines, k)?;
            let (line, toks) = lines.expect("an `edges` line")?;
            let m = keyword(line, &toks, "edges", 1)?[0];
            UniformHypergraph::new(r, sizes.clone(), []).or_else(|e| err(line, e.to_string()))?;
            let mut edges = Vec::with_capacity(m);
            let mut seen = std::collections::HashSet::new();
            for _ in 0..m {
                let (line, toks) = lines.expect("a hyperedge")?;
                let e: Vec<usize> = toks
                    .iter()
                    .map(|t| number(line, t))
                    .collect::<Result<_>>()?;
                // validate one edge at a time to report its line
                if let Err(Error::InvalidParameter(msg)) =
                    UniformHypergraph::new(r, sizes.clone(), [e.clone()])
                {
                    return err(line, msg);
                }
                let mut key = e.clone();
                key.sort_unstable();
                if !seen.insert(key) {
                    return err(line, format!("duplicate hyperedge {e:?}"));
                }
                edges.push(e);
            }
            trailing(&mut lines)?;
            Ok(Instance::Hypergraph(UniformHypergraph::new(
                r, sizes, edges,
            )?))
        }
        other => err(
            line,
            format!("unknown header `{other}`; expected `kpartite` or `hypergraph`"),
        ),
    }
}

fn trailing(lines: &mut Lines) -> Result<()> {
    match lines.next() {
        Some((line, _)) => err(line, "more lines than the declared edge count"),
        None => Ok(()),
    }
}

pub fn write_graph(g: &KPartiteGraph) -> String {
    let mut out = String::new();
    writeln!(out, "kpartite {}", g.k()).unwrap();
    for &s in g.part_sizes() {
        writeln!(out, "part {s}").unwrap();
    }
    writeln!(out, "edges {}", g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn write_hypergraph(h: &UniformHypergraph) -> String {
    let mut out = String::new();
    writeln!(out, "hypergraph {} {}", h.r(), h.k()).unwrap();
    for &s in h.part_sizes() {
        writeln!(out, "part {s}").unwrap();
    }
    writeln!(out, "edges {}", h.edge_count()).unwrap();
    for e in h.edges() {
        let ids: Vec<String> = e.iter().map(ToString::to_string).collect();
        writeln!(out, "{}", ids.join(" ")).unwrap();
    }
    out
}

pub fn write_instance(inst: &Instance) -> String {
    match inst {
        Instance::Graph(g) => write_graph(g),
        Instance::Hypergraph(h) => write_hypergraph(h),
    }
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_roundtrip() {
        let text =
            "# tiny\nkpartite 3\npart 2\npart 2\npart 2\n\nedges 3\n0 2\n2 4  # v2-v3\n0 4\n";
        let inst = parse_instance(text).unwrap();
        let Instance::Graph(g) = &inst else { panic!() };
        assert_eq!(g.edge_count(), 3);
        let again = write_graph(g);
        assert_eq!(parse_instance(&again).unwrap(), inst);
        assert_eq!(write_instance(&parse_instance(&again).unwrap()), again);
    }

    #[test]
    fn hypergraph_roundtrip() {
        let text = "hypergraph 3 3\npart 1\npart 1\npart 1\nedges 1\n2 0 1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(
            write_instance(&inst),
            "hypergraph 3 3\npart 1\npart 1\npart 1\nedges 1\n0 1 2\n"
        );
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("kpartite 2\npart 2\npart 2\nedges 1\n0 1\n", 5),
            ("kpartite 2\npart 2\npart 2\nedges 2\n0 2\n2 0\n", 6),
            ("kpartite 2\npart 2\npart 2\nedges 1\n0 9\n", 5),
            ("kpartite 2\npart 2\npart 2\nedges 2\n0 2\n", 6),
            ("kpartite 2\npart x\n", 2),
            ("graph 2\n", 1),
            ("hypergraph 3 3\npart 1\npart 1\npart 1\nedges 1\n0 1\n", 6),
            ("kpartite 2\npart 2\npart 2\nedges 0\n0 2\n", 5),
        ];
        for (text, want) in cases {
            match parse_instance(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }
}
