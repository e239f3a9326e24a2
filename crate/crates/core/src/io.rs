//! Plain-text input formats. JSON forms of every type come from their
//! `serde` implementations; the text forms here are line-oriented
//! conveniences for graphs and CSP instances.
//!
//! Graph text: a `g <n>` header, one `e <u> <v>` line per edge (loops as
//! `e u u`), and an optional `m <u> <v>` line marking an oriented edge.
//! Instance text: a `p csp <vars> <atoms>` header and one `a <u> <v>`
//! line per atom. Blank lines and `#` comments are ignored.

use crate::forb::CspInstance;
use crate::graph::{Graph, MarkedGraph};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error: {0}")]
pub struct ParseError(pub String);

fn lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn two_numbers(rest: &[&str], what: &str) -> Result<(usize, usize), ParseError> {
    match rest {
        [a, b] => {
            let u = a
                .parse()
                .map_err(|_| ParseError(format!("bad {what} endpoint {a}")))?;
            let v = b
                .parse()
                .map_err(|_| ParseError(format!("bad {what} endpoint {b}")))?;
            Ok((u, v))
        }
        _ => Err(ParseError(format!("{what} line needs two vertices"))),
    }
}

/// Parses the graph text format; the marked edge is returned when a
/// `m` line is present.
pub fn parse_graph_text(text: &str) -> Result<(Graph, Option<(usize, usize)>), ParseError> {
    let mut graph: Option<Graph> = None;
    let mut marked = None;
    for line in lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.split_first() {
            Some((&"g", rest)) => {
                if graph.is_some() {
                    return Err(ParseError("duplicate g line".into()));
                }
                let n = match rest {
                    [n] => n
                        .parse()
                        .map_err(|_| ParseError(format!("bad vertex count {n}")))?,
                    _ => return Err(ParseError("g line needs a vertex count".into())),
                };
                graph = Some(Graph::new(n));
            }
            Some((&"e", rest)) => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| ParseError("e line before g line".into()))?;
                let (u, v) = two_numbers(rest, "edge")?;
                g.try_add_edge(u, v)
                    .map_err(|e| ParseError(e.to_string()))?;
            }
            Some((&"m", rest)) => {
                if marked.is_some() {
                    return Err(ParseError("duplicate m line".into()));
                }
                marked = Some(two_numbers(rest, "marked edge")?);
            }
            _ => return Err(ParseError(format!("unrecognized line: {line}"))),
        }
    }
    let graph = graph.ok_or_else(|| ParseError("missing g line".into()))?;
    if let Some((u, v)) = marked {
        if !graph.has_edge(u, v) {
            return Err(ParseError("marked pair is not an edge".into()));
        }
    }
    Ok((graph, marked))
}

pub fn write_graph_text(g: &Graph, marked: Option<(usize, usize)>) -> String {
    let mut out = format!("g {}\n", g.vertex_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("e {u} {v}\n"));
    }
    if let Some((u, v)) = marked {
        out.push_str(&format!("m {u} {v}\n"));
    }
    out
}

/// Parses the instance text format.
pub fn parse_instance_text(text: &str) -> Result<CspInstance, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut atoms = Vec::new();
    for line in lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            ["p", "csp", vars, count] => {
                if header.is_some() {
                    return Err(ParseError("duplicate p line".into()));
                }
                let v = vars
                    .parse()
                    .map_err(|_| ParseError(format!("bad variable count {vars}")))?;
                let c = count
                    .parse()
                    .map_err(|_| ParseError(format!("bad atom count {count}")))?;
                header = Some((v, c));
            }
            ["a", ..] => {
                if header.is_none() {
                    return Err(ParseError("a line before p line".into()));
                }
                atoms.push(two_numbers(&fields[1..], "atom")?);
            }
            _ => return Err(ParseError(format!("unrecognized line: {line}"))),
        }
    }
    let (vars, count) = header.ok_or_else(|| ParseError("missing p line".into()))?;
    if atoms.len() != count {
        return Err(ParseError(format!(
            "header promises {count} atoms, found {}",
            atoms.len()
        )));
    }
    CspInstance::new(vars, atoms).map_err(|e| ParseError(e.to_string()))
}

pub fn write_instance_text(inst: &CspInstance) -> String {
    let mut out = format!("p csp {} {}\n", inst.var_count, inst.atoms.len());
    for &(u, v) in &inst.atoms {
        out.push_str(&format!("a {u} {v}\n"));
    }
    out
}

/// Crude format sniffing: JSON inputs start with a brace.
pub fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// Reads a graph from either format.
pub fn graph_from_str(text: &str) -> Result<(Graph, Option<(usize, usize)>), ParseError> {
    if looks_like_json(text) {
        if let Ok(m) = serde_json::from_str::<MarkedGraph>(text) {
            return Ok((m.graph, Some(m.marked)));
        }
        let g: Graph =
            serde_json::from_str(text).map_err(|e| ParseError(e.to_string()))?;
        Ok((g, None))
    } else {
        parse_graph_text(text)
    }
}

/// Reads an instance from either format.
pub fn instance_from_str(text: &str) -> Result<CspInstance, ParseError> {
    if looks_like_json(text) {
        #[derive(serde::Deserialize)]
        struct InstRepr {
            vars: usize,
            atoms: Vec<(usize, usize)>,
        }
        let repr: InstRepr =
            serde_json::from_str(text).map_err(|e| ParseError(e.to_string()))?;
        CspInstance::new(repr.vars, repr.atoms).map_err(|e| ParseError(e.to_string()))
    } else {
        parse_instance_text(text)
    }
}
