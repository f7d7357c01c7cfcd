//! Plain-text edge lists and query vectors.
//!
//! Edge lists hold one `u v w` triple per line with 0-based ids; `#` starts
//! a comment. The vertex count is `max id + 1` unless a `# n <count>`
//! directive raises it. Query vectors hold one real per line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Result, SketchError};
use crate::graph::WeightedGraph;

fn parse_err(line: usize, msg: impl Into<String>) -> SketchError {
    SketchError::Parse {
        line,
        msg: msg.into(),
    }
}

fn n_directive(comment: &str) -> Option<&str> {
    let mut it = comment.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some("n"), Some(v), None) => Some(v),
        _ => None,
    }
}

pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut declared: Option<usize> = None;
    let mut triples = Vec::new();
    let mut max_id: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let (body, comment) = match raw.find('#') {
            Some(p) => (&raw[..p], Some(&raw[p + 1..])),
            None => (raw, None),
        };
        if let Some(v) = comment.and_then(n_directive) {
            let n = v
                .parse::<usize>()
                .map_err(|_| parse_err(line, format!("bad vertex count `{v}`")))?;
            declared = Some(n);
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 3 {
            return Err(parse_err(line, format!("expected `u v w`, got {} fields", fields.len())));
        }
        let id = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(line, format!("bad vertex id `{s}`")))
        };
        let (u, v) = (id(fields[0])?, id(fields[1])?);
        let w = fields[2]
            .parse::<f64>()
            .map_err(|_| parse_err(line, format!("bad weight `{}`", fields[2])))?;
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        triples.push((u, v, w));
    }
    let implied = max_id.map_or(0, |m| m + 1);
    let n = match declared {
        Some(d) if d < implied => {
            return Err(parse_err(0, format!("declared n = {d} but ids reach {}", implied - 1)))
        }
        Some(d) => d,
        None => implied,
    };
    WeightedGraph::new(n, triples)
}

pub fn format_edge_list(g: &WeightedGraph) -> String {
    let mut s = format!("# n {}\n", g.n());
    for e in g.edges() {
        writeln!(s, "{} {} {}", e.u, e.v, e.w).expect("string write");
    }
    s
}

pub fn read_edge_list(path: &Path) -> Result<WeightedGraph> {
    parse_edge_list(&fs::read_to_string(path)?)
}

pub fn write_edge_list(g: &WeightedGraph, path: &Path) -> Result<()> {
    fs::write(path, format_edge_list(g))?;
    Ok(())
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut x = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let v = body
            .parse::<f64>()
            .map_err(|_| parse_err(i + 1, format!("bad real `{body}`")))?;
        if !v.is_finite() {
            return Err(parse_err(i + 1, "query entries must be finite"));
        }
        x.push(v);
    }
    Ok(x)
}

pub fn format_vector(x: &[f64]) -> String {
    x.iter().map(|v| format!("{v}\n")).collect()
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    parse_vector(&fs::read_to_string(path)?)
}
