//! Plain-text serialization of finite QLR instances.
//!
//! ```text
//! # comment
//! name X
//! quantale chain(3)
//! points a b c
//! dist a: 0 1 inf
//! dist b: 1 0 2
//! dist c: inf 2 0
//! ```
//!
//! `name` is optional; `quantale` takes any parseable descriptor; `points`
//! lists carrier names; each `dist` row gives one matrix row in element
//! syntax, rows may appear in any order but must cover every point exactly
//! once. `#` starts a comment anywhere on a line.

use super::FiniteQlr;
use crate::quantale::{QuantaleDesc, QuantaleElem, QuantaleError, Result};

/// Split on whitespace outside brackets, so product and set elements such as
/// `(1,2)` or `{0,2}` stay single tokens even if they pick up inner spaces.
fn tokens(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start: Option<usize> = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => {
                depth += 1;
                start.get_or_insert(i);
            }
            ')' | ']' | '}' => depth = depth.saturating_sub(1),
            c if c.is_whitespace() && depth == 0 => {
                if let Some(b) = start.take() {
                    out.push(&s[b..i]);
                }
            }
            _ => {
                start.get_or_insert(i);
            }
        }
    }
    if let Some(b) = start {
        out.push(&s[b..]);
    }
    out
}

pub fn parse_space(text: &str) -> Result<FiniteQlr> {
    let mut name: Option<String> = None;
    let mut quantale: Option<QuantaleDesc> = None;
    let mut points: Option<Vec<String>> = None;
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| {
            QuantaleError::Parse(format!("line {}: {msg}: {line:?}", lineno + 1))
        };
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match head {
            "name" => {
                if name.replace(rest.trim().to_string()).is_some() {
                    return Err(err("duplicate name directive"));
                }
            }
            "quantale" => {
                if quantale.replace(QuantaleDesc::parse(rest.trim())?).is_some() {
                    return Err(err("duplicate quantale directive"));
                }
            }
            "points" => {
                let ps: Vec<String> = tokens(rest).into_iter().map(String::from).collect();
                if ps.is_empty() {
                    return Err(err("points directive needs at least one name"));
                }
                if points.replace(ps).is_some() {
                    return Err(err("duplicate points directive"));
                }
            }
            "dist" => {
                let (pt, vals) = rest.split_once(':').ok_or_else(|| {
                    err("dist row needs the form `dist <point>: <elements>`")
                })?;
                rows.push((
                    pt.trim().to_string(),
                    tokens(vals).into_iter().map(String::from).collect(),
                ));
            }
            _ => return Err(err("unknown directive")),
        }
    }
    let quantale =
        quantale.ok_or_else(|| QuantaleError::Parse("missing quantale directive".into()))?;
    let points = points.ok_or_else(|| QuantaleError::Parse("missing points directive".into()))?;
    let n = points.len();
    let mut dist: Vec<Option<Vec<QuantaleElem>>> = vec![None; n];
    for (pt, vals) in rows {
        let i = points.iter().position(|p| *p == pt).ok_or_else(|| {
            QuantaleError::Parse(format!("dist row for unknown point {pt:?}"))
        })?;
        if vals.len() != n {
            return Err(QuantaleError::Parse(format!(
                "dist row for {pt:?} has {} entries, expected {n}",
                vals.len()
            )));
        }
        let parsed: Result<Vec<QuantaleElem>> =
            vals.iter().map(|v| quantale.parse_elem(v)).collect();
        if dist[i].replace(parsed?).is_some() {
            return Err(QuantaleError::Parse(format!("duplicate dist row for {pt:?}")));
        }
    }
    if let Some(i) = dist.iter().position(Option::is_none) {
        return Err(QuantaleError::Parse(format!(
            "missing dist row for point {:?}",
            points[i]
        )));
    }
    FiniteQlr::new(
        name.unwrap_or_else(|| "space".into()),
        quantale,
        points,
        dist.into_iter().map(Option::unwrap).collect(),
    )
}

pub fn render_space(s: &FiniteQlr) -> String {
    let mut out = String::new();
    out.push_str(&format!("name {}\n", s.name));
    out.push_str(&format!("quantale {}\n", s.quantale.name()));
    out.push_str(&format!("points {}\n", s.points.join(" ")));
    for (i, p) in s.points.iter().enumerate() {
        let row: Vec<String> = (0..s.size()).map(|j| s.quantale.render(s.d(i, j))).collect();
        out.push_str(&format!("dist {p}: {}\n", row.join(" ")));
    }
    out
}
