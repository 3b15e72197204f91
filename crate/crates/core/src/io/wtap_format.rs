use std::fmt::Write;

use crate::error::{Error, Result};
use crate::io::{parse_count, parse_vertex, parse_weight};
use crate::tree::{Link, RootedTree};
use crate::wtap::WtapInstance;

fn expect_fields(fields: &[&str], keyword: &str, arity: usize, line: usize) -> Result<()> {
    if fields.first().map(|f| f.eq_ignore_ascii_case(keyword)) != Some(true)
        || fields.len() != arity + 1
    {
        return Err(Error::Parse {
            line,
            message: format!(
                "expected `{keyword}` with {arity} values, found {:?}",
                fields.join(" ")
            ),
        });
    }
    Ok(())
}

/// Parses the line-oriented WTAP format. Vertices are 1-based in the text and
/// 0-based in the result; `#` starts a comment.
pub fn parse_wtap(text: &str) -> Result<WtapInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| Error::Parse {
            line: text.lines().count() + 1,
            message: format!("unexpected end of input, expected {what}"),
        })
    };

    let (line, header) = next("header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    expect_fields(&fields, "WTAP", 2, line)?;
    let n = parse_count(fields[1], line)?;
    let m = parse_count(fields[2], line)?;
    if n == 0 {
        return Err(Error::Parse {
            line,
            message: "a tree needs at least one vertex".into(),
        });
    }

    let (line, root_line) = next("ROOT")?;
    let fields: Vec<&str> = root_line.split_whitespace().collect();
    expect_fields(&fields, "ROOT", 1, line)?;
    let root = parse_vertex(fields[1], n, line)?;

    let mut edges = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let (line, text) = next("EDGE")?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        expect_fields(&fields, "EDGE", 2, line)?;
        edges.push((
            parse_vertex(fields[1], n, line)?,
            parse_vertex(fields[2], n, line)?,
        ));
    }
    let tree = RootedTree::new(n, &edges, root)?;

    let mut links = Vec::with_capacity(m);
    for id in 0..m {
        let (line, text) = next("LINK")?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        expect_fields(&fields, "LINK", 3, line)?;
        let a = parse_vertex(fields[1], n, line)?;
        let b = parse_vertex(fields[2], n, line)?;
        if a == b {
            return Err(Error::SelfLoopLink { line });
        }
        let weight = parse_weight(fields[3], line, "")?;
        links.push(Link { id, a, b, weight });
    }
    if let Some((line, extra)) = lines.next() {
        return Err(Error::Parse {
            line,
            message: format!("unexpected content after {m} links: {extra:?}"),
        });
    }
    WtapInstance::new(tree, links)
}

/// Canonical text of an instance; `parse_wtap(&write_wtap(x))` reproduces `x`
/// (up to the shadow-closure flag, which is not serialized).
pub fn write_wtap(instance: &WtapInstance) -> String {
    let tree = &instance.tree;
    let mut out = String::new();
    writeln!(out, "WTAP {} {}", tree.vertex_count(), instance.links.len()).unwrap();
    writeln!(out, "ROOT {}", tree.root() + 1).unwrap();
    for &(a, b) in tree.edges() {
        writeln!(out, "EDGE {} {}", a + 1, b + 1).unwrap();
    }
    for l in &instance.links {
        writeln!(out, "LINK {} {} {}", l.a + 1, l.b + 1, l.weight).unwrap();
    }
    out
}
