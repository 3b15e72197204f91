use std::fmt::Write;

use crate::error::{Error, Result};
use crate::io::{parse_count, parse_vertex, parse_weight, CONTRACT_HINT};
use crate::steiner::SteinerInstance;

#[derive(PartialEq)]
enum Section {
    Outside,
    Graph,
    Terminals,
    Skipped,
}

/// Parses the Graph and Terminals sections of a SteinLib STP file. Other sections
/// are skipped with a warning; declared node, edge and terminal counts are checked.
pub fn parse_stp(text: &str) -> Result<SteinerInstance> {
    let mut section = Section::Outside;
    let mut nodes: Option<usize> = None;
    let mut declared_edges: Option<(usize, usize)> = None;
    let mut declared_terminals: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut terminals: Vec<usize> = Vec::new();
    let mut seen_graph = false;
    let mut seen_terminals = false;
    let mut finished = false;

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let key = fields[0].to_ascii_uppercase();
        let parse_err = |message: String| Error::Parse { line, message };

        if section == Section::Outside {
            match key.as_str() {
                "SECTION" => {
                    let name = fields
                        .get(1)
                        .map(|s| s.to_ascii_uppercase())
                        .unwrap_or_default();
                    section = match name.as_str() {
                        "GRAPH" => {
                            seen_graph = true;
                            Section::Graph
                        }
                        "TERMINALS" => {
                            seen_terminals = true;
                            Section::Terminals
                        }
                        _ => {
                            if name != "COMMENT" {
                                log::warn!(
                                    "line {line}: skipping unsupported section {:?}",
                                    fields.get(1).unwrap_or(&"")
                                );
                            }
                            Section::Skipped
                        }
                    };
                }
                "EOF" => {
                    finished = true;
                    break;
                }
                _ if line == 1 || key.starts_with("33D32945") => {}
                _ => {
                    return Err(parse_err(format!(
                        "unexpected {content:?} outside a section"
                    )))
                }
            }
            continue;
        }
        if key == "END" {
            section = Section::Outside;
            continue;
        }
        match section {
            Section::Graph => match key.as_str() {
                "NODES" if fields.len() == 2 => nodes = Some(parse_count(fields[1], line)?),
                "EDGES" if fields.len() == 2 => {
                    declared_edges = Some((parse_count(fields[1], line)?, line))
                }
                "E" => {
                    if fields.len() != 4 {
                        return Err(parse_err(format!(
                            "edge line needs `E u v w`, found {content:?}"
                        )));
                    }
                    let n = nodes
                        .ok_or_else(|| parse_err("edge before the Nodes declaration".into()))?;
                    let u = parse_vertex(fields[1], n, line)?;
                    let v = parse_vertex(fields[2], n, line)?;
                    let w = parse_weight(fields[3], line, CONTRACT_HINT)?;
                    if u == v {
                        return Err(parse_err(format!("edge {content:?} is a self-loop")));
                    }
                    edges.push((u, v, w));
                }
                "NODES" | "EDGES" => {
                    return Err(parse_err(format!("malformed declaration {content:?}")))
                }
                _ => log::warn!("line {line}: ignoring graph entry {content:?}"),
            },
            Section::Terminals => match key.as_str() {
                "TERMINALS" if fields.len() == 2 => {
                    declared_terminals = Some((parse_count(fields[1], line)?, line))
                }
                "T" => {
                    if fields.len() != 2 {
                        return Err(parse_err(format!(
                            "terminal line needs `T v`, found {content:?}"
                        )));
                    }
                    let n = nodes
                        .ok_or_else(|| parse_err("terminal before the Nodes declaration".into()))?;
                    terminals.push(parse_vertex(fields[1], n, line)?);
                }
                _ => log::warn!("line {line}: ignoring terminal entry {content:?}"),
            },
            Section::Skipped | Section::Outside => {}
        }
    }

    if !seen_graph {
        return Err(Error::MissingSection("Graph"));
    }
    if !seen_terminals {
        return Err(Error::MissingSection("Terminals"));
    }
    if !finished {
        log::warn!("STP input ends without the EOF keyword");
    }
    let n = nodes.ok_or(Error::Parse {
        line: 0,
        message: "Graph section lacks a Nodes declaration".into(),
    })?;
    if let Some((declared, line)) = declared_edges {
        if declared != edges.len() {
            return Err(Error::Parse {
                line,
                message: format!("declared {declared} edges but found {}", edges.len()),
            });
        }
    }
    if let Some((declared, line)) = declared_terminals {
        if declared != terminals.len() {
            return Err(Error::Parse {
                line,
                message: format!(
                    "declared {declared} terminals but found {}",
                    terminals.len()
                ),
            });
        }
    }
    if terminals.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no terminals listed".into(),
        });
    }
    SteinerInstance::new(n, &edges, &terminals)
}

/// Canonical STP text with Graph and Terminals sections only.
pub fn write_stp(instance: &SteinerInstance) -> String {
    let mut out = String::from("33D32945 STP File, STP Format Version 1.0\n\nSECTION Graph\n");
    writeln!(out, "Nodes {}", instance.vertex_count()).unwrap();
    writeln!(out, "Edges {}", instance.edges().len()).unwrap();
    for e in instance.edges() {
        writeln!(out, "E {} {} {}", e.u + 1, e.v + 1, e.weight).unwrap();
    }
    out.push_str("END\n\nSECTION Terminals\n");
    writeln!(out, "Terminals {}", instance.terminals().len()).unwrap();
    for t in instance.terminals() {
        writeln!(out, "T {}", t + 1).unwrap();
    }
    out.push_str("END\n\nEOF\n");
    out
}
