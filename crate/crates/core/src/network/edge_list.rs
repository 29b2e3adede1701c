use std::collections::HashSet;

use super::{Arc, Network, NetworkError, NodeId};

/// Parses an edge-list document into a [`Network`].
///
/// One record per line, `FROM TO LENGTH [directed|undirected]`. Records are
/// undirected unless marked otherwise, and an undirected record yields the two
/// arcs `FROM->TO` and `TO->FROM`. `#` starts a comment; a `# name: <label>`
/// comment overrides `default_name`. Blank lines are ignored.
pub fn parse_edge_list(default_name: &str, text: &str) -> Result<Network, NetworkError> {
    let mut name = default_name.to_string();
    let mut arcs = Vec::new();
    let mut seen = HashSet::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let (content, comment) = match raw.find('#') {
            Some(pos) => (&raw[..pos], Some(&raw[pos + 1..])),
            None => (raw, None),
        };
        if let Some(label) = comment.and_then(|c| c.trim().strip_prefix("name:")) {
            name = label.trim().to_string();
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if !(3..=4).contains(&fields.len()) {
            return Err(malformed(line, format!("expected 3 or 4 fields, found {}", fields.len())));
        }
        let from = parse_node(line, fields[0])?;
        let to = parse_node(line, fields[1])?;
        let length: i64 = fields[2]
            .parse()
            .map_err(|_| malformed(line, format!("invalid length `{}`", fields[2])))?;
        if length < 0 {
            return Err(NetworkError::NegativeLength { line, length });
        }
        let directed = match fields.get(3).copied() {
            None | Some("undirected") => false,
            Some("directed") => true,
            Some(other) => return Err(malformed(line, format!("unknown edge kind `{other}`"))),
        };
        if from == to {
            return Err(malformed(line, format!("self-loop at node {from}")));
        }
        let length = length as u64;
        let mut push = |from: NodeId, to: NodeId| {
            if !seen.insert((from, to)) {
                return Err(malformed(line, format!("duplicate arc {from} -> {to}")));
            }
            arcs.push(Arc { from, to, length });
            Ok(())
        };
        push(from, to)?;
        if !directed {
            push(to, from)?;
        }
    }
    Network::new(name, arcs)
}

fn parse_node(line: usize, field: &str) -> Result<NodeId, NetworkError> {
    field
        .parse()
        .map(NodeId)
        .map_err(|_| malformed(line, format!("invalid node id `{field}`")))
}

fn malformed(line: usize, reason: String) -> NetworkError {
    NetworkError::Malformed { line, reason }
}
