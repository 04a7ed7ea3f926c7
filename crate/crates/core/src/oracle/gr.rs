//! Reader for the PACE 2018 `.gr` Steiner tree format.

use super::{SteinerInstance, WeightedGraph};
use crate::error::{Error, Result};

pub fn parse_gr(text: &str) -> Result<SteinerInstance> {
    let bad = |line: &str| Error::InvalidInput(format!("bad gr line: {line:?}"));
    let mut graph: Option<WeightedGraph> = None;
    let mut terminals = Vec::new();
    for line in text.lines() {
        let mut it = line.split_whitespace();
        let Some(head) = it.next() else { continue };
        let mut num = || -> Result<i64> { it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad(line)) };
        match head.to_ascii_lowercase().as_str() {
            "nodes" => graph = Some(WeightedGraph::new(num()? as usize)),
            "e" => {
                let (u, v, w) = (num()?, num()?, num()?);
                let g = graph.as_mut().ok_or_else(|| bad(line))?;
                let n = g.num_vertices() as i64;
                if !(1..=n).contains(&u) || !(1..=n).contains(&v) || w < 0 {
                    return Err(bad(line));
                }
                g.add_edge(u as usize - 1, v as usize - 1, w);
            }
            "t" => terminals.push(num()? as usize - 1),
            _ => {}
        }
    }
    let graph = graph.ok_or_else(|| Error::InvalidInput("gr text has no Nodes line".into()))?;
    if terminals.is_empty() || terminals.iter().any(|&t| t >= graph.num_vertices()) {
        return Err(Error::InvalidInput("gr terminals missing or out of range".into()));
    }
    Ok(SteinerInstance::new(graph, terminals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::dreyfus_wagner;

    #[test]
    fn reads_a_small_instance() {
        let text = "SECTION Graph\nNodes 4\nEdges 4\nE 1 2 1\nE 2 3 1\nE 3 4 1\nE 4 1 5\nEND\n\n\
                    SECTION Terminals\nTerminals 2\nT 1\nT 4\nEND\nEOF\n";
        let inst = parse_gr(text).unwrap();
        assert_eq!(inst.terminals, vec![0, 3]);
        assert_eq!(dreyfus_wagner(&inst).unwrap().length, 3);
    }

    #[test]
    fn rejects_edges_before_nodes() {
        assert!(parse_gr("E 1 2 3\n").is_err());
    }
}
