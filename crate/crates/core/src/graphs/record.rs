use serde::{Deserialize, Serialize};

use super::StableGraph;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub weight: u32,
}

/// Serialized form of a graph: `genus`, `vertices: [{weight}]`,
/// `edges: [[u, v]]` (loops as `[u, u]`) and `markings`, the vertex of each
/// marking in order. Enumeration output adds the optional annotations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub genus: u32,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<[usize; 2]>,
    pub markings: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aut_order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_sign_degenerate: Option<bool>,
}

impl GraphRecord {
    pub fn to_graph(&self) -> Result<StableGraph> {
        let g = StableGraph::new(
            self.vertices.iter().map(|v| v.weight).collect(),
            self.edges.clone(),
            self.markings.clone(),
        )?;
        if g.genus() != self.genus {
            return Err(Error::InvalidGraph(format!(
                "declared genus {} but structure has genus {}",
                self.genus,
                g.genus()
            )));
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse { what: "graph record".into(), detail: e.to_string() })
    }
}

impl From<&StableGraph> for GraphRecord {
    fn from(g: &StableGraph) -> Self {
        GraphRecord {
            genus: g.genus(),
            vertices: g.weights().iter().map(|&weight| VertexRecord { weight }).collect(),
            edges: g.edges().to_vec(),
            markings: g.markings().to_vec(),
            aut_order: None,
            edge_sign_degenerate: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_layout() {
        let g = StableGraph::new(vec![1, 0], vec![[1, 0], [1, 1]], vec![1, 1]).unwrap();
        let rec = GraphRecord::from(&g);
        assert_eq!(
            rec.to_json(),
            r#"{"genus":2,"vertices":[{"weight":1},{"weight":0}],"edges":[[1,0],[1,1]],"markings":[1,1]}"#
        );
        assert_eq!(rec.to_graph().unwrap(), g);
    }

    #[test]
    fn rejects_inconsistent_genus() {
        let rec = GraphRecord::from_json(r#"{"genus":3,"vertices":[{"weight":1}],"edges":[],"markings":[0]}"#).unwrap();
        assert!(rec.to_graph().is_err());
        assert!(GraphRecord::from_json("{").is_err());
    }
}
