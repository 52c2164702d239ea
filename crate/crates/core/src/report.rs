//! Report emission: DOT window graphs, JSON verdict/witness reports, CSV
//! census tables.

use crate::commuting::neighbors_in_class;
use crate::conjugacy::ClassDescriptor;
use crate::element::AffineElement;
use crate::error::Result;
use crate::graph::{ConnectivityVerdict, PathWitness, WindowComponents};
use crate::text::print_element;
use serde::{Deserialize, Serialize};

/// Output format of the command line front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Dot,
    Text,
}

/// JSON report for a window graph analysis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphReport {
    pub descriptor: ClassDescriptor,
    pub verdict: ConnectivityVerdict,
    pub window: i64,
    pub node_count: usize,
    pub component_sizes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

/// Render a window graph in DOT, vertices labelled by cycle text.
pub fn window_graph_dot(
    d: &ClassDescriptor,
    comps: &WindowComponents,
    window: i64,
) -> Result<String> {
    let mut out = String::from("graph class_window {\n");
    out.push_str(&format!("  label=\"{} window {}\";\n", d.to_compact_text(), window));
    for (i, v) in comps.vertices.iter().enumerate() {
        out.push_str(&format!("  v{} [label=\"{}\"];\n", i, print_element(v, true)?));
    }
    let index: std::collections::HashMap<&AffineElement, usize> =
        comps.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    for (i, v) in comps.vertices.iter().enumerate() {
        for nb in neighbors_in_class(v, d, window)? {
            if let Some(&j) = index.get(&nb) {
                if i < j {
                    out.push_str(&format!("  v{i} -- v{j};\n"));
                }
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

/// One row per component: size and a representative vertex.
pub fn components_csv(comps: &WindowComponents) -> Result<String> {
    let groups = comps.components();
    let mut out = String::from("component,size,representative\n");
    for (c, members) in groups.iter().enumerate() {
        let rep = &comps.vertices[members[0]];
        out.push_str(&format!("{c},{},{}\n", members.len(), print_element(rep, true)?));
    }
    Ok(out)
}

/// Witness vertices as canonical cycle text.
pub fn witness_texts(w: &PathWitness) -> Result<Vec<String>> {
    w.vertices.iter().map(|v| print_element(v, true)).collect()
}
