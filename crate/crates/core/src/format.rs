//! Tree serialization: JSON (round-tripping), Newick and DOT (export only).
//!
//! JSON schema: every vertex is `{"labels": [..], "children": [..]}` with
//! labels ascending and `children` omitted on leaves; timed trees add a
//! `"length"` field on internal vertices (the edge joining the vertex to its
//! parent; the root carries its stem). Newick output labels leaves only;
//! lengths, when requested, follow the same internal-vertex convention. DOT
//! output has one node per vertex labeled by its block.

use crate::error::{Error, Result};
use crate::labels::LabelSet;
use crate::rates::TimedTree;
use crate::tree::{FragTree, TreeShape};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Serialize, Deserialize)]
struct JsonVertex {
    labels: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    length: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<JsonVertex>,
}

fn vertex_of(t: &FragTree, timed: Option<&TimedTree>) -> JsonVertex {
    JsonVertex {
        labels: t.label().labels().collect(),
        length: timed.and_then(|tt| tt.length_below(t.label())),
        children: t
            .children()
            .iter()
            .map(|c| vertex_of(c, timed))
            .collect(),
    }
}

pub fn to_json(t: &FragTree) -> String {
    serde_json::to_string(&vertex_of(t, None)).expect("tree serialization cannot fail")
}

pub fn timed_to_json(tt: &TimedTree) -> String {
    serde_json::to_string(&vertex_of(&tt.tree, Some(tt))).expect("tree serialization cannot fail")
}

/// Parse the JSON schema back into a validated tree (lengths are ignored).
pub fn from_json(s: &str) -> Result<FragTree> {
    let v: JsonVertex = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    let t = build(&v)?;
    t.validate()?;
    Ok(t)
}

fn build(v: &JsonVertex) -> Result<FragTree> {
    let label = LabelSet::from_labels(v.labels.iter().copied())?;
    let mut children = v.children.iter().map(build).collect::<Result<Vec<_>>>()?;
    children.sort_by_key(|c| {
        if c.label().is_empty() {
            0
        } else {
            c.label().min_label()
        }
    });
    Ok(FragTree::from_raw(label, children))
}

/// Newick string with numeric leaf labels, e.g. `((1,2),3);`.
pub fn to_newick(t: &FragTree) -> String {
    let mut out = String::new();
    write_newick(t, None, &mut out);
    out.push(';');
    out
}

/// Newick with branch lengths on internal vertices (and a root stem).
pub fn timed_to_newick(tt: &TimedTree) -> String {
    let mut out = String::new();
    write_newick(&tt.tree, Some(tt), &mut out);
    out.push(';');
    out
}

fn write_newick(t: &FragTree, timed: Option<&TimedTree>, out: &mut String) {
    if t.is_leaf() {
        let _ = write!(out, "{}", t.label().min_label());
    } else {
        out.push('(');
        for (i, c) in t.children().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write_newick(c, timed, out);
        }
        out.push(')');
    }
    if let Some(tt) = timed {
        if let Some(len) = tt.length_below(t.label()) {
            let _ = write!(out, ":{len}");
        }
    }
}

/// DOT digraph with one node per vertex labeled by its block.
pub fn to_dot(t: &FragTree, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {name} {{");
    let _ = writeln!(out, "  node [shape=box];");
    let mut next = 0usize;
    emit_dot(t, &mut next, &mut out);
    out.push_str("}\n");
    out
}

fn emit_dot(t: &FragTree, next: &mut usize, out: &mut String) -> usize {
    let id = *next;
    *next += 1;
    let _ = writeln!(out, "  v{id} [label=\"{}\"];", t.label());
    for c in t.children() {
        let cid = emit_dot(c, next, out);
        let _ = writeln!(out, "  v{id} -> v{cid};");
    }
    id
}

/// DOT digraph of an unlabeled shape, nodes labeled by subtree leaf counts.
pub fn shape_to_dot(shape: &TreeShape, name: &str) -> String {
    fn emit(s: &TreeShape, next: &mut usize, out: &mut String) -> usize {
        let id = *next;
        *next += 1;
        let _ = writeln!(out, "  v{id} [label=\"{}\"];", s.leaves());
        for c in s.children() {
            let cid = emit(c, next, out);
            let _ = writeln!(out, "  v{id} -> v{cid};");
        }
        id
    }
    let mut out = String::new();
    let _ = writeln!(out, "digraph {name} {{");
    let _ = writeln!(out, "  node [shape=circle];");
    let mut next = 0usize;
    emit(shape, &mut next, &mut out);
    out.push_str("}\n");
    out
}
