//! JSON formats and small textual arguments.
//!
//! Graphs are read and written as
//! `{"n": 4, "group": {"kind": "cyclic", "k": 2}, "edges": [[0, 1, 1.0, 1], ...], "measure": [...]}`.
//! A cyclic signature is an integer exponent; a circle signature is an angle
//! in turns. A missing `measure` means `μ ≡ 1`.

use serde::{Deserialize, Serialize};
use serde_json::Number;

use crate::error::{Error, Result};
use crate::functional::VertexFunction;
use crate::graph::{MagneticGraph, VertexSet};
use crate::group::{Group, GroupElement};

/// Largest vertex count accepted from a file.
pub const MAX_FILE_VERTICES: usize = 1 << 16;

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum GroupSpec {
    Cyclic { k: u32 },
    Circle,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    group: GroupSpec,
    edges: Vec<(usize, usize, f64, Number)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    measure: Option<Vec<f64>>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn parse_graph(text: &str) -> Result<MagneticGraph> {
    let file: GraphFile = serde_json::from_str(text).map_err(parse_error)?;
    if file.n > MAX_FILE_VERTICES {
        return Err(Error::Parse(format!("{} vertices exceeds the limit of {MAX_FILE_VERTICES}", file.n)));
    }
    let group = match file.group {
        GroupSpec::Cyclic { k } => Group::cyclic(k)?,
        GroupSpec::Circle => Group::Circle,
    };
    let edges =
        file.edges.iter().map(|(u, v, w, sig)| Ok((*u, *v, *w, signature(group, sig)?))).collect::<Result<Vec<_>>>()?;
    let measure = file.measure.unwrap_or_else(|| vec![1.0; file.n]);
    MagneticGraph::new(file.n, group, edges, measure)
}

fn signature(group: Group, sig: &Number) -> Result<GroupElement> {
    match group {
        Group::Cyclic(k) => {
            let j = sig.as_i64().ok_or_else(|| Error::Parse(format!("cyclic signature {sig} is not an integer")))?;
            GroupElement::cyclic(j, k)
        }
        Group::Circle => {
            let turns = sig.as_f64().ok_or_else(|| Error::Parse(format!("invalid angle {sig}")))?;
            GroupElement::from_turns(turns)
        }
    }
}

/// Serialize with every edge in stored orientation and the measure spelled out.
pub fn graph_to_json(g: &MagneticGraph) -> String {
    let group = match g.group() {
        Group::Cyclic(k) => GroupSpec::Cyclic { k },
        Group::Circle => GroupSpec::Circle,
    };
    let edges = g
        .edges()
        .iter()
        .map(|e| {
            let sig = match e.sig {
                GroupElement::Cyclic { exponent, .. } => Number::from(exponent),
                GroupElement::Circle { .. } => Number::from_f64(e.sig.turns()).expect("finite angle"),
            };
            (e.u, e.v, e.weight, sig)
        })
        .collect();
    let file = GraphFile { n: g.n(), group, edges, measure: Some(g.measure().to_vec()) };
    serde_json::to_string(&file).expect("graph serializes")
}

pub fn parse_vertex_function(text: &str) -> Result<VertexFunction> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// A nonempty subset of `0..n`, written as a hexadecimal bitmask with an
/// optional `0x` prefix, or `V` for the whole vertex set.
pub fn parse_subset(text: &str, n: usize) -> Result<VertexSet> {
    let t = text.trim();
    if t == "V" {
        if n == 0 || n > VertexSet::MAX_VERTICES {
            return Err(Error::Parse(format!("no subset mask for {n} vertices")));
        }
        return Ok(VertexSet::full(n));
    }
    let digits = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    let mask = u64::from_str_radix(digits, 16).map_err(|e| Error::Parse(format!("subset mask {text:?}: {e}")))?;
    if mask == 0 {
        return Err(Error::Parse("subset mask is empty".into()));
    }
    let top = 63 - mask.leading_zeros() as usize;
    if top >= n {
        return Err(Error::VertexOutOfRange { vertex: top, n });
    }
    Ok(VertexSet::from_mask(mask))
}

/// Inverse of [`parse_subset`]: `V` for the full set, else `0x…`.
pub fn format_subset(set: VertexSet, n: usize) -> String {
    if n <= VertexSet::MAX_VERTICES && set == VertexSet::full(n) {
        "V".to_string()
    } else {
        format!("{:#x}", set.mask())
    }
}
