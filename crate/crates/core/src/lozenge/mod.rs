//! Lozenges on the fat tree.
//!
//! For the flows built here the fat tree of lozenges is the universal cover
//! of the blueprint graph: vertices are vertical orbits, edges are lozenges
//! (lifts of Birkhoff annuli). The corner between two cyclically consecutive
//! tree edges is a half-leaf of the vertex orbit, stable when the boundary
//! cycle through that corner is incoming and unstable when it is outgoing.
//! Two lozenges are adjacent exactly when their edges are consecutive.

mod skew;

pub use skew::{
    bfs_chain_length, lozenge_neighbors, skew_chain_connected, skew_partner, skew_partner_inverse, SkewConnection, SkewError,
    SkewOrbit, BFS_DEPTH,
};

use std::collections::{BTreeMap, VecDeque};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::blueprint::{validate_conditions, FatGraphBlueprint, Polarity, SideId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LozengeError {
    #[error("radius must be non-negative, got {0}")]
    NegativeRadius(i64),
    #[error("blueprint admits no incoming/outgoing polarity")]
    NoPolarity,
    #[error("blueprint fails its conditions: {0}")]
    Conditions(String),
    #[error("root vertex index {0} out of range")]
    Root(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("path needs at least two vertices")]
    TooShort,
    #[error("vertex index {0} is not in the patch")]
    Unknown(usize),
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("vertex {0} repeats, path is not simple")]
    Repeated(usize),
}

/// Label of a half-leaf at a vertical orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SideType {
    Stable,
    Unstable,
}

impl SideType {
    fn from_polarity(p: Polarity) -> Self {
        match p {
            Polarity::Incoming => SideType::Stable,
            Polarity::Outgoing => SideType::Unstable,
        }
    }

    pub fn letter(self) -> char {
        match self {
            SideType::Stable => 's',
            SideType::Unstable => 'u',
        }
    }
}

impl fmt::Display for SideType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    /// Base half-edge.
    pub half_edge: usize,
    /// Tree vertex across this half-edge, `None` past the patch boundary.
    pub neighbor: Option<usize>,
    /// Label of the corner between this slot and the next one.
    pub corner_after: SideType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeVertex {
    pub name: String,
    pub base: usize,
    /// Reduced word of base half-edges walked from the root.
    pub word: Vec<usize>,
    pub depth: usize,
    /// In the cyclic order of the base vertex.
    pub slots: Vec<Slot>,
}

impl TreeVertex {
    pub fn prongs(&self) -> usize {
        self.slots.len() / 2
    }

    pub fn slot_towards(&self, w: usize) -> Option<usize> {
        self.slots.iter().position(|s| s.neighbor == Some(w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub base_edge: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FatTreePatch {
    pub radius: usize,
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<TreeEdge>,
    vertex_names: Vec<String>,
    half_edge_names: Vec<String>,
    edge_names: Vec<String>,
}

/// Ball of radius `r` around the lift of vertex 0.
pub fn build_fat_tree(bp: &FatGraphBlueprint, radius: i64) -> Result<FatTreePatch, LozengeError> {
    build_fat_tree_at(bp, 0, radius)
}

pub fn build_fat_tree_at(bp: &FatGraphBlueprint, root: usize, radius: i64) -> Result<FatTreePatch, LozengeError> {
    if radius < 0 {
        return Err(LozengeError::NegativeRadius(radius));
    }
    if root >= bp.vertices.len() {
        return Err(LozengeError::Root(root));
    }
    let radius = radius as usize;
    let cycles = bp.trace_boundary_cycles();
    let polarity = bp.resolve_polarity(&cycles).ok_or(LozengeError::NoPolarity)?;
    let report = validate_conditions(bp, &cycles, &polarity);
    if !report.passed() {
        let items: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(LozengeError::Conditions(items.join("; ")));
    }
    let cycle_of: BTreeMap<SideId, usize> = crate::blueprint::side_cycle_map(&cycles);
    let label = |h: usize| SideType::from_polarity(polarity[cycle_of[&bp.side_after(h)]]);

    let make = |base: usize, word: Vec<usize>, depth: usize| {
        let mut name = bp.vertices[root].name.clone();
        for &h in &word {
            name.push('/');
            name.push_str(&bp.half_edges[h].name);
        }
        TreeVertex {
            name,
            base,
            word,
            depth,
            slots: bp.vertices[base]
                .rotation
                .iter()
                .map(|&h| Slot {
                    half_edge: h,
                    neighbor: None,
                    corner_after: label(h),
                })
                .collect(),
        }
    };

    let mut vertices = vec![make(root, Vec::new(), 0)];
    let mut edges = Vec::new();
    // (vertex, half-edge it was entered through)
    let mut queue = VecDeque::from([(0usize, None::<usize>)]);
    while let Some((vi, entered)) = queue.pop_front() {
        if vertices[vi].depth == radius {
            continue;
        }
        for si in 0..vertices[vi].slots.len() {
            let h = vertices[vi].slots[si].half_edge;
            if Some(h) == entered {
                continue;
            }
            let far = bp.opposite_half_edge(h);
            let mut word = vertices[vi].word.clone();
            word.push(h);
            let child = make(bp.half_edges[far].vertex, word, vertices[vi].depth + 1);
            let ci = vertices.len();
            vertices.push(child);
            vertices[vi].slots[si].neighbor = Some(ci);
            let back = vertices[ci].slots.iter().position(|s| s.half_edge == far).unwrap();
            vertices[ci].slots[back].neighbor = Some(vi);
            edges.push(TreeEdge {
                a: vi,
                b: ci,
                base_edge: bp.half_edges[h].edge,
            });
            queue.push_back((ci, Some(far)));
        }
    }
    Ok(FatTreePatch {
        radius,
        vertices,
        edges,
        vertex_names: bp.vertices.iter().map(|v| v.name.clone()).collect(),
        half_edge_names: bp.half_edges.iter().map(|h| h.name.clone()).collect(),
        edge_names: bp.edges.iter().map(|e| e.name.clone()).collect(),
    })
}

impl FatTreePatch {
    pub fn vertex_by_name(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.vertices[v].slots.iter().filter_map(|s| s.neighbor)
    }

    /// Connected with one fewer edge than vertices.
    pub fn is_tree(&self) -> bool {
        let n = self.vertices.len();
        if self.edges.len() + 1 != n {
            return false;
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    pub fn labels_alternate(&self) -> bool {
        self.vertices.iter().all(|v| {
            let n = v.slots.len();
            (0..n).all(|i| v.slots[i].corner_after != v.slots[(i + 1) % n].corner_after)
        })
    }

    /// Unique path between two patch vertices.
    pub fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let n = self.vertices.len();
        if from >= n || to >= n {
            return None;
        }
        let mut prev = vec![usize::MAX; n];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for w in self.neighbors(v) {
                if prev[w] == usize::MAX {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        if prev[to] == usize::MAX {
            return None;
        }
        let mut out = vec![to];
        while *out.last().unwrap() != from {
            out.push(prev[*out.last().unwrap()]);
        }
        out.reverse();
        Some(out)
    }

    /// Canonical encoding of the radius-`r` ball around `v`, read in cyclic
    /// order from slot 0 by base half-edge names. Two lifts of one base
    /// vertex whose balls fit in the patch have equal signatures exactly when
    /// a deck transformation matches them.
    pub fn ball_signature(&self, v: usize, r: usize) -> Option<String> {
        let mut s = String::new();
        self.signature_rec(v, None, r, &mut s)?;
        Some(s)
    }

    fn signature_rec(&self, v: usize, from: Option<usize>, r: usize, out: &mut String) -> Option<()> {
        let tv = &self.vertices[v];
        out.push('(');
        out.push_str(&self.vertex_names[tv.base]);
        if r > 0 {
            for slot in &tv.slots {
                out.push(' ');
                out.push_str(&self.half_edge_names[slot.half_edge]);
                out.push(slot.corner_after.letter());
                let w = slot.neighbor?;
                if Some(w) != from {
                    self.signature_rec(w, Some(v), r - 1, out)?;
                }
            }
        }
        out.push(')');
        Some(())
    }

    /// Edge list with cyclic-order annotations.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# fat tree patch radius={} vertices={} edges={}",
            self.radius,
            self.vertices.len(),
            self.edges.len()
        );
        for v in &self.vertices {
            let _ = write!(
                s,
                "vertex {} base={} depth={} prongs={} order:",
                v.name,
                self.vertex_names[v.base],
                v.depth,
                v.prongs()
            );
            for slot in &v.slots {
                let nb = slot.neighbor.map_or("-", |w| self.vertices[w].name.as_str());
                let _ = write!(s, " {} {}", nb, slot.corner_after);
            }
            s.push('\n');
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "edge {} {} base={}",
                self.vertices[e.a].name, self.vertices[e.b].name, self.edge_names[e.base_edge]
            );
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Corner {
    pub vertex: usize,
    pub prongs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lozenge {
    pub corners: [Corner; 2],
    pub base_edge: usize,
    pub adjacent_to_previous: bool,
    /// Half-leaf shared with the previous lozenge, when adjacent.
    pub shared_side: Option<SideType>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LozengeChain {
    pub lozenges: Vec<Lozenge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scallop {
    SScalloped,
    UScalloped,
    Neither,
}

impl fmt::Display for Scallop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scallop::SScalloped => "s-scalloped",
            Scallop::UScalloped => "u-scalloped",
            Scallop::Neither => "neither",
        })
    }
}

/// One lozenge per path edge. At each interior vertex the two edges are
/// adjacent when cyclically consecutive; for valence 2 both corners qualify
/// and the one following the incoming edge is used.
pub fn chain_along_path(patch: &FatTreePatch, path: &[usize]) -> Result<LozengeChain, ChainError> {
    if path.len() < 2 {
        return Err(ChainError::TooShort);
    }
    let n = patch.vertices.len();
    if let Some(&bad) = path.iter().find(|&&v| v >= n) {
        return Err(ChainError::Unknown(bad));
    }
    let mut seen = vec![false; n];
    for &v in path {
        if std::mem::replace(&mut seen[v], true) {
            return Err(ChainError::Repeated(v));
        }
    }
    let corner = |v: usize| Corner {
        vertex: v,
        prongs: patch.vertices[v].prongs(),
    };
    let mut lozenges = Vec::with_capacity(path.len() - 1);
    for i in 0..path.len() - 1 {
        let (a, b) = (path[i], path[i + 1]);
        let slot = patch.vertices[a]
            .slot_towards(b)
            .ok_or(ChainError::NotAdjacent(a, b))?;
        let base_edge = patch
            .edges
            .iter()
            .find(|e| (e.a, e.b) == (a, b) || (e.a, e.b) == (b, a))
            .expect("neighbours share an edge")
            .base_edge;
        let shared_side = if i == 0 {
            None
        } else {
            let w = &patch.vertices[a];
            let s_in = w.slot_towards(path[i - 1]).unwrap();
            let val = w.slots.len();
            if (s_in + 1) % val == slot {
                Some(w.slots[s_in].corner_after)
            } else if (slot + 1) % val == s_in {
                Some(w.slots[slot].corner_after)
            } else {
                None
            }
        };
        lozenges.push(Lozenge {
            corners: [corner(a), corner(b)],
            base_edge,
            adjacent_to_previous: shared_side.is_some(),
            shared_side,
        });
    }
    Ok(LozengeChain { lozenges })
}

impl LozengeChain {
    pub fn len(&self) -> usize {
        self.lozenges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lozenges.is_empty()
    }

    /// No singular corner and no adjacent consecutive pair.
    pub fn is_string(&self) -> bool {
        self.lozenges
            .iter()
            .all(|l| l.corners.iter().all(|c| c.prongs == 2) && !l.adjacent_to_previous)
    }

    /// Adjacent along unstable sides throughout: s-scalloped; along stable
    /// sides: u-scalloped.
    pub fn scallop(&self) -> Scallop {
        if self.lozenges.len() < 2 {
            return Scallop::Neither;
        }
        let shared: Option<Vec<SideType>> = self.lozenges[1..].iter().map(|l| l.shared_side).collect();
        match shared.as_deref() {
            Some([first, rest @ ..]) if rest.iter().all(|t| t == first) => match first {
                SideType::Unstable => Scallop::SScalloped,
                SideType::Stable => Scallop::UScalloped,
            },
            _ => Scallop::Neither,
        }
    }
}

pub fn is_string(chain: &LozengeChain) -> bool {
    chain.is_string()
}

pub fn is_scalloped(chain: &LozengeChain) -> Scallop {
    chain.scallop()
}
