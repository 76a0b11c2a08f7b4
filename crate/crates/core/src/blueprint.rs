//! Fat-graph blueprints.
//!
//! A blueprint is a finite graph with a cyclic order of half-edges at every
//! vertex, plus an optional twist flag per edge. The surface it thickens to is
//! never built; everything downstream only needs the boundary cycles, which
//! are traced here by corner-following.
//!
//! All identifiers are stored sorted by name, so every derived quantity
//! (cycle order, side ids, reports) is independent of the order in which the
//! file lists its vertices and edges.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlueprintError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown directive `{directive}`")]
    UnknownDirective { line: usize, directive: String },
    #[error("line {line}: duplicate identifier `{id}`")]
    Duplicate { line: usize, id: String },
    #[error("line {line}: half-edge `{id}` is not listed at any vertex")]
    DanglingHalfEdge { line: usize, id: String },
    #[error("line {line}: half-edge `{id}` is not paired by any edge")]
    UnpairedHalfEdge { line: usize, id: String },
    #[error("line {line}: vertex `{id}` has valence {valence}, need at least 2")]
    LowValence { line: usize, id: String, valence: usize },
    #[error("line {line}: polarity refers to cycle {index}, blueprint has {count} cycles")]
    PolarityIndex { line: usize, index: usize, count: usize },
    #[error("blueprint has no vertices")]
    Empty,
}

/// Which side of an edge. Walking along the edge away from its first
/// half-edge (by name), `Left` is the side of the corner that follows the
/// first half-edge in its vertex rotation; `Right` is the one before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SideTag {
    Left,
    Right,
}

impl SideTag {
    pub fn other(self) -> Self {
        match self {
            SideTag::Left => SideTag::Right,
            SideTag::Right => SideTag::Left,
        }
    }
}

/// An edge side. Ordered by edge index (edges are sorted by name) then tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SideId {
    pub edge: usize,
    pub tag: SideTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Incoming,
    Outgoing,
}

impl Polarity {
    pub fn opposite(self) -> Self {
        match self {
            Polarity::Incoming => Polarity::Outgoing,
            Polarity::Outgoing => Polarity::Incoming,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarity::Incoming => write!(f, "incoming"),
            Polarity::Outgoing => write!(f, "outgoing"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    /// Half-edge indices in cyclic order.
    pub rotation: Vec<usize>,
}

impl Vertex {
    pub fn valence(&self) -> usize {
        self.rotation.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    /// Half-edge indices, first by name.
    pub ends: [usize; 2],
    pub twisted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfEdge {
    pub name: String,
    pub vertex: usize,
    /// Position in the vertex rotation.
    pub slot: usize,
    pub edge: usize,
}

/// Where a walk stands at an edge end, relative to the corner it uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CornerSide {
    /// Corner between the half-edge and its rotation successor.
    After,
    /// Corner between the rotation predecessor and the half-edge.
    Before,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FatGraphBlueprint {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub half_edges: Vec<HalfEdge>,
    /// Polarity lines read from the file, by cycle index.
    pub declared_polarity: BTreeMap<usize, Polarity>,
}

/// One entry of a boundary cycle: an edge side and the direction in which
/// the cycle walks along it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleSide {
    pub side: SideId,
    /// True when walked from the edge's first half-edge to its second.
    pub forward: bool,
    /// Vertex at which the walk enters this side.
    pub enter_vertex: usize,
    /// Vertex at which the walk leaves this side.
    pub exit_vertex: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryCycle {
    pub sides: Vec<CycleSide>,
    pub polarity: Option<Polarity>,
}

impl BoundaryCycle {
    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    pub fn smallest_side(&self) -> SideId {
        self.sides.iter().map(|s| s.side).min().expect("empty cycle")
    }
}

impl FatGraphBlueprint {
    /// Builds a blueprint from raw records. Names are sorted, indices
    /// reassigned, and structural invariants checked.
    pub fn from_records(
        vertices: Vec<(String, Vec<String>)>,
        edges: Vec<(String, [String; 2], bool)>,
    ) -> Result<Self, BlueprintError> {
        let raw = RawBlueprint {
            vertices: vertices.into_iter().map(|(n, r)| (0, n, r)).collect(),
            edges: edges.into_iter().map(|(n, h, t)| (0, n, h, t)).collect(),
            polarity: Vec::new(),
        };
        raw.resolve()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn side_name(&self, side: SideId) -> String {
        let tag = match side.tag {
            SideTag::Left => "L",
            SideTag::Right => "R",
        };
        format!("{}:{}", self.edges[side.edge].name, tag)
    }

    fn partner(&self, h: usize) -> usize {
        let e = &self.edges[self.half_edges[h].edge];
        if e.ends[0] == h {
            e.ends[1]
        } else {
            e.ends[0]
        }
    }

    fn rot_next(&self, h: usize) -> usize {
        let he = &self.half_edges[h];
        let rot = &self.vertices[he.vertex].rotation;
        rot[(he.slot + 1) % rot.len()]
    }

    fn rot_prev(&self, h: usize) -> usize {
        let he = &self.half_edges[h];
        let rot = &self.vertices[he.vertex].rotation;
        rot[(he.slot + rot.len() - 1) % rot.len()]
    }

    /// The side of `h`'s edge that touches the given corner at `h`'s end.
    fn side_at(&self, h: usize, at: CornerSide) -> SideId {
        let edge = self.half_edges[h].edge;
        let e = &self.edges[edge];
        let first = e.ends[0] == h;
        let tag = match (first, at, e.twisted) {
            (true, CornerSide::After, _) => SideTag::Left,
            (true, CornerSide::Before, _) => SideTag::Right,
            (false, CornerSide::Before, false) => SideTag::Left,
            (false, CornerSide::After, false) => SideTag::Right,
            (false, CornerSide::After, true) => SideTag::Left,
            (false, CornerSide::Before, true) => SideTag::Right,
        };
        SideId { edge, tag }
    }

    /// The end of `side` at the edge's second half-edge.
    fn far_end(&self, side: SideId) -> (usize, CornerSide) {
        let e = &self.edges[side.edge];
        let h1 = e.ends[1];
        let at = match (side.tag, e.twisted) {
            (SideTag::Left, false) => CornerSide::Before,
            (SideTag::Right, false) => CornerSide::After,
            (SideTag::Left, true) => CornerSide::After,
            (SideTag::Right, true) => CornerSide::Before,
        };
        (h1, at)
    }

    fn near_end(&self, side: SideId) -> (usize, CornerSide) {
        let h0 = self.edges[side.edge].ends[0];
        let at = match side.tag {
            SideTag::Left => CornerSide::After,
            SideTag::Right => CornerSide::Before,
        };
        (h0, at)
    }

    /// Traces the boundary cycles of the thickened surface.
    ///
    /// Each cycle starts at its smallest side, walked forward; cycles are
    /// sorted by smallest side. Polarity is left unset.
    pub fn trace_boundary_cycles(&self) -> Vec<BoundaryCycle> {
        let mut all_sides: Vec<SideId> = (0..self.edges.len())
            .flat_map(|edge| {
                [SideTag::Left, SideTag::Right]
                    .into_iter()
                    .map(move |tag| SideId { edge, tag })
            })
            .collect();
        all_sides.sort();
        let mut seen = BTreeSet::new();
        let mut cycles = Vec::new();
        for &start in &all_sides {
            if seen.contains(&start) {
                continue;
            }
            let mut sides = Vec::new();
            let mut side = start;
            let (mut entry_h, mut entry_at) = self.near_end(start);
            loop {
                seen.insert(side);
                let near = self.near_end(side);
                let far = self.far_end(side);
                let forward = near == (entry_h, entry_at);
                let (exit_h, exit_at) = if forward { far } else { near };
                sides.push(CycleSide {
                    side,
                    forward,
                    enter_vertex: self.half_edges[entry_h].vertex,
                    exit_vertex: self.half_edges[exit_h].vertex,
                });
                let (next_h, next_at) = match exit_at {
                    CornerSide::After => (self.rot_next(exit_h), CornerSide::Before),
                    CornerSide::Before => (self.rot_prev(exit_h), CornerSide::After),
                };
                side = self.side_at(next_h, next_at);
                entry_h = next_h;
                entry_at = next_at;
                if side == start {
                    debug_assert_eq!((entry_h, entry_at), self.near_end(start));
                    break;
                }
            }
            cycles.push(BoundaryCycle {
                sides,
                polarity: None,
            });
        }
        cycles
    }

    /// Polarity from the file if every cycle is declared, otherwise derived
    /// by 2-colouring (see [`auto_polarity`]).
    pub fn resolve_polarity(&self, cycles: &[BoundaryCycle]) -> Option<Vec<Polarity>> {
        if !self.declared_polarity.is_empty() {
            let assignment: Option<Vec<Polarity>> = (0..cycles.len())
                .map(|i| self.declared_polarity.get(&i).copied())
                .collect();
            if assignment.is_some() {
                return assignment;
            }
        }
        auto_polarity(self, cycles)
    }

    /// Number of connected components of the underlying graph.
    pub fn connected_components(&self) -> usize {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for root in 0..n {
            if seen[root] {
                continue;
            }
            count += 1;
            let mut queue = VecDeque::from([root]);
            seen[root] = true;
            while let Some(v) = queue.pop_front() {
                for &h in &self.vertices[v].rotation {
                    let w = self.half_edges[self.partner(h)].vertex;
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        count
    }

    /// Other end of a half-edge (exposed for tree unfolding).
    pub fn opposite_half_edge(&self, h: usize) -> usize {
        self.partner(h)
    }

    /// Rotation successor of a half-edge at its vertex.
    pub fn next_in_rotation(&self, h: usize) -> usize {
        self.rot_next(h)
    }

    /// The side whose boundary walk passes the corner between `h` and its
    /// rotation successor.
    pub fn side_after(&self, h: usize) -> SideId {
        self.side_at(h, CornerSide::After)
    }
}

/// Index of the cycle containing each side.
pub fn side_cycle_map(cycles: &[BoundaryCycle]) -> BTreeMap<SideId, usize> {
    cycles
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.sides.iter().map(move |s| (s.side, i)))
        .collect()
}

/// Derives a polarity by 2-colouring cycles so that the two sides of every
/// edge differ. In each connected class the cycle with the smallest side is
/// incoming. Returns `None` when no proper colouring exists.
pub fn auto_polarity(bp: &FatGraphBlueprint, cycles: &[BoundaryCycle]) -> Option<Vec<Polarity>> {
    let map = side_cycle_map(cycles);
    let mut adj = vec![Vec::new(); cycles.len()];
    for edge in 0..bp.edges.len() {
        let a = map[&SideId { edge, tag: SideTag::Left }];
        let b = map[&SideId { edge, tag: SideTag::Right }];
        if a == b {
            return None;
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut colour: Vec<Option<Polarity>> = vec![None; cycles.len()];
    for root in 0..cycles.len() {
        if colour[root].is_some() {
            continue;
        }
        colour[root] = Some(Polarity::Incoming);
        let mut queue = VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            let pc = colour[c].unwrap();
            for &d in &adj[c] {
                match colour[d] {
                    None => {
                        colour[d] = Some(pc.opposite());
                        queue.push_back(d);
                    }
                    Some(pd) if pd == pc => return None,
                    Some(_) => {}
                }
            }
        }
    }
    colour.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// A vertex of odd valence.
    OddValence { vertex: String, valence: usize },
    /// Both sides of an edge carry the same polarity.
    SamePolarity { edge: String, polarity: String },
    /// Both sides of an edge lie on one boundary cycle.
    SidesOnOneCycle { edge: String, cycle: usize },
    /// Assignment length does not match the cycle count.
    AssignmentSize { expected: usize, got: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OddValence { vertex, valence } => {
                write!(f, "condition I: vertex {vertex} has odd valence {valence}")
            }
            Violation::SamePolarity { edge, polarity } => {
                write!(f, "condition II: both sides of edge {edge} are {polarity}")
            }
            Violation::SidesOnOneCycle { edge, cycle } => {
                write!(f, "condition II: both sides of edge {edge} lie on cycle {cycle}")
            }
            Violation::AssignmentSize { expected, got } => {
                write!(f, "polarity assignment has {got} entries, expected {expected}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Whether any proper incoming/outgoing colouring exists at all.
    pub polarity_exists: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the valence and polarity conditions for a polarity assignment.
pub fn validate_conditions(
    bp: &FatGraphBlueprint,
    cycles: &[BoundaryCycle],
    polarity: &[Polarity],
) -> ValidationReport {
    let mut violations = Vec::new();
    for v in &bp.vertices {
        if v.valence() % 2 != 0 {
            violations.push(Violation::OddValence {
                vertex: v.name.clone(),
                valence: v.valence(),
            });
        }
    }
    if polarity.len() != cycles.len() {
        violations.push(Violation::AssignmentSize {
            expected: cycles.len(),
            got: polarity.len(),
        });
    } else {
        let map = side_cycle_map(cycles);
        for (edge, e) in bp.edges.iter().enumerate() {
            let a = map[&SideId { edge, tag: SideTag::Left }];
            let b = map[&SideId { edge, tag: SideTag::Right }];
            if a == b {
                violations.push(Violation::SidesOnOneCycle {
                    edge: e.name.clone(),
                    cycle: a,
                });
            } else if polarity[a] == polarity[b] {
                violations.push(Violation::SamePolarity {
                    edge: e.name.clone(),
                    polarity: polarity[a].to_string(),
                });
            }
        }
    }
    violations.sort();
    ValidationReport {
        violations,
        polarity_exists: auto_polarity(bp, cycles).is_some(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProngClass {
    OneProng,
    Regular,
    Singular,
}

impl fmt::Display for ProngClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProngClass::OneProng => write!(f, "one-prong"),
            ProngClass::Regular => write!(f, "regular"),
            ProngClass::Singular => write!(f, "singular"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProngEntry {
    pub vertex: String,
    pub prongs: usize,
    pub class: ProngClass,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("vertex `{vertex}` has odd valence {valence}")]
pub struct OddValenceError {
    pub vertex: String,
    pub valence: usize,
}

pub fn classify_prongs(p: usize) -> ProngClass {
    match p {
        1 => ProngClass::OneProng,
        2 => ProngClass::Regular,
        _ => ProngClass::Singular,
    }
}

/// Vertical-orbit prong counts: p is half the vertex valence.
pub fn prong_census(bp: &FatGraphBlueprint) -> Result<Vec<ProngEntry>, OddValenceError> {
    bp.vertices
        .iter()
        .map(|v| {
            if v.valence() % 2 != 0 {
                return Err(OddValenceError {
                    vertex: v.name.clone(),
                    valence: v.valence(),
                });
            }
            let p = v.valence() / 2;
            Ok(ProngEntry {
                vertex: v.name.clone(),
                prongs: p,
                class: classify_prongs(p),
            })
        })
        .collect()
}

struct RawBlueprint {
    vertices: Vec<(usize, String, Vec<String>)>,
    edges: Vec<(usize, String, [String; 2], bool)>,
    polarity: Vec<(usize, usize, Polarity)>,
}

impl RawBlueprint {
    fn resolve(self) -> Result<FatGraphBlueprint, BlueprintError> {
        if self.vertices.is_empty() {
            return Err(BlueprintError::Empty);
        }
        let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
        for (line, name, _) in &self.vertices {
            if ids.insert(name, *line).is_some() {
                return Err(BlueprintError::Duplicate {
                    line: *line,
                    id: name.clone(),
                });
            }
        }
        for (line, name, _, _) in &self.edges {
            if ids.insert(name, *line).is_some() {
                return Err(BlueprintError::Duplicate {
                    line: *line,
                    id: name.clone(),
                });
            }
        }

        // half-edge name -> (line, vertex name)
        let mut at_vertex: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (line, vname, rot) in &self.vertices {
            if rot.len() < 2 {
                return Err(BlueprintError::LowValence {
                    line: *line,
                    id: vname.clone(),
                    valence: rot.len(),
                });
            }
            for h in rot {
                if ids.contains_key(h.as_str()) || at_vertex.insert(h, (*line, vname)).is_some() {
                    return Err(BlueprintError::Duplicate {
                        line: *line,
                        id: h.clone(),
                    });
                }
            }
        }
        let mut paired: BTreeMap<&str, usize> = BTreeMap::new();
        for (line, _, hs, _) in &self.edges {
            for h in hs {
                if !at_vertex.contains_key(h.as_str()) {
                    return Err(BlueprintError::DanglingHalfEdge {
                        line: *line,
                        id: h.clone(),
                    });
                }
                if paired.insert(h, *line).is_some() {
                    return Err(BlueprintError::Duplicate {
                        line: *line,
                        id: h.clone(),
                    });
                }
            }
        }
        if let Some((h, (line, _))) = at_vertex.iter().find(|(h, _)| !paired.contains_key(*h)) {
            return Err(BlueprintError::UnpairedHalfEdge {
                line: *line,
                id: h.to_string(),
            });
        }

        let mut vertex_names: Vec<&str> = self.vertices.iter().map(|v| v.1.as_str()).collect();
        vertex_names.sort();
        let mut edge_names: Vec<&str> = self.edges.iter().map(|e| e.1.as_str()).collect();
        edge_names.sort();
        let half_names: Vec<&str> = at_vertex.keys().copied().collect();
        let vidx = |n: &str| vertex_names.binary_search(&n).unwrap();
        let eidx = |n: &str| edge_names.binary_search(&n).unwrap();
        let hidx = |n: &str| half_names.binary_search(&n).unwrap();

        let mut half_edges: Vec<HalfEdge> = half_names
            .iter()
            .map(|n| HalfEdge {
                name: n.to_string(),
                vertex: 0,
                slot: 0,
                edge: 0,
            })
            .collect();
        let mut vertices: Vec<Vertex> = vertex_names
            .iter()
            .map(|n| Vertex {
                name: n.to_string(),
                rotation: Vec::new(),
            })
            .collect();
        for (_, vname, rot) in &self.vertices {
            let v = vidx(vname);
            vertices[v].rotation = rot.iter().map(|h| hidx(h)).collect();
            for (slot, h) in rot.iter().enumerate() {
                let he = &mut half_edges[hidx(h)];
                he.vertex = v;
                he.slot = slot;
            }
        }
        let mut edges: Vec<Edge> = edge_names
            .iter()
            .map(|n| Edge {
                name: n.to_string(),
                ends: [0, 0],
                twisted: false,
            })
            .collect();
        for (_, ename, hs, twisted) in &self.edges {
            let e = eidx(ename);
            let mut ends = [hidx(&hs[0]), hidx(&hs[1])];
            ends.sort();
            edges[e].ends = ends;
            edges[e].twisted = *twisted;
            for h in ends {
                half_edges[h].edge = e;
            }
        }

        let mut bp = FatGraphBlueprint {
            vertices,
            edges,
            half_edges,
            declared_polarity: BTreeMap::new(),
        };
        if !self.polarity.is_empty() {
            let count = bp.trace_boundary_cycles().len();
            for (line, index, pol) in self.polarity {
                if index >= count {
                    return Err(BlueprintError::PolarityIndex { line, index, count });
                }
                if bp.declared_polarity.insert(index, pol).is_some() {
                    return Err(BlueprintError::Duplicate {
                        line,
                        id: format!("polarity {index}"),
                    });
                }
            }
        }
        Ok(bp)
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '+' | '.' | '\''))
}

/// Parses the line-oriented blueprint format:
///
/// ```text
/// # comment
/// vertex <id>: <half-edge ids in cyclic order>
/// edge <id>: <half-edge> <half-edge> [twist]
/// polarity <cycle-index>: incoming|outgoing
/// ```
pub fn parse_blueprint(text: &str) -> Result<FatGraphBlueprint, BlueprintError> {
    let mut raw = RawBlueprint {
        vertices: Vec::new(),
        edges: Vec::new(),
        polarity: Vec::new(),
    };
    for (i, full) in text.lines().enumerate() {
        let line = i + 1;
        let body = full.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let syntax = |msg: &str| BlueprintError::Syntax {
            line,
            msg: msg.to_string(),
        };
        let (directive, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        if !matches!(directive, "vertex" | "edge" | "polarity") {
            return Err(BlueprintError::UnknownDirective {
                line,
                directive: directive.to_string(),
            });
        }
        let (head, tail) = rest
            .split_once(':')
            .ok_or_else(|| syntax("expected `:` after identifier"))?;
        let id = head.trim();
        let items: Vec<&str> = tail.split_whitespace().collect();
        match directive {
            "vertex" => {
                if !is_ident(id) {
                    return Err(syntax("bad vertex identifier"));
                }
                if let Some(bad) = items.iter().find(|s| !is_ident(s)) {
                    return Err(syntax(&format!("bad half-edge identifier `{bad}`")));
                }
                raw.vertices
                    .push((line, id.to_string(), items.iter().map(|s| s.to_string()).collect()));
            }
            "edge" => {
                if !is_ident(id) {
                    return Err(syntax("bad edge identifier"));
                }
                let twisted = match items.len() {
                    2 => false,
                    3 if items[2] == "twist" => true,
                    _ => return Err(syntax("edge takes two half-edges and an optional `twist`")),
                };
                if items[0] == items[1] {
                    return Err(BlueprintError::Duplicate {
                        line,
                        id: items[0].to_string(),
                    });
                }
                raw.edges.push((
                    line,
                    id.to_string(),
                    [items[0].to_string(), items[1].to_string()],
                    twisted,
                ));
            }
            "polarity" => {
                let index: usize = id.parse().map_err(|_| syntax("cycle index must be an integer"))?;
                let pol = match items.as_slice() {
                    ["incoming"] => Polarity::Incoming,
                    ["outgoing"] => Polarity::Outgoing,
                    _ => return Err(syntax("polarity must be `incoming` or `outgoing`")),
                };
                raw.polarity.push((line, index, pol));
            }
            _ => unreachable!(),
        }
    }
    raw.resolve()
}

/// The circle blueprint with `k` valence-2 vertices `v0..v{k-1}` and edges
/// `e{i}` from `v{i}` to `v{i+1}`.
pub fn circle_blueprint(k: usize) -> FatGraphBlueprint {
    assert!(k >= 1);
    let mut text = String::new();
    for i in 0..k {
        let prev = (i + k - 1) % k;
        text.push_str(&format!("vertex v{i}: e{prev}.1 e{i}.0\n"));
    }
    for i in 0..k {
        text.push_str(&format!("edge e{i}: e{i}.0 e{i}.1\n"));
    }
    parse_blueprint(&text).expect("circle blueprint is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE2: &str = "\
# two valence-2 vertices on a circle
vertex v0: b1 a0
vertex v1: a1 b0
edge a: a0 a1
edge b: b0 b1
";

    #[test]
    fn circle_of_two_has_two_cycles_of_length_two() {
        let bp = parse_blueprint(CIRCLE2).unwrap();
        let cycles = bp.trace_boundary_cycles();
        assert_eq!(cycles.len(), 2);
        assert!(cycles.iter().all(|c| c.len() == 2));
    }

    #[test]
    fn loop_at_valence_two_vertex_gives_two_unit_cycles() {
        let bp = parse_blueprint("vertex v: h0 h1\nedge e: h0 h1\n").unwrap();
        let cycles = bp.trace_boundary_cycles();
        assert_eq!(cycles.iter().map(|c| c.len()).collect::<Vec<_>>(), vec![1, 1]);
    }

    #[test]
    fn circle_of_k_gives_annulus() {
        for k in 1..=7 {
            let bp = circle_blueprint(k);
            let cycles = bp.trace_boundary_cycles();
            assert_eq!(cycles.len(), 2, "k={k}");
            assert!(cycles.iter().all(|c| c.len() == k));
            let pol = auto_polarity(&bp, &cycles).unwrap();
            assert!(validate_conditions(&bp, &cycles, &pol).passed());
        }
    }

    #[test]
    fn one_twist_merges_the_annulus_boundaries() {
        // brute force both variants of the two-vertex circle
        let plain = parse_blueprint(CIRCLE2).unwrap();
        let twisted = parse_blueprint(&CIRCLE2.replace("edge a: a0 a1", "edge a: a0 a1 twist")).unwrap();
        let n_plain = plain.trace_boundary_cycles().len();
        let n_twisted = twisted.trace_boundary_cycles().len();
        assert_eq!(n_plain, 2);
        assert_eq!(n_twisted, 1);
        assert_eq!(twisted.trace_boundary_cycles()[0].len(), 4);
    }

    #[test]
    fn figure_eight_parses() {
        let bp = parse_blueprint("vertex v: a+ b+ a- b-\nedge a: a+ a-\nedge b: b+ b-\n").unwrap();
        assert_eq!(bp.vertices[0].valence(), 4);
        // torus with one hole: a single boundary walk
        assert_eq!(bp.trace_boundary_cycles().len(), 1);
    }

    #[test]
    fn undefined_half_edge_is_reported_by_name() {
        let err = parse_blueprint("vertex v: a0 a1\nedge a: a0 zz\n").unwrap_err();
        assert_eq!(
            err,
            BlueprintError::DanglingHalfEdge {
                line: 2,
                id: "zz".into()
            }
        );
        assert!(err.to_string().contains("zz"));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_blueprint("vertx v: a b\n"),
            Err(BlueprintError::UnknownDirective { line: 1, .. })
        ));
        assert!(matches!(
            parse_blueprint("vertex v: a b\nvertex v: c d\nedge e: a c\nedge f: b d\n"),
            Err(BlueprintError::Duplicate { line: 2, .. })
        ));
        assert!(matches!(
            parse_blueprint("vertex v: a b\nedge e: a\n"),
            Err(BlueprintError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_blueprint("vertex v: a b c d\nedge e: a b\n"),
            Err(BlueprintError::UnpairedHalfEdge { .. })
        ));
        assert!(matches!(
            parse_blueprint("vertex v: a\nedge e: a b\n"),
            Err(BlueprintError::LowValence { .. })
        ));
        assert!(matches!(
            parse_blueprint(&format!("{CIRCLE2}polarity 5: incoming\n")),
            Err(BlueprintError::PolarityIndex { index: 5, .. })
        ));
    }

    #[test]
    fn declared_polarity_is_used() {
        let bp = parse_blueprint(&format!("{CIRCLE2}polarity 0: outgoing\npolarity 1: incoming\n")).unwrap();
        let cycles = bp.trace_boundary_cycles();
        let pol = bp.resolve_polarity(&cycles).unwrap();
        assert_eq!(pol, vec![Polarity::Outgoing, Polarity::Incoming]);
        assert!(validate_conditions(&bp, &cycles, &pol).passed());
    }

    #[test]
    fn odd_valence_violation_names_vertex() {
        // theta graph: two valence-3 vertices
        let bp = parse_blueprint("vertex p: a0 b0 c0\nvertex q: a1 b1 c1\nedge a: a0 a1\nedge b: b0 b1\nedge c: c0 c1\n")
            .unwrap();
        let cycles = bp.trace_boundary_cycles();
        let pol = vec![Polarity::Incoming; cycles.len()];
        let report = validate_conditions(&bp, &cycles, &pol);
        assert!(report
            .violations
            .contains(&Violation::OddValence { vertex: "p".into(), valence: 3 }));
        assert!(prong_census(&bp).is_err());
    }

    #[test]
    fn same_polarity_sides_violate_condition_two() {
        let bp = parse_blueprint(CIRCLE2).unwrap();
        let cycles = bp.trace_boundary_cycles();
        let report = validate_conditions(&bp, &cycles, &[Polarity::Incoming, Polarity::Incoming]);
        assert!(!report.passed());
        assert!(report.polarity_exists);
        assert!(report
            .violations
            .iter()
            .all(|v| matches!(v, Violation::SamePolarity { .. })));
        assert_eq!(report.violations.len(), 2);

        // a single boundary walk cannot be coloured at all
        let fig8 = parse_blueprint("vertex v: a+ b+ a- b-\nedge a: a+ a-\nedge b: b+ b-\n").unwrap();
        let c8 = fig8.trace_boundary_cycles();
        let r8 = validate_conditions(&fig8, &c8, &[Polarity::Incoming]);
        assert!(!r8.polarity_exists);
        assert!(matches!(r8.violations[0], Violation::SidesOnOneCycle { .. }));
    }

    #[test]
    fn census_classes() {
        let mut text = String::from("vertex v: ");
        for i in 0..3 {
            text.push_str(&format!("l{i}a l{i}b "));
        }
        text.push('\n');
        for i in 0..3 {
            text.push_str(&format!("edge l{i}: l{i}a l{i}b\n"));
        }
        let six = parse_blueprint(&text).unwrap();
        let c = prong_census(&six).unwrap();
        assert_eq!((c[0].prongs, c[0].class), (3, ProngClass::Singular));
        let c2 = prong_census(&circle_blueprint(2)).unwrap();
        assert!(c2.iter().all(|e| e.prongs == 1 && e.class == ProngClass::OneProng));
        assert_eq!(classify_prongs(2), ProngClass::Regular);
    }

    #[test]
    fn listing_order_does_not_matter() {
        let a = parse_blueprint(CIRCLE2).unwrap();
        let b = parse_blueprint("edge b: b1 b0\nvertex v1: b0 a1\n# same graph\nedge a: a1 a0\nvertex v0: a0 b1\n").unwrap();
        assert_eq!(a.trace_boundary_cycles(), b.trace_boundary_cycles());
    }
}
