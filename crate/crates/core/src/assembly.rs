//! The block complex `N(X)`: one model block per blueprint edge, glued
//! tangentially along half-walls in the cyclic order of each boundary cycle.
//!
//! A transverse component with `k` entries is the strip `[0, kπ] × ℝ` with
//! charts `x = u - jπ - π/2`, `y = (-1)^j v` for `u ∈ [jπ, (j+1)π]`. Adjacent
//! charts meet on the seam `u = jπ` under `(π/2, y) ∼ (-π/2, -y)`.

use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::blueprint::{
    prong_census, validate_conditions, BoundaryCycle, FatGraphBlueprint, OddValenceError, Polarity, ProngClass,
    SideId, Violation,
};
use crate::circle;

/// Distance to `πℤ` (in `u`) below which a point counts as on a seam.
pub const SEAM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("no polarity assignment separates the sides of every edge")]
    NoPolarity,
    #[error("blueprint violates the gluing conditions: {}", list(.0))]
    Conditions(Vec<Violation>),
    #[error("vertex {} has odd valence {}", .0.vertex, .0.valence)]
    Census(OddValenceError),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceClass {
    Torus,
    KleinBottle,
}

impl SurfaceClass {
    pub fn for_length(k: usize) -> Self {
        if k % 2 == 0 {
            SurfaceClass::Torus
        } else {
            SurfaceClass::KleinBottle
        }
    }
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurfaceClass::Torus => "torus",
            SurfaceClass::KleinBottle => "klein-bottle",
        })
    }
}

/// Entry `j` of a transverse component: the face of one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentEntry {
    pub edge: usize,
    pub side: SideId,
    /// Vertex at `x = -π/2` of this chart (the seam `u = jπ`).
    pub enter_vertex: usize,
    /// Vertex at `x = π/2`.
    pub exit_vertex: usize,
    /// Walked from the edge's first half-edge to its second.
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransverseComponent {
    /// Index of the boundary cycle; also used as the name `c<id>`.
    pub id: usize,
    pub polarity: Polarity,
    pub entries: Vec<ComponentEntry>,
    pub class: SurfaceClass,
    /// Traversal reversed relative to the traced cycle.
    pub reversed: bool,
}

impl TransverseComponent {
    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn name(&self) -> String {
        format!("c{}", self.id)
    }

    /// Length of the fundamental domain in `u`.
    pub fn period(&self) -> f64 {
        self.k() as f64 * PI
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRecord {
    pub edge: usize,
    /// (component index, chart) of the entry face.
    pub incoming: (usize, usize),
    /// (component index, chart) of the exit face.
    pub outgoing: (usize, usize),
    /// The exit face is read through `(x, y) ↦ (-x, -y)`.
    pub reflected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfWall {
    /// `z < 0`, on incoming components.
    Stable,
    /// `z > 0`, on outgoing components.
    Unstable,
}

impl fmt::Display for HalfWall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HalfWall::Stable => "stable",
            HalfWall::Unstable => "unstable",
        })
    }
}

/// Tangential identification of the `x = π/2` wall of chart `left` with
/// the `x = -π/2` wall of chart `right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seam {
    pub component: usize,
    /// The seam sits at `u = position·π`.
    pub position: usize,
    pub vertex: usize,
    pub left: usize,
    pub right: usize,
    pub wall: HalfWall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerticalOrbit {
    pub vertex: usize,
    pub name: String,
    pub prongs: usize,
    pub class: ProngClass,
    pub stable_seams: usize,
    pub unstable_seams: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentCircle {
    pub u: f64,
    pub vertex: usize,
    pub wall: HalfWall,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub chart: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartLookup {
    Interior(ChartPoint),
    /// On the tangent circle of `vertex`; both adjacent chart readings.
    OnSeam {
        vertex: usize,
        left: ChartPoint,
        right: ChartPoint,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssembledManifold {
    pub blueprint: FatGraphBlueprint,
    pub cycles: Vec<BoundaryCycle>,
    pub components: Vec<TransverseComponent>,
    pub blocks: Vec<BlockRecord>,
    pub seams: Vec<Seam>,
    pub vertical_orbits: Vec<VerticalOrbit>,
}

/// Assembles with the blueprint's declared or derived polarity.
pub fn assemble(bp: &FatGraphBlueprint) -> Result<AssembledManifold, AssemblyError> {
    let cycles = bp.trace_boundary_cycles();
    let polarity = bp.resolve_polarity(&cycles).ok_or(AssemblyError::NoPolarity)?;
    assemble_with(bp, cycles, &polarity)
}

pub fn assemble_with(
    bp: &FatGraphBlueprint,
    mut cycles: Vec<BoundaryCycle>,
    polarity: &[Polarity],
) -> Result<AssembledManifold, AssemblyError> {
    let report = validate_conditions(bp, &cycles, polarity);
    if !report.passed() {
        return Err(AssemblyError::Conditions(report.violations));
    }
    let census = prong_census(bp).map_err(AssemblyError::Census)?;
    for (c, p) in cycles.iter_mut().zip(polarity) {
        c.polarity = Some(*p);
    }

    // edge -> (incoming cycle, position), (outgoing cycle, position)
    let n_edges = bp.edges.len();
    let mut inc = vec![(0usize, 0usize); n_edges];
    let mut out = vec![(0usize, 0usize); n_edges];
    for (ci, c) in cycles.iter().enumerate() {
        for (j, s) in c.sides.iter().enumerate() {
            match polarity[ci] {
                Polarity::Incoming => inc[s.side.edge] = (ci, j),
                Polarity::Outgoing => out[s.side.edge] = (ci, j),
            }
        }
    }

    // Choose traversal directions so that each block's entry and exit faces
    // run the same way along the edge wherever a consistent choice exists.
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); cycles.len()];
    for e in 0..n_edges {
        let (ci, ji) = inc[e];
        let (co, jo) = out[e];
        let differ = cycles[ci].sides[ji].forward != cycles[co].sides[jo].forward;
        adj[ci].push((co, differ));
        adj[co].push((ci, differ));
    }
    let mut reversed: Vec<Option<bool>> = vec![None; cycles.len()];
    for root in 0..cycles.len() {
        if reversed[root].is_some() {
            continue;
        }
        reversed[root] = Some(false);
        let mut queue = VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            let rc = reversed[c].unwrap();
            for &(d, differ) in &adj[c] {
                if reversed[d].is_none() {
                    reversed[d] = Some(rc ^ differ);
                    queue.push_back(d);
                }
            }
        }
    }
    let reversed: Vec<bool> = reversed.into_iter().map(|r| r.unwrap()).collect();

    let components: Vec<TransverseComponent> = cycles
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            let k = c.len();
            let order: Vec<usize> = if reversed[ci] {
                std::iter::once(0).chain((1..k).rev()).collect()
            } else {
                (0..k).collect()
            };
            let entries = order
                .into_iter()
                .map(|i| {
                    let s = c.sides[i];
                    let (enter_vertex, exit_vertex, forward) = if reversed[ci] {
                        (s.exit_vertex, s.enter_vertex, !s.forward)
                    } else {
                        (s.enter_vertex, s.exit_vertex, s.forward)
                    };
                    ComponentEntry {
                        edge: s.side.edge,
                        side: s.side,
                        enter_vertex,
                        exit_vertex,
                        forward,
                    }
                })
                .collect();
            TransverseComponent {
                id: ci,
                polarity: polarity[ci],
                entries,
                class: SurfaceClass::for_length(k),
                reversed: reversed[ci],
            }
        })
        .collect();

    let mut chart_of = vec![[(0usize, 0usize); 2]; n_edges];
    for (ci, comp) in components.iter().enumerate() {
        for (j, en) in comp.entries.iter().enumerate() {
            let slot = match comp.polarity {
                Polarity::Incoming => 0,
                Polarity::Outgoing => 1,
            };
            chart_of[en.edge][slot] = (ci, j);
        }
    }
    let blocks: Vec<BlockRecord> = (0..n_edges)
        .map(|e| {
            let [i, o] = chart_of[e];
            let fi = components[i.0].entries[i.1].forward;
            let fo = components[o.0].entries[o.1].forward;
            BlockRecord {
                edge: e,
                incoming: i,
                outgoing: o,
                reflected: fi != fo,
            }
        })
        .collect();

    let mut seams = Vec::new();
    for (ci, comp) in components.iter().enumerate() {
        let k = comp.k();
        let wall = match comp.polarity {
            Polarity::Incoming => HalfWall::Stable,
            Polarity::Outgoing => HalfWall::Unstable,
        };
        for j in 0..k {
            let left = (j + k - 1) % k;
            debug_assert_eq!(comp.entries[left].exit_vertex, comp.entries[j].enter_vertex);
            seams.push(Seam {
                component: ci,
                position: j,
                vertex: comp.entries[j].enter_vertex,
                left,
                right: j,
                wall,
            });
        }
    }

    let vertical_orbits = census
        .into_iter()
        .enumerate()
        .map(|(v, entry)| VerticalOrbit {
            vertex: v,
            stable_seams: seams
                .iter()
                .filter(|s| s.vertex == v && s.wall == HalfWall::Stable)
                .count(),
            unstable_seams: seams
                .iter()
                .filter(|s| s.vertex == v && s.wall == HalfWall::Unstable)
                .count(),
            name: entry.vertex,
            prongs: entry.prongs,
            class: entry.class,
        })
        .collect();

    Ok(AssembledManifold {
        blueprint: bp.clone(),
        cycles,
        components,
        blocks,
        seams,
        vertical_orbits,
    })
}

impl AssembledManifold {
    pub fn component_by_name(&self, name: &str) -> Option<usize> {
        let idx = name.strip_prefix('c').unwrap_or(name).parse::<usize>().ok()?;
        self.components.iter().position(|c| c.id == idx)
    }

    pub fn components_with(&self, polarity: Polarity) -> impl Iterator<Item = &TransverseComponent> {
        self.components.iter().filter(move |c| c.polarity == polarity)
    }

    pub fn orientable(&self) -> bool {
        self.components.iter().all(|c| c.class == SurfaceClass::Torus)
    }

    /// Stable half-walls used by incoming seams and unstable half-walls used
    /// by outgoing seams.
    pub fn half_walls_used(&self) -> (usize, usize) {
        let s = self.seams.iter().filter(|s| s.wall == HalfWall::Stable).count();
        (s, self.seams.len() - s)
    }

    /// `(u, v)` of a chart point; `y` in turns.
    pub fn chart_to_global(&self, component: usize, chart: usize, x: f64, y: f64) -> (f64, f64) {
        let _ = &self.components[component];
        let u = x + chart as f64 * PI + FRAC_PI_2;
        (u, circle::wrap(parity(chart as i64) * y))
    }

    /// Chart reading of a universal-cover point. Seams return both readings.
    pub fn global_to_chart(&self, component: usize, u: f64, v: f64) -> ChartLookup {
        let comp = &self.components[component];
        let k = comp.k() as i64;
        let q = u / PI;
        let n = q.round();
        if (q - n).abs() * PI <= SEAM_TOL {
            let n = n as i64;
            let right = n.rem_euclid(k) as usize;
            let left_total = n - 1;
            let left = left_total.rem_euclid(k) as usize;
            ChartLookup::OnSeam {
                vertex: comp.entries[right].enter_vertex,
                left: ChartPoint {
                    chart: left,
                    x: FRAC_PI_2,
                    y: circle::wrap(parity(left_total) * v),
                },
                right: ChartPoint {
                    chart: right,
                    x: -FRAC_PI_2,
                    y: circle::wrap(parity(n) * v),
                },
            }
        } else {
            let total = q.floor() as i64;
            ChartLookup::Interior(ChartPoint {
                chart: total.rem_euclid(k) as usize,
                x: u - total as f64 * PI - FRAC_PI_2,
                y: circle::wrap(parity(total) * v),
            })
        }
    }

    /// Positions of `l^s₀` (incoming) or `l^u₀` (outgoing) on a component.
    pub fn tangent_circles(&self, component: usize) -> Vec<TangentCircle> {
        self.seams
            .iter()
            .filter(|s| s.component == component)
            .map(|s| TangentCircle {
                u: s.position as f64 * PI,
                vertex: s.vertex,
                wall: s.wall,
            })
            .collect()
    }

    /// Transports a fibre value once around a component through its `k`
    /// seam flips; true when it returns to itself.
    pub fn seam_flips_compose_to_identity(&self, component: usize) -> bool {
        let k = self.components[component].k();
        let y0 = 0.3;
        let mut y = y0;
        for _ in 0..k {
            y = circle::wrap(-y);
        }
        circle::dist(y, y0) < 1e-12
    }

    pub fn report(&self) -> String {
        let bp = &self.blueprint;
        let mut out = String::new();
        let _ = writeln!(out, "blocks={}", self.blocks.len());
        let _ = writeln!(out, "components={}", self.components.len());
        let _ = writeln!(out, "orientable={}", self.orientable());
        for c in &self.components {
            let edges: Vec<&str> = c.entries.iter().map(|e| bp.edges[e.edge].name.as_str()).collect();
            let _ = writeln!(
                out,
                "component.{}: polarity={} k={} class={} edges={}",
                c.name(),
                c.polarity,
                c.k(),
                c.class,
                edges.join(",")
            );
        }
        for b in &self.blocks {
            let _ = writeln!(
                out,
                "block.{}: in=c{}/{} out=c{}/{} reflected={}",
                bp.edges[b.edge].name,
                self.components[b.incoming.0].id,
                b.incoming.1,
                self.components[b.outgoing.0].id,
                b.outgoing.1,
                b.reflected
            );
        }
        for v in &self.vertical_orbits {
            let _ = writeln!(
                out,
                "orbit.{}: p={} class={} stable_seams={} unstable_seams={}",
                v.name, v.prongs, v.class, v.stable_seams, v.unstable_seams
            );
        }
        for s in &self.seams {
            let _ = writeln!(
                out,
                "seam: component=c{} u={}pi vertex={} wall={} charts={}|{} rule=(pi/2,y)~(-pi/2,-y)",
                self.components[s.component].id,
                s.position,
                bp.vertices[s.vertex].name,
                s.wall,
                s.left,
                s.right
            );
        }
        out
    }
}

pub(crate) fn parity(j: i64) -> f64 {
    if j.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}
