//! Transverse gluing of outgoing onto incoming tori, surgery bookkeeping and
//! classification of the closed flow.
//!
//! A pair stores an integer matrix `L` in lattice bases: the horizontal
//! generator `(kπ, 0)` and the fibre `(0, 1)`. In universal-cover coordinates
//! the map is `A(u, v) = D_in · L · D_out⁻¹ (u, v) + (s, t)` with
//! `D = diag(kπ, 1)`; the translation is in target units.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_integer::Integer;
use thiserror::Error;

use crate::assembly::{AssembledManifold, SurfaceClass};
use crate::blueprint::{prong_census, FatGraphBlueprint, Polarity, ProngClass};
use crate::circle;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GluingParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown directive `{word}`")]
    UnknownDirective { line: usize, word: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSpec {
    pub outgoing: String,
    pub incoming: String,
    /// `[[a, b], [c, d]]`.
    pub l: [[i64; 2]; 2],
    pub shift: (f64, f64),
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurgerySpec {
    pub vertex: String,
    pub meridian: (i64, i64),
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GluingSpec {
    pub pairs: Vec<PairSpec>,
    pub surgeries: Vec<SurgerySpec>,
}

impl GluingSpec {
    /// Same matching with every translation replaced.
    pub fn with_shifts(&self, shifts: &[(f64, f64)]) -> Self {
        let mut out = self.clone();
        for (p, s) in out.pairs.iter_mut().zip(shifts) {
            p.shift = *s;
        }
        out
    }
}

fn parse_list<T: std::str::FromStr>(line: usize, key: &str, text: &str, n: usize) -> Result<Vec<T>, GluingParseError> {
    let vals: Result<Vec<T>, _> = text.split(',').map(|t| t.trim().parse::<T>()).collect();
    match vals {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(GluingParseError::Syntax {
            line,
            msg: format!("`{key}` needs {n} comma-separated numbers, got `{text}`"),
        }),
    }
}

/// Parses `match <out> <in> L=a,b,c,d [shift=s,t]` and
/// `surgery <vertex> m=p,q` lines.
pub fn parse_gluing(text: &str) -> Result<GluingSpec, GluingParseError> {
    let mut spec = GluingSpec::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        let syntax = |msg: &str| GluingParseError::Syntax {
            line,
            msg: msg.to_string(),
        };
        match words[0] {
            "match" => {
                if words.len() < 4 || words.len() > 5 {
                    return Err(syntax("expected `match <out> <in> L=a,b,c,d [shift=s,t]`"));
                }
                let mut l = None;
                let mut shift = (0.0, 0.0);
                for w in &words[3..] {
                    if let Some(rest) = w.strip_prefix("L=") {
                        let v: Vec<i64> = parse_list(line, "L", rest, 4)?;
                        l = Some([[v[0], v[1]], [v[2], v[3]]]);
                    } else if let Some(rest) = w.strip_prefix("shift=") {
                        let v: Vec<f64> = parse_list(line, "shift", rest, 2)?;
                        if !v.iter().all(|x| x.is_finite()) {
                            return Err(syntax("shift must be finite"));
                        }
                        shift = (v[0], v[1]);
                    } else {
                        return Err(syntax(&format!("unexpected field `{w}`")));
                    }
                }
                spec.pairs.push(PairSpec {
                    outgoing: words[1].to_string(),
                    incoming: words[2].to_string(),
                    l: l.ok_or_else(|| syntax("missing `L=`"))?,
                    shift,
                    line,
                });
            }
            "surgery" => {
                let m = match words.as_slice() {
                    [_, _, m] => m.strip_prefix("m=").ok_or_else(|| syntax("expected `m=p,q`"))?,
                    _ => return Err(syntax("expected `surgery <vertex> m=p,q`")),
                };
                let v: Vec<i64> = parse_list(line, "m", m, 2)?;
                spec.surgeries.push(SurgerySpec {
                    vertex: words[1].to_string(),
                    meridian: (v[0], v[1]),
                    line,
                });
            }
            other => {
                return Err(GluingParseError::UnknownDirective {
                    line,
                    word: other.to_string(),
                })
            }
        }
    }
    Ok(spec)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurgeryError {
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("meridian ({0}, {1}) is not a primitive class")]
    NotCoprime(i64, i64),
    #[error("meridian ({0}, {1}) is the longitude; this surgery destroys the flow")]
    Longitude(i64, i64),
}

/// Surgery on a vertical orbit, in the basis (meridian₀, longitude) with the
/// longitude along the orbit. Bookkeeping only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurgeryRecord {
    pub vertex: String,
    pub meridian: (i64, i64),
}

impl SurgeryRecord {
    pub fn is_trivial(&self) -> bool {
        self.meridian.0.abs() == 1 && self.meridian.1 == 0
    }
}

pub fn surgery_record(bp: &FatGraphBlueprint, vertex: &str, meridian: (i64, i64)) -> Result<SurgeryRecord, SurgeryError> {
    if bp.vertex_index(vertex).is_none() {
        return Err(SurgeryError::UnknownVertex(vertex.to_string()));
    }
    let (p, q) = meridian;
    if p.gcd(&q) != 1 {
        return Err(SurgeryError::NotCoprime(p, q));
    }
    if p == 0 {
        return Err(SurgeryError::Longitude(p, q));
    }
    Ok(SurgeryRecord {
        vertex: vertex.to_string(),
        meridian,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum GluingFailure {
    KleinBottle { component: String },
    UnknownComponent { name: String, line: usize },
    WrongPolarity { name: String, expected: Polarity, line: usize },
    MatchedTwice { name: String },
    Unmatched { name: String },
    CountMismatch { outgoing: usize, incoming: usize },
    Determinant { line: usize, det: i64 },
    FiberPreserved { line: usize },
    Surgery { line: usize, reason: String },
}

impl fmt::Display for GluingFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GluingFailure::KleinBottle { component } => write!(
                f,
                "component {component} is a Klein bottle: the transverse gluing needs every boundary component to be a torus"
            ),
            GluingFailure::UnknownComponent { name, line } => write!(f, "line {line}: no component named {name}"),
            GluingFailure::WrongPolarity { name, expected, line } => {
                write!(f, "line {line}: component {name} is not {expected}")
            }
            GluingFailure::MatchedTwice { name } => write!(f, "component {name} is matched more than once"),
            GluingFailure::Unmatched { name } => write!(f, "component {name} is not matched"),
            GluingFailure::CountMismatch { outgoing, incoming } => write!(
                f,
                "{outgoing} outgoing and {incoming} incoming components; the counts must agree"
            ),
            GluingFailure::Determinant { line, det } => write!(f, "line {line}: det L = {det}, must be ±1"),
            GluingFailure::FiberPreserved { line } => write!(
                f,
                "line {line}: b = 0, the fibre class is sent to a vertical class and the line field is preserved"
            ),
            GluingFailure::Surgery { line, reason } => write!(f, "line {line}: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GluingReport {
    pub failures: Vec<GluingFailure>,
}

impl GluingReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Translations are ignored: they never affect validity.
pub fn validate_gluing(asm: &AssembledManifold, spec: &GluingSpec) -> GluingReport {
    let mut failures = Vec::new();
    for c in &asm.components {
        if c.class == SurfaceClass::KleinBottle {
            failures.push(GluingFailure::KleinBottle { component: c.name() });
        }
    }
    let n_out = asm.components_with(Polarity::Outgoing).count();
    let n_in = asm.components_with(Polarity::Incoming).count();
    if n_out != n_in {
        failures.push(GluingFailure::CountMismatch {
            outgoing: n_out,
            incoming: n_in,
        });
    }
    let mut used: BTreeMap<usize, usize> = BTreeMap::new();
    for p in &spec.pairs {
        for (name, expected) in [(&p.outgoing, Polarity::Outgoing), (&p.incoming, Polarity::Incoming)] {
            match asm.component_by_name(name) {
                None => failures.push(GluingFailure::UnknownComponent {
                    name: name.clone(),
                    line: p.line,
                }),
                Some(ci) => {
                    if asm.components[ci].polarity != expected {
                        failures.push(GluingFailure::WrongPolarity {
                            name: name.clone(),
                            expected,
                            line: p.line,
                        });
                    }
                    *used.entry(ci).or_default() += 1;
                }
            }
        }
        let [[a, b], [c, d]] = p.l;
        let det = a * d - b * c;
        if det.abs() != 1 {
            failures.push(GluingFailure::Determinant { line: p.line, det });
        }
        if b == 0 {
            failures.push(GluingFailure::FiberPreserved { line: p.line });
        }
    }
    for (ci, c) in asm.components.iter().enumerate() {
        match used.get(&ci).copied().unwrap_or(0) {
            0 => failures.push(GluingFailure::Unmatched { name: c.name() }),
            1 => {}
            _ => failures.push(GluingFailure::MatchedTwice { name: c.name() }),
        }
    }
    for s in &spec.surgeries {
        if let Err(e) = surgery_record(&asm.blueprint, &s.vertex, s.meridian) {
            failures.push(GluingFailure::Surgery {
                line: s.line,
                reason: e.to_string(),
            });
        }
    }
    failures.sort();
    failures.dedup();
    GluingReport { failures }
}

/// Point of a transverse component in universal-cover coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionPoint {
    pub component: usize,
    pub u: f64,
    pub v: f64,
}

/// One resolved pair with its affine map in `(u, v)` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GluingMap {
    pub outgoing: usize,
    pub incoming: usize,
    pub l: [[i64; 2]; 2],
    pub shift: (f64, f64),
    /// Linear part `D_in · L · D_out⁻¹`.
    pub linear: [[f64; 2]; 2],
    pub inverse: [[f64; 2]; 2],
}

impl GluingMap {
    fn new(asm: &AssembledManifold, outgoing: usize, incoming: usize, l: [[i64; 2]; 2], shift: (f64, f64)) -> Self {
        let pk_out = asm.components[outgoing].period();
        let pk_in = asm.components[incoming].period();
        let [[a, b], [c, d]] = l.map(|r| r.map(|x| x as f64));
        let det = a * d - b * c;
        let linear = [[a * pk_in / pk_out, b * pk_in], [c / pk_out, d]];
        let inverse = [
            [d / det * pk_out / pk_in, -b / det * pk_out],
            [-c / det / pk_in, a / det],
        ];
        Self {
            outgoing,
            incoming,
            l,
            shift,
            linear,
            inverse,
        }
    }

    /// `A` on lifted coordinates, without reduction.
    pub fn forward_lifted(&self, u: f64, v: f64) -> (f64, f64) {
        let m = &self.linear;
        (m[0][0] * u + m[0][1] * v + self.shift.0, m[1][0] * u + m[1][1] * v + self.shift.1)
    }

    pub fn inverse_lifted(&self, u: f64, v: f64) -> (f64, f64) {
        let m = &self.inverse;
        let (a, b) = (u - self.shift.0, v - self.shift.1);
        (m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b)
    }

    /// Largest cone half-slope, in the radian metric, for which the closure
    /// of `A(C₀)` avoids the fibre direction.
    pub fn kappa_max(&self) -> f64 {
        let r = self.linear_radian();
        if r[0][0] == 0.0 {
            f64::INFINITY
        } else {
            (r[0][1] / r[0][0]).abs()
        }
    }

    /// Linear part in the metric where `v` is scaled by `2π`.
    pub fn linear_radian(&self) -> [[f64; 2]; 2] {
        let tau = std::f64::consts::TAU;
        let m = &self.linear;
        [[m[0][0], m[0][1] / tau], [m[1][0] * tau, m[1][1]]]
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("component {0} is not the source of any gluing pair")]
pub struct LookupError(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedManifold {
    pub assembled: AssembledManifold,
    pub maps: Vec<GluingMap>,
    pub surgeries: Vec<SurgeryRecord>,
}

impl ClosedManifold {
    pub fn new(asm: AssembledManifold, spec: &GluingSpec) -> Result<Self, GluingReport> {
        let report = validate_gluing(&asm, spec);
        if !report.passed() {
            return Err(report);
        }
        let mut maps: Vec<GluingMap> = spec
            .pairs
            .iter()
            .map(|p| {
                let o = asm.component_by_name(&p.outgoing).unwrap();
                let i = asm.component_by_name(&p.incoming).unwrap();
                GluingMap::new(&asm, o, i, p.l, p.shift)
            })
            .collect();
        maps.sort_by_key(|m| m.outgoing);
        let surgeries = spec
            .surgeries
            .iter()
            .map(|s| surgery_record(&asm.blueprint, &s.vertex, s.meridian).unwrap())
            .collect();
        Ok(Self {
            assembled: asm,
            maps,
            surgeries,
        })
    }

    pub fn map_from(&self, outgoing: usize) -> Result<&GluingMap, LookupError> {
        self.maps.iter().find(|m| m.outgoing == outgoing).ok_or(LookupError(outgoing))
    }

    pub fn map_to(&self, incoming: usize) -> Result<&GluingMap, LookupError> {
        self.maps.iter().find(|m| m.incoming == incoming).ok_or(LookupError(incoming))
    }

    fn reduce(&self, component: usize, u: f64, v: f64) -> SectionPoint {
        let period = self.assembled.components[component].period();
        SectionPoint {
            component,
            u: circle::wrap_period(u, period),
            v: circle::wrap(v),
        }
    }

    /// `A`, reduced mod the target lattice.
    pub fn apply_gluing(&self, p: SectionPoint) -> Result<SectionPoint, LookupError> {
        let m = self.map_from(p.component)?;
        let (u, v) = m.forward_lifted(p.u, p.v);
        Ok(self.reduce(m.incoming, u, v))
    }

    pub fn apply_inverse(&self, p: SectionPoint) -> Result<SectionPoint, LookupError> {
        let m = self.map_to(p.component)?;
        let (u, v) = m.inverse_lifted(p.u, p.v);
        Ok(self.reduce(m.outgoing, u, v))
    }

    /// Lattice distance between points of one component.
    pub fn lattice_distance(&self, a: SectionPoint, b: SectionPoint) -> f64 {
        let period = self.assembled.components[a.component].period();
        let du = circle::signed_diff(a.u / period, b.u / period) * period;
        du.abs().max(circle::dist(a.v, b.v))
    }

    pub fn classify(&self) -> FlowClass {
        classify_blueprint(&self.assembled.blueprint)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowKind {
    Anosov,
    PseudoAnosov,
    OneProngPseudoAnosov,
}

impl fmt::Display for FlowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlowKind::Anosov => "Anosov",
            FlowKind::PseudoAnosov => "pseudo-Anosov",
            FlowKind::OneProngPseudoAnosov => "one-prong pseudo-Anosov",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowClass {
    pub kind: FlowKind,
    /// Vertical orbits with `p ≠ 2`, as (vertex, p).
    pub singular: Vec<(String, usize)>,
    /// Σ is an annulus and the closed manifold fibres over the circle with torus fibre.
    pub torus_bundle: bool,
}

impl FlowClass {
    pub fn one_prong_count(&self) -> usize {
        self.singular.iter().filter(|(_, p)| *p == 1).count()
    }

    pub fn summary(&self) -> String {
        let mut s = self.kind.to_string();
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for (_, p) in &self.singular {
            *counts.entry(*p).or_default() += 1;
        }
        for (p, n) in counts {
            let tag = if p == 1 { "one".to_string() } else { p.to_string() };
            let _ = write!(s, ", {n} {tag}-prong orbit{}", if n == 1 { "" } else { "s" });
        }
        if self.torus_bundle {
            s.push_str(", torus bundle");
        }
        s
    }
}

/// The prong census decides the class; `L` plays no part.
pub fn classify_blueprint(bp: &FatGraphBlueprint) -> FlowClass {
    let census = prong_census(bp).unwrap_or_default();
    let singular: Vec<(String, usize)> = census
        .iter()
        .filter(|e| e.class != ProngClass::Regular)
        .map(|e| (e.vertex.clone(), e.prongs))
        .collect();
    let kind = if census.iter().any(|e| e.class == ProngClass::OneProng) {
        FlowKind::OneProngPseudoAnosov
    } else if singular.is_empty() {
        FlowKind::Anosov
    } else {
        FlowKind::PseudoAnosov
    };
    let torus_bundle = !bp.vertices.is_empty()
        && bp.vertices.iter().all(|v| v.valence() == 2)
        && bp.connected_components() == 1;
    FlowClass {
        kind,
        singular,
        torus_bundle,
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("gluing rejected: {}", .0.failures.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ClassifyError(pub GluingReport);

pub fn classify_flow(asm: &AssembledManifold, spec: &GluingSpec) -> Result<FlowClass, ClassifyError> {
    let report = validate_gluing(asm, spec);
    if !report.passed() {
        return Err(ClassifyError(report));
    }
    Ok(classify_blueprint(&asm.blueprint))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble;
    use crate::blueprint::{circle_blueprint, parse_blueprint};

    fn circle_spec(l: &str, shift: &str) -> GluingSpec {
        parse_gluing(&format!("match c1 c0 L={l} shift={shift}\n")).unwrap()
    }

    #[test]
    fn parses_directives() {
        let s = parse_gluing("# comment\nmatch c1 c0 L=1,1,1,2 shift=0.5,0.25\nsurgery v0 m=1,3\n").unwrap();
        assert_eq!(s.pairs[0].l, [[1, 1], [1, 2]]);
        assert_eq!(s.pairs[0].shift, (0.5, 0.25));
        assert_eq!(s.surgeries[0].meridian, (1, 3));
        assert!(matches!(parse_gluing("glue a b"), Err(GluingParseError::UnknownDirective { line: 1, .. })));
        assert!(matches!(parse_gluing("\nmatch a b L=1,2,3"), Err(GluingParseError::Syntax { line: 2, .. })));
    }

    #[test]
    fn circle_example_passes() {
        let asm = assemble(&circle_blueprint(2)).unwrap();
        assert_eq!(asm.components[0].polarity, Polarity::Incoming);
        assert!(validate_gluing(&asm, &circle_spec("1,1,1,2", "0,0")).passed());
    }

    #[test]
    fn itemized_rejections() {
        let asm = assemble(&circle_blueprint(2)).unwrap();
        let r = validate_gluing(&asm, &circle_spec("1,0,5,1", "0,0"));
        assert_eq!(r.failures, vec![GluingFailure::FiberPreserved { line: 1 }]);
        let r = validate_gluing(&asm, &circle_spec("2,1,1,2", "0,0"));
        assert_eq!(r.failures, vec![GluingFailure::Determinant { line: 1, det: 3 }]);
        let asm3 = assemble(&circle_blueprint(3)).unwrap();
        let r = validate_gluing(&asm3, &circle_spec("1,1,1,2", "0,0"));
        assert_eq!(r.failures.len(), 2);
        assert!(r.failures.iter().all(|f| matches!(f, GluingFailure::KleinBottle { .. })));
        let r = validate_gluing(&asm, &parse_gluing("match c0 c1 L=1,1,1,2").unwrap());
        assert_eq!(r.failures.len(), 2);
    }

    #[test]
    fn surgery_cases() {
        let bp = circle_blueprint(2);
        assert!(surgery_record(&bp, "v0", (1, 0)).unwrap().is_trivial());
        assert_eq!(surgery_record(&bp, "v0", (0, 1)), Err(SurgeryError::Longitude(0, 1)));
        assert!(surgery_record(&bp, "v1", (1, 3)).is_ok());
        assert_eq!(surgery_record(&bp, "v0", (2, 4)), Err(SurgeryError::NotCoprime(2, 4)));
        assert!(surgery_record(&bp, "nope", (1, 0)).is_err());
    }

    #[test]
    fn gluing_round_trip_and_equivariance() {
        let asm = assemble(&circle_blueprint(2)).unwrap();
        let m = ClosedManifold::new(asm, &circle_spec("1,1,1,2", "0.3,0.7")).unwrap();
        let zero = ClosedManifold::new(m.assembled.clone(), &circle_spec("1,1,1,2", "0,0")).unwrap();
        let o = zero.apply_gluing(SectionPoint { component: 1, u: 0.0, v: 0.0 }).unwrap();
        assert_eq!((o.component, o.u, o.v), (0, 0.0, 0.0));
        let two_pi = 2.0 * std::f64::consts::PI;
        for i in 0..100 {
            let p = SectionPoint {
                component: 1,
                u: (i as f64 * 0.37) % two_pi,
                v: (i as f64 * 0.61) % 1.0,
            };
            let q = m.apply_gluing(p).unwrap();
            let back = m.apply_inverse(q).unwrap();
            assert!(m.lattice_distance(back, p) < 1e-12);
            let shifted = m.apply_gluing(SectionPoint { u: p.u + two_pi, ..p }).unwrap();
            assert!(m.lattice_distance(shifted, q) < 1e-12);
        }
        assert!(m.apply_gluing(SectionPoint { component: 0, u: 0.0, v: 0.0 }).is_err());
    }

    #[test]
    fn kappa_max_of_example() {
        let asm = assemble(&circle_blueprint(2)).unwrap();
        let m = ClosedManifold::new(asm, &circle_spec("1,1,1,2", "0,0")).unwrap();
        let r = m.maps[0].linear_radian();
        for (row, want) in r.iter().zip([[1.0, 1.0], [1.0, 2.0]]) {
            for (x, w) in row.iter().zip(want) {
                assert!((x - w).abs() < 1e-12);
            }
        }
        assert!((m.maps[0].kappa_max() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classification() {
        for k in [2usize, 4] {
            let asm = assemble(&circle_blueprint(k)).unwrap();
            let c = classify_flow(&asm, &circle_spec("1,1,1,2", "0,0")).unwrap();
            assert_eq!(c.kind, FlowKind::OneProngPseudoAnosov);
            assert_eq!(c.one_prong_count(), k);
            assert!(c.torus_bundle);
        }
        let asm = assemble(&circle_blueprint(2)).unwrap();
        assert_eq!(
            classify_flow(&asm, &circle_spec("1,1,1,2", "0,0")).unwrap().summary(),
            "one-prong pseudo-Anosov, 2 one-prong orbits, torus bundle"
        );
        let fig8 = parse_blueprint("vertex v: a.0 b.0 a.1 b.1\nedge a: a.0 a.1 twist\nedge b: b.0 b.1 twist\n").unwrap();
        let asm = assemble(&fig8).unwrap();
        let c = classify_flow(&asm, &circle_spec("1,1,1,2", "0,0")).unwrap();
        assert_eq!(c.kind, FlowKind::Anosov);
        assert!(c.singular.is_empty() && !c.torus_bundle);
        assert!(classify_flow(&asm, &circle_spec("1,0,1,1", "0,0")).is_err());
    }
}
