//! Non-Hausdorff trees as finite presentations.
//!
//! A presentation lists points, closed segments (ordered point lists) and
//! non-separation witnesses `a ≈ b via s`. The witness says `a` and `b` are
//! two limits of one open prong that starts at the last point of `s`. The
//! incidence structure is a graph on points plus one germ node per witnessed
//! prong, joined to the prong's base and to every end. All topology is read
//! off this graph: a point separates `x` from `y` exactly when it lies on the
//! graph path between them, and passing through a germ from one end to
//! another crosses a non-immersed pair.
//!
//! This only models trees with finitely many points of interest. It is
//! enough for separation, blocks, pseudo-distance and axes, which only depend
//! on the points named on the presentation.
//!
//! A periodic presentation is the fundamental domain of a ℤ-cover: `p@n`
//! names the `n`-th translate of `p`, and queries run on the copies
//! `-R..=R`.
//!
//! ```text
//! point x y w
//! segment r: x y
//! segment s: w
//! nonsep y x@1 via s
//! periodic shift:
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write as _};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NHTreeError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown point `{name}`")]
    UnknownPoint { line: usize, name: String },
    #[error("line {line}: unknown segment `{name}`")]
    UnknownSegment { line: usize, name: String },
    #[error("line {line}: duplicate identifier `{name}`")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: `@` translates need a `periodic shift:` line")]
    NotPeriodic { line: usize },
    #[error("segment {segment} lists {point} twice")]
    RepeatedInSegment { segment: String, point: String },
    #[error("segments {a} and {b} overlap in a non-contiguous or misordered set")]
    Overlap { a: String, b: String },
    #[error("nonsep {a} {b}: a point is never non-separated from itself")]
    SelfNonsep { a: String, b: String },
    #[error("nonsep {point} via {segment}: the end lies on the prong's own segment")]
    EndOnSegment { point: String, segment: String },
    #[error("incidence graph has a cycle through {0}")]
    Cycle(String),
    #[error("incidence graph has {0} components")]
    Disconnected(usize),
    #[error("presentation has no points")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("point index {0} out of range")]
    Index(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Germ {
    /// Instantiated segment whose last point is the prong's base.
    pub segment: usize,
    pub base: usize,
    pub ends: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Ref {
    point: usize,
    offset: i64,
}

#[derive(Debug, Clone)]
struct BaseNonsep {
    a: Ref,
    b: Ref,
    segment: usize,
    offset: i64,
}

/// Parsed but not yet unrolled.
#[derive(Debug, Clone)]
pub struct Presentation {
    points: Vec<String>,
    segments: Vec<(String, Vec<Ref>, usize)>,
    nonseps: Vec<BaseNonsep>,
    /// Base image of each point under the declared shift.
    shift: Option<Vec<Ref>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NHTree {
    names: Vec<String>,
    lookup: HashMap<String, usize>,
    /// (base point, copy) for periodic trees.
    copies: Vec<(usize, i64)>,
    base_names: Vec<String>,
    pub segments: Vec<(String, Vec<usize>)>,
    pub germs: Vec<Germ>,
    /// Nodes `0..n` are points, `n..` germs.
    adj: Vec<Vec<usize>>,
    radius: Option<i64>,
    shift: Option<Vec<Ref>>,
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-')
}

fn split_ref(tok: &str, line: usize) -> Result<(&str, i64), NHTreeError> {
    match tok.split_once('@') {
        None => Ok((tok, 0)),
        Some((name, n)) => {
            let n: i64 = n.parse().map_err(|_| NHTreeError::Syntax {
                line,
                msg: format!("bad translate in `{tok}`"),
            })?;
            Ok((name, n))
        }
    }
}

/// Parses the tree format:
///
/// ```text
/// point <id> [<id> ...]
/// segment <id>: <ordered point refs>
/// nonsep <a> <b> via <segment>
/// periodic shift: [<p>-><q>@<n> ...]
/// ```
///
/// Point refs are `p` or `p@n`; a shift line without a map is the unit
/// translation `p ↦ p@1`.
pub fn parse_presentation(text: &str) -> Result<Presentation, NHTreeError> {
    let mut points: Vec<String> = Vec::new();
    let mut point_index: HashMap<String, usize> = HashMap::new();
    let mut seg_index: HashMap<String, usize> = HashMap::new();
    let mut segments = Vec::new();
    let mut nonseps = Vec::new();
    let mut shift_line: Option<(usize, Vec<String>)> = None;
    let mut translates_used = None;
    for (i, full) in text.lines().enumerate() {
        let line = i + 1;
        let body = full.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let syntax = |msg: &str| NHTreeError::Syntax {
            line,
            msg: msg.to_string(),
        };
        let (directive, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let lookup_point = |tok: &str, point_index: &HashMap<String, usize>| -> Result<Ref, NHTreeError> {
            let (name, offset) = split_ref(tok, line)?;
            let point = *point_index.get(name).ok_or_else(|| NHTreeError::UnknownPoint {
                line,
                name: name.to_string(),
            })?;
            Ok(Ref { point, offset })
        };
        match directive {
            "point" => {
                let ids: Vec<&str> = rest.split_whitespace().collect();
                if ids.is_empty() {
                    return Err(syntax("`point` needs at least one identifier"));
                }
                for id in ids {
                    if !is_ident(id) {
                        return Err(syntax(&format!("bad point identifier `{id}`")));
                    }
                    if point_index.insert(id.to_string(), points.len()).is_some() {
                        return Err(NHTreeError::Duplicate {
                            line,
                            name: id.to_string(),
                        });
                    }
                    points.push(id.to_string());
                }
            }
            "segment" => {
                let (head, tail) = rest.split_once(':').ok_or_else(|| syntax("expected `segment <id>: <points>`"))?;
                let id = head.trim();
                if !is_ident(id) {
                    return Err(syntax("bad segment identifier"));
                }
                let refs = tail
                    .split_whitespace()
                    .map(|t| lookup_point(t, &point_index))
                    .collect::<Result<Vec<_>, _>>()?;
                if refs.is_empty() {
                    return Err(syntax("segment needs at least one point"));
                }
                if refs.iter().any(|r| r.offset != 0) {
                    translates_used.get_or_insert(line);
                }
                if seg_index.insert(id.to_string(), segments.len()).is_some() {
                    return Err(NHTreeError::Duplicate {
                        line,
                        name: id.to_string(),
                    });
                }
                segments.push((id.to_string(), refs, line));
            }
            "nonsep" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                let [a, b, "via", s] = toks.as_slice() else {
                    return Err(syntax("expected `nonsep <a> <b> via <segment>`"));
                };
                let a = lookup_point(a, &point_index)?;
                let b = lookup_point(b, &point_index)?;
                let (sname, offset) = split_ref(s, line)?;
                let segment = *seg_index.get(sname).ok_or_else(|| NHTreeError::UnknownSegment {
                    line,
                    name: sname.to_string(),
                })?;
                if a.offset != 0 || b.offset != 0 || offset != 0 {
                    translates_used.get_or_insert(line);
                }
                nonseps.push(BaseNonsep {
                    a,
                    b,
                    segment,
                    offset,
                });
            }
            "periodic" => {
                let tail = rest
                    .trim()
                    .strip_prefix("shift:")
                    .ok_or_else(|| syntax("expected `periodic shift: <map>`"))?;
                if shift_line.is_some() {
                    return Err(syntax("second `periodic shift:` line"));
                }
                shift_line = Some((line, tail.split_whitespace().map(str::to_string).collect()));
            }
            other => return Err(syntax(&format!("unknown directive `{other}`"))),
        }
    }
    if points.is_empty() {
        return Err(NHTreeError::Empty);
    }
    let shift = match shift_line {
        None => {
            if let Some(line) = translates_used {
                return Err(NHTreeError::NotPeriodic { line });
            }
            None
        }
        Some((line, items)) => {
            let mut map: Vec<Ref> = (0..points.len()).map(|p| Ref { point: p, offset: 1 }).collect();
            for (p, r) in parse_map(&items, line, &point_index)? {
                map[p] = r;
            }
            Some(map)
        }
    };
    Ok(Presentation {
        points,
        segments,
        nonseps,
        shift,
    })
}

fn parse_map(items: &[String], line: usize, index: &HashMap<String, usize>) -> Result<Vec<(usize, Ref)>, NHTreeError> {
    items
        .iter()
        .map(|item| {
            let (from, to) = item.split_once("->").ok_or_else(|| NHTreeError::Syntax {
                line,
                msg: format!("expected `p->q` in `{item}`"),
            })?;
            let p = *index.get(from).ok_or_else(|| NHTreeError::UnknownPoint {
                line,
                name: from.to_string(),
            })?;
            let (qname, offset) = split_ref(to, line)?;
            let q = *index.get(qname).ok_or_else(|| NHTreeError::UnknownPoint {
                line,
                name: qname.to_string(),
            })?;
            Ok((p, Ref { point: q, offset }))
        })
        .collect()
}

impl Presentation {
    pub fn is_periodic(&self) -> bool {
        self.shift.is_some()
    }

    /// Unrolls (copies `-R..=R` when periodic) and validates.
    pub fn build(&self, radius: i64) -> Result<NHTree, NHTreeError> {
        let (lo, hi) = if self.is_periodic() { (-radius, radius) } else { (0, 0) };
        let periodic = self.is_periodic();
        let mut names = Vec::new();
        let mut copies = Vec::new();
        let mut lookup = HashMap::new();
        for t in lo..=hi {
            for (p, name) in self.points.iter().enumerate() {
                let full = if periodic { format!("{name}@{t}") } else { name.clone() };
                lookup.insert(full.clone(), names.len());
                names.push(full);
                copies.push((p, t));
            }
        }
        let np = self.points.len() as i64;
        let at = |r: Ref, t: i64| -> Option<usize> {
            let c = r.offset + t;
            (lo..=hi).contains(&c).then(|| ((c - lo) * np + r.point as i64) as usize)
        };
        let mut segments = Vec::new();
        let mut seg_at: HashMap<(usize, i64), usize> = HashMap::new();
        for t in lo..=hi {
            for (si, (name, refs, _)) in self.segments.iter().enumerate() {
                let pts: Option<Vec<usize>> = refs.iter().map(|&r| at(r, t)).collect();
                if let Some(pts) = pts {
                    let full = if periodic { format!("{name}@{t}") } else { name.clone() };
                    seg_at.insert((si, t), segments.len());
                    segments.push((full, pts));
                }
            }
        }
        let mut germ_of: BTreeMap<usize, usize> = BTreeMap::new();
        let mut germs: Vec<Germ> = Vec::new();
        for t in lo..=hi {
            for ns in &self.nonseps {
                let (Some(a), Some(b), Some(&seg)) = (at(ns.a, t), at(ns.b, t), seg_at.get(&(ns.segment, ns.offset + t))) else {
                    continue;
                };
                if a == b {
                    return Err(NHTreeError::SelfNonsep {
                        a: names[a].clone(),
                        b: names[b].clone(),
                    });
                }
                for e in [a, b] {
                    if segments[seg].1.contains(&e) {
                        return Err(NHTreeError::EndOnSegment {
                            point: names[e].clone(),
                            segment: segments[seg].0.clone(),
                        });
                    }
                }
                let g = *germ_of.entry(seg).or_insert_with(|| {
                    germs.push(Germ {
                        segment: seg,
                        base: *segments[seg].1.last().unwrap(),
                        ends: Vec::new(),
                    });
                    germs.len() - 1
                });
                for e in [a, b] {
                    if !germs[g].ends.contains(&e) {
                        germs[g].ends.push(e);
                    }
                }
            }
        }
        for g in &mut germs {
            g.ends.sort_unstable();
        }
        let tree = NHTree {
            names,
            lookup,
            copies,
            base_names: self.points.clone(),
            segments,
            germs,
            adj: Vec::new(),
            radius: periodic.then_some(radius),
            shift: self.shift.clone(),
        };
        tree.validated()
    }
}

pub fn parse_tree(text: &str, radius: i64) -> Result<NHTree, NHTreeError> {
    parse_presentation(text)?.build(radius)
}

impl NHTree {
    fn validated(mut self) -> Result<Self, NHTreeError> {
        let n = self.names.len();
        for (name, pts) in &self.segments {
            let mut seen = BTreeSet::new();
            for &p in pts {
                if !seen.insert(p) {
                    return Err(NHTreeError::RepeatedInSegment {
                        segment: name.clone(),
                        point: self.names[p].clone(),
                    });
                }
            }
        }
        for i in 0..self.segments.len() {
            for j in i + 1..self.segments.len() {
                if !overlap_consistent(&self.segments[i].1, &self.segments[j].1) {
                    return Err(NHTreeError::Overlap {
                        a: self.segments[i].0.clone(),
                        b: self.segments[j].0.clone(),
                    });
                }
            }
        }
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (_, pts) in &self.segments {
            for w in pts.windows(2) {
                edges.insert((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
        for (gi, g) in self.germs.iter().enumerate() {
            let node = n + gi;
            edges.insert((g.base, node));
            for &e in &g.ends {
                edges.insert((e, node));
            }
        }
        let nodes = n + self.germs.len();
        let mut adj = vec![Vec::new(); nodes];
        let mut parent: Vec<usize> = (0..nodes).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(a, b) in &edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                let at = if a < n { a } else { b };
                return Err(NHTreeError::Cycle(self.names[at].clone()));
            }
            parent[ra] = rb;
            adj[a].push(b);
            adj[b].push(a);
        }
        let roots: BTreeSet<usize> = (0..nodes).map(|x| find(&mut parent, x)).collect();
        if roots.len() != 1 {
            // Cutting the unrolling at the window can strand pieces of the
            // outermost copies; anything else is a genuine disconnection.
            let central: BTreeSet<usize> = (0..n)
                .filter(|&x| self.radius.is_some() && self.copies[x].1 == 0)
                .map(|x| find(&mut parent, x))
                .collect();
            if central.len() != 1 {
                return Err(NHTreeError::Disconnected(roots.len()));
            }
            let core = *central.first().unwrap();
            let keep: Vec<bool> = (0..n).map(|x| find(&mut parent, x) == core).collect();
            return self.restricted(&keep).validated();
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        self.adj = adj;
        Ok(self)
    }

    fn restricted(self, keep: &[bool]) -> Self {
        let mut new_index = vec![usize::MAX; keep.len()];
        let mut names = Vec::new();
        let mut copies = Vec::new();
        for (x, &k) in keep.iter().enumerate() {
            if k {
                new_index[x] = names.len();
                names.push(self.names[x].clone());
                copies.push(self.copies[x]);
            }
        }
        let lookup = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut seg_index = vec![usize::MAX; self.segments.len()];
        let mut segments = Vec::new();
        for (si, (name, pts)) in self.segments.into_iter().enumerate() {
            if pts.iter().all(|&p| keep[p]) {
                seg_index[si] = segments.len();
                segments.push((name, pts.iter().map(|&p| new_index[p]).collect()));
            }
        }
        let germs = self
            .germs
            .into_iter()
            .filter(|g| keep[g.base])
            .map(|g| Germ {
                segment: seg_index[g.segment],
                base: new_index[g.base],
                ends: g.ends.iter().map(|&e| new_index[e]).collect(),
            })
            .collect();
        NHTree {
            names,
            lookup,
            copies,
            base_names: self.base_names,
            segments,
            germs,
            adj: Vec::new(),
            radius: self.radius,
            shift: self.shift,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, p: usize) -> &str {
        &self.names[p]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Accepts full names, and bare base names for copy 0 of a periodic tree.
    pub fn point(&self, name: &str) -> Result<usize, QueryError> {
        if let Some(&p) = self.lookup.get(name) {
            return Ok(p);
        }
        if self.radius.is_some() && !name.contains('@') {
            if let Some(&p) = self.lookup.get(&format!("{name}@0")) {
                return Ok(p);
            }
        }
        Err(QueryError::UnknownPoint(name.to_string()))
    }

    pub fn radius(&self) -> Option<i64> {
        self.radius
    }

    pub fn is_periodic(&self) -> bool {
        self.radius.is_some()
    }

    /// Copy index of a point in a periodic tree.
    pub fn copy_of(&self, p: usize) -> Option<i64> {
        self.radius.map(|_| self.copies[p].1)
    }

    pub fn is_hausdorff(&self) -> bool {
        self.germs.is_empty()
    }

    pub fn nonseparated(&self, a: usize, b: usize) -> bool {
        a != b && self.germs.iter().any(|g| g.ends.binary_search(&a).is_ok() && g.ends.binary_search(&b).is_ok())
    }

    fn check(&self, p: usize) -> Result<(), QueryError> {
        if p < self.names.len() {
            Ok(())
        } else {
            Err(QueryError::Index(p))
        }
    }

    /// Components of the tree minus `x`, one per prong at `x`, as sorted
    /// point lists in order of their smallest point.
    pub fn components_minus_point(&self, x: usize) -> Result<Vec<Vec<usize>>, QueryError> {
        self.check(x)?;
        let n = self.names.len();
        let mut comp = vec![usize::MAX; self.adj.len()];
        comp[x] = 0;
        let mut out = Vec::new();
        for &start in &self.adj[x] {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len() + 1;
            let mut pts = Vec::new();
            let mut stack = vec![start];
            comp[start] = id;
            while let Some(v) = stack.pop() {
                if v < n {
                    pts.push(v);
                }
                for &w in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            pts.sort_unstable();
            out.push(pts);
        }
        out.sort();
        Ok(out)
    }

    /// Node path in the incidence graph, germs included.
    fn node_path(&self, x: usize, y: usize) -> Vec<usize> {
        let mut prev = vec![usize::MAX; self.adj.len()];
        prev[x] = x;
        let mut queue = VecDeque::from([x]);
        while let Some(v) = queue.pop_front() {
            if v == y {
                break;
            }
            for &w in &self.adj[v] {
                if prev[w] == usize::MAX {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        let mut path = vec![y];
        while *path.last().unwrap() != x {
            path.push(prev[*path.last().unwrap()]);
        }
        path.reverse();
        path
    }

    /// `[x, y]` split into maximal segments at non-immersed pairs.
    pub fn block(&self, x: usize, y: usize) -> Result<Block, QueryError> {
        self.check(x)?;
        self.check(y)?;
        let n = self.names.len();
        let path = self.node_path(x, y);
        let mut components = vec![Vec::new()];
        for (i, &v) in path.iter().enumerate() {
            if v < n {
                components.last_mut().unwrap().push(v);
                continue;
            }
            let base = self.germs[v - n].base;
            if path[i - 1] != base && path[i + 1] != base {
                components.push(Vec::new());
            }
        }
        Ok(Block { components })
    }

    pub fn distance(&self, x: usize, y: usize) -> Result<usize, QueryError> {
        Ok(self.block(x, y)?.distance())
    }

    pub fn identity(&self) -> Automorphism {
        Automorphism {
            image: (0..self.names.len()).map(Some).collect(),
        }
    }

    /// The declared shift of a periodic tree, defined where it stays in the
    /// window.
    pub fn shift_automorphism(&self) -> Option<Result<Automorphism, AutomorphismError>> {
        let map = self.shift.as_ref()?;
        let image = self.image_from_base(|p| map[p]);
        Some(self.automorphism(image))
    }

    fn image_from_base(&self, f: impl Fn(usize) -> Ref) -> Vec<Option<usize>> {
        (0..self.names.len())
            .map(|x| {
                let (p, t) = self.copies[x];
                let r = f(p);
                if self.is_periodic() {
                    self.lookup.get(&format!("{}@{}", self.base_names[r.point], r.offset + t)).copied()
                } else {
                    Some(r.point)
                }
            })
            .collect()
    }

    /// Parses `automorphism: p->q@n ...` lines (the map may span several
    /// lines). Unlisted points are fixed; on a periodic tree `p->q@n` sends
    /// every `p@i` to `q@(i+n)`.
    pub fn parse_automorphism(&self, text: &str) -> Result<Automorphism, AutomorphismError> {
        let index: HashMap<String, usize> = self.base_names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut map: Vec<Ref> = (0..self.base_names.len()).map(|p| Ref { point: p, offset: 0 }).collect();
        let mut any = false;
        for (i, full) in text.lines().enumerate() {
            let line = i + 1;
            let body = full.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            let tail = body.strip_prefix("automorphism:").ok_or_else(|| AutomorphismError::Syntax {
                line,
                msg: "expected `automorphism: <map>`".into(),
            })?;
            let items: Vec<String> = tail.split_whitespace().map(str::to_string).collect();
            for (p, r) in parse_map(&items, line, &index).map_err(|e| AutomorphismError::Syntax { line, msg: e.to_string() })? {
                if r.offset != 0 && !self.is_periodic() {
                    return Err(AutomorphismError::Syntax {
                        line,
                        msg: "translates need a periodic tree".into(),
                    });
                }
                map[p] = r;
            }
            any = true;
        }
        if !any {
            return Err(AutomorphismError::Syntax {
                line: 0,
                msg: "no `automorphism:` line".into(),
            });
        }
        self.automorphism(self.image_from_base(|p| map[p]))
    }

    /// Checks that a partial point map preserves the incidence structure
    /// wherever it is defined.
    pub fn automorphism(&self, image: Vec<Option<usize>>) -> Result<Automorphism, AutomorphismError> {
        let n = self.names.len();
        if image.len() != n {
            return Err(AutomorphismError::Size {
                expected: n,
                got: image.len(),
            });
        }
        let mut hit = vec![None; n];
        for (x, &y) in image.iter().enumerate() {
            if let Some(y) = y {
                if y >= n {
                    return Err(AutomorphismError::Size { expected: n, got: y });
                }
                if let Some(other) = hit[y].replace(x) {
                    return Err(AutomorphismError::NotInjective {
                        a: self.names[other].clone(),
                        b: self.names[x].clone(),
                    });
                }
            }
        }
        if !self.is_periodic() && image.iter().any(Option::is_none) {
            return Err(AutomorphismError::Partial);
        }
        let gamma = Automorphism { image };
        let inv = gamma.inverse();
        for (map, what) in [(&gamma, "image"), (&inv, "preimage")] {
            for x in 0..n {
                for &w in &self.adj[x] {
                    if w >= n || w < x {
                        continue;
                    }
                    if let (Some(a), Some(b)) = (map.apply(x), map.apply(w)) {
                        if self.adj[a].binary_search(&b).is_err() {
                            return Err(AutomorphismError::Structure(format!(
                                "{what} of edge {}-{} is not an edge",
                                self.names[x], self.names[w]
                            )));
                        }
                    }
                }
            }
            for g in &self.germs {
                let base = map.apply(g.base);
                let ends: Option<Vec<usize>> = g.ends.iter().map(|&e| map.apply(e)).collect();
                let (Some(base), Some(mut ends)) = (base, ends) else {
                    continue;
                };
                ends.sort_unstable();
                if !self.germs.iter().any(|h| h.base == base && h.ends == ends) {
                    return Err(AutomorphismError::Structure(format!(
                        "{what} of the prong at {} is not a prong",
                        self.names[g.base]
                    )));
                }
            }
        }
        Ok(gamma)
    }

    /// `Fix(γ)` and `Fix^∼(γ)` over the points where `γ` is defined.
    pub fn fix_sets(&self, gamma: &Automorphism) -> (Vec<usize>, Vec<usize>) {
        let mut fix = Vec::new();
        let mut near = Vec::new();
        for x in 0..self.names.len() {
            match gamma.apply(x) {
                Some(y) if y == x => {
                    fix.push(x);
                    near.push(x);
                }
                Some(y) if self.nonseparated(x, y) => near.push(x),
                _ => {}
            }
        }
        (fix, near)
    }

    fn axis_set(&self, gamma: &Automorphism) -> Result<(BTreeSet<usize>, BTreeSet<usize>), QueryError> {
        let mut decidable = BTreeSet::new();
        let mut axis = BTreeSet::new();
        for x in 0..self.names.len() {
            let Some(gx) = gamma.apply(x) else { continue };
            let Some(g2x) = gamma.apply(gx) else { continue };
            decidable.insert(x);
            if self.block(x, g2x)?.contains(gx) {
                axis.insert(x);
            }
        }
        Ok((axis, decidable))
    }

    /// `𝒜(γ) = {x : γx ∈ [x, γ²x]}` on the window, with its defining
    /// properties checked.
    pub fn axis(&self, gamma: &Automorphism) -> Result<AxisReport, AxisError> {
        let (fix, _) = self.fix_sets(gamma);
        if let Some(&p) = fix.first() {
            return Err(AxisError::FixedPoint(self.names[p].clone()));
        }
        let (axis, decidable) = self.axis_set(gamma)?;
        let inv = gamma.inverse();
        let (axis_inv, decidable_inv) = self.axis_set(&inv)?;
        let interior: BTreeSet<usize> = decidable.intersection(&decidable_inv).copied().collect();
        let inverse_agrees = interior.iter().all(|x| axis.contains(x) == axis_inv.contains(x));
        let invariant = axis
            .iter()
            .filter_map(|&x| gamma.apply(x))
            .filter(|y| decidable.contains(y))
            .all(|y| axis.contains(&y));
        let mut union_formula = true;
        for &x in &axis {
            let mut union = BTreeSet::new();
            // walk both ways along the orbit of x
            for (map, start) in [(gamma, x), (&inv, x)] {
                let mut a = start;
                for _ in 0..self.names.len() {
                    let Some(b) = map.apply(a) else { break };
                    union.extend(self.block(a, b)?.points());
                    a = b;
                }
            }
            let local: BTreeSet<usize> = interior.iter().filter(|z| union.contains(z)).copied().collect();
            let expected: BTreeSet<usize> = interior.iter().filter(|z| axis.contains(z)).copied().collect();
            if local != expected {
                union_formula = false;
            }
            let mut near = BTreeSet::new();
            let mut orbit = vec![x];
            for _ in 0..2 {
                if let Some(p) = gamma.apply(*orbit.last().unwrap()) {
                    orbit.push(p);
                }
            }
            let mut back = x;
            for _ in 0..3 {
                match inv.apply(back) {
                    Some(p) => {
                        orbit.insert(0, p);
                        back = p;
                    }
                    None => break,
                }
            }
            for w in orbit.windows(2) {
                near.extend(self.block(w[0], w[1])?.points());
            }
            if near.iter().any(|z| decidable.contains(z) && !axis.contains(z)) {
                union_formula = false;
            }
        }
        Ok(AxisReport {
            points: axis.iter().copied().collect(),
            decidable: decidable.len(),
            radius: self.radius,
            inconclusive: axis.is_empty(),
            inverse_agrees,
            invariant,
            union_formula,
        })
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "nhtree.points={}", self.names.len());
        let _ = writeln!(s, "nhtree.segments={}", self.segments.len());
        let _ = writeln!(s, "nhtree.germs={}", self.germs.len());
        let _ = writeln!(s, "nhtree.hausdorff={}", self.is_hausdorff());
        match self.radius {
            Some(r) => {
                let _ = writeln!(s, "nhtree.window=copies {}..={}", -r, r);
            }
            None => {
                let _ = writeln!(s, "nhtree.window=finite");
            }
        }
        s
    }
}

/// The common points of two segments must be one run, in the same or the
/// reversed order in both.
fn overlap_consistent(a: &[usize], b: &[usize]) -> bool {
    let pos_b: HashMap<usize, usize> = b.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let common: Vec<(usize, usize)> = a
        .iter()
        .enumerate()
        .filter_map(|(i, p)| pos_b.get(p).map(|&j| (i, j)))
        .collect();
    if common.len() < 2 {
        return true;
    }
    let runs_a = common.windows(2).all(|w| w[1].0 == w[0].0 + 1);
    let up = common.windows(2).all(|w| w[1].1 == w[0].1 + 1);
    let down = common.windows(2).all(|w| w[0].1 == w[1].1 + 1);
    runs_a && (up || down)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    /// Maximal segments `[x_i, y_i]` in order; `y_i ≈ x_{i+1}`.
    pub components: Vec<Vec<usize>>,
}

impl Block {
    pub fn distance(&self) -> usize {
        self.components.len() - 1
    }

    pub fn points(&self) -> impl Iterator<Item = usize> + '_ {
        self.components.iter().flatten().copied()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.points().any(|q| q == p)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomorphismError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("map has {got} entries, tree has {expected} points")]
    Size { expected: usize, got: usize },
    #[error("{a} and {b} have the same image")]
    NotInjective { a: String, b: String },
    #[error("automorphism of a finite tree must be total")]
    Partial,
    #[error("{0}")]
    Structure(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    image: Vec<Option<usize>>,
}

impl Automorphism {
    pub fn apply(&self, x: usize) -> Option<usize> {
        self.image.get(x).copied().flatten()
    }

    pub fn inverse(&self) -> Automorphism {
        let mut image = vec![None; self.image.len()];
        for (x, y) in self.image.iter().enumerate() {
            if let Some(y) = *y {
                image[y] = Some(x);
            }
        }
        Automorphism { image }
    }

    pub fn power(&self, x: usize, k: usize) -> Option<usize> {
        (0..k).try_fold(x, |p, _| self.apply(p))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AxisError {
    #[error("γ fixes {0}; the axis needs a fixed-point-free automorphism")]
    FixedPoint(String),
    #[error(transparent)]
    Query(#[from] QueryError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisReport {
    pub points: Vec<usize>,
    /// Points where `γ` and `γ²` stay in the window.
    pub decidable: usize,
    pub radius: Option<i64>,
    /// Empty on the window; existence is only guaranteed on the full tree.
    pub inconclusive: bool,
    pub inverse_agrees: bool,
    pub invariant: bool,
    pub union_formula: bool,
}

impl AxisReport {
    pub fn verified(&self) -> bool {
        !self.inconclusive && self.inverse_agrees && self.invariant && self.union_formula
    }
}

impl fmt::Display for AxisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "axis.points={}", self.points.len())?;
        writeln!(f, "axis.decidable={}", self.decidable)?;
        writeln!(f, "axis.inconclusive={}", self.inconclusive)?;
        writeln!(f, "axis.inverse_agrees={}", self.inverse_agrees)?;
        writeln!(f, "axis.invariant={}", self.invariant)?;
        write!(f, "axis.union_formula={}", self.union_formula)
    }
}
