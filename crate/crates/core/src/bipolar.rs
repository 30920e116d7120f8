//! Marked plane bipolar orientations as rotation systems.
//!
//! Every edge `e` has two edge-ends (darts): `2e` sits at its tail and `2e+1` at its head.
//! `rot[v]` lists the darts at `v` in counterclockwise order. The list at the source starts
//! with the rightmost outgoing dart, so the outer face sits between its last and first entries.
//! Faces are traced with `next(d) = ccw_next(opposite(d))`, which keeps the face on the right
//! of each traversed dart.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Plain,
    Dashed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize, EdgeKind)", into = "(usize, usize, EdgeKind)")]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub kind: EdgeKind,
}

impl From<(usize, usize, EdgeKind)> for Edge {
    fn from((tail, head, kind): (usize, usize, EdgeKind)) -> Self {
        Edge { tail, head, kind }
    }
}

impl From<Edge> for (usize, usize, EdgeKind) {
    fn from(e: Edge) -> Self {
        (e.tail, e.head, e.kind)
    }
}

pub type Dart = usize;

#[inline]
pub fn opposite(d: Dart) -> Dart {
    d ^ 1
}

#[inline]
pub fn edge_of(d: Dart) -> usize {
    d >> 1
}

/// True for the tail end of an edge, i.e. a dart pointing along the orientation.
#[inline]
pub fn is_forward(d: Dart) -> bool {
    d & 1 == 0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedBipolarOrientation {
    pub vertices: usize,
    pub edges: Vec<Edge>,
    pub rot: Vec<Vec<Dart>>,
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub vl: usize,
    pub vr: usize,
}

#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct Signature {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Signature {
    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        Signature { a, b, c, d }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.a, self.b, self.c, self.d)
    }
}

/// First invariant that a well-formed map violates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoEdges,
    Disconnected,
    NotPlanar { euler: i64 },
    Loop(usize),
    SourceMismatch,
    SinkMismatch,
    ExtraSource(usize),
    ExtraSink(usize),
    Cycle,
    LocalCondition(usize),
    OuterFace(String),
    InnerFace(usize),
    RightMark(String),
    LeftMark(String),
    DashedSet(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoEdges => write!(f, "map has no edges"),
            Violation::Disconnected => write!(f, "map is disconnected"),
            Violation::NotPlanar { euler } => write!(f, "V-E+F = {euler}, not a planar map"),
            Violation::Loop(e) => write!(f, "edge {e} is a loop"),
            Violation::SourceMismatch => write!(f, "source mismatch: S has an incoming edge"),
            Violation::SinkMismatch => write!(f, "sink mismatch: N has an outgoing edge"),
            Violation::ExtraSource(v) => write!(f, "vertex {v} is a second source"),
            Violation::ExtraSink(v) => write!(f, "vertex {v} is a second sink"),
            Violation::Cycle => write!(f, "orientation has a directed cycle"),
            Violation::LocalCondition(v) => {
                write!(f, "in-edges or out-edges at vertex {v} are not consecutive")
            }
            Violation::OuterFace(m) => write!(f, "outer face: {m}"),
            Violation::InnerFace(k) => {
                write!(f, "inner face {k} is not bounded by two directed paths")
            }
            Violation::RightMark(m) => write!(f, "right mark: {m}"),
            Violation::LeftMark(m) => write!(f, "left mark: {m}"),
            Violation::DashedSet(e) => write!(f, "edge {e} has the wrong plain/dashed kind"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationReport {
    Pass,
    Fail(Violation),
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        matches!(self, ValidationReport::Pass)
    }
}

/// Face structure of a map: the dart orbits and the outer boundary paths.
#[derive(Clone, Debug)]
pub struct Faces {
    /// Darts of all faces, face by face in traversal order.
    darts: Vec<Dart>,
    /// Offsets of each face in `darts`, plus a final sentinel.
    starts: Vec<usize>,
    /// Face lying to the right of each dart.
    pub face_of: Vec<usize>,
}

impl Faces {
    /// Number of faces, the outer one included.
    pub fn len(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Darts of face `k` in traversal order. Face 0 is the outer face.
    pub fn orbit(&self, k: usize) -> &[Dart] {
        &self.darts[self.starts[k]..self.starts[k + 1]]
    }

    pub fn orbits(&self) -> impl Iterator<Item = &[Dart]> {
        (0..self.len()).map(|k| self.orbit(k))
    }
}

/// The two outer boundary paths, both listed from S to N.
#[derive(Clone, Debug)]
pub struct OuterBoundary {
    pub right: Vec<usize>,
    pub right_edges: Vec<usize>,
    pub left: Vec<usize>,
    pub left_edges: Vec<usize>,
}

impl MarkedBipolarOrientation {
    /// A single plain edge S→N with v_r = N and v_l = S.
    pub fn unit() -> Self {
        MarkedBipolarOrientation {
            vertices: 2,
            edges: vec![Edge {
                tail: 0,
                head: 1,
                kind: EdgeKind::Plain,
            }],
            rot: vec![vec![0], vec![1]],
            s: 0,
            n: 1,
            vl: 0,
            vr: 1,
        }
    }

    pub fn dart_vertex(&self, d: Dart) -> usize {
        let e = &self.edges[edge_of(d)];
        if is_forward(d) {
            e.tail
        } else {
            e.head
        }
    }

    pub fn plain_edge_count(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Plain)
            .count()
    }

    pub fn outdegree(&self, v: usize) -> usize {
        self.rot[v].iter().filter(|&&d| is_forward(d)).count()
    }

    pub fn indegree(&self, v: usize) -> usize {
        self.rot[v].iter().filter(|&&d| !is_forward(d)).count()
    }

    /// Checks that the rotation lists form a permutation of the edge-ends, each at its own vertex.
    pub fn check_structure(&self) -> Result<()> {
        if self.rot.len() != self.vertices {
            return Err(Error::Malformed(format!(
                "{} rotation lists for {} vertices",
                self.rot.len(),
                self.vertices
            )));
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.tail >= self.vertices || e.head >= self.vertices {
                return Err(Error::Malformed(format!(
                    "edge {k} has an endpoint out of range"
                )));
            }
        }
        for (name, v) in [
            ("S", self.s),
            ("N", self.n),
            ("vl", self.vl),
            ("vr", self.vr),
        ] {
            if v >= self.vertices {
                return Err(Error::Malformed(format!("{name} = {v} is out of range")));
            }
        }
        let mut seen = vec![false; 2 * self.edges.len()];
        for (v, list) in self.rot.iter().enumerate() {
            for &d in list {
                if d >= seen.len() {
                    return Err(Error::Malformed(format!(
                        "dangling edge-end {d} at vertex {v}"
                    )));
                }
                if seen[d] {
                    return Err(Error::Malformed(format!("edge-end {d} listed twice")));
                }
                seen[d] = true;
                if self.dart_vertex(d) != v {
                    return Err(Error::Malformed(format!(
                        "edge-end {d} listed at vertex {v} but belongs to vertex {}",
                        self.dart_vertex(d)
                    )));
                }
            }
        }
        if let Some(d) = seen.iter().position(|s| !s) {
            return Err(Error::Malformed(format!(
                "edge-end {d} missing from the rotations"
            )));
        }
        Ok(())
    }

    /// Position of every dart inside its rotation list.
    fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; 2 * self.edges.len()];
        for list in &self.rot {
            for (k, &d) in list.iter().enumerate() {
                pos[d] = k;
            }
        }
        pos
    }

    fn ccw_next(&self, pos: &[usize], d: Dart) -> Dart {
        let list = &self.rot[self.dart_vertex(d)];
        list[(pos[d] + 1) % list.len()]
    }

    /// Face orbits, with the orbit of `rot[S][0]` first. Requires a well-formed map.
    pub fn faces(&self) -> Faces {
        let pos = self.positions();
        let m = 2 * self.edges.len();
        let mut face_of = vec![usize::MAX; m];
        let mut darts = Vec::with_capacity(m);
        let mut starts = vec![0];
        let first = self.rot[self.s].first().copied();
        for start in first.into_iter().chain(0..m) {
            if face_of[start] != usize::MAX {
                continue;
            }
            let id = starts.len() - 1;
            let mut d = start;
            loop {
                face_of[d] = id;
                darts.push(d);
                d = self.ccw_next(&pos, opposite(d));
                if d == start {
                    break;
                }
            }
            starts.push(darts.len());
        }
        Faces {
            darts,
            starts,
            face_of,
        }
    }

    /// Splits the outer face into its right (forward) and left (backward) runs.
    pub fn outer_boundary(&self, faces: &Faces) -> std::result::Result<OuterBoundary, Violation> {
        let outer = faces.orbit(0);
        let k = outer
            .iter()
            .position(|&d| !is_forward(d))
            .ok_or_else(|| Violation::OuterFace("no backward edge on the outer face".into()))?;
        if k == 0 {
            return Err(Violation::OuterFace(
                "rot[S] does not start at the right boundary".into(),
            ));
        }
        if outer[k..].iter().any(|&d| is_forward(d)) {
            return Err(Violation::OuterFace(
                "outer face is not two directed paths".into(),
            ));
        }
        let mut right = vec![self.s];
        let mut right_edges = Vec::new();
        for &d in &outer[..k] {
            right_edges.push(edge_of(d));
            right.push(self.edges[edge_of(d)].head);
        }
        if *right.last().unwrap() != self.n {
            return Err(Violation::OuterFace(
                "right boundary does not end at N".into(),
            ));
        }
        let mut left = vec![self.s];
        let mut left_edges = Vec::new();
        for &d in outer[k..].iter().rev() {
            left_edges.push(edge_of(d));
            left.push(self.edges[edge_of(d)].head);
        }
        if *left.last().unwrap() != self.n {
            return Err(Violation::OuterFace(
                "left boundary does not start at N".into(),
            ));
        }
        Ok(OuterBoundary {
            right,
            right_edges,
            left,
            left_edges,
        })
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        self.check_structure()?;
        Ok(match self.check() {
            Ok(_) => ValidationReport::Pass,
            Err(v) => ValidationReport::Fail(v),
        })
    }

    /// Returns `Ok(())` for a valid orientation and `Error::Invalid` otherwise.
    pub fn ensure_valid(&self) -> Result<()> {
        self.checked().map(|_| ())
    }

    /// Validates and returns the face structure computed along the way.
    pub fn checked(&self) -> Result<Checked> {
        self.check_structure()?;
        self.check().map_err(|v| Error::Invalid(v.to_string()))
    }

    fn check(&self) -> std::result::Result<Checked, Violation> {
        let nv = self.vertices;
        let ne = self.edges.len();
        if ne == 0 {
            return Err(Violation::NoEdges);
        }
        if let Some(k) = self.edges.iter().position(|e| e.tail == e.head) {
            return Err(Violation::Loop(k));
        }
        let mut indeg = vec![0usize; nv];
        let mut outdeg = vec![0usize; nv];
        for e in &self.edges {
            outdeg[e.tail] += 1;
            indeg[e.head] += 1;
        }
        // Connectivity through the rotation lists.
        let mut seen = vec![false; nv];
        let mut stack = vec![self.s];
        seen[self.s] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &d in &self.rot[v] {
                let w = self.dart_vertex(opposite(d));
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        if reached != nv {
            return Err(Violation::Disconnected);
        }
        let faces = self.faces();
        let euler = nv as i64 - ne as i64 + faces.len() as i64;
        if euler != 2 {
            return Err(Violation::NotPlanar { euler });
        }
        if indeg[self.s] > 0 {
            return Err(Violation::SourceMismatch);
        }
        if outdeg[self.n] > 0 {
            return Err(Violation::SinkMismatch);
        }
        for v in 0..nv {
            if v != self.s && indeg[v] == 0 {
                return Err(Violation::ExtraSource(v));
            }
            if v != self.n && outdeg[v] == 0 {
                return Err(Violation::ExtraSink(v));
            }
        }
        let mut remaining = indeg.clone();
        stack.push(self.s);
        let mut visited = 0;
        while let Some(v) = stack.pop() {
            visited += 1;
            for &d in &self.rot[v] {
                if is_forward(d) {
                    let h = self.edges[edge_of(d)].head;
                    remaining[h] -= 1;
                    if remaining[h] == 0 {
                        stack.push(h);
                    }
                }
            }
        }
        if visited != nv {
            return Err(Violation::Cycle);
        }
        for v in 0..nv {
            if v != self.s && v != self.n && alternations(&self.rot[v]) != 2 {
                return Err(Violation::LocalCondition(v));
            }
        }
        let boundary = self.outer_boundary(&faces)?;
        for (k, orbit) in faces.orbits().enumerate().skip(1) {
            if alternations(orbit) != 2 {
                return Err(Violation::InnerFace(k));
            }
        }
        let outer = 0;
        let Some(ir) = boundary.right.iter().position(|&v| v == self.vr) else {
            return Err(Violation::RightMark(
                "v_r is not on the right boundary".into(),
            ));
        };
        if ir == 0 {
            return Err(Violation::RightMark("v_r equals S".into()));
        }
        for &v in &boundary.right[ir..boundary.right.len() - 1] {
            if outdeg[v] != 1 {
                return Err(Violation::RightMark(format!(
                    "vertex {v} above v_r has outdegree != 1"
                )));
            }
        }
        for &e in &boundary.right_edges[ir..] {
            if faces.face_of[2 * e + 1] == outer {
                return Err(Violation::RightMark(format!(
                    "edge {e} above v_r has the outer face on its left"
                )));
            }
        }
        let Some(il) = boundary.left.iter().position(|&v| v == self.vl) else {
            return Err(Violation::LeftMark(
                "v_l is not on the left boundary".into(),
            ));
        };
        if il + 1 == boundary.left.len() {
            return Err(Violation::LeftMark("v_l equals N".into()));
        }
        for &v in &boundary.left[1..=il] {
            if indeg[v] != 1 {
                return Err(Violation::LeftMark(format!(
                    "vertex {v} below v_l has indegree != 1"
                )));
            }
        }
        for &e in &boundary.left_edges[..il] {
            if faces.face_of[2 * e] == outer {
                return Err(Violation::LeftMark(format!(
                    "edge {e} below v_l has the outer face on its right"
                )));
            }
        }
        let mut dashed = vec![false; ne];
        for &e in boundary.right_edges[ir..]
            .iter()
            .chain(&boundary.left_edges[..il])
        {
            dashed[e] = true;
        }
        for (k, e) in self.edges.iter().enumerate() {
            if (e.kind == EdgeKind::Dashed) != dashed[k] {
                return Err(Violation::DashedSet(k));
            }
        }
        Ok(Checked {
            faces,
            boundary,
            ir,
            il,
        })
    }

    /// Boundary lengths (a, b; c, d). Fails on invalid input.
    pub fn signature(&self) -> Result<Signature> {
        Ok(self.checked()?.signature())
    }

    /// Inner faces as (type (i,j)) plus a degree histogram; degree = i + j + 2.
    pub fn face_census(&self) -> Result<FaceCensus> {
        Ok(self.checked()?.census())
    }

    /// Canonical traversal code. Two valid maps have equal codes iff they are isomorphic by a
    /// map isomorphism that preserves the root dart `rot[S][0]`, orientations, kinds and marks.
    pub fn canonical_code(&self) -> Vec<u64> {
        let nv = self.vertices;
        let pos = self.positions();
        let mut vlabel = vec![u64::MAX; nv];
        let mut elabel = vec![u64::MAX; self.edges.len()];
        let mut start = vec![usize::MAX; nv];
        let mut order = Vec::with_capacity(nv);
        let mut code = Vec::new();
        let Some(&root) = self.rot[self.s].first() else {
            return vec![nv as u64];
        };
        vlabel[self.s] = 0;
        start[self.s] = root;
        order.push(self.s);
        let mut head = 0;
        let mut next_edge = 0u64;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let list = &self.rot[v];
            code.push(u64::MAX - 1);
            code.push(list.len() as u64);
            let k0 = pos[start[v]];
            for t in 0..list.len() {
                let d = list[(k0 + t) % list.len()];
                let e = edge_of(d);
                if elabel[e] == u64::MAX {
                    elabel[e] = next_edge;
                    next_edge += 1;
                }
                let w = self.dart_vertex(opposite(d));
                if vlabel[w] == u64::MAX {
                    vlabel[w] = order.len() as u64;
                    start[w] = opposite(d);
                    order.push(w);
                }
                let kind = (self.edges[e].kind == EdgeKind::Dashed) as u64;
                code.push(elabel[e] * 4 + 2 * (is_forward(d) as u64) + kind);
                code.push(vlabel[w]);
            }
        }
        code.push(order.len() as u64);
        for v in [self.s, self.n, self.vl, self.vr] {
            code.push(vlabel[v]);
        }
        code
    }

    pub fn isomorphic(&self, other: &Self) -> bool {
        self.canonical_code() == other.canonical_code()
    }

    /// Rotates `rot[v]` so that it starts at dart `d`.
    fn rotate_to(&mut self, v: usize, d: Dart) {
        let k = self.rot[v]
            .iter()
            .position(|&x| x == d)
            .expect("dart at vertex");
        self.rot[v].rotate_left(k);
    }

    /// Last dart of the forward run of the outer face, and the dart following it (at N).
    fn outer_turn(&self) -> (Dart, Dart) {
        let faces = self.faces();
        let outer = faces.orbit(0);
        let k = outer
            .iter()
            .position(|&d| !is_forward(d))
            .expect("outer face has a backward run");
        (outer[k - 1], outer[k])
    }

    /// Dart at N of the top edge on the left boundary.
    fn leftmost_in(&self, checked: &Checked) -> Dart {
        let e = *checked
            .boundary
            .left_edges
            .last()
            .expect("nonempty boundary");
        2 * e + 1
    }

    /// Rotates `rot[N]` to start at its leftmost in-edge.
    pub fn normalize_sink(&mut self) {
        let (_, d) = self.outer_turn();
        let n = self.n;
        self.rotate_to(n, d);
    }

    /// Reverses every edge; poles and marks are exchanged as S'=N, N'=S, v_l'=v_r, v_r'=v_l.
    pub fn rho(&self) -> Result<Self> {
        let checked = self.checked()?;
        Ok(self.rho_with(&checked))
    }

    /// ρ for an orientation already validated into `checked`.
    pub fn rho_with(&self, checked: &Checked) -> Self {
        let leftmost_in = self.leftmost_in(checked);
        let mut o = self.clone();
        for e in o.edges.iter_mut() {
            std::mem::swap(&mut e.tail, &mut e.head);
        }
        for list in o.rot.iter_mut() {
            for d in list.iter_mut() {
                *d ^= 1;
            }
        }
        o.s = self.n;
        o.n = self.s;
        o.vl = self.vr;
        o.vr = self.vl;
        // The old leftmost in-edge of N is the new rightmost out-edge of S'.
        let s = o.s;
        o.rotate_to(s, leftmost_in ^ 1);
        // A half turn: the old rightmost out-edge of S is already first at N'.
        o
    }

    /// Mirror image with plain edges reversed; S'=v_r, N'=v_l, v_l'=N, v_r'=S.
    pub fn sigma(&self) -> Result<Self> {
        let checked = self.checked()?;
        Ok(self.sigma_with(&checked))
    }

    /// σ for an orientation already validated into `checked`.
    pub fn sigma_with(&self, checked: &Checked) -> Self {
        let b = &checked.boundary;
        let top = b.right_edges[checked.ir - 1];
        // The new left boundary ends with the bottom edge of the old upper-left boundary.
        let into_sink = b.left_edges[checked.il];
        let mut o = self.clone();
        for e in o.edges.iter_mut() {
            if e.kind == EdgeKind::Plain {
                std::mem::swap(&mut e.tail, &mut e.head);
            }
        }
        for list in o.rot.iter_mut() {
            list.reverse();
            for d in list.iter_mut() {
                if self.edges[edge_of(*d)].kind == EdgeKind::Plain {
                    *d ^= 1;
                }
            }
        }
        o.s = self.vr;
        o.n = self.vl;
        o.vl = self.n;
        o.vr = self.s;
        // The top edge of the old lower-right boundary becomes the rightmost out-edge of S'.
        let (s, n) = (o.s, o.n);
        o.rotate_to(s, 2 * top);
        o.rotate_to(n, 2 * into_sink + 1);
        o
    }

    /// Graphviz rendering; plain edges solid, dashed edges dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph orientation {\n  rankdir=BT;\n");
        for v in 0..self.vertices {
            let mut label = v.to_string();
            let mut tags = Vec::new();
            if v == self.s {
                tags.push("S");
            }
            if v == self.n {
                tags.push("N");
            }
            if v == self.vl {
                tags.push("vl");
            }
            if v == self.vr {
                tags.push("vr");
            }
            if !tags.is_empty() {
                label = format!("{v} ({})", tags.join(","));
            }
            out.push_str(&format!("  {v} [label=\"{label}\"];\n"));
        }
        for (k, e) in self.edges.iter().enumerate() {
            let style = match e.kind {
                EdgeKind::Plain => "solid",
                EdgeKind::Dashed => "dashed",
            };
            out.push_str(&format!(
                "  {} -> {} [id=\"e{k}\", style={style}];\n",
                e.tail, e.head
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Number of cyclic changes between forward and backward darts.
fn alternations(darts: &[Dart]) -> usize {
    let n = darts.len();
    (0..n)
        .filter(|&k| is_forward(darts[k]) != is_forward(darts[(k + 1) % n]))
        .count()
}

/// A validated orientation's faces and outer boundary, with the mark positions on it.
#[derive(Clone, Debug)]
pub struct Checked {
    pub faces: Faces,
    pub boundary: OuterBoundary,
    /// Index of v_r in `boundary.right`.
    pub ir: usize,
    /// Index of v_l in `boundary.left`.
    pub il: usize,
}

impl Checked {
    pub fn signature(&self) -> Signature {
        let left_len = self.boundary.left_edges.len();
        let right_len = self.boundary.right_edges.len();
        Signature {
            a: self.il as u64,
            b: (left_len - self.il - 1) as u64,
            c: (self.ir - 1) as u64,
            d: (right_len - self.ir) as u64,
        }
    }

    pub fn census(&self) -> FaceCensus {
        let mut types = Vec::with_capacity(self.faces.len() - 1);
        let mut degrees = BTreeMap::new();
        for orbit in self.faces.orbits().skip(1) {
            let fwd = orbit.iter().filter(|&&d| is_forward(d)).count();
            let bwd = orbit.len() - fwd;
            types.push((fwd as u32 - 1, bwd as u32 - 1));
            *degrees.entry(orbit.len()).or_insert(0usize) += 1;
        }
        types.sort_unstable();
        FaceCensus { types, degrees }
    }

    /// Vertices on neither the upper-right nor the lower-left boundary.
    pub fn plain_vertex_count(&self, vertices: usize) -> usize {
        let mut special = vec![false; vertices];
        for &v in &self.boundary.right[self.ir..] {
            special[v] = true;
        }
        for &v in &self.boundary.left[..=self.il] {
            special[v] = true;
        }
        special.iter().filter(|s| !**s).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceCensus {
    /// Sorted face types (i, j).
    pub types: Vec<(u32, u32)>,
    /// Degree to number of inner faces of that degree.
    pub degrees: BTreeMap<usize, usize>,
}

pub fn unit_orientation() -> MarkedBipolarOrientation {
    MarkedBipolarOrientation::unit()
}

pub fn rho(o: &MarkedBipolarOrientation) -> Result<MarkedBipolarOrientation> {
    o.rho()
}

pub fn sigma(o: &MarkedBipolarOrientation) -> Result<MarkedBipolarOrientation> {
    o.sigma()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_basics() {
        let u = unit_orientation();
        assert!(u.validate().unwrap().is_pass());
        assert_eq!(u.signature().unwrap(), Signature::default());
        assert_eq!(u.plain_edge_count(), 1);
        assert!(u.face_census().unwrap().types.is_empty());
        assert!(u.rho().unwrap().isomorphic(&u));
        assert!(u.sigma().unwrap().isomorphic(&u));
    }

    #[test]
    fn reversed_unit_fails_on_source() {
        let mut u = unit_orientation();
        u.edges[0] = Edge {
            tail: 1,
            head: 0,
            kind: EdgeKind::Plain,
        };
        u.rot = vec![vec![1], vec![0]];
        assert_eq!(
            u.validate().unwrap(),
            ValidationReport::Fail(Violation::SourceMismatch)
        );
    }

    #[test]
    fn dangling_dart_is_malformed() {
        let mut u = unit_orientation();
        u.rot[0].push(7);
        assert!(matches!(u.validate(), Err(Error::Malformed(_))));
    }

    #[test]
    fn digon_faces() {
        // Two parallel edges S→N; e0 on the right, e1 on the left.
        let o = MarkedBipolarOrientation {
            vertices: 2,
            edges: vec![
                Edge {
                    tail: 0,
                    head: 1,
                    kind: EdgeKind::Plain,
                },
                Edge {
                    tail: 0,
                    head: 1,
                    kind: EdgeKind::Plain,
                },
            ],
            rot: vec![vec![0, 2], vec![3, 1]],
            s: 0,
            n: 1,
            vl: 0,
            vr: 1,
        };
        assert!(o.validate().unwrap().is_pass());
        let c = o.face_census().unwrap();
        assert_eq!(c.types, vec![(0, 0)]);
        assert_eq!(o.signature().unwrap(), Signature::new(0, 0, 0, 0));
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&unit_orientation()).unwrap();
        assert_eq!(
            s,
            r#"{"vertices":2,"edges":[[0,1,"plain"]],"rot":[[0],[1]],"S":0,"N":1,"vl":0,"vr":1}"#
        );
    }
}
