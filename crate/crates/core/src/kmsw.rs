//! The KMSW bijection between tandem walks and marked bipolar orientations.
//!
//! The forward map grows the orientation one step at a time on an "upward" view of the map
//! (per-vertex out-edges and in-edges, each listed left to right). The inverse peels the last
//! step off by looking at the top edge `e` of the lower-right boundary, whose head is `v_r`:
//!
//! * if the tail of `e` has outdegree at least 2, the last step created the inner face on the
//!   left of `e`; that face is removed together with any dashed edges it added below S;
//! * otherwise the last step was SE: either `e` was the edge added on top of N (then it is the
//!   only in-edge of N and is deleted), or it was a dashed edge turned plain (it turns dashed).

use crate::bipolar::{edge_of, is_forward, Checked, Edge, EdgeKind, MarkedBipolarOrientation};
use crate::error::{Error, Result};
use crate::steps::{is_confined, Region, Step, TandemWalk};

/// Orientation seen from below: out-edges and in-edges of each vertex, left to right.
#[derive(Clone, Debug)]
struct Upward {
    tail: Vec<usize>,
    head: Vec<usize>,
    kind: Vec<EdgeKind>,
    edge_alive: Vec<bool>,
    outs: Vec<Vec<usize>>,
    ins: Vec<Vec<usize>>,
    vertex_alive: Vec<bool>,
    s: usize,
    n: usize,
    vl: usize,
    vr: usize,
}

impl Upward {
    fn unit() -> Self {
        Upward {
            tail: vec![0],
            head: vec![1],
            kind: vec![EdgeKind::Plain],
            edge_alive: vec![true],
            outs: vec![vec![0], vec![]],
            ins: vec![vec![], vec![0]],
            vertex_alive: vec![true, true],
            s: 0,
            n: 1,
            vl: 0,
            vr: 1,
        }
    }

    fn add_vertex(&mut self) -> usize {
        self.outs.push(Vec::new());
        self.ins.push(Vec::new());
        self.vertex_alive.push(true);
        self.outs.len() - 1
    }

    /// Adds an edge as the rightmost out-edge of `t` and the rightmost in-edge of `h`.
    fn add_edge(&mut self, t: usize, h: usize, kind: EdgeKind) -> usize {
        let e = self.tail.len();
        self.tail.push(t);
        self.head.push(h);
        self.kind.push(kind);
        self.edge_alive.push(true);
        self.outs[t].push(e);
        self.ins[h].push(e);
        e
    }

    fn remove_edge(&mut self, e: usize) {
        self.edge_alive[e] = false;
        let (t, h) = (self.tail[e], self.head[e]);
        self.outs[t].retain(|&x| x != e);
        self.ins[h].retain(|&x| x != e);
    }

    fn remove_vertex(&mut self, v: usize) {
        debug_assert!(self.outs[v].is_empty() && self.ins[v].is_empty());
        self.vertex_alive[v] = false;
    }

    fn from_map(o: &MarkedBipolarOrientation, leftmost_in: usize) -> Self {
        let ne = o.edges.len();
        let mut up = Upward {
            tail: o.edges.iter().map(|e| e.tail).collect(),
            head: o.edges.iter().map(|e| e.head).collect(),
            kind: o.edges.iter().map(|e| e.kind).collect(),
            edge_alive: vec![true; ne],
            outs: vec![Vec::new(); o.vertices],
            ins: vec![Vec::new(); o.vertices],
            vertex_alive: vec![true; o.vertices],
            s: o.s,
            n: o.n,
            vl: o.vl,
            vr: o.vr,
        };
        for v in 0..o.vertices {
            let list = &o.rot[v];
            let len = list.len();
            // Start at the rightmost out-dart: a forward dart preceded by a backward one.
            let k0 = if v == o.s {
                0
            } else if v == o.n {
                list.iter()
                    .position(|&d| edge_of(d) == leftmost_in)
                    .unwrap_or(0)
            } else {
                (0..len)
                    .find(|&k| is_forward(list[k]) && !is_forward(list[(k + len - 1) % len]))
                    .unwrap_or(0)
            };
            for t in 0..len {
                let d = list[(k0 + t) % len];
                if is_forward(d) {
                    up.outs[v].push(edge_of(d));
                } else {
                    up.ins[v].push(edge_of(d));
                }
            }
            up.outs[v].reverse();
        }
        up
    }

    /// Compacts live vertices and edges into a rotation system.
    fn into_map(self) -> MarkedBipolarOrientation {
        let mut vid = vec![usize::MAX; self.outs.len()];
        let mut nv = 0;
        for v in 0..self.outs.len() {
            if self.vertex_alive[v] {
                vid[v] = nv;
                nv += 1;
            }
        }
        let mut eid = vec![usize::MAX; self.tail.len()];
        let mut edges = Vec::new();
        for e in 0..self.tail.len() {
            if self.edge_alive[e] {
                eid[e] = edges.len();
                edges.push(Edge {
                    tail: vid[self.tail[e]],
                    head: vid[self.head[e]],
                    kind: self.kind[e],
                });
            }
        }
        let mut rot = vec![Vec::new(); nv];
        for v in 0..self.outs.len() {
            if !self.vertex_alive[v] {
                continue;
            }
            let list = &mut rot[vid[v]];
            for &e in self.outs[v].iter().rev() {
                list.push(2 * eid[e]);
            }
            for &e in &self.ins[v] {
                list.push(2 * eid[e] + 1);
            }
        }
        MarkedBipolarOrientation {
            vertices: nv,
            edges,
            rot,
            s: vid[self.s],
            n: vid[self.n],
            vl: vid[self.vl],
            vr: vid[self.vr],
        }
    }
}

/// Forward construction state with the lower-right and upper-right boundaries kept explicitly.
struct Builder {
    up: Upward,
    /// Lower-right boundary vertices, S first, v_r last.
    lower_right: Vec<usize>,
    /// Upper-right boundary vertices, N first, v_r last.
    upper_right: Vec<usize>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            up: Upward::unit(),
            lower_right: vec![0, 1],
            upper_right: vec![1],
        }
    }

    fn se(&mut self) {
        let up = &mut self.up;
        if up.vr != up.n {
            self.upper_right.pop();
            let e = up.outs[up.vr][0];
            up.kind[e] = EdgeKind::Plain;
            up.vr = up.head[e];
            debug_assert_eq!(Some(&up.vr), self.upper_right.last());
            self.lower_right.push(up.vr);
        } else {
            let v = up.add_vertex();
            up.add_edge(up.n, v, EdgeKind::Plain);
            up.n = v;
            up.vr = v;
            self.lower_right.push(v);
            self.upper_right = vec![v];
        }
    }

    fn face(&mut self, i: usize, j: usize) {
        let up = &mut self.up;
        let vr_old = up.vr;
        let edges_below = self.lower_right.len() - 1;
        let bottom = if i < edges_below {
            let idx = edges_below - i - 1;
            self.lower_right.truncate(idx + 1);
            self.lower_right[idx]
        } else {
            // Extend the lower-left boundary with dashed edges below S.
            let k = i + 1 - edges_below;
            let mut below = up.s;
            for _ in 0..k {
                let w = up.add_vertex();
                up.add_edge(w, below, EdgeKind::Dashed);
                below = w;
            }
            up.s = below;
            self.lower_right = vec![below];
            below
        };
        let mut prev = bottom;
        let mut kind = EdgeKind::Plain;
        let mut created = Vec::with_capacity(j);
        for _ in 0..j {
            let r = up.add_vertex();
            up.add_edge(prev, r, kind);
            created.push(r);
            prev = r;
            kind = EdgeKind::Dashed;
        }
        up.add_edge(prev, vr_old, kind);
        self.upper_right.extend(created.iter().rev());
        up.vr = created.first().copied().unwrap_or(vr_old);
        self.lower_right.push(up.vr);
    }
}

/// Builds the marked orientation Φ(w).
pub fn phi(w: &TandemWalk) -> MarkedBipolarOrientation {
    let mut b = Builder::new();
    for s in &w.steps {
        match *s {
            Step::SE => b.se(),
            Step::Face(i, j) => b.face(i as usize, j as usize),
        }
    }
    b.up.into_map()
}

fn internal(msg: &str) -> Error {
    Error::Internal(format!("phi_inverse: {msg}"))
}

/// Recovers the walk from a valid marked orientation.
pub fn phi_inverse(o: &MarkedBipolarOrientation) -> Result<TandemWalk> {
    let checked = o.checked()?;
    phi_inverse_with(o, &checked)
}

/// Φ⁻¹ for an orientation already validated into `checked`.
pub fn phi_inverse_with(o: &MarkedBipolarOrientation, checked: &Checked) -> Result<TandemWalk> {
    let top_left = *checked
        .boundary
        .left_edges
        .last()
        .ok_or_else(|| internal("empty left boundary"))?;
    let mut up = Upward::from_map(o, top_left);
    let mut live_edges = o.edges.len();
    let mut steps = Vec::with_capacity(o.plain_edge_count().saturating_sub(1));
    while live_edges > 1 {
        let e = *up.ins[up.vr]
            .last()
            .ok_or_else(|| internal("v_r has no in-edge"))?;
        let u = up.tail[e];
        if up.outs[u].len() >= 2 {
            if up.outs[u].last() != Some(&e) {
                return Err(internal(
                    "top lower-right edge is not rightmost at its tail",
                ));
            }
            // Right boundary of the face left of e.
            let mut right = vec![e];
            let top = loop {
                let cur = *right.last().unwrap();
                let w = up.head[cur];
                if up.ins[w].first() == Some(&cur) && !up.outs[w].is_empty() {
                    right.push(up.outs[w][0]);
                } else {
                    break w;
                }
            };
            // Left boundary of the same face.
            let mut left = vec![up.outs[u][up.outs[u].len() - 2]];
            let top_left = loop {
                let cur = *left.last().unwrap();
                let w = up.head[cur];
                if up.ins[w].last() == Some(&cur) && !up.outs[w].is_empty() {
                    left.push(*up.outs[w].last().unwrap());
                } else {
                    break w;
                }
            };
            if top != top_left {
                return Err(internal("face boundaries do not meet"));
            }
            if right[1..].iter().any(|&x| up.kind[x] != EdgeKind::Dashed) {
                return Err(internal(
                    "right side of the last face is not dashed above v_r",
                ));
            }
            let k = left
                .iter()
                .take_while(|&&x| up.kind[x] == EdgeKind::Dashed)
                .count();
            if k > 0 && u != up.s {
                return Err(internal(
                    "dashed edges below a face that does not start at S",
                ));
            }
            let (i, j) = (left.len() - 1, right.len() - 1);
            for &x in &right {
                up.remove_edge(x);
            }
            for &x in &right[1..] {
                up.remove_vertex(up.tail[x]);
            }
            live_edges -= right.len();
            if k > 0 {
                let new_s = up.head[left[k - 1]];
                for &x in &left[..k] {
                    up.remove_edge(x);
                }
                for &x in &left[..k] {
                    up.remove_vertex(up.tail[x]);
                }
                live_edges -= k;
                up.s = new_s;
            }
            up.vr = top;
            steps.push(Step::Face(i as u32, j as u32));
        } else if up.vr == up.n && up.ins[up.vr].len() == 1 {
            let v = up.vr;
            up.remove_edge(e);
            up.remove_vertex(v);
            live_edges -= 1;
            up.n = u;
            up.vr = u;
            steps.push(Step::SE);
        } else {
            up.kind[e] = EdgeKind::Dashed;
            up.vr = u;
            steps.push(Step::SE);
        }
    }
    if up.s == up.n
        || up.vr != up.n
        || up.vl != up.s
        || up
            .kind
            .iter()
            .zip(&up.edge_alive)
            .any(|(k, a)| *a && *k != EdgeKind::Plain)
    {
        return Err(internal("peeling did not end at the unit orientation"));
    }
    steps.reverse();
    Ok(TandemWalk::new(steps))
}

/// Reverses the walk and swaps the coordinates of face steps; Φ(ρ(w)) = ρ(Φ(w)).
pub fn rho_on_walks(w: &TandemWalk) -> TandemWalk {
    TandemWalk::new(
        w.steps
            .iter()
            .rev()
            .map(|s| match *s {
                Step::SE => Step::SE,
                Step::Face(i, j) => Step::Face(j, i),
            })
            .collect(),
    )
}

/// The walk-level involution Φ⁻¹ ∘ σ ∘ Φ; exchanges the statistics a and d.
pub fn sigma_on_walks(w: &TandemWalk) -> TandemWalk {
    let o = phi(w).sigma().expect("phi produces valid orientations");
    phi_inverse(&o).expect("sigma preserves validity")
}

/// Maps a quadrant excursion of length n ≥ 2 to a plane bipolar orientation with n-1 edges.
pub fn excursion_to_bipolar(w: &TandemWalk) -> Result<MarkedBipolarOrientation> {
    if w.len() < 2 {
        return Err(Error::Domain(
            "excursion must have at least two steps".into(),
        ));
    }
    if !is_confined(w, (0, 0), Region::Quadrant) || w.displacement() != (0, 0) {
        return Err(Error::Domain("walk is not a quadrant excursion".into()));
    }
    let o = phi(w);
    let first = o.rot[o.s][0];
    let last = *o.rot[o.s].last().unwrap();
    let drop = [edge_of(first), edge_of(last)];
    let mut eid = vec![usize::MAX; o.edges.len()];
    let mut edges = Vec::new();
    for (k, e) in o.edges.iter().enumerate() {
        if !drop.contains(&k) {
            eid[k] = edges.len();
            edges.push(*e);
        }
    }
    let rot = o
        .rot
        .iter()
        .map(|list| {
            list.iter()
                .filter(|&&d| !drop.contains(&edge_of(d)))
                .map(|&d| 2 * eid[edge_of(d)] + (d & 1))
                .collect()
        })
        .collect();
    let mut out = MarkedBipolarOrientation { rot, edges, ..o };
    out.normalize_sink();
    Ok(out)
}

/// Inverse of [`excursion_to_bipolar`]: reattaches the two outer edges and applies Φ⁻¹.
pub fn bipolar_to_excursion(o: &MarkedBipolarOrientation) -> Result<TandemWalk> {
    o.ensure_valid()?;
    if o.vr != o.n || o.vl != o.s {
        return Err(Error::Domain("orientation is marked".into()));
    }
    let mut m = o.clone();
    m.normalize_sink();
    let ne = m.edges.len();
    m.edges.push(Edge {
        tail: m.s,
        head: m.n,
        kind: EdgeKind::Plain,
    });
    m.edges.push(Edge {
        tail: m.s,
        head: m.n,
        kind: EdgeKind::Plain,
    });
    let (right, left) = (ne, ne + 1);
    let (s, n) = (m.s, m.n);
    m.rot[s].insert(0, 2 * right);
    m.rot[s].push(2 * left);
    m.rot[n].insert(0, 2 * left + 1);
    m.rot[n].push(2 * right + 1);
    phi_inverse(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipolar::Signature;
    use crate::steps::walk_stats;

    #[test]
    fn empty_walk_is_unit() {
        let o = phi(&TandemWalk::default());
        assert_eq!(o, MarkedBipolarOrientation::unit());
        assert_eq!(phi_inverse(&o).unwrap(), TandemWalk::default());
    }

    #[test]
    fn two_step_example() {
        let w = TandemWalk::new(vec![Step::Face(0, 1), Step::SE]);
        let o = phi(&w);
        assert!(o.validate().unwrap().is_pass());
        assert_eq!(o.plain_edge_count(), 3);
        // Left boundary S→N, right boundary S→r→N with v_r = N.
        assert_eq!(o.signature().unwrap(), Signature::new(0, 0, 1, 0));
        let st = walk_stats(&w);
        assert_eq!((st.a, st.b, st.c, st.d), (0, 0, 1, 0));
        assert_eq!(phi_inverse(&o).unwrap(), w);
    }

    #[test]
    fn rho_walk_example() {
        let w = TandemWalk::new(vec![Step::Face(1, 2), Step::SE]);
        assert_eq!(rho_on_walks(&w).steps, vec![Step::SE, Step::Face(2, 1)]);
    }

    #[test]
    fn overflow_face() {
        let w = TandemWalk::new(vec![
            Step::Face(3, 0),
            Step::Face(0, 2),
            Step::SE,
            Step::Face(2, 1),
        ]);
        let o = phi(&w);
        assert!(o.validate().unwrap().is_pass(), "{:?}", o.validate());
        let st = walk_stats(&w);
        let sig = o.signature().unwrap();
        assert_eq!((sig.a, sig.b, sig.c, sig.d), (st.a, st.b, st.c, st.d));
        assert_eq!(phi_inverse(&o).unwrap(), w);
    }
}
