//! Builders for the named graph families.

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::graph::{grow_ball, GraphBall, VertexId};

/// Ladder with `length` columns. Vertex `2*i + s` is column `i`, rail `s`.
///
/// The singly infinite ladder is rooted at column 0, rail 0, whose degree-2
/// vertices are genuinely complete; its declared degree is therefore left
/// unconstrained. The doubly infinite one is rooted at column `length / 2`.
pub fn build_ladder(length: usize, doubly_infinite: bool) -> Result<GraphBall> {
    if length < 2 {
        return Err(Error::Range("ladder length must be at least 2".into()));
    }
    let n = 2 * length;
    let mut adj = vec![Vec::new(); n];
    let mut link = |a: usize, b: usize| {
        adj[a].push(b);
        adj[b].push(a);
    };
    for i in 0..length {
        link(2 * i, 2 * i + 1);
        if i + 1 < length {
            link(2 * i, 2 * i + 2);
            link(2 * i + 1, 2 * i + 3);
        }
    }
    let complete: Vec<bool> = (0..n)
        .map(|v| {
            let i = v / 2;
            let right_end = i + 1 == length;
            !right_end && (!doubly_infinite || i > 0)
        })
        .collect();
    if doubly_infinite {
        GraphBall::new(2 * (length / 2), adj, complete, Some(3))
    } else {
        GraphBall::new(0, adj, complete, None)
    }
}

/// Doubly infinite twisted ladder: columns `i` and `i+1` are joined by a
/// straight pair of edges for even `i` and by a crossed square (complete
/// bipartite `K_{2,2}`) for odd `i`. There are no rungs. Vertex `2*i + s`.
pub fn build_twisted_ladder(length: usize) -> Result<GraphBall> {
    if length < 4 || !length.is_multiple_of(2) {
        return Err(Error::Range("twisted ladder length must be even and at least 4".into()));
    }
    let n = 2 * length;
    let mut adj = vec![Vec::new(); n];
    let mut link = |a: usize, b: usize| {
        adj[a].push(b);
        adj[b].push(a);
    };
    for i in 0..length - 1 {
        let (l0, l1, r0, r1) = (2 * i, 2 * i + 1, 2 * i + 2, 2 * i + 3);
        link(l0, r0);
        link(l1, r1);
        if i % 2 == 1 {
            link(l0, r1);
            link(l1, r0);
        }
    }
    let complete = (0..n).map(|v| v / 2 > 0 && v / 2 + 1 < length).collect();
    GraphBall::new(2 * (length / 2), adj, complete, Some(3))
}

/// Rooted `d`-regular tree; vertices at depth below `depth` are complete.
pub fn build_tree(d: usize, depth: usize) -> Result<GraphBall> {
    if d < 3 || depth < 1 {
        return Err(Error::Range("tree needs d >= 3 and depth >= 1".into()));
    }
    let mut total = 1usize;
    let mut level = d;
    for _ in 0..depth {
        total = total.saturating_add(level);
        level = level.saturating_mul(d - 1);
    }
    let cap = crate::max_vertices();
    if total > cap {
        return Err(Error::ResourceCap { what: "tree vertices".into(), limit: cap });
    }
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new()];
    let mut complete = vec![true];
    let mut frontier = vec![0usize];
    for k in 0..depth {
        let mut next = Vec::new();
        for &p in &frontier {
            let kids = if k == 0 { d } else { d - 1 };
            for _ in 0..kids {
                let c = adj.len();
                adj.push(vec![p]);
                adj[p].push(c);
                complete.push(k + 1 < depth);
                next.push(c);
            }
        }
        frontier = next;
    }
    GraphBall::new(0, adj, complete, Some(d))
}

/// Free product of `d - 2` copies of `K_2` with `Z_g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreeProductSpec {
    pub d: usize,
    pub g: usize,
}

/// Normal form: syllables `(factor, exponent)`, adjacent factors distinct.
/// Factors `0..d-2` are the involutions, factor `d-2` is the cyclic group.
pub type FreeWord = Vec<(u8, u8)>;

impl FreeProductSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d < 3 || self.g < 3 || self.d > 200 || self.g > 200 {
            return Err(Error::Range("free product needs d >= 3 and g >= 3".into()));
        }
        Ok(())
    }

    /// Right neighbours of `w` with generator labels `a1..`, `b`, `B` (= b^-1).
    pub fn neighbors(&self, w: &FreeWord) -> Vec<(FreeWord, Option<String>)> {
        let cyc = (self.d - 2) as u8;
        let g = self.g as u8;
        let mut out = Vec::with_capacity(self.d);
        for f in 0..cyc {
            let mut x = w.clone();
            if x.last().map(|s| s.0) == Some(f) {
                x.pop();
            } else {
                x.push((f, 1));
            }
            out.push((x, Some(format!("a{}", f + 1))));
        }
        for (step, name) in [(1u8, "b"), (g - 1, "B")] {
            let mut x = w.clone();
            match x.last_mut() {
                Some(s) if s.0 == cyc => {
                    s.1 = (s.1 + step) % g;
                    if s.1 == 0 {
                        x.pop();
                    }
                }
                _ => x.push((cyc, step)),
            }
            out.push((x, Some(name.to_string())));
        }
        out
    }
}

/// Cayley ball of the free product, vertices keyed by normal form.
pub fn build_free_product(spec: FreeProductSpec, radius: usize) -> Result<(GraphBall, Vec<FreeWord>)> {
    spec.validate()?;
    if radius < 1 {
        return Err(Error::Range("radius must be at least 1".into()));
    }
    grow_ball(Vec::new(), radius, Some(spec.d), crate::max_vertices(), |w| spec.neighbors(w))
}

/// A doubly periodic (or singly periodic) graph given on a fundamental domain.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicGraph {
    pub name: String,
    pub tags: Vec<String>,
    /// Translation vectors in embedding coordinates; one or two of them.
    pub basis: Vec<[Rational64; 2]>,
    /// `(i, j, offset)`: domain vertex `i` in cell `c` is joined to `j` in cell `c + offset`.
    pub edges: Vec<(usize, usize, [i64; 2])>,
    pub embedding: Vec<[Rational64; 2]>,
}

fn q(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn qq(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

impl PeriodicGraph {
    fn from_half_edges(
        name: &str,
        tags: &[&str],
        basis: Vec<[Rational64; 2]>,
        half: &[(usize, usize, [i64; 2])],
        embedding: Vec<[Rational64; 2]>,
    ) -> Self {
        let mut edges = Vec::new();
        for &(i, j, o) in half {
            edges.push((i, j, o));
            edges.push((j, i, [-o[0], -o[1]]));
        }
        edges.sort();
        PeriodicGraph { name: name.into(), tags: tags.iter().map(|s| s.to_string()).collect(), basis, edges, embedding }
    }

    /// Brick-wall hexagonal lattice: integer points, all horizontal edges,
    /// vertical edges above points with even coordinate sum.
    pub fn hexagonal() -> Self {
        Self::from_half_edges(
            "hexagonal",
            &["A", "B"],
            vec![[q(2), q(0)], [q(1), q(1)]],
            &[(0, 1, [0, 0]), (0, 1, [-1, 0]), (0, 1, [-1, 1])],
            vec![[q(0), q(0)], [q(1), q(0)]],
        )
    }

    /// Squares at the points of a square lattice, joined by horizontal and
    /// vertical edges.
    pub fn arch_4_8_8() -> Self {
        Self::from_half_edges(
            "arch_4_8_8",
            &["E", "N", "W", "S"],
            vec![[q(3), q(0)], [q(0), q(3)]],
            &[
                (0, 1, [0, 0]),
                (1, 2, [0, 0]),
                (2, 3, [0, 0]),
                (3, 0, [0, 0]),
                (0, 2, [1, 0]),
                (1, 3, [0, 1]),
            ],
            vec![[q(1), q(0)], [q(0), q(1)], [q(-1), q(0)], [q(0), q(-1)]],
        )
    }

    /// The flag graph of the hexagonal lattice, which is the ⟨4,6,12⟩ tiling.
    pub fn arch_4_6_12() -> Self {
        let mut g = Self::hexagonal().flag_graph();
        g.name = "arch_4_6_12".into();
        g
    }

    /// Periodic ladder: domain `{bottom, top}`, one basis vector.
    pub fn ladder() -> Self {
        Self::from_half_edges(
            "ladder",
            &["bottom", "top"],
            vec![[q(1), q(0)]],
            &[(0, 1, [0, 0]), (0, 0, [1, 0]), (1, 1, [1, 0])],
            vec![[q(0), q(0)], [q(0), q(1)]],
        )
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    /// Embedding position of domain vertex `i` in `cell`.
    pub fn position(&self, cell: [i64; 2], i: usize) -> [Rational64; 2] {
        let mut p = self.embedding[i];
        for (k, b) in self.basis.iter().enumerate() {
            p[0] += b[0] * q(cell[k]);
            p[1] += b[1] * q(cell[k]);
        }
        p
    }

    /// Outgoing edges of domain vertex `i` as `(j, offset)`.
    pub fn out_edges(&self, i: usize) -> Vec<(usize, [i64; 2])> {
        self.edges.iter().filter(|e| e.0 == i).map(|e| (e.1, e.2)).collect()
    }

    /// Degree counts and reversal closure.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.len() {
            if self.out_edges(i).len() != 3 {
                return Err(Error::InvalidGraph(format!("domain vertex {i} is not cubic")));
            }
        }
        for &(i, j, o) in &self.edges {
            if !self.edges.contains(&(j, i, [-o[0], -o[1]])) {
                return Err(Error::InvalidGraph("edge list not closed under reversal".into()));
            }
        }
        Ok(())
    }

    /// Out-edges of `i` sorted counter-clockwise by direction angle.
    pub fn rotation(&self, i: usize) -> Vec<(usize, [i64; 2])> {
        let p = self.embedding[i];
        let mut out = self.out_edges(i);
        out.sort_by(|a, b| {
            let ang = |e: &(usize, [i64; 2])| {
                let w = self.position(e.1, e.0);
                let dx = w[0] - p[0];
                let dy = w[1] - p[1];
                (*dy.numer() as f64 / *dy.denom() as f64).atan2(*dx.numer() as f64 / *dx.denom() as f64)
            };
            ang(a).partial_cmp(&ang(b)).unwrap()
        });
        out
    }

    /// Flag graph of a cubic periodic planar graph. Flags are
    /// `(vertex, dart, side)`; two flags are adjacent when they differ in
    /// exactly one of vertex, edge or face.
    pub fn flag_graph(&self) -> Self {
        let rot: Vec<_> = (0..self.len()).map(|i| self.rotation(i)).collect();
        let flag = |i: usize, k: usize, side: usize| 6 * i + 2 * k + side;
        let mut half = Vec::new();
        let mut embedding = Vec::new();
        let mut tags = Vec::new();
        for i in 0..self.len() {
            for k in 0..3 {
                let (j, o) = rot[i][k];
                let back = rot[j].iter().position(|&(x, p)| x == i && p == [-o[0], -o[1]]).unwrap();
                let a = self.embedding[i];
                let b = self.position(o, j);
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                for side in 0..2 {
                    let sgn = if side == 0 { q(1) } else { q(-1) };
                    embedding.push([
                        a[0] + dx * qq(1, 3) - dy * sgn * qq(1, 6),
                        a[1] + dy * qq(1, 3) + dx * sgn * qq(1, 6),
                    ]);
                    tags.push(format!("{}{}{}", self.tags[i], k, if side == 0 { 'L' } else { 'R' }));
                    let me = flag(i, k, side);
                    if side == 0 {
                        half.push((me, flag(i, k, 1), [0, 0]));
                        half.push((me, flag(i, (k + 1) % 3, 1), [0, 0]));
                    }
                    // vertex change: each unordered pair once
                    let other = flag(j, back, 1 - side);
                    if (me, [0i64, 0i64]) < (other, o) {
                        half.push((me, other, o));
                    }
                }
            }
        }
        let tag_refs: Vec<&str> = tags.iter().map(|s| s.as_str()).collect();
        Self::from_half_edges("flags", &tag_refs, self.basis.clone(), &half, embedding)
    }
}

/// A ball unrolled from a periodic graph, with the site of every vertex.
#[derive(Clone, Debug)]
pub struct PeriodicBall {
    pub ball: GraphBall,
    pub graph: PeriodicGraph,
    /// `(cell, domain index)` of each ball vertex.
    pub sites: Vec<([i64; 2], usize)>,
}

impl PeriodicBall {
    pub fn position(&self, v: VertexId) -> [Rational64; 2] {
        let (c, i) = self.sites[v];
        self.graph.position(c, i)
    }
}

pub fn unroll(graph: PeriodicGraph, radius: usize) -> Result<PeriodicBall> {
    graph.validate()?;
    if radius < 1 {
        return Err(Error::Range("radius must be at least 1".into()));
    }
    let adj: Vec<_> = (0..graph.len()).map(|i| graph.out_edges(i)).collect();
    let (ball, sites) = grow_ball(([0i64, 0i64], 0usize), radius, Some(3), crate::max_vertices(), |&(c, i)| {
        adj[i].iter().map(|&(j, o)| (([c[0] + o[0], c[1] + o[1]], j), None)).collect()
    })?;
    Ok(PeriodicBall { ball, graph, sites })
}

/// Named periodic family: `hexagonal`, `arch_4_6_12` or `arch_4_8_8`.
pub fn build_periodic(name: &str, radius: usize) -> Result<PeriodicBall> {
    let g = match name {
        "hexagonal" => PeriodicGraph::hexagonal(),
        "arch_4_6_12" => PeriodicGraph::arch_4_6_12(),
        "arch_4_8_8" => PeriodicGraph::arch_4_8_8(),
        _ => return Err(Error::Range(format!("unknown periodic family {name}"))),
    };
    unroll(g, radius)
}

/// Sizes of the faces at each complete vertex, traced through the periodic
/// rotation system. Used to confirm vertex types.
pub fn periodic_face_sizes(g: &PeriodicGraph, i: usize) -> Vec<usize> {
    let rot: Vec<_> = (0..g.len()).map(|x| g.rotation(x)).collect();
    let mut sizes = Vec::new();
    for k in 0..rot[i].len() {
        // face to the left of dart (i,k): next dart is the clockwise
        // predecessor of the reverse dart at the head
        let (mut v, mut cell, mut d) = (i, [0i64, 0i64], k);
        let mut len = 0;
        loop {
            let (j, o) = rot[v][d];
            let back = rot[j].iter().position(|&(x, p)| x == v && p == [-o[0], -o[1]]).unwrap();
            cell = [cell[0] + o[0], cell[1] + o[1]];
            v = j;
            d = (back + rot[j].len() - 1) % rot[j].len();
            len += 1;
            if v == i && cell == [0, 0] && d == k {
                break;
            }
            if len > 1000 {
                break;
            }
        }
        sizes.push(len);
    }
    sizes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_four_cycles(g: &GraphBall) -> usize {
        // brute force over ordered 4-tuples, each square counted 8 times
        let mut count = 0;
        for a in 0..g.len() {
            for &b in g.neighbors(a) {
                for &c in g.neighbors(b) {
                    if c == a {
                        continue;
                    }
                    for &d in g.neighbors(c) {
                        if d != b && d != a && g.has_edge(d, a) {
                            count += 1;
                        }
                    }
                }
            }
        }
        count / 8
    }

    #[test]
    fn ladder_shapes() {
        let l = build_ladder(3, false).unwrap();
        assert_eq!(l.len(), 6);
        assert_eq!(l.degree(l.root()), 2);
        let d = build_ladder(10, true).unwrap();
        assert_eq!(d.degree(d.root()), 3);
        assert_eq!(all_four_cycles(&d), 9);
        assert_eq!(d.distance(d.root(), d.root() + 1).unwrap(), 1);
    }

    #[test]
    fn twisted_ladder_is_cubic_girth_four() {
        let t = build_twisted_ladder(12).unwrap();
        for v in 0..t.len() {
            if t.is_complete(v) {
                assert_eq!(t.degree(v), 3);
            }
        }
        assert_eq!(t.girth_within(), Some(4));
        // not isomorphic to the ladder: ladder vertices lie in two squares
        assert_eq!(all_four_cycles(&t), 5);
    }

    #[test]
    fn tree_sizes() {
        assert_eq!(build_tree(3, 4).unwrap().len(), 46);
        assert!(build_tree(3, 5).unwrap().girth_within().is_none());
    }

    #[test]
    fn free_product_triangles_and_squares() {
        let (g3, _) = build_free_product(FreeProductSpec { d: 3, g: 3 }, 6).unwrap();
        assert_eq!(g3.girth_within(), Some(3));
        let (g4, _) = build_free_product(FreeProductSpec { d: 3, g: 4 }, 6).unwrap();
        assert_eq!(g4.girth_within(), Some(4));
    }

    #[test]
    fn free_product_radius_monotone() {
        let spec = FreeProductSpec { d: 4, g: 3 };
        let (a, ka) = build_free_product(spec, 3).unwrap();
        let (b, kb) = build_free_product(spec, 4).unwrap();
        for (u, v) in a.edges() {
            let bu = kb.iter().position(|k| *k == ka[u]).unwrap();
            let bv = kb.iter().position(|k| *k == ka[v]).unwrap();
            assert!(b.has_edge(bu, bv));
            assert_eq!(a.label(u, v), b.label(bu, bv));
        }
    }

    #[test]
    fn periodic_vertex_types() {
        for (g, want) in [
            (PeriodicGraph::hexagonal(), vec![6, 6, 6]),
            (PeriodicGraph::arch_4_8_8(), vec![4, 8, 8]),
            (PeriodicGraph::arch_4_6_12(), vec![4, 6, 12]),
        ] {
            g.validate().unwrap();
            for i in 0..g.len() {
                let mut s = periodic_face_sizes(&g, i);
                s.sort();
                assert_eq!(s, want, "{} vertex {i}", g.name);
            }
        }
        assert_eq!(PeriodicGraph::arch_4_6_12().len(), 12);
    }

    #[test]
    fn periodic_girths() {
        assert_eq!(build_periodic("hexagonal", 6).unwrap().ball.girth_within(), Some(6));
        assert_eq!(build_periodic("arch_4_8_8", 5).unwrap().ball.girth_within(), Some(4));
        assert_eq!(build_periodic("arch_4_6_12", 6).unwrap().ball.girth_within(), Some(4));
    }

    #[test]
    fn translation_consistency() {
        // translating by a basis vector maps the ball onto its shifted copy
        let pb = build_periodic("hexagonal", 5).unwrap();
        let index: std::collections::HashMap<_, _> = pb.sites.iter().enumerate().map(|(v, s)| (*s, v)).collect();
        for (u, v) in pb.ball.edges() {
            let (cu, iu) = pb.sites[u];
            let (cv, iv) = pb.sites[v];
            let su = ([cu[0] + 1, cu[1]], iu);
            let sv = ([cv[0] + 1, cv[1]], iv);
            if let (Some(&a), Some(&b)) = (index.get(&su), index.get(&sv)) {
                assert!(pb.ball.has_edge(a, b));
            }
        }
    }
}
