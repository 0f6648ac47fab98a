//! Finite rooted balls of infinite graphs.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::hash::Hash;

use crate::error::{Error, Result};

pub type VertexId = usize;

/// A finite rooted piece of an infinite simple graph.
///
/// A vertex is `complete` when every neighbour it has in the infinite graph
/// is present. Walk enumeration may only step out of complete vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphBall {
    root: VertexId,
    offsets: Vec<usize>,
    nbrs: Vec<usize>,
    complete: Vec<bool>,
    degree: Option<usize>,
    labels: BTreeMap<(VertexId, VertexId), String>,
}

/// Oriented closed walk stored without the repeated endpoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleWalk {
    pub vertices: Vec<VertexId>,
}

impl CycleWalk {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Smallest vertex first, then the direction whose second vertex is smaller.
    pub fn canonical(&self) -> CycleWalk {
        let v = &self.vertices;
        let n = v.len();
        if n == 0 {
            return self.clone();
        }
        let s = (0..n).min_by_key(|&i| v[i]).unwrap();
        let fwd: Vec<_> = (0..n).map(|k| v[(s + k) % n]).collect();
        let bwd: Vec<_> = (0..n).map(|k| v[(s + n - k) % n]).collect();
        CycleWalk { vertices: fwd.min(bwd) }
    }

    /// Same cycle traversed the other way, starting at the same vertex.
    pub fn reversed(&self) -> CycleWalk {
        let mut v = self.vertices.clone();
        v[1..].reverse();
        CycleWalk { vertices: v }
    }
}

impl GraphBall {
    /// Builds and validates a ball. Neighbour lists are sorted.
    pub fn new(
        root: VertexId,
        adjacency: Vec<Vec<VertexId>>,
        complete: Vec<bool>,
        degree: Option<usize>,
    ) -> Result<Self> {
        if adjacency.len() != complete.len() {
            return Err(Error::InvalidGraph("adjacency/completeness length mismatch".into()));
        }
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        let mut nbrs = Vec::new();
        offsets.push(0);
        for mut a in adjacency {
            a.sort_unstable();
            nbrs.extend_from_slice(&a);
            offsets.push(nbrs.len());
        }
        let g = GraphBall { root, offsets, nbrs, complete, degree, labels: BTreeMap::new() };
        g.validate()?;
        Ok(g)
    }

    pub fn with_labels(mut self, labels: BTreeMap<(VertexId, VertexId), String>) -> Result<Self> {
        for &(u, v) in labels.keys() {
            if !self.has_edge(u, v) {
                return Err(Error::InvalidGraph(format!("label on non-edge ({u},{v})")));
            }
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.complete.len()
    }

    pub fn is_empty(&self) -> bool {
        self.complete.is_empty()
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.nbrs[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn is_complete(&self, v: VertexId) -> bool {
        self.complete[v]
    }

    pub fn complete_flags(&self) -> &[bool] {
        &self.complete
    }

    pub fn declared_degree(&self) -> Option<usize> {
        self.degree
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.len() && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn label(&self, u: VertexId, v: VertexId) -> Option<&str> {
        self.labels.get(&(u, v)).map(|s| s.as_str())
    }

    pub fn labels(&self) -> &BTreeMap<(VertexId, VertexId), String> {
        &self.labels
    }

    pub fn edge_count(&self) -> usize {
        self.nbrs.len() / 2
    }

    /// Undirected edges as `(u, v)` with `u < v`, in order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.len()).flat_map(move |u| {
            self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v))
        })
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if self.root >= n {
            return Err(Error::InvalidGraph("root out of range".into()));
        }
        if !self.complete[self.root] {
            return Err(Error::InvalidGraph("root is not complete".into()));
        }
        for u in 0..n {
            let nb = self.neighbors(u);
            for (i, &v) in nb.iter().enumerate() {
                if v >= n {
                    return Err(Error::InvalidGraph(format!("neighbour {v} of {u} out of range")));
                }
                if v == u {
                    return Err(Error::InvalidGraph(format!("self-loop at {u}")));
                }
                if i > 0 && nb[i - 1] == v {
                    return Err(Error::InvalidGraph(format!("duplicate edge {u}-{v}")));
                }
                if self.neighbors(v).binary_search(&u).is_err() {
                    return Err(Error::InvalidGraph(format!("asymmetric edge {u}-{v}")));
                }
            }
            if let Some(d) = self.degree {
                if self.complete[u] && nb.len() != d {
                    return Err(Error::InvalidGraph(format!(
                        "complete vertex {u} has degree {} not {d}",
                        nb.len()
                    )));
                }
                if nb.len() > d {
                    return Err(Error::InvalidGraph(format!("vertex {u} exceeds degree {d}")));
                }
            }
        }
        if self.bfs(self.root).iter().any(|d| d.is_none()) {
            return Err(Error::InvalidGraph("ball is disconnected".into()));
        }
        Ok(())
    }

    /// BFS distances from `src`; `None` for unreachable vertices.
    pub fn bfs(&self, src: VertexId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        dist[src] = Some(0);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in self.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: VertexId, v: VertexId) -> Result<usize> {
        if u >= self.len() || v >= self.len() {
            return Err(Error::InvalidGraph("vertex out of range".into()));
        }
        self.bfs(u)[v].ok_or_else(|| Error::InvalidGraph(format!("{u} and {v} are disconnected")))
    }

    /// Length of the shortest cycle inside the ball. Only trustworthy as the
    /// girth of the infinite graph when it does not exceed the complete radius.
    pub fn girth_within(&self) -> Option<usize> {
        let n = self.len();
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            let mut touched = vec![s];
            dist[s] = 0;
            queue.clear();
            queue.push_back(s);
            'bfs: while let Some(u) = queue.pop_front() {
                if let Some(b) = best {
                    if 2 * dist[u] >= b {
                        break 'bfs;
                    }
                }
                for &v in self.neighbors(u) {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        touched.push(v);
                        queue.push_back(v);
                    } else if parent[u] != v {
                        let len = dist[u] + dist[v] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
            for t in touched {
                dist[t] = usize::MAX;
                parent[t] = usize::MAX;
            }
        }
        best
    }

    /// Every cycle of length at most `max_len` whose vertices are all complete,
    /// each reported once in canonical orientation.
    pub fn enumerate_cycles_up_to(&self, max_len: usize, cap: usize) -> Result<Vec<CycleWalk>> {
        if max_len < 3 {
            return Err(Error::Range("max_len must be at least 3".into()));
        }
        let mut out = Vec::new();
        let mut on_path = vec![false; self.len()];
        for s in 0..self.len() {
            if !self.complete[s] {
                continue;
            }
            let mut path = vec![s];
            on_path[s] = true;
            self.cycle_dfs(s, max_len, cap, &mut path, &mut on_path, &mut out)?;
            on_path[s] = false;
        }
        Ok(out)
    }

    fn cycle_dfs(
        &self,
        s: VertexId,
        max_len: usize,
        cap: usize,
        path: &mut Vec<VertexId>,
        on_path: &mut [bool],
        out: &mut Vec<CycleWalk>,
    ) -> Result<()> {
        let u = *path.last().unwrap();
        for &v in self.neighbors(u) {
            if v == s && path.len() >= 3 && path[1] < u {
                out.push(CycleWalk { vertices: path.clone() });
                if out.len() > cap {
                    return Err(Error::ResourceCap { what: "cycle count".into(), limit: cap });
                }
            }
            if v <= s || on_path[v] || !self.complete[v] || path.len() >= max_len {
                continue;
            }
            on_path[v] = true;
            path.push(v);
            self.cycle_dfs(s, max_len, cap, path, on_path, out)?;
            path.pop();
            on_path[v] = false;
        }
        Ok(())
    }

    /// Sub-ball of vertices within `radius` of the root, re-indexed in BFS order.
    /// Returns the ball and the original id of each new vertex.
    pub fn induced_ball(&self, radius: usize) -> Result<(GraphBall, Vec<VertexId>)> {
        let dist = self.bfs(self.root);
        let mut order: Vec<VertexId> =
            (0..self.len()).filter(|&v| dist[v].is_some_and(|d| d <= radius)).collect();
        order.sort_by_key(|&v| (dist[v].unwrap(), v));
        let mut index = HashMap::with_capacity(order.len());
        for (i, &v) in order.iter().enumerate() {
            index.insert(v, i);
        }
        let mut adj = Vec::with_capacity(order.len());
        let mut complete = Vec::with_capacity(order.len());
        for &v in &order {
            let a: Vec<_> = self.neighbors(v).iter().filter_map(|w| index.get(w).copied()).collect();
            complete.push(self.complete[v] && a.len() == self.degree(v));
            adj.push(a);
        }
        let mut labels = BTreeMap::new();
        for (&(u, v), s) in &self.labels {
            if let (Some(&a), Some(&b)) = (index.get(&u), index.get(&v)) {
                labels.insert((a, b), s.clone());
            }
        }
        let g = GraphBall::new(index[&self.root], adj, complete, self.degree)?.with_labels(labels)?;
        Ok((g, order))
    }

    /// Line-oriented text form: a `ball` header, one line per vertex, then labels.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let deg = self.degree.map_or("*".to_string(), |d| d.to_string());
        writeln!(s, "ball {} {} {}", self.len(), self.root, deg).unwrap();
        for v in 0..self.len() {
            write!(s, "{} {}", v, u8::from(self.complete[v])).unwrap();
            for w in self.neighbors(v) {
                write!(s, " {w}").unwrap();
            }
            s.push('\n');
        }
        for ((u, v), l) in &self.labels {
            writeln!(s, "label {u} {v} {l}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let perr = |m: &str| Error::Parse(m.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<&str> = lines.next().ok_or_else(|| perr("empty input"))?.split_whitespace().collect();
        if header.len() != 4 || header[0] != "ball" {
            return Err(perr("bad header"));
        }
        let n: usize = header[1].parse().map_err(|_| perr("bad vertex count"))?;
        let root: usize = header[2].parse().map_err(|_| perr("bad root"))?;
        let degree = match header[3] {
            "*" => None,
            d => Some(d.parse().map_err(|_| perr("bad degree"))?),
        };
        let mut adj = vec![Vec::new(); n];
        let mut complete = vec![false; n];
        let mut seen = vec![false; n];
        let mut labels = BTreeMap::new();
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks[0] == "label" {
                if toks.len() != 4 {
                    return Err(perr("bad label line"));
                }
                let u = toks[1].parse().map_err(|_| perr("bad label vertex"))?;
                let v = toks[2].parse().map_err(|_| perr("bad label vertex"))?;
                labels.insert((u, v), toks[3].to_string());
                continue;
            }
            if toks.len() < 2 {
                return Err(perr("short vertex line"));
            }
            let id: usize = toks[0].parse().map_err(|_| perr("bad vertex id"))?;
            if id >= n || seen[id] {
                return Err(perr("vertex id out of range or repeated"));
            }
            seen[id] = true;
            complete[id] = match toks[1] {
                "0" => false,
                "1" => true,
                _ => return Err(perr("completeness flag must be 0 or 1")),
            };
            for t in &toks[2..] {
                adj[id].push(t.parse().map_err(|_| perr("bad neighbour"))?);
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(perr("missing vertex line"));
        }
        GraphBall::new(root, adj, complete, degree)?.with_labels(labels)
    }
}

/// Grows the radius-`radius` ball around `root` of an implicitly given graph.
///
/// `nbrs` lists the neighbours of a key with an optional edge label. Vertices
/// at distance below `radius` are complete; boundary vertices are complete
/// only if all their neighbours happen to lie in the ball. Parallel edges
/// coalesce, keeping the first label.
pub fn grow_ball<K, F>(
    root: K,
    radius: usize,
    degree: Option<usize>,
    max_vertices: usize,
    mut nbrs: F,
) -> Result<(GraphBall, Vec<K>)>
where
    K: Clone + Eq + Hash,
    F: FnMut(&K) -> Vec<(K, Option<String>)>,
{
    let mut keys = vec![root.clone()];
    let mut index: HashMap<K, usize> = HashMap::new();
    index.insert(root, 0);
    let mut dist = vec![0usize];
    let mut lists: Vec<Vec<(K, Option<String>)>> = Vec::new();
    let mut head = 0;
    while head < keys.len() {
        let k = keys[head].clone();
        let list = nbrs(&k);
        if dist[head] < radius {
            for (w, _) in &list {
                if !index.contains_key(w) {
                    if keys.len() >= max_vertices {
                        return Err(Error::ResourceCap { what: "ball vertices".into(), limit: max_vertices });
                    }
                    index.insert(w.clone(), keys.len());
                    keys.push(w.clone());
                    dist.push(dist[head] + 1);
                }
            }
        }
        lists.push(list);
        head += 1;
    }
    let n = keys.len();
    let mut adj = vec![Vec::new(); n];
    let mut complete = vec![true; n];
    let mut labels = BTreeMap::new();
    for (u, list) in lists.into_iter().enumerate() {
        for (w, lab) in list {
            match index.get(&w) {
                Some(&v) => {
                    if v == u {
                        return Err(Error::InvalidGraph("self-loop in generated graph".into()));
                    }
                    if !adj[u].contains(&v) {
                        adj[u].push(v);
                        if let Some(l) = lab {
                            labels.insert((u, v), l);
                        }
                    }
                }
                None => complete[u] = false,
            }
        }
    }
    let g = GraphBall::new(0, adj, complete, degree)?.with_labels(labels)?;
    Ok((g, keys))
}

/// Rooted isomorphism test by BFS-ordered backtracking.
///
/// Intended for balls of vertex-transitive graphs of equal radius, where the
/// search is fixed once the root star is matched.
pub fn rooted_isomorphic(a: &GraphBall, b: &GraphBall) -> bool {
    if a.len() != b.len() || a.edge_count() != b.edge_count() {
        return false;
    }
    let dist_a = a.bfs(a.root());
    let mut order: Vec<VertexId> = (0..a.len()).collect();
    order.sort_by_key(|&v| (dist_a[v], v));
    let mut parent = vec![usize::MAX; a.len()];
    for &v in &order {
        if let Some(dv) = dist_a[v] {
            if dv > 0 {
                parent[v] = *a.neighbors(v).iter().find(|&&w| dist_a[w] == Some(dv - 1)).unwrap();
            }
        }
    }
    let mut map = vec![usize::MAX; a.len()];
    let mut used = vec![false; b.len()];
    // stack of (position in order, candidate list, next candidate index)
    let mut stack: Vec<(Vec<VertexId>, usize)> = Vec::new();
    let candidates = |pos: usize, map: &[usize], used: &[bool]| -> Vec<VertexId> {
        let x = order[pos];
        let pool: Vec<VertexId> =
            if pos == 0 { vec![b.root()] } else { b.neighbors(map[parent[x]]).to_vec() };
        pool.into_iter()
            .filter(|&y| {
                if used[y] || b.degree(y) != a.degree(x) || b.is_complete(y) != a.is_complete(x) {
                    return false;
                }
                let mut mapped_a = 0;
                for &w in a.neighbors(x) {
                    if map[w] != usize::MAX {
                        mapped_a += 1;
                        if !b.has_edge(y, map[w]) {
                            return false;
                        }
                    }
                }
                let mapped_b = b.neighbors(y).iter().filter(|&&z| used[z]).count();
                mapped_a == mapped_b
            })
            .collect()
    };
    stack.push((candidates(0, &map, &used), 0));
    loop {
        let pos = stack.len() - 1;
        let (cands, next) = stack.last_mut().unwrap();
        if *next >= cands.len() {
            stack.pop();
            if stack.is_empty() {
                return false;
            }
            let x = order[stack.len() - 1];
            used[map[x]] = false;
            map[x] = usize::MAX;
            continue;
        }
        let y = cands[*next];
        *next += 1;
        map[order[pos]] = y;
        used[y] = true;
        if pos + 1 == order.len() {
            return true;
        }
        let c = candidates(pos + 1, &map, &used);
        stack.push((c, 0));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hexagon() -> GraphBall {
        let adj = (0..6).map(|i| vec![(i + 1) % 6, (i + 5) % 6]).collect();
        GraphBall::new(0, adj, vec![true; 6], Some(2)).unwrap()
    }

    #[test]
    fn hexagon_cycle_and_distance() {
        let g = hexagon();
        let cycles = g.enumerate_cycles_up_to(6, 100).unwrap();
        assert_eq!(cycles, vec![CycleWalk { vertices: vec![0, 1, 2, 3, 4, 5] }]);
        assert_eq!(g.distance(0, 3).unwrap(), 3);
        assert_eq!(g.distance(0, 0).unwrap(), 0);
        assert_eq!(g.girth_within(), Some(6));
    }

    #[test]
    fn rejects_asymmetric_and_loops() {
        assert!(GraphBall::new(0, vec![vec![1], vec![]], vec![true, false], None).is_err());
        assert!(GraphBall::new(0, vec![vec![0]], vec![true], None).is_err());
        assert!(GraphBall::new(0, vec![vec![1, 1], vec![0, 0]], vec![true, true], None).is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut labels = BTreeMap::new();
        labels.insert((0, 1), "a".to_string());
        let g = hexagon().with_labels(labels).unwrap();
        let back = GraphBall::from_text(&g.to_text()).unwrap();
        assert_eq!(g, back);
        assert!(GraphBall::from_text("ball 2 0 3\n0 1 1\n").is_err());
    }

    #[test]
    fn path_has_no_girth() {
        let g = GraphBall::new(0, vec![vec![1], vec![0, 2], vec![1]], vec![true, true, false], None).unwrap();
        assert_eq!(g.girth_within(), None);
        assert!(g.enumerate_cycles_up_to(5, 10).unwrap().is_empty());
    }

    #[test]
    fn canonical_is_idempotent() {
        let c = CycleWalk { vertices: vec![4, 2, 7, 1] };
        let k = c.canonical();
        assert_eq!(k.vertices, vec![1, 4, 2, 7]);
        assert_eq!(k.canonical(), k);
        assert_eq!(c.reversed().canonical(), k);
    }

    #[test]
    fn isomorphism_detects_relabeling() {
        let g = hexagon();
        let adj = (0..6).map(|i| vec![(i + 2) % 6, (i + 4) % 6]).collect::<Vec<_>>();
        // 0-2-4-0 and 1-3-5-1: two triangles, not a hexagon
        let h = GraphBall::new(0, adj, vec![true; 6], Some(2));
        assert!(h.is_err() || !rooted_isomorphic(&g, &h.unwrap()));
        let perm = [3, 5, 0, 1, 4, 2];
        let mut adj2 = vec![Vec::new(); 6];
        for (u, v) in g.edges() {
            adj2[perm[u]].push(perm[v]);
            adj2[perm[v]].push(perm[u]);
        }
        let g2 = GraphBall::new(perm[0], adj2, vec![true; 6], Some(2)).unwrap();
        assert!(rooted_isomorphic(&g, &g2));
    }
}
