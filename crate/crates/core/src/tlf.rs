//! Cubic planar tilings in which every vertex sees the same three faces,
//! built as rotation systems, plus turn counting and the right/left
//! injections from ladder words.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fisher::{solve, GrowthEquation, RootResult};
use crate::graph::{CycleWalk, GraphBall, VertexId};
use crate::saw::{eastward_words, HVWord, Letter};

/// Face size standing for an unbounded face.
pub const INF: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TypeVector([u32; 3]);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Sphere,
    Euclidean,
    Hyperbolic,
}

/// `A = <m,m,m>`, `B = <m,2n,2n>` with `m` odd, `C = <2m,2n,2p>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    A,
    B,
    C,
    Inadmissible,
}

impl TypeVector {
    pub fn new(k1: u32, k2: u32, k3: u32) -> Result<Self> {
        if [k1, k2, k3].iter().any(|&k| k < 3) {
            return Err(Error::Range(format!("face sizes must be at least 3, got <{k1},{k2},{k3}>")));
        }
        Ok(TypeVector([k1, k2, k3]))
    }

    pub fn sizes(&self) -> [u32; 3] {
        self.0
    }

    fn sorted(&self) -> [u32; 3] {
        let mut s = self.0;
        s.sort_unstable();
        s
    }

    pub fn has_infinite_face(&self) -> bool {
        self.0.contains(&INF)
    }

    pub fn min_size(&self) -> u32 {
        self.sorted()[0]
    }

    /// `sum (1 - 2/k)` with `1/inf = 0`.
    pub fn curvature_f(&self) -> Rational64 {
        self.0.iter().map(|&k| Rational64::from_integer(1) - inv(k) * 2).sum()
    }

    pub fn geometry(&self) -> Geometry {
        let f = self.curvature_f();
        let two = Rational64::from_integer(2);
        if f < two {
            Geometry::Sphere
        } else if f == two {
            Geometry::Euclidean
        } else {
            Geometry::Hyperbolic
        }
    }

    pub fn family(&self) -> Family {
        let [a, b, c] = self.sorted();
        let half = Rational64::new(1, 2);
        if a == b && b == c && a != INF && a >= 6 {
            return Family::A;
        }
        let even = |k: u32| k == INF || k.is_multiple_of(2);
        for (m, x, y) in [(a, b, c), (b, a, c), (c, a, b)] {
            if m != INF && m % 2 == 1 && x == y && even(x) && inv(m) + inv(x) * 2 <= half {
                return Family::B;
            }
        }
        if [a, b, c].iter().all(|&k| even(k)) && (inv(a) + inv(b) + inv(c)) * 2 <= Rational64::from_integer(1) {
            return Family::C;
        }
        Family::Inadmissible
    }

    pub fn classify(&self) -> (Geometry, Family) {
        (self.geometry(), self.family())
    }

    /// Two equal sizes `2n` and one odd `m`: `<5,2n,2n>` style.
    fn odd_pair(&self) -> Option<(u32, u32)> {
        let [a, b, c] = self.sorted();
        for (m, x, y) in [(a, b, c), (b, a, c), (c, a, b)] {
            if m % 2 == 1 && x == y && x != INF {
                return Some((m, x));
            }
        }
        None
    }

    /// Lower bound on the turn excess of every cycle, where one is known.
    pub fn rho_lower_bound(&self) -> Option<i64> {
        if self.has_infinite_face() {
            return None;
        }
        if self.min_size() >= 6 {
            return Some(6);
        }
        match self.odd_pair() {
            Some((5, x)) if x >= 10 => Some(5),
            _ => None,
        }
    }
}

fn inv(k: u32) -> Rational64 {
    if k == INF {
        Rational64::from_integer(0)
    } else {
        Rational64::new(1, k as i64)
    }
}

impl fmt::Display for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> =
            self.0.iter().map(|&k| if k == INF { "inf".to_string() } else { k.to_string() }).collect();
        write!(f, "<{}>", s.join(","))
    }
}

impl FromStr for TypeVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches(['<', '[']).trim_end_matches(['>', ']']);
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("type-vector needs three entries, got {s:?}")));
        }
        let mut k = [0u32; 3];
        for (i, p) in parts.iter().enumerate() {
            k[i] = match *p {
                "inf" | "oo" | "∞" => INF,
                _ => p.parse().map_err(|_| Error::Parse(format!("bad face size {p:?}")))?,
            };
        }
        TypeVector::new(k[0], k[1], k[2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Turn {
    Right,
    Left,
}

impl Turn {
    pub fn opposite(self) -> Turn {
        match self {
            Turn::Right => Turn::Left,
            Turn::Left => Turn::Right,
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Turn::Right => 1,
            Turn::Left => -1,
        }
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if *self == Turn::Right { "R" } else { "L" })
    }
}

/// Rotation system of a cubic map restricted to a ball.
///
/// Dart `3v + s` leaves `v` through slot `s`; slots run counterclockwise.
/// `corner[v][s]` is the size of the face between slots `s` and `s+1`, which
/// is the face on the left of dart `3v + s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationMap {
    rot: Vec<[Option<VertexId>; 3]>,
    corner: Vec<[u32; 3]>,
}

impl RotationMap {
    pub fn len(&self) -> usize {
        self.rot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rot.is_empty()
    }

    pub fn rotation(&self, v: VertexId) -> [Option<VertexId>; 3] {
        self.rot[v]
    }

    pub fn corners(&self, v: VertexId) -> [u32; 3] {
        self.corner[v]
    }

    pub fn darts(&self) -> impl Iterator<Item = usize> + '_ {
        (0..3 * self.rot.len()).filter(|&d| self.rot[d / 3][d % 3].is_some())
    }

    pub fn tail(&self, d: usize) -> VertexId {
        d / 3
    }

    pub fn head(&self, d: usize) -> Option<VertexId> {
        self.rot[d / 3][d % 3]
    }

    fn slot(&self, x: VertexId, u: VertexId) -> Option<usize> {
        self.rot[x].iter().position(|&w| w == Some(u))
    }

    pub fn dart(&self, u: VertexId, v: VertexId) -> Option<usize> {
        self.slot(u, v).map(|s| 3 * u + s)
    }

    pub fn opposite(&self, d: usize) -> Option<usize> {
        self.dart(self.head(d)?, d / 3)
    }

    pub fn next_at_vertex(&self, d: usize) -> Option<usize> {
        let n = 3 * (d / 3) + (d % 3 + 1) % 3;
        self.head(n).map(|_| n)
    }

    /// Size of the face on the left of `d`.
    pub fn face_size(&self, d: usize) -> u32 {
        self.corner[d / 3][d % 3]
    }

    /// Left and right face sizes of the edge traversed from `u` to `v`.
    pub fn edge_faces(&self, u: VertexId, v: VertexId) -> Option<(u32, u32)> {
        let s = self.slot(u, v)?;
        Some((self.corner[u][s], self.corner[u][(s + 2) % 3]))
    }

    /// Neighbour reached by turning right at `x` after arriving from `u`.
    pub fn right_of(&self, u: VertexId, x: VertexId) -> Option<VertexId> {
        let s = self.slot(x, u)?;
        self.rot[x][(s + 1) % 3]
    }

    pub fn left_of(&self, u: VertexId, x: VertexId) -> Option<VertexId> {
        let s = self.slot(x, u)?;
        self.rot[x][(s + 2) % 3]
    }

    pub fn step(&self, u: VertexId, x: VertexId, t: Turn) -> Option<VertexId> {
        match t {
            Turn::Right => self.right_of(u, x),
            Turn::Left => self.left_of(u, x),
        }
    }

    pub fn turn(&self, u: VertexId, x: VertexId, y: VertexId) -> Option<Turn> {
        if self.right_of(u, x) == Some(y) {
            Some(Turn::Right)
        } else if self.left_of(u, x) == Some(y) {
            Some(Turn::Left)
        } else {
            None
        }
    }

    /// Darts around the face on the left of `d`, or `None` if the face is
    /// not closed inside the map.
    pub fn trace_face(&self, d: usize) -> Option<Vec<usize>> {
        let k = self.face_size(d);
        let mut out = vec![d];
        let (mut u, mut x) = (d / 3, self.head(d)?);
        loop {
            let y = self.left_of(u, x)?;
            let e = self.dart(x, y)?;
            if e == d {
                return Some(out);
            }
            if out.len() as u64 >= k as u64 {
                return None;
            }
            out.push(e);
            (u, x) = (x, y);
        }
    }
}

struct Patch {
    sizes: [u32; 3],
    rot: Vec<[Option<usize>; 3]>,
    corner: Vec<[u32; 3]>,
}

fn inconsistent(msg: impl Into<String>) -> Error {
    Error::InvalidGraph(format!("tiling inconsistency: {}", msg.into()))
}

impl Patch {
    fn remainder(&self, a: u32, b: u32) -> Result<u32> {
        let mut v = self.sizes.to_vec();
        for x in [a, b] {
            let i = v.iter().position(|&y| y == x).ok_or_else(|| inconsistent(format!("no face of size {x} left")))?;
            v.remove(i);
        }
        Ok(v[0])
    }

    fn free_slot(&self, v: usize) -> Option<usize> {
        self.rot[v].iter().position(Option::is_none)
    }

    fn bfs(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.rot.len()];
        dist[0] = 0;
        let mut q = VecDeque::from([0]);
        while let Some(u) = q.pop_front() {
            for w in self.rot[u].iter().flatten() {
                if dist[*w] == usize::MAX {
                    dist[*w] = dist[u] + 1;
                    q.push_back(*w);
                }
            }
        }
        dist
    }

    /// Closes the open face whose boundary arc starts at the front of
    /// `boundary` (a vertex with a free slot), then moves the cursor on.
    fn close_front(&mut self, boundary: &mut VecDeque<usize>) -> Result<()> {
        let s = boundary[0];
        let f = self.free_slot(s).ok_or_else(|| inconsistent("front vertex is saturated"))?;
        let j = (1..boundary.len())
            .find(|&i| self.free_slot(boundary[i]).is_some())
            .ok_or_else(|| inconsistent("boundary has a single open vertex"))?;
        let t = boundary[j];
        let face = self.corner[s][f];
        let missing = face as i64 - (j + 1) as i64;
        if missing < 0 {
            return Err(inconsistent(format!("open face of size {face} already has {} vertices", j + 1)));
        }
        let (mut r, mut sigma) = (s, f);
        let mut fresh = Vec::with_capacity(missing as usize);
        for _ in 0..missing {
            let q = self.rot.len();
            let c0 = self.corner[r][(sigma + 2) % 3];
            let c1 = self.remainder(face, c0)?;
            self.rot.push([Some(r), None, None]);
            self.corner.push([c0, c1, face]);
            self.rot[r][sigma] = Some(q);
            fresh.push(q);
            (r, sigma) = (q, 2);
        }
        let ft = self.free_slot(t).unwrap();
        if self.corner[r][(sigma + 2) % 3] != self.corner[t][ft] || self.corner[t][(ft + 2) % 3] != face {
            return Err(inconsistent(format!("faces do not match when closing a {face}-gon")));
        }
        self.rot[r][sigma] = Some(t);
        self.rot[t][ft] = Some(r);
        boundary.drain(1..j);
        for (i, &q) in fresh.iter().enumerate() {
            boundary.insert(1 + i, q);
        }
        for _ in 0..fresh.len().max(1) {
            let x = boundary.pop_front().unwrap();
            boundary.push_back(x);
        }
        Ok(())
    }
}

/// Ball of the cubic tiling whose vertices all carry the faces of `tv`.
///
/// The root sees the faces in the given counterclockwise order; every other
/// vertex inherits its order from the faces along its first edge. Open faces
/// are closed in the order they appear around the boundary, so the patch
/// grows in layers.
pub fn generate_tiling(tv: TypeVector, radius: usize) -> Result<(GraphBall, RotationMap)> {
    let (geometry, family) = tv.classify();
    if tv.has_infinite_face() {
        return Err(Error::Precondition("infinite faces are not generated".into()));
    }
    if geometry == Geometry::Sphere || family == Family::Inadmissible {
        return Err(Error::Precondition(format!("{tv} is not an infinite vertex type ({geometry:?}, {family:?})")));
    }
    let cap = crate::max_vertices();
    let [k1, k2, k3] = tv.sizes();
    let mut p = Patch { sizes: tv.sizes(), rot: Vec::new(), corner: Vec::new() };
    let k = k1 as usize;
    for i in 0..k {
        p.rot.push([Some((i + 1) % k), Some((i + k - 1) % k), None]);
        if i == 0 {
            p.corner.push([k1, k2, k3]);
        } else {
            let c1 = p.corner[i - 1][2];
            let c2 = p.remainder(k1, c1)?;
            p.corner.push([k1, c1, c2]);
        }
    }
    if p.corner[k - 1][2] != k2 {
        return Err(inconsistent(format!("first face of {tv} does not close")));
    }
    let mut boundary: VecDeque<usize> = (0..k).collect();
    let mut since = 0;
    let mut every = 0;
    loop {
        if since >= every {
            let dist = p.bfs();
            if boundary.iter().all(|&b| dist[b] > radius) {
                break;
            }
            since = 0;
            every = boundary.len();
        }
        let mut spins = 0;
        while p.free_slot(boundary[0]).is_none() {
            boundary.rotate_left(1);
            spins += 1;
            if spins > boundary.len() {
                return Err(inconsistent("boundary has no open vertex"));
            }
        }
        p.close_front(&mut boundary)?;
        since += 1;
        if p.rot.len() > cap.saturating_mul(4) {
            return Err(Error::ResourceCap { what: "tiling patch vertices".into(), limit: cap });
        }
    }
    let adj: Vec<Vec<usize>> = p.rot.iter().map(|r| r.iter().flatten().copied().collect()).collect();
    let complete: Vec<bool> = p.rot.iter().map(|r| r.iter().all(Option::is_some)).collect();
    let patch = GraphBall::new(0, adj, complete, Some(3))?;
    let (ball, order) = patch.induced_ball(radius)?;
    if ball.len() > cap {
        return Err(Error::ResourceCap { what: "tiling ball vertices".into(), limit: cap });
    }
    let mut index = vec![usize::MAX; p.rot.len()];
    for (i, &v) in order.iter().enumerate() {
        index[v] = i;
    }
    let rot = order
        .iter()
        .map(|&v| p.rot[v].map(|w| w.and_then(|w| (index[w] != usize::MAX).then_some(index[w]))))
        .collect();
    let corner = order.iter().map(|&v| p.corner[v]).collect();
    Ok((ball, RotationMap { rot, corner }))
}

/// Turn excess `r - l` of a closed walk traversed in the given direction.
pub fn turn_excess(map: &RotationMap, cycle: &[VertexId]) -> Result<i64> {
    let n = cycle.len();
    let mut rho = 0;
    for i in 0..n {
        let (u, x, y) = (cycle[(i + n - 1) % n], cycle[i], cycle[(i + 1) % n]);
        rho += map
            .turn(u, x, y)
            .ok_or_else(|| Error::Precondition(format!("no turn {u}-{x}-{y} in the map")))?
            .sign();
    }
    Ok(rho)
}

/// Sizes of the faces on the right of the walk, if that side is a bounded
/// region inside the map.
fn faces_on_right(map: &RotationMap, cycle: &[VertexId], limit: usize) -> Option<Vec<u32>> {
    let n = cycle.len();
    let on_cycle: HashSet<(VertexId, VertexId)> =
        (0..n).map(|i| (cycle[i].min(cycle[(i + 1) % n]), cycle[i].max(cycle[(i + 1) % n]))).collect();
    let mut seen = HashSet::new();
    let mut sizes = Vec::new();
    let mut queue: VecDeque<usize> = (0..n).filter_map(|i| map.dart(cycle[(i + 1) % n], cycle[i])).collect();
    if queue.len() != n {
        return None;
    }
    while let Some(d) = queue.pop_front() {
        let darts = map.trace_face(d)?;
        if !seen.insert(*darts.iter().min().unwrap()) {
            continue;
        }
        if seen.len() > limit {
            return None;
        }
        sizes.push(darts.len() as u32);
        for &e in &darts {
            let (a, b) = (map.tail(e), map.head(e).unwrap());
            if !on_cycle.contains(&(a.min(b), a.max(b))) {
                queue.push_back(map.dart(b, a)?);
            }
        }
    }
    Some(sizes)
}

/// The cycle traversed clockwise (enclosed region on the right) together
/// with the sizes of the enclosed faces.
pub fn clockwise(map: &RotationMap, cycle: &CycleWalk) -> Result<(CycleWalk, Vec<u32>)> {
    let limit = 4 * cycle.len() * cycle.len() + 16;
    if let Some(f) = faces_on_right(map, &cycle.vertices, limit) {
        return Ok((cycle.clone(), f));
    }
    let rev = cycle.reversed();
    if let Some(f) = faces_on_right(map, &rev.vertices, limit) {
        return Ok((rev, f));
    }
    Err(Error::Precondition("cycle does not bound a region inside the map".into()))
}

/// `r - l` for the clockwise traversal of `cycle`.
pub fn rho(map: &RotationMap, cycle: &CycleWalk) -> Result<i64> {
    let (cw, _) = clockwise(map, cycle)?;
    turn_excess(map, &cw.vertices)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TurnCountReport {
    pub checked: usize,
    pub skipped: usize,
    pub identity_failures: Vec<CycleWalk>,
    pub bound: Option<i64>,
    pub bound_failures: Vec<CycleWalk>,
    pub min_rho: Option<i64>,
}

impl TurnCountReport {
    pub fn passed(&self) -> bool {
        self.identity_failures.is_empty() && self.bound_failures.is_empty()
    }
}

/// For every cycle: the turn excess computed from rotations must equal
/// `6 + sum (k(F) - 6)` over the enclosed faces, and respect the lower
/// bound for the vertex type where one applies.
pub fn check_l95_l96(map: &RotationMap, tv: TypeVector, cycles: &[CycleWalk]) -> TurnCountReport {
    let bound = tv.rho_lower_bound();
    let rows: Vec<Option<(CycleWalk, i64, i64)>> = cycles
        .par_iter()
        .map(|c| {
            let (cw, faces) = clockwise(map, c).ok()?;
            let rho = turn_excess(map, &cw.vertices).ok()?;
            let predicted = 6 + faces.iter().map(|&k| k as i64 - 6).sum::<i64>();
            Some((c.clone(), rho, predicted))
        })
        .collect();
    let mut rep = TurnCountReport { bound, ..Default::default() };
    for row in rows {
        match row {
            None => rep.skipped += 1,
            Some((c, rho, predicted)) => {
                rep.checked += 1;
                rep.min_rho = Some(rep.min_rho.map_or(rho, |m: i64| m.min(rho)));
                if rho != predicted {
                    rep.identity_failures.push(c.clone());
                }
                if bound.is_some_and(|b| rho < b) {
                    rep.bound_failures.push(c);
                }
            }
        }
    }
    rep
}

/// Walk together with the turns that produced it. `walk` starts with the
/// vertex before the first turn, so `turns.len() == walk.len() - 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnSequence {
    pub walk: Vec<VertexId>,
    pub turns: Vec<Turn>,
}

impl TurnSequence {
    /// The walk without its lead-in vertex.
    pub fn path(&self) -> &[VertexId] {
        &self.walk[1..]
    }
}

/// Largest `|r - l|` over contiguous runs; straight moves count zero.
pub fn max_window_balance(turns: &[Option<Turn>]) -> i64 {
    let (mut lo, mut hi, mut acc) = (0i64, 0i64, 0i64);
    for t in turns {
        acc += t.map_or(0, Turn::sign);
        lo = lo.min(acc);
        hi = hi.max(acc);
    }
    hi - lo
}

fn region(msg: String) -> Error {
    Error::RegionTooSmall(msg)
}

fn turn_at(ball: &GraphBall, map: &RotationMap, u: VertexId, x: VertexId, t: Turn) -> Result<VertexId> {
    if !ball.is_complete(x) {
        return Err(region(format!("walk reaches incomplete vertex {x}")));
    }
    map.step(u, x, t).ok_or_else(|| region(format!("no {t} turn at {x}")))
}

fn case_a_walk(ball: &GraphBall, map: &RotationMap, w: &HVWord) -> Result<TurnSequence> {
    let v = ball.root();
    let v1 = map.rotation(v)[0].ok_or_else(|| region("root has an empty slot".into()))?;
    let v2 = turn_at(ball, map, v1, v, Turn::Right)?;
    let l = w.letters();
    let mut walk = vec![v1, v, v2];
    let mut turns = vec![Turn::Right];
    for k in 2..=l.len() {
        let same = if k == 2 {
            l[1] == Letter::V
        } else {
            use Letter::*;
            match (l[k - 3], l[k - 2], l[k - 1]) {
                (H, H, H) => false,
                (H, H, V) => true,
                (H, V, H) => false,
                (V, H, H) => true,
                (V, H, V) => false,
                _ => return Err(Error::Parse(format!("{w} is not an eastward word"))),
            }
        };
        let prev = *turns.last().unwrap();
        let t = if same { prev } else { prev.opposite() };
        let n = walk.len();
        let next = turn_at(ball, map, walk[n - 2], walk[n - 1], t)?;
        walk.push(next);
        turns.push(t);
    }
    Ok(TurnSequence { walk, turns })
}

fn check_case_a(tv: TypeVector) -> Result<()> {
    let ok = tv.family() != Family::Inadmissible
        && tv.geometry() != Geometry::Sphere
        && (tv.min_size() >= 6 || matches!(tv.odd_pair(), Some((5, x)) if x >= 10));
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{tv} is outside the alternating-turn case")))
    }
}

/// Turn-guided walks: the first turn is to the right, and each later turn
/// repeats or reverses its predecessor according to the last three letters.
pub fn case_a_injection(
    ball: &GraphBall,
    map: &RotationMap,
    tv: TypeVector,
    n: usize,
) -> Result<Vec<(HVWord, TurnSequence)>> {
    check_case_a(tv)?;
    eastward_words(n)?.into_par_iter().map(|w| case_a_walk(ball, map, &w).map(|t| (w, t))).collect()
}

/// How the walk picks a direction on entering a small face from outside.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Memory {
    /// Follow the last right/left turn of the contracted walk.
    LastTurn,
    /// Steer by the sign of the contracted walk's turn excess.
    Balance,
}

/// Walk that circles small faces, with its contracted turns. `None` in
/// `contracted` is a straight move through a small face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractedWalk {
    pub path: Vec<VertexId>,
    pub contracted: Vec<Option<Turn>>,
}

/// Position within the current small face, for the contracted turns.
struct Tracker {
    small: usize,
    entry: Option<Turn>,
    run: usize,
}

impl Tracker {
    fn push(&mut self, prev_small: bool, now_small: bool, t: Option<Turn>, out: &mut Vec<Option<Turn>>) {
        match (prev_small, now_small) {
            (false, true) => {
                self.entry = t;
                self.run = 1;
            }
            (true, true) => self.run += 1,
            (true, false) => {
                if let Some(t) = self.entry.take() {
                    let s = self.small;
                    // corners advanced counterclockwise around the face
                    let steps = if t == Turn::Right { self.run % s } else { (s - self.run % s) % s };
                    out.push(if steps == 1 {
                        Some(Turn::Right)
                    } else if steps == s - 1 {
                        Some(Turn::Left)
                    } else {
                        None
                    });
                }
                self.run = 0;
            }
            (false, false) => {}
        }
    }
}

struct SmallFaceWalker<'a> {
    ball: &'a GraphBall,
    map: &'a RotationMap,
    small: u32,
    memory: Memory,
}

impl SmallFaceWalker<'_> {
    fn is_small(&self, a: VertexId, b: VertexId) -> Result<bool> {
        let (l, r) = self.map.edge_faces(a, b).ok_or_else(|| region(format!("edge {a}-{b} outside the map")))?;
        Ok(l == self.small || r == self.small)
    }

    /// `path[off..=off+1]` is the edge for the first letter.
    fn walk(&self, w: &HVWord, mut path: Vec<VertexId>) -> Result<ContractedWalk> {
        use Letter::*;
        let l = w.letters();
        let off = path.len() - 2;
        let mut contracted = Vec::new();
        let mut tr = Tracker { small: self.small as usize, entry: None, run: 0 };
        if off == 1 {
            let t = self.map.turn(path[0], path[1], path[2]);
            tr.push(self.is_small(path[0], path[1])?, self.is_small(path[1], path[2])?, t, &mut contracted);
        } else if self.is_small(path[0], path[1])? {
            tr.run = 1;
        }
        for k in 2..=l.len() {
            let (a, b) = (path[k - 2 + off], path[k - 1 + off]);
            let prev_small = self.is_small(a, b)?;
            let right = turn_at(self.ball, self.map, a, b, Turn::Right)?;
            let left = turn_at(self.ball, self.map, a, b, Turn::Left)?;
            let pick_small = |want: bool| -> Result<VertexId> {
                match (self.is_small(b, right)? == want, self.is_small(b, left)? == want) {
                    (true, false) => Ok(right),
                    (false, true) => Ok(left),
                    _ => Err(inconsistent(format!("ambiguous continuation at {b}"))),
                }
            };
            let steer = |entering_on_v: bool| -> Turn {
                match self.memory {
                    Memory::LastTurn => {
                        let last = contracted.iter().rev().flatten().next().copied();
                        match (entering_on_v, last) {
                            (true, Some(t)) => t,
                            (true, None) => Turn::Left,
                            (false, Some(t)) => t.opposite(),
                            (false, None) => Turn::Right,
                        }
                    }
                    Memory::Balance => {
                        let rho: i64 = contracted.iter().flatten().map(|t| t.sign()).sum();
                        match (entering_on_v, rho < 0) {
                            (true, true) => Turn::Left,
                            (true, false) => Turn::Right,
                            (false, true) => Turn::Right,
                            (false, false) => Turn::Left,
                        }
                    }
                }
            };
            let next = match (l[k - 2], l[k - 1]) {
                (H, V) if prev_small => pick_small(true)?,
                (H, V) => self.map.step(a, b, steer(true)).unwrap(),
                (H, H) if prev_small => pick_small(false)?,
                (H, H) => self.map.step(a, b, steer(false)).unwrap(),
                (V, H) => {
                    if !prev_small {
                        return Err(inconsistent(format!("{w}: vertical letter on a large-face edge")));
                    }
                    let before = self.is_small(path[k - 3 + off], a)?;
                    pick_small(!before)?
                }
                (V, V) => return Err(Error::Parse(format!("{w} is not an eastward word"))),
            };
            let now_small = self.is_small(b, next)?;
            let t = self.map.turn(a, b, next);
            tr.push(prev_small, now_small, t, &mut contracted);
            path.push(next);
        }
        Ok(ContractedWalk { path, contracted })
    }
}

fn sorted_sizes(tv: TypeVector) -> [u32; 3] {
    tv.sorted()
}

/// Square-circling walks on `<4,2n,2p>`, `p >= n >= 4`, `1/n + 1/p < 1/2`.
/// The first edge goes from the root to its smallest neighbour.
pub fn case_b_injection(
    ball: &GraphBall,
    map: &RotationMap,
    tv: TypeVector,
    n: usize,
) -> Result<Vec<(HVWord, ContractedWalk)>> {
    let [a, b, c] = sorted_sizes(tv);
    let (hn, hp) = (b / 2, c / 2);
    let ok = a == 4 && b % 2 == 0 && c % 2 == 0 && c != INF && hn >= 4 && hp >= hn && hn * hp > 2 * (hn + hp);
    if !ok {
        return Err(Error::Precondition(format!("{tv} is not <4,2n,2p> with p >= n >= 4 and 1/n + 1/p < 1/2")));
    }
    let root = ball.root();
    let first = *ball.neighbors(root).first().ok_or_else(|| region("isolated root".into()))?;
    let walker = SmallFaceWalker { ball, map, small: 4, memory: Memory::LastTurn };
    eastward_words(n)?
        .into_par_iter()
        .map(|w| walker.walk(&w, vec![root, first]).map(|p| (w, p)))
        .collect()
}

/// Walk between edge midpoints, as midpoint ids of [`crate::saw::subdivide_edges`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MidpointWalk {
    pub midpoints: Vec<VertexId>,
    pub small: Vec<bool>,
    pub contracted: Vec<Option<Turn>>,
}

impl MidpointWalk {
    pub fn longest_small_run(&self) -> usize {
        self.small
            .split(|&s| !s)
            .map(<[bool]>::len)
            .max()
            .unwrap_or(0)
    }
}

/// Pentagon-circling midpoint walks on `<5,8,8>`. The walk starts at the
/// midpoint of the root's non-pentagonal edge and first moves through the
/// root with a left turn.
pub fn case_d_injection(
    ball: &GraphBall,
    map: &RotationMap,
    tv: TypeVector,
    n: usize,
) -> Result<Vec<(HVWord, MidpointWalk)>> {
    if sorted_sizes(tv) != [5, 8, 8] {
        return Err(Error::Precondition(format!("{tv} is not <5,8,8>")));
    }
    let mid: HashMap<(VertexId, VertexId), VertexId> =
        ball.edges().enumerate().map(|(e, (u, v))| ((u, v), ball.len() + e)).collect();
    let mid_of = |u: VertexId, v: VertexId| mid.get(&(u.min(v), u.max(v))).copied();
    let walker = SmallFaceWalker { ball, map, small: 5, memory: Memory::Balance };
    let root = ball.root();
    let other = *ball
        .neighbors(root)
        .iter()
        .find(|&&w| !walker.is_small(root, w).unwrap_or(true))
        .ok_or_else(|| region("root has no non-pentagonal edge".into()))?;
    // the opening step turns left, as the steering rule would with zero excess
    let first = turn_at(ball, map, other, root, Turn::Left)?;
    let start = [other, root, first];
    eastward_words(n)?
        .into_par_iter()
        .map(|w| {
            let cw = walker.walk(&w, start.to_vec())?;
            let mut midpoints = Vec::with_capacity(cw.path.len() - 1);
            let mut small = Vec::with_capacity(cw.path.len() - 1);
            for e in cw.path.windows(2) {
                midpoints.push(mid_of(e[0], e[1]).ok_or_else(|| region("midpoint outside ball".into()))?);
                small.push(walker.is_small(e[0], e[1])?);
            }
            Ok((w, MidpointWalk { midpoints, small, contracted: cw.contracted }))
        })
        .collect()
}

/// Hexagons of a `<4,6,2p>` map and the squares joining them.
#[derive(Clone, Debug)]
pub struct HexagonGraph {
    /// Corners in counterclockwise order.
    pub corners: Vec<[VertexId; 6]>,
    /// Across side `i` (corner `i` to `i+1`), the hexagon beyond a square.
    pub across: Vec<[Option<usize>; 6]>,
    pub hex_of: HashMap<VertexId, usize>,
    pub root_hex: usize,
    /// Graph on hexagons; complete where all three squares lead to known
    /// hexagons.
    pub graph: GraphBall,
}

fn rung(map: &RotationMap, hex: &[VertexId; 6], i: usize) -> Option<VertexId> {
    let c = hex[i];
    map.rotation(c).into_iter().flatten().find(|w| !hex.contains(w))
}

pub fn hexagon_graph(ball: &GraphBall, map: &RotationMap) -> Result<HexagonGraph> {
    let mut corners: Vec<[VertexId; 6]> = Vec::new();
    let mut hex_of = HashMap::new();
    for v in 0..ball.len() {
        if hex_of.contains_key(&v) || !ball.is_complete(v) {
            continue;
        }
        let Some(s) = map.corners(v).iter().position(|&k| k == 6) else { continue };
        let Some(darts) = map.trace_face(3 * v + s) else { continue };
        if darts.len() != 6 {
            continue;
        }
        let mut h = [0; 6];
        for (i, d) in darts.iter().enumerate() {
            h[i] = map.tail(*d);
        }
        for &c in &h {
            hex_of.insert(c, corners.len());
        }
        corners.push(h);
    }
    let mut across = vec![[None; 6]; corners.len()];
    for (x, h) in corners.iter().enumerate() {
        for i in 0..6 {
            let Some((_, right)) = map.edge_faces(h[i], h[(i + 1) % 6]) else { continue };
            if right != 4 {
                continue;
            }
            let (Some(a), Some(b)) = (rung(map, h, i), rung(map, h, (i + 1) % 6)) else { continue };
            if let (Some(&ha), Some(&hb)) = (hex_of.get(&a), hex_of.get(&b)) {
                if ha == hb {
                    across[x][i] = Some(ha);
                }
            }
        }
    }
    let root_hex = *hex_of.get(&ball.root()).ok_or_else(|| region("root hexagon not closed".into()))?;
    let adj: Vec<Vec<usize>> = across.iter().map(|a| a.iter().flatten().copied().collect()).collect();
    let complete: Vec<bool> = adj.iter().map(|a| a.len() == 3).collect();
    let graph = GraphBall::new(root_hex, adj, complete, Some(3))?;
    Ok(HexagonGraph { corners, across, hex_of, root_hex, graph })
}

/// Self-avoiding walks of `n` steps on the hexagon graph from the root
/// hexagon whose first step avoids the square side at the root vertex.
pub fn hexagon_saws(ball: &GraphBall, hg: &HexagonGraph, n: usize) -> Result<Vec<Vec<usize>>> {
    let h = &hg.corners[hg.root_hex];
    let pos = h.iter().position(|&c| c == ball.root()).unwrap();
    let banned: Vec<usize> = [pos, (pos + 5) % 6].iter().filter_map(|&i| hg.across[hg.root_hex][i]).collect();
    let mut out = Vec::new();
    let mut cur = vec![hg.root_hex];
    fn rec(g: &GraphBall, banned: &[usize], n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> Result<()> {
        if cur.len() == n + 1 {
            out.push(cur.clone());
            return Ok(());
        }
        let u = *cur.last().unwrap();
        if !g.is_complete(u) {
            return Err(region(format!("hexagon {u} lies on the edge of the region")));
        }
        for &w in g.neighbors(u) {
            if cur.contains(&w) || (cur.len() == 1 && banned.contains(&w)) {
                continue;
            }
            cur.push(w);
            rec(g, banned, n, cur, out)?;
            cur.pop();
        }
        Ok(())
    }
    rec(&hg.graph, &banned, n, &mut cur, &mut out)?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseCReport {
    pub hexagon_walks: usize,
    pub lifts: usize,
    pub non_saw: usize,
    /// Only filled when distinctness was requested.
    pub distinct: Option<bool>,
    pub bad_length_sets: usize,
}

impl CaseCReport {
    pub fn passed(&self) -> bool {
        self.non_saw == 0 && self.bad_length_sets == 0 && self.distinct != Some(false)
    }
}

/// The four ways to move from corner `v` of hexagon `x` into hexagon `y`:
/// go either way round to the nearer corner of the shared square side,
/// optionally cross that side, then take the rung.
fn hex_step_options(map: &RotationMap, hg: &HexagonGraph, x: usize, v: VertexId, y: usize) -> Result<Vec<Vec<VertexId>>> {
    let h = &hg.corners[x];
    let side = (0..6).find(|&i| hg.across[x][i] == Some(y)).ok_or_else(|| inconsistent("hexagons not adjacent"))?;
    let pos = h.iter().position(|&c| c == v).ok_or_else(|| inconsistent("corner not on hexagon"))?;
    let ends = [side, (side + 1) % 6];
    let mut out = Vec::with_capacity(4);
    for dir in [1usize, 5] {
        let mut path = Vec::new();
        let mut i = pos;
        while !ends.contains(&i) {
            i = (i + dir) % 6;
            path.push(h[i]);
        }
        let near = i;
        let far = if near == ends[0] { ends[1] } else { ends[0] };
        for cross in [false, true] {
            let mut p = path.clone();
            let at = if cross {
                p.push(h[far]);
                far
            } else {
                near
            };
            p.push(rung(map, h, at).ok_or_else(|| region("rung outside map".into()))?);
            out.push(p);
        }
    }
    Ok(out)
}

/// Lifts every hexagon walk through all `4^n` choices of per-step paths,
/// checking self-avoidance and the per-step length sets.
pub fn case_c_family(
    ball: &GraphBall,
    map: &RotationMap,
    hg: &HexagonGraph,
    walks: &[Vec<usize>],
    check_distinct: bool,
) -> Result<CaseCReport> {
    let per_walk: Vec<(usize, usize, usize, Vec<Vec<VertexId>>)> = walks
        .par_iter()
        .map(|hw| -> Result<_> {
            let mut lifts = 0;
            let mut non_saw = 0;
            let mut bad = 0;
            let mut all = Vec::new();
            let mut visited = vec![false; ball.len()];
            visited[ball.root()] = true;
            let mut path = vec![ball.root()];
            #[allow(clippy::too_many_arguments)]
            fn rec(
                map: &RotationMap,
                hg: &HexagonGraph,
                hw: &[usize],
                k: usize,
                visited: &mut Vec<bool>,
                path: &mut Vec<VertexId>,
                keep: bool,
                acc: &mut (usize, usize, usize, Vec<Vec<VertexId>>),
            ) -> Result<()> {
                if k + 1 == hw.len() {
                    acc.0 += 1;
                    if keep {
                        acc.3.push(path.clone());
                    }
                    return Ok(());
                }
                let v = *path.last().unwrap();
                let opts = hex_step_options(map, hg, hw[k], v, hw[k + 1])?;
                let mut lens: Vec<usize> = opts.iter().map(Vec::len).collect();
                lens.sort_unstable();
                if lens != [2, 3, 5, 6] && lens != [3, 4, 4, 5] {
                    acc.2 += 1;
                }
                for o in opts {
                    if o.iter().any(|&x| visited[x]) {
                        acc.1 += 1;
                        continue;
                    }
                    for &x in &o {
                        visited[x] = true;
                    }
                    let l = path.len();
                    path.extend_from_slice(&o);
                    rec(map, hg, hw, k + 1, visited, path, keep, acc)?;
                    path.truncate(l);
                    for &x in &o {
                        visited[x] = false;
                    }
                }
                Ok(())
            }
            let mut acc = (0, 0, 0, Vec::new());
            rec(map, hg, hw, 0, &mut visited, &mut path, check_distinct, &mut acc)?;
            lifts += acc.0;
            non_saw += acc.1;
            bad += acc.2;
            all.extend(acc.3);
            Ok((lifts, non_saw, bad, all))
        })
        .collect::<Result<_>>()?;
    let mut rep =
        CaseCReport { hexagon_walks: walks.len(), lifts: 0, non_saw: 0, distinct: None, bad_length_sets: 0 };
    let mut seen = HashSet::new();
    let mut distinct = true;
    for (l, ns, bad, all) in per_walk {
        rep.lifts += l;
        rep.non_saw += ns;
        rep.bad_length_sets += bad;
        for p in all {
            distinct &= seen.insert(p);
        }
    }
    if check_distinct {
        rep.distinct = Some(distinct);
    }
    Ok(rep)
}

/// `1/z` where `z^3 (1+z)^2 = 1/mu_p`.
pub fn case_c_bound(mu_p: f64) -> Result<RootResult> {
    solve(&GrowthEquation::CaseC { mu_p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::rooted_isomorphic;
    use crate::height::verify_injection;
    use crate::lattices::build_periodic;
    use crate::saw::eta;

    fn tv(s: &str) -> TypeVector {
        s.parse().unwrap()
    }

    #[test]
    fn curvature_and_classes() {
        assert_eq!(tv("6,6,6").curvature_f(), Rational64::from_integer(2));
        assert_eq!(tv("7,7,7").curvature_f(), Rational64::new(15, 7));
        assert_eq!(tv("4,4,inf").curvature_f(), Rational64::from_integer(2));
        assert_eq!(tv("5,8,8").classify(), (Geometry::Hyperbolic, Family::B));
        assert_eq!(tv("4,6,12").classify(), (Geometry::Euclidean, Family::C));
        assert_eq!(tv("3,7,7").family(), Family::Inadmissible);
        assert_eq!(tv("5,5,5").geometry(), Geometry::Sphere);
        assert!("4,5".parse::<TypeVector>().is_err());
    }

    fn map_invariants(ball: &GraphBall, map: &RotationMap) {
        for d in map.darts() {
            if let Some(o) = map.opposite(d) {
                assert_eq!(map.opposite(o), Some(d));
                assert_ne!(o, d);
            }
        }
        for v in 0..ball.len() {
            if ball.is_complete(v) {
                let d0 = 3 * v;
                let mut d = d0;
                for _ in 0..3 {
                    d = map.next_at_vertex(d).unwrap();
                }
                assert_eq!(d, d0);
            }
        }
    }

    #[test]
    fn generated_euclidean_tilings_match_coordinates() {
        for (t, name) in [("6,6,6", "hexagonal"), ("4,8,8", "arch_4_8_8"), ("4,6,12", "arch_4_6_12")] {
            let (g, map) = generate_tiling(tv(t), 6).unwrap();
            map_invariants(&g, &map);
            let pb = build_periodic(name, 6).unwrap();
            assert!(rooted_isomorphic(&g, &pb.ball), "{t}");
        }
    }

    #[test]
    fn vertex_types_hold_on_hyperbolic_balls() {
        for t in ["7,7,7", "4,8,10", "5,8,8", "5,10,10"] {
            let t = tv(t);
            let (g, map) = generate_tiling(t, 5).unwrap();
            map_invariants(&g, &map);
            let mut want = t.sizes();
            want.sort_unstable();
            for v in (0..g.len()).filter(|&v| g.is_complete(v)) {
                let mut c = map.corners(v);
                c.sort_unstable();
                assert_eq!(c, want);
                for s in 0..3 {
                    if let Some(f) = map.trace_face(3 * v + s) {
                        assert_eq!(f.len() as u32, map.face_size(3 * v + s));
                    }
                }
            }
        }
    }

    #[test]
    fn determinism() {
        let a = generate_tiling(tv("4,8,10"), 4).unwrap();
        let b = generate_tiling(tv("4,8,10"), 4).unwrap();
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn single_face_rho() {
        let (g, map) = generate_tiling(tv("6,6,6"), 4).unwrap();
        let d = 3 * g.root();
        let f = map.trace_face(d).unwrap();
        let cyc = CycleWalk { vertices: f.iter().map(|&e| map.tail(e)).collect() };
        assert_eq!(rho(&map, &cyc).unwrap(), 6);
        // traced with the face on the left, so the walk itself is counterclockwise
        assert_eq!(turn_excess(&map, &cyc.vertices).unwrap(), -6);
    }

    #[test]
    fn case_a_small() {
        let t = tv("7,7,7");
        let (g, map) = generate_tiling(t, 9).unwrap();
        let walks = case_a_injection(&g, &map, t, 8).unwrap();
        assert_eq!(walks.len() as u64, eta(8).to_u64_digits()[0]);
        let hh = walks.iter().find(|(w, _)| w.to_string() == "HHHHHHHH").unwrap();
        assert!(hh.1.turns.windows(2).all(|p| p[0] != p[1]));
        let rep = verify_injection(&walks.iter().map(|(w, s)| (w.clone(), s.path().to_vec())).collect::<Vec<_>>());
        assert!(rep.passed());
        assert!(case_a_injection(&g, &map, tv("4,8,10"), 3).is_err());
    }

    #[test]
    fn two_face_boundaries() {
        // length 2k - 2 cycles around two adjacent k-gons
        for (t, len, want) in [("6,6,6", 10, 6), ("7,7,7", 12, 8)] {
            let t = tv(t);
            let (g, map) = generate_tiling(t, 7).unwrap();
            let cycles = g.enumerate_cycles_up_to(len, 1_000_000).unwrap();
            let pairs: Vec<_> = cycles.iter().filter(|c| c.len() == len).collect();
            assert!(!pairs.is_empty());
            for c in pairs {
                let (cw, faces) = clockwise(&map, c).unwrap();
                assert_eq!(faces.len(), 2);
                assert_eq!(turn_excess(&map, &cw.vertices).unwrap(), want);
            }
        }
    }

    #[test]
    fn square_and_pentagon_walks() {
        let t = tv("4,8,10");
        let (g, map) = generate_tiling(t, 9).unwrap();
        let walks = case_b_injection(&g, &map, t, 8).unwrap();
        let rep = verify_injection(&walks.iter().map(|(w, c)| (w.clone(), c.path.clone())).collect::<Vec<_>>());
        assert!(rep.passed() && rep.count == 34);
        assert!(walks.iter().all(|(_, c)| max_window_balance(&c.contracted) <= 1));
        // HH from a square edge leaves the square
        let hh = &walks.iter().find(|(w, _)| w.to_string() == "HHHHHHHH").unwrap().1;
        let sq = |a: usize, b: usize| map.edge_faces(a, b).map(|(l, r)| l == 4 || r == 4).unwrap();
        for i in 1..hh.path.len() - 1 {
            if sq(hh.path[i - 1], hh.path[i]) {
                assert!(!sq(hh.path[i], hh.path[i + 1]));
            }
        }
        let t = tv("5,8,8");
        let (g, map) = generate_tiling(t, 10).unwrap();
        let walks = case_d_injection(&g, &map, t, 8).unwrap();
        let sub = crate::saw::subdivide_edges(&g).unwrap();
        for (w, mw) in &walks {
            assert!(mw.longest_small_run() <= 3);
            assert!(max_window_balance(&mw.contracted) <= 1);
            for (i, l) in w.letters().iter().enumerate() {
                if *l == Letter::V {
                    assert!(mw.small[i + 1]);
                }
            }
            for p in mw.midpoints.windows(2) {
                let shared = sub.neighbors(p[0]).iter().any(|x| sub.neighbors(p[1]).contains(x));
                assert!(shared);
            }
        }
        assert!(case_d_injection(&g, &map, tv("4,8,10"), 3).is_err());
    }

    #[test]
    fn hexagon_lifts() {
        let t = tv("4,6,12");
        let (g, map) = generate_tiling(t, 16).unwrap();
        let hg = hexagon_graph(&g, &map).unwrap();
        let one = hexagon_saws(&g, &hg, 1).unwrap();
        assert_eq!(one.len(), 2);
        let rep = case_c_family(&g, &map, &hg, &one, true).unwrap();
        assert_eq!(rep.lifts, 8);
        assert!(rep.passed());
        let phi = case_c_bound(crate::PHI).unwrap();
        assert!((phi.value - crate::PHI).abs() < 1e-12);
    }

    #[test]
    fn window_balance() {
        use Turn::*;
        assert_eq!(max_window_balance(&[Some(Right), Some(Left), Some(Right)]), 1);
        assert_eq!(max_window_balance(&[Some(Right), None, Some(Right)]), 2);
    }
}
