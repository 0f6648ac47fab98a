//! The Grigorchuk group acting on the binary tree.
//!
//! `a` swaps the first letter; `b = (a, c)`, `c = (a, d)`, `d = (id, b)`.
//! Words act on the left: `(x y)(s) = x(y(s))`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::graph::{GraphBall, VertexId};

/// Reduced word over `{a, b, c, d}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GrigorchukWord(Vec<u8>);

fn klein(x: u8, y: u8) -> Option<u8> {
    // None for x == y, else the third of b, c, d
    if x == y {
        None
    } else {
        Some(b'b' ^ b'c' ^ b'd' ^ x ^ y)
    }
}

/// Free reduction plus the Klein table `bc = d`, `cd = b`, `bd = c`.
pub fn reduce(letters: &[u8]) -> Vec<u8> {
    let mut st: Vec<u8> = Vec::with_capacity(letters.len());
    for &x in letters {
        match (st.last().copied(), x) {
            (Some(b'a'), b'a') => {
                st.pop();
            }
            (Some(t), x) if t != b'a' && x != b'a' => {
                st.pop();
                if let Some(z) = klein(t, x) {
                    st.push(z);
                }
            }
            _ => st.push(x),
        }
    }
    st
}

impl GrigorchukWord {
    pub fn parse(s: &str) -> Result<Self> {
        let letters: Vec<u8> = s.bytes().filter(|c| !c.is_ascii_whitespace()).collect();
        if let Some(&c) = letters.iter().find(|c| !matches!(c, b'a'..=b'd')) {
            return Err(Error::Parse(format!("bad generator {:?}", c as char)));
        }
        Ok(GrigorchukWord(reduce(&letters)))
    }

    /// Keeps the letters exactly as given, so relations can be checked
    /// without the reduction table.
    pub fn unreduced(letters: &[u8]) -> Result<Self> {
        if let Some(&c) = letters.iter().find(|c| !matches!(c, b'a'..=b'd')) {
            return Err(Error::Parse(format!("bad generator {:?}", c as char)));
        }
        Ok(GrigorchukWord(letters.to_vec()))
    }

    pub fn from_letters(letters: &[u8]) -> Self {
        GrigorchukWord(reduce(letters))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Generators are involutions, so the inverse is the reversal.
    pub fn inverse(&self) -> Self {
        let mut v = self.0.clone();
        v.reverse();
        GrigorchukWord(v)
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        GrigorchukWord(reduce(&v))
    }
}

impl fmt::Display for GrigorchukWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("id");
        }
        f.write_str(std::str::from_utf8(&self.0).unwrap())
    }
}

/// One generator on a bit string; returns the image and the state that
/// would act on the rest of an infinite tail (`None` = identity).
fn act_gen(x: u8, s: &mut [u8]) -> Option<u8> {
    let mut state = Some(x);
    for bit in s.iter_mut() {
        state = match state {
            None => return None,
            Some(b'a') => {
                *bit ^= 1;
                None
            }
            Some(b'b') => Some(if *bit == 0 { b'a' } else { b'c' }),
            Some(b'c') => Some(if *bit == 0 { b'a' } else { b'd' }),
            Some(b'd') => {
                if *bit == 0 {
                    None
                } else {
                    Some(b'b')
                }
            }
            _ => unreachable!(),
        };
    }
    state
}

/// Image of a finite bit string under a word.
pub fn act(word: &GrigorchukWord, s: &[u8]) -> Vec<u8> {
    let mut out = s.to_vec();
    for &x in word.0.iter().rev() {
        act_gen(x, &mut out);
    }
    out
}

fn sections(x: u8) -> (Option<u8>, Option<u8>) {
    match x {
        b'b' => (Some(b'a'), Some(b'c')),
        b'c' => (Some(b'a'), Some(b'd')),
        b'd' => (None, Some(b'b')),
        _ => unreachable!(),
    }
}

/// Memoised word problem solver, shareable across threads.
#[derive(Default)]
pub struct WordProblem {
    memo: RwLock<HashMap<Vec<u8>, bool>>,
}

impl WordProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_identity(&self, w: &GrigorchukWord) -> bool {
        self.rec(&w.0, 0)
    }

    fn rec(&self, w: &[u8], depth: usize) -> bool {
        if w.is_empty() {
            return true;
        }
        assert!(depth < 200, "word problem recursion runaway");
        if let Some(&r) = self.memo.read().unwrap().get(w) {
            return r;
        }
        let r = if w.iter().filter(|&&x| x == b'a').count() % 2 == 1 {
            false
        } else {
            let (mut g0, mut g1) = (Vec::new(), Vec::new());
            let mut odd = false;
            for &x in w {
                if x == b'a' {
                    odd = !odd;
                    continue;
                }
                let (mut s0, mut s1) = sections(x);
                if odd {
                    std::mem::swap(&mut s0, &mut s1);
                }
                g0.extend(s0);
                g1.extend(s1);
            }
            self.rec(&reduce(&g0), depth + 1) && self.rec(&reduce(&g1), depth + 1)
        };
        self.memo.write().unwrap().insert(w.to_vec(), r);
        r
    }
}

/// Convenience wrapper with a fresh memo table.
pub fn is_identity(w: &GrigorchukWord) -> bool {
    WordProblem::new().is_identity(w)
}

const FP_LEVEL: u32 = 10;

/// Permutation of the level-`FP_LEVEL` vertices induced by a generator.
fn gen_perm(x: u8) -> Vec<u16> {
    let n = 1usize << FP_LEVEL;
    (0..n)
        .map(|i| {
            let mut s: Vec<u8> = (0..FP_LEVEL).map(|k| ((i >> k) & 1) as u8).collect();
            act_gen(x, &mut s);
            s.iter().enumerate().map(|(k, &b)| (b as u16) << k).sum()
        })
        .collect()
}

/// Ball of the Cayley graph over `{a, b, c}` with shortlex-least
/// representative words.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    pub ball: GraphBall,
    pub words: Vec<GrigorchukWord>,
    /// `step[v][x]` for `x` in `a, b, c`.
    step: Vec<[Option<VertexId>; 3]>,
}

impl CayleyBall {
    /// Follows the generator `x` from `v`, if the edge lies in the ball.
    pub fn follow(&self, v: VertexId, x: u8) -> Option<VertexId> {
        let k = match x {
            b'a' => 0,
            b'b' => 1,
            b'c' => 2,
            _ => return None,
        };
        self.step[v][k]
    }
}

/// Vertices are group elements, identified by a tree-action fingerprint and
/// then confirmed equal with the word problem.
pub fn cayley_ball(radius: usize) -> Result<CayleyBall> {
    if radius < 1 {
        return Err(Error::Range("radius must be at least 1".into()));
    }
    let cap = crate::max_vertices();
    let wp = WordProblem::new();
    let gens = *b"abc";
    let perms: Vec<Vec<u16>> = gens.iter().map(|&x| gen_perm(x)).collect();
    let id: Vec<u16> = (0..1u16 << FP_LEVEL).collect();
    let mut words = vec![GrigorchukWord(Vec::new())];
    let mut fps = vec![id];
    let mut dist = vec![0usize];
    let mut buckets: HashMap<Vec<u16>, Vec<usize>> = HashMap::new();
    buckets.insert(fps[0].clone(), vec![0]);
    let mut step: Vec<[Option<VertexId>; 3]> = vec![[None; 3]];
    let mut head = 0;
    while head < words.len() {
        for (k, &x) in gens.iter().enumerate() {
            let fp: Vec<u16> = perms[k].iter().map(|&s| fps[head][s as usize]).collect();
            let cand = words[head].concat(&GrigorchukWord(vec![x]));
            let found = buckets.get(&fp).and_then(|b| {
                b.iter().copied().find(|&j| wp.is_identity(&words[j].inverse().concat(&cand)))
            });
            let target = match found {
                Some(j) => Some(j),
                None if dist[head] < radius => {
                    if words.len() >= cap {
                        return Err(Error::ResourceCap { what: "Cayley ball vertices".into(), limit: cap });
                    }
                    let j = words.len();
                    words.push(cand);
                    buckets.entry(fp.clone()).or_default().push(j);
                    fps.push(fp);
                    dist.push(dist[head] + 1);
                    step.push([None; 3]);
                    Some(j)
                }
                None => None,
            };
            step[head][k] = target;
        }
        head += 1;
    }
    let n = words.len();
    let mut adj = vec![Vec::new(); n];
    let mut complete = vec![true; n];
    let mut labels = BTreeMap::new();
    for v in 0..n {
        for (k, &x) in gens.iter().enumerate() {
            match step[v][k] {
                Some(w) => {
                    adj[v].push(w);
                    labels.insert((v, w), (x as char).to_string());
                }
                None => complete[v] = false,
            }
        }
    }
    let ball = GraphBall::new(0, adj, complete, Some(3))?.with_labels(labels)?;
    Ok(CayleyBall { ball, words, step })
}

/// A point `prefix · 1^∞` of the orbit of the rightmost ray.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SchreierVertex {
    prefix: Vec<u8>,
}

impl SchreierVertex {
    pub fn root() -> Self {
        SchreierVertex { prefix: Vec::new() }
    }

    /// Trailing ones are absorbed into the tail.
    pub fn new(bits: &[u8]) -> Self {
        let mut prefix = bits.to_vec();
        while prefix.last() == Some(&1) {
            prefix.pop();
        }
        SchreierVertex { prefix }
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    /// Image under a generator. A residual `a` after the prefix flips the
    /// first tail bit.
    pub fn apply(&self, x: u8) -> Self {
        let mut s = self.prefix.clone();
        if act_gen(x, &mut s) == Some(b'a') {
            s.push(0);
        }
        SchreierVertex::new(&s)
    }
}

impl fmt::Display for SchreierVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.prefix {
            write!(f, "{b}")?;
        }
        f.write_str("1^inf")
    }
}

/// Radius ball of the orbital Schreier graph of `1^∞`, loops kept.
#[derive(Clone, Debug)]
pub struct SchreierBall {
    pub vertices: Vec<SchreierVertex>,
    /// `(u, v, generator)`, one entry per unordered edge or loop.
    pub edges: Vec<(VertexId, VertexId, char)>,
    pub dist: Vec<usize>,
}

impl SchreierBall {
    pub fn loops_at(&self, v: VertexId) -> Vec<char> {
        self.edges.iter().filter(|e| e.0 == v && e.1 == v).map(|e| e.2).collect()
    }

    /// Simple graph obtained by dropping loops and merging parallel edges.
    /// Vertices at the outer radius are incomplete.
    pub fn to_graph_ball(&self, radius: usize) -> Result<GraphBall> {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        let mut labels = BTreeMap::new();
        for &(u, v, x) in &self.edges {
            if u != v && !adj[u].contains(&v) {
                adj[u].push(v);
                adj[v].push(u);
                labels.insert((u, v), x.to_string());
                labels.insert((v, u), x.to_string());
            }
        }
        let complete = self.dist.iter().map(|&d| d < radius).collect();
        GraphBall::new(0, adj, complete, None)?.with_labels(labels)
    }
}

pub fn schreier_ball(radius: usize) -> Result<SchreierBall> {
    if radius < 1 {
        return Err(Error::Range("radius must be at least 1".into()));
    }
    let mut vertices = vec![SchreierVertex::root()];
    let mut index: HashMap<SchreierVertex, usize> = HashMap::new();
    index.insert(SchreierVertex::root(), 0);
    let mut dist = vec![0];
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    let mut head = 0;
    while head < vertices.len() {
        for x in *b"abc" {
            let w = vertices[head].apply(x);
            let j = match index.get(&w) {
                Some(&j) => j,
                None if dist[head] < radius => {
                    let j = vertices.len();
                    index.insert(w.clone(), j);
                    vertices.push(w);
                    dist.push(dist[head] + 1);
                    j
                }
                None => continue,
            };
            let key = (head.min(j), head.max(j), x);
            if seen.insert(key) {
                edges.push((head, j, x as char));
            }
        }
        head += 1;
    }
    Ok(SchreierBall { vertices, edges, dist })
}

/// Substitution rule for the section starting at an `a`-edge endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionCase {
    /// `b` and `c` both lead rightwards.
    APrime,
    /// `b` rightward, `c` a loop.
    B,
    /// `c` rightward, `b` a loop.
    C,
}

impl SectionCase {
    pub fn words(self) -> &'static [&'static str] {
        match self {
            SectionCase::APrime => &["ba", "ca", "bcba", "cbca"],
            SectionCase::B => &["ba", "cba", "bca", "cbca"],
            SectionCase::C => &["ca", "bca", "cba", "bcba"],
        }
    }
}

/// Words of the first section, from the root to the first `a`-endpoint.
/// Both `b` and `c` are loops at the root.
pub const FIRST_SECTION: [&str; 2] = ["ba", "ca"];

pub fn classify_section(v: &SchreierVertex) -> Result<SectionCase> {
    if *v == SchreierVertex::root() {
        return Err(Error::Precondition("the root is not an a-edge endpoint".into()));
    }
    let (b, c) = (v.apply(b'b') == *v, v.apply(b'c') == *v);
    Ok(match (b, c) {
        (false, false) => SectionCase::APrime,
        (false, true) => SectionCase::B,
        (true, false) => SectionCase::C,
        (true, true) => return Err(Error::Precondition(format!("{v} has both b and c loops"))),
    })
}

/// The first `count` endpoints of `a`-edges along the ray, in order.
pub fn ray_a_endpoints(count: usize) -> Vec<SchreierVertex> {
    let mut out = Vec::with_capacity(count);
    let mut z = SchreierVertex::root().apply(b'a');
    for _ in 0..count {
        out.push(z.clone());
        let right = if z.apply(b'b') != z { b'b' } else { b'c' };
        z = z.apply(right).apply(b'a');
    }
    out
}

/// Every word of length exactly `n` obtained by concatenating the first
/// section with one substitution per later section.
pub fn generate_wa_prime(n: usize) -> Result<Vec<String>> {
    if n < 2 {
        return Err(Error::Range("n must be at least 2".into()));
    }
    let cases: Vec<SectionCase> =
        ray_a_endpoints(n / 2 + 1).iter().map(classify_section).collect::<Result<_>>()?;
    let mut out = Vec::new();
    fn rec(cur: &mut String, k: usize, n: usize, cases: &[SectionCase], out: &mut Vec<String>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for w in cases[k].words() {
            if cur.len() + w.len() <= n {
                let l = cur.len();
                cur.push_str(w);
                rec(cur, k + 1, n, cases, out);
                cur.truncate(l);
            }
        }
    }
    for first in FIRST_SECTION {
        let mut cur = first.to_string();
        rec(&mut cur, 0, n, &cases, &mut out);
    }
    Ok(out)
}

/// Distinct length-`n` initial segments of words in the set, i.e. the
/// length-`n` walks that some longer lift starts with.
pub fn wa_prime_prefixes(n: usize) -> Result<Vec<String>> {
    if n < 1 {
        return Err(Error::Range("n must be at least 1".into()));
    }
    let cases: Vec<SectionCase> =
        ray_a_endpoints(n / 2 + 1).iter().map(classify_section).collect::<Result<_>>()?;
    let mut out = std::collections::BTreeSet::new();
    fn rec(cur: &mut String, k: usize, n: usize, cases: &[SectionCase], out: &mut std::collections::BTreeSet<String>) {
        if cur.len() >= n {
            out.insert(cur[..n].to_string());
            return;
        }
        for w in cases[k].words() {
            let l = cur.len();
            cur.push_str(w);
            rec(cur, k + 1, n, cases, out);
            cur.truncate(l);
        }
    }
    for first in FIRST_SECTION {
        let mut cur = first.to_string();
        rec(&mut cur, 0, n, &cases, &mut out);
    }
    Ok(out.into_iter().collect())
}

/// Count of [`generate_wa_prime`] by polynomial multiplication of section
/// weights, without listing words.
pub fn count_wa_prime(n: usize) -> Result<u128> {
    let cases: Vec<SectionCase> =
        ray_a_endpoints(n / 2 + 1).iter().map(classify_section).collect::<Result<_>>()?;
    // ways[k][len]: words made of the first section plus k later sections
    let mut cur = vec![0u128; n + 1];
    cur[2] = FIRST_SECTION.len() as u128;
    let mut total = cur[n];
    for case in cases {
        let mut next = vec![0u128; n + 1];
        for (l, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for w in case.words() {
                if l + w.len() <= n {
                    next[l + w.len()] += c;
                }
            }
        }
        total += next[n];
        cur = next;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiftReport {
    pub words: usize,
    pub all_saw: bool,
    pub distinct: bool,
    pub failures: Vec<String>,
}

/// Lifts each word to a walk from the identity by following labelled edges
/// of the ball, then checks self-avoidance and distinctness.
pub fn lift_and_verify(words: &[String], cb: &CayleyBall) -> Result<LiftReport> {
    let mut failures = Vec::new();
    let mut walks = HashSet::new();
    let mut distinct = true;
    for w in words {
        let mut v = cb.ball.root();
        let mut walk = vec![v];
        for x in w.bytes() {
            v = cb.follow(v, x).ok_or_else(|| Error::Range(format!("word {w} leaves the Cayley ball")))?;
            walk.push(v);
        }
        let mut seen = HashSet::new();
        if !walk.iter().all(|x| seen.insert(*x)) {
            failures.push(format!("{w}: lift revisits a vertex"));
        }
        if !walks.insert(walk) {
            distinct = false;
            failures.push(format!("{w}: lift repeats another word's walk"));
        }
    }
    let all_saw = failures.iter().all(|f| !f.contains("revisits"));
    Ok(LiftReport { words: words.len(), all_saw, distinct, failures })
}

/// `Z1(1/phi)` and `Z2(1/phi)` for the section weights `2z^2 + 2z^4` and
/// `z^2 + 2z^3 + z^4`.
pub fn z_bound_check() -> (f64, f64) {
    let z = 1.0 / crate::PHI;
    (z1(z), z2(z))
}

pub fn z1(z: f64) -> f64 {
    2.0 * z * z + 2.0 * z.powi(4)
}

pub fn z2(z: f64) -> f64 {
    z * z + 2.0 * z.powi(3) + z.powi(4)
}
