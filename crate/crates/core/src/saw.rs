//! Exact self-avoiding walk enumeration and eastward words.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{GraphBall, VertexId};

/// `counts[k]` is the number of `k`-step SAWs from `root`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SawCountSeries {
    pub counts: Vec<BigUint>,
    pub root: VertexId,
}

/// Growth estimates for `n = 1..=N`, stored at index `n - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MuEstimate {
    pub n_root: Vec<f64>,
    pub ratio: Vec<f64>,
}

struct Walker<'a> {
    ball: &'a GraphBall,
    n: usize,
}

impl Walker<'_> {
    fn extend(
        &self,
        v: VertexId,
        k: usize,
        path: &mut Vec<VertexId>,
        occ: &mut [bool],
        counts: &mut [u128],
    ) -> Result<()> {
        if k == self.n {
            return Ok(());
        }
        if !self.ball.is_complete(v) {
            return Err(Error::Frontier { prefix: path.clone() });
        }
        let nb = self.ball.neighbors(v);
        if k + 1 == self.n {
            counts[k + 1] += nb.iter().filter(|&&w| !occ[w]).count() as u128;
            return Ok(());
        }
        for &w in nb {
            if occ[w] {
                continue;
            }
            occ[w] = true;
            path.push(w);
            counts[k + 1] += 1;
            let r = self.extend(w, k + 1, path, occ, counts);
            path.pop();
            occ[w] = false;
            r?;
        }
        Ok(())
    }

    /// All SAW prefixes of the smallest depth whose count reaches `target`,
    /// tallying shorter depths into `counts`.
    fn prefixes(&self, target: usize, counts: &mut [u128]) -> Result<Vec<Vec<VertexId>>> {
        let mut level = vec![vec![self.ball.root()]];
        let mut depth = 0;
        while level.len() < target && depth < self.n {
            let mut next = Vec::new();
            for p in &level {
                let v = *p.last().unwrap();
                if !self.ball.is_complete(v) {
                    return Err(Error::Frontier { prefix: p.clone() });
                }
                for &w in self.ball.neighbors(v) {
                    if !p.contains(&w) {
                        let mut q = p.clone();
                        q.push(w);
                        next.push(q);
                    }
                }
            }
            depth += 1;
            counts[depth] += next.len() as u128;
            level = next;
            if level.is_empty() {
                break;
            }
        }
        Ok(level)
    }
}

fn to_series(counts: Vec<u128>, root: VertexId) -> SawCountSeries {
    SawCountSeries { counts: counts.into_iter().map(BigUint::from).collect(), root }
}

/// Single-threaded depth-first count of SAWs of length `0..=n` from the root.
pub fn count_saws_serial(ball: &GraphBall, n: usize) -> Result<SawCountSeries> {
    let w = Walker { ball, n };
    let mut counts = vec![0u128; n + 1];
    counts[0] = 1;
    let mut occ = vec![false; ball.len()];
    occ[ball.root()] = true;
    let mut path = vec![ball.root()];
    w.extend(ball.root(), 0, &mut path, &mut occ, &mut counts)?;
    Ok(to_series(counts, ball.root()))
}

/// Parallel count on the current rayon pool, split by walk prefixes.
///
/// Stepping out of an incomplete vertex is an error naming the prefix.
pub fn count_saws(ball: &GraphBall, n: usize) -> Result<SawCountSeries> {
    let w = Walker { ball, n };
    let mut counts = vec![0u128; n + 1];
    counts[0] = 1;
    let target = 64 * rayon::current_num_threads();
    let prefixes = w.prefixes(target, &mut counts)?;
    let depth = prefixes.first().map_or(0, |p| p.len() - 1);
    if depth == n || prefixes.is_empty() {
        return Ok(to_series(counts, ball.root()));
    }
    let partial: Result<Vec<Vec<u128>>> = prefixes
        .par_iter()
        .map_init(
            || vec![false; ball.len()],
            |occ, p| {
                let mut local = vec![0u128; n + 1];
                for &v in p {
                    occ[v] = true;
                }
                let mut path = p.clone();
                let r = w.extend(*p.last().unwrap(), depth, &mut path, occ, &mut local);
                for &v in p {
                    occ[v] = false;
                }
                r.map(|_| local)
            },
        )
        .collect();
    for local in partial? {
        for (c, l) in counts.iter_mut().zip(local) {
            *c += l;
        }
    }
    Ok(to_series(counts, ball.root()))
}

/// [`count_saws`] on a dedicated pool of `threads` workers.
pub fn count_saws_threads(ball: &GraphBall, n: usize, threads: usize) -> Result<SawCountSeries> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Precondition(e.to_string()))?;
    pool.install(|| count_saws(ball, n))
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

pub fn estimate_mu(series: &SawCountSeries) -> Result<MuEstimate> {
    if series.counts.len() < 2 {
        return Err(Error::Range("series needs at least two terms".into()));
    }
    let mut n_root = Vec::new();
    let mut ratio = Vec::new();
    for k in 1..series.counts.len() {
        let s = big_to_f64(&series.counts[k]);
        let prev = big_to_f64(&series.counts[k - 1]);
        // via logs so huge counts do not overflow
        n_root.push((s.ln() / k as f64).exp());
        ratio.push(s / prev);
    }
    Ok(MuEstimate { n_root, ratio })
}

/// Partial sum of the SAW generating function over the available terms.
pub fn truncated_generating_function(series: &SawCountSeries, zeta: &BigRational) -> Result<BigRational> {
    if *zeta < BigRational::zero() {
        return Err(Error::Range("zeta must be non-negative".into()));
    }
    let mut sum = BigRational::zero();
    let mut pow = BigRational::one();
    for c in &series.counts {
        sum += BigRational::from_integer(c.clone().into()) * &pow;
        pow *= zeta;
    }
    Ok(sum)
}

/// Replaces every edge by a path of length two through a new midpoint.
/// Original vertices keep their ids; the midpoint of the `e`-th edge in
/// [`GraphBall::edges`] order is `len + e`.
pub fn subdivide_edges(ball: &GraphBall) -> Result<GraphBall> {
    let n = ball.len();
    let edges: Vec<_> = ball.edges().collect();
    let mut adj = vec![Vec::new(); n + edges.len()];
    let mut complete: Vec<bool> = (0..n).map(|v| ball.is_complete(v)).collect();
    complete.resize(n + edges.len(), true);
    let mut labels = BTreeMap::new();
    for (e, &(u, v)) in edges.iter().enumerate() {
        let m = n + e;
        adj[u].push(m);
        adj[v].push(m);
        adj[m].push(u);
        adj[m].push(v);
        if let Some(l) = ball.label(u, v) {
            labels.insert((u, m), l.to_string());
            labels.insert((m, v), l.to_string());
        }
        if let Some(l) = ball.label(v, u) {
            labels.insert((v, m), l.to_string());
            labels.insert((m, u), l.to_string());
        }
    }
    GraphBall::new(ball.root(), adj, complete, None)?.with_labels(labels)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    H,
    V,
}

/// Word over `{H, V}` starting with `H` with no `VV`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HVWord(Vec<Letter>);

impl HVWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.first() != Some(&Letter::H) {
            return Err(Error::Parse("eastward word must start with H".into()));
        }
        if letters.windows(2).any(|p| p == [Letter::V, Letter::V]) {
            return Err(Error::Parse("eastward word contains VV".into()));
        }
        Ok(HVWord(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for HVWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            f.write_str(if *l == Letter::H { "H" } else { "V" })?;
        }
        Ok(())
    }
}

impl FromStr for HVWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                'H' => Ok(Letter::H),
                'V' => Ok(Letter::V),
                _ => Err(Error::Parse(format!("bad letter {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        HVWord::new(letters)
    }
}

/// All eastward words of length `n`, lexicographic with `H < V`.
pub fn eastward_words(n: usize) -> Result<Vec<HVWord>> {
    if n < 1 {
        return Err(Error::Range("n must be at least 1".into()));
    }
    let mut out = Vec::new();
    let mut cur = vec![Letter::H];
    fn rec(cur: &mut Vec<Letter>, n: usize, out: &mut Vec<HVWord>) {
        if cur.len() == n {
            out.push(HVWord(cur.clone()));
            return;
        }
        cur.push(Letter::H);
        rec(cur, n, out);
        cur.pop();
        if cur.last() != Some(&Letter::V) {
            cur.push(Letter::V);
            rec(cur, n, out);
            cur.pop();
        }
    }
    rec(&mut cur, n, &mut out);
    Ok(out)
}

/// `eta(0) = eta(1) = 1`, `eta(n) = eta(n-1) + eta(n-2)`.
pub fn eta(n: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::one(), BigUint::one());
    for _ in 1..n {
        let c = &a + &b;
        a = b;
        b = c;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices::{build_ladder, build_tree};

    #[test]
    fn tree_counts() {
        let t = build_tree(3, 4).unwrap();
        let s = count_saws(&t, 3).unwrap();
        let want: Vec<BigUint> = [1u32, 3, 6, 12].iter().map(|&x| x.into()).collect();
        assert_eq!(s.counts, want);
        let e = estimate_mu(&count_saws(&t, 4).unwrap()).unwrap();
        assert!(e.ratio[1..].iter().all(|&r| r == 2.0));
    }

    #[test]
    fn ladder_two_steps() {
        // interior vertex: two walks each to the left, to the right, and across the rung
        let l = build_ladder(9, true).unwrap();
        assert_eq!(count_saws(&l, 2).unwrap().counts[2], 6u32.into());
    }

    #[test]
    fn frontier_is_an_error() {
        let t = build_tree(3, 3).unwrap();
        match count_saws(&t, 4) {
            Err(Error::Frontier { prefix }) => assert_eq!(prefix.len(), 4),
            other => panic!("expected frontier error, got {other:?}"),
        }
        assert!(count_saws_serial(&t, 4).is_err());
    }

    #[test]
    fn tree_generating_function() {
        let t = build_tree(3, 11).unwrap();
        let s = count_saws(&t, 10).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(truncated_generating_function(&s, &half).unwrap(), BigRational::from_integer(16.into()));
        assert_eq!(truncated_generating_function(&s, &BigRational::zero()).unwrap(), BigRational::one());
    }

    #[test]
    fn words() {
        let w2: Vec<String> = eastward_words(2).unwrap().iter().map(|w| w.to_string()).collect();
        assert_eq!(w2, vec!["HH", "HV"]);
        assert_eq!(eastward_words(5).unwrap().len(), 8);
        assert_eq!(eastward_words(10).unwrap().len(), 89);
        assert!("HVV".parse::<HVWord>().is_err());
        assert!("VH".parse::<HVWord>().is_err());
    }

    #[test]
    fn subdivision_counts() {
        let adj = (0..6).map(|i| vec![(i + 1) % 6, (i + 5) % 6]).collect();
        let hex = GraphBall::new(0, adj, vec![true; 6], Some(2)).unwrap();
        let s = subdivide_edges(&hex).unwrap();
        assert_eq!(s.len(), 12);
        assert_eq!(s.girth_within(), Some(12));
        let single = GraphBall::new(0, vec![vec![1], vec![0]], vec![true, true], None).unwrap();
        let p = subdivide_edges(&single).unwrap();
        assert_eq!((p.len(), p.edge_count()), (3, 2));
    }
}
