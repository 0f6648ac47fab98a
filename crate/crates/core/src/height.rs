//! Height functions, the step maps `m` and `q`, condition checks and the
//! word-to-walk injection.
//!
//! Heights are exact rationals rather than integers so that harmonic
//! solutions with fractional increments can be checked without tolerance.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{GraphBall, VertexId};
use crate::lattices::{PeriodicBall, PeriodicGraph};
pub use crate::saw::{eastward_words, HVWord, Letter};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Vertex potential normalised to vanish at the root.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightFunction {
    pub values: Vec<BigRational>,
}

impl HeightFunction {
    /// Shifts `values` so the root has height zero.
    pub fn new(ball: &GraphBall, mut values: Vec<BigRational>) -> Result<Self> {
        if values.len() != ball.len() {
            return Err(Error::Precondition("height must be defined on every vertex".into()));
        }
        let base = values[ball.root()].clone();
        for v in values.iter_mut() {
            *v -= &base;
        }
        Ok(HeightFunction { values })
    }

    /// Height on an unrolled periodic ball from domain values and growth per
    /// basis vector.
    pub fn from_periodic(pb: &PeriodicBall, domain: &[BigRational], growth: &[BigRational]) -> Result<Self> {
        if domain.len() != pb.graph.len() || growth.len() != pb.graph.basis.len() {
            return Err(Error::Precondition("domain or growth length mismatch".into()));
        }
        let values = pb
            .sites
            .iter()
            .map(|(c, i)| {
                let mut x = domain[*i].clone();
                for (k, g) in growth.iter().enumerate() {
                    x += g * BigInt::from(c[k]);
                }
                x
            })
            .collect();
        HeightFunction::new(&pb.ball, values)
    }

    /// Horizontal embedding coordinate.
    pub fn horizontal(pb: &PeriodicBall) -> Result<Self> {
        let values =
            (0..pb.ball.len()).map(|v| {
                let x = pb.position(v)[0];
                rat(*x.numer(), *x.denom())
            }).collect();
        HeightFunction::new(&pb.ball, values)
    }

    pub fn get(&self, v: VertexId) -> &BigRational {
        &self.values[v]
    }
}

/// Exact harmonicity at every complete vertex; the witness is the first
/// violating vertex.
pub fn is_harmonic(ball: &GraphBall, h: &HeightFunction) -> Result<(bool, Option<VertexId>)> {
    let mut any = false;
    for v in 0..ball.len() {
        if !ball.is_complete(v) {
            continue;
        }
        any = true;
        let sum: BigRational = ball.neighbors(v).iter().map(|&w| h.values[w].clone()).sum();
        if sum != &h.values[v] * BigInt::from(ball.degree(v)) {
            return Ok((false, Some(v)));
        }
    }
    if !any {
        return Err(Error::Precondition("ball has no complete vertex".into()));
    }
    Ok((true, None))
}

/// `m(u)`, `M_u` and `qm(u)` wherever they can be evaluated.
///
/// `qm[u]` is `q(m(u))`: the neighbour of `m(u)` other than `u` and
/// `m(m(u))`. It needs `m(u)` complete and `m(m(u)) != u`; vertices where the
/// latter fails are listed in `degenerate`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunctions {
    pub m: Vec<Option<VertexId>>,
    pub big_m: Vec<Option<BigRational>>,
    pub qm: Vec<Option<VertexId>>,
    pub degenerate: Vec<VertexId>,
}

pub fn step_functions(ball: &GraphBall, h: &HeightFunction) -> Result<StepFunctions> {
    let n = ball.len();
    let mut m = vec![None; n];
    let mut big_m = vec![None; n];
    for u in 0..n {
        if !ball.is_complete(u) {
            continue;
        }
        if ball.degree(u) != 3 {
            return Err(Error::Precondition(format!("vertex {u} is not cubic")));
        }
        // neighbours are sorted, so the first maximiser has the smallest id
        let mut best = ball.neighbors(u)[0];
        for &w in ball.neighbors(u) {
            if h.values[w] > h.values[best] {
                best = w;
            }
        }
        m[u] = Some(best);
        big_m[u] = Some(&h.values[best] - &h.values[u]);
    }
    let mut qm = vec![None; n];
    let mut degenerate = Vec::new();
    for u in 0..n {
        let Some(v) = m[u] else { continue };
        let Some(mv) = m[v] else { continue };
        if mv == u {
            degenerate.push(u);
            continue;
        }
        qm[u] = ball.neighbors(v).iter().copied().find(|&w| w != u && w != mv);
    }
    Ok(StepFunctions { m, big_m, qm, degenerate })
}

/// Outcome of the pointwise conditions over the evaluable core.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConditionReport {
    pub core: usize,
    pub eq1: bool,
    pub eq2: bool,
    pub qm: bool,
    pub ag: bool,
    pub gamma: usize,
    pub remark_band: bool,
    /// The three strict height increases implied by eq1 and eq2, checked
    /// wherever both hold.
    pub consequences: bool,
    pub failures: Vec<(String, VertexId)>,
}

impl ConditionReport {
    pub fn count_failures(&self, name: &str) -> usize {
        self.failures.iter().filter(|f| f.0 == name).count()
    }
}

/// Evaluates the conditions at every vertex where all needed iterates lie in
/// the complete region. `band` is the constant `A` of the band test; when
/// absent, half the largest `M` is used.
pub fn check_conditions(
    ball: &GraphBall,
    h: &HeightFunction,
    girth: usize,
    band: Option<BigRational>,
) -> Result<ConditionReport> {
    if girth < 3 {
        return Err(Error::Range("girth must be at least 3".into()));
    }
    let s = step_functions(ball, h)?;
    let gamma = (girth - 1).div_ceil(2);
    let hv = |v: VertexId| &h.values[v];
    let bm = |v: VertexId| s.big_m[v].as_ref();
    let mut rep = ConditionReport {
        eq1: true,
        eq2: true,
        qm: true,
        ag: true,
        remark_band: true,
        consequences: true,
        gamma,
        ..Default::default()
    };
    let a = match band {
        Some(a) => a,
        None => {
            let max = s.big_m.iter().flatten().max().cloned().unwrap_or_else(BigRational::zero);
            max / BigInt::from(2)
        }
    };
    for u in 0..ball.len() {
        // all the iterates used below
        let Some(mu) = s.m[u] else { continue };
        let Some(q) = s.qm[u] else { continue };
        let Some(mq) = s.m[q] else { continue };
        let Some(q2) = s.qm[q] else { continue };
        let (Some(m_u), Some(m_mu), Some(m_q), Some(m_mq)) = (bm(u), bm(mu), bm(q), bm(mq)) else {
            continue;
        };
        let mut chain = q;
        let mut ok = true;
        for _ in 0..gamma {
            match s.qm[chain] {
                Some(x) => chain = x,
                None => ok = false,
            }
            if !ok {
                break;
            }
        }
        if !ok {
            continue;
        }
        rep.core += 1;
        let fail = |name: &str, rep: &mut ConditionReport| {
            rep.failures.push((name.to_string(), u));
        };
        let diff = m_mu - m_u;
        let e1 = diff < *m_u.min(m_q);
        let e2 = m_q * BigInt::from(2) > &diff + m_mq;
        if !e1 {
            rep.eq1 = false;
            fail("eq1", &mut rep);
        }
        if !e2 {
            rep.eq2 = false;
            fail("eq2", &mut rep);
        }
        if !(hv(q) > hv(u) && hv(mq) > hv(mu)) {
            rep.qm = false;
            fail("qm", &mut rep);
        }
        // (qm)^gamma applied to q(m(u)), compared with m(u)
        if hv(chain) <= hv(mu) {
            rep.ag = false;
            fail("ag", &mut rep);
        }
        if !(m_u > &a && *m_u <= &a * BigInt::from(2)) {
            rep.remark_band = false;
            fail("remark_band", &mut rep);
        }
        if e1 && e2 && !(hv(q) > hv(u) && hv(mq) > hv(mu) && hv(q2) > hv(mu)) {
            rep.consequences = false;
            fail("consequences", &mut rep);
        }
    }
    if rep.core == 0 {
        return Err(Error::RegionTooSmall("no vertex has all iterates inside the complete region".into()));
    }
    Ok(rep)
}

/// The walk of each eastward word: `f_0` is the root, `f_1 = m(f_0)`, then
/// `H` applies `m` and `V` applies `q` relative to the previous vertex.
pub fn build_injection(ball: &GraphBall, h: &HeightFunction, n: usize) -> Result<Vec<(HVWord, Vec<VertexId>)>> {
    let s = step_functions(ball, h)?;
    let words = eastward_words(n)?;
    words
        .into_par_iter()
        .map(|w| {
            let mut f = vec![ball.root()];
            for (k, l) in w.letters().iter().enumerate() {
                let next = if k == 0 || *l == Letter::H {
                    s.m[f[k]]
                } else {
                    s.qm[f[k - 1]]
                };
                match next {
                    Some(x) => f.push(x),
                    None => {
                        return Err(Error::RegionTooSmall(format!("word {w} leaves the evaluable region at step {k}")))
                    }
                }
            }
            Ok((w, f))
        })
        .collect()
}

/// Largest `n <= limit` for which [`build_injection`] stays inside the ball.
pub fn max_injection_steps(ball: &GraphBall, h: &HeightFunction, limit: usize) -> usize {
    (1..=limit).take_while(|&n| build_injection(ball, h, n).is_ok()).last().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InjectionReport {
    pub count: usize,
    pub all_saw: bool,
    pub injective: bool,
    pub violations: Vec<String>,
}

impl InjectionReport {
    pub fn passed(&self) -> bool {
        self.all_saw && self.injective
    }
}

/// Every walk self-avoiding, and distinct words giving distinct walks.
pub fn verify_injection<W: std::fmt::Display>(walks: &[(W, Vec<VertexId>)]) -> InjectionReport {
    let mut violations = Vec::new();
    for (w, f) in walks {
        let mut seen = HashSet::new();
        if !f.iter().all(|v| seen.insert(*v)) {
            violations.push(format!("{w}: walk revisits a vertex"));
        }
    }
    let all_saw = violations.is_empty();
    let mut images = HashSet::new();
    let mut injective = true;
    for (w, f) in walks {
        if !images.insert(f.clone()) {
            injective = false;
            violations.push(format!("{w}: walk repeated"));
        }
    }
    InjectionReport { count: walks.len(), all_saw, injective, violations }
}

/// Harmonic function on a periodic graph with `h(v + b_i) = h(v) + growth_i`,
/// returned as domain values with the first domain vertex at zero.
pub fn solve_periodic_harmonic(pg: &PeriodicGraph, growth: &[BigRational]) -> Result<Vec<BigRational>> {
    pg.validate()?;
    if growth.len() != pg.basis.len() {
        return Err(Error::Precondition("one growth value per basis vector".into()));
    }
    if growth.iter().all(|g| g.is_zero()) {
        return Err(Error::Precondition("growth must not vanish".into()));
    }
    let d = pg.len();
    // unknowns x_1..x_{d-1}; row i: deg x_i - sum x_j = sum offset . growth
    let cols = d - 1;
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for i in 0..d {
        let mut row = vec![BigRational::zero(); cols + 1];
        let out = pg.out_edges(i);
        if i > 0 {
            row[i - 1] += BigRational::from_integer(BigInt::from(out.len()));
        }
        for (j, o) in out {
            if j > 0 {
                row[j - 1] -= BigRational::one();
            }
            for (k, g) in growth.iter().enumerate() {
                row[cols] += g * BigInt::from(o[k]);
            }
        }
        rows.push(row);
    }
    let sol = gauss(rows, cols)?;
    let mut out = vec![BigRational::zero()];
    out.extend(sol);
    Ok(out)
}

/// Solves a consistent system with full column rank by Gauss-Jordan
/// elimination. Rows carry the right-hand side in the last column.
fn gauss(mut rows: Vec<Vec<BigRational>>, cols: usize) -> Result<Vec<BigRational>> {
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            return Err(Error::Singular);
        };
        rows.swap(r, p);
        let piv = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x /= &piv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in 0..=cols {
                    let t = &rows[r][k] * &f;
                    rows[i][k] -= t;
                }
            }
        }
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[cols].is_zero()) {
        return Err(Error::Singular);
    }
    Ok((0..cols).map(|c| rows[c][cols].clone()).collect())
}

/// `g(v) = sum_i h(k_i v)` over a window, shifted so the first window
/// vertex has value zero, together with whether each supplied map shifts
/// `g` by a constant on the window.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetSum {
    pub window: Vec<VertexId>,
    pub values: Vec<BigRational>,
    pub difference_invariant: bool,
}

/// Each automorphism is a partial vertex map on the ball. Every window
/// vertex must be mapped into the ball by every map.
pub fn coset_sum_height(
    h: &HeightFunction,
    autos: &[Vec<Option<VertexId>>],
    window: &[VertexId],
) -> Result<CosetSum> {
    if autos.is_empty() || window.is_empty() {
        return Err(Error::Precondition("need at least one map and one window vertex".into()));
    }
    let mut values = Vec::with_capacity(window.len());
    for &v in window {
        let mut s = BigRational::zero();
        for k in autos {
            let img = k.get(v).copied().flatten().ok_or_else(|| Error::RegionTooSmall(format!("map leaves the ball at {v}")))?;
            s += &h.values[img];
        }
        values.push(s);
    }
    let base = values[0].clone();
    for x in values.iter_mut() {
        *x -= &base;
    }
    let pos: std::collections::HashMap<VertexId, usize> = window.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut invariant = true;
    for k in autos {
        let mut shift: Option<BigRational> = None;
        for (i, &v) in window.iter().enumerate() {
            let Some(&j) = k[v].as_ref().and_then(|w| pos.get(w)) else { continue };
            let d = &values[j] - &values[i];
            match &shift {
                None => shift = Some(d),
                Some(s0) if *s0 != d => invariant = false,
                _ => {}
            }
        }
    }
    Ok(CosetSum { window: window.to_vec(), values, difference_invariant: invariant })
}

/// Brick-wall horizontal coordinate on the hexagonal lattice; `M` is
/// identically one.
pub fn hexagonal_height(pb: &PeriodicBall) -> Result<HeightFunction> {
    HeightFunction::horizontal(pb)
}

/// Harmonic height on ⟨4,6,12⟩ growing along the horizontal axis: growth
/// `(2, 1)` on the brick-wall basis `(2,0), (1,1)`.
pub fn arch_4_6_12_height(pb: &PeriodicBall) -> Result<HeightFunction> {
    let growth = vec![rat(2, 1), rat(1, 1)];
    let dom = solve_periodic_harmonic(&pb.graph, &growth)?;
    HeightFunction::from_periodic(pb, &dom, &growth)
}
