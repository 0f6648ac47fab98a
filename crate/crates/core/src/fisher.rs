//! Fisher transformation, small-face contraction and bound equations.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{GraphBall, VertexId};

/// Bound equations, each with a documented bracket on which it is monotone.
#[derive(Clone, Debug, PartialEq)]
pub enum GrowthEquation {
    /// `1/x^2 + 1/x^3 = 1/mu_g`, solved for `x = mu(G_F)`.
    Fisher3 { mu_g: f64 },
    /// `2/x^(r+1) = 1/mu_g` for degree `2r`.
    FisherEven { r: u32, mu_g: f64 },
    /// `1/x^(r+1) + 1/x^(r+2) = 1/mu_g` for degree `2r+1`.
    FisherOdd { r: u32, mu_g: f64 },
    /// `1/x^2 + 1/x^3 = 1/sqrt(2)`.
    G3Lower,
    /// `1/x^2 + 1/x^3 = 1/2`.
    G3Upper,
    /// `x^6 = 12`.
    G4Lower,
    /// `2z(z + z^2 + z^3) = 1`, value `1/z`.
    G4Upper,
    /// Free-product bound, value `1/zeta` for the smallest positive root.
    G5 { d: u32, g: u32 },
    /// `z^3 (1+z)^2 = 1/mu_p`, value `1/z`.
    CaseC { mu_p: f64 },
    /// `x^k = sum c_i x^(k-i)`, dominant positive root.
    PolyRecurrence(Vec<f64>),
    /// `sum c_i zeta^i = 1` with `c_0` first, value `1/zeta`.
    CustomPoly(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootResult {
    /// The bound as usually quoted (a growth rate).
    pub value: f64,
    /// Root in the variable that was bisected.
    pub root: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: u32,
}

const WIDTH: f64 = 1e-13;

/// Bisection on `[lo, hi]`; `f` must change sign across the bracket.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<(f64, (f64, f64), u32)> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok((a, (a, a), 0));
    }
    if fb == 0.0 {
        return Ok((b, (b, b), 0));
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let mut it = 0;
    while b - a > WIDTH * 0.1 && it < 400 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok((m, (m, m), it + 1));
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
        it += 1;
    }
    Ok((0.5 * (a + b), (a, b), it))
}

fn poly(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

fn check_mu(mu: f64, max: f64) -> Result<()> {
    if !(mu > 1.0 && mu <= max) {
        return Err(Error::Range(format!("connective constant {mu} outside (1, {max}]")));
    }
    Ok(())
}

impl GrowthEquation {
    pub fn name(&self) -> String {
        match self {
            GrowthEquation::Fisher3 { .. } => "fisher3".into(),
            GrowthEquation::FisherEven { r, .. } => format!("fisher_even({r})"),
            GrowthEquation::FisherOdd { r, .. } => format!("fisher_odd({r})"),
            GrowthEquation::G3Lower => "g3_lower".into(),
            GrowthEquation::G3Upper => "g3_upper".into(),
            GrowthEquation::G4Lower => "g4_lower".into(),
            GrowthEquation::G4Upper => "g4_upper".into(),
            GrowthEquation::G5 { d, g } => format!("g5({d},{g})"),
            GrowthEquation::CaseC { .. } => "caseC".into(),
            GrowthEquation::PolyRecurrence(_) => "poly_recurrence".into(),
            GrowthEquation::CustomPoly(_) => "custom_poly".into(),
        }
    }

    /// The equation as `f(t) = 0` in its bisection variable `t`, the
    /// bracket, and the map from `t` to the reported value.
    fn setup(&self) -> Result<(Box<dyn Fn(f64) -> f64 + '_>, f64, f64, fn(f64) -> f64)> {
        let id: fn(f64) -> f64 = |x| x;
        let inv: fn(f64) -> f64 = |x| 1.0 / x;
        Ok(match self {
            GrowthEquation::Fisher3 { mu_g } => {
                check_mu(*mu_g, 2.0)?;
                let m = *mu_g;
                (Box::new(move |x: f64| x.powi(-2) + x.powi(-3) - 1.0 / m), 1.0, 4.0, id)
            }
            GrowthEquation::FisherEven { r, mu_g } => {
                if *r < 2 {
                    return Err(Error::Range("even Fisher relation needs d = 2r >= 4".into()));
                }
                check_mu(*mu_g, (2 * r - 1) as f64)?;
                let (m, e) = (*mu_g, (*r + 1) as i32);
                (Box::new(move |x: f64| 2.0 * x.powi(-e) - 1.0 / m), 1.0, 2.0 * m + 2.0, id)
            }
            GrowthEquation::FisherOdd { r, mu_g } => {
                if *r < 1 {
                    return Err(Error::Range("odd Fisher relation needs d = 2r+1 >= 3".into()));
                }
                check_mu(*mu_g, (2 * r) as f64)?;
                let (m, e) = (*mu_g, (*r + 1) as i32);
                (Box::new(move |x: f64| x.powi(-e) + x.powi(-e - 1) - 1.0 / m), 1.0, 2.0 * m + 2.0, id)
            }
            GrowthEquation::G3Lower => {
                (Box::new(|x: f64| x.powi(-2) + x.powi(-3) - std::f64::consts::FRAC_1_SQRT_2), 1.0, 2.0, id)
            }
            GrowthEquation::G3Upper => (Box::new(|x: f64| x.powi(-2) + x.powi(-3) - 0.5), 1.0, 2.0, id),
            GrowthEquation::G4Lower => (Box::new(|x: f64| x.powi(6) - 12.0), 1.0, 2.0, id),
            GrowthEquation::G4Upper => {
                (Box::new(|z: f64| 2.0 * z * (z + z * z + z * z * z) - 1.0), 0.0, 1.0, inv)
            }
            GrowthEquation::G5 { d, g } => {
                if *d < 3 || *g < 3 {
                    return Err(Error::Range("g5 needs d >= 3 and g >= 3".into()));
                }
                let (d, g) = (*d as f64, *g as i32);
                let f = move |z: f64| {
                    let m1 = z;
                    let m2 = 2.0 * (1..g).map(|i| z.powi(i)).sum::<f64>();
                    (d - 2.0) * m1 / (1.0 + m1) + m2 / (1.0 + m2) - 1.0
                };
                (Box::new(f), 1e-9, 1.0 - 1e-9, inv)
            }
            GrowthEquation::CaseC { mu_p } => {
                if !(*mu_p > 1.0) {
                    return Err(Error::Range("mu_p must exceed 1".into()));
                }
                let m = *mu_p;
                (Box::new(move |z: f64| z.powi(3) * (1.0 + z).powi(2) - 1.0 / m), 0.0, 1.0, inv)
            }
            GrowthEquation::PolyRecurrence(c) => {
                if c.is_empty() || c.iter().any(|&x| x < 0.0) || c.iter().all(|&x| x == 0.0) {
                    return Err(Error::Range("recurrence needs non-negative coefficients, one positive".into()));
                }
                let hi = 1.0 + c.iter().sum::<f64>();
                let f = move |x: f64| 1.0 - c.iter().enumerate().map(|(i, &ci)| ci * x.powi(-(i as i32) - 1)).sum::<f64>();
                (Box::new(f), 1e-6, hi, id)
            }
            GrowthEquation::CustomPoly(c) => {
                if c.iter().any(|&x| x < 0.0) || c.iter().skip(1).all(|&x| x == 0.0) || c.first().copied().unwrap_or(0.0) >= 1.0 {
                    return Err(Error::Range("custom polynomial needs c_0 < 1 and non-negative coefficients".into()));
                }
                let mut hi = 1.0;
                while poly(c, hi) < 1.0 {
                    hi *= 2.0;
                }
                (Box::new(move |z: f64| poly(c, z) - 1.0), 0.0, hi, inv)
            }
        })
    }

    /// The equation's defining function, for independent residual checks.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let (f, _, _, _) = self.setup()?;
        Ok(f(t))
    }
}

pub fn solve(eq: &GrowthEquation) -> Result<RootResult> {
    let (f, lo, hi, to_value) = eq.setup()?;
    if let GrowthEquation::G5 { .. } = eq {
        // the left side minus one must cross zero exactly once on the bracket
        let grid: Vec<f64> = (0..=2000).map(|i| lo + (hi - lo) * i as f64 / 2000.0).collect();
        let changes = grid.windows(2).filter(|w| f(w[0]).signum() != f(w[1]).signum()).count();
        if changes != 1 {
            return Err(Error::Precondition(format!("g5 equation changes sign {changes} times")));
        }
    }
    let (root, bracket, iterations) = bisect(&f, lo, hi)?;
    Ok(RootResult { value: to_value(root), root, residual: f(root), bracket, iterations })
}

/// Lower bound (exact value for `d = 3`) on the connective constant of the
/// Fisher graph of a `d`-regular graph with connective constant `mu_g`.
pub fn fisher_mu_bounds(mu_g: f64, d: u32) -> Result<RootResult> {
    if d < 3 {
        return Err(Error::Range("degree must be at least 3".into()));
    }
    let eq = if d == 3 {
        GrowthEquation::Fisher3 { mu_g }
    } else if d.is_multiple_of(2) {
        GrowthEquation::FisherEven { r: d / 2, mu_g }
    } else {
        GrowthEquation::FisherOdd { r: d / 2, mu_g }
    };
    solve(&eq)
}

pub fn recurrence_growth(coeffs: &[f64]) -> Result<RootResult> {
    solve(&GrowthEquation::PolyRecurrence(coeffs.to_vec()))
}

/// Catalogue used by the `bounds --list` command.
pub fn named_equations() -> Vec<(&'static str, GrowthEquation)> {
    vec![
        ("g3_lower", GrowthEquation::G3Lower),
        ("g3_upper", GrowthEquation::G3Upper),
        ("g4_lower", GrowthEquation::G4Lower),
        ("g4_upper", GrowthEquation::G4Upper),
        ("twisted_ladder", GrowthEquation::CustomPoly(vec![0.0, 0.0, 2.0, 0.0, 2.0])),
        ("caseC_hex", GrowthEquation::CaseC { mu_p: (2.0 + 2f64.sqrt()).sqrt() }),
        ("caseC_phi", GrowthEquation::CaseC { mu_p: crate::PHI }),
        ("g5_3_3", GrowthEquation::G5 { d: 3, g: 3 }),
        ("g5_3_4", GrowthEquation::G5 { d: 3, g: 4 }),
        ("recurrence_a", GrowthEquation::PolyRecurrence(vec![1.0, 1.0])),
        ("recurrence_b", GrowthEquation::PolyRecurrence(vec![0.0, 2.0, 0.0, 2.0])),
    ]
}

/// Replaces each complete vertex by a cycle on its incident edges, taken in
/// the cyclic order `order[v]` (sorted neighbours when `None`). Incomplete
/// vertices are dropped; a cycle vertex is complete when the edge it stands
/// for leads to another complete vertex.
///
/// Returns the new ball and, for each new vertex, the directed edge `(v, w)`
/// it stands for.
pub fn fisher_transform(
    ball: &GraphBall,
    order: Option<&[Vec<VertexId>]>,
) -> Result<(GraphBall, Vec<(VertexId, VertexId)>)> {
    let mut ids: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    let mut darts = Vec::new();
    let mut cyc: Vec<Vec<VertexId>> = Vec::new();
    for v in 0..ball.len() {
        if !ball.is_complete(v) {
            continue;
        }
        let nb: Vec<VertexId> = match order {
            Some(o) => {
                let mut a = o[v].clone();
                let mut b = ball.neighbors(v).to_vec();
                a.sort_unstable();
                b.sort_unstable();
                if a != b {
                    return Err(Error::Precondition(format!("cyclic order at {v} is not its neighbourhood")));
                }
                o[v].clone()
            }
            None => ball.neighbors(v).to_vec(),
        };
        if nb.len() < 3 {
            return Err(Error::Precondition(format!("vertex {v} has degree below 3")));
        }
        for &w in &nb {
            ids.insert((v, w), darts.len());
            darts.push((v, w));
        }
        cyc.push(nb);
    }
    let mut adj = vec![Vec::new(); darts.len()];
    let mut complete = vec![false; darts.len()];
    for (i, &(v, w)) in darts.iter().enumerate() {
        if let Some(&j) = ids.get(&(w, v)) {
            adj[i].push(j);
            complete[i] = true;
        }
    }
    let mut k = 0;
    for nb in &cyc {
        let d = nb.len();
        for s in 0..d {
            let a = k + s;
            let b = k + (s + 1) % d;
            adj[a].push(b);
            adj[b].push(a);
        }
        k += d;
    }
    let root_nb = ball.neighbors(ball.root())[0];
    let root = *ids.get(&(ball.root(), root_nb)).ok_or_else(|| Error::Precondition("root not complete".into()))?;
    Ok((GraphBall::new(root, adj, complete, Some(3))?, darts))
}

/// All `k`-cycles through `v`, as sorted vertex sets.
fn short_cycles_at(ball: &GraphBall, v: VertexId, k: usize) -> Vec<Vec<VertexId>> {
    let mut found = Vec::new();
    let mut path = vec![v];
    fn rec(ball: &GraphBall, k: usize, path: &mut Vec<VertexId>, found: &mut Vec<Vec<VertexId>>) {
        let u = *path.last().unwrap();
        for &w in ball.neighbors(u) {
            if path.len() == k {
                if w == path[0] && path[1] < path[k - 1] {
                    let mut s = path.clone();
                    s.sort_unstable();
                    found.push(s);
                }
                continue;
            }
            if !path.contains(&w) {
                path.push(w);
                rec(ball, k, path, found);
                path.pop();
            }
        }
    }
    rec(ball, k, &mut path, &mut found);
    found.sort();
    found.dedup();
    found
}

/// Vertices whose whole `radius`-neighbourhood is complete.
fn core_vertices(ball: &GraphBall, radius: usize) -> Vec<VertexId> {
    (0..ball.len())
        .filter(|&v| {
            let dist = ball.bfs(v);
            (0..ball.len()).all(|w| dist[w].is_none_or(|d| d > radius) || ball.is_complete(w))
        })
        .collect()
}

/// Whether every vertex of the complete core lies in exactly one `k`-cycle.
/// On failure the witness is a core vertex with a different count.
pub fn unique_small_face_cover(ball: &GraphBall, k: usize) -> (bool, Option<VertexId>) {
    for v in core_vertices(ball, k / 2) {
        if short_cycles_at(ball, v, k).len() != 1 {
            return (false, Some(v));
        }
    }
    (true, None)
}

/// Collapses each `k`-cycle to a single vertex. Vertices in no `k`-cycle
/// inside the ball are dropped. A collapsed vertex is complete when all its
/// members are complete and all their outside neighbours survive.
///
/// Returns the new ball and the member set of each new vertex.
pub fn contract_small_faces(ball: &GraphBall, k: usize) -> Result<(GraphBall, Vec<Vec<VertexId>>)> {
    if let (false, Some(w)) = unique_small_face_cover(ball, k) {
        return Err(Error::Precondition(format!("vertex {w} is not in exactly one {k}-cycle")));
    }
    let mut group = vec![usize::MAX; ball.len()];
    let mut members: Vec<Vec<VertexId>> = Vec::new();
    for v in 0..ball.len() {
        if group[v] != usize::MAX {
            continue;
        }
        let cycles = short_cycles_at(ball, v, k);
        if cycles.len() != 1 {
            continue;
        }
        let c = &cycles[0];
        if c.iter().any(|&u| group[u] != usize::MAX) {
            continue;
        }
        for &u in c {
            group[u] = members.len();
        }
        members.push(c.clone());
    }
    let mut adj = vec![Vec::new(); members.len()];
    let mut complete = vec![true; members.len()];
    for (gi, m) in members.iter().enumerate() {
        for &u in m {
            if !ball.is_complete(u) {
                complete[gi] = false;
            }
            for &w in ball.neighbors(u) {
                let gw = group[w];
                if gw == gi {
                    continue;
                }
                if gw == usize::MAX {
                    complete[gi] = false;
                } else if !adj[gi].contains(&gw) {
                    adj[gi].push(gw);
                }
            }
        }
    }
    let root = group[ball.root()];
    if root == usize::MAX {
        return Err(Error::Precondition("root lies in no small cycle".into()));
    }
    Ok((GraphBall::new(root, adj, complete, Some(k))?, members))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoted_constants() {
        let x1 = solve(&GrowthEquation::G3Lower).unwrap();
        assert!((x1.value - 1.529).abs() < 1e-3);
        let x2 = solve(&GrowthEquation::G3Upper).unwrap();
        assert!((x2.value - 1.7693).abs() < 1e-4);
        let y2 = solve(&GrowthEquation::G4Upper).unwrap();
        assert!((y2.value - 1.900).abs() < 1e-3);
        let y1 = solve(&GrowthEquation::G4Lower).unwrap();
        assert!((y1.value - 12f64.powf(1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn fisher_relations() {
        let t = fisher_mu_bounds(2.0, 3).unwrap();
        assert!((t.value - solve(&GrowthEquation::G3Upper).unwrap().value).abs() < 1e-12);
        let f4 = fisher_mu_bounds(3.0, 4).unwrap();
        assert!((f4.value - 6f64.cbrt()).abs() < 1e-12);
        let fp = fisher_mu_bounds(crate::PHI, 3).unwrap();
        assert!(fp.value > crate::PHI);
        assert!(fisher_mu_bounds(2.5, 3).is_err());
    }

    #[test]
    fn recurrences() {
        assert!((recurrence_growth(&[2.0]).unwrap().value - 2.0).abs() < 1e-12);
        assert!(recurrence_growth(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn g5_reduces_for_cubic() {
        // at d = 3 the equation is zeta * M2(zeta) = 1
        for g in 3..=6u32 {
            let r = solve(&GrowthEquation::G5 { d: 3, g }).unwrap();
            let mut c = vec![0.0; g as usize + 1];
            for ci in c.iter_mut().skip(2) {
                *ci = 2.0;
            }
            let direct = solve(&GrowthEquation::CustomPoly(c)).unwrap();
            assert!((r.value - direct.value).abs() < 1e-9, "g = {g}");
        }
    }
}
