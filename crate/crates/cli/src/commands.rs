//! One function per subcommand. Each returns whether its checks passed.

use std::fmt::Write as _;

use sawlab::fisher::{named_equations, solve, RootResult};
use sawlab::grigorchuk::{cayley_ball, generate_wa_prime, lift_and_verify, schreier_ball, z_bound_check};
use sawlab::height::{self, arch_4_6_12_height, check_conditions, hexagonal_height, build_injection, rat, HeightFunction, InjectionReport};
use sawlab::lattices::{build_ladder, build_periodic};
use sawlab::saw::{count_saws, estimate_mu, eta, subdivide_edges, SawCountSeries};
use sawlab::tlf::{
    case_a_injection, case_b_injection, case_c_family, case_d_injection, check_l95_l96, generate_tiling, hexagon_graph,
    hexagon_saws, max_window_balance, TypeVector,
};
use sawlab::{GraphBall, PHI};

use crate::config::Settings;
use crate::error::CliError;
use crate::family::Family;
use crate::table::{real, Table};

/// Text for the terminal, the CSV table and the verdict.
pub struct Outcome {
    pub text: String,
    pub table: Option<Table>,
    pub passed: bool,
}

fn need<T>(v: Option<T>, what: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing {what}")))
}

fn family(s: &Settings) -> Result<Family, CliError> {
    need(s.family.as_deref(), "--family")?.parse()
}

fn residual_ok(r: &RootResult) -> bool {
    r.residual.abs() <= 1e-12
}

fn pass(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn build(s: &Settings) -> Result<Outcome, CliError> {
    let fam = family(s)?;
    let ball = fam.build(need(s.radius, "--radius")?)?;
    let text = ball.to_text();
    match &s.out {
        Some(path) => {
            std::fs::write(path, &text)?;
            Ok(Outcome { text: format!("wrote {} vertices to {path}\n", ball.len()), table: None, passed: true })
        }
        None => Ok(Outcome { text, table: None, passed: true }),
    }
}

fn series_for(s: &Settings) -> Result<(Family, SawCountSeries), CliError> {
    let fam = family(s)?;
    let n = need(s.steps, "--steps")?;
    let ball = fam.build(s.radius.unwrap_or(n).max(1))?;
    Ok((fam, count_saws(&ball, n)?))
}

pub fn count(s: &Settings) -> Result<Outcome, CliError> {
    let (fam, series) = series_for(s)?;
    let est = estimate_mu(&series)?;
    let mut t = Table::new(&["n", "sigma_n", "ratio", "nth_root"]);
    let anchor = format!("saw.count.{}", fam.tag());
    for (n, c) in series.counts.iter().enumerate().skip(1) {
        t.push(&anchor, vec![n.to_string(), c.to_string(), real(est.ratio[n - 1]), real(est.n_root[n - 1])]);
    }
    Ok(Outcome { text: t.render(), table: Some(t), passed: true })
}

pub fn estimate(s: &Settings) -> Result<Outcome, CliError> {
    let (fam, series) = series_for(s)?;
    let est = estimate_mu(&series)?;
    let n = series.counts.len() - 1;
    let (ratio, root) = (est.ratio[n - 1], est.n_root[n - 1]);
    let reference = fam.reference_mu();
    let mut t = Table::new(&["family", "n", "ratio", "nth_root", "reference"]);
    t.push(
        &format!("saw.mu.{}", fam.tag()),
        vec![fam.tag(), n.to_string(), real(ratio), real(root), reference.map(real).unwrap_or_default()],
    );
    let mut text = format!("{}: n = {n}, ratio {}, n-th root {}", fam.tag(), real(ratio), real(root));
    if let Some(r) = reference {
        let _ = write!(text, ", known value {}", real(r));
    }
    text.push('\n');
    Ok(Outcome { text, table: Some(t), passed: true })
}

pub fn bounds(s: &Settings) -> Result<Outcome, CliError> {
    let all = named_equations();
    if s.list && s.eq.is_none() && s.csv.is_none() {
        let text = all.iter().map(|(n, e)| format!("{n:<16}{}\n", e.name())).collect();
        return Ok(Outcome { text, table: None, passed: true });
    }
    let chosen: Vec<_> = match &s.eq {
        Some(name) => {
            let found = all.into_iter().find(|(n, _)| n == name);
            vec![found.ok_or_else(|| CliError::Config(format!("unknown equation `{name}`; see `bounds --list`")))?]
        }
        None => all,
    };
    let mut t = Table::new(&["equation", "value", "residual", "bracket_lo", "bracket_hi"]);
    let mut ok = true;
    for (name, eq) in chosen {
        let r = solve(&eq)?;
        ok &= residual_ok(&r);
        t.push(
            &format!("bound.{name}"),
            vec![name.to_string(), real(r.value), format!("{:.3e}", r.residual), real(r.bracket.0), real(r.bracket.1)],
        );
    }
    Ok(Outcome { text: t.render(), table: Some(t), passed: ok })
}

/// Height function and girth for the families that carry one.
fn height_family(fam: &Family, radius: usize) -> Result<(GraphBall, HeightFunction, usize), CliError> {
    match fam {
        Family::Periodic("hexagonal") => {
            let pb = build_periodic("hexagonal", radius)?;
            let h = hexagonal_height(&pb)?;
            Ok((pb.ball, h, 6))
        }
        Family::Periodic("arch_4_6_12") => {
            let pb = build_periodic("arch_4_6_12", radius)?;
            let h = arch_4_6_12_height(&pb)?;
            Ok((pb.ball, h, 4))
        }
        Family::Ladder => {
            let l = build_ladder(2 * radius + 2, true)?;
            let vals = (0..l.len()).map(|v| rat((v / 2) as i64, 1)).collect();
            let h = HeightFunction::new(&l, vals)?;
            Ok((l, h, 4))
        }
        other => Err(CliError::Config(format!(
            "no height function for {}; use hexagonal, arch_4_6_12 or ladder",
            other.tag()
        ))),
    }
}

fn injection_rows(t: &mut Table, anchor: &str, rep: &InjectionReport, n: usize) {
    let eta_n = eta(n);
    t.push(anchor, vec!["walks".into(), rep.count.to_string(), eta_n.to_string(), pass(eta_n == rep.count.into()).into()]);
    t.push(anchor, vec!["self_avoiding".into(), rep.count.to_string(), String::new(), pass(rep.all_saw).into()]);
    t.push(anchor, vec!["injective".into(), rep.count.to_string(), String::new(), pass(rep.injective).into()]);
}

fn injection_ok(rep: &InjectionReport, n: usize) -> bool {
    rep.passed() && eta(n) == rep.count.into()
}

pub fn verify_injection(s: &Settings) -> Result<Outcome, CliError> {
    let fam = family(s)?;
    let n = need(s.steps, "--steps")?;
    let (ball, h, girth) = height_family(&fam, s.radius.unwrap_or(n + 4))?;
    let cond = check_conditions(&ball, &h, girth, None)?;
    let walks = build_injection(&ball, &h, n)?;
    let rep = height::verify_injection(&walks);
    let mut t = Table::new(&["check", "count", "expected", "result"]);
    let anchor = format!("injection.{}", fam.tag());
    for (name, ok) in [("eq1", cond.eq1), ("eq2", cond.eq2), ("qm", cond.qm), ("consequences", cond.consequences)] {
        t.push(&anchor, vec![name.into(), cond.count_failures(name).to_string(), "0".into(), pass(ok).into()]);
    }
    injection_rows(&mut t, &anchor, &rep, n);
    let passed = cond.eq1 && cond.eq2 && cond.qm && cond.consequences && injection_ok(&rep, n);
    let text = format!("{}core vertices checked: {}\noverall: {}\n", t.render(), cond.core, pass(passed));
    Ok(Outcome { text, table: Some(t), passed })
}

pub fn tiling(s: &Settings) -> Result<Outcome, CliError> {
    let tv: TypeVector = need(s.tiling_type.as_deref(), "--type")?.parse().map_err(CliError::from)?;
    let (geometry, class) = tv.classify();
    let steps = s.steps;
    let radius = s.radius.unwrap_or_else(|| match (s.inject.as_deref(), steps) {
        (Some("caseC"), Some(n)) => 4 * n + 2,
        (Some(_), Some(n)) => n + 2,
        _ => 9,
    });
    let (ball, map) = generate_tiling(tv, radius)?;
    let mut text = format!(
        "{tv}: {geometry:?}, family {class:?}, f = {}, {} vertices at radius {radius}\n",
        tv.curvature_f(),
        ball.len()
    );
    let mut t = Table::new(&["check", "count", "expected", "result"]);
    let mut passed = true;
    if s.check_l95 {
        let len = steps.unwrap_or(14);
        let cycles = ball.enumerate_cycles_up_to(len, 10_000_000)?;
        let rep = check_l95_l96(&map, tv, &cycles);
        let anchor = "tiling.turns";
        t.push(anchor, vec!["cycles".into(), rep.checked.to_string(), cycles.len().to_string(), pass(rep.skipped == 0).into()]);
        t.push(anchor, vec!["identity".into(), rep.identity_failures.len().to_string(), "0".into(), pass(rep.identity_failures.is_empty()).into()]);
        let bound = rep.bound.map(|b| b.to_string()).unwrap_or_default();
        let min = rep.min_rho.map(|b| b.to_string()).unwrap_or_default();
        t.push(anchor, vec!["min_rho".into(), min, bound, pass(rep.bound_failures.is_empty()).into()]);
        passed &= rep.passed() && rep.skipped == 0;
    }
    if let Some(case) = s.inject.as_deref() {
        let n = need(steps, "--steps")?;
        let anchor = format!("tiling.{case}");
        match case {
            "caseA" | "caseB" | "caseD" => {
                let (walks, balance, extra): (Vec<_>, i64, Option<usize>) = match case {
                    "caseA" => {
                        let w = case_a_injection(&ball, &map, tv, n)?;
                        let bal = w.iter().map(|(_, ts)| max_window_balance(&ts.turns.iter().map(|&x| Some(x)).collect::<Vec<_>>())).max().unwrap_or(0);
                        (w.into_iter().map(|(w, ts)| (w, ts.path().to_vec())).collect(), bal, None)
                    }
                    "caseB" => {
                        let w = case_b_injection(&ball, &map, tv, n)?;
                        let bal = w.iter().map(|(_, c)| max_window_balance(&c.contracted)).max().unwrap_or(0);
                        (w.into_iter().map(|(w, c)| (w, c.path)).collect(), bal, None)
                    }
                    _ => {
                        let w = case_d_injection(&ball, &map, tv, n)?;
                        let bal = w.iter().map(|(_, m)| max_window_balance(&m.contracted)).max().unwrap_or(0);
                        let run = w.iter().map(|(_, m)| m.longest_small_run()).max().unwrap_or(0);
                        // midpoint walks are checked in the subdivided graph
                        subdivide_edges(&ball)?;
                        (w.into_iter().map(|(w, m)| (w, m.midpoints)).collect(), bal, Some(run))
                    }
                };
                let rep = height::verify_injection(&walks);
                injection_rows(&mut t, &anchor, &rep, n);
                let limit = if case == "caseA" { String::new() } else { "1".into() };
                t.push(&anchor, vec!["window_balance".into(), balance.to_string(), limit, pass(balance <= 1 || case == "caseA").into()]);
                if let Some(run) = extra {
                    t.push(&anchor, vec!["small_run".into(), run.to_string(), "3".into(), pass(run <= 3).into()]);
                    passed &= run <= 3;
                }
                passed &= injection_ok(&rep, n) && (balance <= 1 || case == "caseA");
            }
            "caseC" => {
                let hg = hexagon_graph(&ball, &map)?;
                let walks = hexagon_saws(&ball, &hg, n)?;
                let rep = case_c_family(&ball, &map, &hg, &walks, true)?;
                t.push(&anchor, vec!["hexagon_walks".into(), rep.hexagon_walks.to_string(), String::new(), "PASS".into()]);
                t.push(&anchor, vec!["lifts".into(), rep.lifts.to_string(), String::new(), pass(rep.non_saw == 0).into()]);
                t.push(&anchor, vec!["distinct".into(), rep.lifts.to_string(), String::new(), pass(rep.distinct != Some(false)).into()]);
                t.push(&anchor, vec!["length_sets".into(), rep.bad_length_sets.to_string(), "0".into(), pass(rep.bad_length_sets == 0).into()]);
                passed &= rep.passed();
            }
            other => return Err(CliError::Config(format!("unknown injection `{other}`; expected caseA, caseB, caseC or caseD"))),
        }
    }
    text += &t.render();
    text += &format!("overall: {}\n", pass(passed));
    Ok(Outcome { text, table: Some(t), passed })
}

pub fn grigorchuk(s: &Settings) -> Result<Outcome, CliError> {
    let mut t = Table::new(&["check", "n", "value", "result"]);
    let mut passed = true;
    let mut any = false;
    if let Some(r) = s.ball {
        any = true;
        let cb = cayley_ball(r)?;
        let girth = cb.ball.girth_within();
        t.push("grigorchuk.cayley", vec!["vertices".into(), r.to_string(), cb.ball.len().to_string(), "PASS".into()]);
        let ok = r < 2 || girth == Some(4);
        t.push("grigorchuk.cayley", vec!["girth".into(), r.to_string(), girth.map(|g| g.to_string()).unwrap_or_default(), pass(ok).into()]);
        passed &= ok;
    }
    if let Some(r) = s.schreier {
        any = true;
        let sb = schreier_ball(r)?;
        let loops = sb.edges.iter().filter(|e| e.0 == e.1).count();
        t.push("grigorchuk.schreier", vec!["vertices".into(), r.to_string(), sb.vertices.len().to_string(), "PASS".into()]);
        t.push("grigorchuk.schreier", vec!["loops".into(), r.to_string(), loops.to_string(), "PASS".into()]);
    }
    if let Some(n) = s.verify_lifts {
        any = true;
        let cb = cayley_ball(n.max(1))?;
        for k in 2..=n {
            let words = generate_wa_prime(k)?;
            let rep = lift_and_verify(&words, &cb)?;
            let ok = rep.all_saw && rep.distinct;
            t.push("grigorchuk.lifts", vec!["lifts".into(), k.to_string(), rep.words.to_string(), pass(ok).into()]);
            passed &= ok;
        }
    }
    if s.z_check {
        any = true;
        let (z1, z2) = z_bound_check();
        let ok2 = (z2 - 1.0).abs() <= 1e-12;
        t.push("grigorchuk.z", vec!["z1".into(), real(1.0 / PHI), real(z1), pass(z1 > 1.0).into()]);
        t.push("grigorchuk.z", vec!["z2".into(), real(1.0 / PHI), real(z2), pass(ok2).into()]);
        passed &= z1 > 1.0 && ok2;
    }
    if !any {
        return Err(CliError::Config("grigorchuk needs one of --ball, --schreier, --verify-lifts, --z-check".into()));
    }
    let text = t.render() + &format!("overall: {}\n", pass(passed));
    Ok(Outcome { text, table: Some(t), passed })
}

/// Per-family summary: counts, injection verdicts and equation bounds.
pub fn report(s: &Settings) -> Result<Outcome, CliError> {
    let n = s.steps.unwrap_or(20);
    let mut t = Table::new(&["family", "n", "sigma_n", "eta_n", "ratio", "check", "bound"]);
    let mut passed = true;
    let bound = |name: &str| -> Result<String, CliError> {
        let eq = named_equations().into_iter().find(|(k, _)| *k == name).map(|(_, e)| e);
        Ok(real(solve(&need(eq, name)?)?.value))
    };
    let eta_n = eta(n).to_string();
    for (fam, check, b) in [
        ("tree", String::new(), String::new()),
        ("ladder", String::new(), bound("recurrence_a")?),
        ("twisted_ladder", String::new(), bound("twisted_ladder")?),
        ("hexagonal", String::new(), real((2.0 + 2f64.sqrt()).sqrt())),
    ] {
        let f: Family = fam.parse()?;
        let series = count_saws(&f.build(n)?, n)?;
        let est = estimate_mu(&series)?;
        let check = if fam == "hexagonal" {
            let (ball, h, _) = height_family(&f, n + 4)?;
            let rep = height::verify_injection(&build_injection(&ball, &h, n)?);
            passed &= injection_ok(&rep, n);
            format!("injection {}", pass(injection_ok(&rep, n)))
        } else {
            check
        };
        let eta_cell = if fam == "hexagonal" { eta_n.clone() } else { String::new() };
        t.push(&format!("report.{fam}"), vec![fam.into(), n.to_string(), series.counts[n].to_string(), eta_cell, format!("{:.3}", est.ratio[n - 1]), check, b]);
    }
    let (_, z2) = z_bound_check();
    let cb = cayley_ball(n)?;
    let lifts = lift_and_verify(&generate_wa_prime(n)?, &cb)?;
    let ok = lifts.all_saw && lifts.distinct && (z2 - 1.0).abs() <= 1e-12;
    passed &= ok;
    t.push(
        "report.grigorchuk",
        vec!["grigorchuk".into(), n.to_string(), String::new(), lifts.words.to_string(), String::new(), format!("Z2(1/phi) = {z2:.3}, lifts {}", pass(ok)), real(PHI)],
    );
    for (name, label) in [("g3_lower", "girth 3 lower"), ("g3_upper", "girth 3 upper"), ("g4_lower", "girth 4 lower"), ("g4_upper", "girth 4 upper")] {
        t.push(&format!("report.{name}"), vec![label.into(), String::new(), String::new(), String::new(), String::new(), String::new(), bound(name)?]);
    }
    let text = t.render() + &format!("overall: {}\n", pass(passed));
    Ok(Outcome { text, table: Some(t), passed })
}
