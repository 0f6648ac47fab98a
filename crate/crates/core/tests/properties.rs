use num_bigint::BigUint;
use proptest::prelude::*;

use sawlab::fisher::{fisher_mu_bounds, solve, GrowthEquation};
use sawlab::graph::rooted_isomorphic;
use sawlab::grigorchuk::{act, cayley_ball, is_identity, GrigorchukWord};
use sawlab::height::{arch_4_6_12_height, build_injection, check_conditions, hexagonal_height, verify_injection};
use sawlab::lattices::{build_free_product, build_ladder, build_periodic, build_tree, build_twisted_ladder, FreeProductSpec};
use sawlab::saw::{count_saws, count_saws_serial, estimate_mu, eta};
use sawlab::tlf::{case_a_injection, check_l95_l96, generate_tiling, max_window_balance, TypeVector};
use sawlab::GraphBall;

const TILINGS: [&str; 7] = ["6,6,6", "4,8,8", "4,6,12", "7,7,7", "4,8,10", "5,8,8", "5,10,10"];

fn family(i: usize, r: usize) -> GraphBall {
    match i % 15 {
        0 => build_tree(3, r).unwrap(),
        1 => build_ladder(2 * r + 2, true).unwrap(),
        2 => build_twisted_ladder(2 * r + 4).unwrap(),
        3 => build_periodic("hexagonal", r).unwrap().ball,
        4 => build_periodic("arch_4_8_8", r).unwrap().ball,
        5 => build_periodic("arch_4_6_12", r).unwrap().ball,
        6 => build_free_product(FreeProductSpec { d: 3, g: 4 }, r).unwrap().0,
        7..=13 => generate_tiling(TILINGS[i % 15 - 7].parse().unwrap(), r).unwrap().0,
        _ => cayley_ball(r).unwrap().ball,
    }
}

/// Copy of `g` rooted at `v`.
fn reroot(g: &GraphBall, v: usize) -> GraphBall {
    let adj = (0..g.len()).map(|u| g.neighbors(u).to_vec()).collect();
    GraphBall::new(v, adj, g.complete_flags().to_vec(), g.declared_degree()).unwrap()
}

fn reduced_word() -> impl Strategy<Value = Vec<u8>> {
    (any::<bool>(), prop::collection::vec(0u8..3, 0..10), 0usize..2).prop_map(|(a_first, xs, tail)| {
        let mut w = Vec::new();
        for (i, x) in xs.iter().enumerate() {
            let bcd = b"bcd"[*x as usize];
            if a_first || i > 0 {
                w.push(b'a');
            }
            w.push(bcd);
        }
        if tail == 1 && w.last() != Some(&b'a') {
            w.push(b'a');
        }
        w
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn builders_validate(i in 0usize..15, r in 1usize..6) {
        let g = family(i, r);
        prop_assert!(g.validate().is_ok());
        if let Some(d) = g.declared_degree() {
            for v in (0..g.len()).filter(|&v| g.is_complete(v)) {
                prop_assert_eq!(g.degree(v), d);
            }
        }
    }

    #[test]
    fn triangle_inequality(i in 0usize..15, seeds in prop::collection::vec(any::<u32>(), 3)) {
        let g = family(i, 4);
        let [a, b, c] = [0, 1, 2].map(|k| seeds[k] as usize % g.len());
        let d = |x, y| g.distance(x, y).unwrap();
        prop_assert!(d(a, c) <= d(a, b) + d(b, c));
        prop_assert_eq!(d(a, b), d(b, a));
    }

    #[test]
    fn cycles_are_canonical_and_unique(i in 0usize..15, len in 3usize..9) {
        let g = family(i, 4);
        let cycles = g.enumerate_cycles_up_to(len, 1_000_000).unwrap();
        let mut seen = std::collections::HashSet::new();
        for c in &cycles {
            prop_assert_eq!(&c.canonical(), c);
            prop_assert_eq!(&c.reversed().canonical(), c);
            prop_assert!(seen.insert(c.vertices.clone()));
        }
    }

    #[test]
    fn free_product_growth_is_monotone(d in 3usize..5, g in 3usize..6, r in 1usize..4) {
        let spec = FreeProductSpec { d, g };
        let (small, _) = build_free_product(spec, r).unwrap();
        let (big, _) = build_free_product(spec, r + 1).unwrap();
        let (cut, _) = big.induced_ball(r).unwrap();
        prop_assert!(rooted_isomorphic(&cut, &small));
    }

    #[test]
    fn periodic_translation(k in 0usize..3, dir in 0usize..2, r in 2usize..5) {
        let name = ["hexagonal", "arch_4_8_8", "arch_4_6_12"][k];
        let pb = build_periodic(name, r + 6).unwrap();
        let cell = if dir == 0 { [1, 0] } else { [0, 1] };
        let v = pb.sites.iter().position(|&(c, i)| c == cell && i == 0).unwrap();
        let (moved, _) = reroot(&pb.ball, v).induced_ball(r).unwrap();
        let (home, _) = pb.ball.induced_ball(r).unwrap();
        prop_assert!(rooted_isomorphic(&moved, &home));
    }

    #[test]
    fn height_injections(which in 0usize..2, n in 1usize..12) {
        let name = ["hexagonal", "arch_4_6_12"][which];
        let pb = build_periodic(name, n + 4).unwrap();
        let h = if which == 0 { hexagonal_height(&pb) } else { arch_4_6_12_height(&pb) }.unwrap();
        let cond = check_conditions(&pb.ball, &h, [6, 4][which], None).unwrap();
        prop_assert!(cond.eq1 && cond.eq2 && cond.consequences);
        let rep = verify_injection(&build_injection(&pb.ball, &h, n).unwrap());
        prop_assert!(rep.passed());
        prop_assert_eq!(BigUint::from(rep.count), eta(n));
        let sigma = &count_saws(&pb.ball, n).unwrap().counts[n];
        prop_assert!(*sigma >= eta(n));
    }

    #[test]
    fn parallel_matches_serial(i in 0usize..15, n in 1usize..9) {
        let g = family(i, n);
        prop_assert_eq!(count_saws(&g, n).unwrap(), count_saws_serial(&g, n).unwrap());
    }

    #[test]
    fn counts_do_not_depend_on_radius(i in 0usize..15, n in 1usize..8, extra in 0usize..3) {
        let a = count_saws(&family(i, n), n).unwrap();
        let b = count_saws(&family(i, n + extra), n).unwrap();
        prop_assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn residuals_recomputed(mu in 1.05f64..2.0, d in 3u32..8) {
        let r = fisher_mu_bounds(mu, d).unwrap();
        let eq = if d == 3 {
            GrowthEquation::Fisher3 { mu_g: mu }
        } else if d % 2 == 0 {
            GrowthEquation::FisherEven { r: d / 2, mu_g: mu }
        } else {
            GrowthEquation::FisherOdd { r: d / 2, mu_g: mu }
        };
        prop_assert!(eq.eval(r.root).unwrap().abs() <= 1e-12);
        let case_c = GrowthEquation::CaseC { mu_p: mu };
        let c = solve(&case_c).unwrap();
        prop_assert!(case_c.eval(c.root).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn fisher_bound_increases(a in 1.01f64..2.0, b in 1.01f64..2.0, d in 3u32..7) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(fisher_mu_bounds(lo, d).unwrap().value < fisher_mu_bounds(hi, d).unwrap().value);
    }

    #[test]
    fn tiling_is_deterministic(k in 0usize..7, r in 1usize..6) {
        let t: TypeVector = TILINGS[k].parse().unwrap();
        let (g1, m1) = generate_tiling(t, r).unwrap();
        let (g2, m2) = generate_tiling(t, r).unwrap();
        prop_assert_eq!(g1.to_text(), g2.to_text());
        for v in 0..m1.len() {
            prop_assert_eq!(m1.rotation(v), m2.rotation(v));
            prop_assert_eq!(m1.corners(v), m2.corners(v));
        }
    }

    #[test]
    fn turn_identity_on_every_cycle(k in 3usize..7, r in 4usize..7) {
        let t: TypeVector = TILINGS[k].parse().unwrap();
        let (g, map) = generate_tiling(t, r).unwrap();
        let cycles = g.enumerate_cycles_up_to(10, 1_000_000).unwrap();
        let rep = check_l95_l96(&map, t, &cycles);
        prop_assert!(rep.identity_failures.is_empty());
        prop_assert!(rep.bound_failures.is_empty());
    }

    #[test]
    fn case_a_turn_balance(k in 0usize..2, n in 1usize..11) {
        let t: TypeVector = ["7,7,7", "6,6,6"][k].parse().unwrap();
        let (g, map) = generate_tiling(t, n + 2).unwrap();
        let walks = case_a_injection(&g, &map, t, n).unwrap();
        for (_, ts) in &walks {
            let turns: Vec<_> = ts.turns.iter().map(|&x| Some(x)).collect();
            prop_assert!(max_window_balance(&turns) <= 3);
        }
        let rep = verify_injection(&walks.iter().map(|(w, ts)| (w.clone(), ts.path().to_vec())).collect::<Vec<_>>());
        prop_assert!(rep.passed());
        prop_assert_eq!(BigUint::from(rep.count), eta(n));
    }

    #[test]
    fn cayley_ball_is_cubic(r in 2usize..8) {
        let cb = cayley_ball(r).unwrap();
        for v in (0..cb.ball.len()).filter(|&v| cb.ball.is_complete(v)) {
            prop_assert_eq!(cb.ball.degree(v), 3);
        }
        prop_assert_eq!(cb.ball.girth_within(), Some(4));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn word_times_inverse_is_identity(w in reduced_word()) {
        let mut both = w.clone();
        both.extend(w.iter().rev());
        let g = GrigorchukWord::unreduced(&both).unwrap();
        prop_assert!(is_identity(&g));
        let s: Vec<u8> = (0..12).map(|k| (k * 7 % 3 == 0) as u8).collect();
        prop_assert_eq!(act(&g, &s), s);
        let single = GrigorchukWord::from_letters(&w);
        prop_assert_eq!(is_identity(&single.concat(&single.inverse())), true);
    }
}

#[test]
fn four_regular_free_product_beats_sqrt3() {
    let (g, _) = build_free_product(FreeProductSpec { d: 4, g: 3 }, 12).unwrap();
    let s = count_saws(&g, 12).unwrap();
    let est = estimate_mu(&s).unwrap();
    assert!(est.ratio[11] > 3f64.sqrt() - 0.05, "{}", est.ratio[11]);
}
