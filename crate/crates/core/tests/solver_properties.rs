use coneinf::generate::generate_normal;
use coneinf::oracle::subgradient_oracle;
use coneinf::reductions::{min_enclosing_ball, min_intersecting_ball, BallMode};
use coneinf::solver::check_spair;
use coneinf::{kkt_check, solve, Ball, Instance, PivotRule, SolverConfig, SupportState};
use proptest::prelude::*;

fn configs() -> Vec<SolverConfig> {
    vec![
        SolverConfig::default(),
        SolverConfig { pivot_rule: PivotRule::FirstViolated, ..SolverConfig::default() },
        SolverConfig { use_two_point_shortcut: false, ..SolverConfig::default() },
        SolverConfig { refactor_every: 1, ..SolverConfig::default() },
    ]
}

#[test]
fn configurations_agree_on_random_instances() {
    for seed in 0..60 {
        let n = 2 + (seed as usize % 6);
        let inst = generate_normal(n, 15 + 5 * (seed as usize % 7), seed).unwrap();
        let reference = solve(&inst, &SolverConfig::default()).unwrap();
        for cfg in configs() {
            let res = solve(&inst, &cfg).unwrap();
            assert!((res.x0() - reference.x0()).abs() <= 1e-9 * inst.scale(), "seed {seed}, {cfg:?}");
            assert!(kkt_check(&inst, &res.x_star, &res.dual, 1e-7).passed);
            assert!(res.stats.spair_updates >= res.stats.major_iterations);
            assert!(res.support.len() <= n);
        }
    }
}

#[test]
fn final_pair_is_dual_feasible() {
    for seed in 100..140 {
        let inst = generate_normal(5, 40, seed).unwrap();
        let res = solve(&inst, &SolverConfig::default()).unwrap();
        let state = SupportState::new(&inst, res.support.clone(), res.x_star.clone()).unwrap();
        let report = check_spair(&inst, &state);
        assert!(report.is_valid(inst.scale(), 1e-9, -1e-9, 1e-12), "seed {seed}: {report:?}");
    }
}

#[test]
fn solver_dominates_subgradient_bound() {
    for seed in 0..10 {
        let inst = generate_normal(3, 8, 500 + seed).unwrap();
        let res = solve(&inst, &SolverConfig::default()).unwrap();
        let (bound, x) = subgradient_oracle(&inst, 20_000, seed);
        assert!(bound <= res.x0() + 1e-9);
        assert!(bound >= res.x0() - 1e-2);
        assert_eq!(x.height, bound);
    }
}

#[test]
fn large_and_shifted_coordinates() {
    // translating every point by a common offset translates the apex
    let base = generate_normal(4, 30, 9).unwrap();
    let shift = [1e4, -3e4, 2e4, 5e3];
    let rows: Vec<Vec<f64>> = base
        .points()
        .iter()
        .map(|p| p.coords().iter().zip(shift).map(|(c, s)| c + s).collect())
        .collect();
    let moved = Instance::from_rows(&rows).unwrap();
    let a = solve(&base, &SolverConfig::default()).unwrap();
    let b = solve(&moved, &SolverConfig::default()).unwrap();
    assert!((b.x0() - a.x0() - shift[0]).abs() <= 1e-9 * moved.scale());
    assert!(kkt_check(&moved, &b.x_star, &b.dual, 1e-7).passed);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enclosing_ball_contains_inputs(
        raw in prop::collection::vec((0.0..2.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64), 1..12)
    ) {
        let balls: Vec<Ball> = raw.iter().map(|&(r, x, y, z)| Ball::from_slice(&[x, y, z], r)).collect();
        let res = min_enclosing_ball(&balls, &SolverConfig::default()).unwrap();
        prop_assert_eq!(res.mode, BallMode::Enclosing);
        prop_assert!(res.support_indices.len() <= 4);
        let scale = res.solution.x_star.norm().max(1.0) * 10.0;
        for (i, b) in balls.iter().enumerate() {
            let gap = (&b.center - &res.ball.center).norm() + b.radius - res.ball.radius;
            prop_assert!(gap <= 1e-9 * scale);
            if res.support_indices.contains(&i) {
                prop_assert!(gap.abs() <= 1e-8 * scale);
            }
        }
    }

    #[test]
    fn intersecting_ball_meets_inputs(
        raw in prop::collection::vec((0.0..2.0f64, -5.0..5.0f64, -5.0..5.0f64), 1..12)
    ) {
        let balls: Vec<Ball> = raw.iter().map(|&(r, x, y)| Ball::from_slice(&[x, y], r)).collect();
        let res = min_intersecting_ball(&balls, &SolverConfig::default()).unwrap();
        for b in &balls {
            let d = (&b.center - &res.ball.center).norm();
            match res.mode {
                BallMode::Intersecting => prop_assert!(d <= b.radius + res.ball.radius + 1e-8),
                BallMode::Enclosed => prop_assert!(d + res.ball.radius <= b.radius + 1e-8),
                other => prop_assert!(false, "unexpected mode {:?}", other),
            }
        }
    }
}
