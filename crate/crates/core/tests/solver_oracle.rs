//! Randomized cross-checks of the search against exhaustive enumeration.

use pcmax::bounds::{compute_bounds, lpt, trivial_lower_bound, Bounds};
use pcmax::budget::Budget;
use pcmax::instance::{brute_force_optimum, Instance};
use pcmax::ret::compute_irrelevance;
use pcmax::rng::SplitMix64;
use pcmax::solver::{solve_decision, solve_optimal, DecisionOutcome, Preset, SolverConfig};

fn random_instance(rng: &mut SplitMix64) -> Instance {
    let n = 1 + rng.index(10);
    let m = 2 + rng.index(3);
    let weights: Vec<i64> = (0..n).map(|_| 1 + rng.below(30) as i64).collect();
    Instance::normalize(&weights, m).unwrap().0
}

fn loose_bounds(instance: &Instance) -> Bounds {
    let witness = lpt(instance);
    Bounds {
        lower: trivial_lower_bound(instance),
        upper: witness.makespan(),
        witness: Some(witness),
    }
}

#[test]
fn every_preset_matches_the_exhaustive_optimum() {
    let mut rng = SplitMix64::new(0x5EED);
    for case in 0..150 {
        let instance = random_instance(&mut rng);
        let (expected, _) = brute_force_optimum(&instance).unwrap();
        for preset in Preset::ALL {
            let result = solve_optimal(&instance, &loose_bounds(&instance), &preset.config());
            assert_eq!(
                result.makespan,
                expected,
                "case {case}: preset {} on {:?} x{}",
                preset.name(),
                instance.weights(),
                instance.machines()
            );
            assert_eq!(result.schedule.makespan(), result.makespan);
        }
    }
}

#[test]
fn toggling_any_single_rule_never_changes_the_optimum() {
    let mut rng = SplitMix64::new(0xAB1E);
    let toggles: [fn(&mut SolverConfig); 7] = [
        |c| c.base_rules = false,
        |c| c.equal_duration_rule = false,
        |c| c.equivalence_rule = false,
        |c| c.fill_up_rule = false,
        |c| c.fill_up_shortcut = false,
        |c| c.irrelevance = false,
        |c| c.state_memo = false,
    ];
    for _ in 0..40 {
        let instance = random_instance(&mut rng);
        let (expected, _) = brute_force_optimum(&instance).unwrap();
        for toggle in toggles {
            let mut config = Preset::Cdsm.config();
            toggle(&mut config);
            let result = solve_optimal(&instance, &loose_bounds(&instance), &config);
            assert_eq!(
                result.makespan,
                expected,
                "toggled config {config:?} on {:?} x{}",
                instance.weights(),
                instance.machines()
            );
        }
        // The two-duration program is off by default; turning it on must
        // agree as well.
        let mut config = Preset::Cdsm.config();
        config.two_duration_dp = true;
        let result = solve_optimal(&instance, &loose_bounds(&instance), &config);
        assert_eq!(result.makespan, expected);
    }
}

#[test]
fn decision_answers_match_the_exhaustive_optimum() {
    let mut rng = SplitMix64::new(0xDEC1);
    for _ in 0..60 {
        let instance = random_instance(&mut rng);
        let (optimum, _) = brute_force_optimum(&instance).unwrap();
        for bound in optimum.saturating_sub(2)..=optimum + 2 {
            let result = solve_decision(&instance, bound, &Preset::Cdsm.config());
            match result.outcome {
                DecisionOutcome::Feasible(schedule) => {
                    assert!(bound >= optimum, "claimed feasible below the optimum");
                    assert!(schedule.makespan() <= bound);
                }
                DecisionOutcome::Infeasible => {
                    assert!(bound < optimum, "claimed infeasible at {bound} >= {optimum}");
                }
                DecisionOutcome::Timeout => panic!("unlimited budget timed out"),
            }
        }
    }
}

#[test]
fn bounds_always_bracket_the_optimum() {
    let mut rng = SplitMix64::new(0xB0DE);
    let solver = |sub: &Instance, _: Budget| brute_force_optimum(sub).ok().map(|(c, _)| c);
    for _ in 0..80 {
        let instance = random_instance(&mut rng);
        let (optimum, _) = brute_force_optimum(&instance).unwrap();
        let bounds = compute_bounds(&instance, Budget::Units(2_000), 9, Some(&solver));
        assert!(bounds.lower <= optimum);
        assert!(bounds.upper >= optimum);
        let witness = bounds.witness.expect("pipeline always returns a witness");
        assert_eq!(witness.makespan(), bounds.upper);
    }
}

#[test]
fn dropping_irrelevant_jobs_preserves_feasibility() {
    let mut rng = SplitMix64::new(0x1DEA);
    for _ in 0..50 {
        let instance = random_instance(&mut rng);
        let (optimum, _) = brute_force_optimum(&instance).unwrap();
        let upper = lpt(&instance).makespan();
        for bound in trivial_lower_bound(&instance)..=upper {
            let rho = compute_irrelevance(&instance, bound);
            let reduced_feasible = if rho == 0 {
                true
            } else {
                let reduced =
                    Instance::from_sorted(instance.weights()[..rho].to_vec(), instance.machines())
                        .unwrap();
                brute_force_optimum(&reduced).unwrap().0 <= bound
            };
            assert_eq!(
                reduced_feasible,
                optimum <= bound,
                "bound {bound} rho {rho} on {:?} x{}",
                instance.weights(),
                instance.machines()
            );
        }
    }
}
