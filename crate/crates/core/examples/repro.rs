use pcmax::bounds::{lpt, trivial_lower_bound, Bounds};
use pcmax::instance::{brute_force_optimum, Instance};
use pcmax::solver::{solve_optimal, Preset, SolverConfig};
use pcmax::budget::Budget;
use pcmax::ret::DEFAULT_MEMORY_CAP;

fn main() {
    let instance = Instance::from_sorted(vec![29, 29, 27, 25, 20, 20, 18, 10, 10, 8], 4).unwrap();
    let (expected, _) = brute_force_optimum(&instance).unwrap();
    println!("brute force: {expected}");
    let witness = lpt(&instance);
    println!("trivial {} lpt {}", trivial_lower_bound(&instance), witness.makespan());
    let bounds = || Bounds { lower: trivial_lower_bound(&instance), upper: witness.makespan(), witness: Some(witness.clone()) };
    for preset in Preset::ALL {
        let result = solve_optimal(&instance, &bounds(), &preset.config());
        println!("{:>5}: makespan {}", preset.name(), result.makespan);
    }
    // bisect: r6 flags = base + r5 + equivalence; try equivalence without base rules
    let combos: [(&str, SolverConfig); 4] = [
        ("equiv only", SolverConfig { base_rules: false, equal_duration_rule: false, equivalence_rule: true, fill_up_rule: false, fill_up_shortcut: false, irrelevance: false, state_memo: false, two_duration_dp: false, budget: Budget::Unlimited, state_memo_cap: 1 << 20, ret_memory_cap: DEFAULT_MEMORY_CAP }),
        ("base+equiv", SolverConfig { base_rules: true, equal_duration_rule: false, equivalence_rule: true, fill_up_rule: false, fill_up_shortcut: false, irrelevance: false, state_memo: false, two_duration_dp: false, budget: Budget::Unlimited, state_memo_cap: 1 << 20, ret_memory_cap: DEFAULT_MEMORY_CAP }),
        ("base+r5", SolverConfig { base_rules: true, equal_duration_rule: true, equivalence_rule: false, fill_up_rule: false, fill_up_shortcut: false, irrelevance: false, state_memo: false, two_duration_dp: false, budget: Budget::Unlimited, state_memo_cap: 1 << 20, ret_memory_cap: DEFAULT_MEMORY_CAP }),
        ("r5+equiv", SolverConfig { base_rules: false, equal_duration_rule: true, equivalence_rule: true, fill_up_rule: false, fill_up_shortcut: false, irrelevance: false, state_memo: false, two_duration_dp: false, budget: Budget::Unlimited, state_memo_cap: 1 << 20, ret_memory_cap: DEFAULT_MEMORY_CAP }),
    ];
    for (name, config) in combos {
        let result = solve_optimal(&instance, &bounds(), &config);
        println!("{name}: makespan {}", result.makespan);
    }
}
