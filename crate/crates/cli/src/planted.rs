//! Planted benchmark instances with a known optimum.
//!
//! Construction: start from `m` jobs of duration `u`, one per machine. Draw
//! a machine and a time `t` in `[0, u)` uniformly and cut the piece spanning
//! `t` into two; draws landing on an existing piece boundary are redrawn so
//! no zero-length job appears. Repeat until `n` jobs exist, then add 1 to
//! `ceil(r * n)` distinct jobs chosen uniformly. For `r = 0` the pieces of
//! each machine sum to exactly `u`, so the planted schedule is feasible and
//! the average-load bound forces the optimum to be exactly `u`.

use pcmax::instance::Instance;
use pcmax::rng::SplitMix64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlantedError {
    #[error("need jobs >= machines >= 1 and a positive optimum")]
    BadParameters,
    #[error("{jobs} jobs cannot be cut from {machines} machines of length {optimum}")]
    Unsatisfiable {
        jobs: usize,
        machines: usize,
        optimum: u64,
    },
    #[error("increment ratio must be a decimal in [0, 1]")]
    BadRatio,
}

/// An exact rational in `[0, 1]`, parsed from a decimal literal, so that
/// `ceil(r * n)` is computed without floating-point surprises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    numerator: u64,
    denominator: u64,
}

impl Ratio {
    pub const ZERO: Ratio = Ratio {
        numerator: 0,
        denominator: 1,
    };

    /// Parses `"0"`, `"1"`, `"0.01"`, `".5"`, ...
    pub fn parse(text: &str) -> Result<Ratio, PlantedError> {
        let (whole, frac) = match text.split_once('.') {
            Some((w, f)) => (w, f),
            None => (text, ""),
        };
        if (whole.is_empty() && frac.is_empty())
            || !whole.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(PlantedError::BadRatio);
        }
        let whole: u64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| PlantedError::BadRatio)?
        };
        let denominator = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| PlantedError::BadRatio)?
        };
        let numerator = whole
            .checked_mul(denominator)
            .and_then(|w| w.checked_add(frac))
            .ok_or(PlantedError::BadRatio)?;
        if numerator > denominator {
            return Err(PlantedError::BadRatio);
        }
        Ok(Ratio {
            numerator,
            denominator,
        })
    }

    /// `ceil(self * n)`, exactly.
    pub fn ceil_mul(&self, n: u64) -> u64 {
        (self.numerator * n).div_ceil(self.denominator)
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.numerator == 0 {
            return write!(f, "0");
        }
        if self.numerator == self.denominator {
            return write!(f, "1");
        }
        let digits = self.denominator.ilog10() as usize;
        write!(f, "0.{:0width$}", self.numerator, width = digits)
    }
}

#[derive(Debug, Clone)]
pub struct PlantedParams {
    pub jobs: usize,
    pub machines: usize,
    pub optimum: u64,
    pub increment_ratio: Ratio,
    pub seed: u64,
}

/// Generates one planted instance; deterministic per seed.
pub fn generate_planted(params: &PlantedParams) -> Result<Instance, PlantedError> {
    let PlantedParams {
        jobs,
        machines,
        optimum,
        increment_ratio,
        seed,
    } = *params;
    if machines == 0 || jobs < machines || optimum == 0 {
        return Err(PlantedError::BadParameters);
    }
    // Integer cut points mean at most `optimum` pieces per machine.
    if jobs as u64 > machines as u64 * optimum {
        return Err(PlantedError::Unsatisfiable {
            jobs,
            machines,
            optimum,
        });
    }

    let mut rng = SplitMix64::new(seed);
    let mut cuts: Vec<Vec<u64>> = vec![Vec::new(); machines];
    let mut pieces = machines;
    while pieces < jobs {
        let machine = rng.index(machines);
        let t = rng.below(optimum);
        if t == 0 || cuts[machine].contains(&t) {
            continue; // boundary hit: redraw
        }
        cuts[machine].push(t);
        pieces += 1;
    }

    let mut weights: Vec<u64> = Vec::with_capacity(jobs);
    for machine_cuts in &mut cuts {
        machine_cuts.sort_unstable();
        let mut previous = 0;
        for &cut in machine_cuts.iter() {
            weights.push(cut - previous);
            previous = cut;
        }
        weights.push(optimum - previous);
    }
    debug_assert_eq!(weights.len(), jobs);

    let increments = increment_ratio.ceil_mul(jobs as u64) as usize;
    for job in rng.distinct_indices(jobs, increments.min(jobs)) {
        weights[job] += 1;
    }

    let raw: Vec<i64> = weights.iter().map(|&w| w as i64).collect();
    let (instance, _) = Instance::normalize(&raw, machines).expect("pieces are positive");
    Ok(instance)
}

/// The job-to-machine ratios used by the sweep generator.
pub const SWEEP_RATIOS: [(u64, u64); 7] = [(2, 1), (5, 2), (3, 1), (7, 2), (4, 1), (9, 2), (5, 1)];

#[cfg(test)]
mod tests {
    use super::*;
    use pcmax::instance::brute_force_optimum;

    fn params(jobs: usize, machines: usize, optimum: u64, r: &str, seed: u64) -> PlantedParams {
        PlantedParams {
            jobs,
            machines,
            optimum,
            increment_ratio: Ratio::parse(r).unwrap(),
            seed,
        }
    }

    #[test]
    fn ratio_parsing_is_exact() {
        assert_eq!(Ratio::parse("0").unwrap().ceil_mul(100), 0);
        assert_eq!(Ratio::parse("0.01").unwrap().ceil_mul(100), 1);
        assert_eq!(Ratio::parse("0.01").unwrap().ceil_mul(101), 2);
        assert_eq!(Ratio::parse("0.05").unwrap().ceil_mul(10), 1);
        assert_eq!(Ratio::parse("1").unwrap().ceil_mul(7), 7);
        assert!(Ratio::parse("1.5").is_err());
        assert!(Ratio::parse("x").is_err());
        assert_eq!(Ratio::parse("0.25").unwrap().to_string(), "0.25");
    }

    #[test]
    fn zero_cuts_yield_uniform_jobs() {
        let instance = generate_planted(&params(3, 3, 50, "0", 9)).unwrap();
        assert_eq!(instance.weights(), &[50, 50, 50]);
    }

    #[test]
    fn construction_invariants_hold() {
        for seed in 0..50 {
            let p = params(13, 4, 37, "0.1", seed);
            let instance = generate_planted(&p).unwrap();
            assert_eq!(instance.jobs(), 13);
            assert!(instance.weights().iter().all(|&w| w >= 1));
            let expected_total = 4 * 37 + Ratio::parse("0.1").unwrap().ceil_mul(13);
            assert_eq!(instance.total_work(), expected_total);
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let a = generate_planted(&params(11, 3, 29, "0.05", 7)).unwrap();
        let b = generate_planted(&params(11, 3, 29, "0.05", 7)).unwrap();
        assert_eq!(a, b);
        let c = generate_planted(&params(11, 3, 29, "0.05", 8)).unwrap();
        assert_ne!(a, c, "different seeds should differ on this size");
    }

    #[test]
    fn unplanted_increments_keep_the_planted_optimum_at_zero_ratio() {
        for seed in 0..10 {
            let instance = generate_planted(&params(9, 3, 20, "0", seed)).unwrap();
            let (optimum, _) = brute_force_optimum(&instance).unwrap();
            assert_eq!(optimum, 20);
        }
    }

    #[test]
    fn too_many_jobs_are_rejected() {
        assert_eq!(
            generate_planted(&params(7, 2, 3, "0", 1)).unwrap_err(),
            PlantedError::Unsatisfiable {
                jobs: 7,
                machines: 2,
                optimum: 3
            }
        );
        assert_eq!(
            generate_planted(&params(2, 3, 5, "0", 1)).unwrap_err(),
            PlantedError::BadParameters
        );
    }
}
