//! Dynamic allocation of the per-generation evaluation budget.
//!
//! Each formulation carries a preference `H_k` (initially 0). The softmax of
//! the preferences gives the share `P_k` of next generation's offspring
//! evaluations. After each generation, `C_k` measures relative best-fitness
//! improvement and `H_k += alpha (C_k - P_k sum(C))`.

use crate::error::{invalid, Result};

pub const DEFAULT_ALPHA: f64 = 2.0;
pub const DEFAULT_EPSILON: f64 = 1e-12;
pub const DEFAULT_TREND_CLAMP: f64 = 10.0;

/// `P_k = exp(H_k) / sum_n exp(H_n)`, stabilized by subtracting `max H`.
pub fn softmax_allocation(preferences: &[f64]) -> Result<Vec<f64>> {
    if preferences.is_empty() {
        return invalid("softmax of an empty preference vector");
    }
    if preferences.iter().any(|h| !h.is_finite()) {
        return invalid("preferences must be finite");
    }
    let max = preferences
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = preferences.iter().map(|h| (h - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// `C_k = |prev - curr| / (|curr| + epsilon)`, clamped to `[0, clamp]`.
pub fn convergence_trend(prev_best: f64, curr_best: f64, epsilon: f64, clamp: f64) -> Result<f64> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return invalid(format!("epsilon must be positive, got {epsilon}"));
    }
    if !prev_best.is_finite() || !curr_best.is_finite() {
        return invalid("convergence trend needs finite fitness values");
    }
    let raw = (prev_best - curr_best).abs() / (curr_best.abs() + epsilon);
    Ok(raw.clamp(0.0, clamp))
}

/// `H'_k = H_k + alpha (C_k - P_k sum(C))`.
pub fn update_preferences(
    preferences: &[f64],
    trends: &[f64],
    probabilities: &[f64],
    alpha: f64,
) -> Result<Vec<f64>> {
    if preferences.len() != trends.len() || preferences.len() != probabilities.len() {
        return invalid(format!(
            "length mismatch: |H|={}, |C|={}, |P|={}",
            preferences.len(),
            trends.len(),
            probabilities.len()
        ));
    }
    let total: f64 = trends.iter().sum();
    Ok(preferences
        .iter()
        .zip(trends)
        .zip(probabilities)
        .map(|((h, c), p)| h + alpha * (c - p * total))
        .collect())
}

/// Splits `budget` evaluations according to `probabilities`.
///
/// Largest-remainder rounding (ties to the lower index), then every count is
/// raised to `floor`, taking the difference one unit at a time from the
/// currently largest count.
pub fn allocate_offspring(
    probabilities: &[f64],
    budget: usize,
    floor: usize,
) -> Result<Vec<usize>> {
    let n = probabilities.len();
    if n == 0 {
        return invalid("no formulations to allocate to");
    }
    if floor < 1 {
        return invalid("allocation floor must be at least 1");
    }
    if budget < n * floor {
        return invalid(format!(
            "budget {budget} cannot give {n} formulations at least {floor} each"
        ));
    }
    let quotas: Vec<f64> = probabilities.iter().map(|p| p * budget as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    if assigned <= budget {
        for &k in order.iter().cycle().take(budget - assigned) {
            counts[k] += 1;
        }
    } else {
        // Only reachable through rounding in probabilities that sum above 1.
        for _ in 0..assigned - budget {
            let k = argmax(&counts);
            counts[k] -= 1;
        }
    }
    for k in 0..n {
        while counts[k] < floor {
            counts[k] += 1;
            let donor = argmax(&counts);
            counts[donor] -= 1;
        }
    }
    Ok(counts)
}

fn argmax(counts: &[usize]) -> usize {
    let mut best = 0;
    for (k, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = k;
        }
    }
    best
}

/// Preferences, probabilities and last-seen bests for every formulation.
#[derive(Clone, Debug, PartialEq)]
pub struct AllocationState {
    pub preferences: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub prev_best: Vec<f64>,
    pub alpha: f64,
    pub epsilon: f64,
    pub trend_clamp: f64,
}

impl AllocationState {
    pub fn new(initial_best: Vec<f64>, alpha: f64, epsilon: f64, trend_clamp: f64) -> Result<Self> {
        if [alpha, epsilon, trend_clamp]
            .iter()
            .any(|v| v.is_nan() || *v <= 0.0)
        {
            return invalid("alpha, epsilon and the trend clamp must be positive");
        }
        let n = initial_best.len();
        let preferences = vec![0.0; n];
        let probabilities = softmax_allocation(&preferences)?;
        Ok(Self {
            preferences,
            probabilities,
            prev_best: initial_best,
            alpha,
            epsilon,
            trend_clamp,
        })
    }

    /// Folds one generation's bests into the preferences and recomputes `P`.
    pub fn update(&mut self, curr_best: &[f64]) -> Result<()> {
        if curr_best.len() != self.prev_best.len() {
            return invalid("best-fitness vector has the wrong length");
        }
        let trends = self
            .prev_best
            .iter()
            .zip(curr_best)
            .map(|(&p, &c)| convergence_trend(p, c, self.epsilon, self.trend_clamp))
            .collect::<Result<Vec<f64>>>()?;
        self.preferences =
            update_preferences(&self.preferences, &trends, &self.probabilities, self.alpha)?;
        self.probabilities = softmax_allocation(&self.preferences)?;
        self.prev_best = curr_best.to_vec();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn softmax_examples() {
        assert_eq!(softmax_allocation(&[0.0, 0.0]).unwrap(), vec![0.5, 0.5]);
        for p in softmax_allocation(&[1.0; 5]).unwrap() {
            assert!((p - 0.2).abs() < 1e-15);
        }
        let p = softmax_allocation(&[2f64.ln(), 0.0]).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!(softmax_allocation(&[]).is_err());
    }

    #[test]
    fn softmax_survives_large_preferences() {
        let p = softmax_allocation(&[1000.0, 999.0]).unwrap();
        assert!(p.iter().all(|v| v.is_finite() && *v > 0.0));
    }

    #[test]
    fn trend_examples() {
        assert_eq!(convergence_trend(3.0, 3.0, 1e-12, 10.0).unwrap(), 0.0);
        let c = convergence_trend(10.0, 5.0, 1e-12, 10.0).unwrap();
        assert!((c - 1.0).abs() < 1e-11);
        assert_eq!(convergence_trend(1.0, 0.0, 1e-12, 10.0).unwrap(), 10.0);
        assert!(convergence_trend(f64::NAN, 0.0, 1e-12, 10.0).is_err());
        assert!(convergence_trend(1.0, 0.0, 0.0, 10.0).is_err());
    }

    #[test]
    fn preference_update_examples() {
        let h = update_preferences(&[0.0, 0.0], &[1.0, 0.0], &[0.5, 0.5], 2.0).unwrap();
        assert_eq!(h, vec![1.0, -1.0]);
        let same = update_preferences(&[0.3, -0.1], &[0.0, 0.0], &[0.4, 0.6], 2.0).unwrap();
        assert_eq!(same, vec![0.3, -0.1]);
        assert!(update_preferences(&[0.0], &[0.0, 1.0], &[1.0], 2.0).is_err());
    }

    #[test]
    fn allocation_examples() {
        assert_eq!(allocate_offspring(&[0.25; 4], 100, 2).unwrap(), vec![25; 4]);
        assert_eq!(
            allocate_offspring(&[0.5, 0.3, 0.2], 100, 2).unwrap(),
            vec![50, 30, 20]
        );
        assert_eq!(
            allocate_offspring(&[0.99, 0.005, 0.005], 100, 2).unwrap(),
            vec![96, 2, 2]
        );
        assert!(allocate_offspring(&[0.5, 0.5], 3, 2).is_err());
        assert!(allocate_offspring(&[1.0], 3, 0).is_err());
    }

    #[test]
    fn uniform_equal_trends_is_a_fixed_point() {
        let mut state = AllocationState::new(vec![5.0; 4], 2.0, 1e-12, 10.0).unwrap();
        state.update(&[4.0; 4]).unwrap();
        assert_eq!(state.preferences, vec![0.0; 4]);
        assert_eq!(state.probabilities, vec![0.25; 4]);
    }

    #[test]
    fn improving_formulation_gains_share() {
        let mut state = AllocationState::new(vec![10.0, 10.0, 10.0], 2.0, 1e-12, 10.0).unwrap();
        state.update(&[5.0, 10.0, 10.0]).unwrap();
        assert!(state.probabilities[0] > state.probabilities[1]);
        assert_eq!(state.prev_best, vec![5.0, 10.0, 10.0]);
    }

    proptest! {
        #[test]
        fn softmax_is_a_distribution(h in prop::collection::vec(-50.0f64..50.0, 1..12)) {
            let p = softmax_allocation(&h).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(p.iter().all(|&v| v > 0.0));
        }

        #[test]
        fn softmax_is_monotone(h in prop::collection::vec(-5.0f64..5.0, 2..8), k in 0usize..8, bump in 0.01f64..3.0) {
            let k = k % h.len();
            let before = softmax_allocation(&h).unwrap()[k];
            let mut raised = h.clone();
            raised[k] += bump;
            prop_assert!(softmax_allocation(&raised).unwrap()[k] > before);
        }

        #[test]
        fn preference_sum_is_conserved(
            h in prop::collection::vec(-5.0f64..5.0, 1..10),
            c_seed in prop::collection::vec(0.0f64..10.0, 10),
            alpha in 0.01f64..10.0,
        ) {
            let n = h.len();
            let p = softmax_allocation(&h).unwrap();
            let c = &c_seed[..n];
            let next = update_preferences(&h, c, &p, alpha).unwrap();
            let drift = next.iter().sum::<f64>() - h.iter().sum::<f64>();
            prop_assert!(drift.abs() <= 1e-12 * (1.0 + alpha * c.iter().sum::<f64>()), "drift {drift}");
        }

        #[test]
        fn allocation_conserves_budget(
            h in prop::collection::vec(-6.0f64..6.0, 1..8),
            extra in 0usize..300,
            floor in 1usize..4,
        ) {
            let p = softmax_allocation(&h).unwrap();
            let budget = h.len() * floor + extra;
            let counts = allocate_offspring(&p, budget, floor).unwrap();
            prop_assert_eq!(counts.iter().sum::<usize>(), budget);
            prop_assert!(counts.iter().all(|&c| c >= floor));
        }
    }
}
