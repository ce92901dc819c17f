//! DE/rand/1/bin sub-populations, one per formulation.

use rand::Rng as _;

use crate::embedding::Formulation;
use crate::error::{invalid, Result};
use crate::objective::EmbeddedObjective;

/// DE/rand/1 needs the target plus three distinct donors.
pub const MIN_SUBPOPULATION: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeParams {
    /// Crossover rate `CR` in `[0, 1]`.
    pub crossover_rate: f64,
    /// Differential weight `F >= 0`.
    pub scale: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        Self {
            crossover_rate: 0.9,
            scale: 0.35,
        }
    }
}

impl DeParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return invalid(format!(
                "CR must lie in [0, 1], got {}",
                self.crossover_rate
            ));
        }
        if !(self.scale >= 0.0 && self.scale.is_finite()) {
            return invalid(format!(
                "F must be finite and non-negative, got {}",
                self.scale
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genome: Vec<f64>,
    pub fitness: f64,
    pub formulation_id: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubPopulation {
    pub formulation_id: usize,
    pub members: Vec<Individual>,
    /// Next target index; persists across generations so partial budgets
    /// sweep every member over time.
    cursor: usize,
}

impl SubPopulation {
    /// Uniform random genomes in `[-1, 1]^d`, each evaluated once.
    pub fn init(
        formulation: &Formulation,
        size: usize,
        objective: &mut EmbeddedObjective,
        rng: &mut crate::Rng,
    ) -> Result<Self> {
        if size < MIN_SUBPOPULATION {
            return invalid(format!(
                "sub-population size must be at least {MIN_SUBPOPULATION}, got {size}"
            ));
        }
        let d = formulation.dim();
        let mut members = Vec::with_capacity(size);
        for _ in 0..size {
            let genome: Vec<f64> = (0..d).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
            let fitness = formulation.evaluate(objective, &genome)?;
            members.push(Individual {
                genome,
                fitness,
                formulation_id: formulation.id,
            });
        }
        Ok(Self {
            formulation_id: formulation.id,
            members,
            cursor: 0,
        })
    }

    /// Builds a sub-population from already evaluated members.
    pub fn from_members(formulation_id: usize, members: Vec<Individual>) -> Result<Self> {
        if members.len() < MIN_SUBPOPULATION {
            return invalid(format!(
                "sub-population size must be at least {MIN_SUBPOPULATION}, got {}",
                members.len()
            ));
        }
        Ok(Self {
            formulation_id,
            members,
            cursor: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index of the first member with minimal fitness.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, m) in self.members.iter().enumerate() {
            if m.fitness < self.members[best].fitness {
                best = i;
            }
        }
        best
    }

    /// Index of the last member with maximal fitness. Never equals
    /// [`best_index`](Self::best_index) when the population has two or more members.
    pub fn worst_index(&self) -> usize {
        let mut worst = self.members.len() - 1;
        for (i, m) in self.members.iter().enumerate().rev() {
            if m.fitness > self.members[worst].fitness {
                worst = i;
            }
        }
        worst
    }

    pub fn best(&self) -> &Individual {
        &self.members[self.best_index()]
    }

    /// Builds one DE/rand/1/bin trial vector for `target`.
    ///
    /// Draw order: `r1`, `r2`, `r3` by rejection, then `j_rand`, then one
    /// uniform per coordinate for the crossover mask.
    pub fn trial(&self, target: usize, params: DeParams, rng: &mut crate::Rng) -> Result<Vec<f64>> {
        let n = self.members.len();
        if n < MIN_SUBPOPULATION {
            return invalid(format!(
                "DE/rand/1 needs at least {MIN_SUBPOPULATION} members, got {n}"
            ));
        }
        if target >= n {
            return invalid(format!("target {target} out of range for {n} members"));
        }
        params.validate()?;
        let r1 = draw_distinct(rng, n, &[target]);
        let r2 = draw_distinct(rng, n, &[target, r1]);
        let r3 = draw_distinct(rng, n, &[target, r1, r2]);
        let base = &self.members[r1].genome;
        let a = &self.members[r2].genome;
        let b = &self.members[r3].genome;
        let current = &self.members[target].genome;
        let d = current.len();
        let j_rand = rng.random_range(0..d);
        let trial = (0..d)
            .map(|j| {
                let u: f64 = rng.random();
                let v = if u < params.crossover_rate || j == j_rand {
                    base[j] + params.scale * (a[j] - b[j])
                } else {
                    current[j]
                };
                v.clamp(-1.0, 1.0)
            })
            .collect();
        Ok(trial)
    }

    /// Runs `offspring_budget` trials against cyclically chosen targets with
    /// greedy replacement (`trial <= target` wins). Replacement is immediate,
    /// so later trials in the same call see earlier winners. Returns the
    /// number of evaluations spent.
    pub fn generation(
        &mut self,
        offspring_budget: usize,
        params: DeParams,
        objective: &mut EmbeddedObjective,
        formulation: &Formulation,
        rng: &mut crate::Rng,
    ) -> Result<usize> {
        for _ in 0..offspring_budget {
            let target = self.cursor % self.members.len();
            let genome = self.trial(target, params, rng)?;
            let fitness = formulation.evaluate(objective, &genome)?;
            self.cursor = (target + 1) % self.members.len();
            let slot = &mut self.members[target];
            if fitness <= slot.fitness {
                slot.genome = genome;
                slot.fitness = fitness;
            }
        }
        Ok(offspring_budget)
    }
}

fn draw_distinct(rng: &mut crate::Rng, n: usize, taken: &[usize]) -> usize {
    loop {
        let r = rng.random_range(0..n);
        if !taken.contains(&r) {
            return r;
        }
    }
}
