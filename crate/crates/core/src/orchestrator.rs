//! The multiform evolution loop and the four study variants.
//!
//! One run owns a fresh copy of the objective and three independent random
//! streams derived from the seed: the objective's rotation and shift, the
//! embedding matrices, and the evolution itself. Each generation spends `K`
//! offspring evaluations split across formulations, then (when enabled)
//! exchanges elites over every formulation pair at 2 evaluations per pair.

use std::fmt;
use std::str::FromStr;

use rand::{Rng as _, SeedableRng};

use crate::allocation::{self, AllocationState};
use crate::de::{DeParams, Individual, SubPopulation, MIN_SUBPOPULATION};
use crate::embedding::FormulationSet;
use crate::error::{invalid, Error, Result};
use crate::objective::{BaseFunctionId, EmbeddedObjective};
use crate::transfer;
use std::collections::BTreeMap;

pub const OBJECTIVE_STREAM: u64 = 0;
pub const FORMULATION_STREAM: u64 = 1;
pub const EVOLUTION_STREAM: u64 = 2;

/// The base solver and its three multiform extensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VariantId {
    /// Plain DE on the original `D`-dimensional problem.
    S,
    /// Independent random embeddings, no original problem, no exchange.
    SM,
    /// Embeddings plus the original problem with cross-form transfer.
    SMT,
    /// Transfer plus dynamic resource allocation.
    SMF,
}

impl VariantId {
    pub const ALL: [VariantId; 4] = [VariantId::S, VariantId::SM, VariantId::SMT, VariantId::SMF];

    pub fn name(self) -> &'static str {
        match self {
            VariantId::S => "de",
            VariantId::SM => "de+m",
            VariantId::SMT => "de+mt",
            VariantId::SMF => "de+mf",
        }
    }

    pub fn uses_embeddings(self) -> bool {
        self != VariantId::S
    }

    pub fn includes_original(self) -> bool {
        self != VariantId::SM
    }

    pub fn transfer(self) -> bool {
        matches!(self, VariantId::SMT | VariantId::SMF)
    }

    pub fn dynamic_allocation(self) -> bool {
        self == VariantId::SMF
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VariantId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        VariantId::ALL
            .into_iter()
            .find(|v| v.name() == lower)
            .ok_or_else(|| Error::InvalidInput(format!("unknown variant `{s}`")))
    }
}

/// Everything needed to reproduce one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub function: BaseFunctionId,
    pub ambient_dim: usize,
    pub effective_dim: usize,
    /// Embedding dimensions; ignored by [`VariantId::S`].
    pub dims: Vec<usize>,
    pub variant: VariantId,
    /// Total population size `K`; also the offspring budget per generation.
    pub population: usize,
    pub max_fes: u64,
    pub seed: u64,
    pub de: DeParams,
    pub alpha: f64,
    pub epsilon: f64,
    pub trend_clamp: f64,
    pub ridge: f64,
    /// Minimum offspring per formulation and generation.
    pub floor: usize,
    /// Forces transfer on or off regardless of the variant.
    pub transfer_override: Option<bool>,
    /// Assign initial individuals to formulations at random instead of evenly.
    pub random_attribution: bool,
    /// Drop transferred genomes the recipient already holds.
    pub skip_duplicate_transfers: bool,
}

impl RunConfig {
    pub fn new(
        function: BaseFunctionId,
        ambient_dim: usize,
        effective_dim: usize,
        dims: Vec<usize>,
        variant: VariantId,
    ) -> Self {
        Self {
            function,
            ambient_dim,
            effective_dim,
            dims,
            variant,
            population: 100,
            max_fes: 50_000,
            seed: 0,
            de: DeParams::default(),
            alpha: allocation::DEFAULT_ALPHA,
            epsilon: allocation::DEFAULT_EPSILON,
            trend_clamp: allocation::DEFAULT_TREND_CLAMP,
            ridge: transfer::DEFAULT_RIDGE,
            floor: 2,
            transfer_override: None,
            random_attribution: false,
            skip_duplicate_transfers: true,
        }
    }

    /// Embedding dimensions this variant actually uses.
    pub fn active_dims(&self) -> &[usize] {
        if self.variant.uses_embeddings() {
            &self.dims
        } else {
            &[]
        }
    }

    pub fn formulation_count(&self) -> usize {
        self.active_dims().len() + usize::from(self.variant.includes_original())
    }

    pub fn transfer_enabled(&self) -> bool {
        self.transfer_override.unwrap_or(self.variant.transfer())
    }

    pub fn validate(&self) -> Result<()> {
        if self.effective_dim == 0 || self.effective_dim >= self.ambient_dim {
            return invalid(format!(
                "need 1 <= d_e < D, got d_e={}, D={}",
                self.effective_dim, self.ambient_dim
            ));
        }
        if self.variant.uses_embeddings() && self.dims.is_empty() {
            return invalid(format!(
                "variant {} needs at least one embedding dimension",
                self.variant
            ));
        }
        if let Some(&d) = self
            .active_dims()
            .iter()
            .find(|&&d| d == 0 || d >= self.ambient_dim)
        {
            return invalid(format!(
                "embedding dimension {d} must satisfy 1 <= d < D={}",
                self.ambient_dim
            ));
        }
        let n = self.formulation_count();
        if self.population < MIN_SUBPOPULATION * n {
            return invalid(format!(
                "population {} is too small for {n} formulations (need {})",
                self.population,
                MIN_SUBPOPULATION * n
            ));
        }
        if self.max_fes <= self.population as u64 {
            return invalid(format!(
                "FE budget {} must exceed the population size {}",
                self.max_fes, self.population
            ));
        }
        if self.floor == 0 || self.floor * n > self.population {
            return invalid(format!(
                "offspring floor {} is infeasible for {n} formulations and K={}",
                self.floor, self.population
            ));
        }
        self.de.validate()?;
        if !(self.alpha > 0.0 && self.epsilon > 0.0 && self.trend_clamp > 0.0) {
            return invalid("alpha, epsilon and the trend clamp must be positive");
        }
        if !(self.ridge > 0.0 && self.ridge.is_finite()) {
            return invalid(format!("ridge must be positive, got {}", self.ridge));
        }
        Ok(())
    }

    /// The objective instance for this config's seed.
    pub fn build_objective(&self) -> Result<EmbeddedObjective> {
        let mut rng = stream(self.seed, OBJECTIVE_STREAM);
        EmbeddedObjective::random(
            self.function,
            self.ambient_dim,
            self.effective_dim,
            &mut rng,
        )
    }

    /// The formulations for this config's seed and variant.
    pub fn build_formulations(&self) -> Result<FormulationSet> {
        let mut rng = stream(self.seed, FORMULATION_STREAM);
        FormulationSet::generate(
            self.ambient_dim,
            self.active_dims(),
            self.variant.includes_original(),
            &mut rng,
        )
    }
}

pub fn stream(seed: u64, id: u64) -> crate::Rng {
    let mut rng = crate::Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerationRecord {
    /// 0 is the evaluated initial population.
    pub generation: usize,
    pub fes: u64,
    pub formulation_best: Vec<f64>,
    pub global_best: f64,
    /// Share of the offspring budget each formulation was given this generation.
    pub allocation: Vec<f64>,
    pub offspring: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunLog {
    pub config: RunConfig,
    pub records: Vec<GenerationRecord>,
    /// Best member of every formulation at the end of the run.
    pub final_bests: Vec<Individual>,
    pub best_formulation: usize,
    pub best_genome: Vec<f64>,
    pub best_point: Vec<f64>,
    pub best_fitness: f64,
    pub total_fes: u64,
}

impl RunLog {
    pub fn run_id(&self) -> String {
        format!(
            "{}_{}_s{}",
            self.config.function,
            self.config.variant.name().replace('+', "_"),
            self.config.seed
        )
    }
}

/// Runs one configuration on the objective derived from its seed.
pub fn run(config: &RunConfig) -> Result<RunLog> {
    config.validate()?;
    let objective = config.build_objective()?;
    run_on(config, &objective)
}

/// Runs one configuration on a fresh copy of `objective`.
pub fn run_on(config: &RunConfig, objective: &EmbeddedObjective) -> Result<RunLog> {
    config.validate()?;
    if objective.ambient_dim() != config.ambient_dim || objective.base() != config.function {
        return invalid("objective does not match the run configuration");
    }
    let mut objective = objective.fresh_copy();
    let formulations = config.build_formulations()?;
    let mut rng = stream(config.seed, EVOLUTION_STREAM);
    let n = formulations.len();
    let k = config.population;

    let sizes = attribute(k, n, config.random_attribution, &mut rng);
    let mut pops = Vec::with_capacity(n);
    for (form, &size) in formulations.iter().zip(&sizes) {
        pops.push(SubPopulation::init(form, size, &mut objective, &mut rng)?);
    }

    let bests = |pops: &[SubPopulation]| pops.iter().map(|p| p.best().fitness).collect::<Vec<_>>();
    let mut state = AllocationState::new(
        bests(&pops),
        config.alpha,
        config.epsilon,
        config.trend_clamp,
    )?;
    let uniform = vec![1.0 / n as f64; n];
    let initial_share = allocation::allocate_offspring(&uniform, k, config.floor)?;
    let mut records = vec![record(
        0,
        objective.eval_count(),
        bests(&pops),
        uniform.clone(),
        initial_share,
    )];

    let transfer_cost = if config.transfer_enabled() {
        n * (n - 1)
    } else {
        0
    } as u64;
    let mut generation = 0;
    while objective.eval_count() + k as u64 <= config.max_fes {
        generation += 1;
        let share = if config.variant.dynamic_allocation() {
            state.probabilities.clone()
        } else {
            uniform.clone()
        };
        let offspring = allocation::allocate_offspring(&share, k, config.floor)?;
        // Maps are fitted before variation so the exchanged bests are not
        // simply the training columns the maps interpolate.
        let maps = if transfer_cost > 0
            && objective.eval_count() + k as u64 + transfer_cost <= config.max_fes
        {
            Some(fit_maps(&pops, &formulations, config.ridge)?)
        } else {
            None
        };
        for ((pop, form), &budget) in pops.iter_mut().zip(formulations.iter()).zip(&offspring) {
            pop.generation(budget, config.de, &mut objective, form, &mut rng)?;
        }

        if let Some(maps) = maps {
            for ((i, j), (to_j, to_i)) in &maps {
                let (head, tail) = pops.split_at_mut(*j);
                transfer::exchange(
                    &mut head[*i],
                    &mut tail[0],
                    to_j,
                    to_i,
                    &formulations[*i],
                    &formulations[*j],
                    &mut objective,
                    config.skip_duplicate_transfers,
                )?;
            }
        }

        let current = bests(&pops);
        if config.variant.dynamic_allocation() {
            state.update(&current)?;
        }
        records.push(record(
            generation,
            objective.eval_count(),
            current,
            share,
            offspring,
        ));
    }

    let final_bests: Vec<Individual> = pops.iter().map(|p| p.best().clone()).collect();
    let mut log = RunLog {
        config: config.clone(),
        records,
        final_bests,
        best_formulation: 0,
        best_genome: Vec::new(),
        best_point: Vec::new(),
        best_fitness: f64::INFINITY,
        total_fes: objective.eval_count(),
    };
    let (point, fitness, id) = recover(&log, &formulations)?;
    log.best_formulation = id;
    log.best_genome = log.final_bests[id].genome.clone();
    log.best_point = point;
    log.best_fitness = fitness;
    Ok(log)
}

/// Both-direction maps for every pair `i < j`, keyed by `(i, j)`.
fn fit_maps(
    pops: &[SubPopulation],
    formulations: &FormulationSet,
    ridge: f64,
) -> Result<BTreeMap<(usize, usize), (transfer::TransferMap, transfer::TransferMap)>> {
    let mut maps = BTreeMap::new();
    for i in 0..pops.len() {
        for j in i + 1..pops.len() {
            let pair = transfer::build_transfer_maps(
                &pops[i],
                &pops[j],
                formulations[i].dim(),
                formulations[j].dim(),
                ridge,
            )?;
            maps.insert((i, j), pair);
        }
    }
    Ok(maps)
}

fn record(
    generation: usize,
    fes: u64,
    formulation_best: Vec<f64>,
    allocation: Vec<f64>,
    offspring: Vec<usize>,
) -> GenerationRecord {
    let global_best = formulation_best
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    GenerationRecord {
        generation,
        fes,
        formulation_best,
        global_best,
        allocation,
        offspring,
    }
}

/// Sub-population sizes: an even split with the remainder going to the lowest
/// ids, or a random assignment redrawn until every size meets the DE floor.
fn attribute(k: usize, n: usize, random: bool, rng: &mut crate::Rng) -> Vec<usize> {
    if !random {
        return (0..n).map(|i| k / n + usize::from(i < k % n)).collect();
    }
    loop {
        let mut sizes = vec![0; n];
        for _ in 0..k {
            sizes[rng.random_range(0..n)] += 1;
        }
        if sizes.iter().all(|&s| s >= MIN_SUBPOPULATION) {
            return sizes;
        }
    }
}

/// Lifts every formulation's final best to the ambient box and returns the
/// point with the lowest logged fitness, together with that fitness.
pub fn recover_high_dim_best(
    log: &RunLog,
    formulations: &FormulationSet,
) -> Result<(Vec<f64>, f64)> {
    let (point, fitness, _) = recover(log, formulations)?;
    Ok((point, fitness))
}

fn recover(log: &RunLog, formulations: &FormulationSet) -> Result<(Vec<f64>, f64, usize)> {
    if log.final_bests.is_empty() {
        return invalid("run log has no final bests");
    }
    if log.final_bests.len() != formulations.len() {
        return invalid("run log and formulation set disagree on the formulation count");
    }
    let mut best = 0;
    for (i, ind) in log.final_bests.iter().enumerate() {
        if ind.fitness < log.final_bests[best].fitness {
            best = i;
        }
    }
    let winner = &log.final_bests[best];
    let point = formulations[winner.formulation_id].to_ambient(&winner.genome)?;
    Ok((point, winner.fitness, best))
}

/// Formulations and their ambient best points are rebuilt from a log's config.
pub fn formulations_for(log: &RunLog) -> Result<FormulationSet> {
    log.config.build_formulations()
}

/// One run per `(variant, seed)`, variant-major. All variants of a seed share
/// the same objective instance so results can be paired by seed.
pub fn run_variant_suite(
    base: &RunConfig,
    variants: &[VariantId],
    seeds: &[u64],
) -> Result<Vec<RunLog>> {
    if variants.is_empty() || seeds.is_empty() {
        return invalid("a suite needs at least one variant and one seed");
    }
    let mut objectives = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let cfg = RunConfig {
            seed,
            ..base.clone()
        };
        objectives.push(cfg.build_objective()?);
    }
    let mut logs = Vec::with_capacity(variants.len() * seeds.len());
    for &variant in variants {
        for (&seed, objective) in seeds.iter().zip(&objectives) {
            let cfg = RunConfig {
                seed,
                variant,
                ..base.clone()
            };
            logs.push(run_on(&cfg, objective)?);
        }
    }
    Ok(logs)
}
