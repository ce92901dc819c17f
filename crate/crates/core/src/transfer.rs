//! Cross-form genetic transfer.
//!
//! Two sub-populations are paired by fitness rank and stacked into matrices
//! `A_i`, `A_j` (one genome per column, zero-padded to a common length). The
//! linear map minimizing `sum_q ||W a_i_q - a_j_q||^2` has the closed form
//! `W = (A_j A_i^T)(A_i A_i^T + lambda I)^-1`. The best member of each side is
//! pushed through the map and replaces the recipient's worst member.

use nalgebra::{DMatrix, DVector};

use crate::de::{Individual, SubPopulation, MIN_SUBPOPULATION};
use crate::embedding::Formulation;
use crate::error::{invalid, Error, Result};
use crate::objective::EmbeddedObjective;

/// Ridge used when the Gram matrix cannot be inverted as is.
pub const DEFAULT_RIDGE: f64 = 1e-6;

/// Max-abs distance under which two genomes count as the same point.
pub const DUPLICATE_TOLERANCE: f64 = 1e-9;

/// Smallest admissible `L_kk^2 / max_k G_kk` in the Cholesky factor of the
/// unregularized Gram matrix.
const PIVOT_FLOOR: f64 = 1e-12;

/// A fitted linear map from one formulation's genomes to another's.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMap {
    pub source_id: usize,
    pub target_id: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    /// Square map over the padded genome length.
    pub weights: MapWeights,
    pub ridge: f64,
}

/// The weights of a fitted map.
///
/// Maps fitted through the push-through form stay factored: for a padded
/// length of `D` and `Q` paired genomes the factors hold `2 D Q` numbers
/// instead of `D^2`, which matters when one side is the original problem.
#[derive(Clone, Debug, PartialEq)]
pub enum MapWeights {
    Dense(DMatrix<f64>),
    /// `W = left * right` with `left` of shape `D x Q` and `right` `Q x D`.
    Factored {
        left: DMatrix<f64>,
        right: DMatrix<f64>,
    },
}

impl MapWeights {
    /// Padded genome length the map acts on.
    pub fn dim(&self) -> usize {
        match self {
            MapWeights::Dense(w) => w.ncols(),
            MapWeights::Factored { right, .. } => right.ncols(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            MapWeights::Dense(w) => w.clone(),
            MapWeights::Factored { left, right } => left * right,
        }
    }

    fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        match self {
            MapWeights::Dense(w) => w * v,
            MapWeights::Factored { left, right } => left * (right * v),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            MapWeights::Dense(w) => w.iter().all(|v| v.is_finite()),
            MapWeights::Factored { left, right } => {
                left.iter().chain(right.iter()).all(|v| v.is_finite())
            }
        }
    }
}

impl From<DMatrix<f64>> for MapWeights {
    fn from(w: DMatrix<f64>) -> Self {
        MapWeights::Dense(w)
    }
}

impl TransferMap {
    /// `W g_source`, truncated to the target length and clipped to the box.
    pub fn apply(&self, genome: &[f64]) -> Result<Vec<f64>> {
        if genome.len() != self.source_dim {
            return invalid(format!(
                "map from formulation {} expects genomes of length {}, got {}",
                self.source_id,
                self.source_dim,
                genome.len()
            ));
        }
        let mut padded = DVector::zeros(self.weights.dim());
        padded.rows_mut(0, genome.len()).copy_from_slice(genome);
        let mapped = self.weights.apply(&padded);
        Ok(mapped
            .iter()
            .take(self.target_dim)
            .map(|v| v.clamp(-1.0, 1.0))
            .collect())
    }
}

/// Stacks the fitness-sorted genomes of both populations column-wise.
///
/// Both are truncated to `Q = min(|P_i|, |P_j|)` columns and zero-padded to
/// `max(d_i, d_j)` rows; column `q` of each holds the rank-`q` member.
pub fn pair_populations(
    source: &SubPopulation,
    target: &SubPopulation,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if source.is_empty() || target.is_empty() {
        return invalid("cannot pair an empty population");
    }
    let q = source.len().min(target.len());
    let rows = source.members[0]
        .genome
        .len()
        .max(target.members[0].genome.len());
    Ok((stack_sorted(source, q, rows), stack_sorted(target, q, rows)))
}

fn stack_sorted(pop: &SubPopulation, q: usize, rows: usize) -> DMatrix<f64> {
    let mut ranked: Vec<&Individual> = pop.members.iter().collect();
    ranked.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
    let mut out = DMatrix::zeros(rows, q);
    for (col, ind) in ranked.into_iter().take(q).enumerate() {
        out.view_mut((0, col), (ind.genome.len(), 1))
            .copy_from_slice(&ind.genome);
    }
    out
}

/// Least-squares map `W = (A_t A_s^T)(A_s A_s^T + ridge I)^-1`.
///
/// With `ridge = 0` a rank-deficient or badly conditioned `A_s A_s^T` is a
/// [`Error::Singular`]. With `ridge > 0` and fewer columns than rows the
/// equivalent `A_t (A_s^T A_s + ridge I)^-1 A_s^T` is solved instead, which
/// only needs a `Q x Q` factorization.
pub fn build_mapping(
    source: &DMatrix<f64>,
    target: &DMatrix<f64>,
    ridge: f64,
) -> Result<DMatrix<f64>> {
    fit_mapping(source, target, ridge).map(|w| w.to_dense())
}

/// [`build_mapping`] without expanding push-through fits to a dense matrix.
pub fn fit_mapping(source: &DMatrix<f64>, target: &DMatrix<f64>, ridge: f64) -> Result<MapWeights> {
    if source.shape() != target.shape() {
        return invalid(format!(
            "paired matrices differ in shape: {:?} vs {:?}",
            source.shape(),
            target.shape()
        ));
    }
    if source.ncols() == 0 {
        return invalid("paired matrices have no columns");
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return invalid(format!(
            "ridge must be finite and non-negative, got {ridge}"
        ));
    }
    let (rows, q) = source.shape();
    if ridge > 0.0 && q < rows {
        return dual_factors(source, target, ridge);
    }
    let mut gram = source * source.transpose();
    for k in 0..rows {
        gram[(k, k)] += ridge;
    }
    let chol = factor(gram, ridge == 0.0)?;
    // G W^T = A_s A_t^T, since G is symmetric.
    let rhs = source * target.transpose();
    let weights = MapWeights::Dense(chol.solve(&rhs).transpose());
    check_finite(weights)
}

/// The push-through form `A_t (A_s^T A_s + ridge I)^-1 A_s^T`.
pub fn build_mapping_dual(
    source: &DMatrix<f64>,
    target: &DMatrix<f64>,
    ridge: f64,
) -> Result<DMatrix<f64>> {
    dual_factors(source, target, ridge).map(|w| w.to_dense())
}

fn dual_factors(source: &DMatrix<f64>, target: &DMatrix<f64>, ridge: f64) -> Result<MapWeights> {
    if !(ridge > 0.0 && ridge.is_finite()) {
        return invalid("the dual form needs a positive ridge");
    }
    if source.shape() != target.shape() {
        return invalid("paired matrices differ in shape");
    }
    let q = source.ncols();
    let mut gram = source.transpose() * source;
    for k in 0..q {
        gram[(k, k)] += ridge;
    }
    let chol = factor(gram, false)?;
    let right = chol.solve(&source.transpose());
    check_finite(MapWeights::Factored {
        left: target.clone(),
        right,
    })
}

fn factor(
    gram: DMatrix<f64>,
    check_conditioning: bool,
) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let scale = gram.diagonal().max();
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Singular("Gram matrix is not positive definite".into()))?;
    if check_conditioning {
        let min_pivot = chol
            .l_dirty()
            .diagonal()
            .iter()
            .map(|v| v * v)
            .fold(f64::INFINITY, f64::min);
        if scale.is_nan() || scale <= 0.0 || min_pivot / scale < PIVOT_FLOOR {
            return Err(Error::Singular(format!(
                "Gram matrix is ill-conditioned (pivot ratio {:e})",
                min_pivot / scale
            )));
        }
    }
    Ok(chol)
}

fn check_finite(w: MapWeights) -> Result<MapWeights> {
    if w.is_finite() {
        Ok(w)
    } else {
        Err(Error::Singular("mapping has non-finite entries".into()))
    }
}

/// Fits with `ridge = 0` when the Gram matrix allows it, otherwise falls
/// back to `fallback_ridge`. Returns the weights and the ridge used.
pub fn build_mapping_auto(
    source: &DMatrix<f64>,
    target: &DMatrix<f64>,
    fallback_ridge: f64,
) -> Result<(MapWeights, f64)> {
    if source.ncols() >= source.nrows() {
        match fit_mapping(source, target, 0.0) {
            Ok(w) => return Ok((w, 0.0)),
            Err(Error::Singular(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((fit_mapping(source, target, fallback_ridge)?, fallback_ridge))
}

/// Fits both directions between two sub-populations.
pub fn build_transfer_maps(
    pop_i: &SubPopulation,
    pop_j: &SubPopulation,
    dim_i: usize,
    dim_j: usize,
    fallback_ridge: f64,
) -> Result<(TransferMap, TransferMap)> {
    let (a_i, a_j) = pair_populations(pop_i, pop_j)?;
    let (w_ij, ridge_ij) = build_mapping_auto(&a_i, &a_j, fallback_ridge)?;
    let (w_ji, ridge_ji) = build_mapping_auto(&a_j, &a_i, fallback_ridge)?;
    let forward = TransferMap {
        source_id: pop_i.formulation_id,
        target_id: pop_j.formulation_id,
        source_dim: dim_i,
        target_dim: dim_j,
        weights: w_ij,
        ridge: ridge_ij,
    };
    let backward = TransferMap {
        source_id: pop_j.formulation_id,
        target_id: pop_i.formulation_id,
        source_dim: dim_j,
        target_dim: dim_i,
        weights: w_ji,
        ridge: ridge_ji,
    };
    Ok((forward, backward))
}

/// Exchanges the best member of each population through maps fitted on the
/// populations as they are now.
///
/// Each transferred genome is evaluated in its recipient formulation and
/// replaces the recipient's worst member unconditionally. Returns the
/// evaluations spent, always 2.
pub fn cross_form_transfer(
    pop_i: &mut SubPopulation,
    pop_j: &mut SubPopulation,
    form_i: &Formulation,
    form_j: &Formulation,
    objective: &mut EmbeddedObjective,
    fallback_ridge: f64,
) -> Result<usize> {
    check_sizes(pop_i, pop_j)?;
    let (to_j, to_i) =
        build_transfer_maps(pop_i, pop_j, form_i.dim(), form_j.dim(), fallback_ridge)?;
    exchange(pop_i, pop_j, &to_j, &to_i, form_i, form_j, objective, false)
}

/// Exchanges the best member of each population through already fitted maps
/// (`to_j` maps from `i` into `j`, `to_i` the reverse).
///
/// With `skip_duplicates`, a transferred genome already present in the
/// recipient is dropped without being evaluated: it carries no new
/// information and would only displace the worst member with a copy.
/// Returns the evaluations spent (0 to 2).
#[allow(clippy::too_many_arguments)]
pub fn exchange(
    pop_i: &mut SubPopulation,
    pop_j: &mut SubPopulation,
    to_j: &TransferMap,
    to_i: &TransferMap,
    form_i: &Formulation,
    form_j: &Formulation,
    objective: &mut EmbeddedObjective,
    skip_duplicates: bool,
) -> Result<usize> {
    check_sizes(pop_i, pop_j)?;
    if to_j.source_dim != form_i.dim()
        || to_j.target_dim != form_j.dim()
        || to_i.source_dim != form_j.dim()
        || to_i.target_dim != form_i.dim()
    {
        return invalid("transfer maps do not match the formulations");
    }
    let into_i = to_i.apply(&pop_j.best().genome)?;
    let into_j = to_j.apply(&pop_i.best().genome)?;

    let mut spent = 0;
    if !(skip_duplicates && contains(pop_i, &into_i)) {
        let fitness_i = form_i.evaluate(objective, &into_i)?;
        replace_worst(pop_i, into_i, fitness_i, form_i.id);
        spent += 1;
    }
    if !(skip_duplicates && contains(pop_j, &into_j)) {
        let fitness_j = form_j.evaluate(objective, &into_j)?;
        replace_worst(pop_j, into_j, fitness_j, form_j.id);
        spent += 1;
    }
    Ok(spent)
}

/// Whether some member's genome matches `genome` within [`DUPLICATE_TOLERANCE`].
fn contains(pop: &SubPopulation, genome: &[f64]) -> bool {
    pop.members.iter().any(|m| {
        m.genome
            .iter()
            .zip(genome)
            .all(|(a, b)| (a - b).abs() <= DUPLICATE_TOLERANCE)
    })
}

fn check_sizes(pop_i: &SubPopulation, pop_j: &SubPopulation) -> Result<()> {
    if pop_i.len() < MIN_SUBPOPULATION || pop_j.len() < MIN_SUBPOPULATION {
        return invalid(format!(
            "transfer needs sub-populations of at least {MIN_SUBPOPULATION} members"
        ));
    }
    Ok(())
}

fn replace_worst(pop: &mut SubPopulation, genome: Vec<f64>, fitness: f64, formulation_id: usize) {
    let worst = pop.worst_index();
    pop.members[worst] = Individual {
        genome,
        fitness,
        formulation_id,
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::make_embedding_matrix;
    use crate::objective::BaseFunctionId;
    use rand::{Rng as _, SeedableRng};

    fn rng(seed: u64) -> crate::Rng {
        crate::Rng::seed_from_u64(seed)
    }

    fn random_matrix(r: &mut crate::Rng, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| r.random_range(-1.0..1.0))
    }

    fn pop_from(genomes: &[Vec<f64>], fitness: &[f64], id: usize) -> SubPopulation {
        let members = genomes
            .iter()
            .zip(fitness)
            .map(|(g, &f)| Individual {
                genome: g.clone(),
                fitness: f,
                formulation_id: id,
            })
            .collect();
        SubPopulation::from_members(id, members).unwrap()
    }

    #[test]
    fn pairing_sorts_and_truncates() {
        let gi: Vec<Vec<f64>> = (0..10).map(|k| vec![k as f64; 3]).collect();
        let fi: Vec<f64> = (0..10).map(|k| (10 - k) as f64).collect();
        let gj: Vec<Vec<f64>> = (0..7).map(|k| vec![-(k as f64); 3]).collect();
        let fj: Vec<f64> = (0..7).map(|k| k as f64).collect();
        let (a_i, a_j) = pair_populations(&pop_from(&gi, &fi, 0), &pop_from(&gj, &fj, 1)).unwrap();
        assert_eq!(a_i.shape(), (3, 7));
        assert_eq!(a_j.shape(), (3, 7));
        // Population i sorted ascending by fitness: genome 9 first.
        assert_eq!(a_i[(0, 0)], 9.0);
        assert_eq!(a_i[(0, 6)], 3.0);
        assert_eq!(a_j[(0, 0)], 0.0);
        assert_eq!(a_j[(0, 6)], -6.0);
    }

    #[test]
    fn pairing_pads_shorter_genomes() {
        let gi: Vec<Vec<f64>> = (0..6).map(|k| vec![1.0 + k as f64; 5]).collect();
        let gj: Vec<Vec<f64>> = (0..6).map(|k| vec![0.5 + k as f64; 25]).collect();
        let f: Vec<f64> = (0..6).map(|k| k as f64).collect();
        let (a_i, a_j) = pair_populations(&pop_from(&gi, &f, 0), &pop_from(&gj, &f, 1)).unwrap();
        assert_eq!(a_i.shape(), (25, 6));
        assert_eq!(a_j.shape(), (25, 6));
        assert!(a_i.rows(5, 20).iter().all(|&v| v == 0.0));
        assert!(a_i.rows(0, 5).iter().all(|&v| v != 0.0));
    }

    #[test]
    fn identity_and_scaling_maps() {
        let mut r = rng(1);
        let a = random_matrix(&mut r, 4, 4);
        let w = build_mapping(&a, &a, 0.0).unwrap();
        assert!((w - DMatrix::identity(4, 4)).abs().max() < 1e-8);
        let w2 = build_mapping(&a, &(&a * 2.0), 0.0).unwrap();
        assert!((w2 - DMatrix::identity(4, 4) * 2.0).abs().max() < 1e-8);
    }

    /// Normal-equations oracle solved by Gaussian elimination on `W G = B`.
    fn normal_equations_oracle(a: &DMatrix<f64>, t: &DMatrix<f64>) -> DMatrix<f64> {
        let g = a * a.transpose();
        let b = t * a.transpose();
        let inv = g.try_inverse().unwrap();
        b * inv
    }

    #[test]
    fn exact_linear_relation_is_recovered() {
        let mut r = rng(2);
        let a = random_matrix(&mut r, 3, 8);
        let b = random_matrix(&mut r, 3, 3);
        let w = build_mapping(&a, &(&b * &a), 0.0).unwrap();
        assert!((&w - &b).abs().max() < 1e-8);
        let oracle = normal_equations_oracle(&a, &(&b * &a));
        assert!((w - oracle).abs().max() < 1e-8);
    }

    #[test]
    fn singular_gram_without_ridge_is_an_error() {
        let mut r = rng(3);
        let a = random_matrix(&mut r, 6, 3);
        assert!(matches!(
            build_mapping(&a, &a, 0.0),
            Err(Error::Singular(_))
        ));
        assert!(build_mapping(&a, &a, 1e-6).is_ok());
        let (_, used) = build_mapping_auto(&a, &a, 1e-6).unwrap();
        assert_eq!(used, 1e-6);
    }

    #[test]
    fn primal_and_dual_forms_agree() {
        let mut r = rng(4);
        for (rows, q) in [(12, 5), (30, 20), (8, 7)] {
            let a = random_matrix(&mut r, rows, q);
            let t = random_matrix(&mut r, rows, q);
            let dual = build_mapping_dual(&a, &t, 1e-3).unwrap();
            let mut gram = &a * a.transpose();
            for k in 0..rows {
                gram[(k, k)] += 1e-3;
            }
            let primal = (&t * a.transpose()) * gram.try_inverse().unwrap();
            assert!((dual - primal).abs().max() < 1e-7);
        }
    }

    #[test]
    fn apply_identity_null_and_clip() {
        let map = |w: DMatrix<f64>| TransferMap {
            source_id: 0,
            target_id: 1,
            source_dim: 2,
            target_dim: 2,
            weights: w.into(),
            ridge: 0.0,
        };
        assert_eq!(
            map(DMatrix::identity(2, 2)).apply(&[0.3, -0.4]).unwrap(),
            vec![0.3, -0.4]
        );
        assert_eq!(
            map(DMatrix::zeros(2, 2)).apply(&[0.3, -0.4]).unwrap(),
            vec![0.0, 0.0]
        );
        let scaled = map(DMatrix::from_diagonal(&DVector::from_vec(vec![3.7, 1.0])));
        assert_eq!(scaled.apply(&[1.0, 0.5]).unwrap(), vec![1.0, 0.5]);
        assert!(scaled.apply(&[1.0]).is_err());
    }

    #[test]
    fn apply_pads_and_truncates() {
        let map = TransferMap {
            source_id: 0,
            target_id: 1,
            source_dim: 1,
            target_dim: 3,
            weights: DMatrix::from_row_slice(3, 3, &[0.5, 0., 0., -0.25, 0., 0., 0.1, 9., 9.])
                .into(),
            ridge: 0.0,
        };
        assert_eq!(map.apply(&[1.0]).unwrap(), vec![0.5, -0.25, 0.1]);
    }

    #[test]
    fn transfer_between_twin_formulations() {
        let mut r = rng(5);
        let mut obj = EmbeddedObjective::random(BaseFunctionId::Ackley, 20, 3, &mut r).unwrap();
        let m = make_embedding_matrix(20, 4, &mut r).unwrap();
        let fi = Formulation::embedded(0, m.clone()).unwrap();
        let fj = Formulation::embedded(1, m).unwrap();
        let mut pi = SubPopulation::init(&fi, 10, &mut obj, &mut rng(6)).unwrap();
        let mut pj = SubPopulation::init(&fj, 10, &mut obj, &mut rng(6)).unwrap();
        pj.formulation_id = 1;
        for m in &mut pj.members {
            m.formulation_id = 1;
        }
        let best_i = pi.best().clone();
        let best_j = pj.best().fitness;
        let start = obj.eval_count();
        let used =
            cross_form_transfer(&mut pi, &mut pj, &fi, &fj, &mut obj, DEFAULT_RIDGE).unwrap();
        assert_eq!(used, 2);
        assert_eq!(obj.eval_count() - start, 2);
        assert_eq!(pi.len(), 10);
        assert_eq!(pj.len(), 10);
        assert!(pj.best().fitness <= best_j);
        let moved = pj.members.iter().any(|m| {
            m.genome
                .iter()
                .zip(&best_i.genome)
                .all(|(a, b)| (a - b).abs() < 1e-8)
        });
        assert!(
            moved,
            "donor best should arrive unchanged through an identity map"
        );
    }

    #[test]
    fn transfer_keeps_recipient_best() {
        let mut r = rng(7);
        let mut obj = EmbeddedObjective::random(BaseFunctionId::Rastrigin, 30, 5, &mut r).unwrap();
        let fi = Formulation::embedded(0, make_embedding_matrix(30, 6, &mut r).unwrap()).unwrap();
        let fj = Formulation::original(1, 30);
        let mut pi = SubPopulation::init(&fi, 8, &mut obj, &mut r).unwrap();
        let mut pj = SubPopulation::init(&fj, 8, &mut obj, &mut r).unwrap();
        for _ in 0..20 {
            let bi = pi.best().clone();
            let bj = pj.best().clone();
            cross_form_transfer(&mut pi, &mut pj, &fi, &fj, &mut obj, DEFAULT_RIDGE).unwrap();
            assert!(pi.members.contains(&bi));
            assert!(pj.members.contains(&bj));
            assert!(pi.members.iter().all(|m| m.genome.len() == 6));
            assert!(pj.members.iter().all(|m| m.genome.len() == 30));
        }
    }

    #[test]
    fn exchange_skips_genomes_the_recipient_holds() {
        let mut r = rng(8);
        let mut obj = EmbeddedObjective::random(BaseFunctionId::Griewank, 20, 3, &mut r).unwrap();
        let m = make_embedding_matrix(20, 4, &mut r).unwrap();
        let fi = Formulation::embedded(0, m.clone()).unwrap();
        let fj = Formulation::embedded(1, m).unwrap();
        let pi = SubPopulation::init(&fi, 10, &mut obj, &mut rng(9)).unwrap();
        let mut pj = pi.clone();
        pj.formulation_id = 1;
        // Square, exactly fitted maps send each best onto the other's best,
        // which the recipient already holds.
        let (to_j, to_i) = build_transfer_maps(&pi, &pj, 4, 4, DEFAULT_RIDGE).unwrap();

        let (mut a, mut b) = (pi.clone(), pj.clone());
        let start = obj.eval_count();
        let used = exchange(&mut a, &mut b, &to_j, &to_i, &fi, &fj, &mut obj, true).unwrap();
        assert_eq!(used, 0);
        assert_eq!(obj.eval_count(), start);
        assert_eq!(a.members, pi.members);

        let used = exchange(&mut a, &mut b, &to_j, &to_i, &fi, &fj, &mut obj, false).unwrap();
        assert_eq!(used, 2);
        assert_eq!(obj.eval_count() - start, 2);
    }

    #[test]
    fn exchange_rejects_mismatched_maps() {
        let mut r = rng(10);
        let mut obj = EmbeddedObjective::random(BaseFunctionId::Ackley, 20, 3, &mut r).unwrap();
        let fi = Formulation::embedded(0, make_embedding_matrix(20, 4, &mut r).unwrap()).unwrap();
        let fj = Formulation::embedded(1, make_embedding_matrix(20, 5, &mut r).unwrap()).unwrap();
        let mut pi = SubPopulation::init(&fi, 6, &mut obj, &mut r).unwrap();
        let mut pj = SubPopulation::init(&fj, 6, &mut obj, &mut r).unwrap();
        let (to_j, to_i) = build_transfer_maps(&pi, &pj, 4, 5, DEFAULT_RIDGE).unwrap();
        let err = exchange(&mut pi, &mut pj, &to_i, &to_j, &fi, &fj, &mut obj, true);
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn factored_and_dense_maps_apply_alike() {
        let mut r = rng(11);
        let a = random_matrix(&mut r, 40, 6);
        let t = random_matrix(&mut r, 40, 6);
        let factored = fit_mapping(&a, &t, 1e-4).unwrap();
        assert!(matches!(factored, MapWeights::Factored { .. }));
        let dense = MapWeights::Dense(factored.to_dense());
        let v = DVector::from_fn(40, |i, _| (i as f64 * 0.37).sin());
        assert!((factored.apply(&v) - dense.apply(&v)).amax() < 1e-12);
        assert_eq!(factored.dim(), 40);
    }
}
