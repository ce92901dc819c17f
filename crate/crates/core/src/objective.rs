//! Benchmark functions and their high-dimensional embedded wrappers.
//!
//! Every embedded objective is defined on the unit box `[-1, 1]^D`. A random
//! rotation `R` and shift `s` hide the effective subspace: only the first
//! `d_e` coordinates of `R (x - s)` reach the base function, the remaining
//! `D - d_e` rotated directions form the constant subspace.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

/// Half-width of the uniform shift distribution in normalized coordinates.
pub const SHIFT_HALF_WIDTH: f64 = 0.25;

const WEIERSTRASS_TERMS: usize = 21;

/// The six base benchmark functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseFunctionId {
    Ackley,
    Rastrigin,
    Weierstrass,
    Rosenbrock,
    Griewank,
    Elliptic,
}

impl BaseFunctionId {
    pub const ALL: [BaseFunctionId; 6] = [
        BaseFunctionId::Ackley,
        BaseFunctionId::Rastrigin,
        BaseFunctionId::Weierstrass,
        BaseFunctionId::Rosenbrock,
        BaseFunctionId::Griewank,
        BaseFunctionId::Elliptic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseFunctionId::Ackley => "ackley",
            BaseFunctionId::Rastrigin => "rastrigin",
            BaseFunctionId::Weierstrass => "weierstrass",
            BaseFunctionId::Rosenbrock => "rosenbrock",
            BaseFunctionId::Griewank => "griewank",
            BaseFunctionId::Elliptic => "elliptic",
        }
    }

    /// Native search range `(lower, upper)` of every coordinate.
    pub fn native_range(self) -> (f64, f64) {
        match self {
            BaseFunctionId::Ackley => (-32.0, 32.0),
            BaseFunctionId::Rastrigin => (-5.0, 5.0),
            BaseFunctionId::Weierstrass => (-0.5, 0.5),
            BaseFunctionId::Rosenbrock => (-5.0, 5.0),
            BaseFunctionId::Griewank => (-500.0, 500.0),
            BaseFunctionId::Elliptic => (-5.0, 5.0),
        }
    }

    /// Global minimizer in native coordinates.
    pub fn native_optimum(self, dim: usize) -> Vec<f64> {
        match self {
            BaseFunctionId::Rosenbrock => vec![1.0; dim],
            _ => vec![0.0; dim],
        }
    }

    /// Global minimizer in normalized `[-1, 1]` coordinates.
    pub fn normalized_optimum(self, dim: usize) -> Vec<f64> {
        self.native_optimum(dim)
            .into_iter()
            .map(|x| self.to_normalized(x))
            .collect()
    }

    pub fn to_native(self, z: f64) -> f64 {
        let (lo, hi) = self.native_range();
        lo + (z + 1.0) * (hi - lo) / 2.0
    }

    pub fn to_normalized(self, x: f64) -> f64 {
        let (lo, hi) = self.native_range();
        2.0 * (x - lo) / (hi - lo) - 1.0
    }

    /// Evaluates the benchmark formula on native coordinates.
    ///
    /// The caller guarantees `x` is non-empty and finite.
    pub fn eval_native(self, x: &[f64]) -> f64 {
        let n = x.len() as f64;
        let value = match self {
            BaseFunctionId::Ackley => {
                let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
                let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
                -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
            }
            BaseFunctionId::Rastrigin => {
                10.0 * n
                    + x.iter()
                        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
                        .sum::<f64>()
            }
            BaseFunctionId::Weierstrass => {
                let inner = |v: f64| {
                    let mut a = 1.0;
                    let mut b = 1.0;
                    let mut acc = 0.0;
                    for _ in 0..WEIERSTRASS_TERMS {
                        acc += a * (2.0 * PI * b * (v + 0.5)).cos();
                        a *= 0.5;
                        b *= 3.0;
                    }
                    acc
                };
                let offset = inner(0.0);
                x.iter().map(|&v| inner(v)).sum::<f64>() - n * offset
            }
            BaseFunctionId::Rosenbrock => x
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
                .sum(),
            BaseFunctionId::Griewank => {
                let sum = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let prod = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product::<f64>();
                sum - prod + 1.0
            }
            BaseFunctionId::Elliptic => {
                let last = x.len().saturating_sub(1).max(1) as f64;
                x.iter()
                    .enumerate()
                    .map(|(i, v)| 10f64.powf(6.0 * i as f64 / last) * v * v)
                    .sum()
            }
        };
        // Cancellation near the optimum can leave a rounding-level negative residue.
        value.max(0.0)
    }
}

impl fmt::Display for BaseFunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseFunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        BaseFunctionId::ALL
            .into_iter()
            .find(|f| f.name() == lower)
            .ok_or_else(|| Error::InvalidInput(format!("unknown function `{s}`")))
    }
}

/// Evaluates a base function at normalized coordinates `z`.
///
/// Each `z_i` is mapped affinely from `[-1, 1]` onto the native range before
/// the formula is applied. Values outside `[-1, 1]` are accepted.
pub fn eval_base(function: BaseFunctionId, z: &[f64]) -> Result<f64> {
    if z.is_empty() {
        return invalid("base function evaluated on an empty vector");
    }
    if z.iter().any(|v| !v.is_finite()) {
        return invalid("base function evaluated on a non-finite vector");
    }
    let native: Vec<f64> = z.iter().map(|&v| function.to_native(v)).collect();
    Ok(function.eval_native(&native))
}

/// Draws a Haar-distributed `dim x dim` orthogonal matrix.
///
/// Q comes from the QR factorization of a standard Gaussian matrix with the
/// triangular factor normalized to a positive diagonal, which nalgebra's
/// Householder QR already guarantees.
pub fn random_rotation(dim: usize, rng: &mut crate::Rng) -> Result<DMatrix<f64>> {
    if dim == 0 {
        return invalid("rotation dimension must be positive");
    }
    let gaussian = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    Ok(gaussian.qr().q())
}

/// A rotated and shifted high-dimensional wrapper around a base function.
///
/// `F(x) = base(first d_e coordinates of R (x - s))` for `x` in `[-1, 1]^D`.
/// The rotation is shared between clones so one objective instance can be
/// handed to several runs, each with its own evaluation counter.
#[derive(Clone, Debug)]
pub struct EmbeddedObjective {
    base: BaseFunctionId,
    effective_dim: usize,
    rotation: Arc<DMatrix<f64>>,
    shift: Arc<Vec<f64>>,
    eval_count: u64,
}

impl EmbeddedObjective {
    /// Builds an objective with a fresh random rotation and shift.
    ///
    /// The shift is redrawn until the constructed optimum lies in the box.
    pub fn random(
        base: BaseFunctionId,
        ambient_dim: usize,
        effective_dim: usize,
        rng: &mut crate::Rng,
    ) -> Result<Self> {
        check_dims(ambient_dim, effective_dim)?;
        let rotation = random_rotation(ambient_dim, rng)?;
        let offset = optimum_offset(base, effective_dim, &rotation);
        let shift = loop {
            let shift: Vec<f64> = (0..ambient_dim)
                .map(|_| rng.random_range(-SHIFT_HALF_WIDTH..=SHIFT_HALF_WIDTH))
                .collect();
            if shift.iter().zip(&offset).all(|(s, o)| (s + o).abs() <= 1.0) {
                break shift;
            }
        };
        Ok(Self {
            base,
            effective_dim,
            rotation: Arc::new(rotation),
            shift: Arc::new(shift),
            eval_count: 0,
        })
    }

    /// Builds an objective from an explicit rotation and shift.
    pub fn from_parts(
        base: BaseFunctionId,
        effective_dim: usize,
        rotation: DMatrix<f64>,
        shift: Vec<f64>,
    ) -> Result<Self> {
        let ambient_dim = rotation.nrows();
        check_dims(ambient_dim, effective_dim)?;
        if rotation.ncols() != ambient_dim || shift.len() != ambient_dim {
            return invalid(format!(
                "rotation {}x{} and shift of length {} do not describe a {ambient_dim}-dimensional objective",
                rotation.nrows(),
                rotation.ncols(),
                shift.len()
            ));
        }
        if rotation.iter().chain(&shift).any(|v| !v.is_finite()) {
            return invalid("rotation and shift must be finite");
        }
        Ok(Self {
            base,
            effective_dim,
            rotation: Arc::new(rotation),
            shift: Arc::new(shift),
            eval_count: 0,
        })
    }

    pub fn base(&self) -> BaseFunctionId {
        self.base
    }

    pub fn ambient_dim(&self) -> usize {
        self.rotation.nrows()
    }

    pub fn effective_dim(&self) -> usize {
        self.effective_dim
    }

    pub fn rotation(&self) -> &DMatrix<f64> {
        &self.rotation
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    /// Number of counted evaluations so far.
    pub fn eval_count(&self) -> u64 {
        self.eval_count
    }

    /// Resets the counter for a fresh run sharing this instance's rotation and shift.
    pub fn fresh_copy(&self) -> Self {
        Self {
            eval_count: 0,
            ..self.clone()
        }
    }

    /// Evaluates `F(x)` and consumes one function evaluation.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        let value = self.evaluate_uncounted(x)?;
        self.eval_count += 1;
        Ok(value)
    }

    /// Evaluates `F(x)` without touching the counter. Meant for checking
    /// results after a run, never for spending search effort.
    pub fn evaluate_uncounted(&self, x: &[f64]) -> Result<f64> {
        let dim = self.ambient_dim();
        if x.len() != dim {
            return invalid(format!("expected a point of length {dim}, got {}", x.len()));
        }
        if x.iter().any(|v| !(-1.0..=1.0).contains(v)) {
            return invalid("point lies outside [-1, 1]^D; project it first");
        }
        eval_base(self.base, &self.effective_coordinates(x))
    }

    /// First `d_e` coordinates of `R (x - s)`.
    ///
    /// `x - s` is split exactly into a head and tail and the products are
    /// accumulated with error-free transformations, so the result is
    /// accurate to a few ulps independently of `D`.
    pub fn effective_coordinates(&self, x: &[f64]) -> Vec<f64> {
        let mut sum = vec![0.0; self.effective_dim];
        let mut comp = vec![0.0; self.effective_dim];
        for (j, (&xj, &sj)) in x.iter().zip(self.shift.iter()).enumerate() {
            let (head, tail) = two_diff(xj, sj);
            if head == 0.0 {
                continue;
            }
            let column = &self.rotation.column(j);
            for k in 0..self.effective_dim {
                let r = column[k];
                let p = r * head;
                let p_err = r.mul_add(head, -p);
                let (s, s_err) = two_sum(sum[k], p);
                sum[k] = s;
                comp[k] += s_err + p_err + r * tail;
            }
        }
        sum.iter().zip(&comp).map(|(s, c)| s + c).collect()
    }

    /// The global minimizer `s + R^T pad(z*)`, where `z*` is the normalized base optimum.
    pub fn known_optimum(&self) -> Vec<f64> {
        optimum_offset(self.base, self.effective_dim, &self.rotation)
            .iter()
            .zip(self.shift.iter())
            .map(|(o, s)| o + s)
            .collect()
    }
}

/// `a + b = s + e` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `a - b = d + e` exactly.
fn two_diff(a: f64, b: f64) -> (f64, f64) {
    two_sum(a, -b)
}

fn check_dims(ambient_dim: usize, effective_dim: usize) -> Result<()> {
    if effective_dim == 0 || effective_dim >= ambient_dim {
        return invalid(format!(
            "effective dimension must satisfy 1 <= d_e < D, got d_e={effective_dim}, D={ambient_dim}"
        ));
    }
    Ok(())
}

/// `R^T pad(z*, 0)`: a combination of the first `d_e` rows of `R`.
fn optimum_offset(base: BaseFunctionId, effective_dim: usize, rotation: &DMatrix<f64>) -> Vec<f64> {
    let z_star = base.normalized_optimum(effective_dim);
    (0..rotation.ncols())
        .map(|j| {
            z_star
                .iter()
                .enumerate()
                .map(|(k, z)| rotation[(k, j)] * z)
                .sum()
        })
        .collect()
}
