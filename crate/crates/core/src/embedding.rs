//! Random-embedding formulations of the target problem.
//!
//! A formulation searches `y` in `[-1, 1]^d`; its genomes reach the target
//! through `x = clip(M y)` for a Gaussian `M`, or through the identity for the
//! original problem.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::objective::EmbeddedObjective;

#[derive(Clone, Debug, PartialEq)]
pub enum FormulationKind {
    /// `x = M y` with `M` of shape `D x d`.
    Embedded(DMatrix<f64>),
    /// The target problem itself, `d = D`.
    Original,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Formulation {
    pub id: usize,
    kind: FormulationKind,
    dim: usize,
    ambient_dim: usize,
}

impl Formulation {
    pub fn embedded(id: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let (ambient_dim, dim) = matrix.shape();
        if dim == 0 || dim >= ambient_dim {
            return invalid(format!(
                "embedding matrix must be D x d with 1 <= d < D, got {ambient_dim}x{dim}"
            ));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return invalid("embedding matrix has non-finite entries");
        }
        Ok(Self {
            id,
            kind: FormulationKind::Embedded(matrix),
            dim,
            ambient_dim,
        })
    }

    pub fn original(id: usize, ambient_dim: usize) -> Self {
        Self {
            id,
            kind: FormulationKind::Original,
            dim: ambient_dim,
            ambient_dim,
        }
    }

    pub fn kind(&self) -> &FormulationKind {
        &self.kind
    }

    /// The embedding matrix, `None` for the original problem.
    pub fn matrix(&self) -> Option<&DMatrix<f64>> {
        match &self.kind {
            FormulationKind::Embedded(m) => Some(m),
            FormulationKind::Original => None,
        }
    }

    /// Genome length.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn is_original(&self) -> bool {
        matches!(self.kind, FormulationKind::Original)
    }

    /// Maps a genome to the ambient space: `M y`, or `y` for the original problem.
    pub fn lift(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.dim {
            return invalid(format!(
                "formulation {} expects genomes of length {}, got {}",
                self.id,
                self.dim,
                y.len()
            ));
        }
        match &self.kind {
            FormulationKind::Original => Ok(y.to_vec()),
            FormulationKind::Embedded(m) => {
                let x = m * DVector::from_column_slice(y);
                Ok(x.as_slice().to_vec())
            }
        }
    }

    /// `g(y) = F(clip(lift(y)))`; consumes exactly one evaluation.
    pub fn evaluate(&self, objective: &mut EmbeddedObjective, y: &[f64]) -> Result<f64> {
        let x = project_to_box(&self.lift(y)?)?;
        objective.evaluate(&x)
    }

    /// The ambient point a genome stands for.
    pub fn to_ambient(&self, y: &[f64]) -> Result<Vec<f64>> {
        project_to_box(&self.lift(y)?)
    }
}

/// Ordered formulations with ids `0..N`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormulationSet {
    pub formulations: Vec<Formulation>,
    pub includes_original: bool,
}

impl FormulationSet {
    /// Embedded formulations for each entry of `dims`, in order, followed by
    /// the original problem when requested.
    pub fn generate(
        ambient_dim: usize,
        dims: &[usize],
        include_original: bool,
        rng: &mut crate::Rng,
    ) -> Result<Self> {
        if dims.is_empty() && !include_original {
            return invalid("a formulation set needs at least one formulation");
        }
        let mut formulations = Vec::with_capacity(dims.len() + 1);
        for (id, &d) in dims.iter().enumerate() {
            let matrix = make_embedding_matrix(ambient_dim, d, rng)?;
            formulations.push(Formulation::embedded(id, matrix)?);
        }
        if include_original {
            formulations.push(Formulation::original(dims.len(), ambient_dim));
        }
        Ok(Self {
            formulations,
            includes_original: include_original,
        })
    }

    pub fn len(&self) -> usize {
        self.formulations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulations.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Formulation> {
        self.formulations.iter()
    }
}

impl std::ops::Index<usize> for FormulationSet {
    type Output = Formulation;

    fn index(&self, id: usize) -> &Formulation {
        &self.formulations[id]
    }
}

/// A `D x d` matrix with i.i.d. standard normal entries.
pub fn make_embedding_matrix(
    ambient_dim: usize,
    dim: usize,
    rng: &mut crate::Rng,
) -> Result<DMatrix<f64>> {
    if dim == 0 || dim >= ambient_dim {
        return invalid(format!(
            "embedding dimension must satisfy 1 <= d < D, got d={dim}, D={ambient_dim}"
        ));
    }
    Ok(DMatrix::from_fn(ambient_dim, dim, |_, _| {
        rng.sample::<f64, _>(StandardNormal)
    }))
}

/// Euclidean projection onto `[-1, 1]^n`, which for a box is a coordinate-wise clip.
pub fn project_to_box(x: &[f64]) -> Result<Vec<f64>> {
    if x.iter().any(|v| !v.is_finite()) {
        return invalid("cannot project a non-finite point");
    }
    Ok(x.iter().map(|v| v.clamp(-1.0, 1.0)).collect())
}
