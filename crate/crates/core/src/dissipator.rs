// Copyright 2026 Dissipator Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! The dissipation superoperators
//!
//! ```text
//! Dρ = aρa† - ½a†aρ - ½ρa†a + a†ρa - ½aa†ρ - ½ρaa†
//! Δρ = aρa† - ½a†aρ - ½ρa†a
//! ```
//!
//! evaluated with truncated ladder operators, together with their HS adjoints,
//! quadratic forms, dense matrix representations, spectra and kernels.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fock::{LadderOps, SystemOperator};
use crate::hs::{hs_inner, HSVector, HermitianBasis, HermitianPoint};
use crate::C64;

/// Default relative cut for the numerical null space.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DissipatorKind {
    /// `D`, symmetric under `a ↔ a†`.
    #[serde(rename = "full")]
    FullD,
    /// `Δ`, the pure-decay part of `D`.
    #[serde(rename = "delta")]
    DeltaOnly,
}

impl fmt::Display for DissipatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DissipatorKind::FullD => "full",
            DissipatorKind::DeltaOnly => "delta",
        })
    }
}

impl FromStr for DissipatorKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" | "D" => Ok(DissipatorKind::FullD),
            "delta" | "Delta" => Ok(DissipatorKind::DeltaOnly),
            other => Err(LabError::config(format!(
                "unknown dissipator {other:?} (expected full or delta)"
            ))),
        }
    }
}

/// `LρL† - ½{L†L, ρ}` with `L†L` supplied precomputed.
fn lindblad_term(
    l: &DMatrix<C64>,
    l_dag: &DMatrix<C64>,
    l_dag_l: &DMatrix<C64>,
    rho: &DMatrix<C64>,
) -> DMatrix<C64> {
    let half = C64::new(0.5, 0.0);
    l * rho * l_dag - (l_dag_l * rho + rho * l_dag_l) * half
}

/// Evaluates the dissipator without the final Hermitian projection.
pub fn apply_dissipator_raw(
    kind: DissipatorKind,
    rho: &SystemOperator,
    ops: &LadderOps,
) -> Result<SystemOperator> {
    LabError::check_dim(ops.dim(), rho.dim())?;
    let r = rho.entries();
    let (a, ad) = (ops.a.entries(), ops.a_dag.entries());
    let mut out = lindblad_term(a, ad, ops.a_dag_a.entries(), r);
    if kind == DissipatorKind::FullD {
        out += lindblad_term(ad, a, ops.a_a_dag.entries(), r);
    }
    Ok(SystemOperator::from_square(out))
}

pub fn apply_dissipator(
    kind: DissipatorKind,
    rho: &HermitianPoint,
    ops: &LadderOps,
) -> Result<HermitianPoint> {
    let raw = apply_dissipator_raw(kind, &rho.to_operator(), ops)?;
    Ok(HermitianPoint::symmetrize(raw.into_entries()))
}

/// The HS adjoint: `D† = D`, and `Δ†σ = a†σa - ½{a†a, σ}`.
pub fn hs_adjoint(
    kind: DissipatorKind,
    sigma: &HermitianPoint,
    ops: &LadderOps,
) -> Result<HermitianPoint> {
    match kind {
        DissipatorKind::FullD => apply_dissipator(kind, sigma, ops),
        DissipatorKind::DeltaOnly => {
            LabError::check_dim(ops.dim(), sigma.dim())?;
            let (a, ad) = (ops.a.entries(), ops.a_dag.entries());
            let s = sigma.matrix();
            let n = ops.a_dag_a.entries();
            let half = C64::new(0.5, 0.0);
            let out = ad * s * a - (n * s + s * n) * half;
            Ok(HermitianPoint::symmetrize(out))
        }
    }
}

/// `⟨ρ, Lρ⟩_HS`.
pub fn quadratic_form(kind: DissipatorKind, rho: &HermitianPoint, ops: &LadderOps) -> Result<f64> {
    let l_rho = apply_dissipator(kind, rho, ops)?;
    hs_inner(rho, &l_rho)
}

/// The quadratic form evaluated in the eigenbasis of `ρ`:
/// `-Σ |a_ik|² (ρ_i - ρ_k)²` for `D` and `Σ |a_ik|² (ρ_i ρ_k - ρ_k²)` for `Δ`,
/// with `a_ik = ⟨e_i, a e_k⟩`.
///
/// Both sums are invariant under rotations inside degenerate eigenspaces, so
/// no tie-breaking is applied.
pub fn eigenbasis_form(kind: DissipatorKind, rho: &HermitianPoint, ops: &LadderOps) -> Result<f64> {
    LabError::check_dim(ops.dim(), rho.dim())?;
    let (values, vectors) = rho.eigh()?;
    let a_eig = vectors.adjoint() * ops.a.entries() * &vectors;
    let d = rho.dim();
    let mut total = 0.0;
    for k in 0..d {
        for i in 0..d {
            let w = a_eig[(i, k)].norm_sqr();
            let (ri, rk) = (values[i], values[k]);
            total += match kind {
                DissipatorKind::FullD => -w * (ri - rk) * (ri - rk),
                DissipatorKind::DeltaOnly => w * (ri * rk - rk * rk),
            };
        }
    }
    Ok(total)
}

/// Real matrix of a superoperator in an orthonormal Hermitian basis,
/// `M_{αβ} = ⟨B_α, L(B_β)⟩`.
#[derive(Clone, Debug)]
pub struct SuperOperatorMatrix {
    matrix: DMatrix<f64>,
    basis: Arc<HermitianBasis>,
}

impl SuperOperatorMatrix {
    pub fn from_parts(matrix: DMatrix<f64>, basis: Arc<HermitianBasis>) -> Result<Self> {
        LabError::check_dim(basis.len(), matrix.nrows())?;
        LabError::check_dim(basis.len(), matrix.ncols())?;
        Ok(Self { matrix, basis })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn basis(&self) -> &Arc<HermitianBasis> {
        &self.basis
    }

    pub fn apply(&self, v: &HSVector) -> Result<HSVector> {
        LabError::check_dim(self.matrix.ncols(), v.len())?;
        Ok(HSVector::new(&self.matrix * v.coords()))
    }

    pub fn apply_point(&self, rho: &HermitianPoint) -> Result<HermitianPoint> {
        let v = self.basis.vectorize(rho)?;
        self.basis.devectorize(&self.apply(&v)?)
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.amax()
    }

    /// `max |M - Mᵀ| / max |M|`.
    pub fn transpose_residual(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0_f64;
        for j in 0..n {
            for i in 0..j {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)]).abs());
            }
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// `(M + Mᵀ)/2`.
    pub fn symmetric_part(&self) -> DMatrix<f64> {
        (&self.matrix + self.matrix.transpose()) * 0.5
    }

    pub fn singular_values(&self) -> Result<Vec<f64>> {
        singular_values(&self.matrix)
    }
}

/// Builds the matrix of `map` column by column, in parallel.
pub fn superoperator_matrix<F>(basis: &Arc<HermitianBasis>, map: F) -> Result<SuperOperatorMatrix>
where
    F: Fn(&HermitianPoint) -> Result<HermitianPoint> + Sync,
{
    let columns: Vec<DVector<f64>> = (0..basis.len())
        .into_par_iter()
        .map(|beta| {
            let image = map(&basis.element(beta))?;
            basis.coordinates_of(image.matrix())
        })
        .collect::<Result<_>>()?;
    Ok(SuperOperatorMatrix {
        matrix: DMatrix::from_columns(&columns),
        basis: Arc::clone(basis),
    })
}

pub fn dissipator_matrix(
    kind: DissipatorKind,
    ops: &LadderOps,
    basis: &Arc<HermitianBasis>,
) -> Result<SuperOperatorMatrix> {
    LabError::check_dim(ops.dim(), basis.dim())?;
    superoperator_matrix(basis, |b| apply_dissipator(kind, b, ops))
}

/// Eigenvalue summary of a superoperator matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Spectrum {
    /// Sorted ascending by real part, then imaginary part.
    pub eigenvalues: Vec<C64>,
    /// Eigenvalues with `|λ| ≤ zero_threshold`.
    pub zero_count: usize,
    pub zero_threshold: f64,
    /// `-max Re λ` over eigenvalues strictly below the zero cluster.
    pub spectral_gap: Option<f64>,
    pub max_real_part: f64,
    /// Largest eigenvalue of `(M + Mᵀ)/2`; positive means a positive quadratic form exists.
    pub symmetrized_max: f64,
    pub transpose_residual: f64,
}

pub const SYMMETRY_TOL: f64 = 1e-10;
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-10;

fn symmetric_eigenvalues(m: DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = nalgebra::SymmetricEigen::try_new(m, f64::EPSILON, 0)
        .ok_or_else(|| LabError::Numerical("symmetric eigensolver did not converge".into()))?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Spectrum of an arbitrary superoperator matrix. Symmetric matrices (transpose
/// residual within [`SYMMETRY_TOL`]) go through the symmetric solver and
/// report exactly real eigenvalues.
pub fn spectrum_of(m: &SuperOperatorMatrix) -> Result<Spectrum> {
    let transpose_residual = m.transpose_residual();
    let sym = m.symmetric_part();
    let sym_values = symmetric_eigenvalues(sym.clone())?;
    let mut eigenvalues: Vec<C64> = if transpose_residual <= SYMMETRY_TOL {
        sym_values.iter().map(|&x| C64::new(x, 0.0)).collect()
    } else {
        let schur = nalgebra::Schur::try_new(m.matrix().clone(), f64::EPSILON, 0)
            .ok_or_else(|| LabError::Numerical("Schur decomposition did not converge".into()))?;
        schur.complex_eigenvalues().iter().copied().collect()
    };
    eigenvalues.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));

    let radius = eigenvalues.iter().fold(0.0_f64, |r, z| r.max(z.norm()));
    let zero_threshold = ZERO_EIGENVALUE_TOL * radius.max(1.0);
    let zero_count = eigenvalues.iter().filter(|z| z.norm() <= zero_threshold).count();
    let spectral_gap = eigenvalues
        .iter()
        .filter(|z| z.norm() > zero_threshold && z.re < -zero_threshold)
        .map(|z| -z.re)
        .min_by(f64::total_cmp);
    let max_real_part = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(Spectrum {
        eigenvalues,
        zero_count,
        zero_threshold,
        spectral_gap,
        max_real_part,
        symmetrized_max: *sym_values.last().unwrap_or(&0.0),
        transpose_residual,
    })
}

pub fn dissipator_spectrum(
    kind: DissipatorKind,
    ops: &LadderOps,
    basis: &Arc<HermitianBasis>,
) -> Result<Spectrum> {
    spectrum_of(&dissipator_matrix(kind, ops, basis)?)
}

fn svd(m: &DMatrix<f64>) -> Result<nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    nalgebra::SVD::try_new(m.clone(), false, true, f64::EPSILON, 0)
        .ok_or_else(|| LabError::Numerical("SVD did not converge".into()))
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let s = nalgebra::SVD::try_new(m.clone(), false, false, f64::EPSILON, 0)
        .ok_or_else(|| LabError::Numerical("SVD did not converge".into()))?;
    let mut v: Vec<f64> = s.singular_values.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// Orthonormal basis of the numerical null space: right singular vectors whose
/// singular value is below `tol · σ_max`.
pub fn kernel_basis(m: &SuperOperatorMatrix, tol: f64) -> Result<Vec<HSVector>> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(LabError::config(format!(
            "kernel tolerance must lie in (0, 1), got {tol}"
        )));
    }
    let decomposition = svd(m.matrix())?;
    let v_t = decomposition
        .v_t
        .as_ref()
        .ok_or_else(|| LabError::Numerical("SVD returned no right singular vectors".into()))?;
    let sigma = &decomposition.singular_values;
    let sigma_max = sigma.amax();
    Ok((0..sigma.len())
        .filter(|&k| sigma[k] <= tol * sigma_max)
        .map(|k| HSVector::new(v_t.row(k).transpose()))
        .collect())
}

/// Orthogonal projection of `v` onto the span of orthonormal `kernel`.
pub fn project_onto(kernel: &[HSVector], v: &HSVector) -> HSVector {
    let mut out = DVector::zeros(v.len());
    for k in kernel {
        out.axpy(k.coords().dot(v.coords()), k.coords(), 1.0);
    }
    HSVector::new(out)
}
