// Copyright 2026 Dissipator Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! The real Hilbert space of Hermitian `d×d` matrices with `⟨ρ₁, ρ₂⟩ = tr(ρ₁ρ₂)`.
//!
//! Complex matrices are only the storage format. Superoperators become real
//! `d²×d²` matrices once coordinates are taken in a [`HermitianBasis`].

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{LabError, Result};
use crate::fock::SystemOperator;
use crate::C64;

pub const ATOL: f64 = 1e-12;
pub const RTOL: f64 = 1e-10;

/// `|x - y| ≤ atol + rtol · max(|x|, |y|)`.
pub fn close(x: f64, y: f64, atol: f64, rtol: f64) -> bool {
    (x - y).abs() <= atol + rtol * x.abs().max(y.abs())
}

/// A Hermitian matrix viewed as a point of HS.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianPoint {
    matrix: DMatrix<C64>,
}

impl HermitianPoint {
    /// Accepts `m` if `‖M - M†‖_max ≤ 1e-12 · ‖M‖_max`, storing `(M + M†)/2`.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        let op = SystemOperator::new(m)?;
        let residual = op.hermiticity_residual();
        if residual > 1e-12 * op.max_abs() {
            return Err(LabError::NotHermitian { residual });
        }
        Ok(Self::symmetrize(op.into_entries()))
    }

    pub fn from_operator(op: &SystemOperator) -> Result<Self> {
        Self::new(op.entries().clone())
    }

    /// `(M + M†)/2` with no residual check.
    pub fn symmetrize(m: DMatrix<C64>) -> Self {
        let adj = m.adjoint();
        Self {
            matrix: (m + adj) * C64::new(0.5, 0.0),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Self {
            matrix: DMatrix::from_diagonal(&d),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::from_element(dim, dim, C64::new(0.0, 0.0)),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn to_operator(&self) -> SystemOperator {
        SystemOperator::from_square(self.matrix.clone())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn scale(&self, factor: f64) -> HermitianPoint {
        HermitianPoint {
            matrix: &self.matrix * C64::new(factor, 0.0),
        }
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, factor: f64, other: &HermitianPoint) -> Result<HermitianPoint> {
        LabError::check_dim(self.dim(), other.dim())?;
        Ok(HermitianPoint {
            matrix: &self.matrix + &other.matrix * C64::new(factor, 0.0),
        })
    }

    pub fn sub(&self, other: &HermitianPoint) -> Result<HermitianPoint> {
        self.add_scaled(-1.0, other)
    }

    /// The 2×2 spin block `ρ_{n,n'} = ⟨n|ρ|n'⟩`.
    pub fn spin_block(&self, n: usize, n_prime: usize) -> Matrix2<C64> {
        self.matrix
            .fixed_view::<2, 2>(2 * n, 2 * n_prime)
            .into_owned()
    }

    /// Eigenvalues (ascending) and the matching orthonormal eigenvectors as columns.
    pub fn eigh(&self) -> Result<(Vec<f64>, DMatrix<C64>)> {
        let eig = nalgebra::SymmetricEigen::try_new(self.matrix.clone(), f64::EPSILON, 0)
            .ok_or_else(|| LabError::Numerical("Hermitian eigensolver did not converge".into()))?;
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
        Ok((values, vectors))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (values, _) = self.eigh()?;
        Ok(values[0])
    }
}

/// `tr(ρ₁ρ₂)`; real for Hermitian inputs.
pub fn hs_inner(rho1: &HermitianPoint, rho2: &HermitianPoint) -> Result<f64> {
    LabError::check_dim(rho1.dim(), rho2.dim())?;
    Ok(trace_product(&rho1.matrix, &rho2.matrix).re)
}

/// `tr(AB)` without forming the product.
pub(crate) fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let d = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..d {
        for i in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Frobenius norm, `√tr ρ²`.
pub fn hs_norm(rho: &HermitianPoint) -> f64 {
    rho.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Coordinates of a Hermitian matrix in a [`HermitianBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct HSVector {
    coords: DVector<f64>,
}

impl HSVector {
    pub fn new(coords: DVector<f64>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn into_coords(self) -> DVector<f64> {
        self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }
}

/// Orthonormal basis of HS for a fixed dimension `d`.
///
/// Elements `0..d` are diagonal, starting with `I/√d`. They are followed by
/// one `(E_ij + E_ji)/√2`, `i(E_ij - E_ji)/√2` pair for each `i < j`, pairs
/// listed in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianBasis {
    dim: usize,
    /// Row `α` holds the diagonal of element `α` for `α < d`.
    diagonal: DMatrix<f64>,
    pairs: Vec<(usize, usize)>,
}

/// Basis of the `d²`-dimensional space HS with `I/√d` first.
pub fn standard_hermitian_basis(dim: usize) -> Result<HermitianBasis> {
    if dim == 0 {
        return Err(LabError::config("basis dimension must be at least 1"));
    }
    // Gram-Schmidt over {I/√d, E_00, .., E_{d-2,d-2}}, applied twice.
    let mut rows: Vec<DVector<f64>> = Vec::with_capacity(dim);
    rows.push(DVector::from_element(dim, 1.0 / (dim as f64).sqrt()));
    for k in 0..dim - 1 {
        let mut v = DVector::zeros(dim);
        v[k] = 1.0;
        for _ in 0..2 {
            for q in &rows {
                let proj = q.dot(&v);
                v.axpy(-proj, q, 1.0);
            }
        }
        let norm = v.norm();
        rows.push(v / norm);
    }
    let diagonal = DMatrix::from_fn(dim, dim, |a, i| rows[a][i]);
    let pairs = (0..dim)
        .flat_map(|i| (i + 1..dim).map(move |j| (i, j)))
        .collect();
    Ok(HermitianBasis {
        dim,
        diagonal,
        pairs,
    })
}

impl HermitianBasis {
    /// Matrix dimension `d` (the basis has `d²` elements).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.dim * self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn element(&self, alpha: usize) -> HermitianPoint {
        let d = self.dim;
        assert!(alpha < self.len(), "basis index {alpha} out of range");
        let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        if alpha < d {
            for i in 0..d {
                m[(i, i)] = C64::new(self.diagonal[(alpha, i)], 0.0);
            }
        } else {
            let (i, j) = self.pairs[(alpha - d) / 2];
            let h = std::f64::consts::FRAC_1_SQRT_2;
            if (alpha - d).is_multiple_of(2) {
                m[(i, j)] = C64::new(h, 0.0);
                m[(j, i)] = C64::new(h, 0.0);
            } else {
                m[(i, j)] = C64::new(0.0, h);
                m[(j, i)] = C64::new(0.0, -h);
            }
        }
        HermitianPoint { matrix: m }
    }

    pub fn elements(&self) -> Vec<HermitianPoint> {
        (0..self.len()).map(|a| self.element(a)).collect()
    }

    /// Coordinates `⟨B_α, ρ⟩`.
    pub fn vectorize(&self, rho: &HermitianPoint) -> Result<HSVector> {
        Ok(HSVector::new(self.coordinates_of(rho.matrix())?))
    }

    /// Coordinates of the Hermitian part of an arbitrary square matrix.
    pub(crate) fn coordinates_of(&self, m: &DMatrix<C64>) -> Result<DVector<f64>> {
        let d = self.dim;
        LabError::check_dim(d, m.nrows())?;
        LabError::check_dim(d, m.ncols())?;
        let mut out = DVector::zeros(self.len());
        let diag = DVector::from_iterator(d, (0..d).map(|i| m[(i, i)].re));
        out.rows_mut(0, d).copy_from(&(&self.diagonal * diag));
        let s2 = std::f64::consts::SQRT_2;
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            // Hermitian part: (m_ij + conj m_ji)/2
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out[d + 2 * p] = s2 * z.re;
            out[d + 2 * p + 1] = s2 * z.im;
        }
        Ok(out)
    }

    pub fn devectorize(&self, v: &HSVector) -> Result<HermitianPoint> {
        let d = self.dim;
        LabError::check_dim(self.len(), v.len())?;
        let c = v.coords();
        let diag = self.diagonal.transpose() * c.rows(0, d);
        let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        for i in 0..d {
            m[(i, i)] = C64::new(diag[i], 0.0);
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            let z = C64::new(h * c[d + 2 * p], h * c[d + 2 * p + 1]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
        Ok(HermitianPoint { matrix: m })
    }
}

/// Seeded generator of random Hermitian and density matrices.
#[derive(Clone, Debug)]
pub struct HermitianSampler {
    rng: ChaCha8Rng,
}

impl HermitianSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Matrix of i.i.d. complex Gaussians with `E|g|² = sigma²`.
    fn gaussian(&mut self, dim: usize, sigma: f64) -> DMatrix<C64> {
        let normal = Normal::new(0.0, sigma * std::f64::consts::FRAC_1_SQRT_2)
            .expect("finite standard deviation");
        DMatrix::from_fn(dim, dim, |_, _| {
            C64::new(normal.sample(&mut self.rng), normal.sample(&mut self.rng))
        })
    }

    /// `G + G†` with entry deviation `scale/√2` for `G`.
    pub fn hermitian(&mut self, dim: usize, scale: f64) -> HermitianPoint {
        let g = self.gaussian(dim, scale * std::f64::consts::FRAC_1_SQRT_2);
        let adj = g.adjoint();
        HermitianPoint { matrix: g + adj }
    }

    /// `GG† / tr(GG†)`.
    pub fn density(&mut self, dim: usize) -> HermitianPoint {
        loop {
            let g = self.gaussian(dim, 1.0);
            let gram = &g * g.adjoint();
            let tr = gram.trace().re;
            if tr > 0.0 {
                return HermitianPoint::symmetrize(gram / C64::new(tr, 0.0));
            }
        }
    }
}

pub fn random_hermitian(dim: usize, scale: f64, seed: u64) -> HermitianPoint {
    HermitianSampler::new(seed).hermitian(dim, scale)
}

pub fn random_density(dim: usize, seed: u64) -> HermitianPoint {
    HermitianSampler::new(seed).density(dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{basis_index, Spin, SystemOperator, TruncationConfig};

    fn projector(n: usize, level: usize) -> HermitianPoint {
        let cfg = TruncationConfig::new(n).unwrap();
        HermitianPoint::from_operator(&SystemOperator::projector(cfg, level, Spin::Up).unwrap())
            .unwrap()
    }

    #[test]
    fn construction_rejects_non_hermitian() {
        let mut m = DMatrix::from_element(2, 2, C64::new(0.0, 0.0));
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(
            HermitianPoint::new(m),
            Err(LabError::NotHermitian { .. })
        ));
        let rect = DMatrix::from_element(2, 3, C64::new(0.0, 0.0));
        assert!(HermitianPoint::new(rect).is_err());
    }

    #[test]
    fn construction_symmetrizes_tiny_residual() {
        let mut m = DMatrix::identity(3, 3);
        m[(0, 1)] = C64::new(0.5, 1e-14);
        m[(1, 0)] = C64::new(0.5, 0.0);
        let h = HermitianPoint::new(m).unwrap();
        assert_eq!(h.to_operator().hermiticity_residual(), 0.0);
    }

    #[test]
    fn inner_product_examples() {
        let p0 = projector(3, 0);
        let p1 = projector(3, 1);
        assert_eq!(hs_inner(&p0, &p0).unwrap(), 1.0);
        assert_eq!(hs_inner(&p0, &p1).unwrap(), 0.0);
        let mut diag = vec![0.0; 6];
        diag[basis_index(0, Spin::Up)] = 2.0;
        diag[basis_index(1, Spin::Up)] = 1.0;
        let rho = HermitianPoint::from_real_diagonal(&diag);
        assert_eq!(hs_inner(&rho, &rho).unwrap(), 5.0);
        assert!(hs_inner(&rho, &HermitianPoint::zeros(4)).is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(hs_norm(&HermitianPoint::zeros(4)), 0.0);
        assert!((hs_norm(&HermitianPoint::identity(8)) - 8f64.sqrt()).abs() < 1e-15);
        assert!((hs_norm(&projector(4, 2)) - 1.0).abs() < 1e-15);
        let v = DVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let rank_one = HermitianPoint::new(&v * v.adjoint()).unwrap();
        assert!((hs_norm(&rank_one) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn norm_matches_spin_block_sum() {
        let n = 5;
        let mut sampler = HermitianSampler::new(7);
        for _ in 0..20 {
            let rho = sampler.hermitian(2 * n, 1.0);
            let mut blocks = 0.0;
            for a in 0..n {
                for b in 0..n {
                    let blk = rho.spin_block(a, b);
                    let blk_t = rho.spin_block(b, a);
                    blocks += (blk * blk_t).trace().re;
                }
            }
            let full = hs_norm(&rho).powi(2);
            assert!(close(blocks, full, ATOL, RTOL), "{blocks} vs {full}");
        }
    }

    #[test]
    fn basis_is_orthonormal_with_identity_first() {
        for d in [1, 2, 3, 4, 6] {
            let basis = standard_hermitian_basis(d).unwrap();
            let elems = basis.elements();
            assert_eq!(elems.len(), d * d);
            let id = HermitianPoint::identity(d).scale(1.0 / (d as f64).sqrt());
            assert!(hs_norm(&elems[0].sub(&id).unwrap()) < 1e-15);
            for (a, ea) in elems.iter().enumerate() {
                for (b, eb) in elems.iter().enumerate() {
                    let g = hs_inner(ea, eb).unwrap();
                    let target = if a == b { 1.0 } else { 0.0 };
                    assert!((g - target).abs() < 1e-12, "d={d} ({a},{b}) -> {g}");
                }
            }
        }
        assert!(standard_hermitian_basis(0).is_err());
        let b4 = standard_hermitian_basis(4).unwrap();
        assert!(hs_norm(&b4.element(0).sub(&HermitianPoint::identity(4).scale(0.5)).unwrap()) < 1e-15);
    }

    #[test]
    fn vectorize_unit_and_zero() {
        let basis = standard_hermitian_basis(3).unwrap();
        for a in 0..basis.len() {
            let v = basis.vectorize(&basis.element(a)).unwrap();
            for b in 0..basis.len() {
                let t = if a == b { 1.0 } else { 0.0 };
                assert!((v.coords()[b] - t).abs() < 1e-15);
            }
        }
        let z = basis.vectorize(&HermitianPoint::zeros(3)).unwrap();
        assert!(z.coords().iter().all(|&x| x == 0.0));
        assert!(basis.vectorize(&HermitianPoint::zeros(4)).is_err());
        assert!(basis.devectorize(&HSVector::new(DVector::zeros(4))).is_err());
    }

    #[test]
    fn reconstruction_identity_by_explicit_sum() {
        // Σ_α ⟨B_α, ρ⟩ B_α = ρ, summed directly over materialized elements.
        for d in [2, 4, 6] {
            let basis = standard_hermitian_basis(d).unwrap();
            let elems = basis.elements();
            let mut sampler = HermitianSampler::new(d as u64);
            for _ in 0..100 {
                let rho = sampler.hermitian(d, 1.0);
                let mut acc = HermitianPoint::zeros(d);
                for e in &elems {
                    acc = acc.add_scaled(hs_inner(e, &rho).unwrap(), e).unwrap();
                }
                assert!(hs_norm(&acc.sub(&rho).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn vectorize_is_isometric_round_trip() {
        let basis = standard_hermitian_basis(8).unwrap();
        let mut sampler = HermitianSampler::new(3);
        for _ in 0..50 {
            let rho = sampler.hermitian(8, 10.0);
            let v = basis.vectorize(&rho).unwrap();
            assert!(close(v.norm(), hs_norm(&rho), ATOL, RTOL));
            let back = basis.devectorize(&v).unwrap();
            assert!(hs_norm(&back.sub(&rho).unwrap()) <= 1e-12 * hs_norm(&rho).max(1.0));
        }
    }

    #[test]
    fn density_samples() {
        for seed in 0..20 {
            let rho = random_density(6, seed);
            assert!((rho.trace() - 1.0).abs() <= 1e-12);
            assert!(rho.min_eigenvalue().unwrap() >= -1e-12);
        }
        assert_eq!(random_density(4, 11), random_density(4, 11));
        assert_ne!(random_density(4, 11), random_density(4, 12));
        assert_eq!(random_hermitian(4, 2.0, 5), random_hermitian(4, 2.0, 5));
    }

    #[test]
    fn random_hermitian_has_requested_scale() {
        // Off-diagonal entries of G + G† have E|h|² = scale².
        let rho = random_hermitian(64, 3.0, 1);
        let mut acc = 0.0;
        let mut count = 0;
        for i in 0..64 {
            for j in 0..64 {
                if i != j {
                    acc += rho.matrix()[(i, j)].norm_sqr();
                    count += 1;
                }
            }
        }
        let mean = acc / count as f64;
        assert!((mean / 9.0 - 1.0).abs() < 0.1, "mean |h|^2 = {mean}");
    }

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let rho = random_hermitian(5, 1.0, 9);
        let (vals, vecs) = rho.eigh().unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let lam = DMatrix::from_diagonal(&DVector::from_iterator(5, vals.iter().map(|&x| C64::new(x, 0.0))));
        let rec = &vecs * lam * vecs.adjoint();
        assert!((rec - rho.matrix()).norm() < 1e-12);
    }
}
