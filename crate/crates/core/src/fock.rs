// Copyright 2026 Dissipator Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Truncated ladder operators, Pauli matrices and the field ⊗ spin product.
//!
//! The field is truncated to Fock levels `|0⟩ .. |N-1⟩`. Composite field
//! operators such as `a†a` and `a a†` are always formed as products of the
//! truncated `N×N` matrices, so `a a† = diag(1, 2, .., N-1, 0)` differs from
//! `a†a + 1` on the top level. With this convention `D` and `Δ` keep an exact
//! finite-dimensional Lindblad form.
//!
//! System operators act on `F_N ⊗ C²` with basis index `2n + s`, where `n` is
//! the Fock level and `s = 0` for `s₊`, `s = 1` for `s₋` (field index slow,
//! spin index fast). The 2×2 spin block of level pair `(n, n')` therefore sits
//! at rows `2n..2n+2`, columns `2n'..2n'+2`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Number of retained Fock levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct TruncationConfig {
    n_levels: usize,
}

impl TruncationConfig {
    pub fn new(n_levels: usize) -> Result<Self> {
        if n_levels < 2 {
            return Err(LabError::config(format!(
                "n_levels must be at least 2, got {n_levels}"
            )));
        }
        Ok(Self { n_levels })
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    /// Dimension `d = 2N` of the system Hilbert space.
    pub fn system_dim(&self) -> usize {
        2 * self.n_levels
    }
}

impl TryFrom<usize> for TruncationConfig {
    type Error = LabError;

    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<TruncationConfig> for usize {
    fn from(cfg: TruncationConfig) -> usize {
        cfg.n_levels
    }
}

/// Eigenvectors `s₊`, `s₋` of `σ₃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    fn offset(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    /// `σ₃` eigenvalue.
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

/// Index of `|n, s⟩` in the system basis.
pub fn basis_index(n: usize, spin: Spin) -> usize {
    2 * n + spin.offset()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldLabel {
    Annihilation,
    Creation,
    Number,
    Identity,
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldOperator {
    entries: DMatrix<C64>,
    label: FieldLabel,
}

impl FieldOperator {
    pub fn custom(entries: DMatrix<C64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(LabError::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        Ok(Self {
            entries,
            label: FieldLabel::Custom,
        })
    }

    pub fn identity(cfg: TruncationConfig) -> Self {
        Self {
            entries: DMatrix::identity(cfg.n_levels, cfg.n_levels),
            label: FieldLabel::Identity,
        }
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn label(&self) -> FieldLabel {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> FieldOperator {
        let label = match self.label {
            FieldLabel::Annihilation => FieldLabel::Creation,
            FieldLabel::Creation => FieldLabel::Annihilation,
            other => other,
        };
        FieldOperator {
            entries: self.entries.adjoint(),
            label,
        }
    }

    /// Truncated matrix product.
    pub fn compose(&self, rhs: &FieldOperator) -> Result<FieldOperator> {
        LabError::check_dim(self.dim(), rhs.dim())?;
        Ok(FieldOperator {
            entries: &self.entries * &rhs.entries,
            label: FieldLabel::Custom,
        })
    }

    pub fn commutator(&self, rhs: &FieldOperator) -> Result<FieldOperator> {
        LabError::check_dim(self.dim(), rhs.dim())?;
        Ok(FieldOperator {
            entries: &self.entries * &rhs.entries - &rhs.entries * &self.entries,
            label: FieldLabel::Custom,
        })
    }
}

/// `a` with `(a)_{m,n} = √n δ_{m,n-1}`.
pub fn make_annihilation(cfg: TruncationConfig) -> FieldOperator {
    let n = cfg.n_levels;
    let mut entries = DMatrix::from_element(n, n, ZERO);
    for level in 1..n {
        entries[(level - 1, level)] = C64::new((level as f64).sqrt(), 0.0);
    }
    FieldOperator {
        entries,
        label: FieldLabel::Annihilation,
    }
}

/// `a†`, the conjugate transpose of [`make_annihilation`]. Note `a†|N-1⟩ = 0`.
pub fn make_creation(cfg: TruncationConfig) -> FieldOperator {
    make_annihilation(cfg).adjoint()
}

/// `a†a` as a product of the truncated factors, `diag(0, 1, .., N-1)`.
pub fn number_operator(cfg: TruncationConfig) -> FieldOperator {
    let a = make_annihilation(cfg);
    let mut num = make_creation(cfg)
        .compose(&a)
        .expect("ladder operators share the truncation");
    num.label = FieldLabel::Number;
    num
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinMatrix {
    entries: Matrix2<C64>,
}

impl SpinMatrix {
    pub fn new(entries: Matrix2<C64>) -> Self {
        Self { entries }
    }

    pub fn identity() -> Self {
        Self {
            entries: Matrix2::identity(),
        }
    }

    /// Projector `s s†` onto a `σ₃` eigenvector.
    pub fn projector(spin: Spin) -> Self {
        let mut entries = Matrix2::zeros();
        let k = spin.offset();
        entries[(k, k)] = ONE;
        Self { entries }
    }

    pub fn entries(&self) -> &Matrix2<C64> {
        &self.entries
    }
}

/// Standard Pauli matrix `σ_k`, `k ∈ {1, 2, 3}`.
pub fn pauli(k: u8) -> Result<SpinMatrix> {
    let entries = match k {
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => {
            return Err(LabError::config(format!(
                "Pauli index must be 1, 2 or 3, got {k}"
            )))
        }
    };
    Ok(SpinMatrix { entries })
}

/// A `d×d` complex matrix acting on `F_N ⊗ C²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemOperator {
    entries: DMatrix<C64>,
}

impl SystemOperator {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(LabError::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_square(entries: DMatrix<C64>) -> Self {
        debug_assert!(entries.is_square());
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::from_element(dim, dim, ZERO),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    /// `|n, s⟩⟨n, s|`.
    pub fn projector(cfg: TruncationConfig, n: usize, spin: Spin) -> Result<Self> {
        if n >= cfg.n_levels {
            return Err(LabError::config(format!(
                "Fock level {n} outside truncation N = {}",
                cfg.n_levels
            )));
        }
        let mut op = Self::zeros(cfg.system_dim());
        let k = basis_index(n, spin);
        op.entries[(k, k)] = ONE;
        Ok(op)
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> SystemOperator {
        SystemOperator {
            entries: self.entries.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn scale(&self, factor: f64) -> SystemOperator {
        SystemOperator {
            entries: &self.entries * C64::new(factor, 0.0),
        }
    }

    pub fn commutator(&self, rhs: &SystemOperator) -> SystemOperator {
        SystemOperator {
            entries: &self.entries * &rhs.entries - &rhs.entries * &self.entries,
        }
    }

    /// `max |M - M†|` entrywise.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for j in 0..d {
            for i in 0..=j {
                let r = (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm();
                worst = worst.max(r);
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    /// Apply to a state vector.
    pub fn apply(&self, v: &nalgebra::DVector<C64>) -> Result<nalgebra::DVector<C64>> {
        LabError::check_dim(self.dim(), v.len())?;
        Ok(&self.entries * v)
    }
}

impl Add for &SystemOperator {
    type Output = SystemOperator;
    fn add(self, rhs: &SystemOperator) -> SystemOperator {
        SystemOperator {
            entries: &self.entries + &rhs.entries,
        }
    }
}

impl Sub for &SystemOperator {
    type Output = SystemOperator;
    fn sub(self, rhs: &SystemOperator) -> SystemOperator {
        SystemOperator {
            entries: &self.entries - &rhs.entries,
        }
    }
}

impl Mul for &SystemOperator {
    type Output = SystemOperator;
    fn mul(self, rhs: &SystemOperator) -> SystemOperator {
        SystemOperator {
            entries: &self.entries * &rhs.entries,
        }
    }
}

impl Neg for &SystemOperator {
    type Output = SystemOperator;
    fn neg(self) -> SystemOperator {
        SystemOperator {
            entries: -&self.entries,
        }
    }
}

/// `F ⊗ S` in the n-major layout: `(F⊗S)_{2m+s, 2n+t} = F_{mn} S_{st}`.
pub fn tensor(field: &FieldOperator, spin: &SpinMatrix) -> SystemOperator {
    let n = field.dim();
    let mut entries = DMatrix::from_element(2 * n, 2 * n, ZERO);
    for m in 0..n {
        for k in 0..n {
            let f = field.entries[(m, k)];
            if f == ZERO {
                continue;
            }
            for s in 0..2 {
                for t in 0..2 {
                    entries[(2 * m + s, 2 * k + t)] = f * spin.entries[(s, t)];
                }
            }
        }
    }
    SystemOperator { entries }
}

/// Lifted ladder operators `a⊗I`, `a†⊗I` and their truncated products.
#[derive(Clone, Debug)]
pub struct LadderOps {
    cfg: TruncationConfig,
    pub a: SystemOperator,
    pub a_dag: SystemOperator,
    /// `a†a`, the lifted number operator.
    pub a_dag_a: SystemOperator,
    /// `a a†`.
    pub a_a_dag: SystemOperator,
}

impl LadderOps {
    pub fn new(cfg: TruncationConfig) -> Self {
        let id = SpinMatrix::identity();
        let a = tensor(&make_annihilation(cfg), &id);
        let a_dag = tensor(&make_creation(cfg), &id);
        let a_dag_a = &a_dag * &a;
        let a_a_dag = &a * &a_dag;
        Self {
            cfg,
            a,
            a_dag,
            a_dag_a,
            a_a_dag,
        }
    }

    pub fn truncation(&self) -> TruncationConfig {
        self.cfg
    }

    pub fn dim(&self) -> usize {
        self.cfg.system_dim()
    }
}
