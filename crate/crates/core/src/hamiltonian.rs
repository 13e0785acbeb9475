// Copyright 2026 Dissipator Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Jaynes–Cummings Hamiltonian with pumping, and the Liouvillian
//! `𝒜(t)ρ = -i[H(t), ρ] + γ L ρ` with `L` one of the dissipators.
//!
//! `H(t) = ω_c a†a ⊗ I + ½ω_a I ⊗ σ₃ + p [(a + a†) ⊗ σ₁ + A(t)]`. The pumping
//! `A(t)` sits inside the interaction term and is therefore scaled by `p`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dissipator::{apply_dissipator_raw, superoperator_matrix, DissipatorKind, SuperOperatorMatrix};
use crate::error::{LabError, Result};
use crate::fock::{pauli, tensor, FieldOperator, LadderOps, SystemOperator, TruncationConfig};
use crate::hs::{HermitianBasis, HermitianPoint};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub omega_c: f64,
    pub omega_a: f64,
    pub p: f64,
    pub gamma: f64,
}

impl PhysicalParams {
    /// Physical parameters: `ω_c > 0`, `ω_a > 0`, `γ > 0`, `p` finite.
    pub fn new(omega_c: f64, omega_a: f64, p: f64, gamma: f64) -> Result<Self> {
        let params = Self {
            omega_c,
            omega_a,
            p,
            gamma,
        };
        params.validate()?;
        Ok(params)
    }

    /// Allows zero frequencies and zero damping, for isolating individual
    /// terms of the generator (e.g. `H = 0` or `γ = 0`).
    pub fn degenerate(omega_c: f64, omega_a: f64, p: f64, gamma: f64) -> Result<Self> {
        let params = Self {
            omega_c,
            omega_a,
            p,
            gamma,
        };
        for (name, v) in [("omega_c", omega_c), ("omega_a", omega_a), ("gamma", gamma)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(LabError::config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !p.is_finite() {
            return Err(LabError::config(format!("p must be finite, got {p}")));
        }
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_c", self.omega_c),
            ("omega_a", self.omega_a),
            ("gamma", self.gamma),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(LabError::config(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !self.p.is_finite() {
            return Err(LabError::config(format!("p must be finite, got {}", self.p)));
        }
        Ok(())
    }
}

pub type PumpingFn = dyn Fn(f64) -> SystemOperator + Send + Sync;

/// The pumping term `A(t)`.
#[derive(Clone)]
pub enum PumpingProfile {
    None,
    /// `E cos(ω_d t) (a + a†) ⊗ I`.
    CavityDrive { amplitude: f64, frequency: f64 },
    /// `E cos(ω_d t) I ⊗ σ₁`.
    AtomDrive { amplitude: f64, frequency: f64 },
    /// `E cos(ω_d t) I`; commutes with everything and has no dynamical effect.
    ScalarOffset { amplitude: f64, frequency: f64 },
    /// User callback; each evaluation is checked for Hermiticity.
    Custom(Arc<PumpingFn>),
}

impl fmt::Debug for PumpingProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PumpingProfile::None => f.write_str("None"),
            PumpingProfile::CavityDrive { amplitude, frequency } => f
                .debug_struct("CavityDrive")
                .field("amplitude", amplitude)
                .field("frequency", frequency)
                .finish(),
            PumpingProfile::AtomDrive { amplitude, frequency } => f
                .debug_struct("AtomDrive")
                .field("amplitude", amplitude)
                .field("frequency", frequency)
                .finish(),
            PumpingProfile::ScalarOffset { amplitude, frequency } => f
                .debug_struct("ScalarOffset")
                .field("amplitude", amplitude)
                .field("frequency", frequency)
                .finish(),
            PumpingProfile::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl PumpingProfile {
    pub fn is_time_dependent(&self) -> bool {
        !matches!(self, PumpingProfile::None)
    }

    pub fn name(&self) -> &'static str {
        match self {
            PumpingProfile::None => "none",
            PumpingProfile::CavityDrive { .. } => "cavity",
            PumpingProfile::AtomDrive { .. } => "atom",
            PumpingProfile::ScalarOffset { .. } => "scalar",
            PumpingProfile::Custom(_) => "custom",
        }
    }

    /// Builds a built-in profile from its CLI name.
    pub fn from_name(name: &str, amplitude: f64, frequency: f64) -> Result<Self> {
        if !(amplitude.is_finite() && frequency.is_finite()) {
            return Err(LabError::config("drive amplitude and frequency must be finite"));
        }
        Ok(match name {
            "none" => PumpingProfile::None,
            "cavity" => PumpingProfile::CavityDrive { amplitude, frequency },
            "atom" => PumpingProfile::AtomDrive { amplitude, frequency },
            "scalar" => PumpingProfile::ScalarOffset { amplitude, frequency },
            other => {
                return Err(LabError::config(format!(
                    "unknown pumping {other:?} (expected none, cavity, atom or scalar)"
                )))
            }
        })
    }

    /// `A(t)`, or `None` when there is no pumping.
    pub fn evaluate(&self, cfg: TruncationConfig, t: f64) -> Result<Option<SystemOperator>> {
        let d = cfg.system_dim();
        let op = match self {
            PumpingProfile::None => return Ok(None),
            PumpingProfile::CavityDrive { amplitude, frequency } => {
                let ops = LadderOps::new(cfg);
                (&ops.a + &ops.a_dag).scale(amplitude * (frequency * t).cos())
            }
            PumpingProfile::AtomDrive { amplitude, frequency } => {
                tensor(&FieldOperator::identity(cfg), &pauli(1)?)
                    .scale(amplitude * (frequency * t).cos())
            }
            PumpingProfile::ScalarOffset { amplitude, frequency } => {
                SystemOperator::identity(d).scale(amplitude * (frequency * t).cos())
            }
            PumpingProfile::Custom(f) => {
                let op = f(t);
                LabError::check_dim(d, op.dim())?;
                let residual = op.hermiticity_residual();
                if residual > 1e-12 * op.max_abs().max(1.0) {
                    return Err(LabError::NotHermitian { residual });
                }
                op
            }
        };
        Ok(Some(op))
    }
}

/// Everything needed to evaluate `𝒜(t)`. Lifted operators and the
/// time-independent part of `H` are built once.
#[derive(Clone, Debug)]
pub struct LiouvillianSpec {
    params: PhysicalParams,
    pumping: PumpingProfile,
    dissipator: DissipatorKind,
    truncation: TruncationConfig,
    ops: LadderOps,
    /// `ω_c a†a + ½ω_a σ₃ + p (a + a†) σ₁`.
    static_part: SystemOperator,
    number: SystemOperator,
    inversion: SystemOperator,
}

impl LiouvillianSpec {
    pub fn new(
        params: PhysicalParams,
        pumping: PumpingProfile,
        dissipator: DissipatorKind,
        truncation: TruncationConfig,
    ) -> Self {
        let ops = LadderOps::new(truncation);
        let id_f = FieldOperator::identity(truncation);
        let s1 = pauli(1).expect("valid index");
        let s3 = pauli(3).expect("valid index");
        let inversion = tensor(&id_f, &s3);
        let field_x = &ops.a + &ops.a_dag;
        let coupling = &field_x * &tensor(&id_f, &s1);
        let static_part = &(&ops.a_dag_a.scale(params.omega_c) + &inversion.scale(0.5 * params.omega_a))
            + &coupling.scale(params.p);
        let number = ops.a_dag_a.clone();
        Self {
            params,
            pumping,
            dissipator,
            truncation,
            ops,
            static_part,
            number,
            inversion,
        }
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn pumping(&self) -> &PumpingProfile {
        &self.pumping
    }

    pub fn dissipator(&self) -> DissipatorKind {
        self.dissipator
    }

    pub fn truncation(&self) -> TruncationConfig {
        self.truncation
    }

    pub fn ladder(&self) -> &LadderOps {
        &self.ops
    }

    /// `a†a ⊗ I`.
    pub fn number_operator(&self) -> &SystemOperator {
        &self.number
    }

    /// `I ⊗ σ₃`.
    pub fn inversion_operator(&self) -> &SystemOperator {
        &self.inversion
    }

    pub fn dim(&self) -> usize {
        self.truncation.system_dim()
    }

    /// `𝒜(t)ρ` on raw matrices, given `H(t)`.
    pub(crate) fn generator_raw(&self, h: &DMatrix<C64>, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let minus_i = C64::new(0.0, -1.0);
        let mut out = (h * rho - rho * h) * minus_i;
        if self.params.gamma != 0.0 {
            let diss = apply_dissipator_raw(self.dissipator, &SystemOperator::from_square(rho.clone()), &self.ops)
                .expect("dimensions fixed by the spec");
            out += diss.into_entries() * C64::new(self.params.gamma, 0.0);
        }
        out
    }
}

pub fn build_hamiltonian(spec: &LiouvillianSpec, t: f64) -> Result<SystemOperator> {
    match spec.pumping.evaluate(spec.truncation, t)? {
        None => Ok(spec.static_part.clone()),
        Some(pump) => Ok(&spec.static_part + &pump.scale(spec.params.p)),
    }
}

/// `-i[H, ρ]`.
pub fn commutator_action(h: &SystemOperator, rho: &HermitianPoint) -> Result<HermitianPoint> {
    LabError::check_dim(h.dim(), rho.dim())?;
    let hm = h.entries();
    let r = rho.matrix();
    Ok(HermitianPoint::symmetrize((hm * r - r * hm) * C64::new(0.0, -1.0)))
}

/// `𝒜(t)ρ = -i[H(t), ρ] + γ L ρ`.
pub fn liouvillian_apply(spec: &LiouvillianSpec, t: f64, rho: &HermitianPoint) -> Result<HermitianPoint> {
    LabError::check_dim(spec.dim(), rho.dim())?;
    let h = build_hamiltonian(spec, t)?;
    Ok(HermitianPoint::symmetrize(spec.generator_raw(h.entries(), rho.matrix())))
}

/// Matrix of `𝒜(t)` in `basis`.
pub fn liouvillian_matrix(
    spec: &LiouvillianSpec,
    t: f64,
    basis: &Arc<HermitianBasis>,
) -> Result<SuperOperatorMatrix> {
    LabError::check_dim(spec.dim(), basis.dim())?;
    let h = build_hamiltonian(spec, t)?;
    superoperator_matrix(basis, |b| {
        Ok(HermitianPoint::symmetrize(spec.generator_raw(h.entries(), b.matrix())))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipator::apply_dissipator;
    use crate::fock::{basis_index, Spin};
    use crate::hs::{hs_inner, hs_norm, HermitianSampler};

    fn cfg(n: usize) -> TruncationConfig {
        TruncationConfig::new(n).unwrap()
    }

    fn spec(n: usize, params: PhysicalParams, pumping: PumpingProfile, kind: DissipatorKind) -> LiouvillianSpec {
        LiouvillianSpec::new(params, pumping, kind, cfg(n))
    }

    #[test]
    fn params_validation() {
        assert!(PhysicalParams::new(1.0, 1.0, 0.1, 1.0).is_ok());
        assert!(PhysicalParams::new(0.0, 1.0, 0.1, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, -1.0, 0.1, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 0.1, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, f64::NAN, 1.0).is_err());
        assert!(PhysicalParams::degenerate(0.0, 0.0, 0.0, 0.0).is_ok());
        assert!(PhysicalParams::degenerate(-1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn uncoupled_two_level_hamiltonian_is_diagonal() {
        let (wc, wa) = (1.3, 0.7);
        let s = spec(2, PhysicalParams::new(wc, wa, 0.0, 1.0).unwrap(), PumpingProfile::None, DissipatorKind::FullD);
        let h = build_hamiltonian(&s, 0.0).unwrap();
        let want = [0.5 * wa, -0.5 * wa, wc + 0.5 * wa, wc - 0.5 * wa];
        for i in 0..4 {
            for j in 0..4 {
                let target = if i == j { want[i] } else { 0.0 };
                assert!((h.entries()[(i, j)] - C64::new(target, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn coupling_only_hamiltonian() {
        let n = 4;
        let s = spec(n, PhysicalParams::degenerate(0.0, 0.0, 1.0, 1.0).unwrap(), PumpingProfile::None, DissipatorKind::FullD);
        let h = build_hamiltonian(&s, 0.0).unwrap();
        for k in 0..2 * n {
            assert_eq!(h.entries()[(k, k)], C64::new(0.0, 0.0));
        }
        // ⟨n-1, s∓| (a + a†)σ₁ |n, s±⟩ = √n
        let v = h.entries()[(basis_index(0, Spin::Down), basis_index(1, Spin::Up))];
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-15);
        let v = h.entries()[(basis_index(2, Spin::Up), basis_index(3, Spin::Down))];
        assert!((v - C64::new(3f64.sqrt(), 0.0)).norm() < 1e-15);
        assert_eq!(h.entries()[(basis_index(0, Spin::Up), basis_index(1, Spin::Up))], C64::new(0.0, 0.0));
    }

    #[test]
    fn no_pumping_is_time_independent() {
        let s = spec(3, PhysicalParams::new(1.0, 0.9, 0.2, 1.0).unwrap(), PumpingProfile::None, DissipatorKind::FullD);
        assert_eq!(build_hamiltonian(&s, 0.3).unwrap(), build_hamiltonian(&s, 17.0).unwrap());
    }

    #[test]
    fn all_pumping_variants_are_hermitian() {
        let params = PhysicalParams::new(1.0, 0.9, 0.2, 1.0).unwrap();
        let custom: Arc<PumpingFn> = Arc::new(|t: f64| {
            let c = cfg(3);
            tensor(&crate::fock::number_operator(c), &pauli(2).unwrap()).scale(t.sin())
        });
        let variants = [
            PumpingProfile::CavityDrive { amplitude: 0.5, frequency: 1.1 },
            PumpingProfile::AtomDrive { amplitude: 0.5, frequency: 1.1 },
            PumpingProfile::ScalarOffset { amplitude: 0.5, frequency: 1.1 },
            PumpingProfile::Custom(custom),
        ];
        for v in variants {
            let s = spec(3, params, v, DissipatorKind::FullD);
            for k in 0..100 {
                let t = 0.37 * k as f64;
                let h = build_hamiltonian(&s, t).unwrap();
                assert!(h.hermiticity_residual() <= 1e-12);
            }
        }
    }

    #[test]
    fn non_hermitian_custom_pumping_rejected() {
        let params = PhysicalParams::new(1.0, 0.9, 0.2, 1.0).unwrap();
        let bad: Arc<PumpingFn> = Arc::new(|_| LadderOps::new(cfg(3)).a.clone());
        let s = spec(3, params, PumpingProfile::Custom(bad), DissipatorKind::FullD);
        assert!(matches!(build_hamiltonian(&s, 0.0), Err(LabError::NotHermitian { .. })));
        let wrong_dim: Arc<PumpingFn> = Arc::new(|_| SystemOperator::identity(4));
        let s = spec(3, params, PumpingProfile::Custom(wrong_dim), DissipatorKind::FullD);
        assert!(matches!(build_hamiltonian(&s, 0.0), Err(LabError::DimensionMismatch { .. })));
    }

    #[test]
    fn pumping_scaled_by_coupling() {
        let params = PhysicalParams::new(1.0, 0.9, 0.25, 1.0).unwrap();
        let with = spec(3, params, PumpingProfile::AtomDrive { amplitude: 2.0, frequency: 0.0 }, DissipatorKind::FullD);
        let without = spec(3, params, PumpingProfile::None, DissipatorKind::FullD);
        let diff = &build_hamiltonian(&with, 1.0).unwrap() - &build_hamiltonian(&without, 1.0).unwrap();
        let s1 = tensor(&FieldOperator::identity(cfg(3)), &pauli(1).unwrap()).scale(0.5);
        assert!((diff.entries() - s1.entries()).camax() < 1e-15);
    }

    #[test]
    fn commutator_examples() {
        let c = cfg(3);
        let s3 = tensor(&FieldOperator::identity(c), &pauli(3).unwrap());
        let s1 = HermitianPoint::from_operator(&tensor(&FieldOperator::identity(c), &pauli(1).unwrap())).unwrap();
        let s2 = HermitianPoint::from_operator(&tensor(&FieldOperator::identity(c), &pauli(2).unwrap())).unwrap();
        let out = commutator_action(&s3, &s1).unwrap();
        assert!(hs_norm(&out.sub(&s2.scale(2.0)).unwrap()) < 1e-14);

        // ρ ∝ projector onto an eigenvector of H
        let s = spec(3, PhysicalParams::new(1.0, 0.9, 0.2, 1.0).unwrap(), PumpingProfile::None, DissipatorKind::FullD);
        let h = build_hamiltonian(&s, 0.0).unwrap();
        let (_, vecs) = HermitianPoint::new(h.entries().clone()).unwrap().eigh().unwrap();
        let v = vecs.column(2).into_owned();
        let rho = HermitianPoint::new(&v * v.adjoint()).unwrap();
        assert!(hs_norm(&commutator_action(&h, &rho).unwrap()) < 1e-13);
    }

    #[test]
    fn commutator_is_traceless_and_hs_orthogonal() {
        let mut sampler = HermitianSampler::new(8);
        for _ in 0..100 {
            let h = sampler.hermitian(8, 1.0).to_operator();
            let rho = sampler.hermitian(8, 1.0);
            let out = commutator_action(&h, &rho).unwrap();
            let scale = h.entries().norm() * hs_norm(&rho);
            assert!(out.trace().abs() <= 1e-12 * scale);
            assert!(hs_inner(&rho, &out).unwrap().abs() <= 1e-12 * scale * hs_norm(&rho));
        }
    }

    #[test]
    fn liouvillian_term_isolation() {
        let mut sampler = HermitianSampler::new(21);
        let rho = sampler.hermitian(8, 1.0);

        let no_damping = spec(4, PhysicalParams::degenerate(1.0, 0.9, 0.2, 0.0).unwrap(), PumpingProfile::None, DissipatorKind::FullD);
        let h = build_hamiltonian(&no_damping, 0.0).unwrap();
        let a = liouvillian_apply(&no_damping, 0.0, &rho).unwrap();
        let b = commutator_action(&h, &rho).unwrap();
        assert!(hs_norm(&a.sub(&b).unwrap()) < 1e-13);

        let pure = spec(4, PhysicalParams::degenerate(0.0, 0.0, 0.0, 1.7).unwrap(), PumpingProfile::None, DissipatorKind::DeltaOnly);
        let a = liouvillian_apply(&pure, 0.0, &rho).unwrap();
        let b = apply_dissipator(DissipatorKind::DeltaOnly, &rho, pure.ladder()).unwrap().scale(1.7);
        assert!(hs_norm(&a.sub(&b).unwrap()) < 1e-13);
    }

    #[test]
    fn scalar_offset_has_no_effect() {
        let params = PhysicalParams::new(1.0, 0.9, 0.2, 1.0).unwrap();
        let plain = spec(4, params, PumpingProfile::None, DissipatorKind::FullD);
        let offset = spec(4, params, PumpingProfile::ScalarOffset { amplitude: 3.0, frequency: 2.0 }, DissipatorKind::FullD);
        let mut sampler = HermitianSampler::new(1);
        for k in 0..20 {
            let t = 0.3 * k as f64;
            let rho = sampler.hermitian(8, 1.0);
            let a = liouvillian_apply(&plain, t, &rho).unwrap();
            let b = liouvillian_apply(&offset, t, &rho).unwrap();
            assert!(hs_norm(&a.sub(&b).unwrap()) <= 1e-13 * hs_norm(&rho));
        }
    }

    #[test]
    fn liouvillian_is_linear_and_traceless() {
        let params = PhysicalParams::new(1.0, 0.9, 0.2, 1.0).unwrap();
        let s = spec(4, params, PumpingProfile::CavityDrive { amplitude: 0.3, frequency: 1.0 }, DissipatorKind::FullD);
        let mut sampler = HermitianSampler::new(3);
        for k in 0..20 {
            let t = 0.1 * k as f64;
            let r1 = sampler.hermitian(8, 1.0);
            let r2 = sampler.hermitian(8, 1.0);
            let combo = r1.scale(2.5).add_scaled(-0.7, &r2).unwrap();
            let lhs = liouvillian_apply(&s, t, &combo).unwrap();
            let rhs = liouvillian_apply(&s, t, &r1).unwrap().scale(2.5)
                .add_scaled(-0.7, &liouvillian_apply(&s, t, &r2).unwrap()).unwrap();
            assert!(hs_norm(&lhs.sub(&rhs).unwrap()) <= 1e-12 * hs_norm(&combo).max(1.0) * 10.0);
            assert!(lhs.trace().abs() <= 1e-12 * hs_norm(&combo) * 10.0);
        }
    }

    #[test]
    fn pumping_names() {
        assert_eq!(PumpingProfile::from_name("cavity", 1.0, 2.0).unwrap().name(), "cavity");
        assert!(PumpingProfile::from_name("laser", 1.0, 2.0).is_err());
        assert!(!PumpingProfile::None.is_time_dependent());
        assert!(PumpingProfile::from_name("scalar", 1.0, 2.0).unwrap().is_time_dependent());
    }
}
