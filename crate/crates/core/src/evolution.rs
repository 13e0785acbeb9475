// Copyright 2026 Dissipator Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Time integration of `ρ̇ = 𝒜(t)ρ` with conservation diagnostics.
//!
//! States are re-symmetrized after every step. The trace is never
//! renormalized, so any drift shows up in the recorded observables.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dissipator::SuperOperatorMatrix;
use crate::error::{LabError, Result};
use crate::fock::SystemOperator;
use crate::hamiltonian::{build_hamiltonian, liouvillian_matrix, LiouvillianSpec};
use crate::hs::{hs_norm, standard_hermitian_basis, trace_product, HermitianBasis, HermitianPoint};
use crate::C64;

/// Pre-symmetrization residual above which a step is treated as unstable.
pub const INSTABILITY_RESIDUAL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Method {
    /// Classical fourth-order Runge–Kutta with a fixed step.
    Rk4 { step: f64 },
    /// Repeated application of `exp(h M_𝒜)`; autonomous generators only.
    Expm { step: f64 },
}

impl Method {
    pub fn step(&self) -> f64 {
        match *self {
            Method::Rk4 { step } | Method::Expm { step } => step,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub t_start: f64,
    pub t_end: f64,
    /// Store every k-th step (the initial and final states are always stored).
    pub record_every: usize,
}

impl IntegratorConfig {
    pub fn rk4(step: f64, t_start: f64, t_end: f64, record_every: usize) -> Self {
        Self {
            method: Method::Rk4 { step },
            t_start,
            t_end,
            record_every,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.method.step();
        if !(h.is_finite() && h > 0.0) {
            return Err(LabError::config(format!("step must be positive, got {h}")));
        }
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.t_end > self.t_start) {
            return Err(LabError::config(format!(
                "need t_end > t_start, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        if self.record_every == 0 {
            return Err(LabError::config("record_every must be at least 1"));
        }
        Ok(())
    }

    /// Number of steps and the uniform step that exactly spans the interval.
    /// The requested step is shortened if it does not divide the interval.
    pub fn schedule(&self) -> (usize, f64) {
        let span = self.t_end - self.t_start;
        let n = ((span / self.method.step()) - 1e-9).ceil().max(1.0) as usize;
        (n, span / n as f64)
    }
}

/// Readouts of a single state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub trace: f64,
    pub purity: f64,
    pub hs_norm: f64,
    pub photon_number: f64,
    pub inversion: f64,
    pub min_eigenvalue: f64,
}

/// Trace, purity `tr ρ²`, HS norm, `tr((a†a⊗I)ρ)`, `tr((I⊗σ₃)ρ)` and `λ_min(ρ)`.
pub fn observables(spec: &LiouvillianSpec, rho: &HermitianPoint) -> Result<Observables> {
    LabError::check_dim(spec.dim(), rho.dim())?;
    let norm = hs_norm(rho);
    Ok(Observables {
        trace: rho.trace(),
        purity: norm * norm,
        hs_norm: norm,
        photon_number: trace_product(spec.number_operator().entries(), rho.matrix()).re,
        inversion: trace_product(spec.inversion_operator().entries(), rho.matrix()).re,
        min_eigenvalue: rho.min_eigenvalue()?,
    })
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<HermitianPoint>,
    pub observables: Vec<Observables>,
    /// Largest pre-symmetrization Hermiticity residual since the previous record.
    pub hermiticity_residuals: Vec<f64>,
    /// Step actually used (see [`IntegratorConfig::schedule`]).
    pub step: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &HermitianPoint {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn max_hermiticity_residual(&self) -> f64 {
        self.hermiticity_residuals.iter().copied().fold(0.0, f64::max)
    }
}

struct Recorder<'a> {
    spec: &'a LiouvillianSpec,
    traj: Trajectory,
    pending_residual: f64,
}

impl<'a> Recorder<'a> {
    fn push(&mut self, t: f64, state: HermitianPoint) -> Result<()> {
        let obs = observables(self.spec, &state)?;
        self.traj.times.push(t);
        self.traj.states.push(state);
        self.traj.observables.push(obs);
        self.traj.hermiticity_residuals.push(self.pending_residual);
        self.pending_residual = 0.0;
        Ok(())
    }
}

fn residual_check(m: &DMatrix<C64>, t: f64, h: f64) -> Result<f64> {
    let op = SystemOperator::from_square(m.clone());
    let residual = op.hermiticity_residual();
    let finite = m.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    if !finite || residual > INSTABILITY_RESIDUAL * op.max_abs().max(1.0) {
        return Err(LabError::Instability {
            time: t,
            residual,
            suggested_step: h / 2.0,
        });
    }
    Ok(residual)
}

/// Integrates the initial-value problem `ρ̇ = 𝒜(t)ρ`, `ρ(t_start) = ρ₀`.
pub fn evolve(spec: &LiouvillianSpec, rho0: &HermitianPoint, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    LabError::check_dim(spec.dim(), rho0.dim())?;
    let (n_steps, h) = cfg.schedule();
    let mut rec = Recorder {
        spec,
        traj: Trajectory {
            times: Vec::new(),
            states: Vec::new(),
            observables: Vec::new(),
            hermiticity_residuals: Vec::new(),
            step: h,
        },
        pending_residual: rho0.to_operator().hermiticity_residual(),
    };
    rec.push(cfg.t_start, rho0.clone())?;

    match cfg.method {
        Method::Rk4 { .. } => {
            let autonomous = !spec.pumping().is_time_dependent();
            let h_static = build_hamiltonian(spec, cfg.t_start)?.into_entries();
            let hamiltonian_at = |t: f64| -> Result<DMatrix<C64>> {
                if autonomous {
                    Ok(h_static.clone())
                } else {
                    Ok(build_hamiltonian(spec, t)?.into_entries())
                }
            };
            let half = C64::new(0.5 * h, 0.0);
            let full = C64::new(h, 0.0);
            let sixth = C64::new(h / 6.0, 0.0);
            let two = C64::new(2.0, 0.0);
            let mut rho = rho0.matrix().clone();
            for step in 1..=n_steps {
                let t0 = cfg.t_start + (step - 1) as f64 * h;
                let (h0, hm, h1) = (hamiltonian_at(t0)?, hamiltonian_at(t0 + 0.5 * h)?, hamiltonian_at(t0 + h)?);
                let k1 = spec.generator_raw(&h0, &rho);
                let k2 = spec.generator_raw(&hm, &(&rho + &k1 * half));
                let k3 = spec.generator_raw(&hm, &(&rho + &k2 * half));
                let k4 = spec.generator_raw(&h1, &(&rho + &k3 * full));
                let next = &rho + (k1 + k2 * two + k3 * two + k4) * sixth;
                let t = cfg.t_start + step as f64 * h;
                let residual = residual_check(&next, t, h)?;
                rec.pending_residual = rec.pending_residual.max(residual);
                rho = HermitianPoint::symmetrize(next).into_matrix();
                if step % cfg.record_every == 0 || step == n_steps {
                    rec.push(t, HermitianPoint::symmetrize(rho.clone()))?;
                }
            }
        }
        Method::Expm { .. } => {
            let basis = Arc::new(standard_hermitian_basis(spec.dim())?);
            let prop = exact_propagator(spec, h, &basis)?;
            let mut v = basis.vectorize(rho0)?;
            for step in 1..=n_steps {
                v = prop.apply(&v)?;
                if step % cfg.record_every == 0 || step == n_steps {
                    let t = cfg.t_start + step as f64 * h;
                    rec.push(t, basis.devectorize(&v)?)?;
                }
            }
        }
    }
    Ok(rec.traj)
}

/// `exp(t M_𝒜)` for an autonomous generator (no pumping).
pub fn exact_propagator(
    spec: &LiouvillianSpec,
    t: f64,
    basis: &Arc<HermitianBasis>,
) -> Result<SuperOperatorMatrix> {
    if spec.pumping().is_time_dependent() {
        return Err(LabError::config(
            "the exact propagator requires a time-independent generator (pumping = none)",
        ));
    }
    if !t.is_finite() {
        return Err(LabError::config(format!("propagation time must be finite, got {t}")));
    }
    let generator = liouvillian_matrix(spec, 0.0, basis)?;
    let scaled = generator.matrix() * t;
    let prop = scaled.exp();
    if prop.iter().any(|x| !x.is_finite()) {
        return Err(LabError::Numerical("matrix exponential overflowed".into()));
    }
    SuperOperatorMatrix::from_parts(prop, Arc::clone(basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipator::DissipatorKind;
    use crate::fock::{pauli, tensor, FieldOperator, SpinMatrix, Spin, TruncationConfig};
    use crate::hamiltonian::{PhysicalParams, PumpingProfile};
    use crate::hs::HermitianSampler;

    fn cfg(n: usize) -> TruncationConfig {
        TruncationConfig::new(n).unwrap()
    }

    fn fock(n: usize, level: usize) -> HermitianPoint {
        HermitianPoint::from_operator(&SystemOperator::projector(cfg(n), level, Spin::Up).unwrap()).unwrap()
    }

    fn jc(n: usize, kind: DissipatorKind) -> LiouvillianSpec {
        LiouvillianSpec::new(
            PhysicalParams::new(1.0, 0.9, 0.2, 1.0).unwrap(),
            PumpingProfile::None,
            kind,
            cfg(n),
        )
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::rk4(0.0, 0.0, 1.0, 1).validate().is_err());
        assert!(IntegratorConfig::rk4(0.1, 1.0, 1.0, 1).validate().is_err());
        assert!(IntegratorConfig::rk4(0.1, 0.0, 1.0, 0).validate().is_err());
        assert_eq!(IntegratorConfig::rk4(0.1, 0.0, 1.0, 1).schedule().0, 10);
        let (n, h) = IntegratorConfig::rk4(0.3, 0.0, 1.0, 1).schedule();
        assert_eq!(n, 4);
        assert!((h - 0.25).abs() < 1e-15);
    }

    #[test]
    fn observables_of_fock_state() {
        let s = jc(5, DissipatorKind::FullD);
        for level in 0..5 {
            let o = observables(&s, &fock(5, level)).unwrap();
            assert!((o.photon_number - level as f64).abs() < 1e-15);
            assert_eq!(o.inversion, 1.0);
            assert!((o.purity - 1.0).abs() < 1e-15);
        }
        let mixed = HermitianPoint::identity(10).scale(0.1);
        let o = observables(&s, &mixed).unwrap();
        assert!((o.purity - 0.1).abs() < 1e-15);
        assert_eq!(o.inversion, 0.0);

        let n = 6;
        let s = jc(n, DissipatorKind::FullD);
        let rho = HermitianPoint::from_operator(
            &tensor(&FieldOperator::identity(cfg(n)), &SpinMatrix::projector(Spin::Up)),
        )
        .unwrap()
        .scale(1.0 / n as f64);
        let o = observables(&s, &rho).unwrap();
        assert!((o.photon_number - (n as f64 - 1.0) / 2.0).abs() < 1e-14);
        assert!((o.inversion - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stationary_eigenprojector_without_damping() {
        let s = LiouvillianSpec::new(
            PhysicalParams::degenerate(1.0, 0.9, 0.2, 0.0).unwrap(),
            PumpingProfile::None,
            DissipatorKind::FullD,
            cfg(4),
        );
        let h = build_hamiltonian(&s, 0.0).unwrap();
        let (_, vecs) = HermitianPoint::new(h.into_entries()).unwrap().eigh().unwrap();
        let v = vecs.column(3).into_owned();
        let rho0 = HermitianPoint::new(&v * v.adjoint()).unwrap();
        let traj = evolve(&s, &rho0, &IntegratorConfig::rk4(1e-2, 0.0, 10.0, 50)).unwrap();
        for st in &traj.states {
            assert!(hs_norm(&st.sub(&rho0).unwrap()) <= 1e-8);
        }
    }

    #[test]
    fn trace_conserved_for_both_kinds() {
        let mut sampler = HermitianSampler::new(4);
        for kind in [DissipatorKind::FullD, DissipatorKind::DeltaOnly] {
            let s = jc(4, kind);
            let rho0 = sampler.density(8);
            let traj = evolve(&s, &rho0, &IntegratorConfig::rk4(1e-3, 0.0, 10.0, 100)).unwrap();
            for o in &traj.observables {
                assert!((o.trace - 1.0).abs() <= 1e-9);
            }
            assert!(traj.max_hermiticity_residual() <= 1e-10);
            assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn driven_trajectory_runs_and_expm_rejects_pumping() {
        let s = LiouvillianSpec::new(
            PhysicalParams::new(1.0, 0.9, 0.2, 1.0).unwrap(),
            PumpingProfile::CavityDrive { amplitude: 0.5, frequency: 1.0 },
            DissipatorKind::FullD,
            cfg(4),
        );
        let rho0 = fock(4, 0);
        let traj = evolve(&s, &rho0, &IntegratorConfig::rk4(1e-2, 0.0, 2.0, 10)).unwrap();
        assert!((traj.observables.last().unwrap().trace - 1.0).abs() < 1e-9);
        let expm = IntegratorConfig {
            method: Method::Expm { step: 0.1 },
            t_start: 0.0,
            t_end: 1.0,
            record_every: 1,
        };
        assert!(evolve(&s, &rho0, &expm).is_err());
        let basis = Arc::new(standard_hermitian_basis(8).unwrap());
        assert!(exact_propagator(&s, 1.0, &basis).is_err());
    }

    #[test]
    fn propagator_at_zero_is_identity() {
        let s = jc(3, DissipatorKind::FullD);
        let basis = Arc::new(standard_hermitian_basis(6).unwrap());
        let p = exact_propagator(&s, 0.0, &basis).unwrap();
        assert!((p.matrix() - DMatrix::<f64>::identity(36, 36)).amax() < 1e-15);
    }

    #[test]
    fn propagator_preserves_trace_functional() {
        // Coordinate 0 is ⟨I/√d, ρ⟩, so row 0 of exp(tM) must be e₀ᵀ.
        for kind in [DissipatorKind::FullD, DissipatorKind::DeltaOnly] {
            let s = jc(3, kind);
            let basis = Arc::new(standard_hermitian_basis(6).unwrap());
            let p = exact_propagator(&s, 2.5, &basis).unwrap();
            for j in 0..36 {
                let target = if j == 0 { 1.0 } else { 0.0 };
                assert!((p.matrix()[(0, j)] - target).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn expm_and_rk4_agree() {
        let s = jc(3, DissipatorKind::FullD);
        let rho0 = fock(3, 1);
        let rk = evolve(&s, &rho0, &IntegratorConfig::rk4(1e-2, 0.0, 1.0, 100)).unwrap();
        let ex = evolve(
            &s,
            &rho0,
            &IntegratorConfig {
                method: Method::Expm { step: 0.5 },
                t_start: 0.0,
                t_end: 1.0,
                record_every: 1,
            },
        )
        .unwrap();
        assert_eq!(ex.len(), 3);
        assert!(hs_norm(&rk.last_state().sub(ex.last_state()).unwrap()) < 1e-8);
    }

    #[test]
    fn non_hermitian_state_rejected_as_unstable() {
        let mut m = DMatrix::from_element(4, 4, C64::new(0.0, 0.0));
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(residual_check(&m, 0.0, 0.1), Err(LabError::Instability { .. })));
        let nan = DMatrix::from_element(4, 4, C64::new(f64::NAN, 0.0));
        assert!(residual_check(&nan, 0.0, 0.1).is_err());
    }

    #[test]
    fn spin_inversion_decoupled_from_d() {
        // Without coupling, D leaves σ₃ populations untouched.
        let s = LiouvillianSpec::new(
            PhysicalParams::degenerate(1.0, 1.0, 0.0, 1.0).unwrap(),
            PumpingProfile::None,
            DissipatorKind::FullD,
            cfg(4),
        );
        let rho0 = fock(4, 2);
        let traj = evolve(&s, &rho0, &IntegratorConfig::rk4(1e-2, 0.0, 3.0, 30)).unwrap();
        for o in &traj.observables {
            assert!((o.inversion - 1.0).abs() < 1e-12);
        }
        let s3 = tensor(&FieldOperator::identity(cfg(4)), &pauli(3).unwrap());
        assert_eq!(&s3, s.inversion_operator());
    }
}
