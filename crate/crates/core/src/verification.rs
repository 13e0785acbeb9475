// Copyright 2026 Dissipator Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Executable certification of the structural properties of `D` and `Δ`.
//!
//! Each check produces a [`PropertyReport`] whose verdict is `pass` iff
//! `max_violation ≤ threshold`. Reports carry the inputs that achieved the
//! worst violation so the value can be recomputed after a JSON round trip
//! ([`PropertyReport::reverify`]).

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dissipator::{
    apply_dissipator, dissipator_matrix, eigenbasis_form, kernel_basis, project_onto, quadratic_form,
    singular_values, DissipatorKind, DEFAULT_KERNEL_TOL,
};
use crate::error::{LabError, Result};
use crate::fock::{pauli, tensor, FieldOperator, LadderOps, Spin, SpinMatrix, SystemOperator, TruncationConfig};
use crate::hamiltonian::{build_hamiltonian, commutator_action, LiouvillianSpec, PhysicalParams, PumpingProfile};
use crate::hs::{hs_inner, hs_norm, standard_hermitian_basis, HSVector, HermitianPoint, HermitianSampler};
use crate::C64;

pub const SYMMETRY_THRESHOLD: f64 = 1e-10;
pub const NONPOSITIVITY_THRESHOLD: f64 = 1e-12;
pub const CLOSED_FORM_THRESHOLD: f64 = 1e-8;
pub const WITNESS_THRESHOLD: f64 = 1e-12;
pub const KERNEL_THRESHOLD: f64 = 1e-8;
pub const TRACE_THRESHOLD: f64 = 1e-12;
/// Allowed relative spread of the restricted `σ_min` across the tolerance sweep.
pub const SIGMA_MIN_SPREAD: f64 = 0.2;
/// Kernel tolerances swept for gap robustness.
pub const KERNEL_TOL_SWEEP: [f64; 5] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6];
/// Sample scales cycled through by the random checks.
pub const SAMPLE_SCALES: [f64; 3] = [0.1, 1.0, 10.0];
pub const DEFAULT_LEVELS: [usize; 4] = [2, 4, 8, 16];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Row-major complex matrix as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&DMatrix<C64>> for MatrixRecord {
    fn from(m: &DMatrix<C64>) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }
}

impl From<&HermitianPoint> for MatrixRecord {
    fn from(h: &HermitianPoint) -> Self {
        Self::from(h.matrix())
    }
}

impl MatrixRecord {
    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        if self.data.len() != self.rows * self.cols {
            return Err(LabError::DimensionMismatch {
                expected: self.rows * self.cols,
                found: self.data.len(),
            });
        }
        Ok(DMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i * self.cols + j];
            C64::new(re, im)
        }))
    }

    pub fn to_hermitian(&self) -> Result<HermitianPoint> {
        HermitianPoint::new(self.to_matrix()?)
    }
}

/// A recorded input together with the value it produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Names the quantity; see [`evaluate_witness`].
    pub label: String,
    pub inputs: Vec<MatrixRecord>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
    pub value: f64,
}

impl Witness {
    fn new(label: &str, inputs: &[&HermitianPoint], value: f64) -> Self {
        Self {
            label: label.to_owned(),
            inputs: inputs.iter().map(|h| MatrixRecord::from(*h)).collect(),
            parameters: BTreeMap::new(),
            value,
        }
    }

    fn with_parameter(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_owned(), value);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property_id: String,
    #[serde(rename = "n")]
    pub n_samples: usize,
    pub max_violation: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub seed: u64,
    /// Number of retained Fock levels.
    pub truncation: usize,
}

impl PropertyReport {
    fn new(
        property_id: &str,
        cfg: TruncationConfig,
        n_samples: usize,
        max_violation: f64,
        threshold: f64,
        witnesses: Vec<Witness>,
        seed: u64,
    ) -> Self {
        let verdict = if max_violation <= threshold {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            property_id: property_id.to_owned(),
            n_samples,
            max_violation,
            threshold,
            verdict,
            witnesses,
            seed,
            truncation: cfg.n_levels(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Recomputes every witness from its stored inputs and checks that it
    /// reproduces the recorded value.
    pub fn reverify(&self) -> Result<bool> {
        let cfg = TruncationConfig::new(self.truncation)?;
        for w in &self.witnesses {
            let v = evaluate_witness(&w.label, cfg, &w.inputs, &w.parameters)?;
            if (v - w.value).abs() > 1e-12 * w.value.abs().max(1.0) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Finite-truncation stand-in for the finite-rank domain: Hermitian matrices
/// supported on Fock levels `0..=max_level` (both spins).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaddedSupportSpec {
    pub max_level: usize,
}

impl PaddedSupportSpec {
    /// The widest admissible padding, `M = N - 2`.
    pub fn widest(cfg: TruncationConfig) -> Self {
        Self {
            max_level: cfg.n_levels() - 2,
        }
    }

    /// At least one empty top level is required so that `a†ρa` is not cut off.
    pub fn validate(&self, cfg: TruncationConfig) -> Result<()> {
        if self.max_level + 2 > cfg.n_levels() {
            return Err(LabError::config(format!(
                "padded support level {} exceeds N - 2 = {}",
                self.max_level,
                cfg.n_levels() as i64 - 2
            )));
        }
        Ok(())
    }

    /// Orthonormal HS basis of the padded subspace, embedded in `d×d` matrices.
    pub fn basis(&self, cfg: TruncationConfig) -> Result<Vec<HermitianPoint>> {
        self.validate(cfg)?;
        let inner = 2 * (self.max_level + 1);
        let d = cfg.system_dim();
        let small = standard_hermitian_basis(inner)?;
        Ok(small
            .elements()
            .into_iter()
            .map(|e| {
                let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
                m.view_mut((0, 0), (inner, inner)).copy_from(e.matrix());
                HermitianPoint::symmetrize(m)
            })
            .collect())
    }
}

fn sample_scale(k: usize) -> f64 {
    SAMPLE_SCALES[k % SAMPLE_SCALES.len()]
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        num.abs()
    } else {
        num / den
    }
}

fn symmetry_residual(rho1: &HermitianPoint, rho2: &HermitianPoint, ops: &LadderOps) -> Result<f64> {
    let d2 = apply_dissipator(DissipatorKind::FullD, rho2, ops)?;
    let d1 = apply_dissipator(DissipatorKind::FullD, rho1, ops)?;
    let diff = hs_inner(rho1, &d2)? - hs_inner(&d1, rho2)?;
    Ok(ratio(diff.abs(), hs_norm(rho1) * hs_norm(rho2)))
}

fn closed_form_deviation(kind: DissipatorKind, rho: &HermitianPoint, ops: &LadderOps) -> Result<f64> {
    let q = quadratic_form(kind, rho, ops)?;
    let e = eigenbasis_form(kind, rho, ops)?;
    Ok(ratio((q - e).abs(), q.abs().max(e.abs())))
}

/// Hamiltonian used to probe commutator tracelessness.
fn probe_spec(cfg: TruncationConfig) -> LiouvillianSpec {
    LiouvillianSpec::new(
        PhysicalParams::new(1.0, 0.9, 0.2, 1.0).expect("valid constants"),
        PumpingProfile::CavityDrive {
            amplitude: 0.7,
            frequency: 1.3,
        },
        DissipatorKind::FullD,
        cfg,
    )
}

fn commutator_trace_ratio(h: &SystemOperator, rho: &HermitianPoint) -> Result<f64> {
    let out = commutator_action(h, rho)?;
    Ok(ratio(out.trace().abs(), h.entries().norm() * hs_norm(rho)))
}

/// `I_F ⊗ S` for `S ∈ {I, σ₁, σ₂, σ₃}`, normalized in HS.
pub fn spin_identity_family(cfg: TruncationConfig) -> Vec<HermitianPoint> {
    let id_f = FieldOperator::identity(cfg);
    let norm = 1.0 / (cfg.system_dim() as f64).sqrt();
    let mut spins = vec![SpinMatrix::identity()];
    spins.extend((1..=3).map(|k| pauli(k).expect("valid index")));
    spins
        .iter()
        .map(|s| {
            HermitianPoint::from_operator(&tensor(&id_f, s))
                .expect("lifted Pauli matrices are Hermitian")
                .scale(norm)
        })
        .collect()
}

/// Kernel and restricted-injectivity measurements for the full dissipator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelAnalysis {
    pub kernel_dimension: usize,
    /// Kernel dimension at each tolerance of [`KERNEL_TOL_SWEEP`].
    pub kernel_dimension_sweep: Vec<usize>,
    /// Largest distance between the kernel and the span of `I_F ⊗ S`, both ways.
    pub span_residual: f64,
    pub padded_dimension: usize,
    /// Rank of the restricted matrix at each swept tolerance.
    pub padded_rank_sweep: Vec<usize>,
    /// Smallest retained singular value at each swept tolerance.
    pub padded_sigma_min_sweep: Vec<f64>,
    pub padded_sigma_min: f64,
    /// `max σ_min / min σ_min - 1` over the sweep.
    pub sigma_min_spread: f64,
}

pub fn analyze_kernel(cfg: TruncationConfig, pad: PaddedSupportSpec) -> Result<KernelAnalysis> {
    pad.validate(cfg)?;
    let ops = LadderOps::new(cfg);
    let basis = Arc::new(standard_hermitian_basis(cfg.system_dim())?);
    let m = dissipator_matrix(DissipatorKind::FullD, &ops, &basis)?;

    let kernel = kernel_basis(&m, DEFAULT_KERNEL_TOL)?;
    let kernel_dimension_sweep = KERNEL_TOL_SWEEP
        .iter()
        .map(|&tol| kernel_basis(&m, tol).map(|k| k.len()))
        .collect::<Result<Vec<_>>>()?;

    let family: Vec<HSVector> = spin_identity_family(cfg)
        .iter()
        .map(|f| basis.vectorize(f))
        .collect::<Result<_>>()?;
    let mut span_residual = 0.0_f64;
    for v in &family {
        let p = project_onto(&kernel, v);
        span_residual = span_residual.max((p.coords() - v.coords()).norm());
    }
    for k in &kernel {
        let p = project_onto(&family, k);
        span_residual = span_residual.max((p.coords() - k.coords()).norm());
    }

    let padded = pad.basis(cfg)?;
    let q_columns: Vec<DVector<f64>> = padded
        .iter()
        .map(|e| basis.vectorize(e).map(HSVector::into_coords))
        .collect::<Result<_>>()?;
    let q = DMatrix::from_columns(&q_columns);
    let restricted = m.matrix() * q;
    let sigma = singular_values(&restricted)?;
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let mut padded_rank_sweep = Vec::new();
    let mut padded_sigma_min_sweep = Vec::new();
    for &tol in &KERNEL_TOL_SWEEP {
        let kept: Vec<f64> = sigma.iter().copied().filter(|&s| s > tol * sigma_max).collect();
        padded_rank_sweep.push(kept.len());
        padded_sigma_min_sweep.push(kept.last().copied().unwrap_or(0.0));
    }
    let lo = padded_sigma_min_sweep.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = padded_sigma_min_sweep.iter().copied().fold(0.0, f64::max);
    let sigma_min_spread = if lo > 0.0 { hi / lo - 1.0 } else { f64::INFINITY };

    Ok(KernelAnalysis {
        kernel_dimension: kernel.len(),
        kernel_dimension_sweep,
        span_residual,
        padded_dimension: padded.len(),
        padded_rank_sweep,
        padded_sigma_min_sweep,
        padded_sigma_min: sigma.last().copied().unwrap_or(0.0),
        sigma_min_spread,
    })
}

/// Recomputes a witness value from its label and inputs.
pub fn evaluate_witness(
    label: &str,
    cfg: TruncationConfig,
    inputs: &[MatrixRecord],
    parameters: &BTreeMap<String, f64>,
) -> Result<f64> {
    let ops = LadderOps::new(cfg);
    let mats = inputs
        .iter()
        .map(MatrixRecord::to_hermitian)
        .collect::<Result<Vec<_>>>()?;
    let need = |n: usize| -> Result<()> {
        if mats.len() == n {
            Ok(())
        } else {
            Err(LabError::config(format!("witness {label} expects {n} inputs, got {}", mats.len())))
        }
    };
    let param = |key: &str| -> Result<f64> {
        parameters
            .get(key)
            .copied()
            .ok_or_else(|| LabError::config(format!("witness {label} lacks parameter {key}")))
    };
    let kind_of = |suffix: &str| -> Result<DissipatorKind> { suffix.parse() };
    let (stem, suffix) = label.rsplit_once(':').unwrap_or((label, ""));
    match stem {
        "symmetry_residual" => {
            need(2)?;
            symmetry_residual(&mats[0], &mats[1], &ops)
        }
        "quadratic_ratio" => {
            need(1)?;
            let q = quadratic_form(kind_of(suffix)?, &mats[0], &ops)?;
            Ok(ratio(q, hs_norm(&mats[0]).powi(2)))
        }
        "quadratic_form" => {
            need(1)?;
            quadratic_form(kind_of(suffix)?, &mats[0], &ops)
        }
        "closed_form_deviation" => {
            need(1)?;
            closed_form_deviation(kind_of(suffix)?, &mats[0], &ops)
        }
        "inner_first_applied_second" => {
            need(2)?;
            hs_inner(&mats[0], &apply_dissipator(kind_of(suffix)?, &mats[1], &ops)?)
        }
        "inner_applied_first_second" => {
            need(2)?;
            hs_inner(&apply_dissipator(kind_of(suffix)?, &mats[0], &ops)?, &mats[1])
        }
        "trace_ratio" => {
            need(1)?;
            let out = apply_dissipator(kind_of(suffix)?, &mats[0], &ops)?;
            Ok(ratio(out.trace().abs(), hs_norm(&mats[0])))
        }
        "commutator_trace_ratio" => {
            need(1)?;
            let h = build_hamiltonian(&probe_spec(cfg), param("t")?)?;
            commutator_trace_ratio(&h, &mats[0])
        }
        "transpose_residual" => {
            need(0)?;
            let basis = Arc::new(standard_hermitian_basis(cfg.system_dim())?);
            Ok(dissipator_matrix(kind_of(suffix)?, &ops, &basis)?.transpose_residual())
        }
        "kernel_dimension" | "span_residual" | "padded_sigma_min" | "sigma_min_spread" => {
            need(0)?;
            let pad = PaddedSupportSpec {
                max_level: param("max_level")? as usize,
            };
            let k = analyze_kernel(cfg, pad)?;
            Ok(match stem {
                "kernel_dimension" => k.kernel_dimension as f64,
                "span_residual" => k.span_residual,
                "padded_sigma_min" => k.padded_sigma_min,
                _ => k.sigma_min_spread,
            })
        }
        other => Err(LabError::config(format!("unknown witness label {other:?}"))),
    }
}

/// Tracks the worst sample of a random sweep.
struct Worst {
    value: f64,
    witness: Option<Witness>,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            witness: None,
        }
    }

    fn offer(&mut self, value: f64, make: impl FnOnce() -> Witness) {
        if value > self.value || self.witness.is_none() {
            self.value = value;
            self.witness = Some(make());
        }
    }

    fn into_parts(self) -> (f64, Vec<Witness>) {
        (self.value, self.witness.into_iter().collect())
    }
}

/// Bilinear symmetry `⟨ρ₁, Dρ₂⟩ = ⟨Dρ₁, ρ₂⟩` on random Hermitian pairs,
/// relative to `‖ρ₁‖‖ρ₂‖`.
pub fn check_symmetry_d(cfg: TruncationConfig, n_samples: usize, seed: u64) -> Result<PropertyReport> {
    let ops = LadderOps::new(cfg);
    let d = cfg.system_dim();
    let mut sampler = HermitianSampler::new(seed);
    let mut worst = Worst::new();
    for k in 0..n_samples {
        let r1 = sampler.hermitian(d, sample_scale(k));
        let r2 = sampler.hermitian(d, sample_scale(k + 1));
        let v = symmetry_residual(&r1, &r2, &ops)?;
        worst.offer(v, || Witness::new("symmetry_residual", &[&r1, &r2], v));
    }
    let (max, witnesses) = worst.into_parts();
    Ok(PropertyReport::new("symmetry_D", cfg, n_samples, max.max(0.0), SYMMETRY_THRESHOLD, witnesses, seed))
}

/// Relative transpose residual of the matrix of `D`.
pub fn check_symmetry_matrix_d(cfg: TruncationConfig) -> Result<PropertyReport> {
    let ops = LadderOps::new(cfg);
    let basis = Arc::new(standard_hermitian_basis(cfg.system_dim())?);
    let r = dissipator_matrix(DissipatorKind::FullD, &ops, &basis)?.transpose_residual();
    let w = Witness::new("transpose_residual:full", &[], r);
    Ok(PropertyReport::new("symmetry_D_matrix", cfg, 1, r, SYMMETRY_THRESHOLD, vec![w], 0))
}

/// `⟨ρ, Dρ⟩ / ‖ρ‖² ≤ 1e-12` on random Hermitian samples plus every state
/// `|m⟩⟨m| ⊗ I + c |n⟩⟨n| ⊗ I` supported on two Fock levels.
pub fn check_nonpositivity_d(cfg: TruncationConfig, n_samples: usize, seed: u64) -> Result<PropertyReport> {
    let ops = LadderOps::new(cfg);
    let d = cfg.system_dim();
    let n = cfg.n_levels();
    let mut sampler = HermitianSampler::new(seed);
    let mut worst = Worst::new();
    let mut count = 0;
    let offer = |rho: HermitianPoint, worst: &mut Worst| -> Result<()> {
        let v = ratio(quadratic_form(DissipatorKind::FullD, &rho, &ops)?, hs_norm(&rho).powi(2));
        worst.offer(v, || Witness::new("quadratic_ratio:full", &[&rho], v));
        Ok(())
    };
    for k in 0..n_samples {
        offer(sampler.hermitian(d, sample_scale(k)), &mut worst)?;
        count += 1;
    }
    for m in 0..n {
        for l in m + 1..n {
            for c in [-1.0, 0.5, 2.0] {
                let mut diag = vec![0.0; d];
                for s in [Spin::Up, Spin::Down] {
                    diag[crate::fock::basis_index(m, s)] = 1.0;
                    diag[crate::fock::basis_index(l, s)] = c;
                }
                offer(HermitianPoint::from_real_diagonal(&diag), &mut worst)?;
                count += 1;
            }
        }
    }
    let (max, witnesses) = worst.into_parts();
    Ok(PropertyReport::new("nonpositivity_D", cfg, count, max, NONPOSITIVITY_THRESHOLD, witnesses, seed))
}

fn check_closed_form(
    property_id: &str,
    kind: DissipatorKind,
    cfg: TruncationConfig,
    n_samples: usize,
    seed: u64,
) -> Result<PropertyReport> {
    let ops = LadderOps::new(cfg);
    let d = cfg.system_dim();
    let mut sampler = HermitianSampler::new(seed);
    let mut worst = Worst::new();
    let label = format!("closed_form_deviation:{kind}");
    for k in 0..n_samples {
        let rho = sampler.hermitian(d, sample_scale(k));
        let v = closed_form_deviation(kind, &rho, &ops)?;
        worst.offer(v, || Witness::new(&label, &[&rho], v));
    }
    let (max, witnesses) = worst.into_parts();
    Ok(PropertyReport::new(property_id, cfg, n_samples, max.max(0.0), CLOSED_FORM_THRESHOLD, witnesses, seed))
}

/// `⟨ρ, Dρ⟩ = -Σ|a_ik|²(ρ_i - ρ_k)²`, relative deviation.
pub fn check_identity_dtr32(cfg: TruncationConfig, n_samples: usize, seed: u64) -> Result<PropertyReport> {
    check_closed_form("identity_dtr32", DissipatorKind::FullD, cfg, n_samples, seed)
}

/// `⟨ρ, Δρ⟩ = Σ|a_ik|²(ρ_iρ_k - ρ_k²)`, relative deviation.
pub fn check_identity_delta(cfg: TruncationConfig, n_samples: usize, seed: u64) -> Result<PropertyReport> {
    check_closed_form("identity_delta_closed_form", DissipatorKind::DeltaOnly, cfg, n_samples, seed)
}

/// The two fixed counterexamples for `Δ`, and the same states under `D`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaWitnessValues {
    pub first: MatrixRecord,
    pub second: MatrixRecord,
    pub delta_first: MatrixRecord,
    pub delta_second: MatrixRecord,
    /// `⟨ρ₁, Δρ₂⟩`, expected 1.
    pub delta_inner_first_applied_second: f64,
    /// `⟨Δρ₁, ρ₂⟩`, expected 0.
    pub delta_inner_applied_first_second: f64,
    pub full_inner_first_applied_second: f64,
    pub full_inner_applied_first_second: f64,
    pub positivity_state: MatrixRecord,
    pub delta_positivity_image: MatrixRecord,
    /// `⟨ρ, Δρ⟩`, expected +1.
    pub delta_quadratic_form: f64,
    /// `⟨ρ, Dρ⟩`, expected -3 when `N ≥ 3`.
    pub full_quadratic_form: f64,
}

fn projector(cfg: TruncationConfig, level: usize) -> Result<HermitianPoint> {
    HermitianPoint::from_operator(&SystemOperator::projector(cfg, level, Spin::Up)?)
}

pub fn delta_witness_values(cfg: TruncationConfig) -> Result<DeltaWitnessValues> {
    let ops = LadderOps::new(cfg);
    let r1 = projector(cfg, 0)?;
    let r2 = projector(cfg, 1)?;
    let rho = r1.scale(2.0).add_scaled(1.0, &r2)?;
    let full = DissipatorKind::FullD;
    let delta = DissipatorKind::DeltaOnly;
    let dr1 = apply_dissipator(delta, &r1, &ops)?;
    let dr2 = apply_dissipator(delta, &r2, &ops)?;
    let drho = apply_dissipator(delta, &rho, &ops)?;
    Ok(DeltaWitnessValues {
        delta_inner_first_applied_second: hs_inner(&r1, &dr2)?,
        delta_inner_applied_first_second: hs_inner(&dr1, &r2)?,
        full_inner_first_applied_second: hs_inner(&r1, &apply_dissipator(full, &r2, &ops)?)?,
        full_inner_applied_first_second: hs_inner(&apply_dissipator(full, &r1, &ops)?, &r2)?,
        delta_quadratic_form: quadratic_form(delta, &rho, &ops)?,
        full_quadratic_form: quadratic_form(full, &rho, &ops)?,
        first: (&r1).into(),
        second: (&r2).into(),
        delta_first: (&dr1).into(),
        delta_second: (&dr2).into(),
        positivity_state: (&rho).into(),
        delta_positivity_image: (&drho).into(),
    })
}

/// Asymmetry pair `(1, 0)` and positivity value `+1` for `Δ`; symmetric pair
/// `(1, 1)` and value `-3` (for `N ≥ 3`) for `D`.
pub fn check_delta_witnesses(cfg: TruncationConfig) -> Result<PropertyReport> {
    let v = delta_witness_values(cfg)?;
    let r1 = v.first.to_hermitian()?;
    let r2 = v.second.to_hermitian()?;
    let rho = v.positivity_state.to_hermitian()?;
    let mut checks: Vec<(Witness, f64)> = vec![
        (Witness::new("inner_first_applied_second:delta", &[&r1, &r2], v.delta_inner_first_applied_second), 1.0),
        (Witness::new("inner_applied_first_second:delta", &[&r1, &r2], v.delta_inner_applied_first_second), 0.0),
        (Witness::new("quadratic_form:delta", &[&rho], v.delta_quadratic_form), 1.0),
        (Witness::new("inner_first_applied_second:full", &[&r1, &r2], v.full_inner_first_applied_second), 1.0),
        (Witness::new("inner_applied_first_second:full", &[&r1, &r2], v.full_inner_applied_first_second), 1.0),
    ];
    if cfg.n_levels() >= 3 {
        checks.push((Witness::new("quadratic_form:full", &[&rho], v.full_quadratic_form), -3.0));
    }
    let max = checks
        .iter()
        .map(|(w, expected)| (w.value - expected).abs())
        .fold(0.0, f64::max);
    let witnesses = checks
        .into_iter()
        .map(|(w, expected)| w.with_parameter("expected", expected))
        .collect();
    Ok(PropertyReport::new("delta_witnesses", cfg, 1, max, WITNESS_THRESHOLD, witnesses, 0))
}

/// Kernel of `D` is exactly `span{I_F ⊗ S}` (dimension 4, stable across the
/// tolerance sweep) and `D` restricted to the padded support has a positive,
/// tolerance-stable smallest singular value.
///
/// The violation is the span residual, or 1 for any discrete failure.
pub fn check_kernel_and_injectivity(cfg: TruncationConfig, pad: PaddedSupportSpec) -> Result<PropertyReport> {
    let k = analyze_kernel(cfg, pad)?;
    let mut violation = k.span_residual;
    if k.kernel_dimension != 4 || k.kernel_dimension_sweep.iter().any(|&d| d != 4) {
        violation = violation.max(1.0);
    }
    if k.padded_rank_sweep.iter().any(|&r| r != k.padded_dimension) || k.padded_sigma_min <= 0.0 {
        violation = violation.max(1.0);
    }
    if k.sigma_min_spread.is_nan() || k.sigma_min_spread > SIGMA_MIN_SPREAD {
        violation = violation.max(1.0);
    }
    let level = pad.max_level as f64;
    let witnesses = vec![
        Witness::new("kernel_dimension", &[], k.kernel_dimension as f64).with_parameter("max_level", level),
        Witness::new("span_residual", &[], k.span_residual).with_parameter("max_level", level),
        Witness::new("padded_sigma_min", &[], k.padded_sigma_min).with_parameter("max_level", level),
        Witness::new("sigma_min_spread", &[], k.sigma_min_spread).with_parameter("max_level", level),
    ];
    Ok(PropertyReport::new(
        "kernel_and_injectivity",
        cfg,
        1,
        violation,
        KERNEL_THRESHOLD,
        witnesses,
        0,
    ))
}

/// `|tr Dρ|/‖ρ‖`, `|tr Δρ|/‖ρ‖` and `|tr(-i[H(t), ρ])|/(‖H‖‖ρ‖)` at random times.
pub fn check_trace_annihilation(cfg: TruncationConfig, n_samples: usize, seed: u64) -> Result<PropertyReport> {
    let ops = LadderOps::new(cfg);
    let spec = probe_spec(cfg);
    let d = cfg.system_dim();
    let mut sampler = HermitianSampler::new(seed);
    let mut worst = Worst::new();
    for k in 0..n_samples {
        let rho = sampler.hermitian(d, sample_scale(k));
        let norm = hs_norm(&rho);
        for kind in [DissipatorKind::FullD, DissipatorKind::DeltaOnly] {
            let v = ratio(apply_dissipator(kind, &rho, &ops)?.trace().abs(), norm);
            worst.offer(v, || Witness::new(&format!("trace_ratio:{kind}"), &[&rho], v));
        }
        let t = 10.0 * (rho.matrix()[(0, 0)].re.abs().fract() + k as f64 / n_samples.max(1) as f64);
        let h = build_hamiltonian(&spec, t)?;
        let v = commutator_trace_ratio(&h, &rho)?;
        worst.offer(v, || Witness::new("commutator_trace_ratio", &[&rho], v).with_parameter("t", t));
    }
    let (max, witnesses) = worst.into_parts();
    Ok(PropertyReport::new("trace_annihilation", cfg, n_samples, max.max(0.0), TRACE_THRESHOLD, witnesses, seed))
}

/// Sample counts used by [`run_full_certification`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SampleCounts {
    pub symmetry: usize,
    pub nonpositivity: usize,
    pub closed_form: usize,
    pub trace: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        Self {
            symmetry: 1000,
            nonpositivity: 1000,
            closed_form: 500,
            trace: 1000,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificationSummary {
    pub seed: u64,
    pub n_levels: Vec<usize>,
    pub all_pass: bool,
    pub reports: Vec<PropertyReport>,
}

fn derived_seed(seed: u64, n: usize, check: u64) -> u64 {
    seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ check.wrapping_mul(0xD1B5_4A32_D192_ED03)
}

#[derive(Clone, Copy)]
enum Check {
    Symmetry,
    SymmetryMatrix,
    Nonpositivity,
    IdentityFull,
    IdentityDelta,
    DeltaWitnesses,
    Kernel,
    Trace,
}

const ALL_CHECKS: [Check; 8] = [
    Check::Symmetry,
    Check::SymmetryMatrix,
    Check::Nonpositivity,
    Check::IdentityFull,
    Check::IdentityDelta,
    Check::DeltaWitnesses,
    Check::Kernel,
    Check::Trace,
];

/// Runs every check at each truncation in `levels`. Deterministic in `seed`.
pub fn run_full_certification(levels: &[usize], seed: u64, counts: SampleCounts) -> Result<CertificationSummary> {
    let cfgs = levels
        .iter()
        .map(|&n| TruncationConfig::new(n))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(TruncationConfig, usize, Check)> = cfgs
        .iter()
        .flat_map(|&c| ALL_CHECKS.iter().enumerate().map(move |(i, &k)| (c, i, k)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(cfg, i, check)| {
            let s = derived_seed(seed, cfg.n_levels(), i as u64);
            match check {
                Check::Symmetry => check_symmetry_d(cfg, counts.symmetry, s),
                Check::SymmetryMatrix => check_symmetry_matrix_d(cfg),
                Check::Nonpositivity => check_nonpositivity_d(cfg, counts.nonpositivity, s),
                Check::IdentityFull => check_identity_dtr32(cfg, counts.closed_form, s),
                Check::IdentityDelta => check_identity_delta(cfg, counts.closed_form, s),
                Check::DeltaWitnesses => check_delta_witnesses(cfg),
                Check::Kernel => check_kernel_and_injectivity(cfg, PaddedSupportSpec::widest(cfg)),
                Check::Trace => check_trace_annihilation(cfg, counts.trace, s),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CertificationSummary {
        seed,
        n_levels: levels.to_vec(),
        all_pass: reports.iter().all(PropertyReport::passed),
        reports,
    })
}
