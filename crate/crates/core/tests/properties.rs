// Copyright 2026 Dissipator Lab Contributors
// SPDX-License-Identifier: Apache-2.0

mod common;

use dissipator_lab::dissipator::{apply_dissipator, hs_adjoint, quadratic_form};
use dissipator_lab::fock::LadderOps;
use dissipator_lab::hs::{hs_inner, hs_norm, random_hermitian, standard_hermitian_basis};
use dissipator_lab::verification::MatrixRecord;
use dissipator_lab::{DissipatorKind, TruncationConfig};
use proptest::prelude::*;

fn kind(full: bool) -> DissipatorKind {
    if full {
        DissipatorKind::FullD
    } else {
        DissipatorKind::DeltaOnly
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_index_formula(n in 2usize..7, seed in any::<u64>(), scale in 0.01f64..100.0, full in any::<bool>()) {
        let cfg = TruncationConfig::new(n).unwrap();
        let rho = random_hermitian(2 * n, scale, seed);
        let lib = apply_dissipator(kind(full), &rho, &LadderOps::new(cfg)).unwrap();
        let dense = common::from_nalgebra(rho.matrix());
        let oracle = common::dissipator(n, full, &dense);
        let diff = common::max_abs_diff(&common::from_nalgebra(lib.matrix()), &oracle);
        prop_assert!(diff <= 1e-13 * scale * n as f64, "diff {diff}");
    }

    #[test]
    fn full_dissipator_symmetric_and_nonpositive(n in 2usize..9, seed in any::<u64>(), scale in 0.01f64..100.0) {
        let ops = LadderOps::new(TruncationConfig::new(n).unwrap());
        let x = random_hermitian(2 * n, scale, seed);
        let y = random_hermitian(2 * n, 1.0, seed.wrapping_add(1));
        let d = |r| apply_dissipator(DissipatorKind::FullD, r, &ops).unwrap();
        let lhs = hs_inner(&x, &d(&y)).unwrap();
        let rhs = hs_inner(&d(&x), &y).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * hs_norm(&x) * hs_norm(&y));
        prop_assert!(quadratic_form(DissipatorKind::FullD, &x, &ops).unwrap() <= 1e-12 * hs_norm(&x).powi(2));
    }

    #[test]
    fn adjoint_pairs_with_dissipator(n in 2usize..7, seed in any::<u64>(), full in any::<bool>()) {
        let ops = LadderOps::new(TruncationConfig::new(n).unwrap());
        let x = random_hermitian(2 * n, 1.0, seed);
        let y = random_hermitian(2 * n, 1.0, seed ^ 0xFFFF);
        let k = kind(full);
        let lhs = hs_inner(&x, &apply_dissipator(k, &y, &ops).unwrap()).unwrap();
        let rhs = hs_inner(&hs_adjoint(k, &x, &ops).unwrap(), &y).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * hs_norm(&x) * hs_norm(&y));
    }

    #[test]
    fn dissipators_are_traceless(n in 2usize..9, seed in any::<u64>(), scale in 0.01f64..100.0, full in any::<bool>()) {
        let ops = LadderOps::new(TruncationConfig::new(n).unwrap());
        let x = random_hermitian(2 * n, scale, seed);
        let out = apply_dissipator(kind(full), &x, &ops).unwrap();
        prop_assert!(out.trace().abs() <= 1e-12 * hs_norm(&x));
    }

    #[test]
    fn basis_coordinates_round_trip(dim in 1usize..9, seed in any::<u64>()) {
        let basis = standard_hermitian_basis(dim).unwrap();
        let x = random_hermitian(dim, 3.0, seed);
        let v = basis.vectorize(&x).unwrap();
        prop_assert!((v.norm() - hs_norm(&x)).abs() <= 1e-12 * hs_norm(&x).max(1.0));
        let back = basis.devectorize(&v).unwrap();
        prop_assert!(hs_norm(&back.sub(&x).unwrap()) <= 1e-12 * hs_norm(&x).max(1.0));
    }

    #[test]
    fn matrix_records_round_trip_through_json(dim in 1usize..6, seed in any::<u64>(), scale in 1e-200f64..1e200) {
        let x = random_hermitian(dim, scale, seed);
        let rec = MatrixRecord::from(&x);
        let back: MatrixRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
        prop_assert_eq!(back.to_hermitian().unwrap(), x);
    }
}
