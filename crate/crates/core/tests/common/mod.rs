// Copyright 2026 Dissipator Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Reference evaluations written directly from matrix elements, sharing no
//! code with the library: `a|n⟩ = √n |n-1⟩` on `N` levels, basis index
//! `2n + s`.

#![allow(dead_code)]

use num_complex::Complex64 as C;

pub type Dense = Vec<Vec<C>>;

pub fn zeros(d: usize) -> Dense {
    vec![vec![C::new(0.0, 0.0); d]; d]
}

/// `Σ_{ij} x_ij y_ji`, real part.
pub fn trace_product(x: &Dense, y: &Dense) -> f64 {
    let d = x.len();
    let mut acc = C::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += x[i][j] * y[j][i];
        }
    }
    acc.re
}

pub fn frobenius_sq(x: &Dense) -> f64 {
    x.iter().flatten().map(|z| z.norm_sqr()).sum()
}

/// Applies `aρa† - ½{a†a,ρ}` and, when `full`, also `a†ρa - ½{aa†,ρ}`, with
/// `aa†` the product of the truncated matrices (zero on the top level).
pub fn dissipator(n_levels: usize, full: bool, rho: &Dense) -> Dense {
    let d = 2 * n_levels;
    let level = |i: usize| i / 2;
    let number = |i: usize| level(i) as f64;
    let raised = |i: usize| {
        if level(i) + 1 < n_levels {
            (level(i) + 1) as f64
        } else {
            0.0
        }
    };
    let mut out = zeros(d);
    for i in 0..d {
        for j in 0..d {
            let (ni, nj) = (level(i), level(j));
            let mut v = C::new(0.0, 0.0);
            if ni + 1 < n_levels && nj + 1 < n_levels {
                v += rho[i + 2][j + 2] * (((ni + 1) * (nj + 1)) as f64).sqrt();
            }
            v -= rho[i][j] * (0.5 * (number(i) + number(j)));
            if full {
                if ni >= 1 && nj >= 1 {
                    v += rho[i - 2][j - 2] * ((ni * nj) as f64).sqrt();
                }
                v -= rho[i][j] * (0.5 * (raised(i) + raised(j)));
            }
            out[i][j] = v;
        }
    }
    out
}

/// `|n, s⟩⟨n, s|` with `s = 0` the upper spin state.
pub fn projector(n_levels: usize, n: usize, s: usize) -> Dense {
    let mut p = zeros(2 * n_levels);
    p[2 * n + s][2 * n + s] = C::new(1.0, 0.0);
    p
}

pub fn from_nalgebra(m: &nalgebra::DMatrix<C>) -> Dense {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn max_abs_diff(x: &Dense, y: &Dense) -> f64 {
    x.iter()
        .flatten()
        .zip(y.iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}
