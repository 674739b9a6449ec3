//! Independent reference implementations used as test oracles.
//!
//! Everything here follows the defining formulas directly (quadratic sums,
//! exhaustive enumeration) and shares no code with the library.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Direct O((NM)^2) evaluation of the 2-D DFT. Returns (re, im) row-major.
pub fn brute_dft2(m: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let n = m.len();
    let k = m[0].len();
    let mut out = Vec::with_capacity(n * k);
    for u in 0..n {
        for v in 0..k {
            let (mut re, mut im) = (0.0, 0.0);
            for (x, row) in m.iter().enumerate() {
                for (y, &val) in row.iter().enumerate() {
                    let angle = -2.0 * PI * ((u * x) as f64 / n as f64 + (v * y) as f64 / k as f64);
                    re += val * angle.cos();
                    im += val * angle.sin();
                }
            }
            out.push((re, im));
        }
    }
    out
}

/// Tie-averaged ranks by counting, O(n^2).
pub fn brute_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            let below = values.iter().filter(|&&w| w < v).count() as f64;
            let equal = values.iter().filter(|&&w| w == v).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Exact one-sided p-values `(P(W+ <= w), P(W+ >= w))` by enumerating all
/// 2^n sign assignments. Zero differences are dropped first.
pub fn brute_wilcoxon(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let d: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if d.is_empty() {
        return None;
    }
    let ranks = brute_ranks(&d.iter().map(|x| x.abs()).collect::<Vec<_>>());
    let observed: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(x, _)| **x > 0.0)
        .map(|(_, r)| r)
        .sum();
    let n = d.len();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| ranks[i])
            .sum();
        if w <= observed + 1e-9 {
            le += 1;
        }
        if w >= observed - 1e-9 {
            ge += 1;
        }
    }
    let total = (1u64 << n) as f64;
    Some((le as f64 / total, ge as f64 / total))
}

/// Cliff's delta over all cross pairs.
pub fn brute_cliffs_delta(xs: &[f64], ys: &[f64]) -> f64 {
    let mut greater = 0i64;
    let mut less = 0i64;
    for x in xs {
        for y in ys {
            if x > y {
                greater += 1;
            } else if x < y {
                less += 1;
            }
        }
    }
    (greater - less) as f64 / (xs.len() * ys.len()) as f64
}
