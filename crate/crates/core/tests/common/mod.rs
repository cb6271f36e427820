//! Brute-force reference computations shared by the integration tests.
//!
//! Everything here is built from explicit Kronecker products and dense
//! matrices, independent of the library's contraction kernels.

#![allow(dead_code)]

use num_complex::Complex64;

pub const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Single-site projector vector for basis `b` ('Z'/'X') and sign `s` ('+'/'-').
fn site_vector(b: char, s: char) -> [f64; 2] {
    match (b, s) {
        ('Z', '+') => [1.0, 0.0],
        ('Z', '-') => [0.0, 1.0],
        ('X', '+') => [SQRT_HALF, SQRT_HALF],
        ('X', '-') => [SQRT_HALF, -SQRT_HALF],
        _ => panic!("bad site {b}{s}"),
    }
}

/// Product vector `⊗ φ_i` with site 0 as the lowest-order bit.
pub fn product_vector(setting: &str, outcome: &str) -> Vec<f64> {
    let sites: Vec<[f64; 2]> = setting
        .chars()
        .zip(outcome.chars())
        .map(|(b, s)| site_vector(b, s))
        .collect();
    let n = sites.len();
    (0..1usize << n)
        .map(|idx| (0..n).map(|i| sites[i][idx >> i & 1]).product())
        .collect()
}

pub fn w_amplitudes(n: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << n];
    for i in 0..n {
        v[1 << i] = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    }
    v
}

pub fn pure_probability(amps: &[Complex64], setting: &str, outcome: &str) -> f64 {
    let phi = product_vector(setting, outcome);
    assert_eq!(phi.len(), amps.len());
    phi.iter()
        .zip(amps)
        .map(|(f, a)| a * *f)
        .sum::<Complex64>()
        .norm_sqr()
}

/// Dense density matrix, row-major.
pub struct Density {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl Density {
    pub fn pure(amps: &[Complex64]) -> Self {
        let dim = amps.len();
        let data = (0..dim * dim)
            .map(|k| amps[k / dim] * amps[k % dim].conj())
            .collect();
        Self { dim, data }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1 << n;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Self { dim, data }
    }

    pub fn mix(&self, p: f64, other: &Self) -> Self {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * p + b * (1.0 - p))
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    /// `⟨φ|ρ|φ⟩` for a real product vector.
    pub fn probability(&self, setting: &str, outcome: &str) -> f64 {
        let phi = product_vector(setting, outcome);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.data[i * self.dim + j] * phi[i] * phi[j];
            }
        }
        acc.re
    }
}

pub fn all_settings(n: usize) -> impl Iterator<Item = String> {
    (0..1u32 << n).map(move |m| {
        (0..n)
            .map(|i| if m >> i & 1 == 1 { 'X' } else { 'Z' })
            .collect()
    })
}

pub fn all_outcomes(n: usize) -> impl Iterator<Item = String> {
    (0..1u32 << n).map(move |m| {
        (0..n)
            .map(|i| if m >> i & 1 == 1 { '-' } else { '+' })
            .collect()
    })
}
