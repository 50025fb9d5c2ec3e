//! Reference computations that share no code path with the library.
#![allow(dead_code)]

use std::collections::HashMap;

use fockdyn::{ComplexMatrix, SingleParticleUnitary, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of R's diagonal folded back into Q.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> SingleParticleUnitary {
    let g = gaussian_matrix(n, rng).to_dmatrix();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_diagonal(&r.diagonal().map(|z| z / z.norm()));
    let u = q * phases;
    SingleParticleUnitary::new(ComplexMatrix::from_dmatrix(&u)).expect("QR yields a unitary")
}

/// Unit vector with Gaussian components.
pub fn random_amplitudes(d: usize, rng: &mut impl Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..d)
        .map(|_| C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Expands `prod_n (sum_m U[n][m] x_m)^{k_n}` over monomials and converts
/// the coefficient of `prod_m x_m^{j_m}` into the Fock amplitude
/// `coef * sqrt(prod j_m!) / sqrt(prod k_n!)`.
pub fn operator_polynomial_amplitudes(u: &[Vec<C64>], input: &[usize]) -> HashMap<Vec<usize>, C64> {
    let n = u.len();
    let mut poly: HashMap<Vec<usize>, C64> = HashMap::new();
    poly.insert(vec![0; n], C64::new(1.0, 0.0));
    for (mode, &k) in input.iter().enumerate() {
        for _ in 0..k {
            let mut next: HashMap<Vec<usize>, C64> = HashMap::new();
            for (mono, coef) in &poly {
                for (m, &w) in u[mode].iter().enumerate() {
                    let mut e = mono.clone();
                    e[m] += 1;
                    *next.entry(e).or_default() += coef * w;
                }
            }
            poly = next;
        }
    }
    let in_norm: f64 = input.iter().map(|&k| factorial(k)).product::<f64>().sqrt();
    poly.into_iter()
        .map(|(mono, coef)| {
            let out_norm: f64 = mono.iter().map(|&j| factorial(j)).product::<f64>().sqrt();
            (mono, coef * out_norm / in_norm)
        })
        .collect()
}

pub fn unitary_rows(u: &SingleParticleUnitary) -> Vec<Vec<C64>> {
    (0..u.dim()).map(|i| (0..u.dim()).map(|j| u.get(i, j)).collect()).collect()
}

/// All permutations of `0..n` with their signs, by Heap's algorithm.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn heap(k: usize, a: &mut Vec<usize>, sign: &mut f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if k <= 1 {
            out.push((a.clone(), *sign));
            return;
        }
        for i in 0..k - 1 {
            heap(k - 1, a, sign, out);
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            *sign = -*sign;
        }
        heap(k - 1, a, sign, out);
    }
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    heap(n, &mut a, &mut sign, &mut out);
    out
}

/// Permanent by summing over every permutation.
pub fn naive_permanent(m: &ComplexMatrix) -> C64 {
    permutations(m.rows())
        .iter()
        .map(|(p, _)| p.iter().enumerate().map(|(i, &j)| m[(i, j)]).product::<C64>())
        .sum()
}

/// Determinant by Laplace expansion along the first row.
pub fn cofactor_determinant(m: &ComplexMatrix) -> C64 {
    let n = m.rows();
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut acc = C64::default();
    for j in 0..n {
        let minor = ComplexMatrix::from_fn(n - 1, n - 1, |r, c| m[(r + 1, if c < j { c } else { c + 1 })]);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += m[(0, j)] * sign * cofactor_determinant(&minor);
    }
    acc
}

/// Every vector in `{0..=m}^n` with total `m`, filtered by brute force.
pub fn brute_force_basis(n: usize, m: usize, max_per_mode: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = (max_per_mode + 1).pow(n as u32);
    for code in 0..total {
        let mut v = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            v.push(c % (max_per_mode + 1));
            c /= max_per_mode + 1;
        }
        if v.iter().sum::<usize>() == m {
            out.push(v);
        }
    }
    out
}

/// Power iteration of a column-stochastic matrix given as rows.
pub fn power_iteration(t: &[Vec<f64>], iters: usize) -> Vec<f64> {
    let n = t.len();
    let mut p = vec![1.0 / n as f64; n];
    for _ in 0..iters {
        p = (0..n).map(|i| (0..n).map(|j| t[i][j] * p[j]).sum()).collect();
    }
    p
}

/// Applies `rho -> dephase_B(V rho V^+)` repeatedly and returns the Cesaro
/// average of the orbit, written with explicit index loops.
pub fn channel_orbit_average(v: &[Vec<C64>], b: &[Vec<C64>], rho0: &[Vec<C64>], iters: usize) -> Vec<Vec<C64>> {
    let d = v.len();
    let zero = || vec![vec![C64::default(); d]; d];
    let mut rho = rho0.to_vec();
    let mut sum = zero();
    for _ in 0..iters {
        // V rho V^+
        let mut vr = zero();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        vr[i][j] += v[i][k] * rho[k][l] * v[j][l].conj();
                    }
                }
            }
        }
        // populations in basis columns b_k, then sum_k p_k |b_k><b_k|
        let mut next = zero();
        for k in 0..d {
            let mut p = C64::default();
            for i in 0..d {
                for j in 0..d {
                    p += b[i][k].conj() * vr[i][j] * b[j][k];
                }
            }
            for i in 0..d {
                for j in 0..d {
                    next[i][j] += p * b[i][k] * b[j][k].conj();
                }
            }
        }
        rho = next;
        for i in 0..d {
            for j in 0..d {
                sum[i][j] += rho[i][j];
            }
        }
    }
    sum.into_iter()
        .map(|row| row.into_iter().map(|z| z / iters as f64).collect())
        .collect()
}
