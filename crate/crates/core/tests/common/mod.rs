//! Reference computations written directly from the defining integrals, sharing no code
//! with the library beyond its scalar type.

#![allow(dead_code)]

use num::{BigInt, One, Zero};
use pfmm::poly::Poly;
use pfmm::{int, rat, Rational};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Mat = Vec<Vec<Rational>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.random_range(-6..=6), rng.random_range(1..=5))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Mat {
    (0..r).map(|_| (0..c).map(|_| small(rng)).collect()).collect()
}

pub fn random_skew(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let mut m = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = small(rng);
            m[i][j] = v.clone();
            m[j][i] = -v;
        }
    }
    m
}

/// Pfaffian by expansion along the first row.
pub fn pf_expand(m: &Mat) -> Rational {
    let n = m.len();
    if n == 0 {
        return Rational::one();
    }
    if n % 2 == 1 {
        return Rational::zero();
    }
    let mut acc = Rational::zero();
    for j in 1..n {
        if m[0][j].is_zero() {
            continue;
        }
        let rest: Vec<usize> = (1..n).filter(|&k| k != j).collect();
        let minor: Mat = rest.iter().map(|&a| rest.iter().map(|&b| m[a][b].clone()).collect()).collect();
        let term = m[0][j].clone() * pf_expand(&minor);
        acc = if j % 2 == 1 { acc + term } else { acc - term };
    }
    acc
}

/// Determinant by Gaussian elimination.
pub fn det(m: &Mat) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c].clone();
        for r in c + 1..n {
            let f = a[r][c].clone() / a[c][c].clone();
            for k in c..n {
                let v = a[c][k].clone() * f.clone();
                a[r][k] -= v;
            }
        }
    }
    d
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k].clone() * b[k][j].clone()).sum()).collect())
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// [[a, b], [-bᵀ, c]].
pub fn block(a: &Mat, b: &Mat, c: &Mat) -> Mat {
    let (m, n) = (a.len(), c.len());
    let mut out = vec![vec![Rational::zero(); m + n]; m + n];
    for i in 0..m {
        for j in 0..m {
            out[i][j] = a[i][j].clone();
        }
        for j in 0..n {
            out[i][m + j] = b[i][j].clone();
            out[m + j][i] = -b[i][j].clone();
        }
    }
    for i in 0..n {
        for j in 0..n {
            out[m + i][m + j] = c[i][j].clone();
        }
    }
    out
}

pub fn zeros(n: usize) -> Mat {
    vec![vec![Rational::zero(); n]; n]
}

/// All permutations of 0..n with their signs.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    if n == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (p, s) in signed_permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            // inserting n-1 at `pos` creates n-1-pos inversions
            let sign = if (n - 1 - pos).is_multiple_of(2) { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

// Univariate polynomials as ascending coefficient vectors.

pub type P = Vec<Rational>;

pub fn coeffs(p: &Poly<Rational>) -> P {
    p.coeffs().to_vec()
}

pub fn p_mul(a: &P, b: &P) -> P {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x.clone() * y.clone();
        }
    }
    out
}

pub fn p_eval(a: &P, x: &Rational) -> Rational {
    a.iter().rev().fold(Rational::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// Antiderivative vanishing at 0.
pub fn p_int(a: &P) -> P {
    let mut out = vec![Rational::zero()];
    out.extend(a.iter().enumerate().map(|(k, c)| c.clone() / int(k as i64 + 1)));
    out
}

pub fn p_integral01(a: &P) -> Rational {
    p_eval(&p_int(a), &Rational::one())
}

pub fn p_deriv(a: &P) -> P {
    a.iter().enumerate().skip(1).map(|(k, c)| c.clone() * int(k as i64)).collect()
}

/// ∏ (z - x) as a polynomial in x.
pub fn char_factor(z: &[Rational]) -> P {
    z.iter().fold(vec![Rational::one()], |acc, zi| p_mul(&acc, &vec![zi.clone(), -Rational::one()]))
}

/// ∫ over 1 > y_1 > y_2 > ... > y_n > 0 of ∏_k f_k(y_k), innermost variable first.
pub fn ordered_simplex(fs: &[&P]) -> Rational {
    let mut inner: P = vec![Rational::one()];
    for f in fs.iter().rev() {
        inner = p_int(&p_mul(f, &inner));
    }
    p_eval(&inner, &Rational::one())
}

/// (1/N!) ∫_{[0,1]^N} det[f_i(x_j)] Pf[sgn(x_i - x_j)] dX, evaluated on the ordered sector
/// x_1 > … > x_N where the Pfaffian equals 1; the integrand is symmetric, so the N! sectors
/// cancel the prefactor.
pub fn sgn_ensemble_z(basis: &[P]) -> Rational {
    let n = basis.len();
    signed_permutations(n)
        .into_iter()
        .map(|(p, s)| {
            let fs: Vec<&P> = p.iter().map(|&i| &basis[i]).collect();
            ordered_simplex(&fs) * int(s)
        })
        .sum()
}

/// (1/N!) ∫_{[0,1]^N} det[f_i(x_j), g_i(x_j)]_{2N×2N} dX with columns interleaved per
/// eigenvalue. Each permutation term factorizes over the variables.
pub fn delta_ensemble_z(f: &[P], g: &[P]) -> Rational {
    let n2 = f.len();
    let m: Vec<Vec<Rational>> =
        (0..n2).map(|a| (0..n2).map(|b| p_integral01(&p_mul(&f[a], &g[b]))).collect()).collect();
    let total: Rational = signed_permutations(n2)
        .into_iter()
        .map(|(p, s)| (0..n2 / 2).map(|j| m[p[2 * j]][p[2 * j + 1]].clone()).product::<Rational>() * int(s))
        .sum();
    total / factorial(n2 / 2)
}

pub fn factorial(n: usize) -> Rational {
    (1..=n as i64).map(int).product()
}

pub fn descending(n: usize) -> Vec<P> {
    (0..n).map(|i| monomial(n - 1 - i)).collect()
}

pub fn monomial(k: usize) -> P {
    let mut v = vec![Rational::zero(); k + 1];
    v[k] = Rational::one();
    v
}

/// Γ(k/2) as (rational, power of √π).
fn gamma_half(twice: u64) -> (Rational, i32) {
    assert!(twice > 0);
    if twice.is_multiple_of(2) {
        (factorial((twice / 2 - 1) as usize), 0)
    } else {
        // Γ(n + 1/2) = (2n)! / (4^n n!) √π
        let n = (twice - 1) / 2;
        let num = factorial(2 * n as usize);
        let den = Rational::from_integer(BigInt::from(4).pow(n as u32)) * factorial(n as usize);
        (num / den, 1)
    }
}

/// Selberg integral ∫_{[0,1]^N} ∏ x^{α-1}(1-x)^{β-1} |Δ|^{2γ} for integer α, β and
/// γ ∈ ½ℤ>0, given as 2γ. Exact: powers of √π cancel.
pub fn selberg(n: usize, alpha: u64, beta: u64, two_gamma: u64) -> Rational {
    let mut value = Rational::one();
    let mut pi = 0;
    let mut mul = |t: u64, up: bool| {
        let (r, p) = gamma_half(t);
        if up {
            value *= r;
            pi += p;
        } else {
            value /= r;
            pi -= p;
        }
    };
    for j in 0..n as u64 {
        mul(2 * alpha + j * two_gamma, true);
        mul(2 * beta + j * two_gamma, true);
        mul(2 + (j + 1) * two_gamma, true);
        mul(2 * (alpha + beta) + (n as u64 + j - 1) * two_gamma, false);
        mul(2 + two_gamma, false);
    }
    assert_eq!(pi, 0, "Selberg value should be rational here");
    value
}

/// Seeded Monte Carlo mean of f over the box ∏[a_k, a_k + 1]; returns (mean, stderr).
pub fn mc_box(offsets: &[f64], samples: u64, seed: u64, f: impl Fn(&[f64]) -> f64) -> (f64, f64) {
    let mut r = rng(seed);
    let mut x = vec![0.0; offsets.len()];
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        for (xi, a) in x.iter_mut().zip(offsets) {
            *xi = a + r.random::<f64>();
        }
        let v = f(&x);
        s += v;
        s2 += v * v;
    }
    let n = samples as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn vandermonde(x: &[f64]) -> f64 {
    let mut v = 1.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            v *= x[i] - x[j];
        }
    }
    v
}

pub fn det_f64(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    d
}

/// Pfaffian of a small float matrix by first-row expansion.
pub fn pf_f64(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 1.0;
    }
    let mut acc = 0.0;
    for j in 1..n {
        let rest: Vec<usize> = (1..n).filter(|&k| k != j).collect();
        let minor: Vec<Vec<f64>> = rest.iter().map(|&a| rest.iter().map(|&b| m[a][b]).collect()).collect();
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * m[0][j] * pf_f64(&minor);
    }
    acc
}
