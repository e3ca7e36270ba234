//! Cauchy transforms ∫ q(x)/(z - x)^k dμ(x) of polynomials, k = 1, 2.
//!
//! On an interval the transform is -R(z) + q(z) ln((z-a)/(z-b)) with R a polynomial in z
//! built from the moments. The two terms cancel heavily for high-degree q, so everything
//! except the logarithm is exact and the logarithm is a rational approximation with
//! enough bits to cover the cancellation.

use num::{BigInt, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::poly::Poly;
use crate::scalar::{rational_from_f64, Field, Rational};

const GUARD_BITS: u64 = 160;

/// floor(log2 |r|) for r ≠ 0.
fn log2_floor(r: &Rational) -> i64 {
    let n = r.numer().abs();
    let d = r.denom().abs();
    let mut e = n.bits() as i64 - d.bits() as i64;
    // adjust so that 2^e ≤ n/d < 2^(e+1)
    let two = BigInt::from(2);
    let scaled = |e: i64| -> (BigInt, BigInt) {
        if e >= 0 {
            (n.clone(), &d * two.pow(e as u32))
        } else {
            (&n * two.pow((-e) as u32), d.clone())
        }
    };
    loop {
        let (a, b) = scaled(e);
        if a < b {
            e -= 1;
        } else if a >= &b * 2 {
            e += 1;
        } else {
            return e;
        }
    }
}

/// 2 artanh(t) in fixed point with `bits` fractional bits, for 0 ≤ t ≤ 1/3 given as a rational.
fn artanh2_fixed(t: &Rational, bits: u64) -> BigInt {
    let one = BigInt::one() << bits;
    let tf = (t.numer() * &one) / t.denom();
    let t2 = (&tf * &tf) >> bits;
    let mut power = tf.clone();
    let mut acc = BigInt::zero();
    let mut k = 1u64;
    while !power.is_zero() {
        acc += &power / BigInt::from(k);
        power = (&power * &t2) >> bits;
        k += 2;
    }
    acc * 2
}

/// Rational approximation of ln r (r > 0) with absolute error below 2^-bits.
pub fn ln_rational(r: &Rational, bits: u64) -> Result<Rational> {
    if !r.is_positive() {
        return Err(Error::InvalidArgument(format!("logarithm of non-positive {r}")));
    }
    let work = bits + 64;
    let e = log2_floor(r);
    let two = Rational::from_integer(BigInt::from(2));
    let mantissa = if e >= 0 { r / two.pow(e as i32) } else { r * two.pow((-e) as i32) };
    // mantissa in [1, 2): ln m = 2 artanh((m-1)/(m+1)) with argument below 1/3
    let t = (&mantissa - Rational::one()) / (&mantissa + Rational::one());
    let ln_m = artanh2_fixed(&t, work);
    let ln2 = artanh2_fixed(&Rational::new(BigInt::one(), BigInt::from(3)), work);
    let total = ln_m + ln2 * BigInt::from(e);
    Ok(Rational::new(total, BigInt::one() << work))
}

/// ∫_a^b q(x)/(z-x) dx = -R(z) + q(z) L(z) with R(z) = Σ_k c_k Σ_{j<k} z^j m_{k-1-j}.
fn remainder_poly(q: &Poly<Rational>, a: &Rational, b: &Rational) -> Poly<Rational> {
    let deg = q.degree().unwrap_or(0);
    let moments: Vec<Rational> = (0..=deg)
        .map(|k| (Field::pow(b, k as u32 + 1) - Field::pow(a, k as u32 + 1)) / Rational::from_integer((k as i64 + 1).into()))
        .collect();
    let mut r = vec![Rational::zero(); deg.max(1)];
    for (k, c) in q.coeffs().iter().enumerate() {
        for j in 0..k {
            r[j] += c * &moments[k - 1 - j];
        }
    }
    Poly::new(r)
}

fn magnitude_bits(v: &Rational) -> u64 {
    if v.is_zero() {
        return 0;
    }
    let n = v.numer().bits() as i64 - v.denom().bits() as i64;
    n.max(0) as u64
}

/// Rational approximation of ∫ q(x)/(z-x)^power dμ(x), power ∈ {1, 2}, z outside the support.
///
/// Exact for discrete measures; for uniform measures the only inexact ingredient is the
/// logarithm, evaluated with enough bits that the result is accurate far beyond f64.
pub fn cauchy_transform_exact(q: &Poly<Rational>, mu: &Measure, z: &Rational, power: u32) -> Result<Rational> {
    if !(1..=2).contains(&power) {
        return Err(Error::InvalidArgument(format!("Cauchy transform power {power}")));
    }
    match mu {
        Measure::Discrete { points } => {
            let mut acc = Rational::zero();
            for (x, w) in points {
                let d = z - x;
                if d.is_zero() {
                    return Err(Error::InsideSupport(format!("z = {z} is an atom")));
                }
                acc += w * q.eval(x) / Field::pow(&d, power);
            }
            Ok(acc)
        }
        Measure::Uniform { a, b, .. } => {
            if a <= z && z <= b {
                return Err(Error::InsideSupport(format!("z = {z} inside [{a}, {b}]")));
            }
            let ratio = (z - a) / (z - b);
            let r = remainder_poly(q, a, b);
            let (qz, dqz) = (q.eval(z), q.derivative().eval(z));
            let scale = magnitude_bits(&qz).max(magnitude_bits(&dqz)) + magnitude_bits(z);
            let log = ln_rational(&ratio, GUARD_BITS + 2 * scale)?;
            if power == 1 {
                Ok(-r.eval(z) + qz * log)
            } else {
                // -d/dz of the first transform
                let dlog = Rational::one() / (z - a) - Rational::one() / (z - b);
                Ok(r.derivative().eval(z) - dqz * log - qz * dlog)
            }
        }
        Measure::Custom { .. } => Err(Error::ExactUnavailable("custom measure is float-only".into())),
    }
}

/// Float value of the Cauchy transform; custom measures fall back to their quadrature.
pub fn cauchy_transform(q: &Poly<Rational>, mu: &Measure, z: f64, power: u32) -> Result<f64> {
    match mu {
        Measure::Custom { support, .. } => {
            if support.0 <= z && z <= support.1 {
                return Err(Error::InsideSupport(format!("z = {z} inside the support")));
            }
            let qf = q.to_f64();
            Ok(mu.nodes().iter().map(|(x, w)| w * qf.eval(x) / (z - x).powi(power as i32)).sum())
        }
        _ => {
            let zr = rational_from_f64(z)?;
            Ok(cauchy_transform_exact(q, mu, &zr, power)?.to_f64().unwrap_or(f64::NAN))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn logarithms() {
        for (p, q) in [(2, 1), (3, 1), (1, 3), (7, 5), (1000, 1), (1, 1)] {
            let v = ln_rational(&rat(p, q), 200).unwrap().to_f64().unwrap();
            assert!((v - (p as f64 / q as f64).ln()).abs() < 1e-15, "{p}/{q}");
        }
        // ln 4 - 2 ln 2 vanishes to the requested precision
        let l4 = ln_rational(&int(4), 300).unwrap();
        let l2 = ln_rational(&int(2), 300).unwrap();
        let err = (l4 - l2 * int(2)).abs();
        assert!(err < Rational::new(BigInt::one(), BigInt::one() << 290u32));
        assert!(ln_rational(&int(0), 10).is_err());
    }

    #[test]
    fn transforms_match_hilbert_moments() {
        let u = Measure::unit();
        for k in 0..8 {
            let q = Poly::<Rational>::monomial(k);
            for &z in &[2.0, 3.5, -1.25] {
                let exact = cauchy_transform(&q, &u, z, 1).unwrap();
                let float = u.hilbert_moment(k, z).unwrap();
                assert!((exact - float).abs() < 1e-13 * float.abs().max(1.0), "k={k} z={z}");
                let h = 1e-5;
                let fd = -(u.hilbert_moment(k, z + h).unwrap() - u.hilbert_moment(k, z - h).unwrap()) / (2.0 * h);
                let sq = cauchy_transform(&q, &u, z, 2).unwrap();
                assert!((sq - fd).abs() < 1e-7 * fd.abs().max(1.0), "k={k} z={z}");
            }
        }
        assert!(cauchy_transform(&Poly::constant(int(1)), &u, 0.5, 1).is_err());
    }

    #[test]
    fn high_degree_cancellation() {
        // ∫_0^1 (x-2)^30/(2-x) dx = ∫ (2-x)^29 dx = (2^30 - 1)/30
        let q = (0..30).fold(Poly::constant(int(1)), |acc, _| acc.mul(&Poly::new(vec![int(-2), int(1)])));
        let v = cauchy_transform(&q, &Measure::unit(), 2.0, 1).unwrap();
        let expected = (2f64.powi(30) - 1.0) / 30.0;
        assert!((v - expected).abs() < 1e-12 * expected);
        // and a small result from large cancelling pieces: ∫ x^30/(3-x)
        let w = cauchy_transform(&Poly::monomial(30), &Measure::unit(), 3.0, 1).unwrap();
        let quad: f64 = Measure::unit().nodes().iter().map(|(x, wt)| wt * x.powi(30) / (3.0 - x)).sum();
        assert!((w - quad).abs() < 1e-14);
    }

    #[test]
    fn discrete_is_exact() {
        let d = Measure::discrete(vec![(int(0), int(1)), (int(1), rat(1, 2))]).unwrap();
        let q = Poly::new(vec![int(1), int(1)]);
        assert_eq!(cauchy_transform_exact(&q, &d, &int(2), 1).unwrap(), rat(1, 2) + rat(1, 2) * int(2));
        assert_eq!(cauchy_transform_exact(&q, &d, &int(2), 2).unwrap(), rat(1, 4) + rat(1, 2) * int(2));
    }
}
