//! Vacuum energy density of a massless field with one periodic direction of
//! length `R`, reported as the dimensionless constant `<T00> R^4`.

use std::f64::consts::PI;

use super::{AnalyticResult, Provenance};

/// Physical degrees of freedom of the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarizations {
    Scalar,
    Electromagnetic,
}

impl Polarizations {
    fn count(self) -> f64 {
        match self {
            Polarizations::Scalar => 1.0,
            Polarizations::Electromagnetic => 2.0,
        }
    }
}

/// Bernoulli numbers `B_0..=B_n` as exact fractions (`B_1 = -1/2`).
fn bernoulli(n: usize) -> Vec<(i128, i128)> {
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    fn reduce((p, q): (i128, i128)) -> (i128, i128) {
        let g = gcd(p, q).max(1);
        let s = if q < 0 { -1 } else { 1 };
        (s * p / g, s * q / g)
    }
    let binom = |n: usize, k: usize| -> i128 {
        let mut c: i128 = 1;
        for i in 0..k {
            c = c * (n - i) as i128 / (i + 1) as i128;
        }
        c
    };
    // sum_{k=0}^{m} C(m+1, k) B_k = 0 for m >= 1.
    let mut b: Vec<(i128, i128)> = vec![(1, 1)];
    for m in 1..=n {
        let (mut p, mut q) = (0i128, 1i128);
        for (k, &(bp, bq)) in b.iter().enumerate() {
            let c = binom(m + 1, k);
            (p, q) = reduce((p * bq + c * bp * q, q * bq));
        }
        b.push(reduce((-p, q * (m as i128 + 1))));
    }
    b
}

/// `zeta(-n)` for odd `n`, from `zeta(-n) = -B_{n+1} / (n + 1)`.
fn zeta_negative_odd(n: usize) -> f64 {
    assert!(n % 2 == 1);
    let (p, q) = bernoulli(n + 1)[n + 1];
    -(p as f64) / (q as f64) / (n + 1) as f64
}

/// Zeta-regularized mode sum.
///
/// Per polarization the energy per transverse area is
/// `1/2 sum_n int d^2k/(2pi)^2 sqrt(k^2 + (2 pi n / R)^2)`. Continuing the
/// transverse integral gives `-|kappa_n|^3 / (6 pi)` per mode, and the sum
/// over `n` becomes `2 (2 pi / R)^3 zeta(-3)`; dividing by `R` gives the
/// density.
pub fn zeta_modesum_constant(pol: Polarizations) -> f64 {
    let per_polarization = -(1.0 / (6.0 * PI)) * (2.0 * PI).powi(3) * zeta_negative_odd(3);
    pol.count() * per_polarization
}

/// The same constant from the dual (image) representation,
/// `-pol * Gamma(2) / pi^2 * sum_{n >= 1} n^-4`, truncated after `terms`
/// images plus the leading Euler-Maclaurin tail. The convergence field is
/// the change from `terms / 2` images.
pub fn image_sum_constant(pol: Polarizations, terms: usize) -> AnalyticResult {
    let sum = |k: usize| -> f64 {
        let k = k.max(1);
        // Smallest terms first for accuracy.
        let head: f64 = (1..=k).rev().map(|n| (n as f64).powi(-4)).sum();
        let kf = k as f64;
        head + 1.0 / (3.0 * kf.powi(3)) - 1.0 / (2.0 * kf.powi(4)) + 1.0 / (3.0 * kf.powi(5))
    };
    let scale = -pol.count() / (PI * PI);
    let fine = scale * sum(terms);
    let coarse = scale * sum(terms / 2);
    AnalyticResult {
        value: fine,
        provenance: Provenance::ModeSum,
        refinement: terms,
        convergence: (fine - coarse).abs(),
    }
}

/// `<T00> R^4` of the electromagnetic field with one periodic direction.
///
/// The value is the zeta-regularized mode sum; the convergence field holds
/// its distance to the independently summed image representation.
pub fn periodic_modesum_constant() -> AnalyticResult {
    let value = zeta_modesum_constant(Polarizations::Electromagnetic);
    let check = image_sum_constant(Polarizations::Electromagnetic, 4096);
    AnalyticResult {
        value,
        provenance: Provenance::ModeSum,
        refinement: check.refinement,
        convergence: (value - check.value).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_numbers() {
        let b = bernoulli(8);
        assert_eq!(b[1], (-1, 2));
        assert_eq!(b[2], (1, 6));
        assert_eq!(b[3], (0, 1));
        assert_eq!(b[4], (-1, 30));
        assert_eq!(b[8], (-1, 30));
        assert!((zeta_negative_odd(1) + 1.0 / 12.0).abs() < 1e-15);
        assert!((zeta_negative_odd(3) - 1.0 / 120.0).abs() < 1e-15);
    }

    #[test]
    fn two_schemes_agree() {
        let zeta = zeta_modesum_constant(Polarizations::Electromagnetic);
        let image = image_sum_constant(Polarizations::Electromagnetic, 2000);
        assert!(((zeta - image.value) / zeta).abs() < 1e-6);
        let c = periodic_modesum_constant();
        assert_eq!(c.value, zeta);
        assert!(c.convergence < 1e-10);
        assert!(c.value < 0.0);
    }

    #[test]
    fn scalar_is_half() {
        let em = zeta_modesum_constant(Polarizations::Electromagnetic);
        let sc = zeta_modesum_constant(Polarizations::Scalar);
        assert!((em - 2.0 * sc).abs() < 1e-15);
        let ims = image_sum_constant(Polarizations::Scalar, 500).value;
        assert!((ims - sc).abs() < 1e-9);
    }

    #[test]
    fn truncation_within_estimate() {
        for k in [8usize, 32, 128] {
            let a = image_sum_constant(Polarizations::Electromagnetic, k);
            let b = image_sum_constant(Polarizations::Electromagnetic, 2 * k);
            assert!((a.value - b.value).abs() <= a.convergence);
        }
    }
}
