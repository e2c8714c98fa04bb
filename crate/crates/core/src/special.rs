//! Bessel and Hankel functions of orders 0, 1 and 2.
//!
//! Small arguments use the ascending power series, large arguments use
//! Hankel's asymptotic expansion. The switchover radius balances the
//! cancellation error of the series against the smallest term of the
//! asymptotic series; both stay near 1e-12 absolute at the boundary.
//!
//! The real-argument functions are what the folded Sommerfeld path needs.
//! The complex-argument variants in [`complex`] exist for integrating along
//! deformed contours that leave the real axis.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

const SWITCH: f64 = 14.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest supported order.
pub const MAX_ORDER: u32 = 2;

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Digamma at a positive integer: psi(m) = -gamma + sum_{k<m} 1/k.
fn digamma_int(m: u32) -> f64 {
    -EULER_GAMMA + (1..m).map(|k| 1.0 / k as f64).sum::<f64>()
}

fn j_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    let mut term = half.powi(n as i32) / factorial(n);
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k as f64 > half {
            break;
        }
        if k > 200 {
            break;
        }
    }
    sum
}

fn y_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    let mut finite = 0.0;
    for k in 0..n {
        finite += factorial(n - k - 1) / factorial(k) * half.powi(2 * k as i32 - n as i32);
    }
    let mut term = half.powi(n as i32) / factorial(n);
    let mut sum = term * (digamma_int(1) + digamma_int(n + 1));
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + n) as f64);
        let contrib = term * (digamma_int(k + 1) + digamma_int(k + n + 1));
        sum += contrib;
        if contrib.abs() <= 1e-17 * sum.abs().max(1e-300) && k as f64 > half {
            break;
        }
        if k > 200 {
            break;
        }
    }
    2.0 / PI * j_series(n, x) * half.ln() - finite / PI - sum / PI
}

/// Coefficients P and Q of Hankel's expansion, summed until the terms stop
/// shrinking.
fn asymptotic_pq(n: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (n * n) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60u32 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (8.0 * k as f64 * x);
        if a.abs() > last || a == 0.0 {
            break;
        }
        last = a.abs();
        // i^k pattern: k = 1 -> Q, k = 2 -> -P, k = 3 -> -Q, k = 4 -> P.
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn jy_asymptotic(n: u32, x: f64) -> (f64, f64) {
    let (p, q) = asymptotic_pq(n, x);
    let chi = x - (n as f64 * FRAC_PI_2 + FRAC_PI_4);
    let amp = (2.0 / (PI * x)).sqrt();
    let (s, c) = chi.sin_cos();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

/// Bessel function of the first kind, J_n(x), for n <= 2 and real x.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    assert!(n <= MAX_ORDER, "order {n} not supported");
    let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let ax = x.abs();
    sign * if ax < SWITCH {
        j_series(n, ax)
    } else {
        jy_asymptotic(n, ax).0
    }
}

/// Bessel function of the second kind, Y_n(x), for n <= 2 and x > 0.
pub fn bessel_y(n: u32, x: f64) -> f64 {
    assert!(n <= MAX_ORDER, "order {n} not supported");
    if x <= 0.0 {
        return f64::NAN;
    }
    if x < SWITCH {
        y_series(n, x)
    } else {
        jy_asymptotic(n, x).1
    }
}

/// J0, J1 and J2 at one argument. On the asymptotic branch the three
/// orders share the trigonometric work.
pub fn bessel_j012(x: f64) -> [f64; 3] {
    let ax = x.abs();
    let odd = if x < 0.0 { -1.0 } else { 1.0 };
    if ax < SWITCH {
        [j_series(0, ax), odd * j_series(1, ax), j_series(2, ax)]
    } else {
        let j0 = jy_asymptotic(0, ax).0;
        let j1 = jy_asymptotic(1, ax).0;
        // Upward recurrence is stable for x > n.
        let j2 = 2.0 / ax * j1 - j0;
        [j0, odd * j1, j2]
    }
}

/// Hankel function of the first kind, H_n^(1)(x) = J_n(x) + j Y_n(x), x > 0.
pub fn hankel1(n: u32, x: f64) -> Complex64 {
    Complex64::new(bessel_j(n, x), bessel_y(n, x))
}

/// d/dx J_1(x) = J_1(x)/x - J_2(x), finite at the origin.
pub fn bessel_j1_prime(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        return 0.5;
    }
    let [_, j1, j2] = bessel_j012(x);
    j1 / x - j2
}

pub mod complex {
    //! Complex-argument Bessel and Hankel functions, principal branches
    //! (cut along the negative real axis).

    use super::{digamma_int, factorial, MAX_ORDER, SWITCH};
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

    fn j_series(n: u32, z: Complex64) -> Complex64 {
        let half = 0.5 * z;
        let q = -half * half;
        let mut term = half.powu(n) / factorial(n);
        let mut sum = term;
        for k in 1..300u32 {
            term *= q / (k as f64 * (k + n) as f64);
            sum += term;
            if term.norm() <= 1e-17 * sum.norm().max(1e-300) && k as f64 > half.norm() {
                break;
            }
        }
        sum
    }

    fn y_series(n: u32, z: Complex64) -> Complex64 {
        let half = 0.5 * z;
        let q = -half * half;
        let mut finite = Complex64::new(0.0, 0.0);
        for k in 0..n {
            finite += factorial(n - k - 1) / factorial(k) * half.powi(2 * k as i32 - n as i32);
        }
        let mut term = half.powu(n) / factorial(n);
        let mut sum = term * (digamma_int(1) + digamma_int(n + 1));
        for k in 1..300u32 {
            term *= q / (k as f64 * (k + n) as f64);
            let contrib = term * (digamma_int(k + 1) + digamma_int(k + n + 1));
            sum += contrib;
            if contrib.norm() <= 1e-17 * sum.norm().max(1e-300) && k as f64 > half.norm() {
                break;
            }
        }
        2.0 / PI * j_series(n, z) * half.ln() - finite / PI - sum / PI
    }

    /// Hankel's expansion of H_n^(1)(z), valid for -pi < arg z < 2pi.
    fn h1_asymptotic(n: u32, z: Complex64) -> Complex64 {
        let mu = 4.0 * (n * n) as f64;
        let mut a = Complex64::new(1.0, 0.0);
        let mut sum = a;
        let mut last = f64::INFINITY;
        for k in 1..60u32 {
            let odd = (2 * k - 1) as f64;
            a *= I * (mu - odd * odd) / (8.0 * k as f64 * z);
            let mag = a.norm();
            if mag > last || mag == 0.0 {
                break;
            }
            last = mag;
            sum += a;
            if mag < 1e-17 {
                break;
            }
        }
        let chi = z - (n as f64 * FRAC_PI_2 + FRAC_PI_4);
        (2.0 / (PI * z)).sqrt() * (I * chi).exp() * sum
    }

    /// J_n(z) for complex z.
    pub fn bessel_j(n: u32, z: Complex64) -> Complex64 {
        assert!(n <= MAX_ORDER);
        if z.norm() < SWITCH {
            j_series(n, z)
        } else {
            // J = (H1 + H2) / 2 with H2(z) = conj(H1(conj z)) for the
            // principal branches.
            0.5 * (h1_asymptotic(n, z) + h1_asymptotic(n, z.conj()).conj())
        }
    }

    /// Y_n(z) for complex z off the negative real axis.
    pub fn bessel_y(n: u32, z: Complex64) -> Complex64 {
        assert!(n <= MAX_ORDER);
        if z.norm() < SWITCH {
            y_series(n, z)
        } else {
            (h1_asymptotic(n, z) - h1_asymptotic(n, z.conj()).conj()) / (2.0 * I)
        }
    }

    /// H_n^(1)(z) for complex z off the negative real axis.
    pub fn hankel1(n: u32, z: Complex64) -> Complex64 {
        assert!(n <= MAX_ORDER);
        if z.norm() < SWITCH {
            j_series(n, z) + I * y_series(n, z)
        } else {
            h1_asymptotic(n, z)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from an independent double-precision library.
    const REF: &[(f64, [f64; 6])] = &[
        (
            0.5,
            [
                0.938_469_807_240_813,
                0.242_268_457_674_873_9,
                0.030_604_023_458_682_638,
                -0.444_518_733_506_706_7,
                -1.471_472_392_670_243,
                -5.441_370_837_174_266,
            ],
        ),
        (
            1.0,
            [
                0.765_197_686_557_966_6,
                0.440_050_585_744_933_5,
                0.114_903_484_931_900_5,
                0.088_256_964_215_676_96,
                -0.781_212_821_300_288_7,
                -1.650_682_606_816_254_5,
            ],
        ),
        (
            10.0,
            [
                -0.245_935_764_451_348_3,
                0.043_472_746_168_861_44,
                0.254_630_313_685_120_5,
                0.055_671_167_283_599_39,
                0.249_015_424_206_953_9,
                -0.005_868_082_442_208_615_5,
            ],
        ),
    ];

    #[test]
    fn matches_reference_values() {
        for (x, vals) in REF {
            for n in 0..3 {
                let j = bessel_j(n, *x);
                let y = bessel_y(n, *x);
                assert!((j - vals[n as usize]).abs() < 1e-11, "J{n}({x}) = {j}");
                assert!((y - vals[3 + n as usize]).abs() < 1e-11, "Y{n}({x}) = {y}");
            }
        }
    }

    /// Bessel's integral J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt,
    /// evaluated with the trapezoid rule (spectrally accurate here).
    fn j_by_integral(n: u32, x: f64) -> f64 {
        let m = 4000;
        let h = PI / m as f64;
        let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
        let mut s = 0.5 * (f(0.0) + f(PI));
        for i in 1..m {
            s += f(i as f64 * h);
        }
        s * h / PI
    }

    #[test]
    fn j_agrees_with_integral_representation_across_switchover() {
        for &x in &[0.1, 3.0, 7.5, 13.9, 14.0, 14.1, 25.0, 80.0, 400.0] {
            for n in 0..3 {
                let a = bessel_j(n, x);
                let b = j_by_integral(n, x);
                assert!((a - b).abs() < 2e-11, "J{n}({x}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn wronskian_holds() {
        for &x in &[0.3, 2.0, 9.0, 13.99, 14.01, 50.0, 300.0] {
            let w = bessel_j(1, x) * bessel_y(0, x) - bessel_j(0, x) * bessel_y(1, x);
            assert!((w - 2.0 / (PI * x)).abs() < 1e-11 * (1.0 + 2.0 / (PI * x)), "x = {x}");
        }
    }

    #[test]
    fn recurrence_links_orders() {
        for &x in &[0.7, 5.0, 13.0, 15.0, 60.0] {
            let j = 2.0 / x * bessel_j(1, x) - bessel_j(0, x);
            let y = 2.0 / x * bessel_y(1, x) - bessel_y(0, x);
            assert!((j - bessel_j(2, x)).abs() < 1e-11);
            assert!((y - bessel_y(2, x)).abs() < 1e-10 * y.abs().max(1.0));
        }
    }

    #[test]
    fn j012_matches_individual_calls() {
        for &x in &[-3.0, 0.0, 1e-9, 2.5, 20.0, -20.0] {
            let v = bessel_j012(x);
            for n in 0..3 {
                assert!((v[n] - bessel_j(n as u32, x)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn j1_prime_is_derivative() {
        for &x in &[0.0, 0.4, 6.0, 30.0] {
            let h = 1e-5;
            let fd = (bessel_j(1, x + h) - bessel_j(1, x - h)) / (2.0 * h);
            assert!((bessel_j1_prime(x) - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn complex_reduces_to_real_on_positive_axis() {
        for &x in &[0.5, 8.0, 14.5, 90.0] {
            for n in 0..3 {
                let z = Complex64::new(x, 0.0);
                let h = complex::hankel1(n, z);
                assert!((h - hankel1(n, x)).norm() < 1e-11 * (1.0 + h.norm()));
                let j = complex::bessel_j(n, z);
                assert!((j.re - bessel_j(n, x)).abs() < 1e-11 && j.im.abs() < 1e-11);
            }
        }
    }

    #[test]
    fn complex_series_and_asymptotic_agree_at_switch() {
        // Points straddling |z| = 14 in several quadrants.
        for &(r, th) in &[(13.999, 0.3), (14.001, 0.3), (13.999, 2.9), (14.001, 2.9), (14.0, -0.4)] {
            let z = Complex64::from_polar(r, th);
            let zz = Complex64::from_polar(r - 0.01, th);
            for n in 0..3 {
                let a = complex::hankel1(n, z);
                let b = complex::hankel1(n, zz);
                // Continuity across the switch radius.
                assert!((a - b).norm() < 0.05 * a.norm().max(b.norm()) + 1e-9, "n={n} z={z}");
            }
        }
        // Independent check: complex Wronskian W[J, Y] = 2/(pi z).
        for &(r, th) in &[(3.0, 2.5), (20.0, 2.8), (40.0, -0.2), (14.0, 0.3), (13.9, 0.3)] {
            let z = Complex64::from_polar(r, th);
            let w = complex::bessel_j(1, z) * complex::bessel_y(0, z)
                - complex::bessel_j(0, z) * complex::bessel_y(1, z);
            let expect = 2.0 / (PI * z);
            assert!((w - expect).norm() < 1e-9 * expect.norm().max(1.0) + 1e-10, "z={z}: {w}");
        }
    }

    #[test]
    fn hankel_reflection_across_origin() {
        // H_0^(1)(z e^{i pi}) = -H_0^(2)(z) = -conj(H_0^(1)(conj z)).
        for &x in &[0.8, 5.0, 17.0] {
            let z = Complex64::new(-x, 1e-12);
            let lhs = complex::hankel1(0, z);
            let rhs = -hankel1(0, x).conj();
            assert!((lhs - rhs).norm() < 1e-8 * rhs.norm(), "x={x}: {lhs} vs {rhs}");
        }
    }
}
