//! Globally adaptive Gauss-Kronrod (7/15) quadrature for vector-valued
//! complex integrands.
//!
//! All components share one set of abscissae, so an integrand that needs
//! expensive common work (Bessel functions, square roots) evaluates it once
//! per node. The interval with the largest error estimate is bisected until
//! the summed estimate meets the tolerance or the evaluation budget runs out.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639,
    0.949_107_912_342_758_525,
    0.864_864_423_359_769_073,
    0.741_531_185_599_394_440,
    0.586_087_235_467_691_130,
    0.405_845_151_377_397_167,
    0.207_784_955_007_898_468,
    0.000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_553,
    0.104_790_010_322_250_184,
    0.140_653_259_715_525_919,
    0.169_004_726_639_267_903,
    0.190_350_578_064_785_410,
    0.204_432_940_075_298_892,
    0.209_482_141_084_727_828,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693,
    0.279_705_391_489_276_668,
    0.381_830_050_505_118_945,
    0.417_959_183_673_469_388,
];

/// Integration accuracy requested by the caller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
    /// Upper bound on integrand evaluations.
    pub max_evaluations: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            relative: 1e-6,
            absolute: 0.0,
            max_evaluations: 2_000_000,
        }
    }
}

/// Integral value with its error estimate (max-norm over components).
#[derive(Debug, Clone, Copy)]
pub struct Estimate<const N: usize> {
    pub value: [Complex64; N],
    pub error: f64,
    /// Integral of the max-norm of the integrand, used as a roundoff scale.
    pub magnitude: f64,
    pub evaluations: usize,
}

impl<const N: usize> Estimate<N> {
    fn zero() -> Self {
        Estimate {
            value: [Complex64::new(0.0, 0.0); N],
            error: 0.0,
            magnitude: 0.0,
            evaluations: 0,
        }
    }

    pub fn norm(&self) -> f64 {
        max_norm(&self.value)
    }

    pub(crate) fn accumulate(&mut self, other: &Estimate<N>) {
        for (a, b) in self.value.iter_mut().zip(other.value.iter()) {
            *a += *b;
        }
        self.error += other.error;
        self.magnitude += other.magnitude;
        self.evaluations += other.evaluations;
    }
}

pub(crate) fn max_norm<const N: usize>(v: &[Complex64; N]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

struct Segment<const N: usize> {
    a: f64,
    b: f64,
    est: Estimate<N>,
}

impl<const N: usize> PartialEq for Segment<N> {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl<const N: usize> Eq for Segment<N> {}
impl<const N: usize> PartialOrd for Segment<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Segment<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est
            .error
            .partial_cmp(&other.est.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
pub fn gauss_kronrod<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Estimate<N>
where
    F: FnMut(f64) -> [Complex64; N],
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let zero = Complex64::new(0.0, 0.0);
    let mut kron = [zero; N];
    let mut gauss = [zero; N];
    let mut magnitude = 0.0;

    let fc = f(centre);
    for i in 0..N {
        kron[i] = fc[i] * WGK[7];
        gauss[i] = fc[i] * WG[3];
    }
    magnitude += WGK[7] * max_norm(&fc);

    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        for i in 0..N {
            let s = f1[i] + f2[i];
            kron[i] += s * wk;
            if j % 2 == 1 {
                gauss[i] += s * WG[j / 2];
            }
        }
        magnitude += wk * (max_norm(&f1) + max_norm(&f2));
    }

    let mut err = 0.0f64;
    for i in 0..N {
        kron[i] *= half;
        gauss[i] *= half;
        err = err.max((kron[i] - gauss[i]).norm());
    }
    Estimate {
        value: kron,
        error: err,
        magnitude: magnitude * half.abs(),
        evaluations: 15,
    }
}

/// Integrate `f` over `[a, b]` with the given interior breakpoints.
///
/// Convergence is declared when the summed error estimate falls below
/// `max(absolute, relative * |I|, 50 eps * int |f|)`; the last term is the
/// roundoff floor for integrals that cancel heavily.
pub fn integrate<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: &Tolerance,
) -> Result<Estimate<N>>
where
    F: FnMut(f64) -> [Complex64; N],
{
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breakpoints.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut total = Estimate::<N>::zero();
    for w in cuts.windows(2) {
        let est = gauss_kronrod(&mut f, w[0], w[1]);
        total.accumulate(&est);
        heap.push(Segment {
            a: w[0],
            b: w[1],
            est,
        });
    }

    loop {
        let target = tol
            .absolute
            .max(tol.relative * total.norm())
            .max(50.0 * f64::EPSILON * total.magnitude);
        if total.error <= target {
            // Running updates drift at the roundoff level; re-sum exactly.
            let mut exact = Estimate::<N>::zero();
            for seg in heap.iter() {
                exact.accumulate(&seg.est);
            }
            exact.evaluations = total.evaluations;
            return Ok(exact);
        }
        if total.evaluations + 30 > tol.max_evaluations {
            return Err(Error::NumericalFailure {
                error_estimate: total.error,
                value_scale: total.norm(),
                evaluations: total.evaluations,
            });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            return Err(Error::NumericalFailure {
                error_estimate: total.error,
                value_scale: total.norm(),
                evaluations: total.evaluations,
            });
        }
        let left = gauss_kronrod(&mut f, worst.a, mid);
        let right = gauss_kronrod(&mut f, mid, worst.b);

        for i in 0..N {
            total.value[i] += left.value[i] + right.value[i] - worst.est.value[i];
        }
        total.error += left.error + right.error - worst.est.error;
        total.magnitude += left.magnitude + right.magnitude - worst.est.magnitude;
        total.evaluations += 30;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            est: right,
        });
    }
}
