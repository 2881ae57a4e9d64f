//! Adaptive Gauss-Kronrod (7/15) quadrature.

use crate::summation::CompensatedSum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod estimate on `[a, b]` with its embedded 7-point Gauss
/// difference as an error estimate.
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// The 15 Kronrod nodes on `[-1, 1]`, ascending, with their weights.
pub fn kronrod_rule() -> ([f64; 15], [f64; 15]) {
    let mut x = [0.0; 15];
    let mut w = [0.0; 15];
    for j in 0..7 {
        x[j] = -XGK[j];
        w[j] = WGK[j];
        x[14 - j] = XGK[j];
        w[14 - j] = WGK[j];
    }
    w[7] = WGK[7];
    (x, w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Adaptive bisection until each panel meets `max(abs_tol, rel_tol*|I|)`
/// scaled by its width share, or `max_depth` levels are used.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_depth: u32,
) -> Quadrature {
    let (whole, err) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let target = abs_tol.max(rel_tol * whole.abs());
    let mut total = CompensatedSum::new();
    let mut error = 0.0;
    let mut converged = true;
    // explicit stack keeps panel order deterministic (left to right)
    let mut stack = vec![(a, b, whole, err, 0u32)];
    while let Some((lo, hi, v, e, depth)) = stack.pop() {
        let share = target * (hi - lo) / (b - a);
        if e <= share || depth >= max_depth || hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
            if e > share {
                converged = false;
            }
            total.add(v);
            error += e;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (vl, el) = gk15(&mut f, lo, mid);
        let (vr, er) = gk15(&mut f, mid, hi);
        evaluations += 30;
        stack.push((mid, hi, vr, er, depth + 1));
        stack.push((lo, mid, vl, el, depth + 1));
    }
    Quadrature {
        value: total.value(),
        error,
        evaluations,
        converged,
    }
}

/// Three-point Gauss-Legendre rule on `[a, b]`, exact for quintics.
pub fn gauss3<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let x = h * (0.6f64).sqrt();
    h * (5.0 * f(c - x) + 8.0 * f(c) + 5.0 * f(c + x)) / 9.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let (v, _) = gk15(&mut |x: f64| x.powi(10), 0.0, 1.0);
        assert!((v - 1.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_oscillatory() {
        let q = integrate(|x: f64| (50.0 * x).sin(), 0.0, std::f64::consts::PI, 1e-13, 1e-13, 30);
        assert!(q.converged);
        assert!(q.value.abs() < 1e-12);
        let q = integrate(|x: f64| 1.0 / (1.0 + x * x), 0.0, 100.0, 1e-14, 1e-14, 40);
        assert!((q.value - 100f64.atan()).abs() < 1e-12);
    }

    #[test]
    fn gauss3_quintic() {
        let v = gauss3(|x| x.powi(5) - x * x, 0.0, 2.0);
        assert!((v - (64.0 / 6.0 - 8.0 / 3.0)).abs() < 1e-13);
    }
}
