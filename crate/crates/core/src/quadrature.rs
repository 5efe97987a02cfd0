//! One-dimensional quadrature: adaptive Gauss–Kronrod (7/15) and composite
//! Simpson. Both are reentrant and allocate only a local interval stack.

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum of the per-interval |K15 - G7| estimates.
    pub error: f64,
    pub evaluations: usize,
    /// False when the interval budget ran out before the tolerance was met.
    pub converged: bool,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_9,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_20,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_9,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        // odd Kronrod nodes are the Gauss nodes
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Subdivides by bisection until every accepted interval satisfies
/// `err ≤ max(abs_tol, rel_tol·|I|) · width/(b-a)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Integral {
    const MAX_INTERVALS: usize = 1 << 16;
    if a == b {
        return Integral { value: 0.0, error: 0.0, evaluations: 0, converged: true };
    }
    let (whole, whole_err) = kronrod15(&f, a, b);
    let span = (b - a).abs();
    let mut evaluations = 15;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut converged = true;
    let mut processed = 0usize;
    let mut stack = vec![(a, b, whole, whole_err)];
    while let Some((lo, hi, est, err)) = stack.pop() {
        let target = abs_tol.max(rel_tol * whole.abs()) * (hi - lo).abs() / span;
        processed += 1;
        if err <= target || processed >= MAX_INTERVALS || (hi - lo).abs() < span * 1e-14 {
            if err > target {
                converged = false;
            }
            value += est;
            error += err;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (left, left_err) = kronrod15(&f, lo, mid);
        let (right, right_err) = kronrod15(&f, mid, hi);
        evaluations += 30;
        stack.push((mid, hi, right, right_err));
        stack.push((lo, mid, left, left_err));
    }
    Integral { value, error, evaluations, converged }
}

/// Composite Simpson rule with `panels` subintervals (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let m = (panels.max(2) + 1) & !1;
    let h = (b - a) / m as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..m {
        let x = a + i as f64 * h;
        if i % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}
