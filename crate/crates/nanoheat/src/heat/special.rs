//! Error function and adaptive quadrature helpers.
//!
//! `erf`/`erfc` follow the classic FreeBSD `s_erf.c` rational approximations
//! (relative error below 1e-15 over the whole range), which is the standard
//! route when a libm-quality implementation is needed without an external
//! dependency.

/// erf(x), double precision.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    if ax < 0.84375 {
        if ax < 3.7252902984e-09 {
            return x + EFX * x;
        }
        let z = x * x;
        let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
        let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
        return x + x * (r / s);
    }
    if ax < 1.25 {
        let s = ax - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        let v = ERX + p / q;
        return if x >= 0.0 { v } else { -v };
    }
    if ax >= 6.0 {
        return if x > 0.0 { 1.0 } else { -1.0 };
    }
    let v = 1.0 - erfc_tail(ax);
    if x >= 0.0 {
        v
    } else {
        -v
    }
}

/// erfc(x) = 1 - erf(x), accurate for large positive x.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    if ax < 0.84375 {
        return 1.0 - erf(x);
    }
    if ax < 1.25 {
        let s = ax - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if x >= 0.0 { 1.0 - ERX - p / q } else { 1.0 + ERX + p / q };
    }
    if x >= 28.0 {
        return 0.0;
    }
    if x <= -6.0 {
        return 2.0;
    }
    if x > 0.0 {
        erfc_tail(ax)
    } else {
        2.0 - erfc_tail(ax)
    }
}

// erfc on [1.25, 28): exp(-x^2 - 0.5625 + R/S) / x with split-exponent trick.
fn erfc_tail(ax: f64) -> f64 {
    let s = 1.0 / (ax * ax);
    let (r, big_s) = if ax < 2.857142857142857 {
        (
            RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
            1.0 + s * (SA1
                + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
        )
    } else {
        (
            RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
            1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
        )
    };
    // z = ax with the low 32 bits of the mantissa cleared, so that
    // exp(-z*z - 0.5625) * exp((z-ax)(z+ax) + R/S) stays fully accurate.
    let z = f64::from_bits(ax.to_bits() & 0xffff_ffff_0000_0000);
    let e = (-z * z - 0.5625).exp() * ((z - ax) * (z + ax) + r / big_s).exp();
    e / ax
}

const EFX: f64 = 1.28379167095512586316e-01;
const ERX: f64 = 8.45062911510467529297e-01;
const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;
const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;
const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;
const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

/// erf via its Maclaurin series; used only to cross-check the rational form
/// at small arguments.
pub fn erf_maclaurin(x: f64, terms: usize) -> f64 {
    let mut sum = 0.0;
    let mut term = x;
    let x2 = x * x;
    for j in 0..terms {
        sum += term / (2 * j + 1) as f64;
        term *= -x2 / (j as f64 + 1.0);
    }
    2.0 / std::f64::consts::PI.sqrt() * sum
}

/// Adaptive Simpson quadrature on [a, b] with relative tolerance.
///
/// The magnitude scale comes from a 65-sample coarse pass so narrow-support
/// integrands cannot collapse the tolerance; recursion floors at machine
/// precision relative to that scale. Deterministic evaluation order.
pub fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_depth: usize,
) -> f64 {
    // coarse magnitude estimate; 64 samples also seed 16 base panels so a
    // narrow bump cannot hide between the first bisection points
    let samples = 64usize;
    let mut coarse = 0.0f64;
    let mut fs = Vec::with_capacity(samples + 1);
    for i in 0..=samples {
        let x = a + (b - a) * i as f64 / samples as f64;
        let v = f(x);
        coarse = coarse.max(v.abs());
        fs.push(v);
    }
    if coarse == 0.0 {
        return 0.0;
    }
    let scale = coarse * (b - a);
    let floor = 1e-15 * scale;
    let panels = 16usize;
    let step = samples / panels;
    let mut total = 0.0;
    for p in 0..panels {
        let (i0, i1) = (p * step, (p + 1) * step);
        let pa = a + (b - a) * i0 as f64 / samples as f64;
        let pb = a + (b - a) * i1 as f64 / samples as f64;
        let pm = 0.5 * (pa + pb);
        let (fa, fb) = (fs[i0], fs[i1]);
        let fm = f(pm);
        let whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_rec(
            f,
            pa,
            pb,
            fa,
            fm,
            fb,
            whole,
            rel_tol * scale / panels as f64,
            floor,
            max_depth,
        );
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    floor: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol.max(floor) {
        return left + right + diff / 15.0;
    }
    let half = (0.5 * tol).max(floor);
    simpson_rec(f, a, m, fa, flm, fm, left, half, floor, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, half, floor, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn erf_reference_values() {
        // Abramowitz-Stegun / mpmath reference points.
        assert_relative_eq!(erf(0.5), 0.5204998778130465, max_relative = 1e-15);
        assert_relative_eq!(erf(1.0), 0.8427007929497149, max_relative = 1e-15);
        assert_relative_eq!(erf(2.0), 0.9953222650189527, max_relative = 1e-15);
        assert_relative_eq!(erfc(1.0), 0.15729920705028513, max_relative = 1e-14);
        assert_relative_eq!(erfc(3.0), 2.209049699858544e-5, max_relative = 1e-14);
        assert_relative_eq!(erfc(5.0), 1.5374597944280347e-12, max_relative = 1e-13);
        assert_relative_eq!(erfc(10.0), 2.088487583762545e-45, max_relative = 1e-13);
    }

    #[test]
    fn erf_odd_and_complementary() {
        for &x in &[0.1, 0.7, 1.3, 2.9, 4.2] {
            assert_relative_eq!(erf(-x), -erf(x), max_relative = 1e-15);
            assert_abs_diff_eq!(erf(x) + erfc(x), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(erfc(-x), 2.0 - erfc(x), epsilon = 1e-14);
        }
    }

    #[test]
    fn maclaurin_matches_rational_at_small_x() {
        for &x in &[0.05, 0.2, 0.5, 0.8] {
            assert_relative_eq!(erf_maclaurin(x, 30), erf(x), max_relative = 1e-14);
        }
    }

    #[test]
    fn simpson_gaussian_integral() {
        // int_0^6 2/sqrt(pi) exp(-t^2) dt = erf(6) ~= 1
        let f = |t: f64| 2.0 / std::f64::consts::PI.sqrt() * (-t * t).exp();
        let v = adaptive_simpson(&f, 0.0, 6.0, 1e-12, 40);
        assert_relative_eq!(v, erf(6.0), max_relative = 1e-10);
    }

    #[test]
    fn simpson_handles_boundary_layers() {
        // int_0^1 1/sqrt(t) dt = 2 has an endpoint singularity; integrate the
        // regularized substitute t = u^2 instead and check plain adaptive on a
        // sharp-but-smooth integrand.
        let f = |t: f64| (-100.0 * (t - 0.95).powi(2)).exp();
        let v = adaptive_simpson(&f, 0.0, 1.0, 1e-11, 48);
        let exact = (std::f64::consts::PI / 100.0).sqrt() / 2.0
            * (erf(0.95 * 10.0) - erf(-0.05 * 10.0));
        assert_relative_eq!(v, exact, max_relative = 1e-9);
    }
}
