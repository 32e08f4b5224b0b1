//! Special functions: Gamma, the Gauss hypergeometric function and the
//! Hurwitz zeta function.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function (Lanczos, g = 7), with the reflection formula below 1/2.
///
/// Poles at non-positive integers return `f64::NAN`.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

pub fn beta(a: f64, b: f64) -> f64 {
    gamma(a) * gamma(b) / gamma(a + b)
}

/// Result of a truncated Gauss series evaluation.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: f64,
    pub terms: usize,
    pub converged: bool,
}

/// Plain Gauss series `sum (a)_k (b)_k / ((c)_k k!) z^k`, stopped once
/// `|term| < tol` or after `max_terms` terms.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64, tol: f64, max_terms: usize) -> SeriesValue {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..max_terms {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.abs() < tol {
            return SeriesValue { value: sum, terms: k + 2, converged: true };
        }
    }
    SeriesValue { value: sum, terms: max_terms + 1, converged: false }
}

/// Gauss hypergeometric function `2F1(a, b; c; z)` for `0 <= z < 1`.
///
/// Uses the series directly for `z <= 1/2`; closer to 1 it uses the
/// `z -> 1 - z` connection formula, which needs `c - a - b` non-integer.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> f64 {
    assert!((0.0..1.0).contains(&z), "hyp2f1 implemented for 0 <= z < 1, got {z}");
    hyp2f1_split(a, b, c, z, 1.0 - z)
}

/// Same as [`hyp2f1`] but takes `w = 1 - z`, for arguments so close to 1
/// that forming `1 - z` would cancel.
pub fn hyp2f1_complement(a: f64, b: f64, c: f64, w: f64) -> f64 {
    assert!(w > 0.0 && w <= 1.0, "hyp2f1_complement needs 0 < w <= 1, got {w}");
    hyp2f1_split(a, b, c, 1.0 - w, w)
}

fn hyp2f1_split(a: f64, b: f64, c: f64, z: f64, w: f64) -> f64 {
    let s = c - a - b;
    if z <= 0.5 || (s - s.round()).abs() < 1e-8 {
        return hyp2f1_series(a, b, c, z, 1e-17, 100_000).value;
    }
    let f1 = hyp2f1_series(a, b, 1.0 - s, w, 1e-17, 10_000).value;
    let f2 = hyp2f1_series(c - a, c - b, 1.0 + s, w, 1e-17, 10_000).value;
    let g_c = gamma(c);
    g_c * gamma(s) / (gamma(c - a) * gamma(c - b)) * f1
        + w.powf(s) * g_c * gamma(-s) / (gamma(a) * gamma(b)) * f2
}

const BERNOULLI_2K: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Hurwitz zeta `sum_{k >= 0} (q + k)^{-s}` for `s > 1`, `q > 0`, by
/// Euler-Maclaurin summation.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(s > 1.0 && q > 0.0, "hurwitz_zeta needs s > 1, q > 0");
    const N: usize = 12;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + N as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // B_{2j}/(2j)! * s (s+1) ... (s+2j-2) a^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut apow = a.powf(-s - 1.0);
    for (j, b) in BERNOULLI_2K.iter().enumerate() {
        let term = b / fact * rising * apow;
        sum += term;
        let j2 = 2.0 * (j as f64 + 1.0);
        rising *= (s + j2 - 1.0) * (s + j2);
        fact *= (j2 + 1.0) * (j2 + 2.0);
        apow /= a * a;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(1.5) - 0.5 * PI.sqrt()).abs() < 1e-14);
        // Gamma(-1/2) = -2 sqrt(pi)
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!(gamma(-2.0).is_nan());
    }

    #[test]
    fn series_matches_binomial_when_b_equals_c() {
        // 2F1(a, b; b; z) = (1 - z)^{-a}
        let v = hyp2f1_series(1.25, 0.75, 0.75, 0.3, 1e-16, 500);
        assert!(v.converged);
        assert!((v.value - 0.7_f64.powf(-1.25)).abs() < 1e-13);
    }

    #[test]
    fn connection_formula_agrees_with_series_near_half() {
        let (a, b, c) = (0.75, 1.25, 1.75);
        for &z in &[0.45, 0.55, 0.6] {
            let direct = hyp2f1_series(a, b, c, z, 1e-18, 100_000).value;
            let w = 1.0 - z;
            let s = c - a - b;
            let g = gamma(c);
            let conn = g * gamma(s) / (gamma(c - a) * gamma(c - b)) * hyp2f1_series(a, b, 1.0 - s, w, 1e-18, 10_000).value
                + w.powf(s) * g * gamma(-s) / (gamma(a) * gamma(b))
                    * hyp2f1_series(c - a, c - b, 1.0 + s, w, 1e-18, 10_000).value;
            assert!((direct - conn).abs() < 1e-12 * direct.abs(), "z={z}: {direct} vs {conn}");
        }
    }

    #[test]
    fn hurwitz_zeta_special_values() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(1.5, 1.0) - 2.612_375_348_685_488).abs() < 1e-13);
        // zeta(s, 1/2) = (2^s - 1) zeta(s)
        let z = hurwitz_zeta(1.5, 1.0);
        assert!((hurwitz_zeta(1.5, 0.5) - (2f64.powf(1.5) - 1.0) * z).abs() < 1e-12);
        // Recurrence zeta(s, q) = q^{-s} + zeta(s, q + 1)
        let q = 0.137;
        assert!((hurwitz_zeta(1.25, q) - q.powf(-1.25) - hurwitz_zeta(1.25, q + 1.0)).abs() < 1e-12);
    }
}
