//! Special-function helpers shared across the crate.

use statrs::function::gamma::ln_gamma;

/// ln[ C(N, n) a^n (1-a)^(N-n) ] for a in [0, 1].
///
/// The complement is taken as `1 - a` exactly, so the pmf sums to one by the
/// binomial theorem independently of how `a` was produced. For large `N` the
/// log-gamma pieces cancel catastrophically; away from the edges the
/// expression is therefore reorganized into relative-entropy form, where
/// every logarithm is taken of a ratio close to one.
pub fn ln_binomial_pmf(n_total: u64, n: u64, a: f64) -> f64 {
    debug_assert!(n <= n_total);
    debug_assert!((0.0..=1.0).contains(&a));
    let m = n_total - n;
    if a == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if a == 1.0 {
        return if m == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let b = 1.0 - a;
    if n == 0 {
        return m as f64 * b.ln();
    }
    if m == 0 {
        return n as f64 * a.ln();
    }
    if n.min(m) <= 32 || n_total <= 256 {
        return ln_binomial(n_total, n) + n as f64 * a.ln() + m as f64 * b.ln();
    }
    let nf = n as f64;
    let mf = m as f64;
    let total = n_total as f64;
    nf * (total * a / nf).ln()
        + mf * (total * b / mf).ln()
        + 0.5 * (total / (2.0 * std::f64::consts::PI * nf * mf)).ln()
        + stirling_tail(total)
        - stirling_tail(nf)
        - stirling_tail(mf)
}

/// ln C(N, n). Small `min(n, N-n)` is accumulated directly; the rest goes
/// through log-gamma.
pub fn ln_binomial(n_total: u64, n: u64) -> f64 {
    let m = n_total - n;
    let small = n.min(m);
    if small <= 32 {
        let mut acc = 0.0;
        for j in 1..=small {
            acc += ((n_total - j + 1) as f64 / j as f64).ln();
        }
        acc
    } else {
        ln_gamma(n_total as f64 + 1.0) - ln_gamma(n as f64 + 1.0) - ln_gamma(m as f64 + 1.0)
    }
}

/// Stirling-series remainder: ln Gamma(x) - [ (x-1/2) ln x - x + ln(2 pi)/2 ].
fn stirling_tail(x: f64) -> f64 {
    let x2 = x * x;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * x2)) / x2) / x2) / x
}

/// ln Gamma(x + 1) = ln(x!).
pub fn ln_factorial(x: u64) -> f64 {
    ln_gamma(x as f64 + 1.0)
}

/// ln of the Poisson pmf with the given mean.
pub fn poisson_ln_pmf(n: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    n as f64 * mean.ln() - mean - ln_factorial(n)
}

/// Nodes and weights of the `order`-point Gauss-Legendre rule on [-1, 1],
/// found by Newton iteration on the Legendre three-term recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 2);
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    for i in 0..order.div_ceil(2) {
        // Tricomi-style initial guess, then Newton
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(order, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(order, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=order {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let dp = order as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

const SI_SPLIT: f64 = 20.0;

/// Sine integral Si(x) = integral of sin(t)/t from 0 to x.
///
/// Power series below [`SI_SPLIT`], asymptotic expansion with adaptive
/// truncation above. Absolute accuracy is a few 1e-10 near the split and
/// improves away from it.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x <= SI_SPLIT {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 1u32;
        loop {
            let kf = k as f64;
            term *= -x2 * (2.0 * kf - 1.0) / ((2.0 * kf + 1.0) * (2.0 * kf + 1.0) * (2.0 * kf));
            sum += term;
            if term.abs() < 1e-17 * sum.abs() + 1e-300 {
                break sum;
            }
            k += 1;
        }
    } else {
        // Si(x) = pi/2 - cos(x) f(x) - sin(x) g(x), truncated at the smallest term.
        let inv2 = 1.0 / (x * x);
        let mut f = 0.0;
        let mut g = 0.0;
        let mut term_f = 1.0 / x;
        let mut term_g = inv2;
        let mut k = 0u32;
        loop {
            f += term_f;
            g += term_g;
            let kf = k as f64;
            let next_f = term_f * -((2.0 * kf + 1.0) * (2.0 * kf + 2.0)) * inv2;
            let next_g = term_g * -((2.0 * kf + 2.0) * (2.0 * kf + 3.0)) * inv2;
            if next_f.abs() >= term_f.abs() || next_f.abs() < 1e-18 {
                break;
            }
            term_f = next_f;
            term_g = next_g;
            k += 1;
        }
        std::f64::consts::FRAC_PI_2 - x.cos() * f - x.sin() * g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: composite Simpson quadrature of sin(t)/t.
    fn si_quadrature(x: f64) -> f64 {
        let n = ((x / 1e-3).ceil() as usize).max(64);
        let n = n + n % 2;
        let h = x / n as f64;
        let f = |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t };
        let mut sum = f(0.0) + f(x);
        for j in 1..n {
            sum += f(j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
        }
        sum * h / 3.0
    }

    #[test]
    fn sine_integral_matches_quadrature() {
        for &x in &[0.05, 0.7, 1.0, 5.0, 12.0, 19.5, 20.5, 35.0, 120.0] {
            let expect = si_quadrature(x);
            let got = sine_integral(x);
            assert!(
                (got - expect).abs() < 2e-9,
                "Si({x}): got {got}, quadrature {expect}"
            );
        }
    }

    #[test]
    fn sine_integral_limits_and_symmetry() {
        assert_eq!(sine_integral(0.0), 0.0);
        assert_eq!(sine_integral(-3.0), -sine_integral(3.0));
        // Leading asymptotic term at very large argument.
        let x = 1e6f64;
        let expect = std::f64::consts::FRAC_PI_2 - x.cos() / x - x.sin() / (x * x);
        assert!((sine_integral(x) - expect).abs() < 1e-14);
    }

    #[test]
    fn binomial_pmf_matches_direct_product_small_n() {
        for n_total in [1u64, 2, 7, 30] {
            for &a in &[0.02f64, 0.37, 0.5, 0.93] {
                for n in 0..=n_total {
                    let mut direct = 1.0f64;
                    for j in 0..n {
                        direct *= (n_total - j) as f64 / (j + 1) as f64;
                    }
                    direct *= a.powi(n as i32) * (1.0 - a).powi((n_total - n) as i32);
                    let got = ln_binomial_pmf(n_total, n, a).exp();
                    assert!(
                        (got - direct).abs() <= 1e-13 * direct.max(1e-30),
                        "N={n_total} n={n} a={a}: {got} vs {direct}"
                    );
                }
            }
        }
    }

    #[test]
    fn binomial_pmf_sums_to_one_at_large_n() {
        for &(n_total, a) in &[(10_000u64, 0.5f64), (10_000, 0.037), (100_000, 0.21)] {
            let mut sum = 0.0;
            let mut comp = 0.0; // Kahan compensation
            for n in 0..=n_total {
                let term = ln_binomial_pmf(n_total, n, a).exp();
                let y = term - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            assert!(
                (sum - 1.0).abs() < 5e-13,
                "N={n_total} a={a}: sum deviates by {:.3e}",
                sum - 1.0
            );
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_and_exp() {
        let (nodes, weights) = gauss_legendre(16);
        // exact for degree <= 31
        let quad = |f: &dyn Fn(f64) -> f64| -> f64 {
            nodes.iter().zip(&weights).map(|(&x, &w)| w * f(x)).sum()
        };
        assert!((quad(&|x| x.powi(8)) - 2.0 / 9.0).abs() < 1e-15);
        assert!((quad(&|x| x.powi(31))).abs() < 1e-15);
        let expect = std::f64::consts::E - 1.0 / std::f64::consts::E;
        assert!((quad(&|x| x.exp()) - expect).abs() < 1e-14);
        let total: f64 = weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn poisson_pmf_normalizes() {
        let mean = 400.0;
        let sum: f64 = (0..2000).map(|n| poisson_ln_pmf(n, mean).exp()).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }
}
