//! Subentropy as a divided difference.
//!
//! For a spectrum `λ_1..λ_d`,
//! `Q = -Σ_k Π_{l≠k} λ_k / (λ_k - λ_l) · λ_k log2 λ_k`, which is the negated
//! order-`d-1` divided difference of `f(x) = x^d log2 x` over the spectrum.
//! Zero eigenvalues factor out of `x^d` (`(x g)[0, x_1..] = g[x_1..]`), so
//! only the `r` nonzero eigenvalues enter, with `f(x) = x^r ln x`.
//!
//! Small supports go through a Newton table. Coincident eigenvalues use the
//! confluent limit with analytic derivatives, and clusters that are close but
//! not equal are expanded in a Taylor series about their mean. Larger
//! supports use the integral form of the same divided difference, which has
//! no cancellation at all.

use std::f64::consts::LN_2;
use std::sync::OnceLock;

/// Eigenvalues closer than this are treated as equal.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Relative spread below which a node range is expanded about its mean.
const CLUSTER_REL: f64 = 1e-3;
const MAX_TAYLOR_TERMS: usize = 24;
/// Largest support handled by the Newton table; beyond it the table's
/// cancellation exceeds `1e-10` on generic spectra.
const NEWTON_MAX_SUPPORT: usize = 4;

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// `f^(k)(c) / k!` for `f(x) = x^n ln x`, `c > 0`.
fn taylor_coefficient(n: usize, k: usize, c: f64) -> f64 {
    if k <= n {
        binomial(n, k) * c.powi((n - k) as i32) * (c.ln() + harmonic(n) - harmonic(n - k))
    } else {
        let sign = if (k - n - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * c.powi(n as i32 - k as i32) / (k as f64 * binomial(k - 1, n))
    }
}

/// Divided difference `f[x_0..x_m]` of `x^n ln x` for nodes clustered about
/// their mean `c`: `Σ_j f^(m+j)(c)/(m+j)! · h_j(x - c)`, with `h_j` the
/// complete homogeneous symmetric polynomials.
fn clustered_difference(n: usize, nodes: &[f64]) -> f64 {
    let m = nodes.len() - 1;
    let c = nodes.iter().sum::<f64>() / nodes.len() as f64;
    let mut h = [0.0; MAX_TAYLOR_TERMS];
    h[0] = 1.0;
    for &x in nodes {
        let y = x - c;
        for j in 1..MAX_TAYLOR_TERMS {
            h[j] += y * h[j - 1];
        }
    }
    let mut sum = 0.0;
    for (j, hj) in h.iter().enumerate() {
        if j > 0 && *hj == 0.0 {
            break;
        }
        let term = taylor_coefficient(n, m + j, c) * hj;
        sum += term;
        if j > 0 && term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Divided difference of `x^n ln x` over ascending positive nodes, where
/// `n` is the node count.
fn divided_difference(nodes: &[f64]) -> f64 {
    let n = nodes.len();
    // table[i] holds f[x_i .. x_{i+width}] for the current width.
    let mut table: Vec<f64> = nodes.iter().map(|&x| x.powi(n as i32) * x.ln()).collect();
    for width in 1..n {
        for i in 0..n - width {
            let j = i + width;
            let (lo, hi) = (nodes[i], nodes[j]);
            table[i] = if hi - lo <= CLUSTER_REL * lo {
                clustered_difference(n, &nodes[i..=j])
            } else {
                (table[i + 1] - table[i]) / (hi - lo)
            };
        }
    }
    table[0]
}

/// Sorts ascending, drops eigenvalues within tolerance of zero and snaps
/// each run of values within tolerance of each other to the run mean.
fn grouped_support(spectrum: &[f64]) -> Vec<f64> {
    let mut vals: Vec<f64> = spectrum.iter().copied().filter(|&x| x > DEGENERACY_TOL).collect();
    vals.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(vals.len());
    let mut start = 0;
    while start < vals.len() {
        let mut end = start + 1;
        while end < vals.len() && vals[end] - vals[start] <= DEGENERACY_TOL {
            end += 1;
        }
        let mean = vals[start..end].iter().sum::<f64>() / (end - start) as f64;
        out.extend(std::iter::repeat_n(mean, end - start));
        start = end;
    }
    out
}

fn difference(nodes: &[f64]) -> f64 {
    if nodes.len() <= NEWTON_MAX_SUPPORT {
        divided_difference(nodes)
    } else {
        integral_difference(nodes)
    }
}

/// Subentropy (bits) of a spectrum.
pub fn subentropy_of_spectrum(spectrum: &[f64]) -> f64 {
    let support = grouped_support(spectrum);
    if support.len() <= 1 {
        return support.first().map_or(0.0, |&x| -x * x.log2()).max(0.0);
    }
    (-difference(&support) / LN_2).max(0.0)
}

/// Cross-check path: every degenerate group is split into equally spaced
/// nodes with spacing `h` and `h/2`, and the two results are
/// Richardson-extrapolated to `h -> 0`.
pub fn subentropy_split_richardson(spectrum: &[f64], h: f64) -> f64 {
    let support = grouped_support(spectrum);
    if support.len() <= 1 {
        return subentropy_of_spectrum(spectrum);
    }
    let split = |step: f64| -> f64 {
        let mut nodes = support.clone();
        let mut start = 0;
        while start < nodes.len() {
            let mut end = start + 1;
            while end < nodes.len() && nodes[end] == nodes[start] {
                end += 1;
            }
            let mult = end - start;
            for (k, node) in nodes[start..end].iter_mut().enumerate() {
                *node += step * (k as f64 - (mult - 1) as f64 / 2.0);
            }
            start = end;
        }
        -difference(&nodes) / LN_2
    };
    let coarse = split(h);
    let fine = split(h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Integral form of the same divided difference, for supports where the
/// Newton table loses digits: `f[λ] = ∫_0^∞ (s/(1+t) - 1 + Π_k t/(t+λ_k)) dt`
/// with `s = Σ λ`, from `ln x = ∫ (1/(1+t) - 1/(x+t)) dt`.
/// Gauss-Legendre on doubling panels up to `T`, plus the `O(1/t^2)` tail.
fn integral_difference(spectrum: &[f64]) -> f64 {
    let s: f64 = spectrum.iter().sum();
    let h2: f64 = (0..spectrum.len())
        .flat_map(|i| (i..spectrum.len()).map(move |j| (i, j)))
        .map(|(i, j)| spectrum[i] * spectrum[j])
        .sum();
    let g = |t: f64| -> f64 {
        // Π t/(t+λ) - 1 via expm1/ln_1p to keep digits at large t.
        let log_prod: f64 = spectrum.iter().map(|&l| (-l / (t + l)).ln_1p()).sum();
        s / (1.0 + t) + log_prod.exp_m1()
    };
    let (xs, ws) = GAUSS_LEGENDRE_20.get_or_init(|| gauss_legendre(20));
    let mut edges = vec![0.0];
    let mut e = 1e-3 * spectrum.iter().copied().fold(1.0, f64::min);
    while e < 1e7 {
        edges.push(e);
        e *= 2.0;
    }
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        for (x, wt) in xs.iter().zip(ws) {
            total += half * wt * g(mid + half * x);
        }
    }
    let t_max = *edges.last().unwrap();
    total += (h2 - s) / t_max;
    total
}

static GAUSS_LEGENDRE_20: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..60 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            x -= p1 / dp;
        }
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}
