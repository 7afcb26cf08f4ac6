//! Decay-curve regression, threshold estimation, and distance targeting.
//!
//! Sub-threshold logical error rates follow P(d) = alpha * exp(-beta * d);
//! the fit is ordinary least squares on (d, ln P) with heteroskedasticity-
//! robust (sandwich) standard errors. Thresholds come from fitting each
//! distance's failure curve with the CDF of a re-scaled and shifted beta
//! distribution and intersecting successive distances.

use crate::engine::LogicalErrorEstimate;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct DecayFit {
    pub alpha: f64,
    pub beta: f64,
    pub stderr_alpha: f64,
    pub stderr_beta: f64,
    /// (d, ln rate, fitted ln rate) for the points used
    pub residuals: Vec<(u32, f64, f64)>,
    /// distances dropped because they had zero failures, with their
    /// rule-of-three upper bound on the rate
    pub zero_failure_bounds: Vec<(u32, f64)>,
}

#[derive(Clone, Debug)]
pub struct ThresholdEstimate {
    pub p_th: f64,
    pub error: f64,
    /// successive-pair crossings as ((d_low, d_high), p)
    pub crossings: Vec<((u32, u32), f64)>,
    /// per-distance fitted curve parameters (a, b, s1, s2)
    pub fits: Vec<(u32, [f64; 4])>,
}

pub fn fit_decay(points: &[(u32, LogicalErrorEstimate)]) -> Result<DecayFit, String> {
    let mut used: Vec<(f64, f64)> = Vec::new();
    let mut dropped = Vec::new();
    let mut kept_d = Vec::new();
    for &(d, est) in points {
        if est.rate > 0.0 {
            used.push((d as f64, est.rate.ln()));
            kept_d.push(d);
        } else {
            // rule of three: with zero failures in n trials, rate < 3/n at 95%
            let n = if est.stderr > 0.0 { 1.0 / est.stderr.powi(2) } else { f64::INFINITY };
            dropped.push((d, 3.0 / n));
        }
    }
    let distinct: std::collections::BTreeSet<u64> =
        used.iter().map(|&(x, _)| x.to_bits()).collect();
    if distinct.len() < 3 {
        return Err(format!("need at least 3 distinct distances with failures, have {}", distinct.len()));
    }
    let n = used.len() as f64;
    let sx: f64 = used.iter().map(|p| p.0).sum();
    let sy: f64 = used.iter().map(|p| p.1).sum();
    let sxx: f64 = used.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = used.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;

    // HC0 sandwich variance for (intercept, slope)
    let (mut v00, mut v01, mut v11) = (0.0, 0.0, 0.0);
    for &(x, y) in &used {
        let e2 = (y - intercept - slope * x).powi(2);
        v00 += e2;
        v01 += e2 * x;
        v11 += e2 * x * x;
    }
    // (X'X)^{-1} = [[sxx, -sx], [-sx, n]] / det
    let var_intercept = (sxx * sxx * v00 - 2.0 * sxx * sx * v01 + sx * sx * v11) / (det * det);
    let var_slope = (sx * sx * v00 - 2.0 * n * sx * v01 + n * n * v11) / (det * det);

    let alpha = intercept.exp();
    let residuals = kept_d
        .iter()
        .zip(&used)
        .map(|(&d, &(x, y))| (d, y, intercept + slope * x))
        .collect();
    Ok(DecayFit {
        alpha,
        beta: -slope,
        stderr_alpha: alpha * var_intercept.max(0.0).sqrt(),
        stderr_beta: var_slope.max(0.0).sqrt(),
        residuals,
        zero_failure_bounds: dropped,
    })
}

pub fn required_distance(fit: &DecayFit, target: f64) -> (u32, bool) {
    if target >= fit.alpha {
        return (2, true);
    }
    let d = ((fit.alpha / target).ln() / fit.beta).ceil();
    (d.max(2.0) as u32, false)
}

// --- regularized incomplete beta (continued fraction, Lentz) ---------------

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation
    const G: [f64; 7] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
        2.5066282746310005,
    ];
    let mut ser = 1.000000000190015;
    let mut y = x;
    for g in &G[..6] {
        y += 1.0;
        ser += g / y;
    }
    let tmp = x + 5.5;
    (x + 0.5) * tmp.ln() - tmp + (G[6] * ser / x).ln()
}

fn betacf(a: f64, b: f64, x: f64) -> f64 {
    let (mut c, mut d) = (1.0, 1.0 - (a + b) * x / (a + 1.0));
    if d.abs() < 1e-300 {
        d = 1e-300;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..200 {
        let m = m as f64;
        let aa = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        d = 1.0 + aa * d;
        if d.abs() < 1e-300 {
            d = 1e-300;
        }
        c = 1.0 + aa / c;
        if c.abs() < 1e-300 {
            c = 1e-300;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
        d = 1.0 + aa * d;
        if d.abs() < 1e-300 {
            d = 1e-300;
        }
        c = 1.0 + aa / c;
        if c.abs() < 1e-300 {
            c = 1e-300;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-12 {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b).
pub fn beta_cdf(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * betacf(a, b, x) / a
    } else {
        1.0 - front * betacf(b, a, 1.0 - x) / b
    }
}

/// Failure-curve model: beta CDF re-scaled to the interval [a, b].
fn curve(p: f64, q: &[f64; 4]) -> f64 {
    let [a, ln_w, ln_s1, ln_s2] = *q;
    let w = ln_w.exp();
    let x = ((p - a) / w).clamp(0.0, 1.0);
    beta_cdf(x, ln_s1.exp(), ln_s2.exp())
}

fn sse(pts: &[(f64, LogicalErrorEstimate)], q: &[f64; 4]) -> f64 {
    pts.iter()
        .map(|&(p, est)| {
            let sigma = est.stderr.max(1e-6);
            ((curve(p, q) - est.rate) / sigma).powi(2)
        })
        .sum()
}

/// Nelder-Mead minimization; returns the best vertex.
fn nelder_mead(f: impl Fn(&[f64; 4]) -> f64, start: [f64; 4], scale: f64, iters: usize) -> [f64; 4] {
    let n = 4;
    let mut simplex: Vec<([f64; 4], f64)> = Vec::with_capacity(n + 1);
    simplex.push((start, f(&start)));
    for i in 0..n {
        let mut v = start;
        v[i] += scale;
        simplex.push((v, f(&v)));
    }
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let worst = simplex[n].0;
        let mut centroid = [0.0; 4];
        for (v, _) in &simplex[..n] {
            for i in 0..4 {
                centroid[i] += v[i] / n as f64;
            }
        }
        let mut refl = [0.0; 4];
        for i in 0..4 {
            refl[i] = centroid[i] + (centroid[i] - worst[i]);
        }
        let fr = f(&refl);
        if fr < simplex[0].1 {
            let mut exp = [0.0; 4];
            for i in 0..4 {
                exp[i] = centroid[i] + 2.0 * (centroid[i] - worst[i]);
            }
            let fe = f(&exp);
            simplex[n] = if fe < fr { (exp, fe) } else { (refl, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (refl, fr);
        } else {
            let mut con = [0.0; 4];
            for i in 0..4 {
                con[i] = centroid[i] + 0.5 * (worst[i] - centroid[i]);
            }
            let fc = f(&con);
            if fc < simplex[n].1 {
                simplex[n] = (con, fc);
            } else {
                let best = simplex[0].0;
                for item in simplex.iter_mut().skip(1) {
                    for i in 0..4 {
                        item.0[i] = best[i] + 0.5 * (item.0[i] - best[i]);
                    }
                    item.1 = f(&item.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    simplex[0].0
}

fn fit_curve(pts: &[(f64, LogicalErrorEstimate)]) -> [f64; 4] {
    let pmin = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let pmax = pts.iter().map(|p| p.0).fold(0.0f64, f64::max);
    let start = [pmin - 0.5 * (pmax - pmin), ((pmax - pmin) * 3.0).ln(), 1.0f64.ln(), 1.0f64.ln()];
    let q = nelder_mead(|q| sse(pts, q), start, 0.3, 400);
    nelder_mead(|q| sse(pts, q), q, 0.05, 400)
}

pub fn estimate_threshold(
    curves: &BTreeMap<u32, Vec<(f64, LogicalErrorEstimate)>>,
) -> Result<ThresholdEstimate, String> {
    if curves.len() < 3 {
        return Err(format!("need at least 3 distances, have {}", curves.len()));
    }
    let mut fits = Vec::new();
    for (&d, pts) in curves {
        if pts.len() < 5 {
            return Err(format!("distance {d} has only {} rate points", pts.len()));
        }
        fits.push((d, fit_curve(pts)));
    }
    let pmin = curves
        .values()
        .flat_map(|v| v.iter().map(|p| p.0))
        .fold(f64::INFINITY, f64::min);
    let pmax = curves
        .values()
        .flat_map(|v| v.iter().map(|p| p.0))
        .fold(0.0f64, f64::max);

    let mut crossings: Vec<((u32, u32), f64)> = Vec::new();
    for w in fits.windows(2) {
        let ((d1, q1), (d2, q2)) = (w[0], w[1]);
        // scan for a sign change of the curve difference, then bisect
        let g = |p: f64| curve(p, &q1) - curve(p, &q2);
        let steps = 400;
        let mut bracket = None;
        let mut prev = g(pmin);
        for i in 1..=steps {
            let p = pmin + (pmax - pmin) * i as f64 / steps as f64;
            let cur = g(p);
            if prev == 0.0 || prev.signum() != cur.signum() {
                bracket = Some((pmin + (pmax - pmin) * (i - 1) as f64 / steps as f64, p));
                break;
            }
            prev = cur;
        }
        let Some((mut lo, mut hi)) = bracket else { continue };
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if g(lo).signum() == g(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        crossings.push(((d1, d2), 0.5 * (lo + hi)));
    }
    if crossings.is_empty() {
        return Err("no crossing bracketed by the sampled rates".into());
    }
    let p_th = crossings.last().unwrap().1;
    let spread = crossings
        .iter()
        .map(|&(_, p)| (p - p_th).abs())
        .fold(0.0f64, f64::max);
    // statistical floor from the flattest curve near the crossing
    let mut stat = 0.0f64;
    for (d, q) in &fits {
        let dp = 1e-4;
        let slope = ((curve(p_th + dp, q) - curve(p_th - dp, q)) / (2.0 * dp)).abs();
        let sigma = curves[d]
            .iter()
            .min_by(|a, b| (a.0 - p_th).abs().partial_cmp(&(b.0 - p_th).abs()).unwrap())
            .map(|p| p.1.stderr)
            .unwrap_or(0.0);
        if slope > 1e-9 {
            stat = stat.max(sigma / slope);
        }
    }
    Ok(ThresholdEstimate { p_th, error: spread.max(stat), crossings, fits })
}
