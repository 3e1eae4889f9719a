#![allow(dead_code)]

use pfairdp::rng;
use rand::Rng;
use std::path::PathBuf;

/// Adult data directory: `$PFAIRDP_ADULT_DIR`, else `data/adult` at the
/// workspace root. `None` when neither holds `adult.data`.
pub fn adult_dir() -> Option<PathBuf> {
    let dir = std::env::var_os("PFAIRDP_ADULT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/adult"));
    dir.join("adult.data").is_file().then_some(dir)
}

/// Adult directory or a note on stderr that the test is skipped.
pub fn adult_or_skip(test: &str) -> Option<PathBuf> {
    let dir = adult_dir();
    if dir.is_none() {
        eprintln!("{test}: Adult data not found (set PFAIRDP_ADULT_DIR or run `pfairdp ingest --download`); skipping");
    }
    dir
}

/// (q, sigma, order, rdp) from `tests/oracles/rdp_mpmath.py` (80-digit binomial sums).
#[allow(clippy::excessive_precision)]
pub const RDP_ORACLE: [(f64, f64, u32, f64); 20] = [
    (0.01, 1.5, 2, 5.5960783926800929e-5),
    (0.01, 1.5, 4, 1.134103842810877e-4),
    (0.01, 1.5, 8, 2.3316833171759751e-4),
    (0.01, 1.5, 16, 4.9569786136347111e-4),
    (0.01, 1.5, 32, 2.3574932607812136),
    (0.01, 1.5, 64, 9.5439540968435416),
    (0.001, 0.8, 2, 3.7707260727711085e-6),
    (0.001, 0.8, 10, 1.6626922163075461e-1),
    (0.001, 0.8, 40, 2.4165122790787548e+1),
    (0.05, 2.0, 3, 1.0804847592794745e-3),
    (0.05, 2.0, 20, 1.0310783099370535e-2),
    (0.05, 2.0, 128, 1.298067928334747e+1),
    (0.2, 1.0, 2, 6.6472218905597274e-2),
    (0.2, 1.0, 12, 4.244322473877345),
    (0.2, 5.0, 50, 6.3035572377616236e-2),
    (0.0008, 6.0, 230, 2.0839217569921857e-6),
    (0.0008, 14.0, 256, 4.1946374931835301e-7),
    (0.5, 3.0, 7, 1.1788474618902737e-1),
    (1e-5, 1.0, 30, 3.0900771315167478),
    (0.9, 0.7, 5, 4.9703797616210815),
];

/// ln(1 - q + q e^x) without overflow.
fn ln_mix(q: f64, x: f64) -> f64 {
    if x > 30.0 {
        x + q.ln() + ((1.0 - q) / q * (-x).exp()).ln_1p()
    } else {
        (q * x.exp_m1()).ln_1p()
    }
}

/// RDP at real order `alpha` by trapezoidal quadrature of
/// E_{z ~ N(0, s^2)} [(1 - q + q exp((2z - 1) / (2 s^2)))^alpha].
pub fn rdp_by_quadrature(q: f64, sigma: f64, alpha: f64) -> f64 {
    let s2 = sigma * sigma;
    let lo = -30.0 * sigma;
    let hi = alpha + 30.0 * sigma;
    let h = 2e-3 * sigma;
    let n = ((hi - lo) / h).ceil() as usize;
    let log_norm = -0.5 * (2.0 * std::f64::consts::PI * s2).ln();
    let logs: Vec<f64> = (0..=n)
        .map(|i| {
            let z = lo + i as f64 * h;
            let w = if i == 0 || i == n { 0.5f64.ln() } else { 0.0 };
            w + log_norm - z * z / (2.0 * s2) + alpha * ln_mix(q, (2.0 * z - 1.0) / (2.0 * s2))
        })
        .collect();
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_a = m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln() + h.ln();
    log_a / (alpha - 1.0)
}

pub fn brute_force_filter(points: &[[f64; 3]]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points.iter().any(|q| {
                let ge = q.iter().zip(&points[i]).all(|(a, b)| a >= b);
                let gt = q.iter().zip(&points[i]).any(|(a, b)| a > b);
                ge && gt
            })
        })
        .collect()
}

/// Fraction of the bounding box [reference, max] covered by some point's box,
/// times the box volume.
pub fn monte_carlo_volume(
    points: &[[f64; 3]],
    reference: [f64; 3],
    samples: usize,
    seed: u64,
) -> f64 {
    let mut hi = reference;
    for p in points {
        for k in 0..3 {
            hi[k] = hi[k].max(p[k]);
        }
    }
    let volume: f64 = (0..3).map(|k| hi[k] - reference[k]).product();
    let mut r = rng::seeded(seed);
    let mut inside = 0usize;
    for _ in 0..samples {
        let s: [f64; 3] =
            std::array::from_fn(|k| reference[k] + r.random::<f64>() * (hi[k] - reference[k]));
        if points.iter().any(|p| (0..3).all(|k| s[k] <= p[k])) {
            inside += 1;
        }
    }
    volume * inside as f64 / samples as f64
}
