//! Rényi-DP accountant for the Poisson-subsampled Gaussian mechanism.
//!
//! At integer order `a` the mechanism's RDP is `ln(A_a) / (a - 1)` with
//!
//! ```text
//! A_a = sum_{k=0..a} C(a,k) (1-q)^(a-k) q^k exp((k^2 - k) / (2 sigma^2))
//! ```
//!
//! Since the binomial weights sum to one and the k = 0, 1 exponents vanish,
//! `A_a - 1` is a sum of non-negative terms over k >= 2. Summing that in log
//! space and finishing with `ln_1p` keeps full relative precision when the
//! RDP is tiny (small q) as well as when it is huge.
//!
//! Conversion to (epsilon, delta): `eps = min_a [T * rdp(a) + ln(1/delta) / (a - 1)]`.

use super::{PrivacyError, PrivacySpend, Result};

/// Failure probability used by every experiment.
pub const DEFAULT_DELTA: f64 = 1e-5;

/// Search interval for [`noise_for_target_epsilon`].
pub const SIGMA_BOUNDS: (f64, f64) = (0.3, 100.0);

/// Integer orders 2..=256 plus a sparse tail up to 1024.
///
/// Budgets around epsilon = 0.1 at delta = 1e-5 are optimized near order
/// 230; the tail keeps even smaller budgets representable.
pub fn default_orders() -> Vec<u32> {
    (2..=256).chain([320, 384, 512, 768, 1024]).collect()
}

/// `ln(e^x - 1)` for `x > 0`.
fn ln_expm1(x: f64) -> f64 {
    if x > 40.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

fn rdp_at_order(q: f64, sigma: f64, order: u32) -> f64 {
    let a = f64::from(order);
    if q == 1.0 {
        return a / (2.0 * sigma * sigma);
    }
    let ln_q = q.ln();
    let ln_1mq = (-q).ln_1p();
    let mut ln_binom = 0.0; // ln C(a, 0)
    let mut terms = Vec::with_capacity(order as usize);
    for k in 1..=order {
        let kf = f64::from(k);
        ln_binom += (a - kf + 1.0).ln() - kf.ln();
        if k < 2 {
            continue;
        }
        let x = (kf * kf - kf) / (2.0 * sigma * sigma);
        terms.push(ln_binom + (a - kf) * ln_1mq + kf * ln_q + ln_expm1(x));
    }
    let ln_s = log_sum_exp(&terms);
    let ln_a = if ln_s < 30.0 {
        ln_s.exp().ln_1p()
    } else {
        ln_s + (-ln_s).exp().ln_1p()
    };
    ln_a / (a - 1.0)
}

/// Per-step RDP of the subsampled Gaussian at each order.
pub fn rdp_subsampled_gaussian(q: f64, sigma: f64, orders: &[u32]) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&q) {
        return Err(PrivacyError::SamplingRate(q));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(PrivacyError::NoiseMultiplier(sigma));
    }
    if let Some(&bad) = orders.iter().find(|&&a| a < 2) {
        return Err(PrivacyError::Order(bad));
    }
    if q == 0.0 {
        return Ok(vec![0.0; orders.len()]);
    }
    if sigma == 0.0 {
        return Err(PrivacyError::NonPrivate);
    }
    Ok(orders.iter().map(|&a| rdp_at_order(q, sigma, a)).collect())
}

/// Smallest epsilon over the orders after `steps` compositions.
pub fn epsilon_from_rdp(rdp: &[f64], orders: &[u32], steps: u64, delta: f64) -> Result<f64> {
    if orders.is_empty() {
        return Err(PrivacyError::NoOrders);
    }
    if rdp.len() != orders.len() {
        return Err(PrivacyError::NoOrders);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(PrivacyError::Delta(delta));
    }
    if steps == 0 {
        return Ok(0.0);
    }
    let t = steps as f64;
    let log_inv_delta = -delta.ln();
    Ok(rdp
        .iter()
        .zip(orders)
        .map(|(&r, &a)| t * r + log_inv_delta / (f64::from(a) - 1.0))
        .fold(f64::INFINITY, f64::min))
}

/// Budget spent by `steps` noisy steps at noise `sigma` and rate `q`.
///
/// Zero noise yields an infinite epsilon rather than an error.
pub fn compute_spend(sigma: f64, q: f64, steps: u64, delta: f64) -> Result<PrivacySpend> {
    let orders = default_orders();
    let epsilon = match rdp_subsampled_gaussian(q, sigma, &orders) {
        Ok(rdp) => epsilon_from_rdp(&rdp, &orders, steps, delta)?,
        Err(PrivacyError::NonPrivate) if steps > 0 => f64::INFINITY,
        Err(PrivacyError::NonPrivate) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(PrivacySpend {
        epsilon,
        delta,
        steps,
        sampling_rate: q,
    })
}

/// Smallest noise multiplier in [`SIGMA_BOUNDS`] whose epsilon does not
/// exceed `target_eps`, found by bisection to within 0.1% of the target.
pub fn noise_for_target_epsilon(target_eps: f64, q: f64, steps: u64, delta: f64) -> Result<f64> {
    let (lo_bound, hi_bound) = SIGMA_BOUNDS;
    let unreachable = PrivacyError::Unreachable {
        target: target_eps,
        lo: lo_bound,
        hi: hi_bound,
    };
    if !(target_eps > 0.0) || !target_eps.is_finite() {
        return Err(unreachable);
    }
    let eps = |sigma: f64| compute_spend(sigma, q, steps, delta).map(|s| s.epsilon);
    if eps(hi_bound)? > target_eps || eps(lo_bound)? <= target_eps {
        return Err(unreachable);
    }
    let (mut lo, mut hi) = (lo_bound, hi_bound);
    for _ in 0..200 {
        let e_hi = eps(hi)?;
        if e_hi >= target_eps * (1.0 - 1e-3) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eps(mid)? <= target_eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_batch_is_plain_gaussian() {
        let r = rdp_subsampled_gaussian(1.0, 1.0, &[2]).unwrap();
        assert_eq!(r, vec![1.0]);
        let orders: Vec<u32> = (2..=64).collect();
        let r = rdp_subsampled_gaussian(1.0, 1.7, &orders).unwrap();
        for (v, a) in r.iter().zip(&orders) {
            let exact = f64::from(*a) / (2.0 * 1.7 * 1.7);
            assert!((v - exact).abs() <= 1e-12 * exact);
        }
    }

    #[test]
    fn vanishing_sampling_rate() {
        let orders: Vec<u32> = (2..=32).collect();
        assert!(rdp_subsampled_gaussian(0.0, 1.0, &orders)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        let tiny = rdp_subsampled_gaussian(1e-9, 1.0, &orders).unwrap();
        assert!(tiny.iter().all(|&v| v >= 0.0 && v < 1e-12));
    }

    #[test]
    fn zero_noise_is_non_private() {
        assert_eq!(
            rdp_subsampled_gaussian(0.1, 0.0, &[2]),
            Err(PrivacyError::NonPrivate)
        );
        assert_eq!(
            compute_spend(0.0, 0.1, 10, 1e-5).unwrap().epsilon,
            f64::INFINITY
        );
    }

    #[test]
    fn bad_inputs() {
        assert_eq!(
            rdp_subsampled_gaussian(0.1, 1.0, &[1]),
            Err(PrivacyError::Order(1))
        );
        assert!(rdp_subsampled_gaussian(1.5, 1.0, &[2]).is_err());
        assert_eq!(
            epsilon_from_rdp(&[], &[], 1, 1e-5),
            Err(PrivacyError::NoOrders)
        );
    }

    #[test]
    fn rdp_is_monotone_in_order() {
        let orders = default_orders();
        let r = rdp_subsampled_gaussian(0.01, 1.1, &orders).unwrap();
        assert!(r.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn zero_steps_spend_nothing() {
        let orders = default_orders();
        let rdp = rdp_subsampled_gaussian(0.02, 1.0, &orders).unwrap();
        assert_eq!(epsilon_from_rdp(&rdp, &orders, 0, 1e-5).unwrap(), 0.0);
    }

    #[test]
    fn bisection_round_trip() {
        let (q, steps) = (0.01, 5000);
        for target in [0.5, 1.0, 3.0] {
            let sigma = noise_for_target_epsilon(target, q, steps, 1e-5).unwrap();
            let e = compute_spend(sigma, q, steps, 1e-5).unwrap().epsilon;
            assert!(
                e <= target && e >= target * (1.0 - 1e-3),
                "target {target} got {e}"
            );
        }
        let loose = noise_for_target_epsilon(3.0, q, steps, 1e-5).unwrap();
        let tight = noise_for_target_epsilon(0.5, q, steps, 1e-5).unwrap();
        assert!(loose < tight);
    }

    #[test]
    fn unreachable_targets() {
        // even sigma = 100 cannot reach this with full-batch steps
        assert!(matches!(
            noise_for_target_epsilon(1e-4, 1.0, 10_000, 1e-5),
            Err(PrivacyError::Unreachable { .. })
        ));
    }
}
