use pfairdp::mobo::{
    argmax_first, dominates, ehvi, ehvi_from_moments, hypervolume, log_marginal_likelihood,
    normal_draws, pareto_filter, propose_next, run_grid_search, run_mobo, run_random_search,
    score_pool, AcquisitionOptions, EvalOutcome, Gp, GpFitOptions, GpHyper, MoboSettings,
    ParetoArchive, SearchDomain, SurrogateSet, LENGTHSCALE_BOUNDS, NOISE_VAR_BOUNDS,
    SIGNAL_VAR_BOUNDS,
};
use pfairdp::pipeline::{ObjectiveTriple, PipelineConfig};
use pfairdp::rng::{self, derive_seed};
use rand::Rng;

fn matern(a: &[f64], b: &[f64], ls: &[f64], s2: f64) -> f64 {
    let r = a
        .iter()
        .zip(b)
        .zip(ls)
        .map(|((x, y), l)| ((x - y) / l).powi(2))
        .sum::<f64>()
        .sqrt();
    let t = 5f64.sqrt() * r;
    s2 * (1.0 + t + t * t / 3.0) * (-t).exp()
}

/// Gaussian elimination with partial pivoting.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

fn random_inputs(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng::seeded(seed);
    (0..n)
        .map(|_| (0..d).map(|_| r.random::<f64>()).collect())
        .collect()
}

#[test]
fn gp_posterior_matches_dense_solve() {
    let x = random_inputs(12, 3, 1);
    let y: Vec<f64> = x
        .iter()
        .map(|r| (4.0 * r[0]).sin() + r[1] - 2.0 * r[2] * r[2])
        .collect();
    let hyper = GpHyper {
        lengthscales: vec![0.3, 0.5, 0.8],
        signal_var: 1.3,
        noise_var: 1e-3,
    };
    let gp = Gp::with_hyperparameters(&x, &y, hyper.clone()).unwrap();

    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let sd = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let ys: Vec<f64> = y.iter().map(|v| (v - mean) / sd).collect();
    let k: Vec<Vec<f64>> = x
        .iter()
        .enumerate()
        .map(|(i, a)| {
            x.iter()
                .enumerate()
                .map(|(j, b)| {
                    matern(a, b, &hyper.lengthscales, hyper.signal_var)
                        + if i == j { hyper.noise_var } else { 0.0 }
                })
                .collect()
        })
        .collect();
    let alpha = dense_solve(k.clone(), ys);
    for t in random_inputs(6, 3, 2) {
        let ks: Vec<f64> = x
            .iter()
            .map(|a| matern(a, &t, &hyper.lengthscales, hyper.signal_var))
            .collect();
        let m = mean + sd * ks.iter().zip(&alpha).map(|(a, b)| a * b).sum::<f64>();
        let v = dense_solve(k.clone(), ks.clone());
        let var = sd * sd * (hyper.signal_var - ks.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>());
        let (gm, gv) = gp.predict(&t);
        assert!((gm - m).abs() < 1e-8, "mean {gm} vs {m}");
        assert!((gv - var).abs() < 1e-8, "var {gv} vs {var}");
    }
}

#[test]
fn fitted_likelihood_beats_random_hyperparameters() {
    let x = random_inputs(20, 4, 3);
    let y: Vec<f64> = x
        .iter()
        .map(|r| (3.0 * r[0]).cos() * r[1] + 0.3 * r[3])
        .collect();
    let gp = Gp::fit(&x, &y, &GpFitOptions::default()).unwrap();
    let best = log_marginal_likelihood(&x, &y, gp.hyper());
    assert!((best - gp.log_marginal_likelihood()).abs() < 1e-9);
    let mut r = rng::seeded(4);
    let log_uniform = |r: &mut rand_chacha::ChaCha8Rng, (lo, hi): (f64, f64)| {
        r.random_range(lo.ln()..hi.ln()).exp()
    };
    for _ in 0..100 {
        let h = GpHyper {
            lengthscales: (0..4)
                .map(|_| log_uniform(&mut r, LENGTHSCALE_BOUNDS))
                .collect(),
            signal_var: log_uniform(&mut r, SIGNAL_VAR_BOUNDS),
            noise_var: log_uniform(&mut r, NOISE_VAR_BOUNDS),
        };
        assert!(best >= log_marginal_likelihood(&x, &y, &h), "{h:?}");
    }
}

#[test]
fn gp_interpolates_and_reverts_to_prior() {
    let x: Vec<Vec<f64>> = (0..8)
        .map(|i| vec![i as f64 / 7.0, (i * 3 % 8) as f64 / 8.0])
        .collect();
    let y: Vec<f64> = x.iter().map(|r| (2.0 * r[0]).sin() + r[1]).collect();
    let gp = Gp::fit(&x, &y, &GpFitOptions::default()).unwrap();
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let sd2 = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    for (xi, yi) in x.iter().zip(&y) {
        let (m, v) = gp.predict(xi);
        assert!((m - yi).abs() < 1e-4, "{m} vs {yi}");
        assert!(v / sd2 <= gp.hyper().noise_var + 1e-6);
    }
    let (far, _) = gp.predict(&[500.0, -500.0]);
    assert!((far - mean).abs() < 1e-3);
}

#[test]
fn gp_is_symmetric_in_mirrored_data() {
    let x = vec![vec![0.3], vec![0.7]];
    let hyper = GpHyper {
        lengthscales: vec![0.4],
        signal_var: 1.0,
        noise_var: 1e-4,
    };
    let a = Gp::with_hyperparameters(&x, &[1.0, 3.0], hyper.clone()).unwrap();
    let b = Gp::with_hyperparameters(&x, &[3.0, 1.0], hyper).unwrap();
    let (ma, va) = a.predict(&[0.5]);
    let (mb, vb) = b.predict(&[0.5]);
    assert!((ma - 2.0).abs() < 1e-12 && (mb - 2.0).abs() < 1e-12);
    assert!((va - vb).abs() < 1e-12);
    assert!(va >= 0.0);
}

#[test]
fn gp_handles_identical_inputs() {
    let x = vec![vec![0.2, 0.2]; 5];
    let gp = Gp::fit(&x, &[1.0, 2.0, 3.0, 2.0, 1.0], &GpFitOptions::default()).unwrap();
    let (m, v) = gp.predict(&[0.2, 0.2]);
    assert!(m.is_finite() && v >= 0.0);
}

const FRONT: [[f64; 3]; 3] = [[1.0, 3.0, 2.0], [2.0, 2.0, 2.0], [3.0, 1.0, 1.0]];
const REFERENCE: [f64; 3] = [0.0; 3];

#[test]
fn ehvi_degenerate_cases() {
    let base = hypervolume(&FRONT, &REFERENCE);
    let draws = normal_draws(256, 1);
    let dominated = [1.5, 1.5, 1.5];
    assert!(FRONT.iter().any(|f| dominates(f, &dominated)));
    assert!(ehvi_from_moments(dominated, [0.0; 3], &FRONT, base, &REFERENCE, &draws).abs() < 1e-12);

    let better = [2.5, 2.5, 2.5];
    let mut with: Vec<[f64; 3]> = FRONT.to_vec();
    with.push(better);
    let gain = hypervolume(&with, &REFERENCE) - base;
    assert!(gain > 0.0);
    let got = ehvi_from_moments(better, [0.0; 3], &FRONT, base, &REFERENCE, &draws);
    assert!((got - gain).abs() < 1e-12, "{got} vs {gain}");
}

#[test]
fn ehvi_monte_carlo_converges() {
    let base = hypervolume(&FRONT, &REFERENCE);
    let mean = [2.0, 2.0, 2.2];
    let var = [0.25, 0.36, 0.16];
    let estimate = ehvi_from_moments(
        mean,
        var,
        &FRONT,
        base,
        &REFERENCE,
        &normal_draws(10_000, 5),
    );
    let oracle = ehvi_from_moments(
        mean,
        var,
        &FRONT,
        base,
        &REFERENCE,
        &normal_draws(1_000_000, 6),
    );
    assert!(oracle > 0.0);
    assert!(
        (estimate - oracle).abs() / oracle < 0.05,
        "{estimate} vs {oracle}"
    );
    assert_eq!(
        estimate,
        ehvi_from_moments(
            mean,
            var,
            &FRONT,
            base,
            &REFERENCE,
            &normal_draws(10_000, 5)
        )
    );
}

/// Cheap analytic stand-in for the pipeline with a genuine three-way trade-off.
fn toy_objectives(c: &PipelineConfig) -> ObjectiveTriple {
    let acc = 0.9 - 0.15 * c.repair_level - 0.02 * c.noise_multiplier
        + 0.01 * c.learning_rate.ln().abs().min(5.0)
        - 0.02 * (c.clipping_norm - 1.0).abs();
    let spd = 0.01 + 0.2 * (1.0 - c.repair_level) * (1.0 + 0.1 * c.clipping_norm);
    let eps = c.epochs as f64 * c.batch_size as f64 / (40.0 * c.noise_multiplier.powi(2));
    ObjectiveTriple::new(acc, spd, eps)
}

fn toy_archive(n: usize) -> (ParetoArchive, SearchDomain) {
    let domain = SearchDomain::desk();
    let mut r = rng::seeded(8);
    let mut archive = ParetoArchive::new(pfairdp::mobo::default_reference());
    for _ in 0..n {
        let c = domain.sample(&mut r, 0);
        let o = toy_objectives(&c);
        archive.push(c, o, false);
    }
    (archive, domain)
}

#[test]
fn proposal_is_the_pool_argmax() {
    let (archive, domain) = toy_archive(12);
    let surrogates = SurrogateSet::fit(&archive, &domain, &GpFitOptions::default()).unwrap();
    let opts = AcquisitionOptions {
        candidate_budget: 128,
        n_mc: 128,
        ..AcquisitionOptions::default()
    };
    let p = propose_next(&surrogates, &archive, &domain, &opts, 3, 0);
    assert_eq!(p.pool_scores.len(), p.pool.len());
    for (u, &s) in p.pool.iter().zip(&p.pool_scores) {
        let again = ehvi(&surrogates, u, &archive, opts.n_mc, derive_seed(3, 2));
        assert_eq!(again, s);
        assert!(p.ehvi >= s);
    }
    assert!(domain.contains(&p.config));

    let single = score_pool(&surrogates, &archive, &domain, vec![[0.25; 6]], 16, 1, 0);
    assert_eq!(single.unit, [0.25; 6]);
    assert_eq!(argmax_first(&[0.0, 0.0, 0.0]), Some(0));
    assert_eq!(argmax_first(&[0.1, 0.3, 0.3]), Some(1));
}

#[test]
fn random_search_distribution() {
    let domain = SearchDomain::paper();
    let mut r = rng::seeded(21);
    let n = 10_000;
    let logs: Vec<f64> = (0..n)
        .map(|_| {
            let c = domain.sample(&mut r, 0);
            assert!(domain.contains(&c));
            c.learning_rate.ln()
        })
        .collect();
    let mean = logs.iter().sum::<f64>() / n as f64;
    let sd = (logs.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let mid = 0.5 * (1e-3f64.ln() + 0.1f64.ln());
    assert!(
        (mean - mid).abs() < 3.0 * sd / (n as f64).sqrt(),
        "{mean} vs {mid}"
    );
}

fn toy_eval(c: &PipelineConfig) -> pfairdp::mobo::Result<EvalOutcome> {
    Ok(EvalOutcome::from(toy_objectives(c)))
}

#[test]
fn grid_search_layout_and_front() {
    let domain = SearchDomain::paper();
    let archive = run_grid_search(&domain, 4, 0, toy_eval).unwrap();
    assert_eq!(archive.len(), 256);
    let cfgs: Vec<&PipelineConfig> = archive.entries().iter().map(|e| &e.config).collect();
    let distinct = |f: &dyn Fn(&PipelineConfig) -> f64| {
        let mut v: Vec<f64> = cfgs.iter().map(|c| f(c)).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    assert_eq!(
        distinct(&|c| c.repair_level),
        vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]
    );
    let noise = distinct(&|c| c.noise_multiplier);
    assert_eq!((noise.len(), noise[0], noise[3]), (4, 1.0, 5.0));
    let clip = distinct(&|c| c.clipping_norm);
    assert_eq!((clip.len(), clip[0], clip[3]), (4, 0.1, 2.0));
    let epochs = distinct(&|c| c.epochs as f64);
    assert_eq!((epochs.len(), epochs[0], epochs[3]), (4, 30.0, 128.0));
    assert!(cfgs
        .iter()
        .all(|c| c.batch_size == 32 && c.learning_rate == 1e-2));

    let pts: Vec<[f64; 3]> = archive
        .entries()
        .iter()
        .map(|e| e.objectives.transformed)
        .collect();
    assert_eq!(archive.front().to_vec(), pareto_filter(&pts));
}

#[test]
fn search_drivers_are_deterministic_and_monotone() {
    let domain = SearchDomain::desk();
    let mut settings = MoboSettings::new(24, 4);
    settings.n_init = 8;
    settings.acquisition.candidate_budget = 256;
    settings.acquisition.n_mc = 64;
    let a = run_mobo(&domain, &settings, toy_eval).unwrap();
    let b = run_mobo(&domain, &settings, toy_eval).unwrap();
    assert_eq!(a.len(), 24);
    assert_eq!(a.hv_trace(), b.hv_trace());
    assert!(a.hv_trace().windows(2).all(|w| w[1] >= w[0]));
    assert!(a.entries().iter().all(|e| domain.contains(&e.config)));

    let r1 = run_random_search(&domain, 24, 4, toy_eval).unwrap();
    let r2 = run_random_search(&domain, 24, 4, toy_eval).unwrap();
    assert_eq!(r1.hv_trace(), r2.hv_trace());
    // both methods draw their first configurations from the same stream
    assert_eq!(a.entries()[0].config, r1.entries()[0].config);
    assert!(a.hypervolume() >= r1.hv_trace()[7]);
}

#[test]
fn failures_are_recorded_with_worst_objectives() {
    let domain = SearchDomain::desk();
    let mut calls = 0;
    let archive = run_random_search(&domain, 6, 1, |c| {
        calls += 1;
        if calls % 2 == 0 {
            Ok(EvalOutcome {
                objectives: ObjectiveTriple::worst(),
                failed: true,
            })
        } else {
            toy_eval(c)
        }
    })
    .unwrap();
    assert_eq!(archive.len(), 6);
    let trace = archive.hv_trace();
    assert_eq!(trace[1], trace[0]);
    assert!(archive.entries().iter().filter(|e| e.failed).count() == 3);
}
