#![allow(dead_code)]

use cls_limits::{ConstraintPrior, CountingModel64, ResponseFunction};

pub type Prior = ConstraintPrior<f64>;
pub type Response = ResponseFunction<f64>;

pub const SD1: Prior = ConstraintPrior::StandardNormal;

pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// The grid used for the no-systematics equivalence checks: 225 points.
pub fn exact_grid() -> Vec<(f64, f64, u64, f64)> {
    let mut grid = Vec::with_capacity(225);
    for s in [0.5, 1.0, 2.0] {
        for b in [0.0, 0.5, 1.5, 5.0, 20.0] {
            for n in [0, 1, 3, 10, 50] {
                for alpha in [0.05, 0.1, 0.32] {
                    grid.push((s, b, n, alpha));
                }
            }
        }
    }
    grid
}

/// `s=1, b=1.5, N=3` with a log-normal response on the background.
pub fn background_lognormal(kappa: f64) -> CountingModel64 {
    CountingModel64::builder(1.0, 3)
        .nuisance("bkg_norm", SD1)
        .background_with("bkg", 1.5, [("bkg_norm", Response::LogNormal { kappa })])
        .build()
        .unwrap()
}

/// `s_nom=1, b=1.5, N=3` with a log-normal response on the signal.
pub fn signal_lognormal(kappa: f64) -> CountingModel64 {
    CountingModel64::builder(1.0, 3)
        .nuisance("sig_eff", SD1)
        .signal_response("sig_eff", Response::LogNormal { kappa })
        .background("bkg", 1.5)
        .build()
        .unwrap()
}

/// Background-only systematics: 1 to 3 nuisances, normal and log-normal
/// priors, log-normal and linear responses, some with a 2x2 correlation.
/// Every model keeps the signal perfectly known.
pub fn background_systematics_configs() -> Vec<(String, CountingModel64)> {
    let mut out = Vec::new();
    let n_obs = [0, 1, 3, 5, 10, 20];
    let b_noms = [0.5, 1.5, 3.0, 8.0];
    let kappas = [1.1, 1.2, 1.35, 1.5];
    let deltas = [0.05, 0.08, 0.1, 0.12];

    for i in 0..24usize {
        let n = n_obs[i % n_obs.len()];
        let b = b_noms[i % b_noms.len()];
        let s = [1.0, 0.5, 2.0][i % 3];
        let n_nuis = 1 + i % 3;
        let mut builder = CountingModel64::builder(s, n);
        let mut names = Vec::new();
        for j in 0..n_nuis {
            let name = format!("theta{j}");
            let prior = if (i + j) % 2 == 0 {
                SD1
            } else {
                ConstraintPrior::Normal {
                    mean: 0.1 * j as f64,
                    sd: 0.8 + 0.1 * j as f64,
                }
            };
            builder = builder.nuisance(name.clone(), prior);
            names.push(name);
        }
        let response = |j: usize| {
            if (i + j) % 3 == 2 {
                Response::Linear {
                    delta: deltas[(i + j) % 4],
                }
            } else {
                Response::LogNormal {
                    kappa: kappas[(i + j) % 4],
                }
            }
        };
        // First background reacts to every nuisance, a second one only to
        // the last nuisance.
        builder = builder.background_with(
            "main",
            b,
            names.iter().enumerate().map(|(j, name)| (name.clone(), response(j))),
        );
        if n_nuis > 1 {
            builder = builder.background_with(
                "minor",
                0.25 * b,
                [(names[n_nuis - 1].clone(), Response::LogNormal { kappa: 1.3 })],
            );
        }
        let correlated = n_nuis == 2 && i % 2 == 1;
        if correlated {
            let rho = if i % 4 == 1 { 0.5 } else { -0.3 };
            builder = builder.correlation(vec![vec![1.0, rho], vec![rho, 1.0]]);
        }
        let label = format!(
            "cfg{i:02}: s={s} b={b} N={n} nuisances={n_nuis}{}",
            if correlated { " correlated" } else { "" }
        );
        out.push((label, builder.build().unwrap()));
    }

    // Log-normal priors, sampled by Monte Carlo only.
    for (i, (mu, sigma)) in [(0.0, 0.1), (0.0, 0.2), (-0.02, 0.2), (0.0, 0.3)]
        .into_iter()
        .enumerate()
    {
        let n = [2, 4, 7, 12][i];
        let model = CountingModel64::builder(1.0, n)
            .nuisance("scale", ConstraintPrior::LogNormal { mu, sigma })
            .nuisance("norm", SD1)
            .background_with(
                "main",
                2.0 + i as f64,
                [
                    ("scale", Response::Linear { delta: 0.5 }),
                    ("norm", Response::LogNormal { kappa: 1.15 }),
                ],
            )
            .build()
            .unwrap();
        out.push((format!("lnprior{i}: N={n} sigma={sigma}"), model));
    }
    out
}

/// Models whose every response is the identity: marginalization must be a
/// no-op on them.
pub fn identity_configs() -> Vec<CountingModel64> {
    let cases = [
        (1.0, 1.5, 3),
        (1.0, 0.0, 0),
        (2.0, 0.5, 1),
        (0.5, 5.0, 10),
        (1.0, 20.0, 50),
        (3.0, 0.0, 4),
        (0.25, 2.0, 0),
        (1.5, 7.5, 12),
        (1.0, 1.0, 1),
        (0.8, 3.0, 6),
    ];
    cases
        .iter()
        .enumerate()
        .map(|(i, &(s, b, n))| {
            let mut builder = CountingModel64::builder(s, n)
                .nuisance("a", SD1)
                .signal_response("a", Response::Identity);
            if i % 2 == 0 {
                builder = builder
                    .nuisance("c", ConstraintPrior::Normal { mean: 0.5, sd: 2.0 })
                    .correlation(vec![vec![1.0, 0.4], vec![0.4, 1.0]]);
            }
            let mut responses = vec![("a".to_string(), Response::Identity)];
            if i % 2 == 0 {
                responses.push(("c".to_string(), Response::Identity));
            }
            // Split b across two processes so the sum is exercised.
            builder
                .background_with("p", 0.75 * b, responses)
                .background("q", 0.25 * b)
                .build()
                .unwrap()
        })
        .collect()
}
