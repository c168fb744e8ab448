use pipp_core::fit::log_pseudolikelihood_hessian;
use pipp_core::io::{read_samples_ndjson, write_samples_ndjson};
use pipp_core::{
    build_quadrature, build_tessellation, curve_diagram, fit_diagram, fit_mple,
    log_pseudolikelihood, robustness_study, run_add_remove, run_rjmcmc, ChainSettings,
    DummyPointSpec, ExperimentConfig, GaussianMixture, InteractionThresholds, IrlsSettings,
    MoveProbabilities, MpleFit, PcpiModel, PersistenceDiagram, Point, PolarCurveSpec, Window,
};

fn constant_model(window: Window, generators: &[Point], lambda_w: f64) -> PcpiModel {
    let t = build_tessellation(generators, window).unwrap();
    PcpiModel::new(
        InteractionThresholds::reference(),
        vec![0.0; 3],
        t,
        lambda_w,
    )
    .unwrap()
}

fn mean_and_var(xs: &[usize]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<usize>() as f64 / n;
    let v = xs.iter().map(|&x| (x as f64 - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// With theta = 0 and s = c everywhere, births at rate c * lambda_w balance
/// deaths, so the cardinality settles at Poisson(c * lambda_w).
#[test]
fn interaction_free_cardinality_mean_is_c_times_lambda() {
    let window = Window::new(0.0, 1.0, 0.0, 1.0).unwrap();
    // Two equal tiles: c = 0.5.
    let m = constant_model(
        window,
        &[Point::new(0.25, 0.5), Point::new(0.75, 0.5)],
        12.0,
    );
    let q = GaussianMixture::reference();
    let set = run_rjmcmc(
        &PersistenceDiagram::default(),
        &m,
        MoveProbabilities::default(),
        &q,
        &ChainSettings::new(200_000, 31),
    )
    .unwrap();
    let draws: Vec<usize> = set.cardinality[2_000..]
        .iter()
        .step_by(40)
        .copied()
        .collect();
    let (mean, var) = mean_and_var(&draws);
    assert!((mean - 6.0).abs() < 0.25, "mean {mean}");
    assert!((var - 6.0).abs() < 1.0, "var {var}");
}

#[test]
fn add_remove_chain_also_reaches_poisson_cardinality() {
    let window = Window::unit();
    let m = constant_model(window, &[Point::new(0.5, 0.5)], 5.0);
    let set = run_add_remove(
        &PersistenceDiagram::default(),
        &m,
        0.5,
        &ChainSettings::new(200_000, 32),
    )
    .unwrap();
    let draws: Vec<usize> = set.cardinality[2_000..]
        .iter()
        .step_by(40)
        .copied()
        .collect();
    let (mean, var) = mean_and_var(&draws);
    assert!((mean - 5.0).abs() < 0.25, "mean {mean}");
    assert!((var - 5.0).abs() < 1.0, "var {var}");
}

#[test]
fn unequal_move_probabilities_keep_the_target() {
    let m = constant_model(Window::unit(), &[Point::new(0.5, 0.5)], 5.0);
    let q = GaussianMixture::reference();
    let moves = MoveProbabilities::new(0.6, 0.2, 0.2).unwrap();
    let set = run_rjmcmc(
        &PersistenceDiagram::default(),
        &m,
        moves,
        &q,
        &ChainSettings::new(200_000, 33),
    )
    .unwrap();
    let draws: Vec<usize> = set.cardinality[2_000..]
        .iter()
        .step_by(40)
        .copied()
        .collect();
    let (mean, _) = mean_and_var(&draws);
    assert!((mean - 5.0).abs() < 0.3, "mean {mean}");
}

#[test]
fn add_remove_births_are_uniform_or_initial() {
    let m = constant_model(Window::unit(), &[Point::new(0.5, 0.5)], 3.0);
    let initial =
        PersistenceDiagram::new(vec![Point::new(0.1, 0.2), Point::new(0.3, 0.05)], 1).unwrap();
    let set = run_add_remove(&initial, &m, 0.5, &ChainSettings::new(5_000, 34)).unwrap();
    for d in set.iter_diagrams() {
        assert!(d.points.iter().all(|p| Window::unit().contains(p)));
    }
}

#[test]
fn pseudolikelihood_is_concave_along_lines() {
    let d = curve_diagram(&PolarCurveSpec::default(), 11, 1).unwrap();
    let (q, _) = build_quadrature(
        &d,
        &DummyPointSpec::reference(12),
        &Window::unit(),
        &InteractionThresholds::reference(),
    )
    .unwrap();
    let a = [0.3, -0.2, 0.5];
    let b = [-0.4, 0.6, 1.5];
    for i in 0..=10 {
        let t = i as f64 / 10.0;
        let mid: Vec<f64> = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (1.0 - t) * x + t * y)
            .collect();
        let chord = (1.0 - t) * log_pseudolikelihood(&a, &q) + t * log_pseudolikelihood(&b, &q);
        assert!(log_pseudolikelihood(&mid, &q) >= chord - 1e-9);
    }
    let h = log_pseudolikelihood_hessian(&a, &q);
    for (l, row) in h.iter().enumerate() {
        assert!(row[l] <= 0.0);
    }
}

#[test]
fn converged_fit_is_a_stationary_point() {
    for seed in 0..50u64 {
        let d = curve_diagram(&PolarCurveSpec::default(), seed, 1).unwrap();
        let (q, _) = build_quadrature(
            &d,
            &DummyPointSpec::reference(seed + 1000),
            &Window::unit(),
            &InteractionThresholds::reference(),
        )
        .unwrap();
        let Ok(f) = fit_mple(&q, 200, 1e-10) else {
            continue;
        };
        if !f.converged {
            continue;
        }
        let g = pipp_core::log_pseudolikelihood_gradient(&f.theta_hat, &q);
        assert!(g.iter().all(|x| x.abs() < 1e-6), "{g:?}");
        for l in 0..3 {
            for step in [-1e-4, 1e-4] {
                let mut t = f.theta_hat.clone();
                t[l] += step;
                assert!(log_pseudolikelihood(&t, &q) <= f.log_pl + 1e-12);
            }
        }
        return;
    }
    panic!("no converged fit among 50 seeds");
}

#[test]
fn fitted_model_survives_json_exactly() {
    let config = ExperimentConfig::default();
    let d = curve_diagram(&config.curve, config.cloud_seed(), 1).unwrap();
    let fit = fit_diagram(
        &d,
        &config.dummy_spec(),
        &config.window,
        &config.thresholds,
        config.irls,
    )
    .unwrap();
    let back: MpleFit = serde_json::from_str(&serde_json::to_string(&fit).unwrap()).unwrap();
    assert_eq!(back, fit);
    assert_eq!(back.to_model(None).unwrap(), fit.to_model(None).unwrap());
}

#[test]
fn samples_survive_ndjson() {
    let m = constant_model(Window::unit(), &[Point::new(0.5, 0.5)], 4.0);
    let q = GaussianMixture::reference();
    let set = run_rjmcmc(
        &PersistenceDiagram::default(),
        &m,
        MoveProbabilities::default(),
        &q,
        &ChainSettings::new(300, 5),
    )
    .unwrap();
    let mut buf = Vec::new();
    write_samples_ndjson(&set, &mut buf).unwrap();
    let back = read_samples_ndjson(&buf[..]).unwrap();
    assert_eq!(back.len(), set.len());
    for (a, b) in back.diagrams.iter().zip(&set.diagrams) {
        assert_eq!(a.diagram, b.diagram);
        assert_eq!(a.iteration, b.iteration);
    }
    assert_eq!(back.diagnostics, set.diagnostics);
}

#[test]
fn robustness_study_is_reproducible() {
    let run = || {
        robustness_study(
            &PolarCurveSpec {
                n: 150,
                ..PolarCurveSpec::default()
            },
            4,
            &InteractionThresholds::reference(),
            &DummyPointSpec::reference(0),
            &Window::unit(),
            IrlsSettings::default(),
            77,
        )
        .unwrap()
    };
    let a = run();
    assert_eq!(a.replications.len(), 4);
    assert_eq!(a, run());
}
