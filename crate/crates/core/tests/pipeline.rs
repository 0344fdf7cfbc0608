//! End-to-end checks that cross module boundaries: samplers against the
//! analytic transforms, and the fBm estimators against their own tables.

use igsub::fbm::{estimate_variance_exponent, exact_variance_fit, log_grid, HurstParam};
use igsub::rng::StreamFactory;
use igsub::stats::{loglog_fit, mc_mean};
use igsub::subordination::{bm_autocovariance, sample_subordinated_bm, subordinate_symbol, LevySymbolDescriptor};
use igsub::subordinator::{laplace_exponent, sample_path, sample_value, tempered_mean_var, SubordinatorSpec};

const PATHS: usize = 20_000;

#[test]
fn subordinated_bm_characteristic_function() {
    let spec = SubordinatorSpec::tempered(0.6, 1.0).unwrap().with_drift(0.3).unwrap();
    let grid = [0.5, 1.0, 2.0];
    let u = 0.8;
    let cosines = StreamFactory::new(11).par_map(PATHS, |rng, _| {
        let p = sample_subordinated_bm(&spec, &grid, rng).unwrap();
        (u * p.outer_values[2]).cos()
    });
    let est = mc_mean(&cosines).unwrap();
    let symbol = subordinate_symbol(&LevySymbolDescriptor::brownian(), &spec).unwrap();
    let phi = symbol.characteristic_function(u, 2.0).unwrap();
    assert!(phi.im.abs() < 1e-14);
    assert!((phi.re - (-2.0 * laplace_exponent(&spec, 0.5 * u * u).unwrap()).exp()).abs() < 1e-14);
    assert!(est.within(phi.re, 4.0), "{} vs {} (stderr {})", est.mean, phi.re, est.stderr);
}

#[test]
fn drifted_clock_characteristic_function() {
    // X(t) = c·t subordinated gives c·S(t), whose transform needs the complex gamma path
    let spec = SubordinatorSpec::plain(0.5).unwrap();
    let (c, u, t) = (1.5, 1.2, 1.0);
    let symbol = subordinate_symbol(&LevySymbolDescriptor::drift(c), &spec).unwrap();
    let want = symbol.characteristic_function(u, t).unwrap();
    let samples = StreamFactory::new(12).par_map(PATHS, |rng, _| c * sample_value(&spec, t, rng).unwrap());
    let re = mc_mean(&samples.iter().map(|z| (u * z).cos()).collect::<Vec<_>>()).unwrap();
    let im = mc_mean(&samples.iter().map(|z| (u * z).sin()).collect::<Vec<_>>()).unwrap();
    assert!(re.within(want.re, 4.0), "{} vs {}", re.mean, want.re);
    assert!(im.within(want.im, 4.0), "{} vs {}", im.mean, want.im);
}

#[test]
fn subordinated_bm_autocovariance() {
    let spec = SubordinatorSpec::tempered(0.5, 1.0).unwrap();
    let grid = [1.0, 3.0];
    let products = StreamFactory::new(13).par_map(PATHS, |rng, _| {
        let p = sample_subordinated_bm(&spec, &grid, rng).unwrap();
        p.outer_values[0] * p.outer_values[1]
    });
    let est = mc_mean(&products).unwrap();
    let want = bm_autocovariance(&spec, 1.0, 3.0).unwrap();
    assert_eq!(want, tempered_mean_var(&spec, 1.0).unwrap().0);
    assert!(est.within(want, 4.0), "{} vs {want}", est.mean);
}

#[test]
fn path_endpoint_has_the_marginal_law() {
    let spec = SubordinatorSpec::floored(0.7, 0.2).unwrap();
    let (eta, t) = (0.9, 2.5);
    let from_paths = StreamFactory::new(14).par_map(PATHS, |rng, _| {
        let p = sample_path(&spec, t, rng).unwrap();
        (-eta * p.evaluate_at(t).unwrap()).exp()
    });
    let est = mc_mean(&from_paths).unwrap();
    let want = (-t * laplace_exponent(&spec, eta).unwrap()).exp();
    assert!(est.within(want, 4.0), "{} vs {want}", est.mean);
}

#[test]
fn variance_table_reproduces_the_fit() {
    let h = HurstParam::new(0.2).unwrap();
    let grid = log_grid(1.0, 100.0, 11).unwrap();
    let report = estimate_variance_exponent(h, 0.5, &grid, 400, &StreamFactory::new(15)).unwrap();
    let (ts, vs): (Vec<f64>, Vec<f64>) = report.table.iter().filter(|r| r.in_fit).map(|r| (r.t, r.value)).unzip();
    assert!(ts.iter().all(|&t| t >= report.fit_window[0] && t <= report.fit_window[1]));
    let fit = loglog_fit(&ts, &vs).unwrap();
    assert!((fit.slope - report.estimate).abs() < 1e-12);
    assert!((fit.intercept.exp() - report.prefactor).abs() < 1e-9 * report.prefactor);
    let exact = exact_variance_fit(h, 0.5, &ts).unwrap();
    assert!((report.estimate - exact.slope).abs() < 6.0 * report.stderr.max(0.02));
    let csv = report.table_csv();
    assert_eq!(csv.lines().count(), grid.len() + 1);
}

#[test]
fn results_do_not_depend_on_the_thread_count() {
    let h = HurstParam::new(0.3).unwrap();
    let grid = log_grid(1.0, 60.0, 8).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let report = estimate_variance_exponent(h, 0.8, &grid, 80, &StreamFactory::new(16)).unwrap();
            let spec = SubordinatorSpec::tempered(0.4, 2.0).unwrap();
            let values = StreamFactory::new(17).par_map(500, |rng, _| sample_value(&spec, 1.0, rng).unwrap());
            (report.to_json(), values)
        })
    };
    assert_eq!(run(1), run(4));
}
