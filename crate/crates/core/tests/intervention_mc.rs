use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use trend_intervene_core::intervention::fit_tfn;
use trend_intervene_core::sarima::SarimaSpec;
use trend_intervene_core::series::{build_impulse, MonthlySeries, YearMonth};

fn pvalue_for_seed(w0: f64, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 5.0).unwrap();
    let base = MonthlySeries::new("sim", YearMonth::new(2004, 1).unwrap(), vec![0.0; 168]).unwrap();
    let impulse = build_impulse(&base, 10).unwrap();
    let values = impulse
        .values
        .iter()
        .map(|x| 50.0 + w0 * x + noise.sample(&mut rng))
        .collect();
    let fit = fit_tfn(&base.with_values(values), &impulse, &SarimaSpec::arima(0, 0, 0).unwrap()).unwrap();
    (fit.w0, fit.w0_pvalue)
}

#[test]
fn size_at_five_percent() {
    let rejections = (0..200).filter(|&s| pvalue_for_seed(0.0, 5000 + s).1 < 0.05).count();
    let rate = rejections as f64 / 200.0;
    assert!((0.02..=0.09).contains(&rate), "{rate}");
}

#[test]
fn null_pvalues_are_roughly_uniform() {
    let mut p: Vec<f64> = (0..200).map(|s| pvalue_for_seed(0.0, 9000 + s).1).collect();
    p.sort_by(f64::total_cmp);
    let n = p.len() as f64;
    let ks = p
        .iter()
        .enumerate()
        .map(|(i, &v)| (v - i as f64 / n).abs().max(((i + 1) as f64 / n - v).abs()))
        .fold(0.0, f64::max);
    assert!(ks < 0.15, "{ks}");
}

#[test]
fn large_effect_is_detected() {
    let detected = (0..100)
        .filter(|&s| {
            let (w0, p) = pvalue_for_seed(30.0, 100 + s);
            p < 0.05 && w0 > 0.0
        })
        .count();
    assert!(detected >= 95, "{detected}");
}
