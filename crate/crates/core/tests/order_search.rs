use trend_intervene_core::sarima::{search_orders_values, simulate_sarima, SarimaParams, SarimaSpec};

#[test]
fn ar2_selects_autoregressive_orders() {
    let spec = SarimaSpec::arima(2, 0, 0).unwrap();
    let params = SarimaParams {
        phi: vec![1.2, -0.5],
        mean_term: 10.0,
        ..SarimaParams::white_noise(&spec)
    };
    let y = simulate_sarima(&spec, &params, 400, 21).unwrap();
    let fit = search_orders_values(&y, false).unwrap();
    assert!(fit.spec.p >= 1, "{}", fit.spec);
    assert_eq!((fit.spec.seasonal_p, fit.spec.seasonal_d, fit.spec.seasonal_q), (0, 0, 0));
}

#[test]
fn non_seasonal_search_never_returns_seasonal_terms() {
    let spec = SarimaSpec::new(0, 0, 0, 1, 0, 0).unwrap();
    let params = SarimaParams {
        sphi: vec![0.7],
        mean_term: 30.0,
        ..SarimaParams::white_noise(&spec)
    };
    for seed in 0..3 {
        let y = simulate_sarima(&spec, &params, 168, seed).unwrap();
        let fit = search_orders_values(&y, false).unwrap();
        assert!(!fit.spec.is_seasonal(), "{}", fit.spec);
    }
}

#[test]
fn seasonal_ar_is_found() {
    let spec = SarimaSpec::new(0, 0, 0, 1, 0, 0).unwrap();
    let params = SarimaParams {
        sphi: vec![0.8],
        mean_term: 40.0,
        ..SarimaParams::white_noise(&spec)
    };
    let hits = (0..20)
        .filter(|&seed| {
            let y = simulate_sarima(&spec, &params, 400, 100 + seed).unwrap();
            let fit = search_orders_values(&y, true).unwrap();
            fit.spec.seasonal_p >= 1 || fit.spec.seasonal_d == 1
        })
        .count();
    assert!(hits >= 16, "{hits}/20");
}
