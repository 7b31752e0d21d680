use laserphm::eval::{accuracy, confusion, rmse};
use laserphm::models::{label_rul, rul_to_hours, RulLabelSpec};
use laserphm::nn::{
    softmax, Activation, Architecture, LstmLayer, LstmNetwork, NetworkMeta, Readout,
};
use laserphm::preprocess::{
    build_feature_windows, correlation_matrix, resample_to_window, sg_smooth, FeatureTable,
    SgFilterSpec,
};
use laserphm::rng::rng_from_seed;
use laserphm::sim::{
    compute_rate_k, current_at, failure_time, generate_dataset, generate_sequence, sample_scenario,
    DegradationMode, DegradationParams, ModeCounts, OperatingConditions, EOL_CURRENT_RISE,
};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #[test]
    fn sg_smoothing_is_linear(
        x in prop::collection::vec(-10.0f64..10.0, 30),
        y in prop::collection::vec(-10.0f64..10.0, 30),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let spec = SgFilterSpec::new(7, 3).unwrap();
        let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let lhs = sg_smooth(&combo, spec).unwrap();
        let sx = sg_smooth(&x, spec).unwrap();
        let sy = sg_smooth(&y, spec).unwrap();
        for i in 0..30 {
            prop_assert!((lhs[i] - (a * sx[i] + b * sy[i])).abs() < 1e-10);
        }
    }

    #[test]
    fn resampling_keeps_endpoints_and_order(
        steps in prop::collection::vec(0.01f64..5.0, 2..300),
        incs in prop::collection::vec(0.0f64..2.0, 300),
    ) {
        let times: Vec<f64> = steps.iter().scan(0.0, |t, d| { *t += d; Some(*t) }).collect();
        let signal: Vec<f64> = incs[..times.len()].iter().scan(1.0, |s, d| { *s += d; Some(*s) }).collect();
        let out = resample_to_window(&signal, &times, 100).unwrap();
        prop_assert_eq!(out[0], signal[0]);
        prop_assert_eq!(out[99], *signal.last().unwrap());
        prop_assert!(out.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn softmax_is_a_distribution(z in prop::collection::vec(-50.0f64..50.0, 1..8), c in -100.0f64..100.0) {
        let p = softmax(&z);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let shifted: Vec<f64> = z.iter().map(|v| v + c).collect();
        for (a, b) in p.iter().zip(softmax(&shifted)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rmse_ignores_common_shift(
        p in prop::collection::vec(-5.0f64..5.0, 1..50),
        d in -10.0f64..10.0,
    ) {
        let t: Vec<f64> = p.iter().rev().copied().collect();
        let base = rmse(&p, &t).unwrap();
        let ps: Vec<f64> = p.iter().map(|v| v + d).collect();
        let ts: Vec<f64> = t.iter().map(|v| v + d).collect();
        prop_assert!((rmse(&ps, &ts).unwrap() - base).abs() < 1e-9);
        prop_assert_eq!(rmse(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn lstm_hidden_states_are_bounded(seed in 0u64..1000) {
        let mut rng = rng_from_seed(seed);
        let mut layer = LstmLayer::zeros(3, 4);
        for v in layer.w.iter_mut().chain(layer.u.iter_mut()).chain(layer.b.iter_mut()) {
            *v = rng.random_range(-5.0..5.0);
        }
        let inputs: Vec<f64> = (0..60).map(|_| rng.random_range(-3.0..3.0)).collect();
        let cache = layer.forward(&inputs, 20).unwrap();
        prop_assert!(cache.hidden.iter().all(|h| h.abs() < 1.0));
    }
}

#[test]
fn correlation_matches_two_pass_oracle() {
    let mut rng = rng_from_seed(21);
    for _ in 0..20 {
        let rows = rng.random_range(2..12);
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..rows).map(|_| rng.random_range(-5.0..5.0)).collect())
            .collect();
        let names = (0..4).map(|i| format!("c{i}")).collect();
        let m = correlation_matrix(&FeatureTable::new(names, cols.clone()).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let n = rows as f64;
                let (mi, mj) = (
                    cols[i].iter().sum::<f64>() / n,
                    cols[j].iter().sum::<f64>() / n,
                );
                let mut sxy = 0.0;
                let mut sxx = 0.0;
                let mut syy = 0.0;
                for (x, y) in cols[i].iter().zip(&cols[j]) {
                    let (a, b) = (x - mi, y - mj);
                    sxy += a * b;
                    sxx += a * a;
                    syy += b * b;
                }
                let oracle = sxy / (sxx * syy).sqrt();
                assert!((m.values[i][j] - oracle).abs() < 1e-12);
                assert_eq!(m.values[i][j], m.values[j][i]);
            }
        }
    }
}

#[test]
fn label_rule_shape() {
    let mut rng = rng_from_seed(5);
    for _ in 0..100 {
        let tf = rng.random_range(1.0..5000.0);
        let spec = RulLabelSpec::new(rng.random_range(0.05..0.95), tf).unwrap();
        let tau = spec.tau_h();
        assert_eq!(label_rul(tau, &spec).unwrap(), 1.0);
        assert_eq!(label_rul(tf, &spec).unwrap(), 0.0);
        let mut prev = f64::INFINITY;
        for k in 0..=1000 {
            let t = (tf * k as f64 / 1000.0).min(tf);
            let l = label_rul(t, &spec).unwrap();
            assert!(l <= prev);
            prev = l;
            if t >= tau {
                let back = rul_to_hours(l, &spec);
                assert!((back - (tf - t)).abs() <= 1e-9 * tf);
            }
        }
    }
}

#[test]
fn accuracy_equals_fraction_correct() {
    let mut rng = rng_from_seed(8);
    for _ in 0..100 {
        let n = rng.random_range(1..200);
        let truth: Vec<DegradationMode> = (0..n)
            .map(|_| DegradationMode::ALL[rng.random_range(0..3)])
            .collect();
        let pred: Vec<DegradationMode> = (0..n)
            .map(|_| DegradationMode::ALL[rng.random_range(0..3)])
            .collect();
        let direct = truth.iter().zip(&pred).filter(|(a, b)| a == b).count() as f64 / n as f64;
        let m = confusion(&truth, &pred).unwrap();
        assert_eq!(accuracy(&m).unwrap(), direct);
        for mode in DegradationMode::ALL {
            assert_eq!(
                m.row_sum(mode) as usize,
                truth.iter().filter(|&&t| t == mode).count()
            );
        }
    }
}

#[test]
fn rate_is_monotone_in_temperature_and_power() {
    let params = DegradationParams {
        beta_ma: 1.0,
        derating_exponent: 2.0,
        scale_param: 4.0,
        activation_energy_ev: 0.4,
        noise_mean_ma: 0.0,
        noise_std_ma: 0.0,
    };
    let at = |t: f64, p: f64| {
        compute_rate_k(
            &OperatingConditions {
                temperature_k: t,
                optical_power_mw: p,
                wavelength_nm: 1550.0,
                threshold_current_ma: 20.0,
            },
            &params,
        )
        .unwrap()
    };
    for i in 0..50 {
        let t = 293.0 + i as f64;
        for j in 0..20 {
            let p = 1.0 + 0.45 * j as f64;
            assert!(at(t + 1.0, p) > at(t, p));
            assert!(at(t, p + 0.45) > at(t, p));
        }
    }
}

#[test]
fn generated_sequences_stop_at_end_of_life() {
    for mode in [DegradationMode::Sudden, DegradationMode::Gradual] {
        for seed in 0..50 {
            let scenario = sample_scenario(mode, seed).unwrap();
            let seq = generate_sequence(&scenario).unwrap();
            let threshold = (1.0 + EOL_CURRENT_RISE) * scenario.conditions.threshold_current_ma;
            let n = seq.len();
            let last = current_at(seq.times_h[n - 1], &scenario, 0.0).unwrap();
            let before = current_at(seq.times_h[n - 2], &scenario, 0.0).unwrap();
            assert!(last >= threshold - 1e-9, "{mode} seed {seed}");
            assert!(before < threshold, "{mode} seed {seed}");
            assert!(seq.failure_time_h.unwrap() <= seq.times_h[n - 1]);
            assert_eq!(seq.failure_time_h, failure_time(&scenario));
        }
    }
}

#[test]
fn generator_windows_are_always_valid() {
    let data = generate_dataset(ModeCounts::new(30, 30, 30), 2024).unwrap();
    let windows = build_feature_windows(&data, SgFilterSpec::default(), 0.6).unwrap();
    for w in &windows {
        w.validate().unwrap();
        assert!(w
            .inputs()
            .iter()
            .all(|v| v.is_finite() && (0.0..=1.0).contains(v)));
    }
}

#[test]
fn detector_head_permutation_permutes_probabilities() {
    let arch = Architecture {
        input_dim: 4,
        hidden_dims: vec![5],
        output_dim: 3,
        activation: Activation::Softmax,
        readout: Readout::Final,
    };
    let meta = NetworkMeta {
        purpose: "perm".into(),
        input_channels: Vec::new(),
    };
    let net = LstmNetwork::new(&arch, meta, 12).unwrap();
    let perm = [2usize, 0, 1];
    let mut permuted = net.clone();
    let width = net.dense.input_dim;
    for (new_row, &old_row) in perm.iter().enumerate() {
        permuted.dense.w[new_row * width..(new_row + 1) * width]
            .copy_from_slice(&net.dense.w[old_row * width..(old_row + 1) * width]);
        permuted.dense.b[new_row] = net.dense.b[old_row];
    }
    let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin().abs()).collect();
    let p = net.forward(&x, 10).unwrap().output.values;
    let q = permuted.forward(&x, 10).unwrap().output.values;
    for (new_row, &old_row) in perm.iter().enumerate() {
        assert_eq!(q[new_row], p[old_row]);
    }
}
