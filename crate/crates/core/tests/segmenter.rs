mod common;

use proptest::prelude::*;
use rand::Rng;
use starprior::grid::{GridShape, ImageGrid, Pixel};
use starprior::io::normalize::normalize_dataset;
use starprior::loss::LossConfig;
use starprior::metrics::{jaccard, threshold};
use starprior::segmenter::{
    box_blur, extract_features, feature_dim, optimize_logits, optimize_logits_with_center, predict, sgd_step, train,
    LogitField, ParamVector, TrainConfig, Velocity, DEFAULT_LOGIT_MAGNITUDE,
};
use starprior::starshape::{check_star, estimate_center};
use starprior::synth::{gen_dataset_in_memory, gen_mask, random_spec, DatasetParams, KindChoice, ShapeKind, ShapeSpec};
use starprior::Dataset;

fn direct_box(plane: &[f64], h: usize, w: usize, r: usize) -> Vec<f64> {
    let refl = |i: isize, n: usize| -> usize {
        let mut i = i;
        loop {
            if i < 0 {
                i = -i - 1;
            } else if i >= n as isize {
                i = 2 * n as isize - 1 - i;
            } else {
                return i as usize;
            }
        }
    };
    let r = r as isize;
    let mut out = vec![0.0; h * w];
    for row in 0..h {
        for col in 0..w {
            let mut acc = 0.0;
            for dr in -r..=r {
                for dc in -r..=r {
                    acc += plane[refl(row as isize + dr, h) * w + refl(col as isize + dc, w)];
                }
            }
            out[row * w + col] = acc / ((2 * r + 1) * (2 * r + 1)) as f64;
        }
    }
    out
}

#[test]
fn blur_matches_direct_convolution() {
    let shape = GridShape::new(9, 11).unwrap();
    let mut impulse = vec![0.0; 99];
    impulse[4 * 11 + 5] = 1.0;
    let mut corner = vec![0.0; 99];
    corner[0] = 1.0;
    let mut rng = common::rng(2);
    let random: Vec<f64> = (0..99).map(|_| rng.random()).collect();
    for plane in [impulse, corner, random] {
        for r in [1, 3] {
            let got = box_blur(&plane, shape, r);
            for (a, b) in got.iter().zip(direct_box(&plane, 9, 11, r)) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }
    let tiny = box_blur(&[0.7f64], GridShape::new(1, 1).unwrap(), 3);
    assert!((tiny[0] - 0.7).abs() < 1e-15);
}

#[test]
fn feature_layout() {
    let shape = GridShape::new(4, 5).unwrap();
    let mut rng = common::rng(3);
    let data: Vec<f64> = (0..40).map(|_| rng.random()).collect();
    let img = ImageGrid::new(shape, 2, data.clone()).unwrap();
    let f = extract_features(&img);
    assert_eq!((f.dim(), feature_dim(2)), (8, 8));
    let b1: Vec<Vec<f64>> = (0..2).map(|c| direct_box(&data[c * 20..(c + 1) * 20], 4, 5, 1)).collect();
    let b3: Vec<Vec<f64>> = (0..2).map(|c| direct_box(&data[c * 20..(c + 1) * 20], 4, 5, 3)).collect();
    for p in shape.pixels() {
        let i = shape.index(p);
        let row = f.pixel(i);
        assert_eq!(&row[..2], &[data[i], data[20 + i]]);
        for c in 0..2 {
            assert!((row[2 + c] - b1[c][i]).abs() < 1e-14);
            assert!((row[4 + c] - b3[c][i]).abs() < 1e-14);
        }
        assert_eq!(row[6], p.row as f64 / 3.0);
        assert_eq!(row[7], p.col as f64 / 4.0);
    }
    let one = extract_features(&ImageGrid::filled(GridShape::new(1, 1).unwrap(), 3, 0.4f64).unwrap());
    assert_eq!(&one.pixel(0)[9..], &[0.0, 0.0]);
}

#[test]
fn predict_matches_direct_evaluation() {
    let shape = GridShape::new(6, 7).unwrap();
    let mut rng = common::rng(4);
    let img = ImageGrid::new(shape, 3, (0..126).map(|_| rng.random()).collect()).unwrap();
    let f = extract_features(&img);
    let params = ParamVector { weights: (0..11).map(|_| rng.random_range(-3.0..3.0)).collect(), bias: 0.3 };
    let pm = predict(&params, &f).unwrap();
    for i in 0..shape.len() {
        let z: f64 = params.weights.iter().zip(f.pixel(i)).map(|(w, x)| w * x).sum::<f64>() + params.bias;
        assert!((pm.probs()[i] - 1.0 / (1.0 + (-z).exp())).abs() < 1e-14);
    }
    assert!(predict(&ParamVector::<f64>::zeros(11), &f).unwrap().probs().iter().all(|&p| p == 0.5));
    let f32s = extract_features(&ImageGrid::filled(shape, 3, 0.5f32).unwrap());
    let sat = predict(&ParamVector { weights: vec![0.0f32; 11], bias: 40.0 }, &f32s).unwrap();
    assert!(sat.probs().iter().all(|&p| p == 1.0));
    assert!(predict(&ParamVector::<f64>::zeros(5), &f).is_err());
}

#[test]
fn weight_decay_contracts_geometrically() {
    let mut params = ParamVector { weights: vec![1.0f64, -2.0, 0.5], bias: 0.7 };
    let mut v = Velocity::zeros(3);
    let zero = ParamVector::zeros(3);
    let (lr, wd) = (0.1, 0.05);
    for step in 1..=25 {
        sgd_step(&mut params, &mut v, &zero, lr, 0.0, wd);
        let k = (1.0 - lr * wd).powi(step);
        for (w, w0) in params.weights.iter().zip([1.0, -2.0, 0.5]) {
            assert!((w - w0 * k).abs() < 1e-14);
        }
        assert_eq!(params.bias, 0.7);
    }
}

#[test]
fn truth_is_a_fixed_point() {
    let shape = GridShape::new(16, 16).unwrap();
    let y = gen_mask(&random_spec(&DatasetParams::default(), shape, 5).unwrap(), shape).unwrap();
    let init = LogitField::from_mask(&y, 20.0f64);
    let (z, trace) = optimize_logits(&y, &init, &LossConfig::default(), &TrainConfig::logit_schedule()).unwrap();
    assert!(trace.iter().all(|r| r.is_finite() && r.total <= 256.0 * 1.01e-7));
    for (a, b) in z.values().iter().zip(init.values()) {
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn ce_descent_is_monotone() {
    let mut rng = common::rng(6);
    let tcfg = TrainConfig {
        learning_rate: 1e-3,
        momentum: 0.0,
        warmup_epochs: 0,
        total_epochs: 60,
        ..TrainConfig::default()
    };
    let cfg = LossConfig { beta: 0.0, ..LossConfig::default() };
    for _ in 0..5 {
        let shape = GridShape::new(10, 12).unwrap();
        let y = common::random_mask(&mut rng, shape, 0.5);
        let init = LogitField::new(shape, (0..120).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap();
        let (_, trace) = optimize_logits_with_center(&y, Pixel::new(5, 5), &init, &cfg, &tcfg).unwrap();
        for w in trace.windows(2) {
            assert!(w[1].ce <= w[0].ce);
        }
    }
}

#[test]
fn logit_runs_are_bit_identical() {
    let shape = GridShape::new(24, 24).unwrap();
    let spec =
        random_spec(&DatasetParams { kind: KindChoice::WedgeCutStar, ..DatasetParams::default() }, shape, 8).unwrap();
    let y = gen_mask(&ShapeSpec { kind: ShapeKind::RadialStar, ..spec.clone() }, shape).unwrap();
    let init = LogitField::from_mask(&gen_mask(&spec, shape).unwrap(), DEFAULT_LOGIT_MAGNITUDE);
    let run = || optimize_logits(&y, &init, &LossConfig::default(), &TrainConfig::logit_schedule()).unwrap();
    let (a, ta) = run();
    let (b, tb) = run();
    assert_eq!(a.values(), b.values());
    assert_eq!(ta, tb);
}

/// The wedge-repair instances: truth is the radial star, the initial field
/// encodes the same star with a wedge removed.
fn repair_instance(seed: u64) -> (starprior::MaskGrid, LogitField<f64>) {
    let shape = GridShape::new(48, 48).unwrap();
    let params = DatasetParams { kind: KindChoice::WedgeCutStar, ..DatasetParams::default() };
    let spec = random_spec(&params, shape, seed).unwrap();
    let truth = gen_mask(&ShapeSpec { kind: ShapeKind::RadialStar, ..spec.clone() }, shape).unwrap();
    let init = LogitField::from_mask(&gen_mask(&spec, shape).unwrap(), DEFAULT_LOGIT_MAGNITUDE);
    (truth, init)
}

#[test]
fn star_term_repairs_wedges() {
    let tcfg = TrainConfig::logit_schedule();
    let (mut strictly, mut n) = (0, 0);
    for seed in 1000..1012 {
        let (truth, init) = repair_instance(seed);
        let c = estimate_center(&truth).unwrap();
        let mut out = vec![];
        for beta in [0.0, 5.0] {
            let (z, trace) = optimize_logits(&truth, &init, &LossConfig::default().with_beta(beta), &tcfg).unwrap();
            assert!(trace.iter().all(|r| r.is_finite()));
            let m = threshold(&z.probs(), 0.5);
            let v = check_star(&m, c).unwrap().count() as f64 / m.count_foreground().max(1) as f64;
            out.push((v, jaccard(&m, &truth).unwrap()));
        }
        assert!(out[1].0 <= out[0].0, "seed {seed}: {out:?}");
        assert!(out[1].1 > out[0].1, "seed {seed}: {out:?}");
        strictly += usize::from(out[1].0 < out[0].0);
        n += 1;
    }
    assert!(strictly * 10 >= n * 9, "{strictly}/{n}");
}

fn separable(n: usize, seed: u64) -> Dataset<f64> {
    let shape = GridShape::new(24, 24).unwrap();
    let params = DatasetParams { noise_sigma: 0.05, ..DatasetParams::default() };
    gen_dataset_in_memory(n, seed, shape, &params).unwrap()
}

#[test]
fn training_is_deterministic_and_warms_up() {
    let (train_ds, _) = normalize_dataset(&separable(14, 0)).unwrap();
    let (val_ds, _) = normalize_dataset(&separable(4, 100)).unwrap();
    let tcfg = TrainConfig { total_epochs: 8, ..TrainConfig::default() };
    let cfg = LossConfig::default();
    let (pa, la) = train(&train_ds, &val_ds, &cfg, &tcfg).unwrap();
    let (pb, lb) = train(&train_ds, &val_ds, &cfg, &tcfg).unwrap();
    assert_eq!(pa, pb);
    assert_eq!(la, lb);
    assert_eq!(la.len(), 8);
    for e in &la {
        assert!(e.train_sh > 0.0 && e.train_sh.is_finite());
        if e.epoch <= 5 {
            assert_eq!(e.beta, 0.0);
            assert_eq!(e.train_total, e.train_ce);
        } else {
            assert_eq!(e.beta, 5.0);
            assert!((e.train_total - (e.train_ce + 5.0 * e.train_sh)).abs() <= 1e-9 * e.train_total);
        }
    }
    let other = TrainConfig { seed: 1, ..tcfg };
    assert_ne!(train(&train_ds, &val_ds, &cfg, &other).unwrap().1, la);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn predictions_are_probabilities(seed in any::<u64>(), scale in 0.0f64..100.0) {
        let shape = GridShape::new(5, 6).unwrap();
        let mut rng = common::rng(seed);
        let img = ImageGrid::new(shape, 3, (0..90).map(|_| rng.random()).collect()).unwrap();
        let params = ParamVector { weights: (0..11).map(|_| scale * rng.random_range(-1.0..1.0)).collect(), bias: scale };
        let pm = predict(&params, &extract_features(&img)).unwrap();
        prop_assert!(pm.probs().iter().all(|&p| (0.0..=1.0).contains(&p)));
    }
}
