use bellinfo::bellgen::{correlation_table, CorrelationTable, SettingsPair};
use bellinfo::lhv::{construct_lhv, empirical_table, sample_strategy, LhvModel};
use bellinfo::pauli::correlation_tensor;
use bellinfo::qstate::{build_preset, PresetKind, StatePreset};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DRAWS: usize = 1_000_000;

#[test]
fn sampled_product_model_reproduces_anticorrelation() {
    let t = correlation_tensor(&build_preset(&StatePreset::new(PresetKind::ProductPlusXMinusX, 2)).unwrap()).unwrap();
    let (x, y) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
    let table = correlation_table(&t, &SettingsPair::new(vec![(x, y), (x, y)]).unwrap()).unwrap();
    let model = construct_lhv(&table).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let samples: Vec<_> = (0..DRAWS).map(|_| sample_strategy(&model, &mut rng)).collect();
    let empirical = empirical_table(2, &samples).unwrap();
    assert!((empirical.values()[0] + 1.0).abs() <= 0.005);
    for k in 1..4 {
        assert!(empirical.values()[k].abs() <= 0.005);
    }
}

#[test]
fn pure_noise_is_uniform_over_strategies() {
    let model = LhvModel::new(2, Vec::new(), 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut counts = [0usize; 16];
    for _ in 0..DRAWS {
        let s = sample_strategy(&model, &mut rng);
        let bit = |v: i8| usize::from(v < 0);
        counts[bit(s.a1[0]) << 3 | bit(s.a2[0]) << 2 | bit(s.a1[1]) << 1 | bit(s.a2[1])] += 1;
    }
    let p = 1.0 / 16.0;
    let se = (p * (1.0 - p) / DRAWS as f64).sqrt();
    for c in counts {
        assert!((c as f64 / DRAWS as f64 - p).abs() <= 5.0 * se, "{counts:?}");
    }
}

#[test]
fn sampled_mixed_model_matches_table() {
    let table = CorrelationTable::new(2, vec![0.5, 0.3, -0.2, 0.4]).unwrap();
    let model = construct_lhv(&table).unwrap();
    assert!(model.noise_weight > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let samples: Vec<_> = (0..DRAWS).map(|_| sample_strategy(&model, &mut rng)).collect();
    let empirical = empirical_table(2, &samples).unwrap();
    // Each correlation is a mean of ±1 values: standard error at most 1e−3.
    for (e, want) in empirical.values().iter().zip(table.values()) {
        assert!((e - want).abs() <= 5e-3, "{e} vs {want}");
    }
}
