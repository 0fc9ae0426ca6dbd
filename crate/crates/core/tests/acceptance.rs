//! The contract every release must hold: oracle equivalences, structural
//! invariants, and scaled-down reproductions of the qualitative claims
//! behind the design. One test per criterion; each prints a PASS line.
//!
//! Tests share a gate so the timing-sensitive ones never compete with
//! sibling tests for cores.

use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mckelm::baselines::{
    default_hidden_count, knn_predict, predict_elm, predict_gnb, train_elm, train_gnb,
    train_rkelm, train_rkelm_with_node_count, KnnModel,
};
use mckelm::dataset::{
    apply_normalizer, fit_normalizer, gen_synthetic, one_hot, train_test_split, Dataset, LabelMap,
    SyntheticShape,
};
use mckelm::feature_select::{apply_selection, top_m, AttributionTensor, overall_scores};
use mckelm::kelm::{predict_kelm, train_kelm, KelmConfig};
use mckelm::kernels::{kernel_matrix, kernel_cross_matrix, KernelParams};
use mckelm::mckelm::{train_mckelm, VoteMode};
use mckelm::metrics::{accuracy, confusion, macro_average, precision_recall_f1};
use mckelm::model::{ModelFile, TrainedClassifier};
use mckelm::partition::{build_partition, choose_split_feature, density, PartitionConfig};

static GATE: Mutex<()> = Mutex::new(());

fn gate() -> MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

/// Fit bounds on `raw` and map it into [0, 1].
fn normalized(raw: &Dataset) -> Dataset {
    let spec = fit_normalizer(raw);
    apply_normalizer(&spec, raw, false).unwrap()
}

fn label_accuracy(predicted: &[u32], truth: &[u32]) -> f64 {
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}

/// Invert a dense matrix with a second library; the oracle side of every
/// solver comparison.
fn explicit_inverse(a: ArrayView2<f64>) -> nalgebra::DMatrix<f64> {
    let na = nalgebra::DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]]);
    na.try_inverse().expect("regularized system is invertible")
}

#[test]
fn criterion_01_single_column_model_equals_plain_kernel_machine() {
    let _g = gate();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for trial in 0..10u64 {
        let n = rng.random_range(60..=500);
        let d = rng.random_range(2..=16);
        let c = rng.random_range(2..=4);
        let raw = gen_synthetic(n, d, c, 1000 + trial, SyntheticShape::Blobs).unwrap();
        let spec = fit_normalizer(&raw);
        let train = apply_normalizer(&spec, &raw, false).unwrap();
        let raw_queries = gen_synthetic(100, d, c, 2000 + trial, SyntheticShape::Blobs).unwrap();

        for kernel in [
            KernelParams::rbf(0.7).unwrap(),
            KernelParams::chi_square(1.2).unwrap(),
        ] {
            // Unseen queries can stray outside the fitted bounds; the
            // unit-interval kernel needs them clamped.
            let queries =
                apply_normalizer(&spec, &raw_queries, kernel.requires_unit_interval()).unwrap();
            let config = KelmConfig::new(kernel, 1.0).unwrap();
            let targets = one_hot(train.labels(), c).unwrap();
            let single = train_kelm(&train, &targets, &config, 0).unwrap();
            let multi =
                train_mckelm(&train, &PartitionConfig::new(0).unwrap(), &config, 3).unwrap();

            for batch in [&train, &queries] {
                let q = batch.features_f64();
                let a = predict_kelm(&single, q.view()).unwrap().labels;
                let b = multi.predict_labels(q.view()).unwrap();
                assert_eq!(a, b, "trial {trial}, kernel {}", kernel.kind_name());
            }
        }
    }
    println!("ACCEPTANCE 1 PASS: depth-0 multicolumn model matches the plain kernel machine exactly");
}

#[test]
fn criterion_02_solves_match_explicit_inverse_oracles() {
    let _g = gate();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let gammas = [0.3, 1.0, 3.0];
    let regs = [0.1, 1.0, 10.0];

    // Full kernel systems: (C*I + K) beta = T.
    for trial in 0..30u64 {
        let n = rng.random_range(5..=50);
        let d = rng.random_range(2..=8);
        let c = rng.random_range(2..=4).min(n);
        let kernel = KernelParams::rbf(gammas[trial as usize % 3]).unwrap();
        let reg = regs[(trial as usize / 3) % 3];
        let train = normalized(&gen_synthetic(n, d, c, 3000 + trial, SyntheticShape::Blobs).unwrap());
        let targets = one_hot(train.labels(), c).unwrap();
        let column =
            train_kelm(&train, &targets, &KelmConfig::new(kernel, reg).unwrap(), 0).unwrap();

        let features = train.features_f64();
        let mut a = kernel_matrix(features.view(), &kernel).unwrap();
        for i in 0..n {
            a[[i, i]] += reg;
        }
        let inv = explicit_inverse(a.view());
        let t = targets.values();
        let nt = nalgebra::DMatrix::from_fn(n, c, |i, j| t[[i, j]]);
        let oracle = &inv * &nt;
        for i in 0..n {
            for j in 0..c {
                assert!(
                    (column.beta()[[i, j]] - oracle[(i, j)]).abs() < 1e-8,
                    "kelm trial {trial} at [{i},{j}]"
                );
            }
        }
    }

    // Reduced rectangular systems: (C*I + Km'Km) beta = Km'T.
    for trial in 0..20u64 {
        let n = rng.random_range(8..=50);
        let d = rng.random_range(2..=6);
        let p = rng.random_range(1..=n);
        let kernel = KernelParams::rbf(gammas[trial as usize % 3]).unwrap();
        let reg = regs[trial as usize % 3];
        let train = normalized(&gen_synthetic(n, d, 2, 4000 + trial, SyntheticShape::Blobs).unwrap());
        let targets = one_hot(train.labels(), 2).unwrap();
        let model =
            train_rkelm_with_node_count(&train, &targets, kernel, reg, trial, p).unwrap();

        let features = train.features_f64();
        let k_map = kernel_cross_matrix(features.view(), model.nodes().view(), &kernel).unwrap();
        let mut a = k_map.t().dot(&k_map);
        for i in 0..p {
            a[[i, i]] += reg;
        }
        let inv = explicit_inverse(a.view());
        let b = k_map.t().dot(&targets.values());
        let nb = nalgebra::DMatrix::from_fn(p, 2, |i, j| b[[i, j]]);
        let oracle = &inv * &nb;
        for i in 0..p {
            for j in 0..2 {
                assert!(
                    (model.beta()[[i, j]] - oracle[(i, j)]).abs() < 1e-8,
                    "rkelm trial {trial} at [{i},{j}]"
                );
            }
        }
    }
    println!("ACCEPTANCE 2 PASS: 50 regularized solves match explicit-inverse oracles within 1e-8");
}

/// Median and tie-respecting halves, written independently of the
/// library: ties go left in index order until the left half holds
/// exactly ceil(m/2) rows.
fn oracle_halves(values: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = values.len();
    let median = if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    };
    let mut quota = m.div_ceil(2) - values.iter().filter(|&&v| v < median).count();
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for (i, &v) in values.iter().enumerate() {
        if v < median {
            left.push(i);
        } else if v > median {
            right.push(i);
        } else if quota > 0 {
            quota -= 1;
            left.push(i);
        } else {
            right.push(i);
        }
    }
    (left, right)
}

fn rows_at(features: ArrayView2<f64>, idx: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((idx.len(), features.ncols()));
    for (o, &i) in idx.iter().enumerate() {
        out.row_mut(o).assign(&features.row(i));
    }
    out
}

#[test]
fn criterion_03_partition_invariants_and_split_rule() {
    let _g = gate();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for trial in 0..100u64 {
        let eta = 1 + (trial % 3) as u32;
        let leaves = 1usize << eta;
        let n = rng.random_range(leaves * 2..=400);
        let d = rng.random_range(2..=8);
        let data = normalized(&gen_synthetic(n, d, 2, 5000 + trial, SyntheticShape::Blobs).unwrap());
        let features = data.features_f64();
        let tree = build_partition(features.view(), &PartitionConfig::new(eta).unwrap()).unwrap();

        // Leaves cover 0..n exactly once.
        assert_eq!(tree.leaf_members().len(), leaves);
        let mut all: Vec<u32> = tree.leaf_members().iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..n as u32).collect::<Vec<_>>(), "trial {trial}");

        // Every internal node splits its rows within one of half.
        let mut sizes = vec![0usize; 2 * leaves - 1];
        for (leaf, members) in tree.leaf_members().iter().enumerate() {
            sizes[leaves - 1 + leaf] = members.len();
        }
        for node in (0..leaves - 1).rev() {
            let (l, r) = (sizes[2 * node + 1], sizes[2 * node + 2]);
            sizes[node] = l + r;
            assert!(l.abs_diff(r) <= 1, "trial {trial}, node {node}: {l} vs {r}");
        }

        // The split rule: chosen feature minimizes |D_i - O| by brute
        // force over all non-constant features (ties to the lowest).
        let root_density = density(features.view());
        let choice = choose_split_feature(features.view(), root_density).unwrap();
        let mut best: Option<(f64, usize)> = None;
        for feature in 0..d {
            let column: Vec<f64> = (0..n).map(|i| features[[i, feature]]).collect();
            let constant = column.iter().all(|&v| v == column[0]);
            if constant {
                continue;
            }
            let (left, right) = oracle_halves(&column);
            let halves = 0.5
                * (density(rows_at(features.view(), &left).view())
                    + density(rows_at(features.view(), &right).view()));
            let gap = (halves - root_density).abs();
            if best.is_none_or(|(g, _)| gap < g) {
                best = Some((gap, feature));
            }
        }
        assert_eq!(choice.feature, best.unwrap().1, "trial {trial}");
    }
    println!("ACCEPTANCE 3 PASS: partition covers, balances, and picks the density-preserving feature");
}

#[test]
fn criterion_04_nearest_neighbour_search_is_exact() {
    let _g = gate();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for trial in 0..20u64 {
        let n = rng.random_range(50..=1000);
        let d = rng.random_range(2..=10);
        let base = normalized(&gen_synthetic(n, d, 3, 6000 + trial, SyntheticShape::Blobs).unwrap());
        // A third of the trials duplicate every row to force distance ties.
        let features = if trial % 3 == 0 {
            let f = base.features_f64();
            let mut doubled = Array2::zeros((2 * n, d));
            doubled.slice_mut(ndarray::s![..n, ..]).assign(&f);
            doubled.slice_mut(ndarray::s![n.., ..]).assign(&f);
            doubled
        } else {
            base.features_f64()
        };
        let rows = features.nrows();
        let eta = if rows >= 64 { 3 } else { 0 };
        let tree = match build_partition(features.view(), &PartitionConfig::new(eta).unwrap()) {
            Ok(t) => t,
            // Duplicated rows occasionally exhaust a node's features.
            Err(_) => build_partition(features.view(), &PartitionConfig::new(0).unwrap()).unwrap(),
        };
        let k = [1, 3, 9][trial as usize % 3].min(rows);

        let queries = gen_synthetic(200, d, 3, 7000 + trial, SyntheticShape::Blobs).unwrap();
        let spec = fit_normalizer(&queries);
        let queries = apply_normalizer(&spec, &queries, false).unwrap().features_f64();
        for q in 0..200 {
            let query: Vec<f64> = queries.row(q).to_vec();
            let got = tree.k_nearest_nodes(features.view(), &query, k).unwrap();

            let mut scan: Vec<(f64, u32)> = (0..rows)
                .map(|i| {
                    let mut d2 = 0.0;
                    for (a, b) in query.iter().zip(features.row(i)) {
                        let t = a - b;
                        d2 += t * t;
                    }
                    (d2, i as u32)
                })
                .collect();
            scan.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let want: Vec<(u32, f64)> =
                scan[..k].iter().map(|&(d2, i)| (i, d2.sqrt())).collect();
            assert_eq!(got, want, "trial {trial}, query {q}");
        }
    }
    println!("ACCEPTANCE 4 PASS: tree search equals linear scan on 20 datasets x 200 queries");
}

/// Ridge least squares on raw features plus a bias column — the linear
/// reference the kernel model is compared against.
fn linear_least_squares_accuracy(train: &Dataset, test: &Dataset) -> f64 {
    let (n, d) = (train.n(), train.feature_count());
    let c = train.class_count();
    let mut x = nalgebra::DMatrix::zeros(n, d + 1);
    let f = train.features_f64();
    for i in 0..n {
        for j in 0..d {
            x[(i, j)] = f[[i, j]];
        }
        x[(i, d)] = 1.0;
    }
    let targets = one_hot(train.labels(), c).unwrap();
    let tv = targets.values();
    let t = nalgebra::DMatrix::from_fn(n, c, |i, j| tv[[i, j]]);
    let mut gram = x.transpose() * &x;
    for i in 0..d + 1 {
        gram[(i, i)] += 1e-6;
    }
    let w = gram.try_inverse().expect("ridge system is invertible") * x.transpose() * t;

    let qf = test.features_f64();
    let mut hits = 0usize;
    for (i, truth) in test.labels().iter().enumerate() {
        let mut best = (f64::NEG_INFINITY, 0u32);
        for class in 0..c {
            let mut score = w[(d, class)];
            for j in 0..d {
                score += qf[[i, j]] * w[(j, class)];
            }
            if score > best.0 {
                best = (score, class as u32);
            }
        }
        if best.1 == *truth {
            hits += 1;
        }
    }
    hits as f64 / test.n() as f64
}

#[test]
fn criterion_05_kernel_columns_separate_rings_where_linear_cannot() {
    let _g = gate();
    for seed in [1u64, 2, 3] {
        let raw = gen_synthetic(2000, 2, 2, 8000 + seed, SyntheticShape::Rings).unwrap();
        let (raw_train, raw_test) = train_test_split(&raw, 0.3, seed).unwrap();
        let spec = fit_normalizer(&raw_train);
        let train = apply_normalizer(&spec, &raw_train, false).unwrap();
        let test = apply_normalizer(&spec, &raw_test, false).unwrap();

        let config = KelmConfig::new(KernelParams::rbf(10.0).unwrap(), 1.0).unwrap();
        let model =
            train_mckelm(&train, &PartitionConfig::new(2).unwrap(), &config, 3).unwrap();
        let labels = model.predict_labels(test.features_f64().view()).unwrap();
        let kernel_acc = label_accuracy(&labels, test.labels());

        let linear_acc = linear_least_squares_accuracy(&train, &test);
        assert!(kernel_acc >= 0.95, "seed {seed}: kernel accuracy {kernel_acc}");
        assert!(linear_acc <= 0.70, "seed {seed}: linear accuracy {linear_acc}");
        assert!(kernel_acc > linear_acc, "seed {seed}");
    }
    println!("ACCEPTANCE 5 PASS: rings — kernel columns >= 0.95 while linear least squares <= 0.70");
}

fn median3(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

#[test]
fn criterion_06_training_time_falls_as_subsets_multiply() {
    let _g = gate();
    let train = normalized(&gen_synthetic(4000, 16, 4, 42, SyntheticShape::Blobs).unwrap());
    let config = KelmConfig::new(KernelParams::rbf(1.0).unwrap(), 1.0).unwrap();

    let mut medians = Vec::new();
    for eta in 0..=3u32 {
        let partition = PartitionConfig::new(eta).unwrap();
        let times: Vec<f64> = (0..3)
            .map(|_| {
                let started = Instant::now();
                let model = train_mckelm(&train, &partition, &config, 3).unwrap();
                let elapsed = started.elapsed().as_secs_f64();
                assert_eq!(model.columns().len(), 1 << eta);
                elapsed
            })
            .collect();
        medians.push(median3(times));
    }
    for w in medians.windows(2) {
        assert!(w[1] < w[0], "training time must fall with depth: {medians:?}");
    }
    assert!(
        medians[3] <= 0.5 * medians[0],
        "depth 3 must cost at most half of depth 0: {medians:?}"
    );
    println!(
        "ACCEPTANCE 6 PASS: median train seconds fell {:.3} -> {:.3} -> {:.3} -> {:.3}",
        medians[0], medians[1], medians[2], medians[3]
    );
}

#[test]
fn criterion_07_feature_selection_speeds_training_without_costing_accuracy() {
    let _g = gate();
    let raw = gen_synthetic(1500, 512, 3, 77, SyntheticShape::Blobs).unwrap();
    let (raw_train, raw_test) = train_test_split(&raw, 0.25, 7).unwrap();

    // Synthetic attributions concentrated on the first 50 features
    // (which include the two informative dimensions).
    let mut scores = Array2::<f64>::zeros((raw_train.n(), 512));
    for mut row in scores.rows_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = if j < 50 { 1.0 } else { 0.001 };
        }
    }
    let attrib =
        AttributionTensor::new(scores, raw_train.labels().to_vec(), raw_train.class_count())
            .unwrap();
    let selection = top_m(&overall_scores(&attrib).unwrap(), 50, false).unwrap();
    assert_eq!(selection.selected, (0..50).collect::<Vec<_>>());

    let config = KelmConfig::new(KernelParams::rbf(0.5).unwrap(), 1.0).unwrap();
    let partition = PartitionConfig::new(2).unwrap();
    let run = |train_raw: &Dataset, test_raw: &Dataset| {
        let spec = fit_normalizer(train_raw);
        let train = apply_normalizer(&spec, train_raw, false).unwrap();
        let test = apply_normalizer(&spec, test_raw, false).unwrap();
        let times: Vec<f64> = (0..3)
            .map(|_| {
                let started = Instant::now();
                train_mckelm(&train, &partition, &config, 3).unwrap();
                started.elapsed().as_secs_f64()
            })
            .collect();
        let model = train_mckelm(&train, &partition, &config, 3).unwrap();
        let labels = model.predict_labels(test.features_f64().view()).unwrap();
        (median3(times), label_accuracy(&labels, test.labels()))
    };

    let (full_time, full_acc) = run(&raw_train, &raw_test);
    let narrow_train = apply_selection(&selection, &raw_train).unwrap();
    let narrow_test = apply_selection(&selection, &raw_test).unwrap();
    let (sel_time, sel_acc) = run(&narrow_train, &narrow_test);

    assert!(
        sel_time * 2.0 <= full_time,
        "selected training must be at least twice as fast: {sel_time} vs {full_time}"
    );
    assert!(
        full_acc - sel_acc <= 0.01,
        "accuracy drop too large: {full_acc} -> {sel_acc}"
    );
    println!(
        "ACCEPTANCE 7 PASS: top-50 of 512 features trains {:.1}x faster, accuracy {:.4} -> {:.4}",
        full_time / sel_time,
        full_acc,
        sel_acc
    );
}

#[test]
fn criterion_08_metrics_match_exact_rational_arithmetic() {
    let _g = gate();
    use num_rational::Rational64;
    let tol = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for trial in 0..20 {
        let c = rng.random_range(2..=6);
        let n = rng.random_range(1..=200);
        let actual: Vec<u32> = (0..n).map(|_| rng.random_range(0..c as u32)).collect();
        let predicted: Vec<u32> = (0..n).map(|_| rng.random_range(0..c as u32)).collect();
        let cm = confusion(&actual, &predicted, c).unwrap();

        let hits = actual.iter().zip(&predicted).filter(|(a, b)| a == b).count();
        let acc_exact = Rational64::new(hits as i64, n as i64);
        let acc = accuracy(&cm).unwrap();
        assert!((acc - rational_to_f64(acc_exact)).abs() < tol, "trial {trial}");

        let mut macro_p = Rational64::new(0, 1);
        let mut macro_r = Rational64::new(0, 1);
        let mut p_defined = 0i64;
        let mut r_defined = 0i64;
        for class in 0..c {
            let tp = actual
                .iter()
                .zip(&predicted)
                .filter(|(a, b)| **a == class as u32 && **b == class as u32)
                .count() as i64;
            let predicted_count =
                predicted.iter().filter(|&&p| p == class as u32).count() as i64;
            let actual_count = actual.iter().filter(|&&a| a == class as u32).count() as i64;
            let m = precision_recall_f1(&cm, class).unwrap();
            if predicted_count > 0 {
                let exact = Rational64::new(tp, predicted_count);
                assert!((m.precision - rational_to_f64(exact)).abs() < tol);
                macro_p += exact;
                p_defined += 1;
            } else {
                assert_eq!(m.precision, 0.0);
                assert!(!m.precision_defined);
            }
            if actual_count > 0 {
                let exact = Rational64::new(tp, actual_count);
                assert!((m.recall - rational_to_f64(exact)).abs() < tol);
                macro_r += exact;
                r_defined += 1;
            } else {
                assert_eq!(m.recall, 0.0);
                assert!(!m.recall_defined);
            }
        }
        let macros = macro_average(&cm).unwrap();
        if p_defined > 0 {
            let exact = macro_p / Rational64::new(p_defined, 1);
            assert!((macros.precision - rational_to_f64(exact)).abs() < tol, "trial {trial}");
        }
        if r_defined > 0 {
            let exact = macro_r / Rational64::new(r_defined, 1);
            assert!((macros.recall - rational_to_f64(exact)).abs() < tol, "trial {trial}");
        }
    }
    println!("ACCEPTANCE 8 PASS: accuracy/precision/recall agree with exact rationals on 20 tallies");
}

fn rational_to_f64(r: num_rational::Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[test]
fn criterion_09_saved_models_predict_bitwise_identically() {
    let _g = gate();
    let raw = gen_synthetic(240, 4, 3, 90, SyntheticShape::Blobs).unwrap();
    let normalizer = fit_normalizer(&raw);
    let train = apply_normalizer(&normalizer, &raw, false).unwrap();
    let targets = one_hot(train.labels(), 3).unwrap();
    let kernel = KernelParams::rbf(0.6).unwrap();
    let config = KelmConfig::new(kernel, 1.0).unwrap();

    let kinds: Vec<TrainedClassifier> = vec![
        TrainedClassifier::Mckelm(
            train_mckelm(&train, &PartitionConfig::new(2).unwrap(), &config, 3).unwrap(),
        ),
        TrainedClassifier::Kelm(train_kelm(&train, &targets, &config, 0).unwrap()),
        TrainedClassifier::Elm(train_elm(&train, &targets, 32, 1.0, 4).unwrap()),
        TrainedClassifier::Rkelm(train_rkelm(&train, &targets, kernel, 1.0, 4).unwrap()),
        TrainedClassifier::Knn(KnnModel::new(train.clone(), 3).unwrap()),
        TrainedClassifier::Gnb(train_gnb(&train).unwrap()),
    ];
    let queries = gen_synthetic(100, 4, 3, 91, SyntheticShape::Blobs).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for classifier in kinds {
        let name = classifier.kind_name();
        let model = ModelFile {
            classifier,
            normalizer: normalizer.clone(),
            selection: None,
            labels: LabelMap::identity(3),
        };
        let path = dir.path().join(format!("{name}.mckm"));
        model.save(&path).unwrap();
        let loaded = ModelFile::load(&path).unwrap();
        let a = model.predict(&queries, VoteMode::Majority).unwrap();
        let b = loaded.predict(&queries, VoteMode::Majority).unwrap();
        assert_eq!(a.internal, b.internal, "{name}");
        assert_eq!(a.labels, b.labels, "{name}");
    }
    println!("ACCEPTANCE 9 PASS: every classifier kind round-trips to bitwise-equal predictions");
}

#[test]
fn criterion_10_multicolumn_model_tops_the_baseline_ordering() {
    let _g = gate();
    let mut mck = Vec::new();
    let mut gnb = Vec::new();
    let mut elm = Vec::new();
    let mut nn1 = Vec::new();
    for seed in 1..=5u64 {
        let raw = gen_synthetic(1200, 2, 2, 9000 + seed, SyntheticShape::Rings).unwrap();
        let (raw_train, raw_test) = train_test_split(&raw, 0.25, seed).unwrap();
        let spec = fit_normalizer(&raw_train);
        let train = apply_normalizer(&spec, &raw_train, false).unwrap();
        let test = apply_normalizer(&spec, &raw_test, false).unwrap();
        let queries = test.features_f64();
        let targets = one_hot(train.labels(), 2).unwrap();

        let config = KelmConfig::new(KernelParams::rbf(10.0).unwrap(), 1.0).unwrap();
        let model =
            train_mckelm(&train, &PartitionConfig::new(2).unwrap(), &config, 3).unwrap();
        mck.push(label_accuracy(
            &model.predict_labels(queries.view()).unwrap(),
            test.labels(),
        ));

        let g = train_gnb(&train).unwrap();
        gnb.push(label_accuracy(&predict_gnb(&g, queries.view()).unwrap(), test.labels()));

        let hidden = default_hidden_count(train.n());
        let e = train_elm(&train, &targets, hidden, 1.0, seed).unwrap();
        elm.push(label_accuracy(&predict_elm(&e, queries.view()).unwrap(), test.labels()));

        nn1.push(label_accuracy(
            &knn_predict(&train, queries.view(), 1).unwrap(),
            test.labels(),
        ));
    }
    let med = |v: &[f64]| median3(v.to_vec());
    let (m, g, e, k) = (med(&mck), med(&gnb), med(&elm), med(&nn1));
    assert!(m >= g, "multicolumn {m} must be >= naive Bayes {g}");
    assert!(m >= e, "multicolumn {m} must be >= random-feature machine {e}");
    assert!(m >= k - 0.005, "multicolumn {m} must be within half a point of 1-NN {k}");
    println!(
        "ACCEPTANCE 10 PASS: medians — multicolumn {m:.4}, 1-NN {k:.4}, naive Bayes {g:.4}, random-feature {e:.4}"
    );
}
