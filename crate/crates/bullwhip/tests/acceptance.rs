//! Acceptance checklist: one test per shipped guarantee, each ending in a
//! single `criterion N (...): PASS` line (visible with `--nocapture`).
//!
//! Randomized suites draw from a local generator so they stay independent
//! of the crate's own RNG, and use fixed seeds so every run checks the
//! same cases.

use std::time::Instant;

use bullwhip::{
    aggregated_bullwhip, classify_aggregation_effect, classify_seasonality, decompose_variance,
    eigen_bounds, run_simulation, seasonality_effect, sha256_hex, symmetric_eigenvalues,
    weighted_average_ratio, AggregationEffect, CovariancePair, SeasonalRelation, Series, SimConfig,
    SquareMatrix, STRICT_MAINTAIN_EPS,
};

fn pass(number: usize, name: &str) {
    println!("criterion {number} ({name}): PASS");
}

/// splitmix64-based test generator, independent of the library's RNG.
struct TestRng(u64);

impl TestRng {
    fn new(seed: u64) -> Self {
        TestRng(seed)
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    fn index(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    fn normal(&mut self) -> f64 {
        let mut u1 = self.unit();
        while u1 == 0.0 {
            u1 = self.unit();
        }
        let u2 = self.unit();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// Random series with a scale-varied offset and spread.
fn random_series(rng: &mut TestRng, len: usize) -> Series {
    let offset = rng.range(-1000.0, 1000.0);
    let spread = 10f64.powf(rng.range(-2.0, 2.0));
    let values: Vec<f64> = (0..len)
        .map(|_| offset + spread * rng.range(-1.0, 1.0))
        .collect();
    Series::new(values).expect("finite by construction")
}

const SIX_PERIOD_DEMAND: [f64; 6] = [9.0, 5.0, 8.0, 6.0, 7.0, 9.0];
const SIX_PERIOD_ORDERS: [f64; 6] = [9.0, 5.0, 8.0, 6.0, 7.0, 10.0];
const TWELVE_PERIOD_ORDERS: [f64; 12] = [
    8.0, 7.0, 9.0, 5.0, 10.0, 10.0, 10.0, 5.0, 9.0, 7.0, 5.0, 9.0,
];
const TWELVE_PERIOD_DEMAND: [f64; 12] =
    [9.0, 8.0, 5.0, 9.0, 9.0, 8.0, 10.0, 8.0, 8.0, 10.0, 5.0, 9.0];

#[test]
fn criterion_01_reference_variance_split() {
    let series = Series::from_slice(&SIX_PERIOD_DEMAND).unwrap();
    let total = 20.0 / 9.0;
    // (k, within, between) as exact rationals.
    let cells: [(usize, f64, f64); 4] = [
        (1, 0.0, total),
        (2, 2.0, 2.0 / 9.0),
        (3, total, 0.0),
        (6, total, 0.0),
    ];

    let started = Instant::now();
    let results: Vec<_> = cells
        .iter()
        .map(|&(k, _, _)| decompose_variance(&series, k).unwrap())
        .collect();
    let elapsed = started.elapsed();

    for (&(k, within, between), d) in cells.iter().zip(&results) {
        let tol = |want: f64| 1e-9 * want.abs().max(1.0);
        assert!(
            (d.within - within).abs() <= tol(within),
            "k={k} within: {} vs {within}",
            d.within
        );
        assert!(
            (d.between - between).abs() <= tol(between),
            "k={k} between: {} vs {between}",
            d.between
        );
        assert!((d.total - total).abs() <= tol(total), "k={k} total");
        // Two-decimal rendering matches the published cells.
        let rounded = (format!("{:.2}", d.within), format!("{:.2}", d.between));
        let published = match k {
            1 => ("0.00", "2.22"),
            2 => ("2.00", "0.22"),
            _ => ("2.22", "0.00"),
        };
        assert_eq!(
            (rounded.0.as_str(), rounded.1.as_str()),
            published,
            "k={k} cells"
        );
    }

    // Per-subset cells.
    let k2 = &results[1];
    assert_eq!(k2.subset_variances, vec![4.0, 1.0, 1.0]);
    assert_eq!(k2.subset_means, vec![7.0, 7.0, 8.0]);
    let k3 = &results[2];
    assert!((k3.subset_variances[0] - 26.0 / 9.0).abs() <= 1e-9);
    assert!((k3.subset_variances[1] - 14.0 / 9.0).abs() <= 1e-9);
    assert!((k3.subset_means[0] - 22.0 / 3.0).abs() <= 1e-9);
    assert!((k3.subset_means[1] - 22.0 / 3.0).abs() <= 1e-9);

    assert!(
        elapsed.as_micros() < 1000,
        "reference decomposition took {elapsed:?}, budget 1 ms"
    );
    pass(1, "reference variance split");
}

#[test]
fn criterion_02_reference_aggregated_variances() {
    let series = Series::from_slice(&SIX_PERIOD_ORDERS).unwrap();
    let cases: [(usize, f64, f64); 2] = [(2, 2.0, 0.5), (3, 0.25, 1.0 / 36.0)];
    for (k, agg_var, means_var) in cases {
        let agg = bullwhip::aggregate_series(&series, k).unwrap();
        let got_agg = agg.population_variance();
        assert!(
            (got_agg - agg_var).abs() <= 1e-9,
            "k={k} aggregated variance {got_agg} vs {agg_var}"
        );
        let between = decompose_variance(&series, k).unwrap().between;
        assert!(
            (between - means_var).abs() <= 1e-9,
            "k={k} subset-mean variance {between} vs {means_var}"
        );
        // Square law, tight tolerance.
        let rhs = (k * k) as f64 * between;
        assert!(
            (got_agg - rhs).abs() <= 1e-12 * rhs.abs().max(1.0),
            "k={k} square law: {got_agg} vs {rhs}"
        );
    }
    pass(2, "reference aggregated variances");
}

#[test]
fn criterion_03_reference_ratio_trichotomy() {
    let orders = Series::from_slice(&TWELVE_PERIOD_ORDERS).unwrap();
    let demand = Series::from_slice(&TWELVE_PERIOD_DEMAND).unwrap();

    let r = bullwhip::bullwhip_ratio(&orders, &demand).unwrap();
    assert_eq!(format!("{r:.2}"), "1.47");

    let cases: [(usize, &str, &str, Option<AggregationEffect>); 3] = [
        (2, "1.48", "1.46", None),
        (3, "1.56", "0.82", Some(AggregationEffect::Decrease)),
        (4, "1.40", "2.38", Some(AggregationEffect::Increase)),
    ];
    for (k, within_cell, avg_cell, effect) in cases {
        let report = classify_aggregation_effect(&orders, &demand, k, STRICT_MAINTAIN_EPS).unwrap();
        assert_eq!(
            format!("{:.2}", report.r_within),
            within_cell,
            "k={k} R_within"
        );
        assert_eq!(format!("{:.2}", report.r_avg), avg_cell, "k={k} R_avg");
        // The aggregated ratio equals the between-components ratio.
        let rel = (report.r_agg - report.r_avg).abs() / report.r_agg.abs().max(report.r_avg.abs());
        assert!(rel <= 1e-9, "k={k} R_agg vs R_avg relative gap {rel}");
        // Sign relation between level comparison and ratio movement.
        let level = report.r_avg - report.r_within;
        let movement = report.r_agg - report.r_non_agg;
        assert!(level * movement > 0.0, "k={k} sign relation");
        if let Some(want) = effect {
            assert_eq!(report.effect, want, "k={k} effect");
        }
    }
    pass(3, "reference ratio trichotomy");
}

#[test]
fn criterion_04_variance_split_randomized() {
    let mut rng = TestRng::new(0x04AC_CE97);
    let started = Instant::now();
    for case in 0..10_000 {
        let len = 2 + rng.index(119); // 2..=120
        let series = random_series(&mut rng, len);
        let divisors: Vec<usize> = (1..=len).filter(|k| len.is_multiple_of(*k)).collect();
        let k = divisors[rng.index(divisors.len())];
        let d = decompose_variance(&series, k).unwrap();
        let gap = (d.total - d.within - d.between).abs();
        assert!(
            gap <= 1e-9 * d.total.max(1.0),
            "case {case}: len {len} k {k} gap {gap} total {}",
            d.total
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "10,000 cases took {elapsed:?}, budget 5 s"
    );
    pass(4, "variance split law, randomized");
}

/// Random series whose offset is bounded relative to its spread. Ratio
/// identities hold exactly in real arithmetic but their floating-point
/// realization degrades with the mean-to-spread ratio; a bound of 100 keeps
/// cancellation noise orders of magnitude below the 1e-9 tolerance while
/// still varying the scale over four decades.
fn conditioned_series(rng: &mut TestRng, len: usize) -> Series {
    let spread = 10f64.powf(rng.range(-2.0, 2.0));
    let offset = spread * rng.range(-100.0, 100.0);
    let values: Vec<f64> = (0..len)
        .map(|_| offset + spread * rng.range(-1.0, 1.0))
        .collect();
    Series::new(values).expect("finite by construction")
}

/// Random (orders, demand, k) with at least two subsets of at least two
/// periods, so every ratio in the comparison is defined.
fn random_pair(rng: &mut TestRng) -> (Series, Series, usize) {
    let k = 2 + rng.index(9); // 2..=10
    let subsets = 2 + rng.index(11); // 2..=12
    let len = k * subsets;
    (
        conditioned_series(rng, len),
        conditioned_series(rng, len),
        k,
    )
}

#[test]
fn criterion_05_aggregated_ratio_identity_randomized() {
    let mut rng = TestRng::new(0x05AC_CE97);
    for case in 0..10_000 {
        let (orders, demand, k) = random_pair(&mut rng);
        let report = classify_aggregation_effect(&orders, &demand, k, STRICT_MAINTAIN_EPS).unwrap();
        // r_agg from the summed series itself, independently of the report.
        let direct = aggregated_bullwhip(&orders, &demand, k).unwrap();
        for (name, got) in [("report", report.r_agg), ("direct", direct)] {
            let gap = (got - report.r_avg).abs();
            let tol = 1e-9 * got.abs().max(report.r_avg.abs());
            assert!(
                gap <= tol,
                "case {case} ({name}): r_agg {got} vs r_avg {} gap {gap}",
                report.r_avg
            );
        }
    }
    pass(5, "aggregated ratio identity, randomized");
}

#[test]
fn criterion_06_trichotomy_and_betweenness_randomized() {
    let mut rng = TestRng::new(0x06AC_CE97);
    for case in 0..10_000 {
        let (orders, demand, k) = random_pair(&mut rng);
        let r = classify_aggregation_effect(&orders, &demand, k, STRICT_MAINTAIN_EPS).unwrap();

        // Trichotomy: the level comparison decides the ratio movement. A
        // numerically tied comparison cannot demand a sign, so require the
        // movement to be tied as well.
        let level = r.r_avg - r.r_within;
        let movement = r.r_agg - r.r_non_agg;
        let tie_tol = 1e-9 * r.r_avg.abs().max(r.r_within.abs()).max(1.0);
        if level.abs() > tie_tol {
            assert!(
                level * movement > 0.0,
                "case {case}: level diff {level}, movement {movement}"
            );
        } else {
            assert!(
                movement.abs() <= 2.0 * tie_tol,
                "case {case}: tied levels but movement {movement}"
            );
        }

        // Betweenness: the plain ratio is a weighted mediant of the two
        // level ratios.
        let lo = r.r_within.min(r.r_avg);
        let hi = r.r_within.max(r.r_avg);
        let slack = 1e-9 * r.r_non_agg.abs().max(1.0);
        assert!(
            r.r_non_agg >= lo - slack && r.r_non_agg <= hi + slack,
            "case {case}: r_non_agg {} outside [{lo}, {hi}]",
            r.r_non_agg
        );
    }
    pass(6, "trichotomy and betweenness, randomized");
}

#[test]
fn criterion_07_pooled_ratio_weights_randomized() {
    let mut rng = TestRng::new(0x07AC_CE97);
    for case in 0..1_000 {
        let n = 1 + rng.index(10); // 1..=10
        let mut demand_vars = Vec::with_capacity(n);
        let mut order_vars = Vec::with_capacity(n);
        let mut ratios = Vec::with_capacity(n);
        for _ in 0..n {
            let var_d = 10f64.powf(rng.range(-3.0, 3.0));
            let ratio = 10f64.powf(rng.range(-1.3, 1.3));
            demand_vars.push(var_d);
            order_vars.push(ratio * var_d);
            ratios.push(ratio);
        }
        let result = weighted_average_ratio(&order_vars, &demand_vars).unwrap();
        let direct = order_vars.iter().sum::<f64>() / demand_vars.iter().sum::<f64>();
        let gap = (result.weighted_ratio - direct).abs();
        assert!(
            gap <= 1e-12 * direct.abs().max(result.weighted_ratio.abs()),
            "case {case}: weighted {} vs sum ratio {direct}",
            result.weighted_ratio
        );
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let slack = 1e-12 * hi.max(1.0);
        assert!(
            result.weighted_ratio >= lo - slack && result.weighted_ratio <= hi + slack,
            "case {case}: weighted {} outside [{lo}, {hi}]",
            result.weighted_ratio
        );
    }
    pass(7, "pooled ratio weights, randomized");
}

/// Product of a random square factor with itself, with a diagonal shift on
/// the factor so it stays well conditioned and the determinant comparison
/// below is meaningful.
fn random_psd(rng: &mut TestRng, n: usize) -> SquareMatrix {
    let shift = 2.0 * (n as f64).sqrt();
    let scale = 10f64.powf(rng.range(-1.0, 1.0));
    let mut factor = vec![vec![0.0_f64; n]; n];
    for (i, row) in factor.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = rng.range(-1.0, 1.0) + if i == j { shift } else { 0.0 };
        }
    }
    let mut sigma = SquareMatrix::zeros(n).unwrap();
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for row in &factor {
                acc += row[i] * row[j];
            }
            sigma.set(i, j, acc * scale);
        }
    }
    sigma
}

/// LU determinant with partial pivoting; independent of the eigensolver.
fn determinant(m: &SquareMatrix) -> f64 {
    let n = m.order();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j)).collect())
        .collect();
    let mut det = 1.0_f64;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        if a[pivot_row][col] == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            let (pivot_part, rest) = a.split_at_mut(row);
            let pivot = &pivot_part[col][col..];
            for (x, p) in rest[0][col..].iter_mut().zip(pivot) {
                *x -= factor * p;
            }
        }
    }
    det
}

#[test]
fn criterion_08_covariance_eigen_bounds_randomized() {
    let mut rng = TestRng::new(0x08AC_CE97);
    for case in 0..1_000 {
        let n = 2 + rng.index(7); // 2..=8
        let sigma_o = random_psd(&mut rng, n);
        let sigma_d = random_psd(&mut rng, n);

        // Eigensolver oracles on both matrices.
        let mut spectra = Vec::new();
        for sigma in [&sigma_o, &sigma_d] {
            let eig = symmetric_eigenvalues(sigma).unwrap();
            let trace_gap = (eig.iter().sum::<f64>() - sigma.trace()).abs();
            assert!(
                trace_gap <= 1e-8 * sigma.trace().abs().max(1e-300),
                "case {case}: trace gap {trace_gap}"
            );
            let product: f64 = eig.iter().product();
            let det = determinant(sigma);
            assert!(
                (product - det).abs() <= 1e-8 * det.abs().max(1e-300),
                "case {case}: eigen product {product} vs determinant {det}"
            );
            spectra.push(eig);
        }

        // Pooled-ratio containment.
        let q = sigma_o.entry_sum() / sigma_d.entry_sum();
        let pair = CovariancePair {
            orders: sigma_o,
            demand: sigma_d,
            orders_eigenvalues: spectra[0].clone(),
            demand_eigenvalues: spectra[1].clone(),
        };
        let bounds = eigen_bounds(&pair).unwrap();
        let slack = 1e-9 * q.abs().max(1.0);
        assert!(
            q >= bounds.lower - slack,
            "case {case}: q {q} below {}",
            bounds.lower
        );
        let upper = bounds
            .upper
            .expect("conditioned demand covariance is positive definite");
        assert!(q <= upper + slack, "case {case}: q {q} above {upper}");
    }
    pass(8, "covariance eigen bounds, randomized");
}

#[test]
fn criterion_09_seasonal_pull_toward_one() {
    // Grid: the implied full-series ratio sits between the adjusted ratio
    // and 1 and moves monotonically toward 1 as seasonal variance grows.
    for r_adjusted in [0.25, 0.5, 2.0, 4.0] {
        let mut prev = seasonality_effect(r_adjusted, 0.0, 1.0).unwrap();
        assert!((prev - r_adjusted).abs() <= 1e-12);
        for step in 1..=100 {
            let var_seasonal = step as f64 * 0.08;
            let effect = seasonality_effect(r_adjusted, var_seasonal, 1.0).unwrap();
            let lo = r_adjusted.min(1.0);
            let hi = r_adjusted.max(1.0);
            assert!(
                effect >= lo - 1e-12 && effect <= hi + 1e-12,
                "r {r_adjusted} var_s {var_seasonal}: effect {effect} outside [{lo}, {hi}]"
            );
            if r_adjusted > 1.0 {
                assert!(
                    effect < prev,
                    "r {r_adjusted}: not decreasing at {var_seasonal}"
                );
            } else {
                assert!(
                    effect > prev,
                    "r {r_adjusted}: not increasing at {var_seasonal}"
                );
            }
            prev = effect;
        }
    }

    // Inject-and-recover: synthetic pairs with a known shared pattern and
    // a known amplification land in the expected relation branch.
    let mut rng = TestRng::new(0x09AC_CE97);
    let trials = 1_000;
    let mut correct = 0;
    for trial in 0..trials {
        let period = [4usize, 6, 12][trial % 3];
        let amplitude = rng.range(0.5, 4.5);
        let gain = if trial % 2 == 0 { 1.6 } else { 0.6 };
        let expected = if gain > 1.0 {
            SeasonalRelation::TowardOneFromAbove
        } else {
            SeasonalRelation::TowardOneFromBelow
        };
        let mut pattern: Vec<f64> = (0..period)
            .map(|_| rng.range(-1.0, 1.0) * amplitude)
            .collect();
        let mean = pattern.iter().sum::<f64>() / period as f64;
        for v in &mut pattern {
            *v -= mean;
        }
        let len = 240;
        let mut demand = Vec::with_capacity(len);
        let mut orders = Vec::with_capacity(len);
        for t in 0..len {
            let s = pattern[t % period];
            demand.push(10.0 + rng.normal() + s);
            orders.push(10.0 + gain * rng.normal() + s);
        }
        let demand = Series::new(demand).unwrap();
        let orders = Series::new(orders).unwrap();
        if let Ok(report) = classify_seasonality(&orders, &demand, period, true) {
            if report.relation == expected {
                correct += 1;
            }
        }
    }
    assert!(
        correct >= 990,
        "relation branch recovered in only {correct} of {trials} trials"
    );
    pass(9, "seasonal pull toward one");
}

// Frozen snapshot of the fixed-seed run checked below: first eight demand
// and order values bit for bit, plus a digest of both full series.
const SNAPSHOT_DEMAND_HEAD: [u64; 8] = [
    0x40305432d7d07a9e,
    0x402e8f9876a971a0,
    0x402c9db5981ea9c4,
    0x403040ec6087a6a7,
    0x402d50647dca35f5,
    0x402e176b72b3ac51,
    0x4031c4f88850b5be,
    0x40350c67840a2c45,
];
const SNAPSHOT_ORDERS_HEAD: [u64; 8] = [
    0x40305432d7d07a9e,
    0x402e8f9876a971a0,
    0x402c9db5981ea9c4,
    0x403040ec6087a6a7,
    0x402ace6398692680,
    0x402dbd49afbb5850,
    0x40345d8ed581be64,
    0x4038a503deac107e,
];
const SNAPSHOT_SHA256: &str = "9b2d4147b93e35a4ced65a3d0d4d8eb02ae77cba255000b20325ba50da294c99";

fn snapshot_config() -> SimConfig {
    SimConfig {
        horizon: 400,
        phi: 0.7,
        mu: 20.0,
        sigma: 2.0,
        forecast_window: 4,
        lead_time: 2,
        seed: 20_260_822,
        ..SimConfig::default()
    }
}

fn series_digest(demand: &Series, orders: &Series) -> String {
    let mut bytes = Vec::with_capacity(8 * (demand.len() + orders.len()));
    for v in demand.values().iter().chain(orders.values()) {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    sha256_hex(&bytes)
}

#[test]
fn criterion_10_simulator_regression() {
    let config = snapshot_config();
    let run = run_simulation(&config).unwrap();
    let again = run_simulation(&config).unwrap();

    // Identical across invocations, bit for bit.
    assert_eq!(run.demand, again.demand);
    assert_eq!(run.orders, again.orders);
    assert_eq!(run.ratio.to_bits(), again.ratio.to_bits());

    assert!(
        run.ratio > 1.0,
        "amplification expected, ratio {}",
        run.ratio
    );

    // Conservation: total orders differ from total demand exactly by the
    // movement of the base-stock level over the run.
    let d = run.demand.values();
    let fw = config.forecast_window;
    let base_at = |t: usize| -> f64 {
        let window = &d[t + 1 - fw..=t];
        (config.lead_time + 1) as f64 * (window.iter().sum::<f64>() / fw as f64)
    };
    let sum_orders: f64 = run.orders.values().iter().sum();
    let sum_demand: f64 = d.iter().sum();
    let movement = base_at(d.len() - 1) - base_at(fw - 1);
    let gap = ((sum_orders - sum_demand) - movement).abs();
    assert!(
        gap <= 1e-9 * sum_orders.abs().max(1.0),
        "conservation gap {gap}"
    );

    // Frozen snapshot. The constants above pin the exact output of this
    // configuration; on drift, print the observed values so a legitimate
    // change (none is expected) can be re-frozen from the failure output.
    let head_bits =
        |s: &Series| -> Vec<u64> { s.values().iter().take(8).map(|v| v.to_bits()).collect() };
    let digest = series_digest(&run.demand, &run.orders);
    let drifted = digest != SNAPSHOT_SHA256
        || head_bits(&run.demand) != SNAPSHOT_DEMAND_HEAD
        || head_bits(&run.orders) != SNAPSHOT_ORDERS_HEAD;
    if drifted {
        let render = |bits: &[u64]| {
            bits.iter()
                .map(|b| format!("0x{b:016x}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        println!(
            "const SNAPSHOT_DEMAND_HEAD: [u64; 8] = [{}];",
            render(&head_bits(&run.demand))
        );
        println!(
            "const SNAPSHOT_ORDERS_HEAD: [u64; 8] = [{}];",
            render(&head_bits(&run.orders))
        );
        println!("const SNAPSHOT_SHA256: &str = \"{digest}\";");
    }

    for (i, v) in run.demand.values().iter().take(8).enumerate() {
        assert_eq!(
            v.to_bits(),
            SNAPSHOT_DEMAND_HEAD[i],
            "demand[{i}] drifted from the frozen snapshot"
        );
    }
    for (i, v) in run.orders.values().iter().take(8).enumerate() {
        assert_eq!(
            v.to_bits(),
            SNAPSHOT_ORDERS_HEAD[i],
            "orders[{i}] drifted from the frozen snapshot"
        );
    }
    assert_eq!(digest, SNAPSHOT_SHA256, "series digest drifted");
    pass(10, "simulator regression");
}
