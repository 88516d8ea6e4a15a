//! Acceptance suite: one test per criterion, each printing a pass line
//! (visible with `--nocapture`). Criteria 2–8 run fixed seeded
//! configurations through the verification entry points; criterion 9
//! re-runs every configuration and demands byte-identical JSON reports.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use mqmi::entropy::binary_entropy;
use mqmi::measures::{Evaluator, Partition};
use mqmi::states::StateSpec;
use mqmi::verify::{
    reproduce_witness, run_property_suite, scan_conjectures, SampleMix, SuiteConfig,
    ViolationReport,
};

const TABLE_TOL: f64 = 1e-4;
const FORMULA_TOL: f64 = 1e-9;

fn binom(n: usize, k: usize) -> f64 {
    let mut acc: u64 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u64 / (i as u64 + 1);
    }
    acc as f64
}

// --- shared report evaluation -----------------------------------------

fn cache() -> &'static Mutex<HashMap<String, String>> {
    static CACHE: OnceLock<Mutex<HashMap<String, String>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn fresh_report_json(config: &SuiteConfig, scan: bool) -> String {
    let report = if scan {
        scan_conjectures(config).expect("scan runs")
    } else {
        run_property_suite(config).expect("suite runs")
    };
    serde_json::to_string(&report).expect("report serializes")
}

/// First evaluation of a config is cached so criterion 9 can compare a
/// genuine re-run against it without tripling the suite's cost.
fn report_json(config: &SuiteConfig, scan: bool) -> String {
    let key = serde_json::to_string(&(scan, config)).unwrap();
    if let Some(hit) = cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let fresh = fresh_report_json(config, scan);
    cache()
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| fresh.clone());
    fresh
}

fn report_for(config: &SuiteConfig, scan: bool) -> ViolationReport {
    serde_json::from_str(&report_json(config, scan)).expect("report deserializes")
}

// --- criterion configurations ------------------------------------------

fn config_cross_forms(n: usize) -> SuiteConfig {
    SuiteConfig::new(n, 100, 9200 + n as u64)
        .with_mix(SampleMix::MixedOnly)
        .with_properties(&["cross_form_total", "cross_form_dual"])
}

fn config_identities(n: usize, samples: usize) -> SuiteConfig {
    SuiteConfig::new(n, samples, 9300 + n as u64).with_properties(&[
        "partition_identity",
        "recurrence_identities",
        "secret_sharing_identity",
        "tripartite_decompositions",
    ])
}

fn config_inequalities(n: usize) -> SuiteConfig {
    SuiteConfig::new(n, 200, 9400 + n as u64)
        .with_mix(SampleMix::MixedOnly)
        .with_properties(&[
            "entropy_inequalities",
            "semipositivity",
            "discard_monotonicity",
            "grouping_monotonicity",
            "gcmi_pair_positive",
            "p11_dual_bound",
        ])
}

fn config_pure_structure(n: usize) -> SuiteConfig {
    let mut names = vec![
        "pure_duality",
        "pure_total_equals_dual",
        "common_below_mk_pure",
    ];
    if n % 2 == 1 {
        names.push("odd_pure_common_vanishes");
    }
    SuiteConfig::new(n, 100, 9500 + n as u64)
        .with_mix(SampleMix::PureOnly)
        .with_properties(&names)
}

fn config_symmetry(n: usize) -> SuiteConfig {
    SuiteConfig::new(n, 50, 9600 + n as u64).with_properties(&[
        "block_permutation_symmetry",
        "local_unitary_invariance",
        "additivity",
        "entropy_invariance",
    ])
}

fn config_monotonicity(n: usize, channels: usize, broadcasts: usize) -> SuiteConfig {
    let mut config = SuiteConfig::new(n, 1, 9700 + n as u64).with_properties(&[
        "channel_monotone_total",
        "channel_monotone_dual",
        "broadcast_monotone_total",
        "broadcast_monotone_dual",
    ]);
    config.channel_samples = channels;
    config.broadcast_samples = broadcasts;
    config
}

fn config_scan(n: usize) -> SuiteConfig {
    let mut config = SuiteConfig::new(n, 200, 9800 + n as u64);
    config.channel_samples = 200;
    config
}

fn all_configs() -> Vec<(SuiteConfig, bool)> {
    let mut configs = vec![
        (config_cross_forms(3), false),
        (config_cross_forms(4), false),
        (config_identities(3, 100), false),
        (config_identities(4, 100), false),
        (config_identities(5, 20), false),
        (config_inequalities(3), false),
        (config_inequalities(4), false),
        (config_inequalities(5), false),
        (config_pure_structure(3), false),
        (config_pure_structure(4), false),
        (config_pure_structure(5), false),
        (config_symmetry(3), false),
        (config_symmetry(4), false),
        (config_monotonicity(3, 50, 30), false),
        (config_monotonicity(4, 50, 20), false),
    ];
    configs.push((config_scan(4), true));
    configs.push((config_scan(5), true));
    configs
}

fn assert_clean(report: &ViolationReport, context: &str) {
    assert!(
        report.passed,
        "{context}: {} failures\n{}",
        report.total_failures,
        report.to_text()
    );
    for check in &report.checks {
        assert!(check.trials > 0, "{context}: {} never ran", check.name);
    }
}

// --- criterion 1: benchmark table reproduction --------------------------

struct TableRow {
    label: &'static str,
    spec: StateSpec,
    expected_m: Vec<f64>,
    expected_c: f64,
}

fn printed_rows() -> Vec<TableRow> {
    vec![
        TableRow {
            label: "D_3^1",
            spec: StateSpec::dicke(3, 1),
            expected_m: vec![2.75489, 2.75489, 0.0],
            expected_c: 0.0,
        },
        TableRow {
            label: "psi_as",
            spec: StateSpec::antisym3(),
            expected_m: vec![4.75489, 4.75489, 0.0],
            expected_c: 0.0,
        },
        TableRow {
            label: "D_4^1",
            spec: StateSpec::dicke(4, 1),
            expected_m: vec![3.24511, 6.0, 3.24511, 0.0],
            expected_c: 0.490225,
        },
        TableRow {
            label: "D_4^2",
            spec: StateSpec::dicke(4, 2),
            expected_m: vec![4.0, 7.50978, 4.0, 0.0],
            expected_c: 0.490225,
        },
        TableRow {
            label: "C_4",
            spec: StateSpec::cluster4(),
            expected_m: vec![4.0, 10.0, 4.0, 0.0],
            expected_c: -2.0,
        },
        TableRow {
            label: "HS_4",
            spec: StateSpec::hs4(),
            expected_m: vec![4.0, 10.75489, 4.0, 0.0],
            expected_c: -2.75489,
        },
        TableRow {
            label: "D_5^1",
            spec: StateSpec::dicke(5, 1),
            expected_m: vec![3.60964, 9.70951, 9.70951, 3.60964, 0.0],
            expected_c: 0.0,
        },
        TableRow {
            label: "D_5^2",
            spec: StateSpec::dicke(5, 2),
            expected_m: vec![4.85475, 12.95462, 12.95462, 4.85475, 0.0],
            expected_c: 0.0,
        },
    ]
}

#[test]
fn criterion_1_table_reproduction() {
    let started = Instant::now();

    for row in printed_rows() {
        let state = row.spec.build().unwrap();
        let n = state.n_parties();
        let ev = Evaluator::new(&state).unwrap();
        let parts = Partition::singletons(n);
        let profile = ev.mqmi_profile(&parts).unwrap();
        for (k, expected) in row.expected_m.iter().enumerate() {
            assert!(
                (profile[k] - expected).abs() <= TABLE_TOL,
                "{} M_{}: {} vs printed {}",
                row.label,
                k + 1,
                profile[k],
                expected
            );
        }
        let c = ev.common_information(&parts).unwrap();
        assert!(
            (c - row.expected_c).abs() <= TABLE_TOL,
            "{} C: {c} vs printed {}",
            row.label,
            row.expected_c
        );
    }

    // generalized GHZ rows against the closed binomial form
    for p in [0.5, 0.3] {
        let h = binary_entropy(p).unwrap();
        for n in 2..=5usize {
            let state = StateSpec::ggz(n, p, 0.0).build().unwrap();
            let ev = Evaluator::new(&state).unwrap();
            let parts = Partition::singletons(n);
            let profile = ev.mqmi_profile(&parts).unwrap();
            for k in 1..=n {
                let expected = if k == n { 0.0 } else { binom(n, k) * h };
                assert!(
                    (profile[k - 1] - expected).abs() <= FORMULA_TOL,
                    "gGHZ_{n} p={p} M_{k}: {} vs {expected}",
                    profile[k - 1]
                );
            }
            let expected_c = match n {
                2 | 4 => 2.0 * h,
                _ => 0.0,
            };
            let c = ev.common_information(&parts).unwrap();
            assert!(
                (c - expected_c).abs() <= FORMULA_TOL,
                "gGHZ_{n} p={p} C: {c} vs {expected_c}"
            );
        }
    }

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "table reproduction took {elapsed:?}"
    );
    println!("criterion 1 (benchmark table reproduction): PASS in {elapsed:?}");
}

// --- criterion 2: cross-form equivalence --------------------------------

#[test]
fn criterion_2_cross_form_equivalence() {
    for n in [3, 4] {
        let report = report_for(&config_cross_forms(n), false);
        assert_clean(&report, &format!("cross forms at n = {n}"));
        assert_eq!(report.check("cross_form_total").unwrap().trials, 100);
        assert_eq!(report.check("cross_form_dual").unwrap().trials, 100);
    }
    println!("criterion 2 (four total and four dual forms agree within 1e-8): PASS");
}

// --- criterion 3: identity suite ----------------------------------------

#[test]
fn criterion_3_identity_suite() {
    for (n, samples) in [(3, 100), (4, 100), (5, 20)] {
        let report = report_for(&config_identities(n, samples), false);
        assert_clean(&report, &format!("identities at n = {n}"));
    }
    println!("criterion 3 (partition/tripartite/leakage/recurrence identities <= 1e-8): PASS");
}

// --- criterion 4: inequality suite ---------------------------------------

#[test]
fn criterion_4_inequality_suite() {
    for n in [3, 4, 5] {
        let report = report_for(&config_inequalities(n), false);
        assert_clean(&report, &format!("inequalities at n = {n}"));
        assert_eq!(report.check("semipositivity").unwrap().failures, 0);
    }
    println!("criterion 4 (proven inequalities on 200 mixed states per n, zero failures): PASS");
}

// --- criterion 5: pure-state structure -----------------------------------

#[test]
fn criterion_5_pure_state_structure() {
    for n in [3, 4, 5] {
        let report = report_for(&config_pure_structure(n), false);
        assert_clean(&report, &format!("pure structure at n = {n}"));
        if n % 2 == 1 {
            assert_eq!(
                report.check("odd_pure_common_vanishes").unwrap().failures,
                0
            );
        }
    }
    println!("criterion 5 (pure duality, T = S, odd-n common vanishing, C <= M_k): PASS");
}

// --- criterion 6: symmetry and invariance --------------------------------

#[test]
fn criterion_6_symmetry_invariance() {
    for n in [3, 4] {
        let report = report_for(&config_symmetry(n), false);
        assert_clean(&report, &format!("symmetry at n = {n}"));
        for name in [
            "block_permutation_symmetry",
            "local_unitary_invariance",
            "additivity",
        ] {
            assert_eq!(report.check(name).unwrap().trials, 50, "{name} trials");
        }
    }
    println!("criterion 6 (block symmetry exact, local-unitary invariance, additivity): PASS");
}

// --- criterion 7: monotonicity under operations ---------------------------

#[test]
fn criterion_7_operation_monotonicity() {
    let mut channels = 0;
    let mut broadcasts = 0;
    for (n, ch, bc) in [(3, 50, 30), (4, 50, 20)] {
        let report = report_for(&config_monotonicity(n, ch, bc), false);
        assert_clean(&report, &format!("monotonicity at n = {n}"));
        channels += report.check("channel_monotone_total").unwrap().trials;
        broadcasts += report.check("broadcast_monotone_total").unwrap().trials;
    }
    assert_eq!(channels, 100, "random channel events");
    assert_eq!(broadcasts, 50, "measure-and-broadcast events");
    println!("criterion 7 (T and S nonincreasing under 100 channels + 50 broadcasts): PASS");
}

// --- criterion 8: conjecture scans ----------------------------------------

#[test]
fn criterion_8_conjecture_scans() {
    for n in [4, 5] {
        let report = report_for(&config_scan(n), true);
        // scans complete and never fail the build
        assert!(report.passed);
        // every check emits a reproducible witness spec
        for check in &report.checks {
            if check.trials == 0 {
                continue;
            }
            let worst = check
                .worst
                .as_ref()
                .unwrap_or_else(|| panic!("{} has no witness", check.name));
            let reproduced = reproduce_witness(worst).unwrap();
            assert!(
                (reproduced - worst.residual).abs() <= 1e-10,
                "{}: reproduced {reproduced} vs recorded {}",
                check.name,
                worst.residual
            );
        }
        // proven control cases inside the same scan
        assert_eq!(report.check("channel_delta_k1").unwrap().failures, 0);
        assert_eq!(
            report
                .check(&format!("channel_delta_k{}", n - 1))
                .unwrap()
                .failures,
            0
        );
        if n == 4 {
            let neg = report.check("common_negativity").unwrap();
            let cluster = neg
                .witnesses
                .iter()
                .chain(neg.worst.iter())
                .any(|w| (w.residual + 2.0).abs() < 1e-6);
            assert!(cluster, "cluster-state witness with C = -2 not recorded");
        }
    }
    println!("criterion 8 (ordering/ratio/interior-k scans with witnesses, controls clean): PASS");
}

// --- criterion 9: determinism ---------------------------------------------

#[test]
fn criterion_9_deterministic_reports() {
    for (config, scan) in all_configs() {
        let first = report_json(&config, scan);
        let second = fresh_report_json(&config, scan);
        assert_eq!(
            first, second,
            "re-run of {} n = {} diverged",
            if scan { "scan" } else { "suite" },
            config.n
        );
    }
    println!("criterion 9 (byte-identical JSON reports on re-run): PASS");
}
