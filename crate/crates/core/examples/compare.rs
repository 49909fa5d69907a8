//! Runs the ten-verb synthetic benchmark for a range of seeds and prints
//! the precision and PM curve areas of both strategies.
//!
//!     cargo run --release -p verbsense --example compare -- 5 0.5
//!
//! `SPEC_PATCH='{"word_skew": 1.5}'` overrides generator fields.

use std::sync::Arc;
use std::time::Instant;

use verbsense::eval::{run_experiment, ExperimentConfig, Metric};
use verbsense::synth::{generate_synthetic, GeneratorSpec};
use verbsense::Strategy;

fn main() {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map_or(5, |s| s.parse().unwrap());
    let overlap: f64 = args.next().map_or(0.5, |s| s.parse().unwrap());
    let first: u64 = args.next().map_or(0, |s| s.parse().unwrap());
    let (mut wins_p, mut wins_pm) = (0, 0);
    let start = Instant::now();
    for seed in first..first + seeds {
        let mut spec = GeneratorSpec::ten_verb_benchmark(seed);
        spec.overlap = overlap;
        if let Ok(patch) = std::env::var("SPEC_PATCH") {
            let mut value = serde_json::to_value(&spec).unwrap();
            let patch: serde_json::Value = serde_json::from_str(&patch).unwrap();
            for (k, v) in patch.as_object().unwrap() {
                value[k] = v.clone();
            }
            spec = serde_json::from_value(value).unwrap();
        }
        let data = generate_synthetic(&spec).unwrap();
        let config = ExperimentConfig {
            rng_seed: seed,
            ..ExperimentConfig::default()
        };
        let t = Instant::now();
        let report = run_experiment(&data.corpus, Arc::new(data.thesaurus), &data.seeds, &config).unwrap();
        let up = report.mean_area(Strategy::Utility, Metric::Precision);
        let rp = report.mean_area(Strategy::Random, Metric::Precision);
        let upm = report.mean_area(Strategy::Utility, Metric::Pm);
        let rpm = report.mean_area(Strategy::Random, Metric::Pm);
        wins_p += usize::from(up >= rp);
        wins_pm += usize::from(upm >= rpm);
        let first = report.rows_for(Strategy::Random, 0).next().unwrap().precision;
        let last = report.final_row(Strategy::Random, 0).unwrap().precision;
        println!(
            "seed {seed:2}: precision area utility {up:.4} random {rp:.4} | pm area utility {upm:.4} random {rpm:.4} | fold0 {first:.3}->{last:.3} lb {:.3} ({:.1?})",
            report.summary().lower_bound,
            t.elapsed()
        );
    }
    println!(
        "utility >= random: precision {wins_p}/{seeds}, pm {wins_pm}/{seeds} in {:.1?}",
        start.elapsed()
    );
}
