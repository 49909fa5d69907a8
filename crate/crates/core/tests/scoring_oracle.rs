mod common;

use common::{oracle_ccd_base, oracle_rank, random_instance, OracleSim};
use verbsense::disambiguator::{ccd, ccd_base, max_sim, CaseWeights};
use verbsense::{score_senses, Database, FillerSet, SenseEntry, SentenceExample, Thesaurus, Weighting};

fn assert_matches_oracle(osim: &OracleSim, t: &Thesaurus, db: &Database, x: &SentenceExample, w: Weighting) {
    let (want, want_mismatch) = oracle_rank(osim, db, x, w);
    let got = score_senses(x, db, t, w).unwrap();
    assert_eq!(got.frame_mismatch, want_mismatch, "{x:?}");
    assert_eq!(got.interpretations.len(), want.len());
    for (g, (id, score)) in got.interpretations.iter().zip(&want) {
        assert!((g.score - score).abs() < 1e-12, "{x:?}: {} vs {score}", g.score);
        // equal scores may legitimately appear in either order only if tied
        if g.sense_id != *id {
            let other = want.iter().find(|(i, _)| *i == g.sense_id).unwrap();
            assert!((other.1 - score).abs() < 1e-12);
        }
    }
}

#[test]
fn rankings_match_straight_line_scorer() {
    for seed in 0..12 {
        let (t, db, corpus) = random_instance(seed, 30);
        let osim = OracleSim::new(&t);
        for w in [
            Weighting::ArgmaxOnly,
            Weighting::Power { alpha: 0.0 },
            Weighting::Power { alpha: 1.0 },
            Weighting::Power { alpha: 3.5 },
        ] {
            for x in &corpus {
                assert_matches_oracle(&osim, &t, &db, x, w);
            }
        }
    }
}

#[test]
fn ccd_matches_oracle() {
    for seed in 0..12 {
        let (t, db, _) = random_instance(seed, 10);
        let osim = OracleSim::new(&t);
        for verb in db.verbs() {
            for case in ["ga", "o", "ni", "de"] {
                let got = ccd_base(&db, &t, verb, case).unwrap();
                let want = oracle_ccd_base(&osim, &db, verb, case);
                assert!((got - want).abs() < 1e-12, "{verb}/{case}: {got} vs {want}");
                assert!((0.0..=1.0).contains(&got));
            }
        }
    }
}

fn one_case_db(sets: &[&[&str]]) -> Database {
    Database::from_entries(sets.iter().enumerate().map(|(i, fillers)| {
        SenseEntry {
            verb: "v".into(),
            sense_id: format!("s{i}"),
            gloss: String::new(),
            frame: [("o".to_string(), fillers.iter().copied().collect::<FillerSet>())]
                .into_iter()
                .collect(),
        }
    }))
    .unwrap()
}

#[test]
fn ccd_extremes() {
    let t = Thesaurus::complete(4, 4).unwrap();
    // far apart: every cross pair has similarity at most 7
    let disjoint = one_case_db(&[&["w0", "w1"], &["w255", "w254"]]);
    assert_eq!(ccd_base(&disjoint, &t, "v", "o").unwrap(), 1.0);
    let same = one_case_db(&[&["w0", "w17"], &["w17", "w0"]]);
    for alpha in [0.5, 1.0, 4.0] {
        assert_eq!(ccd(&same, &t, "v", "o", alpha).unwrap(), 0.0);
        assert_eq!(ccd(&disjoint, &t, "v", "o", alpha).unwrap(), 1.0);
    }
    let single = one_case_db(&[&["w0"]]);
    assert_eq!(ccd_base(&single, &t, "v", "o").unwrap(), 1.0);
}

#[test]
fn zero_alpha_is_the_plain_mean() {
    for seed in 0..8 {
        let (t, db, corpus) = random_instance(seed, 25);
        let w = CaseWeights::compute(&db, &t, "va", Weighting::Power { alpha: 0.0 }).unwrap();
        for x in corpus.iter().filter(|x| x.verb == "va") {
            assert!(w.bases_for(x).iter().all(|b| b.powf(0.0) == 1.0));
            let r = score_senses(x, &db, &t, Weighting::Power { alpha: 0.0 }).unwrap();
            for interp in &r.interpretations {
                let sims: Vec<f64> = interp.per_case_sim.values().map(|&s| s as f64).collect();
                let mean = if sims.is_empty() {
                    0.0
                } else {
                    sims.iter().sum::<f64>() / sims.len() as f64
                };
                assert!((interp.score - mean).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn max_sim_grows_with_the_set() {
    let t = Thesaurus::complete(3, 3).unwrap();
    let words: Vec<String> = t.words().map(str::to_owned).collect();
    let mut set = FillerSet::default();
    set.push(words[26].clone());
    for (i, w) in words.iter().enumerate().take(20) {
        let before = max_sim(&t, &words[0], &set).unwrap();
        set.push(w.clone());
        let after = max_sim(&t, &words[0], &set).unwrap();
        assert!(after >= before, "step {i}");
    }
    assert!(max_sim(&t, "w0", &FillerSet::default()).is_err());
}

#[test]
fn frame_filter_and_fallback() {
    let t = Thesaurus::complete(3, 2).unwrap();
    let sense = |id: &str, cases: &[(&str, &str)]| SenseEntry {
        verb: "v".into(),
        sense_id: id.into(),
        gloss: String::new(),
        frame: cases
            .iter()
            .map(|(c, w)| (c.to_string(), [*w].into_iter().collect::<FillerSet>()))
            .collect(),
    };
    let db = Database::from_entries([
        sense("both", &[("ga", "w0"), ("o", "w1")]),
        sense("ga_only", &[("ga", "w0")]),
    ])
    .unwrap();
    let x = SentenceExample::new("1", "v", [("ga", "w0"), ("o", "w7")]);
    let r = score_senses(&x, &db, &t, Weighting::ArgmaxOnly).unwrap();
    assert!(!r.frame_mismatch);
    assert_eq!(r.interpretations.len(), 1);
    assert_eq!(r.best().unwrap().sense_id, "both");

    let y = SentenceExample::new("2", "v", [("ga", "w0"), ("de", "w7")]);
    let r = score_senses(&y, &db, &t, Weighting::ArgmaxOnly).unwrap();
    assert!(r.frame_mismatch);
    assert_eq!(r.interpretations.len(), 2);
    for i in &r.interpretations {
        assert_eq!(i.per_case_sim.keys().collect::<Vec<_>>(), ["ga"]);
        assert_eq!(i.score, 11.0);
    }
    assert_eq!(r.s2(), 11.0);
}
