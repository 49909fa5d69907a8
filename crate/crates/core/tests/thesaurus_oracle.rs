mod common;

use common::{random_tree, table_sim, Graph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use verbsense::thesaurus::sim_for_length;
use verbsense::Thesaurus;

#[test]
fn length_table_matches() {
    for len in (0..40).step_by(2) {
        assert_eq!(sim_for_length(len), table_sim(len), "len {len}");
    }
}

#[test]
fn path_lengths_match_bfs_on_random_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for depth in 1..=7 {
        let records = random_tree(&mut rng, 60, depth);
        let g = Graph::new(&records);
        let t = Thesaurus::from_records(records).unwrap();
        assert_eq!(t.depth() as usize, depth);
        assert_eq!(t.num_leaves(), 60);
        let words = g.words();
        for a in &words {
            for b in &words {
                let want = g.path_len(a, b);
                assert_eq!(t.path_length(a, b), Some(want));
                assert_eq!(t.sim(a, b), table_sim(want));
            }
        }
    }
}

#[test]
fn unknown_words() {
    let t = Thesaurus::complete(2, 2).unwrap();
    assert_eq!(t.sim("w0", "nowhere"), 0);
    assert_eq!(t.sim("nowhere", "nowhere"), 11);
    assert_eq!(t.with_unknown_similarity(5).sim("w0", "nowhere"), 5);
}

#[test]
fn malformed_trees_are_rejected() {
    let cases = [
        // two roots
        "{\"id\":\"a\",\"word\":\"x\"}\n{\"id\":\"b\",\"word\":\"y\"}\n",
        // unequal leaf depth
        "{\"id\":\"r\",\"children\":[\"a\",\"m\"]}\n{\"id\":\"m\",\"children\":[\"b\"]}\n{\"id\":\"a\",\"word\":\"x\"}\n{\"id\":\"b\",\"word\":\"y\"}\n",
        // dangling child
        "{\"id\":\"r\",\"children\":[\"a\",\"zz\"]}\n{\"id\":\"a\",\"word\":\"x\"}\n",
        // cycle
        "{\"id\":\"r\",\"children\":[\"a\"]}\n{\"id\":\"a\",\"children\":[\"b\"]}\n{\"id\":\"b\",\"children\":[\"a\"]}\n",
        // duplicate word
        "{\"id\":\"r\",\"children\":[\"a\",\"b\"]}\n{\"id\":\"a\",\"word\":\"x\"}\n{\"id\":\"b\",\"word\":\"x\"}\n",
    ];
    for text in cases {
        assert!(Thesaurus::from_jsonl(text).is_err(), "{text}");
    }
}

#[test]
fn jsonl_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let t = Thesaurus::from_records(random_tree(&mut rng, 30, 4)).unwrap();
    let back = Thesaurus::from_jsonl(&t.to_jsonl()).unwrap();
    for a in t.words() {
        for b in t.words() {
            assert_eq!(t.sim(a, b), back.sim(a, b));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sim_is_symmetric_and_path_length_is_a_metric(seed in 0u64..1000, depth in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = Thesaurus::from_records(random_tree(&mut rng, 25, depth)).unwrap();
        let words: Vec<&str> = t.words().collect();
        for &a in &words {
            prop_assert_eq!(t.sim(a, a), 11);
            for &b in &words {
                prop_assert_eq!(t.sim(a, b), t.sim(b, a));
                let ab = t.path_length(a, b).unwrap();
                prop_assert!(ab.is_multiple_of(2));
                for &c in &words {
                    let (bc, ac) = (t.path_length(b, c).unwrap(), t.path_length(a, c).unwrap());
                    prop_assert!(ac <= ab + bc);
                    // in an ultrametric-like tree the two larger distances are equal
                    let mut d = [ab, bc, ac];
                    d.sort();
                    prop_assert_eq!(d[1], d[2]);
                }
            }
        }
    }

    #[test]
    fn sim_does_not_increase_with_length(a in 0u32..30, b in 0u32..30) {
        let (a, b) = (a * 2, b * 2);
        if a <= b {
            prop_assert!(sim_for_length(a) >= sim_for_length(b));
        }
    }
}
