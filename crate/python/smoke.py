"""Smoke test for the Python bindings.

    maturin develop -m crates/python/Cargo.toml --release
    python python/smoke.py
"""

import json

import pyverbsense as vs

spec = json.dumps({
    "verbs": [
        {"name": "toru", "senses": 3, "sentences": 30},
        {"name": "noru", "senses": 2, "sentences": 12},
    ],
})
thesaurus, seeds, corpus = vs.generate_synthetic(spec, rng_seed=5)
print(f"{thesaurus.num_leaves} leaves, {seeds.num_senses} senses, {len(corpus)} sentences")

words = [json.loads(line)["word"] for line in thesaurus.to_jsonl().splitlines() if "word" in json.loads(line)]
assert thesaurus.sim(words[0], words[0]) == 11
assert thesaurus.sim(words[0], "not-a-word") == 0
assert vs.Thesaurus(thesaurus.to_jsonl()).num_leaves == thesaurus.num_leaves

x = corpus[0]
ranking = vs.score_senses(x, seeds, thesaurus)
scores = [i["score"] for i in ranking["interpretations"]]
assert scores == sorted(scores, reverse=True)
assert all(0 <= s <= 11 for s in scores)
print(f"{x!r}: best {ranking['interpretations'][0]['sense']} (gold {x.gold})")

try:
    vs.Sentence("bad", "toru", [])
except ValueError as e:
    print(f"rejected empty sentence: {e}")
else:
    raise AssertionError("empty sentence accepted")

state = vs.SamplingState(thesaurus, seeds, corpus)
before = seeds.total_fillers
for _ in range(5):
    i = state.select_samples()[0]
    assert state.tuf(i) >= 0
    state.commit_batch([(i, state.sentence(i).gold)])
assert len(state.labeled()) == 5 and len(state) == len(corpus) - 5
assert state.database().total_fillers > before
print(f"labeled {[corpus[i].id for i, _ in state.labeled()]}")

report = vs.run_experiment(corpus, thesaurus, seeds, folds=3)
assert report["csv"].startswith("strategy,fold,iteration,labeled,precision,pm")
for name, s in report["strategies"].items():
    print(f"{name}: final precision per fold {[round(p, 3) for p in s['final_precision']]}")

print("ok")
