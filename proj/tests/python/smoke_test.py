"""Smoke tests for the _logstamp extension module.

Run with the built module's directory on PYTHONPATH (ctest does this), or
with an installed logstamp package.
"""

import sys
import tempfile

try:
    import _logstamp as ls
except ImportError:
    from logstamp import _logstamp as ls


def expect(condition, message):
    if not condition:
        raise AssertionError(message)


def test_tokenize():
    expect(
        ls.tokenize("Interface te-1/1/50 change state to down")
        == ["Interface", "te-1/1/50", "change", "state", "to", "down"],
        "default tokenization",
    )
    expect(ls.tokenize("a=b c") == ["a", "b", "c"], "delimiter split")
    expect(ls.tokenize("A B", lowercase=True) == ["a", "b"], "lowercase")
    expect(ls.tokenize("   ") == [], "whitespace only")


def test_metric():
    expect(ls.rand_index(["a", "a", "b", "b"], ["x", "x", "y", "y"]) == 1.0, "identical grouping")
    counts = ls.pair_counts(["a", "a", "b", "b"], ["x", "x", "y", "y"])
    expect(counts == {"tp": 2, "tn": 4, "fp": 0, "fn": 0}, f"pair counts, got {counts}")
    expect(ls.rand_index(["a", "b", "c"], ["g", "g", "g"]) == 0.0, "total disagreement")


def test_dbscan():
    points = [[1.0, 0.0]] * 5 + [[0.0, 1.0]] * 5
    labels, num_clusters = ls.dbscan(points, eps=0.05, min_pts=2)
    expect(num_clusters == 2, "two clusters")
    expect(labels[:5] == [0] * 5 and labels[5:] == [1] * 5, f"labels {labels}")


def test_dataset_and_split():
    lines = [f"job {i} finished in {i * 3} seconds" for i in range(50)]
    ds = ls.make_dataset(lines, truths=["J"] * 50, name="jobs")
    expect(len(ds) == 50, "dataset size")
    expect(ds.labeled, "labeled")
    expect(ds.records[0].tokens[0] == "job", "tokenized record")
    train, test, ids = ls.split_train(ds, 0.2, seed=1)
    expect(len(train) == 10 and len(test) == 50, "split sizes")
    train2, _, ids2 = ls.split_train(ds, 0.2, seed=1)
    expect(ids == ids2, "split determinism")


def _two_template_lines(n):
    import random

    rng = random.Random(5)
    lines, truths = [], []
    for _ in range(n):
        if rng.random() < 0.5:
            lines.append(f"Connection from 10.0.{rng.randrange(255)}.{rng.randrange(255)} "
                         f"port {rng.randrange(1024, 65000)} established")
            truths.append("A")
        else:
            lines.append(f"Backup job {rng.randrange(10 ** 5)} finished in "
                         f"{rng.randrange(900)} seconds")
            truths.append("B")
    return lines, truths


PIPELINE_CONFIG = dict(
    embed_dim=24,
    encoder_hidden=24,
    encoder_epochs=4,
    encoder_lr=0.1,
    eps=0.1,
    tagger_hidden=16,
    tagger_epochs=10,
    tagger_lr=0.5,
    seed=3,
)


def test_pipeline_end_to_end():
    lines, truths = _two_template_lines(240)
    ds = ls.make_dataset(lines, truths=truths, name="two")
    pipe = ls.Pipeline(ds, **PIPELINE_CONFIG)

    result = pipe.parse_line("Connection from 10.0.99.98 port 1234 established")
    expect(result["template_id"] == 0 and result["new"], f"first parse {result}")
    expect("<*>" in result["template"], "placeholder present")

    again = pipe.parse_line("Connection from 10.0.1.2 port 9999 established")
    expect(again["template_id"] == 0 and not again["new"], f"store reuse {again}")

    results = pipe.parse(lines)
    expect(len(results) == len(lines), "parse conservation")
    predicted = [str(r["template_id"]) for r in results]
    ri = ls.rand_index(predicted, truths)
    expect(ri == 1.0, f"pipeline rand index {ri}")

    labels = pipe.tag("Connection from 10.0.7.7 port 4242 established")
    expect(labels[0] == "T" and labels[2] == "V", f"tagging {labels}")

    vecs = pipe.embed_tokens("Backup job 17 finished in 3 seconds")
    expect(len(vecs) == 7 and len(vecs[0]) == 24, "embedding shape")
    sent = pipe.embed_sentence("Backup job 17 finished in 3 seconds")
    norm = sum(x * x for x in sent) ** 0.5
    expect(abs(norm - 1.0) < 1e-6, f"sentence norm {norm}")

    templates = pipe.templates()
    expect(len(templates) >= 2, "template store listing")


def test_pipeline_save_load_round_trip():
    lines, truths = _two_template_lines(160)
    ds = ls.make_dataset(lines, truths=truths, name="two")
    pipe = ls.Pipeline(ds, **PIPELINE_CONFIG)
    with tempfile.TemporaryDirectory() as tmp:
        pipe.save(tmp)
        loaded = ls.Pipeline.load(tmp)
        probe = "Connection from 10.0.8.8 port 31337 established"
        expect(loaded.tag(probe) == pipe.tag(probe), "tagging survives round trip")
        expect(loaded.embed_tokens(probe) == pipe.embed_tokens(probe),
               "embeddings survive round trip")


def test_run_experiment():
    lines, truths = _two_template_lines(300)
    ds = ls.make_dataset(lines, truths=truths, name="two")
    report = ls.run_experiment(ds, fraction=0.1, **PIPELINE_CONFIG)
    expect(report["rand_index"] == 1.0, f"experiment rand index {report['rand_index']}")
    expect(report["train_records"] == 30, "train size")
    expect(report["config"]["dbscan"]["eps"] == 0.1, "config provenance")


def test_synthetic_generator():
    ds = ls.generate_synthetic("HDFS", lines=200, seed=9)
    expect(len(ds) == 200 and ds.labeled, "synthetic HDFS")
    groups = {r.truth_group for r in ds.records}
    expect(len(groups) > 3, "several templates present")


def test_errors_are_typed():
    try:
        ls.load_dataset("/nonexistent/file.csv")
    except ls.LogstampError:
        pass
    else:
        raise AssertionError("expected LogstampError")

    try:
        ls.rand_index(["a"], ["b", "c"])
    except ls.LogstampError:
        pass
    else:
        raise AssertionError("expected LogstampError for id mismatch")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
