import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infobattery.task_predict import (
    CallEvent,
    CallTrace,
    NGramModel,
    predict_next,
    read_call_trace,
    top1_accuracy,
    train,
    write_call_trace,
)


def test_cycle_probabilities_and_rollout():
    m = train([CallTrace.from_names(["A", "B", "C"] * 20)], order=2)
    assert m.probabilities(["A", "B"]) == {"A": 0.0, "B": 0.0, "C": 1.0}
    assert predict_next(m, ["B", "C"], 3) == ["A", "B", "C"]


def test_split_counts():
    m = train([["A", "A", "B"], ["A", "A", "A"]], order=2)
    assert m.probabilities(["A", "A"]) == {"A": 0.5, "B": 0.5}
    # ties resolve to the lexicographically smallest name
    assert m.best_next(["A", "A"]) == "A"


def test_order1_rollout():
    m = train([["A", "B", "C", "A", "B", "C", "A"]], order=1)
    assert predict_next(m, ["A"], 3) == ["B", "C", "A"]


def test_too_short_for_order():
    with pytest.raises(ValueError, match="order"):
        train([["A", "B"]], order=2)


def test_unseen_context_falls_back_to_most_frequent():
    m = train([["A", "B", "B", "B", "A", "B"]], order=1)
    assert m.best_next(["Z"]) == "B"
    assert predict_next(m, [], 1) == ["B"]


def test_two_state_markov_argmax():
    rng = random.Random(0)
    seq = ["A"]
    stay = {"A": 0.8, "B": 0.3}
    for _ in range(5000):
        cur = seq[-1]
        seq.append(cur if rng.random() < stay[cur] else ("B" if cur == "A" else "A"))
    m = train([seq], order=1)
    assert m.best_next(["A"]) == "A"
    assert m.best_next(["B"]) == "A"
    assert m.probabilities(["A"])["A"] == pytest.approx(0.8, abs=0.03)


@settings(max_examples=100)
@given(st.lists(st.sampled_from("abcd"), min_size=4, max_size=80), st.integers(1, 3))
def test_best_next_is_brute_force_argmax(seq, order):
    if len(seq) <= order:
        return
    m = train([seq], order=order)
    table = {}
    for i in range(order, len(seq)):
        table.setdefault(tuple(seq[i - order : i]), []).append(seq[i])
    for ctx, nexts in table.items():
        c = Counter(nexts)
        top = max(c.values())
        assert m.best_next(ctx) == min(k for k, v in c.items() if v == top)


@settings(max_examples=50)
@given(st.lists(st.lists(st.sampled_from("xyz"), min_size=3, max_size=20), min_size=1, max_size=5))
def test_trace_order_does_not_matter(traces):
    if not any(len(t) > 2 for t in traces):
        return
    a = train(traces, order=2)
    b = train(list(reversed(traces)), order=2)
    assert a.counts == b.counts


def test_smoothing_keeps_argmax():
    seq = ["A", "B", "A", "C", "A", "B"]
    m0 = train([seq], order=1)
    m1 = train([seq], order=1, smoothing=1.0)
    p = m1.probabilities(["A"])
    assert sum(p.values()) == pytest.approx(1.0)
    assert p["C"] > 0 and p["A"] > 0
    assert m0.best_next(["A"]) == m1.best_next(["A"]) == "B"


def test_dump_load_round_trip(tmp_path):
    m = train([["f1", "f2", "f3", "f1", "f2", "f4"] * 3], order=2, smoothing=0.5)
    p = tmp_path / "m.txt"
    m.dump(p)
    back = NGramModel.load(p)
    assert back == m
    assert back.best_next(["f1", "f2"]) == m.best_next(["f1", "f2"])
    bad = tmp_path / "bad.txt"
    bad.write_text("# order=2 smoothing=0.0\nf1\tf2\n")
    with pytest.raises(ValueError, match=":2:"):
        NGramModel.load(bad)


def test_accuracy_cycle_is_perfect():
    seq = ["A", "B", "C"] * 100
    m = train([seq], order=3)
    assert top1_accuracy(m, seq, n=10, context_len=10) == 1.0


def test_accuracy_uniform_random():
    rng = random.Random(7)
    vocab = [f"f{i}" for i in range(8)]
    seq = [rng.choice(vocab) for _ in range(50_000)]
    m = train([seq[:40_000]], order=2)
    acc = top1_accuracy(m, seq[40_000:], n=10, context_len=10, stride=7)
    assert abs(acc - 1 / 8) <= 0.05


def test_accuracy_needs_enough_calls():
    m = train([["A", "B", "A", "B"]], order=1)
    with pytest.raises(ValueError):
        top1_accuracy(m, ["A"] * 5, n=10, context_len=10)


def test_call_event_validation():
    with pytest.raises(ValueError):
        CallEvent("has space")
    with pytest.raises(ValueError):
        CallEvent("f", arg=2**32)
    with pytest.raises(ValueError):
        CallTrace((CallEvent("a", 0, 5), CallEvent("b", 0, 4)))


def test_call_trace_csv_round_trip(tmp_path):
    tr = CallTrace(tuple(CallEvent(n, a, t) for t, (n, a) in
                         enumerate(itertools.product(["p", "q"], [0, 7, 2**32 - 1]))))
    p = tmp_path / "calls.csv"
    write_call_trace(tr, p)
    assert read_call_trace(p) == tr
