"""Next-call prediction from function-level call traces.

An order-k Markov (n-gram) model over function names. Argument values
are ignored when predicting; they still matter for cache keys.
"""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

TRACE_HEADER = ("timestamp", "fn_name", "arg")
U32_MAX = 2**32 - 1


@dataclass(frozen=True, slots=True)
class CallEvent:
    fn_name: str
    arg: int = 0
    timestamp: int = 0

    def __post_init__(self):
        if not self.fn_name:
            raise ValueError("fn_name must be nonempty")
        if any(ch.isspace() or ch == "," for ch in self.fn_name):
            raise ValueError(f"fn_name {self.fn_name!r} contains whitespace or a comma")
        if not 0 <= self.arg <= U32_MAX:
            raise ValueError(f"arg {self.arg} is not an unsigned 32-bit integer")


@dataclass(frozen=True)
class CallTrace:
    events: tuple[CallEvent, ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        for a, b in zip(self.events, self.events[1:]):
            if b.timestamp < a.timestamp:
                raise ValueError(f"timestamps decrease at {b.timestamp}")

    @classmethod
    def from_names(cls, names) -> "CallTrace":
        return cls(tuple(CallEvent(n, 0, i) for i, n in enumerate(names)))

    @property
    def names(self) -> list[str]:
        return [e.fn_name for e in self.events]

    def __len__(self) -> int:
        return len(self.events)


def read_call_trace(path) -> CallTrace:
    path = Path(path)
    events = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != TRACE_HEADER:
            raise ValueError(f"{path}:1: expected header {','.join(TRACE_HEADER)!r}")
        for row in reader:
            if not row:
                continue
            try:
                ts, name, arg = (f.strip() for f in row)
                events.append(CallEvent(name, int(arg), int(ts)))
            except ValueError as exc:
                raise ValueError(f"{path}:{reader.line_num}: {exc}") from None
    return CallTrace(tuple(events))


def write_call_trace(trace: CallTrace, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for e in trace.events:
            w.writerow((e.timestamp, e.fn_name, e.arg))


def _argmax(freq: Counter) -> str:
    # highest count, ties broken by lexicographically smallest name
    return min(freq.items(), key=lambda kv: (-kv[1], kv[0]))[0]


@dataclass
class NGramModel:
    order: int
    counts: dict[tuple[str, ...], Counter] = field(default_factory=dict)
    smoothing: float = 0.0
    _best: dict = field(default_factory=dict, repr=False, compare=False)
    _fallback: str | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.smoothing < 0:
            raise ValueError("smoothing must be >= 0")

    @property
    def vocabulary(self) -> list[str]:
        return sorted(self.unigram)

    @property
    def unigram(self) -> Counter:
        total = Counter()
        for freq in self.counts.values():
            total.update(freq)
        return total

    def probabilities(self, context) -> dict[str, float]:
        """Next-call distribution for a context (additive smoothing)."""
        ctx = tuple(context)[-self.order :]
        freq = self.counts.get(ctx, Counter())
        vocab = self.vocabulary
        denom = sum(freq.values()) + self.smoothing * len(vocab)
        if denom == 0:
            return {}
        return {v: (freq.get(v, 0) + self.smoothing) / denom for v in vocab}

    def best_next(self, context) -> str:
        ctx = tuple(context)[-self.order :]
        if not self._best:
            self._best = {c: _argmax(f) for c, f in self.counts.items()}
            self._fallback = _argmax(self.unigram)
        # additive smoothing never changes the argmax
        return self._best.get(ctx, self._fallback)

    def dump(self, path) -> None:
        """Write ``context<TAB>next<TAB>count`` lines, sorted."""
        lines = [f"# order={self.order} smoothing={self.smoothing!r}"]
        rows = sorted(
            (" ".join(ctx), nxt, n) for ctx, freq in self.counts.items() for nxt, n in freq.items()
        )
        lines += [f"{c}\t{n}\t{k}" for c, n, k in rows]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "NGramModel":
        text = Path(path).read_text(encoding="utf-8").splitlines()
        if not text or not text[0].startswith("# order="):
            raise ValueError(f"{path}:1: missing model header")
        meta = dict(kv.split("=", 1) for kv in text[0][2:].split())
        model = cls(int(meta["order"]), smoothing=float(meta.get("smoothing", 0.0)))
        for lineno, line in enumerate(text[1:], start=2):
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
            ctx = tuple(parts[0].split(" "))
            if len(ctx) != model.order:
                raise ValueError(f"{path}:{lineno}: context length {len(ctx)} != order {model.order}")
            model.counts.setdefault(ctx, Counter())[parts[1]] += int(parts[2])
        return model


def train(traces, order: int = 3, smoothing: float = 0.0) -> NGramModel:
    """Count every ``(context, next)`` pair across ``traces``."""
    if order < 1:
        raise ValueError("order must be >= 1")
    counts: dict[tuple[str, ...], Counter] = defaultdict(Counter)
    usable = 0
    for trace in traces:
        names = trace.names if isinstance(trace, CallTrace) else list(trace)
        if len(names) <= order:
            continue
        usable += 1
        for i in range(order, len(names)):
            counts[tuple(names[i - order : i])][names[i]] += 1
    if not usable:
        raise ValueError(f"no trace longer than order {order}; nothing to train on")
    return NGramModel(order, dict(counts), smoothing)


def predict_next(model: NGramModel, context, n: int) -> list[str]:
    """Greedy rollout of the ``n`` most likely next calls.

    Unseen contexts (including ones shorter than the model order) fall
    back to the most frequent call overall.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    window = list(context)
    out = []
    for _ in range(n):
        nxt = model.best_next(window)
        out.append(nxt)
        window.append(nxt)
    return out


def top1_accuracy(
    model: NGramModel, held_out, n: int = 10, context_len: int = 10, stride: int = 1
) -> float:
    """Per-position top-1 accuracy of ``n``-call rollouts.

    Every window of ``context_len`` observed calls followed by ``n``
    ground-truth calls is scored; the result is the fraction of all
    predicted positions that match.
    """
    names = held_out.names if isinstance(held_out, CallTrace) else list(held_out)
    if context_len < 1 or n < 1:
        raise ValueError("n and context_len must be >= 1")
    last = len(names) - context_len - n
    if last < 0:
        raise ValueError(f"held-out trace of {len(names)} calls is shorter than context_len + n")
    hits = total = 0
    for s in range(0, last + 1, stride):
        pred = predict_next(model, names[s : s + context_len], n)
        truth = names[s + context_len : s + context_len + n]
        hits += sum(p == t for p, t in zip(pred, truth))
        total += n
    return hits / total
