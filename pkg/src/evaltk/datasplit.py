"""Random data splitting with e-values, and its derandomization.

Data are iid Bernoulli bits and the null is ``theta = theta0``.  A split
fits a smoothed estimate on the training half and evaluates the
likelihood ratio of that estimate against ``theta0`` on the test half.
Given the split, that ratio is an exact e-variable.  Averaging it over
all splits gives an e-value that no longer depends on a seed.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .space import DomainError

MAX_SPLITS = 100_000


@dataclass(frozen=True)
class BernoulliDataset:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if len(bits) < 2:
            raise DomainError("a dataset needs at least two observations")
        if any(b not in (0, 1) for b in bits):
            raise DomainError("observations must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @property
    def n(self) -> int:
        return len(self.bits)

    @classmethod
    def parse(cls, text: str) -> BernoulliDataset:
        """Either JSON ``{"bits": [...]}`` or one 0/1 character per line."""
        s = text.strip()
        if s.startswith("{"):
            return cls(tuple(json.loads(s)["bits"]))
        lines = [ln.strip() for ln in s.splitlines() if ln.strip()]
        if any(ln not in ("0", "1") for ln in lines):
            raise DomainError("dataset lines must each be a single 0 or 1")
        return cls(tuple(int(ln) for ln in lines))

    @classmethod
    def load(cls, path: str | Path) -> BernoulliDataset:
        return cls.parse(Path(path).read_text())


def train_size(n: int, train_fraction: float) -> int:
    if not (0 < train_fraction < 1):
        raise DomainError("train_fraction must be in (0, 1)")
    k = round(n * train_fraction)
    if k < 1 or k > n - 1:
        raise DomainError(f"split of {n} points at fraction {train_fraction} leaves an empty half")
    return k


def n_splits(n: int, train_fraction: float = 0.5) -> int:
    return math.comb(n, train_size(n, train_fraction))


def unrank_combination(n: int, k: int, rank: int) -> tuple[int, ...]:
    """The ``rank``-th k-subset of ``range(n)`` in lexicographic order."""
    if not (0 <= rank < math.comb(n, k)):
        raise DomainError(f"rank {rank} out of range for C({n}, {k})")
    out = []
    x = 0
    for slots in range(k, 0, -1):
        while True:
            c = math.comb(n - x - 1, slots - 1)
            if rank < c:
                break
            rank -= c
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def split(
    data: BernoulliDataset, seed: int, train_fraction: float = 0.5, mode: str = "random"
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Partition indices into (train, test), both sorted.

    ``mode="random"`` draws a permutation from PCG64 seeded with ``seed``;
    ``mode="exhaustive"`` reads ``seed`` as a rank into the lexicographic
    list of all training subsets.
    """
    n = data.n
    k = train_size(n, train_fraction)
    if mode == "random":
        perm = np.random.default_rng(seed).permutation(n)
        train = tuple(sorted(int(i) for i in perm[:k]))
    elif mode == "exhaustive":
        train = unrank_combination(n, k, seed)
    else:
        raise DomainError(f"unknown split mode {mode!r}")
    chosen = set(train)
    return train, tuple(i for i in range(n) if i not in chosen)


def fit_theta(bits, smoothing: float) -> float:
    if smoothing <= 0:
        raise DomainError("smoothing must be positive")
    return (sum(bits) + smoothing) / (len(bits) + 2 * smoothing)


def lr_e_value(test_bits, theta_hat: float, null_theta: float) -> float:
    """``prod (theta_hat/theta0)^x ((1-theta_hat)/(1-theta0))^(1-x)``."""
    k = sum(test_bits)
    m = len(test_bits)
    return (theta_hat / null_theta) ** k * ((1 - theta_hat) / (1 - null_theta)) ** (m - k)


def np_p_value(test_bits, theta_hat: float, null_theta: float) -> float:
    """Neyman-Pearson p-value of the test half against the fitted alternative.

    The likelihood ratio is monotone in the count of ones, so the upper set
    ``{LR >= LR(observed)}`` is a binomial tail (or everything, on a tie).
    """
    k = sum(test_bits)
    m = len(test_bits)
    if theta_hat > null_theta:
        js = range(k, m + 1)
    elif theta_hat < null_theta:
        js = range(0, k + 1)
    else:
        return 1.0
    p = math.fsum(math.comb(m, j) * null_theta**j * (1 - null_theta) ** (m - j) for j in js)
    return min(1.0, p)


def _check_null(null_theta: float) -> None:
    if not (0 < null_theta < 1):
        raise DomainError("null_theta must be in (0, 1)")


def split_statistics(
    data: BernoulliDataset,
    seed: int,
    null_theta: float = 0.5,
    smoothing: float = 1.0,
    train_fraction: float = 0.5,
    mode: str = "random",
) -> tuple[float, float]:
    """(e-value, p-value) for one split."""
    _check_null(null_theta)
    train, test = split(data, seed, train_fraction, mode)
    theta_hat = fit_theta([data.bits[i] for i in train], smoothing)
    test_bits = [data.bits[i] for i in test]
    return lr_e_value(test_bits, theta_hat, null_theta), np_p_value(test_bits, theta_hat, null_theta)


def split_e_value(
    data: BernoulliDataset,
    seed: int,
    null_theta: float = 0.5,
    smoothing: float = 1.0,
    train_fraction: float = 0.5,
    mode: str = "random",
) -> float:
    return split_statistics(data, seed, null_theta, smoothing, train_fraction, mode)[0]


def _stdev(xs) -> float | None:
    xs = list(xs)
    return statistics.stdev(xs) if len(xs) >= 2 else None


@dataclass
class SplitReport:
    per_seed: list[tuple[int, float]]
    derandomized_e: float
    e_spread: float | None
    p_per_seed: list[float]
    p_spread: float | None
    mode: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "params": self.params,
            "derandomized_e": self.derandomized_e,
            "e_spread": self.e_spread,
            "p_spread": self.p_spread,
            "per_seed": [{"seed": s, "e_value": e, "p_value": p}
                         for (s, e), p in zip(self.per_seed, self.p_per_seed)],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["seed", "e_value", "p_value"])
        for (s, e), p in zip(self.per_seed, self.p_per_seed):
            w.writerow([s, repr(e), repr(p)])
        return buf.getvalue()


def derandomized_e(
    data: BernoulliDataset,
    seeds: list[int] | None = None,
    mode: str = "exhaustive",
    null_theta: float = 0.5,
    smoothing: float = 1.0,
    train_fraction: float = 0.5,
    workers: int = 1,
) -> SplitReport:
    """Average split e-values over a seed list, or over every split.

    Results are collected in seed order and summed with ``math.fsum``, so
    the output does not depend on ``workers`` or on scheduling.
    """
    _check_null(null_theta)
    if mode == "exhaustive":
        total_splits = n_splits(data.n, train_fraction)
        if total_splits > MAX_SPLITS:
            raise DomainError(f"{total_splits} splits exceeds the enumeration limit {MAX_SPLITS}")
        seeds = list(range(total_splits))
        split_mode = "exhaustive"
    elif mode == "seeds":
        if not seeds:
            raise DomainError("seed mode needs at least one seed")
        seeds = list(seeds)
        split_mode = "random"
    else:
        raise DomainError(f"unknown mode {mode!r}")

    def one(seed):
        return split_statistics(data, seed, null_theta, smoothing, train_fraction, split_mode)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(one, seeds))
    else:
        results = [one(s) for s in seeds]
    es = [e for e, _ in results]
    ps = [p for _, p in results]
    return SplitReport(
        per_seed=list(zip(seeds, es)),
        derandomized_e=math.fsum(es) / len(es),
        e_spread=_stdev(math.log(e) for e in es),
        p_per_seed=ps,
        p_spread=_stdev(ps),
        mode=mode,
        params={
            "null_theta": null_theta,
            "smoothing": smoothing,
            "train_fraction": train_fraction,
            "n": data.n,
        },
    )


@dataclass
class ReproducibilityReport:
    single_log_e_spread: float | None
    single_p_spread: float | None
    batch_spread: dict[int, float | None]
    exhaustive_spread: float | None
    exhaustive_e: float | None

    def to_dict(self) -> dict:
        return {
            "single_log_e_spread": self.single_log_e_spread,
            "single_p_spread": self.single_p_spread,
            "batch_spread": {str(k): v for k, v in self.batch_spread.items()},
            "exhaustive_spread": self.exhaustive_spread,
            "exhaustive_e": self.exhaustive_e,
        }


def reproducibility_report(
    data: BernoulliDataset,
    n_seeds: int,
    batch_sizes: tuple[int, ...] = (1, 50),
    base_seed: int = 0,
    null_theta: float = 0.5,
    smoothing: float = 1.0,
    train_fraction: float = 0.5,
    analysts: int = 2,
) -> ReproducibilityReport:
    """How much do analysts disagree?

    Seeds ``base_seed .. base_seed + n_seeds - 1`` are cut into disjoint
    consecutive batches; each batch is one analyst's seed-averaged
    e-value, and the spread is the standard deviation of the log of those
    averages.  Analysts who average over every split all get the same
    number, so ``exhaustive_spread`` is computed from ``analysts``
    independent exhaustive runs.
    """
    seeds = list(range(base_seed, base_seed + n_seeds))
    rep = derandomized_e(data, seeds, "seeds", null_theta, smoothing, train_fraction)
    es = [e for _, e in rep.per_seed]
    batch_spread = {}
    for b in batch_sizes:
        means = [math.fsum(es[i:i + b]) / b for i in range(0, len(es) - b + 1, b)]
        batch_spread[b] = _stdev(math.log(m) for m in means)

    exhaustive = []
    try:
        for _ in range(analysts):
            exhaustive.append(
                derandomized_e(data, None, "exhaustive", null_theta, smoothing, train_fraction).derandomized_e
            )
    except DomainError:
        pass
    spread = statistics.pstdev(exhaustive) if exhaustive else None
    return ReproducibilityReport(
        single_log_e_spread=rep.e_spread,
        single_p_spread=rep.p_spread,
        batch_spread=batch_spread,
        exhaustive_spread=spread,
        exhaustive_e=exhaustive[0] if exhaustive else None,
    )
