"""Uniform row-sampling strategies and their application to matrices.

A sampling matrix S is never formed; a `SampleSelection` records the chosen
row indices and the scalar weight multiplying every selected row, so that
``S @ A == selection.weight * A[selection.indices]``.
"""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np


class Strategy(str, enum.Enum):
    WITHOUT_REPLACEMENT = "without"
    WITH_REPLACEMENT = "with"
    BERNOULLI = "bernoulli"
    BINOMIAL_WITHOUT = "binomial_without"


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by (seed, stream_id).

    Backed by the counter-based Philox generator; distinct stream ids give
    statistically independent streams, and ``generator()`` always restarts
    the same stream from the beginning.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = int(getattr(self, name))
            if not 0 <= v < 2**64:
                raise ValueError("%s must be a 64-bit unsigned integer, got %d" % (name, v))
            object.__setattr__(self, name, v)

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)


RngLike = Union[RngStream, np.random.Generator]


def _generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("expected RngStream or numpy Generator, got %r" % type(rng))


def _stream_ids(rng: RngLike):
    if isinstance(rng, RngStream):
        return rng.seed, rng.stream_id
    return None, None


@dataclass(frozen=True)
class SampleSelection:
    """Selected row indices plus the weight multiplying each selected row."""

    strategy: Strategy
    source_rows: int
    indices: np.ndarray
    weight: float
    requested: int
    seed: Optional[int] = None
    stream_id: Optional[int] = None

    def __post_init__(self):
        idx = np.array(self.indices, dtype=np.int64).ravel()
        idx.flags.writeable = False
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "strategy", Strategy(self.strategy))

    @property
    def size(self) -> int:
        return int(self.indices.size)

    def __len__(self):
        return self.size

    def to_dense(self) -> np.ndarray:
        """The explicit |indices| x m sampling matrix S."""
        s = np.zeros((self.size, self.source_rows))
        s[np.arange(self.size), self.indices] = self.weight
        return s

    def to_csv_row(self) -> str:
        """``strategy,seed,stream,weight,"i1 i2 ..."`` (one line, no newline)."""
        buf = io.StringIO()
        csv.writer(buf, lineterminator="").writerow([
            self.strategy.value,
            "" if self.seed is None else self.seed,
            "" if self.stream_id is None else self.stream_id,
            repr(float(self.weight)),
            " ".join(str(int(i)) for i in self.indices),
        ])
        return buf.getvalue()

    @classmethod
    def from_csv_row(cls, line: str, source_rows: int, requested: Optional[int] = None):
        strategy, seed, stream, weight, idx = next(csv.reader([line]))
        indices = np.array([int(t) for t in idx.split()], dtype=np.int64)
        return cls(
            Strategy(strategy), source_rows, indices, float(weight),
            requested if requested is not None else indices.size,
            int(seed) if seed else None, int(stream) if stream else None,
        )


def _check(m, c, allow_oversample=False):
    if m < 1:
        raise ValueError("need m >= 1, got %d" % m)
    if c < 1:
        raise ValueError("need c >= 1, got %d" % c)
    if c > m and not allow_oversample:
        raise ValueError("need c <= m, got c=%d > m=%d" % (c, m))


def sample_without_replacement(m: int, c: int, rng: RngLike) -> SampleSelection:
    """Uniform sampling of c distinct rows: first c entries of a random permutation."""
    _check(m, c)
    gen = _generator(rng)
    idx = gen.permutation(m)[:c]
    return SampleSelection(Strategy.WITHOUT_REPLACEMENT, m, idx, np.sqrt(m / c), c,
                           *_stream_ids(rng))


def sample_with_replacement(m: int, c: int, rng: RngLike) -> SampleSelection:
    """c independent uniform draws from {0, ..., m-1}; c > m is permitted."""
    _check(m, c, allow_oversample=True)
    gen = _generator(rng)
    idx = gen.integers(0, m, size=c)
    return SampleSelection(Strategy.WITH_REPLACEMENT, m, idx, np.sqrt(m / c), c,
                           *_stream_ids(rng))


def sample_bernoulli(m: int, c: int, rng: RngLike) -> SampleSelection:
    """Keep each row independently with probability c/m.

    The weight is sqrt(m/c) for the *requested* c, whatever the realized
    count; an empty selection is a legal outcome.
    """
    _check(m, c)
    gen = _generator(rng)
    idx = np.flatnonzero(gen.random(m) < c / m)
    return SampleSelection(Strategy.BERNOULLI, m, idx, np.sqrt(m / c), c,
                           *_stream_ids(rng))


def sample_binomial_without(m: int, c: int, rng: RngLike) -> SampleSelection:
    """Draw K ~ Binomial(m, c/m), then K distinct rows uniformly.

    Unlike `sample_bernoulli` the weight uses the realized count,
    sqrt(m/K); K = 0 gives an empty selection with weight 0.
    """
    _check(m, c)
    gen = _generator(rng)
    k = int(gen.binomial(m, c / m))
    idx = gen.permutation(m)[:k]
    weight = np.sqrt(m / k) if k > 0 else 0.0
    return SampleSelection(Strategy.BINOMIAL_WITHOUT, m, idx, weight, c,
                           *_stream_ids(rng))


SAMPLERS = {
    Strategy.WITHOUT_REPLACEMENT: sample_without_replacement,
    Strategy.WITH_REPLACEMENT: sample_with_replacement,
    Strategy.BERNOULLI: sample_bernoulli,
    Strategy.BINOMIAL_WITHOUT: sample_binomial_without,
}


def sample(strategy, m: int, c: int, rng: RngLike) -> SampleSelection:
    return SAMPLERS[Strategy(strategy)](m, c, rng)


def apply_selection(s: SampleSelection, a) -> np.ndarray:
    """Return S @ a: row t is ``s.weight * a[s.indices[t]]``."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.shape[0] != s.source_rows:
        raise ValueError("selection is over %d rows but matrix has %d"
                         % (s.source_rows, arr.shape[0]))
    return s.weight * arr[s.indices]
