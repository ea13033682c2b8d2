"""Monte Carlo harness for the permuted parallel channel.

Randomness is counter-based: every draw is determined by
(master_seed, trial index, lane), where lanes 0..S-1 carry per-channel
noise and lane S carries the message bits.  Results are therefore
independent of chunking and of how trials are split across workers.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass
from itertools import permutations as _all_permutations

import numpy as np

from .channel import DiscreteChannel

_WILSON_Z = 1.959963984540054  # two-sided 95%


@dataclass(frozen=True)
class PermutedParallelChannel:
    """S parallel channels plus the fixed codeword-to-channel assignment.

    Channel s receives codeword pi[s]; the assignment is unknown to the
    encoder and known to the decoder.
    """

    channels: tuple
    pi: tuple

    def __post_init__(self):
        channels = tuple(self.channels)
        pi = tuple(int(v) for v in self.pi)
        if sorted(pi) != list(range(len(channels))):
            raise ValueError("pi must be a bijection on the channel indices")
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "pi", pi)

    @property
    def S(self) -> int:
        return len(self.channels)


def _lane_rng(seed: int, trial: int, lane: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=np.array([seed, (trial << 8) | lane], dtype=np.uint64))
    )


def _sample_channel(
    ch: DiscreteChannel, x: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """One output index per use, via inverse-CDF on one uniform per use."""
    cdf = np.cumsum(ch.transitions, axis=1)
    cdf[:, -1] = 1.0
    u = rng.random(x.shape[0])
    rows = cdf[x]
    return (u[:, None] < rows).argmax(axis=1).astype(np.int64)


def transmit(
    channel: PermutedParallelChannel, codewords, seed: int, trial: int = 0
) -> np.ndarray:
    """Send the S codewords through the assigned channels.

    codewords[label] is the codeword with that label; the output row s is
    channel s's observation of codeword pi[s].
    """
    codewords = np.asarray(codewords, dtype=np.int64)
    if codewords.ndim != 2 or codewords.shape[0] != channel.S:
        raise ValueError(f"expected {channel.S} codewords of equal length")
    outs = []
    for s in range(channel.S):
        rng = _lane_rng(seed, trial, s)
        outs.append(_sample_channel(channel.channels[s], codewords[channel.pi[s]], rng))
    return np.stack(outs)


@dataclass(frozen=True)
class TrialReport:
    """Monte Carlo outcome for one permutation."""

    permutation: tuple
    n: int
    rate: float
    trials: int
    errors: int
    bler: float
    ci_low: float
    ci_high: float
    seed: int
    bit_errors: int = 0

    @property
    def bit_error_rate(self) -> float:
        return self.bit_errors / max(1, self.trials)


def _wilson_interval(errors: int, trials: int) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    z = _WILSON_Z
    phat = errors / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (
        z
        * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials))
        / denom
    )
    return max(0.0, center - half), min(1.0, center + half)


def _run_trial_range(scheme, channels, pi, seed, start, stop, chunk):
    """Error counts over [start, stop); deterministic per trial."""
    s_count = len(channels)
    k = scheme.info_bit_count
    uses = getattr(scheme, "uses_per_channel", scheme.n)
    ppc = PermutedParallelChannel(tuple(channels), tuple(pi))
    block_errors = 0
    bit_errors = 0
    t = start
    while t < stop:
        b = min(chunk, stop - t)
        msgs = np.stack(
            [_lane_rng(seed, t + i, s_count).integers(0, 2, k) for i in range(b)]
        )
        x = scheme.encode(msgs)  # (S, b, uses)
        y = np.zeros((s_count, b, uses), dtype=np.int64)
        for i in range(b):
            y[:, i, :] = transmit(ppc, x[:, i, :], seed, t + i)
        decoded = scheme.decode(list(y), pi)
        wrong = decoded != msgs
        block_errors += int(np.count_nonzero(wrong.any(axis=1)))
        bit_errors += int(np.count_nonzero(wrong))
        t += b
    return block_errors, bit_errors


def _worker(args):
    return _run_trial_range(*args)


def evaluate(
    scheme,
    permutations="all",
    trials: int = 1000,
    master_seed: int = 0,
    channels=None,
    workers: int = 1,
    chunk: int | None = None,
) -> list[TrialReport]:
    """Estimate the block error rate per permutation.

    `permutations` is "all" (S! of them; rejected for S > 6) or an
    explicit list.  `channels` overrides the scheme's design channels for
    the actual transmission and decoding.  Output is reproducible for a
    fixed master_seed regardless of `workers` and `chunk`.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    channels = list(channels) if channels is not None else list(scheme.channels)
    s_count = len(channels)
    if permutations == "all":
        if s_count > 6:
            raise ValueError(
                "refusing to enumerate more than 6! permutations; "
                "pass an explicit list"
            )
        perm_list = [tuple(p) for p in _all_permutations(range(s_count))]
    else:
        perm_list = [tuple(int(v) for v in p) for p in permutations]
    uses = getattr(scheme, "uses_per_channel", scheme.n)
    if chunk is None:
        # keep decoder working sets around a few hundred MB
        q = getattr(scheme, "field", None)
        qsize = 2 ** (q.m if q is not None else 1)
        chunk = max(1, min(trials, (1 << 21) // max(1, uses * qsize)))
    rate = scheme.rate()
    reports = []
    for pi in perm_list:
        if workers > 1:
            bounds = np.linspace(0, trials, workers + 1, dtype=int)
            tasks = [
                (scheme, channels, pi, master_seed, int(a), int(b), chunk)
                for a, b in zip(bounds[:-1], bounds[1:])
                if b > a
            ]
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(workers) as pool:
                parts = pool.map(_worker, tasks)
            block_errors = sum(p[0] for p in parts)
            bit_errors = sum(p[1] for p in parts)
        else:
            block_errors, bit_errors = _run_trial_range(
                scheme, channels, pi, master_seed, 0, trials, chunk
            )
        lo, hi = _wilson_interval(block_errors, trials)
        reports.append(
            TrialReport(
                permutation=pi,
                n=uses,
                rate=rate,
                trials=trials,
                errors=block_errors,
                bler=block_errors / trials,
                ci_low=lo,
                ci_high=hi,
                seed=master_seed,
                bit_errors=bit_errors,
            )
        )
    return reports


CSV_HEADER = "permutation,n,rate,trials,errors,bler,ci_low,ci_high,seed"


def reports_to_csv(reports) -> str:
    lines = [CSV_HEADER]
    for r in reports:
        perm = "-".join(str(v) for v in r.permutation)
        lines.append(
            f"{perm},{r.n},{r.rate!r},{r.trials},{r.errors},"
            f"{r.bler!r},{r.ci_low!r},{r.ci_high!r},{r.seed}"
        )
    return "\n".join(lines) + "\n"
