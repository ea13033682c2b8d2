"""Polarization core over GF(2^m): transform, coset codes, split channels,
successive cancellation decoding, and information-set construction.

Index conventions used throughout:

* Natural (non-bit-reversed) ordering.  The transform is the i-fold
  Kronecker power of [[1,0],[1,1]]; input index l of block length n = 2^i
  has an MSB-first binary expansion whose bits, applied base-channel-first,
  select the minus (0) / plus (1) synthesis branch.
* All indices are 0-based.

Because the kernel is a 0/1 matrix, every polar operation over GF(2^m)
needs only field addition, i.e. XOR on symbol values; no multiplication
tables enter the encoder or decoder.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .channel import (
    DEFAULT_OUTPUT_CAP,
    DiscreteChannel,
    ResourceLimitError,
    bhattacharyya,
    is_bec_like,
    is_degraded,
    merge_outputs,
)
from .gf import FieldSpec

BINARY = FieldSpec(1)


def _check_power_of_two(n: int) -> None:
    if n < 1 or n & (n - 1):
        raise ValueError(f"block length must be a power of two, got {n}")


# ---------------------------------------------------------------------------
# transform and code layout
# ---------------------------------------------------------------------------


def polar_encode(u) -> np.ndarray:
    """Apply the polar transform along the last axis (self-inverse)."""
    x = np.array(u, dtype=np.int64)
    n = x.shape[-1]
    _check_power_of_two(n)
    h = 1
    while h < n:
        for start in range(0, n, 2 * h):
            x[..., start : start + h] ^= x[..., start + h : start + 2 * h]
        h *= 2
    return x


@dataclass(frozen=True)
class PolarTransform:
    """Block length and field of the Kronecker-power transform."""

    n: int
    field: FieldSpec = BINARY

    def __post_init__(self):
        _check_power_of_two(self.n)

    def encode(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=np.int64)
        if u.shape[-1] != self.n:
            raise ValueError(f"input length {u.shape[-1]} != n={self.n}")
        self.field._check_range(u)
        return polar_encode(u)

    # the transform is an involution in characteristic 2
    inverse = encode

    def matrix(self) -> np.ndarray:
        """The n x n 0/1 generator matrix (row i = transform of e_i)."""
        return polar_encode(np.eye(self.n, dtype=np.int64))


def generator(n: int, field: FieldSpec = BINARY) -> PolarTransform:
    """Transform of size n over the given field."""
    return PolarTransform(n, field)


@dataclass(frozen=True)
class InformationSet:
    """Strictly increasing index subset of [0, n)."""

    n: int
    indices: tuple[int, ...]
    _members: frozenset = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 0 or i >= self.n for i in idx):
            raise ValueError("index out of range")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "_members", frozenset(idx))

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, i: int) -> bool:
        return i in self._members

    def complement(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if i not in self._members)

    def issubset(self, other: "InformationSet") -> bool:
        return self._members <= other._members

    def to_text(self) -> str:
        return f"{self.n}: " + " ".join(str(i) for i in self.indices)

    @classmethod
    def from_text(cls, text: str) -> "InformationSet":
        head, _, rest = text.partition(":")
        try:
            n = int(head.strip())
        except ValueError:
            raise ValueError(f"malformed information set line: {text!r}") from None
        idx = tuple(int(v) for v in rest.split())
        return cls(n, idx)


@dataclass(frozen=True)
class CosetCode:
    """Polar coset code: information symbols on the set, fixed symbols off it.

    `frozen` is aligned with the sorted complement of the information set.
    """

    transform: PolarTransform
    info_set: InformationSet
    frozen: np.ndarray = None

    def __post_init__(self):
        if self.info_set.n != self.transform.n:
            raise ValueError("information set and transform disagree on n")
        comp = self.info_set.complement()
        frozen = self.frozen
        if frozen is None:
            frozen = np.zeros(len(comp), dtype=np.int64)
        frozen = np.asarray(frozen, dtype=np.int64)
        if frozen.shape != (len(comp),):
            raise ValueError(
                f"frozen vector must have length {len(comp)}, got {frozen.shape}"
            )
        self.transform.field._check_range(frozen)
        frozen.flags.writeable = False
        object.__setattr__(self, "frozen", frozen)

    def encode(self, info_symbols) -> np.ndarray:
        info_symbols = np.asarray(info_symbols, dtype=np.int64)
        k = len(self.info_set)
        if info_symbols.shape[-1] != k:
            raise ValueError(f"expected {k} information symbols")
        self.transform.field._check_range(info_symbols)
        n = self.transform.n
        u = np.zeros(info_symbols.shape[:-1] + (n,), dtype=np.int64)
        u[..., list(self.info_set.indices)] = info_symbols
        comp = self.info_set.complement()
        if comp:
            u[..., list(comp)] = self.frozen
        return polar_encode(u)


# ---------------------------------------------------------------------------
# channel synthesis (splitting)
# ---------------------------------------------------------------------------


def channel_minus(
    ch: DiscreteChannel, cap: int = DEFAULT_OUTPUT_CAP
) -> DiscreteChannel:
    """Single-step synthesis for the first input of the 2x2 kernel.

    Output alphabet is the pair (y1, y2) packed as y1 * out + y2.
    """
    q, y = ch.input_size, ch.output_size
    if y * y > cap:
        raise ResourceLimitError(f"minus alphabet {y}^2 exceeds cap {cap}")
    t = ch.transitions
    out = np.zeros((q, y * y))
    for u1 in range(q):
        acc = np.zeros((y, y))
        for u2 in range(q):
            acc += np.multiply.outer(t[u1 ^ u2], t[u2])
        out[u1] = acc.reshape(-1) / q
    return DiscreteChannel(out)


def channel_plus(
    ch: DiscreteChannel, cap: int = DEFAULT_OUTPUT_CAP
) -> DiscreteChannel:
    """Single-step synthesis for the second kernel input; the first input
    symbol joins the output, packed as (y1 * out + y2) * q + a."""
    q, y = ch.input_size, ch.output_size
    if y * y * q > cap:
        raise ResourceLimitError(f"plus alphabet {y}^2*{q} exceeds cap {cap}")
    t = ch.transitions
    out = np.zeros((q, y, y, q))
    for x in range(q):
        for a in range(q):
            out[x, :, :, a] = np.multiply.outer(t[a ^ x], t[x]) / q
    return DiscreteChannel(out.reshape(q, y * y * q))


def split_channel_exact(
    ch: DiscreteChannel,
    n: int,
    l: int,
    merge_tol: float = 0.0,
    cap: int = DEFAULT_OUTPUT_CAP,
) -> DiscreteChannel:
    """The synthesized channel seen by input index l of an n-block.

    Realized by the branch recursion (exact probabilities); outputs with
    identical posteriors are merged after each step, which preserves every
    decision-relevant quantity while keeping alphabets bounded.
    """
    _check_power_of_two(n)
    if not 0 <= l < n:
        raise ValueError(f"index {l} out of range for n={n}")
    width = n.bit_length() - 1
    c = ch
    for j in range(width - 1, -1, -1):
        branch = (l >> j) & 1
        c = channel_plus(c, cap) if branch else channel_minus(c, cap)
        c = merge_outputs(c, merge_tol)
    return c


def bec_split_bhattacharyya(epsilon: float, n: int) -> np.ndarray:
    """Per-index Bhattacharyya values of an erasure channel's splits.

    The two-branch recursion z -> (2z - z^2, z^2), expanded in natural
    index order.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"erasure probability {epsilon} not in [0, 1]")
    _check_power_of_two(n)
    z = np.array([float(epsilon)])
    while len(z) < n:
        z = np.column_stack([2 * z - z * z, z * z]).reshape(-1)
    return z


# ---------------------------------------------------------------------------
# information sets
# ---------------------------------------------------------------------------


def _construction_values(ch: DiscreteChannel, n: int, method: str) -> np.ndarray:
    """Per-index reliability figures (smaller is better).

    Erasure channels are evaluated by the exact recursion.  Other binary
    symmetric channels either go through the erasure surrogate with the
    channel's Bhattacharyya parameter (an upper bound on each split's
    parameter, hence conservative) or, for small n, exact splitting.
    """
    if method not in ("auto", "exact", "surrogate"):
        raise ValueError(f"unknown construction method {method!r}")
    if ch.input_size != 2:
        raise ValueError("information set construction expects a binary channel")
    if method == "exact":
        return np.array(
            [bhattacharyya(split_channel_exact(ch, n, l)) for l in range(n)]
        )
    eps = is_bec_like(ch)
    if eps is None or method == "surrogate":
        eps = bhattacharyya(ch)
    return bec_split_bhattacharyya(eps, n)


def _select_smallest(z: np.ndarray, size: int) -> list[int]:
    order = np.argsort(z, kind="stable")
    return sorted(int(i) for i in order[:size])


def build_info_set(
    ch: DiscreteChannel,
    n: int,
    rate: float | None = None,
    threshold: float | None = None,
    method: str = "auto",
) -> InformationSet:
    """Choose the indices with the smallest split reliability figures.

    Exactly one of `rate` (target |A| = floor(n * rate)) and `threshold`
    (keep every index with figure <= threshold) must be given.
    """
    if (rate is None) == (threshold is None):
        raise ValueError("specify exactly one of rate and threshold")
    z = _construction_values(ch, n, method)
    if rate is not None:
        if rate > 1.0 or rate < 0.0:
            raise ValueError(f"rate {rate} not in [0, 1]")
        chosen = _select_smallest(z, int(np.floor(n * rate)))
    else:
        chosen = [int(i) for i in np.flatnonzero(z <= threshold)]
    return InformationSet(n, tuple(sorted(chosen)))


def monotone_info_sets(
    channels,
    n: int,
    rates=None,
    threshold: float | None = None,
    verify: bool = True,
    method: str = "auto",
    size_multiple: int = 1,
) -> list[InformationSet]:
    """Nested information sets for a degradation-ordered channel list.

    `channels[0]` is the least degraded channel; each later channel must be
    a degraded version of its predecessor (verified by the feasibility
    test unless `verify=False`).  Construction runs worst channel first,
    then augments, so A[S-1] <= ... <= A[0] holds by construction.  Set
    sizes are rounded down to `size_multiple`.
    """
    channels = list(channels)
    s_count = len(channels)
    if s_count == 0:
        raise ValueError("need at least one channel")
    if (rates is None) == (threshold is None):
        raise ValueError("specify exactly one of rates and threshold")
    if rates is not None and len(rates) != s_count:
        raise ValueError("one rate per channel required")
    if verify:
        for s in range(s_count - 1):
            if is_degraded(channels[s], channels[s + 1]) is None:
                raise ValueError(
                    f"channel {s + 1} is not a degraded version of channel {s}"
                )
    zs = [_construction_values(ch, n, method) for ch in channels]
    sets: list[InformationSet | None] = [None] * s_count
    prev: set[int] = set()
    for s in range(s_count - 1, -1, -1):
        z = zs[s]
        if threshold is not None:
            size = int(np.count_nonzero(z <= threshold))
        else:
            if rates[s] > 1.0 or rates[s] < 0.0:
                raise ValueError(f"rate {rates[s]} not in [0, 1]")
            size = int(np.floor(n * rates[s]))
        size -= size % size_multiple
        if size < len(prev):
            raise ValueError(
                f"set size for channel {s} ({size}) is below the nested "
                f"minimum {len(prev)}; rate targets must follow the "
                "degradation order"
            )
        chosen = set(prev)
        for idx in np.argsort(z, kind="stable"):
            if len(chosen) >= size:
                break
            chosen.add(int(idx))
        sets[s] = InformationSet(n, tuple(sorted(chosen)))
        prev = chosen
    return sets


# ---------------------------------------------------------------------------
# successive cancellation decoding
# ---------------------------------------------------------------------------


def _normalize(L: np.ndarray) -> np.ndarray:
    if L.dtype == object:
        # exact mode: scaling is unnecessary and normalization would only
        # grow the rationals
        return L
    s = L.sum(axis=-1, keepdims=True)
    s[s == 0.0] = 1.0
    return L / s


def _combine_minus(L1: np.ndarray, L2: np.ndarray) -> np.ndarray:
    q = L1.shape[-1]
    out = np.zeros(L1.shape, dtype=L1.dtype)
    for v in range(q):
        acc = out[:, :, v]
        for c in range(q):
            acc += L1[:, :, v ^ c] * L2[:, :, c]
    return _normalize(out)


def _combine_plus(L1: np.ndarray, L2: np.ndarray, a: np.ndarray) -> np.ndarray:
    q = L1.shape[-1]
    out = np.zeros(L1.shape, dtype=L1.dtype)
    for x in range(q):
        picked = np.take_along_axis(L1, (a ^ x)[:, :, None], axis=2)[:, :, 0]
        out[:, :, x] = picked * L2[:, :, x]
    return _normalize(out)


def _sc_leaves(L: np.ndarray):
    """Recursive likelihood stream.

    Yields the (batch, q) likelihood vector of each input index in order;
    the driver sends back the decided symbols, and the generator returns
    the re-encoded codeword of its block.
    """
    batch, size, q = L.shape
    if size == 1:
        decided = yield L[:, 0, :]
        return decided.reshape(batch, 1)
    half = size // 2
    first, second = L[:, :half], L[:, half:]
    left = yield from _sc_leaves(_combine_minus(first, second))
    right = yield from _sc_leaves(_combine_plus(first, second, left))
    return np.concatenate([left ^ right, right], axis=1)


class ScDecoder:
    """Stepwise successive cancellation decoder over a batch of words.

    Indices must be visited in order 0..n-1; each is either decided from
    the split-channel likelihoods (`decide`) or supplied externally
    (`inject`), which is how frozen symbols resolved mid-decode enter.
    Total work is O(n log n) likelihood combines per word.

    With `exact=True` all arithmetic runs on rationals, so likelihood ties
    are broken exactly (ties resolve to the smallest symbol value).
    """

    def __init__(self, channel: DiscreteChannel, received, exact: bool = False):
        received = np.asarray(received, dtype=np.int64)
        if received.ndim == 1:
            received = received[None, :]
        if received.ndim != 2:
            raise ValueError("received must be a vector or a batch of vectors")
        batch, n = received.shape
        _check_power_of_two(n)
        if np.any(received < 0) or np.any(received >= channel.output_size):
            raise ValueError("received symbol out of the output alphabet")
        q = channel.input_size
        _check_power_of_two(q)
        w = channel.transitions
        if exact:
            w = np.array(
                [[Fraction(p) for p in row] for row in w], dtype=object
            )
        self.n = n
        self.q = q
        self.batch = batch
        self._decided = np.zeros((batch, n), dtype=np.int64)
        self._i = 0
        self._codeword = None
        self._gen = _sc_leaves(w.T[received])
        self._pending = next(self._gen)

    @property
    def next_index(self) -> int:
        return self._i

    @property
    def finished(self) -> bool:
        return self._pending is None

    def leaf_likelihoods(self) -> np.ndarray:
        if self._pending is None:
            raise RuntimeError("decoder already finished")
        return self._pending

    def _advance(self, values: np.ndarray) -> None:
        self._decided[:, self._i] = values
        self._i += 1
        try:
            self._pending = self._gen.send(values)
        except StopIteration as stop:
            self._pending = None
            self._codeword = stop.value

    def decide(self) -> np.ndarray:
        """Pick the likelihood-maximizing symbol at the current index."""
        if self._pending is None:
            raise RuntimeError("decoder already finished")
        values = np.argmax(self._pending, axis=-1).astype(np.int64)
        self._advance(values)
        return values

    def inject(self, values, index: int | None = None) -> np.ndarray:
        """Supply the current index's symbols (frozen positions)."""
        if self._pending is None:
            raise RuntimeError("decoder already finished")
        if index is not None and index != self._i:
            raise RuntimeError(
                f"out-of-order stepping: at index {self._i}, got {index}"
            )
        values = np.broadcast_to(
            np.asarray(values, dtype=np.int64), (self.batch,)
        ).copy()
        if np.any(values < 0) or np.any(values >= self.q):
            raise ValueError("injected symbol out of range")
        self._advance(values)
        return values

    @property
    def decisions(self) -> np.ndarray:
        """All symbols fixed so far, decided and injected alike."""
        return self._decided[:, : self._i]

    @property
    def codeword(self) -> np.ndarray:
        """Re-encoded transform output; available once finished."""
        if self._codeword is None:
            raise RuntimeError("decoder has not finished")
        return self._codeword


def sc_decode(
    transform: PolarTransform,
    info_set: InformationSet,
    channel: DiscreteChannel,
    received,
    resolver=None,
    exact: bool = False,
) -> np.ndarray:
    """One-shot successive cancellation decode of a single word.

    `resolver(index, decided_prefix) -> symbol` supplies frozen symbols;
    it defaults to all-zero.  The result carries the resolver's symbols
    off the information set and likelihood decisions on it.
    """
    received = np.asarray(received, dtype=np.int64)
    if received.shape != (transform.n,):
        raise ValueError(f"received must have length {transform.n}")
    if info_set.n != transform.n:
        raise ValueError("information set and transform disagree on n")
    dec = ScDecoder(channel, received[None, :], exact=exact)
    out = np.zeros(transform.n, dtype=np.int64)
    prefix: list[int] = []
    for i in range(transform.n):
        if i in info_set:
            v = int(dec.decide()[0])
        else:
            v = 0 if resolver is None else int(resolver(i, tuple(prefix)))
            dec.inject(v, index=i)
        out[i] = v
        prefix.append(v)
    return out


def static_resolver(frozen_by_index):
    """Resolver closure over a {index: symbol} mapping (missing -> 0)."""

    def resolve(index, prefix):
        return frozen_by_index.get(index, 0)

    return resolve


def create_sc_state(channel: DiscreteChannel, received, exact: bool = False) -> ScDecoder:
    """Stepwise decoder over a single received word."""
    received = np.asarray(received, dtype=np.int64)
    if received.ndim != 1:
        raise ValueError("create_sc_state expects a single word")
    return ScDecoder(channel, received[None, :], exact=exact)


def sc_decoder_step(state: ScDecoder) -> tuple[int, int]:
    """Decide the next index; returns (index, symbol)."""
    i = state.next_index
    return i, int(state.decide()[0])


# ---------------------------------------------------------------------------
# exact error-event probabilities (small instances)
# ---------------------------------------------------------------------------


def error_event_probability(
    ch: DiscreteChannel,
    n: int,
    l: int,
    d: int,
    u,
    cap: int = 1 << 22,
) -> float:
    """Probability that index l's split-channel likelihood under the true
    symbol is <= the likelihood under the offset symbol u_l + d, given the
    transmitted input vector u.

    Evaluated by exact rational enumeration; ties therefore count toward
    the event exactly as written.
    """
    _check_power_of_two(n)
    q, y_size = ch.input_size, ch.output_size
    _check_power_of_two(q)
    u = np.asarray(u, dtype=np.int64)
    if u.shape != (n,):
        raise ValueError(f"input vector must have length {n}")
    if np.any(u < 0) or np.any(u >= q):
        raise ValueError("input symbol out of range")
    if not 0 <= l < n:
        raise ValueError(f"index {l} out of range")
    if not 1 <= d < q:
        raise ValueError(f"offset d={d} must be a nonzero symbol")
    cost = (y_size**n) * (q ** (n - 1 - l)) * 2
    if cost > cap:
        raise ResourceLimitError(f"enumeration cost {cost} exceeds cap {cap}")

    wf = [[Fraction(p) for p in row] for row in ch.transitions]
    prefix = [int(v) for v in u[:l]]
    true_sym = int(u[l])
    alt_sym = true_sym ^ d

    def codewords_for(symbol: int) -> list[np.ndarray]:
        words = []
        for suffix in itertools.product(range(q), repeat=n - 1 - l):
            vec = np.array(prefix + [symbol] + list(suffix), dtype=np.int64)
            words.append(polar_encode(vec))
        return words

    cw_true = codewords_for(true_sym)
    cw_alt = codewords_for(alt_sym)
    x_sent = polar_encode(u)

    total = Fraction(0)
    for y in itertools.product(range(y_size), repeat=n):
        p_y = Fraction(1)
        for t in range(n):
            p_y *= wf[x_sent[t]][y[t]]
            if p_y == 0:
                break
        if p_y == 0:
            continue

        def split_mass(words) -> Fraction:
            mass = Fraction(0)
            for cw in words:
                term = Fraction(1)
                for t in range(n):
                    term *= wf[cw[t]][y[t]]
                    if term == 0:
                        break
                mass += term
            return mass

        if split_mass(cw_true) <= split_mass(cw_alt):
            total += p_y
    return float(total)


# ---------------------------------------------------------------------------
# symbol-level erasure evolution for GF(2^m) constructions
# ---------------------------------------------------------------------------


def _subspaces(m: int) -> list[frozenset]:
    """All GF(2)-linear subspaces of the m-bit vector space (m <= 4)."""
    q = 1 << m
    seen = {frozenset({0})}
    frontier = [frozenset({0})]
    while frontier:
        nxt = []
        for space in frontier:
            for g in range(1, q):
                if g in space:
                    continue
                # adjoining one generator to a subspace doubles it
                cand = frozenset(space | {v ^ g for v in space})
                if cand not in seen:
                    seen.add(cand)
                    nxt.append(cand)
        frontier = nxt
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def symbol_erasure_split_reliability(eps_bit: float, m: int, n: int) -> np.ndarray:
    """Per-index probability that a GF(2^m) split input stays ambiguous
    when each of the m underlying binary uses erases independently.

    Knowledge of a symbol observed through erasures is always "value up to
    a coset of a subspace"; the kernel maps subspace pairs to their sum
    (first input) or intersection (second input), so the evolution is
    exact on the subspace distribution.  The figure returned for an index
    is the probability its residual subspace is nontrivial, which upper
    bounds the symbol decision error there.  Used to build information
    sets for the GF(2^m) scheme.
    """
    if m < 1 or m > 4:
        raise ValueError("supported for 1 <= m <= 4")
    if not 0.0 <= eps_bit <= 1.0:
        raise ValueError(f"bit erasure probability {eps_bit} not in [0, 1]")
    _check_power_of_two(n)
    subs = _subspaces(m)
    index_of = {s: i for i, s in enumerate(subs)}
    nsub = len(subs)

    def span_of(a: frozenset, b: frozenset) -> frozenset:
        span = set(a)
        for g in b:
            span |= {v ^ g for v in span}
        return frozenset(span)

    sum_map = np.zeros((nsub, nsub), dtype=np.int64)
    int_map = np.zeros((nsub, nsub), dtype=np.int64)
    for i, a in enumerate(subs):
        for j, b in enumerate(subs):
            sum_map[i, j] = index_of[span_of(a, b)]
            int_map[i, j] = index_of[frozenset(a & b)]
    scatter_sum = np.zeros((nsub * nsub, nsub))
    scatter_int = np.zeros((nsub * nsub, nsub))
    for i in range(nsub):
        for j in range(nsub):
            scatter_sum[i * nsub + j, sum_map[i, j]] = 1.0
            scatter_int[i * nsub + j, int_map[i, j]] = 1.0

    # initial distribution: erased bit positions span the ambiguity space
    init = np.zeros(nsub)
    for erased in itertools.product((0, 1), repeat=m):
        p = 1.0
        span = {0}
        for pos, e in enumerate(erased):
            p *= eps_bit if e else (1.0 - eps_bit)
            if e:
                unit = 1 << (m - 1 - pos)
                span |= {v ^ unit for v in span}
        init[index_of[frozenset(span)]] += p

    dist = init[None, :]
    while dist.shape[0] < n:
        pair = np.einsum("ai,aj->aij", dist, dist).reshape(dist.shape[0], -1)
        minus = pair @ scatter_sum
        plus = pair @ scatter_int
        dist = np.stack([minus, plus], axis=1).reshape(-1, nsub)
    trivial = index_of[frozenset({0})]
    return 1.0 - dist[:, trivial]
