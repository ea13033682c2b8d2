"""The three parallel coding schemes over S arbitrarily-assigned channels.

All schemes share the same protection idea: whenever a transform input
index is information-bearing on only d of the S channels, the S symbols
occupying that index across the codewords form a codeword of an (S, d)
MDS code.  Any d received-side symbols then determine the rest, so the
decoder never needs to know which codeword landed on which channel ahead
of time -- it only needs the assignment map itself.

Conventions:

* Channel lists are ordered best first (capacities nonincreasing for the
  degraded scheme).
* `pi` maps channel index s to the codeword label carried on that
  channel: channel s receives codeword pi[s].
* MDS codeword position j corresponds to codeword label j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (
    DiscreteChannel,
    bhattacharyya,
    capacity_uniform,
    is_bec_like,
    product_power,
)
from .gf import FieldSpec, bits_to_symbols, symbols_to_bits
from .mds import MdsFamily, mds_family
from .polar import (
    InformationSet,
    ScDecoder,
    build_info_set,
    monotone_info_sets,
    polar_encode,
    symbol_erasure_split_reliability,
)


class ConstructionError(ValueError):
    """Raised when a scheme cannot be built for the requested channels."""


def _validate_pi(pi, s_count: int) -> tuple[int, ...]:
    pi = tuple(int(v) for v in pi)
    if sorted(pi) != list(range(s_count)):
        raise ValueError(f"pi must be a bijection on 0..{s_count - 1}")
    return pi


def _as_batch(bits, k: int) -> tuple[np.ndarray, bool]:
    bits = np.asarray(bits, dtype=np.int64)
    squeeze = bits.ndim == 1
    if squeeze:
        bits = bits[None, :]
    if bits.ndim != 2 or bits.shape[1] != k:
        raise ValueError(f"expected {k} information bits per message")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("information bits must be 0 or 1")
    return bits, squeeze


def _received_batch(received, s_count: int, uses: int) -> tuple[np.ndarray, bool]:
    arrays = [np.asarray(r, dtype=np.int64) for r in received]
    if len(arrays) != s_count:
        raise ValueError(f"expected {s_count} received sequences")
    squeeze = arrays[0].ndim == 1
    arrays = [a[None, :] if a.ndim == 1 else a for a in arrays]
    for a in arrays:
        if a.ndim != 2 or a.shape[1] != uses:
            raise ValueError(f"each received sequence must have {uses} uses")
    return np.stack(arrays), squeeze


def _check_capacity_order(channels) -> None:
    caps = [capacity_uniform(ch) for ch in channels]
    for s in range(len(caps) - 1):
        if caps[s] < caps[s + 1] - 1e-9:
            raise ConstructionError(
                f"channels must be ordered by nonincreasing capacity; "
                f"channel {s} has {caps[s]:.6f} < {caps[s + 1]:.6f}"
            )


# ---------------------------------------------------------------------------
# degraded channel-after-channel scheme
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StageRecord:
    """What one decoding stage produced (used by tests and diagnostics)."""

    channel: int
    codeword: int
    resolved_layers: dict
    decoded_layers: dict


class DegradedScheme:
    """Channel-after-channel scheme for stochastically degraded lists.

    Layer j (0-based) occupies the index range sets[j] \\ sets[j+1]; a
    layer's symbol rows 0..j are information, rows j+1..S-1 are the MDS
    completions in the dimension-(j+1) family code.  Decoding runs best
    channel first; before stage s the layer s-1 completions reconstruct
    every still-unknown frozen value that stage needs.
    """

    kind = "degraded"

    def __init__(self, channels, info_sets, m: int = 1, b=None, field_poly: int = 0):
        channels = tuple(channels)
        info_sets = tuple(info_sets)
        s_count = len(channels)
        if s_count != len(info_sets):
            raise ValueError("one information set per channel required")
        if s_count < 1:
            raise ValueError("need at least one channel")
        n = info_sets[0].n
        if any(a.n != n for a in info_sets):
            raise ValueError("information sets disagree on block length")
        for s in range(s_count - 1):
            if not info_sets[s + 1].issubset(info_sets[s]):
                raise ValueError(
                    f"information sets must be nested: set {s + 1} is not "
                    f"contained in set {s}"
                )
        field = FieldSpec(m, field_poly)
        if n % m or any(len(a) % m for a in info_sets):
            raise ValueError("n and every set size must be multiples of m")
        k1 = len(info_sets[0])
        if b is None:
            b = np.zeros(n - k1, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if b.shape != (n - k1,):
            raise ValueError(f"frozen vector must have length {n - k1}")
        if np.any((b != 0) & (b != 1)):
            raise ValueError("frozen vector must be binary")
        b.flags.writeable = False

        self.channels = channels
        self.info_sets = info_sets
        self.S = s_count
        self.n = n
        self.m = m
        self.field = field
        self.family: MdsFamily = mds_family(field, s_count)
        self.b = b
        # layer j index block: sets[j] minus sets[j+1] (empty set past the end)
        members = [set(a.indices) for a in info_sets] + [set()]
        self._layers = [
            sorted(members[j] - members[j + 1]) for j in range(s_count)
        ]
        self._frozen_positions = sorted(set(range(n)) - members[0])
        needed = {j + 1 for j in range(s_count - 1) if len(self._layers[j])}
        missing = needed - set(self.family.dims)
        if missing:
            raise ConstructionError(
                f"MDS family over GF(2^{m}) lacks dimensions {sorted(missing)} "
                f"needed for length {s_count}"
            )

    # -- construction -------------------------------------------------------

    @classmethod
    def build(
        cls,
        channels,
        n: int,
        m: int = 1,
        rates=None,
        threshold: float | None = None,
        b=None,
        surrogate: bool = False,
        verify_degraded: bool = True,
        method: str = "auto",
    ) -> "DegradedScheme":
        """Construct sets and assemble the scheme.

        With `surrogate=True` the channels need not be degraded: sets come
        from the erasure surrogates (channels must then be ordered by
        nondecreasing Bhattacharyya parameter).  Otherwise adjacent-pair
        degradation is verified unless `verify_degraded=False`.
        """
        channels = list(channels)
        if surrogate:
            from .compound import erasure_surrogate_sets

            sets = erasure_surrogate_sets(
                channels, n, rates=rates, threshold=threshold, size_multiple=m
            )
        else:
            _check_capacity_order(channels)
            try:
                sets = monotone_info_sets(
                    channels,
                    n,
                    rates=rates,
                    threshold=threshold,
                    verify=verify_degraded,
                    method=method,
                    size_multiple=m,
                )
            except ValueError as exc:
                raise ConstructionError(str(exc)) from None
        return cls(channels, sets, m=m, b=b)

    # -- layout helpers ------------------------------------------------------

    @property
    def info_bit_count(self) -> int:
        return sum(len(a) for a in self.info_sets)

    def layer_indices(self, j: int) -> list[int]:
        return self._layers[j]

    def _info_cells(self):
        """(row, layer) pairs that hold plain information bits, in the
        deterministic fill order: row-major, outermost layer last."""
        for s in range(self.S):
            for j in range(self.S - 1, s - 1, -1):
                yield s, j

    # -- encode --------------------------------------------------------------

    def _fill_u(self, bits: np.ndarray) -> np.ndarray:
        """Scatter info bits and MDS completions into u[label, batch, index]."""
        batch = bits.shape[0]
        u = np.zeros((self.S, batch, self.n), dtype=np.int64)
        pos = 0
        for s, j in self._info_cells():
            width = len(self._layers[j])
            if width:
                u[s][:, self._layers[j]] = bits[:, pos : pos + width]
            pos += width
        # complete each layer's missing rows through the family code
        for j in range(self.S - 1):
            idx = self._layers[j]
            if not idx:
                continue
            dim = j + 1
            code = self.family.code(dim)
            known = np.stack(
                [bits_to_symbols(u[s][:, idx], self.field) for s in range(dim)],
                axis=-1,
            )  # (batch, K, dim)
            full = code.complete_batch(tuple(range(dim)), known)
            for s in range(dim, self.S):
                u[s][:, idx] = symbols_to_bits(full[..., s], self.field)
        return u

    def encode(self, info_bits) -> np.ndarray:
        """Encode k info bits into S codewords of n bits: (S, batch, n)."""
        bits, squeeze = _as_batch(info_bits, self.info_bit_count)
        u = self._fill_u(bits)
        if self._frozen_positions:
            u[:, :, self._frozen_positions] = self.b
        x = polar_encode(u)
        return x[:, 0] if squeeze else x

    # -- decode --------------------------------------------------------------

    def _extract_bits(self, u: np.ndarray) -> np.ndarray:
        batch = u.shape[1]
        out = np.zeros((batch, self.info_bit_count), dtype=np.int64)
        pos = 0
        for s, j in self._info_cells():
            width = len(self._layers[j])
            if width:
                out[:, pos : pos + width] = u[s][:, self._layers[j]]
            pos += width
        return out

    def decode(self, received, pi, trace: bool = False):
        """Recover all information bits from the S received vectors.

        `received[s]` is the output sequence of channel s (which carried
        codeword pi[s]).  Returns the bit array, plus the per-stage trace
        when requested.
        """
        pi = _validate_pi(pi, self.S)
        y, squeeze = _received_batch(received, self.S, self.n)
        batch = y.shape[1]
        u = np.zeros((self.S, batch, self.n), dtype=np.int64)
        records = []
        for s in range(self.S):
            label = pi[s]
            resolved = {}
            if s >= 1:
                j = s - 1
                idx = self._layers[j]
                if idx:
                    code = self.family.code(s)
                    vals = np.stack(
                        [
                            bits_to_symbols(u[pi[t]][:, idx], self.field)
                            for t in range(s)
                        ],
                        axis=-1,
                    )
                    full = code.complete_batch(tuple(pi[t] for t in range(s)), vals)
                    for t in range(s, self.S):
                        u[pi[t]][:, idx] = symbols_to_bits(
                            full[..., pi[t]], self.field
                        )
                    resolved[j] = u[label][:, idx].copy()
            # frozen values for this stage: static vector plus resolved layers
            frozen_vals = np.zeros((batch, self.n), dtype=np.int64)
            if self._frozen_positions:
                frozen_vals[:, self._frozen_positions] = self.b
            for j in range(s):
                idx = self._layers[j]
                if idx:
                    frozen_vals[:, idx] = u[label][:, idx]
            dec = ScDecoder(self.channels[s], y[s])
            info = self.info_sets[s]
            for i in range(self.n):
                if i in info:
                    dec.decide()
                else:
                    dec.inject(frozen_vals[:, i], index=i)
            u[label] = dec.decisions
            if trace:
                records.append(
                    StageRecord(
                        channel=s,
                        codeword=label,
                        resolved_layers=resolved,
                        decoded_layers={
                            j: u[label][:, self._layers[j]].copy()
                            for j in range(s, self.S)
                            if self._layers[j]
                        },
                    )
                )
        bits = self._extract_bits(u)
        if squeeze:
            bits = bits[0]
        return (bits, records) if trace else bits

    def rate(self) -> float:
        return scheme_rate(self)


# ---------------------------------------------------------------------------
# per-index MDS coupling shared by the interleaved and symbol-level schemes
# ---------------------------------------------------------------------------


class _IndexCoupling:
    """Per transform index k: which channels treat k as information, and
    the family code of that dimension."""

    def __init__(self, info_sets, family: MdsFamily):
        self.family = family
        s_count = family.length
        self.n = info_sets[0].n
        self.positions = []
        for k in range(self.n):
            self.positions.append(
                tuple(s for s in range(s_count) if k in info_sets[s])
            )
        needed = {len(p) for p in self.positions if p}
        missing = needed - set(family.dims)
        if missing:
            raise ConstructionError(
                f"MDS family lacks dimensions {sorted(missing)}"
            )

    def complete(self, k: int, labels, symbols: np.ndarray) -> np.ndarray:
        """Codeword at index k from symbols at the given label positions;
        all-zero when nothing is information-bearing there."""
        d = len(labels)
        if d == 0:
            return np.zeros((symbols.shape[0], self.family.length), dtype=np.int64)
        return self.family.code(d).complete_batch(labels, symbols)


def _independent_sets(channels, n, rates, threshold, method) -> list[InformationSet]:
    sets = []
    for idx, ch in enumerate(channels):
        rate = rates[idx] if rates is not None else None
        sets.append(
            build_info_set(ch, n, rate=rate, threshold=threshold, method=method)
        )
    return sets


# ---------------------------------------------------------------------------
# interleaved binary scheme
# ---------------------------------------------------------------------------


class InterleavedScheme:
    """m interleaved binary polar codes per channel; per-index MDS coupling.

    Channel s transmits m concatenated n-bit codewords (m*n uses).  The
    decoder steps all m*S component decoders index-synchronously so that
    each index's MDS completion can hand frozen values to the lagging
    channels before anyone moves on.
    """

    kind = "interleaved"

    def __init__(self, channels, info_sets, m: int, field_poly: int = 0):
        channels = tuple(channels)
        info_sets = tuple(info_sets)
        if len(channels) != len(info_sets):
            raise ValueError("one information set per channel required")
        n = info_sets[0].n
        if any(a.n != n for a in info_sets):
            raise ValueError("information sets disagree on block length")
        self.channels = channels
        self.info_sets = info_sets
        self.S = len(channels)
        self.n = n
        self.m = m
        self.field = FieldSpec(m, field_poly)
        self.family = mds_family(self.field, self.S)
        self.coupling = _IndexCoupling(info_sets, self.family)

    @classmethod
    def build(
        cls,
        channels,
        n: int,
        m: int,
        rates=None,
        threshold: float | None = None,
        method: str = "auto",
    ) -> "InterleavedScheme":
        channels = list(channels)
        if (rates is None) == (threshold is None):
            raise ValueError("specify exactly one of rates and threshold")
        sets = _independent_sets(channels, n, rates, threshold, method)
        return cls(channels, sets, m)

    @property
    def uses_per_channel(self) -> int:
        return self.m * self.n

    @property
    def info_bit_count(self) -> int:
        return self.m * sum(len(a) for a in self.info_sets)

    def _symbol_matrix(self, bits: np.ndarray) -> np.ndarray:
        """(batch, n, S) index-wise MDS codeword symbols from info bits."""
        batch = bits.shape[0]
        c = np.zeros((batch, self.n, self.S), dtype=np.int64)
        pos = 0
        free = {}
        for s in range(self.S):
            for k in self.info_sets[s].indices:
                sym = bits_to_symbols(bits[:, pos : pos + self.m], self.field)
                free[(s, k)] = sym[:, 0]
                pos += self.m
        for k in range(self.n):
            labels = self.coupling.positions[k]
            if not labels:
                continue
            vals = np.stack([free[(s, k)] for s in labels], axis=-1)
            c[:, k, :] = self.coupling.complete(k, labels, vals)
        return c

    def encode(self, info_bits) -> np.ndarray:
        bits, squeeze = _as_batch(info_bits, self.info_bit_count)
        c = self._symbol_matrix(bits)
        batch = bits.shape[0]
        x = np.zeros((self.S, batch, self.m * self.n), dtype=np.int64)
        for s in range(self.S):
            stream = symbols_to_bits(c[:, :, s], self.field)  # (batch, n*m)
            lanes = stream.reshape(batch, self.n, self.m)
            for lane in range(self.m):
                x[s, :, lane * self.n : (lane + 1) * self.n] = polar_encode(
                    lanes[:, :, lane]
                )
        return x[:, 0] if squeeze else x

    def decode(self, received, pi):
        pi = _validate_pi(pi, self.S)
        y, squeeze = _received_batch(received, self.S, self.uses_per_channel)
        batch = y.shape[1]
        decoders = [
            [
                ScDecoder(
                    self.channels[s],
                    y[s][:, lane * self.n : (lane + 1) * self.n],
                )
                for lane in range(self.m)
            ]
            for s in range(self.S)
        ]
        streams = np.zeros((self.S, batch, self.n, self.m), dtype=np.int64)
        for k in range(self.n):
            decoded_labels = []
            decoded_syms = []
            for s in range(self.S):
                if k in self.info_sets[s]:
                    lane_bits = np.stack(
                        [decoders[s][lane].decide() for lane in range(self.m)],
                        axis=-1,
                    )
                    streams[pi[s], :, k, :] = lane_bits
                    decoded_labels.append(pi[s])
                    decoded_syms.append(
                        bits_to_symbols(lane_bits, self.field)[:, 0]
                    )
            if decoded_labels:
                vals = np.stack(decoded_syms, axis=-1)
            else:
                vals = np.zeros((batch, 0), dtype=np.int64)
            cw = self.coupling.complete(k, tuple(decoded_labels), vals)
            for s in range(self.S):
                if k not in self.info_sets[s]:
                    lane_bits = symbols_to_bits(
                        cw[:, pi[s] : pi[s] + 1], self.field
                    )
                    streams[pi[s], :, k, :] = lane_bits
                    for lane in range(self.m):
                        decoders[s][lane].inject(lane_bits[:, lane], index=k)
        bits = self._extract(streams)
        return bits[0] if squeeze else bits

    def _extract(self, streams: np.ndarray) -> np.ndarray:
        batch = streams.shape[1]
        out = np.zeros((batch, self.info_bit_count), dtype=np.int64)
        pos = 0
        for s in range(self.S):
            for k in self.info_sets[s].indices:
                out[:, pos : pos + self.m] = streams[s, :, k, :]
                pos += self.m
        return out

    def rate(self) -> float:
        return scheme_rate(self)


# ---------------------------------------------------------------------------
# symbol-level (GF(2^m) polarization) scheme
# ---------------------------------------------------------------------------


class NonBinaryScheme:
    """One GF(2^m) polar code per channel over the m-use product channel.

    Each transmitted block spends m*n binary channel uses; the receiver
    groups every m uses into one product-channel output.  Index coupling
    is identical to the interleaved scheme but operates on symbols
    natively.
    """

    kind = "nonbinary"

    def __init__(self, channels, info_sets, m: int, field_poly: int = 0):
        channels = tuple(channels)
        info_sets = tuple(info_sets)
        if len(channels) != len(info_sets):
            raise ValueError("one information set per channel required")
        n = info_sets[0].n
        if any(a.n != n for a in info_sets):
            raise ValueError("information sets disagree on block length")
        self.channels = channels
        self.S = len(channels)
        self.n = n
        self.m = m
        self.field = FieldSpec(m, field_poly)
        self.info_sets = info_sets
        self.family = mds_family(self.field, self.S)
        self.coupling = _IndexCoupling(info_sets, self.family)
        self.super_channels = tuple(product_power(ch, m) for ch in channels)

    @classmethod
    def build(
        cls,
        channels,
        n: int,
        m: int,
        rates=None,
        threshold: float | None = None,
    ) -> "NonBinaryScheme":
        """Sets come from the symbol-level erasure evolution, seeded with
        each channel's exact erasure probability when it is an erasure
        channel and its Bhattacharyya parameter otherwise."""
        channels = list(channels)
        if (rates is None) == (threshold is None):
            raise ValueError("specify exactly one of rates and threshold")
        sets = []
        for idx, ch in enumerate(channels):
            eps = is_bec_like(ch)
            if eps is None:
                eps = bhattacharyya(ch)
            z = symbol_erasure_split_reliability(eps, m, n)
            if threshold is not None:
                chosen = [int(i) for i in np.flatnonzero(z <= threshold)]
            else:
                if rates[idx] > 1.0 or rates[idx] < 0.0:
                    raise ValueError(f"rate {rates[idx]} not in [0, 1]")
                size = int(np.floor(n * rates[idx]))
                order = np.argsort(z, kind="stable")
                chosen = sorted(int(i) for i in order[:size])
            sets.append(InformationSet(n, tuple(chosen)))
        return cls(channels, sets, m)

    @property
    def uses_per_channel(self) -> int:
        return self.m * self.n

    @property
    def info_bit_count(self) -> int:
        return self.m * sum(len(a) for a in self.info_sets)

    def encode(self, info_bits) -> np.ndarray:
        bits, squeeze = _as_batch(info_bits, self.info_bit_count)
        batch = bits.shape[0]
        c = np.zeros((batch, self.n, self.S), dtype=np.int64)
        pos = 0
        free = {}
        for s in range(self.S):
            for k in self.info_sets[s].indices:
                free[(s, k)] = bits_to_symbols(
                    bits[:, pos : pos + self.m], self.field
                )[:, 0]
                pos += self.m
        for k in range(self.n):
            labels = self.coupling.positions[k]
            if not labels:
                continue
            vals = np.stack([free[(s, k)] for s in labels], axis=-1)
            c[:, k, :] = self.coupling.complete(k, labels, vals)
        x = np.zeros((self.S, batch, self.m * self.n), dtype=np.int64)
        for s in range(self.S):
            sym_cw = polar_encode(c[:, :, s])
            x[s] = symbols_to_bits(sym_cw, self.field)
        return x[:, 0] if squeeze else x

    def pack_received(self, y_bits: np.ndarray, channel_index: int) -> np.ndarray:
        """Group m consecutive binary-channel outputs into product-channel
        output indices (first use most significant)."""
        y_bits = np.asarray(y_bits, dtype=np.int64)
        base = self.channels[channel_index].output_size
        grouped = y_bits.reshape(y_bits.shape[:-1] + (self.n, self.m))
        out = np.zeros(grouped.shape[:-1], dtype=np.int64)
        for i in range(self.m):
            out = out * base + grouped[..., i]
        return out

    def decode(self, received, pi):
        pi = _validate_pi(pi, self.S)
        y, squeeze = _received_batch(received, self.S, self.uses_per_channel)
        batch = y.shape[1]
        decoders = [
            ScDecoder(self.super_channels[s], self.pack_received(y[s], s))
            for s in range(self.S)
        ]
        symbols = np.zeros((self.S, batch, self.n), dtype=np.int64)
        for k in range(self.n):
            decoded_labels = []
            decoded_syms = []
            for s in range(self.S):
                if k in self.info_sets[s]:
                    sym = decoders[s].decide()
                    symbols[pi[s], :, k] = sym
                    decoded_labels.append(pi[s])
                    decoded_syms.append(sym)
            if decoded_labels:
                vals = np.stack(decoded_syms, axis=-1)
            else:
                vals = np.zeros((batch, 0), dtype=np.int64)
            cw = self.coupling.complete(k, tuple(decoded_labels), vals)
            for s in range(self.S):
                if k not in self.info_sets[s]:
                    sym = cw[:, pi[s]]
                    symbols[pi[s], :, k] = sym
                    decoders[s].inject(sym, index=k)
        bits = self._extract(symbols)
        return bits[0] if squeeze else bits

    def _extract(self, symbols: np.ndarray) -> np.ndarray:
        batch = symbols.shape[1]
        out = np.zeros((batch, self.info_bit_count), dtype=np.int64)
        pos = 0
        for s in range(self.S):
            for k in self.info_sets[s].indices:
                out[:, pos : pos + self.m] = symbols_to_bits(
                    symbols[s, :, k : k + 1], self.field
                )
                pos += self.m
        return out

    def rate(self) -> float:
        return scheme_rate(self)


def scheme_rate(scheme) -> float:
    """Total information bits per channel use, summed over the S channels.

    All three schemes transmit |A^(s)| * m bits in n * m uses on channel
    s, so the m factors cancel.
    """
    return sum(len(a) for a in scheme.info_sets) / scheme.n


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------


def _channel_descriptor(ch: DiscreteChannel) -> str:
    from . import channel as chmod

    eps = is_bec_like(ch)
    if eps is not None and ch == chmod.bec(eps):
        return f"bec {float(eps)!r}"
    if ch.input_size == 2 and ch.output_size == 2:
        p = float(ch.transitions[0, 1])
        if ch == chmod.bsc(p):
            return f"bsc {p!r}"
    flat = " ".join(repr(float(v)) for v in ch.transitions.reshape(-1))
    return f"matrix {ch.input_size} {ch.output_size} {flat}"


def _channel_from_descriptor(text: str) -> DiscreteChannel:
    from . import channel as chmod

    parts = text.split()
    kind = parts[0]
    if kind == "bec":
        return chmod.bec(float(parts[1]))
    if kind == "bsc":
        return chmod.bsc(float(parts[1]))
    if kind == "matrix":
        q, out = int(parts[1]), int(parts[2])
        vals = [float(v) for v in parts[3:]]
        if len(vals) != q * out:
            raise ValueError("matrix descriptor has the wrong entry count")
        return DiscreteChannel(np.array(vals).reshape(q, out))
    raise ValueError(f"unknown channel descriptor {kind!r}")


def scheme_to_manifest(scheme) -> str:
    """Text manifest sufficient to rebuild the scheme bit-exactly."""
    lines = [
        f"scheme {scheme.kind}",
        f"S {scheme.S}",
        f"n {scheme.n}",
        f"m {scheme.m}",
        f"poly 0x{scheme.field.primitive_poly:x}",
    ]
    for ch in scheme.channels:
        lines.append(f"channel {_channel_descriptor(ch)}")
    for a in scheme.info_sets:
        lines.append(f"set {a.to_text()}")
    if scheme.kind == "degraded":
        lines.append("b " + ("".join(str(v) for v in scheme.b) or "-"))
    return "\n".join(lines) + "\n"


def scheme_from_manifest(text: str):
    fields = {}
    channels = []
    sets = []
    b_bits = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        if key == "channel":
            channels.append(_channel_from_descriptor(rest))
        elif key == "set":
            sets.append(InformationSet.from_text(rest))
        elif key == "b":
            b_bits = rest.strip()
        else:
            fields[key] = rest.strip()
    for required in ("scheme", "S", "n", "m", "poly"):
        if required not in fields:
            raise ValueError(f"manifest is missing the {required!r} field")
    kind = fields["scheme"]
    s_count = int(fields["S"])
    n = int(fields["n"])
    m = int(fields["m"])
    poly = int(fields["poly"], 16)
    if len(channels) != s_count or len(sets) != s_count:
        raise ValueError("manifest channel/set count disagrees with S")
    if any(a.n != n for a in sets):
        raise ValueError("manifest sets disagree with n")
    if kind == "degraded":
        if b_bits in (None, "-", ""):
            b = None
        else:
            b = np.array([int(c) for c in b_bits], dtype=np.int64)
        return DegradedScheme(channels, sets, m=m, b=b, field_poly=poly)
    if kind == "interleaved":
        return InterleavedScheme(channels, sets, m, field_poly=poly)
    if kind == "nonbinary":
        return NonBinaryScheme(channels, sets, m, field_poly=poly)
    raise ValueError(f"unknown scheme kind {kind!r}")
