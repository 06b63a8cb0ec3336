"""Seeded end-to-end trials: random library, placement, delivery, decoding, verification.

Reproducibility contract
------------------------
* Randomness comes from numpy's PCG64 bit generator.  The trial seed feeds a
  ``numpy.random.SeedSequence`` which is split with ``spawn(2)``: the first
  child fills the library (``Generator.integers(0, 256, (N, F, packet_bytes),
  dtype=uint8)``), the second draws random demand vectors
  (``Generator.integers(0, N, (count, K))``).
* Exhaustive demands run through all N**K vectors in lexicographic order.
* The transcript digest is a 64-bit FNV-style rolling checksum over the
  serialized transcripts of every evaluated demand vector, concatenated in
  evaluation order: starting from ``0xcbf29ce484222325``, each byte b updates
  ``h = (h + b) * 0x100000001b3 mod 2**64``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .bounded_subsets import SchemeParams
from .errors import IntegrityError, ParameterError
from .scheme import (
    FileLibrary,
    decode,
    parse_transcript,
    place,
    scheme_index,
    solve,
    transcript_batch,
    xor_payloads,
)

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK64 = (1 << 64) - 1
EXHAUSTIVE_CAP = 10**6
CORRUPTIONS = ("none", "flip", "drop")
BATCH = 64
MAX_RECORDED_FAILURES = 20


def rolling_checksum(data: np.ndarray | bytes, h: int = FNV_OFFSET) -> int:
    """Continue the rolling checksum ``h`` over ``data``.

    Closed form of the byte loop: ``h * P**L + sum(b_i * P**(L - i))`` mod 2**64.
    """
    b = np.frombuffer(data, dtype=np.uint8) if isinstance(data, (bytes, bytearray)) else data.ravel()
    L = len(b)
    if L == 0:
        return h
    powers = np.multiply.accumulate(np.full(L, FNV_PRIME, dtype=np.uint64))
    weighted = int(np.sum(b.astype(np.uint64) * powers[::-1], dtype=np.uint64))
    return (h * pow(FNV_PRIME, L, 1 << 64) + weighted) & MASK64


@dataclass(frozen=True)
class DemandSpec:
    """How the demand vectors of a trial are chosen."""

    kind: str  # "random", "exhaustive" or "explicit"
    count: int = 0
    vectors: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def parse(cls, text: str) -> DemandSpec:
        """Parse ``random:COUNT``, ``exhaustive`` or ``explicit:0,1,0;1,1,0``."""
        kind, _, arg = text.partition(":")
        if kind == "exhaustive" and not arg:
            return cls("exhaustive")
        if kind == "random":
            try:
                count = int(arg)
            except ValueError:
                raise ParameterError(f"bad random demand count in {text!r}") from None
            if count < 1:
                raise ParameterError("random demand count must be >= 1")
            return cls("random", count=count)
        if kind == "explicit" and arg:
            try:
                vectors = tuple(tuple(int(x) for x in v.split(",")) for v in arg.split(";"))
            except ValueError:
                raise ParameterError(f"bad explicit demand list in {text!r}") from None
            return cls("explicit", vectors=vectors)
        raise ParameterError(f"unknown demand mode {text!r}")

    def __str__(self) -> str:
        if self.kind == "random":
            return f"random:{self.count}"
        if self.kind == "explicit":
            return "explicit:" + ";".join(",".join(map(str, v)) for v in self.vectors)
        return self.kind


@dataclass(frozen=True)
class TrialConfig:
    params: SchemeParams
    N: int
    packet_bytes: int = 1
    seed: int = 0
    demands: DemandSpec = DemandSpec("random", count=100)
    corrupt: str = "none"  # replay a tampered transcript: "flip" a byte or "drop" a message

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ParameterError(f"need N >= 1, got {self.N}")
        if self.packet_bytes < 1:
            raise ParameterError(f"need packet_bytes >= 1, got {self.packet_bytes}")
        if not 0 <= self.seed <= MASK64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.corrupt not in CORRUPTIONS:
            raise ParameterError(f"corrupt must be one of {CORRUPTIONS}, got {self.corrupt!r}")
        K = self.params.K
        if self.demands.kind == "exhaustive" and self.N**K > EXHAUSTIVE_CAP:
            raise ParameterError(f"exhaustive mode needs N**K <= {EXHAUSTIVE_CAP}, got {self.N}**{K}")
        for v in self.demands.vectors:
            if len(v) != K or not all(0 <= x < self.N for x in v):
                raise ParameterError(f"explicit demand {v} invalid for K={K}, N={self.N}")

    def as_dict(self) -> dict:
        p = self.params
        return {
            "K": p.K,
            "m": p.m,
            "ell": p.ell,
            "N": self.N,
            "packet_bytes": self.packet_bytes,
            "seed": self.seed,
            "demands": str(self.demands),
            "corrupt": self.corrupt,
        }


@dataclass(frozen=True)
class Failure:
    demands: tuple[int, ...]
    user: int
    packet: tuple[int, ...] | None
    reason: str


@dataclass
class TrialReport:
    config: TrialConfig
    recovered_ok: bool
    messages_sent: int
    packets_cached_per_user_per_file: int
    measured_rate: Fraction
    measured_cache_ratio: Fraction
    transcript_digest: int
    demands_evaluated: int
    failed_demands: int
    failures: list[Failure] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "config": self.config.as_dict(),
            "recovered_ok": self.recovered_ok,
            "messages_sent": self.messages_sent,
            "cache_per_user_per_file": self.packets_cached_per_user_per_file,
            "rate_num": self.measured_rate.numerator,
            "rate_den": self.measured_rate.denominator,
            "digest": f"{self.transcript_digest:016x}",
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"


def demand_batches(cfg: TrialConfig, rng: np.random.Generator) -> Iterator[np.ndarray]:
    K, N = cfg.params.K, cfg.N
    spec = cfg.demands
    if spec.kind == "explicit":
        vectors = np.asarray(spec.vectors, dtype=np.intp).reshape(-1, K)
        for a in range(0, len(vectors), BATCH):
            yield vectors[a : a + BATCH]
    elif spec.kind == "random":
        vectors = rng.integers(0, N, size=(spec.count, K)).astype(np.intp)
        for a in range(0, spec.count, BATCH):
            yield vectors[a : a + BATCH]
    else:
        total = N**K
        place_values = N ** np.arange(K - 1, -1, -1, dtype=np.int64)
        for a in range(0, total, BATCH):
            i = np.arange(a, min(a + BATCH, total), dtype=np.int64)
            yield ((i[:, None] // place_values) % N).astype(np.intp)


def _tamper(blob: bytes, mode: str, record_bytes: int, first_payload: int) -> bytes:
    if mode == "flip":
        return blob[:first_payload] + bytes([blob[first_payload] ^ 0xFF]) + blob[first_payload + 1 :]
    return blob[record_bytes:]


def run_trial(cfg: TrialConfig) -> TrialReport:
    """Simulate placement, delivery and decoding, checking every user's file bytewise."""
    params = cfg.params
    index = scheme_index(params)
    library_seq, demand_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    library = FileLibrary.random(params, cfg.N, cfg.packet_bytes, np.random.Generator(np.random.PCG64(library_seq)))
    demand_rng = np.random.Generator(np.random.PCG64(demand_seq))
    caches = place(library, params)
    per_file = {c.packets_per_file for c in caches}
    if len(per_file) != 1:
        raise IntegrityError(f"users cache different amounts: {sorted(per_file)}")
    cached = per_file.pop()

    template, payload_pos = index.transcript_layout(cfg.packet_bytes)
    record_bytes = int(payload_pos[cfg.packet_bytes - 1]) + 1
    digest = FNV_OFFSET
    failures: list[Failure] = []
    evaluated = failed = 0
    for batch in demand_batches(cfg, demand_rng):
        payloads = xor_payloads(index, library.data, batch)
        blobs = transcript_batch(index, payloads)
        digest = rolling_checksum(blobs, digest)
        bad = np.zeros(len(batch), dtype=bool)
        for k in range(params.K):
            wanted = library.data[batch[:, k]]
            if cfg.corrupt == "none":
                got = solve(index, k, caches[k], payloads, batch)
                rows = [(i, got[i]) for i in np.flatnonzero((got != wanted).any(axis=(1, 2)))]
            else:
                rows = []
                for i in range(len(batch)):
                    received = parse_transcript(
                        _tamper(blobs[i].tobytes(), cfg.corrupt, record_bytes, int(payload_pos[0]))
                    )
                    try:
                        file = decode(k, caches[k], received, batch[i], params)
                    except IntegrityError as exc:
                        rows.append((i, str(exc)))
                        continue
                    if not np.array_equal(file, wanted[i]):
                        rows.append((i, file))
            for i, got_i in rows:
                bad[i] = True
                if len(failures) >= MAX_RECORDED_FAILURES:
                    continue
                d = tuple(int(x) for x in batch[i])
                if isinstance(got_i, str):
                    failures.append(Failure(d, k, None, f"integrity error: {got_i}"))
                else:
                    j = int(np.flatnonzero((got_i != wanted[i]).any(axis=1))[0])
                    failures.append(Failure(d, k, index.packets[j], "decoded packet differs"))
        evaluated += len(batch)
        failed += int(bad.sum())

    return TrialReport(
        config=cfg,
        recovered_ok=failed == 0,
        messages_sent=len(index.tags),
        packets_cached_per_user_per_file=cached,
        measured_rate=Fraction(len(index.tags), index.F),
        measured_cache_ratio=Fraction(cached, index.F),
        transcript_digest=digest,
        demands_evaluated=evaluated,
        failed_demands=failed,
        failures=failures,
    )


def valid_params(K_max: int) -> Iterator[SchemeParams]:
    """Every valid (K, m, ell) with K <= K_max, ordered by K, then m, then ell."""
    for K in range(3, K_max + 1):
        for m in range(2, K):
            for ell in range(1, K - m + 2):
                yield SchemeParams(K, m, ell)


@dataclass(frozen=True)
class GridRow:
    params: SchemeParams
    passed: int
    failed: int
    failures: tuple[Failure, ...] = ()


def verify_grid(
    K_max: int,
    N: int,
    packet_bytes: int = 1,
    count: int = 100,
    seed: int = 0,
    corrupt: str = "none",
) -> list[GridRow]:
    """Run a random-demand trial for every valid parameter triple with K <= K_max."""
    rows = []
    for params in valid_params(K_max):
        cfg = TrialConfig(params, N, packet_bytes, seed, DemandSpec("random", count=count), corrupt)
        report = run_trial(cfg)
        rows.append(
            GridRow(
                params,
                report.demands_evaluated - report.failed_demands,
                report.failed_demands,
                tuple(report.failures),
            )
        )
    return rows
