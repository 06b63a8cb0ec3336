"""Brute-force reference computations, independent of the package internals."""

from __future__ import annotations

import itertools
from functools import lru_cache


def compositions(total: int, parts: int):
    """All tuples of ``parts`` positive integers summing to ``total``."""
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0, *cuts, total)
        yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


@lru_cache(maxsize=None)
def subset_max_gaps(K: int, s: int) -> dict[tuple[int, ...], int]:
    """Sieve every gap vector in V_K(s): map each subset it represents to the largest gap seen."""
    best: dict[tuple[int, ...], int] = {}
    for gaps in compositions(K, s):
        for k in range(K):
            members, pos = [], k
            for a in gaps:
                members.append(pos % K)
                pos += a
            A = tuple(sorted(members))
            best[A] = max(best.get(A, 0), max(gaps))
    return best


def bounded_by_definition(K: int, s: int, ell: int) -> list[tuple[int, ...]]:
    return sorted(A for A, g in subset_max_gaps(K, s).items() if g >= ell)


def gap_vectors_for(A: tuple[int, ...], K: int) -> list[tuple[int, tuple[int, ...]]]:
    """Every (anchor, gaps) in V_K(|A|) that represents A, found by sieving."""
    out = []
    for gaps in compositions(K, len(A)):
        for k in range(K):
            members, pos = [], k
            for a in gaps:
                members.append(pos % K)
                pos += a
            if tuple(sorted(members)) == A:
                out.append((k, gaps))
    return sorted(out)


@lru_cache(maxsize=None)
def pascal(a: int, b: int) -> int:
    if b < 0 or a < 0 or b > a:
        return 0
    if b == 0 or b == a:
        return 1
    return pascal(a - 1, b - 1) + pascal(a - 1, b)


def capped_tuples(s: int, cap: int, total: int) -> int:
    return sum(1 for x in itertools.product(range(cap), repeat=s) if sum(x) == total)


def xor_bytes(*chunks: bytes) -> bytes:
    out = bytearray(len(chunks[0]))
    for c in chunks:
        for i, b in enumerate(c):
            out[i] ^= b
    return bytes(out)


def reference_transcript(files, demands, K, m, ell):
    """Delivery by the textbook recipe over python dicts: {T: payload}.

    ``files[n][S]`` is the packet of file n for subset S.
    """
    packets = set(bounded_by_definition(K, m, ell))
    out = {}
    for T in bounded_by_definition(K, m - 1, ell):
        terms = [files[demands[k]][tuple(sorted(T + (k,)))] for k in range(K) if k not in T and tuple(sorted(T + (k,))) in packets]
        out[T] = xor_bytes(*terms)
    return out


def reference_decode(k, files, transcript, demands, K, m, ell):
    """User k's view: cached packets avoid k, the rest is peeled off one message each."""
    packets = bounded_by_definition(K, m, ell)
    packet_set = set(packets)
    cache = {(n, S): files[n][S] for n in range(len(files)) for S in packets if k not in S}
    recovered = {}
    for S in packets:
        if k not in S:
            recovered[S] = cache[(demands[k], S)]
            continue
        T = tuple(x for x in S if x != k)
        others = [
            cache[(demands[j], tuple(sorted(T + (j,))))]
            for j in range(K)
            if j not in T and j != k and tuple(sorted(T + (j,))) in packet_set
        ]
        recovered[S] = xor_bytes(transcript[T], *others)
    return recovered
