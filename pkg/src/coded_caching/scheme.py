"""Uncoded placement, XOR broadcast delivery and decoding over bounded subsets.

Each file is split into one packet per ell-bounded m-subset S of the users.
User k caches every packet whose subset avoids k.  For each bounded
(m-1)-subset T the server broadcasts the XOR of the packets
``W[d_k, T | {k}]`` over all users k that extend T to a bounded m-subset;
each such user already holds every other term of the XOR and so recovers
its missing packet in one step.

Packets are byte strings of a fixed width and XOR is bytewise, so every bit
position behaves exactly like the binary-field scheme.  File indices are
0-based.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .bounded_subsets import (
    SchemeParams,
    UserSubset,
    canonical,
    enumerate_bounded,
)
from .errors import IntegrityError, ParameterError


@dataclass(frozen=True)
class UserPlan:
    """What user k needs to decode: one row per packet subset containing k."""

    wanted: np.ndarray  # packet ids S with k in S
    wanted_tags: np.ndarray  # tag id of S - {k}, aligned with ``wanted``
    side_slot: np.ndarray  # row of ``wanted`` each side-information term feeds, sorted
    side_user: np.ndarray  # the other user k' of that term
    side_packet: np.ndarray  # packet id of T | {k'}
    side_starts: np.ndarray  # first term of each run of equal ``side_slot``


class SchemeIndex:
    """Packet and message index structure for one parameter triple.

    Packet ids are canonical positions in the list of bounded m-subsets and
    tag ids are canonical positions in the list of bounded (m-1)-subsets.
    """

    def __init__(self, params: SchemeParams) -> None:
        K, m, ell = params.K, params.m, params.ell
        self.params = params
        self.packets: list[UserSubset] = enumerate_bounded(K, m, ell)
        self.tags: list[UserSubset] = enumerate_bounded(K, m - 1, ell)
        self.packet_id = {S: i for i, S in enumerate(self.packets)}
        self.tag_id = {T: i for i, T in enumerate(self.tags)}

        self.neighbors: list[tuple[int, ...]] = []
        pair_tag, pair_user, pair_packet = [], [], []
        for j, T in enumerate(self.tags):
            members = []
            for k in range(K):
                if k in T:
                    continue
                S = tuple(sorted(T + (k,)))
                if S in self.packet_id:
                    members.append(k)
                    pair_tag.append(j)
                    pair_user.append(k)
                    pair_packet.append(self.packet_id[S])
            if not members:
                raise IntegrityError(f"bounded subset {T} has no extending user for {params}")
            self.neighbors.append(tuple(members))

        # pairs are generated tag by tag, so each tag owns a contiguous block
        self.pair_tag = np.asarray(pair_tag, dtype=np.intp)
        self.pair_user = np.asarray(pair_user, dtype=np.intp)
        self.pair_packet = np.asarray(pair_packet, dtype=np.intp)
        self.tag_starts = np.flatnonzero(np.r_[True, np.diff(self.pair_tag) != 0])

        self.membership = np.zeros((len(self.packets), K), dtype=bool)
        for i, S in enumerate(self.packets):
            self.membership[i, list(S)] = True

    @property
    def F(self) -> int:
        return len(self.packets)

    def cached_ids(self, k: int) -> np.ndarray:
        return np.flatnonzero(~self.membership[:, k])

    @lru_cache(maxsize=None)
    def user_plan(self, k: int) -> UserPlan:
        wanted = np.flatnonzero(self.membership[:, k])
        wanted_tags = np.array(
            [self.tag_id[tuple(x for x in self.packets[i] if x != k)] for i in wanted],
            dtype=np.intp,
        )
        slot_of_tag = {int(t): r for r, t in enumerate(wanted_tags)}
        side = sorted(
            (slot_of_tag[int(t)], int(u), int(p))
            for t, u, p in zip(self.pair_tag, self.pair_user, self.pair_packet)
            if u != k and int(t) in slot_of_tag
        )
        slot, user, packet = np.array(side, dtype=np.intp).reshape(-1, 3).T
        starts = np.flatnonzero(np.r_[True, np.diff(slot) != 0]) if len(slot) else slot
        return UserPlan(wanted, wanted_tags, slot, user, packet, starts)


    @lru_cache(maxsize=None)
    def transcript_layout(self, width: int) -> tuple[np.ndarray, np.ndarray]:
        """Serialized-transcript template with zero payloads, and the payload byte offsets."""
        template, payload_pos = [], []
        offset = 0
        for T in self.tags:
            header = struct.pack(f"<I{len(T)}II", len(T), *T, width)
            template.append(header + bytes(width))
            payload_pos.append(np.arange(offset + len(header), offset + len(header) + width))
            offset += len(header) + width
        return np.frombuffer(b"".join(template), dtype=np.uint8), np.concatenate(payload_pos)


@lru_cache(maxsize=256)
def scheme_index(params: SchemeParams) -> SchemeIndex:
    return SchemeIndex(params)


@dataclass
class FileLibrary:
    """N files of F packets each, stored as a ``(N, F, packet_bytes)`` uint8 array."""

    data: np.ndarray

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.uint8)
        if self.data.ndim != 3 or self.data.shape[2] < 1:
            raise ParameterError(f"library must have shape (N, F, packet_bytes), got {self.data.shape}")

    @classmethod
    def random(cls, params: SchemeParams, N: int, packet_bytes: int, rng: np.random.Generator) -> FileLibrary:
        F = scheme_index(params).F
        return cls(rng.integers(0, 256, size=(N, F, packet_bytes), dtype=np.uint8))

    @classmethod
    def zeros(cls, params: SchemeParams, N: int, packet_bytes: int = 1) -> FileLibrary:
        return cls(np.zeros((N, scheme_index(params).F, packet_bytes), dtype=np.uint8))

    @property
    def N(self) -> int:
        return self.data.shape[0]

    @property
    def F(self) -> int:
        return self.data.shape[1]

    @property
    def packet_bytes(self) -> int:
        return self.data.shape[2]


@dataclass
class CacheContents:
    """Packets held by one user: ``data[n, j]`` is file n's packet ``packets[j]``."""

    user: int
    packets: tuple[UserSubset, ...]
    data: np.ndarray
    ids: np.ndarray | None = field(default=None, repr=False)  # packet ids of ``packets``
    column: dict[UserSubset, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.column = {S: j for j, S in enumerate(self.packets)}

    @property
    def packets_per_file(self) -> int:
        return len(self.packets)

    def __len__(self) -> int:
        return self.data.shape[0] * len(self.packets)

    def __contains__(self, key: tuple[int, UserSubset]) -> bool:
        n, S = key
        return 0 <= n < self.data.shape[0] and tuple(S) in self.column

    def get(self, n: int, S: Sequence[int]) -> bytes:
        if (n, tuple(S)) not in self:
            raise IntegrityError(f"user {self.user} has no cached packet ({n}, {tuple(S)})")
        return self.data[n, self.column[tuple(S)]].tobytes()


@dataclass(frozen=True)
class DeliveryMessage:
    tag: UserSubset
    payload: bytes


def _check_demands(d: Sequence[int], params: SchemeParams, N: int) -> np.ndarray:
    demands = np.asarray(d, dtype=np.intp)
    if demands.shape != (params.K,):
        raise ParameterError(f"demand vector must have {params.K} entries, got {len(d)}")
    if demands.size and (demands.min() < 0 or demands.max() >= N):
        raise ParameterError(f"demands must lie in [0, {N}), got {list(d)}")
    return demands


def neighborhood(T: Sequence[int], params: SchemeParams) -> tuple[int, ...]:
    """Users k for which ``T | {k}`` is a bounded m-subset."""
    index = scheme_index(params)
    T = canonical(T, params.K)
    if T not in index.tag_id:
        raise ParameterError(f"{T} is not a bounded {params.m - 1}-subset for {params}")
    return index.neighbors[index.tag_id[T]]


def co_neighborhood(k: int, params: SchemeParams) -> list[UserSubset]:
    """Bounded (m-1)-subsets T with ``T | {k}`` bounded, in canonical order."""
    if not 0 <= k < params.K:
        raise ParameterError(f"user {k} not in Z_{params.K}")
    index = scheme_index(params)
    return [T for T, members in zip(index.tags, index.neighbors) if k in members]


def place(library: FileLibrary, params: SchemeParams) -> list[CacheContents]:
    """Fill each user's cache with the packets whose subset avoids that user."""
    index = scheme_index(params)
    if library.F != index.F:
        raise ParameterError(f"library has {library.F} packets per file, scheme needs {index.F}")
    caches = []
    for k in range(params.K):
        ids = index.cached_ids(k)
        caches.append(
            CacheContents(k, tuple(index.packets[i] for i in ids), library.data[:, ids, :].copy(), ids)
        )
    return caches


def xor_payloads(index: SchemeIndex, data: np.ndarray, demands: np.ndarray) -> np.ndarray:
    """Delivery payloads for a batch of demand vectors.

    ``demands`` has shape ``(D, K)``; the result has shape ``(D, n_tags, width)``
    with tags in canonical order.
    """
    terms = data[demands[:, index.pair_user], index.pair_packet]
    return np.bitwise_xor.reduceat(terms, index.tag_starts, axis=1)


def solve(
    index: SchemeIndex,
    k: int,
    cache: CacheContents,
    payloads: np.ndarray,
    demands: np.ndarray,
) -> np.ndarray:
    """Recover file ``demands[:, k]`` for user k from its cache and a batch of payloads.

    Returns an array of shape ``(D, F, width)``.
    """
    plan = index.user_plan(k)
    ids = cache.ids
    if ids is None:
        try:
            ids = np.array([index.packet_id[S] for S in cache.packets], dtype=np.intp)
        except KeyError as exc:
            raise IntegrityError(f"cache of user {k} holds unknown packet {exc.args[0]}") from None
    cached_ids = index.cached_ids(k)
    if not np.array_equal(ids, cached_ids):
        raise IntegrityError(f"cache of user {k} does not match the placement")
    column = np.full(index.F, -1, dtype=np.intp)
    column[ids] = np.arange(len(ids))
    side_cols = column[plan.side_packet]
    if (side_cols < 0).any():
        missing = index.packets[int(plan.side_packet[np.argmin(side_cols)])]
        raise IntegrityError(f"user {k} lacks side information for packet {missing}")

    solved = payloads[:, plan.wanted_tags].copy()
    if len(plan.side_slot):
        side = cache.data[demands[:, plan.side_user], side_cols]
        grouped = np.bitwise_xor.reduceat(side, plan.side_starts, axis=1)
        solved[:, plan.side_slot[plan.side_starts]] ^= grouped

    out = np.empty((len(demands), index.F, cache.data.shape[2]), dtype=np.uint8)
    out[:, cached_ids] = cache.data[demands[:, k]]
    out[:, plan.wanted] = solved
    return out


def deliver(library: FileLibrary, d: Sequence[int], params: SchemeParams) -> list[DeliveryMessage]:
    """One XOR-coded message per bounded (m-1)-subset, in canonical tag order."""
    index = scheme_index(params)
    if library.F != index.F:
        raise ParameterError(f"library has {library.F} packets per file, scheme needs {index.F}")
    demands = _check_demands(d, params, library.N)
    payloads = xor_payloads(index, library.data, demands[None, :])[0]
    return [DeliveryMessage(T, payloads[j].tobytes()) for j, T in enumerate(index.tags)]


def payload_array(messages: Sequence[DeliveryMessage], index: SchemeIndex, width: int) -> np.ndarray:
    """Arrange received messages by tag id, checking every expected tag is present once."""
    payloads = np.empty((len(index.tags), width), dtype=np.uint8)
    seen = np.zeros(len(index.tags), dtype=bool)
    for msg in messages:
        j = index.tag_id.get(tuple(msg.tag))
        if j is None:
            raise IntegrityError(f"unexpected message tag {msg.tag}")
        if seen[j]:
            raise IntegrityError(f"duplicate message tag {msg.tag}")
        if len(msg.payload) != width:
            raise IntegrityError(f"message {msg.tag} has {len(msg.payload)} bytes, expected {width}")
        payloads[j] = np.frombuffer(msg.payload, dtype=np.uint8)
        seen[j] = True
    if not seen.all():
        raise IntegrityError(f"missing message {index.tags[int(np.argmin(seen))]}")
    return payloads


def decode(
    k: int,
    cache: CacheContents,
    messages: Sequence[DeliveryMessage],
    d: Sequence[int],
    params: SchemeParams,
) -> np.ndarray:
    """Reconstruct file ``d[k]`` for user k as an ``(F, packet_bytes)`` array."""
    index = scheme_index(params)
    if cache.user != k:
        raise ParameterError(f"cache belongs to user {cache.user}, not {k}")
    N, _, width = cache.data.shape
    demands = _check_demands(d, params, N)
    payloads = payload_array(messages, index, width)
    return solve(index, k, cache, payloads[None], demands[None, :])[0]


def serialize_transcript(messages: Sequence[DeliveryMessage]) -> bytes:
    """Length-prefixed records: tag length, tag elements, payload length, payload.

    All integers are little-endian unsigned 32-bit.
    """
    parts = []
    for msg in messages:
        parts.append(struct.pack(f"<I{len(msg.tag)}I", len(msg.tag), *msg.tag))
        parts.append(struct.pack("<I", len(msg.payload)))
        parts.append(msg.payload)
    return b"".join(parts)


def transcript_batch(index: SchemeIndex, payloads: np.ndarray) -> np.ndarray:
    """Serialized transcripts for a ``(D, n_tags, width)`` payload batch, one row each.

    Row i equals ``serialize_transcript`` of the messages for demand vector i.
    """
    template, payload_pos = index.transcript_layout(payloads.shape[2])
    out = np.repeat(template[None, :], len(payloads), axis=0)
    out[:, payload_pos] = payloads.reshape(len(payloads), -1)
    return out


def parse_transcript(blob: bytes) -> list[DeliveryMessage]:
    messages = []
    offset = 0
    try:
        while offset < len(blob):
            (n_tag,) = struct.unpack_from("<I", blob, offset)
            tag = struct.unpack_from(f"<{n_tag}I", blob, offset + 4)
            offset += 4 + 4 * n_tag
            (n_payload,) = struct.unpack_from("<I", blob, offset)
            offset += 4
            payload = blob[offset : offset + n_payload]
            if len(payload) != n_payload:
                raise IntegrityError("truncated transcript payload")
            offset += n_payload
            messages.append(DeliveryMessage(tuple(tag), payload))
    except struct.error as exc:
        raise IntegrityError(f"malformed transcript: {exc}") from None
    return messages
