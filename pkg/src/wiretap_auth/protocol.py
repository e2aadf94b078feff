"""The authentication protocol: shared keys, tagging + codeword transmission
on Alice's side, tag recomputation + column decoding + cell membership on
Bob's side, and honest-session measurement.

A message is a GF(q)-tuple of the hash family's native width.  Alice hashes
the message to a tag, embeds the tag into a codebook column, and sends a
uniformly random codeword of cell (k1, column) over the wiretap channel; the
message itself travels on the noiseless channel.  Bob recomputes the tag from
the received message and accepts iff his channel output decodes, within the
tag's column, to a codeword in his own key row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codebook import Codebook, ColumnCode, typicality_decode, wilson_interval
from .hashing import HashKey, StinsonFamily, hash_tag, pad_message
from .infotheory import Channel, Sequence, sample_channel

Message = tuple[int, ...]


@dataclass(frozen=True)
class SharedKey:
    k0: HashKey
    k1: int


@dataclass(eq=False)
class ProtocolInstance:
    codebook: Codebook
    family: StinsonFamily
    eps: float | None = None  # verification eps; defaults to the build eps
    tag_embed: tuple[int, ...] | None = None  # tag -> column; identity default

    def __post_init__(self):
        q = self.family.q
        if q > self.codebook.j_cols:
            raise ValueError(
                f"tag space size {q} exceeds {self.codebook.j_cols} columns"
            )
        if self.eps is None:
            self.eps = self.codebook.eps
        if self.tag_embed is None:
            self.tag_embed = tuple(range(q))
        if len(set(self.tag_embed)) != q or len(self.tag_embed) != q:
            raise ValueError("tag_embed must be injective on the tag space")
        if any(not (0 <= j < self.codebook.j_cols) for j in self.tag_embed):
            raise ValueError("tag_embed target outside column range")
        self._columns: dict[int, ColumnCode] = {}

    def column_of_tag(self, tag: int) -> int:
        return self.tag_embed[tag]

    def column(self, j: int) -> ColumnCode:
        if j not in self._columns:
            col = self.codebook.column(j)
            if self.eps != self.codebook.eps:
                col = ColumnCode(col.j, col.codewords, col.i_rows, col.r, col.w1, self.eps)
            self._columns[j] = col
        return self._columns[j]

    def tag_of(self, key: SharedKey, m: Message) -> int:
        return hash_tag(self.family, key.k0, m)


@dataclass(frozen=True)
class SessionTranscript:
    m: Message
    m_received: Message
    tag: int
    x: Sequence
    y: Sequence
    z: Sequence
    accepted: bool

    def to_json_dict(self) -> dict:
        return {
            "m": list(self.m),
            "m_received": list(self.m_received),
            "tag": self.tag,
            "x": str(self.x),
            "y": str(self.y),
            "z": str(self.z),
            "accepted": self.accepted,
        }


def keygen(inst: ProtocolInstance, rng: np.random.Generator) -> SharedKey:
    """Uniform independent (k0, k1)."""
    return SharedKey(
        k0=inst.family.random_key(rng),
        k1=int(rng.integers(inst.codebook.i_rows)),
    )


def encode_bytes(fam: StinsonFamily, data: bytes) -> Message:
    """Injective byte-string encoding: 0x01-prefixed base-q digits, then the
    terminal-1 padding.  Do not mix with raw full-width tuples in one
    instance."""
    value = int.from_bytes(b"\x01" + data, "big")
    digits: list[int] = []
    while value:
        digits.append(value % fam.q)
        value //= fam.q
    digits.reverse()
    if len(digits) >= fam.message_width:
        raise ValueError(
            f"{len(data)} bytes need {len(digits)} base-{fam.q} digits; "
            f"width {fam.message_width} leaves no room for padding"
        )
    return pad_message(tuple(digits), fam)


def alice_authenticate(
    inst: ProtocolInstance, key: SharedKey, m: Message, rng: np.random.Generator
) -> tuple[Message, Sequence]:
    """Tag the message and draw a uniform codeword from cell (k1, column)."""
    tag = inst.tag_of(key, m)
    j = inst.column_of_tag(tag)
    cell = inst.codebook.cell(key.k1, j)
    cw = cell[int(rng.integers(len(cell)))]
    return m, Sequence(inst.codebook.params.type_p.alphabet, cw)


def bob_verify(
    inst: ProtocolInstance, key: SharedKey, m_received: Message, y: Sequence
) -> bool:
    """Accept iff y decodes, in the recomputed tag's column, to a codeword of
    Bob's own key row.  A decode of bottom, or of a codeword in a different
    row, rejects."""
    tag = inst.tag_of(key, m_received)
    col = inst.column(inst.column_of_tag(tag))
    idx = typicality_decode(col, y)
    return idx is not None and col.row_of(idx) == key.k1


def run_honest_session(
    inst: ProtocolInstance,
    key: SharedKey,
    m: Message,
    rng: np.random.Generator,
    w1: Channel | None = None,
    w2: Channel | None = None,
) -> SessionTranscript:
    """Alice authenticates, both channel outputs are sampled, Bob verifies
    the unmodified message."""
    w1 = w1 if w1 is not None else inst.codebook.params.w1
    w2 = w2 if w2 is not None else inst.codebook.params.w2
    m, x = alice_authenticate(inst, key, m, rng)
    y = sample_channel(x, w1, rng)
    z = sample_channel(x, w2, rng)
    accepted = bob_verify(inst, key, m, y)
    return SessionTranscript(
        m=m,
        m_received=m,
        tag=inst.tag_of(key, m),
        x=x,
        y=y,
        z=z,
        accepted=accepted,
    )


@dataclass(frozen=True)
class CompletenessEstimate:
    value: float
    lo: float
    hi: float
    trials: int


def completeness_error(
    inst: ProtocolInstance,
    trials: int,
    rng: np.random.Generator,
    key: SharedKey | None = None,
    message_sampler=None,
    w1: Channel | None = None,
) -> CompletenessEstimate:
    """Fraction of honest sessions rejected, with a 95% Wilson interval.

    With key=None a fresh key is drawn per session; otherwise the given key
    is reused throughout.
    """
    if message_sampler is None:
        message_sampler = inst.family.random_message
    rejections = 0
    for _ in range(trials):
        k = key if key is not None else keygen(inst, rng)
        t = run_honest_session(inst, k, message_sampler(rng), rng, w1=w1)
        if not t.accepted:
            rejections += 1
    lo, hi = wilson_interval(rejections, trials)
    return CompletenessEstimate(rejections / trials, lo, hi, trials)
