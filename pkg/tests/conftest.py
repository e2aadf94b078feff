"""Shared fixtures: channels and small codebook/protocol builds reused across
test modules (session-scoped; builds are deterministic)."""

from __future__ import annotations

import numpy as np
import pytest

from wiretap_auth.codebook import Budgets, BuildParams, Codebook, build_codebook
from wiretap_auth.gf import FieldParams
from wiretap_auth.hashing import StinsonFamily
from wiretap_auth.infotheory import Channel
from wiretap_auth.protocol import ProtocolInstance
from wiretap_auth.typicality import TypeP

SEED = 20260809


@pytest.fixture(scope="session")
def bsc05() -> Channel:
    return Channel.bsc(0.05)


@pytest.fixture(scope="session")
def bsc30() -> Channel:
    return Channel.bsc(0.3)


@pytest.fixture(scope="session")
def tiny_codebook() -> Codebook:
    """n=8 book over BSC(0.05)/BSC(0.3): 2x2 cells, exact scoring."""
    bp = BuildParams(
        type_p=TypeP.from_counts([4, 4]),
        w1=Channel.bsc(0.05),
        w2=Channel.bsc(0.3),
        i_rows=2,
        j_cols=2,
        tau=0.3,
        theta=0.25,
        omega=0.5,
        seed=SEED,
    )
    return build_codebook(bp)


@pytest.fixture(scope="session")
def tiny_instance(tiny_codebook) -> ProtocolInstance:
    fam = StinsonFamily(FieldParams.for_size(2), 1)
    return ProtocolInstance(tiny_codebook, fam)


@pytest.fixture(scope="session")
def noiseless_codebook() -> Codebook:
    """Identity main channel, fully noisy wiretap channel, eps=0."""
    bp = BuildParams(
        type_p=TypeP.from_counts([4, 4]),
        w1=Channel.identity(2),
        w2=Channel.fully_noisy(2),
        i_rows=2,
        j_cols=2,
        tau=0.4,
        theta=0.3,
        omega=0.5,
        seed=SEED,
        eps=0.0,
    )
    return build_codebook(bp)


@pytest.fixture(scope="session")
def noiseless_instance(noiseless_codebook) -> ProtocolInstance:
    fam = StinsonFamily(FieldParams.for_size(2), 1)
    return ProtocolInstance(noiseless_codebook, fam)


def handcrafted_codebook() -> Codebook:
    """n=8 book over BSC(0.25) at eps=0 whose columns share a y that decodes
    to row 0 in both columns: the optimal impersonation hits exactly 1/I."""
    bp = BuildParams(
        type_p=TypeP.from_counts([4, 4]),
        w1=Channel.bsc(0.25),
        w2=Channel.fully_noisy(2),
        i_rows=2,
        j_cols=2,
        tau=0.4,
        theta=0.3,
        omega=0.5,
        seed=SEED,
        eps=0.0,
    )
    cells = (
        (((0, 0, 0, 0, 1, 1, 1, 1),), ((1, 0, 0, 1, 0, 0, 1, 1),)),
        (((0, 0, 0, 1, 0, 1, 1, 1),), ((1, 1, 1, 0, 1, 0, 0, 0),)),
    )
    return Codebook(params=bp, r=1, s2=2, eps=0.0, cells=cells, diagnostics={})
