"""Man-in-the-middle game against the protocol: substitution (Type I) and
impersonation (Type II) attacks, pluggable strategies, an exact optimal
impersonation oracle at tiny scale, and exact key-leakage functionals.

The game bookkeeping mirrors the security argument's event split: a Type I
attack that is accepted either collides on the tag (col) or succeeds despite
distinct tags (mis), and per trial
    succ(game) <= succ(collision-only game) + #mis
holds as a boolean identity on the recorded events.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .codebook import BudgetExceededError, wilson_interval
from .hashing import hash_tag, worst_collision_pair
from .infotheory import (
    Channel,
    JointDistribution,
    Sequence,
    check_csiszar_bound,
    conditional_statistical_distance,
    mutual_information,
    sample_channel,
    CsiszarBoundReport,
)
from .protocol import (
    Message,
    ProtocolInstance,
    SharedKey,
    alice_authenticate,
    bob_verify,
    keygen,
    typicality_decode,
)
from .typicality import block_probs, cond_typical_mask, output_grid


class StrategyContractError(RuntimeError):
    """A substitution strategy emitted m' = m."""


@dataclass
class AdversaryView:
    """What the attacker has seen so far: wiretap outputs per session and
    Bob's decision bit for every prior attack.  Grows append-only."""

    observed: list[tuple[Message, Sequence]] = field(default_factory=list)
    decision_bits: list[bool] = field(default_factory=list)


@dataclass(frozen=True)
class Type1Action:
    session: int  # 1-based session whose message gets substituted
    strategy: str


@dataclass(frozen=True)
class Type2Action:
    after_session: int  # 0 = before any honest session
    strategy: str


@dataclass(frozen=True)
class AttackPlan:
    schedule: tuple[Type1Action | Type2Action, ...]
    max_attacks: int | None = None

    def validate(self, num_sessions: int):
        limit = self.max_attacks if self.max_attacks is not None else len(self.schedule)
        if limit < len(self.schedule):
            raise ValueError("schedule longer than max_attacks")
        for action in self.schedule:
            if isinstance(action, Type1Action):
                if not (1 <= action.session <= num_sessions):
                    raise ValueError(f"Type I action bound to missing session {action.session}")
            elif isinstance(action, Type2Action):
                if not (0 <= action.after_session <= num_sessions):
                    raise ValueError("Type II action scheduled outside the session range")
            else:
                raise TypeError(f"unknown action {action!r}")


@dataclass(frozen=True)
class AttackRecord:
    kind: int  # 1 substitution / 2 impersonation
    success: bool
    tag_collision: bool | None  # Type I only
    mis_event: bool | None  # Type I only: success without collision


@dataclass(frozen=True)
class AttackOutcome:
    records: tuple[AttackRecord, ...]
    success_any: bool
    gamma_prime_success: bool  # Type I successes replaced by their col events
    mis_count: int
    honest_accepts: tuple[bool, ...]

    def accounting_identity_holds(self) -> bool:
        return int(self.success_any) <= int(self.gamma_prime_success) + self.mis_count


@dataclass(eq=False)
class GameConfig:
    instance: ProtocolInstance
    num_sessions: int
    plan: AttackPlan
    w1: Channel | None = None
    w2: Channel | None = None
    message_sampler=None
    fixed_messages: tuple[Message, ...] | None = None
    key: SharedKey | None = None  # None: fresh key per game

    def __post_init__(self):
        self.plan.validate(self.num_sessions)
        if self.w1 is None:
            self.w1 = self.instance.codebook.params.w1
        if self.w2 is None:
            self.w2 = self.instance.codebook.params.w2
        if self.fixed_messages is not None and len(self.fixed_messages) < self.num_sessions:
            raise ValueError("not enough fixed messages for the session count")

    def message_for(self, session: int, rng: np.random.Generator) -> Message:
        if self.fixed_messages is not None:
            return self.fixed_messages[session - 1]
        if self.message_sampler is not None:
            return self.message_sampler(rng)
        return self.instance.family.random_message(rng)


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------


class UniformSubstitution:
    """Type I: uniformly random message distinct from the current one."""

    def __init__(self, inst: ProtocolInstance):
        self.inst = inst

    def substitute(self, view: AdversaryView, m: Message, rng: np.random.Generator) -> Message:
        fam = self.inst.family
        while True:
            cand = fam.random_message(rng)
            if cand != m:
                return cand


class AdversarialPairSubstitution:
    """Type I: play the message pair with the highest key-averaged tag
    collision probability (precomputed exhaustively; tiny scale)."""

    def __init__(self, inst: ProtocolInstance):
        self.inst = inst
        m_a, m_b, prob = worst_collision_pair(inst.family)
        self.pair = (m_a, m_b)
        self.collision_prob = prob

    def substitute(self, view: AdversaryView, m: Message, rng: np.random.Generator) -> Message:
        m_a, m_b = self.pair
        if m == m_a:
            return m_b
        return m_a


class RandomCodewordInjection:
    """Type II: inject a uniformly random codeword with a random message."""

    def __init__(self, inst: ProtocolInstance):
        self.inst = inst
        self.codewords = inst.codebook.all_codewords()

    def inject(self, view: AdversaryView, rng: np.random.Generator) -> tuple[Message, tuple[int, ...]]:
        m_hat = self.inst.family.random_message(rng)
        y_hat = self.codewords[int(rng.integers(len(self.codewords)))]
        return m_hat, y_hat


class ReplayZInjection:
    """Type II: replay the last observed message with its wiretap output
    re-encoded as the nearest codeword (Hamming distance, lexicographic
    tie-break).  Falls back to random injection with an empty view."""

    def __init__(self, inst: ProtocolInstance):
        self.inst = inst
        self.codewords = sorted(inst.codebook.all_codewords())
        self.fallback = RandomCodewordInjection(inst)

    def inject(self, view: AdversaryView, rng: np.random.Generator) -> tuple[Message, tuple[int, ...]]:
        if not view.observed:
            return self.fallback.inject(view, rng)
        m_last, z_last = view.observed[-1]
        z = z_last.symbols
        best = min(
            self.codewords,
            key=lambda cw: (sum(a != b for a, b in zip(cw, z)), cw),
        )
        return m_last, best


class OracleInjection:
    """Type II: the exact information-theoretically optimal single attack for
    the current view.  Exhaustive; tiny scale only."""

    def __init__(self, inst: ProtocolInstance, budget: int = 1 << 22):
        self.inst = inst
        self.budget = budget

    def inject(self, view: AdversaryView, rng: np.random.Generator) -> tuple[Message, tuple[int, ...]]:
        report = optimal_type2_oracle(self.inst, view.observed, budget=self.budget)
        return report.best_message, report.best_y


STRATEGY_REGISTRY = {
    "uniform_substitution": UniformSubstitution,
    "adversarial_pair_substitution": AdversarialPairSubstitution,
    "random_codeword_injection": RandomCodewordInjection,
    "replay_z_injection": ReplayZInjection,
    "oracle_injection": OracleInjection,
}


# ---------------------------------------------------------------------------
# Game execution
# ---------------------------------------------------------------------------


def run_game(cfg: GameConfig, rng: np.random.Generator) -> AttackOutcome:
    """Execute the session schedule with interleaved attacks.

    Every attack's decision bit is computed by the verifier and appended to
    the adversary's view; Type I records carry the collision/mis split."""
    inst = cfg.instance
    key = cfg.key if cfg.key is not None else keygen(inst, rng)
    view = AdversaryView()
    strategies: dict[str, object] = {}

    def strategy(name: str):
        if name not in strategies:
            strategies[name] = STRATEGY_REGISTRY[name](inst)
        return strategies[name]

    type1_by_session: dict[int, Type1Action] = {}
    type2_after: dict[int, list[Type2Action]] = {}
    for action in cfg.plan.schedule:
        if isinstance(action, Type1Action):
            if action.session in type1_by_session:
                raise ValueError(f"two Type I attacks bound to session {action.session}")
            type1_by_session[action.session] = action
        else:
            type2_after.setdefault(action.after_session, []).append(action)

    records: list[AttackRecord] = []
    honest_accepts: list[bool] = []

    def run_type2(action: Type2Action):
        m_hat, y_hat = strategy(action.strategy).inject(view, rng)
        y_seq = Sequence(cfg.w1.output, tuple(y_hat))
        accepted = bob_verify(inst, key, m_hat, y_seq)
        records.append(AttackRecord(2, accepted, None, None))
        view.decision_bits.append(accepted)

    for action in type2_after.get(0, []):
        run_type2(action)

    for session in range(1, cfg.num_sessions + 1):
        m = cfg.message_for(session, rng)
        _, x = alice_authenticate(inst, key, m, rng)
        y = sample_channel(x, cfg.w1, rng)
        z = sample_channel(x, cfg.w2, rng)
        view.observed.append((m, z))

        if session in type1_by_session:
            action = type1_by_session[session]
            m_sub = strategy(action.strategy).substitute(view, m, rng)
            if m_sub == m:
                raise StrategyContractError(
                    f"strategy {action.strategy!r} returned the original message"
                )
            accepted = bob_verify(inst, key, m_sub, y)
            collided = inst.tag_of(key, m_sub) == inst.tag_of(key, m)
            records.append(
                AttackRecord(1, accepted, collided, accepted and not collided)
            )
            view.decision_bits.append(accepted)
        else:
            honest_accepts.append(bob_verify(inst, key, m, y))

        for action in type2_after.get(session, []):
            run_type2(action)

    success_any = any(r.success for r in records)
    gamma_prime = any(
        (r.kind == 2 and r.success) or (r.kind == 1 and r.tag_collision)
        for r in records
    )
    mis_count = sum(1 for r in records if r.kind == 1 and r.mis_event)
    return AttackOutcome(
        records=tuple(records),
        success_any=success_any,
        gamma_prime_success=gamma_prime,
        mis_count=mis_count,
        honest_accepts=tuple(honest_accepts),
    )


@dataclass(frozen=True)
class RateEstimate:
    rate: float
    lo: float
    hi: float
    count: int
    trials: int


@dataclass(frozen=True)
class SuccessEstimate:
    overall: RateEstimate
    type1_success: RateEstimate
    type1_collision: RateEstimate
    type1_mis: RateEstimate
    type2_success: RateEstimate
    accounting_violations: int
    trials: int


def _rate(count: int, trials: int) -> RateEstimate:
    if trials == 0:
        return RateEstimate(0.0, 0.0, 1.0, 0, 0)
    lo, hi = wilson_interval(count, trials)
    return RateEstimate(count / trials, lo, hi, count, trials)


def estimate_success(cfg: GameConfig, trials: int, seed: int) -> SuccessEstimate:
    """Run `trials` independent games (fresh key each unless pinned in the
    config) and aggregate success rates with Wilson intervals, split by
    attack type and the collision/mis decomposition."""
    overall = 0
    t1_attacks = t1_succ = t1_col = t1_mis = 0
    t2_attacks = t2_succ = 0
    violations = 0
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
        outcome = run_game(cfg, rng)
        overall += outcome.success_any
        if not outcome.accounting_identity_holds():
            violations += 1
        for rec in outcome.records:
            if rec.kind == 1:
                t1_attacks += 1
                t1_succ += rec.success
                t1_col += bool(rec.tag_collision)
                t1_mis += bool(rec.mis_event)
            else:
                t2_attacks += 1
                t2_succ += rec.success
    return SuccessEstimate(
        overall=_rate(overall, trials),
        type1_success=_rate(t1_succ, t1_attacks),
        type1_collision=_rate(t1_col, t1_attacks),
        type1_mis=_rate(t1_mis, t1_attacks),
        type2_success=_rate(t2_succ, t2_attacks),
        accounting_violations=violations,
        trials=trials,
    )


# ---------------------------------------------------------------------------
# Exact oracle and leakage
# ---------------------------------------------------------------------------


def _enumerate_keys(inst: ProtocolInstance) -> list[SharedKey]:
    fam = inst.family
    return [
        SharedKey(fam.key_from_index(ki), k1)
        for ki in range(fam.key_space_size)
        for k1 in range(inst.codebook.i_rows)
    ]


def _cell_z_dists(
    inst: ProtocolInstance, w2: Channel, z_grid: np.ndarray
) -> np.ndarray:
    """Per-cell wiretap output distributions over the z-grid, [i][j] -> vec."""
    cb = inst.codebook
    dists = np.empty((cb.i_rows, cb.j_cols, z_grid.shape[0]))
    for i in range(cb.i_rows):
        for j in range(cb.j_cols):
            acc = np.zeros(z_grid.shape[0])
            for cw in cb.cell(i, j):
                acc += block_probs(w2, np.fromiter(cw, dtype=np.int64), z_grid)
            dists[i, j] = acc / len(cb.cell(i, j))
    return dists


def _key_posterior(
    inst: ProtocolInstance,
    keys: list[SharedKey],
    observations: list[tuple[Message, Sequence]],
    w2: Channel,
) -> np.ndarray:
    """Exact posterior over keys given observed (message, wiretap output)
    pairs; uniform prior."""
    post = np.ones(len(keys))
    if observations:
        n = inst.codebook.n
        for m, z in observations:
            z_digits = np.fromiter(z.symbols, dtype=np.int64, count=n)
            for ki, key in enumerate(keys):
                j = inst.column_of_tag(inst.tag_of(key, m))
                cell = inst.codebook.cell(key.k1, j)
                prob = float(
                    np.mean(
                        [float(np.prod(w2.rows[np.fromiter(cw, dtype=np.int64), z_digits])) for cw in cell]
                    )
                )
                post[ki] *= prob
    total = post.sum()
    if total <= 0:
        raise ValueError("observations have zero probability under every key")
    return post / total


@dataclass(frozen=True)
class OracleReport:
    max_prob: float
    best_message: Message
    best_y: tuple[int, ...]
    keys: int


def optimal_type2_oracle(
    inst: ProtocolInstance,
    observations: list[tuple[Message, Sequence]] | None = None,
    w2: Channel | None = None,
    budget: int = 1 << 22,
) -> OracleReport:
    """Exhaustively maximize acceptance probability over all (message, y)
    injections under the exact key posterior for the given view.

    This is the strongest possible single Type II attack; every strategy's
    measured success on the same view is dominated by it.
    """
    cb = inst.codebook
    w1 = cb.params.w1
    w2 = w2 if w2 is not None else cb.params.w2
    n = cb.n
    keys = _enumerate_keys(inst)
    y_space = w1.output.size**n
    cost = y_space * (cb.j_cols + len(keys) // max(1, cb.j_cols))
    if y_space > budget or inst.family.message_space_size * len(keys) > budget:
        raise BudgetExceededError(f"oracle cost exceeds budget {budget} (cost ~{cost})")
    post = _key_posterior(inst, keys, observations or [], w2)

    grid = output_grid(w1.output.size, n, budget)
    # decode_rows[j][y] = accepted row index for column j, or -1
    decode_rows = np.full((cb.j_cols, grid.shape[0]), -1, dtype=np.int64)
    for j in range(cb.j_cols):
        col = inst.column(j)
        masks = np.stack(
            [cond_typical_mask(np.fromiter(cw, dtype=np.int64), grid, w1, inst.eps) for cw in col.codewords]
        )
        unique = masks.sum(axis=0) == 1
        for idx in range(len(col.codewords)):
            sel = masks[idx] & unique
            decode_rows[j, sel] = col.row_of(idx)

    best = (-1.0, None, None)
    for m_hat in inst.family.iter_messages():
        # posterior mass grouped by (column of this message's tag, key row)
        mass = np.zeros((cb.j_cols, cb.i_rows))
        for ki, key in enumerate(keys):
            j = inst.column_of_tag(inst.tag_of(key, m_hat))
            mass[j, key.k1] += post[ki]
        accept = np.zeros(grid.shape[0])
        for j in range(cb.j_cols):
            for row in range(cb.i_rows):
                if mass[j, row] > 0:
                    accept += mass[j, row] * (decode_rows[j] == row)
        y_idx = int(accept.argmax())
        if accept[y_idx] > best[0]:
            best = (float(accept[y_idx]), m_hat, tuple(int(v) for v in grid[y_idx]))
    return OracleReport(best[0], best[1], best[2], len(keys))


@dataclass(frozen=True)
class LeakageReport:
    sd: float  # SD(K | V; K)
    mi: float  # I(K; V) in bits
    sessions: int
    key_count: int
    joint: JointDistribution


def key_leakage_exact(
    inst: ProtocolInstance,
    messages: list[Message],
    w2: Channel | None = None,
    budget: int = 1 << 22,
) -> LeakageReport:
    """Exact joint of (key, wiretap view) for a fixed message list, by
    enumerating cells and channel output blocks; returns both SD(K|V; K) and
    I(K; V)."""
    cb = inst.codebook
    w2 = w2 if w2 is not None else cb.params.w2
    n = cb.n
    z_space = w2.output.size**n
    total_v = z_space ** len(messages)
    if total_v > budget:
        raise BudgetExceededError(
            f"view space (|Z|^n)^J = {total_v} exceeds budget {budget}"
        )
    keys = _enumerate_keys(inst)
    z_grid = output_grid(w2.output.size, n, budget)
    cell_dists = _cell_z_dists(inst, w2, z_grid)

    rows = np.empty((len(keys), total_v))
    for ki, key in enumerate(keys):
        acc = np.ones(1)
        for m in messages:
            j = inst.column_of_tag(inst.tag_of(key, m))
            acc = np.outer(acc, cell_dists[key.k1, j]).ravel()
        rows[ki] = acc
    joint = JointDistribution.from_matrix(rows / len(keys))
    sd = conditional_statistical_distance(joint, joint.marginal_row())
    mi = mutual_information(joint)
    return LeakageReport(sd, mi, len(messages), len(keys), joint)


def check_lemma1_on_leakage(
    inst: ProtocolInstance,
    messages: list[Message],
    w2: Channel | None = None,
    budget: int = 1 << 22,
) -> CsiszarBoundReport:
    """Apply the SD/MI bound checker to the exactly computed (key, view)
    joint."""
    report = key_leakage_exact(inst, messages, w2=w2, budget=budget)
    return check_csiszar_bound(report.joint)
