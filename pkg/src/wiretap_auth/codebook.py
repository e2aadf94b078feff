"""Random double-partition codebooks over a type class.

A codebook is an I x J array of disjoint, equal-size codeword cells drawn
from T_P^n.  Construction: every class member gets an independent uniform
label pair (row, column-partition); columns whose cells are all nonempty are
trimmed to a common cell size and scored by exact-or-MC decoding error and by
the statistical distance their cells induce on the wiretapper's output; the
J best columns (lexicographic score, deterministic tie-break) survive.

Also provides desk-scale checkers for the supporting random-coding facts:
expected typical-set intersections, random packing codes, and random
partition secrecy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .infotheory import (
    Alphabet,
    Channel,
    Sequence,
    conditional_entropy,
    mutual_information,
    push_through_channel,
)
from .typicality import (
    DEFAULT_ENUMERATION_BUDGET,
    TYPICALITY_SLACK,
    BudgetExceededError,
    TypeP,
    block_probs,
    cond_typical_mask,
    enumerate_type_class,
    output_grid,
    type_class_size,
    type_of,
)

Codeword = tuple[int, ...]


class InfeasibleParamsError(ValueError):
    """Build parameters violate the rate/typicality preconditions."""


class InsufficientColumnsError(RuntimeError):
    """Fewer acceptable columns than requested."""


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return (0.0, 1.0)
    p = successes / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class Budgets:
    enumeration_limit: int = DEFAULT_ENUMERATION_BUDGET
    exhaustive_output_limit: int = 1 << 16
    mc_trials: int = 2000


@dataclass(frozen=True)
class RateSummary:
    i_xy: float
    i_xz: float
    h_x_given_y: float


@dataclass(frozen=True, eq=False)
class BuildParams:
    """Knobs of the double-partition construction.

    s2 defaults to round(|T_P^n| * 2^(-n(I(X;Y)-theta))) clipped to >= j_cols;
    eps defaults to n^(-(1-omega)/3).  Both are overridable.
    """

    type_p: TypeP
    w1: Channel
    w2: Channel
    i_rows: int
    j_cols: int
    tau: float
    theta: float
    omega: float
    seed: int
    s2: int | None = None
    eps: float | None = None
    budgets: Budgets = field(default_factory=Budgets)
    max_column_error: float | None = None
    max_column_sd: float | None = None

    @property
    def n(self) -> int:
        return self.type_p.n

    def eps_value(self) -> float:
        if self.eps is not None:
            return self.eps
        return self.n ** (-(1.0 - self.omega) / 3.0)

    def rates(self) -> RateSummary:
        px = self.type_p.distribution()
        j1 = push_through_channel(px, self.w1)
        j2 = push_through_channel(px, self.w2)
        return RateSummary(
            i_xy=mutual_information(j1),
            i_xz=mutual_information(j2),
            h_x_given_y=conditional_entropy(j1),
        )

    def s2_value(self) -> int:
        if self.s2 is not None:
            if self.s2 < self.j_cols:
                raise InfeasibleParamsError(f"s2={self.s2} < j_cols={self.j_cols}")
            return self.s2
        r = self.rates()
        formula = round(type_class_size(self.type_p) * 2.0 ** (-self.n * (r.i_xy - self.theta)))
        return max(self.j_cols, int(formula))

    def validate(self) -> RateSummary:
        if not self.type_p.is_strictly_positive():
            raise InfeasibleParamsError("type must be strictly positive on every symbol")
        if self.i_rows < 1 or self.j_cols < 1:
            raise InfeasibleParamsError("i_rows and j_cols must be >= 1")
        if not (self.tau > 0):
            raise InfeasibleParamsError("tau must be > 0")
        if not (0 < self.theta < self.tau):
            raise InfeasibleParamsError("theta must lie in (0, tau)")
        if not (0 < self.omega < 1):
            raise InfeasibleParamsError("omega must lie in (0, 1)")
        r = self.rates()
        n = self.n
        if not (r.i_xy > r.i_xz + self.tau):
            raise InfeasibleParamsError(
                f"need I(X;Y) > I(X;Z) + tau: {r.i_xy:.4f} <= {r.i_xz:.4f} + {self.tau}"
            )
        if not (math.log2(self.i_rows) / n < r.i_xy - r.i_xz - self.tau):
            raise InfeasibleParamsError(
                f"row rate {math.log2(self.i_rows) / n:.4f} >= "
                f"I(X;Y)-I(X;Z)-tau = {r.i_xy - r.i_xz - self.tau:.4f}"
            )
        if not (math.log2(self.j_cols) / n < r.h_x_given_y + self.tau):
            raise InfeasibleParamsError(
                f"column rate {math.log2(self.j_cols) / n:.4f} >= "
                f"H(X|Y)+tau = {r.h_x_given_y + self.tau:.4f}"
            )
        return r


@dataclass(frozen=True, eq=False)
class ColumnCode:
    """One column C_.j as a stand-alone code: I*r codewords in row-major
    order, decoded by unique conditional typicality."""

    j: int
    codewords: tuple[Codeword, ...]
    i_rows: int
    r: int
    w1: Channel
    eps: float

    def row_of(self, index: int) -> int:
        return index // self.r


@dataclass(eq=False)
class Codebook:
    params: BuildParams
    r: int
    s2: int
    eps: float
    cells: tuple[tuple[tuple[Codeword, ...], ...], ...]  # [i][j] -> sorted codewords
    diagnostics: dict

    def __post_init__(self):
        self.validate()
        index: dict[Codeword, tuple[int, int, int]] = {}
        for i, row in enumerate(self.cells):
            for j, cell in enumerate(row):
                for pos, cw in enumerate(cell):
                    index[cw] = (i, j, pos)
        self.column_index = index

    @property
    def i_rows(self) -> int:
        return len(self.cells)

    @property
    def j_cols(self) -> int:
        return len(self.cells[0])

    @property
    def n(self) -> int:
        return self.params.type_p.n

    def validate(self):
        if not self.cells or not self.cells[0]:
            raise ValueError("empty codebook")
        if self.r < 1:
            raise ValueError("cell size r must be >= 1")
        seen: set[Codeword] = set()
        p = self.params.type_p
        for row in self.cells:
            if len(row) != len(self.cells[0]):
                raise ValueError("ragged codebook rows")
            for cell in row:
                if len(cell) != self.r:
                    raise ValueError("cells must all have the common size r")
                for cw in cell:
                    if cw in seen:
                        raise ValueError(f"duplicate codeword across cells: {cw}")
                    seen.add(cw)
                    seq = Sequence(p.alphabet, cw)
                    if type_of(seq).counts != p.counts:
                        raise ValueError(f"codeword {cw} not in the type class")

    def column(self, j: int) -> ColumnCode:
        codewords = tuple(cw for i in range(self.i_rows) for cw in self.cells[i][j])
        return ColumnCode(j, codewords, self.i_rows, self.r, self.params.w1, self.eps)

    def all_codewords(self) -> list[Codeword]:
        return [cw for row in self.cells for cell in row for cw in cell]

    def cell(self, i: int, j: int) -> tuple[Codeword, ...]:
        return self.cells[i][j]

    # -- serialization (digit strings; rows, then columns, then lexicographic) --

    def to_json_dict(self) -> dict:
        p = self.params
        return {
            "schema_version": 1,
            "x_alphabet": p.type_p.alphabet.size,
            "y_alphabet": p.w1.output.size,
            "z_alphabet": p.w2.output.size,
            "n": p.type_p.n,
            "type_counts": list(p.type_p.counts),
            "i_rows": self.i_rows,
            "j_cols": self.j_cols,
            "r": self.r,
            "s2": self.s2,
            "tau": p.tau,
            "theta": p.theta,
            "omega": p.omega,
            "eps": self.eps,
            "seed": p.seed,
            "w1": [list(row) for row in p.w1.rows],
            "w2": [list(row) for row in p.w2.rows],
            "budgets": {
                "enumeration_limit": p.budgets.enumeration_limit,
                "exhaustive_output_limit": p.budgets.exhaustive_output_limit,
                "mc_trials": p.budgets.mc_trials,
            },
            "cells": [
                [["".join(str(s) for s in cw) for cw in cell] for cell in row]
                for row in self.cells
            ],
            "diagnostics": self.diagnostics,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> "Codebook":
        if data.get("x_alphabet", 0) > 10:
            raise ValueError("digit-string serialization requires alphabet size <= 10")
        type_p = TypeP(Alphabet(data["x_alphabet"]), data["n"], tuple(data["type_counts"]))
        params = BuildParams(
            type_p=type_p,
            w1=Channel(np.array(data["w1"])),
            w2=Channel(np.array(data["w2"])),
            i_rows=data["i_rows"],
            j_cols=data["j_cols"],
            tau=data["tau"],
            theta=data["theta"],
            omega=data["omega"],
            seed=data["seed"],
            s2=data["s2"],
            eps=data["eps"],
            budgets=Budgets(**data["budgets"]),
        )
        cells = tuple(
            tuple(tuple(tuple(int(c) for c in cw) for cw in cell) for cell in row)
            for row in data["cells"]
        )
        return cls(
            params=params,
            r=data["r"],
            s2=data["s2"],
            eps=data["eps"],
            cells=cells,
            diagnostics=data["diagnostics"],
        )

    @classmethod
    def loads(cls, text: str) -> "Codebook":
        return cls.from_json_dict(json.loads(text))


def _digits(cw: Codeword) -> np.ndarray:
    return np.fromiter(cw, dtype=np.int64, count=len(cw))


def _pair_cond_typical(x: Codeword, y: Codeword, ch: Channel, eps: float) -> bool:
    """Conditional typicality of y given x, on raw tuples (hot path)."""
    n = len(x)
    kx, ky = ch.input.size, ch.output.size
    joint = [[0] * ky for _ in range(kx)]
    for a, b in zip(x, y):
        joint[a][b] += 1
    bound = eps / (kx * ky) + TYPICALITY_SLACK
    for a in range(kx):
        cnt_a = sum(joint[a])
        pa = cnt_a / n
        for b in range(ky):
            expected = pa * ch.rows[a, b]
            if expected == 0.0 and joint[a][b] > 0:
                return False
            if abs(joint[a][b] / n - expected) > bound:
                return False
    return True


def typicality_decode(col: ColumnCode, y: Sequence | Codeword) -> int | None:
    """Unique conditionally eps-typical codeword index, else None (zero or
    multiple matches)."""
    y_t = y.symbols if isinstance(y, Sequence) else tuple(y)
    found = None
    for idx, cw in enumerate(col.codewords):
        if _pair_cond_typical(cw, y_t, col.w1, col.eps):
            if found is not None:
                return None
            found = idx
    return found


@dataclass(frozen=True)
class ErrorEstimate:
    value: float
    lo: float
    hi: float
    exact: bool
    trials: int


def _column_masks(col: ColumnCode, grid: np.ndarray) -> np.ndarray:
    return np.stack(
        [cond_typical_mask(_digits(cw), grid, col.w1, col.eps) for cw in col.codewords]
    )


def _column_error_exact(col: ColumnCode, grid: np.ndarray) -> float:
    masks = _column_masks(col, grid)
    unique = masks.sum(axis=0) == 1
    total = 0.0
    for i, cw in enumerate(col.codewords):
        probs = block_probs(col.w1, _digits(cw), grid)
        total += 1.0 - float(probs[masks[i] & unique].sum())
    return total / len(col.codewords)


def _sample_output(rows: np.ndarray, x_digits: np.ndarray, rng: np.random.Generator) -> Codeword:
    cum = np.cumsum(rows[x_digits], axis=1)
    u = rng.random(len(x_digits))
    return tuple(int(v) for v in (u[:, None] > cum).sum(axis=1))


def column_error_probability(
    col: ColumnCode,
    exact: bool | None = None,
    trials: int = 2000,
    rng: np.random.Generator | None = None,
    output_limit: int = Budgets().exhaustive_output_limit,
) -> ErrorEstimate:
    """Average decoding error under a uniform message.

    Exact mode enumerates all |Y|^n outputs; MC mode reports a Wilson 95%
    interval around the sampled estimate.
    """
    n = len(col.codewords[0])
    space = col.w1.output.size**n
    if exact is None:
        exact = space <= output_limit
    if exact:
        if space > output_limit:
            raise BudgetExceededError(f"|Y|^n = {space} exceeds output budget {output_limit}")
        v = _column_error_exact(col, output_grid(col.w1.output.size, n, output_limit))
        return ErrorEstimate(v, v, v, True, 0)
    if rng is None:
        raise ValueError("MC mode requires an explicit generator")
    failures = 0
    for _ in range(trials):
        idx = int(rng.integers(len(col.codewords)))
        y = _sample_output(col.w1.rows, _digits(col.codewords[idx]), rng)
        if typicality_decode(col, y) != idx:
            failures += 1
    lo, hi = wilson_interval(failures, trials)
    return ErrorEstimate(failures / trials, lo, hi, False, trials)


def _cell_output_dist(
    ch: Channel, codewords: list[Codeword] | tuple[Codeword, ...], grid: np.ndarray
) -> np.ndarray:
    acc = np.zeros(grid.shape[0])
    for cw in codewords:
        acc += block_probs(ch, _digits(cw), grid)
    return acc / len(codewords)


def column_secrecy_sd(
    cb: Codebook,
    j: int,
    p_row: np.ndarray | None = None,
    output_limit: int | None = None,
) -> float:
    """sum_i p_row(i) * SD(Z-dist of cell (i, j); Z-dist of the whole book),
    computed exactly over the |Z|^n grid."""
    w2 = cb.params.w2
    n = cb.n
    limit = output_limit if output_limit is not None else cb.params.budgets.exhaustive_output_limit
    space = w2.output.size**n
    if space > limit:
        raise BudgetExceededError(f"|Z|^n = {space} exceeds output budget {limit}")
    if p_row is None:
        p_row = np.full(cb.i_rows, 1.0 / cb.i_rows)
    grid = output_grid(w2.output.size, n, limit)
    global_dist = _cell_output_dist(w2, cb.all_codewords(), grid)
    total = 0.0
    for i in range(cb.i_rows):
        cell_dist = _cell_output_dist(w2, cb.cells[i][j], grid)
        total += float(p_row[i]) * float(np.abs(cell_dist - global_dist).sum())
    return total


def _secrecy_score_exact(
    w2: Channel,
    cells_by_row: list[list[Codeword]],
    retained: list[Codeword],
    grid: np.ndarray,
) -> float:
    """(1/I) sum_i SD(Z|cell_i ; Z|retained) for one column, exact."""
    global_dist = _cell_output_dist(w2, retained, grid)
    total = 0.0
    for cell in cells_by_row:
        cell_dist = _cell_output_dist(w2, cell, grid)
        total += float(np.abs(cell_dist - global_dist).sum())
    return total / len(cells_by_row)


def _secrecy_score_mc(
    w2: Channel,
    cells_by_row: list[list[Codeword]],
    retained: list[Codeword],
    trials: int,
    rng: np.random.Generator,
) -> float:
    """MC secrecy score: z sampled from the retained mixture, plug-in
    conditionals computed exactly per sample."""

    def point_prob(z: Codeword, codewords: list[Codeword]) -> float:
        z_d = _digits(z)
        return float(
            np.mean([np.prod(w2.rows[_digits(cw), z_d]) for cw in codewords])
        )

    total = 0.0
    for cell in cells_by_row:
        acc = 0.0
        for _ in range(trials):
            src = retained[int(rng.integers(len(retained)))]
            z = _sample_output(w2.rows, _digits(src), rng)
            p_cell = point_prob(z, cell)
            p_all = point_prob(z, retained)
            if p_all > 0:
                acc += abs(p_cell / p_all - 1.0)
        total += acc / trials
    return total / len(cells_by_row)


def build_codebook(bp: BuildParams) -> Codebook:
    """Run the double-partition construction; see the module docstring.

    Deterministic given bp.seed.  Raises InfeasibleParamsError on rate
    violations, InsufficientColumnsError when fewer than j_cols columns
    survive, BudgetExceededError when T_P^n is too big to enumerate.
    """
    rates = bp.validate()
    n = bp.n
    eps = bp.eps_value()
    s2 = bp.s2_value()
    members = [seq.symbols for seq in enumerate_type_class(bp.type_p, bp.budgets.enumeration_limit)]
    rng = np.random.default_rng(np.random.SeedSequence([bp.seed, 0xC0DEB00C]))

    sigma1 = rng.integers(0, bp.i_rows, size=len(members))
    sigma2 = rng.integers(0, s2, size=len(members))
    raw_cells: dict[tuple[int, int], list[Codeword]] = {}
    for cw, i, j in zip(members, sigma1, sigma2):
        raw_cells.setdefault((int(i), int(j)), []).append(cw)

    candidates = [
        j
        for j in range(s2)
        if all(len(raw_cells.get((i, j), [])) > 0 for i in range(bp.i_rows))
    ]
    if len(candidates) < bp.j_cols:
        raise InsufficientColumnsError(
            f"only {len(candidates)} columns have all {bp.i_rows} cells nonempty; "
            f"need {bp.j_cols}"
        )

    r = min(len(raw_cells[(i, j)]) for j in candidates for i in range(bp.i_rows))

    trimmed: dict[tuple[int, int], tuple[Codeword, ...]] = {}
    for j in candidates:
        for i in range(bp.i_rows):
            cell = raw_cells[(i, j)]
            if len(cell) > r:
                keep = rng.choice(len(cell), size=r, replace=False)
                cell = [cell[k] for k in keep]
            trimmed[(i, j)] = tuple(sorted(cell))

    retained = [cw for key in sorted(trimmed) for cw in trimmed[key]]

    y_space = bp.w1.output.size**n
    z_space = bp.w2.output.size**n
    exact_error = y_space <= bp.budgets.exhaustive_output_limit
    exact_sd = z_space <= bp.budgets.exhaustive_output_limit
    y_grid = output_grid(bp.w1.output.size, n, bp.budgets.exhaustive_output_limit) if exact_error else None
    z_grid = output_grid(bp.w2.output.size, n, bp.budgets.exhaustive_output_limit) if exact_sd else None

    scores: list[tuple[float, float, int]] = []
    col_diag: dict[str, dict] = {}
    for j in candidates:
        cells_by_row = [list(trimmed[(i, j)]) for i in range(bp.i_rows)]
        col = ColumnCode(
            j,
            tuple(cw for cell in cells_by_row for cw in cell),
            bp.i_rows,
            r,
            bp.w1,
            eps,
        )
        if exact_error:
            err = ErrorEstimate(_column_error_exact(col, y_grid), 0, 0, True, 0)
        else:
            err = column_error_probability(
                col, exact=False, trials=bp.budgets.mc_trials, rng=rng
            )
        if exact_sd:
            sd = _secrecy_score_exact(bp.w2, cells_by_row, retained, z_grid)
        else:
            sd = _secrecy_score_mc(bp.w2, cells_by_row, retained, bp.budgets.mc_trials, rng)
        scores.append((err.value, sd, j))
        col_diag[str(j)] = {
            "error": err.value,
            "error_exact": exact_error,
            "secrecy_sd": sd,
            "secrecy_exact": exact_sd,
        }

    acceptable = [
        s
        for s in scores
        if (bp.max_column_error is None or s[0] <= bp.max_column_error)
        and (bp.max_column_sd is None or s[1] <= bp.max_column_sd)
    ]
    if len(acceptable) < bp.j_cols:
        raise InsufficientColumnsError(
            f"only {len(acceptable)} columns meet the thresholds; need {bp.j_cols}"
        )
    acceptable.sort()
    selected = [j for (_, _, j) in acceptable[: bp.j_cols]]

    for rank, j in enumerate(selected):
        col_diag[str(j)]["selected"] = True
        col_diag[str(j)]["new_j"] = rank
    for j in candidates:
        col_diag[str(j)].setdefault("selected", False)

    cells = tuple(
        tuple(trimmed[(i, j)] for j in selected) for i in range(bp.i_rows)
    )
    diagnostics = {
        "class_size": len(members),
        "s2": s2,
        "r": r,
        "eps": eps,
        "candidate_columns": len(candidates),
        "selected_original_columns": selected,
        "rates": {"i_xy": rates.i_xy, "i_xz": rates.i_xz, "h_x_given_y": rates.h_x_given_y},
        "columns": col_diag,
        "exact_error": exact_error,
        "exact_sd": exact_sd,
    }
    return Codebook(params=bp, r=r, s2=s2, eps=eps, cells=cells, diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# Random-coding checkers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lemma7Report:
    exact_mean: float
    empirical_mean: float
    se: float
    agrees: bool
    pairs_sampled: int


def check_lemma7(
    p: TypeP,
    ch: Channel,
    eps: float,
    trials: int,
    rng: np.random.Generator,
    budgets: Budgets | None = None,
) -> Lemma7Report:
    """Expected |T_eps(Z1) intersect T_eps(Z2)| over uniformly random distinct
    pairs of the type class: exact all-pairs mean vs a sampled mean."""
    budgets = budgets or Budgets()
    members = [seq.symbols for seq in enumerate_type_class(p, budgets.enumeration_limit)]
    grid = output_grid(ch.output.size, p.n, budgets.exhaustive_output_limit)
    masks = np.stack([cond_typical_mask(_digits(cw), grid, ch, eps) for cw in members])
    inter = masks.astype(np.int64) @ masks.T.astype(np.int64)
    m = len(members)
    exact_mean = float((inter.sum() - np.trace(inter)) / (m * (m - 1)))

    ii = rng.integers(0, m, size=trials)
    jj = rng.integers(0, m - 1, size=trials)
    jj = jj + (jj >= ii)  # distinct pair, uniform
    samples = inter[ii, jj].astype(np.float64)
    empirical = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    agrees = abs(empirical - exact_mean) <= 3 * se if se > 0 else empirical == exact_mean
    return Lemma7Report(exact_mean, empirical, se, agrees, trials)


@dataclass(frozen=True)
class Lemma8Report:
    errors: tuple[float, ...]
    median: float
    ell: int


def check_lemma8_packing(
    p: TypeP,
    ch: Channel,
    ell: int,
    eps: float,
    trials: int,
    rng: np.random.Generator,
    budgets: Budgets | None = None,
) -> Lemma8Report:
    """Exact decoding error of `trials` uniformly random ell-subsets of the
    type class, used as packing codes with typicality decoding."""
    budgets = budgets or Budgets()
    members = [seq.symbols for seq in enumerate_type_class(p, budgets.enumeration_limit)]
    if ell > len(members):
        raise ValueError(f"ell={ell} exceeds type class size {len(members)}")
    grid = output_grid(ch.output.size, p.n, budgets.exhaustive_output_limit)
    mask_cache: dict[int, np.ndarray] = {}
    prob_cache: dict[int, np.ndarray] = {}

    def mask_of(k: int) -> np.ndarray:
        if k not in mask_cache:
            mask_cache[k] = cond_typical_mask(_digits(members[k]), grid, ch, eps)
        return mask_cache[k]

    def probs_of(k: int) -> np.ndarray:
        if k not in prob_cache:
            prob_cache[k] = block_probs(ch, _digits(members[k]), grid)
        return prob_cache[k]

    errors = []
    for _ in range(trials):
        idxs = rng.choice(len(members), size=ell, replace=False)
        masks = np.stack([mask_of(int(k)) for k in idxs])
        unique = masks.sum(axis=0) == 1
        err = 0.0
        for row, k in enumerate(idxs):
            err += 1.0 - float(probs_of(int(k))[masks[row] & unique].sum())
        errors.append(err / ell)
    return Lemma8Report(tuple(errors), float(np.median(errors)), ell)


@dataclass(frozen=True)
class Lemma11Report:
    max_cell_imbalance: float
    sd_value: float
    cell_sizes: tuple[int, ...]


def check_lemma11_partition(
    p: TypeP,
    ch: Channel,
    k: int,
    rng: np.random.Generator,
    budgets: Budgets | None = None,
) -> Lemma11Report:
    """Draw one uniformly random k-partition of T_P^n; report the relative
    cell-size deviations and SD(Y^n | sigma(X^n); Y^n) computed exactly."""
    budgets = budgets or Budgets()
    members = [seq.symbols for seq in enumerate_type_class(p, budgets.enumeration_limit)]
    m = len(members)
    if k > m:
        raise ValueError(f"k={k} exceeds type class size {m}")
    grid = output_grid(ch.output.size, p.n, budgets.exhaustive_output_limit)
    assign = rng.integers(0, k, size=m)
    cell_dists = np.zeros((k, grid.shape[0]))
    cell_sizes = np.zeros(k, dtype=np.int64)
    global_dist = np.zeros(grid.shape[0])
    for idx, cw in enumerate(members):
        probs = block_probs(ch, _digits(cw), grid)
        cell_dists[assign[idx]] += probs
        cell_sizes[assign[idx]] += 1
        global_dist += probs
    global_dist /= m
    sd = 0.0
    for b in range(k):
        if cell_sizes[b] == 0:
            continue
        sd += (cell_sizes[b] / m) * float(
            np.abs(cell_dists[b] / cell_sizes[b] - global_dist).sum()
        )
    imbalance = float(np.max(np.abs(cell_sizes * k / m - 1.0)))
    return Lemma11Report(imbalance, sd, tuple(int(c) for c in cell_sizes))
