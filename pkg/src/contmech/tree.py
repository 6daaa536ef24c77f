"""Base-r partial-sum tree for continually released counts.

A bit stream sigma_{1:T} is aggregated into a table of interval sums: cell
(level i, index j) holds the sum over positions ((j-1)*r^(i-1), j*r^(i-1)].
Any prefix [1, t] decomposes, via the base-r digits of t, into at most
(r-1)*levels(T, r) disjoint cells, so a noisy running count only ever sums
that many independent Gaussians.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

from .noise import NoiseSource

__all__ = [
    "int_log",
    "tree_levels",
    "TreeParams",
    "DigitDecomposition",
    "decompose",
    "cell_interval",
    "PartialSumTable",
    "build_table",
    "tree_run",
    "TreeRunner",
    "base_objective",
    "optimal_base",
]


def int_log(value: int, base: int) -> int:
    """floor(log_base(value)) by repeated multiplication (no float drift)."""
    if value < 1 or base < 2:
        raise ValueError("int_log requires value >= 1 and base >= 2")
    exp = 0
    power = base
    while power <= value:
        power *= base
        exp += 1
    return exp


def tree_levels(T: int, r: int) -> int:
    """Tree height: floor(log_r(T)) + 1."""
    return int_log(T, r) + 1


@dataclass(frozen=True)
class TreeParams:
    """Stream-length bound, base, and per-cell noise scale of one tree.

    Each cell's noise is N(0, levels * tau^2): the table's L2 sensitivity to
    one changed event is sqrt(levels), so this prices the whole table at
    1/(2 tau^2)-zCDP.
    """

    T: int
    r: int = 2
    tau: float = 1.0

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be positive")
        if not 2 <= self.r <= max(self.T, 2):
            raise ValueError("base r must be in [2, T]")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")

    @property
    def levels(self) -> int:
        return tree_levels(self.T, self.r)

    @property
    def cell_sigma(self) -> float:
        """Standard deviation of one cell's noise: sqrt(levels) * tau."""
        return self.levels ** 0.5 * self.tau


@dataclass(frozen=True)
class DigitDecomposition:
    """Base-r digits of t and the tree cells whose union is exactly [1, t].

    ``digits[j]`` is the coefficient of r^j; ``cells`` lists (level, index)
    pairs, most significant level first, ascending index within a level.
    """

    t: int
    base: int
    digits: tuple[int, ...]
    cells: tuple[tuple[int, int], ...]


@functools.lru_cache(maxsize=65536)
def decompose(t: int, r: int) -> DigitDecomposition:
    if t < 1:
        raise ValueError("t must be positive")
    digits = []
    rem = t
    while rem:
        rem, d = divmod(rem, r)
        digits.append(d)
    cells = []
    consumed = 0
    for j in range(len(digits) - 1, -1, -1):
        block = r ** j
        first = consumed // block + 1
        for offset in range(digits[j]):
            cells.append((j + 1, first + offset))
        consumed += digits[j] * block
    return DigitDecomposition(t, r, tuple(digits), tuple(cells))


def cell_interval(level: int, index: int, r: int) -> tuple[int, int]:
    """Inclusive stream interval (start, end) covered by cell (level, index)."""
    width = r ** (level - 1)
    return (index - 1) * width + 1, index * width


@dataclass
class PartialSumTable:
    """All full-block interval sums of a stream, indexed by (level, index)."""

    T: int
    r: int
    cells: dict[tuple[int, int], int] = field(default_factory=dict)

    def prefix_sum(self, t: int) -> int:
        return sum(self.cells.get(c, 0) for c in decompose(t, self.r).cells)


def build_table(stream, params: TreeParams) -> PartialSumTable:
    """Populate every full-block cell; missing trailing rounds count as 0."""
    bits = list(stream)
    if len(bits) > params.T:
        raise ValueError(f"stream length {len(bits)} exceeds T={params.T}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("stream entries must be bits")
    T, r = params.T, params.r
    cells: dict[tuple[int, int], int] = {}
    level_sums = bits + [0] * (T - len(bits))
    for i in range(1, params.levels + 1):
        for j, value in enumerate(level_sums, start=1):
            cells[(i, j)] = value
        next_n = len(level_sums) // r
        level_sums = [
            sum(level_sums[j * r : (j + 1) * r]) for j in range(next_n)
        ]
        if not level_sums:
            break
    return PartialSumTable(T=T, r=r, cells=cells)


def _cell_noise(cache: dict, src: NoiseSource, sigma: float, cell: tuple[int, int]) -> float:
    z = cache.get(cell)
    if z is None:
        z = src.gaussian(sigma, "cell", cell[0], cell[1])
        cache[cell] = z
    return z


def tree_run(stream, params: TreeParams, src: NoiseSource) -> list[float]:
    """Noisy running count: y_hat_t sums (cell sum + cell noise) over the
    decomposition of t, drawing each cell's noise once and re-using it for
    every round that touches the cell.  tau == 0 returns exact prefix sums.
    """
    bits = list(stream)
    table = build_table(bits, params)
    sigma = params.cell_sigma
    noise: dict[tuple[int, int], float] = {}
    out = []
    for t in range(1, len(bits) + 1):
        acc = 0.0
        for cell in decompose(t, params.r).cells:
            acc += table.cells[cell] + _cell_noise(noise, src, sigma, cell)
        out.append(acc)
    return out


class TreeRunner:
    """Streaming form of ``tree_run``: one bit in, one noisy count out.

    Only the active spine is retained: per level, the completed cells whose
    parent block is still open (at most r-1 per level, so O(r * levels)
    state).  Outputs are bit-identical to the batch run under the same
    noise source because cells, noise keys, and summation order coincide.
    """

    def __init__(self, params: TreeParams, src: NoiseSource):
        self.params = params
        self.src = src
        self.t = 0
        # pending[level] = list of (index, sum) completed cells awaiting merge
        self._pending: dict[int, list[tuple[int, int]]] = {}
        self._noise: dict[tuple[int, int], float] = {}

    @property
    def active_cell_count(self) -> int:
        return sum(len(v) for v in self._pending.values())

    def step(self, bit: int) -> float:
        if bit not in (0, 1):
            raise ValueError("stream entries must be bits")
        if self.t >= self.params.T:
            raise ValueError(f"stream exceeds T={self.params.T}")
        self.t += 1
        r = self.params.r
        self._pending.setdefault(1, []).append((self.t, bit))
        level = 1
        while len(self._pending.get(level, ())) == r:
            block = self._pending.pop(level)
            parent_index = (block[0][0] - 1) // r + 1
            parent_sum = sum(s for _, s in block)
            self._pending.setdefault(level + 1, []).append((parent_index, parent_sum))
            # merged noise keys are dropped; they can never be queried again
            for index, _ in block:
                self._noise.pop((level, index), None)
            level += 1
        sigma = self.params.cell_sigma
        acc = 0.0
        for lvl in sorted(self._pending, reverse=True):
            for index, cell_sum in self._pending[lvl]:
                acc += cell_sum + _cell_noise(self._noise, self.src, sigma, (lvl, index))
        return acc

    def run(self, stream) -> list[float]:
        return [self.step(b) for b in stream]


def base_objective(T: int, r: int) -> int:
    """Worst-case noisy-count variance factor (r - 1) * levels^2."""
    return (r - 1) * tree_levels(T, r) ** 2


def _smallest_base_with_height(T: int, height: int) -> int | None:
    """Smallest r >= 2 with floor(log_r T) == height, or None."""
    # floor(log_r T) == h  <=>  r^h <= T < r^(h+1); smallest such r is the
    # first r with r^(h+1) > T, found from the integer (h+1)-th root.
    r = max(2, int(round(T ** (1.0 / (height + 1)))))
    while r > 2 and (r - 1) ** (height + 1) > T:
        r -= 1
    while r ** (height + 1) <= T:
        r += 1
    if r ** height <= T:
        return r
    return None


def optimal_base(T: int) -> tuple[int, int]:
    """argmin over r in [2, T] of (r - 1) * levels(T, r)^2, ties to smaller r.

    The objective is increasing in r while the height stays constant, so
    only the smallest base of each height run can win; those candidates are
    enumerated exactly with integer arithmetic.
    """
    if T < 2:
        raise ValueError("T must be at least 2")
    candidates = {2, T}
    for height in range(1, int_log(T, 2) + 1):
        r = _smallest_base_with_height(T, height)
        if r is not None and r <= T:
            candidates.add(r)
    best_r, best_obj = None, None
    for r in sorted(candidates):
        obj = base_objective(T, r)
        if best_obj is None or obj < best_obj:
            best_r, best_obj = r, obj
    return best_r, best_obj
