"""Stationary ergodic process generators with exact cell-probability oracles.

Every model doubles as a sampler (seeded, reproducible, stationary from
the first step) and as an oracle for the stationary probability of any
dyadic cell, which is what the goodness-of-fit test and the exact
distance computations consume.  Five families are provided: iid over a
finite set of atoms, iid piecewise-uniform, finite Markov chains with
injective emissions, functions of Markov chains (non-injective
emissions), and irrational circle rotations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .cylinder import PartitionLevel, Sample, cell_of
from .errors import CapabilityError, ConfigError

# Refuse to enumerate more mass-bearing cells than this per level.
MASS_CELL_CAP = 2_000_000

_ROW_SUM_TOL = 1e-12
_STATIONARY_TOL = 1e-10


class ProcessModel:
    """Base class: a stationary ergodic law with sampler and cell oracle."""

    kind: str = "abstract"
    exact_cell_prob: bool = True
    enumerate_mass_cells: bool = True

    def __init__(self):
        self._cell_cache = {}

    def sample(self, n: int, seed: int) -> Sample:
        """Length-``n`` draw; a pure function of (parameters, n, seed)."""
        if n < 1:
            raise ValueError(f"sample length must be >= 1, got {n}")
        return Sample._wrap(self._draw(n, np.random.default_rng(seed)))

    def _draw(self, n: int, rng) -> np.ndarray:
        raise NotImplementedError

    def cell_prob(self, level: PartitionLevel, coords) -> float:
        """Stationary probability that an ``m``-window falls in one cell."""
        coords = tuple(int(c) for c in coords)
        if len(coords) != level.m:
            raise ValueError(f"expected {level.m} coordinates, got {len(coords)}")
        key = (level.m, level.l, coords)
        hit = self._cell_cache.get(key)
        if hit is None:
            hit = self._cell_prob(level, coords)
            self._cell_cache[key] = hit
        return hit

    def _cell_prob(self, level, coords) -> float:
        raise NotImplementedError

    def mass_cells(self, level: PartitionLevel):
        """All cells with positive stationary mass at one level."""
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.describe()})"


def _check_cap(count: int, level):
    if count > MASS_CELL_CAP:
        raise CapabilityError(
            f"level {level} would enumerate {count} cells (cap {MASS_CELL_CAP})"
        )


class IIDDiscrete(ProcessModel):
    """Independent draws from finitely many real atoms."""

    kind = "iid-discrete"

    def __init__(self, atoms, probs):
        super().__init__()
        self.atoms = np.asarray(atoms, dtype=np.float64)
        self.probs = np.asarray(probs, dtype=np.float64)
        if self.atoms.ndim != 1 or self.atoms.shape != self.probs.shape:
            raise ConfigError("atoms and probs must be 1-d and equally long")
        if self.atoms.size == 0:
            raise ConfigError("need at least one atom")
        if not np.isfinite(self.atoms).all():
            raise ConfigError("atoms must be finite")
        if np.unique(self.atoms).size != self.atoms.size:
            raise ConfigError("atoms must be distinct")
        if (self.probs <= 0).any():
            raise ConfigError("atom probabilities must be positive")
        if abs(self.probs.sum() - 1.0) > 1e-9:
            raise ConfigError(f"atom probabilities sum to {self.probs.sum()}, not 1")
        self.probs = self.probs / self.probs.sum()
        self._cum = np.cumsum(self.probs)
        self._cum[-1] = 1.0
        self._marginal_cache = {}

    @classmethod
    def coin(cls, p_one: float) -> "IIDDiscrete":
        """Bernoulli atoms 0.0 / 1.0 with P(1) = ``p_one``."""
        return cls([0.0, 1.0], [1.0 - p_one, p_one])

    def _draw(self, n, rng):
        u = rng.random(n)
        return self.atoms[np.searchsorted(self._cum, u, side="right")]

    def _marginal(self, l: int) -> dict:
        cells = self._marginal_cache.get(l)
        if cells is None:
            cells = {}
            for a, p in zip(self.atoms, self.probs):
                j = cell_of(a, l)
                cells[j] = cells.get(j, 0.0) + p
            self._marginal_cache[l] = cells
        return cells

    def _cell_prob(self, level, coords):
        marg = self._marginal(level.l)
        p = 1.0
        for j in coords:
            q = marg.get(j)
            if q is None:
                return 0.0
            p *= q
        return p

    def mass_cells(self, level):
        marg = sorted(self._marginal(level.l))
        _check_cap(len(marg) ** level.m, level)
        out = [()]
        for _ in range(level.m):
            out = [c + (j,) for c in out for j in marg]
        return out

    def describe(self):
        return {
            "kind": self.kind,
            "atoms": self.atoms.tolist(),
            "probs": self.probs.tolist(),
        }


class PiecewiseUniform(ProcessModel):
    """Independent draws from a piecewise-constant density on a bounded support."""

    kind = "iid-piecewise-uniform"

    def __init__(self, breakpoints, masses):
        super().__init__()
        self.breakpoints = np.asarray(breakpoints, dtype=np.float64)
        self.masses = np.asarray(masses, dtype=np.float64)
        if self.breakpoints.ndim != 1 or self.breakpoints.size < 2:
            raise ConfigError("need at least two breakpoints")
        if not np.isfinite(self.breakpoints).all():
            raise ConfigError("breakpoints must be finite")
        if (np.diff(self.breakpoints) <= 0).any():
            raise ConfigError("breakpoints must be strictly increasing")
        if self.masses.shape != (self.breakpoints.size - 1,):
            raise ConfigError("need one mass per piece")
        if (self.masses < 0).any():
            raise ConfigError("piece masses must be >= 0")
        if abs(self.masses.sum() - 1.0) > 1e-9:
            raise ConfigError(f"piece masses sum to {self.masses.sum()}, not 1")
        self.masses = self.masses / self.masses.sum()
        self._cum = np.concatenate([[0.0], np.cumsum(self.masses)])
        self._cum[-1] = 1.0

    def _cdf(self, x: float) -> float:
        b = self.breakpoints
        if x <= b[0]:
            return 0.0
        if x >= b[-1]:
            return 1.0
        i = int(np.searchsorted(b, x, side="right")) - 1
        frac = (x - b[i]) / (b[i + 1] - b[i])
        return self._cum[i] + self.masses[i] * frac

    def _draw(self, n, rng):
        u = rng.random(n)
        i = np.clip(np.searchsorted(self._cum, u, side="right") - 1, 0,
                    self.masses.size - 1)
        lo = self.breakpoints[i]
        hi = self.breakpoints[i + 1]
        inner = np.where(self.masses[i] > 0,
                         (u - self._cum[i]) / np.where(self.masses[i] > 0,
                                                       self.masses[i], 1.0),
                         0.0)
        return lo + inner * (hi - lo)

    def _marginal_cells(self, l: int):
        w = 2.0**-l
        j_lo = cell_of(self.breakpoints[0], l)
        j_hi = cell_of(self.breakpoints[-1], l)
        cells = {}
        for j in range(j_lo, j_hi + 1):
            mass = self._cdf((j + 1) * w) - self._cdf(j * w)
            if mass > 0.0:
                cells[j] = mass
        return cells

    def _cell_prob(self, level, coords):
        marg = self._marginal_cells(level.l)
        p = 1.0
        for j in coords:
            q = marg.get(j)
            if q is None:
                return 0.0
            p *= q
        return p

    def mass_cells(self, level):
        marg = sorted(self._marginal_cells(level.l))
        _check_cap(len(marg) ** level.m, level)
        out = [()]
        for _ in range(level.m):
            out = [c + (j,) for c in out for j in marg]
        return out

    def describe(self):
        return {
            "kind": self.kind,
            "breakpoints": self.breakpoints.tolist(),
            "masses": self.masses.tolist(),
        }


@dataclass(frozen=True)
class MarkovSpec:
    """Validated finite-chain parameters: transitions, emissions, stationary law."""

    transition: np.ndarray
    emissions: np.ndarray
    stationary: np.ndarray


def _stationary_vector(p: np.ndarray) -> np.ndarray:
    s = p.shape[0]
    a = np.vstack([p.T - np.eye(s), np.ones(s)])
    b = np.zeros(s + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    pi = pi / pi.sum()
    if np.abs(pi @ p - pi).max() > _STATIONARY_TOL:
        raise ConfigError("failed to solve the stationary equations accurately")
    return pi


def _check_irreducible_aperiodic(p: np.ndarray):
    s = p.shape[0]
    adj = p > 0.0
    # reachability from state 0 and to state 0
    def reach(mat):
        seen = {0}
        frontier = [0]
        while frontier:
            u = frontier.pop()
            for v in np.nonzero(mat[u])[0]:
                if v not in seen:
                    seen.add(int(v))
                    frontier.append(int(v))
        return seen

    if len(reach(adj)) != s or len(reach(adj.T)) != s:
        raise ConfigError("transition matrix is not irreducible")
    # period via BFS depths: gcd over edges of depth(u) + 1 - depth(v)
    depth = {0: 0}
    order = [0]
    for u in order:
        for v in np.nonzero(adj[u])[0]:
            v = int(v)
            if v not in depth:
                depth[v] = depth[u] + 1
                order.append(v)
    g = 0
    for u in range(s):
        for v in np.nonzero(adj[u])[0]:
            g = math.gcd(g, depth[u] + 1 - depth[int(v)])
    if abs(g) != 1:
        raise ConfigError(f"transition matrix has period {abs(g)}, chain not aperiodic")


class FiniteMarkov(ProcessModel):
    """Stationary finite Markov chain emitting one real value per state.

    Emissions must be injective; use :class:`FunctionOfMarkov` for
    lumped (non-injective) emissions.
    """

    kind = "finite-markov"
    _require_injective = True

    def __init__(self, transition, emissions):
        super().__init__()
        p = np.asarray(transition, dtype=np.float64)
        e = np.asarray(emissions, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ConfigError("transition must be a square matrix")
        s = p.shape[0]
        if e.shape != (s,):
            raise ConfigError("need exactly one emission per state")
        if not np.isfinite(e).all():
            raise ConfigError("emissions must be finite")
        if (p < 0).any():
            raise ConfigError("transition probabilities must be >= 0")
        if np.abs(p.sum(axis=1) - 1.0).max() > _ROW_SUM_TOL:
            raise ConfigError("transition rows must sum to 1")
        if self._require_injective and np.unique(e).size != s:
            raise ConfigError("emissions must be injective for finite-markov")
        _check_irreducible_aperiodic(p)
        pi = _stationary_vector(p)
        self.spec = MarkovSpec(p, e, pi)
        self._cum_rows = np.cumsum(p, axis=1)
        self._cum_rows[:, -1] = 1.0
        self._cum_pi = np.cumsum(pi)
        self._cum_pi[-1] = 1.0
        self._state_cells = {}

    @property
    def transition(self):
        return self.spec.transition

    @property
    def emissions(self):
        return self.spec.emissions

    @property
    def stationary(self):
        return self.spec.stationary

    @classmethod
    def two_state(cls, p_stay: float, emissions=(0.0, 1.0)):
        """Symmetric two-state chain with stay probability ``p_stay``."""
        t = [[p_stay, 1.0 - p_stay], [1.0 - p_stay, p_stay]]
        return cls(t, emissions)

    def _draw(self, n, rng):
        init = int(np.searchsorted(self._cum_pi, rng.random(), side="right"))
        if n == 1:
            states = np.array([init], dtype=np.int64)
        else:
            states = kernels.markov_path(self._cum_rows, init, rng.random(n - 1))
        return self.spec.emissions[states]

    def _cells_per_state(self, l: int) -> np.ndarray:
        cells = self._state_cells.get(l)
        if cells is None:
            cells = np.array([cell_of(v, l) for v in self.spec.emissions],
                             dtype=np.int64)
            self._state_cells[l] = cells
        return cells

    def _cell_prob(self, level, coords):
        cells = self._cells_per_state(level.l)
        v = np.where(cells == coords[0], self.spec.stationary, 0.0)
        for j in coords[1:]:
            v = np.where(cells == j, v @ self.spec.transition, 0.0)
        return float(v.sum())

    def mass_cells(self, level):
        cells = self._cells_per_state(level.l)
        front = {}
        for s, p in enumerate(self.spec.stationary):
            if p > 0:
                key = (int(cells[s]),)
                vec = front.setdefault(key, np.zeros(len(cells)))
                vec[s] = p
        for _ in range(level.m - 1):
            nxt = {}
            _check_cap(len(front) * len(set(cells.tolist())), level)
            for key, vec in front.items():
                flow = vec @ self.spec.transition
                for j in sorted(set(cells.tolist())):
                    masked = np.where(cells == j, flow, 0.0)
                    if masked.sum() > 0:
                        acc = nxt.setdefault(key + (j,), np.zeros(len(cells)))
                        acc += masked
            front = nxt
        return sorted(front)

    def describe(self):
        return {
            "kind": self.kind,
            "transition": self.spec.transition.tolist(),
            "emissions": self.spec.emissions.tolist(),
            "stationary": self.spec.stationary.tolist(),
        }


class FunctionOfMarkov(FiniteMarkov):
    """A fixed emission map applied to a hidden finite Markov chain.

    Same machinery as :class:`FiniteMarkov` but the emission map may
    collapse states, so the output process need not be Markov of any
    finite order.
    """

    kind = "function-of-markov"
    _require_injective = False


class Rotation(ProcessModel):
    """Irrational rotation: x_i = frac(theta + i * alpha), theta uniform."""

    kind = "rotation"

    def __init__(self, alpha: float = math.sqrt(2.0) - 1.0):
        super().__init__()
        if not (0.0 < alpha < 1.0):
            raise ConfigError("rotation angle must lie in (0, 1)")
        for q in range(1, 1025):
            if abs(alpha * q - round(alpha * q)) < 1e-10:
                raise ConfigError(
                    f"rotation angle {alpha} is rational to machine tolerance "
                    f"(denominator {q})"
                )
        self.alpha = float(alpha)

    def _draw(self, n, rng):
        theta = rng.random()
        return (theta + np.arange(1, n + 1) * self.alpha) % 1.0

    def _constraint_segments(self, j: int, coord: int, l: int):
        # theta-set of {frac(theta + j*alpha) in cell coord} as segments of [0,1)
        w = 2.0**-l
        if coord < 0 or coord >= 2**l:
            return []
        start = (coord * w - j * self.alpha) % 1.0
        end = start + w
        if end <= 1.0:
            return [(start, end)]
        return [(start, 1.0), (0.0, end - 1.0)]

    @staticmethod
    def _intersect(segs_a, segs_b):
        out = []
        for a0, a1 in segs_a:
            for b0, b1 in segs_b:
                lo = max(a0, b0)
                hi = min(a1, b1)
                if hi > lo:
                    out.append((lo, hi))
        return out

    def _cell_prob(self, level, coords):
        segs = [(0.0, 1.0)]
        for j, c in enumerate(coords, start=1):
            segs = self._intersect(segs, self._constraint_segments(j, c, level.l))
            if not segs:
                return 0.0
        return float(sum(hi - lo for lo, hi in segs))

    def mass_cells(self, level):
        w = 2.0**-level.l
        _check_cap(level.m * 2**level.l, level)
        points = {0.0}
        for j in range(1, level.m + 1):
            for k in range(2**level.l):
                points.add((k * w - j * self.alpha) % 1.0)
        pts = sorted(points)
        cells = {}
        for i, lo in enumerate(pts):
            hi = pts[i + 1] if i + 1 < len(pts) else 1.0
            if hi <= lo:
                continue
            mid = 0.5 * (lo + hi)
            key = tuple(cell_of((mid + j * self.alpha) % 1.0, level.l)
                        for j in range(1, level.m + 1))
            cells[key] = cells.get(key, 0.0) + (hi - lo)
        return sorted(cells)

    def describe(self):
        return {"kind": self.kind, "alpha": self.alpha}


class MonteCarloModel(ProcessModel):
    """Empirical oracle: cell probabilities estimated from one long run.

    Wraps any model that can only sample; ``cell_prob`` returns run
    frequencies (flagged approximate via ``exact_cell_prob = False``)
    and ``cell_prob_stderr`` reports the binomial standard error.
    """

    kind = "monte-carlo"
    exact_cell_prob = False

    def __init__(self, base: ProcessModel, run_length: int = 100_000,
                 seed: int = 0):
        super().__init__()
        if run_length < 2:
            raise ConfigError("run_length must be >= 2")
        self.base = base
        self.run_length = run_length
        self.seed = seed
        self._run = base.sample(run_length, seed)
        self._tables = {}

    def _draw(self, n, rng):
        return self.base._draw(n, rng)

    def _table(self, level):
        from .cylinder import freq_table

        key = (level.m, level.l)
        tab = self._tables.get(key)
        if tab is None:
            tab = freq_table(self._run, level.m, level.l)
            self._tables[key] = tab
        return tab

    def _cell_prob(self, level, coords):
        return self._table(level).freq(coords)

    def cell_prob_stderr(self, level, coords) -> float:
        tab = self._table(level)
        p = tab.freq(tuple(coords))
        return math.sqrt(p * (1.0 - p) / tab.denominator)

    def mass_cells(self, level):
        return sorted(self._table(level).counts)

    def describe(self):
        return {
            "kind": self.kind,
            "base": self.base.describe(),
            "run_length": self.run_length,
            "seed": self.seed,
        }


_KIND_PARAMS = {
    "iid-discrete": ("atoms", "probs"),
    "iid-piecewise-uniform": ("breakpoints", "masses"),
    "finite-markov": ("transition", "emissions"),
    "function-of-markov": ("transition", "emissions"),
    "rotation": ("alpha",),
}


def model_from_spec(spec: dict) -> ProcessModel:
    """Build a model from a key-value spec (parsed JSON).

    Raises :class:`ConfigError` naming the offending key on bad input.
    """
    if not isinstance(spec, dict):
        raise ConfigError(f"model spec must be a mapping, got {type(spec).__name__}")
    kind = spec.get("kind")
    if kind not in _KIND_PARAMS:
        raise ConfigError(
            f"unknown model kind {kind!r}; expected one of {sorted(_KIND_PARAMS)}"
        )
    wanted = _KIND_PARAMS[kind]
    extra = set(spec) - set(wanted) - {"kind"}
    if extra:
        raise ConfigError(f"unexpected keys for {kind}: {sorted(extra)}")
    missing = [k for k in wanted if k not in spec and kind != "rotation"]
    if missing:
        raise ConfigError(f"missing keys for {kind}: {missing}")
    try:
        if kind == "iid-discrete":
            return IIDDiscrete(spec["atoms"], spec["probs"])
        if kind == "iid-piecewise-uniform":
            return PiecewiseUniform(spec["breakpoints"], spec["masses"])
        if kind == "finite-markov":
            return FiniteMarkov(spec["transition"], spec["emissions"])
        if kind == "function-of-markov":
            return FunctionOfMarkov(spec["transition"], spec["emissions"])
        return Rotation(**{k: spec[k] for k in ("alpha",) if k in spec})
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid parameters for {kind}: {exc}") from exc
