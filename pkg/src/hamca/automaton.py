"""Integer cellular-automaton engine.

The dynamical state is a pair of consecutive integer slices; the three-term
recursion

    x'      = x'' + c (S p + A x)
    p'      = p'' - c (S x - A p)
    tau'    = tau'' + c
    2pi'    = 2pi'' + (2H' - 2H'')

(primes: next slice, double primes: previous slice, unprimed: current) is
exact and reversible.  H can be half-integer when diag(S) has odd entries, so
the engine stores 2H and 2pi throughout; every stored quantity is an exact
integer.

Out-of-band dynamics grows the integers exponentially; evolve and the
streaming conservation sweep enforce a configurable digit budget instead of
exhausting memory.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from typing import Iterator, Sequence

from .exactmath import (
    GaussianInteger,
    GaussianMatrix,
    HamiltonianParts,
    ShapeError,
    build_hamiltonian,
    matvec,
)

try:  # pure-Python ints remain the fallback; gmpy2 only speeds up big values
    from gmpy2 import mpz as _fastint
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _fastint = int

DEFAULT_BUDGET_DIGITS = 10**6
_BITS_PER_DIGIT = math.log2(10)


class BudgetExceededError(RuntimeError):
    """Slice magnitude crossed the digit budget; carries the step reached."""

    def __init__(self, step: int, budget_digits: int):
        self.step = step
        self.budget_digits = budget_digits
        super().__init__(
            f"slice magnitude exceeded {budget_digits} digits at step {step}; "
            "the dynamics is out of band (growing modes) or the budget is too small"
        )


@dataclass(frozen=True)
class AutomatonSpec:
    """Dimension, the integer matrices (S, A) and the constant lapse c."""

    dim: int
    parts: HamiltonianParts
    lapse_c: int

    def __post_init__(self):
        object.__setattr__(self, "dim", operator.index(self.dim))
        object.__setattr__(self, "lapse_c", operator.index(self.lapse_c))
        if self.dim < 1:
            raise ShapeError(f"dim must be positive, got {self.dim}")
        if self.parts.dim != self.dim:
            raise ShapeError(
                f"spec dim {self.dim} does not match matrices of dim {self.parts.dim}"
            )

    def hamiltonian(self) -> GaussianMatrix:
        return build_hamiltonian(self.parts)


@dataclass(frozen=True)
class Slice:
    """One integer state slice; two_pi stores the doubled momentum 2*pi."""

    n: int
    x: tuple[int, ...]
    p: tuple[int, ...]
    tau: int
    two_pi: int

    def __post_init__(self):
        object.__setattr__(self, "n", operator.index(self.n))
        object.__setattr__(self, "x", tuple(operator.index(v) for v in self.x))
        object.__setattr__(self, "p", tuple(operator.index(v) for v in self.p))
        object.__setattr__(self, "tau", operator.index(self.tau))
        object.__setattr__(self, "two_pi", operator.index(self.two_pi))
        if len(self.x) != len(self.p):
            raise ShapeError(f"x has length {len(self.x)} but p has length {len(self.p)}")


@dataclass(frozen=True)
class StatePair:
    """Two consecutive slices, the minimal data for the recursion."""

    prev: Slice
    curr: Slice

    def __post_init__(self):
        if self.curr.n != self.prev.n + 1:
            raise ShapeError(
                f"slices must be consecutive: got n={self.prev.n} then n={self.curr.n}"
            )
        if len(self.prev.x) != len(self.curr.x):
            raise ShapeError("slices have different dimensions")

    @property
    def dim(self) -> int:
        return len(self.curr.x)


@dataclass(frozen=True)
class Trajectory:
    """Consecutively indexed slices evolved under one spec."""

    spec: AutomatonSpec
    slices: tuple[Slice, ...]

    def __post_init__(self):
        object.__setattr__(self, "slices", tuple(self.slices))
        if len(self.slices) < 2:
            raise ShapeError("trajectory needs at least the two seed slices")
        for k, s in enumerate(self.slices):
            if len(s.x) != self.spec.dim:
                raise ShapeError(f"slice {k} has dim {len(s.x)}, spec has {self.spec.dim}")
            if k and s.n != self.slices[k - 1].n + 1:
                raise ShapeError(f"slice indices not consecutive at position {k}")

    def __len__(self) -> int:
        return len(self.slices)

    @property
    def initial_pair(self) -> StatePair:
        return StatePair(self.slices[0], self.slices[1])

    @property
    def final_pair(self) -> StatePair:
        return StatePair(self.slices[-2], self.slices[-1])

    def position_of(self, n: int) -> int:
        k = n - self.slices[0].n
        if not (0 <= k < len(self.slices)):
            raise IndexError(f"slice index {n} outside trajectory range")
        return k


def psi(slc: Slice) -> tuple[GaussianInteger, ...]:
    """The complex amplitude vector x + i p of a slice."""
    return tuple(GaussianInteger(a, b) for a, b in zip(slc.x, slc.p))


def hamiltonian_doubled(spec: AutomatonSpec, slc: Slice) -> int:
    """2H = S_ab (p_a p_b + x_a x_b) + 2 A_ab p_a x_b, always an exact integer."""
    if len(slc.x) != spec.dim:
        raise ShapeError(f"slice dim {len(slc.x)} does not match spec dim {spec.dim}")
    return _raw_two_h(spec.parts.S, spec.parts.A, slc.x, slc.p)


def _raw_two_h(S, A, xs, ps) -> int:
    n = len(xs)
    tot = 0
    for a in range(n):
        Sa = S[a]
        Aa = A[a]
        xa = xs[a]
        pa = ps[a]
        for b in range(n):
            s = Sa[b]
            if s:
                tot += s * (pa * ps[b] + xa * xs[b])
            w = Aa[b]
            if w:
                tot += 2 * w * pa * xs[b]
    return tot


def _raw_step(S, A, c, prev_x, prev_p, cur_x, cur_p):
    # u = S x - A p,  v = S p + A x; the new slice is prev + c*(v, -u)
    n = len(cur_x)
    nxt_x = []
    nxt_p = []
    for a in range(n):
        Sa = S[a]
        Aa = A[a]
        u = 0
        v = 0
        for b in range(n):
            s = Sa[b]
            if s:
                u += s * cur_x[b]
                v += s * cur_p[b]
            w = Aa[b]
            if w:
                u -= w * cur_p[b]
                v += w * cur_x[b]
        nxt_x.append(prev_x[a] + c * v)
        nxt_p.append(prev_p[a] - c * u)
    return nxt_x, nxt_p


def step_forward(spec: AutomatonSpec, pair: StatePair) -> StatePair:
    """Advance one step: (slice n-1, slice n) -> (slice n, slice n+1)."""
    if pair.dim != spec.dim:
        raise ShapeError(f"pair dim {pair.dim} does not match spec dim {spec.dim}")
    S, A, c = spec.parts.S, spec.parts.A, spec.lapse_c
    prev, curr = pair.prev, pair.curr
    nxt_x, nxt_p = _raw_step(S, A, c, prev.x, prev.p, curr.x, curr.p)
    two_h_next = _raw_two_h(S, A, nxt_x, nxt_p)
    two_h_prev = _raw_two_h(S, A, prev.x, prev.p)
    nxt = Slice(
        n=curr.n + 1,
        x=tuple(nxt_x),
        p=tuple(nxt_p),
        tau=prev.tau + c,
        two_pi=prev.two_pi + (two_h_next - two_h_prev),
    )
    return StatePair(curr, nxt)


def step_backward(spec: AutomatonSpec, pair: StatePair) -> StatePair:
    """Reconstruct the earlier slice: (slice n, slice n+1) -> (slice n-1, slice n).

    Exact inverse of step_forward, bit for bit.
    """
    if pair.dim != spec.dim:
        raise ShapeError(f"pair dim {pair.dim} does not match spec dim {spec.dim}")
    S, A, c = spec.parts.S, spec.parts.A, spec.lapse_c
    curr, nxt = pair.prev, pair.curr
    n = spec.dim
    prev_x = []
    prev_p = []
    for a in range(n):
        Sa = S[a]
        Aa = A[a]
        u = 0
        v = 0
        for b in range(n):
            s = Sa[b]
            if s:
                u += s * curr.x[b]
                v += s * curr.p[b]
            w = Aa[b]
            if w:
                u -= w * curr.p[b]
                v += w * curr.x[b]
        prev_x.append(nxt.x[a] - c * v)
        prev_p.append(nxt.p[a] + c * u)
    two_h_prev = _raw_two_h(S, A, prev_x, prev_p)
    two_h_next = _raw_two_h(S, A, nxt.x, nxt.p)
    prev = Slice(
        n=curr.n - 1,
        x=tuple(prev_x),
        p=tuple(prev_p),
        tau=nxt.tau - c,
        two_pi=nxt.two_pi - (two_h_next - two_h_prev),
    )
    return StatePair(prev, curr)


def _bit_budget(budget_digits: int) -> int:
    return int(budget_digits * _BITS_PER_DIGIT) + 1


def evolve(
    spec: AutomatonSpec,
    init: StatePair,
    steps: int,
    *,
    budget_digits: int = DEFAULT_BUDGET_DIGITS,
) -> Trajectory:
    """Iterate the recursion; returns steps + 2 slices, deterministically.

    Raises BudgetExceededError when any slice value would exceed
    ``budget_digits`` decimal digits.
    """
    steps = operator.index(steps)
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    if init.dim != spec.dim:
        raise ShapeError(f"seed pair dim {init.dim} does not match spec dim {spec.dim}")
    S, A, c = spec.parts.S, spec.parts.A, spec.lapse_c
    maxbits = _bit_budget(budget_digits)

    slices = [init.prev, init.curr]
    prev_x = [_fastint(v) for v in init.prev.x]
    prev_p = [_fastint(v) for v in init.prev.p]
    cur_x = [_fastint(v) for v in init.curr.x]
    cur_p = [_fastint(v) for v in init.curr.p]
    prev_two_h = _raw_two_h(S, A, prev_x, prev_p)
    cur_two_h = _raw_two_h(S, A, cur_x, cur_p)
    prev_tau, cur_tau = init.prev.tau, init.curr.tau
    prev_pi, cur_pi = _fastint(init.prev.two_pi), _fastint(init.curr.two_pi)

    for k in range(steps):
        nxt_x, nxt_p = _raw_step(S, A, c, prev_x, prev_p, cur_x, cur_p)
        nxt_two_h = _raw_two_h(S, A, nxt_x, nxt_p)
        nxt_tau = prev_tau + c
        nxt_pi = prev_pi + (nxt_two_h - prev_two_h)
        worst = max(max(v.bit_length() for v in nxt_x),
                    max(v.bit_length() for v in nxt_p),
                    nxt_pi.bit_length())
        if worst > maxbits:
            raise BudgetExceededError(step=k + 1, budget_digits=budget_digits)
        slices.append(
            Slice(
                n=slices[-1].n + 1,
                x=tuple(int(v) for v in nxt_x),
                p=tuple(int(v) for v in nxt_p),
                tau=nxt_tau,
                two_pi=int(nxt_pi),
            )
        )
        prev_x, prev_p, cur_x, cur_p = cur_x, cur_p, nxt_x, nxt_p
        prev_two_h, cur_two_h = cur_two_h, nxt_two_h
        prev_tau, cur_tau = cur_tau, nxt_tau
        prev_pi, cur_pi = cur_pi, nxt_pi

    return Trajectory(spec, tuple(slices))


def action(traj: Trajectory) -> int:
    """The doubled action 2*Action over all consecutive slice pairs.

    2*Action = sum_n [ 2 (p_n + p_{n-1}) . dx_n + (2pi_n + 2pi_{n-1}) dtau_n
                       - dtau_n (2H_n + 2H_{n-1}) - c * 2pi_n ]

    Doubling keeps every term an exact integer for any integer S.
    """
    if len(traj) < 3:
        raise ValueError(f"trajectory too short for an action: {len(traj)} slices")
    S, A, c = traj.spec.parts.S, traj.spec.parts.A, traj.spec.lapse_c
    sls = traj.slices
    two_h = [_raw_two_h(S, A, s.x, s.p) for s in sls]
    total = 0
    for n in range(1, len(sls)):
        a, b = sls[n - 1], sls[n]
        dtau = b.tau - a.tau
        term = 0
        for j in range(traj.spec.dim):
            term += 2 * (b.p[j] + a.p[j]) * (b.x[j] - a.x[j])
        term += (b.two_pi + a.two_pi) * dtau
        term -= dtau * (two_h[n] + two_h[n - 1])
        term -= c * b.two_pi
        total += term
    return total


_SELECTORS = ("x", "p", "tau", "pi")


def discrete_variation(
    traj: Trajectory,
    site: tuple[int, str, int | None],
    delta: int,
) -> int:
    """Symmetric integer variation of the doubled action at one interior site.

    ``site`` is (slice index n, selector, component); selector is one of
    "x", "p", "tau", "pi" and component indexes the vector selectors.  The
    variation rule is [g(f + delta) - g(f - delta)] / 2 applied to the doubled
    action with the endpoints held fixed; a "pi" variation of delta shifts the
    stored two_pi by 2*delta.  Zero for every interior site, component and
    integer delta exactly when the trajectory satisfies the update rules.
    """
    n, selector, component = site
    delta = operator.index(delta)
    k = traj.position_of(n)
    if not (1 <= k <= len(traj) - 2):
        raise IndexError(f"site n={n} is an endpoint; only interior sites can vary")
    if selector not in _SELECTORS:
        raise ValueError(f"unknown selector {selector!r}, expected one of {_SELECTORS}")
    if selector in ("x", "p"):
        if component is None or not (0 <= component < traj.spec.dim):
            raise IndexError(f"component {component!r} out of range for dim {traj.spec.dim}")

    plus = _action_with_varied_site(traj, k, selector, component, delta)
    minus = _action_with_varied_site(traj, k, selector, component, -delta)
    diff = plus - minus
    # the doubled action is polynomial with integer coefficients, so the
    # symmetric difference is always even
    assert diff % 2 == 0
    return diff // 2


def _action_with_varied_site(traj, k, selector, component, delta) -> int:
    varied = list(traj.slices)
    s = varied[k]
    if selector == "x":
        x = list(s.x)
        x[component] += delta
        varied[k] = Slice(s.n, tuple(x), s.p, s.tau, s.two_pi)
    elif selector == "p":
        p = list(s.p)
        p[component] += delta
        varied[k] = Slice(s.n, s.x, tuple(p), s.tau, s.two_pi)
    elif selector == "tau":
        varied[k] = Slice(s.n, s.x, s.p, s.tau + delta, s.two_pi)
    else:  # pi: the dynamical variable is pi = two_pi / 2
        varied[k] = Slice(s.n, s.x, s.p, s.tau, s.two_pi + 2 * delta)
    return action(Trajectory(traj.spec, tuple(varied)))


def conservation_residual(traj: Trajectory, G: GaussianMatrix, n: int) -> GaussianInteger:
    """The discrete bracket psi*_n G dpsi_n + dpsi*_n G psi_n, exactly.

    dpsi_n = psi_{n+1} - psi_{n-1}.  Guaranteed to be the exact zero whenever
    G commutes with H = S + iA; evaluated directly from the stored slices so
    it is an independent check on the engine.
    """
    if G.rows != G.cols or G.rows != traj.spec.dim:
        raise ShapeError(f"G is {G.rows}x{G.cols}, trajectory dim is {traj.spec.dim}")
    k = traj.position_of(n)
    if not (1 <= k <= len(traj) - 2):
        raise IndexError(f"n={n} is not interior to the trajectory")
    psi_n = psi(traj.slices[k])
    psi_plus = psi(traj.slices[k + 1])
    psi_minus = psi(traj.slices[k - 1])
    dpsi = tuple(a - b for a, b in zip(psi_plus, psi_minus))
    g_dpsi = matvec(G, dpsi)
    g_psi = matvec(G, psi_n)
    total = GaussianInteger(0, 0)
    for a in range(traj.spec.dim):
        total = total + psi_n[a].conjugate() * g_dpsi[a]
        total = total + dpsi[a].conjugate() * g_psi[a]
    return total


def conservation_sweep(
    spec: AutomatonSpec,
    init: StatePair,
    steps: int,
    matrices: Sequence[GaussianMatrix],
    *,
    budget_digits: int = DEFAULT_BUDGET_DIGITS,
) -> list[tuple[int, int]]:
    """Evaluate the conservation bracket at every interior step of a long run.

    Streams the x,p recursion without materialising a Trajectory, so runs of
    10^4+ steps stay in memory.  Each matrix must be self-adjoint; for those
    the bracket at step n equals 2*(D_n - D_{n-1}) with
    D_n = Re(psi*_n G psi_{n+1}), so the sweep tracks the one-sided bracket
    and reports every step where it moves.  Returns a list of
    (slice index, matrix position) violations; empty means every residual was
    the exact zero.  Agrees with conservation_residual (cross-checked in the
    test suite).
    """
    steps = operator.index(steps)
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    if init.dim != spec.dim:
        raise ShapeError(f"seed pair dim {init.dim} does not match spec dim {spec.dim}")
    dim = spec.dim
    mats = []
    for g in matrices:
        if g.rows != g.cols or g.rows != dim:
            raise ShapeError(f"matrix is {g.rows}x{g.cols}, spec dim is {dim}")
        if not g.is_self_adjoint():
            raise ValueError("conservation_sweep requires self-adjoint matrices")
        gre = [[g.entry(a, b).re for b in range(dim)] for a in range(dim)]
        gim = [[g.entry(a, b).im for b in range(dim)] for a in range(dim)]
        mats.append((gre, gim))

    S, A, c = spec.parts.S, spec.parts.A, spec.lapse_c
    maxbits = _bit_budget(budget_digits)
    rng = range(dim)

    cur_x = [_fastint(v) for v in init.prev.x]
    cur_p = [_fastint(v) for v in init.prev.p]
    nxt_x = [_fastint(v) for v in init.curr.x]
    nxt_p = [_fastint(v) for v in init.curr.p]
    base_n = init.prev.n

    violations: list[tuple[int, int]] = []
    prev_d: list[int | None] = [None] * len(mats)
    for k in range(steps + 1):
        # one-sided brackets D = Re(psi_k^* G psi_{k+1}) for each matrix
        for gi, (gre, gim) in enumerate(mats):
            d = 0
            for a in rng:
                gra = gre[a]
                gia = gim[a]
                wr = 0
                wi = 0
                for b in rng:
                    grv = gra[b]
                    if grv:
                        wr += grv * nxt_x[b]
                        wi += grv * nxt_p[b]
                    giv = gia[b]
                    if giv:
                        wr -= giv * nxt_p[b]
                        wi += giv * nxt_x[b]
                d += cur_x[a] * wr + cur_p[a] * wi
            if prev_d[gi] is not None and d != prev_d[gi]:
                violations.append((base_n + k, gi))
            prev_d[gi] = d
        if k == steps:
            break
        new_x, new_p = _raw_step(S, A, c, cur_x, cur_p, nxt_x, nxt_p)
        worst = max(max(v.bit_length() for v in new_x),
                    max(v.bit_length() for v in new_p))
        if worst > maxbits:
            raise BudgetExceededError(step=k + 1, budget_digits=budget_digits)
        cur_x, cur_p = nxt_x, nxt_p
        nxt_x, nxt_p = new_x, new_p
    return violations


def leibniz_residual(o: Sequence[int], oprime: Sequence[int], n: int) -> int:
    """Doubled residual of the modified product rule at interior index n.

    2 (O_{n+1} O'_{n+1} - O_{n-1} O'_{n-1})
        - dO_n (O'_{n+1} + O'_{n-1}) - (O_{n+1} + O_{n-1}) dO'_n

    with dO_n = O_{n+1} - O_{n-1}.  Identically zero for any integer
    sequences; both sides are kept doubled so everything stays in integers.
    """
    if not (1 <= n < len(o) - 1 and 1 <= n < len(oprime) - 1):
        raise IndexError(f"n={n} is not interior to the sequences")
    op_, om = o[n + 1], o[n - 1]
    qp, qm = oprime[n + 1], oprime[n - 1]
    lhs = 2 * (op_ * qp - om * qm)
    rhs = (op_ - om) * (qp + qm) + (op_ + om) * (qp - qm)
    return lhs - rhs


def trajectory_records(traj: Trajectory) -> Iterator[dict]:
    """One record per slice: n, tau, two_pi, two_H and the x, p components."""
    for s in traj.slices:
        yield {
            "n": s.n,
            "tau": s.tau,
            "two_pi": s.two_pi,
            "two_H": hamiltonian_doubled(traj.spec, s),
            "x": s.x,
            "p": s.p,
        }
