"""Block-splitting solvers for linearly constrained coupled programs.

One family of sweeps covers every variant: each block in turn minimizes the
augmented Lagrangian in its own coordinates, optionally damped by a proximal
weight matrix, and the multiplier moves against the residual after the sweep.
Variants differ in block order, in whether constraints exist, and in whether
the quadratic model is replaced by a single-curvature linearization.

Variants
--------
admm2             two blocks, cyclic order, proximal matrices R_i
admm2_linearized  two blocks, scalar curvatures r_i, prox after a gradient
                  half-step (equivalent to admm2 with R_i = r_i I - H_ii -
                  beta A_i'A_i)
admm_cyclic_n     n blocks, cyclic order, proximal matrices R_i
bcd               n blocks, no constraints, proximal matrices R_i
bcpg              n blocks, no constraints, scalar curvatures r_i
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._linalg import max_abs, quad_form
from .errors import (
    ConditionError,
    DomainError,
    StructuralError,
    SubproblemStructureError,
    UsageError,
)
from .model import (
    KKTPoint,
    ProblemInstance,
    BlockStructure,
    check_uniqueness_condition,
    kkt_residual,
    merit_weight_matrices,
    normalize_block_matrices,
)
from .prox import fn_value, prox_eval, subdiff_distance

VARIANTS = ("admm2", "admm2_linearized", "admm_cyclic_n", "bcd", "bcpg")
GAMMA_SUP = (1.0 + math.sqrt(5.0)) / 2.0
DIVERGENCE_LIMIT = 1e12

_CONSTRAINED = ("admm2", "admm2_linearized", "admm_cyclic_n")
_LINEARIZED = ("admm2_linearized", "bcpg")


@dataclass
class SolverConfig:
    """Run parameters.

    R holds one entry per block: a symmetric PSD matrix, a nonnegative
    scalar (meaning that multiple of the identity), or None for zero. The
    linearized variants use scalar curvatures r instead; when r is None they
    are computed as the top eigenvalue of each block's quadratic model.
    """

    variant: str = "admm2"
    beta: float = 1.0
    gamma: float = 1.0
    R: list | None = None
    r: list | None = None
    tol: float = 1e-8
    max_iter: int = 100_000
    seed: int = 0

    def validate(self, inst: ProblemInstance) -> None:
        if self.variant not in VARIANTS:
            raise UsageError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if not self.beta > 0:
            raise UsageError("beta must be positive")
        if not (0.0 < self.gamma < GAMMA_SUP):
            raise UsageError(f"gamma must lie in (0, {GAMMA_SUP}) exclusive")
        if self.tol < 0:
            raise UsageError("tol must be nonnegative")
        if int(self.max_iter) < 1:
            raise UsageError("max_iter must be at least 1")
        if self.R is not None:
            normalize_block_matrices(inst, self.R)
        if self.r is not None:
            if len(self.r) != inst.blocks.n:
                raise StructuralError(f"r has {len(self.r)} entries, expected {inst.blocks.n}")
            if any(not float(v) > 0 for v in self.r):
                raise UsageError("every linearization curvature r_i must be positive")
        if self.seed is not None and int(self.seed) < 0:
            raise UsageError("seed must be a nonnegative integer")


@dataclass
class IterateState:
    """One iterate: current primal x, the previous primal (for proximal
    anchors and back-differences), the multiplier, and the step count."""

    x: np.ndarray
    x_prev: np.ndarray
    mu: np.ndarray
    k: int = 0

    @classmethod
    def start(cls, inst: ProblemInstance, x0=None, mu0=None) -> "IterateState":
        d, m = inst.blocks.d, inst.blocks.m
        x = np.zeros(d) if x0 is None else np.array(x0, dtype=float).reshape(d)
        mu = np.zeros(m) if mu0 is None else np.array(mu0, dtype=float).reshape(m)
        # the back-difference term is zero before any step has been taken
        return cls(x=x, x_prev=x.copy(), mu=mu, k=0)


@dataclass
class Trace:
    """Per-iteration records of a run plus its terminal state."""

    n_blocks: int
    ks: list = field(default_factory=list)
    r_dual: list = field(default_factory=list)
    r_feas: list = field(default_factory=list)
    surrogate_blocks: list = field(default_factory=list)
    surrogate: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    lyapunov: list = field(default_factory=list)
    status: str = "max_iter"
    exact_residuals: bool = True
    warnings: list = field(default_factory=list)
    x: np.ndarray | None = None
    mu: np.ndarray | None = None
    trial: int | None = None
    iterates: list | None = None

    def __len__(self) -> int:
        return len(self.ks)

    def max_residual(self, row: int) -> float:
        """Largest violation component at a row, from exact residuals when
        available and from the surrogate bound otherwise."""
        if self.exact_residuals:
            dual = self.r_dual[row]
            worst = float(np.max(dual)) if dual is not None and dual.size else 0.0
        else:
            blocks = self.surrogate_blocks[row]
            if blocks is None:
                return math.inf
            worst = float(np.max(blocks)) if blocks.size else 0.0
        return max(worst, self.r_feas[row])

    def total_sq(self, row: int) -> float:
        """Summed squared residual components at a row."""
        if self.exact_residuals:
            dual = self.r_dual[row]
        else:
            dual = self.surrogate_blocks[row]
        if dual is None:
            return math.inf
        return float(np.sum(np.asarray(dual) ** 2) + self.r_feas[row] ** 2)

    def to_csv(self, path, header_lines=()) -> None:
        cols = ["k"]
        if self.trial is not None:
            cols = ["trial", "k"]
        cols += [f"r_dual_{i + 1}" for i in range(self.n_blocks)]
        cols += ["r_feas", "surrogate", "objective", "lyapunov"]
        with open(path, "w") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            for w in self.warnings:
                fh.write(f"# warning: {w}\n")
            fh.write(",".join(cols) + "\n")
            for row in range(len(self.ks)):
                cells = []
                if self.trial is not None:
                    cells.append(str(self.trial))
                cells.append(str(self.ks[row]))
                dual = self.r_dual[row]
                for i in range(self.n_blocks):
                    cells.append(_fmt(None if dual is None else dual[i]))
                cells.append(_fmt(self.r_feas[row]))
                cells.append(_fmt(self.surrogate[row]))
                cells.append(_fmt(self.objective[row]))
                cells.append(_fmt(self.lyapunov[row]))
                fh.write(",".join(cells) + "\n")
            fh.write(f"# status={self.status}\n")


def _fmt(v) -> str:
    if v is None:
        return ""
    f = float(v)
    if math.isnan(f):
        return ""
    return repr(f)


def linearization_proximal(inst: ProblemInstance, beta: float, mode: str = "admm") -> list:
    """Per-block scalar curvature r_i and the equivalent proximal matrix
    R_i = r_i I - B_i, where B_i is the block's quadratic model:
    H_ii + beta A_i'A_i in constrained mode, H_ii alone in mode "bcd".

    Returns a list of (r_i, R_i) pairs. A block with no curvature at all
    cannot be linearized and raises ConditionError.
    """
    if mode not in ("admm", "bcd"):
        raise UsageError(f"unknown mode {mode!r}; expected 'admm' or 'bcd'")
    if mode == "admm" and not beta > 0:
        raise UsageError("beta must be positive")
    out = []
    for i in range(inst.blocks.n):
        B = inst.H_block(i, i).copy()
        if mode == "admm":
            Ai = inst.A_block(i)
            B += beta * (Ai.T @ Ai)
        w = np.linalg.eigvalsh(0.5 * (B + B.T))
        r = float(w[-1])
        if not r > 0:
            raise ConditionError(f"block {i} has no curvature; linearization is undefined")
        out.append((r, r * np.eye(B.shape[0]) - B))
    return out


class _BlockSolver:
    __slots__ = ("mode", "Kinv", "shift", "ridge")

    def __init__(self, mode, Kinv=None, shift=None, ridge=None):
        self.mode = mode
        self.Kinv = Kinv
        self.shift = shift
        self.ridge = ridge


class _Workspace:
    """Precomputed per-run data shared by every sweep."""

    def __init__(self, inst: ProblemInstance, cfg: SolverConfig, constrained: bool, linearized: bool):
        self.inst = inst
        self.cfg = cfg
        self.constrained = constrained
        self.linearized = linearized
        self.beta = cfg.beta if constrained else 0.0
        self.gamma = cfg.gamma
        self.warnings: list = []
        n = inst.blocks.n
        self.n = n
        self.slices = [inst.blocks.slice_of(i) for i in range(n)]
        self.A_blocks = [inst.A_block(i) for i in range(n)]
        self.H_blocks = [inst.H_block(i, i) for i in range(n)]
        self.S = inst.H + self.beta * (inst.A.T @ inst.A)
        self.exact_ok = all(f.kind != "opaque" for f in inst.theta)

        if linearized:
            pairs = linearization_proximal(inst, cfg.beta, mode="admm" if constrained else "bcd")
            if cfg.r is None:
                self.r = [p[0] for p in pairs]
            else:
                self.r = [float(v) for v in cfg.r]
                for i, (r_auto, _) in enumerate(pairs):
                    if self.r[i] < r_auto * (1.0 - 1e-12):
                        self.warnings.append(
                            f"r[{i}]={self.r[i]!r} is below the block's top curvature "
                            f"{r_auto!r}; descent guarantees may fail"
                        )
            self.R_eff = []
            for i in range(n):
                B = self.H_blocks[i].copy()
                if constrained:
                    Ai = self.A_blocks[i]
                    B += self.beta * (Ai.T @ Ai)
                self.R_eff.append(self.r[i] * np.eye(B.shape[0]) - B)
            self.block_solvers = None
        else:
            self.r = None
            self.R_eff = normalize_block_matrices(inst, cfg.R)
            self.block_solvers = [self._make_block_solver(i) for i in range(n)]

    def _make_block_solver(self, i: int) -> _BlockSolver:
        d_i = self.inst.blocks.dims[i]
        G = self.H_blocks[i] + self.R_eff[i]
        if self.constrained:
            Ai = self.A_blocks[i]
            G = G + self.beta * (Ai.T @ Ai)
        f = self.inst.theta[i]
        if f.kind in ("zero", "quadratic"):
            K = G.copy()
            shift = np.zeros(d_i)
            if f.kind == "quadratic":
                K = K + f.params["P"]
                shift = f.params["q"]
            w = np.linalg.eigvalsh(0.5 * (K + K.T))
            if w[0] <= 1e-12 * max(1.0, float(w[-1])):
                raise ConditionError(
                    f"block {i}: subproblem matrix is singular "
                    f"(min eigenvalue {float(w[0]):.3e}); the uniqueness condition fails"
                )
            return _BlockSolver("direct", Kinv=np.linalg.inv(K), shift=shift)
        ridge = float(np.trace(G)) / d_i
        off = max_abs(G - ridge * np.eye(d_i))
        if not ridge > 0 or off > 1e-10 * max(1.0, abs(ridge)):
            raise SubproblemStructureError(
                f"block {i} (kind {f.kind!r}): effective quadratic is not a scaled "
                "identity, so no closed-form subproblem exists; use variant "
                "admm2_linearized (or bcpg for unconstrained runs)"
            )
        return _BlockSolver("prox", ridge=ridge)

    # -- sweeps --------------------------------------------------------

    def sweep(self, x: np.ndarray, mu: np.ndarray, anchor: np.ndarray, order) -> None:
        """Update x in place, one block at a time against the latest values."""
        inst = self.inst
        H, g, A, b = inst.H, inst.g, inst.A, inst.b
        beta = self.beta
        for i in order:
            sl = self.slices[i]
            xi = x[sl]
            coup = H[sl] @ x - self.H_blocks[i] @ xi
            if self.linearized:
                t = self.r[i] * xi - self.H_blocks[i] @ xi - coup - g[sl]
                if self.constrained:
                    Ai = self.A_blocks[i]
                    ax_other = A @ x - Ai @ xi
                    t = t - beta * (Ai.T @ (Ai @ xi)) - beta * (Ai.T @ (ax_other - b)) + Ai.T @ mu
                x[sl] = prox_eval(inst.theta[i], self.r[i], t / self.r[i])
                continue
            lin = coup + g[sl] - self.R_eff[i] @ anchor[sl]
            if self.constrained:
                Ai = self.A_blocks[i]
                ax_other = A @ x - Ai @ xi
                lin = lin - Ai.T @ mu + beta * (Ai.T @ (ax_other - b))
            solver = self.block_solvers[i]
            if solver.mode == "direct":
                x[sl] = solver.Kinv @ (-(lin + solver.shift))
            else:
                x[sl] = prox_eval(inst.theta[i], solver.ridge, -lin / solver.ridge)

    def advance(self, state: IterateState, order, gamma=None) -> IterateState:
        x = state.x.copy()
        mu = state.mu.copy()
        self.sweep(x, mu, state.x, order)
        if self.constrained and self.inst.blocks.m:
            step = self.gamma if gamma is None else gamma
            mu = mu - step * self.beta * (self.inst.A @ x - self.inst.b)
        return IterateState(x=x, x_prev=state.x.copy(), mu=mu, k=state.k + 1)

    # -- residual pieces -------------------------------------------------

    def exact_dual(self, x: np.ndarray, mu: np.ndarray) -> np.ndarray:
        grad = self.inst.H @ x + self.inst.g
        out = np.zeros(self.n)
        for i in range(self.n):
            sl = self.slices[i]
            s = grad[sl] - self.A_blocks[i].T @ mu
            try:
                out[i] = subdiff_distance(self.inst.theta[i], x[sl], s)
            except DomainError:
                # outside dom theta_i the subdifferential is empty; the
                # distance to it is infinite (possible only at the start
                # point, before the first sweep projects the block inside)
                out[i] = math.inf
        return out

    def feasibility(self, x: np.ndarray) -> float:
        if not self.inst.blocks.m:
            return 0.0
        return float(np.linalg.norm(self.inst.A @ x - self.inst.b))

    def surrogate_parts(self, x_new: np.ndarray, x_old: np.ndarray, order, gamma=None) -> np.ndarray:
        """Per-block norms of the exact optimality shift from one sweep: block
        i is stationary for the new point up to
        -R_i dx_i + sum over later blocks of (H_ij + beta A_i'A_j) dx_j,
        plus a multiplier-stepsize correction when gamma differs from one.
        """
        dx = x_new - x_old
        step = self.gamma if gamma is None else gamma
        feas_vec = None
        if self.constrained and step != 1.0 and self.inst.blocks.m:
            feas_vec = self.inst.A @ x_new - self.inst.b
        out = np.zeros(self.n)
        later = np.zeros(self.inst.blocks.d)
        for p in reversed(range(len(order))):
            i = order[p]
            sl = self.slices[i]
            v = -(self.R_eff[i] @ dx[sl]) + self.S[sl] @ later
            if feas_vec is not None:
                v = v - self.beta * (1.0 - step) * (self.A_blocks[i].T @ feas_vec)
            out[i] = float(np.linalg.norm(v))
            later[sl] = dx[sl]
        return out


def _make_workspace(inst: ProblemInstance, cfg: SolverConfig, variant: str) -> _Workspace:
    constrained = variant in _CONSTRAINED
    linearized = variant in _LINEARIZED
    if variant in ("admm2", "admm2_linearized") and inst.blocks.n != 2:
        raise UsageError(f"variant {variant} needs exactly two blocks")
    if not constrained and inst.blocks.m:
        raise UsageError(
            "unconstrained variants need an instance without constraint rows; "
            "pass ignore_constraints=True to run_solver to drop them"
        )
    return _Workspace(inst, cfg, constrained, linearized)


def _strip_constraints(inst: ProblemInstance) -> ProblemInstance:
    blocks = BlockStructure(dims=inst.blocks.dims, m=0)
    return ProblemInstance(
        blocks=blocks, H=inst.H, g=inst.g, A=np.zeros((0, inst.blocks.d)), b=np.zeros(0), theta=inst.theta
    )


# -- public one-step operations ------------------------------------------


def admm2_step(inst: ProblemInstance, cfg: SolverConfig, state: IterateState) -> IterateState:
    """One two-block constrained sweep plus multiplier update."""
    ws = _make_workspace(inst, cfg, "admm2")
    return ws.advance(state, range(inst.blocks.n))


def admm2_linearized_step(inst: ProblemInstance, cfg: SolverConfig, state: IterateState) -> IterateState:
    """One two-block sweep where each block takes a single-curvature gradient
    half-step on the augmented model and then applies its prox."""
    ws = _make_workspace(inst, cfg, "admm2_linearized")
    return ws.advance(state, range(inst.blocks.n))


def admm_cyclic_n_step(inst: ProblemInstance, cfg: SolverConfig, state: IterateState) -> IterateState:
    """One cyclic sweep over all blocks plus multiplier update."""
    ws = _make_workspace(inst, cfg, "admm_cyclic_n")
    return ws.advance(state, range(inst.blocks.n))


def bcd_step(inst: ProblemInstance, cfg: SolverConfig, state: IterateState) -> IterateState:
    """One unconstrained cyclic sweep with proximal matrices."""
    ws = _make_workspace(inst, cfg, "bcd")
    return ws.advance(state, range(inst.blocks.n))


def bcpg_step(inst: ProblemInstance, cfg: SolverConfig, state: IterateState) -> IterateState:
    """One unconstrained cyclic sweep of prox-gradient block updates."""
    ws = _make_workspace(inst, cfg, "bcpg")
    return ws.advance(state, range(inst.blocks.n))


# -- full runs -------------------------------------------------------------


def run_solver(
    inst: ProblemInstance,
    cfg: SolverConfig,
    x0=None,
    mu0=None,
    reference: KKTPoint | None = None,
    ignore_constraints: bool = False,
    keep_iterates: bool = False,
) -> Trace:
    """Iterate the configured variant until the largest residual component
    falls to cfg.tol, the iterates overflow the divergence guard, or
    cfg.max_iter steps have run.

    The trace records, for every iteration, the exact per-block stationarity
    violations (when every term supports them), the constraint violation, the
    surrogate optimality bound from the sweep, the objective value, and the
    merit value against `reference` when one is given (two-block runs only).
    """
    cfg.validate(inst)
    variant = cfg.variant
    work = inst
    if variant in ("bcd", "bcpg") and inst.blocks.m:
        if not ignore_constraints:
            raise UsageError(
                "instance has constraint rows; unconstrained variants need "
                "ignore_constraints=True (constraints are then dropped)"
            )
        work = _strip_constraints(inst)
    ws = _make_workspace(work, cfg, variant)
    if variant in ("admm2", "admm2_linearized"):
        _check_two_block_condition(work, ws.R_eff)

    state = IterateState.start(work, x0, mu0)
    if reference is not None and work.blocks.n != 2:
        raise UsageError("merit recording needs a two-block instance")
    weights = None
    if reference is not None:
        weights = merit_weight_matrices(work, cfg.beta, ws.R_eff)

    trace = Trace(n_blocks=work.blocks.n, exact_residuals=ws.exact_ok)
    trace.warnings.extend(ws.warnings)
    if keep_iterates:
        trace.iterates = []

    order = list(range(work.blocks.n))
    _record(trace, ws, state, order, weights, reference, first=True)
    if ws.exact_ok and trace.max_residual(0) <= cfg.tol:
        trace.status = "converged"
        _finish(trace, state)
        return trace

    for _ in range(int(cfg.max_iter)):
        state = ws.advance(state, order)
        _record(trace, ws, state, order, weights, reference)
        if (
            float(np.max(np.abs(state.x))) > DIVERGENCE_LIMIT
            or (state.mu.size and float(np.max(np.abs(state.mu))) > DIVERGENCE_LIMIT)
        ):
            trace.status = "diverged"
            break
        if trace.max_residual(len(trace) - 1) <= cfg.tol:
            trace.status = "converged"
            break
    else:
        trace.status = "max_iter"
    _finish(trace, state)
    return trace


def _check_two_block_condition(inst: ProblemInstance, R_eff) -> None:
    # user-override curvatures can make R_eff indefinite; measure directly
    worst = math.inf
    for i in range(2):
        Ai = inst.A_block(i)
        T = inst.H_block(i, i) + inst.sigma_block(i) + Ai.T @ Ai + R_eff[i]
        w = np.linalg.eigvalsh(0.5 * (T + T.T))
        worst = min(worst, float(w[0]))
    if worst <= 1e-10:
        raise ConditionError(
            f"two-block uniqueness condition fails (min eigenvalue {worst:.3e}); "
            "see check_uniqueness_condition"
        )


def _record(trace, ws, state, order, weights, reference, first=False, gamma=None):
    trace.ks.append(state.k)
    if ws.exact_ok:
        trace.r_dual.append(ws.exact_dual(state.x, state.mu))
    else:
        trace.r_dual.append(None)
    trace.r_feas.append(ws.feasibility(state.x))
    if first:
        trace.surrogate_blocks.append(None)
        trace.surrogate.append(math.nan)
    else:
        parts = ws.surrogate_parts(state.x, state.x_prev, order, gamma=gamma)
        trace.surrogate_blocks.append(parts)
        trace.surrogate.append(float(math.sqrt(np.sum(parts**2) + trace.r_feas[-1] ** 2)))
    trace.objective.append(ws.inst.objective(state.x))
    if reference is None:
        trace.lyapunov.append(None)
    else:
        trace.lyapunov.append(_merit_from_weights(ws.cfg.beta, weights, state, reference))
    if trace.iterates is not None:
        trace.iterates.append((state.x.copy(), state.mu.copy()))


def _finish(trace, state):
    trace.x = state.x.copy()
    trace.mu = state.mu.copy()


def _merit_from_weights(beta, weights, state, reference) -> float:
    dx = state.x - np.asarray(reference.x, dtype=float)
    sl2 = weights["slice2"]
    dmu = state.mu - np.asarray(reference.mu, dtype=float)
    back = state.x[sl2] - state.x_prev[sl2]
    return (
        0.875 * quad_form(dx, weights["level"])
        + 0.5 * quad_form(dx[sl2], weights["level_b2"])
        + (0.5 / beta) * float(dmu @ dmu)
        + 0.5 * quad_form(back, weights["R2"])
    )


def _effective_R(inst: ProblemInstance, cfg: SolverConfig) -> list:
    if cfg.variant in _LINEARIZED:
        mode = "admm" if cfg.variant in _CONSTRAINED else "bcd"
        pairs = linearization_proximal(inst, cfg.beta, mode=mode)
        if cfg.r is None:
            return [p[1] for p in pairs]
        out = []
        for i, r in enumerate(cfg.r):
            B = inst.H_block(i, i).copy()
            if mode == "admm":
                Ai = inst.A_block(i)
                B += cfg.beta * (Ai.T @ Ai)
            out.append(float(r) * np.eye(B.shape[0]) - B)
        return out
    return normalize_block_matrices(inst, cfg.R)


def lyapunov_value(inst: ProblemInstance, cfg: SolverConfig, state: IterateState, reference: KKTPoint) -> float:
    """Merit value of a two-block iterate against a stationary reference:
    a weighted squared distance to the reference plus a back-difference term,
    nonincreasing along constrained two-block runs with unit dual stepsize."""
    if inst.blocks.n != 2:
        raise UsageError("the merit function is defined for two-block instances")
    R_eff = _effective_R(inst, cfg)
    weights = merit_weight_matrices(inst, cfg.beta, R_eff)
    return _merit_from_weights(cfg.beta, weights, state, reference)


def lyapunov_decrease_floor(
    inst: ProblemInstance, cfg: SolverConfig, prev: IterateState, nxt: IterateState
) -> float:
    """Guaranteed minimum drop of the merit value across one step, evaluated
    from the two consecutive iterates."""
    if inst.blocks.n != 2:
        raise UsageError("the merit function is defined for two-block instances")
    R_eff = _effective_R(inst, cfg)
    weights = merit_weight_matrices(inst, cfg.beta, R_eff)
    return merit_decrease_floor_from_weights(cfg.beta, weights, prev, nxt)


def merit_decrease_floor_from_weights(beta, weights, prev, nxt) -> float:
    dx = nxt.x - prev.x
    sl2 = weights["slice2"]
    dmu = nxt.mu - prev.mu
    return (
        quad_form(dx, weights["drop"]) / 16.0
        + quad_form(dx[sl2], weights["drop_b2"]) / 6.0
        + (0.5 / beta) * float(dmu @ dmu)
    )


def min_kkt_sq_curve(trace: Trace) -> np.ndarray:
    """Series of (k, k * running minimum of the summed squared residual),
    over the generated iterates (k >= 1). The residual triple is exact when
    the trace has exact residuals and the surrogate bound otherwise."""
    rows = [row for row in range(len(trace)) if trace.ks[row] >= 1]
    if not rows:
        raise UsageError("trace has no generated iterates")
    out = np.zeros((len(rows), 2))
    best = math.inf
    for j, row in enumerate(rows):
        best = min(best, trace.total_sq(row))
        k = trace.ks[row]
        out[j, 0] = k
        out[j, 1] = k * best
    return out
