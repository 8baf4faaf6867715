"""Binary phase search, accuracy refinement, repetition policy, and the
outcome-tree probability analysis."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .paulis import PauliSum
from .rounds import (
    BlockEncoding,
    RoundSpec,
    build_block_encoding,
    postselect_ancilla,
    run_round,
)
from .signpoly import PhaseFactorSet, TrigPolynomial, sign_factors
from .spectral import EvolutionHandle, SpectralDecomposition, diagonalize, evolution_from_decomposition
from .states import QuantumState, as_rng
from .hamiltonians import spectrum_guard


@dataclass
class Region:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty region ({self.lo}, {self.hi})")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


def update_region(region: Region, outcome: int, kappa: float) -> Region:
    """Halve the region towards the measured side, padded by kappa.

    Wide rule (width > 2 pi - 2 kappa) also pads the far edge; boundaries
    are clamped to the principal range [-pi, pi].
    """
    mid = region.midpoint
    if region.width > 2 * np.pi - 2 * kappa:
        if outcome == 0:
            lo, hi = mid - kappa, region.hi + kappa
        else:
            lo, hi = region.lo - kappa, mid + kappa
    else:
        if outcome == 0:
            lo, hi = mid - kappa, region.hi
        else:
            lo, hi = region.lo, mid + kappa
    return Region(max(lo, -np.pi), min(hi, np.pi))


@dataclass
class SearchConfig:
    """Knobs of one ground-state search.

    gap is the caller's lower bound on the spectral gap (in the energy units
    of the Hamiltonian actually searched); target_accuracy defaults to
    gap/3. Q defaults to ceil(log2(pi/kappa)) so the rough region's excess
    over 2*kappa is at most kappa itself.
    """

    gap: float
    kappa: float = 0.25
    eps: float = 1e-4
    target_accuracy: float | None = None
    Q: int | None = None
    repeats: int | None = None
    overlap_floor_sq: float = 0.16
    confidence_log: float = 5.0
    mode: str = "he"
    backend: str = "spectral"
    seed: int = 0
    factor_tol: float = 1e-8
    max_refine_levels: int = 60

    def __post_init__(self):
        if self.gap <= 0:
            raise ValueError("gap must be positive")
        if self.mode not in ("he", "be"):
            raise ValueError("mode must be 'he' or 'be'")
        if self.Q is None:
            self.Q = int(np.ceil(np.log2(np.pi / self.kappa)))
        if self.target_accuracy is None:
            self.target_accuracy = self.gap / 3.0
        if self.target_accuracy > self.gap / 2.0 + 1e-15:
            raise ValueError("target accuracy above gap/2 cannot isolate the ground state")
        if self.refine_base < 2:
            raise ValueError(
                f"floor(1/kappa_bar) = {self.refine_base} < 2; increase Q or decrease kappa"
            )

    @property
    def kappa_bar(self) -> float:
        """Half-width bound of the rough-search region: kappa + pi/2^Q."""
        return self.kappa + np.pi / (1 << self.Q)

    @property
    def refine_base(self) -> int:
        return int(np.floor(1.0 / self.kappa_bar))

    def effective_repeats(self) -> int:
        if self.repeats is not None:
            return self.repeats
        return int(np.ceil(self.confidence_log / self.overlap_floor_sq))


@dataclass
class RoundRecord:
    level: int
    region: tuple[float, float]
    shift: float
    power: int
    outcome: int
    probability: float
    p0: float


@dataclass
class SearchTrace:
    rounds: list[RoundRecord] = field(default_factory=list)
    level_estimates: list[float] = field(default_factory=list)
    estimate: float | None = None
    energy: float | None = None
    postselect_attempts: int | None = None

    @property
    def num_rounds(self) -> int:
        return len(self.rounds)

    def controlled_queries(self, L: int) -> int:
        """Total controlled-unitary queries, counting U^p as p queries."""
        return int(sum(L * r.power for r in self.rounds))

    def to_dict(self) -> dict:
        return {
            "rounds": [
                {
                    "level": r.level,
                    "region": [r.region[0], r.region[1]],
                    "shift": r.shift,
                    "power": r.power,
                    "outcome": r.outcome,
                    "probability": r.probability,
                    "p0": r.p0,
                }
                for r in self.rounds
            ],
            "level_estimates": self.level_estimates,
            "estimate": self.estimate,
            "energy": self.energy,
            "postselect_attempts": self.postselect_attempts,
            "num_rounds": self.num_rounds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def rough_search(
    handle: EvolutionHandle,
    state: QuantumState,
    cfg: SearchConfig,
    rng,
    factors: PhaseFactorSet,
    trace: SearchTrace | None = None,
    level: int = 1,
    power: int = 1,
) -> tuple[Region, QuantumState]:
    """Q rounds of binary search over the phase interval (-pi, pi)."""
    rng = as_rng(rng)
    region = Region(-np.pi, np.pi)
    for _ in range(cfg.Q):
        spec = RoundSpec(shift=region.midpoint, power=power, factors=factors, backend=cfg.backend)
        res = run_round(handle, spec, state, rng)
        if trace is not None:
            trace.rounds.append(
                RoundRecord(
                    level=level,
                    region=(region.lo, region.hi),
                    shift=spec.shift,
                    power=power,
                    outcome=res.outcome,
                    probability=res.probability,
                    p0=res.p0,
                )
            )
        region = update_region(region, res.outcome, cfg.kappa)
        state = res.post_state
    return region, state


def refine(
    handle: EvolutionHandle,
    state: QuantumState,
    region: Region,
    cfg: SearchConfig,
    rng,
    factors: PhaseFactorSet,
    trace: SearchTrace | None = None,
    target_accuracy: float | None = None,
) -> tuple[float, QuantumState, EvolutionHandle]:
    """Sharpen a completed rough search by powering the shifted unitary.

    Level i replaces U with (e^{-i lambda^{(i)}} U)^s, s = floor(1/kappa_bar),
    and repeats the rough search; the estimates telescope as
    lambdaated^(1) + lambda^(2)/s + lambda^(3)/s^2 + ... with error at most
    s^{-j} after j levels. Returns the estimate in the phase units of the
    incoming handle, the final state, and the final-level handle.
    """
    rng = as_rng(rng)
    target = cfg.target_accuracy if target_accuracy is None else target_accuracy
    s = cfg.refine_base
    estimate = region.midpoint
    estimates = [estimate]
    level = 1
    scale = 1.0
    cur_handle = handle
    while s ** (-level) > target and level < cfg.max_refine_levels:
        cur_handle = cur_handle.modified(shift=estimates[-1], power=s)
        scale *= s
        level += 1
        region, state = rough_search(
            cur_handle, state, cfg, rng, factors, trace, level=level, power=1
        )
        estimates.append(region.midpoint)
        estimate += region.midpoint / scale
    if trace is not None:
        trace.level_estimates = estimates
        trace.estimate = estimate
    return estimate, state, cur_handle


@dataclass
class PrepareResult:
    energy: float
    state: QuantumState
    trace: SearchTrace
    repeats_used: int
    all_energies: list[float]
    guard_scale: float
    alpha: float | None = None
    certified: bool = True  # False: no second run confirmed the minimum


def _certify(energies: list[float], tolerance: float) -> bool:
    """Weak internal certificate: the minimal energy estimate was reproduced
    by at least one other repeat (within twice the target accuracy). Whether
    the minimum is truly the ground energy is only checkable against an
    oracle; a lone outlier minimum is flagged instead."""
    if len(energies) == 1:
        return True
    lo = min(energies)
    return sum(e <= lo + 2.0 * tolerance for e in energies) >= 2


def _search_once_he(
    handle, rho, cfg, rng, f, pf, phase_target
) -> tuple[float, QuantumState, SearchTrace]:
    trace = SearchTrace()
    region, state = rough_search(handle, rho.copy(), cfg, rng, pf, trace, level=1)
    phase_est, state, _ = refine(
        handle, state, region, cfg, rng, pf, trace, target_accuracy=phase_target
    )
    trace.estimate = phase_est
    return phase_est, state, trace


def _search_once_be(be: BlockEncoding, handle, rho, cfg, rng, f, pf, phase_target):
    trace = SearchTrace()
    state0 = be.attach_ancilla(rho)
    region, state = rough_search(handle, state0, cfg, rng, pf, trace, level=1)
    phase_est, state, final_handle = refine(
        handle, state, region, cfg, rng, pf, trace, target_accuracy=phase_target
    )
    trace.estimate = phase_est

    def retry_round(st, gen):
        spec = RoundSpec(
            shift=float(gen.uniform(-np.pi, np.pi)), power=1, factors=pf, backend=cfg.backend
        )
        return run_round(final_handle, spec, st, gen).post_state

    ok, system_state, attempts = postselect_ancilla(state, be.m, rng, retry_round=retry_round)
    trace.postselect_attempts = attempts
    return phase_est, system_state, trace


def prepare_ground_state(
    H: PauliSum,
    rho: QuantumState,
    cfg: SearchConfig,
    decomposition: SpectralDecomposition | None = None,
) -> PrepareResult:
    """Project the ground state out of rho and estimate its energy.

    Runs rough search plus refinement on fresh copies of rho, R times, and
    keeps the run with the lowest energy estimate. In block-encoding mode
    the phase estimate tau converts through E = alpha cos(tau) and the
    encoding ancillas are post-selected on all zeros.
    """
    if cfg.mode == "he":
        Hs, guard = spectrum_guard(H)
        dec = diagonalize(Hs) if decomposition is None else decomposition
        return prepare_from_decomposition(dec, rho, cfg, guard_scale=guard.scale)

    rng = as_rng(cfg.seed)
    f, pf = sign_factors(cfg.kappa, cfg.eps, cfg.factor_tol)
    repeats = cfg.effective_repeats()
    be = build_block_encoding(H)
    handle = be.handle()
    phase_target = min(cfg.target_accuracy, cfg.gap / 2.0) / be.alpha
    runs = []
    for _ in range(repeats):
        phase_est, state, trace = _search_once_be(be, handle, rho, cfg, rng, f, pf, phase_target)
        energy = float(be.alpha * np.cos(phase_est))
        trace.energy = energy
        runs.append((energy, state, trace))
    energies = [e for e, _, _ in runs]
    best = int(np.argmin(energies))
    energy, state, trace = runs[best]
    return PrepareResult(
        energy=energy,
        state=state,
        trace=trace,
        repeats_used=repeats,
        all_energies=energies,
        guard_scale=1.0,
        alpha=be.alpha,
        certified=_certify(energies, cfg.target_accuracy),
    )


def prepare_from_decomposition(
    dec: SpectralDecomposition,
    rho: QuantumState,
    cfg: SearchConfig,
    guard_scale: float = 1.0,
) -> PrepareResult:
    """Hamiltonian-evolution search on an explicit eigensystem whose
    eigenvalues are already phases inside (-pi, pi). Used directly for
    operators only available as dense restrictions."""
    rng = as_rng(cfg.seed)
    f, pf = sign_factors(cfg.kappa, cfg.eps, cfg.factor_tol)
    repeats = cfg.effective_repeats()
    handle = evolution_from_decomposition(dec)
    phase_target = cfg.target_accuracy * guard_scale
    runs = []
    for _ in range(repeats):
        phase_est, state, trace = _search_once_he(handle, rho, cfg, rng, f, pf, phase_target)
        energy = phase_est / guard_scale
        trace.energy = energy
        runs.append((energy, state, trace))
    energies = [e for e, _, _ in runs]
    best = int(np.argmin(energies))
    energy, state, trace = runs[best]
    return PrepareResult(
        energy=energy,
        state=state,
        trace=trace,
        repeats_used=repeats,
        all_energies=energies,
        guard_scale=guard_scale,
        certified=_certify(energies, cfg.target_accuracy),
    )


# ---------------------------------------------------------------------------
# Outcome-tree probability analysis


@dataclass
class TreeNode:
    outcomes: tuple[int, ...]
    region: tuple[float, float]
    probability: float  # unconditional probability of reaching this node
    ground_weight: float = 0.0  # unconditional weight still in the ground space
    children: list["TreeNode"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class TrajectoryTree:
    root: TreeNode
    depth: int
    ground_phase: float

    def leaves(self) -> list[TreeNode]:
        out = []

        def walk(node):
            if node.is_leaf:
                out.append(node)
            for ch in node.children:
                walk(ch)

        walk(self.root)
        return out

    def leaf_probability_sum(self) -> float:
        return float(sum(leaf.probability for leaf in self.leaves()))

    def ground_leaf_probability(self, ground_phase: float | None = None) -> float:
        """Probability mass of leaves whose region still contains the ground
        phase. Equals tr(rho Pi) up to the filtering error per level when
        the depth suffices to isolate the ground phase."""
        gp = self.ground_phase if ground_phase is None else ground_phase
        return float(
            sum(
                leaf.probability
                for leaf in self.leaves()
                if leaf.region[0] <= gp <= leaf.region[1]
            )
        )

    def ground_state_probability(self) -> float:
        """Total ground-space weight across all leaves. The branch maps
        split a node's ground weight between its children exactly, so this
        telescopes to tr(rho Pi) for any polynomial and any depth."""
        return float(sum(leaf.ground_weight for leaf in self.leaves()))


def trajectory_tree(
    H: PauliSum,
    rho: QuantumState,
    f: TrigPolynomial,
    depth: int,
    kappa: float = 0.25,
    decomposition: SpectralDecomposition | None = None,
) -> tuple[TrajectoryTree, float]:
    """Enumerate every outcome sequence of `depth` rounds of binary search,
    composing the ideal measurement maps. Returns the tree plus tr(rho Pi).

    Without a caller-supplied decomposition the spectrum guard rescales H
    first, so regions and phases are in guarded phase units; a supplied
    decomposition is trusted to have its spectrum inside (-pi, pi).
    """
    if depth > 12:
        raise ValueError("depth capped at 12 (2^depth leaves)")
    if decomposition is None:
        Hs, _ = spectrum_guard(H)
        dec = diagonalize(Hs)
    else:
        dec = decomposition
    phases = dec.eigenvalues
    n_ground = dec.ground_degeneracy
    V = dec.eigenvectors
    R0 = V.conj().T @ rho.density_matrix() @ V  # work in the eigenbasis
    ground_weight = float(np.trace(R0[:n_ground, :n_ground]).real)

    def expand(node: TreeNode, R: np.ndarray, level: int):
        if level > depth:
            return
        region = Region(*node.region)
        fv = np.clip(f.eval(phases - region.midpoint), -1.0, 1.0)
        w = [np.sqrt((1.0 + fv) / 2.0), np.sqrt((1.0 - fv) / 2.0)]
        for outcome in (0, 1):
            Rk = (w[outcome][:, None] * R) * w[outcome][None, :]
            new_region = update_region(region, outcome, kappa)
            child = TreeNode(
                outcomes=node.outcomes + (outcome,),
                region=(new_region.lo, new_region.hi),
                probability=float(np.trace(Rk).real),
                ground_weight=float(np.trace(Rk[:n_ground, :n_ground]).real),
            )
            node.children.append(child)
            if child.probability > 1e-300:
                expand(child, Rk, level + 1)
        kids = node.children
        if abs(kids[0].probability + kids[1].probability - node.probability) > 1e-10:
            raise AssertionError("children probabilities do not sum to the parent's")

    root = TreeNode(
        outcomes=(), region=(-np.pi, np.pi), probability=1.0, ground_weight=ground_weight
    )
    expand(root, R0, 1)
    tree = TrajectoryTree(root=root, depth=depth, ground_phase=float(phases[0]))
    return tree, ground_weight
