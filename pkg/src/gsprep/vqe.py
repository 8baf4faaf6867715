"""Variational warm-start optimizers: plain VQE, Gibbs-VQE, the analytic
QUBO product-state layer, and the gradient-variance harness."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ansatz import AnsatzSpec, apply_ansatz, build_program, run_program, shift_rule_energies
from .hamiltonians import QuboSpec, qubo_diagonal, qubo_ground_set
from .paulis import PauliSum
from .spectral import SpectralDecomposition
from .states import QuantumState, as_rng


@dataclass
class OptimizerConfig:
    learning_rate: float = 0.1
    iterations: int = 200
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.iterations < 1:
            raise ValueError("need at least one iteration")


def adam_minimize(value_and_grad, x0: np.ndarray, opt: OptimizerConfig):
    """Standard Adam descent; returns (x, per-iteration value curve)."""
    x = np.asarray(x0, dtype=float).copy()
    m = np.zeros_like(x)
    v = np.zeros_like(x)
    curve = []
    for t in range(1, opt.iterations + 1):
        val, g = value_and_grad(x)
        curve.append(val)
        m = opt.beta1 * m + (1 - opt.beta1) * g
        v = opt.beta2 * v + (1 - opt.beta2) * g * g
        mhat = m / (1 - opt.beta1**t)
        vhat = v / (1 - opt.beta2**t)
        x = x - opt.learning_rate * mhat / (np.sqrt(vhat) + opt.epsilon)
    return x, curve


def parameter_shift_gradient(energy, params: np.ndarray) -> np.ndarray:
    """Exact gradient for circuits whose gates are e^{-i t P/2}:
    dE/dt = [E(t + pi/2) - E(t - pi/2)] / 2."""
    g = np.zeros_like(params)
    for i in range(params.size):
        shifted = params.copy()
        shifted[i] += np.pi / 2
        ep = energy(shifted)
        shifted[i] -= np.pi
        em = energy(shifted)
        g[i] = 0.5 * (ep - em)
    return g


def batch_energy_fn(H: PauliSum):
    """(..., 2^n) amplitude batches -> (...,) energies, picking the cheapest
    exact route: a precomputed diagonal for Z/I operators, a cached dense
    matrix at moderate width, per-term application beyond that."""
    letters = {ch for ps in H.terms for ch in ps.letters}
    if letters <= {"I", "Z"}:
        n = H.n
        z = 1 - 2 * ((np.arange(1 << n)[:, None] >> (n - 1 - np.arange(n))) & 1)
        diag = np.zeros(1 << n)
        for ps, c in H.terms.items():
            cols = [q for q, ch in enumerate(ps.letters) if ch == "Z"]
            diag += c * (np.prod(z[:, cols], axis=1) if cols else np.ones(1 << n))

        def diag_energy(states):
            return np.sum(diag * np.abs(states) ** 2, axis=-1)

        return diag_energy
    if H.n <= 12:
        Hd = H.to_dense()

        def dense_energy(states):
            return np.real(np.einsum("...i,...i->...", states.conj(), states @ Hd.T))

        return dense_energy

    def sparse_energy(states):
        flat = states.reshape(-1, states.shape[-1])
        vals = np.array([H.expectation_vec(row) for row in flat])
        return vals.reshape(states.shape[:-1])

    return sparse_energy


def program_value_and_grad(program, n, params, batch_energy):
    """Energy and parameter-shift gradient, sharing circuit prefixes."""
    vec = run_program(program, n, params)
    val = float(batch_energy(vec[None])[0])
    pm = shift_rule_energies(program, n, params, batch_energy)
    grad = 0.5 * (pm[:, 0] - pm[:, 1])
    return val, grad, vec


@dataclass
class VqeResult:
    params: np.ndarray
    energy: float
    curve: list[float]
    state: QuantumState
    overlap: float | None = None  # sqrt(tr(Pi rho)) against the oracle
    ground_weight: float | None = None  # tr(Pi rho)


def vqe_minimize(
    H: PauliSum,
    spec: AnsatzSpec,
    opt: OptimizerConfig,
    oracle: SpectralDecomposition | None = None,
    init_params: np.ndarray | None = None,
) -> VqeResult:
    """Adam descent on <psi(theta)|H|psi(theta)> with parameter-shift
    gradients; parameters initialize uniformly in [0, 2pi)."""
    rng = as_rng(opt.seed)
    if init_params is None:
        init_params = rng.uniform(0.0, 2.0 * np.pi, size=spec.param_count)
    program = build_program(spec)
    batch_energy = batch_energy_fn(H)

    def value_and_grad(p):
        val, grad, _ = program_value_and_grad(program, spec.n, p, batch_energy)
        return val, grad

    params, curve = adam_minimize(value_and_grad, init_params, opt)
    state = apply_ansatz(spec, params)
    final = float(batch_energy(state.amplitudes[None])[0])
    curve.append(final)
    res = VqeResult(params=params, energy=final, curve=curve, state=state)
    if oracle is not None:
        res.ground_weight = oracle.ground_weight(state)
        res.overlap = float(np.sqrt(max(res.ground_weight, 0.0)))
    return res


# ---------------------------------------------------------------------------
# Gibbs-VQE


@dataclass
class GibbsConfig:
    beta: float = 2.0
    ancillas: int | None = None  # purification width; defaults to n

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")


def gibbs_loss_terms(H: PauliSum, rho_B: np.ndarray, beta: float) -> tuple[float, float, float]:
    """(L1, L2, L3) = (tr(H rho_B), 2 tr(rho_B^2)/beta, -(tr(rho_B^2)+3)/(2 beta)).

    L2 + L3 simplifies to 3 (tr(rho_B^2) - 1) / (2 beta); the published,
    unsimplified split is kept.
    """
    e = float(np.real(np.trace(H.to_dense() @ rho_B)))
    pur = float(np.real(np.sum(rho_B * rho_B.conj())))
    return e, 2.0 * pur / beta, -(pur + 3.0) / (2.0 * beta)


def gibbs_loss(H: PauliSum, rho_B: np.ndarray, beta: float) -> float:
    l1, l2, l3 = gibbs_loss_terms(H, rho_B, beta)
    return l1 + l2 + l3


@dataclass
class GibbsResult:
    params: np.ndarray
    loss_curve: list[float]
    rho_B: np.ndarray
    state: QuantumState  # purification on 2n qubits
    overlap: float | None = None
    ground_weight: float | None = None


def _reduced(vec: np.ndarray, n_sys: int, n_anc: int) -> np.ndarray:
    M = vec.reshape(1 << n_sys, 1 << n_anc)
    return M @ M.conj().T


def gibbs_vqe(
    H: PauliSum,
    cfg: GibbsConfig,
    spec: AnsatzSpec,
    opt: OptimizerConfig,
    oracle: SpectralDecomposition | None = None,
) -> GibbsResult:
    """Minimize the truncated free-energy loss over purifications.

    The ansatz acts on system plus ancilla qubits; rho_B is the reduction to
    the system half. Energy gradients use the parameter-shift rule on
    tr(H rho_B); purity gradients use the same rule on the two-copy form
    tr(rho_B(a) rho_B(theta)) with one copy frozen.
    """
    n = H.n
    n_anc = cfg.ancillas if cfg.ancillas is not None else n
    if spec.n != n + n_anc:
        raise ValueError(f"purification ansatz must act on {n + n_anc} qubits")
    rng = as_rng(opt.seed)
    params0 = rng.uniform(0.0, 2.0 * np.pi, size=spec.param_count)
    beta = cfg.beta
    program = build_program(spec)
    Hd = H.to_dense()

    def batch_energy(states):
        M = states.reshape(states.shape[:-1] + (1 << n, 1 << n_anc))
        return np.real(np.einsum("ij,...ja,...ia->...", Hd, M, M.conj()))

    def batch_purity_vs(states, frozen):
        M = states.reshape(states.shape[:-1] + (1 << n, 1 << n_anc))
        return np.real(np.einsum("...ia,...ja,ji->...", M, M.conj(), frozen))

    def value_and_grad(p):
        vec = run_program(program, spec.n, p)
        rho = _reduced(vec, n, n_anc)
        pur = float(np.real(np.sum(rho * rho.conj())))
        e = float(batch_energy(vec[None])[0])
        val = e + 2.0 * pur / beta - (pur + 3.0) / (2.0 * beta)
        pm_e = shift_rule_energies(program, spec.n, p, batch_energy)
        pm_p = shift_rule_energies(
            program, spec.n, p, lambda s: batch_purity_vs(s, rho)
        )
        g_e = 0.5 * (pm_e[:, 0] - pm_e[:, 1])
        g_pur = pm_p[:, 0] - pm_p[:, 1]  # twice the one-copy shift derivative
        g = g_e + 2.0 * g_pur / beta - g_pur / (2.0 * beta)
        return val, g

    params, curve = adam_minimize(value_and_grad, params0, opt)
    state = apply_ansatz(spec, params)
    rho_B = _reduced(state.amplitudes, n, n_anc)
    res = GibbsResult(params=params, loss_curve=curve, rho_B=rho_B, state=state)
    if oracle is not None:
        res.ground_weight = oracle.ground_weight(rho_B)
        res.overlap = float(np.sqrt(max(res.ground_weight, 0.0)))
    return res


def _embed_left(H: PauliSum, extra: int) -> PauliSum:
    """H acting on the first block of a wider register (identity on the rest)."""
    from .paulis import PauliString

    out = PauliSum(H.n + extra)
    pad = "I" * extra
    for ps, c in H.terms.items():
        out.add_term(PauliString(ps.letters + pad), c)
    return out


# ---------------------------------------------------------------------------
# Analytic QUBO layer


def qubo_cost_and_gradient(theta: np.ndarray, spec: QuboSpec) -> tuple[float, np.ndarray]:
    """Product-Ry cost C = (1/2) sum over ordered edges of w cos cos - n/2,
    with gradient dC/dtheta_a = -sin(theta_a) * sum_p w_ap cos(theta_p)."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.n,):
        raise ValueError(f"need {spec.n} angles")
    c = np.cos(theta)
    s = np.sin(theta)
    W = np.zeros((spec.n, spec.n))
    for (p, q), w in spec.edges.items():
        W[p, q] = w
    Wc = W @ c
    cost = 0.5 * float(c @ Wc) - spec.n / 2.0
    grad = -s * Wc
    return cost, grad


@dataclass
class QuboWarmstartResult:
    theta: np.ndarray
    state: QuantumState
    overlap: float  # total ground-set weight sum_z |<z|psi>|^2
    cost: float
    restart_overlaps: list[float] = field(default_factory=list)


def product_ry_state(theta: np.ndarray) -> QuantumState:
    spec = AnsatzSpec("PRODUCT_RY", n=theta.size)
    return apply_ansatz(spec, theta)


def ground_set_weight(theta: np.ndarray, ground_indices: np.ndarray, n: int) -> float:
    """sum over ground bitstrings z of |<z|prod Ry(theta)|0>|^2, in closed form."""
    half = np.asarray(theta, dtype=float) / 2.0
    amp_c, amp_s = np.cos(half), np.sin(half)
    total = 0.0
    for idx in np.asarray(ground_indices):
        bits = (int(idx) >> (n - 1 - np.arange(n))) & 1
        amp = np.prod(np.where(bits == 0, amp_c, amp_s))
        total += float(amp) ** 2
    return total


def qubo_warmstart(
    spec: QuboSpec, opt: OptimizerConfig, restarts: int = 10
) -> QuboWarmstartResult:
    """Gradient descent on the analytic cost; the reported overlap is the
    optimized state's total weight on the (possibly degenerate) ground set,
    maximized over random restarts."""
    if spec.n > 22:
        raise ValueError("ground-set enumeration capped at n = 22")
    rng = as_rng(opt.seed)
    ground_idx, _ = qubo_ground_set(spec)
    best = None
    overlaps = []
    for _ in range(max(1, restarts)):
        theta0 = rng.uniform(0.0, 2.0 * np.pi, size=spec.n)

        def value_and_grad(p):
            return qubo_cost_and_gradient(p, spec)

        theta, curve = adam_minimize(value_and_grad, theta0, opt)
        ov = ground_set_weight(theta, ground_idx, spec.n)
        overlaps.append(ov)
        if best is None or ov > best[0]:
            best = (ov, theta, curve[-1])
    ov, theta, cost = best
    return QuboWarmstartResult(
        theta=theta,
        state=product_ry_state(theta),
        overlap=float(ov),
        cost=float(cost),
        restart_overlaps=overlaps,
    )


# ---------------------------------------------------------------------------
# Gradient-variance harness (barren-plateau check)


def gradient_variance_experiment(
    n_values,
    depth: int = 3,
    samples: int = 200,
    seed: int = 0,
    kind: str = "HEA",
) -> dict[int, float]:
    """Sample variance of dC/d(first parameter) at uniform random parameters
    for C = <Z on qubits 0,1>, one entry per system size."""
    from .paulis import PauliString

    rng = as_rng(seed)
    out = {}
    for n in n_values:
        spec = AnsatzSpec(kind, n=n, depth=depth)
        letters = "ZZ" + "I" * (n - 2)
        H = PauliSum(n, {PauliString(letters): 1.0})
        program = build_program(spec)
        batch_energy = batch_energy_fn(H)

        def energy(p):
            return float(batch_energy(run_program(program, n, p)[None])[0])

        grads = np.empty(samples)
        for s in range(samples):
            params = rng.uniform(0.0, 2.0 * np.pi, size=spec.param_count)
            plus = params.copy()
            plus[0] += np.pi / 2
            minus = params.copy()
            minus[0] -= np.pi / 2
            grads[s] = 0.5 * (energy(plus) - energy(minus))
        out[n] = float(np.var(grads))
    return out


def fit_log2_slope(variances: dict[int, float]) -> float:
    ns = np.array(sorted(variances))
    ys = np.log2([variances[n] for n in ns])
    slope, _ = np.polyfit(ns, ys, 1)
    return float(slope)
