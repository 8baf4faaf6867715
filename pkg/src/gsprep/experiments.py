"""Reproducible experiment runners behind the CLI.

Every runner is a pure function of its (validated) configuration: instance
seeds derive from the config seed and the instance index, results are
written in instance order regardless of worker scheduling, and floats are
serialized with repr so re-runs are byte-identical.
"""
from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .ansatz import AnsatzSpec, apply_ansatz, build_program
from .hamiltonians import (
    HubbardSpec,
    charge_spin_density,
    heisenberg_random,
    hubbard_1d,
    occupation_project,
    qubo_random_maxcut,
    spectrum_guard,
)
from .operator_io import load_operator_file
from .paulis import PauliSum
from .search import SearchConfig, prepare_from_decomposition, prepare_ground_state
from .signpoly import SignApproxParams, approx_sign, find_phase_factors, reconstruct
from .spectral import SpectralDecomposition, diagonalize
from .states import QuantumState
from .vqe import (
    OptimizerConfig,
    adam_minimize,
    fit_log2_slope,
    gradient_variance_experiment,
    program_value_and_grad,
    qubo_warmstart,
    vqe_minimize,
)


def instance_seed(base_seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([base_seed, index])


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _map_indexed(fn, args_list, jobs: int):
    """Run fn over the argument list, returning results in input order."""
    if jobs <= 1 or len(args_list) <= 1:
        return [fn(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, args_list))


# ---------------------------------------------------------------------------
# heisenberg sweep


@dataclass
class HeisenbergSweepConfig:
    seed: int = 7
    instances: int = 50
    qubits: int = 8
    boundary: str = "periodic"
    depths: tuple[int, ...] = (3,)
    ansatz: str = "ALT"
    iterations: int = 200
    learning_rate: float = 0.1
    qps: bool = False
    kappa: float = 0.25
    eps: float = 1e-4
    gap_fraction: float = 3.0  # target accuracy = gap / gap_fraction


def _sweep_one(args):
    cfg, depth, index = args
    seed = instance_seed(cfg.seed, index)
    child = seed.spawn(3)
    model_seed = np.random.default_rng(child[0])
    spec, H = heisenberg_random(cfg.qubits, seed=model_seed, boundary=cfg.boundary)
    dec = diagonalize(H)
    ans = AnsatzSpec(cfg.ansatz, n=cfg.qubits, depth=depth)
    opt = OptimizerConfig(
        learning_rate=cfg.learning_rate,
        iterations=cfg.iterations,
        seed=np.random.default_rng(child[1]),
    )
    res = vqe_minimize(H, ans, opt, oracle=dec)
    row = {
        "index": index,
        "depth": depth,
        "lambda0": float(dec.eigenvalues[0]),
        "gap": float(dec.gap),
        "vqe_energy": res.energy,
        "overlap": res.overlap,
        "ground_weight": res.ground_weight,
    }
    if cfg.qps:
        scfg = SearchConfig(
            gap=float(dec.gap),
            kappa=cfg.kappa,
            eps=cfg.eps,
            target_accuracy=float(dec.gap) / cfg.gap_fraction,
            overlap_floor_sq=max(res.ground_weight, 0.05),
            seed=int(np.random.default_rng(child[2]).integers(2**32)),
        )
        prep = prepare_ground_state(H, res.state, scfg)
        row["qps_energy"] = prep.energy
        row["qps_fidelity"] = dec.ground_weight(prep.state)
        row["qps_energy_error"] = abs(prep.energy - float(dec.eigenvalues[0]))
        row["qps_repeats"] = prep.repeats_used
        row["qps_rounds"] = prep.trace.num_rounds
    return row


OVERLAP_INTERVALS = [(0.0, 0.4), (0.4, 1.0), (0.6, 1.0), (0.8, 1.0)]


def run_heisenberg_sweep(cfg: HeisenbergSweepConfig, out: Path, jobs: int = 1) -> None:
    out.mkdir(parents=True, exist_ok=True)
    tasks = [(cfg, depth, i) for depth in cfg.depths for i in range(cfg.instances)]
    rows = _map_indexed(_sweep_one, tasks, jobs)

    header = ["index", "depth", "lambda0", "gap", "vqe_energy", "overlap", "ground_weight"]
    if cfg.qps:
        header += ["qps_energy", "qps_fidelity", "qps_energy_error", "qps_repeats", "qps_rounds"]
    write_csv(out / "summary.csv", header, [[r[h] for h in header] for r in rows])

    bins = np.linspace(0.0, 1.0, 11)
    hist_rows = []
    for depth in cfg.depths:
        ovs = [r["overlap"] for r in rows if r["depth"] == depth]
        counts, _ = np.histogram(ovs, bins=bins)
        for lo, hi, c in zip(bins[:-1], bins[1:], counts):
            hist_rows.append([depth, float(lo), float(hi), int(c)])
    write_csv(out / "histogram.csv", ["depth", "overlap_lo", "overlap_hi", "count"], hist_rows)

    interval_rows = []
    for depth in cfg.depths:
        ovs = np.array([r["overlap"] for r in rows if r["depth"] == depth])
        fracs = [float(np.mean((ovs >= lo) & (ovs <= hi))) for lo, hi in OVERLAP_INTERVALS]
        interval_rows.append([depth, *fracs])
    write_csv(
        out / "intervals.csv",
        ["depth", "frac_0.0_0.4", "frac_0.4_1.0", "frac_0.6_1.0", "frac_0.8_1.0"],
        interval_rows,
    )
    per_instance = [{"config": asdict(cfg), **r} for r in rows]
    write_json(out / "instances.json", per_instance)


# ---------------------------------------------------------------------------
# single preparation run


@dataclass
class QpsPrepareConfig:
    seed: int = 0
    qubits: int = 8
    model: str = "heisenberg"  # heisenberg | file
    operator_path: str = ""
    boundary: str = "periodic"
    ansatz: str = "ALT"
    depth: int = 3
    iterations: int = 200
    learning_rate: float = 0.1
    mode: str = "he"
    kappa: float = 0.25
    eps: float = 1e-4
    gap: float = 0.0  # 0 means: use the oracle gap
    gap_fraction: float = 3.0


def run_qps_prepare(cfg: QpsPrepareConfig, out: Path, jobs: int = 1) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    seed = instance_seed(cfg.seed, 0)
    child = seed.spawn(3)
    if cfg.model == "heisenberg":
        _, H = heisenberg_random(cfg.qubits, np.random.default_rng(child[0]), cfg.boundary)
    else:
        H = load_operator_file(cfg.operator_path)
        if not isinstance(H, PauliSum):
            raise ValueError("operator file must hold a qubit operator")
    dec = diagonalize(H)
    gap = cfg.gap if cfg.gap > 0 else float(dec.gap)
    ans = AnsatzSpec(cfg.ansatz, n=H.n, depth=cfg.depth)
    opt = OptimizerConfig(
        learning_rate=cfg.learning_rate,
        iterations=cfg.iterations,
        seed=np.random.default_rng(child[1]),
    )
    vqe = vqe_minimize(H, ans, opt, oracle=dec)
    scfg = SearchConfig(
        gap=gap,
        kappa=cfg.kappa,
        eps=cfg.eps,
        target_accuracy=gap / cfg.gap_fraction,
        overlap_floor_sq=max(vqe.ground_weight, 0.05),
        mode=cfg.mode,
        seed=int(np.random.default_rng(child[2]).integers(2**32)),
    )
    prep = prepare_ground_state(H, vqe.state, scfg)
    result = {
        "lambda0": float(dec.eigenvalues[0]),
        "gap": gap,
        "vqe_energy": vqe.energy,
        "vqe_overlap": vqe.overlap,
        "energy": prep.energy,
        "energy_error": abs(prep.energy - float(dec.eigenvalues[0])),
        "fidelity": dec.ground_weight(prep.state),
        "repeats": prep.repeats_used,
        "rounds": prep.trace.num_rounds,
        "postselect_attempts": prep.trace.postselect_attempts,
    }
    write_csv(out / "result.csv", list(result), [[result[k] for k in result]])
    write_json(out / "trace.json", {"config": asdict(cfg), "result": result,
                                    "trace": prep.trace.to_dict()})
    return result


# ---------------------------------------------------------------------------
# hubbard chain


@dataclass
class HubbardConfig:
    seed: int = 0
    sites: int = 5
    tunnelling: float = 2.0
    onsite: float = 3.0
    lambda_up: float = 3.0
    lambda_down: float = 0.1
    center: float = 3.0
    sigma: float = 1.0
    ansatz: str = "HEA"
    depth: int = 3
    iterations: int = 200
    learning_rate: float = 0.1
    kappa: float = 0.25
    eps: float = 1e-4
    accuracy: float = 1e-5  # energy accuracy target of the phase search
    restarts: int = 3

    def spec(self) -> HubbardSpec:
        return HubbardSpec(
            sites=self.sites,
            tunnelling=self.tunnelling,
            onsite=self.onsite,
            lambda_up=self.lambda_up,
            lambda_down=self.lambda_down,
            center_up=self.center,
            center_down=self.center,
            sigma_up=self.sigma,
            sigma_down=self.sigma,
        )


def _pad_to_power_of_two(block: np.ndarray, pad_value: float):
    d = block.shape[0]
    n_pad = 1 << int(np.ceil(np.log2(max(d, 2))))
    if n_pad == d:
        return block
    out = np.eye(n_pad, dtype=complex) * pad_value
    out[:d, :d] = block
    return out


def _sector_batch_energy(block: np.ndarray, idx: np.ndarray, penalty: float):
    """Energy of the sector-restricted operator plus a penalty that pushes
    weight into the sector; acts on (..., 2^n) amplitude batches."""

    def batch_energy(states):
        proj = states[..., idx]
        inside = np.real(np.einsum("...i,...i->...", proj.conj(), proj @ block.T))
        weight = np.sum(np.abs(proj) ** 2, axis=-1)
        return inside + penalty * (1.0 - weight)

    return batch_energy


def _sector_search(H, n_occ, cfg: HubbardConfig, rng_seq) -> float:
    """Warm-start VQE inside an occupation sector, then phase search on the
    sector block. Ansatz states are projected onto the sector (occupation
    is conserved, so this is the fermionic projection) before searching."""
    block, idx = occupation_project(H, n_occ)
    block = np.real_if_close(block)
    ans = AnsatzSpec(cfg.ansatz, n=H.n, depth=cfg.depth)
    penalty = float(np.max(np.abs(np.diag(block)))) + 2.0
    program = build_program(ans)
    batch_energy = _sector_batch_energy(block, idx, penalty)
    children = rng_seq.spawn(cfg.restarts + 1)

    best_vec = None
    best_e = np.inf
    for r in range(cfg.restarts):
        rng = np.random.default_rng(children[r])
        p0 = rng.uniform(0, 2 * np.pi, ans.param_count)

        def value_and_grad(p):
            val, grad, _ = program_value_and_grad(program, ans.n, p, batch_energy)
            return val, grad

        opt = OptimizerConfig(
            learning_rate=cfg.learning_rate, iterations=cfg.iterations, seed=rng
        )
        params, _ = adam_minimize(value_and_grad, p0, opt)
        final_vec = apply_ansatz(ans, params).amplitudes
        e = float(batch_energy(final_vec[None])[0])
        if e < best_e:
            best_e = e
            best_vec = final_vec[idx]

    weight = np.linalg.norm(best_vec)
    if weight < 1e-6:
        raise RuntimeError(f"sector {n_occ}: warm start left no weight in the sector")
    sector_vec = best_vec / weight

    # pad the restricted operator to a power-of-two dimension; padding
    # levels sit above everything and carry zero initial weight
    pad_value = float(np.linalg.eigvalsh(block)[-1]) + 1.0
    padded = _pad_to_power_of_two(block, pad_value)
    scale = (np.pi - 0.1) / max(float(np.max(np.abs(np.linalg.eigvalsh(padded)))), np.pi - 0.1)
    vals, vecs = np.linalg.eigh(padded * scale)
    dec = SpectralDecomposition(vals, vecs)
    gap = max(dec.gap / scale, 10 * cfg.accuracy)

    vec_full = np.zeros(padded.shape[0], dtype=complex)
    vec_full[: len(idx)] = sector_vec
    rho = QuantumState(vec_full, validate=False)
    gw = dec.ground_weight(rho)
    scfg = SearchConfig(
        gap=gap * scale,
        kappa=cfg.kappa,
        eps=cfg.eps,
        target_accuracy=cfg.accuracy * scale,
        overlap_floor_sq=float(max(gw, 0.05)),
        seed=int(np.random.default_rng(children[-1]).integers(2**32)),
    )
    res = prepare_from_decomposition(dec, rho, scfg, guard_scale=scale)
    return res.energy


def run_hubbard(cfg: HubbardConfig, out: Path, jobs: int = 1) -> None:
    out.mkdir(parents=True, exist_ok=True)
    spec = cfg.spec()
    H = hubbard_1d(spec)
    dec = diagonalize(H)
    seed_root = instance_seed(cfg.seed, 0)
    children = seed_root.spawn(4 + 2 * spec.sites + 2)

    # global ground state: exact, warm-start VQE, and phase search
    ans = AnsatzSpec(cfg.ansatz, n=H.n, depth=cfg.depth)
    best_vqe = None
    for r in range(cfg.restarts):
        opt = OptimizerConfig(
            learning_rate=cfg.learning_rate,
            iterations=cfg.iterations,
            seed=np.random.default_rng(children[r]),
        )
        cand = vqe_minimize(H, ans, opt, oracle=dec)
        if best_vqe is None or cand.energy < best_vqe.energy:
            best_vqe = cand
    scfg = SearchConfig(
        gap=float(dec.gap),
        kappa=cfg.kappa,
        eps=cfg.eps,
        target_accuracy=min(float(dec.gap) / 3.0, cfg.accuracy),
        overlap_floor_sq=max(best_vqe.ground_weight, 0.05),
        seed=int(np.random.default_rng(children[3]).integers(2**32)),
    )
    prep = prepare_ground_state(H, best_vqe.state, scfg)

    exact_ground = QuantumState(dec.eigenvectors[:, 0])
    rows = []
    for site in range(1, spec.sites + 1):
        ep, em = charge_spin_density(exact_ground, spec, site)
        vp, vm = charge_spin_density(best_vqe.state, spec, site)
        qp, qm = charge_spin_density(prep.state, spec, site)
        rows.append([site, ep, vp, qp, em, vm, qm])
    write_csv(
        out / "density.csv",
        [
            "site",
            "charge_exact", "charge_vqe", "charge_qps",
            "spin_exact", "spin_vqe", "spin_qps",
        ],
        rows,
    )

    # chemical potential per occupation number
    n_occ_max = spec.modes
    exact_E = {0: float(np.real(occupation_project(H, 0)[0][0, 0]))}
    qps_E = {0: exact_E[0]}
    for k in range(1, n_occ_max + 1):
        block, _ = occupation_project(H, k)
        exact_E[k] = float(np.linalg.eigvalsh(block)[0])
        qps_E[k] = _sector_search(H, k, cfg, children[4 + k])
    mu_rows = []
    for k in range(1, n_occ_max + 1):
        mu_exact = exact_E[k] - exact_E[k - 1]
        mu_qps = qps_E[k] - qps_E[k - 1]
        mu_rows.append([k, mu_exact, mu_qps, abs(mu_qps - mu_exact)])
    write_csv(
        out / "chemical_potential.csv",
        ["n_occ", "mu_exact", "mu_qps", "abs_error"],
        mu_rows,
    )
    write_json(
        out / "summary.json",
        {
            "config": asdict(cfg),
            "lambda0": float(dec.eigenvalues[0]),
            "gap": float(dec.gap),
            "vqe_energy": best_vqe.energy,
            "vqe_overlap": best_vqe.overlap,
            "qps_energy": prep.energy,
            "qps_fidelity": dec.ground_weight(prep.state),
            "sector_energies_exact": {str(k): exact_E[k] for k in exact_E},
            "sector_energies_qps": {str(k): qps_E[k] for k in qps_E},
        },
    )


# ---------------------------------------------------------------------------
# qubo warm start


@dataclass
class QuboConfig:
    seed: int = 0
    instances: int = 20
    qubits: int = 15
    edge_prob: float = 0.5
    restarts: int = 10
    iterations: int = 200
    learning_rate: float = 0.1


def _qubo_one(args):
    cfg, index = args
    seeds = instance_seed(cfg.seed, index).spawn(2)
    spec = qubo_random_maxcut(cfg.qubits, np.random.default_rng(seeds[0]), cfg.edge_prob)
    opt = OptimizerConfig(
        learning_rate=cfg.learning_rate,
        iterations=cfg.iterations,
        seed=np.random.default_rng(seeds[1]),
    )
    res = qubo_warmstart(spec, opt, restarts=cfg.restarts)
    return [index, cfg.qubits, len(spec.edges) // 2, res.overlap, res.cost]


def run_qubo(cfg: QuboConfig, out: Path, jobs: int = 1) -> None:
    out.mkdir(parents=True, exist_ok=True)
    rows = _map_indexed(_qubo_one, [(cfg, i) for i in range(cfg.instances)], jobs)
    write_csv(out / "qubo_overlaps.csv", ["index", "n", "edges", "overlap", "cost"], rows)
    write_json(out / "config.json", asdict(cfg))


# ---------------------------------------------------------------------------
# gradient variance


@dataclass
class BpVarianceConfig:
    seed: int = 0
    sizes: tuple[int, ...] = (4, 6, 8, 10, 12, 14)
    depth: int = 3
    samples: int = 200
    ansatz: str = "HEA"


def run_bp_variance(cfg: BpVarianceConfig, out: Path, jobs: int = 1) -> dict[int, float]:
    out.mkdir(parents=True, exist_ok=True)
    table = gradient_variance_experiment(
        cfg.sizes, depth=cfg.depth, samples=cfg.samples, seed=cfg.seed, kind=cfg.ansatz
    )
    sizes = sorted(table)
    v0 = table[sizes[0]]
    rows = []
    for n in sizes:
        exp_ref = v0 * 2.0 ** (-(n - sizes[0]))
        log_ref = v0 * np.log2(sizes[0] + 2) / np.log2(n + 2)
        rows.append([n, table[n], float(np.log2(table[n])), exp_ref, log_ref])
    write_csv(
        out / "variance.csv",
        ["n", "variance", "log2_variance", "exponential_reference", "log_reference"],
        rows,
    )
    write_json(
        out / "variance.json",
        {"config": asdict(cfg), "variances": {str(n): table[n] for n in sizes},
         "log2_slope": fit_log2_slope(table)},
    )
    return table


# ---------------------------------------------------------------------------
# sign polynomial diagnostics


@dataclass
class SignPolyConfig:
    kappa: float = 0.25
    eps: float = 1e-4
    points: int = 2001
    tol: float = 1e-8


def run_signpoly(cfg: SignPolyConfig, out: Path, jobs: int = 1) -> None:
    out.mkdir(parents=True, exist_ok=True)
    f = approx_sign(SignApproxParams(cfg.kappa, cfg.eps))
    pf = find_phase_factors(f, tol=cfg.tol)
    xs = np.linspace(-np.pi, np.pi, cfg.points)
    fv = f.eval(xs)
    rec = reconstruct(pf, xs)
    sign = np.sign(xs)
    good = ((xs > cfg.kappa) & (xs < np.pi - cfg.kappa)) | (
        (xs < -cfg.kappa) & (xs > -np.pi + cfg.kappa)
    )
    rows = [
        [float(x), float(fx), float(rx), float(sx), float(abs(fx - sx)), int(g)]
        for x, fx, rx, sx, g in zip(xs, fv, rec, sign, good)
    ]
    write_csv(
        out / "signpoly.csv",
        ["x", "f", "reconstruction", "sign", "abs_dev_f_vs_sign", "good_region"],
        rows,
    )
    write_json(
        out / "signpoly.json",
        {
            "config": asdict(cfg),
            "order": f.L,
            "one_norm": f.one_norm,
            "max_dev_good_region": float(np.max(np.abs(fv[good] - sign[good]))),
            "max_recon_error": float(np.max(np.abs(rec - fv))),
        },
    )
