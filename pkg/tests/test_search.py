import numpy as np
import pytest

from gsprep.hamiltonians import heisenberg_random, spectrum_guard
from gsprep.paulis import PauliString, PauliSum
from gsprep.search import (
    Region,
    SearchConfig,
    SearchTrace,
    prepare_ground_state,
    refine,
    rough_search,
    trajectory_tree,
    update_region,
)
from gsprep.signpoly import TrigPolynomial, sign_factors
from gsprep.spectral import diagonalize, evolution_from_decomposition
from gsprep.states import QuantumState, random_mixed_state, random_pure_state


def random_pauli_sum(n, terms, seed):
    rng = np.random.default_rng(seed)
    H = PauliSum(n)
    while H.num_terms < terms:
        letters = "".join(rng.choice(list("IXYZ"), size=n))
        if set(letters) == {"I"}:
            continue
        H.add_term(PauliString(letters), float(rng.normal()))
    return H


F, PF = sign_factors(0.25, 1e-4)


# ------------------------------------------------------------ region rules


def test_wide_rule_first_iteration():
    r = update_region(Region(-np.pi, np.pi), 0, kappa=0.25)
    assert r.lo == pytest.approx(-0.25)
    assert r.hi == pytest.approx(np.pi)  # clamped at pi
    r1 = update_region(Region(-np.pi, np.pi), 1, kappa=0.25)
    assert r1.hi == pytest.approx(0.25)
    assert r1.lo == pytest.approx(-np.pi)


def test_narrow_rule():
    r = update_region(Region(-1.0, 1.0), 0, kappa=0.25)
    assert (r.lo, r.hi) == (pytest.approx(-0.25), pytest.approx(1.0))
    r = update_region(Region(-1.0, 1.0), 1, kappa=0.25)
    assert (r.lo, r.hi) == (pytest.approx(-1.0), pytest.approx(0.25))


def test_width_recurrence_bound():
    # after Q narrow updates starting from the wide first cut, width is at
    # most 2 kappa + pi 2^{1-Q}
    kappa = 0.25
    for Q in range(1, 11):
        region = Region(-np.pi, np.pi)
        rng = np.random.default_rng(Q)
        for _ in range(Q):
            region = update_region(region, int(rng.integers(0, 2)), kappa)
        assert region.width <= 2 * kappa + np.pi * 2.0 ** (1 - Q) + 1e-12


# ------------------------------------------------------------ rough search


def eigenstate_handle(H):
    Hs, guard = spectrum_guard(H)
    dec = diagonalize(Hs)
    return evolution_from_decomposition(dec), dec, guard


def test_rough_search_traps_known_eigenphase():
    # scalar-like case: single qubit with known phases +-0.9 pi after scaling
    H = PauliSum(1, {PauliString("Z"): 0.9 * np.pi})
    handle, dec, guard = eigenstate_handle(H)
    cfg = SearchConfig(gap=0.1, seed=0)
    psi = QuantumState.from_bits("1")  # eigenvalue -0.9 pi
    lam = float(dec.eigenvalues[0])
    hits = 0
    for seed in range(40):
        region, post = rough_search(handle, psi.copy(), cfg, np.random.default_rng(seed), PF)
        hits += region.contains(lam * guard.scale if guard.scale != 1 else lam)
        assert region.width <= 2 * cfg.kappa + np.pi * 2.0 ** (1 - cfg.Q) + 1e-12
    assert hits >= 39  # failure probability <= Q * eps


def test_rough_search_on_superposition_tracks_some_eigenphase():
    H = random_pauli_sum(3, 6, seed=5)
    handle, dec, guard = eigenstate_handle(H)
    cfg = SearchConfig(gap=float(max(dec.gap, 1e-3)), seed=0)
    psi = random_pure_state(3, np.random.default_rng(2))
    region, post = rough_search(handle, psi.copy(), cfg, np.random.default_rng(1), PF)
    # the post-state concentrates on eigenphases inside the region
    coeffs = np.abs(handle.to_eigenbasis(post.amplitudes)) ** 2
    inside = sum(
        w for w, ph in zip(coeffs, handle.phases) if region.lo - 0.02 <= ph <= region.hi + 0.02
    )
    assert inside > 1.0 - 5e-3


@pytest.mark.parametrize("j_target", [1, 2, 3, 4])
def test_refine_error_bound_on_eigenstates(j_target):
    H = random_pauli_sum(2, 4, seed=17)
    handle, dec, guard = eigenstate_handle(H)
    k = 1  # track an excited eigenstate: the bound holds for any eigenphase
    psi = QuantumState(handle.vectors[:, k])
    lam = float(handle.phases[k])
    cfg = SearchConfig(gap=1.0, seed=0)
    s = cfg.refine_base
    target = float(s ** (-j_target)) * (1 + 1e-12)
    rng = np.random.default_rng(3)
    region, state = rough_search(handle, psi.copy(), cfg, rng, PF)
    est, state, _ = refine(handle, state, region, cfg, rng, PF, target_accuracy=target)
    assert abs(est - lam) <= target + 1e-9


def test_refine_level_count_matches_log_formula():
    cfg = SearchConfig(gap=0.01, seed=0)
    s = cfg.refine_base
    target = cfg.target_accuracy
    j_expected = int(np.ceil(np.log(1.0 / target) / np.log(s)))
    H = random_pauli_sum(2, 4, seed=23)
    handle, dec, guard = eigenstate_handle(H)
    psi = QuantumState(handle.vectors[:, 0])
    trace = SearchTrace()
    rng = np.random.default_rng(0)
    region, state = rough_search(handle, psi.copy(), cfg, rng, PF, trace)
    refine(handle, state, region, cfg, rng, PF, trace)
    assert len(trace.level_estimates) == j_expected


def test_refinement_partial_sums_improve_monotonically():
    # on eigenstate inputs the level-j partial estimate is within s^-j
    H = random_pauli_sum(2, 4, seed=29)
    handle, dec, guard = eigenstate_handle(H)
    psi = QuantumState(handle.vectors[:, 0])
    lam = float(handle.phases[0])
    cfg = SearchConfig(gap=1.0, seed=0)
    s = cfg.refine_base
    trace = SearchTrace()
    rng = np.random.default_rng(5)
    region, state = rough_search(handle, psi.copy(), cfg, rng, PF, trace)
    refine(handle, state, region, cfg, rng, PF, trace, target_accuracy=float(s**-5))
    partial = 0.0
    for j, lev in enumerate(trace.level_estimates, start=1):
        partial += lev / s ** (j - 1)
        assert abs(partial - lam) <= s ** (-j) + 1e-9


def test_repetition_bound_failure_frequency():
    # R = ceil(ln(1/delta)/gamma^2) repeats miss the ground energy with
    # frequency at most delta + 0.05
    H = random_pauli_sum(2, 5, seed=37)
    dec = diagonalize(H)
    rho = random_mixed_state(2, np.random.default_rng(3))
    gamma_sq = dec.ground_weight(rho)
    delta = 0.25
    R = int(np.ceil(np.log(1.0 / delta) / gamma_sq))
    failures = 0
    trials = 200
    for seed in range(trials):
        cfg = SearchConfig(gap=float(max(dec.gap, 0.05)), seed=seed, repeats=R)
        res = prepare_ground_state(H, rho, cfg)
        failures += abs(res.energy - dec.eigenvalues[0]) > cfg.target_accuracy
    assert failures / trials <= delta + 0.05


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(gap=-1.0)
    with pytest.raises(ValueError):
        SearchConfig(gap=1.0, target_accuracy=0.9)  # above gap/2
    cfg = SearchConfig(gap=0.3)
    assert cfg.target_accuracy == pytest.approx(0.1)
    assert cfg.Q == 4 and cfg.refine_base == 2


# --------------------------------------------------- end-to-end preparation


def test_prepare_from_exact_ground_state():
    _, H = heisenberg_random(4, seed=11)
    dec = diagonalize(H)
    psi = QuantumState(dec.eigenvectors[:, 0])
    cfg = SearchConfig(gap=float(dec.gap), seed=4, repeats=1)
    res = prepare_ground_state(H, psi, cfg)
    assert abs(res.energy - dec.eigenvalues[0]) <= cfg.target_accuracy
    assert dec.ground_weight(res.state) > 1.0 - 1e-6


def test_prepare_success_frequency_matches_overlap():
    H = random_pauli_sum(3, 8, seed=31)
    dec = diagonalize(H)
    rho = random_mixed_state(3, np.random.default_rng(8))
    gw = dec.ground_weight(rho)
    cfg_proto = SearchConfig(gap=float(max(dec.gap, 0.05)), seed=0, repeats=1)
    hits = 0
    trials = 300
    for seed in range(trials):
        cfg = SearchConfig(
            gap=cfg_proto.gap, seed=seed, repeats=1, target_accuracy=cfg_proto.target_accuracy
        )
        res = prepare_ground_state(H, rho, cfg)
        hits += abs(res.energy - dec.eigenvalues[0]) <= cfg.target_accuracy
    freq = hits / trials
    assert abs(freq - gw) < 0.08


def test_prepare_be_mode_small():
    H = random_pauli_sum(2, 4, seed=41)
    dec = diagonalize(H)
    psi = QuantumState(dec.eigenvectors[:, 0])
    cfg = SearchConfig(gap=float(dec.gap), seed=2, repeats=2, mode="be")
    res = prepare_ground_state(H, psi, cfg)
    assert res.alpha is not None
    assert abs(res.energy - dec.eigenvalues[0]) <= cfg.target_accuracy + 1e-6
    assert dec.ground_weight(res.state) > 1.0 - 1e-4
    assert res.trace.postselect_attempts is not None


# ------------------------------------------------------------ outcome tree


class ExactSign:
    """Discontinuous sign stand-in; only .eval is consumed by the tree."""

    def eval(self, x):
        return np.sign(np.asarray(x, dtype=float))


def test_tree_single_path_for_exact_sign_on_eigenstate():
    H = PauliSum(1, {PauliString("Z"): 1.5})
    dec = diagonalize(H)
    psi = QuantumState(dec.eigenvectors[:, 0])
    tree, gw = trajectory_tree(H, psi, ExactSign(), depth=3)
    assert gw == pytest.approx(1.0)
    probs = sorted((leaf.probability for leaf in tree.leaves()), reverse=True)
    assert probs[0] == pytest.approx(1.0, abs=1e-12)
    assert tree.leaf_probability_sum() == pytest.approx(1.0, abs=1e-10)


def test_tree_ground_weight_telescopes_exactly():
    # sum of leaf ground weights equals tr(rho Pi) for any polynomial/depth
    for seed in range(5):
        H = random_pauli_sum(3, 6, seed=seed + 60)
        rho = random_mixed_state(3, np.random.default_rng(seed))
        tree, gw = trajectory_tree(H, rho, F, depth=3)
        assert tree.leaf_probability_sum() == pytest.approx(1.0, abs=1e-10)
        assert tree.ground_state_probability() == pytest.approx(gw, abs=1e-10)


def gapped_instance(seed, n=3, phase_gap=2.2):
    """Random eigenvector frame with a ground phase isolated well beyond
    the depth-3 region width, the regime of the outcome-tree theorem."""
    from gsprep.spectral import SpectralDecomposition

    rng = np.random.default_rng(seed)
    dim = 1 << n
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    V, _ = np.linalg.qr(G)
    lam0 = float(rng.uniform(-2.9, np.pi - 0.2 - phase_gap))
    rest = np.sort(rng.uniform(lam0 + phase_gap, np.pi - 0.1, size=dim - 1))
    vals = np.concatenate([[lam0], rest])
    return SpectralDecomposition(vals, V)


def test_tree_region_leaf_sum_matches_overlap_when_isolated():
    for seed in range(6):
        dec = gapped_instance(seed)
        rho = random_mixed_state(3, np.random.default_rng(100 + seed))
        H = PauliSum(3, {PauliString("III"): 0.0})  # unused with explicit dec
        tree, gw = trajectory_tree(H, rho, F, depth=3, decomposition=dec)
        assert abs(tree.ground_leaf_probability() - gw) <= 3 * 1e-4 + 1e-6


def test_tree_children_probabilities_sum():
    H = random_pauli_sum(2, 4, seed=70)
    rho = random_mixed_state(2, np.random.default_rng(1))
    tree, _ = trajectory_tree(H, rho, F, depth=2)

    def walk(node, acc):
        if node.children:
            cond = [ch.probability / node.probability for ch in node.children if node.probability > 0]
            if cond:
                assert sum(cond) == pytest.approx(1.0, abs=1e-9)
            for ch in node.children:
                walk(ch, acc)

    walk(tree.root, None)


def test_tree_depth_cap():
    H = PauliSum(1, {PauliString("Z"): 1.0})
    with pytest.raises(ValueError):
        trajectory_tree(H, QuantumState.from_bits("0"), F, depth=13)
