"""Trigonometric sign approximation and the rotation angles realizing it.

The single-ancilla circuit interleaves Rz/Ry rotations with controlled
powers of a unitary. For an eigenvector with phase x the ancilla sees the
2x2 product

    Rz(omega) Ry(t0) Rz(p0) C1(x) Ry(t1) Rz(p1) C2(x) ... CL(x) Ry(tL) Rz(pL)

where the controlled factors alternate, starting from the circuit's front:
C_L(x) = diag(1, e^{ix}) (controlled-U), C_{L-1}(x) = diag(e^{-ix}, 1)
(anti-controlled U^dagger), and so on. Measuring the ancilla in |0> happens
with probability |top-left entry|^2, and the angles are synthesized so that
2 Pr[0] - 1 equals a target trigonometric polynomial f.

Synthesis route: Fejer-Riesz spectral factorization of (1+f)/2 into an
amplitude polynomial, unitary completion, then layer peeling in the Laurent
picture; a damped least-squares fit of the angles is the fallback polish.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares
from scipy.special import erf


class PhaseFactorError(RuntimeError):
    """Factor synthesis failed to reach the requested tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass
class TrigPolynomial:
    """Laurent coefficients c_j, j = -L..L, of f(x) = sum c_j e^{ijx}."""

    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.ndim != 1 or self.coeffs.size % 2 == 0:
            raise ValueError("coefficients must be a vector of odd length")

    @property
    def L(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def one_norm(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    @property
    def is_real(self) -> bool:
        return bool(np.allclose(self.coeffs, np.conj(self.coeffs[::-1]), atol=1e-12))

    @property
    def is_odd(self) -> bool:
        return bool(np.allclose(self.coeffs, -self.coeffs[::-1], atol=1e-12))

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """f(x); asserts the imaginary residue stays below 1e-12."""
        x = np.asarray(x, dtype=float)
        js = np.arange(-self.L, self.L + 1)
        vals = np.exp(1j * np.multiply.outer(x, js)) @ self.coeffs
        resid = np.max(np.abs(np.imag(vals))) if vals.size else 0.0
        if resid > 1e-12 * max(1.0, float(np.max(np.abs(vals)))):
            raise AssertionError(f"eval has imaginary residue {resid:.2e}")
        return np.real(vals) if vals.ndim else float(np.real(vals))

    def sup_norm(self, grid_points: int | None = None) -> float:
        g = grid_points or max(1024, 16 * self.L + 1)
        xs = np.linspace(-np.pi, np.pi, g)
        return float(np.max(np.abs(self.eval(xs))))


@dataclass
class SignApproxParams:
    """kappa: half-width of the excluded bands around 0 and pi, in (0, 1/2);
    eps: deviation target on the plateaus."""

    kappa: float = 0.25
    eps: float = 1e-4

    def __post_init__(self):
        if not 0 < self.kappa < 0.5:
            raise ValueError("kappa must lie in (0, 1/2)")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")


def approx_sign(params: SignApproxParams) -> TrigPolynomial:
    """Odd trigonometric polynomial close to sign(x) away from 0 and +-pi.

    Samples erf(k sin x) with k = sqrt(2 ln(2/eps))/sin(kappa), keeps the
    harmonics needed for the tail to stay inside the budget, and leaves a
    small sup-norm margin so that (1 +- f)/2 never touches zero, which keeps
    the downstream spectral factorization well conditioned.

    Guarantees |f| <= 1 everywhere and |f(x) - sign(x)| <= eps on
    (kappa, pi - kappa) and its mirror. The coefficient one-norm is however
    strictly above 1 for any polynomial with both +-1 plateaus; averaging
    f over (kappa, pi-kappa) bounds the plateau level by
    max_j |avg e^{ijx}| * sum|c_j|, which forces sum|c_j| >= 1.36 at
    kappa = 0.25. The quantity is exposed as .one_norm for inspection.
    """
    kappa, eps = params.kappa, params.eps
    for attempt in range(4):
        eps_build = eps / (2.0 * 4**attempt)
        k = np.sqrt(2.0 * np.log(2.0 / eps_build)) / np.sin(kappa)
        N = 1 << int(np.ceil(np.log2(max(256, 8 * k * np.log(2.0 / eps_build)))))
        x = 2.0 * np.pi * np.arange(N) / N
        c_full = np.fft.fft(erf(k * np.sin(x))) / N
        half = N // 2
        mass = np.abs(c_full[1:half]) + np.abs(c_full[N - 1 : half:-1])
        tail = np.concatenate([np.cumsum(mass[::-1])[::-1], [0.0]])
        above = np.flatnonzero(tail[1:] <= eps_build / 2.0)
        L = int(above[0]) + 1 if above.size else half - 1
        coeffs = np.zeros(2 * L + 1, dtype=complex)
        for j in range(1, L + 1):
            cj = 1j * (0.5 * (c_full[j] - c_full[N - j])).imag
            coeffs[L + j] = cj
            coeffs[L - j] = -cj
        f = TrigPolynomial(coeffs)
        margin = eps / 8.0
        f = TrigPolynomial(coeffs * (1.0 - margin) / f.sup_norm())
        xs = np.linspace(kappa, np.pi - kappa, max(2048, 8 * L))
        if np.max(np.abs(f.eval(xs) - 1.0)) <= eps:
            return f
    raise PhaseFactorError(
        "sign approximation did not reach the deviation target",
        float(np.max(np.abs(f.eval(xs) - 1.0))),
    )


@dataclass
class PhaseFactorSet:
    """Rotation angles (omega, theta_0..L, phi_0..L) for the search circuit."""

    omega: float
    thetas: np.ndarray
    phis: np.ndarray

    def __post_init__(self):
        self.thetas = np.asarray(self.thetas, dtype=float)
        self.phis = np.asarray(self.phis, dtype=float)
        if self.thetas.shape != self.phis.shape or self.thetas.ndim != 1:
            raise ValueError("thetas and phis must be vectors of equal length")

    @property
    def L(self) -> int:
        return self.thetas.size - 1


def controlled_kind(L: int, layer: int) -> str:
    """Which controlled factor follows rotation pair `layer` (L..1 from the
    circuit's front): 'U' is controlled-U and 'Ud' anti-controlled U^dagger."""
    return "U" if (L - layer) % 2 == 0 else "Ud"


def ancilla_amplitudes(pf: PhaseFactorSet, x) -> tuple[np.ndarray, np.ndarray]:
    """(a0, a1): ancilla amplitudes after the circuit, per eigenphase x.

    This is the exact 2x2 scalar simulation of the circuit; Pr[0] = |a0|^2.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    L = pf.L
    v0 = np.ones_like(x, dtype=complex)
    v1 = np.zeros_like(x, dtype=complex)
    eix = np.exp(1j * x)
    for layer in range(L, 0, -1):
        half = pf.phis[layer] / 2.0
        v0 = v0 * np.exp(-1j * half)
        v1 = v1 * np.exp(1j * half)
        ct, st = np.cos(pf.thetas[layer] / 2.0), np.sin(pf.thetas[layer] / 2.0)
        v0, v1 = ct * v0 - st * v1, st * v0 + ct * v1
        if controlled_kind(L, layer) == "U":
            v1 = v1 * eix
        else:
            v0 = v0 * np.conj(eix)
    half = pf.phis[0] / 2.0
    v0 = v0 * np.exp(-1j * half)
    v1 = v1 * np.exp(1j * half)
    ct, st = np.cos(pf.thetas[0] / 2.0), np.sin(pf.thetas[0] / 2.0)
    v0, v1 = ct * v0 - st * v1, st * v0 + ct * v1
    v0 = v0 * np.exp(-1j * pf.omega / 2.0)
    v1 = v1 * np.exp(1j * pf.omega / 2.0)
    return v0, v1


def reconstruct(pf: PhaseFactorSet, x):
    """2 Pr[ancilla = 0] - 1 with the scalar e^{ix} standing in for U."""
    a0, _ = ancilla_amplitudes(pf, x)
    out = 2.0 * np.abs(a0) ** 2 - 1.0
    return out if np.ndim(x) else float(out[0])


# ---------------------------------------------------------------------------
# synthesis internals


def _fejer_riesz(h: np.ndarray, M: int, n_iters: int = 60) -> tuple[np.ndarray, float]:
    """P (ascending, degree M) with |P(e^{ix})|^2 = sum h_m e^{imx} >= 0.

    Roots of w^M h(w) inside the unit disk give the minimum-phase factor;
    the coefficients are recovered through values on an FFT grid (stable for
    clustered roots) and tightened by damped Gauss-Newton iterations.
    """
    if M == 0:
        return np.array([np.sqrt(max(h[0].real, 0.0))], dtype=complex), 0.0
    roots = np.roots(h[::-1])
    inside = roots[np.abs(roots) < 1.0]
    if len(inside) != M:
        order = np.argsort(np.abs(roots))
        inside = roots[order[:M]]
    N = 1 << int(np.ceil(np.log2(4 * (M + 1))))
    wg = np.exp(2j * np.pi * np.arange(N) / N)
    logP = np.sum(np.log(wg[:, None] - inside[None, :]), axis=1)
    xg = np.angle(wg)
    hv = np.maximum(
        np.real(np.exp(1j * np.multiply.outer(xg, np.arange(-M, M + 1))) @ h), 1e-300
    )
    corr = np.mean(0.5 * np.log(hv) - logP.real)
    P = (np.fft.fft(np.exp(logP + corr)) / N)[: M + 1].copy()

    G = 8 * M + 17
    grid = 2.0 * np.pi * np.arange(G) / G - np.pi
    w = np.exp(1j * grid)
    hv2 = np.real(np.exp(1j * np.multiply.outer(grid, np.arange(-M, M + 1))) @ h)
    W = np.vander(w, M + 1, increasing=True)
    for _ in range(n_iters):
        Pv = W @ P
        r = np.abs(Pv) ** 2 - hv2
        rmax = float(np.max(np.abs(r)))
        if rmax < 1e-13:
            break
        J = 2.0 * np.conj(Pv)[:, None] * W
        A = np.hstack([J.real, -J.imag])
        sol, *_ = np.linalg.lstsq(A, -r, rcond=None)
        dP = sol[: M + 1] + 1j * sol[M + 1 :]
        t = 1.0
        for _ in range(10):
            if np.max(np.abs(np.abs(W @ (P + t * dP)) ** 2 - hv2)) < rmax:
                break
            t /= 2.0
        P = P + t * dP
    res = float(np.max(np.abs(np.abs(W @ P) ** 2 - hv2)))
    return P, res


def _peel_angles(A: np.ndarray, B: np.ndarray, L: int) -> PhaseFactorSet:
    """Extract angles from V(z) = K0 D K1 D ... D KL with D = diag(1/z, z),
    where V = [[A, -B~], [B, A~]] and ~ conjugates coefficients and reverses
    degrees. Each step kills the top (or bottom) Laurent coefficient."""
    V = np.zeros((2 * L + 1, 2, 2), dtype=complex)
    V[:, 0, 0] = A
    V[:, 0, 1] = -np.conj(B[::-1])
    V[:, 1, 0] = B
    V[:, 1, 1] = np.conj(A[::-1])
    thetas = np.zeros(L + 1)
    phis = np.zeros(L + 1)
    G = V
    for layer in range(L, 0, -1):
        c_top, c_bot = G[-1], G[0]
        if np.linalg.norm(c_top) >= np.linalg.norm(c_bot):
            row = c_top[np.argmax(np.abs(c_top).sum(axis=1))]
            direction = np.array([-row[1], row[0]])  # orthogonal to conj(row)
        else:
            row = c_bot[np.argmax(np.abs(c_bot).sum(axis=1))]
            direction = np.conj(row)
        nrm = np.linalg.norm(direction)
        direction = direction / nrm if nrm > 0 else np.array([1.0, 0.0], dtype=complex)
        theta = 2.0 * np.arctan2(np.abs(direction[1]), np.abs(direction[0]))
        if np.abs(direction[0]) < 1e-300:
            phi = -2.0 * np.angle(-direction[1])
        elif np.abs(direction[1]) < 1e-300:
            phi = 2.0 * np.angle(direction[0])
        else:
            phi = np.angle(direction[0]) - np.angle(-direction[1])
        thetas[layer], phis[layer] = theta, phi
        ct, st = np.cos(theta / 2.0), np.sin(theta / 2.0)
        eph = np.exp(1j * phi / 2.0)
        Kinv = np.array([[ct * eph, st * eph], [-st / eph, ct / eph]])
        GK = G @ Kinv
        newG = np.zeros((2 * layer - 1, 2, 2), dtype=complex)
        newG[:, :, 0] = GK[0 : 2 * layer - 1, :, 0]  # column 0 picks up a z
        newG[:, :, 1] = GK[2 : 2 * layer + 1, :, 1]  # column 1 picks up 1/z
        G = newG
    W = G[0]
    theta0 = 2.0 * np.arctan2(np.abs(W[1, 0]), np.abs(W[0, 0]))
    if np.abs(W[0, 0]) < 1e-300:
        omega = np.angle(W[1, 0]) + np.angle(-W[0, 1])
        phi0 = np.angle(W[1, 0]) - np.angle(-W[0, 1])
    elif np.abs(W[1, 0]) < 1e-300:
        omega = -np.angle(W[0, 0]) + np.angle(W[1, 1])
        phi0 = -np.angle(W[0, 0]) - np.angle(W[1, 1])
    else:
        s = -2.0 * np.angle(W[0, 0])
        d = 2.0 * np.angle(W[1, 0])
        omega, phi0 = (s + d) / 2.0, (s - d) / 2.0
    thetas[0], phis[0] = theta0, phi0
    return PhaseFactorSet(float(omega), thetas, phis)


def _synthesize(f: TrigPolynomial) -> PhaseFactorSet:
    L = f.L
    h = 0.5 * f.coeffs.copy()
    h[L] += 0.5
    P, _ = _fejer_riesz(h, L)
    A = np.zeros(2 * L + 1, dtype=complex)
    A[::2] = P  # A(z) = z^{-L} P(z^2) on the half-angle circle z = e^{ix/2}
    B = A[::-1].copy()  # B(x) = A(-x), so |A|^2 + |B|^2 = 1 for odd f
    return _peel_angles(A, B, L)


def _residual_grid(f: TrigPolynomial) -> np.ndarray:
    return np.linspace(-np.pi, np.pi, 4 * f.L + 3)


def _lm_polish(pf: PhaseFactorSet, f: TrigPolynomial) -> PhaseFactorSet:
    xs = _residual_grid(f)
    target = f.eval(xs)
    Lp = pf.L

    def resid(p):
        cand = PhaseFactorSet(p[0], p[1 : Lp + 2], p[Lp + 2 :])
        return reconstruct(cand, xs) - target

    p0 = np.concatenate([[pf.omega], pf.thetas, pf.phis])
    sol = least_squares(resid, p0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return PhaseFactorSet(sol.x[0], sol.x[1 : Lp + 2], sol.x[Lp + 2 :])


def find_phase_factors(f: TrigPolynomial, tol: float = 1e-8) -> PhaseFactorSet:
    """Angles whose reconstruction matches f within tol in sup norm.

    Requires sup|f| <= 1 on the circle (the realizability condition for a
    measurement probability (1+f)/2); targets at the boundary are nudged
    inward by 10*tol before factorization and polished back by least squares.
    """
    sup = f.sup_norm()
    if sup > 1.0 + 1e-12:
        raise PhaseFactorError("sup|f| exceeds 1; not realizable", sup - 1.0)
    xs = _residual_grid(f)
    target = f.eval(xs)

    pf = _synthesize(f)
    err = float(np.max(np.abs(reconstruct(pf, xs) - target)))
    if err <= tol:
        return pf

    if sup > 1.0 - 10.0 * tol:
        shrunk = TrigPolynomial(f.coeffs / (1.0 + 10.0 * tol))
        pf = _synthesize(shrunk)
    pf = _lm_polish(pf, f)
    err = float(np.max(np.abs(reconstruct(pf, xs) - target)))
    if err <= tol:
        return pf
    raise PhaseFactorError("factor synthesis did not converge", err)


_factor_cache: dict[tuple[float, float, float], tuple[TrigPolynomial, PhaseFactorSet]] = {}


def sign_factors(kappa: float, eps: float, tol: float = 1e-8):
    """Cached (polynomial, factors) for the sign approximation: they depend
    only on (kappa, eps), never on the Hamiltonian."""
    key = (round(kappa, 12), eps, tol)
    if key not in _factor_cache:
        f = approx_sign(SignApproxParams(kappa, eps))
        _factor_cache[key] = (f, find_phase_factors(f, tol))
    return _factor_cache[key]
