"""Gaussian-process regression with a Matern-5/2 kernel.

Small and self-contained: dense Cholesky algebra, per-dimension
length-scales, and log-marginal-likelihood fitting by multistart L-BFGS
with analytic gradients. Inputs are expected on a sensible common scale
(the optimizer layer feeds the unit hypercube); outputs can optionally be
standardized during fitting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize

from .errors import ConfigurationError, NumericalError

JITTER_FLOOR = 1e-10
JITTER_CEIL = 1e-6

_SQRT5 = np.sqrt(5.0)


@dataclass(frozen=True)
class KernelParams:
    lengthscales: np.ndarray  # (D,), > 0
    signal_variance: float  # > 0

    def __post_init__(self):
        ls = np.atleast_1d(np.asarray(self.lengthscales, dtype=float))
        object.__setattr__(self, "lengthscales", ls)
        if np.any(ls <= 0) or self.signal_variance <= 0:
            raise ConfigurationError("length-scales and signal variance must be > 0")


def _scaled_sq_dists(x: np.ndarray, x2: np.ndarray, lengthscales: np.ndarray) -> np.ndarray:
    a = np.atleast_2d(x) / lengthscales
    b = np.atleast_2d(x2) / lengthscales
    return np.maximum(
        np.sum(a**2, axis=1)[:, None] - 2.0 * a @ b.T + np.sum(b**2, axis=1)[None, :],
        0.0,
    )


def matern_kernel(x, x2, params: KernelParams) -> np.ndarray | float:
    """Matern-5/2 covariance: s^2 (1 + sqrt5 r + 5 r^2/3) exp(-sqrt5 r)."""
    scalar = np.asarray(x).ndim == 1 and np.asarray(x2).ndim == 1
    r = np.sqrt(_scaled_sq_dists(x, x2, params.lengthscales))
    q = _SQRT5 * r
    k = params.signal_variance * (1.0 + q + q**2 / 3.0) * np.exp(-q)
    return float(k[0, 0]) if scalar else k


def _chol_with_jitter(mat: np.ndarray) -> tuple[np.ndarray, float]:
    jitter = 0.0
    while True:
        try:
            return cholesky(mat + jitter * np.eye(len(mat)), lower=True), jitter
        except np.linalg.LinAlgError:
            jitter = JITTER_FLOOR if jitter == 0.0 else jitter * 100.0
            if jitter > JITTER_CEIL:
                raise NumericalError(
                    "covariance not factorizable even with jitter "
                    f"up to {JITTER_CEIL}"
                ) from None


class GPModel:
    """Zero-mean GP conditioned on observed (x, y) pairs.

    Holds the kernel, the noise level and the cached Cholesky factor of the
    training covariance. ``y_mean``/``y_std`` record an optional output
    standardization; predictions are always returned in original units.
    """

    def __init__(
        self,
        train_x: np.ndarray,
        train_y: np.ndarray,
        kernel: KernelParams,
        noise_variance: float = JITTER_FLOOR,
        standardize: bool = False,
    ):
        x = np.atleast_2d(np.asarray(train_x, dtype=float))
        y = np.asarray(train_y, dtype=float).ravel()
        if x.shape[0] != y.size:
            raise ConfigurationError("train_x and train_y lengths differ")
        if noise_variance < JITTER_FLOOR:
            noise_variance = JITTER_FLOOR
        self.train_x = x
        self.train_y = y
        self.kernel = kernel
        self.noise_variance = float(noise_variance)
        if standardize and y.size:
            self.y_mean = float(y.mean())
            self.y_std = float(max(y.std(), 1e-12))
        else:
            self.y_mean, self.y_std = 0.0, 1.0
        self._z = (y - self.y_mean) / self.y_std
        if y.size:
            k = matern_kernel(x, x, kernel) + self.noise_variance * np.eye(y.size)
            self.chol, self.jitter = _chol_with_jitter(k)
            self.alpha = cho_solve((self.chol, True), self._z)
        else:
            self.chol, self.jitter, self.alpha = None, 0.0, None

    @property
    def n_train(self) -> int:
        return self.train_y.size

    def log_marginal_likelihood(self) -> float:
        if self.n_train == 0:
            return 0.0
        return float(
            -0.5 * self._z @ self.alpha
            - np.sum(np.log(np.diag(self.chol)))
            - 0.5 * self.n_train * np.log(2.0 * np.pi)
        )


def posterior(model: GPModel, xs) -> tuple[np.ndarray | float, np.ndarray | float]:
    """Predictive mean and variance at query point(s), in original units."""
    xs = np.asarray(xs, dtype=float)
    scalar = xs.ndim == 1
    q = np.atleast_2d(xs)
    if model.n_train == 0:
        mean = np.full(len(q), model.y_mean)
        var = np.full(len(q), model.kernel.signal_variance * model.y_std**2)
    else:
        k_star = matern_kernel(q, model.train_x, model.kernel)
        mean = model.y_mean + model.y_std * (k_star @ model.alpha)
        v = solve_triangular(model.chol, k_star.T, lower=True)
        var = model.kernel.signal_variance - np.sum(v**2, axis=0)
        var = np.maximum(var, 0.0) * model.y_std**2
    return (float(mean[0]), float(var[0])) if scalar else (mean, var)


def ucb(model: GPModel, xs, beta: float) -> np.ndarray | float:
    """Upper confidence bound mu + beta * sigma."""
    if beta < 0:
        raise ConfigurationError("beta must be >= 0")
    mean, var = posterior(model, xs)
    return mean + beta * np.sqrt(var)


def _neg_lml_and_grad(z: np.ndarray, x: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Negative log marginal likelihood and gradient in log-parameters.

    z = [log lengthscales (D), log signal variance, log noise variance].
    """
    m, d = x.shape
    ls = np.exp(z[:d])
    sig2 = np.exp(z[d])
    noise2 = np.exp(z[d + 1])
    sq = _scaled_sq_dists(x, x, ls)
    r = np.sqrt(sq)
    q = _SQRT5 * r
    e = np.exp(-q)
    k_core = (1.0 + q + q**2 / 3.0) * e
    big_k = sig2 * k_core + noise2 * np.eye(m)
    chol, _ = _chol_with_jitter(big_k)
    alpha = cho_solve((chol, True), y)
    nll = 0.5 * y @ alpha + np.sum(np.log(np.diag(chol))) + 0.5 * m * np.log(2 * np.pi)

    k_inv = cho_solve((chol, True), np.eye(m))
    w = np.outer(alpha, alpha) - k_inv  # dLML/dK = 0.5 * W

    grad = np.empty(d + 2)
    # d k / d log(ls_j) = sig2 * (5/3)(1+q) e^{-q} * (x_j - x'_j)^2 / ls_j^2
    base = sig2 * (5.0 / 3.0) * (1.0 + q) * e
    for j in range(d):
        dj = (x[:, j][:, None] - x[:, j][None, :]) ** 2 / ls[j] ** 2
        grad[j] = -0.5 * np.sum(w * base * dj)
    grad[d] = -0.5 * np.sum(w * sig2 * k_core)
    grad[d + 1] = -0.5 * np.trace(w) * noise2
    return float(nll), grad


def fit_hyperparameters(
    train_x,
    train_y,
    n_restarts: int = 8,
    seed: int | np.random.Generator = 0,
    standardize: bool = True,
) -> GPModel:
    """Maximize the log marginal likelihood by multistart local search.

    The returned model's likelihood is at least the likelihood at every
    restart's starting point.
    """
    x = np.atleast_2d(np.asarray(train_x, dtype=float))
    y_raw = np.asarray(train_y, dtype=float).ravel()
    if y_raw.size < 2:
        raise ConfigurationError("need at least two observations to fit")
    d = x.shape[1]
    y_mean = float(y_raw.mean()) if standardize else 0.0
    y_std = float(max(y_raw.std(), 1e-12)) if standardize else 1.0
    y = (y_raw - y_mean) / y_std

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    # noise floor during fitting sits above the jitter floor: negligible on
    # standardized outputs, but keeps near-duplicate designs factorizable
    lb = np.concatenate([np.full(d, np.log(1e-2)), [np.log(1e-3), np.log(1e-8)]])
    ub = np.concatenate([np.full(d, np.log(1e2)), [np.log(1e3), np.log(1.0)]])
    starts = [np.concatenate([np.full(d, np.log(0.5)), [0.0, np.log(1e-4)]])]
    lb_start = lb.copy()
    lb_start[-1] = np.log(1e-6)  # random restarts avoid the near-singular corner
    for _ in range(max(n_restarts - 1, 0)):
        starts.append(lb_start + rng.random(d + 2) * (ub - lb_start))

    best_z, best_nll = None, np.inf
    for z0 in starts:
        try:
            f0, _ = _neg_lml_and_grad(z0, x, y)
        except NumericalError:
            continue
        if f0 < best_nll:
            best_z, best_nll = z0, f0
        try:
            res = minimize(
                _neg_lml_and_grad,
                z0,
                args=(x, y),
                jac=True,
                method="L-BFGS-B",
                bounds=list(zip(lb, ub)),
                options={"maxiter": 60},
            )
        except NumericalError:
            continue
        if res.fun < best_nll:
            best_z, best_nll = res.x, float(res.fun)
    if best_z is None:
        raise NumericalError("no hyperparameter start was factorizable")

    params = KernelParams(np.exp(best_z[:d]), float(np.exp(best_z[d])))
    model = GPModel(x, y_raw, params, noise_variance=float(np.exp(best_z[d + 1])), standardize=standardize)
    return model
