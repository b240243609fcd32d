"""Desk-scale v-objective diffusion: schedule, noising algebra, sampler and toy denoisers.

Latents are ``(B, D)`` arrays.  Time runs from 0 (clean data) to 1 (pure
noise) under a variance-preserving cosine schedule, so alpha**2 + sigma**2 == 1.
The network target is v = alpha * eps - sigma * x0, from which both the clean
latent and the noise can be recovered given z_t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol

import numpy as np
from numpy.typing import ArrayLike, NDArray

from foakit.errors import DivergenceError, ValidationError

DIVERGENCE_LIMIT = 1e6

Array = NDArray[np.float64]


@dataclass(frozen=True)
class CosineSchedule:
    """alpha(t) = cos(pi t / 2), sigma(t) = sin(pi t / 2) on t in [0, 1]."""

    timesteps: int = 1000

    def __post_init__(self) -> None:
        if self.timesteps < 1:
            raise ValidationError("timesteps must be positive")

    def alpha(self, t: ArrayLike) -> Array:
        return np.cos(0.5 * np.pi * _check_time(t))

    def sigma(self, t: ArrayLike) -> Array:
        return np.sin(0.5 * np.pi * _check_time(t))

    def grid(self) -> Array:
        return np.linspace(0.0, 1.0, self.timesteps + 1)


DEFAULT_SCHEDULE = CosineSchedule()


def _check_time(t: ArrayLike) -> Array:
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < 0) or np.any(arr > 1) or not np.all(np.isfinite(arr)):
        raise ValidationError("diffusion time must lie in [0, 1]")
    return arr


def _coefficients(schedule: CosineSchedule, t: ArrayLike, batch: int) -> tuple[Array, Array]:
    t_arr = np.asarray(t, dtype=np.float64)
    if t_arr.ndim == 1:
        if t_arr.shape[0] != batch:
            raise ValidationError(f"got {t_arr.shape[0]} times for a batch of {batch}")
        t_arr = t_arr[:, None]
    elif t_arr.ndim != 0:
        raise ValidationError("t must be a scalar or a per-item vector")
    return schedule.alpha(t_arr), schedule.sigma(t_arr)


def _pair(a: ArrayLike, b: ArrayLike) -> tuple[Array, Array]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValidationError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.ndim != 2:
        raise ValidationError(f"latent batches must be 2-D (B, D), got shape {a.shape}")
    return a, b


def forward_noise(x0: ArrayLike, eps: ArrayLike, t: ArrayLike, schedule: CosineSchedule = DEFAULT_SCHEDULE) -> Array:
    x0, eps = _pair(x0, eps)
    alpha, sigma = _coefficients(schedule, t, x0.shape[0])
    return alpha * x0 + sigma * eps


def v_target(x0: ArrayLike, eps: ArrayLike, t: ArrayLike, schedule: CosineSchedule = DEFAULT_SCHEDULE) -> Array:
    x0, eps = _pair(x0, eps)
    alpha, sigma = _coefficients(schedule, t, x0.shape[0])
    return alpha * eps - sigma * x0


def recover_x0(z_t: ArrayLike, v: ArrayLike, t: ArrayLike, schedule: CosineSchedule = DEFAULT_SCHEDULE) -> Array:
    z_t, v = _pair(z_t, v)
    alpha, sigma = _coefficients(schedule, t, z_t.shape[0])
    return alpha * z_t - sigma * v


def recover_eps(z_t: ArrayLike, v: ArrayLike, t: ArrayLike, schedule: CosineSchedule = DEFAULT_SCHEDULE) -> Array:
    z_t, v = _pair(z_t, v)
    alpha, sigma = _coefficients(schedule, t, z_t.shape[0])
    return sigma * z_t + alpha * v


def v_loss(pred: ArrayLike, target: ArrayLike) -> float:
    """Mean squared error over batch and latent dimensions."""
    pred, target = _pair(pred, target)
    return float(np.mean((pred - target) ** 2))


def _broadcast_cond(cond: Optional[ArrayLike], batch: int) -> Array:
    if cond is None:
        return np.zeros((batch, 0))
    c = np.asarray(cond, dtype=np.float64)
    if c.ndim == 1:
        c = np.broadcast_to(c, (batch, c.shape[0]))
    if c.shape[0] != batch:
        raise ValidationError("conditioning batch size differs from the latent batch")
    if not np.all(np.isfinite(c)):
        raise ValidationError("conditioning must be finite")
    return c


class Denoiser(Protocol):
    def __call__(self, z: Array, t: Array, cond: Array) -> Array: ...


class TrainableDenoiser(Denoiser, Protocol):
    params: Array

    def loss_and_grad(self, z: Array, t: Array, cond: Array, target: Array) -> tuple[float, Array]: ...


@dataclass
class OracleDenoiser:
    """Returns the exact v for a known clean latent; used to check the sampler."""

    x0: Array
    schedule: CosineSchedule = DEFAULT_SCHEDULE

    def __call__(self, z, t, cond=None):
        alpha, sigma = _coefficients(self.schedule, t, z.shape[0])
        eps = (z - alpha * self.x0) / sigma
        return alpha * eps - sigma * self.x0


def input_scale(schedule: CosineSchedule, t: Array, data_std: float) -> Array:
    """Preconditioning factor 1 / sqrt(alpha^2 s^2 + sigma^2) so inputs have unit scale."""
    alpha, sigma = schedule.alpha(t), schedule.sigma(t)
    return 1.0 / np.maximum(np.sqrt(alpha**2 * data_std**2 + sigma**2), 1e-8)


def hat_basis(t: ArrayLike, n_knots: int) -> Array:
    """Piecewise-linear interpolation weights over ``n_knots`` equispaced knots on [0, 1]."""
    t = np.asarray(t, dtype=np.float64).reshape(-1, 1)
    knots = np.linspace(0.0, 1.0, n_knots)[None, :]
    return np.maximum(0.0, 1.0 - np.abs(t - knots) * (n_knots - 1))


@dataclass
class AffineDenoiser:
    """Affine in (z, cond) with coefficients interpolated linearly over time.

    v = M @ (h(t) kron [c_in(t) z, cond, 1]), where h(t) are hat-function
    weights and c_in is :func:`input_scale` for the given data standard
    deviation.  At any fixed t this is an affine map of the input and the loss
    is quadratic in the parameters.
    """

    dim: int
    cond_dim: int = 0
    n_knots: int = 16
    data_std: float = 1.0
    schedule: CosineSchedule = DEFAULT_SCHEDULE
    params: Array = field(default=None)

    def __post_init__(self) -> None:
        n_in = self.dim + self.cond_dim + 1
        if self.params is None:
            self.params = np.zeros(self.dim * self.n_knots * n_in)
        self.params = np.asarray(self.params, dtype=np.float64)
        if self.params.shape != (self.dim * self.n_knots * n_in,):
            raise ValidationError("parameter vector has the wrong size")

    def _features(self, z, t, cond) -> Array:
        b = z.shape[0]
        t = np.broadcast_to(np.asarray(t, dtype=np.float64), (b,))
        z_in = z * input_scale(self.schedule, t, self.data_std)[:, None]
        u = np.concatenate([z_in, _broadcast_cond(cond, b), np.ones((b, 1))], axis=1)
        h = hat_basis(t, self.n_knots)
        return (h[:, :, None] * u[:, None, :]).reshape(b, -1)

    def _matrix(self) -> Array:
        return self.params.reshape(self.dim, -1)

    def __call__(self, z, t, cond=None):
        return self._features(z, t, cond) @ self._matrix().T

    def loss_and_grad(self, z, t, cond, target):
        phi = self._features(z, t, cond)
        resid = phi @ self._matrix().T - target
        loss = float(np.mean(resid**2))
        grad = 2.0 / resid.size * (resid.T @ phi)
        return loss, grad.ravel()


@dataclass
class MLPDenoiser:
    """Two-layer tanh network on [z, cond, t, sin(pi t), cos(pi t)] with hand-written backprop."""

    dim: int
    cond_dim: int = 0
    hidden: int = 64
    seed: int = 0
    params: Array = field(default=None)

    def __post_init__(self) -> None:
        n_in = self.dim + self.cond_dim + 3
        shapes = [(self.hidden, n_in), (self.hidden,), (self.dim, self.hidden), (self.dim,)]
        self._shapes = shapes
        size = sum(math.prod(s) for s in shapes)
        if self.params is None:
            rng = np.random.default_rng(self.seed)
            w1 = rng.normal(0.0, 1.0 / math.sqrt(n_in), shapes[0])
            w2 = rng.normal(0.0, 1.0 / math.sqrt(self.hidden), shapes[2])
            self.params = np.concatenate([w1.ravel(), np.zeros(self.hidden), w2.ravel(), np.zeros(self.dim)])
        self.params = np.asarray(self.params, dtype=np.float64)
        if self.params.shape != (size,):
            raise ValidationError("parameter vector has the wrong size")

    def _unpack(self) -> list[Array]:
        out, start = [], 0
        for shape in self._shapes:
            n = math.prod(shape)
            out.append(self.params[start : start + n].reshape(shape))
            start += n
        return out

    def _inputs(self, z, t, cond) -> Array:
        b = z.shape[0]
        t = np.broadcast_to(np.asarray(t, dtype=np.float64), (b,))[:, None]
        return np.concatenate(
            [z, _broadcast_cond(cond, b), t, np.sin(np.pi * t), np.cos(np.pi * t)], axis=1
        )

    def __call__(self, z, t, cond=None):
        w1, b1, w2, b2 = self._unpack()
        hidden = np.tanh(self._inputs(z, t, cond) @ w1.T + b1)
        return hidden @ w2.T + b2

    def loss_and_grad(self, z, t, cond, target):
        w1, b1, w2, b2 = self._unpack()
        u = self._inputs(z, t, cond)
        hidden = np.tanh(u @ w1.T + b1)
        resid = hidden @ w2.T + b2 - target
        loss = float(np.mean(resid**2))
        d_out = 2.0 / resid.size * resid
        g_w2 = d_out.T @ hidden
        g_b2 = d_out.sum(axis=0)
        d_pre = (d_out @ w2) * (1.0 - hidden**2)
        g_w1 = d_pre.T @ u
        g_b1 = d_pre.sum(axis=0)
        return loss, np.concatenate([g_w1.ravel(), g_b1, g_w2.ravel(), g_b2])


def sample(
    denoiser: Denoiser,
    schedule: CosineSchedule = DEFAULT_SCHEDULE,
    steps: int = 50,
    cond: Optional[ArrayLike] = None,
    seed: int = 0,
    shape: tuple[int, int] = (1, 1),
) -> Array:
    """Deterministic DDIM-style sampler from t = 1 to t = 0 in ``steps`` uniform steps.

    Each step predicts v, recovers the clean latent and the noise, then
    re-noises the clean estimate to the next grid time.
    """
    if steps < 1:
        raise ValidationError("steps must be >= 1")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(shape)
    c = _broadcast_cond(cond, shape[0])
    times = np.linspace(1.0, 0.0, steps + 1)
    for t_now, t_next in zip(times[:-1], times[1:]):
        t_vec = np.full(shape[0], t_now)
        v = denoiser(z, t_vec, c)
        x0 = recover_x0(z, v, t_vec, schedule)
        eps = recover_eps(z, v, t_vec, schedule)
        z = schedule.alpha(t_next) * x0 + schedule.sigma(t_next) * eps
    return z


@dataclass
class TrainingResult:
    denoiser: TrainableDenoiser
    heldout_steps: list[int]
    heldout_loss: list[float]
    final_train_loss: float

    @property
    def params(self) -> Array:
        return self.denoiser.params


def _draw_batch(rng, data: Array, cond: Optional[Array], size: int) -> tuple[Array, Array, Array, Array]:
    idx = rng.integers(0, data.shape[0], size)
    x0 = data[idx]
    eps = rng.standard_normal(x0.shape)
    t = rng.uniform(0.0, 1.0, size)
    if cond is None:
        c = np.zeros((size, 0))
    elif cond.ndim == 1:
        c = np.broadcast_to(cond, (size, cond.shape[0]))
    else:
        c = cond[idx]
    return x0, eps, t, c


def train_toy_denoiser(
    data: ArrayLike,
    cond: Optional[ArrayLike] = None,
    schedule: CosineSchedule = DEFAULT_SCHEDULE,
    steps: int = 20000,
    lr: float = 0.05,
    seed: int = 0,
    *,
    denoiser: Optional[TrainableDenoiser] = None,
    batch_size: int = 256,
    heldout_size: int = 4096,
    eval_every: int = 100,
    lr_decay: bool = True,
    callback: Optional[Callable[[int, float], None]] = None,
) -> TrainingResult:
    """Plain gradient descent on the v-objective MSE over minibatches of ``data``.

    With ``lr_decay`` the step size follows lr / (1 + 10 * k / steps), which
    damps minibatch noise late in training.  Raises :class:`DivergenceError`
    if the loss leaves the finite range or exceeds 1e6.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] == 0:
        raise ValidationError("training data must be a non-empty (N, D) array")
    if lr <= 0 or steps < 1:
        raise ValidationError("lr must be positive and steps >= 1")
    cond_arr = None if cond is None else np.asarray(cond, dtype=np.float64)
    cond_dim = 0 if cond_arr is None else cond_arr.shape[-1]
    if cond_arr is not None:
        if cond_arr.ndim not in (1, 2) or (cond_arr.ndim == 2 and cond_arr.shape[0] != data.shape[0]):
            raise ValidationError("cond must be one shared vector or one row per data item")
        if not np.all(np.isfinite(cond_arr)):
            raise ValidationError("conditioning must be finite")
    if denoiser is None:
        denoiser = AffineDenoiser(data.shape[1], cond_dim, data_std=float(data.std()), schedule=schedule)

    rng = np.random.default_rng(seed)
    hx0, heps, ht, hcond = _draw_batch(rng, data, cond_arr, heldout_size)
    hz = forward_noise(hx0, heps, ht, schedule)
    hv = v_target(hx0, heps, ht, schedule)

    def heldout() -> float:
        return v_loss(denoiser(hz, ht, hcond), hv)

    steps_log, losses = [0], [heldout()]
    loss = losses[0]
    for k in range(1, steps + 1):
        x0, eps, t, c = _draw_batch(rng, data, cond_arr, batch_size)
        z = forward_noise(x0, eps, t, schedule)
        target = v_target(x0, eps, t, schedule)
        loss, grad = denoiser.loss_and_grad(z, t, c, target)
        if not math.isfinite(loss) or loss > DIVERGENCE_LIMIT:
            raise DivergenceError(f"training diverged at step {k} (loss {loss:.3e})")
        step = lr / (1.0 + 10.0 * k / steps) if lr_decay else lr
        denoiser.params = denoiser.params - step * grad
        if k % eval_every == 0 or k == steps:
            steps_log.append(k)
            losses.append(heldout())
            if callback is not None:
                callback(k, losses[-1])
    return TrainingResult(denoiser, steps_log, losses, loss)


def gradient_check(
    denoiser: TrainableDenoiser,
    z: Array,
    t: Array,
    cond: Optional[Array],
    target: Array,
    n_directions: int = 100,
    h: float = 1e-5,
    seed: int = 0,
) -> float:
    """Largest relative error between analytic and central-difference directional derivatives."""
    rng = np.random.default_rng(seed)
    base = denoiser.params.copy()
    _, grad = denoiser.loss_and_grad(z, t, cond, target)
    worst = 0.0
    try:
        for _ in range(n_directions):
            d = rng.standard_normal(base.shape)
            d /= np.linalg.norm(d)
            denoiser.params = base + h * d
            up = v_loss(denoiser(z, t, cond), target)
            denoiser.params = base - h * d
            down = v_loss(denoiser(z, t, cond), target)
            numeric = (up - down) / (2.0 * h)
            analytic = float(grad @ d)
            scale = max(abs(numeric), abs(analytic), 1e-12)
            worst = max(worst, abs(numeric - analytic) / scale)
    finally:
        denoiser.params = base
    return worst


def gaussian_target(dim: int) -> tuple[Array, Array]:
    """Demo target: mean alternating +1/-1, diagonal variances alternating 1 and 0.25."""
    mean = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)
    cov = np.diag(np.where(np.arange(dim) % 2 == 0, 1.0, 0.25))
    return mean, cov
