"""Blocked Gibbs / Metropolis-within-Gibbs sampler for the mixture model.

One sweep updates, in order: component allocations (exact categorical),
atom parameters (random-walk MH for means and mixing weights, conjugate
inverse-gamma for the component variances), sticks/knots/bandwidth and the
remaining hyperparameters (MH blocks), and finally the regression
coefficients (c, d) drawn from their exact bivariate normal conditional with
the d-marginal truncated to (-1, 1/2) by inverse-CDF.

Allocations come first because they make every later conditional tractable.
Proposal scales adapt toward a 0.44 acceptance rate during burn-in only and
are frozen afterwards, keeping the post-burn-in kernel fixed.

The regression covariate used throughout is the one carried by the
RegressionSample (sin form by default), so the slope coefficient is directly
comparable with the least-squares estimator.

Given allocations, the stick/knot conditionals factorise over components, so
those blocks propose and accept all coordinates in one vectorised pass; the
kernel-weight matrix is shared across blocks within a sweep and handed to the
next sweep's allocation step instead of being recomputed.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
from scipy.special import betaln, expit, gammaln, logsumexp, ndtr, ndtri

from . import baselines
from .chains import (  # noqa: F401  (re-exported chain plumbing)
    DEFAULT_PROPOSAL_SCALES,
    ChainConfig,
    PosteriorDraws,
    PosteriorSummary,
    ScaleAdapter,
    effective_sample_size,
    summarize,
)
from .errors import InvalidInputError, NumericError
from .mixture import (
    SQUARED_EXPONENTIAL,
    AtomSet,
    ModelConfig,
    ModelState,
    StickState,
    atom_log_components,
    kernel_weight,
    mixture_log_weights,
    prior_draw,
    simulate_responses,
)
from .spectral import RegressionSample

__all__ = [
    "ChainConfig",
    "PosteriorDraws",
    "PosteriorSummary",
    "allocation_probabilities",
    "cd_conditional",
    "effective_sample_size",
    "gibbs_sweep",
    "init_state",
    "model_config_for",
    "prior_draw",
    "run_chain",
    "sigma_conditional_params",
    "simulate_responses",
    "stick_log_conditional",
    "summarize",
    "update_allocations",
    "update_atoms",
    "update_cd",
    "update_sticks_knots_bandwidth",
]

_D_EDGE = 1e-3  # clamp distance when the LS initialiser falls outside (-1, 1/2)


def model_config_for(data: RegressionSample, config: ChainConfig) -> ModelConfig:
    """Model structure and priors implied by the data's frequency band."""
    return ModelConfig(
        lambda_min=data.lambda_min,
        lambda_max=data.lambda_max,
        h_components=config.h_components,
        kernel_kind=config.kernel_kind,
    )


def _default_model_config(state: ModelState, data: RegressionSample) -> ModelConfig:
    return ModelConfig(
        lambda_min=data.lambda_min,
        lambda_max=data.lambda_max,
        h_components=len(state.atoms),
        kernel_kind=state.sticks.kernel_kind,
    )


def _residuals(state: ModelState, data: RegressionSample) -> np.ndarray:
    return data.responses - state.c - state.d * data.regressors


def init_state(data: RegressionSample, config: ChainConfig, seed: int) -> ModelState:
    """Deterministic starting state built around the least-squares fit.

    (c, d) start at the LS solution (d clamped just inside (-1, 1/2) if
    needed), atom scales at the residual standard deviation, and knots are
    spread evenly over the frequency band.
    """
    if len(data) == 0:
        raise InvalidInputError("cannot initialise from an empty sample")
    mc = model_config_for(data, config)
    ls = baselines.fit_ls(data)
    d0 = min(max(ls.d_hat, mc.d_low + _D_EDGE), mc.d_high - _D_EDGE)
    c0 = ls.c_hat

    rng = np.random.default_rng(seed)
    resid = data.responses - c0 - d0 * data.regressors
    sd = float(resid.std())
    if sd <= 0.0:
        sd = 1.0
    h = config.h_components
    atoms = AtomSet(
        pi=np.full(h, 0.5),
        mu=0.05 * sd * rng.standard_normal(h),
        sigma1=np.full(h, sd),
        sigma2=np.full(h, sd),
    )
    sticks = StickState(
        v=np.full(h, 0.5),
        knots=np.linspace(mc.lambda_min, mc.lambda_max, h),
        xi=(mc.lambda_max - mc.lambda_min) / 4.0,
        kernel_kind=config.kernel_kind,
        a=1.0,
        b=1.0,
    )
    sticks.v[-1] = 1.0
    m = len(data)
    return ModelState(
        c=float(c0), d=float(d0), atoms=atoms, sticks=sticks,
        alloc=np.zeros(m, dtype=np.int64), subcomp=np.zeros(m, dtype=np.int64),
        nu=0.5, sigma2_theta=max(sd * sd, 1.0),
    )


# ---------------------------------------------------------------------------
# allocations


def allocation_probabilities(state: ModelState, data: RegressionSample) -> np.ndarray:
    """Exact categorical conditional p(s_j = h | ...) as an (m, H) matrix."""
    u = _residuals(state, data)
    part1, part2 = atom_log_components(state.atoms, u)
    logp = mixture_log_weights(state.sticks, data.frequencies) + np.logaddexp(part1, part2)
    return np.exp(logp - logsumexp(logp, axis=1, keepdims=True))


def update_allocations(
    state: ModelState,
    data: RegressionSample,
    rng: np.random.Generator,
    config: ModelConfig | None = None,
    log_weights: np.ndarray | None = None,
) -> ModelState:
    """Resample every allocation and sub-component flag from its conditional.

    ``log_weights`` may carry a precomputed mixture_log_weights matrix for the
    current sticks (the chain driver reuses the one assembled by the previous
    stick update).
    """
    if log_weights is None:
        log_weights = mixture_log_weights(state.sticks, data.frequencies)
    u = _residuals(state, data)
    part1, part2 = atom_log_components(state.atoms, u)
    logp = log_weights + np.logaddexp(part1, part2)

    m = logp.shape[0]
    probs = np.exp(logp - logp.max(axis=1, keepdims=True))
    cdf = np.cumsum(probs, axis=1)
    draws = rng.random(m) * cdf[:, -1]
    alloc = (cdf < draws[:, None]).sum(axis=1)

    rows = np.arange(m)
    p_second = expit(part2[rows, alloc] - part1[rows, alloc])
    subcomp = (rng.random(m) < p_second).astype(np.int64)
    return replace(state, alloc=alloc, subcomp=subcomp)


# ---------------------------------------------------------------------------
# atoms


def _atom_sufficient_stats(state: ModelState, data: RegressionSample):
    """Per-(atom, sub-component) counts and first/second moments of residuals."""
    u = _residuals(state, data)
    h = len(state.atoms)
    key = state.alloc * 2 + state.subcomp
    counts = np.bincount(key, minlength=2 * h).astype(float)
    sums = np.bincount(key, weights=u, minlength=2 * h)
    squares = np.bincount(key, weights=u * u, minlength=2 * h)
    return (
        counts[0::2], counts[1::2],
        sums[0::2], sums[1::2],
        squares[0::2], squares[1::2],
    )


def sigma_conditional_params(
    state: ModelState,
    data: RegressionSample,
    config: ModelConfig | None = None,
):
    """Inverse-gamma conditional (shape, scale) for both component variances."""
    config = config or _default_model_config(state, data)
    n1, n2, s1, s2, q1, q2 = _atom_sufficient_stats(state, data)
    mu = state.atoms.mu
    mu2 = state.atoms.mu2
    ss1 = np.maximum(q1 - 2.0 * mu * s1 + n1 * mu**2, 0.0)
    ss2 = np.maximum(q2 - 2.0 * mu2 * s2 + n2 * mu2**2, 0.0)
    return {
        "shape1": config.atom_var_shape + 0.5 * n1,
        "scale1": config.atom_var_scale + 0.5 * ss1,
        "shape2": config.atom_var_shape + 0.5 * n2,
        "scale2": config.atom_var_scale + 0.5 * ss2,
    }


def _mu_log_target(mu, pi, var1, var2, n1, n2, s1, s2, sigma2_theta):
    ratio = pi / (1.0 - pi)
    mu2 = -mu * ratio
    quad1 = (-2.0 * mu * s1 + n1 * mu**2) / var1
    quad2 = (-2.0 * mu2 * s2 + n2 * mu2**2) / var2
    return -0.5 * (quad1 + quad2) - 0.5 * mu**2 / sigma2_theta


def _pi_log_target(pi, mu, var2, n1, n2, s2):
    mu2 = -mu * pi / (1.0 - pi)
    quad2 = (-2.0 * mu2 * s2 + n2 * mu2**2) / var2
    return n1 * np.log(pi) + n2 * np.log1p(-pi) - 0.5 * quad2


def update_atoms(
    state: ModelState,
    data: RegressionSample,
    rng: np.random.Generator,
    config: ModelConfig | None = None,
    scales=None,
    accept: dict | None = None,
) -> ModelState:
    """Update every atom: mu by RW-MH (the zero-mean tie moves the second
    mean along), variances by their conjugate inverse-gamma conditionals,
    pi by MH on the logit scale.  Atoms with no allocated observations are
    refreshed directly from the prior.
    """
    config = config or _default_model_config(state, data)
    scales = scales if scales is not None else {}
    h = len(state.atoms)
    n1, n2, s1, s2, q1, q2 = _atom_sufficient_stats(state, data)
    empty = (n1 + n2) == 0

    atoms = state.atoms
    var1 = atoms.sigma1**2
    var2 = atoms.sigma2**2

    # mu block
    mu_scale = scales.get("mu", DEFAULT_PROPOSAL_SCALES["mu"])
    mu_prop = atoms.mu + mu_scale * rng.standard_normal(h)
    delta = _mu_log_target(mu_prop, atoms.pi, var1, var2, n1, n2, s1, s2, state.sigma2_theta) - _mu_log_target(
        atoms.mu, atoms.pi, var1, var2, n1, n2, s1, s2, state.sigma2_theta
    )
    mu_acc = np.log(1.0 - rng.random(h)) < delta
    mu_new = np.where(mu_acc & ~empty, mu_prop, atoms.mu)

    # component variances, conjugate given the updated means
    ratio = atoms.pi / (1.0 - atoms.pi)
    mu2_new = -mu_new * ratio
    ss1 = np.maximum(q1 - 2.0 * mu_new * s1 + n1 * mu_new**2, 0.0)
    ss2 = np.maximum(q2 - 2.0 * mu2_new * s2 + n2 * mu2_new**2, 0.0)
    var1_new = 1.0 / np.maximum(
        rng.gamma(config.atom_var_shape + 0.5 * n1, 1.0 / (config.atom_var_scale + 0.5 * ss1)),
        1e-300,
    )
    var2_new = 1.0 / np.maximum(
        rng.gamma(config.atom_var_shape + 0.5 * n2, 1.0 / (config.atom_var_scale + 0.5 * ss2)),
        1e-300,
    )

    # pi block on the logit scale (the Jacobian terms log pi + log(1-pi))
    pi_scale = scales.get("pi", DEFAULT_PROPOSAL_SCALES["pi"])
    logit = np.log(atoms.pi) - np.log1p(-atoms.pi)
    logit_prop = logit + pi_scale * rng.standard_normal(h)
    pi_prop = np.clip(expit(logit_prop), 1e-12, 1.0 - 1e-12)
    delta = (
        _pi_log_target(pi_prop, mu_new, var2_new, n1, n2, s2)
        + np.log(pi_prop) + np.log1p(-pi_prop)
        - _pi_log_target(atoms.pi, mu_new, var2_new, n1, n2, s2)
        - np.log(atoms.pi) - np.log1p(-atoms.pi)
    )
    pi_acc = np.log(1.0 - rng.random(h)) < delta
    pi_new = np.where(pi_acc & ~empty, pi_prop, atoms.pi)

    # prior refresh for empty atoms
    n_empty = int(empty.sum())
    if n_empty:
        pi_new[empty] = rng.uniform(1e-12, 1.0 - 1e-12, size=n_empty)
        mu_new[empty] = math.sqrt(state.sigma2_theta) * rng.standard_normal(n_empty)
        # conjugate draws above already equal the prior when n = 0

    if accept is not None:
        accept["mu"] = np.where(empty, np.nan, mu_acc.astype(float))
        accept["pi"] = np.where(empty, np.nan, pi_acc.astype(float))

    new_atoms = AtomSet(pi=pi_new, mu=mu_new,
                        sigma1=np.sqrt(var1_new), sigma2=np.sqrt(var2_new))
    return replace(state, atoms=new_atoms)


# ---------------------------------------------------------------------------
# sticks, knots, bandwidth and remaining hyperparameters


def _log_kernel(dist: np.ndarray, xi: float, kind: str) -> np.ndarray:
    if kind == SQUARED_EXPONENTIAL:
        return -((dist / xi) ** 2)
    return -dist / xi


def stick_log_conditional(
    state: ModelState,
    data: RegressionSample,
    h: int,
    value: float,
    config: ModelConfig | None = None,
) -> float:
    """Unnormalised log full-conditional density of stick V_h at ``value``.

    With a flat kernel (w == 1) this reduces to the standard truncated
    stick-breaking Beta(a + n_h, b + sum_{l>h} n_l) conditional.
    """
    config = config or _default_model_config(state, data)
    if not 0.0 < value < 1.0:
        return -np.inf
    sticks = state.sticks
    w_col = kernel_weight(data.frequencies, sticks.knots[h], sticks.xi, sticks.kernel_kind)
    members = state.alloc == h
    tail = state.alloc > h
    return (
        (sticks.a - 1.0) * math.log(value)
        + (sticks.b - 1.0) * math.log1p(-value)
        + members.sum() * math.log(value)
        + float(np.log1p(-value * w_col[tail]).sum())
    )


def update_sticks_knots_bandwidth(
    state: ModelState,
    data: RegressionSample,
    rng: np.random.Generator,
    config: ModelConfig | None = None,
    scales=None,
    accept: dict | None = None,
    weights_out: dict | None = None,
) -> ModelState:
    """MH updates for V_h, psi_h, xi, nu, a, b and sigma2_theta.

    Sticks and knots use plain random walks whose proposals are rejected
    outside the support; given allocations their conditionals factorise over
    components, so all coordinates move in one vectorised pass.  The final
    stick is pinned to one and the final knot (which never enters the
    weights) is refreshed from its uniform prior.

    When ``weights_out`` is given, the mixture log-weight matrix for the
    updated sticks is stored under ``"log_weights"`` for reuse by the next
    allocation step.
    """
    config = config or _default_model_config(state, data)
    scales = scales if scales is not None else {}
    sticks = state.sticks
    kind = sticks.kernel_kind
    lam = data.frequencies
    h = len(sticks.v)
    m = len(data)
    free = h - 1

    n_h = np.bincount(state.alloc, minlength=h).astype(float)
    cols = np.arange(free)
    tail_mask = state.alloc[:, None] > cols
    member_mask = state.alloc[:, None] == cols

    dist = np.abs(lam[:, None] - sticks.knots[None, :free])
    log_w = _log_kernel(dist, sticks.xi, kind)
    w = np.exp(log_w)

    # --- sticks V_h, h < H-1 (random walk, support (0,1) enforced by rejection)
    v = sticks.v[:free]
    stick_scale = scales.get("stick", DEFAULT_PROPOSAL_SCALES["stick"])
    v_prop = v + stick_scale * rng.standard_normal(free)
    inside = (v_prop > 0.0) & (v_prop < 1.0)
    v_safe = np.where(inside, v_prop, 0.5)
    surv_cur = np.log1p(-v * w)
    surv_prop = np.log1p(-v_safe * w)
    delta = (
        (sticks.a - 1.0 + n_h[:free]) * (np.log(v_safe) - np.log(v))
        + (sticks.b - 1.0) * (np.log1p(-v_safe) - np.log1p(-v))
        + ((surv_prop - surv_cur) * tail_mask).sum(axis=0)
    )
    delta = np.where(inside, delta, -np.inf)
    v_acc = np.log(1.0 - rng.random(free)) < delta
    v_new = np.concatenate((np.where(v_acc, v_prop, v), [1.0]))
    vfree = v_new[:free]
    surv = np.where(v_acc, surv_prop, surv_cur)  # survival terms at v_new

    # --- knots psi_h, h < H-1 (random walk, uniform prior on the band)
    knot_scale = scales.get("knot", DEFAULT_PROPOSAL_SCALES["knot"])
    psi = sticks.knots[:free]
    psi_prop = psi + knot_scale * rng.standard_normal(free)
    inside = (psi_prop >= config.lambda_min) & (psi_prop <= config.lambda_max)
    psi_safe = np.where(inside, psi_prop, psi)
    dist_prop = np.abs(lam[:, None] - psi_safe[None, :])
    log_w_prop = _log_kernel(dist_prop, sticks.xi, kind)
    w_prop = np.exp(log_w_prop)
    surv_knot = np.log1p(-vfree * w_prop)
    delta = (
        ((log_w_prop - log_w) * member_mask).sum(axis=0)
        + ((surv_knot - surv) * tail_mask).sum(axis=0)
    )
    delta = np.where(inside, delta, -np.inf)
    psi_acc = np.log(1.0 - rng.random(free)) < delta
    psi_new = np.concatenate(
        (np.where(psi_acc, psi_prop, psi),
         [rng.uniform(config.lambda_min, config.lambda_max)])
    )
    dist = np.where(psi_acc, dist_prop, dist)
    log_w = np.where(psi_acc, log_w_prop, log_w)
    surv = np.where(psi_acc, surv_knot, surv)

    # --- kernel bandwidth xi (MH on the log scale, Jacobian included).
    # The allocation log-probability splits into a member term (log w at each
    # observation's own component) and a survival term (sum of log(1 - Vw)
    # over earlier components); the log v terms cancel in the MH ratio.
    member_cur = float((log_w * member_mask).sum())
    tail_cur = float((surv * tail_mask).sum())
    ig_scale = state.nu**2 / 2.0

    xi_scale = scales.get("xi", DEFAULT_PROPOSAL_SCALES["xi"])
    xi_prop = sticks.xi * math.exp(xi_scale * rng.standard_normal())
    log_w_xi = _log_kernel(dist, xi_prop, kind)
    surv_xi = np.log1p(-vfree * np.exp(log_w_xi))
    member_prop = float((log_w_xi * member_mask).sum())
    tail_prop = float((surv_xi * tail_mask).sum())
    delta_xi = (
        member_prop + tail_prop
        + _invgamma_logpdf(xi_prop, config.xi_shape, ig_scale) + math.log(xi_prop)
        - member_cur - tail_cur
        - _invgamma_logpdf(sticks.xi, config.xi_shape, ig_scale) - math.log(sticks.xi)
    )
    xi_acc = _log_uniform(rng) < delta_xi
    if xi_acc:
        xi_new = xi_prop
        log_w = log_w_xi
        surv = surv_xi
    else:
        xi_new = sticks.xi

    # --- nu (flat on (0,1); enters only through the bandwidth prior)
    nu_scale = scales.get("nu", DEFAULT_PROPOSAL_SCALES["nu"])
    nu_prop = state.nu + nu_scale * rng.standard_normal()
    if 0.0 < nu_prop < 1.0:
        delta_nu = _invgamma_logpdf(xi_new, config.xi_shape, nu_prop**2 / 2.0) - _invgamma_logpdf(
            xi_new, config.xi_shape, state.nu**2 / 2.0
        )
        nu_acc = _log_uniform(rng) < delta_nu
    else:
        nu_acc = False
    nu_new = nu_prop if nu_acc else state.nu

    # --- shared Beta hyperparameters a, b (flat on the configured box)
    log_v_sum = float(np.log(vfree).sum())
    log_1mv_sum = float(np.log1p(-vfree).sum())

    def beta_loglik(a_val: float, b_val: float) -> float:
        return (
            (a_val - 1.0) * log_v_sum
            + (b_val - 1.0) * log_1mv_sum
            - free * float(betaln(a_val, b_val))
        )

    a_scale = scales.get("a", DEFAULT_PROPOSAL_SCALES["a"])
    a_prop = sticks.a + a_scale * rng.standard_normal()
    if config.stick_ab_min < a_prop < config.stick_ab_max:
        a_acc = _log_uniform(rng) < beta_loglik(a_prop, sticks.b) - beta_loglik(sticks.a, sticks.b)
    else:
        a_acc = False
    a_new = a_prop if a_acc else sticks.a

    b_scale = scales.get("b", DEFAULT_PROPOSAL_SCALES["b"])
    b_prop = sticks.b + b_scale * rng.standard_normal()
    if config.stick_ab_min < b_prop < config.stick_ab_max:
        b_acc = _log_uniform(rng) < beta_loglik(a_new, b_prop) - beta_loglik(a_new, sticks.b)
    else:
        b_acc = False
    b_new = b_prop if b_acc else sticks.b

    # --- base variance of the atom means (MH on the log scale)
    st_scale = scales.get("sigma2_theta", DEFAULT_PROPOSAL_SCALES["sigma2_theta"])
    s2_prop = state.sigma2_theta * math.exp(st_scale * rng.standard_normal())
    mu_sq = float((state.atoms.mu**2).sum())

    def s2_target(s2: float) -> float:
        return (
            -0.5 * len(state.atoms) * math.log(s2)
            - 0.5 * mu_sq / s2
            + _invgamma_logpdf(s2, config.base_var_shape, config.base_var_scale)
            + math.log(s2)
        )

    s2_acc = _log_uniform(rng) < s2_target(s2_prop) - s2_target(state.sigma2_theta)
    s2_new = s2_prop if s2_acc else state.sigma2_theta

    if accept is not None:
        accept["stick"] = v_acc.astype(float)
        accept["knot"] = psi_acc.astype(float)
        accept["xi"] = float(xi_acc)
        accept["nu"] = float(nu_acc)
        accept["a"] = float(a_acc)
        accept["b"] = float(b_acc)
        accept["sigma2_theta"] = float(s2_acc)

    if weights_out is not None:
        # log p_h(lam_j) for the new sticks: log(V w) plus cumulative survival.
        logp = np.empty((m, h))
        logp[:, :free] = np.log(vfree) + log_w
        logp[:, 1:free] += np.cumsum(surv[:, :-1], axis=1)
        logp[:, free] = surv.sum(axis=1)
        weights_out["log_weights"] = logp

    new_sticks = StickState(v=v_new, knots=psi_new, xi=float(xi_new),
                            kernel_kind=kind, a=float(a_new), b=float(b_new))
    return replace(state, sticks=new_sticks, nu=float(nu_new), sigma2_theta=float(s2_new))


def _invgamma_logpdf(x: float, shape: float, scale: float) -> float:
    if x <= 0.0 or scale <= 0.0:
        return -np.inf
    return shape * math.log(scale) - float(gammaln(shape)) - (shape + 1.0) * math.log(x) - scale / x


def _log_uniform(rng: np.random.Generator) -> float:
    # 1 - U lies in (0, 1], keeping the log finite.
    return math.log(1.0 - rng.random())


# ---------------------------------------------------------------------------
# regression coefficients


def cd_conditional(
    state: ModelState,
    data: RegressionSample,
    config: ModelConfig | None = None,
):
    """Mean and covariance of the Gaussian conditional for (c, d).

    Conditional on allocations the residual model is linear with known
    heteroscedastic variances; the N(0, c_prior_var) prior on c adds to the
    precision and d carries a flat prior inside its support.
    """
    config = config or _default_model_config(state, data)
    atoms = state.atoms
    means = np.where(state.subcomp == 0, atoms.mu[state.alloc], atoms.mu2[state.alloc])
    variances = np.where(
        state.subcomp == 0, atoms.sigma1[state.alloc] ** 2, atoms.sigma2[state.alloc] ** 2
    )
    weights = 1.0 / variances
    x = data.regressors
    r = data.responses - means
    sw = float(weights.sum())
    swx = float((weights * x).sum())
    swxx = float((weights * x * x).sum())
    swr = float((weights * r).sum())
    swxr = float((weights * x * r).sum())
    precision = np.array([[sw + 1.0 / config.c_prior_var, swx], [swx, swxx]])
    cov = np.linalg.inv(precision)
    mean = cov @ np.array([swr, swxr])
    return mean, cov


def update_cd(
    state: ModelState,
    data: RegressionSample,
    rng: np.random.Generator,
    config: ModelConfig | None = None,
) -> ModelState:
    """Draw (c, d) exactly: inverse-CDF on the truncated d-marginal, then c|d."""
    config = config or _default_model_config(state, data)
    mean, cov = cd_conditional(state, data, config)
    sd_d = math.sqrt(max(cov[1, 1], 0.0))
    if sd_d <= 0.0 or not np.isfinite(sd_d):
        raise NumericError("degenerate (c, d) conditional covariance")
    lo = float(ndtr((config.d_low - mean[1]) / sd_d))
    hi = float(ndtr((config.d_high - mean[1]) / sd_d))
    mass = hi - lo
    if not np.isfinite(mass) or mass <= 1e-300:
        raise NumericError(
            "the (c, d) conditional places no mass on d in (-1, 1/2); "
            "the chain reached a pathological state"
        )
    quantile = float(np.clip(lo + rng.random() * mass, 5e-324, 1.0 - 1e-16))
    d_new = mean[1] + sd_d * float(ndtri(quantile))
    d_new = float(np.clip(d_new,
                          np.nextafter(config.d_low, config.d_high),
                          np.nextafter(config.d_high, config.d_low)))
    slope = cov[0, 1] / cov[1, 1]
    c_mean = mean[0] + slope * (d_new - mean[1])
    c_var = max(cov[0, 0] - cov[0, 1] ** 2 / cov[1, 1], 0.0)
    c_new = c_mean + math.sqrt(c_var) * rng.standard_normal()
    return replace(state, c=float(c_new), d=d_new)


# ---------------------------------------------------------------------------
# sweep and chain driver


def gibbs_sweep(
    state: ModelState,
    data: RegressionSample,
    rng: np.random.Generator,
    config: ModelConfig | None = None,
    scales=None,
    accept: dict | None = None,
    weights_cache: dict | None = None,
) -> ModelState:
    """One full sweep: allocations -> atoms -> sticks/knots/bandwidth -> (c, d).

    ``weights_cache`` (if given) carries the mixture log-weight matrix from
    one sweep's stick update to the next sweep's allocation step.
    """
    config = config or _default_model_config(state, data)
    cached = weights_cache.pop("log_weights", None) if weights_cache is not None else None
    state = update_allocations(state, data, rng, config, log_weights=cached)
    state = update_atoms(state, data, rng, config, scales, accept)
    state = update_sticks_knots_bandwidth(
        state, data, rng, config, scales, accept, weights_out=weights_cache
    )
    state = update_cd(state, data, rng, config)
    return state


def _initial_scales(config: ChainConfig) -> dict:
    h = config.h_components
    return {
        "mu": np.full(h, config.scale_for("mu")),
        "pi": np.full(h, config.scale_for("pi")),
        "stick": np.full(h - 1, config.scale_for("stick")),
        "knot": np.full(h - 1, config.scale_for("knot")),
        "xi": config.scale_for("xi"),
        "nu": config.scale_for("nu"),
        "a": config.scale_for("a"),
        "b": config.scale_for("b"),
        "sigma2_theta": config.scale_for("sigma2_theta"),
    }


def run_chain(
    data: RegressionSample,
    config: ChainConfig,
    model_config: ModelConfig | None = None,
) -> PosteriorDraws:
    """Run the blocked Gibbs sampler and return post-burn-in thinned draws.

    Reproducible: identical (data, config) give bitwise-identical draws.
    Numeric failures are re-raised with the offending iteration index.
    """
    model_config = model_config or model_config_for(data, config)
    rng = np.random.default_rng(config.seed)
    state = init_state(data, config, config.seed)
    adapter = ScaleAdapter(_initial_scales(config), config.target_accept)
    if not config.adapt:
        adapter.freeze()

    kept = config.kept_draws
    d_draws = np.empty(kept)
    c_draws = np.empty(kept)
    extras = (
        {name: np.empty(kept) for name in ("xi", "nu", "a", "b", "sigma2_theta")}
        if config.store_full_state
        else None
    )
    acc_sum: dict[str, float] = {}
    acc_count: dict[str, float] = {}
    weights_cache: dict = {}

    idx = 0
    for it in range(1, config.iterations + 1):
        accept: dict = {}
        try:
            state = gibbs_sweep(
                state, data, rng, model_config, adapter.scales, accept, weights_cache
            )
        except NumericError as exc:
            raise NumericError(f"iteration {it}: {exc}") from exc

        for block, acc in accept.items():
            arr = np.asarray(acc, dtype=float)
            acc_sum[block] = acc_sum.get(block, 0.0) + float(np.nansum(arr))
            acc_count[block] = acc_count.get(block, 0.0) + float(np.sum(np.isfinite(arr)))
            if it <= config.burn_in:
                adapter.update(block, np.nan_to_num(arr, nan=config.target_accept), it)
        if it == config.burn_in:
            adapter.freeze()

        if it > config.burn_in and (it - config.burn_in) % config.thin == 0:
            d_draws[idx] = state.d
            c_draws[idx] = state.c
            if extras is not None:
                extras["xi"][idx] = state.sticks.xi
                extras["nu"][idx] = state.nu
                extras["a"][idx] = state.sticks.a
                extras["b"][idx] = state.sticks.b
                extras["sigma2_theta"][idx] = state.sigma2_theta
            idx += 1

    acceptance = {
        block: (acc_sum[block] / acc_count[block] if acc_count[block] else float("nan"))
        for block in acc_sum
    }
    return PosteriorDraws(
        d=d_draws, c=c_draws, acceptance=acceptance, seed=config.seed,
        iterations=config.iterations, burn_in=config.burn_in, thin=config.thin,
        extras=extras,
    )
