"""Analytic derivatives of the weighted chain objective.

Per stage, writing z(y) = w(y).x + b(y), Q = sigmoid(z), S = sum_y Q and
P = Q/S, the derivative of any function F of the posterior row follows from

    dP(y)/dz(y') = (1{y=y'} - P(y)) * Q(y')(1-Q(y')) / S,

so dF/dz(y) = Q(y)(1-Q(y))/S * (u(y) - sum_i u(i) P(i)) with u = dF/dP.
The weight gradient contracts that z-sensitivity with the input vector, the
bias gradient sums it, and the input sensitivity contracts it with the
weight vectors; the direct (posterior held fixed) input derivative of the
two bound terms is 4 * p_x * (x - sum_y P(y) recon(y)).

In a chain, stage l's input is stage l-1's posterior vector, so stage l's
input sensitivity is exactly the extra posterior sensitivity that stage l-1
must absorb; gradients are accumulated stage by stage in reverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, InvalidModelError
from .model import ChainModel, StageModel
from .objective import Dataset, chain_objective, _check_stage_data


@dataclass
class StageGradient:
    """Gradients mirroring one stage: g_w (M, d), g_b (M,), g_x (M, d).

    g_x is the gradient with respect to the reconstruction vectors.
    """

    g_w: np.ndarray
    g_b: np.ndarray
    g_x: np.ndarray


@dataclass
class ChainGradient:
    per_stage: list = field(default_factory=list)


def _stage_gradient(stage: StageModel, X: np.ndarray, w: np.ndarray,
                    stage_weight: float, posterior_sensitivity=None):
    """Gradient arrays plus the (N, dim_in) input sensitivity."""
    n = stage.n
    R = stage.recon
    Q = stage.q_batch(X)
    S = Q.sum(axis=1, keepdims=True)
    P = Q / S

    diff = X[:, None, :] - R[None, :, :]
    sq = np.einsum("nmd,nmd->nm", diff, diff)
    e = X - P @ R

    c_post = (2.0 / n) * sq - (4.0 * (n - 1) / n) * (e @ R.T)
    u = stage_weight * w[:, None] * c_post
    if posterior_sensitivity is not None:
        u = u + posterior_sensitivity
    ubar = np.einsum("nm,nm->n", u, P)
    zsens = Q * (1.0 - Q) / S * (u - ubar[:, None])

    g_w = zsens.T @ X
    g_b = zsens.sum(axis=0)

    wp = w[:, None] * P
    col = wp.sum(axis=0)
    g_x = stage_weight * (
        -(4.0 / n) * (wp.T @ X - col[:, None] * R)
        - (4.0 * (n - 1) / n) * (wp.T @ e)
    )

    x_sens = 4.0 * stage_weight * w[:, None] * e + zsens @ stage.weights
    return StageGradient(g_w=g_w, g_b=g_b, g_x=g_x), x_sens


def stage_gradient_local(stage: StageModel, data: Dataset, stage_weight: float = 1.0,
                         posterior_sensitivity=None):
    """Exact gradient of stage_weight * (d1 + d2) of one stage.

    `posterior_sensitivity`, when given, is the gradient of later-stage
    objective terms with respect to this stage's posterior outputs (one row
    per data vector); it is folded into the returned parameter gradients and
    input sensitivities.  Returns (StageGradient, input sensitivity (N, d)),
    the latter being what the preceding stage consumes as its own
    posterior sensitivity.
    """
    _check_stage_data(stage, data)
    if posterior_sensitivity is not None:
        ps = np.asarray(posterior_sensitivity, dtype=np.float64)
        if ps.shape != (len(data), stage.M):
            raise InvalidInputError(
                f"posterior_sensitivity must have shape {(len(data), stage.M)}"
            )
        posterior_sensitivity = ps
    return _stage_gradient(stage, data.vectors, data.weights,
                           float(stage_weight), posterior_sensitivity)


def chain_gradient(chain: ChainModel, data: Dataset) -> ChainGradient:
    """Gradient of sum_l s_l (d1_l + d2_l) for every parameter of every stage."""
    if data.dim != chain.stages[0].dim_in:
        raise InvalidModelError(
            f"dataset dimension {data.dim} != first stage dim_in {chain.stages[0].dim_in}"
        )
    inputs = chain.stage_inputs(data.vectors)
    grads = [None] * chain.num_stages
    sens = None
    for l in range(chain.num_stages - 1, -1, -1):
        grads[l], sens = _stage_gradient(
            chain.stages[l], inputs[l], data.weights,
            float(chain.stage_weights[l]), sens,
        )
    return ChainGradient(per_stage=grads)


PARAM_KINDS = ("weights", "biases", "recon")
_GRAD_FIELDS = {"weights": "g_w", "biases": "g_b", "recon": "g_x"}


@dataclass
class FdCheckReport:
    """Worst relative discrepancy per (stage, parameter kind)."""

    entries: list
    step: float
    tolerance: float
    passed: bool

    def format_table(self) -> str:
        lines = [f"{'stage':<7}" + "".join(f"{k:<14}" for k in PARAM_KINDS)]
        for l in range(0, max(s for s, _, _ in self.entries) + 1):
            row = {k: e for s, k, e in self.entries if s == l}
            lines.append(f"{l + 1:<7}" + "".join(f"{row[k]:<14.3e}" for k in PARAM_KINDS))
        worst = max(e for _, _, e in self.entries)
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"worst {worst:.3e} vs tolerance {self.tolerance:.1e}: {verdict}")
        return "\n".join(lines)


def _discrepancy(analytic: float, numeric: float, abs_floor: float) -> float:
    d = abs(analytic - numeric)
    if d <= abs_floor:
        return 0.0
    return d / max(abs(analytic), abs(numeric))


def finite_difference_check(chain: ChainModel, data: Dataset, step: float = 1e-5,
                            tolerance: float = 1e-4, abs_floor: float = 1e-8,
                            gradient: ChainGradient = None) -> FdCheckReport:
    """Compare analytic gradients against central finite differences.

    Every scalar parameter is perturbed by +/-step; a component passes if
    |analytic - numeric| <= abs_floor or if the relative discrepancy stays
    below `tolerance`.  Cost is two objective evaluations per parameter.
    """
    if step <= 0:
        raise InvalidInputError("step must be > 0")
    if gradient is None:
        gradient = chain_gradient(chain, data)
    work = chain.copy()
    entries = []
    for l, stage in enumerate(work.stages):
        grad = gradient.per_stage[l]
        for kind in PARAM_KINDS:
            params = getattr(stage, kind)
            analytic = getattr(grad, _GRAD_FIELDS[kind])
            worst = 0.0
            flat = params.reshape(-1)
            aflat = np.asarray(analytic).reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + step
                f_plus = chain_objective(work, data).total
                flat[i] = orig - step
                f_minus = chain_objective(work, data).total
                flat[i] = orig
                numeric = (f_plus - f_minus) / (2.0 * step)
                worst = max(worst, _discrepancy(aflat[i], numeric, abs_floor))
            entries.append((l, kind, worst))
    passed = all(e <= tolerance for _, _, e in entries)
    return FdCheckReport(entries=entries, step=step, tolerance=tolerance, passed=passed)
