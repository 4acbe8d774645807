"""Closed-form recovery-error bounds and machine-checked certificates.

Each supported bound is keyed by a theorem id describing the regime it
covers.  ``theorem_constants`` evaluates the bound's constants from the
order-ceil(1.5k) isometry constant ``delta`` and the (k, ceil(1.5k))
orthogonality constant ``theta`` (or from the coherence for the MIP
route), gated on the condition ``delta + theta < 1`` that all of them
share.  ``certify`` then compares a recovered vector's l2 error against
the bound and issues a pass/fail certificate.

Theorem ids
-----------
noiseless     exact/approximate recovery of the equality-constrained
              program; bound C0 * ||tail||_1 / sqrt(k)
ds_bounded    correlation-bounded noise, constraint level lam;
              bound C1 sqrt(k) lam + C2 ||tail||_1 / sqrt(k)
l2_bounded    l2-bounded noise (||z|| <= eps), budget eta >= eps;
              bound C (eta + eps) [+ D2 tail term when not k-sparse]
mip_l2        same program, constants from the coherence alone via t = kM
ds_gaussian   Gaussian noise at lam = sigma sqrt(2 log p)
l2_gaussian   Gaussian noise at eta = eps = sigma sqrt(n + 2 sqrt(n log n))
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import SparseSignal, best_k_term
from .validation import check_vector

CERT_SLACK = 1e-9
SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)

THEOREMS = (
    "noiseless",
    "ds_bounded",
    "l2_bounded",
    "mip_l2",
    "ds_gaussian",
    "l2_gaussian",
)

COMPARISON_SOURCES = ("det", "crt06", "ct07")


class UnknownTheoremError(KeyError):
    pass


class CertificateError(ValueError):
    """The requested certificate is outside what the bound covers."""


@dataclass(frozen=True)
class ConstantSet:
    """Evaluated constants for one theorem, or condition_ok=False."""

    theorem: str
    inputs: dict
    constants: dict
    condition_ok: bool


@dataclass(frozen=True)
class BoundCertificate:
    theorem: str
    bound_value: float
    observed_error: float
    tail_term: float
    holds: bool
    advisory: bool
    inputs_digest: dict


def _gate(delta, theta):
    if delta is None or theta is None:
        raise ValueError("this theorem needs both delta and theta")
    if delta < 0 or theta < 0:
        raise ValueError("delta and theta must be nonnegative")
    return delta + theta < 1.0


def theorem_constants(
    theorem: str,
    delta: float | None = None,
    theta: float | None = None,
    coherence: float | None = None,
    k: int = 1,
    inputs_exact: bool = True,
) -> ConstantSet:
    """Evaluate one theorem's constants; no constants when the gate fails."""
    if theorem not in THEOREMS:
        raise UnknownTheoremError(theorem)
    if k < 1:
        raise ValueError("k must be >= 1")
    inputs = {"k": k, "exact": bool(inputs_exact)}
    constants: dict = {}

    if theorem == "mip_l2":
        if coherence is None:
            raise ValueError("mip_l2 needs the coherence")
        if coherence < 0:
            raise ValueError("coherence must be nonnegative")
        t = k * coherence
        inputs.update({"coherence": coherence, "t": t})
        ok = t < (2.0 + 2.0 * coherence) / (3.0 + SQRT6)
        if ok:
            constants["C"] = (
                SQRT2 * (2.0 + 3.0 * t - 2.0 * coherence)
                / (2.0 + 2.0 * coherence - (3.0 + SQRT6) * t)
            )
        return ConstantSet(theorem, inputs, constants, ok)

    ok = _gate(delta, theta)
    inputs.update({"delta": delta, "theta": theta})
    if not ok:
        return ConstantSet(theorem, inputs, {}, False)
    den = 1.0 - delta - theta
    if theorem == "noiseless":
        constants["C0"] = 2.0 * SQRT2 * (1.0 - delta) / den
    elif theorem in ("ds_bounded", "ds_gaussian"):
        constants["C1"] = 2.0 * SQRT3 / den
        constants["C2"] = 2.0 * SQRT2 * (1.0 - delta) / den
    elif theorem == "l2_bounded":
        constants["C"] = SQRT2 * (1.0 + delta) / den
        constants["D2"] = 2.0 * SQRT2 * theta * (1.0 - delta) / den
    else:  # l2_gaussian
        constants["D1"] = 2.0 * SQRT2 * (1.0 + delta) / den
        constants["D2"] = 2.0 * SQRT2 * theta * (1.0 - delta) / den
    return ConstantSet(theorem, inputs, constants, True)


def comparison_constants(source: str, inputs: dict, corrected: bool = True) -> ConstantSet:
    """Constants of earlier published bounds, for side-by-side comparison.

    det    coherence-based l2-bounded-noise constant
           C = 1 / sqrt(1 - M (4k - 1)), valid while M (4k - 1) < 1
    crt06  isometry-based constant 4 / (sqrt(3 - 3 d4) - sqrt(1 + d3)),
           valid while d3 + 3 d4 < 2 (inputs delta_3k, delta_4k)
    ct07   Gaussian-regime constant 4 / (1 - delta_2k - theta_k_2k);
           ``corrected=False`` reproduces the originally printed
           denominator 1 - delta_k - theta_k_2k
    """
    if source not in COMPARISON_SOURCES:
        raise UnknownTheoremError(source)
    constants: dict = {}
    if source == "det":
        M, k = float(inputs["coherence"]), int(inputs["k"])
        if M < 0 or k < 1:
            raise ValueError("need coherence >= 0 and k >= 1")
        ok = M * (4 * k - 1) < 1.0
        if ok:
            constants["C"] = 1.0 / math.sqrt(1.0 - M * (4 * k - 1))
        return ConstantSet(source, dict(inputs), constants, ok)
    if source == "crt06":
        d3, d4 = float(inputs["delta_3k"]), float(inputs["delta_4k"])
        if d3 < 0 or d4 < 0:
            raise ValueError("delta inputs must be nonnegative")
        ok = d3 + 3.0 * d4 < 2.0
        if ok:
            constants["C"] = 4.0 / (math.sqrt(3.0 - 3.0 * d4) - math.sqrt(1.0 + d3))
        return ConstantSet(source, dict(inputs), constants, ok)
    # ct07
    d2k = float(inputs["delta_2k"])
    th = float(inputs["theta_k_2k"])
    if corrected:
        den = 1.0 - d2k - th
    else:
        den = 1.0 - float(inputs["delta_k"]) - th
    ok = (d2k + th < 1.0) and den > 0.0
    if ok:
        constants["C1"] = 4.0 / den
    out = dict(inputs)
    out["corrected"] = corrected
    return ConstantSet(source, out, constants, ok)


def support_enlargement_ratio(coherence: float) -> float:
    """Admissible-sparsity ratio of the mip_l2 route over the det bound.

    Equals 8 / (3 + sqrt(6)) for every coherence in (0, 1).
    """
    if not 0.0 < coherence:
        raise ValueError("coherence must be positive")
    ours = (2.0 + 2.0 * coherence) / ((3.0 + SQRT6) * coherence)
    det = (1.0 + coherence) / (4.0 * coherence)
    return ours / det


def certify(
    result,
    truth: SparseSignal,
    theorem: str,
    constants: ConstantSet,
    noise: dict | None = None,
) -> BoundCertificate:
    """Compare a recovered vector's l2 error to the theorem bound.

    ``noise`` supplies the regime parameters the bound needs (keys among
    lam, eps, eta, sigma, n, p).  Refuses to certify when the condition
    gate failed; a certificate built from non-exact constants is marked
    advisory.
    """
    if theorem not in THEOREMS:
        raise UnknownTheoremError(theorem)
    if constants.theorem != theorem:
        raise CertificateError(
            f"constants are for {constants.theorem!r}, not {theorem!r}"
        )
    if not constants.condition_ok:
        raise CertificateError("condition gate failed; nothing to certify")
    noise = noise or {}
    k = int(constants.inputs["k"])
    beta = check_vector(truth.values, name="truth")
    gamma = check_vector(result.gamma_hat, length=beta.size, name="gamma_hat")
    _, rest = best_k_term(beta, k)
    tail = float(np.abs(rest).sum()) / math.sqrt(k)
    c = constants.constants

    if theorem == "noiseless":
        bound = c["C0"] * tail
    elif theorem == "ds_bounded":
        lam = _need(noise, "lam", theorem)
        bound = c["C1"] * math.sqrt(k) * lam + c["C2"] * tail
    elif theorem == "l2_bounded":
        eta = _need(noise, "eta", theorem)
        eps = _need(noise, "eps", theorem)
        if eta < eps:
            raise CertificateError("bound needs eta >= eps")
        bound = c["C"] * (eta + eps) + c["D2"] * tail
    elif theorem == "mip_l2":
        if tail > 0.0:
            raise CertificateError("mip_l2 covers exactly k-sparse truths only")
        eta = _need(noise, "eta", theorem)
        eps = _need(noise, "eps", theorem)
        if eta < eps:
            raise CertificateError("bound needs eta >= eps")
        bound = c["C"] * (eta + eps)
    elif theorem == "ds_gaussian":
        sigma = _need(noise, "sigma", theorem)
        p = int(_need(noise, "p", theorem))
        bound = c["C1"] * sigma * math.sqrt(2.0 * k * math.log(p)) + c["C2"] * tail
    else:  # l2_gaussian
        sigma = _need(noise, "sigma", theorem)
        n = int(_need(noise, "n", theorem))
        bound = (
            c["D1"] * sigma * math.sqrt(n + 2.0 * math.sqrt(n * math.log(n)))
            + c["D2"] * tail
        )

    observed = float(np.linalg.norm(gamma - beta))
    digest = dict(constants.inputs)
    digest["noise"] = dict(noise)
    return BoundCertificate(
        theorem=theorem,
        bound_value=float(bound),
        observed_error=observed,
        tail_term=tail,
        holds=bool(observed <= bound + CERT_SLACK),
        advisory=not constants.inputs.get("exact", True),
        inputs_digest=digest,
    )


def _need(noise: dict, key: str, theorem: str):
    if key not in noise or noise[key] is None:
        raise CertificateError(f"{theorem} needs noise parameter {key!r}")
    val = float(noise[key])
    if val < 0:
        raise CertificateError(f"noise parameter {key!r} must be nonnegative")
    return val
