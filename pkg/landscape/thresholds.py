"""
Closed-form thresholds on h and lower bounds on the multiplier.

All functions are for the supercritical regime p > 2 + 8/N, where
p gamma_p > 4 and N (p - 2) - 4 > 0.
"""

from typing import Optional, Tuple

from functionals.params import KirchhoffParams


def _require_supercritical(params: KirchhoffParams) -> None:
    if params.regime != "supercritical":
        raise ValueError(f"thresholds need p > {params.p_bar:.6g}, got p={params.p}")


def landscape_coefficients(
    params: KirchhoffParams, c_np: float, norm_pq: float
) -> Tuple[float, float]:
    """
    Coefficients of phi(t) = a/2 t^2 - k1 t^{p gamma_p} - k2 t^{q gamma_p}.

    k1 = C^p c^{(p - p gamma_p)/2} / p, k2 = C^q c^{q (1 - gamma_p)/2} ||h||_{p/(p-q)} / q.
    """
    g = params.gamma_p
    p, q, c = params.p, params.q, params.c
    k1 = c_np**p * c ** ((p - p * g) / 2.0) / p
    k2 = c_np**q * c ** (q * (1.0 - g) / 2.0) * norm_pq / q
    return k1, k2


def t_bar(params: KirchhoffParams, c_np: float) -> float:
    """Maximizer of psi(t) = a/2 t^{2 - q gamma_p} - k1 t^{p gamma_p - q gamma_p}."""
    _require_supercritical(params)
    g = params.gamma_p
    p, q, c, a = params.p, params.q, params.c, params.a
    base = (a * p * (2.0 - q * g)) / (
        2.0 * g * (p - q) * c_np**p * c ** ((p - p * g) / 2.0)
    )
    return base ** (1.0 / (p * g - 2.0))


def psi_t_bar(params: KirchhoffParams, c_np: float) -> float:
    """psi at its global maximum, a/2 t_bar^{2 - q gamma_p} (p gamma_p - 2) / (gamma_p (p - q))."""
    g = params.gamma_p
    p, q = params.p, params.q
    tb = t_bar(params, c_np)
    return 0.5 * params.a * tb ** (2.0 - q * g) * (p * g - 2.0) / (g * (p - q))


def landscape_threshold(params: KirchhoffParams, c_np: float) -> float:
    """Bound on ||h||_{p/(p-q)} below which phi is positive somewhere."""
    g = params.gamma_p
    q = params.q
    return q * psi_t_bar(params, c_np) / (c_np**q * params.c ** (q * (1.0 - g) / 2.0))


def radial_derivative_threshold(params: KirchhoffParams, m_c: float) -> float:
    """Bound on ||x . grad h||_{2/(2-q)}: q (2p - Np + 2N) / (p - 2) m_c c^{-q/2}."""
    _require_supercritical(params)
    p, q, n = params.p, params.q, params.dim
    return q * (2.0 * p - n * p + 2.0 * n) / (p - 2.0) * m_c * params.c ** (-q / 2.0)


def linking_threshold(
    params: KirchhoffParams, m_c: float, upsilon: Optional[float]
) -> Optional[float]:
    """
    Bound on ||hbar||_{2/(2-q)} for the linking geometry.

    min{1, 2p(1 - gamma_p) / (2(p - q) + (p - 2) upsilon)} q m_c c^{-q/2};
    None when upsilon is unbounded.
    """
    _require_supercritical(params)
    if upsilon is None:
        return None
    p, q = params.p, params.q
    factor = min(
        1.0,
        2.0 * p * (1.0 - params.gamma_p) / (2.0 * (p - q) + (p - 2.0) * upsilon),
    )
    return factor * q * m_c * params.c ** (-q / 2.0)


def linking_upper_bound(params: KirchhoffParams, m_c: float, norm_hbar: float) -> float:
    """m_c + ||hbar||_{2/(2-q)} c^{q/2} / q."""
    return m_c + norm_hbar * params.c ** (params.q / 2.0) / params.q


def mountain_pass_multiplier_bound(
    params: KirchhoffParams, level: float, radial_norm: float
) -> float:
    """
    Lower bound on lambda for a mountain-pass solution at `level`.

    lambda c >= 4p(1 - gamma_p)/(N(p-2) - 4) level
                - (2p - 4)/(q (N(p-2) - 4)) ||x . grad h|| c^{q/2}
    """
    _require_supercritical(params)
    p, q, n, c = params.p, params.q, params.dim, params.c
    gap = n * (p - 2.0) - 4.0
    bound = 4.0 * p * (1.0 - params.gamma_p) / gap * level - (2.0 * p - 4.0) / (
        q * gap
    ) * radial_norm * c ** (q / 2.0)
    return bound / c


def linking_multiplier_bound(
    params: KirchhoffParams, m_c: float, norm_hbar: float, upsilon: Optional[float]
) -> float:
    """
    Lower bound on lambda for the linking solution.

    lambda c >= 2/(N(p-2) - 4) (2p(1 - gamma_p) m_c - 2(p - q)/q ||hbar|| c^{q/2}
                                - (p - 2)/q upsilon ||hbar|| c^{q/2})
    """
    _require_supercritical(params)
    if upsilon is None:
        raise ValueError("linking multiplier bound needs a finite upsilon")
    p, q, n, c = params.p, params.q, params.dim, params.c
    gap = n * (p - 2.0) - 4.0
    term = norm_hbar * c ** (q / 2.0)
    bound = (2.0 / gap) * (
        2.0 * p * (1.0 - params.gamma_p) * m_c
        - 2.0 * (p - q) / q * term
        - (p - 2.0) / q * upsilon * term
    )
    return bound / c
