"""Angular-momentum algebra: Clebsch-Gordan coefficients, Wigner d-matrices
and the angular part of the electric-dipole operator in the fine-structure
basis.

Everything here is exact apart from float roundoff; the factorial sums are
evaluated for the small angular momenta (j <= 9/2) that Rydberg pair
channels need, where double precision is ample.

Conventions:
    - Condon-Shortley phases throughout.
    - wigner_d_matrix(j, theta)[i', i] = <j m'| exp(-i theta J_y) |j m>
      with the basis ordered by increasing m (m = -j ... +j).
"""

from __future__ import annotations

import math

import numpy as np


def _two_j(value: float, name: str) -> int:
    """Angular momenta enter as integers or half-integers; return 2*value."""
    doubled = round(2 * value)
    if abs(doubled - 2 * value) > 1e-9:
        raise ValueError(f"{name}={value} is not an integer or half-integer")
    return doubled


def clebsch_gordan(j1: float, m1: float, j2: float, m2: float,
                   j3: float, m3: float) -> float:
    """Clebsch-Gordan coefficient <j1 m1 j2 m2 | j3 m3> (Racah's formula)."""
    tj1, tj2, tj3 = _two_j(j1, "j1"), _two_j(j2, "j2"), _two_j(j3, "j3")
    tm1, tm2, tm3 = _two_j(m1, "m1"), _two_j(m2, "m2"), _two_j(m3, "m3")
    if tm1 + tm2 != tm3:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tm3) > tj3:
        return 0.0
    if (tj1 + tm1) % 2 != 0 or (tj2 + tm2) % 2 != 0 or (tj3 + tm3) % 2 != 0:
        return 0.0
    # triangle rule, integer perimeter
    if tj3 < abs(tj1 - tj2) or tj3 > tj1 + tj2 or (tj1 + tj2 + tj3) % 2 != 0:
        return 0.0

    def fact(two_x: int) -> float:
        if two_x % 2 != 0 or two_x < 0:
            raise ValueError("factorial argument must be a non-negative integer")
        return math.factorial(two_x // 2)

    prefactor = (tj3 + 1) * (
        fact(tj1 + tj2 - tj3) * fact(tj1 - tj2 + tj3) * fact(-tj1 + tj2 + tj3)
        / fact(tj1 + tj2 + tj3 + 2)
    )
    prefactor *= (
        fact(tj3 + tm3) * fact(tj3 - tm3)
        * fact(tj1 - tm1) * fact(tj1 + tm1)
        * fact(tj2 - tm2) * fact(tj2 + tm2)
    )

    k_min = max(0, (tj2 - tj3 - tm1) // 2, (tj1 - tj3 + tm2) // 2)
    k_max = min((tj1 + tj2 - tj3) // 2, (tj1 - tm1) // 2, (tj2 + tm2) // 2)
    total = 0.0
    for k in range(k_min, k_max + 1):
        denom = (
            math.factorial(k)
            * fact(tj1 + tj2 - tj3 - 2 * k)
            * fact(tj1 - tm1 - 2 * k)
            * fact(tj2 + tm2 - 2 * k)
            * fact(tj3 - tj2 + tm1 + 2 * k)
            * fact(tj3 - tj1 - tm2 + 2 * k)
        )
        total += (-1.0) ** k / denom
    return math.sqrt(prefactor) * total


def wigner_d_element(j: float, m_to: float, m_from: float, theta: float) -> float:
    """Small Wigner matrix element d^j_{m_to, m_from}(theta).

    Equals <j m_to| exp(-i theta J_y) |j m_from>; explicit factorial sum.
    """
    tj = _two_j(j, "j")
    tmp = _two_j(m_to, "m_to")
    tm = _two_j(m_from, "m_from")
    if abs(tmp) > tj or abs(tm) > tj:
        return 0.0

    def fact(two_x: int) -> float:
        return math.factorial(two_x // 2)

    root = math.sqrt(
        fact(tj + tm) * fact(tj - tm) * fact(tj + tmp) * fact(tj - tmp)
    )
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    total = 0.0
    # k runs over all integers keeping the factorial arguments non-negative
    k_min = max(0, (tm - tmp) // 2)
    k_max = min((tj + tm) // 2, (tj - tmp) // 2)
    for k in range(k_min, k_max + 1):
        cos_exp = tj - 2 * k + (tm - tmp) // 2
        sin_exp = 2 * k - (tm - tmp) // 2
        denom = (
            fact(tj + tm - 2 * k) * math.factorial(k)
            * fact(tj - tmp - 2 * k) * fact(2 * k - tm + tmp)
        )
        total += (-1.0) ** (k + (tmp - tm) // 2) / denom * c**cos_exp * s**sin_exp
    return root * total


def wigner_d_matrix(j: float, theta: float) -> np.ndarray:
    """Full (2j+1) x (2j+1) rotation matrix about y, basis m = -j ... +j."""
    tj = _two_j(j, "j")
    dim = tj + 1
    out = np.zeros((dim, dim))
    for ip in range(dim):
        m_to = -j + ip
        for i in range(dim):
            m_from = -j + i
            out[ip, i] = wigner_d_element(j, m_to, m_from, theta)
    return out


def reduced_c1(l_from: int, l_to: int) -> float:
    """Reduced matrix element <l_to || C^1 || l_from> of the rank-1 spherical
    harmonic operator, Condon-Shortley convention."""
    return math.sqrt(2 * l_from + 1) * clebsch_gordan(l_from, 0, 1, 0, l_to, 0)


def angular_dipole_block(l_from: int, j_from: float, l_to: int, j_to: float,
                         q: int) -> np.ndarray:
    """Angular factor of the dipole operator component d_q between
    fine-structure levels, as a (2j_to+1) x (2j_from+1) matrix.

    The electron spin is a spectator: the matrix element is the orbital
    C^1_q element recoupled through the |l m_l> x |s m_s> decomposition,

        <(l' s) j' m'| C^1_q |(l s) j m> =
            sum_{m_l, m_s} <l' m_l+q s m_s|j' m'> <l m_l s m_s|j m>
                           <l' m_l+q| C^1_q |l m_l>,

    with <l' m'_l|C^1_q|l m_l> = CG(l m_l 1 q; l' m'_l) <l'||C^1||l>/sqrt(2l'+1).
    Multiplying by the radial integral <n'l'|r|nl> gives the full dipole
    matrix element in atomic units.
    """
    if abs(l_to - l_from) != 1:
        raise ValueError("dipole selection rule requires |l' - l| = 1")
    dim_to = round(2 * j_to) + 1
    dim_from = round(2 * j_from) + 1
    scale = reduced_c1(l_from, l_to) / math.sqrt(2 * l_to + 1)
    out = np.zeros((dim_to, dim_from))
    spin = 0.5
    for i_from in range(dim_from):
        m = -j_from + i_from
        m_to = m + q
        if abs(m_to) > j_to:
            continue
        i_to = round(m_to + j_to)
        value = 0.0
        for two_ms in (-1, 1):
            m_s = two_ms / 2.0
            m_l = m - m_s
            if abs(m_l) > l_from or abs(m_l + q) > l_to:
                continue
            value += (
                clebsch_gordan(l_to, m_l + q, spin, m_s, j_to, m_to)
                * clebsch_gordan(l_from, m_l, spin, m_s, j_from, m)
                * clebsch_gordan(l_from, m_l, 1, q, l_to, m_l + q)
            )
        out[i_to, i_from] = scale * value
    return out
