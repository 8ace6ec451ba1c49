"""Published closed-form expressions for the benchmark setting
(a=0.2, b=0.1, d=0.4, q=w=1, e1=0.2, e2=0.8), transcribed as printed.

These exist to be checked against, not computed with. Several printed forms
are inconsistent with the model they describe; where a repaired variant is
known it is offered next to the literal one and the difference is documented
on the function. ``root`` arguments select the sign of the square root
sqrt(10c+1) (self-renewing) so that both quadratic branches can be probed.

Notation: ch = root * sqrt(10c + 1), cp = sqrt(60c + 1).
"""

from __future__ import annotations

import cmath
import math

from ecoevo.exceptions import DomainError

SR_HOPF_INTERVAL = (-0.1, 0.0)
ES_HOPF_INTERVAL = (-1.0 / 60.0, 0.8)


def _ch(c: float, root: int) -> float:
    if 10 * c + 1 < 0:
        raise DomainError(f"sqrt(10c+1) undefined for c={c}")
    return root * math.sqrt(10 * c + 1)


def _cp(c: float) -> float:
    if 60 * c + 1 < 0:
        raise DomainError(f"sqrt(60c+1) undefined for c={c}")
    return math.sqrt(60 * c + 1)


# -- self-renewing ----------------------------------------------------------


def sr_branch(c: float, sign: int) -> float:
    """(0.4 +/- sqrt(0.04 + 0.4c)) / (2 (0.3 - c)); sign=+1 is the saddle branch."""
    disc = 0.04 + 0.4 * c
    if -1e-15 < disc < 0:  # rounding at c = -0.1
        disc = 0.0
    return (0.4 + sign * math.sqrt(disc)) / (2 * (0.3 - c))


def sr_hopf_epsilon(c: float, root: int = 1) -> float:
    """Printed trace-zero curve. As printed (root=+1) it evaluates the
    trace-zero condition on the saddle branch; root=-1 gives the focus branch."""
    ch = _ch(c, root)
    return (55 * c + 30 * c * ch + ch + 50 * c**2 - 1) / ((10 * c - 3) * (3 * ch - 10 * c + 9))


def sr_hopf_epsilon_definition(c: float) -> float:
    """Trace-zero value written in terms of the focus-branch coordinate."""
    x = sr_branch(c, -1)
    return (x - x * x) * ((0.3 - c) * x + 0.1) / (0.6 * x + 0.2)


def sr_omega0(c: float, root: int = 1) -> complex:
    """Printed frequency at the trace-zero curve (complex for root=-1)."""
    ch = _ch(c, root)
    return (30 * c + 10 * c * ch + ch - 1) * cmath.sqrt(2 * ch * (ch + 3)) / (5 * (10 * c - 3) ** 2)


def sr_transversality(c: float, root: int = 1) -> float:
    """Printed d Re(lambda)/d eps. root=-1 is the focus-branch value."""
    ch = _ch(c, root)
    return (10 * c - 9 - 3 * ch) / (10 * (3 - 10 * c))


def _sr_l1_parts(c: float, root: int, fix_typo: bool):
    ch = _ch(c, root)
    A1 = (30 * c - 1) * ch - 100 * (c + 0.1) ** 2
    A2 = -50 * c**2 + 30 * ch * c - 55 * c + ch + 1
    P1 = (c + 0.1) * (
        (-3 / 20 * c**3 + 9 / 8 * c**2 - 681 / 500 * c - 567 / 1250) * ch
        + c**4
        - 13 * c**3 / 4
        + 221 * c**2 / 200
        + 1737 * c / 500
        + 117 / 250
    )
    A3 = (4500 * c**3 + 2300 * c**2 - 35 * c + 2) * ch - 5000 * c**4 - 15500 * c**3 - 1950 * c**2 - 25 * c + 2
    P2 = (
        (-37500 * c**4 + 154000 * c**3 - 108125 * c**2 - 65130 * c - 5184) * ch
        + 100000 * c**5
        - 247500 * c**4
        - 118500 * c**3
        + 376225 * c**2
        + 90390 * c
        + 5184
    ) / 100000
    lead = 50 * c**2 if fix_typo else 50**2
    den = (
        (10 * c + 3 * ch - 9) ** 2
        * (10 * c - 3 * ch + 1) ** 2
        * (lead - 30 * ch * c + 55 * c - ch - 1)
        * (100 * c**2 - 30 * ch * c + 20 * c + ch + 1)
    )
    return A1, A2, P1, A3, P2, den


def sr_l1(c: float) -> complex:
    """Printed first Lyapunov coefficient, literal. Complex-valued on the
    whole interval because the first square-root argument is negative."""
    A1, A2, P1, A3, P2, den = _sr_l1_parts(c, 1, fix_typo=False)
    s = cmath.sqrt
    return -5000000 * (c - 0.3) ** 2 * (s(A1) * s(A2) * P1 + s(A3) * P2) / den


def sr_l1_repaired(c: float) -> float:
    """Real-valued repair of the printed coefficient.

    Two changes: the leading ``50^2`` of the third denominator factor is read
    as ``50c^2`` (it otherwise breaks the symmetry with the fourth factor), and
    sqrt(A1) for the negative A1 is replaced by -sqrt(-A1). The result equals
    the normal-form coefficient with the critical eigenvector scaled to unit
    resource component.
    """
    A1, A2, P1, A3, P2, den = _sr_l1_parts(c, 1, fix_typo=True)
    return -5000000 * (c - 0.3) ** 2 * (math.sqrt(A3) * P2 - math.sqrt(-A1) * math.sqrt(A2) * P1) / den


# -- externally supplied ----------------------------------------------------


def es_equilibrium(c: float) -> tuple[float, float]:
    """(x, r) of the printed interior equilibrium; regular at c = 2/15 via the limit."""
    cp = _cp(c)
    if abs(c - 2 / 15) < 1e-9:
        return 3 / 7, 1 / 3
    r = (0.6 - math.sqrt(0.04 + 2.4 * c)) / (2 * (0.4 - 3 * c))
    x = (3 * cp - 9) / (cp + 60 * c - 11)
    return x, r


def es_det_numerator(c: float) -> float:
    """Printed numerator governing the sign of the Jacobian determinant."""
    cp = _cp(c)
    return (33 * cp - 525 * c * cp - 215 * c + 1800 * c**2 * cp + 1500 * c**2 + 17) / (2 * (15 * c - 2) ** 2)


def es_hopf_epsilon(c: float) -> float:
    """Printed trace-zero curve (second form)."""
    cp = _cp(c)
    num = 37 * c * cp - 125 * c + 4 * cp - 165 * c**2 * cp + 255 * c**2 + 900 * c**3 + 1
    den = (2 - 15 * c) * (12 * c * cp - 330 * c - cp + 1080 * c**2 + 23)
    return num / den


def es_hopf_epsilon_definition(c: float, r22: float = 0.8) -> float:
    """Trace-zero value written in terms of the equilibrium, with the printed
    resource self-coefficient (1.8 - r22 x). The model gives r22 = 0.6."""
    x, r = es_equilibrium(c)
    return (x - x * x) * ((0.3 - c) * r + 0.1) / (1.8 - r22 * x)


def es_nu0_squared(c: float) -> float:
    """Square of the printed critical frequency (negative on most of the interval)."""
    cp = _cp(c)
    num = (
        72
        * (300 * c + 5 * cp - 55)
        * (60 * c - 10 * c * cp + 3 * cp - 13)
        * (99 * cp - 1575 * c * cp - 645 * c + 5400 * c**2 * cp + 4500 * c**2 + 51)
        * (15 * c * cp - 75 * c + cp + 1) ** 2
    )
    den = (
        25
        * (15 * c - 2)
        * (300 * c - 40)
        * (3 * cp - 540 * c + 63)
        * (60 * c + cp - 11)
        * (60 * c * cp - 630 * c - 11 * cp + 1800 * c**2 + 61) ** 2
    )
    return num / den


def es_transversality(c: float) -> float:
    cp = _cp(c)
    return 3 * (cp - 180 * c + 21) / (10 * (60 * c + cp - 11))


def es_l1(c: float, nu0: complex) -> complex:
    """Printed first Lyapunov coefficient; ``nu0`` is the critical frequency
    to substitute (the printed one is imaginary, so callers pass their own)."""
    cp = _cp(c)
    s = cmath.sqrt
    inner1 = (
        3
        * ((3 / 10 * c**3 + 19 / 200 * c**2 - 1 / 1500 * c + 1 / 45000) * cp + c**4 + 119 * c**3 / 60 + 203 * c**2 / 1800 - 1 / 45000)
        * c
        * s(60 * c + 7 * cp + 1)
        / 20
    )
    inner2 = math.sqrt(2) * (
        (11 / 40 * c**5 - 73 / 7200 * c**4 - 989 / 216000 * c**3 + 29 / 120000 * c**2 + 1 / 200000 * c - 1 / 3000000) * cp
        + (c + 1 / 60) * (c**5 + 77 / 60 * c**4 - 1043 / 3600 * c**3 + 43 / 2000 * c**2 - 9 / 10000 * c + 1 / 50000)
    )
    pre = 151165440000000000000000000 * (c - 2 / 15) ** 4 * (c - 1 / 4) ** 6 * c * (c - 4 / 5) ** 5 * cp
    den = (
        s(60 * c + 7 * cp + 1) ** 3
        * (-11 - cp + 60 * c) ** 2
        * (10 * c * cp - 3 * cp + 60 * c - 13) ** 4
        * (100 * cp * c**2 + 6000 * c**3 - 185 * c * cp - 5000 * c**2 + 24 * cp + 715 * c - 24) ** 4
        * nu0**3
    )
    return pre * (inner1 + inner2) / den
