"""Spectral diagnostics: discrete eigenvalues, resolvent norms along the
imaginary axis, transcendental characteristic roots of the continuous
problems, and the Dirichlet-Robin eigenvalue curve with its critical constant.

The characteristic function is evaluated through the entire functions
sinh(sqrt(y))/sqrt(y) and cosh(sqrt(y)) of y = kappa^2, which removes the
square-root branch ambiguity, and in a scaled form with exp(-|Re kappa|)
factored out so that large |kappa| cannot overflow.  The scale factor is
positive, so zeros, residual thresholds and winding numbers are unaffected.

The Robin solver works on the analytic transcendental equation directly; it
is deliberately independent of the matrix discretization so it can act as an
oracle for it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .core import DampingLaw, Params, SystemLabel, system_label
from .discretization import DiscreteGenerator


class EigensolverError(RuntimeError):
    """The dense eigensolver failed to converge."""


class BetaNearSpectrumError(RuntimeError):
    """The requested shift i*beta sits too close to the spectrum."""


class RootEnumerationError(RuntimeError):
    """Winding count and refined roots disagree, or the contour is unusable.

    Usually the region boundary passes too close to a root; shrink or move
    the region and retry.
    """


# ---------------------------------------------------------------------------
# discrete spectrum


@dataclass(eq=False)
class SpectrumReport:
    """All eigenvalues of a discrete generator, with axis diagnostics."""

    eigenvalues: np.ndarray
    spectral_abscissa: float
    min_distance_to_imaginary_axis: float
    label: SystemLabel


def eigenvalues(gen: DiscreteGenerator) -> SpectrumReport:
    """Full spectrum of the dense real generator matrix."""
    try:
        vals = sla.eig(gen.matrix, right=False)
    except sla.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails here
        raise EigensolverError(f"dense eigensolver failed on the "
                               f"{gen.label.value} generator: {exc}") from exc
    vals = np.sort_complex(vals)
    return SpectrumReport(
        eigenvalues=vals,
        spectral_abscissa=float(vals.real.max()),
        min_distance_to_imaginary_axis=float(np.abs(vals.real).min()),
        label=gen.label,
    )


# ---------------------------------------------------------------------------
# resolvent norms


def resolvent_norm(gen: DiscreteGenerator, beta: float, rtol: float = 1e-8,
                   max_iter: int = 100_000) -> float:
    """Operator norm of (i*beta*I - A)^{-1} in the energy norm.

    Power iteration on the G-weighted normal operator of the resolvent,
    using one complex LU factorization of the shifted matrix.
    """
    n = gen.dim
    m = 1j * beta * np.eye(n) - gen.matrix
    lu, piv, info = lapack.zgetrf(m)
    if info != 0:
        raise BetaNearSpectrumError(f"beta={beta} too close to spectrum "
                                    f"(singular shift)")
    rcond, _ = lapack.zgecon(lu, np.linalg.norm(m, 1), norm="1")
    if rcond < 1e-14:
        raise BetaNearSpectrumError(
            f"beta={beta} too close to spectrum (condition estimate "
            f"{1.0 / max(rcond, 1e-300):.2e} above 1e14)")

    gram = gen.gram
    cho = gen.gram_cholesky
    rng = np.random.default_rng(0)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    lam_old = 0.0
    lam = 0.0
    for it in range(max_iter):
        y, _ = lapack.zgetrs(lu, piv, x)                     # R x
        t, _ = lapack.zgetrs(lu, piv, gram @ y, trans=2)     # R^H G R x
        x_new = sla.cho_solve(cho, t)                        # G^{-1} ...
        lam = float(np.real(np.vdot(x, gram @ x_new) / np.vdot(x, gram @ x)))
        x = x_new / np.linalg.norm(x_new)
        if it >= 2 and abs(lam - lam_old) <= rtol * abs(lam):
            return math.sqrt(lam)
        lam_old = lam
    raise EigensolverError(
        f"power iteration for the resolvent norm at beta={beta} did not reach "
        f"rtol={rtol} within {max_iter} iterations (last estimate {math.sqrt(lam)})")


@dataclass(eq=False)
class ResolventScan:
    """Resolvent norms along i*beta and the fitted log-log growth trend.

    The slope is fitted only over the pre-saturation window beta <= the
    largest eigenfrequency the grid resolves: a finite matrix cannot show
    unbounded resolvent growth, so beyond that point the norms merely decay.
    """

    betas: np.ndarray
    norms: np.ndarray
    fitted_loglog_slope: float
    presaturation_cutoff: float


def resolvent_scan(gen: DiscreteGenerator, betas) -> ResolventScan:
    """Evaluate the resolvent norm at each beta and fit the log-log trend."""
    betas = np.asarray(sorted(float(b) for b in betas))
    if np.any(betas <= 0.0):
        raise ValueError("betas must be positive")
    norms = np.array([resolvent_norm(gen, b) for b in betas])
    cutoff = float(np.abs(eigenvalues(gen).eigenvalues.imag).max())
    window = betas <= cutoff
    if window.sum() >= 2:
        slope = float(np.polyfit(np.log(betas[window]), np.log(norms[window]), 1)[0])
    else:
        slope = float(np.polyfit(np.log(betas), np.log(norms), 1)[0])
    return ResolventScan(betas=betas, norms=norms, fitted_loglog_slope=slope,
                         presaturation_cutoff=cutoff)


# ---------------------------------------------------------------------------
# characteristic roots of the continuous problems


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned search region in the complex plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("rectangle must have positive width and height")

    def contains(self, z: complex, slack: float = 1e-12) -> bool:
        return (self.re_min - slack <= z.real <= self.re_max + slack
                and self.im_min - slack <= z.imag <= self.im_max + slack)


@dataclass(frozen=True)
class CharacteristicRoot:
    lam: complex
    residual: float
    multiplicity_hint: int = 1


def _sinhc_cosh_scaled(y: complex) -> tuple[complex, complex]:
    """(sinh(k)/k, cosh(k)) for k = sqrt(y), scaled by exp(-|Re k|).

    Both are entire functions of y; the common positive scale factor keeps
    |k| up to ~1e308 representable.
    """
    k = cmath.sqrt(y)
    if abs(k) < 1e-8:
        return 1.0 + y / 6.0 + y * y / 120.0, 1.0 + y / 2.0 + y * y / 24.0
    r = abs(k.real)
    ep = cmath.exp(k - r)
    em = cmath.exp(-k - r)
    return (ep - em) / (2.0 * k), (ep + em) / 2.0


def _safe_exp(z: complex) -> complex:
    try:
        return cmath.exp(z)
    except OverflowError:
        return complex(math.inf, 0.0)


def characteristic_function(p: Params) -> Callable[[complex], complex]:
    """Entire function whose zeros are the continuous eigenvalues.

    Internal friction: with kappa^2 = lam*(lam + a),
        F(lam) = lam^2 sinh(k)/k + cosh(k) + mu*lam*e^{-lam*tau} sinh(k)/k,
    obtained from u(x) = sinh(kappa*x)/kappa and the dynamic boundary relation
    u'(1) = -(lam^2 + mu*lam*e^{-lam*tau}) u(1).  For SHIFTED params the
    whole function is evaluated at lam + shift (the operator shift moves the
    spectrum rigidly; see the module docs for the design note).

    Kelvin-Voigt: kappa^2 = lam^2/(1 + a*lam) and
        F(lam) = lam^2 sinh(k)/k + (1 + a*lam) cosh(k)
                 + mu*lam*e^{-lam*tau} sinh(k)/k.
    This representation has an essential singularity at lam = -1/a, so
    Kelvin-Voigt search regions must exclude that point.

    Values carry a positive scale factor exp(-|Re kappa|); zeros, residuals
    and winding numbers are unchanged by it.
    """
    a, mu, tau = p.a, p.mu, p.tau
    shift = p.shift if system_label(p) is SystemLabel.SHIFTED else 0.0
    is_kv = p.law is DampingLaw.KELVIN_VOIGT

    def f(lam: complex) -> complex:
        lam = complex(lam) + shift
        if is_kv:
            den = 1.0 + a * lam
            if den == 0.0:
                return complex(math.inf, 0.0)
            y = lam * lam / den
            s, c = _sinhc_cosh_scaled(y)
            delay = mu * lam * _safe_exp(-lam * tau) if mu != 0.0 else 0.0
            return lam * lam * s + den * c + delay * s
        y = lam * (lam + a)
        s, c = _sinhc_cosh_scaled(y)
        delay = mu * lam * _safe_exp(-lam * tau) if mu != 0.0 else 0.0
        return lam * lam * s + c + delay * s

    return f


def _winding_number(f, rect: Rectangle, n0: int = 32, n_max: int = 8192) -> int:
    """Winding number of f along the rectangle boundary.

    Trapezoid walk of the boundary, refined until every phase increment is
    below pi/2 and the total stabilizes at an integer within 1e-3.  A root on
    (or next to) the boundary never satisfies the phase criterion, so the
    per-side sample count is capped rather than refined indefinitely.
    """
    corners = [complex(rect.re_min, rect.im_min), complex(rect.re_max, rect.im_min),
               complex(rect.re_max, rect.im_max), complex(rect.re_min, rect.im_max)]
    n = n0
    prev = None
    while n <= n_max:
        pts = []
        for k in range(4):
            z0, z1 = corners[k], corners[(k + 1) % 4]
            seg = (z1 - z0) / n
            pts.extend(z0 + j * seg for j in range(n))
        vals = np.array([f(z) for z in pts])
        if np.any(vals == 0.0) or np.any(~np.isfinite(vals)):
            raise RootEnumerationError(
                "characteristic function vanishes or overflows on the region "
                "boundary; shrink or move the region")
        dargs = np.angle(np.roll(vals, -1) / vals)
        if np.max(np.abs(dargs)) > 0.5 * math.pi:
            n *= 2
            prev = None
            continue
        total = dargs.sum() / (2.0 * math.pi)
        if prev is not None and abs(total - prev) < 1e-3:
            if abs(total - round(total)) > 1e-3:
                raise RootEnumerationError(
                    f"winding number {total:.6f} along the region boundary is "
                    f"not integral; the boundary is too close to a root")
            return int(round(total))
        prev = total
        n *= 2
    raise RootEnumerationError(
        "winding number did not stabilize; the region boundary is too close "
        "to a root")


def _newton(f, z0: complex, rect: Rectangle, tol: float,
            max_iter: int = 200) -> tuple[complex, float] | None:
    """Newton refinement with a numerical derivative, confined near rect."""
    bound = 4.0 * max(rect.re_max - rect.re_min, rect.im_max - rect.im_min)
    center = complex((rect.re_min + rect.re_max) / 2, (rect.im_min + rect.im_max) / 2)
    z = z0
    for _ in range(max_iter):
        fz = f(z)
        if not (cmath.isfinite(fz)):
            return None
        if abs(fz) < tol:
            return z, abs(fz)
        h = 1e-7 * (1.0 + abs(z))
        df = (f(z + h) - f(z - h)) / (2.0 * h)
        if df == 0.0 or not cmath.isfinite(df):
            return None
        dz = fz / df
        z = z - dz
        if abs(z - center) > bound:
            return None
        if abs(dz) < 5e-16 * (1.0 + abs(z)):
            fz = f(z)
            return (z, abs(fz)) if abs(fz) < tol else None
    fz = f(z)
    return (z, abs(fz)) if abs(fz) < tol else None


def _clearest_split(f, lo: float, hi: float, span: tuple[float, float],
                    vertical: bool) -> float:
    """Split coordinate in (lo, hi) whose line keeps |f| largest.

    Avoids cutting through a root, which would make the sub-contours unusable.
    """
    ts = np.linspace(span[0], span[1], 33)
    best, best_clear = None, -1.0
    for frac in (0.5, 0.46, 0.54, 0.42, 0.58, 0.38, 0.62):
        m = lo + frac * (hi - lo)
        if vertical:
            clear = min(abs(f(complex(m, t))) for t in ts)
        else:
            clear = min(abs(f(complex(t, m))) for t in ts)
        if clear > best_clear:
            best, best_clear = m, clear
    return best


def _enumerate(f, rect: Rectangle, tol: float, depth: int = 0) -> list[tuple[complex, float]]:
    if depth > 80:
        raise RootEnumerationError("subdivision depth exhausted during root search")
    count = _winding_number(f, rect)
    if count == 0:
        return []
    tiny = (rect.re_max - rect.re_min) < 1e-6 and (rect.im_max - rect.im_min) < 1e-6
    if count == 1 or tiny:
        seeds = [complex((rect.re_min + rect.re_max) / 2,
                         (rect.im_min + rect.im_max) / 2)]
        seeds += [complex(rect.re_min + sr * (rect.re_max - rect.re_min),
                          rect.im_min + si * (rect.im_max - rect.im_min))
                  for sr in (0.25, 0.75) for si in (0.25, 0.75)]
        for z0 in seeds:
            got = _newton(f, z0, rect, tol)
            if got is not None and rect.contains(got[0]):
                if count == 1:
                    return [got]
                # tiny cluster: report the refined point `count` times
                return [got] * count
        if tiny:
            raise RootEnumerationError(
                f"could not refine a root cluster of winding count {count} "
                f"near {seeds[0]}")
    if (rect.re_max - rect.re_min) >= (rect.im_max - rect.im_min):
        m = _clearest_split(f, rect.re_min, rect.re_max,
                            (rect.im_min, rect.im_max), vertical=True)
        parts = [Rectangle(rect.re_min, m, rect.im_min, rect.im_max),
                 Rectangle(m, rect.re_max, rect.im_min, rect.im_max)]
    else:
        m = _clearest_split(f, rect.im_min, rect.im_max,
                            (rect.re_min, rect.re_max), vertical=False)
        parts = [Rectangle(rect.re_min, rect.re_max, rect.im_min, m),
                 Rectangle(rect.re_min, rect.re_max, m, rect.im_max)]
    found: list[tuple[complex, float]] = []
    for part in parts:
        found += _enumerate(f, part, tol, depth + 1)
    return found


def characteristic_roots(p: Params, region: Rectangle,
                         tol: float = 1e-10) -> list[CharacteristicRoot]:
    """All characteristic roots inside ``region``.

    Argument-principle winding counts enumerate the roots, Newton refines
    them, and the total multiplicity is reconciled against the winding count
    of the full region; disagreement raises :class:`RootEnumerationError`.
    """
    if p.law is DampingLaw.KELVIN_VOIGT and p.a > 0.0:
        pole = -1.0 / p.a
        if region.re_min <= pole <= region.re_max and region.im_min <= 0.0 <= region.im_max:
            raise ValueError(
                f"Kelvin-Voigt characteristic function is singular at "
                f"lam = -1/a = {pole}; choose a region excluding that point")
    f = characteristic_function(p)
    total = _winding_number(f, region)
    raw = _enumerate(f, region, tol)

    merged: list[list] = []  # [lam, residual, multiplicity]
    for z, r in sorted(raw, key=lambda t: (t[0].real, t[0].imag)):
        for entry in merged:
            if abs(z - entry[0]) < 1e-7 * (1.0 + abs(z)):
                entry[2] += 1
                entry[1] = min(entry[1], r)
                break
        else:
            merged.append([z, r, 1])

    if sum(m for _, _, m in merged) != total:
        raise RootEnumerationError(
            f"winding count {total} of the region disagrees with the "
            f"{sum(m for _, _, m in merged)} refined roots; the region "
            f"boundary is probably too close to a root")
    return [CharacteristicRoot(lam=z, residual=r, multiplicity_hint=m)
            for z, r, m in merged]


# ---------------------------------------------------------------------------
# Dirichlet-Robin eigenvalue curve


def _robin_determinant(lam: float, c: float) -> float:
    """h(lam) whose smallest root is the first Dirichlet-Robin eigenvalue.

    For -u'' = lam*u with u(0) = 0 and u'(1) + c*u(1) = 0:
    h(lam) = cos(sqrt(lam)) + c*sin(sqrt(lam))/sqrt(lam) for lam > 0, extended
    through h(0) = 1 + c and the hyperbolic branch for lam < 0.
    """
    if lam > 1e-12:
        s = math.sqrt(lam)
        return math.cos(s) + c * math.sin(s) / s
    if lam < -1e-12:
        s = math.sqrt(-lam)
        try:
            return math.cosh(s) + c * math.sinh(s) / s
        except OverflowError:
            return math.inf if c > -s else -math.inf
    # series around lam = 0
    return (1.0 + c) - lam * (0.5 + c / 6.0) + lam * lam * (1.0 / 24.0 + c / 120.0)


def robin_eigenvalue(c: float, tol: float = 1e-10) -> float:
    """First eigenvalue of -u'' on (0,1) with u(0) = 0, u'(1) + c*u(1) = 0.

    Bisection on the analytic determinant to absolute tolerance ``tol``.
    For c > -1 the eigenvalue lies in (0, pi^2]; for c < -1 there is exactly
    one negative eigenvalue, bracketed by geometric expansion; c = -1 gives 0.
    """
    h0 = 1.0 + c
    if h0 == 0.0:
        return 0.0
    if h0 > 0.0:
        # first sign change of h along lam = s^2, s in (0, pi]; h(pi^2) = -1
        lo = 0.0
        hi = None
        n_scan = 2000
        for k in range(1, n_scan + 1):
            lam = (k * math.pi / n_scan) ** 2
            if _robin_determinant(lam, c) <= 0.0:
                hi = lam
                break
            lo = lam
        if hi is None:  # pragma: no cover - h(pi^2) = -1 guarantees a bracket
            raise RuntimeError("no sign change found on (0, pi^2]")
    else:
        # unique negative eigenvalue: expand left until h turns positive
        width = 1.0
        while _robin_determinant(-width, c) <= 0.0:
            width *= 2.0
        lo, hi = -width, 0.0
    # bisect; sign convention: h(lo) > 0, h(hi) <= 0
    while abs(hi - lo) > min(tol, 1e-12):
        mid = 0.5 * (lo + hi)
        if _robin_determinant(mid, c) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_c_star(tol: float = 1e-10) -> float:
    """The unique negative c with a vanishing first Dirichlet-Robin eigenvalue.

    Bisection on c -> robin_eigenvalue(c) over an expanding negative bracket,
    until |eigenvalue| < ``tol``.  On the unit interval the answer is -1.
    """
    lo = -1.5
    while robin_eigenvalue(lo) >= 0.0:
        lo *= 2.0
    hi = 0.0
    while True:
        mid = 0.5 * (lo + hi)
        val = robin_eigenvalue(mid)
        if abs(val) < tol or (hi - lo) < 1e-15:
            return mid
        if val > 0.0:
            hi = mid
        else:
            lo = mid
