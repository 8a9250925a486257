"""Arbitrary-precision quadrature: tanh-sinh rules, Gauss-Legendre rules,
a semi-infinite transform, and nested integration over the triangle
0 < beta < alpha < 1.

The tanh-sinh rule is the workhorse: the double-exponential substitution
x = tanh((pi/2) sinh t) pushes endpoint singularities (logs, inverse square
roots) into the far tail, so level-by-level refinement of the trapezoid rule
converges geometrically.  Nodes never touch the endpoints and are stored as
exact distances z = 1 - |y| (computed as 2/(e^{2v}+1), which never cancels),
so integrands may resolve algebraic endpoint singularities far below the
working ulp via the optional distance-aware calling form.  Node/weight
tables are cached per (precision, level); accumulation runs in a fixed node
order so results are reproducible bit for bit at a given precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf

from .errors import QuadratureEvalError
from .precision import PrecCtx


@dataclass
class QuadResult:
    """Outcome of one quadrature: value, error estimate, work counters.

    ``converged`` is False when the last two refinement levels still differ
    by more than the requested threshold; such results must never be treated
    as converged by callers.
    """

    value: object
    err_est: object
    nodes: int
    level: int
    converged: bool
    note: str = ""


# ----------------------------------------------------------------------
# tanh-sinh node tables

_TS_CACHE: dict = {}


def _ts_nodes(wp, level, deep):
    """(z, w) pairs for the positive-t half of one refinement level.

    z = 1 - tanh((pi/2) sinh t) carries the node position as a distance to
    the interval end, at full relative precision.  Level 0 holds
    t = 0, h, 2h, ...; level L >= 1 the odd multiples of h = 2^-L.  Shallow
    tables stop once z < 2^-(wp+4); deep tables continue to z < 2^-(2wp+16)
    so that inverse-square-root endpoint behavior still integrates to full
    precision in the distance-aware mode.
    """
    key = (wp, level, deep)
    cached = _TS_CACHE.get(key)
    if cached is not None:
        return cached
    with mpmath.workprec(wp + 16):
        pi_half = mpmath.pi / 2
        cut_bits = 2 * wp + 16 if deep else wp + 4
        cutoff = mpf(2) ** (-cut_bits)
        tmax = mpmath.asinh(cut_bits * mpmath.ln(2) / mpmath.pi)
        h = mpf(2) ** (-level)
        nodes = []
        k = 0 if level == 0 else 1
        step = 1 if level == 0 else 2
        while True:
            t = k * h
            if t > tmax:
                break
            v = pi_half * mpmath.sinh(t)
            z = 2 / (mpmath.exp(2 * v) + 1)
            if z < cutoff and k > 0:
                break
            w = pi_half * mpmath.cosh(t) / mpmath.cosh(v) ** 2
            nodes.append((z, w))
            k += step
    _TS_CACHE[key] = nodes
    return nodes


def _tanh_sinh_raw(fdist, a, b, wp, eps, max_level, deep, progress=None):
    """Shared tanh-sinh driver.

    ``fdist(x, da, db)`` returns (f(x), aux(x)) where da = x - a and
    db = b - x are supplied at full relative precision.  The aux channel is
    integrated with the same weights; the nested 2-D rule uses it to push
    inner error estimates through the outer weights.
    """
    with mpmath.workprec(wp + 10):
        a = mpf(a)
        b = mpf(b)
        if not b > a:
            raise ValueError("integration interval must satisfy a < b")
        half = (b - a) / 2
        total = mpf(0)
        aux_total = mpf(0)
        n_eval = 0
        prev = None
        diff = mpf("inf")
        value = mpf(0)
        converged = False
        level = 0

        def eval_at(dist_a, dist_b):
            nonlocal n_eval
            x = a + dist_a if dist_a < dist_b else b - dist_b
            try:
                fx, ax = fdist(x, dist_a, dist_b)
            except (ArithmeticError, ValueError) as exc:
                raise QuadratureEvalError(
                    f"integrand failed at node {mpmath.nstr(x, 20)}: {exc}",
                    node=x) from exc
            if not mpmath.isfinite(fx):
                raise QuadratureEvalError(
                    f"integrand returned {fx} at node {mpmath.nstr(x, 20)}",
                    node=x)
            n_eval += 1
            return fx, ax

        for level in range(max_level + 1):
            h = mpf(2) ** (-level)
            new = mpf(0)
            new_aux = mpf(0)
            for z, w in _ts_nodes(wp, level, deep):
                dz = half * z
                dy = (b - a) - dz          # half*(1+y), exact complement
                fx, ax = eval_at(dy, dz)   # right-side node
                new += w * fx
                new_aux += w * ax
                if z < 1:                  # mirrored node, skipping t = 0
                    fx, ax = eval_at(dz, dy)
                    new += w * fx
                    new_aux += w * ax
            if level == 0:
                total = h * new
                aux_total = h * new_aux
            else:
                total = total / 2 + h * new
                aux_total = aux_total / 2 + h * new_aux
            value = half * total
            if prev is not None:
                diff = abs(value - prev)
                if progress is not None:
                    progress(level, value, diff)
                if level >= 2 and diff <= eps * max(1, abs(value)):
                    converged = True
                    break
            prev = value
        floor = mpf(2) ** (-wp + 4) * max(1, abs(value))
        err = diff if mpmath.isfinite(diff) else abs(value)
        err = max(err, floor)
        return QuadResult(value, err, n_eval, level, converged), half * aux_total


_ZERO = mpf(0)


def tanh_sinh(f, a, b, ctx: PrecCtx, max_level: int = 12, eps=None,
              distances: bool = False, progress=None) -> QuadResult:
    """Integrate f over the open interval (a, b).

    Converged when consecutive refinement levels differ by less than
    eps * max(1, |value|), with eps defaulting to 2^-(target_bits - 8);
    unconverged results come back flagged, never silently accepted.

    With ``distances=True`` the integrand is called as f(x, x-a, b-x) with
    the two distances exact to full relative precision, and the node tables
    extend deep enough that inverse-square-root endpoint singularities
    converge to the working precision.  In the default one-argument form,
    nodes whose position rounds onto an endpoint are skipped, which caps the
    resolution of algebraic singularities near 2^-(working_bits/2); raise
    guard_bits above target_bits if that matters without distance mode.
    """
    if eps is None:
        with ctx.workprec():
            eps = ctx.quad_eps()
    if distances:
        fdist = lambda x, da, db: (f(x, da, db), _ZERO)
    else:
        def fdist(x, da, db):
            if not a < x < b:
                return _ZERO, _ZERO
            return f(x), _ZERO
    result, _ = _tanh_sinh_raw(fdist, a, b, ctx.working_bits, eps, max_level,
                               deep=distances, progress=progress)
    return result


# ----------------------------------------------------------------------
# Gauss-Legendre

_GL_CACHE: dict = {}


def _legendre(n, x):
    """(P_n(x), P_n'(x)) by the three-term recurrence."""
    p0, p1 = mpf(1), x
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


def _gl_nodes(n, wp):
    key = (n, wp)
    cached = _GL_CACHE.get(key)
    if cached is not None:
        return cached
    with mpmath.workprec(wp + 16):
        nodes = []
        tol = mpf(2) ** (-wp - 8)
        for i in range(1, n // 2 + 1):
            x = mpmath.cos(mpmath.pi * (i - mpf(1) / 4) / (n + mpf(1) / 2))
            for _ in range(100):
                p, dp = _legendre(n, x)
                dx = p / dp
                x -= dx
                if abs(dx) < tol:
                    break
            _, dp = _legendre(n, x)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes.append((x, w))
            nodes.append((-x, w))
        if n % 2:
            _, dp = _legendre(n, mpf(0))
            nodes.append((mpf(0), 2 / (dp * dp)))
        nodes.sort(key=lambda t: t[0])
    _GL_CACHE[key] = nodes
    return nodes


def gauss_legendre(f, a, b, n: int, ctx: PrecCtx) -> QuadResult:
    """n-point Gauss-Legendre rule on [a, b]; exact for degree <= 2n-1.

    The error estimate is the difference against the (n-1)-point rule, which
    is conservative on smooth integrands (the coarser rule dominates the
    difference).
    """
    if n < 1:
        raise ValueError("node count must be >= 1")
    wp = ctx.working_bits
    with mpmath.workprec(wp + 10):
        a = mpf(a)
        b = mpf(b)
        mid = (a + b) / 2
        half = (b - a) / 2

        def apply(rule):
            acc = mpf(0)
            for x, w in rule:
                acc += w * f(mid + half * x)
            return half * acc

        value = apply(_gl_nodes(n, wp))
        if n > 1:
            err = abs(value - apply(_gl_nodes(n - 1, wp)))
        else:
            err = abs(value)
        err = max(err, mpf(2) ** (-wp + 4) * max(1, abs(value)))
        return QuadResult(value, err, 2 * n - 1, n, True)


# ----------------------------------------------------------------------
# derived domains

def integrate_0_inf(f, ctx: PrecCtx, max_level: int = 12, eps=None) -> QuadResult:
    """Integrate f over (0, inf): split at 1, map [1, inf) by u = 1 + s/(1-s).

    Requires integrability at 0 and at least exponential decay at infinity.
    """
    near = tanh_sinh(f, 0, 1, ctx, max_level=max_level, eps=eps)

    def far(s):
        t = 1 - s
        u = 1 + s / t
        return f(u) / (t * t)

    tail = tanh_sinh(far, 0, 1, ctx, max_level=max_level, eps=eps)
    return QuadResult(
        near.value + tail.value,
        near.err_est + tail.err_est,
        near.nodes + tail.nodes,
        max(near.level, tail.level),
        near.converged and tail.converged,
        note="" if (near.converged and tail.converged) else "subinterval unconverged")


def integrate_triangle(f2, ctx: PrecCtx, max_level: int = 9,
                       inner_max_level: int = None, eps=None,
                       progress=None) -> QuadResult:
    """Nested tanh-sinh over {0 < beta < alpha < 1}.

    The outer rule drives alpha; for each alpha node the inner integral over
    (0, alpha) is evaluated once and memoized, so outer refinements reuse all
    previously computed columns.  The returned error estimate is the outer
    level difference plus the inner estimates propagated through the outer
    weights; any inner non-convergence flags the whole result and records
    the offending alpha node.
    """
    if eps is None:
        with ctx.workprec():
            eps = ctx.quad_eps()
    if inner_max_level is None:
        inner_max_level = max_level
    inner_eps = eps / 8
    wp = ctx.working_bits
    columns: dict = {}
    bad_alpha = []
    counters = {"inner_nodes": 0}

    def column(alpha, da, db):
        if not 0 < alpha < 1:
            return _ZERO, _ZERO
        cached = columns.get(alpha)
        if cached is None:
            res = tanh_sinh(lambda beta: f2(alpha, beta), 0, alpha, ctx,
                            max_level=inner_max_level, eps=inner_eps)
            counters["inner_nodes"] += res.nodes
            if not res.converged and not bad_alpha:
                bad_alpha.append(alpha)
            cached = (res.value, res.err_est)
            columns[alpha] = cached
        return cached

    outer, weighted_inner_err = _tanh_sinh_raw(
        column, 0, 1, wp, eps, max_level, deep=False, progress=progress)
    converged = outer.converged and not bad_alpha
    note = ""
    if bad_alpha:
        note = f"inner quadrature unconverged at alpha={mpmath.nstr(bad_alpha[0], 20)}"
    elif not outer.converged:
        note = "outer quadrature unconverged"
    with mpmath.workprec(wp + 10):
        err = outer.err_est + abs(weighted_inner_err)
    return QuadResult(outer.value, err, outer.nodes + counters["inner_nodes"],
                      outer.level, converged, note)
