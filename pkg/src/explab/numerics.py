"""Small numeric helpers: bracketed bisection used by charts and checkers."""

from __future__ import annotations

from .errors import RootNotBracketed


def bisect_root_log(f, lo: float, hi: float, rtol: float = 1e-12,
                    max_iter: int = 200) -> float:
    """Root by bisection at the geometric midpoint; for positive brackets
    spanning many decades where the root needs uniform relative precision.
    """
    if not (0.0 < lo < hi):
        raise RootNotBracketed(f"need 0 < lo < hi, got [{lo:.6g}, {hi:.6g}]")
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise RootNotBracketed(f"no sign change on [{lo:.6g}, {hi:.6g}]")
    for _ in range(max_iter):
        mid = (lo * hi) ** 0.5
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        if hi - lo <= rtol * lo:
            break
    return 0.5 * (lo + hi)


def bisect_root(f, lo: float, hi: float, xtol: float = 1e-12, max_iter: int = 200) -> float:
    """Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.

    Works for monotone functions with jump discontinuities: the bracket
    always keeps the sign change, so it converges to the unique sign-change
    location.  Zero values are accepted as roots immediately.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise RootNotBracketed(f"no sign change on [{lo:.6g}, {hi:.6g}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # bracket exhausted at float resolution
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        if hi - lo <= xtol:
            break
    return 0.5 * (lo + hi)
