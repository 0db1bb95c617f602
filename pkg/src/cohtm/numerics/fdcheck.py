"""Central finite-difference validation of tape gradients."""

import numpy as np


def finite_diff_check(f, point, h=1e-5, tol=1e-6):
    """Compare analytic gradients of ``f`` against central differences.

    ``f(x)`` must deterministically return ``(loss, grad)`` for a flat float64
    vector ``x``, where ``grad`` has the same shape as ``x``.  Errors are
    measured coordinate-wise as |fd - g| / max(|fd|, |g|, 1), so tiny
    gradients are compared absolutely.

    Returns ``(passed, max_rel_err)``.
    """
    point = np.asarray(point, dtype=np.float64)
    _, grad = f(point)
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != point.shape:
        raise ValueError("gradient shape %s does not match point %s" % (grad.shape, point.shape))
    max_err = 0.0
    for i in range(point.size):
        xp = point.copy()
        xp.flat[i] += h
        xm = point.copy()
        xm.flat[i] -= h
        fd = (f(xp)[0] - f(xm)[0]) / (2.0 * h)
        g = grad.flat[i]
        err = abs(fd - g) / max(abs(fd), abs(g), 1.0)
        max_err = max(max_err, err)
    return max_err < tol, max_err
