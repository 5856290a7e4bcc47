"""Named quasi-concave test functions (numpy-vectorised)."""
import numpy as np


def t_log(t):
    return t * np.log1p(1.0 / t)


def max1(t):
    return np.maximum(1.0, t)


def min1(t):
    return np.minimum(1.0, t)


def t_over_log(t):
    return t / np.log1p(t)


def t_over_log2_sqrt(t):
    return t / np.log1p(np.sqrt(t)) ** 2


def frac(t):
    return t / (t + 1.0)


def ident(t):
    return np.asarray(t, dtype=float) * 1.0


def power(alpha):
    def f(t):
        return np.asarray(t, dtype=float) ** alpha
    f.__name__ = f"t^{alpha:g}"
    return f


CATALOG = {
    "t*log(1+1/t)": t_log,
    "max(1,t)": max1,
    "min(1,t)": min1,
    "t/log(1+t)": t_over_log,
    "t/log(1+t^0.5)^2": t_over_log2_sqrt,
    "t/(t+1)": frac,
    "t": ident,
    "t^0.3": power(0.3),
    "t^0.5": power(0.5),
    "t^0.8": power(0.8),
}
