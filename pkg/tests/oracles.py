"""Independent reference computations used as test oracles.

Nothing here calls the theta recursion or the closed product formula; the
skew polynomial oracle works directly from y r = tau(r) y + delta(r).
"""

from __future__ import annotations

from collections import defaultdict


def normalize_words(R, tau, delta, words):
    """Left normal form of a sum of words by term rewriting.

    A word is a tuple of tokens, each either the string "y" or ("r", element).
    The rewrite y (r) -> (tau r) y + (delta r) is applied at the leftmost
    position where a y precedes a coefficient, and adjacent coefficients are
    multiplied.  Returns the coefficient list of sum a_k y^k.
    """
    out = defaultdict(lambda: R.zero)
    stack = list(words)
    while stack:
        w = _merge(R, stack.pop())
        pos = next((i for i in range(len(w) - 1) if w[i] == "y" and w[i + 1] != "y"), None)
        if pos is None:
            coef = R.one
            ys = 0
            for t in w:
                if t == "y":
                    ys += 1
                else:
                    coef = t[1]
            out[ys] = R.add(out[ys], coef)
            continue
        r = w[pos + 1][1]
        head, tail = w[:pos], w[pos + 2 :]
        stack.append(head + (("r", tau(r)), "y") + tail)
        stack.append(head + (("r", delta(r)),) + tail)
    n = max(out) + 1 if out else 0
    coeffs = [out[k] for k in range(n)]
    while coeffs and coeffs[-1] == R.zero:
        coeffs.pop()
    return coeffs


def _merge(R, w):
    merged = []
    for t in w:
        if t != "y" and merged and merged[-1] != "y":
            merged[-1] = ("r", R.mul(merged[-1][1], t[1]))
        else:
            merged.append(t)
    return tuple(merged)


def poly_words(coeffs):
    """Words of sum a_k y^k."""
    return [(("r", a),) + ("y",) * k for k, a in enumerate(coeffs)]


def product_words(f, g):
    return [u + v for u in poly_words(f) for v in poly_words(g)]


def oracle_mul(R, tau, delta, f, g):
    return normalize_words(R, tau, delta, product_words(f, g))


def truncate_series(R, coeffs, N):
    """Reduce a left-form coefficient list to the T/j^N layout."""
    coeffs = list(coeffs)[:N] + [R.zero] * max(0, N - len(coeffs))
    return tuple(R.reduce(c, N - k) for k, c in enumerate(coeffs))


def zmod_power_set(modulus: int, p: int, ell: int) -> set[int]:
    """i^ell in Z/modulus with i = (p), as plain integers."""
    step = p**ell
    return {a for a in range(modulus) if a % step == 0} if step < modulus else {0}
