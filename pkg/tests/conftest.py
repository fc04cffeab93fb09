import mpmath
import pytest

mpmath.mp.dps = 50


def mp_log2(x):
    return mpmath.log(mpmath.mpf(x), 2)


class Oracle:
    """High-precision, term-by-term evaluation of the rate formulas."""

    @staticmethod
    def ub(L, P, P0):
        P, P0 = mpmath.mpf(P), mpmath.mpf(P0)
        terms = [mp_log2(1 + k * k * P) / (2 * k) for k in range(1, L)]
        terms.append(mp_log2(1 + P0) / (2 * (L - 1)))
        return min(terms)

    @staticmethod
    def ub_prime(L, P0):
        return mp_log2(1 + mpmath.mpf(P0)) / (2 * (L - 1))

    @staticmethod
    def cdf(L, P, P0):
        P = mpmath.mpf(P)
        return min(mp_log2(1 + L * P) / (2 * L), Oracle.ub_prime(L, P0))

    @staticmethod
    def cf(L, P, P0):
        P, P0 = mpmath.mpf(P), mpmath.mpf(P0)
        return mp_log2(1 + (L - 1) * P * P0 / (1 + (L - 1) * P + P0)) / (2 * (L - 1))

    @staticmethod
    def fdf(L, P, P0):
        P = mpmath.mpf(P)
        up = max(mpmath.mpf(0), mp_log2(mpmath.mpf(1) / 2 + L * P / 2) / (2 * (L - 1)))
        return min(up, Oracle.ub_prime(L, P0))


@pytest.fixture
def oracle():
    return Oracle
