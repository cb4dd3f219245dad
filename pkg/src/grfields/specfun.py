"""Special functions: Gamma, modified Bessel functions I and K, Gegenbauer polynomials.

``bessel_k`` evaluates the Macdonald function by Temme's series for ``z <= 2``
and Steed's continued fraction for ``z > 2``, both at a reduced order
``|mu| <= 1/2`` followed by upward recurrence in the order (stable for K).
``bessel_k_series`` is the textbook reflection formula built on the ascending
series for I; it is kept as an independent route for small arguments.
``bessel_k_oracle`` integrates the Schlafli-type representation numerically.
"""

import math

import numpy as np
from scipy import integrate

from ._validation import check_finite_real, check_scalar_positive
from .exceptions import AccuracyError, DomainError

_EPS = 1e-16
_MAX_TERMS = 500
_CF_MAXIT = 10000
# below this spacing to the nearest integer the series route averages two
# neighbouring orders (the limit formula at integer order)
_INTEGER_BAND = 1e-5
_INTEGER_STEP = 1e-6

# Taylor coefficients c_k of 1/Gamma(x) = sum_k c_k x**k, for k = 1..28.
_RGAMMA_TAYLOR = (
    1.0,
    0.5772156649015328606065,
    -0.655878071520253881077,
    -0.042002635034095235529,
    0.1665386113822914895017,
    -0.04219773455554433674821,
    -0.009621971527876973562115,
    0.007218943246663099542395,
    -0.001165167591859065112114,
    -0.0002152416741149509728157,
    0.0001280502823881161861532,
    -0.00002013485478078823865569,
    -0.000001250493482142670657345,
    0.000001133027231981695882374,
    -2.05633841697760710345e-7,
    6.116095104481415817862e-9,
    5.002007644469222930056e-9,
    -1.181274570487020144588e-9,
    1.043426711691100510492e-10,
    7.78226343990507125405e-12,
    -3.696805618642205708188e-12,
    5.100370287454475979015e-13,
    -2.058326053566506783222e-14,
    -5.34812253942301798237e-15,
    1.226778628238260790159e-15,
    -1.181259301697458769514e-16,
    1.18669225475160033258e-18,
    1.412380655318031781556e-18,
)


def gamma_fn(x):
    """Gamma function for positive real ``x``."""
    x = check_finite_real(x, "x")
    if x <= 0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def _rgamma(x):
    """1/Gamma(x), zero at the poles and for huge x."""
    if x <= 0 and x == math.floor(x):
        return 0.0
    try:
        return 1.0 / math.gamma(x)
    except OverflowError:
        return 0.0


def _check_z(z):
    z = check_finite_real(z, "z")
    if z <= 0:
        raise DomainError(f"argument z must be positive, got {z}")
    return z


def _scalar_or_array(fn, nu, z):
    if np.ndim(z) == 0:
        return fn(nu, float(z))
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape)
    flat = out.reshape(-1)
    for k, zk in enumerate(z.reshape(-1)):
        flat[k] = fn(nu, float(zk))
    return out


# ---------------------------------------------------------------------------
# I_nu: ascending series


def _bessel_i_scalar(nu, z):
    nu = check_finite_real(nu, "nu")
    z = _check_z(z)
    half = 0.5 * z
    # at a negative integer order the first -nu terms vanish (1/Gamma poles)
    m = int(-nu) if (nu < 0 and nu == math.floor(nu)) else 0
    power = nu + 2 * m
    log_mag = power * math.log(half) - math.lgamma(m + 1)
    term = math.exp(log_mag) * _rgamma(nu + m + 1)
    total = term
    sq = half * half
    for _ in range(_MAX_TERMS):
        ratio = sq / ((m + 1) * (nu + m + 1))
        term *= ratio
        total += term
        m += 1
        if abs(term) <= _EPS * abs(total) and abs(ratio) < 0.5:
            return total
    raise AccuracyError(f"I_nu series for nu={nu}, z={z} did not converge in {_MAX_TERMS} terms")


def bessel_i(nu, z):
    """Modified Bessel function of the first kind, summed from its power series.

    Accepts a scalar or array ``z``.
    """
    return _scalar_or_array(_bessel_i_scalar, nu, z)


# ---------------------------------------------------------------------------
# K_nu: Temme series + Steed continued fraction


def _reduced_gammas(mu):
    """Return (gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)) for |mu| <= 1/2."""
    even = 0.0
    odd = 0.0
    mu2 = mu * mu
    # even part: sum c_{j+1} mu**j over even j; odd part: sum c_{j+1} mu**(j-1) over odd j
    for j in range(len(_RGAMMA_TAYLOR) - 1, -1, -1):
        c = _RGAMMA_TAYLOR[j]
        if j % 2 == 0:
            even = even * mu2 + c
        else:
            odd = odd * mu2 + c
    gam2 = even
    gam1 = -odd
    gampl = gam2 - mu * gam1
    gammi = gam2 + mu * gam1
    return gam1, gam2, gampl, gammi


def _temme_pair(mu, x):
    """Return (K_mu(x), K_{mu+1}(x)) for |mu| <= 1/2, 0 < x <= 2."""
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if pimu == 0.0 else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 if e == 0.0 else math.sinh(e) / e
    gam1, gam2, gampl, gammi = _reduced_gammas(mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    total = ff
    e = math.exp(e)
    p = 0.5 * e / gampl
    q = 0.5 / (e * gammi)
    c = 1.0
    d = x2 * x2
    total1 = p
    for i in range(1, _MAX_TERMS + 1):
        ff = (i * ff + p + q) / (i * i - mu * mu)
        c *= d / i
        p /= i - mu
        q /= i + mu
        delta = c * ff
        total += delta
        total1 += c * (p - i * ff)
        if abs(delta) < abs(total) * _EPS:
            return total, total1 * 2.0 / x
    raise AccuracyError(f"Temme series for K_{mu}({x}) did not converge")


def _steed_pair_scaled(mu, x):
    """Return (e^x K_mu(x), e^x K_{mu+1}(x)) for |mu| <= 1/2, x > 2."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25 - mu * mu
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _CF_MAXIT + 1):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:
        raise AccuracyError(f"continued fraction for K_{mu}({x}) did not converge")
    kmu = math.sqrt(math.pi / (2.0 * x)) / s
    k1 = kmu * (mu + x + 0.5 - a1 * h) / x
    return kmu, k1


def _bessel_k_scaled_scalar(nu, z):
    nu = abs(check_finite_real(nu, "nu"))
    z = _check_z(z)
    nl = int(nu + 0.5)
    mu = nu - nl
    if z <= 2.0:
        kmu, k1 = _temme_pair(mu, z)
        scale = math.exp(z)
        kmu *= scale
        k1 *= scale
    else:
        kmu, k1 = _steed_pair_scaled(mu, z)
    two_over_z = 2.0 / z
    for i in range(1, nl + 1):
        kmu, k1 = k1, (mu + i) * two_over_z * k1 + kmu
        if not math.isfinite(k1) and i < nl:
            raise OverflowError(f"K_nu overflows for nu={nu}, z={z}")
    if not math.isfinite(kmu):
        raise OverflowError(f"K_nu overflows for nu={nu}, z={z}")
    return kmu


def _bessel_k_scalar(nu, z):
    scaled = _bessel_k_scaled_scalar(nu, z)
    value = scaled * math.exp(-z)
    if not math.isfinite(value):
        raise OverflowError(f"K_nu overflows for nu={nu}, z={z}")
    return value


def bessel_k(nu, z):
    """Macdonald function K_nu(z) for real order and positive argument.

    The order is canonicalized to ``|nu|``, so ``bessel_k(-nu, z)`` is
    bit-identical to ``bessel_k(nu, z)``. Raises ``OverflowError`` rather than
    returning infinity.
    """
    return _scalar_or_array(_bessel_k_scalar, nu, z)


def bessel_k_scaled(nu, z):
    """Exponentially scaled Macdonald function ``exp(z) * K_nu(z)``."""
    return _scalar_or_array(_bessel_k_scaled_scalar, nu, z)


def log_bessel_k(nu, z):
    """``log K_nu(z)``, finite wherever the scaled value is representable."""
    return np.log(bessel_k_scaled(nu, z)) - np.asarray(z, dtype=float)


def _bessel_k_series_scalar(nu, z):
    nu = abs(check_finite_real(nu, "nu"))
    z = _check_z(z)
    nearest = round(nu)
    if abs(nu - nearest) < _INTEGER_BAND:
        lo = _reflection(nearest - _INTEGER_STEP, z)
        hi = _reflection(nearest + _INTEGER_STEP, z)
        return 0.5 * (lo + hi)
    return _reflection(nu, z)


def _reflection(nu, z):
    return 0.5 * math.pi * (_bessel_i_scalar(-nu, z) - _bessel_i_scalar(nu, z)) / math.sin(math.pi * nu)


def bessel_k_series(nu, z):
    """K_nu from ``pi/2 (I_{-nu} - I_nu) / sin(pi nu)``.

    Integer orders are handled by averaging orders ``n +/- 1e-6``, which costs
    roughly 1e-9 relative accuracy next to integers. Cancellation grows like
    ``exp(2z)``; use only for small ``z``.
    """
    return _scalar_or_array(_bessel_k_series_scalar, nu, z)


# ---------------------------------------------------------------------------
# quadrature oracle


def _bessel_k_oracle_scalar(nu, z):
    nu = abs(check_finite_real(nu, "nu"))
    z = _check_z(z)
    # K_nu(z) = int_0^inf cosh(nu t) exp(-z cosh t) dt   (u = e^t)
    peak = math.asinh(nu / z)

    def log_f(t):
        return nu * t - z * math.cosh(t) if t > 0 else -z * math.cosh(t)

    log_peak = max(log_f(peak), log_f(0.0))

    def f(t):
        return math.cosh(nu * t) * math.exp(-z * math.cosh(t) - log_peak)

    upper = peak + 1.0
    while nu * upper - z * math.cosh(upper) > log_peak - 40.0:
        upper *= 2.0
        if upper > 1e4:
            raise AccuracyError(f"oracle tail for K_{nu}({z}) does not decay")
    total = 0.0
    err = 0.0
    pieces = [0.0, peak, upper] if peak > 0 else [0.0, upper]
    for lo, hi in zip(pieces[:-1], pieces[1:]):
        if hi <= lo:
            continue
        val, abserr, info = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-13, limit=500, full_output=1)[:3]
        total += val
        err += abserr
    if not total > 0 or err > 1e-11 * total:
        raise AccuracyError(f"oracle quadrature for K_{nu}({z}) reached only {err / max(total, 1e-300):.1e}")
    return total * math.exp(log_peak)


def bessel_k_oracle(nu, z):
    """K_nu(z) by adaptive quadrature of ``int_0^inf cosh(nu t) exp(-z cosh t) dt``.

    Independent of ``bessel_k``; raises ``AccuracyError`` if the quadrature
    error estimate exceeds 1e-11 relative.
    """
    return _scalar_or_array(_bessel_k_oracle_scalar, nu, z)


# ---------------------------------------------------------------------------
# Gegenbauer polynomials


def gegenbauer(n, lam, u):
    """Gegenbauer polynomial P_n^lam(u) by forward three-term recurrence.

    ``u`` may be a scalar or array in [-1, 1].
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise DomainError(f"degree n must be a nonnegative integer, got {n!r}")
    lam = check_scalar_positive(lam, "lambda")
    u_arr = np.asarray(u, dtype=float)
    if np.any(np.isnan(u_arr)) or np.any(np.abs(u_arr) > 1.0):
        raise DomainError("u must lie in [-1, 1]")
    prev = np.ones_like(u_arr)
    if n == 0:
        return prev if u_arr.ndim else float(prev)
    cur = 2.0 * lam * u_arr
    for k in range(2, n + 1):
        prev, cur = cur, (2.0 * u_arr * (k + lam - 1.0) * cur - (k + 2.0 * lam - 2.0) * prev) / k
    return cur if u_arr.ndim else float(cur)


def gegenbauer_all(nmax, lam, u):
    """Array of shape ``(nmax + 1,) + u.shape`` holding P_0..P_nmax at ``u``."""
    lam = check_scalar_positive(lam, "lambda")
    u_arr = np.asarray(u, dtype=float)
    if np.any(np.isnan(u_arr)) or np.any(np.abs(u_arr) > 1.0):
        raise DomainError("u must lie in [-1, 1]")
    out = np.empty((nmax + 1,) + u_arr.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 2.0 * lam * u_arr
    for k in range(2, nmax + 1):
        out[k] = (2.0 * u_arr * (k + lam - 1.0) * out[k - 1] - (k + 2.0 * lam - 2.0) * out[k - 2]) / k
    return out


def gegenbauer_at_one(n, lam):
    """P_n^lam(1) = Gamma(n + 2 lam) / (n! Gamma(2 lam))."""
    return math.exp(math.lgamma(n + 2 * lam) - math.lgamma(n + 1) - math.lgamma(2 * lam))
