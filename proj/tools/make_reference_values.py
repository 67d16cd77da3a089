#!/usr/bin/env python3
"""High-precision reference values for the test suite.

Independent implementations (direct products / series under mpmath, 50 digits)
of the quantities the C++ library computes. Run from the repo root:

    python3 tools/make_reference_values.py

and paste the printed constants into the tests. Kept in the repo so the frozen
numbers can always be regenerated and audited.
"""

import mpmath as mp

mp.mp.dps = 50

PI = mp.pi


def prime_function(zeta, rho, terms=500):
    """P(zeta) = (1 - zeta) * prod_{n>=1} (1 - rho^n zeta)(1 - rho^n / zeta)."""
    zeta = mp.mpc(zeta)
    acc = 1 - zeta
    for n in range(1, terms + 1):
        rn = mp.mpf(rho) ** n
        acc *= (1 - rn * zeta) * (1 - rn / zeta)
    return acc


def k_function(zeta, rho):
    """K(zeta) = zeta P'(zeta)/P(zeta), via numerical differentiation of the
    product itself (independent of the series form used by the library)."""
    zeta = mp.mpc(zeta)
    d = mp.diff(lambda z: prime_function(z, rho), zeta)
    return zeta * d / prime_function(zeta, rho)


def robin_constant(rho, terms=2000):
    """-(1/pi) * sum_{n>=1} log(1 - rho^n)."""
    return -sum(mp.log(1 - mp.mpf(rho) ** n) for n in range(1, terms + 1)) / PI


def min_image(w1, w2, h):
    """Reduce a displacement to [-pi, pi) x [-h/2, h/2)."""
    w1 = mp.mpf(w1) - 2 * PI * mp.floor((w1 + PI) / (2 * PI))
    w2 = mp.mpf(w2) - h * mp.floor((w2 + h / 2) / h)
    return w1, w2


def green(x, y, rho):
    """G(x, y) on the torus (0,2pi) x (0,-log rho):
    G = -(1/2pi) log|P(e^{i w_c})| - w2/(4pi) - w2^2/(4pi log rho),
    with w = x - y reduced to the centered cell and w_c = w1 + i w2."""
    h = -mp.log(rho)
    w1, w2 = min_image(x[0] - y[0], x[1] - y[1], h)
    zeta = mp.e ** (mp.mpc(0, 1) * (w1 + mp.mpc(0, 1) * w2))
    val = -mp.log(abs(prime_function(zeta, rho))) / (2 * PI)
    val -= w2 / (4 * PI)
    val -= w2 ** 2 / (4 * PI * mp.log(rho))
    return val


def ptilde_product(zeta, rho, terms=500):
    """Ptilde(zeta) = prod_{n>=1} (1 - rho^n zeta)(1 - rho^n / zeta): the prime
    function with its (1 - zeta) factor removed."""
    zeta = mp.mpc(zeta)
    acc = mp.mpc(1)
    for n in range(1, terms + 1):
        rn = mp.mpf(rho) ** n
        acc *= (1 - rn * zeta) * (1 - rn / zeta)
    return acc


def regular_part(w1, w2, rho):
    """H(w) = G(w) + (1/2pi) log|w| + |w|^2/(4pi log rho), as a smooth function
    of the literal displacement (no cell reduction): evaluated via the prime
    function with the 1/|w| singularity removed analytically through
    phi(w_c) = (1 - e^{i w_c})/(-i w_c)."""
    w1, w2 = mp.mpf(w1), mp.mpf(w2)
    wc = mp.mpc(w1, w2)
    zeta = mp.e ** (mp.mpc(0, 1) * wc)
    # P(zeta) = Ptilde(zeta) * phi(wc) * (-i wc):
    # log|P| = log|Ptilde| + log|phi| + log|wc|
    ptilde = ptilde_product(zeta, rho)
    phi = mp.mpc(1) if wc == 0 else (1 - zeta) / (-mp.mpc(0, 1) * wc)
    val = -(mp.log(abs(ptilde)) + mp.log(abs(phi))) / (2 * PI)
    val -= w2 / (4 * PI)
    val += w1 ** 2 / (4 * PI * mp.log(rho))
    return val


def fmt(name, v):
    if isinstance(v, mp.mpc):
        print(f"{name} = {mp.nstr(v.real, 22)} {'+' if v.imag >= 0 else '-'} {mp.nstr(abs(v.imag), 22)}i")
    else:
        print(f"{name} = {mp.nstr(v, 22)}")


print("== prime function ==")
fmt("P(-1, rho=0.3)      ", prime_function(-1, '0.3'))
fmt("P(0.8 e^{i pi/7}, rho=0.55)", prime_function(mp.mpf('0.8') * mp.e ** (mp.mpc(0, 1) * PI / 7), '0.55'))

print("\n== K function ==")
fmt("K(0.7 e^{i pi/5}, rho=0.45)", k_function(mp.mpf('0.7') * mp.e ** (mp.mpc(0, 1) * PI / 5), '0.45'))
fmt("K(-1, rho=0.37) [expect 1/2]", k_function(-1, '0.37'))

print("\n== Robin constant ==")
fmt("robin(0.5)", robin_constant('0.5'))
fmt("robin(0.3)", robin_constant('0.3'))

print("\n== Green function, x=(1.0,0.5), y=(2.2,0.9), rho=0.3 ==")
g = green((mp.mpf('1.0'), mp.mpf('0.5')), (mp.mpf('2.2'), mp.mpf('0.9')), '0.3')
fmt("G", g)

print("\n== regular part H(w), smooth extension ==")
pts = [
    ('0.3', '-1.2', '-0.4'),   # the Green example displacement
    ('0.3', '2.5', '0.9'),     # outside the centered cell in w1
    ('0.3', '-3.5', '-1.1'),   # outside in both
    ('0.5', '4.0', '-0.5'),
    ('0.5', '0.0', '0.0'),     # H(0) = robin constant
]
for rho, a, b in pts:
    val = regular_part(a, b, rho)
    d1 = mp.diff(lambda t: regular_part(t, b, rho), mp.mpf(a))
    d2 = mp.diff(lambda t: regular_part(a, t, rho), mp.mpf(b))
    fmt(f"H ({a},{b}) rho={rho} ", val)
    fmt(f"dH1({a},{b}) rho={rho} ", d1)
    fmt(f"dH2({a},{b}) rho={rho} ", d2)

print("\n== interaction energy, N=2, kappa=(1,1), rho=0.3 ==")
print("positions x1=(1.0,0.5), x2=(2.2,0.9)")
w = g + robin_constant('0.3')
fmt("W = G + robin", w)
