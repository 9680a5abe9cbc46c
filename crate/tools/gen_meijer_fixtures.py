#!/usr/bin/env python3
"""Regenerates crates/specfun/data/meijer_fixtures.txt with mpmath.

Line format: m n p q | a... | b... | z | expected | rel_tol

Cancelling parameter pairs are dropped before calling mpmath (its series
path cannot handle them); the fixture line keeps the full parameter list.
Kernels of the secrecy-outage shape are cross-checked against the integral
they represent before being written.
"""
import sys
from pathlib import Path

import mpmath as mp

mp.mp.dps = 30

OUT = Path(__file__).resolve().parent.parent / "crates/specfun/data/meijer_fixtures.txt"


def reduce(m, n, a, b):
    a, b = list(a), list(b)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for k in range(m, len(b)):
                if a[i] == b[k]:
                    del a[i], b[k]
                    n -= 1
                    changed = True
                    break
            if changed:
                break
        if changed:
            continue
        for i in range(n, len(a)):
            for k in range(m):
                if a[i] == b[k]:
                    del a[i], b[k]
                    m -= 1
                    changed = True
                    break
            if changed:
                break
    return m, n, a, b


def meijer(m, n, a, b, z):
    m, n, a, b = reduce(m, n, a, b)
    return mp.meijerg([a[:n], a[n:]], [b[:m], b[m:]], z)


def delta(k, a):
    return [mp.mpf(a + i) / k for i in range(k)]


def fmt(x):
    return mp.nstr(mp.mpf(x), 17, min_fixed=-4, max_fixed=6) if not isinstance(x, str) else x


cases = []


def add(m, n, a, b, z, tol, note):
    a = [mp.mpf(x) for x in a]
    b = [mp.mpf(x) for x in b]
    z = mp.mpf(z)
    v = meijer(m, n, a, b, z)
    cases.append((m, n, a, b, z, v, tol, note))


# incomplete-gamma shape
for a_ in ("0.5", "1", "2.5"):
    for z in ("0.1", "1", "10"):
        add(1, 1, [1], [a_, 0], z, 1e-8, "lower incomplete gamma")

add(1, 0, [], [0], 2, 1e-8, "exponential")
add(2, 0, [], ["0.8", "0.3"], "0.5", 1e-7, "Bessel K")
add(1, 1, ["0.3"], ["0.45"], "4", 1e-7, "rational")
add(1, 2, [1, 1], [1, 0], "0.9", 1e-7, "log(1+z)")

# k-series kernel at the default Malaga parameters
alpha, beta = mp.mpf("2.296"), 2
Omega, b0, rho0 = mp.mpf("1.3265"), mp.mpf("0.1079"), mp.mpf("0.596")
g = 2 * b0 * (1 - rho0)
Om1 = Omega + 2 * b0 * rho0
Il, A0 = mp.mpf("0.9"), 1


def gk_case(k, h, rho, xi):
    rho, xi = mp.mpf(rho), mp.mpf(xi)
    d = alpha * beta / ((g * beta + Om1) * Il * A0 * rho)
    z = 8 / (d**2 * (1 - rho**2))
    xi2 = xi**2
    a = [(1 - xi2) / 2, (2 - xi2) / 2, (1 - alpha) / 2, (2 - alpha) / 2, mp.mpf(1 - h) / 2, mp.mpf(2 - h) / 2]
    b = [mp.mpf(k) / 2, -xi2 / 2, (1 - xi2) / 2]
    v = meijer(1, 6, a, b, z)
    cases.append((1, 6, a, b, z, v, 1e-6, f"G_k k={k} h={h} rho={rho} xi={xi}"))


gk_case(0, 1, "0.5", "6.7")
gk_case(1, 2, "0.5", "6.7")
gk_case(10, 1, "0.5", "6.7")
gk_case(3, 2, "0.3", "6.7")
gk_case(7, 1, "0.8", "6.7")
gk_case(2, 1, "0.5", "1.1")


def sop_case(r, k, s, phi1, c):
    """G^{r,r+2}_{r+2,2r} at the argument produced by the integral
    int_0^inf g^{s-1} e^{-phi1 g} gamma((k+1)/2, c g^{2/r}) dg."""
    phi1, c = mp.mpf(phi1), mp.mpf(c)
    kk = mp.mpf(k + 1) / 2
    a = delta(r, 1) + delta(2, 1 - s)
    b = delta(r, kk) + delta(r, 0)
    z = 4 * c**r / (r**r * phi1**2)
    v = meijer(r, r + 2, a, b, z)
    integral = mp.quad(
        lambda x: x ** (s - 1) * mp.exp(-phi1 * x) * mp.gammainc(kk, 0, c * x ** (mp.mpf(2) / r)),
        [0, 1, 5, 20, mp.inf],
    )
    pref = phi1 ** (-s) * mp.mpf(r) ** (mp.mpf(k) / 2) * mp.mpf(2) ** (s - mp.mpf(1) / 2) / (2 * mp.pi) ** (mp.mpf(r) / 2)
    if abs(integral / (pref * v) - 1) > mp.mpf("1e-12"):
        sys.exit(f"kernel cross-check failed for r={r} k={k} s={s}")
    cases.append((r, r + 2, a, b, z, v, 1e-6, f"SOP kernel r={r} k={k} s={s}"))


sop_case(1, 0, 3, "1.7", "0.4")
sop_case(1, 5, 4, "9.5", "0.05")
sop_case(1, 2, 7, "3.0", "2.0")
sop_case(2, 0, 3, "1.7", "0.4")
sop_case(2, 1, 4, "6.2", "0.3")
sop_case(2, 4, 5, "2.5", "1.1")
sop_case(2, 9, 6, "12.0", "0.02")

with OUT.open("w") as f:
    f.write("# m n p q | a... | b... | z | expected | rel_tol\n")
    f.write("# generated by tools/gen_meijer_fixtures.py (mpmath, 30 digits)\n")
    for m, n, a, b, z, v, tol, note in cases:
        f.write(f"# {note}\n")
        f.write(
            f"{m} {n} {len(a)} {len(b)} | {' '.join(fmt(x) for x in a)} | {' '.join(fmt(x) for x in b)}"
            f" | {fmt(z)} | {mp.nstr(v, 20)} | {tol:g}\n"
        )
print(f"wrote {len(cases)} cases to {OUT}")
