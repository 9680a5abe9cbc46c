#!/usr/bin/env python3
"""Regenerates crates/core/tests/data/fso_fixtures.txt with mpmath.

Term-by-term sums of the estimated-SNR density and CDF series at the default
Malaga parameters, truncated at K = 80 like the library default.

Line format: r rho mean_snr gamma | pdf | cdf | z0
"""
from pathlib import Path

import mpmath as mp

mp.mp.dps = 30
OUT = Path(__file__).resolve().parent.parent / "crates/core/tests/data/fso_fixtures.txt"

alpha, beta = mp.mpf("2.296"), 2
Omega, b0, rho0 = mp.mpf("1.3265"), mp.mpf("0.1079"), mp.mpf("0.596")
g = 2 * b0 * (1 - rho0)
Om1 = Omega + 2 * b0 * rho0  # cos(pi/2) = 0
Il, A0, xi = mp.mpf("0.9"), 1, mp.mpf("6.7")
K = 80

A_D = 2 * alpha ** (alpha / 2) / (g ** (1 + alpha / 2) * mp.gamma(alpha)) * (g * beta / (g * beta + Om1)) ** (beta + alpha / 2)
B_D = xi**2 * A_D * 2 ** (alpha - mp.mpf("4.5")) / mp.pi ** mp.mpf("1.5")


def b_h(h):
    return (
        mp.factorial(beta - 1) * (g * beta + Om1) ** (1 - mp.mpf(h) / 2) * alpha ** (mp.mpf(h) / 2) * Om1 ** (h - 1)
        / (mp.factorial(h - 1) ** 2 * mp.factorial(beta - h) * beta ** (mp.mpf(h) / 2) * g ** (h - 1))
        * (alpha * beta / (g * beta + Om1)) ** (-(alpha + h) / 2)
    )


def g_k(k, h, rho):
    d = alpha * beta / ((g * beta + Om1) * Il * A0 * rho)
    z = 8 / (d**2 * (1 - rho**2))
    xi2 = xi**2
    a = [(1 - xi2) / 2, (2 - xi2) / 2, (1 - alpha) / 2, (2 - alpha) / 2, mp.mpf(1 - h) / 2, mp.mpf(2 - h) / 2]
    b = [mp.mpf(k) / 2, -xi2 / 2, (1 - xi2) / 2]
    return mp.meijerg([a, []], [[b[0]], b[1:]], z)


def series(r, rho, mean, gam):
    psi1 = 1 / (2 * mean ** (mp.mpf(2) / r) * (1 - rho**2))
    pdf = cdf_tail = z0 = mp.mpf(0)
    for h in range(1, beta + 1):
        bh = b_h(h)
        for k in range(K + 1):
            G = g_k(k, h, rho)
            phi1 = 2 ** (mp.mpf(k) / 2 + h) * G / (r * mp.factorial(k) * mean ** (mp.mpf(1 + k) / r) * (1 - rho**2) ** (mp.mpf(k + 1) / 2))
            pdf += bh * phi1 * mp.exp(-psi1 * gam ** (mp.mpf(2) / r)) * gam ** (mp.mpf(k + 1) / r - 1)
            H1 = bh * 2 ** (k + h - mp.mpf("0.5")) * G / mp.factorial(k)
            a = mp.mpf(k + 1) / 2
            z0 += H1 * mp.gamma(a)
            cdf_tail += H1 * mp.gammainc(a, psi1 * gam ** (mp.mpf(2) / r))
    pdf *= B_D
    z0 *= B_D
    cdf = 1 - B_D * cdf_tail
    return pdf, cdf, z0


with OUT.open("w") as f:
    f.write("# r rho mean_snr gamma | pdf | cdf | z0\n")
    f.write("# generated by tools/gen_fso_fixtures.py (mpmath, 30 digits, K = 80)\n")
    for r in (1, 2):
        for gam in ("1", "0.2"):
            pdf, cdf, z0 = series(r, mp.mpf("0.5"), mp.mpf(1), mp.mpf(gam))
            f.write(f"{r} 0.5 1 {gam} | {mp.nstr(pdf, 20)} | {mp.nstr(cdf, 20)} | {mp.nstr(z0, 20)}\n")
            f.flush()
print("wrote", OUT)
