#!/usr/bin/env python3
"""Derives the Daubechies extremal-phase scaling filter with 6 vanishing
moments (length 12) by spectral factorization of the half-band polynomial.

The binomial half-band polynomial P(y) = sum_k C(5+k,k) y^k is factored over
its roots; roots are mapped to the z-plane and the minimum-phase (|z| < 1)
factor is kept.  The resulting coefficients satisfy sum h = sqrt(2),
sum h^2 = 1 and the shift-orthogonality relations to ~30 digits; they are
hard-coded in src/besov.cpp.
"""
import mpmath as mp

mp.mp.dps = 50
N = 6

# P(y) = sum_{k=0}^{N-1} C(N-1+k, k) y^k
coeffs = [mp.binomial(N - 1 + k, k) for k in range(N)]
poly = list(reversed(coeffs))  # mpmath polyroots wants highest degree first
yroots = mp.polyroots(poly, maxsteps=200, extraprec=200)

zroots = []
for y in yroots:
    # y = (2 - z - 1/z)/4  =>  z^2 + (4y - 2) z + 1 = 0
    b = 4*y - 2
    disc = mp.sqrt(b*b - 4)
    for z in [(-b + disc)/2, (-b - disc)/2]:
        if abs(z) < 1:
            zroots.append(z)

assert len(zroots) == N - 1, len(zroots)

# m0(z) = c * (1+z)^N * prod (z - z_i); normalize so that sum h = sqrt(2)
poly = [mp.mpf(1)]
for _ in range(N):
    poly = [a + b for a, b in zip(poly + [mp.mpf(0)], [mp.mpf(0)] + poly)]
for zr in zroots:
    poly = [a - zr*b for a, b in zip(poly + [mp.mpc(0)], [mp.mpc(0)] + poly)]

h = [p.real for p in poly]
s = sum(h)
h = [x*mp.sqrt(2)/s for x in h]

if __name__ == "__main__":
    print("sum h          =", mp.nstr(sum(h), 25))
    print("sum h^2        =", mp.nstr(sum(x*x for x in h), 25))
    for m in range(1, N):
        dot = sum(h[k]*h[k + 2*m] for k in range(len(h) - 2*m))
        print(f"<h, h shift {2*m}> =", mp.nstr(dot, 5))
    for k, x in enumerate(h):
        print(f"h[{k:2d}] = {mp.nstr(x, 22)}")
