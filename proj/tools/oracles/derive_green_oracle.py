#!/usr/bin/env python3
"""Frozen reference values for the Dirichlet Green function of the unit square.

Route: conformal map of the unit square onto the upper half-plane by the
Jacobi elliptic sine with aspect-ratio-2 modulus (K'/K = 2), pulled back
through the half-plane Green function  G(Z,W) = log|Z - conj(W)| - log|Z - W|.
This is independent of the eigenfunction series used by the library and is
accurate to ~30 digits.  Values printed here are hard-coded in
tests/oracle_data.hpp.

Convention: G ~ -log|x-y| near the diagonal (the series carries a 2*pi
factor relative to the -Delta Green function).  log CR is the diagonal
limit of G(x,y) + log|x-y|.
"""
import mpmath as mp

mp.mp.dps = 40

mstar = mp.findroot(lambda m: mp.ellipk(1 - m) - 2*mp.ellipk(m), mp.mpf('0.03'))
K = mp.ellipk(mstar)
sn = mp.ellipfun('sn')
cn = mp.ellipfun('cn')
dn = mp.ellipfun('dn')


def zeta(z):
    return sn(2*K*z - K, m=mstar)


def dzeta(z):
    u = 2*K*z - K
    return 2*K*cn(u, m=mstar)*dn(u, m=mstar)


def green(x, y):
    Z, W = zeta(mp.mpc(*x)), zeta(mp.mpc(*y))
    return mp.log(abs(Z - mp.conj(W))) - mp.log(abs(Z - W))


def logcr(x):
    z = mp.mpc(*x)
    return mp.log(2*mp.im(zeta(z))) - mp.log(abs(dzeta(z)))


if __name__ == "__main__":
    print("mstar =", mp.nstr(mstar, 25))
    for p in [(0.5, 0.5), (0.3, 0.7), (0.25, 0.4), (0.1, 0.5)]:
        print(f"logcr{p} = {mp.nstr(logcr(p), 22)}")
    pairs = [((0.5, 0.5), (0.5, 0.501)),
             ((0.3, 0.7), (0.6, 0.4)),
             ((0.01, 0.5), (0.012, 0.503)),
             ((0.25, 0.65), (0.4, 0.3)),
             ((0.125, 0.25), (0.8, 0.9))]
    for x, y in pairs:
        print(f"green{x},{y} = {mp.nstr(green(x, y), 22)}")
