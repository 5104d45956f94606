#!/usr/bin/env python3
"""Frozen reference values for pair-distance integrals over the unit square
and the unit disc.

Both integrals reduce to 1D quadrature against the known distance densities:

  unit square, d in [0,1]:      f(d) = 2d (d^2 - 4d + pi)
  unit square, d in [1,sqrt2]:  f(d) = 2d (4 sqrt(d^2-1) - (d^2+2-pi)
                                          - 4 atan(sqrt(d^2-1)))
  unit-radius disc, s in [0,2]: f(s) = (2s/pi) (2 acos(s/2) - (s/2) sqrt(4-s^2))

The densities are validated here by normalization and by the known mean
distance of the disc (128/(45 pi)).  Values are hard-coded in
tests/oracle_data.hpp.
"""
import mpmath as mp

mp.mp.dps = 30


def f_square(d):
    if d <= 1:
        return 2*d*(d*d - 4*d + mp.pi)
    t = mp.sqrt(d*d - 1)
    return 2*d*(4*t - (d*d + 2 - mp.pi) - 4*mp.atan(t))


def f_disc(s):
    return (2*s/mp.pi)*(2*mp.acos(s/2) - (s/2)*mp.sqrt(4 - s*s))


def sq_moment(p):
    """E |x-y|^p over independent uniform points of the unit square."""
    a = mp.quad(lambda d: f_square(d)*d**p, [0, 1])
    b = mp.quad(lambda d: f_square(d)*d**p, [1, mp.sqrt(2)])
    return a + b


def disc_moment(p):
    """E |x-y|^p over independent uniform points of the unit-radius disc."""
    return mp.quad(lambda s: f_disc(s)*s**p, [0, 1, 2])


if __name__ == "__main__":
    print("square density norm  =", mp.nstr(sq_moment(0), 20))
    print("disc density norm    =", mp.nstr(disc_moment(0), 20))
    print("disc mean distance   =", mp.nstr(disc_moment(1), 20),
          " (exact 128/(45 pi) =", mp.nstr(128/(45*mp.pi), 20), ")")
    for b2 in ['0.5', '1.0', '1.5']:
        v = sq_moment(-mp.mpf(b2))
        print(f"square E|x-y|^(-{b2}) =", mp.nstr(v, 20))
    # p = 2 min-distance integral over the disc: integral of |z1-z2|^(-beta^2)
    # over B(0,1)^2 equals pi^2 * E d^(-beta^2).
    for b2 in ['0.5', '1.0', '1.5']:
        v = mp.pi**2 * disc_moment(-mp.mpf(b2))
        print(f"disc pair integral beta2={b2}:", mp.nstr(v, 20))
