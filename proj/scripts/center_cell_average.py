#!/usr/bin/env python3
"""Cell average of 1/|p|^2 over the unit cube [-1/2, 1/2]^3.

In spherical coordinates the radial integral of rho^2 * rho^-2 is just the
distance to the cube boundary, so the volume integral reduces to a surface
integral over the six faces.  For the face z = 1/2:

    int_face |p| * (1/2) / |p|^3 dA = (1/2) int int da db / (a^2 + b^2 + 1/4)

Summing six faces and substituting a = s/2, b = t/2 gives

    C = 3 * int_{[-1,1]^2} ds dt / (1 + s^2 + t^2)
      = 12 * int_{[0,1]^2} ds dt / (1 + s^2 + t^2)

A cell of side h then has average 1/rho^2 equal to C / h^2.  The value is
hard-coded as kCenterCellAverage in src/johnxform.cpp.
"""
import mpmath

mpmath.mp.dps = 30
inner = mpmath.quad(lambda s, t: 1 / (1 + s * s + t * t), [0, 1], [0, 1])
print(mpmath.nstr(12 * inner, 20))
