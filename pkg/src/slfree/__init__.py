"""Exact-arithmetic tools for U(h)-free rank-(k|k) modules over sl(m|1).

Subpackages by concern: `polyring` (rational multivariate polynomials and
shift automorphisms), `gpm` (generalized permutation matrices and companion
pairs), `superfree` (module construction, shift-twisted operator algebra,
relation verification, duality, decomposition), `expmod` (exponential-type
modules, residue combinatorics, summands), `homsolver` (exact Hom/End
computation and isomorphism criteria), `weylsim` (independent truncated
differential-operator oracle), `cli` (JSON command-line front end).
"""

__version__ = "0.1.0"
