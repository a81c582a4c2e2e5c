"""p-adic L-functions of quaternionic modular forms over a Heegner field, computed
on the Bruhat-Tits tree and compared with Coleman integrals."""
from __future__ import annotations

__version__ = "0.1.0"
