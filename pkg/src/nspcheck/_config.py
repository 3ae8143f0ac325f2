"""Process-wide settings read from the environment.

``NSPCHECK_PRIME``          default characteristic of the working field (32003)
``NSPCHECK_DISABLE_NUMBA``  set to 1 to force the pure-numpy kernels
"""

from __future__ import annotations

import os

# p^2 times the number of lazy updates per row must stay below 2**63.
MAX_PRIME = 1 << 20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> int:
    p = int(p)
    if not is_prime(p) or p > MAX_PRIME:
        raise ValueError(f"working characteristic must be a prime below {MAX_PRIME}, got {p}")
    return p


def _env_prime() -> int:
    raw = os.environ.get("NSPCHECK_PRIME", "")
    return check_prime(int(raw)) if raw else 32003


DEFAULT_PRIME = _env_prime()

# Used by the multi-prime audit after the working prime.
AUDIT_PRIMES = (32003, 31991, 32009, 65521, 10007)


def numba_requested() -> bool:
    return os.environ.get("NSPCHECK_DISABLE_NUMBA", "").strip().lower() in ("", "0", "false", "no")


def audit_primes(n: int, first: int | None = None) -> list[int]:
    """``n`` distinct primes, starting with ``first`` (the working prime)."""
    out = [check_prime(first if first is not None else DEFAULT_PRIME)]
    for q in AUDIT_PRIMES:
        if len(out) >= n:
            break
        if q not in out:
            out.append(q)
    if len(out) < n:
        raise ValueError(f"at most {len(AUDIT_PRIMES)} audit primes are configured")
    return out
