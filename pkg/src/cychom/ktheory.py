"""K-groups of Z/p^n assembled from relative cyclic homology.

The bridge from relative K-theory to relative cyclic homology holds in a
degree range controlled by the prime and the nilpotency of the ideal; the
two rational bounds are tracked exactly in a RangeCertificate.  The final
closed form uses one imported fact that this package cannot verify: the
p-part of each K-group in range is cyclic.  Outputs relying on it are
tagged AXIOM-TC in their provenance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple

from .cyclic import hc_relative
from .dga import reduction_map
from .errors import CychomError, InvalidParams, OutOfRange, RangeEmpty
from .intlin import AbelianGroup, is_prime

ISO = "ISO"
SURJECTION = "SURJECTION"
UNVERIFIED = "UNVERIFIED"


@dataclass(frozen=True)
class RangeCertificate:
    """Degree ranges where relative K equals (or surjects onto) relative HC.

    iso_below and surj_below are the exact rational bounds p/(m-1) - 2 and
    p/(m-1) - 1; both comparisons are strict.
    """

    p: int
    m: int
    iso_below: Fraction
    surj_below: Fraction

    def is_iso(self, i: int) -> bool:
        return 0 <= i < self.iso_below

    def is_surjection(self, i: int) -> bool:
        return 0 <= i < self.surj_below

    def flag(self, i: int) -> str:
        if self.is_iso(i):
            return ISO
        if self.is_surjection(i):
            return SURJECTION
        return UNVERIFIED


def goodwillie_range(p: int, m: int) -> RangeCertificate:
    """Certificate for a ring with an ideal of nilpotency degree m at p."""
    if not is_prime(p):
        raise InvalidParams(f"{p} is not prime")
    if m < 2:
        raise InvalidParams(f"nilpotency degree {m} < 2")
    base = Fraction(p, m - 1)
    return RangeCertificate(p=p, m=m, iso_below=base - 2, surj_below=base - 1)


def relative_k(
    p: int, n: int, i: int, bound: int = None
) -> Tuple[AbelianGroup, str]:
    """The p-part of relative cyclic homology in degree i-1, with the
    certificate flag saying how it relates to relative K-theory in degree i.

    Uses the square-zero ideal p^{n-1} Z/p^n, so the certificate is always
    the m = 2 one.
    """
    if not is_prime(p):
        raise InvalidParams(f"{p} is not prime")
    if n < 2:
        raise InvalidParams(f"level n = {n} < 2: no ideal to compare along")
    if i < 1:
        raise InvalidParams(f"degree {i} < 1")
    group = hc_relative(reduction_map(p ** n, p ** (n - 1)), i - 1, bound)
    return group.p_part(p), goodwillie_range(p, 2).flag(i)


def _check_range(p: int, n: int, i: int):
    if not is_prime(p):
        raise InvalidParams(f"{p} is not prime")
    if n < 1:
        raise InvalidParams(f"level n = {n} < 1")
    if i < 1 or i > p - 3:
        raise OutOfRange(f"degree {i} outside 1 <= i <= {p - 3} for p = {p}")


def k_group(p: int, n: int, i: int, cross_check: bool = False) -> AbelianGroup:
    """K_i(Z/p^n) for 1 <= i <= p-3.

    Zero in even degrees; cyclic of order p^{j(n-1)} (p^j - 1) for i = 2j-1.
    With cross_check the p-part's order is re-derived by induction on the
    level, multiplying the relative contributions computed from scratch.
    """
    _check_range(p, n, i)
    if i % 2 == 0:
        return AbelianGroup.trivial()
    j = (i + 1) // 2
    p_order = p ** (j * (n - 1))
    if cross_check:
        derived = 1
        for level in range(2, n + 1):
            rel, flag = relative_k(p, level, i)
            if flag != ISO:
                raise CychomError(
                    f"degree {i} left the isomorphism range at level {level}"
                )
            derived *= rel.order()
        if derived != p_order:
            raise CychomError(
                f"inductive p-part order {derived} != closed form {p_order}"
            )
    return AbelianGroup.cyclic(p_order * (p ** j - 1))


@dataclass(frozen=True)
class KTableEntry:
    degree: int
    group: AbelianGroup
    provenance: Tuple[str, ...]


def k_table(p: int, n: int) -> Dict[int, KTableEntry]:
    """The full K-group table of Z/p^n over 1 <= i <= p-3.

    Each odd entry carries its provenance chain: the relative cyclic
    homology group consumed at each level of the induction, the base-level
    input for the prime-to-p part, and the AXIOM-TC cyclicity assumption.
    """
    if not is_prime(p):
        raise InvalidParams(f"{p} is not prime")
    if n < 1:
        raise InvalidParams(f"level n = {n} < 1")
    if p <= 3:
        raise RangeEmpty(f"range 1 <= i <= p-3 is empty for p = {p}")
    table: Dict[int, KTableEntry] = {}
    for i in range(1, p - 2):
        if i % 2 == 0:
            table[i] = KTableEntry(i, AbelianGroup.trivial(), ("even degree: 0",))
            continue
        j = (i + 1) // 2
        chain = [
            f"prime-to-p part: Z/{p ** j - 1} from the level-1 groups",
        ]
        for level in range(2, n + 1):
            rel, flag = relative_k(p, level, i)
            chain.append(
                f"level {level}: relative contribution {rel} [{flag}]"
            )
        chain.append("AXIOM-TC: p-part taken cyclic (imported, not computed)")
        table[i] = KTableEntry(i, k_group(p, n, i), tuple(chain))
    return table
