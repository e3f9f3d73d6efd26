"""
Closed-form detection probabilities
Cascade N-port and non-deterministic chain formulas, evaluated directly
"""
import itertools
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from src.utils.exceptions import DomainError, InfeasibleUniformityError


UNIFORMITY_SLACK    = 1e-12
SINGULAR_MARGIN     = 1e-9


@dataclass(frozen=True)
class PerceivedCountQuery:
    """Parameters of a perceived-count probability"""
    n: int
    k: int                  = 1
    ports: Optional[int]    = None
    eta_ref: float          = 1.0
    eta_eff: float          = 1.0

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"Photon number must be non-negative, got {self.n}")
        if self.k < 1:
            raise DomainError(f"Target count must be positive, got {self.k}")
        if self.ports is not None and self.ports < 1:
            raise DomainError(f"Port count must be positive, got {self.ports}")
        _check_probability("eta_ref", self.eta_ref)
        _check_probability("eta_eff", self.eta_eff)

    @property
    def p_trig(self) -> float:
        """Probability a single photon triggers a given '>0' detector"""
        return self.eta_ref * self.eta_eff

    @property
    def p_loss(self) -> float:
        """Probability a single photon goes undetected"""
        return 1.0 - self.eta_eff


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


def cascade_prob_correct(n: int, N: int, eta_eff: float) -> float:
    """
    Probability that an N-port cascade reports exactly the n incident photons

    P(m=n) = eta_eff^n N! / (N^n (N-n)!), evaluated as a running product so
    large N stays exact to double precision.

    Args:
        n: Incident photons
        N: Number of output ports
        eta_eff: Detector efficiency

    Returns:
        P(m=n)

    Raises:
        DomainError: If n > N or the arguments are out of range
    """
    PerceivedCountQuery(n=n, ports=N, eta_eff=eta_eff)
    if n > N:
        raise DomainError(f"{n} photons cannot all be resolved by {N} ports")

    distinct = 1.0
    for i in range(n):
        distinct *= (N - i) / N
    return eta_eff ** n * distinct


def cascade_limit_table(n: int, ports: Sequence[int]) -> List[Tuple[int, float]]:
    """P(m=n) with perfect detectors for growing port counts"""
    return [(N, cascade_prob_correct(n, N, 1.0)) for N in ports]


def chain_prob_m1_sum(n: int, eta_ref: float, eta_eff: float) -> float:
    """
    Binomial-sum form of P(m=1) for the single-stage chain

    sum_{i=1..n} C(n,i) (eta_ref eta_eff)^i (1-eta_eff)^(n-i)
    """
    query = PerceivedCountQuery(n=n, eta_ref=eta_ref, eta_eff=eta_eff)
    return math.fsum(
        math.comb(n, i) * query.p_trig ** i * query.p_loss ** (n - i)
        for i in range(1, n + 1)
    )


def chain_prob_m1(n: int, eta_ref: float, eta_eff: float) -> float:
    """
    P(m=1): one '>0' detector clicks and the transmitted detector stays silent

    Uses (1-eta_eff)^n [(1 + eta_eff eta_ref / (1-eta_eff))^n - 1], falling back
    to the binomial sum when 1 - eta_eff < 1e-9.

    Args:
        n: Incident photons
        eta_ref: Beamsplitter reflectivity
        eta_eff: Detector efficiency

    Returns:
        P(m=1)
    """
    query = PerceivedCountQuery(n=n, eta_ref=eta_ref, eta_eff=eta_eff)
    if n == 0:
        return 0.0
    if query.p_loss < SINGULAR_MARGIN:
        return chain_prob_m1_sum(n, eta_ref, eta_eff)

    ratio = 1.0 + query.p_trig / query.p_loss
    return query.p_loss ** n * (ratio ** n - 1.0)


def trigger_compositions(n: int, k: int) -> Iterator[Tuple[int, ...]]:
    """All (n_1, ..., n_k) with every n_i >= 1 and sum <= n"""
    if k > n:
        return
    for combo in itertools.product(range(1, n - k + 2), repeat=k):
        if sum(combo) <= n:
            yield combo


def multinomial(n: int, parts: Sequence[int]) -> int:
    """n! / (prod parts! * (n - sum parts)!)"""
    rest = n - sum(parts)
    if rest < 0:
        return 0
    value = math.factorial(n) // math.factorial(rest)
    for part in parts:
        value //= math.factorial(part)
    return value


def chain_prob_mk(n: int, k: int, eta_ref: float, eta_eff: float) -> float:
    """
    P(m=k) for a k-stage chain with uniform arrival statistics

    Sum over n_1..n_k >= 1 of the multinomial coefficient
    n! / (n_1! ... n_k! n_loss!) times (eta_ref eta_eff)^n_trig (1-eta_eff)^n_loss.

    Args:
        n: Incident photons
        k: Number of '>0' detectors
        eta_ref: First reflectivity, also the per-detector arrival probability
        eta_eff: Detector efficiency

    Returns:
        P(m=k)

    Raises:
        InfeasibleUniformityError: If k * eta_ref > 1
    """
    query = PerceivedCountQuery(n=n, k=k, eta_ref=eta_ref, eta_eff=eta_eff)
    if k * eta_ref > 1.0 + UNIFORMITY_SLACK:
        raise InfeasibleUniformityError(
            f"{k} detectors with arrival probability {eta_ref} each exceed unity"
        )

    terms = []
    for parts in trigger_compositions(n, k):
        triggered   = sum(parts)
        lost        = n - triggered
        terms.append(
            multinomial(n, parts) * query.p_trig ** triggered * query.p_loss ** lost
        )
    return math.fsum(terms)
