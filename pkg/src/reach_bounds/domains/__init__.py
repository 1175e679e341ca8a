"""Numeric abstract domains and their factory."""
from __future__ import annotations

from enum import Enum
from typing import Dict, Sequence, Type

from reach_bounds.core.errors import AnalysisConfigError
from reach_bounds.domains.base import AbstractDomain, AbstractElement, FinalOverlap, GuardStatus
from reach_bounds.domains.congruence import Congruence, CongruenceDomain, CongruenceMap
from reach_bounds.domains.interval import Interval, IntervalBox, IntervalDomain
from reach_bounds.domains.product import ProductDomain, ProductPair


class DomainName(str, Enum):
    INTERVAL = "interval"
    CONGRUENCE = "congruence"
    PRODUCT = "product"


_REGISTRY: Dict[DomainName, Type[AbstractDomain]] = {
    DomainName.INTERVAL: IntervalDomain,
    DomainName.CONGRUENCE: CongruenceDomain,
    DomainName.PRODUCT: ProductDomain,
}


def create_domain(name: str | DomainName, variables: Sequence[str]) -> AbstractDomain:
    """Instantiate the domain called ``name`` over ``variables``."""
    try:
        key = DomainName(name)
    except ValueError as err:
        choices = ", ".join(member.value for member in DomainName)
        raise AnalysisConfigError(f"Unknown domain '{name}'; choose one of {choices}") from err
    return _REGISTRY[key](variables)


__all__ = [
    "AbstractDomain",
    "AbstractElement",
    "Congruence",
    "CongruenceDomain",
    "CongruenceMap",
    "DomainName",
    "FinalOverlap",
    "GuardStatus",
    "Interval",
    "IntervalBox",
    "IntervalDomain",
    "ProductDomain",
    "ProductPair",
    "create_domain",
]
