from typing import Union

from src.domains.schema import Domain, PusherParams, SkirmishParams
from src.domains.services.pusher import PusherDomain
from src.domains.services.skirmish import SkirmishDomain
from src.utils.errors import DomainError


def build_domain(params: Union[SkirmishParams, PusherParams]) -> Domain:
    if isinstance(params, SkirmishParams):
        return SkirmishDomain(params)
    return PusherDomain(params)


def default_domain(name: str) -> Domain:
    """Domain with default rules, enough to decode stored solutions."""
    if name == "skirmish":
        return SkirmishDomain(SkirmishParams())
    if name == "pusher":
        return PusherDomain(PusherParams())
    raise DomainError(f"unknown domain {name!r}")
