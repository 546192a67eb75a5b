"""Shipped problem decoders, instance parsers, and brute-force oracles."""

from .hubtree import (
    HubTreeDecoder,
    HubTreeInstance,
    brute_force_hubtree,
    parse_hubtree,
    plain_routing_cost,
    write_hubtree,
)
from .partition import (
    PartitionDecoder,
    PartitionInstance,
    brute_force_partition,
    cut_value,
    parse_partition,
    write_partition,
)
from .pmedian import (
    PMedianDecoder,
    PMedianInstance,
    assignment_cost,
    brute_force_pmedian,
    parse_orlib_pmed,
    write_orlib_pmed,
)
from .setcover import (
    SetCoverDecoder,
    SetCoverInstance,
    brute_force_setcover,
    parse_setcover,
    write_setcover,
)
from .tsp import TspDecoder, TspInstance, brute_force_tsp, parse_tsp, write_tsp

PROBLEM_IDS = ("tsp", "setcover", "pmedian", "partition", "hubtree")

_PARSERS = {
    "tsp": parse_tsp,
    "setcover": parse_setcover,
    "pmedian": parse_orlib_pmed,
    "partition": parse_partition,
    "hubtree": parse_hubtree,
}

_DECODERS = {
    "tsp": TspDecoder,
    "setcover": SetCoverDecoder,
    "pmedian": PMedianDecoder,
    "partition": PartitionDecoder,
    "hubtree": HubTreeDecoder,
}

_ORACLES = {
    "tsp": brute_force_tsp,
    "setcover": brute_force_setcover,
    "pmedian": brute_force_pmedian,
    "partition": brute_force_partition,
    "hubtree": brute_force_hubtree,
}


def load_instance(problem_id: str, path, alpha: int | None = None):
    """Parse an instance file for the given problem id."""
    if problem_id not in _PARSERS:
        raise ValueError(f"unknown problem: {problem_id} (choose from {PROBLEM_IDS})")
    if problem_id == "pmedian":
        return parse_orlib_pmed(path, alpha=alpha if alpha is not None else 1)
    return _PARSERS[problem_id](path)


def make_decoder(problem_id: str, instance):
    if problem_id not in _DECODERS:
        raise ValueError(f"unknown problem: {problem_id} (choose from {PROBLEM_IDS})")
    return _DECODERS[problem_id](instance)


def brute_force(problem_id: str, instance):
    """Exact optimum (objective, certificate); guarded against instances too
    large to enumerate."""
    if problem_id not in _ORACLES:
        raise ValueError(f"unknown problem: {problem_id} (choose from {PROBLEM_IDS})")
    return _ORACLES[problem_id](instance)


__all__ = [
    "PROBLEM_IDS",
    "load_instance",
    "make_decoder",
    "brute_force",
    "TspInstance",
    "TspDecoder",
    "parse_tsp",
    "write_tsp",
    "brute_force_tsp",
    "SetCoverInstance",
    "SetCoverDecoder",
    "parse_setcover",
    "write_setcover",
    "brute_force_setcover",
    "PMedianInstance",
    "PMedianDecoder",
    "assignment_cost",
    "parse_orlib_pmed",
    "write_orlib_pmed",
    "brute_force_pmedian",
    "PartitionInstance",
    "PartitionDecoder",
    "cut_value",
    "parse_partition",
    "write_partition",
    "brute_force_partition",
    "HubTreeInstance",
    "HubTreeDecoder",
    "plain_routing_cost",
    "parse_hubtree",
    "write_hubtree",
    "brute_force_hubtree",
]
