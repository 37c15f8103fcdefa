"""Exhaustive oracle solvers and the seeded noisy actor."""

from .noisy import MutationKind, mutation_candidates, noisy_actor_step
from .oracle import enumerate_all, max_friends_met, solve

__all__ = [
    "MutationKind",
    "enumerate_all",
    "max_friends_met",
    "mutation_candidates",
    "noisy_actor_step",
    "solve",
]
