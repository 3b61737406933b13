"""Fixpoint semantics for Buchi- and parity-conditioned word and tree automata.

The package decides membership of finitely represented infinite inputs
(lasso words, regular trees) in ordinary and decorated trace semantics by
solving restricted hierarchical equation systems over finite lattices, and
ships independent graph-theoretic oracles plus a differential harness that
keeps the two routes honest against each other.
"""

__version__ = "0.1.0"

from . import automata, harness, hes, lattice, omega_input, oracle, trace  # noqa: F401
