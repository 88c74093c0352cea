"""Shared fixtures: the study networks plus a few tiny hand-built ones."""

import numpy as np
import pytest

from bncritic import corpus
from bncritic.network import LATENT, OBSERVABLE, Cpt, Network, Variable


@pytest.fixture(scope="session")
def md():
    return corpus.build_md_model()


@pytest.fixture(scope="session")
def all_models():
    return corpus.corpus_networks()


@pytest.fixture(scope="session")
def single_obs_net():
    """One uniform 4-state observable, no latents."""
    return Network(
        (Variable("X", OBSERVABLE, ("a", "b", "c", "d")),),
        (Cpt("X", (), ((0.25, 0.25, 0.25, 0.25),)),),
    )


@pytest.fixture(scope="session")
def chain_net():
    """A uniform 2-state root, B deterministically copies A."""
    return Network(
        (
            Variable("A", OBSERVABLE, ("0", "1")),
            Variable("B", OBSERVABLE, ("0", "1")),
        ),
        (
            Cpt("A", (), ((0.5, 0.5),)),
            Cpt("B", ("A",), ((1.0, 0.0), (0.0, 1.0))),
        ),
    )


@pytest.fixture(scope="session")
def small_latent_net():
    """One 2-state latent driving two 3-state observables (exact oracles cheap)."""
    return Network(
        (
            Variable("skill", LATENT, ("low", "high")),
            Variable("Y1", OBSERVABLE, ("bad", "ok", "good")),
            Variable("Y2", OBSERVABLE, ("bad", "ok", "good")),
        ),
        (
            Cpt("skill", (), ((0.4, 0.6),)),
            Cpt("Y1", ("skill",), ((0.7, 0.2, 0.1), (0.1, 0.3, 0.6))),
            Cpt("Y2", ("skill",), ((0.5, 0.3, 0.2), (0.2, 0.2, 0.6))),
        ),
    )


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240824)
