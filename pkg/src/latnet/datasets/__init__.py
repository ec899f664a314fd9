"""Bundled example networks.

- ``zachary``: Zachary's karate club (34 actors, 78 edges).
- ``florentine``: Florentine families marriage network (15 actors).
- ``village``: synthetic stand-in for a village friendship network with
  planted community structure (99 actors); generated, not survey data.
"""

from importlib import resources

from ..network import Network, load_edge_list

DATASET_NAMES = ("zachary", "florentine", "village")


def load_dataset(name: str) -> Network:
    if name not in DATASET_NAMES:
        raise ValueError(f"unknown dataset {name!r}; choose from {DATASET_NAMES}")
    text = resources.files(__package__).joinpath(f"{name}.txt").read_text()
    return load_edge_list(text)
