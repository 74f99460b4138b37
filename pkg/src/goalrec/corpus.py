"""Access to the corpus of instances shipped with the package."""

from importlib import resources
from pathlib import Path

from .experiment import InstanceSuite, load_suite


def corpus_path() -> Path:
    """Directory holding the bundled maps, manifest and datasets."""
    return Path(resources.files("goalrec") / "corpus")


def load_default_suite() -> InstanceSuite:
    return load_suite(corpus_path())
