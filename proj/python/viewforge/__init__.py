"""Python access to the viewforge analyses.

Every function takes workspace text in the .vf language and returns plain
Python data decoded from the JSON reports the CLI also prints.
"""

import json
from pathlib import Path

from . import _viewforge
from ._viewforge import InputError

__all__ = [
    "InputError",
    "parse",
    "load",
    "design",
    "determinacy",
    "disclosure",
    "canonical",
    "to_ra",
    "verify",
]


def load(path):
    return Path(path).read_text()


def parse(text):
    return json.loads(_viewforge.parse(text))


def design(text, query, secrets, cls="all"):
    if isinstance(secrets, str):
        secrets = [secrets]
    return json.loads(_viewforge.design(text, query, list(secrets), cls))


def determinacy(text, query, dview):
    return json.loads(_viewforge.determinacy(text, query, dview))


def disclosure(text, dview, secret):
    return json.loads(_viewforge.disclosure(text, dview, secret))


def canonical(text, query):
    return list(_viewforge.canonical(text, query))


def to_ra(text, view):
    return list(_viewforge.to_ra(text, view))


def verify(report):
    if not isinstance(report, str):
        report = json.dumps(report)
    return json.loads(_viewforge.verify(report))
