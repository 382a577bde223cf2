"""
This module looks up fields of loosely written spec documents. Keys match \
when they agree after case folding and dropping underscores, dashes and \
spaces, so "trunk_windings", "trunkWindings" and "Trunk Windings" are one key.
"""

import re
from typing import Any

SEPARATORS = re.compile(r"[\s_-]+")


def fold(key: Any) -> str:
    return SEPARATORS.sub("", str(key)).lower()


def search_field(obj: dict, candidates: list, default: Any = None) -> Any:
    """
    Search for the first matching field in the given object, selected from a list of candidates.

    Parameters:
        obj (dict): The object to search for the field in.
        candidates (sequence): Candidate field names, in order of preference.
        default: Returned when no candidate matches.

    Returns:
        The value of the first matching field found in the object, or `default`.
    """
    keys = {}
    for key in obj:
        keys.setdefault(fold(key), key)
    for candidate in candidates:
        if fold(candidate) in keys:
            return obj[keys[fold(candidate)]]
    return default


def unknown_fields(obj: dict, known: dict) -> list:
    """
    Keys of `obj` that match none of the candidates of the known fields.

    Args:
        obj (dict): A parsed document.
        known (dict): Maps canonical names to candidate lists.

    Returns:
        list: The unrecognised keys.
    """
    accepted = {fold(candidate) for candidates in known.values() for candidate in candidates}
    return [key for key in obj if fold(key) not in accepted]
