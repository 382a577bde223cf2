"""
This module provides functions for extracting atom addresses and numbers from \
input strings, using regular expressions.
"""

import re
from typing import Union


def extract_address(content) -> Union[tuple, None]:
    """
    Extracts a preimage-tree address from a string such as "0/1/0", "0.1.0", \
    "[0, 1, 0]" or from a list of integers.

    Args:
        content (str | list | tuple): the address in any accepted form.

    Returns:
        tuple or None: the child indices, or None if `content` holds no address.
    """
    if isinstance(content, (list, tuple)):
        try:
            return tuple(int(i) for i in content)
        except (TypeError, ValueError):
            return None
    if isinstance(content, int):
        return (content,)
    if not isinstance(content, str):
        return None
    text = content.strip()
    if text in ("", "[]", "/", "root"):
        return ()
    pattern1 = r"^\[?\s*\d+(?:\s*[,/.\s]\s*\d+)*\s*\]?$"
    if re.match(pattern1, text) is None:
        return None
    match = re.findall(r"\d+", text)
    return tuple(int(m) for m in match)


def format_address(address) -> str:
    """Formats an address as "0/1/0"; the base annulus is "-"."""
    if len(address) == 0:
        return "-"
    return "/".join(str(i) for i in address)


def extract_complex(content) -> Union[complex, None]:
    """
    Extracts a complex number from strings like "1+0.5j", "-2", "0.25-1i".

    Returns:
        complex or None: the number, or None if the string does not parse.
    """
    if isinstance(content, (int, float, complex)):
        return complex(content)
    text = str(content).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(text)
    except ValueError:
        return None
