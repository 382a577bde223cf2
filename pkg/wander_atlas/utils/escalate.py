"""Resolution escalation for numerical routines."""
import logging
import warnings
from functools import wraps

from wander_atlas.core.errors import AmbiguousRegion, ResolutionWarning

logger = logging.getLogger(__name__)


def escalate(keyword, start, ceiling, exception=(ResolutionWarning, AmbiguousRegion), factor=2):
    """
    Decorator that re-runs the wrapped function with a larger value of one \
      keyword argument whenever a specified exception occurs.

    Args:
        keyword (str): Name of the keyword argument to grow, e.g. "resolution".
        start (int): Value used when the caller does not pass the keyword.
        ceiling (int): Largest value tried. On the last attempt a \
            ResolutionWarning is only emitted, other errors propagate. \
            Callers may lower it per call with `max_<keyword>=`.
        exception (Exception or tuple, optional): The exceptions to catch. \
            Defaults to ResolutionWarning and AmbiguousRegion.
        factor (int, optional): Growth factor per attempt. Defaults to 2.

    Returns:
        function: The wrapped function with escalation logic.
    """

    def deco_escalate(func):
        @wraps(func)
        def f_escalate(*args, **kwargs):
            value = kwargs.pop(keyword, None) or start
            top = kwargs.pop(f"max_{keyword}", None) or ceiling
            while value * factor <= top:
                try:
                    with warnings.catch_warnings():
                        warnings.simplefilter("error", ResolutionWarning)
                        return func(*args, **{keyword: value}, **kwargs)
                except exception as error:
                    logger.warning(
                        "%s: %s, retrying with %s=%d", func.__name__, error, keyword, value * factor
                    )
                    value *= factor
            # last attempt
            return func(*args, **{keyword: value}, **kwargs)

        return f_escalate

    return deco_escalate
