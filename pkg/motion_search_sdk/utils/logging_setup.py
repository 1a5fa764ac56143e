"""
Logging setup for the Motion Search SDK.

Verbosity levels mirror the rest of the SDK: quiet, normal, verbose, debug.
"""
import logging

LOGGER_NAME = "motion_search_sdk"

VERBOSITY_LEVELS = {
    "quiet": logging.WARNING,
    "normal": logging.INFO,
    "verbose": logging.DEBUG,
    "debug": logging.DEBUG,
}

_handler = None


def get_logger(name: str) -> logging.Logger:
    """Return a logger inside the SDK hierarchy"""
    if name.startswith(LOGGER_NAME):
        return logging.getLogger(name)
    return logging.getLogger(f"{LOGGER_NAME}.{name}")


def configure_logging(verbosity: str = "normal") -> logging.Logger:
    """
    Install the SDK log handler at the level matching ``verbosity``

    Args:
        verbosity: One of "quiet", "normal", "verbose", "debug".
            "debug" additionally surfaces HTTP and botocore wire logs.

    Returns:
        The SDK root logger
    """
    global _handler
    verbosity = verbosity.lower()
    if verbosity not in VERBOSITY_LEVELS:
        raise ValueError(f"Unknown verbosity '{verbosity}'. Options: {', '.join(VERBOSITY_LEVELS)}")

    logger = logging.getLogger(LOGGER_NAME)
    if _handler is None:
        _handler = logging.StreamHandler()
        _handler.setFormatter(logging.Formatter("[SDK LOG] %(message)s"))
        logger.addHandler(_handler)
    logger.setLevel(VERBOSITY_LEVELS[verbosity])
    logger.propagate = False

    wire_level = logging.DEBUG if verbosity == "debug" else logging.WARNING
    for name in ("urllib3", "botocore"):
        logging.getLogger(name).setLevel(wire_level)
    return logger
