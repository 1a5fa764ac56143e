"""
Prompt templates used by the remote planner and verifier.

Templates are plain text files shipped with the package. Placeholders look
like ``{name}``; only keys passed to :func:`render_template` are replaced, so
literal JSON braces in the templates survive untouched.
"""
import re
from functools import lru_cache
from importlib import resources

_PLACEHOLDER = re.compile(r"\{([A-Za-z_]+)\}")

# Heading of each law as it appears in the physics prompt
LAW_TITLES = {
    "newton": "Newtonian Consistency",
    "penetration": "Penetration Violation",
    "gravity": "Gravitational Coherence",
    "deformation": "Deformation Consistency",
}

LAW_DESCRIPTIONS = {
    "newton": "Newtonian Consistency: acceleration / deceleration should be physically plausible;",
    "penetration": "Penetration Violation: objects must not pass through static elements;",
    "gravity": "Gravitational Coherence: objects should not be floating in the air without anything holding them;",
    "deformation": "Deformation Consistency: object size should remain stable unless specified.",
}


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    """Read a template such as ``"trajectory_user"`` or ``"examples/gravity"``"""
    path = resources.files(__name__)
    for part in f"{name}.txt".split("/"):
        path = path.joinpath(part)
    return path.read_text(encoding="utf-8").rstrip("\n")


def render_template(template: str, **values) -> str:
    """Substitute the known placeholders of a template"""
    def substitute(match):
        key = match.group(1)
        if key in values:
            return str(values[key])
        return match.group(0)

    return _PLACEHOLDER.sub(substitute, template)


def render(name: str, **values) -> str:
    return render_template(load_template(name), **values)


def law_example(law: str) -> str:
    """Default in-context example for one law"""
    return load_template(f"examples/{law}")
