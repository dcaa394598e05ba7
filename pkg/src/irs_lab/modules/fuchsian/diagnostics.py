import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

from irs_lab.modules.fuchsian.enumeration import BallEnumeration, enumerate_ball
from irs_lab.modules.fuchsian.group import FuchsianGroup
from irs_lab.modules.fuchsian.words import Word, render_word
from irs_lab.modules.hyperbolic.isometry import IsometryType, classify, translation_length
from irs_lab.modules.hyperbolic.plane import ORIGIN, HPoint

logger = logging.getLogger(__name__)

COLLAR_TOL = 1e-9


@dataclass(frozen=True)
class CollarCheck:
    lhs: float
    ok: bool


def collar_check(group: FuchsianGroup, word_a: Word, word_b: Word, intersection: int) -> CollarCheck:
    """sinh(ℓ(α)/2)·sinh(ℓ(β)/2) for two curves known to intersect."""
    if intersection < 1:
        raise ValueError(f"Curves must intersect (i ≥ 1), got i = {intersection}")
    if tuple(word_a) == tuple(word_b):
        raise ValueError(f"A simple curve does not meet itself: {render_word(word_a)}")
    len_a = translation_length(group.evaluate(word_a))
    len_b = translation_length(group.evaluate(word_b))
    lhs = math.sinh(0.5 * len_a) * math.sinh(0.5 * len_b)
    return CollarCheck(lhs=lhs, ok=lhs >= 1.0 - COLLAR_TOL)


def systole_at(group: FuchsianGroup, base: HPoint = ORIGIN, radius: Optional[float] = None) -> float:
    """Smallest displacement d(base, g·base) over non-identity g, or math.inf if none is within radius.

    Raises:
        FrontierOverflowError: If the ball enumeration is not exhaustive
    """
    ball = enumerate_ball(group, base, radius)
    displacements = [d for w, _, d in ball.nontrivial()]
    return min(displacements) if displacements else math.inf


@dataclass(frozen=True)
class ShortElement:
    word: Word
    length: float
    parabolic: bool


def peripheral_shortness(
    group: FuchsianGroup,
    elements: BallEnumeration,
    epsilon: float,
    tol: float = 1e-8,
) -> List[ShortElement]:
    """Ball elements of translation length below epsilon that are not powers of declared short curves.

    A hyperbolic element passes when its length is a positive integer multiple of the length of
    a declared curve word (peripheral, boundary or pinched); a parabolic element passes when the
    group declares cusps.
    """
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    declared: List[float] = []
    for word in (*group.boundary_words, *group.curve_words.values()):
        length = translation_length(group.evaluate(word))
        if length > 0.0:
            declared.append(length)

    offenders = []
    for word, g in elements:
        if not word:
            continue
        cls = classify(g)
        if cls.tag is IsometryType.PARABOLIC:
            if not group.peripheral_words:
                offenders.append(ShortElement(word, 0.0, True))
            continue
        if cls.tag is not IsometryType.HYPERBOLIC or cls.translation_length >= epsilon:
            continue
        if not _is_multiple(cls.translation_length, declared, tol):
            offenders.append(ShortElement(word, cls.translation_length, False))
    if offenders:
        logger.warning(f"{len(offenders)} short elements of {group.name} are not declared curves")
    return offenders


def _is_multiple(length: float, declared: Sequence[float], tol: float) -> bool:
    for base in declared:
        k = round(length / base)
        if k >= 1 and abs(length - k * base) <= tol * max(1.0, k):
            return True
    return False

