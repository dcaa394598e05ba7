import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

from irs_lab.core.exceptions import ConstructionError
from irs_lab.modules.fuchsian.words import Word, evaluate_word, parse_word, render_word
from irs_lab.modules.hyperbolic.isometry import Isometry, IsometryType, classify, conjugate
from irs_lab.modules.surfaces.signature import SurfaceSig
from irs_lab.settings import settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FuchsianGroup:
    """A finitely generated torsion-free discrete subgroup of PSL(2,R), with its marking.

    signature is None for elementary groups. curve_words names the words of curves with an
    assigned length (pinching curves, decomposition curves), used by the diagnostics.
    """

    generators: Tuple[Isometry, ...]
    signature: Optional[SurfaceSig] = None
    peripheral_words: Tuple[Word, ...] = ()
    boundary_words: Tuple[Word, ...] = ()
    construction_params: Dict[str, float] = field(default_factory=dict)
    curve_words: Dict[str, Word] = field(default_factory=dict)
    name: str = "group"

    def __post_init__(self) -> None:
        if not self.generators:
            raise ValueError("A group needs at least one generator")

    @property
    def is_elementary(self) -> bool:
        return self.signature is None

    @property
    def is_lattice(self) -> bool:
        return self.signature is not None and not self.boundary_words

    @property
    def cusp_count(self) -> int:
        return len(self.peripheral_words)

    @property
    def target_area(self) -> Optional[float]:
        """2π|χ|, the area of the convex core."""
        if self.signature is None:
            return None
        return 2.0 * math.pi * self.signature.abs_euler_char

    def evaluate(self, word: Word) -> Isometry:
        return evaluate_word(self.generators, word)

    def symmetric_generators(self) -> List[Tuple[Word, Isometry]]:
        """Generators and their inverses in canonical letter order a, A, b, B, ..."""
        out = []
        for index, g in enumerate(self.generators, start=1):
            out.append(((index,), g))
            out.append(((-index,), g.inverse()))
        return out

    def conjugated(self, h: Isometry, name: Optional[str] = None) -> "FuchsianGroup":
        """The group h·G·h⁻¹ with the same words and metadata."""
        return replace(
            self,
            generators=tuple(conjugate(g, h) for g in self.generators),
            name=name or f"{self.name}^h",
        )

    def with_generators(self, generators: Tuple[Isometry, ...]) -> "FuchsianGroup":
        return replace(self, generators=tuple(generators))


def validate_group(group: FuchsianGroup, tol: Optional[float] = None) -> FuchsianGroup:
    """Check that peripheral words are parabolic and boundary words hyperbolic.

    Raises:
        ConstructionError: If a declared word has the wrong type
    """
    tol = settings.PARABOLIC_TOL if tol is None else tol
    for word in group.peripheral_words:
        g = group.evaluate(word)
        if abs(abs(g.trace) - 2.0) > tol:
            raise ConstructionError(
                f"construction failed: peripheral word {render_word(word)} has |tr| = {abs(g.trace):.12g}, expected 2"
            )
    for word in group.boundary_words:
        g = group.evaluate(word)
        if classify(g, tol).tag is not IsometryType.HYPERBOLIC:
            raise ConstructionError(f"construction failed: boundary word {render_word(word)} is not hyperbolic")
    logger.debug(f"Validated {group.name}: {len(group.peripheral_words)} cusps, {len(group.boundary_words)} boundary curves")
    return group


def format_group(group: FuchsianGroup) -> str:
    """Structured-text fixture: signature, parameters, generators to 18 significant digits, words."""
    lines = [f"name: {group.name}", f"signature: {group.signature if group.signature else 'elementary'}"]
    for key, value in group.construction_params.items():
        lines.append(f"param {key}: {value:.18g}")
    for index, g in enumerate(group.generators, start=1):
        entries = " ".join(f"{v:.18g}" for v in g.entries)
        lines.append(f"generator {render_word((index,))}: {entries}")
    for word in group.peripheral_words:
        lines.append(f"peripheral: {render_word(word)}")
    for word in group.boundary_words:
        lines.append(f"boundary: {render_word(word)}")
    for key, word in group.curve_words.items():
        lines.append(f"curve {key}: {render_word(word)}")
    return "\n".join(lines) + "\n"


def parse_group(text: str) -> FuchsianGroup:
    """Read the fixture written by format_group. '#' starts a comment."""
    name = "group"
    signature: Optional[SurfaceSig] = None
    params: Dict[str, float] = {}
    generators: Dict[str, Isometry] = {}
    peripheral: List[Word] = []
    boundary: List[Word] = []
    curves: Dict[str, Word] = {}

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ValueError(f"Line {number}: expected 'key: value', got {raw!r}")
        key, value = (part.strip() for part in line.split(":", 1))
        try:
            if key == "name":
                name = value
            elif key == "signature":
                signature = None if value == "elementary" else SurfaceSig.parse(value)
            elif key.startswith("param "):
                params[key[len("param "):].strip()] = float(value)
            elif key.startswith("generator "):
                entries = [float(v) for v in value.split()]
                if len(entries) != 4:
                    raise ValueError(f"a generator needs 4 entries, got {len(entries)}")
                generators[key[len("generator "):].strip()] = Isometry(*entries)
            elif key == "peripheral":
                peripheral.append(parse_word(value))
            elif key == "boundary":
                boundary.append(parse_word(value))
            elif key.startswith("curve "):
                curves[key[len("curve "):].strip()] = parse_word(value)
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as e:
            raise ValueError(f"Line {number}: {str(e)}") from e

    ordered = []
    for index in range(1, len(generators) + 1):
        letter = render_word((index,))
        if letter not in generators:
            raise ValueError(f"Fixture is missing generator {letter}")
        ordered.append(generators[letter])
    return FuchsianGroup(
        generators=tuple(ordered),
        signature=signature,
        peripheral_words=tuple(peripheral),
        boundary_words=tuple(boundary),
        construction_params=params,
        curve_words=curves,
        name=name,
    )
