import math

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SurfaceSig(BaseModel):
    """Topological type of a finite-type hyperbolic surface."""

    model_config = ConfigDict(frozen=True)

    genus: int = Field(..., ge=0, description="Genus g of the surface")
    punctures: int = Field(..., ge=0, description="Number p of punctures or boundary curves")

    @model_validator(mode="after")
    def _check_hyperbolic(self) -> "SurfaceSig":
        if 2 - 2 * self.genus - self.punctures >= 0:
            raise ValueError(f"Signature ({self.genus},{self.punctures}) is not hyperbolic: χ must be negative")
        return self

    @classmethod
    def parse(cls, text: str) -> "SurfaceSig":
        """Read 'g,p'."""
        try:
            genus, punctures = (int(part) for part in text.strip().strip("()").split(","))
        except ValueError as e:
            raise ValueError(f"Expected a signature 'g,p', got {text!r}") from e
        return cls(genus=genus, punctures=punctures)

    @property
    def euler_char(self) -> int:
        return euler_char(self)

    @property
    def abs_euler_char(self) -> int:
        return -euler_char(self)

    def __str__(self) -> str:
        return f"{self.genus},{self.punctures}"


def euler_char(s: SurfaceSig) -> int:
    """χ = 2 - 2g - p."""
    return 2 - 2 * s.genus - s.punctures


def pants_bound(s: SurfaceSig) -> int:
    """Largest number of disjoint essential curves, 3g - 3 + p."""
    return 3 * s.genus - 3 + s.punctures


def area(s: SurfaceSig) -> float:
    """Hyperbolic area 2π|χ| of a complete finite-area surface of type s."""
    return 2.0 * math.pi * s.abs_euler_char
