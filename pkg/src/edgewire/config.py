"""Run configuration: every tunable of the pipeline in one JSON-friendly object."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict

from .assembly import DbscanParams
from .errors import InvalidArgument
from .fitter import FitConfig
from .losses import LossWeights
from .metrics import EvalConfig
from .similarity import SimilarityWeights
from .synthetic import RoofSpec

SECTIONS = {
    "similarity": SimilarityWeights,
    "loss": LossWeights,
    "fit": FitConfig,
    "dbscan": DbscanParams,
    "eval": EvalConfig,
    "roof": RoofSpec,
}


@dataclass(frozen=True)
class RunConfig:
    similarity: SimilarityWeights = field(default_factory=SimilarityWeights)
    loss: LossWeights = field(default_factory=LossWeights)
    fit: FitConfig = field(default_factory=FitConfig)
    dbscan: DbscanParams = field(default_factory=DbscanParams)
    eval: EvalConfig = field(default_factory=EvalConfig)
    roof: RoofSpec = field(default_factory=RoofSpec)

    def __post_init__(self):
        self.roof.validate()

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        unknown = set(data) - set(SECTIONS)
        if unknown:
            raise InvalidArgument(f"unknown config sections: {sorted(unknown)}")
        parts = {}
        for name, kind in SECTIONS.items():
            values = data.get(name, {})
            allowed = {f.name for f in fields(kind)}
            bad = set(values) - allowed
            if bad:
                raise InvalidArgument(f"unknown keys in [{name}]: {sorted(bad)}")
            parts[name] = kind(**values)
        return cls(**parts)

    def to_dict(self) -> Dict[str, Any]:
        return {name: asdict(getattr(self, name)) for name in SECTIONS}

    def override(self, section: str, **values) -> "RunConfig":
        if not values:
            return self
        return replace(self, **{section: replace(getattr(self, section), **values)})
