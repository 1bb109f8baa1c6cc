"""Run reports and the sigma -> C conversion."""
import json
import platform
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from .specfun import CosineProfile

# chi has Fourier support in [-2, 2] (propagation radius 2) and the index
# argument needs r > 15 t_0, so C = sigma * 2 * 15.
SUPPORT_RADIUS = 2
PROPAGATION_FACTOR = 15


def universal_constant(sigma):
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    return sigma * (SUPPORT_RADIUS * PROPAGATION_FACTOR)


@dataclass
class ConstantReport:
    """Everything needed to audit one estimate of C.

    ``beta``, ``threshold`` and ``theta`` are filled in by the Slepian method;
    ``profile`` only by the LP method.
    """

    method: str
    sigma: float
    C: float
    beta: Optional[float] = None
    threshold: Optional[float] = None
    theta: Optional[float] = None
    profile: Optional[CosineProfile] = None
    inputs: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in ("slepian", "lp"):
            raise ValueError(f"unknown method {self.method!r}")

    def chain(self):
        steps = []
        for name in ("beta", "threshold", "theta"):
            value = getattr(self, name)
            if value is not None:
                steps.append({"name": name, "value": value})
        steps.append({"name": "sigma", "value": self.sigma})
        steps.append({"name": "C", "value": self.C})
        return steps

    def to_dict(self):
        doc = {
            "method": self.method,
            "inputs": dict(self.inputs),
            "chain": self.chain(),
            "result": {"sigma": self.sigma, "C": self.C},
            "diagnostics": dict(self.diagnostics),
            "provenance": {
                "package": "indexconst",
                "version": __version__,
                "python": platform.python_version(),
                "parameters": dict(self.inputs),
            },
        }
        if self.profile is not None:
            doc["profile"] = list(self.profile.coeffs)
        return doc

    @classmethod
    def from_dict(cls, doc):
        chain = {step["name"]: step["value"] for step in doc["chain"]}
        profile = doc.get("profile")
        return cls(
            method=doc["method"],
            sigma=doc["result"]["sigma"],
            C=doc["result"]["C"],
            beta=chain.get("beta"),
            threshold=chain.get("threshold"),
            theta=chain.get("theta"),
            profile=CosineProfile(tuple(profile)) if profile is not None else None,
            inputs=dict(doc.get("inputs", {})),
            diagnostics=dict(doc.get("diagnostics", {})),
        )

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))
