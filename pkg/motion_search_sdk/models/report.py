"""
Verification report models for the Motion Search SDK.
"""
from typing import Dict, List, Literal

from pydantic import BaseModel, Field, field_validator

from motion_search_sdk.core.errors import WeightError

LAWS = ("newton", "penetration", "gravity", "deformation")

Law = Literal["newton", "penetration", "gravity", "deformation"]

WEIGHT_TOLERANCE = 1e-9


class LawScore(BaseModel):
    """Score of one physical law"""
    law: Law
    score: float = Field(ge=0.0, le=1.0)
    explanation: str = ""


class SemanticScore(BaseModel):
    """Semantic alignment score"""
    score: float = Field(ge=0.0, le=1.0)
    explanation: str = ""


class VerifierWeights(BaseModel):
    """Weights of the selection objective"""
    sem: float = 0.5
    phys: float = 0.5
    laws: Dict[str, float] = Field(default_factory=lambda: {law: 0.25 for law in LAWS})

    def check(self) -> "VerifierWeights":
        """
        Validate the weight invariants

        Raises:
            WeightError: when a weight is negative, sem + phys != 1, the law
                weights do not sum to 1, or a law is missing or unknown
        """
        if self.sem < 0 or self.phys < 0:
            raise WeightError(f"weights must be non-negative (sem={self.sem}, phys={self.phys})", field="sem")
        if abs(self.sem + self.phys - 1.0) > WEIGHT_TOLERANCE:
            raise WeightError(f"sem + phys must equal 1, got {self.sem + self.phys}", field="phys")
        if set(self.laws) != set(LAWS):
            raise WeightError(f"law weights must cover exactly {', '.join(LAWS)}", field="laws")
        if any(w < 0 for w in self.laws.values()):
            raise WeightError("law weights must be non-negative", field="laws")
        total = sum(self.laws.values())
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise WeightError(f"law weights must sum to 1, got {total}", field="laws")
        return self


class VerificationReport(BaseModel):
    """Semantic and physical scores of one candidate"""
    candidate_index: int
    semantic: SemanticScore
    laws: List[LawScore]
    combined: float = Field(ge=0.0, le=1.0)
    weights: VerifierWeights = Field(default_factory=VerifierWeights)

    @field_validator("laws")
    @classmethod
    def _all_laws(cls, value: List[LawScore]) -> List[LawScore]:
        if sorted(score.law for score in value) != sorted(LAWS):
            raise ValueError(f"report must contain exactly one score per law: {', '.join(LAWS)}")
        return value

    def law(self, name: str) -> LawScore:
        for score in self.laws:
            if score.law == name:
                return score
        raise KeyError(name)

    def law_scores(self) -> Dict[str, float]:
        return {score.law: score.score for score in self.laws}

    def worst_law(self) -> LawScore:
        """Lowest-scoring law; ties resolved in the fixed law order"""
        return min(self.laws, key=lambda score: (score.score, LAWS.index(score.law)))
