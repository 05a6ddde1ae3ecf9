"""Pydantic schemas for the JSON documents the CLI writes."""
from typing import Dict, List, Literal, Optional, Union
import json

from pydantic import BaseModel, Field


class VerificationReportModel(BaseModel):
    """Report of one claim run."""
    claim: str
    n: int
    status: Literal["PASS", "FAIL"]
    instances_checked: int
    counterexamples: List[str] = Field(default_factory=list, description="graph6 strings")
    witnesses: Dict[str, Union[int, float, str]] = Field(default_factory=dict)
    elapsed_ms: int
    shards: int = 1


class EmbeddingCertificate(BaseModel):
    """map[v] is the host vertex of guest vertex v."""
    kind: Literal["embedding"] = "embedding"
    map: List[int]
    n: Optional[int] = None
    guest: Optional[str] = None  # graph6


class OrderingCertificate(BaseModel):
    """Vertex sequence for a Hamilton path/cycle or a spanning P_n²."""
    kind: Literal["ham_path", "ham_cycle", "path_square"]
    seq: List[int]
    graph: Optional[str] = None  # graph6


class MuComparisonModel(BaseModel):
    graph: str
    k: int
    verdict: Literal["LESS", "EQUAL", "GREATER"]
    method: str
    chain_length: int = 0
    max_coeff_bits: int = 0


class MuEstimateModel(BaseModel):
    graph: str
    mu: float
    hong_bound: Optional[float] = None


class CatalogEntryModel(BaseModel):
    tag: str
    graph6: str
    n: int
    edges: int
    degrees: List[int]


def report_schema() -> str:
    """JSON schema of VerificationReportModel, pretty printed."""
    return json.dumps(VerificationReportModel.model_json_schema(), indent=2)
