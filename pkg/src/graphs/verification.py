"""LangGraph workflow for sharded claim verification."""
from typing import Dict, List, Optional, TypedDict
from concurrent.futures import Executor
from hashlib import blake2b
import asyncio
import logging
import time

from langgraph.graph import StateGraph, START, END

from src.config import settings
from src.services.graph_core import GraphError
from src.services.verify import (
    ShardOutcome,
    VerificationReport,
    check_items,
    check_range,
    claim_items,
    get_claim,
    reduce,
)

log = logging.getLogger(__name__)

# Process pool for the shard checks
# This will be set from main.py
_executor: Optional[Executor] = None


def set_executor(executor: Optional[Executor]):
    """Set the executor that runs shard checks (None runs them inline)."""
    global _executor
    _executor = executor


class VerificationState(TypedDict):
    """State for the verification workflow."""
    # Input
    claim: str
    n: int
    shards: int

    # Intermediate
    items: List[List[str]]
    outcomes: List[ShardOutcome]
    started: float

    # Output
    success: bool
    report: Optional[VerificationReport]
    error: Optional[str]


def shard_items(items: List[str], shards: int) -> List[List[str]]:
    """Deterministic split by a hash of each item; order inside a shard is kept."""
    buckets: List[List[str]] = [[] for _ in range(shards)]
    for item in items:
        if shards == 1:
            buckets[0].append(item)
            continue
        digest = blake2b(item.encode("ascii"), digest_size=8).digest()
        buckets[int.from_bytes(digest, "big") % shards].append(item)
    return buckets


async def validate_request(state: VerificationState) -> VerificationState:
    """Validate claim id, order and shard count."""
    try:
        get_claim(state["claim"])
        n = check_range(state["claim"], state["n"])
    except GraphError as e:
        return {**state, "success": False, "error": str(e)}
    if state.get("shards", 1) < 1:
        return {**state, "success": False, "error": "shards must be at least 1"}
    return {**state, "n": n}


async def partition_items(state: VerificationState) -> VerificationState:
    """Build the claim's work list and bucket it into shards."""
    try:
        items = claim_items(state["claim"], state["n"])
    except GraphError as e:
        return {**state, "success": False, "error": f"Enumeration failed: {e}"}
    buckets = shard_items(items, state["shards"])
    log.info("claim %s: %d items in %d shards", state["claim"], len(items), len(buckets))
    return {**state, "items": buckets}


async def check_shards(state: VerificationState) -> VerificationState:
    """Check every shard, in the executor when one is set."""
    if state.get("error"):
        return state

    loop = asyncio.get_event_loop()
    executor = _executor or None

    try:
        if executor:
            futures = [
                loop.run_in_executor(executor, check_items, state["claim"], state["n"], bucket)
                for bucket in state["items"]
            ]
            outcomes = list(await asyncio.gather(*futures))
        else:
            outcomes = [check_items(state["claim"], state["n"], bucket) for bucket in state["items"]]
    except GraphError as e:
        return {
            **state,
            "success": False,
            "error": f"Shard check failed: {str(e)}",
        }

    return {**state, "outcomes": outcomes}


async def reduce_outcomes(state: VerificationState) -> VerificationState:
    """Merge shard outcomes into the report."""
    if state.get("error"):
        return state
    elapsed = int((time.perf_counter() - state["started"]) * 1000)
    try:
        report = reduce(state["claim"], state["n"], state["outcomes"], elapsed)
    except GraphError as e:
        return {**state, "success": False, "error": str(e)}
    return {**state, "success": True, "report": report}


def should_continue(state: VerificationState) -> str:
    """Stop early when validation or partitioning failed."""
    if state.get("error"):
        return "end"
    return "continue"


def create_verification_graph():
    """Create and compile the verification graph."""
    workflow = StateGraph(VerificationState)

    # Add nodes
    workflow.add_node("validate", validate_request)
    workflow.add_node("partition", partition_items)
    workflow.add_node("check", check_shards)
    workflow.add_node("reduce", reduce_outcomes)

    # Add edges
    workflow.add_edge(START, "validate")
    workflow.add_conditional_edges("validate", should_continue, {"continue": "partition", "end": END})
    workflow.add_conditional_edges("partition", should_continue, {"continue": "check", "end": END})
    workflow.add_edge("check", "reduce")
    workflow.add_edge("reduce", END)

    return workflow.compile()


# Compiled graph instance
verification_graph = create_verification_graph()


async def run_verification(claim: str, n: int = 0, shards: Optional[int] = None) -> VerificationState:
    """Run the verification workflow."""
    initial_state: VerificationState = {
        "claim": claim,
        "n": n,
        "shards": shards or settings.shards,
        "items": [],
        "outcomes": [],
        "started": time.perf_counter(),
        "success": False,
        "report": None,
        "error": None,
    }

    result = await verification_graph.ainvoke(initial_state)
    return result


def verify_claim(claim: str, n: int = 0, shards: Optional[int] = None) -> VerificationReport:
    """Synchronous wrapper; raises GraphError when the workflow reports an error."""
    result: Dict = asyncio.run(run_verification(claim, n, shards))
    if result.get("error") or result.get("report") is None:
        raise GraphError(result.get("error") or "verification produced no report")
    return result["report"]
