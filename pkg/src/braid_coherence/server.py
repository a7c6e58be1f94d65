"""MCP server exposing the braid rewriting and coherence engine."""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from mcp.server.fastmcp import FastMCP

from .braid_core import (
    DEFAULT_CLASS_BUDGET,
    finishing_set as _finishing_set,
    format_word,
    is_minimal as _is_minimal,
    left_weighted_factorization,
    monoid_equal as _monoid_equal,
    parse_word,
    starting_set as _starting_set,
    underlying_permutation as _underlying_permutation,
)
from .cubes import DEFAULT_GRID, DEFAULT_TOL, NamedPath, PathId, verify_homotopy
from .rewrite_engine import (
    DEFAULT_CONFLUENCE_BUDGET,
    check_confluence as _check_confluence,
    complete_reduce,
    format_trace,
    parse_trace,
    verify_trace,
)
from .term_model import coherent as _coherent
from .term_model import format_certificate, parse_cell

# Create the MCP server
mcp = FastMCP(name="braid-coherence")


def _format_error(error: Exception) -> dict[str, Any]:
    """Format an exception as a structured error response."""
    return {
        "success": False,
        "error": str(error),
        "error_type": type(error).__name__,
    }


@mcp.tool()
def underlying_permutation(word: str) -> dict[str, Any]:
    """Compute the permutation a braid word induces on its strands.

    Args:
        word: Braid word such as "3: s1 s2 s1" (capital S for inverse letters)

    Returns:
        Dictionary with word and permutation (one-line notation, 1-based)
    """
    try:
        w = parse_word(word)
        return {
            "word": format_word(w),
            "permutation": _underlying_permutation(w).to_list(),
        }
    except Exception as e:
        return _format_error(e)


@mcp.tool()
def is_minimal(word: str) -> dict[str, Any]:
    """Check whether no two strands of a positive word cross twice.

    Args:
        word: Positive braid word

    Returns:
        Dictionary with word and minimal (boolean)
    """
    try:
        w = parse_word(word)
        return {"word": format_word(w), "minimal": _is_minimal(w)}
    except Exception as e:
        return _format_error(e)


@mcp.tool()
def starting_set(word: str) -> dict[str, Any]:
    """Generators some equal positive word can start with.

    Args:
        word: Positive braid word

    Returns:
        Dictionary with word and starting_set (sorted generator indices)
    """
    try:
        w = parse_word(word)
        return {"word": format_word(w), "starting_set": sorted(_starting_set(w))}
    except Exception as e:
        return _format_error(e)


@mcp.tool()
def finishing_set(word: str) -> dict[str, Any]:
    """Generators some equal positive word can end with.

    Args:
        word: Positive braid word

    Returns:
        Dictionary with word and finishing_set (sorted generator indices)
    """
    try:
        w = parse_word(word)
        return {"word": format_word(w), "finishing_set": sorted(_finishing_set(w))}
    except Exception as e:
        return _format_error(e)


@mcp.tool()
def factor(word: str) -> dict[str, Any]:
    """Split a positive word as tau . omega with tau minimal and maximal.

    Args:
        word: Positive braid word

    Returns:
        Dictionary with tau and omega words
    """
    try:
        return left_weighted_factorization(parse_word(word)).to_dict()
    except Exception as e:
        return _format_error(e)


@mcp.tool()
def reduce_word(word: str, budget: int = DEFAULT_CLASS_BUDGET) -> dict[str, Any]:
    """Completely reduce a positive word and return the replayable trace.

    Args:
        word: Positive braid word
        budget: Maximum words visited by each move-path search (default: 100000)

    Returns:
        Dictionary containing:
        - source, target: The input and the minimal word reached
        - steps: One string per basic reduction ("YB+ @3", "C @2 (1,3)", "V @5 (2)")
        - v_count: Number of V steps
        - trace_text: The trace in the text format accepted by verify_trace_text
    """
    try:
        trace = complete_reduce(parse_word(word), budget=budget)
        result = trace.to_dict()
        result["trace_text"] = format_trace(trace)
        return result
    except Exception as e:
        return _format_error(e)


@mcp.tool()
def monoid_equal(first: str, second: str) -> dict[str, Any]:
    """Decide equality of two positive words in the positive braid monoid.

    Args:
        first: Positive braid word
        second: Positive braid word on the same number of strands

    Returns:
        Dictionary with first, second and equal (boolean)
    """
    try:
        w1, w2 = parse_word(first), parse_word(second)
        return {
            "first": format_word(w1),
            "second": format_word(w2),
            "equal": _monoid_equal(w1, w2),
        }
    except Exception as e:
        return _format_error(e)


@mcp.tool()
def coherent(f: str, g: str) -> dict[str, Any]:
    """Decide whether two parallel cells of the free construction are isomorphic.

    Args:
        f: Cell term, e.g. "(comp (braid b a) (braid a b))"
        g: Cell term with the same source labels

    Returns:
        Dictionary with coherent (boolean); when coherent, the certificate
        (both traces and the common minimal word) and its text rendering
    """
    try:
        certificate = _coherent(parse_cell(f), parse_cell(g))
        if certificate is None:
            return {"coherent": False, "reason": "permutations differ"}
        return {
            "coherent": True,
            "certificate": certificate.to_dict(),
            "certificate_text": format_certificate(certificate),
        }
    except Exception as e:
        return _format_error(e)


@mcp.tool()
def verify_trace_text(trace: str) -> dict[str, Any]:
    """Replay a trace given in text form.

    Args:
        trace: Trace text ("source: ...", "target: ...", then one step per line)

    Returns:
        Dictionary with ok, failed_step (index or null) and message
    """
    try:
        return verify_trace(parse_trace(trace)).to_dict()
    except Exception as e:
        return _format_error(e)


@mcp.tool()
def check_confluence(word: str, budget: int = DEFAULT_CONFLUENCE_BUDGET) -> dict[str, Any]:
    """Explore every reduction strategy of a word and compare the outcomes.

    Args:
        word: Positive braid word
        budget: Maximum reachable states to explore (default: 2000)

    Returns:
        Dictionary with passed, partial, targets, v_counts, expected_v_count,
        diamonds_checked and failures
    """
    try:
        return _check_confluence(parse_word(word), budget).to_dict()
    except Exception as e:
        return _format_error(e)


@mcp.tool()
def verify_cubes(
    paths: list[str] | None = None,
    grid: int = DEFAULT_GRID,
    side: str | None = None,
    tol: float = DEFAULT_TOL,
) -> dict[str, Any]:
    """Sweep named little cubes paths and homotopies on a grid.

    Args:
        paths: Path ids such as "Ra_Rb", "delta", "Phi" (default: all)
        grid: Samples per parameter axis (default: 64)
        side: Cube side length as a fraction string such as "1/20" (default: per path)
        tol: Tolerance for boundary identities (default: 1e-9)

    Returns:
        Dictionary with passed and one report per path (checks, min_sep, failures)
    """
    try:
        names = paths or [p.value for p in PathId]
        side_value = None if side is None else Fraction(side)
        reports = [verify_homotopy(NamedPath.named(n, side_value), grid, tol) for n in names]
        return {
            "passed": all(reports),
            "reports": [r.to_dict() for r in reports],
        }
    except Exception as e:
        return _format_error(e)


def main():
    """Run the MCP server."""
    mcp.run()


if __name__ == "__main__":
    main()
