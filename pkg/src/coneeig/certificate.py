"""Certificate documents: verification results as JSON or aligned text.

Result indices ``k`` in documents are 1-based. Every interval endpoint is
written with :func:`coneeig.formats.dec_down` / :func:`dec_up`, so the
boxes parsed back from a certificate contain the computed ones.
"""

from __future__ import annotations

import hashlib
from dataclasses import asdict

from . import __version__
from .cone import EigenEnclosure, VerifyConfig
from .errors import VerificationFailure
from .formats import box_from_json, box_text, box_to_json, dec_down, dec_up
from .polyroot import RootEnclosure

__all__ = ["digest", "config_echo", "result_entry", "build", "render_text", "boxes_from_entry"]


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def config_echo(cfg: VerifyConfig) -> dict:
    return {
        "search": asdict(cfg.search),
        "solver": asdict(cfg.solver),
        "order": cfg.order,
    }


def _report(rep) -> dict:
    return {
        "lhs": dec_up(rep.lhs),
        "inv_norm_recip": dec_down(rep.inv_norm_recip),
        "cross": dec_up(rep.cross),
        "co_bound": dec_up(rep.co_bound),
        "ex_bound": dec_down(rep.ex_bound),
    }


def result_entry(res) -> dict:
    """JSON-ready record for an enclosure, a root enclosure or a failure."""
    if isinstance(res, VerificationFailure):
        k = None if res.k is None else res.k + 1
        return {"k": k, "status": "failed", "reason": res.reason}
    if isinstance(res, RootEnclosure):
        out = result_entry(res.eigen)
        out["horner"] = box_to_json(res.horner)
        return out
    if not isinstance(res, EigenEnclosure):
        raise TypeError(f"not a verification result: {res!r}")
    lam = res.lambda_tilde
    return {
        "k": res.k + 1,
        "status": "verified",
        "epsilon": res.epsilon,
        "value": box_to_json(res.value),
        "vector": [box_to_json(z) for z in res.vector.entries],
        "approx_value": {"re": lam.real, "im": lam.imag},
        "report": _report(res.report),
    }


def boxes_from_entry(entry: dict):
    """(value box, list of vector boxes) re-read from a verified record."""
    return box_from_json(entry["value"]), [box_from_json(d) for d in entry["vector"]]


def build(command: str, source_digest: str, n: int, cfg: VerifyConfig, results) -> dict:
    entries = [result_entry(r) for r in results]
    verified = sum(e["status"] == "verified" for e in entries)
    return {
        "tool": "coneeig",
        "version": __version__,
        "command": command,
        "input": source_digest,
        "n": n,
        "config": config_echo(cfg),
        "results": entries,
        "summary": {"requested": len(entries), "verified": verified, "failed": len(entries) - verified},
    }


def render_text(doc: dict) -> str:
    """Human-readable form, enclosures in base+[lo,hi]eP style plus raw endpoints."""
    lines = [
        f"{doc['tool']} {doc['version']}  {doc['command']}  n={doc['n']}  {doc['input']}",
    ]
    name = "root" if doc["command"] == "roots" else "lambda"
    for e in doc["results"]:
        k = "?" if e["k"] is None else e["k"]
        if e["status"] != "verified":
            lines.append(f"[{k}] FAILED: {e['reason']}")
            continue
        value, vector = boxes_from_entry(e)
        lines.append(f"[{k}] verified  eps={e['epsilon']:.3e}")
        lines.append(f"    {name} in {box_text(value)}")
        lines.append(_raw(value, "    "))
        for i, z in enumerate(vector, start=1):
            lines.append(f"    x[{i}] in {box_text(z)}")
        if "horner" in e:
            h = box_from_json(e["horner"])
            lines.append(f"    W(box) in {box_text(h)}")
    s = doc["summary"]
    lines.append(f"verified {s['verified']}/{s['requested']}, failed {s['failed']}")
    return "\n".join(lines) + "\n"


def _raw(z, indent) -> str:
    return (
        f"{indent}re [{dec_down(z.re.lo)}, {dec_up(z.re.hi)}]"
        f"  im [{dec_down(z.im.lo)}, {dec_up(z.im.hi)}]"
    )
