"""Scheme documents and coverage-profile files: the CLI wire formats.

A scheme document is JSON with `mode`, `probes`, `plan`, and `stats`.  Nodes
appear as their label string; edge instances as [source, target, occurrence]
triples so parallel edges stay distinguishable.  Documents are
self-contained: `infer` runs from the document alone.
"""

from __future__ import annotations

import json
from typing import Mapping

from mincov.cfg import Cfg
from mincov.errors import CfgParseError, DomainMismatchError
from mincov.inference import EDGE, NODE, InstrumentationScheme

# Profile/plan element keys: ("node", label) or ("edge", src, dst, occurrence).
ElementKey = tuple


def edge_triple(cfg: Cfg, e: int) -> tuple[str, str, int]:
    u, v = cfg.edge(e)
    return (cfg.label(u), cfg.label(v), int(cfg.edge_occurrence[e]))


def _ref_to_json(cfg: Cfg, ref):
    kind, ident = ref
    if kind == NODE:
        return cfg.label(ident)
    return list(edge_triple(cfg, ident))


def _json_to_key(value) -> ElementKey:
    if isinstance(value, str):
        return (NODE, value)
    if isinstance(value, list) and len(value) == 3:
        return (EDGE, str(value[0]), str(value[1]), int(value[2]))
    raise CfgParseError(f"malformed element reference: {value!r}")


def scheme_document(scheme: InstrumentationScheme, cfg: Cfg) -> dict:
    plan = [{
        "target": _ref_to_json(cfg, step.target),
        "kind": step.kind,
        "sources": [_ref_to_json(cfg, ref) for ref in step.sources],
    } for step in scheme.plan]
    if scheme.mode == "vv":
        probes = [cfg.label(v) for v in scheme.probes]
    else:
        probes = [list(edge_triple(cfg, e)) for e in scheme.probes]
    return {"mode": scheme.mode, "probes": probes, "plan": plan,
            "stats": dict(scheme.stats)}


def dump_scheme(scheme: InstrumentationScheme, cfg: Cfg) -> str:
    return json.dumps(scheme_document(scheme, cfg), indent=2) + "\n"


def load_scheme_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CfgParseError(f"scheme document is not valid JSON: {exc}") from exc
    for field in ("mode", "probes", "plan"):
        if field not in doc:
            raise CfgParseError(f"scheme document misses field {field!r}")
    return doc


def document_probe_keys(doc: dict) -> list[ElementKey]:
    return [_json_to_key(p) for p in doc["probes"]]


def evaluate_document(doc: dict, partial: Mapping[ElementKey, bool]) -> list[tuple[ElementKey, bool]]:
    """Run a scheme document's plan against probe values, in plan order."""
    want = set(document_probe_keys(doc))
    got = set(partial)
    if want != got:
        raise DomainMismatchError(missing=sorted(want - got), extra=sorted(got - want))
    values: dict[ElementKey, bool] = {}
    out = []
    for step in doc["plan"]:
        key = _json_to_key(step["target"])
        if step["kind"] == "instrumented":
            value = bool(partial[key])
        else:
            value = False
            for ref in step["sources"]:
                source = _json_to_key(ref)
                if source not in values:
                    raise CfgParseError(
                        f"plan step {step['target']!r} uses unresolved source {ref!r}")
                value = value or values[source]
        values[key] = value
        out.append((key, value))
    return out


# -- profile files --------------------------------------------------------------

def parse_profile(text: str) -> dict[ElementKey, bool]:
    """`<label> 0|1` per line for nodes, `<src> <dst> <occurrence> 0|1` for edges."""
    values: dict[ElementKey, bool] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) == 2:
            key: ElementKey = (NODE, tokens[0])
        elif len(tokens) == 4:
            try:
                key = (EDGE, tokens[0], tokens[1], int(tokens[2]))
            except ValueError:
                raise CfgParseError("edge occurrence must be an integer", lineno)
        else:
            raise CfgParseError("expected '<label> 0|1' or '<src> <dst> <occ> 0|1'",
                                lineno)
        if tokens[-1] not in ("0", "1"):
            raise CfgParseError("coverage value must be 0 or 1", lineno)
        if key in values:
            raise CfgParseError(f"duplicate value for {_key_str(key)}", lineno)
        values[key] = tokens[-1] == "1"
    return values


def _key_str(key: ElementKey) -> str:
    if key[0] == NODE:
        return key[1]
    return f"{key[1]} {key[2]} {key[3]}"


def format_profile(pairs) -> str:
    return "".join(f"{_key_str(key)} {1 if value else 0}\n" for key, value in pairs)
