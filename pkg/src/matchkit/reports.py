"""Run-report schema and serialization (versioned JSON and CSV).

A report is a plain dict assembled by the CLI harness; identical
(instance, algorithm, params, seed) runs serialize bit-identically: keys are
sorted, floats use repr, and no wall-clock data is recorded.
"""

import csv
import io
import json

SCHEMA_VERSION = 1

# Stable CSV column order.  Run rows leave the summary columns empty;
# summary rows (one per parameter cell of a sweep) leave the per-run ones.
CSV_COLUMNS = [
    "row_type",
    "schema_version",
    "instance_id",
    "kind",
    "n_vertices",
    "m_edges",
    "seed",
    "alg",
    "eps",
    "p",
    "gamma1",
    "gamma2",
    "gamma",
    "expectation",
    "opt",
    "ratio",
    "bound",
    "sizes",
    "weights",
    "work_max",
    "work_total",
    "changecurr",
    "cert_feasible",
    "cert_min_slack",
    "dual_total",
    "dual_min_slack",
    "growth_flags",
    "events",
    "per_step_min_ratio",
    "per_step_violations",
    "ratio_min",
    "ratio_mean",
    "ratio_max",
    "count",
]


def report_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, dict) and set(value) == {"num", "den"}:
        return "%s/%s" % (value["num"], value["den"])
    if isinstance(value, (list, tuple)):
        return ";".join(str(x) for x in value)
    return str(value)


def report_csv_row(doc: dict) -> dict:
    """Flatten a JSON report into the stable CSV row mapping."""
    inst = doc.get("instance", {})
    alg = doc.get("algorithm", {})
    params = alg.get("params", {})
    cert = doc.get("certificate") or {}
    dual = doc.get("dual") or {}
    work = doc.get("work") or {}
    per_step = doc.get("per_step") or {}
    row = {
        "row_type": doc.get("row_type", "run"),
        "schema_version": doc.get("schema_version", SCHEMA_VERSION),
        "instance_id": inst.get("id"),
        "kind": inst.get("kind"),
        "n_vertices": inst.get("n_vertices"),
        "m_edges": inst.get("m_edges"),
        "seed": inst.get("seed"),
        "alg": alg.get("name"),
        "eps": params.get("eps"),
        "p": params.get("p"),
        "gamma1": params.get("gamma1"),
        "gamma2": params.get("gamma2"),
        "gamma": params.get("gamma"),
        "expectation": doc.get("expectation"),
        "opt": doc.get("opt"),
        "ratio": doc.get("ratio"),
        "bound": doc.get("bound"),
        "sizes": doc.get("sizes"),
        "weights": doc.get("weights"),
        "work_max": work.get("max"),
        "work_total": work.get("total"),
        "changecurr": doc.get("changecurr"),
        "cert_feasible": cert.get("feasible"),
        "cert_min_slack": cert.get("min_slack"),
        "dual_total": dual.get("total"),
        "dual_min_slack": dual.get("min_slack"),
        "growth_flags": dual.get("growth_flags"),
        "events": doc.get("events"),
        "per_step_min_ratio": per_step.get("min_ratio"),
        "per_step_violations": per_step.get("violations"),
        "ratio_min": doc.get("ratio_min"),
        "ratio_mean": doc.get("ratio_mean"),
        "ratio_max": doc.get("ratio_max"),
        "count": doc.get("count"),
    }
    return {k: _cell(row.get(k)) for k in CSV_COLUMNS}


def write_csv(docs, fh) -> None:
    w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for doc in docs:
        w.writerow(report_csv_row(doc))


def csv_text(docs) -> str:
    buf = io.StringIO()
    write_csv(docs, buf)
    return buf.getvalue()


def summary_doc(cell_params: dict, alg: str, ratios, bound) -> dict:
    """One summary row for a sweep cell: min/mean/max ratio and the cell's
    worst-case bound."""
    doc = {
        "row_type": "summary",
        "schema_version": SCHEMA_VERSION,
        "algorithm": {"name": alg, "params": dict(cell_params)},
        "count": len(ratios),
    }
    if ratios:
        doc["ratio_min"] = min(ratios)
        doc["ratio_mean"] = sum(ratios) / len(ratios)
        doc["ratio_max"] = max(ratios)
    if bound is not None:
        doc["bound"] = bound
    return doc
