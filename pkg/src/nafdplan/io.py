"""Deterministic CSV emission for matrices, reports, and run artifacts."""

from __future__ import annotations

import csv
import os

import numpy as np

from .closedform import SEReport, Solution
from .netgen import NetworkRealization, Topology


def fmt(value) -> str:
    """Floats at 17 significant digits (round-trip exact), ints verbatim."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_rows(path, header, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_matrix(path, matrix):
    """Dump a gains matrix: row = AP index, column = UE index."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    np.savetxt(path, np.asarray(matrix, dtype=float), fmt="%.17g",
               delimiter=",")


def read_matrix(path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float))


def dump_topology(topo: Topology, out_dir):
    write_matrix(os.path.join(out_dir, "ap_positions.csv"), topo.ap_pos)
    write_matrix(os.path.join(out_dir, "ul_ue_positions.csv"), topo.ul_ue_pos)
    write_matrix(os.path.join(out_dir, "dl_ue_positions.csv"), topo.dl_ue_pos)


def dump_realization(real: NetworkRealization, out_dir):
    for name in ("beta_dl", "beta_ul", "beta_du", "beta_ap",
                 "gamma_dl", "gamma_ul"):
        write_matrix(os.path.join(out_dir, f"{name}.csv"), getattr(real, name))
    write_rows(os.path.join(out_dir, "normalized_powers.csv"),
               ["name", "value"],
               [("rho_d", real.rho_d), ("rho_u", real.rho_u),
                ("rho_t", real.rho_t)])


def write_se_report(report: SEReport, path):
    rows = []
    for k, se in enumerate(report.se_dl):
        rows.append(("DL", k, se, bool(report.served_dl[k])))
    for ell, se in enumerate(report.se_ul):
        rows.append(("UL", ell, se, bool(report.served_ul[ell])))
    write_rows(path, ["link", "ue_index", "se_bits_per_s_per_hz", "served"],
               rows)


def write_history(history, evaluations_per_gen, elapsed_s, path):
    rows = [(g, best, (g + 1) * evaluations_per_gen, elapsed_s)
            for g, best in enumerate(history)]
    write_rows(path, ["generation", "best_fitness", "evaluations",
                      "elapsed_s"], rows)


def write_solution(sol: Solution, path):
    rows = []
    for m, v in enumerate(sol.a):
        rows.append(("a", m, v))
    for m, v in enumerate(sol.b):
        rows.append(("b", m, v))
    for ell, v in enumerate(sol.varsigma):
        rows.append(("varsigma", ell, v))
    for m in range(sol.theta.shape[0]):
        for k in range(sol.theta.shape[1]):
            rows.append(("theta", m * sol.theta.shape[1] + k, sol.theta[m, k]))
    for m in range(sol.alpha.shape[0]):
        for ell in range(sol.alpha.shape[1]):
            rows.append(("alpha", m * sol.alpha.shape[1] + ell,
                         sol.alpha[m, ell]))
    write_rows(path, ["variable", "index", "value"], rows)
