"""Plain-text dump/load of conic problems for cross-checking against external
solvers.  The format is documented in ``docs/conic-dump-format.md``."""

import numpy as np

from .problem import ConicProblem, NonnegativeCone, PsdCone, SecondOrderCone

_TAGS = {NonnegativeCone: "nonneg", SecondOrderCone: "soc", PsdCone: "psd"}


def dump_problem(problem: ConicProblem, path) -> None:
    lines = ["conicdump 1",
             f"vars {problem.num_vars}",
             f"free {problem.num_free}",
             f"equalities {problem.num_eq}",
             "cones " + " ".join(
                 f"{_TAGS[type(k)]}:{k.dim if not isinstance(k, PsdCone) else k.order}"
                 for k in problem.cones)]
    lines.append("objective " + " ".join(repr(float(v)) for v in problem.c))
    for row, r in zip(problem.A, problem.b):
        lines.append("eq " + repr(float(r)) + " : "
                     + " ".join(repr(float(v)) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_problem(path) -> ConicProblem:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if lines[0] != "conicdump 1":
        raise ValueError(f"not a conic dump file: {path}")
    header = dict(ln.split(maxsplit=1) for ln in lines[1:4])
    n = int(header["vars"])
    free = int(header["free"])
    m = int(header["equalities"])
    cone_spec = lines[4].split()[1:]
    cones = []
    for item in cone_spec:
        tag, dim = item.split(":")
        dim = int(dim)
        if tag == "nonneg":
            cones.append(NonnegativeCone(dim))
        elif tag == "soc":
            cones.append(SecondOrderCone(dim))
        elif tag == "psd":
            cones.append(PsdCone(dim))
        else:
            raise ValueError(f"unknown cone tag {tag!r}")
    c = np.array([float(v) for v in lines[5].split()[1:]])
    A = np.zeros((m, n))
    b = np.zeros(m)
    for i, ln in enumerate(lines[6:6 + m]):
        head, tail = ln.split(":")
        b[i] = float(head.split()[1])
        A[i] = [float(v) for v in tail.split()]
    return ConicProblem(c, A, b, tuple(cones), num_free=free)
