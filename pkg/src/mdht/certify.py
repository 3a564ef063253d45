"""Machine-checkable upper bounds on ||H_Omega||_{2->2} via cover trees.

A certificate is a tree of rule applications.  Rules:

  SINGLE   one direction, value 1
  TRIVIAL  value = #Omega (triangle inequality)
  ORTHO    value = value(reps) + sqrt(E_sup) (max_j value(cell_j) + 1),
           the almost-orthogonality inequality over a cell cover
  SPLIT    value(A u B) <= value(A) + value(B)
  AFFINE   componentwise positive-dilation + translation invariance
  SLICE    invariance under extension by fixed trailing coordinates

All node arithmetic is rounded toward +infinity, so stored float values
are sound upper bounds; re-audit reproduces them bit for bit.  The E_sup
at every ORTHO node carries provenance "exact" (from the planar stabbing
enumeration) or "structured:<rule>" (a proven geometric bound valid for
almost every hyperplane, which is the quantity the inequality needs);
sampled stabbing values are never accepted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .cells import CellCover, grid_cover_for_product, interval_cover_1d, curve_cover
from .directions import DirectionSet, affine_image, lacunary_blocks
from .hamsandwich import partition_points_2d
from .probes import ProbeReport
from .roundup import up_add, up_mul, up_sqrt

RULES = ("SINGLE", "TRIVIAL", "ORTHO", "SPLIT", "AFFINE", "SLICE")

STRATEGIES = (
    "dyadic-1d",
    "curve-pairs",
    "product-grid",
    "hamsandwich-2d",
    "lacunary-mixed",
    "trivial",
)


@dataclass(frozen=True)
class ESup:
    value: int
    provenance: str

    def __post_init__(self):
        if self.provenance != "exact" and not self.provenance.startswith("structured:"):
            raise ValueError(
                "E_sup provenance must be 'exact' or 'structured:<rule>'"
            )


@dataclass(frozen=True)
class Strategy:
    kind: str
    degree: int | None = None
    rounds: int | None = None

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "Strategy":
        """Parse 'kind', 'curve-pairs:D' or 'hamsandwich-2d:rounds'."""
        kind, _, arg = text.partition(":")
        if kind == "curve-pairs":
            return cls(kind, degree=int(arg) if arg else None)
        if kind == "hamsandwich-2d":
            return cls(kind, rounds=int(arg) if arg else 2)
        return cls(kind)


@dataclass(frozen=True)
class BoundCertificate:
    omega_label: str
    n_points: int
    value: float
    rule: str
    children: tuple = ()
    e_sup: ESup | None = None
    note: str = ""

    def to_json_dict(self) -> dict:
        d = {
            "omega_label": self.omega_label,
            "n_points": self.n_points,
            "value": self.value,
            "rule": self.rule,
            "children": [c.to_json_dict() for c in self.children],
        }
        if self.e_sup is not None:
            d["e_sup"] = {"value": self.e_sup.value, "provenance": self.e_sup.provenance}
        if self.note:
            d["note"] = self.note
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "BoundCertificate":
        e = d.get("e_sup")
        return cls(
            omega_label=d["omega_label"],
            n_points=int(d["n_points"]),
            value=float(d["value"]),
            rule=d["rule"],
            children=tuple(cls.from_json_dict(c) for c in d["children"]),
            e_sup=ESup(int(e["value"]), e["provenance"]) if e else None,
            note=d.get("note", ""),
        )

    def save(self, path, extra: dict | None = None):
        d = self.to_json_dict()
        if extra:
            d.update(extra)
        with open(path, "w") as fh:
            json.dump(d, fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "BoundCertificate":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def single_certificate(omega: DirectionSet) -> BoundCertificate:
    if len(omega) != 1:
        raise ValueError("SINGLE applies to singleton sets")
    return BoundCertificate(omega.label, 1, 1.0, "SINGLE")


def trivial_certificate(omega: DirectionSet) -> BoundCertificate:
    return BoundCertificate(omega.label, len(omega), float(len(omega)), "TRIVIAL")


def ortho_node(omega_label: str, n_points: int, rep_cert: BoundCertificate,
               cell_certs, e_sup: ESup, note: str = "") -> BoundCertificate:
    cell_certs = tuple(cell_certs)
    if not cell_certs:
        raise ValueError("ORTHO needs at least one cell child")
    max_child = max(c.value for c in cell_certs)
    value = up_add(rep_cert.value, up_mul(up_sqrt(float(e_sup.value)),
                                          up_add(max_child, 1.0)))
    return BoundCertificate(
        omega_label, n_points, value, "ORTHO",
        children=(rep_cert,) + cell_certs, e_sup=e_sup, note=note,
    )


def split_certificate(parts, label: str = "") -> BoundCertificate:
    parts = tuple(parts)
    if len(parts) < 2:
        raise ValueError("SPLIT needs at least two parts")
    value = parts[0].value
    for p in parts[1:]:
        value = up_add(value, p.value)
    return BoundCertificate(
        label or " + ".join(p.omega_label for p in parts),
        sum(p.n_points for p in parts),
        value,
        "SPLIT",
        children=parts,
    )


def affine_certificate(cert: BoundCertificate, label: str) -> BoundCertificate:
    return BoundCertificate(label, cert.n_points, cert.value, "AFFINE", children=(cert,))


def slice_certificate(cert: BoundCertificate, label: str) -> BoundCertificate:
    return BoundCertificate(label, cert.n_points, cert.value, "SLICE", children=(cert,))


def _leaf(omega: DirectionSet) -> BoundCertificate:
    return single_certificate(omega) if len(omega) == 1 else trivial_certificate(omega)


# ------------------------------------------------------------------ builders

def _certify_dyadic_1d(omega: DirectionSet) -> BoundCertificate:
    if omega.dim != 1:
        raise ValueError("dyadic-1d needs a one-dimensional set")
    if len(omega) == 1:
        return single_certificate(omega)
    cover = interval_cover_1d(omega, 2)
    cell_certs = [_leaf(ms) for ms in cover.member_sets()]
    reps = cover.representative_set(f"reps({omega.label})")
    rep_cert = _certify_dyadic_1d(reps)
    return ortho_node(
        omega.label, len(omega), rep_cert, cell_certs,
        ESup(1, "structured:disjoint-1d-intervals"),
    )


def _certify_curve_pairs(omega: DirectionSet, degree: int) -> BoundCertificate:
    if degree is None or degree < 1:
        raise ValueError("curve-pairs needs a crossing degree >= 1")
    if len(omega) == 1:
        return single_certificate(omega)
    cover = curve_cover(omega, 2)
    cell_certs = [_leaf(ms) for ms in cover.member_sets()]
    reps = cover.representative_set(f"reps({omega.label})")
    rep_cert = _certify_curve_pairs(reps, degree)
    return ortho_node(
        omega.label, len(omega), rep_cert, cell_certs,
        ESup(degree, "structured:curve-crossing-degree"),
    )


def _product_axes(omega: DirectionSet):
    axes = [sorted(set(p[k] for p in omega.points)) for k in range(omega.dim)]
    size = 1
    for a in axes:
        size *= len(a)
    return axes if size == len(omega) else None


def _certify_product_grid(omega: DirectionSet) -> BoundCertificate:
    if omega.dim != 2:
        raise ValueError("product-grid certification covers planar products")
    axes = _product_axes(omega)
    if axes is None:
        raise ValueError("product-grid needs a Cartesian product set")
    if len(axes[0]) != len(axes[1]):
        raise ValueError("product-grid needs equal axis cardinalities")
    if len(omega) == 1:
        return single_certificate(omega)
    n1 = len(axes[0])
    cover = grid_cover_for_product(omega, (2, 2))
    cell_certs = [_leaf(ms) for ms in cover.member_sets()]
    reps = cover.representative_set(f"reps({omega.label})")
    rep_cert = _certify_product_grid(reps)
    return ortho_node(
        omega.label, len(omega), rep_cert, cell_certs,
        ESup(n1, "structured:grid-rows (a line meets at most N1-1 grid cells)"),
    )


def _certify_lacunary_mixed(omega: DirectionSet) -> BoundCertificate:
    blocks = lacunary_blocks(omega)
    if len(omega) == 1:
        return single_certificate(omega)
    if len(blocks) == 1:
        return _certify_dyadic_1d(omega)
    cell_certs = []
    rep_points = []
    for j, vals in blocks.items():
        block = DirectionSet(1, tuple((v,) for v in vals), f"{omega.label}|block{j}")
        # normalize to unit scale before the dyadic recursion
        normalized = affine_image(block, (2**j,), (-1,))
        child = _certify_dyadic_1d(normalized)
        cell_certs.append(affine_certificate(child, block.label))
        rep_points.append((vals[0],))
    reps = DirectionSet(1, tuple(rep_points), f"reps({omega.label})")
    rep_cert = _certify_dyadic_1d(reps)
    return ortho_node(
        omega.label, len(omega), rep_cert, cell_certs,
        ESup(1, "structured:disjoint-1d-intervals"),
    )


def _certify_hamsandwich(omega: DirectionSet, rounds: int) -> BoundCertificate:
    if omega.dim != 2:
        raise ValueError("hamsandwich-2d needs a planar set")
    if len(omega) == 1:
        return single_certificate(omega)
    if len(omega) <= 2**rounds:
        return trivial_certificate(omega)
    cover, degree = partition_points_2d(omega, rounds)
    if len(cover.cells) >= len(omega):
        return trivial_certificate(omega)
    cell_certs = [_leaf(ms) for ms in cover.member_sets()]
    reps = cover.representative_set(f"reps({omega.label})")
    rep_cert = _certify_hamsandwich(reps, rounds)
    node = ortho_node(
        omega.label, len(omega), rep_cert, cell_certs,
        ESup(degree + 1, "structured:line-arrangement (k cut lines meet a line in <= k points)"),
    )
    # recursing is only worth it while the bound actually improves
    if node.value >= len(omega):
        return trivial_certificate(omega)
    return node


def certify(omega: DirectionSet, strategy: Strategy | str) -> BoundCertificate:
    """Build a sound upper-bound certificate for ||H_Omega||_{2->2}."""
    if isinstance(strategy, str):
        strategy = Strategy.parse(strategy)
    if len(omega) < 1:
        raise ValueError("direction set must be nonempty")
    if strategy.kind == "trivial":
        return trivial_certificate(omega)
    if strategy.kind == "dyadic-1d":
        return _certify_dyadic_1d(omega)
    if strategy.kind == "curve-pairs":
        degree = strategy.degree
        if degree is None:
            raise ValueError("curve-pairs strategy needs an explicit degree")
        return _certify_curve_pairs(omega, degree)
    if strategy.kind == "product-grid":
        return _certify_product_grid(omega)
    if strategy.kind == "lacunary-mixed":
        return _certify_lacunary_mixed(omega)
    if strategy.kind == "hamsandwich-2d":
        return _certify_hamsandwich(omega, strategy.rounds or 2)
    raise AssertionError(strategy.kind)


# ------------------------------------------------------------------ auditing

class AuditError(ValueError):
    pass


def verify_certificate(cert: BoundCertificate):
    """Re-derive every node value bit for bit and check E_sup provenance."""
    if cert.rule not in RULES:
        raise AuditError(f"unknown rule {cert.rule!r}")
    if cert.rule == "SINGLE":
        if cert.n_points != 1 or cert.value != 1.0:
            raise AuditError("SINGLE node must certify one direction at value 1")
    elif cert.rule == "TRIVIAL":
        if cert.value != float(cert.n_points):
            raise AuditError("TRIVIAL node value must equal its cardinality")
    elif cert.rule == "ORTHO":
        if cert.e_sup is None:
            raise AuditError("ORTHO node without E_sup")
        if cert.e_sup.provenance != "exact" and not cert.e_sup.provenance.startswith(
            "structured:"
        ):
            raise AuditError("ORTHO E_sup must be exact or structured")
        if len(cert.children) < 2:
            raise AuditError("ORTHO node needs representatives and cells")
        rep, cells = cert.children[0], cert.children[1:]
        if rep.n_points != len(cells):
            raise AuditError("one representative per cell is required")
        if sum(c.n_points for c in cells) < cert.n_points:
            raise AuditError("cells do not cover the claimed cardinality")
        expect = up_add(
            rep.value,
            up_mul(up_sqrt(float(cert.e_sup.value)),
                   up_add(max(c.value for c in cells), 1.0)),
        )
        if expect != cert.value:
            raise AuditError(
                f"ORTHO arithmetic mismatch: stored {cert.value!r}, recomputed {expect!r}"
            )
    elif cert.rule == "SPLIT":
        if len(cert.children) < 2:
            raise AuditError("SPLIT needs at least two children")
        acc = cert.children[0].value
        for c in cert.children[1:]:
            acc = up_add(acc, c.value)
        if acc != cert.value:
            raise AuditError("SPLIT arithmetic mismatch")
        if sum(c.n_points for c in cert.children) != cert.n_points:
            raise AuditError("SPLIT cardinality mismatch")
    elif cert.rule in ("AFFINE", "SLICE"):
        if len(cert.children) != 1:
            raise AuditError(f"{cert.rule} wraps exactly one child")
        if cert.children[0].value != cert.value:
            raise AuditError(f"{cert.rule} must preserve the value")
        if cert.children[0].n_points != cert.n_points:
            raise AuditError(f"{cert.rule} must preserve the cardinality")
    for child in cert.children:
        verify_certificate(child)


def soundness_audit(cert: BoundCertificate, report: ProbeReport) -> bool:
    """True iff the certificate is internally valid and dominates the
    measured Rayleigh quotient for the same direction set."""
    if cert.omega_label != report.omega_label:
        raise AuditError(
            f"label mismatch: certificate {cert.omega_label!r} vs report "
            f"{report.omega_label!r}"
        )
    verify_certificate(cert)
    return cert.value >= report.max_rayleigh
