"""Recursive nef certification with independently checkable certificates.

The engine works on the boundary coefficients of a symmetric divisor.  At
each profile it searches for a constant c > 0 and an average pair making
the restricted divisor equal to c*K plus an effective boundary sum; classes
whose coefficient exceeds c are "necessary" and force recursion into both
child profiles.  Profiles with at most 7 points are accepted as base cases
and point-spaces are trivial.  The emitted certificate records every node
with enough data for an independent checker to recompute it from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable

from nefcert.averages import (
    AverageKind,
    KindPair,
    affine_coefficient_table,
    format_kinds,
    pair_admissible,
    parse_kinds,
)
from nefcert.criteria import (
    CRITERION_FUNCTIONS,
    DEFAULT_CRITERIA_ORDER,
    CriterionName,
    CriterionVerdict,
    evaluate_criteria,
    step0_constant,
)
from nefcert.divisor_algebra import (
    BoundaryClass,
    BVector,
    DomainError,
    Profile,
    SymDivisorMg,
    canonical_classes,
    format_rational,
    parse_rational,
)
from nefcert.intersection import FViolation, check_f_divisor_mg, f_inequality_value
from nefcert.pullback import child_profiles, restrict

#: Results are conditional on these statements, which the engine trusts.
AXIOMS: tuple[str, ...] = ("Bridge Theorem", "Ray Theorem", "F-conjecture N≤7")

#: Node-count guard for pathological certificate materialization.
DEFAULT_MAX_DEPTH = 64

DEFAULT_KIND_ORDER: tuple[KindPair, ...] = (
    (AverageKind.BIG, AverageKind.BIG),
    (AverageKind.A2, AverageKind.Z2),
    (AverageKind.A1, AverageKind.Z1),
    (AverageKind.A3, AverageKind.Z3),
    (AverageKind.A2, AverageKind.BIG),
    (AverageKind.BIG, AverageKind.Z2),
    (AverageKind.A1, AverageKind.BIG),
    (AverageKind.BIG, AverageKind.Z1),
    (AverageKind.A3, AverageKind.BIG),
    (AverageKind.BIG, AverageKind.Z3),
)


class NotFDivisorError(Exception):
    """The input violates the F-inequalities; carries the violation list."""

    def __init__(self, violations: list[FViolation]):
        super().__init__(
            "not an F-divisor: " + "; ".join(v.describe() for v in violations)
        )
        self.violations = violations


@dataclass(frozen=True)
class EngineConfig:
    kind_search_order: tuple[KindPair, ...] = DEFAULT_KIND_ORDER
    c_policy: str = "max_feasible"  # or "min_necessary"
    max_depth: int = DEFAULT_MAX_DEPTH
    criteria_enabled: tuple[CriterionName, ...] = DEFAULT_CRITERIA_ORDER
    parallelism: int = 1

    def __post_init__(self) -> None:
        if not self.kind_search_order:
            raise DomainError("kind search order must be nonempty")
        if self.max_depth < 1:
            raise DomainError("max_depth must be >= 1")
        if self.c_policy not in ("max_feasible", "min_necessary"):
            raise DomainError(f"unknown c policy {self.c_policy!r}")

    def to_dict(self) -> dict:
        return {
            "kind_search_order": [format_kinds(k) for k in self.kind_search_order],
            "c_policy": self.c_policy,
            "max_depth": self.max_depth,
            "criteria_enabled": [c.value for c in self.criteria_enabled],
            "parallelism": self.parallelism,
        }

    @staticmethod
    def from_dict(data: dict) -> EngineConfig:
        return EngineConfig(
            kind_search_order=tuple(
                parse_kinds(k) for k in data.get("kind_search_order", [])
            )
            or DEFAULT_KIND_ORDER,
            c_policy=data.get("c_policy", "max_feasible"),
            max_depth=data.get("max_depth", DEFAULT_MAX_DEPTH),
            criteria_enabled=tuple(
                CriterionName(c) for c in data.get("criteria_enabled", [])
            )
            if "criteria_enabled" in data
            else DEFAULT_CRITERIA_ORDER,
            parallelism=data.get("parallelism", 1),
        )


# ---------------------------------------------------------------------------
# Certificate nodes
# ---------------------------------------------------------------------------


@dataclass
class CriterionLeaf:
    verdict: CriterionVerdict
    conclusive: bool = True


@dataclass
class BaseLeaf:
    profile: Profile
    conclusive: bool = True


@dataclass
class TrivialLeaf:
    profile: Profile
    reason: str  # "point-space" | "zero-divisor"
    conclusive: bool = True


@dataclass
class InnerNode:
    profile: Profile
    kinds: KindPair
    c: Fraction
    coefficients: dict[BoundaryClass, Fraction]
    necessary: list[tuple[BoundaryClass, tuple[object, object]]]
    conclusive: bool = True


@dataclass
class InconclusiveNode:
    profile: Profile
    reason: str
    attempts: list[dict]
    conclusive: bool = False


Node = CriterionLeaf | BaseLeaf | TrivialLeaf | InnerNode | InconclusiveNode


@dataclass
class Certificate:
    divisor: SymDivisorMg
    config: EngineConfig
    root: Node
    axioms: tuple[str, ...] = AXIOMS

    @property
    def genus(self) -> int:
        return self.divisor.genus

    def is_conclusive(self) -> bool:
        return self.root.conclusive

    def node_count(self) -> int:
        return _count_nodes(self.root)

    def depth(self) -> int:
        return _depth_of(self.root)

    def closer(self) -> dict:
        """Machine-readable description of what closed the root."""
        root = self.root
        if isinstance(root, CriterionLeaf):
            return {"type": "criterion", "name": root.verdict.name.value}
        if isinstance(root, BaseLeaf):
            return {"type": "base"}
        if isinstance(root, TrivialLeaf):
            return {"type": "trivial", "reason": root.reason}
        if isinstance(root, InnerNode):
            return {"type": "recursion", "depth": self.depth()}
        return {"type": "inconclusive"}


def _children_of(node: Node) -> list[Node]:
    if isinstance(node, InnerNode):
        return [child for _, pair in node.necessary for child in pair]
    return []


def _count_nodes(node: Node) -> int:
    return 1 + sum(_count_nodes(c) for c in _children_of(node))


def _depth_of(node: Node) -> int:
    children = _children_of(node)
    if not children:
        return 1
    return 1 + max(_depth_of(c) for c in children)


# ---------------------------------------------------------------------------
# Core algorithm
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EffectivityFailure:
    """The boundary table has a negative entry; this (c, kinds) is unusable."""

    negative: tuple[tuple[BoundaryClass, Fraction], ...]


def necessary_classes(avg, c) -> list[BoundaryClass] | EffectivityFailure:
    """Classes whose coefficient strictly exceeds c, or an effectivity failure."""
    c = Fraction(c)
    if avg.c != c:
        raise DomainError(f"average was formed at c = {avg.c}, asked about c = {c}")
    negative = tuple(
        (cls, v) for cls, v in sorted(avg.boundary_coeffs.items(), key=lambda kv: kv[0].sort_key())
        if v < 0
    )
    if negative:
        return EffectivityFailure(negative)
    return [
        cls
        for cls in sorted(avg.boundary_coeffs, key=BoundaryClass.sort_key)
        if avg.boundary_coeffs[cls] > c
    ]


@lru_cache(maxsize=None)
def _four_block_weight_sums(weights: tuple[int, ...]) -> tuple[tuple[int, int, int, int], ...]:
    """Distinct sorted 4-tuples of block weight sums over 4-block partitions."""
    counts = sorted(Profile(weights).weight_counts().items())
    sums: set[tuple[int, int, int, int]] = set()

    def compositions(m: int):
        for i in range(m + 1):
            for j in range(m - i + 1):
                for k in range(m - i - j + 1):
                    yield (i, j, k, m - i - j - k)

    per_weight = [list(compositions(mult)) for _, mult in counts]
    for assignment in product(*per_weight):
        blocks = [0, 0, 0, 0]
        points = [0, 0, 0, 0]
        for (w, _), comp in zip(counts, assignment):
            for t in range(4):
                blocks[t] += w * comp[t]
                points[t] += comp[t]
        if all(p >= 1 for p in points):
            sums.add(tuple(sorted(blocks)))
    return tuple(sorted(sums))


def restriction_is_f_positive(b: BVector, profile: Profile) -> bool:
    """True when every 4-block boundary curve on the profile meets the
    restricted divisor nonnegatively (the family-5 value on block sums)."""
    if profile.point_count < 4:
        return True
    for parts in _four_block_weight_sums(profile.weights):
        if f_inequality_value(b, parts) < 0:
            return False
    return True


def restriction_is_numerically_zero(b: BVector, profile: Profile) -> bool:
    """True when the restriction rewrites as an identically-zero boundary sum.

    The plain (c = 0) big average is an exact identity in the Picard group,
    so an all-zero coefficient table certifies that the restricted divisor
    is the zero class; such nodes close trivially (this is the only place
    c = 0 is admitted).
    """
    if profile.point_count <= 3:
        return True
    wd = restrict(b, profile)
    if any(v != 0 for v in wd.psi_coeffs.values()) or any(
        v != 0 for v in wd.boundary_coeffs.values()
    ):
        table = affine_coefficient_table(wd, (AverageKind.BIG, AverageKind.BIG))
        return all(a_s == 0 for a_s, _ in table.values())
    return True


def _candidate_constants(
    table: dict[BoundaryClass, tuple[Fraction, Fraction]],
    b: BVector,
    profile: Profile,
    kinds: KindPair,
) -> list[Fraction]:
    """Positive breakpoints where some coefficient hits 0 or hits c, plus the
    step-0 constant on the all-ones profile under the big average."""
    candidates: set[Fraction] = set()
    for a_s, b_s in table.values():
        if b_s != 0:
            root = -a_s / b_s
            if root > 0:
                candidates.add(root)
        if b_s != 1:
            cross = a_s / (1 - b_s)
            if cross > 0:
                candidates.add(cross)
    if profile.a == 0 and kinds == (AverageKind.BIG, AverageKind.BIG):
        step0 = step0_constant(b)
        if step0.c is not None and step0.c > 0:
            candidates.add(step0.c)
    return sorted(candidates, reverse=True)


def certify_node(
    b: BVector,
    profile: Profile,
    config: EngineConfig,
    memo: dict | None = None,
    depth: int = 0,
) -> Node:
    """Certify one profile; results are memoized on the profile's weights."""
    if profile.genus != b.genus:
        raise DomainError(
            f"profile genus {profile.genus} does not match b-vector genus {b.genus}"
        )
    if memo is None:
        memo = {}
    key = profile.weights
    if key in memo:
        return memo[key]
    node = _certify_fresh(b, profile, config, memo, depth)
    memo[key] = node
    return node


def _certify_fresh(
    b: BVector,
    profile: Profile,
    config: EngineConfig,
    memo: dict,
    depth: int,
) -> Node:
    n = profile.point_count
    if b.is_zero():
        return TrivialLeaf(profile, "zero-divisor")
    if n <= 3:
        return TrivialLeaf(profile, "point-space")
    if restriction_is_numerically_zero(b, profile):
        return TrivialLeaf(profile, "zero-restriction")
    if n <= 7:
        if not restriction_is_f_positive(b, profile):
            raise DomainError(
                f"restriction to {profile.weights} is not F-positive; "
                "input cannot come from an F-divisor"
            )
        return BaseLeaf(profile)
    if depth >= config.max_depth:
        return InconclusiveNode(profile, "max recursion depth exceeded", [])

    wd = restrict(b, profile)
    attempts: list[dict] = []
    for kinds in config.kind_search_order:
        if not pair_admissible(profile, kinds):
            continue
        table = affine_coefficient_table(wd, kinds)
        candidates = _candidate_constants(table, b, profile, kinds)
        feasible = [
            c
            for c in candidates
            if all(a_s + b_s * c >= 0 for a_s, b_s in table.values())
        ]
        if config.c_policy == "min_necessary":
            def necessary_count(c: Fraction) -> int:
                return sum(1 for a_s, b_s in table.values() if a_s + b_s * c > c)

            feasible.sort(key=lambda c: (necessary_count(c), -c))
        attempt_info: dict = {
            "kinds": format_kinds(kinds),
            "candidates": len(candidates),
            "feasible": len(feasible),
        }
        for c in feasible:
            coeffs = {cls: a_s + b_s * c for cls, (a_s, b_s) in table.items()}
            needed = [
                cls
                for cls in sorted(coeffs, key=BoundaryClass.sort_key)
                if coeffs[cls] > c
            ]
            children: list[tuple[BoundaryClass, tuple[Node, Node]]] = []
            all_ok = True
            for cls in needed:
                first, second = child_profiles(profile, cls)
                left = certify_node(b, first, config, memo, depth + 1)
                right = certify_node(b, second, config, memo, depth + 1)
                children.append((cls, (left, right)))
                if not (left.conclusive and right.conclusive):
                    all_ok = False
                    break
            if all_ok:
                return InnerNode(profile, kinds, c, coeffs, children)
            attempt_info.setdefault("failed_c", format_rational(c))
        attempts.append(attempt_info)
    return InconclusiveNode(
        profile, "no certifying average found", attempts
    )


def certify_nef(divisor: SymDivisorMg, config: EngineConfig | None = None) -> Certificate:
    """Certify a symmetric divisor nef, or report why the attempt fails.

    Raises NotFDivisorError when the input violates the F-inequalities.
    Otherwise the result is a certificate whose root is a criterion leaf, a
    base/trivial leaf, a recursion tree, or an inconclusive record.
    """
    if config is None:
        config = EngineConfig()
    violations = check_f_divisor_mg(divisor)
    if violations:
        raise NotFDivisorError(violations)
    g = divisor.genus
    root_profile = Profile.all_ones(g)
    if divisor.is_zero():
        return Certificate(divisor, config, TrivialLeaf(root_profile, "zero-divisor"))
    verdict = evaluate_criteria(divisor, config.criteria_enabled)
    if verdict is not None:
        return Certificate(divisor, config, CriterionLeaf(verdict))
    root = certify_node(divisor.b_vector(), root_profile, config)
    return Certificate(divisor, config, root)


# ---------------------------------------------------------------------------
# Independent validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationResult:
    valid: bool
    proves_nef: bool
    defect: str | None = None


def validate_certificate(divisor: SymDivisorMg, cert: Certificate) -> ValidationResult:
    """Re-check every node of a certificate from scratch.

    Valid means the document is internally consistent (all tables, necessary
    sets and leaf conditions recompute exactly); proves_nef additionally
    requires that no node is inconclusive.
    """
    if cert.divisor != divisor:
        return ValidationResult(False, False, "certificate divisor does not match input")
    violations = check_f_divisor_mg(divisor)
    if violations:
        return ValidationResult(False, False, "divisor is not an F-divisor")
    b = divisor.b_vector()
    defect = _validate_node(divisor, b, cert.root, Profile.all_ones(divisor.genus))
    if defect is not None:
        return ValidationResult(False, False, defect)
    return ValidationResult(True, cert.is_conclusive(), None)


def _validate_node(
    divisor: SymDivisorMg, b: BVector, node: Node, expected_profile: Profile
) -> str | None:
    if isinstance(node, CriterionLeaf):
        name = node.verdict.name
        if name not in CRITERION_FUNCTIONS:
            return f"unknown criterion {name}"
        recomputed = CRITERION_FUNCTIONS[name](divisor)
        if not recomputed.applies:
            return f"criterion {name.value} does not apply to the divisor"
        if name is CriterionName.LEVEL0 and node.verdict.witness_c is not None:
            c = node.verdict.witness_c
            if c <= 0:
                return "level-0 witness must be positive"
            g = divisor.genus
            b1 = divisor.delta_coeffs[1]
            for i in range(2, g // 2 + 1):
                coeff = (b1 - c) * Fraction(i * (g - i), g - 1) + 2 * c - divisor.delta_coeffs[i]
                if not 0 <= coeff <= c:
                    return f"level-0 witness fails at i={i}"
        if name is CriterionName.B0 and node.verdict.witness_c is not None:
            if node.verdict.witness_c != divisor.b0:
                return "b0 witness does not equal b_0"
        return None
    if isinstance(node, TrivialLeaf):
        if node.profile != expected_profile:
            return f"trivial leaf profile {node.profile.weights} unexpected"
        if node.profile.point_count > 3 and not restriction_is_numerically_zero(
            b, node.profile
        ):
            return "trivial leaf on a non-trivial space with nonzero restriction"
        return None
    if isinstance(node, BaseLeaf):
        if node.profile != expected_profile:
            return f"base leaf profile {node.profile.weights} unexpected"
        if not 4 <= node.profile.point_count <= 7:
            return f"base leaf needs 4 <= N <= 7, got {node.profile.point_count}"
        if not restriction_is_f_positive(b, node.profile):
            return "base leaf restriction is not F-positive"
        return None
    if isinstance(node, InnerNode):
        profile = node.profile
        if profile != expected_profile:
            return f"inner node profile {profile.weights} unexpected"
        if profile.point_count < 8:
            return "inner node on a base-case profile"
        if node.c <= 0:
            return "inner node constant must be positive"
        if not pair_admissible(profile, node.kinds):
            return f"kinds {format_kinds(node.kinds)} inadmissible on {profile.weights}"
        table = affine_coefficient_table(restrict(b, profile), node.kinds)
        recomputed = {cls: a_s + b_s * node.c for cls, (a_s, b_s) in table.items()}
        if recomputed != node.coefficients:
            return f"coefficient table mismatch at profile {profile.weights}"
        if any(v < 0 for v in recomputed.values()):
            return f"effectivity fails at profile {profile.weights}"
        required = {cls for cls, v in recomputed.items() if v > node.c}
        stored = {cls for cls, _ in node.necessary}
        if required != stored:
            missing = required - stored
            if missing:
                return (
                    f"missing necessary class {sorted(missing)[0].side} "
                    f"at profile {profile.weights}"
                )
            extra = stored - required
            return (
                f"unnecessary child for class {sorted(extra)[0].side} "
                f"at profile {profile.weights}"
            )
        for cls, (left, right) in node.necessary:
            first, second = child_profiles(profile, cls)
            for child, expected in ((left, first), (right, second)):
                child_profile = getattr(child, "profile", None)
                if child_profile != expected:
                    return (
                        f"child profile mismatch under class {cls.side} "
                        f"at profile {profile.weights}"
                    )
                result = _validate_node(divisor, b, child, expected)
                if result is not None:
                    return result
        return None
    if isinstance(node, InconclusiveNode):
        return None
    return f"unknown node type {type(node).__name__}"


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _class_to_list(cls: BoundaryClass) -> list[int]:
    return list(cls.side)


def _verdict_to_dict(verdict: CriterionVerdict) -> dict:
    data: dict = {"name": verdict.name.value, "applies": verdict.applies}
    if verdict.witness_c is not None:
        data["c"] = format_rational(verdict.witness_c)
    if verdict.witness_interval is not None:
        lo, hi = verdict.witness_interval
        data["c_interval"] = [
            format_rational(lo),
            format_rational(hi) if hi is not None else None,
        ]
    if verdict.trace is not None:
        data["trace"] = {
            "classes": [list(grp) for grp in verdict.trace.classes],
            "zero_indices": sorted(verdict.trace.zero_indices),
        }
    if verdict.detail:
        data["detail"] = verdict.detail
    return data


def _verdict_from_dict(data: dict) -> CriterionVerdict:
    interval = None
    if data.get("c_interval") is not None:
        lo, hi = data["c_interval"]
        interval = (
            parse_rational(lo),
            parse_rational(hi) if hi is not None else None,
        )
    return CriterionVerdict(
        name=CriterionName(data["name"]),
        applies=data["applies"],
        witness_c=parse_rational(data["c"]) if "c" in data else None,
        witness_interval=interval,
        detail=data.get("detail", ""),
    )


def node_to_dict(node: Node) -> dict:
    if isinstance(node, CriterionLeaf):
        return {"kind": "criterion", "verdict": _verdict_to_dict(node.verdict)}
    if isinstance(node, BaseLeaf):
        return {"kind": "base", "profile": list(node.profile.weights)}
    if isinstance(node, TrivialLeaf):
        return {
            "kind": "trivial",
            "profile": list(node.profile.weights),
            "reason": node.reason,
        }
    if isinstance(node, InnerNode):
        return {
            "kind": "inner",
            "profile": list(node.profile.weights),
            "averages": format_kinds(node.kinds),
            "c": format_rational(node.c),
            "coefficients": [
                {"side": _class_to_list(cls), "value": format_rational(v)}
                for cls, v in sorted(
                    node.coefficients.items(), key=lambda kv: kv[0].sort_key()
                )
            ],
            "necessary": [
                {
                    "side": _class_to_list(cls),
                    "children": [node_to_dict(left), node_to_dict(right)],
                }
                for cls, (left, right) in node.necessary
            ],
        }
    if isinstance(node, InconclusiveNode):
        return {
            "kind": "inconclusive",
            "profile": list(node.profile.weights),
            "reason": node.reason,
            "attempts": node.attempts,
        }
    raise DomainError(f"cannot serialize node {node!r}")


def node_from_dict(data: dict) -> Node:
    kind = data.get("kind")
    if kind == "criterion":
        return CriterionLeaf(_verdict_from_dict(data["verdict"]))
    if kind == "base":
        return BaseLeaf(Profile(tuple(data["profile"])))
    if kind == "trivial":
        return TrivialLeaf(Profile(tuple(data["profile"])), data["reason"])
    if kind == "inner":
        coeffs = {
            BoundaryClass(tuple(entry["side"])): parse_rational(entry["value"])
            for entry in data["coefficients"]
        }
        necessary = []
        for entry in data["necessary"]:
            left = node_from_dict(entry["children"][0])
            right = node_from_dict(entry["children"][1])
            necessary.append((BoundaryClass(tuple(entry["side"])), (left, right)))
        node = InnerNode(
            Profile(tuple(data["profile"])),
            parse_kinds(data["averages"]),
            parse_rational(data["c"]),
            coeffs,
            necessary,
        )
        node.conclusive = all(
            child.conclusive for _, pair in necessary for child in pair
        )
        return node
    if kind == "inconclusive":
        return InconclusiveNode(
            Profile(tuple(data["profile"])), data["reason"], data.get("attempts", [])
        )
    raise DomainError(f"unknown certificate node kind {kind!r}")


def certificate_to_dict(cert: Certificate) -> dict:
    return {
        "version": 1,
        "genus": cert.genus,
        "divisor": {
            "genus": cert.divisor.genus,
            "lambda": format_rational(cert.divisor.lambda_coeff),
            "deltas": [format_rational(c) for c in cert.divisor.delta_coeffs],
        },
        "config": cert.config.to_dict(),
        "axioms": list(cert.axioms),
        "root": node_to_dict(cert.root),
    }


def certificate_from_dict(data: dict) -> Certificate:
    div = data["divisor"]
    divisor = SymDivisorMg(
        div["genus"],
        parse_rational(div["lambda"]),
        tuple(parse_rational(c) for c in div["deltas"]),
    )
    return Certificate(
        divisor,
        EngineConfig.from_dict(data.get("config", {})),
        node_from_dict(data["root"]),
        tuple(data.get("axioms", AXIOMS)),
    )
