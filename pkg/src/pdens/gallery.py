"""A corpus of germs written in the set language, used by the tests, the
experiment scripts and the .pd documents under corpus/."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .dsl import Environment, SetDef, parse, print_document, Document, Query


@dataclass(frozen=True)
class Germ:
    name: str
    p: int
    expr: str  # set expression in the DSL
    point: tuple
    tags: frozenset = field(default_factory=frozenset)
    group: int | None = None  # exponent N of the P_N used for cones; None = lcm of exponents

    def document(self, verbs=()) -> Document:
        src = f"prime {self.p};\nset {self.name} = {self.expr};\n"
        pt = ", ".join(str(Fraction(c)) for c in self.point)
        at = pt if len(self.point) == 1 else f"({pt})"
        with_ = f" with P {self.group}" if self.group else ""
        for v in verbs:
            src += f"query {v} {self.name} at {at}{with_};\n"
        return parse(src)

    def build(self):
        env = Environment(self.p)
        item = self.document().items[0]
        env.add(item)
        return env.sets[self.name]


# tags: "mt" = class-S germ for the density/cone comparison,
#       "crofton" = curve in K^2 at a point where the Crofton check applies,
#       "cross" = direction on the cone used by the deformation oracle (in ``on``)
GERMS = [
    Germ("evenval", 5, "evenval(0)", (0,), frozenset({"mt"})),
    Germ("squares", 5, "cell(0, 1 * P 2)", (0,), frozenset({"mt"})),
    Germ("cubes7", 7, "cell(0, 2 * P 3)", (0,), frozenset({"mt"})),
    Germ("two_cosets", 5, "union(cell(0, 1 * P 2), cell(0, 5 * P 4))", (0,), frozenset({"mt"})),
    Germ("ball", 3, "ball(0, 2)", (0,), frozenset({"mt"})),
    Germ("local_cone", 5, 'formula "t in 1 * P 2 and ord(t) >= 1"', (0,), frozenset({"mt"})),
    Germ("shifted", 5, 'formula "t - 1 in 2 * P 2 or ord(t - 1) >= 3"', (1,), frozenset({"mt"})),
    Germ("third_levels", 3, "union over k in Z of sphere(0, 3k+1)", (0,), frozenset({"mt"})),
    Germ("off_center", 5, "cell(1, 2 * P 2, ord >= 1)", (1,), frozenset({"mt"})),
    Germ("ray", 5, "raycone origin (0, 0) ray dir (1, 1) coset 1 * P 2", (0, 0),
         frozenset({"mt", "crofton"})),
    Germ("line", 3, "raycone origin (0, 0) apex ray dir (1, 2) coset 1 * P 1", (0, 0),
         frozenset({"mt", "crofton"})),
    Germ("two_rays", 3, "raycone origin (0, 0) ray dir (1, 0) coset 1 * P 1 "
         "ray dir (0, 1) coset 1 * P 2", (0, 0), frozenset({"mt", "crofton"})),
    Germ("three_rays", 3, "raycone origin (0, 0) ray dir (1, 1) coset 1 * P 2 "
         "ray dir (1, 2) coset 1 * P 3 ray dir (0, 1) coset 2 * P 4", (0, 0),
         frozenset({"mt", "crofton"})),
    Germ("moved_ray", 5, "raycone origin (1, 2) ray dir (1, 3) coset 2 * P 2", (1, 2),
         frozenset({"mt", "crofton"})),
    Germ("parabolas", 5, "union(graph(K, 1, 2), graph(K, -1, 2))", (0, 0),
         frozenset({"mt", "crofton"})),
    Germ("graph_pair", 5, "union(graph(cell(0, 1 * P 2), 1, 2), graph(cell(0, 1 * P 2), 2, 2))",
         (0, 0), frozenset({"mt", "crofton"})),
    Germ("cusp", 5, "graph(cell(0, 1 * P 2), 1, 3)", (0, 0), frozenset({"mt", "crofton"})),
    Germ("box", 5, "box(cell(0, 1 * P 2), evenval(0))", (0, 0), frozenset({"mt"})),
    Germ("box7", 7, "box(K, cell(0, 1 * P 3))", (0, 0), frozenset({"mt"})),
]


def germ(name: str) -> Germ:
    for g in GERMS:
        if g.name == name:
            return g
    raise KeyError(name)


def corpus_document(p: int, verbs=("density", "cone", "sc", "mt-check",
                                   "distinguished-check")) -> str:
    """All gallery germs over Q_p as one document; crofton queries for curves."""
    items = []
    for g in GERMS:
        if g.p != p:
            continue
        doc = g.document(verbs + (("crofton",) if "crofton" in g.tags else ()))
        items.extend(doc.items)
    return print_document(Document(p, tuple(items)))
