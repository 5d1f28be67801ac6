"""Synthetic corpus generator with planted duplicates and distractors.

Each family is one seed problem, ``duplicates`` paraphrases that share the
seed's equation template but swap surface nouns, numbers, and phrasing, and
``distractors`` near-copies of the seed text (one word changed, same
numbers) whose equation perturbs exactly one operator. Distractors are
therefore lexically closer to the seed than its true duplicates while
computing something different — the trap lexical retrieval falls into and
structural matching must not.

Generation is driven entirely by ``random.Random(seed)`` (Mersenne
Twister), so a given (n, duplicates, distractors, seed) quadruple always
produces the identical corpus, byte for byte.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from .corpus import MWPRecord, make_record
from .expr import TokenKind, strip_unknown, to_postfix, tokenize


@dataclass(frozen=True)
class TextVariant:
    template: str
    twist: tuple[str, str]  # (word present in every rendering, replacement)


@dataclass(frozen=True)
class ProblemTemplate:
    template_id: str
    equation: str
    arity: int
    variants: tuple[TextVariant, ...]


_NAMES = ("Ava", "Ben", "Carla", "Dev", "Elena", "Farid", "Grace", "Hugo",
          "Iris", "Jonas", "Kira", "Liam", "Mona", "Noah", "Omar", "Priya",
          "Quinn", "Rosa", "Sam", "Tara", "Vera", "Wes", "Yara", "Zoe")
_ITEMS = ("marbles", "stickers", "pencils", "apples", "oranges", "books",
          "coins", "shells", "cards", "balloons", "cookies", "pebbles",
          "crayons", "buttons", "stamps", "beads")
_CONTAINERS = ("boxes", "bags", "baskets", "jars", "crates", "trays")

TEMPLATES: tuple[ProblemTemplate, ...] = (
    ProblemTemplate("add2", "x = {a} + {b}", 2, (
        TextVariant("{name1} had {a} {item1}, and {name2} had {b} {item2}. "
                    "Find the total number of things they had.",
                    ("Find", "Determine")),
        TextVariant("{name1} collected {a} {item1} on Monday and {b} more "
                    "{item1} on Tuesday. How many {item1} were collected in all?",
                    ("collected", "gathered")),
        TextVariant("There are {a} {item1} in one basket and {b} {item1} in "
                    "another. How many {item1} are there altogether?",
                    ("altogether", "combined")),
    )),
    ProblemTemplate("sub2", "x = {a} - {b}", 2, (
        TextVariant("{name1} had {a} {item1} and gave {b} of them to {name2}. "
                    "How many {item1} does {name1} have left?",
                    ("gave", "handed")),
        TextVariant("A shop stocked {a} {item1} and sold {b} during the week. "
                    "How many {item1} remain on the shelf?",
                    ("sold", "moved")),
    )),
    ProblemTemplate("mul2", "x = {a} * {b}", 2, (
        TextVariant("There are {a} {container} with {b} {item1} in every one "
                    "of them. How many {item1} are there in all?",
                    ("every", "each")),
        TextVariant("{name1} arranged {item1} into {a} rows of {b}. How many "
                    "{item1} did {name1} arrange in total?",
                    ("rows", "lines")),
    )),
    ProblemTemplate("div2", "x = {a} / {b}", 2, (
        TextVariant("{name1} shares {a} {item1} equally among {b} friends. "
                    "How many {item1} does each friend get?",
                    ("friends", "cousins")),
        TextVariant("A teacher splits {a} {item1} into {b} equal piles. "
                    "How many {item1} end up in each pile?",
                    ("teacher", "coach")),
    )),
    ProblemTemplate("addmul", "x = ({a} + {b}) * {c}", 3, (
        TextVariant("A pack holds {a} {item1} and {b} {item2}. How many "
                    "things are inside {c} such packs?",
                    ("pack", "kit")),
        TextVariant("{name1} puts {a} {item1} and {b} {item2} into each bag "
                    "and fills {c} bags. How many things did {name1} pack?",
                    ("fills", "loads")),
    )),
    ProblemTemplate("muladd", "x = {a} + {b} * {c}", 3, (
        TextVariant("{name1} has {a} {item1} plus {b} {container} that hold "
                    "{c} {item2} apiece. How many things does {name1} have?",
                    ("apiece", "inside")),
        TextVariant("A stall already sold {a} {item1} and then sold {b} "
                    "batches of {c} more. How many {item1} were sold overall?",
                    ("stall", "store")),
    )),
    ProblemTemplate("subdiv", "x = ({a} - {b}) / {c}", 3, (
        TextVariant("{name1} picked {a} {item1}, ate {b}, and divided the "
                    "rest among {c} friends. How many {item1} did each friend "
                    "receive?", ("picked", "plucked")),
        TextVariant("Out of {a} {item1}, {b} were broken, and the rest were "
                    "shared by {c} students. How many {item1} did each "
                    "student take home?", ("broken", "cracked")),
    )),
    ProblemTemplate("mulsub", "x = {a} * {b} - {c}", 3, (
        TextVariant("{name1} bought {a} {container} of {b} {item1} but lost "
                    "{c} of them. How many {item1} does {name1} still have?",
                    ("lost", "dropped")),
        TextVariant("A library owns {a} shelves with {b} {item1} each, and "
                    "{c} {item1} are checked out. How many {item1} are on "
                    "the shelves now?", ("library", "school")),
    )),
    ProblemTemplate("addsub", "x = {a} + {b} - {c}", 3, (
        TextVariant("{name1} had {a} {item1}, bought {b} more, and gave away "
                    "{c}. How many {item1} does {name1} have now?",
                    ("bought", "ordered")),
        TextVariant("A club started with {a} members, welcomed {b} new ones, "
                    "and saw {c} leave. How many members does the club count "
                    "today?", ("club", "team")),
    )),
    ProblemTemplate("subsub", "x = {a} - {b} - {c}", 3, (
        TextVariant("{name1} baked {a} {item1}, gave {b} to neighbors, and "
                    "ate {c}. How many {item1} are left for the party?",
                    ("baked", "cooked")),
        TextVariant("A bin held {a} {item1}; {b} were recycled and {c} were "
                    "thrown away. How many {item1} stayed in the bin?",
                    ("recycled", "reused")),
    )),
    ProblemTemplate("muladd2", "x = {a} * {b} + {c}", 3, (
        TextVariant("{name1} filled {a} {container} with {b} {item1} each "
                    "and kept {c} loose ones. How many {item1} does {name1} "
                    "have in total?", ("loose", "spare")),
        TextVariant("A florist tied {a} bunches of {b} flowers and added {c} "
                    "single stems. How many flowers did the florist use?",
                    ("florist", "gardener")),
    )),
    ProblemTemplate("divadd", "x = {a} / {b} + {c}", 3, (
        TextVariant("{name1} deals {a} {item1} evenly to {b} players and "
                    "then hands each player {c} extra. How many {item1} does "
                    "each player end with?", ("players", "teammates")),
        TextVariant("{a} {item1} are split across {b} tables, and every "
                    "table gets {c} more later. How many {item1} sit on each "
                    "table?", ("tables", "desks")),
    )),
    ProblemTemplate("adddiv", "x = ({a} + {b}) / {c}", 3, (
        TextVariant("{name1} mixed {a} red {item1} with {b} blue {item1} and "
                    "packed them evenly into {c} {container}. How many "
                    "{item1} went into each one?", ("mixed", "joined")),
        TextVariant("Combining {a} {item1} from {name1} and {b} from "
                    "{name2}, the pile was divided among {c} children. How "
                    "many {item1} did each child get?", ("pile", "heap")),
    )),
    ProblemTemplate("submul", "x = ({a} - {b}) * {c}", 3, (
        TextVariant("From {a} seeds, {b} failed to sprout, and every sprout "
                    "grew {c} leaves. How many leaves are there?",
                    ("seeds", "bulbs")),
        TextVariant("{name1} cut {a} sheets, spoiled {b}, and folded each "
                    "good sheet into {c} cranes. How many cranes did {name1} "
                    "fold?", ("sheets", "pages")),
    )),
    ProblemTemplate("mul3", "x = {a} * {b} * {c}", 3, (
        TextVariant("A depot has {a} halls, each hall has {b} racks, and "
                    "each rack carries {c} {item1}. How many {item1} does "
                    "the depot store?", ("depot", "warehouse")),
        TextVariant("{name1} stacked {a} cartons; every carton holds {b} "
                    "boxes of {c} {item1}. How many {item1} are stacked?",
                    ("cartons", "crates")),
    )),
    ProblemTemplate("mulmul_add", "x = {a} * {b} + {c} * {d}", 4, (
        TextVariant("{name1} bought {a} packs of {b} {item1} and {c} packs "
                    "of {d} {item2}. How many things did {name1} buy?",
                    ("packs", "boxes")),
        TextVariant("A kiosk sold {a} trays of {b} muffins and {c} trays of "
                    "{d} scones. How many treats were sold?",
                    ("kiosk", "bakery")),
    )),
    ProblemTemplate("submul2", "x = {a} - {b} * {c}", 3, (
        TextVariant("{name1} saved {a} dollars and spent {b} days buying "
                    "lunch for {c} dollars a day. How many dollars are left?",
                    ("saved", "banked")),
        TextVariant("A tank held {a} liters; {b} buckets of {c} liters each "
                    "were drawn out. How many liters remain?",
                    ("tank", "barrel")),
    )),
    ProblemTemplate("add3", "x = {a} + {b} + {c}", 3, (
        TextVariant("{name1} scored {a} points in round one, {b} in round "
                    "two, and {c} in round three. How many points did "
                    "{name1} score?", ("points", "marks")),
        TextVariant("Three jars hold {a}, {b}, and {c} {item1}. How many "
                    "{item1} are there in the three jars?", ("jars", "tins")),
    )),
    ProblemTemplate("divmul", "x = {a} / {b} * {c}", 3, (
        TextVariant("{name1} poured {a} liters into {b} equal bottles and "
                    "then drank {c} of those bottles. How many liters did "
                    "{name1} drink?", ("poured", "tipped")),
        TextVariant("{a} {item1} are boxed evenly into {b} cases, and {c} "
                    "cases are shipped. How many {item1} get shipped?",
                    ("shipped", "mailed")),
    )),
    ProblemTemplate("muladd3", "x = {a} * ({b} + {c})", 3, (
        TextVariant("Each of {a} {container} contains {b} {item1} and {c} "
                    "{item2}. How many things are contained in all?",
                    ("contains", "carries")),
        TextVariant("{name1} prepared {a} gift bags, putting {b} {item1} and "
                    "{c} {item2} into every bag. How many items did {name1} "
                    "prepare?", ("gift", "party")),
    )),
)

_OP_CHARS = "+-*/"
SEED_SOURCE = "synth-seed"
DUPLICATE_SOURCE = "synth-dup"
DISTRACTOR_SOURCE = "synth-distractor"


def generate(n: int, duplicates: int = 2, distractors: int = 2,
             seed: int = 0) -> list[MWPRecord]:
    """Emit a corpus of planted families, ``1 + duplicates + distractors``
    records each.

    Only whole families are produced: ``n // family_size`` of them, round-
    robin over the template pool so bucket sizes stay even. A truncated
    family would plant a seed without its duplicates, which breaks
    oracle-labeled evaluation.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if duplicates < 0 or distractors < 0:
        raise ValueError("duplicates and distractors must be >= 0")
    rng = random.Random(seed)
    family_size = 1 + duplicates + distractors
    n_families = n // family_size
    if n_families == 0:
        raise ValueError(
            f"n={n} is smaller than one family of {family_size}")
    records: list[MWPRecord] = []
    for fam in range(n_families):
        template = TEMPLATES[fam % len(TEMPLATES)]
        fid = f"s{fam:05d}"
        seed_variant = template.variants[0]
        seed_text, seed_values = _render_text(seed_variant, template.arity, rng)
        seed_equation = _render_equation(template.equation, seed_values)
        records.append(_record(f"{fid}-seed", seed_text, seed_equation,
                               SEED_SOURCE))
        for j in range(duplicates):
            variant = template.variants[(1 + j) % len(template.variants)]
            text, values = _render_text(variant, template.arity, rng)
            equation = _render_equation(template.equation, values)
            records.append(_record(f"{fid}-dup{j}", text, equation,
                                   DUPLICATE_SOURCE))
        for j in range(distractors):
            text = _twist_text(seed_text, seed_variant.twist)
            equation = _perturb_one_operator(seed_equation, rng)
            records.append(_record(f"{fid}-dis{j}", text, equation,
                                   DISTRACTOR_SOURCE))
    return records


def seed_records(records: list[MWPRecord]) -> list[MWPRecord]:
    """The query set for oracle evaluation: one seed per family."""
    return [rec for rec in records if rec.source == SEED_SOURCE]


def _record(rec_id: str, text: str, equation: str, source: str) -> MWPRecord:
    return make_record(rec_id, text, equation, source=source,
                       solution=_solve(equation))


def _render_text(variant: TextVariant, arity: int,
                 rng: random.Random) -> tuple[str, list[int]]:
    values = rng.sample(range(2, 60), arity)
    name1, name2 = rng.sample(_NAMES, 2)
    item1, item2 = rng.sample(_ITEMS, 2)
    slots = {
        "a": values[0], "b": values[1],
        "c": values[2] if arity > 2 else "",
        "d": values[3] if arity > 3 else "",
        "name1": name1, "name2": name2,
        "item1": item1, "item2": item2,
        "container": rng.choice(_CONTAINERS),
    }
    return variant.template.format(**slots), values


def _render_equation(equation_template: str, values: list[int]) -> str:
    slots = dict(zip("abcd", values))
    return equation_template.format(**slots)


def _twist_text(text: str, twist: tuple[str, str]) -> str:
    original, replacement = twist
    twisted = re.sub(rf"\b{re.escape(original)}\b", replacement, text, count=1)
    if twisted == text:
        raise AssertionError(
            f"twist word {original!r} not found in template text {text!r}")
    return twisted


def _perturb_one_operator(equation: str, rng: random.Random) -> str:
    positions = [i for i, ch in enumerate(equation) if ch in _OP_CHARS]
    pos = rng.choice(positions)
    replacement = rng.choice([op for op in _OP_CHARS if op != equation[pos]])
    return equation[:pos] + replacement + equation[pos + 1:]


def _solve(equation: str) -> float:
    """Evaluate the concrete equation; generated values keep divisors > 0."""
    postfix = to_postfix(tokenize(strip_unknown(equation)))
    stack: list[float] = []
    for tok in postfix:
        if tok.kind is TokenKind.NUMBER:
            stack.append(tok.value)
        else:
            right = stack.pop()
            left = stack.pop()
            stack.append(_apply(tok.op, left, right))
    return stack[0]


def _apply(op: str, left: float, right: float) -> float:
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        return left / right
    return left ** right
