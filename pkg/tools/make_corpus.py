#!/usr/bin/env python3
"""Regenerate the shipped .morse corpus under src/twbraid/data/.

Deterministic: a curated list of braid-word closures across all five
categories plus a handful of hand-built diagrams (wiggles, the decorated
two-strand example, move-instance pairs).  Every file is validated, checked
against the corpus bounds (at most 6 classical crossings, 4 virtual
crossings, 6 bars, 3 components), and round-tripped through braiding before
it is written.
"""
from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from twbraid.braiding import braid, find_up_arcs, normalize_bars_off_up_arcs
from twbraid.diagram import (
    Bar,
    Cap,
    CrossPos,
    CrossVirtual,
    Cup,
    MorseDiagram,
    closure_diagram,
    ensure_valid,
    flip_orientation,
    gauss_code,
    gauss_equivalent,
    write_morse_file,
)
from twbraid.words import Category, parse_word

DATA = pathlib.Path(__file__).resolve().parent.parent / "src" / "twbraid" / "data"

TREFOIL = MorseDiagram(
    (Cup(1), Cup(2), CrossPos(1), CrossPos(1), CrossPos(1), Cap(2), Cap(1)),
    Category.CLASSICAL,
)

# trefoil with a zigzag detour wedged into the braid box: same knot, one
# extra free up-arc for the braider to eliminate
TREFOIL_WIGGLED = MorseDiagram(
    (
        Cup(1),
        Cup(2),
        CrossPos(1),
        Cup(2, "cw"),
        Cap(1),
        CrossPos(1),
        CrossPos(1),
        Cap(2),
        Cap(1),
    ),
    Category.CLASSICAL,
)

# two-strand braid closure decorated by hand: three classical crossings (one
# of them fully descending), one virtual, four bars, three zigzag detours
SHOWCASE = MorseDiagram(
    (
        Cup(1),
        Cup(2),
        CrossPos(1),
        Bar(1),
        Bar(2),
        CrossPos(2),
        Bar(2),
        CrossPos(2),
        CrossVirtual(3),
        Bar(4),
        Cup(2, "cw"),
        Cap(1),
        Cup(3, "cw"),
        Cap(2),
        Cup(2, "cw"),
        Cap(1),
        Cap(2),
        Cap(1),
    ),
    Category.TWISTED,
)

HAND = [
    ("unknot", MorseDiagram((Cup(1), Cap(1)))),
    ("unknot_barred", MorseDiagram((Cup(1), Bar(2), Cap(1)))),
    ("trefoil", TREFOIL),
    ("trefoil_mirror", flip_orientation(TREFOIL)),
    ("trefoil_wiggled", TREFOIL_WIGGLED),
    ("hopf_barred", MorseDiagram(
        (Cup(1), Cup(2), CrossPos(1), Bar(1), CrossPos(1), Cap(2), Cap(1)),
        Category.TWISTED,
    )),
    ("decorated_two_braid", SHOWCASE),
    ("decorated_two_braid_flipped", flip_orientation(SHOWCASE)),
    ("decorated_two_braid_parked", normalize_bars_off_up_arcs(SHOWCASE)),
]

# (slug, n, category, word) — closures stay inside the corpus bounds because
# the nested closure adds no events beyond the letters themselves and a
# closure of an n-strand word has at most n components
CLOSURES = [
    ("cl_empty3", 3, Category.CLASSICAL, ""),
    ("cl_hopf", 2, Category.CLASSICAL, "s1 s1"),
    ("cl_kink_pair", 2, Category.CLASSICAL, "s1 S1"),
    ("cl_braid3", 3, Category.CLASSICAL, "s1 s2 s1"),
    ("cl_alt3", 3, Category.CLASSICAL, "S1 s2 S1 s2"),
    ("cl_twist6", 2, Category.CLASSICAL, "s1 s1 s1 s1 s1 s1"),
    ("v_single", 2, Category.VIRTUAL, "v1"),
    ("v_mixed", 2, Category.VIRTUAL, "s1 v1"),
    ("v_conj", 3, Category.VIRTUAL, "v1 s2 v1 S2"),
    ("v_alt", 3, Category.VIRTUAL, "s1 v2 s1 v2"),
    ("v_pure", 3, Category.VIRTUAL, "v1 v2 v1"),
    ("t_bar_cross", 2, Category.TWISTED, "b1 s1"),
    ("t_slide", 2, Category.TWISTED, "b1 v1 b2"),
    ("t_interleave", 2, Category.TWISTED, "s1 b1 s1 b2"),
    ("t_double_bar", 2, Category.TWISTED, "b1 b1 s1"),
    ("t_spread", 3, Category.TWISTED, "b1 s2 v1 b3"),
    ("t_mixed_signs", 3, Category.TWISTED, "S1 b2 v2 s1"),
    ("t_all_bars", 3, Category.TWISTED, "b1 b2 b3 s2 s2"),
    ("t_vb_cycle", 2, Category.TWISTED, "v1 b1 v1 b1"),
    ("t_stack", 2, Category.TWISTED, "s1 s1 b2 v1"),
    ("t_lone_bar", 1, Category.TWISTED, "b1"),
    ("fv_single", 2, Category.FLAT_VIRTUAL, "c1"),
    ("fv_mixed", 2, Category.FLAT_VIRTUAL, "c1 v1"),
    ("fv_braid", 3, Category.FLAT_VIRTUAL, "c1 c2 v1"),
    ("ft_bar", 2, Category.FLAT_TWISTED, "c1 b1"),
    ("ft_cycle", 2, Category.FLAT_TWISTED, "b1 c1 b2 c1"),
    ("ft_spread", 3, Category.FLAT_TWISTED, "c2 b1 v1 c2 b2"),
    ("ft_sandwich", 2, Category.FLAT_TWISTED, "b1 b2 c1 b2 b1"),
]

# Markov move instances: each pair closes both sides of one braid
# identity (bar slides past a virtual crossing; a bar sandwich around a
# crossing equals its virtual conjugate), braided and compared by the
# equivalence search in the tests
MOVES = [
    ("move_t1_a_left", 2, Category.TWISTED, "b1 v1"),
    ("move_t1_a_right", 2, Category.TWISTED, "v1 b2"),
    ("move_t1_b_left", 2, Category.TWISTED, "b2 v1"),
    ("move_t1_b_right", 2, Category.TWISTED, "v1 b1"),
    ("move_t3_a_left", 2, Category.TWISTED, "b1 b2 s1 b2 b1"),
    ("move_t3_a_right", 2, Category.TWISTED, "v1 s1 v1"),
    ("move_t3_b_left", 2, Category.TWISTED, "b1 b2 S1 b2 b1"),
    ("move_t3_b_right", 2, Category.TWISTED, "v1 S1 v1"),
]

BOUNDS = {"classical": 6, "virtual": 4, "bars": 6}


def check(name: str, d: MorseDiagram) -> MorseDiagram:
    ensure_valid(d)
    counts = d.counts()
    for key, cap in BOUNDS.items():
        if counts[key] > cap:
            raise SystemExit(f"{name}: {counts[key]} {key} events exceeds {cap}")
    code = gauss_code(d)
    if len(code.components) > 3:
        raise SystemExit(f"{name}: {len(code.components)} components exceeds 3")
    if d.slices:
        w = braid(d)
        if not gauss_equivalent(code, gauss_code(closure_diagram(w))):
            raise SystemExit(f"{name}: braiding round trip failed")
    return d


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    for old in DATA.glob("*.morse"):
        old.unlink()

    entries: list[tuple[str, MorseDiagram]] = []
    for i, (slug, d) in enumerate(HAND, start=1):
        entries.append((f"corpus_{i:02d}_{slug}", d))
    for i, (slug, n, cat, text) in enumerate(CLOSURES, start=len(HAND) + 1):
        d = closure_diagram(parse_word(text, n=n, category=cat))
        entries.append((f"corpus_{i:02d}_{slug}", d))

    entries.append(("showcase", SHOWCASE))
    for slug, n, cat, text in MOVES:
        entries.append((slug, closure_diagram(parse_word(text, n=n, category=cat))))

    for name, d in entries:
        write_morse_file(DATA / f"{name}.morse", check(name, d))

    n_corpus = sum(1 for name, _ in entries if name.startswith("corpus_"))
    print(f"wrote {len(entries)} files ({n_corpus} corpus diagrams) to {DATA}")
    if n_corpus < 30:
        raise SystemExit(f"corpus too small: {n_corpus} < 30")

    dec = find_up_arcs(SHOWCASE)
    assert len(dec.valid_crossings) == 3 and len(dec.free_up_arcs) == 3


if __name__ == "__main__":
    main()
