"""Hypothesis strategy for random valid Morse diagrams."""

from hypothesis import strategies as st

from twbraid.diagram import Event, EventKind, MorseDiagram, Turn
from twbraid.words import Category

_CROSSING_KINDS = {
    Category.TWISTED: (EventKind.CROSS_POS, EventKind.CROSS_NEG, EventKind.CROSS_VIRTUAL),
    Category.FLAT_TWISTED: (EventKind.CROSS_POS, EventKind.CROSS_VIRTUAL),
    Category.VIRTUAL: (EventKind.CROSS_POS, EventKind.CROSS_NEG, EventKind.CROSS_VIRTUAL),
    Category.FLAT_VIRTUAL: (EventKind.CROSS_POS, EventKind.CROSS_VIRTUAL),
    Category.CLASSICAL: (EventKind.CROSS_POS, EventKind.CROSS_NEG, EventKind.CROSS_VIRTUAL),
}
_BARRED = (Category.TWISTED, Category.FLAT_TWISTED)


@st.composite
def diagrams(draw, max_events=20, max_width=6, categories=tuple(Category)):
    """Build a random diagram by a legal bottom-to-top sweep, then close it.

    The sweep tracks live strand flows so caps always join a down/up pair;
    at the end the remaining strands are capped off greedily (an adjacent
    opposite-flow pair always exists while any strand is live).
    """
    category = draw(st.sampled_from(list(categories)))
    events: list[Event] = []
    live: list[bool] = []  # flow per live strand, True = up
    for _ in range(draw(st.integers(0, max_events))):
        width = len(live)
        options = []
        if width < max_width:
            options.append("cup")
        if width >= 2:
            if any(live[p - 1] != live[p] for p in range(1, width)):
                options.append("cap")
            options.append("cross")
        if width >= 1 and category in _BARRED:
            options.append("bar")
        op = draw(st.sampled_from(options))
        if op == "cup":
            p = draw(st.integers(1, width + 1))
            turn = draw(st.sampled_from([Turn.CW, Turn.CCW]))
            events.append(Event(EventKind.CUP, p, turn))
            left_up = turn is Turn.CW
            live[p - 1 : p - 1] = [left_up, not left_up]
        elif op == "cap":
            spots = [p for p in range(1, width) if live[p - 1] != live[p]]
            p = draw(st.sampled_from(spots))
            turn = Turn.CCW if not live[p - 1] else Turn.CW
            events.append(Event(EventKind.CAP, p, turn))
            del live[p - 1 : p + 1]
        elif op == "cross":
            p = draw(st.integers(1, width - 1))
            kind = draw(st.sampled_from(_CROSSING_KINDS[category]))
            events.append(Event(kind, p))
            live[p - 1], live[p] = live[p], live[p - 1]
        else:
            events.append(Event(EventKind.BAR, draw(st.integers(1, width))))
    while live:
        p = next(p for p in range(1, len(live)) if live[p - 1] != live[p])
        turn = Turn.CCW if not live[p - 1] else Turn.CW
        events.append(Event(EventKind.CAP, p, turn))
        del live[p - 1 : p + 1]
    return MorseDiagram(tuple(events), category)
