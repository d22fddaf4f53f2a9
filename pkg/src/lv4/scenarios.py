"""Named parameter sets for the reference simulation and diagram figures.

Figure 1 presets carry initial conditions and the reported interior
fixed points. Figures 3-5 are stability-diagram templates: their hunting
efficiency E is a placeholder that :func:`lv4.stability.diagram`
overwrites cell by cell.

Figure entries ``q_ji`` load into ``Q[j-1][i-1]`` (predator row, prey
column). Figure 1's ``a_ji`` load into E; Figure 4's adaptation
coefficients load into D.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lvmap import EcoParams


class UnknownPresetError(KeyError):
    pass


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    eco: EcoParams
    init: tuple | None = None
    expected_fixed_point: tuple | None = None
    outcome: str | None = None


ONES = ((1.0, 1.0), (1.0, 1.0))
PLACEHOLDER_E = ((0.5, 0.5), (0.5, 0.5))


def _q(q11, q12, q21, q22):
    return ((q11, q12), (q21, q22))


def _fig1(name, desc, E, init, fp, outcome, K=1e4, s=0.01, p=0.3):
    eco = EcoParams(r=(1.5, 1.5), K=(K, K), s=(s, s), p=(p, p), E=E, Q=_q(0.02, 0.02, 0.02, 0.02), D=ONES)
    return Preset(name, desc, eco, init, fp, outcome)


def _template(name, desc, *, r=(1.5, 1.5), s, p, Q, D=ONES):
    eco = EcoParams(r=r, K=(1e5, 1e5), s=s, p=p, E=PLACEHOLDER_E, Q=Q, D=D)
    return Preset(name, desc, eco)


_FIG1_FP_EF = (750.0, 1000.0, 2240.6, 2962.5)
_ADAPTED = ((0.4, 1.5), (1.5, 0.4))
_Q_EVEN = _q(0.01, 0.01, 0.01, 0.01)

_PRESETS = [
    _fig1(
        "fig1a",
        "Figure 1(a): generalist vs specialist predator, converges to the fixed point",
        ((0.3, 0.3), (0.2, 0.5)),
        (100.0, 100.0, 100.0, 100.0),
        (3333.3333, 1666.6667, 277.7778, 83.3333),
        "converges",
    ),
    _fig1(
        "fig1b",
        "Figure 1(b): predators specialised on different prey, regular oscillation",
        ((0.2, 0.45), (0.5, 0.25)),
        (100.0, 100.0, 100.0, 100.0),
        (1714.3, 2571.4, 140.8163, 192.2449),
        "oscillates",
    ),
    _fig1(
        "fig1c",
        "Figure 1(c): predator 1 more specialised, irregular oscillation",
        ((0.24, 0.6), (0.56, 0.27)),
        (100.0, 100.0, 100.0, 100.0),
        (1825.2, 1769.9, 132.8351, 162.0379),
        "oscillates",
    ),
    _fig1(
        "fig1d",
        "Figure 1(d): K=1e5, low dependency and search rate, alternating dominance",
        ((0.2, 0.4), (0.31, 0.29)),
        (100.0, 100.0, 100.0, 100.0),
        (833.3333, 833.3333, 450.7576, 4507.6),
        "oscillates",
        K=1e5,
        s=0.001,
        p=0.01,
    ),
    _fig1(
        "fig1e",
        "Figure 1(e): start near the fixed point, near-regular oscillation",
        ((0.4, 0.2), (0.2, 0.35)),
        (700.0, 2000.0, 2300.0, 3000.0),
        _FIG1_FP_EF,
        "persists",
        K=1e5,
        s=0.001,
        p=0.01,
    ),
    _fig1(
        "fig1f",
        "Figure 1(f): parameters of (e) from a distant start, collapses (reported ~600 generations)",
        ((0.4, 0.2), (0.2, 0.35)),
        (10.0, 100.0, 200.0, 2500.0),
        _FIG1_FP_EF,
        "collapses",
        K=1e5,
        s=0.001,
        p=0.01,
    ),
    _template("fig3a", "Figure 3(a): localist vs globalist, p=(0.06,0.01), s=(0.09,0.01)",
              s=(0.09, 0.01), p=(0.06, 0.01), Q=_Q_EVEN),
    _template("fig3b", "Figure 3(b): as (a) with globalist search rate s2=0.012",
              s=(0.09, 0.012), p=(0.06, 0.01), Q=_Q_EVEN),
    _template("fig3c", "Figure 3(c): localist dependency p1=0.03 (an alternative reading lowers s1 to 0.03 instead)",
              s=(0.09, 0.01), p=(0.03, 0.01), Q=_Q_EVEN),
    _template("fig3d", "Figure 3(d): localist search rate s1=0.03",
              s=(0.03, 0.01), p=(0.06, 0.01), Q=_Q_EVEN),
    _template("fig3e", "Figure 3(e): q11=q21=0.013, q12=q22=0.01",
              s=(0.09, 0.01), p=(0.06, 0.01), Q=_q(0.013, 0.01, 0.013, 0.01)),
    _template("fig3f", "Figure 3(f): q11=q21=0.01, q12=q22=0.011",
              s=(0.09, 0.01), p=(0.06, 0.01), Q=_q(0.01, 0.011, 0.01, 0.011)),
    _template("fig4a", "Figure 4(a): adapted prey, s=p=0.02 (species-symmetric)",
              s=(0.02, 0.02), p=(0.02, 0.02), Q=_Q_EVEN, D=_ADAPTED),
    _template("fig4b", "Figure 4(b): adapted prey, p1=0.03",
              s=(0.02, 0.02), p=(0.03, 0.02), Q=_Q_EVEN, D=_ADAPTED),
    _template("fig4c", "Figure 4(c): adapted prey, s1=0.07",
              s=(0.07, 0.02), p=(0.02, 0.02), Q=_Q_EVEN, D=_ADAPTED),
    _template("fig4d", "Figure 4(d): adapted prey, s1=0.07, p1=0.04",
              s=(0.07, 0.02), p=(0.04, 0.02), Q=_Q_EVEN, D=_ADAPTED),
    _template("fig5a", "Figure 5(a): small predator 1, q11=q21=0.04",
              s=(0.01, 0.01), p=(0.01, 0.01), Q=_q(0.04, 0.01, 0.04, 0.01)),
    _template("fig5b", "Figure 5(b): predator 1 five times more dependent, p=(0.05,0.01)",
              s=(0.01, 0.01), p=(0.05, 0.01), Q=_Q_EVEN),
    _template("fig5c", "Figure 5(c): asymmetric conversion ratios, p1=0.03",
              s=(0.01, 0.01), p=(0.03, 0.01), Q=_q(0.01, 0.03, 0.02, 0.01)),
    _template("fig5d", "Figure 5(d): r1=1.2, s1=0.02, asymmetric conversion ratios",
              r=(1.2, 1.5), s=(0.02, 0.01), p=(0.03, 0.01), Q=_q(0.01, 0.015, 0.02, 0.01)),
    _template("fig5e", "Figure 5(e): r=(1.3,1.7), s1=0.04, asymmetric conversion ratios",
              r=(1.3, 1.7), s=(0.04, 0.01), p=(0.01, 0.01), Q=_q(0.03, 0.01, 0.015, 0.02)),
]

PRESETS = {p.name: p for p in _PRESETS}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPresetError(f"unknown preset {name!r}; see list_presets()") from None


def list_presets() -> list[tuple[str, str]]:
    return [(p.name, p.description) for p in _PRESETS]
