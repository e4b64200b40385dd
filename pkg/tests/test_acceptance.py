"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run pytest with -s to stream them).
Samplers enforce the genericity the statements presuppose (proper
polygons, non-pathological conditioning), re-sampling degenerate draws
deterministically.
"""

import math
import random
import time
from fractions import Fraction

from poncelet import (
    Conic,
    PointRing,
    ProjPoint,
    RP1Point,
    apply_map,
    butterfly_check,
    canonical_certificate,
    chain_iterate_joinmeet,
    chain_point7_joinmeet,
    chain_values,
    closure_polynomial,
    closure_roots,
    closure_test,
    color_structure_report,
    complete_heptagon,
    complete_octagon,
    config_from_chain_trace,
    conic_fit,
    construct_heptagon_p6,
    construct_ninegon_p4,
    construct_octagon_p7,
    count_solutions,
    doubling,
    gp_residual,
    gp_syzygy_combination,
    grunbaum_rigby,
    heptagon6_residual,
    join,
    make_chart,
    meet,
    moderate_chart,
    next_chain_point,
    ninegon_residual,
    octagon_point7_residual,
    polygon_scene,
    proj_distance,
    quadset_residual,
    rp1_distance,
    run_chain,
    second_intersection,
    tangent_line_at,
    verify_n4,
)
from poncelet.chains import algebraic_closure_report, concentric_scene
from poncelet.cli import main
from poncelet.errors import (
    ConstructionDegeneracy,
    DegenerateInput,
    GeometryError,
    NoValidLabeling,
    NotAHeptagonPrefix,
    NotAnOctagonPrefix,
)
from conftest import circle_points, proper, random_closing_scene, random_map, ring_points

S649 = math.sqrt(649)
GOLDEN = [-1, 0, 1, 4, 5]


def report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"criterion {num} failed: {detail}"


def test_criterion_01_golden_reproduction():
    t0 = time.time()
    poly = closure_polynomial(GOLDEN, 8)
    golden = [Fraction(-2496), Fraction(3132), Fraction(-1023), Fraction(99)]
    proportional = poly.degree == 3 and all(
        poly.c[i] * golden[j] == poly.c[j] * golden[i] for i in range(4) for j in range(4)
    )
    roots = closure_roots(GOLDEN, 8)
    accepted = sorted(r.value.real for r in roots if r.accepted)
    surds_ok = (
        len(accepted) == 2
        and abs(accepted[0] - (209 - 5 * S649) / 66) < 1e-12
        and abs(accepted[1] - (209 + 5 * S649) / 66) < 1e-12
    )
    spurious = [r for r in roots if not r.accepted]
    spurious_ok = len(spurious) == 1 and abs(spurious[0].value - 4) < 1e-12
    x10 = chain_values(GOLDEN, 4, 10)[9].value().real
    wrap_ok = abs(x10 - 10) < 1e-9
    rep = algebraic_closure_report(GOLDEN, 4, 8)
    elapsed = time.time() - t0
    ok = proportional and surds_ok and spurious_ok and wrap_ok and rep.spurious and elapsed < 1.0
    report(
        1, "golden octagon reproduction", ok,
        f"cubic proportional={proportional}, roots={accepted}, x10={x10:.9f}, {elapsed:.2f}s",
    )


def test_criterion_02_solution_count_table():
    t0 = time.time()
    expected = {6: 1, 7: 2, 8: 2, 9: 3, 10: 4, 11: 5, 12: 5}
    rng = random.Random(90125)
    mismatches = []
    done = 0
    while done < 25:
        vals = []
        while len(vals) < 5:
            f = Fraction(rng.randrange(-40, 41), rng.randrange(1, 8))
            if f not in vals:
                vals.append(f)
        try:
            counts = {n: count_solutions(vals, n) for n in expected}
        except DegenerateInput:
            continue
        for n, c in counts.items():
            if c != expected[n]:
                mismatches.append((vals, n, c))
        done += 1
    elapsed = time.time() - t0
    ok = not mismatches and elapsed < 300
    report(
        2, "solution-count table n=6..12 x25 inputs", ok,
        f"mismatches={len(mismatches)}, {elapsed:.1f}s",
    )


def _touch_clear(scene, gap: float = 0.03) -> bool:
    """No tangency point close to a vertex: keeps the synthetic walk away
    from tangential degeneracies, where double precision cannot hold."""
    k = len(scene.vertices)
    return all(
        min(
            proj_distance(q, scene.vertices[i]),
            proj_distance(q, scene.vertices[(i + 1) % k]),
        ) > gap
        for i, q in enumerate(scene.touch_points)
    )


def _sample_heptagon(rng, branch):
    while True:
        pts = ring_points(rng, 5)
        try:
            p6, _ = construct_heptagon_p6(pts, branch)
            p7 = complete_heptagon(pts + [p6])
        except (ConstructionDegeneracy, NotAHeptagonPrefix, DegenerateInput):
            continue
        seven = pts + [p6, p7]
        if proper(seven):
            return pts, seven


def _sample_heptagon_both(rng):
    """One seed draw whose both branches complete to proper clear heptagons."""
    while True:
        pts = ring_points(rng, 5)
        scenes = []
        try:
            for branch in (0, 1):
                p6, _ = construct_heptagon_p6(pts, branch)
                p7 = complete_heptagon(pts + [p6])
                seven = pts + [p6, p7]
                if not proper(seven):
                    raise NotAHeptagonPrefix("improper draw")
                scene = polygon_scene(seven, 7)
                if not _touch_clear(scene):
                    raise NotAHeptagonPrefix("touch point near vertex")
                scenes.append((seven, scene))
        except (ConstructionDegeneracy, NotAHeptagonPrefix, DegenerateInput):
            continue
        return scenes


def test_criterion_03_heptagon_construction_soundness():
    t0 = time.time()
    rng = random.Random(7007)
    worst_gap = worst_wrap = 0.0
    for _ in range(500):
        for seven, scene in _sample_heptagon_both(rng):
            chart = moderate_chart(scene.outer, seven)
            xs = [chart.project(p) for p in seven[:6]]
            worst_gap = max(worst_gap, heptagon6_residual(xs).scaled_gap)
            rep = closure_test(scene.outer, scene.inner, scene.vertices[0], 7)
            worst_wrap = max(worst_wrap, rep.residual_p, rep.residual_q)
    elapsed = time.time() - t0
    ok = worst_gap < 1e-9 and worst_wrap < 1e-8 and elapsed < 30
    report(
        3, "construction-1 soundness (500 seeds, both branches)", ok,
        f"worst gap {worst_gap:.2e}, worst wrap {worst_wrap:.2e}, {elapsed:.1f}s",
    )


def test_criterion_04_octagon_construction_and_completion():
    t0 = time.time()
    rng = random.Random(8008)
    worst_gap = worst_wrap = worst_center = 0.0
    done = 0
    while done < 500:
        branch = done % 2
        pts = ring_points(rng, 5)
        try:
            p7, _ = construct_octagon_p7(pts, branch)
            p6, p8, center = complete_octagon(pts, p7)
        except (ConstructionDegeneracy, NotAnOctagonPrefix, DegenerateInput):
            continue
        order = [pts[0], pts[1], pts[2], pts[3], pts[4], p6, p7, p8]
        if not proper(order):
            continue
        scene = polygon_scene(order, 8)
        if not _touch_clear(scene):
            continue
        chart = moderate_chart(scene.outer, order)
        xs = [chart.project(p) for p in order]
        sel = [xs[0], xs[1], xs[2], xs[3], xs[4], xs[6]]
        worst_gap = max(worst_gap, octagon_point7_residual(sel).scaled_gap)
        rep = closure_test(scene.outer, scene.inner, scene.vertices[0], 8)
        worst_wrap = max(worst_wrap, rep.residual_p, rep.residual_q)
        for k in range(4):
            diag = join(order[k], order[k + 4])
            worst_center = max(
                worst_center,
                abs(sum(a * b for a, b in zip(center.coords, diag.coords))),
            )
        done += 1
    elapsed = time.time() - t0
    ok = worst_gap < 1e-9 and worst_wrap < 1e-8 and worst_center < 1e-8 and elapsed < 30
    report(
        4, "construction-2 + completion (500 seeds)", ok,
        f"worst gap {worst_gap:.2e}, wrap {worst_wrap:.2e}, center {worst_center:.2e}, {elapsed:.1f}s",
    )


def _ninegon_wraps(ks, x4):
    """Double-wrap gaps of the chain 1,2,3,x4,5,6 via the pointwise engine."""
    seq = [ks[0], ks[1], ks[2], x4, ks[3], ks[4]]
    while len(seq) < 11:
        seq.append(next_chain_point(seq[-6:]))
    return rp1_distance(seq[9], seq[0]), rp1_distance(seq[10], seq[1]), seq


def test_criterion_05_ninegon_construction():
    t0 = time.time()
    rng = random.Random(9009)
    worst_wrap = worst_bracket = 0.0
    done = 0
    while done < 200:
        pts = ring_points(rng, 5)
        try:
            cands, trace = construct_ninegon_p4(pts)
        except (ConstructionDegeneracy, DegenerateInput):
            continue
        conic = trace.elements["A"]
        try:
            chart = moderate_chart(conic, list(pts) + list(cands))
        except GeometryError:
            continue
        ks = [chart.project(p) for p in pts]
        measured = []
        try:
            for c in cands:
                x4 = chart.project(c)
                rp, rq, seq = _ninegon_wraps(ks, x4)
                # conditioning guard: the closure gap's slope in x4, probed
                # at a 1e-6 nudge; hypersensitive draws are re-sampled
                nudged = RP1Point(x4.coords[0] + 1e-6 * x4.coords[1], x4.coords[1])
                rp2, rq2, _ = _ninegon_wraps(ks, nudged)
                slope = max(abs(rp2 - rp), abs(rq2 - rq)) / 1e-6
                measured.append((rp, rq, slope, seq))
        except DegenerateChain:
            continue
        if any(m[2] > 1e2 for m in measured):
            continue
        for rp, rq, _, seq in measured:
            worst_wrap = max(worst_wrap, rp, rq)
            sel = [seq[0], seq[1], seq[2], seq[3], seq[4], seq[6]]
            worst_bracket = max(worst_bracket, ninegon_residual(sel).scaled_gap)
        done += 1
    elapsed = time.time() - t0
    ok = worst_wrap < 1e-8 and worst_bracket < 1e-8 and elapsed < 120
    report(
        5, "construction-4 nine-gon (200 seeds, all 3 candidates)", ok,
        f"worst wrap {worst_wrap:.2e}, worst bracket {worst_bracket:.2e}, {elapsed:.1f}s",
    )


def test_criterion_06_doubling():
    t0 = time.time()
    rng = random.Random(6006)
    worst = 0.0
    done = 0
    while done < 100:
        verts = circle_points(rng, 5, minsep=0.45)
        try:
            scene = polygon_scene(verts, 5)
            doubled, _ = doubling(scene)
        except (GeometryError, NoValidLabeling):
            continue
        rep = closure_test(doubled.outer, doubled.inner, doubled.vertices[0], 10)
        if not rep.closes:
            report(6, "doubling", False, f"10-gon failed to close: {rep}")
        worst = max(worst, rep.residual_p, rep.residual_q)
        done += 1
    # concentric triangle doubles into the regular hexagon pattern
    tri = concentric_scene(3)
    hexa, _ = doubling(tri)
    angles = sorted(
        round(
            (math.atan2(p.coords[1].real / p.coords[2].real,
                        p.coords[0].real / p.coords[2].real) % (2 * math.pi))
            / (math.pi / 3), 9,
        ) % 6
        for p in hexa.vertices
    )
    pattern_ok = max(abs(a - b) for a, b in zip(angles, [0, 1, 2, 3, 4, 5])) < 1e-7
    elapsed = time.time() - t0
    ok = worst < 1e-7 and pattern_ok and elapsed < 120
    report(
        6, "doubling (100 pentagons + concentric triangle)", ok,
        f"worst closure {worst:.2e}, hexagon pattern {pattern_ok}, {elapsed:.1f}s",
    )


def test_criterion_07_engine_equivalence():
    t0 = time.time()
    rng = random.Random(7117)
    worst_alg = worst_c5 = 0.0
    for k in range(100):
        n = 5 + k % 6
        scene = random_closing_scene(rng, n)
        pts = run_chain(scene.outer, scene.inner, scene.vertices[0], 0, steps=50)
        chart = make_chart(scene.outer, avoid=pts[:10])
        xs = [chart.project(p) for p in pts]
        alg = xs[:6]
        while len(alg) < len(xs):
            alg.append(next_chain_point(alg[-6:]))
        for a, b in zip(xs, alg):
            worst_alg = max(worst_alg, rp1_distance(a, b))
        # construction 5 agrees with both on a few windows
        for i in range(0, 6):
            window = pts[i:i + 6]
            try:
                p7, _ = chain_point7_joinmeet(window, scene.outer)
            except ConstructionDegeneracy:
                continue
            worst_c5 = max(worst_c5, proj_distance(p7, pts[i + 6]))
    elapsed = time.time() - t0
    ok = worst_alg < 1e-8 and worst_c5 < 1e-8
    report(
        7, "engine equivalence (100 scenes x 50 steps)", ok,
        f"synthetic vs formula {worst_alg:.2e}, construction-5 {worst_c5:.2e}, {elapsed:.1f}s",
    )


def test_criterion_08_porism_spot_check():
    t0 = time.time()
    rng = random.Random(8118)
    worst = 0.0
    for k in range(50):
        n = 5 + k % 6
        base = concentric_scene(n, start_angle=rng.uniform(0, 2 * math.pi))
        s = random_map(rng)
        outer = apply_map(s, base.outer)
        inner = apply_map(s, base.inner)
        for _ in range(20):
            ang = rng.uniform(0, 2 * math.pi)
            start = apply_map(s, ProjPoint(math.cos(ang), math.sin(ang), 1))
            rep = closure_test(outer, inner, start, n)
            if not rep.closes:
                report(8, "porism", False, f"n={n} start failed: {rep}")
            worst = max(worst, rep.residual_p, rep.residual_q)
    elapsed = time.time() - t0
    ok = worst < 1e-7
    report(
        8, "porism spot check (50 scenes x 20 starts)", ok,
        f"worst residual {worst:.2e}, {elapsed:.1f}s",
    )


def test_criterion_09_bracket_identity_suite():
    t0 = time.time()
    rng = random.Random(9119)

    def rnd():
        return RP1Point(
            complex(rng.uniform(-1, 1), rng.uniform(-1, 1)),
            complex(rng.uniform(-1, 1), rng.uniform(-1, 1)),
        )

    worst_gp = 0.0
    for _ in range(100_000):
        worst_gp = max(worst_gp, gp_residual(rnd(), rnd(), rnd(), rnd()))
    worst_syzygy = 0.0
    for _ in range(1000):
        pts = [rnd() for _ in range(6)]
        combo, pre_diff, test_diff = gp_syzygy_combination(pts)
        scale = max(abs(pre_diff), abs(test_diff), 1e-30)
        worst_syzygy = max(
            worst_syzygy,
            abs(combo) / scale,
            abs(pre_diff - test_diff) / scale,
        )
    # quadset <-> concurrence via stereographic transfer
    worst_quadset = 0.0
    done = 0
    while done < 500:
        pts = ring_points(rng, 5)
        try:
            conic = conic_fit(pts)
            p1, p4, p2, p5, p3 = pts
            o = meet(join(p1, p4), join(p2, p5))
            p6 = second_intersection(conic, p3, o)
            chart = moderate_chart(conic, pts + [p6])
        except GeometryError:
            continue
        xs = [chart.project(p) for p in (p1, p2, p3, p4, p5, p6)]
        r = quadset_residual((xs[0], xs[3]), (xs[1], xs[4]), (xs[2], xs[5]))
        worst_quadset = max(worst_quadset, r.scaled_gap)
        done += 1
    elapsed = time.time() - t0
    ok = worst_gp < 1e-13 and worst_syzygy < 1e-10 and worst_quadset < 1e-10
    report(
        9, "bracket identity suite", ok,
        f"gp {worst_gp:.2e} (1e5 quads), syzygy {worst_syzygy:.2e}, quadset {worst_quadset:.2e}, {elapsed:.1f}s",
    )


def test_criterion_10_grunbaum_rigby_and_3n4():
    t0 = time.time()
    rng = random.Random(1010)
    pts, seven = _sample_heptagon(rng, 0)
    cfg, residual = grunbaum_rigby(PointRing(tuple(seven)))
    rep = verify_n4(cfg)
    gr_ok = residual < 1e-8 and rep.passed and rep.n_points == 21 and rep.n_lines == 21
    # chain-trace (3n_4): closes, verifies, color structure holds
    conic = conic_fit(seven)
    chain = chain_iterate_joinmeet(seven[:6], conic, 8)
    ccfg, colors = config_from_chain_trace(chain)
    crep = verify_n4(ccfg)
    col = color_structure_report(colors)
    color_ok = all(v < 1e-7 for v in col.values())
    iso_ok = canonical_certificate(cfg) == canonical_certificate(ccfg)
    elapsed = time.time() - t0
    ok = gr_ok and crep.passed and color_ok and iso_ok
    report(
        10, "Gruenbaum-Rigby (21_4) + chain-trace (3n_4)", ok,
        f"fixed-point {residual:.2e}, n4 {rep.passed}/{crep.passed}, "
        f"colors {max(col.values()):.2e}, isomorphic {iso_ok}, {elapsed:.1f}s",
    )


def test_criterion_11_butterfly_theorem():
    t0 = time.time()
    rng = random.Random(1111)
    uc = Conic.unit_circle()
    lines = [
        join(ProjPoint(0.3, 0.1, 1), ProjPoint(-0.2, 0.4, 1)),   # secant
        tangent_line_at(uc, ProjPoint(0, 1, 1)),                  # tangent
        join(ProjPoint(2, 0, 1), ProjPoint(2.2, 1, 1)),           # disjoint
    ]
    worst = 0.0
    done = 0
    while done < 500:
        line = lines[done % 3]
        a_pts = circle_points(rng, 4, minsep=0.3)
        ang = rng.uniform(0, 2 * math.pi)
        b1 = ProjPoint(math.cos(ang), math.sin(ang), 1)
        try:
            xs = [meet(join(a_pts[i], a_pts[(i + 1) % 4]), line) for i in range(4)]
            # guards: threading through a pivot on the conic pinches the
            # construction, and a closing chord parallel to the line makes
            # the compared meets run away along it
            from poncelet import conic_contains
            from poncelet.projective import _cross

            if any(conic_contains(uc, x) < 0.02 for x in xs):
                raise GeometryError("pivot too close to the conic")
            b2 = second_intersection(uc, b1, xs[0])
            b3 = second_intersection(uc, b2, xs[1])
            b4 = second_intersection(uc, b3, xs[2])
            for chord in (join(a_pts[3], a_pts[0]), join(b4, b1)):
                if max(abs(z) for z in _cross(chord.coords, line.coords)) < 0.05:
                    raise GeometryError("near-parallel closing chord")
            res = butterfly_check(a_pts, [b1, b2, b3, b4], uc, line)
        except GeometryError:
            continue
        worst = max(worst, res)
        done += 1
    elapsed = time.time() - t0
    ok = worst < 1e-9
    report(
        11, "conic butterfly theorem (500 instances)", ok,
        f"worst conclusion residual {worst:.2e}, {elapsed:.1f}s",
    )


def test_criterion_12_cli_determinism(tmp_path):
    t0 = time.time()
    outs = []
    for tag in ("a", "b"):
        j = tmp_path / f"{tag}.json"
        s = tmp_path / f"{tag}.svg"
        code = main(["construct", "7", "--seed", "42", "--out", str(j), "--svg", str(s)])
        assert code == 0
        outs.append((j.read_bytes(), s.read_bytes()))
    elapsed = time.time() - t0
    ok = outs[0] == outs[1]
    report(
        12, "CLI determinism (construct 7 --seed 42 twice)", ok,
        f"json+svg byte-identical={ok}, {elapsed:.1f}s",
    )
