"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]`` / ``[FAIL]`` line (visible with ``-s`` or in
the ``-v`` run log) before asserting.  Run just this file with::

    python3 -m pytest tests/test_acceptance.py -v -s
"""

import time

import numpy as np
import pytest
from scipy import integrate

from rectgloss.brdf import GrazingAngleError, Material, ndf_as_sg, warp_ndf_to_light_domain
from rectgloss.interreflect import (
    ASG_BANDWIDTH_FLOOR,
    K_SERIES_CUTOFF,
    ShadingPoint,
    build_asg_light,
    disk_integral_factor,
    find_specular_peak,
    integrate_disk_radiance,
    k_factor,
    shade_indirect_specular,
)
from rectgloss.oracle import (
    QuadratureSpec,
    convolution_error_report,
    fit_l2_error,
    spherical_quadrature,
)
from rectgloss.renderer import relative_rmse, render, write_image
from rectgloss.scene import (
    Camera,
    DirectionalLight,
    RectangleProxy,
    SamplingDisk,
    Scene,
    intersection_area_fraction,
    load_scene,
)
from rectgloss.sg import (
    AnisotropicSphericalGaussian,
    SphericalGaussian,
    asg_integral,
    eval_asg,
    eval_asg_polar,
    eval_sg,
    sg_product_integral,
)

from helpers import normalize3, random_frame, random_unit


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"
                  + (f" | {detail}" if detail else ""))
        return ok
    return emit


# --------------------------------------------------------------------------- 1

def test_criterion_1_sg_algebra(report):
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    lattice = QuadratureSpec(1_000_000, 0)
    checks = {}

    # lobe-axis maximum and amplitude at the axis
    ok = True
    for _ in range(50):
        z, x, y = random_frame(rng)
        amp = rng.uniform(0.1, 2.0, 3)
        v = random_unit(rng, 2000)
        sg = SphericalGaussian(z, rng.uniform(0.1, 500.0), amp)
        asg = AnisotropicSphericalGaussian(z, x, y, *rng.uniform(0.1, 500.0, 2), amp)
        for f in (lambda d: eval_sg(sg, d), lambda d: eval_asg(asg, d)):
            ok &= np.allclose(f(z), amp, rtol=1e-12, atol=0.0)
            ok &= bool(np.all(f(v) <= amp)) and bool(np.all(f(v) >= 0))
    checks["axis identities"] = ok

    # polar vs Cartesian ASG
    worst = 0.0
    for _ in range(20):
        z, x, y = random_frame(rng)
        lam, mu = rng.uniform(0.1, 500.0, 2)
        v = random_unit(rng, 1000)
        angles = [np.arccos(np.clip(v @ a, -1.0, 1.0)) for a in (z, x, y)]
        asg = AnisotropicSphericalGaussian(z, x, y, lam, mu, 1.0)
        worst = max(worst, np.abs(eval_asg_polar(*angles, lam, mu, 1.0) - eval_asg(asg, v)).max())
    checks[f"polar max diff {worst:.1e}"] = worst <= 1e-9

    # SG product integral vs lattice, nu <= 500
    worst = 0.0
    for nu1, nu2 in [(1.0, 3.0), (10.0, 50.0), (100.0, 100.0), (500.0, 20.0), (250.0, 500.0),
                     (500.0, 500.0)]:
        p1 = random_unit(rng, 1)[0]
        p2 = normalize3(p1 + rng.uniform(0.0, 0.3) * random_unit(rng, 1)[0])
        g1, g2 = SphericalGaussian(p1, nu1, 1.0), SphericalGaussian(p2, nu2, 1.0)
        quad = spherical_quadrature(lambda v: eval_sg(g1, v)[:, 0] * eval_sg(g2, v)[:, 0], lattice)
        worst = max(worst, abs(sg_product_integral(g1, g2)[0] - quad) / quad)
    checks[f"SG product rel err {worst:.1e}"] = worst <= 1e-3

    # ASG integral approximation vs lattice, bandwidths in [50, 5000]
    worst = 0.0
    for lam in (50.0, 300.0, 5000.0):
        for mu in (50.0, 1000.0, 5000.0):
            z, x, y = random_frame(rng)
            asg = AnisotropicSphericalGaussian(z, x, y, lam, mu, 1.0)
            quad = spherical_quadrature(lambda v: eval_asg(asg, v)[:, 0], lattice)
            worst = max(worst, abs(asg_integral(asg)[0] - quad) / quad)
    checks[f"ASG integral rel err {worst:.1e}"] = worst <= 0.05

    elapsed = time.perf_counter() - start
    checks[f"{elapsed:.1f}s"] = elapsed < 30.0
    ok = report(1, "SG/ASG algebra", all(checks.values()),
                ", ".join(f"{k}={'ok' if v else 'BAD'}" for k, v in checks.items()))
    assert ok, checks


# --------------------------------------------------------------------------- 2

def test_criterion_2_convolution_error_study(report):
    start = time.perf_counter()
    lambdas = [10.0, 25.0, 50.0, 100.0, 200.0]
    rows = convolution_error_report(lambdas)
    coarse = convolution_error_report(lambdas, QuadratureSpec(1_000_000, 0))
    elapsed = time.perf_counter() - start
    rel = np.array([r[4] for r in rows])
    absolute = np.array([r[3] for r in rows])
    # quadrature noise: change in the relative error between two lattice sizes
    noise = np.abs(rel - np.array([r[4] for r in coarse]))
    ratio_ok = rel[0] >= 2.0 * rel[3]
    monotone_ok = bool(np.all(rel[1:] <= rel[:-1] + noise[1:] + noise[:-1]))
    detail = ("rel " + " ".join(f"{lam:g}:{e:.3g}" for lam, e in zip(lambdas, rel))
              + " | abs " + " ".join(f"{e:.2g}" for e in absolute)
              + f" | rel(10)/rel(100)={rel[0] / rel[3]:.3g} | {elapsed:.1f}s")
    ok = report(2, "convolution error decreases with bandwidth",
                ratio_ok and monotone_ok and elapsed < 60.0, detail)
    assert ok, detail


# --------------------------------------------------------------------------- 3

def test_criterion_3_fit_study(report):
    start = time.perf_counter()
    base = fit_l2_error(np.pi / 6, 0.1)
    others = [fit_l2_error(s, a) for s, a in
              [(2 * np.pi / 5, 0.1), (np.pi / 6, 0.7), (2 * np.pi / 5, 0.7)]]
    regimes_ok = all(base < o for o in others)

    worst = 0.0
    for k in (-0.3, 0.01, 5.0, 28.127):
        for t in (0.1, 0.5, 0.9):
            kappa = np.arcsin(np.sqrt(t))
            num, _ = integrate.quad(
                lambda th: np.exp(-k * np.sin(th) ** 2) * np.cos(th) * np.sin(th), 0.0, kappa,
                epsabs=0.0, epsrel=1e-13)
            worst = max(worst, abs(disk_integral_factor(k, t) / (2 * np.pi * num) - 1.0))
    elapsed = time.perf_counter() - start
    detail = (f"L2 {base:.4f} vs " + ", ".join(f"{o:.4f}" for o in others)
              + f" | closed-form rel err {worst:.1e} | {elapsed:.2f}s")
    ok = report(3, "fit regimes and disk closed form",
                regimes_ok and worst <= 1e-6 and elapsed < 10.0, detail)
    assert ok, detail


# --------------------------------------------------------------------------- 4

def test_criterion_4_specular_peak_invariant(report):
    rng = np.random.default_rng(4)
    worst_h, worst_plane, count = 0.0, 0.0, 0
    while count < 10_000:
        z, x_axis, _ = random_frame(rng)
        rect = RectangleProxy(rng.uniform(-5, 5, 3), z, x_axis, *rng.uniform(0.1, 3.0, 2))
        i = random_unit(rng, 1)[0]
        if i @ rect.normal <= 1e-3:
            i = i - 2 * (i @ rect.normal) * rect.normal
            if i @ rect.normal <= 1e-3:
                continue
        x = rect.center + rng.uniform(-4, 4, 3)
        x = x + (abs((x - rect.center) @ rect.normal) + 0.05 - (x - rect.center) @ rect.normal) \
            * rect.normal
        peak = find_specular_peak(rect, x, i)
        to_x = normalize3(x - peak.position)
        worst_h = max(worst_h, np.linalg.norm(normalize3(i + to_x) - rect.normal))
        worst_plane = max(worst_plane, abs((peak.position - rect.center) @ rect.normal))
        count += 1
    detail = f"{count} configs, half-vector err {worst_h:.1e}, plane err {worst_plane:.1e}"
    ok = report(4, "specular peak invariant", worst_h <= 1e-6 and worst_plane <= 1e-6, detail)
    assert ok, detail


# --------------------------------------------------------------------------- 5

def single_reflector_scene(floor_roughness, width=64):
    """A glossy floor reflecting a distant light onto a wall that fills the view."""
    floor = RectangleProxy([0, 0, 0], [0, 1, 0], [1, 0, 0], 1.5, 1.5,
                           Material(floor_roughness, 0.9, 0.0), 0)
    wall = RectangleProxy([0, 1.5, -1.5], [0, 0, 1], [1, 0, 0], 1.5, 1.5,
                          Material(0.5, 0.9, 0.0), 1)
    camera = Camera([0, 1.5, 2.5], [0, 1.5, -1.5], [0, 1, 0], 36.0, width, width)
    return Scene((floor, wall), (DirectionalLight(normalize3([0, 1, 0.8]), 1.0),), camera)


DISK_RADIUS = 1.0


def test_criterion_5_end_to_end(report):
    start = time.perf_counter()
    results, ok = [], True
    for alpha_r in (0.1, 0.3):
        scene = single_reflector_scene(alpha_r)
        approx_times = []
        for _ in range(3):
            t0 = time.perf_counter()
            approx = render(scene, "approx-asg", disk_radius=DISK_RADIUS, indirect_only=True)
            approx_times.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        ref = render(scene, "reference", spp=4096, seed=0, indirect_only=True)
        ref_time = time.perf_counter() - t0
        err = relative_rmse(approx, ref)
        ratio = min(approx_times) / ref_time
        ok &= err <= 0.25 and ratio <= 0.01
        results.append(f"alpha_r={alpha_r}: rel RMSE {err:.3f}, time ratio {ratio:.2%}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 300.0
    detail = "; ".join(results) + f" | {elapsed:.0f}s"
    assert report(5, "approx vs Monte Carlo reference", ok, detail), detail


# --------------------------------------------------------------------------- 6

def test_criterion_6_degeneracies(report):
    checks = {}
    up = np.array([0.0, 1.0, 0.0])
    floor = single_reflector_scene(0.2).rectangles[0]
    wall_pt = np.array([0.0, 1.0, -1.5])
    receiver = ShadingPoint(wall_pt, np.array([0.0, 0.0, 1.0]),
                            normalize3(np.array([0.0, 1.5, 2.5]) - wall_pt), Material(0.3, 0.9))
    light = DirectionalLight(normalize3([0.0, 1.0, 0.8]), 1.0)

    below = Scene(single_reflector_scene(0.2, 16).rectangles,
                  (DirectionalLight(normalize3([0.0, -1.0, 0.4]), 1.0),),
                  single_reflector_scene(0.2, 16).camera)
    checks["light below plane"] = all(
        np.array_equal(render(below, m, spp=16, indirect_only=True).pixels, np.zeros((16, 16, 3)))
        for m in ("approx-asg", "approx-sg", "reference"))

    tiny = RectangleProxy([0, 0, 0], up, [1, 0, 0], 0.2, 0.2, floor.material, 0)
    peak = find_specular_peak(tiny, wall_pt, light.direction)
    disjoint = bool(intersection_area_fraction(tiny, SamplingDisk(peak.position, 0.3, up)) == 0.0)
    zero = np.array_equal(shade_indirect_specular(receiver, tiny, [light], 0.3), np.zeros(3))
    checks["disjoint disk"] = disjoint and zero

    try:
        warp_ndf_to_light_domain(ndf_as_sg(up, 0.3), normalize3([1.0, 1e-6, 0.0]))
        raised = False
    except GrazingAngleError:
        raised = True
    grazing = ShadingPoint(wall_pt, np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]),
                           Material(0.3, 0.9))
    checks["grazing guard"] = raised and np.array_equal(
        shade_indirect_specular(grazing, floor, [light], DISK_RADIUS), np.zeros(3))

    worst = 0.0
    for sign in (1.0, -1.0):
        for t in (0.05, 0.5, 0.95):
            lo = disk_integral_factor(sign * K_SERIES_CUTOFF * (1 - 1e-12), t)
            hi = disk_integral_factor(sign * K_SERIES_CUTOFF * (1 + 1e-12), t)
            worst = max(worst, abs(lo / hi - 1.0))
    k0 = integrate_disk_radiance(np.ones(3), 0.0, 1.0, 1.0, 1.0).total
    checks[f"k~0 continuity {worst:.1e}"] = worst <= 1e-6 and np.allclose(k0, np.pi / 2, rtol=1e-15)
    checks["k(cos, alpha) crosses zero"] = k_factor(0.5, 0.7) < 0 < k_factor(1.0, 0.1)

    over = np.array([0.0, 1.0, 0.0])
    peak = find_specular_peak(floor, over, up)
    big = build_asg_light(peak, over, SamplingDisk(peak.position, 30.0, up), np.ones(3))
    huge_disk = shade_indirect_specular(receiver, floor, [light], 40.0)
    checks["bandwidth floor"] = (bool(big.low_confidence)
                                 and bool(np.all(big.asg.bandwidth_tangent == ASG_BANDWIDTH_FLOOR))
                                 and bool(np.all(np.isfinite(huge_disk)))
                                 and bool(np.all(huge_disk >= 0)))

    ok = report(6, "degeneracy suite", all(checks.values()),
                ", ".join(f"{k}={'ok' if v else 'BAD'}" for k, v in checks.items()))
    assert ok, checks


# --------------------------------------------------------------------------- 7

def test_criterion_7_determinism(report, tmp_path, cornell_path):
    outcomes = {}
    cornell = load_scene(cornell_path)
    for name, scene, mode, spp in [("cornell approx-asg", cornell, "approx-asg", 4096),
                                   ("cornell approx-sg", cornell, "approx-sg", 4096),
                                   ("two-plane reference", single_reflector_scene(0.3, 40),
                                    "reference", 64)]:
        paths = []
        for run, threads in enumerate((1, 1, 4)):
            path = tmp_path / f"{name.replace(' ', '_')}_{run}.ppm"
            write_image(render(scene, mode, spp=spp, seed=3, threads=threads), path)
            paths.append(path.read_bytes())
        outcomes[name] = paths[0] == paths[1] == paths[2]
    ok = report(7, "byte-identical renders across runs and thread counts", all(outcomes.values()),
                ", ".join(f"{k}={'same' if v else 'DIFF'}" for k, v in outcomes.items()))
    assert ok, outcomes
