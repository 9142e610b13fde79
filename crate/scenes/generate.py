#!/usr/bin/env python3
"""Writes the scene fixtures under scenes/.

Everything is deterministic; rerunning reproduces the checked-in files.

    python3 scenes/generate.py
"""

import math
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent


def fmt(v):
    return repr(float(v))


def vec(v):
    return "[" + ", ".join(fmt(x) for x in v) + "]"


def plant_toml(curves, organs=(), sigma_distance=0.02, step=0.005, sigma_connect=0.02, comment=None):
    out = []
    if comment:
        out += ["# " + line for line in comment.splitlines()]
    out += [f"step = {fmt(step)}", f"sigma_connect = {fmt(sigma_connect)}", f"sigma_distance = {fmt(sigma_distance)}", ""]
    for points, radius in curves:
        out.append("[[curves]]")
        out.append("points = [" + ", ".join(vec(p) for p in points) + "]")
        out.append(f"radii = [{fmt(radius)}]")
        out.append("")
    for o in organs:
        out.append("[[organs]]")
        for k, v in o.items():
            if isinstance(v, str):
                out.append(f'{k} = "{v}"')
            elif isinstance(v, (list, tuple)):
                out.append(f"{k} = {vec(v)}")
            else:
                out.append(f"{k} = {fmt(v)}")
        out.append("")
    return "\n".join(out)


def trajectory_csv(rows):
    lines = ["t,x,y,z,qw,qx,qy,qz"]
    for t, p in rows:
        lines.append(",".join(fmt(x) for x in (t, *p, 1.0, 0.0, 0.0, 0.0)))
    return "\n".join(lines) + "\n"


def box(center, half):
    return f'{{ type = "box", center = {vec(center)}, half_extents = {vec(half)} }}'


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def arc(start, direction, length, droop, n=8):
    """Polyline leaving `start` along `direction`, bending down by `droop` m at its end."""
    d = [c / math.sqrt(sum(x * x for x in direction)) for c in direction]
    pts = []
    for i in range(n + 1):
        s = i / n
        pts.append([start[k] + d[k] * length * s for k in range(3)])
        pts[-1][2] -= droop * s * s
    return pts


# Cantilever: a horizontal branch clamped at one end.
def cantilever():
    d = ROOT / "cantilever"
    write(d / "plant.toml", plant_toml([([[0, 0, 0.5], [0.3, 0, 0.5]], 0.005)],
                                       comment="Horizontal 0.3 m branch, clamped at x = 0."))
    write(d / "scene.toml", """# Reference cantilever: sags under gravity and comes to rest.
plant = "plant.toml"
tip = [0.3, 0.0, 0.5]

[material]
young_modulus = 2e7
poisson_ratio = 0.3
density = 300.0

[solver]
velocity_damping = 3.0

[run]
duration = 5.0
""")


# Small branching plant used for the stiffness, density and resolution trends.
def branching():
    d = ROOT / "branching"
    curves = [([[0, 0, 0], [0, 0, 0.4]], 0.006)]
    for z, ang in ((0.15, 0.0), (0.25, 2.1), (0.35, 4.2)):
        c, s = math.cos(ang), math.sin(ang)
        start = [0.006 * c, 0.006 * s, z]
        curves.append((arc(start, [c, s, 0.15], 0.25, 0.0), 0.004))
    write(d / "plant.toml", plant_toml(curves, comment="Upright stem with three side branches."))
    top = curves[-1][0][-1]
    write(d / "scene.toml", f"""# Branching plant at the reference configuration (E = 2e7 Pa, rho = 300, sigma_distance = 0.02).
plant = "plant.toml"
tip = {vec(top)}

[material]
young_modulus = 2e7
poisson_ratio = 0.3
density = 300.0

[solver]
velocity_damping = 3.0

# Parameter studies look at sag alone; soft or heavy variants would otherwise
# shed branches at the stem.
[fracture]
enabled = false

[run]
duration = 5.0

[output]
stride = 2
""")


# Harvest scenes: a fork-shaped plate straddles the pedicel and drags the fruit
# away from its attachment until the pedicel breaks.
FRUIT = dict(radius=0.01, mass=0.01, pedicel_length=0.02, pedicel_radius=0.0015)
SLOT = 0.004  # half width of the fork slot
TINE = 0.01   # half width of one tine


def fork(normal_axis, along_axis, half_thickness, half_length):
    """Two tines either side of the slot; the slot runs along `along_axis`."""
    side = 3 - normal_axis - along_axis
    prims = []
    for sign in (-1, 1):
        c = [0.0, 0.0, 0.0]
        c[side] = sign * (SLOT + TINE)
        h = [0.0, 0.0, 0.0]
        h[normal_axis] = half_thickness
        h[along_axis] = half_length
        h[side] = TINE
        prims.append(box(c, h))
    return prims


def pull_scene(name, direction, normal_axis, along_axis, comment):
    d = ROOT / name
    top = [0.0, 0.0, 0.2]
    organs = [dict(kind="fruit", at=top, direction=direction, **FRUIT)]
    write(d / "plant.toml", plant_toml([([[0, 0, 0], top], 0.005)], organs,
                                       comment="Potted stem carrying one fruit at its top."))
    # Plate starts just short of the fruit, on the stem side.
    fruit_center = [top[k] + direction[k] * (FRUIT["pedicel_length"]) for k in range(3)]
    half_thickness = 0.002
    gap = FRUIT["radius"] + half_thickness + 0.0005
    start = [fruit_center[k] - direction[k] * gap for k in range(3)]
    hold, speed, travel_time = 0.5, 0.05, 4.0
    end = [start[k] + direction[k] * speed * travel_time for k in range(3)]
    write(d / "gripper.csv", trajectory_csv([(0.0, start), (hold, start), (hold + travel_time, end)]))
    prims = ",\n    ".join(fork(normal_axis, along_axis, half_thickness, 0.03))
    write(d / "scene.toml", f"""# {comment}
plant = "plant.toml"
# The stem is held just below the fruit, as a picker's other hand would.
pins = [{vec(top)}]

[material]
young_modulus = 2e7
poisson_ratio = 0.3
density = 300.0

[solver]
velocity_damping = 1.0

# Only the stretch threshold is under study here; bending limits are lifted.
[fracture]
organ = {{ c_s_max = 0.1, c_b_max = 1000.0 }}
structural = {{ c_s_max = 1.0, c_b_max = 1000.0 }}

[run]
stop_after_detach = 0.25

[output]
stride = 4

[[obstacles]]
name = "gripper"
trajectory = "gripper.csv"
primitives = [
    {prims},
]
""")


def bend_scene():
    d = ROOT / "harvest_bend"
    top, bottom = [0.0, 0.0, 0.5], [0.0, 0.0, 0.3]
    organs = [dict(kind="fruit", at=bottom, direction=[0.0, 0.0, -1.0], **FRUIT)]
    write(d / "plant.toml", plant_toml([([top, bottom], 0.004)], organs,
                                       comment="Truss hanging from a beam with one fruit at its lower end."))
    fruit_z = bottom[2] - FRUIT["pedicel_length"]
    half = 0.003
    x0 = -(FRUIT["radius"] + half + 0.001)
    write(d / "gripper.csv", trajectory_csv([
        (0.0, [x0, 0.0, fruit_z]),
        (0.3, [x0, 0.0, fruit_z]),
        (1.3, [x0 + 0.05, 0.0, fruit_z]),
    ]))
    write(d / "scene.toml", f"""# Bending harvest: a paddle pushes the hanging fruit sideways until the pedicel snaps.
plant = "plant.toml"

[material]
young_modulus = 2e7
poisson_ratio = 0.3
density = 300.0

# Undamped, so the detached fruit falls freely.
[solver]
velocity_damping = 0.0

[fracture]
organ = {{ c_s_max = 0.1, c_b_max = 0.31 }}

[run]
stop_after_detach = 0.3

[[obstacles]]
name = "paddle"
trajectory = "gripper.csv"
primitives = [{box([0, 0, 0], [half, 0.02, 0.015])}]
""")


def grid_sdf(path, center, radius, origin, spacing, dims):
    lines = ["plantsim-sdf 1", "# sphere sampled on a regular grid",
             f"origin {fmt(origin[0])} {fmt(origin[1])} {fmt(origin[2])}", f"spacing {fmt(spacing)}",
             f"dims {dims[0]} {dims[1]} {dims[2]}"]
    for k in range(dims[2]):
        for j in range(dims[1]):
            row = []
            for i in range(dims[0]):
                p = [origin[0] + i * spacing, origin[1] + j * spacing, origin[2] + k * spacing]
                dist = math.sqrt(sum((p[a] - center[a]) ** 2 for a in range(3))) - radius
                row.append(f"{dist:.6f}")
            lines.append(" ".join(row))
    write(path, "\n".join(lines) + "\n")


def grid_obstacle():
    d = ROOT / "grid_obstacle"
    write(d / "plant.toml", plant_toml([([[0, 0, 0.5], [0.3, 0, 0.5]], 0.005)],
                                       comment="Horizontal 0.3 m branch, clamped at x = 0."))
    grid_sdf(d / "ball.sdf", [0, 0, 0], 0.03, [-0.05, -0.05, -0.05], 0.005, (21, 21, 21))
    write(d / "ball.csv", trajectory_csv([(0.0, [0.2, 0.0, 0.4]), (1.0, [0.2, 0.0, 0.49]), (2.0, [0.2, 0.0, 0.4])]))
    write(d / "scene.toml", """# A ball described by a sampled distance grid lifts the branch and lets it drop again.
plant = "plant.toml"

[solver]
velocity_damping = 1.0

[output]
stride = 4
binary_frames = true

[[obstacles]]
name = "ball"
trajectory = "ball.csv"
grids = ["ball.sdf"]
""")


# Reference plant: a tomato-like plant of roughly 2,242 rods at
# sigma_distance = 0.02, hanging from a beam like a trellised greenhouse plant.
# An upright stem of this stiffness would buckle under its own weight.
def reference():
    rng = random.Random(7)
    d = ROOT / "reference"
    curves, organs = [], []
    top, bottom = 1.6, 0.2
    curves.append(([[0, 0, top], [0, 0, bottom - 0.02]], 0.008))
    n_side = 16
    for i in range(n_side):
        z = top - 0.12 - i * (top - bottom - 0.2) / (n_side - 1)
        ang = i * 2.39996
        c, s = math.cos(ang), math.sin(ang)
        start = [0.009 * c, 0.009 * s, z]
        length = 0.26 + 0.04 * rng.random()
        pts = arc(start, [c, s, 0.3], length, 0.02)
        curves.append((pts, 0.005))
        organs.append(dict(kind="leaf", at=pts[-1], template="compound", scale=0.8, direction=[c, s, 0.0]))
        organs.append(dict(kind="leaf", at=pts[2], template="simple", scale=1.0, direction=[-s, c, 0.0]))
        # The youngest branch at the top has one sub-branch fewer.
        fracs = (0.375, 0.625) if i == 0 else (0.375, 0.625, 0.875)
        for j, frac in enumerate(fracs):
            base = pts[round(frac * (len(pts) - 1))]
            side = 1 if j % 2 == 0 else -1
            sub_dir = [c - side * s * 1.2, s + side * c * 1.2, 0.4]
            sub_start = [base[0] + 0.006 * (-side * s), base[1] + 0.006 * side * c, base[2]]
            sub = arc(sub_start, sub_dir, 0.12, 0.0, n=4)
            curves.append((sub, 0.0035))
            n = math.hypot(sub_dir[0], sub_dir[1])
            organs.append(dict(kind="leaf", at=sub[-1], template="compound", scale=0.6,
                               direction=[sub_dir[0] / n, sub_dir[1] / n, 0.0]))
            organs.append(dict(kind="leaf", at=sub[2], template="simple", scale=0.8,
                               direction=[side * s, -side * c, 0.0]))
        # A fruit truss hanging below the branch, close to the stem.
        tb = pts[1]
        truss = [[tb[0], tb[1], tb[2] - 0.006], [tb[0] + 0.02 * c, tb[1] + 0.02 * s, tb[2] - 0.086]]
        curves.append((truss, 0.003))
        for k in range(4):
            f = truss[0][2] - 0.02 - 0.018 * k
            t = (truss[0][2] - f) / (truss[0][2] - truss[1][2])
            at = [truss[0][a] + t * (truss[1][a] - truss[0][a]) for a in range(3)]
            sign = 1 if k % 2 == 0 else -1
            organs.append(dict(kind="fruit", at=at, radius=0.009, mass=0.008, pedicel_length=0.02,
                               pedicel_radius=0.0015, direction=[-sign * s, sign * c, -0.3]))
    write(d / "plant.toml", plant_toml(curves, organs, comment="Tomato-like reference plant hanging from a beam, generated by generate.py."))
    body = """plant = "plant.toml"

[material]
young_modulus = 2e7
poisson_ratio = 0.3
density = 300.0

[fracture]
enabled = false

[run]
duration = 10.0

[output]
stride = 12
"""
    write(d / "scene.toml", "# Reference plant at sigma_distance = 0.02 m.\n" + body)
    write(d / "scene_coarse.toml", "# Reference plant simplified at sigma_distance = 0.05 m.\n" + body +
          "\n[compiler]\nsigma_distance = 0.05\n")



if __name__ == "__main__":
    cantilever()
    branching()
    pull_scene("harvest_up", [0.0, 0.0, 1.0], 2, 0,
               "Upward pull: a horizontal fork under the fruit lifts it off an upright pedicel.")
    pull_scene("harvest_horizontal", [1.0, 0.0, 0.0], 0, 2,
               "Horizontal pull: a vertical fork behind the fruit drags it away from the stem.")
    bend_scene()
    grid_obstacle()
    reference()
