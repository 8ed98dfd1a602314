#!/usr/bin/env python3
"""Regenerates the recorded reference trajectories under tests/fixtures/.

The step functions below are transcribed directly from the published v0
classic-control dynamics (Euler integration, reference constants) using plain
Python floats, independently of the C++ implementation.  Each fixture freezes
one trajectory: an explicit initial state, a scripted action sequence, and the
resulting per-step rewards and post-step states.

Fixture format (CSV, environment named by the file prefix): a header row,
then the step-0 row carrying the initial state (empty action/reward), then
one row per step with the action applied, the reward received, the post-step
state components, and the done flag.
Run from the repository root:  python3 tools/make_fixtures.py
"""

import math
import os

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")


def fmt(x):
    return repr(float(x))


# ---------------------------------------------------------------- cart-pole

def cartpole_step(state, action):
    """v0 dynamics: discrete force +/-10, Euler with position-first update."""
    gravity = 9.8
    masscart = 1.0
    masspole = 0.1
    total_mass = masspole + masscart
    length = 0.5
    polemass_length = masspole * length
    force_mag = 10.0
    tau = 0.02
    theta_threshold = 12 * 2 * math.pi / 360
    x_threshold = 2.4

    x, x_dot, theta, theta_dot = state
    force = force_mag if action == 1 else -force_mag
    costheta = math.cos(theta)
    sintheta = math.sin(theta)
    temp = (force + polemass_length * theta_dot * theta_dot * sintheta) / total_mass
    thetaacc = (gravity * sintheta - costheta * temp) / (
        length * (4.0 / 3.0 - masspole * costheta * costheta / total_mass)
    )
    xacc = temp - polemass_length * thetaacc * costheta / total_mass
    x = x + tau * x_dot
    x_dot = x_dot + tau * xacc
    theta = theta + tau * theta_dot
    theta_dot = theta_dot + tau * thetaacc
    done = (
        x < -x_threshold
        or x > x_threshold
        or theta < -theta_threshold
        or theta > theta_threshold
    )
    return [x, x_dot, theta, theta_dot], 1.0, done


# ------------------------------------------------------- mountain-car (cont.)

def mountaincar_step(state, action):
    """v0 continuous dynamics: power 0.0015, velocity clip, left-wall stop."""
    min_position = -1.2
    max_position = 0.6
    max_speed = 0.07
    goal_position = 0.45
    power = 0.0015

    position, velocity = state
    force = min(max(action, -1.0), 1.0)
    velocity += force * power - 0.0025 * math.cos(3 * position)
    if velocity > max_speed:
        velocity = max_speed
    if velocity < -max_speed:
        velocity = -max_speed
    position += velocity
    if position > max_position:
        position = max_position
    if position < min_position:
        position = min_position
    if position == min_position and velocity < 0:
        velocity = 0.0
    done = position >= goal_position
    reward = 0.0
    if done:
        reward = 100.0
    reward -= math.pow(action, 2) * 0.1
    return [position, velocity], reward, done


# ------------------------------------------------------------------ pendulum

def angle_normalize(x):
    return ((x + math.pi) % (2 * math.pi)) - math.pi


def pendulum_step(state, action):
    """v0 dynamics: new angular velocity computed first, reward from old state."""
    max_speed = 8.0
    max_torque = 2.0
    dt = 0.05
    g = 10.0
    m = 1.0
    length = 1.0

    th, thdot = state
    u = min(max(action, -max_torque), max_torque)
    costs = angle_normalize(th) ** 2 + 0.1 * thdot ** 2 + 0.001 * (u ** 2)
    newthdot = thdot + (
        -3 * g / (2 * length) * math.sin(th + math.pi)
        + 3.0 / (m * length ** 2) * u
    ) * dt
    newth = th + newthdot * dt
    if newthdot > max_speed:
        newthdot = max_speed
    if newthdot < -max_speed:
        newthdot = -max_speed
    return [newth, newthdot], -costs, False


# ----------------------------------------------------------------- scripting

def write_fixture(name, env_name, init, actions, step_fn, expect_done_last=False):
    state = list(init)
    cols = ["step", "action", "reward"]
    cols += ["s%d" % i for i in range(len(init))]
    cols.append("done")
    lines = [",".join(cols)]
    lines.append(",".join(["0", "", ""] + [fmt(s) for s in init] + ["0"]))
    done = False
    for i, a in enumerate(actions):
        assert not done, "%s: episode ended before the action script" % name
        state, reward, done = step_fn(state, a)
        lines.append(
            ",".join([str(i + 1), fmt(a), fmt(reward)]
                     + [fmt(s) for s in state] + ["1" if done else "0"])
        )
    if expect_done_last:
        assert done, "%s: expected terminal state on the last step" % name
    else:
        assert not done, "%s: unexpected early termination" % name
    path = os.path.join(OUT_DIR, name)
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
    print("wrote", name, "(%d steps)" % len(actions))


def main():
    os.makedirs(OUT_DIR, exist_ok=True)

    # CartPole: alternating push, constant push (pole tips but survives 20
    # steps), and a deliberate fall that crosses the angle limit on step 20.
    write_fixture(
        "cartpole_1.csv", "cartpole",
        [0.01, -0.02, 0.03, -0.01],
        [1, 0] * 10,
        cartpole_step,
    )
    write_fixture(
        "cartpole_2.csv", "cartpole",
        [-0.04, 0.01, -0.02, 0.04],
        [1, 1, 0, 0] * 5,
        cartpole_step,
    )
    write_fixture(
        "cartpole_3.csv", "cartpole",
        [0.046, 0.384, -0.062, -0.127],
        [1, 0, 0, 0, 1, 1, 0, 1, 1, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1],
        cartpole_step,
        expect_done_last=True,
    )

    # Mountain car: full-power right (hits the velocity clip), a wall-banging
    # push left (position clamp zeroes the velocity), and a goal finish whose
    # +100 bonus lands exactly on the final scripted step.
    write_fixture(
        "mountaincar_1.csv", "mountaincar",
        [-1.1, 0.05],
        [1.0] * 20,
        mountaincar_step,
    )
    write_fixture(
        "mountaincar_2.csv", "mountaincar",
        [-1.05, -0.04],
        [-1.0] * 12 + [1.0] * 8,
        mountaincar_step,
    )
    write_fixture(
        "mountaincar_3.csv", "mountaincar",
        [0.1529, 0.0215],
        [0.7, 1.0, 0.35, 0.7, 0.9, 0.7, 0.8, 1.0, 0.7, 0.7,
         0.7, 0.7, 0.9, 0.7, 1.0, 0.8, 0.8, 0.8, 0.7, 0.35],
        mountaincar_step,
        expect_done_last=True,
    )

    # Pendulum: swing through the angle wrap, saturate the angular-velocity
    # clip at +8, and mixed torques around the upright position.
    write_fixture(
        "pendulum_1.csv", "pendulum",
        [math.pi - 0.15, 1.2],
        [2.0, 2.0, 2.0, 2.0, -2.0, -1.5, 0.5, 1.0, 2.0, 2.0,
         -0.25, 0.75, -2.0, 2.0, 1.25, -1.0, 0.0, 2.0, -2.0, 1.5],
        pendulum_step,
    )
    write_fixture(
        "pendulum_2.csv", "pendulum",
        [0.4, 7.2],
        [2.0] * 10 + [-2.0] * 10,
        pendulum_step,
    )
    write_fixture(
        "pendulum_3.csv", "pendulum",
        [-0.05, -0.3],
        [0.1, -0.2, 0.3, -0.4, 0.5, -0.6, 0.7, -0.8, 0.9, -1.0,
         1.1, -1.2, 1.3, -1.4, 1.5, -1.6, 1.7, -1.8, 1.9, -2.0],
        pendulum_step,
    )


if __name__ == "__main__":
    main()
