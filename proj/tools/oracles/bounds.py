"""Closed-form convergence-time bounds, used to pin the expected values in
tests/test_bounds.cpp."""

import math


def t1(theta21_0, omega0, k):
    gap = theta21_0 if theta21_0 > 0 else 2 * math.pi + theta21_0
    return math.ceil((gap - 2 * (omega0 + k)) / omega0)


def push_increment(theta_max, psi, omega0, k):
    return (math.floor((theta_max - (omega0 + k)) / k) + 1
            + math.ceil((psi - (theta_max + k)) / k))


def t4(theta_i0, k_prev, kc_prev, psi, omega0, k):
    gap = theta_i0 if theta_i0 > 0 else 2 * math.pi + theta_i0
    return max(k_prev + math.ceil((gap - 2 * (omega0 + k)) / omega0), kc_prev) + \
        math.ceil((psi - 2 * (omega0 + k)) / k)


if __name__ == "__main__":
    print("t1(pi/3, 0.005, 0.01) =", t1(math.pi / 3, 0.005, 0.01))
    print("t1(2(w0+K)) =", t1(2 * (0.005 + 0.01), 0.005, 0.01))
    print("t2-t1 (pi/4, pi/3, 0.005, 0.005) =", push_increment(math.pi / 4, math.pi / 3, 0.005, 0.005))
    print("t1(-pi/2, 0.005, 0.005) =", t1(-math.pi / 2, 0.005, 0.005))
    print("t4(0.5, 100, 180, pi/3, 0.005, 0.005) =", t4(0.5, 100, 180, math.pi / 3, 0.005, 0.005))
    print("t4(1.2, 100, 180, pi/3, 0.005, 0.005) =", t4(1.2, 100, 180, math.pi / 3, 0.005, 0.005))
    print("floor((pi/4-0.01)/0.005) =", math.floor((math.pi / 4 - 0.01) / 0.005))
    print("ceil((pi/3-pi/4-0.005)/0.005) =", math.ceil((math.pi / 12 - 0.005) / 0.005))
