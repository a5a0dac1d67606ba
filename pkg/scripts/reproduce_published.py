"""Recompute every published number from the bundled scenarios and print them side by side."""

import numpy as np

from lvniche.analysis import (
    classify_two_species,
    enumerate_equilibria,
    interior_equilibrium,
    linearized_percent_for_target,
    percent_change_for_target,
    perturbed_equilibrium,
    survival_threshold,
    sweep,
)
from lvniche.dynamics import SimulationProtocol, simulate
from lvniche.estimation import alpha_from_income_fraction, alpha_from_population_ratio, capacities_from_equilibrium
from lvniche.scenario import bundled_scenario


def row(label, ours, published):
    print(f"  {label:<44} {ours:<28} {published}")


def main():
    unca = bundled_scenario("unca_2species").model
    print("two institutions")
    row("alpha pair from income fraction 0.25", str(tuple(alpha_from_income_fraction(0.25))), "(0.25, 1)")
    row("K from N* = (24, 8)", str(capacities_from_equilibrium(unca.alpha, [24, 8]).tolist()), "(26, 32)")
    row("interior equilibrium", str(interior_equilibrium(unca).N.tolist()), "(24, 8)")
    row("regime", classify_two_species(unca).name, "stable equilibrium")
    row("N2* after K2 +1%", f"{perturbed_equilibrium(unca, 'K[2]', 0.01).N[1]:.4f}", "8.42")
    row("N2* after alpha21 -1%", f"{perturbed_equilibrium(unca, 'alpha[2][1]', -0.01).N[1]:.4f}", "8.29")
    for p in ("K[2]", "alpha[2][1]"):
        exact = percent_change_for_target(unca, p, 1, 1.0)
        lin = linearized_percent_for_target(unca, p, 1, 1.0)
        row(f"% change of {p} for +1 student", f"{exact:+.3f} (linear {lin:+.3f})", "+2.4" if p == "K[2]" else "-3.5")
    row("N2* after K1 +10%", f"{perturbed_equilibrium(unca, 'K[1]', 0.10).N[1]:.4f}", "about half of 8")

    print("three institutions")
    row("alpha pair from catchments 8966 / 30004", "(%.5f, %.5f)" % alpha_from_population_ratio(8966, 30004), "0.3 / 0.7")
    row("number of equilibria", str(len(enumerate_equilibria(bundled_scenario("nova_k31").model))), "8")
    for name in ("nova_k16", "nova_k29", "nova_k31", "nova_k31_swapped"):
        sc = bundled_scenario(name)
        final = simulate(sc.model, sc.initial, sc.protocol).final
        published = {"nova_k16": "Nova disappears", "nova_k31": "(23.5, 7.9, 1.9)",
                     "nova_k31_swapped": "(23.5, 7.9, 1.9)", "nova_k29": "survives for a while"}[name]
        row(f"{name} at t = {final.t:g}", str(final.N.round(3).tolist()), published)
        eq = interior_equilibrium(sc.model)
        if eq is not None:
            row("  analytic interior equilibrium", str(eq.N.round(3).tolist()), "")

    sc = bundled_scenario("nova_k31")
    rows = sweep(sc.model, "K[3]", range(16, 33), sc.initial, SimulationProtocol("euler", 0.01, 15000, 1000))
    first = min(r.value for r in rows if r.survives[2])
    resident = next(r for r in enumerate_equilibria(sc.model) if r.support == (0, 1))
    row("smallest K3 with N3 >= 1 at t = 150", f"{first:g}", "about 29")
    row("asymptotic invasion threshold for K3", f"{survival_threshold(sc.model, resident, 2):g}", "")
    sw = bundled_scenario("nova_k31_swapped").model
    resident = next(r for r in enumerate_equilibria(sw) if r.support == (0, 1))
    row("  same, alpha23/alpha32 exchanged", f"{survival_threshold(sw, resident, 2):g}", "")


if __name__ == "__main__":
    np.set_printoptions(precision=4)
    main()
