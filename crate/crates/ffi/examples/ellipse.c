#include <stdio.h>

#include "neutral_inclusion.h"

static int check(enum NiStatus s, const char *what) {
    if (s != NI_STATUS_OK) {
        char msg[256];
        ni_last_error_message(msg, sizeof msg);
        fprintf(stderr, "%s: %s (%s)\n", what, ni_status_string(s), msg);
        return 1;
    }
    return 0;
}

int main(void) {
    NiMap *map = NULL;
    NiInterface *iface = NULL;
    NiSolver *weak = NULL, *perfect = NULL;
    double tw[4], tp[4], g0, g2, phase;

    if (check(ni_map_ellipse(1.25, 0.75, &map), "map")) return 1;
    if (check(ni_interface_calibrated(map, 128, &iface), "interface")) return 1;
    if (check(ni_interface_coefficients(iface, &g0, &g2, &phase), "coefficients")) return 1;
    if (check(ni_solver_imperfect(iface, 256, &weak), "imperfect")) return 1;
    if (check(ni_solver_perfect(map, 256, &perfect), "perfect")) return 1;
    ni_solver_polarization(weak, tw);
    ni_solver_polarization(perfect, tp);

    printf("gamma0 %.12f gamma2 %.12f\n", g0, g2);
    printf("weak    %.3e %.3e %.3e %.3e\n", tw[0], tw[1], tw[2], tw[3]);
    printf("perfect %.6f %.6f %.6f %.6f\n", tp[0], tp[1], tp[2], tp[3]);

    ni_solver_free(weak);
    ni_solver_free(perfect);
    ni_interface_free(iface);
    ni_map_free(map);
    return 0;
}
