#include <math.h>
#include <stdio.h>
#include "monokinetic.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            char msg[512];                                            \
            mk_last_error(msg, sizeof msg);                           \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond, msg); \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    MkScenario *sc = NULL;
    MkModel *m = NULL;
    CHECK(mk_scenario_builtin("example_3_2", &sc) == MK_STATUS_OK);
    CHECK(mk_model_new(sc, &m) == MK_STATUS_OK);
    double cand = 0.0, x[4], mass[4];
    size_t found = 0;
    CHECK(mk_model_atoms(m, 1.0, &cand, 1, x, mass, 4, &found) == MK_STATUS_OK);
    CHECK(found == 1 && fabs(x[0]) < 1e-3 && fabs(mass[0] - 1.0) < 1e-3);
    double rho = 0.0;
    CHECK(mk_model_density_at(m, 1.0, 0.0, &rho) == MK_STATUS_CAUSTIC);
    mk_model_free(m);
    mk_scenario_free(sc);
    CHECK(mk_scenario_from_json("{", &sc) == MK_STATUS_PARSE);
    printf("ok %s\n", mk_version());
    return 0;
}
