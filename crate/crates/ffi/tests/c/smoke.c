#include <math.h>
#include <stdio.h>
#include <string.h>

#include "polyzeta.h"

int main(void) {
    PzResult r;
    if (pz_series(2, 2, 1e-12, &r) != PZ_STATUS_OK || fabs(r.value - M_PI * M_PI / 4.0) > 1e-11) {
        fprintf(stderr, "series failed\n");
        return 1;
    }
    if (pz_series(0, 2, 1e-12, &r) != PZ_STATUS_INVALID_PARAMETER || strlen(pz_last_error()) == 0) {
        fprintf(stderr, "bad k accepted\n");
        return 1;
    }

    PzBreakdown *b = NULL;
    if (pz_formula(4, 2, 1e-9, false, &b) != PZ_STATUS_OK) {
        fprintf(stderr, "formula failed: %s\n", pz_last_error());
        return 1;
    }
    size_t n = pz_breakdown_len(b);
    uint32_t idx[3], alpha[3];
    size_t len = 0;
    for (size_t i = 0; i < n; i++) {
        if (pz_breakdown_tuple(b, i, idx, alpha, 3, &len) != PZ_STATUS_OK) {
            return 1;
        }
    }
    pz_breakdown_result(b, &r);
    pz_breakdown_free(b);
    printf("%zu tuples, S(4,2) = %.15f\n", n, r.value);
    return r.method == PZ_METHOD_POLYTOPE_FORMULA ? 0 : 1;
}
