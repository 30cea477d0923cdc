/* cc examples/smoke.c -Iinclude ../../target/debug/libsymflat_ffi.a -lm -lpthread -ldl -o smoke */
#include <stdio.h>
#include "symflat.h"

int main(void) {
    SymflatInstance *inst = NULL;
    if (symflat_instance_from_preset("t4_yang_mills_example", 16, &inst) != SYMFLAT_STATUS_OK) {
        fprintf(stderr, "%s\n", symflat_last_error());
        return 1;
    }
    SymflatFunctionalValue v;
    symflat_eval(inst, SYMFLAT_FUNCTIONAL_PYM, 1e-6, &v);
    printf("pym = %.12g, |d*F_p| = %.3e, critical = %d\n", v.value, v.residuals[0], v.critical);
    symflat_instance_free(inst);

    SymflatReport *report = NULL;
    char *json = NULL, *c0 = NULL;
    symflat_classify("1", "1/2", &report);
    symflat_report_json(report, &json, &c0);
    printf("c0 = %s\n", c0);
    symflat_string_free(json);
    symflat_string_free(c0);
    symflat_report_free(report);
    return 0;
}
