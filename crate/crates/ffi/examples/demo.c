#include <stdio.h>
#include "wirtinger.h"

int main(void) {
    WirtExpr *f = NULL;
    size_t offset = 0;
    if (wirt_expr_parse("z^3 - i*z + conj(z)^2", &f, &offset) != WIRT_STATUS_OK) {
        fprintf(stderr, "parse failed at %zu: %s\n", offset, wirt_last_error_message());
        return 1;
    }
    WirtJet jet;
    WirtComplex at = {1.0, 2.0};
    if (wirt_expr_diff(f, at, &jet) != WIRT_STATUS_OK) {
        fprintf(stderr, "%s\n", wirt_last_error_message());
        wirt_expr_free(f);
        return 1;
    }
    printf("dz  = %g%+gi\n", jet.dz.re, jet.dz.im);
    printf("dzc = %g%+gi\n", jet.dzc.re, jet.dzc.im);
    wirt_expr_free(f);
    return 0;
}
