#include <stdio.h>
#include "qstream.h"

static const char *FULL2 =
    "{\"instances\":[\"a\",\"b\"],\"concepts\":["
    "{\"name\":\"h00\",\"labels\":[0,0]},{\"name\":\"h01\",\"labels\":[0,1]},"
    "{\"name\":\"h10\",\"labels\":[1,0]},{\"name\":\"h11\",\"labels\":[1,1]}]}";

static const char *PATTERNS =
    "{\"instances\":[\"a\"],\"horizon\":4,\"patterns\":["
    "[[\"a\",0],[\"a\",0],[\"a\",0],[\"a\",0]],"
    "[[\"a\",1],[\"a\",1],[\"a\",1],[\"a\",1]]]}";

int main(void) {
    QsConceptClass *h = NULL;
    QsPatternClass *p = NULL;
    uint32_t ld = 0, q = 0;
    char *exact = NULL;
    double approx = 0.0;

    if (qs_concept_class_from_json(FULL2, &h) != QS_STATUS_OK) goto fail;
    if (qs_littlestone_dimension(h, &ld) != QS_STATUS_OK) goto fail;
    if (qs_pattern_class_from_json(PATTERNS, &p) != QS_STATUS_OK) goto fail;
    if (qs_qld(p, 1, &q) != QS_STATUS_OK) goto fail;
    if (qs_exact_blind_error(1, 2, 1, NULL, 0, &exact, &approx) != QS_STATUS_OK) goto fail;

    printf("ld=%u qld=%u blind=%s\n", ld, q, exact);
    qs_string_free(exact);
    qs_pattern_class_free(p);
    qs_concept_class_free(h);
    return 0;

fail:
    fprintf(stderr, "error: %s\n", qs_last_error());
    return 1;
}
