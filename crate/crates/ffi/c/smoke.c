#include <stdio.h>
#include <stdlib.h>
#include "freegad.h"

int main(void) {
    FreegadDataset *ds = NULL;
    if (freegad_dataset_generate(1000, 16, 0, 3, 15, 5, &ds) != FREEGAD_STATUS_OK) {
        fprintf(stderr, "generate: %s\n", freegad_last_error_message());
        return 1;
    }
    FreegadConfig cfg = freegad_config_default();
    FreegadScores *sc = NULL;
    if (freegad_score(ds, &cfg, &sc) != FREEGAD_STATUS_OK) {
        fprintf(stderr, "score: %s\n", freegad_last_error_message());
        return 1;
    }
    size_t n = freegad_scores_len(sc);
    double *s = malloc(n * sizeof *s);
    unsigned char *y = malloc(n);
    freegad_scores_copy(sc, s, NULL, NULL, n);
    freegad_dataset_labels(ds, y, n);
    double roc, prc;
    freegad_evaluate(s, y, n, &roc, &prc);
    printf("n=%zu auroc=%.4f auprc=%.4f\n", n, roc, prc);
    free(s);
    free(y);
    freegad_scores_free(sc);
    freegad_dataset_free(ds);
    return 0;
}
