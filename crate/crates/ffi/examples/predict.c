/* Train on a tiny labelled set and label one sequence.
 *
 *   cargo build -p tmhcrf-ffi
 *   cc -I crates/ffi/include crates/ffi/examples/predict.c \
 *      target/debug/libtmhcrf_ffi.a -lpthread -ldl -lm -o predict
 */
#include <stdio.h>

#include "tmhcrf.h"

static const char *DATA = ">r1\nCAAF\n0111\n>r2\nCDED\n1000\n>r3\nDFAE\n0110\n";
static const char *CONFIG =
    "preset = exp1\n"
    "group.start_end_edge = off\n"
    "property.Hydrophobic = ACF\n"
    "property.Polar = CDE\n";

int main(void) {
    TmhModel *model = NULL;
    char *labels = NULL;
    size_t k = 0;

    if (tmh_train(DATA, CONFIG, &model) != TMH_STATUS_OK) {
        fprintf(stderr, "train: %s\n", tmh_last_error());
        return 1;
    }
    tmh_model_num_features(model, &k);
    if (tmh_predict(model, "EAFD", &labels) != TMH_STATUS_OK) {
        fprintf(stderr, "predict: %s\n", tmh_last_error());
        tmh_model_free(model);
        return 1;
    }
    printf("%zu %s\n", k, labels);
    tmh_string_free(labels);
    tmh_model_free(model);
    return 0;
}
