#include <stdio.h>
#include <string.h>

#include "farey_heights.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,    \
                    fh_last_error() ? fh_last_error() : "");          \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    FhTower *t = NULL;
    CHECK(fh_tower_chain(4, "1", &t) == FH_STATUS_OK);
    size_t len = 0;
    CHECK(fh_tower_len(t, &len) == FH_STATUS_OK && len == 4);
    FhNode node;
    CHECK(fh_tower_node(t, 3, &node) == FH_STATUS_OK);
    CHECK(node.num == 1 && node.den == 3 && node.mult_pullback == 3);

    bool ok = false;
    int64_t n = 0, m = 0;
    char *lhs = NULL;
    CHECK(fh_per_prime_bound(t, "9", "4", "2", &ok, &n, &m, &lhs, NULL) == FH_STATUS_OK);
    CHECK(ok && n == 3 && m == 2);
    printf("lhs %s\n", lhs);
    fh_string_free(lhs);
    fh_tower_free(t);

    char *phi = NULL;
    CHECK(fh_phi("1/2", "1/2", &phi) == FH_STATUS_OK);
    printf("phi %s\n", phi);
    fh_string_free(phi);

    CHECK(fh_tower_new("chain:2", "0", &t) == FH_STATUS_INVALID_ARGUMENT);
    CHECK(fh_last_error() != NULL);
    CHECK(fh_first_level("3/q", NULL) == FH_STATUS_PARSE_ERROR);
    puts("ok");
    return 0;
}
